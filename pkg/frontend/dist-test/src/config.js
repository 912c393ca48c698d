"use strict";
Object.defineProperty(exports, "__esModule", { value: true });
exports.serviceBaseUrl = serviceBaseUrl;
// Service base URL: one setting, overridable at runtime by assigning
// globalThis.DRAFTLAB_BASE_URL before the app loads (empty = same origin).
function serviceBaseUrl() {
    const override = globalThis["DRAFTLAB_BASE_URL"];
    return typeof override === "string" ? override : "";
}
