// Service base URL: one setting, overridable at runtime by assigning
// globalThis.DRAFTLAB_BASE_URL before the app loads (empty = same origin).
export function serviceBaseUrl(): string {
  const override = (globalThis as Record<string, unknown>)["DRAFTLAB_BASE_URL"];
  return typeof override === "string" ? override : "";
}
