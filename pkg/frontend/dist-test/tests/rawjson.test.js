"use strict";
var __importDefault = (this && this.__importDefault) || function (mod) {
    return (mod && mod.__esModule) ? mod : { "default": mod };
};
Object.defineProperty(exports, "__esModule", { value: true });
const strict_1 = __importDefault(require("node:assert/strict"));
const node_test_1 = require("node:test");
const rawjson_js_1 = require("../src/rawjson.js");
(0, node_test_1.test)("numbers keep their exact source text", () => {
    const parsed = (0, rawjson_js_1.parseWithRaw)('{"p": 0.5498339973124778}');
    strict_1.default.equal(parsed.p.raw, "0.5498339973124778");
    strict_1.default.equal(parsed.p.value, 0.5498339973124778);
});
(0, node_test_1.test)("python-style exponent and trailing-zero spellings survive", () => {
    for (const raw of ["1e-07", "0.0", "-0.0", "2.5E+3", "1.0", "-3e2"]) {
        const parsed = (0, rawjson_js_1.parseWithRaw)(`[${raw}]`);
        strict_1.default.equal(parsed[0].raw, raw);
        strict_1.default.equal(parsed[0].value, Number(raw));
    }
});
(0, node_test_1.test)("agrees with JSON.parse on values across a corpus", () => {
    const bodies = [
        '{"a": [1, 2.5, -3e-4], "b": {"c": null, "d": true}, "e": "text"}',
        '[{"x": 0.1}, {"x": 1e-12}, {"x": -0.0001}]',
        '{"nested": {"deep": [[1], [2.0, {"k": 3}]]}}',
        '"just a string"',
        "42",
    ];
    const strip = (v) => {
        if ((0, rawjson_js_1.isRawNum)(v))
            return v.value;
        if (Array.isArray(v))
            return v.map(strip);
        if (typeof v === "object" && v !== null) {
            return Object.fromEntries(Object.entries(v).map(([k, x]) => [k, strip(x)]));
        }
        return v;
    };
    for (const body of bodies) {
        strict_1.default.deepEqual(strip((0, rawjson_js_1.parseWithRaw)(body)), JSON.parse(body));
    }
});
(0, node_test_1.test)("string escapes are decoded", () => {
    const parsed = (0, rawjson_js_1.parseWithRaw)('{"name": "a\\"b\\\\c\\u00e9"}');
    strict_1.default.equal(parsed.name, 'a"b\\cé');
});
(0, node_test_1.test)("rejects malformed documents", () => {
    for (const bad of ["{", "[1,]", '{"a": 01}', "1 2", '{"a"}', "nulL"]) {
        strict_1.default.throws(() => (0, rawjson_js_1.parseWithRaw)(bad), SyntaxError, `should reject ${bad}`);
    }
});
(0, node_test_1.test)("num() narrows and rejects non-numbers", () => {
    const parsed = (0, rawjson_js_1.parseWithRaw)('{"x": 1.5, "y": "no"}');
    strict_1.default.equal((0, rawjson_js_1.num)(parsed["x"], "x").raw, "1.5");
    strict_1.default.throws(() => (0, rawjson_js_1.num)(parsed["y"], "y"), TypeError);
});
