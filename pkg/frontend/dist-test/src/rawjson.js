"use strict";
// JSON parser that keeps each number's original text. The UI displays those
// raw spans verbatim, so every digit on screen is byte-identical to what the
// service sent -- the client never reformats (or computes) model numbers.
Object.defineProperty(exports, "__esModule", { value: true });
exports.isRawNum = isRawNum;
exports.parseWithRaw = parseWithRaw;
exports.num = num;
exports.str = str;
exports.arr = arr;
exports.obj = obj;
function isRawNum(v) {
    return typeof v === "object" && v !== null && !Array.isArray(v)
        && typeof v.value === "number" && typeof v.raw === "string"
        && Object.keys(v).length === 2;
}
class Parser {
    constructor(text) {
        this.text = text;
        this.pos = 0;
    }
    parse() {
        const value = this.parseValue();
        this.skipWs();
        if (this.pos !== this.text.length) {
            throw new SyntaxError(`trailing characters at ${this.pos}`);
        }
        return value;
    }
    skipWs() {
        while (this.pos < this.text.length && " \t\n\r".includes(this.text[this.pos])) {
            this.pos++;
        }
    }
    fail(expected) {
        throw new SyntaxError(`expected ${expected} at position ${this.pos}`);
    }
    parseValue() {
        this.skipWs();
        const c = this.text[this.pos];
        if (c === "{")
            return this.parseObject();
        if (c === "[")
            return this.parseArray();
        if (c === '"')
            return this.parseString();
        if (c === "t" || c === "f")
            return this.parseBool();
        if (c === "n")
            return this.parseNull();
        if (c === "-" || (c >= "0" && c <= "9"))
            return this.parseNumber();
        this.fail("a json value");
    }
    expect(ch) {
        if (this.text[this.pos] !== ch)
            this.fail(`'${ch}'`);
        this.pos++;
    }
    parseObject() {
        this.expect("{");
        const out = {};
        this.skipWs();
        if (this.text[this.pos] === "}") {
            this.pos++;
            return out;
        }
        for (;;) {
            this.skipWs();
            const key = this.parseString();
            this.skipWs();
            this.expect(":");
            out[key] = this.parseValue();
            this.skipWs();
            if (this.text[this.pos] === ",") {
                this.pos++;
                continue;
            }
            this.expect("}");
            return out;
        }
    }
    parseArray() {
        this.expect("[");
        const out = [];
        this.skipWs();
        if (this.text[this.pos] === "]") {
            this.pos++;
            return out;
        }
        for (;;) {
            out.push(this.parseValue());
            this.skipWs();
            if (this.text[this.pos] === ",") {
                this.pos++;
                continue;
            }
            this.expect("]");
            return out;
        }
    }
    parseString() {
        const start = this.pos;
        this.expect('"');
        while (this.pos < this.text.length) {
            const c = this.text[this.pos];
            if (c === "\\") {
                this.pos += 2;
                continue;
            }
            if (c === '"') {
                this.pos++;
                // delegate escape handling to the built-in parser
                return JSON.parse(this.text.slice(start, this.pos));
            }
            this.pos++;
        }
        this.fail("closing quote");
    }
    parseBool() {
        if (this.text.startsWith("true", this.pos)) {
            this.pos += 4;
            return true;
        }
        if (this.text.startsWith("false", this.pos)) {
            this.pos += 5;
            return false;
        }
        this.fail("true or false");
    }
    parseNull() {
        if (this.text.startsWith("null", this.pos)) {
            this.pos += 4;
            return null;
        }
        this.fail("null");
    }
    parseNumber() {
        const start = this.pos;
        if (this.text[this.pos] === "-")
            this.pos++;
        while (this.pos < this.text.length && this.text[this.pos] >= "0" && this.text[this.pos] <= "9") {
            this.pos++;
        }
        if (this.text[this.pos] === ".") {
            this.pos++;
            while (this.pos < this.text.length && this.text[this.pos] >= "0" && this.text[this.pos] <= "9") {
                this.pos++;
            }
        }
        if (this.text[this.pos] === "e" || this.text[this.pos] === "E") {
            this.pos++;
            if (this.text[this.pos] === "+" || this.text[this.pos] === "-")
                this.pos++;
            while (this.pos < this.text.length && this.text[this.pos] >= "0" && this.text[this.pos] <= "9") {
                this.pos++;
            }
        }
        const raw = this.text.slice(start, this.pos);
        if (!/^-?(0|[1-9]\d*)(\.\d+)?([eE][+-]?\d+)?$/.test(raw)) {
            this.fail("a number");
        }
        return { value: Number(raw), raw };
    }
}
function parseWithRaw(text) {
    return new Parser(text).parse();
}
// narrowing helpers for the typed client
function num(v, field) {
    if (v === undefined || !isRawNum(v))
        throw new TypeError(`field ${field} is not a number`);
    return v;
}
function str(v, field) {
    if (typeof v !== "string")
        throw new TypeError(`field ${field} is not a string`);
    return v;
}
function arr(v, field) {
    if (!Array.isArray(v))
        throw new TypeError(`field ${field} is not an array`);
    return v;
}
function obj(v, field) {
    if (typeof v !== "object" || v === null || Array.isArray(v) || isRawNum(v)) {
        throw new TypeError(`field ${field} is not an object`);
    }
    return v;
}
