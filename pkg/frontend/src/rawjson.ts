// JSON parser that keeps each number's original text. The UI displays those
// raw spans verbatim, so every digit on screen is byte-identical to what the
// service sent -- the client never reformats (or computes) model numbers.

export interface RawNum {
  value: number;
  raw: string;
}

export type RawValue =
  | RawNum
  | string
  | boolean
  | null
  | RawValue[]
  | { [key: string]: RawValue };

export function isRawNum(v: RawValue): v is RawNum {
  return typeof v === "object" && v !== null && !Array.isArray(v)
    && typeof (v as RawNum).value === "number" && typeof (v as RawNum).raw === "string"
    && Object.keys(v).length === 2;
}

class Parser {
  private pos = 0;

  constructor(private readonly text: string) {}

  parse(): RawValue {
    const value = this.parseValue();
    this.skipWs();
    if (this.pos !== this.text.length) {
      throw new SyntaxError(`trailing characters at ${this.pos}`);
    }
    return value;
  }

  private skipWs(): void {
    while (this.pos < this.text.length && " \t\n\r".includes(this.text[this.pos])) {
      this.pos++;
    }
  }

  private fail(expected: string): never {
    throw new SyntaxError(`expected ${expected} at position ${this.pos}`);
  }

  private parseValue(): RawValue {
    this.skipWs();
    const c = this.text[this.pos];
    if (c === "{") return this.parseObject();
    if (c === "[") return this.parseArray();
    if (c === '"') return this.parseString();
    if (c === "t" || c === "f") return this.parseBool();
    if (c === "n") return this.parseNull();
    if (c === "-" || (c >= "0" && c <= "9")) return this.parseNumber();
    this.fail("a json value");
  }

  private expect(ch: string): void {
    if (this.text[this.pos] !== ch) this.fail(`'${ch}'`);
    this.pos++;
  }

  private parseObject(): { [key: string]: RawValue } {
    this.expect("{");
    const out: { [key: string]: RawValue } = {};
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

  private parseArray(): RawValue[] {
    this.expect("[");
    const out: RawValue[] = [];
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

  private parseString(): string {
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
        return JSON.parse(this.text.slice(start, this.pos)) as string;
      }
      this.pos++;
    }
    this.fail("closing quote");
  }

  private parseBool(): boolean {
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

  private parseNull(): null {
    if (this.text.startsWith("null", this.pos)) {
      this.pos += 4;
      return null;
    }
    this.fail("null");
  }

  private parseNumber(): RawNum {
    const start = this.pos;
    if (this.text[this.pos] === "-") this.pos++;
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
      if (this.text[this.pos] === "+" || this.text[this.pos] === "-") this.pos++;
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

export function parseWithRaw(text: string): RawValue {
  return new Parser(text).parse();
}

// narrowing helpers for the typed client
export function num(v: RawValue | undefined, field: string): RawNum {
  if (v === undefined || !isRawNum(v)) throw new TypeError(`field ${field} is not a number`);
  return v;
}

export function str(v: RawValue | undefined, field: string): string {
  if (typeof v !== "string") throw new TypeError(`field ${field} is not a string`);
  return v;
}

export function arr(v: RawValue | undefined, field: string): RawValue[] {
  if (!Array.isArray(v)) throw new TypeError(`field ${field} is not an array`);
  return v;
}

export function obj(v: RawValue | undefined, field: string): { [key: string]: RawValue } {
  if (typeof v !== "object" || v === null || Array.isArray(v) || isRawNum(v)) {
    throw new TypeError(`field ${field} is not an object`);
  }
  return v as { [key: string]: RawValue };
}
