/**
 * Minimal protobuf wire-format encoding: varints, tagged fields, and
 * length-delimited payloads. Just enough to serialize the graph format;
 * no reflection, no schema compiler.
 */

export function varint(value: number | bigint): Buffer {
  let v = BigInt(value);
  if (v < 0n) {
    v &= (1n << 64n) - 1n; // two's complement, 64-bit
  }
  const bytes: number[] = [];
  for (;;) {
    const b = Number(v & 0x7fn);
    v >>= 7n;
    if (v !== 0n) {
      bytes.push(b | 0x80);
    } else {
      bytes.push(b);
      return Buffer.from(bytes);
    }
  }
}

export function tag(fieldNo: number, wireType: number): Buffer {
  return varint((fieldNo << 3) | wireType);
}

export function lenField(fieldNo: number, payload: Buffer): Buffer {
  return Buffer.concat([tag(fieldNo, 2), varint(payload.length), payload]);
}

export function strField(fieldNo: number, text: string): Buffer {
  return lenField(fieldNo, Buffer.from(text, "utf-8"));
}

export function varintField(fieldNo: number, value: number | bigint): Buffer {
  return Buffer.concat([tag(fieldNo, 0), varint(value)]);
}

export function float32Field(fieldNo: number, value: number): Buffer {
  const buf = Buffer.alloc(4);
  buf.writeFloatLE(value, 0);
  return Buffer.concat([tag(fieldNo, 5), buf]);
}

export function packedVarints(values: Iterable<number | bigint>): Buffer {
  const parts: Buffer[] = [];
  for (const v of values) {
    parts.push(varint(v));
  }
  return Buffer.concat(parts);
}

export function float32ArrayLE(data: Float32Array): Buffer {
  const buf = Buffer.alloc(data.length * 4);
  for (let i = 0; i < data.length; i++) {
    buf.writeFloatLE(data[i], i * 4);
  }
  return buf;
}

export function int64ArrayLE(data: BigInt64Array): Buffer {
  const buf = Buffer.alloc(data.length * 8);
  for (let i = 0; i < data.length; i++) {
    buf.writeBigInt64LE(data[i], i * 8);
  }
  return buf;
}
