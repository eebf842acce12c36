import { describe, expect, it } from "vitest";

import {
  float32ArrayLE,
  float32Field,
  lenField,
  packedVarints,
  strField,
  tag,
  varint,
  varintField,
} from "../src/proto.js";

describe("varint", () => {
  it("encodes canonical single bytes", () => {
    expect([...varint(0)]).toEqual([0]);
    expect([...varint(1)]).toEqual([1]);
    expect([...varint(127)]).toEqual([0x7f]);
  });

  it("encodes multi-byte values", () => {
    expect([...varint(128)]).toEqual([0x80, 0x01]);
    expect([...varint(300)]).toEqual([0xac, 0x02]);
    expect([...varint(2 ** 32)]).toEqual([0x80, 0x80, 0x80, 0x80, 0x10]);
  });

  it("encodes negatives as 64-bit two's complement", () => {
    const bytes = [...varint(-1)];
    expect(bytes).toHaveLength(10);
    expect(bytes.slice(0, 9).every((b) => b === 0xff)).toBe(true);
    expect(bytes[9]).toBe(0x01);
  });
});

describe("fields", () => {
  it("builds tags from field number and wire type", () => {
    expect([...tag(1, 0)]).toEqual([0x08]);
    expect([...tag(2, 2)]).toEqual([0x12]);
  });

  it("frames length-delimited payloads", () => {
    const payload = Buffer.from([1, 2, 3]);
    expect([...lenField(7, payload)]).toEqual([0x3a, 3, 1, 2, 3]);
  });

  it("encodes strings as utf-8", () => {
    expect([...strField(4, "Gemm")]).toEqual([0x22, 4, 0x47, 0x65, 0x6d, 0x6d]);
  });

  it("encodes varint fields", () => {
    expect([...varintField(3, 17)]).toEqual([0x18, 17]);
  });

  it("encodes float32 little-endian", () => {
    const bytes = [...float32Field(2, 1.0)];
    expect(bytes).toEqual([0x15, 0x00, 0x00, 0x80, 0x3f]);
  });

  it("packs repeated varints back to back", () => {
    expect([...packedVarints([1, 300, 2])]).toEqual([1, 0xac, 0x02, 2]);
  });

  it("writes float arrays little-endian", () => {
    const buf = float32ArrayLE(Float32Array.of(1.0, -2.0));
    expect(buf.readFloatLE(0)).toBe(1.0);
    expect(buf.readFloatLE(4)).toBe(-2.0);
  });
});
