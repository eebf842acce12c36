/**
 * Serialization of inference graphs to the ONNX interchange format.
 *
 * Covers the subset the downstream embedded runtime parses: one graph of
 * nodes, float32/int64 initializers carried as raw little-endian bytes,
 * typed value infos with fixed or named-dynamic dimensions, and scalar,
 * string, or int-list node attributes.
 */

import {
  float32ArrayLE,
  float32Field,
  int64ArrayLE,
  lenField,
  packedVarints,
  strField,
  varintField,
} from "./proto.js";

export const FLOAT32 = 1;
const INT64 = 7;

export type Dim = number | string | null;

export interface TensorSpec {
  name: string;
  elemType: number;
  shape: Dim[];
}

export type AttrValue =
  | { kind: "int"; value: number }
  | { kind: "float"; value: number }
  | { kind: "string"; value: string }
  | { kind: "ints"; value: number[] }
  | { kind: "floats"; value: number[] };

export interface NodeDef {
  opType: string;
  inputs: string[];
  outputs: string[];
  attrs?: Record<string, AttrValue>;
  name?: string;
}

export type Initializer =
  | { name: string; dtype: "float32"; dims: number[]; data: Float32Array }
  | { name: string; dtype: "int64"; dims: number[]; data: BigInt64Array };

export interface ModelGraph {
  name: string;
  inputs: TensorSpec[];
  outputs: TensorSpec[];
  initializers: Initializer[];
  nodes: NodeDef[];
  opset?: number;
}

function encodeTensor(init: Initializer): Buffer {
  const parts: Buffer[] = [];
  if (init.dims.length > 0) {
    parts.push(lenField(1, packedVarints(init.dims)));
  }
  parts.push(varintField(2, init.dtype === "float32" ? FLOAT32 : INT64));
  parts.push(lenField(8, Buffer.from(init.name, "utf-8")));
  const raw = init.dtype === "float32" ? float32ArrayLE(init.data) : int64ArrayLE(init.data);
  parts.push(lenField(9, raw));
  return Buffer.concat(parts);
}

function encodeShape(shape: Dim[]): Buffer {
  const dims = shape.map((d) => {
    if (typeof d === "number") {
      return lenField(1, varintField(1, d));
    }
    if (typeof d === "string") {
      return lenField(1, strField(2, d));
    }
    return lenField(1, Buffer.alloc(0)); // unknown dimension
  });
  return Buffer.concat(dims);
}

function encodeValueInfo(spec: TensorSpec): Buffer {
  const tensorType = Buffer.concat([
    varintField(1, spec.elemType),
    lenField(2, encodeShape(spec.shape)),
  ]);
  const typeProto = lenField(1, tensorType);
  return Buffer.concat([strField(1, spec.name), lenField(2, typeProto)]);
}

const ATTR_TYPE = { float: 1, int: 2, string: 3, floats: 6, ints: 7 } as const;

function encodeAttribute(name: string, attr: AttrValue): Buffer {
  const parts: Buffer[] = [strField(1, name)];
  switch (attr.kind) {
    case "float":
      parts.push(float32Field(2, attr.value));
      break;
    case "int":
      parts.push(varintField(3, attr.value));
      break;
    case "string":
      parts.push(strField(4, attr.value));
      break;
    case "floats": {
      const buf = Buffer.alloc(attr.value.length * 4);
      attr.value.forEach((v, i) => buf.writeFloatLE(v, i * 4));
      parts.push(lenField(7, buf));
      break;
    }
    case "ints":
      parts.push(lenField(8, packedVarints(attr.value)));
      break;
  }
  parts.push(varintField(20, ATTR_TYPE[attr.kind]));
  return Buffer.concat(parts);
}

function encodeNode(node: NodeDef): Buffer {
  const parts: Buffer[] = [];
  for (const input of node.inputs) {
    parts.push(strField(1, input));
  }
  for (const output of node.outputs) {
    parts.push(strField(2, output));
  }
  if (node.name) {
    parts.push(strField(3, node.name));
  }
  parts.push(strField(4, node.opType));
  for (const attrName of Object.keys(node.attrs ?? {}).sort()) {
    parts.push(lenField(5, encodeAttribute(attrName, node.attrs![attrName])));
  }
  return Buffer.concat(parts);
}

export function encodeModel(graph: ModelGraph): Buffer {
  const g: Buffer[] = [];
  for (const node of graph.nodes) {
    g.push(lenField(1, encodeNode(node)));
  }
  g.push(strField(2, graph.name));
  for (const init of graph.initializers) {
    g.push(lenField(5, encodeTensor(init)));
  }
  for (const input of graph.inputs) {
    g.push(lenField(11, encodeValueInfo(input)));
  }
  for (const output of graph.outputs) {
    g.push(lenField(12, encodeValueInfo(output)));
  }

  const opset = Buffer.concat([strField(1, ""), varintField(2, graph.opset ?? 17)]);
  return Buffer.concat([
    varintField(1, 8), // ir_version
    strField(2, "model-export"),
    lenField(7, Buffer.concat(g)),
    lenField(8, opset),
  ]);
}
