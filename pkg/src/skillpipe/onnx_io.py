"""Reading and writing the ONNX interchange format, minimally.

Only the subset of the format the embedded runtime executes is handled:
a single graph of nodes with tensor initializers, typed graph inputs and
outputs, and scalar/tensor/int-list/float-list node attributes. The
encoder exists so tests (and external tooling) can build small graphs
without pulling in the full ONNX toolchain; the decoder accepts both
packed and unpacked repeated scalar fields.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

# TensorProto.DataType values we understand.
_DTYPES = {
    1: np.dtype("float32"),
    2: np.dtype("uint8"),
    3: np.dtype("int8"),
    6: np.dtype("int32"),
    7: np.dtype("int64"),
    9: np.dtype("bool"),
    11: np.dtype("float64"),
}
FLOAT32 = 1

Dim = int | str | None  # fixed, named dynamic, or unknown


@dataclass(frozen=True)
class TensorSpec:
    name: str
    elem_type: int
    shape: tuple[Dim, ...]


@dataclass(frozen=True)
class NodeDef:
    op_type: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    attrs: dict = field(default_factory=dict)
    name: str = ""


@dataclass
class ModelGraph:
    name: str
    inputs: list[TensorSpec]
    outputs: list[TensorSpec]
    initializers: dict[str, np.ndarray]
    nodes: list[NodeDef]
    opset: int = 17


# ---------------------------------------------------------------------------
# wire-level helpers


def _varint(value: int) -> bytes:
    if value < 0:
        value &= (1 << 64) - 1
    out = bytearray()
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def _tag(field_no: int, wire_type: int) -> bytes:
    return _varint((field_no << 3) | wire_type)


def _len_field(field_no: int, payload: bytes) -> bytes:
    return _tag(field_no, 2) + _varint(len(payload)) + payload


def _str_field(field_no: int, text: str) -> bytes:
    return _len_field(field_no, text.encode("utf-8"))


def _varint_field(field_no: int, value: int) -> bytes:
    return _tag(field_no, 0) + _varint(value)


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def eof(self) -> bool:
        return self.pos >= len(self.buf)

    def varint(self) -> int:
        result = 0
        shift = 0
        while True:
            if self.pos >= len(self.buf):
                raise ValueError("truncated varint")
            b = self.buf[self.pos]
            self.pos += 1
            result |= (b & 0x7F) << shift
            if not b & 0x80:
                return result
            shift += 7
            if shift > 70:
                raise ValueError("varint too long")

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise ValueError("truncated field")
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def fields(self):
        """Yield (field_no, wire_type, value); value is int or bytes."""
        while not self.eof():
            key = self.varint()
            field_no, wire_type = key >> 3, key & 0x07
            if wire_type == 0:
                yield field_no, 0, self.varint()
            elif wire_type == 1:
                yield field_no, 1, self.take(8)
            elif wire_type == 2:
                yield field_no, 2, self.take(self.varint())
            elif wire_type == 5:
                yield field_no, 5, self.take(4)
            else:
                raise ValueError(f"unsupported wire type {wire_type}")


def _signed64(value: int) -> int:
    return value - (1 << 64) if value >= (1 << 63) else value


def _packed_varints(payload: bytes) -> list[int]:
    r = _Reader(payload)
    out = []
    while not r.eof():
        out.append(_signed64(r.varint()))
    return out


# ---------------------------------------------------------------------------
# message encoders


def _encode_tensor(name: str, array: np.ndarray) -> bytes:
    for code, dt in _DTYPES.items():
        if dt == array.dtype:
            data_type = code
            break
    else:
        raise ValueError(f"unsupported initializer dtype {array.dtype}")
    dims = b"".join(_varint(int(d)) for d in array.shape)
    body = b""
    if dims:
        body += _len_field(1, dims)  # packed dims
    body += _varint_field(2, data_type)
    body += _len_field(8, name.encode("utf-8")) if name else b""
    body += _len_field(9, np.ascontiguousarray(array).tobytes())
    return body


def _encode_shape(shape: tuple[Dim, ...]) -> bytes:
    body = b""
    for d in shape:
        if isinstance(d, int):
            dim = _varint_field(1, d)
        elif isinstance(d, str):
            dim = _str_field(2, d)
        else:
            dim = b""  # unknown dimension
        body += _len_field(1, dim)
    return body


def _encode_value_info(spec: TensorSpec) -> bytes:
    tensor_type = _varint_field(1, spec.elem_type) + _len_field(2, _encode_shape(spec.shape))
    type_proto = _len_field(1, tensor_type)
    return _str_field(1, spec.name) + _len_field(2, type_proto)


def _encode_attribute(name: str, value) -> bytes:
    body = _str_field(1, name)
    if isinstance(value, bool):
        raise ValueError("ambiguous bool attribute; use int")
    if isinstance(value, float):
        body += _tag(2, 5) + struct.pack("<f", value)
        body += _varint_field(20, 1)  # FLOAT
    elif isinstance(value, int):
        body += _varint_field(3, value)
        body += _varint_field(20, 2)  # INT
    elif isinstance(value, str):
        body += _len_field(4, value.encode("utf-8"))
        body += _varint_field(20, 3)  # STRING
    elif isinstance(value, np.ndarray):
        body += _len_field(5, _encode_tensor("", value))
        body += _varint_field(20, 4)  # TENSOR
    elif isinstance(value, (list, tuple)) and all(isinstance(v, int) for v in value):
        body += _len_field(8, b"".join(_varint(v) for v in value))
        body += _varint_field(20, 7)  # INTS
    elif isinstance(value, (list, tuple)) and all(isinstance(v, float) for v in value):
        body += _len_field(7, b"".join(struct.pack("<f", v) for v in value))
        body += _varint_field(20, 6)  # FLOATS
    else:
        raise ValueError(f"unsupported attribute value for {name!r}: {value!r}")
    return body


def _encode_node(node: NodeDef) -> bytes:
    body = b"".join(_str_field(1, s) for s in node.inputs)
    body += b"".join(_str_field(2, s) for s in node.outputs)
    if node.name:
        body += _str_field(3, node.name)
    body += _str_field(4, node.op_type)
    for attr_name in sorted(node.attrs):
        body += _len_field(5, _encode_attribute(attr_name, node.attrs[attr_name]))
    return body


def encode_model(graph: ModelGraph) -> bytes:
    """Serialize a ModelGraph to ONNX bytes."""
    g = b"".join(_len_field(1, _encode_node(n)) for n in graph.nodes)
    g += _str_field(2, graph.name)
    for name, arr in graph.initializers.items():
        g += _len_field(5, _encode_tensor(name, arr))
    g += b"".join(_len_field(11, _encode_value_info(s)) for s in graph.inputs)
    g += b"".join(_len_field(12, _encode_value_info(s)) for s in graph.outputs)

    opset = _str_field(1, "") + _varint_field(2, graph.opset)
    model = _varint_field(1, 8)  # ir_version
    model += _str_field(2, "skillpipe")
    model += _len_field(7, g)
    model += _len_field(8, opset)
    return model


# ---------------------------------------------------------------------------
# message decoders


def _decode_tensor(payload: bytes) -> tuple[str, np.ndarray]:
    dims: list[int] = []
    data_type = 0
    name = ""
    raw = None
    float_data: list[float] = []
    int_data: list[int] = []
    for field_no, wt, value in _Reader(payload).fields():
        if field_no == 1:
            dims.extend(_packed_varints(value) if wt == 2 else [_signed64(value)])
        elif field_no == 2 and wt == 0:
            data_type = value
        elif field_no == 4:
            if wt == 2:
                float_data.extend(struct.unpack(f"<{len(value) // 4}f", value))
            else:
                float_data.append(struct.unpack("<f", value)[0])
        elif field_no in (5, 7):
            int_data.extend(_packed_varints(value) if wt == 2 else [_signed64(value)])
        elif field_no == 8 and wt == 2:
            name = value.decode("utf-8")
        elif field_no == 9 and wt == 2:
            raw = value
    if data_type not in _DTYPES:
        raise ValueError(f"unsupported tensor data type {data_type}")
    dtype = _DTYPES[data_type]
    if raw is not None:
        arr = np.frombuffer(raw, dtype=dtype.newbyteorder("<")).astype(dtype)
    elif float_data:
        arr = np.array(float_data, dtype=dtype)
    elif int_data:
        arr = np.array(int_data, dtype=dtype)
    else:
        arr = np.zeros(0, dtype=dtype)
    return name, arr.reshape(dims) if dims else arr.reshape(())


def _decode_shape(payload: bytes) -> tuple[Dim, ...]:
    shape: list[Dim] = []
    for field_no, wt, value in _Reader(payload).fields():
        if field_no != 1 or wt != 2:
            continue
        dim: Dim = None
        for f, w, v in _Reader(value).fields():
            if f == 1 and w == 0:
                dim = _signed64(v)
            elif f == 2 and w == 2:
                dim = v.decode("utf-8")
        shape.append(dim)
    return tuple(shape)


def _decode_value_info(payload: bytes) -> TensorSpec:
    name = ""
    elem_type = 0
    shape: tuple[Dim, ...] = ()
    for field_no, wt, value in _Reader(payload).fields():
        if field_no == 1 and wt == 2:
            name = value.decode("utf-8")
        elif field_no == 2 and wt == 2:
            for f, w, v in _Reader(value).fields():
                if f == 1 and w == 2:  # tensor_type
                    for f2, w2, v2 in _Reader(v).fields():
                        if f2 == 1 and w2 == 0:
                            elem_type = v2
                        elif f2 == 2 and w2 == 2:
                            shape = _decode_shape(v2)
    return TensorSpec(name=name, elem_type=elem_type, shape=shape)


def _decode_attribute(payload: bytes):
    name = ""
    value = None
    ints: list[int] = []
    floats: list[float] = []
    for field_no, wt, v in _Reader(payload).fields():
        if field_no == 1 and wt == 2:
            name = v.decode("utf-8")
        elif field_no == 2 and wt == 5:
            value = struct.unpack("<f", v)[0]
        elif field_no == 3 and wt == 0:
            value = _signed64(v)
        elif field_no == 4 and wt == 2:
            value = v.decode("utf-8")
        elif field_no == 5 and wt == 2:
            value = _decode_tensor(v)[1]
        elif field_no == 7:
            if wt == 2:
                floats.extend(struct.unpack(f"<{len(v) // 4}f", v))
            else:
                floats.append(struct.unpack("<f", v)[0])
        elif field_no == 8:
            ints.extend(_packed_varints(v) if wt == 2 else [_signed64(v)])
    if ints:
        value = ints
    elif floats:
        value = floats
    return name, value


def _decode_node(payload: bytes) -> NodeDef:
    inputs: list[str] = []
    outputs: list[str] = []
    attrs: dict = {}
    op_type = ""
    name = ""
    for field_no, wt, value in _Reader(payload).fields():
        if field_no == 1 and wt == 2:
            inputs.append(value.decode("utf-8"))
        elif field_no == 2 and wt == 2:
            outputs.append(value.decode("utf-8"))
        elif field_no == 3 and wt == 2:
            name = value.decode("utf-8")
        elif field_no == 4 and wt == 2:
            op_type = value.decode("utf-8")
        elif field_no == 5 and wt == 2:
            k, v = _decode_attribute(value)
            attrs[k] = v
    if not op_type:
        raise ValueError("node without op_type")
    return NodeDef(op_type=op_type, inputs=tuple(inputs), outputs=tuple(outputs), attrs=attrs, name=name)


def _decode_graph(payload: bytes) -> ModelGraph:
    graph = ModelGraph(name="", inputs=[], outputs=[], initializers={}, nodes=[])
    declared_inputs: list[TensorSpec] = []
    for field_no, wt, value in _Reader(payload).fields():
        if field_no == 1 and wt == 2:
            graph.nodes.append(_decode_node(value))
        elif field_no == 2 and wt == 2:
            graph.name = value.decode("utf-8")
        elif field_no == 5 and wt == 2:
            name, arr = _decode_tensor(value)
            graph.initializers[name] = arr
        elif field_no == 11 and wt == 2:
            declared_inputs.append(_decode_value_info(value))
        elif field_no == 12 and wt == 2:
            graph.outputs.append(_decode_value_info(value))
    # Initializers may be re-declared as graph inputs; runtime inputs are the rest.
    graph.inputs = [s for s in declared_inputs if s.name not in graph.initializers]
    return graph


def decode_model(data: bytes) -> ModelGraph:
    """Parse ONNX bytes into a ModelGraph; raises ValueError on malformed data."""
    graph = None
    opset = 0
    for field_no, wt, value in _Reader(data).fields():
        if field_no == 7 and wt == 2:
            graph = _decode_graph(value)
        elif field_no == 8 and wt == 2:
            for f, w, v in _Reader(value).fields():
                if f == 2 and w == 0:
                    opset = max(opset, _signed64(v))
    if graph is None:
        raise ValueError("no graph found in model data")
    graph.opset = opset or graph.opset
    return graph
