"""Numpy execution of parsed inference graphs.

Single-threaded and deterministic by construction: nodes run in graph
order, each implemented with plain numpy. The supported operator set is
the one the bundled exporters emit plus common glue; anything else is
rejected at validation time so load failures happen before inference.
"""

from __future__ import annotations

import numpy as np

from .errors import UnsupportedOperatorError
from .onnx_io import ModelGraph, NodeDef


def _gemm(node: NodeDef, ins):
    a, b = ins[0], ins[1]
    if node.attrs.get("transA", 0):
        a = a.T
    if node.attrs.get("transB", 0):
        b = b.T
    y = node.attrs.get("alpha", 1.0) * (a @ b)
    if len(ins) > 2 and ins[2] is not None:
        y = y + node.attrs.get("beta", 1.0) * ins[2]
    return [y]


def _softmax(node: NodeDef, ins):
    x = ins[0]
    axis = node.attrs.get("axis", -1)
    shifted = x - x.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return [e / e.sum(axis=axis, keepdims=True)]


def _flatten(node: NodeDef, ins):
    x = ins[0]
    axis = node.attrs.get("axis", 1)
    lead = int(np.prod(x.shape[:axis])) if axis > 0 else 1
    return [x.reshape(lead, -1)]


def _reshape(node: NodeDef, ins):
    x, shape = ins[0], ins[1].astype(np.int64).tolist()
    dims = [x.shape[i] if d == 0 else d for i, d in enumerate(shape)]
    return [x.reshape(dims)]


def _transpose(node: NodeDef, ins):
    perm = node.attrs.get("perm")
    return [np.transpose(ins[0], perm)]


def _reduce_mean(node: NodeDef, ins):
    axes = node.attrs.get("axes")
    if axes is None and len(ins) > 1 and ins[1] is not None:
        axes = ins[1].astype(np.int64).tolist()
    axes = tuple(axes) if axes is not None else None
    keepdims = bool(node.attrs.get("keepdims", 1))
    return [ins[0].mean(axis=axes, keepdims=keepdims)]


def _squeeze(node: NodeDef, ins):
    axes = node.attrs.get("axes")
    if axes is None and len(ins) > 1 and ins[1] is not None:
        axes = ins[1].astype(np.int64).tolist()
    return [np.squeeze(ins[0], axis=tuple(axes) if axes else None)]


def _unsqueeze(node: NodeDef, ins):
    axes = node.attrs.get("axes")
    if axes is None and len(ins) > 1 and ins[1] is not None:
        axes = ins[1].astype(np.int64).tolist()
    return [np.expand_dims(ins[0], axis=tuple(axes))]


def _clip(node: NodeDef, ins):
    lo = ins[1] if len(ins) > 1 and ins[1] is not None else node.attrs.get("min")
    hi = ins[2] if len(ins) > 2 and ins[2] is not None else node.attrs.get("max")
    return [np.clip(ins[0], lo, hi)]


_OPS = {
    "Add": lambda n, ins: [ins[0] + ins[1]],
    "Sub": lambda n, ins: [ins[0] - ins[1]],
    "Mul": lambda n, ins: [ins[0] * ins[1]],
    "Div": lambda n, ins: [ins[0] / ins[1]],
    "MatMul": lambda n, ins: [ins[0] @ ins[1]],
    "Gemm": _gemm,
    "Relu": lambda n, ins: [np.maximum(ins[0], 0)],
    "Sigmoid": lambda n, ins: [1.0 / (1.0 + np.exp(-ins[0]))],
    "Tanh": lambda n, ins: [np.tanh(ins[0])],
    "Softmax": _softmax,
    "Flatten": _flatten,
    "Reshape": _reshape,
    "Transpose": _transpose,
    "GlobalAveragePool": lambda n, ins: [ins[0].mean(axis=(2, 3), keepdims=True)],
    "ReduceMean": _reduce_mean,
    "Concat": lambda n, ins: [np.concatenate(ins, axis=n.attrs["axis"])],
    "Constant": lambda n, ins: [np.asarray(n.attrs["value"])],
    "Identity": lambda n, ins: [ins[0]],
    "Squeeze": _squeeze,
    "Unsqueeze": _unsqueeze,
    "Clip": _clip,
    "Shape": lambda n, ins: [np.array(ins[0].shape, dtype=np.int64)],
}

SUPPORTED_OPS = frozenset(_OPS)


def validate_ops(graph: ModelGraph) -> None:
    """Reject graphs containing operators the runtime cannot execute."""
    unknown = sorted({n.op_type for n in graph.nodes} - SUPPORTED_OPS)
    if unknown:
        raise UnsupportedOperatorError(
            f"graph '{graph.name}' uses unsupported operator(s): {', '.join(unknown)}"
        )


def execute(graph: ModelGraph, feeds: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Run the graph on the given inputs; returns all declared outputs."""
    env: dict[str, np.ndarray] = dict(graph.initializers)
    env.update(feeds)
    for spec in graph.inputs:
        if spec.name not in env:
            raise ValueError(f"missing graph input '{spec.name}'")
    for node in graph.nodes:
        fn = _OPS.get(node.op_type)
        if fn is None:
            raise UnsupportedOperatorError(f"unsupported operator {node.op_type}")
        ins = [env[name] if name else None for name in node.inputs]
        for name, value in zip(node.outputs, fn(node, ins)):
            env[name] = value
    return {spec.name: env[spec.name] for spec in graph.outputs}
