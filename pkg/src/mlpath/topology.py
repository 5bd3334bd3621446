"""Line-oriented text format for multi-layer networks, and JSON for paths.

A document is a sequence of sections, each opened by a ``[name]`` header::

    [meta]
    qos_dim = 1
    [protocols]
    a
    b
    [nodes]
    0 S
    1
    2 D
    [edges]
    0 1 bw=10 qos=3
    1 2 bw=10 qos=1
    [functions]
    1 encap a b
    [weights]
    1 encap a b 2 0.5
    [endpoints]
    source = 0
    dest = 2

``#`` starts a comment. Function kinds are ``conv``, ``encap`` and ``decap``;
``encap a b`` is (a -> ab) and ``decap a b`` is ~(a -> ab). The full grammar
is in ``docs/topology-format.md``.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

from .model import AdaptationFunction, Kind, MLPath, MultiLayerNetwork, Step

SECTIONS = ("meta", "protocols", "nodes", "edges", "functions", "weights", "endpoints")
KIND_WORDS = {"conv": Kind.CONVERSION, "encap": Kind.ENCAPSULATION, "decap": Kind.DECAPSULATION}
WORD_OF_KIND = {k: w for w, k in KIND_WORDS.items()}
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.+-]*\Z")


class TopologyError(ValueError):
    """Parse failure with a 1-based location."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


def _tokens(text: str) -> list[tuple[str, int]]:
    """Whitespace-separated tokens with their 1-based start columns."""
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", text)]


def _number(tok: str, line: int, col: int, what: str, integer: bool = False):
    try:
        return int(tok) if integer else float(tok)
    except ValueError:
        raise TopologyError(f"expected {what}, got {tok!r}", line, col) from None


def parse(document: str) -> tuple[MultiLayerNetwork, int | None, int | None]:
    """Parse a topology document into ``(net, source, dest)``.

    Endpoints are None when the document has no ``[endpoints]`` section.
    """
    section = None
    seen: set[str] = set()
    qos_dim = None
    protocols: list[str] = []
    proto_id: dict[str, int] = {}
    nodes: list[int] = []
    known: set[int] = set()
    labels: dict[int, str] = {}
    edges: dict[tuple[int, int], tuple[float, tuple[float, ...], int]] = {}
    functions: dict[int, set[AdaptationFunction]] = {}
    fn_lines: list[tuple[int, int, AdaptationFunction, int]] = []
    weight_rows: list[tuple[int, tuple, float]] = []
    endpoints: dict[str, int] = {}

    def proto(tok: str, line: int, col: int) -> int:
        if tok not in proto_id:
            raise TopologyError(f"unknown protocol {tok!r}", line, col)
        return proto_id[tok]

    def node(tok: str, line: int, col: int) -> int:
        u = _number(tok, line, col, "a node id", integer=True)
        if u not in known:
            raise TopologyError(f"unknown node {u}", line, col)
        return u

    def function(toks, line) -> AdaptationFunction:
        (kw, kc), (a, ac), (b, bc) = toks
        if kw not in KIND_WORDS:
            raise TopologyError(f"unknown function kind {kw!r} (expected conv, encap or decap)", line, kc)
        return AdaptationFunction(KIND_WORDS[kw], proto(a, line, ac), proto(b, line, bc))

    for lineno, raw in enumerate(document.splitlines(), start=1):
        text = raw.split("#", 1)[0]
        toks = _tokens(text)
        if not toks:
            continue
        first, col = toks[0]
        if first.startswith("["):
            m = re.fullmatch(r"\[([a-z]+)\]", text.strip())
            if not m:
                raise TopologyError("malformed section header", lineno, col)
            name = m.group(1)
            if name not in SECTIONS:
                raise TopologyError(f"unknown section [{name}]", lineno, col)
            if name in seen:
                raise TopologyError(f"section [{name}] repeated", lineno, col)
            seen.add(name)
            section = name
            continue
        if section is None:
            raise TopologyError("content before the first section header", lineno, col)

        if section in ("meta", "endpoints"):
            m = re.fullmatch(r"\s*([a-z_]+)\s*=\s*(\S+)\s*", text)
            if not m:
                raise TopologyError("expected 'key = value'", lineno, col)
            key, value = m.group(1), m.group(2)
            vcol = m.start(2) + 1
            allowed = ("qos_dim",) if section == "meta" else ("source", "dest")
            if key not in allowed:
                raise TopologyError(f"unknown key {key!r} in [{section}]", lineno, col)
            if section == "meta":
                qos_dim = _number(value, lineno, vcol, "an integer", integer=True)
                if qos_dim < 0:
                    raise TopologyError("qos_dim must be non-negative", lineno, vcol)
            else:
                endpoints[key] = node(value, lineno, vcol)
        elif section == "protocols":
            if len(toks) != 1 or not _NAME.match(first):
                raise TopologyError("expected one protocol name per line", lineno, col)
            if first in proto_id:
                raise TopologyError(f"duplicate protocol {first!r}", lineno, col)
            proto_id[first] = len(protocols)
            protocols.append(first)
        elif section == "nodes":
            if len(toks) > 2:
                raise TopologyError("expected 'id [label]'", lineno, toks[2][1])
            u = _number(first, lineno, col, "a node id", integer=True)
            if u in known:
                raise TopologyError(f"duplicate node {u}", lineno, col)
            known.add(u)
            nodes.append(u)
            if len(toks) == 2:
                labels[u] = toks[1][0]
        elif section == "edges":
            if len(toks) < 2:
                raise TopologyError("expected 'u v [bw=B] [qos=q1,q2,...]'", lineno, col)
            u = node(toks[0][0], lineno, toks[0][1])
            v = node(toks[1][0], lineno, toks[1][1])
            if u == v:
                raise TopologyError("self-loops are not allowed", lineno, toks[1][1])
            if (u, v) in edges:
                raise TopologyError(f"duplicate edge ({u}, {v})", lineno, col)
            bw, qos = 1.0, None
            for tok, tcol in toks[2:]:
                key, _, value = tok.partition("=")
                if key == "bw":
                    bw = _number(value, lineno, tcol + 3, "a bandwidth")
                    if bw <= 0:
                        raise TopologyError("bandwidth must be positive", lineno, tcol)
                elif key == "qos":
                    parts = value.split(",") if value else []
                    qos = tuple(_number(x, lineno, tcol + 4, "a QoS value") for x in parts)
                else:
                    raise TopologyError(f"unknown edge attribute {key!r}", lineno, tcol)
            edges[(u, v)] = (bw, qos, lineno)
        elif section == "functions":
            if len(toks) != 4:
                raise TopologyError("expected 'node kind from to'", lineno, col)
            u = node(first, lineno, col)
            f = function(toks[1:], lineno)
            functions.setdefault(u, set()).add(f)
            fn_lines.append((lineno, u, f, col))
        elif section == "weights":
            if len(toks) != 6:
                raise TopologyError("expected 'node kind from to next weight'", lineno, col)
            u = node(first, lineno, col)
            f = function(toks[1:4], lineno)
            v = node(toks[4][0], lineno, toks[4][1])
            w = _number(toks[5][0], lineno, toks[5][1], "a weight")
            if w < 0:
                raise TopologyError("weights must be non-negative", lineno, toks[5][1])
            if (u, v) not in edges:
                raise TopologyError(f"weight given for missing edge ({u}, {v})", lineno, toks[4][1])
            if f not in functions.get(u, ()):
                raise TopologyError(f"weight given for a function node {u} lacks", lineno, toks[1][1])
            weight_rows.append((lineno, (u, f, v), w))

    if not protocols:
        raise TopologyError("no [protocols] given", 1)
    if qos_dim is None:
        dims = {len(q) for _, q, _ in edges.values() if q is not None}
        qos_dim = dims.pop() if len(dims) == 1 else 0
    for (u, v), (_, q, lineno) in edges.items():
        if q is not None and len(q) != qos_dim:
            raise TopologyError(f"QoS vector has {len(q)} entries, expected {qos_dim}", lineno)
    net = MultiLayerNetwork.build(
        nodes,
        edges,
        protocols,
        functions,
        weights={k: w for _, k, w in weight_rows},
        bandwidth={e: bw for e, (bw, _, _) in edges.items()},
        qos={e: q for e, (_, q, _) in edges.items() if q is not None},
        qos_dim=qos_dim,
        labels=labels,
    )
    return net, endpoints.get("source"), endpoints.get("dest")


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() and abs(x) < 2**53 else repr(float(x))


def _fn_text(net: MultiLayerNetwork, f: AdaptationFunction) -> str:
    return f"{WORD_OF_KIND[f.kind]} {net.protocols[f.a]} {net.protocols[f.b]}"


def serialize(net: MultiLayerNetwork, source: int | None = None, dest: int | None = None) -> str:
    for name in net.protocols:
        if not _NAME.match(name):
            raise ValueError(f"protocol name {name!r} cannot be written")
    out = ["[meta]", f"qos_dim = {net.qos_dim}", "[protocols]", *net.protocols, "[nodes]"]
    for u in net.nodes:
        label = net.labels.get(u)
        out.append(f"{u} {label}" if label is not None and label != str(u) else str(u))
    out.append("[edges]")
    for u, v in sorted(net.edges):
        line = f"{u} {v} bw={_fmt(net.bandwidth[(u, v)])}"
        if net.qos_dim:
            line += " qos=" + ",".join(_fmt(x) for x in net.qos[(u, v)])
        out.append(line)
    out.append("[functions]")
    for u in net.nodes:
        for f in net.sorted_functions[u]:
            out.append(f"{u} {_fn_text(net, f)}")
    out.append("[weights]")
    for (u, f, v), w in sorted(net.weights.items()):
        out.append(f"{u} {_fn_text(net, f)} {v} {_fmt(w)}")
    if source is not None or dest is not None:
        out.append("[endpoints]")
        if source is not None:
            out.append(f"source = {source}")
        if dest is not None:
            out.append(f"dest = {dest}")
    return "\n".join(out) + "\n"


def read_topology(path: str | Path):
    return parse(Path(path).read_text())


def write_topology(path: str | Path, net: MultiLayerNetwork, source=None, dest=None) -> None:
    Path(path).write_text(serialize(net, source, dest))


# paths as JSON

def function_to_json(net: MultiLayerNetwork, f: AdaptationFunction) -> dict[str, Any]:
    return {"kind": WORD_OF_KIND[f.kind], "from": net.protocols[f.a], "to": net.protocols[f.b],
            "label": f.label(net.protocols)}


def path_to_json(net: MultiLayerNetwork, path: MLPath) -> dict[str, Any]:
    return {
        "source": path.source,
        "emitted": net.protocols[path.emitted],
        "steps": [{"node": s.node, "function": function_to_json(net, s.function)} for s in path.steps],
        "dest": path.dest,
    }


def path_from_json(net: MultiLayerNetwork, data: dict[str, Any]) -> MLPath:
    """Inverse of :func:`path_to_json`; raises ValueError on malformed input."""
    try:
        steps = []
        for s in data["steps"]:
            fn = s["function"]
            kind = KIND_WORDS[fn["kind"]]
            f = AdaptationFunction(kind, net.protocol_id(fn["from"]), net.protocol_id(fn["to"]))
            steps.append(Step(int(s["node"]), f))
        return MLPath(int(data["source"]), net.protocol_id(data["emitted"]), tuple(steps), int(data["dest"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed path document: {exc}") from None


def dumps_path(net: MultiLayerNetwork, path: MLPath) -> str:
    return json.dumps(path_to_json(net, path), indent=2)
