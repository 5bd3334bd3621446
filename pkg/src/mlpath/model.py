"""Multi-layer network data model, protocol stack semantics and path metrics.

A network carries, on top of a simple digraph, a protocol alphabet and per-node
adaptation functions. A path is feasible when protocol continuity holds at
every hop and every encapsulation is undone, in LIFO order, before the
destination.
"""

from __future__ import annotations

import dataclasses
import enum
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

Edge = tuple[int, int]

DEFAULT_WEIGHT = 1.0


class Kind(enum.IntEnum):
    """Adaptation function kinds; the integer order is the allocation draw order."""

    CONVERSION = 0
    ENCAPSULATION = 1
    DECAPSULATION = 2


@dataclass(frozen=True, order=True)
class AdaptationFunction:
    """One adaptation function, written in the ``(a -> ab)`` notation.

    * ``CONVERSION``: a is turned into b (passive when ``a == b``).
    * ``ENCAPSULATION``: a is wrapped inside b; a goes on the stack.
    * ``DECAPSULATION``: a is unwrapped from b; b must be current and a on top.
    """

    kind: Kind
    a: int
    b: int

    @classmethod
    def conversion(cls, a: int, b: int) -> AdaptationFunction:
        return cls(Kind.CONVERSION, a, b)

    @classmethod
    def passive(cls, a: int) -> AdaptationFunction:
        return cls(Kind.CONVERSION, a, a)

    @classmethod
    def encapsulation(cls, a: int, b: int) -> AdaptationFunction:
        return cls(Kind.ENCAPSULATION, a, b)

    @classmethod
    def decapsulation(cls, a: int, b: int) -> AdaptationFunction:
        return cls(Kind.DECAPSULATION, a, b)

    @property
    def input_protocol(self) -> int:
        return self.b if self.kind is Kind.DECAPSULATION else self.a

    @property
    def output_protocol(self) -> int:
        return self.a if self.kind is Kind.DECAPSULATION else self.b

    def label(self, names: Sequence[str] | None = None) -> str:
        a = names[self.a] if names else str(self.a)
        b = names[self.b] if names else str(self.b)
        if self.kind is Kind.CONVERSION:
            return f"({a}->{b})"
        if self.kind is Kind.ENCAPSULATION:
            return f"({a}->{a}{b})"
        return f"~({a}->{a}{b})"


class Tag(enum.IntEnum):
    PLAIN = 0
    PUSH = 1
    POP = 2


class Symbol(NamedTuple):
    """A trace letter: plain ``a``, push ``a-bar`` or pop ``a-underline``."""

    protocol: int
    tag: Tag

    def label(self, names: Sequence[str] | None = None) -> str:
        name = names[self.protocol] if names else str(self.protocol)
        return {Tag.PLAIN: "", Tag.PUSH: "^", Tag.POP: "_"}[self.tag] + name


Trace = tuple[Symbol, ...]


@dataclass(frozen=True)
class MultiLayerNetwork:
    """Immutable multi-layer network.

    Weight triples absent from ``weights`` cost ``DEFAULT_WEIGHT``, so the hop
    metric needs no explicit table. Use :meth:`build` rather than the raw
    constructor; it validates and fills per-edge defaults.
    """

    nodes: tuple[int, ...]
    edges: frozenset[Edge]
    protocols: tuple[str, ...]
    functions: Mapping[int, frozenset[AdaptationFunction]]
    weights: Mapping[tuple[int, AdaptationFunction, int], float] = field(default_factory=dict)
    bandwidth: Mapping[Edge, float] = field(default_factory=dict)
    qos: Mapping[Edge, tuple[float, ...]] = field(default_factory=dict)
    qos_dim: int = 0
    labels: Mapping[int, str] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        nodes: Iterable[int],
        edges: Iterable[Edge],
        protocols: Sequence[str],
        functions: Mapping[int, Iterable[AdaptationFunction]] | None = None,
        weights: Mapping[tuple[int, AdaptationFunction, int], float] | None = None,
        bandwidth: Mapping[Edge, float] | None = None,
        qos: Mapping[Edge, Sequence[float]] | None = None,
        qos_dim: int | None = None,
        labels: Mapping[int, str] | None = None,
    ) -> MultiLayerNetwork:
        nodes = tuple(sorted(set(nodes)))
        node_set = set(nodes)
        edges = frozenset((int(u), int(v)) for u, v in edges)
        protocols = tuple(protocols)
        if len(set(protocols)) != len(protocols):
            raise ValueError("protocol names must be unique")
        if not protocols:
            raise ValueError("protocol alphabet is empty")
        for u, v in edges:
            if u not in node_set or v not in node_set:
                raise ValueError(f"edge ({u}, {v}) references an unknown node")
        funcs: dict[int, frozenset[AdaptationFunction]] = {u: frozenset() for u in nodes}
        for u, fs in (functions or {}).items():
            if u not in node_set:
                raise ValueError(f"functions given for unknown node {u}")
            fs = frozenset(fs)
            for f in fs:
                if not (0 <= f.a < len(protocols) and 0 <= f.b < len(protocols)):
                    raise ValueError(f"function {f} on node {u} uses an unknown protocol")
            funcs[u] = fs
        weights = dict(weights or {})
        for (u, f, v), w in weights.items():
            if (u, v) not in edges or f not in funcs[u]:
                raise ValueError(f"weight triple ({u}, {f}, {v}) is not a usable hop")
            if w < 0:
                raise ValueError("weights must be non-negative")
        bw = {e: float((bandwidth or {}).get(e, 1.0)) for e in edges}
        if any(b <= 0 for b in bw.values()):
            raise ValueError("bandwidth must be positive")
        qos = dict(qos or {})
        if qos_dim is None:
            qos_dim = len(next(iter(qos.values()))) if qos else 0
        qv: dict[Edge, tuple[float, ...]] = {}
        for e in edges:
            vec = tuple(float(x) for x in qos.get(e, (0.0,) * qos_dim))
            if len(vec) != qos_dim:
                raise ValueError(f"edge {e} has a QoS vector of length {len(vec)}, expected {qos_dim}")
            qv[e] = vec
        return cls(
            nodes=nodes,
            edges=edges,
            protocols=protocols,
            functions=funcs,
            weights=weights,
            bandwidth=bw,
            qos=qv,
            qos_dim=qos_dim,
            labels=dict(labels or {}),
        )

    def replace(self, **changes) -> MultiLayerNetwork:
        """Copy with some fields swapped; cached views are not carried over."""
        return dataclasses.replace(self, **changes)

    def with_edges(self, keep: Iterable[Edge]) -> MultiLayerNetwork:
        """Sub-network on the same nodes keeping only the links in ``keep``."""
        edges = frozenset(keep) & self.edges
        return self.replace(
            edges=edges,
            weights={k: w for k, w in self.weights.items() if (k[0], k[2]) in edges},
            bandwidth={e: b for e, b in self.bandwidth.items() if e in edges},
            qos={e: q for e, q in self.qos.items() if e in edges},
        )

    @cached_property
    def successors(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {u: [] for u in self.nodes}
        for u, v in self.edges:
            out[u].append(v)
        return {u: tuple(sorted(vs)) for u, vs in out.items()}

    @cached_property
    def sorted_functions(self) -> dict[int, tuple[AdaptationFunction, ...]]:
        return {u: tuple(sorted(fs)) for u, fs in self.functions.items()}

    @cached_property
    def _in_out(self) -> dict[int, tuple[frozenset[int], frozenset[int]]]:
        res = {}
        for u in self.nodes:
            fs = self.functions.get(u, ())
            res[u] = (
                frozenset(f.input_protocol for f in fs),
                frozenset(f.output_protocol for f in fs),
            )
        return res

    def in_set(self, u: int) -> frozenset[int]:
        return self._in_out[u][0]

    def out_set(self, u: int) -> frozenset[int]:
        return self._in_out[u][1]

    def weight(self, u: int, f: AdaptationFunction, v: int) -> float:
        return self.weights.get((u, f, v), DEFAULT_WEIGHT)

    def protocol_id(self, name: str) -> int:
        try:
            return self.protocols.index(name)
        except ValueError:
            raise KeyError(f"unknown protocol {name!r}") from None

    def node_label(self, u: int) -> str:
        return self.labels.get(u, str(u))


def in_set(net: MultiLayerNetwork, u: int) -> frozenset[int]:
    return net.in_set(u)


def out_set(net: MultiLayerNetwork, u: int) -> frozenset[int]:
    return net.out_set(u)


@dataclass(frozen=True)
class Step:
    node: int
    function: AdaptationFunction


@dataclass(frozen=True)
class MLPath:
    """``S f0 U1 f1 ... Un fn D`` with the fictitious ``f0`` replaced by ``emitted``."""

    source: int
    emitted: int
    steps: tuple[Step, ...]
    dest: int

    @property
    def node_sequence(self) -> tuple[int, ...]:
        return (self.source, *(s.node for s in self.steps), self.dest)

    @property
    def hops(self) -> list[Edge]:
        seq = self.node_sequence
        return list(zip(seq, seq[1:]))

    def has_loop(self) -> bool:
        """True when some directed link is crossed more than once."""
        hops = self.hops
        return len(set(hops)) < len(hops)


class Reason(str, enum.Enum):
    NOT_AN_EDGE = "NotAnEdge"
    FUNCTION_UNAVAILABLE = "FunctionUnavailable"
    PROTOCOL_MISMATCH = "ProtocolMismatch"
    STACK_UNDERFLOW = "StackUnderflow"
    STACK_NON_EMPTY_AT_DEST = "StackNonEmptyAtDest"
    WRONG_DECAP_ORDER = "WrongDecapOrder"


@dataclass(frozen=True)
class Failure:
    """``step`` is 0 for the emission hop, i for the i-th function, n+1 for arrival."""

    step: int
    reason: Reason


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    failure: Failure | None
    final_stack: tuple[int, ...]  # bottom -> top
    final_protocol: int


def apply_function(
    f: AdaptationFunction, current: int, stack: tuple[int, ...]
) -> tuple[int, tuple[int, ...]] | Reason:
    """One stack-machine move. Returns the new (protocol, stack) or the failure reason."""
    if f.kind is Kind.CONVERSION:
        if current != f.a:
            return Reason.PROTOCOL_MISMATCH
        return f.b, stack
    if f.kind is Kind.ENCAPSULATION:
        if current != f.a:
            return Reason.PROTOCOL_MISMATCH
        return f.b, stack + (f.a,)
    if current != f.b:
        return Reason.PROTOCOL_MISMATCH
    if not stack:
        return Reason.STACK_UNDERFLOW
    if stack[-1] != f.a:
        return Reason.WRONG_DECAP_ORDER
    return f.a, stack[:-1]


def check_feasibility(net: MultiLayerNetwork, path: MLPath) -> FeasibilityReport:
    known = set(net.nodes)
    for u in path.node_sequence:
        if u not in known:
            raise ValueError(f"path references unknown node {u}")

    current, stack = path.emitted, ()

    def fail(step: int, reason: Reason) -> FeasibilityReport:
        return FeasibilityReport(False, Failure(step, reason), stack, current)

    if path.emitted not in net.out_set(path.source):
        return fail(0, Reason.PROTOCOL_MISMATCH)
    prev = path.source
    for i, step in enumerate(path.steps, start=1):
        if (prev, step.node) not in net.edges:
            return fail(i, Reason.NOT_AN_EDGE)
        # the source only emits; it never re-applies a function mid-path
        if step.node == path.source or step.function not in net.functions[step.node]:
            return fail(i, Reason.FUNCTION_UNAVAILABLE)
        moved = apply_function(step.function, current, stack)
        if isinstance(moved, Reason):
            return fail(i, moved)
        current, stack = moved
        prev = step.node
    end = len(path.steps) + 1
    if (prev, path.dest) not in net.edges:
        return fail(end, Reason.NOT_AN_EDGE)
    if stack:
        return fail(end, Reason.STACK_NON_EMPTY_AT_DEST)
    if current not in net.in_set(path.dest):
        return fail(end, Reason.PROTOCOL_MISMATCH)
    return FeasibilityReport(True, None, stack, current)


def trace_of(path: MLPath) -> Trace:
    symbols = []
    current = path.emitted
    for step in path.steps:
        f = step.function
        if f.kind is Kind.CONVERSION:
            symbols.append(Symbol(f.a, Tag.PLAIN))
        elif f.kind is Kind.ENCAPSULATION:
            symbols.append(Symbol(f.a, Tag.PUSH))
        else:
            symbols.append(Symbol(current, Tag.POP))
        current = f.output_protocol
    symbols.append(Symbol(current, Tag.PLAIN))
    return tuple(symbols)


def path_weight(net: MultiLayerNetwork, path: MLPath) -> float:
    seq = path.node_sequence
    return sum(net.weight(s.node, s.function, nxt) for s, nxt in zip(path.steps, seq[2:]))


def edge_counts(path: MLPath) -> Counter:
    return Counter(path.hops)


def path_bandwidth(net: MultiLayerNetwork, path: MLPath) -> float:
    nb = edge_counts(path)
    return min(net.bandwidth[e] / k for e, k in nb.items())


def path_qos(net: MultiLayerNetwork, path: MLPath) -> tuple[float, ...]:
    nb = edge_counts(path)
    totals = [0.0] * net.qos_dim
    for e, k in nb.items():
        for i, q in enumerate(net.qos[e]):
            totals[i] += q * k
    return tuple(totals)


def hop_weights(net: MultiLayerNetwork) -> MultiLayerNetwork:
    """Every usable (U, f, V) triple costs 1."""
    return net.replace(weights={})


def encapsulation_weights(net: MultiLayerNetwork) -> MultiLayerNetwork:
    """Encapsulation triples cost 1, all others 0: counts encapsulations on a path."""
    table = {}
    for u, v in net.edges:
        for f in net.functions[u]:
            table[(u, f, v)] = 1.0 if f.kind is Kind.ENCAPSULATION else 0.0
    return net.replace(weights=table)
