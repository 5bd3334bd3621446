"""Weighted push-down automaton built from a network, plus a run-search oracle."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

from .model import Kind, MultiLayerNetwork, Symbol, Tag

Q0 = 0
QF = 1
Z0 = -1  # bottom-of-stack symbol; protocols use 0..|A|-1


class Transition(NamedTuple):
    """``(src, <symbol, pop, push>, dst)``; ``symbol`` is None for an epsilon move.

    ``push`` is written top-first: ``(x, alpha)`` leaves x above alpha.
    """

    src: int
    symbol: Symbol | None
    pop: int
    push: tuple[int, ...]
    dst: int


@dataclass(frozen=True)
class Wpda:
    states: tuple[object, ...]  # index -> "Q0" | "QF" | (node, protocol)
    n_protocols: int
    transitions: dict[Transition, float]

    initial: int = Q0
    final: int = QF

    @cached_property
    def state_index(self) -> dict[object, int]:
        return {s: i for i, s in enumerate(self.states)}

    @property
    def stack_alphabet(self) -> tuple[int, ...]:
        return (*range(self.n_protocols), Z0)

    @cached_property
    def by_source(self) -> dict[int, list[tuple[Transition, float]]]:
        out: dict[int, list[tuple[Transition, float]]] = {}
        for t, w in self.transitions.items():
            out.setdefault(t.src, []).append((t, w))
        return out

    def state_name(self, i: int) -> str:
        s = self.states[i]
        if isinstance(s, str):
            return s
        return f"{s[0]}_{s[1]}"

    def dump(self) -> str:
        """Stable text listing of states and transitions."""

        def stack_sym(a: int) -> str:
            return "Z0" if a == Z0 else str(a)

        lines = [f"states {len(self.states)}"]
        lines += [f"  {self.state_name(i)}" for i in range(len(self.states))]
        lines.append(f"transitions {len(self.transitions)}")
        rows = []
        for t, w in self.transitions.items():
            sym = "eps" if t.symbol is None else t.symbol.label()
            push = "".join(stack_sym(a) + " " for a in t.push).strip() or "-"
            rows.append(
                f"  {self.state_name(t.src)} --{sym},{stack_sym(t.pop)}/{push}--> "
                f"{self.state_name(t.dst)} w={w:g}"
            )
        lines += sorted(rows)
        return "\n".join(lines) + "\n"


def build_wpda(net: MultiLayerNetwork, source: int, dest: int) -> Wpda:
    if source == dest:
        raise ValueError("source and destination must differ")
    if source not in net.functions or dest not in net.functions:
        raise ValueError("source or destination is not a node of the network")

    states: list[object] = ["Q0", "QF"]
    index: dict[tuple[int, int], int] = {}
    for u in net.nodes:
        if u == source:
            continue
        for x in sorted(net.in_set(u)):
            index[(u, x)] = len(states)
            states.append((u, x))

    delta: dict[Transition, float] = {}

    def add(t: Transition, w: float) -> None:
        old = delta.get(t)
        if old is None or w < old:
            delta[t] = w

    gamma = (*range(len(net.protocols)), Z0)

    for v in net.successors[source]:
        for x in net.out_set(source):
            if (v, x) in index:
                add(Transition(Q0, None, Z0, (Z0,), index[(v, x)]), 0.0)
    for x in net.in_set(dest):
        add(Transition(index[(dest, x)], Symbol(x, Tag.PLAIN), Z0, (), QF), 0.0)

    for u, v in sorted(net.edges):
        if u == source or v == source:
            continue
        for f in net.sorted_functions[u]:
            w = net.weight(u, f, v)
            if f.kind is Kind.CONVERSION:
                x, y = f.a, f.b
                if (v, y) in index:
                    for alpha in gamma:
                        add(Transition(index[(u, x)], Symbol(x, Tag.PLAIN), alpha, (alpha,), index[(v, y)]), w)
            elif f.kind is Kind.ENCAPSULATION:
                x, y = f.a, f.b
                if (v, y) in index:
                    for alpha in gamma:
                        add(Transition(index[(u, x)], Symbol(x, Tag.PUSH), alpha, (x, alpha), index[(v, y)]), w)
            else:
                x, y = f.a, f.b
                if (v, x) in index:
                    add(Transition(index[(u, y)], Symbol(y, Tag.POP), x, (), index[(v, x)]), w)

    return Wpda(states=tuple(states), n_protocols=len(net.protocols), transitions=delta)


def accepts_min(
    wpda: Wpda, trace: tuple[Symbol, ...], run_length_cap: int | None = None
) -> tuple[float, list[Transition]] | None:
    """Cheapest accepting run for ``trace``, found by exhaustive search.

    Acceptance is by reaching the final state having consumed the whole input
    and the whole stack. Returns ``(weight, run)`` or None.
    """
    trace = tuple(trace)
    cap = run_length_cap if run_length_cap is not None else len(trace) + 2
    memo: dict[tuple[int, int, tuple[int, ...]], tuple[float, tuple] | None] = {}

    def best(state: int, pos: int, stack: tuple[int, ...], depth: int):
        if state == wpda.final:
            return (0.0, ()) if pos == len(trace) and not stack else None
        if depth >= cap or not stack:
            return None
        key = (state, pos, stack)
        if key in memo:
            return memo[key]
        result = None
        for t, w in wpda.by_source.get(state, ()):
            if t.pop != stack[0]:
                continue
            if t.symbol is None:
                npos = pos
            elif pos < len(trace) and trace[pos] == t.symbol:
                npos = pos + 1
            else:
                continue
            sub = best(t.dst, npos, t.push + stack[1:], depth + 1)
            if sub is not None and (result is None or w + sub[0] < result[0]):
                result = (w + sub[0], (t,) + sub[1])
        memo[key] = result
        return result

    found = best(wpda.initial, 0, (Z0,), 0)
    if found is None:
        return None
    return found[0], list(found[1])
