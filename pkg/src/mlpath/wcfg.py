"""Weighted context-free grammar of a WPDA and minimum-weight derivations.

Nonterminals are triples ``[p alpha q]``: "starting in state p with alpha on
top, reach state q having consumed alpha". The axiom derives every accepted
trace and the weight of a derivation equals the weight of the matching run.

Two ways to evaluate the minimum derivation weight are provided. ``knuth_min``
runs over an explicit rule list. ``knuth_min_lazy`` runs the same fixpoint but
instantiates a rule only once all of its right-hand nonterminals are settled,
and can stop as soon as the axiom is settled; it is what the pipeline uses on
networks where the explicit grammar would be far too large.
"""

from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import count
from typing import NamedTuple, Union

import numpy as np

from ._knuth import csr, knuth_kernel
from .model import Symbol, Tag, Trace
from .wpda import Q0, Z0, Wpda


class NT(NamedTuple):
    src: int
    top: int
    dst: int


AXIOM = NT(-1, -1, -1)  # stands for [Q0]

Item = Union[NT, Symbol]


class Rule(NamedTuple):
    lhs: NT
    rhs: tuple[Item, ...]  # epsilon terminals are omitted
    weight: float


@dataclass
class Wcfg:
    nonterminals: set[NT]
    rules: list[Rule]
    axiom: NT = AXIOM

    @property
    def terminals(self) -> set[Symbol]:
        return {x for r in self.rules for x in r.rhs if isinstance(x, Symbol)}


@dataclass
class DerivationValue:
    """Settled values and one witness rule per settled nonterminal.

    ``complete`` is False when the fixpoint stopped early at the axiom; values of
    unsettled nonterminals are then unknown rather than infinite.
    """

    values: dict[NT, float] = field(default_factory=dict)
    witness: dict[NT, tuple[Rule, int]] = field(default_factory=dict)
    complete: bool = True
    axiom: NT = AXIOM
    settled_count: int = 0
    relaxations: int = 0

    def value(self, nt: NT = AXIOM) -> float:
        return self.values.get(nt, math.inf)

    @property
    def best(self) -> float:
        return self.value(self.axiom)


class NoFeasiblePath(LookupError):
    pass


def wpda_to_wcfg(wpda: Wpda, prune: bool = True) -> Wcfg:
    """Transition-by-transition grammar construction.

    With ``prune=False`` every nonterminal and rule is created eagerly, fanned
    over all states as in the textbook construction. With ``prune=True``
    unproductive and unreachable nonterminals are dropped, which cannot change
    any derivable word or its weight.
    """
    states = range(len(wpda.states))
    rules: list[Rule] = []
    nts: set[NT] = {AXIOM}
    for q in states:
        nt = NT(Q0, Z0, q)
        nts.add(nt)
        rules.append(Rule(AXIOM, (nt,), 0.0))
    for t, w in wpda.transitions.items():
        term = () if t.symbol is None else (t.symbol,)
        if not t.push:
            nt = NT(t.src, t.pop, t.dst)
            nts.add(nt)
            rules.append(Rule(nt, term, w))
        elif t.push == (t.pop,):
            for qi in states:
                lhs, rhs = NT(t.src, t.pop, qi), NT(t.dst, t.pop, qi)
                nts.update((lhs, rhs))
                rules.append(Rule(lhs, term + (rhs,), w))
        else:
            x, alpha = t.push
            for qi in states:
                first = NT(t.dst, x, qi)
                nts.add(first)
                for qj in states:
                    lhs, second = NT(t.src, alpha, qj), NT(qi, alpha, qj)
                    nts.update((lhs, second))
                    rules.append(Rule(lhs, term + (first, second), w))
    grammar = Wcfg(nts, rules)
    return prune_grammar(grammar) if prune else grammar


def prune_grammar(grammar: Wcfg) -> Wcfg:
    """Keep only nonterminals that derive some word and are reachable from the axiom."""
    uses: dict[NT, list[int]] = defaultdict(list)
    missing = []
    ready = []
    for i, r in enumerate(grammar.rules):
        k = 0
        for x in r.rhs:
            if isinstance(x, NT):
                uses[x].append(i)
                k += 1
        missing.append(k)
        if k == 0:
            ready.append(i)
    productive: set[NT] = set()
    while ready:
        lhs = grammar.rules[ready.pop()].lhs
        if lhs in productive:
            continue
        productive.add(lhs)
        for j in uses[lhs]:
            missing[j] -= 1
            if missing[j] == 0:
                ready.append(j)

    by_lhs: dict[NT, list[Rule]] = defaultdict(list)
    for r in grammar.rules:
        if r.lhs in productive and all(x in productive for x in r.rhs if isinstance(x, NT)):
            by_lhs[r.lhs].append(r)
    reachable: set[NT] = set()
    todo = [grammar.axiom] if grammar.axiom in productive else []
    while todo:
        nt = todo.pop()
        if nt in reachable:
            continue
        reachable.add(nt)
        todo.extend(x for r in by_lhs[nt] for x in r.rhs if isinstance(x, NT))
    kept = [r for nt in reachable for r in by_lhs[nt]]
    return Wcfg(reachable | {grammar.axiom}, kept, grammar.axiom)


def knuth_min(grammar: Wcfg) -> DerivationValue:
    """Exact least fixpoint of the minimum-derivation recurrence.

    Nonterminals are settled in order of (weight, tree size); a rule is relaxed
    once every nonterminal on its right-hand side is settled. The size term
    makes witnesses well-founded even when zero-weight cycles exist.
    """
    uses: dict[NT, list[int]] = defaultdict(list)
    missing = []
    heap: list = []
    tick = count()
    best: dict[NT, tuple[float, int]] = {}

    def offer(nt: NT, w: float, size: int, rule: Rule) -> None:
        key = (w, size)
        if nt not in best or key < best[nt]:
            best[nt] = key
            heapq.heappush(heap, (w, size, next(tick), nt, rule))

    for i, r in enumerate(grammar.rules):
        k = sum(1 for x in r.rhs if isinstance(x, NT))
        for x in r.rhs:
            if isinstance(x, NT):
                uses[x].append(i)
        missing.append(k)
        if k == 0:
            offer(r.lhs, r.weight, 1, r)

    dv = DerivationValue(axiom=grammar.axiom)
    while heap:
        w, size, _, nt, rule = heapq.heappop(heap)
        if nt in dv.values:
            continue
        dv.values[nt] = w
        dv.witness[nt] = (rule, size)
        dv.settled_count += 1
        for j in uses[nt]:
            missing[j] -= 1
            if missing[j] == 0:
                r = grammar.rules[j]
                total, tsize = r.weight, 1
                for x in r.rhs:
                    if isinstance(x, NT):
                        total += dv.values[x]
                        tsize += dv.witness[x][1]
                dv.relaxations += 1
                offer(r.lhs, total, tsize, r)
    return dv


def _symbol_code(sym: Symbol | None) -> int:
    return -1 if sym is None else 3 * sym.protocol + int(sym.tag)


def _symbol_decode(c: int) -> Symbol | None:
    return None if c < 0 else Symbol(c // 3, Tag(c % 3))


def _run_kernel(wpda: Wpda, stop_at_axiom: bool):
    S = len(wpda.states)
    G = wpda.n_protocols + 1

    pops, convs, pushes = [], [], []
    for t, w in wpda.transitions.items():
        sym = _symbol_code(t.symbol)
        if not t.push:
            pops.append(((t.src * G + t.pop + 1) * S + t.dst, sym, w))
        elif t.push == (t.pop,):
            convs.append((t.dst * G + t.pop + 1, t.src, sym, w))
        else:
            x, alpha = t.push
            pushes.append((t.dst * G + x + 1, alpha + 1, t.src, sym, w))

    def cols(rows, n):
        if not rows:
            return [np.zeros(0, np.int64) for _ in range(n)]
        return [np.asarray(c) for c in zip(*rows)]

    pop_nt, pop_sym, pop_w = cols(pops, 3)
    ck, csrc, csym, cw = cols(convs, 4)
    pk, palpha, psrc, psym, pw = cols(pushes, 5)
    as_i = lambda a: np.asarray(a, np.int64)
    as_f = lambda a: np.asarray(a, np.float64)
    conv = csr(as_i(ck), S * G, as_i(csrc), as_i(csym), as_f(cw))
    push = csr(as_i(pk), S * G, as_i(psrc), as_i(palpha), as_i(psym), as_f(pw))
    pa = csr(as_i(pk) * G + as_i(palpha), S * G * G, as_i(psrc), as_i(psym), as_f(pw))

    return knuth_kernel(S, G, as_i(pop_nt), as_i(pop_sym), as_f(pop_w), *conv, *push, *pa, stop_at_axiom)


def knuth_min_lazy(wpda: Wpda, stop_at_axiom: bool = True, decode_all: bool = False) -> DerivationValue:
    """Same fixpoint as ``knuth_min`` on the full grammar of ``wpda``, without building it.

    Rules are indexed by the transition that produced them. When a
    nonterminal settles, only rules in which it occurs and whose other
    right-hand nonterminals are already settled are relaxed, so rules that can
    never fire are never materialized. The loop itself runs compiled over
    integer-coded nonterminals (see ``_knuth``).

    Unless ``decode_all`` is set, only the nonterminals of the axiom's witness
    tree are reported back, which is all that word extraction needs.
    """
    S = len(wpda.states)
    G = wpda.n_protocols + 1
    done, bw, bs, wsym, wr1, wr2, wtw, settled, relax, stopped = _run_kernel(wpda, stop_at_axiom)

    axiom = S * G * S

    def as_nt(c: int) -> NT:
        if c == axiom:
            return AXIOM
        rest, t = divmod(c, S)
        s, a = divmod(rest, G)
        return NT(s, a - 1, t)

    dv = DerivationValue(complete=not stopped, settled_count=int(settled), relaxations=int(relax))
    if decode_all:
        codes = np.flatnonzero(done).tolist()
    else:
        # only the witness tree under the axiom
        codes, todo = [], [axiom] if done[axiom] else []
        while todo:
            c = todo.pop()
            codes.append(c)
            todo.extend(int(r) for r in (wr1[c], wr2[c]) if r >= 0)
    for c in codes:
        lhs = as_nt(c)
        items = tuple(as_nt(int(r)) for r in (wr1[c], wr2[c]) if r >= 0)
        sym = _symbol_decode(int(wsym[c]))
        if sym is not None:
            items = (sym,) + items
        dv.values[lhs] = float(bw[c])
        dv.witness[lhs] = (Rule(lhs, items, float(wtw[c])), int(bs[c]))
    return dv


def completion_table(wpda: Wpda) -> dict[tuple[int, int], frozenset[int]]:
    """``(p, alpha) -> {q : [p alpha q] derives some word}``.

    From state p with alpha on top, the automaton can reach q having popped
    alpha exactly when q is in the set. Chaining these sets along a stack
    decides whether a configuration can still reach the final state.
    """
    S = len(wpda.states)
    G = wpda.n_protocols + 1
    done, bw = _run_kernel(wpda, False)[:2]
    table: dict[tuple[int, int], set[int]] = {}
    for c in np.flatnonzero(np.isfinite(bw[: S * G * S])).tolist():
        rest, t = divmod(c, S)
        p, a = divmod(rest, G)
        table.setdefault((p, a - 1), set()).add(t)
    return {k: frozenset(v) for k, v in table.items()}


def can_accept(wpda: Wpda, table, state: int, stack_top_first) -> bool:
    """Whether configuration (state, stack + Z0) can reach the final state."""
    reach = {state}
    for alpha in (*stack_top_first, Z0):
        nxt: set[int] = set()
        for p in reach:
            nxt |= table.get((p, alpha), frozenset())
        if not nxt:
            return False
        reach = nxt
    return wpda.final in reach


def extract_min_word(dv: DerivationValue) -> Trace:
    """Expand witness rules depth-first from the axiom into a terminal word."""
    if math.isinf(dv.best):
        raise NoFeasiblePath("no feasible path")
    word: list[Symbol] = []
    todo: list[Item] = [dv.axiom]
    while todo:
        item = todo.pop()
        if isinstance(item, NT):
            rule, _ = dv.witness[item]
            todo.extend(reversed(rule.rhs))
        else:
            word.append(item)
    return tuple(word)


def derivable_words(grammar: Wcfg, max_len: int) -> set[Trace]:
    """All words of length <= max_len derivable from the axiom (small grammars only)."""
    words: dict[NT, set[Trace]] = defaultdict(set)
    changed = True
    while changed:
        changed = False
        for r in grammar.rules:
            partial: set[Trace] = {()}
            for x in r.rhs:
                options = {(x,)} if isinstance(x, Symbol) else words[x]
                partial = {a + b for a in partial for b in options if len(a) + len(b) <= max_len}
                if not partial:
                    break
            new = partial - words[r.lhs]
            if new:
                words[r.lhs] |= new
                changed = True
    return set(words[grammar.axiom])
