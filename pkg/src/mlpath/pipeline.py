"""Network -> WPDA -> grammar -> minimum derivation -> trace -> path."""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass

from .matcher import match_trace
from .model import (
    MLPath,
    MultiLayerNetwork,
    Trace,
    encapsulation_weights,
    hop_weights,
    path_weight,
)
from .wcfg import extract_min_word, knuth_min_lazy, wpda_to_wcfg
from .wpda import build_wpda


class Metric(str, enum.Enum):
    HOPS = "hops"
    ENCAPSULATIONS = "encapsulations"
    CUSTOM = "custom"


class PipelineInconsistency(AssertionError):
    """Two stages disagree; always a bug, never a property of the input."""


def apply_metric(net: MultiLayerNetwork, metric: Metric | str) -> MultiLayerNetwork:
    metric = Metric(metric)
    if metric is Metric.HOPS:
        return hop_weights(net)
    if metric is Metric.ENCAPSULATIONS:
        return encapsulation_weights(net)
    return net


@dataclass(frozen=True)
class Result:
    path: MLPath
    weight: float
    trace: Trace


def shortest_feasible_path(
    net: MultiLayerNetwork, source: int, dest: int, metric: Metric | str = Metric.CUSTOM
) -> Result | None:
    """Minimum-weight feasible path under an additive metric, or None if none exists."""
    net = apply_metric(net, metric)
    wpda = build_wpda(net, source, dest)
    dv = knuth_min_lazy(wpda)
    if math.isinf(dv.best):
        return None
    word = extract_min_word(dv)
    path = match_trace(net, word, source, dest)
    weight = path_weight(net, path)
    if not math.isclose(weight, dv.best, rel_tol=1e-9, abs_tol=1e-9):
        raise PipelineInconsistency(f"path weight {weight} != derivation weight {dv.best}")
    return Result(path, weight, word)


@dataclass
class PipelineStats:
    states: int
    transitions: int
    nonterminals: int
    rules: int
    settled: int
    relaxations: int
    timings: dict[str, float]
    weight: float
    explicit_grammar: bool


def pipeline_stats(
    net: MultiLayerNetwork,
    source: int,
    dest: int,
    metric: Metric | str = Metric.CUSTOM,
    explicit_grammar: bool = False,
) -> PipelineStats:
    """Stage sizes and wall-clock times.

    With ``explicit_grammar`` the eager grammar is built and its sizes are
    reported (small networks only); otherwise the sizes are those of the rules
    actually relaxed by the lazy fixpoint.
    """
    from .wcfg import knuth_min

    timings = {}
    t0 = time.perf_counter()
    net = apply_metric(net, metric)
    wpda = build_wpda(net, source, dest)
    t1 = time.perf_counter()
    timings["wpda"] = t1 - t0
    if explicit_grammar:
        grammar = wpda_to_wcfg(wpda, prune=False)
        t2 = time.perf_counter()
        timings["wcfg"] = t2 - t1
        dv = knuth_min(grammar)
        n_nt, n_rules = len(grammar.nonterminals), len(grammar.rules)
    else:
        t2 = t1
        timings["wcfg"] = 0.0
        dv = knuth_min_lazy(wpda)
        n_nt, n_rules = dv.settled_count, dv.relaxations
    t3 = time.perf_counter()
    timings["knuth"] = t3 - t2
    if not math.isinf(dv.best):
        match_trace(net, extract_min_word(dv), source, dest)
    timings["match"] = time.perf_counter() - t3
    return PipelineStats(
        states=len(wpda.states),
        transitions=len(wpda.transitions),
        nonterminals=n_nt,
        rules=n_rules,
        settled=dv.settled_count,
        relaxations=dv.relaxations,
        timings=timings,
        weight=dv.best,
        explicit_grammar=explicit_grammar,
    )
