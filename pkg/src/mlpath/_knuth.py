"""Compiled inner loop of the lazy minimum-derivation fixpoint.

Nonterminal ``[s a t]`` is coded ``(s * G + a + 1) * S + t`` with S states and
G = |A| + 1 stack symbols (a = -1 is the bottom symbol); the axiom takes the
last id. Rule families are passed as CSR tables keyed by the state the
transition enters. Symbols are coded ``3 * protocol + tag``, -1 for epsilon.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _less(w1, s1, i1, w2, s2, i2):
    if w1 != w2:
        return w1 < w2
    if s1 != s2:
        return s1 < s2
    return i1 < i2


@njit(cache=True)
def _sift_up(heap, pos, bw, bs, k):
    nt = heap[k]
    while k > 0:
        parent = (k - 1) >> 1
        other = heap[parent]
        if _less(bw[nt], bs[nt], nt, bw[other], bs[other], other):
            heap[k] = other
            pos[other] = k
            k = parent
        else:
            break
    heap[k] = nt
    pos[nt] = k


@njit(cache=True)
def _sift_down(heap, pos, bw, bs, k, n):
    nt = heap[k]
    while True:
        child = 2 * k + 1
        if child >= n:
            break
        right = child + 1
        if right < n and _less(bw[heap[right]], bs[heap[right]], heap[right],
                               bw[heap[child]], bs[heap[child]], heap[child]):
            child = right
        c = heap[child]
        if _less(bw[c], bs[c], c, bw[nt], bs[nt], nt):
            heap[k] = c
            pos[c] = k
            k = child
        else:
            break
    heap[k] = nt
    pos[nt] = k


@njit(cache=True)
def knuth_kernel(
    n_states, n_gamma,
    pop_nt, pop_sym, pop_w,
    conv_ptr, conv_src, conv_sym, conv_w,
    push_ptr, push_src, push_alpha, push_sym, push_w,
    pa_ptr, pa_src, pa_sym, pa_w,
    stop_at_axiom,
):
    S = n_states
    G = n_gamma
    n_nt = S * G * S + 1
    axiom = n_nt - 1
    inf = np.inf

    bw = np.full(n_nt, inf)
    bs = np.zeros(n_nt, np.int64)
    done = np.zeros(n_nt, np.bool_)
    wit_sym = np.full(n_nt, -1, np.int64)
    wit_r1 = np.full(n_nt, -1, np.int64)
    wit_r2 = np.full(n_nt, -1, np.int64)
    wit_tw = np.zeros(n_nt, np.float64)

    heap = np.empty(n_nt, np.int64)
    pos = np.full(n_nt, -1, np.int64)
    size = 0

    # linked lists of settled nonterminals
    fe_head = np.full(S, -1, np.int64)          # [p x r] by r
    sf_head = np.full(S * G, -1, np.int64)      # [r a q] by (r, a)
    fe_next = np.empty(n_nt, np.int64)
    sf_next = np.empty(n_nt, np.int64)
    fe_item = np.empty(n_nt, np.int64)
    sf_item = np.empty(n_nt, np.int64)
    n_fe = 0
    n_sf = 0

    settled = 0
    relaxations = 0
    stopped = False

    # offers are inlined as: improve (bw, bs, witness) then push or sift up
    for i in range(pop_nt.shape[0]):
        nt = pop_nt[i]
        w = pop_w[i]
        if w < bw[nt] or (w == bw[nt] and 1 < bs[nt]):
            bw[nt] = w
            bs[nt] = 1
            wit_sym[nt] = pop_sym[i]
            wit_r1[nt] = -1
            wit_r2[nt] = -1
            wit_tw[nt] = w
            if pos[nt] < 0:
                heap[size] = nt
                pos[nt] = size
                size += 1
            _sift_up(heap, pos, bw, bs, pos[nt])

    while size > 0:
        nt = heap[0]
        size -= 1
        pos[nt] = -1
        if size > 0:
            heap[0] = heap[size]
            pos[heap[0]] = 0
            _sift_down(heap, pos, bw, bs, 0, size)
        done[nt] = True
        settled += 1
        w = bw[nt]
        sz = bs[nt]
        if nt == axiom:
            if stop_at_axiom:
                stopped = True
                break
            continue
        rest = nt // S
        t = nt - rest * S
        s = rest // G
        bidx = rest - s * G  # beta + 1

        # candidates are collected as (lhs, weight, size, sym, r1, r2, tw)
        if s == 0 and bidx == 0:
            lhs = axiom
            cw = w
            cs = sz + 1
            if not done[lhs] and (cw < bw[lhs] or (cw == bw[lhs] and cs < bs[lhs])):
                bw[lhs] = cw
                bs[lhs] = cs
                wit_sym[lhs] = -1
                wit_r1[lhs] = nt
                wit_r2[lhs] = -1
                wit_tw[lhs] = 0.0
                if pos[lhs] < 0:
                    heap[size] = lhs
                    pos[lhs] = size
                    size += 1
                _sift_up(heap, pos, bw, bs, pos[lhs])

        key = s * G + bidx
        for j in range(conv_ptr[key], conv_ptr[key + 1]):
            relaxations += 1
            lhs = (conv_src[j] * G + bidx) * S + t
            cw = conv_w[j] + w
            cs = sz + 1
            if not done[lhs] and (cw < bw[lhs] or (cw == bw[lhs] and cs < bs[lhs])):
                bw[lhs] = cw
                bs[lhs] = cs
                wit_sym[lhs] = conv_sym[j]
                wit_r1[lhs] = nt
                wit_r2[lhs] = -1
                wit_tw[lhs] = conv_w[j]
                if pos[lhs] < 0:
                    heap[size] = lhs
                    pos[lhs] = size
                    size += 1
                _sift_up(heap, pos, bw, bs, pos[lhs])

        # nt = [p' x r] as first factor of [p a q] -> x^ [p' x r][r a q]
        for j in range(push_ptr[key], push_ptr[key + 1]):
            aidx = push_alpha[j]
            head = (push_src[j] * G + aidx) * S
            k = sf_head[t * G + aidx]
            while k >= 0:
                second = sf_item[k]
                k = sf_next[k]
                relaxations += 1
                lhs = head + (second % S)
                cw = push_w[j] + w + bw[second]
                cs = sz + bs[second] + 1
                if not done[lhs] and (cw < bw[lhs] or (cw == bw[lhs] and cs < bs[lhs])):
                    bw[lhs] = cw
                    bs[lhs] = cs
                    wit_sym[lhs] = push_sym[j]
                    wit_r1[lhs] = nt
                    wit_r2[lhs] = second
                    wit_tw[lhs] = push_w[j]
                    if pos[lhs] < 0:
                        heap[size] = lhs
                        pos[lhs] = size
                        size += 1
                    _sift_up(heap, pos, bw, bs, pos[lhs])

        fe_item[n_fe] = nt
        fe_next[n_fe] = fe_head[t]
        fe_head[t] = n_fe
        n_fe += 1
        sf_item[n_sf] = nt
        sf_next[n_sf] = sf_head[key]
        sf_head[key] = n_sf
        n_sf += 1

        # nt = [r a q] as second factor; first factors [p' x r] end at r = s
        k = fe_head[s]
        while k >= 0:
            first = fe_item[k]
            k = fe_next[k]
            frest = first // S
            fkey = frest * G + bidx  # ((p' * G + x + 1) * G + a + 1)
            lo = pa_ptr[fkey]
            hi = pa_ptr[fkey + 1]
            if lo == hi:
                continue
            base = bw[first] + w
            cs = bs[first] + sz + 1
            for j in range(lo, hi):
                relaxations += 1
                lhs = (pa_src[j] * G + bidx) * S + t
                cw = pa_w[j] + base
                if not done[lhs] and (cw < bw[lhs] or (cw == bw[lhs] and cs < bs[lhs])):
                    bw[lhs] = cw
                    bs[lhs] = cs
                    wit_sym[lhs] = pa_sym[j]
                    wit_r1[lhs] = first
                    wit_r2[lhs] = nt
                    wit_tw[lhs] = pa_w[j]
                    if pos[lhs] < 0:
                        heap[size] = lhs
                        pos[lhs] = size
                        size += 1
                    _sift_up(heap, pos, bw, bs, pos[lhs])

    return done, bw, bs, wit_sym, wit_r1, wit_r2, wit_tw, settled, relaxations, stopped


def csr(keys: np.ndarray, n_keys: int, *columns: np.ndarray):
    """Sort rows by key and return (ptr, *columns sorted)."""
    order = np.argsort(keys, kind="stable")
    ptr = np.zeros(n_keys + 1, np.int64)
    np.add.at(ptr, keys + 1, 1)
    np.cumsum(ptr, out=ptr)
    return (ptr, *(c[order] for c in columns))
