"""JIT-compiled fitness kernel for the GA's inner loop.

Mirrors allocation.evaluate() plus the fitness penalty loop operation
for operation (same grouping, same accumulation order, same libm log2),
so the fast path and the reference path agree to the last bit on valid
chromosomes. Falls back to the plain-Python path when numba is absent.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        return wrap


@njit(cache=True)
def score_genes(
    genes,
    n_cues,
    n_pairs,
    n_rbs,
    g_cue_bs,
    g_due_bs,
    g_rel_bs,
    g_cue_rx,
    g_cue_rel,
    g_due_rx,
    g_due_rel,
    g_rel_rx,
    g_rel_rel,
    p,
    n0,
    bw,
    rth,
    a_cue,
    a_due,
    excess,
):
    """Penalised fitness of one chromosome (assumed structurally valid)."""
    c_cnt = n_cues
    d_cnt = n_pairs

    rb_cue = np.full(n_rbs, -1, np.int64)
    for c in range(c_cnt):
        rb_cue[genes[c]] = c

    # pairs grouped by RB, ascending pair index within each group
    counts = np.zeros(n_rbs + 1, np.int64)
    for d in range(d_cnt):
        counts[genes[c_cnt + d] + 1] += 1
    for n in range(n_rbs):
        counts[n + 1] += counts[n]
    group = np.empty(d_cnt, np.int64)
    fill = counts[:n_rbs].copy()
    for d in range(d_cnt):
        rb = genes[c_cnt + d]
        group[fill[rb]] = d
        fill[rb] += 1

    cue_total = 0.0
    cue_pen = 0.0
    for c in range(c_cnt):
        rb = genes[c]
        i_bs = 0.0
        for k in range(counts[rb], counts[rb + 1]):
            d = group[k]
            i_bs += p * g_due_bs[d]
            mode = genes[c_cnt + d_cnt + d]
            if mode > 0:
                i_bs += p * g_rel_bs[mode - 1]
        rate = bw * math.log2(1.0 + p * g_cue_bs[c] / (i_bs + n0))
        cue_total += rate
        if excess:
            if rate > rth:
                cue_pen += rth - rate
        elif rate < rth:
            cue_pen += rate - rth

    due_total = 0.0
    due_pen = 0.0
    for d in range(d_cnt):
        rb = genes[c_cnt + d]
        cue = rb_cue[rb]
        lo = counts[rb]
        hi = counts[rb + 1]
        shared = hi - lo > 1
        i_rx = 0.0
        if cue >= 0:
            i_rx += p * g_cue_rx[cue, d]
        if shared:
            for k in range(lo, hi):
                i = group[k]
                if i == d:
                    continue
                i_rx += p * g_due_rx[i, d]
                mode_i = genes[c_cnt + d_cnt + i]
                if mode_i > 0:
                    i_rx += p * g_rel_rx[mode_i - 1, d]
        mode = genes[c_cnt + d_cnt + d]
        if mode == 0:
            rate = bw * math.log2(1.0 + p * g_due_rx[d, d] / (i_rx + n0))
        else:
            rel = mode - 1
            i_rel = 0.0
            if cue >= 0:
                i_rel += p * g_cue_rel[cue, rel]
            if shared:
                for k in range(lo, hi):
                    i = group[k]
                    if i == d:
                        continue
                    i_rel += p * g_due_rel[i, rel]
                    mode_i = genes[c_cnt + d_cnt + i]
                    if mode_i > 0:
                        i_rel += p * g_rel_rel[mode_i - 1, rel]
            hop1 = bw * math.log2(1.0 + p * g_due_rel[d, rel] / (i_rel + n0))
            hop2 = bw * math.log2(1.0 + p * g_rel_rx[rel, d] / (i_rx + n0))
            rate = hop1 if hop1 < hop2 else hop2
        due_total += rate
        if excess:
            if rate > rth:
                due_pen += rth - rate
        elif rate < rth:
            due_pen += rate - rth

    return cue_total + due_total + a_cue * cue_pen + a_due * due_pen
