"""Compiled inner loop of a bandit trajectory.

Mirrors ``policies.statistic``, ``action_probabilities``, ``select`` and
``update`` step for step, with identical floating point operation order.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

PLAIN, REWEIGHTED, OPTIMISTIC, DEBIASED = 0, 1, 2, 3


@njit(cache=True)
def advance(
    t_start, n, variant, rho, eps_c, eps_p, eps_floor,
    count, sums, u, draws, used,
    checkpoints, ck_pos, out_chosen, out_counts, out_sums, out_cum, cum,
):
    k = count.shape[0]
    stats = np.empty(k)
    probs = np.empty(k)
    n_ck = checkpoints.shape[0]
    for j in range(n):
        t = t_start + j + 1
        eps = max(eps_floor, min(1.0, eps_c * float(t) ** (-eps_p)))

        tm1 = t - 1
        for a in range(k):
            c = count[a]
            if c == 0:
                stats[a] = math.inf if variant == OPTIMISTIC else 0.0
            elif variant == PLAIN:
                stats[a] = sums[0, a] / c
            elif variant == REWEIGHTED:
                stats[a] = sums[1, a] / c
            elif variant == DEBIASED:
                stats[a] = sums[2, a] / c
            else:
                stats[a] = sums[0, a] / c + rho * math.sqrt(math.log(tm1) / c)

        best = stats[0]
        for a in range(1, k):
            if stats[a] > best:
                best = stats[a]
        n_win = 0
        for a in range(k):
            if stats[a] == best:
                n_win += 1
        explore = eps / k
        exploit = (1.0 - eps) / n_win
        for a in range(k):
            if stats[a] == best:
                probs[a] = explore + exploit
            else:
                probs[a] = explore

        acc = 0.0
        chosen = -1
        last = -1
        for a in range(k):
            if probs[a] > 0:
                last = a
            acc += probs[a]
            if u[j] < acc:
                chosen = a
                break
        if chosen < 0:
            chosen = last

        pi = probs[chosen]
        r = draws[chosen, used[chosen]]
        used[chosen] += 1
        count[chosen] += 1
        sums[0, chosen] = sums[0, chosen] + r
        sums[1, chosen] = sums[1, chosen] + r / math.sqrt(pi)
        sums[2, chosen] = sums[2, chosen] + r / pi
        cum[0] += r

        p = ck_pos[0]
        if p < n_ck and checkpoints[p] == t:
            out_chosen[p] = chosen
            out_cum[p] = cum[0]
            for a in range(k):
                out_counts[p, a] = count[a]
                for s in range(3):
                    out_sums[p, s, a] = sums[s, a]
            ck_pos[0] = p + 1
