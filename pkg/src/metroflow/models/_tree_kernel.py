"""Compiled kernels for exact CART regression tree growth and prediction.

The growth kernel keeps one presorted sample-index array per feature and
maintains them through stable partitions, so each tree level costs
O(d * n) regardless of split positions. Split search maximizes the
sum-of-squares proxy

    s_L**2 / n_L + s_R**2 / n_R

which orders candidate splits identically to weighted-variance
reduction; the absolute gain equals (proxy - s**2/m) / m.

Nodes are created in depth-first preorder (parent, left subtree, right
subtree). When ``mtry < d`` the kernel draws one candidate-feature
subset per split-searching node from the counter-based splitmix64
stream whose state is passed in: draw k is

    mix64(state + (k + 1) * GAMMA)

matching ``metroflow.rng.SplitMix64``. The subset is a partial
Fisher-Yates prefix (swap i with i + u % (d - i); one draw per subset
position), then sorted ascending so the lowest-feature-index tie-break
is preserved. Pure nodes and nodes failing the size or depth pre-checks
draw nothing; ``mtry >= d`` draws nothing at all.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def grow(XT, y, sorted_idx, max_depth, min_samples_split, min_samples_leaf,
         min_impurity_decrease, mtry, stream_state):
    d, n = XT.shape
    max_nodes = 2 * n - 1
    feature = np.full(max_nodes, -1, dtype=np.int64)
    threshold = np.full(max_nodes, np.nan)
    left = np.full(max_nodes, -1, dtype=np.int64)
    right = np.full(max_nodes, -1, dtype=np.int64)
    value = np.zeros(max_nodes)

    idx = sorted_idx.copy()
    era = np.zeros(n, dtype=np.int64)
    tmp_l = np.empty(n, dtype=np.int64)
    tmp_r = np.empty(n, dtype=np.int64)
    perm = np.empty(d, dtype=np.int64)
    subset = np.empty(d, dtype=np.int64)

    # stack rows: lo, hi, depth, parent, is_left
    stack = np.empty((max_nodes + 1, 5), dtype=np.int64)
    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = 0
    stack[0, 3] = -1
    stack[0, 4] = 0
    top = 1

    n_nodes = 0
    epoch = np.int64(0)
    counter = np.uint64(0)

    while top > 0:
        top -= 1
        lo = stack[top, 0]
        hi = stack[top, 1]
        depth = stack[top, 2]
        parent = stack[top, 3]
        is_left = stack[top, 4]
        node = n_nodes
        n_nodes += 1
        if parent >= 0:
            if is_left == 1:
                left[parent] = node
            else:
                right[parent] = node

        m = hi - lo
        s_total = 0.0
        y_min = y[idx[0, lo]]
        y_max = y_min
        for i in range(lo, hi):
            yv = y[idx[0, i]]
            s_total += yv
            if yv < y_min:
                y_min = yv
            if yv > y_max:
                y_max = yv
        value[node] = s_total / m

        if (depth >= max_depth or m < min_samples_split
                or m < 2 * min_samples_leaf or y_min == y_max):
            continue

        if mtry < d:
            for j in range(d):
                perm[j] = j
            for i in range(mtry):
                counter += np.uint64(1)
                u = _mix64(stream_state + counter * _GAMMA)
                j = i + np.int64(u % np.uint64(d - i))
                t = perm[i]
                perm[i] = perm[j]
                perm[j] = t
            for i in range(mtry):
                subset[i] = perm[i]
            subset[:mtry].sort()
            n_try = mtry
        else:
            for j in range(d):
                subset[j] = j
            n_try = d

        best_proxy = s_total * s_total / m + m * min_impurity_decrease
        best_f = np.int64(-1)
        best_thr = 0.0
        for fi in range(n_try):
            f = subset[fi]
            s_left = 0.0
            for i in range(lo, hi - 1):
                sample = idx[f, i]
                s_left += y[sample]
                nl = i - lo + 1
                if nl < min_samples_leaf:
                    continue
                nr = m - nl
                if nr < min_samples_leaf:
                    break
                xv = XT[f, sample]
                xnext = XT[f, idx[f, i + 1]]
                if xnext <= xv:
                    continue
                s_right = s_total - s_left
                proxy = s_left * s_left / nl + s_right * s_right / nr
                if proxy > best_proxy:
                    thr = 0.5 * (xv + xnext)
                    if thr == xnext:
                        thr = xv
                    best_proxy = proxy
                    best_f = f
                    best_thr = thr
        if best_f < 0:
            continue

        feature[node] = best_f
        threshold[node] = best_thr

        epoch += 1
        n_left = 0
        for i in range(lo, hi):
            sample = idx[best_f, i]
            if XT[best_f, sample] <= best_thr:
                era[sample] = epoch
                n_left += 1
        for f in range(d):
            a = 0
            b = 0
            for i in range(lo, hi):
                sample = idx[f, i]
                if era[sample] == epoch:
                    tmp_l[a] = sample
                    a += 1
                else:
                    tmp_r[b] = sample
                    b += 1
            for i in range(a):
                idx[f, lo + i] = tmp_l[i]
            for i in range(b):
                idx[f, lo + a + i] = tmp_r[i]

        mid = lo + n_left
        stack[top, 0] = mid
        stack[top, 1] = hi
        stack[top, 2] = depth + 1
        stack[top, 3] = node
        stack[top, 4] = 0
        top += 1
        stack[top, 0] = lo
        stack[top, 1] = mid
        stack[top, 2] = depth + 1
        stack[top, 3] = node
        stack[top, 4] = 1
        top += 1

    return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes],
            right[:n_nodes], value[:n_nodes])


@njit(cache=True)
def predict(X, feature, threshold, left, right, value):
    n = X.shape[0]
    out = np.empty(n)
    for i in range(n):
        node = 0
        f = feature[node]
        while f >= 0:
            if X[i, f] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
            f = feature[node]
        out[i] = value[node]
    return out
