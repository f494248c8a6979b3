"""Independent brute-force oracles used by the tests.

None of these share code with the package; they are deliberately slow and
literal.
"""

import itertools

import numpy as np


def naive_moving_average(x, w):
    n = len(x)
    out = {}
    for i in range(2 * w, n - 2 * w):
        out[i] = sum(x[i - 2 * w:i + 2 * w + 1]) / (4 * w)
    return out


def lz76_naive(s):
    """Exhaustive-history LZ76: each phrase is the shortest extension that is not
    a substring of everything before its last symbol."""
    s = list(s)
    n = len(s)
    i = phrases = 0
    while i < n:
        l = 1
        while i + l <= n and _occurs(s[i:i + l], s[:i + l - 1]):
            l += 1
        phrases += 1
        i += l
    return phrases


def _occurs(needle, hay):
    m = len(needle)
    return any(hay[k:k + m] == needle for k in range(len(hay) - m + 1))


def word_lengths_by_cuts(times, theta):
    """Word lengths from the positions of gaps larger than theta."""
    t = np.asarray(times, dtype=float)
    if len(t) == 0:
        return []
    cuts = np.flatnonzero(np.diff(t) > theta) + 1
    return np.diff(np.concatenate(([0], cuts, [len(t)]))).tolist()


def word_lengths_exhaustive(times, theta):
    """Try every split of the list into contiguous blocks; keep the one whose
    inside gaps are all <= theta and whose boundary gaps are all > theta."""
    n = len(times)
    if n == 0:
        return []
    gaps = [b - a for a, b in zip(times, times[1:])]
    for mask in itertools.product([False, True], repeat=n - 1):
        if all((g > theta) == cut for g, cut in zip(gaps, mask)):
            lengths, run = [], 1
            for cut in mask:
                if cut:
                    lengths.append(run)
                    run = 1
                else:
                    run += 1
            lengths.append(run)
            return lengths
    raise AssertionError("no consistent partition")


def pair_counts(sentences):
    counts = {}
    for s in sentences:
        for k in range(len(s) - 1):
            counts[(s[k], s[k + 1])] = counts.get((s[k], s[k + 1]), 0) + 1
    return counts


def fg_leaves(succ, states):
    return {s for s in states if not any(succ.get(v) == s for v in states)}


def fg_absorbing(succ, states):
    return {s for s in states if succ.get(s) == s}


def _orbit_returns(succ, s, n):
    v = s
    for _ in range(n):
        v = succ.get(v)
        if v is None:
            return False
        if v == s:
            return True
    return False


def fg_cycles(succ, states):
    n = len(states)
    on_cycle = {s for s in states if _orbit_returns(succ, s, n)}
    seen, out = set(), []
    for s in sorted(on_cycle):
        if s in seen:
            continue
        cyc = [s]
        v = succ[s]
        while v != s:
            cyc.append(v)
            v = succ[v]
        seen.update(cyc)
        out.append(cyc)
    return sorted(out)


def fg_max_transient(succ, states):
    n = len(states)
    on_cycle = {s for s in states if _orbit_returns(succ, s, n)}
    best = None
    for leaf in fg_leaves(succ, states):
        steps, v = 0, leaf
        while v not in on_cycle and succ.get(v) is not None:
            v = succ[v]
            steps += 1
        best = steps if best is None else max(best, steps)
    return best


def stationary_dense(states, probs, restart):
    """Solve pi = (1 - r) pi P' + r / n directly, P' with dangling rows uniform."""
    states = sorted(states)
    n = len(states)
    pos = {s: k for k, s in enumerate(states)}
    P = np.zeros((n, n))
    for (i, j), p in probs.items():
        P[pos[i], pos[j]] = p
    for k in range(n):
        if P[k].sum() == 0:
            P[k] = 1.0 / n
    A = np.eye(n) - (1 - restart) * P.T
    pi = np.linalg.solve(A, np.full(n, restart / n))
    pi = pi / pi.sum()
    return {s: pi[pos[s]] for s in states}


def best_assignment(ta, tb, window):
    """Matching maximising the number of pairs, then minimising total |dt|."""
    best = (0, 0.0, [])

    def rec(i, used, pairs, cost):
        nonlocal best
        if i == len(ta):
            key = (len(pairs), -cost)
            if key > (best[0], -best[1]):
                best = (len(pairs), cost, list(pairs))
            return
        rec(i + 1, used, pairs, cost)
        for j, t in enumerate(tb):
            if j not in used and abs(t - ta[i]) <= window:
                pairs.append((i, j))
                rec(i + 1, used | {j}, pairs, cost + abs(t - ta[i]))
                pairs.pop()

    rec(0, frozenset(), [], 0.0)
    return sorted(best[2])


def naive_detect(x, w, delta, d):
    """Literal scan: candidate = argmax of each run of g > delta, then greedy
    suppression over candidates in (descending g, ascending index) order."""
    a = naive_moving_average(list(x), w)
    idx = sorted(a)
    g = {i: abs(x[i]) - abs(a[i]) for i in idx}
    cands, run = [], []
    for i in idx + [None]:
        if i is not None and g[i] > delta:
            run.append(i)
            continue
        if run:
            best = run[0]
            for j in run:
                if g[j] > g[best]:
                    best = j
            cands.append(best)
            run = []
    kept = []
    for c in sorted(cands, key=lambda i: (-g[i], i)):
        if all(abs(c - k) > d for k in kept):
            kept.append(c)
    return sorted(kept)
