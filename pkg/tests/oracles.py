"""Independent oracles shared by the test modules.

These deliberately re-derive quantities by brute force (path enumeration,
sign-pattern enumeration) so the implementations under test are checked
against a second, unrelated route.
"""

import itertools

import numpy as np
from scipy import stats as sps


def brute_force_distances(matrix, absent=1e-6):
    """Minimum inverse-weight cost over all simple paths, per pair."""
    matrix = np.asarray(matrix, dtype=float)
    k = matrix.shape[0]
    dist = np.full((k, k), np.inf)
    np.fill_diagonal(dist, 0.0)
    nodes = range(k)
    for s, t in itertools.combinations(nodes, 2):
        best = np.inf
        others = [v for v in nodes if v not in (s, t)]
        for size in range(len(others) + 1):
            for middle in itertools.permutations(others, size):
                path = (s, *middle, t)
                cost = 0.0
                for a, b in zip(path, path[1:]):
                    w = abs(matrix[a, b])
                    if w <= absent:
                        cost = np.inf
                        break
                    cost += 1.0 / w
                best = min(best, cost)
        dist[s, t] = dist[t, s] = best
    return dist


def brute_force_wilcoxon_p(d):
    """Two-sided exact p over all 2**n sign assignments of the ranks."""
    d = np.asarray(d, dtype=float)
    d = d[d != 0]
    n = len(d)
    ranks = sps.rankdata(np.abs(d))
    v_obs = ranks[d > 0].sum()
    stats = []
    for mask in range(1 << n):
        signs = np.array([(mask >> i) & 1 for i in range(n)])
        stats.append(ranks[signs == 1].sum())
    stats = np.array(stats)
    p_le = np.mean(stats <= v_obs + 1e-9)
    p_ge = np.mean(stats >= v_obs - 1e-9)
    return min(1.0, 2 * min(p_le, p_ge))
