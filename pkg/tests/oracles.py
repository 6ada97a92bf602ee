"""Independent reference computations used to derive expected test values.

Nothing here imports the package's estimators: least squares is solved by
grid search, moments are written out as sums, and the greedy scan is the
plain double loop.
"""

from __future__ import annotations

import itertools

import numpy as np


def grid_ols(X, y, half_width=20.0, levels=12, points=41):
    """Minimize the squared loss over coefficient space by shrinking grids."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    k = X.shape[1]
    center = np.zeros(k)
    width = half_width
    for _ in range(levels):
        axes = [np.linspace(c - width, c + width, points) for c in center]
        grid = np.array(list(itertools.product(*axes)))
        loss = np.sum((y[None, :] - grid @ X.T) ** 2, axis=1)
        center = grid[np.argmin(loss)]
        width /= 8.0
    return center


def r2(y, y_hat):
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    ybar = sum(y) / len(y)
    ss_tot = sum((v - ybar) ** 2 for v in y)
    ss_res = sum((a - b) ** 2 for a, b in zip(y, y_hat))
    return 1.0 - ss_res / ss_tot


def cov(a, b):
    a = list(map(float, a))
    b = list(map(float, b))
    ma, mb = sum(a) / len(a), sum(b) / len(b)
    return sum((x - ma) * (z - mb) for x, z in zip(a, b)) / (len(a) - 1)


def naive_scan(D, admit):
    """Greedy scan: ``admit(members, j)`` decides whether ``j`` joins ``members``."""
    assigned = [False] * D
    clusters = []
    for i in range(D):
        if assigned[i]:
            continue
        assigned[i] = True
        members = [i]
        for j in range(i + 1, D):
            if not assigned[j] and admit(list(members), j):
                members.append(j)
                assigned[j] = True
        clusters.append(members)
    return clusters


def asymptotic_bias_gap(s1, s2, c12, c1f, c2f, cfh, sh):
    """Explained-variance loss, written from the 2x2 inverse element by element."""
    det = s1 * s2 - c12 * c12
    inv = [[s2 / det, -c12 / det], [-c12 / det, s1 / det]]
    c = [c1f, c2f]
    quad = sum(c[i] * inv[i][j] * c[j] for i in range(2) for j in range(2))
    return quad - cfh * cfh / sh


def finite_var_gap(sigma2, n, pop, emp):
    """``sigma2/(n-1) * (tr(S_hat^-1 S) - var_h / var_h_hat)`` by explicit matrices."""
    S = np.array([[pop["var_1"], pop["cov_12"]], [pop["cov_12"], pop["var_2"]]])
    S_hat = np.array([[emp["var_1"], emp["cov_12"]], [emp["cov_12"], emp["var_2"]]])
    return sigma2 / (n - 1) * (np.trace(np.linalg.inv(S_hat) @ S) - pop["var_h"] / emp["var_h"])
