"""Greedy clustering scan shared by the aggregation algorithms.

The scan visits inputs in column order. Every input not yet assigned seeds a
new cluster, and each later unassigned input is offered to that cluster once,
in order; it joins when the admission rule returns a value ``<= 0``. After an
admission the representative changes, so the remaining candidates are scored
against the enlarged cluster.

Scoring one candidate at a time costs a pass over the data per comparison.
Here all remaining candidates of a cluster are scored at once from a few
matrix-vector products; the first non-positive score is admitted and the
candidates after it are rescored. This visits exactly the comparisons of the
one-at-a-time scan and makes the same decisions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .core import AggregationSpec
from .errors import InvalidData
from .estimators import SINGULAR_CUTOFF


class Evaluation(NamedTuple):
    """One admission test made by a scan, recorded when tracing."""

    members: tuple[int, ...]
    candidate: int
    value: float
    details: dict


@dataclass
class PairStats:
    """Moments of (representative, candidate, merged column) for many candidates.

    Scalars refer to the current representative ``r``; arrays are indexed by
    candidate ``c``; ``m`` is the aggregation over members plus the
    candidate. All columns are centered, so dot products divided by ``n - 1``
    are sample covariances.
    """

    n: int
    rr: float
    ry: float
    rc: np.ndarray
    cc: np.ndarray
    cy: np.ndarray
    mm: np.ndarray
    my: np.ndarray
    yy: float
    sst: float
    extra: dict = field(default_factory=dict)


class ClusterScorer:
    """Incremental moments of a growing cluster against candidate columns.

    Parameters
    ----------
    X : ndarray, shape (n, D)
        Centered inputs.
    y : ndarray, shape (n,)
        Centered target.
    aggregation : AggregationSpec
        Decomposable aggregations are updated in O(n) per admission and score
        all candidates with two matrix-vector products; other aggregations
        re-aggregate the member set for every candidate.
    """

    def __init__(self, X: np.ndarray, y: np.ndarray, aggregation: AggregationSpec) -> None:
        self.X = X
        self.y = y
        self.n = X.shape[0]
        self.aggregation = aggregation
        self.xx = np.einsum("ij,ij->j", X, X)
        self.xy = X.T @ y
        self.yy = float(y @ y)
        dev = y - y.mean()
        self.sst = float(dev @ dev)
        if aggregation.decomposable:
            C = np.asarray(aggregation.contribution(X), dtype=float)
            C = C - C.mean(axis=0)
            self.C = C
            self.cc_contrib = np.einsum("ij,ij->j", C, C)
            self.cy_contrib = C.T @ y
        self.members: list[int] = []

    # -- cluster state -------------------------------------------------
    def start(self, i: int) -> None:
        self.members = [i]
        if self.aggregation.decomposable:
            self.S = self.C[:, i].copy()
        self._refresh_rep()

    def admit(self, j: int) -> None:
        self.members.append(j)
        if self.aggregation.decomposable:
            self.S += self.C[:, j]
        self._refresh_rep()

    def _refresh_rep(self) -> None:
        if self.aggregation.decomposable:
            self.rep = self.aggregation.scale(len(self.members)) * self.S
        else:
            col = self.aggregation.aggregate(self.X[:, self.members])
            self.rep = col - col.mean()

    @property
    def representative(self) -> np.ndarray:
        return self.rep

    # -- scoring ---------------------------------------------------------
    def stats(self, cands: np.ndarray) -> PairStats:
        XJ = self.X[:, cands]
        rc = XJ.T @ self.rep
        if self.aggregation.decomposable:
            alpha = self.aggregation.scale(len(self.members) + 1)
            SC = self.C[:, cands].T @ self.S
            mm = alpha**2 * (float(self.S @ self.S) + 2.0 * SC + self.cc_contrib[cands])
            my = alpha * (float(self.S @ self.y) + self.cy_contrib[cands])
        else:
            mm = np.empty(cands.size)
            my = np.empty(cands.size)
            for t, j in enumerate(cands):
                col = self.aggregation.aggregate(self.X[:, self.members + [int(j)]])
                col = col - col.mean()
                mm[t] = col @ col
                my[t] = col @ self.y
        return PairStats(
            n=self.n,
            rr=float(self.rep @ self.rep),
            ry=float(self.rep @ self.y),
            rc=rc,
            cc=self.xx[cands],
            cy=self.xy[cands],
            mm=mm,
            my=my,
            yy=self.yy,
            sst=self.sst,
        )


def bivariate_singular(s: PairStats) -> np.ndarray:
    """Mask of candidates collinear with the representative."""
    denom = s.rr * s.cc
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.abs(s.rc) / np.sqrt(denom)
    return (denom <= 0) | ~(1.0 - rho > SINGULAR_CUTOFF)


def bivariate_fit(s: PairStats) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficients ``(w_rep, w_cand)`` and residual sum of squares of the 2-column OLS."""
    det = s.rr * s.cc - s.rc**2
    with np.errstate(divide="ignore", invalid="ignore"):
        w1 = (s.cc * s.ry - s.rc * s.cy) / det
        w2 = (s.rr * s.cy - s.rc * s.ry) / det
    ssres = s.yy - (w1 * s.ry + w2 * s.cy)
    return w1, w2, ssres


Rule = Callable[[PairStats], tuple[np.ndarray, dict]]


def greedy_scan(
    X: np.ndarray,
    y: np.ndarray,
    aggregation: AggregationSpec,
    rule: Rule,
    trace: list | None = None,
) -> list[list[int]]:
    """Run the greedy scan and return clusters of 0-based indices.

    ``rule`` maps a :class:`PairStats` batch to an array of admission values
    (admit iff ``<= 0``) and a dict of per-candidate diagnostic arrays that
    is copied into ``trace`` when one is given.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise InvalidData(f"incompatible shapes {X.shape} and {y.shape}")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise InvalidData("inputs and target must be finite")
    D = X.shape[1]
    scorer = ClusterScorer(X, y, aggregation)
    assigned = np.zeros(D, dtype=bool)
    clusters: list[list[int]] = []
    for i in range(D):
        if assigned[i]:
            continue
        assigned[i] = True
        scorer.start(i)
        cands = np.flatnonzero(~assigned[i + 1 :]) + i + 1
        while cands.size:
            values, details = rule(scorer.stats(cands))
            hits = np.flatnonzero(values <= 0)
            stop = hits[0] if hits.size else cands.size - 1
            if trace is not None:
                members = tuple(scorer.members)
                for t in range(stop + 1):
                    trace.append(
                        Evaluation(
                            members,
                            int(cands[t]),
                            float(values[t]),
                            {k: float(v[t]) for k, v in details.items()},
                        )
                    )
            if not hits.size:
                break
            j = int(cands[stop])
            assigned[j] = True
            scorer.admit(j)
            cands = cands[stop + 1 :]
        clusters.append(list(scorer.members))
    return clusters
