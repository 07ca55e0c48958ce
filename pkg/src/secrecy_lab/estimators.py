"""scikit-learn style wrapper around the region builders.

``fit`` takes a channel (or its raw probability tensor) and computes the
hull; ``predict`` then answers membership queries for (R1, Re) pairs.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .channel import Channel
from .hull import outside_distance
from .regions import EXACT_TOL, FORMULAS, RateRegion, compute_region
from .search import GridSpec

_PLANAR = tuple(f for f in FORMULAS if not f.startswith("bcc"))


def _as_channel(X) -> Channel:
    if isinstance(X, Channel):
        return X
    return Channel(np.asarray(X, dtype=float))


class RateRegionEstimator(BaseEstimator):
    """Rate-equivocation region of a channel as a fitted estimator.

    Parameters
    ----------
    formula : str
        One of ``wiretap``, ``le``, ``c``, ``ctilde``, ``deaf``.
    steps : int
        Simplex grid resolution.
    q1_size, u1_size, u2_size : int or None
        Auxiliary alphabet sizes; ``None`` uses the channel input sizes.
    tol : float
        Membership slack for :meth:`predict`.
    workers : int or None
        Thread count for the sweep.

    Attributes
    ----------
    region_ : RateRegion
    hull_ : ndarray of shape (n_vertices, 2)
    max_diagonal_ : float
        Largest perfect-secrecy rate of the fitted region.
    """

    def __init__(self, formula="ctilde", steps=4, q1_size=None, u1_size=None,
                 u2_size=None, tol=EXACT_TOL, workers=None):
        self.formula = formula
        self.steps = steps
        self.q1_size = q1_size
        self.u1_size = u1_size
        self.u2_size = u2_size
        self.tol = tol
        self.workers = workers

    def _spec(self) -> GridSpec:
        return GridSpec(steps=self.steps, q1_size=self.q1_size,
                        u1_size=self.u1_size, u2_size=self.u2_size)

    def fit(self, X, y=None):
        """Compute the region of channel ``X``; ``y`` is ignored."""
        if self.formula not in _PLANAR:
            raise ValueError(f"formula must be one of {_PLANAR}, got {self.formula!r}")
        ch = _as_channel(X)
        region: RateRegion = compute_region(self.formula, ch, self._spec(), workers=self.workers)
        self.region_ = region
        self.hull_ = region.hull
        self.max_diagonal_ = region.max_diagonal()
        self.channel_digest_ = ch.digest()
        return self

    def decision_function(self, X) -> np.ndarray:
        """Negative distance of each (R1, Re) row outside the hull (0 inside)."""
        check_is_fitted(self, "hull_")
        pts = check_array(X, dtype=float)
        if pts.shape[1] != 2:
            raise ValueError(f"expected (n, 2) rate pairs, got {pts.shape}")
        return -np.array([outside_distance(p, self.hull_) for p in pts])

    def predict(self, X) -> np.ndarray:
        """Boolean membership of each (R1, Re) row."""
        return self.decision_function(X) >= -self.tol

    def score(self, X, y) -> float:
        """Fraction of rows whose membership matches ``y``."""
        return float(np.mean(self.predict(X) == np.asarray(y, dtype=bool)))
