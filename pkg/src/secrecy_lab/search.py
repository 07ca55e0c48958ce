"""Quantized simplex grids and enumeration of auxiliary chains.

Region builders take unions over auxiliary laws; on a finite grid with step
``1/steps`` the union becomes a finite enumeration, optionally followed by
a local refinement around the best point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np

from .channel import Channel
from .info import AuxChain, ChainBatch

DEFAULT_MAX_CHAINS = 10 ** 8
INPUT_MAP_MODES = ("deterministic", "stochastic")


class GridTooLarge(RuntimeError):
    """The enumeration would exceed the configured chain cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"grid enumeration would produce {count} auxiliary chains "
                         f"(cap {cap}); lower --steps or the auxiliary sizes")
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class GridSpec:
    """Grid resolution and auxiliary alphabet sizes.

    Sizes left as ``None`` default to the channel input sizes
    (``q1 = u1 = |X1|``, ``u2 = |X2|``).  ``input_maps`` selects whether
    P(x1|u1), P(x2|u2) range over deterministic maps (the identity when the
    sizes agree) or over the full grid of stochastic matrices.
    """

    steps: int = 4
    q1_size: int | None = None
    u1_size: int | None = None
    u2_size: int | None = None
    refine_rounds: int = 0
    refine_radius: float = 0.25
    input_maps: str = "deterministic"
    max_chains: int = DEFAULT_MAX_CHAINS

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        for name in ("q1_size", "u1_size", "u2_size"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be >= 0")
        if not 0 < self.refine_radius < 1:
            raise ValueError("refine_radius must lie in (0, 1)")
        if self.input_maps not in INPUT_MAP_MODES:
            raise ValueError(f"input_maps must be one of {INPUT_MAP_MODES}")

    def resolve(self, ch: Channel) -> "GridSpec":
        return replace(self,
                       q1_size=self.q1_size or ch.x1_size,
                       u1_size=self.u1_size or ch.x1_size,
                       u2_size=self.u2_size or ch.x2_size)

    def to_dict(self) -> dict:
        return {"steps": self.steps, "q1_size": self.q1_size, "u1_size": self.u1_size,
                "u2_size": self.u2_size, "refine_rounds": self.refine_rounds,
                "refine_radius": self.refine_radius, "input_maps": self.input_maps}


def simplex_grid(dim: int, steps: int) -> np.ndarray:
    """All distributions on ``dim`` points whose entries are multiples of ``1/steps``.

    Rows come in lexicographic order of the integer compositions, e.g.
    ``simplex_grid(2, 2)`` is ``[[0, 1], [0.5, 0.5], [1, 0]]``.  There are
    ``C(steps + dim - 1, dim - 1)`` rows.
    """
    if dim < 1 or steps < 1:
        raise ValueError("dim and steps must be >= 1")
    return _simplex_grid(dim, steps).copy()


@lru_cache(maxsize=64)
def _simplex_grid(dim: int, steps: int) -> np.ndarray:
    rows = [c for c in _compositions(dim, steps)]
    g = np.array(rows, dtype=np.float64) / steps
    g.setflags(write=False)
    return g


def _compositions(dim: int, total: int) -> Iterator[tuple[int, ...]]:
    if dim == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(dim - 1, total - first):
            yield (first,) + rest


def _map_set(n_in: int, n_out: int, mode: str, steps: int) -> np.ndarray:
    """Candidate stochastic matrices P(out|in), shape (count, n_in, n_out)."""
    if mode == "deterministic":
        if n_in == n_out:
            return np.eye(n_in)[None]
        funcs = list(itertools.product(range(n_out), repeat=n_in))
        return np.stack([np.eye(n_out)[list(f)] for f in funcs])
    rows = _simplex_grid(n_out, steps)
    idx = np.array(list(itertools.product(range(len(rows)), repeat=n_in)))
    return rows[idx]


@dataclass(frozen=True)
class _Factors:
    """Per-factor candidate tables and the mixed radix of the product."""

    q1: np.ndarray
    u1_rows: np.ndarray
    q1_size: int
    u2: np.ndarray
    x1_maps: np.ndarray
    x2_maps: np.ndarray

    @property
    def radix(self) -> tuple[int, ...]:
        return ((len(self.q1),) + (len(self.u1_rows),) * self.q1_size
                + (len(self.u2), len(self.x1_maps), len(self.x2_maps)))

    @property
    def count(self) -> int:
        return math.prod(self.radix)


def _factors(spec: GridSpec, ch: Channel) -> _Factors:
    s = spec.resolve(ch)
    return _Factors(q1=_simplex_grid(s.q1_size, s.steps),
                    u1_rows=_simplex_grid(s.u1_size, s.steps),
                    q1_size=s.q1_size,
                    u2=_simplex_grid(s.u2_size, s.steps),
                    x1_maps=_map_set(s.u1_size, ch.x1_size, s.input_maps, s.steps),
                    x2_maps=_map_set(s.u2_size, ch.x2_size, s.input_maps, s.steps))


def count_aux_chains(spec: GridSpec, ch: Channel) -> int:
    return _factors(spec, ch).count


def iter_chain_batches(spec: GridSpec, ch: Channel, batch_size: int = 4096) -> Iterator[ChainBatch]:
    """Yield the enumeration of :func:`enumerate_aux_chains` in stacked batches.

    Raises
    ------
    GridTooLarge
        If the number of chains exceeds ``spec.max_chains``.
    """
    f = _factors(spec, ch)
    total = f.count
    if total > spec.max_chains:
        raise GridTooLarge(total, spec.max_chains)
    radix = f.radix
    for start in range(0, total, batch_size):
        flat = np.arange(start, min(start + batch_size, total))
        digits = np.unravel_index(flat, radix)
        q1 = f.q1[digits[0]]
        u1 = np.stack([f.u1_rows[d] for d in digits[1:1 + f.q1_size]], axis=1)
        u2 = f.u2[digits[1 + f.q1_size]]
        x1 = f.x1_maps[digits[2 + f.q1_size]]
        x2 = f.x2_maps[digits[3 + f.q1_size]]
        yield ChainBatch(q1, u1, u2, x1, x2)


def enumerate_aux_chains(spec: GridSpec, ch: Channel) -> Iterator[AuxChain]:
    """All grid auxiliary chains, Cartesian product order (last factor fastest).

    Factor order: P(q1), the rows of P(u1|q1), P(u2), P(x1|u1), P(x2|u2).
    """
    for batch in iter_chain_batches(spec, ch):
        yield from batch


def _simplex_rows(chain: AuxChain, include_maps: bool) -> list[tuple[str, int | None]]:
    rows: list[tuple[str, int | None]] = [("pmf_q1", None)]
    rows += [("pmf_u1_given_q1", i) for i in range(chain.q1_size)]
    rows += [("pmf_u2", None)]
    if include_maps:
        rows += [("pmf_x1_given_u1", i) for i in range(chain.u1_size)]
        rows += [("pmf_x2_given_u2", i) for i in range(chain.u2_size)]
    return rows


def _with_row(chain: AuxChain, field: str, row: int | None, values: np.ndarray) -> AuxChain:
    arr = np.array(getattr(chain, field))
    if row is None:
        arr = values
    else:
        arr[row] = values
    return replace(chain, **{field: arr})


def refine_around(best: AuxChain, spec: GridSpec,
                  objective: Callable[[AuxChain], float]) -> AuxChain:
    """Greedy coordinate search starting from ``best``.

    Each round moves up to ``refine_radius * 2**-round`` probability mass
    between every ordered pair of coordinates of every simplex factor and
    keeps moves that strictly improve ``objective``.  Input maps are only
    perturbed when ``spec.input_maps == "stochastic"``.
    """
    if spec.refine_rounds < 1:
        raise ValueError("refine_rounds must be >= 1")
    current, value = best, float(objective(best))
    rows = _simplex_rows(best, spec.input_maps == "stochastic")
    for rnd in range(spec.refine_rounds):
        radius = spec.refine_radius * 0.5 ** rnd
        for field, row in rows:
            vec = np.array(getattr(current, field) if row is None else getattr(current, field)[row])
            for i, j in itertools.permutations(range(len(vec)), 2):
                delta = min(radius, vec[j])
                if delta <= 0:
                    continue
                trial = vec.copy()
                trial[i] += delta
                trial[j] -= delta
                trial[j] = max(trial[j], 0.0)
                trial /= trial.sum()
                cand = _with_row(current, field, row, trial)
                v = float(objective(cand))
                if v > value + 1e-15:
                    current, value, vec = cand, v, trial
    return current
