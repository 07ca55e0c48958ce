"""Entropies and conditional mutual informations of composed auxiliary laws.

A :class:`JointDist` is the explicit product law

    P(q1) P(u1|q1) P(u2) P(x1|u1) P(x2|u2) P(y, z[, y1] | x1, x2)

over the variable catalog ``Q1, U1, U2, X1, X2, Y, Z[, Y1]``.  Tensors may
carry leading batch axes, in which case every measure is returned as an
array over the batch.  All logarithms are base 2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .channel import Channel

STOCHASTIC_TOL = 1e-9
CMI_CLAMP_TOL = 1e-9
ZERO_SNAP = 1e-13   # |I| below this is floating-point residue of an exact zero

CATALOG = ("Q1", "U1", "U2", "X1", "X2", "Y", "Z", "Y1")


class InformationError(ArithmeticError):
    """A conditional mutual information came out clearly negative."""


def _check_stochastic(name: str, m: np.ndarray, batched: bool = False) -> None:
    if np.any(m < 0):
        raise ValueError(f"{name} has negative entries")
    if np.any(np.abs(m.sum(axis=-1) - 1.0) > STOCHASTIC_TOL):
        raise ValueError(f"{name} rows must sum to 1")


@dataclass(frozen=True)
class AuxChain:
    """Factored auxiliary law P(q1) P(u1|q1) P(u2) P(x1|u1) P(x2|u2).

    The Markov chain Q1 -> U1 -> X1 and the independence of the helper
    branch (U2, X2) hold by construction.
    """

    pmf_q1: np.ndarray
    pmf_u1_given_q1: np.ndarray
    pmf_u2: np.ndarray
    pmf_x1_given_u1: np.ndarray
    pmf_x2_given_u2: np.ndarray

    def __post_init__(self):
        for name in ("pmf_q1", "pmf_u1_given_q1", "pmf_u2", "pmf_x1_given_u1", "pmf_x2_given_u2"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.pmf_q1.ndim != 1 or self.pmf_u2.ndim != 1:
            raise ValueError("pmf_q1 and pmf_u2 must be vectors")
        q1, u1, u2 = self.q1_size, self.u1_size, self.u2_size
        if self.pmf_u1_given_q1.shape != (q1, u1):
            raise ValueError(f"pmf_u1_given_q1 must have shape ({q1}, u1_size)")
        if self.pmf_x1_given_u1.ndim != 2 or self.pmf_x1_given_u1.shape[0] != u1:
            raise ValueError(f"pmf_x1_given_u1 must have {u1} rows")
        if self.pmf_x2_given_u2.ndim != 2 or self.pmf_x2_given_u2.shape[0] != u2:
            raise ValueError(f"pmf_x2_given_u2 must have {u2} rows")
        for name in ("pmf_q1", "pmf_u1_given_q1", "pmf_u2", "pmf_x1_given_u1", "pmf_x2_given_u2"):
            _check_stochastic(name, getattr(self, name))

    @property
    def q1_size(self) -> int:
        return self.pmf_q1.shape[0]

    @property
    def u1_size(self) -> int:
        return self.pmf_u1_given_q1.shape[1]

    @property
    def u2_size(self) -> int:
        return self.pmf_u2.shape[0]

    @property
    def x1_size(self) -> int:
        return self.pmf_x1_given_u1.shape[1]

    @property
    def x2_size(self) -> int:
        return self.pmf_x2_given_u2.shape[1]

    @classmethod
    def degenerate(cls, ch: Channel, x1: int = 0, x2: int = 0) -> "AuxChain":
        """All auxiliaries of size one; the inputs are the constants ``x1``, ``x2``."""
        return cls([1.0], [[1.0]], [1.0],
                   np.eye(ch.x1_size)[[x1]], np.eye(ch.x2_size)[[x2]])

    @classmethod
    def from_inputs(cls, pmf_x1: np.ndarray, pmf_x2: np.ndarray) -> "AuxChain":
        """Q1 constant, U1 = X1 and U2 = X2 with the given input laws."""
        pmf_x1, pmf_x2 = np.asarray(pmf_x1, float), np.asarray(pmf_x2, float)
        return cls([1.0], pmf_x1[None, :], pmf_x2,
                   np.eye(len(pmf_x1)), np.eye(len(pmf_x2)))

    @classmethod
    def random(cls, rng: np.random.Generator, ch: Channel, q1_size: int = 2,
               u1_size: int = 2, u2_size: int = 2, alpha: float = 1.0) -> "AuxChain":
        """Every factor drawn row-wise from a symmetric Dirichlet law."""
        d = lambda n, size=None: rng.dirichlet(np.full(n, alpha), size=size)
        return cls(d(q1_size), d(u1_size, q1_size), d(u2_size),
                   d(ch.x1_size, u1_size), d(ch.x2_size, u2_size))

    def to_dict(self) -> dict:
        return {"pmf_q1": self.pmf_q1.tolist(),
                "pmf_u1_given_q1": self.pmf_u1_given_q1.tolist(),
                "pmf_u2": self.pmf_u2.tolist(),
                "pmf_x1_given_u1": self.pmf_x1_given_u1.tolist(),
                "pmf_x2_given_u2": self.pmf_x2_given_u2.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "AuxChain":
        try:
            return cls(*(doc[k] for k in ("pmf_q1", "pmf_u1_given_q1", "pmf_u2",
                                          "pmf_x1_given_u1", "pmf_x2_given_u2")))
        except KeyError as exc:
            raise ValueError(f"auxiliary chain document is missing {exc.args[0]!r}") from None


@dataclass(frozen=True)
class ChainBatch:
    """A stack of auxiliary chains sharing sizes (leading axis = batch)."""

    pmf_q1: np.ndarray
    pmf_u1_given_q1: np.ndarray
    pmf_u2: np.ndarray
    pmf_x1_given_u1: np.ndarray
    pmf_x2_given_u2: np.ndarray

    def __len__(self) -> int:
        return self.pmf_q1.shape[0]

    def __getitem__(self, i: int) -> AuxChain:
        return AuxChain(self.pmf_q1[i], self.pmf_u1_given_q1[i], self.pmf_u2[i],
                        self.pmf_x1_given_u1[i], self.pmf_x2_given_u2[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @classmethod
    def stack(cls, chains: Iterable[AuxChain]) -> "ChainBatch":
        chains = list(chains)
        return cls(*(np.stack([getattr(c, f) for c in chains])
                     for f in ("pmf_q1", "pmf_u1_given_q1", "pmf_u2",
                               "pmf_x1_given_u1", "pmf_x2_given_u2")))


@dataclass(frozen=True)
class JointDist:
    """Explicit joint PMF; the last ``len(names)`` axes are the variables."""

    names: tuple[str, ...]
    p: np.ndarray

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        if self.p.ndim < len(self.names):
            raise ValueError("tensor has fewer axes than variables")

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.p.shape[:self.p.ndim - len(self.names)]

    @property
    def sizes(self) -> dict[str, int]:
        nb = len(self.batch_shape)
        return {n: self.p.shape[nb + i] for i, n in enumerate(self.names)}

    def axes(self, names: Iterable[str]) -> tuple[int, ...]:
        nb = len(self.batch_shape)
        out = []
        for n in names:
            try:
                out.append(nb + self.names.index(n))
            except ValueError:
                raise KeyError(f"unknown variable {n!r}; catalog is {self.names}") from None
        return tuple(out)

    def marginal(self, names: Iterable[str]) -> np.ndarray:
        names = tuple(names)
        keep = set(self.axes(names))
        nb = len(self.batch_shape)
        drop = tuple(a for a in range(nb, self.p.ndim) if a not in keep)
        m = self.p.sum(axis=drop) if drop else self.p
        return m

    def total(self):
        nb = len(self.batch_shape)
        return self.p.sum(axis=tuple(range(nb, self.p.ndim)))


def compose_joint(aux: AuxChain | ChainBatch, ch: Channel, with_y1: bool | None = None) -> JointDist:
    """Product law of an auxiliary chain (or batch of chains) and a channel."""
    if aux.pmf_x1_given_u1.shape[-1] != ch.x1_size:
        raise ValueError(f"P(x1|u1) has {aux.pmf_x1_given_u1.shape[-1]} columns, "
                         f"channel has x1_size={ch.x1_size}")
    if aux.pmf_x2_given_u2.shape[-1] != ch.x2_size:
        raise ValueError(f"P(x2|u2) has {aux.pmf_x2_given_u2.shape[-1]} columns, "
                         f"channel has x2_size={ch.x2_size}")
    if with_y1 is None:
        with_y1 = ch.y1_size > 0
    if with_y1 and not ch.y1_size:
        raise ValueError("channel has no helper observation Y1")
    law = ch.p if with_y1 else ch.p_yz
    out = "yzw" if with_y1 else "yz"
    # q=Q1 u=U1 v=U2 a=X1 b=X2
    p = np.einsum(f"...q,...qu,...v,...ua,...vb,ab{out}->...quvab{out}",
                  aux.pmf_q1, aux.pmf_u1_given_q1, aux.pmf_u2,
                  aux.pmf_x1_given_u1, aux.pmf_x2_given_u2, law)
    names = CATALOG if with_y1 else CATALOG[:-1]
    return JointDist(names, p)


def _as_names(v) -> tuple[str, ...]:
    if isinstance(v, str):
        return tuple(t for t in re.split(r"[\s,]+", v.strip()) if t)
    return tuple(v)


def _plogp_sum(m: np.ndarray, axes: tuple[int, ...]):
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(m > 0, m * np.log2(np.where(m > 0, m, 1.0)), 0.0)
    return -t.sum(axis=axes)


def entropy(j: JointDist, vars) -> float | np.ndarray:
    """Shannon entropy in bits of the marginal over ``vars``."""
    names = _as_names(vars)
    if not names:
        raise ValueError("entropy needs at least one variable")
    m = j.marginal(names)
    nb = len(j.batch_shape)
    h = _plogp_sum(m, tuple(range(nb, m.ndim)))
    h = np.maximum(h, 0.0)
    return float(h) if nb == 0 else h


def _clamp(v, where: str):
    v = np.asarray(v, dtype=float)
    if np.any(v < -CMI_CLAMP_TOL):
        raise InformationError(f"{where} = {float(np.min(v)):.3e} < 0 beyond tolerance")
    return np.where(v < ZERO_SNAP, 0.0, v)


def cmi(j: JointDist, a, b, c=()) -> float | np.ndarray:
    """I(A; B | C) = H(AC) + H(BC) - H(ABC) - H(C), clamped at zero.

    Raises
    ------
    ValueError
        If the three variable sets overlap.
    InformationError
        If the result is below ``-1e-9`` (a modelling bug, not rounding).
    """
    a, b, c = _as_names(a), _as_names(b), _as_names(c)
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise ValueError(f"variable sets must be disjoint: {a}, {b}, {c}")
    if not a or not b:
        raise ValueError("I(A;B|C) needs nonempty A and B")
    hc = entropy(j, c) if c else 0.0
    v = entropy(j, a + c) + entropy(j, b + c) - entropy(j, a + b + c) - hc
    out = _clamp(v, f"I({','.join(a)};{','.join(b)}|{','.join(c)})")
    return float(out) if out.ndim == 0 else out


_TERM = re.compile(r"^\s*([^;|]+);([^;|]+)(?:\|([^;|]*))?\s*$")


class Measures:
    """Cached entropy evaluator over one joint law (or a batch of them).

    ``m.I("U1;Y|U2,Q1")`` evaluates I(U1; Y | U2, Q1).  Entropies of each
    variable subset are computed once.
    """

    def __init__(self, j: JointDist):
        self.j = j
        self._h: dict[frozenset, np.ndarray] = {}

    def H(self, vars) -> np.ndarray:
        key = frozenset(_as_names(vars))
        if not key:
            return np.zeros(self.j.batch_shape)
        if key not in self._h:
            self._h[key] = np.asarray(entropy(self.j, sorted(key, key=self.j.names.index)))
        return self._h[key]

    def I(self, expr: str) -> np.ndarray:
        m = _TERM.match(expr)
        if not m:
            raise ValueError(f"cannot parse information term {expr!r}")
        a, b, c = (_as_names(g or "") for g in m.groups())
        if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
            raise ValueError(f"variable sets must be disjoint in {expr!r}")
        v = self.H(a + c) + self.H(b + c) - self.H(a + b + c) - self.H(c)
        return _clamp(v, f"I({expr})")
