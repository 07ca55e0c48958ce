"""Rate-equivocation regions of the wire-tap channel with a helping interferer.

Every region here is a union over auxiliary laws of polytopes of the form

    { 0 <= Re <= R1 <= r1_cap,  Re <= re_cap },

so each auxiliary law contributes the four extreme points ``(0, 0)``,
``(r1_cap, 0)``, ``(r1_cap, b)`` and ``(b, b)`` with ``b`` the equivocation
cap clamped to ``[0, r1_cap]``.  Unions are taken over a :class:`GridSpec`
enumeration and convexified with :func:`hull2d` (time sharing).

Formula tags
------------
wiretap     helper-free capacity-equivocation region, auxiliaries Q -> U -> X1
le          earlier helper region with U1, U2 and no common layer
c           improved region with a common layer Q1 (per-law bounds ``per_pi_bounds_c``)
ctilde      union of ``c`` with the treat-helper-as-noise region ``cb``
deaf        ``c`` intersected with the helper-observation constraint (conjectured)
bcc         broadcast channel with confidential messages, (R1, Re, R0) triples
bcc-helper  the same with a helping interferer
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .channel import Channel
from .hull import diagonal_reach, hull2d, max_violation, outside_distance
from .info import AuxChain, ChainBatch, Measures, compose_joint
from .search import GridSpec, iter_chain_batches, refine_around

EXACT_TOL = 1e-9
GRID_TOL = 1e-6
BCC_SLICES = 17

FORMULAS = ("wiretap", "le", "c", "ctilde", "bcc", "bcc-helper", "deaf")


@dataclass(frozen=True)
class RatePoint:
    r1: float
    re: float

    def __post_init__(self):
        if self.r1 < 0 or self.re < 0:
            raise ValueError("rates are nonnegative")
        if self.re > self.r1 + 1e-12:
            raise ValueError("equivocation cannot exceed the rate")


@dataclass(frozen=True)
class RateRegion:
    """Point cloud in the (R1, Re) plane and its convex hull (CCW)."""

    points: np.ndarray
    hull: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_points(cls, points, meta: dict | None = None) -> "RateRegion":
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        pts = np.unique(np.vstack([pts, [[0.0, 0.0]]]), axis=0)
        return cls(points=pts, hull=hull2d(pts), meta=dict(meta or {}))

    def contains(self, point, tol: float = EXACT_TOL) -> bool:
        return outside_distance(point, self.hull) <= tol

    def issubset(self, other: "RateRegion", tol: float = EXACT_TOL) -> bool:
        return max_violation(self.hull, other.hull) <= tol

    def violation(self, other: "RateRegion") -> float:
        """Largest distance of one of our hull vertices outside ``other``."""
        return max_violation(self.hull, other.hull)

    def max_diagonal(self) -> float:
        """Largest perfect-secrecy rate: max r with (r, r) in the hull."""
        return diagonal_reach(self.hull)

    def max_r1(self) -> float:
        return float(self.hull[:, 0].max())

    def max_re(self) -> float:
        return float(self.hull[:, 1].max())


@dataclass(frozen=True)
class TripleRegion:
    """(R1, Re, R0) vertex triples, organised as R0 slices."""

    points: np.ndarray
    slices: dict[float, RateRegion]
    meta: dict = field(default_factory=dict)

    def slice_at(self, r0: float) -> RateRegion:
        key = min(self.slices, key=lambda k: abs(k - r0))
        return self.slices[key]


@dataclass(frozen=True)
class PerPiBounds:
    """Caps of one auxiliary law; ``re_cap_raw`` may be negative."""

    r1_cap: float
    re_cap_raw: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def re_cap(self) -> float:
        return float(min(max(self.re_cap_raw, 0.0), self.r1_cap))

    def vertices(self) -> np.ndarray:
        return _vertices(np.array([self.r1_cap]), np.array([self.re_cap_raw]))


# ---------------------------------------------------------------------------
# per-law bound formulas (vectorized over a batch of laws)
# ---------------------------------------------------------------------------

def _bounds_wiretap(m: Measures):
    r1 = m.I("U1;Y")
    re = m.I("U1;Y|Q1") - m.I("U1;Z|Q1")
    return r1, re


def _bounds_le(m: Measures):
    a = m.I("U1;Y|U2")
    iy2 = m.I("U2;Y")
    re = (a - np.minimum(iy2, m.I("U2;Z")) - m.I("U1;Z|U2")
          + np.minimum(iy2, m.I("U2;Z|U1")))
    return a, re


def _terms_c(m: Measures) -> dict:
    t = {
        "I(U1;Y|U2,Q1)": m.I("U1;Y|U2,Q1"),
        "I(Q1;Y|U2)": m.I("Q1;Y|U2"),
        "I(Q1;Z|U2)": m.I("Q1;Z|U2"),
        "I(U2;Y|Q1)": m.I("U2;Y|Q1"),
        "I(U2;Z|U1)": m.I("U2;Z|U1"),
        "I(U1;Z|U2,Q1)": m.I("U1;Z|U2,Q1"),
        "I(U1,U2;Z|Q1)": m.I("U1,U2;Z|Q1"),
    }
    r1p = t["I(U1;Y|U2,Q1)"]
    r2p = np.minimum(t["I(U2;Y|Q1)"], t["I(U2;Z|U1)"])
    t["R1'"] = r1p
    t["R2'"] = r2p
    t["r1_cap"] = r1p + np.minimum(t["I(Q1;Y|U2)"], t["I(Q1;Z|U2)"])
    t["re_cap"] = np.maximum(r1p + r2p - t["I(U1;Z|U2,Q1)"] - t["I(U2;Y|Q1)"],
                             r1p + r2p - t["I(U1,U2;Z|Q1)"])
    return t


def _bounds_c(m: Measures):
    t = _terms_c(m)
    return t["r1_cap"], t["re_cap"]


def _bounds_cb(m: Measures):
    return m.I("U1;Y"), m.I("U1;Y|Q1") - m.I("U1;Z|Q1")


def _bounds_deaf(m: Measures):
    r1, re = _bounds_c(m)
    extra = np.maximum(m.I("U1;Y|U2,Q1") - m.I("U1;Y1|U2,Q1"), 0.0)
    return r1, np.minimum(re, extra)


def _vertices(r1_cap: np.ndarray, re_raw: np.ndarray) -> np.ndarray:
    a = np.maximum(np.asarray(r1_cap, float), 0.0)
    b = np.clip(np.asarray(re_raw, float), 0.0, a)
    z = np.zeros_like(a)
    v = np.stack([np.stack([z, z], -1), np.stack([a, z], -1),
                  np.stack([a, b], -1), np.stack([b, b], -1)], axis=-2)
    return v.reshape(-1, 2)


# ---------------------------------------------------------------------------
# grid drivers
# ---------------------------------------------------------------------------

BoundFn = Callable[[Measures], tuple]


def default_workers() -> int:
    env = os.environ.get("SECRECY_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _eval_batch(batch: ChainBatch, ch: Channel, fns: Sequence[BoundFn], with_y1: bool):
    m = Measures(compose_joint(batch, ch, with_y1=with_y1))
    return [tuple(np.asarray(x, float) for x in fn(m)) for fn in fns]


def _sweep(ch: Channel, spec: GridSpec, fns: Sequence[BoundFn], with_y1: bool = False,
           workers: int | None = None):
    """Evaluate every bound function on every grid law.

    Returns a list (one entry per function) of tuples of concatenated arrays,
    in enumeration order regardless of the worker count.
    """
    workers = workers or default_workers()
    batches = iter_chain_batches(spec, ch)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(lambda b: _eval_batch(b, ch, fns, with_y1), batches))
    else:
        results = [_eval_batch(b, ch, fns, with_y1) for b in batches]
    out = []
    for k in range(len(fns)):
        parts = [r[k] for r in results]
        out.append(tuple(np.concatenate([p[i] for p in parts]) for i in range(len(parts[0]))))
    return out


def _chain_at(spec: GridSpec, ch: Channel, index: int) -> AuxChain:
    for start, batch in _batches_with_offsets(spec, ch):
        if start <= index < start + len(batch):
            return batch[index - start]
    raise IndexError(index)


def _batches_with_offsets(spec: GridSpec, ch: Channel):
    start = 0
    for batch in iter_chain_batches(spec, ch):
        yield start, batch
        start += len(batch)


def _single_bounds(aux: AuxChain, ch: Channel, fn: BoundFn, with_y1: bool = False):
    m = Measures(compose_joint(aux, ch, with_y1=with_y1))
    r1, re = fn(m)
    return float(r1), float(re)


def _diag(r1, re):
    return np.clip(re, 0.0, r1)


def _region(ch: Channel, spec: GridSpec, fns: Sequence[BoundFn], tag: str,
            with_y1: bool = False, workers: int | None = None, extra_meta=None) -> RateRegion:
    res = _sweep(ch, spec, fns, with_y1, workers)
    pts = [_vertices(r1, re) for r1, re in res]
    n_chains = len(res[0][0])
    if spec.refine_rounds > 0:
        diag = np.max(np.stack([_diag(r1, re) for r1, re in res]), axis=0)
        start = _chain_at(spec, ch, int(np.argmax(diag)))

        def objective(aux: AuxChain) -> float:
            vals = [_single_bounds(aux, ch, fn, with_y1) for fn in fns]
            return max(min(max(re, 0.0), r1) for r1, re in vals)

        refined = refine_around(start, spec, objective)
        for fn in fns:
            r1, re = _single_bounds(refined, ch, fn, with_y1)
            pts.append(_vertices(np.array([r1]), np.array([re])))
    meta = {"formula": tag, "grid": spec.to_dict(), "channel_digest": ch.digest(),
            "chains": n_chains, "conjectured": False}
    meta.update(extra_meta or {})
    return RateRegion.from_points(np.concatenate(pts), meta)


def _spec_for(spec: GridSpec, ch: Channel, **sizes) -> GridSpec:
    return replace(spec.resolve(ch), **sizes)


# ---------------------------------------------------------------------------
# public region operations
# ---------------------------------------------------------------------------

def wiretap_ce_region(ch: Channel, spec: GridSpec, workers: int | None = None) -> RateRegion:
    """Capacity-equivocation region of the helper-free wire-tap channel.

    Per law of (Q, U): R1 <= I(U;Y), Re <= I(U;Y|Q) - I(U;Z|Q).  ``Q`` and
    ``U`` use the ``q1_size``/``u1_size`` of ``spec``.
    """
    if ch.x2_size != 1:
        raise ValueError("wiretap_ce_region requires a helper-free channel (x2_size == 1)")
    s = _spec_for(spec, ch, u2_size=1)
    return _region(ch, s, [_bounds_wiretap], "wiretap", workers=workers)


def lai_elgamal_region(ch: Channel, spec: GridSpec, workers: int | None = None) -> RateRegion:
    """Convex hull of the earlier helper region (independent U1, U2, no Q1)."""
    s = _spec_for(spec, ch, q1_size=1)
    return _region(ch, s, [_bounds_le], "le", workers=workers)


def per_pi_bounds_c(aux: AuxChain, ch: Channel) -> PerPiBounds:
    """R1 and Re caps of the improved region for one auxiliary law.

    ``r1_cap = R1' + min{I(Q1;Y|U2), I(Q1;Z|U2)}`` and
    ``re_cap = max{R1'+R2'-I(U1;Z|U2Q1)-I(U2;Y|Q1), R1'+R2'-I(U1U2;Z|Q1)}``
    with ``R1' = I(U1;Y|U2Q1)`` and ``R2' = min{I(U2;Y|Q1), I(U2;Z|U1)}``.
    """
    t = _terms_c(Measures(compose_joint(aux, ch, with_y1=False)))
    diag = {k: float(v) for k, v in t.items()}
    return PerPiBounds(r1_cap=diag.pop("r1_cap"), re_cap_raw=diag.pop("re_cap"), diagnostics=diag)


def region_c(ch: Channel, spec: GridSpec, workers: int | None = None) -> RateRegion:
    return _region(ch, spec.resolve(ch), [_bounds_c], "c", workers=workers)


def region_ca(aux: AuxChain, ch: Channel) -> RateRegion:
    """Cooperation scheme A for a single law (the helper codeword is decoded)."""
    r1, re = _single_bounds(aux, ch, _bounds_c)
    return RateRegion.from_points(_vertices(np.array([r1]), np.array([re])), {"formula": "ca"})


def region_cb(aux: AuxChain, ch: Channel) -> RateRegion:
    """Cooperation scheme B for a single law: the helper is treated as noise.

    R1 <= I(U1;Y), Re <= I(U1;Y|Q1) - I(U1;Z|Q1).
    """
    r1, re = _single_bounds(aux, ch, _bounds_cb)
    return RateRegion.from_points(_vertices(np.array([r1]), np.array([re])), {"formula": "cb"})


def region_ctilde(ch: Channel, spec: GridSpec, workers: int | None = None) -> RateRegion:
    return _region(ch, spec.resolve(ch), [_bounds_c, _bounds_cb], "ctilde", workers=workers)


def deaf_helper_region(ch: Channel, spec: GridSpec, workers: int | None = None) -> RateRegion:
    """Region of the deaf-helper setting.  Achievability is conjectured only;
    the result carries ``meta["conjectured"] = True``."""
    if ch.y1_size == 0:
        raise ValueError("deaf-helper region needs a channel with a helper observation (y1_size > 0)")
    return _region(ch, spec.resolve(ch), [_bounds_deaf], "deaf", with_y1=True,
                   workers=workers, extra_meta={"conjectured": True})


# ---------------------------------------------------------------------------
# perfect-secrecy rates (evaluated directly, not through the hull)
# ---------------------------------------------------------------------------

def _ps_le(m: Measures):
    iy2 = m.I("U2;Y")
    val = (m.I("U1;Y|U2") - m.I("U1;Z|U2") + np.minimum(iy2, m.I("U2;Z|U1"))
           - np.minimum(iy2, m.I("U2;Z")))
    return (np.maximum(val, 0.0),)


def _ps_ctilde(m: Measures):
    a = m.I("U1;Y|U2")
    r2p = np.minimum(m.I("U2;Y"), m.I("U2;Z|U1"))
    ca = np.maximum(a - m.I("U1;Z|U2") + r2p - m.I("U2;Y"), a + r2p - m.I("U1,U2;Z"))
    cb = np.maximum(m.I("U1;Y") - m.I("U1;Z"), 0.0)
    return (np.maximum(np.maximum(ca, cb), 0.0),)


def _ps_deaf(m: Measures):
    a = m.I("U1;Y|U2")
    r2p = np.minimum(m.I("U2;Y"), m.I("U2;Z|U1"))
    re1 = np.maximum(a - m.I("U1;Z|U2") + r2p - m.I("U2;Y"), a + r2p - m.I("U1,U2;Z"))
    re2 = np.maximum(a + r2p - m.I("U1;Y1|U2"), 0.0)
    return (np.maximum(np.minimum(re1, re2), 0.0),)


def _ps_max(ch, spec, fn, with_y1=False, workers=None) -> float:
    s = _spec_for(spec, ch, q1_size=1)
    (vals,), = _sweep(ch, s, [fn], with_y1, workers)
    return float(vals.max())


def ps_rate_le(ch: Channel, spec: GridSpec, workers: int | None = None) -> float:
    """Perfect-secrecy rate of the earlier helper scheme, maximized over the grid."""
    return _ps_max(ch, spec, _ps_le, workers=workers)


def ps_rate_ctilde(ch: Channel, spec: GridSpec, workers: int | None = None) -> float:
    """Perfect-secrecy rate of the combined schemes A and B over input laws
    P(u1,x1)P(u2,x2) (no common layer)."""
    return _ps_max(ch, spec, _ps_ctilde, workers=workers)


def deaf_ps_rate(ch: Channel, spec: GridSpec, workers: int | None = None) -> float:
    """Perfect-secrecy rate with a deaf helper: max over the grid of min{Re1, Re2}."""
    if ch.y1_size == 0:
        raise ValueError("deaf-helper rate needs a channel with y1_size > 0")
    return _ps_max(ch, spec, _ps_deaf, with_y1=True, workers=workers)


# ---------------------------------------------------------------------------
# broadcast channel with confidential messages
# ---------------------------------------------------------------------------

def _bcc_ck(m: Measures):
    common = np.minimum(m.I("Q1;Y"), m.I("Q1;Z"))
    priv = m.I("U1;Y|Q1")
    return priv + common, common, priv - m.I("U1;Z|Q1")


def _bcc_a(m: Measures):
    common = np.minimum(m.I("Q1;Y|U2"), m.I("Q1;Z|U2"))
    priv = m.I("U1;Y|U2,Q1")
    return priv + common, common, priv - m.I("U1;Z|U2,Q1")


def _triples(ch: Channel, spec: GridSpec, fns, tag: str, workers=None,
             n_slices: int = BCC_SLICES) -> TripleRegion:
    res = _sweep(ch, spec, fns, False, workers)
    s_cap = np.concatenate([r[0] for r in res])
    r0_cap = np.concatenate([r[1] for r in res])
    re_raw = np.concatenate([r[2] for r in res])
    top = float(r0_cap.max())
    levels = np.unique(np.linspace(0.0, top, n_slices)) if top > EXACT_TOL else np.zeros(1)
    meta = {"formula": tag, "grid": spec.to_dict(), "channel_digest": ch.digest(),
            "chains": len(res[0][0]), "conjectured": False, "slices": len(levels)}
    slices: dict[float, RateRegion] = {}
    triples = []
    for r0 in levels:
        ok = r0_cap >= r0 - 1e-12
        v = _vertices(np.maximum(s_cap[ok] - r0, 0.0), re_raw[ok])
        reg = RateRegion.from_points(v, dict(meta, r0=float(r0)))
        slices[float(r0)] = reg
        triples.append(np.column_stack([reg.points, np.full(len(reg.points), r0)]))
    return TripleRegion(points=np.concatenate(triples), slices=slices, meta=meta)


def bcc_region(ch: Channel, spec: GridSpec, workers: int | None = None,
               n_slices: int = BCC_SLICES) -> TripleRegion:
    """Capacity-equivocation region of the BCC with chain Q1 -> U1 -> X1 -> (Y, Z)."""
    if ch.x2_size != 1:
        raise ValueError("bcc_region requires x2_size == 1")
    s = _spec_for(spec, ch, u2_size=1)
    return _triples(ch, s, [_bcc_ck], "bcc", workers, n_slices)


def bcc_helper_region(ch: Channel, spec: GridSpec, workers: int | None = None,
                      n_slices: int = BCC_SLICES) -> TripleRegion:
    """BCC with a helping interferer: union over laws of schemes A' and B'.

    Achievability of scheme A' is subject to the decodability caveat for the
    helper codeword at the second receiver; the formula is evaluated as is.
    """
    return _triples(ch, spec.resolve(ch), [_bcc_a, _bcc_ck], "bcc-helper", workers, n_slices)


# ---------------------------------------------------------------------------
# MAC pentagons (plot support)
# ---------------------------------------------------------------------------

def mac_pentagon(ch: Channel, input_dist, which: str = "receiver") -> RateRegion:
    """Standard MAC pentagon in (R1, R2) for independent inputs.

    ``input_dist`` is a pair ``(P_X1, P_X2)``; ``which`` selects the
    receiver's output Y or the eavesdropper's output Z.
    """
    out = {"receiver": "Y", "eavesdropper": "Z"}.get(which)
    if out is None:
        raise ValueError("which must be 'receiver' or 'eavesdropper'")
    px1, px2 = input_dist
    m = Measures(compose_joint(AuxChain.from_inputs(px1, px2), ch, with_y1=False))
    a = float(m.I(f"X1;{out}|X2"))
    b = float(m.I(f"X2;{out}|X1"))
    s = float(m.I(f"X1,X2;{out}"))
    pts = [(0, 0), (a, 0), (a, max(s - a, 0.0)), (max(s - b, 0.0), b), (0, b)]
    return RateRegion.from_points(pts, {"formula": f"mac-{which}", "I1": a, "I2": b, "Isum": s,
                                        "channel_digest": ch.digest()})


def compute_region(formula: str, ch: Channel, spec: GridSpec, workers: int | None = None):
    """Dispatch on a formula tag; BCC tags return a :class:`TripleRegion`."""
    table = {
        "wiretap": wiretap_ce_region,
        "le": lai_elgamal_region,
        "c": region_c,
        "ctilde": region_ctilde,
        "deaf": deaf_helper_region,
        "bcc": bcc_region,
        "bcc-helper": bcc_helper_region,
    }
    try:
        fn = table[formula]
    except KeyError:
        raise ValueError(f"unknown formula {formula!r}; choose from {', '.join(FORMULAS)}") from None
    return fn(ch, spec, workers=workers)
