"""Desk-scale simulation of the random-coding schemes for the helper wire-tap channel.

The simulator works at the level of (Q1, X1, X2): any prefix channels
P(x1|u1), P(x2|u2) must already be folded into the channel.  Codebook sizes
are powers of two, ``2**ceil(N * rate)``, so that the stochastic-encoder
partition of the randomization index set is exact; realized rates are
reported back and used for every theoretical comparison.

Message bookkeeping for sender 1 (all indices 0-based)::

    w1  = (w10, w11)          w10 selects the common codeword q(i), i = w10
    b   = (w, l)              x1(i, b) with b = w * |L| + l
    w11 = (w, j)              if R11 > R'   (l drawn uniformly from cell j of L)
    w11 = w                   if R11 <= R'  (l drawn uniformly from L)
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import stats

from .channel import Channel
from .info import AuxChain, Measures, compose_joint
from .regions import _bounds_cb, per_pi_bounds_c

DECODERS = ("max_likelihood", "joint_typicality")
SCHEMES = ("scheme1", "scheme2", "noise_forwarding")
ENUM_GUARD = 2 ** 24
RATE_TOL = 1e-9


class EnumerationGuard(RuntimeError):
    """Exact equivocation would enumerate more than ``ENUM_GUARD`` output sequences."""


def _bits(n: int, rate: float) -> int:
    return max(0, math.ceil(n * rate - RATE_TOL))


@dataclass(frozen=True)
class SimConfig:
    """Everything that determines a simulation run.

    ``r`` is the rate of the sender-1 codebook index ``b`` (message plus
    local randomness); it defaults to ``r11``.  Trials are spread evenly
    over ``codebooks`` independently drawn codebooks.
    """

    channel: Channel
    pmf_q1: np.ndarray
    pmf_x1_given_q1: np.ndarray
    pmf_x2: np.ndarray
    r10: float = 0.0
    r11: float = 0.0
    r2: float = 0.0
    n: int = 8
    trials: int = 1000
    seed: int = 0
    r: float | None = None
    decoder: str = "max_likelihood"
    epsilon: float = 0.2
    scheme: str = "scheme1"
    codebooks: int = 1
    equivocation: str = "exact"
    mc_samples: int = 4000

    def __post_init__(self):
        for name in ("pmf_q1", "pmf_x1_given_q1", "pmf_x2"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        ch = self.channel
        if self.pmf_x1_given_q1.shape != (len(self.pmf_q1), ch.x1_size):
            raise ValueError("pmf_x1_given_q1 must have shape (|Q1|, |X1|)")
        if self.pmf_x2.shape != (ch.x2_size,):
            raise ValueError("pmf_x2 must have |X2| entries")
        # validates the stochastic rows
        AuxChain(self.pmf_q1, self.pmf_x1_given_q1, self.pmf_x2,
                 np.eye(ch.x1_size), np.eye(ch.x2_size))
        if self.n < 1:
            raise ValueError("blocklength must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 1 <= self.codebooks <= self.trials:
            raise ValueError("codebooks must lie in [1, trials]")
        for name in ("r10", "r11", "r2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.r is not None and self.r11 > self.r + RATE_TOL:
            raise ValueError(f"infeasible split: r11={self.r11} exceeds codebook rate r={self.r}")
        if self.decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.equivocation not in ("exact", "monte_carlo"):
            raise ValueError("equivocation must be 'exact' or 'monte_carlo'")

    @property
    def codebook_rate(self) -> float:
        return self.r11 if self.r is None else self.r

    def aux(self) -> AuxChain:
        """The input law as an auxiliary chain with U1 = X1, U2 = X2."""
        ch = self.channel
        return AuxChain(self.pmf_q1, self.pmf_x1_given_q1, self.pmf_x2,
                        np.eye(ch.x1_size), np.eye(ch.x2_size))


def input_terms(cfg: SimConfig) -> dict:
    """Mutual informations of the (Q1, X1, X2) input law that set R'."""
    m = Measures(compose_joint(cfg.aux(), cfg.channel, with_y1=False))
    return {
        "I(X1;Y|X2,Q1)": float(m.I("U1;Y|U2,Q1")),
        "I(X1;Z|X2,Q1)": float(m.I("U1;Z|U2,Q1")),
        "I(X1,X2;Z|Q1)": float(m.I("U1,U2;Z|Q1")),
        "I(X1;Z|Q1)": float(m.I("U1;Z|Q1")),
        "I(X2;Y|Q1)": float(m.I("U2;Y|Q1")),
        "I(X2;Z|Q1)": float(m.I("U2;Z|Q1")),
        "I(X2;Z|X1)": float(m.I("U2;Z|U1")),
    }


def operating_case(terms: dict) -> int:
    """1 if I(X1;Y|X2Q1) <= I(X1;Z|X2Q1), else 2."""
    return 1 if terms["I(X1;Y|X2,Q1)"] <= terms["I(X1;Z|X2,Q1)"] else 2


def r_prime_target(cfg: SimConfig, r: float, r2: float, terms: dict) -> float:
    """Rate of the index part that exceeds the eavesdropper's decoding ability."""
    if cfg.scheme == "scheme2":
        return max(r - terms["I(X1;Z|X2,Q1)"], 0.0)
    if cfg.scheme == "noise_forwarding":
        return max(r - terms["I(X1;Z|Q1)"], 0.0)
    if operating_case(terms) == 2 and terms["I(X2;Y|Q1)"] >= terms["I(X2;Z|Q1)"]:
        helper = min(terms["I(X2;Y|Q1)"], terms["I(X2;Z|X1)"])
    else:
        helper = r2
    return max(r + helper - terms["I(X1,X2;Z|Q1)"], 0.0)


@dataclass(frozen=True)
class Codebook:
    """A realized random codebook with its index bookkeeping."""

    cfg: SimConfig
    q: np.ndarray        # (M10, N)
    x1: np.ndarray       # (M10, MB, N)
    x2: np.ndarray       # (M2, N)
    b10: int
    b11: int
    b2: int
    br: int
    bw: int
    r_prime_target: float
    case: int
    terms: dict = field(repr=False, default_factory=dict)

    @property
    def n(self) -> int:
        return self.q.shape[1]

    @property
    def m10(self) -> int:
        return 1 << self.b10

    @property
    def m11(self) -> int:
        return 1 << self.b11

    @property
    def m2(self) -> int:
        return 1 << self.b2

    @property
    def mb(self) -> int:
        return 1 << self.br

    @property
    def split(self) -> bool:
        """True in the R11 > R' regime (w11 = (w, j), l drawn from cell j)."""
        return self.b11 > self.bw

    @property
    def l_size(self) -> int:
        return 1 << (self.br - self.bw)

    @property
    def j_size(self) -> int:
        return 1 << (self.b11 - self.bw) if self.split else 1

    @property
    def cell_size(self) -> int:
        return 1 << (self.br - self.b11) if self.split else self.l_size

    @property
    def realized(self) -> dict:
        n = self.n
        return {"r10": self.b10 / n, "r11": self.b11 / n, "r2": self.b2 / n,
                "r": self.br / n, "r_prime": self.bw / n}

    @property
    def zero_secrecy(self) -> bool:
        return self.r_prime_target <= 0

    def cells(self) -> list[np.ndarray]:
        """The partition of L into |J| consecutive cells."""
        return [np.arange(j * self.cell_size, (j + 1) * self.cell_size) for j in range(self.j_size)]

    def g(self, l):
        """Cell index of ``l``."""
        return np.asarray(l) // self.cell_size

    def l_choices(self, w11: int) -> np.ndarray:
        if self.split:
            j = w11 % self.j_size
            return np.arange(j * self.cell_size, (j + 1) * self.cell_size)
        return np.arange(self.l_size)

    def index_of(self, w11: int, l: int) -> int:
        w = w11 // self.j_size if self.split else w11
        return w * self.l_size + l

    def message_of(self, b):
        """Reconstruct w11 from the codebook index b."""
        b = np.asarray(b)
        w, l = b // self.l_size, b % self.l_size
        return w * self.j_size + self.g(l) if self.split else w

    def used_indices(self) -> np.ndarray:
        """Codebook indices b that the encoder can emit."""
        if self.split:
            return np.arange(self.mb)
        return np.arange(self.m11 * self.l_size)


def _draw_rows(rng: np.random.Generator, pmf: np.ndarray, shape) -> np.ndarray:
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(shape), side="right")


def build_codebook(cfg: SimConfig, index: int = 0) -> Codebook:
    """Draw codebook number ``index`` for ``cfg`` (deterministic given the seed).

    Raises
    ------
    ValueError
        If the helper rate pushes R' above R, or r11 exceeds the codebook rate.
    EnumerationGuard
        If the decoder's candidate list would be unreasonably large.
    """
    n = cfg.n
    b10, b11, b2 = _bits(n, cfg.r10), _bits(n, cfg.r11), _bits(n, cfg.r2)
    br = _bits(n, cfg.codebook_rate)
    if b11 > br:
        raise ValueError(f"infeasible split: r11 needs {b11} bits but the codebook has {br}")
    if b10 + br + b2 > 24:
        raise EnumerationGuard(f"2^{b10 + br + b2} decoding candidates exceeds the 2^24 guard")
    terms = input_terms(cfg)
    rp = r_prime_target(cfg, br / n, b2 / n, terms)
    if rp > br / n + RATE_TOL:
        raise ValueError(f"R'={rp:.6g} exceeds R={br / n:.6g}: the helper rate "
                         f"{b2 / n:.6g} exceeds I(X1X2;Z|Q1)={terms['I(X1,X2;Z|Q1)']:.6g}")
    bw = min(br, int(math.floor(n * rp + RATE_TOL)))

    rng = np.random.default_rng([cfg.seed, 0, index])
    q = _draw_rows(rng, cfg.pmf_q1, (1 << b10, n))
    u = rng.random((1 << b10, 1 << br, n))
    cdf = np.cumsum(cfg.pmf_x1_given_q1, axis=1)
    cdf[:, -1] = 1.0
    x1 = (u[..., None] >= cdf[q][:, None, :, :]).sum(axis=-1)
    x2 = _draw_rows(rng, cfg.pmf_x2, (1 << b2, n))
    cb = Codebook(cfg=cfg, q=q, x1=x1, x2=x2, b10=b10, b11=b11, b2=b2, br=br, bw=bw,
                  r_prime_target=rp, case=operating_case(terms), terms=terms)
    assert cb.bw <= cb.br, "R' must not exceed R"
    assert cb.j_size * cb.cell_size == cb.l_size or not cb.split
    return cb


def encode(cb: Codebook, w1: tuple[int, int], rng: np.random.Generator):
    """Stochastic encoder.  Returns ``(x1_seq, x2_seq, (i, b, l, k))``."""
    w10, w11 = w1
    if not (0 <= w10 < cb.m10 and 0 <= w11 < cb.m11):
        raise ValueError(f"message {w1} out of range [0,{cb.m10}) x [0,{cb.m11})")
    choices = cb.l_choices(w11)
    l = int(choices[rng.integers(len(choices))])
    k = int(rng.integers(cb.m2))
    b = cb.index_of(w11, l)
    return cb.x1[w10, b], cb.x2[k], (w10, b, l, k)


def transmit(ch: Channel, x1: np.ndarray, x2: np.ndarray, rng: np.random.Generator):
    """Sample (y, z[, y1]) sequences from the memoryless channel."""
    flat = ch.p.reshape(ch.x1_size, ch.x2_size, -1)
    rows = flat[x1, x2]
    cdf = np.cumsum(rows, axis=1)
    cdf[:, -1] = 1.0
    idx = (rng.random(len(x1))[:, None] >= cdf).sum(axis=1)
    outs = np.unravel_index(idx, ch.p.shape[2:])
    return tuple(np.asarray(o) for o in outs)


# ---------------------------------------------------------------------------
# decoders
# ---------------------------------------------------------------------------

def _log(p):
    with np.errstate(divide="ignore"):
        return np.log2(p)


def _candidates(cb: Codebook, with_helper: bool):
    """Candidate tuples (i, b[, k]) in lexicographic order with their sequences."""
    used = cb.used_indices()
    if with_helper:
        grid = np.array(list(itertools.product(range(cb.m10), used, range(cb.m2))))
        return grid, cb.q[grid[:, 0]], cb.x1[grid[:, 0], grid[:, 1]], cb.x2[grid[:, 2]]
    grid = np.array(list(itertools.product(range(cb.m10), used)))
    return grid, cb.q[grid[:, 0]], cb.x1[grid[:, 0], grid[:, 1]], None


def _ml(loglik: np.ndarray):
    return int(np.argmax(loglik)) if np.isfinite(loglik.max()) else None


def _py_given_x1(cb: Codebook) -> np.ndarray:
    """Helper-averaged law P(y|x1) = sum_x2 P(x2) P(y|x1, x2)."""
    py = cb.cfg.channel.p_yz.sum(axis=3)
    return np.einsum("b,aby->ay", cb.cfg.pmf_x2, py)


def _typical(pmf: np.ndarray, seqs: list[np.ndarray], eps: float) -> np.ndarray:
    """Weak joint typicality of candidate sequence tuples.

    ``pmf`` is the joint law over the components; ``seqs[c]`` has shape
    (candidates, N) or (N,) (broadcast).  Every nonempty subset of the
    components must have empirical log-likelihood within ``eps`` of its
    entropy.
    """
    ncomp = pmf.ndim
    seqs = [np.atleast_2d(s) for s in seqs]
    count = max(s.shape[0] for s in seqs)
    n = seqs[0].shape[1]
    ok = np.ones(count, dtype=bool)
    for size in range(1, ncomp + 1):
        for sub in itertools.combinations(range(ncomp), size):
            drop = tuple(a for a in range(ncomp) if a not in sub)
            marg = pmf.sum(axis=drop) if drop else pmf
            h = -np.sum(np.where(marg > 0, marg * _log(np.where(marg > 0, marg, 1)), 0.0))
            lp = _log(marg)[tuple(np.broadcast_to(seqs[c], (count, n)) for c in sub)]
            emp = -lp.sum(axis=1) / n
            ok &= np.isfinite(emp) & (np.abs(emp - h) <= eps)
    return ok


def _unique(mask: np.ndarray):
    hits = np.flatnonzero(mask)
    return int(hits[0]) if len(hits) == 1 else None


def decode_receiver(cb: Codebook, y: np.ndarray, decoder: str = "max_likelihood",
                    epsilon: float = 0.2):
    """Estimate (w10, w11) after decoding (i, k) and b; ``None`` is an erasure."""
    ch = cb.cfg.channel
    py = ch.p_yz.sum(axis=3)
    if decoder == "max_likelihood":
        grid, _, x1, x2 = _candidates(cb, True)
        ll = _log(py)[x1, x2, y[None, :]].sum(axis=1)
        best = _ml(ll)
        if best is None:
            return None
        i, b = grid[best, 0], grid[best, 1]
        return int(i), int(cb.message_of(b))
    if decoder != "joint_typicality":
        raise ValueError(f"unknown decoder {decoder!r}")
    # P(q, x1, x2, y)
    joint = np.einsum("q,qa,b,aby->qaby", cb.cfg.pmf_q1, cb.cfg.pmf_x1_given_q1,
                      cb.cfg.pmf_x2, py)
    pairs = np.array(list(itertools.product(range(cb.m10), range(cb.m2))))
    hit = _unique(_typical(joint.sum(axis=1), [cb.q[pairs[:, 0]], cb.x2[pairs[:, 1]], y], epsilon))
    if hit is None:
        return None
    i, k = pairs[hit]
    used = cb.used_indices()
    mask = _typical(joint, [cb.q[i], cb.x1[i, used], cb.x2[k], y], epsilon)
    hit = _unique(mask)
    if hit is None:
        return None
    return int(i), int(cb.message_of(used[hit]))


def decode_noise_forwarding(cb: Codebook, y: np.ndarray, decoder: str = "max_likelihood",
                            epsilon: float = 0.2):
    """Decode (w10, w11) treating the helper signal as i.i.d. noise; the
    helper codeword is never estimated."""
    pya = _py_given_x1(cb)
    if decoder == "max_likelihood":
        grid, _, x1, _ = _candidates(cb, False)
        ll = _log(pya)[x1, y[None, :]].sum(axis=1)
        best = _ml(ll)
        if best is None:
            return None
        return int(grid[best, 0]), int(cb.message_of(grid[best, 1]))
    if decoder != "joint_typicality":
        raise ValueError(f"unknown decoder {decoder!r}")
    joint = np.einsum("q,qa,ay->qay", cb.cfg.pmf_q1, cb.cfg.pmf_x1_given_q1, pya)
    hit = _unique(_typical(joint.sum(axis=1), [cb.q, y], epsilon))
    if hit is None:
        return None
    used = cb.used_indices()
    hit2 = _unique(_typical(joint, [cb.q[hit], cb.x1[hit, used], y], epsilon))
    if hit2 is None:
        return None
    return hit, int(cb.message_of(used[hit2]))


# ---------------------------------------------------------------------------
# equivocation
# ---------------------------------------------------------------------------

def _codeword_law(cb: Codebook):
    """Candidate codeword pairs with message labels and prior weights."""
    grid, _, x1, x2 = _candidates(cb, True)
    i, b = grid[:, 0], grid[:, 1]
    w11 = cb.message_of(b)
    msg = i * cb.m11 + w11
    per_l = 1.0 / (cb.cell_size if cb.split else cb.l_size)
    weight = np.full(len(grid), per_l / (cb.m10 * cb.m11 * cb.m2))
    return msg, weight, x1, x2


def _cond_entropy(msg, weight, x1, x2, sym: np.ndarray, n: int, n_msgs: int,
                  groups: np.ndarray | None = None, chunk: int = 1 << 14) -> float:
    """Exact H(W | O^N [, G]) in bits for per-symbol output law ``sym[x1, x2, o]``."""
    o_size = sym.shape[-1]
    total = o_size ** n
    if total > ENUM_GUARD:
        raise EnumerationGuard(f"|O|^N = {o_size}^{n} exceeds the 2^24 enumeration guard; "
                               "use equivocation='monte_carlo'")
    if groups is None:
        groups = np.zeros(len(msg), dtype=int)
    onehot = np.zeros((len(msg), n_msgs))
    onehot[np.arange(len(msg)), msg] = 1.0
    parts = []
    for g in np.unique(groups):
        sel = groups == g
        wmat = onehot[sel] * weight[sel, None]
        for start in range(0, total, chunk):
            idx = np.arange(start, min(start + chunk, total))
            digits = np.stack(np.unravel_index(idx, (o_size,) * n), axis=1)   # (chunk, N)
            lik = np.ones((sel.sum(), len(idx)))
            for t in range(n):
                lik *= sym[x1[sel, t][:, None], x2[sel, t][:, None], digits[None, :, t]]
            joint = wmat.T @ lik                       # P(w, o)
            po = joint.sum(axis=0, keepdims=True)
            with np.errstate(divide="ignore", invalid="ignore"):
                term = np.where(joint > 0, joint * np.log2(np.where(joint > 0, joint / po, 1.0)), 0.0)
            parts.append(-term.sum())
    return float(np.sum(parts))


def exact_equivocation(cb: Codebook, cfg: SimConfig | None = None) -> float:
    """H(W1 | Z^N) / N for the realized codebook, by enumerating all z sequences."""
    ch = cb.cfg.channel
    msg, weight, x1, x2 = _codeword_law(cb)
    pz = ch.p_yz.sum(axis=2)
    h = _cond_entropy(msg, weight, x1, x2, pz, cb.n, cb.m10 * cb.m11)
    return max(h, 0.0) / cb.n


def helper_equivocation(cb: Codebook) -> float:
    """H(W1 | Y1^N, X2^N) / N: what the helper itself learns (deaf-helper metric)."""
    ch = cb.cfg.channel
    if ch.y1_size == 0:
        raise ValueError("channel has no helper observation")
    msg, weight, x1, x2 = _codeword_law(cb)
    py1 = ch.p.sum(axis=(2, 3))
    _, groups = np.unique(x2, axis=0, return_inverse=True)
    h = _cond_entropy(msg, weight, x1, x2, py1, cb.n, cb.m10 * cb.m11, groups=groups.ravel())
    return max(h, 0.0) / cb.n


def mc_equivocation(cb: Codebook, samples: int, rng: np.random.Generator) -> tuple[float, float]:
    """Monte Carlo estimate of H(W1|Z^N)/N with a 95% half-width."""
    ch = cb.cfg.channel
    msg, weight, x1, x2 = _codeword_law(cb)
    pz = ch.p_yz.sum(axis=2)
    n_msgs = cb.m10 * cb.m11
    draws = np.empty(samples)
    cum = np.cumsum(weight / weight.sum())
    for s in range(samples):
        c = min(int(np.searchsorted(cum, rng.random(), side="right")), len(cum) - 1)
        (z,) = [transmit_z(pz, x1[c], x2[c], rng)]
        lik = np.prod(pz[x1, x2, z[None, :]], axis=1) * weight
        post = np.bincount(msg, weights=lik, minlength=n_msgs)
        draws[s] = -np.log2(post[msg[c]] / post.sum())
    mean = draws.mean() / cb.n
    half = 1.96 * draws.std(ddof=1) / math.sqrt(samples) / cb.n if samples > 1 else float("inf")
    return float(mean), float(half)


def transmit_z(pz: np.ndarray, x1: np.ndarray, x2: np.ndarray, rng: np.random.Generator):
    rows = pz[x1, x2]
    cdf = np.cumsum(rows, axis=1)
    cdf[:, -1] = 1.0
    return (rng.random(len(x1))[:, None] >= cdf).sum(axis=1)


# ---------------------------------------------------------------------------
# experiment driver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimReport:
    empirical_pe: float
    pe_ci95: float
    equivocation_bits_per_symbol: float
    realized_r10: float
    realized_r11: float
    realized_r2: float
    r_prime: float
    scheme: str
    case: int
    seed: int
    realized_r: float = 0.0
    blocklength: int = 0
    trials: int = 0
    codebooks: int = 1
    decoder: str = "max_likelihood"
    errors: int = 0
    erasures: int = 0
    equivocation_mode: str = "per-codebook exact"
    equivocation_min: float = 0.0
    equivocation_ci95: float = 0.0
    zero_secrecy: bool = False
    r1_cap: float = 0.0
    re_cap: float = 0.0
    re_bound: float = 0.0
    helper_equivocation_bits_per_symbol: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _wilson_half_width(errors: int, trials: int) -> float:
    lo, hi = stats.binomtest(errors, trials).proportion_ci(0.95, method="wilson")
    return float((hi - lo) / 2)


def run_experiment(cfg: SimConfig) -> SimReport:
    """Simulate ``cfg.trials`` transmissions and measure error rate and equivocation.

    Trial ``t`` uses codebook ``t * codebooks // trials`` and its own
    generator seeded by ``(seed, 1, t)``.
    """
    ch = cfg.channel
    books = [build_codebook(cfg, c) for c in range(cfg.codebooks)]
    decode = decode_noise_forwarding if cfg.scheme == "noise_forwarding" else decode_receiver

    errors = erasures = 0
    for t in range(cfg.trials):
        cb = books[t * cfg.codebooks // cfg.trials]
        rng = np.random.default_rng([cfg.seed, 1, t])
        w1 = (int(rng.integers(cb.m10)), int(rng.integers(cb.m11)))
        x1, x2, _ = encode(cb, w1, rng)
        y = transmit(ch, x1, x2, rng)[0]
        est = decode(cb, y, cfg.decoder, cfg.epsilon)
        if est is None:
            erasures += 1
        if est != w1:
            errors += 1

    if cfg.equivocation == "exact":
        eqs = [exact_equivocation(cb) for cb in books]
        eq_ci = 0.0
        mode = "per-codebook exact"
    else:
        mc = [mc_equivocation(cb, cfg.mc_samples, np.random.default_rng([cfg.seed, 2, c]))
              for c, cb in enumerate(books)]
        eqs = [m for m, _ in mc]
        eq_ci = float(max(h for _, h in mc))
        mode = "monte carlo"
    helper_eq = None
    if ch.y1_size:
        helper_eq = float(np.mean([helper_equivocation(cb) for cb in books]))

    cb0 = books[0]
    real = cb0.realized
    aux = cfg.aux()
    if cfg.scheme == "noise_forwarding":
        m = Measures(compose_joint(aux, ch, with_y1=False))
        r1_cap, re_raw = (float(v) for v in _bounds_cb(m))
    else:
        bounds = per_pi_bounds_c(aux, ch)
        r1_cap, re_raw = bounds.r1_cap, bounds.re_cap_raw
    re_cap = min(max(re_raw, 0.0), r1_cap)
    r1_real = real["r10"] + real["r11"]
    return SimReport(
        empirical_pe=errors / cfg.trials,
        pe_ci95=_wilson_half_width(errors, cfg.trials),
        equivocation_bits_per_symbol=float(np.mean(eqs)),
        realized_r10=real["r10"], realized_r11=real["r11"], realized_r2=real["r2"],
        r_prime=real["r_prime"], scheme=cfg.scheme, case=cb0.case, seed=cfg.seed,
        realized_r=real["r"], blocklength=cfg.n, trials=cfg.trials, codebooks=cfg.codebooks,
        decoder=cfg.decoder, errors=errors, erasures=erasures, equivocation_mode=mode,
        equivocation_min=float(np.min(eqs)), equivocation_ci95=eq_ci,
        zero_secrecy=cb0.zero_secrecy, r1_cap=r1_cap, re_cap=re_cap,
        re_bound=min(r1_real, re_cap), helper_equivocation_bits_per_symbol=helper_eq,
    )


def config_from_dict(doc: dict, channel: Channel) -> SimConfig:
    """Build a :class:`SimConfig` from a JSON-style mapping (channel given separately)."""
    keys = {f for f in SimConfig.__dataclass_fields__ if f != "channel"}
    unknown = set(doc) - keys
    if unknown:
        raise ValueError(f"unknown simulation keys: {', '.join(sorted(unknown))}")
    doc = dict(doc)
    doc.setdefault("pmf_q1", [1.0])
    doc.setdefault("pmf_x1_given_q1", [[1.0 / channel.x1_size] * channel.x1_size])
    doc.setdefault("pmf_x2", [1.0 / channel.x2_size] * channel.x2_size)
    return SimConfig(channel=channel, **doc)


def with_n(cfg: SimConfig, n: int) -> SimConfig:
    return replace(cfg, n=n)
