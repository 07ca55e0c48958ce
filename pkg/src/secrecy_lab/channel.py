"""Finite discrete memoryless channels with a receiver, an eavesdropper and
an optional helper-side observation.

The transition law is stored as a tensor ``p[x1, x2, y, z]`` or, when the
helper observes the first sender, ``p[x1, x2, y, z, y1]``.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

logger = logging.getLogger(__name__)

ROW_SUM_TOL = 1e-9


class ChannelError(ValueError):
    """Raised for malformed or inconsistent channel descriptions."""


@dataclass(frozen=True)
class Channel:
    """Conditional PMF P(y, z[, y1] | x1, x2) over finite alphabets.

    ``x2_size == 1`` encodes "no helper" and ``y1_size == 0`` means the
    helper does not observe anything.
    """

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64)
        if p.ndim not in (4, 5):
            raise ChannelError(
                f"channel tensor must have 4 or 5 axes (x1, x2, y, z[, y1]), got {p.ndim}")
        if min(p.shape) < 1:
            raise ChannelError(f"all alphabet sizes must be >= 1, got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ChannelError("channel tensor contains non-finite entries")
        if np.any(p < 0):
            idx = tuple(int(i) for i in np.argwhere(p < 0)[0])
            raise ChannelError(f"negative probability {p[idx]!r} at index {idx}")

        sums = p.reshape(p.shape[0], p.shape[1], -1).sum(axis=2)
        for x1, x2 in np.ndindex(*sums.shape):
            s = sums[x1, x2]
            if abs(s - 1.0) > ROW_SUM_TOL:
                raise ChannelError(
                    f"output distribution for (x1={x1}, x2={x2}) sums to {s!r}, expected 1")
        if np.any(sums != 1.0):
            logger.info("renormalizing channel rows (max deviation %.3g)",
                        float(np.max(np.abs(sums - 1.0))))
            p = p / sums.reshape(sums.shape + (1,) * (p.ndim - 2))
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def x1_size(self) -> int:
        return self.p.shape[0]

    @property
    def x2_size(self) -> int:
        return self.p.shape[1]

    @property
    def y_size(self) -> int:
        return self.p.shape[2]

    @property
    def z_size(self) -> int:
        return self.p.shape[3]

    @property
    def y1_size(self) -> int:
        return self.p.shape[4] if self.p.ndim == 5 else 0

    @property
    def has_helper(self) -> bool:
        return self.x2_size > 1

    @property
    def p_yz(self) -> np.ndarray:
        """P(y, z | x1, x2) with any helper observation summed out."""
        return self.p.sum(axis=4) if self.p.ndim == 5 else self.p

    def digest(self) -> str:
        """SHA-256 over the alphabet sizes and the float64 tensor bytes."""
        h = hashlib.sha256()
        h.update(json.dumps(self.sizes()).encode())
        h.update(np.ascontiguousarray(self.p, dtype="<f8").tobytes())
        return h.hexdigest()

    def sizes(self) -> dict[str, int]:
        return {"x1_size": self.x1_size, "x2_size": self.x2_size,
                "y_size": self.y_size, "z_size": self.z_size,
                "y1_size": self.y1_size}

    def __eq__(self, other):
        if not isinstance(other, Channel):
            return NotImplemented
        return self.p.shape == other.p.shape and bool(np.array_equal(self.p, other.p))

    def __hash__(self):
        return hash(self.digest())


@dataclass(frozen=True)
class ChannelSlice:
    """Marginal conditional laws of a channel."""

    p_y: np.ndarray   # P(y | x1, x2)
    p_z: np.ndarray   # P(z | x1, x2)
    p_y1: np.ndarray | None = None   # P(y1 | x1, x2)


def marginals(ch: Channel) -> ChannelSlice:
    p = ch.p
    if p.ndim == 5:
        return ChannelSlice(p_y=p.sum(axis=(3, 4)), p_z=p.sum(axis=(2, 4)),
                            p_y1=p.sum(axis=(2, 3)))
    return ChannelSlice(p_y=p.sum(axis=3), p_z=p.sum(axis=2))


def _nested_shape(obj: Any) -> tuple[int, ...]:
    shape = []
    while isinstance(obj, list):
        shape.append(len(obj))
        if not obj:
            break
        obj = obj[0]
    return tuple(shape)


def channel_from_dict(doc: dict) -> Channel:
    if not isinstance(doc, dict):
        raise ChannelError("channel document must be a JSON object")
    required = ("x1_size", "x2_size", "y_size", "z_size", "p")
    missing = [k for k in required if k not in doc]
    if missing:
        raise ChannelError(f"channel document is missing keys: {', '.join(missing)}")
    sizes = []
    for key in ("x1_size", "x2_size", "y_size", "z_size"):
        v = doc[key]
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ChannelError(f"{key} must be a positive integer, got {v!r}")
        sizes.append(v)
    y1 = doc.get("y1_size", 0)
    if isinstance(y1, bool) or not isinstance(y1, int) or y1 < 0:
        raise ChannelError(f"y1_size must be a nonnegative integer, got {y1!r}")
    if y1:
        sizes.append(y1)
    expected = tuple(sizes)

    try:
        p = np.array(doc["p"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ChannelError(f"channel tensor is ragged or non-numeric: {exc}") from None
    if p.shape != expected:
        got = p.shape if p.dtype != object else _nested_shape(doc["p"])
        raise ChannelError(f"dimension mismatch: declared sizes {expected}, tensor has shape {got}")
    return Channel(p)


def parse_channel(text: str | bytes) -> Channel:
    """Parse a channel JSON document.

    Raises
    ------
    ChannelError
        On malformed JSON, missing keys, shape mismatches or rows that do
        not sum to one.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelError(f"malformed channel document: {exc}") from None
    return channel_from_dict(doc)


def load_channel(path) -> Channel:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ChannelError(f"cannot read channel file {path}: {exc.strerror}") from None
    return parse_channel(data)


def channel_to_dict(ch: Channel) -> dict:
    doc: dict[str, Any] = {k: v for k, v in ch.sizes().items() if k != "y1_size"}
    if ch.y1_size:
        doc["y1_size"] = ch.y1_size
    doc["p"] = ch.p.tolist()
    return doc


def serialize_channel(ch: Channel) -> str:
    # repr-based float output from json round-trips float64 exactly
    return json.dumps(channel_to_dict(ch))


# ---------------------------------------------------------------------------
# constructors for common test channels
# ---------------------------------------------------------------------------

def bsc(p: float, n: int = 2) -> np.ndarray:
    """Symmetric channel matrix with total crossover probability ``p``."""
    if n == 1:
        return np.ones((1, 1))
    m = np.full((n, n), p / (n - 1))
    np.fill_diagonal(m, 1.0 - p)
    return m


def from_marginals(p_y: np.ndarray, p_z: np.ndarray, p_y1: np.ndarray | None = None) -> Channel:
    """Channel whose outputs are conditionally independent given the inputs.

    Each argument is indexed ``[x1, x2, out]``; 2-D arrays are read as
    helper-free ``[x1, out]`` matrices.
    """
    mats = [np.asarray(m, dtype=float) for m in (p_y, p_z) + ((p_y1,) if p_y1 is not None else ())]
    mats = [m[:, None, :] if m.ndim == 2 else m for m in mats]
    if p_y1 is None:
        p = np.einsum("abi,abj->abij", *mats)
    else:
        p = np.einsum("abi,abj,abk->abijk", *mats)
    return Channel(p)


def bsc_pair(p1: float, p2: float) -> Channel:
    """Helper-free binary channel: Y = BSC(p1)(X1), Z = BSC(p2)(X1), independent noises."""
    return from_marginals(bsc(p1), bsc(p2))


def random_channel(rng: np.random.Generator, x1_size=2, x2_size=2, y_size=2, z_size=2,
                   y1_size=0, alpha: float = 1.0) -> Channel:
    """Channel with every output row drawn from a symmetric Dirichlet law."""
    out = y_size * z_size * max(y1_size, 1)
    rows = rng.dirichlet(np.full(out, alpha), size=(x1_size, x2_size))
    shape = (x1_size, x2_size, y_size, z_size) + ((y1_size,) if y1_size else ())
    return Channel(rows.reshape(shape))
