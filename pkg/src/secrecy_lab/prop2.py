"""When does treating the helper as noise (scheme B) enlarge scheme A's region?

:func:`check_prop2` evaluates the closed-form conditions on six mutual
informations; :func:`brute_force_effective` builds both single-law regions
and compares hulls directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import Channel
from .hull import max_violation
from .info import AuxChain, Measures, compose_joint
from .regions import region_ca, region_cb

TOL = 1e-9

WITNESS_TERMS = {
    "I(U1;Y|Q1)": "U1;Y|Q1",
    "I(U1;Z|Q1)": "U1;Z|Q1",
    "I(U2;Y|Q1)": "U2;Y|Q1",
    "I(U2;Z|Q1)": "U2;Z|Q1",
    "I(U2;Y|U1)": "U2;Y|U1",
    "I(U2;Z|U1)": "U2;Z|U1",
}


@dataclass(frozen=True)
class Prop2Verdict:
    case1: bool
    case2: bool
    witness: dict
    marginal: bool = False
    oracle_effective: bool | None = None
    gaps: dict = field(default_factory=dict)

    @property
    def effective(self) -> bool:
        return self.case1 or self.case2

    def to_dict(self) -> dict:
        return {"case1": self.case1, "case2": self.case2, "effective": self.effective,
                "marginal": self.marginal, "oracle_effective": self.oracle_effective,
                "witness": self.witness, "gaps": self.gaps}


def witness_terms(aux: AuxChain, ch: Channel) -> dict:
    m = Measures(compose_joint(aux, ch, with_y1=False))
    return {name: float(m.I(expr)) for name, expr in WITNESS_TERMS.items()}


def check_prop2(aux: AuxChain, ch: Channel, with_oracle: bool = False) -> Prop2Verdict:
    """Evaluate conditions (i) and (ii) for one auxiliary law.

    The strict inequality I(U1;Y|Q1) > I(U1;Z|Q1) needs a margin above
    ``1e-9``; the non-strict comparisons accept a ``1e-9`` slack.  A helper
    whose U2 terms all vanish is never effective.  When any
    comparison lies within ``1e-9`` of equality the verdict is flagged
    ``marginal``.
    """
    w = witness_terms(aux, ch)
    secrecy = w["I(U1;Y|Q1)"] - w["I(U1;Z|Q1)"]
    dq = w["I(U2;Z|Q1)"] - w["I(U2;Y|Q1)"]          # Z-advantage of the helper given Q1
    du = w["I(U2;Z|U1)"] - w["I(U2;Y|U1)"]          # Z-advantage of the helper given U1
    y_gap = w["I(U2;Y|U1)"] - w["I(U2;Y|Q1)"]

    # an idle helper (every U2 term zero) leaves both schemes with the same
    # equivocation cap; the non-strict chains would otherwise pass as 0 <= 0
    idle = all(abs(w[k]) <= TOL for k in WITNESS_TERMS if "U2" in k)
    strict = secrecy > TOL and not idle
    case1 = strict and dq >= -TOL and du - dq >= -TOL
    case2 = strict and -dq >= -TOL and y_gap >= -TOL and du >= -TOL

    gaps = {"secrecy": secrecy, "dq": dq, "du": du, "du-dq": du - dq, "y_gap": y_gap}
    marginal = any(abs(g) <= TOL for g in gaps.values())
    oracle = brute_force_effective(aux, ch) if with_oracle else None
    return Prop2Verdict(case1=case1, case2=case2, witness=w, marginal=marginal,
                        oracle_effective=oracle, gaps=gaps)


def brute_force_effective(aux: AuxChain, ch: Channel, tol: float = TOL) -> bool:
    """True iff some vertex of scheme B's region lies outside scheme A's hull by more than ``tol``."""
    a = region_ca(aux, ch)
    b = region_cb(aux, ch)
    return max_violation(b.hull, a.hull) > tol


def equivocation_gain(aux: AuxChain, ch: Channel) -> float:
    """Excess of scheme B's equivocation cap over scheme A's, at equal rate caps.

    Positive exactly when some rate R1 admitted by both schemes supports a
    larger equivocation under scheme B.
    """
    a = region_ca(aux, ch)
    b = region_cb(aux, ch)
    r = min(a.max_r1(), b.max_r1())
    def top(reg):
        h = reg.hull
        return float(np.max(np.minimum(h[:, 1], r)))
    return top(b) - top(a)
