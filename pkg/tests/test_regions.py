import numpy as np
import pytest

from secrecy_lab.channel import Channel, bsc, bsc_pair, from_marginals, random_channel
from secrecy_lab.info import AuxChain, Measures, compose_joint
from secrecy_lab.regions import (
    RatePoint,
    RateRegion,
    bcc_helper_region,
    bcc_region,
    compute_region,
    deaf_helper_region,
    deaf_ps_rate,
    lai_elgamal_region,
    mac_pentagon,
    per_pi_bounds_c,
    ps_rate_ctilde,
    ps_rate_le,
    region_c,
    region_ca,
    region_cb,
    region_ctilde,
    wiretap_ce_region,
)
from secrecy_lab.search import GridSpec, enumerate_aux_chains

import oracles


def same_hull(a: RateRegion, b: RateRegion, tol=1e-9):
    return a.issubset(b, tol) and b.issubset(a, tol)


def test_rate_point_invariants():
    RatePoint(0.5, 0.25)
    with pytest.raises(ValueError):
        RatePoint(0.2, 0.3)
    with pytest.raises(ValueError):
        RatePoint(-0.1, 0.0)


# -- helper-free wire-tap channel -------------------------------------------

def test_wiretap_degraded_bsc(degraded_pair):
    reg = wiretap_ce_region(degraded_pair, GridSpec(steps=8))
    assert reg.max_diagonal() == pytest.approx(oracles.h2(0.2) - oracles.h2(0.1), abs=1e-9)
    assert reg.max_r1() == pytest.approx(1 - oracles.h2(0.1), abs=1e-9)
    assert reg.meta["formula"] == "wiretap" and reg.meta["chains"] > 0


def test_wiretap_identical_outputs_has_no_equivocation():
    # Z is an exact copy of Y
    ch = Channel(np.einsum("xy,yz->xyz", bsc(0.1), np.eye(2))[:, None])
    reg = wiretap_ce_region(ch, GridSpec(steps=4))
    assert reg.max_re() == pytest.approx(0.0, abs=1e-12)
    assert reg.max_r1() == pytest.approx(1 - oracles.h2(0.1), abs=1e-9)


def test_wiretap_perfect_main_channel():
    ch = from_marginals(np.eye(2), np.full((2, 2), 0.5))
    reg = wiretap_ce_region(ch, GridSpec(steps=2))
    assert reg.contains((1.0, 1.0))


def test_wiretap_rejects_helper():
    with pytest.raises(ValueError, match="helper-free"):
        wiretap_ce_region(random_channel(np.random.default_rng(0)), GridSpec(steps=2))


# -- earlier helper region ---------------------------------------------------

def test_le_without_helper_matches_wiretap_without_q(degraded_pair):
    spec = GridSpec(steps=6, q1_size=1)
    assert same_hull(lai_elgamal_region(degraded_pair, spec), wiretap_ce_region(degraded_pair, spec))


def test_le_term_by_term(rng):
    ch = random_channel(rng)
    spec = GridSpec(steps=3, q1_size=1)
    pts = []
    for aux in enumerate_aux_chains(spec, ch):
        r1, re = oracles.le_bounds(oracles.joint_dict(aux, ch))
        b = min(max(re, 0.0), r1)
        pts += [(0, 0), (r1, 0), (r1, b), (b, b)]
    assert same_hull(lai_elgamal_region(ch, spec), RateRegion.from_points(pts), tol=1e-9)


def test_le_collapse_when_helper_useless(rng):
    # I(U2;Y) <= I(U2;Z): Re bound collapses to I(U1;Y|U2) - I(U1;Z|U2)
    from secrecy_lab.regions import _bounds_le
    for _ in range(30):
        ch = random_channel(rng)
        aux = AuxChain.random(rng, ch, q1_size=1)
        m = Measures(compose_joint(aux, ch))
        if m.I("U2;Y") > m.I("U2;Z"):
            continue
        _, re = _bounds_le(m)
        assert float(re) == pytest.approx(float(m.I("U1;Y|U2") - m.I("U1;Z|U2")), abs=1e-10)


# -- improved region ---------------------------------------------------------

def test_per_pi_degenerate():
    ch = random_channel(np.random.default_rng(5))
    b = per_pi_bounds_c(AuxChain.degenerate(ch), ch)
    assert (b.r1_cap, b.re_cap) == (0.0, 0.0)
    np.testing.assert_allclose(b.vertices(), 0.0)


def test_per_pi_without_q1_matches_le(rng):
    for _ in range(20):
        ch = random_channel(rng)
        aux = AuxChain.random(rng, ch, q1_size=1)
        b = per_pi_bounds_c(aux, ch)
        r1, re = oracles.le_bounds(oracles.joint_dict(aux, ch))
        assert b.r1_cap == pytest.approx(r1, abs=1e-10)
        # same R1 cap; the Q1 form can only raise the equivocation cap
        assert b.re_cap_raw >= re - 1e-10


def test_re_cap_three_case_oracle(rng):
    for _ in range(100):
        ch = random_channel(rng, x2_size=int(rng.integers(2, 4)))
        aux = AuxChain.random(rng, ch, *rng.integers(1, 4, size=3))
        b = per_pi_bounds_c(aux, ch)
        assert b.re_cap_raw == pytest.approx(oracles.re_three_case(oracles.joint_dict(aux, ch)), abs=1e-10)
        assert 0.0 <= b.re_cap <= b.r1_cap


def test_region_c_vertices_equal_per_pi(rng):
    ch = random_channel(rng)
    spec = GridSpec(steps=2)
    pts = np.concatenate([per_pi_bounds_c(a, ch).vertices() for a in enumerate_aux_chains(spec, ch)])
    assert same_hull(region_c(ch, spec), RateRegion.from_points(pts))


def test_region_c_contains_le(rng):
    for _ in range(5):
        ch = random_channel(rng)
        spec = GridSpec(steps=3)
        assert lai_elgamal_region(ch, spec).issubset(region_c(ch, spec))


def test_region_c_without_helper_equals_wiretap(degraded_pair):
    spec = GridSpec(steps=6)
    assert same_hull(region_c(degraded_pair, spec), wiretap_ce_region(degraded_pair, spec))


def test_region_c_on_helper_free_random_channels_is_inside_wiretap(rng):
    for _ in range(5):
        ch = random_channel(rng, x2_size=1)
        spec = GridSpec(steps=4)
        assert region_c(ch, spec).issubset(wiretap_ce_region(ch, spec))


def test_identical_outputs_give_zero_equivocation():
    p = np.einsum("abi,ij->abij", random_channel(np.random.default_rng(6)).p_yz.sum(axis=3), np.eye(2))
    ch = Channel(p)
    for fn in (region_c, region_ctilde):
        assert fn(ch, GridSpec(steps=3)).max_re() == pytest.approx(0.0, abs=1e-12)


def test_ca_cb_single_law(rng):
    ch = random_channel(rng)
    aux = AuxChain.random(rng, ch)
    b = per_pi_bounds_c(aux, ch)
    assert same_hull(region_ca(aux, ch), RateRegion.from_points(b.vertices()))
    deg = AuxChain.degenerate(ch)
    for fn in (region_ca, region_cb):
        np.testing.assert_allclose(fn(deg, ch).hull, [[0.0, 0.0]])


def test_ctilde_contains_c(rng):
    for _ in range(5):
        ch = random_channel(rng)
        spec = GridSpec(steps=3)
        assert region_c(ch, spec).issubset(region_ctilde(ch, spec))


def test_ctilde_without_helper_equals_wiretap(degraded_pair):
    spec = GridSpec(steps=6)
    assert same_hull(region_ctilde(degraded_pair, spec), wiretap_ce_region(degraded_pair, spec))


def test_ctilde_degenerate():
    ch = Channel(np.ones((1, 1, 1, 1)))
    reg = region_ctilde(ch, GridSpec(steps=2))
    np.testing.assert_allclose(reg.hull, [[0.0, 0.0]])


def test_refinement_never_shrinks(degraded_pair):
    spec = GridSpec(steps=3, q1_size=1)
    plain = wiretap_ce_region(degraded_pair, spec)
    refined = wiretap_ce_region(degraded_pair, GridSpec(steps=3, q1_size=1, refine_rounds=4))
    assert plain.issubset(refined)
    assert refined.max_diagonal() >= plain.max_diagonal()


def test_workers_do_not_change_result(rng):
    ch = random_channel(rng)
    spec = GridSpec(steps=3)
    a = region_ctilde(ch, spec, workers=1)
    b = region_ctilde(ch, spec, workers=4)
    np.testing.assert_array_equal(a.hull, b.hull)


# -- perfect-secrecy rates ---------------------------------------------------

def test_ps_rates_identical_outputs_zero():
    p = np.einsum("abi,ij->abij", random_channel(np.random.default_rng(7)).p_yz.sum(axis=3), np.eye(2))
    ch = Channel(p)
    assert ps_rate_le(ch, GridSpec(steps=3)) == pytest.approx(0.0, abs=1e-12)
    assert ps_rate_ctilde(ch, GridSpec(steps=3)) == pytest.approx(0.0, abs=1e-12)


def test_ps_rates_degraded_bsc(degraded_pair):
    want = oracles.h2(0.2) - oracles.h2(0.1)
    assert ps_rate_le(degraded_pair, GridSpec(steps=4)) == pytest.approx(want, abs=1e-9)
    assert ps_rate_ctilde(degraded_pair, GridSpec(steps=4)) == pytest.approx(want, abs=1e-9)


def test_ps_rates_match_region_diagonals(rng):
    for _ in range(5):
        ch = random_channel(rng)
        spec = GridSpec(steps=3, q1_size=1)
        assert ps_rate_le(ch, spec) == pytest.approx(lai_elgamal_region(ch, spec).max_diagonal(), abs=1e-9)
        assert ps_rate_ctilde(ch, spec) == pytest.approx(region_ctilde(ch, spec).max_diagonal(), abs=1e-9)


def test_q1_layer_can_only_raise_the_diagonal(rng):
    for _ in range(5):
        ch = random_channel(rng)
        assert ps_rate_ctilde(ch, GridSpec(steps=3)) <= region_ctilde(ch, GridSpec(steps=3)).max_diagonal() + 1e-9


# -- BCC ---------------------------------------------------------------------

def test_bcc_zero_slice_equals_wiretap(degraded_pair):
    spec = GridSpec(steps=4)
    t = bcc_region(degraded_pair, spec)
    assert same_hull(t.slice_at(0.0), wiretap_ce_region(degraded_pair, spec))
    assert t.points.shape[1] == 3


def test_bcc_degenerate_q1_has_no_common_rate(degraded_pair):
    t = bcc_region(degraded_pair, GridSpec(steps=4, q1_size=1))
    assert list(t.slices) == [0.0]


def test_bcc_slices_shrink_with_r0(rng):
    ch = random_channel(rng, x2_size=1)
    t = bcc_region(ch, GridSpec(steps=3))
    levels = sorted(t.slices)
    for lo, hi in zip(levels, levels[1:]):
        assert t.slices[hi].issubset(t.slices[lo])


def test_bcc_helper_reduces_without_helper(degraded_pair):
    spec = GridSpec(steps=4)
    a, b = bcc_region(degraded_pair, spec), bcc_helper_region(degraded_pair, spec)
    assert sorted(a.slices) == pytest.approx(sorted(b.slices))
    for r0 in a.slices:
        assert same_hull(a.slice_at(r0), b.slice_at(r0))


def test_bcc_rejects_helper():
    with pytest.raises(ValueError):
        bcc_region(random_channel(np.random.default_rng(1)), GridSpec(steps=2))


# -- deaf helper -------------------------------------------------------------

def _with_y1(ch: Channel, p_y1: np.ndarray) -> Channel:
    return Channel(np.einsum("abyz,abw->abyzw", ch.p_yz, p_y1))


def test_deaf_region_flagged_and_inactive_when_y1_blind(rng):
    base = random_channel(rng)
    ch = _with_y1(base, np.full((2, 2, 2), 0.5))
    spec = GridSpec(steps=3)
    reg = deaf_helper_region(ch, spec)
    assert reg.meta["conjectured"] is True
    assert same_hull(reg, region_c(base, spec))


def test_deaf_rate_with_y1_equal_y(rng):
    base = random_channel(rng)
    p = np.einsum("abyz,yw->abyzw", base.p_yz, np.eye(2))
    ch = Channel(p)
    spec = GridSpec(steps=3, q1_size=1)
    want = 0.0
    for aux in enumerate_aux_chains(spec, ch):
        j = oracles.joint_dict(aux, base)
        r2p = min(oracles.I(j, "U2;Y"), oracles.I(j, "U2;Z|U1"))
        a = oracles.I(j, "U1;Y|U2")
        re1 = max(a - oracles.I(j, "U1;Z|U2") + r2p - oracles.I(j, "U2;Y"),
                  a + r2p - oracles.I(j, "U1,U2;Z"))
        want = max(want, min(re1, max(r2p, 0.0)))
    assert deaf_ps_rate(ch, spec) == pytest.approx(want, abs=1e-9)


def test_deaf_degenerate_and_errors(rng):
    ch = _with_y1(random_channel(rng), np.full((2, 2, 2), 0.5))
    assert deaf_ps_rate(ch, GridSpec(steps=1, q1_size=1, u1_size=1, u2_size=1)) == 0.0
    with pytest.raises(ValueError):
        deaf_helper_region(random_channel(rng), GridSpec(steps=2))


# -- MAC pentagons -----------------------------------------------------------

def test_mac_orthogonal_rectangle():
    p = np.zeros((2, 2, 4, 1))
    for a in range(2):
        for b in range(2):
            p[a, b, 2 * a + b, 0] = 1.0
    ch = Channel(p)
    u = np.array([0.5, 0.5])
    reg = mac_pentagon(ch, (u, u))
    assert set(map(tuple, np.round(reg.hull, 12).tolist())) == {(0, 0), (1, 0), (1, 1), (0, 1)}
    np.testing.assert_allclose(mac_pentagon(ch, (u, u), "eavesdropper").hull, [[0, 0]])


def test_mac_sum_rate_vertex(rng):
    ch = random_channel(rng, x1_size=3)
    px1, px2 = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(2))
    for which, out in (("receiver", "Y"), ("eavesdropper", "Z")):
        reg = mac_pentagon(ch, (px1, px2), which)
        j = oracles.joint_dict(AuxChain.from_inputs(px1, px2), ch)
        s = oracles.I(j, f"X1,X2;{out}")
        a = oracles.I(j, f"X1;{out}|X2")
        v = reg.hull[np.argmax(np.isclose(reg.hull[:, 0], a) & (reg.hull[:, 1] > 0))]
        assert v.sum() == pytest.approx(s, abs=1e-10)
    with pytest.raises(ValueError):
        mac_pentagon(ch, (px1, px2), "helper")


def test_compute_region_dispatch(degraded_pair):
    with pytest.raises(ValueError, match="unknown formula"):
        compute_region("nope", degraded_pair, GridSpec())
    assert compute_region("wiretap", degraded_pair, GridSpec(steps=2)).meta["formula"] == "wiretap"


def test_region_cb_prop2_case_one_instance():
    # found by random search over small channels: case (i) holds, and scheme B
    # reaches equivocation that scheme A cannot
    from secrecy_lab.prop2 import check_prop2
    rng = np.random.default_rng(11)
    for _ in range(2000):
        ch = random_channel(rng)
        aux = AuxChain.random(rng, ch)
        v = check_prop2(aux, ch)
        if v.case1 and not v.marginal:
            break
    else:
        pytest.fail("no case (i) instance found")
    assert not region_cb(aux, ch).issubset(region_ca(aux, ch))
