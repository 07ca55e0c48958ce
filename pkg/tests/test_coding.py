from dataclasses import replace

import numpy as np
import pytest
from scipy import stats

from secrecy_lab.channel import Channel, bsc, from_marginals, random_channel
from secrecy_lab.coding import (
    EnumerationGuard,
    SimConfig,
    build_codebook,
    decode_noise_forwarding,
    decode_receiver,
    encode,
    exact_equivocation,
    helper_equivocation,
    input_terms,
    mc_equivocation,
    run_experiment,
    transmit,
)
from secrecy_lab.info import AuxChain
from secrecy_lab.regions import region_ca, region_cb

UNIFORM = dict(pmf_q1=[1.0], pmf_x1_given_q1=[[0.5, 0.5]], pmf_x2=[1.0])


def noiseless(z: np.ndarray) -> Channel:
    """Y = X1, Z drawn from the matrix ``z[x1, z]``; no helper."""
    return from_marginals(np.eye(2), z)


def test_zero_rates_single_codeword(noiseless_y_bsc_z):
    cb = build_codebook(SimConfig(channel=noiseless_y_bsc_z, **UNIFORM, n=5))
    assert (cb.m10, cb.m11, cb.m2, cb.mb) == (1, 1, 1, 1)
    assert cb.x1.shape == (1, 1, 5)
    assert exact_equivocation(cb) == 0.0


def test_rounding_contract(noiseless_y_bsc_z):
    cb = build_codebook(SimConfig(channel=noiseless_y_bsc_z, **UNIFORM, n=4, r11=0.5))
    assert cb.m11 == 4 and cb.realized["r11"] == 0.5
    cb = build_codebook(SimConfig(channel=noiseless_y_bsc_z, **UNIFORM, n=4, r11=0.4))
    assert cb.m11 == 4 and cb.realized["r11"] == 0.5     # 2^ceil(1.6)


def test_partition_cells_count_and_cover():
    ch = noiseless(np.eye(2))                            # Z = X1: R' = 0
    cb = build_codebook(SimConfig(channel=ch, **UNIFORM, n=4, r11=0.25, r=0.75))
    assert cb.split and cb.j_size == 2 and cb.cell_size == 4
    cells = cb.cells()
    flat = np.concatenate(cells)
    assert sorted(flat.tolist()) == list(range(cb.l_size))
    assert all(len(c) == cb.cell_size for c in cells)
    for j, c in enumerate(cells):
        assert np.all(cb.g(c) == j)


def test_message_reconstruction_inverts_encoding(rng):
    ch = noiseless(bsc(0.3))
    cb = build_codebook(SimConfig(channel=ch, **UNIFORM, n=8, r10=0.25, r11=0.5, r=0.75))
    for w10 in range(cb.m10):
        for w11 in range(cb.m11):
            x1, x2, (i, b, l, k) = encode(cb, (w10, w11), rng)
            assert i == w10 and cb.message_of(b) == w11
            np.testing.assert_array_equal(x1, cb.x1[i, b])
            np.testing.assert_array_equal(x2, cb.x2[k])


def test_single_cell_encoder_uses_all_of_l(rng):
    ch = noiseless(np.full((2, 2), 0.5))                 # blind Z: R' = R
    cb = build_codebook(SimConfig(channel=ch, **UNIFORM, n=6, r11=0.5, r=0.5))
    assert not cb.split and cb.l_size == 1
    cb = build_codebook(SimConfig(channel=noiseless(bsc(0.4)), **UNIFORM, n=6, r11=1 / 6, r=0.5))
    assert not cb.split
    ls = {encode(cb, (0, 0), rng)[2][2] for _ in range(400)}
    assert ls == set(range(cb.l_size))


def test_deterministic_encoder_when_cells_are_singletons(rng):
    ch = noiseless(np.eye(2))
    cb = build_codebook(SimConfig(channel=ch, **UNIFORM, n=4, r11=0.5, r=0.5))
    assert cb.split and cb.cell_size == 1
    first = [encode(cb, (0, w), rng)[2][1] for w in range(cb.m11)]
    again = [encode(cb, (0, w), rng)[2][1] for w in range(cb.m11)]
    assert first == again


def test_l_is_uniform_over_its_cell():
    ch = noiseless(np.eye(2))
    cb = build_codebook(SimConfig(channel=ch, **UNIFORM, n=4, r11=0.25, r=0.75))
    rng = np.random.default_rng(77)
    w11 = 1
    cell = cb.l_choices(w11)
    draws = np.array([encode(cb, (0, w11), rng)[2][2] for _ in range(10_000)])
    assert set(np.unique(draws)) <= set(cell.tolist())
    counts = np.array([(draws == l).sum() for l in cell])
    assert stats.chisquare(counts).pvalue > 0.01


def test_out_of_range_message(rng, noiseless_y_bsc_z):
    cb = build_codebook(SimConfig(channel=noiseless_y_bsc_z, **UNIFORM, n=4, r11=0.5))
    with pytest.raises(ValueError, match="out of range"):
        encode(cb, (0, cb.m11), rng)


def test_config_validation(noiseless_y_bsc_z):
    ch = noiseless_y_bsc_z
    with pytest.raises(ValueError, match="trials"):
        SimConfig(channel=ch, **UNIFORM, trials=0)
    with pytest.raises(ValueError, match="infeasible"):
        SimConfig(channel=ch, **UNIFORM, r11=0.5, r=0.25)
    with pytest.raises(ValueError):
        SimConfig(channel=ch, **UNIFORM, decoder="bp")
    with pytest.raises(ValueError):
        SimConfig(channel=ch, pmf_q1=[1.0], pmf_x1_given_q1=[[0.5, 0.6]], pmf_x2=[1.0])


def test_helper_rate_above_eavesdropper_capacity_rejected():
    # case 1 (Z hears X1 better than Y does): R' = R + R2 - I(X1X2;Z|Q1) > R
    ch = from_marginals(bsc(0.3)[:, None, :].repeat(2, 1), bsc(0.1)[:, None, :].repeat(2, 1))
    cfg = SimConfig(channel=ch, pmf_q1=[1.0], pmf_x1_given_q1=[[0.5, 0.5]], pmf_x2=[0.5, 0.5],
                    n=4, r11=0.25, r2=0.75)
    with pytest.raises(ValueError, match="exceeds"):
        build_codebook(cfg)


# -- decoding ---------------------------------------------------------------

def test_noiseless_decoding_is_error_free():
    ch = noiseless(np.eye(2))
    for seed in range(5):
        cfg = SimConfig(channel=ch, **UNIFORM, n=8, r10=0.25, r11=0.25, trials=64, seed=seed)
        cb = build_codebook(cfg)
        words = cb.x1[:, cb.used_indices()].reshape(-1, cfg.n)
        if len(np.unique(words, axis=0)) < len(words):
            continue
        assert run_experiment(cfg).empirical_pe == 0.0


def test_rate_far_above_capacity_fails():
    ch = from_marginals(bsc(0.3), np.full((2, 2), 0.5))
    cfg = SimConfig(channel=ch, **UNIFORM, n=8, r11=0.9, trials=200, codebooks=20, seed=1)
    assert run_experiment(cfg).empirical_pe >= 0.5


def test_ml_and_typicality_agree_on_noiseless(rng):
    ch = noiseless(np.eye(2))
    cfg = SimConfig(channel=ch, **UNIFORM, n=8, r10=0.25, r11=0.25, trials=1)
    cb = build_codebook(cfg)
    for _ in range(50):
        w1 = (int(rng.integers(cb.m10)), int(rng.integers(cb.m11)))
        x1, x2, _ = encode(cb, w1, rng)
        y = transmit(ch, x1, x2, rng)[0]
        ml = decode_receiver(cb, y, "max_likelihood")
        jt = decode_receiver(cb, y, "joint_typicality", 0.3)
        if jt is not None:
            assert ml == jt


def test_noise_forwarding_equals_receiver_without_helper(rng):
    ch = from_marginals(bsc(0.1), bsc(0.3))
    cfg = SimConfig(channel=ch, **UNIFORM, n=8, r11=0.25, r=0.5, trials=1)
    cb = build_codebook(cfg)
    for _ in range(50):
        y = rng.integers(2, size=8)
        assert decode_noise_forwarding(cb, y) == decode_receiver(cb, y)


def test_noise_forwarding_with_constant_helper(rng):
    ch = random_channel(rng, x2_size=2, y_size=3)
    base = dict(pmf_q1=[1.0], pmf_x1_given_q1=[[0.5, 0.5]], n=6, r11=0.5, trials=1)
    nf = build_codebook(SimConfig(channel=ch, pmf_x2=[0.0, 1.0], scheme="noise_forwarding", **base))
    # the same codebook seen by a receiver that knows x2 = 1
    known = Channel(ch.p[:, 1:2])
    rec = build_codebook(SimConfig(channel=known, pmf_x2=[1.0], **base))
    np.testing.assert_array_equal(nf.x1, rec.x1)
    for _ in range(40):
        y = rng.integers(3, size=6)
        assert decode_noise_forwarding(nf, y) == decode_receiver(rec, y)


def test_noise_forwarding_beyond_scheme_a_rate_cap():
    # Q1 = X1 carries the common message, Y is noiseless, Z is blind.  Scheme A
    # cannot send anything (its common layer must also reach Z); treating the
    # helper as noise still delivers R1 = 0.5.
    ch = from_marginals(np.eye(2)[:, None, :].repeat(2, 1), np.full((2, 2, 2), 0.5))
    aux = AuxChain([0.5, 0.5], np.eye(2), [0.5, 0.5], np.eye(2), np.eye(2))
    assert region_ca(aux, ch).max_r1() == pytest.approx(0.0, abs=1e-12)
    assert region_cb(aux, ch).max_r1() == pytest.approx(1.0)
    cfg = SimConfig(channel=ch, pmf_q1=[0.5, 0.5], pmf_x1_given_q1=np.eye(2), pmf_x2=[0.5, 0.5],
                    r10=0.5, n=8, trials=400, codebooks=40, scheme="noise_forwarding", seed=3)
    rep = run_experiment(cfg)
    assert rep.realized_r10 + rep.realized_r11 > region_ca(aux, ch).max_r1()
    assert rep.empirical_pe <= 0.1


# -- equivocation ------------------------------------------------------------

def test_blind_eavesdropper_full_equivocation():
    ch = noiseless(np.full((2, 2), 0.5))
    cfg = SimConfig(channel=ch, **UNIFORM, n=6, r10=1 / 3, r11=1 / 3, r=0.5)
    cb = build_codebook(cfg)
    assert exact_equivocation(cb) == pytest.approx(cb.realized["r10"] + cb.realized["r11"], abs=1e-12)


def test_transparent_eavesdropper_injective_codebook():
    ch = noiseless(np.eye(2))
    for seed in range(20):
        cfg = SimConfig(channel=ch, **UNIFORM, n=6, r11=0.5, seed=seed)
        cb = build_codebook(cfg)
        assert cb.l_size == 1 or cb.cell_size == 1       # no dummy randomness
        words = cb.x1[0, cb.used_indices()]
        if len(np.unique(words, axis=0)) == len(words):
            assert exact_equivocation(cb) == pytest.approx(0.0, abs=1e-12)
            return
    pytest.fail("no injective codebook drawn")


def test_monte_carlo_matches_exact(rng):
    ch = random_channel(rng, x2_size=2)
    cfg = SimConfig(channel=ch, pmf_q1=[0.5, 0.5], pmf_x1_given_q1=[[0.7, 0.3], [0.2, 0.8]],
                    pmf_x2=[0.5, 0.5], r10=0.25, r11=0.25, r=0.5, n=8)
    cb = build_codebook(cfg)
    exact = exact_equivocation(cb)
    est, half = mc_equivocation(cb, 3000, np.random.default_rng(0))
    assert abs(est - exact) <= 2 * half


def test_enumeration_guard():
    ch = noiseless(bsc(0.2))
    cb = build_codebook(SimConfig(channel=ch, **UNIFORM, n=25))
    with pytest.raises(EnumerationGuard, match="monte_carlo"):
        exact_equivocation(cb)
    rep = run_experiment(SimConfig(channel=ch, **UNIFORM, n=25, r11=0.04, trials=5,
                                   equivocation="monte_carlo", mc_samples=50))
    assert rep.equivocation_mode == "monte carlo"


def test_helper_equivocation(rng):
    base = random_channel(rng)
    ch = Channel(np.einsum("abyz,abw->abyzw", base.p_yz, rng.dirichlet([1, 1], size=(2, 2))))
    cfg = SimConfig(channel=ch, pmf_q1=[1.0], pmf_x1_given_q1=[[0.5, 0.5]], pmf_x2=[0.5, 0.5],
                    r11=0.5, n=6, trials=20)
    cb = build_codebook(cfg)
    rs = helper_equivocation(cb)
    assert 0.0 <= rs <= cb.realized["r11"] + 1e-9
    rep = run_experiment(cfg)
    assert rep.helper_equivocation_bits_per_symbol == pytest.approx(rs)


# -- schemes and reports -----------------------------------------------------

def test_r_prime_per_scheme(rng):
    ch = random_channel(rng)
    cfg = SimConfig(channel=ch, pmf_q1=[1.0], pmf_x1_given_q1=[[0.5, 0.5]], pmf_x2=[0.5, 0.5],
                    r11=0.5, n=8)
    t = input_terms(cfg)
    for scheme, want in (("scheme2", max(0.5 - t["I(X1;Z|X2,Q1)"], 0.0)),
                         ("noise_forwarding", max(0.5 - t["I(X1;Z|Q1)"], 0.0))):
        cb = build_codebook(replace(cfg, scheme=scheme))
        assert cb.r_prime_target == pytest.approx(want)
        assert cb.bw <= cb.br
    cb = build_codebook(cfg)
    assert cb.case == (1 if t["I(X1;Y|X2,Q1)"] <= t["I(X1;Z|X2,Q1)"] else 2)


def test_zero_secrecy_flag():
    ch = noiseless(np.eye(2))
    rep = run_experiment(SimConfig(channel=ch, **UNIFORM, n=6, r11=0.5, trials=10))
    assert rep.zero_secrecy and rep.r_prime == 0.0


def test_report_fields_and_determinism(noiseless_y_bsc_z):
    cfg = SimConfig(channel=noiseless_y_bsc_z, **UNIFORM, n=6, r11=0.34, trials=100, seed=9)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert a.to_json() == b.to_json()
    d = a.to_dict()
    for key in ("empirical_pe", "pe_ci95", "equivocation_bits_per_symbol", "realized_r10",
                "realized_r11", "realized_r2", "r_prime", "scheme", "case", "seed"):
        assert key in d
    assert 0.0 <= a.empirical_pe <= 1.0 and a.pe_ci95 > 0
    assert 0.0 <= a.equivocation_bits_per_symbol <= a.realized_r10 + a.realized_r11 + 1e-9


def test_error_rate_trend_in_blocklength(noiseless_y_bsc_z):
    pes = []
    for n in (4, 6, 8, 10):
        cfg = SimConfig(channel=noiseless_y_bsc_z, **UNIFORM, n=n, r11=0.4, r=0.4,
                        trials=600, codebooks=600, seed=21)
        pes.append(run_experiment(cfg).empirical_pe)
    assert stats.spearmanr([4, 6, 8, 10], pes).statistic < 0
