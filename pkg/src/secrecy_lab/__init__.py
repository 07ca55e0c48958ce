"""Rate-equivocation regions, secrecy checks and coding simulations for the
wire-tap channel with a helping interferer."""

__version__ = "0.1.0"

from .channel import Channel, ChannelError, bsc, bsc_pair, from_marginals, load_channel, random_channel
from .info import AuxChain, InformationError, Measures, cmi, compose_joint, entropy
from .search import GridSpec, GridTooLarge, enumerate_aux_chains, simplex_grid
from .hull import hull2d
from .regions import (
    RateRegion,
    TripleRegion,
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
from .prop2 import Prop2Verdict, brute_force_effective, check_prop2
from .coding import SimConfig, SimReport, build_codebook, encode, exact_equivocation, run_experiment
from .estimators import RateRegionEstimator

__all__ = [
    "AuxChain", "Channel", "ChannelError", "GridSpec", "GridTooLarge", "InformationError",
    "Measures", "Prop2Verdict", "RateRegion", "RateRegionEstimator", "SimConfig", "SimReport",
    "TripleRegion", "bcc_helper_region", "bcc_region", "brute_force_effective", "bsc", "bsc_pair",
    "build_codebook", "check_prop2", "cmi", "compose_joint", "compute_region",
    "deaf_helper_region", "deaf_ps_rate", "encode", "entropy", "enumerate_aux_chains",
    "exact_equivocation", "from_marginals", "hull2d", "lai_elgamal_region", "load_channel",
    "mac_pentagon", "per_pi_bounds_c", "ps_rate_ctilde", "ps_rate_le", "random_channel",
    "region_c", "region_ca", "region_cb", "region_ctilde", "run_experiment", "simplex_grid",
    "wiretap_ce_region",
]
