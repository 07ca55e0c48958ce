"""Command-line entry point: ``secrecy-lab <subcommand> ...``.

Subcommands
-----------
region     hull of one formula over a grid, as CSV plus a meta JSON
compare    containment verdict between two formulas on the same grid
prop2      closed-form check of when the noise-treating scheme helps
simulate   desk-scale coding simulation, JSON report
plotdata   MAC pentagons and single-law regions as gnuplot-style blocks

Exit codes: 0 success, 2 bad input, 3 an enumeration guard tripped.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .channel import Channel, ChannelError, load_channel
from .coding import EnumerationGuard, config_from_dict, run_experiment
from .hull import max_violation
from .info import AuxChain, InformationError
from .prop2 import check_prop2
from .regions import FORMULAS, TripleRegion, compute_region, mac_pentagon, region_ca, region_cb
from .search import DEFAULT_MAX_CHAINS, GridSpec, GridTooLarge

log = logging.getLogger("secrecy_lab")

EXIT_OK, EXIT_INPUT, EXIT_GUARD = 0, 2, 3


class InputError(Exception):
    """Bad flags or input files (exit code 2)."""


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def manifest(subcommand: str, ch: Channel | None, grid: dict | None = None,
             seed: int | None = None, extra: dict | None = None) -> dict:
    """Run manifest without timing; ``digest`` hashes every other field."""
    doc = {"subcommand": subcommand, "channel_digest": ch.digest() if ch is not None else None,
           "grid": grid, "seed": seed, "version": __version__}
    if extra:
        doc.update(extra)
    doc["digest"] = hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()
    return doc


def _write_manifest(out: Path, doc: dict, started: float) -> None:
    timed = dict(doc, duration_s=round(time.perf_counter() - started, 6))
    (out / "manifest.json").write_text(_dumps(timed))


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str, what: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} file {path} is not valid JSON: {exc}") from None


def _grid(args) -> GridSpec:
    return GridSpec(steps=args.steps, q1_size=args.q1, u1_size=args.u1, u2_size=args.u2,
                    refine_rounds=args.refine_rounds, input_maps=args.input_maps,
                    max_chains=args.max_chains)


def _aux(args, ch: Channel) -> AuxChain:
    if args.aux:
        return AuxChain.from_dict(_load_json(args.aux, "auxiliary law"))
    px1 = np.full(ch.x1_size, 1.0 / ch.x1_size)
    px2 = np.full(ch.x2_size, 1.0 / ch.x2_size)
    return AuxChain.from_inputs(px1, px2)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def region_csv(region, digest: str) -> str:
    lines = [f"# manifest: {digest}"]
    if isinstance(region, TripleRegion):
        lines.append("r1,re,r0")
        for r0 in sorted(region.slices):
            for r1, re in region.slices[r0].hull:
                lines.append(f"{_fmt(r1)},{_fmt(re)},{_fmt(r0)}")
    else:
        lines.append("r1,re")
        lines += [f"{_fmt(r1)},{_fmt(re)}" for r1, re in region.hull]
    return "\n".join(lines) + "\n"


def cmd_region(args) -> int:
    started = time.perf_counter()
    ch = load_channel(args.channel)
    spec = _grid(args)
    region = compute_region(args.formula, ch, spec, workers=args.workers)
    man = manifest("region", ch, spec.resolve(ch).to_dict(), extra={"formula": args.formula})
    csv = region_csv(region, man["digest"])
    if not args.out:
        sys.stdout.write(csv)
        return EXIT_OK
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"region_{args.formula}"
    (out / f"{stem}.csv").write_text(csv)
    meta = {"manifest": man["digest"], "formula": args.formula, "channel_digest": man["channel_digest"],
            "chains": region.meta.get("chains"), "conjectured": bool(region.meta.get("conjectured", False))}
    if not isinstance(region, TripleRegion):
        meta.update(max_diagonal=region.max_diagonal(), max_r1=region.max_r1(),
                    max_re=region.max_re(), vertices=len(region.hull))
    (out / f"{stem}.meta.json").write_text(_dumps(meta))
    _write_manifest(out, man, started)
    return EXIT_OK


def cmd_compare(args) -> int:
    ch = load_channel(args.channel)
    spec = _grid(args)
    if "bcc" in args.a or "bcc" in args.b:
        raise InputError("compare works on (R1, Re) formulas only")
    ra = compute_region(args.a, ch, spec, workers=args.workers)
    rb = compute_region(args.b, ch, spec, workers=args.workers)
    a_out = max_violation(ra.hull, rb.hull)
    b_out = max_violation(rb.hull, ra.hull)
    a_in_b, b_in_a = a_out <= args.tol, b_out <= args.tol
    relation = ("equal" if a_in_b and b_in_a else "subset" if a_in_b
                else "superset" if b_in_a else "incomparable")
    man = manifest("compare", ch, spec.resolve(ch).to_dict(), extra={"a": args.a, "b": args.b})
    doc = {"a": args.a, "b": args.b, "relation": relation, "subset": a_in_b, "superset": b_in_a,
           "max_violation_a_outside_b": a_out, "max_violation_b_outside_a": b_out,
           "tol": args.tol, "manifest": man["digest"]}
    _emit(_dumps(doc), args.out)
    return EXIT_OK


def cmd_prop2(args) -> int:
    ch = load_channel(args.channel)
    aux = _aux(args, ch)
    verdict = check_prop2(aux, ch, with_oracle=args.oracle)
    man = manifest("prop2", ch, extra={"aux": aux.to_dict()})
    _emit(_dumps(dict(verdict.to_dict(), manifest=man["digest"])), args.out)
    return EXIT_OK


_SIM_FLAGS = ("r10", "r11", "r2", "r", "n", "trials", "seed", "decoder", "epsilon",
              "scheme", "codebooks", "equivocation", "mc_samples")


def cmd_simulate(args) -> int:
    ch = load_channel(args.channel)
    doc = _load_json(args.config, "simulation config") if args.config else {}
    if not isinstance(doc, dict):
        raise InputError("simulation config must be a JSON object")
    for name in _SIM_FLAGS:
        v = getattr(args, name)
        if v is not None:
            doc[name] = v
    cfg = config_from_dict(doc, ch)
    report = run_experiment(cfg)
    man = manifest("simulate", ch, seed=cfg.seed,
                   extra={"config": {k: (np.asarray(v).tolist() if k.startswith("pmf") else v)
                                     for k, v in doc.items()}})
    _emit(_dumps(dict(report.to_dict(), manifest=man["digest"])), args.out)
    return EXIT_OK


def _series(name: str, pts) -> list[str]:
    pts = np.asarray(pts, dtype=float)
    lines = [f"# series: {name}"]
    lines += [f"{_fmt(a)} {_fmt(b)}" for a, b in pts]
    if len(pts) > 2:
        lines.append(f"{_fmt(pts[0, 0])} {_fmt(pts[0, 1])}")  # close the polygon
    return lines


def cmd_plotdata(args) -> int:
    ch = load_channel(args.channel)
    aux = _aux(args, ch)
    joint = aux.pmf_u1_given_q1.T @ aux.pmf_q1
    px1 = joint @ aux.pmf_x1_given_u1
    px2 = aux.pmf_u2 @ aux.pmf_x2_given_u2
    man = manifest("plotdata", ch, extra={"aux": aux.to_dict()})
    blocks = [
        _series("mac-receiver", mac_pentagon(ch, (px1, px2), which="receiver").hull),
        _series("mac-eavesdropper", mac_pentagon(ch, (px1, px2), which="eavesdropper").hull),
        _series("coop-A", region_ca(aux, ch).hull),
        _series("coop-B", region_cb(aux, ch).hull),
    ]
    text = f"# manifest: {man['digest']}\n" + "\n\n".join("\n".join(b) for b in blocks) + "\n"
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _grid_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--steps", type=int, default=4, help="simplex grid resolution (default 4)")
    p.add_argument("--q1", type=int, default=None, help="|Q1| (default |X1|)")
    p.add_argument("--u1", type=int, default=None, help="|U1| (default |X1|)")
    p.add_argument("--u2", type=int, default=None, help="|U2| (default |X2|)")
    p.add_argument("--input-maps", choices=("deterministic", "stochastic"), default="deterministic")
    p.add_argument("--refine-rounds", type=int, default=0)
    p.add_argument("--max-chains", type=int, default=DEFAULT_MAX_CHAINS)
    p.add_argument("--workers", type=int, default=None,
                   help="threads for the sweep (default: SECRECY_LAB_THREADS or logical cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secrecy-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("region", help="compute a rate-equivocation hull")
    p.add_argument("--channel", required=True)
    p.add_argument("--formula", required=True, choices=FORMULAS)
    p.add_argument("--out", default=None, help="output directory (default: CSV to stdout)")
    _grid_flags(p)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("compare", help="containment between two formulas")
    p.add_argument("--channel", required=True)
    p.add_argument("--a", required=True, choices=FORMULAS)
    p.add_argument("--b", required=True, choices=FORMULAS)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", default=None)
    _grid_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("prop2", help="check when treating the helper as noise helps")
    p.add_argument("--channel", required=True)
    p.add_argument("--aux", default=None, help="auxiliary law JSON (default: uniform inputs)")
    p.add_argument("--oracle", action="store_true", help="also compare hulls directly")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_prop2)

    p = sub.add_parser("simulate", help="desk-scale coding simulation")
    p.add_argument("--channel", required=True)
    p.add_argument("--config", default=None, help="JSON with input pmfs and any of the flags below")
    for name, typ in (("r10", float), ("r11", float), ("r2", float), ("r", float),
                      ("n", int), ("trials", int), ("seed", int), ("epsilon", float),
                      ("codebooks", int), ("mc-samples", int)):
        p.add_argument(f"--{name}", type=typ, default=None)
    p.add_argument("--decoder", choices=("max_likelihood", "joint_typicality"), default=None)
    p.add_argument("--scheme", choices=("scheme1", "scheme2", "noise_forwarding"), default=None)
    p.add_argument("--equivocation", choices=("exact", "monte_carlo"), default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plotdata", help="MAC pentagons and single-law regions as .dat blocks")
    p.add_argument("--channel", required=True)
    p.add_argument("--aux", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (GridTooLarge, EnumerationGuard) as exc:
        print(f"secrecy-lab: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InputError, ChannelError, InformationError, ValueError, KeyError, TypeError) as exc:
        print(f"secrecy-lab: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
