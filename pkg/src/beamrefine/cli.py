"""Command-line pipeline.

Subcommands:
  synth     draw orientations, synthesize channels, write train/holdout CSVs
  refine    run the greedy refinement on a training CSV
  validate  gap statistics of a codebook on a holdout CSV
  hier      build the hierarchical baseline and compare both codebooks
  oracle    exhaustive-search fixture for small grids
  report    convert a stored gap report between formats

All randomness flows from --seed through named substreams, one per use
(orientation sampling, scenario gains, refinement draws), so a single seed
reproduces a whole experiment and reruns are byte-identical. Angles are
degrees on the command line, radians everywhere else.

Exit codes: 0 success, 2 usage error, 3 data/schema error, 4 infeasible or
degenerate input. BEAMREFINE_LOG sets the log level.
"""

import argparse
import dataclasses
import logging
import math
import os
import sys
import zlib

import numpy as np

from ._io import write_json_atomic
from .arraymodel import ArrayConfig, Codebook
from .beamsel import brute_force_max, quantized_mrc
from .channel import (
    ChannelRealization,
    ChannelScenario,
    default_scenario,
    load_dataset,
    load_scenario,
    sample_orientations,
    save_dataset,
    save_empty_dataset,
    save_scenario,
    synth_channel,
)
from .errors import (
    BudgetExceededError,
    DegenerateChannelError,
    InvalidArgumentError,
    SchemaError,
)
from .evaluate import compare_hier, emit_cdf, emit_report, load_report, validate
from .hierarchy import build_hier
from .kernels import backend_name
from .refine import TrainingSet, argmax_coverage, coverage_check, prune, refine

log = logging.getLogger("beamrefine")


def substream_seed(root_seed: int, label: str) -> int:
    """Derive an independent child seed for one named random-consuming stage."""
    ss = np.random.SeedSequence([root_seed, zlib.crc32(label.encode("ascii"))])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclasses.dataclass
class RunConfig:
    array: ArrayConfig
    seed: int
    out: str
    threads: int
    gamma_db: float = 3.0
    train: int = 300
    holdout_count: int = 140
    scenario_path: str = None
    sector_rad: tuple = (-math.pi / 4, math.pi / 4)
    reflectors: int = 40
    levels: int = 5
    budget: int = 1 << 22
    prune: bool = False
    raw_gaps: bool = False
    noise: float = None
    train_csv: str = None
    holdout_csv: str = None
    zeta_path: str = None
    input_path: str = None
    format: str = "csv"


def _parse_array(text: str) -> int:
    parts = text.lower().split("x")
    if len(parts) != 2 or parts[0] != parts[1] or not parts[0].isdigit() or int(parts[0]) < 1:
        raise argparse.ArgumentTypeError(f"--array expects LxL (e.g. 4x4), got {text!r}")
    return int(parts[0])


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--array", type=_parse_array, default=4, metavar="LxL",
                   help="square array size, e.g. 4x4 (default)")
    p.add_argument("--bits", type=int, default=10, metavar="N",
                   help="configuration bits per antenna (default 10)")
    p.add_argument("--amp-bits", type=int, default=0, metavar="K",
                   help="bits allocated to amplitude control (default 0)")
    p.add_argument("--spacing-wl", type=float, default=0.5,
                   help="element spacing in wavelengths (default 0.5)")
    p.add_argument("--carrier-hz", type=float, default=25.1e9,
                   help="carrier frequency in Hz (default 25.1e9)")
    p.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
    p.add_argument("--out", default=".", metavar="DIR", help="output directory")
    p.add_argument("--threads", type=int, default=1,
                   help="internal data-parallel worker cap (default 1)")


def _sector_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sector-deg", type=float, nargs=2, default=[-45.0, 45.0],
                   metavar=("LO", "HI"), help="service sector in degrees (default -45 45)")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="beamrefine",
        description="Greedy beam-codebook refinement for rotating phased-array receivers",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize train/holdout channel datasets")
    _common_flags(p)
    _sector_flag(p)
    p.add_argument("--train", type=int, default=300, metavar="M",
                   help="training orientation count (default 300)")
    p.add_argument("--holdout", type=int, default=140, metavar="V",
                   help="holdout orientation count (default 140)")
    p.add_argument("--scenario", metavar="PATH",
                   help="scenario JSON; omitted = seeded default multipath scenario")
    p.add_argument("--reflectors", type=int, default=40,
                   help="reflected path count of the default scenario (default 40)")
    p.add_argument("--noise", type=float, default=None, metavar="DBM",
                   help="store this noise floor in the emitted scenario")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("refine", help="greedy codebook refinement on a training CSV")
    _common_flags(p)
    p.add_argument("--gamma-db", type=float, default=3.0,
                   help="coverage threshold in dB (default 3)")
    p.add_argument("--train-csv", metavar="PATH",
                   help="training channels (default OUT/train.csv)")
    p.add_argument("--prune", action="store_true",
                   help="greedily drop codewords that stay feasible without")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("validate", help="gap statistics of a codebook on a holdout CSV")
    _common_flags(p)
    p.add_argument("--gamma-db", type=float, default=3.0)
    p.add_argument("--zeta", metavar="PATH", help="codebook JSON (default OUT/zeta.json)")
    p.add_argument("--holdout-csv", metavar="PATH",
                   help="holdout channels (default OUT/holdout.csv)")
    p.add_argument("--raw-gaps", action="store_true",
                   help="report signed gaps against the quantized-MRC benchmark only")
    p.add_argument("--noise", type=float, default=None, metavar="DBM",
                   help="apply this noise floor to power readings")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("hier", help="hierarchical baseline comparison")
    _common_flags(p)
    _sector_flag(p)
    p.add_argument("--gamma-db", type=float, default=3.0)
    p.add_argument("--levels", type=int, default=5, help="tree depth (default 5)")
    p.add_argument("--zeta", metavar="PATH", help="codebook JSON (default OUT/zeta.json)")
    p.add_argument("--holdout-csv", metavar="PATH",
                   help="holdout channels (default OUT/holdout.csv)")
    p.add_argument("--raw-gaps", action="store_true")
    p.set_defaults(func=cmd_hier)

    p = sub.add_parser("oracle", help="exhaustive-search fixture for small grids")
    _common_flags(p)
    p.add_argument("--budget", type=int, default=1 << 22,
                   help="largest codebook cardinality the scan accepts (default 2^22)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("report", help="convert a stored gap report")
    _common_flags(p)
    p.add_argument("--in", dest="input_path", required=True, metavar="PATH",
                   help="gap report JSON")
    p.add_argument("--format", choices=["csv", "json", "cdf"], default="csv")
    p.set_defaults(func=cmd_report)

    return top


def _run_config(args) -> RunConfig:
    cfg = ArrayConfig(
        L=args.array,
        N=args.bits,
        K_amp=args.amp_bits,
        spacing_wavelengths=args.spacing_wl,
        carrier_hz=args.carrier_hz,
    )
    rc = RunConfig(array=cfg, seed=args.seed, out=args.out, threads=args.threads)
    if hasattr(args, "gamma_db"):
        rc.gamma_db = args.gamma_db
    if hasattr(args, "train"):
        rc.train = args.train
    if hasattr(args, "holdout"):
        rc.holdout_count = args.holdout
    if hasattr(args, "scenario"):
        rc.scenario_path = args.scenario
    if hasattr(args, "sector_deg"):
        rc.sector_rad = (math.radians(args.sector_deg[0]), math.radians(args.sector_deg[1]))
    if hasattr(args, "reflectors"):
        rc.reflectors = args.reflectors
    if hasattr(args, "levels"):
        rc.levels = args.levels
    if hasattr(args, "budget"):
        rc.budget = args.budget
    if hasattr(args, "prune"):
        rc.prune = args.prune
    if hasattr(args, "raw_gaps"):
        rc.raw_gaps = args.raw_gaps
    if hasattr(args, "noise"):
        rc.noise = args.noise
    if hasattr(args, "train_csv"):
        rc.train_csv = args.train_csv
    if hasattr(args, "holdout_csv"):
        rc.holdout_csv = args.holdout_csv
    if hasattr(args, "zeta"):
        rc.zeta_path = args.zeta
    if hasattr(args, "input_path"):
        rc.input_path = args.input_path
    if hasattr(args, "format"):
        rc.format = args.format
    return rc


def _out(rc: RunConfig, name: str) -> str:
    os.makedirs(rc.out, exist_ok=True)
    return os.path.join(rc.out, name)


def _load_channels(path, cfg: ArrayConfig):
    channels = load_dataset(path)
    for ch in channels:
        if ch.h.size != cfg.n_elements:
            raise SchemaError(
                f"{path}: channels have {ch.h.size} elements, --array implies {cfg.n_elements}"
            )
    return channels


def cmd_synth(rc: RunConfig) -> int:
    if rc.train < 1:
        raise InvalidArgumentError(f"--train must be >= 1, got {rc.train}")
    if rc.holdout_count < 0:
        raise InvalidArgumentError(f"--holdout must be >= 0, got {rc.holdout_count}")
    if rc.scenario_path is not None:
        scenario = load_scenario(rc.scenario_path)
    else:
        scenario = default_scenario(
            substream_seed(rc.seed, "scenario"), n_reflectors=rc.reflectors
        )
    if rc.noise is not None:
        scenario = ChannelScenario(
            paths=scenario.paths,
            noise_power_dbm=rc.noise,
            obstacle_loss_db=scenario.obstacle_loss_db,
            obstructed_paths=scenario.obstructed_paths,
        )

    thetas_train = sample_orientations(
        rc.train, rc.sector_rad, substream_seed(rc.seed, "orient-train")
    )
    train = [synth_channel(scenario, t, rc.array) for t in thetas_train]
    save_dataset(_out(rc, "train.csv"), train)

    if rc.holdout_count > 0:
        thetas_hold = sample_orientations(
            rc.holdout_count, rc.sector_rad, substream_seed(rc.seed, "orient-holdout")
        )
        hold = [synth_channel(scenario, t, rc.array) for t in thetas_hold]
        save_dataset(_out(rc, "holdout.csv"), hold)
    else:
        save_empty_dataset(_out(rc, "holdout.csv"), rc.array.n_elements)

    save_scenario(_out(rc, "scenario.json"), scenario)
    log.info("synth: %d train + %d holdout channels", rc.train, rc.holdout_count)
    return 0


def cmd_refine(rc: RunConfig) -> int:
    path = rc.train_csv or _out(rc, "train.csv")
    channels = _load_channels(path, rc.array)
    if not channels:
        raise SchemaError(f"{path}: training dataset is empty")
    train = TrainingSet.from_channels(channels, rc.array)
    result = refine(train, rc.gamma_db, rc.array, substream_seed(rc.seed, "refine"))
    if rc.prune:
        pruned = prune(result.zeta, train, rc.gamma_db, rc.array)
        result = dataclasses.replace(
            result, zeta=pruned, covered_by=argmax_coverage(pruned, train, rc.array)
        )
    uncovered = coverage_check(result.zeta, train, rc.gamma_db, rc.array)
    if uncovered:
        raise AssertionError(f"refinement left samples uncovered: {uncovered}")
    result.zeta.save(_out(rc, "zeta.json"))
    result.save_manifest(_out(rc, "refine_manifest.json"))
    log.info(
        "refine: |zeta|=%d after %d iterations (gamma=%g dB)",
        len(result.zeta), result.iterations, rc.gamma_db,
    )
    return 0


def cmd_validate(rc: RunConfig) -> int:
    zeta = Codebook.load(rc.zeta_path or _out(rc, "zeta.json"))
    if not zeta.matches(rc.array):
        raise SchemaError(
            f"codebook grid (L={zeta.L}, N={zeta.N}, K_amp={zeta.K_amp}) "
            f"does not match the array flags"
        )
    holdout = _load_channels(rc.holdout_csv or _out(rc, "holdout.csv"), rc.array)
    if not holdout:
        raise SchemaError("holdout dataset is empty")
    report = validate(
        zeta, holdout, rc.array, rc.gamma_db,
        raw=rc.raw_gaps, noise_power_dbm=rc.noise,
    )
    emit_report(report, _out(rc, "report.json"), "json")
    emit_report(report, _out(rc, "report.csv"), "csv")
    emit_cdf(report, _out(rc, "cdf.csv"))
    log.info(
        "validate: satisfied %.3f at gamma=%g dB (mean gap %.3f dB)",
        report.satisfied_fraction, rc.gamma_db, report.mean_db,
    )
    return 0


def cmd_hier(rc: RunConfig) -> int:
    zeta = Codebook.load(rc.zeta_path or _out(rc, "zeta.json"))
    if not zeta.matches(rc.array):
        raise SchemaError("codebook grid does not match the array flags")
    holdout = _load_channels(rc.holdout_csv or _out(rc, "holdout.csv"), rc.array)
    if not holdout:
        raise SchemaError("holdout dataset is empty")
    hc = build_hier(rc.array, rc.sector_rad, rc.levels)
    comp = compare_hier(zeta, hc, holdout, rc.array, rc.gamma_db, raw=rc.raw_gaps)
    hc.save(_out(rc, "hier_codebook.json"))
    write_json_atomic(_out(rc, "comparison.json"), comp.to_json_obj())
    emit_report(comp.zeta_report, _out(rc, "report_zeta.csv"), "csv")
    emit_report(comp.hier_report, _out(rc, "report_hier.csv"), "csv")
    emit_cdf(comp.zeta_report, _out(rc, "cdf_zeta.csv"))
    emit_cdf(comp.hier_report, _out(rc, "cdf_hier.csv"))
    log.info(
        "hier: mean gap zeta %.3f dB vs baseline %.3f dB (%d levels, %d probes)",
        comp.zeta_report.mean_db, comp.hier_report.mean_db, comp.levels, comp.probes,
    )
    return 0


def cmd_oracle(rc: RunConfig) -> int:
    rng = np.random.default_rng(substream_seed(rc.seed, "oracle-channel"))
    n = rc.array.n_elements
    h = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)
    ch = ChannelRealization(theta_rad=0.0, h=h)
    sv, power = brute_force_max(ch, rc.array, rc.budget, threads=rc.threads)
    _, p_mrc = quantized_mrc(ch, rc.array)
    obj = {
        "seed": rc.seed,
        "L": rc.array.L,
        "N": rc.array.N,
        "K_amp": rc.array.K_amp,
        "h": [[z.real, z.imag] for z in ch.h],
        "amp_idx": list(sv.amp_idx),
        "phase_idx": list(sv.phase_idx),
        "power_db": power,
        "mrc_power_db": p_mrc,
    }
    write_json_atomic(_out(rc, "oracle.json"), obj)
    log.info("oracle: best %.6f dB, quantized MRC %.6f dB", power, p_mrc)
    return 0


def cmd_report(rc: RunConfig) -> int:
    report = load_report(rc.input_path)
    if rc.format == "csv":
        emit_report(report, _out(rc, "report.csv"), "csv")
    elif rc.format == "json":
        emit_report(report, _out(rc, "report.json"), "json")
    else:
        emit_cdf(report, _out(rc, "cdf.csv"))
    return 0


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("BEAMREFINE_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    log.debug("backend: %s", backend_name())
    try:
        rc = _run_config(args)
        return args.func(rc)
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SchemaError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DegenerateChannelError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        # ArrayConfig invariant violations from flag combinations
        print(f"error: {exc}", file=sys.stderr)
        return 2
