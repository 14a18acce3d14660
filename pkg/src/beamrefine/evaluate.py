"""Held-out validation, gap statistics, empirical CDF, and the paired
baseline comparison.

The per-sample gap is P_max - P_zeta where P_zeta is the best received
power over the codebook. The refined set can occasionally beat the
quantized-MRC benchmark (MRC rounding is not the discrete optimum), so the
default "clipped" mode takes P_max as the maximum of the benchmark and
every compared arm, keeping gaps non-negative; the "raw" mode keeps the
signed values. Negative raw gaps count as satisfied either way.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from ._io import write_text_atomic, dumps_json
from .arraymodel import ArrayConfig, Codebook, decode
from .beamsel import power_from_weights, quantized_mrc
from .channel import apply_noise_floor, synth_channel, with_obstacle
from .errors import DegenerateChannelError, InvalidArgumentError, SchemaError
from .hierarchy import HierCodebook, hier_search

VARIANCE_CONVENTION = "population"


@dataclass(frozen=True)
class GapReport:
    gaps_db: tuple
    included_idx: tuple  # holdout indices the gaps correspond to
    mean_db: float
    variance_db2: float
    satisfied_fraction: float
    cdf: tuple  # (gap_db, cumulative_fraction) knots
    gamma_db: float
    codebook_size: int
    mode: str  # "clipped" or "raw"
    skipped: tuple  # holdout indices skipped as degenerate
    variance_convention: str = VARIANCE_CONVENTION

    def to_json_obj(self) -> dict:
        return {
            "gaps_db": list(self.gaps_db),
            "included_idx": list(self.included_idx),
            "mean_db": self.mean_db,
            "variance_db2": self.variance_db2,
            "satisfied_fraction": self.satisfied_fraction,
            "cdf": [[g, f] for g, f in self.cdf],
            "gamma_db": self.gamma_db,
            "codebook_size": self.codebook_size,
            "mode": self.mode,
            "skipped": list(self.skipped),
            "variance_convention": self.variance_convention,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "GapReport":
        try:
            return cls(
                gaps_db=tuple(float(g) for g in obj["gaps_db"]),
                included_idx=tuple(int(i) for i in obj["included_idx"]),
                mean_db=float(obj["mean_db"]),
                variance_db2=float(obj["variance_db2"]),
                satisfied_fraction=float(obj["satisfied_fraction"]),
                cdf=tuple((float(g), float(f)) for g, f in obj["cdf"]),
                gamma_db=float(obj["gamma_db"]),
                codebook_size=int(obj["codebook_size"]),
                mode=str(obj["mode"]),
                skipped=tuple(int(i) for i in obj["skipped"]),
                variance_convention=str(obj["variance_convention"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed gap report: {exc}") from exc


def cdf_at(report: GapReport, x: float) -> float:
    """Empirical CDF evaluated at x (fraction of gaps <= x)."""
    frac = 0.0
    for g, f in report.cdf:
        if g <= x:
            frac = f
        else:
            break
    return frac


def _aggregate(gaps, included, gamma_db, size, mode, skipped) -> GapReport:
    if not gaps:
        raise DegenerateChannelError("every holdout sample was degenerate")
    arr = np.asarray(gaps, dtype=np.float64)
    s = sorted(gaps)
    n = len(s)
    knots = []
    for i, g in enumerate(s):
        if i + 1 < n and s[i + 1] == g:
            continue
        knots.append((g, (i + 1) / n))
    return GapReport(
        gaps_db=tuple(gaps),
        included_idx=tuple(included),
        mean_db=float(np.mean(arr)),
        variance_db2=float(np.var(arr)),
        satisfied_fraction=sum(g <= gamma_db for g in gaps) / n,
        cdf=tuple(knots),
        gamma_db=float(gamma_db),
        codebook_size=int(size),
        mode=mode,
        skipped=tuple(skipped),
    )


def validate(
    zeta: Codebook,
    holdout,
    cfg: ArrayConfig,
    gamma_db: float,
    raw: bool = False,
    noise_power_dbm: float = None,
) -> GapReport:
    """Gap statistics of a codebook on held-out channel realizations."""
    holdout = list(holdout)
    if len(zeta) == 0:
        raise InvalidArgumentError("empty codebook")
    if not holdout:
        raise InvalidArgumentError("empty holdout set")
    decoded = [decode(sv, cfg) for sv in zeta]
    gaps, included, skipped = [], [], []
    for i, ch in enumerate(holdout):
        hvec = np.asarray(ch.h, dtype=np.complex128)
        try:
            _, p_mrc = quantized_mrc(hvec, cfg)
        except DegenerateChannelError:
            skipped.append(i)
            continue
        p_z = max(power_from_weights(hvec, w) for w in decoded)
        if noise_power_dbm is not None:
            p_mrc = apply_noise_floor(p_mrc, noise_power_dbm)
            p_z = apply_noise_floor(p_z, noise_power_dbm)
        if math.isinf(p_mrc) and p_mrc < 0:
            skipped.append(i)
            continue
        p_max = p_mrc if raw else max(p_mrc, p_z)
        gaps.append(p_max - p_z)
        included.append(i)
    return _aggregate(
        gaps, included, gamma_db, len(zeta), "raw" if raw else "clipped", skipped
    )


@dataclass(frozen=True)
class PairedComparison:
    """Refined codebook versus hierarchical baseline on one holdout.

    Both gap series are measured against the identical per-sample P_max
    (shared benchmark), which is what makes the means comparable.
    """

    zeta_report: GapReport
    hier_report: GapReport
    levels: int
    probes: int
    zeta_size: int
    hier_total_entries: int
    hier_leaf_count: int
    shared_p_max: bool = True

    def to_json_obj(self) -> dict:
        return {
            "zeta_report": self.zeta_report.to_json_obj(),
            "hier_report": self.hier_report.to_json_obj(),
            "levels": self.levels,
            "probes": self.probes,
            "zeta_size": self.zeta_size,
            "hier_total_entries": self.hier_total_entries,
            "hier_leaf_count": self.hier_leaf_count,
            "shared_p_max": self.shared_p_max,
        }


def compare_hier(
    zeta: Codebook,
    hc: HierCodebook,
    holdout,
    cfg: ArrayConfig,
    gamma_db: float = 3.0,
    raw: bool = False,
) -> PairedComparison:
    """Paired gap comparison on the same holdout and the same P_max."""
    holdout = list(holdout)
    if len(zeta) == 0:
        raise InvalidArgumentError("empty codebook")
    if not holdout:
        raise InvalidArgumentError("empty holdout set")
    decoded = [decode(sv, cfg) for sv in zeta]
    gz, gh, included, skipped = [], [], [], []
    for i, ch in enumerate(holdout):
        hvec = np.asarray(ch.h, dtype=np.complex128)
        try:
            _, p_mrc = quantized_mrc(hvec, cfg)
        except DegenerateChannelError:
            skipped.append(i)
            continue
        p_z = max(power_from_weights(hvec, w) for w in decoded)
        _, p_h, _ = hier_search(hc, hvec, cfg)
        if math.isinf(p_mrc) and p_mrc < 0:
            skipped.append(i)
            continue
        p_max = p_mrc if raw else max(p_mrc, p_z, p_h)
        gz.append(p_max - p_z)
        gh.append(p_max - p_h)
        included.append(i)
    mode = "raw" if raw else "clipped"
    return PairedComparison(
        zeta_report=_aggregate(gz, included, gamma_db, len(zeta), mode, skipped),
        hier_report=_aggregate(gh, included, gamma_db, hc.total_entries, mode, skipped),
        levels=hc.depth,
        probes=2 * hc.depth,
        zeta_size=len(zeta),
        hier_total_entries=hc.total_entries,
        hier_leaf_count=hc.leaf_count,
    )


def make_obstructed_holdout(
    scenario,
    thetas,
    cfg: ArrayConfig,
    fraction: float,
    loss_range=(10.0, 30.0),
    rng_seed: int = 0,
):
    """Holdout where a random fraction of samples see the first path
    (line of sight) attenuated by a random obstacle loss."""
    if not 0.0 <= fraction <= 1.0:
        raise InvalidArgumentError(f"fraction must be in [0, 1], got {fraction}")
    rng = np.random.default_rng(rng_seed)
    out = []
    for theta in thetas:
        if rng.random() < fraction:
            loss = float(rng.uniform(*loss_range))
            scen = with_obstacle(scenario, loss, path_indices=(0,))
            out.append(synth_channel(scen, theta, cfg, tag=f"obstacle:{loss:.2f}dB"))
        else:
            out.append(synth_channel(scenario, theta, cfg))
    return out


# ---------------------------------------------------------------------------
# report serialization

def _fmt(x: float) -> str:
    return f"{x:.6f}"


def report_to_csv(report: GapReport) -> str:
    lines = ["sample_idx,gap_db"]
    for idx, gap in zip(report.included_idx, report.gaps_db):
        lines.append(f"{idx},{_fmt(gap)}")
    lines += [
        f"# mean_db,{_fmt(report.mean_db)}",
        f"# variance_db2,{_fmt(report.variance_db2)}",
        f"# satisfied_fraction,{_fmt(report.satisfied_fraction)}",
        f"# gamma_db,{_fmt(report.gamma_db)}",
        f"# codebook_size,{report.codebook_size}",
        f"# mode,{report.mode}",
        f"# variance_convention,{report.variance_convention}",
        f"# skipped,{';'.join(str(i) for i in report.skipped)}",
    ]
    return "\n".join(lines) + "\n"


def emit_report(report: GapReport, path, format: str = "json") -> None:
    if format == "csv":
        write_text_atomic(path, report_to_csv(report))
    elif format == "json":
        write_text_atomic(path, dumps_json(report.to_json_obj()))
    else:
        raise InvalidArgumentError(f"unknown report format {format!r}")


def load_report(path) -> GapReport:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
    return GapReport.from_json_obj(obj)


def emit_cdf(report: GapReport, path) -> None:
    lines = ["gap_db,fraction"]
    for g, f in report.cdf:
        lines.append(f"{g!r},{f!r}")
    write_text_atomic(path, "\n".join(lines) + "\n")
