"""Geometric multipath channel synthesis and dataset I/O.

Each channel realization is the complex vector h seen by the array at one
azimuthal orientation theta. Synthetic channels follow a far-field ray
model: every path contributes gain * exp(-1j * k * <u, r_i>) per element,
where u is the arrival direction expressed in the rotated array frame and
r_i the element position. Only the difference (path azimuth - theta)
enters, so rotating the receiver and shifting all path azimuths together
leaves h unchanged.
"""

import cmath
import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._io import write_text_atomic, dumps_json
from .arraymodel import ArrayConfig, element_positions
from .errors import InvalidArgumentError, SchemaError


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Channel vector h for one receiver orientation."""

    theta_rad: float
    h: np.ndarray
    tag: str = None

    def __post_init__(self):
        object.__setattr__(self, "theta_rad", float(self.theta_rad))
        object.__setattr__(self, "h", np.asarray(self.h, dtype=np.complex128))
        if self.h.ndim != 1 or self.h.size == 0:
            raise InvalidArgumentError("h must be a non-empty 1-D complex vector")
        if not np.all(np.isfinite(self.h)):
            raise InvalidArgumentError("h entries must be finite")


@dataclass(frozen=True)
class ChannelScenario:
    """Multipath geometry: (azimuth_rad, elevation_rad, complex_gain) triples.

    obstacle_loss_db, when set, attenuates the paths listed in
    obstructed_paths (all paths when obstructed_paths is None).
    """

    paths: tuple
    noise_power_dbm: float = None
    obstacle_loss_db: float = None
    obstructed_paths: tuple = None

    def __post_init__(self):
        norm = tuple((float(az), float(el), complex(g)) for az, el, g in self.paths)
        object.__setattr__(self, "paths", norm)
        if not norm:
            raise InvalidArgumentError("scenario needs at least one path")
        for az, el, g in norm:
            if not (math.isfinite(az) and math.isfinite(el) and cmath.isfinite(g)):
                raise InvalidArgumentError("path parameters must be finite")
        if self.obstructed_paths is not None:
            idx = tuple(int(i) for i in self.obstructed_paths)
            for i in idx:
                if not 0 <= i < len(norm):
                    raise InvalidArgumentError(f"obstructed path index {i} out of range")
            object.__setattr__(self, "obstructed_paths", idx)

    def effective_gains(self) -> list:
        """Per-path complex gains with the obstacle attenuation folded in."""
        gains = [g for _, _, g in self.paths]
        if self.obstacle_loss_db is not None:
            factor = 10.0 ** (-self.obstacle_loss_db / 20.0)
            targets = (
                range(len(gains))
                if self.obstructed_paths is None
                else self.obstructed_paths
            )
            for i in targets:
                gains[i] = gains[i] * factor
        return gains


def with_obstacle(
    scenario: ChannelScenario, loss_db: float, path_indices=None
) -> ChannelScenario:
    """Scenario variant with an obstacle attenuating the given paths."""
    return ChannelScenario(
        paths=scenario.paths,
        noise_power_dbm=scenario.noise_power_dbm,
        obstacle_loss_db=float(loss_db),
        obstructed_paths=path_indices,
    )


def synth_channel(
    scenario: ChannelScenario, theta_rad: float, cfg: ArrayConfig, tag: str = None
) -> ChannelRealization:
    """h_i = sum over paths of gain * exp(-1j * k * <u(az - theta, el), r_i>).

    Paths are accumulated in scenario order, so a multi-path channel is the
    exact elementwise sum of its single-path channels.
    """
    pos = element_positions(cfg)
    k = 2.0 * np.pi / cfg.wavelength_m
    h = np.zeros(cfg.n_elements, dtype=np.complex128)
    gains = scenario.effective_gains()
    for (az, el, _), g in zip(scenario.paths, gains):
        rel = az - theta_rad
        u = np.array(
            [
                math.cos(el) * math.cos(rel),
                math.cos(el) * math.sin(rel),
                math.sin(el),
            ]
        )
        h += g * np.exp(-1j * k * (pos @ u))
    return ChannelRealization(theta_rad=theta_rad, h=h, tag=tag)


def sample_orientations(count: int, angle_range, rng_seed: int) -> list:
    """Seeded i.i.d. uniform orientation draws from [lo, hi]."""
    lo, hi = (float(angle_range[0]), float(angle_range[1]))
    if count < 1:
        raise InvalidArgumentError(f"count must be positive, got {count}")
    if hi < lo:
        raise InvalidArgumentError(f"empty orientation interval [{lo}, {hi}]")
    rng = np.random.default_rng(rng_seed)
    return [float(t) for t in rng.uniform(lo, hi, count)]


def default_scenario(
    rng_seed: int,
    n_reflectors: int = 40,
    reflect_level_db=(10.0, 20.0),
    reflect_azimuth_range=(-np.pi / 2, np.pi / 2),
) -> ChannelScenario:
    """Line-of-sight path plus randomly placed weaker reflected paths.

    The LoS path sits at azimuth 0 with unit gain. Each reflector draws an
    azimuth uniformly from reflect_azimuth_range and a complex Gaussian gain
    whose mean power is 10 to 20 dB below the LoS path. The default count
    gives an aggregate reflected power comparable to the LoS power, i.e. a
    strongly scattering indoor environment.
    """
    rng = np.random.default_rng(rng_seed)
    paths = [(0.0, 0.0, 1.0 + 0.0j)]
    lo_db, hi_db = reflect_level_db
    for _ in range(int(n_reflectors)):
        az = rng.uniform(*reflect_azimuth_range)
        level = 10.0 ** (-rng.uniform(lo_db, hi_db) / 20.0)
        g = level * (rng.standard_normal() + 1j * rng.standard_normal()) / math.sqrt(2.0)
        paths.append((az, 0.0, g))
    return ChannelScenario(paths=tuple(paths))


def apply_noise_floor(power_db: float, noise_power_dbm: float) -> float:
    """Add a constant noise floor to a power reading, in the dB domain.

    The floor is interpreted on the same scale as the reading, so a reading
    far below the floor saturates at the floor.
    """
    return 10.0 * math.log10(10.0 ** (power_db / 10.0) + 10.0 ** (noise_power_dbm / 10.0))


# ---------------------------------------------------------------------------
# dataset and scenario serialization

def _header(n_elements: int) -> list:
    cols = ["theta_rad", "tag"]
    for i in range(1, n_elements + 1):
        cols += [f"re_{i}", f"im_{i}"]
    return cols


def save_dataset(path, realizations) -> None:
    """Write channels as CSV: theta_rad,tag,re_1,im_1,...  Floats use repr
    so a load round-trips bit-exactly."""
    realizations = list(realizations)
    if not realizations:
        raise InvalidArgumentError("cannot infer element count from an empty dataset")
    n = realizations[0].h.size
    rows = []
    for r in realizations:
        if r.h.size != n:
            raise InvalidArgumentError("mixed channel lengths in one dataset")
        row = [repr(r.theta_rad), r.tag if r.tag is not None else ""]
        for z in r.h:
            row += [repr(float(z.real)), repr(float(z.imag))]
        rows.append(row)
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_header(n))
    writer.writerows(rows)
    write_text_atomic(path, buf.getvalue())


def save_empty_dataset(path, n_elements: int) -> None:
    """Header-only CSV, used when a split has zero samples."""
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_header(n_elements))
    write_text_atomic(path, buf.getvalue())


def load_dataset(path) -> list:
    """Parse a channel CSV; raises SchemaError naming the offending line."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, header row required") from None
        if len(header) < 4 or (len(header) - 2) % 2 != 0:
            raise SchemaError(f"{path}: line 1: malformed header {header!r}")
        n = (len(header) - 2) // 2
        if header != _header(n):
            raise SchemaError(f"{path}: line 1: header does not match schema")
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2 + 2 * n:
                raise SchemaError(
                    f"{path}: line {lineno}: expected {2 + 2 * n} fields, got {len(row)}"
                )
            try:
                theta = float(row[0])
                vals = [float(x) for x in row[2:]]
            except ValueError as exc:
                raise SchemaError(f"{path}: line {lineno}: {exc}") from exc
            h = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
            tag = row[1] or None
            out.append(ChannelRealization(theta_rad=theta, h=h, tag=tag))
        return out


def scenario_to_json_obj(scenario: ChannelScenario) -> dict:
    obj = {
        "paths": [
            [az, el, [g.real, g.imag]] for az, el, g in scenario.paths
        ],
        "noise_power_dbm": scenario.noise_power_dbm,
        "obstacle_loss_db": scenario.obstacle_loss_db,
    }
    if scenario.obstructed_paths is not None:
        obj["obstructed_paths"] = list(scenario.obstructed_paths)
    return obj


def scenario_from_json_obj(obj: dict) -> ChannelScenario:
    try:
        paths = tuple(
            (float(az), float(el), complex(g[0], g[1])) for az, el, g in obj["paths"]
        )
        return ChannelScenario(
            paths=paths,
            noise_power_dbm=obj.get("noise_power_dbm"),
            obstacle_loss_db=obj.get("obstacle_loss_db"),
            obstructed_paths=obj.get("obstructed_paths"),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SchemaError(f"malformed scenario object: {exc}") from exc


def save_scenario(path, scenario: ChannelScenario) -> None:
    write_text_atomic(path, dumps_json(scenario_to_json_obj(scenario)))


def load_scenario(path) -> ChannelScenario:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
    return scenario_from_json_obj(obj)
