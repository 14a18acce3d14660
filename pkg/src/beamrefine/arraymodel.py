"""Array geometry, per-antenna quantization grids, and codeword arithmetic.

An L x L uniform rectangular array gives L**2 antennas. Each antenna has an
N-bit configuration split into K_amp amplitude bits and N - K_amp phase
bits. Grid indices are 1-based so index a decodes to amplitude a / 2**K_amp
and index p to phase p * 2*pi / 2**(N - K_amp); the decoded sets are
therefore {1/2**K_amp, ..., 1} and (0, 2*pi].
"""

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from ._io import write_text_atomic, dumps_json
from .errors import InvalidCodewordError, SchemaError

SPEED_OF_LIGHT_M_S = 299792458.0


@dataclass(frozen=True)
class ArrayConfig:
    """Geometry plus quantization grid of one receiver array."""

    L: int
    N: int
    K_amp: int = 0
    spacing_wavelengths: float = 0.5
    carrier_hz: float = 25.1e9

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be positive, got {self.L}")
        if self.N < 1:
            raise ValueError(f"N must be positive, got {self.N}")
        if not 0 <= self.K_amp < self.N:
            raise ValueError(
                f"K_amp must satisfy 0 <= K_amp < N, got K_amp={self.K_amp} N={self.N}"
            )
        if not self.spacing_wavelengths > 0:
            raise ValueError("spacing_wavelengths must be positive")
        if not self.carrier_hz > 0:
            raise ValueError("carrier_hz must be positive")

    @property
    def n_elements(self) -> int:
        return self.L * self.L

    @property
    def phase_levels(self) -> int:
        return 1 << (self.N - self.K_amp)

    @property
    def amp_levels(self) -> int:
        return 1 << self.K_amp

    @property
    def configs_per_antenna(self) -> int:
        return 1 << self.N

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT_M_S / self.carrier_hz

    @property
    def pitch_m(self) -> float:
        return self.spacing_wavelengths * self.wavelength_m


def codebook_size(cfg: ArrayConfig) -> int:
    """Exact cardinality 2**(N * L**2) of the full codebook, as a Python int."""
    return 1 << (cfg.N * cfg.n_elements)


@dataclass(frozen=True)
class SteeringVector:
    """One quantized per-antenna amplitude/phase configuration (a codeword)."""

    amp_idx: tuple
    phase_idx: tuple

    def __post_init__(self):
        object.__setattr__(self, "amp_idx", tuple(int(a) for a in self.amp_idx))
        object.__setattr__(self, "phase_idx", tuple(int(p) for p in self.phase_idx))
        if len(self.amp_idx) != len(self.phase_idx):
            raise InvalidCodewordError(
                f"index arrays differ in length: {len(self.amp_idx)} vs {len(self.phase_idx)}"
            )


def validate_codeword(sv: SteeringVector, cfg: ArrayConfig) -> None:
    if len(sv.amp_idx) != cfg.n_elements:
        raise InvalidCodewordError(
            f"codeword has {len(sv.amp_idx)} antennas, config expects {cfg.n_elements}"
        )
    for a in sv.amp_idx:
        if not 1 <= a <= cfg.amp_levels:
            raise InvalidCodewordError(
                f"amp index {a} outside [1, {cfg.amp_levels}]"
            )
    for p in sv.phase_idx:
        if not 1 <= p <= cfg.phase_levels:
            raise InvalidCodewordError(
                f"phase index {p} outside [1, {cfg.phase_levels}]"
            )


def decode(sv: SteeringVector, cfg: ArrayConfig) -> np.ndarray:
    """Decoded complex weights w_i = (a_i / 2**K) * exp(-1j * p_i * 2*pi / P).

    The negative sign in the exponent is the grid convention: phase index p
    stores the conjugated phase, so a codeword matched to a channel h has
    phase index near arg(h_i) * P / (2*pi).
    """
    validate_codeword(sv, cfg)
    amps = np.asarray(sv.amp_idx, dtype=np.float64) / cfg.amp_levels
    phases = np.asarray(sv.phase_idx, dtype=np.float64) * (2.0 * np.pi / cfg.phase_levels)
    return amps * np.exp(-1j * phases)


def steering_from_flat(flat: int, cfg: ArrayConfig) -> SteeringVector:
    """Codeword at position `flat` of the enumeration order.

    Antenna 0 is the most significant digit; within one antenna the
    configuration index is amplitude-major: c = (a - 1) * P + (p - 1).
    """
    if not 0 <= flat < codebook_size(cfg):
        raise InvalidCodewordError(f"flat index {flat} outside codebook of size {codebook_size(cfg)}")
    base = cfg.configs_per_antenna
    P = cfg.phase_levels
    digits = []
    for _ in range(cfg.n_elements):
        digits.append(flat % base)
        flat //= base
    digits.reverse()
    return SteeringVector(
        amp_idx=tuple(c // P + 1 for c in digits),
        phase_idx=tuple(c % P + 1 for c in digits),
    )


def flat_from_steering(sv: SteeringVector, cfg: ArrayConfig) -> int:
    validate_codeword(sv, cfg)
    base = cfg.configs_per_antenna
    P = cfg.phase_levels
    flat = 0
    for a, p in zip(sv.amp_idx, sv.phase_idx):
        flat = flat * base + (a - 1) * P + (p - 1)
    return flat


def enumerate_codebook(cfg: ArrayConfig):
    """Lazily yield every codeword once, in ascending flat-index order."""
    P = cfg.phase_levels
    configs = range(cfg.configs_per_antenna)
    for combo in itertools.product(configs, repeat=cfg.n_elements):
        yield SteeringVector(
            amp_idx=tuple(c // P + 1 for c in combo),
            phase_idx=tuple(c % P + 1 for c in combo),
        )


def element_positions(cfg: ArrayConfig) -> np.ndarray:
    """Element coordinates in meters, row-major, centered on the origin.

    Elements lie in the x-y plane of the local array frame; the azimuthal
    rotation axis is z.
    """
    d = cfg.pitch_m
    half = (cfg.L - 1) / 2.0
    pos = np.zeros((cfg.n_elements, 3), dtype=np.float64)
    for r in range(cfg.L):
        for c in range(cfg.L):
            i = r * cfg.L + c
            pos[i, 0] = (c - half) * d
            pos[i, 1] = (r - half) * d
    return pos


@dataclass(frozen=True)
class Codebook:
    """Ordered set of codewords; entry order is the scan order."""

    L: int
    N: int
    K_amp: int
    entries: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def matches(self, cfg: ArrayConfig) -> bool:
        return (self.L, self.N, self.K_amp) == (cfg.L, cfg.N, cfg.K_amp)

    def config(self, spacing_wavelengths: float = 0.5, carrier_hz: float = 25.1e9) -> ArrayConfig:
        return ArrayConfig(self.L, self.N, self.K_amp, spacing_wavelengths, carrier_hz)

    def to_json_obj(self) -> dict:
        return {
            "L": self.L,
            "N": self.N,
            "K_amp": self.K_amp,
            "entries": [
                {"amp_idx": list(sv.amp_idx), "phase_idx": list(sv.phase_idx)}
                for sv in self.entries
            ],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Codebook":
        try:
            entries = tuple(
                SteeringVector(tuple(e["amp_idx"]), tuple(e["phase_idx"]))
                for e in obj["entries"]
            )
            return cls(L=int(obj["L"]), N=int(obj["N"]), K_amp=int(obj["K_amp"]), entries=entries)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed codebook object: {exc}") from exc

    def save(self, path) -> None:
        write_text_atomic(path, dumps_json(self.to_json_obj()))

    @classmethod
    def load(cls, path) -> "Codebook":
        try:
            with open(path, encoding="utf-8") as fh:
                obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
        cb = cls.from_json_obj(obj)
        cfg = ArrayConfig(cb.L, cb.N, cb.K_amp)
        for i, sv in enumerate(cb.entries):
            try:
                validate_codeword(sv, cfg)
            except InvalidCodewordError as exc:
                raise SchemaError(f"{path}: entry {i}: {exc}") from exc
        return cb
