"""Hierarchical beam-search baseline.

Level l of the codebook splits the service sector into 2**l equal
sub-sectors and steers one beam at each center (the quantized MRC codeword
of a single line-of-sight channel at that angle). A search descends the
binary tree, probing the two children of the current sector at every level
and following the stronger response, 2 probes per level. The beams are
plain steered beams, not widened ones, so a strong off-center multipath
component can capture an early decision and strand the descent in the
wrong branch; that failure mode is the point of comparison for the
refined codebook.
"""

import json
from dataclasses import dataclass

from ._io import write_text_atomic, dumps_json
from .arraymodel import ArrayConfig, Codebook, SteeringVector, validate_codeword
from .beamsel import mrc_weights, quantize_weights, received_power
from .channel import ChannelScenario, synth_channel
from .errors import InvalidArgumentError, SchemaError


@dataclass(frozen=True)
class HierCodebook:
    """Per-level codebooks; level l (1-based) holds 2**l entries."""

    levels: tuple

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.levels:
            raise InvalidArgumentError("at least one level required")
        for l, cb in enumerate(self.levels, start=1):
            if len(cb) != 1 << l:
                raise InvalidArgumentError(
                    f"level {l} must hold {1 << l} entries, got {len(cb)}"
                )

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def leaf_count(self) -> int:
        return len(self.levels[-1])

    @property
    def total_entries(self) -> int:
        return sum(len(cb) for cb in self.levels)

    def to_json_obj(self) -> dict:
        first = self.levels[0]
        return {
            "L": first.L,
            "N": first.N,
            "K_amp": first.K_amp,
            "levels": [
                [
                    {"amp_idx": list(sv.amp_idx), "phase_idx": list(sv.phase_idx)}
                    for sv in cb.entries
                ]
                for cb in self.levels
            ],
        }

    def save(self, path) -> None:
        write_text_atomic(path, dumps_json(self.to_json_obj()))

    @classmethod
    def load(cls, path) -> "HierCodebook":
        try:
            with open(path, encoding="utf-8") as fh:
                obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
        try:
            L, N, K_amp = int(obj["L"]), int(obj["N"]), int(obj["K_amp"])
            levels = tuple(
                Codebook(
                    L=L,
                    N=N,
                    K_amp=K_amp,
                    entries=tuple(
                        SteeringVector(tuple(e["amp_idx"]), tuple(e["phase_idx"]))
                        for e in lev
                    ),
                )
                for lev in obj["levels"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"{path}: malformed hierarchical codebook: {exc}") from exc
        try:
            hc = cls(levels=levels)
        except InvalidArgumentError as exc:
            raise SchemaError(f"{path}: {exc}") from exc
        cfg = ArrayConfig(L, N, K_amp)
        for cb in hc.levels:
            for sv in cb.entries:
                try:
                    validate_codeword(sv, cfg)
                except Exception as exc:
                    raise SchemaError(f"{path}: {exc}") from exc
        return hc


def sector_centers(sector, level: int) -> list:
    lo, hi = float(sector[0]), float(sector[1])
    width = (hi - lo) / (1 << level)
    return [lo + (j + 0.5) * width for j in range(1 << level)]


def build_hier(cfg: ArrayConfig, sector, levels: int) -> HierCodebook:
    """Steered-beam codebook over a binary angular partition of the sector."""
    lo, hi = float(sector[0]), float(sector[1])
    if not hi > lo:
        raise InvalidArgumentError(f"empty sector [{lo}, {hi}]")
    if levels < 1:
        raise InvalidArgumentError(f"levels must be >= 1, got {levels}")
    out = []
    for l in range(1, levels + 1):
        entries = []
        for center in sector_centers((lo, hi), l):
            scen = ChannelScenario(paths=((center, 0.0, 1.0 + 0.0j),))
            h_center = synth_channel(scen, 0.0, cfg)
            entries.append(quantize_weights(mrc_weights(h_center), cfg))
        out.append(Codebook(L=cfg.L, N=cfg.N, K_amp=cfg.K_amp, entries=tuple(entries)))
    return HierCodebook(levels=tuple(out))


def hier_search(hc: HierCodebook, h, cfg: ArrayConfig):
    """Binary descent; returns (leaf codeword, its power, probe count).

    At each level the two children of the current sector are probed and the
    stronger one wins; an exact tie descends toward the lower-angle child.
    """
    i = 0
    sv = None
    power = float("-inf")
    for cb in hc.levels:
        left, right = cb.entries[2 * i], cb.entries[2 * i + 1]
        p_left = received_power(h, left, cfg)
        p_right = received_power(h, right, cfg)
        if p_right > p_left:
            i = 2 * i + 1
            sv, power = right, p_right
        else:
            i = 2 * i
            sv, power = left, p_left
    return sv, power, 2 * hc.depth
