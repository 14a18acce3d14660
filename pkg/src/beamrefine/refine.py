"""Greedy codebook refinement.

Given M training orientations with channels and their P_max powers, the
loop draws an uncovered orientation uniformly at random, inserts its
quantized-MRC codeword, and removes every orientation whose gap
P_max - P_zeta drops to gamma_db or below. The drawn orientation always
covers itself (its gap is 0), so the loop finishes in at most M
iterations with a feasible codebook by construction.
"""

from dataclasses import dataclass

import numpy as np

from ._io import write_json_atomic
from .arraymodel import ArrayConfig, Codebook, decode
from .beamsel import power_from_weights, quantized_mrc
from .errors import DegenerateChannelError, InvalidArgumentError

PRNG_NAME = "numpy.random.PCG64"


@dataclass(frozen=True)
class TrainingSample:
    theta_rad: float
    channel: object  # ChannelRealization
    p_max_db: float


@dataclass(frozen=True)
class TrainingSet:
    """Orientations with channels and precomputed P_max powers."""

    samples: tuple

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))

    def __len__(self):
        return len(self.samples)

    @classmethod
    def from_channels(cls, channels, cfg: ArrayConfig) -> "TrainingSet":
        samples = []
        for ch in channels:
            try:
                _, p_max = quantized_mrc(ch, cfg)
            except DegenerateChannelError as exc:
                raise DegenerateChannelError(
                    f"degenerate channel at theta={ch.theta_rad!r}"
                ) from exc
            samples.append(TrainingSample(ch.theta_rad, ch, p_max))
        return cls(samples=tuple(samples))


@dataclass(frozen=True)
class RefinementResult:
    zeta: Codebook
    covered_by: dict  # sample index -> codeword index achieving the max power
    iterations: int
    seed: int
    gamma_db: float

    def manifest_obj(self) -> dict:
        return {
            "gamma_db": self.gamma_db,
            "seed": self.seed,
            "M": len(self.covered_by),
            "iterations": self.iterations,
            "covered_by": {str(k): v for k, v in self.covered_by.items()},
            "prng": PRNG_NAME,
        }

    def save_manifest(self, path) -> None:
        write_json_atomic(path, self.manifest_obj())


def refine(
    train: TrainingSet, gamma_db: float, cfg: ArrayConfig, rng_seed: int
) -> RefinementResult:
    if len(train) == 0:
        raise InvalidArgumentError("training set is empty")
    if not gamma_db > 0:
        raise InvalidArgumentError(f"gamma_db must be positive, got {gamma_db}")

    hvecs = [np.asarray(s.channel.h, dtype=np.complex128) for s in train.samples]
    p_max = [float(s.p_max_db) for s in train.samples]
    rng = np.random.default_rng(rng_seed)

    entries = []
    decoded = []
    seen = {}
    best_p = [float("-inf")] * len(train)
    remaining = list(range(len(train)))
    iterations = 0

    while remaining:
        iterations += 1
        i_star = remaining[int(rng.integers(len(remaining)))]
        try:
            sv, _ = quantized_mrc(hvecs[i_star], cfg)
        except DegenerateChannelError as exc:
            raise DegenerateChannelError(
                f"degenerate channel at theta={train.samples[i_star].theta_rad!r}"
            ) from exc
        if sv not in seen:
            seen[sv] = len(entries)
            entries.append(sv)
            w = decode(sv, cfg)
            decoded.append(w)
            for idx in remaining:
                p = power_from_weights(hvecs[idx], w)
                if p > best_p[idx]:
                    best_p[idx] = p
        # else: duplicate codeword; |zeta| is a set cardinality, so it is
        # not re-inserted, but the iteration still counts.
        if p_max[i_star] - best_p[i_star] > gamma_db:
            # Unreachable when p_max honors the TrainingSet invariant
            # (each sample's own quantized-MRC codeword gives gap 0);
            # without this check an inconsistent p_max would loop forever.
            raise InvalidArgumentError(
                f"sample {i_star} is not covered by its own quantized-MRC "
                f"codeword; its p_max_db is inconsistent with its channel"
            )
        remaining = [idx for idx in remaining if p_max[idx] - best_p[idx] > gamma_db]

    zeta = Codebook(L=cfg.L, N=cfg.N, K_amp=cfg.K_amp, entries=tuple(entries))
    covered_by = _argmax_map(hvecs, decoded)
    return RefinementResult(
        zeta=zeta,
        covered_by=covered_by,
        iterations=iterations,
        seed=int(rng_seed),
        gamma_db=float(gamma_db),
    )


def _argmax_map(hvecs, decoded) -> dict:
    """Best codeword per sample, ties to the earliest-inserted codeword."""
    covered_by = {}
    for i, hvec in enumerate(hvecs):
        best, arg = float("-inf"), 0
        for j, w in enumerate(decoded):
            p = power_from_weights(hvec, w)
            if p > best:
                best, arg = p, j
        covered_by[i] = arg
    return covered_by


def argmax_coverage(zeta: Codebook, train: TrainingSet, cfg: ArrayConfig) -> dict:
    """covered_by map of an arbitrary codebook over a training set."""
    if len(zeta) == 0:
        raise InvalidArgumentError("empty codebook")
    hvecs = [np.asarray(s.channel.h, dtype=np.complex128) for s in train.samples]
    decoded = [decode(sv, cfg) for sv in zeta]
    return _argmax_map(hvecs, decoded)


def coverage_check(
    zeta: Codebook, train: TrainingSet, gamma_db: float, cfg: ArrayConfig
) -> list:
    """Indices of training samples whose gap exceeds gamma_db."""
    if len(zeta) == 0:
        raise InvalidArgumentError("empty codebook")
    decoded = [decode(sv, cfg) for sv in zeta]
    uncovered = []
    for i, s in enumerate(train.samples):
        hvec = np.asarray(s.channel.h, dtype=np.complex128)
        best = max(power_from_weights(hvec, w) for w in decoded)
        if s.p_max_db - best > gamma_db:
            uncovered.append(i)
    return uncovered


def prune(
    zeta: Codebook, train: TrainingSet, gamma_db: float, cfg: ArrayConfig
) -> Codebook:
    """Greedily drop codewords whose removal keeps every sample covered.

    Entries are tried in insertion order; each drop is kept only if the
    remaining set still passes coverage_check.
    """
    if len(zeta) == 0:
        raise InvalidArgumentError("empty codebook")
    decoded = [decode(sv, cfg) for sv in zeta]
    powers = []
    for s in train.samples:
        hvec = np.asarray(s.channel.h, dtype=np.complex128)
        powers.append([power_from_weights(hvec, w) for w in decoded])

    kept = [True] * len(zeta)
    for j in range(len(zeta)):
        if sum(kept) == 1:
            break
        kept[j] = False
        feasible = all(
            s.p_max_db - max(row[k] for k in range(len(zeta)) if kept[k]) <= gamma_db
            for s, row in zip(train.samples, powers)
        )
        if not feasible:
            kept[j] = True
    return Codebook(
        L=zeta.L,
        N=zeta.N,
        K_amp=zeta.K_amp,
        entries=tuple(sv for sv, k in zip(zeta.entries, kept) if k),
    )
