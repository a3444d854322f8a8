"""Channel models, gain sampling, and AWGN generation.

Four network models are supported: a wiretap channel with M helpers, a
K-user multiple access wiretap channel (optionally with a subset of
"informed" transmitters that know the eavesdropper gains), and a K-user
interference channel with an external eavesdropper.  Gains are drawn from a
continuous distribution with bounded support, bounded away from zero, either
once (fixed mode) or i.i.d. per slot (fading mode).  Every draw comes from
its own seeded substream, so regeneration is reproducible bit-for-bit and
independent of evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import ParameterError

# Substream tags: every random draw in the package is keyed by
# (seed, tag, *indices) so streams never collide across purposes.
TAG_LEGIT = 0
TAG_EVE = 1
TAG_NOISE = 2
TAG_ALPHA = 3
TAG_SEED_VECTOR = 4
TAG_TRIAL = 5
TAG_SAMPLE = 6


def substream(*key: int) -> np.random.Generator:
    """Independent generator for an integer key tuple."""
    if any(k < 0 for k in key):
        raise ParameterError(f"substream key must be non-negative integers, got {key}")
    return np.random.default_rng(np.random.SeedSequence(key))


@dataclass(frozen=True)
class GainDistribution:
    """Gain law: magnitude uniform on [magnitude_low, magnitude_high], random sign.

    Bounded support that stays away from zero keeps every channel invertible
    and gives the integrability bound E[log(1 + 1/|h|)] <= log(1 + 1/magnitude_low).
    """

    magnitude_low: float = 0.5
    magnitude_high: float = 2.0
    sign_symmetric: bool = True

    def __post_init__(self) -> None:
        if not (math.isfinite(self.magnitude_low) and math.isfinite(self.magnitude_high)):
            raise ParameterError("distribution bounds must be finite")
        if not (0.0 < self.magnitude_low < self.magnitude_high):
            raise ParameterError(
                f"need 0 < magnitude_low < magnitude_high, got "
                f"({self.magnitude_low}, {self.magnitude_high})"
            )

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Draw gains; scalar when size is None, else an ndarray."""
        magnitude = rng.uniform(self.magnitude_low, self.magnitude_high, size)
        if not self.sign_symmetric:
            return magnitude
        sign = rng.integers(0, 2, size) * 2 - 1
        return magnitude * sign

    def contains(self, x: float) -> bool:
        if not self.sign_symmetric and x < 0:
            return False
        return self.magnitude_low <= abs(x) <= self.magnitude_high

    @property
    def integrability_bound(self) -> float:
        """log(1 + 1/magnitude_low), an upper bound on E[log(1 + 1/|h|)]."""
        return math.log1p(1.0 / self.magnitude_low)

    def to_json_dict(self) -> dict:
        return {
            "magnitude_low": self.magnitude_low,
            "magnitude_high": self.magnitude_high,
            "sign_symmetric": self.sign_symmetric,
        }

    @staticmethod
    def from_json_dict(doc: Mapping) -> "GainDistribution":
        return GainDistribution(
            magnitude_low=float(doc["magnitude_low"]),
            magnitude_high=float(doc["magnitude_high"]),
            sign_symmetric=bool(doc["sign_symmetric"]),
        )


@dataclass(frozen=True)
class HelperModel:
    """One legitimate pair, M interference-only helpers, one eavesdropper."""

    M: int

    def __post_init__(self) -> None:
        if self.M < 0:
            raise ParameterError(f"helper count must be >= 0, got {self.M}")

    name = "helper"

    @property
    def transmitters(self) -> tuple[int, ...]:
        return tuple(range(1, self.M + 2))

    @property
    def receivers(self) -> tuple[int, ...]:
        return (1,)

    def params(self) -> dict:
        return {"M": self.M}


@dataclass(frozen=True)
class MacModel:
    """K-user multiple access wiretap channel."""

    K: int

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ParameterError(f"user count must be >= 1, got {self.K}")

    name = "mac"

    @property
    def transmitters(self) -> tuple[int, ...]:
        return tuple(range(1, self.K + 1))

    @property
    def receivers(self) -> tuple[int, ...]:
        return (1,)

    def params(self) -> dict:
        return {"K": self.K}


@dataclass(frozen=True)
class MacPartialModel:
    """MAC wiretap channel where the first m_informed users know the eavesdropper gains."""

    K: int
    m_informed: int

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ParameterError(f"user count must be >= 1, got {self.K}")
        if not (1 <= self.m_informed <= self.K):
            raise ParameterError(
                f"m_informed must be in 1..K={self.K}, got {self.m_informed}"
            )

    name = "mac_partial"

    @property
    def transmitters(self) -> tuple[int, ...]:
        return tuple(range(1, self.K + 1))

    @property
    def receivers(self) -> tuple[int, ...]:
        return (1,)

    def params(self) -> dict:
        return {"K": self.K, "m_informed": self.m_informed}


@dataclass(frozen=True)
class InterferenceModel:
    """K transmitter-receiver pairs plus an external eavesdropper."""

    K: int

    def __post_init__(self) -> None:
        if self.K < 2:
            raise ParameterError(f"interference network needs K >= 2, got {self.K}")

    name = "interference"

    @property
    def transmitters(self) -> tuple[int, ...]:
        return tuple(range(1, self.K + 1))

    @property
    def receivers(self) -> tuple[int, ...]:
        return tuple(range(1, self.K + 1))

    def params(self) -> dict:
        return {"K": self.K}


Model = Union[HelperModel, MacModel, MacPartialModel, InterferenceModel]

_MODEL_BY_NAME = {
    "helper": HelperModel,
    "mac": MacModel,
    "mac_partial": MacPartialModel,
    "interference": InterferenceModel,
}


def model_from_json_dict(doc: Mapping) -> Model:
    kind = doc["kind"]
    if kind not in _MODEL_BY_NAME:
        raise ParameterError(f"unknown model kind {kind!r}")
    params = {k: int(v) for k, v in doc.items() if k != "kind"}
    return _MODEL_BY_NAME[kind](**params)


def legit_links(model: Model) -> list[tuple[int, int]]:
    """All (tx, rx) pairs with a legitimate-side gain."""
    return [(tx, rx) for rx in model.receivers for tx in model.transmitters]


@dataclass(frozen=True)
class ChannelRealization:
    """All channel gains of one network draw, plus the noise variance.

    ``legit_gains`` maps (tx, rx, t) to the gain from transmitter ``tx`` to
    legitimate receiver ``rx`` in slot ``t`` (slots are 1-based); ``eve_gains``
    maps (tx, t) to the gain toward the eavesdropper.  In fixed mode the gains
    are constant in t but stored per slot so fixed and fading realizations
    share one shape.
    """

    model: Model
    slots: int
    fixed: bool
    distribution: GainDistribution
    seed: int
    noise_variance: float
    legit_gains: Mapping[tuple[int, int, int], float] = field(repr=False)
    eve_gains: Mapping[tuple[int, int], float] = field(repr=False)

    def h(self, tx: int, rx: int = 1, t: int = 1) -> float:
        return self.legit_gains[(tx, rx, t)]

    def g(self, tx: int, t: int = 1) -> float:
        return self.eve_gains[(tx, t)]

    def legit_series(self, tx: int, rx: int = 1) -> np.ndarray:
        """Per-slot gains of one legitimate link as a read-only vector."""
        out = np.array([self.legit_gains[(tx, rx, t)] for t in range(1, self.slots + 1)])
        out.setflags(write=False)
        return out

    def eve_series(self, tx: int) -> np.ndarray:
        out = np.array([self.eve_gains[(tx, t)] for t in range(1, self.slots + 1)])
        out.setflags(write=False)
        return out

    def min_abs_gain(self) -> float:
        legit = min(abs(v) for v in self.legit_gains.values())
        eve = min(abs(v) for v in self.eve_gains.values())
        return min(legit, eve)

    def to_json_dict(self) -> dict:
        return {
            "model": {"kind": self.model.name, **self.model.params()},
            "slots": self.slots,
            "fixed": self.fixed,
            "seed": self.seed,
            "noise_variance": self.noise_variance,
            "distribution": self.distribution.to_json_dict(),
            "gains": [
                {"tx": tx, "rx": rx, "t": t, "value": v}
                for (tx, rx, t), v in sorted(self.legit_gains.items())
            ],
            "eve_gains": [
                {"tx": tx, "t": t, "value": v}
                for (tx, t), v in sorted(self.eve_gains.items())
            ],
        }

    @staticmethod
    def from_json_dict(doc: Mapping) -> "ChannelRealization":
        model = model_from_json_dict(doc["model"])
        legit = {(int(g["tx"]), int(g["rx"]), int(g["t"])): float(g["value"])
                 for g in doc["gains"]}
        eve = {(int(g["tx"]), int(g["t"])): float(g["value"])
               for g in doc["eve_gains"]}
        realization = ChannelRealization(
            model=model,
            slots=int(doc["slots"]),
            fixed=bool(doc["fixed"]),
            distribution=GainDistribution.from_json_dict(doc["distribution"]),
            seed=int(doc["seed"]),
            noise_variance=float(doc["noise_variance"]),
            legit_gains=legit,
            eve_gains=eve,
        )
        _validate_realization(realization)
        return realization


def _validate_realization(r: ChannelRealization) -> None:
    expected = {(tx, rx, t) for (tx, rx) in legit_links(r.model)
                for t in range(1, r.slots + 1)}
    if set(r.legit_gains) != expected:
        raise ParameterError("legit gain index set does not match the model")
    expected_eve = {(tx, t) for tx in r.model.transmitters
                    for t in range(1, r.slots + 1)}
    if set(r.eve_gains) != expected_eve:
        raise ParameterError("eve gain index set does not match the model")
    for v in list(r.legit_gains.values()) + list(r.eve_gains.values()):
        if v == 0.0 or not math.isfinite(v):
            raise ParameterError("all gains must be nonzero and finite")


def sample_channel(model: Model,
                   distribution: GainDistribution | None = None,
                   slots: int = 1,
                   fixed: bool = True,
                   seed: int = 0,
                   noise_variance: float = 1.0) -> ChannelRealization:
    """Draw a channel realization.

    In fading mode every (link, t) gets an independent draw; in fixed mode a
    single per-link draw is replicated across slots.  Each draw uses the
    substream (seed, tag, tx, rx, t), so the result does not depend on
    generation order.
    """
    if distribution is None:
        distribution = GainDistribution()
    if slots < 1:
        raise ParameterError(f"slots must be >= 1, got {slots}")
    if seed < 0:
        raise ParameterError(f"seed must be >= 0, got {seed}")
    if noise_variance <= 0:
        raise ParameterError(f"noise variance must be > 0, got {noise_variance}")

    legit: dict[tuple[int, int, int], float] = {}
    for tx, rx in legit_links(model):
        for t in range(1, slots + 1):
            t_key = 0 if fixed else t
            rng = substream(seed, TAG_LEGIT, tx, rx, t_key)
            legit[(tx, rx, t)] = float(distribution.sample(rng))

    eve: dict[tuple[int, int], float] = {}
    for tx in model.transmitters:
        for t in range(1, slots + 1):
            t_key = 0 if fixed else t
            rng = substream(seed, TAG_EVE, tx, 0, t_key)
            eve[(tx, t)] = float(distribution.sample(rng))

    realization = ChannelRealization(
        model=model,
        slots=slots,
        fixed=fixed,
        distribution=distribution,
        seed=seed,
        noise_variance=noise_variance,
        legit_gains=legit,
        eve_gains=eve,
    )
    _validate_realization(realization)
    return realization


def awgn_vector(length: int, variance: float = 1.0, seed: int = 0) -> np.ndarray:
    """Seeded i.i.d. zero-mean Gaussian noise samples."""
    if length < 1:
        raise ParameterError(f"length must be >= 1, got {length}")
    if variance <= 0:
        raise ParameterError(f"variance must be > 0, got {variance}")
    rng = substream(seed, TAG_NOISE)
    out = rng.normal(0.0, math.sqrt(variance), length)
    out.setflags(write=False)
    return out
