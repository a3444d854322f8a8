"""Information-theoretic measurement and exact rate formulas.

Closed-form Gaussian entropies give mutual-information values in nats; their
slopes against (1/2) log P, fitted over a power grid, are the measured
degrees of freedom.  The secure-d.o.f. formulas themselves are evaluated in
exact rational arithmetic and never touch floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .channel import (HelperModel, InterferenceModel, MacModel,
                      MacPartialModel, TAG_TRIAL, substream)
from .errors import ParameterError
from .pam import PamScheme, decode_indices, receive_decode_table
from .precoding import (HelperFadingScheme, PartialCsitFadingScheme, PrecoderSet,
                        assemble_receiver_and_eve_matrices, interference_gamma,
                        interference_slots)

SdofQuery = Union[HelperModel, MacModel, MacPartialModel, InterferenceModel]

DEFAULT_POWER_GRID = tuple(10.0 ** e for e in range(2, 9))
SLOPE_FIT_POINTS = 4  # fit on the top grid points to suppress o(log P) transients


def gaussian_entropy(A: np.ndarray, P: float, sigma2: float = 1.0) -> float:
    """Differential entropy (nats) of A·X + N, X ~ N(0, P·I), N ~ N(0, s2·I).

    h = (1/2) log((2 pi e)^M det(P A A^T + sigma2 I)).
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not np.all(np.isfinite(A)):
        raise ParameterError("matrix entries must be finite")
    if P <= 0 or sigma2 <= 0:
        raise ParameterError("P and sigma2 must be positive")
    M = A.shape[0]
    cov = P * (A @ A.T) + sigma2 * np.eye(M)
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        raise ParameterError("covariance lost positive definiteness")
    return 0.5 * (M * math.log(2.0 * math.pi * math.e) + logdet)


@dataclass
class SlopeReport:
    """Least-squares fit of measured values against (1/2) log P."""

    grid: tuple[float, ...]
    values: tuple[float, ...]
    slope: float
    intercept: float
    residual: float  # RMS of the fit
    target: Fraction | None = None

    def to_json_dict(self) -> dict:
        doc = {
            "grid": list(self.grid),
            "values": list(self.values),
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
        }
        if self.target is not None:
            doc["target"] = str(self.target)
        return doc

    def to_csv(self) -> str:
        lines = ["P,value_nats,half_log_P"]
        for p, v in zip(self.grid, self.values):
            lines.append(f"{p:.17g},{v:.17g},{0.5 * math.log(p):.17g}")
        return "\n".join(lines) + "\n"


def fit_dof_slope(grid: Sequence[float], values: Sequence[float],
                  target: Fraction | None = None) -> SlopeReport:
    grid = tuple(float(p) for p in grid)
    values = tuple(float(v) for v in values)
    if len(grid) != len(values):
        raise ParameterError("grid and values must have equal length")
    if len(grid) < 3 or len(set(grid)) != len(grid):
        raise ParameterError("need at least 3 distinct grid points")
    if max(grid) / min(grid) < 100.0:
        raise ParameterError("grid must span at least two decades")
    x = 0.5 * np.log(np.array(grid))
    design = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(design, np.array(values), rcond=None)
    fitted = design @ coef
    residual = float(np.sqrt(np.mean((np.array(values) - fitted) ** 2)))
    return SlopeReport(grid=grid, values=values, slope=float(coef[0]),
                       intercept=float(coef[1]), residual=residual, target=target)


def slope_fit_grid(grid: Sequence[float], values: Sequence[float],
                   points: int = SLOPE_FIT_POINTS) -> tuple[list[float], list[float]]:
    """Top `points` grid entries (by power), for transient-free slope fits."""
    order = np.argsort(grid)
    keep = order[-points:] if len(grid) > points else order
    return [grid[i] for i in keep], [values[i] for i in keep]


# ---------------------------------------------------------------------------
# exact s.d.o.f. formulas
# ---------------------------------------------------------------------------

def sdof_formula(query: SdofQuery) -> Fraction:
    """Optimal (or achievable, for the partially informed MAC) sum secure
    d.o.f. without eavesdropper CSIT."""
    if isinstance(query, HelperModel):
        return Fraction(query.M, query.M + 1)
    if isinstance(query, MacModel):
        return Fraction(query.K - 1, query.K)
    if isinstance(query, MacPartialModel):
        streams = query.m_informed * (query.K - 1)
        return Fraction(streams, streams + 1)
    if isinstance(query, InterferenceModel):
        return Fraction(query.K - 1, 2)
    raise ParameterError(f"unsupported query {query!r}")


@dataclass(frozen=True)
class CsitComparison:
    query: SdofQuery
    with_csit: Fraction
    without_csit: Fraction

    @property
    def loss(self) -> Fraction:
        return self.with_csit - self.without_csit

    def to_json_dict(self) -> dict:
        return {
            "model": self.query.name,
            **self.query.params(),
            "with_csit": str(self.with_csit),
            "without_csit": str(self.without_csit),
            "loss": str(self.loss),
        }


def sdof_formula_with_csit(query: SdofQuery) -> CsitComparison:
    """Known-eavesdropper-CSIT value next to the blind value.

    For the interference network the loss is (K-1)/(2(2K-1)), below 1/4 for
    every K; that bound is asserted here.
    """
    if isinstance(query, HelperModel):
        with_csit = Fraction(query.M, query.M + 1)
    elif isinstance(query, (MacModel, MacPartialModel)):
        K = query.K
        with_csit = Fraction(K * (K - 1), K * (K - 1) + 1)
    elif isinstance(query, InterferenceModel):
        K = query.K
        with_csit = Fraction(K * (K - 1), 2 * K - 1)
    else:
        raise ParameterError(f"unsupported query {query!r}")
    cmp = CsitComparison(query=query, with_csit=with_csit,
                         without_csit=sdof_formula(query))
    if isinstance(query, InterferenceModel) and cmp.loss > Fraction(1, 4):
        raise AssertionError(f"interference CSIT loss {cmp.loss} exceeds 1/4")
    return cmp


def interference_fading_sdof(K: int, n: int) -> Fraction:
    """Sum d.o.f. of the finite-n fading scheme: K(K-1)n^Gamma / M_n."""
    g = interference_gamma(K)
    return Fraction(K * (K - 1) * n ** g, interference_slots(K, n))


@dataclass(frozen=True)
class MacSdofRegion:
    """The region {d_i >= 0, sum d_i <= (K-1)/K} with its corner points."""

    K: int

    @property
    def sum_bound(self) -> Fraction:
        return Fraction(self.K - 1, self.K)

    @property
    def corner_points(self) -> list[tuple[Fraction, ...]]:
        corners = []
        for i in range(self.K):
            point = [Fraction(0)] * self.K
            point[i] = self.sum_bound
            corners.append(tuple(point))
        return corners

    def halfspaces(self) -> list[tuple[tuple[Fraction, ...], Fraction]]:
        """(coefficients, rhs) rows with sum(c_i * d_i) <= rhs."""
        rows: list[tuple[tuple[Fraction, ...], Fraction]] = []
        for i in range(self.K):
            coeffs = [Fraction(0)] * self.K
            coeffs[i] = Fraction(-1)
            rows.append((tuple(coeffs), Fraction(0)))
        rows.append((tuple([Fraction(1)] * self.K), self.sum_bound))
        return rows

    def contains(self, point: Sequence) -> bool:
        if len(point) != self.K:
            raise ParameterError(f"point must have {self.K} coordinates")
        d = [Fraction(p) for p in point]
        return all(x >= 0 for x in d) and sum(d) <= self.sum_bound

    def to_json_dict(self) -> dict:
        return {
            "K": self.K,
            "sum_bound": str(self.sum_bound),
            "halfspaces": [
                {"coefficients": [str(c) for c in coeffs], "rhs": str(rhs)}
                for coeffs, rhs in self.halfspaces()
            ],
            "corner_points": [[str(c) for c in p] for p in self.corner_points],
        }


def mac_sdof_region(K: int) -> MacSdofRegion:
    if K < 1:
        raise ParameterError(f"K must be >= 1, got {K}")
    return MacSdofRegion(K=K)


# ---------------------------------------------------------------------------
# scheme mutual information (Gaussian inputs, closed form)
# ---------------------------------------------------------------------------

@dataclass
class MutualInformationReport:
    P: float
    legit: dict[int, float]   # receiver -> I(messages; observation), nats
    leak: float               # I(all messages; eavesdropper observation), nats


def scheme_mutual_information(scheme, P: float,
                              sigma2: float = 1.0) -> MutualInformationReport:
    """I(V; Y) per legitimate receiver and I(V; Z), with Gaussian inputs.

    Conditional entropies keep only the jamming part of the mixing; the
    difference of log-dets is exact at each P.
    """
    if isinstance(scheme, HelperFadingScheme):
        full = np.hstack([scheme.A_V, scheme.A_U])
        legit = gaussian_entropy(full, P, sigma2) - gaussian_entropy(scheme.A_U, P, sigma2)
        eve_full = np.hstack([scheme.B_V, scheme.B_U])
        leak = gaussian_entropy(eve_full, P, sigma2) - gaussian_entropy(scheme.B_U, P, sigma2)
        return MutualInformationReport(P=P, legit={1: legit}, leak=leak)

    if isinstance(scheme, PartialCsitFadingScheme):
        full = np.hstack([scheme.A_V, scheme.A_U])
        legit = gaussian_entropy(full, P, sigma2) - gaussian_entropy(scheme.A_U, P, sigma2)
        eve_full = np.hstack([scheme.B_V, scheme.B_U])
        leak = gaussian_entropy(eve_full, P, sigma2) - gaussian_entropy(scheme.B_U, P, sigma2)
        return MutualInformationReport(P=P, legit={1: legit}, leak=leak)

    if isinstance(scheme, PrecoderSet):
        mats = assemble_receiver_and_eve_matrices(scheme)
        legit = {
            l: gaussian_entropy(mats.receive_mixing[l], P, sigma2)
            - gaussian_entropy(mats.interference[l], P, sigma2)
            for l in range(1, scheme.K + 1)
        }
        leak = gaussian_entropy(mats.eve_mixing, P, sigma2) \
            - gaussian_entropy(mats.eve_jamming, P, sigma2)
        return MutualInformationReport(P=P, legit=legit, leak=leak)

    raise ParameterError(f"no mutual-information rule for {type(scheme).__name__}")


# ---------------------------------------------------------------------------
# Monte Carlo decoding of the PAM schemes
# ---------------------------------------------------------------------------

@dataclass
class ErrorRateReport:
    """Decoding-error estimate; rate is None when no trials were run.

    ``reliable_rate_nats`` is the decode-based achievable-rate proxy: the
    summed per-stream mutual information of the hard-decision channel
    V_k -> V̂_k, estimated from the confusion counts with a Miller-Madow
    bias correction.  An outer code per stream communicates reliably at
    that rate over the induced channel, and unlike the cruder Fano bound
    (kept as ``fano_rate_nats``) it is not wiped out by the near-miss
    symbol errors that dominate at desk-scale powers.
    """

    P: float
    Q: int
    n_messages: int
    trials: int
    errors: int
    mutual_information_nats: float | None = None

    @property
    def rate(self) -> float | None:
        return None if self.trials == 0 else self.errors / self.trials

    @property
    def reliable_rate_nats(self) -> float | None:
        return self.mutual_information_nats

    @property
    def fano_rate_nats(self) -> float | None:
        if self.rate is None:
            return None
        return (1.0 - self.rate) * self.n_messages * math.log(2 * self.Q + 1)

    def to_json_dict(self) -> dict:
        return {
            "P": self.P, "Q": self.Q, "n_messages": self.n_messages,
            "trials": self.trials, "errors": self.errors,
            "rate": self.rate, "reliable_rate_nats": self.reliable_rate_nats,
            "fano_rate_nats": self.fano_rate_nats,
        }


def _stream_mutual_information(v: np.ndarray, v_hat: np.ndarray) -> float:
    """Plug-in I(V; V̂) in nats from paired samples, Miller-Madow corrected."""
    n = v.size
    joint: dict[tuple[int, int], int] = {}
    left: dict[int, int] = {}
    right: dict[int, int] = {}
    for a, b in zip(v.tolist(), v_hat.tolist()):
        joint[(a, b)] = joint.get((a, b), 0) + 1
        left[a] = left.get(a, 0) + 1
        right[b] = right.get(b, 0) + 1
    mi = sum(c / n * math.log(c * n / (left[a] * right[b]))
             for (a, b), c in joint.items())
    correction = (len(joint) - len(left) - len(right) + 1) / (2 * n)
    return max(0.0, mi - correction)


def monte_carlo_error_rate(scheme: PamScheme, P: float | None = None,
                           trials: int = 10_000, seed: int = 0,
                           noise_variance: float | None = None,
                           budget: int | None = None) -> ErrorRateReport:
    """Fraction of trials in which any message symbol is misdecoded.

    Trials are seeded individually by (seed, trial index) and the underlying
    uniform/Gaussian draws are independent of Q, so runs at different powers
    with the same seed are paired sample-by-sample.
    """
    if trials < 0:
        raise ParameterError("trials must be >= 0")
    if P is not None and P != scheme.P:
        scheme = scheme.with_power(P)
    if noise_variance is None:
        noise_variance = scheme.realization.noise_variance
    report = ErrorRateReport(P=scheme.P, Q=scheme.Q,
                             n_messages=len(scheme.message_streams),
                             trials=trials, errors=0)
    if trials == 0:
        return report

    table = receive_decode_table(scheme) if budget is None \
        else receive_decode_table(scheme, budget=budget)
    n_msg = len(scheme.message_streams)
    n_jam = len(scheme.jamming_streams)
    uniforms = np.empty((trials, n_msg + n_jam))
    noise = np.empty(trials)
    for t in range(trials):
        rng = substream(seed, TAG_TRIAL, t)
        uniforms[t] = rng.random(n_msg + n_jam)
        noise[t] = rng.standard_normal()

    Q = scheme.Q
    symbols = np.floor(uniforms * (2 * Q + 1)).astype(int) - Q
    v_true = symbols[:, :n_msg]
    jam_sum = symbols[:, n_msg:].sum(axis=1)
    coeffs = np.array([scheme.coeff_value("rx", s) * scheme.a
                       for s in scheme.message_streams])
    y = v_true @ coeffs + scheme.a * jam_sum + math.sqrt(noise_variance) * noise

    decoded = decode_indices(table, y)
    v_hat, _ = table.indices_to_symbols(decoded)
    report.errors = int(np.count_nonzero(np.any(v_hat != v_true, axis=1)))
    report.mutual_information_nats = sum(
        _stream_mutual_information(v_true[:, k], v_hat[:, k])
        for k in range(n_msg))
    return report
