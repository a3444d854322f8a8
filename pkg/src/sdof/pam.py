"""PAM signalling for the fixed-gain alignment schemes.

Streams (message symbols V and jamming symbols U) are placed on scale
factors that are rationally independent except where alignment is wanted:
at the legitimate receiver every jamming stream arrives with coefficient
exactly 1, so the whole jamming load collapses onto a single dimension,
while at the eavesdropper the jamming streams fan out and saturate its
signal space.  Coefficients are tracked symbolically as `Monomial`s over
the gain and constant generators, with a numeric value table alongside.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .channel import ChannelRealization, HelperModel, MacPartialModel, TAG_ALPHA, substream
from .errors import CapacityError, EncodingError, ModeError, ParameterError
from .monomial import Monomial

DEFAULT_DECODE_BUDGET = 10_000_000


@dataclass(frozen=True)
class PamScheme:
    """A PAM constellation scheme plus its symbolic coefficient tables.

    The constellation is the 2Q+1 points a*{-Q..Q}.  ``tx_coeffs`` holds the
    scale factor each transmitter applies to each of its streams,
    ``rx_coeffs``/``eve_coeffs`` the factors the streams arrive with at the
    legitimate receiver and the eavesdropper.  ``values`` maps generator
    names (h_i, g_i, alpha_k) to their sampled numeric values.
    """

    model: HelperModel | MacPartialModel
    realization: ChannelRealization
    P: float
    delta: float
    Q: int
    a: float
    gamma: float
    message_streams: tuple[str, ...]
    jamming_streams: tuple[str, ...]
    owner: Mapping[str, int]
    tx_coeffs: Mapping[str, Monomial]
    rx_coeffs: Mapping[str, Monomial]
    eve_coeffs: Mapping[str, Monomial]
    values: Mapping[str, float]

    @property
    def streams(self) -> tuple[str, ...]:
        return self.message_streams + self.jamming_streams

    def coeff_value(self, table: str, stream: str) -> float:
        coeffs = {"tx": self.tx_coeffs, "rx": self.rx_coeffs, "eve": self.eve_coeffs}[table]
        return coeffs[stream].evaluate(self.values)

    def constellation(self) -> np.ndarray:
        return self.a * np.arange(-self.Q, self.Q + 1)

    def with_power(self, P: float, delta: float | None = None) -> "PamScheme":
        """Same coefficients and gains, parameters re-derived for a new power."""
        delta = self.delta if delta is None else delta
        Q, a, gamma = _pam_params(P, self._receive_dimension(), delta, self._peak_sums())
        return replace(self, P=P, delta=delta, Q=Q, a=a, gamma=gamma)

    def with_constellation(self, Q: int) -> "PamScheme":
        """Force a constellation size, rescaling a to keep the power budget."""
        if Q < 1:
            raise ParameterError(f"Q must be >= 1, got {Q}")
        return replace(self, Q=Q, a=self.gamma * math.sqrt(self.P) / Q)

    def _receive_dimension(self) -> int:
        return len(self.message_streams) + 1

    def _peak_sums(self) -> list[float]:
        """Per transmitter, the sum of |coefficient| over its streams."""
        sums: dict[int, float] = {}
        for s in self.streams:
            tx = self.owner[s]
            sums[tx] = sums.get(tx, 0.0) + abs(self.tx_coeffs[s].evaluate(self.values))
        return [sums[tx] for tx in sorted(sums)]


def _pam_params(P: float, receive_dim: int, delta: float,
                peak_sums: list[float]) -> tuple[int, float, float]:
    if P <= 1:
        raise ParameterError(f"power must exceed 1, got {P}")
    if not (0 < delta < 1):
        raise ParameterError(f"delta must be in (0, 1), got {delta}")
    exponent = (1.0 - delta) / (2.0 * (receive_dim + delta))
    Q = max(1, math.floor(P ** exponent))
    gamma = min(1.0 / s for s in peak_sums)
    a = gamma * math.sqrt(P) / Q
    return Q, a, gamma


def select_pam_params(P: float, M: int, delta: float,
                      realization: ChannelRealization,
                      alphas: Mapping[int, float]) -> tuple[int, float, float]:
    """Constellation parameters (Q, a, gamma) for the helper scheme.

    Q = floor(P^((1-delta)/(2(M+1+delta)))), clamped to >= 1, and gamma is the
    largest constant that keeps every transmitter inside |X| <= sqrt(P):
    gamma = min{(1/|h_1| + sum_k |alpha_k|)^-1, |h_2|, ..., |h_{M+1}|}.
    """
    peak_sums = [1.0 / abs(realization.h(1)) + sum(abs(alphas[k]) for k in sorted(alphas))]
    peak_sums += [1.0 / abs(realization.h(j)) for j in range(2, M + 2)]
    return _pam_params(P, M + 1, delta, peak_sums)


def khintchine_groshev_bound(a: float, Q: int, M: int, delta: float,
                             k_delta: float = 1.0) -> float:
    """Minimum-distance lower bound k_delta * a / ((M+1)Q)^(M+delta).

    k_delta is an existence constant with no certified value; outputs that
    use the default are labelled non-certified in reports.
    """
    if a <= 0 or Q < 1 or M < 0 or k_delta <= 0:
        raise ParameterError("all arguments must be positive (M >= 0)")
    return k_delta * a / ((M + 1) * Q) ** (M + delta)


def build_helper_scheme(M: int, realization: ChannelRealization,
                        P: float = 1e6, delta: float = 0.05) -> PamScheme:
    """Helper wiretap scheme for fixed gains.

    The legitimate transmitter sends U_1/h_1 plus alpha_k-weighted messages
    V_k; helper j sends U_j/h_j.  All jamming then lands on receive
    coefficient 1 while the eavesdropper sees it spread over g_j/h_j.
    The alpha_k are drawn from the gain distribution, independent of all
    gains, which makes them rationally independent almost surely.
    """
    if not isinstance(realization.model, HelperModel) or realization.model.M != M:
        raise ModeError(f"realization is not a helper({M}) model")
    if not realization.fixed:
        raise ModeError("the PAM helper scheme requires fixed gains")

    values: dict[str, float] = {}
    for i in range(1, M + 2):
        values[f"h_{i}"] = realization.h(i)
        values[f"g_{i}"] = realization.g(i)
    alphas: dict[int, float] = {}
    for k in range(2, M + 2):
        rng = substream(realization.seed, TAG_ALPHA, 0, k)
        alphas[k] = float(realization.distribution.sample(rng))
        values[f"alpha_{k}"] = alphas[k]

    message_streams = tuple(f"V{k}" for k in range(2, M + 2))
    jamming_streams = tuple(f"U{j}" for j in range(1, M + 2))
    owner = {f"V{k}": 1 for k in range(2, M + 2)}
    owner.update({f"U{j}": j for j in range(1, M + 2)})

    tx_coeffs = {f"U{j}": Monomial.gen(f"h_{j}", -1) for j in range(1, M + 2)}
    tx_coeffs.update({f"V{k}": Monomial.gen(f"alpha_{k}") for k in range(2, M + 2)})

    rx_coeffs = {f"U{j}": Monomial.one() for j in range(1, M + 2)}
    rx_coeffs.update({
        f"V{k}": Monomial.gen("h_1") * Monomial.gen(f"alpha_{k}") for k in range(2, M + 2)
    })

    eve_coeffs = {
        f"U{j}": Monomial.gen(f"g_{j}") * Monomial.gen(f"h_{j}", -1)
        for j in range(1, M + 2)
    }
    eve_coeffs.update({
        f"V{k}": Monomial.gen("g_1") * Monomial.gen(f"alpha_{k}") for k in range(2, M + 2)
    })

    Q, a, gamma = select_pam_params(P, M, delta, realization, alphas)
    return PamScheme(
        model=realization.model, realization=realization,
        P=P, delta=delta, Q=Q, a=a, gamma=gamma,
        message_streams=message_streams, jamming_streams=jamming_streams,
        owner=owner, tx_coeffs=tx_coeffs, rx_coeffs=rx_coeffs,
        eve_coeffs=eve_coeffs, values=values,
    )


def build_partial_csit_fixed(K: int, m_informed: int,
                             realization: ChannelRealization,
                             P: float = 1e6, delta: float = 0.05) -> PamScheme:
    """Partially informed MAC scheme for fixed gains.

    Informed transmitter i sends V_ij on g_j/(h_j g_i) for every j != i plus
    U_i/h_i; uninformed transmitters jam only.  At the receiver all U_i align
    on coefficient 1; at the eavesdropper V_ij arrives on g_j/h_j, exactly
    underneath U_j.
    """
    model = realization.model
    if not isinstance(model, MacPartialModel) or model.K != K:
        raise ModeError(f"realization is not a mac_partial({K}, ...) model")
    if model.m_informed != m_informed:
        raise ModeError("m_informed does not match the realization model")
    if not realization.fixed:
        raise ModeError("the fixed-gain scheme requires fixed gains")

    values: dict[str, float] = {}
    for i in range(1, K + 1):
        values[f"h_{i}"] = realization.h(i)
        values[f"g_{i}"] = realization.g(i)

    message_streams = tuple(
        f"V{i}_{j}" for i in range(1, m_informed + 1)
        for j in range(1, K + 1) if j != i
    )
    jamming_streams = tuple(f"U{i}" for i in range(1, K + 1))
    owner: dict[str, int] = {f"U{i}": i for i in range(1, K + 1)}
    tx_coeffs: dict[str, Monomial] = {
        f"U{i}": Monomial.gen(f"h_{i}", -1) for i in range(1, K + 1)
    }
    rx_coeffs: dict[str, Monomial] = {f"U{i}": Monomial.one() for i in range(1, K + 1)}
    eve_coeffs: dict[str, Monomial] = {
        f"U{i}": Monomial.gen(f"g_{i}") * Monomial.gen(f"h_{i}", -1)
        for i in range(1, K + 1)
    }
    for i in range(1, m_informed + 1):
        for j in range(1, K + 1):
            if j == i:
                continue
            s = f"V{i}_{j}"
            owner[s] = i
            tx_coeffs[s] = Monomial.from_dict({f"g_{j}": 1, f"h_{j}": -1, f"g_{i}": -1})
            rx_coeffs[s] = tx_coeffs[s] * Monomial.gen(f"h_{i}")
            eve_coeffs[s] = tx_coeffs[s] * Monomial.gen(f"g_{i}")

    dim = m_informed * (K - 1) + 1
    peak_sums: list[float] = []
    for tx in range(1, K + 1):
        total = sum(abs(tx_coeffs[s].evaluate(values))
                    for s in message_streams + jamming_streams if owner[s] == tx)
        peak_sums.append(total)
    Q, a, gamma = _pam_params(P, dim, delta, peak_sums)

    return PamScheme(
        model=model, realization=realization,
        P=P, delta=delta, Q=Q, a=a, gamma=gamma,
        message_streams=message_streams, jamming_streams=jamming_streams,
        owner=owner, tx_coeffs=tx_coeffs, rx_coeffs=rx_coeffs,
        eve_coeffs=eve_coeffs, values=values,
    )


def encode_pam(scheme: PamScheme, symbols: Mapping[str, int]) -> dict[int, float]:
    """Per-transmitter channel inputs for one symbol assignment."""
    missing = set(scheme.streams) - set(symbols)
    if missing:
        raise EncodingError(f"missing symbols for streams {sorted(missing)}")
    inputs: dict[int, float] = {tx: 0.0 for tx in scheme.realization.model.transmitters}
    for s in scheme.streams:
        sym = symbols[s]
        if not (-scheme.Q <= sym <= scheme.Q):
            raise EncodingError(f"symbol {sym} for {s} outside -Q..Q with Q={scheme.Q}")
        inputs[scheme.owner[s]] += scheme.coeff_value("tx", s) * scheme.a * sym
    return inputs


def receive_value(scheme: PamScheme, symbols: Mapping[str, int],
                  table: str = "rx") -> float:
    """Noiseless receive value at the legitimate receiver (or eavesdropper)."""
    return sum(scheme.coeff_value(table, s) * scheme.a * symbols[s]
               for s in scheme.streams)


@dataclass(frozen=True)
class ReceiveTable:
    """Sorted enumeration of the noiseless receive constellation.

    Points are indexed lexicographically over (message symbols..., jamming
    sum); decoding picks the value nearest to the observation and resolves
    exact ties toward the lexicographically smallest point.
    """

    scheme: PamScheme
    shape: tuple[int, ...]
    unique_values: np.ndarray
    representative: np.ndarray  # lexicographic-min flat index per unique value

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def indices_to_symbols(self, flat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Flat point indices -> (message symbol matrix, jamming sums)."""
        parts = np.unravel_index(flat, self.shape)
        Q = self.scheme.Q
        msgs = np.stack([p - Q for p in parts[:-1]], axis=-1) if len(parts) > 1 \
            else np.empty(np.shape(flat) + (0,), dtype=int)
        jam_span = len(self.scheme.jamming_streams) * Q
        return msgs, parts[-1] - jam_span


def receive_decode_table(scheme: PamScheme,
                         budget: int = DEFAULT_DECODE_BUDGET) -> ReceiveTable:
    """Enumerate the receive constellation, or fail on the point budget."""
    Q = scheme.Q
    n_msg = len(scheme.message_streams)
    jam_span = len(scheme.jamming_streams) * Q
    shape = (2 * Q + 1,) * n_msg + (2 * jam_span + 1,)
    points = int(np.prod([int(s) for s in shape], dtype=object))
    if points > budget:
        raise CapacityError(
            f"receive constellation has {points} points, over the budget {budget}; "
            "shrink Q or the stream count"
        )
    coeffs = [scheme.coeff_value("rx", s) for s in scheme.message_streams]
    axes = [np.arange(-Q, Q + 1) * (scheme.a * c) for c in coeffs]
    axes.append(np.arange(-jam_span, jam_span + 1) * scheme.a)
    values = np.zeros(shape)
    for axis_idx, axis in enumerate(axes):
        expand = [None] * len(shape)
        expand[axis_idx] = slice(None)
        values = values + axis[tuple(expand)]
    flat = values.ravel()  # C order = lexicographic in the symbol tuple
    order = np.lexsort((np.arange(flat.size), flat))
    sorted_vals = flat[order]
    uniq, first = np.unique(sorted_vals, return_index=True)
    return ReceiveTable(scheme=scheme, shape=shape,
                        unique_values=uniq, representative=order[first])


def decode_indices(table: ReceiveTable, y: np.ndarray) -> np.ndarray:
    """Nearest-point flat indices for a batch of observations."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    uniq, rep = table.unique_values, table.representative
    pos = np.searchsorted(uniq, y)
    left = np.clip(pos - 1, 0, uniq.size - 1)
    right = np.clip(pos, 0, uniq.size - 1)
    d_left = np.abs(y - uniq[left])
    d_right = np.abs(y - uniq[right])
    take_right = (d_right < d_left) | ((d_right == d_left) & (rep[right] < rep[left]))
    return np.where(take_right, rep[right], rep[left])


def decode_nearest_point(y: float, scheme: PamScheme,
                         budget: int = DEFAULT_DECODE_BUDGET
                         ) -> tuple[dict[str, int], int]:
    """Decode one observation at the legitimate receiver.

    Returns the per-message symbol estimates and the aggregate jamming
    estimate (the sum of all jamming symbols, which is all the receiver can
    see since the jamming streams share one receive coefficient).
    """
    table = receive_decode_table(scheme, budget=budget)
    flat = decode_indices(table, np.array([y]))
    msgs, jam = table.indices_to_symbols(flat)
    decoded = {s: int(msgs[0, i]) for i, s in enumerate(scheme.message_streams)}
    return decoded, int(jam[0])
