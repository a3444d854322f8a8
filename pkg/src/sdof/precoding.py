"""Vector-space alignment schemes for fading channels.

Helper scheme: over M+1 slots the legitimate transmitter mixes one jamming
symbol with M messages so that all jamming collapses onto the all-ones
matrix at the receiver, while the eavesdropper's jamming matrix stays full
rank.  Interference scheme: precoder columns are products of commuting
diagonal generator matrices raised to exponent tuples; multiplying by a
generator shifts one exponent, which proves column-space containment
exactly, column by column.  Ranks are certified numerically by SVD with a
relative threshold.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .channel import (ChannelRealization, HelperModel, InterferenceModel,
                      MacPartialModel, TAG_ALPHA, TAG_SEED_VECTOR, substream)
from .errors import CapacityError, ModeError, ParameterError
from .interference_sets import gain_name
from .monomial import Monomial

DEFAULT_RANK_TOL = 1e-10
DEFAULT_PRECODER_BUDGET = 200_000_000  # total matrix entries


def numeric_rank(A: np.ndarray, tol: float = DEFAULT_RANK_TOL,
                 normalize: bool = True, sweeps: int = 4) -> int:
    """Rank by singular values above tol * sigma_max * max(shape).

    By default the matrix is first equilibrated by a few alternating row and
    column 2-norm scalings.  Scaling rows or columns by nonzero constants is
    multiplication by invertible diagonals, so the true rank is untouched,
    but it stops the product-built precoder matrices (whose entries spread
    over many orders of magnitude per slot) from hiding directions below the
    threshold.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ParameterError("rank needs a 2-D matrix")
    if A.size == 0:
        return 0
    if normalize:
        for _ in range(sweeps):
            rn = np.linalg.norm(A, axis=1, keepdims=True)
            A = A / np.where(rn == 0.0, 1.0, rn)
            cn = np.linalg.norm(A, axis=0, keepdims=True)
            A = A / np.where(cn == 0.0, 1.0, cn)
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0] * max(A.shape)))


# ---------------------------------------------------------------------------
# helper wiretap channel, fading gains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HelperFadingScheme:
    """Mixing matrices of the (M+1)-slot helper scheme.

    A_V[i, j] = h_1(i+1) * alpha_{j+2}(i+1) carries message j at the
    receiver, A_U is all ones (aligned jamming), B_V / B_U are the
    eavesdropper counterparts with B_U[i, j] = g_{j+1}(i+1)/h_{j+1}(i+1).
    T is the receiver's full mixing matrix, kept full rank by re-drawing
    the alphas on numerical failure.
    """

    M: int
    realization: ChannelRealization
    alphas: np.ndarray  # (M, M+1): alpha_k(t) for k = 2..M+1, t = 1..M+1
    A_V: np.ndarray
    A_U: np.ndarray
    B_V: np.ndarray
    B_U: np.ndarray
    T: np.ndarray

    def receiver_system(self) -> np.ndarray:
        """(M+1)x(M+1) system mapping (V_2..V_{M+1}, sum U) to observations."""
        return np.hstack([self.A_V, np.ones((self.M + 1, 1))])


def build_helper_fading(M: int, realization: ChannelRealization,
                        max_retries: int = 100,
                        rank_tol: float = DEFAULT_RANK_TOL) -> HelperFadingScheme:
    if not isinstance(realization.model, HelperModel) or realization.model.M != M:
        raise ModeError(f"realization is not a helper({M}) model")
    if realization.fixed:
        raise ModeError("the vector scheme needs fading gains")
    if realization.slots < M + 1:
        raise ModeError(f"need at least {M + 1} slots, got {realization.slots}")

    slots = M + 1
    h1 = np.array([realization.h(1, 1, t) for t in range(1, slots + 1)])
    for attempt in range(1, max_retries + 1):
        alphas = np.array([
            [float(realization.distribution.sample(
                substream(realization.seed, TAG_ALPHA, attempt, k, t)))
             for t in range(1, slots + 1)]
            for k in range(2, M + 2)
        ]).reshape(M, slots)
        # T rows: the aggregate-jamming row (all ones), then one row per message
        T = np.vstack([np.ones(slots), alphas * h1])
        if numeric_rank(T, rank_tol) == M + 1:
            break
    else:
        raise RuntimeError(f"no full-rank mixing matrix after {max_retries} draws")

    A_V = np.empty((slots, M))
    B_V = np.empty((slots, M))
    B_U = np.empty((slots, M + 1))
    for i in range(slots):
        t = i + 1
        for j in range(M):
            A_V[i, j] = realization.h(1, 1, t) * alphas[j, i]
            B_V[i, j] = realization.g(1, t) * alphas[j, i]
        for j in range(M + 1):
            B_U[i, j] = realization.g(j + 1, t) / realization.h(j + 1, 1, t)
    scheme = HelperFadingScheme(
        M=M, realization=realization, alphas=alphas,
        A_V=A_V, A_U=np.ones((slots, slots)), B_V=B_V, B_U=B_U, T=T,
    )
    for arr in (scheme.alphas, scheme.A_V, scheme.A_U, scheme.B_V, scheme.B_U, scheme.T):
        arr.setflags(write=False)
    return scheme


def zero_force_decode(observations: Sequence[float],
                      scheme: HelperFadingScheme) -> tuple[np.ndarray, float]:
    """Invert the receiver system; returns (message estimates, jamming-sum estimate)."""
    y = np.asarray(observations, dtype=float)
    if y.shape != (scheme.M + 1,):
        raise ParameterError(f"need {scheme.M + 1} observations, got shape {y.shape}")
    x = np.linalg.solve(scheme.receiver_system(), y)
    return x[:scheme.M], float(x[scheme.M])


# ---------------------------------------------------------------------------
# interference channel, fading gains: asymptotic precoders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagonalChannelMatrix:
    """A diagonal matrix of per-slot gains, with its exact symbolic identity."""

    label: str
    entries: np.ndarray
    symbol: Monomial

    def __post_init__(self) -> None:
        self.entries.setflags(write=False)

    def apply(self, matrix: np.ndarray) -> np.ndarray:
        return self.entries[:, None] * matrix


def interference_gamma(K: int) -> int:
    return (K - 1) ** 2


def interference_slots(K: int, n: int) -> int:
    """Block length M_n = (K-1) n^Gamma + (K+1) (n+1)^Gamma."""
    g = interference_gamma(K)
    return (K - 1) * n ** g + (K + 1) * (n + 1) ** g


def message_slots(K: int, tx: int) -> list[int]:
    """Sub-message indices transmitter tx uses: 1..K+1 minus {tx, tx+1}."""
    return [j for j in range(1, K + 2) if j not in (tx, tx + 1)]


def _diag(realization: ChannelRealization, factors: Sequence[tuple[int, int, int]]
          ) -> DiagonalChannelMatrix:
    entries = np.ones(realization.slots)
    symbol = Monomial.one()
    for (j, k, e) in factors:
        series = realization.legit_series(j, k)
        entries = entries * series ** e
        symbol = symbol * Monomial.gen(gain_name(j, k), e)
    return DiagonalChannelMatrix(label=str(symbol), entries=entries, symbol=symbol)


# Explicit generator table for the 3-user network (one column per alignment
# target, four generators each), cross-checked in tests against the general
# construction below.
_THREE_USER_GENERATORS = {
    1: [[(1, 1, -1), (2, 1, 1)],
        [(1, 1, -1), (3, 1, 1)],
        [(1, 2, -1), (3, 2, 1)],
        [(1, 3, -1), (2, 3, 1)]],
    2: [[(2, 1, -1), (3, 1, 1)],
        [(2, 2, -1), (1, 2, 1), (1, 1, -1), (3, 1, 1)],
        [(2, 2, -1), (3, 2, 1)],
        [(2, 3, -1), (1, 3, 1), (1, 1, -1), (3, 1, 1)]],
    3: [[(3, 1, -1), (2, 1, 1), (2, 2, -1), (1, 2, 1)],
        [(3, 2, -1), (1, 2, 1)],
        [(3, 3, -1), (2, 3, 1), (2, 2, -1), (1, 2, 1)],
        [(3, 3, -1), (1, 3, 1)]],
    4: [[(3, 1, -1), (2, 1, 1)],
        [(3, 2, -1), (1, 2, 1)],
        [(3, 3, -1), (2, 3, 1)],
        [(3, 3, -1), (1, 3, 1)]],
}


def _general_generator_factors(K: int, target: int) -> list[list[tuple[int, int, int]]]:
    out: list[list[tuple[int, int, int]]] = []
    if target == 1:
        for i in range(2, K + 1):
            for l in range(1, K + 1):
                if l != i:
                    out.append([(1, l, -1), (i, l, 1)])
    elif target == K + 1:
        for i in range(1, K):
            for l in range(1, K + 1):
                if l != i:
                    out.append([(K, l, -1), (i, l, 1)])
    else:
        k = target
        for i in range(1, K + 1):
            if i in (k - 1, k):
                continue
            for l in range(1, K + 1):
                if l != i:
                    out.append([(k, l, -1), (i, l, 1)])
        for l in range(1, K + 1):
            if k <= K - 1:
                out.append([(k, l, -1), (k - 1, l, 1), (k - 1, 1, -1), (k + 1, 1, 1)])
            else:
                out.append([(K, l, -1), (K - 1, l, 1), (K - 1, 2, -1), (1, 2, 1)])
    return out


def build_cj_generators(K: int, realization: ChannelRealization
                        ) -> dict[int, tuple[DiagonalChannelMatrix, ...]]:
    """Per-target commuting diagonal generators of the cooperative-jamming
    alignment; (K-1)^2 distinct generators per target 1..K+1."""
    if not isinstance(realization.model, InterferenceModel) or realization.model.K != K:
        raise ModeError(f"realization is not an interference({K}) model")
    if K < 3:
        raise ParameterError("the alignment construction starts at K = 3")
    generators: dict[int, tuple[DiagonalChannelMatrix, ...]] = {}
    want = interference_gamma(K)
    for target in range(1, K + 2):
        if K == 3:
            factor_lists = _THREE_USER_GENERATORS[target]
        else:
            factor_lists = _general_generator_factors(K, target)
        mats: list[DiagonalChannelMatrix] = []
        seen: set[Monomial] = set()
        for factors in factor_lists:
            mat = _diag(realization, factors)
            if mat.symbol in seen:
                continue
            seen.add(mat.symbol)
            mats.append(mat)
        if len(mats) != want:
            raise RuntimeError(
                f"target {target}: {len(mats)} generators, expected {want}")
        generators[target] = tuple(mats)
    return generators


@dataclass(frozen=True)
class PrecoderTarget:
    index: int
    generators: tuple[DiagonalChannelMatrix, ...]
    w: np.ndarray
    base: np.ndarray      # columns over exponents {1..n}^Gamma
    extended: np.ndarray  # columns over exponents {1..n+1}^Gamma
    base_exponents: tuple[tuple[int, ...], ...]
    extended_index: Mapping[tuple[int, ...], int]


@dataclass(frozen=True)
class PrecoderSet:
    """All precoding matrices of the fading interference scheme.

    Target k <= K supplies jamming matrix Q_k = targets[k].extended and the
    shared message precoder for sub-message slot k (targets[k].base); target
    K+1 supplies the second jamming block of transmitter K.  The remaining
    second jamming blocks are derived, diagonally scaled copies of message
    precoders so that they align one step ahead.
    """

    K: int
    n: int
    realization: ChannelRealization
    seed: int
    targets: Mapping[int, PrecoderTarget]
    qtilde: Mapping[int, np.ndarray]
    qtilde_scale: Mapping[int, Monomial]

    @property
    def gamma(self) -> int:
        return interference_gamma(self.K)

    @property
    def block_length(self) -> int:
        return interference_slots(self.K, self.n)

    def message_precoder(self, tx: int, slot: int) -> np.ndarray:
        if slot not in message_slots(self.K, tx):
            raise ParameterError(f"transmitter {tx} sends no sub-message {slot}")
        return self.targets[slot].base

    def summary_dict(self) -> dict:
        return {
            "K": self.K,
            "n": self.n,
            "Gamma": self.gamma,
            "M_n": self.block_length,
            "seed": self.seed,
            "targets": {
                str(i): {
                    "generators": len(t.generators),
                    "base_columns": t.base.shape[1],
                    "extended_columns": t.extended.shape[1],
                }
                for i, t in sorted(self.targets.items())
            },
        }


def _power_tables(generators: Sequence[DiagonalChannelMatrix], top: int,
                  slots: int) -> list[np.ndarray]:
    tables = []
    for g in generators:
        t = np.empty((top + 1, slots))
        t[0] = 1.0
        for e in range(1, top + 1):
            t[e] = t[e - 1] * g.entries
        tables.append(t)
    return tables


def _columns(w: np.ndarray, tables: list[np.ndarray],
             exponents: Sequence[tuple[int, ...]]) -> np.ndarray:
    cols = np.empty((w.size, len(exponents)))
    for ci, alpha in enumerate(exponents):
        col = w.copy()
        for gi, e in enumerate(alpha):
            col = col * tables[gi][e]
        cols[:, ci] = col
    return cols


def build_asymptotic_precoders(K: int, n: int, realization: ChannelRealization,
                               seed: int | None = None,
                               budget: int = DEFAULT_PRECODER_BUDGET) -> PrecoderSet:
    """Precoder matrices over exponent tuples, columns in lexicographic order."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    gamma = interference_gamma(K)
    m_n = interference_slots(K, n)
    if realization.slots != m_n:
        raise ModeError(
            f"realization must have exactly M_n = {m_n} slots, got {realization.slots}")
    entries_needed = (K + 1) * m_n * ((n + 1) ** gamma + n ** gamma)
    if entries_needed > budget:
        raise CapacityError(
            f"precoders need {entries_needed} matrix entries, over budget {budget}")
    if seed is None:
        seed = realization.seed

    generators = build_cj_generators(K, realization)
    base_exps = tuple(itertools.product(range(1, n + 1), repeat=gamma))
    ext_exps = tuple(itertools.product(range(1, n + 2), repeat=gamma))
    ext_index = {alpha: i for i, alpha in enumerate(ext_exps)}

    targets: dict[int, PrecoderTarget] = {}
    for idx in range(1, K + 2):
        w = np.array([
            float(realization.distribution.sample(
                substream(seed, TAG_SEED_VECTOR, idx, t)))
            for t in range(1, m_n + 1)
        ])
        tables = _power_tables(generators[idx], n + 1, m_n)
        targets[idx] = PrecoderTarget(
            index=idx,
            generators=generators[idx],
            w=w,
            base=_columns(w, tables, base_exps),
            extended=_columns(w, tables, ext_exps),
            base_exponents=base_exps,
            extended_index=ext_index,
        )

    qtilde: dict[int, np.ndarray] = {}
    qtilde_scale: dict[int, Monomial] = {}
    for k in range(1, K):
        if k <= K - 2:
            num, den = (k + 2, 1), (k, 1)
        else:
            num, den = (1, 2), (K - 1, 2)
        scale = Monomial.gen(gain_name(*num)) / Monomial.gen(gain_name(*den))
        entries = realization.legit_series(*num) / realization.legit_series(*den)
        qtilde[k] = entries[:, None] * targets[k + 1].base
        qtilde_scale[k] = scale
    qtilde[K] = targets[K + 1].extended
    qtilde_scale[K] = Monomial.one()

    return PrecoderSet(K=K, n=n, realization=realization, seed=seed,
                       targets=targets, qtilde=qtilde, qtilde_scale=qtilde_scale)


def mutate_qtilde(pre: PrecoderSet, k: int, seed: int = 0) -> PrecoderSet:
    """Replace one derived jamming precoder with a fresh random matrix."""
    rng = substream(seed, TAG_SEED_VECTOR, 99, k)
    broken = dict(pre.qtilde)
    broken[k] = rng.uniform(0.5, 2.0, pre.qtilde[k].shape)
    return replace(pre, qtilde=broken)


# ---------------------------------------------------------------------------
# alignment-equation verification
# ---------------------------------------------------------------------------

@dataclass
class EquationInstance:
    receiver: int
    lhs_label: str
    rhs_label: str
    exact: bool
    numeric: bool


@dataclass
class FadingEquation:
    target: int
    generator: str
    instances: list[EquationInstance] = field(default_factory=list)

    @property
    def exact_ok(self) -> bool:
        return all(i.exact for i in self.instances)

    @property
    def numeric_ok(self) -> bool:
        return all(i.numeric for i in self.instances)

    def to_json_dict(self) -> dict:
        return {
            "target": self.target,
            "generator": self.generator,
            "exact": self.exact_ok,
            "numeric": self.numeric_ok,
            "instances": [
                {"receiver": i.receiver, "lhs": i.lhs_label, "rhs": i.rhs_label,
                 "exact": i.exact, "numeric": i.numeric}
                for i in self.instances
            ],
        }


@dataclass
class FadingAlignmentReport:
    K: int
    n: int
    block_length: int
    rank_tol: float
    equations: list[FadingEquation]

    @property
    def ok(self) -> bool:
        return all(e.exact_ok and e.numeric_ok for e in self.equations)

    @property
    def failures(self) -> list[FadingEquation]:
        return [e for e in self.equations if not (e.exact_ok and e.numeric_ok)]

    def to_json_dict(self) -> dict:
        return {
            "K": self.K,
            "n": self.n,
            "M_n": self.block_length,
            "rank_tol": self.rank_tol,
            "equations": [e.to_json_dict() for e in self.equations],
            "pass_count": sum(1 for e in self.equations
                              if e.exact_ok and e.numeric_ok),
            "total": len(self.equations),
            "all_pass": self.ok,
        }


def _gain_mono(j: int, k: int, e: int = 1) -> Monomial:
    return Monomial.gen(gain_name(j, k), e)


def _instance_table(K: int) -> list[dict]:
    """Receiver-form alignment equations, one row per (lhs, rhs, receiver).

    lhs_source names a stored matrix: ("base", j) is the shared message
    precoder of slot j (also the un-scaled part of derived jamming),
    ("qtilde", k) a derived jamming block.
    """
    rows: list[dict] = []
    for k in range(2, K + 1):       # first jamming block of tx 1
        for l in range(1, K + 1):
            if l != k:
                rows.append(dict(target=1, receiver=l, lhs_source=("base", 1),
                                 lhs_scale=(k, l), rhs_scale=(1, l),
                                 lhs_label=f"H_{k}{l} P_{k}1",
                                 rhs_label=f"H_1{l} Q_1"))
    for k in range(1, K):           # second jamming block of tx K
        for l in range(1, K + 1):
            if l != k:
                rows.append(dict(target=K + 1, receiver=l,
                                 lhs_source=("base", K + 1),
                                 lhs_scale=(k, l), rhs_scale=(K, l),
                                 lhs_label=f"H_{k}{l} P_{k}{K + 1}",
                                 rhs_label=f"H_{K}{l} Q~_{K}"))
    for k in range(2, K + 1):       # remaining jamming blocks
        for l in range(1, K + 1):
            rows.append(dict(target=k, receiver=l, lhs_source=("qtilde", k - 1),
                             lhs_scale=(k - 1, l), rhs_scale=(k, l),
                             lhs_label=f"H_{k - 1}{l} Q~_{k - 1}",
                             rhs_label=f"H_{k}{l} Q_{k}"))
        for i in range(1, K + 1):
            if i in (k - 1, k):
                continue
            for l in range(1, K + 1):
                if l != i:
                    rows.append(dict(target=k, receiver=l, lhs_source=("base", k),
                                     lhs_scale=(i, l), rhs_scale=(k, l),
                                     lhs_label=f"H_{i}{l} P_{i}{k}",
                                     rhs_label=f"H_{k}{l} Q_{k}"))
    return rows


def verify_alignment_equations(pre: PrecoderSet,
                               realization: ChannelRealization | None = None,
                               tol: float = DEFAULT_RANK_TOL) -> FadingAlignmentReport:
    """Check every alignment equation two independent ways.

    Exact: each left-hand column must reappear verbatim (up to float
    round-off of reordered products) among the right-hand columns at the
    exponent-shifted index.  Numeric: rank([lhs rhs]) == rank(rhs) at tol.
    Failures are report content, not exceptions.
    """
    if realization is None:
        realization = pre.realization
    K = pre.K
    equations: dict[tuple[int, Monomial], FadingEquation] = {}

    for row in _instance_table(K):
        target = pre.targets[row["target"]]
        kind, src = row["lhs_source"]
        if kind == "base":
            lhs_plain = pre.targets[src].base
            extra = Monomial.one()
        else:
            lhs_plain = pre.qtilde[src]
            extra = pre.qtilde_scale[src]
        l_tx, l_rx = row["lhs_scale"]
        r_tx, r_rx = row["rhs_scale"]
        lhs = realization.legit_series(l_tx, l_rx)[:, None] * lhs_plain
        rhs = realization.legit_series(r_tx, r_rx)[:, None] * target.extended

        gen = (_gain_mono(r_tx, r_rx, -1) * _gain_mono(l_tx, l_rx) * extra)
        position = next((gi for gi, g in enumerate(target.generators)
                         if g.symbol == gen), None)

        exact = position is not None
        if exact:
            shift = np.zeros(len(target.generators), dtype=int)
            shift[position] = 1
            for ci, alpha in enumerate(target.base_exponents):
                key = tuple(np.array(alpha) + shift)
                qi = target.extended_index.get(key)
                if qi is None or not np.allclose(lhs[:, ci], rhs[:, qi],
                                                 rtol=1e-9, atol=0.0):
                    exact = False
                    break
        numeric = numeric_rank(np.hstack([lhs, rhs]), tol) == numeric_rank(rhs, tol)

        key = (row["target"], gen)
        eq = equations.get(key)
        if eq is None:
            eq = FadingEquation(target=row["target"], generator=str(gen))
            equations[key] = eq
        eq.instances.append(EquationInstance(
            receiver=row["receiver"], lhs_label=row["lhs_label"],
            rhs_label=row["rhs_label"], exact=exact, numeric=numeric))

    ordered = sorted(equations.values(), key=lambda e: (e.target, e.generator))
    return FadingAlignmentReport(K=K, n=pre.n,
                                 block_length=pre.block_length,
                                 rank_tol=tol, equations=ordered)


# ---------------------------------------------------------------------------
# stacked receiver / eavesdropper matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchemeMatrices:
    """Stacked mixing matrices of the interference scheme over M_n slots."""

    K: int
    n: int
    block_length: int
    decoders: Mapping[int, np.ndarray]       # Lambda_l: [desired | aligned jamming]
    interference: Mapping[int, np.ndarray]   # all unintended blocks at receiver l
    eve_jamming: np.ndarray                  # I_E: all jamming blocks at the eavesdropper
    receive_mixing: Mapping[int, np.ndarray]  # every block arriving at receiver l
    eve_mixing: np.ndarray                   # every block arriving at the eavesdropper
    desired_columns: int
    aligned_jamming_columns: int


def assemble_receiver_and_eve_matrices(pre: PrecoderSet,
                                       realization: ChannelRealization | None = None
                                       ) -> SchemeMatrices:
    if realization is None:
        realization = pre.realization
    K, n = pre.K, pre.n
    gamma = pre.gamma

    def hseries(tx: int, rx: int) -> np.ndarray:
        return realization.legit_series(tx, rx)[:, None]

    decoders: dict[int, np.ndarray] = {}
    interference: dict[int, np.ndarray] = {}
    receive_mixing: dict[int, np.ndarray] = {}
    for l in range(1, K + 1):
        desired = [hseries(l, l) * pre.targets[j].base for j in message_slots(K, l)]
        unintended = [hseries(k, l) * pre.targets[j].base
                      for k in range(1, K + 1) if k != l
                      for j in message_slots(K, k)]
        jamming = [hseries(k, l) * pre.targets[k].extended for k in range(1, K + 1)]
        jamming += [hseries(k, l) * pre.qtilde[k] for k in range(1, K + 1)]
        aligned = [hseries(k, l) * pre.targets[k].extended for k in range(1, K + 1)]
        aligned.append(hseries(K, l) * pre.qtilde[K])
        decoders[l] = np.hstack(desired + aligned)
        interference[l] = np.hstack(unintended + jamming)
        receive_mixing[l] = np.hstack(desired + unintended + jamming)

    gseries = {k: realization.eve_series(k)[:, None] for k in range(1, K + 1)}
    eve_jam = [gseries[k] * pre.targets[k].extended for k in range(1, K + 1)]
    eve_jam += [gseries[k] * pre.qtilde[k] for k in range(1, K + 1)]
    eve_msg = [gseries[k] * pre.targets[j].base
               for k in range(1, K + 1) for j in message_slots(K, k)]
    eve_jamming = np.hstack(eve_jam)

    return SchemeMatrices(
        K=K, n=n, block_length=pre.block_length,
        decoders=decoders, interference=interference,
        eve_jamming=eve_jamming,
        receive_mixing=receive_mixing,
        eve_mixing=np.hstack(eve_msg + eve_jam),
        desired_columns=(K - 1) * n ** gamma,
        aligned_jamming_columns=(K + 1) * (n + 1) ** gamma,
    )


def export_matrices_csv(pre: PrecoderSet, path: str) -> None:
    """Row-major dump of every precoder matrix, 17 significant digits."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("matrix,row,values\n")
        named = [(f"P~_{i}", t.base) for i, t in sorted(pre.targets.items())]
        named += [(f"Q_{i}", pre.targets[i].extended) for i in range(1, pre.K + 1)]
        named += [(f"Q~_{k}", pre.qtilde[k]) for k in range(1, pre.K + 1)]
        for name, mat in named:
            for r in range(mat.shape[0]):
                row = ";".join(f"{v:.17g}" for v in mat[r])
                fh.write(f"{name},{r},{row}\n")


# ---------------------------------------------------------------------------
# partially informed MAC, fading gains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PartialCsitFadingScheme:
    """Per-slot coefficient tables of the partially informed MAC scheme.

    Over m(K-1)+1 slots, informed transmitter i sends V_ij on
    g_j(t)/(h_j(t) g_i(t)); every transmitter jams on 1/h_i(t).  A_V/A_U are
    the receiver-side stacked coefficients (A_U is all ones: aligned),
    B_V/B_U the eavesdropper side, where the column of V_ij equals the
    column of U_j exactly.
    """

    K: int
    m_informed: int
    slots: int
    realization: ChannelRealization
    message_streams: tuple[str, ...]
    A_V: np.ndarray
    A_U: np.ndarray
    B_V: np.ndarray
    B_U: np.ndarray

    def receiver_system(self) -> np.ndarray:
        return np.hstack([self.A_V, np.ones((self.slots, 1))])


def build_partial_csit_fading(K: int, m_informed: int,
                              realization: ChannelRealization
                              ) -> PartialCsitFadingScheme:
    model = realization.model
    if not isinstance(model, MacPartialModel) or (model.K, model.m_informed) != (K, m_informed):
        raise ModeError(f"realization is not a mac_partial({K}, {m_informed}) model")
    if realization.fixed:
        raise ModeError("the vector scheme needs fading gains")
    slots = m_informed * (K - 1) + 1
    if realization.slots < slots:
        raise ModeError(f"need at least {slots} slots, got {realization.slots}")

    streams = [(i, j) for i in range(1, m_informed + 1)
               for j in range(1, K + 1) if j != i]
    A_V = np.empty((slots, len(streams)))
    B_V = np.empty((slots, len(streams)))
    B_U = np.empty((slots, K))
    for row in range(slots):
        t = row + 1
        for col, (i, j) in enumerate(streams):
            A_V[row, col] = (realization.h(i, 1, t) * realization.g(j, t)
                             / (realization.h(j, 1, t) * realization.g(i, t)))
            B_V[row, col] = realization.g(j, t) / realization.h(j, 1, t)
        for j in range(1, K + 1):
            B_U[row, j - 1] = realization.g(j, t) / realization.h(j, 1, t)
    scheme = PartialCsitFadingScheme(
        K=K, m_informed=m_informed, slots=slots, realization=realization,
        message_streams=tuple(f"V{i}_{j}" for (i, j) in streams),
        A_V=A_V, A_U=np.ones((slots, K)), B_V=B_V, B_U=B_U,
    )
    for arr in (scheme.A_V, scheme.A_U, scheme.B_V, scheme.B_U):
        arr.setflags(write=False)
    return scheme


def partial_csit_decode(observations: Sequence[float],
                        scheme: PartialCsitFadingScheme) -> tuple[np.ndarray, float]:
    """Invert the square receiver system; returns (messages, jamming sum)."""
    y = np.asarray(observations, dtype=float)
    if y.shape != (scheme.slots,):
        raise ParameterError(f"need {scheme.slots} observations, got {y.shape}")
    x = np.linalg.solve(scheme.receiver_system(), y)
    return x[:-1], float(x[-1])
