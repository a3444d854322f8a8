import dataclasses
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdof.channel import HelperModel, MacPartialModel, sample_channel
from sdof.errors import CapacityError, EncodingError, ModeError, ParameterError
from sdof.monomial import Monomial
from sdof.pam import (build_helper_scheme, build_partial_csit_fixed,
                      decode_nearest_point, encode_pam, khintchine_groshev_bound,
                      receive_decode_table, receive_value, select_pam_params)


@pytest.fixture
def helper1():
    r = sample_channel(HelperModel(1), fixed=True, seed=3)
    return build_helper_scheme(1, r, P=1e6, delta=0.05)


class TestHelperScheme:
    def test_receiver_table_aligns_all_jamming(self, helper1):
        # every jamming stream arrives with coefficient exactly 1 (symbolic)
        assert helper1.rx_coeffs["U1"] == Monomial.one()
        assert helper1.rx_coeffs["U2"] == Monomial.one()
        assert helper1.rx_coeffs["V2"] == Monomial.from_dict({"h_1": 1, "alpha_2": 1})

    def test_all_jamming_aligned_for_any_m(self):
        for M in (0, 1, 2, 3):
            r = sample_channel(HelperModel(M), fixed=True, seed=M)
            s = build_helper_scheme(M, r)
            assert all(s.rx_coeffs[f"U{j}"] == Monomial.one()
                       for j in range(1, M + 2))

    def test_eavesdropper_jamming_coeffs_distinct(self):
        r = sample_channel(HelperModel(2), fixed=True, seed=12)
        s = build_helper_scheme(2, r)
        coeffs = [s.eve_coeffs[f"U{j}"] for j in (1, 2, 3)]
        assert len(set(coeffs)) == 3
        values = [s.coeff_value("eve", f"U{j}") for j in (1, 2, 3)]
        assert len(set(values)) == 3

    def test_degenerate_no_helpers(self):
        r = sample_channel(HelperModel(0), fixed=True, seed=1)
        s = build_helper_scheme(0, r)
        assert s.message_streams == ()
        assert s.jamming_streams == ("U1",)

    def test_rejects_fading_realization(self):
        r = sample_channel(HelperModel(1), fixed=False, slots=2, seed=1)
        with pytest.raises(ModeError):
            build_helper_scheme(1, r)


class TestParameterRule:
    def test_frozen_q_value(self):
        # floor(10^(6 * 0.95 / 4.1)) = floor(24.56...) = 24
        r = sample_channel(HelperModel(1), fixed=True, seed=3)
        alphas = {2: 0.7}
        Q, a, gamma = select_pam_params(1e6, 1, 0.05, r, alphas)
        assert Q == 24
        assert a == pytest.approx(gamma * 1000.0 / 24)

    def test_delta_near_one_clamps_q(self):
        r = sample_channel(HelperModel(1), fixed=True, seed=3)
        Q, _, _ = select_pam_params(1e6, 1, 0.999, r, {2: 0.7})
        assert Q == 1

    def test_gamma_matches_power_rule(self, helper1):
        r = helper1.realization
        expected = min(
            1.0 / (1.0 / abs(r.h(1)) + abs(helper1.values["alpha_2"])),
            abs(r.h(2)),
        )
        assert helper1.gamma == pytest.approx(expected)

    def test_amplitude_algebra(self, helper1):
        # a (2Q+1) = 2 gamma sqrt(P) + a, so peak amplitude stays under sqrt(P)
        s = helper1
        assert s.a * (2 * s.Q + 1) == pytest.approx(2 * s.gamma * math.sqrt(s.P) + s.a)

    def test_power_must_exceed_one(self):
        r = sample_channel(HelperModel(1), fixed=True, seed=3)
        with pytest.raises(ParameterError):
            select_pam_params(0.5, 1, 0.05, r, {2: 0.7})


class TestMinDistanceBound:
    def test_simple_values(self):
        assert khintchine_groshev_bound(1.0, 1, 1, 0.0) == pytest.approx(0.5)
        assert khintchine_groshev_bound(2.0, 10, 2, 0.1) == pytest.approx(2.0 / 30 ** 2.1)

    def test_monotone_decreasing_in_q(self):
        vals = [khintchine_groshev_bound(1.0, q, 2, 0.05) for q in range(1, 20)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


class TestEncoding:
    def test_zero_symbols_give_zero_inputs(self, helper1):
        x = encode_pam(helper1, {"V2": 0, "U1": 0, "U2": 0})
        assert all(v == 0.0 for v in x.values())

    def test_single_symbol(self, helper1):
        x = encode_pam(helper1, {"V2": 1, "U1": 0, "U2": 0})
        assert x[1] == pytest.approx(helper1.values["alpha_2"] * helper1.a)
        assert x[2] == 0.0

    def test_power_constraint_at_extremes(self, helper1):
        s = helper1
        peak = {tx: 0.0 for tx in (1, 2)}
        for signs in itertools.product((-s.Q, s.Q), repeat=3):
            sym = dict(zip(("V2", "U1", "U2"), signs))
            x = encode_pam(s, sym)
            for tx in peak:
                peak[tx] = max(peak[tx], abs(x[tx]))
        r = s.realization
        expected = s.a * s.Q * (1.0 / abs(r.h(1)) + abs(s.values["alpha_2"]))
        assert peak[1] == pytest.approx(expected)
        assert all(p <= math.sqrt(s.P) * (1 + 1e-12) for p in peak.values())

    def test_encoding_errors(self, helper1):
        with pytest.raises(EncodingError):
            encode_pam(helper1, {"V2": 0, "U1": 0})
        with pytest.raises(EncodingError):
            encode_pam(helper1, {"V2": helper1.Q + 1, "U1": 0, "U2": 0})


class TestDecoding:
    def test_noiseless_round_trip(self, helper1):
        symbols = {"V2": 5, "U1": -3, "U2": 7}
        y = receive_value(helper1, symbols)
        decoded, jam = decode_nearest_point(y, helper1)
        assert decoded == {"V2": 5}
        assert jam == 4

    @given(data=st.data(), M=st.integers(0, 2), Q=st.integers(1, 4))
    @settings(max_examples=120, deadline=None)
    def test_noiseless_recovery_property(self, data, M, Q):
        r = sample_channel(HelperModel(M), fixed=True, seed=17)
        scheme = build_helper_scheme(M, r).with_constellation(Q)
        symbols = {s: data.draw(st.integers(-Q, Q)) for s in scheme.streams}
        y = receive_value(scheme, symbols)
        decoded, jam = decode_nearest_point(y, scheme)
        assert decoded == {s: symbols[s] for s in scheme.message_streams}
        assert jam == sum(symbols[s] for s in scheme.jamming_streams)

    def test_tie_breaks_toward_lexicographically_smallest(self, helper1):
        # force integer receive coefficients: points are 3 v + u with
        # v in {-1,0,1} and u in {-2..2}; the value 1 is hit by both
        # (v=0, u=1) and (v=1, u=-2), and 0.5 sits midway between two points
        rigged = dataclasses.replace(
            helper1, Q=1, a=1.0,
            values={**helper1.values, "h_1": 3.0, "alpha_2": 1.0})
        decoded, jam = decode_nearest_point(1.0, rigged)
        assert (decoded["V2"], jam) == (0, 1)
        decoded, jam = decode_nearest_point(0.5, rigged)
        assert (decoded["V2"], jam) == (0, 0)

    def test_budget_errors_out(self, helper1):
        with pytest.raises(CapacityError):
            receive_decode_table(helper1, budget=10)


class TestPartialCsitFixed:
    def test_stream_counts_and_eve_classes(self):
        r = sample_channel(MacPartialModel(3, 2), fixed=True, seed=6)
        s = build_partial_csit_fixed(3, 2, r)
        assert len(s.message_streams) == 4
        assert len(s.jamming_streams) == 3
        # the eavesdropper resolves exactly K coefficient classes
        assert len({s.eve_coeffs[x] for x in s.streams}) == 3

    def test_messages_hide_under_matching_jamming(self):
        r = sample_channel(MacPartialModel(3, 2), fixed=True, seed=6)
        s = build_partial_csit_fixed(3, 2, r)
        for i in (1, 2):
            for j in (1, 2, 3):
                if j == i:
                    continue
                assert s.eve_coeffs[f"V{i}_{j}"] == s.eve_coeffs[f"U{j}"]

    def test_all_informed_matches_full_scheme_shape(self):
        r = sample_channel(MacPartialModel(3, 3), fixed=True, seed=2)
        s = build_partial_csit_fixed(3, 3, r)
        assert len(s.message_streams) == 3 * 2

    def test_single_informed_looks_like_helper_scheme(self):
        r = sample_channel(MacPartialModel(3, 1), fixed=True, seed=2)
        s = build_partial_csit_fixed(3, 1, r)
        assert len(s.message_streams) == 2
        assert all(s.rx_coeffs[f"U{j}"] == Monomial.one() for j in (1, 2, 3))

    def test_receiver_jamming_aligned_and_power_held(self):
        r = sample_channel(MacPartialModel(3, 2), fixed=True, seed=6)
        s = build_partial_csit_fixed(3, 2, r)
        sym = {x: s.Q for x in s.streams}
        x = encode_pam(s, sym)
        for tx, v in x.items():
            assert abs(v) <= math.sqrt(s.P) * (1 + 1e-12)

    def test_model_mismatch(self):
        r = sample_channel(MacPartialModel(3, 2), fixed=True, seed=6)
        with pytest.raises(ModeError):
            build_partial_csit_fixed(3, 1, r)


def test_with_power_rederives_parameters(helper1):
    boosted = helper1.with_power(1e8)
    assert boosted.Q == math.floor((1e8) ** (0.95 / 4.1))
    assert boosted.gamma == pytest.approx(helper1.gamma)
    assert boosted.a == pytest.approx(boosted.gamma * 1e4 / boosted.Q)
