import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clockinterf.clock import (
    BlochVector,
    ClockState,
    ComplementarityRecord,
    bloch_vector,
    clockness_from_population,
    complementarity_record,
    distinguishability,
    ideal_distinguishability,
    overlap_mag,
    visibility_pure,
    wrap_phase,
)

thetas = st.floats(0.0, math.pi)
phis = st.floats(-20.0, 20.0)
states = st.builds(ClockState, thetas, phis)


def inner(a: ClockState, b: ClockState) -> float:
    """Oracle: direct complex inner product of the amplitude pairs."""
    return abs(np.vdot(a.amplitudes, b.amplitudes))


class TestClockState:
    def test_rejects_theta_outside_range(self):
        with pytest.raises(ValueError, match="theta"):
            ClockState(-1e-9)
        with pytest.raises(ValueError, match="theta"):
            ClockState(math.pi + 1e-9)
        with pytest.raises(ValueError, match="theta"):
            ClockState(math.nan)

    @pytest.mark.parametrize(
        "phi, wrapped",
        [(0.0, 0.0), (math.pi, math.pi), (-math.pi, math.pi), (3 * math.pi, math.pi),
         (2 * math.pi + 0.5, 0.5), (-0.5, -0.5)],
    )
    def test_phi_wrapped(self, phi, wrapped):
        assert ClockState(1.0, phi).phi == pytest.approx(wrapped, abs=1e-12)

    @given(phis)
    def test_wrap_range(self, phi):
        w = wrap_phase(phi)
        assert -math.pi < w <= math.pi
        assert math.cos(w) == pytest.approx(math.cos(phi), abs=1e-9)

    @given(states)
    def test_amplitudes_normalised(self, s):
        assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0, abs=1e-15)


class TestBlochVector:
    @pytest.mark.parametrize(
        "theta, phi, expected",
        [(0.0, 1.3, (0, 0, 1)), (math.pi / 2, 0.0, (1, 0, 0)),
         (math.pi / 2, math.pi / 2, (0, 1, 0))],
    )
    def test_examples(self, theta, phi, expected):
        np.testing.assert_allclose(bloch_vector(ClockState(theta, phi)).as_array(), expected,
                                   atol=1e-15)

    @given(states)
    def test_unit_norm(self, s):
        assert bloch_vector(s).norm == pytest.approx(1.0, abs=1e-12)

    def test_dot(self):
        assert BlochVector(1, 0, 0).dot(BlochVector(0, 1, 0)) == 0.0


class TestOverlapDistinguishability:
    def test_identical(self):
        s = ClockState(0.7, 0.2)
        assert overlap_mag(s, s) == pytest.approx(1.0, abs=1e-15)
        assert distinguishability(s, s) == pytest.approx(0.0, abs=1e-15)

    def test_equator_antipodes(self):
        a, b = ClockState(math.pi / 2, 0), ClockState(math.pi / 2, math.pi)
        assert overlap_mag(a, b) == pytest.approx(0.0, abs=1e-15)
        assert distinguishability(a, b) == pytest.approx(1.0, abs=1e-15)

    def test_quarter_turn(self):
        a, b = ClockState(math.pi / 2, 0), ClockState(math.pi / 2, math.pi / 2)
        assert overlap_mag(a, b) == pytest.approx(inner(a, b), abs=1e-15)
        assert overlap_mag(a, b) == pytest.approx(0.70710678118654752, abs=1e-15)

    def test_sixty_degree_latitude(self):
        a, b = ClockState(math.pi / 3, 0), ClockState(math.pi / 3, math.pi)
        D = distinguishability(a, b)
        assert D == pytest.approx(math.sin(math.pi / 3), abs=1e-15)
        assert D == pytest.approx(math.sqrt(1 - inner(a, b) ** 2), abs=1e-14)

    @given(states, states)
    def test_matches_inner_product(self, a, b):
        assert overlap_mag(a, b) == pytest.approx(inner(a, b), abs=1e-12)

    @given(states, states)
    def test_pythagoras_and_symmetry(self, a, b):
        assert distinguishability(a, b) ** 2 + overlap_mag(a, b) ** 2 == pytest.approx(
            1.0, abs=1e-12)
        assert overlap_mag(a, b) == overlap_mag(b, a)
        assert distinguishability(a, b) == distinguishability(b, a)

    @given(states, states, phis)
    def test_common_azimuth_shift(self, a, b, c):
        shifted = overlap_mag(a.shifted(c), b.shifted(c))
        assert shifted == pytest.approx(overlap_mag(a, b), abs=1e-12)

    @given(thetas, phis, phis)
    def test_latitude_identity(self, theta, phi, dphi):
        a, b = ClockState(theta, phi), ClockState(theta, phi + dphi)
        expected = math.sin(theta) * abs(math.sin(dphi / 2))
        assert distinguishability(a, b) == pytest.approx(expected, abs=1e-12)

    def test_precision_near_coincidence(self):
        # sqrt((1 - a.b)/2) would lose everything below ~1e-8 here
        a, b = ClockState(math.pi / 2, 0.0), ClockState(math.pi / 2, 2e-10)
        assert distinguishability(a, b) == pytest.approx(1e-10, rel=1e-6)


class TestScalars:
    @pytest.mark.parametrize("dphi, expected", [(0.0, 0.0), (math.pi, 1.0),
                                                (math.pi / 2, 0.70710678118654752)])
    def test_ideal_distinguishability(self, dphi, expected):
        assert ideal_distinguishability(dphi) == pytest.approx(expected, abs=1e-15)

    @given(phis)
    def test_ideal_distinguishability_period(self, dphi):
        assert ideal_distinguishability(dphi + 2 * math.pi) == pytest.approx(
            ideal_distinguishability(dphi), abs=1e-12)

    @pytest.mark.parametrize("P, expected", [(0.5, 1.0), (0.0, 0.0), (1.0, 0.0),
                                             (0.25, 0.86602540378443865)])
    def test_clockness(self, P, expected):
        assert clockness_from_population(P) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("P", [-0.01, 1.01, math.nan])
    def test_clockness_rejects(self, P):
        with pytest.raises(ValueError, match="P must lie in"):
            clockness_from_population(P)

    # the arcsin oracle itself loses ~sqrt(eps) within 1e-6 of the endpoints
    @given(st.floats(1e-6, 1.0 - 1e-6))
    def test_clockness_parameterisations_agree(self, P):
        C = clockness_from_population(P)
        assert C == pytest.approx(math.sin(2 * math.asin(math.sqrt(P))), abs=1e-12)
        assert C == pytest.approx(clockness_from_population(1 - P), abs=1e-12)
        assert 0.0 <= C <= 1.0

    @pytest.mark.parametrize(
        "theta, dphi, expected",
        [(0.3, 0.0, 1.0), (math.pi / 2, math.pi, 0.0),
         (math.pi / 2, math.pi / 2, 0.70710678118654752)],
    )
    def test_visibility_examples(self, theta, dphi, expected):
        assert visibility_pure(theta, dphi) == pytest.approx(expected, abs=1e-15)

    @given(thetas, phis, phis)
    def test_visibility_is_overlap(self, theta, phi, dphi):
        V = visibility_pure(theta, dphi)
        assert V == pytest.approx(overlap_mag(ClockState(theta, phi),
                                              ClockState(theta, phi + dphi)), abs=1e-12)
        assert 0.0 <= V <= 1.0

    @given(thetas, phis)
    def test_equality_form(self, theta, dphi):
        total = visibility_pure(theta, dphi) ** 2 + (
            math.sin(theta) * ideal_distinguishability(dphi)) ** 2
        assert total == pytest.approx(1.0, abs=1e-12)


class TestComplementarityRecord:
    @pytest.mark.parametrize(
        "V, C, D_I, total",
        [(1.0, 0.0, 1.0, 1.0), (0.0, 1.0, 1.0, 1.0),
         (0.70710678118654752, 1.0, 0.70710678118654752, 1.0)],
    )
    def test_examples(self, V, C, D_I, total):
        rec = complementarity_record(V, C, D_I)
        assert rec.sum == pytest.approx(total, abs=1e-10)
        assert rec.residual == pytest.approx(total - 1.0, abs=1e-10)

    def test_via_visibility_pure(self):
        V = visibility_pure(math.pi / 2, math.pi / 2)
        rec = complementarity_record(V, 1.0, ideal_distinguishability(math.pi / 2))
        assert abs(rec.residual) < 1e-10

    @pytest.mark.parametrize("args", [(1.1, 0, 0), (0, -0.1, 0), (0, 0, 2.0)])
    def test_rejects_out_of_range(self, args):
        with pytest.raises(ValueError, match="must lie in"):
            complementarity_record(*args)

    def test_sum_not_clamped(self):
        rec = ComplementarityRecord.build(1.0, 1.0, 1.0)
        assert rec.sum == 2.0
        assert rec.residual == 1.0

    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
    def test_sum_nonnegative(self, V, C, D_I):
        assert complementarity_record(V, C, D_I).sum >= 0


@settings(max_examples=50)
@given(states, states)
def test_outputs_in_unit_interval(a, b):
    for value in (overlap_mag(a, b), distinguishability(a, b)):
        assert 0.0 <= value <= 1.0
