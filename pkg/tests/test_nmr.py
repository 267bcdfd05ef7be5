import math

import numpy as np
import pytest
from oracles import eq7_state, equal_up_to_phase, rot

from robust_search import nmr
from robust_search.amplify import SearchProblem, iterate_schedule
from robust_search.qcore import (
    DensityMatrix,
    StateVector,
    UnitaryOperator,
    conjugate,
    diagonal_phase_unitary,
    equal_up_to_global_phase,
)

PI = np.pi
UNIFORM = np.full(4, 0.5)


def z_block(seq):
    """2x2 matrix of a single-spin sequence acting on spin 1."""
    u = seq.unitary().data
    return u[::2, ::2]


class TestTypes:
    def test_spin_system_defaults(self):
        assert nmr.CHLOROFORM.j_coupling == 209.0
        with pytest.raises(ValueError):
            nmr.SpinSystem(j_coupling=0)

    def test_equilibrium_deviation(self):
        dev = nmr.EquilibriumState().deviation
        assert np.allclose(dev, np.diag(np.diag(dev)))
        assert abs(np.trace(dev)) < 1e-12
        np.testing.assert_allclose(np.diag(dev).real, [0.625, 0.375, -0.375, -0.625])

    def test_element_validation(self):
        with pytest.raises(ValueError):
            nmr.rf(1, 0.0, "x")
        with pytest.raises(ValueError):
            nmr.rf(3, 1.0, "x")
        with pytest.raises(ValueError):
            nmr.rf(1, 1.0, "z")
        with pytest.raises(ValueError):
            nmr.delay(-1)

    def test_crusher_has_no_unitary(self):
        with pytest.raises(ValueError):
            nmr.PulseSequence([nmr.CRUSH]).unitary()


class TestPPS:
    def test_populations(self):
        np.testing.assert_array_equal(nmr.pps_00().populations(), [1, 0, 0, 0])

    def test_trace_and_purity(self):
        rho = nmr.pps_00()
        assert np.trace(rho.data) == 1
        assert rho.purity() == pytest.approx(1)


class TestPreparation:
    @pytest.mark.parametrize("theta, alpha", [(PI / 4, 0.146), (PI / 6, 0.067), (PI / 9, 0.030)])
    def test_reported_overlaps(self, theta, alpha):
        assert nmr.prepare_superposition(theta).data[3].real == pytest.approx(alpha, abs=5e-4)

    def test_matches_y_pulses(self):
        theta = 0.7
        u = UnitaryOperator(np.kron(rot("y", theta), rot("y", theta)))
        assert equal_up_to_phase((u @ StateVector.basis(0, 4)).data, nmr.prepare_superposition(theta).data, 1e-14)

    def test_pulse_agrees_with_closed_form(self):
        rho = nmr.run_sequence(nmr.theta_pulse(PI / 6), nmr.pps_00())
        expected = nmr.prepare_superposition(PI / 6).projector()
        np.testing.assert_allclose(rho.data, expected.data, atol=1e-14)

    def test_small_angle_limit(self):
        np.testing.assert_allclose(nmr.prepare_superposition(1e-9).data, [1, 0, 0, 0], atol=1e-9)

    @pytest.mark.parametrize("theta", [0.0, PI, -0.1])
    def test_range(self, theta):
        with pytest.raises(ValueError):
            nmr.prepare_superposition(theta)


class TestCompositeZ:
    def test_three_rf_elements(self):
        seq = nmr.composite_z(0.4, "+", 2)
        assert [(e.kind, e.phase_axis, e.targets) for e in seq] == [
            ("rf_pulse", "y", (2,)),
            ("rf_pulse", "-x", (2,)),
            ("rf_pulse", "-y", (2,)),
        ]

    def test_zero_centre_is_identity(self):
        np.testing.assert_allclose(nmr.composite_z(0.0, "+", 1).unitary().data, np.eye(4), atol=1e-15)

    def test_plus_is_positive_generator(self):
        # [pi/2]_y [beta]_(-x) [pi/2]_(-y) in time order
        beta = PI / 2
        ref = rot("-y", PI / 2) @ rot("-x", beta) @ rot("y", PI / 2)
        assert equal_up_to_phase(ref, np.diag([np.exp(0.5j * beta), np.exp(-0.5j * beta)]), 1e-14)
        assert equal_up_to_phase(z_block(nmr.composite_z(beta, "+", 1)), ref, 1e-14)

    def test_minus_is_adjoint(self):
        plus = z_block(nmr.composite_z(PI / 2, "+", 1))
        minus = z_block(nmr.composite_z(PI / 2, "-", 1))
        assert equal_up_to_phase(minus, plus.conj().T, 1e-14)

    def test_acts_only_on_target(self):
        u = nmr.composite_z(1.0, "+", 2).unitary().data
        np.testing.assert_allclose(u, np.kron(np.eye(2), u[:2, :2]), atol=1e-15)


class TestJEvolution:
    def test_zero(self):
        np.testing.assert_allclose(nmr.j_evolution(0).data, np.eye(4))

    def test_half_over_j(self):
        # exp(+i pi Iz1 Iz2), Iz1 Iz2 = diag(1/4, -1/4, -1/4, 1/4)
        u = nmr.j_evolution(1 / (2 * 209.0))
        expected = np.exp(1j * PI * np.array([0.25, -0.25, -0.25, 0.25]))
        np.testing.assert_allclose(np.diag(u.data), expected, atol=1e-14)
        assert np.count_nonzero(u.data - np.diag(np.diag(u.data))) == 0

    def test_two_over_j_is_trivial(self):
        assert equal_up_to_global_phase(nmr.j_evolution(2 / 209.0), UnitaryOperator.identity(4))

    def test_additive(self):
        a, b = 0.0013, 0.0021
        np.testing.assert_allclose(
            (nmr.j_evolution(a) @ nmr.j_evolution(b)).data, nmr.j_evolution(a + b).data, atol=1e-15
        )


class TestCompiler:
    def test_i00_pi(self):
        assert equal_up_to_global_phase(nmr.compile_i00(PI).unitary(), UnitaryOperator(np.diag([-1, 1, 1, 1])))

    def test_i00_point_nine_pi(self):
        target = diagonal_phase_unitary([0.9 * PI, 0, 0, 0])
        assert equal_up_to_global_phase(nmr.compile_i00(0.9 * PI).unitary(), target)

    def test_i00_on_uniform_ket(self):
        phi = 0.9 * PI
        out = nmr.compile_i00(phi).unitary().data @ UNIFORM
        assert equal_up_to_phase(out, np.array([np.exp(1j * phi), 1, 1, 1]) / 2, 1e-12)

    def test_i00_structure(self):
        seq = nmr.compile_i00(0.9 * PI)
        assert [e.kind for e in seq].count("rf_pulse") == 6
        assert seq.delays() == [pytest.approx(0.45)]
        centres = [e for e in seq if e.phase_axis == "-x"]
        assert [e.flip_angle for e in centres] == [pytest.approx(0.45 * PI)] * 2

    def test_inverse_product_with_forward(self):
        u = nmr.compile_i00_inverse(PI).unitary() @ nmr.compile_i00(PI).unitary()
        assert equal_up_to_global_phase(u, UnitaryOperator.identity(4))

    def test_inverse_point_nine_pi(self):
        target = diagonal_phase_unitary([-0.9 * PI, 0, 0, 0])
        assert equal_up_to_global_phase(nmr.compile_i00_inverse(0.9 * PI).unitary(), target)

    def test_inverse_rules(self):
        fwd, inv = nmr.compile_i00(0.9 * PI), nmr.compile_i00_inverse(0.9 * PI)
        assert inv.delays() == [pytest.approx(1.55)]
        assert fwd.elements[-1].kind == "j_delay" and inv.elements[0].kind == "j_delay"
        flipped = {"-x": "x", "x": "-x"}
        fwd_centres = [e.phase_axis for e in fwd if e.phase_axis in flipped]
        inv_centres = [e.phase_axis for e in inv if e.phase_axis in flipped]
        assert inv_centres == [flipped[a] for a in fwd_centres]

    def test_i11_on_uniform_ket(self):
        out = nmr.compile_i11().unitary().data @ UNIFORM
        assert equal_up_to_phase(out, np.array([1, 1, 1, -1]) / 2, 1e-12)

    def test_i11_is_a_reflection(self):
        u = nmr.compile_i11().unitary()
        assert equal_up_to_global_phase(u @ u, UnitaryOperator.identity(4))

    def test_i11_structure(self):
        seq = nmr.compile_i11()
        assert seq.delays() == [pytest.approx(0.5)]
        centres = [e for e in seq if e.phase_axis == "x"]
        assert len(centres) == 2 and all(e.flip_angle == pytest.approx(PI / 2) for e in centres)

    def test_i11_matches_selective_phase(self):
        from robust_search.amplify import selective_phase

        assert equal_up_to_global_phase(nmr.compile_i11().unitary(), selective_phase(StateVector.basis(3, 4), PI))

    def test_i11_inverse_general(self):
        varphi = 0.8 * PI
        u = nmr.compile_i11_inverse(varphi).unitary() @ nmr.compile_i11(varphi).unitary()
        assert equal_up_to_global_phase(u, UnitaryOperator.identity(4))

    @pytest.mark.parametrize("phi", [0.0, 2 * PI])
    def test_range(self, phi):
        with pytest.raises(ValueError):
            nmr.compile_i00(phi)
        with pytest.raises(ValueError):
            nmr.compile_i00_inverse(phi)


class TestCrusherAndReadout:
    def test_diagonal_unchanged(self):
        rho = DensityMatrix(np.diag([0.1, 0.2, 0.3, 0.4]))
        np.testing.assert_array_equal(nmr.crusher(rho).data, rho.data)

    def test_uniform_superposition(self):
        rho = StateVector(UNIFORM).projector()
        np.testing.assert_allclose(nmr.crusher(rho).data, np.eye(4) / 4)

    def test_populations_pps(self):
        np.testing.assert_array_equal(nmr.measure_populations(nmr.pps_00()), [1, 0, 0, 0])

    def test_populations_pi_over_9(self):
        p = nmr.measure_populations(nmr.prepare_superposition(PI / 9).projector())
        assert p[3] == pytest.approx(math.sin(PI / 18) ** 4, abs=1e-15)
        assert p[3] == pytest.approx(9.1e-4, abs=1e-5)
        assert p.sum() == pytest.approx(1, abs=1e-12)


class TestRunSequence:
    def test_empty(self):
        rho = nmr.pps_00()
        assert nmr.run_sequence(nmr.PulseSequence(), rho) is rho

    def test_compiled_i00_on_pure_state(self):
        phi = 1.1
        s = StateVector(eq7_state(PI / 5))
        got = nmr.run_sequence(nmr.compile_i00(phi), s.projector())
        ref = conjugate(diagonal_phase_unitary([phi, 0, 0, 0]), s.projector())
        np.testing.assert_allclose(got.data, ref.data, atol=1e-12)

    def test_crush_element(self):
        seq = nmr.theta_pulse(PI / 4) + nmr.PulseSequence([nmr.CRUSH])
        rho = nmr.run_sequence(seq, nmr.pps_00())
        assert np.count_nonzero(rho.data - np.diag(np.diag(rho.data))) == 0

    def test_t_sequence_amplifies(self):
        theta = PI / 4
        rho = nmr.run_sequence(nmr.theta_pulse(theta), nmr.pps_00())
        step = nmr.search_sequence(theta, PI, PI, "modified")
        best = 0.0
        for _ in range(14):
            rho = nmr.run_sequence(step, rho)
            best = max(best, nmr.measure_populations(rho)[3])
        assert best >= 0.9

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            nmr.run_sequence(nmr.PulseSequence(), DensityMatrix(np.eye(2) / 2))

    @pytest.mark.parametrize("algorithm", ["original", "modified"])
    def test_matches_abstract_schedule(self, algorithm):
        theta, phi = PI / 6, 0.9 * PI
        rho = nmr.run_sequence(nmr.theta_pulse(theta), nmr.pps_00())
        step = nmr.search_sequence(theta, phi, PI, algorithm)
        got = [nmr.measure_populations(rho)[3]]
        for _ in range(14):
            rho = nmr.run_sequence(step, rho)
            got.append(nmr.measure_populations(rho)[3])
        problem = SearchProblem(nmr.prepare_superposition(theta), 3, phi, PI)
        ref = [v for _, v in iterate_schedule(problem, algorithm, 14)]
        np.testing.assert_allclose(got, ref, atol=1e-9)


class TestTextFormat:
    def test_format(self):
        seq = nmr.PulseSequence([nmr.rf((1, 2), PI / 9, "y"), nmr.delay(0.45), nmr.CRUSH])
        assert nmr.format_sequence(seq) == "RF 1,2 20 y\nDELAY 0.45\nCRUSH\n"

    def test_six_significant_digits(self):
        seq = nmr.PulseSequence([nmr.rf(1, 1.0, "-x")])
        assert nmr.format_sequence(seq) == "RF 1 57.2958 -x\n"

    def test_round_trip(self):
        seq = nmr.search_sequence(PI / 9, 0.9 * PI, PI, "modified")
        back = nmr.parse_sequence(nmr.format_sequence(seq))
        assert equal_up_to_global_phase(back.unitary(), seq.unitary(), tol=1e-5)
        assert nmr.format_sequence(back) == nmr.format_sequence(seq)

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError, match="line 2"):
            nmr.parse_sequence("CRUSH\nPULSE 1 90 x\n")
