import numpy as np
import pytest

from triring import (
    CompositeSpace,
    DensityMatrix,
    NonPhysicalStateError,
    NonUniqueSteadyStateError,
    Operator,
    SpaceMismatchError,
    SteadyStateMethod,
    SteadyStateOptions,
    StepTooLargeError,
    SystemParams,
    annihilation,
    build_hamiltonian,
    build_liouvillian,
    collapse_operators,
    evolve,
    number,
    steady_state,
    trace_violation,
    unvec,
    vec,
)
from conftest import random_density_matrix


def zero_operator(dims):
    space = CompositeSpace(dims)
    return Operator(space, np.zeros((space.dim, space.dim)))


def lindblad_rhs_dense(h, c_list, rho):
    """Direct matrix-form evaluation of the master-equation right side."""
    out = -1j * (h @ rho - rho @ h)
    for c in c_list:
        cd = c.conj().T
        out += c @ rho @ cd - 0.5 * (cd @ c @ rho + rho @ cd @ c)
    return out


class TestVectorization:
    def test_round_trip(self):
        rng = np.random.default_rng(0)
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert np.array_equal(unvec(vec(m), 4), m)

    def test_column_stacking(self):
        m = np.array([[1, 2], [3, 4]])
        assert np.array_equal(vec(m), [1, 3, 2, 4])


class TestLiouvillian:
    def test_zero_for_trivial_model(self):
        liouv = build_liouvillian(zero_operator((2, 2, 2)), [])
        assert liouv.data.nnz == 0
        assert liouv.dim == 64

    def test_two_level_decay_action(self):
        a = annihilation(2)
        liouv = build_liouvillian(zero_operator((2,)), [a])
        ground = np.zeros((2, 2), dtype=complex)
        ground[0, 0] = 1.0
        excited = np.zeros((2, 2), dtype=complex)
        excited[1, 1] = 1.0
        assert np.abs(liouv.data @ vec(ground)).max() == 0.0
        np.testing.assert_allclose(
            liouv.data @ vec(excited), vec(ground - excited), atol=1e-14
        )

    def test_matches_matrix_form_oracle(self):
        # oracle: evaluate the dissipative right side directly in matrix form
        rng = np.random.default_rng(42)
        space = CompositeSpace((2, 2, 2))
        d = space.dim
        h_raw = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        h = Operator(space, 0.5 * (h_raw + h_raw.conj().T))
        c1 = Operator(space, rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
        c2 = Operator(space, rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
        liouv = build_liouvillian(h, [c1, c2])
        rho = random_density_matrix(rng, d)
        got = unvec(liouv.data @ vec(rho), d)
        want = lindblad_rhs_dense(h.data, [c1.data, c2.data], rho)
        np.testing.assert_allclose(got, want, atol=1e-12)
        # trace conservation of the flow for this random state
        assert abs(np.trace(got)) < 1e-12

    def test_trace_preservation_invariant(self, fig2_params):
        space = CompositeSpace((4, 4, 4))
        h = build_hamiltonian(fig2_params, space)
        liouv = build_liouvillian(h, collapse_operators(fig2_params, space))
        assert trace_violation(liouv) < 1e-10

    def test_space_mismatch_rejected(self):
        with pytest.raises(SpaceMismatchError):
            build_liouvillian(zero_operator((2, 2, 2)), [annihilation(2)])


class TestSteadyState:
    def test_vacuum_for_undriven_decay(self):
        liouv = build_liouvillian(zero_operator((4,)), [annihilation(4)])
        rho = steady_state(liouv)
        assert rho.data[0, 0].real == pytest.approx(1.0, abs=1e-12)
        assert np.abs(rho.data).sum() == pytest.approx(1.0, abs=1e-10)

    def test_coherent_fixed_point(self):
        # linear driven cavity: alpha = -i omega / (i delta + kappa / 2)
        a = annihilation(8)
        h = 0.1 * (a + a.dag())
        rho = steady_state(build_liouvillian(h, [a]))
        alpha = np.trace(rho.data @ a.data)
        occupation = np.trace(rho.data @ (a.dag() @ a).data).real
        assert alpha == pytest.approx(-0.2j, abs=1e-6)
        assert occupation == pytest.approx(0.04, abs=1e-6)

    def test_diagnostics_and_invariants(self, fig2_state_555):
        _, _, liouv, rho = fig2_state_555
        diag = rho.diagnostics
        assert diag is not None
        assert diag.residual <= diag.residual_bound
        assert abs(np.trace(rho.data) - 1.0) < 1e-10
        assert np.abs(rho.data - rho.data.conj().T).max() < 1e-10
        assert diag.min_eigenvalue > -1e-8

    def test_residual_satisfies_contract(self, fig2_state_555):
        _, _, liouv, rho = fig2_state_555
        residual = np.linalg.norm(liouv.data @ vec(rho.data))
        bound = 1e-10 * liouv.norm_fro() * np.linalg.norm(vec(rho.data))
        assert residual <= bound

    def test_null_space_agrees_with_trace_constrained(self):
        a = annihilation(6)
        h = 0.3 * number(6) + 0.1 * (a + a.dag())
        liouv = build_liouvillian(h, [a])
        rho_tc = steady_state(liouv)
        rho_ns = steady_state(
            liouv, SteadyStateOptions(method=SteadyStateMethod.NULL_SPACE)
        )
        assert np.linalg.norm(rho_tc.data - rho_ns.data) < 1e-10

    def test_degenerate_kernel_detected(self):
        # pure dephasing preserves every Fock population separately
        liouv = build_liouvillian(zero_operator((6,)), [number(6)])
        with pytest.raises(NonUniqueSteadyStateError):
            steady_state(liouv, SteadyStateOptions(method=SteadyStateMethod.NULL_SPACE))

    def test_options_validation(self):
        with pytest.raises(ValueError):
            SteadyStateOptions(residual_tol=0.0)


class TestDensityMatrix:
    def test_enforcement_normalizes(self):
        rng = np.random.default_rng(1)
        raw = 3.0 * random_density_matrix(rng, 4)
        rho = DensityMatrix.from_array(CompositeSpace((4,)), raw)
        assert np.trace(rho.data).real == pytest.approx(1.0, abs=1e-12)

    def test_non_hermitian_rejected_without_enforcement(self):
        bad = np.array([[0.5, 1.0], [0.0, 0.5]], dtype=complex)
        with pytest.raises(NonPhysicalStateError):
            DensityMatrix.from_array(CompositeSpace((2,)), bad, enforce=False)

    def test_negative_eigenvalue_rejected(self):
        bad = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(NonPhysicalStateError):
            DensityMatrix.from_array(CompositeSpace((2,)), bad, enforce=False)


class TestEvolve:
    def test_fock_state_decay(self):
        # <n>(t) = exp(-t) for a one-photon state under unit-rate decay
        space = CompositeSpace((4,))
        one = np.zeros((4, 4), dtype=complex)
        one[1, 1] = 1.0
        rho0 = DensityMatrix.from_array(space, one, enforce=False)
        rho_t = evolve(zero_operator((4,)), [annihilation(4)], rho0, 1.0, 1e-3)
        occupation = np.trace(rho_t.data @ number(4).data).real
        assert occupation == pytest.approx(np.exp(-1.0), abs=1e-8)

    def test_undriven_ring_empties(self, fig2_params):
        import dataclasses

        params = dataclasses.replace(fig2_params, omega=0.0)
        space = CompositeSpace((2, 2, 2))
        h = build_hamiltonian(params, space)
        c_ops = collapse_operators(params, space)
        rng = np.random.default_rng(3)
        rho0 = DensityMatrix.from_array(space, random_density_matrix(rng, space.dim))
        rho_t = evolve(h, c_ops, rho0, t_final=20.0, dt=0.005)
        assert rho_t.data[0, 0].real > 1 - 1e-6

    def test_agrees_with_direct_solve_small_ring(self, fig2_params):
        space = CompositeSpace((3, 2, 3))
        h = build_hamiltonian(fig2_params, space)
        c_ops = collapse_operators(fig2_params, space)
        rho_ss = steady_state(build_liouvillian(h, c_ops))
        vacuum = np.zeros((space.dim, space.dim), dtype=complex)
        vacuum[0, 0] = 1.0
        rho0 = DensityMatrix.from_array(space, vacuum, enforce=False)
        rho_t = evolve(h, c_ops, rho0, t_final=40.0, dt=0.01)
        assert np.linalg.norm(rho_t.data - rho_ss.data) < 1e-5

    def test_unstable_step_rejected(self):
        space = CompositeSpace((4,))
        h = Operator(space, 50.0 * (annihilation(4).data + annihilation(4).data.conj().T))
        vacuum = np.zeros((4, 4), dtype=complex)
        vacuum[0, 0] = 1.0
        rho0 = DensityMatrix.from_array(space, vacuum, enforce=False)
        with pytest.raises(StepTooLargeError):
            evolve(h, [annihilation(4)], rho0, t_final=5.0, dt=0.5)

    def test_step_validation(self):
        rho0 = DensityMatrix.from_array(
            CompositeSpace((2,)), np.diag([1.0, 0.0]).astype(complex), enforce=False
        )
        with pytest.raises(ValueError):
            evolve(zero_operator((2,)), [], rho0, t_final=1.0, dt=0.0)
        with pytest.raises(ValueError):
            evolve(zero_operator((2,)), [], rho0, t_final=0.5, dt=1.0)
