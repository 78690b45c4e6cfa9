import math

import numpy as np
import pytest

from nvgates import gates
from nvgates import operators as ops
from nvgates.errors import SpecError, StateError

RNG = np.random.default_rng(2024)


def layout_for(n_nuclei):
    return (2,) * (n_nuclei + 1)


def random_density(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


class TestQGate:
    def test_zero_phase_identity(self):
        u = gates.q_gate(gates.GateSpec(1, "x", 0.0), layout_for(2))
        assert np.allclose(u, np.eye(8))

    def test_eigenphases_at_half_pi(self):
        u = gates.q_gate(gates.GateSpec(1, "x", math.pi / 2.0), layout_for(1))
        phases = np.sort(np.angle(np.linalg.eigvals(u)))
        # Generator sigma_z (x) I^x has eigenvalues +-1/2, so at phase pi/2
        # the unitary carries eigenphases +-pi/4 (doubly degenerate each).
        generator = np.kron(ops.SIGMA_Z, ops.SIGMA_X / 2.0)
        assert np.allclose(np.sort(np.linalg.eigvalsh(generator)), [-0.5, -0.5, 0.5, 0.5])
        assert np.allclose(phases, [-math.pi / 4] * 2 + [math.pi / 4] * 2, atol=1e-12)

    def test_distinct_targets_commute(self):
        layout = layout_for(3)
        for a1 in "xyz":
            for a2 in "xyz":
                u1 = gates.q_gate(gates.GateSpec(1, a1, 0.7), layout)
                u2 = gates.q_gate(gates.GateSpec(3, a2, -1.2), layout)
                assert np.allclose(u1 @ u2, u2 @ u1, atol=1e-13)

    def test_unitary(self):
        u = gates.q_gate(gates.GateSpec(2, "y", 2.31), layout_for(2))
        assert ops.unitarity_defect(u) < 1e-12


class TestElectronRotation:
    def test_full_turn_is_minus_identity(self):
        u = gates.electron_rotation(2.0 * math.pi, 0.0, layout_for(1))
        assert np.allclose(u, -np.eye(4), atol=1e-12)

    def test_two_pi_rotations_square_to_minus_one(self):
        x_pi = gates.electron_rotation(math.pi, 0.0, layout_for(1))
        assert np.allclose(x_pi @ x_pi, -np.eye(4), atol=1e-12)

    def test_pi_rotation_preserves_own_axis(self):
        layout = layout_for(1)
        x_pi = gates.electron_rotation(math.pi, 0.0, layout)
        sx = ops.embed(ops.SIGMA_X, 0, layout)
        assert np.allclose(x_pi @ sx @ x_pi.conj().T, sx, atol=1e-12)

    def test_axis_phase_selects_y(self):
        layout = layout_for(1)
        y_rot = gates.electron_rotation(0.4, math.pi / 2.0, layout)
        sy = ops.embed(ops.SIGMA_Y, 0, layout)
        expected = ops.propagator(sy, -0.2)
        assert np.allclose(y_rot, expected, atol=1e-13)


class TestComposeRecipe:
    def test_two_gate_special_case(self):
        # Both inner phases pi/2 collapse to a three-body exponential.
        layout = layout_for(2)
        phi = 0.37
        recipe = gates.RecipeSpec(
            gates=(gates.GateSpec(1, "x", math.pi / 2), gates.GateSpec(2, "y", math.pi / 2)),
            central_phase=phi,
        )
        u = gates.compose_recipe(recipe, layout)
        generator = (
            ops.embed(ops.SIGMA_X, 0, layout)
            @ ops.embed(ops.spin_half("x"), 1, layout)
            @ ops.embed(ops.spin_half("y"), 2, layout)
        )
        expected = ops.propagator(generator, 4.0 * phi)
        assert ops.process_fidelity(u, expected) == pytest.approx(1.0, abs=1e-12)

    def test_three_gate_special_case(self):
        layout = layout_for(3)
        phi = 1.1
        recipe = gates.RecipeSpec(
            gates=tuple(gates.GateSpec(j, "x", math.pi / 2) for j in (1, 2, 3)),
            central_phase=phi,
        )
        u = gates.compose_recipe(recipe, layout)
        generator = ops.embed(ops.SIGMA_Y, 0, layout)
        for j in (1, 2, 3):
            generator = generator @ ops.embed(ops.spin_half("x"), j, layout)
        expected = -ops.propagator(generator, -8.0 * phi)
        assert ops.process_fidelity(u, expected) == pytest.approx(1.0, abs=1e-12)
        # Phase-sensitive equality including the leading minus sign.
        assert np.allclose(u, expected, atol=1e-10)

    def test_zero_phases_collapse_to_minus_identity(self):
        layout = layout_for(2)
        recipe = gates.RecipeSpec(
            gates=(gates.GateSpec(1, "x", 0.0), gates.GateSpec(2, "x", 0.0)),
            central_phase=0.0,
        )
        u = gates.compose_recipe(recipe, layout)
        assert np.allclose(u, -np.eye(8), atol=1e-12)

    def test_duplicate_targets_rejected(self):
        with pytest.raises(SpecError):
            gates.RecipeSpec(
                gates=(gates.GateSpec(1, "x", 1.0), gates.GateSpec(1, "y", 1.0)),
                central_phase=0.0,
            )


class TestAppendixIdentity:
    @pytest.mark.parametrize("seed", range(8))
    def test_two_gate_product_equals_expanded_form(self, seed):
        rng = np.random.default_rng(seed)
        layout = layout_for(2)
        phi1, phi2, phi = rng.uniform(-math.pi, math.pi, size=3)
        a1, a2 = rng.choice(list("xyz"), size=2)
        recipe_u = (
            gates.q_gate(gates.GateSpec(1, a1, phi1), layout)
            @ gates.q_gate(gates.GateSpec(2, a2, phi2), layout)
            @ gates.electron_rotation(2 * phi + math.pi, 0.0, layout)
            @ gates.q_gate(gates.GateSpec(1, a1, phi1), layout)
            @ gates.q_gate(gates.GateSpec(2, a2, phi2), layout)
            @ gates.electron_rotation(math.pi, 0.0, layout)
        )
        sz = ops.embed(ops.SIGMA_Z, 0, layout)
        sx = ops.embed(ops.SIGMA_X, 0, layout)
        eye = np.eye(8, dtype=complex)
        factor1 = math.cos(phi1) * eye - 2j * math.sin(phi1) * sz @ ops.embed(
            ops.spin_half(a1), 1, layout
        )
        factor2 = math.cos(phi2) * eye - 2j * math.sin(phi2) * sz @ ops.embed(
            ops.spin_half(a2), 2, layout
        )
        generator = sx @ factor1 @ factor2
        # The generator is normal (commuting Hermitian/anti-Hermitian parts
        # is not guaranteed, so exponentiate via the matrix logarithm route:
        # here the closed form is exp(i phi G) with G non-Hermitian but
        # diagonalizable; build it with the scaling-and-squaring expm.
        from scipy.linalg import expm

        expected = expm(1j * phi * generator)
        assert ops.process_fidelity(recipe_u, expected) == pytest.approx(1.0, abs=1e-10)
        # The global phase between the two forms is exactly -1.
        assert np.allclose(recipe_u, -expected, atol=1e-9)


class TestClosedForm:
    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    @pytest.mark.parametrize("central_axis", ["x", "y"])
    def test_matches_recipe(self, n, central_axis):
        layout = layout_for(n)
        for _ in range(4):
            axes = RNG.choice(list("xyz"), size=n)
            phi = float(RNG.uniform(-2.0, 2.0))
            recipe = gates.RecipeSpec(
                gates=tuple(
                    gates.GateSpec(j + 1, axes[j], math.pi / 2) for j in range(n)
                ),
                central_phase=phi,
                central_axis=central_axis,
            )
            u = gates.compose_recipe(recipe, layout)
            v = gates.closed_form(
                tuple(range(1, n + 1)), tuple(axes), phi, layout, central_axis
            )
            assert ops.process_fidelity(u, v) == pytest.approx(1.0, abs=1e-11)

    def test_even_case_commutes_with_central_axis(self):
        layout = layout_for(2)
        u = gates.closed_form((1, 2), ("x", "z"), 0.9, layout, "x")
        sx = ops.embed(ops.SIGMA_X, 0, layout)
        assert np.allclose(u @ sx, sx @ u, atol=1e-12)

    def test_odd_case_commutes_with_orthogonal_axis(self):
        layout = layout_for(3)
        u = gates.closed_form((1, 2, 3), ("x", "x", "x"), 0.9, layout, "x")
        sy = ops.embed(ops.SIGMA_Y, 0, layout)
        assert np.allclose(u @ sy, sy @ u, atol=1e-12)

    def test_duplicate_targets_rejected(self):
        with pytest.raises(SpecError):
            gates.closed_form((1, 1), ("x", "y"), 0.3, layout_for(2))


class TestConditionalPropagator:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("branch", [1, -1])
    def test_full_space_oracle(self, n, branch):
        layout = layout_for(n)
        rng = np.random.default_rng(100 + n)
        axes = rng.choice(list("xyz"), size=n)
        phi = float(rng.uniform(-1.5, 1.5))
        targets = tuple(range(1, n + 1))
        u_full = gates.closed_form(targets, tuple(axes), phi, layout, "x")
        electron_axis = "x" if n % 2 == 0 else "y"
        ket_e = ops.eigenket(electron_axis, branch)
        psi_n = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        psi_n /= np.linalg.norm(psi_n)
        full = u_full @ np.kron(ket_e, psi_n)
        cond = gates.conditional_nuclear_propagator(targets, tuple(axes), phi, branch, n)
        expected = np.kron(ket_e, cond @ psi_n)
        # Equality up to a global phase.
        assert ops.state_fidelity(full, expected) == pytest.approx(1.0, abs=1e-11)

    def test_branch_flip_inverts_phase(self):
        cond_plus = gates.conditional_nuclear_propagator((1, 2), ("x", "y"), 0.8, 1, 2)
        cond_minus = gates.conditional_nuclear_propagator((1, 2), ("x", "y"), -0.8, -1, 2)
        assert np.allclose(cond_plus, cond_minus, atol=1e-13)

    def test_partial_trace_oracle(self):
        n, branch = 2, 1
        layout = layout_for(n)
        rng = np.random.default_rng(42)
        rho_n = random_density(4, rng)
        u_full = gates.closed_form((1, 2), ("x", "x"), 0.6, layout, "x")
        ket_e = ops.eigenket("x", branch)
        rho_full = np.kron(np.outer(ket_e, ket_e.conj()), rho_n)
        evolved = u_full @ rho_full @ u_full.conj().T
        reduced = ops.partial_trace(evolved, [1, 2], layout)
        cond = gates.conditional_nuclear_propagator((1, 2), ("x", "x"), 0.6, branch, n)
        assert np.allclose(reduced, cond @ rho_n @ cond.conj().T, atol=1e-11)


class TestSingleNucleusRotation:
    def test_full_turn_is_minus_one(self):
        u = gates.single_nucleus_rotation(gates.GateSpec(1, "x", 2 * math.pi), 1, 1)
        assert np.allclose(u, -np.eye(2), atol=1e-12)

    def test_pi_flip_on_x(self):
        u = gates.single_nucleus_rotation(gates.GateSpec(1, "x", math.pi), 1, 1)
        # 2x2 oracle: exp(i pi I^x) = i sigma_x.
        assert np.allclose(u, 1j * ops.SIGMA_X, atol=1e-12)

    def test_branch_flip_inverts(self):
        spec = gates.GateSpec(2, "y", 0.77)
        plus = gates.single_nucleus_rotation(spec, 1, 3)
        minus = gates.single_nucleus_rotation(spec, -1, 3)
        assert np.allclose(plus @ minus, np.eye(8), atol=1e-12)

    def test_full_space_identity(self):
        # Q acting on a definite electron z branch rotates only the target.
        n = 2
        layout = layout_for(n)
        rng = np.random.default_rng(9)
        phi = float(rng.uniform(-2, 2))
        spec = gates.GateSpec(1, "y", phi)
        for branch in (1, -1):
            ket_e = ops.eigenket("z", branch)
            psi_n = rng.normal(size=4) + 1j * rng.normal(size=4)
            psi_n /= np.linalg.norm(psi_n)
            full = gates.q_gate(spec, layout) @ np.kron(ket_e, psi_n)
            expected = np.kron(
                ket_e, gates.single_nucleus_rotation(spec, branch, n) @ psi_n
            )
            assert ops.state_fidelity(full, expected) == pytest.approx(1.0, abs=1e-12)


class TestSwap:
    def swap_matrix(self):
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0] = m[3, 3] = 1.0
        m[1, 2] = m[2, 1] = 1.0
        return m

    def iswap_matrix(self):
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0] = m[3, 3] = 1.0
        m[1, 2] = m[2, 1] = 1.0j
        return m

    def test_swap_against_textbook_matrix(self):
        u = gates.swap_unitary(1, "SWAP", layout_for(1))
        assert ops.process_fidelity(u, self.swap_matrix()) == pytest.approx(1.0, abs=1e-12)

    def test_swap_twice_is_identity_up_to_phase(self):
        u = gates.swap_unitary(1, "SWAP", layout_for(1))
        assert ops.process_fidelity(u @ u, np.eye(4)) == pytest.approx(1.0, abs=1e-12)

    def test_iswap_against_matrix_oracle(self):
        u = gates.swap_unitary(1, "iSWAP", layout_for(1))
        assert ops.process_fidelity(u, self.iswap_matrix()) == pytest.approx(1.0, abs=1e-12)

    def test_iswap_transfers_with_phase(self):
        u = gates.swap_unitary(1, "iSWAP", layout_for(1))
        # |1 down> -> i |0 up> up to the decomposition's global phase.
        psi = np.zeros(4, dtype=complex)
        psi[1] = 1.0
        out = u @ psi
        expected = np.zeros(4, dtype=complex)
        expected[2] = 1.0j
        assert ops.state_fidelity(out, expected) == pytest.approx(1.0, abs=1e-12)

    def test_swap_exchanges_states_on_second_nucleus(self):
        layout = layout_for(2)
        u = gates.swap_unitary(2, "SWAP", layout)
        rng = np.random.default_rng(31)
        e = rng.normal(size=2) + 1j * rng.normal(size=2)
        e /= np.linalg.norm(e)
        n1 = ops.eigenket("z", -1)
        n2 = rng.normal(size=2) + 1j * rng.normal(size=2)
        n2 /= np.linalg.norm(n2)
        out = u @ ops.kron_all([e, n1, n2])
        expected = ops.kron_all([n2, n1, e])
        assert ops.state_fidelity(out, expected) == pytest.approx(1.0, abs=1e-12)


class TestCorrelator:
    def test_phase_values(self):
        assert gates.correlator_phase(1) == pytest.approx(-math.pi / 4)
        assert gates.correlator_phase(2) == pytest.approx(math.pi / 4)
        assert gates.correlator_phase(1, 1) == pytest.approx(-5 * math.pi / 4)

    def test_all_down_zz_string(self):
        down = np.array([0.0, 1.0], dtype=complex)
        rho = np.outer(np.kron(down, down), np.kron(down, down).conj())
        value = gates.correlator_readout(rho, (1, 2), ("z", "z"), 2)
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed_gives_zero(self):
        rho = np.eye(4, dtype=complex) / 4.0
        value = gates.correlator_readout(rho, (1, 2), ("x", "y"), 2)
        assert value == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_random_states_match_direct_trace(self, seed):
        rng = np.random.default_rng(seed)
        rho = random_density(4, rng)
        axes = tuple(rng.choice(list("xyz"), size=2))
        string = np.kron(ops.pauli(axes[0]), ops.pauli(axes[1]))
        expected = float(np.real(np.trace(rho @ string)))
        value = gates.correlator_readout(rho, (1, 2), axes, 2)
        assert value == pytest.approx(expected, abs=1e-10)

    def test_odd_string(self):
        rng = np.random.default_rng(77)
        rho = random_density(8, rng)
        axes = ("x", "z", "y")
        string = ops.pauli_string({n: a for n, a in enumerate(axes)}, (2, 2, 2))
        expected = float(np.real(np.trace(rho @ string)))
        value = gates.correlator_readout(rho, (1, 2, 3), axes, 3)
        assert value == pytest.approx(expected, abs=1e-10)

    def test_invalid_state_rejected(self):
        with pytest.raises(StateError):
            gates.correlator_readout(np.eye(4), (1, 2), ("z", "z"), 2)
