import math

import numpy as np
import pytest

from nvgates import operators as ops
from nvgates import register as reg
from nvgates.errors import GeometryError, SpecError

TWO_PI = 2.0 * math.pi


def three_carbon_register(**overrides):
    """The benchmark three-nucleus register used throughout the suite."""
    kwargs = dict(
        bz=0.65,
        nuclei=(
            reg.NuclearSpin(hyperfine=tuple(TWO_PI * 1e3 * a for a in (-56.0, -32.0, -45.0)), label="C1"),
            reg.NuclearSpin(hyperfine=tuple(TWO_PI * 1e3 * a for a in (-7.6, 39.0, 52.0)), label="C2"),
            reg.NuclearSpin(hyperfine=tuple(TWO_PI * 1e3 * a for a in (-22.0, 13.0, 96.0)), label="C3"),
        ),
        couplings=(
            (1, 2, -TWO_PI * 20.0),
            (1, 3, -TWO_PI * 10.0),
            (2, 3, TWO_PI * 7.5),
        ),
        rabi_hz=20.0e6,
        rabi_error=0.01,
        include_detuning=True,
        include_internuclear=True,
    )
    kwargs.update(overrides)
    return reg.RegisterConfig(**kwargs)


class TestHyperfineFromPosition:
    def test_position_along_z(self):
        r = (0.0, 0.0, 1.2e-9)
        a = reg.hyperfine_from_position(r)
        scale = reg.MU_0 * reg.GAMMA_E * reg.GAMMA_C13 / (4.0 * math.pi * (1.2e-9) ** 3)
        assert np.allclose(a, [0.0, 0.0, -2.0 * scale], rtol=1e-12)

    def test_position_in_plane(self):
        r = (0.9e-9, 0.0, 0.0)
        a = reg.hyperfine_from_position(r)
        scale = reg.MU_0 * reg.GAMMA_E * reg.GAMMA_C13 / (4.0 * math.pi * (0.9e-9) ** 3)
        assert np.allclose(a, [0.0, 0.0, scale], rtol=1e-12)

    def test_cubic_distance_law(self):
        a_near = reg.hyperfine_from_position((0.4e-9, 0.5e-9, 0.6e-9))
        a_far = reg.hyperfine_from_position((0.8e-9, 1.0e-9, 1.2e-9))
        assert np.linalg.norm(a_near) == pytest.approx(8.0 * np.linalg.norm(a_far))

    def test_zero_vector_rejected(self):
        with pytest.raises(GeometryError):
            reg.hyperfine_from_position((0.0, 0.0, 0.0))


class TestInternuclearCoupling:
    def test_separation_along_z(self):
        g = reg.internuclear_coupling((0, 0, 0), (0, 0, 1.0e-9))
        base = reg.HBAR * reg.MU_0 * reg.GAMMA_C13**2 / (2.0 * (1.0e-9) ** 3)
        assert g == pytest.approx(-2.0 * base)

    def test_separation_in_plane(self):
        g = reg.internuclear_coupling((0, 0, 0), (1.0e-9, 0, 0))
        base = reg.HBAR * reg.MU_0 * reg.GAMMA_C13**2 / (2.0 * (1.0e-9) ** 3)
        assert g == pytest.approx(base)

    def test_magic_angle_vanishes(self):
        d = 1.0e-9
        nz = 1.0 / math.sqrt(3.0)
        rho = d * math.sqrt(1.0 - nz**2)
        g = reg.internuclear_coupling((0, 0, 0), (rho, 0, nz * d))
        assert abs(g) < 1e-12 * abs(reg.internuclear_coupling((0, 0, 0), (0, 0, d)))

    def test_symmetry_and_translation_invariance(self):
        ri = np.array([0.3e-9, -0.2e-9, 0.5e-9])
        rj = np.array([-0.4e-9, 0.1e-9, -0.3e-9])
        shift = np.array([1.0e-9, 2.0e-9, -0.5e-9])
        assert reg.internuclear_coupling(ri, rj) == pytest.approx(
            reg.internuclear_coupling(rj, ri)
        )
        assert reg.internuclear_coupling(ri + shift, rj + shift) == pytest.approx(
            reg.internuclear_coupling(ri, rj)
        )

    def test_coincident_positions_rejected(self):
        with pytest.raises(GeometryError):
            reg.internuclear_coupling((1e-9, 0, 0), (1e-9, 0, 0))


class TestNuclearSpin:
    def test_position_consistency_enforced(self):
        pos = (0.0, 0.0, 1.0e-9)
        good = reg.hyperfine_from_position(pos)
        reg.NuclearSpin(hyperfine=tuple(good), position=pos)
        with pytest.raises(GeometryError):
            reg.NuclearSpin(hyperfine=tuple(2.0 * good), position=pos)
        # Explicit override silences the check.
        reg.NuclearSpin(hyperfine=tuple(2.0 * good), position=pos, hyperfine_overrides=True)


class TestStaticHamiltonian:
    def test_single_bare_nucleus_is_zeeman_only(self):
        cfg = reg.RegisterConfig(
            bz=0.65,
            nuclei=(reg.NuclearSpin(hyperfine=(0.0, 0.0, 0.0)),),
            include_detuning=False,
        )
        h = reg.build_static_hamiltonian(cfg)
        expected = -cfg.gamma_n * cfg.bz * ops.embed(ops.spin_half("z"), 1, cfg.layout)
        assert np.allclose(h, expected)

    def test_hermitian_and_block_structure(self):
        cfg = three_carbon_register()
        h = reg.build_static_hamiltonian(cfg)
        assert ops.hermiticity_defect(h) < 1e-14
        # No coupling between the two electron branches.
        half = cfg.dim // 2
        assert np.allclose(h[:half, half:], 0.0)
        assert np.allclose(h[half:, :half], 0.0)
        p1 = ops.embed(np.diag([1.0, 0.0]).astype(complex), 0, cfg.layout)
        assert np.allclose(h @ p1, p1 @ h)

    def test_lower_block_eigenvalues_single_nucleus(self):
        # Electron in |0>: the nucleus sees only the Zeeman term.
        cfg = reg.RegisterConfig(
            bz=0.65,
            nuclei=(reg.NuclearSpin(hyperfine=(1.0e5, -2.0e5, 3.0e5)),),
            include_detuning=False,
        )
        h = reg.build_static_hamiltonian(cfg)
        block = h[2:, 2:]
        expected = np.linalg.eigvalsh(
            -cfg.gamma_n * cfg.bz * ops.spin_half("z").astype(complex)
        )
        assert np.allclose(np.linalg.eigvalsh(block), expected)
        assert np.allclose(sorted(np.linalg.eigvalsh(block)),
                           [-cfg.gamma_n * cfg.bz / 2.0, cfg.gamma_n * cfg.bz / 2.0])

    def test_electron_factor_trivial_without_couplings(self):
        cfg = reg.RegisterConfig(
            bz=0.65,
            nuclei=(
                reg.NuclearSpin(hyperfine=(0.0, 0.0, 0.0)),
                reg.NuclearSpin(hyperfine=(0.0, 0.0, 0.0)),
            ),
            include_detuning=False,
        )
        h = reg.build_static_hamiltonian(cfg)
        half = cfg.dim // 2
        assert np.allclose(h[:half, :half], h[half:, half:])


class TestControlHamiltonian:
    def test_zero_phase_is_x_drive(self):
        cfg = three_carbon_register()
        h = reg.build_control_hamiltonian(cfg, 0.0)
        amp = 0.5 * math.pi / cfg.t_pi
        assert np.allclose(h, amp * ops.embed(ops.SIGMA_X, 0, cfg.layout))

    def test_quarter_phase_axis(self):
        cfg = three_carbon_register()
        h = reg.build_control_hamiltonian(cfg, math.pi / 2.0)
        amp = 0.5 * math.pi / cfg.t_pi
        assert np.allclose(h, -amp * ops.embed(ops.SIGMA_Y, 0, cfg.layout))

    def test_eigenvalues_scale_with_error(self):
        cfg = three_carbon_register()
        eps = 0.01
        h = reg.build_control_hamiltonian(cfg, 0.3, error=eps)
        amp = 0.5 * math.pi / cfg.t_pi * (1.0 + eps)
        vals = np.linalg.eigvalsh(h)
        assert vals.min() == pytest.approx(-amp, rel=1e-12)
        assert vals.max() == pytest.approx(amp, rel=1e-12)

    def test_pi_pulse_calibration(self):
        cfg = three_carbon_register(nuclei=(reg.NuclearSpin(hyperfine=(0.0, 0.0, 0.0)),),
                                    couplings=(), bz=1e-9, include_detuning=False,
                                    include_internuclear=False)
        # With a negligible field the drive acts alone; a t_pi pulse must
        # flip the electron exactly.
        h = reg.build_static_hamiltonian(cfg) + reg.build_control_hamiltonian(cfg, 0.0)
        u = ops.propagator(h, cfg.t_pi)
        target = ops.embed(ops.SIGMA_X, 0, cfg.layout)
        assert ops.process_fidelity(u, target) == pytest.approx(1.0, abs=1e-6)


class TestEffectiveFrequency:
    def test_bare_nucleus_matches_zeeman(self):
        cfg = reg.RegisterConfig(
            bz=0.65, nuclei=(reg.NuclearSpin(hyperfine=(0.0, 0.0, 0.0)),)
        )
        fv = reg.effective_nuclear_frequency(cfg, 1)
        assert fv.magnitude == pytest.approx(TWO_PI * 6.95825e6, rel=1e-9)
        assert np.allclose(fv.unit_vector, [0.0, 0.0, 1.0])

    def test_third_nucleus_magnitude(self):
        cfg = three_carbon_register()
        fv = reg.effective_nuclear_frequency(cfg, 3)
        # Independent vector arithmetic.
        omega = cfg.gamma_n * 0.65 * np.array([0.0, 0.0, 1.0]) - 0.5 * np.array(
            cfg.nuclei[2].hyperfine
        )
        assert fv.magnitude == pytest.approx(np.linalg.norm(omega), rel=1e-12)
        assert fv.magnitude == pytest.approx(TWO_PI * 6.9103e6, rel=1e-4)
        assert np.allclose(fv.omega_vector, omega)

    def test_axial_hyperfine_keeps_z_axis(self):
        cfg = reg.RegisterConfig(
            bz=0.65, nuclei=(reg.NuclearSpin(hyperfine=(0.0, 0.0, TWO_PI * 5e4)),)
        )
        fv = reg.effective_nuclear_frequency(cfg, 1)
        assert np.allclose(fv.unit_vector, [0.0, 0.0, 1.0])


class TestGateFrame:
    def test_frame_is_orthonormal_right_handed(self):
        cfg = three_carbon_register()
        for j in (1, 2, 3):
            frame = reg.nuclear_gate_frame(cfg, j)
            assert np.allclose(frame @ frame.T, np.eye(3), atol=1e-12)
            assert np.linalg.det(frame) == pytest.approx(1.0)

    def test_alignment_unitary_maps_axes(self):
        cfg = three_carbon_register()
        w = reg.frame_alignment_unitary(cfg)
        assert ops.unitarity_defect(w) < 1e-12
        layout = cfg.layout
        for j in (1, 2, 3):
            frame = reg.nuclear_gate_frame(cfg, j)
            for row, axis in zip(frame, "xyz"):
                lab_op = sum(
                    comp * ops.embed(ops.pauli(a), j, layout)
                    for comp, a in zip(row, "xyz")
                )
                gate_op = ops.embed(ops.pauli(axis), j, layout)
                assert np.allclose(w @ gate_op @ w.conj().T, lab_op, atol=1e-12)

    def test_perpendicular_component_orthogonal(self):
        cfg = three_carbon_register()
        for j in (1, 2, 3):
            mag, direction = reg.perpendicular_hyperfine(cfg, j)
            fv = reg.effective_nuclear_frequency(cfg, j)
            assert mag > 0.0
            assert abs(np.dot(direction, fv.unit_vector)) < 1e-12


class TestFreeHamiltonian:
    def test_matches_framevectors(self):
        cfg = three_carbon_register()
        h = reg.free_nuclear_hamiltonian(cfg)
        expected = np.zeros((cfg.dim, cfg.dim), dtype=complex)
        for j in (1, 2, 3):
            fv = reg.effective_nuclear_frequency(cfg, j)
            for axis, comp in zip("xyz", fv.omega):
                expected -= comp * ops.embed(ops.spin_half(axis), j, cfg.layout)
        assert np.allclose(h, expected)

    def test_toggling_sign_flip_of_hyperfine_term(self):
        # Conjugating by an instantaneous electron pi rotation flips the
        # sign of the electron-conditioned hyperfine term.
        cfg = three_carbon_register(include_detuning=False, include_internuclear=False)
        layout = cfg.layout
        h = reg.build_static_hamiltonian(cfg)
        zeeman = sum(
            -cfg.gamma_n * cfg.bz * ops.embed(ops.spin_half("z"), j, layout)
            for j in (1, 2, 3)
        )
        sz = ops.embed(ops.SIGMA_Z, 0, layout)
        half_hyperfine = np.zeros_like(h)
        for j in (1, 2, 3):
            for axis, amp in zip("xyz", cfg.hyperfine(j)):
                half_hyperfine += 0.5 * amp * ops.embed(ops.spin_half(axis), j, layout)
        # Static splits as (zeeman + identity-part) + sz * hyperfine/2.
        assert np.allclose(h, zeeman + half_hyperfine + sz @ half_hyperfine, atol=1e-9)
        flip = ops.embed(ops.SIGMA_X, 0, layout)
        conjugated = flip @ h @ flip.conj().T
        assert np.allclose(conjugated, zeeman + half_hyperfine - sz @ half_hyperfine, atol=1e-9)


class TestConfigValidation:
    def test_coupling_symmetrization(self):
        cfg = three_carbon_register(couplings=((2, 1, -TWO_PI * 20.0),))
        assert cfg.coupling(1, 2) == pytest.approx(-TWO_PI * 20.0)
        assert cfg.coupling(2, 1) == pytest.approx(-TWO_PI * 20.0)
        assert cfg.coupling(1, 3) == 0.0

    def test_invalid_configs_rejected(self):
        with pytest.raises(SpecError):
            three_carbon_register(rabi_hz=0.0)
        with pytest.raises(SpecError):
            three_carbon_register(rabi_error=1.5)
        with pytest.raises(SpecError):
            reg.RegisterConfig(bz=0.65, nuclei=())
        with pytest.raises(SpecError):
            three_carbon_register(couplings=((1, 1, 5.0),))
        with pytest.raises(SpecError):
            three_carbon_register(couplings=((1, 7, 5.0),))

    def test_t_pi(self):
        cfg = three_carbon_register()
        assert cfg.t_pi == pytest.approx(12.5e-9)
