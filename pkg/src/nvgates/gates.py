"""Ideal gate layer: selective electron-nuclear gates and their compositions.

The primitive is the conditional rotation ``exp(i phase sigma_z I_j^axis)``
between the electron and one nucleus.  Sandwiching products of such
gates between two electron rotations turns them into a single
many-body evolution acting on all addressed nuclei at once; this module
builds both the literal gate products and their closed forms, the
conditional nuclear propagators seen by each electron branch, the
SWAP/iSWAP transfer decompositions, and the correlator readout protocol
that maps a product of nuclear Pauli operators onto one electron
expectation value.

Everything here is exact linear algebra on small dense matrices; there
is no pulse-level physics.  All equalities between alternative
constructions hold up to a global phase, so comparisons use
``process_fidelity``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import operators as ops
from .errors import SpecError, StateError

__all__ = [
    "GateSpec",
    "RecipeSpec",
    "DressedGate",
    "q_gate",
    "electron_rotation",
    "compose_recipe",
    "closed_form",
    "conditional_nuclear_propagator",
    "single_nucleus_rotation",
    "swap_decomposition",
    "swap_unitary",
    "correlator_phase",
    "correlator_readout",
]


def _check_qubit_layout(layout: Sequence[int]) -> tuple[int, ...]:
    layout = tuple(int(d) for d in layout)
    if len(layout) < 2 or any(d != 2 for d in layout):
        raise SpecError(f"gate layer expects a qubit layout (electron + nuclei), got {layout}")
    return layout


@dataclass(frozen=True)
class GateSpec:
    """One selective conditional rotation: target nucleus, axis, phase."""

    target: int
    axis: str
    phase: float

    def __post_init__(self):
        if self.axis not in ("x", "y", "z"):
            raise SpecError(f"gate axis must be x, y or z, got {self.axis!r}")
        if self.target < 1:
            raise SpecError(f"nucleus index must be >= 1, got {self.target}")
        if not math.isfinite(self.phase):
            raise SpecError(f"gate phase must be finite, got {self.phase!r}")


@dataclass(frozen=True)
class RecipeSpec:
    """A many-body composition: commuting gate factors around a central rotation.

    ``gates`` are applied once before and once after the central electron
    rotation of angle ``2*central_phase + pi``; a closing pi rotation
    completes the sequence.  Gate targets must be pairwise distinct --
    the closed forms rely on the factors commuting.
    """

    gates: tuple[GateSpec, ...]
    central_phase: float
    central_axis: str = "x"

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if not self.gates:
            raise SpecError("recipe needs at least one gate")
        targets = [g.target for g in self.gates]
        if len(set(targets)) != len(targets):
            raise SpecError(f"recipe targets must be distinct, got {targets}")
        if self.central_axis not in ("x", "y"):
            raise SpecError(f"central axis must be x or y, got {self.central_axis!r}")

    @property
    def targets(self) -> tuple[int, ...]:
        return tuple(g.target for g in self.gates)

    @property
    def axes(self) -> tuple[str, ...]:
        return tuple(g.axis for g in self.gates)


def q_gate(spec: GateSpec, layout: Sequence[int]) -> np.ndarray:
    """Unitary ``exp(i phase sigma_z I^axis)`` on electron and target nucleus."""
    layout = _check_qubit_layout(layout)
    if spec.target >= len(layout):
        raise SpecError(f"target {spec.target} outside register of {len(layout) - 1} nuclei")
    generator = ops.embed(ops.SIGMA_Z, 0, layout) @ ops.embed(
        ops.spin_half(spec.axis), spec.target, layout
    )
    return ops.propagator(generator, -spec.phase)


def electron_rotation(angle: float, axis_phase: float, layout: Sequence[int]) -> np.ndarray:
    """Electron rotation ``exp(i angle (cos sigma_x + sin sigma_y)/2)``.

    ``axis_phase`` picks the rotation axis in the xy plane; 0 gives the
    x rotation, pi/2 the y rotation.
    """
    layout = _check_qubit_layout(layout)
    axis = math.cos(axis_phase) * ops.SIGMA_X + math.sin(axis_phase) * ops.SIGMA_Y
    return ops.propagator(ops.embed(axis, 0, layout), -angle / 2.0)


def compose_recipe(recipe: RecipeSpec, layout: Sequence[int]) -> np.ndarray:
    """Literal ordered product of the recipe's gates and rotations.

    The closing pi rotation acts first in time, then the gate factors,
    the central rotation of angle ``2*central_phase + pi``, and the gate
    factors again.
    """
    layout = _check_qubit_layout(layout)
    axis_phase = 0.0 if recipe.central_axis == "x" else math.pi / 2.0
    qn = np.eye(int(np.prod(layout)), dtype=complex)
    for g in recipe.gates:
        qn = qn @ q_gate(g, layout)
    central = electron_rotation(2.0 * recipe.central_phase + math.pi, axis_phase, layout)
    closing = electron_rotation(math.pi, axis_phase, layout)
    return qn @ central @ qn @ closing


def _product_spin_generator(
    targets: Sequence[int], axes: Sequence[str], layout: Sequence[int]
) -> np.ndarray:
    """Product of spin-1/2 operators on the named nuclei, full space."""
    if len(targets) != len(axes):
        raise SpecError("targets and axes must have equal length")
    if len(set(targets)) != len(targets):
        raise SpecError(f"duplicate targets {tuple(targets)} in closed form")
    out = np.eye(int(np.prod(layout)), dtype=complex)
    for t, a in zip(targets, axes):
        out = out @ ops.embed(ops.spin_half(a), int(t), layout)
    return out


def closed_form(
    targets: Sequence[int],
    axes: Sequence[str],
    phase: float,
    layout: Sequence[int],
    central_axis: str = "x",
) -> np.ndarray:
    """Closed-form many-body unitary for inner phases of pi/2 on every gate.

    For an even number ``2M`` of addressed nuclei the evolution is
    ``exp((-1)^M i 2^(2M) phase sigma_a prod I)`` with ``sigma_a`` the
    central-rotation axis; for an odd number ``2M+1`` the electron axis
    switches to the orthogonal in-plane direction and the prefactor to
    ``(-1)^(M+1) i 2^(2M+1) phase``.  Equal to :func:`compose_recipe`
    with all gate phases pi/2, up to a global phase.
    """
    layout = _check_qubit_layout(layout)
    if central_axis not in ("x", "y"):
        raise SpecError(f"central axis must be x or y, got {central_axis!r}")
    n = len(targets)
    m = n // 2
    prod = _product_spin_generator(targets, axes, layout)
    if n % 2 == 0:
        sign = (-1.0) ** m
        electron_axis = "x" if central_axis == "x" else "y"
        scale = sign * 2.0**(2 * m) * phase
    else:
        if central_axis == "x":
            sign = (-1.0) ** (m + 1)
            electron_axis = "y"
        else:
            sign = (-1.0) ** m
            electron_axis = "x"
        scale = sign * 2.0**(2 * m + 1) * phase
    generator = ops.embed(ops.pauli(electron_axis), 0, layout) @ prod
    return ops.propagator(generator, -scale)


def conditional_nuclear_propagator(
    targets: Sequence[int],
    axes: Sequence[str],
    phase: float,
    branch_sign: int,
    n_nuclei: int,
) -> np.ndarray:
    """Nuclear-space evolution conditioned on the electron branch.

    When the closed-form unitary acts on an electron eigenstate of its
    axis (eigenvalue ``branch_sign``), the nuclei evolve under this
    operator alone.  The layout is nuclear-only: nucleus ``j`` lives on
    factor ``j - 1`` of ``n_nuclei`` qubits.
    """
    if branch_sign not in (1, -1):
        raise SpecError(f"branch sign must be +1 or -1, got {branch_sign!r}")
    nuclear_layout = (2,) * n_nuclei
    if len(set(targets)) != len(targets):
        raise SpecError(f"duplicate targets {tuple(targets)}")
    prod = np.eye(2**n_nuclei, dtype=complex)
    for t, a in zip(targets, axes):
        prod = prod @ ops.embed(ops.spin_half(a), int(t) - 1, nuclear_layout)
    n = len(targets)
    m = n // 2
    if n % 2 == 0:
        scale = (-1.0) ** m * 2.0**(2 * m) * branch_sign * phase
    else:
        scale = (-1.0) ** (m + 1) * 2.0**(2 * m + 1) * branch_sign * phase
    return ops.propagator(prod, -scale)


def single_nucleus_rotation(spec: GateSpec, branch_sign: int, n_nuclei: int) -> np.ndarray:
    """Rotation ``exp(+/- i phase I^axis)`` induced on the target nucleus.

    A single conditional gate applied while the electron sits in a
    definite z branch rotates only the target nucleus, with the branch
    selecting the sense.  Nuclear-only layout as in
    :func:`conditional_nuclear_propagator`.
    """
    if branch_sign not in (1, -1):
        raise SpecError(f"branch sign must be +1 or -1, got {branch_sign!r}")
    nuclear_layout = (2,) * n_nuclei
    generator = ops.embed(ops.spin_half(spec.axis), spec.target - 1, nuclear_layout)
    return ops.propagator(generator, -branch_sign * spec.phase)


@dataclass(frozen=True)
class DressedGate:
    """A conditional gate optionally conjugated by an electron rotation.

    The realized factor is ``R Q R^dag`` where ``R`` is the electron
    rotation described by ``(rotation_angle, rotation_axis_phase)``;
    with no dressing the factor is the bare gate.
    """

    gate: GateSpec
    rotation_angle: float | None = None
    rotation_axis_phase: float | None = None

    def unitary(self, layout: Sequence[int]) -> np.ndarray:
        u = q_gate(self.gate, layout)
        if self.rotation_angle is None:
            return u
        r = electron_rotation(self.rotation_angle, self.rotation_axis_phase, layout)
        return r @ u @ r.conj().T


def swap_decomposition(j: int, kind: str = "SWAP") -> tuple[DressedGate, ...]:
    """Factor a state-transfer gate into dressed conditional rotations.

    ``SWAP`` needs three commuting factors generated by the z, x and y
    pair couplings; ``iSWAP`` drops the z factor.  The x and y factors
    are conditional rotations conjugated by electron rotations that
    steer sigma_z onto sigma_x or sigma_y.  Factors are returned in
    application order (first in time first).
    """
    if kind not in ("SWAP", "iSWAP"):
        raise SpecError(f"kind must be SWAP or iSWAP, got {kind!r}")
    half = math.pi / 2.0
    # sigma_x I^x factor: conjugate by the electron rotation taking z to x;
    # sigma_y I^y factor: rotation taking z to y.
    x_factor = DressedGate(GateSpec(j, "x", half), rotation_angle=-half, rotation_axis_phase=half)
    y_factor = DressedGate(GateSpec(j, "y", half), rotation_angle=half, rotation_axis_phase=0.0)
    factors = [y_factor, x_factor]
    if kind == "SWAP":
        factors.append(DressedGate(GateSpec(j, "z", half)))
    return tuple(factors)


def swap_unitary(j: int, kind: str, layout: Sequence[int]) -> np.ndarray:
    """Product of the :func:`swap_decomposition` factors on the full space."""
    layout = _check_qubit_layout(layout)
    u = np.eye(int(np.prod(layout)), dtype=complex)
    for factor in swap_decomposition(j, kind):
        u = factor.unitary(layout) @ u
    return u


def correlator_phase(m: int, m_winding: int = 0) -> float:
    """Central phase that maps an N-body correlator onto the electron.

    Solves ``(-1)^m * 2 phase = pi/2 + 2 pi m_winding`` for the phase;
    ``m_winding = 0`` gives the smallest-magnitude solution.
    """
    return (-1.0) ** m * (math.pi / 4.0 + m_winding * math.pi)


def correlator_readout(
    rho_n: np.ndarray,
    targets: Sequence[int],
    axes: Sequence[str],
    n_nuclei: int,
) -> float:
    """Measure a product of nuclear Pauli operators through the electron.

    Prepares the electron in |1>, applies the closed-form evolution at
    the phase from :func:`correlator_phase`, and returns the electron
    in-plane expectation value, which equals the direct nuclear trace
    ``Tr[rho_n prod sigma]``.  An even number of targets encodes onto
    sigma_y; the odd case works symmetrically and encodes onto sigma_x.
    """
    nuclear_dim = 2**n_nuclei
    rho_n = np.asarray(rho_n, dtype=complex)
    if rho_n.shape != (nuclear_dim, nuclear_dim):
        raise StateError(f"nuclear state shape {rho_n.shape} != ({nuclear_dim}, {nuclear_dim})")
    ops.check_density_operator(rho_n)
    if len(targets) != len(axes) or not targets:
        raise SpecError("targets and axes must be non-empty and equal length")

    layout = (2,) * (n_nuclei + 1)
    n = len(targets)
    m = n // 2 if n % 2 == 0 else (n - 1) // 2
    phase = correlator_phase(m)
    evolution = closed_form(targets, axes, phase, layout, central_axis="x")
    electron_one = np.outer(ops.eigenket("z", 1), ops.eigenket("z", 1).conj())
    rho = np.kron(electron_one, rho_n)
    rho_final = evolution @ rho @ evolution.conj().T
    readout_axis = "y" if n % 2 == 0 else "x"
    observable = ops.embed(ops.pauli(readout_axis), 0, layout)
    protocol_value = float(np.real(np.trace(rho_final @ observable)))

    string = np.eye(nuclear_dim, dtype=complex)
    for t, a in zip(targets, axes):
        string = string @ ops.embed(ops.pauli(a), int(t) - 1, (2,) * n_nuclei)
    direct_value = float(np.real(np.trace(rho_n @ string)))
    if abs(protocol_value - direct_value) > 1e-8:
        raise StateError(
            f"correlator protocol ({protocol_value}) disagrees with the direct "
            f"trace ({direct_value}); state or phase condition is inconsistent"
        )
    return protocol_value
