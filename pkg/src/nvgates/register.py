"""Physical model of the electron + nuclear-spin register.

Builds the static and microwave-control Hamiltonians of a single
electron-spin qubit coupled to a set of spin-1/2 nuclei through
anisotropic hyperfine vectors, plus the secular internuclear dipolar
couplings.  The electron is restricted to its {|0>, |1>} qubit subspace
with the population operator P1 = |1><1| standing in for the driven
spin projection, so the level not addressed by the microwave never
enters the dynamics.

All couplings are stored internally as angular frequencies (rad/s);
fields are tesla, positions are meters.  Unit conversions belong in
config parsing, not here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from . import operators as ops
from .errors import GeometryError, SpecError

__all__ = [
    "TWO_PI",
    "MU_0",
    "HBAR",
    "GAMMA_E",
    "GAMMA_C13",
    "N14_PARALLEL_SHIFT",
    "NuclearSpin",
    "RegisterConfig",
    "FrameVector",
    "hyperfine_from_position",
    "internuclear_coupling",
    "build_static_hamiltonian",
    "build_control_hamiltonian",
    "free_nuclear_hamiltonian",
    "effective_nuclear_frequency",
    "perpendicular_hyperfine",
    "nuclear_gate_frame",
    "frame_alignment_unitary",
]

TWO_PI = 2.0 * math.pi

#: Vacuum permeability, T m / A.
MU_0 = 4.0e-7 * math.pi
#: Reduced Planck constant, J s.
HBAR = 1.054571817e-34

#: Electron gyromagnetic ratio, rad/s per tesla (-2.8024 MHz/G).
GAMMA_E = -TWO_PI * 2.8024e6 * 1.0e4
#: 13C gyromagnetic ratio, rad/s per tesla (1.0705 kHz/G).
GAMMA_C13 = TWO_PI * 1.0705e3 * 1.0e4
#: Worst-case longitudinal shift from the unpolarized host 14N nucleus, rad/s.
N14_PARALLEL_SHIFT = -TWO_PI * 2.162e6


def hyperfine_from_position(
    r: Sequence[float],
    gamma_e: float = GAMMA_E,
    gamma_n: float = GAMMA_C13,
) -> np.ndarray:
    """Dipolar hyperfine vector of a nucleus at position ``r`` (meters).

    Returns ``mu0 ge gn / (4 pi |r|^3) * (zhat - 3 (zhat.rhat) rhat)``
    in rad/s, with the quantization axis along z.
    """
    r = np.asarray(r, dtype=float)
    dist = np.linalg.norm(r)
    if dist == 0.0:
        raise GeometryError("nucleus cannot sit on the electron site")
    rhat = r / dist
    zhat = np.array([0.0, 0.0, 1.0])
    prefactor = MU_0 * gamma_e * gamma_n / (4.0 * math.pi * dist**3)
    return prefactor * (zhat - 3.0 * rhat[2] * rhat)


def internuclear_coupling(
    r_i: Sequence[float],
    r_j: Sequence[float],
    gamma_n: float = GAMMA_C13,
    include_four_pi: bool = False,
) -> float:
    """Secular dipolar coupling constant between two like nuclei, rad/s.

    Uses ``hbar mu0 gamma^2 / (2 d^3) * (1 - 3 nz^2)`` with ``d`` the
    separation and ``nz`` the z component of the unit separation vector.
    ``include_four_pi`` divides the prefactor by ``4 pi`` for the
    conventional SI dipolar normalization; the default matches the bare
    form so either convention is one flag away.
    """
    d = np.asarray(r_i, dtype=float) - np.asarray(r_j, dtype=float)
    dist = np.linalg.norm(d)
    if dist == 0.0:
        raise GeometryError("coincident nuclear positions")
    nz = d[2] / dist
    prefactor = HBAR * MU_0 * gamma_n**2 / (2.0 * dist**3)
    if include_four_pi:
        prefactor /= 4.0 * math.pi
    return float(prefactor * (1.0 - 3.0 * nz**2))


@dataclass(frozen=True)
class NuclearSpin:
    """One spin-1/2 nucleus of the register.

    ``hyperfine`` is the coupling vector to the electron in rad/s.  If a
    ``position`` (meters) is supplied the hyperfine must agree with the
    dipolar form computed from it, unless ``hyperfine_overrides`` marks
    the vector as deliberately independent of the geometry.
    """

    hyperfine: tuple[float, float, float]
    label: str = ""
    position: tuple[float, float, float] | None = None
    hyperfine_overrides: bool = False

    def __post_init__(self):
        object.__setattr__(self, "hyperfine", tuple(float(a) for a in self.hyperfine))
        if self.position is not None:
            object.__setattr__(
                self, "position", tuple(float(x) for x in self.position)
            )
            if not self.hyperfine_overrides:
                predicted = hyperfine_from_position(self.position)
                scale = max(np.linalg.norm(predicted), 1e-300)
                defect = np.linalg.norm(np.array(self.hyperfine) - predicted) / scale
                if defect > 1e-6:
                    raise GeometryError(
                        f"hyperfine of {self.label or 'nucleus'} deviates from its "
                        f"position by {defect:.2e} relative; set hyperfine_overrides"
                    )

    @property
    def hyperfine_vector(self) -> np.ndarray:
        return np.array(self.hyperfine, dtype=float)

    @classmethod
    def from_position(cls, position, label=""):
        hf = hyperfine_from_position(position)
        return cls(hyperfine=tuple(hf), label=label, position=tuple(position))


@dataclass(frozen=True)
class RegisterConfig:
    """Static description of the register and its control parameters.

    Couplings are canonicalized to ``(i, j, g)`` triples with ``i < j``
    using 1-based nucleus indices; ``g`` is rad/s.  ``rabi_hz`` is the
    microwave Rabi frequency in Hz with the calibration ``t_pi = 1 /
    (4 rabi_hz)`` for a pi rotation, and ``rabi_error`` the relative
    amplitude error applied when the error model is active.
    """

    bz: float
    nuclei: tuple[NuclearSpin, ...]
    couplings: tuple[tuple[int, int, float], ...] = ()
    gamma_e: float = GAMMA_E
    gamma_n: float = GAMMA_C13
    detuning: float = N14_PARALLEL_SHIFT
    rabi_hz: float = 20.0e6
    rabi_error: float = 0.01
    include_detuning: bool = False
    include_internuclear: bool = False

    def __post_init__(self):
        if len(self.nuclei) < 1:
            raise SpecError("register needs at least one nucleus")
        if self.rabi_hz <= 0.0:
            raise SpecError("Rabi frequency must be positive")
        if not abs(self.rabi_error) < 1.0:
            raise SpecError("relative Rabi error must satisfy |eps| < 1")
        seen = {}
        canonical = []
        for i, j, g in self.couplings:
            i, j = int(i), int(j)
            if i == j:
                raise SpecError(f"self-coupling on nucleus {i}")
            if not (1 <= i <= len(self.nuclei) and 1 <= j <= len(self.nuclei)):
                raise SpecError(f"coupling ({i}, {j}) references a missing nucleus")
            key = (min(i, j), max(i, j))
            if key in seen and seen[key] != float(g):
                raise SpecError(f"conflicting couplings for pair {key}")
            seen[key] = float(g)
            if key not in [c[:2] for c in canonical]:
                canonical.append((key[0], key[1], float(g)))
        object.__setattr__(self, "couplings", tuple(canonical))
        object.__setattr__(self, "nuclei", tuple(self.nuclei))

    @property
    def n_nuclei(self) -> int:
        return len(self.nuclei)

    @property
    def layout(self) -> tuple[int, ...]:
        """Subsystem dimensions, electron first."""
        return (2,) * (self.n_nuclei + 1)

    @property
    def dim(self) -> int:
        return 2 ** (self.n_nuclei + 1)

    @property
    def t_pi(self) -> float:
        """Duration of a resonant pi rotation, seconds."""
        return 1.0 / (4.0 * self.rabi_hz)

    def coupling(self, i: int, j: int) -> float:
        key = (min(i, j), max(i, j))
        for a, b, g in self.couplings:
            if (a, b) == key:
                return g
        return 0.0

    def hyperfine(self, j: int) -> np.ndarray:
        """Hyperfine vector of nucleus ``j`` (1-based), rad/s."""
        return self.nuclei[j - 1].hyperfine_vector


@dataclass(frozen=True)
class FrameVector:
    """Effective precession vector of one nucleus: vector, norm, direction."""

    omega: tuple[float, float, float]
    magnitude: float
    unit: tuple[float, float, float]

    @property
    def omega_vector(self) -> np.ndarray:
        return np.array(self.omega, dtype=float)

    @property
    def unit_vector(self) -> np.ndarray:
        return np.array(self.unit, dtype=float)


def _p1(cfg: RegisterConfig) -> np.ndarray:
    """Electron population operator |1><1| on the full space."""
    p1 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    return ops.embed(p1, 0, cfg.layout)


def build_static_hamiltonian(cfg: RegisterConfig) -> np.ndarray:
    """Drive-free Hamiltonian of the register, rad/s.

    Contains the optional electron detuning shift on |1>, the nuclear
    Zeeman terms, the hyperfine interaction conditioned on the electron
    population, and (if enabled) the secular internuclear couplings.
    The result is Hermitian and commutes with the electron population.
    """
    layout = cfg.layout
    dim = cfg.dim
    h = np.zeros((dim, dim), dtype=complex)
    p1 = _p1(cfg)
    if cfg.include_detuning:
        h += cfg.detuning * p1
    for j in range(1, cfg.n_nuclei + 1):
        h -= cfg.gamma_n * cfg.bz * ops.embed(ops.spin_half("z"), j, layout)
        a = cfg.hyperfine(j)
        for axis, amp in zip("xyz", a):
            if amp != 0.0:
                h += amp * (p1 @ ops.embed(ops.spin_half(axis), j, layout))
    if cfg.include_internuclear:
        for i, j, g in cfg.couplings:
            zz = ops.embed(ops.spin_half("z"), i, layout) @ ops.embed(
                ops.spin_half("z"), j, layout
            )
            xx = ops.embed(ops.spin_half("x"), i, layout) @ ops.embed(
                ops.spin_half("x"), j, layout
            )
            yy = ops.embed(ops.spin_half("y"), i, layout) @ ops.embed(
                ops.spin_half("y"), j, layout
            )
            # Secular homonuclear dipolar form: zz - (flip-flop)/2.
            h += g * (zz - 0.5 * (xx + yy))
    return h


def build_control_hamiltonian(
    cfg: RegisterConfig, phase: float, error: float = 0.0
) -> np.ndarray:
    """Microwave drive Hamiltonian for pulse phase ``phase``, rad/s.

    The amplitude is calibrated so that a resonant pulse of duration
    ``cfg.t_pi`` at ``error = 0`` is exactly a pi rotation of the
    electron; ``error`` scales the amplitude by ``(1 + error)``.  Acts
    as the identity on every nucleus.
    """
    amp = 0.5 * math.pi / cfg.t_pi * (1.0 + error)
    drive = amp * np.array(
        [[0.0, np.exp(1.0j * phase)], [np.exp(-1.0j * phase), 0.0]], dtype=complex
    )
    return ops.embed(drive, 0, cfg.layout)


def effective_nuclear_frequency(cfg: RegisterConfig, j: int) -> FrameVector:
    """Precession vector of nucleus ``j``: Zeeman minus half the hyperfine."""
    omega = cfg.gamma_n * cfg.bz * np.array([0.0, 0.0, 1.0]) - 0.5 * cfg.hyperfine(j)
    mag = float(np.linalg.norm(omega))
    if mag == 0.0:
        raise GeometryError(f"nucleus {j} has zero effective frequency")
    return FrameVector(
        omega=tuple(float(x) for x in omega),
        magnitude=mag,
        unit=tuple(float(x) for x in omega / mag),
    )


def free_nuclear_hamiltonian(cfg: RegisterConfig) -> np.ndarray:
    """Ideal drive-independent nuclear precession generator, rad/s.

    This is the rotating-frame generator used to unwind free nuclear
    precession when comparing realized evolutions against ideal gates;
    it excludes the detuning error and the internuclear couplings.
    """
    layout = cfg.layout
    h = np.zeros((cfg.dim, cfg.dim), dtype=complex)
    for j in range(1, cfg.n_nuclei + 1):
        fv = effective_nuclear_frequency(cfg, j)
        for axis, comp in zip("xyz", fv.omega):
            if comp != 0.0:
                h -= comp * ops.embed(ops.spin_half(axis), j, layout)
    return h


def perpendicular_hyperfine(cfg: RegisterConfig, j: int) -> tuple[float, np.ndarray]:
    """Hyperfine component of nucleus ``j`` orthogonal to its precession axis.

    Returns the magnitude (rad/s) and unit direction.  This component
    sets the rate at which a resonant decoupling sequence builds up
    conditional phase on the nucleus.
    """
    fv = effective_nuclear_frequency(cfg, j)
    a = cfg.hyperfine(j)
    zhat = fv.unit_vector
    perp = a - np.dot(a, zhat) * zhat
    mag = float(np.linalg.norm(perp))
    if mag == 0.0:
        return 0.0, np.zeros(3)
    return mag, perp / mag


def nuclear_gate_frame(cfg: RegisterConfig, j: int, axis_sign: int = 1) -> np.ndarray:
    """Right-handed local frame (x, y, z rows) of nucleus ``j``.

    z is the precession axis, x the perpendicular hyperfine direction
    (the axis along which conditional rotations build up), y completes
    the frame.  ``axis_sign = -1`` reverses the x (and with it the y)
    axis, a pure bookkeeping choice that lets the pulse tuner use either
    sign of the modulation coefficient.  For a nucleus with no
    perpendicular hyperfine the x axis falls back to the projection of
    the lab x axis.
    """
    if axis_sign not in (1, -1):
        raise SpecError(f"axis sign must be +1 or -1, got {axis_sign!r}")
    fv = effective_nuclear_frequency(cfg, j)
    zhat = fv.unit_vector
    mag, xhat = perpendicular_hyperfine(cfg, j)
    if mag == 0.0 or mag < 1e-12 * fv.magnitude:
        seed = np.array([1.0, 0.0, 0.0])
        if abs(np.dot(seed, zhat)) > 0.99:
            seed = np.array([0.0, 1.0, 0.0])
        xhat = seed - np.dot(seed, zhat) * zhat
        xhat /= np.linalg.norm(xhat)
    xhat = axis_sign * xhat
    yhat = np.cross(zhat, xhat)
    return np.vstack([xhat, yhat, zhat])


def frame_alignment_unitary(
    cfg: RegisterConfig, axis_signs: dict[int, int] | None = None
) -> np.ndarray:
    """Unitary mapping per-nucleus gate frames to the lab frame.

    Acts as the identity on the electron and as the SU(2) image of the
    frame rotation on each nucleus, so that conjugating a gate-frame
    operator by this unitary expresses it in lab coordinates.
    ``axis_signs`` optionally reverses individual in-plane axes, keyed
    by nucleus index.
    """
    layout = cfg.layout
    signs = axis_signs or {}
    w = np.eye(cfg.dim, dtype=complex)
    for j in range(1, cfg.n_nuclei + 1):
        frame = nuclear_gate_frame(cfg, j, signs.get(j, 1))
        # Columns of the SO(3) matrix are the images of the lab axes.
        x, y, z, scalar = Rotation.from_matrix(frame.T).as_quat()
        local = scalar * np.eye(2) - 1.0j * (
            x * ops.SIGMA_X + y * ops.SIGMA_Y + z * ops.SIGMA_Z
        )
        w = w @ ops.embed(local, j, layout)
    return w
