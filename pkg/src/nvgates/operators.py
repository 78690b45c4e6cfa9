"""Dense operator algebra for small spin registers.

Every operator in this package is a plain complex numpy matrix over the
register Hilbert space, built as a Kronecker product of subsystem
factors in layout order.  Factor 0 is the electron qubit with ordered
basis (|1>, |0>); every further factor is a spin-1/2 nucleus with
ordered basis (|up>, |down>).  With this ordering sigma_z is
diag(1, -1) on any factor.  Angular frequencies are rad/s and times are
seconds throughout the package.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionError, HermiticityError, SpecError, StateError

__all__ = [
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "PAULIS",
    "pauli",
    "spin_half",
    "eigenket",
    "kron_all",
    "embed",
    "pauli_string",
    "propagator",
    "state_fidelity",
    "process_fidelity",
    "partial_trace",
    "expectation",
    "hermiticity_defect",
    "unitarity_defect",
    "check_state",
    "check_density_operator",
]

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULIS = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

#: Relative Frobenius tolerance below which a matrix counts as Hermitian.
HERMITICITY_TOL = 1e-12


def pauli(axis: str) -> np.ndarray:
    """Return the single-qubit Pauli matrix for ``axis`` in {x, y, z}."""
    try:
        return PAULIS[axis]
    except KeyError:
        raise SpecError(f"unknown Pauli axis {axis!r}; expected one of x, y, z")


def spin_half(axis: str) -> np.ndarray:
    """Spin-1/2 operator ``pauli(axis) / 2``."""
    return pauli(axis) / 2.0


def eigenket(axis: str, sign: int) -> np.ndarray:
    """Normalized single-qubit eigenvector of ``pauli(axis)``.

    ``sign`` is +1 or -1 and selects the eigenvalue.  In the package
    basis convention the z eigenkets are (1, 0) and (0, 1); on the
    electron factor these are |1> and |0>, on a nuclear factor |up> and
    |down>.
    """
    if sign not in (1, -1):
        raise SpecError(f"eigenket sign must be +1 or -1, got {sign!r}")
    s = 1.0 / np.sqrt(2.0)
    table = {
        ("z", 1): (1.0, 0.0),
        ("z", -1): (0.0, 1.0),
        ("x", 1): (s, s),
        ("x", -1): (s, -s),
        ("y", 1): (s, 1.0j * s),
        ("y", -1): (s, -1.0j * s),
    }
    key = (axis, sign)
    if key not in table:
        raise SpecError(f"unknown Pauli axis {axis!r}; expected one of x, y, z")
    return np.array(table[key], dtype=complex)


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Kronecker product of ``factors`` in order."""
    out = np.array([[1.0 + 0.0j]]) if factors[0].ndim == 2 else np.array([1.0 + 0.0j])
    for f in factors:
        out = np.kron(out, f)
    return out


def embed(local: np.ndarray, site: int, layout: Sequence[int]) -> np.ndarray:
    """Embed a local operator at ``site``, identity on every other factor.

    Parameters
    ----------
    local : ndarray
        Square operator whose dimension matches ``layout[site]``.
    site : int
        Index of the factor the operator acts on (electron is site 0).
    layout : sequence of int
        Subsystem dimensions in global order.

    Returns
    -------
    ndarray
        Operator on the full space ``prod(layout)``.
    """
    layout = tuple(int(d) for d in layout)
    if not 0 <= site < len(layout):
        raise DimensionError(f"site {site} outside layout of length {len(layout)}")
    local = np.asarray(local, dtype=complex)
    if local.shape != (layout[site], layout[site]):
        raise DimensionError(
            f"operator of shape {local.shape} cannot act on a dim-{layout[site]} factor"
        )
    factors = [np.eye(d, dtype=complex) for d in layout]
    factors[site] = local
    return kron_all(factors)


def pauli_string(axes: Mapping[int, str], layout: Sequence[int]) -> np.ndarray:
    """Product of Pauli operators on the sites named in ``axes``.

    The result is Hermitian and involutory.  An empty mapping gives the
    identity.  Sites not mentioned carry the identity; every mentioned
    site must be two-dimensional.
    """
    dim = int(np.prod(layout))
    out = np.eye(dim, dtype=complex)
    for site in sorted(axes):
        out = out @ embed(pauli(axes[site]), site, layout)
    return out


def hermiticity_defect(h: np.ndarray) -> float:
    """Relative Frobenius distance of ``h`` from its adjoint."""
    scale = np.linalg.norm(h)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(h - h.conj().T) / scale)


def unitarity_defect(u: np.ndarray) -> float:
    """Frobenius norm of ``u^dag u - 1``."""
    dim = u.shape[0]
    return float(np.linalg.norm(u.conj().T @ u - np.eye(dim)))


def propagator(h: np.ndarray, t: float) -> np.ndarray:
    """Unitary ``exp(-i h t)`` of a Hermitian generator, by eigendecomposition.

    Parameters
    ----------
    h : ndarray
        Hermitian matrix in rad/s.
    t : float
        Evolution time in seconds.  ``t = 0`` returns the exact identity.

    Raises
    ------
    HermiticityError
        If ``h`` deviates from Hermiticity by more than the package
        tolerance in relative Frobenius norm.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionError(f"generator must be square, got shape {h.shape}")
    if hermiticity_defect(h) > HERMITICITY_TOL:
        raise HermiticityError(
            f"generator is not Hermitian (defect {hermiticity_defect(h):.3e})"
        )
    if t == 0.0:
        return np.eye(h.shape[0], dtype=complex)
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1.0j * w * t)) @ v.conj().T


def state_fidelity(psi: np.ndarray, phi: np.ndarray) -> float:
    """Overlap fidelity ``|<psi|phi>|^2`` of two pure states."""
    psi = np.asarray(psi, dtype=complex).ravel()
    phi = np.asarray(phi, dtype=complex).ravel()
    if psi.shape != phi.shape:
        raise DimensionError(f"state dims differ: {psi.shape} vs {phi.shape}")
    return float(abs(np.vdot(psi, phi)) ** 2)


def process_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """Global-phase-blind fidelity ``|Tr(u^dag v)|^2 / dim^2`` of two unitaries."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise DimensionError(f"operator dims differ: {u.shape} vs {v.shape}")
    dim = u.shape[0]
    return float(abs(np.trace(u.conj().T @ v)) ** 2 / dim**2)


def partial_trace(
    rho: np.ndarray, keep: Sequence[int], layout: Sequence[int]
) -> np.ndarray:
    """Trace out every factor not listed in ``keep``.

    Parameters
    ----------
    rho : ndarray
        Density operator on the full space described by ``layout``.
    keep : sequence of int
        Sites to retain, in any order; the result orders them as in the
        original layout.
    layout : sequence of int
        Subsystem dimensions.

    Returns
    -------
    ndarray
        Reduced density operator on the kept factors; trace preserved.
    """
    layout = tuple(int(d) for d in layout)
    n = len(layout)
    keep = sorted(set(int(s) for s in keep))
    if any(s < 0 or s >= n for s in keep):
        raise DimensionError(f"keep sites {keep} outside layout of length {n}")
    dim = int(np.prod(layout))
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise DimensionError(f"density operator shape {rho.shape} != ({dim}, {dim})")
    tensor = rho.reshape(layout + layout)
    # Contract traced-out row/column index pairs, highest site first so
    # remaining axis numbers stay valid.
    removed = 0
    for site in sorted(set(range(n)) - set(keep), reverse=True):
        tensor = np.trace(tensor, axis1=site, axis2=site + n - removed)
        removed += 1
    kept_dim = int(np.prod([layout[s] for s in keep])) if keep else 1
    return tensor.reshape(kept_dim, kept_dim)


def expectation(op: np.ndarray, psi: np.ndarray) -> float:
    """Real expectation value ``<psi|op|psi>`` of a Hermitian observable."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if op.shape != (psi.size, psi.size):
        raise DimensionError(f"operator shape {op.shape} vs state dim {psi.size}")
    return float(np.real(np.vdot(psi, op @ psi)))


def check_state(psi: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Validate normalization of a state vector; returns it as complex."""
    psi = np.asarray(psi, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise StateError(f"state norm {norm} deviates from 1 beyond {tol}")
    return psi


def check_density_operator(rho: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity of a density operator."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise StateError(f"density operator must be square, got {rho.shape}")
    if hermiticity_defect(rho) > 1e-12:
        raise StateError("density operator is not Hermitian")
    if abs(np.trace(rho) - 1.0) > 1e-12:
        raise StateError(f"density operator trace {np.trace(rho)} != 1")
    smallest = float(np.linalg.eigvalsh(rho)[0])
    if smallest < -tol:
        raise StateError(f"density operator has negative eigenvalue {smallest}")
    return rho
