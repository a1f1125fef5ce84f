"""Qubit dispersion and the single-excitation qubit/two-resonator Hamiltonian.

Basis order is ``|g00>, |e00>, |g10>, |g01>`` (qubit, resonator 1,
resonator 2). Eigenstate labels follow the analytic solution of the
symmetric device: 0 ground, 1 dark resonator mode, 2 lower and 3 upper
qubit/resonator polariton. The labels are not sorted by energy.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
import math

import numpy as np

from .constants import h, Phi0
from .errors import ParameterError, UnsupportedConfigurationError
from .params import DeviceParams


@dataclass(frozen=True)
class EigenSystem:
    energies: np.ndarray  # (4,) J
    coeffs: np.ndarray  # (4, 4), coeffs[k, i] = <i|psi_k>
    fluxFrac: float

    @property
    def frequencies(self) -> np.ndarray:
        return self.energies / h


def reduced_detuning(fluxFrac: float) -> float:
    """Flux offset from the nearest half-integer flux quantum, in [-1/2, 1/2)."""
    if not math.isfinite(fluxFrac):
        raise ParameterError(f"fluxFrac must be finite, got {fluxFrac!r}")
    return fluxFrac % 1.0 - 0.5


def qubit_frequency(params: DeviceParams, fluxFrac: float) -> float:
    """Qubit transition frequency (Hz) at reduced flux ``fluxFrac`` = Phi/Phi0.

    Uses hbar*eps = 2*Ip*(Phi - Phi0/2) and f = sqrt(fq0**2 + (eps/2pi)**2),
    periodic in Phi0 with its minimum ``fq0`` at half flux.
    """
    eps_hz = 2.0 * params.Ip * Phi0 * reduced_detuning(fluxFrac) / h
    return math.hypot(params.fq0, eps_hz)


def build_hamiltonian(params: DeviceParams, fluxFrac: float) -> np.ndarray:
    fq = qubit_frequency(params, fluxFrac)
    g1, g2, gam = params.g1, params.g2, params.gamma12
    return h * np.array(
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, fq, -g1, -g2],
            [0.0, -g1, params.fr1, gam],
            [0.0, -g2, gam, params.fr2],
        ]
    )


def eigensystem_closed_form(params: DeviceParams, fluxFrac: float) -> EigenSystem:
    """Analytic eigenpairs for equal resonator frequencies and couplings.

    A nonzero resonator-resonator coupling shifts the dark mode to fr - gamma12
    and the bright mode seen by the qubit to fr + gamma12.
    """
    if not params.symmetric:
        raise UnsupportedConfigurationError(
            "closed form needs fr1 == fr2 and g1 == g2; use eigensystem_numeric"
        )
    fq = qubit_frequency(params, fluxFrac)
    fr, g, gam = params.fr1, params.g1, params.gamma12
    fb = fr + gam
    det = fq - fb
    root = math.sqrt(det * det + 8.0 * g * g)

    energies = h * np.array([0.0, fr - gam, 0.5 * (fq + fb - root), 0.5 * (fq + fb + root)])

    s = 1.0 / math.sqrt(2.0)
    coeffs = np.zeros((4, 4))
    coeffs[0, 0] = 1.0
    coeffs[1, 2], coeffs[1, 3] = -s, s
    if g == 0.0:
        # decoupled: lower/upper polariton are the bare qubit and bright mode
        qubit, bright = np.array([0.0, 1.0, 0.0, 0.0]), np.array([0.0, 0.0, s, s])
        coeffs[2], coeffs[3] = (qubit, bright) if fq <= fb else (bright, -qubit)
    else:
        # the two algebraic forms are the same vector family; pick the branch
        # whose first component does not cancel
        lower = np.array([0.0, -det + root, 2 * g, 2 * g])
        upper = np.array([0.0, -det - root, 2 * g, 2 * g])
        if det > 0:
            lower = np.array([0.0, 4 * g * g, g * (det + root), g * (det + root)])
        if det < 0:
            upper = np.array([0.0, -4 * g * g, g * (root - det), g * (root - det)])
        coeffs[2] = lower / np.linalg.norm(lower)
        coeffs[3] = upper / np.linalg.norm(upper)
    return EigenSystem(energies, coeffs, fluxFrac)


def jacobi_eigh(a, tol: float = 1e-15, max_sweeps: int = 50):
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Returns ``(eigenvalues, vectors)`` with eigenvectors in the columns of
    ``vectors``, unsorted.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.abs(a).max() or 1.0
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.tril(a, -1) ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = float(a[p, q])
                if apq == 0.0:
                    continue
                theta = float(a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * rp - sn * rq, sn * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * cp - sn * cq, sn * cp + c * cq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = c * vp - sn * vq, sn * vp + c * vq
    else:
        raise np.linalg.LinAlgError("Jacobi iteration did not converge")
    return np.diag(a).copy(), v


def _positive_first(vec):
    nz = np.flatnonzero(np.abs(vec) > 1e-14)
    if nz.size and vec[nz[0]] < 0:
        return -vec
    return vec


def eigensystem_numeric(matrix, fluxFrac: float, reference: EigenSystem | None = None) -> EigenSystem:
    """Numeric eigenpairs of a 4x4 Hamiltonian.

    Without ``reference`` the states are sorted by energy and each vector's
    first nonzero coefficient is made positive. With ``reference`` the states
    are permuted to maximise overlap with it and signs follow it.
    """
    m = np.asarray(matrix, dtype=float)
    if m.shape != (4, 4):
        raise ParameterError(f"expected a 4x4 matrix, got shape {m.shape}")
    scale = np.abs(m).max() or 1.0
    if np.abs(m - m.T).max() > 1e-12 * scale:
        raise ParameterError("matrix is not Hermitian")
    vals, vecs = jacobi_eigh(0.5 * (m + m.T))
    vecs = vecs.T  # rows are eigenvectors

    if reference is None:
        order = np.argsort(vals, kind="stable")
        coeffs = np.array([_positive_first(vecs[k]) for k in order])
        return EigenSystem(vals[order], coeffs, fluxFrac)

    overlap = np.abs(reference.coeffs @ vecs.T)
    best = max(permutations(range(4)), key=lambda p: sum(overlap[i, p[i]] for i in range(4)))
    coeffs = np.empty((4, 4))
    for i, k in enumerate(best):
        vec = vecs[k]
        coeffs[i] = -vec if reference.coeffs[i] @ vec < 0 else vec
    return EigenSystem(vals[list(best)], coeffs, fluxFrac)


def eigensystem(params: DeviceParams, fluxFrac: float) -> EigenSystem:
    """Closed form when it applies, otherwise numeric (energy-sorted)."""
    if params.symmetric:
        return eigensystem_closed_form(params, fluxFrac)
    return eigensystem_numeric(build_hamiltonian(params, fluxFrac), fluxFrac)
