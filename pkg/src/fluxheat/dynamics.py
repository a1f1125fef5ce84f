"""Golden-rule rates, steady-state populations and reservoir-to-reservoir power."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
import math

import numpy as np

from .constants import h, hbar, kB, e, Phi0
from .errors import DegenerateSystemError, ParameterError
from .noise import NoiseChannel, ResonatorFilter, flux_noise
from .params import DeviceParams
from .spectrum import EigenSystem, eigensystem, qubit_frequency


def flux_derivative_operator(params: DeviceParams, fluxFrac: float) -> np.ndarray:
    """dH/dPhi (A) in the bare basis |g00>, |e00>, |g10>, |g01>.

    Qubit part: transverse Ip*fq0/fq between g and e, longitudinal
    2*Ip*sqrt(1 - (fq0/fq)^2) on e. Coupling part: resonator i couples to
    |g00> with weight (h*g_i/Phi0) * (Ip/(e*fq0)) * (fq0/fq)^2 and sign -1
    from (2 b^dag b - 1) acting on g.
    """
    fq = qubit_frequency(params, fluxFrac)
    ratio = params.fq0 / fq
    weight = (h / Phi0) * (params.Ip / (e * params.fq0)) * ratio * ratio
    d = np.zeros((4, 4))
    d[0, 1] = d[1, 0] = params.Ip * ratio
    d[1, 1] = 2.0 * params.Ip * math.sqrt(max(0.0, 1.0 - ratio * ratio))
    d[0, 2] = d[2, 0] = -weight * params.g1
    d[0, 3] = d[3, 0] = -weight * params.g2
    return d


def matrix_elements(eig: EigenSystem, params: DeviceParams, fluxFrac: float | None = None) -> np.ndarray:
    """|<psi_i| dH/dPhi |psi_j>| (A) between eigenstates; diagonal set to zero."""
    if fluxFrac is None:
        fluxFrac = eig.fluxFrac
    elif fluxFrac != eig.fluxFrac:
        raise ParameterError("eigensystem was built at a different flux")
    a = eig.coeffs.tolist()
    d = flux_derivative_operator(params, fluxFrac).tolist()
    n = len(a)
    # exact summation keeps symmetric cancellations (the dark state) at zero
    ad = [[math.fsum(a[k][i] * d[i][j] for i in range(n)) for j in range(n)] for k in range(n)]
    m = np.zeros((n, n))
    for k in range(n):
        for l in range(k + 1, n):
            m[k, l] = m[l, k] = abs(math.fsum(ad[k][j] * a[l][j] for j in range(n)))
    return m


@dataclass(frozen=True)
class RateSet:
    gammaR1: np.ndarray  # gammaR1[i, j] = rate i -> j from reservoir 1 (1/s)
    gammaR2: np.ndarray
    omega: np.ndarray  # omega[i, j] = (E_i - E_j)/hbar (rad/s)

    @property
    def total(self) -> np.ndarray:
        return self.gammaR1 + self.gammaR2


def _rate_matrix(elems, omega, channel):
    n = elems.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j and elems[i, j] != 0.0:
                out[i, j] = elems[i, j] ** 2 * flux_noise(channel, omega[i, j]) / hbar**2
    return out


def transition_rates(elems: np.ndarray, eig: EigenSystem, channels) -> RateSet:
    """Golden-rule rates |M_ij|^2 S_r(w_ij) / hbar^2 for both reservoirs.

    ``channels`` is a pair of :class:`NoiseChannel` for reservoirs 1 and 2.
    Downward transitions sample the noise at positive frequency.
    """
    ch1, ch2 = channels
    energies = eig.energies
    omega = (energies[:, None] - energies[None, :]) / hbar
    return RateSet(_rate_matrix(elems, omega, ch1), _rate_matrix(elems, omega, ch2), omega)


def reservoir_channels(params: DeviceParams, T1: float, T2: float):
    return (
        NoiseChannel(T1, params.R, ResonatorFilter(params.fr1, params.Zinf), params.M),
        NoiseChannel(T2, params.R, ResonatorFilter(params.fr2, params.Zinf), params.M),
    )


@dataclass(frozen=True)
class SteadyState:
    rho: np.ndarray
    powerTo2: float
    powerTo1: float


def _closed_form_populations(g):
    # states {0, 2, 3}; the dark state 1 stays empty
    a = g[2, 0] * g[3, 0] + g[2, 3] * g[3, 0] + g[2, 0] * g[3, 2]
    b = g[0, 2] * g[3, 0] + g[0, 2] * g[3, 2] + g[0, 3] * g[3, 2]
    c = g[0, 3] * g[2, 0] + g[0, 2] * g[2, 3] + g[0, 3] * g[2, 3]
    norm = a + b + c
    if not norm > 0:
        raise DegenerateSystemError("no nonzero cycle among states 0, 2, 3")
    return np.array([a, 0.0, b, c]) / norm


def _active_states(g):
    n = g.shape[0]
    active = [k for k in range(n) if g[k].any() or g[:, k].any()]
    if not active:
        raise DegenerateSystemError("all transition rates are zero")
    return active


def tree_populations(g: np.ndarray) -> np.ndarray:
    """Stationary populations from the matrix-tree theorem.

    rho_r is proportional to the summed weight of spanning trees directed
    towards r; all terms are positive, so rates differing by many orders of
    magnitude cause no cancellation. States with no rates in or out stay
    empty.
    """
    n = g.shape[0]
    active = _active_states(g)
    weights = np.zeros(n)
    for root in active:
        others = [k for k in active if k != root]
        terms = []
        for parents in product(active, repeat=len(others)):
            parent = dict(zip(others, parents))
            if any(k == p for k, p in parent.items()):
                continue
            w = 1.0
            for k, p in parent.items():
                w *= g[k, p]
                if w == 0.0:
                    break
            if w == 0.0 or not _reaches_root(parent, root):
                continue
            terms.append(w)
        weights[root] = math.fsum(terms)
    total = weights.sum()
    if not total > 0:
        raise DegenerateSystemError("rate matrix has no unique steady state")
    return weights / total


def _reaches_root(parent, root):
    for start in parent:
        k, steps = start, 0
        while k != root:
            k = parent[k]
            steps += 1
            if steps > len(parent):
                return False
    return True


def nullspace_populations(g: np.ndarray) -> np.ndarray:
    """Stationary populations by a direct linear solve of the rate equations
    sum_j G[j->i] rho_j - sum_j G[i->j] rho_i = 0 with sum rho = 1.

    States with no rates in or out are left empty.
    """
    n = g.shape[0]
    active = _active_states(g)
    sub = g[np.ix_(active, active)]
    w = sub.T - np.diag(sub.sum(axis=1))
    w = w / np.abs(w).max()
    m = len(active)
    lhs = np.vstack([w, np.ones(m)])
    rhs = np.zeros(m + 1)
    rhs[-1] = 1.0
    sol, _, rank, _ = np.linalg.lstsq(lhs, rhs, rcond=None)
    if rank < m:
        raise DegenerateSystemError("rate matrix has no unique steady state")
    rho = np.zeros(n)
    rho[active] = np.clip(sol, 0.0, None)
    return rho / rho.sum()


def transported_power(ss, rates: RateSet, reservoir: int = 2) -> float:
    """Net power (W) absorbed by ``reservoir``: sum rho_k hbar w_kl Gamma^(r)_kl."""
    rho = ss.rho if hasattr(ss, "rho") else np.asarray(ss)
    g = rates.gammaR2 if reservoir == 2 else rates.gammaR1
    return float(np.sum(rho[:, None] * hbar * rates.omega * g))


def steady_state(rates: RateSet, method: str = "auto") -> SteadyState:
    """Populations and powers for the summed rates.

    ``method``: ``"closed"`` uses the analytic three-level solution (requires
    the dark state to be decoupled), ``"nullspace"`` solves the rate equations
    directly, ``"tree"`` sums spanning trees (robust for stiff rates),
    ``"auto"`` picks closed form when it applies and trees otherwise.
    """
    g = rates.total
    if not g.any():
        raise DegenerateSystemError("all transition rates are zero")
    dark = not (g[1].any() or g[:, 1].any())
    if method == "auto":
        method = "closed" if dark else "tree"
    if method == "closed":
        if not dark:
            raise DegenerateSystemError("closed form requires state 1 to be decoupled")
        rho = _closed_form_populations(g)
    elif method == "nullspace":
        rho = nullspace_populations(g)
    elif method == "tree":
        rho = tree_populations(g)
    else:
        raise ValueError(f"unknown method {method!r}")
    return SteadyState(rho, transported_power(rho, rates, 2), transported_power(rho, rates, 1))


@dataclass(frozen=True)
class PointResult:
    fluxFrac: float
    eig: EigenSystem
    rates: RateSet
    state: SteadyState

    @property
    def power(self) -> float:
        return self.state.powerTo2


def evaluate_point(params: DeviceParams, fluxFrac: float, T1: float, T2: float) -> PointResult:
    """Full pipeline at one flux: eigenstates, rates, steady state, power."""
    eig = eigensystem(params, fluxFrac)
    elems = matrix_elements(eig, params, fluxFrac)
    rates = transition_rates(elems, eig, reservoir_channels(params, T1, T2))
    return PointResult(fluxFrac, eig, rates, steady_state(rates))


def power_to_reservoir2(params: DeviceParams, fluxFrac: float, T1: float, T2: float) -> float:
    return evaluate_point(params, fluxFrac, T1, T2).power


def _occupation(x: float, kind: str) -> float:
    if kind == "absorption":
        return 1.0 / math.expm1(x)
    if kind == "emission":
        return 1.0 / -math.expm1(-x)
    raise ValueError(f"unknown occupation {kind!r}")


def bare_resistor_power(params: DeviceParams, T1: float, fluxFrac: float = 0.5,
                        occupation: str = "absorption", T2: float | None = None) -> float:
    """Closed-form qubit-mediated power from a hot bare resistor into a cold one.

    Ip^2 M^2 R w^2/(R^2 + (wL)^2) * n(w), with w the qubit angular frequency
    and the cold side at zero temperature. ``occupation="absorption"`` uses
    n = 1/(exp(x) - 1); ``"emission"`` uses 1/(1 - exp(-x)) for comparison.
    Given ``T2``, n(T1) is replaced by n(T1) - n(T2) so that the estimate
    vanishes without a temperature bias.
    """
    if not T1 > 0:
        raise ParameterError(f"T1 must be > 0, got {T1!r}")
    w = 2.0 * math.pi * qubit_frequency(params, fluxFrac)
    wl = w * params.L
    occ = _occupation(hbar * w / (kB * T1), occupation)
    if T2 is not None:
        if not T2 > 0:
            raise ParameterError(f"T2 must be > 0, got {T2!r}")
        occ -= _occupation(hbar * w / (kB * T2), occupation)
    return params.Ip**2 * params.M**2 * params.R * w * w / (params.R**2 + wl * wl) * occ


def bare_resistor_max_power(params: DeviceParams, T1: float, fluxFrac: float = 0.5,
                            occupation: str = "absorption") -> tuple[float, float]:
    """Optimal coupling inductance R/w (with M = L) and the power it gives.

    At L = M = R/w the closed form reduces to Ip^2 L w n(w) / 2.
    """
    w = 2.0 * math.pi * qubit_frequency(params, fluxFrac)
    l_opt = params.R / w
    x = hbar * w / (kB * T1)
    return l_opt, 0.5 * params.Ip**2 * l_opt * w * _occupation(x, occupation)
