"""Decoherence kernels and their action on biphoton states.

Kernels are diagonal-normalized: ``K[j, l] = Lam(k_j, k_l) / sqrt(Lam(k_j, k_j) Lam(k_l, k_l))``.
The absolute prefactor of the microscopic kernel never enters, so only
coherence suppression is modelled, not absolute rates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._parallel import ordered_map
from .errors import ConfigurationError, NumericalError, TruncationError
from .metrics import JointDensityMatrix
from .states import BoundState, MomentumGrid, TabulatedAmplitude

QUADRATURE_NODES = 1024
QUADRATURE_REACH = 8.0
QUADRATURE_TOL = 1e-6
# Largest fraction of displaced probability allowed to fall off the grid.
CLIP_TOL = 0.01


@dataclass(frozen=True)
class MatrixElementParams:
    """Ingredients of the ionization matrix element along one axis.

    ``polarization`` is the polarization component on the axis (+1 or -1);
    ``prefactor`` is the overall constant, which cancels after normalization.
    """

    bound_state: BoundState
    polarization: float = 1.0
    prefactor: float = 1.0

    def __post_init__(self):
        if abs(abs(self.polarization) - 1.0) > 1e-12:
            raise ConfigurationError(
                f"polarization component must be +/-1, got {self.polarization}")

    @property
    def sigma_q(self) -> float:
        return self.bound_state.sigma_q


@dataclass(frozen=True, eq=False)
class DecoherenceKernel:
    """Normalized coherence-suppression matrix on an idler grid after ``event_number`` events."""

    grid_i: MomentumGrid
    values: np.ndarray = field(repr=False)
    event_number: float = 1.0

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        n = self.grid_i.n_points
        if v.shape != (n, n):
            raise ConfigurationError(f"kernel shape {v.shape} does not match grid ({n}, {n})")
        if not self.event_number >= 0:
            raise ConfigurationError(f"event number must be >= 0, got {self.event_number}")
        if np.max(np.abs(v - v.conj().T)) > 1e-12:
            raise NumericalError("kernel is not Hermitian")
        if not np.all(np.diag(v) == 1):
            raise NumericalError("kernel diagonal must be exactly 1")
        if np.max(np.abs(v)) > 1 + 1e-10:
            raise NumericalError("kernel entries exceed 1 in magnitude")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def matrix_element(p: MatrixElementParams, k_i, p_e_over_hbar):
    """Transition amplitude ``C eps (2 k_i - p_e/hbar) phi(k_i - p_e/hbar)``."""
    k_i = np.asarray(k_i, dtype=float)
    pe = np.asarray(p_e_over_hbar, dtype=float)
    value = (p.prefactor * p.polarization * (2.0 * k_i - pe)
             * p.bound_state.amplitude(k_i - pe))
    return float(value) if value.ndim == 0 else value


def _overlap(p, k, kp, nodes):
    """Trapezoid estimate of ``int M(k, pe) M*(kp, pe) dpe``; ``k``, ``kp`` 1D arrays.

    Each pair gets its own uniform node set covering ``QUADRATURE_REACH`` recoil
    widths beyond both momenta.
    """
    reach = QUADRATURE_REACH * p.sigma_q
    lo = np.minimum(k, kp) - reach
    hi = np.maximum(k, kp) + reach
    t = np.linspace(0.0, 1.0, nodes)
    pe = lo[:, None] + (hi - lo)[:, None] * t[None, :]
    integrand = (matrix_element(p, k[:, None], pe)
                 * np.conj(matrix_element(p, kp[:, None], pe)))
    return np.trapezoid(integrand, pe, axis=1)


def _normalized_quadrature(p, grid_i, nodes):
    k = grid_i.points
    n = k.size
    rows = np.triu_indices(n)

    def row_block(j):
        cols = np.arange(j, n)
        return _overlap(p, np.full(cols.size, k[j]), k[cols], nodes)

    upper = np.concatenate(ordered_map(row_block, range(n)))
    raw = np.zeros((n, n), dtype=upper.dtype)
    raw[rows] = upper
    diag = np.diag(raw).real.copy()
    if np.any(diag <= 0):
        raise NumericalError("kernel diagonal vanished; cannot normalize")
    scale = np.sqrt(diag)
    out = np.triu(raw / np.outer(scale, scale), 1)
    out = out + out.conj().T
    np.fill_diagonal(out, 1.0)
    return out


def kernel_quadrature(p: MatrixElementParams, grid_i: MomentumGrid,
                      nodes: int = QUADRATURE_NODES) -> DecoherenceKernel:
    """Single-event kernel from the defining recoil-momentum integral.

    The integral is evaluated by the trapezoid rule with ``nodes`` and then
    ``2 * nodes`` nodes; the finer result is returned.

    Raises
    ------
    NumericalError
        If node doubling moves any normalized entry by more than ``QUADRATURE_TOL``.
    """
    if nodes < 512:
        raise ConfigurationError(f"kernel quadrature needs >= 512 nodes, got {nodes}")
    coarse = _normalized_quadrature(p, grid_i, nodes)
    fine = _normalized_quadrature(p, grid_i, 2 * nodes)
    change = float(np.max(np.abs(fine - coarse)))
    if change > QUADRATURE_TOL:
        raise NumericalError(
            f"kernel quadrature not converged: node doubling changed an entry by {change:.2e}")
    return DecoherenceKernel(grid_i, fine, 1.0)


def kernel_gaussian(sigma_q: float, N: float, grid_i: MomentumGrid) -> DecoherenceKernel:
    """``exp(-N (k - k')^2 / (4 sigma_q^2))`` on ``grid_i``."""
    if not sigma_q > 0:
        raise ConfigurationError(f"sigma_q must be positive, got {sigma_q}")
    if not N >= 0:
        raise ConfigurationError(f"N must be >= 0, got {N}")
    k = grid_i.points
    d = k[:, None] - k[None, :]
    return DecoherenceKernel(grid_i, np.exp(-N * (d * d) / (4.0 * sigma_q ** 2)), N)


def multi_event_kernel(kernel: DecoherenceKernel, N: float) -> DecoherenceKernel:
    """Raise a kernel elementwise to reach ``N`` events.

    Magnitudes go to the power ``N / kernel.event_number`` and phases scale
    linearly.  Phases are taken from the upper triangle and mirrored, so a real
    negative entry (phase pi) stays Hermitian.  Non-integer powers need not
    preserve positivity of the joint state for kernels with negative entries.
    """
    if not N >= 0:
        raise ConfigurationError(f"N must be >= 0, got {N}")
    if kernel.event_number <= 0:
        raise ConfigurationError("cannot rescale a zero-event kernel")
    ratio = N / kernel.event_number
    v = kernel.values
    mag = np.abs(v) ** ratio
    phase = np.triu(np.angle(v), 1)
    phase = phase - phase.T
    out = mag * np.exp(1j * ratio * phase)
    np.fill_diagonal(out, 1.0)
    return DecoherenceKernel(kernel.grid_i, out, N)


def closed_form_single(p: MatrixElementParams, k_i, k_i_prime):
    """Reference single-event kernel ``k_i k_i' + sigma_q^2`` (unit prefactor)."""
    value = np.asarray(k_i, dtype=float) * np.asarray(k_i_prime, dtype=float) + p.sigma_q ** 2
    return float(value) if value.ndim == 0 else value


def closed_form_comparison(p: MatrixElementParams, grid_i: MomentumGrid,
                           nodes: int = QUADRATURE_NODES):
    """Compare the quadrature kernel with the closed-form reference, per grid point.

    Returns a list of dicts with, for each ``k``: the diagonal ratios
    ``Lam(k, k) / Lam(0, 0)`` from both routes and their difference, plus the
    normalized anti-diagonal entry ``(k, -k)`` from both routes.  Entries are
    reported, not judged.
    """
    k = grid_i.points
    zero = np.zeros(1)
    quad_diag = _overlap(p, k, k, 2 * nodes).real
    quad_origin = float(_overlap(p, zero, zero, 2 * nodes).real[0])
    quad_anti = _overlap(p, k, -k, 2 * nodes).real
    closed_diag = closed_form_single(p, k, k)
    closed_origin = closed_form_single(p, 0.0, 0.0)
    closed_anti = closed_form_single(p, k, -k)
    rows = []
    for j, kj in enumerate(k):
        qd = quad_diag[j] / quad_origin
        cd = closed_diag[j] / closed_origin
        # Lam(-k, -k) == Lam(k, k) for the Gaussian bound state
        rows.append({
            "k": float(kj),
            "quadrature_diag_ratio": float(qd),
            "closed_form_diag_ratio": float(cd),
            "diag_discrepancy": float(qd - cd),
            "quadrature_antidiag": float(quad_anti[j] / quad_diag[j]),
            "closed_form_antidiag": float(closed_anti[j] / closed_diag[j]),
        })
    return rows


def apply_kernel(f: TabulatedAmplitude, kernel: DecoherenceKernel) -> JointDensityMatrix:
    """Joint state ``f(s,i) f*(s',i') K(i,i') dks dki``, renormalized to unit trace.

    Raises
    ------
    ConfigurationError
        If the amplitude's idler grid differs from the kernel's.
    """
    if f.grid_i != kernel.grid_i:
        raise ConfigurationError("amplitude idler grid does not match kernel grid")
    ns = f.grid_s.n_points
    psi = f.values.ravel() * math.sqrt(f.grid_s.spacing * f.grid_i.spacing)
    rho = np.outer(psi, psi.conj()) * np.tile(kernel.values, (ns, ns))
    tr = float(np.trace(rho).real)
    return JointDensityMatrix(f.grid_s, f.grid_i, rho / tr)


def mix_branches(rho_coherent: JointDensityMatrix, rho_decohered: JointDensityMatrix,
                 N: float) -> JointDensityMatrix:
    """Beer-Lambert mixture ``exp(-N) rho_coherent + (1 - exp(-N)) rho_decohered``."""
    if not N >= 0:
        raise ConfigurationError(f"N must be >= 0, got {N}")
    if not rho_coherent.same_grids(rho_decohered):
        raise ConfigurationError("cannot mix density matrices on different grids")
    if N == 0:
        return rho_coherent
    w = -math.expm1(-N)
    values = (1.0 - w) * rho_coherent.values + w * rho_decohered.values
    return JointDensityMatrix(rho_coherent.grid_s, rho_coherent.grid_i, values)


def branch_weight(N: float) -> float:
    """Probability ``1 - exp(-N)`` of at least one interaction."""
    return -math.expm1(-N)


def _shift_weights(b: BoundState, spacing, n):
    """Recoil density on integer shifts ``-(n-1)..(n-1)``, normalized over all integers."""
    ratio = b.sigma_q / spacing
    shifts = np.arange(-(n - 1), n)
    w = b.density(shifts * spacing) * spacing
    reach = math.ceil(12.0 * ratio)
    if reach <= 10 ** 6:
        far = np.arange(-(n - 1 + reach), n + reach)
        total = float(np.sum(b.density(far * spacing) * spacing))
    else:
        # sampling this fine reproduces the continuous normalization
        total = 1.0
    return shifts, w / total


def displace_signal(rho_s, b: BoundState, grid_s: MomentumGrid) -> np.ndarray:
    """Convolve a reduced signal matrix with the recoil density along its diagonal.

    ``out[a, c] = sum_q rho_s[a - q, c - q] P(q) dq`` over integer grid shifts
    ``q``, clipped at the grid edges and renormalized to unit trace.

    Raises
    ------
    TruncationError
        If more than 1% of the probability is pushed off the grid.
    """
    rho_s = np.asarray(rho_s, dtype=complex)
    n = grid_s.n_points
    if rho_s.shape != (n, n):
        raise ConfigurationError(f"reduced matrix shape {rho_s.shape} does not match grid")
    rho_s = rho_s / np.trace(rho_s).real
    _warn_if_tight(rho_s, b, grid_s)
    shifts, weights = _shift_weights(b, grid_s.spacing, n)
    out = np.zeros_like(rho_s)
    for j, w in zip(shifts, weights):
        if w == 0.0:
            continue
        if j >= 0:
            out[j:, j:] += w * rho_s[:n - j, :n - j]
        else:
            out[:n + j, :n + j] += w * rho_s[-j:, -j:]
    kept = float(np.trace(out).real)
    if 1.0 - kept > CLIP_TOL:
        raise TruncationError(
            f"displacement pushed {100 * (1 - kept):.2f}% of the probability off the grid")
    return out / kept


def _warn_if_tight(rho_s, b, grid_s):
    p = np.clip(np.diag(rho_s).real, 0, None)
    k = grid_s.points
    total = p.sum()
    if total <= 0:
        return
    mean = float(np.sum(p * k) / total)
    std = math.sqrt(max(float(np.sum(p * (k - mean) ** 2) / total), 0.0))
    lo = mean - 4 * std - 4 * b.sigma_q
    hi = mean + 4 * std + 4 * b.sigma_q
    if lo < grid_s.k_min or hi > grid_s.k_max:
        warnings.warn("signal grid does not cover the support plus 4 sigma_q; "
                      "displacement will clip", RuntimeWarning, stacklevel=3)
