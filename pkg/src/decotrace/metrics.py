"""Entanglement and state-validity diagnostics.

Joint matrices use a row-major index layout: the flat index of the pair
``(s, i)`` is ``s * n_i + i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, NumericalError, ValidityError
from .states import MomentumGrid, TabulatedAmplitude

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGEN_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class JointDensityMatrix:
    """Discretized bipartite density matrix on ``grid_s x grid_i``."""

    grid_s: MomentumGrid
    grid_i: MomentumGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        d = self.grid_s.n_points * self.grid_i.n_points
        if values.shape != (d, d):
            raise ConfigurationError(
                f"joint matrix shape {values.shape} does not match grids ({d}, {d})")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.values))

    def same_grids(self, other) -> bool:
        return self.grid_s == other.grid_s and self.grid_i == other.grid_i

    def _as_tensor(self):
        ns, ni = self.grid_s.n_points, self.grid_i.n_points
        return self.values.reshape(ns, ni, ns, ni)

    def reduced_signal(self) -> np.ndarray:
        """Partial trace over the idler; an ``n_s x n_s`` matrix."""
        return np.einsum("aibi->ab", self._as_tensor())

    def reduced_idler(self) -> np.ndarray:
        return np.einsum("sasb->ab", self._as_tensor())

    def partial_transpose(self) -> np.ndarray:
        """Transpose on the idler index: ``rho[(s,i),(s',i')] -> rho[(s,i'),(s',i)]``."""
        t = self._as_tensor().transpose(0, 3, 2, 1)
        return t.reshape(self.dim, self.dim)

    def check_validity(self, hermitian_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL,
                       eigen_tol=EIGEN_TOL) -> np.ndarray:
        """Raise ``ValidityError`` unless Hermitian, unit-trace and PSD.

        Returns the eigenvalues (ascending) so callers need not recompute them.
        """
        rho = self.values
        asym = float(np.max(np.abs(rho - rho.conj().T)))
        if asym > hermitian_tol:
            raise ValidityError(f"not Hermitian: max |rho - rho^H| = {asym:.3e}")
        tr = self.trace
        if abs(tr - 1.0) > trace_tol:
            raise ValidityError(f"trace {tr.real:.15g} differs from 1")
        eig = _eigvalsh(rho)
        if eig[0] < -eigen_tol:
            raise ValidityError(f"not positive semidefinite: min eigenvalue {eig[0]:.3e}")
        return eig


def _eigvalsh(m):
    m = 0.5 * (m + m.conj().T)
    # real symmetric input (every Gaussian-kernel state) takes the faster real solver
    if np.iscomplexobj(m) and not np.any(m.imag):
        m = m.real
    try:
        return np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolve failed: {exc}") from exc


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    """Schmidt coefficients in descending order with ``sum(lambda**2) == 1``."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("Schmidt spectrum must be a nonempty 1D sequence")
        if np.any(c < 0):
            raise ValueError("Schmidt coefficients must be nonnegative")
        if np.any(np.diff(c) > 0):
            raise ValueError("Schmidt coefficients must be in descending order")
        total = float(np.sum(c * c))
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"sum of squared Schmidt coefficients is {total!r}, not 1")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def __len__(self):
        return self.coefficients.size

    @property
    def weights(self) -> np.ndarray:
        return self.coefficients ** 2


def schmidt_decompose(f: TabulatedAmplitude) -> SchmidtSpectrum:
    """Schmidt coefficients of a tabulated amplitude via the SVD.

    The sample matrix is scaled by ``sqrt(dks * dki)`` so that its singular
    values approximate those of the continuous amplitude, then renormalized.
    """
    mat = f.values * math.sqrt(f.grid_s.spacing * f.grid_i.spacing)
    try:
        sv = np.linalg.svd(mat, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed: {exc}") from exc
    sv = np.sort(sv)[::-1]
    return SchmidtSpectrum(sv / math.sqrt(float(np.sum(sv * sv))))


def schmidt_number(s: SchmidtSpectrum) -> float:
    """Participation ratio ``1 / sum(lambda**4)``."""
    w = s.weights
    return 1.0 / float(np.sum(w * w))


def pure_state_negativity(s: SchmidtSpectrum) -> float:
    """``sum_{n<m} lambda_n lambda_m``, the negativity of the pure state."""
    total = math.fsum(s.coefficients)
    return 0.5 * (total * total - 1.0)


def negativity(rho: JointDensityMatrix, check=True) -> float:
    """PPT negativity, the magnitude of the negative part of ``rho^{T_i}``.

    Raises
    ------
    ValidityError
        If ``check`` is set and ``rho`` fails the validity gate.
    NumericalError
        If the eigensolve fails.
    """
    if check:
        rho.check_validity()
    eig = _eigvalsh(rho.partial_transpose())
    return float(-math.fsum(eig[eig < 0]))


def purity(rho: JointDensityMatrix) -> float:
    """``Tr(rho^2)``; for Hermitian ``rho`` the sum of squared magnitudes."""
    return float(np.sum(np.abs(rho.values) ** 2))


def _moment_width(f: TabulatedAmplitude, sign):
    ks = f.grid_s.points[:, None]
    ki = f.grid_i.points[None, :]
    coord = ks + sign * ki
    w = np.abs(f.values) ** 2
    total = math.fsum(w.ravel())
    mean = math.fsum((w * coord).ravel()) / total
    second = math.fsum((w * coord * coord).ravel()) / total
    return math.sqrt(max(second - mean * mean, 0.0))


def conditional_width(f: TabulatedAmplitude) -> float:
    """Standard deviation of ``ks - ki`` under ``|f|^2``.

    Equals ``sigma_c`` for the double-Gaussian model.  Correctly rounded sums
    make the result invariant under signal/idler exchange.
    """
    return _moment_width(f, -1.0)


def pump_width(f: TabulatedAmplitude) -> float:
    """Standard deviation of ``ks + ki`` under ``|f|^2`` (``sigma_p`` for the model)."""
    return _moment_width(f, 1.0)


def maximally_mixed(grid_s: MomentumGrid, grid_i: MomentumGrid) -> JointDensityMatrix:
    d = grid_s.n_points * grid_i.n_points
    return JointDensityMatrix(grid_s, grid_i, np.eye(d) / d)
