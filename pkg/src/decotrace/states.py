"""Momentum grids, biphoton amplitudes and bound-state recoil densities.

Everything here is one-dimensional: each transverse axis is treated
separately, and the double-Gaussian model factorizes across axes.

All objects are immutable after construction.  Arrays held by them are
flagged read-only so they can be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from .errors import ConfigurationError, DomainError

# Tabulation needs at least this many nodes per axis.
MIN_POINTS = 16
# Double-Gaussian tabulation must cover +/- this many widths.
MIN_COVERAGE = 4.0
# Fractional distance from a node below which a query snaps onto it.
_SNAP = 1e-9


def _frozen(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MomentumGrid:
    """Uniform grid ``k_j = k_min + j * spacing`` on a momentum axis (m^-1)."""

    k_min: float
    k_max: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.k_min) and math.isfinite(self.k_max)):
            raise ConfigurationError("grid bounds must be finite")
        if not self.k_min < self.k_max:
            raise ConfigurationError(
                f"grid needs k_min < k_max, got {self.k_min} >= {self.k_max}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ConfigurationError(
                f"grid needs n_points >= 2, got {self.n_points}")
        object.__setattr__(self, "n_points", int(self.n_points))

    @classmethod
    def symmetric(cls, half_width, n_points):
        """Grid on ``[-half_width, half_width]``."""
        return cls(-float(half_width), float(half_width), n_points)

    @property
    def spacing(self) -> float:
        return (self.k_max - self.k_min) / (self.n_points - 1)

    @cached_property
    def points(self) -> np.ndarray:
        return _frozen(self.k_min + np.arange(self.n_points) * self.spacing)

    def __len__(self):
        return self.n_points

    def contains(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        slack = _SNAP * self.spacing
        return (k >= self.k_min - slack) & (k <= self.k_max + slack)

    def fractional_index(self, k) -> np.ndarray:
        """Position of ``k`` in units of the spacing, snapped onto nearby nodes."""
        x = (np.asarray(k, dtype=float) - self.k_min) / self.spacing
        nearest = np.rint(x)
        return np.where(np.abs(x - nearest) < _SNAP, nearest, x)


@dataclass(frozen=True)
class DoubleGaussian:
    """Analytic SPDC amplitude.

    ``f(ks, ki) = A exp(-(ks + ki)^2 / (4 sigma_p^2)) exp(-(ks - ki)^2 / (4 sigma_c^2))``

    The sum coordinate carries the pump width ``sigma_p`` and the difference
    coordinate carries the conditional width ``sigma_c``; ``A`` makes the
    amplitude unit-normalized on the real plane.
    """

    sigma_p: float
    sigma_c: float

    def __post_init__(self):
        for name in ("sigma_p", "sigma_c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be positive, got {value}")

    @property
    def kind(self) -> str:
        return "double_gaussian"

    @property
    def norm_constant(self) -> float:
        # int |f|^2 = A^2 * pi * sigma_p * sigma_c  (Jacobian 1/2 of the
        # sum/difference rotation times the two Gaussian integrals)
        return 1.0 / math.sqrt(math.pi * self.sigma_p * self.sigma_c)

    @property
    def max_width(self) -> float:
        return max(self.sigma_p, self.sigma_c)

    def __call__(self, k_s, k_i):
        k_s = np.asarray(k_s, dtype=float)
        k_i = np.asarray(k_i, dtype=float)
        # the sum and difference are symmetric under ks <-> ki bit for bit
        s = k_s + k_i
        d = k_s - k_i
        value = self.norm_constant * np.exp(
            -(s * s) / (4.0 * self.sigma_p ** 2) - (d * d) / (4.0 * self.sigma_c ** 2))
        return value.astype(complex)


@dataclass(frozen=True, eq=False)
class TabulatedAmplitude:
    """Amplitude sampled on ``grid_s x grid_i``; ``values[j, l] = f(ks_j, ki_l)``.

    The samples are L2-normalized with the rectangle rule,
    ``sum |f|^2 dks dki == 1``.  Off-node queries use bilinear interpolation.
    """

    grid_s: MomentumGrid
    grid_i: MomentumGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        expected = (self.grid_s.n_points, self.grid_i.n_points)
        if values.shape != expected:
            raise ConfigurationError(
                f"values shape {values.shape} does not match grids {expected}")
        if not np.all(np.isfinite(values)):
            raise ConfigurationError("amplitude values must be finite")
        norm = self.norm_squared_of(values, self.grid_s, self.grid_i)
        if abs(norm - 1.0) > 1e-10:
            raise ConfigurationError(
                f"tabulated amplitude not normalized: sum |f|^2 dk dk = {norm!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @staticmethod
    def norm_squared_of(values, grid_s, grid_i) -> float:
        weights = np.abs(values) ** 2
        return float(weights.sum()) * grid_s.spacing * grid_i.spacing

    @classmethod
    def normalized(cls, grid_s, grid_i, values):
        """Build from raw samples, rescaling them to unit norm."""
        values = np.asarray(values, dtype=complex)
        norm = cls.norm_squared_of(values, grid_s, grid_i)
        if not norm > 0:
            raise ConfigurationError("cannot normalize an all-zero amplitude")
        return cls(grid_s, grid_i, values / math.sqrt(norm))

    @property
    def kind(self) -> str:
        return "tabulated"

    @property
    def shape(self):
        return self.values.shape

    def __eq__(self, other):
        if not isinstance(other, TabulatedAmplitude):
            return NotImplemented
        return (self.grid_s == other.grid_s and self.grid_i == other.grid_i
                and np.array_equal(self.values, other.values))

    __hash__ = None

    def __call__(self, k_s, k_i):
        k_s, k_i = np.broadcast_arrays(np.asarray(k_s, dtype=float),
                                       np.asarray(k_i, dtype=float))
        if not (np.all(self.grid_s.contains(k_s)) and np.all(self.grid_i.contains(k_i))):
            raise DomainError("query outside the tabulated momentum grid")
        x = np.clip(self.grid_s.fractional_index(k_s), 0, self.grid_s.n_points - 1)
        y = np.clip(self.grid_i.fractional_index(k_i), 0, self.grid_i.n_points - 1)
        j0 = np.minimum(np.floor(x).astype(int), self.grid_s.n_points - 2)
        l0 = np.minimum(np.floor(y).astype(int), self.grid_i.n_points - 2)
        tx = x - j0
        ty = y - l0
        v = self.values
        out = ((1 - tx) * (1 - ty) * v[j0, l0] + tx * (1 - ty) * v[j0 + 1, l0]
               + (1 - tx) * ty * v[j0, l0 + 1] + tx * ty * v[j0 + 1, l0 + 1])
        # exact node hits return the stored sample untouched
        on_node = (tx == 0) & (ty == 0)
        return np.where(on_node, v[j0, l0], out)


BiphotonAmplitude = Union[DoubleGaussian, TabulatedAmplitude]


def evaluate_amplitude(f: BiphotonAmplitude, k_s, k_i):
    """Evaluate ``f(k_s, k_i)``; scalars in, complex scalar out.

    Raises
    ------
    DomainError
        For a tabulated amplitude queried outside its grid.
    """
    value = f(k_s, k_i)
    if np.ndim(value) == 0:
        return complex(value)
    return value


def tabulate(f: BiphotonAmplitude, grid_s: MomentumGrid,
             grid_i: MomentumGrid) -> TabulatedAmplitude:
    """Sample ``f`` on ``grid_s x grid_i`` and renormalize on that grid.

    Raises
    ------
    ConfigurationError
        If either grid has fewer than ``MIN_POINTS`` nodes, or a grid does
        not reach +/- ``MIN_COVERAGE`` widths of a double-Gaussian input.
    """
    for name, grid in (("grid_s", grid_s), ("grid_i", grid_i)):
        if grid.n_points < MIN_POINTS:
            raise ConfigurationError(
                f"{name} too coarse: {grid.n_points} points, need >= {MIN_POINTS}")
        if isinstance(f, DoubleGaussian):
            reach = MIN_COVERAGE * f.max_width * (1 - 1e-12)
            if grid.k_min > -reach or grid.k_max < reach:
                raise ConfigurationError(
                    f"{name} [{grid.k_min:g}, {grid.k_max:g}] does not cover "
                    f"+/-{MIN_COVERAGE:g} x {f.max_width:g}")
    ks, ki = np.meshgrid(grid_s.points, grid_i.points, indexing="ij")
    return TabulatedAmplitude.normalized(grid_s, grid_i, f(ks, ki))


def default_grid(f: DoubleGaussian, n_points=128, extent=5.0) -> MomentumGrid:
    """Symmetric grid spanning ``+/- extent * max(sigma_p, sigma_c)``."""
    return MomentumGrid.symmetric(extent * f.max_width, n_points)


@dataclass(frozen=True)
class BoundState:
    """Gaussian bound state with recoil density ``P(q) ~ exp(-q^2 / (2 sigma_q^2))``."""

    sigma_q: float
    kind: str = "gaussian"

    def __post_init__(self):
        if self.kind != "gaussian":
            raise ConfigurationError(f"unsupported bound-state kind {self.kind!r}")
        if not (math.isfinite(self.sigma_q) and self.sigma_q > 0):
            raise ConfigurationError(f"sigma_q must be positive, got {self.sigma_q}")

    def amplitude(self, q):
        """Momentum-space wavefunction; real, with ``amplitude(q)**2 == density(q)``."""
        q = np.asarray(q, dtype=float)
        return ((2.0 * math.pi * self.sigma_q ** 2) ** -0.25
                * np.exp(-(q * q) / (4.0 * self.sigma_q ** 2)))

    def density(self, q):
        q = np.asarray(q, dtype=float)
        return (np.exp(-(q * q) / (2.0 * self.sigma_q ** 2))
                / (self.sigma_q * math.sqrt(2.0 * math.pi)))


def recoil_density(b: BoundState, q):
    """Normalized 1D recoil-momentum density ``P(q)`` (units of m)."""
    value = b.density(q)
    return float(value) if np.ndim(value) == 0 else value
