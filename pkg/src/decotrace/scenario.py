"""Physical scenarios and the Gaussian entanglement-survival threshold.

A scenario survives when the accumulated recoil spread stays below the
entangled bandwidth::

    N * sigma_q2 < sigma_p**2 - sigma_c**2,    N = n_gas * cross_section * path_length

with the gas density from the ideal-gas law.  All quantities are SI
(m^-1 for momenta, m^-2 for their squares).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigurationError, ScenarioError

# CODATA 2018, exact where the SI defines them.
BOLTZMANN = 1.380649e-23  # J/K
ELECTRON_MASS = 9.1093837e-31  # kg
HBAR = 1.054571817e-34  # J s
TORR = 133.322  # Pa
ELECTRON_VOLT = 1.602176634e-19  # J

DEFAULT_TEMPERATURE = 300.0

NO_ENTANGLEMENT = "no initial entanglement"


def number_density(pressure, temperature=DEFAULT_TEMPERATURE):
    """Ideal-gas number density ``P / (k_B T)`` in m^-3."""
    if pressure < 0 or not temperature > 0:
        raise ConfigurationError("pressure must be >= 0 and temperature > 0")
    return pressure / (BOLTZMANN * temperature)


def interaction_number(density, cross_section, length):
    """Mean number of interactions ``density * cross_section * length``."""
    if density < 0 or cross_section < 0 or length < 0:
        raise ConfigurationError("density, cross-section and length must be >= 0")
    return density * cross_section * length


def recoil_momentum(energy):
    """Wavenumber ``sqrt(2 m_e E) / hbar`` of an electron with kinetic energy ``energy`` (J)."""
    if energy < 0:
        raise ConfigurationError(f"energy must be >= 0, got {energy}")
    return math.sqrt(2.0 * ELECTRON_MASS * energy) / HBAR


def recoil_variance_from_energy(energy):
    """Transverse recoil variance ``k_e**2 / 2`` in m^-2 for a photoelectron energy in J."""
    k_e = recoil_momentum(energy)
    return 0.5 * k_e * k_e


@dataclass(frozen=True)
class Scenario:
    """Physical parameters of one gas-cell configuration.

    Exactly one of ``photoelectron_energy`` (J, ionization mode) and
    ``recoil_sigma_q2`` (m^-2, direct mode) must be given.
    ``interaction_number`` overrides the ideal-gas estimate of N when set.
    """

    pressure: float
    cross_section: float
    path_length: float
    sigma_p: float
    sigma_c: float
    temperature: float = DEFAULT_TEMPERATURE
    photoelectron_energy: Optional[float] = None
    recoil_sigma_q2: Optional[float] = None
    interaction_number: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        for name in ("pressure", "temperature", "cross_section", "path_length",
                     "sigma_p", "sigma_c", "photoelectron_energy", "recoil_sigma_q2"):
            value = getattr(self, name)
            if value is None:
                continue
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ScenarioError(f"{name} must be a number", field=name)
            if not (math.isfinite(value) and value > 0):
                raise ScenarioError(f"{name} must be positive, got {value}", field=name)
        if (self.photoelectron_energy is None) == (self.recoil_sigma_q2 is None):
            raise ScenarioError(
                "give exactly one of photoelectron energy and recoil variance",
                field="photoelectron_energy")
        n = self.interaction_number
        if n is not None and not (math.isfinite(n) and n >= 0):
            raise ScenarioError(f"interaction_number must be >= 0, got {n}",
                                field="interaction_number")

    @property
    def mode(self) -> str:
        return "ionization" if self.photoelectron_energy is not None else "direct"

    @property
    def density(self) -> float:
        return number_density(self.pressure, self.temperature)

    @property
    def derived_N(self) -> float:
        """Ideal-gas N, ignoring any override."""
        return interaction_number(self.density, self.cross_section, self.path_length)

    @property
    def N(self) -> float:
        if self.interaction_number is not None:
            return self.interaction_number
        return self.derived_N

    @property
    def sigma_q2(self) -> float:
        if self.recoil_sigma_q2 is not None:
            return self.recoil_sigma_q2
        return recoil_variance_from_energy(self.photoelectron_energy)

    @property
    def initially_entangled(self) -> bool:
        return self.sigma_c < self.sigma_p

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class ThresholdVerdict:
    N: float
    sigma_q2: float
    lhs: float
    rhs: float
    survives: bool
    margin: float
    reason: Optional[str] = None


def threshold_check(s: Scenario) -> ThresholdVerdict:
    """Evaluate ``N sigma_q2 < sigma_p**2 - sigma_c**2`` for a scenario.

    The boundary itself counts as not surviving.  A scenario with
    ``sigma_c >= sigma_p`` has nothing to lose and is reported as not
    surviving with reason ``"no initial entanglement"`` and margin ``-inf``.
    """
    N = s.N
    q2 = s.sigma_q2
    lhs = N * q2
    rhs = s.sigma_p ** 2 - s.sigma_c ** 2
    if not s.initially_entangled:
        return ThresholdVerdict(N, q2, lhs, rhs, False, -math.inf, NO_ENTANGLEMENT)
    return ThresholdVerdict(N, q2, lhs, rhs, lhs < rhs, (rhs - lhs) / rhs)


def critical_length(s: Scenario) -> float:
    """Path length at which ``N sigma_q2`` reaches ``sigma_p**2 - sigma_c**2``.

    Uses the ideal-gas density; an ``interaction_number`` override is ignored.
    """
    if not s.initially_entangled:
        raise ConfigurationError("critical length needs sigma_c < sigma_p")
    rate = s.density * s.cross_section * s.sigma_q2
    if not rate > 0:
        raise ConfigurationError("critical length needs positive density, cross-section and sigma_q2")
    return (s.sigma_p ** 2 - s.sigma_c ** 2) / rate


SWEEP_AXES = ("pressure", "length", "energy", "sigma_p")


@dataclass(frozen=True)
class SweepResult:
    axis: str
    values: tuple
    verdicts: tuple

    @property
    def crossings(self) -> list:
        """Indices ``i`` where ``survives`` differs from the previous point."""
        return [i for i in range(1, len(self.verdicts))
                if self.verdicts[i].survives != self.verdicts[i - 1].survives]

    @property
    def crossing(self) -> Optional[int]:
        c = self.crossings
        return c[0] if c else None

    def __len__(self):
        return len(self.verdicts)

    def __iter__(self):
        return iter(self.verdicts)

    def __getitem__(self, i):
        return self.verdicts[i]


def scenario_at(base: Scenario, axis: str, value: float) -> Scenario:
    """Copy of ``base`` with one sweep axis set (SI units; energy in J).

    Setting the energy switches a direct-mode scenario to ionization mode.
    Setting pressure or length drops any N override so the new value matters.
    """
    if axis == "pressure":
        return base.replace(pressure=value, interaction_number=None)
    if axis == "length":
        return base.replace(path_length=value, interaction_number=None)
    if axis == "energy":
        return base.replace(photoelectron_energy=value, recoil_sigma_q2=None)
    if axis == "sigma_p":
        return base.replace(sigma_p=value)
    raise ConfigurationError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")


def sweep(base: Scenario, axis: str, values) -> SweepResult:
    """Threshold verdicts along one parameter axis.

    ``values`` must be nonempty and strictly increasing.
    """
    values = tuple(float(v) for v in values)
    if not values:
        raise ConfigurationError("sweep needs at least one value")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigurationError("sweep values must be strictly increasing")
    if axis not in SWEEP_AXES:
        raise ConfigurationError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    verdicts = tuple(threshold_check(scenario_at(base, axis, v)) for v in values)
    return SweepResult(axis, values, verdicts)
