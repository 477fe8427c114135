"""Flat ``key = value`` scenario files.

One scenario per file, ``#`` starts a comment, blank lines are ignored.
Units are fixed by the key names::

    pressure_pa         Pa
    temperature_k       K        (optional, default 300)
    cross_section_m2    m^2
    length_m            m
    photoelectron_ev    eV       (exactly one of these two)
    sigma_q2_m2         m^-2
    sigma_p_per_m       m^-1
    sigma_c_per_m       m^-1
    interaction_number  -        (optional, overrides the ideal-gas N)
    label               text     (optional)

Unknown or repeated keys are errors.
"""

from __future__ import annotations

import math
from importlib import resources
from pathlib import Path

from .errors import ScenarioError
from .scenario import DEFAULT_TEMPERATURE, ELECTRON_VOLT, Scenario

# file key -> Scenario field
_NUMERIC_KEYS = {
    "pressure_pa": "pressure",
    "temperature_k": "temperature",
    "cross_section_m2": "cross_section",
    "length_m": "path_length",
    "photoelectron_ev": "photoelectron_energy",
    "sigma_q2_m2": "recoil_sigma_q2",
    "sigma_p_per_m": "sigma_p",
    "sigma_c_per_m": "sigma_c",
    "interaction_number": "interaction_number",
}
_REQUIRED = ("pressure_pa", "cross_section_m2", "length_m", "sigma_p_per_m", "sigma_c_per_m")
KEYS = tuple(_NUMERIC_KEYS) + ("label",)

BUNDLED_PREFIX = "@"


def bundled_scenarios():
    """Names of the scenario files shipped with the package."""
    data = resources.files("decotrace") / "data"
    return sorted(p.name[:-4] for p in data.iterdir() if p.name.endswith(".scn"))


def resolve_path(target) -> Path:
    """Map ``@name`` to a bundled scenario file; other strings are plain paths."""
    target = str(target)
    if target.startswith(BUNDLED_PREFIX):
        name = target[len(BUNDLED_PREFIX):]
        if name.endswith(".scn"):
            name = name[:-4]
        path = resources.files("decotrace") / "data" / f"{name}.scn"
        if not path.is_file():
            raise ScenarioError(
                f"no bundled scenario {name!r}; available: {', '.join(bundled_scenarios())}")
        return Path(str(path))
    return Path(target)


def _check_sign(key, value, source, lineno):
    if key == "interaction_number":
        ok, bound = value >= 0, ">= 0"
    else:
        ok, bound = value > 0, "> 0"
    if not ok:
        raise ScenarioError(f"{source}: {key} must be {bound}, got {value!r}",
                            field=key, line=lineno)


def parse_scenario_text(text, source="<string>") -> Scenario:
    entries = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not sep or not key:
            raise ScenarioError(f"{source}: expected 'key = value', got {raw.strip()!r}",
                                line=lineno)
        if key not in KEYS:
            raise ScenarioError(f"{source}: unknown key", field=key, line=lineno)
        if key in entries:
            raise ScenarioError(f"{source}: duplicate key", field=key, line=lineno)
        if key == "label":
            entries[key] = value
        else:
            try:
                entries[key] = float(value)
            except ValueError:
                raise ScenarioError(f"{source}: not a number: {value!r}",
                                    field=key, line=lineno) from None
            if not math.isfinite(entries[key]):
                raise ScenarioError(f"{source}: value must be finite", field=key, line=lineno)
            _check_sign(key, entries[key], source, lineno)
        lines[key] = lineno

    for key in _REQUIRED:
        if key not in entries:
            raise ScenarioError(f"{source}: missing required key", field=key)
    has_energy = "photoelectron_ev" in entries
    has_q2 = "sigma_q2_m2" in entries
    if has_energy == has_q2:
        which = "both" if has_energy else "neither"
        raise ScenarioError(
            f"{source}: give exactly one of photoelectron_ev and sigma_q2_m2 ({which} given)",
            field="photoelectron_ev", line=lines.get("sigma_q2_m2"))

    kwargs = {_NUMERIC_KEYS[k]: v for k, v in entries.items() if k != "label"}
    kwargs.setdefault("temperature", DEFAULT_TEMPERATURE)
    if has_energy:
        kwargs["photoelectron_energy"] = entries["photoelectron_ev"] * ELECTRON_VOLT
    kwargs["label"] = entries.get("label", "")
    return Scenario(**kwargs)


def parse_scenario_file(path) -> Scenario:
    """Read and validate a scenario file.

    ``path`` may be ``@name`` for a bundled scenario.

    Raises
    ------
    ScenarioError
        Naming the offending field and, where known, the line.
    """
    path = resolve_path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario file {str(path)!r}: {exc}") from exc
    return parse_scenario_text(text, source=str(path))


def _energy_in_ev(energy_j):
    """Shortest eV value whose conversion back to J reproduces ``energy_j`` exactly."""
    ev = energy_j / ELECTRON_VOLT
    candidate = ev
    for _ in range(8):
        if candidate * ELECTRON_VOLT == energy_j:
            return candidate
        candidate = math.nextafter(candidate, math.inf if candidate * ELECTRON_VOLT < energy_j
                                   else -math.inf)
    return ev


def format_scenario(s: Scenario) -> str:
    """Serialize to the file format; ``parse_scenario_text`` inverts it.

    The inverse is exact for every scenario read from a file.  A photoelectron
    energy in J that no eV float maps onto exactly comes back one ulp off.
    """
    one_line = s.label.splitlines() in ([], [s.label])
    if "#" in s.label or not one_line or s.label != s.label.strip():
        raise ScenarioError("label cannot hold '#', newlines or edge whitespace",
                            field="label")
    out = []
    if s.label:
        out.append(f"label = {s.label}")
    out.append(f"pressure_pa = {s.pressure!r}")
    out.append(f"temperature_k = {s.temperature!r}")
    out.append(f"cross_section_m2 = {s.cross_section!r}")
    out.append(f"length_m = {s.path_length!r}")
    if s.photoelectron_energy is not None:
        out.append(f"photoelectron_ev = {_energy_in_ev(s.photoelectron_energy)!r}")
    else:
        out.append(f"sigma_q2_m2 = {s.recoil_sigma_q2!r}")
    out.append(f"sigma_p_per_m = {s.sigma_p!r}")
    out.append(f"sigma_c_per_m = {s.sigma_c!r}")
    if s.interaction_number is not None:
        out.append(f"interaction_number = {s.interaction_number!r}")
    return "\n".join(out) + "\n"


def write_scenario_file(s: Scenario, path) -> None:
    Path(path).write_text(format_scenario(s), encoding="utf-8")
