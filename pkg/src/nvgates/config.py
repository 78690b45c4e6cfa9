"""Scenario configuration: strict JSON schema, unit conversion, hashing.

A scenario bundles the physical register, the gate composition to run,
the initial state, the error model, and the experiment parameters
(sweep grid, Monte Carlo runs, master seed, output path).  Configs are
JSON documents with units spelled out in the key names (kHz, MHz,
tesla, degrees); all conversion to internal units (rad/s, seconds,
radians) happens here and nowhere else.  Unknown keys are errors, not
warnings: a physics config that silently drifts is worse than one that
fails loudly.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import operators as ops
from .errors import SpecError
from .gates import GateSpec, RecipeSpec
from .pulses import ErrorModel
from .register import NuclearSpin, RegisterConfig

__all__ = [
    "ScenarioConfig",
    "scenario_from_dict",
    "load_scenario",
    "scenario_to_dict",
    "config_hash",
    "paper_scenario",
    "initial_state_vector",
    "DEFAULT_SWEEP_GRID_DEG",
    "DEFAULT_PHASE_GRID",
]

TWO_PI = 2.0 * math.pi

#: Default jitter sweep grid, degrees.
DEFAULT_SWEEP_GRID_DEG = tuple(2.5 * i for i in range(11))
#: Default central-phase grid for expectation-value scans, units of pi.
DEFAULT_PHASE_GRID = tuple(np.linspace(0.0, 2.0, 41))

_ELECTRON_STATES = {
    "x+": ("x", 1),
    "x-": ("x", -1),
    "y+": ("y", 1),
    "y-": ("y", -1),
    "z+": ("z", 1),
    "z-": ("z", -1),
    "1": ("z", 1),
    "0": ("z", -1),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully validated experiment description in internal units."""

    register: RegisterConfig
    recipe: RecipeSpec
    harmonics: tuple[int, ...]
    initial_electron: str = "y+"
    initial_nuclei: str | tuple = "down"
    error_model: ErrorModel = ErrorModel()
    sweep_grid_deg: tuple[float, ...] = DEFAULT_SWEEP_GRID_DEG
    runs: int = 100
    seed: int = 1
    output: str | None = None
    max_blocks: int = 64

    def __post_init__(self):
        if len(self.harmonics) != len(self.recipe.gates):
            raise SpecError(
                f"{len(self.recipe.gates)} gates but {len(self.harmonics)} harmonics"
            )
        if self.runs < 1:
            raise SpecError("runs must be >= 1")
        if not self.sweep_grid_deg:
            raise SpecError("sweep grid must be non-empty")
        if self.initial_electron not in _ELECTRON_STATES:
            raise SpecError(
                f"unknown electron preparation {self.initial_electron!r}; "
                f"expected one of {sorted(_ELECTRON_STATES)}"
            )


def _require_keys(section: Mapping[str, Any], allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise SpecError(f"unknown keys {sorted(unknown)} in {where}")


def _nucleus_from_dict(entry: Mapping[str, Any], index: int) -> NuclearSpin:
    _require_keys(
        entry,
        {"label", "hyperfine_khz", "position_nm", "hyperfine_overrides"},
        f"register.nuclei[{index}]",
    )
    label = str(entry.get("label", f"n{index + 1}"))
    position = entry.get("position_nm")
    if position is not None:
        position = tuple(1e-9 * float(x) for x in position)
    hyperfine = entry.get("hyperfine_khz")
    if hyperfine is None:
        if position is None:
            raise SpecError(f"nucleus {label} needs hyperfine_khz or position_nm")
        return NuclearSpin.from_position(position, label=label)
    hyperfine = tuple(TWO_PI * 1e3 * float(a) for a in hyperfine)
    return NuclearSpin(
        hyperfine=hyperfine,
        label=label,
        position=position,
        hyperfine_overrides=bool(entry.get("hyperfine_overrides", False)),
    )


def _register_from_dict(section: Mapping[str, Any]) -> RegisterConfig:
    _require_keys(
        section,
        {
            "bz_tesla",
            "gamma_e_mhz_per_gauss",
            "gamma_n_khz_per_gauss",
            "detuning_mhz",
            "rabi_mhz",
            "rabi_error",
            "include_detuning",
            "include_internuclear",
            "nuclei",
            "couplings_hz",
        },
        "register",
    )
    if "bz_tesla" not in section or "nuclei" not in section:
        raise SpecError("register needs bz_tesla and nuclei")
    nuclei = tuple(
        _nucleus_from_dict(entry, i) for i, entry in enumerate(section["nuclei"])
    )
    couplings = tuple(
        (int(i), int(j), TWO_PI * float(g))
        for i, j, g in section.get("couplings_hz", ())
    )
    kwargs: dict[str, Any] = dict(
        bz=float(section["bz_tesla"]),
        nuclei=nuclei,
        couplings=couplings,
        rabi_hz=1e6 * float(section.get("rabi_mhz", 20.0)),
        rabi_error=float(section.get("rabi_error", 0.01)),
        include_detuning=bool(section.get("include_detuning", False)),
        include_internuclear=bool(section.get("include_internuclear", False)),
    )
    if "gamma_e_mhz_per_gauss" in section:
        kwargs["gamma_e"] = TWO_PI * 1e6 * 1e4 * float(section["gamma_e_mhz_per_gauss"])
    if "gamma_n_khz_per_gauss" in section:
        kwargs["gamma_n"] = TWO_PI * 1e3 * 1e4 * float(section["gamma_n_khz_per_gauss"])
    if "detuning_mhz" in section:
        kwargs["detuning"] = TWO_PI * 1e6 * float(section["detuning_mhz"])
    return RegisterConfig(**kwargs)


def _recipe_from_dict(section: Mapping[str, Any]) -> tuple[RecipeSpec, tuple[int, ...]]:
    _require_keys(
        section, {"gates", "central_phase_over_pi", "central_axis"}, "recipe"
    )
    if "gates" not in section or "central_phase_over_pi" not in section:
        raise SpecError("recipe needs gates and central_phase_over_pi")
    gates = []
    harmonics = []
    for i, entry in enumerate(section["gates"]):
        _require_keys(
            entry, {"target", "axis", "phase_over_pi", "harmonic"}, f"recipe.gates[{i}]"
        )
        gates.append(
            GateSpec(
                target=int(entry["target"]),
                axis=str(entry.get("axis", "x")),
                phase=math.pi * float(entry.get("phase_over_pi", 0.5)),
            )
        )
        harmonics.append(int(entry.get("harmonic", 0)))
    recipe = RecipeSpec(
        gates=tuple(gates),
        central_phase=math.pi * float(section["central_phase_over_pi"]),
        central_axis=str(section.get("central_axis", "x")),
    )
    return recipe, tuple(harmonics)


def _initial_state_from_dict(section: Mapping[str, Any]) -> tuple[str, Any]:
    _require_keys(section, {"electron", "nuclei"}, "initial_state")
    electron = str(section.get("electron", "y+"))
    nuclei = section.get("nuclei", "down")
    if isinstance(nuclei, str):
        if nuclei not in ("down", "up"):
            raise SpecError(f"named nuclear preparation must be down or up, got {nuclei!r}")
        return electron, nuclei
    # Explicit per-nucleus amplitudes: [[re_up, im_up, re_down, im_down], ...].
    parsed = []
    for i, amps in enumerate(nuclei):
        if len(amps) != 4:
            raise SpecError(
                f"initial_state.nuclei[{i}] needs [re_up, im_up, re_down, im_down]"
            )
        parsed.append(tuple(float(a) for a in amps))
    return electron, tuple(parsed)


def _error_model_from_dict(section: Mapping[str, Any], register: RegisterConfig) -> ErrorModel:
    _require_keys(
        section,
        {"rabi_error", "include_detuning", "phase_jitter_deg", "jitter_distribution"},
        "error_model",
    )
    return ErrorModel(
        rabi_error=float(section.get("rabi_error", register.rabi_error)),
        detuning_on=bool(section.get("include_detuning", register.include_detuning)),
        phase_jitter=math.radians(float(section.get("phase_jitter_deg", 0.0))),
        jitter_distribution=str(section.get("jitter_distribution", "uniform")),
    )


def scenario_from_dict(data: Mapping[str, Any]) -> ScenarioConfig:
    """Validate a raw config mapping and convert it to internal units."""
    _require_keys(
        data,
        {
            "register",
            "recipe",
            "initial_state",
            "error_model",
            "sweep",
            "runs",
            "seed",
            "output",
            "max_blocks",
        },
        "scenario",
    )
    if "register" not in data or "recipe" not in data:
        raise SpecError("scenario needs register and recipe sections")
    register = _register_from_dict(data["register"])
    recipe, harmonics = _recipe_from_dict(data["recipe"])
    electron, nuclei = _initial_state_from_dict(data.get("initial_state", {}))
    error_model = _error_model_from_dict(data.get("error_model", {}), register)
    sweep = data.get("sweep", {})
    _require_keys(sweep, {"variable", "grid_deg"}, "sweep")
    variable = sweep.get("variable", "phase_jitter_deg")
    if variable != "phase_jitter_deg":
        raise SpecError(f"unsupported sweep variable {variable!r}")
    grid = tuple(float(x) for x in sweep.get("grid_deg", DEFAULT_SWEEP_GRID_DEG))
    return ScenarioConfig(
        register=register,
        recipe=recipe,
        harmonics=harmonics,
        initial_electron=electron,
        initial_nuclei=nuclei,
        error_model=error_model,
        sweep_grid_deg=grid,
        runs=int(data.get("runs", 100)),
        seed=int(data.get("seed", 1)),
        output=data.get("output"),
        max_blocks=int(data.get("max_blocks", 64)),
    )


def load_scenario(path: str | Path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"config {path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(data)


def scenario_to_dict(scenario: ScenarioConfig) -> dict:
    """Canonical plain-data form of a scenario, in config units."""
    reg = scenario.register
    return {
        "register": {
            "bz_tesla": reg.bz,
            "gamma_e_mhz_per_gauss": reg.gamma_e / (TWO_PI * 1e6 * 1e4),
            "gamma_n_khz_per_gauss": reg.gamma_n / (TWO_PI * 1e3 * 1e4),
            "detuning_mhz": reg.detuning / (TWO_PI * 1e6),
            "rabi_mhz": reg.rabi_hz / 1e6,
            "rabi_error": reg.rabi_error,
            "include_detuning": reg.include_detuning,
            "include_internuclear": reg.include_internuclear,
            "nuclei": [
                {
                    "label": n.label,
                    "hyperfine_khz": [a / (TWO_PI * 1e3) for a in n.hyperfine],
                    "position_nm": None
                    if n.position is None
                    else [x * 1e9 for x in n.position],
                    "hyperfine_overrides": n.hyperfine_overrides,
                }
                for n in reg.nuclei
            ],
            "couplings_hz": [[i, j, g / TWO_PI] for i, j, g in reg.couplings],
        },
        "recipe": {
            "central_phase_over_pi": scenario.recipe.central_phase / math.pi,
            "central_axis": scenario.recipe.central_axis,
            "gates": [
                {
                    "target": g.target,
                    "axis": g.axis,
                    "phase_over_pi": g.phase / math.pi,
                    "harmonic": k,
                }
                for g, k in zip(scenario.recipe.gates, scenario.harmonics)
            ],
        },
        "initial_state": {
            "electron": scenario.initial_electron,
            "nuclei": scenario.initial_nuclei
            if isinstance(scenario.initial_nuclei, str)
            else [list(a) for a in scenario.initial_nuclei],
        },
        "error_model": {
            "rabi_error": scenario.error_model.rabi_error,
            "include_detuning": scenario.error_model.detuning_on,
            "phase_jitter_deg": math.degrees(scenario.error_model.phase_jitter),
            "jitter_distribution": scenario.error_model.jitter_distribution,
        },
        "sweep": {
            "variable": "phase_jitter_deg",
            "grid_deg": list(scenario.sweep_grid_deg),
        },
        "runs": scenario.runs,
        "seed": scenario.seed,
        "max_blocks": scenario.max_blocks,
    }


def config_hash(scenario: ScenarioConfig) -> str:
    """Short stable digest of the scenario (output path excluded)."""
    canonical = json.dumps(scenario_to_dict(scenario), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def initial_state_vector(scenario: ScenarioConfig) -> np.ndarray:
    """Gate-frame initial state from the named preparations."""
    axis, sign = _ELECTRON_STATES[scenario.initial_electron]
    factors = [ops.eigenket(axis, sign)]
    if isinstance(scenario.initial_nuclei, str):
        sign_n = -1 if scenario.initial_nuclei == "down" else 1
        factors.extend([ops.eigenket("z", sign_n)] * scenario.register.n_nuclei)
    else:
        if len(scenario.initial_nuclei) != scenario.register.n_nuclei:
            raise SpecError(
                f"{len(scenario.initial_nuclei)} nuclear amplitudes for "
                f"{scenario.register.n_nuclei} nuclei"
            )
        for re_up, im_up, re_down, im_down in scenario.initial_nuclei:
            vec = np.array([re_up + 1j * im_up, re_down + 1j * im_down])
            norm = np.linalg.norm(vec)
            if norm == 0.0:
                raise SpecError("nuclear amplitudes must not vanish")
            factors.append(vec / norm)
    return ops.kron_all(factors)


def paper_scenario(
    runs: int = 100,
    seed: int = 1,
    phase_jitter_deg: float = 0.0,
    central_phase_over_pi: float = 0.25,
) -> ScenarioConfig:
    """The benchmark three-nucleus scenario used by the acceptance suite.

    A 0.65 T register of three carbon nuclei with measured hyperfine
    vectors and internuclear couplings, 20 MHz drive with 1% amplitude
    error, the host-nitrogen detuning shift on, and the three-body
    x-axis composition at the given central phase.
    """
    data = {
        "register": {
            "bz_tesla": 0.65,
            "rabi_mhz": 20.0,
            "rabi_error": 0.01,
            "include_detuning": True,
            "include_internuclear": True,
            "nuclei": [
                {"label": "C1", "hyperfine_khz": [-56.0, -32.0, -45.0]},
                {"label": "C2", "hyperfine_khz": [-7.6, 39.0, 52.0]},
                {"label": "C3", "hyperfine_khz": [-22.0, 13.0, 96.0]},
            ],
            "couplings_hz": [[1, 2, -20.0], [1, 3, -10.0], [2, 3, 7.5]],
        },
        "recipe": {
            "central_phase_over_pi": central_phase_over_pi,
            "central_axis": "x",
            "gates": [
                {"target": 1, "axis": "x", "phase_over_pi": 0.5, "harmonic": 11},
                {"target": 2, "axis": "x", "phase_over_pi": 0.5, "harmonic": 17},
                {"target": 3, "axis": "x", "phase_over_pi": 0.5, "harmonic": 17},
            ],
        },
        "initial_state": {"electron": "y+", "nuclei": "down"},
        "error_model": {
            "rabi_error": 0.01,
            "include_detuning": True,
            "phase_jitter_deg": phase_jitter_deg,
            "jitter_distribution": "uniform",
        },
        "runs": runs,
        "seed": seed,
    }
    return scenario_from_dict(data)
