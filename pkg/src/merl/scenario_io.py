"""Scenario document format: JSON in, scenarios out, and back again.

A scenario document is a single JSON object:

    {
      "version": 1,
      "register": [2, 2, 2, 2],
      "state": {"builder": "ghz", "params": {"sites": 4}},
      "measuredSite": 0,
      "controlOrder": [1, 2, 3],
      "observables": [
        {"q": "sigma_x", "o": "same"},
        {"q": {"entries": [[[0,0],[1,0]],[[1,0],[0,0]]]}, "o": "same"}
      ],
      "lTra": "sum",
      "tolerances": {"splitTol": 1e-7, "branchPruneTol": 1e-12}
    }

States are either a named builder with params or explicit amplitudes given
as [re, im] pairs, so lab-estimated states can be analyzed directly.  The
analyzer itself consumes only measurement statistics; the document supplies
a state because this package *simulates* the statistics a lab would collect.
Every parse failure names the offending field.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .linalg import Register
from .scenarios import (
    OamGhzParams,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    SPIN1_X,
    SPIN1_Y,
    SPIN1_Z,
    basis_state,
    ghz,
    oam_ghz,
    separable_composite,
    singlet,
    w_state,
)
from .spectrum import MerlScenario, ObservablePair
from .states import PRUNE_TOL_DEFAULT, QuantumState

FORMAT_VERSION = 1

NAMED_MATRICES: dict[str, np.ndarray] = {
    "sigma_x": SIGMA_X,
    "sigma_y": SIGMA_Y,
    "sigma_z": SIGMA_Z,
    "sigma_xyz": SIGMA_X + SIGMA_Y + SIGMA_Z,
    "spin1_x": SPIN1_X,
    "spin1_y": SPIN1_Y,
    "spin1_z": SPIN1_Z,
    "spin1_xyz": SPIN1_X + SPIN1_Y + SPIN1_Z,
}


class ScenarioFormatError(ValueError):
    """Malformed scenario document; the message names the offending field."""

    def __init__(self, field: str, problem: str):
        self.field = field
        super().__init__(f"{field}: {problem}")


def _get(doc: Mapping[str, Any], key: str, kind, path: str, required: bool = True):
    if key not in doc:
        if required:
            raise ScenarioFormatError(f"{path}{key}", "missing required field")
        return None
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise ScenarioFormatError(f"{path}{key}", f"expected {kind}, got {type(val).__name__}")
    return val


def _parse_complex_pairs(raw, path: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise ScenarioFormatError(path, "entries must be numeric [re, im] pairs") from None
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ScenarioFormatError(path, "entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _parse_matrix(spec, path: str) -> np.ndarray:
    if isinstance(spec, str):
        if spec not in NAMED_MATRICES:
            raise ScenarioFormatError(
                path, f"unknown matrix name {spec!r}; known: {sorted(NAMED_MATRICES)}"
            )
        return NAMED_MATRICES[spec]
    if isinstance(spec, dict) and "entries" in spec:
        m = _parse_complex_pairs(spec["entries"], path + ".entries")
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ScenarioFormatError(path + ".entries", "matrix must be square")
        return m
    raise ScenarioFormatError(path, "expected a matrix name or {\"entries\": ...}")


def _build_state(spec: Mapping[str, Any], dims: list[int], path: str) -> QuantumState:
    if "amplitudes" in spec:
        v = _parse_complex_pairs(spec["amplitudes"], path + ".amplitudes")
        if v.ndim != 1:
            raise ScenarioFormatError(path + ".amplitudes", "expected a flat amplitude list")
        try:
            return QuantumState.pure(Register(dims), v)
        except ValueError as exc:
            raise ScenarioFormatError(path + ".amplitudes", str(exc)) from None
    builder = _get(spec, "builder", str, path + ".")
    params = _get(spec, "params", dict, path + ".", required=False) or {}
    ppath = path + ".params"
    try:
        if builder == "ghz":
            sites = int(params.get("sites", 0))
            dim = int(params.get("dim", 2))
            spectators = int(params.get("spectators", 0))
            core = ghz(sites, dim)
            if spectators:
                pads = [basis_state([dim], [0])] * spectators
                return separable_composite([core, *pads])
            return core
        if builder == "w":
            return w_state(int(params.get("sites", 0)))
        if builder == "singlet":
            return singlet()
        if builder == "basis":
            digits = params.get("digits")
            if not isinstance(digits, list):
                raise ScenarioFormatError(ppath + ".digits", "expected a list of digits")
            return basis_state(dims, [int(x) for x in digits])
        if builder == "oam_ghz":
            if "mu" not in params:
                raise ScenarioFormatError(ppath + ".mu", "missing required field")
            maps = params.get("basisMaps")
            if maps is None:
                return oam_ghz(OamGhzParams(float(params["mu"])))
            return oam_ghz(
                OamGhzParams(float(params["mu"]), tuple(tuple(m) for m in maps))
            )
    except ScenarioFormatError:
        raise
    except (ValueError, TypeError) as exc:
        raise ScenarioFormatError(ppath, str(exc)) from None
    raise ScenarioFormatError(
        path + ".builder",
        f"unknown builder {builder!r}; known: ghz, w, singlet, basis, oam_ghz",
    )


def parse_scenario_document(doc: Mapping[str, Any]) -> MerlScenario:
    """Validate a parsed JSON document and assemble the scenario it describes."""
    if not isinstance(doc, Mapping):
        raise ScenarioFormatError("(document)", "top level must be a JSON object")
    version = _get(doc, "version", int, "")
    if version != FORMAT_VERSION:
        raise ScenarioFormatError("version", f"unsupported version {version}")

    register = _get(doc, "register", list, "")
    if not register or not all(isinstance(d, int) and d >= 2 for d in register):
        raise ScenarioFormatError("register", "expected a list of integer dims >= 2")

    state = _build_state(_get(doc, "state", dict, ""), register, "state")
    if list(state.reg.dims) != list(register):
        raise ScenarioFormatError(
            "register", f"declared dims {register} do not match state dims {list(state.reg.dims)}"
        )

    measured = _get(doc, "measuredSite", int, "")
    control_order = _get(doc, "controlOrder", list, "")
    if not control_order or not all(isinstance(s, int) for s in control_order):
        raise ScenarioFormatError("controlOrder", "expected a list of site indices")

    raw_pairs = _get(doc, "observables", list, "")
    if not raw_pairs:
        raise ScenarioFormatError("observables", "need at least one observable pair")
    pairs = []
    for i, entry in enumerate(raw_pairs):
        path = f"observables[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioFormatError(path, "expected an object with q and o")
        q = _parse_matrix(_get(entry, "q", None, path + "."), path + ".q")
        o_spec = entry.get("o", "same")
        o = None
        o_by_site = None
        if isinstance(o_spec, str) and o_spec == "same":
            pass
        elif isinstance(o_spec, dict) and "bySite" in o_spec:
            by = o_spec["bySite"]
            if not isinstance(by, dict):
                raise ScenarioFormatError(path + ".o.bySite", "expected an object")
            o_by_site = {
                int(site): _parse_matrix(m, f"{path}.o.bySite[{site}]")
                for site, m in by.items()
            }
        else:
            o = _parse_matrix(o_spec, path + ".o")
        try:
            pairs.append(ObservablePair(q=q, o=o, o_by_site=o_by_site))
        except ValueError as exc:
            raise ScenarioFormatError(path, str(exc)) from None

    l_tra_raw = doc.get("lTra", "sum")
    if isinstance(l_tra_raw, str):
        if l_tra_raw != "sum":
            raise ScenarioFormatError("lTra", f"expected \"sum\" or a number, got {l_tra_raw!r}")
        l_tra = None
    elif isinstance(l_tra_raw, (int, float)):
        l_tra = float(l_tra_raw)
    else:
        raise ScenarioFormatError("lTra", "expected \"sum\" or a number")

    tol = doc.get("tolerances", {}) or {}
    if not isinstance(tol, dict):
        raise ScenarioFormatError("tolerances", "expected an object")
    split_tol = tol.get("splitTol")
    prune_tol = tol.get("branchPruneTol", PRUNE_TOL_DEFAULT)

    try:
        scenario = MerlScenario(
            state=state,
            measured_site=measured,
            control_sites=tuple(control_order),
            pairs=tuple(pairs),
            l_tra=l_tra,
            split_tol=None if split_tol is None else float(split_tol),
            prune_tol=float(prune_tol),
        )
    except ValueError as exc:
        raise ScenarioFormatError("(document)", str(exc)) from None
    for k in range(len(scenario.pairs)):
        try:
            scenario.measured_observable(k)
            scenario.control_chain(k)
        except ValueError as exc:
            raise ScenarioFormatError(f"observables[{k}]", str(exc)) from None
    return scenario


def parse_scenario_text(text: str) -> MerlScenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"(line {exc.lineno}, col {exc.colno})", exc.msg) from None
    return parse_scenario_document(doc)


def load_scenario(path: str | Path) -> MerlScenario:
    return parse_scenario_text(Path(path).read_text())


def _matrix_spec(m: np.ndarray):
    for name, known in NAMED_MATRICES.items():
        if known.shape == m.shape and np.array_equal(known, m):
            return name
    return {"entries": [[[float(z.real), float(z.imag)] for z in row] for row in m]}


def _pairs_and_complex(v: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in v]


def scenario_to_document(
    scenario: MerlScenario, state_spec: Mapping[str, Any] | None = None
) -> dict:
    """Serialize a scenario to the document format.

    Pure states are written as explicit amplitudes unless a builder spec is
    supplied; explicit amplitudes and matrix entries round-trip float64
    exactly, so re-parsing reproduces the spectrum bit for bit.
    """
    if state_spec is None:
        if not scenario.state.is_pure:
            raise ValueError("only pure states serialize as amplitudes; pass a builder spec")
        state_spec = {"amplitudes": _pairs_and_complex(scenario.state.vector)}
    observables = []
    for p in scenario.pairs:
        entry: dict[str, Any] = {"q": _matrix_spec(np.asarray(p.q))}
        if p.o_by_site is not None:
            entry["o"] = {
                "bySite": {str(site): _matrix_spec(np.asarray(m)) for site, m in p.o_by_site.items()}
            }
        elif p.o is not None:
            entry["o"] = _matrix_spec(np.asarray(p.o))
        else:
            entry["o"] = "same"
        observables.append(entry)
    doc: dict[str, Any] = {
        "version": FORMAT_VERSION,
        "register": list(scenario.state.reg.dims),
        "state": dict(state_spec),
        "measuredSite": scenario.measured_site,
        "controlOrder": list(scenario.control_sites),
        "observables": observables,
        "lTra": "sum" if scenario.l_tra is None else scenario.l_tra,
    }
    tol: dict[str, float] = {}
    if scenario.split_tol is not None:
        tol["splitTol"] = scenario.split_tol
    if scenario.prune_tol != PRUNE_TOL_DEFAULT:
        tol["branchPruneTol"] = scenario.prune_tol
    if tol:
        doc["tolerances"] = tol
    return doc


def save_scenario(scenario: MerlScenario, path: str | Path, **kwargs) -> None:
    Path(path).write_text(json.dumps(scenario_to_document(scenario, **kwargs), indent=2))
