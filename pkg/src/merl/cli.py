"""Command-line front end: scenario files in, spectra/verdicts/sweep tables out.

Verbs: analyze, sweep, audit, figures.  Exit codes: 0 success, 2 for
unusable input (bad file, bad field, unknown parameter), 3 for numeric or
internal-consistency failures.  With --quiet, stdout carries data only.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .audit import run_audit
from .scenario_io import (
    ScenarioFormatError,
    load_scenario,
    parse_scenario_document,
    scenario_to_document,
)
from .scenarios import (
    OAM_MAPS_POSITIONAL,
    four_qubit_scenarios,
    oam_photon_scenario,
)
from .spectrum import ConsistencyError, MerlSpectrum, best_order_search, merl_spectrum

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _verdict_dict(spectrum: MerlSpectrum):
    if spectrum.verdict is None:
        return None
    v = spectrum.verdict
    return {
        "particleCount": v.particle_count,
        "splitCount": v.split_count,
        "admissibleClasses": list(v.admissible_classes),
        "genuinelyEntangled": v.genuinely_entangled,
        "note": v.note,
    }


def _spectrum_dict(spectrum: MerlSpectrum) -> dict:
    return {
        "lines": list(spectrum.lines),
        "splits": list(spectrum.splits),
        "splitCount": spectrum.split_count,
        "splitTol": spectrum.split_tol,
        "verdict": _verdict_dict(spectrum),
        "prunedMass": spectrum.pruned_mass,
        "note": spectrum.note,
    }


def _spectrum_csv(spectrum: MerlSpectrum, order=None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    n = len(spectrum.lines) - 1
    header = [f"L{m}" for m in range(n + 1)]
    header += [f"split{m}" for m in range(1, n + 1)]
    header += ["splitCount", "verdict", "prunedMass"]
    row = [_fmt(x) for x in spectrum.lines]
    row += ["1" if s else "0" for s in spectrum.splits]
    verdict = "|".join(spectrum.verdict.admissible_classes) if spectrum.verdict else ""
    row += [str(spectrum.split_count), verdict, _fmt(spectrum.pruned_mass)]
    if order is not None:
        header.append("controlOrder")
        row.append(" ".join(str(s) for s in order))
    writer.writerow(header)
    writer.writerow(row)
    return buf.getvalue()


def _emit(text: str, output: str | None, quiet: bool, describe: str) -> None:
    if output:
        Path(output).write_text(text)
        if not quiet:
            print(f"wrote {describe} to {output}")
    elif quiet:
        sys.stdout.write(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _cmd_analyze(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.tolerance_split is not None:
        scenario = replace(scenario, split_tol=args.tolerance_split)
    spectrum = merl_spectrum(scenario)
    best = None
    if args.best_order:
        best = best_order_search(scenario)
    if args.format == "json":
        result = _spectrum_dict(spectrum)
        if best is not None:
            order, best_spectrum = best
            result["bestOrder"] = {"controlOrder": list(order), **_spectrum_dict(best_spectrum)}
        text = json.dumps(result, indent=2) + "\n"
    else:
        text = _spectrum_csv(spectrum)
        if best is not None:
            order, best_spectrum = best
            text += _spectrum_csv(best_spectrum, order=order)
    _emit(text, args.output, args.quiet, "analysis")
    if not args.quiet:
        verdict = ", ".join(spectrum.verdict.admissible_classes) if spectrum.verdict else "n/a"
        print(f"splitCount = {spectrum.split_count}; admissible: {verdict}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    doc_path = Path(args.scenario)
    try:
        doc = json.loads(doc_path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"(line {exc.lineno}, col {exc.colno})", exc.msg) from None
    state_spec = doc.get("state")
    if not isinstance(state_spec, dict) or "builder" not in state_spec:
        raise ScenarioFormatError("state.builder", "sweep needs a builder-based state")
    params = state_spec.setdefault("params", {})
    if args.param not in params:
        raise ScenarioFormatError(
            f"state.params.{args.param}", "unknown parameter name for this scenario"
        )
    values = np.linspace(args.start, args.stop, args.steps)
    rows = []
    n_lines = None
    for value in values:
        params[args.param] = float(value)
        scenario = parse_scenario_document(doc)
        spectrum = merl_spectrum(scenario)
        n_lines = len(spectrum.lines)
        rows.append((float(value), spectrum))
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow([args.param] + [f"L{m}" for m in range(n_lines)] + ["splitCount"])
    for value, spectrum in rows:
        writer.writerow(
            [_fmt(value)] + [_fmt(x) for x in spectrum.lines] + [str(spectrum.split_count)]
        )
    _emit(buf.getvalue(), args.output, args.quiet, "sweep table")
    return EXIT_OK


def _cmd_audit(args) -> int:
    report = run_audit(trials=args.trials, seed=args.seed)
    text = "\n".join(report.summary_lines()) + "\n"
    if args.quiet:
        counts = {
            name: {"pass": report.checks[name] - report.failures.get(name, 0),
                   "fail": report.failures.get(name, 0)}
            for name in sorted(report.checks)
        }
        sys.stdout.write(json.dumps({"trials": report.trials, "seed": report.seed,
                                     "checks": counts, "passed": report.passed}) + "\n")
    else:
        print(text, end="")
    return EXIT_OK if report.passed else EXIT_NUMERIC


def _cmd_figures(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.which == "fig2":
        lines_path = out_dir / "fig2_merls.csv"
        verdict_path = out_dir / "fig2_verdicts.csv"
        with lines_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["state", "m", "line", "split"])
            verdict_rows = []
            for name, scenario in four_qubit_scenarios():
                spectrum = merl_spectrum(scenario)
                for m, value in enumerate(spectrum.lines):
                    split = "" if m == 0 else ("1" if spectrum.splits[m - 1] else "0")
                    writer.writerow([name, str(m), _fmt(value), split])
                verdict = "|".join(spectrum.verdict.admissible_classes)
                verdict_rows.append([name, str(spectrum.split_count), verdict])
        with verdict_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["state", "splitCount", "verdict"])
            writer.writerows(verdict_rows)
        if not args.quiet:
            print(f"wrote {lines_path} and {verdict_path}")
    else:
        lines_path = out_dir / "fig3_merls.csv"
        mus = np.linspace(0.0, 1 / np.sqrt(2.0), args.steps)
        mus = np.unique(np.append(mus, 1 / np.sqrt(3.0)))  # the true GHZ point
        with lines_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["mu", "L0", "L1", "L2", "splitCount", "verdict"])
            for mu in mus:
                spectrum = merl_spectrum(oam_photon_scenario(float(mu), OAM_MAPS_POSITIONAL))
                verdict = "|".join(spectrum.verdict.admissible_classes)
                writer.writerow(
                    [_fmt(float(mu))] + [_fmt(x) for x in spectrum.lines]
                    + [str(spectrum.split_count), verdict]
                )
        if not args.quiet:
            print(f"wrote {lines_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="merl",
        description="Conditional-variance entanglement resolution analyzer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="evaluate one scenario file")
    p.add_argument("scenario", help="path to a scenario JSON document")
    p.add_argument("--output", help="write the result to this file")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--quiet", action="store_true", help="stdout carries data only")
    p.add_argument("--best-order", action="store_true",
                   help="also search control permutations for the maximal split count")
    p.add_argument("--tolerance-split", type=float, default=None,
                   help="override the split detection tolerance")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("sweep", help="sweep one state-builder parameter")
    p.add_argument("scenario")
    p.add_argument("--param", required=True, help="state builder parameter to sweep")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--output", help="write the CSV table to this file")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("audit", help="run the randomized identity checks")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("figures", help="emit plot-ready benchmark tables")
    p.add_argument("--which", choices=("fig2", "fig3"), required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--steps", type=int, default=50, help="sweep points for fig3")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_figures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConsistencyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
