"""dirac-lr command line: verification suites and dataset export.

    dirac-lr <verify|spectrum|phase|propagate|export-field> --scenario PATH [flags] --out DIR
    dirac-lr replay MANIFEST --out DIR
"""
from __future__ import annotations

import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
import io
import json
import logging
import math
import os
from pathlib import Path
import sys

import numpy as np

from . import __version__
from .algebra import constraint_residuals, paper_coefficients
from .grid import Grid1D
from .operators import (DENSE_MAX_POINTS, discretized_invariant_eigenvalues, eigen_residual,
                        invariant_evolution_residual, oscillator_probes)
from .phase import PHASE_MODES, assemble_full_solution, lr_phase, reduced_solution
from .propagator import PropagationError, propagate, residual_pde
from .report import ResidualReport
from .scenario import (ScenarioDomainError, ScenarioFormatError, consistency_residuals,
                       load_scenario)
from .spectrum import (NORMALIZATIONS, PAIRINGS, GridResolutionError, eigen_solution,
                       grid_for, grid_half_width_xi, invariant_eigenvalue)

log = logging.getLogger("dirac_lr")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3
COMMANDS = ("verify", "spectrum", "phase", "propagate", "export-field")


class UsageError(Exception):
    pass


def fmt(v):
    return f"{float(v):.17g}"


@dataclass
class RunManifest:
    scenario: str
    command: str
    flags: dict
    tool_version: str = __version__
    timestamp: str = ""
    output_dir: str = ""
    timing: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def worker_count():
    env = os.environ.get("DIRAC_LR_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(4, os.cpu_count() or 1))


def _ordered_map(fn, items):
    items = list(items)
    if worker_count() == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(fn, items))


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=float) + "\n",
                          encoding="utf-8")


def _sample_times(params, n=5):
    w = params.window
    return [float(t) for t in np.linspace(params.t_min + 0.1 * w, params.t_max - 0.1 * w, n)]


def _grid(params, args, n_max, n_points=None, times=None):
    return grid_for(params, n_max, n_points or args.grid_points, args.grid_halfwidth_sigma,
                    times=times)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_verify(params, args, out: Path):
    ts = _sample_times(params)
    rep = ResidualReport(title="verify", meta={"pairing": args.pairing,
                                               "normalization": args.normalization,
                                               "t_samples": ts})
    w = params.window
    dense_t = np.linspace(params.t_min + 0.05 * w, params.t_max, 50)
    rep.extend(consistency_residuals(params, dense_t), prefix="scenario:")

    coeffs = paper_coefficients(params)
    for t, r in zip(ts, _ordered_map(lambda t: constraint_residuals(coeffs, params, t), ts)):
        rep.extend(r, prefix=f"constraints@t={fmt(t)}:")

    grid = _grid(params, args, args.n_max + 1, times=(params.t_min + 0.1 * w, params.t_max))
    for t, r in zip(ts, _ordered_map(
            lambda t: invariant_evolution_residual(params, t, oscillator_probes(params, t, grid)),
            ts)):
        rep.extend(r, prefix=f"evolution@t={fmt(t)}:")

    assert_eigen = params.alpha1 == 0.0 and args.pairing == "ladder"
    scan = [(t, n, s, br) for t in ts for n in range(args.n_max + 1)
            for s in (1, -1) for br in ("+", "-")]

    def eig_res(key):
        t, n, s, br = key
        eig = eigen_solution(params, n, s, br, args.pairing, args.normalization)
        return eigen_residual(params, eig, t, grid)

    for (t, n, s, br), val in zip(scan, _ordered_map(eig_res, scan)):
        rep.add(f"eigen(n={n},s={s:+d},{br})@t={fmt(t)}", val, 1e-6, asserted=assert_eigen)

    t_mid = ts[len(ts) // 2]
    ground = eigen_solution(params, 0, 1, "-", args.pairing, args.normalization)
    for mode in PHASE_MODES:
        try:
            rep.add(f"residual_pde(n=0,-,phase={mode})@t={fmt(t_mid)}",
                    residual_pde(params, ground, t_mid, grid, mode), 1e-4, asserted=False)
        except ScenarioDomainError as exc:
            rep.meta[f"residual_pde_{mode}"] = str(exc)

    _write_json(out / "verify_report.json", rep.to_dict())
    for name in rep.failures():
        print(f"FAIL {name}", file=sys.stderr)
    print(f"verify: {'PASS' if rep.passed else 'FAIL'} "
          f"({len([e for e in rep.entries if e.asserted])} asserted, "
          f"{len(rep.failures())} failed)")
    return EXIT_OK if rep.passed else EXIT_FAIL


def spectrum_grid_check(params, n_max, grid: Grid1D, sigma):
    """Raise GridResolutionError when ``grid`` cannot resolve chi_{n_max+1}."""
    half_xi = grid_half_width_xi(n_max, params.mu, sigma)
    need_half = half_xi * params.mu
    have_half = 0.5 * (grid.x_max - grid.x_min)
    # largest x-momentum carried by chi_{n_max+1}, with margin
    p_need = 1.5 * (math.sqrt(params.mu * (2 * n_max + 3)) + sigma * math.sqrt(params.mu)) / params.mu
    p_have = math.pi / grid.spacing
    if have_half < need_half * 0.999 or p_have < p_need:
        pts = int(math.ceil(2 * need_half * p_need / math.pi)) + 1
        raise GridResolutionError(
            f"grid cannot resolve n_max={n_max}: need half-width >= {need_half:.3g} and "
            f"at least ~{pts} points (have {grid.n_points}, dense cap {DENSE_MAX_POINTS})")


def cmd_spectrum(params, args, out: Path):
    if args.n_max > 32:
        raise UsageError("spectrum supports n_max <= 32")
    n_points = min(args.grid_points, DENSE_MAX_POINTS)
    grid = _grid(params, args, args.n_max, n_points=n_points, times=(args.t,))
    spectrum_grid_check(params, args.n_max, grid, args.grid_halfwidth_sigma)
    evals = discretized_invariant_eigenvalues(params, args.t, grid)
    rows = []
    for n in range(args.n_max + 1):
        for s in (1, -1):
            for br in ("+", "-"):
                lam = invariant_eigenvalue(params, n, s, br)
                near = float(evals[np.argmin(np.abs(evals - lam))])
                rows.append((str(n), f"{s:+d}", br, lam, near, abs(lam - near)))
    _write_csv(out / "spectrum.csv",
               ["n", "s", "branch", "lambda_closed", "lambda_discretized", "abs_error"], rows)
    worst = max(r[-1] for r in rows)
    print(f"spectrum: {len(rows)} rows, max abs_error {worst:.3e}")
    return EXIT_OK


def cmd_phase(params, args, out: Path):
    eig = eigen_solution(params, args.n, args.s, args.branch, args.pairing, args.normalization)
    grid = _grid(params, args, eig.max_index)
    ts = np.linspace(params.t_min, params.t_max, args.samples)
    trace = lr_phase(params, eig, ts, grid)
    (out / "phase.csv").write_text(trace.to_csv(), encoding="utf-8")
    dev = trace.max_closed_deviation()
    _write_json(out / "phase_summary.json", {
        "max_abs_delta_minus_closed": dev,
        "delta_end": float(trace.delta[-1]),
        "delta_lr_end": float(trace.delta_lr[-1]),
        "imag_max": trace.imag_max,
        "pairing": args.pairing, "normalization": args.normalization,
    })
    print(f"max |delta - delta_closed| = {dev:.17g}")
    return EXIT_OK


def cmd_propagate(params, args, out: Path):
    t0 = params.t_min if args.t0 is None else args.t0
    t1 = params.t_max if args.t1 is None else args.t1
    if not (params.t_min <= t0 < t1 <= params.t_max):
        raise ScenarioDomainError(f"[t0, t1] = [{t0}, {t1}] is not inside the window "
                                  f"[{params.t_min}, {params.t_max}]")
    eig = eigen_solution(params, args.n, args.s, args.branch, args.pairing, args.normalization)
    grid = _grid(params, args, eig.max_index + 2, times=(t0, t1))
    initial = reduced_solution(params, eig, t0, grid, args.phase)
    res = propagate(params, initial, t0, t1, args.steps, analytic_reference=eig,
                    phase=args.phase)
    _write_csv(out / "fidelity.csv", ["t", "fidelity", "overlap_phase"], res.fidelity_trace)
    _write_csv(out / "invariant.csv", ["t", "invariant_expectation"], res.invariant_trace)
    pde_t = np.linspace(t0, t1, 10)[1:-1]
    pde = [(t, residual_pde(params, eig, float(t), grid, args.phase)) for t in pde_t]
    _write_csv(out / "residual_pde.csv", ["t", "residual"], pde)
    summary = {
        "min_fidelity": res.min_fidelity,
        "max_abs_overlap_phase": res.max_overlap_phase,
        "norm_drift": res.norm_drift,
        "invariant_drift": res.invariant_drift(),
        "max_residual_pde": max(r for _, r in pde),
        "steps": res.steps,
        "t0": t0, "t1": t1,
        "n": args.n, "s": args.s, "branch": args.branch, "phase": args.phase,
    }
    _write_json(out / "propagate_summary.json", summary)
    args._timing = {"propagate_wall_time": res.wall_time}
    print(f"min_fidelity {res.min_fidelity:.12f}  norm_drift {res.norm_drift:.3e}")
    return EXIT_OK


def cmd_export_field(params, args, out: Path):
    eig = eigen_solution(params, args.n, args.s, args.branch, args.pairing, args.normalization)
    grid = _grid(params, args, eig.max_index, times=(args.t,))
    psi = assemble_full_solution(params, eig, args.t, grid, args.y, args.phase)
    rows = zip(grid.x, psi.upper.real, psi.upper.imag, psi.lower.real, psi.lower.imag,
               np.abs(psi.upper) ** 2, np.abs(psi.lower) ** 2)
    _write_csv(out / "field.csv",
               ["x", "re_psi1", "im_psi1", "re_psi2", "im_psi2", "abs_psi1_sq", "abs_psi2_sq"],
               rows)
    return EXIT_OK


HANDLERS = {"verify": cmd_verify, "spectrum": cmd_spectrum, "phase": cmd_phase,
            "propagate": cmd_propagate, "export-field": cmd_export_field}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _sign(v):
    s = int(v)
    if s not in (1, -1):
        raise argparse.ArgumentTypeError("s must be +1 or -1")
    return s


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="scenario file (.scn)")
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--pairing", choices=PAIRINGS, default="ladder")
    common.add_argument("--normalization", choices=NORMALIZATIONS, default="per-component")
    common.add_argument("--phase", choices=PHASE_MODES, default="closed")
    common.add_argument("--grid-points", type=int, default=1024)
    common.add_argument("--grid-halfwidth-sigma", type=float, default=8.0)
    common.add_argument("-v", "--verbose", action="store_true")

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--n", type=int, default=0)
    state.add_argument("--s", type=_sign, default=1)
    state.add_argument("--branch", choices=("+", "-"), default="-")

    parser = argparse.ArgumentParser(prog="dirac-lr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common])
    p.add_argument("--n-max", type=int, default=3)

    p = sub.add_parser("spectrum", parents=[common])
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--t", type=float, default=None)

    p = sub.add_parser("phase", parents=[common, state])
    p.add_argument("--samples", type=int, default=65)

    p = sub.add_parser("propagate", parents=[common, state])
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--t1", type=float, default=None)
    p.add_argument("--steps", type=int, default=4000)

    p = sub.add_parser("export-field", parents=[common, state])
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--y", type=float, default=0.0)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest.json")
    p.add_argument("manifest")
    p.add_argument("--out", required=True)
    return parser


_FLAG_KEYS = ("pairing", "normalization", "phase", "grid_points", "grid_halfwidth_sigma",
              "n_max", "t", "n", "s", "branch", "samples", "t0", "t1", "steps", "y")


def run(args) -> int:
    out = Path(args.out)
    try:
        params = load_scenario(args.scenario)
    except FileNotFoundError:
        print(f"error: scenario file not found: {args.scenario}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioFormatError as exc:
        print(f"error: malformed scenario {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if getattr(args, "t", "absent") is None:
        args.t = 0.5 * (params.t_min + params.t_max)
    flags = {k: getattr(args, k) for k in _FLAG_KEYS if hasattr(args, k)}
    out.mkdir(parents=True, exist_ok=True)
    args._timing = {}
    try:
        code = HANDLERS[args.command](params, args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GridResolutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except PropagationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    manifest = RunManifest(scenario=str(args.scenario), command=args.command, flags=flags,
                           timestamp=datetime.now(timezone.utc).isoformat(),
                           output_dir=str(out), timing=args._timing)
    (out / "manifest.json").write_text(manifest.to_json() + "\n", encoding="utf-8")
    return code


def args_from_manifest(manifest: dict, out) -> argparse.Namespace:
    argv = [manifest["command"], "--scenario", manifest["scenario"], "--out", str(out)]
    for key, val in manifest["flags"].items():
        if val is None:
            continue
        argv += [f"--{key.replace('_', '-')}", str(val)]
    return build_parser().parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "replay":
        with open(args.manifest, encoding="utf-8") as fh:
            args = args_from_manifest(json.load(fh), args.out)
    return run(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
