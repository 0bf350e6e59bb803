# SPDX-License-Identifier: GPL-3.0+

import argparse
import itertools
import json
import logging
import math
import os
import queue
import threading
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from . import __version__
from . import asymptotics
from . import config
from . import oracles
from . import rational
from .dynamics import DensityMatrix, Evaluator, TrajectoryPoint, population_tail, trajectory, write_trajectory_csv
from .errors import ConfigError, EvaluationError, NumericalError, PbgError
from .outputs import SCHEMA_VERSION, write_csv, write_json
from .reservoir import ReservoirConfig, bound_state, derive_params, params_to_dict
from .sample import Method

log = logging.getLogger(__name__)

REFERENCE_PATH = os.path.join(os.path.dirname(__file__), "data", "reference.json")

COMPARE_HEADER = ("t", "method_a", "method_b", "abs_delta", "gate", "relative", "pass")
SWEEP_HEADER = ("alpha", "A", "tau", "fitted_exponent", "predicted_exponent", "deviation",
                "fitted_amplitude", "abs_D_alpha", "status", "error")

# asymptotic comparisons start here (units of tau); the negative control sits at NEGATIVE_CONTROL_T
ASYMPTOTIC_COMPARE_FROM = 10.0
NEGATIVE_CONTROL_T = 0.1


def main(argv: Optional[Sequence[str]] = None):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="config file (key = value text, or .json)")
    common.add_argument("-o", "--out", default="out", help="output directory (default: out)")
    common.add_argument("--tol", type=float, help="absolute tolerance of the oracles (overrides the config)")
    common.add_argument("-W", "--workers", type=int, default=1, help="number of worker threads (default: 1)")
    common.add_argument("-v", "--verbose", action="store_true", help="log debug output")
    common.add_argument("-s", "--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key (repeatable)")

    parser = argparse.ArgumentParser(prog="pbgdecay", description="Qubit decoherence in photonic band-gap reservoirs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("run", parents=[common], help="evolve the qubit with every configured method")
    subparsers.add_parser("compare", parents=[common], help="pairwise agreement report between methods")
    subparsers.add_parser("sweep", parents=[common], help="tail exponents over alpha and A lists")
    subparsers.add_parser("validate", parents=[common], help="run the packaged reference checks")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.workers < 1:
            raise ConfigError(f"--workers must be >= 1 (got {args.workers})")
        if args.command == "validate":
            return validate(args.out, args.workers)
        spec = config.load_spec(args.config, _overrides(args))
        if args.command == "run":
            return run(spec, args.out)
        elif args.command == "compare":
            return compare(spec, args.out)
        elif args.command == "sweep":
            return sweep(spec, args.out, args.workers)
        return 0
    except ConfigError as e:
        print(f"Error: invalid configuration: {e}")
        return 1
    except EvaluationError as e:
        print(f"Error: evaluation failed: {e}")
        return 2
    except NumericalError as e:
        print(f"Error: numerical failure: {e}")
        return 2
    except KeyboardInterrupt:
        print("Error: interrupted")
        return 1
    except Exception as e:
        # Catch-all to avoid Python tracebacks for users
        log.debug("unexpected failure", exc_info=True)
        print(f"Error: {e}")
        return 1


def _overrides(args) -> Dict[str, object]:
    values: Dict[str, object] = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE (got {item!r})")
        key, value = (part.strip() for part in item.split("=", 1))
        values[key] = value
    if args.tol is not None:
        values["tol"] = args.tol
    return values


# -- shared pieces ------------------------------------------------------------

def spec_to_dict(spec: config.RunSpec) -> Dict[str, object]:
    r = spec.routing
    return {
        "reservoir": {"A": spec.reservoir.A, "a": spec.reservoir.a, "alpha": spec.reservoir.alpha,
                      "omega0": spec.reservoir.omega0},
        "z0_form": spec.z0_form,
        "grid": {"t_min": spec.t_min, "t_max": spec.t_max, "points": spec.points, "scale": spec.scale},
        "methods": list(spec.methods),
        "part": spec.part,
        "tol": spec.tol,
        "compare_tol": spec.compare_tol,
        "asymptotic_gate": spec.asymptotic_gate,
        "initial_state": {"rho11": spec.rho0.rho11, "rho10": spec.rho0.rho10},
        "routing": {
            "series_margin": r.series_margin, "root_residual_gate": r.root_residual_gate,
            "ml_max_arg": r.ml_max_arg, "series_tol": r.series_tol, "laplace_nodes": r.laplace_nodes,
            "volterra_step": r.volterra_step, "volterra_t_max": r.volterra_t_max,
            "volterra_tol": r.volterra_tol, "asymptotic_shells": r.asymptotic_shells,
        },
    }


def derived_section(cfg: ReservoirConfig, z0_form: str) -> Dict[str, object]:
    """ Constants, tail laws, bound state and (for rational alpha) the root set of one reservoir. """
    params = derive_params(cfg, z0_form)
    population, coherence = asymptotics.tail_exponent_prediction(cfg)
    bound = bound_state(params)
    out = {
        "params": params_to_dict(params),
        "D_alpha": asymptotics.d_alpha(params),
        "tail_powers": {"population": population, "coherence": coherence},
        "bound_state": {"y": bound.y, "residue": bound.residue, "trapped_population": bound.residue ** 2},
        "poles": [{"u": p.u, "residue": p.residue, "bound_state": p.bound_state}
                  for p in oracles.principal_poles(params)],
        "rational": None,
    }
    order = rational.rational_order(cfg.alpha)
    if order is not None:
        try:
            rs = rational.find_roots(rational.build_q_polynomial(order, params))
            out["rational"] = {"p": order.p, "q": order.q, "roots": rational.rootset_to_dict(rs)}
        except NumericalError as e:
            out["rational"] = {"p": order.p, "q": order.q, "error": str(e)}
    return out


def method_domain(method: str, evaluator: Evaluator, tau: float, asymptotic_from: float = 1.0) -> Tuple[float, float]:
    """ Time range where a method is defined: series inside its window, Volterra up to its
    march limit, the asymptotic form beyond asymptotic_from * tau. """
    if method in (Method.SERIES.value, Method.STAR_SERIES.value):
        return 0.0, evaluator.series_window()
    if method == Method.VOLTERRA.value:
        return 0.0, evaluator.routing.volterra_t_max / evaluator.cfg.a
    if method == Method.ASYMPTOTIC.value:
        return asymptotic_from * tau, math.inf
    return 0.0, math.inf


def _restrict(grid: oracles.TimeGrid, lo: float, hi: float) -> Optional[oracles.TimeGrid]:
    pts = grid.points[(grid.points >= lo) & (grid.points <= hi)]
    if len(pts) == 0:
        return None
    return oracles.TimeGrid(pts, grid.spacing)


def _evaluator(spec: config.RunSpec, method: str, part: Optional[str] = None) -> Evaluator:
    return Evaluator(spec.reservoir, spec.routing, method, part or spec.part, spec.z0_form)


# -- run ----------------------------------------------------------------------

def run(spec: config.RunSpec, out_dir: str) -> int:
    """ One trajectory CSV per method plus manifest.json; two or more methods also give comparison.csv. """
    params = derive_params(spec.reservoir, spec.z0_form)
    grid = spec.grid(params.tau)
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    results: Dict[str, List[TrajectoryPoint]] = {}
    for method in spec.methods:
        evaluator = _evaluator(spec, method)
        lo, hi = method_domain(method, evaluator, params.tau)
        sub = _restrict(grid, lo, hi)
        entry = {"method": method, "domain": [lo, hi if math.isfinite(hi) else None], "points": 0, "file": None}
        entries.append(entry)
        if sub is None:
            log.warning("method %s has no grid points inside [%.4g, %.4g]", method, lo, hi)
            continue
        points = trajectory(spec.rho0, sub, evaluator, progress=True)
        name = f"trajectory_{method}.csv"
        write_trajectory_csv(os.path.join(out_dir, name), points)
        entry.update(points=len(points), file=name,
                     methods_used=sorted({p.sample.method.value for p in points}))
        results[method] = points
        print(f"{method}: {len(points)} points -> {name}")
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "spec": spec_to_dict(spec),
        "derived": derived_section(spec.reservoir, spec.z0_form),
        "outputs": entries,
    }
    if len(results) >= 2:
        rows, summary = _trajectory_deltas(results, spec.compare_tol)
        write_csv(os.path.join(out_dir, "comparison.csv"), COMPARE_HEADER, rows)
        manifest["comparison"] = summary
        for pair in summary:
            print(f"{pair['methods'][0]} vs {pair['methods'][1]}: max |delta G| = {pair['max_delta']:.3g} "
                  f"over {pair['points']} common points")
    write_json(os.path.join(out_dir, "manifest.json"), manifest)
    return 0


def _trajectory_deltas(results: Dict[str, List[TrajectoryPoint]], gate: float):
    rows, summary = [], []
    for m1, m2 in itertools.combinations(results, 2):
        by_t = {p.t: p for p in results[m2]}
        deltas = []
        for p in results[m1]:
            other = by_t.get(p.t)
            if other is None:
                continue
            delta = abs(p.sample.value - other.sample.value)
            deltas.append(delta)
            rows.append((p.t, m1, m2, delta, gate, False, delta <= gate))
        summary.append({"methods": [m1, m2], "points": len(deltas),
                        "max_delta": max(deltas) if deltas else None})
    return rows, summary


# -- compare ------------------------------------------------------------------

def _pair_gate(spec: config.RunSpec, m1: str, m2: str) -> Tuple[float, bool]:
    if Method.ASYMPTOTIC.value in (m1, m2):
        return spec.asymptotic_gate, True
    return spec.compare_tol, False


def compare_pair(spec: config.RunSpec, m1: str, m2: str, grid: oracles.TimeGrid, tau: float) -> Dict[str, object]:
    """ Pointwise deviations of two methods on the grid points both cover.

    Pairs with the asymptotic form compare continuum parts against a relative gate.
    """
    gate, relative = _pair_gate(spec, m1, m2)
    part = "continuum" if relative else spec.part
    ev1, ev2 = _evaluator(spec, m1, part), _evaluator(spec, m2, part)
    lo1, hi1 = method_domain(m1, ev1, tau, ASYMPTOTIC_COMPARE_FROM)
    lo2, hi2 = method_domain(m2, ev2, tau, ASYMPTOTIC_COMPARE_FROM)
    sub = _restrict(grid, max(lo1, lo2), min(hi1, hi2))
    report = {"methods": [m1, m2], "gate": gate, "relative": relative, "part": part, "points": []}
    if sub is None:
        report.update(status="SKIP", max_delta=None)
        return report
    s1, s2 = _samples(ev1, sub), _samples(ev2, sub)
    worst = 0.0
    for a, b in zip(s1, s2):
        delta = abs(a.value - b.value)
        if relative:
            delta /= max(abs(b.value), 1e-300)
        worst = max(worst, delta)
        report["points"].append({"t": a.t, "delta": delta, "pass": delta <= gate,
                                 "error_bounds": [a.error_bound, b.error_bound]})
    report.update(status="PASS" if worst <= gate else "FAIL", max_delta=worst)
    return report


def _samples(evaluator: Evaluator, grid: oracles.TimeGrid):
    try:
        return evaluator.evaluate_grid(grid) if evaluator.method == Method.VOLTERRA \
            else [_checked(evaluator, t) for t in grid]
    except EvaluationError:
        raise
    except NumericalError as e:
        raise EvaluationError(str(e), Method.VOLTERRA.value, float(grid.points[-1])) from e


def _checked(evaluator: Evaluator, t: float):
    try:
        return evaluator.evaluate(t)
    except NumericalError as e:
        method = evaluator.choose(t)
        raise EvaluationError(str(e), method.value if isinstance(method, Method) else str(method), t) from e


def negative_control(cfg: ReservoirConfig, z0_form: str, gate: float, t_over_tau: float = NEGATIVE_CONTROL_T,
                     tol: float = oracles.LAPLACE_TOL) -> Dict[str, object]:
    """ Asymptotic form against the Laplace oracle well below tau; expected to fail the gate. """
    params = derive_params(cfg, z0_form)
    t = t_over_tau * params.tau
    oracle = oracles.laplace_invert(params, t, "continuum", tol=tol)
    approx = asymptotics.g_asymptotic(t, params)
    delta = abs(approx.value - oracle.value) / max(abs(oracle.value), 1e-300)
    outcome = "FAIL" if delta > gate else "PASS"
    return {"t": t, "t_over_tau": t_over_tau, "relative_delta": delta, "gate": gate,
            "outcome": outcome, "expected": "FAIL", "status": _status(outcome, "FAIL")}


def _status(outcome: str, expected: str) -> str:
    if outcome == expected:
        return "PASS"
    return "UNEXPECTED PASS" if outcome == "PASS" else "FAIL"


def compare(spec: config.RunSpec, out_dir: str) -> int:
    """ comparison.json with per-pair PASS/FAIL and the negative control; FAIL is not an error exit. """
    methods = [m for m in spec.methods if m != "auto"]
    if len(methods) < 2:
        raise ConfigError(f"compare needs at least two explicit methods (got {', '.join(spec.methods)})")
    params = derive_params(spec.reservoir, spec.z0_form)
    grid = spec.grid(params.tau)
    pairs = []
    for m1, m2 in tqdm(list(itertools.combinations(methods, 2)), unit="pair", leave=False):
        report = compare_pair(spec, m1, m2, grid, params.tau)
        pairs.append(report)
        shown = "n/a" if report["max_delta"] is None else f"{report['max_delta']:.3g}"
        print(f"{m1} vs {m2}: {report['status']} (max delta {shown}, gate {report['gate']:g})")
    control = negative_control(spec.reservoir, spec.z0_form, spec.asymptotic_gate, tol=spec.tol)
    print(f"negative control asymptotic vs laplace at {control['t_over_tau']:g} tau: "
          f"{control['outcome']} (expected FAIL)")
    status = "PASS" if all(p["status"] in ("PASS", "SKIP") for p in pairs) and control["status"] == "PASS" else "FAIL"
    write_json(os.path.join(out_dir, "comparison.json"), {
        "schema_version": SCHEMA_VERSION,
        "spec": spec_to_dict(spec),
        "pairs": pairs,
        "negative_control": control,
        "status": status,
    })
    print(f"overall: {status}")
    return 0


# -- sweep --------------------------------------------------------------------

def sweep_entry(spec: config.RunSpec, alpha: float, A: float) -> Dict[str, object]:
    """ Fit the continuum |G| tail of one (alpha, A) reservoir; failures become a row status. """
    row = {"alpha": alpha, "A": A, "tau": None, "fitted_exponent": None, "predicted_exponent": -1.0 - alpha,
           "deviation": None, "fitted_amplitude": None, "abs_D_alpha": None, "status": "FAIL", "error": ""}
    try:
        cfg = ReservoirConfig(A, spec.reservoir.a, alpha, spec.reservoir.omega0)
        params = derive_params(cfg, spec.z0_form)
        row["tau"] = params.tau
        row["abs_D_alpha"] = abs(asymptotics.d_alpha(params))
        samples = [oracles.laplace_invert(params, t, "continuum", spec.routing.laplace_nodes, spec.tol)
                   for t in spec.fit_grid(params.tau)]
        fit = oracles.fit_tail_exponent([(s.t, abs(s.value)) for s in samples])
    except PbgError as e:
        row["error"] = str(e)
        return row
    row.update(fitted_exponent=fit.exponent, deviation=fit.exponent - row["predicted_exponent"],
               fitted_amplitude=fit.amplitude, status="OK")
    return row


def run_pool(jobs: List[tuple], func, workers: int, unit: str = "cfg") -> List[object]:
    """ Run func(*job) on a thread pool; results keep the job order. """
    results: List[object] = [None] * len(jobs)
    jobs_q = queue.Queue()
    for i, job in enumerate(jobs):
        jobs_q.put((i, job))
    pbar = tqdm(total=len(jobs), unit=unit)
    pbar_lock = threading.Lock()
    stop_event = threading.Event()
    errors = []

    def worker():
        while not stop_event.is_set():
            try:
                i, job = jobs_q.get_nowait()
            except queue.Empty:
                return
            try:
                results[i] = func(*job)
            except Exception as e:
                errors.append(e)
                stop_event.set()
                return
            with pbar_lock:
                pbar.update(1)

    tlist = []
    for _ in range(min(workers, max(1, len(jobs)))):
        t = threading.Thread(target=worker, daemon=True)
        t.start()
        tlist.append(t)
    for t in tlist:
        t.join()
    pbar.close()
    if errors:
        raise errors[0]
    return results


def sweep(spec: config.RunSpec, out_dir: str, workers: int = 1) -> int:
    jobs = [(spec, alpha, A) for alpha in spec.sweep_alphas for A in spec.sweep_amplitudes]
    rows = run_pool(jobs, sweep_entry, workers)
    write_csv(os.path.join(out_dir, "sweep.csv"), SWEEP_HEADER,
              ([r[k] if r[k] is not None else "" for k in SWEEP_HEADER] for r in rows))
    write_json(os.path.join(out_dir, "sweep.json"), {"schema_version": SCHEMA_VERSION, "spec": spec_to_dict(spec),
                                                   "rows": rows})
    failed = [r for r in rows if r["status"] != "OK"]
    for r in rows:
        if r["status"] == "OK":
            print(f"alpha={r['alpha']:g} A={r['A']:g}: exponent {r['fitted_exponent']:.4f} "
                  f"(predicted {r['predicted_exponent']:.4f})")
        else:
            print(f"alpha={r['alpha']:g} A={r['A']:g}: FAIL {r['error']}")
    return 2 if len(failed) == len(rows) else 0


# -- validate -----------------------------------------------------------------

def load_reference(path: str = REFERENCE_PATH) -> Dict[str, object]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot load reference checks from {path}: {e}") from e


def _cfg(entry) -> ReservoirConfig:
    return ReservoirConfig(float(entry["A"]), float(entry["a"]), float(entry["alpha"]))


def check_series(entry, points: int, tol: float) -> Dict[str, object]:
    """ Series against the Laplace oracle on log-spaced points inside the converged window. """
    evaluator = Evaluator(_cfg(entry), method=Method.SERIES.value)
    window = evaluator.series_window()
    if window <= 0:
        return {"check": "series", "config": entry, "status": "FAIL", "error": "empty series window"}
    ts = np.geomspace(1e-3 / evaluator.params.a, window, points)
    worst = max(abs(evaluator.evaluate(t).value - oracles.laplace_invert(evaluator.params, t).value) for t in ts)
    return {"check": "series", "config": entry, "window": window, "max_delta": worst, "tol": tol,
            "status": "PASS" if worst <= tol else "FAIL"}


def check_volterra(entry, t_range, points: int, tol: float) -> Dict[str, object]:
    cfg = _cfg(entry)
    params = derive_params(cfg)
    grid = oracles.TimeGrid.uniform(t_range[0], t_range[1], points)
    samples = oracles.volterra_solve(cfg, grid)
    worst = max(abs(s.value - oracles.laplace_invert(params, s.t).value) for s in samples)
    return {"check": "volterra", "config": entry, "max_delta": worst, "tol": tol,
            "status": "PASS" if worst <= tol else "FAIL"}


def check_tail(entry, window, points: int, slope_tol: float, population_tol: float) -> Dict[str, object]:
    """ Tail slopes of |G_c| and of the trapped-free population rho11 = |G_c|^2 against the predicted laws.

    An entry may carry expected = "FAIL" where the leading law is known to be
    outside the gate over the window; the row then passes when the fit misses.
    """
    cfg = _cfg(entry)
    ev = Evaluator(cfg, method=Method.LAPLACE.value, part="continuum")
    grid = oracles.TimeGrid.log(window[0] * ev.params.tau, window[1] * ev.params.tau, points)
    traj = trajectory(DensityMatrix.excited(), grid, ev)
    coherence = oracles.fit_tail_exponent([(p.t, abs(p.sample.value)) for p in traj])
    population = population_tail(traj)
    want_pop, want_coh = asymptotics.tail_exponent_prediction(cfg)
    ok = abs(coherence.exponent - want_coh) <= slope_tol and abs(population.exponent - want_pop) <= population_tol
    outcome = "PASS" if ok else "FAIL"
    expected = entry.get("expected", "PASS")
    return {"check": "tail", "config": entry, "coherence_exponent": coherence.exponent,
            "population_exponent": population.exponent, "predicted": [want_coh, want_pop],
            "outcome": outcome, "expected": expected, "status": _status(outcome, expected)}


def check_coefficient(entry, times, gate: float) -> Dict[str, object]:
    """ |G_c t^(1+alpha)/D_alpha + 1| at the given multiples of tau: below gate at the first, then shrinking. """
    cfg = _cfg(entry)
    params = derive_params(cfg)
    d = asymptotics.d_alpha(params)
    gaps = []
    for k in times:
        t = k * params.tau
        g = oracles.laplace_invert(params, t, "continuum").value
        gaps.append(abs(g * t ** (1 + cfg.alpha) / d + 1))
    ok = gaps[0] <= gate and all(b <= a for a, b in zip(gaps, gaps[1:]))
    return {"check": "asymptotic_coefficient", "config": entry, "times_over_tau": list(times), "gaps": gaps,
            "gate": gate, "status": "PASS" if ok else "FAIL"}


def check_rational(entry, t_range, points: int, tol: float) -> Dict[str, object]:
    ev = Evaluator(_cfg(entry), method=Method.RATIONAL.value)
    path = ev.rational_path()
    if path is None:
        return {"check": "rational", "config": entry, "status": "FAIL", "error": "rational path unavailable"}
    order, rs, _ = path
    ts = np.geomspace(t_range[0], t_range[1], points)
    worst = max(abs(ev.evaluate(t).value - oracles.laplace_invert(ev.params, t).value) for t in ts)
    ok = worst <= tol and sum(rs.multiplicities) == rs.degree
    return {"check": "rational", "config": entry, "degree": rs.degree, "max_residual": rs.max_residual,
            "max_delta": worst, "tol": tol, "status": "PASS" if ok else "FAIL"}


def reference_jobs(ref: Dict[str, object]) -> List[tuple]:
    """ (check name, check function, arguments) for every entry of the reference file. """
    jobs = []
    s = ref["series"]
    jobs += [("series", check_series, (c, s["points"], s["tol"])) for c in s["configs"]]
    v = ref["volterra"]
    jobs += [("volterra", check_volterra, (c, v["t_range"], v["points"], v["tol"])) for c in v["configs"]]
    t = ref["tail"]
    jobs += [("tail", check_tail, (c, t["window"], t["points"], t["slope_tol"], t["population_tol"]))
             for c in t["configs"]]
    c = ref["asymptotic_coefficient"]
    jobs.append(("asymptotic_coefficient", check_coefficient, (c["config"], c["times"], c["gate"])))
    r = ref["rational"]
    jobs += [("rational", check_rational, (cfg, r["t_range"], r["points"], r["tol"])) for cfg in r["configs"]]
    n = ref["negative_control"]
    jobs.append(("negative_control", _check_negative, (n["config"], n["gate"], n["t_over_tau"])))
    return jobs


def _check_negative(entry, gate: float, t_over_tau: float) -> Dict[str, object]:
    report = negative_control(_cfg(entry), "transform", gate, t_over_tau)
    report.update(check="negative_control", config=entry)
    return report


def _guarded(name: str, func, job_args) -> Dict[str, object]:
    try:
        return func(*job_args)
    except PbgError as e:
        return {"check": name, "config": job_args[0],
                "status": "FAIL", "error": str(e)}


def validate(out_dir: str, workers: int = 1, path: str = REFERENCE_PATH) -> int:
    ref = load_reference(path)
    jobs = reference_jobs(ref)
    results = run_pool(jobs, _guarded, workers, unit="check")
    passed = sum(r["status"] == "PASS" for r in results)
    for r in results:
        print(f"{r['check']}: {r['status']} {json.dumps(r['config'], sort_keys=True)}")
    status = "PASS" if passed == len(results) else "FAIL"
    write_json(os.path.join(out_dir, "validate.json"), {"schema_version": SCHEMA_VERSION, "version": __version__,
                                                      "results": results, "status": status})
    print(f"{passed}/{len(results)} checks passed")
    return 0 if status == "PASS" else 2
