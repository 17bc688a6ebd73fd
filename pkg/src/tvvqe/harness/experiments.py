"""The experiment families: convergence traces, tangent scatter, bond scans.

Each runner writes CSV data, an SVG plot and a plain-text summary into the
configured output directory and returns the in-memory results.  Wall-clock
times go to the log and the text summary, never into a CSV, so CSVs stay
byte-identical between runs.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..ansatz import build_uccsd
from ..exact import diagonalize, sector_spectrum
from ..hamiltonians import build_hubbard, h2_path, load_h2, load_lih, load_molecular
from ..objectives import ConstraintParams, DeflationParams, StateProblem, analytic_gradient, fdm_gradient
from ..solvers import MethodConfig, ProblemSet, RunTrace, solve
from ..statevector import basis_state
from . import csvio, svg
from .config import ExperimentConfig

log = logging.getLogger(__name__)


class ExperimentError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# problem and method assembly
# ---------------------------------------------------------------------------

def exact_levels(hamiltonian, electrons, sz) -> tuple[float, ...]:
    return tuple(float(e) for e in sector_spectrum(hamiltonian, electrons, sz).eigenvalues)


def build_problem(cfg: ExperimentConfig, bond_length: float | None = None) -> ProblemSet:
    if cfg.system == "hubbard":
        h = build_hubbard(cfg.hubbard)
        electrons = cfg.electrons if cfg.electrons is not None else cfg.hubbard.sites
        return ProblemSet(h, f"hubbard_{cfg.hubbard.sites}x1", electrons, cfg.sz, exact_levels(h, electrons, cfg.sz), None, "eV")
    if cfg.system == "lih":
        system = load_lih(cfg.data_dir)
    else:
        system = load_h2(cfg.bond_length if bond_length is None else bond_length, cfg.data_dir)
    electrons = cfg.electrons if cfg.electrons is not None else system.electron_count
    levels = exact_levels(system.hamiltonian, electrons, cfg.sz)
    return ProblemSet(system.hamiltonian, system.label, electrons, cfg.sz, levels, system.bond_length, system.units)


def _beta(cfg: ExperimentConfig, problems: ProblemSet) -> float:
    if cfg.beta is not None:
        return cfg.beta
    w = diagonalize(problems.hamiltonian, label_sectors=False).eigenvalues
    return 3.0 * float(w[-1] - w[0])


def deflation_params(cfg: ExperimentConfig, problems: ProblemSet) -> DeflationParams:
    if cfg.deflation_mode == "overlap":
        return DeflationParams(mode="overlap", beta=_beta(cfg, problems))
    r = problems.bond_length if problems.bond_length is not None else cfg.bond_length
    return DeflationParams(a=cfg.a, b=cfg.b, alpha=cfg.alpha, r=r, r_d=cfg.r_d)


def method_config(cfg: ExperimentConfig, method: str, problems: ProblemSet) -> MethodConfig:
    b = cfg.budgets
    states = cfg.states
    phase2 = None
    if method == "vqd":
        phase1 = b.vqd
    elif method == "tvvqe":
        phase1, phase2 = b.tvvqe_phase1, b.tvvqe_phase2
    elif method == "ssvqe":
        phase1 = b.ssvqe
    else:
        phase1 = b.mcvqe
        states = states[: b.mcvqe_states]
    return MethodConfig(
        method,
        states,
        phase1,
        phase2,
        cfg.optimizer,
        deflation_params(cfg, problems),
        cfg.number_weight,
        cfg.sz_weight,
        cfg.trotter_depth,
        cfg.tangent_fd_step,
        cfg.tangent_tolerance,
        cfg.iteration_unit,
        cfg.initial_theta_scale,
        cfg.seed,
    )


def _f(x) -> float | None:
    return None if x is None else float(x)


def _meta(cfg: ExperimentConfig, problems: ProblemSet | None = None, **extra) -> dict[str, str]:
    meta = {"experiment": cfg.kind, "system": cfg.system}
    if problems is not None:
        meta["units"] = problems.units
    meta.update({k: str(v) for k, v in extra.items()})
    return meta


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceResult:
    runs: dict[str, RunTrace]
    rows: list[dict]
    summary: dict[str, list[dict]]
    files: list[Path] = field(default_factory=list)


def trace_rows(problems: ProblemSet, run: RunTrace) -> list[dict]:
    rows = []
    for i, st in enumerate(run.states):
        for rec in st.records:
            rows.append(
                {
                    "system": problems.label,
                    "method": run.method,
                    "state_index": i,
                    "state_label": st.label,
                    "occupation": st.occupation,
                    "iteration": rec.iteration,
                    "phase": rec.phase,
                    "energy": _f(rec.energy),
                    "exact_energy": _f(st.exact),
                    "log_error": _f(rec.log_error),
                    "tangent_norm": _f(rec.tangent_norm),
                }
            )
    return rows


def summarize_convergence(rows: list[dict], threshold: float = -2.0) -> list[dict]:
    """Final log error and tangent-phase start per state, computed from trace rows alone.

    ``start_tv_opt`` is the 1-based position of the point the tangent phase starts
    from (the last energy-phase point); empty when there is no tangent phase.
    """
    by_state: dict[int, list[dict]] = {}
    for row in rows:
        by_state.setdefault(row["state_index"], []).append(row)
    out = []
    for i in sorted(by_state):
        rs = sorted(by_state[i], key=lambda r: r["iteration"])
        last = rs[-1]
        energy_points = sum(1 for r in rs if r["phase"] == "energy")
        has_tangent = any(r["phase"] == "tangent" for r in rs)
        le = last["log_error"]
        out.append(
            {
                "state_index": i,
                "state_label": last["state_label"],
                "final_energy": last["energy"],
                "exact_energy": last["exact_energy"],
                "final_log_error": le,
                "start_tv_opt": energy_points if has_tangent else None,
                "local_minimum_suspect": int(le is not None and le > threshold),
            }
        )
    return out


def _convergence_plot(problems: ProblemSet, run: RunTrace) -> svg.Plot:
    plot = svg.Plot(f"{run.method} convergence, {problems.label}", "iteration", "log10 |E - E_exact|")
    for st in run.states:
        pts = [(float(r.iteration), r.log_error if r.log_error is not None else math.nan) for r in st.records]
        crosses = (st.tangent_start - 1,) if st.tangent_start else ()
        plot.series.append(svg.Series(st.label, pts, crosses=crosses))
    return plot


def _text_table(headers: list[str], rows: list[list]) -> str:
    cells = [[str(h) for h in headers]] + [["" if c is None else (f"{c:.4f}" if isinstance(c, float) else str(c)) for c in r] for r in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(headers))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def run_convergence(cfg: ExperimentConfig) -> ConvergenceResult:
    problems = build_problem(cfg)
    out = Path(cfg.out_dir)
    result = ConvergenceResult({}, [], {})
    text = [f"convergence: {problems.label} ({problems.units})"]
    for method in cfg.methods:
        mcfg = method_config(cfg, method, problems)
        run = solve(problems, mcfg)
        log.info("%s on %s: wall time %.3f s", method, problems.label, run.wall_time)
        rows = trace_rows(problems, run)
        summary = summarize_convergence(rows, cfg.local_minimum_threshold)
        result.runs[method] = run
        result.rows.extend(rows)
        result.summary[method] = summary
        stem = f"convergence_{cfg.system}_{method}"
        meta = _meta(cfg, problems, method=method)
        result.files.append(csvio.write(out / f"{stem}.csv", "convergence", rows, meta))
        result.files.append(csvio.write(out / f"{stem}_summary.csv", "convergence_summary", summary, meta))
        result.files.append(svg.write(out / f"{stem}.svg", _convergence_plot(problems, run)))
        term = {st.label: "/".join(st.termination) or (st.error or "") for st in run.states}
        text.append(f"\n[{method}] wall time {run.wall_time:.3f} s")
        text.append(
            _text_table(
                ["state", "final log error", "start TV opt.", "local-min suspect", "termination"],
                [
                    [s["state_label"], s["final_log_error"], s["start_tv_opt"], "yes" if s["local_minimum_suspect"] else "", term[s["state_label"]]]
                    for s in summary
                ],
            )
        )
        for s in summary:
            if s["local_minimum_suspect"]:
                log.warning(
                    "%s %s: final log error %.3f > %.1f, likely trapped in a local minimum",
                    method, s["state_label"], s["final_log_error"], cfg.local_minimum_threshold,
                )
    path = out / f"convergence_{cfg.system}_summary.txt"
    path.write_text("\n".join(text), encoding="utf-8")
    result.files.append(path)
    return result


# ---------------------------------------------------------------------------
# tangent scatter
# ---------------------------------------------------------------------------

@dataclass
class ScatterResult:
    run: RunTrace
    rows: list[dict]
    files: list[Path] = field(default_factory=list)


def scatter_rows(run: RunTrace) -> list[dict]:
    rows = []
    for i, st in enumerate(run.states):
        for rec in st.records:
            rows.append(
                {
                    "state_index": i,
                    "state_label": st.label,
                    "iteration": rec.iteration,
                    "phase": rec.phase,
                    "tangent_norm": _f(rec.tangent_norm),
                    "log_error": _f(rec.log_error),
                    # the tangent phase starts from the last energy-phase point
                    "tv_start": int(st.tangent_start is not None and rec.iteration == st.tangent_start - 1),
                }
            )
    return rows


def _log10(x: float) -> float:
    return math.log10(x) if x > 0 else math.nan


def run_tangent_scatter(cfg: ExperimentConfig) -> ScatterResult:
    problems = build_problem(cfg)
    run = solve(problems, method_config(cfg, "tvvqe", problems))
    log.info("tvvqe on %s: wall time %.3f s", problems.label, run.wall_time)
    rows = scatter_rows(run)
    out = Path(cfg.out_dir)
    stem = f"tangent_scatter_{cfg.system}"
    res = ScatterResult(run, rows)
    res.files.append(csvio.write(out / f"{stem}.csv", "tangent_scatter", rows, _meta(cfg, problems, method="tvvqe")))
    plot = svg.Plot(f"tangent norm vs log error, {problems.label}", "log10 tangent norm (L1)", "log10 |E - E_exact|")
    for st in run.states:
        pts = [(_log10(r.tangent_norm), r.log_error if r.log_error is not None else math.nan) for r in st.records]
        crosses = (st.tangent_start - 1,) if st.tangent_start else ()
        plot.series.append(svg.Series(st.label, pts, line=False, crosses=crosses))
    res.files.append(svg.write(out / f"{stem}.svg", plot))
    return res


def spearman(x, y) -> float:
    """Rank correlation with average ranks for ties; nan when either side is constant."""
    from scipy.stats import spearmanr

    if len(x) < 2:
        return math.nan
    rho = spearmanr(x, y).statistic
    return float(rho)


# ---------------------------------------------------------------------------
# bond scan
# ---------------------------------------------------------------------------

@dataclass
class ScanResult:
    rows: list[dict]
    summary: list[dict]
    exact_curves: dict[float, tuple[float, ...]]
    wall_times: dict[str, float]
    files: list[Path] = field(default_factory=list)


def _scan_point(args) -> tuple[float, tuple[float, ...], list[dict], dict[str, float]]:
    cfg, r = args
    problems = build_problem(cfg, r)
    rows = []
    times = {}
    for method in cfg.methods:
        run = solve(problems, method_config(cfg, method, problems))
        times[method] = run.wall_time
        by_index = {i: st for i, st in enumerate(run.states)}
        for i, target in enumerate(cfg.states):
            st = by_index.get(i)
            exact = problems.exact_levels[i] if i < len(problems.exact_levels) else None
            p1 = None
            if st is not None and st.tangent_start:
                p1 = st.records[st.tangent_start - 1].log_error
            if st is None:
                # levels a method does not target (MCVQE beyond its subspace) are recorded as absent
                energy = le = None
            else:
                energy, le = st.energy, st.log_error
            rows.append(
                {
                    "method": method,
                    "bond_length": float(r),
                    "state_index": i,
                    "state_label": target.label,
                    "energy": _f(energy),
                    "exact_energy": _f(exact),
                    "log_error": _f(le),
                    "phase1_log_error": _f(p1),
                }
            )
    return float(r), problems.exact_levels, rows, times


def summarize_scan(rows: list[dict]) -> list[dict]:
    """Per-method, per-state mean log error over grid points that have a value."""
    groups: dict[tuple[str, int], list[dict]] = {}
    order: list[tuple[str, int]] = []
    for row in rows:
        key = (row["method"], row["state_index"])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    out = []
    for key in order:
        vals = [r["log_error"] for r in groups[key] if r["log_error"] is not None]
        out.append(
            {
                "method": key[0],
                "state_index": key[1],
                "state_label": groups[key][0]["state_label"],
                "mean_log_error": math.fsum(vals) / len(vals) if vals else None,
                "points": len(vals),
            }
        )
    return out


def check_grid(cfg: ExperimentConfig) -> None:
    missing = [r for r in cfg.grid if not h2_path(r, cfg.data_dir).exists()]
    if missing:
        raise ExperimentError("missing H2 Hamiltonian files for r = " + ", ".join(f"{r:.2f}" for r in missing))


def run_bond_scan(cfg: ExperimentConfig) -> ScanResult:
    check_grid(cfg)
    tasks = [(cfg, r) for r in cfg.grid]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            points = list(pool.map(_scan_point, tasks))
    else:
        points = [_scan_point(t) for t in tasks]
    # single collector: rows are assembled in grid order regardless of completion order
    rows: list[dict] = []
    exact: dict[float, tuple[float, ...]] = {}
    times: dict[str, float] = {m: 0.0 for m in cfg.methods}
    for r, levels, point_rows, t in points:
        exact[r] = levels
        rows.extend(r_ for m in cfg.methods for r_ in point_rows if r_["method"] == m)
        for m, v in t.items():
            times[m] += v
    rows.sort(key=lambda x: (cfg.methods.index(x["method"]), x["bond_length"], x["state_index"]))
    summary = summarize_scan(rows)
    out = Path(cfg.out_dir)
    units = load_molecular(h2_path(cfg.grid[0], cfg.data_dir)).units
    meta = {"experiment": cfg.kind, "system": cfg.system, "units": units}
    res = ScanResult(rows, summary, exact, times)
    res.files.append(csvio.write(out / "bond_scan.csv", "bond_scan", rows, meta))
    res.files.append(csvio.write(out / "bond_scan_summary.csv", "bond_scan_summary", summary, meta))

    energy_plot = svg.Plot("H2 energy levels vs bond length", "r (angstrom)", f"energy ({units})")
    for i, target in enumerate(cfg.states):
        energy_plot.series.append(
            svg.Series(f"exact {target.label}", [(r, exact[r][i]) for r in cfg.grid if i < len(exact[r])], markers=False)
        )
    for m in cfg.methods:
        for i, target in enumerate(cfg.states):
            pts = [(x["bond_length"], x["energy"]) for x in rows if x["method"] == m and x["state_index"] == i and x["energy"] is not None]
            if pts:
                energy_plot.series.append(svg.Series(f"{m} {target.label}", pts, line=False))
    res.files.append(svg.write(out / "bond_scan_energies.svg", energy_plot))

    err_plot = svg.Plot("ground-state log error vs bond length", "r (angstrom)", "log10 |E - E_exact|")
    for m in cfg.methods:
        pts = [(x["bond_length"], x["log_error"]) for x in rows if x["method"] == m and x["state_index"] == 0 and x["log_error"] is not None]
        err_plot.series.append(svg.Series(m, pts))
    res.files.append(svg.write(out / "bond_scan_log_errors.svg", err_plot))

    text = ["bond scan: mean log error per method and state", ""]
    labels = [s.label for s in cfg.states]
    table = []
    for m in cfg.methods:
        means = {s["state_label"]: s["mean_log_error"] for s in summary if s["method"] == m}
        table.append([m] + [means.get(lab) for lab in labels] + [f"{times[m]:.2f}"])
    text.append(_text_table(["method", *labels, "wall time (s)"], table))
    path = out / "bond_scan_summary.txt"
    path.write_text("\n".join(text), encoding="utf-8")
    res.files.append(path)
    for m in cfg.methods:
        log.info("bond scan %s: total wall time %.3f s", m, times[m])
    return res


# ---------------------------------------------------------------------------
# gradient validation and exact spectra
# ---------------------------------------------------------------------------

@dataclass
class GradientReport:
    system: str
    max_by_component: list[float]
    rows: list[dict]
    tolerance: float
    files: list[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(d < self.tolerance for d in self.max_by_component)


def gradient_problem(cfg: ExperimentConfig, problems: ProblemSet, state_index: int = 0) -> StateProblem:
    occ = cfg.states[state_index].occupation
    ansatz = build_uccsd(problems.qubit_count, occ, cfg.trotter_depth)
    return StateProblem(problems.hamiltonian, ansatz, basis_state(occ), (), DeflationParams(), ConstraintParams())


def validate_gradients(cfg: ExperimentConfig, write: bool = True) -> GradientReport:
    """Analytic energy gradient against central differences at uniform random theta in [-pi, pi]^d."""
    problems = build_problem(cfg)
    p = gradient_problem(cfg, problems)
    d = p.ansatz.parameter_count
    rng = np.random.default_rng(cfg.seed)
    rows = []
    worst = [0.0] * d
    for k in range(cfg.gradient_draws if d else 0):
        theta = rng.uniform(-np.pi, np.pi, d)
        ga = analytic_gradient(p, theta)
        gf = fdm_gradient(p, theta, "energy", cfg.gradient_fd_step)
        for m in range(d):
            diff = abs(float(ga[m]) - float(gf[m]))
            worst[m] = max(worst[m], diff)
            rows.append({"draw": k, "component": m, "analytic": float(ga[m]), "fdm": float(gf[m]), "abs_diff": diff})
    rep = GradientReport(problems.label, worst, rows, cfg.gradient_tolerance)
    if write:
        out = Path(cfg.out_dir)
        meta = _meta(cfg, problems, fd_step=repr(cfg.gradient_fd_step), seed=cfg.seed)
        rep.files.append(csvio.write(out / f"gradients_{cfg.system}.csv", "gradient_check", rows, meta))
        lines = [
            f"gradient check: {problems.label}, {cfg.gradient_draws} draws, FDM step {cfg.gradient_fd_step:g}",
            _text_table(
                ["component", "max |analytic - FDM|", "status"],
                [[m, f"{w:.3e}", "pass" if w < cfg.gradient_tolerance else "FAIL"] for m, w in enumerate(worst)],
            ),
            f"overall: {'pass' if rep.passed else 'FAIL'} (tolerance {cfg.gradient_tolerance:g})",
        ]
        path = out / f"gradients_{cfg.system}.txt"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        rep.files.append(path)
    return rep


def exact_spectrum(cfg: ExperimentConfig, sector: bool = False) -> list[dict]:
    """Full spectrum with sector labels, or the configured (N, S_z) sector when ``sector``."""
    problems = build_problem(cfg)
    if sector:
        spec = sector_spectrum(problems.hamiltonian, problems.electrons, problems.sz)
    else:
        spec = diagonalize(problems.hamiltonian)
    return [
        {"index": k, "energy": float(e), "electrons": round(n, 10), "sz": round(s, 10)}
        for k, (e, (n, s)) in enumerate(zip(spec.eigenvalues, spec.sector_labels))
    ]


def write_exact_spectrum(cfg: ExperimentConfig, sector: bool = False) -> Path:
    problems = build_problem(cfg)
    rows = exact_spectrum(cfg, sector)
    name = f"spectrum_{cfg.system}{'_sector' if sector else ''}.csv"
    return csvio.write(Path(cfg.out_dir) / name, "exact_spectrum", rows, _meta(cfg, problems))


RUNNERS = {"convergence": run_convergence, "tangent_scatter": run_tangent_scatter, "bond_scan": run_bond_scan}


def run(cfg: ExperimentConfig):
    start = time.perf_counter()
    result = RUNNERS[cfg.kind](cfg)
    log.info("%s experiment finished in %.3f s", cfg.kind, time.perf_counter() - start)
    return result
