"""Experiment configuration: INI-style sections with per-system defaults.

Every tunable constant of the solvers is a key here.  A config file only
needs the keys it changes; anything absent falls back to the defaults of the
chosen system.  Example::

    [experiment]
    kind = convergence
    system = h2
    methods = tvvqe

    [budgets]
    tvvqe_phase1 = 2, 2, 10, 3
    tvvqe_phase2 = 10
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .. import bfgs
from ..hamiltonians import H2_GRID, HubbardSpec
from ..solvers import ITERATION_UNITS, METHODS, TargetState

KINDS = ("convergence", "tangent_scatter", "bond_scan")
SYSTEMS = ("h2", "lih", "hubbard")

MOLECULAR_STATES = (
    TargetState("ground", "1100"),
    TargetState("triplet", "1001"),
    TargetState("singlet", "0110"),
    TargetState("doubly", "0011"),
)
# half filling; each reference is the determinant with the largest weight in its target level
HUBBARD_STATES = (
    TargetState("E0", "100110"),
    TargetState("E1", "011010"),
    TargetState("E2", "101001"),
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Budgets:
    vqd: int = 22
    tvvqe_phase1: tuple[int, ...] = (22,)
    tvvqe_phase2: tuple[int, ...] = (10,)
    ssvqe: int = 50
    mcvqe: int = 50
    # MCVQE contracts over the leading states only; the rest are recorded as absent
    mcvqe_states: int = 3


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "convergence"
    system: str = "h2"
    methods: tuple[str, ...] = ("tvvqe",)
    seed: int = 0
    out_dir: Path = Path("results")
    data_dir: Path | None = None
    iteration_unit: str = "step"
    initial_theta_scale: float = 0.0
    # system
    bond_length: float = 0.74
    electrons: int | None = None
    sz: float = 0.0
    hubbard: HubbardSpec = HubbardSpec()
    states: tuple[TargetState, ...] = MOLECULAR_STATES
    budgets: Budgets = Budgets()
    # deflation
    deflation_mode: str = "fermi_dirac"
    a: float = 1.0
    b: float = 1.0
    alpha: float = 100.0
    r_d: float = 0.7414
    beta: float | None = None  # None: three times the spectral range of H
    # constraint
    number_weight: float = 1.0
    sz_weight: float = 1.0
    # optimizer
    optimizer: bfgs.OptimizerConfig = bfgs.OptimizerConfig()
    trotter_depth: int = 2
    tangent_fd_step: float = 1e-6
    tangent_tolerance: float = 1e-7
    # bond scan
    grid: tuple[float, ...] = H2_GRID
    jobs: int = 1
    # gradient validation
    gradient_draws: int = 20
    gradient_fd_step: float = 1e-5
    gradient_tolerance: float = 1e-7
    # reporting
    local_minimum_threshold: float = -2.0
    source: str = field(default="<defaults>", compare=False)


def defaults(system: str = "h2", kind: str = "convergence") -> ExperimentConfig:
    """Per-system defaults; budgets follow the convergence or the bond-scan protocol."""
    if system not in SYSTEMS:
        raise ConfigError(f"unknown system {system!r}; expected one of {SYSTEMS}")
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment {kind!r}; expected one of {KINDS}")
    cfg = ExperimentConfig(kind=kind, system=system)
    if kind == "bond_scan":
        return replace(
            cfg,
            methods=METHODS,
            budgets=Budgets(tvvqe_phase1=(22,), tvvqe_phase2=(3, 2)),
        )
    if system == "h2":
        return replace(cfg, budgets=Budgets(tvvqe_phase1=(2, 2, 10, 3)))
    if system == "lih":
        return replace(cfg, bond_length=1.60, r_d=1.60, budgets=Budgets(tvvqe_phase1=(1, 2, 2, 3)))
    return replace(
        cfg,
        electrons=3,
        sz=0.5,
        states=HUBBARD_STATES,
        deflation_mode="overlap",
        budgets=Budgets(tvvqe_phase1=(22,)),
    )


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_SECTION = re.compile(r"^\s*\[([^\]]+)\]")
_KEY = re.compile(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]")


def _line_index(text: str) -> dict[tuple[str, str], int]:
    """(section, key) -> 1-based line number, for error messages."""
    where = {}
    section = None
    for n, line in enumerate(text.splitlines(), start=1):
        m = _SECTION.match(line)
        if m:
            section = m.group(1).strip()
            continue
        m = _KEY.match(line)
        if m and section is not None:
            where.setdefault((section, m.group(1).strip()), n)
    return where


class _Reader:
    def __init__(self, parser: configparser.ConfigParser, source: str, lines: dict):
        self.parser = parser
        self.source = source
        self.lines = lines
        self.used: set[tuple[str, str]] = set()

    def fail(self, section: str, key: str | None, message: str):
        line = self.lines.get((section, key)) if key else None
        loc = f"{self.source}:{line}" if line else self.source
        where = f"[{section}] {key}" if key else f"[{section}]"
        raise ConfigError(f"{loc}: {where}: {message}")

    def get(self, section: str, key: str, convert, default):
        if not self.parser.has_option(section, key):
            return default
        self.used.add((section, key))
        raw = self.parser.get(section, key).strip()
        try:
            return convert(raw)
        except (ValueError, TypeError) as exc:
            self.fail(section, key, f"bad value {raw!r} ({exc})")


def _ints(raw: str) -> tuple[int, ...]:
    vals = tuple(int(x) for x in re.split(r"[,\s]+", raw) if x)
    if not vals:
        raise ValueError("empty list")
    if any(v < 0 for v in vals):
        raise ValueError("budgets must be >= 0")
    return vals


def _budget(raw: str) -> int:
    v = int(raw)
    if v < 0:
        raise ValueError("budgets must be >= 0")
    return v


def _floats(raw: str) -> tuple[float, ...]:
    m = re.fullmatch(r"\s*([-\d.eE+]+)\s*:\s*([-\d.eE+]+)\s*:\s*([-\d.eE+]+)\s*", raw)
    if m:
        lo, hi, step = (float(g) for g in m.groups())
        if step <= 0:
            raise ValueError("grid step must be positive")
        count = int(round((hi - lo) / step)) + 1
        return tuple(round(lo + k * step, 10) for k in range(count))
    vals = tuple(float(x) for x in re.split(r"[,\s]+", raw) if x)
    if not vals:
        raise ValueError("empty list")
    return vals


def _names(raw: str) -> tuple[str, ...]:
    return tuple(x.lower() for x in re.split(r"[,\s]+", raw) if x)


def _optional_int(raw: str):
    return None if raw.lower() in ("", "auto", "none") else int(raw)


def _optional_float(raw: str):
    return None if raw.lower() in ("", "auto", "none") else float(raw)


def _path(raw: str):
    return Path(raw) if raw else None


def loads(text: str, source: str = "<string>") -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    parser.optionxform = str  # state labels keep their case
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    r = _Reader(parser, source, _line_index(text))
    base_dir = Path(source).parent if source not in ("<string>", "<defaults>") else Path(".")

    kind = r.get("experiment", "kind", str, "convergence")
    system = r.get("experiment", "system", str, "h2")
    if kind not in KINDS:
        r.fail("experiment", "kind", f"expected one of {KINDS}")
    if system not in SYSTEMS:
        r.fail("experiment", "system", f"expected one of {SYSTEMS}")
    cfg = defaults(system, kind)

    methods = r.get("experiment", "methods", _names, cfg.methods)
    for m in methods:
        if m not in METHODS:
            r.fail("experiment", "methods", f"unknown method {m!r}; expected one of {METHODS}")
    unit = r.get("experiment", "iteration_unit", str, cfg.iteration_unit)
    if unit not in ITERATION_UNITS:
        r.fail("experiment", "iteration_unit", f"expected one of {ITERATION_UNITS}")

    def rel(p):
        return p if p is None or p.is_absolute() else base_dir / p

    out_dir = r.get("experiment", "out", _path, None)
    data_dir = r.get("experiment", "data_dir", _path, None)
    cfg = replace(
        cfg,
        methods=methods,
        seed=r.get("experiment", "seed", int, cfg.seed),
        out_dir=rel(out_dir) if out_dir else cfg.out_dir,
        data_dir=rel(data_dir) if data_dir else cfg.data_dir,
        iteration_unit=unit,
        initial_theta_scale=r.get("experiment", "initial_theta_scale", float, cfg.initial_theta_scale),
    )

    hub = cfg.hubbard
    hub = replace(
        hub,
        sites=r.get("system", "sites", int, hub.sites),
        hopping_t=r.get("system", "hopping_t", float, hub.hopping_t),
        coulomb_u=r.get("system", "coulomb_u", float, hub.coulomb_u),
    )
    cfg = replace(
        cfg,
        hubbard=hub,
        bond_length=r.get("system", "bond_length", float, cfg.bond_length),
        electrons=r.get("system", "electrons", _optional_int, cfg.electrons),
        sz=r.get("system", "sz", float, cfg.sz),
    )

    if parser.has_section("states"):
        states = []
        for label, occ in parser.items("states"):
            occ = occ.strip()
            if not occ or set(occ) - {"0", "1"}:
                r.fail("states", label, f"occupation {occ!r} is not a bit string")
            states.append(TargetState(label, occ))
        if not states:
            r.fail("states", None, "section is empty")
        cfg = replace(cfg, states=tuple(states))

    b = cfg.budgets
    cfg = replace(
        cfg,
        budgets=Budgets(
            vqd=r.get("budgets", "vqd", _budget, b.vqd),
            tvvqe_phase1=r.get("budgets", "tvvqe_phase1", _ints, b.tvvqe_phase1),
            tvvqe_phase2=r.get("budgets", "tvvqe_phase2", _ints, b.tvvqe_phase2),
            ssvqe=r.get("budgets", "ssvqe", _budget, b.ssvqe),
            mcvqe=r.get("budgets", "mcvqe", _budget, b.mcvqe),
            mcvqe_states=r.get("budgets", "mcvqe_states", _budget, b.mcvqe_states),
        ),
    )

    mode = r.get("deflation", "mode", str, cfg.deflation_mode)
    if mode not in ("fermi_dirac", "overlap"):
        r.fail("deflation", "mode", "expected fermi_dirac or overlap")
    cfg = replace(
        cfg,
        deflation_mode=mode,
        a=r.get("deflation", "a", float, cfg.a),
        b=r.get("deflation", "b", float, cfg.b),
        alpha=r.get("deflation", "alpha", float, cfg.alpha),
        r_d=r.get("deflation", "r_d", float, cfg.r_d),
        beta=r.get("deflation", "beta", _optional_float, cfg.beta),
        number_weight=r.get("constraint", "number_weight", float, cfg.number_weight),
        sz_weight=r.get("constraint", "sz_weight", float, cfg.sz_weight),
    )

    o = cfg.optimizer
    try:
        opt = replace(
            o,
            gradient_tolerance=r.get("optimizer", "gradient_tolerance", float, o.gradient_tolerance),
            step_tolerance=r.get("optimizer", "step_tolerance", float, o.step_tolerance),
            armijo_c1=r.get("optimizer", "armijo_c1", float, o.armijo_c1),
            backtrack_factor=r.get("optimizer", "backtrack_factor", float, o.backtrack_factor),
            max_backtracks=r.get("optimizer", "max_backtracks", int, o.max_backtracks),
            curvature_guard=r.get("optimizer", "curvature_guard", float, o.curvature_guard),
        )
    except ValueError as exc:
        r.fail("optimizer", None, str(exc))
    cfg = replace(
        cfg,
        optimizer=opt,
        trotter_depth=r.get("optimizer", "trotter_depth", int, cfg.trotter_depth),
        tangent_fd_step=r.get("optimizer", "tangent_fd_step", float, cfg.tangent_fd_step),
        tangent_tolerance=r.get("optimizer", "tangent_tolerance", float, cfg.tangent_tolerance),
        grid=r.get("scan", "grid", _floats, cfg.grid),
        jobs=r.get("scan", "jobs", int, cfg.jobs),
        gradient_draws=r.get("gradients", "draws", int, cfg.gradient_draws),
        gradient_fd_step=r.get("gradients", "fd_step", float, cfg.gradient_fd_step),
        gradient_tolerance=r.get("gradients", "tolerance", float, cfg.gradient_tolerance),
        local_minimum_threshold=r.get("report", "local_minimum_threshold", float, cfg.local_minimum_threshold),
        source=source,
    )

    for section in parser.sections():
        if section == "states":
            continue
        for key in parser.options(section):
            if (section, key) not in r.used:
                r.fail(section, key, "unknown key")
    validate(cfg)
    return cfg


def load(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    return loads(text, str(path))


def validate(cfg: ExperimentConfig) -> None:
    if cfg.jobs < 1:
        raise ConfigError(f"{cfg.source}: jobs must be >= 1")
    if cfg.gradient_draws < 0:
        raise ConfigError(f"{cfg.source}: gradient draws must be >= 0")
    if not cfg.states:
        raise ConfigError(f"{cfg.source}: no target states")
    if cfg.kind == "bond_scan" and cfg.system != "h2":
        raise ConfigError(f"{cfg.source}: bond_scan is defined for system = h2 only")
    if cfg.kind == "tangent_scatter" and cfg.methods != ("tvvqe",):
        raise ConfigError(f"{cfg.source}: tangent_scatter requires methods = tvvqe")
    widths = {len(s.occupation) for s in cfg.states}
    if len(widths) != 1:
        raise ConfigError(f"{cfg.source}: state occupations have different lengths")


def with_overrides(cfg: ExperimentConfig, *, out=None, seed=None, method=None, system=None, jobs=None) -> ExperimentConfig:
    """Apply command-line flags; a new system resets system-specific defaults."""
    if system is not None and system != cfg.system:
        base = defaults(system, cfg.kind)
        cfg = replace(base, methods=cfg.methods, seed=cfg.seed, out_dir=cfg.out_dir, data_dir=cfg.data_dir, jobs=cfg.jobs)
    if method is not None:
        methods = _names(method)
        for m in methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}; expected one of {METHODS}")
        cfg = replace(cfg, methods=methods)
    if out is not None:
        cfg = replace(cfg, out_dir=Path(out))
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    if jobs is not None:
        cfg = replace(cfg, jobs=int(jobs))
    validate(cfg)
    return cfg


def dumps(cfg: ExperimentConfig) -> str:
    """Render a config back to INI text (all keys explicit)."""
    b = cfg.budgets
    o = cfg.optimizer
    lines = [
        "[experiment]",
        f"kind = {cfg.kind}",
        f"system = {cfg.system}",
        f"methods = {', '.join(cfg.methods)}",
        f"seed = {cfg.seed}",
        f"out = {cfg.out_dir}",
        f"data_dir = {cfg.data_dir or ''}",
        f"iteration_unit = {cfg.iteration_unit}",
        f"initial_theta_scale = {cfg.initial_theta_scale!r}",
        "",
        "[system]",
        f"bond_length = {cfg.bond_length!r}",
        f"electrons = {'auto' if cfg.electrons is None else cfg.electrons}",
        f"sz = {cfg.sz!r}",
        f"sites = {cfg.hubbard.sites}",
        f"hopping_t = {cfg.hubbard.hopping_t!r}",
        f"coulomb_u = {cfg.hubbard.coulomb_u!r}",
        "",
        "[states]",
        *(f"{s.label} = {s.occupation}" for s in cfg.states),
        "",
        "[budgets]",
        f"vqd = {b.vqd}",
        f"tvvqe_phase1 = {', '.join(map(str, b.tvvqe_phase1))}",
        f"tvvqe_phase2 = {', '.join(map(str, b.tvvqe_phase2))}",
        f"ssvqe = {b.ssvqe}",
        f"mcvqe = {b.mcvqe}",
        f"mcvqe_states = {b.mcvqe_states}",
        "",
        "[deflation]",
        f"mode = {cfg.deflation_mode}",
        f"a = {cfg.a!r}",
        f"b = {cfg.b!r}",
        f"alpha = {cfg.alpha!r}",
        f"r_d = {cfg.r_d!r}",
        f"beta = {'auto' if cfg.beta is None else repr(cfg.beta)}",
        "",
        "[constraint]",
        f"number_weight = {cfg.number_weight!r}",
        f"sz_weight = {cfg.sz_weight!r}",
        "",
        "[optimizer]",
        f"gradient_tolerance = {o.gradient_tolerance!r}",
        f"step_tolerance = {o.step_tolerance!r}",
        f"armijo_c1 = {o.armijo_c1!r}",
        f"backtrack_factor = {o.backtrack_factor!r}",
        f"max_backtracks = {o.max_backtracks}",
        f"curvature_guard = {o.curvature_guard!r}",
        f"trotter_depth = {cfg.trotter_depth}",
        f"tangent_fd_step = {cfg.tangent_fd_step!r}",
        f"tangent_tolerance = {cfg.tangent_tolerance!r}",
        "",
        "[scan]",
        f"grid = {', '.join(repr(g) for g in cfg.grid)}",
        f"jobs = {cfg.jobs}",
        "",
        "[gradients]",
        f"draws = {cfg.gradient_draws}",
        f"fd_step = {cfg.gradient_fd_step!r}",
        f"tolerance = {cfg.gradient_tolerance!r}",
        "",
        "[report]",
        f"local_minimum_threshold = {cfg.local_minimum_threshold!r}",
    ]
    return "\n".join(lines) + "\n"
