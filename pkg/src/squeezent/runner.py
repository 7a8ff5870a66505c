"""Run configurations, sweeps, figure presets and CSV output."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
import io
import math
import os

import numpy as np

from . import __version__
from .fock import Family, InitialStateSpec, ModeBasis, build_initial_state
from .lindblad import ReservoirSpec, Topology, liouvillian, liouvillian_single_mode, max_squeezing
from .measures import concurrence_wootters, log_negativity
from .propagate import evolve_expm, evolve_rk4, photon_ratios, recurrence_residual, steady_state

__all__ = [
    "OBSERVABLES",
    "ESD_THRESHOLD",
    "Dataset",
    "RunConfig",
    "SweepSpec",
    "SteadyReport",
    "FIGURES",
    "run_evolve",
    "run_sweep",
    "run_figure",
    "run_steady",
    "esd_time",
    "figure_spec",
]

ESD_THRESHOLD = 1e-9
ESD_RESOLUTION = 1e-6

OBSERVABLES = (
    "concurrence",
    "log_negativity",
    "rho14",
    "rho23",
    "rho15",
    "rho19",
    "rho37",
    "populations",
    "trace",
    "min_eigenvalue",
)
_ELEMENTS = {name for name in OBSERVABLES if name.startswith("rho")}
SWEEPABLE = ("m_mag", "theta", "alpha", "n_mean")


def _fmt(x):
    return format(float(x), ".17g")


@dataclass
class Dataset:
    """A CSV table with '#' metadata lines."""

    meta: list
    columns: list
    rows: list

    def to_text(self):
        buf = io.StringIO()
        for line in self.meta:
            buf.write(f"# {line}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(x) for x in row) + "\n")
        return buf.getvalue()

    def write(self, path):
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(self.to_text())

    def column(self, name):
        k = self.columns.index(name)
        return np.array([row[k] for row in self.rows], dtype=float)


@dataclass(frozen=True)
class RunConfig:
    reservoir: ReservoirSpec = field(default_factory=ReservoirSpec)
    initial: InitialStateSpec = field(default_factory=InitialStateSpec)
    n_max_a: int | None = None
    n_max_b: int | None = None
    t_end: float = 5.0
    step: float = 1e-3
    samples: int = 500
    observables: tuple = ("concurrence",)
    out: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "observables", tuple(self.observables))
        unknown = [o for o in self.observables if o not in OBSERVABLES]
        if unknown:
            raise ValueError(f"unknown observables {unknown}; choose from {', '.join(OBSERVABLES)}")
        if not self.observables:
            raise ValueError("at least one observable is required")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        if not self.step > 0:
            raise ValueError(f"step must be > 0, got {self.step}")
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValueError(f"samples must be a positive integer, got {self.samples}")
        n = self.initial.n
        basis = self.basis
        if basis.n_max_a < n or basis.n_max_b < n:
            raise ValueError(f"cutoffs ({basis.n_max_a}, {basis.n_max_b}) below excitation n={n}")
        if "concurrence" in self.observables and basis.dim != 4:
            raise ValueError("concurrence needs the two-qubit space (n_max = 1 on both modes)")
        side = n + 1
        for name in self.observables:
            if name in _ELEMENTS and max(int(name[3]), int(name[4])) > side * side:
                raise ValueError(f"{name} has no meaning for n={n} (labels 1..{side * side})")

    @property
    def basis(self):
        n = self.initial.n
        return ModeBasis(self.n_max_a or n, self.n_max_b or n)

    def to_flat(self):
        r, i = self.reservoir, self.initial
        return {
            "topology": r.topology.value,
            "kappa": r.kappa,
            "n_mean_a": r.n_mean_a,
            "n_mean_b": r.n_mean_b,
            "m_mag": r.m_mag,
            "theta": r.theta,
            "family": i.family.value,
            "n": i.n,
            "alpha": i.alpha,
            "psi": i.psi,
            "n_max_a": self.n_max_a,
            "n_max_b": self.n_max_b,
            "t_end": self.t_end,
            "step": self.step,
            "samples": self.samples,
            "observables": ",".join(self.observables),
            "out": self.out,
        }

    @classmethod
    def from_flat(cls, values, base=None):
        """Build from flat keys (the names of :meth:`to_flat`).

        ``n_mean`` and ``n_max`` set both modes at once; a null cutoff means
        "equal to the excitation number n". Keys absent from ``values`` come
        from ``base``.
        """
        values = dict(values)
        known = set(cls().to_flat()) | {"n_mean", "n_max"}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ValueError(f"unknown configuration keys {unknown}")
        flat = (base or cls()).to_flat()
        if "n_mean" in values:
            flat["n_mean_a"] = flat["n_mean_b"] = values.pop("n_mean")
        elif "n_mean_a" in values and "n_mean_b" not in values:
            flat["n_mean_b"] = None
        if "n_max" in values:
            flat["n_max_a"] = flat["n_max_b"] = values.pop("n_max")
        flat.update(values)
        observables = flat["observables"]
        if isinstance(observables, str):
            observables = tuple(o.strip() for o in observables.split(",") if o.strip())
        reservoir = ReservoirSpec(
            Topology(str(flat["topology"]).lower()), float(flat["kappa"]),
            float(flat["n_mean_a"]),
            None if flat["n_mean_b"] is None else float(flat["n_mean_b"]),
            float(flat["m_mag"]), float(flat["theta"]),
        )
        initial = InitialStateSpec(
            Family(str(flat["family"]).upper()), int(flat["n"]),
            float(flat["alpha"]), float(flat["psi"]),
        )
        return cls(
            reservoir, initial,
            None if flat["n_max_a"] is None else int(flat["n_max_a"]),
            None if flat["n_max_b"] is None else int(flat["n_max_b"]),
            float(flat["t_end"]), float(flat["step"]), int(flat["samples"]),
            observables, flat["out"],
        )

    def with_param(self, name, value):
        """Copy with one sweepable parameter replaced."""
        if name == "m_mag":
            return replace(self, reservoir=replace(self.reservoir, m_mag=value))
        if name == "theta":
            return replace(self, reservoir=replace(self.reservoir, theta=value))
        if name == "n_mean":
            return replace(self, reservoir=replace(self.reservoir, n_mean_a=value, n_mean_b=value))
        if name == "alpha":
            return replace(self, initial=replace(self.initial, alpha=value))
        raise ValueError(f"cannot sweep {name!r}; choose from {', '.join(SWEEPABLE)}")


@dataclass(frozen=True)
class SweepSpec:
    param: str
    start: float
    stop: float
    points: int
    base: RunConfig = field(default_factory=RunConfig)
    esd: str | None = None

    def __post_init__(self):
        if self.param not in SWEEPABLE:
            raise ValueError(f"cannot sweep {self.param!r}; choose from {', '.join(SWEEPABLE)}")
        # a single point is allowed only for a degenerate range
        degenerate = self.points == 1 and self.start == self.stop
        if int(self.points) != self.points or (self.points < 2 and not degenerate):
            raise ValueError(f"a sweep needs at least 2 points, got {self.points}")
        if self.esd is not None and self.esd not in ("concurrence", "log_negativity"):
            raise ValueError(f"ESD extraction needs an entanglement measure, got {self.esd!r}")
        if self.esd is not None and self.esd not in self.base.observables:
            raise ValueError(f"ESD measure {self.esd!r} is not among the requested observables")
        for value in self.values():
            self.base.with_param(self.param, float(value))

    def values(self):
        return np.linspace(self.start, self.stop, int(self.points))


def _columns(config):
    cols = []
    basis = config.basis
    for name in config.observables:
        if name in _ELEMENTS:
            cols += [f"re_{name}", f"im_{name}", f"abs_{name}"]
        elif name == "populations":
            cols += [f"pop_{na}_{nb}" for na in range(basis.dim_a) for nb in range(basis.dim_b)]
        else:
            cols.append(name)
    return cols


def _observe(config, rho):
    out = []
    n = config.initial.n
    for name in config.observables:
        if name == "concurrence":
            out.append(concurrence_wootters(rho).value)
        elif name == "log_negativity":
            out.append(log_negativity(rho).value)
        elif name in _ELEMENTS:
            i, j = int(name[3]), int(name[4])
            z = rho.element(i, j, n)
            out += [z.real, z.imag, abs(z)]
        elif name == "populations":
            out += list(np.real(np.diag(rho.data)))
        elif name == "trace":
            out.append(rho.trace().real)
        elif name == "min_eigenvalue":
            out.append(rho.min_eigenvalue())
    return out


def _measure(name, rho):
    if name == "concurrence":
        return concurrence_wootters(rho).value
    return log_negativity(rho).value


def esd_time(L, times, states, measure, threshold=ESD_THRESHOLD, resolution=ESD_RESOLUTION):
    """First time ``measure`` drops below ``threshold``, or None.

    The crossing is bracketed by consecutive samples and refined by bisection
    with exact propagation from the earlier sample.
    """
    values = [_measure(measure, rho) for rho in states]
    if values[0] < threshold:
        return 0.0
    for k in range(1, len(values)):
        if values[k] < threshold:
            lo, hi = 0.0, times[k] - times[k - 1]
            base = states[k - 1]
            while hi - lo > resolution:
                mid = 0.5 * (lo + hi)
                if _measure(measure, evolve_expm(L, base, mid)) < threshold:
                    hi = mid
                else:
                    lo = mid
            return float(times[k - 1] + hi)
    return None


def _trajectory(config):
    basis = config.basis
    L = liouvillian(config.reservoir, basis)
    rho0 = build_initial_state(config.initial, basis)
    dt = config.t_end / config.samples
    stride = max(1, int(round(dt / config.step)))
    traj = evolve_rk4(L, rho0, config.t_end, dt / stride, stride)
    for rho in traj.states:
        rho.validate(herm_tol=1e-11, trace_tol=1e-10, pos_tol=1e-8)
    # report kappa * t
    return L, traj.times * config.reservoir.kappa, traj.states


def _evaluate(config, esd=None):
    L, times, states = _trajectory(config)
    rows = [[t] + _observe(config, rho) for t, rho in zip(times, states)]
    death = None
    if esd is not None:
        death = esd_time(L, times / config.reservoir.kappa, states, esd)
        if death is not None:
            death *= config.reservoir.kappa
    return rows, death


def _meta(kind, config, extra=()):
    lines = [f"squeezent {__version__}", f"run: {kind}"]
    for key, value in config.to_flat().items():
        if key == "out":
            continue
        lines.append(f"{key} = {_meta_value(value)}")
    lines.append(f"basis = {config.basis.n_max_a},{config.basis.n_max_b}")
    lines.append(f"effective_step = {_fmt(config.t_end / config.samples / max(1, round(config.t_end / config.samples / config.step)))}")
    lines += list(extra)
    return lines


def _meta_value(value):
    if value is None:
        return "auto"
    if isinstance(value, float):
        return _fmt(value)
    return str(value)


def run_evolve(config):
    """Single trajectory: one row per time sample."""
    rows, _ = _evaluate(config)
    ds = Dataset(_meta("evolve", config), ["t"] + _columns(config), rows)
    if config.out:
        ds.write(config.out)
    return ds


def _sweep_point(args):
    config, esd = args
    return _evaluate(config, esd)


def run_sweep(spec, threads=None, extra_meta=()):
    """Long-format sweep, sorted by swept value then time.

    Points are independent; with ``threads > 1`` they run in a process pool
    and are merged in sweep order, so the output does not depend on
    ``threads``.
    """
    values = [float(v) for v in spec.values()]
    jobs = [(spec.base.with_param(spec.param, v), spec.esd) for v in values]
    if threads is None:
        threads = os.cpu_count() or 1
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(job) for job in jobs]
    columns = [spec.param, "t"] + _columns(spec.base)
    if spec.esd:
        columns.append(f"esd_{spec.esd}")
    rows = []
    for value, (point_rows, death) in sorted(zip(values, results), key=lambda item: item[0]):
        for row in point_rows:
            rows.append([value] + row + ([math.nan if death is None else death] if spec.esd else []))
    meta = _meta("sweep", spec.base, [
        f"sweep = {spec.param} from {_fmt(spec.start)} to {_fmt(spec.stop)} ({spec.points} points)",
        *extra_meta,
    ])
    ds = Dataset(meta, columns, rows)
    if spec.base.out:
        ds.write(spec.base.out)
    return ds


# Figure presets. N = 0.1 throughout; alpha = pi/4 and psi = 0 unless overridden.
_N = 0.1
_M_MAX = max_squeezing(_N)
FIGURES = {
    "2a": dict(topology="separate", family="NOON", n=1, sweep="m_mag", measure="concurrence"),
    "2b": dict(topology="separate", family="EPR", n=1, sweep="m_mag", measure="concurrence"),
    "3a": dict(topology="separate", family="NOON", n=1, sweep="theta", measure="concurrence"),
    "3b": dict(topology="separate", family="EPR", n=1, sweep="theta", measure="concurrence"),
    "4a": dict(topology="separate", family="NOON", n=2, sweep="m_mag", measure="log_negativity"),
    "4b": dict(topology="separate", family="EPR", n=2, sweep="m_mag", measure="log_negativity"),
    "5a": dict(topology="common", family="NOON", n=1, sweep="m_mag", measure="concurrence"),
    "5b": dict(topology="common", family="EPR", n=1, sweep="m_mag", measure="concurrence"),
    "6": dict(topology="common", family="EPR", n=1, sweep="theta", measure="concurrence"),
    "7a": dict(topology="common", family="NOON", n=1, observables=("rho14", "rho23")),
    "7b": dict(topology="common", family="EPR", n=1, sweep="theta", theta_stop=math.pi, points=2,
               observables=("rho14", "rho23")),
    "8a": dict(topology="common", family="NOON", n=2, sweep="m_mag", measure="log_negativity"),
    "8b": dict(topology="common", family="EPR", n=2, sweep="m_mag", measure="log_negativity"),
    "9": dict(topology="common", family="NOON", n=2, observables=("rho15", "rho19", "rho37")),
}
FIGURE_POINTS = 60


def figure_spec(fig_id, overrides=None):
    """The RunConfig (and SweepSpec, if the figure is a surface) of a preset."""
    if fig_id not in FIGURES:
        raise ValueError(f"unknown figure {fig_id!r}; choose from {', '.join(FIGURES)}")
    preset = FIGURES[fig_id]
    overrides = dict(overrides or {})
    points = int(overrides.pop("points", preset.get("points", FIGURE_POINTS)))
    sweep = preset.get("sweep")
    flat = {
        "topology": preset["topology"],
        "family": preset["family"],
        "n": preset["n"],
        "n_mean": _N,
        # theta sweeps and single runs sit at the ideal squeezed vacuum
        "m_mag": 0.0 if sweep == "m_mag" else _M_MAX,
        "theta": 0.0,
        "alpha": math.pi / 4,
        "psi": 0.0,
        "observables": preset.get("observables", (preset.get("measure"),)),
    }
    flat.update(overrides)
    config = RunConfig.from_flat(flat)
    if sweep is None:
        return config, None
    if sweep == "m_mag":
        start, stop = 0.0, config.reservoir.m_bound
    else:
        start, stop = 0.0, preset.get("theta_stop", 2 * math.pi)
    spec = SweepSpec(sweep, start, stop, points, config, preset.get("measure"))
    return config, spec


def run_figure(fig_id, overrides=None, threads=None):
    config, spec = figure_spec(fig_id, overrides)
    note = [f"figure = {fig_id}",
            "overrides = " + ("; ".join(f"{k}={v}" for k, v in sorted((overrides or {}).items())) or "none")]
    if spec is None:
        rows, _ = _evaluate(config)
        ds = Dataset(_meta("figure", config, note), ["t"] + _columns(config), rows)
        if config.out:
            ds.write(config.out)
        return ds
    return run_sweep(spec, threads, note)


@dataclass
class SteadyReport:
    reservoir: ReservoirSpec
    n_max: int
    populations: np.ndarray
    ratios: np.ndarray
    regime: str
    residuals_printed: list
    residuals_derived: list

    def to_dataset(self):
        meta = [f"squeezent {__version__}", "run: steady",
                f"n_mean = {_fmt(self.reservoir.n_mean_a)}", f"m_mag = {_fmt(self.reservoir.m_mag)}",
                f"theta = {_fmt(self.reservoir.theta)}", f"kappa = {_fmt(self.reservoir.kappa)}",
                f"n_max = {self.n_max}", f"regime = {self.regime}"]
        rows = []
        for k, p in enumerate(self.populations):
            ratio = self.ratios[k] if k < len(self.ratios) else math.nan
            printed = self.residuals_printed[k - 1] if 1 <= k <= len(self.residuals_printed) else math.nan
            derived = self.residuals_derived[k - 1] if 1 <= k <= len(self.residuals_derived) else math.nan
            rows.append([k, p, ratio, printed, derived])
        return Dataset(meta, ["n", "P_n", "R_n", "residual_printed", "residual_derived"], rows)

    def to_text(self):
        lines = [f"regime: {self.regime}",
                 f"N = {self.reservoir.n_mean_a:g}, |M| = {self.reservoir.m_mag:.6g}, "
                 f"theta = {self.reservoir.theta:.6g}, n_max = {self.n_max}",
                 "  n          P_n          R_n"]
        for k, p in enumerate(self.populations):
            ratio = f"{self.ratios[k]:.6g}" if not math.isnan(self.ratios[k]) else "-"
            lines.append(f"{k:3d}  {p:.6e}  {ratio:>11}")
        lines.append("recurrence residuals (printed / derived):")
        for k, (a, b) in enumerate(zip(self.residuals_printed, self.residuals_derived), start=1):
            lines.append(f"{k:3d}  {a:.3e}  {b:.3e}")
        return "\n".join(lines) + "\n"


def run_steady(reservoir, n_max=12):
    """Single-mode steady state: populations, R_n = P_n / P_0, regime, recurrence checks."""
    L = liouvillian_single_mode(reservoir, n_max)
    rho = steady_state(L)
    P = np.real(np.diag(rho.data))
    if P[0] > 1e-14:
        ratios = np.concatenate([[1.0], photon_ratios(rho, up_to=n_max)])
    else:
        ratios = np.full(n_max + 1, math.nan)
    printed = [recurrence_residual(rho, reservoir, k, True) for k in range(1, n_max - 1)]
    derived = [recurrence_residual(rho, reservoir, k, False) for k in range(1, n_max - 1)]
    return SteadyReport(reservoir, n_max, P, ratios, reservoir.regime.value, printed, derived)

