"""Experiment runner: configs, reference oracles, metrics, CSV output.

A run is described declaratively (problem, method, basis process, basis
dimension, horizon, step count), integrated with the configured stepper,
and measured against a reference trajectory:

  dense     exact propagation of the densified affine system with the
            matrix exponential (linear systems only, refused above
            dimension 2000);
  fine      a classical fourth-order Runge-Kutta run at the main step
            divided by a refinement factor (default 100).

Each recorded row holds (step, t, relative energy error, solution error,
achieved basis dimension, fixed-point iterations).  Output is plain CSV
with one comment header line echoing the full configuration; identical
configuration and seed give byte-identical files.
"""

import time
from dataclasses import dataclass, field, fields

import numpy as np

from ._version import __version__
from .errors import ConfigError, IntegrationAborted
from .integrators import BASIS_PROCESSES, METHODS, StepperConfig, integrate
from .matfun import expm
from .problems import PROBLEM_REGISTRY, build_problem

CSV_COLUMNS = "step,t,rel_energy_error,sol_error,basis_dim,fp_iters"
DENSE_REFERENCE_LIMIT = 2000


def _fmt(value):
    return format(float(value), ".17g")


def relative_energy_error(system, x_t, x0):
    """|H(x_t) - H(x0)| / max(|H(x0)|, floor) with a 1e-300 denominator guard."""
    h_t = system.energy(x_t)
    h_0 = system.energy(x0)
    if not (np.isfinite(h_t) and np.isfinite(h_0)):
        raise ValueError("non-finite energy encountered")
    return abs(h_t - h_0) / max(abs(h_0), 1e-300)


def solution_error(x_t, ref_t):
    """Relative 2-norm error ||x - ref|| / ||ref||."""
    x_t = np.asarray(x_t, dtype=float)
    ref_t = np.asarray(ref_t, dtype=float)
    if x_t.shape != ref_t.shape:
        raise ValueError("state and reference have different shapes")
    return float(np.linalg.norm(x_t - ref_t) / max(np.linalg.norm(ref_t), 1e-300))


def _rk4_step(f, x, h):
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def reference_solution(system, x0, t_grid, mode="fine", factor=100, main_step=None):
    """Reference states at the given times.

    mode "dense": densify the affine system and propagate with the matrix
    exponential per grid interval (exact for linear systems).  mode "fine":
    classical RK4 with micro step main_step/factor (or interval/factor when
    no main step is given).
    """
    x0 = np.asarray(x0, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1:
        raise ValueError("t_grid must be a nonempty 1-d array")
    if np.any(np.diff(t_grid) <= 0) and t_grid.size > 1:
        raise ValueError("t_grid must be strictly increasing")
    states = np.empty((t_grid.size, x0.size))
    states[0] = x0
    if t_grid.size == 1:
        return states

    if mode == "dense":
        if not system.is_linear:
            raise ConfigError("dense reference requires a linear system")
        if system.dim > DENSE_REFERENCE_LIMIT:
            raise ConfigError(
                f"dense reference refused for dimension {system.dim} > {DENSE_REFERENCE_LIMIT}")
        matvec, c = system.affine_parts()
        A = np.column_stack([matvec(e) for e in np.eye(system.dim)])
        x = x0.copy()
        cache = {}
        for i in range(1, t_grid.size):
            dt = t_grid[i] - t_grid[i - 1]
            key = round(dt, 15)
            if key not in cache:
                # exp of [[dt A, dt c], [0, 0]] propagates the affine flow
                W = np.zeros((system.dim + 1, system.dim + 1))
                W[:-1, :-1] = dt * A
                W[:-1, -1] = dt * c
                E = expm(W)
                cache[key] = (E[:-1, :-1], E[:-1, -1])
            prop, shift = cache[key]
            x = prop @ x + shift
            states[i] = x
        return states

    if mode != "fine":
        raise ConfigError(f"unknown reference mode {mode!r}")
    x = x0.copy()
    for i in range(1, t_grid.size):
        span = t_grid[i] - t_grid[i - 1]
        if main_step is not None:
            substeps = max(1, round(span / (main_step / factor)))
        else:
            substeps = factor
        micro = span / substeps
        for _ in range(substeps):
            x = _rk4_step(system.f, x, micro)
        states[i] = x
    return states


@dataclass
class ExperimentConfig:
    """Declarative description of one run; see module docstring."""

    problem: str = "linear-wave"
    problem_params: dict = field(default_factory=dict)
    method: str = "EE"
    basis: str = "arnoldi"
    basis_dim: int = 8
    t_final: float = 1.0
    n_steps: int = 100
    record_every: int = 1
    reference: str = "fine"
    ref_factor: int = 100
    output: str = ""
    seed: int = 0
    fp_tol: float = 1e-12
    fp_max_iter: int = 50
    divergence_factor: float = 1e6

    def validate(self):
        if self.problem not in PROBLEM_REGISTRY:
            raise ConfigError(f"unknown problem {self.problem!r}")
        if self.method.upper() not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        if self.basis not in BASIS_PROCESSES:
            raise ConfigError(f"unknown basis process {self.basis!r}")
        if self.n_steps < 1:
            raise ConfigError("n_steps must be at least 1")
        if self.t_final <= 0:
            raise ConfigError("t_final must be positive")
        if self.record_every < 1:
            raise ConfigError("record_every must be at least 1")
        if self.basis_dim < 1:
            raise ConfigError("basis_dim must be positive")
        if BASIS_PROCESSES[self.basis][1] == 2 and self.basis_dim % 2:
            raise ConfigError("basis_dim must be even for symplectic basis processes")
        if self.reference not in ("dense", "fine"):
            raise ConfigError(f"reference must be 'dense' or 'fine', got {self.reference!r}")
        if self.ref_factor < 1:
            raise ConfigError("reference refinement factor must be at least 1")
        return self

    def echo(self):
        """Deterministic one-line summary for the CSV header."""
        parts = [f"problem={self.problem}"]
        for key in sorted(self.problem_params):
            parts.append(f"problem.{key}={self.problem_params[key]}")
        ref = self.reference if self.reference == "dense" else f"fine:{self.ref_factor}"
        parts += [
            f"method={self.method.upper()}",
            f"basis={self.basis}",
            f"basis_dim={self.basis_dim}",
            f"t_final={_fmt(self.t_final)}",
            f"n_steps={self.n_steps}",
            f"record_every={self.record_every}",
            f"reference={ref}",
            f"seed={self.seed}",
        ]
        return " ".join(parts)


@dataclass
class MetricsSeries:
    """Recorded rows plus the configuration echo they were produced under."""

    config_echo: str
    rows: list = field(default_factory=list)

    def append(self, step, t, rel_energy_error, sol_error, basis_dim, fp_iters):
        self.rows.append((int(step), float(t), float(rel_energy_error),
                          float(sol_error), int(basis_dim), int(fp_iters)))

    def to_csv_text(self):
        lines = [f"# symkry {__version__} {self.config_echo}", CSV_COLUMNS]
        for step, t, ree, sol, dim, fp in self.rows:
            lines.append(f"{step},{_fmt(t)},{_fmt(ree)},{_fmt(sol)},{dim},{fp}")
        return "\n".join(lines) + "\n"

    def write(self, path):
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(self.to_csv_text())


@dataclass
class RunResult:
    series: MetricsSeries
    summary: object
    output_path: str = ""


def run(config, quiet=False):
    """Execute one configured experiment; returns the metrics series.

    On a numerical failure (divergence guard, non-finite state, step
    failure) the partial CSV is still flushed and the IntegrationAborted is
    re-raised with the partial ``series`` attached.
    """
    wall_start = time.perf_counter()
    config.validate()
    system = build_problem(config.problem, **config.problem_params)
    x0 = system.initial_state
    if config.basis_dim > system.dim:
        raise ConfigError(
            f"basis_dim {config.basis_dim} exceeds system dimension {system.dim}")

    h = config.t_final / config.n_steps
    stepper = StepperConfig(
        method=config.method,
        basis_process=config.basis,
        basis_dim=config.basis_dim,
        step_size=h,
        fp_tol=config.fp_tol,
        fp_max_iter=config.fp_max_iter,
    )

    record_steps = list(range(0, config.n_steps + 1, config.record_every))
    t_grid = np.array([s * h for s in record_steps])
    ref_states = reference_solution(system, x0, t_grid, mode=config.reference,
                                    factor=config.ref_factor, main_step=h)
    ref_index = {s: i for i, s in enumerate(record_steps)}

    recorded = []

    def observer(step, t, x):
        if step in ref_index:
            ree = relative_energy_error(system, x, x0)
            sol = solution_error(x, ref_states[ref_index[step]])
            recorded.append((step, t, ree, sol))

    rng = np.random.default_rng(config.seed)
    series = MetricsSeries(config.echo())
    aborted_exc = None
    try:
        summary = integrate(system, stepper, x0, t_final=config.t_final,
                            n_steps=config.n_steps, observer=observer, rng=rng,
                            divergence_factor=config.divergence_factor)
    except IntegrationAborted as exc:
        summary = exc.summary
        aborted_exc = exc
    except ValueError as exc:
        # non-finite energy inside the observer
        summary = None
        aborted_exc = IntegrationAborted(str(exc), None)

    for step, t, ree, sol in recorded:
        if step == 0:
            series.append(step, t, ree, sol, 0, 0)
        elif summary is not None and step <= len(summary.step_basis_dims):
            series.append(step, t, ree, sol, summary.step_basis_dims[step - 1],
                          summary.step_fp_iters[step - 1])
        else:
            series.append(step, t, ree, sol, 0, 0)

    if config.output:
        series.write(config.output)

    wall = time.perf_counter() - wall_start
    if not quiet:
        status = "FAILED" if aborted_exc is not None else "ok"
        last = series.rows[-1] if series.rows else (0, 0.0, 0.0, 0.0, 0, 0)
        matvecs = summary.matvec_count if summary is not None else 0
        print(f"[{status}] {config.echo()}")
        print(f"  final rel_energy_error={last[2]:.3e} sol_error={last[3]:.3e} "
              f"matvecs={matvecs} wall={wall:.2f}s")
        if aborted_exc is not None:
            print(f"  abort: {aborted_exc}")

    if aborted_exc is not None:
        aborted_exc.series = series
        raise aborted_exc
    return RunResult(series, summary, config.output)


# --- configuration files ---------------------------------------------------

_CONFIG_KEYS = {
    "problem": str,
    "method": str,
    "basis": str,
    "basis_dim": int,
    "t_final": float,
    "steps": int,
    "record_every": int,
    "output": str,
    "seed": int,
    "reference": str,
    "fp_tol": float,
    "fp_max_iter": int,
    "divergence_factor": float,
}


def _coerce(text):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def parse_config_text(text):
    """Parse ``key = value`` lines with optional ``[section]`` headers.

    Returns a list of (section_name, mapping); keys appearing before the
    first section act as shared defaults for every section.
    """
    defaults = {}
    sections = []
    current_name, current = None, defaults
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current_name = line[1:-1].strip()
            current = {}
            sections.append((current_name, current))
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        current[key.strip().lower().replace("-", "_")] = value.strip()
    if not sections:
        sections = [("run", defaults)]
        defaults = {}
    return [(name, {**defaults, **mapping}) for name, mapping in sections]


def config_from_mapping(mapping):
    """Build an ExperimentConfig from flag-named keys (hyphen or underscore)."""
    cfg_kwargs = {}
    params = {}
    for key, value in mapping.items():
        key = key.lower().replace("-", "_")
        if key.startswith("problem."):
            params[key.split(".", 1)[1]] = _coerce(str(value))
        elif key.startswith("problem_"):
            params[key[len("problem_"):]] = _coerce(str(value))
        elif key in _CONFIG_KEYS:
            cast = _CONFIG_KEYS[key]
            try:
                cfg_kwargs["n_steps" if key == "steps" else key] = cast(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {value!r}") from exc
        else:
            raise ConfigError(f"unknown configuration key {key!r}")

    reference = cfg_kwargs.pop("reference", "fine")
    if isinstance(reference, str) and reference.startswith("fine:"):
        cfg_kwargs["ref_factor"] = int(reference.split(":", 1)[1])
        reference = "fine"
    cfg_kwargs["reference"] = reference
    cfg_kwargs["problem_params"] = params
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(cfg_kwargs) - known
    if unknown:
        raise ConfigError(f"unknown configuration keys {sorted(unknown)}")
    return ExperimentConfig(**cfg_kwargs).validate()
