"""Benchmark problems, trace serialization and the benchmark runner."""

import csv
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import diagnostics, prox
from ._validation import check_random_state
from .exceptions import ArgumentError
from .problem import Optimum, ProblemSpec, diagonal_quadratic, zero_regularizer
from .solver import TRACE_COLUMNS, Backtracking, SolverConfig, solve

logger = logging.getLogger(__name__)

PROBLEMS = ("paper6", "quadratic_l1", "quadratic_mcp", "custom")
REGULARIZERS = ("none", "l1", "mcp", "scad")


def _separable_optimum(weights, centers, reg):
    """Coordinatewise minimizer of ``w/2 (x - c)^2 + r(x)``.

    For ``w > 0`` this is ``prox_{r/w}(c)``; for ``w == 0`` the regularizers
    offered here are minimized at zero.
    """
    x = np.zeros_like(centers)
    pos = weights > 0
    if np.any(pos):
        # prox is separable, so a per-coordinate step is a vector of steps
        x[pos] = [float(reg.prox(np.array([c]), 1.0 / w)[0])
                  for c, w in zip(centers[pos], weights[pos])]
    return x


def separable_problem(weights, centers, reg, strong_mu=None):
    """Diagonal quadratic plus separable ``reg`` with its exact optimum."""
    g = diagonal_quadratic(weights, centers, strong_mu)
    weights, centers = np.asarray(weights, float), np.asarray(centers, float)
    x_star = _separable_optimum(weights, centers, reg)
    f_star = float(g.value(x_star)) + float(reg.value(x_star))
    return ProblemSpec(g, reg, len(weights), Optimum(x_star, f_star))


def build_paper6():
    """The d = 10000 diagonal quadratic + MCP(2, 3) benchmark.

    ``g(x) = 1/2 ||x_a - 10||_D^2 + 1/2 ||x_b - 1e-4||_D^2`` with
    ``D = diag(1..5000)`` on each half; ``L_g = 5000``, ``mu_g = 1``,
    ``mu_h = -1/3`` and ``x* = (10, ..., 10, 0, ..., 0)``.
    """
    n = 5000
    diag = np.arange(1, n + 1, dtype=np.float64)
    weights = np.concatenate([diag, diag])
    centers = np.concatenate([np.full(n, 10.0), np.full(n, 1e-4)])
    g = diagonal_quadratic(weights, centers)
    h = prox.mcp(2.0, 3.0)
    x_star = np.concatenate([np.full(n, 10.0), np.zeros(n)])
    f_star = float(g.value(x_star)) + float(h.value(x_star))
    return ProblemSpec(g, h, 2 * n, Optimum(x_star, f_star))


def paper6_x0():
    return np.ones(10000)


def build_quadratic_l1(d=100, seed=0, lam=1.0, mu_zero=False):
    """Random diagonal quadratic + l1.

    With ``mu_zero`` a quarter of the weights are zero, so ``mu_g = 0``.
    """
    rng = check_random_state(seed)
    w = rng.uniform(1.0, 100.0, size=d)
    if mu_zero:
        w[: max(1, d // 4)] = 0.0
    c = 3.0 * rng.standard_normal(d)
    return separable_problem(w, c, prox.l1(lam))


def build_quadratic_mcp(d=100, seed=0, lam=1.0, gamma=3.0):
    """Random diagonal quadratic (weights >= 1) + MCP; ``mu = 1 - 1/gamma``."""
    rng = check_random_state(seed)
    w = rng.uniform(1.0, 100.0, size=d)
    w[0] = 1.0
    c = 3.0 * rng.standard_normal(d)
    return separable_problem(w, c, prox.mcp(lam, gamma))


def make_regularizer(name, lam=1.0, gamma=3.0, a=3.7):
    if name == "none":
        return zero_regularizer()
    if name == "l1":
        return prox.l1(lam)
    if name == "mcp":
        return prox.mcp(lam, gamma)
    if name == "scad":
        return prox.scad(lam, a)
    raise ArgumentError(f"unknown regularizer {name!r}; choose from {REGULARIZERS}")


def load_custom(path, regularizer="l1", lam=1.0, gamma=3.0, a=3.7):
    """Read a headered CSV with columns ``weight,center``."""
    weights, centers = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"weight", "center"} <= set(reader.fieldnames):
            raise ArgumentError(f"{path}: header must contain 'weight' and 'center'")
        for row in reader:
            weights.append(float(row["weight"]))
            centers.append(float(row["center"]))
    if not weights:
        raise ArgumentError(f"{path}: no coefficient rows")
    return separable_problem(np.array(weights), np.array(centers),
                             make_regularizer(regularizer, lam, gamma, a))


# Serialization --------------------------------------------------------------

def format_real(value):
    value = float(value)
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.17g}"


def write_trace_csv(trace, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for rec in trace:
            writer.writerow([str(rec.k)] + [format_real(v) for v in rec[1:7]])


def read_trace_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [{key: (int(v) if key == "k" else float(v)) for key, v in row.items()}
            for row in rows]


def write_certificates_csv(certs, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["name", "passed", "worst_violation", "tolerance", "location"])
        for c in certs:
            writer.writerow([c.name, str(c.passed).lower(), format_real(c.worst_violation),
                             format_real(c.tolerance), "" if c.location is None else c.location])


def render_svg(series, title="", width=640, height=400):
    """Minimal log10-scale line chart; ``series`` maps label -> (k, values)."""
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    pad_l, pad_r, pad_t, pad_b = 60, 20, 30, 40
    pts = {}
    for label, (ks, vals) in series.items():
        ks = np.asarray(ks, float)
        vals = np.asarray(vals, float)
        ok = np.isfinite(vals) & (vals > 0)
        if np.any(ok):
            pts[label] = (ks[ok], np.log10(vals[ok]))
    if pts:
        kmax = max(float(k.max()) for k, _ in pts.values()) or 1.0
        ymin = min(float(y.min()) for _, y in pts.values())
        ymax = max(float(y.max()) for _, y in pts.values())
    else:
        kmax, ymin, ymax = 1.0, 0.0, 1.0
    if ymax - ymin < 1e-12:
        ymin, ymax = ymin - 1.0, ymax + 1.0
    ymin, ymax = math.floor(ymin), math.ceil(ymax)
    pw, ph = width - pad_l - pad_r, height - pad_t - pad_b

    def sx(k):
        return pad_l + pw * k / kmax

    def sy(y):
        return pad_t + ph * (ymax - y) / (ymax - ymin)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="14">{title}</text>',
           f'<rect x="{pad_l}" y="{pad_t}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    step = max(1, int(math.ceil((ymax - ymin) / 10)))
    for e in range(int(ymin), int(ymax) + 1, step):
        y = sy(e)
        out.append(f'<line x1="{pad_l}" y1="{y:.1f}" x2="{pad_l + pw}" y2="{y:.1f}" '
                   'stroke="#dddddd"/>')
        out.append(f'<text x="{pad_l - 6}" y="{y + 4:.1f}" text-anchor="end" '
                   f'font-size="11">1e{e}</text>')
    out.append(f'<text x="{pad_l + pw / 2:.1f}" y="{height - 8}" text-anchor="middle" '
               f'font-size="12">k (max {int(kmax)})</text>')
    for i, (label, (ks, ys)) in enumerate(pts.items()):
        color = colors[i % len(colors)]
        path = " ".join(f"{sx(k):.2f},{sy(y):.2f}" for k, y in zip(ks, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'points="{path}"/>')
        out.append(f'<text x="{pad_l + 8}" y="{pad_t + 16 + 14 * i}" font-size="12" '
                   f'fill="{color}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# Runner -----------------------------------------------------------------------

@dataclass
class BenchConfig:
    problem: str = "paper6"
    algorithm: str = "sr2fista"
    beta_mode: str = "compromised"
    max_iters: int = 2000
    seed: int = 0
    output_path: str = "bench_out"
    plot: bool = False
    trace_every: int = 1
    backtracking: Optional[Backtracking] = None
    dimension: int = 100
    coef_file: Optional[str] = None
    regularizer: str = "l1"
    lam: float = 1.0
    gamma: float = 3.0
    scad_a: float = 3.7
    wdg_samples: int = 100

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ArgumentError(f"problem must be one of {PROBLEMS}")
        if self.algorithm not in ("sr2fista", "ista", "both"):
            raise ArgumentError("algorithm must be sr2fista, ista or both")
        if self.max_iters < 1:
            raise ArgumentError("max_iters must be >= 1")
        if self.problem == "custom" and not self.coef_file:
            raise ArgumentError("the custom problem needs a coefficient file")


def build_problem(cfg):
    """Return ``(problem, x0)`` for a :class:`BenchConfig`."""
    if cfg.problem == "paper6":
        return build_paper6(), paper6_x0()
    if cfg.problem == "quadratic_l1":
        p = build_quadratic_l1(cfg.dimension, cfg.seed, cfg.lam)
    elif cfg.problem == "quadratic_mcp":
        p = build_quadratic_mcp(cfg.dimension, cfg.seed, cfg.lam, cfg.gamma)
    else:
        p = load_custom(cfg.coef_file, cfg.regularizer, cfg.lam, cfg.gamma, cfg.scad_a)
    return p, np.ones(p.dimension)


def certify_run(p, result, algorithm, wdg_samples=100, seed=0):
    """Certificates for one finished run (empty where not applicable)."""
    certs = []
    trace = result.trace
    if algorithm == "sr2fista" and result.steps:
        A_seq = [result.steps[0].A_prev] + [s.A for s in result.steps]
        params = [s.params for s in result.steps]
        certs.append(diagnostics.check_schedule_condition(A_seq, params))
        certs.append(diagnostics.check_prox_well_defined(
            A_seq, params, [s.eta for s in result.steps]))
        if p.optimum is not None:
            ks = [r.k for r in trace]
            certs.append(diagnostics.check_lyapunov_monotone(
                [r.lyapunov for r in trace], ks))
    if wdg_samples > 0:
        certs.append(diagnostics.check_wdg_samples(p, wdg_samples, seed))
    return certs


def run_benchmark(cfg, stderr=None):
    """Run the configured benchmark; return the process exit code.

    Writes ``<problem>_<algorithm>.csv`` (and ``.svg`` with ``plot``) plus
    ``<problem>_certificates.csv`` into ``cfg.output_path``.  Exit code 0
    iff every certificate passes, 1 on a certificate failure, 2 on I/O
    errors.
    """
    stderr = sys.stderr if stderr is None else stderr
    out = Path(cfg.output_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory {out}: {exc}", file=stderr)
        return 2

    p, x0 = build_problem(cfg)
    algorithms = ["sr2fista", "ista"] if cfg.algorithm == "both" else [cfg.algorithm]
    solver_cfg = SolverConfig(cfg.beta_mode, cfg.max_iters, None, cfg.backtracking,
                              cfg.trace_every)
    certs, series = [], {}
    try:
        for algo in algorithms:
            result = solve(p, solver_cfg, x0, algo)
            write_trace_csv(result.trace, out / f"{cfg.problem}_{algo}.csv")
            run_certs = certify_run(p, result, algo, 0)
            certs.extend(type(c)(f"{algo}:{c.name}", c.passed, c.worst_violation,
                                 c.location, c.tolerance) for c in run_certs)
            ks = [r.k for r in result.trace]
            series[algo] = (ks, [r.f_gap for r in result.trace])
            logger.info("%s finished: %s after %d iterations", algo,
                        result.stop_reason, result.state.k)
            if cfg.plot:
                svg = render_svg({algo: series[algo]}, f"{cfg.problem}: {algo}")
                (out / f"{cfg.problem}_{algo}.svg").write_text(svg, encoding="utf-8")
        if cfg.wdg_samples > 0:
            certs.append(diagnostics.check_wdg_samples(p, cfg.wdg_samples, cfg.seed))
        write_certificates_csv(certs, out / f"{cfg.problem}_certificates.csv")
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return 2

    failed = [c for c in certs if not c.passed]
    if failed:
        print("certificate failures:", file=stderr)
        for c in failed:
            print(f"  {c}", file=stderr)
        return 1
    return 0
