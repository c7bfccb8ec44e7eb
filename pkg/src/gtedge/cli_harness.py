"""Command-line driver: edge-trace | converge | validate | sample | render.

Configuration comes from a plain key-value file (same comment style as the
measure file) overridden by CLI flags.  Exit codes: 0 success, 1 configuration
error, 2 validation failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import airy as airy_mod
from .airy import AiryQuery, TolNotMet, airy_classical_oracle, airy_extended
from .cauchy_edge import (
    DegenerateEdge,
    NotTypical,
    TOnSupport,
    edge_point,
)
from .kernel_exact import alpha_n, kernel_Kn, rescaled_kernel
from .measures import (
    ParticleConfig,
    RegionTag,
    discretize,
    read_measure_file,
    region_interval,
)
from .numerics import NoConvergence
from .saddle_scaling import (
    OutOfLattice,
    WrongRootCount,
    build_scaling,
    particle_sequence,
)
from .sampler import BudgetExceeded, glauber_sample, sample_patterns

__all__ = ["ExperimentConfig", "main", "cmd_edge_trace", "cmd_converge",
           "cmd_validate", "cmd_sample", "cmd_render", "hexagon_top_row"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

_NUMERICAL_ERRORS = (TolNotMet, NoConvergence, WrongRootCount, DegenerateEdge,
                     NotTypical, TOnSupport, OutOfLattice, OverflowError,
                     ZeroDivisionError)


class ConfigError(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str = ""
    measure_path: str = ""
    n_ladder: list = field(default_factory=list)
    t: float = None
    query_grid: list = field(default_factory=list)
    tol: float = 1e-8
    precision_bits: int = 256
    seed: int = 1
    out_dir: str = "."
    hexagon: tuple = None
    samples: int = 10
    sweeps: int = None

    def validate(self):
        if self.n_ladder and any(b <= a for a, b in
                                 zip(self.n_ladder, self.n_ladder[1:])):
            raise ConfigError("n ladder must be strictly increasing")
        if self.precision_bits < 24:
            raise ConfigError("precision-bits must be >= 24")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")


def hexagon_top_row(p, q, r):
    """Top row (p+q+r, ..., p+q+1, p, ..., 1) of the hexagon preset."""
    if min(p, q, r) < 0 or p + r < 2:
        raise ConfigError("hexagon sides must be nonnegative with p+r >= 2")
    xs = list(range(p + q + r, p + q, -1)) + list(range(p, 0, -1))
    return ParticleConfig(len(xs), tuple(xs))


# ---------------------------------------------------------------------------
# config plumbing


def _parse_config_file(path):
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ConfigError(f"{path}: line {lineno}: need `key value`")
            out[parts[0].replace("-", "_")] = parts[1].strip()
    return out


def _parse_queries_file(path):
    grid = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ConfigError(f"{path}: line {lineno}: need `u r v s`")
            try:
                grid.append(tuple(float(v) for v in parts))
            except ValueError:
                raise ConfigError(
                    f"{path}: line {lineno}: non-numeric entry") from None
    if not grid:
        raise ConfigError(f"{path}: no queries found")
    return grid


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="gtedge",
        description="Edge asymptotics of uniform interlacing particle arrays")
    ap.add_argument("command", choices=["edge-trace", "converge", "validate",
                                        "sample", "render"])
    ap.add_argument("--config", default=None, help="key-value config file")
    ap.add_argument("--measure", default=None, help="measure file path")
    ap.add_argument("--n", default=None,
                    help="comma-separated ladder of n values")
    ap.add_argument("--t", type=float, default=None, help="edge parameter")
    ap.add_argument("--queries", default=None,
                    help="file of query rows `u r v s`")
    ap.add_argument("--tol", type=float, default=None)
    ap.add_argument("--precision-bits", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--out", default=None, help="output directory")
    ap.add_argument("--hexagon", default=None,
                    help="hexagon preset `p,q,r` (alternative to --measure)")
    ap.add_argument("--samples", type=int, default=None)
    ap.add_argument("--sweeps", type=int, default=None)
    return ap


def _assemble_config(args):
    cfg = ExperimentConfig(command=args.command)
    file_vals = _parse_config_file(args.config) if args.config else {}

    def pick(flag, key, cast=lambda v: v):
        if flag is not None:
            return flag
        if key in file_vals:
            return cast(file_vals[key])
        return None

    v = pick(args.measure, "measure")
    cfg.measure_path = v or ""
    v = pick(args.n, "n")
    if v is not None:
        try:
            cfg.n_ladder = [int(tok) for tok in str(v).split(",") if tok]
        except ValueError:
            raise ConfigError(f"bad n ladder {v!r}") from None
    v = pick(args.t, "t", float)
    cfg.t = float(v) if v is not None else None
    v = pick(args.queries, "queries")
    if v:
        cfg.query_grid = _parse_queries_file(v)
    v = pick(args.tol, "tol", float)
    if v is not None:
        cfg.tol = float(v)
    v = pick(args.precision_bits, "precision_bits", int)
    if v is not None:
        cfg.precision_bits = int(v)
    v = pick(args.seed, "seed", int)
    if v is not None:
        cfg.seed = int(v)
    v = pick(args.out, "out")
    if v is not None:
        cfg.out_dir = v
    v = pick(args.hexagon, "hexagon")
    if v is not None:
        try:
            p, q, r = (int(tok) for tok in str(v).split(","))
        except ValueError:
            raise ConfigError(f"bad hexagon spec {v!r}") from None
        cfg.hexagon = (p, q, r)
    v = pick(args.samples, "samples", int)
    if v is not None:
        cfg.samples = int(v)
    v = pick(args.sweeps, "sweeps", int)
    if v is not None:
        cfg.sweeps = int(v)
    cfg.validate()
    return cfg


def _load_measure(cfg):
    if not cfg.measure_path:
        raise ConfigError("--measure is required for this command")
    try:
        return read_measure_file(cfg.measure_path)
    except OSError as exc:
        raise ConfigError(f"cannot read measure file: {exc}") from None
    except Exception as exc:
        raise ConfigError(str(exc)) from None


def _top_row(cfg, mu=None):
    if cfg.hexagon is not None:
        return hexagon_top_row(*cfg.hexagon)
    if not cfg.n_ladder:
        raise ConfigError("--n (or --hexagon) is required")
    if mu is None:
        mu = _load_measure(cfg)
    return discretize(mu, cfg.n_ladder[-1])


# ---------------------------------------------------------------------------
# SVG helpers (no plotting dependency)


def _svg_open(width, height):
    return [f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{width:.0f}" height="{height:.0f}" '
            f'viewBox="0 0 {width:.0f} {height:.0f}">',
            f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>']


def _svg_polygon(points, fill, stroke="#333", width=0.6):
    pts = " ".join(f"{px:.2f},{py:.2f}" for px, py in points)
    return (f'<polygon points="{pts}" fill="{fill}" '
            f'stroke="{stroke}" stroke-width="{width}"/>')


def _svg_polyline(points, stroke, width=1.5):
    pts = " ".join(f"{px:.2f},{py:.2f}" for px, py in points)
    return (f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width}"/>')


# ---------------------------------------------------------------------------
# edge-trace


def _region_sample_points(mu, per_region=120, t_max=50.0):
    """Grid of t values covering each classified open region."""
    out = []
    seen = set()
    probes = []
    supp = mu.supp_mu_intervals()
    for lo, hi in mu.full_density_intervals():
        probes.append(0.5 * (lo + hi))
    gaps = [(-math.inf, supp[0][0])] if supp else []
    for (l0, h0), (l1, h1) in zip(supp[:-1], supp[1:]):
        gaps.append((h0, l1))
    if supp:
        gaps.append((supp[-1][1], math.inf))
    for lo, hi in gaps:
        if math.isinf(lo):
            probes.append(hi - 1.0)
        elif math.isinf(hi):
            probes.append(lo + 1.0)
        else:
            probes.append(lo + 0.25 * (hi - lo))
            probes.append(hi - 0.25 * (hi - lo))
    for probe in probes:
        try:
            tag, (lo, hi) = region_interval(mu, probe)
        except ValueError:
            continue
        key = (round(lo, 12) if math.isfinite(lo) else lo,
               round(hi, 12) if math.isfinite(hi) else hi)
        if key in seen:
            continue
        seen.add(key)
        lo_c = lo if math.isfinite(lo) else -t_max
        hi_c = hi if math.isfinite(hi) else t_max
        # tanh spacing concentrates points near the region ends
        u = np.tanh(np.linspace(-3.0, 3.0, per_region))
        u = (u - u[0]) / (u[-1] - u[0])
        pad = 1e-4 * (hi_c - lo_c)
        out.extend(lo_c + pad + (hi_c - lo_c - 2 * pad) * u)
    return sorted(out)


def edge_rows(mu, ts):
    rows = []
    for t in ts:
        try:
            ep = edge_point(mu, t)
        except (NotTypical, DegenerateEdge, ValueError):
            continue
        except Exception:
            continue
        rows.append((t, ep.chi, ep.eta, ep.case_id, ep.beta))
    return rows


def _edge_trace_svg(mu, rows, path):
    w, h = 640.0, 420.0
    mrg = 40.0
    a, b = mu.a, mu.b
    # (chi, eta) polygon: eta in [0,1], a+1-eta <= chi <= b

    def to_px(chi, eta):
        px = mrg + (chi - a) / (b - a) * (w - 2 * mrg)
        py = h - mrg - eta * (h - 2 * mrg)
        return px, py

    svg = _svg_open(w, h)
    poly = [to_px(a + 1, 0), to_px(b, 0), to_px(b, 1), to_px(a, 1)]
    svg.append(_svg_polygon(poly, fill="#f4f1e8", stroke="#555", width=1.0))
    pts = [to_px(chi, eta) for _, chi, eta, _, _ in rows]
    if pts:
        svg.append(_svg_polyline(pts, stroke="#b03a2e", width=1.8))
    svg.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(svg))


def cmd_edge_trace(cfg):
    mu = _load_measure(cfg)
    os.makedirs(cfg.out_dir, exist_ok=True)
    ts = _region_sample_points(mu)
    rows = edge_rows(mu, ts)
    csv_path = os.path.join(cfg.out_dir, "edge_trace.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "chi_E", "eta_E", "case_id", "beta"])
        for row in rows:
            writer.writerow([f"{row[0]:.12g}", f"{row[1]:.12g}",
                             f"{row[2]:.12g}", row[3], f"{row[4]:.12g}"])
    _edge_trace_svg(mu, rows, os.path.join(cfg.out_dir, "edge_trace.svg"))
    print(f"edge-trace: {len(rows)} points -> {csv_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# converge


def _converge_cell(payload):
    (mu, n, t, query, precision_bits) = payload
    x = discretize(mu, n)
    ctx = build_scaling(mu, x, t)
    qp = particle_sequence(ctx, *query)
    val = rescaled_kernel(ctx, qp, mode="mpfr", precision_bits=precision_bits)
    target = airy_extended(AiryQuery(qp.u, qp.r, qp.v, qp.s))
    alpha = alpha_n(ctx, qp).to_float()
    return (n, query, val, target, alpha, abs(val - target))


def cmd_converge(cfg):
    mu = _load_measure(cfg)
    if cfg.t is None:
        raise ConfigError("--t is required for converge")
    if not cfg.n_ladder:
        raise ConfigError("--n ladder is required for converge")
    queries = cfg.query_grid or [(0.0, 0.0, 0.0, 0.0)]
    os.makedirs(cfg.out_dir, exist_ok=True)
    jobs = [(mu, n, cfg.t, query, cfg.precision_bits)
            for n in cfg.n_ladder for query in queries]
    if len(jobs) > 1:
        import multiprocessing as mp

        with mp.get_context("fork").Pool(min(len(jobs), os.cpu_count() or 1)) \
                as pool:
            results = pool.map(_converge_cell, jobs)
    else:
        results = [_converge_cell(job) for job in jobs]
    results.sort(key=lambda row: (row[0], queries.index(row[1])))
    csv_path = os.path.join(cfg.out_dir, "converge.csv")
    trend_notes = []
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "u", "r", "v", "s", "rescaled_kernel", "K_Ai",
                         "alpha_n", "discrepancy"])
        for n, query, val, target, alpha, disc in results:
            writer.writerow([n, *(f"{v:.6g}" for v in query),
                             f"{val:.10g}", f"{target:.10g}",
                             f"{alpha:.6g}", f"{disc:.6g}"])
        for query in queries:
            discs = [row[5] for row in results if row[1] == query]
            worsened = sum(1 for a2, b2 in zip(discs, discs[1:]) if b2 > a2)
            if worsened > max(0, len(discs) - 1) // 2:
                note = (f"# trend violation at query {query}: "
                        f"discrepancies {['%.4g' % d for d in discs]}")
                trend_notes.append(note)
                fh.write(note + "\n")
    for note in trend_notes:
        print(note)
    print(f"converge: {len(results)} rows -> {csv_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate


def cmd_validate(cfg):
    from fractions import Fraction

    from .sampler import empirical_correlations, enumerate_patterns

    failures = []
    soft_notes = []

    # exact-vs-float kernel agreement on a small panel
    rng = np.random.Generator(np.random.Philox(key=cfg.seed))
    x = ParticleConfig(8, tuple(range(14, -2, -2)))
    worst = 0.0
    for _ in range(25):
        rn = int(rng.integers(1, 8))
        sn = int(rng.integers(1, 8))
        un = int(rng.integers(x.x[-1] + 8 - rn, x.x[0] + 3))
        vn = int(rng.integers(x.x[-1] + 8 - sn, x.x[0] + 3))
        exact = kernel_Kn(x, un, rn, vn, sn, mode="rational").exact
        approx = kernel_Kn(x, un, rn, vn, sn, mode="floatlog").to_float()
        scale = max(1e-30, abs(float(exact)))
        worst = max(worst, abs(approx - float(exact)) / scale)
    if worst > 1e-10:
        failures.append(f"float-vs-rational relative error {worst:.3g}")
    print(f"suite float-vs-rational: worst relative {worst:.3g} "
          f"{'FAIL' if worst > 1e-10 else 'ok'}")

    # enumeration vs kernel one-point values
    x3 = ParticleConfig(3, (3, 1, 0))
    pats = list(enumerate_patterns(x3))
    total = len(pats)
    bad = 0
    for row in (1, 2):
        for pos in range(x3.x[-1] + 3 - row, x3.x[0] + 1):
            hits = sum(1 for p in pats if (pos, row) in p.occupied())
            pred = kernel_Kn(x3, pos, row, pos, row, mode="rational").exact
            if Fraction(hits, total) != pred:
                bad += 1
    if bad:
        failures.append(f"enumeration mismatch at {bad} sites")
    print(f"suite enumeration-vs-kernel: {bad} mismatches "
          f"{'FAIL' if bad else 'ok'}")

    # sampler vs kernel (coarse)
    x6 = ParticleConfig(6, (10, 8, 6, 4, 2, 0))
    samples = sample_patterns(x6, 300, cfg.seed, chains=4, parallel=False,
                              burn_in=200, thinning=20)
    sites = [((pos, 3),) for pos in range(3, 9)]
    est = empirical_correlations(samples, [[pt for pt in site]
                                           for site in sites])
    bad = 0
    for (site,), (p_hat, stderr) in zip(sites, est):
        pred = float(kernel_Kn(x6, site[0], site[1], site[0], site[1],
                               mode="rational").exact)
        if abs(p_hat - pred) > max(4 * stderr, 0.02):
            bad += 1
    if bad > 1:
        failures.append(f"sampler off at {bad} sites")
    print(f"suite sampler-vs-kernel: {bad} outliers "
          f"{'FAIL' if bad > 1 else 'ok'}")

    # Airy kernel vs classical oracle
    worst_airy = 0.0
    for r, s in ((0.0, 0.0), (1.0, 0.5), (-0.5, 0.25)):
        lhs = airy_mod.airy_tilde(AiryQuery(0.0, r, 0.0, s))
        rhs = airy_classical_oracle(-r, -s)
        worst_airy = max(worst_airy, abs(lhs - rhs))
    if worst_airy > 1e-7:
        failures.append(f"airy-vs-oracle discrepancy {worst_airy:.3g}")
    print(f"suite airy-vs-oracle: worst {worst_airy:.3g} "
          f"{'FAIL' if worst_airy > 1e-7 else 'ok'}")

    if cfg.precision_bits < 128:
        soft_notes.append(
            f"precision-bits={cfg.precision_bits} invites heavy cancellation "
            f"at large n; results may lose all significant digits")
    for note in soft_notes:
        print(f"warning: {note}")
    if failures:
        for f in failures:
            print(f"validate FAIL: {f}")
        return EXIT_VALIDATION
    print("validate: all suites passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sample


def cmd_sample(cfg):
    mu = _load_measure(cfg) if cfg.measure_path else None
    x = _top_row(cfg, mu)
    os.makedirs(cfg.out_dir, exist_ok=True)
    pats = sample_patterns(x, cfg.samples, cfg.seed,
                           chains=min(8, cfg.samples), parallel=True)
    path = os.path.join(cfg.out_dir, "samples.txt")
    with open(path, "w") as fh:
        for pat in pats:
            fh.write(";".join(" ".join(str(v) for v in row)
                              for row in pat.rows) + "\n")
    print(f"sample: {len(pats)} patterns -> {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# render


_LOZENGE_FILL = {
    (1, 1): "#31648c",     # particle continues straight
    (1, 0): "#d9a441",     # trajectory enters from the left
    (0, 1): "#7fb069",     # trajectory leaves to the right
    (0, 0): "#efe9d8",     # hole
}


def lozenge_cells(pattern):
    """Classified cells of each strip between adjacent particle rows.

    Cell (m, r) compares the counting functions N_r, N_(r+1) (particles at
    position >= m) across [m, m+1]; (delta_top, delta_bottom) picks the
    lozenge type, and flat cells outside the interlacing hull are dropped.
    """
    n = pattern.n
    rows = pattern.rows
    xs = rows[-1]
    cells = []

    def count_ge(row, m):
        return sum(1 for y in row if y >= m)

    for r in range(1, n):
        lower, upper = rows[r - 1], rows[r]
        for m in range(xs[-1] - 1, xs[0] + 2):
            db = count_ge(lower, m) - count_ge(lower, m + 1)
            dt = count_ge(upper, m) - count_ge(upper, m + 1)
            if (dt, db) == (0, 0):
                if count_ge(upper, m + 1) == r + 1:   # frozen far left
                    continue
                if count_ge(upper, m) == 0:           # frozen far right
                    continue
            cells.append((m, r, dt, db))
    return cells


def _render_svg(pattern, path, edge_pts=None):
    n = pattern.n
    cells = lozenge_cells(pattern)
    sq3 = math.sqrt(3.0) / 2.0
    scale = max(6.0, 560.0 / (pattern.rows[-1][0] - pattern.rows[-1][-1] + n + 2))

    def vexy(m, rr):
        return (m - rr / 2.0), (rr * sq3)

    raw = []
    for m, r, dt, db in cells:
        quad = [vexy(m, r - 1), vexy(m + 1, r - 1), vexy(m + 1, r), vexy(m, r)]
        raw.append((quad, _LOZENGE_FILL[(dt, db)]))
    all_x = [p[0] for quad, _ in raw for p in quad]
    all_y = [p[1] for quad, _ in raw for p in quad]
    if edge_pts:
        all_x += [p[0] for p in edge_pts]
        all_y += [p[1] for p in edge_pts]
    lo_x, hi_x = min(all_x), max(all_x)
    lo_y, hi_y = min(all_y), max(all_y)
    mrg = 20.0
    w = (hi_x - lo_x) * scale + 2 * mrg
    h = (hi_y - lo_y) * scale + 2 * mrg

    def to_px(p):
        return (mrg + (p[0] - lo_x) * scale, h - mrg - (p[1] - lo_y) * scale)

    svg = _svg_open(w, h)
    for quad, fill in raw:
        svg.append(_svg_polygon([to_px(p) for p in quad], fill=fill))
    if edge_pts:
        svg.append(_svg_polyline([to_px(p) for p in edge_pts],
                                 stroke="#b03a2e", width=2.0))
    svg.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(svg))


def cmd_render(cfg):
    mu = _load_measure(cfg) if cfg.measure_path else None
    x = _top_row(cfg, mu)
    if x.n > 64:
        raise ConfigError(f"render limited to n <= 64, got n={x.n}")
    os.makedirs(cfg.out_dir, exist_ok=True)
    sweeps = cfg.sweeps if cfg.sweeps is not None else 40 * x.n
    pattern = glauber_sample(x, sweeps, cfg.seed)
    edge_pts = None
    if mu is not None:
        sq3 = math.sqrt(3.0) / 2.0
        pts = []
        for t, chi, eta, _, _ in edge_rows(mu, _region_sample_points(mu, 60)):
            m, r = chi * x.n, eta * x.n
            pts.append((m - r / 2.0, r * sq3))
        edge_pts = pts or None
    path = os.path.join(cfg.out_dir, "render.svg")
    _render_svg(pattern, path, edge_pts)
    print(f"render: n={x.n} tiling -> {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def main(argv=None):
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = _assemble_config(args)
        handler = {
            "edge-trace": cmd_edge_trace,
            "converge": cmd_converge,
            "validate": cmd_validate,
            "sample": cmd_sample,
            "render": cmd_render,
        }[cfg.command]
        return handler(cfg)
    except (ConfigError, BudgetExceeded, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    except Exception as exc:   # noqa: BLE001 - last-resort classification
        print(f"validation failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
