"""Batch experiment runner.

Subcommands share one YAML config schema (documented in the README):

    framedec run     --config cfg.yaml --out DIR [--seed N] [--threads N]
    framedec certify --config cfg.yaml
    framedec dual    --config cfg.yaml --out DIR
    framedec solve   --config cfg.yaml --out DIR --data y.csv [--use-cache]
    framedec picard  --config cfg.yaml --out DIR [--data y.csv]

Outputs are CSV tables (17 significant digits, byte-stable under a fixed
seed) and optional PNG plots.  Exit codes: 0 success, 2 config/data
validation error, 3 construction failure, 4 missing cache.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import yaml

from . import cache as cache_io
from .constructors import StabilityConstructionError, svd_decomposition_from_matrix
from .decomposition import picard_diagnostic, reconstruct, verify_assumption
from .frames import Frame, NotAFrameError, dual_exact, dual_neumann
from .models.convolution import ConvolutionSpec, convolution_decomposition, named_symbol
from .models.radon import RadonSpec, radon_frame_system
from .models.tomography import TomographySpec, tomography_decomposition
from .regularization import (
    FilterSpec,
    NoisyData,
    alpha_grid,
    choose_alpha_discrepancy,
    filtered_reconstruct,
)
from .spaces import ComponentSpace, ProductSpaceSpec, ProductVector, norm

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONSTRUCTION = 3
EXIT_CACHE = 4


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# config schema


SCHEMA = {
    "problem": str,
    "seed": int,
    "output_dir": str,
    "truncation": int,
    "plots": bool,
    "duals": {"method": str, "eps": float},
    "noise": {"levels": list, "draws": int},
    "filters": {"kinds": list, "grid_points": int, "tau": float},
    "convolution": {"n": int, "symbol": (str, list)},
    "radon": {
        "pixels": int,
        "angles": int,
        "detectors": int,
        "alpha": float,
        "wavelet_levels": int,
        "angular_size": int,
    },
    "tomography": {
        "heights": list,
        "directions": list,
        "torus_half_width": float,
        "grid": int,
        "cutoff": int,
        "windshift": bool,
    },
    "dense_svd": {"rows": int, "cols": int},
    "frame": {"weights": list, "elements": list},
    "data": str,
}

PROBLEMS = ("convolution", "radon", "tomography", "dense_svd")


def _check_keys(section, schema, path):
    if not isinstance(section, dict):
        raise ConfigError(f"{path or 'config'} must be a mapping")
    for key, value in section.items():
        if key not in schema:
            raise ConfigError(f"unknown key {path}{key!r}")
        want = schema[key]
        if isinstance(want, dict):
            _check_keys(value, want, f"{path}{key}.")
        else:
            kinds = want if isinstance(want, tuple) else (want,)
            if float in kinds:
                kinds = kinds + (int,)
            if not isinstance(value, kinds) or isinstance(value, bool) and bool not in kinds:
                raise ConfigError(
                    f"key {path}{key!r} has wrong type {type(value).__name__}"
                )


def load_config(path):
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}") from exc
    if cfg is None:
        cfg = {}
    _check_keys(cfg, SCHEMA, "")
    problem = cfg.get("problem")
    if problem is not None and problem not in PROBLEMS:
        raise ConfigError(f"problem must be one of {PROBLEMS}, got {problem!r}")
    return cfg


# --------------------------------------------------------------------------
# problem construction


def build_decomposition(cfg, seed):
    """Returns (dec, info dict).  Raises construction errors on failure."""
    problem = cfg.get("problem")
    if problem is None:
        raise ConfigError("config must name a problem")
    params = cfg.get(problem, {})
    truncation = cfg.get("truncation")
    if problem == "convolution":
        n = params.get("n", 64)
        symbol = params.get("symbol", "inverse_quadratic")
        if isinstance(symbol, str):
            sym = named_symbol(symbol, n)
        else:
            sym = np.asarray(symbol, dtype=complex)
        dec = convolution_decomposition(ConvolutionSpec(n, sym))
    elif problem == "radon":
        spec = RadonSpec(
            pixels=params.get("pixels", 16),
            angles=params.get("angles", 24),
            detectors=params.get("detectors", 32),
            alpha=float(params.get("alpha", 0.0)),
            wavelet_levels=params.get("wavelet_levels", 3),
            angular_size=params.get("angular_size"),
        )
        _, dec, cert = radon_frame_system(spec)
        dec.meta["certificate"] = cert
    elif problem == "tomography":
        if params.get("windshift"):
            spec = TomographySpec.from_windshifts(
                params["directions"],
                params["heights"],
                float(params.get("torus_half_width", 4.0)),
                params.get("grid", 32),
                params.get("cutoff", 8),
            )
        else:
            spec = TomographySpec(
                heights=params.get("heights", (4000.0, 12000.0)),
                directions=params.get("directions", ((2e-5, 0.0), (-1e-5, 1.5e-5), (0.0, -2e-5))),
                torus_half_width=float(params.get("torus_half_width", 4.0)),
                grid=params.get("grid", 32),
                cutoff=params.get("cutoff", 8),
            )
        dec = tomography_decomposition(spec)
    else:  # dense_svd
        rng = np.random.default_rng(seed)
        rows = params.get("rows", 8)
        cols = params.get("cols", 5)
        a = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
        x_space = ProductSpaceSpec((ComponentSpace(cols),))
        y_space = ProductSpaceSpec((ComponentSpace(rows),))
        dec = svd_decomposition_from_matrix(a, x_space, y_space)
    if truncation is not None:
        dec.truncation = int(truncation)
    return dec


def apply_dual_config(dec, cfg):
    duals = cfg.get("duals", {})
    method = duals.get("method", "exact")
    if method == "exact":
        return
    if method != "neumann":
        raise ConfigError(f"duals.method must be exact or neumann, got {method!r}")
    eps = float(duals.get("eps", 1e-10))
    dec.x_duals = [dual_neumann(f, eps) for f in dec.x_frames]
    dec.y_duals = [dual_neumann(f, eps) for f in dec.y_frames]


# --------------------------------------------------------------------------
# CSV helpers (17 significant digits: round-trip safe)


def fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    return f"{float(value):.17g}"


def write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_data_vectors(path, space):
    """Data file: '# block i' headers, one value per line per block."""
    blocks = []
    current = None
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    current = []
                    blocks.append(current)
                    continue
                if current is None:
                    raise ConfigError("data file must start with a '# block' header")
                try:
                    current.append(complex(line))
                except ValueError as exc:
                    raise ConfigError(f"bad data value {line!r}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read data file: {exc}") from exc
    if len(blocks) != space.n_components:
        raise ConfigError(
            f"data file has {len(blocks)} blocks, space expects {space.n_components}"
        )
    vec = ProductVector([np.asarray(b, dtype=complex) for b in blocks])
    space.check(vec)
    return vec


def write_data_vectors(path, pv):
    with open(path, "w", newline="\n") as fh:
        for i, block in enumerate(pv.blocks):
            fh.write(f"# block {i}\n")
            for val in block:
                fh.write(fmt(complex(val)) + "\n")


# --------------------------------------------------------------------------
# experiment runner


def synthesize_truth(dec, seed):
    """Seeded in-range ground truth and clean data."""
    rng = np.random.default_rng([seed, 7])
    x0 = ProductVector(
        [
            rng.standard_normal(c.dim) + 1j * rng.standard_normal(c.dim)
            for c in dec.x_space.components
        ]
    )
    y = dec.operator.apply(x0)
    return x0, y


def draw_noisy(y, level, seed, level_idx, draw_idx, space):
    rng = np.random.default_rng([seed, 100 + level_idx, draw_idx])
    g = ProductVector(
        [
            rng.standard_normal(c.dim) + 1j * rng.standard_normal(c.dim)
            for c in space.components
        ]
    )
    gnorm = norm(space, g)
    delta = level * norm(space, y)
    if gnorm > 0:
        g = (delta / gnorm) * g
    return NoisyData(y + g, delta)


def run_experiment(cfg, out_dir, seed, threads=1):
    dec = build_decomposition(cfg, seed)
    apply_dual_config(dec, cfg)
    report = verify_assumption(dec.operator, dec, probes=5, seed=seed)
    b1, b2 = dec.x_frame_bounds
    c1, c2 = dec.y_frame_bounds

    x0, y = synthesize_truth(dec, seed)
    x0_norm = norm(dec.x_space, x0)
    clean = reconstruct(dec, y)
    partial, verdict = picard_diagnostic(dec, y)
    clean_err = norm(dec.x_space, clean.solution - x0) / x0_norm
    clean_res = norm(dec.y_space, dec.operator.apply(clean.solution) - y)

    base = [
        cfg.get("problem"),
        dec.truncation,
        b1,
        b2,
        c1,
        c2,
        report.max_relation_residual,
        verdict,
    ]
    header = [
        "problem",
        "K",
        "B1",
        "B2",
        "C1",
        "C2",
        "verify_residual",
        "picard_verdict",
        "filter",
        "alpha",
        "delta",
        "draw",
        "error",
        "residual",
    ]
    rows = [base + ["none", 0.0, 0.0, -1, clean_err, clean_res]]

    filters_cfg = cfg.get("filters", {})
    kinds = filters_cfg.get("kinds", ["tikhonov"])
    points = int(filters_cfg.get("grid_points", 40))
    tau = float(filters_cfg.get("tau", 1.5))
    noise_cfg = cfg.get("noise", {})
    levels = [float(v) for v in noise_cfg.get("levels", [])]
    draws = int(noise_cfg.get("draws", 1))
    grid = alpha_grid(dec, points)

    def eval_cell(args):
        kind, alpha, data = args
        res = filtered_reconstruct(dec, data, FilterSpec(kind, alpha))
        err = norm(dec.x_space, res.solution - x0) / x0_norm
        resid = norm(dec.y_space, dec.operator.apply(res.solution) - data.y_delta)
        return err, resid

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    curves = {}
    try:
        for kind in kinds:
            if kind not in ("tikhonov", "truncated", "landweber"):
                raise ConfigError(f"unknown filter kind {kind!r}")
            for li, level in enumerate(levels):
                for draw in range(draws):
                    data = draw_noisy(y, level, seed, li, draw, dec.y_space)
                    alphas = (
                        [float(a) for a in grid]
                        if kind != "landweber"
                        else [float(i) for i in range(1, points + 1)]
                    )
                    cells = [(kind, a, data) for a in alphas]
                    if pool is not None:
                        results = list(pool.map(eval_cell, cells))
                    else:
                        results = [eval_cell(c) for c in cells]
                    for alpha, (err, resid) in zip(alphas, results):
                        rows.append(base + [kind, alpha, level, draw, err, resid])
                        curves.setdefault((kind, level, draw), []).append((alpha, err))
                    if kind != "landweber" and data.delta > 0:
                        astar = choose_alpha_discrepancy(dec, data, kind, tau, points)
                        err, resid = eval_cell((kind, astar, data))
                        rows.append(
                            base + [f"{kind}:discrepancy", astar, level, draw, err, resid]
                        )
    finally:
        if pool is not None:
            pool.shutdown()

    os.makedirs(out_dir, exist_ok=True)
    write_csv(os.path.join(out_dir, "report.csv"), header, rows)
    write_csv(
        os.path.join(out_dir, "picard.csv"),
        ["k", "partial_sum"],
        [(k + 1, s) for k, s in enumerate(partial)],
    )
    if cfg.get("plots"):
        _write_plots(out_dir, curves, dec, x0, clean)
    return dec, rows


def _write_plots(out_dir, curves, dec, x0, clean):
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib unavailable; skipping plots", file=sys.stderr)
        return
    if curves:
        fig, ax = plt.subplots()
        for (kind, level, draw), pts in sorted(curves.items()):
            alphas = [p[0] for p in pts]
            errs = [p[1] for p in pts]
            ax.loglog(alphas, errs, label=f"{kind} delta={level:g} draw={draw}")
        ax.set_xlabel("alpha")
        ax.set_ylabel("relative error")
        ax.legend(fontsize=6)
        fig.savefig(os.path.join(out_dir, "error_vs_alpha.png"), dpi=120)
        plt.close(fig)
    problem = dec.meta.get("problem")
    if problem is not None and hasattr(problem, "vector_to_image"):
        fig, axes = plt.subplots(1, 2)
        axes[0].imshow(np.real(problem.vector_to_image(x0.blocks[0])))
        axes[0].set_title("truth")
        axes[1].imshow(np.real(problem.vector_to_image(clean.solution.blocks[0])))
        axes[1].set_title("reconstruction")
        fig.savefig(os.path.join(out_dir, "reconstruction.png"), dpi=120)
        plt.close(fig)


# --------------------------------------------------------------------------
# subcommands


def cmd_run(args):
    cfg = load_config(args.config)
    out = args.out or cfg.get("output_dir") or "out"
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    run_experiment(cfg, out, seed, threads=args.threads)
    print(f"wrote {os.path.join(out, 'report.csv')}")
    return EXIT_OK


def cmd_certify(args):
    cfg = load_config(args.config)
    if "frame" in cfg:
        section = cfg["frame"]
        elements = np.asarray(section["elements"], dtype=complex)
        weights = np.asarray(
            section.get("weights", np.ones(elements.shape[1])), dtype=float
        )
        frame = Frame(ComponentSpace(elements.shape[1], weights), elements)
        b1, b2 = frame.bounds
        print(f"B1 = {fmt(b1)}, B2 = {fmt(b2)}, tight = {frame.tight}, exact = {frame.exact}")
        return EXIT_OK
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    dec = build_decomposition(cfg, seed)
    for i, f in enumerate(dec.x_frames):
        print(f"x-frame[{i}]: B1 = {fmt(f.bounds[0])}, B2 = {fmt(f.bounds[1])}")
    for i, f in enumerate(dec.y_frames):
        print(f"y-frame[{i}]: B1 = {fmt(f.bounds[0])}, B2 = {fmt(f.bounds[1])}")
    return EXIT_OK


def _cache_dir(args, cfg):
    return (
        os.environ.get("FRAMEDEC_CACHE_DIR")
        or args.out
        or cfg.get("output_dir")
        or "out"
    )


def _cache_paths(cfg, cache_dir, dec):
    problem = cfg.get("problem")
    paths = []
    for i in range(len(dec.x_frames)):
        paths.append((os.path.join(cache_dir, f"{problem}_x{i}.fdec"), "x", i))
    for i in range(len(dec.y_frames)):
        paths.append((os.path.join(cache_dir, f"{problem}_y{i}.fdec"), "y", i))
    return paths


def cmd_dual(args):
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    dec = build_decomposition(cfg, seed)
    apply_dual_config(dec, cfg)
    cache_dir = _cache_dir(args, cfg)
    os.makedirs(cache_dir, exist_ok=True)
    for path, side, i in _cache_paths(cfg, cache_dir, dec):
        dual = dec.x_duals[i] if side == "x" else dec.y_duals[i]
        frame = dec.x_frames[i] if side == "x" else dec.y_frames[i]
        if os.path.exists(path):
            try:
                cache_io.read_dual_cache(path, frame)
                print(
                    f"cache hit {os.path.basename(path)} "
                    f"checksum=0x{cache_io.checksum_of(path):08x}"
                )
                continue
            except cache_io.CacheError:
                pass
        cache_io.write_dual_cache(path, dual)
        print(
            f"cache write {os.path.basename(path)} "
            f"checksum=0x{cache_io.checksum_of(path):08x}"
        )
    return EXIT_OK


def cmd_solve(args):
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    dec = build_decomposition(cfg, seed)
    data_path = args.data or cfg.get("data")
    if not data_path:
        raise ConfigError("solve needs --data or a 'data' config key")
    y = read_data_vectors(data_path, dec.y_space)
    if args.use_cache:
        cache_dir = _cache_dir(args, cfg)
        for path, side, i in _cache_paths(cfg, cache_dir, dec):
            if not os.path.exists(path):
                print(f"error: cache: missing cache file {path}", file=sys.stderr)
                return EXIT_CACHE
            frame = dec.x_frames[i] if side == "x" else dec.y_frames[i]
            dual = cache_io.read_dual_cache(path, frame)
            if side == "x":
                dec.x_duals[i] = dual
            else:
                dec.y_duals[i] = dual
    else:
        apply_dual_config(dec, cfg)
    result = reconstruct(dec, y)
    out = args.out or cfg.get("output_dir") or "out"
    os.makedirs(out, exist_ok=True)
    write_data_vectors(os.path.join(out, "solution.csv"), result.solution)
    lo, hi = result.residual_bounds
    print(
        f"residual bracket [{fmt(lo)}, {fmt(hi)}], picard sum {fmt(result.picard_sum)}"
    )
    print(f"wrote {os.path.join(out, 'solution.csv')}")
    return EXIT_OK


def cmd_picard(args):
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    dec = build_decomposition(cfg, seed)
    data_path = args.data or cfg.get("data")
    if data_path:
        y = read_data_vectors(data_path, dec.y_space)
    else:
        # seeded white noise probes the worst case for smoothing operators
        rng = np.random.default_rng([seed, 13])
        y = ProductVector(
            [
                rng.standard_normal(c.dim) + 1j * rng.standard_normal(c.dim)
                for c in dec.y_space.components
            ]
        )
    partial, verdict = picard_diagnostic(dec, y)
    out = args.out or cfg.get("output_dir") or "out"
    os.makedirs(out, exist_ok=True)
    write_csv(
        os.path.join(out, "picard.csv"),
        ["k", "partial_sum"],
        [(k + 1, s) for k, s in enumerate(partial)],
    )
    print(f"verdict: {verdict}")
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="framedec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("run", cmd_run),
        ("certify", cmd_certify),
        ("dual", cmd_dual),
        ("solve", cmd_solve),
        ("picard", cmd_picard),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--use-cache", action="store_true")
        p.add_argument("--data", default=None)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StabilityConstructionError, NotAFrameError, OverflowError, ValueError) as exc:
        print(f"error: construction: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION


if __name__ == "__main__":
    sys.exit(main())
