"""Command-line front end.

Subcommands: ``simulate`` (phantom data generation), ``plan`` (offline
preparation and factorization), ``reconstruct`` (online solution or the
gridding baseline), ``benchmark`` (parameter sweeps), and ``metrics``
(scoring existing images).

Every run writes its fully resolved configuration plus input hashes as
JSON next to its outputs; data artifacts contain no timestamps, so
reruns with identical inputs are bit-identical.  Timing diagnostics go
to stdout only.  Exit codes: 0 success, 2 validation error, 3 numerical
failure, 4 I/O failure.
"""

import argparse
import csv
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import io as spio
from .engine import ReconConfig, plan_offline, reconstruct_iterative, reconstruct_once
from .errors import NumericalError, ValidationError
from .gridding import KaiserBesselSpec, grid_reconstruct
from .metrics import METRIC_COLUMNS, METRICS_SCHEMA, mssim, snr
from .phantom import add_noise, phantom_image, phantom_kspace, shepp_logan
from .solver import nnz_report
from .trajectories import load_trajectory, radial, save_trajectory, spiral

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _parse_isnr(text):
    if text is None or text.lower() in ("inf", "none", "noiseless"):
        return None
    return float(text)


def _num_threads():
    raw = os.environ.get("SPURS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValidationError(f"SPURS_THREADS must be an integer, got {raw!r}")


def _write_config(outdir, command, resolved, input_hashes):
    spio.write_json(
        Path(outdir) / "config.json",
        {"command": command, "resolved": resolved, "inputs": input_hashes},
    )


def _metrics_row(**kw):
    return {col: kw.get(col, "") for col in METRIC_COLUMNS}


def _append_metrics(path, rows):
    path = Path(path)
    fresh = not path.exists()
    with open(path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=METRIC_COLUMNS)
        if fresh:
            fh.write(f"# {METRICS_SCHEMA}\n")
            writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _build_trajectory(args):
    if args.traj == "radial":
        if args.spokes is None or args.bins is None:
            raise ValidationError("radial trajectory needs --spokes and --bins")
        return radial(args.n, args.spokes, args.bins)
    if args.traj == "spiral":
        if args.m is None:
            raise ValidationError("spiral trajectory needs --m")
        return spiral(args.n, args.m)
    return load_trajectory(args.traj)


def cmd_simulate(args):
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.phantom != "shepp-logan":
        raise ValidationError(f"unknown phantom {args.phantom!r}")
    ph = shepp_logan()
    traj = _build_trajectory(args)
    traj_path = outdir / "trajectory.csv"
    save_trajectory(traj, traj_path)
    traj_sha = spio.file_sha256(traj_path)

    clean = phantom_kspace(ph, traj)
    spio.write_samples(outdir / "samples_noiseless.raw", clean, trajectory_sha256=traj_sha)
    isnr = _parse_isnr(args.isnr)
    if isnr is None:
        noisy = clean
    else:
        noisy = add_noise(clean, isnr, args.seed)
    spio.write_samples(outdir / "samples.raw", noisy, trajectory_sha256=traj_sha)

    truth = phantom_image(ph, args.n)
    spio.write_array(outdir / "ground_truth.raw", truth.pixels.real)
    spio.write_pgm(outdir / "ground_truth.pgm", truth)

    resolved = {
        "phantom": args.phantom,
        "traj": args.traj,
        "n": args.n,
        "spokes": args.spokes,
        "bins": args.bins,
        "m": traj.num_samples,
        "isnr_db": isnr,
        "seed": args.seed,
    }
    _write_config(outdir, "simulate", resolved, {"trajectory": traj_sha})
    print(f"simulate: wrote M={traj.num_samples} samples to {outdir}")
    return 0


def cmd_plan(args):
    traj = load_trajectory(args.traj)
    traj_sha = spio.file_sha256(args.traj)
    config = ReconConfig(n=args.n, degree=args.degree, sigma=args.os, rho=args.rho)
    t0 = time.perf_counter()
    plan = plan_offline(traj, config)
    elapsed = time.perf_counter() - t0
    spio.write_plan(args.out, plan, trajectory_sha256=traj_sha)
    report = nnz_report(plan.phi, plan.factorization.tableau, plan.factorization)
    print(f"plan: offline phase completed in {elapsed:.2f}s")
    print(f"plan: {report}")
    print(f"plan: wrote {args.out}")
    sidecar = {
        "command": "plan",
        "resolved": {
            "traj": str(args.traj),
            "n": args.n,
            "degree": args.degree,
            "os": args.os,
            "rho": plan.rho,
        },
        "inputs": {"trajectory": traj_sha},
        "nnz": {
            "phi": report.nnz_phi,
            "psi": report.nnz_psi,
            "factors": report.nnz_factors,
            "fill_ratio": report.fill_ratio,
        },
    }
    spio.write_json(str(args.out) + ".json", sidecar)
    return 0


def _load_reconstruction_inputs(args):
    sample_sidecar = spio.read_json(spio.sidecar_path(args.samples))
    traj = None
    traj_sha = None
    plan = None
    if args.plan:
        plan, header = spio.read_plan(args.plan)
        traj = plan.trajectory
        traj_sha = header.get("trajectory_sha256")
    if args.traj:
        traj = load_trajectory(args.traj)
        traj_sha = spio.file_sha256(args.traj)
    if traj is None:
        raise ValidationError("reconstruct needs --plan or --traj to provide the trajectory")
    recorded = sample_sidecar.get("trajectory_sha256")
    if recorded is not None and traj_sha is not None and recorded != traj_sha:
        raise ValidationError(
            "sample set and plan/trajectory hashes disagree: "
            f"{recorded[:12]}... != {traj_sha[:12]}..."
        )
    samples, _ = spio.read_samples(args.samples, traj, expect_sha256=traj_sha)
    return plan, traj, traj_sha, samples, sample_sidecar


def cmd_reconstruct(args):
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    method = args.method
    if method in ("spurs", "spurs-iter") and not args.plan:
        raise ValidationError(f"method {method} requires --plan")
    if method == "gridding" and not (args.traj or args.plan):
        raise ValidationError("gridding requires --traj (or --plan) for coordinates")
    plan, traj, traj_sha, samples, sample_sidecar = _load_reconstruction_inputs(args)

    iterations = args.iterate if method == "spurs-iter" else 1
    nnz_lu = ""
    error_history = None
    t0 = time.perf_counter()
    if method == "gridding":
        if args.n is None:
            raise ValidationError("gridding requires --n")
        window = KaiserBesselSpec(width=args.width, sigma=args.os)
        image = grid_reconstruct(traj, samples.b, args.n, window, density=args.density)
        d_values = None
        resolved_extra = {"width": args.width, "density": args.density}
        degree = ""
        sigma = args.os
        rho = ""
    else:
        config = ReconConfig(
            n=plan.grid.n, degree=plan.kernel.degree, sigma=plan.grid.sigma,
            rho=plan.rho, max_iter=max(1, iterations), tol=args.tol,
        )
        if method == "spurs-iter":
            d, image, state = reconstruct_iterative(plan, samples, config)
            error_history = state.error_norms
            iterations = len(state.error_norms)
        else:
            d, image = reconstruct_once(plan, samples)
        d_values = d.values
        report = nnz_report(plan.phi, plan.factorization.tableau, plan.factorization)
        nnz_lu = report.nnz_factors
        resolved_extra = {"plan": str(args.plan)}
        degree = plan.kernel.degree
        sigma = plan.grid.sigma
        rho = plan.rho
    wall_ms = (time.perf_counter() - t0) * 1000.0
    print(f"reconstruct: online phase ({method}) took {wall_ms:.1f} ms; "
          "offline phase not executed")

    if d_values is not None:
        spio.write_array(outdir / "d.raw", d_values)
    spio.write_array(outdir / "image.raw", image.pixels)
    spio.write_pgm(outdir / "image.pgm", image)
    if error_history is not None:
        with open(outdir / "error_history.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "error_norm"])
            for i, e in enumerate(error_history):
                writer.writerow([i, format(e, ".17g")])

    snr_db = ""
    ssim_val = ""
    if args.truth:
        truth, _ = spio.read_array(args.truth)
        snr_db = format(snr(truth, image.pixels), ".10g")
        ssim_val = format(mssim(truth, image.pixels)[0], ".10g")

    row = _metrics_row(
        method=method,
        m=samples.num_samples,
        isnr_db=sample_sidecar.get("isnr_db", ""),
        degree=degree,
        sigma=sigma,
        rho=rho,
        iterations=iterations,
        snr_db=snr_db,
        mssim=ssim_val,
        wall_ms=format(wall_ms, ".3f"),
        nnz_lu=nnz_lu,
    )
    _append_metrics(outdir / "metrics.csv", [row])
    resolved = {
        "method": method,
        "samples": str(args.samples),
        "iterations": iterations,
        "tol": args.tol,
        "n": args.n if method == "gridding" else plan.grid.n,
        "os": sigma,
        **resolved_extra,
    }
    hashes = {"samples": spio.file_sha256(args.samples)}
    if traj_sha:
        hashes["trajectory"] = traj_sha
    if args.truth:
        hashes["truth"] = spio.file_sha256(args.truth)
    _write_config(outdir, "reconstruct", resolved, hashes)
    print(f"reconstruct: wrote outputs to {outdir}")
    return 0


def _parse_list(text, conv):
    return [conv(tok) for tok in str(text).split(",") if tok != ""]


def cmd_benchmark(args):
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    ph = shepp_logan()
    m_list = _parse_list(args.sweep_m, int)
    isnr_list = [_parse_isnr(tok) for tok in str(args.isnr_list).split(",") if tok]
    methods = _parse_list(args.methods, str)
    degrees = _parse_list(args.degree_list, int)
    os_list = _parse_list(args.os_list, float)

    cells = []
    for m in m_list:
        for isnr in isnr_list:
            for method in methods:
                for degree in degrees:
                    for sigma in os_list:
                        cells.append((m, isnr, method, degree, sigma))

    traj_cache = {}
    clean_cache = {}
    plan_cache = {}
    truth = phantom_image(ph, args.n)

    def cell_trajectory(m):
        if m not in traj_cache:
            if args.traj_kind == "radial":
                if m % args.bins != 0:
                    raise ValidationError(
                        f"radial sweep: M={m} is not a multiple of --bins={args.bins}"
                    )
                traj_cache[m] = radial(args.n, m // args.bins, args.bins)
            else:
                traj_cache[m] = spiral(args.n, m)
            clean_cache[m] = phantom_kspace(ph, traj_cache[m])
        return traj_cache[m], clean_cache[m]

    def run_cell(idx_cell):
        idx, (m, isnr, method, degree, sigma) = idx_cell
        traj, clean = cell_trajectory(m)
        seed = int(np.random.SeedSequence([args.seed, idx]).generate_state(1)[0])
        samples = clean if isnr is None else add_noise(clean, isnr, seed)
        t0 = time.perf_counter()
        nnz_lu = ""
        iterations = 1
        if method == "gridding":
            image = grid_reconstruct(
                traj, samples.b, args.n,
                KaiserBesselSpec(width=args.width, sigma=sigma),
                density="auto",
            )
        else:
            key = (m, degree, sigma)
            if key not in plan_cache:
                cfg = ReconConfig(n=args.n, degree=degree, sigma=sigma, rho=args.rho)
                plan_cache[key] = plan_offline(traj, cfg)
            plan = plan_cache[key]
            cfg = ReconConfig(n=args.n, degree=degree, sigma=sigma, rho=plan.rho,
                              max_iter=args.iterate, tol=args.tol)
            if method == "spurs-iter":
                _, image, state = reconstruct_iterative(plan, samples, cfg)
                iterations = len(state.error_norms)
            elif method == "spurs":
                _, image = reconstruct_once(plan, samples)
            else:
                raise ValidationError(f"unknown method {method!r}")
            nnz_lu = nnz_report(plan.phi, plan.factorization.tableau,
                                plan.factorization).nnz_factors
        wall_ms = (time.perf_counter() - t0) * 1000.0
        return _metrics_row(
            method=method,
            m=m,
            isnr_db="" if isnr is None else isnr,
            degree=degree if method != "gridding" else "",
            sigma=sigma,
            rho="" if method == "gridding" else format(plan_cache[(m, degree, sigma)].rho, ".10g"),
            iterations=iterations,
            snr_db=format(snr(truth.pixels, image.pixels), ".10g"),
            mssim=format(mssim(truth.pixels, image.pixels)[0], ".10g"),
            wall_ms=format(wall_ms, ".3f"),
            nnz_lu=nnz_lu,
        )

    threads = _num_threads()
    sweep_path = outdir / "sweep.csv"
    indexed = list(enumerate(cells))
    if threads == 1:
        for item in indexed:
            _append_metrics(sweep_path, [run_cell(item)])
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for row in pool.map(run_cell, indexed):
                _append_metrics(sweep_path, [row])

    resolved = {
        "traj_kind": args.traj_kind,
        "n": args.n,
        "bins": args.bins,
        "sweep_m": m_list,
        "isnr_list": [i if i is not None else "inf" for i in isnr_list],
        "methods": methods,
        "degree_list": degrees,
        "os_list": os_list,
        "rho": args.rho,
        "iterate": args.iterate,
        "seed": args.seed,
        "threads": threads,
    }
    _write_config(outdir, "benchmark", resolved, {})
    print(f"benchmark: wrote {len(cells)} rows to {sweep_path}")
    return 0


def cmd_metrics(args):
    truth, _ = spio.read_array(args.truth)
    image, _ = spio.read_array(args.image)
    snr_db = snr(truth, image)
    value, _ = mssim(truth, image)
    print(f"snr_db={snr_db:.6g} mssim={value:.6g}")
    if args.out:
        row = _metrics_row(
            method=args.method,
            snr_db=format(snr_db, ".10g"),
            mssim=format(value, ".10g"),
        )
        _append_metrics(args.out, [row])
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spurs",
        description="Non-Cartesian k-space resampling: simulation, planning, "
        "reconstruction, and benchmarking.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate phantom k-space data")
    p.add_argument("--out", required=True)
    p.add_argument("--phantom", default="shepp-logan")
    p.add_argument("--traj", required=True, help="radial, spiral, or a trajectory CSV path")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--spokes", type=int)
    p.add_argument("--bins", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--isnr", default="inf", help="input SNR in dB, or 'inf'")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plan", help="offline preparation and factorization")
    p.add_argument("--traj", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--os", type=float, default=2.0)
    p.add_argument("--rho", type=float, default=None)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("reconstruct", help="online reconstruction from samples")
    p.add_argument("--samples", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", choices=["spurs", "spurs-iter", "gridding"], default="spurs")
    p.add_argument("--plan")
    p.add_argument("--traj")
    p.add_argument("--iterate", type=int, default=15)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--truth")
    p.add_argument("--n", type=int, help="grid size (gridding method)")
    p.add_argument("--os", type=float, default=2.0, help="oversampling (gridding method)")
    p.add_argument("--width", type=float, default=12.0)
    p.add_argument("--density", default="auto", choices=["auto", "radial", "uniform"])
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("benchmark", help="run a sweep grid and emit CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--traj-kind", choices=["radial", "spiral"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bins", type=int, default=512)
    p.add_argument("--sweep-m", required=True, help="comma-separated sample counts")
    p.add_argument("--isnr-list", default="inf")
    p.add_argument("--methods", default="spurs,gridding")
    p.add_argument("--degree-list", default="3")
    p.add_argument("--os-list", default="2")
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--iterate", type=int, default=15)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--width", type=float, default=12.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("metrics", help="score an image against ground truth")
    p.add_argument("--truth", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--method", default="external")
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
