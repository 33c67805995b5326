"""Command-line experiment runner.

Verbs: ``complete`` (single completion run), ``sweep-v`` (one run per
v over a range, shared mask), ``compare`` (v = p vs v = 2p-1),
``metrics`` (score a recovered tensor against ground truth) and
``make-mask``.  Results land as CSV rows plus recovered tensors in the
raw interchange format; figures are left to external tooling.

Exit codes: 0 success, 2 bad arguments, 3 ingestion failure, 4 solver
abort.
"""

import csv
import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from . import io as vio
from .metrics import Stopwatch, score
from .solver import ObservationMask, SolverAbort, SolverConfig, make_mask, solve_vtctf, solve_vtctf_tv

RUN_HEADER = ["method", "v", "sr", "psnr", "ssim", "seconds", "iterations"]
BAND_HEADER = ["band", "psnr", "ssim"]
SWEEP_HEADER = ["v", "psnr", "ssim"]

EXIT_INGEST = 3
EXIT_SOLVER = 4


def _fmt(x) -> str:
    if isinstance(x, float):
        return "inf" if np.isinf(x) else f"{x:.10g}"
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _solver_options(fn):
    opts = [
        click.option("--v", type=int, default=None, help="Transform length; default 2p-1."),
        click.option("--rank", type=int, default=30, show_default=True, help="Factor rank q."),
        click.option("--alpha1", type=float, default=1e-5, show_default=True),
        click.option("--alpha2", type=float, default=1e-5, show_default=True),
        click.option("--beta", type=float, default=1e-5, show_default=True),
        click.option("--mu", type=float, default=1e-5, show_default=True),
        click.option("--rho1", type=float, default=5e-6, show_default=True),
        click.option("--rho2", type=float, default=5e-6, show_default=True),
        click.option("--rho3", type=float, default=5e-6, show_default=True),
        click.option("--eps", type=float, default=1e-5, show_default=True),
        click.option("--max-iter", type=int, default=200, show_default=True),
        click.option("--sr", type=float, default=0.7, show_default=True, help="Sampling rate."),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--out", type=click.Path(path_type=Path), default=Path("out"), show_default=True),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _cfg(kw) -> SolverConfig:
    try:
        return SolverConfig(
            v=kw["v"],
            rank=kw["rank"],
            alpha1=kw["alpha1"],
            alpha2=kw["alpha2"],
            beta=kw["beta"],
            mu=kw["mu"],
            rho1=kw["rho1"],
            rho2=kw["rho2"],
            rho3=kw["rho3"],
            eps=kw["eps"],
            max_iter=kw["max_iter"],
            seed=kw["seed"],
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _ingest(path, kind) -> np.ndarray:
    try:
        return vio.ingest(path, kind)
    except vio.IngestError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INGEST)


def _make_mask(shape, sr: float, seed: int) -> ObservationMask:
    try:
        return make_mask(shape, sr, seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _run(method: str, G: np.ndarray, mask: ObservationMask, cfg: SolverConfig):
    solve = solve_vtctf_tv if method == "vtctf-tv" else solve_vtctf
    try:
        with Stopwatch() as sw:
            result = solve(G, mask, cfg)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    except SolverAbort as exc:
        click.echo(f"solver abort: {exc}", err=True)
        sys.exit(EXIT_SOLVER)
    report = score(result.C, G)
    return result, report, sw.seconds


@click.group()
def main():
    """Variable T-product tensor completion experiments."""


kind_option = click.option(
    "--kind",
    type=click.Choice(vio.KINDS),
    default="raw-tensor",
    show_default=True,
    help="How to interpret INPUT.",
)


@main.command()
@click.argument("input_path", type=click.Path(path_type=Path))
@kind_option
@click.option(
    "--method",
    type=click.Choice(["vtctf-tv", "vtctf"]),
    default="vtctf-tv",
    show_default=True,
)
@_solver_options
def complete(input_path, kind, method, **kw):
    """Mask INPUT at the given sampling rate, complete it, and score it."""
    cfg = _cfg(kw)
    G = _ingest(input_path, kind)
    mask = _make_mask(G.shape, kw["sr"], kw["seed"])
    result, report, seconds = _run(method, G, mask, cfg)
    v = cfg.resolve_v(G.shape[2])

    out = kw["out"]
    out.mkdir(parents=True, exist_ok=True)
    vio.write_raw(out / "recovered.vtt3", result.C)
    _write_csv(
        out / "run.csv",
        RUN_HEADER,
        [[method, v, kw["sr"], report.psnr, report.ssim, seconds, result.iterations]],
    )
    if kind == "multispectral":
        per_band = score(result.C, G, per_band=True)
        _write_csv(
            out / "bands.csv",
            BAND_HEADER,
            [[k + 1, p, s] for k, (p, s) in enumerate(zip(per_band.band_psnr, per_band.band_ssim))],
        )
    click.echo(
        f"{method} v={v} sr={kw['sr']} psnr={_fmt(report.psnr)} ssim={_fmt(report.ssim)} "
        f"iters={result.iterations} seconds={seconds:.2f}"
    )


@main.command("sweep-v")
@click.argument("input_path", type=click.Path(path_type=Path))
@kind_option
@click.option("--v-min", type=int, default=None, help="Smallest v; default p.")
@click.option("--v-max", type=int, default=None, help="Largest v; default 3p.")
@click.option(
    "--method",
    type=click.Choice(["vtctf-tv", "vtctf"]),
    default="vtctf",
    show_default=True,
)
@_solver_options
def sweep_v(input_path, kind, v_min, v_max, method, **kw):
    """Run one completion per v in [v-min, v-max] with a shared mask."""
    cfg = _cfg(kw)
    G = _ingest(input_path, kind)
    p = G.shape[2]
    lo = p if v_min is None else v_min
    hi = 3 * p if v_max is None else v_max
    if not (p <= lo <= hi <= 3 * p):
        raise click.UsageError(f"v range must satisfy {p} <= v-min <= v-max <= {3 * p}")
    mask = _make_mask(G.shape, kw["sr"], kw["seed"])

    rows = []
    for v in range(lo, hi + 1):
        result, report, _ = _run(method, G, mask, replace(cfg, v=v))
        rows.append([v, report.psnr, report.ssim])
        click.echo(f"v={v} psnr={_fmt(report.psnr)} ssim={_fmt(report.ssim)} iters={result.iterations}")
    _write_csv(kw["out"] / "sweep.csv", SWEEP_HEADER, rows)


@main.command()
@click.argument("input_path", type=click.Path(path_type=Path))
@kind_option
@click.option(
    "--method",
    type=click.Choice(["vtctf-tv", "vtctf"]),
    default="vtctf-tv",
    show_default=True,
)
@_solver_options
def compare(input_path, kind, method, **kw):
    """Compare the classical transform length v = p against v = 2p-1."""
    cfg = _cfg(kw)
    G = _ingest(input_path, kind)
    p = G.shape[2]
    mask = _make_mask(G.shape, kw["sr"], kw["seed"])

    rows = []
    for v in (p, 2 * p - 1):
        result, report, seconds = _run(method, G, mask, replace(cfg, v=v))
        rows.append([method, v, kw["sr"], report.psnr, report.ssim, seconds, result.iterations])
        click.echo(f"v={v} psnr={_fmt(report.psnr)} ssim={_fmt(report.ssim)}")
    _write_csv(kw["out"] / "compare.csv", RUN_HEADER, rows)


@main.command()
@click.argument("recovered", type=click.Path(path_type=Path))
@click.argument("truth", type=click.Path(path_type=Path))
@kind_option
@click.option("--per-band", is_flag=True, help="Also report per-frontal-slice metrics.")
@click.option("--out", type=click.Path(path_type=Path), default=None)
def metrics(recovered, truth, kind, per_band, out):
    """Score RECOVERED (raw tensor) against TRUTH (decoded per --kind)."""
    C = _ingest(recovered, "raw-tensor")
    C_true = _ingest(truth, kind)
    if C.shape != C_true.shape:
        raise click.UsageError(f"shape mismatch: {C.shape} vs {C_true.shape}")
    report = score(C, C_true, per_band=per_band)
    click.echo(f"psnr={_fmt(report.psnr)} ssim={_fmt(report.ssim)}")
    if per_band:
        for k, (p_, s_) in enumerate(zip(report.band_psnr, report.band_ssim)):
            click.echo(f"band={k + 1} psnr={_fmt(p_)} ssim={_fmt(s_)}")
    if out is not None:
        _write_csv(out, ["psnr", "ssim"], [[report.psnr, report.ssim]])


@main.command("make-mask")
@click.option("--dims", type=int, nargs=3, required=True, help="Tensor dims m n p.")
@click.option("--sr", type=float, required=True, help="Sampling rate in (0, 1].")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
def make_mask_cmd(dims, sr, seed, out):
    """Write the observed index triples (1-based) of a random mask as CSV."""
    try:
        mask = make_mask(tuple(dims), sr, seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    _write_csv(out, ["i", "j", "k"], [(t + 1).tolist() for t in mask.triples()])
    click.echo(f"wrote {mask.count} triples to {out}")


if __name__ == "__main__":
    main()
