"""Command-line entry point.

Subcommands: psub (fusion probabilities), optimize (reflectivity tables),
simulate (one growth walk), reproduce (figure data as CSV), fit (power-law
fits of rate curves). Exit codes: 0 success, 2 usage or domain error,
3 numerical failure.

Options can also come from a flat key=value config file (--config); flags
given on the command line win over the file.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

from . import analytics, baselines, manifest, optimize, simulate
from .engine import derive_seed
from .errors import DomainError, FockFusionError
from .probabilities import p_sub, subtraction_distribution

OBJECTIVES = {
    "recycled": optimize.RECYCLED_GROW,
    "recycled-grow": optimize.RECYCLED_GROW,
    "nonrecycled": optimize.NONRECYCLED_ZERO_LOSS,
    "nonrecycled-zero-loss": optimize.NONRECYCLED_ZERO_LOSS,
}
FRUGAL_OBJECTIVES = {
    "frugal-above": optimize.frugal_above,
    "frugal-below": optimize.frugal_below,
}
FIGURES = ("fig2", "fig4", "fig6", "fig7", "fig8", "fig9")

# reproduction runs use more steps once rates drop below ~1e-4
DEFAULT_STEPS = 10**7
DEEP_STEPS = 10**8
DEEP_D = 16


def _parse_seed(text: str) -> int:
    try:
        value = int(text, 16) if text.lower().startswith("0x") else int(text, 10)
    except ValueError:
        raise DomainError(f"seed must be a decimal or 0x hex integer, got {text!r}")
    if value < 0:
        raise DomainError(f"seed must be non-negative, got {text!r}")
    return value


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise DomainError(f"expected a boolean, got {text!r}")


def _load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DomainError(f"cannot read config file: {exc}")
    values: dict[str, str] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


class _Options:
    """Flag/config/default resolution for one subcommand.

    Command-line values win; a key=value config file fills the gaps;
    hard defaults come last. Missing required options are usage errors.
    """

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = _load_config(getattr(args, "config", None))
        self.config_text = ""
        if getattr(args, "config", None):
            with open(args.config, encoding="utf-8") as fh:
                self.config_text = fh.read()

    def get(
        self,
        name: str,
        parse: Callable[[str], object] | None = None,
        default: object = None,
        required: bool = False,
    ):
        value = getattr(self.args, name, None)
        if value is None and name in self.config:
            raw = self.config[name]
            value = parse(raw) if parse else raw
        if value is None:
            if required:
                raise DomainError(f"missing required option --{name.replace('_', '-')}")
            value = default
        return value


def _emit(
    out: str | None,
    header: Sequence[str],
    rows: Sequence[Sequence[object]],
    run_manifest: manifest.RunManifest,
    extra_comments: Sequence[str] = (),
) -> None:
    if out:
        manifest.write_csv(out, header, rows, run_manifest, extra_comments)
    else:
        sys.stdout.write(
            manifest.render_csv(header, rows, run_manifest, extra_comments)
        )


def _manifest_for(opts: _Options, seed: int | None, outputs: Sequence[str]) -> manifest.RunManifest:
    command = ["fockfusion"] + list(getattr(opts.args, "argv", []))
    return manifest.build_manifest(
        command, config_text=opts.config_text, seed=seed, outputs=outputs
    )


# ---------------------------------------------------------------- psub


def cmd_psub(args: argparse.Namespace) -> int:
    opts = _Options(args)
    m = opts.get("m", int, required=True)
    n = opts.get("n", int, required=True)
    eta = opts.get("eta", float, required=True)
    s = opts.get("s", int)
    out = opts.get("out", str)
    if s is not None:
        print(manifest.format_value(p_sub(s, m, n, eta)))
        return 0
    dist = subtraction_distribution(m, n, eta)
    rows = [(k, dist[k]) for k in range(len(dist))]
    _emit(out, ("s", "probability"), rows, _manifest_for(opts, None, [out] if out else []))
    return 0


# ------------------------------------------------------------- optimize


def cmd_optimize(args: argparse.Namespace) -> int:
    opts = _Options(args)
    name = opts.get("objective", str, required=True)
    max_m = opts.get("max_m", int, required=True)
    max_n = opts.get("max_n", int, required=True)
    d = opts.get("d", int)
    out = opts.get("out", str)
    if name in OBJECTIVES:
        if d is not None:
            raise DomainError(f"objective {name} does not take --d")
        obj = OBJECTIVES[name]
    elif name in FRUGAL_OBJECTIVES:
        if d is None:
            raise DomainError(f"objective {name} requires --d")
        obj = FRUGAL_OBJECTIVES[name](d)
    else:
        known = ", ".join(sorted(set(OBJECTIVES) | set(FRUGAL_OBJECTIVES)))
        raise DomainError(f"unknown objective {name!r} (choose from {known})")
    table = optimize.build_table(obj, max_m, max_n)
    rows = [
        (obj.label(), m, n, e.eta_opt, e.p_opt)
        for (m, n), e in sorted(table.items())
    ]
    _emit(
        out,
        ("objective", "m", "n", "eta_opt", "p_opt"),
        rows,
        _manifest_for(opts, None, [out] if out else []),
    )
    return 0


# ------------------------------------------------------------- simulate

SIM_HEADER = (
    "d",
    "strategy",
    "recycled",
    "source_size",
    "d_prime",
    "steps",
    "burn_in",
    "seed",
    "harvested",
    "rate",
    "stderr",
    "photons_in",
    "detected",
    "discarded",
    "reduction_ops",
    "reduction_overshoots",
)


def _estimate_row(est: simulate.RateEstimate, config: simulate.SimConfig) -> tuple:
    return (
        est.d,
        est.strategy,
        int(est.recycled),
        config.source_size,
        config.effective_d_prime(),
        est.steps,
        est.burn_in,
        est.seed,
        est.harvested,
        est.rate,
        est.stderr,
        est.photons_in,
        est.detected,
        est.discarded,
        "" if est.reduction_ops is None else est.reduction_ops,
        "" if est.reduction_overshoots is None else est.reduction_overshoots,
    )


def cmd_simulate(args: argparse.Namespace) -> int:
    opts = _Options(args)
    config = simulate.SimConfig(
        d=opts.get("d", int, required=True),
        strategy=opts.get("strategy", str, required=True),
        recycled=opts.get("recycled", _parse_bool, default=True),
        steps=opts.get("steps", int, default=DEFAULT_STEPS),
        burn_in=opts.get("burn_in", int),
        seed=opts.get("seed", _parse_seed, default=1),
        source_size=opts.get("source_size", int, default=1),
        d_prime=opts.get("d_prime", int),
        exact=opts.get("exact", _parse_bool, default=False),
        eta_r=opts.get("eta_r", float),
    )
    out = opts.get("out", str)
    est = simulate.run(config)
    _emit(
        out,
        SIM_HEADER,
        [_estimate_row(est, config)],
        _manifest_for(opts, config.seed, [out] if out else []),
    )
    return 0


# ------------------------------------------------------------ reproduce


def _sim_worker(config: simulate.SimConfig) -> simulate.RateEstimate:
    return simulate.run(config)


def _warm_tables(configs: Sequence[simulate.SimConfig]) -> None:
    """Build each needed eta table once, at its largest extents.

    Smaller same-objective requests then slice from the cached file, and
    pool workers read instead of rebuilding.
    """
    plain: dict[bool, int] = {}
    frugal: set[tuple[int, int]] = set()
    for c in configs:
        if c.strategy == "frugal" and c.recycled:
            frugal.add((c.d, c.effective_d_prime()))
        else:
            plain[c.recycled] = max(plain.get(c.recycled, 2), c.d)
    for recycled, d in sorted(plain.items()):
        simulate.eta_table_for("balanced", recycled, d, d)
    for d, d_prime in sorted(frugal):
        simulate.eta_table_for("frugal", True, d, d_prime)


def _run_all(
    configs: Sequence[simulate.SimConfig], workers: int
) -> list[simulate.RateEstimate]:
    _warm_tables(configs)
    if workers <= 1 or len(configs) <= 1:
        return [simulate.run(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sim_worker, configs))


def _steps_for(d: int, override: int | None) -> int:
    if override is not None:
        return override
    return DEEP_STEPS if d >= DEEP_D else DEFAULT_STEPS


def _fig2_rows() -> tuple[tuple[str, ...], list[tuple]]:
    targets = (2, 4, 6, 8, 10)
    header = ("nbar",) + tuple(f"p_d{d}" for d in targets)
    rows = []
    for i in range(1, 101):
        nbar = i / 20.0
        rows.append((nbar,) + tuple(baselines.spdc_pprep(nbar, d) for d in targets))
    return header, rows


def _fig4_rows() -> tuple[tuple[str, ...], list[tuple]]:
    header = ("objective", "m", "n", "eta_opt", "p_opt")
    rows = []
    for obj in (optimize.RECYCLED_GROW, optimize.NONRECYCLED_ZERO_LOSS):
        table = optimize.build_table(obj, 10, 10)
        rows.extend(
            (obj.label(), m, n, e.eta_opt, e.p_opt)
            for (m, n), e in sorted(table.items())
        )
    return header, rows


def _fig6_rows() -> tuple[tuple[str, ...], list[tuple]]:
    rows = [(n, baselines.limited_recycling_success(n)) for n in range(1, 401)]
    return ("n", "success"), rows


def _fig7_rows(
    seed: int, steps: int | None, workers: int
) -> tuple[tuple[str, ...], list[tuple], list[str]]:
    d_values = list(range(2, 21))
    configs = []
    for i, d in enumerate(d_values):
        for j, recycled in enumerate((True, False)):
            configs.append(
                simulate.SimConfig(
                    d=d,
                    strategy="balanced",
                    recycled=recycled,
                    steps=_steps_for(d, steps),
                    seed=derive_seed(seed, 2 * i + j),
                )
            )
    estimates = {(e.d, e.recycled): e for e in _run_all(configs, workers)}
    rate_at_20 = estimates[(20, True)].rate
    nbar = analytics.spdc_crossover(20, rate_at_20) if rate_at_20 > 0 else None
    rows = []
    for d in d_values:
        rec = estimates[(d, True)]
        non = estimates[(d, False)]
        rows.append(
            (
                d,
                rec.rate,
                rec.stderr,
                non.rate,
                non.stderr,
                baselines.single_shot_rate(d),
                baselines.spdc_pprep(nbar, d) if nbar is not None else "",
            )
        )
    header = (
        "d",
        "recycled",
        "recycled_stderr",
        "nonrecycled",
        "nonrecycled_stderr",
        "single_shot",
        "spdc",
    )
    comments = []
    if nbar is not None:
        comments.append(f"spdc-nbar: {manifest.format_value(nbar)}")
    return header, rows, comments


def _fig8_rows(
    seed: int, steps: int | None, workers: int
) -> tuple[tuple[str, ...], list[tuple]]:
    d_values = list(range(6, 25, 2))
    strategies = ("frugal", "balanced", "random", "modesty")
    configs = []
    for i, d in enumerate(d_values):
        for j, strategy in enumerate(strategies):
            configs.append(
                simulate.SimConfig(
                    d=d,
                    strategy=strategy,
                    recycled=True,
                    steps=_steps_for(d, steps),
                    seed=derive_seed(seed, 100 + 4 * i + j),
                )
            )
    estimates = {(e.d, e.strategy): e for e in _run_all(configs, workers)}
    header = ["d"]
    for strategy in strategies:
        header += [strategy, f"{strategy}_stderr"]
    rows = []
    for d in d_values:
        row = [d]
        for strategy in strategies:
            e = estimates[(d, strategy)]
            row += [e.rate, e.stderr]
        rows.append(tuple(row))
    return tuple(header), rows


def _fig9_rows(
    seed: int, steps: int | None, workers: int
) -> tuple[tuple[str, ...], list[tuple]]:
    d_values = list(range(6, 25, 2))
    sizes = (1, 2, 3, 4)
    configs = []
    for i, d in enumerate(d_values):
        for j, x in enumerate(sizes):
            configs.append(
                simulate.SimConfig(
                    d=d,
                    strategy="frugal",
                    recycled=True,
                    steps=_steps_for(d, steps),
                    seed=derive_seed(seed, 200 + 4 * i + j),
                    source_size=x,
                )
            )
    estimates = {(e.d, c.source_size): e for c, e in zip(configs, _run_all(configs, workers))}
    header = ["d"]
    for x in sizes:
        header += [f"x{x}", f"x{x}_stderr"]
    rows = []
    for d in d_values:
        row = [d]
        for x in sizes:
            e = estimates[(d, x)]
            row += [e.rate, e.stderr]
        rows.append(tuple(row))
    return tuple(header), rows


def cmd_reproduce(args: argparse.Namespace) -> int:
    opts = _Options(args)
    figure = args.figure
    seed = opts.get("seed", _parse_seed, default=1)
    steps = opts.get("steps", int)
    workers = opts.get("workers", int, default=min(8, os.cpu_count() or 1))
    out_dir = opts.get(
        "out_dir", str, default=os.environ.get("FOCKFUSION_OUT", "figures")
    )
    wanted = FIGURES if figure == "all" else (figure,)
    for name in wanted:
        comments: list[str] = []
        if name == "fig2":
            header, rows = _fig2_rows()
        elif name == "fig4":
            header, rows = _fig4_rows()
        elif name == "fig6":
            header, rows = _fig6_rows()
        elif name == "fig7":
            header, rows, comments = _fig7_rows(seed, steps, workers)
        elif name == "fig8":
            header, rows = _fig8_rows(seed, steps, workers)
        else:
            header, rows = _fig9_rows(seed, steps, workers)
        path = os.path.join(out_dir, f"{name}.csv")
        manifest.write_csv(
            path,
            header,
            rows,
            _manifest_for(opts, seed, [path]),
            comments,
        )
        print(path)
    return 0


# ----------------------------------------------------------------- fit


def cmd_fit(args: argparse.Namespace) -> int:
    opts = _Options(args)
    path = opts.get("input", str, required=True)
    scheme = opts.get("scheme", str, required=True)
    d_min = opts.get("d_min", float, default=float("-inf"))
    d_max = opts.get("d_max", float, default=float("inf"))
    out = opts.get("out", str)
    try:
        _, header, rows = manifest.read_csv(path)
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc}")
    if "d" not in header:
        raise DomainError(f"{path} has no 'd' column")
    if scheme not in header:
        raise DomainError(
            f"{path} has no {scheme!r} column (columns: {', '.join(header)})"
        )
    d_idx = header.index("d")
    r_idx = header.index(scheme)
    stderr_idx = (
        header.index(f"{scheme}_stderr") if f"{scheme}_stderr" in header else None
    )
    points = []
    stderrs = []
    for row in rows:
        if not row[r_idx]:
            continue
        d = float(row[d_idx])
        if not d_min <= d <= d_max:
            continue
        points.append((d, float(row[r_idx])))
        if stderr_idx is not None and row[stderr_idx]:
            stderrs.append(float(row[stderr_idx]))
    weighted = opts.get("weighted", _parse_bool, default=False)
    kwargs = {}
    if weighted:
        if len(stderrs) != len(points) or any(s <= 0 for s in stderrs):
            raise DomainError(
                "weighted fit needs a positive stderr column for every point"
            )
        kwargs["stderrs"] = stderrs
    fit = analytics.fit_power_law(points, **kwargs)
    _emit(
        out,
        ("scheme", "exponent", "prefactor", "r_squared", "points_used"),
        [(scheme, fit.exponent, fit.prefactor, fit.r_squared, fit.points_used)],
        _manifest_for(opts, None, [out] if out else []),
    )
    return 0


# ---------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockfusion",
        description="Bootstrapped Fock-state preparation: probabilities, "
        "reflectivity tables, growth simulations, figure data, fits.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("psub", help="fusion outcome probabilities")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--eta", type=float)
    p.add_argument("--s", type=int)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_psub)

    p = sub.add_parser("optimize", help="optimal reflectivity tables")
    p.add_argument("--objective")
    p.add_argument("--max-m", type=int, dest="max_m")
    p.add_argument("--max-n", type=int, dest="max_n")
    p.add_argument("--d", type=int)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="run one growth walk")
    p.add_argument("--d", type=int)
    p.add_argument("--strategy", choices=simulate.STRATEGIES)
    p.add_argument("--recycled", action="store_true", default=None)
    p.add_argument("--no-recycled", action="store_false", dest="recycled", default=None)
    p.add_argument("--steps", type=int)
    p.add_argument("--burn-in", type=int, dest="burn_in")
    p.add_argument("--seed", type=_parse_seed)
    p.add_argument("--source-size", type=int, dest="source_size")
    p.add_argument("--d-prime", type=int, dest="d_prime")
    p.add_argument("--exact", action="store_true", default=None)
    p.add_argument("--eta-r", type=float, dest="eta_r")
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="write figure data CSVs")
    p.add_argument("figure", choices=FIGURES + ("all",))
    p.add_argument("--seed", type=_parse_seed)
    p.add_argument("--steps", type=int, help="override default step counts")
    p.add_argument("--workers", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--config")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("fit", help="power-law fit of a rate curve CSV")
    p.add_argument("--input")
    p.add_argument("--scheme")
    p.add_argument("--d-min", type=float, dest="d_min")
    p.add_argument("--d-max", type=float, dest="d_max")
    p.add_argument("--weighted", action="store_true", default=None)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = list(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FockFusionError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
