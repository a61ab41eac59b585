"""Single command-line entry point for every experiment.

Each run resolves its configuration (defaults, then an optional flat
key = value config file, then command-line overrides), executes one module
driver, and writes a manifest listing every artifact it produced.  Reports
carry no timestamps, so identical configuration and seed give bitwise
identical output; files are written atomically (temp + rename).

Exit status: 0 on success, 1 when a verification fails (an exact identity
comes back nonzero, an oracle disagrees, an instability aborts a run),
2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .fields import field_to_dict, random_sobolev_data, sobolev_norm
from .rng import seed_stream

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2


def worker_count() -> int:
    """Parallelism cap from QAL_THREADS (defaults to the machine size)."""
    env = os.environ.get("QAL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def atomic_write(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data)
    os.replace(tmp, path)


def write_json(path: Path, obj) -> None:
    atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    w.writerows(rows)
    atomic_write(path, buf.getvalue())


def read_config_file(path: str) -> dict[str, str]:
    """Flat key = value lines; blank lines and # comments ignored."""
    out: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {raw!r} is not key = value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def resolve_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Defaults, overlaid by the config file, overlaid by explicit flags."""
    resolved = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    if getattr(args, "config", None):
        file_values = read_config_file(args.config)
        explicit = {
            a.dest
            for a in parser._actions
            if any(opt in sys.argv for opt in a.option_strings)
        }
        for key, value in file_values.items():
            if key not in resolved:
                raise ValueError(f"unknown config key {key!r}")
            if key in explicit:
                continue
            current = resolved[key]
            if isinstance(current, bool):
                resolved[key] = value.lower() in ("1", "true", "yes")
            elif isinstance(current, int):
                resolved[key] = int(value)
            elif isinstance(current, float):
                resolved[key] = float(value)
            elif isinstance(current, (list, tuple)):
                resolved[key] = type(current)(
                    type(current[0])(v) if current else v for v in value.split(",")
                )
            else:
                resolved[key] = value
    return resolved


def finish(out_dir: Path, command: str, config: dict, artifacts: list[str], status: str) -> None:
    manifest = {
        "tool": "qal",
        "version": __version__,
        "command": command,
        "config": {k: v for k, v in sorted(config.items())},
        "artifacts": sorted(artifacts),
        "status": status,
    }
    write_json(out_dir / "manifest.json", manifest)


def _frac_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# subcommand drivers


def run_identities(cfg: dict, out_dir: Path) -> tuple[int, list[str], str]:
    from .symbols import (
        KINDS,
        cancellation_control,
        cancellation_sum,
        phi,
        phi2_factored,
        phi3_factored,
        random_rational_field,
        telescope_decompose,
        verify_re1_combination,
        verify_resonant_reduction,
    )

    N = cfg["N"]
    n_seeds = cfg["seeds"]
    rng = seed_stream(cfg["seed"], "identities")
    report: dict = {"identities": {}}
    failures = 0

    span = cfg["factorization_range"]
    bad = 0
    count = 0
    for a in range(-span, span + 1):
        for b in range(-span, span + 1):
            if a and b:
                count += 1
                bad += phi((a, b)) != phi2_factored(a, b)
    report["identities"]["quadratic_factorization"] = {
        "range": span, "count": count, "failures": bad,
    }
    failures += bad

    bad = 0
    count = 0
    for a in range(-span, span + 1):
        for b in range(-span, span + 1):
            for c in range(-span, span + 1):
                if a and b and c:
                    count += 1
                    bad += phi((a, b, c)) != phi3_factored(a, b, c)
    report["identities"]["cubic_factorization"] = {
        "range": span, "count": count, "failures": bad,
    }
    failures += bad

    bad = 0
    total = 0
    for p in (4, 5, 6):
        for _ in range(cfg["telescope_samples"]):
            t = tuple(
                int(v) for v in rng.integers(1, 200, size=p) * rng.choice([-1, 1], size=p)
            )
            if sum(t[2:]) == 0:
                continue
            total += 1
            bad += sum(telescope_decompose(t)) != phi(t)
    report["identities"]["telescoping"] = {"count": total, "failures": bad}
    failures += bad

    bad = 0
    for _ in range(cfg["pair_samples"]):
        n = int(rng.integers(1, 1001)) * (1 if rng.integers(2) else -1)
        n3 = int(rng.integers(1, 1001)) * (1 if rng.integers(2) else -1)
        if n + n3 == 0:
            continue
        l, r = verify_resonant_reduction(n, n3)
        bad += l != r
        l, r = verify_re1_combination(n, n3)
        bad += l != r
    report["identities"]["pointwise_resonant"] = {
        "count": 2 * cfg["pair_samples"], "failures": bad,
    }
    failures += bad

    kind_report = {}
    for kind in KINDS:
        nonzero = 0
        controls_zero = 0
        for i in range(n_seeds):
            f = random_rational_field(
                (4, 8, 16, N)[i % 4], seed_stream(cfg["seed"], "identities", kind, i)
            )
            if cancellation_sum(kind, f) != (0, 0):
                nonzero += 1
            if i == 0 and cancellation_control(kind, f) == (0, 0):
                controls_zero += 1
        kind_report[kind] = {
            "seeds": n_seeds,
            "nonzero_sums": nonzero,
            "control_vanished": controls_zero,
        }
        failures += nonzero + controls_zero
    report["identities"]["cancellations"] = kind_report
    report["seed"] = cfg["seed"]
    report["all_exact"] = failures == 0

    write_json(out_dir / "report.json", report)
    status = "ok" if failures == 0 else "verification-failed"
    return (EXIT_OK if failures == 0 else EXIT_VERIFICATION), ["report.json"], status


def run_symbols(cfg: dict, out_dir: Path) -> tuple[int, list[str], str]:
    from .symbols import SYMBOL_ARITY, SymbolDomainError, eval_symbol

    rng = seed_stream(cfg["seed"], "symbols")
    rows = []
    span = cfg["max_abs"]
    for symbol_id, arity in SYMBOL_ARITY.items():
        emitted = 0
        attempts = 0
        while emitted < cfg["per_symbol"] and attempts < 100 * cfg["per_symbol"]:
            attempts += 1
            t = tuple(
                int(v)
                for v in rng.integers(1, span + 1, size=arity)
                * rng.choice([-1, 1], size=arity)
            )
            ell = int(rng.integers(1, 5)) if symbol_id == "m_a_ell" else None
            j = None
            if symbol_id == "h":
                ell = int(rng.integers(3, 5))
                j = 1 if ell == 4 else int(rng.integers(1, 3))
            try:
                val = eval_symbol(symbol_id, t, ell=ell, j=j)
            except SymbolDomainError:
                continue
            rows.append(
                [
                    symbol_id,
                    " ".join(str(x) for x in t),
                    "" if ell is None else ell,
                    "" if j is None else j,
                    str(val.value.numerator),
                    str(val.value.denominator),
                    int(val.indicator_active),
                ]
            )
            emitted += 1
    write_csv(
        out_dir / "symbols.csv",
        ["symbol", "tuple", "ell", "j", "numerator", "denominator", "indicator"],
        rows,
    )
    return EXIT_OK, ["symbols.csv"], "ok"


def run_solve(cfg: dict, out_dir: Path) -> tuple[int, list[str], str]:
    from .evolution import (
        EquationParams,
        SolverConfig,
        default_dt,
        max_coefficient_deviation,
        oracle_solve,
        preset,
        solve,
    )
    from .gauge import GaugePhase  # noqa: F401  (checkpoint schema)

    params = (
        preset(cfg["preset"])
        if cfg["preset"]
        else EquationParams(cfg["alpha"], cfg["beta"], cfg["gamma"])
    )
    dt = cfg["dt"] if cfg["dt"] > 0 else default_dt(cfg["N"])
    solver_cfg = SolverConfig(
        N=cfg["N"],
        dt=dt,
        T=cfg["T"],
        snapshot_stride=cfg["snapshot_stride"],
        mode_filter=cfg["mode_filter"],
    )
    u0 = random_sobolev_data(cfg["s"], cfg["N"], seed_stream(cfg["seed"], "solve-data"))
    traj = solve(u0, params, solver_cfg)

    artifacts = []
    checkpoint = {
        "params": {"alpha": params.alpha, "beta": params.beta, "gamma": params.gamma},
        "config": {
            "N": solver_cfg.N,
            "dt": solver_cfg.dt,
            "T": solver_cfg.T,
            "snapshot_stride": solver_cfg.snapshot_stride,
            "mode_filter": solver_cfg.mode_filter,
        },
        "times": traj.times.tolist(),
        "snapshots": [field_to_dict(s) for s in traj.snapshots],
        "gauge": {
            "times": traj.gauge.times.tolist(),
            "k_imag": traj.gauge.k_samples.imag.tolist(),
            "cumulative_imag": traj.gauge.cumulative.imag.tolist(),
        },
        "completed": traj.completed,
        "note": traj.note,
    }
    write_json(out_dir / "checkpoint.json", checkpoint)
    artifacts.append("checkpoint.json")

    diag = traj.diagnostics
    probe_keys = [k for k in diag if k not in ("t", "mean", "l2")]
    write_csv(
        out_dir / "diagnostics.csv",
        ["t", "mean", "l2", *probe_keys],
        zip(diag["t"], diag["mean"], diag["l2"], *[diag[k] for k in probe_keys]),
    )
    artifacts.append("diagnostics.csv")

    report = {"completed": traj.completed, "note": traj.note}
    code = EXIT_OK if traj.completed else EXIT_VERIFICATION
    if cfg["oracle"]:
        orc = oracle_solve(u0, params, solver_cfg)
        dev = max_coefficient_deviation(traj, orc)
        report["oracle_max_deviation"] = dev
        report["oracle_tolerance"] = cfg["oracle_tol"]
        if dev > cfg["oracle_tol"]:
            code = EXIT_VERIFICATION
    write_json(out_dir / "report.json", report)
    artifacts.append("report.json")
    return code, artifacts, "ok" if code == EXIT_OK else "verification-failed"


def run_smoothing(cfg: dict, out_dir: Path) -> tuple[int, list[str], str]:
    from .evolution import SolverConfig, preset
    from .experiments import smoothing_report

    params = preset(cfg["preset"])
    n_top = max(cfg["n_ladder"])
    solver_cfg = SolverConfig(
        N=n_top,
        dt=cfg["dt_budget"] / n_top**3,
        T=cfg["T"],
        mode_filter=cfg["mode_filter"],
    )
    rep = smoothing_report(
        cfg["s"],
        params,
        solver_cfg,
        seeds=range(cfg["seeds"]),
        n_ladder=tuple(cfg["n_ladder"]),
        amplitude=cfg["amplitude"],
    )
    report = {
        "s": rep.s,
        "epsilon_target": rep.epsilon_target,
        "params": rep.params,
        "amplitude": rep.amplitude,
        "n_ladder": list(rep.n_ladder),
        "seeds": list(rep.seeds),
        "flags": list(rep.flags),
        "mean_gain_by_n": {str(k): v for k, v in rep.mean_gain_by_n.items()},
        "points": [
            {
                "N": p.N, "seed": p.seed, "gain": p.gain,
                "data_decay": p.data_decay, "diff_decay": p.diff_decay,
                "fit_residual": p.fit_residual, "stable": p.stable,
                "sup_diff_norm": p.sup_diff_norm,
            }
            for p in rep.points
        ],
    }
    write_json(out_dir / "report.json", report)
    artifacts = ["report.json"]
    for N in rep.n_ladder:
        rows = list(zip(rep.times[N].tolist(), rep.diff_norm_series[N].tolist()))
        write_csv(out_dir / f"difference_norm_N{N}.csv", ["t", "h_norm"], rows)
        artifacts.append(f"difference_norm_N{N}.csv")
    code = EXIT_VERIFICATION if rep.inconclusive else EXIT_OK
    return code, artifacts, "ok" if code == EXIT_OK else "verification-failed"


def run_strichartz(cfg: dict, out_dir: Path) -> tuple[int, list[str], str]:
    from .experiments import strichartz_probe

    probe = strichartz_probe(
        cfg["a"],
        n_ladder=tuple(cfg["n_ladder"]),
        seeds=tuple(range(cfg["seeds"])),
        time_points=cfg["time_points"],
    )
    report = {
        "a_test": probe.a_test,
        "exponent": probe.exponent,
        "n_ladder": list(probe.n_ladder),
        "rows": [
            {
                "N": r.N, "family": r.family, "l8": r.l8_norm,
                "sobolev": r.sobolev, "ratio": r.ratio,
                "time_points": r.time_points, "converged": r.converged,
            }
            for r in probe.rows
        ],
    }
    write_json(out_dir / "report.json", report)
    write_csv(
        out_dir / "ratios.csv",
        ["N", "family", "l8", "sobolev", "ratio"],
        [[r.N, r.family, r.l8_norm, r.sobolev, r.ratio] for r in probe.rows],
    )
    return EXIT_OK, ["report.json", "ratios.csv"], "ok"


def run_dimension(cfg: dict, out_dir: Path) -> tuple[int, list[str], str]:
    from .dimension import (
        fit_dimension,
        free_evolution,
        sample_field,
        sample_function,
        step_profile,
        weierstrass,
    )

    count = cfg["samples"]
    targets: dict[str, object] = {}
    names = cfg["targets"]
    if "line" in names:
        targets["line"] = sample_function(lambda x: x, count)
    if "square" in names:
        targets["square"] = sample_function(lambda x: np.sign(np.sin(x)), count)
    if "weierstrass" in names:
        targets["weierstrass"] = sample_function(weierstrass(), count)
    if "step-free" in names:
        u = free_evolution(step_profile(cfg["N"]), cfg["t"])
        targets["step-free"] = sample_field(u, count)

    report = {}
    artifacts = []
    for name, g in targets.items():
        est = fit_dimension(g)
        report[name] = {
            "slope": est.slope,
            "residual": est.residual,
            "fit_window": list(est.fit_window),
        }
        write_csv(
            out_dir / f"boxcounts_{name}.csv",
            ["eps", "count"],
            list(zip(est.eps, est.counts)),
        )
        artifacts.append(f"boxcounts_{name}.csv")
    write_json(out_dir / "report.json", report)
    artifacts.append("report.json")
    return EXIT_OK, artifacts, "ok"


def run_talbot(cfg: dict, out_dir: Path) -> tuple[int, list[str], str]:
    from .dimension import step_profile, talbot_snapshot, translate_exact

    g = step_profile(cfg["N"])
    rows = []
    exact = True
    for q in cfg["q"]:
        snap = talbot_snapshot(g, cfg["p"], q)
        if 30 % q == 0:
            trans = translate_exact(g, cfg["p"], q)
            match = bool(np.array_equal(snap.coeffs, trans.coeffs))
            exact &= match
            rows.append([q, cfg["p"], "translate", int(match)])
        else:
            rows.append([q, cfg["p"], "generic", ""])
    write_csv(out_dir / "talbot.csv", ["q", "p", "kind", "exact_translate"], rows)
    write_json(out_dir / "report.json", {"q": list(cfg["q"]), "exact": exact})
    code = EXIT_OK if exact else EXIT_VERIFICATION
    return code, ["talbot.csv", "report.json"], "ok" if exact else "verification-failed"


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qal",
        description="Fifth-order dispersive laboratory on the torus",
    )
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=str, default=".")
        p.add_argument("--config", type=str, default=None)

    p = sub.add_parser("identities", help="verify the exact identities")
    common(p)
    p.add_argument("--N", type=int, default=16)
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--factorization-range", dest="factorization_range", type=int, default=30)
    p.add_argument("--telescope-samples", dest="telescope_samples", type=int, default=2000)
    p.add_argument("--pair-samples", dest="pair_samples", type=int, default=2000)
    p.set_defaults(func=run_identities)

    p = sub.add_parser("symbols", help="emit exact symbol values as CSV")
    common(p)
    p.add_argument("--max-abs", dest="max_abs", type=int, default=12)
    p.add_argument("--per-symbol", dest="per_symbol", type=int, default=25)
    p.set_defaults(func=run_symbols)

    p = sub.add_parser("solve", help="integrate one trajectory")
    common(p)
    p.add_argument("--preset", choices=["toy", "integrable", "full"], default=None)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--N", type=int, default=16)
    p.add_argument("--dt", type=float, default=0.0, help="0 means the 0.25/N^3 default")
    p.add_argument("--T", type=float, default=0.001)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--snapshot-stride", dest="snapshot_stride", type=int, default=1)
    p.add_argument("--mode-filter", dest="mode_filter", choices=["none", "wall"], default="none")
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--oracle-tol", dest="oracle_tol", type=float, default=1e-8)
    p.set_defaults(func=run_solve)

    p = sub.add_parser("smoothing", help="tail-slope gain of the gauged flow")
    common(p)
    p.add_argument("--preset", choices=["toy", "integrable", "full"], default="toy")
    p.add_argument("--s", type=float, default=0.75)
    p.add_argument("--T", type=float, default=0.005)
    p.add_argument("--seeds", type=int, default=8)
    p.add_argument("--n-ladder", dest="n_ladder", type=int, nargs="+", default=[64, 128, 256])
    p.add_argument("--amplitude", type=float, default=0.02)
    p.add_argument("--dt-budget", dest="dt_budget", type=float, default=0.1,
                   help="dt = budget / N^3")
    p.add_argument("--mode-filter", dest="mode_filter", choices=["none", "wall"], default="wall")
    p.set_defaults(func=run_smoothing)

    p = sub.add_parser("strichartz", help="space-time L^8 ratio ladder")
    common(p)
    p.add_argument("--a", type=float, default=3.0 / 32.0)
    p.add_argument("--n-ladder", dest="n_ladder", type=int, nargs="+",
                   default=[32, 64, 128, 256, 512])
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--time-points", dest="time_points", type=int, default=256)
    p.set_defaults(func=run_strichartz)

    p = sub.add_parser("dimension", help="box-counting dimension estimates")
    common(p)
    p.add_argument("--targets", nargs="+",
                   default=["line", "square", "weierstrass", "step-free"],
                   choices=["line", "square", "weierstrass", "step-free"])
    p.add_argument("--samples", type=int, default=2**15)
    p.add_argument("--N", type=int, default=1024)
    p.add_argument("--t", type=float, default=1.0)
    p.set_defaults(func=run_dimension)

    p = sub.add_parser("talbot", help="rational-time revival checks")
    common(p)
    p.add_argument("--N", type=int, default=512)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--q", type=int, nargs="+", default=[2, 3, 5, 6, 10, 15, 30])
    p.set_defaults(func=run_talbot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = resolve_config(args, parser)
    except (ValueError, OSError) as exc:
        print(f"qal: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        code, artifacts, status = args.func(cfg, out_dir)
    except Exception as exc:  # surfaced in the manifest, nonzero exit
        finish(out_dir, args.command, cfg, [], f"error: {exc}")
        raise
    finish(out_dir, args.command, cfg, artifacts, status)
    return code


if __name__ == "__main__":
    sys.exit(main())
