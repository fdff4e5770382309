"""Command-line front end: ``analyze``, ``simulate`` and ``loss``.

Every command reads an INI scenario file and writes one CSV table. Output
is assembled in memory and written atomically, so a failed run leaves no
partial file behind.

Exit codes: 0 success, 1 usage or parse error, 2 infeasible scenario,
3 ensemble failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile

import numpy as np

from .asymptotics import AsymptoticInputs, InfeasibleScenario, analyze
from .channel import db_to_linear
from .game import gamma_star
from .experiments import Scenario, WORKERS_ENV, default_workers, sweep_gain, sweep_loss
from .rake import RakeConfig
from .scenario import ScenarioError, load_scenario

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_FAILED = 0, 1, 2, 3

ANALYZE_COLUMNS = [
    "lambda_db", "rho", "beta", "mu", "nu", "nu0", "gamma_target",
    "util_uwb_norm", "util_cdma_norm", "epsilon", "loss_db",
]
SIMULATE_COLUMNS = [
    "N", "Nf", "Nc", "K", "L", "rho", "mode", "n_real", "mean_util_norm", "stderr",
    "closed_form_util_norm", "rel_gap", "loss_db_pair",
]
LOSS_COLUMNS = ["N", "K", "L", "Nc", "rho", "beta", "epsilon", "loss_db", "exact_loss_db"]
INFEASIBLE = "infeasible"


class UsageError(ValueError):
    pass


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return repr(float(value))
    return str(value)


def render_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".uwbpowergame-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _axis_values(raw: str) -> list[float]:
    out = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise UsageError(f"range must be start:stop:step, got {part!r}")
            start, stop, step = map(float, bits)
            if step <= 0:
                raise UsageError(f"range step must be positive in {part!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            out.extend(round(start + i * step, 12) for i in range(count))
        else:
            out.append(float(part))
    return out


def parse_grid(spec: str | None, allowed: set[str]) -> dict[str, list[float]]:
    """Parse ``"key=v1,v2;key=start:stop:step"`` into value lists."""
    grid = {}
    if not spec:
        return grid
    for item in spec.split(";"):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise UsageError(f"grid entry must be key=values, got {item!r}")
        key, raw = (s.strip() for s in item.split("=", 1))
        if key not in allowed:
            raise UsageError(f"unknown grid axis {key!r}; expected one of {sorted(allowed)}")
        try:
            grid[key] = _axis_values(raw)
        except ValueError as exc:
            raise UsageError(f"bad grid values for {key!r}: {exc}") from None
        if not grid[key]:
            raise UsageError(f"empty grid axis {key!r}")
    return grid


def _int_axis(values, name):
    if any(v != int(v) for v in values):
        raise UsageError(f"grid axis {name} must be integers")
    return [int(v) for v in values]


def cmd_analyze(args) -> int:
    scen = load_scenario(args.scenario)
    grid = parse_grid(args.grid, {"lambda_db", "rho", "beta", "N", "K"})
    L = scen.channel.num_paths
    lams = grid.get("lambda_db", [scen.pdp_ratio_db])
    rhos = grid.get("rho", scen.finger_fractions)
    betas = grid.get("beta", sorted({0.0 if nc == 1 else nc / L for nc in scen.chips_per_frame}))
    gains = _int_axis(grid.get("N", scen.processing_gains[:1]), "N")
    users = _int_axis(grid.get("K", [scen.channel.num_users]), "K")
    if len(gains) != 1 or len(users) != 1:
        raise UsageError("analyze takes a single N and K")
    N, K = gains[0], users[0]
    rows = []
    for lam_db in lams:
        for rho in rhos:
            for beta in betas:
                inp = AsymptoticInputs(db_to_linear(lam_db), rho, beta, N, K, scen.game)
                row = {"lambda_db": lam_db, "rho": rho, "beta": beta,
                       "mu": inp.mu, "nu": inp.nu, "nu0": inp.nu0}
                try:
                    rep = analyze(inp)
                    row.update(gamma_target=rep.gamma_target, util_uwb_norm=rep.normalized_utility,
                               util_cdma_norm=rep.normalized_utility_cdma, epsilon=rep.epsilon,
                               loss_db=rep.loss_db)
                except InfeasibleScenario:
                    row["gamma_target"] = gamma_star(N / inp.nu, scen.game.total_bits)
                    for c in ("util_uwb_norm", "util_cdma_norm", "epsilon", "loss_db"):
                        row[c] = INFEASIBLE
                rows.append(row)
    write_output(render_csv(ANALYZE_COLUMNS, rows), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    scen = load_scenario(args.scenario)
    seed = scen.seed if args.seed is None else args.seed
    n = scen.n_realizations if args.realizations is None else args.realizations
    workers = default_workers() if args.workers is None else args.workers
    if workers < 1 or n < 1:
        raise UsageError("--workers and --realizations must be positive")
    first_nc = scen.chips_per_frame[0]
    base = Scenario(
        channel=scen.channel,
        rake=RakeConfig(scen.finger_fractions[0], first_nc, scen.processing_gains[0]),
        game=scen.game,
        mode="cdma" if first_nc == 1 else "uwb",
        n_realizations=n,
        master_seed=seed,
    )
    rows = sweep_gain(
        base, scen.processing_gains, scen.chips_per_frame, scen.finger_fractions,
        workers=workers, fractional_frames=args.fractional_frames or scen.fractional_frames,
    )
    cells = [r for r in rows if "note" not in r]
    for r in rows:
        if "note" in r:
            print(f"note: {r['note']}", file=sys.stderr)
    infeasible = [r for r in cells if math.isnan(r["closed_form_util_norm"])]
    for r in infeasible:
        r["closed_form_util_norm"] = INFEASIBLE
        r["rel_gap"] = INFEASIBLE
    write_output(render_csv(SIMULATE_COLUMNS, cells), args.out)

    failed = [r for r in cells if r["failed"]]
    for r in failed:
        print(f"ensemble failed: N={r['N']} Nc={r['Nc']} rho={r['rho']}: "
              f"{r['nonconverged']} of {r['n_real']} equilibria did not converge", file=sys.stderr)
    for r in infeasible:
        print(f"infeasible: N={r['N']} Nc={r['Nc']} rho={r['rho']}: closed form has no feasible equilibrium",
              file=sys.stderr)
    if failed:
        return EXIT_FAILED
    if infeasible:
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_loss(args) -> int:
    scen = load_scenario(args.scenario)
    grid = parse_grid(args.grid, {"N", "K", "L", "rho", "Nc"})
    uwb_nc = [nc for nc in scen.chips_per_frame if nc > 1] or [1]
    nc = _int_axis(grid.get("Nc", [max(uwb_nc)]), "Nc")
    if len(nc) != 1:
        raise UsageError("loss takes a single Nc")
    base = Scenario(scen.channel, RakeConfig(scen.finger_fractions[0], nc[0], scen.processing_gains[0]), scen.game)
    rows = sweep_loss(
        base,
        gains=_int_axis(grid.get("N", scen.processing_gains), "N"),
        users=_int_axis(grid.get("K", [scen.channel.num_users]), "K"),
        paths=_int_axis(grid.get("L", [scen.channel.num_paths]), "L"),
        finger_fractions=grid.get("rho", scen.finger_fractions),
        chips_per_frame=nc[0],
    )
    for r in rows:
        if not r["feasible"]:
            for c in ("epsilon", "loss_db", "exact_loss_db"):
                r[c] = INFEASIBLE
    write_output(render_csv(LOSS_COLUMNS, rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uwbpowergame",
        description="Energy-efficient power control for DS-CDMA and IR-UWB uplinks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="closed-form mu, nu, nu0, utilities and loss over a grid")
    p.add_argument("scenario")
    p.add_argument("--grid", help='e.g. "lambda_db=10,20;rho=0.05:1:0.05;beta=0,0.25,1"')
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo equilibria vs closed form")
    p.add_argument("scenario")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.add_argument("--workers", type=int, help=f"worker processes (default ${WORKERS_ENV} or 1)")
    p.add_argument("--seed", type=int, help="master seed (overrides [run] seed)")
    p.add_argument("--realizations", type=int, help="overrides [run] n_realizations")
    p.add_argument("--fractional-frames", action="store_true",
                   help="evaluate cells where N is not a multiple of Nc")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("loss", help="closed-form CDMA loss over N, K, L, rho")
    p.add_argument("scenario")
    p.add_argument("--grid", help='e.g. "N=256:1024:128;K=10,20;L=200,500;rho=0.2,1"')
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_loss)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (ScenarioError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleScenario as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
