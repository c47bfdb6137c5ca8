"""Command-line entry point: ``fracrearr <command> [options]``.

Exit codes: 0 success, 1 failed check or (with ``--strict``) non-convergence,
2 configuration or input error, 3 brute-force budget exceeded.
"""

from __future__ import annotations

import argparse
import datetime
import logging
import socket
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from ._accel import backend_name
from .config import ConfigError, RunConfig, load_config, parse_config
from .grid import GridError, Interval, build_grid, snap_mass
from .maximizer import (
    SWEEP_COLUMNS,
    AscentOptions,
    AscentResult,
    BudgetExceeded,
    ascend,
    brute_force,
    sweep,
    two_component_experiment,
    verify,
)
from .operator import assemble, dump_matrix_csv, energy
from .solver import solve_direct, solve_iterative
from .validation import run_suites

log = logging.getLogger("fracrearr")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3
COMMANDS = ("validate", "solve", "maximize", "brute", "sweep", "twoball")


class InputError(ValueError):
    pass


def _metadata(args) -> dict:
    return {
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "hostname": socket.gethostname(),
        "version": __version__,
        "backend": backend_name(),
        "threads": args.threads,
    }


def _document(command, cfg: RunConfig, args, **body) -> dict:
    doc = {"schema_version": io.SCHEMA_VERSION, "command": command, "config": cfg.to_dict()}
    doc.update(body)
    doc["metadata"] = _metadata(args)
    return doc


def _out_dir(cfg: RunConfig, args) -> Path:
    out = Path(args.out or cfg.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _single_s(cfg: RunConfig) -> float:
    if isinstance(cfg.s, list):
        if len(cfg.s) != 1:
            raise ConfigError("s: this command needs a single exponent")
        return cfg.s[0]
    return cfg.s


def _options(cfg: RunConfig, args) -> AscentOptions:
    return AscentOptions(
        init=cfg.init,
        max_iter=cfg.max_iter,
        restarts=cfg.restarts,
        seed=cfg.seed,
        solver=cfg.solver,
        solver_tol=cfg.solver_tol,
        threads=args.threads,
    )


def result_dict(res: AscentResult, s: float, h: float) -> dict:
    return {
        "method": res.method,
        "s": s,
        "n": int(res.f_hat.values.shape[0]),
        "h": h,
        "k": res.k,
        "beta_eff": res.k * h,
        "energy": res.energy,
        "alpha": res.alpha,
        "gamma": res.gamma,
        "alpha_mid": res.alpha_mid,
        "iterations": res.iterations,
        "restarts_used": res.restarts_used,
        "converged": res.converged,
        "revisited": res.revisited,
        "bang_bang": res.bang_bang,
        "separated": res.separated,
        "tie_cells": res.tie_cells,
        "obstacle_residual_inf": res.obstacle_residual_inf,
        "J_value": res.J_value,
        "selected": [int(i) for i in res.selected],
        "trace": res.trace,
    }


def _write_result_files(out: Path, grid, res: AscentResult) -> None:
    io.write_field(out / "u.csv", grid.cells, res.u_hat, "u")
    io.write_field(out / "f.csv", grid.cells, res.f_hat.values, "f")
    io.write_trace(out / "trace.csv", res.trace)


def _summary(res: AscentResult) -> str:
    return (
        f"energy={io.fmt(res.energy)} alpha_mid={res.alpha_mid:.6g} "
        f"iterations={res.iterations} residual={res.obstacle_residual_inf:.3e} ties={res.tie_cells}"
    )


# ---------------------------------------------------------------- commands


def cmd_validate(cfg: RunConfig, args) -> int:
    grid = build_grid(cfg.domain, cfg.h)
    checks = run_suites(grid, cfg.s_values, cfg.seed)
    width = max(len(c.name) for c in checks)
    for c in checks:
        status = "PASS" if c.passed else ("FAIL" if c.hard else "WARN")
        print(f"{c.name:<{width}}  {status}  {c.detail}")
    out = _out_dir(cfg, args)
    io.write_json(out / "result.json", _document("validate", cfg, args, checks=[c.as_dict() for c in checks]))
    return EXIT_OK if all(c.passed for c in checks if c.hard) else EXIT_FAIL


def _load_rhs(cfg: RunConfig, n: int) -> np.ndarray:
    if cfg.f == "ones":
        return np.ones(n)
    if cfg.f == "zeros":
        return np.zeros(n)
    try:
        return io.read_field(cfg.f, n)
    except OSError as exc:
        raise InputError(f"cannot read f from {cfg.f}: {exc}") from exc


def cmd_solve(cfg: RunConfig, args) -> int:
    s = _single_s(cfg)
    grid = build_grid(cfg.domain, cfg.h)
    op = assemble(grid, s)
    f = _load_rhs(cfg, grid.n)
    if cfg.solver == "direct":
        rep = solve_direct(op, f)
    else:
        rep = solve_iterative(op, f, tol=cfg.solver_tol)
    x = grid.cells
    mid = 0.5 * (grid.intervals[0].left + grid.intervals[-1].right)
    c = int(np.argmin(np.abs(x - mid)))
    summary = {
        "n": grid.n,
        "h": grid.h,
        "s": s,
        "energy": energy(op, rep.u),
        "residual_inf": rep.residual_inf,
        "u_center": float(rep.u[c]),
        "x_center": float(x[c]),
        "u_max": float(rep.u.max()),
    }
    out = _out_dir(cfg, args)
    if args.dump_matrix:
        dump_matrix_csv(op, out / "matrix.csv")
    io.write_field(out / "u.csv", x, rep.u, "u")
    io.write_json(out / "result.json", _document("solve", cfg, args, solve=summary))
    print(f"energy={io.fmt(summary['energy'])} u_center={summary['u_center']:.6g} residual={rep.residual_inf:.3e}")
    return EXIT_OK


def _maximize_like(command, cfg: RunConfig, args) -> int:
    s = _single_s(cfg)
    grid = build_grid(cfg.domain, cfg.h)
    k, _ = snap_mass(grid, cfg.beta)
    op = assemble(grid, s)
    if command == "brute":
        res = brute_force(op, k, limit=cfg.brute_limit, threads=args.threads)
    else:
        res = ascend(op, k, _options(cfg, args))
    ver = verify(op, res)
    out = _out_dir(cfg, args)
    if args.dump_matrix:
        dump_matrix_csv(op, out / "matrix.csv")
    _write_result_files(out, grid, res)
    doc = _document(command, cfg, args, result=result_dict(res, s, grid.h), verification=ver.as_dict())
    io.write_json(out / "result.json", doc)
    print(_summary(res))
    if args.strict and not (res.converged and ver.passed):
        return EXIT_FAIL
    return EXIT_OK


def cmd_maximize(cfg, args):
    return _maximize_like("maximize", cfg, args)


def cmd_brute(cfg, args):
    return _maximize_like("brute", cfg, args)


def cmd_sweep(cfg: RunConfig, args) -> int:
    grid = build_grid(cfg.domain, cfg.h)
    rows = sweep(grid, cfg.s_values, cfg.beta, _options(cfg, args))
    out = _out_dir(cfg, args)
    io.write_table(out / "sweep.csv", rows, SWEEP_COLUMNS)
    io.write_json(out / "result.json", _document("sweep", cfg, args, rows=rows))
    for r in rows:
        if r["error"]:
            print(f"s={r['s']}: error {r['error']}")
        else:
            print(f"s={r['s']}: energy={io.fmt(r['energy'])} iterations={r['iterations']} ties={r['tie_cells']}")
    if args.strict and any(r["error"] for r in rows):
        return EXIT_FAIL
    return EXIT_OK


def cmd_twoball(cfg: RunConfig, args) -> int:
    s = _single_s(cfg)
    if len(cfg.domain) != 2:
        raise ConfigError("domain: twoball needs exactly two intervals")
    (a, b), (c, d) = sorted(cfg.domain)
    grid = build_grid(cfg.domain, cfg.h)
    k, _ = snap_mass(grid, cfg.beta)
    rep = two_component_experiment(Interval(a, b), Interval(c, d), cfg.h, s, k, _options(cfg, args))
    res = rep.result
    ver = verify(assemble(rep.grid, s), res)
    out = _out_dir(cfg, args)
    _write_result_files(out, rep.grid, res)
    conc = {
        "fractions": rep.fractions,
        "concentration": rep.concentration,
        "energy": rep.energy,
        "J_hat": rep.J_hat,
        "J_copy": rep.J_copy,
        "concentrated": rep.concentrated,
        "copy_lowers_J": rep.copy_lowers_J,
    }
    doc = _document(
        "twoball", cfg, args, result=result_dict(res, s, cfg.h), verification=ver.as_dict(), concentration=conc
    )
    io.write_json(out / "result.json", doc)
    print(_summary(res))
    print(
        f"component fractions={[round(x, 4) for x in rep.fractions]} "
        f"J(u_hat)={rep.J_hat:.6g} J(copy)={rep.J_copy:.6g}"
    )
    if not (rep.concentrated and rep.copy_lowers_J):
        log.warning("concentration heuristic did not manifest for this configuration")
    if args.strict and not (res.converged and ver.passed):
        return EXIT_FAIL
    return EXIT_OK


HANDLERS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "maximize": cmd_maximize,
    "brute": cmd_brute,
    "sweep": cmd_sweep,
    "twoball": cmd_twoball,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracrearr", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", metavar="PATH", help="JSON run configuration (defaults are used when omitted)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--strict", action="store_true", help="exit 1 on non-convergence or a failed verification")
    p.add_argument("--threads", type=int, default=1, metavar="N", help="worker threads for restarts/brute force")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
    p.add_argument("--dump-matrix", action="store_true", help="also write the operator matrix as CSV")
    p.add_argument("--f", dest="f", metavar="SOURCE", help="solve: right-hand side, 'ones', 'zeros' or a CSV path")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        cfg = load_config(args.config) if args.config else parse_config({})
        if args.seed is not None:
            cfg.seed = args.seed
        if args.f is not None:
            cfg.f = args.f
        return HANDLERS[args.command](cfg, args)
    except (ConfigError, GridError, InputError, io.FieldFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
