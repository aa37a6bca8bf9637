"""Command-line front end.

    tailwave classify registry:klein_gordon_1
    tailwave kn registry:multipole_1 --kmax 8
    tailwave riemann registry:trivial --base 1,1 --n 64 --csv delta.csv
    tailwave solve registry:klein_gordon_1 --bump 0.25,0.25,1 --csv phi.csv
    tailwave tail registry:lambda_uv --bump 0.25,0.25,1 --bump-v 0.5,0.25,1
    tailwave registry --export-dir eqs/

Every command prints (or writes with --out) a JSON report with
"schema": "tailwave/1" that echoes the resolved configuration. Exit codes:
0 success, 2 invalid input, 3 numerical failure, 4 indeterminate result.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import expr as E
from . import registry as reg
from .equation import WaveEquation, classify_cpp, hp_verdict
from .errors import (CflViolation, IndeterminateTermination, TailwaveError, UnknownIdentifier,
                     UnstableCell)
from .export import build_report, dumps_report, emit_plot_data
from .expr import EvalPoint, Rect
from .grid import Grid, TimeGrid
from .kundt_newman import Status, build_sequence
from .riemann import evaluate_closed_form, riemann_closed_form_cpp, riemann_numeric, verify_adjoint
from .solver import CauchyData, CharacteristicData, convergence_run, solve
from .tails import measure_cauchy_tail, measure_goursat_tail
from .waveforms import Bump

log = logging.getLogger("tailwave")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_INDETERMINATE = 0, 2, 3, 4
COMMANDS = ("classify", "riemann", "solve", "kn", "tail", "registry")
MIN_CELLS = 16

DEFAULTS = {
    "n": 64, "nu": None, "nv": None, "nx": 600, "base": None, "bump": None, "bump_v": None,
    "bump_t": None, "kmax": 8, "tol": None, "out": None, "csv": None, "cauchy": False,
    "t1": 2.0, "x_range": [-3.0, 3.0], "convergence": False, "export_dir": None,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    equation: str | None = None
    n: int = 64
    nu: int | None = None
    nv: int | None = None
    nx: int = 600
    base: list | None = None
    bump: list | None = None
    bump_v: list | None = None
    bump_t: list | None = None
    kmax: int = 8
    tol: float | None = None
    out: str | None = None
    csv: str | None = None
    cauchy: bool = False
    t1: float = 2.0
    x_range: list = field(default_factory=lambda: [-3.0, 3.0])
    convergence: bool = False
    export_dir: str | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command != "registry" and not self.equation:
            raise ConfigError("an equation is required (path or registry:name)")
        for key in ("n", "nu", "nv", "nx"):
            val = getattr(self, key)
            if val is not None and (int(val) != val or val < MIN_CELLS):
                raise ConfigError(f"--{key} must be an integer >= {MIN_CELLS}")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("--tol must be positive")
        if self.kmax < 1:
            raise ConfigError("--kmax must be at least 1")
        for key in ("bump", "bump_v", "bump_t"):
            b = getattr(self, key)
            if b is not None and (len(b) != 3 or not b[1] > 0):
                raise ConfigError(f"--{key.replace('_', '-')} takes center,width,amplitude with width > 0")
        if self.base is not None and len(self.base) != 2:
            raise ConfigError("--base takes u,v")
        if len(self.x_range) != 2 or not self.x_range[0] < self.x_range[1]:
            raise ConfigError("--x-range takes lo,hi with lo < hi")
        return self


def _floats(text):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="tailwave", description=__doc__.split("\n\n")[0])
    top.add_argument("--version", action="version", version=f"tailwave {__version__}")
    sub = top.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def common(p, equation=True):
        if equation:
            p.add_argument("equation", nargs="?", default=S,
                           help="equation JSON file or registry:NAME")
            p.add_argument("--eq", dest="equation", default=S, help="same as the positional argument")
        p.add_argument("--config", default=None, help="JSON file of defaults; flags win")
        p.add_argument("--out", default=S, help="write the JSON report here instead of stdout")
        return p

    def grid_flags(p):
        p.add_argument("--n", type=int, default=S, help="cells per direction")
        p.add_argument("--nu", type=int, default=S)
        p.add_argument("--nv", type=int, default=S)
        p.add_argument("--csv", default=S, help="write the field as a CSV grid")

    def data_flags(p):
        p.add_argument("--bump", type=_floats, default=S, metavar="C,W,A",
                       help="cos^2 bump on the lower edge (Goursat) or phi at t0 (Cauchy)")
        p.add_argument("--bump-v", dest="bump_v", type=_floats, default=S, metavar="C,W,A",
                       help="cos^2 bump on the left edge (Goursat)")
        p.add_argument("--bump-t", dest="bump_t", type=_floats, default=S, metavar="C,W,A",
                       help="cos^2 bump for phi_t at t0 (Cauchy)")
        p.add_argument("--cauchy", action="store_true", default=S, help="Cauchy problem in (t, x)")
        p.add_argument("--t1", type=float, default=S, help="final time (Cauchy)")
        p.add_argument("--x-range", dest="x_range", type=_floats, default=S, metavar="LO,HI")
        p.add_argument("--nx", type=int, default=S, help="x cells (Cauchy); time steps follow CFL 1")

    p = common(sub.add_parser("classify", help="CPP test and Huygens status"))
    p.add_argument("--tol", type=float, default=S)
    p = common(sub.add_parser("riemann", help="numerical Riemann function"))
    grid_flags(p)
    p.add_argument("--base", type=_floats, default=S, metavar="U,V")
    p = common(sub.add_parser("solve", help="Goursat or Cauchy solve"))
    grid_flags(p)
    data_flags(p)
    p.add_argument("--convergence", action="store_true", default=S,
                   help="also solve on h/2 and h/4 and report the observed order")
    p = common(sub.add_parser("kn", help="substitution sequences and termination"))
    p.add_argument("--kmax", type=int, default=S)
    p.add_argument("--tol", type=float, default=S)
    p = common(sub.add_parser("tail", help="tail measurement for compact-support data"))
    grid_flags(p)
    data_flags(p)
    p.add_argument("--tol", type=float, default=S)
    p = common(sub.add_parser("registry", help="list or export registry equations"), equation=False)
    p.add_argument("--export-dir", dest="export_dir", default=S)
    return top


def resolve_config(argv) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config", None)
    merged = {k: v for k, v in DEFAULTS.items()}
    if config_path:
        try:
            doc = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        unknown = set(doc) - set(DEFAULTS) - {"equation"}
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        merged.update(doc)
    merged.update(args)
    merged = {k: v for k, v in merged.items() if k in RunConfig.__dataclass_fields__}
    return RunConfig(command=command, **merged).validate()


# ---------------------------------------------------------------- commands


def load_equation(ref: str):
    """(equation, working rectangle) from 'registry:NAME' or a JSON path."""
    if ref.startswith("registry:"):
        try:
            entry = reg.get(ref.split(":", 1)[1])
        except KeyError as exc:
            raise ConfigError(exc.args[0]) from exc
        return entry.eq, entry.work_rect
    path = Path(ref)
    if not path.is_file():
        raise ConfigError(f"equation file {ref} not found")
    try:
        eq = WaveEquation.load(path)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{ref}: not valid JSON ({exc})") from exc
    return eq, eq.domain


def _cells(cfg):
    return cfg.nu or cfg.n, cfg.nv or cfg.n


def _bump(spec):
    return None if spec is None else Bump(spec[0], spec[1], spec[2])


def _default_bump(lo, hi):
    # a quarter of the edge, centred at its first quarter: node-aligned when n is a multiple of 8
    length = hi - lo
    return Bump(lo + 0.25 * length, 0.25 * length, 1.0)


def _goursat_setup(cfg, eq, rect):
    nu, nv = _cells(cfg)
    grid = Grid(rect.u_lo, rect.u_hi, nu, rect.v_lo, rect.v_hi, nv)
    bu, bv = _bump(cfg.bump), _bump(cfg.bump_v)
    if bu is None and bv is None:
        bu = _default_bump(rect.u_lo, rect.u_hi)
    return grid, CharacteristicData.from_waveforms(bu, bv)


def _cauchy_setup(cfg):
    lo, hi = cfg.x_range
    grid = TimeGrid.with_cfl(0.0, cfg.t1, lo, hi, cfg.nx)
    b0, b1 = _bump(cfg.bump), _bump(cfg.bump_t)
    if b0 is None and b1 is None:
        b0 = Bump(0.5 * (lo + hi), 0.2, 1.0)
    return grid, CauchyData.from_waveforms(b0, b1)


def cmd_classify(cfg, eq, rect):
    kwargs = {} if cfg.tol is None else {"tol": cfg.tol}
    v = classify_cpp(eq, **kwargs)
    return {"is_cpp": v.is_cpp, "curl_free": v.curl_free, "w_balanced": v.w_balanced,
            "hp": hp_verdict(eq), "lambda": None if v.lam is None else E.to_string(v.lam),
            "checks": v.checks}, None


def cmd_riemann(cfg, eq, rect):
    base = EvalPoint(*(cfg.base or (rect.u_hi, rect.v_hi)))
    nu, nv = _cells(cfg)
    grid = Grid(rect.u_lo, base.u, nu, rect.v_lo, base.v, nv)
    fld = riemann_numeric(eq, base, grid)
    verdict = classify_cpp(eq)
    result = {"base": [base.u, base.v], "grid": grid.to_json(),
              "max_abs": float(np.max(np.abs(fld.values))),
              "max_abs_dev_from_one": float(np.max(np.abs(fld.values - 1.0))),
              "adjoint": verify_adjoint(eq, fld, cpp=verdict.is_cpp)}
    if verdict.is_cpp:
        uu, vv = grid.mesh()
        exact = evaluate_closed_form(riemann_closed_form_cpp(eq), uu, vv, base)
        result["closed_form_max_error"] = float(np.max(np.abs(fld.values - exact)))
    return result, fld


def cmd_solve(cfg, eq, rect):
    if cfg.cauchy:
        grid, data = _cauchy_setup(cfg)
    else:
        grid, data = _goursat_setup(cfg, eq, rect)
    if cfg.convergence:
        run = convergence_run(eq, data, grid)
        fld = run.fields[0]
        conv = {"order": run.order, "diffs": list(run.diffs)}
    else:
        fld = solve(eq, data, grid)
        conv = None
    result = {"problem": "cauchy" if cfg.cauchy else "goursat", "grid": grid.to_json(),
              "sup_total": fld.sup(), "convergence": conv}
    return result, fld


def cmd_kn(cfg, eq, rect):
    kwargs = {} if cfg.tol is None else {"tol": cfg.tol}
    seq = build_sequence(eq, k_max=cfg.kmax, **kwargs)
    return seq.to_json(), None


def cmd_tail(cfg, eq, rect):
    if cfg.cauchy:
        grid, data = _cauchy_setup(cfg)
        rep = measure_cauchy_tail(eq, data, grid, tol=cfg.tol)
    else:
        grid, data = _goursat_setup(cfg, eq, rect)
        rep = measure_goursat_tail(eq, data, grid, tol=cfg.tol)
    result = rep.to_json()
    result["grid"] = grid.to_json()
    return result, rep.field


def cmd_registry(cfg):
    entries = [e.summary() for e in reg.registry()]
    if cfg.export_dir:
        out = Path(cfg.export_dir)
        out.mkdir(parents=True, exist_ok=True)
        for e in reg.registry():
            e.eq.dump(out / f"{e.name}.json")
    return {"entries": entries}


HANDLERS = {"classify": cmd_classify, "riemann": cmd_riemann, "solve": cmd_solve,
            "kn": cmd_kn, "tail": cmd_tail}


def run(cfg: RunConfig):
    """Execute a validated config; returns (exit code, report dict)."""
    log.debug("resolved config %s", cfg)
    status = EXIT_OK
    if cfg.command == "registry":
        result = cmd_registry(cfg)
    else:
        eq, rect = load_equation(cfg.equation)
        try:
            result, fld = HANDLERS[cfg.command](cfg, eq, rect)
        except IndeterminateTermination as exc:
            result, fld = {"status": Status.INDETERMINATE.value, "reason": str(exc)}, None
            status = EXIT_INDETERMINATE
        if cfg.csv is not None:
            if fld is None:
                raise ConfigError(f"command {cfg.command} produces no field for --csv")
            emit_plot_data(fld, cfg.csv)
            result["csv"] = cfg.csv
    return status, build_report(cfg.command, asdict(cfg), result, __version__)


def _setup_logging():
    level = os.environ.get("TAILWAVE_LOG")
    if level:
        logging.basicConfig(stream=sys.stderr, level=level.upper(),
                            format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    try:
        cfg = resolve_config(argv)
        status, report = run(cfg)
    except SystemExit as exc:  # argparse
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    except (UnstableCell, CflViolation) as exc:
        print(f"tailwave: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except IndeterminateTermination as exc:
        print(f"tailwave: indeterminate: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except (ConfigError, TailwaveError, SyntaxError, UnknownIdentifier, ValueError) as exc:
        print(f"tailwave: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"tailwave: I/O error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = dumps_report(report)
    if cfg.out:
        try:
            Path(cfg.out).write_text(text)
        except OSError as exc:
            print(f"tailwave: I/O error: {exc}", file=sys.stderr)
            return EXIT_INVALID
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
