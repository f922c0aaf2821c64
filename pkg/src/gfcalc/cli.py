"""Command-line front end.

    gfc kernel   --alpha 0.5 --a 0.5,0.25,0.25 --extend-to 2
    gfc basis    --n-max 7 --grid 501
    gfc solve    config.json
    gfc converge --case x15 --n-list 2,4,6,8,10

Exit codes: 0 success, 2 invalid input, 3 kernel or basis construction
failure, 4 singular boundary row, 5 quadrature failure.
"""

import argparse
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .basis import build
from .jacobi import N_MAX, ConditioningError, JacobiParams, QuadratureError
from .kernels import build_pair
from .operators import Side, monomial_gfd
from .series import FracPowerSeries, TermLimitError, from_json
from .solver import (
    BVPSpec,
    TauSingularityError,
    convergence_study,
    loglog_slope,
    mse,
    rows_to_csv,
    solve,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CONSTRUCTION = 3
EXIT_TAU = 4
EXIT_QUADRATURE = 5

OUTPUT_ENV = "GFC_OUTPUT_DIR"
DEFAULT_A = "0.5,0.25,0.25"


class ValidationError(ValueError):
    pass


# -- helpers ------------------------------------------------------------------


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _provenance(cfg: dict, residual_bound: float) -> str:
    return f"config_sha256={_config_hash(cfg)} kernel_residual_bound={_fmt(residual_bound)}"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _output_dir(flag: str | None, configured: str | None = None) -> Path:
    """--output-dir, then $GFC_OUTPUT_DIR, then the config value, then '.'."""
    return Path(flag or os.environ.get(OUTPUT_ENV) or configured or ".")


def _csv_table(header: list[str], columns: list[np.ndarray], comment: str) -> str:
    buf = io.StringIO()
    buf.write(f"# {comment}\n")
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _parse_floats(text: str, name: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"{name} must be a comma-separated list of numbers") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise ValidationError(f"{name} must contain finite numbers")
    return vals


def _parse_ints(text: str, name: str) -> list[int]:
    vals = _parse_floats(text, name)
    if any(v != int(v) for v in vals):
        raise ValidationError(f"{name} must contain integers")
    return [int(v) for v in vals]


def _kernel_config(alpha, a, extend_to) -> dict:
    if not isinstance(alpha, (int, float)) or not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
    if not a or not all(isinstance(v, (int, float)) and math.isfinite(v) for v in a):
        raise ValidationError("a must be a non-empty list of finite numbers")
    if abs(a[0]) < 1e-300:
        raise ValidationError("a_0 must be non-zero")
    if extend_to is None:
        extend_to = len(a) - 1
    if int(extend_to) != extend_to or extend_to < len(a) - 1:
        raise ValidationError(f"extend_to must be an integer >= deg(a) = {len(a) - 1}")
    return {"alpha": float(alpha), "a": [float(v) for v in a], "extend_to": int(extend_to)}


def _build_kernel(kcfg: dict):
    try:
        return build_pair(kcfg["a"], kcfg["alpha"], kcfg["extend_to"])
    except (ValueError, ArithmeticError, TermLimitError) as exc:
        raise _ConstructionError(str(exc)) from exc


class _ConstructionError(RuntimeError):
    pass


# -- commands -------------------------------------------------------------------


def cmd_kernel(args) -> int:
    kcfg = _kernel_config(args.alpha, _parse_floats(args.a, "--a"), args.extend_to)
    pair = _build_kernel(kcfg)
    text = json.dumps(pair.to_dict(), indent=2) + "\n"
    sys.stdout.write(text)
    if args.output_dir or os.environ.get(OUTPUT_ENV):
        _atomic_write(_output_dir(args.output_dir) / "kernel.json", text)
    return EXIT_OK


def cmd_basis(args) -> int:
    kcfg = _kernel_config(args.alpha, _parse_floats(args.a, "--a"), args.extend_to)
    if args.grid < 2:
        raise ValidationError("--grid must be at least 2")
    if not 0 <= args.n_max <= N_MAX:
        raise ValidationError(f"--n-max must lie in [0, {N_MAX}]")
    try:
        params = JacobiParams(args.jacobi_alpha, args.jacobi_beta)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    pair = _build_kernel(kcfg)
    try:
        basis = build(pair, params, args.n_max, Side(args.side))
    except (ConditioningError, TermLimitError, ArithmeticError) as exc:
        raise _ConstructionError(str(exc)) from exc
    x = np.linspace(0.0, 1.0, args.grid)
    V = basis.sample(x)
    cfg = {
        "command": "basis",
        "kernel": kcfg,
        "n_max": args.n_max,
        "grid": args.grid,
        "jacobi": [params.alpha, params.beta],
        "side": args.side,
    }
    header = ["x"] + [f"phi_{n}" for n in range(args.n_max + 1)]
    text = _csv_table(header, [x] + [V[:, n] for n in range(V.shape[1])], _provenance(cfg, pair.residual_bound))
    path = _output_dir(args.output_dir) / "basis.csv"
    _atomic_write(path, text)
    print(f"wrote {path}")
    return EXIT_OK


def _load_config(path: str) -> tuple[dict, Path]:
    p = Path(path)
    try:
        cfg = json.loads(p.read_text())
    except FileNotFoundError:
        raise ValidationError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ValidationError("config must be a JSON object")
    return cfg, p.parent


def _section(cfg: dict, name: str, required: bool = True) -> dict:
    sec = cfg.get(name)
    if sec is None and not required:
        return {}
    if not isinstance(sec, dict):
        raise ValidationError(f"config section '{name}' must be an object")
    return sec


def _rhs_from_config(problem: dict, base: Path, pair) -> tuple[FracPowerSeries, float | None]:
    """Right-hand side series and the exponent p of the exact solution, if known."""
    rhs = problem.get("rhs")
    if not isinstance(rhs, dict) or len(rhs) != 1:
        raise ValidationError("problem.rhs must be an object with exactly one key")
    (kind, body), = rhs.items()
    if kind == "monomial_gfd":
        p = body.get("p") if isinstance(body, dict) else None
        if not isinstance(p, (int, float)) or not p > pair.alpha - 1:
            raise ValidationError("monomial_gfd.p must be a number above alpha - 1")
        return monomial_gfd(pair.a_coeffs, pair.alpha, float(p)), float(p)
    if kind in ("series_file", "series"):
        if kind == "series_file":
            if not isinstance(body, str):
                raise ValidationError("series_file must be a path")
            path = (base / body) if not Path(body).is_absolute() else Path(body)
            if not path.exists():
                raise ValidationError(f"series file {path} not found")
            try:
                body = json.loads(path.read_text())
            except json.JSONDecodeError as exc:
                raise ValidationError(f"series file is not valid JSON: {exc}") from None
        try:
            series = from_json(body)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"invalid series: {exc}") from None
        if series.reflected:
            raise ValidationError("right-hand side series must not be reflected")
        return series, None
    raise ValidationError(f"unknown rhs kind {kind!r}")


def cmd_solve(args) -> int:
    cfg, base = _load_config(args.config)
    k = _section(cfg, "kernel")
    problem = _section(cfg, "problem")
    solver_cfg = _section(cfg, "solver")
    out_cfg = _section(cfg, "output", required=False)

    kcfg = _kernel_config(k.get("alpha"), k.get("a"), k.get("extend_to"))
    N = solver_cfg.get("N")
    if not isinstance(N, int) or isinstance(N, bool) or N < 1:
        raise ValidationError("solver.N must be a positive integer")
    if N - 1 > N_MAX:
        raise ValidationError(f"solver.N must not exceed {N_MAX + 1}")
    boundary = problem.get("boundary", 1.0)
    if not isinstance(boundary, (int, float)) or not math.isfinite(boundary):
        raise ValidationError("problem.boundary must be a finite number")
    try:
        params = JacobiParams(float(solver_cfg.get("jacobi_alpha", 0.0)), float(solver_cfg.get("jacobi_beta", 0.0)))
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc)) from None
    Q = solver_cfg.get("quadrature")
    if Q is not None and (not isinstance(Q, int) or Q < 2):
        raise ValidationError("solver.quadrature must be an integer >= 2")
    projection = solver_cfg.get("projection", "closed_form")
    if projection not in ("closed_form", "quadrature"):
        raise ValidationError("solver.projection must be 'closed_form' or 'quadrature'")
    grid = out_cfg.get("grid", 1001)
    if not isinstance(grid, int) or grid < 2:
        raise ValidationError("output.grid must be an integer >= 2")

    pair = _build_kernel(kcfg)
    rhs, p = _rhs_from_config(problem, base, pair)
    if projection == "quadrature":
        rhs = rhs.evaluate
    spec = BVPSpec(pair, rhs, float(boundary), N, params, Q)
    try:
        sol = solve(spec, strict=True)
    except TauSingularityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TAU
    except (ConditioningError, TermLimitError) as exc:
        raise _ConstructionError(str(exc)) from exc

    out = _output_dir(None, out_cfg.get("dir"))
    comment = _provenance(cfg, pair.residual_bound)
    _atomic_write(out / "solution.json", sol.to_json() + "\n")
    x = np.linspace(0.0, 1.0, grid)
    _atomic_write(out / "solution.csv", _csv_table(["x", "f"], [x, sol.evaluate(x)], comment))
    print(f"wrote {out / 'solution.json'} and {out / 'solution.csv'}")
    if p is not None and boundary == 1.0:
        print(f"mse {_fmt(mse(sol, lambda t: t ** p))}")
    return EXIT_OK


def cmd_converge(args) -> int:
    kcfg = _kernel_config(args.alpha, _parse_floats(args.a, "--a"), args.extend_to)
    n_list = _parse_ints(args.n_list, "--n-list")
    if n_list != sorted(set(n_list)) or n_list[0] < 1:
        raise ValidationError("--n-list must be strictly ascending positive integers")
    if n_list[-1] - 1 > N_MAX:
        raise ValidationError(f"--n-list entries must not exceed {N_MAX + 1}")
    pair = _build_kernel(kcfg)
    try:
        rows = convergence_study(args.case, n_list, kernel=pair)
    except TauSingularityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TAU
    cfg = {"command": "converge", "case": args.case, "n_list": n_list, "kernel": kcfg}
    path = _output_dir(args.output_dir) / f"converge_{args.case}.csv"
    _atomic_write(path, rows_to_csv(rows, _provenance(cfg, pair.residual_bound)))
    for r in rows:
        print(f"N={r.N} mse={_fmt(r.mse)}")
    slope = loglog_slope(rows)
    if slope is not None:
        print(f"log-log slope {slope:.6g}")
    print(f"wrote {path}")
    return EXIT_OK


# -- entry point ----------------------------------------------------------------


def _add_kernel_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.5, help="kernel order in (0, 1)")
    p.add_argument("--a", default=DEFAULT_A, help="comma-separated coefficients of k's analytic factor")
    p.add_argument("--extend-to", type=int, default=None, help="truncation order M of the associate series")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gfc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="construct a Sonine pair and print its certificate")
    _add_kernel_flags(p)
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("basis", help="sample Jacobi convolution series to CSV")
    _add_kernel_flags(p)
    p.add_argument("--n-max", type=int, default=7)
    p.add_argument("--grid", type=int, default=501)
    p.add_argument("--jacobi-alpha", type=float, default=0.0)
    p.add_argument("--jacobi-beta", type=float, default=0.0)
    p.add_argument("--side", choices=["left", "right"], default="left")
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("solve", help="solve a boundary value problem from a JSON config")
    p.add_argument("config")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("converge", help="MSE against N for a manufactured solution")
    _add_kernel_flags(p)
    p.add_argument("--case", choices=["x15", "x155"], default="x15")
    p.add_argument("--n-list", default="2,4,6,8,10")
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=cmd_converge)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except _ConstructionError as exc:
        print(f"error: construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except QuadratureError as exc:
        print(f"error: quadrature failed: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE


if __name__ == "__main__":
    sys.exit(main())
