"""``fraclab`` command line.

Exit codes: 0 success, 2 usage / parse / config error, 3 domain error,
4 numerical divergence.  Structured results go to stdout as JSON, tables and
fields as CSV; ``--out-dir`` additionally writes them to files together with a
``manifest.json``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from . import powerlaw as pl
from . import solutions, solver, symmetry
from .errors import ConfigError, DivergenceError, DomainError, ParseError
from .numerics import leibniz_partial_sum

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_DIVERGED = 4

CONFIG_KEYS = {
    "alpha", "p", "x_lo", "x_hi", "t_final", "nx", "nt", "mode",
    "u_star", "levels", "coefficient_lag",
}
REQUIRED_KEYS = {"alpha", "p", "x_lo", "x_hi", "t_final", "nx", "nt", "mode"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: UsageError: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True)


# --- config -----------------------------------------------------------------


def load_config(path: str | Path) -> tuple[solver.SolverConfig, int]:
    """Read a solver config JSON; returns ``(config, levels)``."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = sorted(REQUIRED_KEYS - set(raw))
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    levels = raw.pop("levels", 4)
    if not isinstance(levels, int) or levels < 3:
        raise ConfigError("levels must be an integer >= 3")
    if "u_star" in raw:
        if not isinstance(raw["u_star"], str):
            raise ConfigError("u_star must be a power-law expression string")
        try:
            raw["u_star"] = pl.parse(raw["u_star"])
        except ParseError as exc:
            raise ConfigError(f"u_star: {exc}") from exc
    try:
        return solver.SolverConfig(**raw), levels
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _config_params(cfg: solver.SolverConfig, levels: int | None = None) -> dict:
    d = {
        "alpha": cfg.alpha, "p": cfg.p, "x_lo": cfg.x_lo, "x_hi": cfg.x_hi,
        "t_final": cfg.t_final, "nx": cfg.nx, "nt": cfg.nt, "mode": cfg.mode,
        "coefficient_lag": cfg.coefficient_lag,
    }
    if cfg.u_star is not None:
        d["u_star"] = pl.render(cfg.u_star)
    if levels is not None:
        d["levels"] = levels
    return d


# --- outputs ----------------------------------------------------------------


class _Run:
    """Collects written files and emits the manifest."""

    def __init__(self, name: str, out_dir: str | None):
        self.name = name
        self.out_dir = Path(out_dir) if out_dir else None
        self.outputs: list[str] = []
        self.start = time.perf_counter()

    def write(self, filename: str, text: str) -> None:
        if self.out_dir is None:
            return
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / filename
        path.write_text(text)
        self.outputs.append(str(path))

    def finish(self, params: dict) -> None:
        if self.out_dir is None:
            return
        manifest = {
            "subcommand": self.name,
            "parameters": params,
            "outputs": self.outputs,
            "duration_s": time.perf_counter() - self.start,
            "version": __version__,
        }
        (self.out_dir / "manifest.json").write_text(_dumps(manifest) + "\n")


# --- subcommands ------------------------------------------------------------


def cmd_caputo(args) -> int:
    run = _Run("caputo", args.out_dir)
    result = pl.caputo_dt(pl.parse(args.expr), args.alpha, args.mode)
    text = pl.render(result)
    print(text)
    run.write("caputo.txt", text + "\n")
    run.finish({"expr": args.expr, "alpha": args.alpha, "mode": args.mode})
    return EXIT_OK


def cmd_verify(args) -> int:
    param = args.p if args.equation == symmetry.DIFFUSION else args.q
    name = "p" if args.equation == symmetry.DIFFUSION else "q"
    if param is None:
        raise ConfigError(f"--{name} is required for equation {args.equation}")
    run = _Run("verify", args.out_dir)
    sol = solutions.solve(args.equation, param, args.alpha)
    doc = sol.to_json()
    text = _dumps(doc)
    print(text)
    print(
        f"matches_paper: {str(sol.matches_paper).lower()} "
        f"(computed {sol.constant!r}, printed formula {sol.paper_constant!r})",
        file=sys.stderr,
    )
    run.write("verify.json", text + "\n")
    run.finish({"equation": args.equation, name: param, "alpha": args.alpha})
    return EXIT_OK if sol.certified else EXIT_DOMAIN


PRESETS = {
    "X1": lambda a: symmetry.Generator.X1(a.alpha),
    "X2": lambda a: symmetry.Generator.X2(a.p),
    "Y1": lambda a: symmetry.Generator.Y1(a.q),
    "Y2": lambda a: symmetry.Generator.Y2(a.q, a.alpha),
}


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ConfigError(f"missing --{', --'.join(missing)}")


def _generator_from_args(args) -> symmetry.Generator:
    if args.preset:
        _need(args, *{"X1": ("alpha",), "X2": ("p",), "Y1": ("q",), "Y2": ("q", "alpha")}[args.preset])
        return PRESETS[args.preset](args)
    if args.equation == symmetry.DIFFUSION:
        _need(args, "p", "alpha")
        c = [args.c1 or 0.0, args.c2 or 0.0, args.c3 or 0.0]
        return symmetry.Generator.diffusion(*c, p=args.p, alpha=args.alpha)
    if args.equation == symmetry.THIRD_ORDER:
        _need(args, "q", "alpha")
        c = [args.c1 or 0.0, args.c2 or 0.0, args.c3 or 0.0, args.c4 or 0.0]
        return symmetry.Generator.third_order(*c, q=args.q, alpha=args.alpha)
    return symmetry.Generator(
        **{k: getattr(args, k) or 0.0 for k in symmetry.COEFFS}
    )


def _try(fn, *a):
    try:
        return fn(*a), None
    except DomainError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def cmd_bvp_check(args) -> int:
    run = _Run("bvp-check", args.out_dir)
    gen = _generator_from_args(args)
    initial = symmetry.initial_line_invariance(gen)
    boundary = symmetry.boundary_line_invariance(gen)
    required = list(dict.fromkeys(initial.required_zero + boundary.required_zero))
    # after imposing the constraints, which data does the generator allow?
    reduced, why = _try(gen.zeroed, required)
    exps = {}
    for side in (symmetry.BOUNDARY_X0, symmetry.INITIAL_T0):
        value, side_why = (None, why) if reduced is None else _try(
            symmetry.boundary_condition_exponent, reduced, side
        )
        exps[side] = {"exponent": value, "reason": side_why}
    form, form_why = (None, why) if reduced is None else _try(symmetry.similarity_form, reduced)
    doc = {
        "generator": gen.as_dict(),
        "constraints": {
            "initial_line": initial.to_json(),
            "boundary_line": boundary.to_json(),
            "required_zero": required,
            "admissible": not required,
        },
        "boundary_exponents": exps,
        "similarity_form": form.to_json() if form else None,
        "similarity_form_reason": form_why,
    }
    text = _dumps(doc)
    print(text)
    run.write("bvp_check.json", text + "\n")
    params = {k: getattr(args, k) for k in ("equation", "preset", "p", "q", "alpha")}
    params.update({k: getattr(args, k) for k in ("c1", "c2", "c3", "c4", *symmetry.COEFFS)})
    run.finish({k: v for k, v in params.items() if v is not None})
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg, _ = load_config(args.config)
    run = _Run("solve", args.out_dir)
    field = solver.solve(cfg)
    summary = {
        "max_error": field.max_error,
        "l2_error": field.l2_error,
        "within_data_bounds": field.within_data_bounds,
    }
    text = _dumps(summary)
    print(text)
    run.write("field.csv", field.to_csv())
    run.write("summary.json", text + "\n")
    run.finish({"config": str(args.config), **_config_params(cfg)})
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg, levels = load_config(args.config)
    if args.levels is not None:
        levels = args.levels
    run = _Run("converge", args.out_dir)
    rows = solver.convergence_study(cfg, levels)
    table = solver.convergence_csv(rows)
    sys.stdout.write(table)
    run.write("convergence.csv", table)
    run.finish({"config": str(args.config), **_config_params(cfg, levels)})
    return EXIT_OK


def cmd_leibniz(args) -> int:
    if args.n_terms < 1:
        raise ConfigError("--n-terms must be positive")
    run = _Run("leibniz", args.out_dir)
    exact = pl.rl_dt(pl.Monomial(1.0, 0.0, args.a + args.b), args.alpha)
    closed = float(exact(1.0, args.t))
    sums = [
        leibniz_partial_sum(args.a, args.b, args.alpha, n, args.t)
        for n in range(1, args.n_terms + 1)
    ]
    doc = {
        "a_exp": args.a,
        "b_exp": args.b,
        "alpha": args.alpha,
        "t": args.t,
        "closed_form": closed,
        "partial_sum": sums[-1],
        "truncations": [
            {"n_terms": n, "partial_sum": s, "abs_error": abs(s - closed)}
            for n, s in enumerate(sums, start=1)
        ],
    }
    text = _dumps(doc)
    print(text)
    run.write("leibniz.json", text + "\n")
    run.finish({"a": args.a, "b": args.b, "alpha": args.alpha, "n_terms": args.n_terms, "t": args.t})
    return EXIT_OK


# --- wiring -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fraclab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"fraclab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_, aliases=()):
        p = sub.add_parser(name, help=help_, aliases=list(aliases))
        p.add_argument("--out-dir", help="also write outputs and manifest.json here")
        p.set_defaults(func=fn)
        return p

    p = add("caputo", cmd_caputo, "Caputo derivative of a power-law expression")
    p.add_argument("--expr", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--mode", choices=pl.MODES, default=pl.STRICT)

    p = add("verify", cmd_verify, "similarity constant with residual certificate")
    p.add_argument("--equation", choices=(symmetry.DIFFUSION, symmetry.THIRD_ORDER), required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--alpha", type=float, required=True)

    p = add("bvp-check", cmd_bvp_check, "boundary/initial invariance of a generator", ("bvp_check",))
    p.add_argument("--equation", choices=(symmetry.DIFFUSION, symmetry.THIRD_ORDER))
    p.add_argument("--preset", choices=sorted(PRESETS))
    for c in ("c1", "c2", "c3", "c4", *symmetry.COEFFS):
        p.add_argument(f"--{c}", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--alpha", type=float)

    p = add("solve", cmd_solve, "run the solver from a JSON config")
    p.add_argument("config")

    p = add("converge", cmd_converge, "refinement study from a JSON config")
    p.add_argument("config")
    p.add_argument("--levels", type=int)

    p = add("leibniz", cmd_leibniz, "generalized Leibniz partial sums for t^a * t^b")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n-terms", type=int, default=4)
    p.add_argument("--t", type=float, default=1.0)
    return ap


def _fail(code: int, exc: Exception) -> int:
    print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ConfigError) as exc:
        return _fail(EXIT_USAGE, exc)
    except DomainError as exc:
        return _fail(EXIT_DOMAIN, exc)
    except DivergenceError as exc:
        return _fail(EXIT_DIVERGED, exc)


if __name__ == "__main__":
    sys.exit(main())
