"""Command-line front end.

Subcommands write CSV (``#`` metadata lines, then a header row)::

    nrespectra spectrum      --builtin f4 --M 30
    nrespectra convergence   --builtin f3 --M-sweep 10:50:5 --lambda 1 --lambda -1
    nrespectra compare       --builtin f2 --M 30
    nrespectra epsilon-study --builtin f3 --M 20 --eps 1e-1,1e-2,1e-3

Exit status: 0 on success, 1 on numerical failure, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    AssemblyError,
    EigenSolverError,
    ExprEvalError,
    InvalidParameterError,
    NreError,
    UnderdeterminedError,
    UnsupportedComparisonError,
)
from .expr import Constant
from .model import LinearProblem, builtin, load_problem, regularize
from .operator import assemble
from .oracles import scalar_oracle, system_oracle, two_delay_const_roots
from .spectra import (
    STRUCTURAL_ZERO,
    closest_error,
    eigenvalues,
    fit_order,
    hausdorff,
    one_sided,
)

EXACT_ERROR = 1e-10


def fmt(x: float) -> str:
    # 17 significant digits; "+ 0.0" folds negative zero
    return f"{float(x) + 0.0:.17g}"


class ConfigError(InvalidParameterError):
    pass


@dataclass
class RunConfig:
    command: str
    problem: LinearProblem
    source: str
    L: int = 1
    M: int | None = None
    sweep: list[int] = field(default_factory=list)
    h: float | None = None
    lambdas: list[complex] = field(default_factory=list)
    eps: list[float] = field(default_factory=list)
    oracle_grid: int = 100
    out: str | None = None
    keep_zero: bool = False
    builtin_name: str | None = None
    params: dict = field(default_factory=dict)

    def single_M(self) -> int:
        if self.M is None:
            raise ConfigError(f"{self.command} needs --M")
        return self.M

    def header(self) -> list[str]:
        lines = [f"# command={self.command}", f"# problem={self.source}"]
        lines += [f"# param {k}={v}" for k, v in sorted(self.params.items())]
        lines.append(f"# L={self.L}")
        lines.append(f"# h={fmt(self.h if self.h is not None else self.problem.tau)}")
        if self.M is not None:
            lines.append(f"# M={self.M}")
        if self.sweep:
            lines.append("# M_sweep=" + " ".join(str(m) for m in self.sweep))
        return lines


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _parse_sweep(text: str) -> list[int]:
    try:
        parts = [int(p) for p in text.split(":")]
    except ValueError:
        raise ConfigError(f"bad --M-sweep {text!r}; expected a:b:step") from None
    if len(parts) == 2:
        parts.append(1)
    if len(parts) != 3 or parts[2] <= 0 or parts[0] < 1 or parts[1] < parts[0]:
        raise ConfigError(f"bad --M-sweep {text!r}; expected 1 <= a <= b and step > 0")
    a, b, step = parts
    return list(range(a, b + 1, step))


def _parse_lambda(text: str) -> complex:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise ConfigError(f"bad --lambda {text!r}; expected RE[,IM]") from None
    if len(parts) not in (1, 2):
        raise ConfigError(f"bad --lambda {text!r}; expected RE[,IM]")
    return complex(parts[0], parts[1] if len(parts) == 2 else 0.0)


def _parse_eps(text: str) -> list[float]:
    try:
        values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"bad --eps {text!r}; expected comma-separated reals") from None
    if not values:
        raise ConfigError("--eps list is empty")
    return values


def _parse_params(items: Sequence[str]) -> dict[str, str]:
    params = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"bad --param {item!r}; expected key=value")
        params[key.strip()] = value.strip()
    return params


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", metavar="NAME", help="benchmark problem name")
    src.add_argument("--problem", metavar="FILE.json", help="problem definition file")
    common.add_argument("--param", action="append", default=[], metavar="K=V", help="builtin parameter")
    common.add_argument("--L", type=int, default=1, help="pieces per step (default 1)")
    deg = common.add_mutually_exclusive_group()
    deg.add_argument("--M", type=int, help="degree parameter")
    deg.add_argument("--M-sweep", dest="M_sweep", metavar="A:B:STEP", help="inclusive degree sweep")
    common.add_argument("--h", type=float, help="step length (default tau)")
    common.add_argument("--lambda", dest="lambdas", action="append", default=[], metavar="RE[,IM]")
    common.add_argument("--eps", help="comma-separated, strictly decreasing")
    common.add_argument("--oracle-grid", type=int, default=100, help="oracle sample count (default 100)")
    common.add_argument("--out", metavar="PATH", help="output CSV (default stdout)")
    common.add_argument("--keep-zero", action="store_true", help="keep structural zeros in comparisons")

    parser = argparse.ArgumentParser(prog="nrespectra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("spectrum", "eigenvalues of the collocation matrix"),
        ("convergence", "closest-eigenvalue errors over an M sweep"),
        ("compare", "computed spectrum against the analytical one"),
        ("epsilon-study", "distance between regularized and neutral spectra"),
    ]:
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = _parse_params(ns.param)
    if ns.builtin is not None:
        problem = builtin(ns.builtin, params)
        source = ns.builtin
    else:
        if params:
            raise ConfigError("--param only applies to --builtin problems")
        problem = load_problem(ns.problem)
        source = Path(ns.problem).name
    if ns.L < 1:
        raise ConfigError("--L must be positive")
    if ns.M is not None and ns.M < 1:
        raise ConfigError("--M must be positive")
    if ns.oracle_grid < 2:
        raise ConfigError("--oracle-grid must be at least 2")
    return RunConfig(
        command=ns.command,
        problem=problem,
        source=source,
        L=ns.L,
        M=ns.M,
        sweep=_parse_sweep(ns.M_sweep) if ns.M_sweep else [],
        h=ns.h,
        lambdas=[_parse_lambda(x) for x in ns.lambdas],
        eps=_parse_eps(ns.eps) if ns.eps else [],
        oracle_grid=ns.oracle_grid,
        out=ns.out,
        keep_zero=ns.keep_zero,
        builtin_name=ns.builtin,
        params=params,
    )


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig) -> tuple[str, str | None]:
    M = cfg.single_M()
    spec = eigenvalues(assemble(cfg.problem, cfg.h, cfg.L, M))
    lines = cfg.header()
    lines.append(f"# structural_zero: |lambda| < {STRUCTURAL_ZERO:g} (tagged, not removed)")
    lines.append("re,im,residual,structural_zero")
    for lam, res, zero in zip(spec.eigenvalues, spec.residuals, spec.structural_zero):
        lines.append(f"{fmt(lam.real)},{fmt(lam.imag)},{fmt(res)},{int(zero)}")
    return "\n".join(lines) + "\n", None


def cmd_convergence(cfg: RunConfig) -> tuple[str, str | None]:
    if len(cfg.sweep) < 3:
        raise ConfigError("convergence needs --M-sweep with at least 3 values")
    if not cfg.lambdas:
        raise ConfigError("convergence needs at least one --lambda")
    errors: dict[complex, list[tuple[int, float]]] = {lam: [] for lam in cfg.lambdas}
    lines = cfg.header()
    lines.append(
        f"# footer: #order,lambda_re,lambda_im,fitted_p (exact: every error <= {EXACT_ERROR:g}"
        " or fewer than 3 errors above 1e-13)"
    )
    lines.append("M,lambda_re,lambda_im,abs_error")
    for M in cfg.sweep:
        spec = eigenvalues(assemble(cfg.problem, cfg.h, cfg.L, M))
        for lam in cfg.lambdas:
            err = closest_error(spec, lam)
            errors[lam].append((M, err))
            lines.append(f"{M},{fmt(lam.real)},{fmt(lam.imag)},{fmt(err)}")
    for lam in cfg.lambdas:
        rows = errors[lam]
        try:
            order = "exact" if max(e for _, e in rows) <= EXACT_ERROR else fmt(fit_order(rows))
        except UnderdeterminedError:
            # fewer than three errors above roundoff: null error at almost every M
            order = "exact"
        lines.append(f"#order,{fmt(lam.real)},{fmt(lam.imag)},{order}")
    return "\n".join(lines) + "\n", None


def compare_oracle(p: LinearProblem, n: int) -> tuple[np.ndarray, str]:
    """Finite oracle set for the supported problem classes, with a label."""
    if p.distributed:
        raise UnsupportedComparisonError("no analytical spectrum for problems with distributed terms")
    terms = p.discrete
    if len(terms) == 1 and abs(terms[0].delay - p.tau) <= 1e-12 * p.tau:
        A = terms[0].coeff
        if p.dimension == 1:
            oracle = scalar_oracle(A[0][0], max(n, 100))
            return oracle.sample(n), "closure of the range of f"
        return system_oracle(A, n, p.period), "union of spectra of A(t) on the grid (conjectured)"
    if (
        p.dimension == 1
        and len(terms) == 2
        and all(isinstance(t.coeff[0][0], Constant) for t in terms)
    ):
        by_delay = sorted(terms, key=lambda t: t.delay)
        if abs(by_delay[0].delay - p.tau / 2) <= 1e-12 * p.tau and abs(by_delay[1].delay - p.tau) <= 1e-12 * p.tau:
            roots = two_delay_const_roots(by_delay[0].coeff[0][0].value, by_delay[1].coeff[0][0].value)
            if roots:
                return np.array(sorted(set(roots)), dtype=complex), "real roots for constant a, b"
    raise UnsupportedComparisonError(
        "comparison supports one-delay scalar/system problems and the constant two-delay equation"
    )


def cmd_compare(cfg: RunConfig) -> tuple[str, str | None]:
    M = cfg.single_M()
    oracle, label = compare_oracle(cfg.problem, cfg.oracle_grid)
    spec = eigenvalues(assemble(cfg.problem, cfg.h, cfg.L, M))
    computed = spec.eigenvalues
    oracle_has_zero = bool(np.any(np.abs(oracle) < STRUCTURAL_ZERO))
    excluded = not cfg.keep_zero and not oracle_has_zero
    if excluded:
        computed = spec.nonzero()
        if computed.size == 0:
            raise InvalidParameterError("every computed eigenvalue is a structural zero")
    fwd = one_sided(computed, oracle)
    bwd = one_sided(oracle, computed)
    lines = cfg.header()
    lines.append(f"# oracle: {label}; grid={cfg.oracle_grid}")
    lines.append(
        "# structural zeros excluded from computed set"
        if excluded
        else "# structural zeros kept in computed set"
    )
    lines.append("source,re,im")
    lines += [f"computed,{fmt(z.real)},{fmt(z.imag)}" for z in computed]
    lines += [f"oracle,{fmt(z.real)},{fmt(z.imag)}" for z in oracle]
    summary = f"hausdorff={fmt(max(fwd, bwd))} fwd={fmt(fwd)} bwd={fmt(bwd)}"
    return "\n".join(lines) + "\n", summary


def cmd_epsilon_study(cfg: RunConfig) -> tuple[str, str | None]:
    M = cfg.single_M()
    if not cfg.eps:
        raise ConfigError("epsilon-study needs --eps")
    if any(b >= a for a, b in zip(cfg.eps, cfg.eps[1:])):
        raise ConfigError("--eps must be strictly decreasing")
    tau = cfg.problem.tau
    for e in cfg.eps:
        if not 0.0 < e < tau:
            raise ConfigError(f"eps={e!r} outside (0, tau={tau!r})")
    problems = [regularize(cfg.problem, e) for e in cfg.eps]
    base = eigenvalues(assemble(cfg.problem, cfg.h, cfg.L, M)).eigenvalues
    lines = cfg.header()
    lines.append("eps,hausdorff")
    for e, p in zip(cfg.eps, problems):
        lam = eigenvalues(assemble(p, cfg.h, cfg.L, M)).eigenvalues
        lines.append(f"{fmt(e)},{fmt(hausdorff(lam, base))}")
    return "\n".join(lines) + "\n", None


COMMANDS = {
    "spectrum": cmd_spectrum,
    "convergence": cmd_convergence,
    "compare": cmd_compare,
    "epsilon-study": cmd_epsilon_study,
}


def run(cfg: RunConfig) -> tuple[str, str | None]:
    return COMMANDS[cfg.command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        csv_text, summary = run(cfg)
    except (AssemblyError, EigenSolverError, ExprEvalError) as exc:
        print(f"nrespectra: numerical failure: {exc}", file=sys.stderr)
        return 1
    except NreError as exc:
        print(f"nrespectra: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        try:
            with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(csv_text)
        except OSError as exc:
            print(f"nrespectra: error: cannot write {cfg.out}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(csv_text)
    if summary is not None:
        print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
