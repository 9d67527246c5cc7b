"""Command-line entry point: ``twistedhodge <command> [options]``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on
invalid input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .duality import duality_suite, negative_control_report
from .harmonic import FLAVORS, cohomology, spectrum
from .identities import identity_suite
from .model import (
    InvalidModelError,
    ModelSpec,
    bandwidth,
    carriere,
    load_model,
    p_from_triples,
    product,
    suspension,
    taut_model,
)
from .operators import HERMITIAN_NAMES, get_assembler
from .report import FAIL, PASS, CheckReport, _clean, reports_to_csv, reports_to_json
from .weitzenbock import vanishing_probe, weitzenbock_residuals

COMMANDS = ("table", "identities", "dualities", "weitzenbock", "spectrum", "convergence", "all")
BUILTIN_MODELS = ("carriere", "taut", "suspension", "taut-x-taut")
CONVERGENCE_FIELDS = ["model", "N", "flavor", "r", "s", "dim", "gap", "residual_max", "stable"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    model: ModelSpec
    N: int
    tol_identity: float | None
    tol_kernel: float
    flavor: str
    fmt: str
    out: Path | None
    modes_list: list[int]
    operator: str
    count: int
    degree: int | None


# ---------------------------------------------------------------------------
# parsing


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError("tolerance must be > 0")
    return x


def _positive_int(text: str) -> int:
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if x < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return x


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None
    if not vals or any(v < 1 for v in vals) or vals != sorted(set(vals)):
        raise argparse.ArgumentTypeError("expected a strictly ascending list of positive integers")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twistedhodge",
                                description="Spectral twisted basic cohomology of suspension foliations.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model", default="carriere",
                   help=f"builtin ({', '.join(BUILTIN_MODELS)}) or path to a JSON model spec")
    p.add_argument("--trace", type=int, default=3, help="trace of the hyperbolic matrix (carriere)")
    p.add_argument("--c", type=float, default=0.0, help="mean-curvature constant (suspension)")
    p.add_argument("--p-file", type=Path, help="JSON list of [k, re, im] triples for p (suspension)")
    p.add_argument("--modes", type=_positive_int, default=32, help="Fourier order N")
    p.add_argument("--modes-list", type=_int_list, default=[2, 3, 4, 5, 6, 8, 12, 16],
                   help="ascending N values for convergence")
    p.add_argument("--tol-identity", type=_positive_float, default=None,
                   help="identity residual tolerance (default 1e-10; 1e-8 for coupled models)")
    p.add_argument("--tol-kernel", type=_positive_float, default=1e-9, help="relative kernel threshold")
    p.add_argument("--flavor", choices=FLAVORS + ("all",), default="kappa")
    p.add_argument("--operator", default="Delta_kappa", help="operator for spectrum")
    p.add_argument("--count", type=_positive_int, default=10, help="eigenvalues for spectrum")
    p.add_argument("--degree", type=int, default=None, help="restrict spectrum to one form degree")
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path, default=None, help="output path (default stdout)")
    return p


def resolve_model(args) -> ModelSpec:
    name = args.model
    if name == "carriere":
        return carriere(args.trace)
    if name == "taut":
        return taut_model()
    if name == "taut-x-taut":
        return product(taut_model(), taut_model())
    if name == "suspension":
        triples = []
        if args.p_file is not None:
            try:
                triples = json.loads(Path(args.p_file).read_text())
            except (OSError, json.JSONDecodeError) as e:
                raise UsageError(f"cannot read p-file: {e}") from None
            if isinstance(triples, dict):
                triples = triples.get("p", [])
        try:
            return suspension(args.c, p_from_triples(triples))
        except (TypeError, ValueError) as e:
            raise UsageError(f"bad p coefficients: {e}") from None
    path = Path(name)
    if path.suffix == ".json" or path.exists():
        try:
            return load_model(path)
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as e:
            raise UsageError(f"cannot load model spec {name!r}: {e}") from None
    raise UsageError(f"unknown model {name!r}; use one of {BUILTIN_MODELS} or a JSON file")


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    model = resolve_model(args)
    if args.command == "spectrum" and args.operator not in HERMITIAN_NAMES:
        raise UsageError(f"spectrum needs a Hermitian operator, one of {sorted(HERMITIAN_NAMES)}")
    return RunConfig(args.command, model, args.modes, args.tol_identity, args.tol_kernel, args.flavor,
                     args.fmt, args.out, args.modes_list, args.operator, args.count, args.degree)


# ---------------------------------------------------------------------------
# commands


def _flavors(cfg: RunConfig):
    return FLAVORS if cfg.flavor == "all" else (cfg.flavor,)


def table_report(cfg: RunConfig) -> tuple[str, bool]:
    tables = [cohomology(cfg.model, cfg.N, f, cfg.tol_kernel) for f in _flavors(cfg)]
    ok = all(t.sum_consistent for t in tables if t.flavor == "kappa")
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", "N", "flavor", "r", "s", "dim", "gap"])
        for t in tables:
            for r, s, d in t.rows():
                w.writerow([t.model, t.N, t.flavor, r, "" if s is None else s, d, f"{t.gap:.6e}"])
        return buf.getvalue(), ok
    payload = {"model": cfg.model.label, "verdict": PASS if ok else FAIL,
               "tables": [_clean(t.to_dict()) for t in tables]}
    return json.dumps(payload, indent=2) + "\n", ok


def spectrum_report(cfg: RunConfig) -> tuple[str, bool]:
    vals = spectrum(cfg.model, cfg.N, cfg.operator, cfg.count, cfg.degree)
    if cfg.fmt == "csv":
        rows = ["model,N,operator,degree,index,eigenvalue"]
        deg = "" if cfg.degree is None else cfg.degree
        rows += [f"{cfg.model.label},{cfg.N},{cfg.operator},{deg},{i},{v:.12e}" for i, v in enumerate(vals)]
        return "\n".join(rows) + "\n", True
    payload = {"model": cfg.model.label, "N": cfg.N, "operator": cfg.operator, "degree": cfg.degree,
               "eigenvalues": [float(f"{v:.12e}") for v in vals]}
    return json.dumps(payload, indent=2) + "\n", True


def suites(cfg: RunConfig) -> list[CheckReport]:
    m, N = cfg.model, cfg.N
    if cfg.command == "identities":
        return [identity_suite(m, N, cfg.tol_identity)]
    if cfg.command == "weitzenbock":
        return [weitzenbock_residuals(m, N, cfg.tol_identity), vanishing_probe(m, N, cfg.tol_kernel)]
    if cfg.command == "dualities":
        return duality_suite(m, N, cfg.tol_kernel) + [negative_control_report(m, N, cfg.tol_kernel)]
    if cfg.command == "all":
        out = [identity_suite(m, N, cfg.tol_identity),
               weitzenbock_residuals(m, N, cfg.tol_identity),
               vanishing_probe(m, N, cfg.tol_kernel)]
        out += duality_suite(m, N, cfg.tol_kernel) + [negative_control_report(m, N, cfg.tol_kernel)]
        for f in FLAVORS:
            t = cohomology(m, N, f, cfg.tol_kernel)
            rep = CheckReport(f"table ({f})", m.label, N, data=t.to_dict())
            if f == "kappa":
                rep.add("graded = sum of bigraded", "Hodge decomposition of twisted cohomology",
                        observed=t.sum_consistent, expected=True)
            out.append(rep)
        return out
    raise UsageError(f"no suites for command {cfg.command!r}")


def convergence_rows(cfg: RunConfig) -> tuple[list[list], dict]:
    """Per-N dimensions, gaps and identity residuals; marks N from which dims stop changing."""
    rows, dims_by_N = [], {}
    for N in cfg.modes_list:
        resid = identity_suite(cfg.model, N, cfg.tol_identity).max_residual()
        dims = []
        for f in _flavors(cfg):
            t = cohomology(cfg.model, N, f, cfg.tol_kernel)
            for r, s, d in t.rows():
                rows.append([cfg.model.label, N, f, r, "" if s is None else s, d, f"{t.gap:.6e}", f"{resid:.3e}"])
                dims.append(d)
        dims_by_N[N] = dims
    Ns = cfg.modes_list
    stable_from = next((N for i, N in enumerate(Ns) if all(dims_by_N[M] == dims_by_N[N] for M in Ns[i:])), None)
    for row in rows:
        row.append("yes" if stable_from is not None and row[1] >= stable_from else "no")
    summary = {"model": cfg.model.label, "bandwidth": bandwidth(cfg.model), "first_stable_N": stable_from,
               "modes": Ns}
    return rows, summary


def convergence_report(cfg: RunConfig) -> tuple[str, bool]:
    rows, summary = convergence_rows(cfg)
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CONVERGENCE_FIELDS)
        w.writerows(rows)
        return buf.getvalue(), summary["first_stable_N"] is not None
    payload = {**summary, "rows": [dict(zip(CONVERGENCE_FIELDS, r)) for r in rows]}
    return json.dumps(payload, indent=2) + "\n", summary["first_stable_N"] is not None


def render(cfg: RunConfig) -> tuple[str, bool]:
    if cfg.command == "table":
        return table_report(cfg)
    if cfg.command == "spectrum":
        return spectrum_report(cfg)
    if cfg.command == "convergence":
        return convergence_report(cfg)
    reps = suites(cfg)
    text = reports_to_csv(reps) if cfg.fmt == "csv" else reports_to_json(reps, cfg.model.label)
    return text, all(r.passed for r in reps)


def run(cfg: RunConfig) -> int:
    text, ok = render(cfg)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        cfg.out.write_text(text)
    return 0 if ok else 1


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as e:  # argparse usage errors
        return 2 if e.code not in (0, None) else 0
    except (UsageError, InvalidModelError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        get_assembler(cfg.model, cfg.N)
        return run(cfg)
    except (InvalidModelError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
