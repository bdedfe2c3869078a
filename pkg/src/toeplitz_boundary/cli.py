"""Command-line front end.

    toeplitz-boundary gcbo --spec ising.json --N-min 1 --N-max 5 --out gcbo.csv
    toeplitz-boundary minima --a 2,0 --n 2 --out min.json

Exit status: 0 success, 1 invalid input, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import NumericalError, PreconditionError

log = logging.getLogger("toeplitz_boundary")

SUBCOMMANDS = ("gcbo", "chi-scan", "sn", "prop-check", "selberg", "minima", "probe")

COLUMNS = {
    "gcbo": ["N", "residual"],
    "gcbo-grid": ["k", "N", "residual"],
    "chi-scan": ["k", "re_chi", "im_chi", "re_E_S", "im_E_S", "difference", "terms"],
    "sn": ["n", "k", "re_S_n", "im_S_n", "nodes", "est_error"],
    "prop-check": ["k", "re_lhs", "im_lhs", "re_rhs", "im_rhs", "difference",
                   "omitted_estimate", "passed"],
    "selberg": ["n", "re_value", "im_value", "mc_value", "mc_stderr"],
    "minima": ["n", "value", "unique", "residue", "method", "minimizers"],
    "probe": ["mu", "re_derivative", "im_derivative"],
}


@dataclass
class RunConfig:
    subcommand: str
    spec_path: str | None = None
    output_path: str = "-"
    format: str = "csv"
    threads: int = 0
    seed: int = 0
    params: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise PreconditionError(f"arguments: {message}")


# parsing helpers ---------------------------------------------------------------


def parse_grid(text: str) -> list[float]:
    """'start:stop:step' (stop included) or a comma list."""
    if ":" not in text:
        return [float(x) for x in text.split(",") if x.strip()]
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise PreconditionError(f"k_grid: expected start:stop:step, got {text!r}") from exc
    if not step > 0 or stop < start:
        raise PreconditionError(f"k_grid: need step > 0 and stop >= start, got {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def parse_complex(text: str) -> complex:
    """'0.3', '0.3,0.1' (re,im) or Python complex syntax '0.3+0.1j'."""
    text = text.strip()
    try:
        if "," in text:
            re, im = text.split(",")
            return complex(float(re), float(im))
        return complex(text)
    except ValueError as exc:
        raise PreconditionError(f"alpha: cannot parse {text!r}") from exc


def parse_ints(text: str, name: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise PreconditionError(f"{name}: expected integers, got {text!r}") from exc


def _real_k(k) -> float:
    k = complex(k)
    if k.imag != 0:
        raise PreconditionError(f"k: tabulated output needs real k, got {k}")
    return k.real


# subcommands -------------------------------------------------------------------


def _load_spec(cfg: RunConfig):
    from .symbol import SymbolSpec

    if not cfg.spec_path:
        raise PreconditionError("spec_path: --spec is required for this subcommand")
    path = Path(cfg.spec_path)
    if not path.is_file():
        raise PreconditionError(f"spec_path: no such file {cfg.spec_path!r}")
    try:
        return SymbolSpec.load(path)
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"spec_path: not valid JSON ({exc})") from exc


def _ks(cfg: RunConfig, spec) -> list[float]:
    grid = cfg.params.get("k_grid")
    if grid:
        return parse_grid(grid)
    return [_real_k(spec.k)]


def _pmap(cfg: RunConfig, fn, items):
    """Map in a thread pool; results come back in input order."""
    workers = cfg.threads or os.cpu_count() or 1
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_gcbo(cfg: RunConfig):
    from .toeplitz import gcbo_residual

    spec = _load_spec(cfg)
    n0, n1 = cfg.params["N_min"], cfg.params["N_max"]
    if not 1 <= n0 <= n1:
        raise PreconditionError(f"N_min/N_max: need 1 <= N_min <= N_max, got {n0}, {n1}")
    grid = bool(cfg.params.get("k_grid"))
    items = [(k, N) for k in _ks(cfg, spec) for N in range(n0, n1 + 1)]
    res = _pmap(cfg, lambda kn: gcbo_residual(spec.with_k(kn[0]), kn[1]), items)
    if grid:
        rows = [[k, N, r] for (k, N), r in zip(items, res)]
        return "gcbo-grid", rows, max(res)
    return "gcbo", [[N, r] for (_, N), r in zip(items, res)], max(res)


def run_chi_scan(cfg: RunConfig):
    from .series import chi, s_series
    from .symbol import e_of_phi

    spec = _load_spec(cfg)
    tol = cfg.params["tol"]

    def point(k):
        s = spec.with_k(k)
        c = chi(s, tol)
        es = e_of_phi(s) * s_series(s, tol).value
        return [k, c.value.real, c.value.imag, es.real, es.imag, abs(c.value - es), c.terms_used]

    rows = _pmap(cfg, point, _ks(cfg, spec))
    return "chi-scan", rows, max(r[5] for r in rows)


def run_sn(cfg: RunConfig):
    from .integrals import s_n

    spec = _load_spec(cfg)
    n = cfg.params["n"]

    def point(k):
        r = s_n(spec.with_k(k), n, rtol=cfg.params["tol"])
        return [n, k, r.value.real, r.value.imag, r.nodes, r.est_error]

    rows = _pmap(cfg, point, _ks(cfg, spec))
    return "sn", rows, max(r[5] for r in rows)


def run_prop_check(cfg: RunConfig):
    from .integrals import proposition_check

    spec = _load_spec(cfg)

    def point(k):
        r = proposition_check(spec.with_k(k), cfg.params["n"], cfg.params["tol"])
        return [k, r.lhs.real, r.lhs.imag, r.rhs.real, r.rhs.imag, r.difference,
                r.omitted_estimate, int(r.passed)]

    rows = _pmap(cfg, point, _ks(cfg, spec))
    return "prop-check", rows, max(r[5] for r in rows)


def run_selberg(cfg: RunConfig):
    from .asymptotics import selberg_constant, selberg_monte_carlo

    n = cfg.params["n"]
    ap, am = parse_complex(cfg.params["alpha_plus"]), parse_complex(cfg.params["alpha_minus"])
    val = selberg_constant(n, ap, am)
    samples = cfg.params["samples"]
    mc, err = (math.nan, math.nan)
    if samples:
        mc, err = selberg_monte_carlo([(n, ap), (n, am)], samples, cfg.seed)
    resid = abs(val - mc) / abs(val) if samples else 0.0
    return "selberg", [[n, val.real, val.imag, mc, err]], resid


def run_minima(cfg: RunConfig):
    from .minima import MinProblem, min_lattice, parse_exponent

    a = tuple(parse_exponent(x) for x in cfg.params["a"].split(","))
    rows = []
    for n in range(cfg.params["n"], (cfg.params.get("n_max") or cfg.params["n"]) + 1):
        p = MinProblem(a, n)
        r = min_lattice(p)
        rows.append([n, float(r.value), r.unique, n % p.k, r.via, [list(c) for c in r.minimizers]])
    return "minima", rows, 0.0


def run_probe(cfg: RunConfig):
    from .asymptotics import ProbeConfig, boundary_probe

    spec = _load_spec(cfg)
    eps = cfg.params.get("epsilon")
    tm = cfg.params.get("target_m")
    pc = ProbeConfig(
        n=cfg.params["n"],
        root_selector=(cfg.params["root"],),
        mu_grid=tuple(float(x) for x in cfg.params["mu_grid"].split(",")),
        delta=cfg.params["delta"],
        derivative_order=cfg.params.get("order"),
        route=cfg.params["route"],
        target_m=parse_ints(tm, "target_m") if tm else None,
        epsilon=parse_complex(eps) if eps else None,
    )
    rep = boundary_probe(spec, pc)
    rows = [[mu, complex(d).real, complex(d).imag] for mu, d in zip(pc.mu_grid, rep.derivatives)]
    return "probe", rows, abs(rep.fitted_exponent - rep.predicted_exponent), rep


RUNNERS = {
    "gcbo": run_gcbo, "chi-scan": run_chi_scan, "sn": run_sn, "prop-check": run_prop_check,
    "selberg": run_selberg, "minima": run_minima, "probe": run_probe,
}


# output ------------------------------------------------------------------------


def _fmt(x):
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, list):
        return json.dumps(x)
    return x


def render(schema: str, rows, fmt: str, extra=None) -> str:
    cols = COLUMNS[schema]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(x) for x in r])
        return buf.getvalue()
    if schema == "minima" and len(rows) == 1:
        n, value, unique, residue, via, mins = rows[0]
        doc = {"value": value, "minimizers": mins, "unique": unique, "residue": residue,
               "method": via}
    elif schema == "probe" and extra is not None:
        doc = extra.to_dict()
    else:
        doc = {"columns": cols, "rows": rows}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_atomic(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    if not target.parent.exists():
        raise PreconditionError(f"output_path: directory {str(target.parent)!r} does not exist")
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(cfg: RunConfig) -> int:
    """Execute one subcommand; returns the exit status."""
    try:
        if cfg.subcommand not in RUNNERS:
            raise PreconditionError(f"subcommand: unknown {cfg.subcommand!r}")
        if cfg.format not in ("csv", "json"):
            raise PreconditionError(f"format: expected csv or json, got {cfg.format!r}")
        if cfg.threads < 0:
            raise PreconditionError(f"threads: must be >= 0, got {cfg.threads}")
        tol = cfg.params.get("tol")
        if tol is not None and not tol > 0:
            raise PreconditionError(f"tol: must be positive, got {tol}")
        out = RUNNERS[cfg.subcommand](cfg)
        schema, rows, worst = out[:3]
        extra = out[3] if len(out) > 3 else None
        if not rows:
            raise PreconditionError("grid: no points to evaluate")
        write_atomic(cfg.output_path, render(schema, rows, cfg.format, extra))
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    stream = sys.stdout if cfg.output_path != "-" else sys.stderr
    print(f"{cfg.subcommand}: {len(rows)} rows written, max residual {worst:.3e}", file=stream)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toeplitz-boundary", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp, spec=True):
        if spec:
            sp.add_argument("--spec", dest="spec_path", help="symbol spec (JSON)")
        sp.add_argument("--out", dest="output_path", default="-")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--threads", type=int, default=0, help="0 = machine parallelism")
        sp.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("gcbo", help="Toeplitz vs Fredholm determinant residuals")
    common(s)
    s.add_argument("--N-min", dest="N_min", type=int, default=1)
    s.add_argument("--N-max", dest="N_max", type=int, default=5)
    s.add_argument("--k-grid", dest="k_grid")

    for name, text in (("chi-scan", "chi(k) against E(phi) S(k)"),
                       ("prop-check", "sum over N against sum of S_n")):
        s = sub.add_parser(name, help=text)
        common(s)
        s.add_argument("--k-grid", dest="k_grid")
        s.add_argument("--tol", type=float, default=1e-10 if name == "chi-scan" else 1e-7)
        if name == "prop-check":
            s.add_argument("--n", type=int, default=2, help="highest S_n included")

    s = sub.add_parser("sn", help="S_n(k) by tensor quadrature")
    common(s)
    s.add_argument("--k-grid", dest="k_grid")
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--tol", type=float, default=1e-9)

    s = sub.add_parser("selberg", help="simplex constant, optionally with a Monte Carlo check")
    common(s, spec=False)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--alpha-plus", dest="alpha_plus", default="0")
    s.add_argument("--alpha-minus", dest="alpha_minus", default="0")
    s.add_argument("--samples", type=int, default=0)

    s = sub.add_parser("minima", help="minimal compositions")
    common(s, spec=False)
    s.add_argument("--a", required=True, help="comma list; decimals or p/q fractions")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--n-max", dest="n_max", type=int)

    s = sub.add_parser("probe", help="blow-up exponent near a boundary point")
    common(s)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--root", type=int, default=1, help="root selector j")
    s.add_argument("--epsilon", help="explicit eps as re,im (skips root checks)")
    s.add_argument("--mu-grid", dest="mu_grid", default="0.3,0.2,0.1,0.05")
    s.add_argument("--delta", type=float, default=0.25)
    s.add_argument("--order", type=int)
    s.add_argument("--route", choices=("full", "reduced"), default="full")
    s.add_argument("--target-m", dest="target_m", help="summand index, or a comma list to sum")
    return p


def _configure_logging():
    level = os.environ.get("TB_LOG", "").lower()
    logging.basicConfig(
        stream=sys.stderr,
        level={"debug": logging.DEBUG, "info": logging.INFO}.get(level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv=None) -> int:
    _configure_logging()
    try:
        ns = vars(build_parser().parse_args(argv))
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    cfg = RunConfig(
        subcommand=ns.pop("subcommand"),
        spec_path=ns.pop("spec_path", None),
        output_path=ns.pop("output_path"),
        format=ns.pop("format"),
        threads=ns.pop("threads"),
        seed=ns.pop("seed"),
        params=ns,
    )
    log.debug("config %s", cfg)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
