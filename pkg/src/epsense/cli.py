"""Command-line front end: sweep data, polynomial reports and ``verify``.

Exit codes: 0 success, 1 verification failure, 2 usage or computation error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as dt
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .errors import EpsenseError

COMMANDS = ("spectrum", "trace-distance", "ep-decompose", "charpoly", "response", "floquet", "verify")
CONFIG_KEYS = ("n", "gamma", "epsilon", "period", "perturbation", "output_dir", "format", "timestamp")
DEFAULT_OUTPUT_DIR = "epsense_out"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Grid:
    min: float
    max: float
    points: int
    log: bool = False

    def values(self) -> np.ndarray:
        if self.log:
            return np.logspace(math.log10(self.min), math.log10(self.max), self.points)
        return np.linspace(self.min, self.max, self.points)


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int | None = None
    gamma: float | Grid | None = None
    epsilon: Grid | None = None
    period: float = 0.2
    perturbation: str | None = None
    output_dir: str = DEFAULT_OUTPUT_DIR
    format: str = "csv"
    timestamp: str | None = None

    def echo(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = asdict(v) if isinstance(v, Grid) else v
        return out


def parse_grid(text: str, log: bool) -> Grid:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid spec must be min:max:points, got {text!r}")
    try:
        lo, hi, pts = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"malformed grid spec {text!r}") from None
    if not lo < hi or pts < 2:
        raise UsageError(f"grid spec needs min < max and points >= 2, got {text!r}")
    if log and lo <= 0:
        raise UsageError(f"log-spaced grid needs min > 0, got {text!r}")
    return Grid(lo, hi, pts, log)


def parse_gamma(text: str) -> float | Grid:
    if ":" in text:
        grid = parse_grid(text, log=False)
        if grid.min < 0:
            raise UsageError("gamma must be non-negative")
        return grid
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"malformed gamma {text!r}") from None
    if value < 0:
        raise UsageError("gamma must be non-negative")
    return value


def read_config_file(path: str) -> dict[str, str]:
    """``key = value`` per line; ``#`` starts a comment; unknown keys are rejected."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epsense", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="plain-text key = value file; flags override it")
        p.add_argument("--n", help="qubit count")
        p.add_argument("--gamma", help="value or linear grid min:max:points")
        p.add_argument("--epsilon", help="log-spaced grid min:max:points")
        p.add_argument("--period", help="drive period T (units of 1/J)")
        p.add_argument("--perturbation", help="Pauli word over 0xyz, one letter per qubit")
        p.add_argument("--output-dir", dest="output_dir", help="default: $EPSENSE_OUTPUT_DIR or ./epsense_out")
        p.add_argument("--format", help="csv or json")
        p.add_argument("--timestamp", help="fixed timestamp for file names")
    return parser


def parse_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    raw = read_config_file(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        value = getattr(args, key)
        if value is not None:
            raw[key] = value
    return _resolve(args.command, raw)


def _resolve(command: str, raw: dict[str, str]) -> RunConfig:
    kw: dict = {"command": command}
    if "n" in raw:
        try:
            kw["n"] = int(raw["n"])
        except ValueError:
            raise UsageError(f"malformed n {raw['n']!r}") from None
        if kw["n"] < 1:
            raise UsageError(f"n must be >= 1, got {kw['n']}")
    elif command == "verify":
        kw["n"] = 3
    else:
        raise UsageError(f"{command} requires --n")
    n = kw["n"]

    if "gamma" in raw:
        kw["gamma"] = parse_gamma(raw["gamma"])
    elif command in ("spectrum", "trace-distance"):
        kw["gamma"] = Grid(0.0, 2.0, 201)
    else:
        kw["gamma"] = 1.0
    if command in ("response", "charpoly", "ep-decompose", "floquet") and isinstance(kw["gamma"], Grid):
        raise UsageError(f"{command} takes a single gamma value")

    kw["epsilon"] = parse_grid(raw.get("epsilon", "1e-8:1e-3:11"), log=True)

    if "period" in raw:
        try:
            kw["period"] = float(raw["period"])
        except ValueError:
            raise UsageError(f"malformed period {raw['period']!r}") from None
        if not kw["period"] > 0:
            raise UsageError("period must be positive")

    word = raw.get("perturbation")
    if word is None and command == "charpoly":
        word = "x" * n
    if command == "response" and word is None:
        raise UsageError("response requires --perturbation")
    if word is not None:
        word = word.lower()
        if set(word) - set("0xyz"):
            raise UsageError(f"perturbation must be a word over 0xyz, got {word!r}")
        if len(word) != n and command in ("response", "charpoly"):
            raise UsageError(f"perturbation {word!r} has length {len(word)}, expected n={n}")
    kw["perturbation"] = word

    kw["output_dir"] = raw.get("output_dir") or os.environ.get("EPSENSE_OUTPUT_DIR") or DEFAULT_OUTPUT_DIR
    fmt = raw.get("format", "csv").lower()
    if fmt not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {fmt!r}")
    kw["format"] = fmt
    kw["timestamp"] = raw.get("timestamp")
    return RunConfig(**kw)


# ------------------------------------------------------------------ commands

def _gammas(cfg):
    return cfg.gamma.values() if isinstance(cfg.gamma, Grid) else np.array([cfg.gamma])


def _cmd_spectrum(cfg):
    from .ep_analysis import gamma_sweep
    from .pauli import QubitSystemParams

    dim = 2 ** cfg.n
    cols = ["gamma"] + [f"{p}_e{k}" for k in range(1, dim + 1) for p in ("re", "im")]
    rows = []
    for r in gamma_sweep(QubitSystemParams(cfg.n), _gammas(cfg)):
        rows.append([r.gamma] + [x for v in r.eigenvalues for x in (float(v.real), float(v.imag))])
    return {"spectrum": (cols, rows)}


def _cmd_trace_distance(cfg):
    from .ep_analysis import gamma_sweep
    from .pauli import QubitSystemParams

    dim = 2 ** cfg.n
    pairs = [(k, l) for k in range(dim) for l in range(k + 1, dim)]
    cols = ["gamma"] + [f"d_{k + 1}_{l + 1}" for k, l in pairs]
    rows = []
    for r in gamma_sweep(QubitSystemParams(cfg.n), _gammas(cfg)):
        rows.append([r.gamma] + [float(r.distances[k, l]) for k, l in pairs])
    return {"trace-distance": (cols, rows)}


def _cmd_ep_decompose(cfg):
    from .ep_analysis import ep_decomposition

    dec = ep_decomposition(cfg.n)
    print(dec.describe())
    rows = [[order, fold] for order, fold in dec.parts]
    return {"ep-decompose": (["order", "fold"], rows),
            "summary": (["independent_states"], [[dec.independent_states]])}


def _cmd_charpoly(cfg):
    from .pauli import PauliString, QubitSystemParams, noninteracting_hamiltonian, pauli_string_operator
    from .spectral import epsilon_linear_term

    h0 = noninteracting_hamiltonian(QubitSystemParams(cfg.n, gamma=cfg.gamma))
    b = pauli_string_operator(PauliString(cfg.perturbation), cfg.n)
    poly = epsilon_linear_term(h0, b)
    rows = []
    for k in range(len(poly.base.coeffs)):
        lin = poly.linear[k] if k < len(poly.linear) else 0j
        c = poly.base.coeffs[k]
        rows.append([k, float(c.real), float(c.imag), float(lin.real), float(lin.imag)])
    nonzero = [f"λ^{k}: {_fmt_c(poly.linear[k])}" for k in range(len(poly.linear))
               if abs(poly.linear[k]) > 1e-8 * max(1.0, np.abs(poly.linear).max())]
    print(f"eps-linear coefficients for {cfg.perturbation}: " + (", ".join(nonzero) or "none"))
    return {"charpoly": (["power", "re_base", "im_base", "re_linear", "im_linear"], rows)}


def _fmt_c(z):
    z = complex(z)
    if abs(z.imag) < 1e-12 * max(1.0, abs(z.real)):
        return f"{z.real:g}"
    return f"{z.real:g}{z.imag:+g}i"


def _fit_tables(name, fit):
    table = [[float(e), float(l.real), float(l.imag), float(abs(l)), bool(u)]
             for e, l, u in zip(fit.epsilons, fit.lambdas, fit.used)]
    summary = [[fit.slope, fit.intercept, fit.r_squared, int(fit.used.sum()), 1.0 / fit.slope]]
    return {
        name: (["epsilon", "re_lambda", "im_lambda", "abs_lambda", "used"], table),
        f"{name}_fit": (["slope", "intercept", "r_squared", "points_used", "response_order"], summary),
    }


def _cmd_response(cfg):
    from .ep_analysis import response_sweep
    from .pauli import PauliString

    fit = response_sweep(cfg.n, PauliString(cfg.perturbation), cfg.epsilon.values(), gamma=cfg.gamma)
    print(f"slope {fit.slope:.4f} (response order {1 / fit.slope:.3f}), r^2 {fit.r_squared:.6f}")
    return _fit_tables("response", fit)


def _cmd_floquet(cfg):
    from .floquet import floquet_response_sweep, magnus_error_scaling
    from .pauli import QubitSystemParams

    params = QubitSystemParams(cfg.n, gamma=cfg.gamma)
    eps = cfg.epsilon.values()
    tables = _fit_tables("floquet", floquet_response_sweep(params, cfg.period, eps, oracle="magnus"))
    tables.update(_fit_tables("floquet_exact", floquet_response_sweep(params, cfg.period, eps, oracle="exact")))
    T = cfg.period
    scaling = magnus_error_scaling(params, float(eps[-1]), [T, T / 2, T / 4])
    tables["magnus_scaling"] = (["period", "error", "ratio"],
                                [[t, e, r] for t, e, r in scaling])
    slope = tables["floquet_fit"][1][0][0]
    exact = tables["floquet_exact_fit"][1][0][0]
    print(f"H_eff slope {slope:.4f}; exact-propagator slope {exact:.4f}")
    return tables


def _cmd_verify(cfg):
    from .acceptance import run_all

    report = run_all()
    for c in report.checks:
        print(c.line())
    print(f"overall: {'PASS' if report.overall else 'FAIL'} ({report.elapsed:.1f} s)")
    rows = [[c.name, "pass" if c.passed else "fail", c.measured, c.threshold] for c in report.checks]
    return {"verify": (["name", "status", "measured", "threshold"], rows),
            "overall": (["overall"], [["pass" if report.overall else "fail"]])}, report.overall


HANDLERS = {
    "spectrum": _cmd_spectrum,
    "trace-distance": _cmd_trace_distance,
    "ep-decompose": _cmd_ep_decompose,
    "charpoly": _cmd_charpoly,
    "response": _cmd_response,
    "floquet": _cmd_floquet,
}


# ------------------------------------------------------------------- output

def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v + 0.0)
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def emit_outputs(tables: dict, cfg: RunConfig) -> list[Path]:
    """Write tables as CSV (one file per table) or one JSON document."""
    stamp = cfg.timestamp or dt.datetime.now(dt.timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    stem = f"{cfg.command}_{cfg.n}q_{stamp}"
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    if cfg.format == "json":
        doc = {
            "meta": {"config": cfg.echo(), "version": __version__},
            "data": {name: [{c: _json_value(v) for c, v in zip(cols, row)} for row in rows]
                     for name, (cols, rows) in tables.items()},
        }
        path = outdir / f"{stem}.json"
        path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
        return [path]
    for name, (cols, rows) in tables.items():
        suffix = "" if name == cfg.command else f"_{name}"
        path = outdir / f"{stem}{suffix}.csv"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            w.writerow([_cell(v) for v in row])
        path.write_text(buf.getvalue())
        written.append(path)
    return written


def run_command(cfg: RunConfig) -> int:
    verified = True
    if cfg.command == "verify":
        tables, verified = _cmd_verify(cfg)
    else:
        tables = HANDLERS[cfg.command](cfg)
    for path in emit_outputs(tables, cfg):
        print(f"wrote {path}", file=sys.stderr)
    return 0 if verified else 1


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"epsense: usage error: {exc}", file=sys.stderr)
        return 2
    try:
        return run_command(cfg)
    except (EpsenseError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"epsense: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"epsense: I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
