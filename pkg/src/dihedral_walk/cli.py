"""
Command-line front end.

Usage::

    dihedral-walk SUBCOMMAND [options]

Subcommands are ``coin``, ``graph``, ``spectrum``, ``evolve``, ``period``,
``localize``, ``sweep-theta`` and ``sweep-n``.  Angles accept decimal radians or
exact multiples of π such as ``pi``, ``-2pi/3`` or ``pi/4``.

Exit status: 0 success, 2 usage or invalid input, 3 I/O failure, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import re
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .cayley import build_cayley, edge_list_text, is_reversible
from .coin import CoinClass, classify_coin, coin_from_theta, coin_to_dict
from .errors import InputError, NumericalError
from .evolve import evolve_local, position_probabilities, state_to_csv
from .fourier import block_spectra, eigen_closed_form, spectrum_to_csv
from .localize import (
    InitialCondition,
    limit_time_avg,
    sweep_n,
    sweep_theta,
    time_avg_direct,
    time_avg_spectral,
)
from .period import brute_force_period, spectral_period, theorem_period

__all__ = ["ThetaExpr", "RunConfig", "UsageError", "parse_theta", "parse_init", "parse_config", "render_config", "write_output", "main"]

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERICAL = 0, 2, 3, 4
_THETA_RE = re.compile(r"^(-)?(\d+)?pi(?:/(\d+))?$")


class UsageError(InputError):
    pass


@dataclass(frozen=True)
class ThetaExpr:
    """Angle as typed on the command line together with its value in radians."""

    text: str
    value: float

    def __str__(self) -> str:
        return self.text


def parse_theta(text: str) -> ThetaExpr:
    """Parse ``[-][INT]pi[/INT]`` or a decimal.

    >>> parse_theta("2pi/3").value == 2 * math.pi / 3
    True
    """
    t = text.strip().replace(" ", "")
    m = _THETA_RE.match(t)
    if m:
        sign = -1.0 if m.group(1) else 1.0
        num = int(m.group(2)) if m.group(2) else 1
        den = int(m.group(3)) if m.group(3) else 1
        if den == 0:
            raise UsageError(f"malformed theta {text!r}: zero denominator")
        return ThetaExpr(t, sign * num * math.pi / den)
    try:
        value = float(t)
    except ValueError:
        raise UsageError(f"malformed theta {text!r}; expected e.g. 'pi', '-2pi/3' or '0.5'") from None
    if not math.isfinite(value):
        raise UsageError(f"theta must be finite, got {text!r}")
    return ThetaExpr(t, value)


def parse_init(text: str) -> InitialCondition:
    """Parse ``s=S,r=R,coin=SPEC``.

    ``SPEC`` is ``uniform``, a basis index ``0``/``1``/``2``, or three complex
    amplitudes ``a;b;c`` (Python complex syntax).  Explicit amplitudes are
    rescaled to unit norm.
    """
    fields = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        if not sep:
            raise UsageError(f"malformed init {text!r}; expected s=..,r=..,coin=..")
        fields[key.strip()] = value.strip()
    unknown = set(fields) - {"s", "r", "coin"}
    if unknown:
        raise UsageError(f"unknown init field(s) {sorted(unknown)}")
    try:
        s0 = int(fields.get("s", "0"))
        r0 = int(fields.get("r", "0"))
    except ValueError:
        raise UsageError(f"malformed init {text!r}: s and r must be integers") from None
    spec = fields.get("coin", "uniform")
    if spec == "uniform":
        return InitialCondition.uniform(s0, r0)
    if spec in ("0", "1", "2"):
        return InitialCondition.basis(int(spec), s0, r0)
    try:
        amps = np.array([complex(a.replace(" ", "")) for a in spec.split(";")])
    except ValueError:
        raise UsageError(f"malformed coin state {spec!r}") from None
    if amps.size != 3 or not np.all(np.isfinite(amps)) or np.linalg.norm(amps) == 0:
        raise UsageError(f"coin state needs three finite amplitudes, not all zero: {spec!r}")
    return InitialCondition(amps / np.linalg.norm(amps), s0, r0)


def _parse_vertices(text: str) -> tuple[tuple[int, int], ...]:
    out = []
    for item in text.split(","):
        s, sep, r = item.partition(":")
        try:
            out.append((int(s), int(r)))
        except ValueError:
            raise UsageError(f"malformed vertex {item!r}; expected s:r") from None
        if not sep:
            raise UsageError(f"malformed vertex {item!r}; expected s:r")
    return tuple(out)


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"malformed integer list {text!r}") from None


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    cls: str = "X"
    theta: ThetaExpr = ThetaExpr("pi", math.pi)
    n: int = 8
    init: str = "s=0,r=0,coin=uniform"
    T: int = 300
    t: int = 1
    t_max: int = 1000
    q_max: int = 10_000
    grid: int = 60
    vertices: tuple[tuple[int, int], ...] = ((0, 0), (1, 0))
    ns: tuple[int, ...] = (10, 20, 50)
    method: Optional[str] = None
    out: str = "-"
    fmt: Optional[str] = None
    parallel: bool = False


_FIELDS = {
    "coin": ("cls", "theta"),
    "graph": ("n",),
    "spectrum": ("cls", "theta", "n", "method", "parallel"),
    "evolve": ("cls", "theta", "n", "init", "t"),
    "period": ("cls", "theta", "n", "method", "t_max", "q_max", "parallel"),
    "localize": ("cls", "theta", "n", "init", "T", "method"),
    "sweep-theta": ("cls", "grid", "n", "init", "T", "vertices", "parallel"),
    "sweep-n": ("cls", "theta", "ns", "init", "T", "parallel"),
}
_METHODS = {
    "spectrum": ("numeric", "closed-form"),
    "period": ("theorem", "spectral", "brute", "all"),
    "localize": ("direct", "spectral", "limit"),
}
_FLAGS = {
    "cls": "--class",
    "theta": "--theta",
    "n": "--n",
    "init": "--init",
    "T": "--T",
    "t": "--t",
    "t_max": "--t-max",
    "q_max": "--q-max",
    "grid": "--grid",
    "vertices": "--vertices",
    "ns": "--ns",
    "method": "--method",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(name: str, lo: int):
    def conv(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"{name} must be >= {lo}, got {v}")
        return v

    return conv


def _class_arg(text: str) -> str:
    try:
        return CoinClass.parse(text).value
    except InputError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _wrap(fn):
    def conv(text: str):
        try:
            return fn(text)
        except UsageError as e:
            raise argparse.ArgumentTypeError(str(e)) from None

    return conv


def _init_arg(text: str) -> str:
    try:
        parse_init(text)
    except InputError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    return text


def _build_parser() -> _Parser:
    p = _Parser(prog="dihedral-walk", description="Quantum walks on Cay(D_N, {a, b}) with generalized Grover coins.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    d = RunConfig("coin")
    adders = {
        "cls": lambda q: q.add_argument("--class", dest="cls", type=_class_arg, default=d.cls, help="coin class X, Y, Z or W"),
        "theta": lambda q: q.add_argument("--theta", type=_wrap(parse_theta), default=d.theta, help="angle, e.g. pi, -2pi/3, 0.7"),
        "n": lambda q: q.add_argument("--n", type=_positive("n", 3), default=d.n, help="polygon size N >= 3"),
        "init": lambda q: q.add_argument("--init", type=_init_arg, default=d.init, help="s=S,r=R,coin=uniform|0|1|2|a;b;c"),
        "T": lambda q: q.add_argument("--T", dest="T", type=_positive("T", 1), default=d.T, help="averaging window"),
        "t": lambda q: q.add_argument("--t", dest="t", type=_positive("t", 0), default=d.t, help="number of steps"),
        "t_max": lambda q: q.add_argument("--t-max", dest="t_max", type=_positive("t-max", 1), default=d.t_max),
        "q_max": lambda q: q.add_argument("--q-max", dest="q_max", type=_positive("q-max", 2), default=d.q_max),
        "grid": lambda q: q.add_argument("--grid", type=_positive("grid", 2), default=d.grid),
        "vertices": lambda q: q.add_argument("--vertices", type=_wrap(_parse_vertices), default=d.vertices, help="e.g. 0:0,1:0"),
        "ns": lambda q: q.add_argument("--ns", type=_wrap(_parse_ints), default=d.ns, help="e.g. 10,20,50"),
        "parallel": lambda q: q.add_argument("--parallel", action="store_true"),
    }
    for name, fields in _FIELDS.items():
        q = sub.add_parser(name)
        for f in fields:
            if f == "method":
                q.add_argument("--method", choices=_METHODS[name], default=None)
            else:
                adders[f](q)
        q.add_argument("--out", default="-", help="output path, '-' for stdout")
        q.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    return p


def parse_config(argv: Sequence[str]) -> RunConfig:
    """Parse command-line tokens into a :class:`RunConfig`; raise :class:`UsageError` on bad input."""
    tokens = list(argv)
    # "-2pi/3" looks like an option to argparse; glue it onto its flag
    for i in range(len(tokens) - 1, 0, -1):
        if tokens[i - 1] == "--theta" and tokens[i].startswith("-"):
            tokens[i - 1 : i + 1] = [f"--theta={tokens[i]}"]
    ns = _build_parser().parse_args(tokens)
    values = {k: v for k, v in vars(ns).items() if k in {f.name for f in dataclasses.fields(RunConfig)}}
    return RunConfig(**values)


def render_config(cfg: RunConfig) -> list[str]:
    """Tokens that :func:`parse_config` maps back to ``cfg``."""
    argv = [cfg.subcommand]
    for f in _FIELDS[cfg.subcommand]:
        v = getattr(cfg, f)
        if f == "parallel":
            if v:
                argv.append("--parallel")
            continue
        if v is None:
            continue
        if f == "vertices":
            v = ",".join(f"{s}:{r}" for s, r in v)
        elif f == "ns":
            v = ",".join(str(x) for x in v)
        argv += [_FLAGS[f], str(v)]
    argv += ["--out", cfg.out]
    if cfg.fmt is not None:
        argv += ["--format", cfg.fmt]
    return argv


# ------------------------------------------------------------------ output


def write_output(text: str, path: str) -> None:
    """Write UTF-8 text with LF endings to ``path`` (``-`` for stdout)."""
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _csv_rows(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    text = str(v)
    return '"' + text.replace('"', '""') + '"' if ("," in text or '"' in text) else text


# ------------------------------------------------------------- subcommands


def _coin(cfg: RunConfig):
    return coin_from_theta(cfg.cls, cfg.theta.value)


def _run_coin(cfg: RunConfig, fmt: str) -> str:
    c = _coin(cfg)
    info = classify_coin(c)
    if fmt == "json":
        d = coin_to_dict(c)
        d["classification"] = dataclasses.asdict(info)
        return _json(d)
    rows = [(i, j, float(c.entries[i, j])) for i in range(3) for j in range(3)]
    return _csv_rows(("row", "col", "value"), rows)


def _run_graph(cfg: RunConfig, fmt: str) -> str:
    g = build_cayley(cfg.n)
    if fmt == "json":
        return _json({
            "n": g.n,
            "reversible": is_reversible(g),
            "arcs": [[u.s, u.r, v.s, v.r] for u, v in g.directed_arcs],
            "edges": [[u.s, u.r, v.s, v.r] for u, v in (sorted(e) for e in g.undirected_edges)],
        })
    return edge_list_text(g)


def _run_spectrum(cfg: RunConfig, fmt: str) -> str:
    c = _coin(cfg)
    if cfg.method == "closed-form":
        systems = [eigen_closed_form(c.cls, c, cfg.n, k) for k in range(cfg.n)]
    else:
        systems = block_spectra(c, cfg.n, parallel=cfg.parallel)
    if fmt == "json":
        rows = []
        for s in systems:
            for j, lam in enumerate(s.eigenvalues):
                rows.append({"k": s.k, "j": j, "re": lam.real, "im": lam.imag,
                             "phase": float(s.phases[j]), "residual": float(s.residuals[j])})
        return _json(rows)
    return spectrum_to_csv(systems)


def _run_evolve(cfg: RunConfig, fmt: str) -> str:
    c = _coin(cfg)
    state = evolve_local(parse_init(cfg.init).state(cfg.n), c, cfg.t)
    if fmt == "json":
        p = position_probabilities(state, cfg.t)
        return _json({
            "n": cfg.n,
            "t": cfg.t,
            "amplitudes": [[a.real, a.imag] for a in state.amplitudes],
            "probabilities": [float(v) for v in p.p],
        })
    return state_to_csv(state)


def _run_period(cfg: RunConfig, fmt: str) -> str:
    method = cfg.method or "theorem"
    methods = ("theorem", "spectral", "brute") if method == "all" else (method,)
    results = []
    for m in methods:
        if m == "theorem":
            results.append(theorem_period(cfg.cls, cfg.theta.value, cfg.n))
            continue
        c = _coin(cfg)
        if m == "spectral":
            results.append(spectral_period(c, cfg.n, cfg.q_max, parallel=cfg.parallel))
        else:
            mode = "eigen" if cfg.t_max > 1000 else "matrix"
            results.append(brute_force_period(c, cfg.n, cfg.t_max, mode=mode))
    if fmt == "json":
        out = [r.to_dict() for r in results]
        return _json(out[0] if len(out) == 1 else out)
    rows = []
    for r in results:
        d = r.to_dict()
        rows.append((d["method"], d["outcome"], d.get("tau"), d.get("witness"), d.get("cap")))
    return _csv_rows(("method", "outcome", "tau", "witness", "cap"), rows)


def _run_localize(cfg: RunConfig, fmt: str) -> str:
    c = _coin(cfg)
    init = parse_init(cfg.init)
    method = cfg.method or "direct"
    if method == "direct":
        res = time_avg_direct(c, cfg.n, init, cfg.T)
    elif method == "spectral":
        res = time_avg_spectral(c, cfg.n, init, cfg.T)
    else:
        res = limit_time_avg(c, cfg.n, init)
    if fmt == "json":
        d = {
            "n": res.n,
            "T": res.T,
            "method": res.method,
            "theta": c.theta,
            "pbar": [{"s": s, "r": r, "pbar": res.at(s, r)} for s in (0, 1) for r in range(res.n)],
        }
        if res.diagonal_only is not None:
            d["diagonal_only"] = [float(v) for v in res.diagonal_only]
        return _json(d)
    return res.to_csv(label=c.theta)


def _sweep_json(sw) -> str:
    return _json({
        "axis": sw.axis,
        "vertices": [[v.s, v.r] for v in sw.vertices],
        "points": [{"value": v, "pbar": list(p)} for v, p in sw.points],
    })


def _run_sweep_theta(cfg: RunConfig, fmt: str) -> str:
    sw = sweep_theta(cfg.cls, cfg.grid, cfg.n, parse_init(cfg.init), cfg.T, cfg.vertices, parallel=cfg.parallel)
    return _sweep_json(sw) if fmt == "json" else sw.to_csv()


def _run_sweep_n(cfg: RunConfig, fmt: str) -> str:
    sw = sweep_n(cfg.cls, cfg.theta.value, cfg.ns, parse_init(cfg.init), cfg.T, parallel=cfg.parallel)
    return _sweep_json(sw) if fmt == "json" else sw.to_csv()


_RUNNERS = {
    "coin": _run_coin,
    "graph": _run_graph,
    "spectrum": _run_spectrum,
    "evolve": _run_evolve,
    "period": _run_period,
    "localize": _run_localize,
    "sweep-theta": _run_sweep_theta,
    "sweep-n": _run_sweep_n,
}


def run(cfg: RunConfig) -> str:
    """Execute ``cfg`` and return the rendered output text."""
    fmt = cfg.fmt or ("json" if cfg.subcommand == "period" else "csv")
    return _RUNNERS[cfg.subcommand](cfg, fmt)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
        text = run(cfg)
    except NumericalError as e:
        print(f"dihedral-walk: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except InputError as e:
        print(f"dihedral-walk: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        write_output(text, cfg.out)
    except OSError as e:
        print(f"dihedral-walk: cannot write {cfg.out!r}: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
