"""Command-line interface: count, sample, verify, contours, bench.

Every command writes line-delimited JSON records.  Exit codes: 0 ok, 1 a
verification suite failed, 2 configuration error, 3 regime error, 4 budget
exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from .errors import (BudgetExceeded, DecayViolation, KPViolation, MissingConstant,
                     NotSimplyConnected, RegimeMismatch, Timeout)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_REGIME, EXIT_BUDGET = 0, 1, 2, 3, 4

CONSTANT_KEYS = ("c", "c_decay", "a_dis", "a_ord", "b_dis", "f", "n_cap")
RUN_KEYS = ("beta_c", "glauber_C", "glauber_c", "r")

RECORD_FIELDS = {
    "count": ("model", "log_Z", "method", "config"),
    "rc": ("encoding", "seed", "eps", "method"),
    "potts": ("encoding", "seed", "eps", "method"),
    "verify": ("suite", "passed"),
    "contour": ("label", "size", "level", "interior_vertex_count", "faces"),
    "bench": ("seconds", "repeats", "config"),
    "error": ("kind", "reason"),
}


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- config

def parse_number(text: str) -> Fraction:
    """Integers, decimals, scientific notation and a/b fractions, kept exact."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a number: {text!r}") from None


def parse_region(path: str) -> list[tuple]:
    """One integer coordinate tuple per line; blank lines and # comments skipped."""
    from .contour import _check_simply_connected
    pts = []
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read region file: {exc}") from None
    for k, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        try:
            pts.append(tuple(int(x) for x in line.split()))
        except ValueError:
            raise ConfigError(f"{path}:{k}: expected integer coordinates") from None
    if not pts:
        raise ConfigError("region file lists no points")
    dims = {len(p) for p in pts}
    if len(dims) != 1:
        raise ConfigError("region points have mixed dimensions")
    try:
        _check_simply_connected(set(pts), dims.pop())
    except NotSimplyConnected as exc:
        raise ConfigError(f"region is not simply connected: {exc}") from None
    return sorted(set(pts))


@dataclass
class RunConfig:
    command: str
    model: str = "rc"
    torus: Optional[tuple] = None
    region: Optional[str] = None
    q: Optional[str] = None
    beta: Optional[str] = None
    p: Optional[str] = None
    eps: float = 0.05
    seed: int = 0
    bc: str = "free"
    branch: str = "auto"
    exact: bool = False
    strict: bool = False
    overrides: dict = field(default_factory=dict)

    @property
    def q_value(self) -> Fraction:
        if self.q is None:
            raise ConfigError("--q is required")
        q = parse_number(self.q)
        if q < 1:
            raise ConfigError("q must be at least 1")
        return q

    def p_value(self):
        """p as a Fraction when given directly, else 1 - e^{-beta} in floating point."""
        if self.p is not None:
            p = parse_number(self.p)
            if not 0 <= p < 1:
                raise ConfigError("p must lie in [0, 1)")
            return p
        return -math.expm1(-self.beta_value())

    def beta_value(self) -> float:
        if self.beta is not None:
            b = float(parse_number(self.beta))
            if b < 0:
                raise ConfigError("beta must be non-negative")
            return b
        p = parse_number(self.p)
        if not 0 <= p < 1:
            raise ConfigError("p must lie in [0, 1)")
        return -math.log1p(-float(p))

    def constants(self):
        from .ps_count import ConstantEstimates
        consts = ConstantEstimates()
        for k, v in self.overrides.items():
            if k in CONSTANT_KEYS:
                if k == "n_cap":
                    consts.n_cap = int(v)
                else:
                    consts.set(k, v, "configured")
        return consts

    def run_value(self, key: str, default=None):
        return self.overrides.get(key, default)

    def as_record(self) -> dict:
        out = asdict(self)
        out["torus"] = list(self.torus) if self.torus else None
        return out


def _parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"--set expects KEY=VAL, got {item!r}")
        if key not in CONSTANT_KEYS + RUN_KEYS:
            raise ConfigError(f"unknown constant {key!r}; known: {', '.join(CONSTANT_KEYS + RUN_KEYS)}")
        out[key] = float(parse_number(val))
    return out


def config_from_args(args) -> RunConfig:
    if getattr(args, "beta", None) is not None and getattr(args, "p", None) is not None:
        raise ConfigError("give exactly one of --beta and --p")
    torus = tuple(args.torus) if getattr(args, "torus", None) else None
    if torus is not None and (torus[0] < 1 or torus[1] < 2):
        raise ConfigError("--torus needs D >= 1 and N >= 2")
    if getattr(args, "eps", 0.05) is not None and not 0 < args.eps < 1:
        raise ConfigError("--eps must lie in (0, 1)")
    return RunConfig(
        command=args.command, model=getattr(args, "model", "rc"), torus=torus,
        region=getattr(args, "region", None), q=getattr(args, "q", None),
        beta=getattr(args, "beta", None), p=getattr(args, "p", None), eps=args.eps,
        seed=args.seed, bc=getattr(args, "bc", "free"), branch=getattr(args, "branch", "auto"),
        exact=getattr(args, "exact", False), strict=getattr(args, "strict", False),
        overrides=_parse_overrides(getattr(args, "set", None)))


def _require_geometry(cfg: RunConfig):
    if (cfg.torus is None) == (cfg.region is None):
        raise ConfigError("give exactly one of --torus D N and --region FILE")


def _require_temperature(cfg: RunConfig):
    if (cfg.beta is None) == (cfg.p is None):
        raise ConfigError("give exactly one of --beta and --p")


def _int_q(cfg: RunConfig) -> int:
    q = cfg.q_value
    if q.denominator != 1:
        raise ConfigError("the Potts model needs an integer q")
    return int(q)


# ---------------------------------------------------------------- output

def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    return str(x)


def dump_record(rec: dict, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(rec, sort_keys=True, indent=2, default=_jsonable)
    return json.dumps(rec, sort_keys=True, separators=(",", ":"), default=_jsonable)


def parse_record(line: str) -> dict:
    """Parse and validate one output record."""
    rec = json.loads(line)
    if not isinstance(rec, dict) or "type" not in rec:
        raise ValueError("record without a type")
    need = RECORD_FIELDS.get(rec["type"])
    if need is None:
        raise ValueError(f"unknown record type {rec['type']!r}")
    missing = [k for k in need if k not in rec]
    if missing:
        raise ValueError(f"{rec['type']} record missing {missing}")
    return rec


class Writer:
    def __init__(self, path: Optional[str], pretty: bool):
        self.pretty = pretty
        self.fh = open(path, "w") if path else sys.stdout
        self.own = bool(path)

    def write(self, rec: dict):
        self.fh.write(dump_record(rec, self.pretty) + "\n")
        self.fh.flush()

    def close(self):
        if self.own:
            self.fh.close()


# ---------------------------------------------------------------- commands

def _exact_count(cfg: RunConfig) -> dict:
    from .lattice import SimpleGraph, build_torus
    from .oracle import (exact_Z_boundary, exact_Z_potts, exact_Z_potts_boundary, exact_Z_rc,
                         region_graph)
    if cfg.model == "rc":
        p, q = cfg.p_value(), cfg.q_value
        if cfg.torus:
            ev = exact_Z_rc(build_torus(*cfg.torus), p, q)
        else:
            ev = exact_Z_boundary(parse_region(cfg.region), cfg.bc, p, q)
    else:
        q, beta = _int_q(cfg), cfg.beta_value()
        if cfg.torus:
            ev = exact_Z_potts(build_torus(*cfg.torus), beta, q)
        elif cfg.bc == "free":
            nv, edges = region_graph(parse_region(cfg.region), "free")
            ev = exact_Z_potts(SimpleGraph(nv, edges), beta, q)
        else:
            ev = exact_Z_potts_boundary(parse_region(cfg.region), beta, q,
                                        int(cfg.run_value("r", 0)))
    value = str(ev.value) if ev.is_rational else float(ev.value)
    return {"type": "count", "model": cfg.model, "exact": True, "value": value,
            "rational": ev.is_rational, "log_Z": ev.log(), "method": ev.provenance,
            "error_bound": 0.0}


def cmd_count(cfg: RunConfig) -> list[dict]:
    _require_geometry(cfg)
    _require_temperature(cfg)
    if cfg.model == "potts":
        _int_q(cfg)
    if cfg.exact:
        rec = _exact_count(cfg)
    else:
        from .ps_count import log_Z_boundary, log_Z_torus
        q, beta, consts = float(cfg.q_value), cfg.beta_value(), cfg.constants()
        beta_c = cfg.run_value("beta_c")
        if cfg.torus:
            est = log_Z_torus(q, beta, cfg.torus[0], cfg.torus[1], cfg.eps, cfg.seed,
                              cfg.branch, consts, beta_c, cfg.strict)
        else:
            est = log_Z_boundary(parse_region(cfg.region), cfg.bc, q, beta, cfg.eps, consts,
                                 beta_c, cfg.strict)
        rec = {"type": "count", "model": cfg.model, "exact": False, **est.as_record()}
    if cfg.model == "potts":
        # penalising bichromatic edges: Z^Potts = Z^RC at p = 1 - e^{-beta}
        rec["hamiltonian"] = "bichromatic"
    rec["config"] = cfg.as_record()
    return [rec]


def cmd_sample(cfg: RunConfig, count: int = 1) -> list[dict]:
    from .lattice import build_torus
    from .sampler import SampleRecord, edwards_sokal, sample_rc_torus
    _require_temperature(cfg)
    if cfg.torus is None or cfg.region is not None:
        raise ConfigError("sampling needs --torus D N")
    if count < 1:
        raise ConfigError("--count must be positive")
    q, beta = float(cfg.q_value), cfg.beta_value()
    if cfg.model == "potts":
        qi = _int_q(cfg)
    d, n = cfg.torus
    T = build_torus(d, n)
    consts = cfg.constants()
    seeds = np.random.SeedSequence(cfg.seed).generate_state(count, dtype=np.uint64).tolist()
    out = []
    for s in seeds:
        rec = sample_rc_torus(q, beta, d, n, cfg.eps, s, cfg.branch, consts,
                              cfg.run_value("beta_c"), cfg.run_value("glauber_C", 10.0),
                              cfg.run_value("glauber_c", 1.0))
        if cfg.model == "potts":
            col = edwards_sokal(T, rec.value, qi, s)
            rec = SampleRecord("potts", col, s, cfg.eps, rec.method + "+edwards-sokal")
        out.append(rec.as_record())
    return out


def cmd_verify(suite: str, cfg: RunConfig, samples: Optional[int]) -> list[dict]:
    from .checks import SUITES, run_suite
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; known: {', '.join(SUITES)}")
    kwargs = {}
    if cfg.torus and suite in ("bijection", "decomposition", "weight-identity", "parity",
                               "enumeration"):
        kwargs.update(d=cfg.torus[0], n=cfg.torus[1])
    if suite == "bijection" and samples is not None:
        kwargs.update(samples=samples, seed=cfg.seed)
    if cfg.p is not None and suite in ("decomposition", "weight-identity"):
        kwargs["p"] = parse_number(cfg.p)
    if cfg.q is not None and suite in ("decomposition", "weight-identity"):
        kwargs["q"] = cfg.q_value
    res = run_suite(suite, **kwargs)
    rec = res.as_record()
    rec.pop("seconds")
    rec["type"] = "verify"
    return [rec]


def cmd_contours(cfg: RunConfig, m: int) -> list[dict]:
    from .contour import Region, embed_simply_connected, enumerate_contours
    from .lattice import build_torus
    _require_geometry(cfg)
    if m < 0:
        raise ConfigError("--m must be non-negative")
    if cfg.torus:
        region = Region.whole(build_torus(*cfg.torus))
    else:
        emb = embed_simply_connected(parse_region(cfg.region), cfg.bc)
        region = Region.interior_of(emb.contour)
    listing = enumerate_contours(region, m)
    return [{"type": "contour", **r} for r in listing.records()]


def cmd_bench(cfg: RunConfig, repeats: int) -> list[dict]:
    times = []
    last = None
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        last = cmd_count(cfg)[0]
        times.append(time.perf_counter() - t0)
    return [{"type": "bench", "seconds": times, "repeats": len(times), "log_Z": last["log_Z"],
             "config": cfg.as_record()}]


# ---------------------------------------------------------------- entry point

def _set_threads(threads: Optional[int]) -> int:
    import numba
    limit = numba.config.NUMBA_NUM_THREADS
    if threads is None:
        env = os.environ.get("RCCOUNT_THREADS")
        threads = int(env) if env else limit
    if threads < 1:
        raise ConfigError("--threads must be positive")
    with warnings.catch_warnings():
        # probing for an optional threading backend can warn on import
        warnings.simplefilter("ignore")
        numba.set_num_threads(min(threads, limit))
    return threads


def _add_common(p: argparse.ArgumentParser, geometry=True, temperature=True):
    if geometry:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--torus", nargs=2, type=int, metavar=("D", "N"), help="periodic box T^D_N")
        g.add_argument("--region", metavar="FILE", help="simply connected region, one point per line")
        p.add_argument("--bc", choices=("free", "wired"), default="free")
    if temperature:
        p.add_argument("--q", help="number of colours (fractions allowed)")
        t = p.add_mutually_exclusive_group()
        t.add_argument("--beta", help="inverse temperature")
        t.add_argument("--p", help="edge probability; kept exact for a/b input")
        p.add_argument("--model", choices=("rc", "potts"), default="rc")
        p.add_argument("--branch", choices=("auto", "contour", "dynamics"), default="auto")
        p.add_argument("--strict", action="store_true", help="fail on decay-gate violations")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--set", action="append", metavar="KEY=VAL", help="override a constant")
    p.add_argument("--threads", type=int, help="worker cap (default $RCCOUNT_THREADS or all cores)")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--pretty", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rccount", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("count", help="approximate or exact partition function")
    _add_common(p)
    p.add_argument("--exact", action="store_true", help="exhaustive enumeration instead")
    p = sub.add_parser("sample", help="draw configurations")
    _add_common(p)
    p.add_argument("--count", type=int, default=1, help="number of samples")
    p = sub.add_parser("verify", help="run a self-check suite")
    p.add_argument("suite")
    _add_common(p, temperature=False)
    p.add_argument("--q")
    p.add_argument("--p")
    p.add_argument("--samples", type=int, help="random edge sets instead of all (bijection)")
    p = sub.add_parser("contours", help="list contours up to a size bound")
    _add_common(p, temperature=False)
    p.add_argument("--m", type=int, default=6, help="size bound")
    p = sub.add_parser("bench", help="time the count command")
    _add_common(p)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--repeats", type=int, default=3)
    return parser


def _error(kind: str, reason: str, witness=None) -> dict:
    rec = {"type": "error", "kind": kind, "reason": reason}
    if witness is not None:
        rec["witness"] = witness
    return rec


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    writer = None
    try:
        cfg = config_from_args(args)
        _set_threads(args.threads)
        writer = Writer(args.out, args.pretty)
        if args.command == "count":
            records = cmd_count(cfg)
        elif args.command == "sample":
            records = cmd_sample(cfg, args.count)
        elif args.command == "verify":
            records = cmd_verify(args.suite, cfg, args.samples)
        elif args.command == "contours":
            records = cmd_contours(cfg, args.m)
        else:
            records = cmd_bench(cfg, args.repeats)
        for rec in records:
            writer.write(rec)
        if args.command == "verify" and not all(r["passed"] for r in records):
            return EXIT_FAILED
        return EXIT_OK
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except (ConfigError, NotSimplyConnected, ValueError, OSError) as exc:
        code, rec = EXIT_CONFIG, _error("config", str(exc))
    except (RegimeMismatch, KPViolation, DecayViolation, MissingConstant) as exc:
        code = EXIT_REGIME
        rec = _error(type(exc).__name__, str(exc), getattr(exc, "witness", None))
    except (BudgetExceeded, Timeout) as exc:
        code, rec = EXIT_BUDGET, _error(type(exc).__name__, str(exc))
    finally:
        if writer is not None:
            writer.close()
    sys.stderr.write(dump_record(rec) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
