"""Command-line interface.

Every subcommand builds one output document and writes it only after the
computation succeeded, so a nonzero exit never leaves partial output.

Exit codes: 0 ok, 2 bad parameters, 3 internal consistency failure,
4 KZ integration failure (resonance, step-size underflow, ...).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .modular import (ConsistencyError, ModularData, label_dict, quantum_dimension,
                      s_matrix, verify_modular_relations, verlinde_fusion)
from .norms import (NormResult, conjecture_norm, integrability_window, norm_closed_form)
from .rootdata import DomainError, LevelContext, Weight, alcove_weights, spin_str, twice_spin

EXIT_OK, EXIT_PARAM, EXIT_CONSISTENCY, EXIT_KZ = 0, 2, 3, 4
MODULAR_EXIT_TOL = 1e-10
CACHE_ENV = "WZWNORMS_CACHE_DIR"


class ParameterError(DomainError):
    pass


class KZFailure(RuntimeError):
    pass


@dataclasses.dataclass
class RunConfig:
    """Fully resolved parameters of one invocation. Round-trips through JSON."""

    subcommand: str
    n: int = 2
    level: Optional[int] = None
    kappa: Optional[float] = None
    j: Optional[str] = None
    k: Optional[int] = None
    weight: Optional[list] = None
    tol: float = 1e-10
    i_range: str = "k-1"
    ratio: Optional[str] = None
    j_min: Optional[str] = None
    j_max: Optional[str] = None
    levels: Optional[list] = None
    jobs: int = 1
    fmt: str = "json"
    cache_dir: Optional[str] = None
    timing: bool = False
    corrupt_s: bool = False

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))


# ---- parsing helpers -------------------------------------------------------

def _spin_arg(text: str) -> str:
    try:
        return spin_str(twice_spin(text))
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _weight_arg(text: str) -> list:
    try:
        out = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"weight must be comma-separated integers, got {text!r}")
    return out


def parse_levels(text: str) -> list[int]:
    """``"1..8"``, ``"3"`` or ``"1,2,5"``."""
    try:
        if ".." in text:
            a, b = text.split("..")
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level range {text!r}")


def spin_record(two_j: int) -> dict:
    return {"spin": spin_str(two_j), "twice": two_j}


def _num(x) -> Optional[float]:
    x = float(x)
    return x if math.isfinite(x) else None


def _ctx(cfg: RunConfig, need_level: bool = True) -> LevelContext:
    if cfg.level is None and (need_level or cfg.kappa is None):
        raise ParameterError("--level is required")
    if cfg.level is not None and cfg.level < 0:
        raise ParameterError("--level must be >= 0")
    if cfg.level is not None:
        return LevelContext.at_level(cfg.n, cfg.level)
    return LevelContext.generic(cfg.n, cfg.kappa)


def _weight(cfg: RunConfig, ctx: Optional[LevelContext]) -> Weight:
    level = ctx.K if ctx is not None else None
    if cfg.weight is not None:
        w = Weight(tuple(cfg.weight), level)
    elif cfg.j is not None:
        if cfg.n != 2:
            raise ParameterError("--j is only meaningful for n=2; use --weight")
        w = Weight.spin(cfg.j, level)
    else:
        raise ParameterError("need --j or --weight")
    if w.n != cfg.n:
        raise ParameterError(f"weight {list(w.coords)} has the wrong rank for n={cfg.n}")
    return w


# ---- output ----------------------------------------------------------------

class Document:
    """A JSON payload plus an optional flat table for csv/pretty output."""

    def __init__(self, payload: dict, columns=None, rows=None):
        self.payload = payload
        self.columns = columns
        self.rows = rows or []

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.payload, indent=2, sort_keys=True, allow_nan=False) + "\n"
        if self.columns is None:
            raise ParameterError(f"format {fmt!r} is not available for this command")
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.columns)
            w.writerows(self.rows)
            return buf.getvalue()
        cells = [[str(c) for c in self.columns]] + [[_fmt_cell(c) for c in r] for r in self.rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(self.columns))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


def _fmt_cell(c) -> str:
    if isinstance(c, float):
        return f"{c:.12g}"
    return "" if c is None else str(c)


def _header(cfg: RunConfig) -> dict:
    return {"command": cfg.subcommand, "version": __version__}


# ---- tables ----------------------------------------------------------------

def cmd_alcove(cfg: RunConfig) -> Document:
    ctx = _ctx(cfg)
    labels = alcove_weights(ctx)
    doc = _header(cfg) | {"n": cfg.n, "level": ctx.K, "weights": [label_dict(w) for w in labels]}
    rows = [[i, w.label(), ",".join(map(str, w.coords))] for i, w in enumerate(labels)]
    return Document(doc, ["index", "label", "coords"], rows)


def _smatrix(cfg: RunConfig, ctx: LevelContext) -> np.ndarray:
    S = s_matrix(ctx)
    if cfg.corrupt_s:
        # test hook: break unitarity on purpose
        S = S.copy()
        S[0, 0] += 1e-6
    return S


def cmd_smatrix(cfg: RunConfig) -> Document:
    ctx = _ctx(cfg)
    data = ModularData.build(ctx)
    doc = _header(cfg) | data.to_dict()
    rows = [[a, b, float(z.real) + 0.0, float(z.imag) + 0.0]
            for a, row in enumerate(data.S) for b, z in enumerate(row)]
    return Document(doc, ["row", "col", "re", "im"], rows)


def cmd_fusion(cfg: RunConfig) -> Document:
    ctx = _ctx(cfg)
    labels = alcove_weights(ctx)
    N = verlinde_fusion(ctx, _smatrix(cfg, ctx))
    nonzero = [(a, b, c, int(N[a, b, c])) for a, b, c in zip(*np.nonzero(N))]
    doc = _header(cfg) | {
        "n": cfg.n, "level": ctx.K,
        "labels": [label_dict(w) for w in labels],
        "N": N.tolist(),
        "nonzero": [{"a": labels[a].label(), "b": labels[b].label(), "c": labels[c].label(),
                     "N": v} for a, b, c, v in nonzero],
    }
    rows = [[labels[a].label(), labels[b].label(), labels[c].label(), v] for a, b, c, v in nonzero]
    return Document(doc, ["a", "b", "c", "N"], rows)


def cmd_qdim(cfg: RunConfig) -> Document:
    ctx = _ctx(cfg, need_level=False)
    if cfg.j is None and cfg.weight is None:
        weights = alcove_weights(ctx)
    else:
        weights = [_weight(cfg, ctx if ctx.has_level else None)]
    vals = [quantum_dimension(w, ctx) for w in weights]
    doc = _header(cfg) | {
        "n": cfg.n, "level": ctx.K, "kappa": float(ctx.kappa),
        "qdims": [label_dict(w) | {"qdim": _num(v)} for w, v in zip(weights, vals)],
    }
    rows = [[w.label(), float(v)] for w, v in zip(weights, vals)]
    return Document(doc, ["label", "qdim"], rows)


# ---- norms -----------------------------------------------------------------

def _norm_record(res: NormResult) -> dict:
    status = "finite" if res.order == 0 else ("zero" if res.order > 0 else "pole")
    return {
        "value": _num(res.value),
        "status": status,
        "order": res.order,
        "factors": [{"index": list(f.index), "x_plus": str(f.x_plus), "x_minus": str(f.x_minus),
                     "coefficient": _num(f.coefficient), "order": f.order,
                     "kind": "zero" if f.order > 0 else "pole" if f.order < 0 else "regular"}
                    for f in res.factors],
        "offending": [f.describe() for f in res.offending],
    }


def cmd_norm(cfg: RunConfig) -> Document:
    if cfg.k is None:
        raise ParameterError("--k is required")
    if (cfg.level is None) == (cfg.kappa is None):
        raise ParameterError("give exactly one of --level and --kappa")
    kappa = float(cfg.level + cfg.n if cfg.level is not None else cfg.kappa)
    if not kappa > 0:
        raise ParameterError("kappa must be positive")
    doc = _header(cfg) | {"n": cfg.n, "k": cfg.k, "kappa": kappa, "level": cfg.level}
    if cfg.n == 2 and cfg.weight is None:
        if cfg.j is None:
            raise ParameterError("--j is required")
        res = norm_closed_form(cfg.j, cfg.k, kappa)
        doc["j"] = spin_record(twice_spin(cfg.j))
        window = integrability_window(cfg.level, cfg.j, cfg.k) if cfg.level is not None else None
    else:
        lam = _weight(cfg, None)
        res = conjecture_norm(cfg.n, lam, cfg.k, kappa, cfg.i_range)
        doc["weight"] = list(lam.coords)
        doc["i_range"] = cfg.i_range
        window = None
    doc |= _norm_record(res)
    doc["window"] = window
    if cfg.ratio is not None:
        if cfg.n != 2:
            raise ParameterError("--ratio is only available for n=2")
        other = norm_closed_form(cfg.ratio, cfg.k, kappa)
        doc["ratio_to"] = spin_record(twice_spin(cfg.ratio))
        ok = res.finite_nonzero and other.finite_nonzero
        doc["ratio"] = _num(res.value / other.value) if ok else None
    rows = [[",".join(map(str, f["index"])), f["x_plus"], f["x_minus"], f["coefficient"], f["order"]]
            for f in doc["factors"]]
    rows.append(["total", "", "", doc["value"], doc["order"]])
    return Document(doc, ["i", "x_plus", "x_minus", "coefficient", "order"], rows)


# ---- kz-verify -------------------------------------------------------------

def cache_dir(cfg: RunConfig) -> Path:
    if cfg.cache_dir:
        return Path(cfg.cache_dir)
    if os.environ.get(CACHE_ENV):
        return Path(os.environ[CACHE_ENV])
    return Path.home() / ".cache" / "wzwnorms"


def cache_key(two_j: int, k: int, kappa: float, tol: float) -> str:
    blob = json.dumps({"twice_j": two_j, "k": k, "kappa": repr(float(kappa)),
                       "tol": repr(float(tol)), "version": __version__}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _kz_one(args):
    two_j, k, kappa, tol = args
    from .kzflow import FrobeniusError, ResonanceError, TransportError, norm_via_kz
    try:
        r = norm_via_kz(Fraction(two_j, 2), k, kappa, tol)
    except (ResonanceError, TransportError, FrobeniusError) as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}
    return {"value": r.value, "error_estimate": r.error_estimate, "A": r.details["A"]}


def _kz_cached(jobs_args: list, cdir: Path, n_jobs: int) -> list[dict]:
    results: list = [None] * len(jobs_args)
    todo = []
    for i, a in enumerate(jobs_args):
        path = cdir / (cache_key(*a) + ".json")
        try:
            results[i] = json.loads(path.read_text())
        except (OSError, ValueError):
            todo.append(i)
    if todo:
        if n_jobs > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=n_jobs) as ex:
                fresh = list(ex.map(_kz_one, [jobs_args[i] for i in todo]))
        else:
            fresh = [_kz_one(jobs_args[i]) for i in todo]
        for i, r in zip(todo, fresh):
            results[i] = r
            if "error" not in r:
                try:
                    cdir.mkdir(parents=True, exist_ok=True)
                    tmp = cdir / (cache_key(*jobs_args[i]) + ".tmp")
                    tmp.write_text(json.dumps(r, sort_keys=True))
                    tmp.replace(cdir / (cache_key(*jobs_args[i]) + ".json"))
                except OSError:
                    pass  # cache is advisory
    return results


def cmd_kz_verify(cfg: RunConfig) -> Document:
    if cfg.n != 2:
        raise ParameterError("kz-verify is only implemented for n=2")
    if cfg.k is None or cfg.kappa is None or cfg.j_max is None:
        raise ParameterError("--k, --kappa and --j-max are required")
    if cfg.k < 0:
        raise ParameterError("--k must be >= 0")
    if not cfg.tol > 0:
        raise ParameterError("--tol must be positive")
    kappa = float(cfg.kappa)
    lo = twice_spin(cfg.j_min) if cfg.j_min is not None else max(cfg.k, 1)
    lo = max(lo, cfg.k)
    hi = twice_spin(cfg.j_max)
    grid = list(range(lo, hi + 1))
    if not grid:
        raise ParameterError(f"empty j-grid: need k <= 2j <= 2 j_max (k={cfg.k})")
    t0 = time.perf_counter()
    raw = _kz_cached([(tj, cfg.k, kappa, cfg.tol) for tj in grid], cache_dir(cfg), max(1, cfg.jobs))
    elapsed = time.perf_counter() - t0
    failed = [(tj, r["error"]) for tj, r in zip(grid, raw) if "error" in r]
    if failed:
        raise KZFailure("; ".join(f"j={spin_str(tj)}: {e}" for tj, e in failed))
    rows, records, ratios = [], [], []
    for tj, r in zip(grid, raw):
        closed = norm_closed_form(Fraction(tj, 2), cfg.k, kappa)
        ratio = r["value"] / closed.value if closed.finite_nonzero else math.nan
        ratios.append(ratio)
        records.append(spin_record(tj) | {"kz": r["value"], "kz_error": r["error_estimate"],
                                          "closed_form": _num(closed.value), "ratio": _num(ratio)})
        rows.append([spin_str(tj), r["value"], closed.value, ratio])
    arr = np.array(ratios)
    dev = float(np.ptp(arr) / abs(arr.mean())) if np.isfinite(arr).all() else math.nan
    doc = _header(cfg) | {"k": cfg.k, "kappa": kappa, "tol": cfg.tol, "rows": records,
                          "max_relative_deviation": _num(dev)}
    print(f"kz-verify: {len(grid)} points in {elapsed:.3f} s", file=sys.stderr)
    if cfg.timing:
        doc["wall_clock_s"] = elapsed
    return Document(doc, ["j", "kz", "closed_form", "ratio"], rows)


# ---- modular-check ---------------------------------------------------------

def cmd_modular_check(cfg: RunConfig) -> Document:
    levels = cfg.levels if cfg.levels is not None else ([cfg.level] if cfg.level is not None else None)
    if not levels:
        raise ParameterError("--levels (or --level) is required")
    reports = []
    for K in levels:
        ctx = _ctx(dataclasses.replace(cfg, level=K))
        reports.append(verify_modular_relations(ctx, _smatrix(cfg, ctx)))
    worst = max(r.worst for r in reports)
    doc = _header(cfg) | {"n": cfg.n, "reports": [r.to_dict() for r in reports],
                          "max_residual": _num(worst), "passed": all(r.passed for r in reports)}
    if not worst <= MODULAR_EXIT_TOL:
        bad = [f"K={r.ctx.K} {k}={v:.3e}" for r in reports for k, v in r.residuals.items()
               if not v <= MODULAR_EXIT_TOL]
        raise ConsistencyError("residual above 1e-10: " + ", ".join(bad))
    rows = [[r.ctx.K, k, float(v)] for r in reports for k, v in sorted(r.residuals.items())]
    return Document(doc, ["level", "check", "residual"], rows)


COMMANDS = {
    "alcove": cmd_alcove, "smatrix": cmd_smatrix, "fusion": cmd_fusion, "qdim": cmd_qdim,
    "norm": cmd_norm, "kz-verify": cmd_kz_verify, "modular-check": cmd_modular_check,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wzwnorms", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2, help="rank + 1 of sl_n (default 2)")
    common.add_argument("--format", dest="fmt", choices=["json", "csv", "pretty"], default="json")

    def add(name, helptext, level=True, kappa=False):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        if level:
            sp.add_argument("--level", type=int)
        if kappa:
            sp.add_argument("--kappa", type=float)
        return sp

    add("alcove", "list the level-K alcove weights")
    add("smatrix", "S and T matrices")
    add("fusion", "Verlinde fusion coefficients").add_argument("--corrupt-s", action="store_true",
                                                               help=argparse.SUPPRESS)
    sp = add("qdim", "quantum dimensions", kappa=True)
    sp.add_argument("--j", type=_spin_arg)
    sp.add_argument("--weight", type=_weight_arg)

    sp = add("norm", "closed-form norm of Phi_j^{jk}", kappa=True)
    sp.add_argument("--j", type=_spin_arg)
    sp.add_argument("--weight", type=_weight_arg, help="sl_n weight (conjectural product)")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--ratio", type=_spin_arg, metavar="J2")
    sp.add_argument("--i-range", choices=["k", "k-1"], default="k-1")

    sp = add("kz-verify", "KZ numerics vs the closed form over a j-grid", level=False, kappa=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--j-min", type=_spin_arg)
    sp.add_argument("--j-max", type=_spin_arg, required=True)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--cache-dir")
    sp.add_argument("--timing", action="store_true", help="include wall-clock in the output")

    sp = add("modular-check", "SL2(Z) and Verlinde residuals over a level range")
    sp.add_argument("--levels", type=parse_levels)
    sp.add_argument("--corrupt-s", action="store_true", help=argparse.SUPPRESS)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    names = {f.name for f in dataclasses.fields(RunConfig)}
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in names and v is not None})


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute a config; returns ``(exit_code, stdout_text)``."""
    try:
        if cfg.subcommand not in COMMANDS:
            raise ParameterError(f"unknown subcommand {cfg.subcommand!r}")
        if cfg.n < 2:
            raise ParameterError("--n must be >= 2")
        return EXIT_OK, COMMANDS[cfg.subcommand](cfg).render(cfg.fmt)
    except ConsistencyError as exc:
        print(f"error: consistency check failed: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY, ""
    except KZFailure as exc:
        print(f"error: KZ integration failed: {exc}", file=sys.stderr)
        return EXIT_KZ, ""
    except (DomainError, ZeroDivisionError) as exc:
        name = type(exc).__name__
        from .kzflow import FrobeniusError, ResonanceError, TransportError
        if isinstance(exc, (ResonanceError, TransportError, FrobeniusError)):
            print(f"error: KZ integration failed: {name}: {exc}", file=sys.stderr)
            return EXIT_KZ, ""
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM, ""


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    code, text = run(config_from_args(ns))
    if code == EXIT_OK:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
