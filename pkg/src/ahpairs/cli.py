"""Command-line interface: ``ahpairs <group> <command> [options]``.

Reports go to stdout (or ``--out``) as CSV with ``#``-prefixed header lines
echoing the tool version and effective configuration, or as JSON with the
same content.  Exit codes: 0 success, 1 usage or input error, 2 table
verification mismatch, 3 height beyond the certified range of a table.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, models, pairstats, synthetic, zero_store
from .errors import AhPairsError, RangeBeyondCertified

EXIT_MISMATCH = 2
EXIT_RANGE = 3


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of numbers, got {text!r}")


def _ints(text: str) -> list[int]:
    vals = _floats(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}")
    return [int(v) for v in vals]


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class Report:
    """Rows plus configuration and summary, rendered deterministically."""

    def __init__(self, command: str, config: dict, columns: list[str]):
        self.command = command
        self.config = config
        self.columns = columns
        self.rows: list[list] = []
        self.summary: dict = {}

    def add(self, *values):
        self.rows.append(list(values))

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {
                "tool": f"ahpairs {__version__}",
                "command": self.command,
                "config": {k: _jsonable(v) for k, v in self.config.items()},
                "summary": {k: _jsonable(v) for k, v in self.summary.items()},
                "rows": [dict(zip(self.columns, map(_jsonable, r))) for r in self.rows],
            }
            return json.dumps(doc, indent=2) + "\n"
        buf = io.StringIO()
        buf.write(f"# ahpairs {__version__}\n# command: {self.command}\n")
        for k, v in self.config.items():
            buf.write(f"# {k}: {_fmt_config(v)}\n")
        for k, v in self.summary.items():
            buf.write(f"# summary {k}: {_fmt(v)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _fmt_config(v):
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    return _fmt(v)


def _config(args, *names) -> dict:
    cfg = {}
    for n in names:
        v = getattr(args, n)
        if isinstance(v, Path):
            v = str(v.resolve())
        cfg[n] = v
    cfg["cache_dir"] = str(zero_store.cache_dir(args.cache_dir).resolve())
    return cfg


def _header_lines(cfg: dict, command: str) -> list[str]:
    # the file's own path is left out so rewriting elsewhere gives the same bytes
    lines = [f"ahpairs {__version__}", f"command: {command}"]
    lines += [f"{k}: {_fmt_config(v)}" for k, v in cfg.items() if k not in ("output", "cache_dir")]
    return lines


def _load(args, T_needed: float) -> zero_store.ZeroSet:
    """The input table, or engine zeros up to ``T_needed`` (cached)."""
    if args.input is not None:
        return zero_store.read_table(args.input, trusted=True)
    cache = False if args.no_cache else args.cache_dir
    return zero_store.computed_zeros(float(T_needed), cache=cache)


# -- zeros ------------------------------------------------------------------------

def cmd_zeros(args) -> tuple[Report, int]:
    if args.action == "compute":
        cfg = _config(args, "t_max", "output")
        zs = zero_store.computed_zeros(args.t_max, cache=False if args.no_cache else args.cache_dir)
        rep = Report("zeros compute", cfg, ["count", "first", "last", "t_max"])
        rep.add(len(zs), zs.ordinates[0] if len(zs) else math.nan, zs.ordinates[-1] if len(zs) else math.nan, zs.t_max)
        if args.output is not None:
            zero_store.write_table(zs, args.output, _header_lines(cfg, "zeros compute"))
        return rep, 0
    if args.action == "ingest":
        cfg = _config(args, "table", "output")
        zs = zero_store.read_table(args.table)
        rep = Report("zeros ingest", cfg, ["count", "first", "last", "t_max", "source"])
        rep.add(len(zs), zs.ordinates[0] if len(zs) else math.nan, zs.ordinates[-1] if len(zs) else math.nan, zs.t_max, zs.source)
        if args.output is not None:
            zero_store.write_table(zs, args.output, _header_lines(cfg, "zeros ingest"))
        return rep, 0
    cfg = _config(args, "table", "tol")
    zs = zero_store.read_table(args.table)
    report = zero_store.verify_against_engine(zs, tol=args.tol)
    rep = Report("zeros verify", cfg, ["index", "value", "nearest", "distance"])
    for m in report.mismatches:
        rep.add(m.index, m.value, m.nearest, m.distance)
    rep.summary = {
        "table_count": report.table_count,
        "engine_count": report.engine_count,
        "mismatches": len(report.mismatches),
        "ok": report.ok,
    }
    return rep, 0 if report.ok else EXIT_MISMATCH


# -- stats ------------------------------------------------------------------------

def cmd_stats(args) -> tuple[Report, int]:
    heights = args.T
    reach = max(heights)
    if getattr(args, "lam", None):
        # windows [t, t + lambda/L] run past T
        reach += max(args.lam) / pairstats.rescale_factor(min(heights)) + 1.0
    zs = _load(args, reach)
    if args.action == "pairs":
        cfg = _config(args, "input", "T", "lam", "unfold")
        rep = Report("stats pairs", cfg, ["T", "lambda", "pair_count", "d_statistic", "d_asymptotic"])
        for T in heights:
            for lam in args.lam:
                rep.add(
                    T,
                    lam,
                    pairstats.pair_count(zs, T, lam, unfold=args.unfold),
                    pairstats.d_statistic(zs, T, lam),
                    models.d_asymptotic(T, lam).value if not zs.rescaled else math.nan,
                )
        return rep, 0
    if args.action == "densities":
        cfg = _config(args, "input", "T", "M", "unfold")
        rep = Report("stats densities", cfg, ["T", "k", "half", "count", "density", "gue_prediction"])
        for T in heights:
            bd = pairstats.bin_densities(zs, T, args.M, unfold=args.unfold)
            for k in range(bd.k_max + 1):
                rep.add(T, k, k / 2, bd.counts[k], bd.densities[k], models.gue_bin_mass(k))
        return rep, 0
    if args.action == "variance":
        cfg = _config(args, "input", "T", "lam", "with_s")
        cols = ["T", "lambda", "count_variance", "d_value", "abs_diff", "diff_over_L2"]
        if args.with_s:
            cols += ["s_variance", "s_variance_over_T", "log_target"]
        rep = Report("stats variance", cfg, cols)
        for T in heights:
            L = pairstats._scale(zs, T)
            for lam in args.lam:
                cv = pairstats.windowed_count_variance(zs, T, lam)
                dv = pairstats.d_statistic(zs, T, lam)
                row = [T, lam, cv, dv, abs(cv - dv), abs(cv - dv) / L**2]
                if args.with_s:
                    sv = pairstats.windowed_s_variance(zs, T, lam)
                    row += [sv, sv / T, math.log(2 + lam) / math.pi**2]
                rep.add(*row)
        return rep, 0
    cfg = _config(args, "input", "T")
    rep = Report("stats multiplicity", cfg, ["T", "n", "n_star", "n_circledast", "n_simple", "n_critical"])
    for T in heights:
        mc = pairstats.multiplicity_counts(zs, T)
        rep.add(T, mc.n, mc.n_star, mc.n_circledast, mc.n_simple, mc.n_critical)
    return rep, 0


# -- models ------------------------------------------------------------------------

def cmd_models(args) -> tuple[Report, int]:
    if args.action == "sumid":
        cfg = _config(args, "M")
        rep = Report("models sumid", cfg, ["M", "direct", "closed", "diff"])
        for M in args.M:
            d, c = models.sum_identity(M)
            rep.add(M, d, c, d - c)
        return rep, 0
    if args.action == "compare":
        cfg = _config(args, "k", "p0")
        rep = Report("models compare", cfg, ["k", "half", "ah_density", "gue_bin_mass"])
        for k in args.k:
            rep.add(k, k / 2, models.ah_density_prediction(k, args.p0), models.gue_bin_mass(abs(k)))
        return rep, 0
    cfg = _config(args, "input", "T", "M", "unfold")
    zs = _load(args, args.T if args.T is not None else 0.0)
    T = args.T if args.T is not None else zs.t_max
    bd = pairstats.bin_densities(zs, T, max(args.M), unfold=args.unfold)
    rep = Report(
        "models theorem2",
        cfg,
        ["M", "lhs", "rhs", "diff", "sqrt_log_M", "ah2", "p0_from_halves", "p0_from_integers", "max_abs_ah1"],
    )
    for M in args.M:
        lhs = models.theorem2_lhs(bd, M)
        rhs = models.theorem2_rhs(bd, M)
        p_half, p_int = models.p0_estimate(bd, M)
        rep.add(
            M,
            lhs,
            rhs.value,
            lhs - rhs.value,
            rhs.envelopes["sqrt_log_M"],
            models.ah2_check(bd, M),
            p_half,
            p_int,
            float(np.max(np.abs(models.ah1_check(bd, M)))),
        )
    return rep, 0


# -- synth -------------------------------------------------------------------------

def _gaps(spec: str) -> synthetic.GapDistribution:
    if spec in synthetic.NAMED_GAPS:
        return synthetic.NAMED_GAPS[spec]()
    return synthetic.GapDistribution.from_json(Path(spec).read_text(encoding="utf-8"))


def cmd_synth(args) -> tuple[Report, int]:
    if args.action == "fit":
        cfg = _config(args, "targets", "K", "gmax", "penalty", "output")
        if args.targets == "ah":
            targets = synthetic.ah_targets(args.K)
        else:
            raw = json.loads(Path(args.targets).read_text(encoding="utf-8"))
            targets = {float(m): float(v) for m, v in raw.items()}
        q = synthetic.fit_gap_distribution(targets, args.gmax, penalty=args.penalty)
        rep = Report("synth fit", cfg, ["g", "mass"])
        for g, p in q.mass.items():
            rep.add(g, p)
        rep.summary = {"residual": q.residual}
        if args.output is not None:
            doc = json.loads(q.to_json())
            doc["config"] = {k: _jsonable(v) for k, v in cfg.items()}
            doc["tool"] = f"ahpairs {__version__}"
            Path(args.output).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        return rep, 0
    cfg = _config(args, "n", "gaps", "jitter", "seed", "mode", "M", "output")
    if args.gaps == "poisson":
        zs = synthetic.generate_poisson(args.n, args.seed, args.mode)
    else:
        spec = synthetic.SyntheticSpec(args.n, _gaps(args.gaps), args.jitter, args.seed, args.mode)
        zs = synthetic.generate_ah_process(spec)
    if args.output is not None:
        zero_store.write_table(zs, args.output, _header_lines(cfg, "synth generate"))
    rep = Report("synth generate", cfg, ["k", "pairs", "max_residual"])
    res = pairstats.ah_residuals(zs, zs.t_max, args.M, unfold=args.mode == "mapped")
    by_k = res.max_by_k()
    for k in range(int(2 * args.M) + 1):
        rep.add(k, int(np.count_nonzero(res.k == k)), by_k.get(k, 0.0))
    rep.summary = {"count": len(zs), "t_max": zs.t_max}
    return rep, 0


# -- parser ------------------------------------------------------------------------

def _common(top: bool) -> argparse.ArgumentParser:
    # subcommands repeat the shared options without defaults so that a value
    # given before the subcommand is not reset
    d = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=d("csv"))
    common.add_argument("--out", type=Path, default=d(None), help="write the report here instead of stdout")
    common.add_argument("--cache-dir", type=Path, default=d(None), help="zero cache (default $AHPAIRS_CACHE_DIR)")
    common.add_argument("--no-cache", action="store_true", default=d(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common(top=False)
    p = argparse.ArgumentParser(prog="ahpairs", description=__doc__.split("\n")[0], parents=[_common(top=True)])
    p.add_argument("--version", action="version", version=f"ahpairs {__version__}")
    groups = p.add_subparsers(dest="group", required=True)

    z = groups.add_parser("zeros", help="compute, ingest and verify zero tables").add_subparsers(dest="action", required=True)
    zc = z.add_parser("compute", parents=[common])
    zc.add_argument("--t-max", type=float, required=True)
    zc.add_argument("--output", type=Path)
    zi = z.add_parser("ingest", parents=[common])
    zi.add_argument("--table", type=Path, required=True)
    zi.add_argument("--output", type=Path)
    zv = z.add_parser("verify", parents=[common])
    zv.add_argument("--table", type=Path, required=True)
    zv.add_argument("--tol", type=float, default=1e-6)

    s = groups.add_parser("stats", help="pair statistics").add_subparsers(dest="action", required=True)
    for name in ("pairs", "densities", "variance", "multiplicity"):
        sp = s.add_parser(name, parents=[common])
        sp.add_argument("--input", type=Path, help="zero table (default: engine zeros)")
        sp.add_argument("--T", type=_floats, required=True, help="comma list of heights")
        if name in ("pairs", "variance"):
            sp.add_argument("--lambda", dest="lam", type=_floats, required=True)
        if name == "densities":
            sp.add_argument("--M", type=float, required=True)
        if name in ("pairs", "densities"):
            sp.add_argument("--unfold", action="store_true")
        if name == "variance":
            sp.add_argument("--with-s", action="store_true", help="also integrate S(t+h)-S(t) squared")

    m = groups.add_parser("models", help="model predictions and identities").add_subparsers(dest="action", required=True)
    mc = m.add_parser("compare", parents=[common])
    mc.add_argument("--k", type=_ints, required=True)
    mc.add_argument("--p0", type=float, required=True)
    mt = m.add_parser("theorem2", parents=[common])
    mt.add_argument("--input", type=Path)
    mt.add_argument("--T", type=float, default=None, help="height (default: table t_max)")
    mt.add_argument("--M", type=_ints, required=True)
    mt.add_argument("--unfold", action="store_true")
    ms = m.add_parser("sumid", parents=[common])
    ms.add_argument("--M", type=_ints, required=True)

    y = groups.add_parser("synth", help="synthetic processes").add_subparsers(dest="action", required=True)
    yg = y.add_parser("generate", parents=[common])
    yg.add_argument("--n", type=int, required=True)
    yg.add_argument("--gaps", required=True, help="lattice1, half-three-halves, poisson or a gap JSON file")
    yg.add_argument("--seed", type=int, required=True)
    yg.add_argument("--jitter", type=float, default=0.0)
    yg.add_argument("--mode", choices=synthetic.MODES, default="rescaled")
    yg.add_argument("--M", type=float, default=4.0, help="residual report range")
    yg.add_argument("--output", type=Path)
    yf = y.add_parser("fit", parents=[common])
    yf.add_argument("--targets", required=True, help="'ah' or a JSON map half-integer -> density")
    yf.add_argument("--K", type=float, required=True)
    yf.add_argument("--gmax", type=float, required=True)
    yf.add_argument("--penalty", type=float, default=0.0)
    yf.add_argument("--output", type=Path)
    return p


_DISPATCH = {"zeros": cmd_zeros, "stats": cmd_stats, "models": cmd_models, "synth": cmd_synth}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "T", None) is not None and isinstance(args.T, list) and not args.T:
        print("ahpairs: --T needs at least one height", file=sys.stderr)
        return 1
    try:
        report, code = _DISPATCH[args.group](args)
    except RangeBeyondCertified as exc:
        print(f"ahpairs: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except (AhPairsError, ValueError, OSError) as exc:
        print(f"ahpairs: {exc}", file=sys.stderr)
        return 1
    text = report.render(args.format)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
