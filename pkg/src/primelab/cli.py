"""Batch experiment front-end.

One experiment per invocation;每 run echoes its resolved configuration and
emits rows (experiment, item, observed, predicted, ratio, tolerance, verdict)
as CSV or JSON.  Output is byte-identical for identical configs apart from
the timestamp header.  Exit status 0 iff every pass/fail verdict passed.
"""

from __future__ import annotations

import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import click
import numpy as np

from . import gaps as gp
from . import maier as ml
from . import moments as mm
from . import singular as sg
from . import zerogen
from . import zeros as zl
from .sieve import summatory_many
from .util import CapacityError, DomainError, PoleError, parse_count


@dataclass
class Row:
    experiment: str
    item: str
    observed: float | int | None
    predicted: float | int | None
    ratio: float | None
    tolerance: float | None
    verdict: str  # 'pass' | 'fail' | 'info'

    @staticmethod
    def check(experiment, item, observed, predicted, tolerance, *, relative=True):
        if predicted in (None, 0) and relative:
            relative = False
        dev = abs(observed - predicted)
        if relative:
            dev /= abs(predicted)
        ratio = observed / predicted if predicted else None
        verdict = "pass" if dev <= tolerance else "fail"
        return Row(experiment, item, observed, predicted, ratio, tolerance, verdict)

    @staticmethod
    def info(experiment, item, observed, predicted=None):
        ratio = observed / predicted if predicted else None
        return Row(experiment, item, observed, predicted, ratio, None, "info")


def _tuple_from_text(text: str) -> sg.TupleSet:
    try:
        offs = [int(t) for t in text.replace(" ", "").split(",") if t != ""]
        if not offs:
            raise ValueError
        return sg.TupleSet.from_iterable(offs)
    except (ValueError, DomainError) as exc:
        raise click.BadParameter(f"bad tuple {text!r}: comma-separated integers") from exc


def _edges_from_text(text: str) -> np.ndarray:
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
        edges = np.arange(lo, hi + step / 2, step)
        if edges.size < 2:
            raise ValueError
        return edges
    except ValueError as exc:
        raise click.BadParameter(f"bad bins {text!r}: expected lo:hi:step") from exc


def _emit(config: dict, rows: list[Row], fmt: str, output: str | None) -> int:
    verdicts = [r.verdict for r in rows]
    overall = "fail" if "fail" in verdicts else "pass"
    if fmt == "json":
        doc = {
            "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "config": config,
            "results": [asdict(r) for r in rows],
            "verdict": overall,
        }
        text = json.dumps(doc, indent=2, default=str) + "\n"
    else:
        lines = [f"# generated_at={time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime())}"]
        for k in sorted(config):
            lines.append(f"# config {k}={config[k]}")
        lines.append("experiment,item,observed,predicted,ratio,tolerance,verdict")
        for r in rows:
            lines.append(
                ",".join(
                    "" if v is None else (repr(v) if isinstance(v, float) else str(v))
                    for v in (
                        r.experiment,
                        r.item,
                        r.observed,
                        r.predicted,
                        r.ratio,
                        r.tolerance,
                        r.verdict,
                    )
                )
            )
        text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    return 0 if overall == "pass" else 1


def _common(fn):
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json")(fn)
    fn = click.option("--output", type=click.Path(dir_okay=False), default=None)(fn)
    fn = click.option(
        "--threads",
        type=int,
        default=None,
        envvar="PRIMELAB_THREADS",
        help="worker cap hint; results are invariant to it",
    )(fn)
    return fn


def _config(ctx_params: dict, **extra) -> dict:
    cfg = {k: v for k, v in ctx_params.items() if k not in ("fmt", "output")}
    cfg.update(extra)
    if cfg.get("threads") is None:
        cfg["threads"] = os.cpu_count()
    return cfg


@click.group()
def main() -> None:
    """Prime-distribution laboratory: exact counts vs analytic predictions."""


@main.command()
@click.option("--n", "N", default="1e6", help="count gaps of primes <= N")
@click.option("--bins", default="0:5:0.25")
@click.option("--normalization", type=click.Choice(["log_p", "log_index"]), default="log_p")
@click.option("--tol", type=float, default=0.03, help="bin-[0,1] mass tolerance")
@_common
def gaps(N, bins, normalization, tol, fmt, output, threads):
    """Normalized prime-gap histogram vs the exponential law."""
    N = parse_count(N)
    edges = _edges_from_text(bins)
    hist = gp.gap_histogram(N, edges, normalization)
    target = gp.exponential_bin_mass(edges)
    rows = [
        Row.info("gaps", f"bin[{edges[i]:g},{edges[i+1]:g})", float(hist.fractions[i]), float(target[i]))
        for i in range(len(target))
    ]
    upper = min(int(np.searchsorted(edges, 1.0 + 1e-12)), len(target) + 1)
    mass01 = float(hist.counts[: upper - 1].sum()) / hist.total
    rows.append(
        Row.check("gaps", "mass[0,1]", mass01, 1.0 - math.exp(-1.0), tol, relative=False)
    )
    tail_emp = (hist.underflow + hist.overflow) / hist.total
    tv = 0.5 * (
        float(np.abs(hist.fractions - target).sum()) + abs(tail_emp - math.exp(-float(edges[-1])))
    )
    rows.append(Row.info("gaps", "tv_distance", tv))
    cfg = _config({}, N=N, bins=bins, normalization=normalization, tol=tol, threads=threads)
    sys.exit(_emit(cfg, rows, fmt, output))


@main.command()
@click.option("--n", "N", default="1e6")
@click.option("--lam", type=float, default=1.0)
@click.option("--rule", type=click.Choice(["lambda_log_N", "lambda_log_n"]), default="lambda_log_N")
@click.option("--rounding", type=click.Choice(["nearest", "ceil", "floor"]), default="nearest")
@click.option("--kmax", type=int, default=6)
@_common
def poisson(N, lam, rule, rounding, kmax, fmt, output, threads):
    """Window prime counts vs the Poisson law (informational at desk scale)."""
    N = parse_count(N)
    wc = gp.window_count_distribution(N, lam, rule, rounding)
    rows = []
    for k in range(min(kmax + 1, len(wc.counts))):
        rows.append(
            Row.info("poisson", f"P({k})", float(wc.frequencies[k]), gp.poisson_pmf(lam, k))
        )
    rows.append(Row.info("poisson", "window_h", wc.h if wc.h is not None else -1))
    cfg = _config({}, N=N, lam=lam, rule=rule, rounding=rounding, kmax=kmax, threads=threads)
    sys.exit(_emit(cfg, rows, fmt, output))


@main.command()
@click.option("--tuple", "tuple_text", default="0,2", help="comma-separated offsets")
@click.option("--cutoff", default="1e6", help="prime cutoff for the Euler product")
@click.option("--mod-q", "mod_q", type=int, default=None, help="also report the mod-q factors")
@_common
def singular(tuple_text, cutoff, mod_q, fmt, output, threads):
    """Singular series of a tuple: truncated product, tail bound, transforms."""
    H = _tuple_from_text(tuple_text)
    cut = parse_count(cutoff)
    sv = sg.singular_series(H, cut)
    rows = [
        Row.info("singular", "value", sv.value),
        Row.info("singular", "tail_bound", sv.tail_bound),
        Row.info("singular", "vanishes", int(sv.vanishes)),
        Row.info("singular", "centered", sg.centered_singular_series(H, cut)),
    ]
    if mod_q is not None:
        rows.append(Row.info("singular", f"residue_count_mod_{mod_q}",
                             sg.admissible_residue_count(H, mod_q)))
        rows.append(Row.info("singular", f"factor_mod_{mod_q}",
                             sg.singular_series_mod(H, mod_q)))
    cfg = _config({}, tuple=tuple_text, cutoff=cut, mod_q=mod_q, threads=threads)
    sys.exit(_emit(cfg, rows, fmt, output))


@main.command()
@click.option("--k", type=int, default=2)
@click.option("--h", "h", default="1e3")
@click.option("--cutoff", default=None)
@click.option("--variant", type=click.Choice(["average", "pair_expansion", "distinct", "distinct_centered"]),
              default="average")
@click.option("--tol", type=float, default=None)
@_common
def gallagher(k, h, cutoff, variant, tol, fmt, output, threads):
    """Averages of the singular series over tuples in [1, h]."""
    h = parse_count(h)
    cut = parse_count(cutoff) if cutoff else None
    rows = []
    if variant == "average":
        res = sg.tuple_set_average(k, h, cut)
        rows.append(Row.check("gallagher", f"avg_k{k}_h{h}", res.ratio, 1.0,
                              tol if tol is not None else 0.05, relative=False))
        rows.append(Row.info("gallagher", "sum_S", res.sum_S, float(res.count)))
    elif variant == "pair_expansion":
        res = sg.pair_sum_expansion(h, cut or 10**7)
        bound = 10.0 * h**0.6
        dev = abs(res.exact - res.predicted)
        rows.append(Row(
            "gallagher", f"pair_sum_h{h}", res.exact, res.predicted,
            res.exact / res.predicted, bound, "pass" if dev <= bound else "fail"))
    elif variant == "distinct":
        res = mm.distinct_tuple_sum(k, h, cut or sg.BULK_CUTOFF)
        rows.append(Row.check("gallagher", f"distinct_k{k}_h{h}", res.exact, res.predicted,
                              tol if tol is not None else 0.15))
    else:
        res = mm.distinct_tuple_sum_centered(k, h, cut or sg.BULK_CUTOFF)
        if k % 2 == 0:
            rows.append(Row.check("gallagher", f"centered_k{k}_h{h}", res.exact, res.predicted,
                                  tol if tol is not None else 0.15))
        else:
            rows.append(Row.info("gallagher", f"centered_k{k}_h{h}", res.exact, res.normalization))
    cfg = _config({}, k=k, h=h, cutoff=cut, variant=variant, threads=threads)
    sys.exit(_emit(cfg, rows, fmt, output))


@main.command()
@click.option("--tuple", "tuple_text", default="0,2")
@click.option("--x", default="1e7")
@click.option("--cutoff", default="1e6")
@click.option("--lambda-sum/--no-lambda-sum", default=False)
@click.option("--tol", type=float, default=0.05)
@_common
def tuples(tuple_text, x, cutoff, lambda_sum, tol, fmt, output, threads):
    """Exact tuple counts vs the conjectured density."""
    H = _tuple_from_text(tuple_text)
    x = parse_count(x)
    cut = parse_count(cutoff)
    count = mm.tuple_count(H, x)
    pred = mm.tuple_count_prediction(H, x, cut)
    rows = [
        Row.info("tuples", "count", count),
        Row.info("tuples", "literal_prediction", pred.literal),
        Row.check("tuples", "count_vs_integral", float(count), pred.integral, tol),
    ]
    if lambda_sum:
        lam = mm.lambda_tuple_sum(H, x)
        rows.append(Row.check("tuples", "lambda_sum_vs_Sx", lam,
                              pred.singular.value * x, tol))
    cfg = _config({}, tuple=tuple_text, x=x, cutoff=cut, lambda_sum=lambda_sum,
                  tol=tol, threads=threads)
    sys.exit(_emit(cfg, rows, fmt, output))


@main.command()
@click.option("--n", "N", default="1e7")
@click.option("--h", "h", default="1e3")
@click.option("--tol", type=float, default=0.1)
@click.option("--cramer-max", type=float, default=0.85)
@_common
def variance(N, h, tol, cramer_max, fmt, output, threads):
    """Window variance of psi vs h(log(N/h) + B - 1), with the h log N contrast."""
    N, h = parse_count(N), parse_count(h)
    rep = mm.psi_window_variance(N, h)
    rows = [
        Row.check("variance", "empirical_vs_corrected", rep.empirical, rep.predicted, tol),
        Row(
            "variance",
            "empirical_over_cramer",
            rep.empirical / rep.cramer_prediction,
            cramer_max,
            None,
            cramer_max,
            "pass" if rep.empirical / rep.cramer_prediction < cramer_max else "fail",
        ),
    ]
    cfg = _config({}, N=N, h=h, tol=tol, cramer_max=cramer_max, threads=threads)
    sys.exit(_emit(cfg, rows, fmt, output))


@main.command()
@click.option("--n", "N", default="1e6")
@click.option("--h", "h", default="1e2")
@click.option("--r", "r", type=int, default=2)
@click.option("--decompose/--no-decompose", default=False,
              help="check the surjection-weighted reconstruction identity")
@_common
def moments(N, h, r, decompose, fmt, output, threads):
    """Higher centered moments of psi windows; optional exact identity check."""
    N, h = parse_count(N), parse_count(h)
    rows = []
    if decompose:
        rep = mm.moment_decomposition(N, h, r)
        rows.append(Row(
            "moments", f"identity_r{r}", rep.direct_int, rep.reconstructed_int,
            None, 0.0, "pass" if rep.exact_equal else "fail"))
    else:
        rep = mm.psi_window_moment(N, h, r)
        if r % 2 == 0:
            rows.append(Row.info("moments", f"moment_r{r}", rep.empirical, rep.predicted))
        else:
            rows.append(Row.info("moments", f"moment_r{r}_normalized", rep.normalized))
    cfg = _config({}, N=N, h=h, r=r, decompose=decompose, threads=threads)
    sys.exit(_emit(cfg, rows, fmt, output))


@main.command()
@click.option("--zeros", "zeros_path", type=click.Path(exists=False), required=True,
              help="dataset: one ascending ordinate per line, '#' comments")
@click.option("--generate", type=int, default=None,
              help="generate this many ordinates into --zeros first (desk-scale scan)")
@click.option("--x", default="1e3", help="reconstruction point for psi")
@click.option("--t", "T", type=float, default=None, help="zero cutoff (default t_max)")
@click.option("--tol", type=float, default=0.005)
@_common
def zeros(zeros_path, generate, x, T, tol, fmt, output, threads):
    """Zero-table validation, density check, explicit-formula reconstruction."""
    if generate:
        ords = zerogen.generate_zeros(generate)
        zerogen.write_zeros_file(zeros_path, ords, "Hardy-Z grid scan")
    table = zl.load_zeros(zeros_path)
    x = parse_count(x)
    T_eff = float(T) if T is not None else table.t_max
    nt = zl.zero_count_check(table, min(100.0, table.t_max))
    snap = summatory_many([x])[0]
    pe = zl.psi_explicit(x + 0.5, T_eff, table)
    rows = [
        Row.info("zeros", "count", table.count),
        Row.info("zeros", "t_max", table.t_max),
        Row.check("zeros", f"N({nt.T:g})", float(nt.observed), nt.predicted, 0.05),
        Row.check("zeros", f"psi_explicit_x{x}", pe, snap.psi_x, tol),
    ]
    cfg = _config({}, zeros=str(zeros_path), generate=generate, x=x, T=T_eff,
                  tol=tol, threads=threads)
    sys.exit(_emit(cfg, rows, fmt, output))


@main.command()
@click.option("--experiment", type=click.Choice(["matrix", "scan", "identity", "demo"]),
              default="demo")
@click.option("--x", default="1e7")
@click.option("--h", "h", default="210")
@click.option("--p-interval", "p_interval", default=None, help="lo:hi primes for the modulus")
@click.option("--dyadic-y", "dyadic_y", type=int, default=None)
@click.option("--seed", type=int, default=0)
@click.option("--y", type=float, default=10.0)
@click.option("--s", "s_text", default="2", help="complex point, 're' or 're,im'")
@click.option("--umax", type=float, default=6.0)
@_common
def maier(experiment, x, h, p_interval, dyadic_y, seed, y, s_text, umax, fmt, output, threads):
    """Maier matrix censuses, coprime-excess sign scans, the zeta identity."""
    rows = []
    if experiment == "demo":
        lhs, rhs = ml.inclusion_exclusion_vs_mertens()
        rows.append(Row.check("maier", "ie_vs_mertens_gap", lhs - rhs, 1.90e-4, 1e-6,
                              relative=False))
    elif experiment == "matrix":
        if p_interval:
            lo, hi = (int(t) for t in p_interval.split(":"))
            P = ml.build_modulus_interval(lo, hi)
        else:
            P = ml.FactoredModulus.from_primes([2, 3, 5, 7])
        rep = ml.maier_matrix(parse_count(x), P, parse_count(h))
        rows.append(Row(
            "maier", "row_eq_column", rep.row_total, rep.column_total, None, 0.0,
            "pass" if rep.row_total == rep.column_total else "fail"))
        rows.append(Row.check("maier", "total_vs_row_pred", float(rep.row_total),
                              rep.row_prediction, 0.2))
        rows.append(Row.info("maier", "column_prediction", rep.column_prediction))
    elif experiment == "scan":
        if dyadic_y is None:
            raise click.BadParameter("scan needs --dyadic-y")
        P = ml.build_modulus_dyadic_half(dyadic_y, seed)
        sc = ml.coprime_excess_sign_scan(P, float(dyadic_y))
        both = sc.has_positive and sc.has_negative
        rows.append(Row("maier", f"signs_y{dyadic_y}_seed{seed}", int(both), 1, None,
                        0.0, "pass" if both else "fail"))
        rows.append(Row.info("maier", "u_reached", sc.u_reached))
    else:
        parts = [float(t) for t in s_text.split(",")]
        s = complex(parts[0], parts[1] if len(parts) > 1 else 0.0)
        P = ml.FactoredModulus.from_primes([2, 3])
        res = ml.coprime_zeta_identity(s, P, y, umax)
        tol = 1e-3 if s.imag == 0 else 1e-2
        rows.append(Row("maier", f"identity_gap_s{s_text}", res.gap, 0.0, None, tol,
                        "pass" if res.gap < tol else "fail"))
        rows.append(Row.info("maier", "tail_bound", res.tail_bound))
    cfg = _config({}, experiment=experiment, x=x, h=h, p_interval=p_interval,
                  dyadic_y=dyadic_y, seed=seed, y=y, s=s_text, umax=umax, threads=threads)
    sys.exit(_emit(cfg, rows, fmt, output))


@main.command()
@click.option("--sequence", type=click.Choice(["ones", "primes", "two_squares"]),
              default="primes")
@click.option("--x", default="1e6")
@click.option("--d", type=int, default=None, help="multiples level")
@click.option("--q", type=int, default=None)
@click.option("--a", type=int, default=None)
@click.option("--tol", type=float, default=0.05)
@_common
def uncertainty(sequence, x, d, q, a, tol, fmt, output, threads):
    """Arithmetic-sequence density predictions in progressions/multiples."""
    seq = {"ones": ml.ones_sequence, "primes": ml.primes_sequence,
           "two_squares": ml.two_squares_sequence}[sequence]()
    x = parse_count(x)
    rows = [Row.info("uncertainty", "summatory", ml.sequence_summatory(seq, x))]
    if d is not None:
        r = ml.sequence_multiples(seq, d, x)
        rows.append(Row.check("uncertainty", f"multiples_d{d}", r.observed, r.predicted, tol))
    if q is not None and a is not None:
        r = ml.sequence_progression(seq, q, a, x)
        if r.predicted is None:
            rows.append(Row.info("uncertainty", f"progression_{a}_mod_{q}", r.observed))
        else:
            rows.append(Row.check("uncertainty", f"progression_{a}_mod_{q}",
                                  r.observed, r.predicted, tol))
    cfg = _config({}, sequence=sequence, x=x, d=d, q=q, a=a, tol=tol, threads=threads)
    sys.exit(_emit(cfg, rows, fmt, output))


@main.command()
@click.option("--q", "q", default="9699690")
@click.option("--bins", default="0:5:0.25")
@click.option("--mv-h", "mv_h", type=int, default=None)
@click.option("--mv-k", "mv_k", type=int, default=2)
@click.option("--tol", type=float, default=0.05)
@_common
def residues(q, bins, mv_h, mv_k, tol, fmt, output, threads):
    """Reduced-residue gap histogram and moments."""
    q = parse_count(q)
    edges = _edges_from_text(bins)
    hist = ml.residue_gap_distribution(q, edges)
    upper = int(np.searchsorted(edges, 1.0 + 1e-12))
    mass01 = float(hist.counts[: max(upper - 1, 0)].sum()) / hist.total
    rows = [
        Row.check("residues", "mass[0,1]", mass01, 1.0 - math.exp(-1.0), tol, relative=False),
        Row.info("residues", "total_gaps", hist.total),
    ]
    if mv_h is not None:
        m = ml.reduced_residue_moment(q, mv_h, mv_k)
        rows.append(Row.info("residues", f"M_{mv_k}({q};{mv_h})", m.direct))
        if m.oracle is not None:
            rows.append(Row.check("residues", "direct_vs_oracle", m.direct, m.oracle, 1e-9))
    cfg = _config({}, q=q, bins=bins, mv_h=mv_h, mv_k=mv_k, tol=tol, threads=threads)
    sys.exit(_emit(cfg, rows, fmt, output))


if __name__ == "__main__":
    main()
