"""Command-line front end.

Subcommands: ``bound``, ``table1``, ``two-runs``, ``certify``, ``figures``.
Exit codes: 0 success, 2 usage error, 3 precondition failure, 4 failed
certification.
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

from . import __version__
from .bounds import (
    BoundReport,
    BudgetExceeded,
    approximant_pmfs,
    certify,
    poisson_bound,
    poisson_geometric_bound,
    vu_bound,
)
from .errors import ConvergenceError, InvalidLawError
from .gcoeff import g_closed_form
from .moments import moments_of
from .pmf import (
    DEFAULT_TAIL_TOL,
    Bernoulli,
    Binomial,
    CustomPMF,
    Geometric,
    NegBinomial,
    Poisson,
    TwoRunsV,
    materialize,
    two_runs_recurrence,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_CERT_FAIL = 4

TABLE_NS = (10, 30, 50)
TABLE_QS = (0.1, 0.2)
TABLE_ALPHA = 5

_FAMILY_CODES = {
    "po": (Poisson, (float,)),
    "ge": (Geometric, (float,)),
    "ber": (Bernoulli, (float,)),
    "bin": (Binomial, (int, float)),
    "nb": (NegBinomial, (float, float)),
    "tr": (TwoRunsV, (float,)),
}


class UsageError(Exception):
    pass


def parse_component(spec: str):
    """Parse ``family:param[:param]`` into a component family.

    ``pmf:0.2,0.5,0.3`` gives a custom PMF.
    """
    code, _, rest = spec.partition(":")
    if code == "pmf":
        try:
            return CustomPMF(tuple(float(x) for x in rest.split(",")))
        except ValueError as exc:
            raise UsageError(f"--comp {spec!r}: {exc}") from None
    if code not in _FAMILY_CODES:
        known = ", ".join(sorted(_FAMILY_CODES) + ["pmf"])
        raise UsageError(f"--comp {spec!r}: unknown family {code!r} (known: {known})")
    cls, types = _FAMILY_CODES[code]
    parts = rest.split(":") if rest else []
    if len(parts) != len(types):
        raise UsageError(f"--comp {spec!r}: {code} takes {len(types)} parameter(s)")
    try:
        return cls(*(t(x) for t, x in zip(types, parts)))
    except ValueError as exc:
        raise UsageError(f"--comp {spec!r}: {exc}") from None


def expand_components(specs, count: int) -> list:
    if not specs:
        raise UsageError("--comp is required")
    if count < 1:
        raise UsageError("--count must be positive")
    comps = [parse_component(s) for s in specs]
    return comps[:-1] + [comps[-1]] * count


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return "-"
    x = float(x)
    if not math.isfinite(x):
        return str(x)
    if x != 0 and abs(x) < 1e-4:
        return f"{x:.3e}"
    return f"{x:.4f}"


def render_report_text(report: BoundReport) -> str:
    lines = [f"bound: {report.theorem}"]
    if report.ok:
        lines.append(f"  value:       {_fmt(report.value)}")
        lines.append(f"  uncertainty: {report.uncertainty:.3e}")
    else:
        names = ", ".join(pc.name for pc in report.failed)
        lines.append(f"  value:       unavailable (precondition failed: {names})")
        if any(pc.name == "sigma2 > mu" for pc in report.failed):
            lines.append("  reason:      under-dispersion, sigma^2 <= mu")
    if report.preconditions:
        lines.append("  preconditions:")
        for pc in report.preconditions:
            lines.append(f"    {pc.name}: {'ok' if pc.ok else 'FAILED'} (margin {_fmt(pc.margin)})")
    if report.intermediates:
        lines.append("  intermediates:")
        for k, v in report.intermediates.items():
            lines.append(f"    {k}: {_fmt(v)}")
    return "\n".join(lines)


def render_reports(reports, fmt: str) -> str:
    if fmt == "json":
        if len(reports) == 1:
            return reports[0].to_json()
        return json.dumps([r.to_dict() for r in reports], indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theorem", "value", "uncertainty", "preconditions_ok"])
        for r in reports:
            w.writerow([r.theorem, repr(float(r.value)), repr(float(r.uncertainty)), int(r.ok)])
        return buf.getvalue().rstrip("\n")
    return "\n\n".join(render_report_text(r) for r in reports)


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _bounds_for(target: str, comps, tail_tol):
    reports = []
    if target in ("poisson", "both"):
        reports.append(poisson_bound(comps, tail_tol))
    if target in ("pg", "both"):
        reports.append(poisson_geometric_bound(comps, tail_tol))
    return reports


def cmd_bound(args) -> int:
    comps = expand_components(args.comp, args.count)
    reports = _bounds_for(args.target, comps, args.tail_tol)
    _emit(render_reports(reports, args.format), args.output)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_PRECONDITION


def table1_rows(lambda_convention: str = "per-component") -> list:
    """Rows ``(n, q, stein_poisson, vellaisamy_upadhye)`` of the comparison table."""
    rows = []
    for q in TABLE_QS:
        for n in TABLE_NS:
            comps = [NegBinomial(TABLE_ALPHA, 1.0 - q)] * n
            ours = poisson_bound(comps).value
            theirs = vu_bound(n, [TABLE_ALPHA], [1.0 - q], lambda_convention).value
            rows.append((n, q, ours, theirs))
    return rows


def cmd_table1(args) -> int:
    rows = table1_rows(args.lambda_convention)
    header = ["n", "q", "stein_poisson", "vellaisamy_upadhye"]
    if args.format == "json":
        text = json.dumps([dict(zip(header, r)) for r in rows], indent=2)
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for n, q, a, b in rows:
            w.writerow([n, q, f"{a:.4f}", f"{b:.4f}"])
        text = buf.getvalue().rstrip("\n")
    else:
        lines = [f"{'n':>4} {'q':>5} {'stein_poisson':>14} {'vellaisamy_upadhye':>19}"]
        for n, q, a, b in rows:
            lines.append(f"{n:>4} {q:>5.1f} {a:>14.4f} {b:>19.4f}")
        text = "\n".join(lines)
    _emit(text, args.output)
    return EXIT_OK


def _certificate_line(cert) -> str:
    if cert.exact is None:
        return f"  exact d_TV: not computed ({cert.status})"
    ratio = _fmt(cert.ratio) if not math.isnan(cert.ratio) else "n/a"
    return (
        f"  exact d_TV: {_fmt(cert.exact.value)} (+/- {cert.exact.uncertainty:.1e}), "
        f"bound/exact = {ratio}, {cert.status}"
    )


def cmd_two_runs(args) -> int:
    p, n = args.p, args.n
    if not 0 < p < 1:
        raise UsageError(f"--p must lie in (0, 1), got {p}")
    if n < 1:
        raise UsageError("--n must be positive")
    fam = TwoRunsV(p)
    try:
        materialize(fam, args.tail_tol)
    except InvalidLawError as exc:
        raise UsageError(f"--p {p}: {exc}") from None
    comps = [fam] * n
    stream = g_closed_form(fam)
    m = moments_of([stream] * n)
    targets = ["poisson", "pg"] if args.pg else ["poisson"]
    certs = [certify(comps, t, args.tail_tol) for t in targets]
    terms = args.terms
    if args.format == "json":
        payload = {
            "p": p,
            "n": n,
            "pmf_coefficients": two_runs_recurrence(p, terms),
            "quotient_coefficients": list(map(float, stream.coeffs[:terms])),
            "mu": m.mu,
            "mu2": m.mu2,
            "reports": [c.bound.to_dict() for c in certs],
            "exact": [None if c.exact is None else c.exact.value for c in certs],
            "status": [c.status for c in certs],
        }
        text = json.dumps(payload, indent=2)
    else:
        lines = [f"2-runs waiting time, p={p:g}, n={n}"]
        pm = ", ".join(_fmt(x) for x in two_runs_recurrence(p, terms))
        gs = ", ".join(_fmt(x) for x in stream.coeffs[:terms])
        lines.append(f"  P(V=j), j<{terms}: {pm}")
        lines.append(f"  psi'/psi coefficients: {gs}")
        lines.append(f"  mu:  {_fmt(m.mu)}")
        lines.append(f"  mu2: {_fmt(m.mu2)}")
        for c in certs:
            lines.append(render_report_text(c.bound))
            lines.append(_certificate_line(c))
        text = "\n".join(lines)
    _emit(text, args.output)
    if any(c.passed is False for c in certs):
        return EXIT_CERT_FAIL
    return EXIT_OK if all(c.bound.ok for c in certs) else EXIT_PRECONDITION


def cmd_certify(args) -> int:
    comps = expand_components(args.comp, args.count)
    try:
        cert = certify(comps, args.target, args.tail_tol, args.budget, args.inject_bound)
    except BudgetExceeded as exc:
        print(f"refused: {exc}; try --count {exc.suggested_n} or fewer", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        text = json.dumps(
            {
                "report": cert.bound.to_dict(),
                "exact": None if cert.exact is None else cert.exact.value,
                "exact_uncertainty": None if cert.exact is None else cert.exact.uncertainty,
                "ratio": None if not math.isfinite(cert.ratio) else cert.ratio,
                "status": cert.status,
            },
            indent=2,
        )
    else:
        text = render_report_text(cert.bound) + "\n" + _certificate_line(cert)
    _emit(text, args.output)
    if cert.passed is None:
        return EXIT_PRECONDITION
    return EXIT_OK if cert.passed else EXIT_CERT_FAIL


def figure_panel(n: int, q: float, alpha: float = TABLE_ALPHA, tail_tol: float = DEFAULT_TAIL_TOL):
    """Exact PMF of ``n`` iid ``NB(alpha, 1-q)`` and its moment-matched
    Poisson-geometric approximant, on a common grid."""
    comps = [NegBinomial(alpha, 1.0 - q)] * n
    report = poisson_geometric_bound(comps, tail_tol)
    if not report.ok:
        raise ValueError(f"panel n={n}, q={q}: moment matching unavailable")
    law, approx = approximant_pmfs(comps, report, tail_tol)
    size = max(law.probs.size, approx.probs.size)
    exact = np.zeros(size)
    appr = np.zeros(size)
    exact[: law.probs.size] = law.probs
    appr[: approx.probs.size] = approx.probs
    return np.arange(size), exact, appr


def cmd_figures(args) -> int:
    outdir = Path(args.outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"--outdir {outdir}: {exc}") from None
    for q in TABLE_QS:
        for n in TABLE_NS:
            j, exact, appr = figure_panel(n, q, tail_tol=args.tail_tol)
            path = outdir / f"panel_n{n}_q{q:g}.csv"
            try:
                with path.open("w", newline="") as fh:
                    w = csv.writer(fh, lineterminator="\n")
                    w.writerow(["j", "pmf_exact", "pmf_approx"])
                    for row in zip(j, exact, appr):
                        w.writerow([int(row[0]), repr(float(row[1])), repr(float(row[2]))])
            except OSError as exc:
                raise UsageError(f"cannot write {path}: {exc}") from None
            print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, components: bool = False) -> None:
    if components:
        p.add_argument("--comp", action="append", metavar="FAMILY:PARAMS",
                       help="component spec, e.g. nb:5:0.9, po:2, ge:0.5, bin:10:0.1, tr:0.4, pmf:0.5,0.5")
        p.add_argument("--count", type=int, default=1, help="repeat the last --comp this many times")
    p.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL)
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steinapprox", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="compute Poisson / Poisson-geometric bounds")
    p.add_argument("--target", choices=("poisson", "pg", "both"), default="poisson")
    _add_common(p, components=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("table1", help="reproduce the negative-binomial comparison table")
    p.add_argument("--lambda-convention", choices=("per-component", "total"), default="per-component")
    _add_common(p)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("two-runs", help="bounds for the 2-runs waiting time")
    p.add_argument("--p", type=float, required=True, help="success probability")
    p.add_argument("--n", type=int, default=1, help="number of 2-run occurrences")
    p.add_argument("--pg", action="store_true", help="also compute the Poisson-geometric bound")
    p.add_argument("--terms", type=int, default=5, help="coefficients to print")
    _add_common(p)
    p.set_defaults(func=cmd_two_runs)

    p = sub.add_parser("certify", help="check a bound against the exact TV distance")
    p.add_argument("--target", choices=("poisson", "pg"), default="poisson")
    p.add_argument("--budget", type=int, default=2_000_000, help="max total component support")
    p.add_argument("--inject-bound", type=float, default=None, help=argparse.SUPPRESS)
    _add_common(p, components=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("figures", help="write PMF comparison data as CSV")
    p.add_argument("--outdir", default="figures")
    p.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL)
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "tail_tol") and not 0 < args.tail_tol < 1:
        parser.error("--tail-tol must lie in (0, 1)")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ConvergenceError, InvalidLawError) as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
