"""Command-line front end: run the verification suites and evaluate functions.

Exit status: 0 when every selected check passes, otherwise the id of the
first failing acceptance criterion (1..12); 64 for command-line or config
file errors; 65 when a numerical method does not converge.
"""

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace

from . import checks, cluster, moduli, qtorus, specfun
from .errors import BoundaryLeak, QuadratureNonConvergence

EXIT_USAGE = 64
EXIT_NONCONVERGENCE = 65

CSV_HELP = """\
CSV output has the columns suite, criterion_id, name, pass, threshold and
measured (the measured values as a compact JSON object), plus runtime_ms
with --timings.  --plot FILE writes two-column CSV (hbar, residual).

A config file holds key=value lines mirroring the long flags (for example
"seed = 3" or "grid = 4096x40"); "#" starts a comment; flags given on the
command line override the file.  QPENTAGON_WORKERS sets the number of
worker processes used by "report" (default 1).
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- argument types ---------------------------------------------------------------

def _floats(text):
    try:
        vals = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")
    if not vals or any(not v > 0 for v in vals):
        raise argparse.ArgumentTypeError(f"expected positive numbers, got {text!r}")
    return vals


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _grid(text):
    try:
        n, L = text.lower().split("x")
        n, L = int(n), float(L)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 4096x40, got {text!r}")
    if n < 16 or L <= 0:
        raise argparse.ArgumentTypeError("grid needs at least 16 points and a positive half width")
    return n, L


def _eval_point(text):
    key, sep, val = text.partition("=")
    if not sep or key.strip() != "z":
        raise argparse.ArgumentTypeError(f"expected z=<complex>, got {text!r}")
    try:
        return complex(val.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot read {val!r} as a complex number")


def _table(text):
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"table must look like start:stop:count, got {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("table count must be positive")
    return a, b, n


def _lattice_point(text):
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a,b, got {text!r}")
    return a, b


# -- parser ------------------------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file with defaults for the flags")
    common.add_argument("--seed", type=int, default=0, help="seed for random sampling")
    common.add_argument("--format", choices=("json", "csv", "md"), default="json")
    common.add_argument("--out", help="directory for the output file (default: stdout)")
    common.add_argument("--timings", action=argparse.BooleanOptionalAction, default=False,
                        help="include runtime_ms (makes output time dependent)")
    common.add_argument("--rel-tol", type=_positive_float, default=1e-12,
                        help="relative tolerance of the Phi quadrature")

    parser = _Parser(prog="qpentagon", description="Numerical and exact checks of the quantum pentagon.",
                     epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, epilog=CSV_HELP,
                              formatter_class=argparse.RawDescriptionHelpFormatter)

    p = add("phi", "quantum dilogarithm identities (criteria 1-5), values and tables")
    p.add_argument("--hbar", type=_floats, help="hbar values (comma separated)")
    p.add_argument("--eval", type=_eval_point, action="append", help="evaluate at z=<complex>")
    p.add_argument("--method", choices=("integral", "product"), default="integral")
    p.add_argument("--imag-hbar", type=float, default=0.0, help="imaginary part of hbar for --eval/--table")
    p.add_argument("--table", type=_table, help="real-line table start:stop:count")

    p = add("pentagon", "pentagon relation for the rescaled K (criterion 8)")
    p.add_argument("--hbar", type=_floats, help="hbar values (comma separated)")
    p.add_argument("--grid", type=_grid, default=(4096, 40.0), help="NxL, e.g. 4096x40")
    p.add_argument("--refine", action=argparse.BooleanOptionalAction, default=True,
                   help="also run on the grid with twice the points and twice the width")
    p.add_argument("--kop-rel-tol", type=_positive_float, default=1e-10)
    p.add_argument("--plot", help="write hbar,fit residual CSV to this file")

    p = add("intertwine", "unitarity and intertwining identities (criteria 6-7)")
    p.add_argument("--hbar", type=_floats, help="hbar values for the identities")
    p.add_argument("--unitarity-hbar", type=_floats, help="hbar values for unitarity")
    p.add_argument("--kop-rel-tol", type=_positive_float, default=1e-10)
    p.add_argument("--general", action=argparse.BooleanOptionalAction, default=False,
                   help="also report residuals for canonical basis elements")
    p.add_argument("--plot", help="write hbar,max residual CSV to this file")

    p = add("cluster", "classical canonical basis checks (criterion 9)")
    p.add_argument("--range", type=int, default=8, help="sweep |a|,|b| <= range")
    p.add_argument("--gamma-range", type=int, default=50)
    p.add_argument("--product-range", type=int, default=5)
    p.add_argument("--dump", type=_lattice_point, action="append", help="print I_A(a,b)")

    p = add("qtorus", "quantum torus checks (criterion 10)")
    p.add_argument("--range", type=int, default=6, help="sweep |a|,|b| <= range")
    p.add_argument("--symmetrization-range", type=int, default=4)
    p.add_argument("--dump", type=_lattice_point, action="append", help="print I^q_A(a,b)")

    p = add("moduli", "cross-ratios, charts, Pluecker reduction, independence (criterion 11)")
    p.add_argument("--degree-bound", type=int, default=2)
    p.add_argument("--correspondence", action=argparse.BooleanOptionalAction, default=False,
                   help="print the X_{a,b;c} <-> I_A(p) table")

    p = add("report", "run every suite and aggregate pass/fail per criterion")
    p.add_argument("--suites", default=",".join(checks.SUITES),
                   help="comma separated subset of " + ",".join(checks.SUITES))
    p.add_argument("--grid", type=_grid, default=(4096, 40.0))
    p.add_argument("--refine", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--kop-rel-tol", type=_positive_float, default=1e-10)
    return parser


def _config_tokens(path):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    tokens = []
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip().replace("_", "-"), val.strip()
        if not sep or not key:
            raise UsageError(f"{path}:{n}: expected key=value")
        if val.lower() in ("true", "yes", "on"):
            tokens.append(f"--{key}")
        elif val.lower() in ("false", "no", "off"):
            tokens.append(f"--no-{key}")
        else:
            tokens += [f"--{key}", val]
    return tokens


def parse_args(argv):
    parser = build_parser()
    argv = list(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config and argv and not argv[0].startswith("-"):
        # file values go first so that explicit flags win
        try:
            tokens = _config_tokens(known.config)
        except UsageError as exc:
            parser.exit(EXIT_USAGE, f"qpentagon: error: {exc}\n")
        argv = argv[:1] + tokens + argv[1:]
    return parser.parse_args(argv)


# -- output -----------------------------------------------------------------------

def _render(payload, records, fmt, timings):
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    rows = [r.record(timings) for r in records]
    if fmt == "csv":
        buf = io.StringIO()
        cols = ["suite", "criterion_id", "name", "pass", "threshold", "measured"]
        if timings:
            cols.append("runtime_ms")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([json.dumps(r[c], sort_keys=True, separators=(",", ":")) if c == "measured" else r[c]
                        for c in cols])
        return buf.getvalue()
    lines = ["| id | suite | check | pass | threshold | measured |", "|---|---|---|---|---|---|"]
    for r in rows:
        m = json.dumps(r["measured"], sort_keys=True, separators=(",", ":"))
        lines.append(f"| {r['criterion_id']} | {r['suite']} | {r['name']} | "
                     f"{'PASS' if r['pass'] else 'FAIL'} | {r['threshold']:g} | `{m}` |")
    return "\n".join(lines) + "\n"


def _emit(args, payload, records, stem):
    text = _render(payload, records, args.format, args.timings)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"{stem}.{args.format}"), "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _exit_code(records):
    failing = sorted(r.criterion_id for r in records if not r.passed)
    return failing[0] if failing else 0


def _payload(command, cfg, records, timings, **extra):
    out = {"command": command, "config": asdict(cfg),
           "results": [r.record(timings) for r in records],
           "all_pass": all(r.passed for r in records)}
    out.update(extra)
    return out


def _write_plot(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["hbar", "residual"])
        w.writerows(rows)


def _base_config(args, **kw):
    return replace(checks.RunConfig(), seed=args.seed, rel_tol=args.rel_tol, **kw)


# -- commands -----------------------------------------------------------------------

def cmd_phi(args):
    cfg = _base_config(args, **({"hbars": args.hbar} if args.hbar else {}))
    quad = cfg.quad
    if args.eval or args.table:
        hbar = cfg.hbars[0] if args.hbar else 1.0
        params = specfun.PhiParams(complex(hbar, args.imag_hbar) if args.imag_hbar else hbar)
        rows = []
        points = list(args.eval or [])
        if args.table:
            a, b, n = args.table
            points += [a + (b - a) * k / max(n - 1, 1) for k in range(n)]
        for z in points:
            if args.method == "product":
                v = specfun.phi_product(z, params)
            else:
                v = specfun.phi_integral(z, params, quad)
            rows.append({"z": [complex(z).real, complex(z).imag], "re": v.real, "im": v.imag, "abs": abs(v)})
        h = complex(params.hbar)
        payload = {"command": "phi", "hbar": [h.real, h.imag], "method": args.method, "values": rows}
        if args.format == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["z_re", "z_im", "re", "im", "abs"])
            for r in rows:
                w.writerow([r["z"][0], r["z"][1], r["re"], r["im"], r["abs"]])
            text = buf.getvalue()
        else:
            text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            with open(os.path.join(args.out, f"phi_values.{'csv' if args.format == 'csv' else 'json'}"), "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    records = checks.suite_phi(cfg)
    _emit(args, _payload("phi", cfg, records, args.timings), records, "phi")
    return _exit_code(records)


def cmd_pentagon(args):
    n, L = args.grid
    cfg = _base_config(args, grid_size=n, grid_half_width=L, refine=args.refine,
                       kop_rel_tol=args.kop_rel_tol,
                       **({"pentagon_hbars": args.hbar} if args.hbar else {}))
    records = checks.suite_pentagon(cfg)
    runs = records[0].measured
    if args.plot:
        _write_plot(args.plot, [(h, r["base"]["fit_residual"]) for h, r in runs.items()])
    _emit(args, _payload("pentagon", cfg, records, args.timings), records, "pentagon")
    return _exit_code(records)


def cmd_intertwine(args):
    kw = {"kop_rel_tol": args.kop_rel_tol}
    if args.hbar:
        kw["kop_hbars"] = args.hbar
    if args.unitarity_hbar:
        kw["unitarity_hbars"] = args.unitarity_hbar
    cfg = _base_config(args, **kw)
    records = checks.suite_intertwine(cfg)
    extra = {}
    if args.general:
        extra["general_intertwining"] = checks.general_intertwining(cfg)
    if args.plot:
        per = records[1].measured["per_hbar"]
        _write_plot(args.plot, [(h, max(v)) for h, v in per.items()])
    _emit(args, _payload("intertwine", cfg, records, args.timings, **extra), records, "intertwine")
    return _exit_code(records)


def _dump(args, lines, data):
    if args.format == "json":
        sys.stdout.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_cluster(args):
    if args.dump:
        lines = [cluster.dump_basis_element(p) for p in args.dump]
        data = [{"point": list(p), "terms": [list(t) for t in cluster.canonical_IA(p).terms()]} for p in args.dump]
        return _dump(args, lines, data)
    cfg = _base_config(args, cluster_range=args.range, gamma_range=args.gamma_range,
                       product_range=args.product_range)
    records = checks.suite_cluster(cfg)
    _emit(args, _payload("cluster", cfg, records, args.timings), records, "cluster")
    return _exit_code(records)


def cmd_qtorus(args):
    if args.dump:
        lines = [f"{a} {b} : {qtorus.dump_element(qtorus.canonical_IAq((a, b)))}" for a, b in args.dump]
        data = [{"point": [a, b], "terms": qtorus.to_json(qtorus.canonical_IAq((a, b)))} for a, b in args.dump]
        return _dump(args, lines, data)
    cfg = _base_config(args, qtorus_range=args.range, symmetrization_range=args.symmetrization_range)
    records = checks.suite_qtorus(cfg)
    _emit(args, _payload("qtorus", cfg, records, args.timings), records, "qtorus")
    return _exit_code(records)


def cmd_moduli(args):
    cfg = _base_config(args, degree_bound=args.degree_bound)
    records = checks.suite_moduli(cfg)
    extra = {}
    if args.correspondence:
        table = moduli.correspondence_table(2)
        extra["correspondence"] = [{"label": list(k), "lattice_point": list(v) if v else None}
                                   for k, v in sorted(table.items())]
    _emit(args, _payload("moduli", cfg, records, args.timings, **extra), records, "moduli")
    return _exit_code(records)


def _workers():
    try:
        return max(1, int(os.environ.get("QPENTAGON_WORKERS", "1")))
    except ValueError:
        raise UsageError("QPENTAGON_WORKERS must be an integer")


def _run_suites(names, cfg, workers):
    if workers == 1 or len(names) == 1:
        return {name: checks.run_suite(name, cfg) for name in names}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {name: pool.submit(checks.run_suite, name, cfg) for name in names}
        return {name: futures[name].result() for name in names}


def _serialise(records):
    return json.dumps([r.record(False) for r in records], sort_keys=True)


def determinism_record(cfg, first, suites=("phi", "cluster", "qtorus", "moduli")):
    """Re-run the quick suites with the same config and compare serialised records."""
    again = [r for name in suites for r in checks.run_suite(name, cfg)]
    before = [r for r in first if r.suite in suites]
    same = _serialise(before) == _serialise(again)
    return checks.CriterionResult("report", 12, "deterministic output", {"rerun_identical": same,
                                  "suites_rerun": list(suites)}, 0.0, same)


def cmd_report(args):
    names = [s.strip() for s in args.suites.split(",") if s.strip()]
    unknown = [s for s in names if s not in checks.SUITES]
    if unknown:
        raise UsageError(f"unknown suites: {', '.join(unknown)}")
    n, L = args.grid
    cfg = _base_config(args, grid_size=n, grid_half_width=L, refine=args.refine, kop_rel_tol=args.kop_rel_tol)
    by_suite = _run_suites(names, cfg, _workers())
    records = [r for name in checks.SUITES if name in by_suite for r in by_suite[name]]
    quick = tuple(s for s in ("phi", "cluster", "qtorus", "moduli") if s in names)
    if quick:
        records.append(determinism_record(cfg, records, quick))
    records.sort(key=lambda r: r.criterion_id)
    _emit(args, _payload("report", cfg, records, args.timings), records, "report")
    return _exit_code(records)


COMMANDS = {
    "phi": cmd_phi,
    "pentagon": cmd_pentagon,
    "intertwine": cmd_intertwine,
    "cluster": cmd_cluster,
    "qtorus": cmd_qtorus,
    "moduli": cmd_moduli,
    "report": cmd_report,
}


def main(argv=None):
    args = parse_args(sys.argv[1:] if argv is None else argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"qpentagon: error: {exc}\n")
        return EXIT_USAGE
    except (QuadratureNonConvergence, BoundaryLeak) as exc:
        sys.stderr.write(f"qpentagon: numerical method did not converge: {exc}\n")
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
