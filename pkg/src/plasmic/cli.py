"""``plasmic`` command line: thin wrappers over the library.

Exit codes: 0 success, 1 a check failed, 2 an enumeration budget was
exceeded, 64 usage or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

from ._bits import BudgetExceeded
from .f1mod import ModuleError, TabulatedModule, gl_n
from .matroid import MatroidError, build_matroid, classify_matroid, pi_plasma
from .nerve import format_tuple, nerve_level, nerve_module, segal_check
from .plasma import PlasmaError, build_plasma, check_properties, enumerate_morphisms, from_json, krasner
from .simplicial import beta_table, span_pullback_count, two_segal_check, underlying_simplicial

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunReport:
    command: list[str]
    inputs: dict[str, str] = field(default_factory=dict)
    results: dict[str, Any] = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)
    ok: bool = True
    stderr: str | None = None
    wall_time: float | None = None

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("lines")
        d.pop("stderr")
        if d["wall_time"] is None:
            d.pop("wall_time")
        return d


def _read_source(source: str, report: RunReport) -> dict | str:
    """Parsed JSON when ``source`` is a file, otherwise the descriptor string itself."""
    p = Path(source)
    if p.is_file():
        raw = p.read_bytes()
        report.inputs[source] = hashlib.sha256(raw).hexdigest()
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{source}: not valid JSON ({exc})") from None
    report.inputs[source] = hashlib.sha256(source.encode()).hexdigest()
    return source


def _load_plasma(source: str, report: RunReport):
    data = _read_source(source, report)
    if isinstance(data, dict):
        return from_json(data)
    try:
        return build_plasma(data)
    except PlasmaError as exc:
        if Path(source).suffix:
            raise UsageError(f"{source}: no such file") from None
        raise UsageError(str(exc)) from None


def _load_module_or_nerve(source: str, N: int, budget, report: RunReport) -> TabulatedModule:
    data = _read_source(source, report)
    if isinstance(data, dict) and "levels" in data:
        X = TabulatedModule.from_json(data)
        return X.truncate(N) if N < X.N else X
    M = from_json(data) if isinstance(data, dict) else _load_plasma(source, report)
    return nerve_module(M, N, budget)


def cmd_check(args, r: RunReport) -> None:
    M = _load_plasma(args.file, r)
    rep = check_properties(M)
    r.results = {"elements": list(M.labels), **rep.flags()}
    if rep.inverse is not None:
        r.results["inverse"] = {M.labels[i]: M.labels[j] for i, j in enumerate(rep.inverse)}
    r.results["witnesses"] = {k: list(v) for k, v in rep.witnesses.items()}
    r.lines.append(M.sum_table_str())
    for flag, value in rep.flags().items():
        w = rep.witnesses.get(flag)
        r.lines.append(f"{flag}={str(value).lower()}" + (f"  witness: {' '.join(map(str, w))}" if w else ""))
    if rep.inverse is not None:
        r.lines.append("inverse: " + " ".join(f"{M.labels[i]}->{M.labels[j]}" for i, j in enumerate(rep.inverse)))


def cmd_nerve(args, r: RunReport) -> None:
    M = _load_plasma(args.file, r)
    level = nerve_level(M, args.n, args.budget)
    r.results = {"n": args.n, "count": len(level), "tuples": [format_tuple(M, x) for x in level]}
    r.lines.extend(format_tuple(M, x) for x in level)
    r.stderr = f"count={len(level)}"
    if args.dump_module:
        X = nerve_module(M, args.n, args.budget)
        Path(args.dump_module).write_text(json.dumps(X.to_json(), sort_keys=True) + "\n")


def cmd_hom(args, r: RunReport) -> None:
    P = _load_plasma(args.source, r)
    Q = _load_plasma(args.target, r)
    homs = enumerate_morphisms(P, Q, args.budget)
    r.results = {"count": len(homs)}
    if args.list:
        r.results["maps"] = [[Q.labels[v] for v in f.map] for f in homs]
        r.lines.extend(str(f) for f in homs)
    r.lines.append(f"count={len(homs)}")


def cmd_segal(args, r: RunReport) -> None:
    X = _load_module_or_nerve(args.file, args.N, args.budget, r)
    rep = segal_check(X, args.budget)
    r.ok = rep.ok and rep.agree
    r.results = {
        "iso_form": rep.iso_form.ok,
        "pullback_form": rep.pullback_form.ok,
        "agree": rep.agree,
        "witness": rep.iso_form.witness or rep.pullback_form.witness,
    }
    r.lines.append(f"iso_form={'pass' if rep.iso_form else 'fail'} pullback_form={'pass' if rep.pullback_form else 'fail'}")
    if r.results["witness"]:
        r.lines.append(f"witness: {r.results['witness']}")


def cmd_two_segal(args, r: RunReport) -> None:
    if args.N < 3:
        raise UsageError("two-segal needs -N of at least 3")
    X = _load_module_or_nerve(args.file, args.N, args.budget, r)
    S = underlying_simplicial(X)
    rep = two_segal_check(S)
    r.ok = rep.ok
    r.results = {"two_segal": rep.ok, "squares": [asdict(s) for s in rep.squares]}
    r.lines.append(f"two_segal={'pass' if rep.ok else 'fail'}")
    shown = rep.failures[:1] if rep.failures else ()
    r.lines.extend(f"failing square: {s.describe()}" for s in shown)
    if args.dump:
        Path(args.dump).write_text(S.to_tsv())


def cmd_matroid(args, r: RunReport) -> None:
    data = _read_source(args.file, r)
    M = build_matroid(data)
    flags = classify_matroid(M)
    r.results = asdict(flags)
    r.lines.append(f"matroid={str(flags.matroid).lower()} simple_pointed={str(flags.simple_pointed).lower()} projective={str(flags.projective).lower()}")
    if flags.witness:
        r.lines.append(f"witness: {flags.witness}")
    if flags.simple_pointed:
        P = pi_plasma(M)
        r.results["plasma"] = P.to_json()
        r.lines.append(P.sum_table_str())
    else:
        r.ok = False


def cmd_counterexample(args, r: RunReport) -> None:
    K = krasner()
    h2, h3, h4 = (len(nerve_level(K, n, args.budget)) for n in (2, 3, 4))
    rep = two_segal_check(underlying_simplicial(nerve_module(K, 4, args.budget)))
    square = next(s for s in rep.squares if (s.n, s.i, s.square) == (2, 1, 1))
    span = span_pullback_count(K)
    r.results = {"HK_2": h2, "HK_3": h3, "pullback": square.pullback_size, "HK_4": h4, "span_pullback": span}
    r.ok = (h2, h3, square.pullback_size, h4, span) == (5, 19, 13, 137, 13) and not square.bijective
    r.lines.append(f"|HK_2|={h2} |HK_3|={h3} |pullback|={square.pullback_size} |HK_4|={h4}")


def cmd_gl(args, r: RunReport) -> None:
    rep = gl_n(args.n, args.N, args.budget)
    r.ok = rep.group_axioms and rep.isomorphic_to_symmetric
    r.results = {"n": rep.n, "N": rep.N, "order": rep.order, "group": rep.group_axioms, "symmetric": rep.isomorphic_to_symmetric}
    r.lines.append(f"order={rep.order} group={str(rep.group_axioms).lower()} symmetric={str(rep.isomorphic_to_symmetric).lower()}")


def cmd_beta_table(args, r: RunReport) -> None:
    rows = beta_table(args.n)
    r.results = {"rows": [{"name": name, "map": list(d.values), "beta": str(b)} for name, d, b in rows]}
    for name, d, b in rows:
        r.lines.append(f"{name}\t[{d.m}]->[{d.n}]:[{','.join(map(str, d.values))}]\t{b}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--budget", type=int, default=None, help="cap on visited search nodes")
    common.add_argument("--timing", action="store_true", help="report wall time")
    parser = _Parser(prog="plasmic", description="Finite plasmas, their nerves and related checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="properties of a plasma")
    p.add_argument("file")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("nerve", parents=[common], help="list a nerve level")
    p.add_argument("file")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--dump-module", metavar="PATH")
    p.set_defaults(run=cmd_nerve)

    p = sub.add_parser("hom", parents=[common], help="count plasma morphisms")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--list", action="store_true")
    p.set_defaults(run=cmd_hom)

    p = sub.add_parser("segal", parents=[common], help="Segal condition of a module or nerve")
    p.add_argument("file")
    p.add_argument("-N", type=int, default=4)
    p.set_defaults(run=cmd_segal)

    p = sub.add_parser("two-segal", parents=[common], help="2-Segal squares of the underlying simplicial set")
    p.add_argument("file")
    p.add_argument("-N", type=int, default=4)
    p.add_argument("--dump", metavar="PATH", help="write the simplicial set as TSV")
    p.set_defaults(run=cmd_two_segal)

    p = sub.add_parser("matroid", parents=[common], help="classify a matroid and print its plasma")
    p.add_argument("file")
    p.set_defaults(run=cmd_matroid)

    p = sub.add_parser("counterexample", parents=[common], help="Krasner 2-Segal failure numbers")
    p.set_defaults(run=cmd_counterexample)

    p = sub.add_parser("gl", parents=[common], help="automorphisms of a wedge of F1")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-N", type=int, default=3)
    p.set_defaults(run=cmd_gl)

    p = sub.add_parser("beta-table", parents=[common], help="images of cofaces and codegeneracies")
    p.add_argument("-n", type=int, default=3)
    p.set_defaults(run=cmd_beta_table)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    report = RunReport(command=argv)
    start = time.perf_counter()
    try:
        args.run(args, report)
    except BudgetExceeded as exc:
        print(f"plasmic: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError, KeyError, OSError) as exc:
        invalid = isinstance(exc, (PlasmaError, MatroidError, ModuleError)) and not isinstance(exc, UsageError)
        print(f"plasmic: {'invalid input' if invalid else 'error'}: {exc}", file=sys.stderr)
        return EXIT_FAIL if invalid else EXIT_USAGE
    if args.timing:
        report.wall_time = round(time.perf_counter() - start, 6)
    if args.json:
        print(json.dumps(report.to_json(), sort_keys=True, indent=2))
    else:
        for line in report.lines:
            print(line)
        if report.stderr:
            print(report.stderr, file=sys.stderr)
        if report.wall_time is not None:
            print(f"wall_time={report.wall_time}s", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
