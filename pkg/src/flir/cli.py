"""Command-line front end: problem files in, deterministic reports out.

A problem file is a JSON object describing either an exchange-matrix seed
({"n": ..., "B": ..., "frozen_rows"?: ..., "ground"?: ...}) or a
one-variable ring ({"one_var": "6", "ground"?: ...}), optionally with
named element strings and budget overrides.  Subcommands map one-to-one
onto the library: charts, classgroup, divisor, class, member, atoms,
factor, generators, plus the file-less matrix and bench commands.

Exit codes: 0 success, 2 bad input (CLI usage, file schema, element
syntax), 3 search budget exhausted, 1 internal failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Optional

from .bench import DiscSpec, disc_matrix, report_json, report_text, run_benchmark
from .cluster import (
    BudgetExhausted,
    ChartAtlas,
    SearchLimits,
    Seed,
    banff_charts,
    banff_generators,
    initial_seed,
    one_var_flir,
)
from .divisors import (
    BasePrime,
    SpecialPrime,
    TorusPrime,
    class_group,
    class_group_text,
    class_of_divisor,
    divisor_to_json,
    flir_divisor,
    is_factorial,
    is_member,
)
from .elements import (
    DEFAULT_SUBDIVISOR_CAP,
    BudgetExceeded,
    atoms_dividing,
    factorization_report_json,
    factorizations,
)
from .intarith import lattice_membership
from .laurent import (
    ParseError,
    RatFunc,
    format_laurent,
    format_ratfunc,
    parse_element,
)


class SchemaError(ValueError):
    """The problem file or command arguments violate the input contract."""


# ---------------------------------------------------------------------------
# problem files

_GROUNDS = ("Q", "Z")
_TOP_KEYS = {"n", "B", "frozen_rows", "ground", "one_var", "elements", "budgets"}
_BUDGET_KEYS = {"max_depth", "max_seeds", "max_subdivisors"}


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise SchemaError(msg)


def _validate_rows(rows: Any, n: int, name: str) -> None:
    _require(isinstance(rows, list) and len(rows) > 0, f"{name} must be a nonempty list of rows")
    for row in rows:
        _require(
            isinstance(row, list) and len(row) == n,
            f"each row of {name} must be a list of {n} integers",
        )
        for e in row:
            _require(isinstance(e, int) and not isinstance(e, bool), f"{name} entries must be integers")


def validate_problem(data: Any) -> None:
    """Schema check only; no computation happens here."""
    _require(isinstance(data, dict), "problem file must be a JSON object")
    for key in data:
        _require(key in _TOP_KEYS, f"unknown key {key!r}")
    has_seed = "n" in data or "B" in data
    has_one_var = "one_var" in data
    _require(
        has_seed != has_one_var,
        "provide either a seed (n and B) or one_var, and not both",
    )
    ground = data.get("ground", "Q" if has_seed else "Z")
    _require(ground in _GROUNDS, "ground must be 'Q' or 'Z'")
    if has_seed:
        _require("n" in data and "B" in data, "seed form needs both n and B")
        n = data["n"]
        _require(isinstance(n, int) and not isinstance(n, bool) and n >= 1, "n must be a positive integer")
        _validate_rows(data["B"], n, "B")
        _require(len(data["B"]) == n, f"B must have {n} rows")
        if "frozen_rows" in data:
            _validate_rows(data["frozen_rows"], n, "frozen_rows")
    else:
        value = data["one_var"]
        _require(
            isinstance(value, (str, int)) and not isinstance(value, bool),
            "one_var must be an integer or a rational string",
        )
        try:
            a = Fraction(str(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"one_var does not parse as a rational: {value!r}") from exc
        _require(a != 0, "one_var must be nonzero")
    if "elements" in data:
        elems = data["elements"]
        _require(isinstance(elems, dict), "elements must map names to expression strings")
        for k, v in elems.items():
            _require(isinstance(k, str) and k, "element names must be nonempty strings")
            _require(isinstance(v, str), f"element {k!r} must be an expression string")
    if "budgets" in data:
        budgets = data["budgets"]
        _require(isinstance(budgets, dict), "budgets must be an object")
        for k, v in budgets.items():
            _require(k in _BUDGET_KEYS, f"unknown budget {k!r}")
            _require(isinstance(v, int) and not isinstance(v, bool) and v >= 0, f"budget {k!r} must be a nonnegative integer")


def load_problem(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read problem file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"problem file is not valid JSON: {exc}") from exc
    validate_problem(data)
    return data


def _limits(args: argparse.Namespace, data: Optional[dict]) -> SearchLimits:
    budgets = (data or {}).get("budgets", {})
    defaults = SearchLimits()
    depth = budgets.get("max_depth", defaults.max_depth)
    seeds = budgets.get("max_seeds", defaults.max_seeds)
    if args.max_depth is not None:
        depth = args.max_depth
    if args.max_seeds is not None:
        seeds = args.max_seeds
    return SearchLimits(max_depth=depth, max_seeds=seeds)


def _subdivisor_cap(args: argparse.Namespace, data: dict) -> int:
    if args.max_subdivisors is not None:
        return args.max_subdivisors
    return data.get("budgets", {}).get("max_subdivisors", DEFAULT_SUBDIVISOR_CAP)


def _build_seed(data: dict) -> Seed:
    try:
        return initial_seed(data["B"], data.get("frozen_rows", ()), data.get("ground", "Q"))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def _build_atlas(data: dict, limits: SearchLimits) -> ChartAtlas:
    if "one_var" in data:
        a = Fraction(str(data["one_var"]))
        value: Any = int(a) if a.denominator == 1 else a
        try:
            return one_var_flir(value, data.get("ground", "Z"))
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
    return banff_charts(_build_seed(data), limits)


def _element(data: dict, atlas: ChartAtlas, text: str) -> RatFunc:
    source = data.get("elements", {}).get(text, text)
    return parse_element(source, atlas.table)


# ---------------------------------------------------------------------------
# report rendering

def _emit(args: argparse.Namespace, obj: dict, text: str) -> str:
    if args.json:
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"
    return text + "\n"


def _prime_text(P) -> str:
    if isinstance(P, BasePrime):
        return f"({P.p})"
    if isinstance(P, TorusPrime):
        return f"({format_laurent(P.poly)})"
    local = f"({P.p})" if P.p is not None else f"({format_laurent(P.poly)})"
    return f"chart {P.chart} {local}"


def _factorization_text(fl, unit: RatFunc, exps: tuple[int, ...]) -> str:
    parts = []
    u = format_ratfunc(unit)
    if u != "1":
        parts.append(u)
    for (atom, _), e in zip(fl.atoms.atoms, exps):
        if e == 0:
            continue
        piece = f"({format_ratfunc(atom)})"
        parts.append(piece + (f"^{e}" if e > 1 else ""))
    return " * ".join(parts) if parts else "1"


# ---------------------------------------------------------------------------
# subcommands

def cmd_charts(args: argparse.Namespace) -> str:
    data = load_problem(args.problem)
    atlas = _build_atlas(data, _limits(args, data))
    lines = [f"ground {atlas.ground}"]
    for i, chart in enumerate(atlas.charts):
        coords = ", ".join(format_laurent(p) for p in chart.forward)
        lines.append(f"chart {i} [{chart.label}]: {coords}")
    obj = {
        "ground": atlas.ground,
        "names": list(atlas.table.names),
        "charts": [
            {
                "label": c.label,
                "forward": [format_laurent(p) for p in c.forward],
                "backward": [format_laurent(p) for p in c.backward],
            }
            for c in atlas.charts
        ],
    }
    return _emit(args, obj, "\n".join(lines))


def cmd_classgroup(args: argparse.Namespace) -> str:
    data = load_problem(args.problem)
    atlas = _build_atlas(data, _limits(args, data))
    pres = class_group(atlas)
    factorial = is_factorial(atlas)
    group = class_group_text(pres.free_rank, pres.torsion)
    verdict = "factorial" if factorial else "not factorial"
    lines = [
        f"Cl(A) ≅ {group}, {verdict}",
        f"special primes: {len(pres.special)}",
    ]
    obj = {
        "group": group,
        "free_rank": pres.free_rank,
        "torsion": list(pres.torsion),
        "special_count": len(pres.special),
        "C": [list(row) for row in pres.C],
        "factorial": factorial,
    }
    return _emit(args, obj, "\n".join(lines))


def cmd_divisor(args: argparse.Namespace) -> str:
    data = load_problem(args.problem)
    atlas = _build_atlas(data, _limits(args, data))
    f = _element(data, atlas, args.element)
    d = flir_divisor(atlas, f)
    lines = [f"{_prime_text(P)}: {c}" for P, c in d.entries] or ["0"]
    obj = {"element": format_ratfunc(f), "divisor": divisor_to_json(d)}
    return _emit(args, obj, "\n".join(lines))


def cmd_class(args: argparse.Namespace) -> str:
    data = load_problem(args.problem)
    atlas = _build_atlas(data, _limits(args, data))
    f = _element(data, atlas, args.element)
    pres = class_group(atlas)
    vec = class_of_divisor(atlas, pres, flir_divisor(atlas, f, pres.special))
    principal = lattice_membership(list(pres.C), list(vec)) is not None
    text = f"class: {list(vec)}\nprincipal: {'true' if principal else 'false'}"
    obj = {"element": format_ratfunc(f), "class": list(vec), "principal": principal}
    return _emit(args, obj, text)


def cmd_member(args: argparse.Namespace) -> str:
    data = load_problem(args.problem)
    atlas = _build_atlas(data, _limits(args, data))
    f = _element(data, atlas, args.element)
    member = is_member(atlas, f)
    obj = {"element": format_ratfunc(f), "member": member}
    return _emit(args, obj, "true" if member else "false")


def cmd_atoms(args: argparse.Namespace) -> str:
    data = load_problem(args.problem)
    atlas = _build_atlas(data, _limits(args, data))
    f = _element(data, atlas, args.element)
    pres = class_group(atlas)
    atoms = atoms_dividing(atlas, pres, f, _subdivisor_cap(args, data)).atoms
    lines = [format_ratfunc(a) for a, _ in atoms] or ["(none)"]
    obj = {"element": format_ratfunc(f), "atoms": [format_ratfunc(a) for a, _ in atoms]}
    return _emit(args, obj, "\n".join(lines))


def cmd_factor(args: argparse.Namespace) -> str:
    data = load_problem(args.problem)
    atlas = _build_atlas(data, _limits(args, data))
    f = _element(data, atlas, args.element)
    pres = class_group(atlas)
    fl = factorizations(atlas, pres, f, _subdivisor_cap(args, data))
    lengths = sorted(fl.length_set)
    lines = [
        f"atoms: {len(fl.atoms)}",
        f"factorizations: {len(fl.factorizations)}",
        f"lengths: {lengths}",
    ]
    lines.extend(_factorization_text(fl, u, e) for u, e in fl.factorizations)
    obj = {"element": format_ratfunc(f), **factorization_report_json(fl)}
    return _emit(args, obj, "\n".join(lines))


def cmd_generators(args: argparse.Namespace) -> str:
    data = load_problem(args.problem)
    limits = _limits(args, data)
    if "one_var" in data:
        atlas = _build_atlas(data, limits)
        gens: list[RatFunc] = []
        for chart in atlas.charts:
            for p in chart.forward:
                g = RatFunc.from_laurent(p)
                if g not in gens:
                    gens.append(g)
    else:
        gens = banff_generators(_build_seed(data), limits)
    lines = [format_ratfunc(g) for g in gens]
    obj = {"generators": lines}
    return _emit(args, obj, "\n".join(lines))


def cmd_matrix(args: argparse.Namespace) -> str:
    try:
        spec = DiscSpec(args.m, args.p)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    mat = disc_matrix(spec)
    rows = [list(row) for row in mat.entries]
    text = "\n".join(" ".join(str(e) for e in row) for row in rows)
    obj = {"label": spec.label, "size": mat.n, "rows": rows}
    return _emit(args, obj, text)


def _parse_case(token: str) -> DiscSpec:
    try:
        m_text, p_text = token.split(",")
        return DiscSpec(int(m_text), int(p_text))
    except ValueError as exc:
        raise SchemaError(f"cases must look like 'm,p' with m, p >= 2: {token!r}") from exc


def cmd_bench(args: argparse.Namespace) -> str:
    specs = [_parse_case(tok) for tok in args.cases]
    expected = None
    if args.expected is not None:
        try:
            expected = [int(tok) for tok in args.expected.split(",")]
        except ValueError as exc:
            raise SchemaError(f"--expected must be comma-separated integers: {args.expected!r}") from exc
        if len(expected) != len(specs):
            raise SchemaError("--expected must list one rank per case")
    report = run_benchmark(specs, expected, limits=_limits(args, None))
    return _emit(args, report_json(report), report_text(report))


# ---------------------------------------------------------------------------
# argument parsing

def _flag_parent(for_subcommand: bool) -> argparse.ArgumentParser:
    # subcommand copies suppress their defaults so they cannot clobber a
    # value already parsed before the subcommand token
    absent = argparse.SUPPRESS if for_subcommand else None
    json_absent = argparse.SUPPRESS if for_subcommand else False
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--json", action="store_true", default=json_absent, help="emit a JSON report")
    parent.add_argument("--max-depth", type=int, metavar="N", default=absent, help="mutation search depth budget")
    parent.add_argument("--max-seeds", type=int, metavar="N", default=absent, help="mutation search seed budget")
    parent.add_argument("--max-subdivisors", type=int, metavar="N", default=absent, help="atom enumeration budget")
    return parent


def _parser() -> argparse.ArgumentParser:
    common = _flag_parent(for_subcommand=True)

    ap = argparse.ArgumentParser(
        prog="flir",
        parents=[_flag_parent(for_subcommand=False)],
        description="Divisor class groups and factorizations of finite Laurent intersection rings.",
    )
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")

    def problem_command(name: str, help_text: str, element: bool = False):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.add_argument("problem", help="path to a problem JSON file")
        if element:
            sp.add_argument("element", help="expression in chart-0 names, or a named element")
        return sp

    problem_command("charts", "emit the chart atlas").set_defaults(func=cmd_charts)
    problem_command("classgroup", "class group presentation and factoriality").set_defaults(func=cmd_classgroup)
    problem_command("divisor", "divisor of an element", element=True).set_defaults(func=cmd_divisor)
    problem_command("class", "divisor class of an element", element=True).set_defaults(func=cmd_class)
    problem_command("member", "does the element lie in the ring", element=True).set_defaults(func=cmd_member)
    problem_command("atoms", "atoms dividing an element", element=True).set_defaults(func=cmd_atoms)
    problem_command("factor", "all factorizations of an element", element=True).set_defaults(func=cmd_factor)
    problem_command("generators", "finite generating set").set_defaults(func=cmd_generators)

    mx = sub.add_parser("matrix", parents=[common], help="print a generated exchange matrix")
    mx.add_argument("family", choices=["disc"], help="matrix family")
    mx.add_argument("m", type=int, help="marked boundary points")
    mx.add_argument("p", type=int, help="punctures")
    mx.set_defaults(func=cmd_matrix)

    bn = sub.add_parser("bench", parents=[common], help="run the benchmark harness")
    bn.add_argument("family", choices=["disc"], help="matrix family")
    bn.add_argument("cases", nargs="+", metavar="m,p", help="cases like 2,2 3,2")
    bn.add_argument("--expected", metavar="r1,r2,...", help="expected class group ranks")
    bn.set_defaults(func=cmd_bench)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        out = args.func(args)
    except (SchemaError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BudgetExhausted, BudgetExceeded) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - anything else is an internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
