"""Atoms dividing an element and all factorizations into atoms.

Both computations run over the divisor of the target: atoms are the
minimal nonzero principal subdivisors, realized through the canonical
principal generator, and factorizations are the nonnegative solutions of
an integer linear system over the atom divisors.  The subdivisor walk is
exponential in the divisor support in the worst case, so class-feasibility
pruning plus a hard node cap turn combinatorial blowup into an explicit
error instead of a silent hang.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cluster import ChartAtlas
from .divisors import (
    ClassGroupPresentation,
    Divisor,
    class_of_divisor,
    flir_divisor,
    is_member,
    principal_generator,
)
from .intarith import solve_bounded_nonneg
from .laurent import RatFunc, format_ratfunc


DEFAULT_SUBDIVISOR_CAP = 10**6


class BudgetExceeded(RuntimeError):
    """The subdivisor walk visited more nodes than the configured cap."""


@dataclass(frozen=True)
class AtomSet:
    """Pairwise non-associated atoms, each with its divisor."""

    atoms: tuple[tuple[RatFunc, Divisor], ...]

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class FactorizationList:
    """(unit, exponent vector over the atom set) for every factorization."""

    atoms: AtomSet
    factorizations: tuple[tuple[RatFunc, tuple[int, ...]], ...]
    length_set: frozenset

    def __len__(self) -> int:
        return len(self.factorizations)


def _checked_divisor(atlas: ChartAtlas, pres: ClassGroupPresentation, a: RatFunc) -> Divisor:
    if a.is_zero:
        raise ValueError("cannot factor zero")
    if not is_member(atlas, a):
        raise ValueError("element is not a member of the intersection ring")
    return flir_divisor(atlas, a, pres.special)


def atoms_dividing(
    atlas: ChartAtlas,
    pres: ClassGroupPresentation,
    a: RatFunc,
    max_subdivisors: int = DEFAULT_SUBDIVISOR_CAP,
) -> AtomSet:
    """Minimal nonzero principal subdivisors of dv(a), realized as elements.

    Depth-first over the subdivisor box in lexicographic order, so
    minimality against the already-kept tuples is a complete check: any
    dominated tuple appears after a tuple dominating it.  Principality is
    tested in Smith coordinates of the class presentation, and subtrees
    whose completions cannot reach the row lattice are cut by interval
    bounds; the cap counts visited search nodes.
    """
    dv = _checked_divisor(atlas, pres, a)
    support = dv.entries
    exps = [c for _, c in support]
    m = len(exps)
    r = len(pres.special)
    # class vector of each support prime, pushed through the right Smith
    # factor: a subdivisor is principal iff its transformed class sum is
    # divisible by the diagonal, with zero forced past the diagonal
    prime_class = [
        class_of_divisor(atlas, pres, Divisor(((P, 1),))) for P, _ in support
    ]
    right = pres.snf.right
    tvec = [
        tuple(sum(cls[t] * right[t][j] for t in range(r)) for j in range(r))
        for cls in prime_class
    ]
    diag = pres.snf.diagonal
    mods = list(diag) + [0] * (r - len(diag))
    zeros = [j for j, d in enumerate(mods) if d == 0]
    tors = [(j, d) for j, d in enumerate(mods) if d > 1]
    # coordinatewise bounds on what levels i..m-1 can still contribute
    lo = [[0] * r for _ in range(m + 1)]
    hi = [[0] * r for _ in range(m + 1)]
    for i in range(m - 1, -1, -1):
        for j in range(r):
            step = exps[i] * tvec[i][j]
            lo[i][j] = lo[i + 1][j] + min(0, step)
            hi[i][j] = hi[i + 1][j] + max(0, step)
    nz = [[(j, t) for j, t in enumerate(row) if t] for row in tvec]

    kept: list[tuple[int, ...]] = []
    atoms: list[tuple[RatFunc, Divisor]] = []
    choice = [0] * m
    w = [0] * r
    visited = 0

    def walk(i: int) -> None:
        nonlocal visited
        visited += 1
        if visited > max_subdivisors:
            raise BudgetExceeded(
                f"subdivisor search exceeded the cap of {max_subdivisors} nodes"
            )
        if i == m:
            k = tuple(choice)
            if not any(k):
                return
            if any(all(l[t] <= k[t] for t in range(m)) for l in kept):
                return
            if any(w[j] for j in zeros):
                return
            if any(w[j] % d for j, d in tors):
                return
            E = Divisor.make({P: k[t] for t, (P, _) in enumerate(support)})
            kept.append(k)
            atoms.append((principal_generator(atlas, pres, E), E))
            return
        for j in zeros:
            if w[j] + lo[i][j] > 0 or w[j] + hi[i][j] < 0:
                return
        for j, d in tors:
            if ((w[j] + hi[i][j]) // d) * d < w[j] + lo[i][j]:
                return
        e = exps[i]
        step = nz[i]
        for v in range(e + 1):
            if v:
                for j, t in step:
                    w[j] += t
            choice[i] = v
            walk(i + 1)
        choice[i] = 0
        for j, t in step:
            w[j] -= e * t

    walk(0)
    return AtomSet(tuple(atoms))


def factorizations(
    atlas: ChartAtlas,
    pres: ClassGroupPresentation,
    a: RatFunc,
    max_subdivisors: int = DEFAULT_SUBDIVISOR_CAP,
) -> FactorizationList:
    """Every factorization of a into atoms, up to order and associates."""
    dv = _checked_divisor(atlas, pres, a)
    atom_set = atoms_dividing(atlas, pres, a, max_subdivisors)
    support = dv.entries
    target = [c for _, c in support]
    m = len(atom_set.atoms)
    rows = tuple(
        tuple(E.coeff(P) for _, E in atom_set.atoms) for P, _ in support
    )
    bounds = []
    for i in range(m):
        cap = None
        for j, t in enumerate(target):
            v = rows[j][i]
            if v > 0:
                cap = t // v if cap is None else min(cap, t // v)
        bounds.append(0 if cap is None else cap)
    out = []
    lengths = set()
    for t in solve_bounded_nonneg(rows, target, bounds):
        prod_ = RatFunc.const(atlas.table, 1)
        for (b, _), e in zip(atom_set.atoms, t):
            if e:
                prod_ = prod_ * b**e
        unit = a / prod_
        assert flir_divisor(atlas, unit, pres.special).is_zero, "unit has a divisor"
        assert is_member(atlas, unit) and is_member(atlas, unit.inverse()), (
            "leading unit is not a unit of the ring"
        )
        out.append((unit, t))
        lengths.add(sum(t))
    return FactorizationList(atom_set, tuple(out), frozenset(lengths))


def length_set(
    atlas: ChartAtlas,
    pres: ClassGroupPresentation,
    a: RatFunc,
    max_subdivisors: int = DEFAULT_SUBDIVISOR_CAP,
) -> set:
    """All factorization lengths of a."""
    return set(factorizations(atlas, pres, a, max_subdivisors).length_set)


def factorization_report_json(fl: FactorizationList) -> dict:
    """JSON-ready report: unit strings, atom strings, exponent matrix."""
    return {
        "atoms": [format_ratfunc(b) for b, _ in fl.atoms.atoms],
        "factorizations": [
            {"unit": format_ratfunc(u), "exponents": list(t)} for u, t in fl.factorizations
        ],
        "length_set": sorted(fl.length_set),
    }
