"""Seeds, mutation, freezing, and the chart-atlas search.

A seed lives over a fixed ambient variable table (mutable slots x1..xn,
then frozen slots y1..ym).  Every slot has a current occupant: a Laurent
polynomial in the ambient variables.  Mutation rewrites the occupant of
one mutable slot; freezing moves mutable slots into the coefficient
semifield, whose generators are tracked as (name, slot, expression)
triples with integer exponent vectors as tropical coefficients.

The atlas search: breadth-first over mutation sequences (lexicographic
direction order, seeds deduplicated by exact (B, coefficients) equality)
until a seed with a covering pair appears, then recurse into the two
freezings; seeds with B = 0 contribute one chart per subset of flipped
directions.  Backward maps are recovered by walking the construction path
in reverse, dividing out each exchange relation exactly.  Every division
is checked; a failure is a hard error, never a wrong chart.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence, Union

from .laurent import (
    LaurentPoly,
    RatFunc,
    VarTable,
    laurent_exact_div,
    var_table,
)


class BudgetExhausted(RuntimeError):
    """The Banff search hit its depth or seed budget without an answer."""


class NotAcyclic(ValueError):
    """Raised when an operation requires an acyclic exchange matrix."""


# ---------------------------------------------------------------------------
# exchange matrices


@dataclass(frozen=True)
class ExchangeMatrix:
    """Skew-symmetrizable integer matrix with a fixed symmetrizer."""

    entries: tuple[tuple[int, ...], ...]
    d: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def is_zero(self) -> bool:
        return all(not b for row in self.entries for b in row)

    def __post_init__(self):
        b = self.entries
        d = self.d
        for i in range(len(b)):
            for j in range(len(b)):
                if d[i] * b[i][j] != -d[j] * b[j][i]:
                    raise ValueError(f"not skew-symmetrizable at ({i},{j})")

    def mutate(self, k: int) -> "ExchangeMatrix":
        b = self.entries
        n = len(b)
        new = []
        for i in range(n):
            row = []
            for j in range(n):
                if i == k or j == k:
                    row.append(-b[i][j])
                else:
                    row.append(b[i][j] + (abs(b[i][k]) * b[k][j] + b[i][k] * abs(b[k][j])) // 2)
            new.append(tuple(row))
        return ExchangeMatrix(tuple(new), self.d)

    def delete(self, drop: Sequence[int]) -> "ExchangeMatrix":
        keep = [i for i in range(self.n) if i not in set(drop)]
        ent = tuple(tuple(self.entries[i][j] for j in keep) for i in keep)
        return ExchangeMatrix(ent, tuple(self.d[i] for i in keep))


def exchange_matrix(rows: Sequence[Sequence[int]]) -> ExchangeMatrix:
    """Validate rows and compute a minimal positive symmetrizer."""
    n = len(rows)
    b = tuple(tuple(int(v) for v in row) for row in rows)
    if any(len(row) != n for row in b):
        raise ValueError("exchange matrix must be square")
    for i in range(n):
        for j in range(n):
            if (b[i][j] == 0) != (b[j][i] == 0):
                raise ValueError(f"zero pattern not symmetric at ({i},{j})")
            if b[i][j] * b[j][i] > 0:
                raise ValueError(f"entries ({i},{j}) do not have opposite signs")
    d: list[Optional[Fraction]] = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        queue = [start]
        while queue:
            i = queue.pop()
            for j in range(n):
                if b[i][j] == 0:
                    continue
                want = d[i] * b[i][j] / -b[j][i]
                if d[j] is None:
                    d[j] = want
                    queue.append(j)
                elif d[j] != want:
                    raise ValueError("no symmetrizer exists")
    lcm = 1
    for v in d:
        lcm = lcm * v.denominator // gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in d]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return ExchangeMatrix(b, tuple(v // (g or 1) for v in ints))


def digraph_cycle_nodes(b: ExchangeMatrix) -> frozenset:
    """Vertices lying on a directed cycle of the arrow digraph (b_ij > 0)."""
    n = b.n
    adj = [[j for j in range(n) if b.entries[i][j] > 0] for i in range(n)]
    reach = [set(a) for a in adj]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            add = set()
            for j in reach[i]:
                add |= reach[j]
            if not add <= reach[i]:
                reach[i] |= add
                changed = True
    return frozenset(i for i in range(n) if i in reach[i])


def is_acyclic(b: ExchangeMatrix) -> bool:
    return not digraph_cycle_nodes(b)


def find_covering_pair(b: ExchangeMatrix) -> Optional[tuple[int, int, bool]]:
    """Smallest covering pair (i, j, terminal), terminal pairs first.

    (i, j) is covering when b_ij > 0 and not (i is reachable from a
    directed cycle and j reaches one); terminal when i is a source or j a
    sink, which forces covering.
    """
    n = b.n
    ent = b.entries
    cyc = digraph_cycle_nodes(b)
    from_cycle = set(cyc)
    to_cycle = set(cyc)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if ent[i][j] > 0:
                    if i in from_cycle and j not in from_cycle:
                        from_cycle.add(j)
                        changed = True
                    if j in to_cycle and i not in to_cycle:
                        to_cycle.add(i)
                        changed = True
    best_any = None
    for i in range(n):
        for j in range(n):
            if ent[i][j] <= 0:
                continue
            source = all(ent[k][i] <= 0 for k in range(n))
            sink = all(ent[j][k] <= 0 for k in range(n))
            if source or sink:
                return (i, j, True)
            if best_any is None and not (i in from_cycle and j in to_cycle):
                best_any = (i, j, False)
    return best_any


# ---------------------------------------------------------------------------
# seeds


@dataclass(frozen=True)
class Gen:
    """A semifield generator: original frozen variable or frozen cluster var."""

    name: str
    slot: int
    expr: LaurentPoly


@dataclass(frozen=True)
class Seed:
    table: VarTable
    ground: str
    mutable: tuple[int, ...]
    exprs: tuple[LaurentPoly, ...]
    B: ExchangeMatrix
    gens: tuple[Gen, ...]
    coeffs: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.mutable)

    def is_identity_frame(self) -> bool:
        return all(
            self.exprs[s] == LaurentPoly.variable(self.table, s)
            for s in range(self.table.arity)
        )

    def search_key(self):
        return (self.B.entries, self.coeffs)


def initial_seed(
    b_rows: Sequence[Sequence[int]],
    frozen_rows: Sequence[Sequence[int]] = (),
    ground: str = "Q",
) -> Seed:
    if ground not in ("Q", "Z"):
        raise ValueError("ground must be Q or Z")
    B = exchange_matrix(b_rows)
    n = B.n
    m = len(frozen_rows)
    for row in frozen_rows:
        if len(row) != n:
            raise ValueError("frozen rows must have one entry per direction")
    table = var_table(n, m)
    exprs = tuple(LaurentPoly.variable(table, s) for s in range(n + m))
    gens = tuple(
        Gen(table.names[n + k], n + k, exprs[n + k]) for k in range(m)
    )
    coeffs = tuple(tuple(int(frozen_rows[k][j]) for k in range(m)) for j in range(n))
    return Seed(table, ground, tuple(range(n)), exprs, B, gens, coeffs)


def seed_from_json(obj: dict) -> Seed:
    """Parse {"n": int, "B": [[int]], "frozen_rows"?: [[int]], "ground": "Q"|"Z"}."""
    try:
        n = int(obj["n"])
        b_rows = obj["B"]
        ground = obj.get("ground", "Q")
        frozen_rows = obj.get("frozen_rows") or []
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed seed object: {exc}") from None
    if len(b_rows) != n:
        raise ValueError("B must be n x n")
    return initial_seed(b_rows, frozen_rows, ground)


def _coeff_monomials(seed: Seed, vec: Sequence[int]) -> tuple[LaurentPoly, LaurentPoly]:
    """Tropical coefficient split: (prod gens^[a]+, prod gens^[-a]+) in ambient."""
    tp = LaurentPoly.const(seed.table, 1)
    tm = LaurentPoly.const(seed.table, 1)
    for g, a in zip(seed.gens, vec):
        if a > 0:
            tp = tp * g.expr**a
        elif a < 0:
            tm = tm * g.expr ** (-a)
    return tp, tm


def exchange_polynomial(seed: Seed, k: int) -> LaurentPoly:
    """f_k = x_k x_k' expressed in the ambient variables."""
    if not 0 <= k < seed.rank:
        raise ValueError(f"direction {k} out of range")
    tp, tm = _coeff_monomials(seed, seed.coeffs[k])
    for i in range(seed.rank):
        b = seed.B.entries[i][k]
        if b > 0:
            tp = tp * seed.exprs[seed.mutable[i]] ** b
        elif b < 0:
            tm = tm * seed.exprs[seed.mutable[i]] ** (-b)
    return tp + tm


def _mutate_coeffs(coeffs, B, k) -> tuple[tuple[int, ...], ...]:
    ck = coeffs[k]
    low = tuple(min(a, 0) for a in ck)
    out = []
    for j, cj in enumerate(coeffs):
        if j == k:
            out.append(tuple(-a for a in ck))
            continue
        bkj = B.entries[k][j]
        plus = max(bkj, 0)
        out.append(tuple(c + plus * a - bkj * m for c, a, m in zip(cj, ck, low)))
    return tuple(out)


def mutate(seed: Seed, k: int) -> Seed:
    """Seed mutation in direction k (0-based); an involution."""
    if not 0 <= k < seed.rank:
        raise ValueError(f"direction {k} out of range")
    slot = seed.mutable[k]
    f = exchange_polynomial(seed, k)
    new_occ = laurent_exact_div(f, seed.exprs[slot])
    if new_occ is None:
        raise AssertionError("mutation left the Laurent ring; exchange bookkeeping is broken")
    exprs = list(seed.exprs)
    exprs[slot] = new_occ
    return Seed(
        seed.table,
        seed.ground,
        seed.mutable,
        tuple(exprs),
        seed.B.mutate(k),
        seed.gens,
        _mutate_coeffs(seed.coeffs, seed.B, k),
    )


def freeze(seed: Seed, indices: Iterable[int]) -> Seed:
    """Move the given (0-based) directions into the coefficient semifield."""
    chosen = sorted(set(indices))
    if not chosen:
        return seed
    if chosen[0] < 0 or chosen[-1] >= seed.rank:
        raise ValueError("freeze index out of range")
    new_gens = list(seed.gens)
    for i in chosen:
        slot = seed.mutable[i]
        new_gens.append(Gen(f"u{len(new_gens) + 1}", slot, seed.exprs[slot]))
    survivors = [j for j in range(seed.rank) if j not in chosen]
    coeffs = tuple(
        tuple(seed.coeffs[j]) + tuple(seed.B.entries[i][j] for i in chosen)
        for j in survivors
    )
    return Seed(
        seed.table,
        seed.ground,
        tuple(seed.mutable[j] for j in survivors),
        seed.exprs,
        seed.B.delete(chosen),
        tuple(new_gens),
        coeffs,
    )


# ---------------------------------------------------------------------------
# charts


@dataclass(frozen=True)
class Chart:
    """One Laurent chart: coordinates in ambient variables and back."""

    forward: tuple[LaurentPoly, ...]
    backward: tuple[LaurentPoly, ...]
    label: str


@dataclass(frozen=True)
class ChartAtlas:
    charts: tuple[Chart, ...]
    ground: str
    table: VarTable

    def __len__(self) -> int:
        return len(self.charts)


@dataclass(frozen=True)
class SearchLimits:
    max_depth: int = 8
    max_seeds: int = 20000


@dataclass(frozen=True)
class _MutStep:
    slot: int
    column: tuple[tuple[int, int], ...]  # (slot_i, b_ik) for nonzero entries
    coeff: tuple[int, ...]
    gen_slots: tuple[int, ...]


def _identity_chart(seed: Seed) -> Chart:
    xs = tuple(LaurentPoly.variable(seed.table, s) for s in range(seed.table.arity))
    return Chart(xs, xs, "id")


def _tropical_monomials(table: VarTable, coeff, gen_slots) -> tuple[LaurentPoly, LaurentPoly]:
    """T+ and T- as monomials in the chart coordinates of the gen slots."""
    up = [0] * table.arity
    dn = [0] * table.arity
    for a, s in zip(coeff, gen_slots):
        if a > 0:
            up[s] += a
        elif a < 0:
            dn[s] -= a
    return LaurentPoly.monomial(table, tuple(up)), LaurentPoly.monomial(table, tuple(dn))


def _leaf_charts(seed: Seed, steps: tuple) -> list[Chart]:
    """Charts of an isolated (B = 0) seed reached through the given steps."""
    table = seed.table
    arity = table.arity
    gen_slots = tuple(g.slot for g in seed.gens)
    charts = []
    for mask in range(1 << seed.rank):
        flips = [seed.mutable[t] for t in range(seed.rank) if mask >> t & 1]
        # forward: current occupants, with flipped slots exchanged
        forward = list(seed.exprs)
        for t in range(seed.rank):
            if mask >> t & 1:
                slot = seed.mutable[t]
                f = exchange_polynomial(seed, t)
                new_occ = laurent_exact_div(f, seed.exprs[slot])
                assert new_occ is not None
                forward[slot] = new_occ
        # backward: reverse walk from the leaf to the root frame
        x = [LaurentPoly.variable(table, s) for s in range(arity)]
        for t in range(seed.rank):
            if not mask >> t & 1:
                continue
            slot = seed.mutable[t]
            tp, tm = _tropical_monomials(table, seed.coeffs[t], gen_slots)
            x[slot] = laurent_exact_div(tp + tm, x[slot])
            assert x[slot] is not None
        for step in reversed(steps):
            if not isinstance(step, _MutStep):
                continue
            tp, tm = _tropical_monomials(table, step.coeff, step.gen_slots)
            for s, b in step.column:
                if b > 0:
                    tp = tp * x[s] ** b
                else:
                    tm = tm * x[s] ** (-b)
            prev = laurent_exact_div(tp + tm, x[step.slot])
            if prev is None:
                raise AssertionError("backward walk left the Laurent ring")
            x[step.slot] = prev
        label_flips = ",".join(str(s + 1) for s in flips)
        prefix = " ".join(_step_label(s) for s in steps)
        label = (prefix + " " if prefix else "") + "flip{" + label_flips + "}"
        charts.append(Chart(tuple(forward), tuple(x), label))
    return charts


def _step_label(step) -> str:
    if isinstance(step, _MutStep):
        return f"mu{step.slot + 1}"
    return "freeze{" + ",".join(str(s + 1) for s in step) + "}"


def isolated_charts(seed: Seed) -> list[Chart]:
    """The 2^rank charts of an isolated seed (B = 0), identity frame."""
    if not seed.B.is_zero:
        raise ValueError("seed is not isolated")
    if not seed.is_identity_frame():
        raise ValueError("isolated_charts expects an unmutated seed")
    return _leaf_charts(seed, ())


def _search_covering(seed: Seed, limits: SearchLimits) -> tuple[Seed, tuple, tuple[int, int, bool]]:
    """BFS over mutation sequences until a seed has a covering pair.

    Works on light (B, coeffs, path) nodes and replays the winning path on
    the full seed, so cluster expressions are only computed once.
    """
    rank = seed.rank
    frontier: list[tuple[ExchangeMatrix, tuple, tuple[int, ...]]] = [(seed.B, seed.coeffs, ())]
    seen = {(seed.B.entries, seed.coeffs)}
    for _depth in range(limits.max_depth + 1):
        for B, coeffs, path in frontier:
            pair = find_covering_pair(B)
            if pair is not None:
                full = seed
                steps = []
                for k in path:
                    slot = full.mutable[k]
                    steps.append(
                        _MutStep(
                            slot,
                            tuple(
                                (full.mutable[i], full.B.entries[i][k])
                                for i in range(rank)
                                if full.B.entries[i][k]
                            ),
                            full.coeffs[k],
                            tuple(g.slot for g in full.gens),
                        )
                    )
                    full = mutate(full, k)
                return full, tuple(steps), pair
        nxt = []
        for B, coeffs, path in frontier:
            for k in range(rank):
                B2 = B.mutate(k)
                c2 = _mutate_coeffs(coeffs, B, k)
                key = (B2.entries, c2)
                if key in seen:
                    continue
                seen.add(key)
                if len(seen) > limits.max_seeds:
                    raise BudgetExhausted(
                        f"covering-pair search exceeded {limits.max_seeds} seeds"
                    )
                nxt.append((B2, c2, path + (k,)))
        if not nxt:
            raise BudgetExhausted(
                "mutation class exhausted without finding a covering pair"
            )
        frontier = nxt
    raise BudgetExhausted(f"no covering pair within mutation depth {limits.max_depth}")


def _charts_rec(seed: Seed, steps: tuple, limits: SearchLimits) -> list[Chart]:
    if seed.B.is_zero:
        return _leaf_charts(seed, steps)
    found, mut_steps, (i, j, _terminal) = _search_covering(seed, limits)
    out = []
    for idx in (i, j):
        frozen = freeze(found, [idx])
        fstep = (found.mutable[idx],)
        out.extend(_charts_rec(frozen, steps + mut_steps + (fstep,), limits))
    return out


def banff_charts(seed: Seed, limits: SearchLimits = SearchLimits()) -> ChartAtlas:
    """Chart atlas via the covering-pair recursion; chart 0 is the identity."""
    if not seed.is_identity_frame():
        raise ValueError("banff_charts expects the initial (identity) seed")
    charts = [_identity_chart(seed)]
    charts.extend(_charts_rec(seed, (), limits))
    unique = []
    seen = set()
    for c in charts:
        if c.forward in seen:
            continue
        seen.add(c.forward)
        unique.append(c)
    return ChartAtlas(tuple(unique), seed.ground, seed.table)


def banff_generators(seed: Seed, limits: SearchLimits = SearchLimits()) -> list[RatFunc]:
    """A finite generating set of cluster variables, ambient expressions."""

    def rec(s: Seed) -> list[LaurentPoly]:
        if s.B.is_zero:
            out = [s.exprs[slot] for slot in s.mutable]
            for t in range(s.rank):
                slot = s.mutable[t]
                f = exchange_polynomial(s, t)
                flipped = laurent_exact_div(f, s.exprs[slot])
                assert flipped is not None
                out.append(flipped)
            return out
        found, _steps, (i, j, _) = _search_covering(s, limits)
        out = rec(freeze(found, [i])) + rec(freeze(found, [j]))
        out.extend(found.exprs[slot] for slot in found.mutable)
        for idx in (i, j):
            out.append(mutate(found, idx).exprs[found.mutable[idx]])
        return out

    unique: list[LaurentPoly] = []
    seen = set()
    for g in rec(seed):
        if g not in seen:
            seen.add(g)
            unique.append(g)
    return [RatFunc.from_laurent(g) for g in unique]


def one_var_flir(a: Union[int, Fraction], ground: str) -> ChartAtlas:
    """Charts of D[x^±1] ∩ D[(a/x)^±1]; collapses to one chart when a is a unit."""
    if ground not in ("Q", "Z"):
        raise ValueError("ground must be Q or Z")
    a = Fraction(a)
    if a == 0:
        raise ValueError("a must be nonzero")
    if ground == "Z" and a.denominator != 1:
        raise ValueError("a must be an integer over ground Z")
    table = var_table(1)
    x = LaurentPoly.variable(table, 0)
    ident = Chart((x,), (x,), "id")
    unit = True if ground == "Q" else abs(a) == 1
    if unit:
        return ChartAtlas((ident,), ground, table)
    flip = LaurentPoly.monomial(table, (-1,), a)
    other = Chart((flip,), (flip,), "flip{1}")
    return ChartAtlas((ident, other), ground, table)


# ---------------------------------------------------------------------------
# acyclic partner analysis


def acyclic_partner_primes(seed: Seed, i: int) -> list[tuple[LaurentPoly, frozenset]]:
    """Height-one primes over x_i of an acyclic seed, as (P, T) descriptions.

    P runs over the irreducible factors of f_i; T over subsets with
    {i} <= T <= Partner(P) = {j : P divides f_j}.
    """
    from itertools import combinations

    from .factorpoly import factor_laurent

    if not is_acyclic(seed.B):
        raise NotAcyclic("exchange digraph has a directed cycle")
    if not 0 <= i < seed.rank:
        raise ValueError(f"direction {i} out of range")
    factored = [factor_laurent(exchange_polynomial(seed, j)) for j in range(seed.rank)]
    out = []
    for p, _mult in factored[i].factors:
        partner = frozenset(
            j for j in range(seed.rank) if any(q == p for q, _ in factored[j].factors)
        )
        others = sorted(partner - {i})
        for size in range(len(others) + 1):
            for extra in combinations(others, size):
                out.append((p, frozenset((i,) + extra)))
    return out
