"""Prime divisors, divisor computation, and class groups of explicit FLIRs.

Height-one primes of the intersection ring come in three kinds: rational
primes of the ground ring (ground Z only), irreducible Laurent polynomials
seen in chart 0, and primes visible only in a later chart.  A later-chart
prime is named by its first-visible chart index plus its canonical local
form there; the first-visibility rule below makes that naming a bijection,
so no ideal arithmetic is ever needed.

The class group is presented as Z^r over the special primes modulo the
rows of the valuation matrix C with c_ij = v_{P_j}(x_i); everything else
(classes, principality, generators) is integer linear algebra on C.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

from .cluster import Chart, ChartAtlas
from .factorpoly import factor_laurent
from .intarith import (
    SNFData,
    factor_integer,
    identity_matrix,
    lattice_membership,
    smith_normal_form,
)
from .laurent import (
    LaurentPoly,
    RatFunc,
    divisibility_order,
    format_laurent,
    parse_element,
    primitive_form,
    substitute,
)


class NotPrincipal(ValueError):
    """The divisor handed to principal_generator has a nontrivial class."""


# ---------------------------------------------------------------------------
# prime divisors


@dataclass(frozen=True)
class BasePrime:
    """A rational prime of the ground ring Z."""

    p: int


@dataclass(frozen=True)
class TorusPrime:
    """Canonical irreducible Laurent polynomial in chart-0 coordinates."""

    poly: LaurentPoly


@dataclass(frozen=True)
class SpecialPrime:
    """A prime first visible in chart >= 1: local canonical form there."""

    chart: int
    p: Optional[int] = None
    poly: Optional[LaurentPoly] = None

    def __post_init__(self):
        if (self.p is None) == (self.poly is None):
            raise ValueError("exactly one of p and poly must be set")


PrimeDivisor = Union[BasePrime, TorusPrime, SpecialPrime]


def prime_sort_key(P: PrimeDivisor):
    if isinstance(P, BasePrime):
        return (0, P.p, ())
    if isinstance(P, TorusPrime):
        return (1, 0, P.poly.sort_key())
    if P.p is not None:
        return (2, P.chart, 0, P.p, ())
    return (2, P.chart, 1, 0, P.poly.sort_key())


@dataclass(frozen=True)
class Divisor:
    """Finite formal Z-combination of prime divisors."""

    entries: tuple[tuple[PrimeDivisor, int], ...]

    @staticmethod
    def make(data: dict) -> "Divisor":
        items = [(P, c) for P, c in data.items() if c]
        items.sort(key=lambda e: prime_sort_key(e[0]))
        return Divisor(tuple(items))

    @staticmethod
    def zero() -> "Divisor":
        return Divisor(())

    def coeff(self, P: PrimeDivisor) -> int:
        for Q, c in self.entries:
            if Q == P:
                return c
        return 0

    def __add__(self, other: "Divisor") -> "Divisor":
        data = dict(self.entries)
        for P, c in other.entries:
            data[P] = data.get(P, 0) + c
        return Divisor.make(data)

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((P, -c) for P, c in self.entries))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def scale(self, k: int) -> "Divisor":
        if k == 0:
            return Divisor.zero()
        return Divisor(tuple((P, k * c) for P, c in self.entries))

    @property
    def is_zero(self) -> bool:
        return not self.entries

    @property
    def is_effective(self) -> bool:
        return all(c >= 0 for _, c in self.entries)


# ---------------------------------------------------------------------------
# local valuations


def _vp_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _vp_fraction(c: Fraction, p: int) -> int:
    return _vp_int(c.numerator, p) - _vp_int(c.denominator, p)


def _content(f: LaurentPoly) -> Fraction:
    return primitive_form(f)[0]


def _val_at_poly(f: RatFunc, q: LaurentPoly) -> int:
    v = divisibility_order(f.num, q)[0]
    if not f.den.is_one:
        v -= divisibility_order(f.den, q)[0]
    return v


def _val_at_base(f: RatFunc, p: int) -> int:
    v = _vp_fraction(abs(_content(f.num)), p)
    if not f.den.is_one:
        v -= _vp_fraction(abs(_content(f.den)), p)
    return v


def _content_primes(f: RatFunc) -> dict[int, int]:
    """Nonzero p-adic valuations of the rational content of f."""
    c = abs(_content(f.num)) / (abs(_content(f.den)) if not f.den.is_one else 1)
    out: dict[int, int] = {}
    for p, e in factor_integer(c.numerator):
        out[p] = out.get(p, 0) + e
    for p, e in factor_integer(c.denominator):
        out[p] = out.get(p, 0) - e
    return {p: v for p, v in out.items() if v}


def lp_divisor(f: RatFunc, chart: Chart, ground: str) -> Divisor:
    """Divisor of f in one chart's Laurent ring; monomial factors are units."""
    if f.is_zero:
        raise ValueError("divisor of zero")
    if f.num.table.arity != len(chart.forward):
        raise ValueError("element and chart have different coordinate counts")
    data: dict[PrimeDivisor, int] = {}
    if ground == "Z":
        for p, v in _content_primes(f).items():
            data[BasePrime(p)] = v
    for part, sign in ((f.num, 1), (f.den, -1)):
        if part.is_one:
            continue
        for q, mult in factor_laurent(part).factors:
            key = TorusPrime(q)
            data[key] = data.get(key, 0) + sign * mult
    return Divisor.make(data)


# ---------------------------------------------------------------------------
# special primes of an atlas


@lru_cache(maxsize=512)
def _backward_images(chart: Chart) -> tuple[RatFunc, ...]:
    return tuple(RatFunc.from_laurent(b) for b in chart.backward)


def _into_chart(f: RatFunc, chart: Chart) -> RatFunc:
    """Rewrite f (chart-0 coordinates) in the given chart's coordinates."""
    return substitute(f, _backward_images(chart))


@dataclass(frozen=True)
class _LocalPrime:
    """A candidate prime of one chart: base p or irreducible poly."""

    p: Optional[int]
    poly: Optional[LaurentPoly]

    def val(self, f: RatFunc) -> int:
        if self.p is not None:
            return _val_at_base(f, self.p)
        return _val_at_poly(f, self.poly)


def _mutable_product_image(atlas: ChartAtlas, src: int, chart: Chart) -> RatFunc:
    """Image in `chart` of the product of chart `src`'s mutable coordinates."""
    prod = RatFunc.const(chart.backward[0].table, 1)
    for s in range(atlas.table.n_mutable):
        prod = prod * _into_chart(RatFunc.from_laurent(atlas.charts[src].forward[s]), chart)
    return prod


@lru_cache(maxsize=64)
def special_primes(atlas: ChartAtlas) -> tuple[SpecialPrime, ...]:
    """Primes over the product of mutable coordinates, first chart wins.

    A local prime Q of chart i is kept iff it divides the image of the
    chart-0 mutable product and the image of every earlier chart's mutable
    product; dropping either condition would double-count a prime already
    visible earlier.
    """
    out = []
    for i in range(1, len(atlas.charts)):
        chart = atlas.charts[i]
        img0 = _mutable_product_image(atlas, 0, chart)
        candidates: list[tuple[_LocalPrime, int]] = []
        if atlas.ground == "Z":
            for p, v in sorted(_content_primes(img0).items()):
                candidates.append((_LocalPrime(p, None), v))
        seen_polys: dict[LaurentPoly, int] = {}
        for part, sign in ((img0.num, 1), (img0.den, -1)):
            if not part.is_one:
                for q, mult in factor_laurent(part).factors:
                    seen_polys[q] = seen_polys.get(q, 0) + sign * mult
        for q in sorted(seen_polys, key=lambda q: q.sort_key()):
            candidates.append((_LocalPrime(None, q), seen_polys[q]))
        earlier = [_mutable_product_image(atlas, e, chart) for e in range(1, i)]
        for local, v in candidates:
            if v <= 0:
                continue
            if all(local.val(img) > 0 for img in earlier):
                out.append(SpecialPrime(i, p=local.p, poly=local.poly))
    return tuple(out)


def _special_val(f: RatFunc, atlas: ChartAtlas, P: SpecialPrime) -> int:
    g = _into_chart(f, atlas.charts[P.chart])
    return _LocalPrime(P.p, P.poly).val(g)


# ---------------------------------------------------------------------------
# divisors over the whole intersection ring


def flir_divisor(
    atlas: ChartAtlas, f: RatFunc, special: Optional[Sequence[SpecialPrime]] = None
) -> Divisor:
    """dv(f): chart-0 divisor plus special-prime coefficients."""
    if f.is_zero:
        raise ValueError("divisor of zero")
    if special is None:
        special = special_primes(atlas)
    d = lp_divisor(f, atlas.charts[0], atlas.ground)
    data = dict(d.entries)
    for P in special:
        v = _special_val(f, atlas, P)
        if v:
            data[P] = v
    return Divisor.make(data)


@dataclass(frozen=True)
class ClassGroupPresentation:
    """H = Z^r over the special primes modulo the rows of C."""

    special: tuple[SpecialPrime, ...]
    C: tuple[tuple[int, ...], ...]
    snf: SNFData
    free_rank: int
    torsion: tuple[int, ...]

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion


def class_group_text(free_rank: int, torsion: Sequence[int]) -> str:
    """Invariant-factor form like "Z^3 + Z/2", or "0" for the trivial group."""
    parts = []
    if free_rank == 1:
        parts.append("Z")
    elif free_rank > 1:
        parts.append(f"Z^{free_rank}")
    parts.extend(f"Z/{t}" for t in torsion)
    return " + ".join(parts) if parts else "0"


def class_group(atlas: ChartAtlas) -> ClassGroupPresentation:
    special = special_primes(atlas)
    r = len(special)
    arity = atlas.table.arity
    table = atlas.table
    rows = []
    for s in range(arity):
        x = RatFunc.from_laurent(LaurentPoly.variable(table, s))
        d = flir_divisor(atlas, x, special)
        rows.append(tuple(d.coeff(P) for P in special))
    for s in range(table.n_mutable, arity):
        assert all(v == 0 for v in rows[s]), "frozen coordinate is not a unit"
    C = tuple(rows)
    if r == 0:
        snf = SNFData((), identity_matrix(arity), ())
        return ClassGroupPresentation(special, C, snf, 0, ())
    snf = smith_normal_form(C)
    nonzero = [d for d in snf.diagonal if d != 0]
    free_rank = r - len(nonzero)
    torsion = tuple(d for d in nonzero if d > 1)
    return ClassGroupPresentation(special, C, snf, free_rank, torsion)


def class_of_divisor(
    atlas: ChartAtlas, pres: ClassGroupPresentation, E: Divisor
) -> tuple[int, ...]:
    """Representative of [E] in Z^r; principal iff it lies in C's row lattice."""
    r = len(pres.special)
    index = {P: j for j, P in enumerate(pres.special)}
    vec = [0] * r
    for P, c in E.entries:
        if isinstance(P, SpecialPrime):
            if P not in index:
                raise ValueError("special prime does not belong to this presentation")
            vec[index[P]] += c
            continue
        if isinstance(P, BasePrime):
            if atlas.ground != "Z":
                raise ValueError("base primes only exist over ground Z")
            elem = RatFunc.const(atlas.table, P.p)
        else:
            elem = RatFunc.from_laurent(P.poly)
        d = flir_divisor(atlas, elem, pres.special)
        for j, Q in enumerate(pres.special):
            vec[j] -= c * d.coeff(Q)
    return tuple(vec)


def divisor_class_preimage(
    pres: ClassGroupPresentation, vec: Sequence[int]
) -> Optional[tuple[int, ...]]:
    """Coordinates m with m*C = vec, None when [vec] is nontrivial."""
    if not pres.special:
        return (0,) * len(pres.C) if all(v == 0 for v in vec) else None
    return lattice_membership(pres.C, vec)


def principal_generator(
    atlas: ChartAtlas, pres: ClassGroupPresentation, E: Divisor
) -> RatFunc:
    """A generator f with dv(f) = E; raises NotPrincipal otherwise.

    f is assembled as d * x^m * (product of torus primes): d covers the
    base-prime part, the torus part is forced, and m solves the remaining
    special-prime equation over the row lattice of C.
    """
    table = atlas.table
    f = RatFunc.const(table, 1)
    d = Fraction(1)
    for P, c in E.entries:
        if isinstance(P, BasePrime):
            if atlas.ground != "Z":
                raise ValueError("base primes only exist over ground Z")
            d *= Fraction(P.p) ** c
        elif isinstance(P, TorusPrime):
            f = f * RatFunc.from_laurent(P.poly) ** c
    df = f * RatFunc.const(table, d)
    dv_df = flir_divisor(atlas, df, pres.special)
    target = tuple(E.coeff(P) - dv_df.coeff(P) for P in pres.special)
    m = divisor_class_preimage(pres, target)
    if m is None:
        raise NotPrincipal("divisor class is nonzero")
    exps = tuple(m)
    result = df * RatFunc.from_laurent(LaurentPoly.monomial(table, exps))
    assert flir_divisor(atlas, result, pres.special) == E, "generator round-trip failed"
    return result


# ---------------------------------------------------------------------------
# membership and factoriality


def is_member(atlas: ChartAtlas, f: RatFunc) -> bool:
    """True iff f is ground-Laurent in every chart of the atlas."""
    if f.is_zero:
        return True
    for chart in atlas.charts:
        g = _into_chart(f, chart)
        lp = g.as_laurent()
        if lp is None:
            return False
        if atlas.ground == "Z" and any(
            not isinstance(c, int) for c in lp.terms.values()
        ):
            return False
    return True


def is_factorial(atlas: ChartAtlas) -> bool:
    """Krull domain with trivial class group, i.e. H = 0."""
    return class_group(atlas).is_trivial


# ---------------------------------------------------------------------------
# serialization


def divisor_to_json(E: Divisor) -> list[dict]:
    out = []
    for P, c in E.entries:
        if isinstance(P, BasePrime):
            out.append({"kind": "base", "p": P.p, "coeff": c})
        elif isinstance(P, TorusPrime):
            out.append({"kind": "torus", "poly": format_laurent(P.poly), "coeff": c})
        elif P.p is not None:
            out.append({"kind": "special", "chart": P.chart, "p": P.p, "coeff": c})
        else:
            out.append(
                {
                    "kind": "special",
                    "chart": P.chart,
                    "poly": format_laurent(P.poly),
                    "coeff": c,
                }
            )
    return out


def _parse_poly(text: str, atlas: ChartAtlas) -> LaurentPoly:
    f = parse_element(text, atlas.table).as_laurent()
    if f is None:
        raise ValueError(f"not a Laurent polynomial: {text!r}")
    _content_c, _shift, p = primitive_form(f)
    if p.is_one:
        raise ValueError(f"monomials are units, not primes: {text!r}")
    factors = factor_laurent(p).factors
    if len(factors) != 1 or factors[0][1] != 1:
        raise ValueError(f"not irreducible: {text!r}")
    return p


def divisor_from_json(data: Sequence[dict], atlas: ChartAtlas) -> Divisor:
    out: dict[PrimeDivisor, int] = {}
    for entry in data:
        kind = entry.get("kind")
        coeff = int(entry["coeff"])
        if kind == "base":
            P: PrimeDivisor = BasePrime(int(entry["p"]))
        elif kind == "torus":
            P = TorusPrime(_parse_poly(entry["poly"], atlas))
        elif kind == "special":
            chart = int(entry["chart"])
            if not 1 <= chart < len(atlas.charts):
                raise ValueError(f"chart index {chart} out of range")
            if "p" in entry:
                P = SpecialPrime(chart, p=int(entry["p"]))
            else:
                P = SpecialPrime(chart, poly=_parse_poly(entry["poly"], atlas))
            if P not in special_primes(atlas):
                raise ValueError(f"not a special prime of this atlas: {entry}")
        else:
            raise ValueError(f"unknown prime kind: {kind!r}")
        out[P] = out.get(P, 0) + coeff
    return Divisor.make(out)
