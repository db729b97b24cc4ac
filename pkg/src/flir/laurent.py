"""Sparse multivariate Laurent polynomials and rational functions over Q.

Terms map integer exponent vectors (tuples, possibly negative entries) to
nonzero rational coefficients; coefficients are plain ints whenever the
denominator is 1 so the common all-integer case stays on fast integer
arithmetic.  The graded-lexicographic order over a fixed variable table is
the one global monomial order; canonical forms (associate-class
representatives) are monic under it, have nonnegative exponents, and no
variable divides every term.  That makes prime-divisor identity a pure
data equality downstream.

Everything is immutable after construction and safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

Coeff = Union[int, Fraction]


@dataclass(frozen=True)
class VarTable:
    """Ordered ambient variables: mutable slots first, then frozen slots."""

    names: tuple[str, ...]
    n_mutable: int

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        if not 0 <= self.n_mutable <= len(self.names):
            raise ValueError("bad mutable count")

    @property
    def arity(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)


def var_table(n: int, m: int = 0) -> VarTable:
    """The standard table x1..xn, y1..ym."""
    names = tuple(f"x{i+1}" for i in range(n)) + tuple(f"y{j+1}" for j in range(m))
    return VarTable(names, n)


def _coeff(c: Coeff) -> Coeff:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _cdiv(a: Coeff, b: Coeff) -> Coeff:
    # exact rational division; never through float
    return _coeff(Fraction(a) / b)


class LaurentPoly:
    """Immutable sparse Laurent polynomial over a fixed VarTable."""

    __slots__ = ("table", "terms", "_hash")

    def __init__(self, table: VarTable, terms: dict):
        self.table = table
        self.terms = terms  # treated as frozen; never mutate after init
        self._hash = None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def const(table: VarTable, c: Coeff) -> "LaurentPoly":
        c = _coeff(c)
        if c == 0:
            return LaurentPoly(table, {})
        return LaurentPoly(table, {(0,) * table.arity: c})

    @staticmethod
    def variable(table: VarTable, i: int) -> "LaurentPoly":
        e = [0] * table.arity
        e[i] = 1
        return LaurentPoly(table, {tuple(e): 1})

    @staticmethod
    def monomial(table: VarTable, exps: Sequence[int], c: Coeff = 1) -> "LaurentPoly":
        c = _coeff(c)
        if c == 0:
            return LaurentPoly(table, {})
        return LaurentPoly(table, {tuple(exps): c})

    @staticmethod
    def from_terms(table: VarTable, items: Iterable[tuple[tuple, Coeff]]) -> "LaurentPoly":
        acc: dict = {}
        for e, c in items:
            s = acc.get(e, 0) + c
            if s == 0:
                acc.pop(e, None)
            else:
                acc[e] = _coeff(s)
        return LaurentPoly(table, acc)

    # -- basic structure ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_one(self) -> bool:
        zero = (0,) * self.table.arity
        return len(self.terms) == 1 and self.terms.get(zero) == 1

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    @property
    def is_constant(self) -> bool:
        zero = (0,) * self.table.arity
        return not self.terms or (len(self.terms) == 1 and zero in self.terms)

    def constant_value(self) -> Coeff:
        if not self.terms:
            return 0
        return self.terms[(0,) * self.table.arity]

    def effective_vars(self) -> tuple[int, ...]:
        """Indices of variables actually occurring."""
        used = [False] * self.table.arity
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used[i] = True
        return tuple(i for i, f in enumerate(used) if f)

    def degree_in(self, i: int) -> int:
        if not self.terms:
            return 0
        return max(e[i] for e in self.terms)

    def min_exp_in(self, i: int) -> int:
        if not self.terms:
            return 0
        return min(e[i] for e in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def leading(self) -> tuple[tuple, Coeff]:
        """Leading (exponent, coefficient) under graded lex."""
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not self.terms:
            return other
        if not other.terms:
            return self
        big, small = (self.terms, other.terms) if len(self.terms) >= len(other.terms) else (other.terms, self.terms)
        acc = dict(big)
        for e, c in small.items():
            s = acc.get(e, 0) + c
            if s == 0:
                acc.pop(e, None)
            else:
                acc[e] = _coeff(s)
        return LaurentPoly(self.table, acc)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.table, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not other.terms:
            return self
        acc = dict(self.terms)
        for e, c in other.terms.items():
            s = acc.get(e, 0) - c
            if s == 0:
                acc.pop(e, None)
            else:
                acc[e] = _coeff(s)
        return LaurentPoly(self.table, acc)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        a, b = self.terms, other.terms
        if not a or not b:
            return LaurentPoly(self.table, {})
        if len(a) > len(b):
            a, b = b, a
        acc: dict = {}
        get = acc.get
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(map(int.__add__, e1, e2))
                s = get(e, 0) + c1 * c2
                if s == 0:
                    acc.pop(e, None)
                else:
                    acc[e] = s
        for e, c in acc.items():
            if type(c) is Fraction and c.denominator == 1:
                acc[e] = c.numerator
        return LaurentPoly(self.table, acc)

    def scale(self, c: Coeff) -> "LaurentPoly":
        if c == 0:
            return LaurentPoly(self.table, {})
        if c == 1:
            return self
        return LaurentPoly(self.table, {e: _coeff(k * c) for e, k in self.terms.items()})

    def mul_monomial(self, exps: Sequence[int], c: Coeff = 1) -> "LaurentPoly":
        if c == 0:
            return LaurentPoly(self.table, {})
        shift = tuple(exps)
        if c == 1 and not any(shift):
            return self
        return LaurentPoly(
            self.table,
            {tuple(map(int.__add__, e, shift)): _coeff(k * c) for e, k in self.terms.items()},
        )

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            raise ValueError("negative power of a polynomial; use RatFunc")
        result = LaurentPoly.const(self.table, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base_needed = k >> 1
            if base_needed:
                base = base * base
            k = base_needed
        return result

    def derivative(self, i: int) -> "LaurentPoly":
        acc: dict = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            d = list(e)
            d[i] -= 1
            acc[tuple(d)] = _coeff(c * e[i])
        return LaurentPoly(self.table, acc)

    # -- comparisons --------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.terms == other.terms and self.table.names == other.table.names

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.table.names, frozenset(self.terms.items())))
        return self._hash

    def sort_key(self):
        """Total deterministic key: degree, size, then the term list."""
        items = sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)
        flat = tuple((e, Fraction(c).numerator, Fraction(c).denominator) for e, c in items)
        return (self.total_degree(), len(self.terms), flat)

    def __repr__(self):
        return f"LaurentPoly({format_laurent(self)})"


def grlex_key(e: tuple) -> tuple:
    return (sum(e), e)


# ---------------------------------------------------------------------------
# normalization


def normalize_laurent(f: LaurentPoly) -> tuple[Coeff, tuple, LaurentPoly]:
    """Split f = c * x^shift * canonical.

    The canonical part has all exponents >= 0, no variable dividing every
    term, and leading coefficient 1 under graded lex; it is the same for
    every associate c' * x^m * f.  Returns (c, shift, canonical).
    """
    if f.is_zero:
        raise ValueError("cannot normalize 0")
    arity = f.table.arity
    shift = [None] * arity
    for e in f.terms:
        for i in range(arity):
            v = e[i]
            if shift[i] is None or v < shift[i]:
                shift[i] = v
    shift = tuple(shift)
    shifted = {tuple(a - b for a, b in zip(e, shift)): c for e, c in f.terms.items()}
    lead = max(shifted, key=grlex_key)
    lc = shifted[lead]
    if lc == 1:
        canon = LaurentPoly(f.table, shifted)
    else:
        inv = Fraction(1, 1) / lc
        canon = LaurentPoly(f.table, {e: _coeff(c * inv) for e, c in shifted.items()})
    return _coeff(lc), shift, canon


def canonical_part(f: LaurentPoly) -> LaurentPoly:
    return normalize_laurent(f)[2]


def primitive_form(f: LaurentPoly) -> tuple[Fraction, tuple, LaurentPoly]:
    """Split f = content * x^shift * P with P integer-primitive.

    P has nonnegative exponents, no variable dividing every term, coprime
    integer coefficients, and positive leading coefficient under graded
    lex; the rational content carries the sign.  This is the associate
    normal form used for prime-divisor identity over both ground rings.
    """
    c, shift, canon = normalize_laurent(f)
    den = 1
    for k in canon.terms.values():
        if type(k) is Fraction:
            den = den * k.denominator // math.gcd(den, k.denominator)
    num = 0
    for k in canon.terms.values():
        num = math.gcd(num, int(k * den))
    scale = Fraction(den, num)
    if scale == 1:
        prim = canon
    else:
        prim = LaurentPoly(f.table, {e: _coeff(k * scale) for e, k in canon.terms.items()})
    return Fraction(c) / scale, tuple(shift), prim


def laurent_unit_quotient(f: LaurentPoly, g: LaurentPoly) -> Optional[tuple[Coeff, tuple]]:
    """If f = u * g for a unit u = c * x^m, return (c, m); else None."""
    if f.is_zero or g.is_zero:
        return None
    cf, sf, canf = normalize_laurent(f)
    cg, sg, cang = normalize_laurent(g)
    if canf != cang:
        return None
    c = _cdiv(cf, cg) if cg != 1 else cf
    return c, tuple(a - b for a, b in zip(sf, sg))


# ---------------------------------------------------------------------------
# exact division


def poly_exact_div(f: LaurentPoly, g: LaurentPoly) -> Optional[LaurentPoly]:
    """Exact quotient of polynomials (nonnegative exponents), or None.

    Standard single-divisor long division under graded lex; succeeds iff g
    divides f in Q[x].
    """
    if g.is_zero:
        raise ZeroDivisionError("division by zero polynomial")
    if f.is_zero:
        return f
    glead = max(g.terms, key=grlex_key)
    gc = g.terms[glead]
    rest = [(e, c) for e, c in g.terms.items() if e != glead]
    quot: dict = {}
    rem = dict(f.terms)
    while rem:
        e = max(rem, key=grlex_key)
        qe = tuple(map(int.__sub__, e, glead))
        if any(k < 0 for k in qe):
            return None
        qc = _cdiv(rem[e], gc) if gc != 1 else rem[e]
        quot[qe] = qc
        del rem[e]
        for ge, gcf in rest:
            te = tuple(map(int.__add__, qe, ge))
            s = rem.get(te, 0) - qc * gcf
            if s == 0:
                rem.pop(te, None)
            else:
                rem[te] = _coeff(s)
    return LaurentPoly(f.table, quot)


def laurent_exact_div(f: LaurentPoly, g: LaurentPoly) -> Optional[LaurentPoly]:
    """Exact quotient in the Laurent ring, or None if g does not divide f."""
    if g.is_zero:
        raise ZeroDivisionError("division by zero")
    if f.is_zero:
        return f
    cf, sf, canf = normalize_laurent(f)
    cg, sg, cang = normalize_laurent(g)
    if cang.is_one:
        q = canf
    else:
        q = poly_exact_div(canf, cang)
        if q is None:
            return None
    shift = tuple(a - b for a, b in zip(sf, sg))
    return q.mul_monomial(shift, _cdiv(cf, cg))


def divisibility_order(f: LaurentPoly, p: LaurentPoly) -> tuple[int, LaurentPoly]:
    """Largest k with p^k dividing f (in the Laurent ring), plus cofactor."""
    k = 0
    while True:
        q = laurent_exact_div(f, p)
        if q is None:
            return k, f
        k += 1
        f = q


# ---------------------------------------------------------------------------
# gcd


def poly_gcd(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """A gcd in Q[x] of the canonical parts, itself canonical.

    Naive pseudo-remainder sequences blow up doubly exponentially on the
    coefficient side, so the heavy lifting is delegated to sympy's modular
    gcd; this routine only translates representations and renormalizes.
    """
    if f.is_zero and g.is_zero:
        raise ValueError("gcd(0, 0) undefined")
    if f.is_zero:
        return canonical_part(g)
    if g.is_zero:
        return canonical_part(f)
    a = canonical_part(f)
    b = canonical_part(g)
    if a.is_one or b.is_one:
        return LaurentPoly.const(f.table, 1)
    if a == b:
        return a
    used = sorted(set(a.effective_vars()) | set(b.effective_vars()))
    if not used:
        return LaurentPoly.const(f.table, 1)
    d = _sympy_gcd(a, b, used)
    return canonical_part(d)


def _sympy_gcd(a: LaurentPoly, b: LaurentPoly, used: Sequence[int]) -> LaurentPoly:
    import sympy

    ring, *_gens = sympy.ring(",".join(a.table.names[i] for i in used), sympy.QQ)

    def fwd(p: LaurentPoly):
        return ring.from_dict(
            {tuple(e[i] for i in used): sympy.QQ(Fraction(c)) for e, c in p.terms.items()}
        )

    d = fwd(a).gcd(fwd(b))
    acc: dict = {}
    for mono, c in d.terms():
        e = [0] * a.table.arity
        for i, k in zip(used, mono):
            e[i] = int(k)
        acc[tuple(e)] = _coeff(Fraction(int(c.numerator), int(c.denominator)))
    return LaurentPoly(a.table, acc)


# ---------------------------------------------------------------------------
# rational functions


class RatFunc:
    """Reduced rational function: Laurent numerator over canonical denominator.

    The denominator is always a canonical polynomial (monic, nonnegative
    exponents, not divisible by any variable); monomial units live in the
    numerator as negative exponents.  A denominator of 1 therefore means
    the value is a genuine Laurent polynomial.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: Optional[LaurentPoly] = None, _reduced=False):
        if den is None:
            den = LaurentPoly.const(num.table, 1)
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        if not _reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def from_laurent(p: LaurentPoly) -> "RatFunc":
        return RatFunc(p, None, _reduced=True)

    @staticmethod
    def const(table: VarTable, c: Coeff) -> "RatFunc":
        return RatFunc.from_laurent(LaurentPoly.const(table, c))

    @property
    def table(self) -> VarTable:
        return self.num.table

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def is_laurent(self) -> bool:
        return self.den.is_one

    def as_laurent(self) -> Optional[LaurentPoly]:
        """The Laurent expansion, or None (NotLaurent) if there is none."""
        return self.num if self.den.is_one else None

    def __add__(self, other: "RatFunc") -> "RatFunc":
        if self.den.is_one and other.den.is_one:
            return RatFunc.from_laurent(self.num + other.num)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        if self.den.is_one and other.den.is_one:
            return RatFunc.from_laurent(self.num - other.num)
        return RatFunc(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, _reduced=True)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        if self.den.is_one and other.den.is_one:
            return RatFunc.from_laurent(self.num * other.num)
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.is_zero:
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def inverse(self) -> "RatFunc":
        if self.is_zero:
            raise ZeroDivisionError("inverse of 0")
        return RatFunc(self.den, self.num)

    def __pow__(self, k: int) -> "RatFunc":
        if k < 0:
            return self.inverse() ** (-k)
        num = self.num**k
        den = self.den**k
        return RatFunc(num, den, _reduced=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def sort_key(self):
        return (self.num.sort_key(), self.den.sort_key())

    def __repr__(self):
        return f"RatFunc({format_ratfunc(self)})"


def _reduce(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if num.is_zero:
        return num, LaurentPoly.const(num.table, 1)
    dc, ds, dcan = normalize_laurent(den)
    num = num.mul_monomial(tuple(-s for s in ds), _coeff(Fraction(1, 1) / dc))
    if dcan.is_one:
        return num, dcan
    g = poly_gcd(num, dcan)
    if not g.is_one:
        nc, ns, ncan = normalize_laurent(num)
        ncan_q = poly_exact_div(ncan, g)
        dcan_q = poly_exact_div(dcan, g)
        assert ncan_q is not None and dcan_q is not None
        num = ncan_q.mul_monomial(ns, nc)
        dc2, ds2, dcan = normalize_laurent(dcan_q)
        num = num.mul_monomial(tuple(-s for s in ds2), _coeff(Fraction(1, 1) / dc2))
    return num, dcan


# ---------------------------------------------------------------------------
# substitution


def substitute_laurent(f: LaurentPoly, images: Sequence[RatFunc]) -> RatFunc:
    """Exact composition f(images), reduced."""
    table = images[0].table if images else f.table
    if f.is_zero:
        return RatFunc.const(table, 0)
    if len(images) != f.table.arity:
        raise ValueError("image count mismatch")
    used = f.effective_vars()
    for i in used:
        if images[i].is_zero and f.min_exp_in(i) < 0:
            raise ZeroDivisionError(f"image of {f.table.names[i]} is 0 but occurs inverted")
    # pull the negative part of each variable out front
    mins = [min(0, f.min_exp_in(i)) if i in used else 0 for i in range(f.table.arity)]
    maxs = [f.degree_in(i) - mins[i] if i in used else 0 for i in range(f.table.arity)]
    num_pows: dict[tuple[int, int], LaurentPoly] = {}
    den_pows: dict[tuple[int, int], LaurentPoly] = {}

    def npow(i, k):
        p = num_pows.get((i, k))
        if p is None:
            p = images[i].num ** k
            num_pows[(i, k)] = p
        return p

    def dpow(i, k):
        p = den_pows.get((i, k))
        if p is None:
            p = images[i].den ** k
            den_pows[(i, k)] = p
        return p

    total = LaurentPoly.const(table, 0)
    for e, c in f.terms.items():
        term = LaurentPoly.const(table, c)
        for i in used:
            k = e[i] - mins[i]
            if k:
                term = term * npow(i, k)
            anti = maxs[i] - k
            if anti:
                term = term * dpow(i, anti)
        total = total + term
    den = LaurentPoly.const(table, 1)
    for i in used:
        if maxs[i]:
            den = den * dpow(i, maxs[i])
        if mins[i]:
            # factor images[i]^mins[i] with mins[i] < 0
            den = den * npow(i, -mins[i])
            total = total * dpow(i, -mins[i])
    return RatFunc(total, den)


def substitute(f: RatFunc, images: Sequence[RatFunc]) -> RatFunc:
    """Exact composition for rational functions, eagerly reduced."""
    num = substitute_laurent(f.num, images)
    if f.den.is_one:
        return num
    den = substitute_laurent(f.den, images)
    if den.is_zero:
        raise ZeroDivisionError("denominator vanishes under substitution")
    return num / den


def substitute_all_laurent(f: LaurentPoly, images: Sequence[LaurentPoly]) -> Optional[LaurentPoly]:
    """Compose with Laurent images, requiring a Laurent result.

    Negative exponents of f produce division by the corresponding image; each
    such division is performed exactly (no gcd), so compositions that stay in
    the Laurent ring cost only multiplications and exact long divisions.
    Returns None when some division fails, i.e. the composition leaves the
    Laurent ring.
    """
    table = images[0].table if images else f.table
    if f.is_zero:
        return LaurentPoly.const(table, 0)
    if len(images) != f.table.arity:
        raise ValueError("image count mismatch")
    used = f.effective_vars()
    for i in used:
        if images[i].is_zero and f.min_exp_in(i) < 0:
            return None
    mins = [min(0, f.min_exp_in(i)) if i in used else 0 for i in range(f.table.arity)]
    pows: dict[tuple[int, int], LaurentPoly] = {}

    def ipow(i, k):
        p = pows.get((i, k))
        if p is None:
            p = images[i] ** k
            pows[(i, k)] = p
        return p

    total = LaurentPoly.const(table, 0)
    for e, c in f.terms.items():
        term = LaurentPoly.const(table, c)
        for i in used:
            k = e[i] - mins[i]
            if k:
                term = term * ipow(i, k)
        total = total + term
    for i in used:
        for _ in range(-mins[i]):
            if total.is_zero:
                return total
            q = laurent_exact_div(total, images[i])
            if q is None:
                return None
            total = q
    return total


# ---------------------------------------------------------------------------
# printing


def _fmt_coeff(c: Coeff) -> str:
    if type(c) is Fraction and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    return str(int(c))


def _fmt_monomial(table: VarTable, e: tuple) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 0:
            continue
        if k == 1:
            parts.append(table.names[i])
        else:
            parts.append(f"{table.names[i]}^{k}")
    return "*".join(parts)


def format_laurent(f: LaurentPoly) -> str:
    """Deterministic printing: graded-lex descending terms."""
    if f.is_zero:
        return "0"
    out = []
    for e, c in sorted(f.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True):
        mono = _fmt_monomial(f.table, e)
        neg = c < 0
        mag = -c if neg else c
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{_fmt_coeff(mag)}*{mono}"
        else:
            body = _fmt_coeff(mag)
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def format_ratfunc(f: RatFunc) -> str:
    """Print as numerator/denominator with nonnegative exponents throughout."""
    if f.is_zero:
        return "0"
    shift = tuple(-min(0, f.num.min_exp_in(i)) for i in range(f.table.arity))
    num = f.num.mul_monomial(shift)
    den = f.den.mul_monomial(shift)
    num_s = format_laurent(num)
    if den.is_one:
        return num_s
    den_s = format_laurent(den)
    if len(num.terms) > 1 or num_s.startswith("-"):
        num_s = f"({num_s})"
    if len(den.terms) > 1 or any(sum(1 for k in e if k) > 1 for e in den.terms):
        den_s = f"({den_s})"
    return f"{num_s}/{den_s}"


# ---------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    pass


def _tokenize(s: str):
    tokens = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(s) and s[j].isdigit():
                j += 1
            tokens.append(("int", s[i:j]))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(s) and (s[j].isalnum() or s[j] == "_"):
                j += 1
            tokens.append(("name", s[i:j]))
            i = j
        elif s.startswith("**", i):
            tokens.append(("op", "^"))
            i += 2
        elif ch in "+-*/^()":
            tokens.append(("op", ch))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r} in element string")
    tokens.append(("end", ""))
    return tokens


class _Parser:
    def __init__(self, tokens, table: VarTable):
        self.tokens = tokens
        self.pos = 0
        self.table = table

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expr(self) -> RatFunc:
        sign = 1
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            if val == "-":
                sign = -1
        left = self.term()
        if sign < 0:
            left = -left
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                right = self.term()
                left = left + right if val == "+" else left - right
            else:
                return left

    def term(self) -> RatFunc:
        left = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                right = self.factor()
                left = left * right if val == "*" else left / right
            else:
                return left

    def factor(self) -> RatFunc:
        kind, val = self.peek()
        sign = 1
        while kind == "op" and val in "+-":
            self.take()
            if val == "-":
                sign = -sign
            kind, val = self.peek()
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            exp = self.int_exponent()
            base = base**exp
        return -base if sign < 0 else base

    def int_exponent(self) -> int:
        kind, val = self.take()
        neg = False
        if kind == "op" and val in "+-":
            neg = val == "-"
            kind, val = self.take()
        if kind == "op" and val == "(":
            inner = self.int_exponent()
            kind, val = self.take()
            if not (kind == "op" and val == ")"):
                raise ParseError("expected ) after exponent")
            return -inner if neg else inner
        if kind != "int":
            raise ParseError("expected integer exponent")
        return -int(val) if neg else int(val)

    def atom(self) -> RatFunc:
        kind, val = self.take()
        if kind == "int":
            return RatFunc.const(self.table, int(val))
        if kind == "name":
            try:
                i = self.table.index(val)
            except ValueError:
                raise ParseError(f"unknown variable {val!r}") from None
            return RatFunc.from_laurent(LaurentPoly.variable(self.table, i))
        if kind == "op" and val == "(":
            inner = self.expr()
            kind, val = self.take()
            if not (kind == "op" and val == ")"):
                raise ParseError("expected )")
            return inner
        raise ParseError(f"unexpected token {val!r}")


def parse_element(s: str, table: VarTable) -> RatFunc:
    """Parse an element string like '(x2*x4+x3)/x1' over the table."""
    parser = _Parser(_tokenize(s), table)
    out = parser.expr()
    kind, _ = parser.peek()
    if kind != "end":
        raise ParseError("trailing input after element")
    return out
