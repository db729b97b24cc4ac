"""Complete factorization of Laurent polynomials over Q.

Monomials are units of the Laurent ring, so factorization happens on the
integer-primitive part: f = unit * p1^e1 * ... * pr^er with each p_i an
integer-primitive irreducible with positive leading coefficient and the
unit a single monomial with rational coefficient.

Three routes share that normal form:

* univariate: own implementation (squarefree split, factorization modulo a
  good prime, Hensel lifting to a Landau-Mignotte bound, subset
  recombination), deterministic via a seed derived from the input;
* multivariate: sympy's factor_list behind a representation bridge;
* kronecker_factor: an independent substitution-based route for at most 3
  variables, kept as a cross-check oracle for the other two.

Results are memoized by primitive part, since divisor computations factor
the same backward maps many times.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .intarith import _is_probable_prime
from .laurent import (
    LaurentPoly,
    VarTable,
    laurent_exact_div,
    primitive_form,
)


@dataclass(frozen=True)
class FactoredForm:
    """unit * prod(factor^mult) == the factored element, exactly."""

    unit: LaurentPoly
    factors: tuple[tuple[LaurentPoly, int], ...]

    def value(self) -> LaurentPoly:
        out = self.unit
        for p, e in self.factors:
            out = out * p**e
        return out

    @property
    def is_unit(self) -> bool:
        return not self.factors

    def multiplicity_total(self) -> int:
        return sum(e for _, e in self.factors)


_FACTOR_CACHE: dict[LaurentPoly, tuple[tuple[LaurentPoly, int], ...]] = {}


def clear_factor_cache() -> None:
    _FACTOR_CACHE.clear()


def _assemble(table: VarTable, content: Fraction, shift: tuple, parts: Sequence[LaurentPoly]) -> FactoredForm:
    counts: dict[LaurentPoly, int] = {}
    for p in parts:
        counts[p] = counts.get(p, 0) + 1
    factors = tuple(sorted(counts.items(), key=lambda t: t[0].sort_key()))
    unit = LaurentPoly.monomial(table, shift, content)
    return FactoredForm(unit, factors)


def factor_laurent(f: LaurentPoly) -> FactoredForm:
    """Factor f into Laurent-irreducibles; dispatches on variable count."""
    if f.is_zero:
        raise ValueError("cannot factor 0")
    content, shift, prim = primitive_form(f)
    if prim.is_one:
        return _assemble(f.table, content, shift, [])
    cached = _FACTOR_CACHE.get(prim)
    if cached is None:
        used = prim.effective_vars()
        if len(used) == 1:
            parts = _factor_one_var(prim, used[0])
        else:
            parts = _factor_sympy(prim, used)
        cached = tuple(sorted(((p, parts.count(p)) for p in set(parts)), key=lambda t: t[0].sort_key()))
        _FACTOR_CACHE[prim] = cached
    unit = LaurentPoly.monomial(f.table, shift, content)
    return FactoredForm(unit, cached)


def factor_univariate(f: LaurentPoly) -> FactoredForm:
    """Factorization for polynomials in (at most) one variable."""
    if f.is_zero:
        raise ValueError("cannot factor 0")
    if len(f.effective_vars()) > 1:
        raise ValueError("more than one variable; use factor_multivariate")
    return factor_laurent(f)


def factor_multivariate(f: LaurentPoly) -> FactoredForm:
    """Factorization for any number of variables."""
    return factor_laurent(f)


# ---------------------------------------------------------------------------
# sympy bridge (multivariate primary route)

_SYMPY_RINGS: dict = {}


def _sympy_ring(names: tuple[str, ...]):
    ring = _SYMPY_RINGS.get(names)
    if ring is None:
        import sympy

        ring, *_ = sympy.ring(",".join(names), sympy.ZZ)
        _SYMPY_RINGS[names] = ring
    return ring


def _factor_sympy(prim: LaurentPoly, used: Sequence[int]) -> list[LaurentPoly]:
    ring = _sympy_ring(tuple(prim.table.names[i] for i in used))
    elem = ring.from_dict({tuple(e[i] for i in used): int(c) for e, c in prim.terms.items()})
    _, facs = elem.factor_list()
    parts: list[LaurentPoly] = []
    for g, mult in facs:
        acc: dict = {}
        for mono, c in g.terms():
            e = [0] * prim.table.arity
            for i, k in zip(used, mono):
                e[i] = int(k)
            acc[tuple(e)] = int(c)
        poly = primitive_form(LaurentPoly(prim.table, acc))[2]
        parts.extend([poly] * mult)
    _check_reconstruction(prim, parts)
    return parts


def _check_reconstruction(prim: LaurentPoly, parts: Sequence[LaurentPoly]) -> None:
    got = LaurentPoly.const(prim.table, 1)
    for p in parts:
        got = got * p
    if got != prim:
        raise AssertionError("factorization failed to reconstruct its input")


# ---------------------------------------------------------------------------
# univariate route: dense integer polynomials, index = degree

IntPoly = list


def _trim(a: IntPoly) -> IntPoly:
    while a and a[-1] == 0:
        a.pop()
    return a


def _deg(a: IntPoly) -> int:
    return len(a) - 1


def _zmul(a: IntPoly, b: IntPoly) -> IntPoly:
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return _trim(out)


def _zderiv(a: IntPoly) -> IntPoly:
    return _trim([i * a[i] for i in range(1, len(a))])


def _zcontent(a: IntPoly) -> int:
    return math.gcd(*a) if a else 0


def _zprimitive(a: IntPoly) -> IntPoly:
    g = _zcontent(a)
    if a[-1] < 0:
        g = -g
    return [c // g for c in a]


def _zdiv_exact(a: IntPoly, b: IntPoly) -> Optional[IntPoly]:
    """Exact quotient in Q[x] restricted to integer results, else None."""
    if not a:
        return []
    r = [Fraction(c) for c in a]
    q = [Fraction(0)] * (len(a) - len(b) + 1) if len(a) >= len(b) else []
    lb = b[-1]
    while len(r) >= len(b):
        c = r[-1] / lb
        k = len(r) - len(b)
        q[k] = c
        for j in range(len(b)):
            r[k + j] -= c * b[j]
        while r and r[-1] == 0:
            r.pop()
    if r:
        return None
    out = []
    for c in q:
        if c.denominator != 1:
            return None
        out.append(int(c))
    return _trim(out)


def _zgcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Primitive gcd over Z via the primitive pseudo-remainder sequence."""
    if not a:
        return _zprimitive(list(b))
    if not b:
        return _zprimitive(list(a))
    cont = math.gcd(_zcontent(a), _zcontent(b))
    fa, fb = _zprimitive(list(a)), _zprimitive(list(b))
    if _deg(fa) < _deg(fb):
        fa, fb = fb, fa
    while True:
        lb = fb[-1]
        r = list(fa)
        while len(r) >= len(fb):
            lr = r[-1]
            k = len(r) - len(fb)
            r = [c * lb for c in r]
            for j in range(len(fb)):
                r[k + j] -= lr * fb[j]
            r.pop()
            _trim(r)
        if not r:
            break
        if _deg(r) == 0:
            fb = [1]
            break
        fa, fb = fb, _zprimitive(r)
    return _zmul([cont], fb) if cont != 1 else fb


def _squarefree_decompose(a: IntPoly) -> list[tuple[IntPoly, int]]:
    """Yun's algorithm: primitive a = prod over (g, i) of g^i, g squarefree."""
    out = []
    u = _zgcd(a, _zderiv(a))
    if _deg(u) == 0:
        return [(a, 1)]
    v = _zdiv_exact(a, u)
    w = _zdiv_exact(_zderiv(a), u)
    i = 1
    while _deg(v) > 0:
        z = _trim([wc - vc for wc, vc in _zip_sub(w, _zderiv(v))])
        g = _zgcd(v, z) if z else _zprimitive(list(v))
        if _deg(g) > 0:
            out.append((g, i))
            v = _zdiv_exact(v, g)
            z2 = _zdiv_exact(z, g) if z else []
        else:
            z2 = z
        if not _deg(v) > 0:
            break
        w = z2
        i += 1
    return out


def _zip_sub(a: IntPoly, b: IntPoly):
    n = max(len(a), len(b))
    for i in range(n):
        yield (a[i] if i < len(a) else 0), (b[i] if i < len(b) else 0)


# mod-p helpers; coefficients in [0, p)


def _pmod(a: IntPoly, p: int) -> IntPoly:
    return _trim([c % p for c in a])


def _pmul(a: IntPoly, b: IntPoly, p: int) -> IntPoly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    return _trim(out)


def _pmonic(a: IntPoly, p: int) -> IntPoly:
    inv = pow(a[-1], p - 2, p)
    return [c * inv % p for c in a]


def _pdivmod(a: IntPoly, b: IntPoly, p: int) -> tuple[IntPoly, IntPoly]:
    r = [c % p for c in a]
    db = len(b) - 1
    if len(r) - 1 < db:
        return [], _trim(r)
    q = [0] * (len(r) - db)
    inv = pow(b[-1], p - 2, p)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k] * inv % p
        if c:
            q[k - db] = c
            for j in range(db + 1):
                r[k - db + j] = (r[k - db + j] - c * b[j]) % p
    return _trim(q), _trim(r[:db])


def _pgcd(a: IntPoly, b: IntPoly, p: int) -> IntPoly:
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    return _pmonic(a, p) if a else []


def _ppowmod(base: IntPoly, e: int, mod: IntPoly, p: int) -> IntPoly:
    result = [1]
    base = _pdivmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _pdivmod(_pmul(result, base, p), mod, p)[1]
        e >>= 1
        if e:
            base = _pdivmod(_pmul(base, base, p), mod, p)[1]
    return result


def _factor_mod_p(f: IntPoly, p: int, rng: random.Random) -> list[IntPoly]:
    """Monic squarefree f over F_p -> sorted monic irreducibles."""
    out: list[IntPoly] = []
    x = [0, 1]
    v = list(f)
    h = list(x)
    d = 0
    while _deg(v) >= 2 * (d + 1):
        d += 1
        h = _ppowmod(h, p, v, p)
        g = _pgcd(_pmod([a - b for a, b in _zip_sub(h, x)], p), v, p)
        if _deg(g) > 0:
            out.extend(_equal_degree_split(g, d, p, rng))
            v = _pdivmod(v, g, p)[0]
            h = _pdivmod(h, v, p)[1]
    if _deg(v) > 0:
        out.append(_pmonic(v, p))
    out.sort(key=lambda g: (len(g), tuple(g)))
    return out


def _equal_degree_split(g: IntPoly, d: int, p: int, rng: random.Random) -> list[IntPoly]:
    if _deg(g) == d:
        return [g]
    exp = (p**d - 1) // 2
    while True:
        r = _trim([rng.randrange(p) for _ in range(_deg(g))])
        if _deg(r) < 1:
            continue
        w = _ppowmod(r, exp, g, p)
        w = _pmod([a - b for a, b in _zip_sub(w, [1])], p)
        t = _pgcd(w, g, p) if w else []
        if t and 0 < _deg(t) < _deg(g):
            rest = _pdivmod(g, t, p)[0]
            return _equal_degree_split(t, d, p, rng) + _equal_degree_split(rest, d, p, rng)


# Hensel lifting, linear steps, everything reduced mod p^K


def _bezout_mod_p(g: IntPoly, h: IntPoly, p: int) -> tuple[IntPoly, IntPoly]:
    """s, t with s*g + t*h = 1 over F_p (g, h coprime)."""
    r0, r1 = list(g), list(h)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = _pdivmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _pmod([a - b for a, b in _zip_sub(s0, _pmul(q, s1, p))], p)
        t0, t1 = t1, _pmod([a - b for a, b in _zip_sub(t0, _pmul(q, t1, p))], p)
    inv = pow(r0[-1], p - 2, p)
    return [c * inv % p for c in s0], [c * inv % p for c in t0]


def _hensel_pair(f: IntPoly, g: IntPoly, h: IntPoly, p: int, pk: int) -> tuple[IntPoly, IntPoly]:
    """Lift f = g*h from mod p to mod pk (all monic), linear steps."""
    s, t = _bezout_mod_p(g, h, p)
    g0 = _pmod(g, p)
    h0 = _pmod(h, p)
    g = list(g)
    h = list(h)
    m = p
    while m < pk:
        prod = _zmul(g, h)
        e = _trim([((fc - pc) % (m * p)) // m % p for fc, pc in _zip_sub(f, prod)])
        if e:
            dg = _pdivmod(_pmul(t, e, p), g0, p)[1]
            num = _pmod([a - b for a, b in _zip_sub(e, _pmul(h0, dg, p))], p)
            dh, check = _pdivmod(num, g0, p)
            assert not check, "hensel correction not divisible"
            g = _trim([(gc + m * dc) % (m * p) for gc, dc in _zip_sub(g, dg)])
            h = _trim([(hc + m * dc) % (m * p) for hc, dc in _zip_sub(h, dh)])
        m *= p
    bad = _trim([(fc - pc) % pk for fc, pc in _zip_sub(f, _zmul(g, h))])
    assert not bad, "hensel lift lost the product"
    return g, h


def _hensel_tree(f: IntPoly, facs: list[IntPoly], p: int, pk: int) -> list[IntPoly]:
    if len(facs) == 1:
        return [_trim([c % pk for c in f])]
    mid = len(facs) // 2
    g0 = [1]
    for a in facs[:mid]:
        g0 = _pmul(g0, a, p)
    h0 = [1]
    for a in facs[mid:]:
        h0 = _pmul(h0, a, p)
    g, h = _hensel_pair(_trim([c % pk for c in f]), g0, h0, p, pk)
    return _hensel_tree(g, facs[:mid], p, pk) + _hensel_tree(h, facs[mid:], p, pk)


def _symmetric(a: IntPoly, pk: int) -> IntPoly:
    half = pk // 2
    return _trim([c - pk if c > half else c for c in a])


def _mignotte_steps(a: IntPoly, p: int) -> tuple[int, int]:
    norm = math.isqrt(sum(c * c for c in a)) + 1
    bound = 2 * (norm << _deg(a)) + 1
    pk = p
    while pk <= bound:
        pk *= p
    return pk, bound


def _choose_prime(a: IntPoly) -> int:
    p = 3
    while True:
        if _is_probable_prime(p) and a[-1] % p:
            ap = _pmod(a, p)
            if _deg(ap) == _deg(a) and _deg(_pgcd(ap, _pmod(_zderiv(a), p), p)) == 0:
                return p
        p += 2


def _factor_monic_squarefree(a: IntPoly) -> list[IntPoly]:
    if _deg(a) == 1:
        return [a]
    p = _choose_prime(a)
    seed = hash((p,) + tuple(a))
    facs_p = _factor_mod_p(_pmod(a, p), p, random.Random(seed))
    if len(facs_p) == 1:
        return [a]
    pk, _ = _mignotte_steps(a, p)
    lifted = _hensel_tree(a, facs_p, p, pk)
    current = list(a)
    out: list[IntPoly] = []
    size = 1
    while 2 * size <= len(lifted):
        hit = None
        for idxs in combinations(range(len(lifted)), size):
            g = [1]
            for i in idxs:
                g = _zmul(g, lifted[i])
                g = [c % pk for c in g]
            g = _symmetric(g, pk)
            if not g or _deg(g) == 0:
                continue
            q = _zdiv_exact(current, g)
            if q is not None:
                hit = (idxs, g, q)
                break
        if hit is None:
            size += 1
            continue
        idxs, g, q = hit
        out.append(g)
        lifted = [w for i, w in enumerate(lifted) if i not in idxs]
        current = q
    if _deg(current) > 0:
        out.append(current)
    return out


def _factor_squarefree_primitive(a: IntPoly) -> list[IntPoly]:
    d = _deg(a)
    if d == 1:
        return [list(a)]
    b = a[-1]
    if b == 1:
        return _factor_monic_squarefree(list(a))
    # b^(d-1) * a(x/b) is monic with integer coefficients
    scaled = [c * b ** (d - 1 - k) for k, c in enumerate(a[:-1])] + [1]
    parts = _factor_monic_squarefree(scaled)
    return [_zprimitive([c * b**k for k, c in enumerate(h)]) for h in parts]


def _factor_primitive_ints(a: IntPoly) -> list[IntPoly]:
    """All irreducible factors of primitive a with multiplicity (repeats)."""
    out: list[IntPoly] = []
    for g, mult in _squarefree_decompose(a):
        for h in _factor_squarefree_primitive(g):
            out.extend([h] * mult)
    return out


def _factor_one_var(prim: LaurentPoly, v: int) -> list[LaurentPoly]:
    coeffs = [0] * (prim.degree_in(v) + 1)
    for e, c in prim.terms.items():
        coeffs[e[v]] = int(c)
    parts = _factor_primitive_ints(coeffs)
    out = []
    for h in parts:
        terms = {}
        for k, c in enumerate(h):
            if c:
                e = [0] * prim.table.arity
                e[v] = k
                terms[tuple(e)] = c
        out.append(LaurentPoly(prim.table, terms))
    _check_reconstruction(prim, out)
    return out


# ---------------------------------------------------------------------------
# Kronecker-substitution oracle (at most 3 variables)


def kronecker_factor(f: LaurentPoly) -> FactoredForm:
    """Independent factorization by Kronecker substitution.

    Exponential in the factor count; intended as a cross-check for small
    inputs, not as a production route.
    """
    if f.is_zero:
        raise ValueError("cannot factor 0")
    content, shift, prim = primitive_form(f)
    parts: list[LaurentPoly] = []
    stack = [prim]
    while stack:
        q = stack.pop()
        if q.is_one:
            continue
        split = _kron_split(q)
        if split is None:
            parts.append(q)
        else:
            stack.extend(split)
    return _assemble(f.table, content, shift, parts)


def _kron_split(prim: LaurentPoly) -> Optional[list[LaurentPoly]]:
    used = prim.effective_vars()
    if not used:
        return None
    if len(used) == 1:
        parts = _factor_one_var(prim, used[0])
        return None if len(parts) == 1 else parts
    if len(used) > 3:
        raise ValueError("kronecker route limited to 3 variables")
    radices = [prim.degree_in(i) + 1 for i in used]
    weights = [1]
    for r in radices[:-1]:
        weights.append(weights[-1] * r)
    image: dict[int, int] = {}
    for e, c in prim.terms.items():
        z = sum(e[i] * w for i, w in zip(used, weights))
        image[z] = int(c)
    u = [0] * (max(image) + 1)
    for z, c in image.items():
        u[z] = c
    if u[-1] < 0:
        u = [-c for c in u]
    ufacs = _factor_primitive_ints(u)
    if len(ufacs) == 1:
        return None
    seen = set()
    for size in range(1, len(ufacs)):
        for idxs in combinations(range(len(ufacs)), size):
            key = tuple(sorted(tuple(ufacs[i]) for i in idxs))
            if key in seen:
                continue
            seen.add(key)
            g = [1]
            for i in idxs:
                g = _zmul(g, ufacs[i])
            cand = _decode_kronecker(g, prim.table, used, radices)
            if cand is None:
                continue
            q = laurent_exact_div(prim, cand)
            if q is not None and not q.is_monomial:
                return [cand, primitive_form(q)[2]]
    return None


def _decode_kronecker(g: IntPoly, table: VarTable, used: Sequence[int], radices: Sequence[int]) -> Optional[LaurentPoly]:
    terms: dict = {}
    for z, c in enumerate(g):
        if not c:
            continue
        e = [0] * table.arity
        rest = z
        for i, r in zip(used[:-1], radices[:-1]):
            e[i] = rest % r
            rest //= r
        if rest >= radices[-1]:
            return None
        e[used[-1]] = rest
        terms[tuple(e)] = c
    cand = LaurentPoly(table, terms)
    if cand.is_constant or cand.is_monomial:
        return None
    return primitive_form(cand)[2]
