"""Exact integer arithmetic and integer linear algebra.

Big integers and rationals are the standard library's ``int`` and
``fractions.Fraction``; this module adds the exact matrix algorithms the
rest of the package rests on: integer factorization, Hermite and Smith
normal forms with unimodular transforms, bounded nonnegative Diophantine
enumeration, and row-lattice membership with a canonical preimage.

Matrices are immutable tuples of tuples of int.  No operation mutates its
input; everything here is pure and deterministic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

IntMatrix = tuple  # tuple of tuples of int, rows x cols

_TRIAL_LIMIT = 10**6


def intmatrix(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Freeze a row-major grid of ints, checking consistent dimensions."""
    frozen = tuple(tuple(int(e) for e in row) for row in rows)
    if frozen and any(len(row) != len(frozen[0]) for row in frozen):
        raise ValueError("ragged matrix")
    return frozen


def identity_matrix(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError("dimension mismatch")
    cols = len(b[0]) if b else 0
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(cols))
        for i in range(len(a))
    )


def mat_det(a: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("determinant of non-square matrix")
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# integer factorization


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    # deterministic for n < 3.3 * 10^24 with these witnesses
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    """A nontrivial factor of composite odd n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factor_integer(n: int) -> list[tuple[int, int]]:
    """Factor a nonzero integer, returning sorted (prime, exponent) pairs.

    The sign is not represented; the product of the prime powers is |n|.
    Inputs here are polynomial contents, so trial division does almost all
    of the work; Brent rho handles stray large cofactors.
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    powers: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            powers[p] = powers.get(p, 0) + 1
            n //= p
    d = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    w = 0
    while d * d <= n and d < _TRIAL_LIMIT:
        while n % d == 0:
            powers[d] = powers.get(d, 0) + 1
            n //= d
        d += wheel[w]
        w = (w + 1) % 8
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_probable_prime(m):
            powers[m] = powers.get(m, 0) + 1
            continue
        g = _brent_rho(m)
        stack.append(g)
        stack.append(m // g)
    return sorted(powers.items())


# ---------------------------------------------------------------------------
# Hermite and Smith normal forms


def hermite_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns (H, U) with U unimodular, U*M = H, pivots positive and strictly
    to the right as rows descend, entries above each pivot reduced into
    [0, pivot).  Zero rows sink to the bottom.
    """
    a = [list(row) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = [list(row) for row in identity_matrix(rows)]
    pivot_row = 0
    for col in range(cols):
        # gcd out the column below pivot_row
        row = None
        for i in range(pivot_row, rows):
            if a[i][col] != 0:
                row = i
                break
        if row is None:
            continue
        a[pivot_row], a[row] = a[row], a[pivot_row]
        u[pivot_row], u[row] = u[row], u[pivot_row]
        for i in range(pivot_row + 1, rows):
            while a[i][col] != 0:
                q = a[pivot_row][col] // a[i][col]
                for j in range(cols):
                    a[pivot_row][j] -= q * a[i][j]
                for j in range(rows):
                    u[pivot_row][j] -= q * u[i][j]
                a[pivot_row], a[i] = a[i], a[pivot_row]
                u[pivot_row], u[i] = u[i], u[pivot_row]
        if a[pivot_row][col] < 0:
            a[pivot_row] = [-e for e in a[pivot_row]]
            u[pivot_row] = [-e for e in u[pivot_row]]
        piv = a[pivot_row][col]
        for i in range(pivot_row):
            q = a[i][col] // piv
            if q:
                for j in range(cols):
                    a[i][j] -= q * a[pivot_row][j]
                for j in range(rows):
                    u[i][j] -= q * u[pivot_row][j]
        pivot_row += 1
        if pivot_row == rows:
            break
    return intmatrix(a), intmatrix(u)


@dataclass(frozen=True)
class SNFData:
    """Smith normal form: U*M*V = diag(diagonal), U and V unimodular."""

    diagonal: tuple[int, ...]
    left: IntMatrix
    right: IntMatrix


def smith_normal_form(m: IntMatrix) -> SNFData:
    """Smith normal form by integer-preserving elementary operations.

    The diagonal is nonnegative with each entry dividing the next;
    off-diagonal entries are reduced modulo the pivot every sweep, which
    keeps intermediate entries small at the scales this package meets.
    """
    a = [list(row) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = [list(row) for row in identity_matrix(rows)]
    v = [list(row) for row in identity_matrix(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        for j in range(cols):
            a[dst][j] += q * a[src][j]
        for j in range(rows):
            u[dst][j] += q * u[src][j]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    t = 0
    while t < min(rows, cols):
        # locate a smallest-magnitude nonzero entry in the trailing block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        if a[t][t] < 0:
            a[t] = [-e for e in a[t]]
            u[t] = [-e for e in u[t]]
        clean = True
        for i in range(t + 1, rows):
            if a[i][t] != 0:
                add_row(i, t, -(a[i][t] // a[t][t]))
                if a[i][t] != 0:
                    clean = False
        for j in range(t + 1, cols):
            if a[t][j] != 0:
                add_col(j, t, -(a[t][j] // a[t][t]))
                if a[t][j] != 0:
                    clean = False
        if not clean:
            continue
        # pivot must divide the whole trailing block
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % a[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        t += 1

    diag = []
    for i in range(min(rows, cols)):
        if a[i][i] == 0:
            break
        diag.append(a[i][i])
    return SNFData(tuple(diag), intmatrix(u), intmatrix(v))


def snf_diagonal_full(snf: SNFData, m: IntMatrix) -> tuple[int, ...]:
    """Diagonal padded with zeros to length min(rows, cols) of m."""
    k = min(len(m), len(m[0]) if m else 0)
    return snf.diagonal + (0,) * (k - len(snf.diagonal))


# ---------------------------------------------------------------------------
# Diophantine solving


def solve_bounded_nonneg(
    a: IntMatrix, b: Sequence[int], bounds: Sequence[int]
) -> list[tuple[int, ...]]:
    """All t with a*t = b, 0 <= t <= bounds, in lexicographic order.

    Depth-first enumeration with residual feasibility cuts; exact, and
    intended for the small boxes produced by divisor supports.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if len(bounds) != cols or len(b) != rows:
        raise ValueError("dimension mismatch")
    if cols == 0:
        return [()] if all(e == 0 for e in b) else []
    # per-row, per-suffix extremes of what the remaining unknowns can add
    max_add = [[0] * (cols + 1) for _ in range(rows)]
    min_add = [[0] * (cols + 1) for _ in range(rows)]
    for i in range(rows):
        for j in range(cols - 1, -1, -1):
            contrib = a[i][j] * bounds[j]
            max_add[i][j] = max_add[i][j + 1] + max(contrib, 0)
            min_add[i][j] = min_add[i][j + 1] + min(contrib, 0)

    out: list[tuple[int, ...]] = []
    t = [0] * cols
    residual = list(b)

    def walk(j: int) -> None:
        if j == cols:
            if all(r == 0 for r in residual):
                out.append(tuple(t))
            return
        for i in range(rows):
            if not (min_add[i][j] <= residual[i] <= max_add[i][j]):
                return
        for val in range(bounds[j] + 1):
            t[j] = val
            walk(j + 1)
            for i in range(rows):
                residual[i] -= a[i][j]
        for i in range(rows):
            residual[i] += a[i][j] * (bounds[j] + 1)
        t[j] = 0

    walk(0)
    return out


def lattice_membership(m: IntMatrix, v: Sequence[int]) -> Optional[tuple[int, ...]]:
    """A canonical u with u*M = v if v lies in the row lattice of M.

    The coefficient vector over the Hermite basis is unique; composing it
    with the Hermite transform gives a deterministic preimage, which is
    what makes downstream generator choices canonical.
    """
    rows = len(m)
    if rows == 0:
        return () if all(e == 0 for e in v) else None
    cols = len(m[0])
    if len(v) != cols:
        raise ValueError("dimension mismatch")
    h, u = hermite_normal_form(m)
    residual = list(v)
    coeffs = [0] * rows
    for i in range(rows):
        pivot_col = next((j for j in range(cols) if h[i][j] != 0), None)
        if pivot_col is None:
            break
        piv = h[i][pivot_col]
        if residual[pivot_col] % piv != 0:
            return None
        c = residual[pivot_col] // piv
        coeffs[i] = c
        if c:
            for j in range(cols):
                residual[j] -= c * h[i][j]
    if any(residual):
        return None
    return tuple(
        sum(coeffs[i] * u[i][j] for i in range(rows)) for j in range(rows)
    )
