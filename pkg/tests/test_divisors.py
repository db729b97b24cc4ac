"""Divisors, special primes, class groups, and principal generators."""

import pytest
from fractions import Fraction
from hypothesis import given, settings, strategies as st

from flir.cluster import banff_charts, initial_seed, one_var_flir
from flir.divisors import (
    BasePrime,
    Divisor,
    NotPrincipal,
    SpecialPrime,
    TorusPrime,
    class_group,
    class_of_divisor,
    divisor_class_preimage,
    divisor_from_json,
    divisor_to_json,
    flir_divisor,
    is_factorial,
    is_member,
    lp_divisor,
    principal_generator,
    special_primes,
)
from flir.laurent import LaurentPoly, RatFunc, parse_element, var_table


def atlas_of(a):
    return one_var_flir(a, "Z")


def a3_atlas():
    return banff_charts(initial_seed([[0, 1, 0], [-1, 0, 1], [0, -1, 0]]))


def el(atlas, text):
    return parse_element(text, atlas.table)


ATLAS6 = atlas_of(6)
A3 = a3_atlas()


class TestLpDivisor:
    def test_constant_over_x(self):
        f = el(ATLAS6, "6/x1")
        d = lp_divisor(f, ATLAS6.charts[1], "Z")
        assert d.entries == ((BasePrime(2), 1), (BasePrime(3), 1))

    def test_monomial_is_unit(self):
        f = el(ATLAS6, "x1")
        assert lp_divisor(f, ATLAS6.charts[0], "Z").is_zero

    def test_square_multiplicity(self):
        f = el(A3, "(1 + x2)^2/x1")
        d = lp_divisor(f, A3.charts[0], "Q")
        p = el(A3, "1 + x2").as_laurent()
        assert d.entries == ((TorusPrime(p), 2),)

    def test_ground_q_ignores_content(self):
        f = el(ATLAS6, "6/x1")
        assert lp_divisor(f, ATLAS6.charts[0], "Q").is_zero

    def test_rational_content(self):
        t = var_table(1)
        f = RatFunc.const(t, Fraction(3, 2)) * RatFunc.from_laurent(LaurentPoly.variable(t, 0))
        d = lp_divisor(f, ATLAS6.charts[0], "Z")
        assert d.coeff(BasePrime(3)) == 1
        assert d.coeff(BasePrime(2)) == -1

    def test_zero_rejected(self):
        zero = RatFunc.const(var_table(1), 0)
        with pytest.raises(ValueError):
            lp_divisor(zero, ATLAS6.charts[0], "Z")

    def test_denominator_counts_negatively(self):
        f = el(A3, "x1/(1 + x2)")
        d = lp_divisor(f, A3.charts[0], "Q")
        p = el(A3, "1 + x2").as_laurent()
        assert d.entries == ((TorusPrime(p), -1),)


class TestSpecialPrimes:
    def test_z_x_6_over_x(self):
        assert special_primes(ATLAS6) == (
            SpecialPrime(1, p=2),
            SpecialPrime(1, p=3),
        )

    def test_z_x_2_over_x(self):
        assert special_primes(atlas_of(2)) == (SpecialPrime(1, p=2),)

    def test_pure_laurent_ring(self):
        assert special_primes(atlas_of(1)) == ()
        assert special_primes(one_var_flir(7, "Q")) == ()

    def test_a3(self):
        one_x2 = el(A3, "1 + x2").as_laurent()
        x1_x3 = el(A3, "x1 + x3").as_laurent()
        assert special_primes(A3) == (
            SpecialPrime(1, poly=one_x2),
            SpecialPrime(2, poly=x1_x3),
            SpecialPrime(3, poly=one_x2),
            SpecialPrime(4, poly=one_x2),
        )


class TestFlirDivisor:
    def test_dv_six(self):
        d = flir_divisor(ATLAS6, el(ATLAS6, "6"))
        assert d.entries == (
            (BasePrime(2), 1),
            (BasePrime(3), 1),
            (SpecialPrime(1, p=2), 1),
            (SpecialPrime(1, p=3), 1),
        )

    def test_dv_x(self):
        d = flir_divisor(ATLAS6, el(ATLAS6, "x1"))
        assert d.entries == (
            (SpecialPrime(1, p=2), 1),
            (SpecialPrime(1, p=3), 1),
        )

    def test_units_have_empty_divisor(self):
        assert flir_divisor(ATLAS6, el(ATLAS6, "-1")).is_zero
        q_atlas = one_var_flir(7, "Q")
        assert flir_divisor(q_atlas, el(q_atlas, "7/3")).is_zero

    def test_six_equals_two_three_equals_x_six_over_x(self):
        # 6 = 2*3 = x*(6/x): both factorizations give the same divisor
        dv = lambda s: flir_divisor(ATLAS6, el(ATLAS6, s))
        assert dv("2") + dv("3") == dv("6")
        assert dv("x1") + dv("6/x1") == dv("6")

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            flir_divisor(ATLAS6, RatFunc.const(ATLAS6.table, 0))

    @settings(max_examples=40, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_additivity(self, rng):
        pool = ["2", "3", "x1", "6/x1", "1 + x1", "3 - x1^2"]
        pick = lambda: el(ATLAS6, rng.choice(pool))
        f, g = pick(), pick()
        dv = lambda h: flir_divisor(ATLAS6, h)
        assert dv(f * g) == dv(f) + dv(g)
        assert dv(f.inverse()) == -dv(f)

    @settings(max_examples=25, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_additivity_a3(self, rng):
        pool = ["x1", "x2", "(1 + x2)/x1", "(x1 + x3)/x2", "1 + x2"]
        f = el(A3, rng.choice(pool))
        g = el(A3, rng.choice(pool))
        assert flir_divisor(A3, f * g) == flir_divisor(A3, f) + flir_divisor(A3, g)


class TestClassGroup:
    def test_z_x_6_over_x(self):
        pres = class_group(ATLAS6)
        assert pres.C == ((1, 1),)
        assert pres.free_rank == 1
        assert pres.torsion == ()

    def test_z_x_12_over_x(self):
        pres = class_group(atlas_of(12))
        assert pres.C == ((2, 1),)
        assert (pres.free_rank, pres.torsion) == (1, ())

    def test_z_x_4_over_x(self):
        pres = class_group(atlas_of(4))
        assert pres.C == ((2,),)
        assert (pres.free_rank, pres.torsion) == (0, (2,))

    def test_z_x_30_over_x(self):
        pres = class_group(atlas_of(30))
        assert (pres.free_rank, pres.torsion) == (2, ())

    def test_z_x_72_over_x(self):
        pres = class_group(atlas_of(72))
        assert pres.C == ((3, 2),)
        assert (pres.free_rank, pres.torsion) == (1, ())

    def test_a3(self):
        pres = class_group(A3)
        assert pres.C == ((0, 0, 1, 1), (0, 1, 0, 0), (1, 0, 0, 1))
        assert (pres.free_rank, pres.torsion) == (1, ())

    def test_single_chart_trivial(self):
        pres = class_group(one_var_flir(7, "Q"))
        assert pres.special == ()
        assert pres.is_trivial

    def test_frozen_rows_vanish(self):
        seed = initial_seed([[0, 1], [-1, 0]], frozen_rows=[[1, 0], [0, 1]])
        atlas = banff_charts(seed)
        pres = class_group(atlas)
        for row in pres.C[2:]:
            assert all(v == 0 for v in row)


class TestFactorial:
    def test_examples(self):
        assert is_factorial(atlas_of(2))
        assert not is_factorial(ATLAS6)
        assert is_factorial(one_var_flir(7, "Q"))
        assert not is_factorial(A3)


class TestClassOfDivisor:
    def test_special_prime_is_unit_vector(self):
        pres = class_group(ATLAS6)
        s1, s2 = pres.special
        assert class_of_divisor(ATLAS6, pres, Divisor.make({s1: 1})) == (1, 0)
        assert class_of_divisor(ATLAS6, pres, Divisor.make({s2: 3})) == (0, 3)

    def test_base_prime_two(self):
        pres = class_group(ATLAS6)
        vec = class_of_divisor(ATLAS6, pres, Divisor.make({BasePrime(2): 1}))
        assert vec == (-1, 0)

    def test_dv_x_is_principal(self):
        pres = class_group(ATLAS6)
        E = flir_divisor(ATLAS6, el(ATLAS6, "x1"))
        vec = class_of_divisor(ATLAS6, pres, E)
        assert vec == (1, 1)
        assert divisor_class_preimage(pres, vec) is not None

    def test_principal_divisors_have_trivial_class(self):
        pres = class_group(ATLAS6)
        for text in ("6", "x1", "6/x1", "2", "3 + x1", "12/x1^2"):
            E = flir_divisor(ATLAS6, el(ATLAS6, text))
            vec = class_of_divisor(ATLAS6, pres, E)
            assert divisor_class_preimage(pres, vec) is not None

    def test_nonprincipal_detected(self):
        pres = class_group(ATLAS6)
        vec = class_of_divisor(ATLAS6, pres, Divisor.make({pres.special[0]: 1}))
        assert divisor_class_preimage(pres, vec) is None

    def test_foreign_prime_rejected(self):
        pres = class_group(ATLAS6)
        stranger = SpecialPrime(1, p=5)
        with pytest.raises(ValueError):
            class_of_divisor(ATLAS6, pres, Divisor.make({stranger: 1}))


class TestPrincipalGenerator:
    def test_dv_six_round_trip(self):
        pres = class_group(ATLAS6)
        E = flir_divisor(ATLAS6, el(ATLAS6, "6"))
        g = principal_generator(ATLAS6, pres, E)
        assert g == el(ATLAS6, "6")

    def test_special_sum_gives_x(self):
        pres = class_group(ATLAS6)
        s1, s2 = pres.special
        g = principal_generator(ATLAS6, pres, Divisor.make({s1: 1, s2: 1}))
        assert g == el(ATLAS6, "x1")

    def test_zero_divisor_gives_unit(self):
        pres = class_group(ATLAS6)
        assert principal_generator(ATLAS6, pres, Divisor.zero()) == el(ATLAS6, "1")

    def test_not_principal(self):
        pres = class_group(ATLAS6)
        with pytest.raises(NotPrincipal):
            principal_generator(ATLAS6, pres, Divisor.make({pres.special[0]: 1}))

    @settings(max_examples=30, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_round_trip_random_members(self, rng):
        pres = class_group(ATLAS6)
        pool = ["2", "3", "x1", "6/x1", "1 + x1", "x1^2 + 3"]
        f = el(ATLAS6, rng.choice(pool)) * el(ATLAS6, rng.choice(pool))
        E = flir_divisor(ATLAS6, f)
        g = principal_generator(ATLAS6, pres, E)
        assert flir_divisor(ATLAS6, g) == E

    def test_a3_round_trip(self):
        pres = class_group(A3)
        f = el(A3, "(1 + x2)/x1") * el(A3, "x1 + x3")
        E = flir_divisor(A3, f, pres.special)
        g = principal_generator(A3, pres, E)
        assert flir_divisor(A3, g, pres.special) == E


class TestMembership:
    def test_spec_examples(self):
        assert is_member(A3, el(A3, "x1"))
        assert not is_member(ATLAS6, el(ATLAS6, "1/x1"))
        assert is_member(ATLAS6, el(ATLAS6, "6/x1"))

    def test_integrality_matters_over_z(self):
        # 2/x is Laurent in both charts but has content 1/3 in the far chart
        assert not is_member(ATLAS6, el(ATLAS6, "2/x1"))
        assert not is_member(ATLAS6, el(ATLAS6, "x1/2"))

    def test_zero_is_member(self):
        assert is_member(ATLAS6, RatFunc.const(ATLAS6.table, 0))

    def test_cluster_variables_are_members(self):
        for text in ("x1", "x2", "x3", "(1 + x2)/x1", "(x1 + x3)/x2", "(1 + x2)/x3"):
            assert is_member(A3, el(A3, text))
        assert not is_member(A3, el(A3, "1/x1"))
        assert not is_member(A3, el(A3, "(1 + x3)/x2"))

    @settings(max_examples=40, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_member_iff_effective_divisor(self, rng):
        pool = ["2", "3", "x1", "6/x1", "1 + x1", "1/x1", "1/2", "x1/3"]
        f = el(ATLAS6, rng.choice(pool))
        for _ in range(rng.randint(0, 2)):
            f = f * el(ATLAS6, rng.choice(pool))
        assert is_member(ATLAS6, f) == flir_divisor(ATLAS6, f).is_effective

    @settings(max_examples=25, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_member_iff_effective_divisor_q(self, rng):
        pool = ["x1", "x2", "(1 + x2)/x1", "1/x1", "x1 + x3", "1/(1 + x2)"]
        f = el(A3, rng.choice(pool))
        for _ in range(rng.randint(0, 2)):
            f = f * el(A3, rng.choice(pool))
        assert is_member(A3, f) == flir_divisor(A3, f).is_effective


class TestSerialization:
    def test_round_trip_base_and_special(self):
        E = flir_divisor(ATLAS6, el(ATLAS6, "6"))
        data = divisor_to_json(E)
        assert data == [
            {"kind": "base", "p": 2, "coeff": 1},
            {"kind": "base", "p": 3, "coeff": 1},
            {"kind": "special", "chart": 1, "p": 2, "coeff": 1},
            {"kind": "special", "chart": 1, "p": 3, "coeff": 1},
        ]
        assert divisor_from_json(data, ATLAS6) == E

    def test_round_trip_torus(self):
        E = flir_divisor(A3, el(A3, "(1 + x2)^2/x1"))
        assert divisor_from_json(divisor_to_json(E), A3) == E

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            divisor_from_json([{"kind": "mystery", "coeff": 1}], ATLAS6)
        with pytest.raises(ValueError):
            divisor_from_json([{"kind": "torus", "poly": "x1", "coeff": 1}], A3)
        with pytest.raises(ValueError):
            divisor_from_json(
                [{"kind": "special", "chart": 99, "p": 2, "coeff": 1}], ATLAS6
            )
        with pytest.raises(ValueError):
            divisor_from_json([{"kind": "special", "chart": 1, "p": 5, "coeff": 1}], ATLAS6)

    def test_torus_poly_canonicalized(self):
        # non-canonical text still resolves to the canonical stored prime
        E = divisor_from_json([{"kind": "torus", "poly": "2 + 2*x2", "coeff": 1}], A3)
        p = el(A3, "1 + x2").as_laurent()
        assert E.entries == ((TorusPrime(p), 1),)


def random_acyclic_seed(rng, max_rank=3):
    n = rng.randint(2, max_rank)
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = rng.randint(0, 2)
            rows[i][j] = v
            rows[j][i] = -v
    if all(v == 0 for row in rows for v in row):
        rows[0][1] = 1
        rows[1][0] = -1
    return initial_seed(rows)


class TestAcyclicCrossChecks:
    @settings(max_examples=12, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_partner_counts_match_class_matrix(self, rng):
        from flir.cluster import acyclic_partner_primes

        seed = random_acyclic_seed(rng)
        atlas = banff_charts(seed)
        pres = class_group(atlas)
        for i in range(seed.rank):
            visible = sum(1 for v in pres.C[i] if v > 0)
            assert visible == len(acyclic_partner_primes(seed, i))

    @settings(max_examples=12, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_class_matrix_matches_partner_construction(self, rng):
        # direct construction: column per (P, T), entry mult_P(f_i) if i in T
        from flir.cluster import acyclic_partner_primes, exchange_polynomial
        from flir.factorpoly import factor_laurent

        seed = random_acyclic_seed(rng)
        atlas = banff_charts(seed)
        pres = class_group(atlas)
        mult = [
            dict(factor_laurent(exchange_polynomial(seed, i)).factors)
            for i in range(seed.rank)
        ]
        direct = set()
        for i in range(seed.rank):
            for q, t in acyclic_partner_primes(seed, i):
                col = tuple(mult[j].get(q, 0) if j in t else 0 for j in range(seed.rank))
                direct.add((q, frozenset(t), col))
        direct_cols = sorted(col for _q, _t, col in direct)
        atlas_cols = sorted(
            tuple(pres.C[i][j] for i in range(seed.rank))
            for j in range(len(pres.special))
        )
        assert atlas_cols == direct_cols
        assert pres.torsion == ()

    def test_ckq_kronecker_cubed(self):
        # 1 + t^3 splits, so the rank-2 seed with a triple arrow is not factorial
        seed = initial_seed([[0, 3], [-3, 0]])
        assert not is_factorial(banff_charts(seed))

    def test_ckq_kronecker_squared(self):
        # 1 + t^2 is irreducible over Q: factorial
        seed = initial_seed([[0, 2], [-2, 0]])
        assert is_factorial(banff_charts(seed))

    @settings(max_examples=10, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_ckq_full_rank_random(self, rng):
        from flir.cluster import exchange_polynomial
        from flir.factorpoly import factor_laurent

        n = 2
        v = rng.choice([1, 2, 3, 4])
        seed = initial_seed([[0, v], [-v, 0]])
        atlas = banff_charts(seed)
        irreducible = all(
            len(factor_laurent(exchange_polynomial(seed, i)).factors) == 1
            and factor_laurent(exchange_polynomial(seed, i)).factors[0][1] == 1
            for i in range(n)
        )
        assert is_factorial(atlas) == irreducible
