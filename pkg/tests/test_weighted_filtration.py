import itertools
import math
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qres.errors import DimensionError, GluePreconditionError
from qres.quotient_classifier import CyclicQuotientType, quotient_to_cone
from qres.weighted_filtration import (
    Monomial,
    TruncatedAutomorphism,
    WeightedFiltration,
    _cartify_raw,
    cartify,
    dual_cone_points,
    glue_check,
    ideal_generators,
    invariant_generators,
    minimalize,
    sample_divisor_fixing_automorphism,
    smallest_prime_with_roots,
    substitute,
)


def M(*exps):
    return Monomial(exps)


def mono_set(*tuples):
    return frozenset(Monomial(t) for t in tuples)


class TestIdealGenerators:
    def test_power_of_maximal_ideal(self):
        w = WeightedFiltration(2, (1, 1))
        assert ideal_generators(w, 2) == mono_set((2, 0), (1, 1), (0, 2))

    def test_weighted(self):
        w = WeightedFiltration(5, (2, 1))
        assert ideal_generators(w, 2) == mono_set((1, 0), (0, 2))

    def test_degree_zero(self):
        w = WeightedFiltration(5, (2, 1))
        assert ideal_generators(w, 0) == mono_set((0, 0))

    def test_zero_weight_coordinate_excluded(self):
        w = WeightedFiltration(2, (0, 1))
        assert ideal_generators(w, 2) == mono_set((0, 2))

    @pytest.mark.parametrize("weights,order", [((2, 1), 5), ((1, 2), 3), ((3, 2, 1), 7)])
    def test_multiplicative(self, weights, order):
        w = WeightedFiltration(order, weights)
        for j, k in itertools.combinations_with_replacement(range(1, 8), 2):
            if j + k > 10:
                continue
            target = ideal_generators(w, j + k)
            for a in ideal_generators(w, j):
                for b in ideal_generators(w, k):
                    prod = a * b
                    assert any(g.divides(prod) for g in target)


class TestInvariantGenerators:
    def test_half(self):
        q = CyclicQuotientType(2, (1, 1))
        assert invariant_generators(q, 2) == mono_set((2, 0), (1, 1), (0, 2))

    def test_third(self):
        q = CyclicQuotientType(3, (1, 1))
        assert invariant_generators(q, 3) == mono_set((3, 0), (2, 1), (1, 2), (0, 3))

    def test_trivial(self):
        q = CyclicQuotientType(1, (0, 0))
        assert invariant_generators(q, 1) == mono_set((1, 0), (0, 1))

    def test_opposite_characters_give_three_generators(self):
        # invariants of (t x, t^{-1} y) are generated by x^l, y^l and x*y
        for l in (3, 5, 7):
            q = CyclicQuotientType(l, (1, l - 1))
            assert invariant_generators(q, l) == mono_set((l, 0), (0, l), (1, 1))


class TestDualConePoints:
    def test_smooth_chart(self):
        out = dual_cone_points(quotient_to_cone(CyclicQuotientType(1, (0, 0))), 1)
        assert out.minimal == mono_set((1, 0), (0, 1))

    def test_half_matches_invariants(self):
        q = CyclicQuotientType(2, (1, 1))
        out = dual_cone_points(quotient_to_cone(q), 2)
        assert out.minimal == invariant_generators(q, 2)

    def test_requires_full_dimension(self):
        from qres.cones_fans import Cone

        with pytest.raises(DimensionError):
            dual_cone_points(Cone(3, [(1, 0, 0), (0, 1, 0)]), 2)

    def test_oracle_equality_sweep(self):
        # all small cyclic types with a unit character, order <= 6, rank <= 3;
        # the comparison tuple is the one aligned with the cone generators,
        # because chart exponents are dual to those generators
        from qres.quotient_classifier import cone_characters, pseudoreflections
        from qres.weighted_filtration import invariant_generators_raw

        seen = set()
        for l in range(1, 7):
            for rank in (1, 2, 3):
                for chars in itertools.product(range(l), repeat=rank):
                    if math.gcd(l, *chars) != 1:
                        continue
                    if all(math.gcd(c, l) != 1 for c in chars):
                        continue
                    q = CyclicQuotientType(l, chars)
                    if q in seen:
                        continue
                    seen.add(q)
                    if pseudoreflections(q):
                        continue
                    cone = quotient_to_cone(q)
                    order, aligned = cone_characters(cone)
                    assert order == q.order
                    got = dual_cone_points(cone, 12).minimal
                    assert got == invariant_generators_raw(order, aligned, 12), q


class TestGlueCheck:
    def setup_method(self):
        self.w = WeightedFiltration(5, (2, 1))
        self.prime = smallest_prime_with_roots(5)

    def test_identity(self):
        phi = TruncatedAutomorphism.identity(2, self.prime, 12)
        assert glue_check(self.w, phi, 12)

    def test_dominating_correction_term(self):
        # x -> x + x*y^5 has an action-compatible correction of higher weight
        phi = TruncatedAutomorphism(
            [{(1, 0): 1, (1, 5): 1}, {(0, 1): 1}], self.prime, 12
        )
        assert glue_check(self.w, phi, 12)

    def test_swap_is_rejected(self):
        # coordinate swap does not fix the divisor ideal
        w = WeightedFiltration(3, (1, 2))
        phi = TruncatedAutomorphism([{(0, 1): 1}, {(1, 0): 1}], 7, 12)
        with pytest.raises(GluePreconditionError):
            glue_check(w, phi, 12)

    def test_divisor_weight_must_be_one(self):
        w = WeightedFiltration(3, (1, 2))
        phi = TruncatedAutomorphism.identity(2, 7, 12)
        with pytest.raises(GluePreconditionError):
            glue_check(w, phi, 12)

    def test_incompatible_substitution_moves_the_filtration(self):
        # x -> x + y is divisor-fixing but not action-compatible; I_2 leaks
        phi = TruncatedAutomorphism(
            [{(1, 0): 1, (0, 1): 1}, {(0, 1): 1}], self.prime, 12
        )
        assert glue_check(self.w, phi, 12) is False

    def test_sampled_substitutions_preserve_filtration(self):
        rng = Random(7)
        for a in (1, 2, 3, 4):
            w = WeightedFiltration(5, (a, 1))
            for _ in range(25):
                phi = sample_divisor_fixing_automorphism(w, rng)
                assert glue_check(w, phi, 12)

    def test_substitute_truncates(self):
        phi = TruncatedAutomorphism(
            [{(1, 0): 1, (2, 3): 1}, {(0, 1): 1}], self.prime, 4
        )
        image = dict(substitute(phi, (2, 0)))
        assert all(sum(e) <= 4 for e in image)


class TestCartify:
    def test_unit_character_gives_trivial_cover(self):
        assert cartify(CyclicQuotientType(2, (1, 1)), 0).is_trivial()

    def test_sixth_across_character_two(self):
        q = CyclicQuotientType(6, (2, 3, 1))  # canonical (1,2,3)
        assert cartify(q, 1) == CyclicQuotientType(2, (0, 1, 1))

    def test_character_zero_unchanged(self):
        q = CyclicQuotientType(2, (0, 1, 1))
        assert cartify(q, 0) == q

    def test_divisor_character_vanishes(self):
        for l, chars in [(6, (2, 3, 1)), (12, (4, 3, 1)), (8, (2, 4, 1))]:
            if math.gcd(l, *chars) != 1:
                continue
            for i in range(len(chars)):
                new_order, new_chars = _cartify_raw(l, chars, i)
                assert new_order == math.gcd(l, chars[i])
                assert new_chars[i] == 0 or new_order == l

    def test_idempotent_on_its_ray(self):
        l, chars = 12, (4, 3, 1)
        o1, c1 = _cartify_raw(l, chars, 0)
        o2, c2 = _cartify_raw(o1, c1, 0)
        assert (o1, c1) == (o2, c2)

    @given(
        st.integers(2, 20),
        st.lists(st.integers(0, 19), min_size=2, max_size=4),
        st.integers(1, 19),
        st.randoms(),
    )
    @settings(max_examples=150)
    def test_commutes_with_units_and_permutations(self, l, chars, u, rnd):
        chars = [c % l for c in chars]
        if math.gcd(l, *chars) != 1 or math.gcd(u, l) != 1:
            return
        idx = rnd.randrange(len(chars))
        perm = list(range(len(chars)))
        rnd.shuffle(perm)
        scaled = [(u * chars[p]) % l for p in perm]
        o1, c1 = _cartify_raw(l, tuple(chars), idx)
        o2, c2 = _cartify_raw(l, tuple(scaled), perm.index(idx))
        assert o1 == o2
        if o1 == 1:
            return
        assert CyclicQuotientType(o1, c1) == CyclicQuotientType(o2, c2)


class TestMinimalize:
    def test_keeps_incomparable(self):
        assert minimalize([M(2, 0), M(0, 2), M(1, 1)]) == mono_set((2, 0), (0, 2), (1, 1))

    def test_drops_multiples(self):
        assert minimalize([M(1, 0), M(2, 0), M(1, 1)]) == mono_set((1, 0))
