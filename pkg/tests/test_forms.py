"""Exact symbolic expansions, moment oracles, and cumulant routes."""
from __future__ import annotations

import random
from fractions import Fraction

import pytest

from mideriv.closedform import random_rational_joint, random_rational_moments
from mideriv.errors import DomainError, SizeLimitError, ValidationError
from mideriv.forms import (
    SlotBinding,
    SymbolicExpansion,
    atoms_moment_oracle,
    gaussian_moment_oracle,
    kappa_eval,
    kappa_recursion_oracle,
    kappa_symbolic,
    tau_eval,
    tau_symbolic,
    univariate_moment_oracle,
)

HALF = Fraction(1, 2)


def test_single_slot_value_is_minus_half_square():
    # one slot, E[X] = 2: the only partition is the singleton pair block
    oracle = univariate_moment_oracle([Fraction(2), Fraction(5)])
    assert tau_eval(SlotBinding((1,)), oracle, 1) == Fraction(-2)
    # the restricted form has no admissible partition for one slot... the
    # doubled multiset {1,1} has the single block {1,1}? no: diverse
    # partitions need distinct entries per block, so {1},{1} is the only
    # one and dies under min_block_size=2.
    assert tau_eval(SlotBinding((1,)), oracle, 2) == 0


def test_single_slot_matches_minus_half_mean_squared():
    rng = random.Random(5)
    for _ in range(25):
        m1 = Fraction(rng.randint(-9, 9), rng.randint(1, 7))
        oracle = univariate_moment_oracle([m1, m1 * m1 + 1])
        assert tau_eval(SlotBinding((1,)), oracle, 1) == -HALF * m1 * m1


def test_centered_pair_collapse():
    ex = tau_symbolic(SlotBinding((1, 1)), min_block_size=2)
    assert ex.pretty() == "-1/2*M2^2"
    # M2 = 0.5 gives -1/8
    oracle = univariate_moment_oracle([Fraction(0), HALF])
    assert tau_eval(SlotBinding((1, 1)), oracle, 2) == Fraction(-1, 8)


def test_constant_variable_kills_every_term():
    oracle = univariate_moment_oracle([Fraction(0), Fraction(0), Fraction(0), Fraction(0)])
    for slots in ((1, 1), (1, 1, 1), (1, 1, 1, 1)):
        assert tau_eval(SlotBinding(slots), oracle, 2) == 0


def test_identical_argument_collapses_match_known_forms():
    for n, expected in [
        (2, "-1/2*M2^2"),
        (3, "M2^3 - 1/2*M3^2"),
        (4, "-15/2*M2^4 + 6*M3^2*M2 + 3*M4*M2^2 - 1/2*M4^2"),
    ]:
        ex = tau_symbolic(SlotBinding((1,) * n), min_block_size=2)
        assert ex.pretty() == expected


def test_restricted_term_counts():
    assert len(tau_symbolic(SlotBinding((1, 1, 1)), min_block_size=2).terms) == 2
    assert len(tau_symbolic(SlotBinding((1, 1, 1, 1)), min_block_size=2).terms) == 4
    assert len(tau_symbolic(SlotBinding((1,)), min_block_size=2).terms) == 0


def test_gaussian_fourth_order_value():
    # plug standard-Gaussian moments into the restricted 4-slot form:
    # -15/2 + 6*9 + 3*3 - 1/2*9 with M2=1, M3=0, M4=3 -> -15/2+9-9/2 = -3
    value = tau_eval(SlotBinding((1, 1, 1, 1)), gaussian_moment_oracle(), 2)
    assert value == Fraction(-3)


def test_distinct_slot_expansion_uses_expectation_blocks():
    ex = tau_symbolic(SlotBinding((1, 2, 3)), min_block_size=2)
    assert ex.pretty() == "E[x1*x2]*E[x1*x3]*E[x2*x3] - 1/2*E[x1*x2*x3]^2"


def test_slot_binding_from_multiplicities():
    binding = SlotBinding.from_multiplicities((2, 0, 1))
    assert binding.variables == (1, 1, 3)
    with pytest.raises(ValidationError):
        SlotBinding.from_multiplicities((0, 0))
    with pytest.raises(SizeLimitError):
        tau_symbolic(SlotBinding.from_multiplicities((5, 4)))


def test_tau_eval_matches_symbolic_evaluate_on_random_oracles():
    rng = random.Random(17)
    for _ in range(10):
        slots = tuple(rng.choice((1, 1, 2)) for _ in range(rng.randint(2, 4)))
        binding = SlotBinding(slots)
        oracle = random_rational_moments(rng)
        for mbs in (1, 2):
            direct = tau_eval(binding, oracle, mbs)
            via_symbolic = tau_symbolic(binding, mbs).evaluate(oracle)
            assert direct == via_symbolic


def test_permutation_invariance_of_tau():
    rng = random.Random(23)
    atoms, probs = random_rational_joint(rng, 3)
    oracle = atoms_moment_oracle(atoms, probs, exact=True)
    swapped = atoms_moment_oracle([(a[1], a[0], a[2]) for a in atoms], probs, exact=True)
    for mbs in (1, 2):
        assert tau_eval(SlotBinding((1, 2, 3)), oracle, mbs) == tau_eval(
            SlotBinding((2, 1, 3)), swapped, mbs
        )


def test_expansion_merges_and_drops_zero_terms():
    mono = (((1, 2),),)
    ex = SymbolicExpansion(((mono[0], HALF), (mono[0], -HALF)))
    assert ex.terms == ()
    assert ex.pretty() == "0"


def test_expansion_json_round_trip():
    ex = tau_symbolic(SlotBinding((1, 1, 1)), min_block_size=2)
    data = ex.to_dict()
    assert data == {
        "terms": [
            {"blocks": [[1, 1], [1, 1], [1, 1]], "coeff": "1"},
            {"blocks": [[1, 1, 1], [1, 1, 1]], "coeff": "-1/2"},
        ]
    }
    assert SymbolicExpansion.from_dict(data) == ex
    with pytest.raises(ValidationError, match="coeff"):
        SymbolicExpansion.from_dict({"terms": [{"blocks": [[1, 1]], "coeff": "x"}]})
    with pytest.raises(ValidationError, match="terms"):
        SymbolicExpansion.from_dict({})


def test_kappa_symbolic_term_counts_are_bell_numbers():
    bell = {1: 1, 2: 2, 3: 5, 4: 15, 5: 52}
    for n, count in bell.items():
        assert len(kappa_symbolic(n).terms) == count


def test_kappa_first_orders_match_hand_formulas():
    oracle = random_rational_moments(random.Random(3))
    m1 = oracle((1,))
    m2 = oracle((2,))
    m12 = oracle((1, 2))
    assert kappa_eval(1, oracle) == m1
    assert kappa_eval(2, oracle) == m12 - m1 * m2


def test_kappa_routes_agree_exactly():
    rng = random.Random(29)
    for _ in range(15):
        n = rng.randint(1, 5)
        oracle = random_rational_moments(rng)
        assert kappa_eval(n, oracle) == kappa_recursion_oracle(n, oracle)


def test_kappa_univariate_route_agrees():
    rng = random.Random(31)
    for _ in range(15):
        n = rng.randint(1, 5)
        moments = [Fraction(rng.randint(-12, 12), rng.randint(1, 6)) for _ in range(n)]
        oracle = univariate_moment_oracle(moments)
        assert kappa_eval(n, oracle) == kappa_recursion_oracle(n, oracle, identical=True)


def test_kappa_is_multilinear_in_each_argument():
    rng = random.Random(37)
    atoms, probs = random_rational_joint(rng, 2)
    plain = atoms_moment_oracle(atoms, probs, exact=True)
    scaled = atoms_moment_oracle([(3 * a[0], a[1]) for a in atoms], probs, exact=True)
    assert kappa_eval(2, scaled) == 3 * kappa_eval(2, plain)


def test_kappa_gaussian_higher_orders_vanish():
    gauss = gaussian_moment_oracle()
    assert kappa_eval(2, gauss) == 1
    for k in range(3, 7):
        assert kappa_eval(k, gauss) == 0


def test_kappa_size_guard():
    with pytest.raises(SizeLimitError):
        kappa_eval(11, gaussian_moment_oracle())


def test_moment_oracle_sorts_and_handles_empty():
    calls = []

    def fn(block):
        calls.append(block)
        return Fraction(1)

    from mideriv.forms import MomentOracle

    oracle = MomentOracle(fn, exact=True)
    assert oracle(()) == 1
    oracle((3, 1, 2))
    assert calls == [(1, 2, 3)]


def test_atoms_oracle_exact_prior_moments():
    atoms = [(1, 2), (-1, 0)]
    probs = [Fraction(1, 3), Fraction(2, 3)]
    oracle = atoms_moment_oracle(atoms, probs, exact=True)
    assert oracle((1,)) == Fraction(1, 3) - Fraction(2, 3)
    assert oracle((1, 2, 2)) == Fraction(1, 3) * 1 * 4 + Fraction(2, 3) * (-1) * 0
