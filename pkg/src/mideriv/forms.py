"""Partition moment forms and joint cumulants.

Two alternating sums are evaluated here, symbolically with exact
rational coefficients and numerically against caller-supplied moment
oracles:

* the diverse-partition form over {1, 1, ..., n, n} with coefficient
  (-1)**(k-1) * (k-2)! / 2**s per partition (k blocks, s identical
  pairs), optionally restricted to blocks of size >= 2 (the variant
  applied to conditionally centered variables), and
* the joint cumulant over set partitions of {1, ..., n} with
  coefficient (-1)**(k-1) * (k-1)!.

This module never integrates anything; oracles own the measure.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .errors import DomainError, SizeLimitError, ValidationError
from .partitions import enumerate_diverse, set_partitions

Block = tuple[int, ...]
Monomial = tuple[Block, ...]

# Set partitions of [n] are enumerated exhaustively; Bell(10) = 115975.
CUMULANT_LIMIT = 10


@dataclass(frozen=True)
class SlotBinding:
    """Assignment of argument slots 1..n to variable ids.

    Repeated arguments are expressed by binding several slots to the
    same variable: the three-slot binding (1, 1, 2) realizes the call
    pattern f(X1, X1, X2).
    """

    variables: tuple[int, ...]

    def __post_init__(self) -> None:
        vs = tuple(int(v) for v in self.variables)
        if not vs:
            raise ValidationError("variables: a binding needs at least one slot")
        if any(v < 1 for v in vs):
            raise ValidationError("variables: variable ids are 1-based")
        object.__setattr__(self, "variables", vs)

    @property
    def n(self) -> int:
        """Slot count (the total derivative order it encodes)."""
        return len(self.variables)

    @classmethod
    def from_multiplicities(cls, multiplicities: Sequence[int]) -> "SlotBinding":
        """Binding with variable i occupying multiplicities[i-1] slots.

        Zeros are skipped, so (2, 0, 1) binds slots (1, 1, 3).
        """
        vs: list[int] = []
        for var, count in enumerate(multiplicities, start=1):
            if int(count) < 0:
                raise ValidationError(f"multiplicities: negative count for variable {var}")
            vs.extend([var] * int(count))
        return cls(tuple(vs))

    @classmethod
    def distinct(cls, n: int) -> "SlotBinding":
        """One slot per variable: (1, 2, ..., n)."""
        return cls(tuple(range(1, n + 1)))

    def map_block(self, block: Iterable[int]) -> Block:
        return tuple(sorted(self.variables[s - 1] for s in block))


@dataclass(frozen=True)
class MomentOracle:
    """Expectation oracle for products of variables over a block.

    ``fn`` receives a sorted tuple of variable ids (repeats allowed) and
    returns the expectation of the corresponding product.  The empty
    block never reaches ``fn``; it is 1 by definition.  ``exact`` marks
    oracles returning Fractions, which keeps downstream evaluation in
    exact arithmetic.
    """

    fn: Callable[[Block], object]
    exact: bool = False

    def __call__(self, block: Iterable[int]):
        key = tuple(sorted(block))
        if not key:
            return Fraction(1) if self.exact else 1.0
        return self.fn(key)


def gaussian_moment_oracle() -> MomentOracle:
    """Standard Gaussian, any ids: odd moments 0, even moments (k-1)!!."""

    def fn(block: Block) -> Fraction:
        k = len(block)
        if k % 2:
            return Fraction(0)
        return Fraction(math.prod(range(1, k, 2)))

    return MomentOracle(fn, exact=True)


def univariate_moment_oracle(moments: Sequence, exact: bool = True) -> MomentOracle:
    """Single variable with raw moments m1, m2, ... (ids are ignored).

    All variable ids are treated as the same variable; a block of size k
    returns moments[k-1].
    """
    ms = tuple(Fraction(m) for m in moments) if exact else tuple(float(m) for m in moments)

    def fn(block: Block):
        k = len(block)
        if k > len(ms):
            raise DomainError(f"moment of order {k} requested but only {len(ms)} supplied")
        return ms[k - 1]

    return MomentOracle(fn, exact=exact)


def atoms_moment_oracle(support: Sequence[Sequence], probs: Sequence, exact: bool = False) -> MomentOracle:
    """Finitely supported joint law; block ids index coordinates (1-based).

    With exact=True the support entries and probabilities should be ints
    or Fractions and moments come back as Fractions.  Values are
    memoized per block.
    """
    atoms = [tuple(a) for a in support]
    ps = list(probs)
    if len(atoms) != len(ps):
        raise ValidationError(f"probs: length {len(ps)} does not match support length {len(atoms)}")
    dim = len(atoms[0]) if atoms else 0
    memo: dict[Block, object] = {}

    def fn(block: Block):
        if block not in memo:
            if block[-1] > dim:
                raise DomainError(f"block id {block[-1]} exceeds the {dim} coordinates")
            total = Fraction(0) if exact else 0.0
            for atom, p in zip(atoms, ps):
                v = p
                for i in block:
                    v = v * atom[i - 1]
                total = total + v
            memo[block] = total
        return memo[block]

    return MomentOracle(fn, exact=exact)


def _canonical_monomial(blocks: Iterable[Iterable[int]]) -> Monomial:
    inner = (tuple(sorted(b)) for b in blocks)
    return tuple(sorted(inner, key=lambda b: (-len(b), b)))


def _term_key(mono: Monomial):
    # More blocks first, then lexicographic on the canonical block list:
    # reproduces the familiar layout of the identical-argument collapses.
    return (-len(mono), mono)


def _block_str(block: Block) -> str:
    pieces = []
    for var, grp in itertools.groupby(block):
        e = len(list(grp))
        pieces.append(f"x{var}" + (f"^{e}" if e > 1 else ""))
    return "E[" + "*".join(pieces) + "]"


@dataclass(frozen=True)
class SymbolicExpansion:
    """Exact-rational linear combination of moment monomials.

    A monomial is a multiset of blocks, each block a multiset of
    variable ids.  Terms are canonical: no zero coefficients, blocks
    sorted, monomials sorted, fixed term order.
    """

    terms: tuple[tuple[Monomial, Fraction], ...]

    def __post_init__(self) -> None:
        acc: dict[Monomial, Fraction] = {}
        for mono, coeff in self.terms:
            key = _canonical_monomial(mono)
            acc[key] = acc.get(key, Fraction(0)) + Fraction(coeff)
        cleaned = tuple(
            (m, acc[m]) for m in sorted(acc, key=_term_key) if acc[m] != 0
        )
        object.__setattr__(self, "terms", cleaned)

    def __len__(self) -> int:
        return len(self.terms)

    def coefficient(self, blocks: Iterable[Iterable[int]]) -> Fraction:
        """Coefficient of a monomial, 0 when absent."""
        key = _canonical_monomial(blocks)
        for mono, coeff in self.terms:
            if mono == key:
                return coeff
        return Fraction(0)

    def evaluate(self, oracle: MomentOracle):
        """Sum of coefficient * product of block moments.

        Exact oracles keep Fractions end to end; otherwise coefficients
        are converted to float once per term.
        """
        total = Fraction(0) if oracle.exact else 0.0
        for mono, coeff in self.terms:
            v = coeff if oracle.exact else float(coeff)
            for block in mono:
                v = v * oracle(block)
            total = total + v
        return total

    def pretty(self, symbol: str = "M") -> str:
        """Readable form, e.g. ``M2^3 - 1/2*M3^2``.

        When every block repeats a single common variable, a block of
        size k prints as ``<symbol>k`` (a conditional-moment shorthand);
        otherwise blocks print as E[...] products.
        """
        if not self.terms:
            return "0"
        used = {v for mono, _ in self.terms for b in mono for v in b}
        single = len(used) == 1 and all(
            len(set(b)) == 1 for mono, _ in self.terms for b in mono
        )
        out = []
        for mono, coeff in self.terms:
            factors = []
            for block, grp in itertools.groupby(mono):
                e = len(list(grp))
                base = f"{symbol}{len(block)}" if single else _block_str(block)
                factors.append(base + (f"^{e}" if e > 1 else ""))
            mag = abs(coeff)
            body = "*".join(factors)
            if not body:
                body = str(mag)
            elif mag != 1:
                body = f"{mag}*{body}"
            if not out:
                out.append(body if coeff > 0 else f"-{body}")
            else:
                out.append(f" + {body}" if coeff > 0 else f" - {body}")
        return "".join(out)

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"blocks": [list(b) for b in mono], "coeff": str(coeff)}
                for mono, coeff in self.terms
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SymbolicExpansion":
        if not isinstance(data, dict) or "terms" not in data:
            raise ValidationError("terms: missing")
        built = []
        for i, term in enumerate(data["terms"]):
            if "blocks" not in term:
                raise ValidationError(f"terms[{i}].blocks: missing")
            if "coeff" not in term:
                raise ValidationError(f"terms[{i}].coeff: missing")
            try:
                coeff = Fraction(term["coeff"])
            except (ValueError, ZeroDivisionError) as exc:
                raise ValidationError(f"terms[{i}].coeff: {term['coeff']!r} is not a fraction") from exc
            built.append((tuple(tuple(b) for b in term["blocks"]), coeff))
        return cls(tuple(built))


@lru_cache(maxsize=None)
def _tau_symbolic(variables: tuple[int, ...], min_block_size: int) -> SymbolicExpansion:
    n = len(variables)
    acc: dict[Monomial, Fraction] = {}
    for part in enumerate_diverse(n, min_block_size):
        coeff = Fraction((-1) ** (part.k - 1) * math.factorial(part.k - 2), 2**part.s)
        mono = _canonical_monomial(
            tuple(sorted(variables[s - 1] for s in b)) for b in part.blocks
        )
        acc[mono] = acc.get(mono, Fraction(0)) + coeff
    return SymbolicExpansion(tuple(acc.items()))


def tau_symbolic(binding: SlotBinding, min_block_size: int = 1) -> SymbolicExpansion:
    """Diverse-partition expansion with slots merged through the binding.

    Identical-argument slots collapse into powers of common blocks with
    summed rational coefficients.  min_block_size=2 keeps only
    partitions whose blocks all have size >= 2 (the centered variant);
    for a single slot that index set is empty and the expansion is 0.
    """
    if min_block_size not in (1, 2):
        raise ValidationError(f"min_block_size: got {min_block_size!r}, expected 1 or 2")
    return _tau_symbolic(binding.variables, min_block_size)


def tau_eval(binding: SlotBinding, oracle: MomentOracle, min_block_size: int = 1):
    """Numeric (or exact) value of the diverse-partition form.

    Evaluates the cached symbolic expansion against the oracle; exact
    oracles give exact rational values.  For one slot at full index set
    this is -E[X]**2 / 2.
    """
    return tau_symbolic(binding, min_block_size).evaluate(oracle)


@lru_cache(maxsize=None)
def kappa_symbolic(n: int) -> SymbolicExpansion:
    """Joint-cumulant expansion over set partitions of {1..n}."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DomainError(f"n={n!r}: expected a positive integer")
    if n > CUMULANT_LIMIT:
        raise SizeLimitError(f"n={n}: set-partition enumeration capped at {CUMULANT_LIMIT}")
    acc: dict[Monomial, Fraction] = {}
    for part in set_partitions(list(range(1, n + 1))):
        coeff = Fraction((-1) ** (len(part) - 1) * math.factorial(len(part) - 1))
        mono = _canonical_monomial(part)
        acc[mono] = acc.get(mono, Fraction(0)) + coeff
    return SymbolicExpansion(tuple(acc.items()))


def kappa_eval(n: int, oracle: MomentOracle):
    """Joint cumulant of variables 1..n via the set-partition sum."""
    return kappa_symbolic(n).evaluate(oracle)


def kappa_recursion_oracle(n: int, oracle: MomentOracle, identical: bool = False):
    """Joint cumulant by moment-cumulant recursion, not the partition sum.

    An independent route to :func:`kappa_eval` meant for cross-checks.
    With identical=False, the subset recursion
    ``kappa(S) = m(S) - sum over proper T < S with min(S) in T of
    kappa(T) * m(S - T)``.  With identical=True, the univariate binomial
    recursion ``m_j = sum C(j-1, i-1) kappa_i m_{j-i}`` solved for
    kappa_j, taking m_j as the moment of the first j ids (the oracle
    must treat all ids as one variable).
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DomainError(f"n={n!r}: expected a positive integer")
    if identical:
        ms = [oracle(tuple(range(1, j + 1))) for j in range(1, n + 1)]
        ks: list = []
        for j in range(1, n + 1):
            v = ms[j - 1]
            for i in range(1, j):
                v = v - math.comb(j - 1, i - 1) * ks[i - 1] * ms[j - i - 1]
            ks.append(v)
        return ks[-1]

    memo: dict[Block, object] = {}

    def kappa(subset: Block):
        if subset in memo:
            return memo[subset]
        value = oracle(subset)
        first, rest = subset[0], subset[1:]
        for r in range(len(rest)):
            for combo in itertools.combinations(rest, r):
                inner = tuple(sorted((first,) + combo))
                chosen = set(inner)
                outer = tuple(x for x in subset if x not in chosen)
                value = value - kappa(inner) * oracle(outer)
        memo[subset] = value
        return value

    return kappa(tuple(range(1, n + 1)))
