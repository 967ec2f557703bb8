"""High-order central finite differences with Richardson extrapolation.

Stencil weights are computed exactly (Fractions) by the classic
Fornberg recurrence; mixed partials tensor the per-axis stencils.  The
base stencils are order-8 accurate per axis, and Richardson
extrapolation across step halvings removes the leading error terms, so
the error estimate (the magnitude of the last tableau correction) is
usually conservative for analytic integrands.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .errors import DomainError

# Per-axis truncation order of the base stencils; Richardson columns
# then cancel h**8, h**10, ... terms (central stencils gain powers of 2).
ACCURACY_ORDER = 8


def fornberg_weights(d: int, offsets: Sequence) -> list[Fraction]:
    """Exact weights approximating the d-th derivative at 0.

    offsets are the sample abscissas (distinct, in units of the step);
    any rationals work.  Exact rationals in, exact rationals out.
    """
    if d < 0:
        raise DomainError(f"d={d}: derivative order must be >= 0")
    offs = [Fraction(o) for o in offsets]
    if len(set(offs)) != len(offs):
        raise DomainError("offsets: repeated abscissa")
    if len(offs) < d + 1:
        raise DomainError(f"offsets: need at least {d + 1} points for derivative order {d}")
    n = len(offs)
    c = [[Fraction(0)] * (d + 1) for _ in range(n)]
    c1 = Fraction(1)
    c4 = offs[0]
    c[0][0] = Fraction(1)
    for i in range(1, n):
        mn = min(i, d)
        c2 = Fraction(1)
        c5 = c4
        c4 = offs[i]
        for j in range(i):
            c3 = offs[i] - offs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2
            for k in range(mn, 0, -1):
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3
            c[j][0] = c4 * c[j][0] / c3
        c1 = c2
    return [c[i][d] for i in range(n)]


@lru_cache(maxsize=None)
def central_stencil(d: int) -> tuple[tuple[int, ...], tuple[Fraction, ...]]:
    """Symmetric stencil for the d-th derivative, truncation order >= 8.

    Half-width m = (d+1)//2 + 3 gives 2m+1 points; parity makes central
    stencils gain one extra order, so accuracy is 2m+1-d or better,
    which is >= 8 for every d >= 1.
    """
    if d < 1:
        raise DomainError(f"d={d}: derivative order must be >= 1")
    m = (d + 1) // 2 + 3
    offsets = tuple(range(-m, m + 1))
    return offsets, tuple(fornberg_weights(d, offsets))


def stencil_halfwidth(d: int) -> int:
    """How far (in steps) the order-d stencil reaches from its center."""
    return (d + 1) // 2 + 3


def fd_partial(
    f: Callable[[tuple[float, ...]], float],
    orders: Sequence[int],
    point: Sequence[float],
    step: float = 0.2,
    richardson_levels: int = 3,
    lower_bound: float = 0.0,
) -> tuple[float, float]:
    """Mixed partial derivative of f by tensored central differences.

    Parameters
    ----------
    f : callable taking a tuple of floats.
    orders : per-axis derivative orders; zeros skip the axis.
    point : evaluation point, same length as orders.
    step : base step; levels halve it (step, step/2, ..., so all samples
        lie within halfwidth*step of the point on each active axis).
    richardson_levels : number of step values entering the tableau.
    lower_bound : every sample must keep each active coordinate >= this.

    Returns
    -------
    (value, error_estimate); the estimate is the magnitude of the last
    Richardson correction (nan when only one level is run).

    Raises DomainError when the widest stencil would cross lower_bound;
    shrink the step or shift the point.
    """
    orders = tuple(int(k) for k in orders)
    point = tuple(float(x) for x in point)
    if len(orders) != len(point):
        raise DomainError(f"orders {orders} and point {point} differ in length")
    if any(k < 0 for k in orders):
        raise DomainError(f"orders {orders}: negative derivative order")
    total = sum(orders)
    if total < 1:
        raise DomainError("orders: at least one axis needs a positive order")
    if richardson_levels < 1:
        raise DomainError(f"richardson_levels={richardson_levels}: need at least 1")
    if step <= 0:
        raise DomainError(f"step={step}: must be positive")
    axes = [i for i, k in enumerate(orders) if k > 0]
    stencils = {i: central_stencil(orders[i]) for i in axes}
    for i in axes:
        reach = stencil_halfwidth(orders[i]) * step
        if point[i] - reach < lower_bound:
            raise DomainError(
                f"axis {i}: stencil reaches {point[i] - reach!r}, below "
                f"{lower_bound!r}; shrink the step or shift the point"
            )
    cache: dict[tuple[float, ...], float] = {}

    def sample(x: tuple[float, ...]) -> float:
        if x not in cache:
            cache[x] = f(x)
        return cache[x]

    values = []
    for level in range(richardson_levels):
        h = step * 0.5**level
        acc = 0.0
        for combo in itertools.product(*(zip(*stencils[i]) for i in axes)):
            x = list(point)
            weight = Fraction(1)
            for i, (offset, w) in zip(axes, combo):
                x[i] = x[i] + offset * h
                weight *= w
            if weight:
                acc += float(weight) * sample(tuple(x))
        values.append(acc / h**total)

    tableau = [values]
    p = ACCURACY_ORDER
    while len(tableau[-1]) > 1:
        prev = tableau[-1]
        factor = 2**p
        tableau.append(
            [(factor * prev[i + 1] - prev[i]) / (factor - 1) for i in range(len(prev) - 1)]
        )
        p += 2
    value = tableau[-1][0]
    estimate = abs(tableau[-1][0] - tableau[-2][-1]) if len(tableau) > 1 else float("nan")
    return value, estimate
