"""Cross-checking suites and machine-readable verification reports.

The central suite finite-differences the directly computed mutual
information and compares against the partition-form right-hand sides
(first order through mmse/2, higher orders through the conditional
form, centered and uncentered).  The remaining suites check the
algebraic identities (multiquadratic behavior, snr additivity under
signal duplication, the Gaussian zero-snr chain, and the two
moment-cumulant routes), mostly in exact rational arithmetic.

Reports are deterministic for a given (seed, config, backend): no
timestamps, fixed case order, fixed serialization.
"""
from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import closedform
from ._kernels import backend
from .channel import (
    ChannelSpec,
    DiscreteJoint,
    combine_channels,
    expected_conditional_tau,
    gauss_hermite,
    mmse,
    mutual_information,
)
from .errors import DomainError, ValidationError
from .fd import fd_partial, stencil_halfwidth
from .forms import (
    SlotBinding,
    atoms_moment_oracle,
    gaussian_moment_oracle,
    kappa_eval,
    kappa_recursion_oracle,
    tau_eval,
    univariate_moment_oracle,
)

# Gap budget per total derivative order; the fd error estimate must also
# stay below the same figure for a case to pass.
TOLERANCE_BY_ORDER = {1: 1e-8, 2: 1e-7, 3: 1e-5, 4: 1e-3}
CENTERING_TOL = 1e-11
COMBINE_TOL = 1e-10
QUADRATIC_TOL = 1e-9
INDEPENDENCE_TOL = 1e-10
ADJUDICATION_TOL = 1e-8
FD_BASE_STEP = 0.2
RICHARDSON_LEVELS = 3

ADOPTED_CONVENTION = "dI/dsnr_i = E[(X_i - E[X_i|Y])^2] / 2"

SUITE_NAMES = ("theorem1", "lemma1", "lemma2", "gaussian", "cumulants", "all")


@dataclass(frozen=True)
class DerivativeRequest:
    """One mixed partial to check: per-axis orders at an snr point."""

    orders: tuple[int, ...]
    point: tuple[float, ...]
    method: str = "both"

    def __post_init__(self) -> None:
        orders = tuple(int(k) for k in self.orders)
        point = tuple(float(x) for x in self.point)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "point", point)
        if len(orders) != len(point):
            raise DomainError(f"orders {orders} and point {point} differ in length")
        if any(k < 0 for k in orders):
            raise DomainError(f"orders {orders}: negative entry")
        total = sum(orders)
        if not 1 <= total <= 4:
            raise DomainError(f"total order {total}: finite differences cover 1..4")
        for i, (k, lam) in enumerate(zip(orders, point)):
            if k > 0 and not 0.0 < lam <= 4.0:
                raise DomainError(f"point[{i}]={lam}: active coordinates must lie in (0, 4]")
            if k == 0 and not 0.0 <= lam <= 4.0:
                raise DomainError(f"point[{i}]={lam}: coordinates must lie in [0, 4]")
        if self.method not in ("fd", "formula", "both"):
            raise DomainError(f"method {self.method!r}: expected fd, formula, or both")

    @property
    def total_order(self) -> int:
        return sum(self.orders)

    def label(self) -> str:
        o = ",".join(str(k) for k in self.orders)
        p = ",".join(str(x) for x in self.point)
        return f"d({o})@({p})"


@dataclass(frozen=True)
class DerivativeCase:
    """A request bound to an input law and a quadrature order."""

    name: str
    dist: DiscreteJoint
    request: DerivativeRequest
    quad_order: int


@dataclass
class CaseRecord:
    """One comparison: a value under test against a reference."""

    suite: str
    request: str
    gap: float
    tol: float
    verdict: str
    fd: float | None = None
    fd_error: float | None = None
    formula: float | None = None
    formula_uncentered: float | None = None
    centering_gap: float | None = None
    rel_gap: float | None = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "request": self.request,
            "fd": self.fd,
            "fd_error": self.fd_error,
            "formula": self.formula,
            "formula_uncentered": self.formula_uncentered,
            "centering_gap": self.centering_gap,
            "gap": self.gap,
            "rel_gap": self.rel_gap,
            "tol": self.tol,
            "verdict": self.verdict,
            "detail": self.detail,
        }


def _csv_cell(value: float | None) -> str:
    return "" if value is None else repr(float(value))


@dataclass
class VerificationReport:
    """Ordered case records plus the convention adjudication."""

    suite: str
    seed: int
    config: dict
    adjudication: dict
    cases: list[CaseRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "config": self.config,
            "adjudication": self.adjudication,
            "cases": [c.to_dict() for c in self.cases],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["request", "fd", "formula", "gap", "tol", "verdict"])
        for c in self.cases:
            writer.writerow(
                [c.request, _csv_cell(c.fd), _csv_cell(c.formula), _csv_cell(c.gap), _csv_cell(c.tol), c.verdict]
            )
        return buf.getvalue()


def _convention_note() -> dict:
    return {"convention": ADOPTED_CONVENTION, "measured": False}


def two_point_input() -> DiscreteJoint:
    """Equiprobable {-1, +1} on one channel."""
    return DiscreteJoint([[1.0], [-1.0]], [0.5, 0.5])


def correlated_pair_input() -> DiscreteJoint:
    """Four-atom sign pair with correlation 0.4 across two channels."""
    return DiscreteJoint(
        [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]],
        [0.35, 0.15, 0.15, 0.35],
    )


def random_triple_input(rng: random.Random) -> DiscreteJoint:
    """Seeded 3-atom law on three channels, every coordinate informative."""
    while True:
        atoms, probs = closedform.random_rational_joint(rng, 3, atom_count=3)
        columns = list(zip(*atoms))
        if all(len(set(col)) > 1 for col in columns):
            break
    support = [[float(x) for x in atom] for atom in atoms]
    return DiscreteJoint(support, [float(p) for p in probs])


def default_derivative_cases(seed: int = 0) -> list[DerivativeCase]:
    """The standard battery: n=1, n=2 fixed inputs plus a seeded n=3 one."""
    rng = random.Random(seed)
    cases: list[DerivativeCase] = []
    two = two_point_input()
    for order in (1, 2, 3, 4):
        cases.append(
            DerivativeCase("two-point", two, DerivativeRequest((order,), (0.8,)), 128)
        )
    pair = correlated_pair_input()
    for orders in ((1, 0), (1, 1), (2, 0), (2, 1), (2, 2)):
        cases.append(
            DerivativeCase("pair", pair, DerivativeRequest(orders, (0.5, 0.9)), 64)
        )
    triple = random_triple_input(rng)
    for orders in ((1, 0, 0), (1, 1, 0), (1, 1, 1)):
        cases.append(
            DerivativeCase("triple", triple, DerivativeRequest(orders, (0.3, 0.5, 0.7)), 40)
        )
    return cases


def _fd_step(request: DerivativeRequest) -> float:
    active = [i for i, k in enumerate(request.orders) if k > 0]
    reach = max(stencil_halfwidth(request.orders[i]) for i in active)
    low = min(request.point[i] for i in active)
    return min(FD_BASE_STEP, 0.9 * low / reach)


def adjudicate_first_derivative() -> dict:
    """Settle the factor between dI/dsnr and the estimation error.

    Finite-differences the directly computed two-point mutual
    information at snr 1 and compares with the closed-form mmse and
    mmse/2.  The data picks the convention; nothing is patched by hand.
    """
    dist = two_point_input()
    quad = gauss_hermite(128)
    memo: dict[tuple[float, ...], float] = {}

    def f(x: tuple[float, ...]) -> float:
        if x not in memo:
            memo[x] = mutual_information(dist, ChannelSpec(x), quad)
        return memo[x]

    step = min(FD_BASE_STEP, 0.9 * 1.0 / stencil_halfwidth(1))
    value, estimate = fd_partial(f, (1,), (1.0,), step=step, richardson_levels=RICHARDSON_LEVELS)
    full = closedform.two_point_mmse(1.0)
    half = 0.5 * full
    gap_half = abs(value - half)
    rel_full = abs(value - full) / full
    decided = gap_half < ADJUDICATION_TOL and rel_full > 0.1
    return {
        "convention": ADOPTED_CONVENTION,
        "measured": True,
        "snr": 1.0,
        "fd_first_derivative": value,
        "fd_error_estimate": estimate,
        "mmse_closed_form": full,
        "half_mmse": half,
        "gap_to_half_mmse": gap_half,
        "tolerance": ADJUDICATION_TOL,
        "relative_gap_to_full_mmse": rel_full,
        "verdict": "half" if decided else "ambiguous",
    }


def verify_derivatives(seed: int = 0, cases: list[DerivativeCase] | None = None) -> VerificationReport:
    """Mixed fd derivatives of I against the partition formulas.

    Per total order, the gap and the fd error estimate must both stay
    inside TOLERANCE_BY_ORDER; orders >= 2 additionally require the
    centered and uncentered formula paths to agree within CENTERING_TOL.
    CLI suite name: theorem1.
    """
    if cases is None:
        cases = default_derivative_cases(seed)
    memos: dict[int, dict] = {}
    records: list[CaseRecord] = []
    for case in cases:
        dist = case.dist
        req = case.request
        quad = gauss_hermite(case.quad_order)
        memo = memos.setdefault(id(dist), {})

        def f(x: tuple[float, ...], _dist=dist, _quad=quad, _memo=memo) -> float:
            if x not in _memo:
                _memo[x] = mutual_information(_dist, ChannelSpec(x), _quad)
            return _memo[x]

        tol = TOLERANCE_BY_ORDER[req.total_order]
        fd_value = fd_error = None
        if req.method in ("fd", "both"):
            fd_value, fd_error = fd_partial(
                f, req.orders, req.point, step=_fd_step(req), richardson_levels=RICHARDSON_LEVELS
            )
        formula = formula_unc = centering = None
        if req.method in ("formula", "both"):
            spec = ChannelSpec(req.point)
            if req.total_order == 1:
                channel = next(i for i, k in enumerate(req.orders) if k > 0) + 1
                formula = 0.5 * mmse(dist, spec, channel=channel, quad=quad)
            else:
                binding = SlotBinding.from_multiplicities(req.orders)
                formula = expected_conditional_tau(dist, spec, binding, centered=True, quad=quad)
                formula_unc = expected_conditional_tau(dist, spec, binding, centered=False, quad=quad)
                centering = abs(formula - formula_unc)
        if req.method == "both":
            gap = abs(fd_value - formula)
            ok = (
                gap <= tol
                and fd_error <= tol
                and (centering is None or centering <= CENTERING_TOL)
            )
        elif req.method == "fd":
            gap = 0.0
            ok = fd_error <= tol
        else:
            gap = 0.0
            ok = True
        rel = None
        if req.method == "both" and formula != 0.0:
            rel = gap / abs(formula)
        records.append(
            CaseRecord(
                suite="theorem1",
                request=f"{case.name} {req.label()}",
                gap=gap,
                tol=tol,
                verdict="pass" if ok else "fail",
                fd=fd_value,
                fd_error=fd_error,
                formula=formula,
                formula_uncentered=formula_unc,
                centering_gap=centering,
                rel_gap=rel,
                detail="order 1 reference is mmse/2" if req.total_order == 1 else "",
            )
        )
    config = {
        "cases": [
            {
                "name": c.name,
                "orders": list(c.request.orders),
                "point": list(c.request.point),
                "quad_order": c.quad_order,
            }
            for c in cases
        ],
        "richardson_levels": RICHARDSON_LEVELS,
        "step_rule": "min(0.2, 0.9*min_active_snr/stencil_halfwidth)",
        "tolerance_by_total_order": {str(k): v for k, v in TOLERANCE_BY_ORDER.items()},
        "centering_tolerance": CENTERING_TOL,
        "backend": backend(),
    }
    return VerificationReport(
        suite="theorem1",
        seed=seed,
        config=config,
        adjudication=adjudicate_first_derivative(),
        cases=records,
    )


def _tau_pair(atoms2, probs) -> Fraction:
    oracle = atoms_moment_oracle(atoms2, probs, exact=True)
    return tau_eval(SlotBinding((1, 2)), oracle, 1)


def _project(atoms, form_a, form_b):
    out = []
    for atom in atoms:
        u = sum(c * v for c, v in zip(form_a, atom))
        w = sum(c * v for c, v in zip(form_b, atom))
        out.append((u, w))
    return out


def verify_multiquadratic(seed: int = 0, trials: int = 100) -> VerificationReport:
    """Quadratic-in-each-argument identity and independence vanishing.

    For seeded rational joints of (X1, X1', X2), checks
    2 t(X1, X2) + 2 t(X1', X2) = t(X1+X1', X2) + t(X1-X1', X2)
    and t = 0 for independent product laws, all in exact arithmetic
    (prior moments of integer atoms with rational masses).  CLI suite
    name: lemma1.
    """
    if trials < 1:
        raise DomainError(f"trials={trials}: need at least 1")
    rng = random.Random(seed)
    base = (1, 0, 0)
    prime = (0, 1, 0)
    second = (0, 0, 1)
    plus = (1, 1, 0)
    minus = (1, -1, 0)

    quad_gap = 0.0
    for _ in range(trials):
        atoms, probs = closedform.random_rational_joint(rng, 3)
        lhs = 2 * _tau_pair(_project(atoms, base, second), probs) + 2 * _tau_pair(
            _project(atoms, prime, second), probs
        )
        rhs = _tau_pair(_project(atoms, plus, second), probs) + _tau_pair(
            _project(atoms, minus, second), probs
        )
        quad_gap = max(quad_gap, abs(float(lhs - rhs)))

    indep_gap = 0.0
    for _ in range(trials):
        xs, px = closedform.random_rational_joint(rng, 1)
        ys, py = closedform.random_rational_joint(rng, 1)
        atoms = [(x[0], y[0]) for x in xs for y in ys]
        probs = [p * q for p in px for q in py]
        indep_gap = max(indep_gap, abs(float(_tau_pair(atoms, probs))))

    half = Fraction(1, 2)
    sign_product = _tau_pair(
        [(1, 1), (1, -1), (-1, 1), (-1, -1)],
        [half * half] * 4,
    )

    degen_gap = 0.0
    for _ in range(10):
        atoms, probs = closedform.random_rational_joint(rng, 2)
        padded = [(x, 0, y) for x, y in atoms]
        lhs = 2 * _tau_pair(_project(padded, base, second), probs) + 2 * _tau_pair(
            _project(padded, prime, second), probs
        )
        rhs = _tau_pair(_project(padded, plus, second), probs) + _tau_pair(
            _project(padded, minus, second), probs
        )
        degen_gap = max(degen_gap, abs(float(lhs - rhs)))

    records = [
        CaseRecord(
            suite="lemma1",
            request=f"quadratic identity, random joints [{trials} trials]",
            gap=quad_gap,
            tol=QUADRATIC_TOL,
            verdict="pass" if quad_gap <= QUADRATIC_TOL else "fail",
            detail="max |lhs - rhs|, exact rational evaluation",
        ),
        CaseRecord(
            suite="lemma1",
            request=f"independence vanishing, product joints [{trials} trials]",
            gap=indep_gap,
            tol=INDEPENDENCE_TOL,
            verdict="pass" if indep_gap <= INDEPENDENCE_TOL else "fail",
            detail="max |t| over independent products",
        ),
        CaseRecord(
            suite="lemma1",
            request="independence vanishing, two-point product",
            gap=abs(float(sign_product)),
            tol=INDEPENDENCE_TOL,
            verdict="pass" if sign_product == 0 else "fail",
            fd=float(sign_product),
            formula=0.0,
        ),
        CaseRecord(
            suite="lemma1",
            request="degenerate second argument (X' = 0) [10 trials]",
            gap=degen_gap,
            tol=QUADRATIC_TOL,
            verdict="pass" if degen_gap == 0.0 else "fail",
            detail="identity through tau(X+0) = tau(X-0)",
        ),
    ]
    config = {"trials": trials, "support_values": [-2, 2], "max_atoms": 5, "arithmetic": "exact"}
    return VerificationReport(
        suite="lemma1", seed=seed, config=config, adjudication=_convention_note(), cases=records
    )


def verify_snr_combining(seed: int = 0, quad_order: int = 64) -> VerificationReport:
    """Duplicated-signal channels against their single combined channel.

    Feeding one signal to several channels carries exactly as much
    information as one channel at the summed snr; checked for the
    two-point input across three splits.  CLI suite name: lemma2.
    This suite uses no randomness; seed is echoed into the report.
    """
    quad = gauss_hermite(quad_order)
    records: list[CaseRecord] = []
    splits = [(0.3, 0.7), (0.8, 0.0), (0.2, 0.3, 0.5)]
    for parts in splits:
        d = len(parts)
        dup = DiscreteJoint([[1.0] * d, [-1.0] * d], [0.5, 0.5])
        spec = ChannelSpec(parts)
        value = mutual_information(dup, spec, quad)
        reduced_dist, reduced_spec = combine_channels(dup, spec, groups=[list(range(1, d + 1))])
        reference = mutual_information(reduced_dist, reduced_spec, quad)
        gap = abs(value - reference)
        records.append(
            CaseRecord(
                suite="lemma2",
                request=f"split {parts} vs {round(sum(parts), 12)}",
                gap=gap,
                tol=COMBINE_TOL,
                verdict="pass" if gap <= COMBINE_TOL else "fail",
                fd=value,
                formula=reference,
                detail="duplicated-signal mi vs combined-channel mi",
            )
        )
    pair = correlated_pair_input()
    spec = ChannelSpec((0.5, 0.9))
    same_dist, same_spec = combine_channels(pair, spec)
    gap = abs(mutual_information(pair, spec, quad) - mutual_information(same_dist, same_spec, quad))
    records.append(
        CaseRecord(
            suite="lemma2",
            request="identity grouping (no duplicates declared)",
            gap=gap,
            tol=COMBINE_TOL,
            verdict="pass" if gap <= COMBINE_TOL else "fail",
        )
    )
    config = {"quad_order": quad_order, "input": "two-point", "backend": backend()}
    return VerificationReport(
        suite="lemma2", seed=seed, config=config, adjudication=_convention_note(), cases=records
    )


def verify_gaussian_chain(seed: int = 0, max_order: int = 6) -> VerificationReport:
    """Zero-snr derivative chain for the standard Gaussian input.

    The diverse-partition form with Gaussian moments must equal the k-th
    derivative of (1/2) log(1+l) at 0, namely (-1)**(k-1) (k-1)!/2,
    exactly (both sides are rationals).  The k=1 row adds the E[X**2]/2
    first-order term to the bare form.  CLI suite name: gaussian.
    This suite uses no randomness; seed is echoed into the report.
    """
    if not 1 <= max_order <= 6:
        raise DomainError(f"max_order={max_order}: supported range is 1..6")
    oracle = gaussian_moment_oracle()
    records: list[CaseRecord] = []
    for k in range(1, max_order + 1):
        binding = SlotBinding((1,) * k)
        value = tau_eval(binding, oracle, 1)
        if k == 1:
            value = value + Fraction(1, 2) * oracle((1, 1))
        reference = closedform.half_log_derivative(k)
        exact = value == reference
        records.append(
            CaseRecord(
                suite="gaussian",
                request=f"gaussian chain k={k}",
                gap=abs(float(value - reference)),
                tol=0.0,
                verdict="pass" if exact else "fail",
                fd=float(value),
                formula=float(reference),
                detail="exact rational equality" + (", includes E[X^2]/2 term" if k == 1 else ""),
            )
        )
    config = {"max_order": max_order, "arithmetic": "exact"}
    return VerificationReport(
        suite="gaussian", seed=seed, config=config, adjudication=_convention_note(), cases=records
    )


def verify_cumulant_routes(seed: int = 0, trials: int = 50) -> VerificationReport:
    """Set-partition cumulants against the moment-cumulant recursions.

    Random rational moment oracles for n up to 6, compared exactly; the
    Gaussian rows and the classic variance identity round it out.  CLI
    suite name: cumulants.
    """
    if trials < 1:
        raise DomainError(f"trials={trials}: need at least 1")
    rng = random.Random(seed)

    subset_exact = True
    for _ in range(trials):
        n = rng.randint(1, 6)
        oracle = closedform.random_rational_moments(rng)
        subset_exact = subset_exact and kappa_eval(n, oracle) == kappa_recursion_oracle(n, oracle)

    univariate_exact = True
    for _ in range(trials):
        n = rng.randint(1, 6)
        moments = [Fraction(rng.randint(-20, 20), rng.randint(1, 8)) for _ in range(n)]
        oracle = univariate_moment_oracle(moments)
        univariate_exact = univariate_exact and kappa_eval(n, oracle) == kappa_recursion_oracle(
            n, oracle, identical=True
        )

    gauss = gaussian_moment_oracle()
    gaussian_exact = all(kappa_eval(k, gauss) == 0 for k in range(3, 7))

    variance = kappa_eval(2, univariate_moment_oracle([Fraction(3), Fraction(10)]))
    variance_exact = variance == 1

    records = [
        CaseRecord(
            suite="cumulants",
            request=f"partition sum vs subset recursion [{trials} trials]",
            gap=0.0 if subset_exact else 1.0,
            tol=0.0,
            verdict="pass" if subset_exact else "fail",
            detail="exact rational equality, n in 1..6",
        ),
        CaseRecord(
            suite="cumulants",
            request=f"partition sum vs univariate recursion [{trials} trials]",
            gap=0.0 if univariate_exact else 1.0,
            tol=0.0,
            verdict="pass" if univariate_exact else "fail",
            detail="exact rational equality, identical-variable route",
        ),
        CaseRecord(
            suite="cumulants",
            request="gaussian cumulants k=3..6",
            gap=0.0 if gaussian_exact else 1.0,
            tol=0.0,
            verdict="pass" if gaussian_exact else "fail",
            detail="higher Gaussian cumulants vanish exactly",
        ),
        CaseRecord(
            suite="cumulants",
            request="variance identity m=(3,10)",
            gap=abs(float(variance - 1)),
            tol=0.0,
            verdict="pass" if variance_exact else "fail",
            fd=float(variance),
            formula=1.0,
        ),
    ]
    config = {"trials": trials, "max_n": 6, "arithmetic": "exact"}
    return VerificationReport(
        suite="cumulants", seed=seed, config=config, adjudication=_convention_note(), cases=records
    )


def verify_all(seed: int = 0) -> VerificationReport:
    """Every suite in a fixed order, merged into one report."""
    subreports = [
        verify_derivatives(seed=seed),
        verify_multiquadratic(seed=seed),
        verify_snr_combining(seed=seed),
        verify_gaussian_chain(seed=seed),
        verify_cumulant_routes(seed=seed),
    ]
    cases = [case for report in subreports for case in report.cases]
    config = {"suites": {report.suite: report.config for report in subreports}}
    return VerificationReport(
        suite="all",
        seed=seed,
        config=config,
        adjudication=subreports[0].adjudication,
        cases=cases,
    )


SUITE_RUNNERS = {
    "theorem1": verify_derivatives,
    "lemma1": verify_multiquadratic,
    "lemma2": verify_snr_combining,
    "gaussian": verify_gaussian_chain,
    "cumulants": verify_cumulant_routes,
    "all": verify_all,
}


def run_suite(name: str, seed: int = 0) -> VerificationReport:
    """Run a suite by its CLI token."""
    if name not in SUITE_RUNNERS:
        raise ValidationError(f"suite: {name!r} is not one of {', '.join(SUITE_NAMES)}")
    return SUITE_RUNNERS[name](seed=seed)
