"""Rational deployment of solution-count estimation.

Two layers live here.  The ordering-time model (``ValueEstimate``,
``expected_search_time``, ``optimal_ordering``, ``gain`` and friends) works in
dimensionless time units and is pure arithmetic.  The deployment engine
(``net_voi_sc``, ``value_ordering_sc``, ``random_deployment_ordering``)
decides at search time which values of a variable get a solution-count
estimate, under a Poisson model of solution counts.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple, Union

from .csp import Instance
from .heuristics import ValueOrdering, estimate_solution_count
from .propagation import DomainStore, UsageError

Estimator = Callable[[DomainStore, Instance, int, int], float]

DEFAULT_GAMMA = 1e-3

# series cut-offs for net_voi_sc
_REL_TOL = 1e-12
_LOWER_TAIL_SDS = 40.0
_MAX_TERMS = 200_000


class DomainError(ValueError):
    """Argument outside the mathematical domain of a formula."""


@dataclass(frozen=True)
class ValueEstimate:
    """Expected search time ``T`` under a value and its backtracking probability ``p``."""

    T: float
    p: float

    def __post_init__(self) -> None:
        if self.T < 0:
            raise DomainError(f"expected time must be nonnegative, got {self.T}")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"backtracking probability must lie in [0, 1], got {self.p}")

    @property
    def ratio(self) -> float:
        return math.inf if self.p >= 1.0 else self.T / (1.0 - self.p)


@dataclass(frozen=True)
class OrderingModel:
    estimates: Tuple[ValueEstimate, ...]
    T_def: float = 0.0
    p_def: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "estimates", tuple(self.estimates))
        if not 0.0 <= self.p_def <= 1.0:
            raise DomainError(f"default backtracking probability must lie in [0, 1], got {self.p_def}")

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[float, float]], T_def: float = 0.0, p_def: float = 0.0):
        return cls(tuple(ValueEstimate(T, p) for T, p in pairs), T_def, p_def)


@dataclass(frozen=True)
class VoiResult:
    lam: float
    cost: float

    @property
    def net(self) -> float:
        return self.lam - self.cost


def expected_search_time(ordering: Sequence[int], model: OrderingModel) -> float:
    """Expected time to finish the subtree when values are tried in ``ordering``.

    Each value is reached only if every earlier value backtracked, so value
    ``k`` contributes its time weighted by the product of earlier ``p``.
    """
    total = 0.0
    reach = 1.0
    for v in ordering:
        est = model.estimates[v]
        total += est.T * reach
        reach *= est.p
    return total


def optimal_ordering(model: OrderingModel) -> List[int]:
    """Values by increasing ``T / (1 - p)``; ``p = 1`` values last, ties by index."""
    return sorted(range(len(model.estimates)), key=lambda v: (model.estimates[v].ratio, v))


def _geometric(p_def: float, domain_size: int) -> float:
    # 1 + p + ... + p^(m-2)
    if p_def >= 1.0:
        raise DomainError("default backtracking probability must be < 1 for the closed form")
    if domain_size <= 1:
        return 0.0
    return (1.0 - p_def ** (domain_size - 1)) / (1.0 - p_def)


def default_ordering_time(model: OrderingModel, domain_size: int) -> float:
    """Expected time when only the first value of the prior ordering carries its own estimate."""
    first = model.estimates[optimal_ordering(model)[0]]
    return first.T + first.p * model.T_def * _geometric(model.p_def, domain_size)


def gain(t1: ValueEstimate, ti: ValueEstimate, T_def: float, p_def: float, domain_size: int) -> float:
    """Search time saved by trying value ``i`` ahead of the current first value."""
    return t1.T - ti.T + (t1.p - ti.p) * T_def * _geometric(p_def, domain_size)


def gain_approx(T1: float, Ti: float, domain_size: int) -> float:
    """Large-``p_def`` limit of :func:`gain` with Markov-bounded probabilities."""
    return (T1 - Ti) * domain_size


def markov_backtrack_probability(Ti: float, Ti_all: float) -> float:
    if Ti_all == 0:
        raise DomainError("time to find all solutions must be positive")
    return min(1.0, max(0.0, Ti / Ti_all))


_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


def _stirling_error(x: float) -> float:
    """``lgamma(x + 1) - (x + 1/2) log x + x - log sqrt(2 pi)``."""
    if x <= 15:
        return math.lgamma(x + 1) - (x + 0.5) * math.log(x) + x - _LOG_SQRT_2PI
    xx = x * x
    return (1 / 12 - (1 / 360 - (1 / 1260 - (1 / 1680 - 1 / (1188 * xx)) / xx) / xx) / xx) / x


def _deviance(x: float, mean: float, diff: Optional[float] = None) -> float:
    """``x log(x / mean) + mean - x`` without cancellation when ``x ~ mean``.

    ``diff`` may carry ``x - mean`` when it is known more precisely than the
    difference of the two floats.
    """
    if diff is None:
        diff = x - mean
    if abs(diff) < 0.1 * (x + mean):
        v = diff / (x + mean)
        s = diff * v
        term = 2 * x * v
        vv = v * v
        j = 1
        while True:
            term *= vv
            s_next = s + term / (2 * j + 1)
            if s_next == s:
                return s
            s = s_next
            j += 1
    return x * math.log(x / mean) - diff


def log_poisson_pmf(n: float, nu: float) -> float:
    """Log of ``e^-nu nu^n / n!`` (saddle-point form, accurate for large ``n`` and ``nu``)."""
    if nu == 0:
        return 0.0 if n == 0 else -math.inf
    if n == 0:
        return -nu
    return -_stirling_error(n) - _deviance(n, nu) - _LOG_SQRT_2PI - 0.5 * math.log(n)


def poisson_pmf(n: int, nu: float) -> float:
    return math.exp(log_poisson_pmf(n, nu))


def _lambda_integral(n_max: float, nu: float, lo: float, hi: float) -> float:
    # Euler-Maclaurin on the offset t = n - nu: the summand varies on a scale
    # of sqrt(nu) >> 1, and offsets keep n - nu and n - n_max exact
    import warnings

    from scipy.integrate import IntegrationWarning, quad

    gap = nu - n_max

    def f(t: float) -> float:
        x = nu + t
        logp = -_stirling_error(x) - _deviance(x, nu, t) - _LOG_SQRT_2PI - 0.5 * math.log(x)
        return (t + gap) / (n_max * x) * math.exp(logp)

    points = [0.0] if lo < 0.0 < hi else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, _ = quad(f, lo, hi, points=points, limit=400, epsabs=0.0, epsrel=1e-10)
    return value + 0.5 * f(lo)


def sc_intrinsic_voi(n_max: float, nu: float) -> float:
    """``sum_{n >= ceil(n_max)} (1/n_max - 1/n) P(n; nu)``, the per-value VOI factor."""
    if n_max <= 0:
        raise DomainError(f"n_max must be positive, got {n_max}")
    if nu < 0:
        raise DomainError(f"Poisson rate must be nonnegative, got {nu}")
    if nu == 0:
        return 0.0
    n0 = max(1, math.ceil(n_max))
    sd = math.sqrt(nu)
    # lower-tail mass below nu - 40 sd is under exp(-800)
    lo = max(n0 - nu, -_LOWER_TAIL_SDS * sd)
    hi = min(n_max - nu + math.ceil(20 * nu) + 200, _LOWER_TAIL_SDS * sd + 50)
    if nu > 2.0 ** 52 or hi - lo > _MAX_TERMS:
        if lo >= hi:
            return 0.0
        return _lambda_integral(n_max, nu, lo, hi)
    start = max(n0, math.floor(nu - _LOWER_TAIL_SDS * sd))
    cap = n_max + math.ceil(20 * nu) + 200

    log_nu = math.log(nu)
    inv_max = 1.0 / n_max
    logp = log_poisson_pmf(start, nu)
    terms = []
    acc = 0.0
    n = start
    while n <= cap:
        t = (inv_max - 1.0 / n) * math.exp(logp)
        terms.append(t)
        acc += t
        logp += log_nu - math.log(n + 1)
        if n + 2 > nu:
            # sum_{k > n} P(k) <= P(n + 1) / (1 - nu / (n + 2))
            tail = math.exp(logp) / (1.0 - nu / (n + 2))
            if tail * inv_max <= _REL_TOL * acc:
                break
        n += 1
    return math.fsum(terms)


def net_voi_sc(n_max: float, nu: float, domain_size: int, gamma: float) -> float:
    """Net value of one more solution-count estimate, in units of the per-value search time."""
    return domain_size * sc_intrinsic_voi(n_max, nu) - gamma


def estimation_worthwhile(n_max: float, nu: float, domain_size: int, gamma: float) -> bool:
    """``net_voi_sc(...) > 0``, with exact shortcuts where the sign is known."""
    if nu <= 0:
        return False
    if gamma <= 0:
        # every term with n > n_max is positive
        return True
    if n_max >= nu and domain_size * math.sqrt(nu) / (2.0 * n_max * n_max) <= gamma:
        # intrinsic VOI <= E[(X - n_max)+] / n_max^2 <= sqrt(nu) / (2 n_max^2)
        return False
    return net_voi_sc(n_max, nu, domain_size, gamma) > 0


@dataclass
class SCDeploymentState:
    """Working state of one call of the VOI-driven value ordering."""

    N: float
    domain: List[int]
    gamma: float
    n: Dict[int, float] = field(default_factory=dict)
    n_max: float = 1.0
    estimated: Set[int] = field(default_factory=set)
    trace: List[Tuple[int, float, float]] = field(default_factory=list)

    @property
    def nu(self) -> float:
        return self.N / len(self.domain)

    def next_unestimated(self) -> Optional[int]:
        for v in self.domain:
            if v not in self.estimated:
                return v
        return None


@dataclass
class SCOrdering:
    ordering: ValueOrdering
    n: Dict[int, float]
    child_N: float
    estimations: int
    estimated: Set[int]

    @property
    def values(self) -> List[int]:
        return self.ordering.values


def _sorted_by_count(domain: Sequence[int], n: Dict[int, float], tie=None) -> List[int]:
    if tie is None:
        return sorted(domain, key=lambda v: (-n[v], v))
    return sorted(domain, key=lambda v: (-n[v], tie[v]))


def value_ordering_sc(
    store: DomainStore,
    instance: Instance,
    var: int,
    N: float,
    gamma: float = DEFAULT_GAMMA,
    estimator: Estimator = estimate_solution_count,
) -> SCOrdering:
    """Order ``var``'s live values, estimating solution counts only while it pays.

    Every value starts at the default ``N / |D|``.  Values are estimated in
    index order as long as the net VOI of another estimate, given the
    current best count ``n_max``, is positive.  The result is sorted by
    non-increasing count.
    """
    domain = store.values(var)
    if not domain:
        raise UsageError(f"variable {var} has no live values to order")
    state = SCDeploymentState(N=max(N, 0.0), domain=domain, gamma=gamma)
    default = state.nu
    state.n = {v: default for v in domain}
    state.n_max = max(default, 1.0)

    while estimation_worthwhile(state.n_max, state.nu, len(domain), gamma):
        v = state.next_unestimated()
        if v is None:
            break
        estimate = estimator(store, instance, var, v)
        state.estimated.add(v)
        state.n[v] = estimate
        if estimate > state.n_max:
            state.n_max = estimate
        state.trace.append((v, estimate, state.n_max))

    values = _sorted_by_count(domain, state.n)
    return SCOrdering(
        ValueOrdering(values, dict(state.n)),
        state.n,
        state.n[values[0]],
        len(state.estimated),
        state.estimated,
    )


def random_deployment_ordering(
    store: DomainStore,
    instance: Instance,
    var: int,
    N: float,
    budget: int,
    rng: Union[int, random.Random, None] = None,
    estimator: Estimator = estimate_solution_count,
) -> SCOrdering:
    """Estimate a uniformly random ``budget``-sized subset of values.

    Unestimated values keep the default ``N / |D|`` and are shuffled among
    themselves; the whole domain is then sorted by non-increasing count with
    estimated values ahead of unestimated ones on equal counts.
    """
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    domain = store.values(var)
    if not domain:
        raise UsageError(f"variable {var} has no live values to order")
    if not 0 <= budget <= len(domain):
        raise UsageError(f"budget {budget} outside 0..{len(domain)}")
    default = max(N, 0.0) / len(domain)
    n = {v: default for v in domain}
    chosen = set(rng.sample(domain, budget))
    for v in sorted(chosen):
        n[v] = estimator(store, instance, var, v)
    shuffled = [v for v in domain if v not in chosen]
    rng.shuffle(shuffled)
    tie = {v: (0, v) for v in chosen}
    tie.update({v: (1, k) for k, v in enumerate(shuffled)})
    values = _sorted_by_count(domain, n, tie)
    return SCOrdering(ValueOrdering(values, dict(n)), n, n[values[0]], len(chosen), chosen)


def sc_voi(n_max: float, nu: float, domain_size: int, gamma: float) -> VoiResult:
    """Intrinsic VOI and cost of one estimate, both in per-value search time units."""
    return VoiResult(domain_size * sc_intrinsic_voi(n_max, nu), gamma)
