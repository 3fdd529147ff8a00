"""Value-ordering heuristics: lexicographic, min-conflicts, and solution-count estimation."""

from __future__ import annotations

import sys
from typing import Dict, List, NamedTuple, Tuple

from .csp import Instance
from .propagation import DomainStore, bits, mac_assign, popcount, undo_to_checkpoint

class ValueOrdering(NamedTuple):
    """Live values of one variable in the order they will be tried."""

    values: List[int]
    scores: Dict[int, float]


def order_lexicographic(store: DomainStore, var: int) -> ValueOrdering:
    values = store.values(var)
    return ValueOrdering(values, {a: float(a) for a in values})


def conflict_scores(store: DomainStore, instance: Instance, var: int) -> Dict[int, int]:
    """Per live value of ``var``, live values it rules out at unassigned neighbors."""
    scores = {a: 0 for a in store.values(var)}
    for u, c in instance.neighbors[var]:
        if store.assigned[u] is not None:
            continue
        support = c.supports(var)
        live_u = store.live[u]
        count_u = store.counts[u]
        for a in scores:
            store.checks += 1
            scores[a] += count_u - popcount(support[a] & live_u)
    return scores


def order_min_conflicts(store: DomainStore, instance: Instance, var: int) -> ValueOrdering:
    """Ascending conflict score, ties by value index."""
    scores = conflict_scores(store, instance, var)
    values = sorted(scores, key=lambda a: (scores[a], a))
    return ValueOrdering(values, {a: float(s) for a, s in scores.items()})


def _product_fraction(store: DomainStore, instance: Instance) -> Tuple[int, int]:
    """The tightness-product estimate as an exact ``(numerator, denominator)``."""
    live, counts, assigned = store.live, store.counts, store.assigned
    num = 1
    den = 1
    for u in range(instance.num_variables):
        if assigned[u] is None:
            num *= counts[u]
    if not num:
        return 0, 1
    for c in instance.constraints:
        i, j = c.scope
        if assigned[i] is not None or assigned[j] is not None:
            continue
        rows = c.row_masks
        live_j = live[j]
        supported = 0
        for a in bits(live[i]):
            supported += popcount(rows[a] & live_j)
        store.checks += counts[i]
        if not supported:
            return 0, 1
        num *= supported
        den *= counts[i] * counts[j]
    return num, den


def _product_estimate(store: DomainStore, instance: Instance) -> float:
    num, den = _product_fraction(store, instance)
    try:
        return num / den
    except OverflowError:
        return sys.float_info.max


def estimate_solution_count(store: DomainStore, instance: Instance, var: int, value: int) -> float:
    """Estimated number of solutions extending the store with ``var = value``.

    Assigns, propagates, and takes the product of live domain sizes of the
    unassigned variables times, for each constraint between two unassigned
    variables, the fraction of live value pairs it allows.  A propagation
    wipeout gives 0.  The store is restored before returning.
    """
    result = mac_assign(store, instance, var, value)
    try:
        if not result.consistent:
            return 0.0
        return _product_estimate(store, instance)
    finally:
        undo_to_checkpoint(store, result.checkpoint)


def estimate_total_solution_count(instance: Instance, store: DomainStore) -> float:
    """The same estimate over the current store with nothing newly assigned."""
    if any(not m for m in store.live):
        return 0.0
    return _product_estimate(store, instance)


def order_solution_count(store: DomainStore, instance: Instance, var: int, estimator=estimate_solution_count) -> ValueOrdering:
    """Estimate every live value and try the largest estimates first (ties by index)."""
    counts = {a: estimator(store, instance, var, a) for a in store.values(var)}
    values = sorted(counts, key=lambda a: (-counts[a], a))
    return ValueOrdering(values, counts)
