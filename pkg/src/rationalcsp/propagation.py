"""AC-3 arc consistency and MAC assignment over a trailed bitset domain store."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .csp import BinaryConstraint, Instance


class UsageError(RuntimeError):
    """Caller broke an operation's precondition."""


popcount = int.bit_count


def bits(mask: int) -> List[int]:
    """Indices of set bits, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class Trail:
    """Chronological log of domain changes with nested checkpoints.

    Entries are ``(var, removed_mask, was_assignment)``.  A checkpoint is a
    unique token remembering the trail length when it was taken; undoing a
    checkpoint also discards every checkpoint taken after it.
    """

    def __init__(self) -> None:
        self.entries: List[Tuple[int, int, bool]] = []
        self.marks: List[Tuple[int, int]] = []
        self._next_token = 0

    def checkpoint(self) -> int:
        token = self._next_token
        self._next_token += 1
        self.marks.append((token, len(self.entries)))
        return token

    def position(self, token: int) -> int:
        for k in range(len(self.marks) - 1, -1, -1):
            if self.marks[k][0] == token:
                return k
        raise UsageError(f"stale or unknown checkpoint {token}")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def depth(self) -> int:
        return len(self.marks)


class DomainStore:
    """Live values per variable as bitsets, plus counts and assignment flags."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.live: List[int] = [(1 << len(d)) - 1 for d in instance.domains]
        self.counts: List[int] = [len(d) for d in instance.domains]
        self.assigned: List[Optional[int]] = [None] * instance.num_variables
        self.trail = Trail()
        self.checks = 0

    def copy(self) -> "DomainStore":
        other = DomainStore.__new__(DomainStore)
        other.instance = self.instance
        other.live = list(self.live)
        other.counts = list(self.counts)
        other.assigned = list(self.assigned)
        other.trail = Trail()
        other.checks = 0
        return other

    def snapshot(self) -> Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[Optional[int], ...]]:
        return tuple(self.live), tuple(self.counts), tuple(self.assigned)

    def values(self, var: int) -> List[int]:
        return bits(self.live[var])

    def is_live(self, var: int, value: int) -> bool:
        return bool(self.live[var] >> value & 1)

    def prune(self, var: int, removed: int) -> None:
        removed &= self.live[var]
        if removed:
            self.live[var] ^= removed
            self.counts[var] -= popcount(removed)
            self.trail.entries.append((var, removed, False))

    def assign(self, var: int, value: int) -> None:
        self.prune(var, self.live[var] & ~(1 << value))
        self.assigned[var] = value
        self.trail.entries.append((var, 0, True))

    def unassigned(self) -> List[int]:
        return [v for v, a in enumerate(self.assigned) if a is None]


@dataclass
class ConsistencyResult:
    consistent: bool
    wiped_out: Optional[int] = None
    checkpoint: Optional[int] = None

    def __bool__(self) -> bool:
        return self.consistent


def undo_to_checkpoint(store: DomainStore, mark: int) -> None:
    """Restore ``store`` to its exact state when ``mark`` was taken, dropping the mark."""
    trail = store.trail
    k = trail.position(mark)
    target = trail.marks[k][1]
    entries = trail.entries
    while len(entries) > target:
        var, removed, was_assignment = entries.pop()
        if was_assignment:
            store.assigned[var] = None
        else:
            store.live[var] |= removed
            store.counts[var] += popcount(removed)
    del trail.marks[k:]


def revise(store: DomainStore, constraint: BinaryConstraint, src: int, dst: int) -> bool:
    """Drop every live value of ``src`` without a live support in ``dst``."""
    if constraint.scope != (src, dst) and constraint.scope != (dst, src):
        raise UsageError(f"constraint {constraint.scope} does not link {src} and {dst}")
    return _revise(store, constraint, src, dst)


def _revise(store: DomainStore, constraint: BinaryConstraint, src: int, dst: int) -> bool:
    support = constraint.row_masks if src == constraint.scope[0] else constraint.col_masks
    dst_live = store.live[dst]
    removed = 0
    mask = store.live[src]
    while mask:
        low = mask & -mask
        a = low.bit_length() - 1
        mask ^= low
        store.checks += 1
        if not support[a] & dst_live:
            removed |= low
    if removed:
        store.prune(src, removed)
        return True
    return False


def _propagate(store: DomainStore, queue: deque, lifo: bool) -> ConsistencyResult:
    instance = store.instance
    # at most one constraint per pair, so (src, dst) identifies an arc
    queued = {(src, dst) for src, dst, _ in queue}
    pop = queue.pop if lifo else queue.popleft
    while queue:
        src, dst, c = pop()
        queued.discard((src, dst))
        if _revise(store, c, src, dst):
            if not store.live[src]:
                return ConsistencyResult(False, wiped_out=src)
            for u, cu in instance.neighbors[src]:
                if u != dst and (u, src) not in queued:
                    queued.add((u, src))
                    queue.append((u, src, cu))
    return ConsistencyResult(True)


def ac3(store: DomainStore, instance: Optional[Instance] = None, *, order: str = "fifo") -> ConsistencyResult:
    """Run AC-3 over all arcs to a fixpoint.

    ``order`` picks the queue discipline (``"fifo"`` or ``"lifo"``); the
    fixpoint does not depend on it.
    """
    instance = instance or store.instance
    if any(not m for m in store.live):
        return ConsistencyResult(False, wiped_out=store.live.index(0))
    queue = deque()
    for c in instance.constraints:
        i, j = c.scope
        queue.append((i, j, c))
        queue.append((j, i, c))
    return _propagate(store, queue, order == "lifo")


def mac_assign(store: DomainStore, instance: Optional[Instance], var: int, value: int) -> ConsistencyResult:
    """Checkpoint, assign ``var = value`` and re-establish arc consistency.

    The checkpoint is returned on the result whatever the verdict; the caller
    undoes it when retracting the assignment.
    """
    instance = instance or store.instance
    if store.assigned[var] is not None or not store.is_live(var, value):
        raise UsageError(f"value {value} is not live for variable {var}")
    mark = store.trail.checkpoint()
    store.assign(var, value)
    queue = deque((u, var, c) for u, c in instance.neighbors[var])
    result = _propagate(store, queue, lifo=False)
    result.checkpoint = mark
    return result
