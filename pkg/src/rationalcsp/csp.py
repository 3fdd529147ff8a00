"""Binary CSP representation and brute-force reference solvers.

Values are dense indices ``0..len(domain)-1`` per variable.  The domain
tuple of a variable holds the external label of each index; labels only
matter to the file format and to pretty output.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

Assignment = Dict[int, int]


class StructureError(ValueError):
    """Raised on an invalid instance, or an assignment that does not fit one."""


@dataclass(frozen=True)
class BinaryConstraint:
    """Extensional constraint over ``scope = (i, j)``.

    ``allowed[a][b]`` is true when ``X_i = a, X_j = b`` is permitted.  The
    matrix is stored once; :meth:`allows` answers queries from either end.
    """

    scope: Tuple[int, int]
    allowed: Tuple[Tuple[bool, ...], ...]
    # bitmask views of ``allowed``; row_masks[a] has bit b set iff (a, b) allowed
    row_masks: Tuple[int, ...] = field(init=False, repr=False, compare=False)
    col_masks: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        i, j = self.scope
        if i == j:
            raise StructureError(f"constraint scope must name two distinct variables, got {self.scope}")
        allowed = tuple(tuple(bool(x) for x in row) for row in self.allowed)
        if not allowed or len({len(row) for row in allowed}) != 1 or not allowed[0]:
            raise StructureError(f"constraint {self.scope}: allowed matrix must be a nonempty rectangle")
        object.__setattr__(self, "allowed", allowed)
        rows = tuple(sum(1 << b for b, ok in enumerate(row) if ok) for row in allowed)
        ncols = len(allowed[0])
        cols = tuple(
            sum(1 << a for a, row in enumerate(allowed) if row[b]) for b in range(ncols)
        )
        object.__setattr__(self, "row_masks", rows)
        object.__setattr__(self, "col_masks", cols)

    @classmethod
    def from_predicate(cls, i: int, j: int, size_i: int, size_j: int, pred) -> "BinaryConstraint":
        return cls((i, j), tuple(tuple(bool(pred(a, b)) for b in range(size_j)) for a in range(size_i)))

    @classmethod
    def from_forbidden(cls, i: int, j: int, size_i: int, size_j: int, nogoods) -> "BinaryConstraint":
        bad = set(nogoods)
        return cls.from_predicate(i, j, size_i, size_j, lambda a, b: (a, b) not in bad)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.allowed), len(self.allowed[0])

    def other(self, var: int) -> int:
        i, j = self.scope
        return j if var == i else i

    def allows(self, var: int, value: int, other_value: int) -> bool:
        """Is ``var = value`` together with ``other(var) = other_value`` allowed?"""
        if var == self.scope[0]:
            return self.allowed[value][other_value]
        return self.allowed[other_value][value]

    def supports(self, var: int) -> Tuple[int, ...]:
        """Per value of ``var``, the bitmask of supporting values at the other end."""
        return self.row_masks if var == self.scope[0] else self.col_masks

    def forbidden_pairs(self) -> List[Tuple[int, int]]:
        return [(a, b) for a, row in enumerate(self.allowed) for b, ok in enumerate(row) if not ok]

    def allowed_pairs(self) -> List[Tuple[int, int]]:
        return [(a, b) for a, row in enumerate(self.allowed) for b, ok in enumerate(row) if ok]


class Instance:
    """An immutable binary CSP.

    ``domains[v]`` is the tuple of labels of variable ``v``; the value index
    of a label is its position.  Build with integer domain sizes for the
    common case where labels equal indices.
    """

    def __init__(self, domains: Sequence, constraints: Sequence[BinaryConstraint] = ()):
        doms = []
        for v, d in enumerate(domains):
            labels = tuple(range(d)) if isinstance(d, int) else tuple(d)
            if not labels:
                raise StructureError(f"variable {v} has an empty domain")
            if len(set(labels)) != len(labels):
                raise StructureError(f"variable {v} has duplicate domain labels")
            doms.append(labels)
        self.domains: Tuple[Tuple[int, ...], ...] = tuple(doms)
        self.num_variables = len(doms)

        seen = set()
        neighbors: List[List[Tuple[int, BinaryConstraint]]] = [[] for _ in doms]
        for c in constraints:
            i, j = c.scope
            if not (0 <= i < self.num_variables and 0 <= j < self.num_variables):
                raise StructureError(f"constraint {c.scope} references a variable out of range")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise StructureError(f"duplicate constraint on variables {key}")
            seen.add(key)
            if c.shape != (len(doms[i]), len(doms[j])):
                raise StructureError(
                    f"constraint {c.scope} has shape {c.shape}, expected {(len(doms[i]), len(doms[j]))}"
                )
            neighbors[i].append((j, c))
            neighbors[j].append((i, c))
        self.constraints: Tuple[BinaryConstraint, ...] = tuple(constraints)
        self.neighbors: Tuple[Tuple[Tuple[int, BinaryConstraint], ...], ...] = tuple(
            tuple(n) for n in neighbors
        )

    @property
    def domain_sizes(self) -> Tuple[int, ...]:
        return tuple(len(d) for d in self.domains)

    def degree(self, var: int) -> int:
        return len(self.neighbors[var])

    def constraint_between(self, i: int, j: int) -> Optional[BinaryConstraint]:
        for other, c in self.neighbors[i]:
            if other == j:
                return c
        return None

    def total_assignments(self) -> int:
        total = 1
        for d in self.domains:
            total *= len(d)
        return total

    def labelled(self, assignment: Mapping[int, int]) -> Dict[int, int]:
        """Map an index assignment to domain labels."""
        return {v: self.domains[v][a] for v, a in assignment.items()}

    def restricted(self, var: int, value: int) -> "Instance":
        """Copy of this instance with ``var``'s domain cut down to ``value``."""
        doms = list(self.domains)
        doms[var] = (self.domains[var][value],)
        cons = []
        for c in self.constraints:
            i, j = c.scope
            rows = c.allowed
            if i == var:
                rows = (rows[value],)
            if j == var:
                rows = tuple((row[value],) for row in rows)
            cons.append(BinaryConstraint(c.scope, rows))
        return Instance(doms, cons)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return self.domains == other.domains and self.constraints == other.constraints

    def __hash__(self) -> int:
        return hash((self.domains, self.constraints))

    def __repr__(self) -> str:
        return f"Instance(vars={self.num_variables}, constraints={len(self.constraints)})"


def _check_assignment(instance: Instance, assignment: Mapping[int, int]) -> None:
    for v, a in assignment.items():
        if not 0 <= v < instance.num_variables:
            raise StructureError(f"variable {v} out of range")
        if not 0 <= a < len(instance.domains[v]):
            raise StructureError(f"value {a} out of range for variable {v}")


def is_consistent(instance: Instance, assignment: Mapping[int, int]) -> bool:
    """True iff every constraint whose scope is fully assigned is satisfied."""
    _check_assignment(instance, assignment)
    for c in instance.constraints:
        i, j = c.scope
        if i in assignment and j in assignment and not c.allowed[assignment[i]][assignment[j]]:
            return False
    return True


def _backtrack(instance: Instance) -> Iterator[Assignment]:
    # chronological backtracking, lexicographic variable and value order, no propagation
    n = instance.num_variables
    earlier = [[(u, c) for u, c in instance.neighbors[v] if u < v] for v in range(n)]
    values = [0] * n

    def extend(v: int) -> Iterator[Assignment]:
        if v == n:
            yield dict(enumerate(values))
            return
        for a in range(len(instance.domains[v])):
            if all(c.allows(v, a, values[u]) for u, c in earlier[v]):
                values[v] = a
                yield from extend(v + 1)

    return extend(0)


def solve_exhaustive(instance: Instance) -> Optional[Assignment]:
    """First solution in lexicographic order, or None."""
    return next(_backtrack(instance), None)


def count_solutions_exact(instance: Instance) -> int:
    """Exact number of complete consistent assignments."""
    return sum(1 for _ in _backtrack(instance))


def enumerate_solutions(instance: Instance) -> Iterator[Assignment]:
    return _backtrack(instance)


def brute_force_solutions(instance: Instance) -> Iterator[Assignment]:
    """Every complete consistent assignment by plain enumeration of the product space."""
    for combo in itertools.product(*(range(len(d)) for d in instance.domains)):
        a = dict(enumerate(combo))
        if is_consistent(instance, a):
            yield a


def not_equal(i: int, j: int, instance_domains: Sequence[Sequence[int]]) -> BinaryConstraint:
    """Label-level ``X_i != X_j`` over the given label tuples."""
    di, dj = instance_domains[i], instance_domains[j]
    return BinaryConstraint((i, j), tuple(tuple(x != y for y in dj) for x in di))


def queens(n: int) -> Instance:
    """n-queens as a binary CSP: one variable per column, value = row."""
    cons = [
        BinaryConstraint.from_predicate(i, j, n, n, lambda a, b, d=j - i: a != b and abs(a - b) != d)
        for i in range(n)
        for j in range(i + 1, n)
    ]
    return Instance([n] * n, cons)
