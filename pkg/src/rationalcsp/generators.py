"""Seeded random instance generators: Model RB and Generalized Sudoku.

All randomness comes from :class:`random.Random` (MT19937, seeded with the
integer seed), consumed in a fixed documented order, so an instance is a
pure function of its parameters.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import List

from .csp import BinaryConstraint, Instance, not_equal
from .search import RunConfig, search

RNG_ALGORITHM = "mt19937/python-random/v1"


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class RBParams:
    n_vars: int
    domain_size: int
    n_constraints: int
    n_nogoods: int
    seed: int = 0

    def validate(self) -> None:
        if self.n_vars < 2 or self.domain_size < 1:
            raise ValueError("need at least 2 variables and a nonempty domain")
        if not 0 <= self.n_constraints <= self.n_vars * (self.n_vars - 1) // 2:
            raise ValueError(f"n_constraints must lie in 0..{self.n_vars * (self.n_vars - 1) // 2}")
        if not 0 <= self.n_nogoods <= self.domain_size ** 2:
            raise ValueError(f"n_nogoods must lie in 0..{self.domain_size ** 2}")


# full-scale presets: an easier and a harder satisfiable random set
RB_EASY = RBParams(30, 30, 280, 220)
RB_HARD = RBParams(40, 19, 410, 90)
# desk-scale family: satisfiable, every heuristic needs some search, runs take milliseconds
RB_DESK = RBParams(50, 10, 150, 45)
# tighter member of the same family, near the satisfiability threshold; seed 8 is the
# first satisfiable seed needing at least 100 backtracks under exhaustive SC
RB_MID = RBParams(50, 10, 150, 50, seed=8)


def generate_model_rb(params: RBParams) -> Instance:
    """Random binary CSP with exact constraint and nogood counts.

    Draws ``n_constraints`` distinct variable pairs (from the lexicographic
    list of pairs ``i < j``) with ``rng.sample``, then for each constraint in
    draw order ``n_nogoods`` distinct cells of the ``d x d`` matrix, cell
    ``k`` being the pair ``divmod(k, d)``.
    """
    params.validate()
    rng = random.Random(params.seed)
    d = params.domain_size
    pairs = list(itertools.combinations(range(params.n_vars), 2))
    scopes = rng.sample(pairs, params.n_constraints)
    constraints = []
    for i, j in scopes:
        cells = rng.sample(range(d * d), params.n_nogoods)
        constraints.append(BinaryConstraint.from_forbidden(i, j, d, d, [divmod(k, d) for k in cells]))
    return Instance([d] * params.n_vars, constraints)


@dataclass(frozen=True)
class SudokuParams:
    tile_rows: int
    tile_cols: int
    holes: int
    seed: int = 0

    @property
    def side(self) -> int:
        return self.tile_rows * self.tile_cols

    def validate(self) -> None:
        if self.tile_rows < 1 or self.tile_cols < 1:
            raise ValueError("tile dimensions must be positive")
        if not 0 <= self.holes <= self.side ** 2:
            raise ValueError(f"holes must lie in 0..{self.side ** 2}")


def sudoku_peers(tile_rows: int, tile_cols: int) -> List[tuple]:
    """Cell pairs ``(p, q)``, ``p < q``, sharing a row, column or box (row-major cells)."""
    s = tile_rows * tile_cols
    out = []
    for p in range(s * s):
        r1, c1 = divmod(p, s)
        for q in range(p + 1, s * s):
            r2, c2 = divmod(q, s)
            same_box = r1 // tile_rows == r2 // tile_rows and c1 // tile_cols == c2 // tile_cols
            if r1 == r2 or c1 == c2 or same_box:
                out.append((p, q))
    return out


def sudoku_instance(tile_rows: int, tile_cols: int, grid: List[int]) -> Instance:
    """Binary encoding of a partially filled grid; 0 marks an empty cell."""
    s = tile_rows * tile_cols
    full = tuple(range(1, s + 1))
    domains = [full if v == 0 else (v,) for v in grid]
    return Instance(domains, [not_equal(p, q, domains) for p, q in sudoku_peers(tile_rows, tile_cols)])


def _random_order(rng: random.Random):
    def orderer(store, var, N):
        values = store.values(var)
        rng.shuffle(values)
        return values, None, 0

    return orderer


def complete_grid(tile_rows: int, tile_cols: int, rng: random.Random, attempts: int = 8, node_limit: int = 200_000) -> List[int]:
    """A random full grid, built with the MAC solver and shuffled value order."""
    s = tile_rows * tile_cols
    empty = sudoku_instance(tile_rows, tile_cols, [0] * (s * s))
    for _ in range(attempts):
        solution, stats = search(
            empty, RunConfig("lex", timeout=float("inf"), node_limit=node_limit), orderer=_random_order(random.Random(rng.getrandbits(64)))
        )
        if solution is not None:
            return [a + 1 for _, a in sorted(solution.items())]
    raise GenerationError(f"no complete {s}x{s} grid after {attempts} attempts")


def generate_generalized_sudoku(params: SudokuParams) -> Instance:
    """Punch ``holes`` uniformly chosen cells out of a random complete grid."""
    params.validate()
    rng = random.Random(params.seed)
    grid = complete_grid(params.tile_rows, params.tile_cols, rng)
    for cell in rng.sample(range(params.side ** 2), params.holes):
        grid[cell] = 0
    return sudoku_instance(params.tile_rows, params.tile_cols, grid)
