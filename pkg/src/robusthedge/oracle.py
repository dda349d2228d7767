"""Brute-force ground truth: all vertices of the martingale polytope.

Deliberately independent of the simplex kernel so it can cross-check it:
the equality system (normalization, per-node martingale rows, option rows)
is solved by plain Gaussian elimination on every candidate support of size
rank, keeping the nonnegative basic solutions. Exponential by design; the
leaf cap keeps it at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .arbitrage import martingale_rows
from .model import Claim, Measure, PathMeasure, ScenarioTree, StaticOption
from .polar import SupportMask

F = Fraction


class InstanceTooLarge(Exception):
    pass


class EmptyPolytope(Exception):
    """No martingale measure fits: local arbitrage or inconsistent quotes."""


@dataclass(frozen=True)
class MartingalePolytope:
    ambient: tuple[str, ...]  # relevant leaves, document order
    equalities: tuple[tuple[tuple[Fraction, ...], Fraction], ...]  # (row, rhs)
    vertices: tuple[PathMeasure, ...]


def enumerate_vertices(
    tree: ScenarioTree,
    mask: SupportMask,
    options: tuple[StaticOption, ...] | list[StaticOption],
    cap: int = 16,
) -> MartingalePolytope:
    """All basic feasible solutions of the martingale equality system.

    Candidate supports are the column subsets of size rank(E); each square
    solve either fails (dependent columns, inconsistent data) or yields the
    unique basic solution, kept when nonnegative. Duplicates from degenerate
    bases are removed exactly.
    """
    leaves = mask.relevant_leaves
    if len(leaves) > cap:
        raise InstanceTooLarge(
            f"{len(leaves)} relevant leaves exceed the cap of {cap}"
        )
    index = {leaf: k for k, leaf in enumerate(leaves)}
    rows: list[tuple[tuple[Fraction, ...], Fraction]] = []
    for row, label in martingale_rows(tree, mask, tuple(options)):
        dense = [F(0)] * len(leaves)
        for leaf, a in row.items():
            dense[index[leaf]] = a
        rows.append((tuple(dense), F(1) if label == "mass" else F(0)))

    matrix = [list(r) for r, _ in rows]
    rhs = [b for _, b in rows]
    rank = _rank([list(r) for r in matrix])

    seen: set[tuple[Fraction, ...]] = set()
    for support in combinations(range(len(leaves)), min(rank, len(leaves))):
        solution = _solve_exact_columns(matrix, rhs, support)
        if solution is None:
            continue
        if any(v < 0 for v in solution):
            continue
        point = [F(0)] * len(leaves)
        for col, v in zip(support, solution):
            point[col] = v
        seen.add(tuple(point))

    ordered = sorted(
        seen,
        key=lambda pt: (
            tuple(k for k, v in enumerate(pt) if v != 0),
            pt,
        ),
    )
    vertices = tuple(
        PathMeasure({leaves[k]: v for k, v in enumerate(pt) if v != 0})
        for pt in ordered
    )
    return MartingalePolytope(
        ambient=leaves,
        equalities=tuple((tuple(r), b) for r, b in rows),
        vertices=vertices,
    )


def _rank(matrix: list[list[Fraction]]) -> int:
    rank = 0
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    row = 0
    for col in range(n):
        pivot = None
        for r in range(row, m):
            if matrix[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        matrix[row], matrix[pivot] = matrix[pivot], matrix[row]
        pv = matrix[row][col]
        for r in range(m):
            if r == row or matrix[r][col] == 0:
                continue
            factor = matrix[r][col] / pv
            for k in range(col, n):
                matrix[r][k] -= factor * matrix[row][k]
        row += 1
        rank += 1
        if row == m:
            break
    return rank


def _solve_exact_columns(matrix, rhs, support) -> list[Fraction] | None:
    """Solve E[:, support] x = rhs; None when the columns are dependent or
    the overdetermined system is inconsistent."""
    m = len(matrix)
    k = len(support)
    aug = [[matrix[r][c] for c in support] + [rhs[r]] for r in range(m)]
    row = 0
    pivots = []
    for col in range(k):
        pivot = None
        for r in range(row, m):
            if aug[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            return None  # dependent columns: not a basis
        aug[row], aug[pivot] = aug[pivot], aug[row]
        pv = aug[row][col]
        for r in range(m):
            if r == row or aug[r][col] == 0:
                continue
            factor = aug[r][col] / pv
            for c in range(col, k + 1):
                aug[r][c] -= factor * aug[row][c]
        pivots.append((row, col))
        row += 1
    for r in range(row, m):
        if aug[r][k] != 0:
            return None  # inconsistent
    solution = [F(0)] * k
    for r, c in pivots:
        solution[c] = aug[r][k] / aug[r][c]
    return solution


def one_step_vertices(
    tree: ScenarioTree, mask: SupportMask, node_id: str
) -> list[Measure]:
    """Vertices of a single node's one-step martingale simplex (weights over
    the supported children with zero mean increment), by the same square
    solves as the path-level enumeration."""
    support = mask.node_support[node_id]
    d = tree.dimension
    matrix = [[F(1)] * len(support)]
    rhs = [F(1)]
    for i in range(d):
        matrix.append([tree.increment(node_id, c)[i] for c in support])
        rhs.append(F(0))
    rank = _rank([row[:] for row in matrix])
    vertices: list[Measure] = []
    seen = set()
    for subset in combinations(range(len(support)), min(rank, len(support))):
        solution = _solve_exact_columns(matrix, rhs, subset)
        if solution is None or any(v < 0 for v in solution):
            continue
        weights = {
            support[c]: v for c, v in zip(subset, solution) if v != 0
        }
        key = tuple(sorted(weights.items()))
        if key not in seen:
            seen.add(key)
            vertices.append(Measure(weights))
    return vertices


@dataclass(frozen=True)
class BrutePrice:
    maximum: Fraction
    argmax: PathMeasure
    minimum: Fraction
    argmin: PathMeasure


def brute_price(polytope: MartingalePolytope, claim: Claim) -> BrutePrice:
    """Exact extremal expectations over the vertex list (linear objectives
    attain their extrema at vertices)."""
    if not polytope.vertices:
        raise EmptyPolytope("no martingale measure exists")
    best = None
    worst = None
    for vertex in polytope.vertices:
        value = sum((w * claim(leaf) for leaf, w in vertex.weights.items()), F(0))
        if best is None or value > best[0]:
            best = (value, vertex)
        if worst is None or value < worst[0]:
            worst = (value, vertex)
    return BrutePrice(best[0], best[1], worst[0], worst[1])
