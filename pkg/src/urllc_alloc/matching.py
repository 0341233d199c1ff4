# Maximum-weight bipartite matching with a deterministic tie-break: among all
# maximum-weight matchings, the lexicographically smallest sorted pair list is
# returned, so repeated runs (and reimplementations) agree bit-for-bit.
#
# Phase 1 solves the assignment relaxation (rows = left nodes, non-edges as
# zero-cost cells meaning "unmatched") by shortest augmenting paths with
# integer potentials.  Phase 2 walks the equality subgraph certified by the
# potentials: a cell can appear in an optimal solution iff it is tight, and a
# tight all-rows assignment is optimal iff every negative-potential column
# stays covered.  Pairs are then fixed greedily in lexicographic order, with
# feasibility checked by alternating-path reroutes (rolled back on failure).

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["BipartiteGraph", "Matching", "max_weight_matching"]

_INF = np.int64(2**62)


@dataclass(frozen=True)
class BipartiteGraph:
    """Weighted bipartite graph: edges are (left, right, weight >= 1) triples."""

    n_left: int
    n_right: int
    edges: list = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for l, r, w in self.edges:
            if not (0 <= l < self.n_left and 0 <= r < self.n_right):
                raise ValueError(f"edge ({l},{r}) out of range")
            if not isinstance(w, (int, np.integer)):
                raise ValueError(f"edge ({l},{r}) weight {w!r} is not an integer")
            if w < 1:
                raise ValueError(f"edge ({l},{r}) weight {w} must be >= 1")
            if (l, r) in seen:
                raise ValueError(f"duplicate edge ({l},{r})")
            seen.add((l, r))


@dataclass(frozen=True)
class Matching:
    """Pairs (left, right), sorted by left index; total_weight is their sum."""

    pairs: list
    total_weight: int


def _solve_assignment(cost: np.ndarray):
    """Min-cost assignment of every row to a distinct column (rows <= cols).

    Shortest-augmenting-path method with integer potentials u, v; dual updates
    are applied once per augmentation from the final Dijkstra distances.  On
    return: u[i] + v[j] <= cost[i, j] everywhere, with equality on assigned
    cells; v <= 0; and v[j] == 0 for every unassigned column.
    """
    n, m = cost.shape
    u = np.zeros(n, dtype=np.int64)
    v = np.zeros(m, dtype=np.int64)
    row_of_col = np.full(m, -1, dtype=np.int64)
    col_of_row = np.full(n, -1, dtype=np.int64)
    for cur_row in range(n):
        # fast path: the nearest column is free (equals the general loop's
        # first pop, so results and duals are bit-identical); a row's own
        # potential is still zero when it is inserted
        reduced0 = cost[cur_row, :] - v
        j0 = int(np.argmin(reduced0))
        if row_of_col[j0] == -1:
            u[cur_row] += int(reduced0[j0])
            row_of_col[j0] = cur_row
            col_of_row[cur_row] = j0
            continue
        # dist holds tentative distances with scanned columns pinned at INF
        # (their final value is captured at pop time), so each pop is a plain
        # argmin and relaxation needs no boolean-indexed scatters.  The fast
        # path above already did the root relaxation and first pop.
        dist = reduced0
        pred_row = np.full(m, cur_row, dtype=np.int64)
        unscanned = np.ones(m, dtype=bool)
        min_val = int(dist[j0])
        dist[j0] = _INF
        unscanned[j0] = False
        pops = [(j0, min_val)]  # (column, final distance) in pop order
        i = int(row_of_col[j0])
        while True:
            reduced = (min_val - u[i]) + cost[i, :] - v
            upd = (reduced < dist) & unscanned
            dist = np.where(upd, reduced, dist)
            pred_row = np.where(upd, i, pred_row)
            j = int(np.argmin(dist))
            min_val = int(dist[j])
            dist[j] = _INF
            unscanned[j] = False
            pops.append((j, min_val))
            if row_of_col[j] == -1:
                sink = j
                break
            i = int(row_of_col[j])
        u[cur_row] += min_val
        for j, val in pops[:-1]:  # the sink's correction is zero
            u[row_of_col[j]] += min_val - val
            v[j] -= min_val - val
        j = sink
        while True:
            i = int(pred_row[j])
            row_of_col[j] = i
            j, col_of_row[i] = int(col_of_row[i]), j
            if i == cur_row:
                break
    return col_of_row, row_of_col, u, v


class _LexExtractor:
    """Greedy lexicographic fixing inside the equality subgraph."""

    def __init__(self, cost, col_of_row, row_of_col, u, v, edges_by_row):
        self.cost = cost
        self.col_of_row = col_of_row
        self.row_of_col = row_of_col
        self.u = u
        self.v = v
        self.edges_by_row = edges_by_row
        # tight adjacency is static: potentials never change during extraction
        self._slack = cost - u[:, None] - v[None, :]
        self.tight_cols = [np.flatnonzero(row == 0) for row in self._slack]
        self._tight_rows: dict[int, np.ndarray] = {}  # per column, on demand
        self.fixed_rows: set[int] = set()
        self.fixed_cols: set[int] = set()
        self._log: list[tuple[int, int, int, int]] = []  # (row, col, old_col, displaced_row)

    def _assign(self, row: int, col: int) -> None:
        old = int(self.col_of_row[row])
        displaced = int(self.row_of_col[col])
        self._log.append((row, col, old, displaced))
        if old != -1:
            self.row_of_col[old] = -1
        if displaced != -1:
            self.col_of_row[displaced] = -1
        self.row_of_col[col] = row
        self.col_of_row[row] = col

    def _rollback(self, mark: int) -> None:
        # LIFO replay of exact inverses restores the assignment bit-for-bit.
        while len(self._log) > mark:
            row, col, old, displaced = self._log.pop()
            self.row_of_col[col] = displaced
            if displaced != -1:
                self.col_of_row[displaced] = col
            self.col_of_row[row] = old
            if old != -1:
                self.row_of_col[old] = row

    def _rematch_row(self, row: int, visited: set) -> bool:
        """Alternating path from an unassigned row to any free column."""
        for j in self.tight_cols[row]:
            j = int(j)
            if j in visited or j in self.fixed_cols:
                continue
            visited.add(j)
            owner = int(self.row_of_col[j])
            if owner == -1 or (owner not in self.fixed_rows and self._rematch_row(owner, visited)):
                self._assign(row, j)
                return True
        return False

    def _tight_rows_of(self, col: int) -> np.ndarray:
        rows = self._tight_rows.get(col)
        if rows is None:
            rows = np.flatnonzero(self._slack[:, col] == 0)
            self._tight_rows[col] = rows
        return rows

    def _cover_col(self, col: int, visited: set) -> bool:
        """Pull a row onto an uncovered negative-potential column.

        The row vacates its own column, which is fine if that column has zero
        potential and must otherwise be covered recursively first.
        """
        for i in self._tight_rows_of(col):
            i = int(i)
            if i in visited or i in self.fixed_rows:
                continue
            visited.add(i)
            freed = int(self.col_of_row[i])
            if freed == -1 or self.v[freed] == 0 or self._cover_col(freed, visited):
                self._assign(i, col)
                return True
        return False

    def try_fix(self, row: int, col: int) -> bool:
        """Can (row, col) join the fixed pairs while staying optimal?"""
        self.fixed_rows.add(row)
        self.fixed_cols.add(col)
        if int(self.col_of_row[row]) == col:
            return True
        mark = len(self._log)
        freed = int(self.col_of_row[row])
        displaced = int(self.row_of_col[col])
        self._assign(row, col)
        ok = True
        if displaced != -1:
            ok = self._rematch_row(displaced, set())
        if ok and freed != -1 and self.v[freed] < 0 and int(self.row_of_col[freed]) == -1:
            ok = self._cover_col(freed, set())
        if not ok:
            self.fixed_rows.discard(row)
            self.fixed_cols.discard(col)
            self._rollback(mark)
        return ok

    def extract(self, n_left: int) -> list:
        pairs = []
        for l in range(n_left):
            tight = set(int(j) for j in self.tight_cols[l])
            for r, _w in self.edges_by_row.get(l, ()):
                if r in tight and r not in self.fixed_cols and self.try_fix(l, r):
                    pairs.append((l, r))
                    break
        return pairs


def max_weight_matching(g: BipartiteGraph) -> Matching:
    """Maximum-weight matching; ties broken toward the lexicographically
    smallest sorted pair list, so the result is a pure function of the graph.
    """
    if not g.edges:
        return Matching(pairs=[], total_weight=0)
    n = g.n_left
    m = max(g.n_right, g.n_left)  # pad columns so every row can be placed
    cost = np.zeros((n, m), dtype=np.int64)
    edges_by_row: dict[int, list] = {}
    weight_of: dict[tuple, int] = {}
    for l, r, w in g.edges:
        cost[l, r] = -int(w)  # maximize weight = minimize negated cost
        edges_by_row.setdefault(l, []).append((r, int(w)))
        weight_of[(l, r)] = int(w)
    for lst in edges_by_row.values():
        lst.sort()
    col_of_row, row_of_col, u, v = _solve_assignment(cost)
    extractor = _LexExtractor(cost, col_of_row, row_of_col, u, v, edges_by_row)
    pairs = extractor.extract(n)
    total = sum(weight_of[p] for p in pairs)
    return Matching(pairs=pairs, total_weight=total)
