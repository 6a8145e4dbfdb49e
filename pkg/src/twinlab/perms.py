"""Ascending partitions of random planar point sets.

A uniform point set in the square induces a uniform permutation (x-order vs
y-order).  Partitioning the points into ascending sets of size k (sets whose
x-order equals their y-order) is the same as splitting the permutation into
k-length increasing subsequences.

The constructive pipeline mirrors the geometric argument it implements:

1. classify points into a t-by-t cell grid; the two hard corners
   (bottom-right and top-left, the ones that obstruct up-right chains) carry
   staircase triangles split along the anti-diagonal x + y = side;
2. check concrete analogues of the concentration conditions the argument
   assumes, failing with the violated condition's label;
3. match every triangle point into a chain through the diagonal cells of the
   adjacent edge rectangle's (k-1) x (k-1) grid, drawing so that every grid
   diagonal stays balanced for the later matching;
4. adjust which matched points are drawn from which rectangle/cell
   intersection until every grid diagonal's unmatched count is divisible by
   k, then rebalance overfull cells with residue-neutral k-moves;
5. partition each diagonal's remaining points greedily, k cells at a time;
6. verify, and only then return.

Every failure is a typed report (:class:`PartitionInfeasible`); a returned
partition always passes :func:`verify_partition`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from twinlab.harness import derive_stream, run_trials

__all__ = [
    "Permutation",
    "PointSet",
    "PartitionParams",
    "GridGeometry",
    "AscendingPartition",
    "PartitionInfeasible",
    "random_permutation",
    "random_pointset",
    "points_to_permutation",
    "is_ascending",
    "plan_geometry",
    "ascending_partition",
    "greedy_diagonal_match",
    "verify_partition",
    "exists_partition_bruteforce",
    "partition_prefix",
    "mc_partition_success",
    "write_points_csv",
    "read_points_csv",
    "partition_to_json",
    "write_partition_svg",
]

SIDES = "ABCD"  # right, bottom, top, left edge rectangles and their triangles


class PartitionInfeasible(Exception):
    """Structured no-partition report: stage label plus detail."""

    def __init__(self, stage: str, detail: str = ""):
        super().__init__(f"{stage}: {detail}" if detail else stage)
        self.stage = stage
        self.detail = detail


@dataclass(frozen=True)
class PartitionParams:
    """Tunables of the pipeline; the grid constants default to 1.0."""

    c_t: float = 1.0
    c_w: float = 1.0
    band_sigma: float = 6.0   # claim checks pass within band_sigma * sqrt(mean)
    band_abs: float = 10.0    # ... or within this absolute slack


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x < self.x1 and self.y0 <= y < self.y1


@dataclass(frozen=True)
class GridGeometry:
    n: int
    k: int
    side: float
    t: int
    cell_side: float
    strip_width: float
    long_bounds: dict    # side -> cell-aligned bounds along the strip's long axis
    params: PartitionParams

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        c = min(int(x / self.cell_side), self.t - 1)
        r = min(int(y / self.cell_side), self.t - 1)
        return c, r

    def diag_cell_rect(self, side_name: str, a: int) -> Rect:
        """Diagonal cell a (a-th from the corner in both grid directions)."""
        k, w, s = self.k, self.strip_width, self.cell_side
        u = w / (k - 1)
        lb = self.long_bounds[side_name]
        lo, hi = lb[a] * s, lb[a + 1] * s
        if side_name == "A":
            return Rect(self.side - w + a * u, self.side - w + (a + 1) * u, lo, hi)
        if side_name == "B":
            return Rect(lo, hi, a * u, (a + 1) * u)
        if side_name == "C":
            return Rect(lo, hi, self.side - w + a * u, self.side - w + (a + 1) * u)
        if side_name == "D":
            return Rect(a * u, (a + 1) * u, lo, hi)
        raise ValueError(side_name)

    @property
    def dmax(self) -> int:
        return self.t - self.k - 1


@dataclass(frozen=True)
class PointSet:
    """n planar points with pairwise distinct x and y coordinates."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must be an (n, 2) array")
        object.__setattr__(self, "points", pts)
        if len(np.unique(pts[:, 0])) != len(pts) or len(np.unique(pts[:, 1])) != len(pts):
            raise ValueError("coordinates must be pairwise distinct in x and in y")

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class AscendingPartition:
    """Index classes of size k, each an up-right chain."""

    classes: tuple
    corner_modes: tuple = ()   # (side, mode) per corner chain, aligned with classes

    def __len__(self) -> int:
        return len(self.classes)


Permutation = np.ndarray


def random_permutation(n: int, seed: int, stream_id: int = 0) -> np.ndarray:
    """Uniform permutation of 1..n, deterministic in (seed, stream_id)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = derive_stream(seed, stream_id).generator()
    return rng.permutation(n) + 1


def random_pointset(n: int, seed: int, stream_id: int = 0) -> PointSet:
    """n i.i.d. uniform points in [0, n]^2; coordinate collisions are redrawn."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = derive_stream(seed, stream_id).generator()
    xs: list[float] = []
    ys: list[float] = []
    seen_x: set = set()
    seen_y: set = set()
    while len(xs) < n:
        x, y = rng.uniform(0.0, n, size=2)
        if x in seen_x or y in seen_y:
            continue
        xs.append(x)
        ys.append(y)
        seen_x.add(x)
        seen_y.add(y)
    return PointSet(np.column_stack([xs, ys]))


def points_to_permutation(ps: PointSet) -> np.ndarray:
    """Rank the y-coordinates in x-order: the permutation the points induce."""
    pts = ps.points
    order = np.argsort(pts[:, 0], kind="stable")
    ranks = np.empty(len(pts), dtype=np.int64)
    ranks[np.argsort(pts[order, 1], kind="stable")] = np.arange(1, len(pts) + 1)
    return ranks


def is_ascending(ps: PointSet, indices) -> bool:
    """Sorting the selected points by x gives strictly increasing y."""
    idx = list(indices)
    if len(idx) <= 1:
        return True
    pts = ps.points[idx]
    ys = pts[np.argsort(pts[:, 0]), 1]
    return bool(np.all(np.diff(ys) > 0))


def plan_geometry(n: int, k: int, params: PartitionParams | None = None,
                  side: float | None = None) -> GridGeometry:
    """Grid, staircase triangles and edge rectangles for an n-point instance.

    t = max(k + 2, round(c_t * n^(4/13))); the strip width is
    round(c_w * n^(6/13)); the strip grids' long-direction lines sit on the
    cell lines nearest to even spacing.  Raises PartitionInfeasible("geometry")
    when the strips would be degenerate or overlap.
    """
    if params is None:
        params = PartitionParams()
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 1 or n % k:
        raise ValueError("point count must be a positive multiple of k")
    if side is None:
        side = float(n)
    t = max(k + 2, round(params.c_t * n ** (4 / 13)))
    w = float(round(params.c_w * n ** (6 / 13)))
    if w < 1:
        raise PartitionInfeasible("geometry", "strip width rounds below one")
    if 2 * w > side:
        raise PartitionInfeasible("geometry", "opposite strips overlap")
    s = side / t
    if k == 1:
        return GridGeometry(n, k, side, t, s, w, {}, params)

    def near_even() -> list[int]:
        bounds = [round(j * t / (k - 1)) for j in range(k)]
        for j in range(1, k):
            bounds[j] = max(bounds[j], bounds[j - 1] + 1)
        bounds[-1] = t
        return bounds

    def decollide(first: list[int], second: list[int]) -> list[int]:
        # the residue move graph stays connected iff the two strips serving
        # one sign of diagonals never cut between the same pair of diagonals
        for j in range(1, k - 1):
            if t - first[j] == second[j]:
                nxt = second[j + 1] if j + 1 < k else t
                if second[j] + 1 < nxt:
                    second[j] += 1
                elif second[j] - 1 > second[j - 1]:
                    second[j] -= 1
        return second

    la = near_even()
    lb = decollide(la, near_even())
    lc = near_even()
    ld = decollide(lc, near_even())
    return GridGeometry(n, k, side, t, s, w,
                        {"A": la, "B": lb, "C": lc, "D": ld}, params)


def greedy_diagonal_match(cell_counts, k: int) -> list[tuple[int, ...]]:
    """Rounds of k distinct cell indices, largest counts first (ties: lowest index).

    The schedule exists iff the total is a multiple of k and no count ever
    exceeds the sum of the remaining others (equivalently k * max <= total
    throughout); on failure the offending round is reported.
    """
    counts = list(map(int, cell_counts))
    if k < 1:
        raise ValueError("k must be >= 1")
    total = sum(counts)
    if total % k:
        raise ValueError("total count must be a multiple of k")
    if any(c < 0 for c in counts):
        raise ValueError("counts must be nonnegative")
    order = list(range(len(counts)))
    rounds: list[tuple[int, ...]] = []
    step = 0
    while total:
        top = sorted(order, key=lambda i: (-counts[i], i))[:k]
        if len(top) < k or counts[top[-1]] == 0:
            raise PartitionInfeasible("greedy", f"round {step}: fewer than k nonempty cells")
        for i in top:
            counts[i] -= 1
        total -= k
        rounds.append(tuple(sorted(top)))
        step += 1
    return rounds


def verify_partition(ps: PointSet, partition: AscendingPartition, k: int) -> bool:
    """Classes cover all indices exactly once, have size k, and ascend."""
    seen: set = set()
    for cls in partition.classes:
        if len(cls) != k:
            return False
        seen.update(cls)
        if not is_ascending(ps, cls):
            return False
    return len(seen) == len(ps) and seen == set(range(len(ps)))


# -- the matching pipeline ------------------------------------------------------

class _Matcher:
    def __init__(self, ps: PointSet, k: int, geo: GridGeometry):
        self.k = k
        self.geo = geo
        pts = ps.points
        self.xs = pts[:, 0]
        self.ys = pts[:, 1]
        self.n = len(pts)
        t, side = geo.t, geo.side
        self.tri: dict = {X: [] for X in SIDES}
        self.cell_pts: dict = {}
        self.box_pts: dict = {}
        rects = {X: [geo.diag_cell_rect(X, a) for a in range(k - 1)] for X in SIDES}
        cs = np.minimum((self.xs / geo.cell_side).astype(np.int64), t - 1)
        rs = np.minimum((self.ys / geo.cell_side).astype(np.int64), t - 1)
        for i in range(self.n):
            c, r = int(cs[i]), int(rs[i])
            d = c - r
            if d >= t - k:
                self.tri["A" if self.xs[i] + self.ys[i] <= side else "B"].append(i)
                continue
            if d <= -(t - k):
                self.tri["C" if self.xs[i] + self.ys[i] <= side else "D"].append(i)
                continue
            self.cell_pts.setdefault((c, r), []).append(i)
            x, y = self.xs[i], self.ys[i]
            placed = False
            for X in SIDES:
                for a, rect in enumerate(rects[X]):
                    if rect.contains(x, y):
                        self.box_pts.setdefault((X, a, (c, r)), []).append(i)
                        placed = True
                        break
                if placed:
                    break
        self.boxes_of: dict = {}
        for key in sorted(self.box_pts):
            self.boxes_of.setdefault(key[:2], []).append(key)
        self.live = {cell: len(lst) for cell, lst in self.cell_pts.items()}
        self.diag_cells: dict = {}
        for cell in self.cell_pts:
            self.diag_cells.setdefault(cell[0] - cell[1], []).append(cell)
        for cells in self.diag_cells.values():
            cells.sort()
        self.dtot = {d: 0 for d in range(-geo.dmax, geo.dmax + 1)}
        for d, cells in self.diag_cells.items():
            self.dtot[d] = sum(self.live[c] for c in cells)
        self.init = dict(self.dtot)
        self.draws = {d: 0 for d in range(-geo.dmax, geo.dmax + 1)}
        self.drawn: dict = {}
        self.rescued: dict = {}
        self.chains: list = []

    # helpers
    def dominates(self, i: int, j: int) -> bool:
        return self.xs[i] > self.xs[j] and self.ys[i] > self.ys[j]

    def used(self, i: int) -> bool:
        return i in self.drawn or i in self.rescued

    def free_in(self, key) -> list:
        return [i for i in self.box_pts[key] if not self.used(i)]

    def slack_after(self, cell) -> int:
        d = cell[0] - cell[1]
        cells = self.diag_cells[d]
        mx = max(self.live[c] for c in cells)
        shared = sum(1 for c in cells if self.live[c] == mx) > 1
        new_max = mx if (self.live[cell] < mx or shared) else mx - 1
        return (self.dtot[d] - 1) - self.k * new_max

    def commit(self, key, i: int, cid: int) -> None:
        X, a, cell = key
        self.drawn[i] = (X, a, cell, cid)
        self.live[cell] -= 1
        self.dtot[cell[0] - cell[1]] -= 1
        self.draws[cell[0] - cell[1]] += 1

    def release(self, i: int):
        X, a, cell, cid = self.drawn.pop(i)
        self.live[cell] += 1
        self.dtot[cell[0] - cell[1]] += 1
        self.draws[cell[0] - cell[1]] -= 1
        return X, a, cell, cid

    def rescue_take(self, i: int, cid: int) -> None:
        cell = self.geo.cell_of(self.xs[i], self.ys[i])
        self.rescued[i] = cid
        self.live[cell] -= 1
        self.dtot[cell[0] - cell[1]] -= 1
        self.draws[cell[0] - cell[1]] += 1

    # claim checks (stage 2)
    def claim_checks(self) -> None:
        geo, k, n = self.geo, self.k, self.n
        p = geo.params
        t, s, side, w = geo.t, geo.cell_side, geo.side, geo.strip_width

        def band(mu: float) -> float:
            return max(p.band_sigma * math.sqrt(mu), p.band_abs)

        mu_cell = n / t ** 2
        for cell, lst in self.cell_pts.items():
            if len(lst) > mu_cell + band(mu_cell):
                raise PartitionInfeasible("claim-1", f"overfull cell {cell}")
        mu_tri = (k * (k + 1) / 4) * s * s * n / side ** 2
        for X in SIDES:
            if len(self.tri[X]) > mu_tri + band(mu_tri):
                raise PartitionInfeasible("claim-2", f"overfull corner triangle {X}")
        supply: dict = {}
        for (X, a, _cell), lst in self.box_pts.items():
            supply[(X, a)] = supply.get((X, a), 0) + len(lst)
        for X in SIDES:
            for a in range(k - 1):
                if supply.get((X, a), 0) < len(self.tri[X]):
                    raise PartitionInfeasible(
                        "claim-3", f"diagonal cell {X}{a} supply below corner demand")
        mu_box = (w / (k - 1)) * s * n / side ** 2
        for lst in self.box_pts.values():
            if len(lst) > mu_box + band(mu_box):
                raise PartitionInfeasible("claim-4", "overfull rectangle/cell intersection")
        mu_corner = w * w * n / side ** 2
        cap = mu_corner + band(mu_corner)
        br = int(np.sum((self.xs >= side - w) & (self.ys <= w)))
        tl = int(np.sum((self.xs <= w) & (self.ys >= side - w)))
        if br > cap or tl > cap:
            raise PartitionInfeasible("claim-5", f"hard corners hold {br}/{tl} points")

    # stage 3
    def pick_slot(self, X: str, a: int, lo_pt: int | None, hi_pt: int | None):
        best = None
        for key in self.boxes_of.get((X, a), []):
            frees = self.free_in(key)
            cand = None
            for i in sorted(frees, key=lambda i: (self.xs[i] + self.ys[i], i)):
                if lo_pt is not None and not self.dominates(i, lo_pt):
                    continue
                if hi_pt is not None and not self.dominates(hi_pt, i):
                    continue
                cand = i
                break
            if cand is None:
                continue
            cell = key[2]
            slack = self.slack_after(cell)
            danger = 0 if slack >= self.k else (1 if slack >= 0 else 2)
            is_max = self.live[cell] == max(self.live[c]
                                            for c in self.diag_cells[cell[0] - cell[1]])
            score = (danger, -len(frees), 0 if is_max else 1,
                     abs(cell[0] - cell[1]), cell)
            if best is None or score < best[0]:
                best = (score, key, cand)
        return best

    def _insertion_order(self, X: str) -> list[int]:
        if X in ("A", "C"):
            return list(range(self.k))
        return list(range(self.k - 1, -1, -1))

    def try_grid_chain(self, X: str, q: int, cid: int):
        """Chain through the side's diagonal cells with q inserted at position j.

        The preferred j puts the triangle point at the chain's extreme end;
        other positions only matter for points that fall inside the strip.
        """
        for j in self._insertion_order(X):
            slots: dict = {}
            ok = True
            prev: int | None = None
            for a in range(j):
                hi = q if a == j - 1 else None
                got = self.pick_slot(X, a, prev, hi)
                if got is None:
                    ok = False
                    break
                _, key, i = got
                slots[a] = (key, i)
                self.commit(key, i, cid)
                prev = i
            if ok:
                for a in range(j, self.k - 1):
                    got = self.pick_slot(X, a, q if a == j else None, None)
                    if got is None:
                        ok = False
                        break
                    _, key, i = got
                    slots[a] = (key, i)
                    self.commit(key, i, cid)
            if ok:
                mode = "extreme" if j in (0, self.k - 1) else "inserted"
                return slots, mode
            for key, i in slots.values():
                self.release(i)
        return None

    def try_rescue(self, q: int, cid: int):
        """Ascending chain through q from the free population (corner stragglers)."""
        for direction in ("up", "down"):
            chain: list[int] = []
            cur = q
            ok = True
            for _ in range(self.k - 1):
                best = None
                for cell in sorted(self.cell_pts):
                    for i in self.cell_pts[cell]:
                        if self.used(i) or i in chain:
                            continue
                        if direction == "up" and self.dominates(i, cur):
                            cand = (self.xs[i] + self.ys[i], i)
                        elif direction == "down" and self.dominates(cur, i):
                            cand = (-(self.xs[i] + self.ys[i]), i)
                        else:
                            continue
                        if best is None or cand < best:
                            best = cand
                if best is None:
                    ok = False
                    break
                cur = best[1]
                chain.append(cur)
            if ok:
                for i in chain:
                    self.rescue_take(i, cid)
                return chain
        return None

    def corner_match(self) -> None:
        for X in SIDES:
            if not self.tri[X]:
                continue
            up = X in ("A", "C")
            order = sorted(self.tri[X],
                           key=lambda i: (self.xs[i] + self.ys[i], i), reverse=up)
            for q in order:
                cid = len(self.chains)
                got = self.try_grid_chain(X, q, cid)
                if got is not None:
                    slots, mode = got
                    self.chains.append({"side": X, "q": q, "slots": slots, "mode": mode})
                    continue
                chain = self.try_rescue(q, cid)
                if chain is not None:
                    self.chains.append({"side": X, "q": q, "rescue": chain,
                                        "mode": "rescue"})
                    continue
                raise PartitionInfeasible(
                    "corner-match", f"no chain for corner point {q} of triangle {X}")

    # stage 4
    def _fits(self, ch: dict, a: int, i: int, exclude: int) -> bool:
        members = [(-1, ch["q"])] + [(b, pt) for b, (_key, pt) in ch["slots"].items()
                                     if pt != exclude and b != a]
        members.append((a, i))
        members.sort(key=lambda e: self.xs[e[1]])
        last_slot = -1
        for tag, _pt in members:
            if tag == -1:
                continue
            if tag < last_slot:
                return False
            last_slot = tag
        ys = [self.ys[pt] for _tag, pt in members]
        return all(ys[j] < ys[j + 1] for j in range(len(ys) - 1))

    def _reassign(self, a: int, j: int, i: int, key_i) -> bool:
        """Move draw j's chain onto free point i, directly or rotated through
        one other chain of the same tall cell."""
        X = key_i[0]
        cid = self.drawn[j][3]
        ch = self.chains[cid]
        if self._fits(ch, a, i, exclude=j):
            self.release(j)
            self.commit(key_i, i, cid)
            ch["slots"][a] = (key_i, i)
            return True
        for cid2, ch2 in enumerate(self.chains):
            if cid2 == cid or ch2.get("side") != X or "slots" not in ch2:
                continue
            if a not in ch2["slots"]:
                continue
            key2, j2 = ch2["slots"][a]
            if not self._fits(ch2, a, i, exclude=j2):
                continue
            if not self._fits(ch, a, j2, exclude=j):
                continue
            self.release(j2)
            self.release(j)
            self.commit(key_i, i, cid2)
            ch2["slots"][a] = (key_i, i)
            self.commit(key2, j2, cid)
            ch["slots"][a] = (key2, j2)
            return True
        return False

    def _one_move(self, d: int, push: bool) -> bool:
        """push: replace a draw on diagonal d by one closer to the center;
        pull: the reverse.  Both preserve every chain's validity."""
        keys_d = sorted(key for key in self.box_pts if key[2][0] - key[2][1] == d)
        for key in keys_d:
            X, a, cell = key
            inner = [k2 for k2 in self.boxes_of[(X, a)]
                     if abs(k2[2][0] - k2[2][1]) < abs(d)]
            if push:
                inner.sort(key=lambda kk: (-len(self.free_in(kk)), kk[2]))
                mine = [j for j in self.box_pts[key]
                        if j in self.drawn and self.drawn[j][:3] == (X, a, cell)]
                for j in mine:
                    for k2 in inner:
                        for i in sorted(self.free_in(k2)):
                            if self._reassign(a, j, i, k2):
                                return True
            else:
                frees = self.free_in(key)
                if not frees:
                    continue
                inner.sort(key=lambda kk: -abs(kk[2][0] - kk[2][1]))
                for k2 in inner:
                    for j in list(self.box_pts[k2]):
                        if j not in self.drawn or self.drawn[j][:3] != (X, a, k2[2]):
                            continue
                        for i in sorted(frees):
                            if self._reassign(a, j, i, key):
                                return True
        return False

    def residue_fix(self) -> None:
        """Make every diagonal's unmatched count divisible by k.

        Diagonals are processed from the corners inward; each is fixed by
        moving draws against diagonals closer to the center, so the final
        (central) one comes out right by conservation of the total.
        """
        k = self.k
        dmax = self.geo.dmax
        for d in sorted(range(-dmax, dmax + 1), key=lambda d: (-abs(d), -d)):
            may_push = True
            while (self.draws[d] - self.init[d]) % k:
                if may_push and self._one_move(d, push=True):
                    continue
                may_push = False
                if not self._one_move(d, push=False):
                    raise PartitionInfeasible("residue", f"no legal move for diagonal {d}")
        for d in range(-dmax, dmax + 1):
            if (self.init[d] - self.draws[d]) % k:
                raise PartitionInfeasible("residue", f"diagonal {d} left unbalanced")
        self.rebalance()

    def rebalance(self) -> None:
        """Residue-neutral k-moves restoring k * max <= total per diagonal."""
        k = self.k
        for d in sorted(self.diag_cells, key=lambda d: (-abs(d), -d)):
            guard = 0
            while True:
                cells = self.diag_cells[d]
                mx = max(self.live[c] for c in cells)
                if k * mx <= self.dtot[d] or guard > 2 * k * len(cells):
                    break
                target = min(c for c in cells if self.live[c] == mx)
                if not (self._k_pull(d, target) or self._k_push(d)):
                    break
                guard += 1

    def _k_pull(self, d: int, target_cell) -> bool:
        """Draw k extra points out of an overfull cell, releasing k from one
        inner diagonal (the residues of both are unchanged)."""
        k = self.k
        keys = sorted(key for key in self.box_pts if key[2] == target_cell)
        for key in keys:
            X, a, _cell = key
            frees = sorted(self.free_in(key))
            if len(frees) < k:
                continue
            inner = [k2 for k2 in self.boxes_of[(X, a)]
                     if abs(k2[2][0] - k2[2][1]) < abs(d)]
            by_diag: dict = {}
            for k2 in inner:
                by_diag.setdefault(k2[2][0] - k2[2][1], []).append(k2)
            for d2 in sorted(by_diag, key=lambda dd: (abs(dd), dd)):
                cells2 = self.diag_cells[d2]
                mx2 = max(self.live[c] for c in cells2)
                if k * (mx2 + k) > self.dtot[d2] + k:
                    continue
                swaps = []
                pool = list(frees)
                for k2 in by_diag[d2]:
                    for j in self.box_pts[k2]:
                        if len(swaps) == k:
                            break
                        if j not in self.drawn or self.drawn[j][:3] != (X, a, k2[2]):
                            continue
                        cid = self.drawn[j][3]
                        pick = next((i for i in pool
                                     if self._fits(self.chains[cid], a, i, exclude=j)),
                                    None)
                        if pick is None:
                            continue
                        pool.remove(pick)
                        swaps.append((j, pick, cid))
                    if len(swaps) == k:
                        break
                if len(swaps) == k:
                    for j, i, cid in swaps:
                        self.release(j)
                        self.commit(key, i, cid)
                        self.chains[cid]["slots"][a] = (key, i)
                    return True
        return False

    def _k_push(self, d: int) -> bool:
        """Return k draws to diagonal d's thinner cells (fattening the total),
        recommitting them closer to the center."""
        k = self.k
        cells = self.diag_cells[d]
        mx = max(self.live[c] for c in cells)
        moves = []
        taken: set = set()
        planned: dict = {}
        for key in sorted(key for key in self.box_pts if key[2][0] - key[2][1] == d):
            X, a, cell = key
            if self.live[cell] + planned.get(cell, 0) >= mx:
                continue
            inner = [k2 for k2 in self.boxes_of[(X, a)]
                     if abs(k2[2][0] - k2[2][1]) < abs(d)]
            inner.sort(key=lambda kk: (-len(self.free_in(kk)), kk[2]))
            for j in self.box_pts[key]:
                if len(moves) == k:
                    break
                if j not in self.drawn or self.drawn[j][:3] != (X, a, cell):
                    continue
                cid = self.drawn[j][3]
                got = None
                for k2 in inner:
                    got = next(((k2, i) for i in self.free_in(k2)
                                if i not in taken
                                and self._fits(self.chains[cid], a, i, exclude=j)),
                               None)
                    if got:
                        break
                if got:
                    moves.append((j, got[1], cid, got[0], a))
                    taken.add(got[1])
                    planned[cell] = planned.get(cell, 0) + 1
                    if self.live[cell] + planned[cell] >= mx:
                        break
            if len(moves) == k:
                break
        if len(moves) < k:
            return False
        for j, i, cid, k2, a in moves:
            self.release(j)
            self.commit(k2, i, cid)
            self.chains[cid]["slots"][a] = (k2, i)
        return True

    # stages 5-6
    def build_classes(self) -> AscendingPartition:
        classes: list[tuple] = []
        modes: list[tuple] = []
        for ch in self.chains:
            if "rescue" in ch:
                members = [ch["q"]] + ch["rescue"]
            else:
                members = [ch["q"]] + [i for _key, i in ch["slots"].values()]
            members.sort(key=lambda i: self.xs[i])
            classes.append(tuple(members))
            modes.append((ch["side"], ch["mode"]))
        k = self.k
        dmax = self.geo.dmax
        for d in range(-dmax, dmax + 1):
            cells = self.diag_cells.get(d, [])
            queues = {cell: [i for i in sorted(self.cell_pts[cell]) if not self.used(i)]
                      for cell in cells}
            counts = [len(queues[cell]) for cell in cells]
            if sum(counts) % k:
                raise PartitionInfeasible("residue", f"diagonal {d} unbalanced at matching")
            for chosen in greedy_diagonal_match(counts, k):
                group = [queues[cells[ci]].pop(0) for ci in chosen]
                group.sort(key=lambda i: self.xs[i])
                classes.append(tuple(group))
        return AscendingPartition(tuple(classes), tuple(modes))


def ascending_partition(ps: PointSet, k: int,
                        geometry: GridGeometry | None = None,
                        params: PartitionParams | None = None) -> AscendingPartition:
    """Partition the points into ascending classes of size k, or raise
    PartitionInfeasible with the failed stage's label."""
    n = len(ps)
    if k < 1:
        raise ValueError("k must be >= 1")
    if n % k:
        raise ValueError("point count must be a multiple of k")
    if k == 1:
        return AscendingPartition(tuple((i,) for i in range(n)))
    if geometry is None:
        geometry = plan_geometry(n, k, params)
    matcher = _Matcher(ps, k, geometry)
    matcher.claim_checks()
    matcher.corner_match()
    matcher.residue_fix()
    partition = matcher.build_classes()
    if not verify_partition(ps, partition, k):
        raise AssertionError("internal verification failed on a built partition")
    return partition


def partition_prefix(ps: PointSet, k: int,
                     params: PartitionParams | None = None) -> AscendingPartition:
    """Partition the first k * floor(n/k) points in x-order (indices preserved)."""
    n = len(ps)
    keep = n - n % k
    if keep == n:
        return ascending_partition(ps, k, params=params)
    order = np.argsort(ps.points[:, 0], kind="stable")
    kept = np.sort(order[:keep])
    sub = PointSet(ps.points[kept])
    geometry = plan_geometry(keep, k, params, side=float(n))
    part = ascending_partition(sub, k, geometry)
    classes = tuple(tuple(int(kept[i]) for i in cls) for cls in part.classes)
    return AscendingPartition(classes, part.corner_modes)


def exists_partition_bruteforce(perm, k: int, require_increasing: bool) -> bool:
    """Whether the permutation splits into same-length-k subsequences that are
    all increasing, or all mutually order-isomorphic.  Exponential backtracking,
    intended for n <= ~16."""
    values = list(perm)
    n = len(values)
    if k < 1 or n % k:
        raise ValueError("length must be a positive multiple of k")
    r = n // k
    if n == 0:
        return True
    classes: list[list[int]] = [[] for _ in range(r)]
    pattern: dict = {}

    def rank(prefix: list[int], v: int) -> int:
        return sum(1 for u in prefix if u < v)

    def place(pos: int) -> bool:
        if pos == n:
            return True
        v = values[pos]
        opened_new = False
        for c in classes:
            if len(c) == k:
                continue
            if not c and opened_new:
                continue  # empty classes are interchangeable
            if not c:
                opened_new = True
            if require_increasing:
                if c and c[-1] > v:
                    continue
            else:
                j = len(c)
                rk = rank(c, v)
                committed = pattern.get(j)
                if committed is not None and committed != rk:
                    continue
            c.append(v)
            fresh = not require_increasing and pattern.get(len(c) - 1) is None
            if fresh:
                pattern[len(c) - 1] = rank(c[:-1], v)
            if place(pos + 1):
                return True
            c.pop()
            if fresh:
                del pattern[len(c)]
        return False

    return place(0)


def mc_partition_success(k: int, r_values, trials: int, seed: int,
                         params: PartitionParams | None = None,
                         threads: int | None = None) -> dict:
    """Empirical success rates of ascending_partition per multiplicity r.

    Every reported success has passed verify_partition; failures are counted
    by stage label.
    """
    results: dict = {}
    for ri, r in enumerate(r_values):
        n = r * k
        geometry = plan_geometry(n, k, params)

        def worker(i: int, *, _n=n, _geo=geometry, _base=ri * trials):
            ps = random_pointset(_n, seed, stream_id=_base + i)
            try:
                part = ascending_partition(ps, k, _geo)
            except PartitionInfeasible as exc:
                return exc.stage
            if not verify_partition(ps, part, k):
                raise AssertionError("unverified partition escaped")
            return None

        outcomes = run_trials(trials, worker, threads)
        fails: dict = {}
        for out in outcomes:
            if out is not None:
                fails[out] = fails.get(out, 0) + 1
        results[r] = {
            "trials": trials,
            "successes": sum(1 for o in outcomes if o is None),
            "rate": sum(1 for o in outcomes if o is None) / trials,
            "failures": fails,
        }
    return results


# -- serialization -----------------------------------------------------------------

def write_points_csv(path: str, ps: PointSet) -> None:
    with open(path, "w") as fh:
        fh.write("x,y\n")
        for x, y in ps.points:
            fh.write(f"{float(x)!r},{float(y)!r}\n")


def read_points_csv(path: str) -> PointSet:
    pts = []
    with open(path) as fh:
        header = fh.readline()
        if header.strip() != "x,y":
            raise ValueError("point files start with an `x,y` header")
        for line in fh:
            line = line.strip()
            if line:
                x, y = line.split(",")
                pts.append((float(x), float(y)))
    return PointSet(np.array(pts))


def partition_to_json(partition: AscendingPartition) -> str:
    import json

    return json.dumps([list(map(int, cls)) for cls in partition.classes]) + "\n"


_PALETTE = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02",
            "#a6761d", "#666666"]


def write_partition_svg(path: str, ps: PointSet, geometry: GridGeometry,
                        partition: AscendingPartition | None = None,
                        size: float = 640.0) -> None:
    """Debug drawing: grid, corner triangles, edge rectangles, classes."""
    side = geometry.side
    sc = size / side

    def pt(x, y):
        return f"{x * sc:.2f},{(side - y) * sc:.2f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" '
           f'height="{size:.0f}" viewBox="0 0 {size:.0f} {size:.0f}">']
    out.append(f'<rect width="{size:.0f}" height="{size:.0f}" fill="white"/>')
    w = geometry.strip_width
    for name, rect in (("A", (side - w, side, 0, side)), ("B", (0, side, 0, w)),
                       ("C", (0, side, side - w, side)), ("D", (0, w, 0, side))):
        x0, x1, y0, y1 = rect
        out.append(f'<rect x="{x0 * sc:.2f}" y="{(side - y1) * sc:.2f}" '
                   f'width="{(x1 - x0) * sc:.2f}" height="{(y1 - y0) * sc:.2f}" '
                   f'fill="#9ecae1" fill-opacity="0.25"/>')
    if geometry.k >= 2:
        for X in SIDES:
            for a in range(geometry.k - 1):
                r = geometry.diag_cell_rect(X, a)
                out.append(f'<rect x="{r.x0 * sc:.2f}" y="{(side - r.y1) * sc:.2f}" '
                           f'width="{(r.x1 - r.x0) * sc:.2f}" '
                           f'height="{(r.y1 - r.y0) * sc:.2f}" '
                           f'fill="#3182bd" fill-opacity="0.25"/>')
    t, s = geometry.t, geometry.cell_side
    k = geometry.k
    for c in range(t):
        for rr in range(t):
            if abs(c - rr) >= t - k:
                x0, y0 = c * s, rr * s
                out.append(f'<rect x="{x0 * sc:.2f}" y="{(side - y0 - s) * sc:.2f}" '
                           f'width="{s * sc:.2f}" height="{s * sc:.2f}" '
                           f'fill="#fdae6b" fill-opacity="0.4"/>')
    for i in range(t + 1):
        g = i * s * sc
        out.append(f'<line x1="{g:.2f}" y1="0" x2="{g:.2f}" y2="{size:.0f}" '
                   f'stroke="#cccccc" stroke-width="0.5"/>')
        out.append(f'<line x1="0" y1="{g:.2f}" x2="{size:.0f}" y2="{g:.2f}" '
                   f'stroke="#cccccc" stroke-width="0.5"/>')
    out.append(f'<line x1="0" y1="0" x2="{size:.0f}" y2="{size:.0f}" '
               f'stroke="#999999" stroke-width="0.75" stroke-dasharray="4 3"/>')
    if partition is not None:
        for ci, cls in enumerate(partition.classes):
            color = _PALETTE[ci % len(_PALETTE)]
            pts = sorted(cls, key=lambda i: ps.points[i, 0])
            path_d = " ".join(pt(*ps.points[i]) for i in pts)
            out.append(f'<polyline points="{path_d}" fill="none" stroke="{color}" '
                       f'stroke-width="1"/>')
            for i in pts:
                x, y = ps.points[i]
                out.append(f'<circle cx="{x * sc:.2f}" cy="{(side - y) * sc:.2f}" '
                           f'r="2" fill="{color}"/>')
    else:
        for x, y in ps.points:
            out.append(f'<circle cx="{x * sc:.2f}" cy="{(side - y) * sc:.2f}" '
                       f'r="2" fill="#333333"/>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
