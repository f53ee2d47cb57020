"""
Canonical model of PG(4,q): points, solids, k-subspaces, incidence.

Representations
---------------
* Projective point: 5-tuple of field elements, left-normalised so the
  first nonzero coordinate is 1.
* Solid (hyperplane): canonical covector with the same normalisation;
  point P lies in the solid with covector c iff sum_i c_i * P_i = 0.
  The canonical covectors coincide with the canonical points, so points
  and solids share one enumeration (projective duality).
* k-subspace (line k=1, plane k=2, solid k=3): (k+1) x 5 generator
  matrix in reduced row echelon form; the RREF is the unique canonical
  representative of the subspace.

Enumeration orders (frozen)
---------------------------
Points and solids are listed in ascending lexicographic order of their
canonical tuples, so (0,0,0,0,1) is index 0.  Subspace lists are in
ascending lexicographic order of the flattened RREF.  Reports, file
formats and tests reference these indices; the orders must not change.

``iter_subspaces`` streams subspaces in pivot-set generation order,
which is deterministic but unsorted.  Use it when only a multiset of
per-subspace results is needed and materialising the sorted table would
be wasteful (q=16 has ~1.8e7 planes).

All Geometry state is immutable once built; derived tables (subspace
tables, incidence masks) are computed lazily but are pure functions of
the field, so repeated or concurrent builds are harmless.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .gf import GF

__all__ = [
    "InconsistencyError",
    "Subspace",
    "Solid",
    "WHOLE_SPACE",
    "Geometry",
    "SubspaceTable",
    "gaussian_binomial",
    "enumerate_points",
    "normalize",
    "dot",
    "matvec",
    "mat_inv",
    "rref",
    "null_space",
    "span",
    "contains",
    "projective_span_points",
    "mask_from_indices",
    "indices_from_mask",
]


class InconsistencyError(RuntimeError):
    """A verification step contradicted an exact structural fact."""


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional vector subspaces of GF(q)^n."""
    if k < 0 or k > n:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def dot(field: GF, u, v) -> int:
    mul = field._mul
    acc = 0
    for a, b in zip(u, v):
        acc ^= mul[a][b]
    return acc


def matvec(field: GF, m, v) -> tuple:
    return tuple(dot(field, row, v) for row in m)


def normalize(field: GF, vec):
    """Left-normalised projective representative, or None for the zero vector."""
    for x in vec:
        if x:
            if x == 1:
                return tuple(vec)
            mul = field._mul[field._inv[x]]
            return tuple(mul[y] for y in vec)
    return None


def rref(field: GF, rows, width: int | None = None):
    """Reduced row echelon form over the field; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return (), ()
    w = len(rows[0]) if width is None else width
    mul = field._mul
    invt = field._inv
    pivots = []
    r = 0
    for c in range(w):
        k = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        mrow = mul[invt[rows[r][c]]]
        rows[r] = [mrow[x] for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                frow = mul[rows[i][c]]
                rows[i] = [x ^ frow[y] for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return tuple(tuple(row) for row in rows[:r]), tuple(pivots)


def null_space(field: GF, rows, width: int = 5):
    """
    Canonical basis of the right null space {v : rows @ v = 0}, one
    normalised vector per free column of the RREF.
    """
    red, piv = rref(field, rows, width)
    basis = []
    for f in range(width):
        if f in piv:
            continue
        v = [0] * width
        v[f] = 1
        for i, p in enumerate(piv):
            v[p] = red[i][f]  # char 2: -x = x
        basis.append(normalize(field, v))
    return tuple(basis)


def mat_inv(field: GF, m):
    """Inverse of a square matrix, or None if singular."""
    n = len(m)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(m)]
    red, piv = rref(field, aug, width=2 * n)
    if len(piv) < n or any(p >= n for p in piv):
        return None
    return tuple(tuple(row[n:]) for row in red)


@dataclass(frozen=True)
class Subspace:
    """Projective subspace of dimension dim, rows = canonical RREF generators."""

    dim: int
    rows: tuple


@dataclass(frozen=True)
class Solid:
    """A hyperplane of PG(4,q), given by its canonical covector."""

    covector: tuple


WHOLE_SPACE = Subspace(
    4,
    (
        (1, 0, 0, 0, 0),
        (0, 1, 0, 0, 0),
        (0, 0, 1, 0, 0),
        (0, 0, 0, 1, 0),
        (0, 0, 0, 0, 1),
    ),
)


def span(field: GF, pts) -> Subspace:
    """
    Canonical subspace spanned by the given vectors.  A full-rank input
    returns the WHOLE_SPACE marker rather than raising, so degenerate
    inputs cannot abort batch runs.
    """
    pts = list(pts)
    if not pts:
        raise ValueError("span of an empty point list")
    red, _ = rref(field, pts)
    if len(red) == 5:
        return WHOLE_SPACE
    return Subspace(len(red) - 1, red)


def _proj_dim(obj) -> int:
    if isinstance(obj, Subspace):
        return obj.dim
    if isinstance(obj, Solid):
        return 3
    return 0  # a point


def contains(field: GF, outer, inner) -> bool:
    """
    True iff inner (point or Subspace) lies inside outer (Solid or
    Subspace).  Requires dim(inner) < dim(outer).
    """
    if _proj_dim(inner) >= _proj_dim(outer):
        raise ValueError("inner object must have strictly smaller dimension")
    inner_rows = inner.rows if isinstance(inner, Subspace) else (tuple(inner),)
    if isinstance(outer, Solid):
        return all(dot(field, outer.covector, r) == 0 for r in inner_rows)
    rank = len(outer.rows)
    red, _ = rref(field, list(outer.rows) + list(inner_rows))
    return len(red) == rank


def projective_span_points(field: GF, rows):
    """
    All canonical points of the projective subspace spanned by the given
    independent rows: (q^k - 1)/(q - 1) of them for k rows.
    """
    rows = [tuple(r) for r in rows]
    k = len(rows)
    q = field.q
    mul = field._mul
    out = []
    for i in range(k):
        for tail in product(range(q), repeat=k - 1 - i):
            v = list(rows[i])
            for j, t in enumerate(tail):
                if t:
                    trow = mul[t]
                    rj = rows[i + 1 + j]
                    v = [a ^ trow[b] for a, b in zip(v, rj)]
            out.append(normalize(field, v))
    return out


def enumerate_points(field: GF):
    """
    Every canonical point of PG(4,q) exactly once, ascending
    lexicographic; (0,0,0,0,1) is first.
    """
    q = field.q
    pts = []
    for vec in product(range(q), repeat=5):
        for x in vec:
            if x:
                if x == 1:
                    pts.append(vec)
                break
    return tuple(pts)


def mask_from_indices(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def indices_from_mask(mask: int):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass
class SubspaceTable:
    """
    Sorted canonical table of all projective k-subspaces.

    rref       : (M, k+1, 5) uint8, canonical generator matrices in
                 ascending flattened-lex order.
    gen_points : (M, k+1) int32, point indices of the generator rows
                 (RREF rows are canonical points).
    ann_rows   : (M, 4-k, 5) uint8, normalised basis of the annihilator;
                 the subspace is the intersection of these solids.
    ann_solids : (M, 4-k) int32, solid indices of the annihilator basis.
    """

    k: int
    rref: np.ndarray
    gen_points: np.ndarray
    ann_rows: np.ndarray
    ann_solids: np.ndarray

    @property
    def size(self) -> int:
        return self.rref.shape[0]


class Geometry:
    """
    PG(4,q) with frozen enumerations and cached incidence structure.

    points[i] / solids[i] are canonical 5-tuples (the two lists coincide
    by duality); point_index maps a canonical tuple back to its index.
    """

    def __init__(self, field: GF):
        self.field = field
        q = field.q
        self.points = enumerate_points(field)
        self.n = len(self.points)
        assert self.n == q**4 + q**3 + q**2 + q + 1
        self.point_index = {p: i for i, p in enumerate(self.points)}
        self.point_array = np.array(self.points, dtype=np.uint8)
        # offset of the block of points whose first nonzero coordinate is j
        self._offsets = tuple(
            sum(q ** (4 - jj) for jj in range(j + 1, 5)) for j in range(5)
        )
        self._solid_masks: list[int] | None = None
        self._tables: dict[int, SubspaceTable] = {}
        self._subspace_lists: dict[int, tuple] = {}
        self._pencils: np.ndarray | None = None
        self._nline_partitions: dict[int, tuple] = {}

    # -- basic views --------------------------------------------------

    @property
    def solids(self):
        return self.points

    @property
    def solid_index(self):
        return self.point_index

    def num_subspaces(self, k: int) -> int:
        return gaussian_binomial(5, k + 1, self.field.q)

    # -- index arithmetic ----------------------------------------------

    def point_rank(self, p) -> int:
        return self.point_index[tuple(p)]

    def _ranks(self, arr: np.ndarray) -> np.ndarray:
        """Vectorised index of canonical vectors, shape arr.shape[:-1]."""
        q = self.field.q
        w = np.array([q**4, q**3, q**2, q, 1], dtype=np.int64)
        s = arr.astype(np.int64) @ w
        j = np.argmax(arr != 0, axis=-1)
        offs = np.array(self._offsets, dtype=np.int64)
        return offs[j] + s - np.power(q, 4 - j)

    # -- incidence kernels ---------------------------------------------

    def _dots(self, pts: np.ndarray, covs: np.ndarray) -> np.ndarray:
        """(P,5) x (S,5) -> (P,S) matrix of field dot products."""
        mt = self.field.mul_table
        acc = mt[pts[:, 0, None], covs[None, :, 0]]
        for i in range(1, 5):
            acc = acc ^ mt[pts[:, i, None], covs[None, :, i]]
        return acc

    def incidence_counts_per_point(self, solid_indices) -> np.ndarray:
        """For each point, how many of the given solids contain it."""
        idx = np.asarray(list(solid_indices), dtype=np.int64)
        out = np.zeros(self.n, dtype=np.int64)
        for lo in range(0, len(idx), 2048):
            block = self.point_array[idx[lo : lo + 2048]]
            out += (self._dots(self.point_array, block) == 0).sum(axis=1)
        return out

    def incidence_counts_per_solid(self, point_indices) -> np.ndarray:
        """For each solid, how many of the given points it contains."""
        idx = np.asarray(list(point_indices), dtype=np.int64)
        pts = self.point_array[idx]
        out = np.zeros(self.n, dtype=np.int64)
        for lo in range(0, self.n, 2048):
            block = self.point_array[lo : lo + 2048]
            out[lo : lo + block.shape[0]] = (self._dots(pts, block) == 0).sum(axis=0)
        return out

    def point_in_solid(self, point_idx: int, solid_idx: int) -> bool:
        return dot(self.field, self.points[point_idx], self.points[solid_idx]) == 0

    def solids_through_point(self, point_idx: int) -> np.ndarray:
        pt = self.point_array[point_idx : point_idx + 1]
        d = self._dots(pt, self.point_array)[0]
        return np.nonzero(d == 0)[0]

    @property
    def solid_masks(self) -> list[int]:
        """Per solid, a bitmask over point indices of its point set."""
        if self._solid_masks is None:
            masks: list[int] = []
            for lo in range(0, self.n, 1024):
                block = self.point_array[lo : lo + 1024]
                inc = self._dots(self.point_array, block) == 0
                packed = np.packbits(inc, axis=0, bitorder="little")
                for j in range(inc.shape[1]):
                    masks.append(int.from_bytes(packed[:, j].tobytes(), "little"))
            self._solid_masks = masks
        return self._solid_masks

    def family_point_masks(self, solid_indices) -> list[int]:
        """
        Per point, a bitmask over positions in the given solid sequence:
        bit j is set iff the point lies in solid_indices[j].
        """
        idx = np.asarray(list(solid_indices), dtype=np.int64)
        chunks: list[np.ndarray] = []
        for lo in range(0, len(idx), 4096):
            block = self.point_array[idx[lo : lo + 4096]]
            inc = self._dots(self.point_array, block) == 0
            # pad to a byte multiple so per-chunk bytes concatenate cleanly
            pad = (-inc.shape[1]) % 8
            if pad:
                inc = np.hstack([inc, np.zeros((self.n, pad), dtype=bool)])
            chunks.append(np.packbits(inc, axis=1, bitorder="little"))
        allbytes = np.hstack(chunks)
        return [int.from_bytes(row.tobytes(), "little") for row in allbytes]

    # -- subspace enumeration --------------------------------------------

    def _normalize_rows(self, arr: np.ndarray) -> np.ndarray:
        """Vectorised left-normalisation of nonzero row vectors (..., 5)."""
        lead_pos = np.argmax(arr != 0, axis=-1)
        lead = np.take_along_axis(arr, lead_pos[..., None], axis=-1)[..., 0]
        inv = self.field.inv_table[lead]
        return self.field.mul_table[arr, inv[..., None]]

    def subspace_table(self, k: int) -> SubspaceTable:
        """Canonical sorted table of all k-subspaces, built once."""
        if k not in (1, 2, 3):
            raise ValueError("subspace dimension must be 1, 2 or 3")
        if k in self._tables:
            return self._tables[k]
        q = self.field.q
        k1 = k + 1
        blocks = []
        ann_blocks = []
        for pivots in combinations(range(5), k1):
            free_pos = [
                (i, c)
                for i in range(k1)
                for c in range(5)
                if c not in pivots and c > pivots[i]
            ]
            nf = len(free_pos)
            count = q**nf
            arr = np.zeros((count, k1, 5), dtype=np.uint8)
            for i in range(k1):
                arr[:, i, pivots[i]] = 1
            idx = np.arange(count)
            for t, (i, c) in enumerate(free_pos):
                arr[:, i, c] = (idx // q ** (nf - 1 - t)) % q
            free_cols = [c for c in range(5) if c not in pivots]
            ann = np.zeros((count, len(free_cols), 5), dtype=np.uint8)
            for t, f in enumerate(free_cols):
                ann[:, t, f] = 1
                for i in range(k1):
                    ann[:, t, pivots[i]] = arr[:, i, f]
            blocks.append(arr)
            ann_blocks.append(ann)
        rr = np.concatenate(blocks)
        an = np.concatenate(ann_blocks)
        order = np.lexsort(rr.reshape(len(rr), 5 * k1).T[::-1])
        rr = rr[order]
        an = self._normalize_rows(an[order])
        tab = SubspaceTable(
            k=k,
            rref=rr,
            gen_points=self._ranks(rr).astype(np.int32),
            ann_rows=an,
            ann_solids=self._ranks(an).astype(np.int32),
        )
        assert tab.size == self.num_subspaces(k)
        self._tables[k] = tab
        return tab

    def iter_subspaces(self, k: int):
        """Stream every k-subspace once, in unsorted generation order."""
        q = self.field.q
        k1 = k + 1
        for pivots in combinations(range(5), k1):
            free_pos = [
                (i, c)
                for i in range(k1)
                for c in range(5)
                if c not in pivots and c > pivots[i]
            ]
            base = [[0] * 5 for _ in range(k1)]
            for i in range(k1):
                base[i][pivots[i]] = 1
            for vals in product(range(q), repeat=len(free_pos)):
                rows = [row[:] for row in base]
                for (i, c), v in zip(free_pos, vals):
                    rows[i][c] = v
                yield Subspace(k, tuple(tuple(r) for r in rows))

    def subspaces(self, k: int):
        """All k-subspaces as Subspace objects in canonical sorted order."""
        if k not in self._subspace_lists:
            tab = self.subspace_table(k)
            self._subspace_lists[k] = tuple(
                Subspace(k, tuple(tuple(int(x) for x in row) for row in m))
                for m in tab.rref
            )
        return self._subspace_lists[k]

    def plane_pencils(self) -> np.ndarray:
        """
        (M, q+1) int32: for each plane, the sorted indices of the q+1
        solids containing it.
        """
        if self._pencils is None:
            tab = self.subspace_table(2)
            q = self.field.q
            mt = self.field.mul_table
            a = tab.ann_rows[:, 0, :]
            b = tab.ann_rows[:, 1, :]
            vecs = np.empty((tab.size, q + 1, 5), dtype=np.uint8)
            vecs[:, 0] = b
            for t in range(q):
                vecs[:, 1 + t] = a ^ mt[b, t]
            members = self._ranks(self._normalize_rows(vecs))
            self._pencils = np.sort(members, axis=1).astype(np.int32)
        return self._pencils

    # -- subspace queries -------------------------------------------------

    def solids_through(self, sub: Subspace):
        """
        All solids containing the given line or plane, as Solid objects
        sorted by covector index: q^2+q+1 for a line, q+1 for a plane.
        """
        if sub.dim not in (1, 2):
            raise ValueError("expected a line or a plane")
        basis = null_space(self.field, sub.rows)
        covs = sorted(projective_span_points(self.field, basis))
        return [Solid(c) for c in covs]

    def subspace_points(self, sub: Subspace):
        """Sorted point indices of a subspace."""
        return tuple(
            sorted(self.point_index[p] for p in projective_span_points(self.field, sub.rows))
        )

    def intersection_profile(self, point_indices, k: int) -> Counter:
        """
        Histogram of |K ∩ S| over all k-subspaces S (k = 1 lines,
        k = 2 planes), for K the given point set.
        """
        kmask = mask_from_indices(point_indices)
        tab = self.subspace_table(k)
        sm = self.solid_masks
        hist: Counter = Counter()
        for row in tab.ann_solids.tolist():
            m = sm[row[0]]
            for s in row[1:]:
                m &= sm[s]
            hist[(m & kmask).bit_count()] += 1
        return hist

    def nline_partition(self, point_idx: int):
        """
        The lines through the given point, each as the sorted tuple of
        its other point indices; lines ordered by smallest member.  They
        partition the remaining points into q^3+q^2+q+1 classes of size q.
        """
        if point_idx not in self._nline_partitions:
            npt = self.points[point_idx]
            groups: dict[tuple, list[int]] = {}
            for i, p in enumerate(self.points):
                if i == point_idx:
                    continue
                key = span(self.field, (npt, p)).rows
                groups.setdefault(key, []).append(i)
            lines = sorted(tuple(sorted(g)) for g in groups.values())
            self._nline_partitions[point_idx] = tuple(lines)
        return self._nline_partitions[point_idx]

    def __repr__(self) -> str:
        return f"Geometry(q={self.field.q}, points={self.n})"
