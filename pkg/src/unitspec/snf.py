"""Integer Smith normal form and finitely generated abelian groups.

Boundary matrices coming out of nerves and bar constructions are large,
sparse and almost entirely made of +-1 entries.  ``sparse_invariants`` first
eliminates every unit pivot it can find (Markowitz-style, smallest row
first) and only hands the leftover non-unit block to the dense algorithm.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Mapping


@dataclass(frozen=True, order=True)
class AbelianGroup:
    """Z^rank plus cyclic torsion summands, invariant factors ascending."""

    rank: int = 0
    torsion: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        tors = tuple(sorted(t for t in self.torsion if t != 1))
        if any(t <= 0 for t in tors):
            raise ValueError(f"bad torsion coefficients {self.torsion}")
        object.__setattr__(self, "torsion", _to_invariant_factors(tors))

    @classmethod
    def cyclic(cls, n: int) -> "AbelianGroup":
        if n == 0:
            return cls(1)
        return cls(0, (n,))

    @classmethod
    def from_strings(cls, parts: Iterable[str]) -> "AbelianGroup":
        rank, tors = 0, []
        for p in parts:
            if p == "Z":
                rank += 1
            elif p.startswith("Z/"):
                tors.append(int(p[2:]))
            elif p != "0":
                raise ValueError(f"cannot parse group summand {p!r}")
        return cls(rank, tuple(tors))

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def order(self) -> int | None:
        if self.rank:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def to_strings(self) -> list[str]:
        return ["Z"] * self.rank + [f"Z/{t}" for t in self.torsion]

    def __str__(self) -> str:
        parts = self.to_strings()
        return " + ".join(parts) if parts else "0"

    def __add__(self, other: "AbelianGroup") -> "AbelianGroup":
        return AbelianGroup(self.rank + other.rank, self.torsion + other.torsion)


def _to_invariant_factors(tors: tuple[int, ...]) -> tuple[int, ...]:
    """Normalise arbitrary cyclic orders to the d1 | d2 | ... form."""
    if not tors:
        return ()
    prime_powers: dict[int, list[int]] = {}
    for t in tors:
        for p, e in _factor(t).items():
            prime_powers.setdefault(p, []).append(p**e)
    length = max(len(v) for v in prime_powers.values())
    factors = [1] * length
    for p, powers in prime_powers.items():
        powers.sort(reverse=True)
        for i, q in enumerate(powers):
            factors[length - 1 - i] *= q
    return tuple(f for f in factors if f != 1)


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def smith_diagonal(rows: list[list[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form of a dense matrix."""
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    diag: list[int] = []
    t = 0
    while t < min(m, n):
        # pick the smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        ri, rt = a[i], a[t]
                        for j in range(t, n):
                            ri[j] -= q * rt[j]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        for row in a[t:]:
                            row[j] -= q * row[t]
                    if a[t][j]:
                        for row in a:
                            row[t], row[j] = row[j], row[t]
                        dirty = True
                        break
            if dirty:
                continue
            # pivot now isolated; enforce divisibility of the rest
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            rb, rt = a[bad], a[t]
            for j in range(t, n):
                rt[j] += rb[j]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


class SparseIntMatrix:
    """Column-major sparse integer matrix used for boundary operators."""

    def __init__(self, nrows: int, columns: Iterable[Mapping[int, int]]):
        self.nrows = nrows
        self.cols: list[dict[int, int]] = [{r: v for r, v in c.items() if v} for c in columns]

    @property
    def ncols(self) -> int:
        return len(self.cols)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                out[i][j] = v
        return out


def sparse_invariants(mat: SparseIntMatrix) -> tuple[int, list[int]]:
    """Return ``(rank, invariant factors > 1)`` of a sparse integer matrix."""
    cols = {j: dict(c) for j, c in enumerate(mat.cols) if c}
    rows: dict[int, set[int]] = {}
    for j, c in cols.items():
        for i in c:
            rows.setdefault(i, set()).add(j)
    rank = 0
    progress = True
    while progress:
        progress = False
        for j in sorted(cols, key=lambda k: len(cols[k])):
            col = cols.get(j)
            if not col:
                cols.pop(j, None)
                continue
            pivot = None
            for i, v in col.items():
                if v == 1 or v == -1:
                    if pivot is None or len(rows[i]) < len(rows[pivot]):
                        pivot = i
            if pivot is None:
                continue
            v = col[pivot]
            for j2 in list(rows[pivot]):
                if j2 == j:
                    continue
                c2 = cols[j2]
                f = c2[pivot] * v
                for i, w in col.items():
                    nv = c2.get(i, 0) - f * w
                    if nv:
                        if i not in c2:
                            rows[i].add(j2)
                        c2[i] = nv
                    elif i in c2:
                        del c2[i]
                        rows[i].discard(j2)
            for i in col:
                rows[i].discard(j)
            del rows[pivot]
            del cols[j]
            rank += 1
            progress = True
    leftover_cols = [c for c in cols.values() if c]
    if not leftover_cols:
        return rank, []
    row_ids = sorted({i for c in leftover_cols for i in c})
    index = {r: k for k, r in enumerate(row_ids)}
    dense = [[0] * len(leftover_cols) for _ in row_ids]
    for j, c in enumerate(leftover_cols):
        for i, v in c.items():
            dense[index[i]][j] = v
    diag = smith_diagonal(dense)
    return rank + len(diag), [d for d in diag if d > 1]


def homology_from_boundaries(dims: list[int], boundaries: list[SparseIntMatrix | None]) -> list[AbelianGroup]:
    """Homology of a chain complex.

    ``dims[k]`` is the rank of C_k and ``boundaries[k]`` the matrix of
    d_k: C_k -> C_{k-1} (``None`` or empty for k = 0).  One extra trailing
    boundary (d_{K+1}) must be supplied to get H_K right; groups are
    returned for k < len(dims) - 1 unless the complex is marked complete by
    passing ``boundaries[len(dims)] = None``.
    """
    inv = []
    for b in boundaries:
        inv.append((0, []) if b is None or b.ncols == 0 else sparse_invariants(b))
    out = []
    for k in range(len(dims)):
        rank_out = inv[k][0]
        rank_in, tors = inv[k + 1] if k + 1 < len(inv) else (0, [])
        out.append(AbelianGroup(dims[k] - rank_out - rank_in, tuple(tors)))
    return out


def integer_kernel_basis(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Basis of {v in Z^n : A v = 0} by unimodular column reduction."""
    a = [list(r) for r in rows]
    basis = [[int(i == j) for j in range(ncols)] for i in range(ncols)]  # columns of U
    cols = list(range(ncols))
    pivot_col = 0
    for r in range(len(a)):
        if pivot_col >= ncols:
            break
        while True:
            nz = [j for j in cols[pivot_col:] if a[r][j]]
            if len(nz) <= 1:
                break
            j0 = min(nz, key=lambda j: abs(a[r][j]))
            for j in nz:
                if j == j0:
                    continue
                q = a[r][j] // a[r][j0]
                for row in a:
                    row[j] -= q * row[j0]
                for k in range(ncols):
                    basis[k][j] -= q * basis[k][j0]
        nz = [j for j in cols[pivot_col:] if a[r][j]]
        if nz:
            j0 = nz[0]
            idx = cols.index(j0)
            cols[pivot_col], cols[idx] = cols[idx], cols[pivot_col]
            pivot_col += 1
    return [[basis[k][j] for k in range(ncols)] for j in cols[pivot_col:]]


def rank_mod_p(rows: list[list[int]], p: int) -> int:
    a = [[v % p for v in r] for r in rows]
    rank = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][c], -1, p)
        a[rank] = [v * inv % p for v in a[rank]]
        for i in range(len(a)):
            if i != rank and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = gcd(g, v)
    return g


def group_from_torsion_counts(order: int, torsion_count) -> AbelianGroup:
    """Finite abelian group from ``torsion_count(d) = #{g : d g = 0}``.

    The number of cyclic p-primary summands of order >= p^j is
    log_p(|G[p^j]| / |G[p^(j-1)]|).
    """
    summands: list[int] = []
    for p, e in _factor(order).items():
        prev = 1
        at_least = []
        for j in range(1, e + 1):
            cur = torsion_count(p**j)
            ratio = cur // prev
            r = 0
            while ratio > 1:
                ratio //= p
                r += 1
            at_least.append(r)
            prev = cur
        for j in range(1, e + 1):
            exact = at_least[j - 1] - (at_least[j] if j < e else 0)
            summands.extend([p**j] * exact)
    return AbelianGroup(0, tuple(summands))
