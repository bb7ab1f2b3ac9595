"""Finite simplicial sets with explicit face and degeneracy tables.

A :class:`FinSSet` stores every simplex (degenerate ones included) in
degrees ``0..dim_top``.  Two flavours exist:

* ``complete=True``: there are no nondegenerate simplices above
  ``dim_top``, so higher simplices are implicit degeneracies and
  :meth:`FinSSet.extend` can materialise them on demand.
* ``complete=False``: the set is a truncation of something larger (a nerve,
  a bar construction) and nothing is known above ``dim_top``.

Homology is computed from the normalized chain complex; see
:class:`ChainData`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import IdentityViolation, InsufficientDimension
from .snf import AbelianGroup, SparseIntMatrix, sparse_invariants

Key = Hashable


def _idx(a) -> np.ndarray:
    return np.asarray(a, dtype=np.int64)


# --------------------------------------------------------------------------
# monotone maps [m] -> [k] encoded as tuples of length m+1


def surjections(m: int, p: int) -> list[tuple[int, ...]]:
    """Monotone surjections [m] -> [p] in lexicographic order."""
    out = []
    for jumps in itertools.combinations(range(1, m + 1), p):
        vals, cur, js = [], 0, set(jumps)
        for t in range(m + 1):
            if t in js:
                cur += 1
            vals.append(cur)
        out.append(tuple(vals))
    return out


def _split_monotone(sigma: Sequence[int], k: int) -> tuple[list[int], tuple[int, ...]]:
    """Factor sigma: [m] -> [k] as (injection missing ``missing``) o surjection."""
    image = sorted(set(sigma))
    missing = [j for j in range(k + 1) if j not in set(image)]
    pos = {v: i for i, v in enumerate(image)}
    return missing, tuple(pos[v] for v in sigma)


class FinSSet:
    """Finite (possibly truncated) simplicial set."""

    def __init__(
        self,
        counts: Sequence[int],
        faces: Sequence[np.ndarray | None],
        degens: Sequence[np.ndarray],
        complete: bool = True,
        keys: Sequence[Sequence[Key]] | None = None,
        validate: bool = False,
    ):
        self.counts = tuple(int(c) for c in counts)
        self.dim_top = len(self.counts) - 1
        self.faces = [None] + [_idx(f) for f in faces[1:]]
        self.degens = [_idx(s) for s in degens]
        self.complete = complete
        self.keys = keys
        self._nondeg: list[np.ndarray] | None = None
        self._canon = None
        self._key_index: list[dict] | None = None
        for k in range(1, self.dim_top + 1):
            if self.faces[k].shape != (k + 1, self.counts[k]):
                raise ValueError(f"face table in degree {k} has shape {self.faces[k].shape}")
        if len(self.degens) != self.dim_top:
            raise ValueError("need degeneracy tables for degrees 0..dim_top-1")
        for k in range(self.dim_top):
            if self.degens[k].shape != (k + 1, self.counts[k]):
                raise ValueError(f"degeneracy table in degree {k} has shape {self.degens[k].shape}")
        if validate:
            self.check_identities()

    # ---------------------------------------------------------------- builders
    @classmethod
    def from_keys(
        cls,
        levels: Sequence[Sequence[Key]],
        face: Callable[[int, int, Key], Key],
        degen: Callable[[int, int, Key], Key],
        complete: bool = True,
        validate: bool = False,
    ) -> "FinSSet":
        """Build tables from hashable simplex keys and face/degeneracy rules.

        ``face(k, i, key)`` returns the key of d_i of a k-simplex, and
        ``degen(k, i, key)`` the key of s_i.
        """
        index = [{key: n for n, key in enumerate(lv)} for lv in levels]
        if any(len(ix) != len(lv) for ix, lv in zip(index, levels)):
            raise ValueError("duplicate simplex keys")
        top = len(levels) - 1
        faces: list[np.ndarray | None] = [None]
        degens: list[np.ndarray] = []
        for k in range(1, top + 1):
            tab = np.empty((k + 1, len(levels[k])), dtype=np.int64)
            for n, key in enumerate(levels[k]):
                for i in range(k + 1):
                    tab[i, n] = index[k - 1][face(k, i, key)]
            faces.append(tab)
        for k in range(top):
            tab = np.empty((k + 1, len(levels[k])), dtype=np.int64)
            for n, key in enumerate(levels[k]):
                for i in range(k + 1):
                    tab[i, n] = index[k + 1][degen(k, i, key)]
            degens.append(tab)
        out = cls([len(lv) for lv in levels], faces, degens, complete, keys=[list(lv) for lv in levels])
        out._key_index = index
        if validate:
            out.check_identities()
        return out

    @classmethod
    def point(cls) -> "FinSSet":
        return cls.discrete(1)

    @classmethod
    def discrete(cls, n: int) -> "FinSSet":
        return cls([n], [None], [], complete=True)

    @classmethod
    def from_complex(cls, facets: Iterable[Iterable[int]]) -> "FinSSet":
        """Simplicial set of an ordered simplicial complex.

        k-simplices are nondecreasing vertex sequences spanning a face.
        """
        faces_set: set[tuple[int, ...]] = set()
        for f in facets:
            f = tuple(sorted(set(f)))
            for r in range(1, len(f) + 1):
                faces_set.update(itertools.combinations(f, r))
        top = max(len(f) for f in faces_set) - 1
        levels: list[list[tuple[int, ...]]] = []
        for k in range(top + 1):
            lv = []
            for s in sorted(faces_set):
                lv.extend(c for c in itertools.combinations_with_replacement(s, k + 1) if set(c) == set(s))
            levels.append(sorted(lv))
        return cls.from_keys(
            levels,
            lambda k, i, key: key[:i] + key[i + 1:],
            lambda k, i, key: key[: i + 1] + key[i:],
        )

    # ---------------------------------------------------------------- queries
    def key_index(self, k: int) -> dict:
        if self.keys is None:
            raise ValueError("simplicial set carries no keys")
        if self._key_index is None:
            self._key_index = [{key: n for n, key in enumerate(lv)} for lv in self.keys]
        return self._key_index[k]

    def nondegenerate(self, k: int) -> np.ndarray:
        """Indices of nondegenerate k-simplices (sorted)."""
        if self._nondeg is None:
            out = []
            for q in range(self.dim_top + 1):
                mask = np.ones(self.counts[q], dtype=bool)
                if q > 0:
                    mask[self.degens[q - 1].ravel()] = False
                out.append(np.flatnonzero(mask))
            self._nondeg = out
        if k > self.dim_top:
            if self.complete:
                return np.empty(0, dtype=np.int64)
            raise InsufficientDimension(f"degree {k} above dim_top={self.dim_top} of a truncated set")
        return self._nondeg[k]

    def nondegenerate_counts(self) -> list[int]:
        return [len(self.nondegenerate(k)) for k in range(self.dim_top + 1)]

    def face(self, k: int, i: int, x):
        return self.faces[k][i][x]

    def degen(self, k: int, i: int, x):
        return self.degens[k][i][x]

    def vertex_of(self, k: int) -> np.ndarray:
        """Last vertex of every k-simplex."""
        v = np.arange(self.counts[0])
        for q in range(1, k + 1):
            v = v[self.faces[q][0]]
        return v

    def act(self, k: int, x: int, sigma: Sequence[int]) -> int:
        """Apply the simplicial operator of a monotone map sigma: [m] -> [k]."""
        missing, surj = _split_monotone(sigma, k)
        deg = k
        for j in reversed(missing):
            x = int(self.faces[deg][j][x])
            deg -= 1
        return self._apply_surjection(x, deg, surj)

    def _apply_surjection(self, x: int, p: int, surj: tuple[int, ...]) -> int:
        m = len(surj) - 1
        if m == p:
            return x
        t = max(t for t in range(m) if surj[t] == surj[t + 1])
        inner = surj[: t + 1] + surj[t + 2:]
        y = self._apply_surjection(x, p, inner)
        if m - 1 >= self.dim_top:
            raise InsufficientDimension(f"degree {m} not materialised (dim_top={self.dim_top})")
        return int(self.degens[m - 1][t][y])

    def canonical_forms(self) -> list[list[tuple[int, int, tuple[int, ...]]]]:
        """Eilenberg-Zilber form (z, deg z, surjection) of every simplex."""
        if self._canon is None:
            canon: list[list[tuple[int, int, tuple[int, ...]]]] = [[(x, 0, (0,)) for x in range(self.counts[0])]]
            for k in range(1, self.dim_top + 1):
                lv = []
                for x in range(self.counts[k]):
                    form = None
                    for i in range(k):
                        y = int(self.faces[k][i][x])
                        if int(self.degens[k - 1][i][y]) == x:
                            z, p, tau = canon[k - 1][y]
                            form = (z, p, tau[: i + 1] + tau[i:])
                            break
                    lv.append(form if form is not None else (x, k, tuple(range(k + 1))))
                canon.append(lv)
            self._canon = canon
        return self._canon

    # ---------------------------------------------------------------- checks
    def check_identities(self, upto: int | None = None) -> None:
        """Exhaustively verify the simplicial identities; raise on failure."""
        top = self.dim_top if upto is None else min(upto, self.dim_top)
        F, S = self.faces, self.degens
        for k in range(2, top + 1):
            for j in range(k + 1):
                for i in range(j):
                    lhs = F[k - 1][i][F[k][j]]
                    rhs = F[k - 1][j - 1][F[k][i]]
                    bad = np.flatnonzero(lhs != rhs)
                    if bad.size:
                        raise IdentityViolation(f"d_{i} d_{j} != d_{j-1} d_{i} in degree {k}", k, i, j, int(bad[0]))
        for k in range(top - 1):
            for j in range(k + 1):
                for i in range(j + 1):
                    lhs = S[k + 1][i][S[k][j]]
                    rhs = S[k + 1][j + 1][S[k][i]]
                    bad = np.flatnonzero(lhs != rhs)
                    if bad.size:
                        raise IdentityViolation(f"s_{i} s_{j} != s_{j+1} s_{i} in degree {k}", k, i, j, int(bad[0]))
        for k in range(top):
            ident = np.arange(self.counts[k])
            for j in range(k + 1):
                sj = S[k][j]
                for i in range(k + 2):
                    lhs = F[k + 1][i][sj]
                    if i < j:
                        rhs = S[k - 1][j - 1][F[k][i]]
                    elif i == j or i == j + 1:
                        rhs = ident
                    else:
                        rhs = S[k - 1][j][F[k][i - 1]]
                    bad = np.flatnonzero(lhs != rhs)
                    if bad.size:
                        raise IdentityViolation(f"d_{i} s_{j} identity fails in degree {k}", k, i, j, int(bad[0]))

    # ---------------------------------------------------------------- constructions
    def extend(self, q: int) -> "FinSSet":
        """Materialise implicit degeneracies up to degree q (complete sets only)."""
        if q <= self.dim_top:
            return self.truncate(q) if q < self.dim_top else self
        if not self.complete:
            raise InsufficientDimension(f"cannot extend a truncated set beyond dim_top={self.dim_top}")
        canon = self.canonical_forms()
        top = self.dim_top
        nd = {p: [int(z) for z in self.nondegenerate(p)] for p in range(top + 1)}
        levels: list[list[Key]] = [[("old", x) for x in range(self.counts[k])] for k in range(top + 1)]
        for m in range(top + 1, q + 1):
            levels.append([(z, p, s) for p in range(top + 1) for z in nd[p] for s in surjections(m, p)])

        def to_key(m: int, z: int, p: int, s: tuple[int, ...]) -> Key:
            if m <= top:
                return ("old", self._apply_surjection(z, p, s))
            return (z, p, s)

        def face(m, i, key):
            if m <= top:
                return ("old", int(self.faces[m][i][key[1]]))
            z, p, s = key
            t = s[:i] + s[i + 1:]
            if len(set(t)) == p + 1:
                return to_key(m - 1, z, p, t)
            j = s[i]
            t = tuple(v - 1 if v > j else v for v in t)
            z2, p2, tau = canon[p - 1][int(self.faces[p][j][z])]
            return to_key(m - 1, z2, p2, tuple(tau[v] for v in t))

        def degen(m, i, key):
            if m < top:
                return ("old", int(self.degens[m][i][key[1]]))
            if m == top:
                z, p, s = canon[m][key[1]]
            else:
                z, p, s = key
            return to_key(m + 1, z, p, s[: i + 1] + s[i:])

        return FinSSet.from_keys(levels, face, degen, complete=True)

    def truncate(self, q: int) -> "FinSSet":
        q = min(q, self.dim_top)
        keys = [list(lv) for lv in self.keys[: q + 1]] if self.keys is not None else None
        nd_above = any(len(self.nondegenerate(k)) for k in range(q + 1, self.dim_top + 1))
        return FinSSet(
            self.counts[: q + 1],
            self.faces[: q + 1],
            self.degens[:q],
            complete=self.complete and not nd_above,
            keys=keys,
        )

    def __repr__(self) -> str:
        flag = "complete" if self.complete else "truncated"
        return f"FinSSet(counts={list(self.counts)}, nondeg={self.nondegenerate_counts()}, {flag})"

    # ---------------------------------------------------------------- serialisation
    def to_json(self) -> dict[str, Any]:
        return {
            "dim_top": self.dim_top,
            "complete": self.complete,
            "simplices": [list(range(c)) for c in self.counts],
            "faces": [None] + [f.tolist() for f in self.faces[1:]],
            "degens": [s.tolist() for s in self.degens],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "FinSSet":
        counts = [len(s) for s in data["simplices"]]
        faces = [None] + [np.asarray(f, dtype=np.int64).reshape(k + 1, counts[k]) for k, f in enumerate(data["faces"]) if k > 0]
        degens = [np.asarray(s, dtype=np.int64).reshape(k + 1, counts[k]) for k, s in enumerate(data["degens"])]
        return cls(counts, faces, degens, complete=data.get("complete", True), validate=True)


@dataclass
class PointedFinSSet:
    space: FinSSet
    basepoint: int = 0

    def __post_init__(self):
        if not 0 <= self.basepoint < self.space.counts[0]:
            raise ValueError("basepoint is not a vertex")

    def base(self, k: int) -> int:
        """Index of the totally degenerate basepoint in degree k."""
        x = self.basepoint
        for q in range(k):
            x = int(self.space.degens[q][0][x])
        return x

    def base_array(self) -> list[int]:
        return [self.base(k) for k in range(self.space.dim_top + 1)]

    def extend(self, q: int) -> "PointedFinSSet":
        return PointedFinSSet(self.space.extend(q), self.basepoint)

    def to_json(self) -> dict[str, Any]:
        return {**self.space.to_json(), "basepoint": self.basepoint}


class SMap:
    """Simplicial map given by one index array per degree."""

    def __init__(self, source: FinSSet, target: FinSSet, maps: Sequence[Sequence[int]], check: bool = False):
        self.source, self.target = source, target
        self.maps = [_idx(m) for m in maps]
        if check:
            self.check()

    @property
    def dim(self) -> int:
        return len(self.maps) - 1

    @classmethod
    def identity(cls, X: FinSSet) -> "SMap":
        return cls(X, X, [np.arange(c) for c in X.counts])

    @classmethod
    def constant(cls, X: FinSSet, target: FinSSet, vertex: int = 0) -> "SMap":
        top = min(X.dim_top, target.dim_top)
        base = [vertex]
        for q in range(top):
            base.append(int(target.degens[q][0][base[-1]]))
        return cls(X, target, [np.full(X.counts[k], base[k]) for k in range(top + 1)])

    def check(self) -> None:
        X, Y = self.source, self.target
        for k, m in enumerate(self.maps):
            if m.shape != (X.counts[k],) or (m.size and (m.min() < 0 or m.max() >= Y.counts[k])):
                raise IdentityViolation(f"map table out of range in degree {k}", k)
        for k in range(1, len(self.maps)):
            for i in range(k + 1):
                bad = np.flatnonzero(self.maps[k - 1][X.faces[k][i]] != Y.faces[k][i][self.maps[k]])
                if bad.size:
                    raise IdentityViolation(f"map does not commute with d_{i} in degree {k}", k, i, -1, int(bad[0]))
        for k in range(len(self.maps) - 1):
            for i in range(k + 1):
                bad = np.flatnonzero(self.maps[k + 1][X.degens[k][i]] != Y.degens[k][i][self.maps[k]])
                if bad.size:
                    raise IdentityViolation(f"map does not commute with s_{i} in degree {k}", k, i, -1, int(bad[0]))

    def compose(self, other: "SMap") -> "SMap":
        """self o other."""
        top = min(self.dim, other.dim)
        return SMap(other.source, self.target, [self.maps[k][other.maps[k]] for k in range(top + 1)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, SMap) or self.dim != other.dim:
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.maps, other.maps))

    def extend(self, source: FinSSet, target: FinSSet) -> "SMap":
        """Re-express on extended copies of source and target."""
        canon = source.canonical_forms()
        maps = []
        for k in range(source.dim_top + 1):
            if k <= self.dim:
                maps.append(self.maps[k])
                continue
            out = np.empty(source.counts[k], dtype=np.int64)
            for x in range(source.counts[k]):
                z, p, s = canon[k][x]
                out[x] = target.act(p, int(self.maps[p][z]), s)
            maps.append(out)
        return SMap(source, target, maps)

    def chain_map(self, k_max: int) -> "ChainMap":
        """Induced map on normalized chains through degree k_max."""
        cols = []
        for k in range(k_max + 1):
            src = self.source.nondegenerate(k)
            tgt_pos = {int(y): n for n, y in enumerate(self.target.nondegenerate(k))}
            col = []
            for x in src:
                y = tgt_pos.get(int(self.maps[k][x]))
                col.append({y: 1} if y is not None else {})
            cols.append(col)
        return ChainMap(chains(self.source, k_max + 1), chains(self.target, k_max + 1), cols)


# --------------------------------------------------------------------------
# products, smash, quotients


def product(X: FinSSet, Y: FinSSet) -> FinSSet:
    """Levelwise product; complete inputs give a complete output."""
    if X.complete and Y.complete:
        top = X.dim_top + Y.dim_top
        X, Y = X.extend(top), Y.extend(top)
        complete = True
    else:
        top = min(X.dim_top, Y.dim_top)
        complete = False
    nY = [Y.counts[k] for k in range(top + 1)]
    counts = [X.counts[k] * nY[k] for k in range(top + 1)]
    faces: list[np.ndarray | None] = [None]
    degens = []
    for k in range(1, top + 1):
        fx = np.repeat(X.faces[k], nY[k], axis=1)
        fy = np.tile(Y.faces[k], (1, X.counts[k]))
        faces.append(fx * nY[k - 1] + fy)
    for k in range(top):
        sx = np.repeat(X.degens[k], nY[k], axis=1)
        sy = np.tile(Y.degens[k], (1, X.counts[k]))
        degens.append(sx * nY[k + 1] + sy)
    return FinSSet(counts, faces, degens, complete=complete)


def product_maps(X: FinSSet, Y: FinSSet, P: FinSSet) -> tuple[SMap, SMap]:
    """Projections P = product(X, Y) -> X, Y (X, Y extended as needed)."""
    top = P.dim_top
    Xe = X.extend(top) if X.complete else X
    Ye = Y.extend(top) if Y.complete else Y
    px = [np.arange(P.counts[k]) // Ye.counts[k] for k in range(top + 1)]
    py = [np.arange(P.counts[k]) % Ye.counts[k] for k in range(top + 1)]
    return SMap(P, Xe, px), SMap(P, Ye, py)


def product_map(f: SMap, g: SMap, P: FinSSet, Q: FinSSet) -> SMap:
    """f x g : P = X x Y -> Q = X' x Y' (all products from :func:`product`)."""
    top = P.dim_top
    f = f.extend(f.source.extend(top), f.target.extend(top)) if f.dim < top else f
    g = g.extend(g.source.extend(top), g.target.extend(top)) if g.dim < top else g
    maps = []
    for k in range(top + 1):
        ny, ny2 = g.source.counts[k], g.target.counts[k]
        idx = np.arange(P.counts[k])
        maps.append(f.maps[k][idx // ny] * ny2 + g.maps[k][idx % ny])
    return SMap(P, Q, maps)


def quotient(X: FinSSet, classes: Sequence[np.ndarray]) -> tuple[FinSSet, SMap]:
    """Quotient by a simplicial equivalence relation.

    ``classes[k][x]`` is any label; simplices with equal labels are
    identified.  Each class is represented by its least member and the new
    indices follow the order of those representatives.
    """
    counts, relabel = [], []
    for k in range(X.dim_top + 1):
        lab = np.asarray(classes[k])
        _, first, inv = np.unique(lab, return_index=True, return_inverse=True)
        order = np.argsort(first, kind="stable")
        rank = np.empty_like(order)
        rank[order] = np.arange(len(order))
        relabel.append(rank[inv.ravel()])
        counts.append(len(first))
    reps = [np.sort(np.unique(relabel[k], return_index=True)[1]) for k in range(X.dim_top + 1)]
    faces: list[np.ndarray | None] = [None]
    for k in range(1, X.dim_top + 1):
        faces.append(relabel[k - 1][X.faces[k][:, reps[k]]])
    degens = [relabel[k + 1][X.degens[k][:, reps[k]]] for k in range(X.dim_top)]
    Q = FinSSet(counts, faces, degens, complete=X.complete)
    return Q, SMap(X, Q, relabel)


def collapse(X: FinSSet, sub: Sequence[np.ndarray]) -> tuple[PointedFinSSet, SMap]:
    """X / A for a nonempty subcomplex A given by boolean masks per degree."""
    classes = []
    for k in range(X.dim_top + 1):
        mask = np.asarray(sub[k], dtype=bool)
        lab = np.arange(X.counts[k]) + 1
        lab[mask] = 0
        classes.append(lab)
    Q, q = quotient(X, classes)
    base = int(q.maps[0][np.flatnonzero(np.asarray(sub[0]))[0]])
    return PointedFinSSet(Q, base), q


def wedge_mask(X: PointedFinSSet, Y: PointedFinSSet, P: FinSSet) -> list[np.ndarray]:
    top = P.dim_top
    Xe, Ye = X.extend(top), Y.extend(top)
    masks = []
    for k in range(top + 1):
        ny = Ye.space.counts[k]
        idx = np.arange(P.counts[k])
        masks.append((idx // ny == Xe.base(k)) | (idx % ny == Ye.base(k)))
    return masks


def smash(X: PointedFinSSet, Y: PointedFinSSet) -> PointedFinSSet:
    P = product(X.space, Y.space)
    return collapse(P, wedge_mask(X, Y, P))[0]


def smash_with_quotient(X: PointedFinSSet, Y: PointedFinSSet) -> tuple[PointedFinSSet, FinSSet, SMap]:
    P = product(X.space, Y.space)
    S, q = collapse(P, wedge_mask(X, Y, P))
    return S, P, q


def smash_map(f: SMap, g: SMap, X: PointedFinSSet, Y: PointedFinSSet, X2: PointedFinSSet, Y2: PointedFinSSet) -> SMap:
    """f ^ g : X ^ Y -> X2 ^ Y2 for pointed maps f, g."""
    S, P, q = smash_with_quotient(X, Y)
    S2, P2, q2 = smash_with_quotient(X2, Y2)
    fg = product_map(f, g, P, P2)
    top = P.dim_top
    maps = []
    for k in range(top + 1):
        img = q2.maps[k][fg.maps[k]]
        out = np.empty(S.space.counts[k], dtype=np.int64)
        out[q.maps[k]] = img
        maps.append(out)
    return SMap(S.space, S2.space, maps)


def disjoint_union(X: FinSSet, Y: FinSSet) -> FinSSet:
    if X.complete and Y.complete:
        top = max(X.dim_top, Y.dim_top)
        X, Y = X.extend(top), Y.extend(top)
        complete = True
    else:
        top = min(X.dim_top, Y.dim_top)
        X, Y = X.truncate(top), Y.truncate(top)
        complete = False
    counts = [X.counts[k] + Y.counts[k] for k in range(top + 1)]
    faces: list[np.ndarray | None] = [None]
    for k in range(1, top + 1):
        faces.append(np.hstack([X.faces[k], Y.faces[k] + X.counts[k - 1]]))
    degens = [np.hstack([X.degens[k], Y.degens[k] + X.counts[k + 1]]) for k in range(top)]
    return FinSSet(counts, faces, degens, complete=complete)


def plus(X: FinSSet) -> PointedFinSSet:
    """X with a disjoint basepoint appended as the last vertex."""
    U = disjoint_union(X, FinSSet.point())
    return PointedFinSSet(U, X.counts[0])


# --------------------------------------------------------------------------
# spheres


def standard_sphere(n: int) -> PointedFinSSet:
    """S^n as the n-fold smash of S^1 = Delta^1 / boundary.

    A k-simplex is either the basepoint ``()`` or a tuple (j_1..j_n) with
    each j in 1..k; coordinate j records where the circle coordinate jumps.
    """
    if n == 0:
        return PointedFinSSet(FinSSet.discrete(2), 0)
    levels: list[list[Key]] = []
    for k in range(n + 1):
        lv: list[Key] = [()]
        lv.extend(itertools.product(range(1, k + 1), repeat=n))
        levels.append(lv)
    return PointedFinSSet(FinSSet.from_keys(levels, sphere_face, sphere_degen, complete=True), 0)


def sphere_face(k: int, i: int, key: Key) -> Key:
    if key == ():
        return ()
    out = tuple(j - 1 if i < j else j for j in key)
    if any(j == 0 or j == k for j in out):
        return ()
    return out


def sphere_degen(k: int, i: int, key: Key) -> Key:
    if key == ():
        return ()
    return tuple(j + 1 if i < j else j for j in key)


def sphere_circle_coordinate(k: int, j: int) -> int:
    """Index of label j (0 = basepoint) of a k-simplex of S^1."""
    return 0 if j in (0, k + 1) else j


# --------------------------------------------------------------------------
# components


@dataclass
class Components:
    count: int
    vertex_labels: np.ndarray

    def of(self, X: FinSSet, k: int) -> np.ndarray:
        return self.vertex_labels[X.vertex_of(k)]


def pi0(X: FinSSet) -> Components:
    n = X.counts[0]
    if X.dim_top == 0 or n == 0:
        return Components(n, np.arange(n))
    d0, d1 = X.faces[1][0], X.faces[1][1]
    g = coo_matrix((np.ones(len(d0)), (d0, d1)), shape=(n, n))
    count, labels = connected_components(g, directed=False)
    # relabel by first vertex so ids are deterministic and ordered
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(count)
    return Components(int(count), rank[labels])


# --------------------------------------------------------------------------
# chain complexes


@dataclass
class ChainData:
    """Free chain complex with sparse boundary columns.

    ``dims[k]`` is the rank of C_k and ``cols[k][j]`` the column of d_k for
    the j-th basis element (a {row: coefficient} dict).  ``top`` is the last
    degree for which C_top is known; if ``complete`` the complex vanishes
    above ``top``.
    """

    dims: list[int]
    cols: list[list[dict[int, int]]]
    complete: bool = True

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def check_d2(self) -> None:
        for k in range(2, self.top + 1):
            for j, col in enumerate(self.cols[k]):
                acc: dict[int, int] = {}
                for r, v in col.items():
                    for r2, w in self.cols[k - 1][r].items():
                        acc[r2] = acc.get(r2, 0) + v * w
                if any(acc.values()):
                    raise IdentityViolation(f"boundary squared nonzero in degree {k}", k, j)

    def homology(self, k_max: int, split: bool = True) -> list[AbelianGroup]:
        if not self.complete and k_max + 1 > self.top:
            raise InsufficientDimension(f"need chains through degree {k_max + 1}, have {self.top}")
        blocks = _blocks(self, k_max + 1) if split else [None]
        out = [AbelianGroup() for _ in range(k_max + 1)]
        for block in blocks:
            groups = _block_homology(self, k_max, block)
            out = [a + b for a, b in zip(out, groups)]
        return out


@dataclass
class ChainMap:
    source: ChainData
    target: ChainData
    cols: list[list[dict[int, int]]]

    def cone(self, k_max: int) -> ChainData:
        """Mapping cone through degree k_max + 1 (basis: target_k then source_{k-1})."""
        S, T = self.source, self.target
        dims, cols = [], []
        for k in range(k_max + 2):
            tk = T.dims[k] if k <= T.top else 0
            sk = S.dims[k - 1] if 0 < k and k - 1 <= S.top else 0
            off_prev = T.dims[k - 1] if 0 < k <= T.top + 1 else 0
            col: list[dict[int, int]] = []
            for j in range(tk):
                col.append(dict(T.cols[k][j]) if k > 0 else {})
            for j in range(sk):
                c = dict(self.cols[k - 1][j]) if k - 1 < len(self.cols) else {}
                if k >= 2:
                    for r, v in S.cols[k - 1][j].items():
                        c[off_prev + r] = -v
                col.append(c)
            dims.append(tk + sk)
            cols.append(col)
        return ChainData(dims, cols, complete=True)

    def is_iso(self, k_max: int) -> tuple[bool, dict[str, Any]]:
        """Whether H_k of the map is an isomorphism for every k <= k_max.

        Uses H_k(cone) = 0 for k <= k_max (surjective through k_max, injective
        below) plus an abstract isomorphism H_kmax(source) = H_kmax(target),
        which upgrades the top surjection to an iso since finitely
        generated abelian groups are Hopfian.
        """
        cone_h = self.cone(k_max).homology(k_max)
        hs = self.source.homology(k_max)
        ht = self.target.homology(k_max)
        ok = all(g.is_trivial for g in cone_h) and hs[k_max] == ht[k_max]
        return ok, {
            "source": [str(g) for g in hs],
            "target": [str(g) for g in ht],
            "cone": [str(g) for g in cone_h],
        }


def _blocks(C: ChainData, upto: int) -> list[list[np.ndarray]]:
    """Split the complex into direct summands by matrix support."""
    offsets = [0]
    for k in range(upto + 1):
        offsets.append(offsets[-1] + (C.dims[k] if k <= C.top else 0))
    n = offsets[-1]
    rows, cols = [], []
    for k in range(1, min(upto, C.top) + 1):
        for j, col in enumerate(C.cols[k]):
            for r in col:
                rows.append(offsets[k] + j)
                cols.append(offsets[k - 1] + r)
    if n == 0:
        return []
    g = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    count, labels = connected_components(g, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(count + 1))
    blocks = []
    for b in range(count):
        members = order[bounds[b]: bounds[b + 1]]
        per_deg = []
        for k in range(upto + 1):
            sel = members[(members >= offsets[k]) & (members < offsets[k + 1])] - offsets[k]
            per_deg.append(np.sort(sel))
        blocks.append(per_deg)
    return blocks


def _block_homology(C: ChainData, k_max: int, block) -> list[AbelianGroup]:
    top = k_max + 1
    if block is None:
        block = [np.arange(C.dims[k]) if k <= C.top else np.empty(0, dtype=np.int64) for k in range(top + 1)]
    invs = []
    for k in range(top + 1):
        if k == 0 or k > C.top or len(block[k]) == 0:
            invs.append((0, []))
            continue
        pos = {int(r): n for n, r in enumerate(block[k - 1])}
        mat = SparseIntMatrix(len(block[k - 1]), [{pos[r]: v for r, v in C.cols[k][int(j)].items()} for j in block[k]])
        invs.append(sparse_invariants(mat))
    out = []
    for k in range(k_max + 1):
        rank_out = invs[k][0]
        rank_in, tors = invs[k + 1]
        out.append(AbelianGroup(len(block[k]) - rank_out - rank_in, tuple(tors)))
    return out


def chains(X: FinSSet, top: int) -> ChainData:
    """Normalized chains of X through degree ``top`` (clipped for truncated sets)."""
    if not X.complete:
        top = min(top, X.dim_top)
    dims, cols = [], []
    prev_pos: dict[int, int] = {}
    for k in range(top + 1):
        nd = X.nondegenerate(k) if k <= X.dim_top else np.empty(0, dtype=np.int64)
        pos = {int(x): n for n, x in enumerate(nd)}
        col_k: list[dict[int, int]] = []
        if k > 0 and len(nd):
            F = X.faces[k][:, nd]
            for j in range(len(nd)):
                c: dict[int, int] = {}
                for i in range(k + 1):
                    r = prev_pos.get(int(F[i, j]))
                    if r is not None:
                        v = c.get(r, 0) + (1 if i % 2 == 0 else -1)
                        if v:
                            c[r] = v
                        else:
                            del c[r]
                col_k.append(c)
        else:
            col_k = [{} for _ in range(len(nd))]
        dims.append(len(nd))
        cols.append(col_k)
        prev_pos = pos
    return ChainData(dims, cols, complete=X.complete)


# --------------------------------------------------------------------------
# homology


@dataclass
class HomologyReport:
    groups: list[AbelianGroup]
    k_max: int
    coefficients: str = "Z"
    validity: str = ""

    def __getitem__(self, k: int) -> AbelianGroup:
        return self.groups[k]

    def __len__(self) -> int:
        return len(self.groups)

    def to_json(self) -> dict[str, Any]:
        return {
            "coefficients": self.coefficients,
            "k_max": self.k_max,
            "groups": [g.to_strings() for g in self.groups],
            "validity": self.validity,
        }


def _cyclic_tensor(g: AbelianGroup, m: int) -> AbelianGroup:
    from math import gcd

    return AbelianGroup(0, tuple([m] * g.rank + [gcd(t, m) for t in g.torsion]))


def _cyclic_tor(g: AbelianGroup, m: int) -> AbelianGroup:
    from math import gcd

    return AbelianGroup(0, tuple(gcd(t, m) for t in g.torsion))


def homology(X: FinSSet, k_max: int, coefficients=None) -> HomologyReport:
    """Homology of X in degrees 0..k_max.

    ``coefficients`` is ``None`` for the integers, an int m for Z/m, or any
    object with ``additive_invariants()`` (e.g. a finite ring), handled by
    the universal coefficient theorem.
    """
    if not X.complete and X.dim_top < k_max + 1:
        raise InsufficientDimension(
            f"truncated set has dim_top={X.dim_top}; H_{k_max} needs simplices through {k_max + 1}",
            witness={"dim_top": X.dim_top, "k_max": k_max},
        )
    integral = chains(X, k_max + 1).homology(k_max)
    validity = f"k <= {k_max}" if X.complete else f"k <= {X.dim_top - 1}"
    if coefficients is None:
        return HomologyReport(integral, k_max, "Z", validity)
    if isinstance(coefficients, int):
        orders, name = [coefficients], f"Z/{coefficients}"
    else:
        orders, name = list(coefficients.additive_invariants()), str(coefficients)
    groups = []
    for k in range(k_max + 1):
        g = AbelianGroup()
        for m in orders:
            g = g + _cyclic_tensor(integral[k], m)
            if k > 0:
                g = g + _cyclic_tor(integral[k - 1], m)
        groups.append(g)
    return HomologyReport(groups, k_max, name, validity)


def reduced_homology(X: FinSSet, k_max: int) -> list[AbelianGroup]:
    h = homology(X, k_max).groups
    if X.counts[0]:
        h[0] = AbelianGroup(h[0].rank - 1, h[0].torsion)
    return h


def induced_iso(f: SMap, k_max: int) -> tuple[bool, dict[str, Any]]:
    """pi0-bijection plus H_k-isomorphism test for k <= k_max."""
    return f.chain_map(k_max).is_iso(k_max)
