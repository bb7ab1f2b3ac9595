"""Dold-Kan chain models, Eilenberg-MacLane ring spectra, Sigma/Omega.

Ring elements are table indices (see ``rings``); a vector over R is a row
of indices and a set of vectors is a 2-d integer array.  Chain models over
the integers (``ring=None``) keep plain integer matrices.

Spectra come in two flavours.  ``SymSpectrum`` has keyed simplicial levels
(spheres, suspension spectra).  ``ModuleSpectrum`` is the reduced free
R-module spectrum R~[L] on a keyed spectrum L; it is Dold-Kan backed and
all of its structure is handled on normalized chains, where products use
the Eilenberg-Zilber shuffle map.  ``em_spectrum`` is R~[sphere spectrum].

Structure maps follow the right-module convention E_n ^ S^1 -> E_{n+1}:
the new circle coordinate is appended last.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Hashable, Sequence

import numpy as np

from .errors import BijectionFailure, ConfigError, LawViolation, NotDkBacked, NotStabilized
from .ispace import FcpStruct, ISpace, check_fcp, compose_inj, inj_cat, uniform
from .rings import FinCommRing
from .snf import AbelianGroup, SparseIntMatrix, group_from_torsion_counts, homology_from_boundaries
from .sset import FinSSet, PointedFinSSet, SMap, induced_iso, reduced_homology, sphere_degen, sphere_face, surjections

Key = Hashable
Perm = tuple[int, ...]

BUDGET = 2_000_000


# --------------------------------------------------------------------------
# linear algebra over a finite ring


def to_ring(R: FinCommRing, A) -> np.ndarray:
    """Integer matrix -> matrix of ring indices (image under Z -> R)."""
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return np.full(A.shape, R.zero, dtype=np.int64)
    lo, hi = int(A.min()), int(A.max())
    table = R.int_table(min(lo, 0), max(hi, 0))
    return table[A - min(lo, 0)]


def ring_matmul(R: FinCommRing, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = np.full((A.shape[0], B.shape[1]), R.zero, dtype=np.int64)
    for j in range(A.shape[1]):
        out = R.add[out, R.mul[A[:, j][:, None], B[j][None, :]]]
    return out


def ring_apply(R: FinCommRing, A: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Apply A (r x c) to each row vector of ``rows`` (t x c); returns t x r."""
    out = np.full((rows.shape[0], A.shape[0]), R.zero, dtype=np.int64)
    for j in range(A.shape[1]):
        out = R.add[out, R.mul[rows[:, j][:, None], A[:, j][None, :]]]
    return out


def free_module(R: FinCommRing, n: int) -> np.ndarray:
    if R.size**n > BUDGET:
        raise ConfigError(f"R^{n} over {R} has more than {BUDGET} elements")
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(R.size), repeat=n)), dtype=np.int64)


def _times_table(R: FinCommRing, d: int) -> np.ndarray:
    return np.array([R._times(a, d) for a in range(R.size)], dtype=np.int64)


class RowIndex:
    """Lookup of integer row vectors."""

    def __init__(self, rows: np.ndarray):
        self.rows = np.ascontiguousarray(rows, dtype=np.int64)
        self._ix = {r.tobytes(): i for i, r in enumerate(self.rows)}

    def __len__(self) -> int:
        return len(self._ix)

    def get(self, row: np.ndarray) -> int:
        return self._ix.get(np.ascontiguousarray(row, dtype=np.int64).tobytes(), -1)

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        return np.array([self._ix.get(r.tobytes(), -1) for r in rows], dtype=np.int64)


def _unit_reduce(R: FinCommRing, A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Row-reduce using unit pivots only; returns (matrix, pivot columns)."""
    A = A.copy()
    pivots: list[int] = []
    r = 0
    units = np.zeros(R.size, dtype=bool)
    units[R.units()] = True
    for c in range(A.shape[1]):
        if r >= A.shape[0]:
            break
        cand = np.flatnonzero(units[A[r:, c]])
        if not cand.size:
            continue
        p = r + int(cand[0])
        A[[r, p]] = A[[p, r]]
        inv = R.inverse(int(A[r, c]))
        A[r] = R.mul[inv, A[r]]
        for i in range(A.shape[0]):
            if i != r and A[i, c] != R.zero:
                f = R.neg[A[i, c]]
                A[i] = R.add[A[i], R.mul[f, A[r]]]
        pivots.append(c)
        r += 1
    keep = np.any(A != R.zero, axis=1)
    return A[keep], pivots


def ring_kernel(R: FinCommRing, A: np.ndarray, budget: int = BUDGET) -> np.ndarray:
    """All v with A v = 0, as rows sorted lexicographically.

    Unit pivots are eliminated first; the remaining search assigns free
    variables before pivot variables and filters on every constraint as
    soon as its variables are known.
    """
    A = np.asarray(A, dtype=np.int64)
    c = A.shape[1]
    if c == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if A.shape[0] == 0:
        return free_module(R, c)
    A, pivots = _unit_reduce(R, A)
    order = [j for j in range(c) if j not in set(pivots)] + pivots
    pos = {j: t for t, j in enumerate(order)}
    last = [max(pos[j] for j in np.flatnonzero(row != R.zero)) for row in A]
    by_step: dict[int, list[int]] = {}
    for i, t in enumerate(last):
        by_step.setdefault(t, []).append(i)
    S = np.zeros((1, 0), dtype=np.int64)
    vals = np.arange(R.size)
    for t, j in enumerate(order):
        S = np.concatenate([np.repeat(S, R.size, axis=0), np.tile(vals, len(S))[:, None]], axis=1)
        for i in by_step.get(t, []):
            coeffs = A[i, order[: t + 1]]
            acc = np.full(len(S), R.zero, dtype=np.int64)
            for s in range(t + 1):
                if coeffs[s] != R.zero:
                    acc = R.add[acc, R.mul[coeffs[s], S[:, s]]]
            S = S[acc == R.zero]
        if len(S) > budget:
            raise ConfigError(f"kernel enumeration exceeded {budget} partial solutions")
    out = np.empty_like(S)
    out[:, order] = S
    return np.unique(out, axis=0) if len(out) else out


def ring_span(R: FinCommRing, gens: np.ndarray, n: int, budget: int = BUDGET) -> np.ndarray:
    """All R-linear combinations of the given columns of length n."""
    S = np.zeros((1, n), dtype=np.int64)
    if n == 0:
        return S
    for c in gens:
        scaled = R.mul[np.arange(R.size)[:, None], c[None, :]]  # |R| x n
        S = R.add[S[:, None, :], scaled[None, :, :]].reshape(-1, n)
        S = np.unique(S, axis=0)
        if len(S) > budget:
            raise ConfigError("span enumeration exceeded the budget")
    return S


# --------------------------------------------------------------------------
# chain models


@dataclass
class DkModel:
    """Nonnegatively graded chain complex of free modules with a degree-0 constraint.

    ``bnd[k]`` (k >= 1) is the matrix of d_k: C_k -> C_(k-1).  ``bnd[0]``,
    when present, is a matrix whose kernel is the actual degree-0 module;
    this is how ``loops`` keeps cycles without choosing a basis.
    """

    ring: FinCommRing | None
    dims: list[int]
    bnd: list[np.ndarray | None]
    labels: list[list[Key]] | None = None
    name: str = ""
    _cache: dict[str, Any] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.bnd) != len(self.dims):
            raise ValueError("need one boundary slot per degree")
        for k in range(1, len(self.dims)):
            b = self.bnd[k]
            if b is None:
                self.bnd[k] = self._zero((self.dims[k - 1], self.dims[k]))
            elif b.shape != (self.dims[k - 1], self.dims[k]):
                raise ValueError(f"d_{k} has shape {b.shape}, expected {(self.dims[k - 1], self.dims[k])}")

    def _zero(self, shape) -> np.ndarray:
        fill = 0 if self.ring is None else self.ring.zero
        return np.full(shape, fill, dtype=np.int64)

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, DkModel) or not same_ring(self.ring, other.ring) or self.dims != other.dims:
            return False
        for a, b in zip(self._normal_bnd(), other._normal_bnd()):
            if (a is None) != (b is None) or (a is not None and not np.array_equal(a, b)):
                return False
        return True

    def _normal_bnd(self) -> list[np.ndarray | None]:
        """Boundaries with a vacuous degree-0 constraint replaced by None."""
        b0 = self.bnd[0]
        if b0 is not None and (b0.shape[0] == 0 or self._is_zero(b0)):
            b0 = None
        return [b0] + list(self.bnd[1:])

    def _matmul(self, A, B):
        return A @ B if self.ring is None else ring_matmul(self.ring, A, B)

    def _is_zero(self, A) -> bool:
        return bool(np.all(A == (0 if self.ring is None else self.ring.zero)))

    def check(self) -> None:
        for k in range(1, self.top + 1):
            prev = self.bnd[k - 1]
            if prev is None or prev.size == 0 or self.bnd[k].size == 0:
                continue
            if not self._is_zero(self._matmul(prev, self.bnd[k])):
                raise LawViolation("d^2", f"d_{k - 1} d_{k} != 0 in {self.name or 'model'}", {"degree": k})

    # ------------------------------------------------------------ homology
    def cycles(self, k: int) -> np.ndarray:
        """Elements of Z_k (finite rings only), sorted."""
        key = f"Z{k}"
        if key not in self._cache:
            R = self._finite()
            b = self.bnd[k] if k <= self.top else None
            if k > self.top:
                rows = np.zeros((1, 0), dtype=np.int64)
            elif b is None or b.shape[0] == 0:
                rows = free_module(R, self.dims[k])
            else:
                rows = ring_kernel(R, b)
            self._cache[key] = rows
        return self._cache[key]

    def boundaries(self, k: int) -> np.ndarray:
        key = f"B{k}"
        if key not in self._cache:
            R = self._finite()
            n = self.dims[k] if k <= self.top else 0
            if k + 1 > self.top:
                rows = np.zeros((1, n), dtype=np.int64)
            else:
                rows = ring_span(R, self.bnd[k + 1].T, n)
            self._cache[key] = rows
        return self._cache[key]

    def _finite(self) -> FinCommRing:
        if self.ring is None:
            raise ConfigError("this operation needs a finite coefficient ring")
        return self.ring

    def moore_homotopy(self, k_max: int) -> list[AbelianGroup]:
        """Homology of the complex, i.e. homotopy groups of its realization."""
        if self.ring is None:
            dims = [self.dims[k] if k <= self.top else 0 for k in range(k_max + 2)]
            mats: list[SparseIntMatrix | None] = []
            for k in range(k_max + 2):
                b = self.bnd[k] if k <= self.top else None
                if b is None or b.size == 0:
                    mats.append(None)
                else:
                    mats.append(SparseIntMatrix(b.shape[0], [{i: int(v) for i, v in enumerate(col) if v} for col in b.T]))
            return homology_from_boundaries(dims, mats)[: k_max + 1]
        return [self.homology_group(k) for k in range(k_max + 1)]

    def homology_group(self, k: int) -> AbelianGroup:
        R = self._finite()
        Z, B = self.cycles(k), self.boundaries(k)
        if len(Z) % len(B):
            raise LawViolation("d^2", f"boundaries in degree {k} are not cycles")
        bset = RowIndex(B)

        def count(d):
            dz = _times_table(R, d)[Z]
            return int(np.sum(bset.lookup(dz) >= 0)) // len(B)

        return group_from_torsion_counts(len(Z) // len(B), count)

    # ------------------------------------------------------------ realization
    def realize(self, upto: int | None = None, budget: int = 200_000) -> FinSSet:
        """Dold-Kan realization Gamma(C) through degree ``upto``.

        Gamma(C)_k is the direct sum over surjections [k] ->> [j] of C_j.
        A monotone theta acts on the summand of sigma by factoring
        sigma o theta = delta o eta: identity if delta = id, d_j if delta
        skips only the last vertex j, and zero otherwise.
        """
        R = self._finite()
        if self.top == 0:
            X = FinSSet.discrete(len(self.cycles(0)))
            X.dk_vectors = [self.cycles(0)]  # type: ignore[attr-defined]
            X.dk_ring = R  # type: ignore[attr-defined]
            return X
        upto = self.top + 1 if upto is None else upto
        elems = [self.cycles(0)] + [free_module(R, self.dims[j]) for j in range(1, self.top + 1)]
        summands: list[list[tuple[tuple[int, ...], int]]] = []
        offsets: list[dict[tuple[int, ...], int]] = []
        widths: list[int] = []
        simplices: list[np.ndarray] = []
        for k in range(upto + 1):
            sm = [(s, j) for j in range(min(k, self.top) + 1) for s in surjections(k, j) if self.dims[j]]
            off, w = {}, 0
            for s, j in sm:
                off[s] = w
                w += self.dims[j]
            total = 1
            for _, j in sm:
                total *= len(elems[j])
            if total > budget:
                raise ConfigError(f"realization has {total} simplices in degree {k}, over budget {budget}")
            rows = np.zeros((1, 0), dtype=np.int64)
            for _, j in sm:
                E = elems[j]
                rows = np.concatenate([np.repeat(rows, len(E), axis=0), np.tile(E, (len(rows), 1))], axis=1)
            summands.append(sm)
            offsets.append(off)
            widths.append(w)
            simplices.append(rows)
        index = [RowIndex(s) for s in simplices]

        def operator(theta: tuple[int, ...], k: int) -> np.ndarray:
            m = len(theta) - 1
            T = np.full((widths[m], widths[k]), R.zero, dtype=np.int64)
            eye = {j: to_ring(R, np.eye(self.dims[j], dtype=np.int64)) for j in range(self.top + 1)}
            for s, j in summands[k]:
                tau = tuple(s[v] for v in theta)
                image = set(tau)
                src = offsets[k][s]
                if image == set(range(j + 1)):
                    blk, jj = eye[j], j
                elif j >= 1 and image == set(range(j)):
                    blk, jj = self.bnd[j], j - 1
                else:
                    continue
                if not self.dims[jj]:
                    continue
                dst = offsets[m][tau]
                cur = T[dst : dst + self.dims[jj], src : src + self.dims[j]]
                T[dst : dst + self.dims[jj], src : src + self.dims[j]] = R.add[cur, blk]
            return T

        faces: list[np.ndarray | None] = [None]
        degens: list[np.ndarray] = []
        for k in range(1, upto + 1):
            tab = np.empty((k + 1, len(simplices[k])), dtype=np.int64)
            for i in range(k + 1):
                theta = tuple(v if v < i else v + 1 for v in range(k))
                tab[i] = index[k - 1].lookup(ring_apply(R, operator(theta, k), simplices[k]))
            faces.append(tab)
        for k in range(upto):
            tab = np.empty((k + 1, len(simplices[k])), dtype=np.int64)
            for i in range(k + 1):
                theta = tuple(v if v <= i else v - 1 for v in range(k + 2))
                tab[i] = index[k + 1].lookup(ring_apply(R, operator(theta, k), simplices[k]))
            degens.append(tab)
        X = FinSSet([len(s) for s in simplices], faces, degens, complete=False)
        X.dk_vectors = simplices  # type: ignore[attr-defined]
        X.dk_ring = R  # type: ignore[attr-defined]
        return X

    def to_json(self) -> dict[str, Any]:
        return {
            "ring": None if self.ring is None else self.ring.to_json(),
            "dims": list(self.dims),
            "boundaries": [None if b is None else b.tolist() for b in self.bnd],
        }


def same_ring(a: FinCommRing | None, b: FinCommRing | None) -> bool:
    if a is None or b is None:
        return a is b
    return a is b or (a.spec == b.spec and np.array_equal(a.add, b.add) and np.array_equal(a.mul, b.mul))


def loops(M: DkModel, n: int) -> DkModel:
    """Exact loop functor: shift the complex down n degrees keeping cycles."""
    if n == 0:
        return M
    if n > M.top:
        return DkModel(M.ring, [0], [None], name=f"loops^{n}({M.name})")
    labels = M.labels[n:] if M.labels is not None else None
    return DkModel(M.ring, list(M.dims[n:]), [M.bnd[n]] + list(M.bnd[n + 1 :]), labels, name=f"loops^{n}({M.name})")


def moore_homotopy(M: DkModel, k_max: int) -> list[AbelianGroup]:
    return M.moore_homotopy(k_max)


def em_model(R: FinCommRing | None, n: int) -> DkModel:
    """K(R, n): R in degree n and nothing else."""
    dims = [0] * n + [1]
    return DkModel(R, dims, [None] * (n + 1), name=f"K({R or 'Z'},{n})")


def simplicial_moore_homotopy(X: FinSSet, k: int) -> AbelianGroup:
    """Homotopy of a realized simplicial R-module by its Moore complex.

    Used as an independent check of the realization: N_k is the
    intersection of the kernels of d_1..d_k and the differential is d_0.
    """
    def moore(q):
        mask = np.ones(X.counts[q], dtype=bool)
        for i in range(1, q + 1):
            mask &= X.faces[q][i] == _zero_index(X, q - 1)
        return np.flatnonzero(mask)

    Nk = moore(k)
    Z = Nk[X.faces[k][0][Nk] == _zero_index(X, k - 1)] if k > 0 else Nk
    if k + 1 <= X.dim_top:
        B = np.unique(X.faces[k + 1][0][moore(k + 1)])
    elif X.complete:
        B = np.array([_zero_index(X, k)])
    else:
        raise ConfigError(f"degree {k + 1} of the realization is not materialised")
    return _quotient_group(X, k, Z, B)


def _zero_index(X: FinSSet, q: int) -> int:
    vec = X.dk_vectors[q]  # type: ignore[attr-defined]
    R = X.dk_ring  # type: ignore[attr-defined]
    hits = np.flatnonzero(np.all(vec == R.zero, axis=1))
    return int(hits[0])


def _quotient_group(X: FinSSet, k: int, Z: np.ndarray, B: np.ndarray) -> AbelianGroup:
    R = X.dk_ring  # type: ignore[attr-defined]
    vec = X.dk_vectors[k]  # type: ignore[attr-defined]
    bset = RowIndex(vec[B])

    def count(d):
        return int(np.sum(bset.lookup(_times_table(R, d)[vec[Z]]) >= 0)) // len(B)

    return group_from_torsion_counts(len(Z) // len(B), count)


# --------------------------------------------------------------------------
# keyed spectra


def perm_tuple(pi: Perm, t: tuple[int, ...]) -> tuple[int, ...]:
    """Permute smash coordinates: coordinate c moves to position pi(c)."""
    out = [0] * len(t)
    for c, v in enumerate(t):
        out[pi[c] - 1] = v
    return tuple(out)


def perm_sign(pi: Sequence[int]) -> int:
    s, seen = 1, set()
    for i in range(len(pi)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = pi[j] - 1
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def _permutations(n: int) -> list[Perm]:
    return list(itertools.permutations(range(1, n + 1)))


def _adjacent(n: int) -> list[Perm]:
    out = []
    for i in range(n - 1):
        v = list(range(1, n + 1))
        v[i], v[i + 1] = v[i + 1], v[i]
        out.append(tuple(v))
    return out


def _keyed_sphere_face(n: int):
    def face(k, i, key):
        if key is None:
            return None
        if n == 0:
            return key
        out = sphere_face(k, i, key)
        return None if out == () else out

    return face


def _keyed_sphere_degen(n: int):
    def degen(k, i, key):
        if key is None or n == 0:
            return key
        return sphere_degen(k, i, key)

    return degen


def keyed_sphere(n: int, top: int) -> PointedFinSSet:
    """(S^1)^(smash n) with basepoint key None; S^0 is {None, ()}."""
    levels = [[None] + list(itertools.product(range(1, k + 1), repeat=n)) for k in range(top + 1)]
    X = FinSSet.from_keys(levels, _keyed_sphere_face(n), _keyed_sphere_degen(n), complete=True)
    return PointedFinSSet(X, 0)


def _keyed_smash(A: PointedFinSSet, B: PointedFinSSet, top: int) -> PointedFinSSet:
    """Smash of keyed pointed sets with keys (a, b) and basepoint None."""
    X, Y = A.space, B.space
    levels = []
    for k in range(top + 1):
        ba, bb = A.base(k), B.base(k)
        lv = [None] + [(X.keys[k][a], Y.keys[k][b]) for a in range(X.counts[k]) if a != ba for b in range(Y.counts[k]) if b != bb]
        levels.append(lv)

    def op(table_x, table_y, k, i, key):
        if key is None:
            return None
        a = table_x[k][i][X.key_index(k)[key[0]]]
        b = table_y[k][i][Y.key_index(k)[key[1]]]
        kk = k - 1 if table_x is X.faces else k + 1
        if a == A.base(kk) or b == B.base(kk):
            return None
        return (X.keys[kk][a], Y.keys[kk][b])

    return PointedFinSSet(
        FinSSet.from_keys(levels, lambda k, i, key: op(X.faces, Y.faces, k, i, key), lambda k, i, key: op(X.degens, Y.degens, k, i, key), complete=True),
        0,
    )


class SymSpectrum:
    """Symmetric spectrum with keyed simplicial levels E_0..E_N.

    ``act_key(n, pi, k, key)`` is the Sigma_n action on a k-simplex key and
    ``struct_key(n, k, key, s)`` the structure map E_n ^ S^1 -> E_(n+1)
    on a k-simplex key and a circle label s in 1..k.  A ring spectrum also
    supplies ``mult_key(m, n, k, a, b)`` and the unit key of E_0.
    """

    def __init__(
        self,
        N: int,
        levels: Sequence[PointedFinSSet],
        act_key: Callable[[int, Perm, int, Key], Key],
        struct_key: Callable[[int, int, Key, int], Key],
        name: str = "",
        mult_key: Callable[[int, int, int, Key, Key], Key] | None = None,
        unit_key: Key = None,
    ):
        self.N = N
        self.levels = list(levels)
        self.act_key = act_key
        self.struct_key = struct_key
        self.mult_key = mult_key
        self.unit_key = unit_key
        self.name = name
        self.top = min(L.space.dim_top for L in self.levels)

    @property
    def is_ring(self) -> bool:
        return self.mult_key is not None

    @property
    def is_trivial(self) -> bool:
        return all(all(c == 1 for c in L.space.counts) for L in self.levels)

    def key(self, n: int, k: int, idx: int) -> Key:
        return self.levels[n].space.keys[k][idx]

    def index(self, n: int, k: int, key: Key) -> int:
        if key is None:
            return self.levels[n].base(k)
        return self.levels[n].space.key_index(k)[key]

    def act_map(self, n: int, pi: Perm) -> SMap:
        X = self.levels[n].space
        maps = [np.array([self.index(n, k, self.act_key(n, pi, k, key)) for key in X.keys[k]], dtype=np.int64) for k in range(X.dim_top + 1)]
        return SMap(X, X, maps)

    def circle(self) -> PointedFinSSet:
        return keyed_sphere(1, self.top)

    def struct_smash(self, n: int) -> PointedFinSSet:
        return _keyed_smash(self.levels[n], self.circle(), self.top)

    def struct_map(self, n: int) -> tuple[SMap, PointedFinSSet]:
        Sm = self.struct_smash(n)
        X = Sm.space
        maps = []
        for k in range(X.dim_top + 1):
            row = []
            for key in X.keys[k]:
                row.append(self.index(n + 1, k, None if key is None else self.struct_key(n, k, key[0], key[1][0])))
            maps.append(np.array(row, dtype=np.int64))
        return SMap(X, self.levels[n + 1].space, maps), Sm

    def check(self) -> dict[str, int]:
        """Action laws, simpliciality, and iterated structure-map equivariance."""
        counts = {"action": 0, "simplicial": 0, "equivariance": 0}
        for n in range(self.N + 1):
            X = self.levels[n].space
            for pi in _adjacent(n):
                self.act_map(n, pi).check()
                counts["simplicial"] += 1
            perms = _permutations(n)
            for k in range(X.dim_top + 1):
                for key in X.keys[k]:
                    if self.act_key(n, tuple(range(1, n + 1)), k, key) != key:
                        raise LawViolation("action", f"identity acts nontrivially at level {n}", {"level": n, "key": repr(key)})
                    for pi in perms:
                        once = self.act_key(n, pi, k, key)
                        for rho in _adjacent(n):
                            lhs = self.act_key(n, pi, k, self.act_key(n, rho, k, key))
                            rhs = self.act_key(n, compose_inj(pi, rho), k, key)
                            if lhs != rhs:
                                raise LawViolation("action", f"pi(rho x) != (pi rho) x at level {n}", {"level": n, "key": repr(key)})
                            counts["action"] += 1
                        del once
        for n in range(self.N):
            self.struct_map(n)[0].check()
            counts["simplicial"] += 1
        for n in range(self.N + 1):
            for p in range(1, self.N - n + 1):
                counts["equivariance"] += self._check_iterated(n, p)
        return counts

    def iterated(self, n: int, p: int, k: int, key: Key, s: tuple[int, ...]) -> Key:
        for t, label in enumerate(s):
            if key is None:
                return None
            key = self.struct_key(n + t, k, key, label)
        return key

    def _check_iterated(self, n: int, p: int) -> int:
        X = self.levels[n].space
        done = 0
        for k in range(min(self.top, 2) + 1):
            svals = list(itertools.product(range(1, k + 1), repeat=p))
            for key in X.keys[k]:
                if key is None:
                    continue
                for s in svals:
                    base = self.iterated(n, p, k, key, s)
                    for pi in _permutations(n):
                        for rho in _permutations(p):
                            lhs = self.iterated(n, p, k, self.act_key(n, pi, k, key), perm_tuple(rho, s))
                            block = tuple(pi) + tuple(n + r for r in rho)
                            rhs = None if base is None else self.act_key(n + p, block, k, base)
                            if lhs != rhs:
                                raise LawViolation("equivariance", f"E_{n} ^ S^{p} -> E_{n + p} is not Sigma_{n} x Sigma_{p} equivariant", {"level": n, "p": p, "key": repr(key)})
                            done += 1
        return done


def sphere_spectrum(N: int, top: int | None = None) -> SymSpectrum:
    top = N + 1 if top is None else top
    levels = [keyed_sphere(n, top) for n in range(N + 1)]

    def act(n, pi, k, key):
        return None if key is None else perm_tuple(pi, key)

    def struct(n, k, key, s):
        return key + (s,)

    def mult(m, n, k, a, b):
        return a + b

    return SymSpectrum(N, levels, act, struct, name="S", mult_key=mult, unit_key=())


def point_spectrum(N: int, top: int | None = None) -> SymSpectrum:
    top = N + 1 if top is None else top
    pt = FinSSet.from_keys([[None] for _ in range(top + 1)], lambda k, i, x: None, lambda k, i, x: None)
    return SymSpectrum(N, [PointedFinSSet(pt, 0)] * (N + 1), lambda n, pi, k, key: None, lambda n, k, key, s: None, name="*")


def sigma_bullet_plus(X: ISpace, N: int | None = None, top: int | None = None) -> SymSpectrum:
    """Levels (X_n)_+ ^ S^n with the diagonal action; keys (x, t), basepoint None."""
    N = X.N if N is None else N
    if N > X.N:
        raise ConfigError(f"the I-space is only defined through level {X.N}")
    X = X.restrict(N) if N < X.N else X
    top = N + 1 if top is None else top
    U = uniform(X, top)
    I = U.cat
    levels = []
    for n in range(N + 1):
        Xn = U.obj[n]
        lv = [[None] + [(x, t) for x in range(Xn.counts[k]) for t in itertools.product(range(1, k + 1), repeat=n)] for k in range(top + 1)]

        def face(k, i, key, Xn=Xn, n=n):
            if key is None:
                return None
            t = key[1] if n == 0 else sphere_face(k, i, key[1])
            if n > 0 and t == ():
                return None
            return (int(Xn.faces[k][i][key[0]]), t)

        def degen(k, i, key, Xn=Xn, n=n):
            if key is None:
                return None
            t = key[1] if n == 0 else sphere_degen(k, i, key[1])
            return (int(Xn.degens[k][i][key[0]]), t)

        levels.append(PointedFinSSet(FinSSet.from_keys(lv, face, degen, complete=True), 0))

    def act(n, pi, k, key):
        if key is None:
            return None
        return (int(U.mor[I.inj(pi, n)].maps[k][key[0]]), perm_tuple(pi, key[1]))

    def struct(n, k, key, s):
        if key is None:
            return None
        inc = I.inj(tuple(range(1, n + 1)), n + 1)
        return (int(U.mor[inc].maps[k][key[0]]), key[1] + (s,))

    out = SymSpectrum(N, levels, act, struct, name=f"Sigma+({X.name or 'X'})")
    out.source = U
    return out


# --------------------------------------------------------------------------
# Eilenberg-Zilber on keyed simplices


def shuffles(p: int, q: int) -> list[tuple[int, tuple[int, ...], tuple[int, ...]]]:
    """(sign, mu, nu) for every (p, q)-shuffle of {0..p+q-1}."""
    out = []
    for mu in itertools.combinations(range(p + q), p):
        nu = tuple(v for v in range(p + q) if v not in mu)
        sign = -1 if sum(m - i for i, m in enumerate(mu)) % 2 else 1
        out.append((sign, mu, nu))
    return out


def _degenerate(X: FinSSet, x: int, k: int, idx: Sequence[int]) -> int:
    for i in idx:
        x = int(X.degens[k][i][x])
        k += 1
    return x


def ez_pairs(X: FinSSet, x: int, p: int, Y: FinSSet, y: int, q: int) -> list[tuple[int, int, int]]:
    """Terms (sign, s_nu x, s_mu y) of the shuffle map in degree p+q."""
    return [(sign, _degenerate(X, x, p, nu), _degenerate(Y, y, q, mu)) for sign, mu, nu in shuffles(p, q)]


# --------------------------------------------------------------------------
# module spectra


class ModuleSpectrum:
    """R~[L]: reduced free R-modules on the levels of a keyed spectrum L.

    Each level is recorded by its normalized chain complex (a DkModel whose
    basis is the nondegenerate non-basepoint simplices of L_n); the
    simplicial level is its Dold-Kan realization.
    """

    dk_backed = True

    def __init__(self, ring: FinCommRing, base: SymSpectrum, name: str = ""):
        self.ring = ring
        self.base = base
        self.N = base.N
        self.name = name or f"{ring}[{base.name}]"
        self._models: dict[int, DkModel] = {}
        self._basis: dict[tuple[int, int], dict[Key, int]] = {}

    @property
    def is_ring(self) -> bool:
        return self.base.is_ring

    def basis(self, n: int, k: int) -> list[Key]:
        X = self.base.levels[n].space
        if k > X.dim_top:
            return []
        b = self.base.levels[n].base(k)
        return [X.keys[k][i] for i in X.nondegenerate(k) if i != b]

    def basis_index(self, n: int, k: int) -> dict[Key, int]:
        if (n, k) not in self._basis:
            self._basis[(n, k)] = {key: i for i, key in enumerate(self.basis(n, k))}
        return self._basis[(n, k)]

    def chain_of(self, n: int, k: int, key: Key) -> int:
        """Basis position of a simplex key, or -1 if basepoint or degenerate."""
        if key is None:
            return -1
        return self.basis_index(n, k).get(key, -1)

    def level_model(self, n: int) -> DkModel:
        if n not in self._models:
            X = self.base.levels[n].space
            top = max([k for k in range(X.dim_top + 1) if len(self.basis(n, k))], default=0)
            dims = [len(self.basis(n, k)) for k in range(top + 1)]
            bnd: list[np.ndarray | None] = [None]
            for k in range(1, top + 1):
                A = np.zeros((dims[k - 1], dims[k]), dtype=np.int64)
                for c, key in enumerate(self.basis(n, k)):
                    x = X.key_index(k)[key]
                    for i in range(k + 1):
                        r = self.chain_of(n, k - 1, X.keys[k - 1][int(X.faces[k][i][x])])
                        if r >= 0:
                            A[r, c] += (-1) ** i
                bnd.append(to_ring(self.ring, A))
            M = DkModel(self.ring, dims, bnd, [self.basis(n, k) for k in range(top + 1)], name=f"{self.name}_{n}")
            self._models[n] = M
        return self._models[n]

    def level_sset(self, n: int, upto: int | None = None, budget: int = 200_000) -> FinSSet:
        """Dold-Kan realization of level n (raises ConfigError if over budget)."""
        X = self.level_model(n).realize(self.N + 1 if upto is None else upto, budget)
        X.dk_ring = self.ring  # type: ignore[attr-defined]
        return X

    # chain-level structure (integer coefficients on basis elements)
    def act_chain(self, n: int, pi: Perm, k: int) -> np.ndarray:
        B = self.basis(n, k)
        P = np.zeros((len(B), len(B)), dtype=np.int64)
        for c, key in enumerate(B):
            P[self.chain_of(n, k, self.base.act_key(n, pi, k, key)), c] = 1
        return P

    def _pair_chain(self, X: FinSSet, a: Key, p: int, Y: FinSSet, b: Key, q: int, target: int, pair: Callable[[int, Key, Key], Key]) -> dict[int, int]:
        out: dict[int, int] = {}
        for sign, x, y in ez_pairs(X, X.key_index(p)[a], p, Y, Y.key_index(q)[b], q):
            kx, ky = X.keys[p + q][x], Y.keys[p + q][y]
            if kx is None or ky is None:
                continue
            r = self.chain_of(target, p + q, pair(p + q, kx, ky))
            if r >= 0:
                out[r] = out.get(r, 0) + sign
        return {r: v for r, v in out.items() if v}

    def struct_chain(self, n: int, k: int) -> np.ndarray:
        """Matrix of x |-> sigma(EZ(x (x) iota_1)) from degree k to k+1."""
        S1 = keyed_sphere(1, self.base.top).space
        src, tgt = self.basis(n, k), self.basis(n + 1, k + 1)
        A = np.zeros((len(tgt), len(src)), dtype=np.int64)
        X = self.base.levels[n].space
        for c, key in enumerate(src):
            for r, v in self._pair_chain(X, key, k, S1, (1,), 1, n + 1, lambda d, a, s: self.base.struct_key(n, d, a, s[0])).items():
                A[r, c] += v
        return A

    def mult_chain(self, m: int, n: int, p: int, q: int) -> np.ndarray:
        """Tensor T[a, b, :] = mu(EZ(a (x) b)) for basis a (level m, degree p), b (level n, degree q)."""
        if not self.is_ring:
            raise LawViolation("ring", f"{self.name} has no multiplication")
        A, B = self.basis(m, p), self.basis(n, q)
        T = np.zeros((len(A), len(B), len(self.basis(m + n, p + q))), dtype=np.int64)
        X, Y = self.base.levels[m].space, self.base.levels[n].space
        for i, a in enumerate(A):
            for j, b in enumerate(B):
                for r, v in self._pair_chain(X, a, p, Y, b, q, m + n, lambda d, x, y: self.base.mult_key(m, n, d, x, y)).items():
                    T[i, j, r] += v
        return T

    def iota(self, n: int) -> np.ndarray:
        """Integer chain of the fundamental class: iota_0 = unit, iota_n = sigma(iota_(n-1))."""
        if n == 0:
            v = np.zeros(len(self.basis(0, 0)), dtype=np.int64)
            if not len(v):
                return v
            v[self.chain_of(0, 0, self.base.unit_key if self.base.unit_key is not None else ())] = 1
            return v
        return self.struct_chain(n - 1, n - 1) @ self.iota(n - 1)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "ring": self.ring.to_json(), "N": self.N, "levels": []}
        for n in range(self.N + 1):
            M = self.level_model(n)
            lv = {"model": M.to_json(), "action": {}, "structure": None}
            for pi in _adjacent(n):
                lv["action"][",".join(map(str, pi))] = [self.act_chain(n, pi, k).tolist() for k in range(M.top + 1)]
            if n < self.N:
                lv["structure"] = [self.struct_chain(n, k).tolist() for k in range(M.top + 1)]
            out["levels"].append(lv)
        return out


def em_spectrum(R: FinCommRing, N: int) -> ModuleSpectrum:
    if N < 1:
        raise ConfigError("em_spectrum needs N >= 1")
    return ModuleSpectrum(R, sphere_spectrum(N), name=f"H{R}")


def trivial_spectrum(R: FinCommRing, N: int) -> ModuleSpectrum:
    return ModuleSpectrum(R, point_spectrum(N), name="0")


@dataclass
class RingLawReport:
    ring: str
    N: int
    checks: dict[str, int]

    def to_json(self) -> dict[str, Any]:
        return {"ring": self.ring, "N": self.N, "checks": self.checks, "passed": True}


def check_ring_spectrum(E: ModuleSpectrum) -> RingLawReport:
    """Chain-level audit of the symmetric ring spectrum laws, coefficients in R."""
    R = E.ring
    N = E.N
    counts = {"action": 0, "d_equivariance": 0, "d_squared": 0, "associativity": 0, "unit": 0, "equivariance": 0, "leibniz": 0, "commutativity": 0, "centrality": 0}

    def same(a, b):
        return np.array_equal(to_ring(R, a), to_ring(R, b))

    tops = [E.level_model(n).top for n in range(N + 1)]
    for n in range(N + 1):
        M = E.level_model(n)
        M.check()
        counts["d_squared"] += 1
        perms = _permutations(n)
        for k in range(M.top + 1):
            Ps = {pi: E.act_chain(n, pi, k) for pi in perms}
            for pi in perms:
                for rho in perms:
                    if not same(Ps[pi] @ Ps[rho], Ps[compose_inj(pi, rho)]):
                        raise LawViolation("action", f"level {n}, degree {k}", {"level": n, "perms": [pi, rho]})
                    counts["action"] += 1
                if k >= 1:
                    lhs = M_int(E, n, k) @ Ps[pi]
                    rhs = E.act_chain(n, pi, k - 1) @ M_int(E, n, k)
                    if not same(lhs, rhs):
                        raise LawViolation("action", f"d does not commute with {pi} at level {n}", {"level": n})
                    counts["d_equivariance"] += 1
    if not E.is_ring:
        return RingLawReport(str(R), N, counts)
    T: dict[tuple[int, int, int, int], np.ndarray] = {}

    def mult(m, n, p, q):
        if (m, n, p, q) not in T:
            T[(m, n, p, q)] = E.mult_chain(m, n, p, q)
        return T[(m, n, p, q)]

    def degs(n):
        return [k for k in range(tops[n] + 1) if len(E.basis(n, k))]

    u = E.iota(0)
    for n in range(N + 1):
        for q in degs(n):
            eye = np.eye(len(E.basis(n, q)), dtype=np.int64)
            left = np.einsum("a,abr->br", u, mult(0, n, 0, q))
            right = np.einsum("b,abr->ar", u, mult(n, 0, q, 0))
            if not (same(left, eye) and same(right, eye)):
                raise LawViolation("unit", f"level {n}, degree {q}", {"level": n})
            counts["unit"] += 1
    for m in range(N + 1):
        for n in range(N + 1 - m):
            for p in degs(m):
                for q in degs(n):
                    Tmn = mult(m, n, p, q)
                    for pi in _permutations(m):
                        for rho in _permutations(n):
                            lhs = np.einsum("ia,jb,abr->ijr", E.act_chain(m, pi, p).T, E.act_chain(n, rho, q).T, Tmn)
                            block = tuple(pi) + tuple(m + r for r in rho)
                            rhs = np.einsum("ijr,sr->ijs", Tmn, E.act_chain(m + n, block, p + q))
                            if not same(lhs, rhs):
                                raise LawViolation("equivariance", f"mu_{m},{n} in degrees {(p, q)}", {"levels": [m, n], "perms": [pi, rho]})
                            counts["equivariance"] += 1
                    tw = tuple(n + i for i in range(1, m + 1)) + tuple(range(1, n + 1))
                    swapped = np.transpose(mult(n, m, q, p), (1, 0, 2))
                    twisted = (-1) ** (p * q) * np.einsum("ijr,sr->ijs", Tmn, E.act_chain(m + n, tw, p + q))
                    if not same(swapped, twisted):
                        raise LawViolation("commutativity", f"mu_{n},{m} o swap != twist o mu_{m},{n} in degrees {(p, q)}", {"levels": [m, n]})
                    counts["commutativity"] += 1
                    if n == 1:
                        counts["centrality"] += 1
                    if p + q <= tops[m + n]:
                        lhs = np.einsum("abr,sr->abs", Tmn, M_int(E, m + n, p + q)) if p + q >= 1 else None
                        if lhs is not None:
                            rhs = np.zeros_like(lhs)
                            if p >= 1:
                                rhs += np.einsum("sa,sbr->abr", M_int(E, m, p), mult(m, n, p - 1, q)) if p - 1 in degs(m) else 0
                            if q >= 1:
                                rhs += (-1) ** p * np.einsum("tb,atr->abr", M_int(E, n, q), mult(m, n, p, q - 1)) if q - 1 in degs(n) else 0
                            if not same(lhs, rhs):
                                raise LawViolation("leibniz", f"d mu != mu d in degrees {(p, q)} at levels {(m, n)}", {"levels": [m, n]})
                            counts["leibniz"] += 1
                    for l in range(N + 1 - m - n):
                        for r in degs(l):
                            left = np.einsum("abx,xcy->abcy", Tmn, mult(m + n, l, p + q, r))
                            right = np.einsum("bcx,axy->abcy", mult(n, l, q, r), mult(m, n + l, p, q + r))
                            if not same(left, right):
                                raise LawViolation("associativity", f"levels {(m, n, l)}, degrees {(p, q, r)}", {"levels": [m, n, l]})
                            counts["associativity"] += 1
    return RingLawReport(str(R), N, counts)


def M_int(E: ModuleSpectrum, n: int, k: int) -> np.ndarray:
    """Integer boundary d_k of level n (recomputed without ring reduction)."""
    X = E.base.levels[n].space
    src, tgt = E.basis(n, k), E.basis(n, k - 1)
    A = np.zeros((len(tgt), len(src)), dtype=np.int64)
    for c, key in enumerate(src):
        x = X.key_index(k)[key]
        for i in range(k + 1):
            r = E.chain_of(n, k - 1, X.keys[k - 1][int(X.faces[k][i][x])])
            if r >= 0:
                A[r, c] += (-1) ** i
    return A


# --------------------------------------------------------------------------
# Omega-bullet


def _complete_perm(phi: Sequence[int], n: int, tail: Sequence[int] | None = None) -> Perm:
    missing = [v for v in range(1, n + 1) if v not in set(phi)]
    if tail is not None:
        missing = [missing[i] for i in tail]
    return tuple(phi) + tuple(missing)


def omega_ispace(E: ModuleSpectrum) -> tuple[ISpace, list[np.ndarray], dict[str, Any]]:
    """The I-space n |-> Omega^n E_n with the phi = phi_bar o iota action.

    Level n is the realization of loops(E_n, n), whose simplices are the
    n-cycles of E_n (a discrete set since E_n has no chains above n).
    iota_* is z |-> sigma^(n-m)(z); phi_bar_* is sign(phi_bar) times the
    permutation action.
    """
    if not getattr(E, "dk_backed", False):
        raise NotDkBacked(f"{getattr(E, 'name', E)!r} has no Dold-Kan model")
    R, N = E.ring, E.N
    loops_models = [loops(E.level_model(n), n) for n in range(N + 1)]
    elements = [L.cycles(0) for L in loops_models]
    levels = [L.realize() for L in loops_models]
    index = [RowIndex(el) for el in elements]
    shift: dict[tuple[int, int], np.ndarray] = {}

    def iota_star(m, n):
        if (m, n) not in shift:
            A = np.eye(len(E.basis(m, m)), dtype=np.int64)
            for t in range(m, n):
                A = E.struct_chain(t, t) @ A
            shift[(m, n)] = A
        return shift[(m, n)]

    def action_matrix(phi, m, n, tail=None):
        bar = _complete_perm(phi, n, tail)
        return perm_sign(bar) * E.act_chain(n, bar, n) @ iota_star(m, n)

    def rule(phi, m, n):
        A = to_ring(R, action_matrix(phi, m, n))
        img = index[n].lookup(ring_apply(R, A, elements[m]))
        if np.any(img < 0):
            raise LawViolation("omega", f"phi_* of an {m}-cycle is not an {n}-cycle", {"injection": list(phi)})
        return [img]

    X = ISpace.from_rule(N, levels, rule, name=f"Omega({E.name})")
    X.check()
    # independence of the choice of phi_bar: every completion agrees
    checked = 0
    I = X.cat
    for g in range(I.n_mor):
        m, n, phi = I.mor_labels[g]
        ref = X.mor[g].maps[0]
        for tail in itertools.permutations(range(n - m)):
            A = to_ring(R, action_matrix(phi, m, n, tail))
            if not np.array_equal(index[n].lookup(ring_apply(R, A, elements[m])), ref):
                raise LawViolation("omega", f"phi_* depends on the completion of {phi}", {"injection": list(phi), "tail": list(tail)})
            checked += 1
    info = {"phi_bar_choices_checked": checked, "cutoff": N + 1}
    return X, elements, info


def omega_bullet(E: ModuleSpectrum) -> FcpStruct:
    """Omega-bullet of a DK-backed ring spectrum as an FCP (discrete levels).

    mu_(m,n)(z, w) is the shuffle product of the cycles z and w, pushed
    through E_m ^ E_n -> E_(m+n).
    """
    if not getattr(E, "dk_backed", False):
        raise NotDkBacked(f"{getattr(E, 'name', E)!r} has no Dold-Kan model")
    if not E.is_ring:
        raise LawViolation("ring", f"{E.name} is not a ring spectrum")
    X, elements, info = omega_ispace(E)
    R, N = E.ring, E.N
    index = [RowIndex(el) for el in elements]
    mult = {}
    for m in range(N + 1):
        for n in range(N + 1 - m):
            T = to_ring(R, E.mult_chain(m, n, m, n))  # a x b x r
            Z, W = elements[m], elements[n]
            out = np.empty((len(Z), len(W)), dtype=np.int64)
            for i, z in enumerate(Z):
                for j, w in enumerate(W):
                    coeff = R.mul[z[:, None], w[None, :]]  # a x b
                    acc = np.full(T.shape[2], R.zero, dtype=np.int64)
                    for a in range(T.shape[0]):
                        for b in range(T.shape[1]):
                            acc = R.add[acc, R.mul[coeff[a, b], T[a, b]]]
                    out[i, j] = index[m + n].get(acc)
            if np.any(out < 0):
                raise LawViolation("omega", f"product of cycles at levels {(m, n)} is not a cycle")
            mult[(m, n)] = [out]
    unit_vec = to_ring(R, E.iota(0))
    S = FcpStruct(X, index[0].get(unit_vec), mult, commutative=True, degrees=0)
    report = check_fcp(S)
    S.meta.update(info)
    S.meta.update({"ring": R, "spectrum": E.name, "elements": elements, "fcp_checks": report.checks})
    return S


def fundamental_coefficients(S: FcpStruct, E: ModuleSpectrum, n: int) -> list[int]:
    """For each element z of level n, the r in R with z = r iota_n."""
    R = E.ring
    iota = to_ring(R, E.iota(n))
    multiples = {R.mul[r, iota].tobytes(): r for r in range(R.size)}
    out = []
    for z in S.meta["elements"][n]:
        r = multiples.get(np.ascontiguousarray(z, dtype=np.int64).tobytes())
        if r is None:
            raise LawViolation("omega", f"cycle {z.tolist()} at level {n} is not a multiple of iota_{n}")
        out.append(r)
    return out


# --------------------------------------------------------------------------
# the Sigma+ / Omega adjunction


@dataclass
class AdjunctionReport:
    instance: str
    hom_sigma: int
    hom_omega: int
    ok: bool
    witness: Any = None

    def to_json(self) -> dict[str, Any]:
        return {"instance": self.instance, "hom_sigma": self.hom_sigma, "hom_omega": self.hom_omega, "bijection": self.ok, "witness": self.witness}


class _LinearSystem:
    def __init__(self):
        self.nvars = 0
        self.rows: list[dict[int, int]] = []

    def add(self, expr: dict[int, int]) -> None:
        expr = {v: c for v, c in expr.items() if c}
        if expr:
            self.rows.append(expr)

    def matrix(self, R: FinCommRing) -> np.ndarray:
        A = np.zeros((len(self.rows), self.nvars), dtype=np.int64)
        for i, row in enumerate(self.rows):
            for v, c in row.items():
                A[i, v] = c
        return to_ring(R, A)


def _hom_sigma(X: ISpace, E: ModuleSpectrum):
    """All maps of spectra Sigma+ X -> R~[L], solved as a linear system over R.

    A pointed simplicial map K -> R~[L] is a choice, for every
    nondegenerate simplex a of K, of a vector f(a) over the non-basepoint
    simplices of L in the same degree, subject to d_i f(a) = f(d_i a).
    """
    R, L = E.ring, E.base
    N = E.N
    top = L.top
    K = sigma_bullet_plus(X, N, top)
    sys = _LinearSystem()
    var: dict[tuple[int, int, int], int] = {}  # (n, k, simplex) -> first variable
    coords: dict[tuple[int, int], dict[int, int]] = {}

    def coord(n, k):
        if (n, k) not in coords:
            Ln = L.levels[n]
            coords[(n, k)] = {i: c for c, i in enumerate(i for i in range(Ln.space.counts[k]) if i != Ln.base(k))}
        return coords[(n, k)]

    for n in range(N + 1):
        Kn = K.levels[n]
        for k in range(top + 1):
            for a in Kn.space.nondegenerate(k):
                if a == Kn.base(k):
                    continue
                var[(n, k, int(a))] = sys.nvars
                sys.nvars += len(coord(n, k))

    def value(n, k, a) -> list[dict[int, int]]:
        """f_n(a) as one linear form per coordinate of L_n in degree k."""
        Kn, Ln = K.levels[n], L.levels[n].space
        out = [dict() for _ in coord(n, k)]
        z, p, theta = Kn.space.canonical_forms()[k][a]
        if z == Kn.base(p):
            return out
        first = var[(n, p, z)]
        cp, ck = coord(n, p), coord(n, k)
        for t, c in cp.items():
            t2 = Ln.act(p, t, theta) if p != k else t
            if t2 in ck:
                row = out[ck[t2]]
                row[first + c] = row.get(first + c, 0) + 1
        return out

    def face_of(n, k, i, vals):
        Ln = L.levels[n].space
        out = [dict() for _ in coord(n, k - 1)]
        ck, cm = coord(n, k), coord(n, k - 1)
        inv = {c: t for t, c in ck.items()}
        for c, form in enumerate(vals):
            t2 = int(Ln.faces[k][i][inv[c]])
            if t2 in cm:
                row = out[cm[t2]]
                for v, w in form.items():
                    row[v] = row.get(v, 0) + w
        return out

    def minus(a, b):
        out = []
        for x, y in zip(a, b):
            r = dict(x)
            for v, w in y.items():
                r[v] = r.get(v, 0) - w
            out.append(r)
        return out

    for (n, k, a), _ in list(var.items()):
        Kn = K.levels[n].space
        mine = value(n, k, a)
        if k >= 1:
            for i in range(k + 1):
                for row in minus(face_of(n, k, i, mine), value(n, k - 1, int(Kn.faces[k][i][a]))):
                    sys.add(row)
        key = Kn.keys[k][a]
        for pi in _adjacent(n):
            b = K.index(n, k, K.act_key(n, pi, k, key))
            lhs = value(n, k, b)
            Ln = L.levels[n].space
            moved = [dict() for _ in coord(n, k)]
            ck = coord(n, k)
            for t, c in ck.items():
                t2 = L.index(n, k, L.act_key(n, pi, k, Ln.keys[k][t]))
                if t2 in ck:
                    moved[ck[t2]] = mine[c]
            for row in minus(lhs, moved):
                sys.add(row)
    for n in range(N):
        Kn, Ln = K.levels[n].space, L.levels[n].space
        for k in range(1, top + 1):
            ck, ck1 = coord(n, k), coord(n + 1, k)
            for a in range(Kn.counts[k]):
                if a == K.levels[n].base(k):
                    continue
                mine = value(n, k, a)
                for s in range(1, k + 1):
                    tgt = K.index(n + 1, k, K.struct_key(n, k, Kn.keys[k][a], s))
                    lhs = value(n + 1, k, tgt) if tgt != K.levels[n + 1].base(k) else [dict() for _ in ck1]
                    rhs = [dict() for _ in ck1]
                    for t, c in ck.items():
                        t2 = L.index(n + 1, k, L.struct_key(n, k, Ln.keys[k][t], s))
                        if t2 in ck1:
                            row = rhs[ck1[t2]]
                            for v, w in mine[c].items():
                                row[v] = row.get(v, 0) + w
                    for row in minus(lhs, rhs):
                        sys.add(row)
    A = sys.matrix(R)
    sols = ring_kernel(R, A)
    return K, sols, var, coord, value


def _hom_omega(X: ISpace, S_act: ISpace):
    """Natural transformations X -> Omega E into discrete levels, as rows of
    per-(level, component) element choices."""
    from .sset import pi0

    I = X.cat
    comps = [pi0(X.obj[n]) for n in range(X.N + 1)]
    offs, total = [], 0
    for c in comps:
        offs.append(total)
        total += c.count
    sizes = [S_act.obj[n].counts[0] for n in range(X.N + 1)]
    S = np.zeros((1, 0), dtype=np.int64)
    for n in range(X.N + 1):
        for _ in range(comps[n].count):
            vals = np.arange(sizes[n])
            S = np.concatenate([np.repeat(S, len(vals), axis=0), np.tile(vals, len(S))[:, None]], axis=1)
        for g in range(I.n_mor):
            a, b = int(I.src[g]), int(I.tgt[g])
            if b != n:
                continue
            fx = X.mor[g].maps[0]
            om = S_act.mor[g].maps[0]
            for v in range(X.obj[a].counts[0]):
                ca = offs[a] + int(comps[a].vertex_labels[v])
                cb = offs[b] + int(comps[b].vertex_labels[int(fx[v])])
                S = S[S[:, cb] == om[S[:, ca]]]
        if len(S) > BUDGET:
            raise ConfigError("too many natural transformations to enumerate")
    return S, comps, offs


def adjunction_audit(X: ISpace, E: ModuleSpectrum, name: str = "") -> AdjunctionReport:
    """Hom(Sigma+ X, E) ~ Hom(X, Omega E) by explicit mutually inverse maps.

    Phi(f)_n(x) is the normalized chain of f_n(x ^ iota_n); Psi(g)_n sends
    x ^ t to r t where g_n(x) = r iota_n.  Both composites must be
    identities; otherwise BijectionFailure carries the offending map.
    """
    if not getattr(E, "dk_backed", False):
        raise NotDkBacked("the adjunction audit needs a Dold-Kan backed spectrum")
    R, N = E.ring, E.N
    if X.N < N:
        raise ConfigError(f"X is defined through level {X.N}, the spectrum through {N}")
    X = X.restrict(N) if X.N > N else X
    Om, elements, _ = omega_ispace(E)
    K, sols, var, coord, value = _hom_sigma(X, E)
    G, comps, offs = _hom_omega(X, Om)
    label = name or f"{X.name or 'X'} vs {E.name}"
    iotas = [to_ring(R, E.iota(n)) for n in range(N + 1)]
    index = [RowIndex(el) for el in elements]
    multiples = []
    for n in range(N + 1):
        mp = {}
        for r in range(R.size):
            j = index[n].get(R.mul[r, iotas[n]]) if len(iotas[n]) else index[n].get(np.zeros(0, dtype=np.int64))
            if j >= 0:
                mp[j] = r
        multiples.append(mp)
    L = E.base

    def evaluate(form: dict[int, int], sol: np.ndarray) -> int:
        acc = R.zero
        for v, c in form.items():
            acc = int(R.add[acc, R.mul[R.from_int(c), sol[v]]])
        return acc

    def phi(sol: np.ndarray) -> np.ndarray:
        out = np.zeros(G.shape[1], dtype=np.int64)
        for n in range(N + 1):
            Xn = X.obj[n]
            basis_n = E.basis(n, n)
            Un = K.source.obj[n]
            for v in range(Xn.counts[0]):
                xn = v
                for q in range(n):
                    xn = int(Un.degens[q][0][xn])
                chain = np.full(len(basis_n), R.zero, dtype=np.int64)
                for c, tkey in enumerate(basis_n):
                    coef = int(iotas[n][c])
                    if coef == R.zero:
                        continue
                    a = K.index(n, n, (xn, tkey))
                    vals = value(n, n, a)
                    ck = coord(n, n)
                    Ln = L.levels[n].space
                    for t, cc in ck.items():
                        r = E.chain_of(n, n, Ln.keys[n][t])
                        if r >= 0:
                            chain[r] = R.add[chain[r], R.mul[coef, evaluate(vals[cc], sol)]]
                j = index[n].get(chain)
                if j < 0:
                    raise BijectionFailure("Phi(f) is not a cycle", {"level": n})
                slot = offs[n] + int(comps[n].vertex_labels[v])
                out[slot] = j
        return out

    def psi(g: np.ndarray) -> np.ndarray:
        sol = np.full(sols.shape[1], R.zero, dtype=np.int64)
        for (n, k, a), first in var.items():
            key = K.levels[n].space.keys[k][a]
            x, t = key
            v = int(K.source.obj[n].vertex_of(k)[x])
            j = int(g[offs[n] + int(comps[n].vertex_labels[v])])
            if j not in multiples[n]:
                raise BijectionFailure(f"element {j} of level {n} is not a multiple of iota_{n}", {"level": n, "element": j})
            r = multiples[n][j]
            t_idx = L.levels[n].space.key_index(k).get(t, -1)
            ck = coord(n, k)
            if t_idx in ck:
                sol[first + ck[t_idx]] = r
        return sol

    sol_index = RowIndex(sols)
    g_index = RowIndex(G)
    for g in G:
        f = psi(g)
        if sol_index.get(f) < 0:
            return _fail(label, sols, G, {"psi_not_a_map": g.tolist()})
        if not np.array_equal(phi(f), g):
            return _fail(label, sols, G, {"phi_psi": g.tolist()})
    for f in sols:
        g = phi(f)
        if g_index.get(g) < 0:
            return _fail(label, sols, G, {"phi_not_natural": f.tolist()})
        if not np.array_equal(psi(g), f):
            return _fail(label, sols, G, {"psi_phi": f.tolist()})
    return AdjunctionReport(label, len(sols), len(G), True)


def _fail(label, sols, G, witness):
    raise BijectionFailure(f"adjunction bijection fails for {label}: |Hom(Sigma+X, E)| = {len(sols)}, |Hom(X, Omega E)| = {len(G)}", {"instance": label, "hom_sigma": len(sols), "hom_omega": len(G), **witness})


# --------------------------------------------------------------------------
# naive homotopy groups


@dataclass
class SpectrumHomotopy:
    groups: list[AbelianGroup]
    evidence: list[dict[str, Any]]
    N: int

    def to_json(self) -> dict[str, Any]:
        return {"N": self.N, "groups": [g.to_strings() for g in self.groups], "evidence": self.evidence}


def _induced_iso_finite(src: DkModel, a: int, tgt: DkModel, b: int, A: np.ndarray) -> bool:
    R = src.ring
    Ha, Hb = src.homology_group(a), tgt.homology_group(b)
    if Ha != Hb:
        return False
    Z, Ba = src.cycles(a), src.boundaries(a)
    if Z.shape[1] == 0:
        return True
    img = ring_apply(R, to_ring(R, A), Z)
    hits = RowIndex(tgt.boundaries(b)).lookup(img) >= 0
    return int(hits.sum()) == len(Ba)


def spectrum_homotopy(E, k_max: int) -> SpectrumHomotopy:
    """colim_n pi_(k+n) E_n, accepted once one structure map is an iso."""
    groups, evidence = [], []
    if isinstance(E, ModuleSpectrum):
        for k in range(k_max + 1):
            found = None
            for n in range(E.N):
                src, tgt = E.level_model(n), E.level_model(n + 1)
                a = k + n
                if a > src.top and a + 1 > tgt.top:
                    found = (n, AbelianGroup())
                    break
                A = E.struct_chain(n, a) if a <= src.top else np.zeros((0, 0), dtype=np.int64)
                if a <= src.top and a + 1 <= tgt.top and _induced_iso_finite(src, a, tgt, a + 1, A):
                    found = (n, src.homology_group(a))
                    break
            if found is None:
                raise NotStabilized(f"pi_{k} has not stabilized by level {E.N}", {"k": k, "N": E.N})
            groups.append(found[1])
            evidence.append({"k": k, "stable_from": found[0], "via": "structure-map iso on Moore homology"})
        return SpectrumHomotopy(groups, evidence, E.N)
    if not isinstance(E, SymSpectrum):
        raise NotDkBacked("spectrum_homotopy needs a spectrum")
    if E.is_trivial:
        return SpectrumHomotopy([AbelianGroup()] * (k_max + 1), [{"k": k, "stable_from": 0, "via": "trivial levels"} for k in range(k_max + 1)], E.N)
    for k in range(k_max + 1):
        if k >= 1:
            raise NotStabilized(f"pi_{k} of a simplicial-set spectrum is outside the Hurewicz range", {"k": k, "N": E.N})
        found = None
        for n in range(2, E.N):
            if n + 2 > E.top:
                break
            F, Sm = E.struct_map(n)
            below = reduced_homology(E.levels[n].space, n)
            if any(not g.is_trivial for g in below[:n]):
                continue
            ok, info = induced_iso(F, n + 1)
            if ok:
                found = (n, below[n])
                break
        if found is None:
            raise NotStabilized(f"pi_0 has not stabilized by level {E.N}", {"k": 0, "N": E.N})
        groups.append(found[1])
        evidence.append({"k": 0, "stable_from": found[0], "via": "Hurewicz and structure-map homology iso"})
    return SpectrumHomotopy(groups, evidence, E.N)
