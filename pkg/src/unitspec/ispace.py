"""The truncated injection category, I-spaces, box products and FCPs.

An object of ``InjCat(N)`` is n in 0..N (the set {1..n}); a morphism
m -> n is an injection stored as the tuple of its values.

Box product representatives: a simplex of (X [] Y)(m) is written
``(A, x, y)`` where A is the subset of {1..m} carrying the X-factor (so
x lives in X(|A|) and y in Y(m - |A|)).  This is the coset
Sigma_m / (Sigma_a x Sigma_b) picked by its block-increasing
representative.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .barcat import DiagramF, FinCat, hocolim
from .errors import LawViolation, ObjectOutOfRange, TruncationTooSmall
from .sset import FinSSet, SMap, disjoint_union, induced_iso, pi0, product, quotient

Inj = tuple[int, ...]


def injections(m: int, n: int) -> list[Inj]:
    return list(itertools.permutations(range(1, n + 1), m))


def compose_inj(g: Inj, f: Inj) -> Inj:
    return tuple(g[v - 1] for v in f)


def rank_injection(sub: Sequence[int], sup: Sequence[int]) -> Inj:
    """Injection |sub| -> |sup| sending i to the rank of sub[i] in sorted(sup)."""
    order = {v: r + 1 for r, v in enumerate(sorted(sup))}
    return tuple(order[v] for v in sub)


class InjCat(FinCat):
    """The full subcategory of finite sets and injections on 0..N."""

    def __init__(self, N: int):
        objs = list(range(N + 1))
        mors = [(m, n, (m, n, f)) for n in objs for m in range(n + 1) for f in injections(m, n)]
        base = FinCat.from_compose(
            objs,
            mors,
            lambda g, f: (f[0], g[1], compose_inj(g[2], f[2])),
            lambda o: (o, o, tuple(range(1, o + 1))),
            name=f"I<={N}",
        )
        FinCat.__init__(self, base.obj_labels, base.src, base.tgt, base.ident, base.comp, base.mor_labels, name=base.name)
        self.N = N

    def inj(self, f: Inj, n: int) -> int:
        return self.mor((len(f), n, tuple(f)))

    def values(self, m: int) -> Inj:
        return self.mor_labels[m][2]

    def generators(self, positive: bool = False) -> list[int]:
        """Adjacent transpositions and the standard inclusions n -> n+1."""
        out = []
        lo = 1 if positive else 0
        for n in range(lo, self.N + 1):
            for i in range(1, n):
                vals = list(range(1, n + 1))
                vals[i - 1], vals[i] = vals[i], vals[i - 1]
                out.append(self.inj(tuple(vals), n))
            if n < self.N:
                out.append(self.inj(tuple(range(1, n + 1)), n + 1))
        return out

    def block_sum(self, f: Inj, n: int, g: Inj, n2: int) -> int:
        """f (+) g : m + m2 -> n + n2."""
        return self.inj(tuple(f) + tuple(n + v for v in g), n + n2)


@lru_cache(maxsize=None)
def inj_cat(N: int) -> InjCat:
    return InjCat(N)


class ISpace(DiagramF):
    """Functor InjCat(N) -> FinSSet."""

    @property
    def cat(self) -> InjCat:
        return self.base  # type: ignore[return-value]

    @property
    def N(self) -> int:
        return self.cat.N

    def level(self, n: int) -> FinSSet:
        return self.obj[n]

    def act(self, f: Inj, n: int) -> SMap:
        return self.mor[self.cat.inj(f, n)]

    @classmethod
    def from_rule(cls, N: int, levels: Sequence[FinSSet], rule: Callable[[Inj, int, int], Sequence[np.ndarray]], name: str = "") -> "ISpace":
        """``rule(f, m, n)`` returns the per-degree arrays of X(f)."""
        I = inj_cat(N)
        mors = []
        for k in range(I.n_mor):
            m, n, f = I.mor_labels[k]
            mors.append(SMap(levels[m], levels[n], rule(f, m, n)))
        return cls(I, list(levels), mors, name=name)

    @classmethod
    def constant(cls, N: int, A: FinSSet, name: str = "") -> "ISpace":
        I = inj_cat(N)
        ident = SMap.identity(A)
        return cls(I, [A] * (N + 1), [ident] * I.n_mor, name=name or "const", constant=True)

    @classmethod
    def terminal(cls, N: int) -> "ISpace":
        return cls.constant(N, FinSSet.point(), name="*")

    def restrict(self, N: int) -> "ISpace":
        I = inj_cat(N)
        mors = [self.mor[self.cat.mor(lab)] for lab in I.mor_labels]
        return ISpace(I, self.obj[: N + 1], mors, name=self.name, constant=self.constant)

    def to_json(self) -> dict[str, Any]:
        I = self.cat
        return {
            "N": self.N,
            "name": self.name,
            "levels": [X.to_json() for X in self.obj],
            "generators": [
                {"injection": list(I.values(g)), "target": int(I.tgt[g]), "maps": [m.tolist() for m in self.mor[g].maps]}
                for g in I.generators()
            ],
        }


# --------------------------------------------------------------------------
# building blocks


def orbit_ispace(N: int, d: int, H: Sequence[Inj] = (), A: FinSSet | None = None, name: str = "") -> ISpace:
    """(I(d, -) / H) x A for a subgroup H of Sigma_d acting by precomposition."""
    if d > N:
        raise ObjectOutOfRange(f"object {d} outside 0..{N}")
    group = {tuple(range(1, d + 1))} | {tuple(h) for h in H}
    # close under composition
    while True:
        new = {compose_inj(a, b) for a in group for b in group} - group
        if not new:
            break
        group |= new
    orbits: list[list[Inj]] = []
    orbit_of: list[dict[Inj, int]] = []
    for n in range(N + 1):
        seen: dict[Inj, int] = {}
        reps: list[Inj] = []
        for f in injections(d, n):
            if f in seen:
                continue
            idx = len(reps)
            reps.append(f)
            for h in group:
                seen[compose_inj(f, h)] = idx
        orbits.append(reps)
        orbit_of.append(seen)
    A = FinSSet.point() if A is None else A
    sets = [FinSSet.discrete(len(orbits[n])) for n in range(N + 1)]
    levels = [product(S, A) if A.counts != (1,) or A.dim_top else S for S in sets]
    top = [L.dim_top for L in levels]

    def rule(f, m, n):
        pts = np.array([orbit_of[n][compose_inj(f, g)] for g in orbits[m]], dtype=np.int64)
        if levels[m] is sets[m]:
            return [pts]
        Ak = A.extend(top[m])
        out = []
        for k in range(top[m] + 1):
            na = Ak.counts[k]
            idx = np.arange(levels[m].counts[k])
            out.append(pts[idx // na] * na + idx % na)
        return out

    return ISpace.from_rule(N, levels, rule, name=name or f"I({d},-)/H x A")


def free_ispace(d: int, A: FinSSet, N: int) -> ISpace:
    """F_d A = I(d, -) x A, left adjoint to evaluation at d."""
    return orbit_ispace(N, d, (), A, name=f"F_{d}")


def coproduct(X: ISpace, Y: ISpace) -> ISpace:
    top = max(_max_dim(X), _max_dim(Y))
    X, Y = uniform(X, top), uniform(Y, top)
    levels = [disjoint_union(X.obj[n], Y.obj[n]) for n in range(X.N + 1)]

    def rule(f, m, n):
        fx, fy = X.act(f, n), Y.act(f, n)
        return [np.concatenate([fx.maps[k], fy.maps[k] + X.obj[n].counts[k]]) for k in range(top + 1)]

    return ISpace.from_rule(X.N, levels, rule, name=f"({X.name}+{Y.name})")


def _ext_map(f: SMap, k: int, src: FinSSet, tgt: FinSSet) -> np.ndarray:
    if k <= f.dim:
        return f.maps[k]
    return f.extend(src.extend(k), tgt.extend(k)).maps[k]


def uniform(X: ISpace, top: int) -> ISpace:
    """Copy with every level materialised through degree ``top``."""
    ext = X.extended(top)
    return ISpace(ext.base, ext.obj, ext.mor, name=X.name, constant=X.constant)


@dataclass
class ISpaceMap:
    source: ISpace
    target: ISpace
    components: list[SMap]

    def check_natural(self) -> None:
        I = self.source.cat
        for g in range(I.n_mor):
            a, b = int(I.src[g]), int(I.tgt[g])
            lhs = self.components[b].compose(self.source.mor[g])
            rhs = self.target.mor[g].compose(self.components[a])
            if lhs != rhs:
                raise LawViolation("naturality", f"square fails for injection {I.values(g)} into {b}", {"morphism": g})


# --------------------------------------------------------------------------
# box product via the coequalizer formula


@dataclass
class BoxLevel:
    blocks: list[tuple[int, ...]]
    block_index: dict[tuple[int, ...], int]
    offsets: list[np.ndarray]  # per degree, per block
    ny: list[np.ndarray]  # per degree, per block: |Y(b)_k|
    raw: FinSSet
    quotient: FinSSet
    relabel: SMap


def _subsets(m: int) -> list[tuple[int, ...]]:
    return [c for r in range(m + 1) for c in itertools.combinations(range(1, m + 1), r)]


def _box_level(X: ISpace, Y: ISpace, m: int, top: int) -> BoxLevel:
    blocks = _subsets(m)
    parts = [product(X.obj[len(A)], Y.obj[m - len(A)]).extend(top) for A in blocks]
    raw = parts[0]
    for P in parts[1:]:
        raw = disjoint_union(raw, P)
    offsets, ny = [], []
    for k in range(top + 1):
        sizes = np.array([P.counts[k] for P in parts], dtype=np.int64)
        offsets.append(np.concatenate([[0], np.cumsum(sizes)[:-1]]))
        ny.append(np.array([Y.obj[m - len(A)].counts[k] for A in blocks], dtype=np.int64))
    bi = {A: i for i, A in enumerate(blocks)}
    classes = []
    for k in range(top + 1):
        n = raw.counts[k]
        rows: list[np.ndarray] = []
        cols: list[np.ndarray] = []
        for labels in itertools.product(range(3), repeat=m):
            Sa = tuple(i + 1 for i in range(m) if labels[i] == 0)
            Sb = tuple(i + 1 for i in range(m) if labels[i] == 1)
            Sc = tuple(i + 1 for i in range(m) if labels[i] == 2)
            if not Sb:
                continue
            A1 = tuple(sorted(Sa + Sb))
            rx = _ext_map(X.act(rank_injection(Sa, A1), len(A1)), k, X.obj[len(Sa)], X.obj[len(A1)])
            BC = tuple(sorted(Sb + Sc))
            ry = _ext_map(Y.act(rank_injection(Sc, BC), len(BC)), k, Y.obj[len(Sc)], Y.obj[len(BC)])
            nxa, nyc = X.obj[len(Sa)].counts[k], Y.obj[len(Sc)].counts[k]
            xs = np.repeat(np.arange(nxa), nyc)
            ys = np.tile(np.arange(nyc), nxa)
            b1, b2 = bi[A1], bi[Sa]
            left = offsets[k][b1] + rx[xs] * ny[k][b1] + ys
            right = offsets[k][b2] + xs * ny[k][b2] + ry[ys]
            rows.append(left)
            cols.append(right)
        if rows:
            r, c = np.concatenate(rows), np.concatenate(cols)
        else:
            r = c = np.empty(0, dtype=np.int64)
        g = coo_matrix((np.ones(len(r)), (r, c)), shape=(n, n))
        _, labels_k = connected_components(g, directed=False)
        classes.append(labels_k)
    Q, q = quotient(raw, classes)
    return BoxLevel(blocks, bi, offsets, ny, raw, Q, q)


def _max_dim(X: ISpace) -> int:
    return max(max((k for k in range(L.dim_top + 1) if len(L.nondegenerate(k))), default=0) for L in X.obj)


def box(X: ISpace, Y: ISpace, top: int | None = None) -> ISpace:
    """(X [] Y)(m) as the coequalizer over a + b + c = m."""
    N = X.N
    if top is None:
        top = _max_dim(X) + _max_dim(Y)
    X, Y = uniform(X, top), uniform(Y, top)
    lv = [_box_level(X, Y, m, top) for m in range(N + 1)]
    return _box_ispace(X, Y, lv, top, name=f"({X.name}[]{Y.name})")


def _box_ispace(X: ISpace, Y: ISpace, lv: list[BoxLevel], top: int, name: str) -> ISpace:
    N = X.N

    def rule(f, m, n):
        src, tgt = lv[m], lv[n]
        missing = tuple(v for v in range(1, n + 1) if v not in set(f))
        out = []
        for k in range(top + 1):
            arr = np.empty(src.quotient.counts[k], dtype=np.int64)
            for bi, A in enumerate(src.blocks):
                Ac = tuple(v for v in range(1, m + 1) if v not in set(A))
                fA = tuple(f[v - 1] for v in A)
                fAc = tuple(f[v - 1] for v in Ac)
                A2 = tuple(sorted(fA))
                rest = tuple(sorted(missing + fAc))
                alpha = rank_injection(fA, A2)
                beta = rank_injection(fAc, rest)
                mx = _ext_map(X.act(alpha, len(A2)), k, X.obj[len(A)], X.obj[len(A2)])
                my = _ext_map(Y.act(beta, len(rest)), k, Y.obj[len(Ac)], Y.obj[len(rest)])
                nx, nyb = X.obj[len(A)].counts[k], src.ny[k][bi]
                idx = np.arange(nx * nyb)
                xs, ys = idx // nyb, idx % nyb
                b2 = tgt.block_index[A2]
                raw_t = tgt.offsets[k][b2] + mx[xs] * tgt.ny[k][b2] + my[ys]
                raw_s = src.offsets[k][bi] + idx
                arr[src.relabel.maps[k][raw_s]] = tgt.relabel.maps[k][raw_t]
            out.append(arr)
        return out

    Z = ISpace.from_rule(N, [l.quotient for l in lv], rule, name=name)
    Z.box_levels = lv  # type: ignore[attr-defined]
    return Z


# --------------------------------------------------------------------------
# box product via the left Kan extension (oracle)


@dataclass
class OracleLevel:
    objects: list[tuple[int, int, Inj]]
    object_index: dict[tuple[int, int, Inj], int]
    offsets: list[np.ndarray]
    ny: list[np.ndarray]
    raw_counts: list[int]
    classes: list[np.ndarray]
    quotient: FinSSet
    relabel: SMap


def _oracle_level(X: ISpace, Y: ISpace, m: int, top: int) -> OracleLevel:
    objs = [(a, b, g) for a in range(m + 1) for b in range(m + 1 - a) for g in injections(a + b, m)]
    oi = {o: i for i, o in enumerate(objs)}
    parts = [product(X.obj[a], Y.obj[b]).extend(top) for a, b, _ in objs]
    raw = parts[0]
    for P in parts[1:]:
        raw = disjoint_union(raw, P)
    offsets, ny = [], []
    for k in range(top + 1):
        sizes = np.array([P.counts[k] for P in parts], dtype=np.int64)
        offsets.append(np.concatenate([[0], np.cumsum(sizes)[:-1]]))
        ny.append(np.array([Y.obj[b].counts[k] for _, b, _ in objs], dtype=np.int64))
    classes = []
    for k in range(top + 1):
        rows, cols = [], []
        for (a2, b2, g2) in objs:
            t = oi[(a2, b2, g2)]
            for a in range(a2 + 1):
                for b in range(b2 + 1):
                    for al in injections(a, a2):
                        for be in injections(b, b2):
                            ab = tuple(al) + tuple(a2 + v for v in be)
                            g = compose_inj(g2, ab)
                            s = oi[(a, b, g)]
                            mx = _ext_map(X.act(al, a2), k, X.obj[a], X.obj[a2])
                            my = _ext_map(Y.act(be, b2), k, Y.obj[b], Y.obj[b2])
                            nxa, nyb = X.obj[a].counts[k], Y.obj[b].counts[k]
                            xs = np.repeat(np.arange(nxa), nyb)
                            ys = np.tile(np.arange(nyb), nxa)
                            rows.append(offsets[k][s] + xs * nyb + ys)
                            cols.append(offsets[k][t] + mx[xs] * ny[k][t] + my[ys])
        n = raw.counts[k]
        r, c = np.concatenate(rows), np.concatenate(cols)
        gr = coo_matrix((np.ones(len(r)), (r, c)), shape=(n, n))
        _, lab = connected_components(gr, directed=False)
        classes.append(lab)
    Q, q = quotient(raw, classes)
    return OracleLevel(objs, oi, offsets, ny, list(raw.counts), classes, Q, q)


def box_oracle(X: ISpace, Y: ISpace, top: int | None = None) -> ISpace:
    """Pointwise colimit over ((a, b), a + b -> m): the left Kan extension."""
    N = X.N
    if top is None:
        top = _max_dim(X) + _max_dim(Y)
    X, Y = uniform(X, top), uniform(Y, top)
    lv = [_oracle_level(X, Y, m, top) for m in range(N + 1)]

    def rule(f, m, n):
        src, tgt = lv[m], lv[n]
        out = []
        for k in range(top + 1):
            arr = np.empty(src.quotient.counts[k], dtype=np.int64)
            for s, (a, b, g) in enumerate(src.objects):
                t = tgt.object_index[(a, b, compose_inj(f, g))]
                size = X.obj[a].counts[k] * Y.obj[b].counts[k]
                idx = np.arange(size)
                arr[src.relabel.maps[k][src.offsets[k][s] + idx]] = tgt.relabel.maps[k][tgt.offsets[k][t] + idx]
            out.append(arr)
        return out

    Z = ISpace.from_rule(N, [l.quotient for l in lv], rule, name=f"oracle({X.name}[]{Y.name})")
    Z.oracle_levels = lv  # type: ignore[attr-defined]
    return Z


@dataclass
class IsoReport:
    ok: bool
    levels: list[int]
    witness: Any = None

    def to_json(self) -> dict[str, Any]:
        return {"ok": self.ok, "levels": self.levels, "witness": self.witness}


def _check_level_bijection(maps: list[list[np.ndarray]], S: ISpace, T: ISpace) -> IsoReport:
    """maps[m][k]: simplices of S(m) -> T(m); check bijective, simplicial, natural."""
    I = S.cat
    for m, mk in enumerate(maps):
        for k, arr in enumerate(mk):
            if len(arr) != T.obj[m].counts[k] or len(np.unique(arr)) != len(arr):
                return IsoReport(False, [], {"level": m, "degree": k, "problem": "not a bijection"})
        try:
            SMap(S.obj[m], T.obj[m], mk, check=True)
        except Exception as exc:  # noqa: BLE001
            return IsoReport(False, [], {"level": m, "problem": str(exc)})
    for g in range(I.n_mor):
        a, b = int(I.src[g]), int(I.tgt[g])
        for k in range(len(maps[a])):
            lhs = maps[b][k][S.mor[g].maps[k]]
            rhs = T.mor[g].maps[k][maps[a][k]]
            if not np.array_equal(lhs, rhs):
                return IsoReport(False, [], {"injection": list(I.values(g)), "target": b, "degree": k, "problem": "naturality"})
    return IsoReport(True, [int(sum(T.obj[m].counts)) for m in range(len(maps))])


def compare_box_with_oracle(X: ISpace, Y: ISpace) -> IsoReport:
    """Explicit levelwise bijection (A, x, y) -> (|A|, |A^c|, g_A, x, y)."""
    top = _max_dim(X) + _max_dim(Y)
    X, Y = uniform(X, top), uniform(Y, top)
    Z, O = box(X, Y, top), box_oracle(X, Y, top)
    lv, olv = Z.box_levels, O.oracle_levels  # type: ignore[attr-defined]
    maps = []
    for m in range(X.N + 1):
        per = []
        for k in range(lv[m].quotient.dim_top + 1):
            arr = np.full(lv[m].quotient.counts[k], -1, dtype=np.int64)
            for bi, A in enumerate(lv[m].blocks):
                Ac = tuple(v for v in range(1, m + 1) if v not in set(A))
                t = olv[m].object_index[(len(A), len(Ac), A + Ac)]
                size = X.obj[len(A)].counts[k] * Y.obj[len(Ac)].counts[k]
                idx = np.arange(size)
                src_cls = lv[m].relabel.maps[k][lv[m].offsets[k][bi] + idx]
                tgt_cls = olv[m].relabel.maps[k][olv[m].offsets[k][t] + idx]
                prev = arr[src_cls]
                if np.any((prev >= 0) & (prev != tgt_cls)):
                    return IsoReport(False, [], {"level": m, "degree": k, "problem": "not well defined"})
                arr[src_cls] = tgt_cls
            per.append(arr)
        maps.append(per)
    return _check_level_bijection(maps, Z, O)


def free_box_identity(m: int, n: int, N: int) -> IsoReport:
    """F_m(*) [] F_n(*) = F_{m+n}(*) via (A, f, g) -> (A[f], A^c[g])."""
    Fm, Fn, Fmn = free_ispace(m, FinSSet.point(), N), free_ispace(n, FinSSet.point(), N), free_ispace(m + n, FinSSet.point(), N)
    Z = box(Fm, Fn)
    lv = Z.box_levels  # type: ignore[attr-defined]
    maps = []
    for k in range(N + 1):
        arr = np.full(lv[k].quotient.counts[0], -1, dtype=np.int64)
        targets = {f: i for i, f in enumerate(injections(m + n, k))}
        for bi, A in enumerate(lv[k].blocks):
            Ac = tuple(v for v in range(1, k + 1) if v not in set(A))
            fs, gs = injections(m, len(A)), injections(n, len(Ac))
            for i, f in enumerate(fs):
                for j, g in enumerate(gs):
                    cls = lv[k].relabel.maps[0][lv[k].offsets[0][bi] + i * len(gs) + j]
                    val = targets.get(tuple(A[v - 1] for v in f) + tuple(Ac[v - 1] for v in g), -1)
                    if arr[cls] >= 0 and arr[cls] != val:
                        return IsoReport(False, [], {"level": k, "problem": "not well defined"})
                    arr[cls] = val
        if np.any(arr < 0):
            return IsoReport(False, [], {"level": k, "problem": "unmatched class"})
        maps.append([arr])
    return _check_level_bijection(maps, Z, Fmn)


def box_symmetry(X: ISpace, Y: ISpace) -> IsoReport:
    """X [] Y = Y [] X via (A, x, y) -> (A^c, y, x)."""
    top = _max_dim(X) + _max_dim(Y)
    X, Y = uniform(X, top), uniform(Y, top)
    L, R = box(X, Y, top), box(Y, X, top)
    lv, rv = L.box_levels, R.box_levels  # type: ignore[attr-defined]
    maps = []
    for m in range(X.N + 1):
        per = []
        for k in range(lv[m].quotient.dim_top + 1):
            arr = np.full(lv[m].quotient.counts[k], -1, dtype=np.int64)
            for bi, A in enumerate(lv[m].blocks):
                Ac = tuple(v for v in range(1, m + 1) if v not in set(A))
                b2 = rv[m].block_index[Ac]
                nx, ny = X.obj[len(A)].counts[k], lv[m].ny[k][bi]
                idx = np.arange(nx * ny)
                xs, ys = idx // ny, idx % ny
                src = lv[m].relabel.maps[k][lv[m].offsets[k][bi] + idx]
                tgt = rv[m].relabel.maps[k][rv[m].offsets[k][b2] + ys * rv[m].ny[k][b2] + xs]
                if np.any((arr[src] >= 0) & (arr[src] != tgt)):
                    return IsoReport(False, [], {"level": m, "problem": "not well defined"})
                arr[src] = tgt
            per.append(arr)
        maps.append(per)
    return _check_level_bijection(maps, L, R)


def box_associator(X: ISpace, Y: ISpace, Z: ISpace) -> IsoReport:
    """(X [] Y) [] Z = X [] (Y [] Z) on representatives (A, (B, x, y), z)."""
    top = _max_dim(X) + _max_dim(Y) + _max_dim(Z)
    X, Y, Z = uniform(X, top), uniform(Y, top), uniform(Z, top)
    XY, YZ = box(X, Y, top), box(Y, Z, top)
    L, R = box(XY, Z, top), box(X, YZ, top)
    lxy, lyz = XY.box_levels, YZ.box_levels  # type: ignore[attr-defined]
    lL, lR = L.box_levels, R.box_levels  # type: ignore[attr-defined]
    top = lL[0].quotient.dim_top
    maps = []
    for m in range(X.N + 1):
        per = []
        for k in range(top + 1):
            arr = np.full(lL[m].quotient.counts[k], -1, dtype=np.int64)
            for bi, A in enumerate(lL[m].blocks):
                a = len(A)
                Ac = tuple(v for v in range(1, m + 1) if v not in set(A))
                inner = lxy[a]
                for bj, B in enumerate(inner.blocks):
                    Bc = tuple(v for v in range(1, a + 1) if v not in set(B))
                    PX = tuple(A[v - 1] for v in B)
                    PY = tuple(A[v - 1] for v in Bc)
                    rest = tuple(sorted(PY + Ac))
                    C = tuple(r + 1 for r, v in enumerate(rest) if v in set(PY))
                    nx = X.obj[len(B)].counts[k]
                    ny = Y.obj[len(Bc)].counts[k]
                    nz = Z.obj[len(Ac)].counts[k]
                    xs, ys, zs = (g.ravel() for g in np.meshgrid(np.arange(nx), np.arange(ny), np.arange(nz), indexing="ij"))
                    w = inner.relabel.maps[k][inner.offsets[k][bj] + xs * ny + ys]
                    src = lL[m].relabel.maps[k][lL[m].offsets[k][bi] + w * lL[m].ny[k][bi] + zs]
                    yz = lyz[len(rest)]
                    cj = yz.block_index[C]
                    v = yz.relabel.maps[k][yz.offsets[k][cj] + ys * nz + zs]
                    r_blk = lR[m].block_index[PX]
                    tgt = lR[m].relabel.maps[k][lR[m].offsets[k][r_blk] + xs * lR[m].ny[k][r_blk] + v]
                    if np.any((arr[src] >= 0) & (arr[src] != tgt)):
                        return IsoReport(False, [], {"level": m, "problem": "not well defined"})
                    arr[src] = tgt
            per.append(arr)
        maps.append(per)
    return _check_level_bijection(maps, L, R)


# --------------------------------------------------------------------------
# FCP structures


@dataclass
class FcpStruct:
    """Unit in X(0) and multiplications mu[(m, n)] on simplices.

    ``mult[(m, n)][k]`` is an array of shape (|X(m)_k|, |X(n)_k|) giving
    the index of mu(x, y) in X(m + n)_k.
    """

    owner: ISpace
    unit: int
    mult: dict[tuple[int, int], list[np.ndarray]]
    commutative: bool = False
    degrees: int = 0
    meta: dict[str, Any] = field(default_factory=dict)

    def mu(self, m: int, n: int, k: int, x, y):
        return self.mult[(m, n)][k][x, y]

    def unit_simplex(self, k: int) -> int:
        X0 = self.owner.obj[0]
        u = self.unit
        for q in range(k):
            u = int(X0.degens[q][0][u])
        return u

    def to_json(self) -> dict[str, Any]:
        return {
            "N": self.owner.N,
            "unit": self.unit,
            "commutative": self.commutative,
            "degrees": self.degrees,
            "mult": {f"{m},{n}": [t.tolist() for t in v] for (m, n), v in sorted(self.mult.items())},
        }


def block_twist(m: int, n: int) -> Inj:
    """tau_{m,n}: m + n -> n + m moving the first block past the second."""
    return tuple(n + i for i in range(1, m + 1)) + tuple(range(1, n + 1))


@dataclass
class FcpReport:
    checks: dict[str, int]
    N: int

    def to_json(self) -> dict[str, Any]:
        return {"N": self.N, "checks": self.checks, "passed": True}


def check_fcp(S: FcpStruct, positive: bool = False) -> FcpReport:
    """Associativity, unit, naturality on generators, and the twist if commutative."""
    X, I, N = S.owner, S.owner.cat, S.owner.N
    counts = {"associativity": 0, "unit": 0, "naturality": 0, "commutativity": 0}
    lo = 1 if positive else 0
    for k in range(S.degrees + 1):
        for m in range(N + 1):
            for n in range(N + 1 - m):
                for p in range(N + 1 - m - n):
                    if min(m, n, p) < lo:
                        continue
                    lhs = S.mult[(m + n, p)][k][S.mult[(m, n)][k][:, :, None], np.arange(X.obj[p].counts[k])[None, None, :]]
                    rhs = S.mult[(m, n + p)][k][np.arange(X.obj[m].counts[k])[:, None, None], S.mult[(n, p)][k][None, :, :]]
                    bad = np.argwhere(lhs != rhs)
                    if bad.size:
                        raise LawViolation("associativity", f"levels {(m, n, p)}, degree {k}", {"levels": [m, n, p], "simplices": bad[0].tolist()})
                    counts["associativity"] += lhs.size
        u = S.unit_simplex(k)
        for n in range(N + 1):
            ident = np.arange(X.obj[n].counts[k])
            if not (np.array_equal(S.mult[(0, n)][k][u], ident) and np.array_equal(S.mult[(n, 0)][k][:, u], ident)):
                raise LawViolation("unit", f"level {n}, degree {k}", {"level": n})
            counts["unit"] += 2 * len(ident)
        gens = I.generators()
        for m in range(N + 1):
            for n in range(N + 1 - m):
                M = S.mult[(m, n)][k]
                for g in gens:
                    a, b = int(I.src[g]), int(I.tgt[g])
                    f = I.values(g)
                    if a == m and b + n <= N:
                        fx = X.mor[g].maps[k]
                        lhs = S.mult[(b, n)][k][fx[:, None], np.arange(M.shape[1])[None, :]]
                        gn = I.block_sum(f, b, tuple(range(1, n + 1)), n)
                        rhs = X.mor[gn].maps[k][M]
                        if not np.array_equal(lhs, rhs):
                            raise LawViolation("naturality", f"left variable, injection {f}, levels {(m, n)}", {"injection": list(f)})
                        counts["naturality"] += M.size
                    if a == n and m + b <= N:
                        fy = X.mor[g].maps[k]
                        lhs = S.mult[(m, b)][k][np.arange(M.shape[0])[:, None], fy[None, :]]
                        gm = I.block_sum(tuple(range(1, m + 1)), m, f, b)
                        rhs = X.mor[gm].maps[k][M]
                        if not np.array_equal(lhs, rhs):
                            raise LawViolation("naturality", f"right variable, injection {f}, levels {(m, n)}", {"injection": list(f)})
                        counts["naturality"] += M.size
                if S.commutative:
                    tw = I.inj(block_twist(m, n), m + n)
                    lhs = S.mult[(n, m)][k].T
                    rhs = X.mor[tw].maps[k][M]
                    bad = np.argwhere(lhs != rhs)
                    if bad.size:
                        raise LawViolation("commutativity", f"twist fails at levels {(m, n)}, degree {k}", {"levels": [m, n], "simplices": bad[0].tolist()})
                    counts["commutativity"] += M.size
    return FcpReport(counts, N)


def terminal_fcp(N: int) -> FcpStruct:
    X = ISpace.terminal(N)
    mult = {(m, n): [np.zeros((1, 1), dtype=np.int64)] for m in range(N + 1) for n in range(N + 1 - m)}
    return FcpStruct(X, 0, mult, commutative=True)


# --------------------------------------------------------------------------
# homotopical surrogates


@dataclass
class Verdict:
    status: str  # "pass" | "fail" | "out-of-range"
    k_max: int
    D: int
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict[str, Any]:
        return {"status": self.status, "k_max": self.k_max, "D": self.D, "valid_through": self.D - 2, **self.details}


def hocolim_map(f: ISpaceMap, D: int, upto: int | None = None) -> tuple[SMap, Any, Any]:
    src = hocolim(f.source.cat, f.source, D, upto)
    tgt = hocolim(f.target.cat, f.target, D, upto)
    maps = []
    for q in range(src.upto + 1):
        ch = src.chain_of[q]
        first = src.chains.first[q][ch]
        x2 = np.empty_like(src.x_of[q])
        for c in np.unique(first):
            sel = first == c
            comp = f.components[c]
            comp_q = comp.maps[q] if q <= comp.dim else comp.extend(f.source.obj[c].extend(q), f.target.obj[c].extend(q)).maps[q]
            x2[sel] = comp_q[src.x_of[q][sel]]
        maps.append(tgt.index(q, ch, src.y_of[q], x2))
    return SMap(src.sset, tgt.sset, maps), src, tgt


def stable_equiv_surrogate(f: ISpaceMap, D: int, k_max: int, strict: bool = True) -> Verdict:
    """pi0 + H_k (k <= k_max) test on the induced map of homotopy colimits.

    Degrees above D - 2 are outside the certified range: with
    ``strict=False`` they are computed anyway and a passing answer is
    downgraded to "out-of-range".
    """
    if k_max > D - 1 or (strict and k_max > D - 2):
        raise TruncationTooSmall(f"k_max={k_max} needs D >= {k_max + 2}, got D={D}", {"k_max": k_max, "D": D})
    F, src, tgt = hocolim_map(f, D, upto=k_max + 1)
    ok, info = induced_iso(F, k_max)
    if not ok:
        status = "fail"
    elif k_max > D - 2:
        status = "out-of-range"
    else:
        status = "pass"
    return Verdict(status, k_max, D, info)


def fibrant_surrogate(X: ISpace, k_max: int, positive: bool = False) -> bool:
    I = X.cat
    top = k_max + 1
    for g in I.generators(positive):
        a, b = int(I.src[g]), int(I.tgt[g])
        src = X.obj[a].extend(top) if X.obj[a].complete else X.obj[a]
        tgt = X.obj[b].extend(top) if X.obj[b].complete else X.obj[b]
        f = X.mor[g]
        if f.dim < top:
            f = f.extend(src, tgt)
        if pi0(src).count != pi0(tgt).count:
            return False
        ok, _ = induced_iso(f, k_max)
        if not ok:
            return False
    return True


# --------------------------------------------------------------------------
# random diagrams for property suites


def _small_space(rng: np.random.Generator) -> FinSSet:
    kind = int(rng.integers(3))
    if kind == 0:
        return FinSSet.point()
    if kind == 1:
        return FinSSet.discrete(2)
    return FinSSet.from_complex([(0, 1), (1, 2), (0, 2)])


def random_ispace(rng: np.random.Generator, N: int, max_d: int = 2) -> ISpace:
    """A small orbit diagram I(d, -)/H x A, or a coproduct of two of them."""

    def one() -> ISpace:
        d = int(rng.integers(min(max_d, N) + 1))
        H: list[Inj] = []
        if d >= 2 and rng.random() < 0.5:
            H.append(tuple(int(v) + 1 for v in rng.permutation(d)))
        A = _small_space(rng)
        return orbit_ispace(N, d, H, A, name=f"I({d},-)/{len(H)}")

    X = one()
    if rng.random() < 0.25:
        X = coproduct(X, one())
    return X
