"""pi0 monoids, units, and the Gamma-space built from a commutative FCP.

The indexing categories I<=N(n+) are modelled by *words*: an object is a
word w over the letters 1..n of length at most N.  Position c of w is a
point of theta({1..n}) and its letter says which theta_i it belongs to;
theta(A) is the subword on letters in A with the order-preserving
inclusion.  Morphisms are letter-preserving injections of positions.  Every
functor theta with the coproduct property is isomorphic to exactly such a
word-shaped one, so this full subcategory is equivalent to the whole
functor category and has the same homotopy colimits.

All FCPs fed into :func:`gamma_construct` must be levelwise discrete,
which is the case for Omega-bullet of a Dold-Kan backed spectrum.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

from .barcat import BarComplex, DiagramF, FinCat, FinFunctor, colimit_pi0, comma_category, hocolim, nerve, product_category
from .errors import (
    ConfigError,
    InsufficientGammaRange,
    LawViolation,
    NotAFunctor,
    NotCommutative,
    NotStabilized,
    TruncationTooSmall,
)
from .ispace import FcpStruct, ISpace, check_fcp, inj_cat, rank_injection
from .snf import AbelianGroup, group_from_torsion_counts
from .sset import ChainData, ChainMap, FinSSet, SMap, chains, homology, pi0

BasedMap = tuple[int, ...]


# --------------------------------------------------------------------------
# finite monoids


@dataclass
class FinMonoid:
    """Finite monoid given by its multiplication table."""

    labels: list[Any]
    table: np.ndarray
    unit: int

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=np.int64).reshape(len(self.labels), len(self.labels))

    @property
    def size(self) -> int:
        return len(self.labels)

    def check(self) -> None:
        T, n = self.table, self.size
        if n == 0:
            raise LawViolation("monoid", "empty monoid")
        a = np.arange(n)
        lhs = T[T[:, :, None], a[None, None, :]]
        rhs = T[a[:, None, None], T[None, :, :]]
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            raise LawViolation("associativity", "monoid table is not associative", {"triple": bad[0].tolist()})
        if not (np.array_equal(T[self.unit], a) and np.array_equal(T[:, self.unit], a)):
            raise LawViolation("unit", "unit law fails", {"unit": self.unit})

    @property
    def commutative(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def units(self) -> list[int]:
        hit = (self.table == self.unit) & (self.table.T == self.unit)
        return [a for a in range(self.size) if hit[a].any()]

    @property
    def is_group(self) -> bool:
        return len(self.units()) == self.size

    def power(self, a: int, k: int) -> int:
        out = self.unit
        for _ in range(k):
            out = int(self.table[out, a])
        return out

    def submonoid(self, elements: Sequence[int]) -> "FinMonoid":
        elements = list(elements)
        pos = {e: i for i, e in enumerate(elements)}
        if self.unit not in pos:
            raise LawViolation("monoid", "subset does not contain the unit")
        sub = self.table[np.ix_(elements, elements)]
        try:
            table = np.vectorize(pos.__getitem__, otypes=[np.int64])(sub) if sub.size else sub
        except KeyError as exc:
            raise LawViolation("monoid", "subset is not closed under multiplication") from exc
        return FinMonoid([self.labels[e] for e in elements], table, pos[self.unit])

    def group_invariants(self) -> AbelianGroup:
        """Invariant factors of a finite abelian group, by counting d-torsion."""
        if not (self.is_group and self.commutative):
            raise LawViolation("group", "monoid is not an abelian group")
        return group_from_torsion_counts(self.size, lambda d: sum(self.power(a, d) == self.unit for a in range(self.size)))

    def grothendieck(self) -> tuple["FinMonoid", np.ndarray]:
        """Group completion of a commutative monoid and the canonical map.

        Pairs (a, b) stand for a - b; (a, b) ~ (c, d) iff a d k = c b k for
        some k.  Classes are found by union-find over all pairs.
        """
        if not self.commutative:
            raise NotCommutative("group completion is only built for commutative monoids")
        T, n = self.table, self.size
        pairs = [(a, b) for a in range(n) for b in range(n)]
        parent = list(range(len(pairs)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i, (a, b) in enumerate(pairs):
            for j, (c, d) in enumerate(pairs):
                if j <= i:
                    continue
                left, right = T[T[a, d]], T[T[c, b]]  # rows indexed by k
                if np.any(left == right):
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[max(ri, rj)] = min(ri, rj)
        roots = sorted({find(i) for i in range(len(pairs))})
        cls = {r: c for c, r in enumerate(roots)}
        of = np.array([cls[find(i)] for i in range(len(pairs))], dtype=np.int64).reshape(n, n)
        g = len(roots)
        table = np.empty((g, g), dtype=np.int64)
        for r1 in roots:
            a, b = pairs[r1]
            for r2 in roots:
                c, d = pairs[r2]
                table[cls[r1], cls[r2]] = of[T[a, c], T[b, d]]
        labels = [self.labels[pairs[r][0]] if pairs[r][1] == self.unit else f"{self.labels[pairs[r][0]]}-{self.labels[pairs[r][1]]}" for r in roots]
        G = FinMonoid(labels, table, int(of[self.unit, self.unit]))
        G.check()
        return G, of[:, self.unit].copy()

    def to_json(self) -> dict[str, Any]:
        return {"elements": [str(x) for x in self.labels], "unit": self.unit, "table": self.table.tolist(), "commutative": self.commutative}


# --------------------------------------------------------------------------
# pi0 monoid and the units pullback


def _vertex_labels(S: FcpStruct, n: int) -> list[Any]:
    lab = S.meta.get("vertex_labels")
    if lab is not None:
        return list(lab[n])
    return [f"{n}:{v}" for v in range(S.owner.obj[n].counts[0])]


def pi0_monoid(S: FcpStruct) -> FinMonoid:
    """colim_I pi0 X with the product induced by mu.

    Requires the colimit to be reached bijectively by the two top levels
    and every pair of classes to have representatives at levels m, n with
    m + n <= N.  The product is computed on every such pair and must not
    depend on the choice.
    """
    X, N = S.owner, S.owner.N
    if N < 1:
        raise NotStabilized("need N >= 1 to see two consecutive levels", {"N": N})
    count, cls = colimit_pi0(X)
    comps = [pi0(X.obj[n]) for n in range(N + 1)]
    vcls = [np.array([cls[(n, int(c))] for c in comps[n].vertex_labels], dtype=np.int64) for n in range(N + 1)]
    for n in (N - 1, N):
        reached = {cls[(n, c)] for c in range(comps[n].count)}
        if comps[n].count != count or len(reached) != count:
            raise NotStabilized(f"pi0 X_{n} -> colim is not a bijection", {"level": n, "pi0": comps[n].count, "colim": count})
    table = np.full((count, count), -1, dtype=np.int64)
    for m in range(N + 1):
        for n in range(N + 1 - m):
            prod = vcls[m + n][S.mult[(m, n)][0]]
            a = np.broadcast_to(vcls[m][:, None], prod.shape)
            b = np.broadcast_to(vcls[n][None, :], prod.shape)
            old = table[a, b]
            clash = (old >= 0) & (old != prod)
            if clash.any():
                i, j = np.argwhere(clash)[0]
                raise LawViolation("pi0", "product of components depends on representatives", {"levels": [m, n], "vertices": [int(i), int(j)]})
            table[a, b] = prod
    if (table < 0).any():
        a, b = np.argwhere(table < 0)[0]
        raise NotStabilized("some pair of classes has no representatives with m + n <= N", {"classes": [int(a), int(b)]})
    labels: list[Any] = [None] * count
    for n in range(N + 1):
        names = _vertex_labels(S, n)
        for v in range(len(names)):
            c = int(vcls[n][v])
            if labels[c] is None:
                labels[c] = names[v]
    M = FinMonoid(labels, table, int(vcls[0][S.unit]))
    M.check()
    return M


def _sub_sset(X: FinSSet, vertex_mask: np.ndarray) -> tuple[FinSSet, list[np.ndarray], list[np.ndarray]]:
    """Full sub-simplicial set on a union of components.

    Returns the subset, the selected old indices per degree and the
    old -> new reindexing (-1 outside).
    """
    sel, new = [], []
    for k in range(X.dim_top + 1):
        keep = np.flatnonzero(vertex_mask[X.vertex_of(k)])
        r = np.full(X.counts[k], -1, dtype=np.int64)
        r[keep] = np.arange(len(keep))
        sel.append(keep)
        new.append(r)
    faces: list[np.ndarray | None] = [None]
    for k in range(1, X.dim_top + 1):
        faces.append(new[k - 1][X.faces[k][:, sel[k]]])
    degens = [new[k + 1][X.degens[k][:, sel[k]]] for k in range(X.dim_top)]
    return FinSSet([len(s) for s in sel], faces, degens, complete=X.complete), sel, new


def units_fcp(S: FcpStruct) -> FcpStruct:
    """Levelwise restriction to the components that are units in pi0."""
    X, N = S.owner, S.owner.N
    M = pi0_monoid(S)
    count, cls = colimit_pi0(X)
    unit_set = np.zeros(count, dtype=bool)
    unit_set[M.units()] = True
    levels, sels, news = [], [], []
    for n in range(N + 1):
        comps = pi0(X.obj[n])
        vmask = unit_set[[cls[(n, int(c))] for c in comps.vertex_labels]] if X.obj[n].counts[0] else np.zeros(0, dtype=bool)
        sub, sel, new = _sub_sset(X.obj[n], vmask)
        levels.append(sub)
        sels.append(sel)
        news.append(new)
    mors = []
    for m in range(X.base.n_mor):
        a, b = int(X.base.src[m]), int(X.base.tgt[m])
        f = X.mor[m]
        mors.append(SMap(levels[a], levels[b], [news[b][k][f.maps[k][sels[a][k]]] for k in range(len(f.maps))]))
    U = ISpace(X.base, levels, mors, name=f"({X.name})^x")
    mult = {}
    for (m, n), per in S.mult.items():
        mult[(m, n)] = [news[m + n][k][per[k][np.ix_(sels[m][k], sels[n][k])]] for k in range(len(per))]
        if any((t < 0).any() for t in mult[(m, n)]):
            raise LawViolation("units", f"product of units leaves the units at levels {(m, n)}")
    T = FcpStruct(U, int(news[0][0][S.unit]), mult, commutative=S.commutative, degrees=S.degrees)
    report = check_fcp(T)
    T.meta.update({k: v for k, v in S.meta.items() if k not in ("vertex_labels", "elements", "fcp_checks")})
    if "vertex_labels" in S.meta:
        T.meta["vertex_labels"] = [[S.meta["vertex_labels"][n][v] for v in sels[n][0]] for n in range(N + 1)]
    if "elements" in S.meta:
        T.meta["elements"] = [S.meta["elements"][n][sels[n][0]] for n in range(N + 1)]
    T.meta["fcp_checks"] = report.checks
    T.meta["ambient_monoid"] = M
    Mu = pi0_monoid(T)
    if not Mu.is_group:
        raise LawViolation("units", "restriction to units is not grouplike")
    T.meta["pi0_monoid"] = Mu
    return T


def gl1_bullet(E) -> FcpStruct:
    """GL_1-bullet of a Dold-Kan backed ring spectrum: (Omega-bullet E)^x."""
    from .dkspec import fundamental_coefficients, omega_bullet

    S = omega_bullet(E)
    R = E.ring
    S.meta["vertex_labels"] = [[R.labels[r] for r in fundamental_coefficients(S, E, n)] for n in range(S.owner.N + 1)]
    return units_fcp(S)


# --------------------------------------------------------------------------
# the categories I<=N(n+)


def subsets(n: int) -> list[tuple[int, ...]]:
    """The poset P(n+) of subsets of {1..n}, as sorted tuples."""
    return [c for r in range(n + 1) for c in itertools.combinations(range(1, n + 1), r)]


@dataclass
class WordCat:
    """Word model of I<=N(n+); see the module docstring."""

    n: int
    N: int
    words: list[tuple[int, ...]]
    cat: FinCat

    def theta(self, w: tuple[int, ...], A: Sequence[int]) -> tuple[int, ...]:
        """Positions (1-based) making up theta(A) inside theta({1..n})."""
        A = set(A)
        return tuple(c + 1 for c, a in enumerate(w) if a in A)

    def dims(self, w: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(w.count(i) for i in range(1, self.n + 1))

    def component(self, g: tuple[int, ...], w: tuple[int, ...], w2: tuple[int, ...], i: int) -> tuple[int, ...]:
        """theta_i of the transformation g: w -> w2, as an injection d_i -> d'_i."""
        src = self.theta(w, [i])
        tgt = self.theta(w2, [i])
        return rank_injection([g[c - 1] for c in src], tgt)

    def check_coproducts(self) -> int:
        """theta(A) and theta(B) partition theta(A u B) for disjoint A, B."""
        count = 0
        subs = subsets(self.n)
        for w in self.words:
            if self.theta(w, ()) != ():
                raise LawViolation("coproduct", "theta(empty) is not 0", {"word": w})
            for A in subs:
                for B in subs:
                    if set(A) & set(B):
                        continue
                    u = self.theta(w, set(A) | set(B))
                    if sorted(self.theta(w, A) + self.theta(w, B)) != list(u):
                        raise LawViolation("coproduct", "images do not partition theta(A u B)", {"word": w, "A": A, "B": B})
                    count += 1
        return count


@lru_cache(maxsize=None)
def icat(n: int, N: int) -> WordCat:
    words = [w for d in range(N + 1) for w in itertools.product(range(1, n + 1), repeat=d)]
    mors = []
    for w in words:
        for w2 in words:
            if len(w2) < len(w):
                continue
            for g in itertools.permutations(range(1, len(w2) + 1), len(w)):
                if all(w2[g[c] - 1] == w[c] for c in range(len(w))):
                    mors.append((w, w2, g))
    cat = FinCat.from_compose(
        words,
        [(a, b, (a, b, g)) for a, b, g in mors],
        lambda h, f: (f[0], h[1], tuple(h[2][v - 1] for v in f[2])),
        lambda w: (w, w, tuple(range(1, len(w) + 1))),
        name=f"I<={N}({n}+)",
    )
    return WordCat(n, N, words, cat)


def forgetful_functor(W: WordCat) -> FinFunctor:
    """u: I<=N(n+) -> (I<=N)^n, theta -> (theta_1, ..., theta_n)."""
    I = inj_cat(W.N)
    P = product_category([I] * W.n)
    obj_map = [P.obj(W.dims(w)) for w in W.words]
    mor_map = []
    for (w, w2, g) in W.cat.mor_labels:
        parts = tuple(I.inj(W.component(g, w, w2, i), w2.count(i)) for i in range(1, W.n + 1))
        mor_map.append(P.mor(parts))
    return FinFunctor(W.cat, P, obj_map, mor_map)


# --------------------------------------------------------------------------
# the Gamma-space


def based_maps(m: int, n: int) -> list[BasedMap]:
    """All based maps m+ -> n+, as the tuple (alpha(1), ..., alpha(m))."""
    return list(itertools.product(range(n + 1), repeat=m))


def compose_based(beta: BasedMap, alpha: BasedMap) -> BasedMap:
    return tuple(0 if a == 0 else beta[a - 1] for a in alpha)


def _check_discrete(S: FcpStruct) -> None:
    for n, L in enumerate(S.owner.obj):
        if L.dim_top != 0 or not L.complete:
            raise ConfigError(f"level {n} is not discrete; the Gamma-space construction here needs discrete levels", {"level": n})


def _values_diagram(S: FcpStruct, W: WordCat) -> DiagramF:
    """theta -> prod_i X(theta_i) on the word category."""
    X = S.owner
    sizes = [X.obj[d].counts[0] for d in range(X.N + 1)]
    shapes = [tuple(sizes[d] for d in W.dims(w)) for w in W.words]
    maps = []
    for (w, w2, g) in W.cat.mor_labels:
        shape, shape2 = shapes[W.cat.obj(w)], shapes[W.cat.obj(w2)]
        total = int(np.prod(shape, dtype=np.int64))
        coords = np.unravel_index(np.arange(total), shape) if shape else ()
        out = []
        for i in range(1, W.n + 1):
            gi = W.component(g, w, w2, i)
            out.append(X.act(gi, w2.count(i)).maps[0][coords[i - 1]])
        maps.append(np.ravel_multi_index(out, shape2) if shape2 else np.zeros(total, dtype=np.int64))
    return DiagramF.discrete(W.cat, [int(np.prod(s, dtype=np.int64)) for s in shapes], maps, name=f"X({W.n}+)")


@dataclass
class PushData:
    """alpha_* on the word category plus the transformation X(alpha)."""

    obj_map: np.ndarray
    mor_map: np.ndarray
    elem_maps: list[np.ndarray]


@dataclass
class GammaSpace:
    """n+ -> hocolim over I<=N(n+) of prod_i X(theta_i), for n <= n_max."""

    source: FcpStruct
    n_max: int
    N: int
    D: int
    upto: int
    cats: list[WordCat]
    diagrams: list[DiagramF]
    values: list[BarComplex]
    _push: dict[tuple[BasedMap, int], PushData] = field(default_factory=dict)
    _maps: dict[tuple[BasedMap, int], SMap] = field(default_factory=dict)

    def value(self, n: int) -> FinSSet:
        if n > self.n_max:
            raise InsufficientGammaRange(f"H({n}+) requested but n_max = {self.n_max}", {"n": n, "n_max": self.n_max})
        return self.values[n].sset

    def push(self, alpha: BasedMap, n: int, orders: dict[int, Sequence[int]] | None = None) -> PushData:
        """alpha_* and X(alpha); ``orders`` overrides the fibre ordering for the product."""
        key = (tuple(alpha), n)
        if orders is None and key in self._push:
            return self._push[key]
        m = len(alpha)
        if max(m, n) > self.n_max:
            raise InsufficientGammaRange(f"based map {m}+ -> {n}+ outside n_max = {self.n_max}")
        if any(not 0 <= a <= n for a in alpha):
            raise ValueError(f"{alpha} is not a based map {m}+ -> {n}+")
        Wm, Wn = self.cats[m], self.cats[n]
        S, X = self.source, self.source.owner
        sizes = [X.obj[d].counts[0] for d in range(X.N + 1)]
        fibres = {j: list(orders[j]) if orders and j in orders else [i for i in range(1, m + 1) if alpha[i - 1] == j] for j in range(1, n + 1)}
        unit0 = S.unit
        obj_map, elem_maps = [], []
        for w in Wm.words:
            w2 = tuple(alpha[a - 1] for a in w if alpha[a - 1])
            obj_map.append(Wn.cat.obj(w2))
            shape = tuple(sizes[d] for d in Wm.dims(w))
            total = int(np.prod(shape, dtype=np.int64))
            coords = np.unravel_index(np.arange(total), shape) if shape else ()
            out, shape2 = [], []
            for j in range(1, n + 1):
                p = np.full(total, unit0, dtype=np.int64)
                lvl = 0
                concat: list[int] = []
                for i in fibres[j]:
                    d = w.count(i)
                    p = S.mult[(lvl, d)][0][p, coords[i - 1]]
                    lvl += d
                    concat.extend(Wm.theta(w, [i]))
                target = Wm.theta(w, fibres[j])
                sigma = rank_injection(concat, target)
                out.append(X.act(sigma, lvl).maps[0][p])
                shape2.append(sizes[lvl])
            elem_maps.append(np.ravel_multi_index(out, tuple(shape2)) if shape2 else np.zeros(total, dtype=np.int64))
        mor_map = []
        for (w, w2, g) in Wm.cat.mor_labels:
            keep = [c for c in range(len(w)) if alpha[w[c] - 1]]
            keep2 = [c for c in range(len(w2)) if alpha[w2[c] - 1]]
            rank2 = {c: r + 1 for r, c in enumerate(keep2)}
            a = tuple(alpha[w[c] - 1] for c in keep)
            b = tuple(alpha[w2[c] - 1] for c in keep2)
            mor_map.append(Wn.cat.mor((a, b, tuple(rank2[g[c] - 1] for c in keep))))
        data = PushData(np.asarray(obj_map, dtype=np.int64), np.asarray(mor_map, dtype=np.int64), elem_maps)
        if orders is None:
            self._push[key] = data
        return data

    def map(self, alpha: BasedMap, n: int) -> SMap:
        """H(alpha): H(m+) -> H(n+) simplexwise."""
        key = (tuple(alpha), n)
        if key in self._maps:
            return self._maps[key]
        m = len(alpha)
        P = self.push(alpha, n)
        src, tgt = self.values[m], self.values[n]
        offs = np.concatenate([[0], np.cumsum([len(e) for e in P.elem_maps])])
        flat = np.concatenate(P.elem_maps) if P.elem_maps else np.zeros(0, dtype=np.int64)
        maps = []
        for q in range(self.upto + 1):
            ch, x = src.chain_of[q], src.x_of[q]
            first = src.chains.first[q][ch]
            if q == 0:
                ch2 = P.obj_map[first]
            else:
                ch2 = tgt.chains.lookup(q, P.mor_map[src.chains.rows[q][ch]])
            maps.append(tgt.index(q, ch2, np.zeros_like(x), flat[offs[first] + x]))
        f = SMap(src.sset, tgt.sset, maps)
        self._maps[key] = f
        return f

    def check_naturality(self, alpha: BasedMap, n: int) -> int:
        """X(alpha) is natural along every morphism, so H(alpha) is simplicial."""
        m = len(alpha)
        P = self.push(alpha, n)
        Cm, Dm, Dn = self.cats[m].cat, self.diagrams[m], self.diagrams[n]
        for k in range(Cm.n_mor):
            a, b = int(Cm.src[k]), int(Cm.tgt[k])
            lhs = Dn.mor[P.mor_map[k]].maps[0][P.elem_maps[a]]
            rhs = P.elem_maps[b][Dm.mor[k].maps[0]]
            if not np.array_equal(lhs, rhs):
                raise NotAFunctor("X(alpha) is not natural", {"alpha": list(alpha), "n": n, "morphism": Cm.mor_labels[k]})
        return Cm.n_mor

    def check_functoriality(self) -> dict[str, int]:
        """Identities and composites over all based maps between l, m, n <= n_max."""
        counts = {"naturality": 0, "identity": 0, "composition": 0}
        for m in range(self.n_max + 1):
            for n in range(self.n_max + 1):
                for alpha in based_maps(m, n):
                    counts["naturality"] += self.check_naturality(alpha, n)
            ident = tuple(range(1, m + 1))
            P = self.push(ident, m)
            if not (np.array_equal(P.obj_map, np.arange(len(P.obj_map))) and np.array_equal(P.mor_map, np.arange(len(P.mor_map)))):
                raise NotAFunctor("identity based map does not act as the identity functor", {"m": m})
            if any(not np.array_equal(e, np.arange(len(e))) for e in P.elem_maps):
                raise NotAFunctor("identity based map does not act as the identity", {"m": m})
            counts["identity"] += 1
        for l in range(self.n_max + 1):
            for m in range(self.n_max + 1):
                for n in range(self.n_max + 1):
                    for alpha in based_maps(l, m):
                        Pa = self.push(alpha, m)
                        for beta in based_maps(m, n):
                            Pb = self.push(beta, n)
                            Pc = self.push(compose_based(beta, alpha), n)
                            ok = np.array_equal(Pc.obj_map, Pb.obj_map[Pa.obj_map]) and np.array_equal(Pc.mor_map, Pb.mor_map[Pa.mor_map])
                            ok = ok and all(
                                np.array_equal(Pc.elem_maps[w], Pb.elem_maps[Pa.obj_map[w]][Pa.elem_maps[w]]) for w in range(len(Pa.elem_maps))
                            )
                            if not ok:
                                raise NotAFunctor("H(beta alpha) != H(beta) H(alpha)", {"alpha": list(alpha), "beta": list(beta)})
                            counts["composition"] += 1
        return counts

    def check_ordering_independence(self) -> int:
        """Every ordering of each fibre gives the same X(alpha)."""
        count = 0
        for m in range(self.n_max + 1):
            for n in range(self.n_max + 1):
                for alpha in based_maps(m, n):
                    base = self.push(alpha, n)
                    fib = [[i for i in range(1, m + 1) if alpha[i - 1] == j] for j in range(1, n + 1)]
                    for perms in itertools.product(*[itertools.permutations(f) for f in fib]):
                        orders = {j + 1: p for j, p in enumerate(perms)}
                        other = self.push(alpha, n, orders)
                        if any(not np.array_equal(a, b) for a, b in zip(base.elem_maps, other.elem_maps)):
                            raise NotCommutative("product over a fibre depends on its ordering", {"alpha": list(alpha), "order": {k: list(v) for k, v in orders.items()}})
                        count += 1
        return count

    def homology(self, n: int, k_max: int) -> list[AbelianGroup]:
        return homology(self.value(n), k_max).groups

    def provenance(self) -> dict[str, Any]:
        return {"N": self.N, "D": self.D, "n_max": self.n_max, "materialised_through": self.upto, "valid_through": self.D - 2}

    def to_json(self, k_max: int | None = None) -> dict[str, Any]:
        k_max = self.upto - 1 if k_max is None else k_max
        return {
            **self.provenance(),
            "objects": [self.cats[n].cat.n_obj for n in range(self.n_max + 1)],
            "morphisms": [self.cats[n].cat.n_mor for n in range(self.n_max + 1)],
            "simplices": [list(self.value(n).counts) for n in range(self.n_max + 1)],
            "homology": [[str(g) for g in self.homology(n, k_max)] for n in range(self.n_max + 1)],
        }


def gamma_construct(S: FcpStruct, n_max: int = 3, N: int | None = None, D: int = 4, k_max: int = 1) -> GammaSpace:
    """Gamma-space of a commutative, levelwise discrete FCP.

    Simplices are materialised through degree k_max + 1, which is what
    homology through k_max needs; ``k_max`` must satisfy k_max <= D - 2.
    """
    if not S.commutative:
        raise NotCommutative("the Gamma-space construction needs a commutative FCP")
    _check_discrete(S)
    if k_max > D - 2:
        raise TruncationTooSmall(f"k_max = {k_max} exceeds the validity range D - 2 = {D - 2}", {"k_max": k_max, "D": D})
    N = S.owner.N if N is None else N
    if N > S.owner.N:
        raise TruncationTooSmall(f"FCP only known through level {S.owner.N}", {"N": N})
    if N < S.owner.N:
        S = _restrict_fcp(S, N)
    upto = min(D, k_max + 1)
    cats, diagrams, values = [], [], []
    for n in range(n_max + 1):
        W = icat(n, N)
        Xd = _values_diagram(S, W)
        cats.append(W)
        diagrams.append(Xd)
        values.append(hocolim(W.cat, Xd, D, upto))
    H = GammaSpace(S, n_max, N, D, upto, cats, diagrams, values)
    if H.value(0).counts[0] != 1:
        raise LawViolation("gamma", "H(0+) is not a point")
    return H


def _restrict_fcp(S: FcpStruct, N: int) -> FcpStruct:
    X = S.owner.restrict(N)
    mult = {k: v for k, v in S.mult.items() if k[0] + k[1] <= N}
    out = FcpStruct(X, S.unit, mult, commutative=S.commutative, degrees=S.degrees)
    out.meta.update(S.meta)
    if "vertex_labels" in S.meta:
        out.meta["vertex_labels"] = S.meta["vertex_labels"][: N + 1]
    return out


# --------------------------------------------------------------------------
# Segal condition


def projection(i: int, n: int) -> BasedMap:
    """delta_i: n+ -> 1+ keeping only i."""
    return tuple(1 if j == i else 0 for j in range(1, n + 1))


@dataclass
class SegalVerdict:
    n: int
    pi0_bijection: bool
    h1_iso: bool | None
    comma_initial: bool
    comma_objects: int
    witness: Any = None

    @property
    def passed(self) -> bool:
        return self.pi0_bijection and self.h1_iso is not False and self.comma_initial

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "pi0_bijection": self.pi0_bijection,
            "h1_iso": self.h1_iso,
            "comma_initial": self.comma_initial,
            "comma_objects_tested": self.comma_objects,
            "passed": self.passed,
            "witness": self.witness,
        }


def _component_map(f: SMap, comps_src, comps_tgt) -> np.ndarray:
    """pi0(f) as an array indexed by source components."""
    out = np.full(comps_src.count, -1, dtype=np.int64)
    out[comps_src.vertex_labels] = comps_tgt.vertex_labels[f.maps[0]]
    return out


def _h1_surjective(Xc: FinSSet, targets: list[FinSSet], maps: list[np.ndarray]) -> tuple[bool, dict[str, Any]]:
    """H_1 of a connected X -> direct sum of chains of connected A_i.

    The map is (f_1)_* + ... + (f_n)_*.  Since H_0 X -> H_0(sum) is the
    diagonal Z -> Z^n, H_1 of the cone vanishes iff the map is onto H_1.
    """
    src = chains(Xc, 2)
    tgts = [chains(A, 2) for A in targets]
    offs = [np.cumsum([0] + [T.dims[k] for T in tgts]) for k in range(3)]
    dims = [int(offs[k][-1]) for k in range(3)]
    cols: list[list[dict[int, int]]] = []
    for k in range(3):
        col: list[dict[int, int]] = []
        for i, T in enumerate(tgts):
            o = int(offs[k - 1][i]) if k else 0
            col.extend({r + o: v for r, v in c.items()} for c in T.cols[k])
        cols.append(col)
    T = ChainData(dims, cols, complete=True)
    fcols = []
    for k in range(2):
        nd_src = Xc.nondegenerate(k)
        pos = [{int(y): p for p, y in enumerate(A.nondegenerate(k))} for A in targets]
        col = []
        for x in nd_src:
            c: dict[int, int] = {}
            for i in range(len(targets)):
                y = pos[i].get(int(maps[i][k][x]))
                if y is not None:
                    c[int(offs[k][i]) + y] = 1
            col.append(c)
        fcols.append(col)
    cone = ChainMap(src, T, fcols).cone(1)
    h = cone.homology(1)
    return h[1].is_trivial, {"cone_H1": str(h[1])}


def segal_check(H: GammaSpace, k_max: int = 1, comma: bool = True) -> list[SegalVerdict]:
    """Segal maps H(n+) -> H(1+)^n for n <= n_max.

    pi0 is compared exactly.  H_1 is compared componentwise: a component
    of H(n+) must map onto H_1 of the product of the target components,
    which is the direct sum of their H_1, and the groups must agree
    abstractly (Hopfian argument).  Higher H_k are not tested because the
    product picks up Kunneth cross terms.
    """
    if k_max > H.D - 2:
        raise TruncationTooSmall(f"k_max = {k_max} outside validity range D - 2 = {H.D - 2}")
    if k_max >= 1 and H.upto < 2:
        raise TruncationTooSmall("H_1 needs simplices through degree 2")
    out = []
    H1 = H.value(1) if H.n_max >= 1 else None
    c1 = pi0(H1) if H1 is not None else None
    for n in range(H.n_max + 1):
        Xn = H.value(n)
        cn = pi0(Xn)
        if n == 0:
            ok = Xn.counts[0] == 1 and cn.count == 1
            out.append(SegalVerdict(0, ok, True if k_max >= 1 else None, True, 1))
            continue
        proj = [H.map(projection(i, n), 1) for i in range(1, n + 1)]
        cmaps = [_component_map(p, cn, c1) for p in proj]
        tuples = {tuple(int(cm[c]) for cm in cmaps) for c in range(cn.count)}
        pi0_ok = len(tuples) == cn.count == c1.count**n
        witness: dict[str, Any] = {"pi0_source": cn.count, "pi0_target": c1.count**n}
        h1_ok = None
        if k_max >= 1 and pi0_ok:
            h1_ok = True
            for c in range(cn.count):
                Xc, sel, _ = _sub_sset(Xn, cn.vertex_labels == c)
                targets, tmaps, groups = [], [], AbelianGroup()
                for i, p in enumerate(proj):
                    tc = int(cmaps[i][c])
                    A, _, newA = _sub_sset(H1, c1.vertex_labels == tc)
                    targets.append(A)
                    tmaps.append([newA[k][p.maps[k][sel[k]]] for k in range(2)])
                    groups = groups + homology(A, 1).groups[1]
                onto, info = _h1_surjective(Xc, targets, tmaps)
                same = homology(Xc, 1).groups[1] == groups
                if not (onto and same):
                    h1_ok = False
                    witness.update({"component": c, "H1_target": str(groups), **info})
                    break
        comma_ok, tested = True, 0
        if comma:
            comma_ok, tested, w = comma_certificate(H.cats[n])
            if w is not None:
                witness["comma"] = w
        out.append(SegalVerdict(n, pi0_ok, h1_ok, comma_ok, tested, witness))
    return out


def comma_certificate(W: WordCat) -> tuple[bool, int, Any]:
    """(d | u) has the initial object theta(A) = sum_{i in A} d_i, for all d.

    Only tuples d with sum(d) <= N are tested: above that the truncated
    category has no theta with theta_i = d_i at all.
    """
    u = forgetful_functor(W)
    P = u.target
    tested = 0
    for d in itertools.product(range(W.N + 1), repeat=W.n):
        if sum(d) > W.N:
            continue
        res = comma_category(P.obj(tuple(d)), u)
        tested += 1
        expect_w = tuple(i for i in range(1, W.n + 1) for _ in range(d[i - 1]))
        expect = (W.cat.obj(expect_w), int(P.ident[P.obj(tuple(d))]))
        if res.initial is None or res.initial_object != expect:
            return False, tested, {"d": list(d), "initial": res.initial_object}
    return True, tested, None


# --------------------------------------------------------------------------
# delooping and group completion


def circle_face(q: int, i: int) -> BasedMap:
    """d_i: q+ -> (q-1)+ of the simplicial circle."""
    if i == 0:
        return tuple(0 if j == 1 else j - 1 for j in range(1, q + 1))
    if i == q:
        return tuple(0 if j == q else j for j in range(1, q + 1))
    return tuple(j if j <= i else j - 1 for j in range(1, q + 1))


def circle_degen(q: int, i: int) -> BasedMap:
    """s_i: q+ -> (q+1)+ of the simplicial circle."""
    return tuple(j if j <= i else j + 1 for j in range(1, q + 1))


def segal_machine_delooping(H: GammaSpace, k_max: int = 1) -> FinSSet:
    """Diagonal of q -> H(q+) with the circle's faces, through degree k_max + 1."""
    K = k_max + 1
    if H.n_max < K:
        raise InsufficientGammaRange(f"delooping through degree {K} needs n_max >= {K}", {"n_max": H.n_max, "needed": K})
    if H.upto < K:
        raise TruncationTooSmall(f"H(q+) materialised only through {H.upto}", {"needed": K})
    counts = [H.value(q).counts[q] for q in range(K + 1)]
    faces: list[np.ndarray | None] = [None]
    for q in range(1, K + 1):
        Hq = H.value(q)
        tab = np.empty((q + 1, counts[q]), dtype=np.int64)
        for i in range(q + 1):
            tab[i] = H.map(circle_face(q, i), q - 1).maps[q - 1][Hq.faces[q][i]]
        faces.append(tab)
    degens = []
    for q in range(K):
        Hq = H.value(q)
        tab = np.empty((q + 1, counts[q]), dtype=np.int64)
        for i in range(q + 1):
            tab[i] = H.map(circle_degen(q, i), q + 1).maps[q + 1][Hq.degens[q][i]]
        degens.append(tab)
    B = FinSSet(counts, faces, degens, complete=False)
    B.check_identities()
    return B


def fold_monoid(H: GammaSpace) -> FinMonoid:
    """pi0 H(1+) with the product read off the fold map 2+ -> 1+."""
    if H.n_max < 2:
        raise InsufficientGammaRange("the fold map needs n_max >= 2")
    c1, c2 = pi0(H.value(1)), pi0(H.value(2))
    seg = [_component_map(H.map(projection(i, 2), 1), c2, c1) for i in (1, 2)]
    fold = _component_map(H.map((1, 1), 1), c2, c1)
    table = np.full((c1.count, c1.count), -1, dtype=np.int64)
    for c in range(c2.count):
        a, b = int(seg[0][c]), int(seg[1][c])
        if table[a, b] >= 0 and table[a, b] != fold[c]:
            raise LawViolation("segal", "pi0 H(2+) -> pi0 H(1+)^2 is not injective")
        table[a, b] = fold[c]
    if (table < 0).any():
        raise LawViolation("segal", "pi0 H(2+) -> pi0 H(1+)^2 is not surjective")
    unit = int(_component_map(H.map((), 1), pi0(H.value(0)), c1)[0])
    S = H.source
    labels = list(range(c1.count))
    if "vertex_labels" in S.meta:
        # name each class by a level-0 representative when there is one
        names = S.meta["vertex_labels"][0]
        vx = H.values[1]
        for v in range(H.value(1).counts[0]):
            if H.values[1].chains.first[0][vx.chain_of[0][v]] == H.cats[1].cat.obj(()):
                labels[int(c1.vertex_labels[v])] = names[int(vx.x_of[0][v])]
    M = FinMonoid(labels, table, unit)
    M.check()
    return M


@dataclass
class Completion:
    monoid: FinMonoid
    group: FinMonoid
    invariants: AbelianGroup
    grouplike: bool

    def to_json(self) -> dict[str, Any]:
        return {"monoid": self.monoid.to_json(), "group_order": self.group.size, "group": str(self.invariants), "grouplike": self.grouplike}


def group_completion_pi0(H: GammaSpace) -> Completion:
    M = fold_monoid(H)
    if M.is_group:
        return Completion(M, M, M.group_invariants(), True)
    G, _ = M.grothendieck()
    return Completion(M, G, G.group_invariants(), False)


def group_nerve_h1(G: FinMonoid, k_max: int = 1) -> list[AbelianGroup]:
    """Homology of the nerve of a finite group (the delooping oracle)."""
    C = FinCat.group(list(range(G.size)), lambda a, b: int(G.table[a, b]), G.unit, name="G")
    B = nerve(C, k_max + 3, k_max + 1)
    return homology(B.sset, k_max).groups
