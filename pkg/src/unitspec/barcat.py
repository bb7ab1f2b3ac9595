"""Finite categories, diagrams of simplicial sets and bar constructions.

Bar constructions follow the convention that a q-simplex of
B(Y, C, X) is ``(y; f_q, ..., f_1; x)`` with ``x`` a q-simplex of
``X(c_0)``, ``f_k : c_{k-1} -> c_k`` and ``y`` a q-simplex of ``Y(c_q)``.
d_0 pushes x forward along f_1, d_q pulls y back along f_q, middle faces
compose, and every face also acts internally on x and y (diagonal of the
bisimplicial set).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import IdentityViolation, LawViolation, MismatchedBase, NotAFunctor
from .sset import FinSSet, SMap, homology, pi0


class FinCat:
    """Finite category with integer-indexed objects and morphisms.

    ``comp[g, f]`` is the index of ``g o f`` (``-1`` if not composable).
    Large products may pass ``compose_fn`` instead of a table.
    """

    def __init__(
        self,
        obj_labels: Sequence[Hashable],
        src: Sequence[int],
        tgt: Sequence[int],
        ident: Sequence[int],
        comp: np.ndarray | None,
        mor_labels: Sequence[Hashable] | None = None,
        compose_fn: Callable[[int, int], int] | None = None,
        name: str = "",
    ):
        self.obj_labels = list(obj_labels)
        self.src = np.asarray(src, dtype=np.int64)
        self.tgt = np.asarray(tgt, dtype=np.int64)
        self.ident = np.asarray(ident, dtype=np.int64)
        self.comp = comp
        self.mor_labels = list(mor_labels) if mor_labels is not None else list(range(len(self.src)))
        self._compose_fn = compose_fn
        self.name = name
        self.out_mor: list[list[int]] = [[] for _ in self.obj_labels]
        self._hom: dict[tuple[int, int], list[int]] = {}
        for m in range(self.n_mor):
            self.out_mor[self.src[m]].append(m)
            self._hom.setdefault((int(self.src[m]), int(self.tgt[m])), []).append(m)
        self._obj_index = {o: i for i, o in enumerate(self.obj_labels)}
        self._mor_index = {m: i for i, m in enumerate(self.mor_labels)}

    @property
    def n_obj(self) -> int:
        return len(self.obj_labels)

    @property
    def n_mor(self) -> int:
        return len(self.src)

    def obj(self, label: Hashable) -> int:
        return self._obj_index[label]

    def mor(self, label: Hashable) -> int:
        return self._mor_index[label]

    def hom(self, a: int, b: int) -> list[int]:
        return self._hom.get((a, b), [])

    def compose(self, g: int, f: int) -> int:
        """g o f."""
        if self.tgt[f] != self.src[g]:
            raise ValueError(f"morphisms {f}, {g} not composable")
        if self.comp is not None:
            return int(self.comp[g, f])
        return self._compose_fn(g, f)

    def table(self) -> np.ndarray:
        if self.comp is None:
            comp = np.full((self.n_mor, self.n_mor), -1, dtype=np.int64)
            for f in range(self.n_mor):
                for g in self.out_mor[self.tgt[f]]:
                    comp[g, f] = self._compose_fn(g, f)
            self.comp = comp
        return self.comp

    @classmethod
    def from_compose(
        cls,
        objects: Sequence[Hashable],
        morphisms: Sequence[tuple[Hashable, Hashable, Hashable]],
        compose: Callable[[Hashable, Hashable], Hashable],
        identity: Callable[[Hashable], Hashable],
        name: str = "",
    ) -> "FinCat":
        """Build from labelled morphisms ``(source, target, label)``.

        ``compose(g_label, f_label)`` must return the label of g o f.
        """
        oi = {o: i for i, o in enumerate(objects)}
        labels = [m[2] for m in morphisms]
        mi = {m: i for i, m in enumerate(labels)}
        if len(mi) != len(labels):
            raise ValueError("duplicate morphism labels")
        src = [oi[m[0]] for m in morphisms]
        tgt = [oi[m[1]] for m in morphisms]
        ident = [mi[identity(o)] for o in objects]
        n = len(labels)
        comp = np.full((n, n), -1, dtype=np.int64)
        out: dict[int, list[int]] = {}
        for k, s in enumerate(src):
            out.setdefault(s, []).append(k)
        for f in range(n):
            for g in out.get(tgt[f], []):
                comp[g, f] = mi[compose(labels[g], labels[f])]
        return cls(objects, src, tgt, ident, comp, labels, name=name)

    @classmethod
    def terminal(cls) -> "FinCat":
        return cls(["*"], [0], [0], [0], np.zeros((1, 1), dtype=np.int64), ["id"], name="terminal")

    @classmethod
    def cyclic_group(cls, n: int) -> "FinCat":
        """Z/n as a one-object category."""
        comp = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
        return cls(["*"], [0] * n, [0] * n, [0], comp, list(range(n)), name=f"Z/{n}")

    @classmethod
    def group(cls, elements: Sequence[Hashable], mult: Callable, unit: Hashable, name: str = "") -> "FinCat":
        return cls.from_compose(["*"], [("*", "*", g) for g in elements], mult, lambda _o: unit, name=name)

    @classmethod
    def poset(cls, elements: Sequence[Hashable], leq: Callable[[Hashable, Hashable], bool], name: str = "") -> "FinCat":
        mors = [(a, b, (a, b)) for a in elements for b in elements if leq(a, b)]
        return cls.from_compose(elements, mors, lambda g, f: (f[0], g[1]), lambda o: (o, o), name=name)

    def check_laws(self) -> None:
        comp = self.table()
        for f in range(self.n_mor):
            a, b = int(self.src[f]), int(self.tgt[f])
            if comp[f, self.ident[a]] != f or comp[self.ident[b], f] != f:
                raise LawViolation("identity", f"identity law fails at morphism {f}", {"morphism": f})
        for f in range(self.n_mor):
            for g in self.out_mor[self.tgt[f]]:
                gf = comp[g, f]
                if gf < 0 or self.src[gf] != self.src[f] or self.tgt[gf] != self.tgt[g]:
                    raise LawViolation("composition", f"bad composite of {g} o {f}", {"g": g, "f": f})
                for h in self.out_mor[self.tgt[g]]:
                    if comp[h, gf] != comp[comp[h, g], f]:
                        raise LawViolation("associativity", f"(h g) f != h (g f) for {h},{g},{f}", {"h": h, "g": g, "f": f})

    def initial_objects(self) -> list[int]:
        return [a for a in range(self.n_obj) if all(len(self.hom(a, b)) == 1 for b in range(self.n_obj))]

    def with_corrupted_composite(self, g: int, f: int, value: int) -> "FinCat":
        """Copy with one entry of the composition table overwritten (negative controls)."""
        comp = self.table().copy()
        comp[g, f] = value
        return FinCat(self.obj_labels, self.src, self.tgt, self.ident, comp, self.mor_labels, name=self.name + "*")

    def to_json(self) -> dict[str, Any]:
        comp = self.table()
        return {
            "name": self.name,
            "objects": [str(o) for o in self.obj_labels],
            "morphisms": [
                {"label": str(self.mor_labels[m]), "source": int(self.src[m]), "target": int(self.tgt[m])}
                for m in range(self.n_mor)
            ],
            "identities": self.ident.tolist(),
            "composition": [[int(f), int(g), int(comp[g, f])] for f in range(self.n_mor) for g in self.out_mor[self.tgt[f]]],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "FinCat":
        mors = data["morphisms"]
        n = len(mors)
        comp = np.full((n, n), -1, dtype=np.int64)
        for f, g, gf in data["composition"]:
            comp[g, f] = gf
        return cls(
            data["objects"],
            [m["source"] for m in mors],
            [m["target"] for m in mors],
            data["identities"],
            comp,
            [m["label"] for m in mors],
            name=data.get("name", ""),
        )


def product_category(cats: Sequence[FinCat]) -> FinCat:
    """Product category; composition is computed on demand."""
    objs = list(itertools.product(*[range(c.n_obj) for c in cats]))
    mors = list(itertools.product(*[range(c.n_mor) for c in cats]))
    mi = {m: i for i, m in enumerate(mors)}
    oi = {o: i for i, o in enumerate(objs)}
    src = [oi[tuple(int(c.src[f]) for c, f in zip(cats, m))] for m in mors]
    tgt = [oi[tuple(int(c.tgt[f]) for c, f in zip(cats, m))] for m in mors]
    ident = [mi[tuple(int(c.ident[a]) for c, a in zip(cats, o))] for o in objs]

    def compose(g: int, f: int) -> int:
        return mi[tuple(c.compose(a, b) for c, a, b in zip(cats, mors[g], mors[f]))]

    return FinCat(objs, src, tgt, ident, None, mors, compose_fn=compose, name="x".join(c.name for c in cats))


@dataclass
class FinFunctor:
    source: FinCat
    target: FinCat
    obj_map: np.ndarray
    mor_map: np.ndarray

    def __post_init__(self):
        self.obj_map = np.asarray(self.obj_map, dtype=np.int64)
        self.mor_map = np.asarray(self.mor_map, dtype=np.int64)

    @classmethod
    def identity(cls, C: FinCat) -> "FinFunctor":
        return cls(C, C, np.arange(C.n_obj), np.arange(C.n_mor))

    def check(self) -> None:
        C, E = self.source, self.target
        for m in range(C.n_mor):
            fm = self.mor_map[m]
            if E.src[fm] != self.obj_map[C.src[m]] or E.tgt[fm] != self.obj_map[C.tgt[m]]:
                raise NotAFunctor(f"morphism {m} lands between the wrong objects", {"morphism": m})
        for a in range(C.n_obj):
            if self.mor_map[C.ident[a]] != E.ident[self.obj_map[a]]:
                raise NotAFunctor(f"identity of object {a} not preserved", {"object": a})
        for f in range(C.n_mor):
            for g in C.out_mor[C.tgt[f]]:
                if self.mor_map[C.compose(g, f)] != E.compose(int(self.mor_map[g]), int(self.mor_map[f])):
                    raise NotAFunctor(f"F({g} o {f}) != F({g}) o F({f})", {"g": g, "f": f})


class DiagramF:
    """Covariant functor from a FinCat to finite simplicial sets."""

    contravariant = False

    def __init__(self, base: FinCat, obj: Sequence[FinSSet], mor: Sequence[SMap], name: str = "", constant: bool = False):
        self.base = base
        self.obj = list(obj)
        self.mor = list(mor)
        self.name = name
        self.constant = constant
        self._ext: dict[int, "DiagramF"] = {}

    @classmethod
    def constant_at(cls, C: FinCat, X: FinSSet, name: str = "") -> "DiagramF":
        ident = SMap.identity(X)
        return cls(C, [X] * C.n_obj, [ident] * C.n_mor, name=name or "const", constant=True)

    @classmethod
    def terminal(cls, C: FinCat) -> "DiagramF":
        return cls.constant_at(C, FinSSet.point(), name="*")

    @classmethod
    def discrete(cls, C: FinCat, sizes: Sequence[int], maps: Sequence[Sequence[int]], name: str = "") -> "DiagramF":
        """Diagram of discrete sets given by element counts and functions."""
        objs = [FinSSet.discrete(n) for n in sizes]
        mors = [SMap(objs[C.src[m]], objs[C.tgt[m]], [np.asarray(maps[m], dtype=np.int64)]) for m in range(C.n_mor)]
        return cls(C, objs, mors, name=name)

    @classmethod
    def represented(cls, C: FinCat, c: int) -> "DiagramF":
        """C(c, -) as a discrete diagram."""
        homs = [C.hom(c, b) for b in range(C.n_obj)]
        pos = [{h: i for i, h in enumerate(hs)} for hs in homs]
        maps = []
        for m in range(C.n_mor):
            a, b = int(C.src[m]), int(C.tgt[m])
            maps.append([pos[b][C.compose(m, h)] for h in homs[a]])
        return cls.discrete(C, [len(h) for h in homs], maps, name=f"C({C.obj_labels[c]},-)")

    def values_complete(self) -> bool:
        return all(X.complete for X in self.obj)

    def dim(self) -> int:
        return min(X.dim_top for X in self.obj)

    def map_of(self, m: int) -> SMap:
        return self.mor[m]

    def extended(self, q: int) -> "DiagramF":
        """Copy whose values and maps are materialised through degree q."""
        if all(X.dim_top >= q for X in self.obj) and all(f.dim >= q for f in self.mor):
            return self
        if q not in self._ext:
            cache: dict[int, FinSSet] = {}
            for X in self.obj:
                if id(X) not in cache:
                    cache[id(X)] = X.extend(q)
            objs = [cache[id(X)] for X in self.obj]
            mors = []
            done: dict[int, SMap] = {}
            for m, f in enumerate(self.mor):
                if id(f) in done:
                    mors.append(done[id(f)])
                    continue
                a, b = self._ends(m)
                g = f.extend(objs[a], objs[b])
                done[id(f)] = g
                mors.append(g)
            self._ext[q] = type(self)(self.base, objs, mors, name=self.name, constant=self.constant)
        return self._ext[q]

    def _ends(self, m: int) -> tuple[int, int]:
        return int(self.base.src[m]), int(self.base.tgt[m])

    def check(self) -> None:
        C = self.base
        for m, f in enumerate(self.mor):
            a, b = self._ends(m)
            if f.source is not self.obj[a] and f.source.counts != self.obj[a].counts:
                raise NotAFunctor(f"map of morphism {m} has the wrong source", {"morphism": m})
            if f.target is not self.obj[b] and f.target.counts != self.obj[b].counts:
                raise NotAFunctor(f"map of morphism {m} has the wrong target", {"morphism": m})
            f.check()
        for a in range(C.n_obj):
            f = self.mor[C.ident[a]]
            if any(not np.array_equal(t, np.arange(len(t))) for t in f.maps):
                raise NotAFunctor(f"identity of object {a} not sent to the identity", {"object": a})
        for f in range(C.n_mor):
            for g in C.out_mor[C.tgt[f]]:
                gf = C.compose(g, f)
                lhs = self._composite(g, f)
                rhs = self.mor[gf]
                if not all(np.array_equal(x, y) for x, y in zip(lhs.maps, rhs.maps)):
                    raise NotAFunctor(f"functoriality fails for {g} o {f}", {"g": g, "f": f})

    def _composite(self, g: int, f: int) -> SMap:
        return self.mor[g].compose(self.mor[f])

    def pullback(self, F: FinFunctor) -> "DiagramF":
        """X o F."""
        return DiagramF(
            F.source,
            [self.obj[F.obj_map[a]] for a in range(F.source.n_obj)],
            [self.mor[F.mor_map[m]] for m in range(F.source.n_mor)],
            name=f"{self.name}oF",
            constant=self.constant,
        )


class CoDiagramF(DiagramF):
    """Contravariant functor: ``mor[m]`` maps Y(target m) -> Y(source m)."""

    contravariant = True

    def _ends(self, m: int) -> tuple[int, int]:
        return int(self.base.tgt[m]), int(self.base.src[m])

    def _composite(self, g: int, f: int) -> SMap:
        return self.mor[f].compose(self.mor[g])

    @classmethod
    def terminal(cls, C: FinCat) -> "CoDiagramF":
        X = FinSSet.point()
        ident = SMap.identity(X)
        return cls(C, [X] * C.n_obj, [ident] * C.n_mor, name="*", constant=True)

    @classmethod
    def represented(cls, C: FinCat, c: int) -> "CoDiagramF":
        """C(-, c) as a discrete co-diagram."""
        homs = [C.hom(b, c) for b in range(C.n_obj)]
        pos = [{h: i for i, h in enumerate(hs)} for hs in homs]
        objs = [FinSSet.discrete(len(h)) for h in homs]
        mors = []
        for m in range(C.n_mor):
            a, b = int(C.src[m]), int(C.tgt[m])
            mp = [pos[a][C.compose(h, m)] for h in homs[b]]
            mors.append(SMap(objs[b], objs[a], [np.asarray(mp, dtype=np.int64)]))
        return cls(C, objs, mors, name=f"C(-,{C.obj_labels[c]})")


# --------------------------------------------------------------------------
# chains of composable morphisms


class ChainTables:
    """Composable chains c_0 -> ... -> c_q with face/degeneracy lookups."""

    def __init__(self, C: FinCat, qmax: int):
        self.C = C
        comp = C.table()
        n = max(C.n_mor, 1)
        self.radix = n
        self.rows: list[np.ndarray] = [np.zeros((C.n_obj, 0), dtype=np.int64)]
        self.first: list[np.ndarray] = [np.arange(C.n_obj)]
        self.last: list[np.ndarray] = [np.arange(C.n_obj)]
        self.codes: list[np.ndarray] = [np.arange(C.n_obj)]
        outs = [np.asarray(o, dtype=np.int64) for o in C.out_mor]
        outdeg = np.array([len(o) for o in outs], dtype=np.int64)
        for q in range(1, qmax + 1):
            prev = self.rows[q - 1]
            last = self.last[q - 1]
            reps = outdeg[last]
            base = np.repeat(prev, reps, axis=0)
            ext = np.concatenate([outs[t] for t in last]) if len(last) else np.empty(0, dtype=np.int64)
            rows = np.hstack([base, ext[:, None]])
            codes = self._code(rows)
            order = np.argsort(codes, kind="stable")
            rows, codes = rows[order], codes[order]
            self.rows.append(rows)
            self.codes.append(codes)
            self.first.append(C.src[rows[:, 0]])
            self.last.append(C.tgt[rows[:, -1]])
        self.face: list[list[np.ndarray] | None] = [None]
        for q in range(1, qmax + 1):
            rows = self.rows[q]
            fq = []
            for i in range(q + 1):
                if q == 1:
                    fq.append(C.tgt[rows[:, 0]] if i == 0 else C.src[rows[:, 0]])
                    continue
                if i == 0:
                    new = rows[:, 1:]
                elif i == q:
                    new = rows[:, :-1]
                else:
                    mid = comp[rows[:, i], rows[:, i - 1]]
                    new = np.hstack([rows[:, : i - 1], mid[:, None], rows[:, i + 1:]])
                fq.append(self.lookup(q - 1, new))
            self.face.append(fq)
        self.degen: list[list[np.ndarray]] = []
        for q in range(qmax):
            rows = self.rows[q]
            sq = []
            for i in range(q + 1):
                obj = self.first[q] if i == 0 else C.tgt[rows[:, i - 1]]
                new = np.hstack([rows[:, :i], C.ident[obj][:, None], rows[:, i:]])
                sq.append(self.lookup(q + 1, new))
            self.degen.append(sq)

    def _code(self, rows: np.ndarray) -> np.ndarray:
        code = np.zeros(rows.shape[0], dtype=np.int64)
        for c in range(rows.shape[1]):
            code = code * self.radix + rows[:, c]
        return code

    def lookup(self, q: int, rows: np.ndarray) -> np.ndarray:
        if q == 0:
            return rows.reshape(-1) if rows.ndim == 1 else rows[:, 0]
        codes = self._code(rows)
        pos = np.searchsorted(self.codes[q], codes)
        if np.any(pos >= len(self.codes[q])) or np.any(self.codes[q][np.minimum(pos, len(self.codes[q]) - 1)] != codes):
            raise IdentityViolation("composite leaves the chain set (broken composition table)", q)
        return pos

    def count(self, q: int) -> int:
        return len(self.first[q])


@dataclass
class BarComplex:
    """Diagonal of the bar construction, materialised through ``upto``."""

    sset: FinSSet
    D: int
    upto: int
    chains: ChainTables
    chain_of: list[np.ndarray]
    y_of: list[np.ndarray]
    x_of: list[np.ndarray]
    offsets: list[np.ndarray]
    x_sizes: list[np.ndarray]
    provenance: dict[str, Any] = field(default_factory=dict)

    @property
    def validity(self) -> int:
        """Degrees k <= D - 2 are certified."""
        return self.D - 2

    def index(self, q: int, chain: np.ndarray, y: np.ndarray, x: np.ndarray) -> np.ndarray:
        first = self.chains.first[q][chain]
        return self.offsets[q][chain] + y * self.x_sizes[q][first] + x

    def homology(self, k_max: int):
        return homology(self.sset, k_max)

    def to_json(self) -> dict[str, Any]:
        return {**self.sset.to_json(), "provenance": self.provenance}


def _sizes(diag: DiagramF | None, n_obj: int, q: int) -> np.ndarray:
    if diag is None:
        return np.ones(n_obj, dtype=np.int64)
    return np.array([X.counts[q] for X in diag.obj], dtype=np.int64)


def bar(Y: CoDiagramF | None, C: FinCat, X: DiagramF | None, D: int, upto: int | None = None) -> BarComplex:
    """Two-sided bar construction B(Y, C, X) truncated at degree D.

    ``None`` stands for the terminal diagram.  Simplices are materialised
    through ``upto`` (default D); the validity stamp is always k <= D - 2.
    """
    if D < 1:
        raise ValueError("D must be at least 1")
    for d in (Y, X):
        if d is not None and d.base is not C:
            raise MismatchedBase("diagram is not over the given category")
    upto = D if upto is None else min(upto, D)
    if X is not None:
        X = X.extended(upto) if X.values_complete() else X
        if X.dim() < upto:
            raise ValueError(f"diagram values only known through degree {X.dim()}")
    if Y is not None:
        Y = Y.extended(upto) if Y.values_complete() else Y
    T = ChainTables(C, upto)
    chain_of, y_of, x_of, offsets, x_sizes = [], [], [], [], []
    for q in range(upto + 1):
        nx = _sizes(X, C.n_obj, q)
        ny = _sizes(Y, C.n_obj, q)
        first, last = T.first[q], T.last[q]
        block = ny[last] * nx[first]
        off = np.concatenate([[0], np.cumsum(block)[:-1]]) if len(block) else np.zeros(0, dtype=np.int64)
        ch = np.repeat(np.arange(len(block)), block)
        w = np.arange(int(block.sum())) - off[ch]
        nxc = nx[first[ch]]
        chain_of.append(ch)
        y_of.append(w // nxc)
        x_of.append(w % nxc)
        offsets.append(off.astype(np.int64))
        x_sizes.append(nx)

    def idx(q, ch, y, x):
        return offsets[q][ch] + y * x_sizes[q][T.first[q][ch]] + x

    faces: list[np.ndarray | None] = [None]
    for q in range(1, upto + 1):
        ch, y, x = chain_of[q], y_of[q], x_of[q]
        first, last = T.first[q][ch], T.last[q][ch]
        rows = T.rows[q][ch]
        tab = np.empty((q + 1, len(ch)), dtype=np.int64)
        for i in range(q + 1):
            ch2 = T.face[q][i][ch]
            if X is None:
                x2 = x
            elif i == 0:
                x2 = _push(X, rows[:, 0], _internal(X, first, x, q, i, "faces"), q - 1)
            else:
                x2 = _internal(X, first, x, q, i, "faces")
            if Y is None:
                y2 = y
            elif i == q:
                y2 = _push(Y, rows[:, -1], _internal(Y, last, y, q, i, "faces"), q - 1)
            else:
                y2 = _internal(Y, last, y, q, i, "faces")
            tab[i] = idx(q - 1, ch2, y2, x2)
        faces.append(tab)
    degens = []
    for q in range(upto):
        ch, y, x = chain_of[q], y_of[q], x_of[q]
        first, last = T.first[q][ch], T.last[q][ch]
        tab = np.empty((q + 1, len(ch)), dtype=np.int64)
        for i in range(q + 1):
            ch2 = T.degen[q][i][ch]
            x2 = x if X is None else _internal(X, first, x, q, i, "degens")
            y2 = y if Y is None else _internal(Y, last, y, q, i, "degens")
            tab[i] = idx(q + 1, ch2, y2, x2)
        degens.append(tab)
    S = FinSSet([len(c) for c in chain_of], faces, degens, complete=False)
    prov = {
        "construction": "bar",
        "model": "diagonal of the bisimplicial bar construction",
        "category": C.name,
        "Y": "*" if Y is None else Y.name,
        "X": "*" if X is None else X.name,
        "D": D,
        "materialised_through": upto,
        "valid_through": D - 2,
    }
    return BarComplex(S, D, upto, T, chain_of, y_of, x_of, offsets, x_sizes, prov)


def _internal(diag: DiagramF, objs: np.ndarray, elems: np.ndarray, q: int, i: int, kind: str) -> np.ndarray:
    """Apply the i-th internal face (from degree q) or degeneracy (at q)."""
    if diag.constant:
        X = diag.obj[0]
        tab = X.faces[q] if kind == "faces" else X.degens[q]
        return tab[i][elems]
    out = np.empty_like(elems)
    for o in np.unique(objs):
        sel = objs == o
        X = diag.obj[o]
        tab = X.faces[q] if kind == "faces" else X.degens[q]
        out[sel] = tab[i][elems[sel]]
    return out


def _push(diag: DiagramF, mors: np.ndarray, elems: np.ndarray, q: int) -> np.ndarray:
    """Apply diag(m) in degree q elementwise (contravariant diagrams pull back)."""
    if diag.constant:
        return elems
    out = np.empty_like(elems)
    for m in np.unique(mors):
        sel = mors == m
        out[sel] = diag.mor[m].maps[q][elems[sel]]
    return out


def nerve(C: FinCat, D: int, upto: int | None = None) -> BarComplex:
    b = bar(None, C, None, D, upto)
    b.provenance["construction"] = "nerve"
    return b


def hocolim(C: FinCat, X: DiagramF, D: int, upto: int | None = None) -> BarComplex:
    b = bar(None, C, X, D, upto)
    b.provenance["construction"] = "hocolim"
    return b


def induced_hocolim_map(F: FinFunctor, Xp: DiagramF, D: int, upto: int | None = None, check: bool = True) -> tuple[SMap, BarComplex, BarComplex]:
    """hocolim_C (X' o F) -> hocolim_C' X' realised simplexwise."""
    if check:
        F.check()
    src = hocolim(F.source, Xp.pullback(F), D, upto)
    tgt = hocolim(F.target, Xp, D, upto)
    maps = []
    for q in range(src.upto + 1):
        ch = src.chain_of[q]
        if q == 0:
            ch2 = F.obj_map[src.chains.first[0][ch]]
        else:
            rows = F.mor_map[src.chains.rows[q][ch]]
            ch2 = tgt.chains.lookup(q, rows)
        maps.append(tgt.index(q, ch2, src.y_of[q], src.x_of[q]))
    return SMap(src.sset, tgt.sset, maps), src, tgt


def colimit_pi0(X: DiagramF) -> tuple[int, dict[tuple[int, int], int]]:
    """Set-level colimit of pi0 X(c) by union-find; returns (size, class map)."""
    C = X.base
    comps = [pi0(Xc) for Xc in X.obj]
    keys = [(c, k) for c in range(C.n_obj) for k in range(comps[c].count)]
    index = {k: i for i, k in enumerate(keys)}
    rows, cols = [], []
    for m in range(C.n_mor):
        a, b = int(C.src[m]), int(C.tgt[m])
        f = X.mor[m].maps[0]
        for v in range(X.obj[a].counts[0]):
            rows.append(index[(a, int(comps[a].vertex_labels[v]))])
            cols.append(index[(b, int(comps[b].vertex_labels[f[v]]))])
    n = len(keys)
    if n == 0:
        return 0, {}
    g = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    count, labels = connected_components(g, directed=False)
    return int(count), {k: int(labels[i]) for k, i in index.items()}


# --------------------------------------------------------------------------
# comma categories


@dataclass
class CommaResult:
    category: FinCat
    objects: list[tuple[int, int]]
    initial: int | None

    @property
    def initial_object(self) -> tuple[int, int] | None:
        return None if self.initial is None else self.objects[self.initial]


def comma_category(d: int, F: FinFunctor) -> CommaResult:
    """(d | F): objects (c, g: d -> F c), morphisms h: c -> c' with F(h) g = g'."""
    C, E = F.source, F.target
    objs = [(c, g) for c in range(C.n_obj) for g in E.hom(d, int(F.obj_map[c]))]
    oi = {o: i for i, o in enumerate(objs)}
    mors = []
    for (c, g) in objs:
        for h in C.out_mor[c]:
            g2 = E.compose(int(F.mor_map[h]), g)
            mors.append((oi[(c, g)], oi[(int(C.tgt[h]), g2)], (h, g)))
    mi = {m[2]: i for i, m in enumerate(mors)}

    def compose(k: int, j: int) -> int:
        h2, _ = mors[k][2]
        h1, g = mors[j][2]
        return mi[(C.compose(h2, h1), g)]

    ident = [mi[(int(C.ident[c]), g)] for (c, g) in objs]
    cat = FinCat(
        objs,
        [m[0] for m in mors],
        [m[1] for m in mors],
        ident,
        None,
        [m[2] for m in mors],
        compose_fn=compose,
        name=f"({E.obj_labels[d]}|F)",
    )
    initial = None
    for a in range(cat.n_obj):
        hit = np.zeros(cat.n_obj, dtype=np.int64)
        for m in cat.out_mor[a]:
            hit[cat.tgt[m]] += 1
        if np.all(hit == 1):
            initial = a
            break
    return CommaResult(cat, objs, initial)


# --------------------------------------------------------------------------
# interchange homotopy on the diagonal of B(Y, C, C, C, X)


@dataclass
class LemmaA2Report:
    q_max: int
    simplices_checked: list[int]
    relations_checked: int
    orientation: str = "d_0 h_0 = f, d_(q+1) h_q = g"

    def to_json(self) -> dict[str, Any]:
        return {
            "q_max": self.q_max,
            "simplices_checked": self.simplices_checked,
            "relations_checked": self.relations_checked,
            "orientation": self.orientation,
            "passed": True,
        }


def _discrete_data(diag: DiagramF | None, C: FinCat):
    if diag is None:
        return [1] * C.n_obj, None
    for X in diag.obj:
        if X.dim_top > 0 and any(len(X.nondegenerate(k)) for k in range(1, X.dim_top + 1)):
            raise ValueError("lemmaA2_check supports levelwise discrete modules")
    return [X.counts[0] for X in diag.obj], [f.maps[0] for f in diag.mor]


def lemmaA2_check(Y: CoDiagramF | None, C: FinCat, X: DiagramF | None, q_max: int) -> LemmaA2Report:
    """Verify the simplicial homotopy h from f = lambda^{q+1} to g = rho^{q+1}.

    Works on tuples directly (independently of the table-based :func:`bar`).
    A simplex of the diagonal in degree q is
    ``(y, (p'_q..p'_1), p, (p''_q..p''_1), x)`` with morphism tuples listed
    from the y side, i.e. the composable chain reads
    ``x -> p''_1 -> ... -> p''_q -> p -> p'_1 -> ... -> p'_q -> y``.
    """
    nx, xmaps = _discrete_data(X, C)
    ny, ymaps = _discrete_data(Y, C)
    comp = C.table()

    def cmp(g, f):
        v = int(comp[g, f])
        if v < 0:
            raise IdentityViolation(f"composite {g} o {f} undefined", -1, witness={"g": g, "f": f})
        return v

    def push_x(m, x):
        return x if xmaps is None else int(xmaps[m][x])

    def pull_y(m, y):
        return y if ymaps is None else int(ymaps[m][y])

    # bar B(Y, C, X): (y, (f_q..f_1), x, c0) with chain listed y-side first
    def bar_face(q, i, s):
        y, fs, x, c0 = s
        chain = list(reversed(fs))  # f_1..f_q
        if i == 0:
            x = push_x(chain[0], x)
            c0 = int(C.tgt[chain[0]])
            chain = chain[1:]
        elif i == q:
            y = pull_y(chain[-1], y)
            chain = chain[:-1]
        else:
            chain = chain[: i - 1] + [cmp(chain[i], chain[i - 1])] + chain[i + 1:]
        return (y, tuple(reversed(chain)), x, c0)

    def bar_degen(q, i, s):
        y, fs, x, c0 = s
        chain = list(reversed(fs))
        obj = c0 if i == 0 else int(C.tgt[chain[i - 1]])
        chain = chain[:i] + [int(C.ident[obj])] + chain[i:]
        return (y, tuple(reversed(chain)), x, c0)

    # diagonal of the five-fold construction
    def diag_face(q, i, s):
        y, P, p, Q, x = s
        # second direction (Q side, touching x)
        qs = list(reversed(Q))  # p''_1..p''_q
        if i == 0:
            x = push_x(qs[0], x)
            qs = qs[1:]
        elif i == q:
            p = cmp(p, qs[-1])
            qs = qs[:-1]
        else:
            qs = qs[: i - 1] + [cmp(qs[i], qs[i - 1])] + qs[i + 1:]
        ps = list(reversed(P))  # p'_1..p'_q
        if i == 0:
            p = cmp(ps[0], p)
            ps = ps[1:]
        elif i == q:
            y = pull_y(ps[-1], y)
            ps = ps[:-1]
        else:
            ps = ps[: i - 1] + [cmp(ps[i], ps[i - 1])] + ps[i + 1:]
        return (y, tuple(reversed(ps)), p, tuple(reversed(qs)), x)

    def diag_degen(q, i, s):
        y, P, p, Q, x = s
        qs = list(reversed(Q))
        a = int(C.src[qs[0]]) if qs else int(C.src[p])
        objq = a if i == 0 else int(C.tgt[qs[i - 1]])
        qs = qs[:i] + [int(C.ident[objq])] + qs[i:]
        ps = list(reversed(P))
        objp = int(C.tgt[p]) if i == 0 else int(C.tgt[ps[i - 1]])
        ps = ps[:i] + [int(C.ident[objp])] + ps[i:]
        return (y, tuple(reversed(ps)), p, tuple(reversed(qs)), x)

    def start(Q, p):
        return int(C.src[Q[-1]]) if Q else int(C.src[p])

    def f_map(q, s):
        y, P, p, Q, x = s
        m = p
        for g in Q:  # Q lists p''_q..p''_1
            m = cmp(m, g)
        return (y, P, push_x(m, x), int(C.tgt[p]))

    def g_map(q, s):
        y, P, p, Q, x = s
        m = p
        for g in reversed(P):
            m = cmp(g, m)
        return (pull_y(m, y), Q, x, start(Q, p))

    def h(q, i, s):
        y, P, p, Q, x = s
        ps = list(reversed(P))  # p'_1..p'_q
        qs = list(reversed(Q))  # p''_1..p''_q
        m = p
        for g in reversed(qs[i:]):  # p''_q .. p''_{i+1}
            m = cmp(m, g)
        for g in ps[:i]:  # then p'_1 .. p'_i on the left
            m = cmp(g, m)
        chain = qs[:i] + [m] + ps[i:]  # f_1..f_{q+1}
        return (y, tuple(reversed(chain)), x, start(Q, p))

    # enumerate diagonal simplices
    def chains_from(obj, length):
        out = [((), obj)]
        for _ in range(length):
            out = [((g,) + fs, int(C.tgt[g])) for fs, t in out for g in C.out_mor[t]]
        return out

    counts, relations = [], 0
    for q in range(q_max + 1):
        simplices = []
        for a in range(C.n_obj):
            for Q, b in chains_from(a, q):
                for p in C.out_mor[b]:
                    for P, c in chains_from(int(C.tgt[p]), q):
                        for x in range(nx[a]):
                            for y in range(ny[c]):
                                simplices.append((y, P, p, Q, x))
        counts.append(len(simplices))
        for s in simplices:
            H = [h(q, j, s) for j in range(q + 1)]
            if bar_face(q + 1, 0, H[0]) != f_map(q, s):
                raise IdentityViolation("d_0 h_0 != f", q, 0, 0, witness=repr(s))
            if bar_face(q + 1, q + 1, H[q]) != g_map(q, s):
                raise IdentityViolation(f"d_{q+1} h_{q} != g", q, q + 1, q, witness=repr(s))
            for j in range(q + 1):
                for i in range(q + 2):
                    lhs = bar_face(q + 1, i, H[j])
                    if i < j:
                        rhs = h(q - 1, j - 1, diag_face(q, i, s))
                    elif i == j and j > 0:
                        rhs = bar_face(q + 1, j, H[j - 1])
                    elif i > j + 1:
                        rhs = h(q - 1, j, diag_face(q, i - 1, s))
                    else:
                        continue
                    relations += 1
                    if lhs != rhs:
                        raise IdentityViolation(f"d_{i} h_{j} relation fails", q, i, j, witness=repr(s))
                for i in range(q + 2):
                    lhs = bar_degen(q + 1, i, H[j])
                    if i <= j:
                        rhs = h(q + 1, j + 1, diag_degen(q, i, s))
                    else:
                        rhs = h(q + 1, j, diag_degen(q, i - 1, s))
                    relations += 1
                    if lhs != rhs:
                        raise IdentityViolation(f"s_{i} h_{j} relation fails", q, i, j, witness=repr(s))
            # f and g are simplicial
            for i in range(q + 1 if q > 0 else 0):
                ds = diag_face(q, i, s)
                for name, fn in (("f", f_map), ("g", g_map)):
                    relations += 1
                    if bar_face(q, i, fn(q, s)) != fn(q - 1, ds):
                        raise IdentityViolation(f"{name} does not commute with d_{i}", q, i, -1, witness=repr(s))
    return LemmaA2Report(q_max, counts, relations)
