"""Finite commutative rings given by addition and multiplication tables.

Elements are the integers 0..n-1; ``labels`` gives their printed names.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import ConfigError, LawViolation
from .snf import AbelianGroup, group_from_torsion_counts


@dataclass
class FinCommRing:
    name: str
    labels: list[str]
    add: np.ndarray
    mul: np.ndarray
    zero: int
    one: int
    spec: dict[str, Any]

    def __post_init__(self):
        self.add = np.asarray(self.add, dtype=np.int64)
        self.mul = np.asarray(self.mul, dtype=np.int64)
        n = self.size
        self.neg = np.empty(n, dtype=np.int64)
        for a in range(n):
            self.neg[a] = int(np.flatnonzero(self.add[a] == self.zero)[0])

    @property
    def size(self) -> int:
        return len(self.labels)

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"FinCommRing({self.name})"

    def from_int(self, c: int) -> int:
        """The image of the integer c under Z -> R."""
        out = self.zero
        step = self.one if c >= 0 else int(self.neg[self.one])
        for _ in range(abs(c)):
            out = int(self.add[out, step])
        return out

    def int_table(self, lo: int, hi: int) -> np.ndarray:
        """Images of lo..hi (inclusive) as an array indexed by c - lo."""
        return np.array([self.from_int(c) for c in range(lo, hi + 1)], dtype=np.int64)

    def additive_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.zero:
            x = int(self.add[x, a])
            k += 1
        return k

    def additive_invariants(self) -> tuple[int, ...]:
        return self.additive_group().torsion

    def additive_group(self) -> AbelianGroup:
        def count(d):
            return sum(1 for a in range(self.size) if self._times(a, d) == self.zero)

        return group_from_torsion_counts(self.size, count)

    def _times(self, a: int, d: int) -> int:
        x = self.zero
        for _ in range(d):
            x = int(self.add[x, a])
        return x

    def units(self) -> list[int]:
        return [a for a in range(self.size) if np.any(self.mul[a] == self.one)]

    def inverse(self, a: int) -> int:
        hits = np.flatnonzero(self.mul[a] == self.one)
        if not len(hits):
            raise ValueError(f"{self.labels[a]} is not a unit")
        return int(hits[0])

    def power(self, a: int, d: int) -> int:
        x = self.one
        for _ in range(d):
            x = int(self.mul[x, a])
        return x

    def unit_group(self) -> AbelianGroup:
        us = self.units()

        def count(d):
            return sum(1 for u in us if self.power(u, d) == self.one)

        return group_from_torsion_counts(len(us), count)

    def check_axioms(self) -> None:
        n = self.size
        A, M = self.add, self.mul
        r = np.arange(n)
        if not (np.array_equal(A, A.T) and np.array_equal(M, M.T)):
            raise LawViolation("commutativity", f"{self.name} tables are not symmetric")
        if not (np.array_equal(A[self.zero], r) and np.array_equal(M[self.one], r)):
            raise LawViolation("identity", f"{self.name}: 0 or 1 is not neutral")
        if not np.array_equal(A[r, self.neg], np.full(n, self.zero)):
            raise LawViolation("negation", f"{self.name}: missing additive inverses")
        a, b, c = np.meshgrid(r, r, r, indexing="ij")
        if not np.array_equal(A[A[a, b], c], A[a, A[b, c]]):
            raise LawViolation("associativity", f"{self.name}: addition")
        if not np.array_equal(M[M[a, b], c], M[a, M[b, c]]):
            raise LawViolation("associativity", f"{self.name}: multiplication")
        if not np.array_equal(M[a, A[b, c]], A[M[a, b], M[a, c]]):
            raise LawViolation("distributivity", f"{self.name}")

    def to_json(self) -> dict[str, Any]:
        return dict(self.spec)


def zmod(n: int) -> FinCommRing:
    if n < 2:
        raise ConfigError("Z/n needs n >= 2")
    r = np.arange(n)
    return FinCommRing(f"Z/{n}", [str(i) for i in r], (r[:, None] + r[None, :]) % n, (r[:, None] * r[None, :]) % n, 0, 1, {"kind": "Z/n", "n": n})


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


def _poly_ring(p: int, modulus: Sequence[int], name: str, spec: dict[str, Any]) -> FinCommRing:
    """F_p[x] / (monic modulus), modulus given low degree first without the leading 1."""
    k = len(modulus)
    elems = list(itertools.product(range(p), repeat=k))  # coefficient tuples, low degree first
    index = {e: i for i, e in enumerate(elems)}

    def mul(a, b):
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d]
            if c:
                prod[d] = 0
                for i, m in enumerate(modulus):
                    prod[d - k + i] = (prod[d - k + i] - c * m) % p
        return tuple(prod[:k])

    n = len(elems)
    add = np.empty((n, n), dtype=np.int64)
    mult = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            add[i, j] = index[tuple((x + y) % p for x, y in zip(a, b))]
            mult[i, j] = index[mul(a, b)]

    def label(e):
        terms = []
        for d, c in enumerate(e):
            if c:
                mono = "" if d == 0 else ("x" if d == 1 else f"x^{d}")
                coef = str(c) if (c != 1 or d == 0) else ""
                terms.append(coef + mono)
        return "+".join(terms) if terms else "0"

    one = index[(1,) + (0,) * (k - 1)]
    return FinCommRing(name, [label(e) for e in elems], add, mult, index[(0,) * k], one, spec)


def _irreducible(p: int, k: int) -> tuple[int, ...]:
    for mod in itertools.product(range(p), repeat=k):
        # monic x^k + sum mod[i] x^i has no factor of degree <= k/2
        R = _poly_ring(p, mod, "", {})
        zero_divisor = any(R.mul[a, b] == R.zero for a in range(1, R.size) for b in range(1, R.size))
        if not zero_divisor:
            return mod
    raise ConfigError(f"no irreducible polynomial of degree {k} over F_{p}")


def galois_field(q: int) -> FinCommRing:
    for p in range(2, q + 1):
        if q % p == 0:
            break
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    if r != 1 or not _is_prime(p):
        raise ConfigError(f"{q} is not a prime power")
    if k == 1:
        R = zmod(p)
        R.name, R.spec = f"F{p}", {"kind": "F_q", "q": q}
        return R
    return _poly_ring(p, _irreducible(p, k), f"F{q}", {"kind": "F_q", "q": q})


def poly_quotient(p: int, modulus: Sequence[int]) -> FinCommRing:
    """F_p[x] / (x^k + ...); e.g. ``poly_quotient(2, (0, 0))`` is F2[x]/x^2."""
    k = len(modulus)
    terms = [f"x^{k}"] + [("" if c == 1 else str(c)) + (f"x^{i}" if i > 1 else ("x" if i == 1 else "1")) for i, c in reversed(list(enumerate(modulus))) if c]
    name = f"F{p}[x]/" + "+".join(terms)
    spec = {"kind": "tables", "presentation": {"p": p, "modulus": list(modulus)}}
    return _poly_ring(p, modulus, name, spec)


def from_tables(name: str, add: Sequence[Sequence[int]], mul: Sequence[Sequence[int]], zero: int = 0, one: int = 1, labels: Sequence[str] | None = None) -> FinCommRing:
    labels = list(labels) if labels is not None else [str(i) for i in range(len(add))]
    spec = {"kind": "tables", "name": name, "add": [list(r) for r in add], "mul": [list(r) for r in mul], "zero": zero, "one": one, "labels": labels}
    R = FinCommRing(name, labels, np.asarray(add), np.asarray(mul), zero, one, spec)
    R.check_axioms()
    return R


_PATTERNS = [
    (re.compile(r"^Z/(\d+)$"), lambda m: zmod(int(m.group(1)))),
    (re.compile(r"^(?:F|GF|F_)(\d+)$"), lambda m: galois_field(int(m.group(1)))),
    (re.compile(r"^F(\d+)\[x\]/x\^(\d+)$"), lambda m: poly_quotient(int(m.group(1)), (0,) * int(m.group(2)))),
]


def parse_ring(text: str) -> FinCommRing:
    """Parse "Z/n", "F5", "F4", "F2[x]/x^2"."""
    t = text.replace(" ", "")
    for pat, build in _PATTERNS:
        m = pat.match(t)
        if m:
            R = build(m)
            if pat.pattern.startswith("^F(\\d+)\\["):
                R.name = t
            return R
    raise ConfigError(f"cannot parse ring {text!r}")


def ring_from_json(data: dict[str, Any]) -> FinCommRing:
    kind = data.get("kind")
    if kind == "Z/n":
        return zmod(int(data["n"]))
    if kind == "F_q":
        return galois_field(int(data["q"]))
    if kind == "tables":
        if "presentation" in data:
            pr = data["presentation"]
            return poly_quotient(int(pr["p"]), tuple(pr["modulus"]))
        return from_tables(data.get("name", "R"), data["add"], data["mul"], data.get("zero", 0), data.get("one", 1), data.get("labels"))
    raise ConfigError(f"unknown ring kind {kind!r}")


CORPUS = ["Z/2", "Z/4", "Z/6", "F5", "F2[x]/x^2"]
