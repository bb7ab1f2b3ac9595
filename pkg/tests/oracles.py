"""Independent brute-force oracles.

Nothing here imports the package: homology comes from ordered simplicial
complexes by Gaussian elimination over Q and F_p, and ring facts from
plain integer arithmetic.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd


def _faces_of(facets):
    simplices = set()
    for f in facets:
        f = tuple(sorted(f))
        for r in range(1, len(f) + 1):
            simplices.update(itertools.combinations(f, r))
    by_dim: dict[int, list] = {}
    for s in sorted(simplices):
        by_dim.setdefault(len(s) - 1, []).append(s)
    return by_dim


def _rank(rows, p=None):
    a = [list(r) for r in rows]
    if p is None:
        a = [[Fraction(v) for v in r] for r in a]
    rank, ncols = 0, len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(a)) if (a[i][c] % p if p else a[i][c])), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(int(a[rank][c]), -1, p) if p else 1 / a[rank][c]
        a[rank] = [(v * inv) % p if p else v * inv for v in a[rank]]
        for i in range(len(a)):
            if i != rank and (a[i][c] % p if p else a[i][c]):
                f = a[i][c]
                a[i] = [((x - f * y) % p) if p else x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def complex_betti(facets, k_max, p=None):
    """Betti numbers of a simplicial complex over Q (p=None) or F_p."""
    by_dim = _faces_of(facets)
    index = {d: {s: i for i, s in enumerate(v)} for d, v in by_dim.items()}
    ranks = {}
    for d in range(1, k_max + 2):
        if d not in by_dim:
            ranks[d] = 0
            continue
        rows = [[0] * len(by_dim[d]) for _ in by_dim[d - 1]]
        for j, s in enumerate(by_dim[d]):
            for i in range(len(s)):
                rows[index[d - 1][s[:i] + s[i + 1:]]][j] += (-1) ** i
        ranks[d] = _rank(rows, p)
    return [len(by_dim.get(k, [])) - ranks.get(k, 0) - ranks.get(k + 1, 0) for k in range(k_max + 1)]


def zmod_units_orders(n):
    """Element orders of (Z/n)^x by repeated multiplication."""
    units = [a for a in range(n) if gcd(a, n) == 1]
    orders = []
    for a in units:
        k, x = 1, a % n
        while x != 1 % n:
            x = x * a % n
            k += 1
        orders.append(k)
    return sorted(orders)


def invariants_from_orders(orders):
    """Invariant factors of a finite abelian group from its element orders.

    Works for the small groups used here by matching the order multiset of
    every candidate decomposition.
    """
    n = len(orders)
    target = sorted(orders)
    for parts in _factorisations(n):
        if _orders_of(parts) == target:
            return tuple(x for x in parts if x > 1)
    raise ValueError("no abelian group matches")


def _factorisations(n, lo=2):
    if n == 1:
        yield ()
        return
    for d in range(lo, n + 1):
        if n % d == 0:
            for rest in _factorisations(n // d, d):
                if not rest or rest[0] % d == 0:
                    yield (d,) + rest


def _orders_of(parts):
    out = []
    for elem in itertools.product(*[range(p) for p in parts]):
        o = 1
        for x, p in zip(elem, parts):
            q = p // gcd(x, p)
            o = o * q // gcd(o, q)
        out.append(o)
    return sorted(out)


def dual_numbers_f2_units():
    """Units of F2[x]/x^2 as pairs (a, b) = a + b x."""
    elems = [(a, b) for a in range(2) for b in range(2)]

    def mul(u, v):
        return ((u[0] * v[0]) % 2, (u[0] * v[1] + u[1] * v[0]) % 2)

    return [u for u in elems if any(mul(u, v) == (1, 0) for v in elems)]


RP2_FACETS = [
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
    (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5),
]
