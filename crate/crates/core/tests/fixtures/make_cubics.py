"""Regenerates cubics_gf2.txt: ternary cubic forms over GF(2), one per line.

Every GL(3, 2)-orbit contributes at least one member; the rest are drawn
uniformly (fixed seed) from the remaining nonzero forms, 500 in total.
"""

import itertools
import random

MONOS = [(a, b, 3 - a - b) for a in range(3, -1, -1) for b in range(3 - a, -1, -1)]
NAMES = "xyz"


def mul(p, q):
    out = {}
    for (m1, c1), (m2, c2) in itertools.product(p.items(), q.items()):
        m = tuple(a + b for a, b in zip(m1, m2))
        out[m] = (out.get(m, 0) + c1 * c2) % 2
    return {m: c for m, c in out.items() if c}


def add(p, q):
    out = dict(p)
    for m, c in q.items():
        out[m] = (out.get(m, 0) + c) % 2
    return {m: c for m, c in out.items() if c}


def transform(mask, matrix):
    images = [{tuple(int(i == j) for i in range(3)): 1 for j in range(3) if row[j]} for row in matrix]
    total = {}
    for k, mono in enumerate(MONOS):
        if mask >> k & 1:
            term = {(0, 0, 0): 1}
            for var, e in enumerate(mono):
                for _ in range(e):
                    term = mul(term, images[var])
            total = add(total, term)
    return sum(1 << MONOS.index(m) for m in total)


def invertible(m):
    a = [row[:] for row in m]
    rank = 0
    for col in range(3):
        piv = next((r for r in range(rank, 3) if a[r][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(3):
            if r != rank and a[r][col]:
                a[r] = [x ^ y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank == 3


def show(mask):
    terms = []
    for k, (a, b, c) in enumerate(MONOS):
        if mask >> k & 1:
            parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(NAMES, (a, b, c)) if e]
            terms.append("*".join(parts))
    return " + ".join(terms)


def main():
    group = [m for m in (
        [list(bits[0:3]), list(bits[3:6]), list(bits[6:9])]
        for bits in itertools.product((0, 1), repeat=9)
    ) if invertible(m)]
    assert len(group) == 168
    orbit_of = {}
    orbits = []
    for f in range(1, 1024):
        if f in orbit_of:
            continue
        orbit = sorted({transform(f, g) for g in group})
        for h in orbit:
            orbit_of[h] = len(orbits)
        orbits.append(orbit)
    chosen = {orbit[0] for orbit in orbits}
    rng = random.Random(20241015)
    rest = [f for f in range(1, 1024) if f not in chosen]
    chosen.update(rng.sample(rest, 500 - len(chosen)))
    with open("cubics_gf2.txt", "w") as out:
        out.write("# ternary cubics over GF(2): polynomial # orbit size\n")
        for f in sorted(chosen):
            out.write(f"{show(f)} # {len(orbits[orbit_of[f]])}\n")


if __name__ == "__main__":
    main()
