"""Finite strict n-categories with explicit tables, and the machinery
that connects them to free cells: snapshots, pasting evaluation, functor
enumeration, equivalences and homotopy groups.

Identities are implicit throughout: a k-cell serves as its own identity
in every higher dimension, so `src`/`tgt` above a cell's dimension
return the cell and composition with a lower-dimensional cell simply
returns the other argument.  Composition tables therefore only store
pairs in which both cells have dimension above the composition level
(this includes whiskering, where the dimensions differ).
"""

from __future__ import annotations

import json
from itertools import product as iproduct

from .cells import (CapacityError, ComposabilityError, atom, cell_key,
                    cell_dim as fc_dim, compose as fc_compose,
                    enumerate_cells, excise, source, target)
from .core import DomainError, ParityComplex, StructureError


class FiniteNCat:
    """Explicitly tabulated finite strict n-category."""

    def __init__(self, dim: int, dims: dict, src: dict, tgt: dict, comp: dict):
        self.dim = int(dim)
        self._dims = dict(dims)
        self._src = dict(src)
        self._tgt = dict(tgt)
        self._comp = dict(comp)
        self._cache: dict = {}

    # -- structure queries --------------------------------------------------

    def cells(self):
        return sorted(self._dims, key=lambda c: (self._dims[c], str(c)))

    def has_cell(self, c) -> bool:
        return c in self._dims

    def cell_dim(self, c) -> int:
        try:
            return self._dims[c]
        except KeyError:
            raise StructureError(f"unknown cell {c!r}") from None

    def cells_of_dim(self, k):
        return [c for c in self.cells() if self._dims[c] == k]

    def zero_cells(self):
        return self.cells_of_dim(0)

    def cells_leq(self, k):
        return [c for c in self.cells() if self._dims[c] <= k]

    def src(self, c, k):
        if k >= self.cell_dim(c):
            return c
        return self._src[(c, k)]

    def tgt(self, c, k):
        if k >= self.cell_dim(c):
            return c
        return self._tgt[(c, k)]

    def comp(self, k, a, b):
        """k-composite a then b (diagrammatic order)."""
        ta, sb = self.tgt(a, k), self.src(b, k)
        if ta != sb:
            raise ComposabilityError(k, ta, sb)
        if self.cell_dim(a) <= k:
            return b
        if self.cell_dim(b) <= k:
            return a
        try:
            return self._comp[(k, a, b)]
        except KeyError:
            raise StructureError(
                f"composition table has no entry for {k}-composite "
                f"of {a!r} and {b!r}") from None

    def hom(self, k, s, t):
        """Cells of dimension <= k whose (k-1)-boundary is (s, t); for
        k above the category dimension this forces identities."""
        if k <= 0:
            raise DomainError("hom needs k >= 1; use zero_cells for k = 0")
        index = self._cache.setdefault("hom", {})
        if k not in index:
            table: dict = {}
            for c in self.cells():
                if self._dims[c] <= k:
                    table.setdefault((self.src(c, k - 1), self.tgt(c, k - 1)), []).append(c)
            index[k] = table
        return list(index[k].get((s, t), ()))

    # -- (de)serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        cells = []
        for c in self.cells():
            d = self._dims[c]
            entry = {"id": str(c), "dim": d}
            if d > 0:
                entry["src"] = {str(k): str(self._src[(c, k)]) for k in range(d)}
                entry["tgt"] = {str(k): str(self._tgt[(c, k)]) for k in range(d)}
            cells.append(entry)
        comp = sorted(
            ({"k": k, "a": str(a), "b": str(b), "r": str(r)}
             for (k, a, b), r in self._comp.items()),
            key=lambda e: (e["k"], e["a"], e["b"]))
        return {"dim": self.dim, "cells": cells, "comp": comp}

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteNCat":
        try:
            dims, src, tgt = {}, {}, {}
            for entry in data["cells"]:
                cid = str(entry["id"])
                dims[cid] = int(entry["dim"])
                for k, v in entry.get("src", {}).items():
                    src[(cid, int(k))] = str(v)
                for k, v in entry.get("tgt", {}).items():
                    tgt[(cid, int(k))] = str(v)
            comp = {}
            for entry in data.get("comp", ()):
                comp[(int(entry["k"]), str(entry["a"]), str(entry["b"]))] = str(entry["r"])
            return cls(int(data["dim"]), dims, src, tgt, comp)
        except (KeyError, TypeError, ValueError) as exc:
            raise StructureError(f"malformed n-category data: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"


class ProductNCat:
    """The power category X^S for a finite index set S, left lazy.

    Cells are S-tuples of cells of X (in the fixed sorted order of S);
    all structure is componentwise.  Nothing is materialized, so powers
    far too large to tabulate still answer boundary and hom queries.
    """

    def __init__(self, base, index):
        self.base = base
        self.index = tuple(sorted(index, key=str))
        self.dim = base.dim
        self._cache: dict = {}

    def has_cell(self, fam) -> bool:
        return (isinstance(fam, tuple) and len(fam) == len(self.index)
                and all(self.base.has_cell(c) for c in fam))

    def cell_dim(self, fam) -> int:
        return max((self.base.cell_dim(c) for c in fam), default=0)

    def src(self, fam, k):
        return tuple(self.base.src(c, k) for c in fam)

    def tgt(self, fam, k):
        return tuple(self.base.tgt(c, k) for c in fam)

    def comp(self, k, a, b):
        if self.tgt(a, k) != self.src(b, k):
            raise ComposabilityError(k, self.tgt(a, k), self.src(b, k))
        return tuple(self.base.comp(k, x, y) for x, y in zip(a, b))

    def zero_cells(self):
        return [tuple(t) for t in iproduct(self.base.zero_cells(), repeat=len(self.index))]

    def cells_leq(self, k):
        pool = self.base.cells_leq(k)
        return [tuple(t) for t in iproduct(pool, repeat=len(self.index))]

    def cells(self):
        return self.cells_leq(self.dim)

    def hom(self, k, s, t):
        lists = [self.base.hom(k, si, ti) for si, ti in zip(s, t)]
        return [tuple(c) for c in iproduct(*lists)]

    def component(self, fam, label):
        return fam[self.index.index(label)]


def cell_str(c) -> str:
    """Canonical printable id for explicit or tuple-shaped cells."""
    if isinstance(c, tuple):
        return "(" + ",".join(cell_str(x) for x in c) + ")"
    return str(c)


def materialize(A, cap: int = 20000) -> FiniteNCat:
    """Expand any cat-like object into an explicit FiniteNCat (string ids)."""
    cells = A.cells()
    if len(cells) > cap:
        raise CapacityError(f"{len(cells)} cells exceeds cap {cap}")
    names = {c: cell_str(c) for c in cells}
    dims = {names[c]: A.cell_dim(c) for c in cells}
    src, tgt, comp = {}, {}, {}
    for c in cells:
        for k in range(A.cell_dim(c)):
            src[(names[c], k)] = names[A.src(c, k)]
            tgt[(names[c], k)] = names[A.tgt(c, k)]
    for k in range(A.dim):
        for a in cells:
            if A.cell_dim(a) <= k:
                continue
            for b in cells:
                if A.cell_dim(b) <= k:
                    continue
                if A.tgt(a, k) == A.src(b, k):
                    comp[(k, names[a], names[b])] = names[A.comp(k, a, b)]
    return FiniteNCat(A.dim, dims, src, tgt, comp)


# -- validation ----------------------------------------------------------------


def validate_cat(A) -> list:
    """Exhaustive law check on an explicit finite n-category; returns a
    list of violation strings (empty iff lawful).  Quadratic-to-cubic in
    the number of cells, intended for desk-scale instances."""
    errs = []
    cells = A.cells()
    for c in cells:
        d = A.cell_dim(c)
        for j in range(d):
            sj, tj = A.src(c, j), A.tgt(c, j)
            if A.cell_dim(sj) > j or A.cell_dim(tj) > j:
                errs.append(f"boundary of {c!r} at {j} has too high dimension")
            for k in range(j):
                if A.src(sj, k) != A.src(c, k) or A.src(tj, k) != A.src(c, k):
                    errs.append(f"globularity fails under src for {c!r} at ({k},{j})")
                if A.tgt(sj, k) != A.tgt(c, k) or A.tgt(tj, k) != A.tgt(c, k):
                    errs.append(f"globularity fails under tgt for {c!r} at ({k},{j})")
    # composition: totality on composable pairs, boundaries, closure
    pairs = {}
    for k in range(A.dim):
        pairs[k] = []
        for a in cells:
            if A.cell_dim(a) <= k:
                continue
            for b in cells:
                if A.cell_dim(b) <= k:
                    continue
                if A.tgt(a, k) != A.src(b, k):
                    continue
                try:
                    r = A.comp(k, a, b)
                except StructureError:
                    errs.append(f"missing {k}-composite of {a!r}, {b!r}")
                    continue
                pairs[k].append((a, b, r))
                if not A.has_cell(r):
                    errs.append(f"{k}-composite of {a!r}, {b!r} not a cell")
                    continue
                if A.src(r, k) != A.src(a, k) or A.tgt(r, k) != A.tgt(b, k):
                    errs.append(f"{k}-composite of {a!r}, {b!r} has wrong k-boundary")
                for j in range(k + 1, max(A.cell_dim(a), A.cell_dim(b))):
                    try:
                        if A.src(r, j) != A.comp(k, A.src(a, j), A.src(b, j)):
                            errs.append(f"src_{j} not compatible with comp_{k} "
                                        f"on {a!r}, {b!r}")
                        if A.tgt(r, j) != A.comp(k, A.tgt(a, j), A.tgt(b, j)):
                            errs.append(f"tgt_{j} not compatible with comp_{k} "
                                        f"on {a!r}, {b!r}")
                    except (ComposabilityError, StructureError) as exc:
                        errs.append(f"boundaries of {k}-composite of {a!r}, {b!r} "
                                    f"fail to compose: {exc}")
    for k, trips in pairs.items():
        comp_map = {(a, b): r for a, b, r in trips}
        for a, b, ab in trips:
            for c in cells:
                if A.cell_dim(c) <= k or A.tgt(b, k) != A.src(c, k):
                    continue
                if (b, c) not in comp_map:
                    continue
                bc = comp_map[(b, c)]
                try:
                    lhs = A.comp(k, ab, c)
                    rhs = A.comp(k, a, bc)
                except (ComposabilityError, StructureError) as exc:
                    errs.append(f"associativity composites missing at level {k} "
                                f"on {a!r}, {b!r}, {c!r}: {exc}")
                    continue
                if lhs != rhs:
                    errs.append(f"associativity fails at level {k} on "
                                f"{a!r}, {b!r}, {c!r}")
    for j in range(A.dim):
        for k in range(j + 1, A.dim):
            for a, b, ab in pairs[j]:
                for c, d, cd in pairs[j]:
                    if A.tgt(ab, k) != A.src(cd, k):
                        continue
                    try:
                        lhs = A.comp(k, ab, cd)
                        ac = A.comp(k, a, c)
                        bd = A.comp(k, b, d)
                        rhs = A.comp(j, ac, bd)
                    except (ComposabilityError, StructureError):
                        continue
                    if lhs != rhs:
                        errs.append(f"interchange fails at levels ({j},{k}) on "
                                    f"{a!r},{b!r},{c!r},{d!r}")
    return errs


# -- free snapshots --------------------------------------------------------------


def free_snapshot(C: ParityComplex, dim_bound=None, cap: int = 100000) -> FiniteNCat:
    """The free category on C, tabulated: cells are the closure of the
    atoms, boundaries and composition induced by the cell formulas."""
    cs = enumerate_cells(C, dim_bound=dim_bound, cap=cap)
    names = {c: cell_key(C, c) for c in cs}
    dims = {names[c]: fc_dim(C, c) for c in cs}
    src, tgt, comp = {}, {}, {}
    for c in cs:
        for k in range(fc_dim(C, c)):
            src[(names[c], k)] = names[source(C, c, k)]
            tgt[(names[c], k)] = names[target(C, c, k)]
    for a in cs:
        for b in cs:
            for k in range(min(fc_dim(C, a), fc_dim(C, b))):
                if target(C, a, k) == source(C, b, k):
                    comp[(k, names[a], names[b])] = names[fc_compose(C, a, b, k)]
    top = max(dims.values()) if dims else 0
    return FiniteNCat(max(top, 0), dims, src, tgt, comp)


# -- pasting evaluation ------------------------------------------------------------


def evaluate(C: ParityComplex, assignment: dict, cell, A):
    """Value of a free cell in A under a generator assignment: decompose
    the cell into atoms and replay the plan with A's compositions."""
    plan = excise(C, cell)

    def run(p):
        if p.kind == "atom":
            try:
                return assignment[p.x]
            except KeyError:
                raise DomainError(f"assignment missing generator {p.x!r}") from None
        left, right = run(p.left), run(p.right)
        try:
            return A.comp(p.k, left, right)
        except ComposabilityError as exc:
            raise DomainError(
                f"assignment not boundary-compatible near generators "
                f"{sorted(set(p.leaves()))}: {exc}") from exc

    return run(plan)


def _gen_boundaries(C: ParityComplex, x: str):
    bounds = C._cache.setdefault("gen_bounds", {})
    if x not in bounds:
        d = C.dim_of(x)
        at = atom(C, x)
        bounds[x] = (source(C, at, d - 1), target(C, at, d - 1))
    return bounds[x]


def check_assignment(C: ParityComplex, A, assignment: dict) -> list:
    """Boundary-compatibility report for a generator assignment."""
    errs = []
    for x in C.ids():
        if x not in assignment:
            errs.append(f"missing generator {x!r}")
            continue
        val = assignment[x]
        d = C.dim_of(x)
        if not A.has_cell(val):
            errs.append(f"{x!r} maps to unknown cell {val!r}")
            continue
        if A.cell_dim(val) > d:
            errs.append(f"{x!r} (dim {d}) maps to higher-dimensional cell")
            continue
        if d == 0:
            continue
        s_cell, t_cell = _gen_boundaries(C, x)
        try:
            vs = evaluate(C, assignment, s_cell, A)
            vt = evaluate(C, assignment, t_cell, A)
        except DomainError as exc:
            errs.append(str(exc))
            continue
        if A.src(val, d - 1) != vs:
            errs.append(f"source of {x!r} maps to {A.src(val, d - 1)!r}, "
                        f"boundary evaluates to {vs!r}")
        if A.tgt(val, d - 1) != vt:
            errs.append(f"target of {x!r} mismatch")
    return errs


def enumerate_functors(C: ParityComplex, A, dim_bound=None) -> list:
    """All generator assignments extending to functors from the free
    category on C into A.

    Searches dimension by dimension; once the generators below d are
    fixed, the admissible values of each d-generator are exactly the
    cells with the evaluated boundary, so the levels multiply out
    independently.
    """
    if dim_bound is None:
        dim_bound = C.max_dim()
    partials = [{}]
    for d in range(dim_bound + 1):
        gens = C.grade(d)
        if not gens:
            continue
        new = []
        for part in partials:
            options = []
            ok = True
            for x in gens:
                if d == 0:
                    cands = A.zero_cells()
                else:
                    s_cell, t_cell = _gen_boundaries(C, x)
                    s = evaluate(C, part, s_cell, A)
                    t = evaluate(C, part, t_cell, A)
                    cands = A.hom(d, s, t)
                if not cands:
                    ok = False
                    break
                options.append(cands)
            if not ok:
                continue
            for combo in iproduct(*options):
                ext = dict(part)
                ext.update(zip(gens, combo))
                new.append(ext)
        partials = new
    return partials


def random_functor(C: ParityComplex, A, rng, dim_bound=None, attempts: int = 200):
    """One boundary-compatible assignment chosen at random; None if the
    sampler keeps hitting dead ends."""
    if dim_bound is None:
        dim_bound = C.max_dim()
    for _ in range(attempts):
        part: dict = {}
        dead = False
        for d in range(dim_bound + 1):
            for x in C.grade(d):
                if d == 0:
                    cands = A.zero_cells()
                else:
                    s_cell, t_cell = _gen_boundaries(C, x)
                    s = evaluate(C, part, s_cell, A)
                    t = evaluate(C, part, t_cell, A)
                    cands = A.hom(d, s, t)
                if not cands:
                    dead = True
                    break
                part[x] = rng.choice(sorted(cands, key=cell_str))
            if dead:
                break
        if not dead:
            return part
    return None


def pushforward_assignment(C_src: ParityComplex, A, image_value) -> dict:
    """Assignment induced on C_src by a cellular map that may collapse
    generators.

    ``image_value(x)`` returns the A-value of the (dimension-preserving)
    image generator, or None when the map collapses x; a collapsed
    generator takes the evaluated value of its source pasting, which
    must agree with the target's.
    """
    psi: dict = {}
    for x in C_src.ids():
        img = image_value(x)
        if img is not None:
            psi[x] = img
            continue
        d = C_src.dim_of(x)
        if d == 0:
            raise DomainError(f"vertex {x!r} cannot collapse")
        s_cell, t_cell = _gen_boundaries(C_src, x)
        vs = evaluate(C_src, psi, s_cell, A)
        vt = evaluate(C_src, psi, t_cell, A)
        if vs != vt:
            raise DomainError(
                f"collapsed generator {x!r} has non-identity boundary "
                f"({vs!r} vs {vt!r})")
        psi[x] = vs
    return psi


# -- equivalences and homotopy ----------------------------------------------------


def is_equivalence(A, f) -> bool:
    """Whether a cell is an equivalence in the sense appropriate to its
    dimension: strictly invertible at the top level, invertible up to
    higher equivalences below."""
    return _is_equiv(A, f, max(A.cell_dim(f), 1))


def _is_equiv(A, f, m) -> bool:
    memo = A._cache.setdefault("equiv", {})
    key = (f, m)
    if key in memo:
        return memo[key]
    memo[key] = False  # cycle guard: assume not until proven
    a, b = A.src(f, m - 1), A.tgt(f, m - 1)
    result = False
    if m >= A.dim:
        for g in A.hom(max(m, 1), b, a):
            try:
                if A.comp(m - 1, f, g) == a and A.comp(m - 1, g, f) == b:
                    result = True
                    break
            except (ComposabilityError, StructureError):
                continue
    else:
        for g in A.hom(m, b, a):
            try:
                c1 = A.comp(m - 1, f, g)
                c2 = A.comp(m - 1, g, f)
            except (ComposabilityError, StructureError):
                continue
            u_ok = any(_is_equiv(A, u, m + 1) for u in A.hom(m + 1, c1, a))
            if not u_ok:
                continue
            v_ok = any(_is_equiv(A, v, m + 1) for v in A.hom(m + 1, c2, b))
            if v_ok:
                result = True
                break
    memo[key] = result
    return result


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry, key=str)] = min(rx, ry, key=str)


def pi0(A) -> list:
    """Equivalence classes of 0-cells: generated by the spans of
    equivalence 1-cells, closed symmetrically and transitively."""
    uf = _UnionFind(A.zero_cells())
    for f in A.cells():
        if A.cell_dim(f) != 1:
            continue
        if is_equivalence(A, f):
            uf.union(A.src(f, 0), A.tgt(f, 0))
    classes: dict = {}
    for c in A.zero_cells():
        classes.setdefault(uf.find(c), []).append(c)
    return [tuple(sorted(v, key=str)) for _, v in
            sorted(classes.items(), key=lambda kv: str(kv[0]))]


def auteq(A, a) -> FiniteNCat:
    """The hom category of loops at a 0-cell, cut down to equivalence
    loops, regraded one dimension down.  The cell `a` itself plays the
    identity loop."""
    if A.cell_dim(a) != 0:
        raise DomainError(f"{a!r} is not a 0-cell")
    loops = [c for c in A.cells()
             if A.cell_dim(c) >= 1 and A.src(c, 0) == a and A.tgt(c, 0) == a]
    kept0 = {a} | {f for f in loops if A.cell_dim(f) == 1 and is_equivalence(A, f)}
    kept = set(kept0)
    for c in loops:
        if A.cell_dim(c) >= 2 and A.src(c, 1) in kept0 and A.tgt(c, 1) in kept0:
            kept.add(c)
    dims = {c: max(A.cell_dim(c) - 1, 0) for c in kept}
    src, tgt, comp = {}, {}, {}
    for c in kept:
        for k in range(dims[c]):
            src[(c, k)] = A.src(c, k + 1)
            tgt[(c, k)] = A.tgt(c, k + 1)
    for x in kept:
        for y in kept:
            for k in range(min(dims[x], dims[y])):
                if A.tgt(x, k + 1) == A.src(y, k + 1):
                    r = A.comp(k + 1, x, y)
                    if r in kept:
                        comp[(k, x, y)] = r
    return FiniteNCat(max(A.dim - 1, 0), dims, src, tgt, comp)


class GroupTable:
    """Finite group presented by a multiplication table on class
    representatives."""

    def __init__(self, elements, table, identity):
        self.elements = tuple(elements)
        self.table = dict(table)
        self.identity = identity

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, g, h):
        return self.table[(g, h)]

    def is_group(self) -> bool:
        els = set(self.elements)
        for g in self.elements:
            if self.mul(g, self.identity) != g or self.mul(self.identity, g) != g:
                return False
            if not any(self.mul(g, h) == self.identity for h in self.elements):
                return False
            for h in self.elements:
                if self.mul(g, h) not in els:
                    return False
                for k in self.elements:
                    if self.mul(self.mul(g, h), k) != self.mul(g, self.mul(h, k)):
                        return False
        return True

    def is_abelian(self) -> bool:
        return all(self.mul(g, h) == self.mul(h, g)
                   for g in self.elements for h in self.elements)


def pi_n(A, a, n: int) -> GroupTable:
    """The n-th homotopy group at a 0-cell: iterate the loop construction
    n-1 times, then take classes of equivalence loops with multiplication
    from composition at the bottom level."""
    if n < 1:
        raise DomainError("pi_n needs n >= 1; use pi0 for n = 0")
    if A.cell_dim(a) != 0:
        raise DomainError(f"{a!r} is not a 0-cell")
    cat = A
    for _ in range(n - 1):
        cat = auteq(cat, a)
    E = auteq(cat, a)
    classes = pi0(E)
    rep_of = {}
    for cls in classes:
        for c in cls:
            rep_of[c] = cls[0]
    elements = sorted({cls[0] for cls in classes}, key=str)
    table = {}
    for g in elements:
        for h in elements:
            table[(g, h)] = rep_of[cat.comp(0, g, h)]
    return GroupTable(elements, table, rep_of[a])
