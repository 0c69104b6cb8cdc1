"""Truncated cosimplicial n-categories and their descent categories.

Three routes to the same structure:

* ``desc1`` builds the descent category of a cosimplicial 1-category
  from its explicit description: objects are pairs (F, f) with f a
  morphism from the 1-coface of F to the 0-coface, normalized by the
  codegeneracy and satisfying a cocycle triangle; morphisms are squares.

* ``desc2`` does the same for 2-categories: objects (F, f, phi) with a
  2-cell phi measuring the cocycle up to a tetrahedron equation,
  morphisms (u, v) with a triangular-cylinder equation and 2-cells with
  a circular-cylinder equation.

* ``desc_general`` implements the uniform construction: a k-cell is a
  cosimplicially natural family of functors out of the free categories
  on glob(k) x simplex(m), one per level m <= n+1; boundaries restrict
  along the glob inclusions, and composition evaluates each generator's
  image under the glob cocomposition inside a glued complex.

The explicit and general routes are compared cell for cell in the test
suite; the general one derives every equation mechanically from the
pasting engine, so agreement cross-validates the transcribed equations
of the explicit ones.
"""

from __future__ import annotations

from .build import glob, pair_id, product, simplex
from .cells import FreeCell, atom, source, target
from .core import DomainError, Element, ParityComplex, StructureError
from .ncat import (FiniteNCat, ProductNCat, cell_str, evaluate, materialize,
                   pushforward_assignment)
from .simplicial import SimplicialSetTrunc, _collapse_subset


class CosimplicialNCat:
    """Levels E_0..E_top with coface and codegeneracy functors given as
    callables on cells; coface(m, r) maps level m to m+1 (0 <= r <= m+1)
    and codegen(m, r) maps level m+1 to m (0 <= r <= m)."""

    def __init__(self, levels, cofaces, codegens):
        self.levels = list(levels)
        self.top = len(self.levels) - 1
        self._cofaces = dict(cofaces)
        self._codegens = dict(codegens)

    def coface(self, m, r, cell):
        return self._cofaces[(m, r)](cell)

    def codegen(self, m, r, cell):
        return self._codegens[(m, r)](cell)

    def inject(self, cell, m, image, tgt_level):
        """Image of a level-m cell under the coface chain realizing the
        injection with the given image vertices inside 0..tgt_level."""
        if tgt_level == m:
            return cell
        missing = [r for r in range(tgt_level + 1) if r not in image]
        r = max(missing)
        lower = tuple(i if i < r else i - 1 for i in image)
        inner = self.inject(cell, m, lower, tgt_level - 1)
        return self.coface(tgt_level - 1, r, inner)

    def check_identities(self, max_cells: int = 4000) -> list:
        """Cosimplicial identities plus functoriality of the structure
        maps, verified on every cell of every level small enough to
        enumerate."""
        errs = []
        pools = []
        for E in self.levels:
            try:
                cells = E.cells()
                if len(cells) > max_cells:
                    cells = None
            except (MemoryError, OverflowError):
                cells = None
            pools.append(cells)
        for m in range(self.top - 1):
            if pools[m] is None:
                continue
            for r in range(m + 2):
                for s in range(r + 1, m + 3):
                    for c in pools[m]:
                        lhs = self.coface(m + 1, s, self.coface(m, r, c))
                        rhs = self.coface(m + 1, r, self.coface(m, s - 1, c))
                        if lhs != rhs:
                            errs.append(f"coface identity d_{s} d_{r} fails "
                                        f"at level {m} on {cell_str(c)}")
        for m in range(self.top):
            if pools[m] is None:
                continue
            for r in range(m + 1):
                for c in pools[m]:
                    if self.codegen(m, r, self.coface(m, r, c)) != c:
                        errs.append(f"i_{r} d_{r} != id at level {m}")
                    if self.codegen(m, r, self.coface(m, r + 1, c)) != c:
                        errs.append(f"i_{r} d_{r + 1} != id at level {m}")
        for m in range(self.top):
            if pools[m] is None:
                continue
            E, F = self.levels[m], self.levels[m + 1]
            for r in range(m + 2):
                for c in pools[m]:
                    d = E.cell_dim(c)
                    img = self.coface(m, r, c)
                    if F.cell_dim(img) > d:
                        errs.append(f"coface d_{r} at level {m} raises dimension")
                        continue
                    for k in range(d):
                        if (F.src(img, k) != self.coface(m, r, E.src(c, k)) or
                                F.tgt(img, k) != self.coface(m, r, E.tgt(c, k))):
                            errs.append(f"coface d_{r} at level {m} breaks "
                                        f"boundaries on {cell_str(c)}")
        return errs


def constant_cosimplicial(X, top: int) -> CosimplicialNCat:
    ident = lambda c: c
    cofaces = {(m, r): ident for m in range(top) for r in range(m + 2)}
    codegens = {(m, r): ident for m in range(top) for r in range(m + 1)}
    return CosimplicialNCat([X] * (top + 1), cofaces, codegens)


def cosimp_hom(R: SimplicialSetTrunc, X) -> CosimplicialNCat:
    """Powers of X indexed by the levels of a truncated simplicial set,
    with cofaces/codegeneracies reindexing along its faces/degeneracies."""
    levels = [ProductNCat(X, R.levels[m]) for m in range(R.top + 1)]
    cofaces, codegens = {}, {}
    for m in range(R.top):
        src_idx, tgt_idx = levels[m].index, levels[m + 1].index
        for r in range(m + 2):
            face = R.faces[(m + 1, r)]
            positions = tuple(src_idx.index(face[lab]) for lab in tgt_idx)
            cofaces[(m, r)] = (lambda t, pos=positions:
                               tuple(t[i] for i in pos))
        for r in range(m + 1):
            degen = R.degens[(m, r)]
            positions = tuple(tgt_idx.index(degen[lab]) for lab in src_idx)
            codegens[(m, r)] = (lambda t, pos=positions:
                                tuple(t[i] for i in pos))
    return CosimplicialNCat(levels, cofaces, codegens)


def cosimplicial_from_dict(data: dict) -> CosimplicialNCat:
    try:
        levels = [FiniteNCat.from_dict(d) for d in data["levels"]]
        cofaces, codegens = {}, {}
        for entry in data["cofaces"]:
            table = {str(k): str(v) for k, v in entry["map"].items()}
            cofaces[(int(entry["m"]), int(entry["r"]))] = (
                lambda c, t=table: t[c])
        for entry in data["codegens"]:
            table = {str(k): str(v) for k, v in entry["map"].items()}
            codegens[(int(entry["m"]), int(entry["r"]))] = (
                lambda c, t=table: t[c])
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"malformed cosimplicial data: {exc}") from exc
    return CosimplicialNCat(levels, cofaces, codegens)


def cosimplicial_to_dict(E: CosimplicialNCat) -> dict:
    levels = []
    for lv in E.levels:
        if not isinstance(lv, FiniteNCat):
            lv = materialize(lv)
        levels.append(lv.to_dict())
    cofaces, codegens = [], []
    for m in range(E.top):
        pool = E.levels[m].cells()
        for r in range(m + 2):
            cofaces.append({"m": m, "r": r, "map": {
                cell_str(c): cell_str(E.coface(m, r, c)) for c in pool}})
        pool1 = E.levels[m + 1].cells()
        for r in range(m + 1):
            codegens.append({"m": m, "r": r, "map": {
                cell_str(c): cell_str(E.codegen(m, r, c)) for c in pool1}})
    return {"levels": levels, "cofaces": cofaces, "codegens": codegens}


# -- the explicit 1-dimensional descent category ---------------------------------


def desc1(E: CosimplicialNCat) -> FiniteNCat:
    """Descent category of a cosimplicial 1-category truncated at
    level >= 2."""
    return desc1_with_data(E)[0]


def desc1_with_data(E: CosimplicialNCat):
    """desc1 plus its raw object and morphism data, for comparisons."""
    if E.top < 2:
        raise DomainError("desc1 needs levels 0..2")
    for lv in E.levels[:3]:
        if lv.dim > 1:
            raise DomainError("desc1 needs 1-categories")
    E0, E1, E2 = E.levels[0], E.levels[1], E.levels[2]

    objects = []  # (oid, F, f)
    for F in E0.zero_cells():
        d1F, d0F = E.coface(0, 1, F), E.coface(0, 0, F)
        for f in E1.hom(1, d1F, d0F):
            if E.codegen(0, 0, f) != F:
                continue
            straight = E.coface(1, 1, f)
            bent = E2.comp(0, E.coface(1, 2, f), E.coface(1, 0, f))
            if straight != bent:
                continue
            objects.append((f"({cell_str(F)};{cell_str(f)})", F, f))
    objects.sort()
    obj_F = {oid: F for oid, F, _ in objects}

    dims = {oid: 0 for oid, _, _ in objects}
    src, tgt, comp = {}, {}, {}
    morphisms = {}  # (oid1, oid2, u) -> mid
    for oid1, F1, f1 in objects:
        for oid2, F2, f2 in objects:
            for u in E0.hom(1, F1, F2):
                if E1.comp(0, f1, E.coface(0, 0, u)) != \
                        E1.comp(0, E.coface(0, 1, u), f2):
                    continue
                if oid1 == oid2 and u == F1:
                    continue  # implicit identity
                mid = f"[{oid1}->{oid2}|{cell_str(u)}]"
                morphisms[(oid1, oid2, u)] = mid
                dims[mid] = 1
                src[(mid, 0)], tgt[(mid, 0)] = oid1, oid2
    for (o1, o2, u), m1 in morphisms.items():
        for (o2b, o3, w), m2 in morphisms.items():
            if o2b != o2:
                continue
            uw = E0.comp(0, u, w)
            if o1 == o3 and uw == obj_F[o1]:
                comp[(0, m1, m2)] = o1
            else:
                comp[(0, m1, m2)] = morphisms[(o1, o3, uw)]
    return FiniteNCat(1, dims, src, tgt, comp), objects, morphisms


# -- the explicit 2-dimensional descent 2-category --------------------------------


def _tetrahedron_holds(E, f, phi) -> bool:
    E3 = E.levels[3]
    f01 = E.inject(f, 1, (0, 1), 3)
    f23 = E.inject(f, 1, (2, 3), 3)
    lhs = E3.comp(1, E.coface(2, 1, phi),
                  E3.comp(0, E.coface(2, 3, phi), f23))
    rhs = E3.comp(1, E.coface(2, 2, phi),
                  E3.comp(0, f01, E.coface(2, 0, phi)))
    return lhs == rhs


def _cylinder_holds(E, phi, psi, u, v, f, g) -> bool:
    E2 = E.levels[2]
    u0 = E.inject(u, 0, (0,), 2)
    u2 = E.inject(u, 0, (2,), 2)
    f01 = E.inject(f, 1, (0, 1), 2)
    g12 = E.inject(g, 1, (1, 2), 2)
    d0v, d1v, d2v = (E.coface(1, r, v) for r in (0, 1, 2))
    lhs = E2.comp(1, E2.comp(0, phi, u2),
                  E2.comp(1, E2.comp(0, f01, d0v), E2.comp(0, d2v, g12)))
    rhs = E2.comp(1, d1v, E2.comp(0, u0, psi))
    return lhs == rhs


def desc2(E: CosimplicialNCat) -> FiniteNCat:
    """Descent 2-category of a cosimplicial 2-category truncated at
    level >= 3; the three defining equations are evaluated as pasting
    composites in levels 3, 2 and 1."""
    return desc2_with_data(E)[0]


def desc2_with_data(E: CosimplicialNCat):
    """desc2 plus its raw object/morphism/2-cell data, for comparisons."""
    if E.top < 3:
        raise DomainError("desc2 needs levels 0..3")
    E0, E1 = E.levels[0], E.levels[1]
    E2c = E.levels[2]

    objects = []  # (oid, F, f, phi)
    for F in E0.zero_cells():
        d1F, d0F = E.coface(0, 1, F), E.coface(0, 0, F)
        for f in E1.hom(1, d1F, d0F):
            if E.codegen(0, 0, f) != F:
                continue
            straight = E.coface(1, 1, f)
            bent = E2c.comp(0, E.coface(1, 2, f), E.coface(1, 0, f))
            for phi in E2c.hom(2, straight, bent):
                if E.codegen(1, 0, phi) != f or E.codegen(1, 1, phi) != f:
                    continue
                if not _tetrahedron_holds(E, f, phi):
                    continue
                objects.append((f"({cell_str(F)};{cell_str(f)};{cell_str(phi)})",
                                F, f, phi))
    objects.sort()
    obj_data = {oid: (F, f, phi) for oid, F, f, phi in objects}

    dims = {oid: 0 for oid in obj_data}
    src, tgt, comp = {}, {}, {}

    morphisms = {}  # (oid1, oid2, u, v) -> mid; identities NOT included
    for oid1, F1, f1, p1 in objects:
        for oid2, F2, f2, p2 in objects:
            for u in E0.hom(1, F1, F2):
                top_path = E1.comp(0, f1, E.coface(0, 0, u))
                bot_path = E1.comp(0, E.coface(0, 1, u), f2)
                for v in E1.hom(2, top_path, bot_path):
                    if E.codegen(0, 0, v) != u:
                        continue
                    if not _cylinder_holds(E, p1, p2, u, v, f1, f2):
                        continue
                    if oid1 == oid2 and u == F1 and v == f1:
                        continue
                    mid = f"[{oid1}->{oid2}|{cell_str(u)};{cell_str(v)}]"
                    morphisms[(oid1, oid2, u, v)] = mid
                    dims[mid] = 1
                    src[(mid, 0)], tgt[(mid, 0)] = oid1, oid2

    def mor_id(key):
        o1, o2, u, v = key
        F1, f1, _ = obj_data[o1]
        if o1 == o2 and u == F1 and v == f1:
            return o1
        return morphisms[key]

    # endpoints for 2-cells include the identity morphisms
    mor_plus = sorted(morphisms.items(), key=lambda kv: kv[1])
    mor_plus += [((oid, oid, F, f), oid) for oid, (F, f, _) in
                 sorted(obj_data.items())]
    key_of = {mid: key for key, mid in mor_plus}

    two_cells = {}  # (mid1, mid2, alpha) -> cid
    for key1, mid1 in mor_plus:
        o1, o2, u, v = key1
        f1 = obj_data[o1][1]
        g2 = obj_data[o2][1]
        for key2, mid2 in mor_plus:
            if (key2[0], key2[1]) != (o1, o2):
                continue
            u2, v2 = key2[2], key2[3]
            for alpha in E0.hom(2, u, u2):
                lhs = E1.comp(1, E1.comp(0, f1, E.coface(0, 0, alpha)), v2)
                rhs = E1.comp(1, v, E1.comp(0, E.coface(0, 1, alpha), g2))
                if lhs != rhs:
                    continue
                if mid1 == mid2 and alpha == u:
                    continue  # implicit identity 2-cell
                cid = f"[{mid1}=>{mid2}|{cell_str(alpha)}]"
                two_cells[(mid1, mid2, alpha)] = cid
                dims[cid] = 2
                src[(cid, 0)], tgt[(cid, 0)] = o1, o2
                src[(cid, 1)], tgt[(cid, 1)] = mid1, mid2

    def two_id(mid1, mid2, alpha):
        if mid1 == mid2 and alpha == key_of[mid1][2]:
            return mid1
        return two_cells[(mid1, mid2, alpha)]

    def compose_mor(key1, key2):
        o1 = key1[0]
        o3 = key2[1]
        u, v = key1[2], key1[3]
        u2, v2 = key2[2], key2[3]
        uu = E0.comp(0, u, u2)
        vv = E1.comp(1,
                     E1.comp(0, v, E.coface(0, 0, u2)),
                     E1.comp(0, E.coface(0, 1, u), v2))
        return (o1, o3, uu, vv)

    # level-0 table: every ordered pair of non-identity cells with
    # matching 0-boundary (morphisms, 2-cells, and the whiskerings)
    zero_pool = ([("m", key, mid) for key, mid in mor_plus if mid != key[0]] +
                 [("c", key, cid) for key, cid in
                  sorted(two_cells.items(), key=lambda kv: kv[1])])
    for kind1, k1, c1 in zero_pool:
        end1 = k1[1] if kind1 == "m" else key_of[k1[0]][1]
        for kind2, k2, c2 in zero_pool:
            start2 = k2[0] if kind2 == "m" else key_of[k2[0]][0]
            if end1 != start2:
                continue
            if kind1 == "m":
                ka1 = kb1 = k1
                al1 = k1[2]
            else:
                ka1, kb1, al1 = key_of[k1[0]], key_of[k1[1]], k1[2]
            if kind2 == "m":
                ka2 = kb2 = k2
                al2 = k2[2]
            else:
                ka2, kb2, al2 = key_of[k2[0]], key_of[k2[1]], k2[2]
            ra = compose_mor(ka1, ka2)
            rb = compose_mor(kb1, kb2)
            alpha = E0.comp(0, al1, al2)
            ma, mb = mor_id(ra), mor_id(rb)
            if kind1 == "m" and kind2 == "m":
                comp[(0, c1, c2)] = ma
            else:
                comp[(0, c1, c2)] = two_id(ma, mb, alpha)
    for (m1, m2, a1), c1 in sorted(two_cells.items(), key=lambda kv: kv[1]):
        for (m2b, m3, a2), c2 in sorted(two_cells.items(), key=lambda kv: kv[1]):
            if m2b != m2:
                continue
            comp[(1, c1, c2)] = two_id(m1, m3, E0.comp(1, a1, a2))
    return FiniteNCat(2, dims, src, tgt, comp), objects, morphisms, two_cells


# -- the general descent construction ----------------------------------------------


_GLOBS: dict = {}
_PRODUCTS: dict = {}
_DECOMP: dict = {}
_GLUED: dict = {}
_GLUED_PRODUCTS: dict = {}


def _glob(k):
    if k not in _GLOBS:
        _GLOBS[k] = glob(k)
    return _GLOBS[k]


def _gs_product(k, m):
    if (k, m) not in _PRODUCTS:
        C = product(_glob(k), simplex(m))
        decomp = {}
        for x in _glob(k).ids():
            for a in simplex(m).ids():
                decomp[pair_id(x, a)] = (x, a)
        _PRODUCTS[(k, m)] = C
        _DECOMP[(k, m)] = decomp
    return _PRODUCTS[(k, m)], _DECOMP[(k, m)]


def _glued_glob(k, j) -> ParityComplex:
    """Two copies of glob(k) glued along their j-boundary: shared pairs
    below j, three j-cells a, b, c, and doubled L/R copies above."""
    if (k, j) in _GLUED:
        return _GLUED[(k, j)]
    els = []
    for m in range(j):
        for eps in ("-", "+"):
            xid = f"({eps},{m})"
            if m == 0:
                els.append(Element(xid, 0))
            else:
                els.append(Element(xid, m,
                                   frozenset([f"(-,{m - 1})"]),
                                   frozenset([f"(+,{m - 1})"])))
    for name in ("a", "b", "c"):
        if j == 0:
            els.append(Element(name, 0))
        else:
            els.append(Element(name, j,
                               frozenset([f"(-,{j - 1})"]),
                               frozenset([f"(+,{j - 1})"])))

    def below(side, m):
        if m - 1 == j:
            return ("a", "b") if side == "L" else ("b", "c")
        return (f"{side}(-,{m - 1})", f"{side}(+,{m - 1})")

    for m in range(j + 1, k):
        for side in ("L", "R"):
            neg, pos = below(side, m)
            for eps in ("-", "+"):
                els.append(Element(f"{side}({eps},{m})", m,
                                   frozenset([neg]), frozenset([pos])))
    for side in ("L", "R"):
        neg, pos = below(side, k)
        els.append(Element(side, k, frozenset([neg]), frozenset([pos])))
    out = ParityComplex(k, els)
    _GLUED[(k, j)] = out
    return out


def _glued_product(k, j, m):
    if (k, j, m) not in _GLUED_PRODUCTS:
        _GLUED_PRODUCTS[(k, j, m)] = product(_glued_glob(k, j), simplex(m))
    return _GLUED_PRODUCTS[(k, j, m)]


def _glued_image_ids(x: str, k: int, j: int):
    """Glued-complex ids a glob(k) element maps to: shared below j, the
    outer j-cells at j, both copies above j."""
    if x == str(k):
        return ("L", "R")
    eps = x[1]
    m = int(x[3:-1])
    if m < j:
        return (x,)
    if m == j:
        return ("a",) if eps == "-" else ("c",)
    return (f"L{x}", f"R{x}")


class Family:
    """One cell of the general descent construction: per level m, a
    generator assignment for the free category on glob(k) x simplex(m)."""

    __slots__ = ("k", "levels", "_id")

    def __init__(self, k: int, levels: dict):
        self.k = k
        self.levels = {m: dict(asg) for m, asg in levels.items()}
        parts = [f"k{k}"]
        for m in sorted(self.levels):
            inner = ",".join(f"{pid}={cell_str(v)}"
                             for pid, v in sorted(self.levels[m].items()))
            parts.append(f"m{m}{{{inner}}}")
        self._id = "|".join(parts)

    @property
    def id(self) -> str:
        return self._id

    def __eq__(self, other):
        return isinstance(other, Family) and self._id == other._id

    def __hash__(self):
        return hash(self._id)


def _is_identity_lift(fam: Family) -> bool:
    k = fam.k
    if k == 0:
        return False
    top, minus, plus = str(k), f"(-,{k - 1})", f"(+,{k - 1})"
    for m, asg in fam.levels.items():
        for a in simplex(m).ids():
            tv = asg[pair_id(top, a)]
            if tv != asg[pair_id(minus, a)] or tv != asg[pair_id(plus, a)]:
                return False
    return True


def _restrict(fam: Family, side: str) -> Family:
    """Source ('-') or target ('+') family: precompose with the glob
    inclusion sending the lower top to the matching boundary element."""
    k = fam.k
    out = {}
    for m, asg in fam.levels.items():
        low = {}
        for x in _glob(k - 1).ids():
            x_up = f"({side},{k - 1})" if x == str(k - 1) else x
            for a in simplex(m).ids():
                low[pair_id(x, a)] = asg[pair_id(x_up, a)]
        out[m] = low
    return Family(k - 1, out)


def _lift(fam: Family, k: int) -> Family:
    """View a family as an identity cell family of dimension k."""
    cur = fam
    while cur.k < k:
        kk = cur.k
        out = {}
        for m, asg in cur.levels.items():
            up = {}
            for a in simplex(m).ids():
                topval = asg[pair_id(str(kk), a)]
                up[pair_id(f"(-,{kk})", a)] = topval
                up[pair_id(f"(+,{kk})", a)] = topval
                up[pair_id(str(kk + 1), a)] = topval
                for x in _glob(kk).ids():
                    if x != str(kk):
                        up[pair_id(x, a)] = asg[pair_id(x, a)]
            out[m] = up
        cur = Family(kk + 1, out)
    return cur


def _normalize(fam: Family) -> Family:
    while fam.k > 0 and _is_identity_lift(fam):
        fam = _restrict(fam, "-")
    return fam


def _full_subset(m: int) -> str:
    return "".join(str(v) for v in range(m + 1))


def _level_assignments(E, k, m, lower):
    """All admissible level-m assignments extending the level-(m-1) one:
    coface-pinned values plus hom-constrained free generators."""
    P, decomp = _gs_product(k, m)
    Em = E.levels[m]
    pinned = {}
    full = _full_subset(m)
    if m > 0:
        for pid, (x, a) in sorted(decomp.items()):
            if a == full:
                continue
            present = sorted(int(ch) for ch in a)
            vals = []
            for r in range(m + 1):
                if r in present:
                    continue
                a_low = "".join(str(v if v < r else v - 1) for v in present)
                vals.append(E.coface(m - 1, r, lower[pair_id(x, a_low)]))
            if any(v != vals[0] for v in vals[1:]):
                return
            pinned[pid] = vals[0]
        for pid in sorted(pinned):
            d = P.dim_of(pid)
            if d == 0:
                continue
            at = atom(P, pid)
            try:
                vs = evaluate(P, pinned, source(P, at, d - 1), Em)
                vt = evaluate(P, pinned, target(P, at, d - 1), Em)
            except DomainError:
                return
            if Em.src(pinned[pid], d - 1) != vs or Em.tgt(pinned[pid], d - 1) != vt:
                return
    free = sorted((pid for pid, (x, a) in decomp.items() if a == full),
                  key=lambda pid: (P.dim_of(pid), pid))

    def extend(i, asg):
        if i == len(free):
            yield dict(asg)
            return
        pid = free[i]
        d = P.dim_of(pid)
        if d == 0:
            cands = Em.zero_cells()
        else:
            at = atom(P, pid)
            try:
                s = evaluate(P, asg, source(P, at, d - 1), Em)
                t = evaluate(P, asg, target(P, at, d - 1), Em)
            except DomainError:
                return
            cands = Em.hom(d, s, t)
        for c in sorted(cands, key=cell_str):
            asg[pid] = c
            yield from extend(i + 1, asg)
            del asg[pid]

    yield from extend(0, dict(pinned))


def _codegen_natural(E, k, m, asg, lower) -> bool:
    P, decomp = _gs_product(k, m)
    for r in range(m):
        def image_value(pid, r=r):
            x, a = decomp[pid]
            y = _collapse_subset(a, r)
            return None if y is None else lower[pair_id(x, y)]

        try:
            psi = pushforward_assignment(P, E.levels[m - 1], image_value)
        except DomainError:
            return False
        for pid in P.ids():
            if E.codegen(m - 1, r, asg[pid]) != psi[pid]:
                return False
    return True


def _enumerate_families(E, k, n):
    partials = [dict()]
    for m in range(n + 2):
        new = []
        for fam in partials:
            lower = fam.get(m - 1)
            for asg in _level_assignments(E, k, m, lower):
                if m >= 1 and not _codegen_natural(E, k, m, asg, lower):
                    continue
                ext = dict(fam)
                ext[m] = asg
                new.append(ext)
        partials = new
    return [Family(k, fam) for fam in partials]


def _compose_families(E, n, phi: Family, psi: Family, j: int) -> Family:
    """Composite of two j-composable k-cell families.

    Only the low-dimensional free generators need a genuine computation
    (the image of their atom under the cocomposition glob(k) ->
    glued(k, j), evaluated in the level); everything else is pinned by
    cofaces or forced as an identity, which _family_from_slots
    reconstructs and cross-checks.
    """
    k = phi.k
    G = _glob(k)
    slots = {}
    for m in range(n + 2):
        P, decomp = _gs_product(k, m)
        Em = E.levels[m]
        full = _full_subset(m)
        for x in G.ids():
            pid = pair_id(x, full)
            d = G.dim_of(x)
            if d + m > Em.dim:
                continue  # identity-forced, reconstructed downstream
            if d < j:
                slots[(m, pid)] = phi.levels[m][pid]
            elif d == j:
                side = phi if x == f"(-,{j})" else psi
                slots[(m, pid)] = side.levels[m][pid]
            else:
                GP = _glued_product(k, j, m)
                combined = _combined_assignment(E, k, j, m, phi, psi)
                at = atom(P, pid)
                img_M = frozenset(q for e in at.M
                                  for q in _image_pids(e, k, j, decomp))
                img_P = frozenset(q for e in at.P
                                  for q in _image_pids(e, k, j, decomp))
                slots[(m, pid)] = evaluate(GP, combined,
                                           FreeCell(img_M, img_P), Em)
    out = _family_from_slots(E, k, n, slots)
    if out is None:
        raise StructureError("composite family is not natural")
    return out


def _combined_assignment(E, k, j, m, phi: Family, psi: Family) -> dict:
    """Generator assignment on glued(k, j) x simplex(m) built from the
    two composable families."""
    combined = {}
    for y in _glued_glob(k, j).ids():
        if y in ("a", "b", "c"):
            src_x = {"a": f"(-,{j})", "b": f"(+,{j})", "c": f"(+,{j})"}[y]
            fam = psi if y == "c" else phi
        elif y in ("L", "R"):
            src_x, fam = str(k), (phi if y == "L" else psi)
        elif y.startswith(("L", "R")):
            src_x, fam = y[1:], (phi if y.startswith("L") else psi)
        else:
            src_x, fam = y, phi
        for a in simplex(m).ids():
            combined[pair_id(y, a)] = fam.levels[m][pair_id(src_x, a)]
    return combined


def _image_pids(pid, k, j, decomp):
    x, a = decomp[pid]
    return [pair_id(y, a) for y in _glued_image_ids(x, k, j)]


def _boundaries(fam: Family):
    """All (j, source id, target id) with implicit-identity handling."""
    out = {}
    cur_s, cur_t = fam, fam
    for jj in range(fam.k - 1, -1, -1):
        if cur_s.k > jj:
            cur_s = _normalize(_restrict(cur_s, "-"))
        if cur_t.k > jj:
            cur_t = _normalize(_restrict(cur_t, "+"))
        out[jj] = (cur_s.id, cur_t.id)
    return out


class DescResult:
    """Outcome of the general descent construction: an n-category with
    composition for n <= 2, cell sets with boundaries only for n = 3."""

    def __init__(self, n, families, cat):
        self.n = n
        self.families = {fam.id: fam for fam in families}
        self.dims = {fam.id: fam.k for fam in families}
        self.src, self.tgt = {}, {}
        for fam in families:
            for jj, (s, t) in _boundaries(fam).items():
                self.src[(fam.id, jj)] = s
                self.tgt[(fam.id, jj)] = t
        self.cat = cat

    def cells(self):
        return sorted(self.families, key=lambda c: (self.dims[c], c))

    def counts(self) -> dict:
        out: dict = {}
        for c in self.families:
            out[self.dims[c]] = out.get(self.dims[c], 0) + 1
        return out


def desc_general(E: CosimplicialNCat, n: int) -> DescResult:
    """Descent of a truncated cosimplicial n-category by the uniform
    formula; k-cells for k <= n, each a natural family of functors out
    of the free categories on glob(k) x simplex(m) for m <= n+1."""
    if n < 0 or n > 3:
        raise DomainError("desc_general supports 0 <= n <= 3")
    if E.top < n + 1:
        raise DomainError(f"need levels through {n + 1}, have {E.top}")
    all_fams = []
    for k in range(n + 1):
        for fam in _enumerate_families(E, k, n):
            if not _is_identity_lift(fam):
                all_fams.append(fam)
    by_id = {fam.id: fam for fam in all_fams}

    cat = None
    if n <= 2:
        dims = {fam.id: fam.k for fam in all_fams}
        src, tgt = {}, {}
        bounds = {}
        for fam in all_fams:
            bounds[fam.id] = _boundaries(fam)
            for jj, (s, t) in bounds[fam.id].items():
                src[(fam.id, jj)] = s
                tgt[(fam.id, jj)] = t
        comp = {}
        for f1 in all_fams:
            for f2 in all_fams:
                for j in range(min(f1.k, f2.k)):
                    if bounds[f1.id][j][1] != bounds[f2.id][j][0]:
                        continue
                    kmax = max(f1.k, f2.k)
                    res = _normalize(_compose_families(
                        E, n, _lift(f1, kmax), _lift(f2, kmax), j))
                    if res.id not in by_id:
                        raise StructureError(
                            "descent composition fell outside the "
                            f"enumerated cells at level {j}")
                    comp[(j, f1.id, f2.id)] = res.id
        cat = FiniteNCat(n, dims, src, tgt, comp)
    return DescResult(n, all_fams, cat)


# -- canonical maps from the explicit constructions --------------------------------


def _family_from_slots(E, k, n, slots):
    """Assemble the unique family with the given free-slot values; the
    remaining free generators must be identity-forced.  None when no
    such family exists."""
    levels = {}
    for m in range(n + 2):
        P, decomp = _gs_product(k, m)
        Em = E.levels[m]
        lower = levels.get(m - 1)
        asg = {}
        full = _full_subset(m)
        if m > 0:
            for pid, (x, a) in sorted(decomp.items()):
                if a == full:
                    continue
                present = sorted(int(ch) for ch in a)
                vals = []
                for r in range(m + 1):
                    if r in present:
                        continue
                    a_low = "".join(str(v if v < r else v - 1) for v in present)
                    vals.append(E.coface(m - 1, r, lower[pair_id(x, a_low)]))
                if any(v != vals[0] for v in vals[1:]):
                    return None
                asg[pid] = vals[0]
        free = sorted((pid for pid, (x, a) in decomp.items() if a == full),
                      key=lambda pid: (P.dim_of(pid), pid))
        for pid in free:
            d = P.dim_of(pid)
            if d == 0:
                if (m, pid) not in slots:
                    return None
                asg[pid] = slots[(m, pid)]
                continue
            at = atom(P, pid)
            try:
                s = evaluate(P, asg, source(P, at, d - 1), Em)
                t = evaluate(P, asg, target(P, at, d - 1), Em)
            except DomainError:
                return None
            if (m, pid) in slots:
                v = slots[(m, pid)]
                if Em.cell_dim(v) > d or Em.src(v, d - 1) != s or Em.tgt(v, d - 1) != t:
                    return None
                asg[pid] = v
            else:
                if s != t:
                    return None
                asg[pid] = s
        if m >= 1 and not _codegen_natural(E, k, m, asg, lower):
            return None
        levels[m] = asg
    return Family(k, levels)


def _p(x, a):
    return pair_id(x, a)


def family_of_desc1_object(E, F, f):
    return _family_from_slots(E, 0, 1, {(0, _p("0", "0")): F,
                                        (1, _p("0", "01")): f})


def family_of_desc1_morphism(E, F, f, G, g, u):
    return _family_from_slots(E, 1, 1, {
        (0, _p("(-,0)", "0")): F, (0, _p("(+,0)", "0")): G, (0, _p("1", "0")): u,
        (1, _p("(-,0)", "01")): f, (1, _p("(+,0)", "01")): g})


def family_of_desc2_object(E, F, f, phi):
    return _family_from_slots(E, 0, 2, {(0, _p("0", "0")): F,
                                        (1, _p("0", "01")): f,
                                        (2, _p("0", "012")): phi})


def family_of_desc2_morphism(E, o1_data, o2_data, u, v):
    F, f, phi = o1_data
    G, g, psi = o2_data
    return _family_from_slots(E, 1, 2, {
        (0, _p("(-,0)", "0")): F, (0, _p("(+,0)", "0")): G, (0, _p("1", "0")): u,
        (1, _p("(-,0)", "01")): f, (1, _p("(+,0)", "01")): g,
        (1, _p("1", "01")): v,
        (2, _p("(-,0)", "012")): phi, (2, _p("(+,0)", "012")): psi})


def family_of_desc2_two_cell(E, o1_data, o2_data, m1_data, m2_data, alpha):
    F, f, phi = o1_data
    G, g, psi = o2_data
    u, v = m1_data
    u2, v2 = m2_data
    return _family_from_slots(E, 2, 2, {
        (0, _p("(-,0)", "0")): F, (0, _p("(+,0)", "0")): G,
        (0, _p("(-,1)", "0")): u, (0, _p("(+,1)", "0")): u2,
        (0, _p("2", "0")): alpha,
        (1, _p("(-,0)", "01")): f, (1, _p("(+,0)", "01")): g,
        (1, _p("(-,1)", "01")): v, (1, _p("(+,1)", "01")): v2,
        (2, _p("(-,0)", "012")): phi, (2, _p("(+,0)", "012")): psi})


def general_matches_desc1(E) -> dict:
    """Compare desc_general(E, 1) against desc1(E) through the canonical
    map; reports the explicit bijection or the first discrepancy."""
    cat1, objects, morphisms = desc1_with_data(E)
    R = desc_general(E, 1)
    fam_of = {}
    for oid, F, f in objects:
        fam = family_of_desc1_object(E, F, f)
        if fam is None:
            return {"ok": False, "reason": f"no family for object {oid}"}
        fam_of[oid] = fam.id
    obj_data = {oid: (F, f) for oid, F, f in objects}
    for (o1, o2, u), mid in morphisms.items():
        fam = family_of_desc1_morphism(
            E, obj_data[o1][0], obj_data[o1][1],
            obj_data[o2][0], obj_data[o2][1], u)
        if fam is None:
            return {"ok": False, "reason": f"no family for morphism {mid}"}
        fam_of[mid] = fam.id
    return _compare_through(cat1, R, fam_of, levels=(0, 1))


def general_matches_desc2(E) -> dict:
    """Compare desc_general(E, 2) against desc2(E) through the canonical
    map."""
    cat2, objects, morphisms, two_cells = desc2_with_data(E)
    R = desc_general(E, 2)
    fam_of = {}
    obj_data = {oid: (F, f, phi) for oid, F, f, phi in objects}
    for oid, F, f, phi in objects:
        fam = family_of_desc2_object(E, F, f, phi)
        if fam is None:
            return {"ok": False, "reason": f"no family for object {oid}"}
        fam_of[oid] = fam.id
    mor_data = {}
    for (o1, o2, u, v), mid in morphisms.items():
        fam = family_of_desc2_morphism(E, obj_data[o1], obj_data[o2], u, v)
        if fam is None:
            return {"ok": False, "reason": f"no family for morphism {mid}"}
        fam_of[mid] = fam.id
        mor_data[mid] = (o1, o2, u, v)
    for (m1, m2, alpha), cid in two_cells.items():
        if m1 in mor_data:
            o1, o2, u, v = mor_data[m1]
            m1d = (u, v)
        else:  # identity morphism: mid is the object id
            o1 = o2 = m1
            F, f, _ = obj_data[m1]
            m1d = (F, f)
        if m2 in mor_data:
            m2d = mor_data[m2][2:]
        else:
            F, f, _ = obj_data[m2]
            m2d = (F, f)
        fam = family_of_desc2_two_cell(
            E, obj_data[o1], obj_data[o2], m1d, m2d, alpha)
        if fam is None:
            return {"ok": False, "reason": f"no family for 2-cell {cid}"}
        fam_of[cid] = fam.id
    return _compare_through(cat2, R, fam_of, levels=(0, 1, 2))


def _compare_through(cat, R, fam_of, levels) -> dict:
    """Shared tail of the agreement checks: the map must be a
    dimension-preserving bijection commuting with boundaries and all
    compositions."""
    for d in levels:
        ours = sorted(fam_of[c] for c in cat.cells_of_dim(d))
        theirs = sorted(c for c in R.cells() if R.dims[c] == d)
        if len(set(ours)) != len(ours):
            return {"ok": False, "reason": f"map not injective at dim {d}"}
        if ours != theirs:
            return {"ok": False,
                    "reason": f"cell sets differ at dim {d}: "
                              f"{len(ours)} vs {len(theirs)}"}
    for c in cat.cells():
        for k in range(cat.cell_dim(c)):
            if fam_of[cat.src(c, k)] != R.src[(fam_of[c], k)]:
                return {"ok": False, "reason": f"src mismatch on {c} at {k}"}
            if fam_of[cat.tgt(c, k)] != R.tgt[(fam_of[c], k)]:
                return {"ok": False, "reason": f"tgt mismatch on {c} at {k}"}
    for (k, a, b), r in cat._comp.items():
        try:
            got = R.cat.comp(k, fam_of[a], fam_of[b])
        except StructureError as exc:
            return {"ok": False,
                    "reason": f"general side lacks composite of {a}, {b}: {exc}"}
        if got != fam_of[r]:
            return {"ok": False, "reason": f"composition mismatch on {a}, {b}"}
    counts = {d: len(cat.cells_of_dim(d)) for d in levels}
    return {"ok": True, "counts": counts}
