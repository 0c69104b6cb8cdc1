"""Canonical parity complexes and the product, join and cone constructions.

Id conventions (chosen so repeated builds are byte-identical):

  point       single vertex "0"
  interval    vertices "0", "1", edge "e"
  simplex(n)  dimension-k elements are the (k+1)-element subsets of
              {0..n}, written as their digits in increasing order
  glob(n)     "(-,m)" / "(+,m)" below the top, top element "n"
  product     pairs "(x|a)"
  join        mixed elements "(x*a)"; the two copies keep their ids,
              prefixed "L:"/"R:" only when they would collide
"""

from __future__ import annotations

from itertools import combinations

from .core import DomainError, Element, ParityComplex


def point() -> ParityComplex:
    return ParityComplex(0, [Element("0", 0)])


def simplex(n: int) -> ParityComplex:
    """Subsets of {0..n}; deleting an even position gives a plus face,
    an odd position a minus face (positions counted in increasing order)."""
    if n < 0:
        raise DomainError("simplex dimension must be >= 0")
    if n > 9:
        raise DomainError("subset ids use single digits; n <= 9 only")
    verts = range(n + 1)
    elements = []
    for k in range(n + 1):
        for subset in combinations(verts, k + 1):
            sid = "".join(str(v) for v in subset)
            minus, plus = set(), set()
            if k > 0:
                for pos in range(len(subset)):
                    face = subset[:pos] + subset[pos + 1:]
                    fid = "".join(str(v) for v in face)
                    (plus if pos % 2 == 0 else minus).add(fid)
            elements.append(Element(sid, k, frozenset(minus), frozenset(plus)))
    return ParityComplex(n, elements)


def glob(n: int) -> ParityComplex:
    """The free-standing n-cell: one top element, a minus/plus pair in
    every lower dimension, all faces pointing at the pair below."""
    if n < 0:
        raise DomainError("glob dimension must be >= 0")
    if n == 0:
        return point()

    def pair(m):
        return (f"(-,{m})", f"(+,{m})")

    elements = []
    for m in range(n):
        for eps in ("-", "+"):
            xid = f"({eps},{m})"
            if m == 0:
                elements.append(Element(xid, 0))
            else:
                lo = pair(m - 1)
                elements.append(Element(xid, m, frozenset([lo[0]]), frozenset([lo[1]])))
    lo = pair(n - 1)
    elements.append(Element(str(n), n, frozenset([lo[0]]), frozenset([lo[1]])))
    return ParityComplex(n, elements)


def pair_id(x: str, a: str) -> str:
    return f"({x}|{a})"


def product(C: ParityComplex, D: ParityComplex) -> ParityComplex:
    """Pairs (x|a) in dimension dim x + dim a.

    Faces: the sign acts directly on the first coordinate, and on the
    second coordinate with the sign flipped when dim x is odd.
    """
    elements = []
    for x in C.ids():
        p = C.dim_of(x)
        for a in D.ids():
            q = D.dim_of(a)
            minus, plus = set(), set()
            for sign, bucket in (("-", minus), ("+", plus)):
                if p > 0:
                    bucket |= {pair_id(y, a) for y in C.faces(x, sign)}
                if q > 0:
                    eff = sign if p % 2 == 0 else ("+" if sign == "-" else "-")
                    bucket |= {pair_id(x, b) for b in D.faces(a, eff)}
            elements.append(Element(pair_id(x, a), p + q, frozenset(minus), frozenset(plus)))
    return ParityComplex(C.dim + D.dim, elements)


def join(C: ParityComplex, D: ParityComplex) -> ParityComplex:
    """Disjoint copies of C and D plus mixed elements (x*a) of dimension
    dim x + dim a + 1.

    For dim x odd the mixed faces are (minus x)*a | x*(minus a) on the
    minus side and dually; for dim x even the roles of a's faces swap.
    The degenerate boundary terms are: when dim x = 0 the a-side copy
    {a} counts as a plus... specifically x-side faces of a dim-0 x are
    (empty, {copy of a}) and a-side faces of a dim-0 a are (empty,
    {copy of x}); this is the unique convention for which the join of
    two points is an oriented edge.
    """
    collide = {x for x in C.ids() if x in set(D.ids())}

    def left(x):
        return f"L:{x}" if x in collide else x

    def right(a):
        return f"R:{a}" if a in collide else a

    def mixed(x, a):
        return f"({x}*{a})"

    elements = []
    for x in C.ids():
        el = C.element(x)
        elements.append(Element(
            left(x), el.dim,
            frozenset(left(y) for y in el.minus),
            frozenset(left(y) for y in el.plus)))
    for a in D.ids():
        el = D.element(a)
        elements.append(Element(
            right(a), el.dim,
            frozenset(right(b) for b in el.minus),
            frozenset(right(b) for b in el.plus)))
    for x in C.ids():
        p = C.dim_of(x)
        for a in D.ids():
            q = D.dim_of(a)
            if p == 0:
                x_minus, x_plus = frozenset(), frozenset([right(a)])
            else:
                x_minus = frozenset(mixed(y, a) for y in C.minus(x))
                x_plus = frozenset(mixed(y, a) for y in C.plus(x))
            if q == 0:
                a_minus, a_plus = frozenset(), frozenset([left(x)])
            else:
                a_minus = frozenset(mixed(x, b) for b in D.minus(a))
                a_plus = frozenset(mixed(x, b) for b in D.plus(a))
            if p % 2 == 1:
                minus, plus = x_minus | a_minus, x_plus | a_plus
            else:
                minus, plus = x_minus | a_plus, x_plus | a_minus
            elements.append(Element(mixed(x, a), p + q + 1, minus, plus))
    return ParityComplex(max(C.dim, D.dim, C.dim + D.dim + 1), elements)


def right_cone(C: ParityComplex) -> ParityComplex:
    return join(C, point())


def left_cone(C: ParityComplex) -> ParityComplex:
    return join(point(), C)


def interval() -> ParityComplex:
    """join(point, point) with ids normalized to "0", "1", "e"."""
    return ParityComplex(1, [
        Element("0", 0),
        Element("1", 0),
        Element("e", 1, frozenset(["0"]), frozenset(["1"])),
    ])


def cube(n: int) -> ParityComplex:
    """n-fold product of intervals (the empty product being the point)."""
    if n < 0:
        raise DomainError("cube dimension must be >= 0")
    if n == 0:
        return point()
    out = interval()
    for _ in range(n - 1):
        out = product(out, interval())
    return out


# -- isomorphism search -------------------------------------------------------


def _signature(C: ParityComplex):
    """Iterated structural invariant per element, for pruning."""
    sig = {x: (C.dim_of(x), len(C.minus(x)), len(C.plus(x))) for x in C.ids()}
    for _ in range(len(C.ids())):
        nxt = {}
        for x in C.ids():
            nxt[x] = (sig[x],
                      tuple(sorted(sig[y] for y in C.minus(x))),
                      tuple(sorted(sig[y] for y in C.plus(x))))
        if nxt == sig:
            break
        sig = nxt
    return sig


def iso_map(C: ParityComplex, D: ParityComplex):
    """A dim/minus/plus preserving bijection C -> D, or None.

    Exhaustive backtracking with signature pruning; intended for the
    small complexes used in tests and the CLI.
    """
    if len(C.ids()) != len(D.ids()):
        return None
    sigC, sigD = _signature(C), _signature(D)
    if sorted(sigC.values()) != sorted(sigD.values()):
        return None
    xs = sorted(C.ids(), key=lambda x: (C.dim_of(x), x))
    candidates = {x: sorted(d for d in D.ids() if sigD[d] == sigC[x]) for x in xs}

    assign: dict[str, str] = {}
    used: set[str] = set()

    def consistent(x, d):
        elx, eld = C.element(x), D.element(d)
        for y in elx.minus:
            if y in assign and assign[y] not in eld.minus:
                return False
        for y in elx.plus:
            if y in assign and assign[y] not in eld.plus:
                return False
        # faces already assigned must be matched by faces of d
        mapped_minus = {assign[y] for y in elx.minus if y in assign}
        mapped_plus = {assign[y] for y in elx.plus if y in assign}
        return mapped_minus <= eld.minus and mapped_plus <= eld.plus

    def rec(i):
        if i == len(xs):
            return True
        x = xs[i]
        for d in candidates[x]:
            if d in used or not consistent(x, d):
                continue
            assign[x] = d
            used.add(d)
            if rec(i + 1):
                return True
            del assign[x]
            used.remove(d)
        return False

    if rec(0):
        # faces map exactly, both ways, by cardinality
        return dict(assign)
    return None


def is_isomorphic(C: ParityComplex, D: ParityComplex) -> bool:
    return iso_map(C, D) is not None
