"""Cells of the free omega-category on a parity complex.

A cell is a pair (M, P) of nonempty finite subsets of the complex,
subject to two conditions:

  (i)  M and P each contain at most one vertex, and two distinct
       same-dimensional members of M (or of P) never share a minus
       face or a plus face;
  (ii) the four exchange equations
         P = (M | M.plus) & ~M.minus      M = (P | M.minus) & ~M.plus
         P = (M | P.plus) & ~P.minus      M = (P | P.minus) & ~P.plus
       hold, with ~S the complement in the whole complex.

Boundaries, composition and the per-generator atoms come from short
set-algebra formulas; `excise` inverts them, decomposing any cell into
a binary composition tree over atoms.  Everything downstream (pasting
evaluation, nerves, descent) replays such trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product as iproduct

from .core import DomainError, ParityComplex, StructureError


class ComposabilityError(Exception):
    """k-composition attempted on cells whose boundaries do not meet."""

    def __init__(self, k, left_target, right_source):
        self.k = k
        self.left_target = left_target
        self.right_source = right_source
        super().__init__(
            f"not {k}-composable: target {left_target} != source {right_source}")


class CapacityError(Exception):
    """Cell enumeration exceeded its cap."""


class ExcisionError(Exception):
    """No valid decomposition order; the complex is not loop-free enough."""


@dataclass(frozen=True)
class FreeCell:
    M: frozenset
    P: frozenset

    def __iter__(self):
        yield self.M
        yield self.P


def _resolve(C: ParityComplex, S):
    for x in S:
        C.element(x)


def _slices(C: ParityComplex, S) -> dict:
    out: dict[int, set] = {}
    for x in S:
        out.setdefault(C.dim_of(x), set()).add(x)
    return out


def _below(C: ParityComplex, S, k) -> frozenset:
    """Members of S of dimension <= k."""
    return frozenset(x for x in S if C.dim_of(x) <= k)


def _at(C: ParityComplex, S, k) -> frozenset:
    return frozenset(x for x in S if C.dim_of(x) == k)


def _fset(C: ParityComplex, S, sign) -> frozenset:
    out = set()
    for x in S:
        if C.dim_of(x) > 0:
            out |= C.faces(x, sign)
    return frozenset(out)


def cell_key(C: ParityComplex, cell: FreeCell) -> str:
    """Canonical printable form, slices sorted; doubles as a stable id."""
    def side(S):
        sl = _slices(C, S)
        return ";".join(f"{k}:" + ",".join(sorted(sl[k])) for k in sorted(sl))
    return f"M[{side(cell.M)}]P[{side(cell.P)}]"


def cell_to_dict(C: ParityComplex, cell: FreeCell) -> dict:
    def side(S):
        sl = _slices(C, S)
        return {str(k): sorted(sl[k]) for k in sorted(sl)}
    return {"M": side(cell.M), "P": side(cell.P)}


def cell_from_dict(data: dict) -> FreeCell:
    try:
        M = frozenset(x for ids in data["M"].values() for x in ids)
        P = frozenset(x for ids in data["P"].values() for x in ids)
    except (KeyError, TypeError, AttributeError) as exc:
        raise StructureError(f"malformed cell data: {exc}") from exc
    return FreeCell(M, P)


# -- the cell conditions ------------------------------------------------------


def cell_violations(C: ParityComplex, M, P) -> list:
    """Empty list iff (M, P) is a cell; otherwise human-readable reasons."""
    M, P = frozenset(M), frozenset(P)
    _resolve(C, M | P)
    reasons = []
    if not M or not P:
        reasons.append("M and P must be nonempty")
        return reasons
    for name, S in (("M", M), ("P", P)):
        if len(_at(C, S, 0)) > 1:
            reasons.append(f"{name} contains more than one vertex")
        sl = _slices(C, S)
        for k, members in sl.items():
            if k == 0:
                continue
            for x, y in combinations(sorted(members), 2):
                if (C.minus(x) & C.minus(y)) or (C.plus(x) & C.plus(y)):
                    reasons.append(f"{name}: {x} and {y} share a face on the same side")
    universe = frozenset(C.ids())
    Mm, Mp = _fset(C, M, "-"), _fset(C, M, "+")
    Pm, Pp = _fset(C, P, "-"), _fset(C, P, "+")
    eqs = (
        ("P = (M|M+) & ~M-", P, (M | Mp) & (universe - Mm)),
        ("M = (P|M-) & ~M+", M, (P | Mm) & (universe - Mp)),
        ("P = (M|P+) & ~P-", P, (M | Pp) & (universe - Pm)),
        ("M = (P|P-) & ~P+", M, (P | Pm) & (universe - Pp)),
    )
    for label, lhs, rhs in eqs:
        if lhs != rhs:
            reasons.append(f"exchange equation fails: {label}")
    top = max(C.dim_of(x) for x in M | P)
    if _at(C, M, top) != _at(C, P, top):
        reasons.append("top-dimensional slices of M and P differ")
    return reasons


def is_cell(C: ParityComplex, M, P) -> bool:
    return not cell_violations(C, M, P)


def _universe(C: ParityComplex) -> frozenset:
    if "universe" not in C._cache:
        C._cache["universe"] = frozenset(C.ids())
    return C._cache["universe"]


def _cell_ok(C: ParityComplex, M, P) -> bool:
    """Fast boolean version of the cell conditions, early-exit ordered."""
    if not M or not P:
        return False
    top = max(C.dim_of(x) for x in M | P)
    if _at(C, M, top) != _at(C, P, top):
        return False
    Mm, Mp = _fset(C, M, "-"), _fset(C, M, "+")
    universe = _universe(C)
    if P != (M | Mp) & (universe - Mm):
        return False
    if M != (P | Mm) & (universe - Mp):
        return False
    Pm, Pp = _fset(C, P, "-"), _fset(C, P, "+")
    if P != (M | Pp) & (universe - Pm):
        return False
    if M != (P | Pm) & (universe - Pp):
        return False
    for S in (M, P):
        if len(_at(C, S, 0)) > 1:
            return False
        sl = _slices(C, S)
        for k, members in sl.items():
            if k == 0 or len(members) == 1:
                continue
            for x, y in combinations(sorted(members), 2):
                if (C.minus(x) & C.minus(y)) or (C.plus(x) & C.plus(y)):
                    return False
    return True


# -- boundaries and composition ----------------------------------------------


def source(C: ParityComplex, cell: FreeCell, k: int) -> FreeCell:
    M, P = cell
    return FreeCell(_below(C, M, k), _at(C, M, k) | _below(C, P, k - 1))


def target(C: ParityComplex, cell: FreeCell, k: int) -> FreeCell:
    M, P = cell
    return FreeCell(_below(C, M, k - 1) | _at(C, P, k), _below(C, P, k))


def cell_dim(C: ParityComplex, cell: FreeCell) -> int:
    """Least k whose k-source is the cell itself."""
    for k in range(0, max(C.dim_of(x) for x in cell.M | cell.P) + 1):
        if source(C, cell, k) == cell:
            return k
    return max(C.dim_of(x) for x in cell.M | cell.P)


def compose(C: ParityComplex, a: FreeCell, b: FreeCell, k: int) -> FreeCell:
    """k-composite a then b; requires the k-target of a to equal the
    k-source of b."""
    ta, sb = target(C, a, k), source(C, b, k)
    if ta != sb:
        raise ComposabilityError(k, ta, sb)
    M = a.M | (b.M - _at(C, b.M, k))
    P = (a.P - _at(C, a.P, k)) | b.P
    return FreeCell(frozenset(M), frozenset(P))


# -- atoms ---------------------------------------------------------------------


def atom(C: ParityComplex, x: str) -> FreeCell:
    """The cell generated by a single element.

    Downward recursion from the top slice {x}: the next minus slice is
    the minus faces not cancelled by plus faces, and dually.
    """
    cache = C._cache.setdefault("atoms", {})
    if x in cache:
        return cache[x]
    k = C.dim_of(x)
    M_sl = {k: frozenset([x])}
    P_sl = {k: frozenset([x])}
    for r in range(k, 0, -1):
        M_sl[r - 1] = _fset(C, M_sl[r], "-") - _fset(C, M_sl[r], "+")
        P_sl[r - 1] = _fset(C, P_sl[r], "+") - _fset(C, P_sl[r], "-")
    cell = FreeCell(
        frozenset().union(*M_sl.values()),
        frozenset().union(*P_sl.values()))
    cache[x] = cell
    return cell


def product_atom(C: ParityComplex, D: ParityComplex, x: str, a: str) -> FreeCell:
    """Atom of the pair (x|a) in product(C, D), by the closed formula:
    the n-slice of a side is the union over r+s=n of slice r of x's side
    paired with slice s of a's side, where a's side flips for odd r.
    """
    from .build import pair_id

    mx, px = _slices(C, atom(C, x).M), _slices(C, atom(C, x).P)
    ma, pa = _slices(D, atom(D, a).M), _slices(D, atom(D, a).P)

    def formula(first, other_same, other_flip):
        out = set()
        for r, xs in first.items():
            second = other_same if r % 2 == 0 else other_flip
            for s, as_ in second.items():
                out |= {pair_id(y, b) for y in xs for b in as_}
        return frozenset(out)

    return FreeCell(formula(mx, ma, pa), formula(px, pa, ma))


# -- enumeration ----------------------------------------------------------------


def enumerate_cells(C: ParityComplex, dim_bound=None, cap: int = 100000):
    """All cells of the free category up to dim_bound: the closure of the
    atoms under boundaries and every defined composition.

    Deterministic: output sorted by (dim, key).  Raises CapacityError
    beyond `cap` cells.
    """
    if dim_bound is None:
        dim_bound = C.max_dim()
    cells: dict[FreeCell, int] = {}

    def add(cell):
        if cell not in cells:
            if len(cells) >= cap:
                raise CapacityError(f"more than {cap} cells")
            cells[cell] = cell_dim(C, cell)
            return True
        return False

    for x in C.ids():
        if C.dim_of(x) <= dim_bound:
            add(atom(C, x))
    changed = True
    while changed:
        changed = False
        current = sorted(cells, key=lambda c: (cells[c], cell_key(C, c)))
        for c in current:
            for k in range(cells[c]):
                if add(source(C, c, k)):
                    changed = True
                if add(target(C, c, k)):
                    changed = True
        current = sorted(cells, key=lambda c: (cells[c], cell_key(C, c)))
        for a in current:
            for b in current:
                top = min(cells[a], cells[b])
                for k in range(top):
                    if target(C, a, k) == source(C, b, k):
                        if add(compose(C, a, b, k)):
                            changed = True
    return sorted(cells, key=lambda c: (cells[c], cell_key(C, c)))


def subset_search_cells(C: ParityComplex, dim_bound=None):
    """Independent oracle: scan all (M, P) subset pairs for cells.

    Exponential; only usable on complexes with a handful of elements.
    """
    if dim_bound is None:
        dim_bound = C.max_dim()
    ids = [x for x in C.ids() if C.dim_of(x) <= dim_bound]
    found = []
    subsets = []
    for r in range(1, len(ids) + 1):
        subsets.extend(frozenset(s) for s in combinations(ids, r))
    for M in subsets:
        for P in subsets:
            if is_cell(C, M, P):
                found.append(FreeCell(M, P))
    return sorted(found, key=lambda c: (cell_dim(C, c), cell_key(C, c)))


# -- excision: decomposing cells into atoms ------------------------------------


@dataclass(frozen=True)
class Plan:
    """Binary composition tree; leaves name generators."""

    kind: str  # "atom" | "comp"
    x: str = ""
    k: int = -1
    left: "Plan" = None
    right: "Plan" = None

    def leaves(self):
        if self.kind == "atom":
            yield self.x
        else:
            yield from self.left.leaves()
            yield from self.right.leaves()

    def __str__(self):
        if self.kind == "atom":
            return f"<{self.x}>"
        return f"({self.left} o{self.k} {self.right})"


def plan_atom(x: str) -> Plan:
    return Plan("atom", x=x)


def plan_comp(k: int, left: Plan, right: Plan) -> Plan:
    return Plan("comp", k=k, left=left, right=right)


def replay(C: ParityComplex, plan: Plan) -> FreeCell:
    if plan.kind == "atom":
        return atom(C, plan.x)
    return compose(C, replay(C, plan.left), replay(C, plan.right), plan.k)


def _complete_from_M(C, M):
    universe = frozenset(C.ids())
    return (M | _fset(C, M, "+")) & (universe - _fset(C, M, "-"))


def _complete_from_P(C, P):
    universe = frozenset(C.ids())
    return (P | _fset(C, P, "-")) & (universe - _fset(C, P, "+"))


def _tops_in_order(C, members):
    """Top-dimensional slice sorted along the solid triangle order."""
    from .core import triangle_order
    order = triangle_order(C)
    pos = {x: i for i, x in enumerate(order.topo_order())}
    return sorted(members, key=lambda x: (pos[x], x))


def _peel_splits(C, cell, d):
    """Splits of a multi-top cell into (single-top whisker) o_{d-1} (rest)
    peeled off the source side, and (rest) o_{d-1} (single-top whisker)
    peeled off the target side: one candidate per admissible extreme
    top element."""
    tops = _tops_in_order(C, _at(C, cell.M, d))
    for x in tops:
        got = _try_pre_split(C, cell, d - 1, frozenset({x}))
        if got:
            yield got
    for x in reversed(tops):
        got = _try_post_split(C, cell, d - 1, frozenset({x}))
        if got:
            yield got[1], got[0]


_SPLIT_COMBO_CAP = 4096


def _topo_pos(C):
    from .core import triangle_order
    if "topo_pos" not in C._cache:
        order = triangle_order(C)
        C._cache["topo_pos"] = {x: i for i, x in enumerate(order.topo_order())}
    return C._cache["topo_pos"]


def _prefix_chunks(C, S, j, d, from_end):
    """Chunks taking an order-compatible prefix (or suffix) of every
    slice above level j; polynomially many, smallest first.  These are
    the shapes valid splits of pastings actually take."""
    pos = _topo_pos(C)
    layers = []
    for r in range(j + 1, d + 1):
        layer = sorted(_at(C, S, r), key=lambda x: (pos[x], x))
        if from_end:
            layer = layer[::-1]
        layers.append(layer)
    picks = [range(len(layer) + 1) for layer in layers]
    combos = []
    for counts in iproduct(*picks):
        T = frozenset(x for layer, cnt in zip(layers, counts)
                      for x in layer[:cnt])
        if T:
            combos.append(T)
    combos.sort(key=lambda T: (len(T), tuple(sorted(T))))
    return combos


def _all_chunks(C, S, j, d):
    """Every nonempty union of per-slice subsets above level j, smallest
    first; falls back to the (j+1)-slice alone when too many."""
    layers = [sorted(_at(C, S, r)) for r in range(j + 1, d + 1)]
    total = 1
    for layer in layers:
        total *= 2 ** len(layer)
    if total > _SPLIT_COMBO_CAP:
        layers = layers[:1]
    per_layer = []
    for layer in layers:
        subs = [()]
        for size in range(1, len(layer) + 1):
            subs.extend(combinations(layer, size))
        per_layer.append(subs)
    combos = set()
    for pick in iproduct(*per_layer):
        T = frozenset(x for part in pick for x in part)
        if T:
            combos.add(T)
    return sorted(combos, key=lambda T: (len(T), tuple(sorted(T))))


def _try_pre_split(C, cell, j, T):
    Mu = _below(C, cell.M, j) | T
    Pu = _complete_from_M(C, Mu)
    if not _cell_ok(C, Mu, Pu):
        return None
    u = FreeCell(Mu, Pu)
    t = target(C, u, j)
    Mm = t.M | (cell.M - _below(C, cell.M, j) - T)
    Pm = _complete_from_M(C, Mm)
    if not _cell_ok(C, Mm, Pm):
        return None
    m = FreeCell(Mm, Pm)
    try:
        if compose(C, u, m, j) == cell:
            return u, m
    except ComposabilityError:
        pass
    return None


def _try_post_split(C, cell, j, T):
    Pu = _below(C, cell.P, j) | T
    Mu = _complete_from_P(C, Pu)
    if not _cell_ok(C, Mu, Pu):
        return None
    u = FreeCell(Mu, Pu)
    s = source(C, u, j)
    Pm = s.P | (cell.P - _below(C, cell.P, j) - T)
    Mm = _complete_from_P(C, Pm)
    if not _cell_ok(C, Mm, Pm):
        return None
    m = FreeCell(Mm, Pm)
    try:
        if compose(C, m, u, j) == cell:
            return u, m
    except ComposabilityError:
        pass
    return None


def _context_splits(C, cell, d, exhaustive):
    """Splits of a cell as u o_j rest (u sharing the cell's j-source) or
    rest o_j u (u sharing its j-target), for each j < d-1.  The prefix
    tier tries order-compatible chunks only; the exhaustive tier scans
    all per-slice subsets."""
    seen = set()
    tiers = ["prefix"] + (["all"] if exhaustive else [])
    for tier in tiers:
        for j in range(d - 1):
            if tier == "prefix":
                pre_chunks = _prefix_chunks(C, cell.M, j, d, from_end=False)
                post_chunks = _prefix_chunks(C, cell.P, j, d, from_end=True)
            else:
                pre_chunks = _all_chunks(C, cell.M, j, d)
                post_chunks = _all_chunks(C, cell.P, j, d)
            for T in pre_chunks:
                if ("pre", j, T) in seen:
                    continue
                seen.add(("pre", j, T))
                got = _try_pre_split(C, cell, j, T)
                if got:
                    yield j, got[0], got[1], "pre"
            for T in post_chunks:
                if ("post", j, T) in seen:
                    continue
                seen.add(("post", j, T))
                got = _try_post_split(C, cell, j, T)
                if got:
                    yield j, got[0], got[1], "post"


def _plans(C, cell, seen):
    """All decomposition plans of a cell, depth-first, deterministic order."""
    d = cell_dim(C, cell)
    if d == 0:
        (v,) = cell.M
        yield plan_atom(v)
        return
    tops = _at(C, cell.M, d)
    if len(tops) == 1:
        (x,) = tops
        if atom(C, x) == cell:
            yield plan_atom(x)
            return
    if cell in seen:
        return
    seen = seen | {cell}
    emitted = set()
    if len(tops) > 1:
        for w, r in _peel_splits(C, cell, d):
            for pw in _plans(C, w, seen):
                for pr in _plans(C, r, seen):
                    plan = plan_comp(d - 1, pw, pr)
                    if plan not in emitted:
                        emitted.add(plan)
                        yield plan
    for j, u, m, side in _context_splits(C, cell, d, exhaustive=True):
        for pu in _plans(C, u, seen):
            for pm in _plans(C, m, seen):
                if side == "pre":
                    plan = plan_comp(j, pu, pm)
                else:
                    plan = plan_comp(j, pm, pu)
                if plan not in emitted:
                    emitted.add(plan)
                    yield plan


def _first_plan(C, cell, stack):
    """One decomposition plan, memoized per complex so that every cell
    is decomposed at most once; prefix-tier splits are tried first and
    the exhaustive tier only as a fallback."""
    cache = C._cache.setdefault("plans", {})
    if cell in cache:
        return cache[cell]
    d = cell_dim(C, cell)
    if d == 0:
        (v,) = cell.M
        plan = plan_atom(v)
        cache[cell] = plan
        return plan
    tops = _at(C, cell.M, d)
    if len(tops) == 1:
        (x,) = tops
        if atom(C, x) == cell:
            plan = plan_atom(x)
            cache[cell] = plan
            return plan
    if cell in stack:
        return None
    stack = stack | {cell}
    if len(tops) > 1:
        for w, r in _peel_splits(C, cell, d):
            pw = _first_plan(C, w, stack)
            if pw is None:
                continue
            pr = _first_plan(C, r, stack)
            if pr is None:
                continue
            plan = plan_comp(d - 1, pw, pr)
            cache[cell] = plan
            return plan
    for exhaustive in (False, True):
        for j, u, m, side in _context_splits(C, cell, d, exhaustive=exhaustive):
            pu = _first_plan(C, u, stack)
            if pu is None:
                continue
            pm = _first_plan(C, m, stack)
            if pm is None:
                continue
            plan = (plan_comp(j, pu, pm) if side == "pre"
                    else plan_comp(j, pm, pu))
            cache[cell] = plan
            return plan
    return None


def excise_plans(C: ParityComplex, cell: FreeCell, limit=None):
    """Iterate decomposition plans whose replay equals the cell."""
    count = 0
    for plan in _plans(C, cell, frozenset()):
        yield plan
        count += 1
        if limit is not None and count >= limit:
            return


def excise(C: ParityComplex, cell: FreeCell) -> Plan:
    """The canonical decomposition plan; cached per complex."""
    cache = C._cache.setdefault("plans", {})
    if cell in cache:
        return cache[cell]
    reasons = cell_violations(C, cell.M, cell.P)
    if reasons:
        raise DomainError("not a cell: " + "; ".join(reasons))
    plan = _first_plan(C, cell, frozenset())
    if plan is None:
        raise ExcisionError(
            f"no valid excision order for {cell_key(C, cell)}; "
            "complex is not loop-free enough")
    return plan
