"""Parity complexes: graded sets with negative/positive face operators.

A parity complex of dimension n is a graded finite set C = C_0 + ... + C_n
together with, for each element x of positive dimension, two disjoint
nonempty sets x.minus and x.plus of faces one dimension down.  Everything
else in this package (free cells, pasting, nerves, descent) is built on
top of this structure.

The validator enforces exactly five laws:

  (a) every face of a k-element has dimension k - 1;
  (b) minus/plus are nonempty in positive dimension;
  (c) minus and plus are disjoint;
  (d) for dimension >= 2, faces-of-faces balance:
      minus(minus) | plus(plus) == minus(plus) | plus(minus);
  (e) the solid triangle order (below) is antisymmetric.

The solid triangle order is the smallest reflexive transitive relation
with x < y whenever x is a negative face of y or y is a positive face
of x.  Antisymmetry of this order is the loop-freeness condition that
makes pasting decompositions terminate; on simplexes, cubes and globs
the order is in fact linear.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class StructureError(Exception):
    """Raised when element ids do not resolve or data is malformed."""


class DomainError(ValueError):
    """Raised when an operation is applied outside its domain."""


@dataclass(frozen=True)
class Element:
    """One graded element with its two face sets (empty in dimension 0)."""

    id: str
    dim: int
    minus: frozenset = frozenset()
    plus: frozenset = frozenset()


def _sort_key(pair):
    return (pair[1], pair[0])


class ParityComplex:
    """A finite parity complex; immutable after construction.

    Construction is lenient: it only requires parseable data, so that
    broken inputs can be loaded and then *reported* on by ``validate``.
    Operations that need resolved faces raise ``StructureError`` when
    they meet a dangling id.
    """

    def __init__(self, dim: int, elements):
        self.dim = int(dim)
        self._elements: dict[str, Element] = {}
        for el in elements:
            if el.id in self._elements:
                raise StructureError(f"duplicate element id {el.id!r}")
            self._elements[el.id] = el
        order = sorted(((e.id, e.dim) for e in self._elements.values()), key=_sort_key)
        self._sorted_ids = tuple(i for i, _ in order)
        self._slices: dict[int, tuple] = {}
        for i, d in order:
            self._slices.setdefault(d, [])
            self._slices[d].append(i)
        self._slices = {d: tuple(v) for d, v in self._slices.items()}
        self._cache: dict = {}  # internal memo space (atoms, plans, orders)

    # -- basic queries ------------------------------------------------------

    def __contains__(self, x: str) -> bool:
        return x in self._elements

    def __len__(self) -> int:
        return len(self._elements)

    def element(self, x: str) -> Element:
        try:
            return self._elements[x]
        except KeyError:
            raise StructureError(f"unknown element id {x!r}") from None

    def ids(self) -> tuple:
        """All element ids, sorted by (dim, id)."""
        return self._sorted_ids

    def dim_of(self, x: str) -> int:
        return self.element(x).dim

    def minus(self, x: str) -> frozenset:
        return self.element(x).minus

    def plus(self, x: str) -> frozenset:
        return self.element(x).plus

    def faces(self, x: str, sign: str) -> frozenset:
        if sign == "-":
            return self.element(x).minus
        if sign == "+":
            return self.element(x).plus
        raise DomainError(f"sign must be '-' or '+', got {sign!r}")

    def grade(self, k: int) -> tuple:
        """Sorted ids of dimension k."""
        return self._slices.get(k, ())

    def max_dim(self) -> int:
        return max(self._slices) if self._slices else 0

    def face_set(self, S, sign: str) -> frozenset:
        """Union of the sign-faces over a set of element ids.

        Every member must have positive dimension.
        """
        out = set()
        for x in S:
            if self.dim_of(x) == 0:
                raise DomainError(f"element {x!r} has dimension 0, no faces")
            out |= self.faces(x, sign)
        return frozenset(out)


# -- validation --------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    elements: tuple
    detail: str
    structural: bool = False

    def __str__(self):
        tag = "structural" if self.structural else "axiom"
        return f"[{tag}:{self.kind}] {self.detail}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def structural(self) -> bool:
        return any(v.structural for v in self.violations)

    def kinds(self):
        return {v.kind for v in self.violations}

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


def validate(C: ParityComplex) -> ValidationReport:
    """Check the five parity laws; report every violation found.

    Structural problems (dangling face ids, faces on dimension-0
    elements, elements graded above the declared dimension) are reported
    first; if any are present the axiom checks are skipped since they
    would be meaningless.
    """
    report = ValidationReport()
    for x in C.ids():
        el = C.element(x)
        if el.dim < 0 or el.dim > C.dim:
            report.violations.append(Violation(
                "grading", (x,), f"element {x!r} has dim {el.dim} outside 0..{C.dim}",
                structural=True))
        if el.dim == 0 and (el.minus or el.plus):
            report.violations.append(Violation(
                "faces-on-vertex", (x,), f"dimension-0 element {x!r} carries faces",
                structural=True))
        for y in sorted(el.minus | el.plus):
            if y not in C:
                report.violations.append(Violation(
                    "unresolved", (x, y), f"face {y!r} of {x!r} does not resolve",
                    structural=True))
    if report.structural:
        return report

    for x in C.ids():
        el = C.element(x)
        if el.dim == 0:
            continue
        for y in sorted(el.minus | el.plus):
            if C.dim_of(y) != el.dim - 1:
                report.violations.append(Violation(
                    "face-grading", (x, y),
                    f"face {y!r} of {x!r} has dim {C.dim_of(y)}, expected {el.dim - 1}"))
        if not el.minus or not el.plus:
            report.violations.append(Violation(
                "empty-faces", (x,), f"element {x!r} has an empty face set"))
        both = el.minus & el.plus
        if both:
            report.violations.append(Violation(
                "overlap", (x,),
                f"minus and plus of {x!r} share {sorted(both)}"))
    for x in C.ids():
        el = C.element(x)
        if el.dim < 2:
            continue
        try:
            mm = C.face_set(el.minus, "-") | C.face_set(el.plus, "+")
            mixed = C.face_set(el.minus, "+") | C.face_set(el.plus, "-")
        except (StructureError, DomainError):
            continue  # already reported above
        if mm != mixed:
            report.violations.append(Violation(
                "face-balance", (x,),
                f"{x!r}: minus.minus|plus.plus != minus.plus|plus.minus "
                f"({sorted(mm)} vs {sorted(mixed)})"))

    order = triangle_order(C)
    if not order.is_antisymmetric:
        cyc = order.a_cycle()
        report.violations.append(Violation(
            "triangle-order", tuple(cyc),
            f"solid triangle order not antisymmetric, cycle through {cyc}"))
    return report


# -- the solid triangle order -------------------------------------------------


class TriangleOrder:
    """Reachability closure of the generating edges of the solid triangle
    order, together with its antisymmetry and linearity flags."""

    def __init__(self, nodes, edges):
        self.nodes = tuple(nodes)
        self.edges = frozenset(edges)
        succ = {x: set() for x in self.nodes}
        for a, b in self.edges:
            succ[a].add(b)
        # reachability by DFS per node; sizes here are desk scale
        reach = {}
        for x in self.nodes:
            seen = {x}
            stack = [x]
            while stack:
                cur = stack.pop()
                for nxt in succ[cur]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            reach[x] = frozenset(seen)
        self.reach = reach
        self.is_antisymmetric = all(
            not (y in reach[x] and x in reach[y])
            for i, x in enumerate(self.nodes)
            for y in self.nodes[i + 1:])
        self.is_linear = self.is_antisymmetric and all(
            y in reach[x] or x in reach[y]
            for i, x in enumerate(self.nodes)
            for y in self.nodes[i + 1:])

    def leq(self, x, y) -> bool:
        return y in self.reach[x]

    def a_cycle(self):
        """Some pair of distinct mutually reachable nodes, if any."""
        for i, x in enumerate(self.nodes):
            for y in self.nodes[i + 1:]:
                if self.leq(x, y) and self.leq(y, x):
                    return (x, y)
        return ()

    def reclose(self) -> "TriangleOrder":
        """Close the closure again; used to test idempotence."""
        closure_edges = {(x, y) for x in self.nodes for y in self.reach[x] if x != y}
        return TriangleOrder(self.nodes, closure_edges)

    def topo_order(self):
        """A linear extension compatible with the order (requires
        antisymmetry); ties broken by node id for determinism."""
        if not self.is_antisymmetric:
            raise DomainError("order has cycles, no linear extension")
        indeg = {x: 0 for x in self.nodes}
        succ = {x: set() for x in self.nodes}
        for a, b in self.edges:
            if a != b and b not in succ[a]:
                succ[a].add(b)
                indeg[b] += 1
        ready = sorted(x for x in self.nodes if indeg[x] == 0)
        out = []
        while ready:
            x = ready.pop(0)
            out.append(x)
            changed = False
            for y in succ[x]:
                indeg[y] -= 1
                if indeg[y] == 0:
                    ready.append(y)
                    changed = True
            if changed:
                ready.sort()
        return out

    def to_dot(self) -> str:
        lines = ["digraph triangle_order {"]
        for x in self.nodes:
            lines.append(f'  "{x}";')
        for a, b in sorted(self.edges):
            lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def triangle_order(C: ParityComplex) -> TriangleOrder:
    """Generating edges: x < y when x in minus(y), and x < y when y in plus(x)."""
    if "triangle_order" in C._cache:
        return C._cache["triangle_order"]
    edges = set()
    for y in C.ids():
        el = C.element(y)
        for x in el.minus:
            if x in C:
                edges.add((x, y))
        for z in el.plus:
            if z in C:
                edges.add((y, z))
    order = TriangleOrder(C.ids(), edges)
    C._cache["triangle_order"] = order
    return order


# -- JSON ---------------------------------------------------------------------


def complex_to_dict(C: ParityComplex) -> dict:
    elements = []
    for x in C.ids():
        el = C.element(x)
        entry = {"id": el.id, "dim": el.dim}
        if el.dim > 0:
            entry["minus"] = sorted(el.minus)
            entry["plus"] = sorted(el.plus)
        elements.append(entry)
    return {"dim": C.dim, "elements": elements}


def complex_from_dict(data: dict) -> ParityComplex:
    try:
        dim = int(data["dim"])
        elements = []
        for entry in data["elements"]:
            elements.append(Element(
                id=str(entry["id"]),
                dim=int(entry["dim"]),
                minus=frozenset(str(i) for i in entry.get("minus", ())),
                plus=frozenset(str(i) for i in entry.get("plus", ())),
            ))
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"malformed parity complex data: {exc}") from exc
    return ParityComplex(dim, elements)


def dumps(C: ParityComplex) -> str:
    return json.dumps(complex_to_dict(C), sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str) -> ParityComplex:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"invalid JSON: {exc}") from exc
    return complex_from_dict(data)
