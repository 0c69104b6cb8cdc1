"""Truncated simplicial sets and the two nerves.

The nerve of an n-category A has, at level k, the functors from the
free category on the k-simplex into A; faces and degeneracies come from
the order-preserving maps between simplexes (injections relabel
generators, surjections collapse some of them onto identities).  For a
1-category this coincides levelwise with the classical nerve made of
composable strings, which is implemented separately as an oracle.
"""

from __future__ import annotations

from .core import DomainError
from .build import simplex
from .ncat import cell_str, enumerate_functors, pushforward_assignment


class SimplicialSetTrunc:
    """Levels 0..m with faces and degeneracies stored as explicit maps."""

    def __init__(self, levels, faces, degens):
        self.levels = [list(v) for v in levels]
        self.faces = {k: dict(v) for k, v in faces.items()}      # (m, r): level m -> m-1
        self.degens = {k: dict(v) for k, v in degens.items()}    # (m, r): level m -> m+1
        self.top = len(self.levels) - 1

    def face(self, m, r, el):
        return self.faces[(m, r)][el]

    def degen(self, m, r, el):
        return self.degens[(m, r)][el]

    def check_identities(self) -> list:
        """All simplicial identities that fit inside the truncation."""
        errs = []
        for m in range(2, self.top + 1):
            for j in range(m + 1):
                for i in range(j):
                    for el in self.levels[m]:
                        lhs = self.face(m - 1, i, self.face(m, j, el))
                        rhs = self.face(m - 1, j - 1, self.face(m, i, el))
                        if lhs != rhs:
                            errs.append(f"d_{i} d_{j} != d_(j-1) d_{i} at level {m} on {el}")
        for m in range(self.top - 1):
            for j in range(m + 1):
                for i in range(j + 1):
                    for el in self.levels[m]:
                        lhs = self.degen(m + 1, i, self.degen(m, j, el))
                        rhs = self.degen(m + 1, j + 1, self.degen(m, i, el))
                        if lhs != rhs:
                            errs.append(f"s_{i} s_{j} != s_(j+1) s_{i} at level {m} on {el}")
        for m in range(self.top):
            for j in range(m + 1):
                for el in self.levels[m]:
                    sj = self.degen(m, j, el)
                    for i in range(m + 2):
                        out = self.face(m + 1, i, sj)
                        if i == j or i == j + 1:
                            expected = el
                        elif i < j:
                            expected = self.degen(m - 1, j - 1, self.face(m, i, el))
                        else:
                            expected = self.degen(m - 1, j, self.face(m, i - 1, el))
                        if out != expected:
                            errs.append(f"d_{i} s_{j} identity fails at level {m} on {el}")
        return errs


# -- classical nerve of a 1-category -------------------------------------------


def _string_id(cells):
    return "[" + "|".join(cell_str(c) for c in cells) + "]"


def classical_nerve(A, m: int) -> SimplicialSetTrunc:
    """Composable strings of a 1-category: level k holds the k-tuples of
    composable arrows (identities included as the objects themselves);
    inner faces compose adjacent arrows, outer faces drop one end, and
    degeneracies insert an identity."""
    if A.dim > 1:
        raise DomainError("classical nerve needs a 1-category")
    objects = A.zero_cells()
    arrows = A.cells_leq(1)
    strings = {0: [(o,) for o in objects]}
    for k in range(1, m + 1):
        strings[k] = []
        if k == 1:
            strings[1] = [(a,) for a in arrows]
            continue
        for s in strings[k - 1]:
            for a in arrows:
                if A.tgt(s[-1], 0) == A.src(a, 0):
                    strings[k].append(s + (a,))
    levels = {k: sorted(_string_id(s) for s in strings[k]) for k in strings}
    by_id = {k: {_string_id(s): s for s in strings[k]} for k in strings}

    faces, degens = {}, {}
    for k in range(1, m + 1):
        for r in range(k + 1):
            tbl = {}
            for sid, s in by_id[k].items():
                if k == 1:
                    out = (A.tgt(s[0], 0),) if r == 0 else (A.src(s[0], 0),)
                elif r == 0:
                    out = s[1:]
                elif r == k:
                    out = s[:-1]
                else:
                    out = s[:r - 1] + (A.comp(0, s[r - 1], s[r]),) + s[r + 1:]
                tbl[sid] = _string_id(out)
            faces[(k, r)] = tbl
    for k in range(m):
        for r in range(k + 1):
            tbl = {}
            for sid, s in by_id[k].items():
                if k == 0:
                    out = (s[0],)
                else:
                    at = A.src(s[r], 0) if r < k else A.tgt(s[-1], 0)
                    out = s[:r] + (at,) + s[r:]
                tbl[sid] = _string_id(out)
            degens[(k, r)] = tbl
    return SimplicialSetTrunc([levels[k] for k in range(m + 1)], faces, degens)


# -- the simplicial nerve of an n-category --------------------------------------


def _assignment_id(C, assignment):
    return ";".join(f"{x}={cell_str(assignment[x])}" for x in C.ids())


def _inject_subset(sid: str, delta_r: int) -> str:
    """Image of a vertex subset (digit string) under the injection that
    skips index delta_r."""
    return "".join(str(v if v < delta_r else v + 1)
                   for v in (int(ch) for ch in sid))


def _collapse_subset(sid: str, sigma_r: int):
    """Image under the surjection folding sigma_r+1 onto sigma_r, or None
    when the subset contains both (so its dimension drops)."""
    vals = [int(ch) for ch in sid]
    if sigma_r in vals and sigma_r + 1 in vals:
        return None
    return "".join(str(v if v <= sigma_r else v - 1) for v in vals)


def nerve(A, m: int) -> SimplicialSetTrunc:
    """Level k: functors from the free category on the k-simplex to A,
    encoded by their generator assignments."""
    complexes = {k: simplex(k) for k in range(m + 1)}
    level_assignments = {}
    for k in range(m + 1):
        fs = enumerate_functors(complexes[k], A)
        level_assignments[k] = {
            _assignment_id(complexes[k], f): f for f in fs}
    levels = {k: sorted(level_assignments[k]) for k in range(m + 1)}

    faces, degens = {}, {}
    for k in range(1, m + 1):
        for r in range(k + 1):
            tbl = {}
            for fid, f in level_assignments[k].items():
                low = complexes[k - 1]
                g = {x: f[_inject_subset(x, r)] for x in low.ids()}
                tbl[fid] = _assignment_id(low, g)
            faces[(k, r)] = tbl
    for k in range(m):
        for r in range(k + 1):
            tbl = {}
            for fid, f in level_assignments[k].items():
                high = complexes[k + 1]

                def image_value(x, f=f, r=r):
                    y = _collapse_subset(x, r)
                    return None if y is None else f[y]

                g = pushforward_assignment(high, A, image_value)
                tbl[fid] = _assignment_id(high, g)
            degens[(k, r)] = tbl
    return SimplicialSetTrunc([levels[k] for k in range(m + 1)], faces, degens)


def nerve_matches_classical(A, m: int) -> bool:
    """Levelwise comparison through the canonical bijection reading off
    the consecutive edges of each functor; faces and degeneracies must
    commute with it."""
    nv = nerve(A, m)
    cl = classical_nerve(A, m)
    complexes = {k: simplex(k) for k in range(m + 1)}

    def translate(k, f):
        if k == 0:
            return _string_id((f["0"],))
        return _string_id(tuple(f[f"{i}{i + 1}"] for i in range(k)))

    trans = {}
    for k in range(m + 1):
        fs = enumerate_functors(complexes[k], A)
        trans[k] = {_assignment_id(complexes[k], f): translate(k, f) for f in fs}
        mapped = sorted(trans[k][fid] for fid in nv.levels[k])
        if mapped != sorted(cl.levels[k]):
            return False
        if len(set(mapped)) != len(mapped):
            return False
    for (k, r), tbl in nv.faces.items():
        for fid, out in tbl.items():
            if cl.face(k, r, trans[k][fid]) != trans[k - 1][out]:
                return False
    for (k, r), tbl in nv.degens.items():
        for fid, out in tbl.items():
            if cl.degen(k, r, trans[k][fid]) != trans[k + 1][out]:
                return False
    return True
