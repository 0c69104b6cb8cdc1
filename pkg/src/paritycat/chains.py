"""Chain complexes attached to parity complexes, and the category of a
mod-p chain complex.

A parity complex C has a chain complex with one basis element per
element of C and boundary d(x) = sum of plus faces - sum of minus
faces.  Products of parity complexes go to tensor products (with the
usual alternating sign on the second factor), entry for entry.

A finite chain complex over Z/p also generates a strict n-category: a
k-cell is an element b of degree k together with the lower-degree data
of its iterated sources; d(b) separates target from source one level
down, and every composition is addition.  Homology ranks computed by
Gaussian elimination over Z/p serve as the oracle for the homotopy
groups of that category.
"""

from __future__ import annotations

import json
from itertools import product as iproduct

from .core import DomainError, ParityComplex, StructureError
from .ncat import FiniteNCat


class ChainComplex:
    """Based chain complex with integer (p = 0) or mod-p coefficients.

    d[k] is the matrix of the boundary from degree k to degree k-1,
    stored as a list of rows (rows indexed by the degree-(k-1) basis).
    """

    def __init__(self, top: int, p: int, basis: dict, d: dict):
        if p != 0 and not _is_prime(p):
            raise DomainError(f"coefficient modulus {p} is not prime")
        self.top = int(top)
        self.p = int(p)
        self.basis = {int(k): list(v) for k, v in basis.items()}
        self.d = {}
        for k, rows in d.items():
            k = int(k)
            mat = [[self._coef(x) for x in row] for row in rows]
            self.d[k] = mat
        for k in range(self.top + 1):
            self.basis.setdefault(k, [])
        for k in range(1, self.top + 1):
            self.d.setdefault(k, [[0] * len(self.basis[k])
                                  for _ in range(len(self.basis[k - 1]))])
            rows, cols = len(self.basis[k - 1]), len(self.basis[k])
            got_r = len(self.d[k])
            got_c = len(self.d[k][0]) if self.d[k] else 0
            if got_r != rows or (rows and got_c != cols):
                raise StructureError(
                    f"boundary {k} has shape {got_r}x{got_c}, expected {rows}x{cols}")

    def _coef(self, x):
        x = int(x)
        return x % self.p if self.p else x

    def rank_of(self, k: int) -> int:
        return len(self.basis.get(k, []))

    def dd_violations(self) -> list:
        """Degrees where d o d != 0."""
        bad = []
        for k in range(2, self.top + 1):
            prod = _mat_mul(self.d[k - 1], self.d[k], self.p)
            if any(any(v != 0 for v in row) for row in prod):
                bad.append(k)
        return bad

    def to_dict(self) -> dict:
        return {
            "top": self.top,
            "p": self.p,
            "basis": {str(k): list(self.basis[k]) for k in range(self.top + 1)},
            "d": {str(k): [list(r) for r in self.d[k]]
                  for k in range(1, self.top + 1)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChainComplex":
        try:
            return cls(int(data["top"]), int(data["p"]),
                       {int(k): v for k, v in data["basis"].items()},
                       {int(k): v for k, v in data.get("d", {}).items()})
        except (KeyError, TypeError, ValueError) as exc:
            raise StructureError(f"malformed chain complex data: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _mat_mul(A, B, p):
    if not A or not B:
        return []
    rows, mid, cols = len(A), len(B), len(B[0]) if B else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            s = sum(A[i][t] * B[t][j] for t in range(mid))
            out[i][j] = s % p if p else s
    return out


def chain_of(C: ParityComplex, p: int = 0) -> ChainComplex:
    """The chain complex of a parity complex: basis per dimension sorted
    by id, boundary column of x carrying +1 on plus faces and -1 on
    minus faces."""
    top = C.max_dim()
    basis = {k: list(C.grade(k)) for k in range(top + 1)}
    index = {k: {x: i for i, x in enumerate(basis[k])} for k in basis}
    d = {}
    for k in range(1, top + 1):
        mat = [[0] * len(basis[k]) for _ in range(len(basis[k - 1]))]
        for j, x in enumerate(basis[k]):
            for y in C.plus(x):
                mat[index[k - 1][y]][j] += 1
            for y in C.minus(x):
                mat[index[k - 1][y]][j] -= 1
        d[k] = mat
    return ChainComplex(top, p, basis, d)


def tensor(R: ChainComplex, S: ChainComplex) -> ChainComplex:
    """Tensor product: degree-n basis pairs (x, a) over all splits,
    ordered by (degree of x, position); boundary
    d(x (x) a) = dx (x) a + (-1)^{deg x} x (x) da."""
    if R.p != S.p:
        raise DomainError("coefficient moduli differ")
    p = R.p
    top = R.top + S.top
    basis = {}
    pos = {}
    for n in range(top + 1):
        entries = []
        for q in range(0, n + 1):
            r = n - q
            if r > R.top or q > S.top:
                continue
            for x in R.basis[r]:
                for a in S.basis[q]:
                    entries.append((r, x, q, a))
        entries.sort(key=lambda e: (e[0], e[1], e[3]))
        basis[n] = [f"({x},{a})" for _, x, _, a in entries]
        pos[n] = {(x, a): i for i, (_, x, _, a) in enumerate(entries)}
        pos[(n, "split")] = entries
    d = {}
    for n in range(1, top + 1):
        mat = [[0] * len(basis[n]) for _ in range(len(basis[n - 1]))]
        for j, (r, x, q, a) in enumerate(pos[(n, "split")]):
            if r > 0:
                col = R.basis[r].index(x)
                for i, y in enumerate(R.basis[r - 1]):
                    c = R.d[r][i][col]
                    if c:
                        mat[pos[n - 1][(y, a)]][j] += c
            if q > 0:
                sign = 1 if r % 2 == 0 else -1
                col = S.basis[q].index(a)
                for i, b in enumerate(S.basis[q - 1]):
                    c = S.d[q][i][col]
                    if c:
                        mat[pos[n - 1][(x, b)]][j] += sign * c
        if p:
            mat = [[v % p for v in row] for row in mat]
        d[n] = mat
    return ChainComplex(top, p, basis, d)


def product_iso_holds(C: ParityComplex, D: ParityComplex) -> bool:
    """Whether the chain complex of product(C, D) equals the tensor of
    the two chain complexes under the pairing bijection, entry for
    entry (boundaries compared after aligning both bases)."""
    from .build import pair_id, product

    P = product(C, D)
    FP = chain_of(P)
    T = tensor(chain_of(C), chain_of(D))
    if FP.top != T.top:
        return False
    # position of each product element inside FP's basis, per the pairing
    maps = {}
    for n in range(T.top + 1):
        if len(FP.basis[n]) != len(T.basis[n]):
            return False
        perm = []
        fp_index = {x: i for i, x in enumerate(FP.basis[n])}
        for (r, x, q, a) in _splits(T, n):
            pid = pair_id(x, a)
            if pid not in fp_index:
                return False
            perm.append(fp_index[pid])
        maps[n] = perm
    for n in range(1, T.top + 1):
        rows, cols = maps[n - 1], maps[n]
        for j in range(len(T.basis[n])):
            for i in range(len(T.basis[n - 1])):
                if T.d[n][i][j] != FP.d[n][rows[i]][cols[j]]:
                    return False
    return True


def _splits(T: ChainComplex, n: int):
    # recover (deg x, x, deg a, a) tuples from the tensor basis labels
    out = []
    for label in T.basis[n]:
        x, a = label[1:-1].split(",", 1)
        out.append((None, x, None, a))
    return out


# -- the category of a mod-p chain complex -------------------------------------


def _vec_str(v):
    return "".join(str(x) for x in v) if v else "-"


def _theta_id(tup):
    k = len(tup) - 1
    return f"{k}:" + ";".join(_vec_str(v) for v in tup)


def _normalize(tup):
    """Strip zero top components: such a tuple is the identity on the
    cell below, which in the implicit-identity encoding is that cell."""
    tup = list(tup)
    while len(tup) > 1 and not any(tup[0]):
        tup.pop(0)
    return tuple(tuple(v) for v in tup)


def theta_cat(R: ChainComplex) -> FiniteNCat:
    """The strict n-category of a mod-p chain complex.

    A k-cell is a tuple (b_k, x_{k-1}, ..., x_0): top element b_k != 0
    and the shared lower data of its source; the target replaces
    x_{k-1} by x_{k-1} + d(b_k).  Every composition adds the components
    above the composition level and keeps the rest from the first
    argument.
    """
    if R.p == 0:
        raise DomainError("theta_cat needs mod-p coefficients")
    bad = R.dd_violations()
    if bad:
        raise DomainError(f"not a chain complex, d o d != 0 at degrees {bad}")
    p = R.p
    vectors = {k: [tuple(v) for v in
                   iproduct(range(p), repeat=R.rank_of(k))]
               for k in range(R.top + 1)}

    def boundary(k, v):
        if R.rank_of(k - 1) == 0:
            return ()
        mat = R.d[k]
        return tuple(sum(mat[i][j] * v[j] for j in range(len(v))) % p
                     for i in range(len(mat)))

    cells = {}  # id -> tuple form
    dims = {}
    for x0 in vectors[0]:
        tup = (tuple(x0),)
        cells[_theta_id(tup)] = tup
        dims[_theta_id(tup)] = 0
    for k in range(1, R.top + 1):
        lower_pool = [vectors[j] for j in range(k - 1, -1, -1)]
        for b in vectors[k]:
            if not any(b):
                continue
            for lower in iproduct(*lower_pool):
                tup = (tuple(b),) + tuple(tuple(v) for v in lower)
                cells[_theta_id(tup)] = tup
                dims[_theta_id(tup)] = k

    def add_vec(u, v):
        return tuple((a + b) % p for a, b in zip(u, v))

    def src_tup(tup, j):
        k = len(tup) - 1
        return _normalize(tup[k - j:])

    def tgt_tup(tup, j):
        k = len(tup) - 1
        rest = tup[k - j:]
        top = add_vec(rest[0], boundary(j + 1, tup[k - j - 1]))
        return _normalize((top,) + rest[1:])

    src, tgt = {}, {}
    for cid, tup in cells.items():
        k = dims[cid]
        for j in range(k):
            src[(cid, j)] = _theta_id(src_tup(tup, j))
            tgt[(cid, j)] = _theta_id(tgt_tup(tup, j))

    comp = {}
    by_id = sorted(cells)
    for aid in by_id:
        for bid in by_id:
            ta, tb = cells[aid], cells[bid]
            ka, kb = dims[aid], dims[bid]
            for j in range(min(ka, kb)):
                if tgt_tup(ta, j) != src_tup(tb, j):
                    continue
                k = max(ka, kb)
                pa = _pad(R, ta, k)
                pb = _pad(R, tb, k)
                out = tuple(add_vec(pa[i], pb[i]) for i in range(k - j)) + ta[ka - j:]
                comp[(j, aid, bid)] = _theta_id(_normalize(out))
    return FiniteNCat(R.top, dims, src, tgt, comp)


def _pad(R: ChainComplex, tup, k):
    """View a cell tuple at dimension k by prepending zero top vectors of
    the right ranks."""
    have = len(tup) - 1
    if k == have:
        return tup
    pad = tuple(tuple(0 for _ in range(R.rank_of(deg)))
                for deg in range(k, have, -1))
    return pad + tup


def homology(R: ChainComplex, k: int) -> int:
    """Mod-p dimension of homology in degree k:
    dim ker(d_k) - rank(d_{k+1})."""
    if R.p == 0:
        raise DomainError("homology oracle works mod p")
    n_k = R.rank_of(k)
    if n_k == 0:
        return 0
    rank_k = _rank(R.d[k], R.p) if k >= 1 else 0
    rank_k1 = _rank(R.d[k + 1], R.p) if k + 1 <= R.top else 0
    return (n_k - rank_k) - rank_k1


def _rank(mat, p: int) -> int:
    if not mat or not mat[0]:
        return 0
    m = [row[:] for row in mat]
    rows, cols = len(m), len(m[0])
    rank = 0
    for col in range(cols):
        piv = None
        for r in range(rank, rows):
            if m[r][col] % p != 0:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], -1, p)
        m[rank] = [(v * inv) % p for v in m[rank]]
        for r in range(rows):
            if r != rank and m[r][col] % p:
                f = m[r][col]
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == rows:
            break
    return rank
