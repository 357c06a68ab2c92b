"""Exact integer linear algebra over Z.

Everything downstream (Mackey functors, box products, Ext/Tor, Bredon
homology) reduces to computations with finitely generated abelian groups
presented as cokernels of integer matrices.  This module provides the
substrate: Smith normal form with unimodular transforms, integer linear
solving, lattice arithmetic, presented groups with Hom/Ext/tensor, and
homology of chain complexes with induced maps on subquotients.

Matrices are plain lists of rows of Python ints (arbitrary precision).
A matrix with ``m`` rows and ``n`` columns maps column vectors of length
``n`` to column vectors of length ``m``.
"""

from functools import cached_property
from heapq import heapify as _heapify, heappop as _heappop, heappush as _heappush


# ---------------------------------------------------------------------------
# basic dense matrix helpers


def zeros(m, n):
    return [[0] * n for _ in range(m)]


def identity(n):
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = 1
    return out


def copy_matrix(a):
    return [row[:] for row in a]


def shape(a):
    return len(a), len(a[0]) if a else 0


def transpose(a):
    m, n = shape(a)
    return [[a[i][j] for i in range(m)] for j in range(n)]


def mat_mul(a, b):
    m, k = shape(a)
    k2, n = shape(b)
    if k != k2:
        raise ValueError("matrix shapes %sx%s and %sx%s do not compose" % (m, k, k2, n))
    bt = transpose(b)
    out = zeros(m, n)
    for i in range(m):
        ai = a[i]
        oi = out[i]
        for j in range(n):
            bj = bt[j]
            s = 0
            for t in range(k):
                v = ai[t]
                if v:
                    s += v * bj[t]
            oi[j] = s
    return out


def mat_add(a, b):
    m, n = shape(a)
    return [[a[i][j] + b[i][j] for j in range(n)] for i in range(m)]


def mat_sub(a, b):
    m, n = shape(a)
    return [[a[i][j] - b[i][j] for j in range(n)] for i in range(m)]


def mat_scale(c, a):
    return [[c * v for v in row] for row in a]


def mat_neg(a):
    return mat_scale(-1, a)


def mat_eq(a, b):
    return shape(a) == shape(b) and all(ra == rb for ra, rb in zip(a, b))


def is_zero_matrix(a):
    return all(v == 0 for row in a for v in row)


def mat_apply(a, vec):
    """Apply matrix to a column vector, iterating the vector's support."""
    m, n = shape(a)
    if len(vec) != n:
        raise ValueError("vector length %d does not match %d columns" % (len(vec), n))
    out = [0] * m
    for j, v in enumerate(vec):
        if v:
            for i in range(m):
                aij = a[i][j]
                if aij:
                    out[i] += aij * v
    return out


def columns(a):
    m, n = shape(a)
    return [[a[i][j] for i in range(m)] for j in range(n)]


def from_columns(cols, rows=None):
    """Assemble a matrix from a list of column vectors."""
    if not cols:
        return [[] for _ in range(rows)] if rows else []
    m = len(cols[0])
    return [[col[i] for col in cols] for i in range(m)]


def hstack(a, b):
    ma, na = shape(a)
    mb, nb = shape(b)
    if na == 0:
        a = [[] for _ in range(mb)]
    if nb == 0:
        b = [[] for _ in range(ma)]
    if len(a) != len(b):
        raise ValueError("row counts differ in hstack")
    return [ra + rb for ra, rb in zip(a, b)]


def block_diag(blocks):
    rows = sum(len(b) for b in blocks)
    cols = sum(shape(b)[1] for b in blocks)
    out = zeros(rows, cols)
    r = c = 0
    for b in blocks:
        bm, bn = shape(b)
        for i in range(bm):
            out[r + i][c:c + bn] = b[i][:]
        r += bm
        c += bn
    return out


def kron(a, b):
    """Kronecker product; basis of the product indexed by (i_a, i_b)."""
    ma, na = shape(a)
    mb, nb = shape(b)
    out = zeros(ma * mb, na * nb)
    for i in range(ma):
        for j in range(na):
            v = a[i][j]
            if not v:
                continue
            for k in range(mb):
                row = out[i * mb + k]
                bk = b[k]
                for l in range(nb):
                    if bk[l]:
                        row[j * nb + l] = v * bk[l]
    return out


# ---------------------------------------------------------------------------
# Smith normal form


class SmithForm:
    """Decomposition U*A*V = D with U, V unimodular and D diagonal.

    ``d`` lists the invariant factors (the positive diagonal entries of D,
    each dividing the next); the remaining diagonal is zero.  Transform
    matrices are computed on demand according to the flags given to
    :func:`smith_normal_form`; accessing a transform that was not requested
    raises ``AttributeError``.
    """

    __slots__ = ("m", "n", "d", "_U", "_Uinv", "_V", "_Vinv")

    def __init__(self, m, n, d, U=None, Uinv=None, V=None, Vinv=None):
        self.m = m
        self.n = n
        self.d = d
        self._U = U
        self._Uinv = Uinv
        self._V = V
        self._Vinv = Vinv

    @property
    def rank(self):
        return len(self.d)

    @property
    def D(self):
        out = zeros(self.m, self.n)
        for i, v in enumerate(self.d):
            out[i][i] = v
        return out

    def _get(self, name):
        val = getattr(self, "_" + name)
        if val is None:
            raise AttributeError("transform %s was not requested" % name)
        return val

    @property
    def U(self):
        return self._get("U")

    @property
    def Uinv(self):
        return self._get("Uinv")

    @property
    def V(self):
        return self._get("V")

    @property
    def Vinv(self):
        return self._get("Vinv")


def smith_normal_form(a, want_U=True, want_Uinv=True, want_V=True, want_Vinv=True):
    """Smith normal form by elimination with minimal-absolute-value pivots.

    Unit pivots are preferred (with a Markowitz fill estimate breaking
    ties) so that the incidence-like matrices arising from cell complexes
    reduce without coefficient growth.
    """
    m = len(a)
    n = len(a[0]) if a else 0

    # sparse working copy: rows as {col: value}, plus a column index
    rows = [{j: v for j, v in enumerate(row) if v} for row in a]
    colidx = [set() for _ in range(n)]
    for i, row in enumerate(rows):
        for j in row:
            colidx[j].add(i)

    # transforms are stored in the orientation their updates run along:
    # U and Vinv by rows, Uinv and V by columns (transposed back at the end)
    U = identity(m) if want_U else None
    Uinv_cols = identity(m) if want_Uinv else None
    V_cols = identity(n) if want_V else None
    Vinv = identity(n) if want_Vinv else None

    def row_add(dst, src, c):
        # row[dst] += c * row[src]
        rsrc = rows[src]
        rdst = rows[dst]
        for j, v in rsrc.items():
            w = rdst.get(j, 0) + c * v
            if w:
                if j not in rdst:
                    colidx[j].add(dst)
                rdst[j] = w
            elif j in rdst:
                del rdst[j]
                colidx[j].discard(dst)
        if heap is not None:
            for j in rsrc:
                push_candidate(dst, j)
        if U is not None:
            us = U[src]
            U[dst] = [a + c * b for a, b in zip(U[dst], us)]
        if Uinv_cols is not None:
            # A = Uinv D Vinv; a row op E on D means Uinv <- Uinv E^{-1}
            ud = Uinv_cols[dst]
            Uinv_cols[src] = [a - c * b for a, b in zip(Uinv_cols[src], ud)]

    def row_swap(i1, i2):
        if i1 == i2:
            return
        rows[i1], rows[i2] = rows[i2], rows[i1]
        for j in rows[i1]:
            colidx[j].discard(i2)
            colidx[j].add(i1)
        for j in rows[i2]:
            if i1 not in colidx[j] or j not in rows[i1]:
                colidx[j].discard(i1)
            colidx[j].add(i2)
        # fix up index conservatively
        for j in set(rows[i1]) | set(rows[i2]):
            colidx[j].discard(i1)
            colidx[j].discard(i2)
            if j in rows[i1]:
                colidx[j].add(i1)
            if j in rows[i2]:
                colidx[j].add(i2)
        if heap is not None:
            for j in rows[i1]:
                push_candidate(i1, j)
            for j in rows[i2]:
                push_candidate(i2, j)
        if U is not None:
            U[i1], U[i2] = U[i2], U[i1]
        if Uinv_cols is not None:
            Uinv_cols[i1], Uinv_cols[i2] = Uinv_cols[i2], Uinv_cols[i1]

    def row_negate(i):
        ri = rows[i]
        for j in ri:
            ri[j] = -ri[j]
        if U is not None:
            U[i] = [-v for v in U[i]]
        if Uinv_cols is not None:
            Uinv_cols[i] = [-v for v in Uinv_cols[i]]

    def col_add(dst, src, c):
        # col[dst] += c * col[src]
        for i in list(colidx[src]):
            v = rows[i].get(src, 0)
            if not v:
                continue
            w = rows[i].get(dst, 0) + c * v
            if w:
                if dst not in rows[i]:
                    colidx[dst].add(i)
                rows[i][dst] = w
            elif dst in rows[i]:
                del rows[i][dst]
                colidx[dst].discard(i)
        if heap is not None:
            for i in colidx[src]:
                push_candidate(i, dst)
        if V_cols is not None:
            vsrc = V_cols[src]
            V_cols[dst] = [a + c * b for a, b in zip(V_cols[dst], vsrc)]
        if Vinv is not None:
            vd = Vinv[dst]
            Vinv[src] = [a - c * b for a, b in zip(Vinv[src], vd)]

    def col_swap(j1, j2):
        if j1 == j2:
            return
        for i in colidx[j1] | colidx[j2]:
            ri = rows[i]
            v1 = ri.pop(j1, 0)
            v2 = ri.pop(j2, 0)
            if v2:
                ri[j1] = v2
            if v1:
                ri[j2] = v1
        colidx[j1], colidx[j2] = (
            {i for i in colidx[j2] if j1 in rows[i]},
            {i for i in colidx[j1] if j2 in rows[i]},
        )
        if heap is not None:
            for i in colidx[j1]:
                push_candidate(i, j1)
            for i in colidx[j2]:
                push_candidate(i, j2)
        if V_cols is not None:
            V_cols[j1], V_cols[j2] = V_cols[j2], V_cols[j1]
        if Vinv is not None:
            Vinv[j1], Vinv[j2] = Vinv[j2], Vinv[j1]

    def col_negate(j):
        for i in colidx[j]:
            rows[i][j] = -rows[i][j]
        if V_cols is not None:
            V_cols[j] = [-v for v in V_cols[j]]
        if Vinv is not None:
            Vinv[j] = [-v for v in Vinv[j]]

    done_rows = set()
    done_cols = set()
    row_done = [False] * m
    col_done = [False] * n
    pivots = []

    # lazy priority queue of pivot candidates keyed by (|value|, fill)
    heap = []
    for i, row in enumerate(rows):
        rn = len(row) - 1
        for j, v in row.items():
            heap.append((v if v > 0 else -v, rn * (len(colidx[j]) - 1), i, j))
    _heapify(heap)

    def push_candidate(i, j):
        v = rows[i].get(j)
        if v and not row_done[i] and not col_done[j]:
            _heappush(heap, (v if v > 0 else -v,
                             (len(rows[i]) - 1) * (len(colidx[j]) - 1), i, j))

    def find_pivot():
        while heap:
            av, fill, i, j = _heappop(heap)
            if row_done[i] or col_done[j]:
                continue
            v = rows[i].get(j)
            if not v:
                continue
            cur_av = v if v > 0 else -v
            cur_fill = (len(rows[i]) - 1) * (len(colidx[j]) - 1)
            if cur_av > av or (cur_av == av and cur_fill > fill):
                # stale optimistic key: requeue at the true key unless it
                # still beats everything in the queue
                if heap and heap[0] < (cur_av, cur_fill, i, j):
                    _heappush(heap, (cur_av, cur_fill, i, j))
                    continue
            return (i, j)
        return None

    while True:
        piv = find_pivot()
        if piv is None:
            break
        i, j = piv
        # gcd-reduce until the pivot divides its whole row and column
        while True:
            v = rows[i][j]
            # clear column j
            again = False
            for i2 in list(colidx[j]):
                if i2 == i or i2 in done_rows:
                    continue
                w = rows[i2].get(j, 0)
                if not w:
                    continue
                q = w // v
                row_add(i2, i, -q)
                if rows[i2].get(j, 0):
                    # remainder is smaller than |v|: swap pivot rows
                    row_swap(i, i2)
                    again = True
                    break
            if again:
                continue
            v = rows[i][j]
            for j2 in list(rows[i]):
                if j2 == j or j2 in done_cols:
                    continue
                w = rows[i][j2]
                q = w // v
                col_add(j2, j, -q)
                if rows[i].get(j2, 0):
                    col_swap(j, j2)
                    again = True
                    break
            if not again:
                break
        done_rows.add(i)
        done_cols.add(j)
        row_done[i] = True
        col_done[j] = True
        pivots.append((i, j))

    heap = None  # the collection and divisibility phases track no candidates

    # move pivots onto the diagonal in order
    for t, (i, j) in enumerate(pivots):
        row_swap(t, i)
        col_swap(t, j)
        for t2 in range(t + 1, len(pivots)):
            i2, j2 = pivots[t2]
            if i2 == t:
                i2 = i
            elif i2 == i:
                i2 = t
            if j2 == t:
                j2 = j
            elif j2 == j:
                j2 = t
            pivots[t2] = (i2, j2)
        if rows[t].get(t, 0) < 0:
            row_negate(t)

    r = len(pivots)
    diag = [rows[t].get(t, 0) for t in range(r)]

    # enforce the divisibility chain d_i | d_{i+1}
    changed = True
    while changed:
        changed = False
        for t in range(r - 1):
            a1, a2 = diag[t], diag[t + 1]
            if a2 % a1 == 0:
                continue
            changed = True
            # place both in a 2x2 block and re-reduce by hand:
            # [[a1, 0], [0, a2]] --col add--> [[a1, 0], [a2, a2]]
            col_add(t, t + 1, 1)
            # euclidean steps on the 2x2 block
            while True:
                v1 = rows[t].get(t, 0)
                v2 = rows[t + 1].get(t, 0)
                if v2 == 0:
                    break
                if v1 == 0 or (v1 and v2 and abs(v2) < abs(v1)):
                    row_swap(t, t + 1)
                    continue
                row_add(t + 1, t, -(v2 // v1))
            # clear the remaining entry of row t in column t+1
            v = rows[t].get(t, 0)
            w = rows[t].get(t + 1, 0)
            if w:
                col_add(t + 1, t, -(w // v))
                if rows[t].get(t + 1, 0):
                    col_swap(t, t + 1)
                    # re-run the euclidean loop
                    changed = True
            # clean signs and row below
            if rows[t].get(t, 0) < 0:
                row_negate(t)
            if rows[t + 1].get(t + 1, 0) < 0:
                row_negate(t + 1)
            v2 = rows[t + 1].get(t, 0)
            if v2:
                q = v2 // rows[t].get(t, 0)
                row_add(t + 1, t, -q)
            diag[t] = rows[t].get(t, 0)
            diag[t + 1] = rows[t + 1].get(t + 1, 0)

    d = [rows[t].get(t, 0) for t in range(r)]
    assert all(v > 0 for v in d)
    uinv = transpose(Uinv_cols) if Uinv_cols is not None else None
    if uinv == [] and m:
        uinv = [[] for _ in range(m)]
    v = transpose(V_cols) if V_cols is not None else None
    if v == [] and n:
        v = [[] for _ in range(n)]
    return SmithForm(m, n, d, U=U, Uinv=uinv, V=v, Vinv=Vinv)


# ---------------------------------------------------------------------------
# lattice arithmetic built on SNF


def kernel_basis(a):
    """Columns forming a basis of {x : a*x = 0}."""
    m, n = shape(a)
    if n == 0:
        return []
    snf = smith_normal_form(a, want_U=False, want_Uinv=False, want_Vinv=False)
    cols = columns(snf.V)
    return cols[snf.rank:]


def image_basis(a):
    """Columns forming a basis of the column lattice of ``a``."""
    m, n = shape(a)
    if n == 0 or m == 0:
        return []
    snf = smith_normal_form(a, want_U=False, want_V=False, want_Vinv=False)
    cols = columns(snf.Uinv)
    return [[snf.d[t] * v for v in cols[t]] for t in range(snf.rank)]


def solve_integer(a, b):
    """Solve a*x = b over Z.

    Returns ``(x, kernel)`` with ``kernel`` a list of basis columns of the
    solution lattice of a*x = 0, or ``None`` when no integer solution
    exists.  No-solution is a normal outcome, not an error.
    """
    m, n = shape(a)
    if len(b) != m:
        raise ValueError("rhs length %d does not match %d rows" % (len(b), m))
    snf = smith_normal_form(a, want_Uinv=False, want_Vinv=False)
    c = mat_apply(snf.U, b)
    y = [0] * n
    for i in range(m):
        di = snf.d[i] if i < snf.rank else 0
        if di:
            if c[i] % di:
                return None
            if i < n:
                y[i] = c[i] // di
        elif c[i]:
            return None
    x = mat_apply(snf.V, y)
    kern = columns(snf.V)[snf.rank:]
    return x, kern


class Lattice:
    """A sublattice of Z^n spanned by a list of integer columns.

    Membership testing and coordinate solving reuse one cached SNF.
    """

    __slots__ = ("n", "basis", "_snf")

    def __init__(self, n, spanning_columns=()):
        self.n = n
        cols = [c for c in spanning_columns if any(c)]
        if cols:
            self.basis = image_basis(from_columns(cols))
        else:
            self.basis = []
        self._snf = None

    def _solver(self):
        if self._snf is None:
            mat = from_columns(self.basis, rows=self.n) if self.basis else zeros(self.n, 0)
            self._snf = smith_normal_form(mat, want_Uinv=False, want_Vinv=False)
        return self._snf

    @property
    def rank(self):
        return len(self.basis)

    def contains(self, v):
        return self.coordinates(v) is not None

    def coordinates(self, v):
        """Express ``v`` in the stored basis, or None when v is outside."""
        if not self.basis:
            return [] if not any(v) else None
        snf = self._solver()
        c = mat_apply(snf.U, v)
        y = [0] * len(self.basis)
        for i in range(self.n):
            di = snf.d[i] if i < snf.rank else 0
            if di:
                if c[i] % di:
                    return None
                y[i] = c[i] // di
            elif c[i]:
                return None
        return mat_apply(snf.V, y)

    def contains_lattice(self, other):
        return all(self.contains(c) for c in other.basis)

    def __eq__(self, other):
        return (self.n == other.n and self.contains_lattice(other)
                and other.contains_lattice(self))

    def __hash__(self):  # pragma: no cover - lattices are not dict keys
        raise TypeError("Lattice is unhashable")

    def sum(self, extra_columns):
        return Lattice(self.n, self.basis + [list(c) for c in extra_columns])


def preimage_lattice(a, lattice):
    """Basis columns of {x : a*x in lattice} for a matrix a: Z^n -> Z^m."""
    m, n = shape(a)
    if lattice.n != m:
        raise ValueError("lattice lives in the wrong ambient space")
    if n == 0:
        return []
    stacked = hstack(a, from_columns(lattice.basis, rows=m) if lattice.basis else zeros(m, 0))
    kern = kernel_basis(stacked)
    projected = [c[:n] for c in kern]
    return image_basis(from_columns(projected, rows=n)) if projected else []


# ---------------------------------------------------------------------------
# finitely generated abelian groups


class FgAbGroup:
    """Abelian group presented as Z^gens modulo the columns of ``relations``."""

    __slots__ = ("gens", "relations", "__dict__")

    def __init__(self, gens, relation_columns=()):
        self.gens = gens
        rels = []
        for col in relation_columns:
            if len(col) != gens:
                raise ValueError("relator length %d does not match %d generators"
                                 % (len(col), gens))
            if any(col):
                rels.append(list(col))
        self.relations = rels

    @cached_property
    def _rel_lattice(self):
        return Lattice(self.gens, self.relations)

    @cached_property
    def canonical(self):
        """(free_rank, invariant factors > 1): equal iff groups isomorphic."""
        lat = self._rel_lattice
        mat = from_columns(lat.basis, rows=self.gens) if lat.basis else zeros(self.gens, 0)
        snf = smith_normal_form(mat, want_U=False, want_Uinv=False,
                                want_V=False, want_Vinv=False)
        factors = tuple(v for v in snf.d if v > 1)
        return (self.gens - snf.rank, factors)

    @property
    def free_rank(self):
        return self.canonical[0]

    @property
    def invariant_factors(self):
        return self.canonical[1]

    def is_zero(self):
        return self.canonical == (0, ())

    def is_finite(self):
        return self.free_rank == 0

    def order(self):
        """Group order, or None when infinite."""
        rank, factors = self.canonical
        if rank:
            return None
        out = 1
        for f in factors:
            out *= f
        return out

    def element_is_zero(self, v):
        return self._rel_lattice.contains(v)

    def quotient(self, extra_relators):
        return FgAbGroup(self.gens, self.relations + [list(c) for c in extra_relators])

    def describe(self):
        rank, factors = self.canonical
        parts = ["Z"] * rank + ["Z/%d" % f for f in factors]
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return "FgAbGroup(%d gens, %s)" % (self.gens, self.describe())


ZERO_GROUP = FgAbGroup(0)


def free_group(rank):
    return FgAbGroup(rank)


def cyclic_group(order):
    if order == 0:
        return FgAbGroup(1)
    return FgAbGroup(1, [[order]])


class GroupHom:
    """Homomorphism of presented groups given by a matrix on generators."""

    __slots__ = ("source", "target", "matrix", "__dict__")

    def __init__(self, source, target, matrix):
        if target.gens == 0:
            matrix = []
        m, n = shape(matrix)
        if m != target.gens or (m and n != source.gens):
            raise ValueError("matrix shape %sx%s does not map %d gens to %d gens"
                             % (m, n, source.gens, target.gens))
        self.source = source
        self.target = target
        self.matrix = matrix

    def is_well_defined(self):
        lat = self.target._rel_lattice
        return all(lat.contains(self.apply(col))
                   for col in self.source.relations)

    def apply(self, v):
        if self.target.gens == 0:
            return []
        if len(v) != self.source.gens:
            raise ValueError("vector does not match the source generators")
        return [sum(row[j] * v[j] for j in range(len(v)) if v[j])
                for row in self.matrix]

    def compose(self, other):
        """self after other."""
        if other.target.gens != self.source.gens:
            raise ValueError("homomorphisms do not compose")
        if self.target.gens == 0 or other.source.gens == 0 or self.source.gens == 0:
            return GroupHom(other.source, self.target,
                            zeros(self.target.gens, other.source.gens))
        return GroupHom(other.source, self.target, mat_mul(self.matrix, other.matrix))

    def add(self, other):
        return GroupHom(self.source, self.target, mat_add(self.matrix, other.matrix))

    def sub(self, other):
        return GroupHom(self.source, self.target, mat_sub(self.matrix, other.matrix))

    def equals(self, other):
        """Equality as maps of presented groups (mod target relations)."""
        if self.source.gens != other.source.gens or self.target.gens != other.target.gens:
            return False
        lat = self.target._rel_lattice
        diff = mat_sub(self.matrix, other.matrix)
        return all(lat.contains(col) for col in columns(diff))

    def is_zero(self):
        lat = self.target._rel_lattice
        return all(lat.contains(col) for col in columns(self.matrix))

    @cached_property
    def kernel_group(self):
        """(group, lifts): kernel as FgAbGroup plus generator lifts in the source."""
        lat = Lattice(self.source.gens, kernel_lattice_columns(self))
        basis = lat.basis
        rels = []
        for r in self.source.relations:
            coords = lat.coordinates(r)
            if coords is None:
                raise ArithmeticError("source relations escape the kernel lattice")
            rels.append(coords)
        return FgAbGroup(len(basis), rels), basis

    @cached_property
    def cokernel_group(self):
        return self.target.quotient(columns(self.matrix))

    @cached_property
    def image_group(self):
        """The image as an abstract group (sub of target)."""
        total = Lattice(self.target.gens,
                        columns(self.matrix) + self.target.relations)
        sub = Lattice(self.target.gens, self.target.relations)
        return lattice_quotient(total, sub)

    def is_iso(self):
        return (self.is_well_defined() and self.kernel_group[0].is_zero()
                and self.cokernel_group.is_zero())

    def __repr__(self):
        return "GroupHom(%s -> %s)" % (self.source.describe(), self.target.describe())


def zero_hom(source, target):
    return GroupHom(source, target, zeros(target.gens, source.gens))


def identity_hom(group):
    return GroupHom(group, group, identity(group.gens))


def kernel_lattice_columns(hom):
    """Basis of {x in Z^src : hom(x) = 0 in target}."""
    if hom.target.gens == 0:
        return columns(identity(hom.source.gens))
    return preimage_lattice(hom.matrix, hom.target._rel_lattice)


def lattice_quotient(big, small):
    """The group big/small for nested lattices small <= big in Z^n."""
    if not big.contains_lattice(small):
        raise ValueError("quotient of non-nested lattices")
    rels = []
    for c in small.basis:
        rels.append(big.coordinates(c))
    return FgAbGroup(len(big.basis), rels)


def hom_power(h, k):
    out = identity_hom(h.source)
    for _ in range(k):
        out = h.compose(out)
    return out


# ---------------------------------------------------------------------------
# Hom / Ext / tensor of presented groups


def _relation_basis(group):
    """A lattice basis of the relation lattice, as a matrix (gens x s)."""
    basis = group._rel_lattice.basis
    return from_columns(basis, rows=group.gens) if basis else zeros(group.gens, 0)


def hom_ab(a, b):
    """Hom(a, b) with explicit representatives.

    Returns ``(group, reps)`` where ``reps[i]`` is a GroupHom generating the
    i-th generator of the Hom group.
    """
    m, n = a.gens, b.gens
    unknowns = n * m  # X[i][k] -> index i*m + k
    constraint_rows = []
    for rel in a.relations:
        # (X * rel)_i must lie in the relation lattice of b
        for i in range(n):
            row = [0] * unknowns
            for k in range(m):
                if rel[k]:
                    row[i * m + k] = rel[k]
            constraint_rows.append(row)
    nrel = len(a.relations)
    if constraint_rows:
        big = Lattice(n * nrel, [
            _embed_block(col, blk, n, nrel)
            for blk in range(nrel) for col in _lattice_cols(b)
        ])
        sol_cols = preimage_lattice(constraint_rows, big)
    else:
        sol_cols = columns(identity(unknowns))
    trivial = []
    for rel in b._rel_lattice.basis:
        for k in range(m):
            col = [0] * unknowns
            for i in range(n):
                col[i * m + k] = rel[i]
            trivial.append(col)
    sol = Lattice(unknowns, sol_cols)
    rels = [sol.coordinates(t) for t in trivial]
    if any(r is None for r in rels):
        raise ArithmeticError("trivial homomorphisms escape the solution lattice")
    group = FgAbGroup(len(sol.basis), rels)
    reps = []
    for c in sol.basis:
        mat = [[c[i * m + k] for k in range(m)] for i in range(n)]
        reps.append(GroupHom(a, b, mat))
    return group, reps


def _lattice_cols(group):
    return group._rel_lattice.basis or []


def _embed_block(col, block, n, nblocks):
    out = [0] * (n * nblocks)
    out[block * n:(block + 1) * n] = col
    return out


def ext1_ab(a, b):
    """Ext^1(a, b) from the two-step free resolution 0 -> Z^s -> Z^m -> a."""
    rel = _relation_basis(a)          # m x s
    m, s = shape(rel)
    n = b.gens
    gens = n * s                      # element: Z^s -> b; index j*n + i
    relators = []
    for j in range(s):
        for col in b.relations:
            out = [0] * gens
            out[j * n:(j + 1) * n] = col
            relators.append(out)
    # image of precomposition Hom(Z^m, b) -> Hom(Z^s, b)
    for k in range(m):
        for i in range(n):
            out = [0] * gens
            for j in range(s):
                if rel[k][j]:
                    out[j * n + i] = rel[k][j]
            relators.append(out)
    return FgAbGroup(gens, relators)


def tensor_ab(a, b):
    """a (x) b presented on generator pairs.

    Returns ``(group, pair_index)`` with ``pair_index(i, j)`` giving the
    generator index of a_i (x) b_j.
    """
    m, n = a.gens, b.gens

    def pair_index(i, j):
        return i * n + j

    relators = []
    for col in a.relations:
        for j in range(n):
            out = [0] * (m * n)
            for i in range(m):
                if col[i]:
                    out[pair_index(i, j)] = col[i]
            relators.append(out)
    for col in b.relations:
        for i in range(m):
            out = [0] * (m * n)
            for j in range(n):
                if col[j]:
                    out[pair_index(i, j)] = col[j]
            relators.append(out)
    return FgAbGroup(m * n, relators), pair_index


def tensor_hom(f, g, src_pair, tgt_pair, source, target):
    """The map f (x) g between already-built tensor groups."""
    fm, fn = shape(f.matrix)
    gm, gn = shape(g.matrix)
    mat = zeros(target.gens, source.gens)
    for i in range(fn):
        for j in range(gn):
            cidx = src_pair(i, j)
            for k in range(fm):
                v = f.matrix[k][i]
                if not v:
                    continue
                for l in range(gm):
                    w = g.matrix[l][j]
                    if w:
                        mat[tgt_pair(k, l)][cidx] += v * w
    return GroupHom(source, target, mat)


def dual_hom_free(f, src_dual_basis, tgt_dual_basis):
    """Dual of f on free parts: Hom(target,Z) -> Hom(source,Z).

    ``src_dual_basis``/``tgt_dual_basis`` are lattice bases (lists of columns)
    of the dual lattices {phi : phi . rels = 0} of source and target.
    """
    src_lat = Lattice(len(f.matrix[0]) if f.matrix else f.source.gens, src_dual_basis)
    cols_out = []
    for phi in tgt_dual_basis:
        # phi . f as a row on source generators
        row = mat_apply(transpose(f.matrix), phi)
        coords = src_lat.coordinates(row)
        if coords is None:
            raise ArithmeticError("dual functional escapes the dual lattice")
        cols_out.append(coords)
    return cols_out


# ---------------------------------------------------------------------------
# chain complexes of presented groups


class AbComplex:
    """A bounded chain complex of FgAbGroups.

    ``terms[i]`` is the group in degree ``lo + i``; ``diffs[i]`` maps
    ``terms[i]`` to ``terms[i-1]``.
    """

    def __init__(self, lo, terms, diffs):
        if len(diffs) != max(len(terms) - 1, 0):
            raise ValueError("need exactly one differential per adjacent pair")
        self.lo = lo
        self.terms = list(terms)
        self.diffs = list(diffs)

    @property
    def hi(self):
        return self.lo + len(self.terms) - 1

    def term(self, degree):
        i = degree - self.lo
        if 0 <= i < len(self.terms):
            return self.terms[i]
        return ZERO_GROUP

    def diff(self, degree):
        """The differential out of ``degree`` (degree -> degree-1)."""
        i = degree - self.lo
        if 1 <= i < len(self.terms):
            return self.diffs[i - 1]
        return None

    def check(self):
        for h in self.diffs:
            if not h.is_well_defined():
                raise ValueError("differential is not well defined")
        for i in range(1, len(self.diffs)):
            if not self.diffs[i - 1].compose(self.diffs[i]).is_zero():
                raise ValueError("d o d != 0 at degree %d" % (self.lo + i + 1))


class HomologyDegree:
    """Homology in one degree, reduced to a canonical presentation.

    ``group`` is presented on few generators (one per nontrivial canonical
    summand); ``lifts`` are ambient cycle representatives for them, and
    ``express`` maps any ambient cycle to its coordinates.
    """

    __slots__ = ("group", "lifts", "_express")

    def __init__(self, group, lifts, express):
        self.group = group
        self.lifts = lifts
        self._express = express

    def express(self, cycle):
        """Coordinates of an ambient cycle in the reduced presentation."""
        return self._express(cycle)


def _reduce_presentation(gens, rel_cols, raw_lifts, raw_express):
    """Canonicalize Z^gens / rel_cols and rebase lifts and expression."""
    mat = from_columns(rel_cols, rows=gens) if rel_cols else zeros(gens, 0)
    snf = smith_normal_form(mat, want_V=False, want_Vinv=False)
    keep = []
    diag = []
    for i in range(gens):
        d = snf.d[i] if i < snf.rank else 0
        if d != 1:
            keep.append(i)
            diag.append(d)
    rels = []
    for j, d in enumerate(diag):
        if d:
            col = [0] * len(keep)
            col[j] = d
            rels.append(col)
    group = FgAbGroup(len(keep), rels)
    lifts = []
    for i in keep:
        old = [snf.Uinv[r][i] for r in range(gens)]
        amb = [0] * (len(raw_lifts[0]) if raw_lifts else 0)
        for r, c in enumerate(old):
            if c:
                vec = raw_lifts[r]
                for t, v in enumerate(vec):
                    if v:
                        amb[t] += c * v
        lifts.append(amb)

    u_rows = [snf.U[i] for i in keep]

    def express(z):
        raw = raw_express(z)
        return [sum(row[t] * raw[t] for t in range(gens) if raw[t])
                for row in u_rows]

    return HomologyDegree(group, lifts, express)


def homology_ab(complex_, check=True):
    """Homology of an AbComplex, degree by degree.

    Returns ``{degree: HomologyDegree}``.  With ``check`` the complex is
    validated first (d well defined, d o d = 0).  Complexes of free groups
    take a fast path sharing one Smith form per differential.
    """
    if check:
        complex_.check()
    if all(not t.relations for t in complex_.terms):
        return _homology_free(complex_)
    out = {}
    for degree in range(complex_.lo, complex_.hi + 1):
        term = complex_.term(degree)
        d_out = complex_.diff(degree)
        d_in = complex_.diff(degree + 1)
        if d_out is not None:
            cycle_cols = kernel_lattice_columns(d_out)
        else:
            cycle_cols = columns(identity(term.gens))
        cycles = Lattice(term.gens, cycle_cols)
        boundary_cols = list(term.relations)
        if d_in is not None:
            boundary_cols += columns(d_in.matrix)
        rels = []
        for c in boundary_cols:
            coords = cycles.coordinates(c)
            if coords is None:
                raise ArithmeticError("boundary is not a cycle at degree %d" % degree)
            rels.append(coords)

        def raw_express(z, cycles=cycles):
            coords = cycles.coordinates(z)
            if coords is None:
                raise ArithmeticError("vector is not a cycle")
            return coords

        out[degree] = _reduce_presentation(len(cycles.basis), rels,
                                           list(cycles.basis), raw_express)
    return out


def _homology_free(complex_):
    """Fast path for complexes of free groups.

    One Smith form per differential: V columns past the rank form the
    cycle basis and the tail rows of Vinv express any cycle in it; the
    boundary relations are the tail of Vinv times the incoming
    differential, computed by one sparse product.
    """
    snfs = {}
    for degree in range(complex_.lo + 1, complex_.hi + 1):
        d = complex_.diff(degree)
        mat = d.matrix if d.target.gens else zeros(1, d.source.gens)
        snfs[degree] = smith_normal_form(mat, want_U=False, want_Uinv=False)
    out = {}
    for degree in range(complex_.lo, complex_.hi + 1):
        term = complex_.term(degree)
        n = term.gens
        snf = snfs.get(degree)
        if snf is not None:
            rank = snf.rank
            vinv_head = snf.Vinv[:rank]
            vinv_tail = snf.Vinv[rank:]
            vcols = columns(snf.V)
            cycle_lifts = vcols[rank:]
        else:
            rank = 0
            vinv_head = []
            vinv_tail = identity(n)
            cycle_lifts = columns(identity(n))
        g = n - rank

        def raw_express(z, vinv_head=vinv_head, vinv_tail=vinv_tail):
            supp = [t for t, v in enumerate(z) if v]
            for row in vinv_head:
                if sum(row[t] * z[t] for t in supp):
                    raise ArithmeticError("vector is not a cycle")
            return [sum(row[t] * z[t] for t in supp) for row in vinv_tail]

        rel_cols = []
        d_in = complex_.diff(degree + 1)
        if d_in is not None:
            rel_cols = _sparse_product_tail(vinv_head, vinv_tail,
                                            d_in.matrix, n)
        out[degree] = _reduce_presentation(g, rel_cols, cycle_lifts, raw_express)
    return out


def _sparse_product_tail(vinv_head, vinv_tail, mat, n):
    """Columns of (Vinv . mat) below the head block, mat taken sparsely.

    The head coordinates vanish because boundaries are cycles (d o d = 0
    is verified before homology); only the tail is materialized.
    """
    g = len(vinv_tail)
    tail_cols = [[row[t] for row in vinv_tail] for t in range(n)] if g else []
    cols = []
    m_rows = len(mat)
    for j in range(len(mat[0]) if mat else 0):
        acc = [0] * g
        for r in range(m_rows):
            v = mat[r][j]
            if not v:
                continue
            colv = tail_cols[r]
            if v == 1:
                acc = [a + b for a, b in zip(acc, colv)]
            elif v == -1:
                acc = [a - b for a, b in zip(acc, colv)]
            else:
                acc = [a + v * b for a, b in zip(acc, colv)]
        cols.append(acc)
    return cols


def induced_map(h_src, h_tgt, chain_matrix):
    """Map on homology induced by a chain map in one degree.

    ``chain_matrix`` sends ambient generators of the source term to the
    target term and must send cycles to cycles.
    """
    cols = []
    for lift in h_src.lifts:
        img = mat_apply(chain_matrix, lift)
        cols.append(h_tgt.express(img))
    mat = from_columns(cols, rows=h_tgt.group.gens) if cols else zeros(h_tgt.group.gens, 0)
    return GroupHom(h_src.group, h_tgt.group, mat)
