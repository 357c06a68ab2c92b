"""Orbit combinatorics of C_{p^n} and the morphism calculus of Z[X]'s.

A finite G-set is a multiset of orbits G/C_{p^k}, recorded by their levels.
Equivariant homomorphisms Z[X] -> Z[Y] decompose over a basis of span
words (twist o transfer o restriction, one per double coset), and a
cohomological Mackey functor evaluates on any such morphism.  This is what
lets chain complexes of permutation modules act on arbitrary Z-modules.

Conventions: the basis of Z[G/C_{p^k}] is indexed by cosets gamma^i C_{p^k}
for 0 <= i < p^(n-k), and gamma acts by shifting the index by one.
"""

from .intlin import (
    FgAbGroup,
    GroupHom,
    Lattice,
    free_group,
    from_columns,
    identity,
    kernel_basis,
    mat_apply,
    mat_eq,
    mat_mul,
    shape as mat_shape,
    transpose,
    zeros,
    zero_hom,
)
from .mackey import MackeyFunctor, MackeyHom, TowerShape, is_cohomological


class GSet:
    """A finite C_{p^n}-set as an ordered list of orbit levels."""

    __slots__ = ("shape", "orbits", "offsets", "size")

    def __init__(self, shape, orbits):
        self.shape = shape
        self.orbits = tuple(orbits)
        if any(not (0 <= k <= shape.n) for k in self.orbits):
            raise ValueError("orbit level out of range")
        self.offsets = []
        pos = 0
        for k in self.orbits:
            self.offsets.append(pos)
            pos += shape.orbit_size(k)
        self.size = pos

    def flat(self, orbit_index, coset):
        return self.offsets[orbit_index] + coset

    def unflat(self, idx):
        for a in range(len(self.orbits) - 1, -1, -1):
            if idx >= self.offsets[a]:
                return a, idx - self.offsets[a]
        raise IndexError(idx)

    def disjoint_union(self, other):
        return GSet(self.shape, self.orbits + other.orbits)

    def __repr__(self):
        return "GSet(%s)" % (list(self.orbits),)


def point(shape):
    """The one-point G-set G/G."""
    return GSet(shape, [shape.n])


def free_orbit(shape):
    return GSet(shape, [0])


def single_orbit(shape, k):
    return GSet(shape, [k])


def gamma_matrix(gset):
    """Permutation matrix of the generator gamma on Z[X]."""
    mat = zeros(gset.size, gset.size)
    for a, k in enumerate(gset.orbits):
        size = gset.shape.orbit_size(k)
        for c in range(size):
            mat[gset.flat(a, (c + 1) % size)][gset.flat(a, c)] = 1
    return mat


def is_equivariant(gset_src, gset_tgt, mat):
    gs = gamma_matrix(gset_src)
    gt = gamma_matrix(gset_tgt)
    return mat_eq(mat_mul(mat, gs), mat_mul(gt, mat))


def gamma_shift(gset, vec, power=1):
    """Apply gamma^power to a vector in the flat basis of Z[X]."""
    out = [0] * gset.size
    for a, k in enumerate(gset.orbits):
        size = gset.shape.orbit_size(k)
        base = gset.offsets[a]
        shift = power % size
        for c in range(size):
            out[base + (c + shift) % size] = vec[base + c]
    return out


# ---------------------------------------------------------------------------
# products of orbits with explicit bijections


def orbit_product(shape, j, k):
    """G/C_{p^j} x G/C_{p^k} decomposed into standard orbits.

    Returns ``(copies, level, pair_to)`` where the product is ``copies``
    orbits of level ``level`` and ``pair_to(cj, ck) = (copy, coset)``.
    """
    hi, lo = max(j, k), min(j, k)
    copies = shape.orbit_size(hi)
    if j >= k:
        def pair_to(cj, ck):
            return (cj - ck) % copies, ck
    else:
        def pair_to(cj, ck):
            return (ck - cj) % copies, cj
    return copies, lo, pair_to


class ProductDecomposition:
    """A product X x Y with its basis bijection onto a disjoint-orbit GSet."""

    __slots__ = ("left", "right", "gset", "_blocks")

    def __init__(self, left, right):
        if left.shape != right.shape:
            raise ValueError("products need a common group")
        shape = left.shape
        self.left = left
        self.right = right
        orbits = []
        self._blocks = {}
        for a, j in enumerate(left.orbits):
            for b, k in enumerate(right.orbits):
                copies, lo, pair_to = orbit_product(shape, j, k)
                self._blocks[(a, b)] = (len(orbits), pair_to)
                orbits.extend([lo] * copies)
        self.gset = GSet(shape, orbits)

    def pair_flat(self, i_left, i_right):
        """Flat index in the decomposed basis of a pair of flat indices."""
        a, cj = self.left.unflat(i_left)
        b, ck = self.right.unflat(i_right)
        first_orbit, pair_to = self._blocks[(a, b)]
        copy, coset = pair_to(cj, ck)
        return self.gset.flat(first_orbit + copy, coset)


def product_matrix(dec_src, dec_tgt, a_mat, b_mat):
    """The matrix of a (x) b between decomposed product bases.

    ``a_mat`` maps Z[src.left] -> Z[tgt.left] and ``b_mat`` maps
    Z[src.right] -> Z[tgt.right]; rows and columns use the flattened bases
    of the product decompositions.
    """
    out = zeros(dec_tgt.gset.size, dec_src.gset.size)
    nz_a = [(r, c, v) for r, row in enumerate(a_mat)
            for c, v in enumerate(row) if v]
    nz_b = [(r, c, v) for r, row in enumerate(b_mat)
            for c, v in enumerate(row) if v]
    for ra, ca, va in nz_a:
        for rb, cb, vb in nz_b:
            out[dec_tgt.pair_flat(ra, rb)][dec_src.pair_flat(ca, cb)] += va * vb
    return out


# ---------------------------------------------------------------------------
# span words


class SpanWord:
    """Basis morphism Z[G/C_{p^j}] -> Z[G/C_{p^k}]: twisted transfer o restriction."""

    __slots__ = ("shape", "source", "target", "twist")

    def __init__(self, shape, source, target, twist):
        limit = shape.orbit_size(max(source, target))
        if not 0 <= twist < limit:
            raise ValueError("twist out of range")
        self.shape = shape
        self.source = source
        self.target = target
        self.twist = twist

    def matrix(self):
        shape = self.shape
        j, k, t = self.source, self.target, self.twist
        rows = shape.orbit_size(k)
        cols = shape.orbit_size(j)
        out = zeros(rows, cols)
        if j <= k:
            for i in range(cols):
                out[(i + t) % rows][i] += 1
        else:
            step = shape.orbit_size(j)  # p^(n-j), the row-class modulus
            for i in range(cols):
                for u in range(shape.p ** (j - k)):
                    out[(i + t + u * step) % rows][i] += 1
        return out

    def __repr__(self):
        return "SpanWord(%d -> %d, twist %d)" % (self.source, self.target, self.twist)


def span_basis(shape, j, k):
    return [SpanWord(shape, j, k, t)
            for t in range(shape.orbit_size(max(j, k)))]


def span_decompose(shape, mat, j, k):
    """Coordinates of an equivariant matrix in the span-word basis.

    Raises ValueError when the matrix is not equivariant.
    """
    rows, cols = mat_shape(mat)
    if (rows, cols) != (shape.orbit_size(k), shape.orbit_size(j)):
        raise ValueError("matrix shape does not match the orbits")
    words = span_basis(shape, j, k)
    coeffs = [mat[w.twist][0] for w in words]
    recomposed = zeros(rows, cols)
    for c, w in zip(coeffs, words):
        if c:
            wm = w.matrix()
            for r in range(rows):
                for s in range(cols):
                    if wm[r][s]:
                        recomposed[r][s] += c * wm[r][s]
    if not mat_eq(recomposed, mat):
        raise ValueError("matrix is not equivariant")
    return coeffs


def eval_span(m, word):
    """Evaluate a cohomological Mackey functor on a span word.

    The result maps m(level target) to m(level source): contravariance.
    """
    if not is_cohomological(m):
        raise ValueError("only Z-modules extend over the Burnside Z-category")
    return _eval_span_unchecked(m, word)


def _eval_span_unchecked(m, word):
    j, k, t = word.source, word.target, word.twist
    lo = min(j, k)
    down = m.res_chain(k, lo)
    twist = m.weyl_power(lo, t)
    up = m.tr_chain(lo, j)
    return up.compose(twist.compose(down))


def eval_block(m, mat, j, k):
    """Evaluate on an equivariant matrix between single orbits."""
    coeffs = span_decompose(m.shape, mat, j, k)
    words = span_basis(m.shape, j, k)
    out = zero_hom(m.level[k], m.level[j])
    for c, w in zip(coeffs, words):
        if c:
            h = _eval_span_unchecked(m, w)
            out = out.add(GroupHom(h.source, h.target,
                                   [[c * v for v in row] for row in h.matrix]))
    return out


def gset_value(m, gset):
    """(group, offsets): the direct sum of m(level) over the orbits of a GSet."""
    gens = 0
    offsets = []
    rels = []
    for k in gset.orbits:
        offsets.append(gens)
        gens += m.level[k].gens
    for a, k in enumerate(gset.orbits):
        for col in m.level[k].relations:
            out = [0] * gens
            out[offsets[a]:offsets[a] + m.level[k].gens] = col
            rels.append(out)
    return FgAbGroup(gens, rels), offsets


def eval_gset_matrix(m, mat, gset_src, gset_tgt, value_src=None, value_tgt=None):
    """Evaluate m on an equivariant matrix Z[src] -> Z[tgt].

    Returns a GroupHom m(tgt) -> m(src) between the direct-sum groups, which
    may be passed in to keep object identity across calls.
    """
    if value_src is None:
        value_src = gset_value(m, gset_src)
    if value_tgt is None:
        value_tgt = gset_value(m, gset_tgt)
    (g_src, off_src) = value_src
    (g_tgt, off_tgt) = value_tgt
    out = zeros(g_src.gens, g_tgt.gens)
    for a, j in enumerate(gset_src.orbits):
        ra = gset_src.offsets[a]
        na = gset_src.shape.orbit_size(j)
        for b, k in enumerate(gset_tgt.orbits):
            rb = gset_tgt.offsets[b]
            nb = gset_tgt.shape.orbit_size(k)
            block = [row[ra:ra + na] for row in mat[rb:rb + nb]]
            if all(v == 0 for row in block for v in row):
                continue
            h = eval_block(m, block, j, k)
            for r in range(m.level[j].gens):
                for c in range(m.level[k].gens):
                    v = h.matrix[r][c]
                    if v:
                        out[off_src[a] + r][off_tgt[b] + c] = v
    return GroupHom(g_tgt, g_src, out)


def eval_module(m, morphism, source=None, target=None):
    """Evaluate a cohomological functor on a SpanWord or equivariant matrix."""
    if isinstance(morphism, SpanWord):
        return eval_span(m, morphism)
    if source is None or target is None:
        raise ValueError("matrix evaluation needs source and target GSets")
    if not is_cohomological(m):
        raise ValueError("only Z-modules extend over the Burnside Z-category")
    return eval_gset_matrix(m, morphism, source, target)


# ---------------------------------------------------------------------------
# lifts M_X and their functoriality


def _orbit_span_matrices(shape, k):
    """(res, tr, weyl) span matrices for the orbit pair (k, k+1)."""
    res = SpanWord(shape, k, k + 1, 0).matrix()        # Z[G/C_k] -> Z[G/C_{k+1}]
    tr = SpanWord(shape, k + 1, k, 0).matrix()         # Z[G/C_{k+1}] -> Z[G/C_k]
    return res, tr


def lift(m, x):
    """The lift Mackey functor M_X with M_X(level) = M(orbit x X).

    Stores the product decompositions on the result as ``decompositions``
    so chain-level transports can reuse the same bases.
    """
    if not is_cohomological(m):
        raise ValueError("lifts of non-cohomological functors are out of scope")
    shape = m.shape
    decs = [ProductDecomposition(single_orbit(shape, k), x)
            for k in range(shape.n + 1)]
    values = [gset_value(m, d.gset) for d in decs]
    levels = [v[0] for v in values]
    res = []
    tr = []
    for k in range(shape.n):
        res_mat, tr_mat = _orbit_span_matrices(shape, k)
        ident = identity(x.size)
        prod_res = product_matrix(decs[k], decs[k + 1], res_mat, ident)
        prod_tr = product_matrix(decs[k + 1], decs[k], tr_mat, ident)
        res.append(eval_gset_matrix(m, prod_res, decs[k].gset, decs[k + 1].gset,
                                    values[k], values[k + 1]))
        tr.append(eval_gset_matrix(m, prod_tr, decs[k + 1].gset, decs[k].gset,
                                   values[k + 1], values[k]))
    weyl = []
    for k in range(shape.n + 1):
        gmat = gamma_matrix(single_orbit(shape, k))
        prod = product_matrix(decs[k], decs[k], gmat, identity(x.size))
        weyl.append(eval_gset_matrix(m, prod, decs[k].gset, decs[k].gset,
                                     values[k], values[k]))
    out = MackeyFunctor(shape, levels, res, tr, weyl)
    out.decompositions = decs
    out.lift_of = x
    return out


def lift_hom(m, mat, x_src, x_tgt, lifted_src=None, lifted_tgt=None):
    """The MackeyHom lift(m, x_tgt) -> lift(m, x_src) induced by mat.

    ``mat`` is an equivariant matrix Z[x_src] -> Z[x_tgt]; contravariance of
    m turns it around.
    """
    if lifted_src is None:
        lifted_src = lift(m, x_src)
    if lifted_tgt is None:
        lifted_tgt = lift(m, x_tgt)
    shape = m.shape
    maps = []
    for k in range(shape.n + 1):
        dsrc = lifted_src.decompositions[k]
        dtgt = lifted_tgt.decompositions[k]
        prod = product_matrix(dsrc, dtgt, identity(shape.orbit_size(k)), mat)
        h = eval_gset_matrix(m, prod, dsrc.gset, dtgt.gset)
        maps.append(GroupHom(lifted_tgt.level[k], lifted_src.level[k], h.matrix))
    return MackeyHom(lifted_tgt, lifted_src, maps)


# ---------------------------------------------------------------------------
# fixed-point, permutation and orbit functors


def _power_matrix(mat, e):
    out = identity(len(mat))
    for _ in range(e):
        out = mat_mul(mat, out)
    return out


def fixed_point_functor(shape, gamma):
    """Fixed points of an integer G-module given by the matrix of gamma."""
    rank = len(gamma)
    if not mat_eq(_power_matrix(gamma, shape.p ** shape.n), identity(rank)):
        raise ValueError("gamma does not have order dividing p^n")
    bases = []
    lattices = []
    for k in range(shape.n + 1):
        power = _power_matrix(gamma, shape.p ** (shape.n - k))
        diff = [[power[i][j] - (1 if i == j else 0) for j in range(rank)]
                for i in range(rank)]
        basis = kernel_basis(diff)
        bases.append(basis)
        lattices.append(Lattice(rank, basis))
    groups = [free_group(len(b)) for b in bases]

    def express(vec, k):
        coords = lattices[k].coordinates(vec)
        if coords is None:
            raise ArithmeticError("vector is not fixed at level %d" % k)
        return coords

    res = []
    tr = []
    for k in range(shape.n):
        res_cols = [express(v, k) for v in bases[k + 1]]
        res.append(GroupHom(groups[k + 1], groups[k],
                            from_columns(res_cols, rows=groups[k].gens)
                            if res_cols else zeros(groups[k].gens, 0)))
        step = shape.subgroup_step(k)
        summed = zeros(rank, rank)
        for i in range(shape.p):
            power = _power_matrix(gamma, i * step)
            for r in range(rank):
                for c in range(rank):
                    summed[r][c] += power[r][c]
        tr_cols = [express(mat_apply(summed, v), k + 1) for v in bases[k]]
        tr.append(GroupHom(groups[k], groups[k + 1],
                           from_columns(tr_cols, rows=groups[k + 1].gens)
                           if tr_cols else zeros(groups[k + 1].gens, 0)))
    weyl = []
    for k in range(shape.n + 1):
        cols = [express(mat_apply(gamma, v), k) for v in bases[k]]
        weyl.append(GroupHom(groups[k], groups[k],
                             from_columns(cols, rows=groups[k].gens)
                             if cols else zeros(groups[k].gens, 0)))
    out = MackeyFunctor(shape, groups, res, tr, weyl)
    out.fixed_bases = bases
    return out


def sign_module_functor(shape):
    if shape.p != 2:
        raise ValueError("the sign module exists only for p = 2")
    return fixed_point_functor(shape, [[-1]])


def orbit_functor(shape, gamma):
    """Orbits of an integer G-module: transfers project, restrictions sum."""
    rank = len(gamma)
    if not mat_eq(_power_matrix(gamma, shape.p ** shape.n), identity(rank)):
        raise ValueError("gamma does not have order dividing p^n")
    groups = []
    for k in range(shape.n + 1):
        power = _power_matrix(gamma, shape.p ** (shape.n - k))
        rels = []
        for j in range(rank):
            col = [power[i][j] - (1 if i == j else 0) for i in range(rank)]
            rels.append(col)
        groups.append(FgAbGroup(rank, rels))
    res = []
    tr = []
    for k in range(shape.n):
        step = shape.subgroup_step(k)
        summed = zeros(rank, rank)
        for i in range(shape.p):
            power = _power_matrix(gamma, i * step)
            for r in range(rank):
                for c in range(rank):
                    summed[r][c] += power[r][c]
        res.append(GroupHom(groups[k + 1], groups[k], summed))
        tr.append(GroupHom(groups[k], groups[k + 1], identity(rank)))
    weyl = [GroupHom(groups[k], groups[k], gamma) for k in range(shape.n + 1)]
    return MackeyFunctor(shape, groups, res, tr, weyl)


class PermFunctor(MackeyFunctor):
    """Fixed-point functor of Z[X] on the explicit orbit-sum bases.

    Basis vectors are stored by their supports (each is an indicator sum
    over part of an orbit), which keeps expressing ambient vectors linear
    in the ambient size.
    """

    def __init__(self, shape, gset):
        self.gset = gset
        supports = []
        reps = []
        owners = []
        for lev in range(shape.n + 1):
            level_sup = []
            level_reps = []
            owner = [0] * gset.size
            for a, k in enumerate(gset.orbits):
                size = shape.orbit_size(k)
                nsum = min(size, shape.orbit_size(lev))
                block = size // nsum
                for c in range(nsum):
                    sup = [gset.flat(a, (c + u * nsum) % size)
                           for u in range(block)]
                    for pos in sup:
                        owner[pos] = len(level_sup)
                    level_sup.append(sup)
                    level_reps.append(gset.flat(a, c))
            supports.append(level_sup)
            reps.append(level_reps)
            owners.append(owner)
        self.supports = supports
        self._reps = reps
        self._owner = owners
        groups = [free_group(len(b)) for b in supports]

        # index bases: vec (orbit a, class c) at level lev has support
        # {c + u * nsum} in the orbit, nsum = min(orbit size, p^(n-lev))
        starts = []
        nsums = []
        for lev in range(shape.n + 1):
            level_starts = []
            level_nsums = []
            pos = 0
            for a, k in enumerate(gset.orbits):
                size = shape.orbit_size(k)
                level_starts.append(pos)
                level_nsums.append(min(size, shape.orbit_size(lev)))
                pos += level_nsums[-1]
            starts.append(level_starts)
            nsums.append(level_nsums)

        res = []
        tr = []
        for k in range(shape.n):
            # a level-(k+1) sum decomposes into its level-k refinements
            mat = zeros(len(supports[k]), len(supports[k + 1]))
            for a in range(len(gset.orbits)):
                lo_n = nsums[k][a]
                hi_n = nsums[k + 1][a]
                for c in range(hi_n):
                    col = starts[k + 1][a] + c
                    for r in range(c % hi_n, lo_n, hi_n):
                        mat[starts[k][a] + r][col] += 1
            res.append(GroupHom(groups[k + 1], groups[k], mat))
            # transfer: sum the p translates by gamma^(p^(n-k-1))
            step = shape.subgroup_step(k)
            mat = zeros(len(supports[k + 1]), len(supports[k]))
            for a in range(len(gset.orbits)):
                lo_n = nsums[k][a]
                hi_n = nsums[k + 1][a]
                for c in range(lo_n):
                    col = starts[k][a] + c
                    for j in range(shape.p):
                        c2 = (c + j * step) % lo_n
                        if c2 < hi_n:
                            mat[starts[k + 1][a] + c2][col] += 1
            tr.append(GroupHom(groups[k], groups[k + 1], mat))
        weyl = []
        for k in range(shape.n + 1):
            mat = zeros(len(supports[k]), len(supports[k]))
            for a in range(len(gset.orbits)):
                lo_n = nsums[k][a]
                for c in range(lo_n):
                    mat[starts[k][a] + (c + 1) % lo_n][starts[k][a] + c] += 1
            weyl.append(GroupHom(groups[k], groups[k], mat))
        super().__init__(shape, groups, res, tr, weyl)

    def fixed_vector(self, lev, idx):
        out = [0] * self.gset.size
        for pos in self.supports[lev][idx]:
            out[pos] = 1
        return out

    @property
    def fixed_bases(self):
        return [[self.fixed_vector(lev, i) for i in range(len(sup))]
                for lev, sup in enumerate(self.supports)]

    def express_fixed(self, vec, lev):
        """Coordinates of an ambient fixed vector in the level basis."""
        coords = [vec[rep] for rep in self._reps[lev]]
        owner = self._owner[lev]
        for pos, v in enumerate(vec):
            if v != coords[owner[pos]]:
                raise ArithmeticError("vector is not fixed at level %d" % lev)
        return coords

    def ambient(self, coords, lev):
        out = [0] * self.gset.size
        for idx, c in enumerate(coords):
            if c:
                for pos in self.supports[lev][idx]:
                    out[pos] += c
        return out


def perm_functor(shape, gset):
    return PermFunctor(shape, gset)


def perm_chain_hom(src_perm, tgt_perm, sparse_cols):
    """The MackeyHom of permutation functors induced by a G-module map.

    ``sparse_cols[j]`` lists (row, value) pairs of the underlying matrix
    column for ambient basis element j of the source.
    """
    shape = src_perm.shape
    maps = []
    for lev in range(shape.n + 1):
        cols = []
        for sup in src_perm.supports[lev]:
            img = [0] * tgt_perm.gset.size
            for j in sup:
                for r, v in sparse_cols[j]:
                    img[r] += v
            cols.append(tgt_perm.express_fixed(img, lev))
        mat = (from_columns(cols, rows=tgt_perm.level[lev].gens)
               if cols else zeros(tgt_perm.level[lev].gens, 0))
        maps.append(GroupHom(src_perm.level[lev], tgt_perm.level[lev], mat))
    return MackeyHom(src_perm, tgt_perm, maps)


def sparse_columns(mat, ncols):
    """Column-sparse view [(row, value), ...] per column of a dense matrix."""
    cols = [[] for _ in range(ncols)]
    for r, row in enumerate(mat):
        for c, v in enumerate(row):
            if v:
                cols[c].append((r, v))
    return cols
