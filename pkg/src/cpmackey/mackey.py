"""Mackey functors for cyclic p-groups as Lewis-diagram towers.

A Mackey functor for G = C_{p^n} is stored as n+1 presented abelian groups
(level k is the value at the orbit G/C_{p^k}, so level 0 is G/e and level n
is G/G) together with restriction maps going down, transfer maps going up,
and the action of one globally chosen generator gamma of G at every level.
Fixing a single gamma makes the equivariance laws uniform:

    res o weyl = weyl o res,      tr o weyl = weyl o tr,
    res[k] o tr[k] = sum_{i<p} weyl[k]^(i * p^(n-k-1)),
    tr[k] o weyl[k]^(p^(n-k-1)) = tr[k],
    weyl[k]^(p^(n-k-1)) o res[k] = res[k].
"""

import json

from .intlin import (
    FgAbGroup,
    GroupHom,
    Lattice,
    block_diag,
    columns,
    free_group,
    from_columns,
    hom_power,
    identity,
    identity_hom,
    kernel_basis,
    mat_apply,
    mat_mul,
    shape as mat_shape,
    solve_integer,
    transpose,
    zero_hom,
    zeros,
)


class ResourceLimit(Exception):
    """Raised when a bounded search exceeds its configured budget."""


class TowerShape:
    """The group C_{p^n}; levels 0..n index the orbits G/C_{p^k}."""

    __slots__ = ("p", "n")

    def __init__(self, p, n):
        if n < 1:
            raise ValueError("need n >= 1")
        if p < 2 or any(p % q == 0 for q in range(2, p)):
            raise ValueError("p must be prime")
        self.p = p
        self.n = n

    @property
    def levels(self):
        return self.n + 1

    def orbit_size(self, k):
        return self.p ** (self.n - k)

    def weyl_order(self, k):
        """Order of gamma acting at level k."""
        return self.p ** (self.n - k)

    def subgroup_step(self, k):
        """Exponent s with gamma^s generating C_{p^(k+1)}/C_{p^k} at level k."""
        return self.p ** (self.n - k - 1)

    def __eq__(self, other):
        return isinstance(other, TowerShape) and (self.p, self.n) == (other.p, other.n)

    def __hash__(self):
        return hash((self.p, self.n))

    def __repr__(self):
        return "TowerShape(p=%d, n=%d)" % (self.p, self.n)


class MackeyFunctor:
    """Lewis diagram: level groups plus res/tr/weyl structure maps."""

    __slots__ = ("shape", "level", "res", "tr", "weyl", "__dict__")

    def __init__(self, shape, levels, res, tr, weyl):
        n = shape.n
        if len(levels) != n + 1 or len(res) != n or len(tr) != n or len(weyl) != n + 1:
            raise ValueError("structure data does not fit shape")
        self.shape = shape
        self.level = list(levels)
        self.res = list(res)
        self.tr = list(tr)
        self.weyl = list(weyl)

    def weyl_power(self, k, e):
        e %= self.shape.weyl_order(k)
        return hom_power(self.weyl[k], e)

    def weyl_inverse(self, k):
        return self.weyl_power(k, self.shape.weyl_order(k) - 1)

    def res_chain(self, k_from, k_to):
        """Composite restriction level k_from -> level k_to (k_to <= k_from)."""
        out = identity_hom(self.level[k_from])
        for k in range(k_from - 1, k_to - 1, -1):
            out = self.res[k].compose(out)
        return out

    def tr_chain(self, k_from, k_to):
        """Composite transfer level k_from -> level k_to (k_to >= k_from)."""
        out = identity_hom(self.level[k_from])
        for k in range(k_from, k_to):
            out = self.tr[k].compose(out)
        return out

    def validate(self):
        """All Mackey axioms as matrix identities; returns a violation list."""
        out = []
        shape = self.shape
        n = shape.n
        for k in range(n + 1):
            w = self.weyl[k]
            if w.source is not self.level[k] or w.target is not self.level[k]:
                out.append("weyl[%d] endpoints wrong" % k)
                continue
            if not w.is_well_defined():
                out.append("weyl[%d] not well defined" % k)
            if not hom_power(w, shape.weyl_order(k)).equals(identity_hom(self.level[k])):
                out.append("weyl[%d] order does not divide %d" % (k, shape.weyl_order(k)))
        if not self.weyl[n].equals(identity_hom(self.level[n])):
            out.append("weyl[top] != identity")
        for k in range(n):
            r, t = self.res[k], self.tr[k]
            if not r.is_well_defined():
                out.append("res[%d] not well defined" % k)
            if not t.is_well_defined():
                out.append("tr[%d] not well defined" % k)
            if not r.compose(self.weyl[k + 1]).equals(self.weyl[k].compose(r)):
                out.append("res[%d] does not commute with weyl" % k)
            if not t.compose(self.weyl[k]).equals(self.weyl[k + 1].compose(t)):
                out.append("tr[%d] does not commute with weyl" % k)
            s = shape.subgroup_step(k)
            total = zero_hom(self.level[k], self.level[k])
            for i in range(shape.p):
                total = total.add(self.weyl_power(k, i * s))
            if not r.compose(t).equals(total):
                out.append("res[%d] o tr[%d] != double-coset sum" % (k, k))
            tw = self.weyl_power(k, s)
            if not t.compose(tw).equals(t):
                out.append("tr[%d] not invariant under inner twist" % k)
            if not self.weyl_power(k, s).compose(r).equals(r):
                out.append("res[%d] not invariant under inner twist" % k)
        return out

    def is_valid(self):
        return not self.validate()

    def __repr__(self):
        return "MackeyFunctor(%s, [%s])" % (
            self.shape, ", ".join(g.describe() for g in reversed(self.level)))


class MackeyHom:
    """Levelwise homomorphism commuting with res, tr and weyl."""

    __slots__ = ("source", "target", "maps")

    def __init__(self, source, target, maps):
        if source.shape != target.shape:
            raise ValueError("source and target live over different groups")
        if len(maps) != source.shape.n + 1:
            raise ValueError("need one map per level")
        self.source = source
        self.target = target
        self.maps = list(maps)

    def validate(self):
        out = []
        n = self.source.shape.n
        for k in range(n + 1):
            f = self.maps[k]
            if not f.is_well_defined():
                out.append("level %d map not well defined" % k)
            if not f.compose(self.source.weyl[k]).equals(self.target.weyl[k].compose(f)):
                out.append("level %d map does not commute with weyl" % k)
        for k in range(n):
            if not self.maps[k].compose(self.source.res[k]).equals(
                    self.target.res[k].compose(self.maps[k + 1])):
                out.append("map does not commute with res[%d]" % k)
            if not self.maps[k + 1].compose(self.source.tr[k]).equals(
                    self.target.tr[k].compose(self.maps[k])):
                out.append("map does not commute with tr[%d]" % k)
        return out

    def is_valid(self):
        return not self.validate()

    def compose(self, other):
        return MackeyHom(other.source, self.target,
                         [f.compose(g) for f, g in zip(self.maps, other.maps)])

    def add(self, other):
        return MackeyHom(self.source, self.target,
                         [f.add(g) for f, g in zip(self.maps, other.maps)])

    def sub(self, other):
        return MackeyHom(self.source, self.target,
                         [f.sub(g) for f, g in zip(self.maps, other.maps)])

    def is_zero(self):
        return all(f.is_zero() for f in self.maps)

    def equals(self, other):
        return all(f.equals(g) for f, g in zip(self.maps, other.maps))


def identity_mackey_hom(m):
    return MackeyHom(m, m, [identity_hom(g) for g in m.level])


def zero_mackey_hom(m, n_):
    return MackeyHom(m, n_, [zero_hom(a, b) for a, b in zip(m.level, n_.level)])


# ---------------------------------------------------------------------------
# catalog of named functors


def zero_functor(shape):
    z = FgAbGroup(0)
    return MackeyFunctor(shape, [z] * (shape.n + 1),
                         [zero_hom(z, z)] * shape.n,
                         [zero_hom(z, z)] * shape.n,
                         [zero_hom(z, z)] * (shape.n + 1))


def form_z(shape, ts):
    """The form of Z with Res from level i to i-1 equal to p^{ts[i-1]}.

    ``ts`` lists t_1..t_n, so ts[k] controls the restriction res[k] between
    levels k+1 and k: res = p^{ts[k]}, tr = p^{1-ts[k]}.
    """
    ts = tuple(ts)
    if len(ts) != shape.n or any(t not in (0, 1) for t in ts):
        raise ValueError("need a 0/1 vector of length n")
    z = free_group(1)
    levels = [z] * (shape.n + 1)
    res = []
    tr = []
    for k in range(shape.n):
        res.append(GroupHom(z, z, [[shape.p ** ts[k]]]))
        tr.append(GroupHom(z, z, [[shape.p ** (1 - ts[k])]]))
    weyl = [identity_hom(z) for _ in range(shape.n + 1)]
    return MackeyFunctor(shape, levels, res, tr, weyl)


def constant_z(shape):
    return form_z(shape, (0,) * shape.n)


def z_star(shape):
    return form_z(shape, (1,) * shape.n)


def form_to_constant_hom(shape, ts):
    """The map form_z(ts) -> Z that is an isomorphism at level 0."""
    src = form_z(shape, ts)
    tgt = constant_z(shape)
    maps = []
    e = 0
    for k in range(shape.n + 1):
        maps.append(GroupHom(src.level[k], tgt.level[k], [[shape.p ** e]]))
        if k < shape.n:
            e += ts[k]
    return MackeyHom(src, tgt, maps)


def bform(shape, ts):
    """B_{t_1..t_n}: the cokernel of form_z(ts) -> Z (iso at level 0)."""
    return cokernel_m(form_to_constant_hom(shape, tuple(ts)))


def catalog(shape, name, params=None):
    """Named functor dispatch used by the CLI and the test corpus."""
    from . import burnside

    if name == "zero":
        return zero_functor(shape)
    if name == "form_Z":
        return form_z(shape, params)
    if name == "B":
        return bform(shape, params)
    if name == "fixed_point":
        return burnside.fixed_point_functor(shape, params)
    if name == "orbit":
        return burnside.orbit_functor(shape, params)
    if name == "perm":
        return burnside.perm_functor(shape, burnside.GSet(shape, params))
    if name == "sign":
        if shape.p != 2:
            raise ValueError("the signed module exists only for p = 2")
        return burnside.fixed_point_functor(shape, [[-1]])
    raise ValueError("unknown catalog name %r" % (name,))


# ---------------------------------------------------------------------------
# abelian-category operations, levelwise


def direct_sum_m(m, n_):
    if m.shape != n_.shape:
        raise ValueError("direct sum over different shapes")
    levels = []
    for a, b in zip(m.level, n_.level):
        rels = ([r + [0] * b.gens for r in _rel_cols(a)] +
                [[0] * a.gens + r for r in _rel_cols(b)])
        levels.append(FgAbGroup(a.gens + b.gens, rels))

    def block_hom(fa, fb, src, tgt):
        mat = zeros(tgt.gens, src.gens)
        for i in range(fa.target.gens):
            for j in range(fa.source.gens):
                mat[i][j] = fa.matrix[i][j]
        ro, co = fa.target.gens, fa.source.gens
        for i in range(fb.target.gens):
            for j in range(fb.source.gens):
                mat[ro + i][co + j] = fb.matrix[i][j]
        return GroupHom(src, tgt, mat)

    res = [block_hom(m.res[k], n_.res[k], levels[k + 1], levels[k])
           for k in range(m.shape.n)]
    tr = [block_hom(m.tr[k], n_.tr[k], levels[k], levels[k + 1])
          for k in range(m.shape.n)]
    weyl = [block_hom(m.weyl[k], n_.weyl[k], levels[k], levels[k])
            for k in range(m.shape.n + 1)]
    return MackeyFunctor(m.shape, levels, res, tr, weyl)


def _rel_cols(group):
    return [list(c) for c in group.relations]


def kernel_m(f):
    """Levelwise kernel of a MackeyHom, with induced structure maps."""
    kernels = [f.maps[k].kernel_group for k in range(f.source.shape.n + 1)]
    groups = [k[0] for k in kernels]
    lattices = [Lattice(f.source.level[k].gens, kernels[k][1])
                for k in range(len(kernels))]

    def induce(ambient_hom, src_idx, tgt_idx):
        cols = []
        for lift in kernels[src_idx][1]:
            img = ambient_hom.apply(lift)
            coords = lattices[tgt_idx].coordinates(img)
            if coords is None:
                raise ArithmeticError("kernel not preserved by structure map")
            cols.append(coords)
        mat = (from_columns(cols, rows=groups[tgt_idx].gens)
               if cols else zeros(groups[tgt_idx].gens, 0))
        return GroupHom(groups[src_idx], groups[tgt_idx], mat)

    n = f.source.shape.n
    res = [induce(f.source.res[k], k + 1, k) for k in range(n)]
    tr = [induce(f.source.tr[k], k, k + 1) for k in range(n)]
    weyl = [induce(f.source.weyl[k], k, k) for k in range(n + 1)]
    out = MackeyFunctor(f.source.shape, groups, res, tr, weyl)
    out.kernel_lifts = [kernels[k][1] for k in range(n + 1)]
    return out


def cokernel_m(f):
    """Levelwise cokernel; generators are those of the target."""
    groups = [f.maps[k].cokernel_group for k in range(f.source.shape.n + 1)]

    def onto(h, src, tgt):
        return GroupHom(src, tgt, h.matrix)

    n = f.source.shape.n
    res = [onto(f.target.res[k], groups[k + 1], groups[k]) for k in range(n)]
    tr = [onto(f.target.tr[k], groups[k], groups[k + 1]) for k in range(n)]
    weyl = [onto(f.target.weyl[k], groups[k], groups[k]) for k in range(n + 1)]
    return MackeyFunctor(f.source.shape, groups, res, tr, weyl)


def image_m(f):
    """The image subfunctor of a MackeyHom, as an abstract Mackey functor."""
    n = f.source.shape.n
    lattices = []
    for k in range(n + 1):
        lat = Lattice(f.target.level[k].gens,
                      columns(f.maps[k].matrix) + _rel_cols(f.target.level[k]))
        lattices.append(lat)
    return _subfunctor_from_lattices(f.target, lattices)


def _subfunctor_from_lattices(ambient, lattices):
    groups = []
    for k, lat in enumerate(lattices):
        rels = []
        for r in _rel_cols(ambient.level[k]):
            coords = lat.coordinates(r)
            if coords is None:
                raise ArithmeticError("ambient relations escape the sublattice")
            rels.append(coords)
        groups.append(FgAbGroup(len(lat.basis), rels))

    def induce(h, src_idx, tgt_idx):
        cols = []
        for lift in lattices[src_idx].basis:
            coords = lattices[tgt_idx].coordinates(h.apply(lift))
            if coords is None:
                raise ArithmeticError("sublattices not preserved by structure map")
            cols.append(coords)
        mat = (from_columns(cols, rows=groups[tgt_idx].gens)
               if cols else zeros(groups[tgt_idx].gens, 0))
        return GroupHom(groups[src_idx], groups[tgt_idx], mat)

    n = ambient.shape.n
    return MackeyFunctor(
        ambient.shape, groups,
        [induce(ambient.res[k], k + 1, k) for k in range(n)],
        [induce(ambient.tr[k], k, k + 1) for k in range(n)],
        [induce(ambient.weyl[k], k, k) for k in range(n + 1)])


def subfunctor_generated(m, elements):
    """Smallest subfunctor containing the given (level, vector) elements.

    Closure under res, tr and weyl is computed by iterating the structure
    maps on lattice spans until they stabilise.
    """
    n = m.shape.n
    spans = [list(_rel_cols(m.level[k])) for k in range(n + 1)]
    for k, vec in elements:
        spans[k].append(list(vec))
    lattices = [Lattice(m.level[k].gens, spans[k]) for k in range(n + 1)]
    changed = True
    while changed:
        changed = False
        moves = []
        for k in range(n):
            moves.append((k + 1, k, m.res[k]))
            moves.append((k, k + 1, m.tr[k]))
        for k in range(n + 1):
            moves.append((k, k, m.weyl[k]))
        for src, tgt, h in moves:
            extra = []
            for b in lattices[src].basis:
                img = h.apply(b)
                if not lattices[tgt].contains(img):
                    extra.append(img)
            if extra:
                lattices[tgt] = lattices[tgt].sum(extra)
                changed = True
    return lattices


def quotient_by_subfunctor(m, lattices):
    """Levelwise quotient of ``m`` by a subfunctor given as lattices."""
    groups = [m.level[k].quotient(lattices[k].basis) for k in range(m.shape.n + 1)]
    n = m.shape.n
    res = [GroupHom(groups[k + 1], groups[k], m.res[k].matrix) for k in range(n)]
    tr = [GroupHom(groups[k], groups[k + 1], m.tr[k].matrix) for k in range(n)]
    weyl = [GroupHom(groups[k], groups[k], m.weyl[k].matrix) for k in range(n + 1)]
    return MackeyFunctor(m.shape, groups, res, tr, weyl)


def is_cohomological(m):
    """Whether tr o res is multiplication by p between all adjacent levels."""
    p = m.shape.p
    for k in range(m.shape.n):
        upper = m.level[k + 1]
        mult_p = GroupHom(upper, upper, [[p * v for v in row]
                                         for row in identity(upper.gens)])
        if not m.tr[k].compose(m.res[k]).equals(mult_p):
            return False
    return True


def cohomological_quotient(m):
    """Quotient by the subfunctor generated by p*x - tr(res(x)).

    For a Z-module input the quotient map is an isomorphism; the returned
    flag records whether that held.
    """
    elements = []
    for k in range(m.shape.n):
        upper = m.level[k + 1]
        diff = [[m.shape.p * v for v in row] for row in identity(upper.gens)]
        trres = m.tr[k].compose(m.res[k]).matrix
        for j in range(upper.gens):
            col = [diff[i][j] - trres[i][j] for i in range(upper.gens)]
            if any(col):
                elements.append((k + 1, col))
    if not elements:
        return m, True
    lattices = subfunctor_generated(m, elements)
    out = quotient_by_subfunctor(m, lattices)
    was_iso = all(out.level[k].canonical == m.level[k].canonical
                  for k in range(m.shape.n + 1))
    return out, was_iso


# ---------------------------------------------------------------------------
# levelwise duals


def _dual_lattice_basis(group):
    """Basis of {phi in Z^gens : phi . r = 0 for all relators r}."""
    rels = _rel_cols(group)
    if not rels:
        return columns(identity(group.gens))
    mat = transpose(from_columns(rels, rows=group.gens))
    return kernel_basis(mat)


def _star_dual_hom(f, src_basis, tgt_basis, src_group, tgt_group):
    """Hom(-, Z) applied to f: maps tgt duals to src duals."""
    src_lat = Lattice(f.source.gens, src_basis)
    cols = []
    for phi in tgt_basis:
        row = [sum(f.matrix[i][j] * phi[i] for i in range(f.target.gens)
                   if phi[i])
               for j in range(f.source.gens)]
        coords = src_lat.coordinates(row)
        if coords is None:
            raise ArithmeticError("dual functional escapes the dual lattice")
        cols.append(coords)
    mat = from_columns(cols, rows=src_group.gens) if cols else zeros(src_group.gens, 0)
    return GroupHom(tgt_group, src_group, mat)


def _ext_dual_data(group):
    """(ext group, relation basis matrix) for Ext^1(group, Z)."""
    basis = group._rel_lattice.basis
    mat = from_columns(basis, rows=group.gens) if basis else zeros(group.gens, 0)
    s = len(basis)
    rels = columns(transpose(mat))
    return FgAbGroup(s, rels), mat


def _ext_dual_hom(f, src_data, tgt_data, src_group, tgt_group):
    """Ext^1(-, Z) applied to f: maps Ext(target) to Ext(source)."""
    src_ext, src_rel = src_data
    tgt_ext, tgt_rel = tgt_data
    s_src = src_ext.gens
    s_tgt = tgt_ext.gens
    # lift f over the relation bases: f . src_rel = tgt_rel . g
    g_cols = []
    for j in range(s_src):
        col = [sum(f.matrix[i][k] * src_rel[k][j]
                   for k in range(f.source.gens) if src_rel[k][j])
               for i in range(f.target.gens)]
        sol = solve_integer(tgt_rel, col) if f.target.gens else ([0] * s_tgt, [])
        if sol is None:
            raise ArithmeticError("homomorphism does not lift over relations")
        g_cols.append(sol[0])
    ext_mat = [[g_cols[a][b] for b in range(s_tgt)] for a in range(s_src)]
    return GroupHom(tgt_ext, src_ext, ext_mat)


def dual_levelwise(m, mode):
    """M^* (mode 'star') or M^E (mode 'E'): levelwise dual with flipped maps.

    Both modes exchange restrictions and transfers and invert the gamma
    action.
    """
    n = m.shape.n
    if mode == "star":
        bases = [_dual_lattice_basis(g) for g in m.level]
        groups = [free_group(len(b)) for b in bases]

        def dualize(f, src_idx, tgt_idx):
            return _star_dual_hom(f, bases[src_idx], bases[tgt_idx],
                                  groups[src_idx], groups[tgt_idx])
    elif mode == "E":
        data = [_ext_dual_data(g) for g in m.level]
        groups = [d[0] for d in data]

        def dualize(f, src_idx, tgt_idx):
            return _ext_dual_hom(f, data[src_idx], data[tgt_idx],
                                 groups[src_idx], groups[tgt_idx])
    else:
        raise ValueError("mode must be 'star' or 'E'")

    res = [dualize(m.tr[k], k, k + 1) for k in range(n)]
    tr = [dualize(m.res[k], k + 1, k) for k in range(n)]
    weyl = [dualize(m.weyl_inverse(k), k, k) for k in range(n + 1)]
    return MackeyFunctor(m.shape, groups, res, tr, weyl)


# ---------------------------------------------------------------------------
# pullback along the quotient map


def pullback_psi(m, k):
    """Inflate a C_{p^(n-k)} Z-module to C_{p^n} along the quotient by C_{p^k}.

    Levels >= k copy the input shifted; levels below k repeat the bottom
    level with identity restrictions and multiplication-by-p transfers.
    """
    if k == 0:
        return m
    if not is_cohomological(m):
        raise ValueError("pullback is defined on cohomological functors")
    old = m.shape
    shape = TowerShape(old.p, old.n + k)
    levels = [m.level[0]] * k + list(m.level)
    res = []
    tr = []
    weyl = [m.weyl[0]] * k + list(m.weyl)
    bottom = m.level[0]
    for j in range(k):
        res.append(identity_hom(bottom))
        tr.append(GroupHom(bottom, bottom,
                           [[old.p * v for v in row] for row in identity(bottom.gens)]))
    res += list(m.res)
    tr += list(m.tr)
    return MackeyFunctor(shape, levels, res, tr, weyl)


# ---------------------------------------------------------------------------
# fingerprints and isomorphism testing


def _map_invariants(f):
    """Iso-invariants of a map of presented groups: kernel/cokernel/image."""
    return (f.kernel_group[0].canonical, f.cokernel_group.canonical,
            f.image_group.canonical)


def fingerprint(m):
    """A computable isomorphism invariant of the whole Lewis diagram.

    Levelwise canonical forms together with kernel/cokernel/image canonical
    forms of every structure map, of both composites res o tr and tr o res,
    and of weyl - 1.  Equal for isomorphic functors.
    """
    n = m.shape.n
    levels = tuple(g.canonical for g in m.level)
    maps = []
    for k in range(n):
        maps.append(("res", k, _map_invariants(m.res[k])))
        maps.append(("tr", k, _map_invariants(m.tr[k])))
        maps.append(("res_tr", k, _map_invariants(m.res[k].compose(m.tr[k]))))
        maps.append(("tr_res", k, _map_invariants(m.tr[k].compose(m.res[k]))))
    for k in range(n + 1):
        wm1 = m.weyl[k].sub(identity_hom(m.level[k]))
        maps.append(("weyl1", k, _map_invariants(wm1)))
    return (m.shape.p, m.shape.n, levels, tuple(maps))


def fingerprint_equal(m, n_):
    return fingerprint(m) == fingerprint(n_)


def _canonical_basis(group):
    """(orders, to_canonical, from_canonical) for a presented group.

    ``orders`` lists the cyclic orders of canonical generators (0 = free);
    ``from_canonical`` columns are ambient vectors for those generators;
    ``to_canonical`` maps ambient generator vectors to canonical coords.
    """
    from .intlin import smith_normal_form

    basis = group._rel_lattice.basis
    mat = from_columns(basis, rows=group.gens) if basis else zeros(group.gens, 0)
    snf = smith_normal_form(mat)
    orders = []
    keep = []
    for i in range(group.gens):
        d = snf.d[i] if i < snf.rank else 0
        if d == 1:
            continue
        orders.append(d)
        keep.append(i)
    to_can = [snf.U[i][:] for i in keep]
    from_can = [[snf.Uinv[r][i] for i in keep] for r in range(group.gens)]
    return orders, to_can, from_can


def _elements_of_bounded(orders, bound):
    """All canonical-coordinate tuples with free coords in [-bound, bound]."""
    ranges = []
    for d in orders:
        if d == 0:
            ranges.append(range(-bound, bound + 1))
        else:
            ranges.append(range(d))
    out = [[]]
    for r in ranges:
        out = [prefix + [v] for prefix in out for v in r]
    return out


def is_isomorphic(m, n_, free_bound=2, node_budget=400000):
    """Isomorphism test: fingerprint pre-filter, then bounded search.

    The search enumerates levelwise isomorphisms in canonical coordinates,
    pruning with the structure-map commutation constraints.  Raises
    ResourceLimit when the search space exceeds the node budget; intended
    for catalog-sized functors only.
    """
    if m.shape != n_.shape:
        return False
    if fingerprint(m) != fingerprint(n_):
        return False
    levels = m.shape.n + 1
    can_m = [_canonical_basis(g) for g in m.level]
    can_n = [_canonical_basis(g) for g in n_.level]
    budget = [node_budget]

    def candidates(k):
        orders_m = can_m[k][0]
        orders_n = can_n[k][0]
        cells = _elements_of_bounded(orders_n, free_bound)
        budget[0] -= len(cells) * max(len(orders_m), 1)
        if budget[0] < 0:
            raise ResourceLimit("isomorphism search exceeded its budget")
        per_gen = []
        for d in orders_m:
            ok = []
            for coords in cells:
                # the image must be killed by d
                if d and any((d * c) % e for c, e in zip(coords, orders_n) if e):
                    continue
                if d and any(d * c for c, e in zip(coords, orders_n) if e == 0):
                    continue
                ok.append(coords)
            per_gen.append(ok)
        return per_gen

    def to_ambient_hom(k, cols):
        orders_n, _to_can_n, from_can_n = can_n[k]
        orders_m, to_can_m, _from_can_m = can_m[k]
        if not orders_m:
            return GroupHom(m.level[k], n_.level[k],
                            zeros(n_.level[k].gens, m.level[k].gens))
        # canonical-coordinate matrix -> ambient matrix
        can_mat = from_columns(cols, rows=len(orders_n))
        amb = mat_mul(from_can_n, can_mat)
        full = mat_mul(amb, to_can_m)
        return GroupHom(m.level[k], n_.level[k], full)

    chosen = [None] * levels

    def check_partial(k):
        f = chosen[k]
        if not f.is_well_defined() or not f.is_iso():
            return False
        if not f.compose(m.weyl[k]).equals(n_.weyl[k].compose(f)):
            return False
        if k + 1 < levels and chosen[k + 1] is not None:
            g = chosen[k + 1]
            if not f.compose(m.res[k]).equals(n_.res[k].compose(g)):
                return False
            if not g.compose(m.tr[k]).equals(n_.tr[k].compose(f)):
                return False
        return True

    def search(k):
        if k < 0:
            return True
        per_gen = candidates(k)
        total = 1
        for ok in per_gen:
            total *= max(len(ok), 1)
        budget[0] -= total
        if budget[0] < 0:
            raise ResourceLimit("isomorphism search exceeded its budget")

        def assign(idx, cols):
            if idx == len(per_gen):
                chosen[k] = to_ambient_hom(k, cols)
                if check_partial(k) and search(k - 1):
                    return True
                chosen[k] = None
                return False
            for coords in per_gen[idx]:
                if assign(idx + 1, cols + [coords]):
                    return True
            return False

        if not per_gen:
            chosen[k] = to_ambient_hom(k, [])
            if check_partial(k) and search(k - 1):
                return True
            chosen[k] = None
            return False
        return assign(0, [])

    return search(levels - 1)


# ---------------------------------------------------------------------------
# rendering and serialization


def render_lewis(m):
    """Text Lewis diagram, top level (G/G) first."""
    shape = m.shape
    lines = ["C_%d^%d Mackey functor" % (shape.p, shape.n)]
    for k in range(shape.n, -1, -1):
        label = "G/G" if k == shape.n else (
            "G/e" if k == 0 else "G/C_%d" % (shape.p ** k))
        weyl_part = ""
        if not m.weyl[k].equals(identity_hom(m.level[k])):
            weyl_part = "   gamma=%s" % _fmt_matrix(m.weyl[k].matrix)
        lines.append("  [%s]  %s%s" % (label, m.level[k].describe(), weyl_part))
        if k > 0:
            lines.append("      res %s   tr %s" %
                         (_fmt_matrix(m.res[k - 1].matrix),
                          _fmt_matrix(m.tr[k - 1].matrix)))
    return "\n".join(lines)


def _fmt_matrix(mat):
    m, n = mat_shape(mat)
    if m == 0 or n == 0:
        return "[]"
    return "[" + "; ".join(" ".join(str(v) for v in row) for row in mat) + "]"


def _matrix_to_json(mat):
    m, n = mat_shape(mat)
    return {"rows": m, "cols": n, "entries": [str(v) for row in mat for v in row]}


def _matrix_from_json(obj, path):
    try:
        m, n = obj["rows"], obj["cols"]
        entries = [int(v) for v in obj["entries"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError("bad matrix at %s: %s" % (path, exc))
    if len(entries) != m * n:
        raise ValueError("bad matrix at %s: %d entries for %dx%d" %
                         (path, len(entries), m, n))
    return [entries[i * n:(i + 1) * n] for i in range(m)]


def to_json(m):
    """Serialize to the stable mackey/1 schema (row-major string entries)."""
    doc = {
        "schema": "mackey/1",
        "p": m.shape.p,
        "n": m.shape.n,
        "levels": [{"gens": g.gens,
                    "relations": _matrix_to_json(from_columns(_rel_cols(g), rows=g.gens)
                                                 if g.relations else zeros(g.gens, 0))}
                   for g in m.level],
        "res": [_matrix_to_json(h.matrix) for h in m.res],
        "tr": [_matrix_to_json(h.matrix) for h in m.tr],
        "weyl": [_matrix_to_json(h.matrix) for h in m.weyl],
    }
    return doc


def from_json(doc):
    """Parse and validate a mackey/1 document."""
    if doc.get("schema") != "mackey/1":
        raise ValueError("bad document at $.schema: expected 'mackey/1'")
    try:
        shape = TowerShape(int(doc["p"]), int(doc["n"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError("bad document at $.p/$.n: %s" % exc)
    raw_levels = doc.get("levels")
    if not isinstance(raw_levels, list) or len(raw_levels) != shape.n + 1:
        raise ValueError("bad document at $.levels: need %d levels" % (shape.n + 1))
    levels = []
    for i, obj in enumerate(raw_levels):
        mat = _matrix_from_json(obj["relations"], "$.levels[%d].relations" % i)
        gens = obj.get("gens")
        if not isinstance(gens, int) or gens < 0 or len(mat) != gens:
            raise ValueError("bad document at $.levels[%d]: gens mismatch" % i)
        levels.append(FgAbGroup(gens, columns(mat)))
    def read_maps(key, count, mk):
        raw = doc.get(key)
        if not isinstance(raw, list) or len(raw) != count:
            raise ValueError("bad document at $.%s: need %d matrices" % (key, count))
        return [mk(i, _matrix_from_json(raw[i], "$.%s[%d]" % (key, i)))
                for i in range(count)]
    res = read_maps("res", shape.n,
                    lambda i, mat: GroupHom(levels[i + 1], levels[i], mat))
    tr = read_maps("tr", shape.n,
                   lambda i, mat: GroupHom(levels[i], levels[i + 1], mat))
    weyl = read_maps("weyl", shape.n + 1,
                     lambda i, mat: GroupHom(levels[i], levels[i], mat))
    out = MackeyFunctor(shape, levels, res, tr, weyl)
    violations = out.validate()
    if violations:
        raise ValueError("document is not a Mackey functor: " + "; ".join(violations))
    return out


def dumps(m, **kwargs):
    return json.dumps(to_json(m), **kwargs)


def loads(text):
    return from_json(json.loads(text))
