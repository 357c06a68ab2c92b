"""Projective resolutions by permutation functors and the derived functors.

Every Z-module over C_{p^n} is covered by a fixed-point functor of a
permutation module Z[X]; iterating covers of kernels yields a resolution.
Ext is the cohomology of Hom(Z[X_*], N) = lifts of N, Tor the homology of
M box Z[X_*] = lifts of M; both inherit Mackey structure from the lifts.

Resolutions are cut at a fixed length with exactness certified degreewise,
long enough to certify vanishing of Ext and Tor in degrees 4 and 5 (the
global dimension of the category is 3).
"""

from .intlin import (
    AbComplex,
    Lattice,
    from_columns,
    homology_ab,
    induced_map,
    transpose,
    zeros,
)
from .mackey import (
    MackeyFunctor,
    MackeyHom,
    GroupHom,
    fingerprint,
    is_cohomological,
    kernel_m,
    pullback_psi,
)
from .burnside import (
    GSet,
    eval_span,
    gamma_shift,
    lift,
    lift_hom,
    perm_chain_hom,
    perm_functor,
    span_basis,
    sparse_columns,
)

RESOLUTION_LENGTH = 6


class HomologicalDimensionError(Exception):
    """Nonzero Ext or Tor above the global dimension: never dropped silently."""


class GradedMackey:
    """A finite collection of Mackey functors indexed by integer degrees."""

    def __init__(self, shape, values):
        self.shape = shape
        self.values = {d: m for d, m in values.items()
                       if not all(g.is_zero() for g in m.level)}

    def degrees(self):
        return sorted(self.values)

    def get(self, degree):
        if degree in self.values:
            return self.values[degree]
        from .mackey import zero_functor
        return zero_functor(self.shape)

    def fingerprints(self):
        return {d: fingerprint(m) for d, m in self.values.items()}

    def same_as(self, other):
        return self.fingerprints() == other.fingerprints()

    def __repr__(self):
        parts = ", ".join("%d: %s" % (d, self.values[d]) for d in self.degrees())
        return "GradedMackey{%s}" % parts


class Cover:
    """A surjection from a permutation functor onto a Z-module.

    ``summands[i] = (level, element)`` records the orbit G/C_{p^level} and
    the classified element of the target at that level; ``augmentation`` is
    the full MackeyHom perm_functor(gset) -> target.
    """

    def __init__(self, target, gset, summands, perm, augmentation):
        self.target = target
        self.gset = gset
        self.summands = summands
        self.perm = perm
        self.augmentation = augmentation


def _span_images(m, k, element):
    """Images of an element of m(level k) under all span words, per level."""
    out = []
    for lev in range(m.shape.n + 1):
        vecs = [eval_span(m, w).apply(element) for w in span_basis(m.shape, lev, k)]
        out.append(vecs)
    return out


def _levelwise_surjective(m, image_lists):
    for k in range(m.shape.n + 1):
        lat = Lattice(m.level[k].gens,
                      list(m.level[k].relations) + image_lists[k])
        for j in range(m.level[k].gens):
            unit = [1 if t == j else 0 for t in range(m.level[k].gens)]
            if not lat.contains(unit):
                return False
    return True


def cover(m):
    """A permutation-functor cover of a cohomological Mackey functor.

    Summands are chosen greedily from the top level down, one orbit per
    presentation generator not already reached, then redundant summands are
    pruned so the familiar small resolutions come out on the nose.
    """
    if not is_cohomological(m):
        raise ValueError("covers exist for cohomological functors only")
    shape = m.shape
    chosen = []
    images = {}  # index -> per-level image vectors
    hit = [Lattice(m.level[k].gens, m.level[k].relations)
           for k in range(shape.n + 1)]
    for k in range(shape.n, -1, -1):
        for j in range(m.level[k].gens):
            unit = [1 if t == j else 0 for t in range(m.level[k].gens)]
            if hit[k].contains(unit):
                continue
            idx = len(chosen)
            chosen.append((k, unit))
            images[idx] = _span_images(m, k, unit)
            for lev in range(shape.n + 1):
                extra = [v for v in images[idx][lev] if not hit[lev].contains(v)]
                if extra:
                    hit[lev] = hit[lev].sum(extra)

    # prune summands whose images are spanned by the others
    keep = list(range(len(chosen)))
    for idx in range(len(chosen)):
        trial = [t for t in keep if t != idx]
        lists = [[v for t in trial for v in images[t][lev]]
                 for lev in range(shape.n + 1)]
        if _levelwise_surjective(m, lists):
            keep = trial
    chosen = [chosen[t] for t in keep]
    images = {new: images[old] for new, old in enumerate(keep)}

    gset = GSet(shape, [k for k, _ in chosen])
    perm = perm_functor(shape, gset)
    maps = []
    for lev in range(shape.n + 1):
        cols = []
        for idx, (k, _elt) in enumerate(chosen):
            # fixed-basis elements of the summand at this level are exactly
            # the span words (lev -> k), in twist order
            cols.extend(images[idx][lev])
        mat = (from_columns(cols, rows=m.level[lev].gens)
               if cols else zeros(m.level[lev].gens, 0))
        maps.append(GroupHom(perm.level[lev], m.level[lev], mat))
    aug = MackeyHom(perm, m, maps)
    return Cover(m, gset, chosen, perm, aug)


class Resolution:
    """target <- Z[X_0] <- Z[X_1] <- ... with underlying integer matrices."""

    def __init__(self, target, gsets, perms, diff_matrices, augmentation):
        self.target = target
        self.gsets = gsets
        self.perms = perms
        self.diff_matrices = diff_matrices  # diff[i]: Z[X_{i+1}] -> Z[X_i]
        self.augmentation = augmentation

    @property
    def length(self):
        return len(self.gsets) - 1

    def chain_hom(self, i):
        """The MackeyHom perms[i+1] -> perms[i] of the i-th differential."""
        src = self.perms[i + 1]
        tgt = self.perms[i]
        cols = sparse_columns(self.diff_matrices[i], src.gset.size)
        return perm_chain_hom(src, tgt, cols)

    def certify(self):
        """Exactness in degrees 1..length-1 and H_0 = target via augmentation."""
        homs = [self.chain_hom(i) for i in range(self.length)]
        graded = mackey_homology(self.perms, homs)
        for d in range(1, self.length):
            if d in graded.values:
                raise ArithmeticError("resolution not exact at degree %d" % d)
        h0 = graded.get(0)
        if fingerprint(h0) != fingerprint(self.target):
            raise ArithmeticError("resolution does not resolve its target")
        return True


def _matrix_vec(mat, vec):
    if not mat:
        return []
    return [sum(row[j] * vec[j] for j in range(len(vec)) if vec[j])
            for row in mat]


def resolve(m, length=RESOLUTION_LENGTH):
    """Iterated cover-of-kernel resolution of fixed length."""
    if length < 4:
        raise ValueError("resolutions must reach past the global dimension")
    c0 = cover(m)
    gsets = [c0.gset]
    perms = [c0.perm]
    diffs = []
    current_aug = c0.augmentation
    for _i in range(length):
        kern = kernel_m(current_aug)
        ck = cover(kern)
        prev_perm = perms[-1]
        prev_gset = gsets[-1]
        cols = []
        for (k, unit) in ck.summands:
            fixed = _matrix_vec(
                from_columns(kern.kernel_lifts[k], rows=prev_perm.level[k].gens)
                if kern.kernel_lifts[k] else zeros(prev_perm.level[k].gens, 0),
                unit)
            ambient = prev_perm.ambient(fixed, k)
            size = m.shape.orbit_size(k)
            for j in range(size):
                cols.append(gamma_shift(prev_gset, ambient, j))
        mat = (from_columns(cols, rows=prev_gset.size)
               if cols else zeros(prev_gset.size, 0))
        gsets.append(ck.gset)
        perms.append(ck.perm)
        diffs.append(mat)
        # next step: kernel of P_{i+1} ->> K inside P_i
        lifted_maps = []
        for lev in range(m.shape.n + 1):
            lifted_maps.append(GroupHom(ck.perm.level[lev], kern.level[lev],
                                        ck.augmentation.maps[lev].matrix))
        current_aug = MackeyHom(ck.perm, kern, lifted_maps)
    return Resolution(m, gsets, perms, diffs, c0.augmentation)


# ---------------------------------------------------------------------------
# homology of complexes of Mackey functors


def mackey_homology(terms, homs, check=False):
    """Homology of a complex of Mackey functors.

    ``homs[i]`` maps ``terms[i+1]`` to ``terms[i]``; the result is a
    GradedMackey indexed by position, carrying induced res/tr/weyl.
    """
    if not terms:
        raise ValueError("empty complex")
    shape = terms[0].shape
    per_level = []
    for lev in range(shape.n + 1):
        cx = AbComplex(0, [t.level[lev] for t in terms],
                       [h.maps[lev] for h in homs])
        per_level.append(homology_ab(cx, check=check))
    values = {}
    for d in range(len(terms)):
        groups = [per_level[lev][d].group for lev in range(shape.n + 1)]
        if all(g.is_zero() for g in groups):
            continue
        term = terms[d]
        res = [induced_map(per_level[lev + 1][d], per_level[lev][d],
                           term.res[lev].matrix) for lev in range(shape.n)]
        tr = [induced_map(per_level[lev][d], per_level[lev + 1][d],
                          term.tr[lev].matrix) for lev in range(shape.n)]
        weyl = [induced_map(per_level[lev][d], per_level[lev][d],
                            term.weyl[lev].matrix) for lev in range(shape.n + 1)]
        values[d] = MackeyFunctor(shape, groups, res, tr, weyl)
    return GradedMackey(shape, values)


# ---------------------------------------------------------------------------
# Ext and Tor


def ext_z(m, n_, resolution=None, full=False):
    """Ext_Z^*(m, n_) as a GradedMackey on degrees 0..3.

    Degrees above 3 (up to the resolution length minus one) are computed
    and must vanish; a violation raises HomologicalDimensionError.
    """
    if not (is_cohomological(m) and is_cohomological(n_)):
        raise ValueError("Ext is defined for cohomological functors")
    res = resolution if resolution is not None else resolve(m)
    lifts = [lift(n_, x) for x in res.gsets]
    deltas = []
    for i in range(res.length):
        # d_{i+1}: Z[X_{i+1}] -> Z[X_i] induces lift(X_i) -> lift(X_{i+1})
        deltas.append(lift_hom(n_, res.diff_matrices[i],
                               res.gsets[i + 1], res.gsets[i],
                               lifted_src=lifts[i + 1], lifted_tgt=lifts[i]))
    # reverse into homological order: position j holds C^{L-j}
    length = res.length
    terms = [lifts[length - j] for j in range(length + 1)]
    homs = [deltas[length - 1 - j] for j in range(length)]
    graded = mackey_homology(terms, homs)
    values = {length - j: graded.values[j] for j in graded.values}
    return _truncate_graded(GradedMackey(m.shape, values), "Ext", full)


def tor_z(m, n_, resolution=None, full=False):
    """Tor^Z_*(m, n_) as a GradedMackey on degrees 0..3."""
    if not (is_cohomological(m) and is_cohomological(n_)):
        raise ValueError("Tor is defined for cohomological functors")
    res = resolution if resolution is not None else resolve(n_)
    lifts = [lift(m, x) for x in res.gsets]
    homs = []
    for i in range(res.length):
        # the transpose of d_{i+1} is a morphism Z[X_i] -> Z[X_{i+1}], and
        # contravariance of m turns it into lift(X_{i+1}) -> lift(X_i)
        homs.append(lift_hom(m, transpose(res.diff_matrices[i]),
                             res.gsets[i], res.gsets[i + 1],
                             lifted_src=lifts[i], lifted_tgt=lifts[i + 1]))
    graded = mackey_homology(lifts, homs)
    return _truncate_graded(graded, "Tor", full)


def _truncate_graded(graded, label, full):
    high = [d for d in graded.values if d > 3]
    if high:
        raise HomologicalDimensionError(
            "%s nonzero in degrees %s beyond the global dimension" %
            (label, sorted(high)))
    if full:
        return graded
    return GradedMackey(graded.shape, {d: m for d, m in graded.values.items()
                                       if 0 <= d <= 3})


# ---------------------------------------------------------------------------
# pullback compatibility


def pullback_compat_check(m, n_, k):
    """Compare pulled-back Ext/Tor tables with Ext/Tor of pullbacks.

    Returns a report dict; ``report["ok"]`` is True when both derived
    functors commute with the inflation on these inputs.
    """
    report = {"ok": True, "ext": [], "tor": []}
    pm = pullback_psi(m, k)
    pn = pullback_psi(n_, k)
    for label, functor in (("ext", ext_z), ("tor", tor_z)):
        small = functor(m, n_)
        big = functor(pm, pn)
        pulled = GradedMackey(pm.shape,
                              {d: pullback_psi(v, k) for d, v in small.values.items()})
        degrees = sorted(set(pulled.values) | set(big.values))
        for d in degrees:
            same = fingerprint(pulled.get(d)) == fingerprint(big.get(d))
            if not same:
                report["ok"] = False
                report[label].append(
                    {"degree": d,
                     "pulled": pulled.get(d).__repr__(),
                     "direct": big.get(d).__repr__()})
    return report
