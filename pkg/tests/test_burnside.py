import random

import pytest

from cpmackey.intlin import identity, mat_apply, mat_eq, mat_mul
from cpmackey.mackey import (
    TowerShape,
    bform,
    catalog,
    constant_z,
    fingerprint_equal,
    is_cohomological,
    z_star,
    zero_functor,
)
from cpmackey.burnside import (
    GSet,
    ProductDecomposition,
    SpanWord,
    eval_module,
    eval_span,
    fixed_point_functor,
    free_orbit,
    gamma_matrix,
    is_equivariant,
    lift,
    lift_hom,
    orbit_functor,
    orbit_product,
    perm_functor,
    point,
    product_matrix,
    single_orbit,
    span_basis,
    span_decompose,
)


CP = TowerShape(3, 1)
CP2 = TowerShape(3, 2)
C2 = TowerShape(2, 1)
C4 = TowerShape(2, 2)


def test_orbit_product_counts():
    # X x G/G = X
    copies, level, _ = orbit_product(CP2, 1, 2)
    assert (copies, level) == (1, 1)
    # C_{p^2}: G/C_p x G/C_p = p copies of G/C_p
    copies, level, _ = orbit_product(CP2, 1, 1)
    assert (copies, level) == (3, 1)
    # G/e x G/e = p^n copies of G/e (the group-ring square)
    copies, level, _ = orbit_product(CP2, 0, 0)
    assert (copies, level) == (9, 0)


def test_product_bijection_is_equivariant():
    for shape in (CP2, C4):
        for j in range(shape.n + 1):
            for k in range(shape.n + 1):
                left = single_orbit(shape, j)
                right = single_orbit(shape, k)
                dec = ProductDecomposition(left, right)
                seen = set()
                for a in range(left.size):
                    for b in range(right.size):
                        seen.add(dec.pair_flat(a, b))
                assert seen == set(range(dec.gset.size))
                # gamma acts diagonally on pairs and standardly on the gset
                g = gamma_matrix(dec.gset)
                for a in range(left.size):
                    for b in range(right.size):
                        a2 = _shift(left, a)
                        b2 = _shift(right, b)
                        vec = [0] * dec.gset.size
                        vec[dec.pair_flat(a, b)] = 1
                        assert mat_apply(g, vec)[dec.pair_flat(a2, b2)] == 1


def _shift(gset, flat):
    a, c = gset.unflat(flat)
    size = gset.shape.orbit_size(gset.orbits[a])
    return gset.flat(a, (c + 1) % size)


def test_span_basis_sizes():
    # Hom(Z[G/e], Z[G/G]) has rank 1
    assert len(span_basis(CP2, 0, 2)) == 1
    # Hom(Z[G/e], Z[G/e]) is the group ring
    assert len(span_basis(CP2, 0, 0)) == 9
    assert len(span_basis(CP2, 1, 2)) == 1
    assert len(span_basis(CP2, 2, 1)) == 1
    # Hom(Z[G/C_p], Z[G/e]): image of a generator is any C_p-fixed vector
    assert len(span_basis(CP2, 1, 0)) == 3


def test_span_matrices_are_equivariant_and_decompose():
    for shape in (CP2, C4, TowerShape(2, 3)):
        for j in range(shape.n + 1):
            for k in range(shape.n + 1):
                for w in span_basis(shape, j, k):
                    mat = w.matrix()
                    assert is_equivariant(single_orbit(shape, j),
                                          single_orbit(shape, k), mat)
                    coeffs = span_decompose(shape, mat, j, k)
                    expect = [0] * len(coeffs)
                    expect[w.twist] = 1
                    assert coeffs == expect


def test_span_decompose_rejects_non_equivariant():
    mat = [[1, 0, 0], [0, 0, 0], [0, 0, 0]]
    with pytest.raises(ValueError):
        span_decompose(CP, mat, 0, 0)


def test_eval_span_res_tr():
    m = form_z(CP2_ts=(1, 0))
    # restriction span evaluates to res, transfer span to tr
    r = eval_span(m, SpanWord(CP2, 0, 1, 0))
    assert r.matrix == m.res[0].matrix
    t = eval_span(m, SpanWord(CP2, 1, 0, 0))
    assert t.matrix == m.tr[0].matrix


def form_z(CP2_ts):
    from cpmackey.mackey import form_z as fz
    return fz(CP2, CP2_ts)


def test_eval_full_span_composite_is_pn():
    z = constant_z(CP2)
    down = eval_span(z, SpanWord(CP2, 0, 2, 0))   # Res^G_e
    up = eval_span(z, SpanWord(CP2, 2, 0, 0))     # Tr^G_e
    assert up.compose(down).matrix == [[9]]


def test_eval_functoriality_exhaustive_small():
    # every composable pair of span words, for n <= 2
    for shape in (C2, CP, C4):
        mods = [constant_z(shape), z_star(shape), bform(shape, (1,) * shape.n)]
        if shape.p == 2:
            mods.append(catalog(shape, "sign", None))
        for j in range(shape.n + 1):
            for k in range(shape.n + 1):
                for l in range(shape.n + 1):
                    for w1 in span_basis(shape, j, k):
                        for w2 in span_basis(shape, k, l):
                            composite = mat_mul(w2.matrix(), w1.matrix())
                            for m in mods:
                                lhs = eval_module(m, composite,
                                                  source=single_orbit(shape, j),
                                                  target=single_orbit(shape, l))
                                rhs = eval_span(m, w1).compose(eval_span(m, w2))
                                assert lhs.equals(rhs)


def test_eval_functoriality_random_cp2_odd():
    rng = random.Random(9)
    shape = CP2
    mods = [constant_z(shape), z_star(shape), bform(shape, (1, 0))]
    for _ in range(25):
        j = rng.randrange(shape.n + 1)
        k = rng.randrange(shape.n + 1)
        l = rng.randrange(shape.n + 1)
        w1 = rng.choice(span_basis(shape, j, k))
        w2 = rng.choice(span_basis(shape, k, l))
        composite = mat_mul(w2.matrix(), w1.matrix())
        for m in mods:
            lhs = eval_module(m, composite,
                              source=single_orbit(shape, j),
                              target=single_orbit(shape, l))
            rhs = eval_span(m, w1).compose(eval_span(m, w2))
            assert lhs.equals(rhs)


def test_perm_functor_matches_fixed_point_functor():
    for shape in (CP, CP2, C4):
        for k in range(shape.n + 1):
            pf = perm_functor(shape, single_orbit(shape, k))
            assert pf.validate() == []
            assert is_cohomological(pf)
            gm = gamma_matrix(single_orbit(shape, k))
            ff = fixed_point_functor(shape, gm)
            assert ff.validate() == []
            assert fingerprint_equal(pf, ff)


def test_fixed_point_of_trivial_and_sign():
    assert fingerprint_equal(fixed_point_functor(CP2, identity(1)),
                             constant_z(CP2))
    zm = fixed_point_functor(C4, [[-1]])
    assert zm.validate() == []
    assert [g.canonical for g in zm.level] == [(1, ()), (1, ()), (0, ())]
    assert zm.weyl[0].matrix == [[-1]]
    # C_2 sign module has bottom Z and trivial top
    z2 = fixed_point_functor(C2, [[-1]])
    assert [g.canonical for g in z2.level] == [(1, ()), (0, ())]


def test_orbit_functor_of_group_ring():
    m = orbit_functor(CP, gamma_matrix(free_orbit(CP)))
    assert m.validate() == []
    # orbits of Z[C_p]: the module at the bottom, Z at the top
    assert m.level[0].canonical == (3, ())
    assert m.level[1].canonical == (1, ())


def test_lift_point_is_identity():
    for m in (constant_z(CP2), z_star(CP2), bform(CP2, (1, 0))):
        lifted = lift(m, point(CP2))
        assert lifted.validate() == []
        assert fingerprint_equal(lifted, m)


def test_lift_of_z_by_free_orbit_is_group_ring():
    lifted = lift(constant_z(CP), free_orbit(CP))
    assert lifted.validate() == []
    assert fingerprint_equal(lifted, perm_functor(CP, free_orbit(CP)))
    # C_{p^2} too
    lifted2 = lift(constant_z(CP2), free_orbit(CP2))
    assert fingerprint_equal(lifted2, perm_functor(CP2, free_orbit(CP2)))


def test_lift_of_b1_by_free_orbit_vanishes():
    lifted = lift(bform(CP, (1,)), free_orbit(CP))
    assert all(g.is_zero() for g in lifted.level)


def test_lift_disjoint_union_is_sum():
    from cpmackey.mackey import direct_sum_m
    m = z_star(CP2)
    x = single_orbit(CP2, 1)
    y = point(CP2)
    both = lift(m, x.disjoint_union(y))
    split = direct_sum_m(lift(m, x), lift(m, y))
    assert fingerprint_equal(both, split)


def test_lift_hom_is_mackey_hom():
    m = constant_z(CP)
    x = free_orbit(CP)
    y = point(CP)
    # the fold Z[G/e] -> Z[G/G]
    fold = [[1] * CP.orbit_size(0)]
    h = lift_hom(m, fold, x, y)
    assert h.validate() == []
    # at the top level this is Res^G_e : Z -> Z, the identity matrix entry 1
    assert h.maps[CP.n].matrix == [[1]]


def test_eval_rejects_non_cohomological():
    # the Burnside functor A for C_p is a valid Mackey functor but not a
    # Z-module, so span evaluation must refuse it
    from cpmackey.intlin import GroupHom, free_group, identity_hom
    from cpmackey.mackey import MackeyFunctor
    top = free_group(2)
    bot = free_group(1)
    m = MackeyFunctor(CP, [bot, top],
                      [GroupHom(top, bot, [[1, 3]])],
                      [GroupHom(bot, top, [[0], [1]])],
                      [identity_hom(bot), identity_hom(top)])
    assert m.validate() == []
    assert not is_cohomological(m)
    with pytest.raises(ValueError):
        eval_span(m, SpanWord(CP, 0, 1, 0))
