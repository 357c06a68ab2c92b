import json
import random

import pytest

from cpmackey.intlin import FgAbGroup, GroupHom, free_group, identity_hom
from cpmackey.mackey import (
    MackeyFunctor,
    MackeyHom,
    TowerShape,
    bform,
    catalog,
    cohomological_quotient,
    constant_z,
    cokernel_m,
    direct_sum_m,
    dual_levelwise,
    fingerprint,
    fingerprint_equal,
    form_to_constant_hom,
    form_z,
    from_json,
    identity_mackey_hom,
    is_cohomological,
    is_isomorphic,
    kernel_m,
    pullback_psi,
    render_lewis,
    to_json,
    z_star,
    zero_functor,
)


CP = TowerShape(3, 1)
CP2 = TowerShape(3, 2)
C2 = TowerShape(2, 1)
C4 = TowerShape(2, 2)


def test_constant_z_valid():
    z = constant_z(CP)
    assert z.validate() == []
    assert is_cohomological(z)
    assert z.res[0].matrix == [[1]]
    assert z.tr[0].matrix == [[3]]


def test_bad_tower_rejected():
    # res = tr = 1 with trivial weyl violates res o tr = p on Z
    zgrp = free_group(1)
    one = GroupHom(zgrp, zgrp, [[1]])
    m = MackeyFunctor(CP, [zgrp, zgrp], [one], [one], [identity_hom(zgrp)] * 2)
    assert any("double-coset" in v for v in m.validate())


def test_form_z_index_convention():
    # form_Z(1,0) over C_{p^2}: Res top-to-bottom (1, p), Tr (p, 1)
    m = form_z(CP2, (1, 0))
    assert m.res[1].matrix == [[1]]   # top restriction
    assert m.res[0].matrix == [[3]]
    assert m.tr[1].matrix == [[3]]
    assert m.tr[0].matrix == [[1]]
    assert m.validate() == []
    assert is_cohomological(m)


def test_bform_values():
    b10 = bform(CP2, (1, 0))
    assert [g.canonical for g in b10.level] == [(0, ()), (0, (3,)), (0, (3,))]
    # top restriction is an iso, top transfer is zero
    assert b10.res[1].cokernel_group.is_zero()
    assert b10.tr[1].image_group.is_zero()
    b11 = bform(CP2, (1, 1))
    assert [g.canonical for g in b11.level] == [(0, ()), (0, (3,)), (0, (9,))]
    b01 = bform(CP2, (0, 1))
    assert [g.canonical for g in b01.level] == [(0, ()), (0, ()), (0, (3,))]
    for b in (b10, b11, b01):
        assert b.validate() == []
        assert is_cohomological(b)


def test_zero_and_sum_kernel_cokernel():
    z = constant_z(CP)
    zz = direct_sum_m(z, z)
    assert zz.validate() == []
    ident = identity_mackey_hom(z)
    assert all(g.is_zero() for g in kernel_m(ident).level)
    # kernel of Z ->> B(1) is form_Z(1) = Z^*
    f = form_to_constant_hom(CP, (1,))
    b1 = cokernel_m(f)
    assert [g.canonical for g in b1.level] == [(0, ()), (0, (3,))]
    surj = MackeyHom(constant_z(CP), b1,
                     [GroupHom(constant_z(CP).level[k], b1.level[k], [[1]])
                      for k in range(2)])
    assert surj.validate() == []
    ker = kernel_m(surj)
    assert fingerprint_equal(ker, z_star(CP))


def test_is_cohomological_burnside_counterexample():
    # the Burnside functor A for C_p: top Z^2 on [G/G], [G/e]; res sends
    # [G/G] to 1 and [G/e] to p; tr sends the point to [G/e]
    top = free_group(2)
    bot = free_group(1)
    res = GroupHom(top, bot, [[1, 3]])
    tr = GroupHom(bot, top, [[0], [1]])
    m = MackeyFunctor(CP, [bot, top], [res], [tr],
                      [identity_hom(bot), identity_hom(top)])
    assert m.validate() == []
    assert not is_cohomological(m)


def test_catalog_outputs_validate():
    shapes = [CP, CP2, C2, C4]
    for shape in shapes:
        names = [("zero", None), ("form_Z", (0,) * shape.n),
                 ("form_Z", (1,) * shape.n), ("B", (1,) * shape.n),
                 ("perm", [0]), ("perm", [shape.n])]
        if shape.p == 2:
            names.append(("sign", None))
        for name, params in names:
            m = catalog(shape, name, params)
            assert m.validate() == [], (name, params)


def test_dual_star_of_form():
    m = form_z(CP2, (1, 0))
    d = dual_levelwise(m, "star")
    assert fingerprint_equal(d, form_z(CP2, (0, 1)))
    # double dual is the identity on forms
    assert fingerprint_equal(dual_levelwise(d, "star"), m)


def test_dual_e_flips_bform():
    b10 = bform(CP2, (1, 0))
    e = dual_levelwise(b10, "E")
    assert [g.canonical for g in e.level] == [(0, ()), (0, (3,)), (0, (3,))]
    # flipped: top restriction is now zero, top transfer an iso
    assert e.res[1].image_group.is_zero()
    assert e.tr[1].cokernel_group.is_zero()
    assert e.validate() == []
    # E-duality is an involution on finite levelwise functors
    assert fingerprint_equal(dual_levelwise(e, "E"), b10)
    assert not fingerprint_equal(e, b10)


def test_pullback_psi():
    b1 = bform(CP, (1,))
    pulled = pullback_psi(b1, 1)
    assert fingerprint_equal(pulled, bform(CP2, (0, 1)))
    z = constant_z(CP)
    assert fingerprint_equal(pullback_psi(z, 1), constant_z(CP2))
    assert is_cohomological(pulled)
    # pullback of a perm functor is the perm functor of the same set
    zcp = catalog(CP, "perm", [0])
    pz = pullback_psi(zcp, 1)
    assert fingerprint_equal(pz, catalog(CP2, "perm", [1]))


def test_pullback_preserves_sums():
    a = bform(CP, (1,))
    b = constant_z(CP)
    lhs = pullback_psi(direct_sum_m(a, b), 1)
    rhs = direct_sum_m(pullback_psi(a, 1), pullback_psi(b, 1))
    assert fingerprint_equal(lhs, rhs)


def test_fingerprint_distinguishes_forms():
    assert fingerprint(form_z(CP2, (1, 0))) != fingerprint(form_z(CP2, (0, 1)))
    assert fingerprint(form_z(CP2, (1, 0))) != fingerprint(form_z(CP2, (1, 1)))


def test_is_isomorphic():
    m = form_z(CP2, (1, 0))
    assert is_isomorphic(m, m)
    b10 = bform(CP2, (1, 0))
    assert not is_isomorphic(b10, dual_levelwise(b10, "E"))
    # same levels, different towers
    assert not is_isomorphic(form_z(CP2, (1, 0)), form_z(CP2, (0, 1)))
    # an honest non-identity isomorphism: negated generator
    z = constant_z(CP)
    neg = MackeyFunctor(CP, z.level, [GroupHom(z.level[1], z.level[0], [[-1]])],
                        [GroupHom(z.level[0], z.level[1], [[-3]])],
                        [identity_hom(z.level[0]), identity_hom(z.level[1])])
    assert neg.validate() == []
    assert is_isomorphic(z, neg)


def test_cohomological_quotient_is_iso_on_z_modules():
    for m in (constant_z(CP2), form_z(CP2, (1, 0)), bform(CP2, (1, 1))):
        out, was_iso = cohomological_quotient(m)
        assert was_iso
        assert fingerprint_equal(out, m)


def test_torsion_lemma_on_catalog():
    # a cohomological functor with torsion bottom level is torsion everywhere
    for shape in (CP, CP2):
        for ts in _all_ts(shape.n):
            b = bform(shape, ts)
            if b.level[0].is_finite():
                assert all(g.free_rank == 0 for g in b.level)


def _all_ts(n):
    out = [()]
    for _ in range(n):
        out = [t + (v,) for t in out for v in (0, 1)]
    return out


def test_random_sums_and_kernels_validate():
    rng = random.Random(42)
    shapes = [CP, CP2, C2]
    pool = {}
    for shape in shapes:
        pool[shape] = [constant_z(shape), z_star(shape),
                       bform(shape, (1,) * shape.n), zero_functor(shape),
                       catalog(shape, "perm", [0])]
    for _ in range(60):
        shape = rng.choice(shapes)
        a = rng.choice(pool[shape])
        b = rng.choice(pool[shape])
        s = direct_sum_m(a, b)
        assert s.validate() == []
        ident = identity_mackey_hom(s)
        assert kernel_m(ident).validate() == []
        assert cokernel_m(ident).validate() == []


def test_json_roundtrip():
    for m in (form_z(CP2, (1, 0)), bform(CP2, (1, 1)), catalog(C2, "sign", None)):
        doc = to_json(m)
        text = json.dumps(doc)
        back = from_json(json.loads(text))
        assert fingerprint_equal(back, m)
        for k in range(m.shape.n):
            assert back.res[k].matrix == m.res[k].matrix
            assert back.tr[k].matrix == m.tr[k].matrix


def test_json_rejects_bad_towers():
    m = constant_z(CP)
    doc = to_json(m)
    doc["tr"][0]["entries"] = ["1"]  # tr = 1 violates the double-coset law
    with pytest.raises(ValueError):
        from_json(doc)
    doc2 = to_json(m)
    doc2["schema"] = "bogus"
    with pytest.raises(ValueError):
        from_json(doc2)


def test_render_lewis():
    text = render_lewis(form_z(CP, (1,)))
    lines = text.splitlines()
    assert "[G/G]" in lines[1]
    assert "Z" in lines[1]
    assert "res [3]" in lines[2] and "tr [1]" in lines[2]
