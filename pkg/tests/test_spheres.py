import pytest

from cpmackey.mackey import (
    TowerShape,
    bform,
    constant_z,
    fingerprint,
    fingerprint_equal,
    form_z,
    pullback_psi,
    z_star,
)
from cpmackey.spheres import (
    RepLabel,
    anderson_check,
    bredon_homology,
    cell_homology,
    chain_lambda,
    chain_sigma,
    dualize,
    ext_sphere_crosscheck,
    form_to_rep,
    format_label,
    parse_label,
    sigma_les_check,
    smash,
    sphere_chain,
)
from cpmackey.grids import c2_expected, cp2_expected, cp_expected, sign_form


CP3 = TowerShape(3, 1)
C2 = TowerShape(2, 1)
C4 = TowerShape(2, 2)
CP2_3 = TowerShape(3, 2)


def tables_match(graded, expected):
    exp = {d: m for d, m in expected.items()
           if not all(g.is_zero() for g in m.level)}
    if sorted(graded.values) != sorted(exp):
        return False
    return all(fingerprint(graded.values[d]) == fingerprint(exp[d]) for d in exp)


def test_label_parsing_roundtrip():
    lab = parse_label(C4, "2L1-3L0+4")
    # L1 = 2 sigma over C_4
    assert lab.sig == 4 and lab.lam == (-3, 0) and lab.triv == 4
    assert parse_label(CP3, "L0@2").twists == {0: 2}
    assert parse_label(C2, "0").dim() == 0
    with pytest.raises(ValueError):
        parse_label(C2, "L5")
    with pytest.raises(ValueError):
        parse_label(CP3, "s")
    text = format_label(parse_label(C4, "-2s + L0"))
    assert parse_label(C4, text).key() == parse_label(C4, "L0-2s").key()


def test_chain_lambda_homology():
    for p in (2, 3, 5):
        shape = TowerShape(p, 1)
        h = cell_homology(chain_lambda(shape, 0))
        assert tables_match(h, {0: bform(shape, (1,)), 2: constant_z(shape)})
    # C_{p^2}, k = 1: degree-0 homology of order p at the top level
    h = cell_homology(chain_lambda(CP2_3, 1))
    assert h.get(0).level[2].order() == 3


def test_chain_twist_invariance():
    for r in (1, 2, 4, 5, 7):
        h = cell_homology(chain_lambda(CP3, 0, r))
        assert tables_match(h, {0: bform(CP3, (1,)), 2: constant_z(CP3)})
    ref = cell_homology(chain_lambda(CP2_3, 1, 1)).fingerprints()
    for r in (2, 4, 5, 7):
        assert cell_homology(chain_lambda(CP2_3, 1, r)).fingerprints() == ref


def test_smash_with_dual_is_trivial_sphere():
    for r in (1, 2, 5, 7):
        c = smash(chain_lambda(CP3, 0, r), dualize(chain_lambda(CP3, 0, 1)))
        c.check_dd()
        h = cell_homology(c)
        assert tables_match(h, {0: constant_z(CP3)})


def test_dualize_involution():
    c = chain_lambda(CP2_3, 1)
    cc = dualize(dualize(c))
    assert cc.lo == c.lo
    assert [t.orbits for t in cc.terms] == [t.orbits for t in c.terms]
    assert cc.diffs == c.diffs


def test_chain_sigma_values():
    h = cell_homology(chain_sigma(C2))
    assert tables_match(h, {0: bform(C2, (1,)), 1: sign_form(C2)})
    # C_4: H_1 is the sign tower (0, Z-, Z-) pulled shape
    h4 = cell_homology(chain_sigma(C4))
    assert fingerprint_equal(h4.get(1), sign_form(C4))
    assert tables_match(h4, {0: bform(C4, (0, 1)), 1: sign_form(C4)})


def test_sphere_chain_models_agree():
    labels = [RepLabel(CP3, [2]), RepLabel(CP3, [-1], 1),
              RepLabel(CP2_3, [1, 1]), RepLabel(CP2_3, [-1, 1]),
              RepLabel(C4, [1], 0, 1), RepLabel(C4, [-1], 0, 2),
              RepLabel(C2, [], 0, 3)]
    for lab in labels:
        banded = bredon_homology(lab, model="banded")
        blocks = bredon_homology(lab, model="blocks")
        assert banded.fingerprints() == blocks.fingerprints(), format_label(lab)


def test_cp_grid_small():
    for p in (3, 5):
        shape = TowerShape(p, 1)
        for a in range(-3, 4):
            for b in (-2, 0, 3):
                got = bredon_homology(RepLabel(shape, [a], b))
                assert tables_match(got, cp_expected(shape, a, b)), (p, a, b)


def test_c2_grid_small():
    for a in range(-5, 6):
        for b in (-1, 0, 2):
            got = bredon_homology(RepLabel(C2, [], b, a))
            assert tables_match(got, c2_expected(C2, a, b)), (a, b)


def test_cp2_grid_small():
    for p in (2, 3):
        shape = TowerShape(p, 2)
        for n in range(-2, 3):
            for m in range(-2, 3):
                lab = RepLabel(shape, [m, n])
                got = bredon_homology(lab)
                assert tables_match(got, cp2_expected(shape, n, m, 0)), (p, n, m)


def test_cp2_example_form_concentration():
    # S^{lambda_1 - lambda_0} models Z_{1,0}
    got = bredon_homology(RepLabel(CP2_3, [-1, 1]))
    assert tables_match(got, {0: form_z(CP2_3, (1, 0))})
    got = bredon_homology(RepLabel(CP2_3, [0, -1], 2))
    assert tables_match(got, {0: form_z(CP2_3, (0, 1))})


def test_pullback_of_sphere_grid():
    # labels without lambda_0 are inflated from the quotient group
    for p in (2, 3):
        small = TowerShape(p, 1)
        big = TowerShape(p, 2)
        for a in (-2, -1, 1, 2):
            quotient = bredon_homology(RepLabel(small, [a]))
            inflated = bredon_homology(RepLabel(big, [0, a]))
            assert inflated.fingerprints() == {
                d: fingerprint(pullback_psi(m, 1))
                for d, m in quotient.values.items()}


def test_form_to_rep_all_forms():
    for shape in (CP3, C2, CP2_3, C4):
        for bits in range(2 ** shape.n):
            ts = tuple((bits >> i) & 1 for i in range(shape.n))
            lab = form_to_rep(form_z(shape, ts))
            assert lab.dim() == 0
    # the published C_8 example
    c8 = TowerShape(2, 3)
    lab = form_to_rep(form_z(c8, (1, 0, 1)))
    assert lab.lam == (-1, 1, 0) and lab.sig == -2 and lab.triv == 2


def test_form_to_rep_rejects_non_forms():
    with pytest.raises(ValueError):
        form_to_rep(bform(CP3, (1,)))


def test_anderson_check_basics():
    assert anderson_check(RepLabel(CP3, [0]))["ok"]
    assert anderson_check(RepLabel(CP3, [2]))["ok"]
    assert anderson_check(RepLabel(CP2_3, [1, 1]))["ok"]
    assert anderson_check(RepLabel(CP2_3, [-2, 1]))["ok"]
    assert anderson_check(RepLabel(C4, [1], 1, 0))["ok"]
    # non-orientable: order-level consistency
    assert anderson_check(RepLabel(C2, [], 0, 3))["ok"]


def test_ext_sphere_crosscheck_forms():
    rep = ext_sphere_crosscheck(form_z(CP3, (1,)), form_z(CP3, (0,)))
    assert rep["ok"], rep
    rep = ext_sphere_crosscheck(form_z(CP2_3, (1, 0)), form_z(CP2_3, (0, 1)))
    assert rep["ok"], rep


def test_sigma_les():
    for lab in (RepLabel(C2, [], 0, 0), RepLabel(C2, [], 0, 2),
                RepLabel(C2, [], 1, -2), RepLabel(C4, [1], 0, 0),
                RepLabel(C4, [-1], 0, 2)):
        rep = sigma_les_check(lab)
        assert rep["ok"], rep


def test_underlying_concentration_guard():
    # every constructed sphere has underlying homology Z in degree dim
    for lab in (RepLabel(CP2_3, [2, -1], 1), RepLabel(C4, [-2], 3, 2)):
        graded = bredon_homology(lab)
        assert lab.dim() in graded.values
