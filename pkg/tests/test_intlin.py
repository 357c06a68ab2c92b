import random
from itertools import combinations
from math import gcd

from cpmackey.intlin import (
    AbComplex,
    FgAbGroup,
    GroupHom,
    Lattice,
    cyclic_group,
    ext1_ab,
    free_group,
    hom_ab,
    homology_ab,
    identity,
    identity_hom,
    induced_map,
    kernel_basis,
    image_basis,
    mat_apply,
    mat_eq,
    mat_mul,
    shape,
    smith_normal_form,
    solve_integer,
    tensor_ab,
    zeros,
    zero_hom,
)


def det(a):
    n = len(a)
    if n == 0:
        return 1
    a = [row[:] for row in a]
    sign = 1
    # fraction-free Bareiss
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def minors_gcd_factors(a):
    """Invariant factors via the gcd-of-k-minors formula (independent oracle)."""
    m, n = shape(a)
    facs = []
    prev = 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                sub = [[a[i][j] for j in cols] for i in rows]
                g = gcd(g, det(sub))
                if g == 1:
                    break
            if g == 1:
                break
        if g == 0:
            break
        facs.append(g // prev)
        prev = g
    return facs


def check_snf(a):
    snf = smith_normal_form(a)
    m, n = shape(a)
    assert mat_eq(mat_mul(mat_mul(snf.U, a), snf.V), snf.D)
    assert abs(det(snf.U)) == 1
    assert abs(det(snf.V)) == 1
    assert mat_eq(mat_mul(snf.U, snf.Uinv), identity(m))
    assert mat_eq(mat_mul(snf.Vinv, snf.V), identity(n))
    for i in range(len(snf.d) - 1):
        assert snf.d[i + 1] % snf.d[i] == 0
    return snf


def test_snf_examples():
    snf = check_snf([[2, 0], [0, 3]])
    assert snf.d == [1, 6]
    snf = check_snf(identity(3))
    assert snf.d == [1, 1, 1]
    snf = check_snf([[0]])
    assert snf.d == []


def test_snf_empty_shapes():
    assert smith_normal_form([]).d == []
    assert smith_normal_form([[], []]).d == []


def test_snf_random_matches_minors_oracle():
    rng = random.Random(7)
    for _ in range(60):
        m = rng.randrange(1, 5)
        n = rng.randrange(1, 5)
        a = [[rng.randrange(-6, 7) for _ in range(n)] for _ in range(m)]
        snf = check_snf(a)
        assert snf.d == minors_gcd_factors(a)


def test_snf_random_larger():
    rng = random.Random(11)
    for _ in range(10):
        m = rng.randrange(1, 9)
        n = rng.randrange(1, 9)
        a = [[rng.randrange(-50, 51) for _ in range(n)] for _ in range(m)]
        check_snf(a)


def test_canonical_invariance_under_unimodular():
    rng = random.Random(3)

    def random_unimodular(n):
        mat = identity(n)
        for _ in range(3 * n):
            i, j = rng.randrange(n), rng.randrange(n)
            if i != j:
                c = rng.randrange(-2, 3)
                for t in range(n):
                    mat[i][t] += c * mat[j][t]
        return mat

    for _ in range(20):
        m = rng.randrange(1, 5)
        n = rng.randrange(1, 5)
        a = [[rng.randrange(-5, 6) for _ in range(n)] for _ in range(m)]
        p = random_unimodular(m)
        q = random_unimodular(n)
        assert smith_normal_form(a).d == smith_normal_form(mat_mul(p, mat_mul(a, q))).d


def test_solve_integer():
    x, kern = solve_integer([[2]], [4])
    assert mat_apply([[2]], x) == [4]
    assert kern == []
    assert solve_integer([[2]], [3]) is None
    x, kern = solve_integer([[1, 1]], [0])
    assert x == [0, 0]
    assert len(kern) == 1
    a, b = kern[0]
    assert a + b == 0 and abs(a) == 1


def test_solve_integer_brute_small():
    rng = random.Random(13)
    for _ in range(40):
        m, n = rng.randrange(1, 4), rng.randrange(1, 4)
        a = [[rng.randrange(-3, 4) for _ in range(n)] for _ in range(m)]
        b = [rng.randrange(-4, 5) for _ in range(m)]
        got = solve_integer(a, b)
        brute = None
        rng_range = range(-8, 9)
        for x in _tuples(rng_range, n):
            if mat_apply(a, list(x)) == b:
                brute = x
                break
        if brute is None:
            # the brute window is large enough for these sizes only as a
            # one-sided check: a found solution must verify
            if got is not None:
                assert mat_apply(a, got[0]) == b
        else:
            assert got is not None
            assert mat_apply(a, got[0]) == b


def _tuples(rng, n):
    if n == 0:
        yield ()
        return
    for head in rng:
        for rest in _tuples(rng, n - 1):
            yield (head,) + rest


def test_kernel_and_image():
    a = [[2, 4], [1, 2]]
    kern = kernel_basis(a)
    assert len(kern) == 1
    assert mat_apply(a, kern[0]) == [0, 0]
    img = image_basis(a)
    lat = Lattice(2, img)
    assert lat.contains([2, 1])
    assert not lat.contains([1, 0])


def test_group_canonical():
    assert cyclic_group(6).canonical == (0, (6,))
    assert free_group(2).canonical == (2, ())
    g = FgAbGroup(2, [[2, 0], [0, 3]])
    assert g.canonical == (0, (2, 3)) or g.canonical == (0, (6,))
    # 2 and 3 merge into a single invariant factor 6
    assert g.canonical == (0, (6,))
    assert FgAbGroup(1, [[1]]).is_zero()


def _named(group):
    """Decompose into cyclic factors for the classification-formula oracles."""
    rank, factors = group.canonical
    return rank, list(factors)


def hom_oracle(a, b):
    """|Hom| by the classification formulas, as canonical data."""
    ra, fa = _named(a)
    rb, fb = _named(b)
    parts = []
    # Hom(Z, B) = B
    for _ in range(ra):
        parts += [0] * rb + fb
    # Hom(Z/k, Z) = 0 ; Hom(Z/k, Z/l) = Z/gcd
    for k in fa:
        for l in fb:
            parts.append(gcd(k, l))
    free = parts.count(0)
    tors = sorted(v for v in parts if v > 1)
    return free, tors


def canonical_multiset(group):
    """Elementary-divisor multiset, for comparing against oracles."""
    rank, factors = group.canonical
    prim = []
    for f in factors:
        q = f
        p = 2
        while q > 1:
            if q % p == 0:
                e = 1
                while q % (p ** (e + 1)) == 0:
                    e += 1
                prim.append(p ** e)
                q //= p ** e
            p += 1
    return rank, sorted(prim)


def _elementary(parts):
    prim = []
    for f in parts:
        q = f
        p = 2
        while q > 1:
            if q % p == 0:
                e = 1
                while q % (p ** (e + 1)) == 0:
                    e += 1
                prim.append(p ** e)
                q //= p ** e
            p += 1
    return sorted(prim)


def test_hom_ab_against_oracle():
    groups = [
        cyclic_group(2), cyclic_group(3), cyclic_group(4),
        free_group(1), FgAbGroup(2, [[2, 0]]),
        FgAbGroup(3, [[2, 0, 0], [0, 4, 0]]),
    ]
    for a in groups:
        for b in groups:
            got, reps = hom_ab(a, b)
            free, tors = hom_oracle(a, b)
            assert canonical_multiset(got) == (free, _elementary(tors))
            for h in reps:
                assert h.is_well_defined()


def test_hom_ab_examples():
    assert hom_ab(cyclic_group(2), free_group(1))[0].is_zero()
    g, _ = hom_ab(free_group(1), cyclic_group(6))
    assert g.canonical == (0, (6,))
    g, _ = hom_ab(cyclic_group(4), cyclic_group(6))
    assert g.canonical == (0, (2,))


def ext_oracle(a, b):
    ra, fa = _named(a)
    rb, fb = _named(b)
    parts = []
    # Ext(Z/k, Z) = Z/k ; Ext(Z/k, Z/l) = Z/gcd
    for k in fa:
        parts += [k] * rb
        for l in fb:
            parts.append(gcd(k, l))
    return 0, sorted(v for v in parts if v > 1)


def test_ext1_ab_against_oracle():
    groups = [
        cyclic_group(2), cyclic_group(3), cyclic_group(4),
        free_group(1), FgAbGroup(2, [[2, 0]]),
        FgAbGroup(3, [[2, 0, 0], [0, 4, 0]]),
    ]
    for a in groups:
        for b in groups:
            got = ext1_ab(a, b)
            free, tors = ext_oracle(a, b)
            assert canonical_multiset(got) == (free, _elementary(tors))


def test_ext1_examples():
    assert ext1_ab(free_group(1), cyclic_group(12)).is_zero()
    assert ext1_ab(cyclic_group(5), free_group(1)).canonical == (0, (5,))
    assert ext1_ab(cyclic_group(4), cyclic_group(6)).canonical == (0, (2,))


def tensor_oracle(a, b):
    ra, fa = _named(a)
    rb, fb = _named(b)
    parts = [0] * (ra * rb)
    for k in fa:
        parts += [k] * rb
    for l in fb:
        parts += [l] * ra
    for k in fa:
        for l in fb:
            parts.append(gcd(k, l))
    free = parts.count(0)
    return free, sorted(v for v in parts if v > 1)


def test_tensor_ab_against_oracle():
    groups = [
        cyclic_group(2), cyclic_group(3), cyclic_group(4),
        free_group(1), FgAbGroup(2, [[2, 0]]),
    ]
    for a in groups:
        for b in groups:
            got, _ = tensor_ab(a, b)
            free, tors = tensor_oracle(a, b)
            assert canonical_multiset(got) == (free, _elementary(tors))


def test_tensor_examples():
    assert tensor_ab(cyclic_group(2), cyclic_group(3))[0].is_zero()
    assert tensor_ab(cyclic_group(4), cyclic_group(6))[0].canonical == (0, (2,))
    g, _ = tensor_ab(free_group(1), cyclic_group(9))
    assert g.canonical == (0, (9,))


def test_homology_two_term():
    z = free_group(1)
    c = AbComplex(0, [z, z], [GroupHom(z, z, [[2]])])
    h = homology_ab(c)
    assert h[0].group.canonical == (0, (2,))
    assert h[1].group.is_zero()


def test_homology_zero_complex():
    z0 = FgAbGroup(0)
    c = AbComplex(0, [z0, z0, z0], [zero_hom(z0, z0), zero_hom(z0, z0)])
    h = homology_ab(c)
    assert all(h[d].group.is_zero() for d in h)


def test_homology_s_minus_lambda_underlying():
    # Z[C_p] <-(1-gamma)- Z[C_p] <-Delta- Z in degrees -2, -1, 0 has
    # homology Z concentrated in degree -2 at the underlying level.
    p = 3
    zc = free_group(p)
    z = free_group(1)
    one_minus_gamma = [[0] * p for _ in range(p)]
    for j in range(p):
        one_minus_gamma[j][j] += 1
        one_minus_gamma[(j + 1) % p][j] -= 1
    delta = [[1]] * p
    c = AbComplex(-2, [zc, zc, z],
                  [GroupHom(zc, zc, one_minus_gamma), GroupHom(z, zc, delta)])
    h = homology_ab(c)
    assert h[-2].group.canonical == (1, ())
    assert h[-1].group.is_zero()
    assert h[0].group.is_zero()


def test_homology_contractible_summand_invariance():
    rng = random.Random(5)
    z = free_group(1)
    base = AbComplex(0, [z, z], [GroupHom(z, z, [[4]])])
    h0 = homology_ab(base)
    # adjoin a contractible summand Z <-1- Z
    z2 = free_group(2)
    d = GroupHom(z2, z2, [[4, 0], [0, 1]])
    h1 = homology_ab(AbComplex(0, [z2, z2], [d]))
    for deg in (0, 1):
        assert h0[deg].group.canonical == h1[deg].group.canonical
    del rng


def test_induced_map_on_homology():
    # complex A: Z <-2- Z ; complex B: Z <-4- Z ; chain map (1, 2)
    z = free_group(1)
    ca = AbComplex(0, [z, z], [GroupHom(z, z, [[4]])])
    cb = AbComplex(0, [z, z], [GroupHom(z, z, [[2]])])
    ha = homology_ab(ca)
    hb = homology_ab(cb)
    # f0 = 1 : degree-0 map sends H0(A) = Z/4 onto H0(B) = Z/2
    f = induced_map(ha[0], hb[0], [[1]])
    assert f.is_well_defined()
    assert f.cokernel_group.is_zero()
    assert f.kernel_group[0].canonical == (0, (2,))


def test_group_hom_helpers():
    g = cyclic_group(4)
    h = identity_hom(g)
    assert h.is_iso()
    two = GroupHom(g, g, [[2]])
    assert two.is_well_defined()
    assert two.kernel_group[0].canonical == (0, (2,))
    assert two.cokernel_group.canonical == (0, (2,))
    assert two.image_group.canonical == (0, (2,))
