"""Box product and internal Hom of Z-modules over C_{p^n}.

The box product is computed level by level from the bottom: each new level
is the tensor product at that level plus the Weyl coinvariants of the level
below, glued along Frobenius reciprocity relations, with the transfer into
the coinvariant summand being the quotient map.  A final cohomological
quotient lands the result in Z-modules; on Z-module inputs that quotient is
expected to be an isomorphism and the computation records whether it was.

The internal Hom is assembled from the solver for the group of natural
transformations: Hom(M, N)(G/C_{p^k}) = Hom(M, N lifted by G/C_{p^k}).
"""

from .intlin import (
    FgAbGroup,
    GroupHom,
    Lattice,
    columns,
    from_columns,
    identity,
    mat_apply,
    tensor_ab,
    zeros,
)
from .mackey import (
    MackeyFunctor,
    MackeyHom,
    cohomological_quotient,
    is_cohomological,
)
from .burnside import (
    SpanWord,
    gamma_matrix,
    lift,
    lift_hom,
    point,
    product_matrix,
    single_orbit,
)


class BoxResult(MackeyFunctor):
    """Box product with a record of whether the Z-module quotient was trivial."""

    quotient_was_iso = True


def box(m, n_):
    """The box product of two Z-modules by the inductive formula."""
    if m.shape != n_.shape:
        raise ValueError("box product over different shapes")
    if not (is_cohomological(m) and is_cohomological(n_)):
        raise ValueError("box product restricted to cohomological functors")
    shape = m.shape
    p = shape.p

    levels = []
    res = []
    tr = []
    weyl = []
    tensor_pairs = []

    t0, pair0 = tensor_ab(m.level[0], n_.level[0])
    levels.append(t0)
    tensor_pairs.append(pair0)
    weyl.append(_tensor_endo(m.weyl[0], n_.weyl[0], t0, pair0))

    for k in range(1, shape.n + 1):
        tk, pairk = tensor_ab(m.level[k], n_.level[k])
        below = levels[k - 1]
        step = shape.subgroup_step(k - 1)
        coinv_twist = weyl[k - 1]
        coinv_rel = _endo_minus_identity(_hom_pow(coinv_twist, step))
        gens = tk.gens + below.gens
        rels = []
        for col in tk.relations:
            rels.append(col + [0] * below.gens)
        for col in below.relations:
            rels.append([0] * tk.gens + col)
        for col in columns(coinv_rel.matrix):
            if any(col):
                rels.append([0] * tk.gens + col)

        fr = _frobenius_relations(m, n_, k, levels, tensor_pairs, tr, weyl,
                                  tk, pairk, below)
        for col in fr:
            if any(col):
                rels.append(col)

        group = FgAbGroup(gens, rels)
        levels.append(group)
        tensor_pairs.append(pairk)

        # transfer: project the level below onto the coinvariant block
        tr_mat = zeros(gens, below.gens)
        for j in range(below.gens):
            tr_mat[tk.gens + j][j] = 1
        tr.append(GroupHom(below, group, tr_mat))

        # restriction: diagonal on the tensor block, the double-coset sum on
        # the coinvariant block
        res_mat = zeros(below.gens, gens)
        diag = _tensor_hom_matrix(m.res[k - 1], n_.res[k - 1], pairk,
                                  tensor_pairs[k - 1])
        for r in range(below.gens):
            for c in range(tk.gens):
                if r < len(diag) and diag[r][c]:
                    res_mat[r][c] = diag[r][c]
        summed = _weyl_orbit_sum(coinv_twist, step, p)
        for r in range(below.gens):
            for c in range(below.gens):
                if summed[r][c]:
                    res_mat[r][tk.gens + c] = summed[r][c]
        res.append(GroupHom(group, below, res_mat))

        # weyl: diagonal on the tensor block, induced on the coinvariants
        w_mat = zeros(gens, gens)
        wdiag = _tensor_hom_matrix(m.weyl[k], n_.weyl[k], pairk, pairk)
        for r in range(tk.gens):
            for c in range(tk.gens):
                if wdiag[r][c]:
                    w_mat[r][c] = wdiag[r][c]
        for r in range(below.gens):
            for c in range(below.gens):
                if weyl[k - 1].matrix[r][c]:
                    w_mat[tk.gens + r][tk.gens + c] = weyl[k - 1].matrix[r][c]
        weyl.append(GroupHom(group, group, w_mat))

    # rebuild homs against the final (quotiented) groups
    out = MackeyFunctor(shape, levels,
                        [GroupHom(levels[k + 1], levels[k], res[k].matrix)
                         for k in range(shape.n)],
                        [GroupHom(levels[k], levels[k + 1], tr[k].matrix)
                         for k in range(shape.n)],
                        [GroupHom(levels[k], levels[k], weyl[k].matrix)
                         for k in range(shape.n + 1)])
    quotiented, was_iso = cohomological_quotient(out)
    result = BoxResult(shape, quotiented.level, quotiented.res, quotiented.tr,
                       quotiented.weyl)
    result.quotient_was_iso = was_iso
    return result


def _tensor_endo(f, g, group, pair):
    mat = _tensor_hom_matrix(f, g, pair, pair)
    return GroupHom(group, group, mat)


def _tensor_hom_matrix(f, g, src_pair, tgt_pair):
    src_m, src_n = f.source.gens, g.source.gens
    tgt_m, tgt_n = f.target.gens, g.target.gens
    out = zeros(tgt_m * tgt_n, src_m * src_n)
    for i in range(src_m):
        for j in range(src_n):
            c = src_pair(i, j)
            for r1 in range(tgt_m):
                v = f.matrix[r1][i]
                if not v:
                    continue
                for r2 in range(tgt_n):
                    w = g.matrix[r2][j]
                    if w:
                        out[tgt_pair(r1, r2)][c] += v * w
    return out


def _hom_pow(h, e):
    mat = identity(h.source.gens)
    for _ in range(e):
        mat = [[sum(h.matrix[r][t] * mat[t][c] for t in range(len(mat)))
                for c in range(len(mat))] for r in range(len(h.matrix))]
    return GroupHom(h.source, h.target, mat)


def _endo_minus_identity(h):
    n = h.source.gens
    mat = [[h.matrix[r][c] - (1 if r == c else 0) for c in range(n)]
           for r in range(n)]
    return GroupHom(h.source, h.target, mat)


def _weyl_orbit_sum(w, step, p):
    """Matrix of sum_{i<p} w^(i*step)."""
    n = w.source.gens
    out = zeros(n, n)
    for i in range(p):
        mat = _hom_pow(w, i * step).matrix
        for r in range(n):
            for c in range(n):
                out[r][c] += mat[r][c]
    return out


def _weyl_orbit_vectors(m, k, vec):
    """All weyl-power translates of a generator vector at level k."""
    out = []
    seen = set()
    current = list(vec)
    order = m.shape.weyl_order(k)
    for _ in range(order):
        key = tuple(current)
        if key in seen:
            break
        seen.add(key)
        out.append(current)
        current = m.weyl[k].apply(current)
    return out


def _frobenius_relations(m, n_, k, levels, tensor_pairs, tr, weyl, tk, pairk,
                         below):
    """FR relator columns at level k, over weyl orbits of generator pairs.

    Relations: a (x) Tr(b) - Tr(Res(a) (x) b) and Tr(c) (x) d -
    Tr(c (x) Res(d)), for a, d generators at level k and b, c generators at
    any level j < k.
    """
    gens = tk.gens + below.gens
    out = []

    def tensor_embed(vec_m, vec_n, pair, size):
        col = [0] * size
        for i, vm in enumerate(vec_m):
            if not vm:
                continue
            for j, vn in enumerate(vec_n):
                if vn:
                    col[pair(i, j)] += vm * vn
        return col

    def box_transfer_chain(vec, j):
        """Transfer an element of box level j up to box level k - 1."""
        current = vec
        for lev in range(j, k - 1):
            current = tr[lev].apply(current)
        return current

    for j in range(k):
        res_m = m.res_chain(k, j)
        res_n = n_.res_chain(k, j)
        tr_m = m.tr_chain(j, k)
        tr_n = n_.tr_chain(j, k)
        for a_idx in range(m.level[k].gens):
            a0 = [1 if t == a_idx else 0 for t in range(m.level[k].gens)]
            for a in _weyl_orbit_vectors(m, k, a0):
                res_a = res_m.apply(a)
                for b_idx in range(n_.level[j].gens):
                    b0 = [1 if t == b_idx else 0 for t in range(n_.level[j].gens)]
                    for b in _weyl_orbit_vectors(n_, j, b0):
                        # a (x) Tr(b) sits in the tensor block of level k;
                        # Tr(Res(a) (x) b) climbs the box tower from level j
                        first = tensor_embed(a, tr_n.apply(b), pairk, tk.gens)
                        inner = tensor_embed(res_a, b, tensor_pairs[j],
                                             levels[j].gens)
                        lowered = box_transfer_chain(inner, j)
                        col = first + [0] * below.gens
                        for t, v in enumerate(lowered):
                            col[tk.gens + t] -= v
                        out.append(col)
        for d_idx in range(n_.level[k].gens):
            d0 = [1 if t == d_idx else 0 for t in range(n_.level[k].gens)]
            for d in _weyl_orbit_vectors(n_, k, d0):
                res_d = res_n.apply(d)
                for c_idx in range(m.level[j].gens):
                    c0 = [1 if t == c_idx else 0 for t in range(m.level[j].gens)]
                    for c in _weyl_orbit_vectors(m, j, c0):
                        first = tensor_embed(tr_m.apply(c), d, pairk, tk.gens)
                        inner = tensor_embed(c, res_d, tensor_pairs[j],
                                             levels[j].gens)
                        lowered = box_transfer_chain(inner, j)
                        col = first + [0] * below.gens
                        for t, v in enumerate(lowered):
                            col[tk.gens + t] -= v
                        out.append(col)
    return out


# ---------------------------------------------------------------------------
# the group of natural transformations


def hom_group(m, n_):
    """Hom(M, N) as an abelian group with representative MackeyHoms.

    Solves the commutation constraints (res, tr, weyl at every level) for
    levelwise matrices, modulo maps that are zero in the target
    presentations.
    """
    if m.shape != n_.shape:
        raise ValueError("hom over different shapes")
    shape = m.shape
    nlev = shape.n + 1
    sizes = [n_.level[k].gens * m.level[k].gens for k in range(nlev)]
    offsets = []
    total = 0
    for s in sizes:
        offsets.append(total)
        total += s

    def var(k, i, j):
        # entry (i, j) of the level-k matrix: row i of N(k), col j of M(k)
        return offsets[k] + i * m.level[k].gens + j

    blocks = []

    def emit(rows, target_group):
        blocks.append((rows, target_group))

    for k in range(nlev):
        # well-definedness: A_k . rel(M_k) = 0 in N_k
        for rel in m.level[k].relations:
            rows = []
            for i in range(n_.level[k].gens):
                row = [0] * total
                for j in range(m.level[k].gens):
                    if rel[j]:
                        row[var(k, i, j)] = rel[j]
                rows.append(row)
            emit(rows, n_.level[k])
        # weyl: A_k w^M = w^N A_k
        rows = []
        for i in range(n_.level[k].gens):
            for j in range(m.level[k].gens):
                row = [0] * total
                for t in range(m.level[k].gens):
                    if m.weyl[k].matrix[t][j]:
                        row[var(k, i, t)] += m.weyl[k].matrix[t][j]
                for t in range(n_.level[k].gens):
                    if n_.weyl[k].matrix[i][t]:
                        row[var(k, t, j)] -= n_.weyl[k].matrix[i][t]
                rows.append(row)
        emit(rows, _repeat_group(n_.level[k], m.level[k].gens))
    for k in range(shape.n):
        # res: A_k res^M_k = res^N_k A_{k+1}  (maps M(k+1) -> N(k))
        rows = []
        for i in range(n_.level[k].gens):
            for j in range(m.level[k + 1].gens):
                row = [0] * total
                for t in range(m.level[k].gens):
                    if m.res[k].matrix[t][j]:
                        row[var(k, i, t)] += m.res[k].matrix[t][j]
                for t in range(n_.level[k + 1].gens):
                    if n_.res[k].matrix[i][t]:
                        row[var(k + 1, t, j)] -= n_.res[k].matrix[i][t]
                rows.append(row)
        emit(rows, _repeat_group(n_.level[k], m.level[k + 1].gens))
        # tr: A_{k+1} tr^M_k = tr^N_k A_k  (maps M(k) -> N(k+1))
        rows = []
        for i in range(n_.level[k + 1].gens):
            for j in range(m.level[k].gens):
                row = [0] * total
                for t in range(m.level[k + 1].gens):
                    if m.tr[k].matrix[t][j]:
                        row[var(k + 1, i, t)] += m.tr[k].matrix[t][j]
                for t in range(n_.level[k].gens):
                    if n_.tr[k].matrix[i][t]:
                        row[var(k, t, j)] -= n_.tr[k].matrix[i][t]
                rows.append(row)
        emit(rows, _repeat_group(n_.level[k + 1], m.level[k].gens))

    big_rows = []
    big_lattice_cols = []
    row_base = 0
    for rows, target in blocks:
        big_rows.extend(rows)
        for col in target._rel_lattice.basis:
            padded = [0] * row_base + list(col)
            big_lattice_cols.append(padded)
        row_base += len(rows)
    for col in big_lattice_cols:
        col.extend([0] * (row_base - len(col)))

    from .intlin import preimage_lattice

    if big_rows:
        sol_cols = preimage_lattice(big_rows, Lattice(row_base, big_lattice_cols))
    else:
        sol_cols = columns(identity(total))

    trivial = []
    for k in range(nlev):
        for rel in n_.level[k]._rel_lattice.basis:
            for j in range(m.level[k].gens):
                col = [0] * total
                for i in range(n_.level[k].gens):
                    col[var(k, i, j)] = rel[i]
                trivial.append(col)

    sol = Lattice(total, sol_cols)
    rels = []
    for t in trivial:
        coords = sol.coordinates(t)
        if coords is None:
            raise ArithmeticError("trivial transformations escape the solution space")
        rels.append(coords)
    group = FgAbGroup(len(sol.basis), rels)
    reps = [_unpack_hom(m, n_, c, var) for c in sol.basis]
    return group, reps


def _repeat_group(group, copies):
    """Direct sum of ``copies`` copies of a group (for stacked constraints)."""
    gens = group.gens * copies
    rels = []
    for c in range(copies):
        for col in group.relations:
            out = [0] * gens
            out[c * group.gens:(c + 1) * group.gens] = col
            rels.append(out)
    return FgAbGroup(gens, rels)


def _unpack_hom(m, n_, flat, var):
    maps = []
    for k in range(m.shape.n + 1):
        mat = zeros(n_.level[k].gens, m.level[k].gens)
        for i in range(n_.level[k].gens):
            for j in range(m.level[k].gens):
                mat[i][j] = flat[var(k, i, j)]
        maps.append(GroupHom(m.level[k], n_.level[k], mat))
    return MackeyHom(m, n_, maps)


def hom_group_express(m, n_, group, reps, candidate):
    """Coordinates of a MackeyHom in the presentation built by hom_group."""
    from .intlin import solve_integer

    total = sum(n_.level[k].gens * m.level[k].gens for k in range(m.shape.n + 1))

    def flatten(mackey_hom):
        vec = []
        for k in range(m.shape.n + 1):
            for i in range(n_.level[k].gens):
                vec.extend(mackey_hom.maps[k].matrix[i])
        return vec

    flats = [flatten(rep) for rep in reps]
    trivial = []
    for k in range(m.shape.n + 1):
        base = sum(n_.level[t].gens * m.level[t].gens for t in range(k))
        for rel in n_.level[k]._rel_lattice.basis:
            for j in range(m.level[k].gens):
                col = [0] * total
                for i in range(n_.level[k].gens):
                    col[base + i * m.level[k].gens + j] = rel[i]
                trivial.append(col)
    mat = (from_columns(flats + trivial, rows=total)
           if (flats or trivial) else zeros(total, 0))
    sol = solve_integer(mat, flatten(candidate))
    if sol is None:
        raise ArithmeticError("candidate is not in the homomorphism group")
    return sol[0][:len(flats)]


# ---------------------------------------------------------------------------
# internal Hom


def internal_hom(m, n_):
    """The internal Hom Mackey functor of two Z-modules."""
    if not (is_cohomological(m) and is_cohomological(n_)):
        raise ValueError("internal Hom restricted to cohomological functors")
    shape = m.shape
    lifts = [lift(n_, single_orbit(shape, k)) for k in range(shape.n + 1)]
    data = [hom_group(m, l) for l in lifts]
    groups = [d[0] for d in data]

    def induced(level_src, level_tgt, morphism_matrix):
        """Postcomposition with the lift morphism induced by an orbit map."""
        src_lift = lifts[level_src]
        tgt_lift = lifts[level_tgt]
        connecting = lift_hom(n_, morphism_matrix,
                              single_orbit(shape, level_tgt),
                              single_orbit(shape, level_src),
                              lifted_src=tgt_lift, lifted_tgt=src_lift)
        cols = []
        for rep in data[level_src][1]:
            composed = connecting.compose(rep)
            cols.append(hom_group_express(m, tgt_lift, groups[level_tgt],
                                          data[level_tgt][1], composed))
        mat = (from_columns(cols, rows=groups[level_tgt].gens)
               if cols else zeros(groups[level_tgt].gens, 0))
        return GroupHom(groups[level_src], groups[level_tgt], mat)

    res = []
    tr = []
    for k in range(shape.n):
        res_span = SpanWord(shape, k, k + 1, 0).matrix()
        tr_span = SpanWord(shape, k + 1, k, 0).matrix()
        res.append(induced(k + 1, k, res_span))
        tr.append(induced(k, k + 1, tr_span))
    weyl = []
    for k in range(shape.n + 1):
        weyl.append(induced(k, k, gamma_matrix(single_orbit(shape, k))))
    return MackeyFunctor(shape, groups, res, tr, weyl)
