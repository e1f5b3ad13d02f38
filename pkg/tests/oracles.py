"""Independent brute-force oracles used by the test suite.

These recompute the library's closed forms by direct summation or
enumeration, staying off the code paths they check.
"""

import numpy as np

from shiftlab.core import conformal_measure
from shiftlab.spectral import _common_prefix_length, level_basis


def shell_delta_values(pf, base, depth, values, extra=2):
    """Apply the nonlocal kernel to a level function by raw shell summation.

    Both the evaluation point and the integration variable run over cells
    refined `extra` levels below the function's own level; the summand
    vanishes inside a coarse cell, and the distance between distinct fine
    cells is read off their common prefix.  Exact for level functions.
    Also asserts the result is constant on coarse cells.
    """
    spec = pf.spec
    coarse = level_basis(spec, base, depth)
    fine = level_basis(spec, base, depth + extra)
    fw = fine.full_words()
    mu = [conformal_measure(pf, w) for w in fw]
    coarse_of = {nu: i for i, nu in enumerate(coarse.cells)}
    anc = [coarse_of[nu[:depth]] for nu in fine.cells]
    lam = pf.lambda_max
    per_coarse = {}
    for gi, gw in enumerate(fw):
        total = 0.0
        for hi, hw in enumerate(fw):
            ci, cj = anc[gi], anc[hi]
            if ci == cj:
                continue
            w = _common_prefix_length(gw, hw)
            total += (values[ci] - values[cj]) * lam**w * mu[hi]
        prev = per_coarse.setdefault(anc[gi], total)
        assert abs(prev - total) < 1e-10, "kernel image not level-constant"
    return np.array([per_coarse[i] for i in range(coarse.size)])


def shifted_cylinder_mass(pf, word, k):
    """Measure of the k-fold shift image of a cylinder, by enumeration."""
    spec = pf.spec
    if k < len(word):
        return conformal_measure(pf, word[k:])
    assert k == len(word)
    return sum(conformal_measure(pf, (j,)) for j in spec.successors(word[-1]))


def eigenvalue_multiset(pf, base, depth):
    """Expected Laplacian block spectrum from the closed form: zero for the
    constant plus, per internal cell with m children, the cell value with
    multiplicity m - 1."""
    from shiftlab.spectral import eigenvalue_formula, merge_multiset

    spec = pf.spec
    pairs = [(0.0, 1)]
    for t in range(depth):
        for nu in level_basis(spec, base, t).cells:
            w = base + nu
            kids = spec.successors(w[-1])
            if len(kids) >= 2:
                pairs.append((eigenvalue_formula(pf, base, w), len(kids) - 1))
    return merge_multiset(pairs)
