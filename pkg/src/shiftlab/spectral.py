"""Finite matrix blocks of the nonlocal Laplacian and the Hamiltonian.

Over a bisection with s-word beta, the level-d space consists of functions
on the cylinder C(beta) constant on the depth-(len(beta)+d) sub-cylinders.
These spaces are exactly invariant (no truncation error): the kernel
d(x,y)^-dim only sees prefixes that the level already resolves.

Matrices are expressed in the orthonormalized indicator basis
e_cell = indicator / sqrt(measure).  In that basis the Laplacian block is
genuinely symmetric and positive semidefinite; its kernel is spanned by
the coefficient vector of the constant function (the square roots of the
cell measures), available as ``OperatorBlock.constant_vector``.

Eigenvalues attach to sub-cylinders: the cell C(beta nu) carries
    lam * u[last(nu)] + lam * sum over the extension steps of
        u[step source] * (1 - P[source, target]),
with one eigenvector per "child minus one" at each internal node (the Haar
wavelets).  Each extension step increases the value by (lam - 1) * u[new
letter], so the value is strictly increasing along extensions; spectrum
enumeration prunes on that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    AdjacencySpec,
    PerronFrobeniusData,
    Word,
    conformal_measure,
    enumerate_words,
    is_admissible,
    word_cap,
)
from .errors import LengthOverflow, NotAdmissible, PrefixMismatch
from .groupoid import BisectionIndex, bisections_up_to, _ending_counts


@dataclass(frozen=True)
class LevelBasis:
    """Ordered sub-cylinder cells of one cylinder at a fixed relative depth."""

    base: Word
    depth: int
    cells: tuple[Word, ...]  # relative extensions, lexicographic

    @property
    def size(self) -> int:
        return len(self.cells)

    def full_words(self) -> list[Word]:
        return [self.base + nu for nu in self.cells]


def level_basis(
    spec: AdjacencySpec, base: Word, depth: int, cap: int | None = None
) -> LevelBasis:
    if not base:
        raise NotAdmissible("level basis needs a nonempty base word")
    if not is_admissible(spec, base):
        raise NotAdmissible(f"base {base} is not admissible")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    limit = word_cap(cap)
    cells: list[Word] = [()]
    for _ in range(depth):
        nxt = []
        for nu in cells:
            last = (base + nu)[-1]
            for c in spec.successors(last):
                nxt.append(nu + (c,))
        if len(nxt) > limit:
            raise LengthOverflow(f"level basis exceeds cap {limit}")
        cells = nxt
    return LevelBasis(base=base, depth=depth, cells=tuple(cells))


def cell_measures(pf: PerronFrobeniusData, basis: LevelBasis) -> np.ndarray:
    return np.array([conformal_measure(pf, w) for w in basis.full_words()])


@dataclass(frozen=True, eq=False)
class OperatorBlock:
    basis: LevelBasis
    matrix: np.ndarray
    kind: str  # "delta" | "dirac"
    bisection: BisectionIndex | None = None

    def constant_vector(self, pf: PerronFrobeniusData) -> np.ndarray:
        """Coefficients of the constant function, unit norm."""
        mu = cell_measures(pf, self.basis)
        vec = np.sqrt(mu)
        return vec / np.linalg.norm(vec)


def eigenvalue_formula(
    pf: PerronFrobeniusData, s_word: Word, nu: Word
) -> float:
    """Laplacian eigenvalue attached to the cell C(nu) inside C(s_word)."""
    if not s_word:
        raise PrefixMismatch("s_word must be nonempty")
    if nu[: len(s_word)] != s_word:
        raise PrefixMismatch(f"{nu} does not extend {s_word}")
    if not is_admissible(pf.spec, nu):
        raise NotAdmissible(f"word {nu} is not admissible")
    lam = pf.lambda_max
    total = lam * pf.u_of(nu[-1])
    m = len(nu)
    for k in range(m - len(s_word)):
        a = nu[m - k - 2]
        b = nu[m - k - 1]
        total += lam * pf.u_of(a) * (1.0 - pf.p_of(a, b))
    return total


def _common_prefix_length(a: Word, b: Word) -> int:
    w = 0
    for x, y in zip(a, b):
        if x != y:
            break
        w += 1
    return w


def delta_matrix(
    pf: PerronFrobeniusData, base: Word, depth: int, cap: int | None = None
) -> OperatorBlock:
    """Laplacian block on the level-``depth`` space over C(base).

    Diagonal entries come from :func:`eigenvalue_formula` minus the
    top-of-cell term; the (i, j) off-diagonal is
    -lambda_max^w * sqrt(mu_i mu_j) with w the common-prefix length of the
    two full cell words.  The brute-force shell oracle in the test suite
    recomputes the same action from sub-cylinders at extra depth.
    """
    if depth < 1:
        basis = level_basis(pf.spec, base, 0, cap)
        return OperatorBlock(basis, np.zeros((1, 1)), "delta")
    basis = level_basis(pf.spec, base, depth, cap)
    words = basis.full_words()
    mu = cell_measures(pf, basis)
    root_mu = np.sqrt(mu)
    lam = pf.lambda_max
    size = basis.size
    mat = np.zeros((size, size))
    for i, w in enumerate(words):
        mat[i, i] = eigenvalue_formula(pf, base, w) - lam * pf.u_of(w[-1])
    for i in range(size):
        for j in range(i + 1, size):
            w = _common_prefix_length(words[i], words[j])
            val = -(lam**w) * root_mu[i] * root_mu[j]
            mat[i, j] = val
            mat[j, i] = val
    return OperatorBlock(basis, _lock(mat), "delta")


def _lock(mat: np.ndarray) -> np.ndarray:
    mat.flags.writeable = False
    return mat


@dataclass(frozen=True)
class WaveletVector:
    """Mean-zero unit vector constant on the children of one sub-cylinder."""

    support_cell: Word  # full word of the carrying cylinder
    children: tuple[Word, ...]  # full words of the child cylinders
    values: tuple[float, ...]  # function value on each child
    eigenvalue: float

    def coefficients(
        self, pf: PerronFrobeniusData, basis: LevelBasis
    ) -> np.ndarray:
        """Expansion in the orthonormalized basis of a containing level."""
        out = np.zeros(basis.size)
        child_of = {c: v for c, v in zip(self.children, self.values)}
        k = len(self.support_cell) + 1
        for i, w in enumerate(basis.full_words()):
            v = child_of.get(w[:k])
            if v is not None:
                out[i] = v * np.sqrt(conformal_measure(pf, w))
        return out


def wavelet_basis(
    pf: PerronFrobeniusData, base: Word, depth: int, cap: int | None = None
) -> list[WaveletVector]:
    """Haar wavelets spanning the mean-zero part of the level-``depth`` space.

    At each sub-cylinder with m >= 2 admissible children this emits m - 1
    orthonormal mean-zero child-constant vectors, fixed by Gram-Schmidt
    against the child ordering; together with the constant they form an
    orthonormal basis.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    spec = pf.spec
    out: list[WaveletVector] = []
    for t in range(depth):
        nodes = level_basis(spec, base, t, cap)
        for nu in nodes.cells:
            word = base + nu
            children = tuple(word + (c,) for c in spec.successors(word[-1]))
            m = len(children)
            if m < 2:
                continue
            mu = np.array([conformal_measure(pf, c) for c in children])
            eig = eigenvalue_formula(pf, base, word)
            taken: list[np.ndarray] = [np.ones(m)]  # constant on the cell
            for i in range(m - 1):
                vec = np.zeros(m)
                vec[i] = 1.0
                for prev in taken:
                    prev_n2 = float((prev * prev * mu).sum())
                    vec = vec - prev * float((vec * prev * mu).sum()) / prev_n2
                norm = np.sqrt(float((vec * vec * mu).sum()))
                vec /= norm
                taken.append(vec)
                out.append(
                    WaveletVector(
                        support_cell=word,
                        children=children,
                        values=tuple(float(x) for x in vec),
                        eigenvalue=eig,
                    )
                )
    return out


def dirac_block(
    pf: PerronFrobeniusData,
    gamma: BisectionIndex,
    depth: int,
    cap: int | None = None,
) -> OperatorBlock:
    """Hamiltonian block over one bisection at a level depth.

    The block is length * P - (1 - P)(Delta + length), where P projects
    onto the constant when the index is a finite-word (one-letter s) one
    and is zero otherwise.
    """
    ell = float(gamma.length_L)
    delta = delta_matrix(pf, gamma.s_word, depth, cap)
    s = delta.matrix
    size = delta.basis.size
    if gamma.is_fock:
        c = delta.constant_vector(pf)
        proj = np.outer(c, c)
        mat = ell * proj - (np.eye(size) - proj) @ (s + ell * np.eye(size))
        mat = 0.5 * (mat + mat.T)
    else:
        mat = -(s + ell * np.eye(size))
    return OperatorBlock(delta.basis, _lock(mat), "dirac", bisection=gamma)


def embed_level(
    pf: PerronFrobeniusData, coarse: LevelBasis, fine: LevelBasis
) -> np.ndarray:
    """Isometric inclusion of level-d coefficients into level-(d+k)."""
    if fine.base != coarse.base or fine.depth < coarse.depth:
        raise ValueError("fine basis must refine the coarse one")
    mat = np.zeros((fine.size, coarse.size))
    coarse_index = {nu: i for i, nu in enumerate(coarse.cells)}
    for j, nu in enumerate(fine.cells):
        i = coarse_index[nu[: coarse.depth]]
        ratio = conformal_measure(pf, fine.base + nu) / conformal_measure(
            pf, coarse.base + nu[: coarse.depth]
        )
        mat[j, i] = np.sqrt(ratio)
    return mat


def _prefix_count(
    spec: AdjacencySpec, beta: Word, r_len: int, r_ends: list[int]
) -> int:
    """Number of r-words of a length completing ``beta`` to a bisection."""
    if r_len == 0:
        return 1
    n = spec.n
    last = beta[-1] - 1
    forbidden = beta[-2] if len(beta) >= 2 else None
    total = 0
    for a in range(1, n + 1):
        if not spec.a[a - 1][last]:
            continue
        if forbidden is not None and a == forbidden:
            continue
        total += r_ends[a - 1]
    return total


def merge_multiset(
    pairs: list[tuple[float, int]], tol: float = 1e-9
) -> list[tuple[float, int]]:
    """Cluster (value, multiplicity) pairs whose values agree within tol."""
    pairs = sorted(pairs)
    merged: list[tuple[float, int]] = []
    for val, mult in pairs:
        if merged and val - merged[-1][0] <= tol:
            old_val, old_mult = merged[-1]
            merged[-1] = (old_val, old_mult + mult)
        else:
            merged.append((val, mult))
    return merged


def _s_word_eigenvalues(
    pf: PerronFrobeniusData,
    beta: Word,
    r_len: int,
    r_ends: list[int],
    cutoff: float,
    merge_tol: float,
    limit: int,
) -> list[tuple[float, int]]:
    """Kernel and wavelet eigenvalues contributed by one s-word."""
    spec = pf.spec
    ell = float(r_len + len(beta))
    n_prefix = _prefix_count(spec, beta, r_len, r_ends)
    if n_prefix == 0:
        return []
    found = [(ell if len(beta) == 1 else -ell, n_prefix)]
    stack = [beta]
    visited = 0
    while stack:
        nu = stack.pop()
        val = eigenvalue_formula(pf, beta, nu)
        if val + ell > cutoff + merge_tol:
            continue
        kids = spec.successors(nu[-1])
        if len(kids) >= 2:
            found.append((-(val + ell), (len(kids) - 1) * n_prefix))
        visited += 1
        if visited > limit:
            raise LengthOverflow(f"spectrum walk exceeds cap {limit}")
        for c in kids:
            stack.append(nu + (c,))
    return found


def spectrum(
    pf: PerronFrobeniusData,
    cutoff: float,
    merge_tol: float = 1e-9,
    cap: int | None = None,
    threads: int = 1,
) -> list[tuple[float, int]]:
    """All Hamiltonian eigenvalues with |value| <= cutoff, with multiplicity.

    |D| dominates the length function, so only indices with
    r_len + s_len <= cutoff contribute.  Per s-word: the constant gives
    +/-length (sign by one-letter s); every sub-cylinder cell nu with
    m >= 2 children gives -(cell value + length) with multiplicity m - 1,
    scaled by the number of completing r-words.  Cell values are strictly
    increasing along extensions, which bounds the walk.  Per-s-word walks
    are independent pure functions; threads > 1 evaluates them in a pool
    with the same deterministic aggregation order.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    spec = pf.spec
    limit = word_cap(cap)
    tasks: list[tuple[Word, int, list[int]]] = []
    for total_len in range(1, int(np.floor(cutoff + merge_tol)) + 1):
        for s_len in range(1, total_len + 1):
            r_len = total_len - s_len
            r_ends = _ending_counts(spec, r_len) if r_len else []
            for beta in enumerate_words(spec, s_len, cap):
                tasks.append((beta, r_len, r_ends))

    def work(task):
        beta, r_len, r_ends = task
        return _s_word_eigenvalues(
            pf, beta, r_len, r_ends, cutoff, merge_tol, limit
        )

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(work, tasks))
    else:
        chunks = [work(t) for t in tasks]
    found = [pair for chunk in chunks for pair in chunk]
    return merge_multiset(found, merge_tol)


def spectrum_dense(
    pf: PerronFrobeniusData,
    cutoff: float,
    merge_tol: float = 1e-9,
    cap: int | None = None,
) -> list[tuple[float, int]]:
    """Brute-force check of :func:`spectrum` by per-block diagonalization."""
    found: list[tuple[float, int]] = []
    for gamma in bisections_up_to(pf.spec, int(np.floor(cutoff + merge_tol)), cap):
        ell = gamma.length_L
        depth = 1
        while True:
            frontier = level_basis(pf.spec, gamma.s_word, depth, cap)
            vals = [
                eigenvalue_formula(pf, gamma.s_word, gamma.s_word + nu)
                for nu in frontier.cells
            ]
            if min(vals) + ell > cutoff + merge_tol:
                break
            depth += 1
        block = dirac_block(pf, gamma, depth, cap)
        eigs = np.linalg.eigvalsh(block.matrix)
        for e in eigs:
            if abs(e) <= cutoff + merge_tol:
                found.append((float(e), 1))
    return merge_multiset(found, merge_tol)
