"""Concrete magic-unitary models and the lazy shift-tensor operator algebra.

A model assigns each grid position a d x d projection such that every row
and column sums to the identity.  Word operators represent
shift^m composed with finitely many tensor legs of an infinite product;
legs are stored sparsely (identity elsewhere), since every computation
touches finitely many of them.  The generator at (i, j) is the shift with
the (i, j) projection at leg 0; products stack projections on fresh legs,
so source and range projections of a word live on disjoint legs and
commute exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateAngle,
    IndexClash,
    NotBiunitary,
    NotProjection,
)

MODEL_TOL = 1e-10


def _is_projection(p: np.ndarray, tol: float = MODEL_TOL) -> bool:
    return (
        np.linalg.norm(p - p.conj().T, 2) <= tol
        and np.linalg.norm(p @ p - p, 2) <= tol
    )


@dataclass(frozen=True, eq=False)
class MagicUnitaryModel:
    """Grid of d x d projections with identity row and column sums."""

    n: int
    dim: int
    entries: np.ndarray  # shape (n, n, dim, dim), complex

    def entry(self, i: int, j: int) -> np.ndarray:
        return self.entries[i - 1, j - 1]

    def validate(self, tol: float = MODEL_TOL) -> float:
        """Largest constraint residual; raises when above tolerance."""
        worst = 0.0
        eye = np.eye(self.dim)
        for i in range(self.n):
            for j in range(self.n):
                p = self.entries[i, j]
                worst = max(worst, np.linalg.norm(p - p.conj().T, 2))
                worst = max(worst, np.linalg.norm(p @ p - p, 2))
        for i in range(self.n):
            worst = max(
                worst, np.linalg.norm(self.entries[i].sum(axis=0) - eye, 2)
            )
            worst = max(
                worst, np.linalg.norm(self.entries[:, i].sum(axis=0) - eye, 2)
            )
        if worst > tol:
            raise NotBiunitary(f"model residual {worst:.3e} above {tol:.0e}")
        return float(worst)


def two_projection_magic(theta: float) -> MagicUnitaryModel:
    """4x4 block model over 2x2 matrices built from two tilted lines.

    Upper block uses the projection p onto the first coordinate axis,
    lower block the projection q onto the line at angle theta; rows and
    columns pair each with its complement, so sums are exactly the
    identity, while p and q do not commute away from the degenerate
    angles.
    """
    if not 0.0 < theta < np.pi / 2:
        raise DegenerateAngle(f"theta = {theta} outside (0, pi/2)")
    p = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    c, s = np.cos(theta), np.sin(theta)
    q = np.array([[c * c, c * s], [c * s, s * s]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    zero = np.zeros((2, 2), dtype=complex)
    grid = [
        [p, eye - p, zero, zero],
        [eye - p, p, zero, zero],
        [zero, zero, q, eye - q],
        [zero, zero, eye - q, q],
    ]
    model = MagicUnitaryModel(n=4, dim=2, entries=np.array(grid))
    model.validate()
    return model


def classical_model(perm: tuple[int, ...]) -> MagicUnitaryModel:
    """Scalar 0/1 model of a single permutation (d = 1)."""
    n = len(perm)
    entries = np.zeros((n, n, 1, 1), dtype=complex)
    for i in range(n):
        entries[i, perm[i] - 1, 0, 0] = 1.0
    return MagicUnitaryModel(n=n, dim=1, entries=entries)


def qls_magic(vectors: np.ndarray, tol: float = MODEL_TOL) -> MagicUnitaryModel:
    """Rank-one model from a grid of vectors with orthonormal rows/columns."""
    vectors = np.asarray(vectors, dtype=complex)
    n = vectors.shape[0]
    if vectors.shape != (n, n, n):
        raise NotBiunitary(f"expected shape (n, n, n), got {vectors.shape}")
    eye = np.eye(n)
    for i in range(n):
        row = vectors[i]  # rows of this matrix are the vectors xi_{i,.}
        if np.linalg.norm(row @ row.conj().T - eye, 2) > tol:
            raise NotBiunitary(f"row {i + 1} is not orthonormal")
        col = vectors[:, i]
        if np.linalg.norm(col @ col.conj().T - eye, 2) > tol:
            raise NotBiunitary(f"column {i + 1} is not orthonormal")
    entries = np.einsum("ija,ijb->ijab", vectors, vectors.conj())
    model = MagicUnitaryModel(n=n, dim=n, entries=entries)
    model.validate(max(tol, MODEL_TOL))
    return model


def fourier_qls_vectors(n: int) -> np.ndarray:
    """Shift-modulate grid of a flat chirp: orthonormal rows and columns.

    For even n the quadratic chirp exp(i pi k^2 / n) is flat in both
    position and frequency, so its translates (row index) and modulates
    (column index) form a vector grid with orthonormal rows and columns.
    """
    k = np.arange(n)
    v = np.exp(1j * np.pi * k * k / n) / np.sqrt(n)
    vectors = np.zeros((n, n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            vectors[a, b] = np.roll(v, a) * np.exp(2j * np.pi * b * k / n)
    return vectors


def random_qls_vectors(
    n: int,
    seed: int = 0,
    sweeps: int = 400,
    tol: float = 1e-12,
    min_overlap: float = 1e-3,
    attempts: int = 20,
) -> np.ndarray:
    """Seeded random biunitary grid via alternating row/column polar fits.

    Rejection: retry until the alternation converges and every pair of
    vectors not forced orthogonal (same row or column) overlaps by more
    than ``min_overlap``.
    """
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        grid = rng.normal(size=(n, n, n)) + 1j * rng.normal(size=(n, n, n))
        for _ in range(sweeps):
            for i in range(n):
                grid[i] = _nearest_unitary(grid[i])
            for j in range(n):
                grid[:, j] = _nearest_unitary(grid[:, j])
            if _biunitary_residual(grid) < tol:
                break
        if _biunitary_residual(grid) >= tol:
            continue
        if _min_free_overlap(grid) > min_overlap:
            return grid
    raise NotBiunitary(
        f"no generic biunitary grid found in {attempts} seeded attempts"
    )


def _nearest_unitary(m: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def _biunitary_residual(grid: np.ndarray) -> float:
    n = grid.shape[0]
    eye = np.eye(n)
    worst = 0.0
    for i in range(n):
        worst = max(
            worst, np.linalg.norm(grid[i] @ grid[i].conj().T - eye, 2)
        )
        worst = max(
            worst, np.linalg.norm(grid[:, i] @ grid[:, i].conj().T - eye, 2)
        )
    return worst


def _min_free_overlap(grid: np.ndarray) -> float:
    n = grid.shape[0]
    best = np.inf
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    if i == k or j == l:
                        continue
                    ov = abs(np.vdot(grid[i, j], grid[k, l]))
                    best = min(best, ov)
    return float(best)


@dataclass(frozen=True, eq=False)
class WordOperator:
    """shift^power composed with matrices on finitely many tensor legs."""

    dim: int
    shift_power: int
    legs: tuple[tuple[int, np.ndarray], ...] = field(default=())

    @classmethod
    def from_legs(
        cls, dim: int, shift_power: int, legs: dict[int, np.ndarray]
    ) -> "WordOperator":
        items = tuple(sorted((k, np.asarray(v, dtype=complex)) for k, v in legs.items()))
        return cls(dim=dim, shift_power=shift_power, legs=items)

    def leg_map(self) -> dict[int, np.ndarray]:
        return {k: v for k, v in self.legs}

    @property
    def is_tensor(self) -> bool:
        return self.shift_power == 0

    def materialize(self) -> np.ndarray:
        """Dense matrix on the occupied legs; only for pure tensors."""
        if not self.is_tensor:
            raise ValueError("only shift-free operators materialize")
        if not self.legs:
            return np.eye(1, dtype=complex)
        out = np.eye(1, dtype=complex)
        for _, m in self.legs:
            out = np.kron(out, m)
        return out


def generator_operator(model: MagicUnitaryModel, i: int, j: int) -> WordOperator:
    """w_ij: the shift with the (i, j) projection at leg 0."""
    return WordOperator.from_legs(
        model.dim, 1, {0: model.entry(i, j)}
    )


def word_op_mul(a: WordOperator, b: WordOperator) -> WordOperator:
    """Compose: shifts add, the left factor's legs slide past the right shift."""
    if a.dim != b.dim:
        raise ValueError("leg dimensions differ")
    legs: dict[int, np.ndarray] = {}
    for k, m in a.legs:
        legs[k - b.shift_power] = m
    for k, m in b.legs:
        if k in legs:
            legs[k] = legs[k] @ m
        else:
            legs[k] = m
    return WordOperator.from_legs(a.dim, a.shift_power + b.shift_power, legs)


def word_op_adjoint(a: WordOperator) -> WordOperator:
    legs = {k + a.shift_power: m.conj().T for k, m in a.legs}
    return WordOperator.from_legs(a.dim, -a.shift_power, legs)


def word_op_norm(a: WordOperator) -> float:
    """Product of leg norms: the shift is unitary and legs are independent."""
    out = 1.0
    for _, m in a.legs:
        out *= float(np.linalg.norm(m, 2))
    return out


def word_operator(model: MagicUnitaryModel, mu, nu) -> WordOperator:
    """Operator of the letter pair word: product of generators."""
    if len(mu) != len(nu):
        raise ValueError("words must have equal length")
    op = WordOperator.from_legs(model.dim, 0, {})
    for a, b in zip(mu, nu):
        op = word_op_mul(op, generator_operator(model, a, b))
    return op


@dataclass(frozen=True)
class RelationReport:
    max_partial_isometry_defect: float
    max_unitarity_defect: float
    words_checked: int


def relation_check(model: MagicUnitaryModel, ell: int) -> RelationReport:
    """Partial-isometry and biunitarity residuals over words up to ell.

    For every pair of words of equal length m <= ell, X = word operator,
    checks ||(X*X)^2 - X*X||; row/column sums of range and source
    projections and the mixed products behind the conjugate-unitarity are
    checked at the generator level.
    """
    n = model.n
    worst_pi = 0.0
    checked = 0
    for m in range(1, ell + 1):
        words = _all_tuples(n, m)
        for mu in words:
            for nu in words:
                x = word_operator(model, mu, nu)
                xx = word_op_mul(word_op_adjoint(x), x)
                dense = xx.materialize()
                worst_pi = max(
                    worst_pi, float(np.linalg.norm(dense @ dense - dense, 2))
                )
                checked += 1
    eye = np.eye(model.dim)
    worst_uni = 0.0
    for i in range(1, n + 1):
        row_range = sum(model.entry(i, j) for j in range(1, n + 1))
        col_range = sum(model.entry(j, i) for j in range(1, n + 1))
        worst_uni = max(
            worst_uni,
            float(np.linalg.norm(row_range - eye, 2)),
            float(np.linalg.norm(col_range - eye, 2)),
        )
    for i in range(1, n + 1):
        for k in range(1, n + 1):
            if i == k:
                continue
            mixed_col = sum(
                model.entry(i, j) @ model.entry(k, j) for j in range(1, n + 1)
            )
            mixed_row = sum(
                model.entry(j, i) @ model.entry(j, k) for j in range(1, n + 1)
            )
            worst_uni = max(
                worst_uni,
                float(np.linalg.norm(mixed_col, 2)),
                float(np.linalg.norm(mixed_row, 2)),
            )
    return RelationReport(
        max_partial_isometry_defect=worst_pi,
        max_unitarity_defect=worst_uni,
        words_checked=checked,
    )


def _all_tuples(n: int, length: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = [()]
    for _ in range(length):
        out = [w + (c,) for w in out for c in range(1, n + 1)]
    return out


def normality_element_norm(
    model: MagicUnitaryModel, i: int, k: int, l: int
) -> float:
    """||P_kl P_ii P_ll||; strictly positive output certifies the
    corresponding generator word is nonzero in the model."""
    if len({i, k, l}) != 3:
        raise IndexClash(f"indices {(i, k, l)} must be pairwise distinct")
    if model.n < 4:
        raise IndexClash("model needs n >= 4")
    prod = model.entry(k, l) @ model.entry(i, i) @ model.entry(l, l)
    return float(np.linalg.norm(prod, 2))


def halmos_lemma_check(
    v: np.ndarray, w: np.ndarray, tol: float = 1e-10
) -> bool:
    """Whether [vw = wv] and [vwv = wvwv] agree (they must, always)."""
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    for name, p in (("v", v), ("w", w)):
        if not _is_projection(p, tol):
            raise NotProjection(f"{name} is not a projection at {tol:.0e}")
    commute = np.linalg.norm(v @ w - w @ v, 2) <= tol
    sandwich = np.linalg.norm(v @ w @ v - w @ v @ w @ v, 2) <= tol
    return commute == sandwich


def random_projection(
    dim: int, rank: int, rng: np.random.Generator
) -> np.ndarray:
    m = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    q, _ = np.linalg.qr(m)
    return q @ q.conj().T
