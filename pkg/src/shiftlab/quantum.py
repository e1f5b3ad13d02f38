"""Constraint propagation over projection variables and ergodicity verdicts.

The relations analysed here live between two square grids of projection
variables p[i][j], q[i][j]: both grids are "magic" (every row and column
sums to the identity), both preserve the right maximal eigenvector, and
the adjacency matrix intertwines them (A p = q A).  Propagation computes
a least fixed point of sound forcing rules and reports each variable as
Zero, One, or Free (grouped into union-find classes of provably equal
variables).  Free entries are honestly "not determined by the encoded
relations": longer-word partial-isometry identities are not linear and
are never encoded, so zero-forcing is sound but deliberately incomplete.

Word-level supports: a pair of admissible words is certainly zero when
some letter position holds a Zero variable, and certified nonzero when a
graph automorphism aligns the two words letterwise (on the full shift
every pair is certified: independent tensor legs).  Connectivity of the
resulting graphs decides ergodicity of the level-k action.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .core import (
    AdjacencySpec,
    PerronFrobeniusData,
    Word,
    enumerate_words,
)
from .errors import Inconsistent, SearchCapExceeded
from .symmetry import (
    GraphAutomorphism,
    automorphism_group,
    matrix_automorphisms,
)

ZERO = "0"
ONE = "1"
FREE = "free"

CERTAIN_ZERO = "CertainZero"
CERTIFIED_NONZERO = "CertifiedNonzero"
POSSIBLE = "Possible"

ERGODIC_CERTIFIED = "ErgodicCertified"
NON_ERGODIC = "NonErgodic"
UNKNOWN = "Unknown"

DUAL_FREE_GROUP = "DualFreeGroup"
INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class ProjVarState:
    kind: str  # ZERO | ONE | FREE
    class_id: int | None = None

    @property
    def is_zero(self) -> bool:
        return self.kind == ZERO

    @property
    def is_one(self) -> bool:
        return self.kind == ONE


@dataclass(frozen=True)
class PatternMatrix:
    n: int
    p: tuple[tuple[ProjVarState, ...], ...]
    q: tuple[tuple[ProjVarState, ...], ...]

    def p_state(self, i: int, j: int) -> ProjVarState:
        return self.p[i - 1][j - 1]

    def q_state(self, i: int, j: int) -> ProjVarState:
        return self.q[i - 1][j - 1]

    def is_identity_pattern(self) -> bool:
        for grid in (self.p, self.q):
            for i in range(self.n):
                for j in range(self.n):
                    want_one = i == j
                    st = grid[i][j]
                    if want_one and not st.is_one:
                        return False
                    if not want_one and not st.is_zero:
                        return False
        return True

    def grid_strings(self) -> dict[str, list[str]]:
        """Rows over {'.', '0', '1', class letters}; '.' marks a singleton
        Free entry, letters mark Free entries merged into a shared class."""
        counts: Counter[int] = Counter()
        for grid in (self.p, self.q):
            for row in grid:
                for st in row:
                    if st.kind == FREE:
                        counts[st.class_id] += 1
        letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
        letter_of: dict[int, str] = {}
        for grid in (self.p, self.q):
            for row in grid:
                for st in row:
                    if (
                        st.kind == FREE
                        and counts[st.class_id] > 1
                        and st.class_id not in letter_of
                    ):
                        letter_of[st.class_id] = letters[
                            len(letter_of) % len(letters)
                        ]

        def render(grid):
            rows = []
            for row in grid:
                chars = []
                for st in row:
                    if st.is_zero:
                        chars.append("0")
                    elif st.is_one:
                        chars.append("1")
                    elif counts[st.class_id] > 1:
                        chars.append(letter_of[st.class_id])
                    else:
                        chars.append(".")
                rows.append("".join(chars))
            return rows

        return {"p": render(self.p), "q": render(self.q)}


@dataclass(frozen=True)
class ConstraintSystem:
    spec: AdjacencySpec
    pf: PerronFrobeniusData
    # each equation: (lhs var ids, lhs const, rhs var ids, rhs const)
    equations: tuple[tuple[tuple[int, ...], int, tuple[int, ...], int], ...]
    pre_zero: tuple[int, ...]
    use_pf_rule: bool = True

    @property
    def var_count(self) -> int:
        return 2 * self.spec.n * self.spec.n


def _p_var(n: int, i: int, j: int) -> int:
    return i * n + j


def _q_var(n: int, i: int, j: int) -> int:
    return n * n + i * n + j


def build_constraints(
    spec: AdjacencySpec,
    pf: PerronFrobeniusData,
    use_pf_rule: bool = True,
) -> ConstraintSystem:
    """Magic row/column sums, eigenvector zeroing, and intertwining.

    The eigenvector rule pre-zeroes p[i][j] and q[i][j] whenever
    u_i != u_j at the eigendata tolerance: a nonzero entry forces the two
    eigenvector components to agree.  It is kept independent of the other
    relations and can be disabled for experimentation.
    """
    n = spec.n
    eqs: list[tuple[tuple[int, ...], int, tuple[int, ...], int]] = []
    for var in (_p_var, _q_var):
        for i in range(n):
            eqs.append((tuple(var(n, i, j) for j in range(n)), 0, (), 1))
        for j in range(n):
            eqs.append((tuple(var(n, i, j) for i in range(n)), 0, (), 1))
    for i in range(n):
        for k in range(n):
            lhs = tuple(_p_var(n, j, k) for j in range(n) if spec.a[i][j])
            rhs = tuple(_q_var(n, i, j) for j in range(n) if spec.a[j][k])
            eqs.append((lhs, 0, rhs, 0))
    pre: list[int] = []
    if use_pf_rule:
        tol = pf.tol
        for i in range(n):
            for j in range(n):
                ui, uj = float(pf.u[i]), float(pf.u[j])
                if abs(ui - uj) > tol * max(1.0, abs(ui), abs(uj)):
                    pre.append(_p_var(n, i, j))
                    pre.append(_q_var(n, i, j))
    return ConstraintSystem(
        spec=spec,
        pf=pf,
        equations=tuple(eqs),
        pre_zero=tuple(pre),
        use_pf_rule=use_pf_rule,
    )


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller root wins: keeps class extraction deterministic
            lo, hi = min(ra, rb), max(ra, rb)
            self.parent[hi] = lo
            return lo
        return ra


def propagate(
    system: ConstraintSystem, shuffle_seed: int | None = None
) -> PatternMatrix:
    """Least fixed point of the forcing rules.

    Per equation, after substituting knowns and cancelling shared classes:
      * a scalar c against m free occurrences forces all-Zero when c = 0
        and all-One when c = m (a sum of projections equals m only when
        every summand is the identity: the deficits 1 - p are positive
        and sum to zero);
      * a lone class on each side merges the two classes when the scalars
        agree, and forces a (One, Zero) split when they differ by one;
      * scalar-against-scalar disagreement is a contradiction.
    The result is order-independent; ``shuffle_seed`` only reorders the
    sweep to let tests exercise confluence.
    """
    uf = _UnionFind(system.var_count)
    state: dict[int, str] = {}

    def root_state(x: int) -> str | None:
        return state.get(uf.find(x))

    def assign(x: int, value: str) -> bool:
        r = uf.find(x)
        old = state.get(r)
        if old is None:
            state[r] = value
            return True
        if old != value:
            raise Inconsistent(
                f"variable class {r} forced to both {old} and {value}"
            )
        return False

    def merge(x: int, y: int) -> bool:
        rx, ry = uf.find(x), uf.find(y)
        if rx == ry:
            return False
        sx, sy = state.get(rx), state.get(ry)
        if sx is not None and sy is not None and sx != sy:
            raise Inconsistent(f"merging contradictory classes {rx}, {ry}")
        r = uf.union(rx, ry)
        winner = sx if sx is not None else sy
        state.pop(rx, None)
        state.pop(ry, None)
        if winner is not None:
            state[r] = winner
        return True

    for var in system.pre_zero:
        assign(var, ZERO)

    equations = list(system.equations)
    if shuffle_seed is not None:
        random.Random(shuffle_seed).shuffle(equations)

    changed = True
    while changed:
        changed = False
        for lhs, lc, rhs, rc in equations:
            lconst, lfree = lc, Counter()
            for v in lhs:
                st = root_state(v)
                if st == ONE:
                    lconst += 1
                elif st is None:
                    lfree[uf.find(v)] += 1
            rconst, rfree = rc, Counter()
            for v in rhs:
                st = root_state(v)
                if st == ONE:
                    rconst += 1
                elif st is None:
                    rfree[uf.find(v)] += 1
            for r in set(lfree) & set(rfree):
                m = min(lfree[r], rfree[r])
                lfree[r] -= m
                rfree[r] -= m
            lfree = +lfree
            rfree = +rfree

            if not lfree and not rfree:
                if lconst != rconst:
                    raise Inconsistent(f"scalar clash {lconst} != {rconst}")
                continue
            if not rfree or not lfree:
                free, d = (lfree, rconst - lconst) if not rfree else (
                    rfree,
                    lconst - rconst,
                )
                weight = sum(free.values())
                if d == 0:
                    for r in free:
                        changed |= assign(r, ZERO)
                elif d == weight:
                    for r in free:
                        changed |= assign(r, ONE)
                elif d < 0 or d > weight:
                    raise Inconsistent(f"sum of {weight} projections = {d}")
                elif len(free) == 1:
                    # single class scaled by its multiplicity: no 0/1 value
                    raise Inconsistent(
                        f"class multiple {weight} cannot equal {d}"
                    )
                continue
            if len(lfree) == 1 and len(rfree) == 1:
                (ra, ma), = lfree.items()
                (rb, mb), = rfree.items()
                if ma == mb:
                    d = rconst - lconst
                    if d == 0:
                        changed |= merge(ra, rb)
                    elif d == ma:
                        changed |= assign(ra, ONE)
                        changed |= assign(rb, ZERO)
                    elif d == -ma:
                        changed |= assign(ra, ZERO)
                        changed |= assign(rb, ONE)
                    else:
                        raise Inconsistent(
                            f"projection difference {d}/{ma} out of range"
                        )

    n = system.spec.n
    class_ids: dict[int, int] = {}

    def extract(var: int) -> ProjVarState:
        r = uf.find(var)
        st = state.get(r)
        if st == ZERO:
            return ProjVarState(ZERO)
        if st == ONE:
            return ProjVarState(ONE)
        if r not in class_ids:
            class_ids[r] = len(class_ids)
        return ProjVarState(FREE, class_ids[r])

    p = tuple(
        tuple(extract(_p_var(n, i, j)) for j in range(n)) for i in range(n)
    )
    q = tuple(
        tuple(extract(_q_var(n, i, j)) for j in range(n)) for i in range(n)
    )
    pattern = PatternMatrix(n=n, p=p, q=q)
    _validate_pattern(pattern)
    return pattern


def _validate_pattern(pattern: PatternMatrix) -> None:
    for grid in (pattern.p, pattern.q):
        for i in range(pattern.n):
            row = [grid[i][j] for j in range(pattern.n)]
            col = [grid[j][i] for j in range(pattern.n)]
            for line in (row, col):
                if all(st.is_zero for st in line):
                    raise Inconsistent("a line of a magic pattern is all zero")
                if sum(st.is_one for st in line) > 1:
                    raise Inconsistent("two ones in one line of a pattern")


def collapse_report(pattern: PatternMatrix) -> str:
    """Diagnosis of a propagated pattern.

    ``DualFreeGroup`` when both grids collapsed to the identity pattern
    (off-diagonal entries vanish, the action is pure gauge).  Anything
    else is ``Indeterminate``: Free entries may still vanish in the
    universal algebra, the encoded rules only force one direction.
    """
    if pattern.is_identity_pattern():
        return DUAL_FREE_GROUP
    return INDETERMINATE


@dataclass(frozen=True)
class PerLegWitness:
    """Independent per-position alphabet permutations (full shift only)."""

    perms: tuple[GraphAutomorphism, ...]


@dataclass(frozen=True)
class SupportPattern:
    level: int
    words: tuple[Word, ...]
    states: tuple[tuple[str, ...], ...]

    def state(self, mu: Word, nu: Word) -> str:
        i = self.words.index(mu)
        j = self.words.index(nu)
        return self.states[i][j]


def classical_witness(
    spec: AdjacencySpec, mu: Word, nu: Word
) -> GraphAutomorphism | PerLegWitness | None:
    """Automorphism aligning nu with mu letterwise, if one exists.

    Its image under any one-dimensional representation of the classical
    group is a nonzero scalar, so it certifies the (mu, nu) support.  On
    the full shift the tensor legs are independent, so even when no single
    permutation matches, per-position transpositions certify the pair.
    """
    if len(mu) != len(nu):
        raise ValueError("words must have equal length")
    for g in automorphism_group(spec):
        if g.apply_word(nu) == mu:
            return g
    if spec.is_full_shift():
        perms = []
        for a, b in zip(mu, nu):
            perm = list(range(1, spec.n + 1))
            perm[b - 1], perm[a - 1] = perm[a - 1], perm[b - 1]
            perms.append(GraphAutomorphism(tuple(perm)))
        return PerLegWitness(tuple(perms))
    return None


def word_support(
    pattern: PatternMatrix,
    pf: PerronFrobeniusData,
    k: int,
    cap: int | None = None,
) -> SupportPattern:
    """Level-k support states for all pairs of admissible words.

    CertainZero when some position holds a Zero variable (or distinct
    eigenvector entries, which force one); CertifiedNonzero on a classical
    witness; Possible otherwise.  Pairs mixing an admissible with an
    inadmissible word are identically zero and never indexed.
    """
    spec = pf.spec
    words = enumerate_words(spec, k, cap)
    idx = {w: i for i, w in enumerate(words)}
    m = len(words)
    tol = pf.tol

    def position_zero(a: int, b: int) -> bool:
        if pattern.p_state(a, b).is_zero:
            return True
        ua, ub = pf.u_of(a), pf.u_of(b)
        return abs(ua - ub) > tol * max(1.0, ua, ub)

    zero_pos = [
        [position_zero(a, b) for b in range(1, spec.n + 1)]
        for a in range(1, spec.n + 1)
    ]
    states = [[POSSIBLE] * m for _ in range(m)]
    for i, mu in enumerate(words):
        for j, nu in enumerate(words):
            if any(zero_pos[a - 1][b - 1] for a, b in zip(mu, nu)):
                states[i][j] = CERTAIN_ZERO

    if spec.is_full_shift():
        for i in range(m):
            for j in range(m):
                if states[i][j] != CERTAIN_ZERO:
                    states[i][j] = CERTIFIED_NONZERO
    else:
        for g in automorphism_group(spec):
            for j, nu in enumerate(words):
                i = idx[g.apply_word(nu)]
                if states[i][j] == CERTAIN_ZERO:
                    raise Inconsistent(
                        "witnessed pair was forced to zero; "
                        "propagation is unsound"
                    )
                states[i][j] = CERTIFIED_NONZERO

    return SupportPattern(
        level=k,
        words=tuple(words),
        states=tuple(tuple(row) for row in states),
    )


@dataclass(frozen=True)
class ErgodicityVerdict:
    verdict: str  # ErgodicCertified | NonErgodic | Unknown
    level: int
    witness: tuple[Word, ...] | None = None


def _components(m: int, edge) -> list[list[int]]:
    parent = list(range(m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(m):
        for j in range(i + 1, m):
            if edge(i, j):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    comps: dict[int, list[int]] = {}
    for i in range(m):
        comps.setdefault(find(i), []).append(i)
    return [comps[r] for r in sorted(comps)]


def ergodicity_verdict(
    spec: AdjacencySpec,
    pf: PerronFrobeniusData,
    k: int,
    cap: int | None = None,
    use_pf_rule: bool = True,
) -> ErgodicityVerdict:
    """Level-k verdict from support-graph connectivity.

    A fixed element of the level-k diagonal algebra is forced to be the
    indicator of a word set F whose coefficients towards the complement
    all vanish.  If the graph of not-certainly-zero pairs is disconnected,
    one component is such an F (the coefficients summing to one stay
    inside); if even the certified-nonzero subgraph is connected, a proper
    F would need a vanishing certified coefficient, which is absurd.
    Everything in between stays Unknown.
    """
    pattern = propagate(build_constraints(spec, pf, use_pf_rule))
    support = word_support(pattern, pf, k, cap)
    words = support.words
    m = len(words)

    def optimistic(i: int, j: int) -> bool:
        return support.states[i][j] != CERTAIN_ZERO

    comps = _components(m, optimistic)
    if len(comps) > 1:
        witness = tuple(words[i] for i in comps[0])
        return ErgodicityVerdict(NON_ERGODIC, k, witness)

    def certified(i: int, j: int) -> bool:
        return support.states[i][j] == CERTIFIED_NONZERO

    if len(_components(m, certified)) == 1:
        return ErgodicityVerdict(ERGODIC_CERTIFIED, k, None)
    return ErgodicityVerdict(UNKNOWN, k, None)


@dataclass(frozen=True, eq=False)
class TAReport:
    matrix: np.ndarray
    automorphisms: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.automorphisms)


def t_a_matrix(spec: AdjacencySpec) -> np.ndarray:
    """(A^t (x) A) composed with the tensor flip, an n^2 x n^2 0/1 matrix."""
    n = spec.n
    a = spec.matrix
    flip = np.zeros((n * n, n * n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            flip[i * n + j, j * n + i] = 1
    return np.kron(a.T, a) @ flip


def t_a_analysis(spec: AdjacencySpec, cap_n: int = 6) -> TAReport:
    """Commuting permutations of the flip-intertwiner, by backtracking."""
    if spec.n > cap_n:
        raise SearchCapExceeded(
            f"n = {spec.n} exceeds the n <= {cap_n} permutation-search cap"
        )
    t = t_a_matrix(spec)
    perms = matrix_automorphisms(t.tolist())
    mat = t.copy()
    mat.flags.writeable = False
    return TAReport(matrix=mat, automorphisms=tuple(perms))
