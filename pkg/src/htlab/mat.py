"""Symmetric heavy-tailed matrices and their magnitude decomposition.

Indices are 0-based throughout.  Dense symmetric matrices are stored as the
row-major upper triangle (diagonal included); the sparse parts of a
decomposition are coordinate lists with ``i <= j`` sorted by ``(i, j)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dist import HeavyTailLaw, quantile_b_n, sample_heavy
from .errors import NotPairable, RegimeError


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    n: int
    upper: np.ndarray
    seed: object = None

    def __post_init__(self):
        if self.upper.shape != (self.n * (self.n + 1) // 2,):
            raise ValueError(f"expected {self.n * (self.n + 1) // 2} upper entries, "
                             f"got {self.upper.shape}")

    @classmethod
    def from_dense(cls, a, seed=None) -> "SymmetricMatrix":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix is not symmetric")
        iu = np.triu_indices(a.shape[0])
        return cls(a.shape[0], a[iu].copy(), seed)

    def dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n)
        out[iu] = self.upper
        out[(iu[1], iu[0])] = self.upper
        return out

    def __getitem__(self, ij):
        i, j = ij
        if i > j:
            i, j = j, i
        return self.upper[i * self.n - i * (i - 1) // 2 + (j - i)]


@dataclass(frozen=True, eq=False)
class SparseEntries:
    """Symmetric sparse matrix as (i, j, value) triples with i <= j."""

    n: int
    rows: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.intp))
    cols: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.intp))
    vals: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        if np.any(self.rows > self.cols):
            raise ValueError("entries must satisfy i <= j")
        if np.any(self.vals == 0):
            raise ValueError("stored values must be nonzero")
        key = self.rows * self.n + self.cols
        if np.unique(key).size != key.size:
            raise ValueError("duplicate (i, j) entry")

    @classmethod
    def from_triples(cls, n, triples) -> "SparseEntries":
        triples = sorted((min(i, j), max(i, j), float(v)) for i, j, v in triples if v != 0)
        if not triples:
            return cls(n)
        r, c, v = zip(*triples)
        return cls(n, np.array(r, dtype=np.intp), np.array(c, dtype=np.intp), np.array(v))

    def __len__(self):
        return self.vals.size

    def dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        out[self.rows, self.cols] = self.vals
        out[self.cols, self.rows] = self.vals
        return out

    def row_abs_sums(self) -> np.ndarray:
        """sum_j |v_ij| for every row of the full symmetric matrix."""
        s = np.zeros(self.n)
        a = np.abs(self.vals)
        np.add.at(s, self.rows, a)
        off = self.rows != self.cols
        np.add.at(s, self.cols[off], a[off])
        return s

    def row_counts(self) -> np.ndarray:
        cnt = np.zeros(self.n, dtype=int)
        np.add.at(cnt, self.rows, 1)
        off = self.rows != self.cols
        np.add.at(cnt, self.cols[off], 1)
        return cnt

    def matvec(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(self.n)
        np.add.at(out, self.rows, self.vals * x[self.cols])
        off = self.rows != self.cols
        np.add.at(out, self.cols[off], self.vals[off] * x[self.rows[off]])
        return out


@dataclass(frozen=True, eq=False)
class Decomposition:
    small: SymmetricMatrix
    inter: SparseEntries
    large: SparseEntries
    eta: float
    zeta: float
    t_low: float
    t_high: float

    def reassemble(self) -> np.ndarray:
        return self.small.dense() + self.inter.dense() + self.large.dense()


@dataclass(frozen=True, eq=False)
class PairedSparseMatrix:
    """Nonzeros only at (2k, 2k+1) and (2k+1, 2k), with |w_0| >= |w_1| >= ...

    ``transpositions`` lists the simultaneous row/column swaps that carried
    the source matrix to this form; ``perm[new] = old`` is their product.
    """

    n: int
    pairs: np.ndarray
    transpositions: tuple = ()
    perm: np.ndarray | None = None

    def __post_init__(self):
        if 2 * self.pairs.size > self.n:
            raise ValueError("too many pairs for the dimension")

    @property
    def m(self) -> int:
        return self.pairs.size

    def dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        k = np.arange(self.m)
        out[2 * k, 2 * k + 1] = self.pairs
        out[2 * k + 1, 2 * k] = self.pairs
        return out


@dataclass(frozen=True)
class TypicalityReport:
    max_abs: float
    i_star: int
    j_star: int
    b_n: float
    diag_exceed_count: int
    rows_with_two_big: int
    max_truncated_row_sum: float
    kappa_observed: int
    large_count: int
    row_sum_ratio: float


def _dense(A) -> np.ndarray:
    if isinstance(A, (SymmetricMatrix, SparseEntries, PairedSparseMatrix)):
        return A.dense()
    return np.asarray(A, dtype=float)


def sample_matrix(law: HeavyTailLaw, n: int, rng: np.random.Generator, seed=None) -> SymmetricMatrix:
    """Upper triangle (diagonal included) of i.i.d. draws, reflected."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return SymmetricMatrix(n, np.asarray(sample_heavy(law, rng, n * (n + 1) // 2)), seed)


def max_abs_entry(A):
    """(a_star, i_star, j_star); ties go to the lexicographically first (i, j)."""
    a = np.abs(_dense(A))
    k = int(np.argmax(a))
    i, j = divmod(k, a.shape[1])
    return float(a[i, j]), i, j


def default_thresholds(regime: str, alpha: float, r: float, p: float):
    """(eta, zeta) for the small-alpha or the centered (non-zero mean) regime."""
    if not p < r:
        raise RegimeError("threshold choice needs p < r")
    ag = alpha * (1.0 / p - 1.0 / r)
    eta = 0.5 * (1.0 - ag)
    if regime == "small_alpha":
        zeta = min(0.25 * (1.0 - ag), 1.0 - alpha / 2.0)
    elif regime == "centered_alpha":
        zeta = min(0.25 * (1.0 - ag), (1.0 - alpha / 2.0) * (p - 1.0) / r)
    else:
        raise ValueError(f"unknown regime {regime!r}")
    if eta <= 0 or zeta <= 0:
        raise RegimeError(f"thresholds degenerate: eta={eta}, zeta={zeta}")
    return eta, zeta


def decompose(A, alpha: float, eta: float, zeta: float) -> Decomposition:
    """Split entries at n^((1+eta)/alpha) and n^((2-zeta)/alpha)."""
    if not 0 < zeta < eta:
        raise RegimeError(f"need 0 < zeta < eta, got zeta={zeta}, eta={eta}")
    if not isinstance(A, SymmetricMatrix):
        A = SymmetricMatrix.from_dense(A)
    n = A.n
    t_low = n ** ((1.0 + eta) / alpha)
    t_high = n ** ((2.0 - zeta) / alpha)
    mag = np.abs(A.upper)
    iu = np.triu_indices(n)
    is_small = mag <= t_low
    is_large = mag > t_high
    is_inter = ~is_small & ~is_large

    def part(mask):
        keep = mask & (A.upper != 0)
        return SparseEntries(n, iu[0][keep].astype(np.intp), iu[1][keep].astype(np.intp),
                             A.upper[keep].copy())

    small = SymmetricMatrix(n, np.where(is_small, A.upper, 0.0), A.seed)
    return Decomposition(small, part(is_inter), part(is_large), eta, zeta, t_low, t_high)


def compact_large(L: SparseEntries) -> PairedSparseMatrix:
    """Move the nonzeros of L onto adjacent index pairs, largest first.

    Requires a zero diagonal and at most one nonzero per row/column.  The
    value at step k is the largest remaining one (ties: first (i, j)); its row
    and column are swapped into positions 2k and 2k+1.
    """
    n = L.n
    if np.any(L.rows == L.cols):
        raise NotPairable("nonzero diagonal entry")
    if np.any(L.row_counts() > 1):
        raise NotPairable("a row holds more than one nonzero")
    m = len(L)
    if 2 * m > n:
        raise NotPairable("too many nonzeros for the dimension")
    order = sorted(range(m), key=lambda k: (-abs(L.vals[k]), L.rows[k], L.cols[k]))
    orig_at = np.arange(n)
    pos_of = np.arange(n)
    swaps = []

    def swap(a, b):
        if a == b:
            return
        oa, ob = orig_at[a], orig_at[b]
        orig_at[a], orig_at[b] = ob, oa
        pos_of[oa], pos_of[ob] = b, a
        swaps.append((int(a), int(b)))

    pairs = np.empty(m)
    for k, e in enumerate(order):
        i, j = int(L.rows[e]), int(L.cols[e])
        swap(2 * k, pos_of[i])
        swap(2 * k + 1, pos_of[j])
        pairs[k] = L.vals[e]
    return PairedSparseMatrix(n, pairs, tuple(swaps), orig_at.copy())


def diagnostics(A, alpha: float, delta: float = 0.05, eta: float | None = None,
                zeta: float | None = None, b_n: float | None = None,
                law: HeavyTailLaw | None = None) -> TypicalityReport:
    """Structural statistics of a heavy-tailed matrix.

    ``b_n`` defaults to the scaling of ``law`` (or the pure Pareto law of
    index ``alpha``).  The intermediate/large counts need ``eta`` and
    ``zeta``; without them they are reported as -1.
    """
    a = _dense(A)
    n = a.shape[0]
    if b_n is None:
        b_n = quantile_b_n(law or HeavyTailLaw(alpha), n)
    a_star, i_star, j_star = max_abs_entry(a)
    mag = np.abs(a)
    big = b_n ** (0.75 + delta)
    diag_exceed = int(np.sum(np.diag(a) >= b_n ** (11 / 20)))
    two_big = int(np.sum((mag >= big).sum(axis=1) >= 2))
    trunc = float(np.max(np.where(mag <= big, mag, 0.0).sum(axis=1)))
    ratio = float(mag.sum(axis=1).max() / a_star) if a_star > 0 else float("nan")
    kappa, large = -1, -1
    if eta is not None and zeta is not None:
        dec = decompose(SymmetricMatrix.from_dense(a), alpha, eta, zeta)
        kappa = int(dec.inter.row_counts().max(initial=0))
        large = len(dec.large)
    return TypicalityReport(a_star, i_star, j_star, float(b_n), diag_exceed, two_big,
                            trunc, kappa, large, ratio)


def write_matrix(path, A) -> None:
    """n on the first line, then the upper triangle row-major, one per line."""
    if not isinstance(A, SymmetricMatrix):
        A = SymmetricMatrix.from_dense(A)
    with open(path, "w") as fh:
        fh.write(f"{A.n}\n")
        fh.writelines(f"{float(v)!r}\n" for v in A.upper)


def read_matrix(path) -> SymmetricMatrix:
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError(f"{path}: empty matrix file")
    n = int(tokens[0])
    vals = np.array([float(t) for t in tokens[1:]])
    if vals.size != n * (n + 1) // 2:
        raise ValueError(f"{path}: expected {n * (n + 1) // 2} values, found {vals.size}")
    return SymmetricMatrix(n, vals)


def write_sparse(path, S: SparseEntries) -> None:
    """n on the first line, then one ``i j value`` triple per line."""
    with open(path, "w") as fh:
        fh.write(f"{S.n}\n")
        for i, j, v in zip(S.rows, S.cols, S.vals):
            fh.write(f"{i} {j} {float(v)!r}\n")


def read_sparse(path) -> SparseEntries:
    with open(path) as fh:
        lines = fh.read().split("\n")
    n = int(lines[0])
    triples = []
    for line in lines[1:]:
        if line.strip():
            i, j, v = line.split()
            triples.append((int(i), int(j), float(v)))
    return SparseEntries.from_triples(n, triples)
