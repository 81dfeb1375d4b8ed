"""Criss-cross pivoting for linear complementarity problems with PSD matrices.

Notation.  For a complementary index set B (j in B means w_j is basic, else
z_j is basic) let lambda_j be the basic variable of pair j and lambda-bar_j
the nonbasic one.  The dictionary

    lambda = beta + Lam @ lambda_bar

is kept as a full k x k principal pivot transform of M; for B = [k] it is
simply ``w = q + M z``, i.e. Lam = M.  Row r of Lam is row r of
-M_B^{-1} M_N, and a pivot on the index set D is a block principal pivot.

The right-hand side is carried as two columns (beta0, beta1) so that one
tableau serves both a fixed EpsVector q = s + eps t (beta0 = s, beta1 = t,
evaluated at mu = 0) and a parametric q(mu) = q0 + mu q1 evaluated at some
mu with the perturbation q(mu + eps).
"""

from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from . import linalg
from .core import EpsVector, ZERO, sign
from .errors import InvariantError

DEFAULT_MAX_PIVOTS = 10**6

DIAGONAL = "diagonal"
EXCHANGE = "exchange"


def _q(value):
    value = Fraction(value)
    return mpq(value.numerator, value.denominator)


def _f(value):
    return Fraction(int(value.numerator), int(value.denominator))


def _matrix(lcp):
    return lcp.M if hasattr(lcp, "M") else lcp


@dataclass(frozen=True)
class Basis:
    k: int
    members: frozenset

    @classmethod
    def full(cls, k):
        return cls(k, frozenset(range(k)))

    @classmethod
    def of(cls, k, members):
        members = frozenset(members)
        if any(not 0 <= j < k for j in members):
            raise ValueError("basis index out of range")
        return cls(k, members)

    def __contains__(self, j):
        return j in self.members

    @property
    def nonbasic(self):
        return tuple(j for j in range(self.k) if j not in self.members)

    def toggle(self, indices):
        return Basis(self.k, self.members.symmetric_difference(indices))

    def mask(self):
        return tuple(j in self.members for j in range(self.k))

    def __str__(self):
        return "{" + ",".join(str(j + 1) for j in sorted(self.members)) + "}"


def basis_matrix(M, basis):
    """M_B: column j is the unit vector I_j for j in B and -M_j otherwise."""
    k = basis.k
    return [
        [(Fraction(int(i == j)) if j in basis else -Fraction(M[i][j])) for j in range(k)]
        for i in range(k)
    ]


def nonbasis_matrix(M, basis):
    k = basis.k
    return [
        [(-Fraction(M[i][j]) if j in basis else Fraction(int(i == j))) for j in range(k)]
        for i in range(k)
    ]


@dataclass(frozen=True)
class BasicSolution:
    basis: Basis
    lam: EpsVector
    pivots: int = 0

    @property
    def w(self):
        return EpsVector(
            [v if j in self.basis else ZERO for j, v in enumerate(self.lam.s)],
            [v if j in self.basis else ZERO for j, v in enumerate(self.lam.t)],
        )

    @property
    def z(self):
        return EpsVector(
            [ZERO if j in self.basis else v for j, v in enumerate(self.lam.s)],
            [ZERO if j in self.basis else v for j, v in enumerate(self.lam.t)],
        )

    def is_feasible(self):
        return self.lam.is_nonnegative()


@dataclass(frozen=True)
class PivotChoice:
    r: int
    s: int
    kind: str
    lam_pp: Fraction
    lam_rs: Fraction
    lam_sr: Fraction

    @property
    def p(self):
        return max(self.r, self.s)

    @property
    def indices(self):
        return (self.p,) if self.kind == DIAGONAL else (self.r, self.s)


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Row r of the dictionary is <= 0 while lambda_r < 0: no solution with w, z >= 0.

    ``lambda_r`` is (value, slope): the basic value at the solve point and its
    rate of change in the eps direction.
    """

    basis: Basis
    r: int
    dictionary_row: tuple
    lambda_r: tuple


@dataclass(frozen=True)
class Solved:
    solution: BasicSolution
    pivots: int

    @property
    def basis(self):
        return self.solution.basis


@dataclass(frozen=True)
class Infeasible:
    certificate: InfeasibilityCertificate
    pivots: int

    @property
    def basis(self):
        return self.certificate.basis


def basic_solution(lcp, basis, q):
    """Solve M_B lambda = q directly (both eps-components) and return the basic solution."""
    M = _matrix(lcp)
    if not isinstance(q, EpsVector):
        q = EpsVector.exact(q)
    MB = basis_matrix(M, basis)
    try:
        X = linalg.solve(MB, [[s, t] for s, t in zip(q.s, q.t)])
    except linalg.SingularMatrixError as exc:
        raise InvariantError(f"M_B is singular for basis {basis}") from exc
    return BasicSolution(basis, EpsVector([row[0] for row in X], [row[1] for row in X]))


def dictionary_entries(lcp, basis, r):
    """Row r of Lam = -M_B^{-1} M_N, via M_B^T y = I_r and Lam_r = -y^T M_N."""
    M = _matrix(lcp)
    k = basis.k
    MB_T = linalg.transpose(basis_matrix(M, basis))
    y = linalg.solve_vector(MB_T, [Fraction(int(i == r)) for i in range(k)])
    MN = nonbasis_matrix(M, basis)
    return [-sum((y[i] * MN[i][j] for i in range(k) if y[i]), ZERO) for j in range(k)]


def apply_pivot(basis, choice):
    """B' = B xor {p} (diagonal) or B xor {r, s} (exchange).

    M_B' = M_B T with det(T) = -Lam_pp for a diagonal pivot and
    -Lam_rs * Lam_sr for an exchange pivot; both must be nonzero.
    """
    if choice.kind == DIAGONAL:
        if choice.lam_pp == 0:
            raise InvariantError("diagonal pivot on a zero diagonal entry")
    elif choice.kind == EXCHANGE:
        if choice.lam_pp != 0:
            raise InvariantError("exchange pivot although Lam_pp != 0")
        if choice.r == choice.s or choice.lam_rs * choice.lam_sr >= 0:
            raise InvariantError(
                f"exchange pivot with Lam_rs={choice.lam_rs}, Lam_sr={choice.lam_sr}"
            )
    else:
        raise ValueError(f"unknown pivot kind {choice.kind!r}")
    return basis.toggle(choice.indices)


def _invert(block):
    n = len(block)
    aug = [list(row) + [mpq(int(i == j)) for j in range(n)] for i, row in enumerate(block)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            raise InvariantError("principal block is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv_p = 1 / aug[col][col]
        aug[col] = [v * inv_p for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [row[n:] for row in aug]


class Tableau:
    """Mutable dictionary state for one solve; not shared between threads."""

    def __init__(self, M, rhs0, rhs1=None):
        k = len(M)
        self.k = k
        self.M = M
        self.basis = Basis.full(k)
        self.lam = [[_q(v) for v in row] for row in M]
        self.rhs0 = [_q(v) for v in rhs0]
        self.rhs1 = [_q(v) for v in rhs1] if rhs1 is not None else [mpq(0)] * k

    @classmethod
    def for_basis(cls, M, basis, rhs0, rhs1=None):
        tab = cls(M, rhs0, rhs1)
        nonbasic = basis.nonbasic
        if nonbasic:
            tab.pivot(nonbasic)
        return tab

    def pivot(self, D):
        """Block principal pivot on the index set D (basic and nonbasic swap within D)."""
        D = list(D)
        lam = self.lam
        inv = _invert([[lam[d][e] for e in D] for d in D])
        in_d = set(D)
        rest = [j for j in range(self.k) if j not in in_d]
        new_rows = {}
        new_rhs0 = {}
        new_rhs1 = {}
        for a, d in enumerate(D):
            coeffs = [(inv[a][b], D[b]) for b in range(len(D)) if inv[a][b] != 0]
            row = [mpq(0)] * self.k
            for j in rest:
                acc = mpq(0)
                for f, e in coeffs:
                    v = lam[e][j]
                    if v:
                        acc -= f * v
                row[j] = acc
            for b, e in enumerate(D):
                row[e] = inv[a][b]
            new_rows[d] = row
            new_rhs0[d] = -sum((f * self.rhs0[e] for f, e in coeffs), mpq(0))
            new_rhs1[d] = -sum((f * self.rhs1[e] for f, e in coeffs), mpq(0))
        for i in rest:
            row_i = lam[i]
            mult = [(row_i[d], d) for d in D if row_i[d] != 0]
            if not mult:
                continue
            for j in rest:
                acc = row_i[j]
                for f, d in mult:
                    v = new_rows[d][j]
                    if v:
                        acc += f * v
                row_i[j] = acc
            for e in D:
                row_i[e] = sum((f * new_rows[d][e] for f, d in mult), mpq(0))
            self.rhs0[i] += sum((f * new_rhs0[d] for f, d in mult), mpq(0))
            self.rhs1[i] += sum((f * new_rhs1[d] for f, d in mult), mpq(0))
        for d in D:
            lam[d] = new_rows[d]
            self.rhs0[d] = new_rhs0[d]
            self.rhs1[d] = new_rhs1[d]
        self.basis = self.basis.toggle(D)

    def value(self, j, mu=0):
        return self.rhs0[j] + _q(mu) * self.rhs1[j] if mu else self.rhs0[j]

    def is_negative(self, j, mu=0, exact=False):
        s = self.value(j, mu)
        return s < 0 or (not exact and s == 0 and self.rhs1[j] < 0)

    def lam_at(self, mu=0):
        mu_q = _q(mu)
        return EpsVector(
            [_f(a + mu_q * b) for a, b in zip(self.rhs0, self.rhs1)],
            [_f(b) for b in self.rhs1],
        )

    def affine_parts(self):
        """(beta0, beta1) as Fractions: lambda(mu) = beta0 + mu * beta1."""
        return [_f(v) for v in self.rhs0], [_f(v) for v in self.rhs1]

    def row(self, r):
        return [_f(v) for v in self.lam[r]]

    def choose(self, r):
        """Case (b) pivot for infeasible row r, or None in case (a)."""
        row = self.lam[r]
        s = next((j for j in range(self.k) if row[j] > 0), None)
        if s is None:
            return None
        p = max(r, s)
        lam_pp = self.lam[p][p]
        kind = DIAGONAL if lam_pp != 0 else EXCHANGE
        return PivotChoice(r, s, kind, _f(lam_pp), _f(row[s]), _f(self.lam[s][r]))

    def solve(self, mu=0, max_pivots=DEFAULT_MAX_PIVOTS, on_iterate=None, check_repeats=True,
              exact=False):
        """Run criss-cross from the current basis.

        Signs are taken at mu + eps, or at mu itself when ``exact`` is set.
        """
        pivots = 0
        seen = {self.basis.members} if check_repeats else None
        while True:
            if on_iterate is not None:
                on_iterate(self.basis, self.lam_at(mu))
            r = next((j for j in range(self.k) if self.is_negative(j, mu, exact)), None)
            if r is None:
                return Solved(BasicSolution(self.basis, self.lam_at(mu), pivots), pivots)
            choice = self.choose(r)
            if choice is None:
                cert = InfeasibilityCertificate(
                    self.basis, r, tuple(self.row(r)), (_f(self.value(r, mu)), _f(self.rhs1[r]))
                )
                return Infeasible(cert, pivots)
            if choice.kind == EXCHANGE and choice.lam_sr != -choice.lam_rs:
                raise InvariantError(
                    f"exchange pivot without Lam_sr = -Lam_rs at basis {self.basis}"
                )
            expected = apply_pivot(self.basis, choice)
            self.pivot(choice.indices)
            if self.basis != expected:
                raise InvariantError("tableau basis out of sync")
            pivots += 1
            if pivots > max_pivots:
                raise InvariantError(f"criss-cross exceeded {max_pivots} pivots")
            if seen is not None:
                if self.basis.members in seen:
                    raise InvariantError(f"basis {self.basis} repeated within one solve")
                seen.add(self.basis.members)


def criss_cross_solve(lcp, q, start=None, max_pivots=DEFAULT_MAX_PIVOTS, on_iterate=None,
                      check_repeats=True):
    """Solve w - Mz = q, w, z >= 0, w^T z = 0 for a fixed (possibly eps-perturbed) q.

    Returns Solved or Infeasible.  ``on_iterate(basis, lam)`` is called at
    every basic solution visited, including the last one.
    """
    M = _matrix(lcp)
    if not isinstance(q, EpsVector):
        q = EpsVector.exact(q)
    k = len(M)
    if len(q) != k:
        raise ValueError(f"right-hand side has {len(q)} entries, expected {k}")
    start = start if start is not None else Basis.full(k)
    tab = Tableau.for_basis(M, start, q.s, q.t)
    return tab.solve(0, max_pivots=max_pivots, on_iterate=on_iterate, check_repeats=check_repeats)


def eps_sign(value, slope):
    return sign(value) if value != 0 else sign(slope)
