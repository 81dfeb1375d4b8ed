"""Brute-force ground truth for small instances.

Every complementary set B is tried in bitmask order; the first whose basic
solution is nonnegative is returned.  A PSD LCP has a solution iff it has a
complementary basic one, so finding none proves infeasibility.  Nothing here
shares code with the pivoting engine.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .core import ZERO, qp_to_lcp, to_rat
from .errors import PQPError
from .path import INFEASIBLE, InfeasibleInterval, JumpRecord, eval_path

MAX_K = 20

SOLVED = "solved"
INFEASIBLE_STATUS = "infeasible"


class OracleTooLarge(PQPError, ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    status: str
    x: tuple = None
    objective: Fraction = None
    witness_basis: frozenset = None
    w: tuple = None
    z: tuple = None


def _gauss_solve(A, b):
    """Plain Gauss-Jordan on Fractions; None if A is singular."""
    n = len(A)
    aug = [list(row) + [v] for row, v in zip(A, b)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for i in range(n):
            f = aug[i][col]
            if i != col and f != 0:
                aug[i] = [a - f * c for a, c in zip(aug[i], aug[col])]
    return [row[n] for row in aug]


def solve_lcp_fixed(M, q):
    """(witness set, w, z) for w - Mz = q, w, z >= 0, w^T z = 0, or None if infeasible."""
    k = len(M)
    if k > MAX_K:
        raise OracleTooLarge(f"k={k} exceeds the enumeration bound {MAX_K}")
    M = [[Fraction(v) for v in row] for row in M]
    q = [Fraction(v) for v in q]
    for mask in range(1 << k):
        in_b = [bool(mask >> j & 1) for j in range(k)]
        nb = [j for j in range(k) if not in_b[j]]
        # w_B - M_BN z_N = q_B and -M_NN z_N = q_N
        z_n = _gauss_solve([[-M[i][j] for j in nb] for i in nb], [q[i] for i in nb])
        if z_n is None or any(v < 0 for v in z_n):
            continue
        lam = [None] * k
        for j, v in zip(nb, z_n):
            lam[j] = v
        for i in range(k):
            if in_b[i]:
                lam[i] = q[i] + sum((M[i][j] * v for j, v in zip(nb, z_n) if v), ZERO)
        if any(v < 0 for v in lam):
            continue
        w = tuple(lam[j] if in_b[j] else ZERO for j in range(k))
        z = tuple(ZERO if in_b[j] else lam[j] for j in range(k))
        return frozenset(j for j in range(k) if in_b[j]), w, z
    return None


def solve_fixed(lcp, mu, qp=None):
    """Solve the LCP at one parameter value by enumeration.

    The objective is reported when the originating QP is given (needed for
    x^T Q x); otherwise it is recovered from the LCP blocks, where 2Q is the
    top-left n x n block of M.
    """
    mu = to_rat(mu)
    q = lcp.q_at(mu)
    found = solve_lcp_fixed(lcp.M, q)
    if found is None:
        return OracleResult(INFEASIBLE_STATUS)
    basis, w, z = found
    n = lcp.n_orig
    x = z[:n]
    if qp is not None:
        objective = qp.objective(x, mu)
    else:
        quad = sum((x[i] * lcp.M[i][j] * x[j] for i in range(n) for j in range(n)), ZERO) / 2
        objective = quad + sum((q[i] * x[i] for i in range(n)), ZERO)
    return OracleResult(SOLVED, x, objective, basis, w, z)


@dataclass
class VerifyReport:
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    @property
    def first_divergence(self):
        return self.failures[0] if self.failures else None

    def fail(self, mu, message):
        self.failures.append((mu, message))

    def summary(self):
        if self.ok:
            return f"verify: {self.checked} samples, all agree with the oracle"
        mu, message = self.failures[0]
        return (
            f"verify: {len(self.failures)} of {self.checked} samples disagree; "
            f"first at mu={mu}: {message}"
        )


def sample_points(path, sample_count):
    points = set()
    for piece in path.pieces:
        points.add(piece.mu_lo)
        points.add(piece.mu_hi)
        points.add((piece.mu_lo + piece.mu_hi) / 2)
    lo, hi = path.mu_min, path.mu_max
    if sample_count == 1:
        points.add(lo)
    elif sample_count > 1:
        step = (hi - lo) / (sample_count - 1)
        points.update(lo + i * step for i in range(sample_count))
    return sorted(points)


def verify_path(qp, path, sample_count=11):
    """Compare a traced path against enumeration at endpoints, midpoints and equispaced points.

    Objective values are compared exactly (optimal x need not be unique);
    feasibility status must match, and every returned x must be feasible.
    """
    lcp = qp_to_lcp(qp, check_psd=False)
    report = VerifyReport()
    for mu in sample_points(path, sample_count):
        report.checked += 1
        truth = solve_fixed(lcp, mu, qp)
        left, right = eval_path(path, mu, both=True)
        if truth.status == INFEASIBLE_STATUS:
            if right is not INFEASIBLE:
                report.fail(mu, "path gives a solution where the problem is infeasible")
            continue
        if right is INFEASIBLE:
            report.fail(mu, f"path reports infeasible, oracle objective {truth.objective}")
            continue
        for label, x in (("x", right), ("x_from", left)):
            if not qp.is_feasible(x, mu):
                report.fail(mu, f"{label}={list(map(str, x))} violates the constraints")
            elif qp.objective(x, mu) != truth.objective:
                report.fail(
                    mu, f"objective {qp.objective(x, mu)} at {label}, oracle {truth.objective}"
                )
    for piece in path.pieces:
        if isinstance(piece, JumpRecord):
            mu = piece.mu
            if qp.objective(piece.x_from, mu) != qp.objective(piece.x_to, mu):
                report.fail(mu, "jump endpoints have different objective values")
        elif isinstance(piece, InfeasibleInterval) and piece.mu_lo < piece.mu_hi:
            mid = (piece.mu_lo + piece.mu_hi) / 2
            if solve_fixed(lcp, mid, qp).status != INFEASIBLE_STATUS:
                report.fail(mid, "infeasible interval is feasible at its midpoint")
    return report
