"""Instance generators and solver-independent checkers shared by the tests."""

import random
from pathlib import Path
from fractions import Fraction

from pqpath.builders import ChoiceObservation, ConjointDesign, build_cbc
from pqpath.core import ZERO, AffineScalar, ParametricQP
from pqpath.path import InfeasibleInterval, JumpRecord, PathSegment


def gram_psd(rng, n, rank, lo=-3, hi=3):
    G = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(rank)]
    return [[sum(G[t][i] * G[t][j] for t in range(rank)) for j in range(n)] for i in range(n)]


def random_rank_deficient_qp(rng, mu_range=(-3, 3)):
    """n <= 4, m <= 3, Q = G^T G with rank(G) <= 2, data in [-3, 3], slopes in [-2, 2]."""
    n = rng.randint(1, 4)
    m = rng.randint(0, 3)
    Q = gram_psd(rng, n, rng.randint(1, 2))
    A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
    c = [AffineScalar(rng.randint(-3, 3), rng.randint(-2, 2)) for _ in range(n)]
    b = [AffineScalar(rng.randint(-3, 3), rng.randint(-2, 2)) for _ in range(m)]
    return ParametricQP(Q, A, c, b, *mu_range)


def random_fixed_qp(rng, max_n=4, max_m=4):
    n = rng.randint(1, max_n)
    m = rng.randint(0, max_m)
    Q = gram_psd(rng, n, rng.randint(0, n))
    A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
    c = [rng.randint(-5, 5) for _ in range(n)]
    b = [rng.randint(-5, 5) for _ in range(m)]
    return ParametricQP(Q, A, c, b, 0, 0)


def synthetic_cbc(seed, levels=(3, 3, 4), n_choices=40, noise=Fraction(1, 10), c_range=(1, 10**4)):
    """Choices drawn from a planted utility; each answer is flipped with probability ``noise``."""
    rng = random.Random(seed)
    design = ConjointDesign(levels)
    utility = [[Fraction(rng.randint(-20, 20), 10) for _ in range(k)] for k in levels]
    choices = []
    while len(choices) < n_choices:
        a = tuple(rng.randint(1, k) for k in levels)
        b = tuple(rng.randint(1, k) for k in levels)
        ua = sum(utility[i][a[i] - 1] for i in range(len(levels)))
        ub = sum(utility[i][b[i] - 1] for i in range(len(levels)))
        if a == b or ua == ub:
            continue
        if ua < ub:
            a, b = b, a
        if rng.random() < noise:
            a, b = b, a
        choices.append(ChoiceObservation(a, b))
    return build_cbc(design, choices, c_range)


def matvec(A, x):
    return [sum((a * v for a, v in zip(row, x)), ZERO) for row in A]


def kkt_violations(qp, x, y, mu):
    """Primal feasibility, dual feasibility and complementarity, evaluated from the QP data only."""
    out = []
    n, m = qp.n, qp.m
    Ax = matvec(qp.A, x)
    v = [Ax[i] - qp.b[i](mu) for i in range(m)]
    Aty = [sum((qp.A[r][j] * y[r] for r in range(m)), ZERO) for j in range(n)]
    Qx = matvec(qp.Q, x)
    u = [qp.c[j](mu) - Aty[j] + 2 * Qx[j] for j in range(n)]
    if any(val < 0 for val in v):
        out.append("v = Ax - b < 0")
    if any(val < 0 for val in x):
        out.append("x < 0")
    if any(val < 0 for val in u):
        out.append("u = c - A^T y + 2Qx < 0")
    if any(val < 0 for val in y):
        out.append("y < 0")
    if sum((a * b for a, b in zip(x, u)), ZERO) != 0:
        out.append("x^T u != 0")
    if sum((a * b for a, b in zip(y, v)), ZERO) != 0:
        out.append("y^T v != 0")
    return out


def segment_kkt_violations(qp, seg):
    out = []
    n = qp.n
    for mu in (seg.mu_lo, (seg.mu_lo + seg.mu_hi) / 2, seg.mu_hi):
        z = seg.z_at(mu)
        for problem in kkt_violations(qp, z[:n], z[n:], mu):
            out.append((mu, problem))
        # the stored w must be the slack of w - Mz = q
        w = seg.w_at(mu)
        x, y = z[:n], z[n:]
        Ax = matvec(qp.A, x)
        Qx = matvec(qp.Q, x)
        u = [qp.c[j](mu) - sum((qp.A[r][j] * y[r] for r in range(qp.m)), ZERO) + 2 * Qx[j]
             for j in range(n)]
        v = [Ax[i] - qp.b[i](mu) for i in range(qp.m)]
        if list(w) != u + v:
            out.append((mu, "stored w differs from (u, v)"))
    return out


def coverage_violations(path):
    out = []
    pieces = path.pieces
    if not pieces:
        return ["empty path"]
    if pieces[0].mu_lo != path.mu_min:
        out.append("path does not start at mu_min")
    if pieces[-1].mu_hi != path.mu_max:
        out.append("path does not end at mu_max")
    for prev, cur in zip(pieces, pieces[1:]):
        if cur.mu_lo != prev.mu_hi:
            out.append(f"gap or overlap between {prev.mu_hi} and {cur.mu_lo}")
    for piece in pieces:
        if piece.mu_lo > piece.mu_hi:
            out.append(f"reversed piece [{piece.mu_lo}, {piece.mu_hi}]")
    starts = [p.mu_lo for p in pieces if isinstance(p, PathSegment) and p.mu_lo < p.mu_hi]
    if starts != sorted(set(starts)):
        out.append("positive-length segments do not have strictly increasing mu_lo")
    return out


def basis_repeat_violations(path):
    seen = set()
    out = []
    for seg in path.segments:
        if seg.basis.members in seen:
            out.append(f"basis {seg.basis} repeats")
        seen.add(seg.basis.members)
    return out


def objective_continuity_violations(qp, path):
    """The optimal value is unique, so it must agree wherever two feasible pieces meet."""
    out = []
    feasible = [p for p in path.pieces if not isinstance(p, InfeasibleInterval)]
    for prev, cur in zip(feasible, feasible[1:]):
        if prev.mu_hi != cur.mu_lo:
            continue
        mu = cur.mu_lo
        left = prev.x_to if isinstance(prev, JumpRecord) else prev.x_at(mu)
        right = cur.x_from if isinstance(cur, JumpRecord) else cur.x_at(mu)
        if qp.objective(left, mu) != qp.objective(right, mu):
            out.append(f"objective jumps at mu={mu}")
    for jump in path.jumps:
        if qp.objective(jump.x_from, jump.mu) != qp.objective(jump.x_to, jump.mu):
            out.append(f"jump endpoints differ in objective at mu={jump.mu}")
    return out


class IterateRecorder:
    """Collects per-iterate violations of w - Mz = q and w^T z = 0, and basis repeats per solve.

    ``rhs(mu)`` returns the (s, t) parts of the right-hand side the solver sees at mu.
    """

    def __init__(self, M, rhs):
        self.M = M
        self.rhs = rhs
        self.violations = []
        self.count = 0
        self.bases = {}

    @classmethod
    def for_lcp(cls, lcp):
        return cls(lcp.M, lambda mu: (lcp.q_at(mu), lcp.q1))

    @classmethod
    def for_fixed(cls, M, q):
        return cls(M, lambda _mu: (q.s, q.t))

    def hook(self, solve_id=0):
        """Adapter for criss_cross_solve's (basis, lam) callback."""
        return lambda basis, lam: self(solve_id, 0, basis, lam)

    def __call__(self, solve_id, mu, basis, lam):
        self.count += 1
        k = len(self.M)
        for part, rhs in zip((lam.s, lam.t), self.rhs(mu)):
            w = [part[j] if j in basis else ZERO for j in range(k)]
            z = [ZERO if j in basis else part[j] for j in range(k)]
            Mz = matvec(self.M, z)
            if [w[j] - Mz[j] for j in range(k)] != list(rhs):
                self.violations.append((solve_id, mu, "w - Mz != q"))
            if sum((a * b for a, b in zip(w, z)), ZERO) != 0:
                self.violations.append((solve_id, mu, "w^T z != 0"))
        seen = self.bases.setdefault(solve_id, set())
        if basis.members in seen:
            self.violations.append((solve_id, mu, f"basis {basis} repeated within a solve"))
        seen.add(basis.members)


PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def load_problem(name):
    from pqpath.io import parse_problem

    return parse_problem((PROBLEMS / name).read_text(encoding="utf-8"))


def invariant_violations(qp):
    """Trace qp with per-iterate recording and return (path, all violations found)."""
    from pqpath.core import qp_to_lcp
    from pqpath.path import trace_path

    lcp = qp_to_lcp(qp)
    rec = IterateRecorder.for_lcp(lcp)
    path = trace_path(lcp, on_iterate=rec)
    problems = list(rec.violations)
    for seg in path.segments:
        problems += segment_kkt_violations(qp, seg)
    problems += basis_repeat_violations(path)
    problems += coverage_violations(path)
    problems += objective_continuity_violations(qp, path)
    return path, problems, rec.count
