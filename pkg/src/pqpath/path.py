"""Exact solution paths of parametric LCPs (and therefore of parametric QPs).

The tracker walks mu upwards.  A basis B stays optimal while
lambda_B(mu) = beta0 + mu * beta1 >= 0; at the first root the criss-cross
method is restarted from B with right-hand side q(mu' + eps), which yields a
basis valid on a new interval [mu', mu' + eps'].
"""

import bisect
from dataclasses import dataclass, field
from fractions import Fraction

from .core import ZERO, to_rat
from .crisscross import (
    DEFAULT_MAX_PIVOTS,
    Basis,
    InfeasibilityCertificate,
    Solved,
    Tableau,
    basic_solution,
)
from .errors import InvariantError

DEFAULT_MAX_BENDS = 10**6


class _Infeasible:
    def __repr__(self):
        return "INFEASIBLE"

    def __bool__(self):
        return False


INFEASIBLE = _Infeasible()


def _affine(v0, v1, mu):
    return [a + mu * b for a, b in zip(v0, v1)]


@dataclass(frozen=True)
class PathSegment:
    """On [mu_lo, mu_hi] the basis is optimal and z(mu) = z0 + mu z1, w(mu) = w0 + mu w1."""

    mu_lo: Fraction
    mu_hi: Fraction
    basis: Basis
    z0: tuple
    z1: tuple
    w0: tuple
    w1: tuple
    n: int

    @property
    def x0(self):
        return self.z0[: self.n]

    @property
    def x1(self):
        return self.z1[: self.n]

    def x_at(self, mu):
        return _affine(self.x0, self.x1, to_rat(mu))

    def z_at(self, mu):
        return _affine(self.z0, self.z1, to_rat(mu))

    def w_at(self, mu):
        return _affine(self.w0, self.w1, to_rat(mu))

    def contains(self, mu):
        return self.mu_lo <= mu <= self.mu_hi


@dataclass(frozen=True)
class JumpRecord:
    """Both x_from and x_to (and everything between) are optimal at mu."""

    mu: Fraction
    x_from: tuple
    x_to: tuple

    @property
    def mu_lo(self):
        return self.mu

    @property
    def mu_hi(self):
        return self.mu

    def contains(self, mu):
        return mu == self.mu


@dataclass(frozen=True)
class InfeasibleInterval:
    """No solution for mu strictly inside (mu_lo, mu_hi); endpoints may belong to neighbours."""

    mu_lo: Fraction
    mu_hi: Fraction
    certificate: InfeasibilityCertificate

    def contains(self, mu):
        return self.mu_lo <= mu <= self.mu_hi


@dataclass(frozen=True)
class Restart:
    mu: Fraction
    pivots: int
    kind: str  # "cold" (from B = [k]), "warm" (from the previous basis) or "point" (no eps)


@dataclass(frozen=True)
class PathStats:
    restarts: tuple = ()

    @property
    def cold_pivots(self):
        return next((r.pivots for r in self.restarts if r.kind == "cold"), 0)

    @property
    def bend_pivots(self):
        return tuple(r.pivots for r in self.restarts if r.kind == "warm")

    @property
    def bends(self):
        return len(self.bend_pivots)

    def sequence(self):
        """(cold, bend_1, bend_2, ...) pivot counts."""
        return (self.cold_pivots,) + self.bend_pivots


@dataclass(frozen=True)
class SolutionPath:
    pieces: tuple
    n: int
    mu_min: Fraction
    mu_max: Fraction
    stats: PathStats = field(default_factory=PathStats)

    @property
    def segments(self):
        return tuple(p for p in self.pieces if isinstance(p, PathSegment))

    @property
    def jumps(self):
        return tuple(p for p in self.pieces if isinstance(p, JumpRecord))

    @property
    def infeasible_intervals(self):
        return tuple(p for p in self.pieces if isinstance(p, InfeasibleInterval))

    def breakpoints(self):
        return sorted({s.mu_lo for s in self.segments} | {s.mu_hi for s in self.segments})

    def __call__(self, mu):
        return eval_path(self, mu)


def _upper_end(beta0, beta1, mu):
    """Largest mu' >= mu with beta0 + mu' beta1 >= 0, or None for +infinity."""
    best = None
    for a, b in zip(beta0, beta1):
        if b < 0:
            root = -a / b
            if best is None or root < best:
                best = root
    if best is not None and best < mu:
        raise InvariantError(f"basis is not valid at mu={mu}")
    return best


def segment_upper_end(basis, lcp, mu):
    """Largest mu' >= mu for which basis stays feasible (None means +infinity)."""
    mu = to_rat(mu)
    beta0 = basic_solution(lcp, basis, lcp.q0).lam.s
    beta1 = basic_solution(lcp, basis, lcp.q1).lam.s
    return _upper_end(beta0, beta1, mu)


def restart_at_bend(basis, lcp, mu_prime, max_pivots=DEFAULT_MAX_PIVOTS):
    """Criss-cross from basis with right-hand side q(mu_prime + eps)."""
    tab = Tableau.for_basis(lcp.M, basis, lcp.q0, lcp.q1)
    return tab.solve(to_rat(mu_prime), max_pivots=max_pivots)


def _segment(tab, n, lo, hi):
    beta0, beta1 = tab.affine_parts()
    basis = tab.basis
    z0 = tuple(ZERO if j in basis else v for j, v in enumerate(beta0))
    z1 = tuple(ZERO if j in basis else v for j, v in enumerate(beta1))
    w0 = tuple(v if j in basis else ZERO for j, v in enumerate(beta0))
    w1 = tuple(v if j in basis else ZERO for j, v in enumerate(beta1))
    return PathSegment(lo, hi, basis, z0, z1, w0, w1, n)


class _Tracer:
    def __init__(self, lcp, max_pivots, max_bends, on_iterate=None):
        self.lcp = lcp
        self.on_iterate = on_iterate
        self.M = lcp.M
        self.q0 = lcp.q0
        self.q1 = lcp.q1
        self.n = lcp.n_orig
        self.mu_max = to_rat(lcp.mu_max)
        self.max_pivots = max_pivots
        self.max_bends = max_bends
        self.pieces = []
        self.restarts = []
        self.segment_bases = set()

    def emit(self, piece):
        if isinstance(piece, PathSegment):
            if piece.basis.members in self.segment_bases:
                raise InvariantError(f"basis {piece.basis} repeated along the path")
            self.segment_bases.add(piece.basis.members)
        self.pieces.append(piece)

    def solve(self, tab, mu, kind, exact=False):
        hook = None
        if self.on_iterate is not None:
            solve_id = len(self.restarts)
            hook = lambda basis, lam: self.on_iterate(solve_id, mu, basis, lam)  # noqa: E731

        result = tab.solve(mu, max_pivots=self.max_pivots, exact=exact, on_iterate=hook)
        self.restarts.append(Restart(mu, result.pivots, kind))
        return result

    def feasible_piece_ends_at(self, mu):
        return bool(self.pieces) and isinstance(self.pieces[-1], PathSegment) and self.pieces[-1].mu_hi == mu

    def point_check(self, mu):
        """Solve at mu exactly; emit a zero-length segment if feasible there."""
        tab = Tableau(self.M, self.q0, self.q1)
        if isinstance(self.solve(tab, mu, "point", exact=True), Solved):
            self.emit(_segment(tab, self.n, mu, mu))

    def run(self, mu):
        tab = Tableau(self.M, self.q0, self.q1)
        result = self.solve(tab, mu, "cold")
        for _ in range(self.max_bends):
            if isinstance(result, Solved):
                beta0, beta1 = tab.affine_parts()
                if self.feasible_piece_ends_at(mu):
                    x_from = tuple(self.pieces[-1].x_at(mu))
                    x_to = tuple(
                        ZERO if j in tab.basis else a + mu * b
                        for j, (a, b) in enumerate(zip(beta0[: self.n], beta1[: self.n]))
                    )
                    if x_from != x_to:
                        self.emit(JumpRecord(mu, x_from, x_to))
                hi = _upper_end(beta0, beta1, mu)
                hi = self.mu_max if hi is None else min(hi, self.mu_max)
                self.emit(_segment(tab, self.n, mu, hi))
                if hi >= self.mu_max:
                    return
                mu = hi
                result = self.solve(tab, mu, "warm")
            else:
                cert = result.certificate
                if not self.feasible_piece_ends_at(mu):
                    self.point_check(mu)
                value, slope = cert.lambda_r
                # lambda_r(nu) = value + (nu - mu) * slope stays <= 0 up to its root
                end = mu - value / slope if slope > 0 else None
                end = self.mu_max if end is None else min(end, self.mu_max)
                self.emit(InfeasibleInterval(mu, end, cert))
                mu = end
                if mu >= self.mu_max:
                    self.point_check(mu)
                    return
                tab = Tableau(self.M, self.q0, self.q1)
                result = self.solve(tab, mu, "cold")
        raise InvariantError(f"path tracing exceeded {self.max_bends} bends")


def trace_path(lcp, max_pivots=DEFAULT_MAX_PIVOTS, max_bends=DEFAULT_MAX_BENDS, on_iterate=None):
    """Trace the exact solution path of ``lcp`` over [lcp.mu_min, lcp.mu_max].

    ``on_iterate(solve_id, mu, basis, lam)`` sees every basic solution of every
    criss-cross run; ``lam`` is lambda at q(mu + eps) (at q(mu) for point solves).
    """
    tracer = _Tracer(lcp, max_pivots, max_bends, on_iterate)
    tracer.run(to_rat(lcp.mu_min))
    return SolutionPath(
        tuple(tracer.pieces),
        tracer.n,
        to_rat(lcp.mu_min),
        to_rat(lcp.mu_max),
        PathStats(tuple(tracer.restarts)),
    )


def eval_path(path, mu, both=False):
    """x*(mu), right-continuous at jumps; INFEASIBLE inside an infeasible interval.

    With ``both=True`` a pair (left, right) is returned; the two differ only at jumps.
    """
    mu = to_rat(mu)
    if not path.mu_min <= mu <= path.mu_max:
        raise ValueError(f"mu={mu} outside the traced interval [{path.mu_min}, {path.mu_max}]")
    pieces = path.pieces
    starts = [p.mu_lo for p in pieces]
    i = bisect.bisect_right(starts, mu) - 1
    right = left = None
    infeasible_here = False
    while i >= 0 and pieces[i].contains(mu):
        piece = pieces[i]
        if isinstance(piece, JumpRecord):
            right = right if right is not None else list(piece.x_to)
            left = list(piece.x_from)
            break
        if isinstance(piece, PathSegment):
            value = piece.x_at(mu)
            right = right if right is not None else value
            left = value
            if piece.mu_lo < mu:
                break
        else:
            infeasible_here = True
        i -= 1
    if right is None:
        if not infeasible_here:
            raise InvariantError(f"no path piece covers mu={mu}")
        return (INFEASIBLE, INFEASIBLE) if both else INFEASIBLE
    return (left, right) if both else right
