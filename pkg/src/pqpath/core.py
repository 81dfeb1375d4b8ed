"""Problem data types, exact rational input handling and the QP -> LCP reduction.

A parametric QP is

    minimize    x^T Q x + c(mu)^T x
    subject to  A x >= b(mu),  x >= 0

with c and b affine in mu.  Its KKT system is the LCP

    w - M z = q(mu),  w, z >= 0,  w^T z = 0

with M = [[2Q, -A^T], [A, 0]], q(mu) = (c(mu), -b(mu)), z = (x, y), w = (u, v).
"""

from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from numbers import Rational

from .errors import StructureError

Rat = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rat(value):
    """Convert an int, Fraction, Decimal or string (``"3"``, ``"0.25"``, ``"-1/3"``) exactly.

    Floats are converted through their shortest decimal repr, so ``0.1`` becomes 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"not a finite number: {value}")
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch.isspace() for ch in text):
            raise ValueError(f"malformed rational {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_rat(value):
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def sign(value):
    return (value > 0) - (value < 0)


@dataclass(frozen=True)
class AffineScalar:
    """f(mu) = const + mu * slope."""

    const: Fraction = ZERO
    slope: Fraction = ZERO

    def __post_init__(self):
        object.__setattr__(self, "const", to_rat(self.const))
        object.__setattr__(self, "slope", to_rat(self.slope))

    def __call__(self, mu):
        return self.const + to_rat(mu) * self.slope

    def __neg__(self):
        return AffineScalar(-self.const, -self.slope)

    def __add__(self, other):
        if not isinstance(other, AffineScalar):
            other = AffineScalar(to_rat(other), ZERO)
        return AffineScalar(self.const + other.const, self.slope + other.slope)

    def scale(self, factor):
        factor = to_rat(factor)
        return AffineScalar(self.const * factor, self.slope * factor)


def affine_vector(const, slope):
    if len(const) != len(slope):
        raise StructureError(f"constant part has {len(const)} entries, slope has {len(slope)}")
    return tuple(AffineScalar(a, b) for a, b in zip(const, slope))


@dataclass(frozen=True)
class EpsVector:
    """The vector s + eps * t for a symbolic, arbitrarily small eps > 0."""

    s: tuple
    t: tuple

    def __post_init__(self):
        if len(self.s) != len(self.t):
            raise StructureError("EpsVector parts differ in length")
        object.__setattr__(self, "s", tuple(to_rat(v) for v in self.s))
        object.__setattr__(self, "t", tuple(to_rat(v) for v in self.t))

    def __len__(self):
        return len(self.s)

    def sign(self, j):
        return sign(self.s[j]) if self.s[j] != 0 else sign(self.t[j])

    def is_nonnegative(self):
        return all(self.sign(j) >= 0 for j in range(len(self.s)))

    @classmethod
    def exact(cls, values):
        values = tuple(values)
        return cls(values, (ZERO,) * len(values))


def _as_matrix(rows, name):
    matrix = tuple(tuple(to_rat(v) for v in row) for row in rows)
    widths = {len(row) for row in matrix}
    if len(widths) > 1:
        raise StructureError(f"{name} has rows of different lengths")
    return matrix


def is_symmetric(Q):
    n = len(Q)
    return all(len(row) == n for row in Q) and all(
        Q[i][j] == Q[j][i] for i in range(n) for j in range(i + 1, n)
    )


def validate_psd(Q):
    """True iff the symmetric rational matrix Q is positive semidefinite.

    Exact symmetric elimination with diagonal pivoting: every pivot must be
    nonnegative, and a row/column whose diagonal has become zero must be
    entirely zero at that point.
    """
    Q = [[to_rat(v) for v in row] for row in Q]
    if not is_symmetric(Q):
        raise StructureError("matrix is not square and symmetric")
    active = list(range(len(Q)))
    while active:
        if any(Q[i][i] < 0 for i in active):
            return False
        p = next((i for i in active if Q[i][i] > 0), None)
        if p is None:
            # all remaining diagonal entries are zero
            return all(Q[i][j] == 0 for i in active for j in active)
        active.remove(p)
        pivot = Q[p][p]
        for i in active:
            f = Q[i][p]
            if f == 0:
                continue
            ratio = f / pivot
            for j in active:
                if Q[p][j]:
                    Q[i][j] -= ratio * Q[p][j]
    return True


@dataclass(frozen=True)
class ParametricQP:
    Q: tuple
    A: tuple
    c: tuple
    b: tuple
    mu_min: Fraction
    mu_max: Fraction

    def __post_init__(self):
        Q = _as_matrix(self.Q, "Q")
        A = _as_matrix(self.A, "A")
        c = tuple(v if isinstance(v, AffineScalar) else AffineScalar(v) for v in self.c)
        b = tuple(v if isinstance(v, AffineScalar) else AffineScalar(v) for v in self.b)
        n = len(Q)
        if n == 0:
            raise StructureError("a QP needs at least one variable")
        if any(len(row) != n for row in Q):
            raise StructureError(f"Q must be {n}x{n}")
        if any(len(row) != n for row in A):
            raise StructureError(f"every row of A must have {n} entries")
        if len(c) != n:
            raise StructureError(f"c has {len(c)} entries, expected {n}")
        if len(b) != len(A):
            raise StructureError(f"b has {len(b)} entries, expected {len(A)}")
        if not is_symmetric(Q):
            raise StructureError("Q is not symmetric")
        mu_min, mu_max = to_rat(self.mu_min), to_rat(self.mu_max)
        if mu_min > mu_max:
            raise StructureError(f"empty parameter interval [{mu_min}, {mu_max}]")
        for name, value in (("Q", Q), ("A", A), ("c", c), ("b", b), ("mu_min", mu_min), ("mu_max", mu_max)):
            object.__setattr__(self, name, value)

    @property
    def n(self):
        return len(self.Q)

    @property
    def m(self):
        return len(self.A)

    def c_at(self, mu):
        return [f(mu) for f in self.c]

    def b_at(self, mu):
        return [f(mu) for f in self.b]

    def objective(self, x, mu):
        x = [to_rat(v) for v in x]
        quad = sum(
            (x[i] * self.Q[i][j] * x[j] for i in range(self.n) if x[i] for j in range(self.n) if x[j]),
            ZERO,
        )
        return quad + sum((ci * xi for ci, xi in zip(self.c_at(mu), x)), ZERO)

    def is_feasible(self, x, mu):
        if any(v < 0 for v in x):
            return False
        b = self.b_at(mu)
        return all(sum((a * v for a, v in zip(row, x)), ZERO) >= bi for row, bi in zip(self.A, b))

    def with_interval(self, mu_min, mu_max):
        return ParametricQP(self.Q, self.A, self.c, self.b, mu_min, mu_max)


@dataclass(frozen=True)
class ParametricLCP:
    M: tuple
    q: tuple
    n_orig: int
    mu_min: Fraction = ZERO
    mu_max: Fraction = ZERO

    @property
    def k(self):
        return len(self.M)

    @property
    def q0(self):
        return tuple(f.const for f in self.q)

    @property
    def q1(self):
        return tuple(f.slope for f in self.q)

    def q_at(self, mu):
        return tuple(f(mu) for f in self.q)

    def eps_rhs(self, mu):
        """q(mu + eps) as an EpsVector."""
        return EpsVector(self.q_at(mu), self.q1)


def qp_to_lcp(p, check_psd=True):
    """Reduce a ParametricQP to its KKT linear complementarity problem."""
    if not is_symmetric(p.Q):
        raise StructureError("Q is not symmetric")
    if check_psd and not validate_psd(p.Q):
        raise StructureError("Q is not positive semidefinite")
    n, m = p.n, p.m
    k = n + m
    M = [[ZERO] * k for _ in range(k)]
    for i in range(n):
        for j in range(n):
            M[i][j] = 2 * p.Q[i][j]
    for r in range(m):
        for j in range(n):
            M[j][n + r] = -p.A[r][j]
            M[n + r][j] = p.A[r][j]
    q = tuple(p.c) + tuple(-f for f in p.b)
    return ParametricLCP(tuple(tuple(row) for row in M), q, n, p.mu_min, p.mu_max)


@dataclass(frozen=True)
class FreeSplit:
    """Standard-form data after splitting sign-free variables, plus the back-map.

    Variable layout: the original n variables first (the free ones now meaning
    their positive part), then one negative-part variable per free variable,
    in original order.
    """

    Q: tuple
    A: tuple
    c: tuple
    free_indices: tuple
    n_orig: int = field(default=0)

    @property
    def n(self):
        return len(self.Q)

    def recover(self, x_split):
        x = list(x_split[: self.n_orig])
        for offset, i in enumerate(self.free_indices):
            x[i] = x[i] - x_split[self.n_orig + offset]
        return x


def embed_free_variables(Q, A, c, free_mask):
    """Split every variable with free_mask[i] true as x_i = x_i^+ - x_i^-.

    With P = [I | -E_free] (so x = P x'), the new data are P^T Q P, A P and
    P^T c, which keeps Q positive semidefinite.
    """
    n = len(Q)
    if len(free_mask) != n or len(c) != n or any(len(row) != n for row in A):
        raise StructureError("dimension mismatch in embed_free_variables")
    free = tuple(i for i in range(n) if free_mask[i])
    cols = [(i, 1) for i in range(n)] + [(i, -1) for i in free]
    Q2 = tuple(
        tuple(si * sj * to_rat(Q[i][j]) for (j, sj) in cols) for (i, si) in cols
    )
    A2 = tuple(tuple(sj * to_rat(row[j]) for (j, sj) in cols) for row in A)
    c_aff = [f if isinstance(f, AffineScalar) else AffineScalar(f) for f in c]
    c2 = tuple(c_aff[i] if si > 0 else -c_aff[i] for (i, si) in cols)
    return FreeSplit(Q2, A2, c2, free, n)
