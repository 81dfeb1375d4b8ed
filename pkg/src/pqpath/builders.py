"""Standard-form parametric QPs for the C-SVM dual and choice-based conjoint analysis.

The solver minimizes x^T Q x + c^T x, so objectives written as 1/2 ||.||^2
get Q with the 1/2 folded in.  The parameter mu plays the role of C.
"""

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    ONE,
    ZERO,
    AffineScalar,
    ParametricQP,
    embed_free_variables,
    to_rat,
    validate_psd,
)
from .errors import InvariantError, StructureError

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class SvmInstance:
    labels: tuple
    points: tuple = None
    kernel: tuple = None

    def __post_init__(self):
        labels = tuple(int(y) for y in self.labels)
        if any(y not in (1, -1) for y in labels):
            raise StructureError("SVM labels must be +1 or -1")
        if (self.points is None) == (self.kernel is None):
            raise StructureError("give either points or a precomputed kernel matrix")
        object.__setattr__(self, "labels", labels)
        if self.points is not None:
            points = tuple(tuple(to_rat(v) for v in p) for p in self.points)
            if len(points) != len(labels):
                raise StructureError(f"{len(points)} points but {len(labels)} labels")
            if len({len(p) for p in points}) > 1:
                raise StructureError("points have different dimensions")
            object.__setattr__(self, "points", points)
        else:
            kernel = tuple(tuple(to_rat(v) for v in row) for row in self.kernel)
            if len(kernel) != len(labels) or any(len(row) != len(labels) for row in kernel):
                raise StructureError("kernel matrix must be square with one row per label")
            if not validate_psd(kernel):
                raise StructureError("kernel matrix is not positive semidefinite")
            object.__setattr__(self, "kernel", kernel)

    def gram(self):
        if self.kernel is not None:
            return self.kernel
        return tuple(
            tuple(sum((a * b for a, b in zip(p, q)), ZERO) for q in self.points)
            for p in self.points
        )


def build_svm_dual(inst, c_range, sum_alpha=0):
    """Dual soft-margin SVM with the box bound C as path parameter.

    minimize  1/2 sum_ij a_i a_j y_i y_j K_ij - sum_i a_i
    s.t.      sum_i y_i a_i = sum_alpha  (as two opposite inequalities)
              -a_i >= -C,  a_i >= 0
    """
    K = inst.gram()
    y = inst.labels
    n = len(y)
    Q = [[HALF * y[i] * y[j] * K[i][j] for j in range(n)] for i in range(n)]
    c = [AffineScalar(-1, 0)] * n
    target = to_rat(sum_alpha)
    A = [list(map(Fraction, y)), [Fraction(-v) for v in y]]
    b = [AffineScalar(target, 0), AffineScalar(-target, 0)]
    for i in range(n):
        A.append([-ONE if j == i else ZERO for j in range(n)])
        b.append(AffineScalar(0, -1))
    qp = ParametricQP(Q, A, c, b, c_range[0], c_range[1])
    if not validate_psd(qp.Q):
        raise StructureError("kernel matrix is not positive semidefinite")
    return qp


@dataclass(frozen=True)
class ConjointDesign:
    attribute_level_counts: tuple

    def __post_init__(self):
        counts = tuple(int(v) for v in self.attribute_level_counts)
        if not counts or any(v < 2 for v in counts):
            raise StructureError("every attribute needs at least two levels")
        object.__setattr__(self, "attribute_level_counts", counts)

    @property
    def total_levels(self):
        return sum(self.attribute_level_counts)

    def offsets(self):
        out, acc = [], 0
        for count in self.attribute_level_counts:
            out.append(acc)
            acc += count
        return out

    def characteristic(self, option):
        """0/1 indicator of the levels present in ``option`` (1-based level per attribute)."""
        counts = self.attribute_level_counts
        if len(option) != len(counts):
            raise StructureError(f"option {option} has {len(option)} attributes, expected {len(counts)}")
        chi = [0] * self.total_levels
        for attr, (offset, level) in enumerate(zip(self.offsets(), option)):
            if not 1 <= level <= counts[attr]:
                raise StructureError(f"level {level} out of range for attribute {attr + 1}")
            chi[offset + level - 1] = 1
        return chi


@dataclass(frozen=True)
class ChoiceObservation:
    """``winner`` was chosen over ``loser``; both are tuples of 1-based level indices."""

    winner: tuple
    loser: tuple

    def __post_init__(self):
        object.__setattr__(self, "winner", tuple(int(v) for v in self.winner))
        object.__setattr__(self, "loser", tuple(int(v) for v in self.loser))
        if self.winner == self.loser:
            raise StructureError("winner and loser are the same option")


@dataclass(frozen=True)
class ConjointProblem:
    """A CBC(C) instance in standard form together with its variable layout.

    Solver variables are (v+, xi, v-): the part-worths split into positive
    and negative parts, one slack per choice between them.
    """

    qp: ParametricQP
    design: ConjointDesign
    choices: tuple
    split: object

    @property
    def n_levels(self):
        return self.design.total_levels

    def part_worths(self, x):
        """Back-map a solver vector to the m part-worth values v = v+ - v-."""
        return self.split.recover(x)[: self.n_levels]

    def slacks(self, x):
        return list(x[self.n_levels : self.n_levels + len(self.choices)])

    def recover(self, x):
        """Part-worths followed by slacks."""
        return self.split.recover(x)

    def part_worths_by_attribute(self, x):
        v = self.part_worths(x)
        return [
            v[offset : offset + count]
            for offset, count in zip(self.design.offsets(), self.design.attribute_level_counts)
        ]

    def choice_vector(self, j):
        choice = self.choices[j]
        a = self.design.characteristic(choice.winner)
        b = self.design.characteristic(choice.loser)
        return [p - q for p, q in zip(a, b)]


def build_cbc(design, choices, c_range):
    """minimize 1/2 ||v||^2 + C sum_j xi_j  s.t.  v^T n_ab + xi_j >= 1, xi >= 0, v free."""
    choices = tuple(choices)
    if not choices:
        raise StructureError("CBC needs at least one choice observation")
    m = design.total_levels
    s = len(choices)
    size = m + s
    rows = []
    for choice in choices:
        a = design.characteristic(choice.winner)
        b = design.characteristic(choice.loser)
        row = [Fraction(p - q) for p, q in zip(a, b)] + [ZERO] * s
        rows.append(row)
    for j in range(s):
        rows[j][m + j] = ONE
    Q = [[HALF if i == j and i < m else ZERO for j in range(size)] for i in range(size)]
    c = [AffineScalar(0, 0)] * m + [AffineScalar(0, 1)] * s
    split = embed_free_variables(Q, rows, c, [i < m for i in range(size)])
    qp = ParametricQP(
        split.Q, split.A, split.c, [AffineScalar(1, 0)] * s, c_range[0], c_range[1]
    )
    # slack rows of Q are zero, so rank(Q) <= m < dimension
    if not any(all(v == 0 for v in row) for row in qp.Q):
        raise InvariantError("CBC objective matrix should be singular")
    if not validate_psd(qp.Q):
        raise InvariantError("CBC objective matrix should be positive semidefinite")
    return ConjointProblem(qp, design, choices, split)
