"""Text formats: PQP problem files, path output, and the SVM / CBC CSV inputs.

PQP files are line oriented; ``#`` starts a comment::

    pqp 1
    n 1  m 0
    mu -2 2
    Q
    1
    c0 0
    c1 1

``A`` (m rows) and ``b0``/``b1`` may be omitted when m = 0.
"""

import csv
import io
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction

from .builders import ChoiceObservation, SvmInstance
from .core import AffineScalar, ParametricQP, format_rat, to_rat
from .errors import ParseError, StructureError
from .path import INFEASIBLE, InfeasibleInterval, JumpRecord, PathSegment, eval_path

DEFAULT_PRECISION = 12


@dataclass(frozen=True)
class ProblemFile:
    qp: ParametricQP
    name: str = ""
    comments: tuple = field(default=())


def _tokens(line):
    """Split a line into (column, token) pairs, ignoring comments."""
    body = line.split("#", 1)[0]
    out = []
    i = 0
    while i < len(body):
        if body[i].isspace():
            i += 1
            continue
        j = i
        while j < len(body) and not body[j].isspace():
            j += 1
        out.append((i + 1, body[i:j]))
        i = j
    return out


def _rat(token, lineno, column):
    try:
        return to_rat(token)
    except (ValueError, TypeError):
        raise ParseError(f"malformed rational {token!r}", lineno, column) from None


def _int(token, lineno, column):
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", lineno, column) from None
    if value < 0:
        raise ParseError(f"expected a nonnegative integer, got {token!r}", lineno, column)
    return value


def parse_problem_file(text, name=""):
    lines = []
    comments = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            comments.append(stripped[1:].strip())
        toks = _tokens(raw)
        if toks:
            lines.append((lineno, toks))
    pos = 0

    def next_line(what):
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 1
            raise ParseError(f"unexpected end of file, expected {what}", last)
        item = lines[pos]
        pos += 1
        return item

    def expect_keyword(toks, lineno, keyword):
        if toks[0][1] != keyword:
            raise ParseError(f"expected {keyword!r}, got {toks[0][1]!r}", lineno, toks[0][0])

    def values(toks, lineno, count, what):
        if len(toks) != count:
            raise ParseError(
                f"{what} needs {count} values, found {len(toks)}",
                lineno,
                toks[0][0] if toks else None,
            )
        return [_rat(tok, lineno, col) for col, tok in toks]

    lineno, toks = next_line("header 'pqp 1'")
    expect_keyword(toks, lineno, "pqp")
    if len(toks) != 2 or toks[1][1] != "1":
        raise ParseError("unsupported format version (expected 'pqp 1')", lineno, toks[0][0])

    lineno, toks = next_line("'n <n> m <m>'")
    if len(toks) != 4 or toks[0][1] != "n" or toks[2][1] != "m":
        raise ParseError("expected 'n <n> m <m>'", lineno, toks[0][0])
    n = _int(toks[1][1], lineno, toks[1][0])
    m = _int(toks[3][1], lineno, toks[3][0])
    if n == 0:
        raise ParseError("n must be positive", lineno, toks[1][0])

    lineno, toks = next_line("'mu <min> <max>'")
    expect_keyword(toks, lineno, "mu")
    mu_min, mu_max = values(toks[1:], lineno, 2, "mu")
    if mu_min > mu_max:
        raise ParseError("mu_min exceeds mu_max", lineno, toks[1][0])

    def matrix(keyword, rows):
        ln, tk = next_line(f"section {keyword!r}")
        expect_keyword(tk, ln, keyword)
        if len(tk) != 1:
            raise ParseError(f"{keyword!r} must stand on its own line", ln, tk[1][0])
        out = []
        for r in range(rows):
            ln, tk = next_line(f"row {r + 1} of {keyword}")
            if tk[0][1] in ("Q", "A", "c0", "c1", "b0", "b1"):
                raise ParseError(f"{keyword} has {r} rows, expected {rows}", ln, tk[0][0])
            out.append(values(tk, ln, n, f"row {r + 1} of {keyword}"))
        return out

    def vector(keyword, count, optional=False):
        if optional and (pos >= len(lines) or lines[pos][1][0][1] != keyword):
            return [Fraction(0)] * count
        ln, tk = next_line(f"{keyword!r} line")
        expect_keyword(tk, ln, keyword)
        return values(tk[1:], ln, count, keyword)

    Q = matrix("Q", n)
    A = []
    if m > 0 or (pos < len(lines) and lines[pos][1][0][1] == "A"):
        A = matrix("A", m)
    c0 = vector("c0", n)
    c1 = vector("c1", n)
    b0 = vector("b0", m, optional=m == 0)
    b1 = vector("b1", m, optional=m == 0)
    if pos < len(lines):
        ln, tk = lines[pos]
        raise ParseError(f"unexpected content {tk[0][1]!r}", ln, tk[0][0])
    for i in range(n):
        for j in range(i + 1, n):
            if Q[i][j] != Q[j][i]:
                raise ParseError(f"Q is not symmetric: Q[{i + 1}][{j + 1}] != Q[{j + 1}][{i + 1}]")
    try:
        qp = ParametricQP(
            Q,
            A,
            [AffineScalar(a, b) for a, b in zip(c0, c1)],
            [AffineScalar(a, b) for a, b in zip(b0, b1)],
            mu_min,
            mu_max,
        )
    except StructureError as exc:
        raise ParseError(str(exc)) from exc
    return ProblemFile(qp, name, tuple(comments))


def parse_problem(text):
    return parse_problem_file(text).qp


def _row(values):
    return " ".join(format_rat(v) for v in values)


def write_problem(qp, comments=()):
    out = [f"# {c}" if c else "#" for c in comments]
    out.append("pqp 1")
    out.append(f"n {qp.n}  m {qp.m}")
    out.append(f"mu {format_rat(qp.mu_min)} {format_rat(qp.mu_max)}")
    out.append("Q")
    out.extend(_row(row) for row in qp.Q)
    if qp.m:
        out.append("A")
        out.extend(_row(row) for row in qp.A)
    out.append("c0 " + _row(f.const for f in qp.c))
    out.append("c1 " + _row(f.slope for f in qp.c))
    if qp.m:
        out.append("b0 " + _row(f.const for f in qp.b))
        out.append("b1 " + _row(f.slope for f in qp.b))
    return "\n".join(out) + "\n"


def format_decimal(value, precision=DEFAULT_PRECISION):
    """Round to ``precision`` significant digits, ties to even."""
    value = Fraction(value)
    if value == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = precision
        ctx.rounding = ROUND_HALF_EVEN
        d = (Decimal(value.numerator) / Decimal(value.denominator)).normalize()
    return format(d, "f")


def _vec(values):
    return ",".join(format_rat(v) for v in values)


def write_path(path, mode="exact", step=None, precision=DEFAULT_PRECISION, objective=None,
               back_map=None):
    """Render a SolutionPath.

    ``objective(x, mu)`` is evaluated on solver variables; ``back_map``
    (linear) converts solver variables to the reported ones.
    """
    show = back_map if back_map is not None else (lambda x: list(x))
    if mode == "exact":
        lines = []
        for piece in path.pieces:
            if isinstance(piece, PathSegment):
                lines.append(
                    f"segment {format_rat(piece.mu_lo)} {format_rat(piece.mu_hi)} "
                    f"x0={_vec(show(piece.x0))} x1={_vec(show(piece.x1))}"
                )
            elif isinstance(piece, JumpRecord):
                line = (
                    f"jump {format_rat(piece.mu)} from={_vec(show(piece.x_from))} "
                    f"to={_vec(show(piece.x_to))}"
                )
                if objective is not None:
                    line += (
                        f" # objective_from={format_rat(objective(piece.x_from, piece.mu))}"
                        f" objective_to={format_rat(objective(piece.x_to, piece.mu))}"
                    )
                lines.append(line)
            elif isinstance(piece, InfeasibleInterval):
                lines.append(f"infeasible {format_rat(piece.mu_lo)} {format_rat(piece.mu_hi)}")
        return "\n".join(lines) + "\n"
    if mode != "sampled":
        raise ValueError(f"unknown output mode {mode!r}")
    step = to_rat(step)
    if step <= 0:
        raise ValueError("sampling step must be positive")
    width = len(show([Fraction(0)] * path.n))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["mu"] + [f"x{i + 1}" for i in range(width)] + ["objective"])
    mu = path.mu_min
    while mu <= path.mu_max:
        x = eval_path(path, mu)
        if x is INFEASIBLE:
            writer.writerow([format_decimal(mu, precision)] + [""] * width + ["infeasible"])
        else:
            row = [format_decimal(mu, precision)]
            row += [format_decimal(v, precision) for v in show(x)]
            row.append(format_decimal(objective(x, mu), precision) if objective else "")
            writer.writerow(row)
        mu += step
    return buf.getvalue()


def _data_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield lineno, body


def read_svm_csv(text):
    """One point per row, label (+1/-1) in the last column; a non-numeric first row is a header."""
    points, labels = [], []
    first = True
    for lineno, body in _data_lines(text):
        cells = [c.strip() for c in next(csv.reader([body]))]
        try:
            values = [to_rat(c) for c in cells]
        except (ValueError, TypeError):
            if first:
                first = False
                continue
            raise ParseError(f"malformed number in {body!r}", lineno) from None
        first = False
        if len(values) < 2:
            raise ParseError("need at least one feature and a label", lineno)
        label = values[-1]
        if label not in (1, -1):
            raise ParseError(f"label must be +1 or -1, got {cells[-1]}", lineno, len(body) - len(cells[-1]) + 1)
        points.append(values[:-1])
        labels.append(int(label))
    if not labels:
        raise ParseError("no data rows")
    try:
        return SvmInstance(labels, points=points)
    except StructureError as exc:
        raise ParseError(str(exc)) from exc


def read_cbc_csv(text, design=None):
    """One choice per row: ``winner_levels;loser_levels`` with comma-separated 1-based levels."""
    choices = []
    for lineno, body in _data_lines(text):
        parts = body.split(";")
        if len(parts) != 2:
            raise ParseError("expected 'winner_levels;loser_levels'", lineno)
        try:
            winner, loser = (tuple(int(v) for v in p.split(",")) for p in parts)
        except ValueError:
            raise ParseError(f"malformed level list in {body!r}", lineno) from None
        try:
            choice = ChoiceObservation(winner, loser)
            if design is not None:
                design.characteristic(choice.winner)
                design.characteristic(choice.loser)
        except StructureError as exc:
            raise ParseError(str(exc), lineno) from exc
        choices.append(choice)
    if not choices:
        raise ParseError("no choices")
    return choices
