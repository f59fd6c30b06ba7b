"""Minus ("-") continued fractions with digits in {2,3,4}.

Periods are cyclic words; a purely periodic expansion
(a1, a2, ...) = a1 - 1/(a2 - 1/...) converges to a real > 1 whenever all
digits are >= 2.  This module holds the combinatorics (conjunction of
periods, the word attached to a tree path) and the numerics (fixed-point
evaluation, cycle-state enumeration).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

__all__ = [
    "Period",
    "CycleState",
    "PeriodError",
    "conjunction",
    "period_of_node",
    "parse_period",
    "format_period",
    "eval_periodic",
    "period_matrix",
    "cycle_states",
]

VALID_DIGITS = (2, 3, 4)

#: Cycle-state value range for Markov periods.
STATE_MIN = 3.0 / 8.0
STATE_MAX = 29.0 / 12.0
CONJ_MIN = -21.0 / 8.0
CONJ_MAX = -2.0 / 5.0

TIP_LEFT_DIGITS = (3,)
TIP_RIGHT_DIGITS = (2, 4)
ROOT_DIGITS = (2, 3, 4)


class PeriodError(ValueError):
    """Raised for malformed periods or paths."""


def _check_digits(digits: Sequence[int]) -> tuple[int, ...]:
    digits = tuple(int(d) for d in digits)
    if not digits:
        raise PeriodError("period must be nonempty")
    bad = [d for d in digits if d not in VALID_DIGITS]
    if bad:
        raise PeriodError(f"digits outside {{2,3,4}}: {bad}")
    return digits


@dataclass(frozen=True)
class Period:
    """A cyclic word of partial quotients.

    ``digits`` keeps the rotation it was constructed with (the one that
    matches the tree pictures); equality and hashing use the
    lexicographically least rotation, so two periods compare equal iff
    one is a rotation of the other.
    """

    digits: tuple[int, ...]
    canonical: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        digits = _check_digits(self.digits)
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "canonical", min(self._rotations_of(digits)))

    @staticmethod
    def _rotations_of(digits: tuple[int, ...]) -> list[tuple[int, ...]]:
        return [digits[i:] + digits[:i] for i in range(len(digits))]

    def rotations(self) -> list[tuple[int, ...]]:
        return self._rotations_of(self.digits)

    def __len__(self) -> int:
        return len(self.digits)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Period):
            return self.canonical == other.canonical
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.canonical)

    @property
    def digit_sum(self) -> int:
        return sum(self.digits)

    @property
    def cycle_length(self) -> int:
        """Length of the simple-form cycle, sum(a_i - 1)."""
        return sum(d - 1 for d in self.digits)

    def reversed(self) -> "Period":
        return Period(self.digits[::-1])

    def __str__(self) -> str:
        return format_period(self)


def conjunction(left: Period, right: Period) -> Period:
    """Concatenate two periods (the child word on the tree)."""
    return Period(left.digits + right.digits)


_RUN_RE = re.compile(r"^(\d+)(?:_(\d+))?$")


def parse_period(text: str) -> Period:
    """Parse ``"2,3_2,4"`` or ``"2,3,3,4"`` (run-length sugar allowed)."""
    digits: list[int] = []
    for chunk in text.replace("(", "").replace(")", "").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        m = _RUN_RE.match(chunk)
        if not m:
            raise PeriodError(f"cannot parse period chunk {chunk!r}")
        digit = int(m.group(1))
        count = int(m.group(2) or 1)
        if count < 1:
            raise PeriodError(f"bad repeat count in {chunk!r}")
        digits.extend([digit] * count)
    return Period(tuple(digits))


def format_period(period: Period, compact: bool = True) -> str:
    """Render a period, run-length compressed by default ("2,3_2,4")."""
    if not compact:
        return ",".join(str(d) for d in period.digits)
    parts: list[str] = []
    i = 0
    digits = period.digits
    while i < len(digits):
        j = i
        while j < len(digits) and digits[j] == digits[i]:
            j += 1
        run = j - i
        parts.append(f"{digits[i]}_{run}" if run > 1 else str(digits[i]))
        i = j
    return ",".join(parts)


def _validate_path(path: str) -> str:
    if any(step not in "LR" for step in path):
        raise PeriodError(f"path must be a word over L/R, got {path!r}")
    return path


def period_walk(path: str) -> Iterator[tuple[Period, Period, Period]]:
    """Walk from the root along ``path``, yielding at every vertex the
    triple (period, left-neighbour period, right-neighbour period).

    The neighbours are the two Farey-interval endpoints of the vertex;
    the word at a left child is parent * left-neighbour, at a right
    child right-neighbour * parent, except along the all-L branch where
    the word at level n is (2, 3_n, 4).
    """
    _validate_path(path)
    period = Period(ROOT_DIGITS)
    left = Period(TIP_LEFT_DIGITS)
    right = Period(TIP_RIGHT_DIGITS)
    yield period, left, right
    leftmost = True
    for depth, step in enumerate(path, start=2):
        if step == "L":
            child = (
                Period((2,) + (3,) * depth + (4,))
                if leftmost
                else conjunction(period, left)
            )
            period, right = child, period
        else:
            leftmost = False
            child = conjunction(right, period)
            period, left = child, period
        yield period, left, right


def period_of_node(path: str) -> Period:
    """The period at tree path ``path`` ("" is the root, word (2,3,4))."""
    for period, _, _ in period_walk(path):
        pass
    return period


def eval_periodic(
    period: Period | Sequence[int],
    tol: float = 1e-14,
    max_iter: int = 10_000,
) -> float:
    """Value of the purely periodic expansion, via fixed-point iteration
    of the period's Mobius map starting at 2.
    """
    digits = period.digits if isinstance(period, Period) else _check_digits(period)
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = 2.0
    for _ in range(max_iter):
        y = x
        for d in reversed(digits):
            y = d - 1.0 / y
        if abs(y - x) < tol:
            return y
        x = y
    raise PeriodError(f"fixed-point iteration did not converge for {digits}")


def period_matrix(period: Period | Sequence[int]) -> tuple[tuple[int, int], tuple[int, int]]:
    """Product of the step matrices [[a,-1],[1,0]], exact integers.

    det = 1 always; trace = 3c for the period of a Markov number c.
    """
    digits = period.digits if isinstance(period, Period) else _check_digits(period)
    a, b, c, d = 1, 0, 0, 1
    for digit in digits:
        a, b, c, d = a * digit + b, -a, c * digit + d, -c
    return ((a, b), (c, d))


@dataclass(frozen=True)
class CycleState:
    """One quadratic w^(i) of the cycle: leading integer a0 over a
    rotation of the period, with its value and Galois conjugate."""

    a0: int
    tail: tuple[int, ...]
    value: float
    conj_value: float


class _Quadratic:
    """Exact element x + y*sqrt(disc) of a real quadratic field,
    with x, y rational.  Only what the cycle walk needs."""

    __slots__ = ("x", "y", "disc")

    def __init__(self, x: Fraction, y: Fraction, disc: int):
        self.x, self.y, self.disc = x, y, disc

    def __float__(self) -> float:
        return float(self.x) + float(self.y) * math.sqrt(self.disc)

    def minus_one(self) -> "_Quadratic":
        return _Quadratic(self.x - 1, self.y, self.disc)

    def over_one_minus(self) -> "_Quadratic":
        # z / (1 - z) for z = x + y*sqrt(d)
        den = (1 - self.x) ** 2 - self.y**2 * self.disc
        nx = (self.x * (1 - self.x) + self.y**2 * self.disc) / den
        ny = self.y / den
        return _Quadratic(nx, ny, self.disc)


def _exact_cycle(digits: tuple[int, ...], length: int) -> list[float]:
    """Run the simple-form cycle walk exactly in Q(sqrt(D)).

    Starts at w - 1 with w the attracting fixed point of the period
    matrix and applies z -> z-1 (z >= 1) or z -> z/(1-z).  Returns the
    float images of the first ``length`` states and checks that the walk
    closes up after exactly ``length`` steps.
    """
    (a, _b), (c, d) = period_matrix(digits)
    disc = (a + d) ** 2 - 4
    w = _Quadratic(Fraction(a - d, 2 * c), Fraction(1, 2 * c), disc)
    z = w.minus_one()
    out = [float(z)]
    first = (z.x, z.y)
    for step in range(length):
        z = z.minus_one() if float(z) >= 1.0 else z.over_one_minus()
        if step < length - 1:
            out.append(float(z))
    if (z.x, z.y) != first:
        raise PeriodError(
            f"cycle of {digits} did not close after {length} steps"
        )
    return out


def cycle_states(
    period: Period | Sequence[int],
    cross_check: bool = True,
    check_tol: float = 1e-9,
) -> list[CycleState]:
    """Enumerate the full cycle w^(1), ..., w^(l), l = sum(a_i - 1).

    States are produced in walk order: for each cyclic position the
    leading integer a0 runs down from a_i - 1 to 1 over the rotation
    that follows digit a_i.  Conjugates come from the reversed-word
    formula.  With ``cross_check`` the enumeration is verified against
    an exact-arithmetic run of the cycle map.
    """
    digits = period.digits if isinstance(period, Period) else _check_digits(period)
    n = len(digits)
    states: list[CycleState] = []
    for i in range(n):
        tail = digits[i + 1 :] + digits[: i + 1]
        last = tail[-1]
        t = eval_periodic(tail)
        rev = tail[-2::-1] + (tail[-1],)
        t_rev = eval_periodic(rev)
        for a0 in range(last - 1, 0, -1):
            value = a0 - 1.0 / t
            conj = -((last - a0) - 1.0 / t_rev)
            states.append(CycleState(a0=a0, tail=tail, value=value, conj_value=conj))
    if cross_check:
        walk = _exact_cycle(digits, len(states))
        for state, exact in zip(states, walk):
            if abs(state.value - exact) > check_tol:
                raise PeriodError(
                    f"cycle state mismatch for {digits}: "
                    f"{state.value} vs exact {exact}"
                )
    return states
