"""Exact q-expansion of the Klein j-invariant and its evaluation.

j = E4^3 / Delta with E4 = 1 + 240 sum sigma_3(n) q^n and
Delta = q prod (1 - q^n)^24 (pentagonal-number expansion of the Euler
product).  Coefficients are exact integers; evaluation is restricted to
Im z >= sqrt(3)/2 where the series converges extremely fast
(|q| <= e^(-pi sqrt 3) ~ 0.0043).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "JSeries",
    "j_coefficients",
    "j_eval",
    "truncation_error_bound",
    "save_series",
    "load_series",
    "DEFAULT_ORDER",
    "ARC_MIN_IM",
]

DEFAULT_ORDER = 40

#: Lowest admissible imaginary part (the arc, with a small guard band).
ARC_MIN_IM = math.sqrt(3.0) / 2.0 - 1e-9


@dataclass(frozen=True)
class JSeries:
    """Truncated Fourier expansion: integer coefficients c_{-1}..c_M."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        c = self.coefficients
        if len(c) < 2 or c[0] != 1 or c[1] != 744:
            raise ValueError("series must start 1, 744, ...")
        if any(x <= 0 for x in c[2:]):
            raise ValueError("coefficients c_m (m >= 1) must be positive")

    @property
    def order(self) -> int:
        return len(self.coefficients) - 2

    def as_floats(self) -> np.ndarray:
        return np.array([float(c) for c in self.coefficients])


def _series_mul(a: list[int], b: list[int], order: int) -> list[int]:
    out = [0] * (order + 1)
    for i, ai in enumerate(a):
        if ai:
            top = order - i
            for j, bj in enumerate(b[: top + 1]):
                out[i + j] += ai * bj
    return out


def _sigma3(n: int) -> int:
    s = 0
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            s += d**3
            e = n // d
            if e != d:
                s += e**3
    return s


def j_coefficients(order: int = DEFAULT_ORDER, cache_path: str | os.PathLike | None = None) -> JSeries:
    """Exact coefficients c_{-1}, c_0, ..., c_order of the j-function.

    With ``cache_path`` the result is read from / written to disk
    (newline-delimited decimal integers, first line the order).
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if cache_path is not None:
        path = Path(cache_path)
        if path.exists():
            cached = load_series(path)
            if cached.order >= order:
                return JSeries(cached.coefficients[: order + 2])
    n = order + 1
    e4 = [1] + [240 * _sigma3(m) for m in range(1, n + 1)]
    e4_cubed = _series_mul(_series_mul(e4, e4, n), e4, n)
    # Euler product prod(1 - q^m) via the pentagonal number theorem,
    # then the 24th power.
    euler = [0] * (n + 1)
    euler[0] = 1
    k = 1
    while k * (3 * k - 1) // 2 <= n:
        sign = -1 if k % 2 else 1
        for g in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if g <= n:
                euler[g] += sign
        k += 1
    eta24 = [1]
    for _ in range(24):
        eta24 = _series_mul(eta24, euler, n)
    # Long division E4^3 / eta24 (Delta = q * eta24 shifts by one).
    quot = [0] * (n + 1)
    for m in range(n + 1):
        quot[m] = e4_cubed[m] - sum(eta24[m - i] * quot[i] for i in range(m))
    series = JSeries(tuple(quot[: order + 2]))
    if cache_path is not None:
        save_series(series, cache_path)
    return series


def save_series(series: JSeries, path: str | os.PathLike) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [str(series.order)] + [str(c) for c in series.coefficients]
    path.write_text("\n".join(lines) + "\n")


def load_series(path: str | os.PathLike) -> JSeries:
    lines = Path(path).read_text().split()
    order = int(lines[0])
    coeffs = tuple(int(x) for x in lines[1:])
    if len(coeffs) != order + 2:
        raise ValueError(f"corrupt series cache {path}")
    return JSeries(coeffs)


def j_eval(z, series: JSeries):
    """Evaluate j at z (scalar or array) with Im z >= sqrt(3)/2.

    Truncation tail on the admissible strip is below
    ``truncation_error_bound(series.order, min Im z)``.
    """
    arr = np.asarray(z, dtype=complex)
    if np.any(arr.imag < ARC_MIN_IM):
        raise ValueError(f"Im z must be >= {ARC_MIN_IM}")
    q = np.exp(2j * math.pi * arr)
    acc = np.zeros_like(q)
    for c in series.as_floats()[::-1]:
        acc = acc * q + c
    out = acc / q
    return out if arr.shape else complex(out)


def truncation_error_bound(order: int, y: float) -> float:
    """Upper bound on |sum_{m > order} c_m e^(-2 pi m y)|.

    Uses the growth envelope c_m <= e^(4 pi sqrt m), summing terms
    until a geometric tail bound takes over.
    """
    if y < ARC_MIN_IM:
        raise ValueError("y below the admissible strip")
    total = 0.0
    m = order + 1
    while True:
        term = math.exp(4.0 * math.pi * math.sqrt(m) - 2.0 * math.pi * m * y)
        total += term
        # Ratio of consecutive terms is below exp(2 pi / sqrt(m) - 2 pi y).
        ratio = math.exp(2.0 * math.pi / math.sqrt(m) - 2.0 * math.pi * y)
        if ratio < 1.0 and term * ratio / (1.0 - ratio) < 1e-3 * max(total, 1e-300):
            total += term * ratio / (1.0 - ratio)
            return total
        m += 1
        if m > order + 10_000:
            return math.inf
