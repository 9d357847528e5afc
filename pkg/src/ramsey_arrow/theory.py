"""Closed-form quantities: Ramsey numbers, expectations, thresholds.

Binomials are exact integers; logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class RegimeParams:
    r: int
    n: int
    p: float
    t: int = 0

    def __post_init__(self):
        if self.r < 2:
            raise ValueError("r must be at least 2")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")

    @property
    def x(self) -> float:
        """Scaled density ``p * n^(2/(r+1))``."""
        return scaled_density(self.r, self.n, self.p)

    @property
    def N(self) -> int:
        return self.r * self.n + self.t


def scaled_density(r: int, n: int, p: float) -> float:
    return p * n ** (2 / (r + 1))


def p_from_scaled(r: int, n: int, x: float) -> float:
    return x * n ** (-2 / (r + 1))


def chvatal_ramsey(r: int, n: int) -> int:
    """R(K_{r+1}, P_n) = r*n + 1, the tree being the path with n edges."""
    if r < 1 or n < 1:
        raise ValueError("need r >= 1 and n >= 1")
    return r * n + 1


def goodness_lower_bound(chi: int, g_order: int, sigma: int) -> int:
    if chi < 2 or sigma < 1 or g_order < sigma:
        raise ValueError("need chi >= 2, sigma >= 1, g_order >= sigma")
    return (chi - 1) * (g_order - 1) + sigma


def expected_clique_count(N: int, p: float, r: int) -> float:
    """Expected number of copies of K_{r+1} in G(N, p)."""
    return math.comb(N, r + 1) * p ** math.comb(r + 1, 2)


def expected_boundary(r: int, n: int, t: int, p: float) -> float:
    """Union bound ``r n t p`` on the expected outside-neighbourhood of t vertices."""
    return r * n * t * p


def expected_pinned_cliques(r: int, n: int, t: int, p: float) -> float:
    """Expected K_{r+1} copies with exactly one vertex among t fixed ones, in G(rn + t, p)."""
    return t * math.comb(r * n, r) * p ** math.comb(r + 1, 2)


@dataclass(frozen=True)
class RegimeThresholds:
    p_general: float
    p_klr: float


def regime_thresholds(r: int, n: int) -> RegimeThresholds:
    return RegimeThresholds(n ** (-2 / (r + 1)), n ** (-2 / (r + 2)))


@dataclass(frozen=True)
class TThresholds:
    x: float
    t_general: float | None
    t_klr_scale: float
    t_zero_specific: float


def t_thresholds(r: int, n: int, p: float, multiplier: float = 1.0) -> TThresholds:
    """Excess-vertex scales at density ``p``.

    ``t_general`` is ``multiplier * p^(-(r+1)/2) * log x`` and is ``None`` when
    ``x <= 1``. ``t_zero_specific`` is the scale below which the pinned-clique
    construction works.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    x = scaled_density(r, n, p)
    t_general = multiplier * p ** (-(r + 1) / 2) * math.log(x) if x > 1 else None
    return TThresholds(
        x=x,
        t_general=t_general,
        t_klr_scale=1.0 / p,
        t_zero_specific=p ** (-math.comb(r + 1, 2)) * n ** (-(r - 1)),
    )


def theory_table(r: int, n: int, p: float, t: int | None = None) -> list[tuple[str, str]]:
    """Labelled rows for the ``theory`` command."""
    rows: list[tuple[str, str]] = [("r", str(r)), ("n", str(n)), ("p", f"{p:g}")]
    rows.append(("R(K_{r+1}, P_n)", str(chvatal_ramsey(r, n))))
    thr = regime_thresholds(r, n)
    rows.append(("p_general = n^(-2/(r+1))", f"{thr.p_general:.6g}"))
    rows.append(("p_klr = n^(-2/(r+2))", f"{thr.p_klr:.6g}"))
    N = r * n + (t or 0)
    rows.append(("N", str(N)))
    rows.append(("E[#K_{r+1}] in G(N,p)", f"{expected_clique_count(N, p, r):.6g}"))
    if p > 0:
        tt = t_thresholds(r, n, p)
        rows.append(("x = p n^(2/(r+1))", f"{tt.x:.6g}"))
        rows.append(("t_general", "n/a (x <= 1)" if tt.t_general is None else f"{tt.t_general:.6g}"))
        rows.append(("t_klr_scale = 1/p", f"{tt.t_klr_scale:.6g}"))
        rows.append(("t_zero_specific", f"{tt.t_zero_specific:.6g}"))
    if t is not None:
        rows.append(("t", str(t)))
        rows.append(("E|X| bound = r n t p", f"{expected_boundary(r, n, t, p):.6g}"))
        rows.append(("E[pinned K_{r+1}]", f"{expected_pinned_cliques(r, n, t, p):.6g}"))
    return rows
