"""Brute-force coherent-side oracle over truncated character sets.

Everything here recomputes, by finite enumeration, quantities that
thetapos and fm obtain in closed form: hom spaces from actual lattice
point containment, and Euler counts for the contraction-pullback
resolution and its stalk complexes.  The code paths are deliberately
independent of the fast ones so the two sides can be compared in tests.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm

from .errors import BoundaryPointError, InvalidArgument, WindowTooSmall
from .exactlin import (
    RationalVector,
    complete_to_basis,
    matrix_inverse,
    pair,
)
from .fm import _chart, gamma_char
from .stackyfan import ContractionSetup, StackyFan
from .thetapos import HomResult, ThetaIndex

_WINDOW_CAP_VAR = "CCC_MAX_WINDOW"


@dataclass(frozen=True)
class CharBox:
    """Coordinate box plus the ambient sublattice, one denominator per axis."""

    bound: Fraction
    denominators: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bound", Fraction(self.bound))
        object.__setattr__(self, "denominators", tuple(int(d) for d in self.denominators))
        if self.bound <= 0:
            raise InvalidArgument("box bound must be positive")
        if any(d < 1 for d in self.denominators):
            raise InvalidArgument("lattice denominators must be positive")


@dataclass(frozen=True)
class PointSet:
    """A finite set of rational character points."""

    points: frozenset[RationalVector]

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, x) -> bool:
        return tuple(Fraction(c) for c in x) in self.points

    def issubset(self, other: "PointSet") -> bool:
        return self.points <= other.points


def _det(rows) -> int:
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for k in range(n):
        minor = [row[:k] + row[k + 1 :] for row in rows[1:]]
        total += (-1) ** k * rows[0][k] * _det(minor)
    return total


def refined_denominator(fan: StackyFan) -> int:
    """Common denominator D with every chart lattice inside (1/D)Z^n."""
    d = 1
    for cone in fan.all_cones:
        rows = complete_to_basis([fan.b(i) for i in cone.ray_indices], fan.dim)
        d = lcm(d, abs(_det([list(r) for r in rows])))
    return d


def refined_char_box(fan: StackyFan, bound) -> CharBox:
    return CharBox(bound=Fraction(bound), denominators=(refined_denominator(fan),) * fan.dim)


def _scaled_support_rows(theta: ThetaIndex, denoms):
    # <x, v_i> >= t_k/r_i over x = k/denoms becomes <k, w_i>*r_i >= t_k*L
    fan = theta.fan
    scale = lcm(*denoms) if denoms else 1
    rows = []
    for tk, i in zip(theta.t, theta.cone.ray_indices):
        v = fan.v(i)
        w = tuple(c * (scale // d) for c, d in zip(v, denoms))
        rows.append((w, fan.weight(i), tk * scale))
    return rows


@lru_cache(maxsize=None)
def _refined_scaled(theta: ThetaIndex, bound: Fraction, denoms: tuple[int, ...]) -> frozenset:
    rows = _scaled_support_rows(theta, denoms)
    limits = [int(bound * d) for d in denoms]
    points = set()
    for k in itertools.product(*[range(-lim, lim + 1) for lim in limits]):
        if all(r * sum(a * b for a, b in zip(k, w)) >= rhs for w, r, rhs in rows):
            points.add(k)
    return frozenset(points)


def module_points(theta: ThetaIndex, lattice_choice: str, box: CharBox) -> PointSet:
    """All lattice points of the closed support inside the box.

    lattice_choice "natural" enumerates the chart lattice of theta's cone
    (weighted generators completed to full rank, then dualized); "refined"
    enumerates the sublattice declared by the box.
    """
    fan = theta.fan
    if len(box.denominators) != fan.dim:
        raise InvalidArgument("box has the wrong dimension")
    if lattice_choice == "refined":
        scaled = _refined_scaled(theta, box.bound, box.denominators)
        return PointSet(points=frozenset(
            tuple(Fraction(kj, d) for kj, d in zip(k, box.denominators))
            for k in scaled
        ))
    if lattice_choice != "natural":
        raise InvalidArgument(f"unknown lattice choice {lattice_choice!r}")

    rows = complete_to_basis([fan.b(i) for i in theta.cone.ray_indices], fan.dim)
    inverse = matrix_inverse(rows)
    columns = list(zip(*inverse))  # x = sum m_i * column_i
    limits = [int(box.bound * sum(abs(c) for c in row)) for row in rows]
    thresholds = [
        (fan.v(i), Fraction(tk, fan.weight(i)))
        for tk, i in zip(theta.t, theta.cone.ray_indices)
    ]
    points = set()
    for m in itertools.product(*[range(-lim, lim + 1) for lim in limits]):
        x = tuple(sum(mi * col[j] for mi, col in zip(m, columns)) for j in range(fan.dim))
        if any(abs(c) > box.bound for c in x):
            continue
        if all(pair(x, v) >= rhs for v, rhs in thresholds):
            points.add(x)
    return PointSet(points=frozenset(points))


def hom_module_oracle(theta1: ThetaIndex, theta2: ThetaIndex, box: CharBox) -> HomResult:
    """Hom by comparing truncated character modules in a common lattice.

    C[0] exactly when the cone of the second is a face of the first and
    every refined lattice point of the first support lies in the second.
    The box must strictly dominate every threshold by more than one unit.
    """
    if theta1.fan != theta2.fan:
        raise InvalidArgument("theta indices live in different fans")
    fan = theta1.fan
    if len(box.denominators) != fan.dim:
        raise InvalidArgument("box has the wrong dimension")
    for th in (theta1, theta2):
        for tk, i in zip(th.t, th.cone.ray_indices):
            if box.bound <= abs(Fraction(tk, fan.weight(i))) + 1:
                raise InvalidArgument("box too small for these thresholds")
    if not set(theta2.cone.ray_indices) <= set(theta1.cone.ray_indices):
        return HomResult(value="Zero", reason="non-inclusion")
    pts1 = _refined_scaled(theta1, box.bound, box.denominators)
    pts2 = _refined_scaled(theta2, box.bound, box.denominators)
    if pts1 <= pts2:
        return HomResult(value="C0", reason="inclusion")
    return HomResult(value="Zero", reason="non-inclusion")


# ---------------------------------------------------------------------------
# Koszul resolution and stalk Euler counts for the contraction pullback


def _window_cap() -> int:
    return int(os.environ.get(_WINDOW_CAP_VAR, "16"))


def _stabilized_sum(chart, contribution, clipped, m_window: int) -> int:
    """Sum signed contributions over a growing m window until stable.

    Any term surviving the alternating sum pins every m coordinate to one
    rung determined by the probe; clipped(w) reports whether the probe
    still clears the last rung on some axis of the current window, which
    is exactly when a contribution sits beyond the boundary.  The window
    doubles up to the cap from CCC_MAX_WINDOW.
    """
    if m_window < 1:
        raise InvalidArgument("m_window must be >= 1")
    in_j = set(chart.J)
    cap = _window_cap()
    w = min(m_window, cap)
    while True:
        if clipped(w):
            if w >= cap:
                raise WindowTooSmall(f"m window hit the cap {cap} before stabilizing")
            w = min(2 * w, cap)
            continue
        ranges = [
            range(0, w + 1) if i in in_j else range(-w, w + 1)
            for i in chart.m_index
        ]
        return sum(contribution(m) for m in itertools.product(*ranges))


def koszul_euler(setup: ContractionSetup, J, phi, probe, m_window: int = 4) -> int:
    """Alternating character count of the pullback resolution at one probe.

    Terms are the shifted modules f_{gamma(m) + sum_S b*} B2 over subsets
    S of I' - {i0}; the probe is an integer character of the contracted
    chart.  The sum telescopes to the Q2-membership indicator, so the
    return value is always 0 or 1.
    """
    chart = _chart(setup, J, phi)
    if setup.extra_index not in chart.J:
        raise InvalidArgument("the resolution needs the extra ray in J")
    probe = tuple(int(x) for x in probe)
    if len(probe) != setup.n:
        raise InvalidArgument("probe must be a character of the contracted chart")
    jp = chart.j_prime
    shifts = chart.m_index

    def contribution(m):
        g = gamma_char(setup, chart.J, chart.c, m)
        total = 0
        for size in range(len(shifts) + 1):
            for s_set in itertools.combinations(shifts, size):
                ok = all(
                    probe[j] >= tk + (1 if j in s_set else 0)
                    for j, tk in zip(jp, g.t)
                )
                total += (-1) ** size * int(ok)
        return total

    def clipped(w):
        for i in shifts:
            ci = chart.c_of(i)
            if ci is not None:
                if probe[i] > ci + w:
                    return True
            elif probe[i] > w or probe[i] < -w:
                return True
        return False

    return _stabilized_sum(chart, contribution, clipped, m_window)


def stalk_euler(setup: ContractionSetup, J, phi, p, m_window: int = 4) -> int:
    """Euler count of the stalk complex at a generic rational point.

    Same alternating sum as koszul_euler but with open support membership
    of the point p in place of character dominance; equals the staircase
    region indicator at p.
    """
    chart = _chart(setup, J, phi)
    if setup.extra_index not in chart.J:
        raise InvalidArgument("stalk complexes need the extra ray in J")
    p = tuple(Fraction(c) for c in p)
    if len(p) != setup.sigma2.dim:
        raise InvalidArgument("point has the wrong dimension")
    pairings = {j: pair(p, setup.sigma2.b(j)) for j in chart.j_prime}
    if any(v.denominator == 1 for v in pairings.values()):
        raise BoundaryPointError("point pairs integrally with a chart ray")
    jp = chart.j_prime
    shifts = chart.m_index

    def contribution(m):
        g = gamma_char(setup, chart.J, chart.c, m)
        total = 0
        for size in range(len(shifts) + 1):
            for s_set in itertools.combinations(shifts, size):
                ok = all(
                    pairings[j] > tk + (1 if j in s_set else 0)
                    for j, tk in zip(jp, g.t)
                )
                total += (-1) ** size * int(ok)
        return total

    def clipped(w):
        for i in shifts:
            ci = chart.c_of(i)
            if ci is not None:
                if pairings[i] > ci + w + 1:
                    return True
            elif pairings[i] > w + 1 or pairings[i] < -w:
                return True
        return False

    return _stabilized_sum(chart, contribution, clipped, m_window)


def q2_member(setup: ContractionSetup, J, phi, probe) -> bool:
    """Exact Q2 membership of an integer character, via the pinned gamma.

    The resolution pins the only gamma(m) that can contain the probe: its
    coordinates on I' - {i0} must match the probe exactly.
    """
    chart = _chart(setup, J, phi)
    if setup.extra_index not in chart.J:
        raise InvalidArgument("Q2 membership needs the extra ray in J")
    probe = tuple(int(x) for x in probe)
    if len(probe) != setup.n:
        raise InvalidArgument("probe must be a character of the contracted chart")
    m = []
    for i in chart.m_index:
        ci = chart.c_of(i)
        if ci is not None:
            if probe[i] < ci:
                return False
            m.append(probe[i] - ci)
        else:
            m.append(probe[i])
    g = gamma_char(setup, chart.J, chart.c, tuple(m))
    return all(probe[j] >= tk for j, tk in zip(chart.j_prime, g.t))


def q2_member_enum(setup: ContractionSetup, J, phi, probe, m_window: int = 4) -> bool:
    """Q2 membership by unioning over an m window wide enough for the probe.

    Independent of q2_member: enumerates characters gamma(m) and asks for
    coordinatewise dominance with equality off i0, growing the window from
    the probe size so the search is provably exhaustive.
    """
    chart = _chart(setup, J, phi)
    if setup.extra_index not in chart.J:
        raise InvalidArgument("Q2 membership needs the extra ray in J")
    probe = tuple(int(x) for x in probe)
    span = m_window
    for i in chart.m_index:
        ci = chart.c_of(i) or 0
        span = max(span, abs(probe[i]) + abs(ci) + 1)
    in_j = set(chart.J)
    ranges = [
        range(0, span + 1) if i in in_j else range(-span, span + 1)
        for i in chart.m_index
    ]
    pinned = set(chart.m_index)
    for m in itertools.product(*ranges):
        g = gamma_char(setup, chart.J, chart.c, m)
        ok = True
        for j, tk in zip(chart.j_prime, g.t):
            if j in pinned:
                if probe[j] != tk:
                    ok = False
                    break
            elif probe[j] < tk:
                ok = False
                break
        if ok:
            return True
    return False
