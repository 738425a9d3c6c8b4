"""Theta indices, shifted dual cones, their partial order, and skeleton data.

A theta index (sigma, t) names a cone of a stacky fan together with integer
thresholds t_k, one per ray.  Its support is the translated dual cone
{x : <x, v_k> >= t_k / r_k}; inclusion of supports is the partial order that
drives every hom computation downstream.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import InvalidArgument
from .exactlin import (
    Rational,
    RationalVector,
    linear_feasible,
    pair,
    solve_apex,
    solve_square,
    vec_sub,
)
from .stackyfan import Cone, StackyFan


@dataclass(frozen=True)
class ThetaIndex:
    """A cone of a fan plus one integer threshold per ray of the cone."""

    fan: StackyFan
    cone: Cone
    t: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(int(x) for x in self.t))
        if not self.fan.has_cone(self.cone):
            raise InvalidArgument(f"cone {self.cone.ray_indices} is not in the fan")
        if len(self.t) != self.cone.dim:
            raise InvalidArgument(
                f"theta has {len(self.t)} thresholds for a {self.cone.dim}-dimensional cone"
            )


# one linear condition <x, normal> >= threshold, strict when the flag is set
Constraint = tuple[tuple[int, ...], Rational, bool]


@dataclass(frozen=True)
class Polyhedron:
    """Finitely many closed or open half-space constraints in M_R."""

    dim: int
    constraints: tuple[Constraint, ...]

    def contains(self, x: RationalVector) -> bool:
        for normal, threshold, strict in self.constraints:
            value = pair(x, normal)
            if value < threshold or (strict and value == threshold):
                return False
        return True

    def on_boundary(self, x: RationalVector) -> bool:
        """True when some constraint holds with equality at x."""
        return any(pair(x, normal) == threshold for normal, threshold, _ in self.constraints)

    def is_empty(self) -> bool:
        return not linear_feasible(
            [(tuple(Fraction(c) for c in n), Fraction(t), s) for n, t, s in self.constraints],
            self.dim,
        )

    def meets_box(self, bound: Rational) -> bool:
        cons = [
            (tuple(Fraction(c) for c in n), Fraction(t), s) for n, t, s in self.constraints
        ]
        for j in range(self.dim):
            unit = tuple(Fraction(1 if k == j else 0) for k in range(self.dim))
            cons.append((unit, Fraction(-bound), False))
            cons.append((tuple(-c for c in unit), Fraction(-bound), False))
        return linear_feasible(cons, self.dim)

    def canonical(self) -> tuple[Constraint, ...]:
        """Constraints with primitive normals, deduplicated and sorted."""
        out = set()
        for normal, threshold, strict in self.constraints:
            g = gcd(*(abs(c) for c in normal))
            if g == 0:
                raise InvalidArgument("zero normal in constraint")
            out.add((tuple(c // g for c in normal), Fraction(threshold) / g, strict))
        return tuple(sorted(out))


def support(theta: ThetaIndex, open: bool = False) -> Polyhedron:
    """The (open or closed) translated dual cone carrying the theta sheaf."""
    fan = theta.fan
    cons = []
    for k, i in enumerate(theta.cone.ray_indices):
        cons.append((fan.v(i), Fraction(theta.t[k], fan.weight(i)), open))
    return Polyhedron(dim=fan.dim, constraints=tuple(cons))


def apex(theta: ThetaIndex) -> RationalVector:
    """The canonical translation point x0 with <x0, v_k> = t_k / r_k."""
    fan = theta.fan
    rays = [fan.v(i) for i in theta.cone.ray_indices]
    thresholds = [Fraction(theta.t[k], fan.weight(i)) for k, i in enumerate(theta.cone.ray_indices)]
    x0 = solve_apex(rays, thresholds)
    if x0 == ():
        x0 = tuple(Fraction(0) for _ in range(fan.dim))
    return x0


def leq(theta1: ThetaIndex, theta2: ThetaIndex) -> bool:
    """Support inclusion support(theta1) <= support(theta2).

    Decided by the apex criterion: the second cone must be a face of the
    first, and the apex difference must pair nonnegatively with every ray of
    the second cone (membership in its dual cone).
    """
    if theta1.fan != theta2.fan:
        raise InvalidArgument("theta indices live in different fans")
    if not set(theta2.cone.ray_indices) <= set(theta1.cone.ray_indices):
        return False
    diff = vec_sub(apex(theta1), apex(theta2))
    return all(pair(diff, theta1.fan.v(i)) >= 0 for i in theta2.cone.ray_indices)


@dataclass(frozen=True)
class HomResult:
    """Outcome of a hom computation between two theta indices."""

    value: str  # "C0" or "Zero"
    reason: str
    certificate: dict | None = None

    def __post_init__(self):
        if self.value not in ("C0", "Zero"):
            raise InvalidArgument(f"bad hom value {self.value!r}")
        if self.reason not in (
            "inclusion",
            "non-inclusion",
            "contractible-difference",
            "non-contractible-undecided",
        ):
            raise InvalidArgument(f"bad hom reason {self.reason!r}")
        if (self.value == "C0") != (self.reason == "inclusion"):
            raise InvalidArgument("C0 exactly when the reason is inclusion")


def hom_constructible(theta1: ThetaIndex, theta2: ThetaIndex) -> HomResult:
    """Hom between two theta sheaves: C[0] on support inclusion, else zero."""
    if leq(theta1, theta2):
        return HomResult(value="C0", reason="inclusion")
    return HomResult(value="Zero", reason="non-inclusion")


@dataclass(frozen=True)
class LagrangianPiece:
    """One piece base x (-sigma) of the conical Lagrangian skeleton."""

    base: Polyhedron
    fiber_cone: Cone
    fiber_negated: bool
    t: tuple[int, ...]


def perp_slice(theta: ThetaIndex) -> Polyhedron:
    """The affine slice where <x, v_k> = t_k / r_k for every ray of the cone."""
    cons = []
    for k, i in enumerate(theta.cone.ray_indices):
        v = theta.fan.v(i)
        thr = Fraction(theta.t[k], theta.fan.weight(i))
        cons.append((v, thr, False))
        cons.append((tuple(-c for c in v), -thr, False))
    return Polyhedron(dim=theta.fan.dim, constraints=tuple(cons))


def lambda_skeleton(fan: StackyFan, char_window: int, box: Rational) -> list[LagrangianPiece]:
    """All skeleton pieces whose base meets [-box, box]^n.

    Thresholds range over |t_k| <= char_window.  The zero cone contributes
    the zero-section piece with base all of M_R.
    """
    if char_window < 0 or box <= 0:
        raise InvalidArgument("char_window and box must be positive")
    pieces = []
    for sigma in fan.all_cones:
        for t in itertools.product(range(-char_window, char_window + 1), repeat=sigma.dim):
            theta = ThetaIndex(fan=fan, cone=sigma, t=t)
            base = perp_slice(theta)
            if base.meets_box(box):
                pieces.append(
                    LagrangianPiece(base=base, fiber_cone=sigma, fiber_negated=True, t=t)
                )
    pieces.sort(key=lambda p: (p.fiber_cone.ray_indices, p.t))
    return pieces


def ample_polytope(fan: StackyFan, c) -> tuple[Polyhedron, bool]:
    """The polytope {<x, b_i> >= -c_i} and whether c is Q-ample.

    Q-ampleness here is the vertex criterion: the polytope is bounded and
    full-dimensional, and for each maximal cone the vertex cut out by its ray
    equalities satisfies every other constraint strictly.
    """
    c = tuple(int(x) for x in c)
    if len(c) != len(fan.rays):
        raise InvalidArgument(f"expected {len(fan.rays)} coefficients, got {len(c)}")
    cons = tuple((fan.b(i), Fraction(-c[i]), False) for i in range(len(fan.rays)))
    poly = Polyhedron(dim=fan.dim, constraints=cons)
    return poly, _q_ample(fan, c, poly)


def _q_ample(fan: StackyFan, c, poly: Polyhedron) -> bool:
    n = fan.dim
    rational_cons = [(tuple(Fraction(x) for x in nrm), thr, s) for nrm, thr, s in poly.constraints]
    # bounded: the recession cone admits no direction with any nonzero coordinate
    recession = [(nrm, Fraction(0), False) for nrm, _, _ in rational_cons]
    for j in range(n):
        for sign in (1, -1):
            unit = tuple(Fraction(sign if k == j else 0) for k in range(n))
            if linear_feasible(recession + [(unit, Fraction(1), False)], n):
                return False
    # full-dimensional: all constraints simultaneously strict
    if not linear_feasible([(nrm, thr, True) for nrm, thr, _ in rational_cons], n):
        return False
    # strict convexity at each maximal cone's vertex
    for sigma in fan.max_cones:
        if sigma.dim != n:
            return False
        rows = [fan.b(i) for i in sigma.ray_indices]
        rhs = [Fraction(-c[i]) for i in sigma.ray_indices]
        vertex = solve_square([[Fraction(x) for x in row] for row in rows], rhs)
        for j in range(len(fan.rays)):
            if j in sigma.ray_indices:
                continue
            if pair(vertex, fan.b(j)) <= -c[j]:
                return False
    return True


def minkowski_sum(p: Polyhedron, q: Polyhedron) -> Polyhedron:
    """Minkowski sum for operands sharing one constraint per common normal."""
    from .errors import UnsupportedOperation

    if p.dim != q.dim:
        raise UnsupportedOperation("summands live in different dimensions")

    def keyed(poly):
        out = {}
        for normal, threshold, strict in poly.canonical():
            key = (normal, strict)
            if key in out:
                raise UnsupportedOperation(f"repeated normal {normal} in summand")
            out[key] = threshold
        return out

    kp, kq = keyed(p), keyed(q)
    if set(kp) != set(kq):
        raise UnsupportedOperation("summands have different normal sets")
    cons = tuple(
        (normal, kp[(normal, strict)] + kq[(normal, strict)], strict)
        for normal, strict in sorted(kp)
    )
    return Polyhedron(dim=p.dim, constraints=cons)


def parse_theta(fan: StackyFan, text: str) -> ThetaIndex:
    """Parse the CLI form "cone=<indices>;t=<ints>" (zero cone: "cone=;t=")."""
    text = text.strip()
    if not text.startswith("cone=") or ";t=" not in text:
        raise InvalidArgument(f"malformed theta {text!r}, expected 'cone=...;t=...'")
    cone_part, t_part = text[len("cone=") :].split(";t=", 1)
    try:
        indices = tuple(int(x) for x in cone_part.split(",")) if cone_part else ()
        t = tuple(int(x) for x in t_part.split(",")) if t_part else ()
    except ValueError as exc:
        raise InvalidArgument(f"malformed theta {text!r}: {exc}") from None
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise InvalidArgument("theta ray indices must be strictly increasing")
    return ThetaIndex(fan=fan, cone=Cone(indices), t=t)


def format_theta(theta: ThetaIndex) -> str:
    cone_part = ",".join(str(i) for i in theta.cone.ray_indices)
    t_part = ",".join(str(x) for x in theta.t)
    return f"cone={cone_part};t={t_part}"
