"""The three transforms on theta indices, at the poset and support level.

Case 1 pushes thresholds along a change of ray weights over a fixed base
fan.  Cases 2 and 3 push and pull along a weighted-blowup contraction,
where the image of a single theta sheaf is a staircase glued from
infinitely many translated dual cones; the staircase is carried as an
exact membership predicate sandwiched between polyhedral bounds.
Discrepancy comparisons gate the hom-level checks, and a pixel raster
decides contractibility of planar region differences.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from .errors import (
    GridAlignmentError,
    InvalidArgument,
    PreconditionError,
    ValidationError,
)
from .exactlin import (
    ceil_div,
    ceil_frac,
    complete_to_basis,
    floor_frac,
    pair,
    solve_square,
)
from .stackyfan import (
    Cone,
    ContractionSetup,
    SameBaseSetup,
    StackyFan,
    discrepancy_compare,
    is_complete,
    j_image,
)
from .thetapos import HomResult, Polyhedron, ThetaIndex, leq, support


# ---------------------------------------------------------------------------
# Case 1: one base fan, two weightings


def fm_case1(setup: SameBaseSetup, theta: ThetaIndex, direction: str = "push12") -> ThetaIndex:
    """Push a theta index from the s-weighted fan to the r-weighted fan.

    The cone is unchanged; the threshold over ray i becomes
    ceil(r_i * t_i / s_i).  Equals pullback to the lcm weighting followed
    by pushforward (see case1_pullback / case1_pushforward).
    """
    if direction != "push12":
        raise InvalidArgument(f"unknown direction {direction!r}")
    if theta.fan != setup.fan_s:
        raise InvalidArgument("theta does not live over the s-weighted fan")
    t = tuple(
        ceil_div(setup.r[i] * tk, setup.s[i])
        for tk, i in zip(theta.t, theta.cone.ray_indices)
    )
    return ThetaIndex(fan=setup.fan_r, cone=theta.cone, t=t)


def case1_pullback(setup: SameBaseSetup, theta: ThetaIndex) -> ThetaIndex:
    """Pull back from the s-weighted fan to the common refinement (weights t)."""
    if theta.fan != setup.fan_s:
        raise InvalidArgument("theta does not live over the s-weighted fan")
    t = tuple(setup.n[i] * tk for tk, i in zip(theta.t, theta.cone.ray_indices))
    return ThetaIndex(fan=setup.fan_t, cone=theta.cone, t=t)


def case1_pushforward(setup: SameBaseSetup, theta: ThetaIndex) -> ThetaIndex:
    """Push forward from the common refinement down to the r-weighted fan."""
    if theta.fan != setup.fan_t:
        raise InvalidArgument("theta does not live over the lcm-weighted fan")
    t = tuple(ceil_div(tk, setup.m[i]) for tk, i in zip(theta.t, theta.cone.ray_indices))
    return ThetaIndex(fan=setup.fan_r, cone=theta.cone, t=t)


def fm_line_bundle_case1(setup: SameBaseSetup, c) -> tuple[int, ...] | None:
    """Image of the line bundle with coefficients c, if it is again a bundle.

    Per max cone the character thresholds are t_i = -c_i; the pushed
    thresholds must agree ray by ray across cones to reassemble into one
    bundle (they always do here, since the rule is per-ray, but the glue
    check is kept as written).
    """
    c = tuple(int(x) for x in c)
    if len(c) != len(setup.base.rays):
        raise InvalidArgument("one coefficient per ray required")
    if not is_complete(setup.base):
        raise InvalidArgument("bundle pushforward needs a complete fan")
    glued: dict[int, int] = {}
    for cone in setup.fan_s.max_cones:
        theta = ThetaIndex(fan=setup.fan_s, cone=cone, t=tuple(-c[i] for i in cone.ray_indices))
        image = fm_case1(setup, theta)
        for tk, i in zip(image.t, cone.ray_indices):
            if glued.setdefault(i, -tk) != -tk:
                return None
    return tuple(glued[i] for i in range(len(c)))


@dataclass(frozen=True)
class FFReport:
    """Outcome of an exhaustive order-embedding sweep on a threshold window."""

    window: int
    pairs_checked: int
    violations: tuple[tuple[ThetaIndex, ThetaIndex, str], ...]
    verdict: str

    def __post_init__(self):
        if self.verdict not in ("embedding", "violated"):
            raise InvalidArgument(f"bad verdict {self.verdict!r}")
        if (self.verdict == "embedding") != (len(self.violations) == 0):
            raise InvalidArgument("verdict must be embedding exactly when no violations")


def _window_thetas(fan: StackyFan, window: int) -> list[ThetaIndex]:
    out = []
    for cone in fan.all_cones:
        for t in itertools.product(range(-window, window + 1), repeat=cone.dim):
            out.append(ThetaIndex(fan=fan, cone=cone, t=t))
    return out


def poset_embedding_report(setup: SameBaseSetup, window: int) -> FFReport:
    """Check both order implications for all theta pairs with |t| <= window.

    forward violation: order held before the transform but not after;
    backward: order appeared only after.  Embedding is expected exactly
    when r >= s componentwise.
    """
    if window < 1:
        raise InvalidArgument("window must be >= 1")
    thetas = _window_thetas(setup.fan_s, window)
    images = [fm_case1(setup, th) for th in thetas]
    violations = []
    pairs = 0
    for a, fa in zip(thetas, images):
        for b, fb in zip(thetas, images):
            pairs += 1
            src = leq(a, b)
            img = leq(fa, fb)
            if src and not img:
                violations.append((a, b, "forward"))
            elif img and not src:
                violations.append((a, b, "backward"))
    return FFReport(
        window=window,
        pairs_checked=pairs,
        violations=tuple(violations),
        verdict="embedding" if not violations else "violated",
    )


# ---------------------------------------------------------------------------
# Case 2: pushing along a divisorial contraction


def fm_case2(setup: ContractionSetup, theta: ThetaIndex) -> tuple[Polyhedron, list[ThetaIndex]]:
    """Image support and resolving terms for a theta pushed to the blowup.

    When the cone misses part of the subdivided block the sheaf is just
    reinterpreted.  Otherwise the image support picks up one extra strict
    constraint with threshold t_{n+1} = ceil(sum alpha_k t_k), and the
    image is resolved by the terms on the cones (sigma - S) + extra ray,
    one per nonempty S inside the subdivided block.
    """
    if theta.fan != setup.sigma2:
        raise InvalidArgument("theta does not live in the contracted fan")
    sigma = theta.cone
    image = support(theta, open=True)
    iset = set(setup.i_prime)
    if not iset <= set(sigma.ray_indices):
        return image, [ThetaIndex(fan=setup.sigma1, cone=sigma, t=theta.t)]

    position = {i: k for k, i in enumerate(sigma.ray_indices)}
    t_extra = ceil_frac(sum(setup.alpha[i] * theta.t[position[i]] for i in setup.i_prime))
    extra_con = (setup.extra.v, Fraction(t_extra, setup.extra.weight), True)
    image = Polyhedron(dim=image.dim, constraints=image.constraints + (extra_con,))

    terms = []
    for size in range(1, setup.n_prime + 1):
        for removed in itertools.combinations(setup.i_prime, size):
            cone = Cone(tuple(
                i for i in sigma.ray_indices + (setup.extra_index,) if i not in removed
            ))
            t = tuple(
                t_extra if i == setup.extra_index else theta.t[position[i]]
                for i in cone.ray_indices
            )
            terms.append(ThetaIndex(fan=setup.sigma1, cone=cone, t=t))
    return image, terms


def fm_line_bundle_case2(setup: ContractionSetup, c) -> tuple[int, ...] | None:
    """Bundle coefficients after the push: c gains floor(sum alpha_i c_i)."""
    c = tuple(int(x) for x in c)
    if len(c) != setup.n:
        raise InvalidArgument("one coefficient per contracted ray required")
    glued: dict[int, int] = {}
    for cone in setup.sigma2.max_cones:
        # bundle character on this cone has thresholds t_i = -c_i
        t_extra = ceil_frac(sum(setup.alpha[i] * -c[i] for i in setup.i_prime))
        for i in cone.ray_indices:
            if glued.setdefault(i, c[i]) != c[i]:
                return None
        if glued.setdefault(setup.extra_index, -t_extra) != -t_extra:
            return None
    return tuple(glued[i] for i in range(setup.n + 1))


def ext_case2(setup: ContractionSetup, theta1: ThetaIndex, theta2: ThetaIndex) -> HomResult:
    """Hom after pushing both thetas to the blowup.

    Valid under the discrepancy hypothesis sum(alpha) >= 1, where the push
    is fully faithful: C[0] exactly on support inclusion upstairs, and any
    failed inclusion leaves a contractible difference of image regions.
    """
    if discrepancy_compare(setup) not in (">=", "="):
        raise PreconditionError("push direction needs discrepancy sum(alpha) >= 1")
    for th in (theta1, theta2):
        if th.fan != setup.sigma2:
            raise InvalidArgument("theta does not live in the contracted fan")
    if leq(theta1, theta2):
        return HomResult(value="C0", reason="inclusion")

    cert: dict = {
        "cone1": theta1.cone.ray_indices,
        "cone2": theta2.cone.ray_indices,
        "t1": theta1.t,
        "t2": theta2.t,
    }
    iset = set(setup.i_prime)
    if iset <= set(theta1.cone.ray_indices) and iset <= set(theta2.cone.ray_indices):
        pos1 = {i: k for k, i in enumerate(theta1.cone.ray_indices)}
        pos2 = {i: k for k, i in enumerate(theta2.cone.ray_indices)}
        te1 = ceil_frac(sum(setup.alpha[i] * theta1.t[pos1[i]] for i in setup.i_prime))
        te2 = ceil_frac(sum(setup.alpha[i] * theta2.t[pos2[i]] for i in setup.i_prime))
        cert["t_extra"] = (te1, te2)
        diffs = {i: theta2.t[pos2[i]] - theta1.t[pos1[i]] for i in setup.i_prime}
        if all(d >= 1 for d in diffs.values()):
            # the extra threshold must move along: ceil of a sum >= 1
            cert["gap_ceiling"] = ceil_frac(
                sum(setup.alpha[i] * d for i, d in diffs.items())
            )
    return HomResult(value="Zero", reason="contractible-difference", certificate=cert)


# ---------------------------------------------------------------------------
# Case 3: pulling back along the contraction


@dataclass(frozen=True)
class _Chart:
    # shared index bookkeeping for one (J, phi) over sigma1
    J: tuple[int, ...]
    c: tuple[int, ...]
    i0: int
    j_prime: tuple[int, ...]
    m_index: tuple[int, ...]

    def c_of(self, j: int) -> int | None:
        try:
            return self.c[self.J.index(j)]
        except ValueError:
            return None


def _chart(setup: ContractionSetup, J, phi) -> _Chart:
    J = tuple(int(j) for j in J)
    if len(set(J)) != len(J):
        raise InvalidArgument("repeated index in J")
    J = tuple(sorted(J))
    if any(j < 0 or j > setup.extra_index for j in J):
        raise InvalidArgument("J indices out of range")
    iset = set(setup.i_prime)
    if iset <= set(J):
        raise InvalidArgument("J contains the whole subdivided block: not a cone upstairs")
    phi = tuple(int(x) for x in phi)
    if len(phi) != len(J):
        raise InvalidArgument("phi must have one threshold per index of J")
    i0 = min(iset - set(J))
    return _Chart(
        J=J,
        c=phi,
        i0=i0,
        j_prime=j_image(setup, J),
        m_index=tuple(i for i in setup.i_prime if i != i0),
    )


def gamma_char(setup: ContractionSetup, J, phi, m) -> ThetaIndex:
    """The staircase character gamma(m) on the contracted cone sigma_{J'}.

    m is indexed by I' - {i0} in increasing order, nonnegative on indices
    inside J and unrestricted on the rest.
    """
    return _gamma_char_cached(setup, tuple(J), tuple(phi), tuple(int(x) for x in m))


@lru_cache(maxsize=1 << 16)
def _gamma_char_cached(setup: ContractionSetup, J, phi, m) -> ThetaIndex:
    chart = _chart(setup, J, phi)
    if setup.extra_index not in chart.J:
        raise InvalidArgument("gamma characters need the extra ray in J")
    m = tuple(int(x) for x in m)
    if len(m) != len(chart.m_index):
        raise InvalidArgument("m must be indexed by I' minus the chosen i0")
    coords: dict[int, int] = {}
    num = Fraction(chart.c_of(setup.extra_index))
    for mk, i in zip(m, chart.m_index):
        ci = chart.c_of(i)
        if ci is not None:
            if mk < 0:
                raise InvalidArgument(f"m_{i} must be nonnegative inside J")
            coords[i] = ci + mk
            num -= setup.alpha[i] * (ci + mk)
        else:
            coords[i] = mk
            num -= setup.alpha[i] * mk
    coords[chart.i0] = ceil_frac(num / setup.alpha[chart.i0])
    for j in chart.j_prime:
        if j not in coords:
            coords[j] = chart.c_of(j)
    return ThetaIndex(
        fan=setup.sigma2,
        cone=Cone(chart.j_prime),
        t=tuple(coords[j] for j in chart.j_prime),
    )


def s1_threshold(setup: ContractionSetup, J, phi) -> Fraction:
    """Inner hyperplane height s1 = c_{n+1} + eps for the sandwich bound.

    eps = 1 - (alpha_{i0}/2) * min A where A collects the fractional
    defects u + 1 - ceil(u) of the staircase heights.  A is finite: u
    moves in the subgroup generated by the ratios alpha_i / alpha_{i0}
    modulo 1, so the minimum comes from one residue computation.
    """
    chart = _chart(setup, J, phi)
    if setup.extra_index not in chart.J:
        raise InvalidArgument("s1 needs the extra ray in J")
    a0 = setup.alpha[chart.i0]
    u0 = Fraction(chart.c_of(setup.extra_index))
    for i in chart.m_index:
        ci = chart.c_of(i)
        if ci is not None:
            u0 -= setup.alpha[i] * ci
    u0 /= a0
    ratios = [setup.alpha[i] / a0 for i in chart.m_index]
    q = lcm(*[r.denominator for r in ratios])
    g = gcd(q, *[int(r * q) for r in ratios])
    step = Fraction(g, q)
    r0 = u0 - floor_frac(u0 / step) * step
    if r0 > 0:
        min_a = r0
    elif step == 1:
        min_a = Fraction(1)
    else:
        min_a = step
    eps = 1 - a0 / 2 * min_a
    return chart.c_of(setup.extra_index) + eps


@dataclass
class StaircaseRegion:
    """The pulled-back support: an infinite union of shifted dual cones.

    Membership is exact (one ceiling evaluation via the minimal staircase
    character), and the region is sandwiched between the polyhedra inner
    and outer.  When the extra ray is not involved the region degenerates
    to a plain open support and inner == outer.  inner is left unset when
    the sandwich hypothesis sum(alpha) <= 1 fails.
    """

    setup: ContractionSetup
    J: tuple[int, ...]
    c: dict[int, int]
    i0: int
    s1: Fraction | None
    inner: Polyhedron | None
    outer: Polyhedron
    phi: tuple[int, ...] = field(repr=False, default=())
    j_prime: tuple[int, ...] = field(repr=False, default=())
    m_index: tuple[int, ...] = field(repr=False, default=())

    def _pairings(self, x) -> dict[int, Fraction]:
        return {j: pair(x, self.setup.sigma2.b(j)) for j in self.j_prime}

    def _gamma0(self, p: dict[int, Fraction]) -> int:
        m0 = tuple(ceil_frac(p[i]) - 1 - self.c.get(i, 0) for i in self.m_index)
        return self._gamma0_of(m0)

    def _gamma0_of(self, m0: tuple[int, ...]) -> int:
        g = gamma_char(self.setup, self.J, self.phi, m0)
        return g.t[self.j_prime.index(self.i0)]

    def contains(self, x) -> bool:
        su = self.setup
        if su.extra_index not in self.J:
            return self.outer.contains(x)
        p = self._pairings(x)
        for j in self.j_prime:
            cj = self.c.get(j)
            if cj is not None and not p[j] > cj:
                return False
        return p[self.i0] > self._gamma0(p)

    def boundary_aligned(self, x) -> bool:
        """True when x sits on a face of the staircase or on a step grid line."""
        su = self.setup
        if su.extra_index not in self.J:
            return self.outer.on_boundary(x)
        p = self._pairings(x)
        for j in self.j_prime:
            cj = self.c.get(j)
            if cj is not None and p[j] == cj:
                return True
        if any(p[i].denominator == 1 for i in self.m_index):
            return True
        if all(p[i] > self.c[i] for i in self.m_index if i in self.c):
            return p[self.i0] == self._gamma0(p)
        return False


def fm3_region(setup: ContractionSetup, J, phi) -> StaircaseRegion:
    """Pull a theta on the cone sigma_J upstairs back to the contracted side."""
    chart = _chart(setup, J, phi)
    dim = setup.sigma1.dim
    strict = tuple(
        (setup.sigma1.b(j), Fraction(chart.c_of(j)), True)
        for j in chart.J
        if j != setup.extra_index
    )
    region = StaircaseRegion(
        setup=setup,
        J=chart.J,
        c=dict(zip(chart.J, chart.c)),
        i0=chart.i0,
        s1=None,
        inner=None,
        outer=Polyhedron(dim=dim, constraints=strict),
        phi=chart.c,
        j_prime=chart.j_prime,
        m_index=chart.m_index,
    )
    if setup.extra_index not in chart.J:
        region.inner = region.outer
        return region

    c_extra = chart.c_of(setup.extra_index)
    extra_b = setup.extra.b
    region.outer = Polyhedron(
        dim=dim, constraints=strict + ((extra_b, Fraction(c_extra), True),)
    )
    if discrepancy_compare(setup) in ("<=", "="):
        # inner hyperplane bound only exists under the pull hypothesis
        region.s1 = s1_threshold(setup, J, phi)
        region.inner = Polyhedron(
            dim=dim, constraints=strict + ((extra_b, region.s1, False),)
        )
        _validate_inner(region)
    return region


def _validate_inner(region: StaircaseRegion) -> None:
    # a few exact points of D(c, s1) must land inside the region
    su = region.setup
    dim = su.sigma1.dim
    rows = [su.sigma1.b(j) for j in region.J]
    rhs = [
        region.s1 if j == su.extra_index else Fraction(region.c[j]) + Fraction(1, 2)
        for j in region.J
    ]
    full = complete_to_basis(rows, dim)
    pad = [Fraction(0)] * (len(full) - len(rows))
    corner = tuple(solve_square(full, list(rhs) + pad))
    ray = tuple(solve_square(full, [Fraction(1)] * len(rows) + pad))
    points = [corner]
    for scale in (Fraction(1, 2), Fraction(2)):
        points.append(tuple(a + scale * b for a, b in zip(corner, ray)))
    for k in range(len(rows)):
        bump = tuple(solve_square(full, [Fraction(int(i == k)) for i in range(len(full))]))
        points.append(tuple(a + b for a, b in zip(corner, bump)))
    for pt in points:
        if not region.contains(pt):
            raise ValidationError("internal: inner bound escapes the staircase region")


def ext_case3(setup: ContractionSetup, pair1, pair2) -> HomResult:
    """Hom after pulling two (J, phi) supports back to the contracted side.

    Valid under the discrepancy hypothesis sum(alpha) <= 1, where the pull
    is fully faithful: C[0] exactly on support inclusion upstairs, else a
    contractible region difference.  The certificate records which ray or
    threshold breaks the inclusion and, when the inner sandwich bound is
    available, an exact nonemptiness witness for the difference.
    """
    if discrepancy_compare(setup) not in ("<=", "="):
        raise PreconditionError("pull direction needs discrepancy sum(alpha) <= 1")
    chart1 = _chart(setup, *pair1)
    chart2 = _chart(setup, *pair2)
    theta1 = ThetaIndex(fan=setup.sigma1, cone=Cone(chart1.J), t=chart1.c)
    theta2 = ThetaIndex(fan=setup.sigma1, cone=Cone(chart2.J), t=chart2.c)
    if leq(theta1, theta2):
        return HomResult(value="C0", reason="inclusion")

    missing = tuple(sorted(set(chart2.J) - set(chart1.J)))
    failures = tuple(
        (j, chart1.c_of(j), chart2.c_of(j))
        for j in chart2.J
        if chart1.c_of(j) is not None and chart1.c_of(j) < chart2.c_of(j)
    )
    cert: dict = {
        "j1": chart1.J,
        "j2": chart2.J,
        "extra_in_j1": setup.extra_index in chart1.J,
        "extra_in_j2": setup.extra_index in chart2.J,
        "missing_rays": missing,
        "threshold_failures": failures,
    }
    region1 = fm3_region(setup, *pair1)
    if region1.inner is not None:
        # points of D(c1, s1) violating one outer constraint of the second
        # region lie in the difference; feasibility is checked exactly
        witness = False
        for j in itertools.chain(missing, (f[0] for f in failures)):
            neg = tuple(-cc for cc in setup.sigma1.b(j))
            cut = Polyhedron(
                dim=setup.sigma1.dim,
                constraints=region1.inner.constraints
                + ((neg, Fraction(-chart2.c_of(j)), False),),
            )
            if not cut.is_empty():
                witness = True
                break
        cert["difference_nonempty"] = witness
    return HomResult(value="Zero", reason="contractible-difference", certificate=cert)


def fm_line_bundle_case3(setup: ContractionSetup, c) -> tuple[int, ...] | None:
    """Pull a bundle on the blowup back to the contraction, when possible.

    The image is the bundle dropping the extra coefficient, provided the
    extra coefficient dominates the weighted sum of the block coefficients;
    otherwise the image is not a single bundle and None is returned.
    """
    c = tuple(int(x) for x in c)
    if len(c) != setup.n + 1:
        raise InvalidArgument("one coefficient per ray of the blowup required")
    total = sum(setup.alpha[i] * c[i] for i in setup.i_prime)
    if total <= c[setup.extra_index]:
        return c[: setup.n]
    return None


# ---------------------------------------------------------------------------
# planar contractibility raster


def as_pixel_predicate(obj):
    """Membership closure for the raster that refuses boundary-aligned pixels."""
    if isinstance(obj, StaircaseRegion):
        def pred(x):
            if obj.boundary_aligned(x):
                raise GridAlignmentError(f"pixel center {x} aligned with a region face")
            return obj.contains(x)

        return pred
    if isinstance(obj, Polyhedron):
        def pred(x):
            if obj.on_boundary(x):
                raise GridAlignmentError(f"pixel center {x} aligned with a constraint")
            return obj.contains(x)

        return pred
    raise InvalidArgument(f"no pixel predicate for {type(obj).__name__}")


def raster_grid(bbox, step, origin=(0, 0)):
    """Pixel center coordinates, as one list per axis.

    Centers sit at -bbox + step*(i + 1/2) + origin; the origin shifts the
    grid so centers stay off constraint lines with non-axis normals.
    """
    bbox = Fraction(bbox)
    step = Fraction(step)
    if bbox <= 0 or step <= 0:
        raise InvalidArgument("bbox and step must be positive")
    count = (2 * bbox) / step
    if count.denominator != 1:
        raise InvalidArgument("the box must hold a whole number of pixels")
    side = int(count)
    ox, oy = (Fraction(o) for o in origin)
    xs = [-bbox + step * i + step / 2 + ox for i in range(side)]
    ys = [-bbox + step * j + step / 2 + oy for j in range(side)]
    return xs, ys


def raster_pixels(member, bbox, step, origin=(0, 0)) -> frozenset:
    """Pixel indices whose centers satisfy one membership predicate."""
    xs, ys = raster_grid(bbox, step, origin)
    return frozenset(
        (i, j) for i, x in enumerate(xs) for j, y in enumerate(ys) if member((x, y))
    )


def _scaled_axes(xs, ys):
    scale = lcm(*(v.denominator for v in xs), *(v.denominator for v in ys))
    return scale, [int(v * scale) for v in xs], [int(v * scale) for v in ys]


def _poly_bitmap(poly: Polyhedron, xs, ys):
    scale, sx, sy = _scaled_axes(xs, ys)
    cons = []
    for normal, threshold, strict in poly.constraints:
        if any(Fraction(c).denominator != 1 for c in normal):
            return None
        n0, n1 = (int(c) for c in normal)
        thr = Fraction(threshold) * scale
        cons.append((n0, n1, thr.numerator, thr.denominator, strict))
    out = set()
    for i, vx in enumerate(sx):
        row = [(n1, n0 * vx, tn, td, st) for n0, n1, tn, td, st in cons]
        for j, vy in enumerate(sy):
            member = True
            for n1, base, tn, td, _ in row:
                value = (base + n1 * vy) * td
                if value == tn:
                    raise GridAlignmentError(
                        f"pixel center {(xs[i], ys[j])} aligned with a constraint"
                    )
                if value < tn:
                    member = False
            if member:
                out.add((i, j))
    return frozenset(out)


def _staircase_bitmap(region: StaircaseRegion, xs, ys):
    su = region.setup
    rays = {j: su.sigma2.b(j) for j in region.j_prime}
    if any(len(b) != 2 for b in rays.values()):
        return None
    scale, sx, sy = _scaled_axes(xs, ys)
    floors = {j: region.c[j] * scale for j in region.j_prime if j in region.c}
    gamma_cache: dict[tuple[int, ...], int] = {}
    out = set()
    for i, vx in enumerate(sx):
        row = {j: (b[1], b[0] * vx) for j, b in rays.items()}
        for j, vy in enumerate(sy):
            p = {k: base + n1 * vy for k, (n1, base) in row.items()}
            aligned = any(p[k] == floors[k] for k in floors) or any(
                p[k] % scale == 0 for k in region.m_index
            )
            stepped = all(p[k] > floors[k] for k in region.m_index if k in floors)
            member = stepped and all(p[k] > floors[k] for k in floors)
            if stepped:
                m0 = tuple(
                    -((-p[k]) // scale) - 1 - region.c.get(k, 0) for k in region.m_index
                )
                gamma = gamma_cache.get(m0)
                if gamma is None:
                    gamma = region._gamma0_of(m0)
                    gamma_cache[m0] = gamma
                gate = p[region.i0] - gamma * scale
                if gate == 0:
                    aligned = True
                member = member and gate > 0
            if aligned:
                raise GridAlignmentError(
                    f"pixel center {(xs[i], ys[j])} aligned with a region face"
                )
            if member:
                out.add((i, j))
    return frozenset(out)


def raster_bitmap(obj, bbox, step, origin=(0, 0)) -> frozenset:
    """Pixel set of ``as_pixel_predicate(obj)``, taken with scaled integers.

    Same answer and same boundary refusals as running ``raster_pixels`` on
    the predicate, just much faster on fine grids; objects the integer
    path cannot handle fall back to the predicate walk.
    """
    xs, ys = raster_grid(bbox, step, origin)
    pixels = None
    if isinstance(obj, StaircaseRegion):
        if obj.setup.extra_index in obj.J:
            pixels = _staircase_bitmap(obj, xs, ys)
        else:
            pixels = _poly_bitmap(obj.outer, xs, ys)
    elif isinstance(obj, Polyhedron) and obj.dim == 2:
        pixels = _poly_bitmap(obj, xs, ys)
    if pixels is None:
        return raster_pixels(as_pixel_predicate(obj), bbox, step, origin)
    return pixels


def pixels_contractible(pixels) -> bool:
    """Connected with cubical Euler characteristic 1; empty counts as no.

    Corners and edges of the squares are packed into integers (row in the
    high bits, one parity bit for edge orientation) so the counting stays
    fast on large rasters.
    """
    if not pixels:
        return False
    min_i = min(i for i, _ in pixels)
    min_j = min(j for _, j in pixels)
    shift = 1 << 32
    cells = {((i - min_i + 1) * shift) + (j - min_j + 1) for i, j in pixels}

    verts = (
        cells
        | {c + 1 for c in cells}
        | {c + shift for c in cells}
        | {c + shift + 1 for c in cells}
    )
    edges = (
        {2 * c for c in cells}
        | {2 * c + 1 for c in cells}
        | {2 * (c + 1) for c in cells}
        | {2 * (c + shift) + 1 for c in cells}
    )
    euler = len(verts) - len(edges) + len(cells)
    if euler != 1:
        return False

    offsets = (-shift - 1, -shift, -shift + 1, -1, 1, shift - 1, shift, shift + 1)
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        for off in offsets:
            nb = cur + off
            if nb in cells and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(cells)


def raster_contractible_2d(member_a, member_b, bbox, step, origin=(0, 0)) -> bool:
    """Decide contractibility of {A and not B} inside a box, by pixels.

    The difference is rasterized at pixel centers, the pixels assemble into
    a cubical complex, and the answer is (connected and Euler
    characteristic 1) which characterizes contractibility for planar
    complexes.  An empty raster returns False.
    """
    pixels_a = raster_pixels(member_a, bbox, step, origin)
    pixels_b = raster_pixels(member_b, bbox, step, origin)
    return pixels_contractible(pixels_a - pixels_b)
