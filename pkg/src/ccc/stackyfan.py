"""Stacky fans and the combinatorial setups behind the three transforms.

A stacky fan is a simplicial fan together with a positive integer weight on
each ray.  The weighted generator of ray i is b_i = weight_i * v_i with v_i
primitive.  Cones are named by sorted tuples of ray indices; the face closure
always contains the zero cone ().
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .errors import InvalidArgument, ValidationError
from .exactlin import (
    LatticeVector,
    cone_coefficients,
    is_primitive,
    lattice_rank,
    linear_feasible,
)


@dataclass(frozen=True)
class WeightedRay:
    """A primitive lattice direction v together with a positive weight."""

    v: LatticeVector
    weight: int

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(int(c) for c in self.v))
        if not is_primitive(self.v):
            raise ValidationError(f"ray {self.v} is not primitive")
        if not isinstance(self.weight, int) or self.weight < 1:
            raise ValidationError(f"ray weight {self.weight!r} must be a positive integer")

    @property
    def b(self) -> LatticeVector:
        return tuple(self.weight * c for c in self.v)


@dataclass(frozen=True, order=True)
class Cone:
    """A simplicial cone, named by the sorted indices of its rays."""

    ray_indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(self.ray_indices))
        if len(set(idx)) != len(idx):
            raise ValidationError(f"repeated ray index in cone {self.ray_indices}")
        object.__setattr__(self, "ray_indices", idx)

    @property
    def dim(self) -> int:
        return len(self.ray_indices)


def faces(sigma: Cone) -> list[Cone]:
    """All faces of a simplicial cone: the power set of its ray indices."""
    out = []
    for k in range(sigma.dim + 1):
        for sub in itertools.combinations(sigma.ray_indices, k):
            out.append(Cone(sub))
    return out


@dataclass(frozen=True)
class StackyFan:
    """A validated stacky fan: weighted rays plus a simplicial fan on them."""

    dim: int
    rays: tuple[WeightedRay, ...]
    max_cones: tuple[Cone, ...]
    all_cones: tuple[Cone, ...] = field(default=())

    def v(self, i: int) -> LatticeVector:
        return self.rays[i].v

    def b(self, i: int) -> LatticeVector:
        return self.rays[i].b

    def weight(self, i: int) -> int:
        return self.rays[i].weight

    def has_cone(self, sigma: Cone) -> bool:
        return sigma in self._cone_set

    @property
    def _cone_set(self) -> frozenset:
        return frozenset(self.all_cones)


def _relint_meets(fan_rays, sigma: Cone, tau: Cone) -> bool:
    """Whether the relative interiors of two cones share a point.

    Decided exactly in coefficient space: a common point means
    sum(lam_s v_s) = sum(mu_t v_t) with all lam, mu > 0, which is a
    homogeneous feasibility problem.
    """
    dim = len(fan_rays[0].v)
    ns, nt = sigma.dim, tau.dim
    nvars = ns + nt
    cons = []
    for k in range(nvars):
        coeffs = tuple(Fraction(1) if j == k else Fraction(0) for j in range(nvars))
        cons.append((coeffs, Fraction(0), True))
    for coord in range(dim):
        row = [Fraction(0)] * nvars
        for k, i in enumerate(sigma.ray_indices):
            row[k] = Fraction(fan_rays[i].v[coord])
        for k, i in enumerate(tau.ray_indices):
            row[ns + k] -= Fraction(fan_rays[i].v[coord])
        cons.append((tuple(row), Fraction(0), False))
        cons.append((tuple(-c for c in row), Fraction(0), False))
    return linear_feasible(cons, nvars)


def make_fan(dim: int, rays, max_cones) -> StackyFan:
    """Assemble and validate a stacky fan.

    Checks simpliciality of every listed cone, full rank of the ray table,
    and the fan axiom that distinct faces have disjoint relative interiors.

    Raises:
        ValidationError: on any violated axiom, with the offending location.
    """
    rays = tuple(rays)
    if dim < 1:
        raise ValidationError(f"fan dimension {dim} must be >= 1")
    if not rays:
        raise ValidationError("fan has no rays")
    for i, ray in enumerate(rays):
        if len(ray.v) != dim:
            raise ValidationError(f"ray {i} has {len(ray.v)} coordinates, expected {dim}")
    if lattice_rank([r.b for r in rays]) != dim:
        raise ValidationError("ray generators do not span: rank deficiency")

    cones = []
    for sigma in max_cones:
        sigma = sigma if isinstance(sigma, Cone) else Cone(tuple(sigma))
        for i in sigma.ray_indices:
            if not 0 <= i < len(rays):
                raise ValidationError(f"cone {sigma.ray_indices} references missing ray {i}")
        vs = [rays[i].v for i in sigma.ray_indices]
        if vs and lattice_rank(vs) != len(vs):
            raise ValidationError(f"cone {sigma.ray_indices} has dependent rays")
        cones.append(sigma)
    if len(set(cones)) != len(cones):
        raise ValidationError("duplicate maximal cone")

    closure = set()
    for sigma in cones:
        closure.update(faces(sigma))
    all_cones = tuple(sorted(closure, key=lambda c: (c.dim, c.ray_indices)))

    nonzero = [c for c in all_cones if c.dim > 0]
    for sigma, tau in itertools.combinations(nonzero, 2):
        if _relint_meets(rays, sigma, tau):
            raise ValidationError(
                f"cones {sigma.ray_indices} and {tau.ray_indices} overlap: "
                "intersection is not a common face"
            )
    return StackyFan(dim=dim, rays=rays, max_cones=tuple(cones), all_cones=all_cones)


def parse_stacky_fan(data: dict) -> StackyFan:
    """Build a validated StackyFan from its document form.

    Schema: {"dim": n, "rays": [{"v": [ints], "weight": int>=1}, ...],
    "max_cones": [[ray indices], ...]}.  The weight key may be omitted and
    defaults to 1.
    """
    if not isinstance(data, dict):
        raise ValidationError("fan document must be an object")
    for key in ("dim", "rays", "max_cones"):
        if key not in data:
            raise ValidationError(f"fan document missing key {key!r}")
    dim = data["dim"]
    if not isinstance(dim, int):
        raise ValidationError("dim must be an integer")
    rays = []
    for i, entry in enumerate(data["rays"]):
        if not isinstance(entry, dict) or "v" not in entry:
            raise ValidationError(f"ray {i} must be an object with a 'v' key")
        weight = entry.get("weight", 1)
        rays.append(WeightedRay(v=tuple(entry["v"]), weight=weight))
    return make_fan(dim, rays, [tuple(c) for c in data["max_cones"]])


def is_complete(fan: StackyFan) -> bool:
    """Whether the fan's support is all of N_R.

    Criterion: every maximal cone is full-dimensional, every ridge (a face of
    codimension one inside a maximal cone) lies in exactly two maximal cones,
    and the resulting adjacency graph is connected.
    """
    if not fan.max_cones:
        return False
    if any(c.dim != fan.dim for c in fan.max_cones):
        return False
    ridge_owners: dict[tuple[int, ...], list[int]] = {}
    for ci, sigma in enumerate(fan.max_cones):
        for ridge in itertools.combinations(sigma.ray_indices, fan.dim - 1):
            ridge_owners.setdefault(ridge, []).append(ci)
    if any(len(owners) != 2 for owners in ridge_owners.values()):
        return False
    # walk the adjacency graph
    seen = {0}
    stack = [0]
    adj: dict[int, set[int]] = {i: set() for i in range(len(fan.max_cones))}
    for a, b in ridge_owners.values():
        adj[a].add(b)
        adj[b].add(a)
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(fan.max_cones)


@dataclass(frozen=True)
class SameBaseSetup:
    """Two weightings r, s of one base fan, refined by t_i = lcm(r_i, s_i)."""

    base: StackyFan
    r: tuple[int, ...]
    s: tuple[int, ...]
    t: tuple[int, ...]
    m: tuple[int, ...]  # t_i / r_i
    n: tuple[int, ...]  # t_i / s_i
    fan_r: StackyFan
    fan_s: StackyFan
    fan_t: StackyFan


def _reweight(fan: StackyFan, weights) -> StackyFan:
    rays = tuple(WeightedRay(v=ray.v, weight=w) for ray, w in zip(fan.rays, weights))
    return StackyFan(dim=fan.dim, rays=rays, max_cones=fan.max_cones, all_cones=fan.all_cones)


def build_same_base(fan: StackyFan, r, s) -> SameBaseSetup:
    """Set up the same-coarse-base transform data for weight lists r and s."""
    r = tuple(r)
    s = tuple(s)
    for name, w in (("r", r), ("s", s)):
        if len(w) != len(fan.rays):
            raise InvalidArgument(f"weights {name} have length {len(w)}, expected {len(fan.rays)}")
        if any(not isinstance(x, int) or x < 1 for x in w):
            raise InvalidArgument(f"weights {name} must be positive integers")
    t = tuple(lcm(a, b) for a, b in zip(r, s))
    m = tuple(ti // ri for ti, ri in zip(t, r))
    n = tuple(ti // si for ti, si in zip(t, s))
    return SameBaseSetup(
        base=fan,
        r=r,
        s=s,
        t=t,
        m=m,
        n=n,
        fan_r=_reweight(fan, r),
        fan_s=_reweight(fan, s),
        fan_t=_reweight(fan, t),
    )


@dataclass(frozen=True)
class ContractionSetup:
    """Data of a weighted-blowup contraction.

    The extra ray v_{n+1} = sum a_i v_i (a_i > 0 for i < n_prime after
    reindexing) subdivides the cone on the first n_prime rays.  sigma2 is the
    fan of the contracted model, sigma1 the subdivided one, sigma_prime the
    subdivided one with the corrected weight r_prime on the extra ray.
    """

    n: int
    n_prime: int
    rays: tuple[WeightedRay, ...]
    extra: WeightedRay
    a: tuple[Fraction, ...]
    alpha: tuple[Fraction, ...]
    m: int
    r_prime: int
    beta: tuple[int, ...]
    perm: tuple[int, ...]  # new index -> index in the input ray list
    sigma1: StackyFan
    sigma2: StackyFan
    sigma_prime: StackyFan

    @property
    def extra_index(self) -> int:
        return self.n

    @property
    def i_prime(self) -> tuple[int, ...]:
        return tuple(range(self.n_prime))


def build_contraction(rays, extra: WeightedRay) -> ContractionSetup:
    """Construct the contraction setup from n independent rays and one extra.

    The extra ray must be a positive combination of at least two of the input
    rays; inputs are reindexed so those carry the leading indices.

    Raises:
        InvalidArgument: extra ray outside the open span, or degenerate
            (a multiple of a single input ray).
    """
    rays = tuple(rays)
    n = len(rays)
    if n < 2:
        raise InvalidArgument("need at least two rays")
    dim = len(rays[0].v)
    if dim != n:
        raise InvalidArgument(f"{n} rays of dimension {dim}: rays must be a basis")
    if lattice_rank([r.v for r in rays]) != n:
        raise InvalidArgument("ray directions are dependent")
    if len(extra.v) != dim:
        raise InvalidArgument("extra ray has wrong dimension")

    a_full = cone_coefficients(extra.v, [r.v for r in rays])
    if a_full is None or any(c < 0 for c in a_full):
        raise InvalidArgument("extra ray is not in the nonnegative span of the rays")
    positive = [i for i, c in enumerate(a_full) if c > 0]
    if len(positive) < 2:
        raise InvalidArgument("extra ray must involve at least two rays")
    perm = tuple(positive + [i for i, c in enumerate(a_full) if c == 0])
    rays = tuple(rays[i] for i in perm)
    a = tuple(a_full[i] for i in positive)
    n_prime = len(positive)

    alpha = tuple(Fraction(extra.weight, rays[i].weight) * a[i] for i in range(n_prime))
    m = lcm(*[f.denominator for f in alpha])
    r_prime = m * extra.weight
    beta = tuple(int(m * f) for f in alpha)

    sigma2 = make_fan(dim, rays, [tuple(range(n))])
    i_prime = set(range(n_prime))
    max1 = [tuple(sorted(set(range(n + 1)) - {i})) for i in sorted(i_prime)]
    sigma1 = make_fan(dim, rays + (extra,), max1)
    extra_prime = WeightedRay(v=extra.v, weight=r_prime)
    sigma_prime = make_fan(dim, rays + (extra_prime,), max1)

    setup = ContractionSetup(
        n=n,
        n_prime=n_prime,
        rays=rays,
        extra=extra,
        a=a,
        alpha=alpha,
        m=m,
        r_prime=r_prime,
        beta=beta,
        perm=perm,
        sigma1=sigma1,
        sigma2=sigma2,
        sigma_prime=sigma_prime,
    )
    # b'_{n+1} = sum beta_i b_i must hold on the nose
    lhs = tuple(r_prime * c for c in extra.v)
    rhs = [0] * dim
    for i in range(n_prime):
        for k, c in enumerate(rays[i].b):
            rhs[k] += beta[i] * c
    if lhs != tuple(rhs):
        raise ValidationError("internal: weighted extra ray does not recombine")
    return setup


def parse_contraction(data: dict) -> ContractionSetup:
    """Build a ContractionSetup from {"rays": [...], "extra": {...}}."""
    if not isinstance(data, dict) or "rays" not in data or "extra" not in data:
        raise ValidationError("contraction document needs 'rays' and 'extra'")
    rays = [WeightedRay(v=tuple(e["v"]), weight=e.get("weight", 1)) for e in data["rays"]]
    extra = WeightedRay(v=tuple(data["extra"]["v"]), weight=data["extra"].get("weight", 1))
    return build_contraction(rays, extra)


def parse_same_base(data: dict) -> SameBaseSetup:
    """Build a SameBaseSetup from {"fan": {...}, "r": [...], "s": [...]}."""
    if not isinstance(data, dict) or any(k not in data for k in ("fan", "r", "s")):
        raise ValidationError("same-base document needs 'fan', 'r' and 's'")
    return build_same_base(parse_stacky_fan(data["fan"]), data["r"], data["s"])


def j_image(setup: ContractionSetup, J) -> tuple[int, ...]:
    """The index set J' of the smallest contracted cone containing sigma_J."""
    J = tuple(sorted(J))
    if setup.extra_index not in J:
        return J
    return tuple(sorted((set(J) - {setup.extra_index}) | set(setup.i_prime)))


def discrepancy_compare(setup) -> str:
    """Compare the two sides of the discrepancy inequality.

    Same-base setups compare the weight vectors componentwise; contraction
    setups compare sum(a_i / r_i) with 1 / r_{n+1}.  Returns one of
    ">=", "<=", "=", "incomparable" (the last only for same-base setups).
    """
    if isinstance(setup, SameBaseSetup):
        ge = all(a >= b for a, b in zip(setup.r, setup.s))
        le = all(a <= b for a, b in zip(setup.r, setup.s))
        if ge and le:
            return "="
        if ge:
            return ">="
        if le:
            return "<="
        return "incomparable"
    if isinstance(setup, ContractionSetup):
        total = sum(setup.alpha)
        if total == 1:
            return "="
        return ">=" if total > 1 else "<="
    raise InvalidArgument(f"unsupported setup type {type(setup).__name__}")
