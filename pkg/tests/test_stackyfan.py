"""Fan parsing/validation, completeness, and the two transform setups."""

import random
from fractions import Fraction

import pytest

from ccc.errors import InvalidArgument, ValidationError
from ccc.exactlin import cone_coefficients
from ccc.stackyfan import (
    Cone,
    WeightedRay,
    build_contraction,
    build_same_base,
    discrepancy_compare,
    faces,
    is_complete,
    j_image,
    parse_stacky_fan,
)

F = Fraction


def test_parse_p13(p13):
    assert len(p13.max_cones) == 2
    assert len(p13.all_cones) == 3
    assert p13.b(0) == (3,)
    assert p13.b(1) == (-1,)


def test_parse_p112(p112):
    assert len(p112.max_cones) == 3
    assert len(p112.all_cones) == 7
    assert p112.has_cone(Cone(()))


def test_parse_rejects_non_primitive_ray():
    with pytest.raises(ValidationError):
        parse_stacky_fan({"dim": 2, "rays": [{"v": [2, 4]}, {"v": [0, 1]}], "max_cones": [[0, 1]]})


def test_parse_rejects_dependent_cone_rays():
    with pytest.raises(ValidationError, match="dependent"):
        parse_stacky_fan(
            {
                "dim": 2,
                "rays": [{"v": [1, 0]}, {"v": [-1, 0]}, {"v": [0, 1]}],
                "max_cones": [[0, 1]],
            }
        )


def test_parse_rejects_rank_deficiency():
    with pytest.raises(ValidationError, match="rank"):
        parse_stacky_fan({"dim": 2, "rays": [{"v": [1, 0]}], "max_cones": [[0]]})


def test_parse_rejects_overlapping_cones():
    # first quadrant and the cone x >= |y| share interior points
    with pytest.raises(ValidationError, match="overlap"):
        parse_stacky_fan(
            {
                "dim": 2,
                "rays": [{"v": [1, 0]}, {"v": [0, 1]}, {"v": [1, 1]}, {"v": [1, -1]}],
                "max_cones": [[0, 1], [2, 3]],
            }
        )


def test_parse_rejects_bad_weight():
    with pytest.raises(ValidationError):
        parse_stacky_fan({"dim": 1, "rays": [{"v": [1], "weight": 0}], "max_cones": [[0]]})


def test_faces_power_set():
    assert [c.ray_indices for c in faces(Cone((0, 1)))] == [(), (0,), (1,), (0, 1)]
    assert [c.ray_indices for c in faces(Cone(()))] == [()]
    assert len(faces(Cone((0, 1, 2)))) == 8


def test_is_complete(p1, p13, p112, a1_resolution):
    assert is_complete(p1)
    assert is_complete(p13)
    assert is_complete(p112)
    assert not is_complete(a1_resolution)


def test_is_complete_single_cone():
    fan = parse_stacky_fan(
        {"dim": 2, "rays": [{"v": [1, 0]}, {"v": [0, 1]}], "max_cones": [[0, 1]]}
    )
    assert not is_complete(fan)


def _covered(fan, x):
    for sigma in fan.max_cones:
        coeffs = cone_coefficients(x, [fan.v(i) for i in sigma.ray_indices])
        if coeffs is not None and all(c >= 0 for c in coeffs):
            return True
    return False


def test_is_complete_matches_random_direction_oracle(p1, p13, p112, a1_resolution):
    rng = random.Random(20250819)
    for fan in (p1, p13, p112, a1_resolution):
        covered_all = True
        for _ in range(300):
            x = tuple(F(rng.randint(-40, 40), rng.randint(1, 7)) for _ in range(fan.dim))
            if any(x):
                covered_all = covered_all and _covered(fan, x)
        assert covered_all == is_complete(fan)


def test_build_same_base_p12_p13(p1):
    setup = build_same_base(p1, (3, 1), (2, 1))
    assert setup.t == (6, 1)
    assert setup.m == (2, 1)
    assert setup.n == (3, 1)
    assert setup.fan_t.weight(0) == 6


def test_build_same_base_identity(p1):
    setup = build_same_base(p1, (5, 7), (5, 7))
    assert setup.t == (5, 7)
    assert setup.m == (1, 1)
    assert setup.n == (1, 1)


def test_build_same_base_lcm_symmetry(p1):
    assert build_same_base(p1, (2, 3), (3, 2)).t == (6, 6)


def test_build_same_base_rejects_bad_weights(p1):
    with pytest.raises(InvalidArgument):
        build_same_base(p1, (0, 1), (1, 1))
    with pytest.raises(InvalidArgument):
        build_same_base(p1, (1,), (1, 1))


def test_contraction_crepant_a1(crepant_a1):
    s = crepant_a1
    assert s.a == (F(1, 2), F(1, 2))
    assert s.alpha == (F(1, 2), F(1, 2))
    assert s.m == 2
    assert s.r_prime == 2
    assert s.beta == (1, 1)
    assert s.n_prime == 2
    assert {c.ray_indices for c in s.sigma1.max_cones} == {(1, 2), (0, 2)}
    assert [c.ray_indices for c in s.sigma2.max_cones] == [(0, 1)]
    assert s.sigma_prime.weight(2) == 2


def test_contraction_discrepancy_example(discrepancy_setup):
    s = discrepancy_setup
    assert s.a == (F(1), F(1))
    assert s.alpha == (F(1, 2), F(1))
    assert s.m == 2
    assert s.r_prime == 2
    assert s.beta == (1, 2)


def test_contraction_om3(om3):
    assert om3.alpha == (F(1, 3), F(1, 3))
    assert om3.m == 3
    assert om3.r_prime == 3
    assert om3.beta == (1, 1)


def test_contraction_rejects_degenerate_extra():
    rays = [WeightedRay((1, 0), 1), WeightedRay((0, 1), 1)]
    with pytest.raises(InvalidArgument):
        build_contraction(rays, WeightedRay((1, 0), 1))
    with pytest.raises(InvalidArgument):
        build_contraction(rays, WeightedRay((-1, -1), 1))


def test_contraction_reindexes_rays():
    rays = [WeightedRay((1, 0, 0), 1), WeightedRay((0, 1, 0), 1), WeightedRay((0, 0, 1), 1)]
    s = build_contraction(rays, WeightedRay((1, 0, 1), 1))
    assert s.perm == (0, 2, 1)
    assert s.rays[1].v == (0, 0, 1)
    assert s.n_prime == 2
    assert {c.ray_indices for c in s.sigma1.max_cones} == {(1, 2, 3), (0, 2, 3)}


def _in_cone(fan, point, sigma):
    if sigma.dim == 0:
        return all(c == 0 for c in point)
    coeffs = cone_coefficients(point, [fan.v(i) for i in sigma.ray_indices])
    return coeffs is not None and all(c >= 0 for c in coeffs)


@pytest.mark.parametrize("name", ["crepant_a1", "discrepancy_setup", "om3"])
def test_j_image_is_smallest_containing_cone(name, request):
    setup = request.getfixturevalue(name)
    gens = {i: setup.rays[i].v for i in range(setup.n)}
    gens[setup.extra_index] = setup.extra.v
    for cone in setup.sigma1.all_cones:
        J = cone.ray_indices
        containing = [
            tau
            for tau in setup.sigma2.all_cones
            if all(_in_cone(setup.sigma2, gens[j], tau) for j in J)
        ]
        smallest = min(containing, key=lambda t: t.dim)
        assert sum(1 for t in containing if t.dim == smallest.dim) == 1
        assert j_image(setup, J) == smallest.ray_indices


def test_discrepancy_compare(p1, crepant_a1, discrepancy_setup, om3):
    assert discrepancy_compare(build_same_base(p1, (3, 1), (2, 1))) == ">="
    assert discrepancy_compare(build_same_base(p1, (2, 1), (3, 1))) == "<="
    assert discrepancy_compare(build_same_base(p1, (2, 2), (2, 2))) == "="
    assert discrepancy_compare(build_same_base(p1, (2, 3), (3, 2))) == "incomparable"
    assert discrepancy_compare(crepant_a1) == "="
    assert discrepancy_compare(discrepancy_setup) == ">="
    assert discrepancy_compare(om3) == "<="
