import io

import numpy as np
import pytest

from jitterdisc.errors import ParameterError, PointSetParseError
from jitterdisc.partition import PartitionSpec, SubsetMask, all_subsets, box_bounds, box_index_of
from jitterdisc.sampler import (
    PointSet,
    SeedSpec,
    format_point_set,
    jittered_batch,
    jittered_sample,
    parse_point_set,
    project,
    read_point_set,
    uniform_sample,
    write_point_set,
)


def test_single_box_sample():
    ps = jittered_sample(PartitionSpec(1, 2), SeedSpec(3))
    assert ps.n == 1 and ps.d == 2
    assert np.all((ps.points >= 0) & (ps.points < 1))


def test_one_point_per_cell_of_four_by_four_grid():
    spec = PartitionSpec(4, 2)
    ps = jittered_sample(spec, SeedSpec(11))
    assert ps.n == 16
    cells = {box_index_of(spec, x) for x in ps.points}
    assert cells == set(spec.indices())


def test_one_dimensional_containment():
    ps = jittered_sample(PartitionSpec(3, 1), 0)
    for r, (x,) in enumerate(ps.points):
        assert r / 3 <= x < (r + 1) / 3


@pytest.mark.parametrize("m, d", [(2, 3), (5, 2), (3, 4), (7, 1)])
def test_containment_in_rank_order(m, d):
    spec = PartitionSpec(m, d)
    for rep in range(20):
        ps = jittered_sample(spec, SeedSpec(99, rep))
        for i, x in zip(spec.indices(), ps.points):
            lo, hi = box_bounds(spec, i)
            assert np.all(lo <= x) and np.all(x < hi)


def test_draws_near_one_stay_in_box():
    from jitterdisc.sampler import _jittered_coordinates

    spec = PartitionSpec(3, 2)
    u = np.full((spec.n, 2), np.nextafter(1.0, 0.0))
    x = _jittered_coordinates(spec, u)
    for i, p in zip(spec.indices(), x):
        lo, hi = box_bounds(spec, i)
        assert np.all(lo <= p) and np.all(p < hi)


def test_reproducible_bytes():
    spec = PartitionSpec(3, 3)
    a = format_point_set(jittered_sample(spec, SeedSpec(2024, 5)))
    b = format_point_set(jittered_sample(spec, SeedSpec(2024, 5)))
    assert a == b
    assert a != format_point_set(jittered_sample(spec, SeedSpec(2024, 6)))


def test_batch_matches_single_samples():
    spec = PartitionSpec(2, 3)
    batch = jittered_batch(spec, 17, 40, 5)
    for k in range(5):
        np.testing.assert_array_equal(batch[k], jittered_sample(spec, SeedSpec(17, 40 + k)).points)


def test_uniform_sample_determinism_and_range():
    a = uniform_sample(1, 1, SeedSpec(1))
    assert a.n == 1 and 0 <= a.points[0, 0] < 1
    assert uniform_sample(50, 3, SeedSpec(8)) == uniform_sample(50, 3, SeedSpec(8))
    with pytest.raises(ParameterError):
        uniform_sample(0, 1)


def test_replicates_differ():
    sets = [uniform_sample(4, 2, SeedSpec(5, r)).points for r in range(100)]
    for a in range(100):
        for b in range(a + 1, 100):
            assert not np.array_equal(sets[a], sets[b])


def test_replicate_streams_look_independent():
    first = np.array([uniform_sample(1, 1, SeedSpec(0, r)).points[0, 0] for r in range(4000)])
    # mean and lag-1 correlation of uniforms across replicate indices
    assert abs(first.mean() - 0.5) < 4 * np.sqrt(1 / 12 / 4000)
    corr = np.corrcoef(first[:-1], first[1:])[0, 1]
    assert abs(corr) < 4 / np.sqrt(4000)


def test_seed_spec_validation():
    with pytest.raises(ParameterError):
        SeedSpec(-1)
    with pytest.raises(ParameterError):
        SeedSpec(2**64)
    assert SeedSpec(1, 2).key != SeedSpec(2, 1).key


def test_project_examples():
    ps = PointSet([[0.3, 0.9], [0.1, 0.2]])
    full = project(ps, SubsetMask.full(2))
    assert full == ps
    np.testing.assert_array_equal(project(ps, SubsetMask(1, 2)).points, [[0.3], [0.1]])
    with pytest.raises(ParameterError):
        project(ps, None)
    with pytest.raises(ParameterError):
        project(ps, SubsetMask(1, 3))


def test_projection_preserves_multiplicity_and_order():
    ps = PointSet([[0.1, 0.5, 0.9], [0.1, 0.7, 0.2]])
    proj = ps.project(SubsetMask.from_axes([3, 1], 3))
    np.testing.assert_array_equal(proj.points, [[0.1, 0.9], [0.1, 0.2]])
    assert project(ps, SubsetMask(1, 3)).n == 2


def test_projection_onto_second_axis_has_two_points_per_half():
    ps = jittered_sample(PartitionSpec(2, 2), SeedSpec(4))
    y = project(ps, SubsetMask.from_axes([2], 2)).points[:, 0]
    assert np.sum(y < 0.5) == 2 and np.sum(y >= 0.5) == 2


@pytest.mark.parametrize("m, d", [(2, 3), (3, 3), (2, 4)])
def test_projection_stratification(m, d):
    spec = PartitionSpec(m, d)
    ps = jittered_sample(spec, SeedSpec(31, 2))
    for s in all_subsets(d):
        sub = PartitionSpec(m, s.size)
        proj = project(ps, s)
        counts = {}
        for x in proj.points:
            key = box_index_of(sub, x)
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == m**s.size
        assert set(counts.values()) == {m ** (d - s.size)}


def test_point_set_validation_and_immutability():
    with pytest.raises(ParameterError):
        PointSet([[1.5, 0.2]])
    with pytest.raises(ParameterError):
        PointSet(np.empty((0, 2)))
    ps = PointSet([[0.2, 0.4]])
    with pytest.raises(ValueError):
        ps.points[0, 0] = 0.5
    np.testing.assert_array_equal(ps.coordinate(2), [0.4])


def test_file_round_trip(tmp_path):
    ps = jittered_sample(PartitionSpec(3, 2), SeedSpec(123))
    path = tmp_path / "pts.txt"
    write_point_set(ps, path)
    text = path.read_text()
    assert text.splitlines()[0] == "# d=2 n=9 seed=123"
    back = read_point_set(path)
    np.testing.assert_array_equal(back.points, ps.points)
    assert back.seed == 123


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("", 1),
        ("0.1 0.2\n", 1),
        ("# d=2 n=1 seed=none\n0.1\n", 2),
        ("# d=2 n=2 seed=1\n0.1 0.2\n0.3 abc\n", 3),
        ("# d=1 n=1 seed=1\n1.5\n", 2),
        ("# d=x n=1\n", 1),
    ],
)
def test_parse_errors_name_the_line(text, lineno):
    with pytest.raises(PointSetParseError) as info:
        parse_point_set(io.StringIO(text))
    assert info.value.lineno == lineno
    assert f"line {lineno}" in str(info.value)


def test_parse_count_mismatch():
    with pytest.raises(PointSetParseError):
        parse_point_set(io.StringIO("# d=1 n=2 seed=1\n0.5\n"))
