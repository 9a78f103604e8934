import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pbgrid.diagram import (
    DiagramParseError,
    InfiniteDeathError,
    PersistenceDiagram,
    PerturbationSpec,
    parse_diagram,
    perturb_diagram,
    read_diagram,
    serialize_diagram,
    write_diagram,
)
from pbgrid.metrics import bottleneck

from strategies import diagrams


def test_parse_single_row():
    pd = parse_diagram("birth,death\n0.1,0.8")
    assert np.array_equal(pd.points, [[0.1, 0.8]])
    assert pd.homology_dim == 1


def test_parse_empty_diagram():
    pd = parse_diagram("birth,death\n")
    assert len(pd) == 0
    assert pd.points.shape == (0, 2)


def test_death_before_birth_names_line():
    with pytest.raises(DiagramParseError, match="death < birth at line 2"):
        parse_diagram("birth,death\n0.5,0.2")


@pytest.mark.parametrize(
    "text, line",
    [
        ("birth,death\n0.1,abc", 2),
        ("birth,death\n-0.1,0.3", 2),
        ("# note\nbirth,death\n0.1,0.2\n0.1", 4),
        ("x,y\n0.1,0.2", 1),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(DiagramParseError) as exc:
        parse_diagram(text)
    assert exc.value.line == line


def test_infinite_death_has_own_error():
    with pytest.raises(InfiniteDeathError):
        parse_diagram("birth,death\n0,inf")


def test_dim_comment_and_stream_input():
    pd = parse_diagram(io.StringIO("# generated\n# dim=0\nbirth,death\n0,1\n"))
    assert pd.homology_dim == 0


def test_serialize_examples():
    assert serialize_diagram(PersistenceDiagram([(0.1, 0.8)])) == "# dim=1\nbirth,death\n0.1,0.8\n"
    assert serialize_diagram(PersistenceDiagram(np.empty((0, 2)))) == "# dim=1\nbirth,death\n"
    assert serialize_diagram(PersistenceDiagram([(0.0, 0.0)])).endswith("\n0,0\n")


@given(diagrams(max_size=10, hi=1e3), st.integers(0, 3))
def test_round_trip_is_bit_exact(pd, dim):
    pd = PersistenceDiagram(pd.points, dim)
    back = parse_diagram(serialize_diagram(pd))
    assert back == pd
    assert back.points.tobytes() == pd.points.tobytes()


def test_file_round_trip(tmp_path):
    pd = PersistenceDiagram([(0.1, 0.8), (0.1, 0.8), (1 / 3, 2 / 3)], 0)
    write_diagram(pd, tmp_path / "pd.csv")
    assert read_diagram(tmp_path / "pd.csv") == pd
    assert b"\r" not in (tmp_path / "pd.csv").read_bytes()


def test_duplicates_preserved():
    pd = parse_diagram("birth,death\n0.1,0.8\n0.1,0.8\n")
    assert len(pd) == 2


def test_invalid_construction():
    with pytest.raises(ValueError):
        PersistenceDiagram([(0.5, 0.2)])
    with pytest.raises(ValueError):
        PersistenceDiagram([(0.0, np.inf)])
    with pytest.raises(ValueError):
        PerturbationSpec(-0.1)


def test_points_are_read_only():
    pd = PersistenceDiagram([(0.1, 0.8)])
    with pytest.raises(ValueError):
        pd.points[0, 0] = 0.5


def test_perturb_zero_tau_is_identity():
    pd = PersistenceDiagram([(0.1, 0.8)])
    assert perturb_diagram(pd, PerturbationSpec(0.0, seed=3)) == pd


def test_perturb_within_tau():
    pd = PersistenceDiagram([(0.1, 0.8)])
    for seed in range(20):
        q = perturb_diagram(pd, PerturbationSpec(0.02, seed))
        assert np.max(np.abs(q.points - pd.points)) <= 0.02


@given(diagrams(max_size=8), st.floats(0.0, 0.5), st.integers(0, 2**31))
def test_perturb_keeps_validity_and_size(pd, tau, seed):
    q = perturb_diagram(pd, PerturbationSpec(tau, seed))
    assert len(q) == len(pd)
    assert np.all(q.points[:, 0] >= 0)
    assert np.all(q.deaths >= q.births)
    assert np.all(np.abs(q.points - pd.points) <= tau + 1e-15)


def test_perturb_bottleneck_bound():
    rng = np.random.default_rng(0)
    for seed in range(100):
        a = np.sort(rng.uniform(0, 1, (6, 2)), axis=1)
        pd = PersistenceDiagram(a)
        q = perturb_diagram(pd, PerturbationSpec(0.05, seed))
        assert bottleneck(pd, q) <= 0.05 + 1e-12


def test_perturb_deterministic():
    pd = PersistenceDiagram([(0.1, 0.8), (0.2, 0.3)])
    assert perturb_diagram(pd, PerturbationSpec(0.1, 9)) == perturb_diagram(pd, PerturbationSpec(0.1, 9))


def test_union_keeps_multiplicity():
    a = PersistenceDiagram([(0.1, 0.8)])
    assert len(a.union(a, a)) == 3
