import numpy as np
import pytest

from hfree.expr import parse
from hfree.fields import Chart, Frame, SmoothMap, VectorField
from hfree.jets import (
    BelowCriticalDimension,
    JetMatrix,
    d1_matrix,
    d2_matrix,
    is_free_at,
    is_immersion_at,
    pair_labels,
    rank_check,
    s,
)
from hfree.constructions import monomial_free_map, standard_frame
from hfree.brackets import contact_frame
from hfree.sampling import sample_points

PLANE = Chart(coords=("x", "y"), box=((-2.0, 2.0), (-2.0, 2.0)))
LINE = Chart(coords=("x",), box=((-4.0, 4.0),))


def test_pair_count():
    assert s(1) == 1
    assert s(2) == 3
    assert s(3) == 6


def test_pair_label_order():
    assert pair_labels(3) == [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


class TestD1:
    def test_planar_example_at_origin(self):
        xi = VectorField(PLANE, (parse("2*y"), parse("1 - y^2")))
        frame = Frame(PLANE, (xi,))
        f = SmoothMap(PLANE, (parse("y*exp(x)"),))
        m = d1_matrix(frame, f, (0.0, 0.0))
        assert m.entries == pytest.approx(np.array([[1.0]]))

    def test_contact_projection_is_identity(self):
        frame = contact_frame(1)
        pi = SmoothMap(frame.chart, (parse("x1"), parse("p1")))
        for point in sample_points(frame.chart, samples=10, seed=5):
            m = d1_matrix(frame, pi, point)
            assert m.entries == pytest.approx(np.eye(2))

    def test_constant_map(self):
        frame = standard_frame(LINE)
        f = SmoothMap(LINE, (parse("3"),))
        assert d1_matrix(frame, f, (0.5,)).entries == pytest.approx(np.array([[0.0]]))


class TestD2:
    def test_monomials_on_line(self):
        frame = standard_frame(LINE)
        f = SmoothMap(LINE, (parse("x"), parse("x^2")))
        m = d2_matrix(frame, f, (3.0,))
        # first row (1, 2x), anticommutator row (0, 2*2)
        assert m.entries == pytest.approx(np.array([[1.0, 6.0], [0.0, 4.0]]))

    def test_monomials_on_plane_at_origin(self):
        # oracle: brute-force second partials of (x, y, x^2, xy, y^2)
        frame = standard_frame(PLANE)
        f = monomial_free_map(2)
        f = SmoothMap(PLANE, tuple(
            parse(src) for src in ("x", "y", "x^2", "x*y", "y^2")
        ))
        m = d2_matrix(frame, f, (0.0, 0.0))
        expected = np.array(
            [
                [1, 0, 0, 0, 0],
                [0, 1, 0, 0, 0],
                [0, 0, 4, 0, 0],
                [0, 0, 0, 2, 0],
                [0, 0, 0, 0, 4],
            ],
            dtype=float,
        )
        assert m.entries == pytest.approx(expected)

    def test_constant_map_all_zero(self):
        frame = standard_frame(PLANE)
        f = SmoothMap(PLANE, (parse("7"), parse("1"), parse("2"),
                              parse("3"), parse("4")))
        m = d2_matrix(frame, f, (0.3, -0.4))
        assert not m.entries.any()

    def test_row_count_law(self):
        for n in (1, 2):
            frame = contact_frame(n)
            k = frame.k
            pi = SmoothMap(
                frame.chart, tuple(parse(c) for c in frame.chart.coords[:-1])
            )
            m = d2_matrix(frame, pi, (0.0,) * frame.chart.dim)
            assert m.entries.shape[0] == k + s(k)


class TestRankCheck:
    def test_identity(self):
        m = JetMatrix(labels=(0, 1), entries=np.eye(2), order=1)
        r = rank_check(m)
        assert r.rank == 2 and r.full_rank and r.det == pytest.approx(1.0)

    def test_rank_deficient(self):
        m = JetMatrix(labels=(0, 1), entries=np.array([[1.0, 2.0], [2.0, 4.0]]), order=1)
        r = rank_check(m)
        assert r.rank == 1 and not r.full_rank
        assert r.det == pytest.approx(0.0, abs=1e-12)

    def test_line_monomial_determinant(self):
        frame = standard_frame(LINE)
        f = SmoothMap(LINE, (parse("x"), parse("x^2")))
        r = rank_check(d2_matrix(frame, f, (1.9,)))
        assert r.det == pytest.approx(4.0)
        assert r.full_rank

    def test_nonfinite_entry_names_row(self):
        m = JetMatrix(
            labels=(0, (0, 0)),
            entries=np.array([[1.0, 0.0], [np.inf, 1.0]]),
            order=2,
        )
        with pytest.raises(ValueError, match=r"\(0, 0\)"):
            rank_check(m)


class TestPredicates:
    def test_planar_immersion_everywhere(self):
        xi = VectorField(PLANE, (parse("2*y"), parse("1 - y^2")))
        frame = Frame(PLANE, (xi,))
        g = SmoothMap(PLANE, (parse("y*exp(x)"),))
        for point in sample_points(PLANE, samples=200, seed=1):
            assert is_immersion_at(frame, g, point)

    def test_planar_free_by_composition(self):
        xi = VectorField(PLANE, (parse("2*y"), parse("1 - y^2")))
        frame = Frame(PLANE, (xi,))
        fm = SmoothMap(PLANE, (parse("y*exp(x)"), parse("y^2*exp(2*x)")))
        for point in sample_points(PLANE, samples=200, seed=2):
            assert is_free_at(frame, fm, point)

    def test_constant_map_is_not_immersion(self):
        frame = standard_frame(LINE)
        f = SmoothMap(LINE, (parse("5"),))
        assert not is_immersion_at(frame, f, (0.1,))

    def test_below_critical_dimension_is_distinguished(self):
        frame = standard_frame(PLANE)
        f = SmoothMap(PLANE, (parse("x"),))
        with pytest.raises(BelowCriticalDimension):
            is_free_at(frame, f, (0.0, 0.0))

    def test_square_d1_det_and_sigma_verdicts_agree(self):
        xi = VectorField(PLANE, (parse("2*y"), parse("1 - y^2")))
        frame = Frame(PLANE, (xi,))
        g = SmoothMap(PLANE, (parse("y*exp(x)"),))
        for point in sample_points(PLANE, samples=100, seed=9):
            r = rank_check(d1_matrix(frame, g, point))
            assert r.full_rank == (abs(r.det) > 1e-9)


def test_frame_mixing_leaves_rank_invariant():
    rng = np.random.default_rng(12)
    frame = contact_frame(1)
    pi = SmoothMap(frame.chart, (parse("x1"), parse("p1")))
    mix = rng.uniform(-2, 2, (2, 2))
    while abs(np.linalg.det(mix)) < 0.1:
        mix = rng.uniform(-2, 2, (2, 2))
    mixed_vectors = []
    for a in range(2):
        comps = []
        for i in range(frame.chart.dim):
            from hfree.expr import Add, Const, Mul, simplify

            e = Add(
                Mul(Const(float(mix[a, 0])), frame.vectors[0].components[i]),
                Mul(Const(float(mix[a, 1])), frame.vectors[1].components[i]),
            )
            comps.append(simplify(e))
        mixed_vectors.append(VectorField(frame.chart, tuple(comps)))
    mixed = Frame(frame.chart, tuple(mixed_vectors))
    for point in sample_points(frame.chart, samples=50, seed=4):
        r0 = rank_check(d1_matrix(frame, pi, point))
        r1 = rank_check(d1_matrix(mixed, pi, point))
        assert r0.rank == r1.rank
        fm = SmoothMap(
            frame.chart,
            tuple(parse(src) for src in ("x1", "p1", "x1^2", "x1*p1", "p1^2")),
        )
        assert (
            rank_check(d2_matrix(frame, fm, point)).rank
            == rank_check(d2_matrix(mixed, fm, point)).rank
        )
