import numpy as np
import pytest

from circgeo.circulant import Q_DENSE, CirculantMatrix, circ_mul, Q
from circgeo.curvature import (
    circ_apply_q2,
    curvature_at,
    gram_determinant,
    identity_31_residual,
    independence_cubic,
    residual_scale,
    sectional_curvature,
    sections_of,
    theorem3_check,
)
from circgeo.errors import (
    DegenerateMetric,
    DegenerateSection,
    DependentOrbit,
    IndefiniteMetric,
    StencilTooWide,
)
from circgeo.fields import parse_field_spec
from circgeo.sampling import random_point, random_vector

FLAT = "A: 2; B: 1"


class TestCurvatureTensor:
    def test_flat_baseline(self):
        f = parse_field_spec(FLAT)
        curv = curvature_at(f, (0.3, -1.2, 0.8))
        assert np.max(np.abs(curv.r_up)) <= 1e-10
        assert curv.max_abs <= 1e-10

    def test_richardson_self_consistency(self, paper_fields):
        c1 = curvature_at(paper_fields, (1, 0, 0), h=1e-5)
        c2 = curvature_at(paper_fields, (1, 0, 0), h=5e-6)
        assert np.max(np.abs(c1.r_down - c2.r_down)) <= 1e-6

    def test_first_pair_antisymmetry(self, paper_fields, rng):
        for _ in range(20):
            p = random_point(rng, paper_fields)
            r = curvature_at(paper_fields, p).r_down
            assert np.max(np.abs(r + r.transpose(1, 0, 2, 3))) <= 1e-8

    def test_pair_symmetry(self, paper_fields, rng):
        # FD-limited symmetry: needs a finer step than the default and a
        # tolerance read relative to the tensor magnitude.
        for _ in range(10):
            p = random_point(rng, paper_fields)
            curv = curvature_at(paper_fields, p, h=1e-6)
            r = curv.r_down
            resid = np.max(np.abs(r - r.transpose(2, 3, 0, 1)))
            assert resid <= 1e-8 * max(curv.max_abs, 1.0)

    def test_lowering_consistency(self, paper_fields):
        curv = curvature_at(paper_fields, (1, 0, 0))
        g = curv.metric.g.dense()
        rebuilt = np.einsum("as,akji->kjis", g, curv.r_up)
        assert np.array_equal(rebuilt, curv.r_down)

    def test_degenerate_stencil_raises(self, paper_fields):
        # (1,1,1) is on the degenerate plane x1 = x3.
        with pytest.raises(DegenerateMetric):
            curvature_at(paper_fields, (1, 1, 1))

    def test_stencil_leaves_domain(self, paper_fields):
        lo = np.array([0.0, -1.0, -1.0])
        hi = np.array([1.0, 1.0, 1.0])
        with pytest.raises(StencilTooWide):
            curvature_at(paper_fields, (1.0, 0.0, 0.0), domain=(lo, hi))


class TestShiftIdentities:
    def test_q_orbit_composition_exact(self):
        # q applied twice equals the other cyclic shift, as integer matrices.
        assert circ_mul(Q, Q) == CirculantMatrix(0.0, 0.0, 1.0)
        assert np.array_equal(Q_DENSE @ Q_DENSE, CirculantMatrix(0, 0, 1).dense())

    def test_identity_31_paper_fields(self, paper_fields, rng):
        for _ in range(5):
            p = random_point(rng, paper_fields)
            curv = curvature_at(paper_fields, p)
            for _ in range(20):
                x, y, z, u = (random_vector(rng) for _ in range(4))
                resid = identity_31_residual(paper_fields, p, x, y, z, u, curv=curv)
                assert resid <= 1e-7 * max(residual_scale(curv, x, y, z, u), 1e-300)

    def test_identity_31_zero_vectors(self, paper_fields):
        zero = np.zeros(3)
        resid = identity_31_residual(paper_fields, (1, 0, 0), (1, 2, 3), (3, 1, 0), zero, zero)
        assert resid == 0.0

    def test_identity_31_fails_without_parallelism(self, rng):
        # Curved, non-parallel pair: the identity is a consequence of the
        # parallelism of q, not of the circulant shape alone.
        f = parse_field_spec("A: 2 + x1^2; B: x2")
        p = np.array([0.5, 0.3, -0.2])
        curv = curvature_at(f, p)
        assert curv.max_abs > 1e-3  # genuinely curved
        worst = 0.0
        for _ in range(50):
            x, y, z, u = (random_vector(rng) for _ in range(4))
            resid = identity_31_residual(f, p, x, y, z, u, curv=curv)
            worst = max(worst, resid / max(residual_scale(curv, x, y, z, u), 1e-300))
        assert worst > 1e-2

    def test_identity_32_coordinates(self, paper_fields, rng):
        for _ in range(10):
            p = random_point(rng, paper_fields)
            curv = curvature_at(paper_fields, p)
            lhs = np.einsum("skja,ia->skji", curv.r_up, Q_DENSE)
            rhs = np.einsum("akji,as->skji", curv.r_up, Q_DENSE)
            scale = max(float(np.max(np.abs(curv.r_up))), 1e-300)
            assert np.max(np.abs(lhs - rhs)) <= 1e-7 * scale

    def test_identity_36_chain(self, paper_fields, rng):
        for _ in range(5):
            p = random_point(rng, paper_fields)
            curv = curvature_at(paper_fields, p)
            for _ in range(20):
                x, y, z, u = (random_vector(rng) for _ in range(4))
                scale = max(residual_scale(curv, x, y, z, u), 1e-300)
                base = curv.scalar(x, y, z, u)
                once = curv.scalar(x, y, Q_DENSE @ z, Q_DENSE @ u)
                twice = curv.scalar(x, y, circ_apply_q2(z), circ_apply_q2(u))
                assert abs(base - once) <= 1e-7 * scale
                assert abs(base - twice) <= 1e-7 * scale


class TestSections:
    def test_cubic_values(self):
        assert independence_cubic((1, 2, 3)) == -18.0
        assert independence_cubic((1, 1, 1)) == 0.0
        assert independence_cubic((1, 0, 0)) == -1.0

    def test_sections_valid_seed(self, paper_fields):
        report = sections_of(paper_fields, (1, 0, 0), (1, 2, 3))
        assert report.independence == -18.0
        assert len(report.sections) == 3
        x, qx = report.sections[0]
        assert np.array_equal(qx, [2, 3, 1])

    def test_sections_dependent_orbit(self, paper_fields):
        with pytest.raises(DependentOrbit):
            sections_of(paper_fields, (1, 0, 0), (1, 1, 1))

    def test_sections_indefinite_metric(self):
        f = parse_field_spec("A: 0; B: 1")
        with pytest.raises(IndefiniteMetric):
            sections_of(f, (0, 0, 0), (1, 2, 3))

    def test_section_gram_positive(self, paper_fields, rng):
        for _ in range(20):
            p = random_point(rng, paper_fields, definite=True)
            x = random_vector(rng)
            if abs(independence_cubic(x)) <= 0.1 * np.linalg.norm(x) ** 3:
                continue
            report = sections_of(paper_fields, p, x)
            metric = curvature_at(paper_fields, p).metric
            for u, v in report.sections:
                assert gram_determinant(metric, u, v) > 0


class TestSectionalCurvature:
    def test_flat_sections_zero(self):
        f = parse_field_spec(FLAT)
        mu = sectional_curvature(f, (0, 0, 0), (1, 0, 0), (0, 1, 0))
        assert abs(mu) <= 1e-10

    def test_scaling_invariance(self, paper_fields):
        p = (1, 0, 0)
        curv = curvature_at(paper_fields, p)
        u, v = np.array([1.0, 2.0, 3.0]), np.array([0.0, 1.0, -1.0])
        mu1 = sectional_curvature(paper_fields, p, u, v, curv=curv)
        mu2 = sectional_curvature(paper_fields, p, 2 * u, v, curv=curv)
        assert abs(mu1 - mu2) <= 1e-9 * abs(mu1) + 1e-12

    def test_basis_change_invariance(self, paper_fields, rng):
        p = (1, 0, 0)
        curv = curvature_at(paper_fields, p)
        u, v = np.array([1.0, 2.0, 3.0]), np.array([0.0, 1.0, -1.0])
        mu = sectional_curvature(paper_fields, p, u, v, curv=curv)
        # Ill-conditioned basis changes amplify the FD symmetry defect of the
        # differenced tensor, so restrict to well-conditioned transforms.
        done = 0
        while done < 10:
            a, b, c, d = rng.uniform(-2, 2, 4)
            m = np.array([[a, b], [c, d]])
            if abs(a * d - b * c) < 0.5 or np.linalg.cond(m) > 3:
                continue
            mu2 = sectional_curvature(paper_fields, p, a * u + b * v, c * u + d * v, curv=curv)
            assert abs(mu - mu2) <= 1e-8 * abs(mu)
            done += 1

    def test_degenerate_section_raises(self, paper_fields):
        with pytest.raises(DegenerateSection):
            sectional_curvature(paper_fields, (1, 0, 0), (1, 2, 3), (2, 4, 6))

    def test_richardson_stability(self, paper_fields):
        x = np.array([1.0, 2.0, 3.0])
        qx = Q_DENSE @ x
        mu1 = sectional_curvature(paper_fields, (1, 0, 0), x, qx, h=1e-5)
        mu2 = sectional_curvature(paper_fields, (1, 0, 0), x, qx, h=5e-6)
        assert abs(mu1 - mu2) <= 1e-6 * abs(mu1)


class TestTheorem3:
    def test_paper_point_spread(self, paper_fields):
        report = theorem3_check(paper_fields, (1, 0, 0), (1, 2, 3))
        assert report.passed
        assert report.spread <= 1e-6 * max(abs(m) for m in report.mu) + 1e-9

    def test_flat_spread_zero(self):
        f = parse_field_spec(FLAT)
        report = theorem3_check(f, (0, 0, 0), (1, 2, 3))
        assert report.mu == pytest.approx((0.0, 0.0, 0.0), abs=1e-10)
        assert report.spread <= 1e-10

    def test_randomized_spreads(self, paper_fields, rng):
        for _ in range(5):
            p = random_point(rng, paper_fields, definite=True)
            done = 0
            while done < 10:
                x = random_vector(rng)
                if abs(independence_cubic(x)) <= 0.1 * np.linalg.norm(x) ** 3:
                    continue
                report = theorem3_check(paper_fields, p, x)
                assert report.passed, (p, x, report.spread, report.mu)
                done += 1
