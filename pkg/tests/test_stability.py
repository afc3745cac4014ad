import xml.etree.ElementTree as ET

import numpy as np
import pytest

from qpisde import (GbmParams, InvalidInputError, SingularStepError,
                    evaluate_condition, iem_amplification,
                    milstein_amplification, qpi_exact_amplification,
                    qpi_paper_lhs, region_scan, region_to_csv, region_to_svg)
from qpisde.schemes import _qpi_alpha_beta


def paper_lhs_reference(mu, sigma, dt):
    """Independent term-by-term evaluation of the published quotient."""
    h = mu * dt
    t1 = abs(1 + 2 * h / 3 - h**3 / 9) ** 2
    t2 = dt * abs(sigma * (1 - h + 2 * h**2 / 9)) ** 2
    t3 = dt * abs(sigma * (4 * h / 3) * (1 - h / 3)) ** 2
    t4 = dt * abs(sigma**2 * (4 * h / 3) * (1 - h / 3) * (1 - h + 2 * h**2 / 9))
    den = abs(1 - h + h**2 / 3) ** 2 * abs(1 - h / 3) ** 2
    return (t1 + t2 + t3 + t4) / den


class TestPaperCondition:
    def test_zero_drift(self):
        assert qpi_paper_lhs(0.0, 0.5, 0.5) == pytest.approx(1.125, rel=1e-14)

    def test_stable_anchor(self):
        v = qpi_paper_lhs(-1.0, 0.5, 0.5)
        assert v == pytest.approx(paper_lhs_reference(-1.0, 0.5, 0.5), rel=1e-13)
        assert v == pytest.approx(0.2909, rel=1e-3)
        assert v < 1.0

    def test_unstable_anchor(self):
        v = qpi_paper_lhs(1.0, 0.5, 0.5)
        assert v == pytest.approx(paper_lhs_reference(1.0, 0.5, 0.5), rel=1e-13)
        assert v == pytest.approx(7.857, rel=1e-3)
        assert v > 1.0

    def test_matches_reference_on_grid(self):
        for mu in np.linspace(-4.0, 1.0, 11):
            for dt in np.linspace(0.05, 1.0, 9):
                assert qpi_paper_lhs(mu, 0.5, dt) == \
                    pytest.approx(paper_lhs_reference(mu, 0.5, dt), rel=1e-12)

    def test_vectorized_over_mu(self):
        mus = np.array([-2.0, -1.0, 0.0, 1.0])
        vec = qpi_paper_lhs(mus, 0.5, 0.25)
        for m, v in zip(mus, vec):
            assert v == pytest.approx(qpi_paper_lhs(float(m), 0.5, 0.25), rel=1e-15)


class TestExactAmplification:
    def test_zero_drift(self):
        assert qpi_exact_amplification(0.0, 0.5, 0.5) == \
            pytest.approx(1.0 + 2 * 0.25 * 0.5, rel=1e-14)

    def test_anchor(self):
        assert qpi_exact_amplification(-1.0, 0.5, 0.5) == \
            pytest.approx(0.24654, rel=1e-4)

    def test_deterministic_square(self):
        v = qpi_exact_amplification(-1.0, 0.0, 0.1)
        assert v == pytest.approx(0.8187312**2, rel=1e-6)
        assert v == pytest.approx(0.670321, rel=1e-5)

    def test_monte_carlo_consistency_sample(self):
        rng = np.random.default_rng(99)
        checked = 0
        while checked < 5:
            mu = rng.uniform(-3.0, 1.2)
            dt = rng.uniform(0.05, 1.0)
            if abs(mu * dt) > 1.5:
                continue
            sigma = rng.uniform(0.0, 2.0)
            n = 10**5
            dwa = rng.normal(0.0, np.sqrt(dt), n)
            dwb = rng.normal(0.0, np.sqrt(dt), n)
            _, beta = _qpi_alpha_beta(mu, sigma, dt, dwa, dwb)
            b2 = beta * beta
            se = b2.std() / np.sqrt(n)
            assert abs(qpi_exact_amplification(mu, sigma, dt) - b2.mean()) <= 4 * se
            checked += 1

    def test_paper_condition_conservative_for_strongly_negative_drift(self):
        # the published quotient adds a nonnegative cross term proportional
        # to |mu*dt|; for mu*dt <= -0.3 that term dominates and the
        # quotient bounds the exact factor from above
        for mu in np.linspace(-4.0, -0.3, 17):
            for dt in (0.1, 0.25, 0.5, 1.0):
                if mu * dt > -0.3:
                    continue
                assert qpi_paper_lhs(mu, 0.5, dt) >= \
                    qpi_exact_amplification(mu, 0.5, dt) - 1e-12

    def test_paper_condition_not_conservative_near_zero_drift(self):
        # the published quotient accounts for the two-step increment with
        # variance dt instead of 2*dt, so near mu = 0 it sits BELOW the
        # exact second-moment factor: 1 + sigma^2*dt vs 1 + 2*sigma^2*dt
        assert qpi_paper_lhs(0.0, 0.5, 0.5) < qpi_exact_amplification(0.0, 0.5, 0.5)
        assert qpi_paper_lhs(-0.2, 0.5, 0.5) < qpi_exact_amplification(-0.2, 0.5, 0.5)


class TestReferenceAmplifications:
    def test_iem_values(self):
        assert iem_amplification(-1.0, 0.5, 0.5) == pytest.approx(0.5, rel=1e-14)
        assert iem_amplification(0.0, 0.5, 0.5) == pytest.approx(1.125, rel=1e-14)
        assert iem_amplification(-2.0, 0.0, 0.3) < 1.0

    def test_iem_singular(self):
        with pytest.raises(SingularStepError):
            iem_amplification(2.0, 0.5, 0.5)

    def test_milstein_values(self):
        assert milstein_amplification(-1.0, 0.5, 0.5) == \
            pytest.approx(0.3828125, rel=1e-14)
        assert milstein_amplification(0.0, 1.0, 0.1) == \
            pytest.approx(1.105, rel=1e-14)
        assert milstein_amplification(-0.5, 0.0, 0.2) == \
            pytest.approx(0.81, rel=1e-14)

    def test_milstein_sign_insensitive(self):
        a = milstein_amplification(-1.0, 0.7, 0.3, "standard")
        b = milstein_amplification(-1.0, 0.7, 0.3, "paper")
        assert a == b

    def test_milstein_mc(self):
        rng = np.random.default_rng(3)
        mu, sigma, dt = -1.0, 0.5, 0.25
        dw = rng.normal(0.0, np.sqrt(dt), 10**6)
        m = 1 + mu * dt + sigma * dw + 0.5 * sigma**2 * (dw * dw - dt)
        m2 = m * m
        se = m2.std() / 1000
        assert abs(milstein_amplification(mu, sigma, dt) - m2.mean()) <= 4 * se


class TestEvaluateAndScan:
    def test_evaluate_condition(self):
        v = evaluate_condition("qpi-paper", -1.0, 0.5, 0.5)
        assert v.stable and v.lhs == pytest.approx(0.2909, rel=1e-3)
        assert not evaluate_condition("qpi-exact", 0.0, 0.5, 0.5).stable
        with pytest.raises(InvalidInputError):
            evaluate_condition("nope", -1.0, 0.5, 0.5)

    def test_scan_zero_drift_row_unstable(self):
        for cond in ("qpi-paper", "qpi-exact"):
            grid = region_scan(cond, 0.5, (-1.0, 1.0), (0.05, 1.0), 21)
            i = np.argmin(np.abs(grid.mu_axis))
            assert grid.mu_axis[i] == 0.0
            assert not grid.verdicts[i].any()

    def test_scan_iem_deterministic_half_plane(self):
        grid = region_scan("iem", 0.0, (-4.0, -0.1), (0.05, 1.0), 15)
        assert grid.verdicts.all()

    def test_scan_qpi_paper_cells(self):
        grid = region_scan("qpi-paper", 0.5, (-2.0, 2.0), (0.25, 0.75), 5)
        i = int(np.argmin(np.abs(grid.mu_axis - (-1.0))))
        j = int(np.argmin(np.abs(grid.dt_axis - 0.5)))
        assert grid.mu_axis[i] == -1.0 and grid.dt_axis[j] == 0.5
        assert grid.verdicts[i, j]
        k = int(np.argmin(np.abs(grid.mu_axis - 1.0)))
        assert not grid.verdicts[k, j]

    def test_scan_validation(self):
        with pytest.raises(InvalidInputError):
            region_scan("iem", 0.5, (1.0, -1.0), (0.1, 1.0), 10)
        with pytest.raises(InvalidInputError):
            region_scan("iem", 0.5, (-1.0, 1.0), (-0.1, 1.0), 10)
        with pytest.raises(InvalidInputError):
            region_scan("iem", 0.5, (-1.0, 1.0), (0.1, 1.0), 1)
        with pytest.raises(InvalidInputError):
            region_scan("bogus", 0.5, (-1.0, 1.0), (0.1, 1.0), 10)

    def test_scan_singular_point_marked_unstable(self):
        # iem singular at mu*dt = 1: mu=2, dt=0.5 lies on this grid
        grid = region_scan("iem", 0.5, (0.0, 4.0), (0.25, 0.75), 3)
        i = int(np.argmin(np.abs(grid.mu_axis - 2.0)))
        j = int(np.argmin(np.abs(grid.dt_axis - 0.5)))
        assert np.isnan(grid.lhs[i, j])
        assert not grid.verdicts[i, j]

    def test_csv_output(self):
        grid = region_scan("qpi-paper", 0.5, (-2.0, 0.0), (0.1, 0.5), 4)
        text = region_to_csv(grid)
        lines = text.strip().split("\n")
        assert lines[0] == "mu,dt,lhs,stable"
        assert len(lines) == 17
        fields = lines[1].split(",")
        assert len(fields) == 4
        assert fields[3] in ("0", "1")

    def test_svg_output(self):
        grid = region_scan("qpi-paper", 0.5, (-2.0, 0.0), (0.1, 0.5), 8)
        text = region_to_svg(grid)
        root = ET.fromstring(text)
        assert root.tag.endswith("svg")
        assert "qpi-paper" in text and "sigma=0.5" in text
        # at least one shaded cell plus axes
        assert text.count("<rect") >= 2
        assert text.count("<line") >= 2
