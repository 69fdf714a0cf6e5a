import numpy as np
import pytest

from src.exceptions import CalibrationError, SpecError, TableDomainError
from src.fixedb_limits import (
    DESK_SCALE, LimitKind, LimitSimConfig, blocks_per_sample, cv_lookup, fit_cv_poly, load_cv_table,
    path_quantile, simulate_G, simulate_G_grid, simulate_G_sample, simulate_Gk_sample,
    simulate_H, simulate_H_pair, simulate_H_sample, write_cv_table,
)

TINY = LimitSimConfig(paths=120, grid_n=200, boot_draws=40, seed=5, chunk=32)
TABLE_B = [round(0.01 * i, 2) for i in range(1, 21)]


@pytest.mark.parametrize("kind, alpha, b, expected", [
    ("G", 0.05, 0.10, 0.025785),
    ("Gtilde", 0.05, 0.10, 0.017104),
    ("H", 0.05, 0.10, 0.021456),
    ("Htilde", 0.05, 0.10, 0.031414),
    ("Gtilde", 0.10, 0.05, 0.082553),
])
def test_cv_lookup_evaluates_stored_polynomials(kind, alpha, b, expected):
    assert cv_lookup(kind, alpha, b) == pytest.approx(expected, abs=1e-6)


def test_cv_lookup_tends_to_alpha():
    for kind in LimitKind:
        assert cv_lookup(kind, 0.05, 1e-12) == pytest.approx(0.05)


def test_stored_levels_are_below_alpha_on_the_fitted_grid():
    table = load_cv_table()
    assert len(table) == 8
    for (kind, alpha), fit in table.items():
        assert fit.a0 == float(alpha)
        for b in TABLE_B:
            assert fit(b) < float(alpha)
            if b <= 0.16:
                assert cv_lookup(kind, alpha, b) > 0


def test_stored_fit_turns_nonpositive_near_the_table_edge():
    # the symmetric subsampling fit at alpha = 0.05 crosses zero just below b = 0.18
    with pytest.raises(CalibrationError):
        cv_lookup(LimitKind.GTILDE, 0.05, 0.19)
    assert cv_lookup(LimitKind.GTILDE, 0.05, 0.17) > 0


@pytest.mark.parametrize("alpha, b", [(0.01, 0.1), (0.05, 0.0), (0.05, 0.25), (0.05, -0.1)])
def test_cv_lookup_domain(alpha, b):
    with pytest.raises(TableDomainError):
        cv_lookup(LimitKind.G, alpha, b)


def test_cv_lookup_rejects_nonpositive_levels(tmp_path):
    path = tmp_path / "table.csv"
    path.write_text("kind,alpha,a0,a1,a2,r2\nG,0.05,0.05,-1.0,0.0,0.9\n", encoding="utf-8")
    with pytest.raises(CalibrationError):
        cv_lookup("G", 0.05, 0.1, load_cv_table(path))


def test_table_file_round_trip(tmp_path):
    table = load_cv_table()
    path = tmp_path / "copy.csv"
    write_cv_table(table.values(), path)
    assert path.read_text(encoding="utf-8").splitlines()[0] == "kind,alpha,a0,a1,a2,r2"
    assert load_cv_table(path) == table


def test_fit_recovers_exact_quadratic():
    b = np.array(TABLE_B)
    fit = fit_cv_poly(b, 0.05 - 0.2 * b + 0.3 * b ** 2, 0.05, "G")
    assert fit.kind is LimitKind.G
    assert fit.a0 == 0.05
    assert fit.a1 == pytest.approx(-0.2, abs=1e-10)
    assert fit.a2 == pytest.approx(0.3, abs=1e-10)
    assert fit.r2 == pytest.approx(1.0, abs=1e-10)
    assert fit(0.1) == pytest.approx(0.033)


def test_fit_constant_values():
    fit = fit_cv_poly(TABLE_B, [0.05] * 20, 0.05)
    assert fit.a1 == 0 and fit.a2 == 0 and fit.r2 == 0


@pytest.mark.parametrize("b, cv", [([0.1], [0.03]), ([0.1, 0.1, 0.1], [0.03, 0.02, 0.04]), ([0.1, 0.2], [0.1])])
def test_fit_rejects_degenerate_designs(b, cv):
    with pytest.raises(CalibrationError):
        fit_cv_poly(b, cv, 0.05)


def test_g_samples_are_averages_of_indicators():
    samples = simulate_G_grid([0.05, 0.1], TINY)
    for (kind, b), values in samples.items():
        assert values.shape == (TINY.paths,)
        assert np.all((values >= 0) & (values <= 1))
        # grid average over grid_n - lag + 1 points
        lag = round(b * TINY.grid_n)
        np.testing.assert_allclose(values * (TINY.grid_n - lag + 1), np.round(values * (TINY.grid_n - lag + 1)))
    assert set(k for k, _ in samples) == {LimitKind.G, LimitKind.GTILDE}


def test_paths_do_not_depend_on_chunking_or_workers():
    a = simulate_G_sample(0.1, LimitKind.G, TINY)
    b = simulate_G_sample(0.1, LimitKind.G, TINY.scaled(chunk=7))
    c = simulate_G_sample(0.1, LimitKind.G, TINY.scaled(workers=2))
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(a, c)


def test_gk_with_unit_sigma_is_gtilde():
    gk = simulate_Gk_sample(0.1, 1, [[1.0]], TINY)
    gt = simulate_G_sample(0.1, LimitKind.GTILDE, TINY)
    np.testing.assert_array_equal(gk, gt)


@pytest.mark.parametrize("k, sigma", [(1, [[1.0]]), (2, np.eye(2)), (2, [[2.0, 0.5], [0.5, 1.0]])])
def test_gk_invariant_to_scaling_sigma(k, sigma):
    sigma = np.asarray(sigma, dtype=float)
    a = simulate_Gk_sample(0.1, k, sigma, TINY)
    b = simulate_Gk_sample(0.1, k, 4 * sigma, TINY)
    np.testing.assert_array_equal(a, b)


def test_gk_validates_sigma():
    with pytest.raises(SpecError):
        simulate_Gk_sample(0.1, 2, [[1.0, 2.0], [2.0, 1.0]], TINY)
    with pytest.raises(SpecError):
        simulate_Gk_sample(0.1, 2, [[1.0]], TINY)


def test_h_samples():
    pair = simulate_H_pair(0.2, TINY)
    for values in pair.values():
        assert values.shape == (TINY.paths,)
        assert np.all((values >= 0) & (values <= 1))
        np.testing.assert_allclose(values * TINY.boot_draws, np.round(values * TINY.boot_draws))
    np.testing.assert_array_equal(simulate_H_sample(0.2, "Htilde", TINY), pair[LimitKind.HTILDE])


def test_h_needs_integer_block_count():
    assert blocks_per_sample(0.05) == 20
    with pytest.raises(SpecError):
        blocks_per_sample(0.3)
    with pytest.raises(SpecError):
        simulate_H_sample(0.15, LimitKind.H, TINY)
    with pytest.raises(SpecError):
        simulate_H_sample(0.1, LimitKind.G, TINY)


def test_window_must_cover_a_grid_step():
    with pytest.raises(SpecError):
        simulate_G_sample(0.001, LimitKind.G, TINY)
    with pytest.raises(SpecError):
        simulate_G_sample(1.5, LimitKind.G, TINY)


def test_path_quantile():
    assert path_quantile([0.3, 0.1, 0.2, 0.4], 0.5) == 0.2
    assert path_quantile([0.3, 0.1, 0.2, 0.4], 0.05) == 0.1


@pytest.mark.slow
@pytest.mark.parametrize("kind, expected", [(LimitKind.G, 0.0258), (LimitKind.GTILDE, 0.0171)])
def test_simulated_quantile_near_table(kind, expected):
    assert simulate_G(0.1, 0.05, kind, DESK_SCALE) == pytest.approx(expected, abs=0.01)


@pytest.mark.slow
@pytest.mark.parametrize("kind, expected, tol", [
    (LimitKind.H, 0.0215, 0.008),
    (LimitKind.HTILDE, 0.0314, 0.010),
])
def test_simulated_bootstrap_quantile_near_table(kind, expected, tol):
    assert simulate_H(0.1, 0.05, kind, DESK_SCALE) == pytest.approx(expected, abs=tol)


@pytest.mark.slow
def test_quantile_error_shrinks_with_more_paths():
    # standard error scales as paths ** -1/2, so doubling paths divides it by sqrt(2)
    base = LimitSimConfig(paths=1000, grid_n=2000)
    spread = {}
    for paths in (1000, 2000):
        quantiles = [
            simulate_G(0.1, 0.05, LimitKind.G, base.scaled(paths=paths, seed=seed)) for seed in range(40)
        ]
        spread[paths] = np.std(quantiles, ddof=1)
    ratio = spread[1000] / spread[2000]
    assert np.sqrt(2) / 1.6 <= ratio <= np.sqrt(2) * 1.6


@pytest.mark.slow
def test_two_dimensional_quantile_stable_across_seeds():
    cfg = DESK_SCALE.scaled(paths=20000)
    a = path_quantile(simulate_Gk_sample(0.1, 2, np.eye(2), cfg), 0.05)
    b = path_quantile(simulate_Gk_sample(0.1, 2, np.eye(2), cfg.scaled(seed=1)), 0.05)
    assert abs(a - b) < 0.01
