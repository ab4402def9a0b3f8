"""Fourth-moment statistic, norm decomposition, indicator test, experiments."""

import json

import numpy as np
import pytest

from freechaos import (
    GridKernel,
    IdentityMismatchError,
    MirrorSymmetryError,
    convergence_experiment,
    fourth_moment_identity,
    fourth_moment_statistic,
    hyperdiagonal_family,
    identity_terms,
    indicator_characterization,
    indicator_family,
    norm2,
    perturbed_indicator_family,
    transfer_experiment,
)

from conftest import rel_close


def test_statistic_indicator_values():
    for bins in (1, 4, 8):
        f = GridKernel.indicator(bins)
        lam = float(bins)
        assert rel_close(fourth_moment_statistic(f), 2 * lam * lam - lam)


def test_statistic_wigner_indicator():
    f = GridKernel.indicator(1)
    # even moments 2*lam^2 and 0 at order 3, so the statistic is 2
    assert rel_close(fourth_moment_statistic(f, "wigner"), 2.0)


def test_identity_indicator_all_terms_vanish():
    for bins in (1, 4, 8):
        rep = fourth_moment_identity(GridKernel.indicator(bins))
        lam = float(bins)
        assert rel_close(rep.lhs, 2 * lam * lam)
        assert rep.terms == {"star_1_minus_f": pytest.approx(0.0, abs=1e-15)}
        assert abs(rep.delta) <= 1e-12 * max(1.0, rep.lhs)


def test_identity_doubled_indicator_residual():
    # f = 2 on a single unit cell: star_1(f, f) - f = 2 on that cell
    f = GridKernel(1, 1, 1.0, np.array([2.0]))
    rep = fourth_moment_identity(f)
    assert rel_close(rep.lam, 4.0)
    assert rel_close(rep.terms["star_1_minus_f"], 4.0)
    assert rel_close(rep.rhs, 2 * 16.0 + 4.0)


def test_identity_term_labels_by_parity():
    f3 = GridKernel.random_mirror_symmetric(3, 2, 0.9, 50)
    assert set(identity_terms(f3)) == {"star_2_minus_f", "arc_1", "arc_2", "star_1", "star_3"}
    f2 = GridKernel.random_mirror_symmetric(2, 2, 0.9, 51)
    assert set(identity_terms(f2)) == {"arc_1_minus_f", "star_1", "star_2"}
    f4 = GridKernel.random_mirror_symmetric(4, 2, 0.9, 52)
    assert set(identity_terms(f4)) == {
        "arc_2_minus_f", "arc_1", "arc_3", "star_1", "star_2", "star_3", "star_4"
    }


def test_identity_random_kernels_both_parities():
    for q, bins, seeds in [(1, 5, range(60, 64)), (2, 3, range(64, 68)), (3, 2, range(68, 72))]:
        for seed in seeds:
            f = GridKernel.random_mirror_symmetric(q, bins, 0.8, seed)
            rep = fourth_moment_identity(f)
            assert all(v >= -1e-15 for v in rep.terms.values())
            assert abs(rep.delta) <= 1e-9 * max(1.0, abs(rep.lhs))


def test_identity_rejects_bad_kernels():
    asym = GridKernel(2, 2, 1.0, np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(MirrorSymmetryError):
        fourth_moment_identity(asym)
    with pytest.raises(ValueError):
        fourth_moment_identity(GridKernel.zeros(1, 3, 1.0))


def test_identity_report_dict_shape():
    d = fourth_moment_identity(GridKernel.indicator(2)).to_dict()
    assert set(d) == {"q", "lambda", "lhs", "rhs", "delta", "terms"}
    assert d["q"] == 1 and d["lambda"] == 2.0


def test_indicator_characterization_accepts_indicator():
    rep = indicator_characterization(GridKernel.indicator(5, cells=[0, 2, 3]))
    assert rep.is_indicator and rep.moments_match
    assert rel_close(rep.lam, 3.0)
    assert rep.max_gap <= 1e-9


def test_indicator_characterization_rejects_doubled_kernel():
    f = GridKernel(1, 1, 1.0, np.array([2.0]))
    rep = indicator_characterization(f)
    assert not rep.is_indicator and not rep.moments_match
    # third moment is 8, the rate-4 oracle gives 4
    assert rel_close(rep.moments[2], 8.0)
    assert rel_close(rep.oracle[2], 4.0)
    assert rep.max_gap > 1e-6


def test_indicator_characterization_rejects_half_height():
    f = GridKernel(1, 2, 1.0, np.array([0.5, 0.5]))
    rep = indicator_characterization(f)
    assert not rep.is_indicator and not rep.moments_match
    assert rep.max_gap > 1e-6


def test_indicator_characterization_verdicts_agree_on_random_kernels():
    rng = np.random.default_rng(7)
    for _ in range(6):
        vals = rng.uniform(0.2, 1.8, size=4)
        rep = indicator_characterization(GridKernel(1, 4, 1.0, vals.astype(np.complex128)))
        assert rep.is_indicator == rep.moments_match


def test_indicator_characterization_input_checks():
    with pytest.raises(ValueError):
        indicator_characterization(GridKernel(2, 2, 1.0, np.ones((2, 2))))
    with pytest.raises(ValueError):
        indicator_characterization(GridKernel(1, 2, 1.0, np.array([1j, 0.0])))


def test_indicator_family_is_constant():
    fam = indicator_family(4, cells=[1, 3])
    assert fam.label == "indicator"
    assert np.array_equal(fam.kernel_at(1).values, fam.kernel_at(9).values)


def test_perturbed_family_shrinks_towards_indicator():
    fam = perturbed_indicator_family(bins=4, eps0=0.5, rho=0.5, seed=0)
    base = np.ones(4)
    gap1 = float(np.max(np.abs(fam.kernel_at(1).values - base)))
    gap6 = float(np.max(np.abs(fam.kernel_at(6).values - base)))
    assert gap6 < gap1 / 16
    # the perturbation integrates to zero, so the rate matches at first order
    f = fam.kernel_at(3)
    assert abs(float(np.sum(f.values.real - 1.0))) <= 1e-12


def test_hyperdiagonal_family_shape():
    fam = hyperdiagonal_family(q=2, spread=1.0, height=3.0)
    f = fam.kernel_at(4)
    assert f.bins == 4 and f.cell_width == 0.25
    assert f.values[1, 1] == 3.0 and f.values[0, 1] == 0.0
    assert rel_close(norm2(f), 9.0 / 4.0)
    with pytest.raises(ValueError):
        hyperdiagonal_family(q=0)
    with pytest.raises(ValueError):
        fam.kernel_at(0)


def test_convergence_indicator_family_is_exact():
    series = convergence_experiment(indicator_family(5), 3)
    assert series.q == 1 and series.converged
    assert series.final_statistic_gap == 0.0
    assert series.final_moment_gap == 0.0
    for rec in series.records:
        assert rec.lam == 5.0
        assert rel_close(rec.statistic, 45.0)


def test_convergence_perturbed_family_meets_threshold():
    series = convergence_experiment(perturbed_indicator_family(), 8)
    assert series.converged
    assert series.final_statistic_gap < 1e-2
    assert series.final_moment_gap < 1e-2
    deltas = [abs(r.delta) for r in series.records]
    assert deltas[-1] < deltas[0]


def test_convergence_hyperdiagonal_gaps_shrink():
    series = convergence_experiment(hyperdiagonal_family(q=2), 5)
    assert series.q == 2
    assert abs(series.records[-1].delta) < abs(series.records[0].delta)
    assert series.records[-1].moment_gap < series.records[0].moment_gap
    # five refinement steps are not yet below the default threshold
    assert not series.converged


def test_convergence_series_serialization():
    series = convergence_experiment(indicator_family(2), 2)
    d = series.to_dict()
    assert d["family"] == "indicator" and len(d["records"]) == 2
    assert json.dumps(d, sort_keys=True)  # payload is json-serializable
    csv_text = series.to_csv()
    lines = csv_text.strip().split("\n")
    assert lines[0].startswith("step,lambda,statistic,target,delta")
    assert len(lines) == 3
    assert series.to_csv() == csv_text


def test_convergence_input_checks():
    with pytest.raises(ValueError):
        convergence_experiment(indicator_family(2), 0)
    with pytest.raises(ValueError):
        convergence_experiment(indicator_family(2), 1, moment_order=0)


def test_transfer_unit_rate_rows():
    rep = transfer_experiment(GridKernel.indicator(1), 6)
    assert rep.q == 1 and rep.lam == 1.0
    poisson = tuple(r.poisson for r in rep.rows)
    wigner = tuple(r.wigner for r in rep.rows)
    assert np.allclose(poisson, (0, 1, 1, 3, 6, 15), atol=1e-12)
    assert np.allclose(wigner, (0, 1, 0, 2, 0, 5), atol=1e-12)
    for r in rep.rows:
        assert r.poisson_gap <= 1e-12 and r.wigner_gap <= 1e-12


def test_transfer_rows_match_oracles_at_other_rates():
    rep = transfer_experiment(GridKernel.indicator(4), 5)
    for r in rep.rows:
        assert r.poisson_gap <= 1e-9 * max(1.0, abs(r.poisson_oracle))
        assert r.wigner_gap <= 1e-9 * max(1.0, abs(r.wigner_oracle))


def test_transfer_serialization():
    rep = transfer_experiment(GridKernel.indicator(2), 3)
    d = rep.to_dict()
    assert d["lambda"] == 2.0 and len(d["rows"]) == 3
    lines = rep.to_csv().strip().split("\n")
    assert lines[0] == "m,poisson,wigner,poisson_oracle,wigner_oracle,poisson_gap,wigner_gap"
    assert len(lines) == 4


def test_transfer_input_checks():
    with pytest.raises(ValueError):
        transfer_experiment(GridKernel.indicator(2), 0)
    with pytest.raises(ValueError):
        transfer_experiment(GridKernel.zeros(1, 2, 1.0), 3)


def test_statistic_rejects_complex_statistic():
    # a kernel engineered to give a complex diagram moment never reaches the
    # statistic because the engines demand mirror symmetry upstream
    asym = GridKernel(1, 2, 1.0, np.array([1j, 0.0]))
    with pytest.raises((MirrorSymmetryError, IdentityMismatchError)):
        fourth_moment_statistic(asym)
