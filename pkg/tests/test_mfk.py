import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfkrig import (Dataset, KernelConfig, SearchConfig, check_nesting, fit_kriging, fit_mfk,
                    forrester, forrester_datasets, predict_mfk, rmsd)
from mfkrig.data import LfFormula, SplitSpec, generate_lf, split_dataset, u3si2_analogue
from mfkrig.errors import (InputShapeError, InsufficientDataError, InvalidArgumentError,
                           NestingError)
from mfkrig.gp import GlsFactor, KrigingModel
from mfkrig.mfk import MfkLevel, MfkModel, Variant

# dense 201-point grid RMSD of the two-level Forrester model, default search
FORRESTER_MFK_RMSD = 0.057228785599905775

EXACT = SearchConfig(nugget=0.0)


def lf_hf(f_lo, f_hi, n_lf=11, hf_x=(0.0, 0.3, 0.7, 1.0)):
    xl = np.linspace(0, 1, n_lf)
    xh = np.asarray(hf_x)
    return Dataset(xl, f_lo(xl), fidelity=1), Dataset(xh, f_hi(xh), fidelity=2)


def test_check_nesting_examples():
    lf = Dataset([[300.0], [500.0], [700.0]], [0, 0, 0], fidelity=1)
    assert check_nesting(lf, Dataset([[300.0], [700.0]], [0, 0]), 0.0).satisfied
    rep = check_nesting(Dataset([[300.0], [500.0]], [0, 0], fidelity=1),
                        Dataset([[400.0]], [0]), 0.0)
    assert not rep.satisfied and rep.missing_points == ((400.0,),)
    near = Dataset([[300.0005], [500.0]], [0, 0], fidelity=1)
    assert check_nesting(near, Dataset([[300.0]], [0]), 1e-3).satisfied
    assert not check_nesting(near, Dataset([[300.0]], [0]), 1e-4).satisfied
    with pytest.raises(InputShapeError):
        check_nesting(lf, Dataset(np.zeros((2, 2)), [0, 0]), 0.0)


def test_affine_relation_recovers_rho():
    lf, hf = lf_hf(lambda x: np.sin(5 * x) + x, lambda x: 2 * (np.sin(5 * x) + x))
    model = fit_mfk([lf, hf], search=EXACT)
    assert model.rho[0] == pytest.approx(2.0, abs=1e-6)
    top = model.levels[-1]
    assert top.sigma2 < 1e-12
    xq = np.linspace(0.05, 0.95, 7)
    levels = model.predict_levels(xq)
    np.testing.assert_allclose(levels[1][0], 2 * levels[0][0], atol=1e-6)


def test_no_discrepancy():
    lo = lambda x: np.cos(3 * x) + 0.5 * x  # noqa: E731
    lf, hf = lf_hf(lo, lo)
    model = fit_mfk([lf, hf], search=EXACT)
    assert model.rho[0] == pytest.approx(1.0, abs=1e-6)
    g = np.linspace(0, 1, 41)
    levels = model.predict_levels(g)
    np.testing.assert_allclose(levels[1][2], 0.0, atol=1e-6)
    np.testing.assert_allclose(levels[1][0], levels[0][0], atol=1e-6)


def test_forrester_beats_hf_only_kriging():
    lf, hf = forrester_datasets()
    g = np.linspace(0, 1, 201)
    truth = forrester(g, "high")
    e_mfk = rmsd(fit_mfk([lf, hf]).predict(g).mean, truth)
    e_krg = rmsd(fit_kriging(hf).predict(g).mean, truth)
    assert e_mfk < e_krg
    assert e_mfk == pytest.approx(FORRESTER_MFK_RMSD, abs=1e-6)


def test_top_level_interpolation():
    lf, hf = forrester_datasets()
    model = fit_mfk([lf, hf], search=EXACT)
    p = predict_mfk(model, hf.X)
    np.testing.assert_allclose(p.mean, hf.y, atol=1e-6)
    assert np.all(p.variance < 1e-8 * max(lev.sigma2 for lev in model.levels))


def _fixed_level(data, beta, sigma2=0.0):
    kern = KernelConfig("squared_exponential", [5.0])
    n = data.n
    factor = GlsFactor(np.eye(n), np.zeros((n, len(beta))), np.asarray(beta, float),
                       np.zeros(n), sigma2, 0.0, np.zeros((len(beta), len(beta))))
    return MfkLevel(data, kern, 0.0, factor)


def test_identity_recursion_is_exact():
    lf, hf = forrester_datasets()
    base = KrigingModel.from_hyperparameters(lf, KernelConfig("squared_exponential", [20.0]),
                                             1e-10)
    level1 = MfkLevel(lf, base.params.kernel, base.params.nugget, base.factor)
    model = MfkModel((level1, _fixed_level(hf, [1.0, 0.0])))
    g = np.linspace(0, 1, 33)
    a, b = model.predict(g), base.predict(g)
    assert np.array_equal(a.mean, b.mean)
    assert np.array_equal(a.variance, b.variance)


def test_mean_decomposition_and_variance_dominance():
    lf, hf = forrester_datasets()
    model = fit_mfk([lf, hf])
    g = np.linspace(-0.0, 1.0, 97)
    (m1, v1, _), (m2, v2, d2) = model.predict_levels(g)
    rho = model.rho[0]
    np.testing.assert_allclose(m2 - rho * m1, d2, atol=1e-10 * (1 + np.max(np.abs(m2))))
    assert np.all(v2 >= rho ** 2 * v1 - 1e-8)


def test_hf_equal_lf_matches_plain_kriging():
    x = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    y = np.sin(4 * x)
    lf = Dataset(x, y, fidelity=1)
    hf = Dataset(x, y, fidelity=2)
    g = np.linspace(0, 1, 51)
    a = fit_mfk([lf, hf]).predict(g).mean
    b = fit_kriging(hf).predict(g).mean
    np.testing.assert_allclose(a, b, atol=1e-6)


def test_pls_variants_equal_mfk_in_one_dimension():
    lf, hf = forrester_datasets()
    g = np.linspace(0, 1, 101)
    preds = {v: fit_mfk([lf, hf], v).predict(g) for v in Variant}
    for v in (Variant.MFK_PLS, Variant.MFK_PLSK):
        np.testing.assert_allclose(preds[v].mean, preds[Variant.MFK].mean, atol=1e-5)
    assert Variant.parse("MFK-KPLS") is Variant.MFK_PLS


def test_pls_variant_in_two_dimensions():
    rng = np.random.default_rng(4)
    Xl = rng.uniform(size=(30, 2))
    f_lo = lambda X: np.sin(3 * X[:, 0]) + 0.2 * X[:, 1]  # noqa: E731
    f_hi = lambda X: 1.5 * f_lo(X) + 0.3 * X[:, 0]  # noqa: E731
    Xh = Xl[:8]
    lf, hf = Dataset(Xl, f_lo(Xl), fidelity=1), Dataset(Xh, f_hi(Xh), fidelity=2)
    Xq = rng.uniform(size=(50, 2))
    for v in Variant:
        model = fit_mfk([lf, hf], v, n_components=1)
        top = model.levels[-1].kernel
        if v is Variant.MFK_PLS:
            assert top.projection is not None and top.theta.size == 1
        else:
            assert top.projection is None and top.theta.size == 2
        assert rmsd(model.predict(Xq).mean, f_hi(Xq)) < 0.1


def test_strict_nesting_and_relaxation():
    lf = Dataset(np.linspace(0, 1, 6), np.linspace(0, 1, 6) ** 2, fidelity=1)
    hf = Dataset([[0.0], [0.45], [1.0]], [0.1, 0.3, 1.2])
    with pytest.raises(NestingError) as info:
        fit_mfk([lf, hf])
    assert info.value.report.missing_points == ((0.45,),)
    model = fit_mfk([lf, hf], strict_nesting=False)
    rep = model.nesting_report
    assert rep.relaxed and not rep.satisfied
    assert np.all(np.isfinite(model.predict([[0.3]]).mean))


def test_three_levels():
    f1 = lambda x: np.sin(6 * x)  # noqa: E731
    f2 = lambda x: 1.2 * f1(x) + 0.3 * x  # noqa: E731
    f3 = lambda x: 0.8 * f2(x) - 0.5 + 0.2 * x ** 2  # noqa: E731
    x1 = np.linspace(0, 1, 21)
    x2 = x1[::3]
    x3 = x2[::2]
    data = [Dataset(x1, f1(x1), fidelity=1), Dataset(x2, f2(x2), fidelity=2),
            Dataset(x3, f3(x3), fidelity=3)]
    model = fit_mfk(data, search=EXACT)
    assert len(model.rho) == 2
    p = model.predict(x3)
    np.testing.assert_allclose(p.mean, f3(x3), atol=1e-6)
    g = np.linspace(0, 1, 101)
    assert rmsd(model.predict(g).mean, f3(g)) < rmsd(fit_kriging(data[2]).predict(g).mean,
                                                     f3(g))
    levels = model.predict_levels(g)
    for i in (1, 2):
        assert np.all(levels[i][1] >= model.rho[i - 1] ** 2 * levels[i - 1][1] - 1e-8)


def test_errors():
    lf, hf = forrester_datasets()
    with pytest.raises(InsufficientDataError):
        fit_mfk([hf])
    with pytest.raises(InsufficientDataError):
        fit_mfk([lf, hf.subset([0])])
    with pytest.raises(InvalidArgumentError):
        fit_mfk([hf, lf])
    with pytest.raises(InputShapeError):
        fit_mfk([lf, hf]).predict(np.zeros((2, 2)))


def test_monotone_transfer_on_analogue_demo():
    hf = u3si2_analogue()
    train, _ = split_dataset(hf, SplitSpec(0.3, 42))
    grid = np.unique(np.concatenate([np.arange(300.0, 1501.0, 50.0), train.X[:, 0]]))
    lf = generate_lf(LfFormula.white(), grid)
    model = fit_mfk([lf, train], search=SearchConfig(seed=42))
    g = np.linspace(train.X.min(), train.X.max(), 400)
    (m1, _, _), (m2, _, _) = model.predict_levels(g)
    rising = np.diff(m1) > 0
    assert np.all(rising)
    assert np.all(np.diff(m2)[rising] > 0)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_variance_dominance_random_queries(seed):
    rng = np.random.default_rng(seed)
    lf, hf = lf_hf(lambda x: np.cos(4 * x), lambda x: 1.3 * np.cos(4 * x) + x ** 2)
    model = fit_mfk([lf, hf], search=SearchConfig(seed=int(rng.integers(100)), n_restarts=3))
    g = rng.uniform(-0.5, 1.5, 40)
    (m1, v1, _), (m2, v2, _) = model.predict_levels(g)
    assert np.all(v2 >= model.rho[0] ** 2 * v1 - 1e-8)
    assert np.all(v2 >= 0)
