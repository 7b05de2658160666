import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import mp_log_product, welford
from pgrdrc import density
from pgrdrc.dataset import Dataset, GridSample
from pgrdrc.density import (
    DensityModel,
    GaussianParams,
    fit,
    load_model,
    log_density,
    pdf_single,
    predict,
    save_model,
    score,
)
from pgrdrc.errors import (
    DatasetError,
    InputError,
    ModelFormatError,
    ThresholdNotSetError,
    TransformDomainError,
)
from pgrdrc.gaussianize import IDENTITY, TransformSpec


def _model(mus, s2s, names=None, eps=None, transforms=None):
    names = names or [f"f{k}" for k in range(len(mus))]
    return DensityModel(
        Dataset(names, [[0.0] * len(names)]).schema,
        {n: (transforms or {}).get(n, IDENTITY) for n in names},
        {n: GaussianParams(m, s) for n, m, s in zip(names, mus, s2s)},
        log_epsilon=eps,
    )


class TestPdf:
    def test_standard_normal_peak(self):
        assert pdf_single(0.0, GaussianParams(0.0, 1.0)) == pytest.approx(0.3989422804014327, abs=1e-15)

    @pytest.mark.parametrize("mu, s2", [(0.0, 1.0), (3.5, 0.04), (-20.0, 9.0)])
    def test_peak_and_one_sigma(self, mu, s2):
        p = GaussianParams(mu, s2)
        peak = 1.0 / math.sqrt(2 * math.pi * s2)
        assert pdf_single(mu, p) == pytest.approx(peak, rel=1e-15)
        assert pdf_single(mu + math.sqrt(s2), p) == pytest.approx(math.exp(-0.5) * peak, rel=1e-14)

    @given(st.floats(-50, 50), st.floats(1e-4, 1e4))
    def test_normalization(self, mu, s2):
        p = GaussianParams(mu, s2)
        sd = math.sqrt(s2)
        xs = np.linspace(mu - 8 * sd, mu + 8 * sd, 100_001)
        assert abs(np.trapezoid(pdf_single(xs, p), xs) - 1.0) <= 1e-6

    @given(st.floats(-10, 10), st.floats(1e-3, 1e3), st.floats(-1e3, 1e3))
    def test_positive(self, mu, s2, x):
        v = pdf_single(mu + (x % 30) * math.sqrt(s2) / 10, GaussianParams(mu, s2))
        assert v > 0

    def test_params_validation(self):
        with pytest.raises(InputError):
            GaussianParams(0.0, 0.0)
        with pytest.raises(InputError):
            GaussianParams(float("nan"), 1.0)


class TestFit:
    def test_mle_arithmetic(self):
        m = fit(Dataset(["a"], [[1.0], [2.0], [3.0]]), transforms={"a": IDENTITY})
        assert m.params["a"].mu == 2.0
        assert m.params["a"].sigma2 == pytest.approx(2.0 / 3.0, rel=1e-15)
        assert m.log_epsilon is None

    def test_constant_feature_dropped(self):
        m = fit(Dataset(["a", "b"], [[5.0, 1.0], [5.0, 2.0], [5.0, 4.0]]))
        assert m.dropped == ("a",)
        assert m.active == ("b",)

    def test_all_constant_rejected(self):
        with pytest.raises(InputError, match="no active features"):
            fit(Dataset(["a"], [[5.0]] * 4))

    def test_rejects_positives_and_small(self):
        with pytest.raises(DatasetError, match="violation-free"):
            fit(Dataset(["a"], [[1.0], [2.0], [3.0]], labels=[0, 1, 0]))
        with pytest.raises(DatasetError, match="at least 3"):
            fit(Dataset(["a"], [[1.0], [2.0]]))

    def test_matches_streaming_oracle(self):
        rng = np.random.default_rng(2024)
        x = np.c_[rng.normal(3, 2, 5000), rng.lognormal(0.5, 0.7, 5000)]
        m = fit(Dataset(["a", "b"], x))
        for k, name in enumerate(("a", "b")):
            z = np.asarray(density.apply_array(m.transforms[name], x[:, k]))
            mean, var = welford(z)
            assert m.params[name].mu == pytest.approx(mean, rel=1e-9, abs=1e-12)
            assert m.params[name].sigma2 == pytest.approx(var, rel=1e-9)

    def test_variance_floor(self):
        x = [[1.0], [1.0 + 1e-9], [1.0]]
        m = fit(Dataset(["a"], x), transforms={"a": IDENTITY})
        assert m.params["a"].sigma2 == density.SIGMA2_FLOOR

    @given(st.integers(0, 2**31))
    def test_permutation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(50, 3)) * [1, 10, 0.1]
        a = fit(Dataset(["p", "q", "r"], x))
        b = fit(Dataset(["p", "q", "r"], rng.permutation(x)))
        for n in a.active:
            assert a.transforms[n] == b.transforms[n]
            assert b.params[n].mu == pytest.approx(a.params[n].mu, abs=1e-12)
            assert b.params[n].sigma2 == pytest.approx(a.params[n].sigma2, abs=1e-12)


class TestLogDensity:
    def test_two_standard_normals_at_origin(self):
        m = _model([0.0, 0.0], [1.0, 1.0])
        assert log_density(m, (0.0, 0.0)) == pytest.approx(-1.8378770664093453, abs=1e-15)

    def test_single_feature_reduces_to_pdf(self):
        p = GaussianParams(1.5, 0.3)
        m = _model([p.mu], [p.sigma2])
        assert log_density(m, GridSample((2.0,))) == pytest.approx(math.log(pdf_single(2.0, p)), abs=1e-15)

    def test_dropped_feature_contributes_nothing(self):
        m = fit(Dataset(["a", "b"], [[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]]), transforms={"b": IDENTITY})
        ref = _model([2.0], [2.0 / 3.0], names=["b"])
        assert log_density(m, (123.0, 2.5)) == pytest.approx(log_density(ref, (2.5,)), abs=1e-15)

    def test_matches_extended_precision_product(self, active_backend):
        rng = np.random.default_rng(77)
        for _ in range(200):
            d = int(rng.integers(1, 9))
            mus, s2s = rng.normal(0, 5, d), rng.uniform(0.05, 20, d)
            m = _model(mus.tolist(), s2s.tolist())
            x = mus + rng.normal(0, 3, d) * np.sqrt(s2s)
            want = mp_log_product(x, mus, s2s)
            assert abs(log_density(m, x.tolist()) - want) <= 1e-9
            ds = Dataset(m.schema, [x])
            assert abs(score(m, ds)[0] - want) <= 1e-9

    def test_no_underflow_where_product_does(self):
        m = _model([0.0] * 12, [1e-6] * 12)
        x = [0.05] * 12  # 50 sigma per feature
        naive = math.prod(pdf_single(v, GaussianParams(0.0, 1e-6)) for v in x)
        assert naive == 0.0
        s = log_density(m, x)
        assert math.isfinite(s)
        assert s == pytest.approx(mp_log_product(x, [0.0] * 12, [1e-6] * 12), rel=1e-12)

    @given(st.integers(0, 7), st.floats(0.01, 50), st.booleans())
    def test_unimodal(self, k, step, up):
        rng = np.random.default_rng(k)
        mus, s2s = rng.normal(size=8), rng.uniform(0.1, 3, 8)
        m = _model(mus.tolist(), s2s.tolist())
        base = mus.copy()
        near, far = base.copy(), base.copy()
        sign = 1 if up else -1
        near[k] += sign * step
        far[k] += sign * step * 2
        assert log_density(m, base) > log_density(m, near) > log_density(m, far)

    def test_schema_and_domain_errors(self):
        m = _model([0.0], [1.0], transforms={"f0": TransformSpec("sqrt")})
        with pytest.raises(DatasetError):
            log_density(m, (1.0, 2.0))
        with pytest.raises(TransformDomainError):
            log_density(m, (-1.0,))
        with pytest.raises(DatasetError, match="schema mismatch"):
            score(m, Dataset(["other"], [[1.0]]))


class TestPredict:
    def test_boundary_is_negative(self):
        m = _model([0.0], [1.0])
        s = log_density(m, (1.0,))
        assert predict(m.with_threshold(s), Dataset(m.schema, [[1.0]])).tolist() == [0]
        assert predict(m.with_threshold(math.nextafter(s, 0)), Dataset(m.schema, [[1.0]])).tolist() == [1]

    @pytest.mark.parametrize("eps", [-math.inf, -1.7976931348623157e308])
    def test_minimum_threshold_flags_nothing(self, eps):
        m = _model([0.0], [1.0], eps=eps)
        ds = Dataset(m.schema, [[0.0], [1e3], [-1e6]])
        assert predict(m, ds).tolist() == [0, 0, 0]

    def test_unset_threshold(self):
        with pytest.raises(ThresholdNotSetError, match="not tuned"):
            predict(_model([0.0], [1.0]), Dataset(["f0"], [[0.0]]))

    def test_order_preserved(self):
        m = _model([0.0], [1.0], eps=math.log(pdf_single(2.0, GaussianParams(0, 1))))
        ds = Dataset(m.schema, [[0.0], [3.0], [-1.0], [-2.5]])
        assert predict(m, ds).tolist() == [0, 1, 0, 1]


class TestPersistence:
    def _fitted(self):
        rng = np.random.default_rng(3)
        x = np.c_[rng.normal(size=200), rng.lognormal(size=200), np.full(200, 2.0)]
        return fit(Dataset(["a", "b", "c"], x)).with_threshold(-7.123456789012345), x

    def test_round_trip_bit_identical(self, tmp_path):
        m, x = self._fitted()
        save_model(m, tmp_path / "m.json")
        back = load_model(tmp_path / "m.json")
        assert back == m
        probe = Dataset(m.schema, x[:50] + 0.1)
        assert (score(back, probe) == score(m, probe)).all()

    def test_file_layout(self, tmp_path):
        m, _ = self._fitted()
        save_model(m, tmp_path / "m.json")
        doc = json.loads((tmp_path / "m.json").read_text())
        assert doc["format_version"] == "pgrdrc-model-v1"
        assert doc["schema"] == ["a", "b", "c"] and doc["dropped"] == ["c"]
        assert set(doc["features"]) == {"a", "b"}
        assert set(doc["features"]["a"]) == {"transform", "mu", "sigma2"}

    def _edit(self, tmp_path, fn):
        m, _ = self._fitted()
        save_model(m, tmp_path / "m.json")
        doc = json.loads((tmp_path / "m.json").read_text())
        fn(doc)
        (tmp_path / "m.json").write_text(json.dumps(doc))
        return tmp_path / "m.json"

    def test_version_mismatch(self, tmp_path):
        p = self._edit(tmp_path, lambda d: d.update(format_version=999))
        with pytest.raises(ModelFormatError, match="format_version"):
            load_model(p)

    def test_zero_sigma2(self, tmp_path):
        p = self._edit(tmp_path, lambda d: d["features"]["a"].update(sigma2=0))
        with pytest.raises(ModelFormatError, match="sigma2"):
            load_model(p)

    @pytest.mark.parametrize(
        "fn",
        [
            lambda d: d["features"].pop("a"),
            lambda d: d.update(schema=["a", "a", "c"]),
            lambda d: d["features"]["b"]["transform"].update(kind="cube"),
            lambda d: d.update(extra=1),
        ],
    )
    def test_corruption(self, tmp_path, fn):
        with pytest.raises(ModelFormatError):
            load_model(self._edit(tmp_path, fn))

    def test_unreadable(self, tmp_path):
        with pytest.raises(ModelFormatError):
            load_model(tmp_path / "missing.json")
        (tmp_path / "bad.json").write_text("{")
        with pytest.raises(ModelFormatError, match="line 1"):
            load_model(tmp_path / "bad.json")
