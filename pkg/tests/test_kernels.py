import numpy as np
import pytest

from actmap import _kernels
from actmap._kernels import _py


def kde_logpdf_oracle(support, queries, sigma):
    """Direct double-loop mixture evaluation in the probability domain."""
    n, d = support.shape
    norm = (2.0 * np.pi * sigma**2) ** (-d / 2.0)
    out = np.empty(len(queries))
    for j, y in enumerate(queries):
        dens = 0.0
        for a in support:
            dens += norm * np.exp(-np.sum((y - a) ** 2) / (2.0 * sigma**2))
        out[j] = np.log(dens / n)
    return out


@pytest.fixture(params=["active", "python"])
def backend(request):
    if request.param == "python":
        return _py
    return _kernels


class TestKdeLogpdf:
    def test_matches_double_loop(self, backend):
        rng = np.random.default_rng(42)
        support = rng.uniform(-1, 1, size=(40, 3))
        queries = rng.uniform(-1.2, 1.2, size=(25, 3))
        got = backend.kde_logpdf(support, queries, 0.1)
        want = kde_logpdf_oracle(support, queries, 0.1)
        assert np.abs(got - want).max() < 1e-12

    def test_single_point_is_gaussian(self, backend):
        support = np.array([[0.2, -0.3]])
        q = np.array([[0.5, 0.1]])
        sigma = 0.25
        want = -np.log(2 * np.pi * sigma**2) - np.sum((q[0] - support[0]) ** 2) / (
            2 * sigma**2
        )
        assert abs(backend.kde_logpdf(support, q, sigma)[0] - want) < 1e-13

    def test_far_query_stays_finite(self, backend):
        support = np.zeros((8, 2))
        q = np.array([[50.0, 50.0]])
        val = backend.kde_logpdf(support, q, 0.1)[0]
        assert np.isfinite(val)
        assert val < -1e4

    def test_density_integrates_to_one(self, backend):
        # 1-D grid quadrature over a wide interval
        rng = np.random.default_rng(3)
        support = rng.normal(0, 0.3, size=(15, 1))
        grid = np.linspace(-4, 4, 4001)[:, None]
        dens = np.exp(backend.kde_logpdf(support, grid, 0.2))
        integral = np.trapezoid(dens, grid[:, 0])
        assert abs(integral - 1.0) < 1e-6

    def test_backend_agreement(self):
        rng = np.random.default_rng(9)
        support = rng.uniform(-1, 1, size=(64, 4))
        queries = rng.uniform(-1, 1, size=(32, 4))
        a = _kernels.kde_logpdf(support, queries, 0.1)
        b = _py.kde_logpdf(support, queries, 0.1)
        assert np.abs(a - b).max() < 1e-10


class TestKdeSupportGrad:
    def test_matches_finite_differences(self, backend):
        rng = np.random.default_rng(5)
        support = rng.uniform(-1, 1, size=(12, 2))
        queries = rng.uniform(-1, 1, size=(7, 2))
        weights = rng.normal(size=7)
        sigma = 0.15

        def f(flat):
            s = flat.reshape(support.shape)
            return float(np.dot(weights, _py.kde_logpdf(s, queries, sigma)))

        got = backend.kde_support_grad(support, queries, sigma, weights)
        h = 1e-6
        base = support.ravel().copy()
        fd = np.zeros_like(base)
        for i in range(base.size):
            xp = base.copy()
            xp[i] += h
            xm = base.copy()
            xm[i] -= h
            fd[i] = (f(xp) - f(xm)) / (2 * h)
        assert np.abs(got.ravel() - fd).max() < 1e-6

    def test_grad_sums_to_zero_per_query(self, backend):
        # translating all support points shifts the mixture rigidly, so the
        # weighted log-density changes at rate sum_j w_j * (dlogq/dy) and the
        # support-side rows sum to minus that; with symmetric query = mean of
        # support the net drift vanishes
        rng = np.random.default_rng(8)
        support = rng.normal(size=(20, 3))
        queries = support.mean(axis=0, keepdims=True)
        g = backend.kde_support_grad(support, queries, 0.5, np.ones(1))
        # rigid-translation identity: column sums equal the negative
        # query-side gradient, computable directly
        diff = queries[0] - support
        soft = np.exp(-np.sum(diff**2, axis=1) / (2 * 0.5**2))
        soft = soft / soft.sum()
        query_grad = -(soft[:, None] * diff).sum(axis=0) / 0.5**2
        assert np.abs(g.sum(axis=0) - (-query_grad)).max() < 1e-12

    def test_backend_agreement(self):
        rng = np.random.default_rng(11)
        support = rng.uniform(-1, 1, size=(48, 5))
        queries = rng.uniform(-1, 1, size=(30, 5))
        w = rng.normal(size=30)
        a = _kernels.kde_support_grad(support, queries, 0.1, w)
        b = _py.kde_support_grad(support, queries, 0.1, w)
        assert np.abs(a - b).max() < 1e-10


class TestSegmentSphereClearances:
    def brute(self, pa, pb, rad, centers, cr):
        out = np.empty((len(pa), len(centers)))
        for i in range(len(pa)):
            ab = pb[i] - pa[i]
            denom = float(ab @ ab)
            for j, c in enumerate(centers):
                t = 0.0 if denom == 0 else np.clip((c - pa[i]) @ ab / denom, 0, 1)
                p = pa[i] + t * ab
                out[i, j] = np.linalg.norm(c - p) - rad[i] - cr[j]
        return out

    def test_matches_brute_force(self, backend):
        rng = np.random.default_rng(21)
        pa = rng.normal(size=(9, 3))
        pb = rng.normal(size=(9, 3))
        rad = rng.uniform(0.01, 0.2, size=9)
        centers = rng.normal(size=(14, 3))
        cr = rng.uniform(0.05, 0.3, size=14)
        got = backend.segment_sphere_clearances(pa, pb, rad, centers, cr)
        assert np.abs(got - self.brute(pa, pb, rad, centers, cr)).max() < 1e-12

    def test_degenerate_segment_is_point_distance(self, backend):
        p = np.array([[1.0, 2.0, 3.0]])
        got = backend.segment_sphere_clearances(
            p, p.copy(), np.array([0.1]), np.array([[1.0, 2.0, 4.0]]), np.array([0.2])
        )
        assert abs(got[0, 0] - (1.0 - 0.1 - 0.2)) < 1e-14

    def test_penetration_is_negative(self, backend):
        pa = np.array([[0.0, 0.0, 0.0]])
        pb = np.array([[1.0, 0.0, 0.0]])
        got = backend.segment_sphere_clearances(
            pa, pb, np.array([0.1]), np.array([[0.5, 0.05, 0.0]]), np.array([0.2])
        )
        assert got[0, 0] < 0

    def test_backend_agreement(self):
        rng = np.random.default_rng(30)
        pa = rng.normal(size=(8, 3))
        pb = rng.normal(size=(8, 3))
        rad = rng.uniform(0.01, 0.1, size=8)
        centers = rng.normal(size=(20, 3))
        cr = rng.uniform(0.02, 0.25, size=20)
        a = _kernels.segment_sphere_clearances(pa, pb, rad, centers, cr)
        b = _py.segment_sphere_clearances(pa, pb, rad, centers, cr)
        assert np.abs(a - b).max() < 1e-12
