import numpy as np
import pytest

from qdmlab import metrics
from qdmlab.errors import ShapeError, StatError


def gauss(mean, cov):
    return metrics.GaussianStats(mean=np.asarray(mean, float), cov=np.asarray(cov, float))


def test_gaussian_stats_validation():
    with pytest.raises(ShapeError):
        metrics.GaussianStats(mean=np.zeros(2), cov=np.zeros((3, 3)))
    with pytest.raises(StatError):
        metrics.GaussianStats(mean=np.zeros(2), cov=np.array([[1.0, 0.5], [0.4, 1.0]]))
    with pytest.raises(StatError):
        metrics.GaussianStats(mean=np.zeros(2), cov=np.array([[1.0, 0.0], [0.0, -1.0]]))


def test_fit_gaussian(rng):
    samples = rng.standard_normal((5000, 3)) * 2.0 + 1.0
    g = metrics.fit_gaussian(samples)
    np.testing.assert_allclose(g.mean, 1.0, atol=0.2)
    np.testing.assert_allclose(g.cov, 4.0 * np.eye(3), atol=0.4)
    with pytest.raises(StatError):
        metrics.fit_gaussian(np.zeros((1, 3)))


def test_frechet_analytic_cases():
    g = gauss([1.0, -2.0], [[2.0, 0.3], [0.3, 1.0]])
    assert abs(metrics.frechet_distance(g, g)) < 1e-9
    # Equal covariances: distance reduces to the squared mean gap.
    a = gauss([0.0, 0.0], np.eye(2))
    b = gauss([3.0, 4.0], np.eye(2))
    assert abs(metrics.frechet_distance(a, b) - 25.0) < 1e-9
    # Diagonal covariances: add sum of squared sqrt-eigenvalue gaps.
    c = gauss([0.0, 0.0], np.diag([4.0, 9.0]))
    d = gauss([1.0, 0.0], np.diag([1.0, 1.0]))
    expected = 1.0 + (2.0 - 1.0) ** 2 + (3.0 - 1.0) ** 2
    assert abs(metrics.frechet_distance(c, d) - expected) < 1e-9
    # Point masses: pure squared distance between the means.
    e = gauss([0.0, 1.0], np.zeros((2, 2)))
    f = gauss([0.0, -1.0], np.zeros((2, 2)))
    assert abs(metrics.frechet_distance(e, f) - 4.0) < 1e-9
    assert metrics.gaussian_w2(c, d) == metrics.frechet_distance(c, d)
    with pytest.raises(ShapeError):
        metrics.frechet_distance(a, gauss([0.0], [[1.0]]))


def test_frechet_symmetry(rng):
    def random_gauss():
        m = rng.standard_normal(3)
        a = rng.standard_normal((3, 3))
        return gauss(m, a @ a.T)

    for _ in range(5):
        a, b = random_gauss(), random_gauss()
        assert abs(metrics.frechet_distance(a, b) - metrics.frechet_distance(b, a)) < 1e-8
        assert metrics.frechet_distance(a, b) >= 0.0


def test_wam_identity_and_single_component():
    a = gauss([0.0, 0.0], np.eye(2))
    b = gauss([2.0, 0.0], 2.0 * np.eye(2))
    mix = metrics.GMM(weights=np.array([0.4, 0.6]), components=(a, b))
    assert abs(metrics.wam(mix, mix)) < 1e-9
    single_a = metrics.GMM(weights=np.array([1.0]), components=(a,))
    single_b = metrics.GMM(weights=np.array([1.0]), components=(b,))
    assert abs(metrics.wam(single_a, single_b) - metrics.gaussian_w2(a, b)) < 1e-9


def test_wam_matches_bruteforce_transport():
    # 2x2 transport plans form a one-parameter family; scan it.
    comps1 = (gauss([0.0], [[1.0]]), gauss([4.0], [[1.0]]))
    comps2 = (gauss([1.0], [[1.0]]), gauss([6.0], [[1.0]]))
    w1 = np.array([0.3, 0.7])
    w2 = np.array([0.5, 0.5])
    cost = np.array(
        [[metrics.gaussian_w2(a, b) for b in comps2] for a in comps1]
    )
    best = np.inf
    for x in np.linspace(0.0, min(w1[0], w2[0]), 20001):
        plan = np.array([[x, w1[0] - x], [w2[0] - x, w1[1] - (w2[0] - x)]])
        if plan.min() < -1e-12:
            continue
        best = min(best, float((plan * cost).sum()))
    got = metrics.wam(
        metrics.GMM(weights=w1, components=comps1),
        metrics.GMM(weights=w2, components=comps2),
    )
    assert abs(got - best) < 1e-6


def test_fit_gmm_recovers_separated_clusters(rng):
    a = rng.standard_normal((300, 2)) * 0.3 + np.array([0.0, 0.0])
    b = rng.standard_normal((300, 2)) * 0.3 + np.array([8.0, 8.0])
    samples = np.vstack([a, b])
    gmm = metrics.fit_gmm(samples, 2, seed=0)
    means = sorted(float(c.mean[0]) for c in gmm.components)
    assert abs(means[0] - 0.0) < 0.3 and abs(means[1] - 8.0) < 0.3
    np.testing.assert_allclose(gmm.weights.sum(), 1.0, atol=1e-9)
    np.testing.assert_allclose(gmm.weights, 0.5, atol=0.05)
    # Likelihood of a correct 2-component model beats a single Gaussian.
    single = metrics.GMM(weights=np.array([1.0]), components=(metrics.fit_gaussian(samples),))
    assert metrics.gmm_log_likelihood(gmm, samples) > metrics.gmm_log_likelihood(single, samples)


def test_roc_auc_analytic_cases():
    assert metrics.roc_auc([2.0, 3.0], [0.0, 1.0]) == 1.0
    assert metrics.roc_auc([0.0, 1.0], [2.0, 3.0]) == 0.0
    assert metrics.roc_auc([1.0, 1.0], [1.0, 1.0]) == 0.5
    # Mixed case with one tie: pairs (2>1)=1, (2>3)=0, (1=1)=0.5, (1<3)=0.
    assert abs(metrics.roc_auc([2.0, 1.0], [1.0, 3.0]) - 1.5 / 4.0) < 1e-12
    with pytest.raises(StatError):
        metrics.roc_auc([], [1.0])


def test_roc_auc_matches_pair_counting(rng):
    pos = rng.standard_normal(40) + 0.5
    neg = rng.standard_normal(30)
    brute = np.mean([
        1.0 if p > n else (0.5 if p == n else 0.0) for p in pos for n in neg
    ])
    assert abs(metrics.roc_auc(pos, neg) - brute) < 1e-12


def test_pca_projection(rng):
    # Data on a known 1-D subspace plus tiny noise.
    direction = np.array([3.0, 4.0]) / 5.0
    t = rng.standard_normal(500)
    samples = np.outer(t, direction) + 1e-6 * rng.standard_normal((500, 2))
    proj = metrics.pca_fit(samples, dims=1)
    assert abs(abs(proj.components[0] @ direction) - 1.0) < 1e-4
    assert proj.residual < 1e-9
    # Sign convention makes the fit deterministic.
    assert proj.components[0][np.argmax(np.abs(proj.components[0]))] > 0
    pts = metrics.pca_project(proj, samples)
    assert pts.shape == (500, 1)
    np.testing.assert_allclose(pts[:, 0], t - t.mean(), atol=1e-4)


def test_binary_classifier_separates_demo_digits(demo_digits_raw):
    images = demo_digits_raw.images.reshape(len(demo_digits_raw), -1)
    labels = demo_digits_raw.labels
    clf = metrics.train_binary_classifier(0, images[:800], labels[:800], max_iter=150)
    scores = clf.score_batch(images[800:1000])
    truth = labels[800:1000] == 0
    auc = metrics.roc_auc(scores[truth], scores[~truth])
    assert auc > 0.99
    single = clf.score(images[0])
    assert 0.0 <= single <= 1.0
