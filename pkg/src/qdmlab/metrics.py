"""Generative-model evaluation: Fréchet distance between fitted
Gaussians, GMM 2-Wasserstein via EM plus discrete optimal transport
(WaM), Mann-Whitney ROC-AUC with per-digit binary classifiers, and PCA.

The Fréchet distance here is computed on raw feature vectors (pixels or
latents), not Inception activations, so its absolute values are not
comparable to Inception-based FID numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import ConfigError, ShapeError, StatError

COV_REGULARIZATION = 1e-6


@dataclass(frozen=True)
class GaussianStats:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        cov = np.asarray(self.cov, dtype=np.float64)
        if cov.shape != (mean.size, mean.size):
            raise ShapeError("covariance shape does not match mean")
        if not np.allclose(cov, cov.T, atol=1e-9):
            raise StatError("covariance must be symmetric")
        if np.linalg.eigvalsh(cov).min() < -1e-9:
            raise StatError("covariance must be positive semidefinite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


@dataclass(frozen=True)
class GMM:
    weights: np.ndarray
    components: tuple[GaussianStats, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size != len(self.components):
            raise ShapeError("one weight per component required")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise StatError("weights must be a probability simplex point")
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.components[0].dim


def fit_gaussian(samples: np.ndarray) -> GaussianStats:
    """Sample mean and unbiased covariance, symmetrized."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    if samples.shape[0] < 2:
        raise StatError("need at least 2 samples")
    mean = samples.mean(axis=0)
    centered = samples - mean
    cov = centered.T @ centered / (samples.shape[0] - 1)
    cov = (cov + cov.T) / 2.0
    return GaussianStats(mean=mean, cov=cov)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    """Symmetric matrix square root via eigendecomposition."""
    vals, vecs = np.linalg.eigh((mat + mat.T) / 2.0)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def frechet_distance(g1: GaussianStats, g2: GaussianStats) -> float:
    """Squared 2-Wasserstein distance between two Gaussians.

    ||mu1 - mu2||^2 + Tr(S1 + S2 - 2 (S1^(1/2) S2 S1^(1/2))^(1/2)),
    with tiny negative eigenvalues clamped to zero.
    """
    if g1.dim != g2.dim:
        raise ShapeError("dimension mismatch")
    root1 = _psd_sqrt(g1.cov)
    cross = _psd_sqrt(root1 @ g2.cov @ root1)
    d2 = (
        float(np.sum((g1.mean - g2.mean) ** 2))
        + float(np.trace(g1.cov) + np.trace(g2.cov) - 2.0 * np.trace(cross))
    )
    return max(d2, 0.0)


def gaussian_w2(a: GaussianStats, b: GaussianStats) -> float:
    """Squared Bures-Wasserstein distance; same algebra as frechet_distance."""
    return frechet_distance(a, b)


def _kmeanspp_init(samples: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = samples.shape[0]
    centers = [samples[rng.integers(n)]]
    for _ in range(k - 1):
        d2 = np.min(
            [np.sum((samples - c) ** 2, axis=1) for c in centers], axis=0
        )
        total = d2.sum()
        if total <= 0.0:
            centers.append(samples[rng.integers(n)])
            continue
        centers.append(samples[rng.choice(n, p=d2 / total)])
    return np.array(centers)


def _logpdf(samples: np.ndarray, g: GaussianStats) -> np.ndarray:
    d = g.dim
    chol = np.linalg.cholesky(g.cov)
    diff = samples - g.mean
    solved = np.linalg.solve(chol, diff.T)
    maha = np.sum(solved**2, axis=0)
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    return -0.5 * (maha + logdet + d * np.log(2.0 * np.pi))


def gmm_log_likelihood(gmm: GMM, samples: np.ndarray) -> float:
    log_probs = np.stack(
        [np.log(w) + _logpdf(samples, g) for w, g in zip(gmm.weights, gmm.components)]
    )
    m = log_probs.max(axis=0)
    return float(np.sum(m + np.log(np.sum(np.exp(log_probs - m), axis=0))))


def fit_gmm(
    samples: np.ndarray,
    k: int,
    seed: int = 0,
    tol: float = 1e-6,
    max_iter: int = 500,
    restarts: int = 3,
) -> GMM:
    """EM with k-means++ style initialization.

    Covariances are regularized by +1e-6 I; a degenerate component
    (weight < 1e-8) triggers a restart, up to ``restarts`` times.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    n, d = samples.shape
    if n < k:
        raise StatError(f"need at least {k} samples for {k} components")
    rng = np.random.default_rng(seed)
    reg = COV_REGULARIZATION * np.eye(d)

    for _ in range(restarts):
        means = _kmeanspp_init(samples, k, rng)
        covs = np.array([np.cov(samples.T) + reg for _ in range(k)]).reshape(k, d, d)
        weights = np.full(k, 1.0 / k)
        prev_ll = -np.inf
        degenerate = False
        for _ in range(max_iter):
            log_probs = np.stack(
                [
                    np.log(weights[j])
                    + _logpdf(samples, GaussianStats(means[j], (covs[j] + covs[j].T) / 2))
                    for j in range(k)
                ]
            )
            m = log_probs.max(axis=0)
            log_norm = m + np.log(np.sum(np.exp(log_probs - m), axis=0))
            ll = float(np.sum(log_norm))
            resp = np.exp(log_probs - log_norm)
            nk = resp.sum(axis=1)
            if np.any(nk / n < 1e-8):
                degenerate = True
                break
            weights = nk / n
            means = (resp @ samples) / nk[:, None]
            for j in range(k):
                diff = samples - means[j]
                covs[j] = (diff.T * resp[j]) @ diff / nk[j] + reg
                covs[j] = (covs[j] + covs[j].T) / 2.0
            if ll - prev_ll < tol and np.isfinite(prev_ll):
                break
            prev_ll = ll
        if not degenerate:
            comps = tuple(GaussianStats(means[j], covs[j]) for j in range(k))
            return GMM(weights=weights / weights.sum(), components=comps)
    raise StatError("EM produced a degenerate component in every restart")


def wam(g1: GMM, g2: GMM) -> float:
    """2-Wasserstein distance between Gaussian mixtures.

    Builds the pairwise Gaussian-W2 cost matrix and solves the discrete
    optimal-transport LP with marginals equal to the mixture weights.
    """
    if g1.dim != g2.dim:
        raise ShapeError("dimension mismatch")
    k1, k2 = len(g1.components), len(g2.components)
    cost = np.array(
        [[gaussian_w2(a, b) for b in g2.components] for a in g1.components]
    )
    # Transport plan variables flattened row-major; equality marginals.
    a_eq = np.zeros((k1 + k2, k1 * k2))
    for i in range(k1):
        a_eq[i, i * k2 : (i + 1) * k2] = 1.0
    for j in range(k2):
        a_eq[k1 + j, j::k2] = 1.0
    b_eq = np.concatenate([g1.weights, g2.weights])
    res = linprog(cost.reshape(-1), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise StatError(f"transport LP failed: {res.message}")
    return float(res.fun)


def roc_auc(scores_positive, scores_negative) -> float:
    """Mann-Whitney statistic: P(pos > neg) with ties counted as 1/2."""
    pos = np.asarray(scores_positive, dtype=np.float64)
    neg = np.asarray(scores_negative, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise StatError("both score sets must be nonempty")
    from scipy.stats import rankdata

    combined = np.concatenate([pos, neg])
    ranks = rankdata(combined)
    rank_sum = ranks[: pos.size].sum()
    u = rank_sum - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


@dataclass
class BinaryDigitClassifier:
    digit: int
    model: object

    def score(self, image: np.ndarray) -> float:
        """Probability-like score that the image shows the target digit."""
        x = np.atleast_2d(np.asarray(image, dtype=np.float64).reshape(1, -1))
        return float(self.model.predict_proba(x)[0, 1])

    def score_batch(self, images: np.ndarray) -> np.ndarray:
        x = np.asarray(images, dtype=np.float64).reshape(len(images), -1)
        return self.model.predict_proba(x)[:, 1]


def train_binary_classifier(
    digit: int,
    images: np.ndarray,
    labels: np.ndarray,
    hidden: int = 64,
    seed: int = 0,
    max_iter: int = 200,
) -> BinaryDigitClassifier:
    """One-vs-rest single-hidden-layer classifier with logistic loss."""
    from sklearn.neural_network import MLPClassifier

    images = np.asarray(images, dtype=np.float64).reshape(len(images), -1)
    labels = np.asarray(labels)
    y = (labels == digit).astype(int)
    if y.sum() == 0 or y.sum() == y.size:
        raise ConfigError("dataset must contain positives and negatives")
    model = MLPClassifier(
        hidden_layer_sizes=(hidden,),
        max_iter=max_iter,
        random_state=seed,
        solver="adam",
    )
    model.fit(images, y)
    return BinaryDigitClassifier(digit=digit, model=model)


@dataclass(frozen=True)
class PcaProjection:
    mean: np.ndarray
    components: np.ndarray  # (dims, d), orthonormal rows
    explained: np.ndarray   # eigenvalues of the kept components
    residual: float         # sum of discarded eigenvalues


def pca_fit(samples: np.ndarray, dims: int = 2) -> PcaProjection:
    """Top eigenvectors of the sample covariance.

    Sign convention: the largest-magnitude entry of each component is
    made positive, so the projection is deterministic.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    if samples.shape[0] < dims:
        raise StatError("need at least as many samples as dimensions")
    mean = samples.mean(axis=0)
    centered = samples - mean
    cov = centered.T @ centered / (samples.shape[0] - 1)
    vals, vecs = np.linalg.eigh((cov + cov.T) / 2.0)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    comps = vecs[:, :dims].T.copy()
    for row in comps:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            row *= -1.0
    return PcaProjection(
        mean=mean,
        components=comps,
        explained=vals[:dims].copy(),
        residual=float(np.clip(vals[dims:], 0.0, None).sum()),
    )


def pca_project(projection: PcaProjection, samples: np.ndarray) -> np.ndarray:
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    return (samples - projection.mean) @ projection.components.T
