"""Naive Bayes with Gaussian or Gaussian-kernel class-conditional densities.

Features are treated as conditionally independent given the class, so the
log joint score of class ``c`` is ``log prior_c + sum_i log p(x_i | c)``.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from ..errors import DegenerateClass
from .base import Classifier, _check_X, as_arrays, normalize_weights

VAR_FLOOR = 1e-9
_LOG_2PI = np.log(2.0 * np.pi)


def silverman_bandwidth(values, weights=None) -> float:
    """``0.9 * min(std, IQR / 1.34) * n^(-1/5)``, falling back to ``std`` when IQR is 0."""
    v = np.asarray(values, dtype=float)
    n = v.size
    if weights is None:
        std = v.std()
        q75, q25 = np.percentile(v, [75, 25])
    else:
        w = np.asarray(weights, dtype=float) / np.sum(weights)
        mu = np.dot(w, v)
        std = np.sqrt(np.dot(w, (v - mu) ** 2))
        order = np.argsort(v, kind="stable")
        cw = np.cumsum(w[order])
        q25 = v[order][np.searchsorted(cw, 0.25)]
        q75 = v[order][min(np.searchsorted(cw, 0.75), n - 1)]
    spread = min(std, (q75 - q25) / 1.34)
    if spread <= 0:
        spread = std
    return max(0.9 * spread * n ** -0.2, np.sqrt(VAR_FLOOR))


class NaiveBayes(Classifier):
    kind = "naive_bayes"

    def __init__(self, label_set, log_prior, kernel: bool, means=None, variances=None,
                 centers=None, center_weights=None, bandwidths=None):
        super().__init__(label_set)
        self.log_prior = np.asarray(log_prior, dtype=float)
        self.kernel = bool(kernel)
        if self.kernel:
            self.centers = [np.asarray(c, dtype=float) for c in centers]
            self.center_weights = [np.asarray(w, dtype=float) for w in center_weights]
            self.bandwidths = np.asarray(bandwidths, dtype=float)
            self.n_features = self.bandwidths.shape[1]
        else:
            self.means = np.asarray(means, dtype=float)
            self.variances = np.asarray(variances, dtype=float)
            self.n_features = self.means.shape[1]

    def log_likelihood(self, X) -> np.ndarray:
        """Class-conditional log density of each row, shape ``(n, K)``."""
        X = _check_X(X, self.n_features)
        if not self.kernel:
            d = X[:, None, :] - self.means[None, :, :]
            ll = -0.5 * (_LOG_2PI + np.log(self.variances)[None] + d * d / self.variances[None])
            return ll.sum(axis=2)
        out = np.empty((X.shape[0], self.n_classes))
        for c in range(self.n_classes):
            h = self.bandwidths[c]                               # (F,)
            z = (X[:, None, :] - self.centers[c][None]) / h      # (n, m, F)
            log_k = -0.5 * (_LOG_2PI + z * z) - np.log(h)
            # weights go through ``b`` so they never meet huge log densities additively
            cw = self.center_weights[c][None, :, None]
            out[:, c] = logsumexp(log_k, axis=1, b=cw).sum(axis=1)
        return out

    def log_joint(self, X) -> np.ndarray:
        """Unnormalized log posterior, shape ``(n, K)``."""
        return self.log_prior[None, :] + self.log_likelihood(X)

    def predict_scores(self, X) -> np.ndarray:
        ll = self.log_likelihood(X)
        # center each row first: far from the data the likelihoods are so large
        # in magnitude that adding the priors directly would round them away
        lj = (ll - ll.max(axis=1, keepdims=True)) + self.log_prior[None, :]
        return np.exp(lj - logsumexp(lj, axis=1, keepdims=True))

    def params(self) -> dict:
        doc = {"kernel": self.kernel, "log_prior": self.log_prior.tolist()}
        if self.kernel:
            doc.update(centers=[c.tolist() for c in self.centers],
                       center_weights=[w.tolist() for w in self.center_weights],
                       bandwidths=self.bandwidths.tolist())
        else:
            doc.update(means=self.means.tolist(), variances=self.variances.tolist())
        return doc

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["label_set"], doc["log_prior"], doc["kernel"], doc.get("means"),
                   doc.get("variances"), doc.get("centers"), doc.get("center_weights"),
                   doc.get("bandwidths"))


def train_naive_bayes(ds, kernel: bool = False, sample_weight=None) -> NaiveBayes:
    """Fit class priors and per-feature densities.

    Gaussian densities use the (weighted) maximum likelihood mean and
    variance; kernel densities place a Gaussian of Silverman bandwidth on
    every training value.  Variances below ``1e-9`` are floored.

    Raises
    ------
    DegenerateClass
        When a class has fewer than two training rows.
    """
    X, y, label_set = as_arrays(ds)
    K = len(label_set)
    if K < 2:
        raise DegenerateClass("naive Bayes needs at least two classes")
    w = normalize_weights(sample_weight, len(y))
    counts = np.bincount(y, minlength=K)
    if counts.min() < 2:
        bad = label_set[int(np.argmin(counts))]
        raise DegenerateClass(f"class {bad!r} has {counts.min()} rows; need at least 2")
    class_w = np.bincount(y, weights=w, minlength=K)
    if class_w.min() <= 0:
        raise DegenerateClass("a class carries zero total weight")
    log_prior = np.log(class_w)
    if not kernel:
        means = np.empty((K, X.shape[1]))
        variances = np.empty_like(means)
        for c in range(K):
            wc = w[y == c] / class_w[c]
            Xc = X[y == c]
            ref = Xc[0]  # shifting makes constant columns come out exact
            means[c] = ref + wc @ (Xc - ref)
            variances[c] = wc @ (Xc - means[c]) ** 2
        return NaiveBayes(label_set, log_prior, False, means=means,
                          variances=np.maximum(variances, VAR_FLOOR))
    centers, cws, bws = [], [], []
    for c in range(K):
        Xc, wc = X[y == c], w[y == c] / class_w[c]
        centers.append(Xc)
        cws.append(wc)
        bws.append([silverman_bandwidth(Xc[:, j], None if sample_weight is None else wc)
                    for j in range(X.shape[1])])
    return NaiveBayes(label_set, log_prior, True, centers=centers, center_weights=cws,
                      bandwidths=bws)
