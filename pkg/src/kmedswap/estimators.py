"""scikit-learn style estimators around the K-medoids and K-means routines."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_data, check_n_clusters, check_seed
from .baselines import MedlloydConfig, run_medlloyd, run_pam
from .clarans import LEVELS, EngineConfig, StopCriterion, run_clarans
from .data import DENSE, SEQUENCE
from .lloyd import mse_of, run_lloyd
from .metrics import MetricSpace, canonical_metric, cross_distances
from .potentials import get_potential
from .seeding import seed_pipeline


class _MedoidsMixin(ClusterMixin, TransformerMixin, BaseEstimator):
    """Shared fitted attributes and out-of-sample methods."""

    def _space(self, X):
        data = check_data(X, self.metric)
        return MetricSpace(data, canonical_metric(self.metric))

    def _store(self, space, state, report):
        data = space.data
        self.medoid_indices_ = np.asarray(state.centers, dtype=np.intp).copy()
        self.labels_ = state.a1.copy()
        self.energy_ = state.energy
        self.inertia_ = float(np.sum(state.e1))
        self.n_iter_ = report.n_implementations or report.n_iterations
        self.report_ = report
        self.state_ = state
        if data.kind == SEQUENCE:
            self.cluster_centers_ = [data.samples[i] for i in self.medoid_indices_]
        else:
            self.cluster_centers_ = data.samples[self.medoid_indices_]
        if data.kind == DENSE:
            self.n_features_in_ = data.samples.shape[1]
        return self

    def transform(self, X):
        """Distances from each sample to every medoid."""
        check_is_fitted(self, "cluster_centers_")
        data = check_data(X, self.metric)
        return cross_distances(data.samples, self.cluster_centers_, self.metric)

    def predict(self, X):
        """Index of the nearest medoid (lowest index on ties)."""
        return np.argmin(self.transform(X), axis=1)


class Clarans(_MedoidsMixin):
    """K-medoids by randomised swap search with exact triangle-inequality pruning.

    Parameters
    ----------
    n_clusters : int, default=8
    metric : str, default='l2'
        One of 'l2', 'l1', 'linf', 'levenshtein', 'normalized-levenshtein'.
    potential : str, default='quadratic'
        Energy of a distance: 'quadratic', 'identity', 'exponential',
        'logarithmic' or 'step'.
    level : int, default=2
        Optimisation level in -2..3. Levels up to 2 give identical results;
        3 rejects some proposals early from a sub-sample.
    init : {'random', 'k-means++'} or array of sample indices, default='random'
    max_rejections : int, optional
        Consecutive rejections before stopping; ``n_clusters**2`` by default.
    max_swaps, time_limit : optional
        Additional stopping criteria.
    random_state : int, numpy Generator or None

    Attributes
    ----------
    medoid_indices_ : ndarray of shape (n_clusters,)
    cluster_centers_ : ndarray or list
        The medoids themselves.
    labels_ : ndarray of shape (n_samples,)
    energy_ : float
        Mean energy of the samples.
    inertia_ : float
        Summed energy of the samples.
    report_ : RunReport
    """

    def __init__(self, n_clusters=8, metric="l2", potential="quadratic", level=2, init="random",
                 max_rejections=None, max_swaps=None, time_limit=None, random_state=None):
        self.n_clusters = n_clusters
        self.metric = metric
        self.potential = potential
        self.level = level
        self.init = init
        self.max_rejections = max_rejections
        self.max_swaps = max_swaps
        self.time_limit = time_limit
        self.random_state = random_state

    def fit(self, X, y=None):
        space = self._space(X)
        K = check_n_clusters(self.n_clusters, space.n_samples)
        if self.level not in LEVELS:
            raise ValueError(f"level must be one of {LEVELS}, got {self.level}")
        config = EngineConfig(
            n_clusters=K, level=self.level, seed=check_seed(self.random_state),
            stop=StopCriterion(max_rejections=self.max_rejections, max_swaps=self.max_swaps,
                               time_limit=self.time_limit),
            init=self.init,
        )
        state, report = run_clarans(space, get_potential(self.potential), config)
        return self._store(space, state, report)


class MedLloyd(_MedoidsMixin):
    """K-medoids by alternating nearest-medoid assignment and medoid updates.

    Parameters
    ----------
    n_clusters : int, default=8
    metric : str, default='l2'
    potential : str, default='quadratic'
    init : 'random' or array of sample indices, default='random'
    max_iter : int, default=1000
    random_state : int, numpy Generator or None
    """

    def __init__(self, n_clusters=8, metric="l2", potential="quadratic", init="random",
                 max_iter=1000, random_state=None):
        self.n_clusters = n_clusters
        self.metric = metric
        self.potential = potential
        self.init = init
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y=None):
        space = self._space(X)
        K = check_n_clusters(self.n_clusters, space.n_samples, strict=False)
        config = MedlloydConfig(K, seed=check_seed(self.random_state), max_iter=self.max_iter,
                                init=self.init)
        state, report = run_medlloyd(space, get_potential(self.potential), config)
        return self._store(space, state, report)


class PAM(_MedoidsMixin):
    """K-medoids by exhaustive best-improvement swaps. Quadratic cost per sweep.

    Parameters
    ----------
    n_clusters : int, default=8
    metric : str, default='l2'
    potential : str, default='quadratic'
    init : 'random' or array of sample indices, default='random'
    random_state : int, numpy Generator or None
    """

    def __init__(self, n_clusters=8, metric="l2", potential="quadratic", init="random",
                 random_state=None):
        self.n_clusters = n_clusters
        self.metric = metric
        self.potential = potential
        self.init = init
        self.random_state = random_state

    def fit(self, X, y=None):
        space = self._space(X)
        K = check_n_clusters(self.n_clusters, space.n_samples)
        if isinstance(self.init, str):
            if self.init != "random":
                raise ValueError(f"unknown init {self.init!r}")
            rng = np.random.default_rng(check_seed(self.random_state))
            centers = rng.choice(space.n_samples, K, replace=False)
        else:
            centers = np.asarray(self.init, dtype=np.intp)
        state, report = run_pam(space, get_potential(self.potential), centers)
        return self._store(space, state, report)


_KMEANS_INITS = {"random": "uni", "k-means++": "kmpp", "bf": "bf", "clarans": "clarans",
                 "k-means++-clarans": "kmpp-clarans"}


class SeededKMeans(ClusterMixin, TransformerMixin, BaseEstimator):
    """Lloyd's K-means with a choice of seeding, including swap-search seeding.

    Parameters
    ----------
    n_clusters : int, default=8
    init : str or ndarray, default='clarans'
        'random', 'k-means++', 'bf', 'clarans', 'k-means++-clarans', or an
        array of initial centers of shape (n_clusters, n_features).
    level : int, default=2
        Optimisation level of the swap search.
    max_rejections : int, optional
    max_iter : int, default=10000
    random_state : int, numpy Generator or None

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (n_clusters, n_features)
    labels_ : ndarray of shape (n_samples,)
    mse_ : float
        Final mean squared error.
    init_mse_ : float or None
        Mean squared error of the initial centers (None for 'bf').
    inertia_ : float
        Final summed squared error.
    """

    def __init__(self, n_clusters=8, init="clarans", level=2, max_rejections=None,
                 max_iter=10_000, random_state=None):
        self.n_clusters = n_clusters
        self.init = init
        self.level = level
        self.max_rejections = max_rejections
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y=None):
        data = check_data(X, "l2")
        if data.kind != DENSE:
            raise ValueError("SeededKMeans requires dense input")
        Xd = data.samples
        K = check_n_clusters(self.n_clusters, Xd.shape[0])
        seed = check_seed(self.random_state)
        if isinstance(self.init, str):
            if self.init not in _KMEANS_INITS:
                raise ValueError(f"unknown init {self.init!r}; choose from {list(_KMEANS_INITS)}")
            res = seed_pipeline(MetricSpace(data, "l2"), K, _KMEANS_INITS[self.init], seed=seed,
                                level=self.level, stop=StopCriterion(max_rejections=self.max_rejections))
            init = res.points if res.points is not None else Xd[res.indices]
            self.init_report_ = res.clarans_report
        else:
            init = np.asarray(self.init, dtype=np.float64)
            if init.shape != (K, Xd.shape[1]):
                raise ValueError(f"init must have shape {(K, Xd.shape[1])}, got {init.shape}")
            self.init_report_ = None
        is_bf = isinstance(self.init, str) and self.init == "bf"
        self.init_mse_ = None if is_bf else mse_of(Xd, init)
        result = run_lloyd(Xd, init, max_iter=self.max_iter)
        self.cluster_centers_ = result.centers
        self.labels_ = result.labels
        self.mse_ = result.mse
        self.inertia_ = result.mse * Xd.shape[0]
        self.n_iter_ = result.n_iter
        self.n_features_in_ = Xd.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "cluster_centers_")
        return cross_distances(check_data(X, "l2").samples, self.cluster_centers_, "l2")

    def predict(self, X):
        return np.argmin(self.transform(X), axis=1)
