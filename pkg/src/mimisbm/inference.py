"""Variational Bayes EM for the mixture of multilayer block models.

The variational family is fully factorized: one categorical per node (tau),
one categorical per layer (nu), Dirichlet posteriors over the block and
component weights (beta, theta) and a Beta posterior per connectivity cell
(eta, xi). Every update below is an exact coordinate maximization of the
evidence lower bound, so the bound never decreases along the outer loop;
that property is load bearing and the test suite enforces it.

Update order per outer iteration: node sweep(s), layer update, closed-form
M-step, bound evaluation. The bound uses the simplified form that is exact
right after an M-step, which is the only place the loop evaluates it. One
M-step runs before the first iteration so the initial responsibilities are
absorbed into the conjugate posteriors; without it the first node sweep
would start from flat priors and erase the initialization.

Numerics: updates work on logits and are normalized by max-subtracted
softmax; responsibility rows are floored at 1e-12 (1e-10 at init) and
renormalized, so no log ever sees a zero during a fit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from .core import (
    DomainError,
    FitConfig,
    HardPartition,
    MultilayerGraph,
    PriorHyperparams,
    VariationalState,
    rng_stream,
)
from .mathfn import digamma, log_gamma
from .metrics import map_assign

__all__ = [
    "ConvergenceWarning",
    "FitReport",
    "init_variational",
    "vbe_update_tau",
    "vbe_update_nu",
    "m_step",
    "compute_elbo",
    "fit",
]

_UPDATE_FLOOR = 1e-12
_INIT_FLOOR = 1e-10
_REL_EPS = 1e-9
_SOFT_MIX = 0.9  # weight on the hard assignment when softening spectral labels


class ConvergenceWarning(UserWarning):
    """Raised as a warning, never an error, when max_iter is exhausted."""


@dataclass(frozen=True)
class FitReport:
    """Outcome of a fit: the winning restart's state and bookkeeping.

    elbo_trace holds one bound value per outer iteration of the winning
    restart. iterations == len(elbo_trace). restart_elbos holds each
    restart's final bound; best_restart is the argmax, ties toward the
    lower index.
    """

    state: VariationalState
    elbo_trace: Tuple[float, ...]
    converged: bool
    iterations: int
    best_restart: int
    z_map: HardPartition
    w_map: HardPartition
    restart_elbos: Tuple[float, ...]


# ---------------------------------------------------------------------------
# helpers


def _floor_rows(rows: np.ndarray, floor: float) -> np.ndarray:
    out = np.maximum(rows, floor)
    return out / out.sum(axis=1, keepdims=True)


def _softmax_rows(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _xlogx(a: np.ndarray) -> float:
    safe = np.where(a > 0.0, a, 1.0)
    return float(np.sum(a * np.log(safe)))


def _connectivity(adj: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """M[k, l, v] = sum_{i,j} A_ijv tau_ik tau_jl; symmetric in (k, l)."""
    n, _, v = adj.shape
    k = tau.shape[1]
    m = np.empty((k, k, v))
    for lay in range(v):
        m[:, :, lay] = tau.T @ (adj[:, :, lay] @ tau)
    return (m + m.transpose(1, 0, 2)) / 2.0


def _pair_mass(tau: np.ndarray) -> np.ndarray:
    """P[k, l] = sum_{i != j} tau_ik tau_jl = t_k t_l - sum_i tau_ik tau_il."""
    t = tau.sum(axis=0)
    gram = tau.T @ tau
    gram = (gram + gram.T) / 2.0
    return np.outer(t, t) - gram


def _beta_log_moments(state: VariationalState):
    """E[log alpha] - E[log(1 - alpha)] and E[log(1 - alpha)] per cell."""
    d = digamma(state.eta) - digamma(state.xi)
    e = digamma(state.xi) - digamma(state.eta + state.xi)
    return d, e


# ---------------------------------------------------------------------------
# initialization


def _sq_dists(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Squared distances point-to-center via the expanded product form."""
    d = (x * x).sum(axis=1)[:, None] + (centers * centers).sum(axis=1)[None, :] - 2.0 * (x @ centers.T)
    return np.maximum(d, 0.0)


def _kmeans(x: np.ndarray, k: int, rng: np.random.Generator, n_init: int = 4, max_iter: int = 100) -> np.ndarray:
    """Plain Lloyd k-means with k-means++ seeding, written out so results are
    bit-reproducible under any thread or worker count."""
    n = x.shape[0]
    if k >= n:
        return np.arange(n) % k if k > 0 else np.zeros(n, dtype=np.int64)
    best_labels = None
    best_inertia = np.inf
    for _ in range(n_init):
        centers = np.empty((k, x.shape[1]))
        centers[0] = x[int(rng.integers(n))]
        d2 = np.sum((x - centers[0]) ** 2, axis=1)
        for c in range(1, k):
            total = d2.sum()
            if total <= 0:
                centers[c] = x[int(rng.integers(n))]
            else:
                r = rng.random() * total
                centers[c] = x[int(np.searchsorted(np.cumsum(d2), r))]
            d2 = np.minimum(d2, np.sum((x - centers[c]) ** 2, axis=1))
        labels = np.zeros(n, dtype=np.int64)
        for _ in range(max_iter):
            dist = _sq_dists(x, centers)
            new_labels = dist.argmin(axis=1)
            for c in range(k):
                sel = new_labels == c
                if sel.any():
                    centers[c] = x[sel].mean(axis=0)
                else:
                    centers[c] = x[int(dist.min(axis=1).argmax())]
            if (new_labels == labels).all():
                break
            labels = new_labels
        inertia = float(_sq_dists(x, centers)[np.arange(n), labels].sum())
        if inertia < best_inertia:
            best_inertia = inertia
            best_labels = labels
    return best_labels


def _spectral_labels(a: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Normalized spectral clustering of one layer's adjacency.

    The group count is the layer's own effective one, chosen by the largest
    eigengap among the top k eigenvalues of the normalized adjacency (capped
    at k). Layers whose block structure is coarser than k then yield their
    true coarse co-membership instead of an arbitrary refinement, which is
    what makes co-membership features comparable across layers.
    """
    n = a.shape[0]
    deg = a.sum(axis=1).astype(float)
    inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0)), 0.0)
    s = inv_sqrt[:, None] * a * inv_sqrt[None, :]
    vals, vecs = np.linalg.eigh(s)
    top = vals[::-1][: min(k + 1, n)]
    gaps = top[:-1] - top[1:]
    c = int(np.argmax(gaps)) + 1 if gaps.size else 1
    emb = vecs[:, -c:]
    norms = np.linalg.norm(emb, axis=1, keepdims=True)
    emb = emb / np.where(norms > 0, norms, 1.0)
    return _kmeans(emb, c, rng)


def _soften(labels: np.ndarray, k: int) -> np.ndarray:
    out = np.full((labels.size, k), (1.0 - _SOFT_MIX) / k)
    out[np.arange(labels.size), labels] += _SOFT_MIX
    return out


def init_variational(
    g: MultilayerGraph,
    k: int,
    q: int,
    priors: PriorHyperparams,
    strategy: str = "random",
    rng: Optional[np.random.Generator] = None,
) -> VariationalState:
    """Build a starting state: responsibilities by the chosen strategy, the
    conjugate posteriors set to the priors (the first M-step absorbs the
    responsibilities right after).

    random: rows drawn flat-Dirichlet. per_view_spectral: spectral labels
    per layer, layers grouped by k-means on their co-membership patterns,
    nodes by k-means on the mean co-membership matrix; both softened to
    0.9 on the assigned cluster plus 0.1 spread uniformly.
    """
    if k < 1 or q < 1:
        raise DomainError("k and q must be >= 1")
    if k > g.n or q > g.v:
        raise DomainError(
            f"k={k}, q={q} out of range for a graph with n={g.n}, v={g.v}"
        )
    if priors.k != k or priors.q != q:
        raise DomainError("prior shapes must match (k, q)")
    if rng is None:
        rng = rng_stream(0)

    if strategy == "random":
        tau = rng.dirichlet(np.ones(k), size=g.n)
        nu = rng.dirichlet(np.ones(q), size=g.v)
    elif strategy == "per_view_spectral":
        coms = np.empty((g.v, g.n, g.n))
        for lay in range(g.v):
            labels = _spectral_labels(g.adj[:, :, lay].astype(float), k, rng)
            coms[lay] = labels[:, None] == labels[None, :]
        w_labels = _kmeans(coms.reshape(g.v, -1), q, rng)
        z_labels = _kmeans(coms.mean(axis=0), k, rng)
        nu = _soften(w_labels, q)
        tau = _soften(z_labels, k)
    else:
        raise DomainError(f"unknown init strategy: {strategy!r}")

    tau = _floor_rows(tau, _INIT_FLOOR)
    nu = _floor_rows(nu, _INIT_FLOOR)
    return VariationalState(
        tau=tau,
        nu=nu,
        beta=priors.beta0,
        theta=priors.theta0,
        eta=priors.eta0,
        xi=priors.xi0,
    )


# ---------------------------------------------------------------------------
# updates


def vbe_update_tau(g: MultilayerGraph, state: VariationalState) -> np.ndarray:
    """One full sweep of the node fixed point; returns the new tau.

    Rows are updated in index order and each row sees the rows already
    updated in this sweep, which keeps the sweep a chain of exact
    coordinate ascents. Row i collects, over the other nodes j, layers v
    and components s,

        nu_vs tau_jl [ A_ijv (psi(eta_kls) - psi(xi_kls))
                       + psi(xi_kls) - psi(eta_kls + xi_kls) ]

    plus the Dirichlet term psi(beta_k) - psi(sum beta).
    """
    d, e = _beta_log_moments(state)
    base = digamma(state.beta) - digamma(float(state.beta.sum()))
    # edge-weighted component mass per node pair: AN[i, j, s] = sum_v A_ijv nu_vs
    an = np.tensordot(g.adj, state.nu, axes=([2], [0]))
    # non-edge part only needs column sums of nu
    en = np.tensordot(e, state.nu.sum(axis=0), axes=([2], [0]))  # (K, K)

    tau = np.array(state.tau, copy=True)
    colsum = tau.sum(axis=0)
    for i in range(g.n):
        p = tau.T @ an[i]  # (K, Q); row i itself contributes nothing, A_iiv = 0
        s1 = np.einsum("lq,klq->k", p, d)
        s2 = en @ (colsum - tau[i])
        row = _softmax_rows((base + s1 + s2)[None, :])[0]
        row = np.maximum(row, _UPDATE_FLOOR)
        row /= row.sum()
        colsum += row - tau[i]
        tau[i] = row
    return tau


def vbe_update_nu(g: MultilayerGraph, state: VariationalState) -> np.ndarray:
    """Update every layer's component responsibilities; returns the new nu.

    Layer v scores component s by the expected log-likelihood of its dyads,
    sum over i < j of tau_ik tau_jl against the Beta log-moments. The ordered
    sums below visit every unordered (node pair, block pair) combination
    exactly twice, once per orientation, hence the single factor 1/2. Rows
    are mutually independent given tau.
    """
    d, e = _beta_log_moments(state)
    base = digamma(state.theta) - digamma(float(state.theta.sum()))
    m = _connectivity(g.adj, state.tau)  # (K, K, V)
    pair = _pair_mass(state.tau)  # (K, K)

    edge = np.einsum("klv,kls->vs", m, d)
    hole = np.einsum("kl,kls->s", pair, e)[None, :]
    logits = base[None, :] + 0.5 * (edge + hole)

    nu = _softmax_rows(logits)
    nu = np.maximum(nu, _UPDATE_FLOOR)
    return nu / nu.sum(axis=1, keepdims=True)


def m_step(
    g: MultilayerGraph, state: VariationalState, priors: PriorHyperparams
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Closed-form update of the conjugate posteriors given (tau, nu).

    beta_k  = beta0_k + sum_i tau_ik
    theta_s = theta0_s + sum_v nu_vs
    eta[k, l, s] adds the expected edge count of block pair (k, l) in
    component s, xi the expected non-edge count; for k == l node pairs are
    counted once (i < j), hence the halved diagonal.
    """
    beta = priors.beta0 + state.tau.sum(axis=0)
    theta = priors.theta0 + state.nu.sum(axis=0)

    m = _connectivity(g.adj, state.tau)
    edges = np.tensordot(m, state.nu, axes=([2], [0]))  # (K, K, Q)
    pairs = _pair_mass(state.tau)[:, :, None] * state.nu.sum(axis=0)[None, None, :]
    holes = pairs - edges

    k = state.k
    idx = np.arange(k)
    edges[idx, idx, :] *= 0.5
    holes[idx, idx, :] *= 0.5

    eta = priors.eta0 + edges
    xi = priors.xi0 + holes
    return beta, theta, eta, xi


def compute_elbo(state: VariationalState, priors: PriorHyperparams) -> float:
    """Evidence lower bound in the simplified form that is exact after an
    M-step: prior-to-posterior normalizer ratios of the three conjugate
    families plus the responsibility entropies. The data enter only through
    the counts already absorbed into the posterior state, so the graph is
    not an argument.
    """

    def dirichlet_term(prior: np.ndarray, post: np.ndarray) -> float:
        return float(
            log_gamma(float(prior.sum()))
            - log_gamma(float(post.sum()))
            + log_gamma(post).sum()
            - log_gamma(prior).sum()
        )

    iu, ju = np.triu_indices(state.k)
    eta0 = priors.eta0[iu, ju, :]
    xi0 = priors.xi0[iu, ju, :]
    eta = state.eta[iu, ju, :]
    xi = state.xi[iu, ju, :]
    beta_term = float(
        (
            log_gamma(eta0 + xi0)
            - log_gamma(eta + xi)
            + log_gamma(eta)
            - log_gamma(eta0)
            + log_gamma(xi)
            - log_gamma(xi0)
        ).sum()
    )
    return (
        dirichlet_term(priors.beta0, state.beta)
        + dirichlet_term(priors.theta0, state.theta)
        + beta_term
        - _xlogx(state.tau)
        - _xlogx(state.nu)
    )


# ---------------------------------------------------------------------------
# driver


def fit(
    g: MultilayerGraph,
    k: int,
    q: int,
    cfg: FitConfig,
    priors: Optional[PriorHyperparams] = None,
) -> FitReport:
    """Fit the model at fixed (k, q) with restarts; return the best restart.

    Restart r draws its stream from rng_stream(cfg.seed, k, q, r), so a grid
    driver may schedule cells in any order or process count without changing
    any result. Restarts are ranked by final bound, ties toward the lower
    index. converged reflects the winning restart; when it ran into
    max_iter a ConvergenceWarning is emitted and the flag stays False.
    """
    if k < 1 or q < 1:
        raise DomainError("k and q must be >= 1")
    if k > g.n or q > g.v:
        raise DomainError(
            f"k={k}, q={q} out of range for a graph with n={g.n}, v={g.v}"
        )
    if priors is None:
        priors = PriorHyperparams.jeffreys(k, q)
    elif priors.k != k or priors.q != q:
        raise DomainError("prior shapes must match (k, q)")

    best = None
    restart_elbos = []
    for r in range(cfg.n_restarts):
        rng = rng_stream(cfg.seed, k, q, r)
        state = init_variational(g, k, q, priors, cfg.init_strategy, rng)
        beta, theta, eta, xi = m_step(g, state, priors)
        state = replace(state, beta=beta, theta=theta, eta=eta, xi=xi)

        trace: list[float] = []
        converged = False
        for _ in range(cfg.max_iter):
            state = replace(state, tau=vbe_update_tau(g, state))
            state = replace(state, nu=vbe_update_nu(g, state))
            beta, theta, eta, xi = m_step(g, state, priors)
            state = replace(state, beta=beta, theta=theta, eta=eta, xi=xi)
            trace.append(compute_elbo(state, priors))
            if len(trace) >= 2:
                delta = abs(trace[-1] - trace[-2])
                if delta < cfg.eps or delta < _REL_EPS * abs(trace[-2]):
                    converged = True
                    break

        restart_elbos.append(trace[-1])
        if best is None or trace[-1] > best[0]:
            best = (trace[-1], r, state, tuple(trace), converged)

    _, best_restart, state, trace, converged = best
    if not converged:
        warnings.warn(
            f"fit(k={k}, q={q}) stopped at max_iter={cfg.max_iter} without meeting eps={cfg.eps}",
            ConvergenceWarning,
            stacklevel=2,
        )
    return FitReport(
        state=state,
        elbo_trace=trace,
        converged=converged,
        iterations=len(trace),
        best_restart=best_restart,
        z_map=map_assign(state.tau),
        w_map=map_assign(state.nu),
        restart_elbos=tuple(restart_elbos),
    )
