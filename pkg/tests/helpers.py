"""Shared builders and independent oracle routes for the test suite.

Every oracle here deliberately avoids the package's own numerics: special
functions come from scipy, reductions are plain Python loops over indices,
and the exact evidence is an exhaustive enumeration. Agreement between these
routes and the vectorized implementations is what the tests certify.
"""

from __future__ import annotations

from dataclasses import replace
from itertools import product
from math import log

import numpy as np
from scipy.special import betaln, digamma as sp_digamma, gammaln, logsumexp

from mimisbm import (
    MultilayerGraph,
    PriorHyperparams,
    VariationalState,
    init_variational,
    m_step,
)


# ---------------------------------------------------------------------------
# builders


def random_graph(rng: np.random.Generator, n: int, v: int, p: float = 0.3) -> MultilayerGraph:
    """Erdos-Renyi layers, symmetrized, zero diagonal."""
    iu, ju = np.triu_indices(n, k=1)
    adj = np.zeros((n, n, v), dtype=np.uint8)
    for lay in range(v):
        hit = rng.random(iu.size) < p
        adj[iu[hit], ju[hit], lay] = 1
        adj[ju[hit], iu[hit], lay] = 1
    return MultilayerGraph(adj)


def random_post_m_state(
    rng: np.random.Generator,
    g: MultilayerGraph,
    k: int,
    q: int,
    priors: PriorHyperparams,
    cycles: int = 1,
) -> VariationalState:
    """A state whose posteriors come from an actual M-step, as the simplified
    bound requires. `cycles` extra update rounds move it off the start point."""
    from mimisbm import vbe_update_nu, vbe_update_tau

    state = init_variational(g, k, q, priors, "random", rng)
    beta, theta, eta, xi = m_step(g, state, priors)
    state = replace(state, beta=beta, theta=theta, eta=eta, xi=xi)
    for _ in range(cycles):
        state = replace(state, tau=vbe_update_tau(g, state))
        state = replace(state, nu=vbe_update_nu(g, state))
        beta, theta, eta, xi = m_step(g, state, priors)
        state = replace(state, beta=beta, theta=theta, eta=eta, xi=xi)
    return state


def random_soft_state(
    rng: np.random.Generator, g: MultilayerGraph, k: int, q: int
) -> VariationalState:
    """A syntactically valid state with arbitrary positive posteriors, for
    update-rule oracles that do not require post-M-step consistency."""
    eta = rng.uniform(0.5, 3.0, size=(k, k, q))
    xi = rng.uniform(0.5, 3.0, size=(k, k, q))
    eta = (eta + eta.transpose(1, 0, 2)) / 2.0
    xi = (xi + xi.transpose(1, 0, 2)) / 2.0
    return VariationalState(
        tau=rng.dirichlet(np.ones(k), size=g.n),
        nu=rng.dirichlet(np.ones(q), size=g.v),
        beta=rng.uniform(0.5, 5.0, size=k),
        theta=rng.uniform(0.5, 5.0, size=q),
        eta=eta,
        xi=xi,
    )


# ---------------------------------------------------------------------------
# scalar oracles for the update rules (pure loops, scipy special functions)


def scalar_tau_sweep(g: MultilayerGraph, state: VariationalState) -> np.ndarray:
    """Sequential node sweep evaluated term by term from the update formula."""
    n, k, q = g.n, state.k, state.q
    d = sp_digamma(state.eta) - sp_digamma(state.xi)
    e = sp_digamma(state.xi) - sp_digamma(state.eta + state.xi)
    base = sp_digamma(state.beta) - sp_digamma(state.beta.sum())
    tau = np.array(state.tau, copy=True)
    for i in range(n):
        logits = np.zeros(k)
        for kk in range(k):
            acc = base[kk]
            for j in range(n):
                if j == i:
                    continue
                for ll in range(k):
                    for lay in range(g.v):
                        a = g.adj[i, j, lay]
                        for s in range(q):
                            w = tau[j, ll] * state.nu[lay, s]
                            if a:
                                acc += w * d[kk, ll, s]
                            acc += w * e[kk, ll, s]
            logits[kk] = acc
        row = np.exp(logits - logits.max())
        row /= row.sum()
        row = np.maximum(row, 1e-12)
        row /= row.sum()
        tau[i] = row
    return tau


def scalar_nu_update(g: MultilayerGraph, state: VariationalState) -> np.ndarray:
    """Layer update from the formula: unordered block pairs, ordered node
    pairs for distinct blocks, i < j for equal blocks."""
    n, k, q = g.n, state.k, state.q
    d = sp_digamma(state.eta) - sp_digamma(state.xi)
    e = sp_digamma(state.xi) - sp_digamma(state.eta + state.xi)
    base = sp_digamma(state.theta) - sp_digamma(state.theta.sum())
    tau = state.tau
    nu = np.zeros((g.v, q))
    for lay in range(g.v):
        logits = np.zeros(q)
        for s in range(q):
            acc = base[s]
            for kk in range(k):
                for ll in range(kk, k):
                    for i in range(n):
                        for j in range(n):
                            if i == j:
                                continue
                            if kk == ll and i > j:
                                continue
                            w = tau[i, kk] * tau[j, ll]
                            if g.adj[i, j, lay]:
                                acc += w * d[kk, ll, s]
                            acc += w * e[kk, ll, s]
            logits[s] = acc
        row = np.exp(logits - logits.max())
        row /= row.sum()
        row = np.maximum(row, 1e-12)
        row /= row.sum()
        nu[lay] = row
    return nu


def scalar_m_step(g: MultilayerGraph, state: VariationalState, priors: PriorHyperparams):
    """Posterior counts accumulated cell by cell."""
    n, v, k, q = g.n, g.v, state.k, state.q
    beta = np.array(priors.beta0, copy=True)
    for kk in range(k):
        beta[kk] += state.tau[:, kk].sum()
    theta = np.array(priors.theta0, copy=True)
    for s in range(q):
        theta[s] += state.nu[:, s].sum()
    eta = np.array(priors.eta0, copy=True)
    xi = np.array(priors.xi0, copy=True)
    for kk in range(k):
        for ll in range(kk, k):
            for s in range(q):
                e_acc = 0.0
                h_acc = 0.0
                for i in range(n):
                    for j in range(n):
                        if i == j:
                            continue
                        if kk == ll and i > j:
                            continue
                        w = state.tau[i, kk] * state.tau[j, ll]
                        for lay in range(v):
                            wv = w * state.nu[lay, s]
                            if g.adj[i, j, lay]:
                                e_acc += wv
                            else:
                                h_acc += wv
                eta[kk, ll, s] += e_acc
                xi[kk, ll, s] += h_acc
                if ll != kk:
                    eta[ll, kk, s] = eta[kk, ll, s]
                    xi[ll, kk, s] = xi[kk, ll, s]
    return beta, theta, eta, xi


def scalar_elbo(state: VariationalState, priors: PriorHyperparams) -> float:
    """Simplified bound assembled from scipy gammaln, term by term."""
    k, q = state.k, state.q

    def dir_block(prior, post):
        return (
            gammaln(prior.sum())
            - gammaln(post.sum())
            + sum(gammaln(post[i]) - gammaln(prior[i]) for i in range(prior.size))
        )

    total = dir_block(priors.beta0, state.beta) + dir_block(priors.theta0, state.theta)
    for kk in range(k):
        for ll in range(kk, k):
            for s in range(q):
                total += (
                    gammaln(priors.eta0[kk, ll, s] + priors.xi0[kk, ll, s])
                    - gammaln(state.eta[kk, ll, s] + state.xi[kk, ll, s])
                    + gammaln(state.eta[kk, ll, s])
                    - gammaln(priors.eta0[kk, ll, s])
                    + gammaln(state.xi[kk, ll, s])
                    - gammaln(priors.xi0[kk, ll, s])
                )
    for row in state.tau:
        for p in row:
            if p > 0:
                total -= p * log(p)
    for row in state.nu:
        for p in row:
            if p > 0:
                total -= p * log(p)
    return float(total)


# ---------------------------------------------------------------------------
# exact evidence by exhaustive enumeration


def hard_completed_loglik(
    g: MultilayerGraph, z: np.ndarray, w: np.ndarray, priors: PriorHyperparams
) -> float:
    """log p(A, Z, W) with pi, rho, alpha integrated out, for one hard (Z, W)."""
    k, q = priors.k, priors.q
    n, v = g.n, g.v
    nk = np.bincount(z, minlength=k)
    vq = np.bincount(w, minlength=q)
    total = (
        gammaln(priors.beta0.sum())
        - gammaln(priors.beta0.sum() + n)
        + sum(gammaln(priors.beta0[i] + nk[i]) - gammaln(priors.beta0[i]) for i in range(k))
    )
    total += (
        gammaln(priors.theta0.sum())
        - gammaln(priors.theta0.sum() + v)
        + sum(gammaln(priors.theta0[i] + vq[i]) - gammaln(priors.theta0[i]) for i in range(q))
    )
    edges = np.zeros((k, k, q))
    holes = np.zeros((k, k, q))
    for i in range(n):
        for j in range(i + 1, n):
            a, b = sorted((z[i], z[j]))
            for lay in range(v):
                s = w[lay]
                if g.adj[i, j, lay]:
                    edges[a, b, s] += 1
                else:
                    holes[a, b, s] += 1
    for a in range(k):
        for b in range(a, k):
            for s in range(q):
                total += betaln(
                    priors.eta0[a, b, s] + edges[a, b, s],
                    priors.xi0[a, b, s] + holes[a, b, s],
                ) - betaln(priors.eta0[a, b, s], priors.xi0[a, b, s])
    return float(total)


def log_evidence_enumeration(g: MultilayerGraph, priors: PriorHyperparams) -> float:
    """Exact log p(A) as a log-sum-exp over every hard labeling pair."""
    k, q = priors.k, priors.q
    terms = [
        hard_completed_loglik(g, np.array(z), np.array(w), priors)
        for z in product(range(k), repeat=g.n)
        for w in product(range(q), repeat=g.v)
    ]
    return float(logsumexp(terms))


# ---------------------------------------------------------------------------
# pair-counting ARI oracle


def ari_bruteforce(x, y) -> float:
    """Adjusted Rand index by explicit enumeration of all item pairs."""
    x = np.asarray(x)
    y = np.asarray(y)
    n = x.size
    if n == 1:
        return 1.0
    ss = sd = ds = 0
    pairs = 0
    for i in range(n):
        for j in range(i + 1, n):
            pairs += 1
            same_x = x[i] == x[j]
            same_y = y[i] == y[j]
            if same_x and same_y:
                ss += 1
            elif same_x:
                sd += 1
            elif same_y:
                ds += 1
    a_pairs = ss + sd
    b_pairs = ss + ds
    expected = a_pairs * b_pairs / pairs
    maximum = (a_pairs + b_pairs) / 2.0
    num = ss - expected
    den = maximum - expected
    if den == 0.0:
        return 1.0 if num == 0.0 else 0.0
    return num / den
