"""Model selection over a (K, Q) grid.

Four criteria are computed per cell, all on the natural-log scale:

ilvb             the bound itself, taken at the fitted state.
icl_exact        integrated completed likelihood of the hardened (MAP)
                 partitions: the conjugate normalizer ratios with counts
                 taken from one-hot assignments, no entropy terms.
icl_variational  the same normalizer ratios at the soft counts, i.e. the
                 bound with its responsibility entropies removed.
icl_approx       the bound minus the asymptotic penalty pen(K, Q).

The grid driver refits every cell from scratch; nothing is warm-started
across cells, so a cell's result depends only on (data, K, Q, seed).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import log
from typing import Dict, Iterable, Optional, Tuple

from .core import (
    DomainError,
    FitConfig,
    HardPartition,
    MultilayerGraph,
    PriorHyperparams,
    VariationalState,
)
from .inference import _xlogx, compute_elbo, fit, m_step

__all__ = [
    "pen",
    "ilvb",
    "icl_exact",
    "icl_variational",
    "icl_approx",
    "GridCell",
    "SelectionResult",
    "grid_search",
    "CRITERIA",
]

CRITERIA = ("ilvb", "icl_exact", "icl_variational", "icl_approx")


def pen(k: int, q: int, n: int, v: int) -> float:
    """Asymptotic model-complexity penalty.

    pen = 1/2 K(K+1)/2 Q log(V N(N-1)/2) + (K-1)/2 log N + (Q-1)/2 log V.
    """
    if k < 1 or q < 1 or n < 2 or v < 1:
        raise DomainError("need k, q >= 1, n >= 2, v >= 1")
    cells = v * (n * (n - 1) // 2)
    return 0.5 * (k * (k + 1) / 2) * q * log(cells) + 0.5 * (k - 1) * log(n) + 0.5 * (q - 1) * log(v)


def ilvb(state: VariationalState, priors: PriorHyperparams) -> float:
    """The bound at `state`; identical by construction to compute_elbo."""
    return compute_elbo(state, priors)


def _hardened_state(g: MultilayerGraph, z: HardPartition, w: HardPartition, priors: PriorHyperparams) -> VariationalState:
    state = VariationalState(
        tau=z.one_hot(),
        nu=w.one_hot(),
        beta=priors.beta0,
        theta=priors.theta0,
        eta=priors.eta0,
        xi=priors.xi0,
    )
    beta, theta, eta, xi = m_step(g, state, priors)
    return VariationalState(tau=state.tau, nu=state.nu, beta=beta, theta=theta, eta=eta, xi=xi)


def icl_exact(
    g: MultilayerGraph,
    z: HardPartition,
    w: HardPartition,
    priors: Optional[PriorHyperparams] = None,
) -> float:
    """Exact integrated completed likelihood of hard partitions.

    With one-hot assignments the responsibility entropies vanish, so the
    bound evaluated at the hardened state is exactly the sum of conjugate
    normalizer ratios; sharing that code path keeps the hard/soft criteria
    consistent to the last bit.
    """
    if z.n != g.n or w.n != g.v:
        raise DomainError("partition lengths must match the graph")
    if priors is None:
        priors = PriorHyperparams.jeffreys(z.k, w.k)
    elif priors.k != z.k or priors.q != w.k:
        raise DomainError("prior shapes must match the partitions")
    return compute_elbo(_hardened_state(g, z, w, priors), priors)


def icl_variational(state: VariationalState, priors: PriorHyperparams) -> float:
    """The normalizer-ratio part of the bound at soft counts: ilvb plus the
    (nonpositive) responsibility log masses sum tau log tau + sum nu log nu."""
    return compute_elbo(state, priors) + _xlogx(state.tau) + _xlogx(state.nu)


def icl_approx(elbo: float, k: int, q: int, n: int, v: int) -> float:
    """Penalized bound: the given bound value minus pen(k, q) at size (n, v)."""
    return elbo - pen(k, q, n, v)


@dataclass(frozen=True)
class GridCell:
    """One (k, q) cell's outcome. On failure `error` carries the message and
    every criterion is None; failed cells never win the argmax."""

    k: int
    q: int
    ilvb: Optional[float]
    icl_exact: Optional[float]
    icl_variational: Optional[float]
    icl_approx: Optional[float]
    converged: Optional[bool]
    iterations: Optional[int] = None
    error: Optional[str] = None


@dataclass(frozen=True)
class SelectionResult:
    """All grid cells (sorted by (k, q)), the per-criterion winners, and the
    winner under the criterion the search was asked to optimize."""

    cells: Tuple[GridCell, ...]
    chosen: Dict[str, Tuple[int, int]]
    criterion: str
    best: Optional[Tuple[int, int]]


def _run_cell(args) -> GridCell:
    g, k, q, cfg = args
    try:
        priors = PriorHyperparams.jeffreys(k, q)
        report = fit(g, k, q, cfg)
        state = report.state
        bound = ilvb(state, priors)
        return GridCell(
            k=k,
            q=q,
            ilvb=bound,
            icl_exact=icl_exact(g, report.z_map, report.w_map, priors),
            icl_variational=icl_variational(state, priors),
            icl_approx=icl_approx(bound, k, q, g.n, g.v),
            converged=report.converged,
            iterations=report.iterations,
        )
    except Exception as exc:  # a failed cell is data, not a crash
        return GridCell(k=k, q=q, ilvb=None, icl_exact=None, icl_variational=None,
                        icl_approx=None, converged=None, iterations=None,
                        error=f"{type(exc).__name__}: {exc}")


def grid_search(
    g: MultilayerGraph,
    k_values: Iterable[int],
    q_values: Iterable[int],
    cfg: FitConfig,
    criterion: str = "ilvb",
    jobs: int = 1,
) -> SelectionResult:
    """Fit every (k, q) in the product grid and rank the cells.

    Cells run independently; with jobs > 1 they are farmed out to worker
    processes. Each cell derives its randomness from (cfg.seed, k, q), so
    the result is identical for any `jobs`. All four criteria are recorded
    for every cell and a winner is chosen per criterion by maximization,
    ties broken toward smaller k, then smaller q; `criterion` names the one
    reported as `best`.
    """
    ks = sorted(set(int(k) for k in k_values))
    qs = sorted(set(int(q) for q in q_values))
    if not ks or not qs:
        raise DomainError("k_values and q_values must be nonempty")
    if ks[0] < 1 or ks[-1] > g.n or qs[0] < 1 or qs[-1] > g.v:
        raise DomainError(
            f"grid values must lie in [1, {g.n}] x [1, {g.v}]"
        )
    if criterion not in CRITERIA:
        raise DomainError(f"criterion must be one of {CRITERIA}")
    if jobs < 1:
        raise DomainError("jobs must be >= 1")

    tasks = [(g, k, q, cfg) for k in ks for q in qs]
    if jobs == 1:
        cells = [_run_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_run_cell, tasks))
    cells.sort(key=lambda c: (c.k, c.q))

    chosen: Dict[str, Tuple[int, int]] = {}
    for crit in CRITERIA:
        best = None
        for c in cells:
            val = getattr(c, crit)
            if val is None:
                continue
            if best is None or val > best[0]:
                best = (val, (c.k, c.q))
        if best is not None:
            chosen[crit] = best[1]
    return SelectionResult(
        cells=tuple(cells),
        chosen=chosen,
        criterion=criterion,
        best=chosen.get(criterion),
    )
