"""L1-regularized linear regression by cyclic coordinate descent.

A regularization path is computed over a descending lambda grid with
warm starts; feature selection ranks columns by how early they enter
the path (largest lambda with a nonzero coefficient), merged across
one-vs-rest class targets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NonFiniteValue
from .psyfeat import FeatureMatrix

CONVERGENCE_TOL = 1e-7
MAX_SWEEPS = 10_000
GRID_POINTS = 100
GRID_FLOOR = 0.001  # smallest lambda as a fraction of lambda_max


@dataclass(frozen=True)
class LassoPath:
    lambdas: np.ndarray  # descending
    coefficients: np.ndarray  # (n_lambdas, n_features)
    first_entry: np.ndarray  # per feature: largest lambda with nonzero coef, -inf if never
    objective_history: list | None = None  # per-lambda sweep objectives when recorded


@dataclass(frozen=True)
class SelectionMask:
    kept: tuple[int, ...]  # ascending column indices
    k_requested: int
    kept_names: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "kept": list(self.kept),
            "k_requested": self.k_requested,
            "kept_names": list(self.kept_names),
        }


def _solve_dependent_to_zero(a: np.ndarray, b: np.ndarray):
    """Solve a @ z = b by Gaussian elimination with partial pivoting.

    Exactly dependent columns (no usable pivot) are set to zero, which
    equals solving the reduced system with those columns removed and
    leaves the fitted span unchanged for gram matrices of collinear
    feature sets; callers must verify the result. Returns a
    (solution, frozen column indices, pivot column indices) triple;
    the solution is None only for empty systems.
    """
    m = b.shape[0]
    if m == 0:
        return None, (), ()
    aug = np.hstack([a.astype(float), b.reshape(-1, 1).astype(float)])
    scale = float(np.max(np.abs(a))) or 1.0
    eps = 1e-12 * scale
    pivots = []  # (row, col)
    frozen = []
    row = 0
    for col in range(m):
        if row >= m:
            frozen.append(col)
            continue
        best = row + int(np.argmax(np.abs(aug[row:, col])))
        if abs(aug[best, col]) <= eps:
            frozen.append(col)
            continue
        if best != row:
            aug[[row, best]] = aug[[best, row]]
        factors = aug[row + 1 :, col] / aug[row, col]
        aug[row + 1 :] -= factors[:, None] * aug[row]
        aug[row + 1 :, col] = 0.0
        pivots.append((row, col))
        row += 1
    z = np.zeros(m)
    for prow, pcol in reversed(pivots):
        acc = aug[prow, m] - float(aug[prow, :m] @ z) + aug[prow, pcol] * z[pcol]
        z[pcol] = acc / aug[prow, pcol]
    return z, tuple(frozen), tuple(col for _, col in pivots)


def lambda_max(x: np.ndarray, y: np.ndarray) -> float:
    n = x.shape[0]
    return float(np.max(np.abs(x.T @ y)) / n)


def lasso_path(
    x: np.ndarray,
    y: np.ndarray,
    lambdas: np.ndarray,
    record_objectives: bool = False,
) -> LassoPath:
    """Coordinate-descent solutions of (1/2n)|y-Xb|^2 + lam*|b|_1 per lambda.

    Expects standardized columns and centered y (advisory). Coordinate
    updates use precomputed Gram products, so each sweep costs O(d^2)
    regardless of sample count. Warm-started along the descending grid;
    a lambda is converged when no coefficient moves more than 1e-7.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.size == 0:
        raise InputError("lambda grid is empty")
    if np.any(np.diff(lambdas) > 0):
        raise InputError("lambda grid must be descending")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.all(np.isfinite(lambdas))):
        raise NonFiniteValue("lasso_path inputs must be finite")
    n, d = x.shape
    if y.shape != (n,):
        raise InputError(f"y has shape {y.shape}, expected ({n},)")

    # The sweep loop runs on plain Python floats: at registry-size d the
    # numpy per-call overhead dwarfs the arithmetic.
    gram = [[float(v) for v in row] for row in x.T @ x / n]
    xty = [float(v) for v in x.T @ y / n]
    diag = [row[j] for j, row in enumerate(gram)]
    beta = [0.0] * d
    gram_beta = [0.0] * d  # gram @ beta, maintained incrementally

    coefs = np.empty((lambdas.size, d))
    first_entry = np.full(d, -np.inf)
    histories: list | None = [] if record_objectives else None

    def sweep(indices, lam: float) -> float:
        max_delta = 0.0
        for j in indices:
            old = beta[j]
            rho = xty[j] - gram_beta[j] + diag[j] * old
            if rho > lam:
                new = (rho - lam) / diag[j]
            elif rho < -lam:
                new = (rho + lam) / diag[j]
            else:
                new = 0.0
            if new != old:
                delta = new - old
                row = gram[j]
                for i in range(d):
                    gram_beta[i] += row[i] * delta
                beta[j] = new
                if delta < 0.0:
                    delta = -delta
                if delta > max_delta:
                    max_delta = delta
        if record_objectives:
            b = np.asarray(beta)
            residual = y - x @ b
            history.append(
                float(residual @ residual / (2 * n) + lam * np.sum(np.abs(b)))
            )
        return max_delta

    gram_arr = x.T @ x / n
    xty_arr = np.asarray(xty)

    def objective_at(b, gb, lam: float) -> float:
        # 0.5*b'Gb - xty'b + lam*|b|_1, the (1/2n)|y|^2 constant dropped
        total = 0.0
        for j in range(d):
            total += (0.5 * gb[j] - xty[j]) * b[j] + lam * abs(b[j])
        return total

    def try_manifold_jump(lam: float) -> bool:
        """Search for the exact minimizer near the current sign pattern.

        Once the active set and signs roughly settle, remaining sweeps
        only crawl along an ill-conditioned quadratic whose minimizer
        solves gram_AA @ b = xty_A - lam*sign_A. The pattern is refined
        a bounded number of times: coordinates whose solution flips
        sign are flipped, exact-zero solutions leave the set, features
        whose gradient beats lam enter, and an exactly dependent column
        that the subgradient wants active displaces the cheapest column
        spanning it. A candidate is written back only when it satisfies
        the subgradient conditions everywhere, i.e. it is a true
        optimum, so the objective stays monotone.
        """
        sgn = {j: (1.0 if beta[j] > 0 else -1.0) for j in range(d) if beta[j] != 0.0}
        if not sgn:
            return False
        seen = set()
        for _ in range(10):
            key = tuple(sorted(sgn.items()))
            if key in seen:
                return False
            seen.add(key)
            idx = sorted(sgn)
            signs = np.array([sgn[j] for j in idx])
            solved, frozen, pivots = _solve_dependent_to_zero(
                gram_arr[np.ix_(idx, idx)], xty_arr[idx] - lam * signs
            )
            if solved is None:
                return False
            frozen_cols = {idx[i] for i in frozen}
            refined = dict(sgn)
            changed = False
            for i, j in enumerate(idx):
                if j in frozen_cols:
                    continue
                if solved[i] == 0.0:
                    del refined[j]
                    changed = True
                elif (solved[i] > 0) != (signs[i] > 0):
                    refined[j] = -signs[i]
                    changed = True
            if changed:
                if not refined:
                    return False
                sgn = refined
                continue
            cand = np.zeros(d)
            cand[np.asarray(idx)] = solved
            gb = gram_arr @ cand
            grad = gb - xty_arr
            bad_frozen = [j for j in frozen_cols if abs(grad[j]) > lam + 1e-9]
            if bad_frozen:
                worst_frozen = max(bad_frozen, key=lambda j: abs(grad[j]))
                pivot_cols = [idx[i] for i in pivots]
                if not pivot_cols:
                    return False
                span, _, _ = _solve_dependent_to_zero(
                    gram_arr[np.ix_(pivot_cols, pivot_cols)],
                    gram_arr[np.asarray(pivot_cols), worst_frozen],
                )
                if span is None:
                    return False
                family = [
                    pivot_cols[i]
                    for i in range(len(pivot_cols))
                    if abs(span[i]) > 1e-8 and pivot_cols[i] in sgn
                ]
                if not family:
                    return False
                victim = min(family, key=lambda p: abs(beta[p]))
                del sgn[victim]
                continue
            for j in frozen_cols:
                if j in sgn:
                    del sgn[j]
            entrant = -1
            entrant_v = lam + 1e-9
            for j in range(d):
                if cand[j] != 0.0:
                    if abs(grad[j] + lam * (1.0 if cand[j] > 0 else -1.0)) > 1e-9:
                        return False
                else:
                    a = abs(grad[j])
                    if a > entrant_v:
                        entrant, entrant_v = j, a
            if entrant >= 0:
                sgn[entrant] = -1.0 if grad[entrant] > 0 else 1.0
                continue
            for j in range(d):
                beta[j] = float(cand[j])
                gram_beta[j] = float(gb[j])
            return True
        return False

    def try_extrapolation(lam: float, older, recent) -> bool:
        """Aitken step along the dominant geometric crawl mode.

        Ill-conditioned gram matrices make the per-sweep updates decay
        by a near-1 ratio; three consecutive iterates estimate that
        ratio and project its limit, backtracking the step when the
        projection overshoots. Accepted only when the objective does
        not increase, so the descent property is preserved.
        """
        step_new = [beta[j] - recent[j] for j in range(d)]
        step_old = [recent[j] - older[j] for j in range(d)]
        num = sum(a * b for a, b in zip(step_new, step_old))
        den = sum(a * a for a in step_old)
        if den <= 0.0:
            return False
        ratio = num / den
        if not 0.0 < ratio < 0.9999999:
            return False
        factor = ratio / (1.0 - ratio)
        current = objective_at(beta, gram_beta, lam)
        for _ in range(4):
            cand = [beta[j] + factor * step_new[j] for j in range(d)]
            gb = gram_arr @ np.asarray(cand)
            if objective_at(cand, gb, lam) <= current:
                for j in range(d):
                    beta[j] = cand[j]
                    gram_beta[j] = float(gb[j])
                return True
            factor *= 0.25
        return False

    everything = range(d)
    for li, lam in enumerate(lambdas):
        lam = float(lam)
        history: list[float] = []
        prev_pattern = None
        backoff = 4  # sweeps between acceleration attempts, doubled on failure
        since_attempt = 0
        recent = older = None
        # a jump from a given sign pattern is deterministic, so a failed
        # start pattern can never certify later at the same lambda
        failed_starts: set = set()
        for sweep_no in range(MAX_SWEEPS):
            older, recent = recent, list(beta)
            max_delta = sweep(everything, lam)
            if max_delta < CONVERGENCE_TOL:
                break
            since_attempt += 1
            pattern = tuple(
                0 if beta[j] == 0.0 else (1 if beta[j] > 0 else -1) for j in everything
            )
            # acceleration only pays once updates are small and the
            # pattern is repeating; early large-step sweeps stay plain
            if max_delta < 1e-3 and pattern == prev_pattern and since_attempt >= backoff:
                since_attempt = 0
                moved = False
                if pattern not in failed_starts:
                    moved = try_manifold_jump(lam)
                    if not moved:
                        failed_starts.add(pattern)
                if not moved and older is not None:
                    moved = try_extrapolation(lam, older, recent)
                if moved:
                    # termination still requires a verifying plain sweep
                    prev_pattern = None
                    backoff = 4
                else:
                    backoff = min(backoff * 2, 64)
                continue
            prev_pattern = pattern
        coefs[li] = beta
        if histories is not None:
            histories.append(history)
        for j in everything:
            if beta[j] != 0.0 and first_entry[j] == -np.inf:
                first_entry[j] = lam

    return LassoPath(lambdas.copy(), coefs, first_entry, histories)


def default_grid(lam_max: float) -> np.ndarray:
    return lam_max * np.logspace(0.0, np.log10(GRID_FLOOR), GRID_POINTS)


def select_topk(x: np.ndarray, labels: list[str], k: int) -> SelectionMask:
    """Keep the k columns entering one-vs-rest lasso paths earliest.

    For each class a +1/-1 regression target is fit along a 100-point
    log grid from lambda_max down to 0.001*lambda_max. A feature's rank
    is the largest lambda at which it is ever nonzero across targets;
    ties prefer the larger final-|coefficient|, then the lower index.
    Never-entering columns are not kept, so fewer than k may return.
    """
    if k <= 0:
        raise InputError("select_topk requires k >= 1")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue("select_topk features must be finite")
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise InputError("select_topk requires at least 2 classes")
    n, d = x.shape
    if len(labels) != n:
        raise InputError(f"{len(labels)} labels for {n} rows")

    mu = x.mean(axis=0)
    sigma = x.std(axis=0, ddof=0)
    sigma = np.where(sigma == 0, 1.0, sigma)
    xs = (x - mu) / sigma

    first_entry = np.full(d, -np.inf)
    final_coef = np.zeros(d)
    for cls in classes:
        y = np.where(np.asarray(labels) == cls, 1.0, -1.0)
        y = y - y.mean()
        lam_max = lambda_max(xs, y)
        if lam_max <= 0:
            continue
        path = lasso_path(xs, y, default_grid(lam_max))
        first_entry = np.maximum(first_entry, path.first_entry)
        final_coef = np.maximum(final_coef, np.abs(path.coefficients[-1]))

    entering = np.flatnonzero(first_entry > -np.inf)
    order = sorted(entering, key=lambda j: (-first_entry[j], -final_coef[j], j))
    kept = tuple(sorted(int(j) for j in order[: min(k, len(order))]))
    return SelectionMask(kept, k)


def apply_selection(mask: SelectionMask, x: FeatureMatrix) -> FeatureMatrix:
    names = [x.column_names[i] for i in mask.kept]
    return FeatureMatrix(names, x.rows[:, list(mask.kept)], list(x.row_ids))
