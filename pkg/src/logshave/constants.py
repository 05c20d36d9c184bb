"""Numeric solutions of every constant-defining equation of the analysis.

The base pair (eps1, eps2) solves two coupled entropy equations; beta
and lambda derive from them.  The density-dependent family (beta(rho),
eps1'(rho), gamma*(rho)) solves a three-way chain that balances the two
case analyses of the combined solver.  Everything is found by bracketed
bisection on monotone residuals — deterministic, reproducible, and
checked to residuals far below the reported precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "ConstantSet",
    "ConvergenceError",
    "entropy",
    "entropy_inv_lower",
    "solve_base_constants",
    "solve_case_constants",
    "boundary_rho",
    "max_speedup_exponent",
    "emit_curves",
    "curves_csv",
    "binomial_prefix_sum",
    "stirling_upper",
]

RESIDUAL_TOL = 1e-9
_BISECT_TOL = 1e-15
FUDGE = 1.0 - 1e-5  # strictness factor keeping the lambda/2 branch minimal
RHO_MAX = 1.01


class ConvergenceError(RuntimeError):
    """A solver failed to reach the required residual tolerance."""


def entropy(y: float) -> float:
    """Binary entropy H(y) in bits, with H(0) = H(1) = 0 by continuity."""
    if not (0.0 <= y <= 1.0):
        raise ValueError(f"entropy argument {y} outside [0, 1]")
    if y == 0.0 or y == 1.0:
        return 0.0
    return -y * math.log2(y) - (1.0 - y) * math.log2(1.0 - y)


def entropy_inv_lower(target: float) -> float:
    """The inverse of H restricted to [0, 1/2] (where H is increasing)."""
    if not (0.0 <= target <= 1.0):
        raise ValueError(f"entropy value {target} outside [0, 1]")
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if entropy(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < _BISECT_TOL:
            break
    return 0.5 * (lo + hi)


def _bisect(f, lo: float, hi: float, iters: int = 200) -> float:
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ConvergenceError(
            f"no sign change on [{lo}, {hi}]: f(lo)={flo:.3e}, f(hi)={fhi:.3e}"
        )
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < _BISECT_TOL:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ConstantSet:
    """Solved constants; density-dependent fields set when rho is given."""

    eps1: float
    eps2: float
    beta: float
    lambda_: float
    gamma_star: float
    delta: float
    rho: float | None = None
    beta_rho: float | None = None
    lambda_rho: float | None = None
    gamma_star_rho: float | None = None
    eps1_prime: float | None = None
    alpha_star: float | None = None
    e1: float | None = None
    e2: float | None = None
    active_branch: str | None = None
    candidates: tuple[tuple[str, float], ...] | None = None
    residuals: tuple[float, ...] | None = None


def _active_branches(candidates, tol: float = 1e-12) -> str:
    """Names of every candidate within tol of the minimum (ties listed)."""
    best = min(v for _, v in candidates)
    return ",".join(name for name, v in candidates if v <= best + tol)


def _eps2_from_eps1(e1: float) -> float:
    """Second coupling equation, solved for eps2 given eps1."""
    rhs = (3.0 * entropy((1.0 - e1) / 2.0) - 1.0 - e1) / 2.0
    if not (0.0 <= rhs <= 1.0):
        raise ConvergenceError(f"entropy target {rhs} out of range at eps1={e1}")
    return 4.0 * entropy_inv_lower(rhs) - 1.0


def _eps_residual(e1: float) -> float:
    """First coupling equation as a one-dimensional residual in eps1."""
    e2 = _eps2_from_eps1(e1)
    half = (1.0 - e1) / 2.0
    return (1.0 - entropy(half)) / half - (1.0 - entropy((1.0 - e2) / 2.0))


@lru_cache(maxsize=1)
def solve_base_constants() -> ConstantSet:
    """Solve the coupled pair, then derive beta, lambda, gamma*.

    The residual is scanned for a sign change on a coarse grid and then
    bisected; both equations are re-checked at the solution.
    """
    grid_lo, grid_hi, steps = 0.10, 0.22, 96
    xs = [grid_lo + (grid_hi - grid_lo) * k / steps for k in range(steps + 1)]
    bracket = None
    prev_x, prev_f = xs[0], _eps_residual(xs[0])
    for x in xs[1:]:
        fx = _eps_residual(x)
        if prev_f == 0.0 or (prev_f > 0) != (fx > 0):
            bracket = (prev_x, x)
            break
        prev_x, prev_f = x, fx
    if bracket is None:
        raise ConvergenceError("no bracket for the coupled constants")
    eps1 = _bisect(_eps_residual, *bracket)
    eps2 = _eps2_from_eps1(eps1)

    h_quarterish = entropy((1.0 + eps2) / 4.0)
    beta = 1.0 / h_quarterish
    lam = FUDGE * ((1.0 - eps1) / 2.0) * beta * (1.0 - entropy((1.0 - eps2) / 2.0))
    candidates = (
        ("half-lambda", lam / 2.0),
        ("unbalanced-band", (1.0 - entropy((1.0 - eps1) / 2.0)) * beta / 2.0),
        ("couple-budget", (1.0 - eps1 / 2.0) * beta - (1.0 + lam)),
    )
    gamma_star = min(v for _, v in candidates)
    active = _active_branches(candidates)
    delta = (1.0 - entropy((1.0 - eps1) / 2.0)) * beta

    res1 = abs(_eps_residual(eps1))
    res2 = abs(
        (1.0 + eps1 - 3.0 * entropy((1.0 - eps1) / 2.0))
        - (-2.0 * entropy((1.0 + eps2) / 4.0))
    )
    if max(res1, res2) > RESIDUAL_TOL:
        raise ConvergenceError(f"base residuals too large: {res1:.3e}, {res2:.3e}")
    return ConstantSet(
        eps1=eps1,
        eps2=eps2,
        beta=beta,
        lambda_=lam,
        gamma_star=gamma_star,
        delta=delta,
        e1=eps1,
        e2=eps2,
        active_branch=active,
        candidates=candidates,
        residuals=(res1, res2),
    )


def chain_factor() -> float:
    """gamma*(rho) / beta(rho): the constant printed as 9.0324e-3."""
    base = solve_base_constants()
    return base.lambda_ / (2.0 * base.beta)


def boundary_rho() -> float:
    """Lower end of the valid density range: 1 / (2 - H(1/4))."""
    return 1.0 / (2.0 - entropy(0.25))


def max_speedup_exponent() -> float:
    """Limit of the speedup exponent as rho approaches the boundary."""
    return (2.0 - entropy(0.25)) / 2.0


def _eps1_prime_of(gamma: float, rho: float) -> float:
    target = 1.0 - 4.0 * gamma / rho
    return 1.0 - 2.0 * entropy_inv_lower(target)


@lru_cache(maxsize=4096)
def solve_case_constants(rho: float) -> ConstantSet:
    """Solve the three-way density chain at the given rho.

    Chain: gamma = chain_factor * beta, gamma = (1 - H((1-eps1')/2))/4 *
    rho, and gamma = (4 - 2H(1/4) - eps1')/4 * rho - 1/2 - beta/4, with
    gamma as the bisected unknown.  Valid only strictly above the
    density boundary and up to RHO_MAX.
    """
    lo = boundary_rho()
    if not (lo < rho <= RHO_MAX):
        raise ValueError(
            f"density rho={rho} outside ({lo:.6f}, {RHO_MAX}]: below the "
            "boundary the packed route offers no speedup over plain packed "
            "scanning and the case analysis does not apply"
        )
    base = solve_base_constants()
    cfact = chain_factor()
    h_quarter = entropy(0.25)

    def g(gamma: float) -> float:
        eps1p = _eps1_prime_of(gamma, rho)
        beta = gamma / cfact
        return ((4.0 - 2.0 * h_quarter - eps1p) / 4.0) * rho - 0.5 - beta / 4.0 - gamma

    gamma = _bisect(g, 1e-13, rho / 4.0 - 1e-13)
    beta_rho = gamma / cfact
    eps1p = _eps1_prime_of(gamma, rho)
    lambda_rho = 2.0 * gamma
    alpha_star = (1.0 + 2.0 * gamma) / (2.0 * rho)

    # residuals of all three chain members against gamma
    r1 = abs(cfact * beta_rho - gamma)
    r2 = abs(((1.0 - entropy((1.0 - eps1p) / 2.0)) / 4.0) * rho - gamma)
    r3 = abs(g(gamma))
    if max(r1, r2, r3) > RESIDUAL_TOL:
        raise ConvergenceError(f"chain residuals too large: {r1:.3e} {r2:.3e} {r3:.3e}")

    # record which branch of the two case minima binds at this rho
    case1_terms = (
        ("case1-residue-spread", ((1.0 - entropy((1.0 - eps1p) / 2.0)) / 4.0) * rho),
        (
            "case1-budget",
            ((4.0 - 2.0 * h_quarter - eps1p) / 4.0) * rho - 0.5 - beta_rho / 4.0,
        ),
    )
    case2_terms = (
        ("case2-half-lambda", lambda_rho / 2.0),
        (
            "case2-unbalanced-band",
            (1.0 - entropy((1.0 - base.eps1) / 2.0)) * beta_rho / 2.0,
        ),
        (
            "case2-couple-budget",
            (1.0 - entropy((1.0 + base.eps2) / 4.0) - base.eps1 / 2.0) * beta_rho
            - lambda_rho,
        ),
    )
    candidates = case1_terms + case2_terms
    active = _active_branches(candidates, tol=10.0 * RESIDUAL_TOL)

    return ConstantSet(
        eps1=base.eps1,
        eps2=base.eps2,
        beta=base.beta,
        lambda_=base.lambda_,
        gamma_star=base.gamma_star,
        delta=base.delta,
        rho=rho,
        beta_rho=beta_rho,
        lambda_rho=lambda_rho,
        gamma_star_rho=gamma,
        eps1_prime=eps1p,
        alpha_star=alpha_star,
        e1=eps1p,
        e2=base.eps2,
        active_branch=active,
        candidates=candidates,
        residuals=(r1, r2, r3),
    )


def emit_curves(rho_grid) -> list[ConstantSet]:
    """Solve the chain across a grid; the speedup exponent must fall as
    density rises (checked whenever the grid is sorted ascending)."""
    rows = [solve_case_constants(float(r)) for r in rho_grid]
    rhos = [row.rho for row in rows]
    if rhos == sorted(rhos):
        for prev, cur in zip(rows, rows[1:]):
            if cur.alpha_star > prev.alpha_star + 1e-12:
                raise ConvergenceError(
                    f"alpha* must decrease in rho: {prev.rho}->{cur.rho}"
                )
    return rows


def curves_csv(rho_grid) -> str:
    """CSV of the solved curves, 9 significant digits per field."""
    rows = emit_curves(rho_grid)
    lines = ["rho,alpha_star,gamma_star,beta,eps1_prime"]
    for row in rows:
        lines.append(
            ",".join(
                f"{x:.9g}"
                for x in (
                    row.rho,
                    row.alpha_star,
                    row.gamma_star_rho,
                    row.beta_rho,
                    row.eps1_prime,
                )
            )
        )
    return "\n".join(lines) + "\n"


def binomial_prefix_sum(n: int, j: int) -> int:
    """Sum of C(n, i) for i = 0..j."""
    return sum(math.comb(n, i) for i in range(j + 1))


def stirling_upper(n: int, j: int) -> float:
    """Entropy upper bound 2^(H(j/n) * n) for the binomial prefix sum."""
    if n == 0:
        return 1.0
    return 2.0 ** (entropy(j / n) * n)
