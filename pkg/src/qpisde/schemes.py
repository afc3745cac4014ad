"""Numerical schemes for GBM: the two-step quadratic-interpolation method
and the Euler-Maruyama, drift-implicit EM and Milstein references.

All updates are linear in the state, so trajectories are built from
per-step (or per-block) multipliers. The two-step method advances a pair
of nodes at once: with h = mu*dt,

    X_{2n+1} = alpha_n * X_{2n},   X_{2n+2} = beta_n * X_{2n},

where (alpha_n, beta_n) solve a 2x2 linear system obtained from
Simpson-type quadrature of the drift integral over [t_2n, t_2n+2] and
[t_2n, t_2n+1] (weights dt/3, 4dt/3, dt/3 and 5dt/12, 2dt/3, -dt/12 after
eliminating the midpoint), with the diffusion term frozen at X_{2n}.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .brownian import BrownianPath
from .errors import InvalidInputError, SingularBlockError, SingularStepError
from .model import GbmParams, TimeGrid, Trajectory


class SchemeId(enum.Enum):
    QPI = "qpi"
    EULER_MARUYAMA = "em"
    IMPLICIT_EM = "iem"
    MILSTEIN = "milstein"

    @classmethod
    def parse(cls, name: str) -> "SchemeId":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise InvalidInputError(f"unknown scheme {name!r}; expected one of {valid}")


@dataclass(frozen=True)
class QpiBlockCoeffs:
    """Random multipliers (alpha, beta) of one two-step block."""

    alpha: float
    beta: float


def em_step(params: GbmParams, dt: float, x: float, dW: float) -> float:
    """Euler-Maruyama update x + mu*x*dt + sigma*x*dW."""
    if dt <= 0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    return x * (1.0 + params.mu * dt + params.sigma * dW)


def implicit_em_step(params: GbmParams, dt: float, x: float, dW: float) -> float:
    """Drift-implicit EM update, the solution of X' = x + mu*X'*dt + sigma*x*dW."""
    if dt <= 0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    den = 1.0 - params.mu * dt
    if den == 0.0:
        raise SingularStepError(f"implicit EM step singular: mu*dt = 1 (mu={params.mu}, dt={dt})")
    return x * (1.0 + params.sigma * dW) / den


def milstein_step(params: GbmParams, dt: float, x: float, dW: float,
                  sign_convention: str = "standard") -> float:
    """Milstein update with the second-order noise correction.

    sign_convention selects the sign of the (sigma^2/2)(dW^2 - dt) term:
    "standard" adds it, "paper" subtracts it (the sign as printed in the
    source the comparison tables follow).
    """
    if dt <= 0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    if sign_convention not in ("standard", "paper"):
        raise InvalidInputError(f"sign_convention must be 'standard' or 'paper', got {sign_convention!r}")
    sign = 1.0 if sign_convention == "standard" else -1.0
    corr = 0.5 * params.sigma**2 * (dW * dW - dt)
    return x * (1.0 + params.mu * dt + params.sigma * dW + sign * corr)


def _qpi_denominators(h):
    """Denominators D = 1 - h + h^2/3 and E = 1 - h/3 of the block coefficients."""
    return 1.0 - h + h * h / 3.0, 1.0 - h / 3.0


def _qpi_alpha_beta(mu: float, sigma: float, dt: float, dWa, dWb):
    """Vectorized closed-form block multipliers; dWa, dWb may be arrays."""
    h = mu * dt
    d1, d2 = _qpi_denominators(h)
    if d1 == 0.0 or d2 == 0.0:
        raise SingularBlockError(f"block system singular for mu*dt = {h}")
    dWab = dWa + dWb
    alpha = (1.0 - h * h / 6.0 - sigma * (h / 12.0) * dWab
             + sigma * (1.0 - h / 3.0) * dWa) / d1
    beta = (1.0 + h / 3.0 + (4.0 * h / 3.0) * alpha + sigma * dWab) / d2
    return alpha, beta


def qpi_block_coeffs(params: GbmParams, dt: float, dWa: float, dWb: float) -> QpiBlockCoeffs:
    """Closed-form (alpha, beta) for one block from the two step increments.

    dWa is the increment over the first step of the block, dWb over the
    second; dWa + dWb is the full two-step increment entering the frozen
    diffusion term.
    """
    if dt <= 0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    alpha, beta = _qpi_alpha_beta(params.mu, params.sigma, dt, dWa, dWb)
    return QpiBlockCoeffs(alpha=float(alpha), beta=float(beta))


def qpi_block_solve_oracle(params: GbmParams, dt: float, dWa: float, dWb: float) -> QpiBlockCoeffs:
    """Reference (alpha, beta) from a direct numerical solve of the block system.

    Sets up the 2x2 system in (X_{2n+1}, X_{2n+2}) with X_{2n} = 1:

        (1 - 2h/3) a + (h/12)  b = 1 + 5h/12 + sigma*dWa
        -(4h/3)    a + (1-h/3) b = 1 + h/3   + sigma*(dWa+dWb)

    Kept independent of the closed form; used to cross-check it in tests.
    """
    if dt <= 0:
        raise InvalidInputError(f"dt must be positive, got {dt}")
    h = params.mu * dt
    s = params.sigma
    d1, d2 = _qpi_denominators(h)
    if d1 == 0.0 or d2 == 0.0:
        raise SingularBlockError(f"block system singular for mu*dt = {h}")
    m = np.array([[1.0 - 2.0 * h / 3.0, h / 12.0],
                  [-4.0 * h / 3.0, 1.0 - h / 3.0]])
    rhs = np.array([1.0 + 5.0 * h / 12.0 + s * dWa,
                    1.0 + h / 3.0 + s * (dWa + dWb)])
    alpha, beta = np.linalg.solve(m, rhs)
    return QpiBlockCoeffs(alpha=float(alpha), beta=float(beta))


def _one_step_multipliers(scheme: SchemeId, params: GbmParams, dt: float,
                          dW: np.ndarray, milstein_sign: str) -> np.ndarray:
    mu, sigma = params.mu, params.sigma
    if scheme is SchemeId.EULER_MARUYAMA:
        return 1.0 + mu * dt + sigma * dW
    if scheme is SchemeId.IMPLICIT_EM:
        den = 1.0 - mu * dt
        if den == 0.0:
            raise SingularStepError(f"implicit EM step singular: mu*dt = 1 (mu={mu}, dt={dt})")
        return (1.0 + sigma * dW) / den
    if scheme is SchemeId.MILSTEIN:
        if milstein_sign not in ("standard", "paper"):
            raise InvalidInputError(
                f"milstein_sign must be 'standard' or 'paper', got {milstein_sign!r}")
        sign = 1.0 if milstein_sign == "standard" else -1.0
        return 1.0 + mu * dt + sigma * dW + sign * 0.5 * sigma**2 * (dW * dW - dt)
    raise InvalidInputError(f"not a one-step scheme: {scheme}")


def integrate(scheme: SchemeId, params: GbmParams, grid: TimeGrid,
              path: BrownianPath, milstein_sign: str = "standard") -> Trajectory:
    """Run one scheme over the whole grid, driven by a matching Wiener path.

    The path must already be coarsened to the grid resolution. The two-step
    scheme requires an even number of steps and fills nodes pairwise from
    the block multipliers; the one-step schemes fill sequentially.
    """
    if path.n_fine != grid.n_steps:
        raise InvalidInputError(
            f"path resolution {path.n_fine} does not match grid n_steps {grid.n_steps}")
    dt = grid.dt
    dW = path.increments
    # unit-x0 trajectory scaled once at the end, so trajectories are
    # node-wise exactly linear in x0
    if scheme is SchemeId.QPI:
        grid.require_even()
        alpha, beta = _qpi_alpha_beta(params.mu, params.sigma, dt,
                                      dW[0::2], dW[1::2])
        even = np.concatenate(([1.0], np.cumprod(beta)))
        values = np.empty(grid.n_steps + 1)
        values[0::2] = even
        values[1::2] = alpha * even[:-1]
    else:
        mult = _one_step_multipliers(scheme, params, dt, dW, milstein_sign)
        values = np.concatenate(([1.0], np.cumprod(mult)))
    return Trajectory(times=grid.times, values=params.x0 * values)
