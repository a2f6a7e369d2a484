"""Parametrized maps on R^N and the built-in example systems.

A :class:`MapDefinition` bundles a one-parameter family ``F(lam, x)`` with
its spatial Jacobian.  Built-ins cover the interval maps used for counting
(tent, three-slope tent, product tents), polynomial families (quadratic,
cubic, coupled quadratic, with optional perturbations), two planar
diffeomorphisms (Ikeda, pulsed rotor), and time-2*pi stroboscopic maps of
two forced oscillators whose Jacobians come from the variational equations.

Evaluation callables are vectorized over leading axes: ``x`` of shape
``(..., N)`` yields values of shape ``(..., N)`` and Jacobians of shape
``(..., N, N)``.  The public wrappers :func:`eval_map` and
:func:`eval_jacobian` operate on single points and check finiteness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BadParameter, NumericalOverflow, TrajectoryEscape, UnknownMap

__all__ = [
    "MapDefinition",
    "OdeSystem",
    "IntegratorConfig",
    "PerturbationSpec",
    "eval_map",
    "eval_jacobian",
    "stroboscopic_map",
    "builtin_map",
    "builtin_names",
    "finite_difference_jacobian",
    "bump_quadratic",
    "validate_map",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MapDefinition:
    """A smooth one-parameter family of maps on R^N.

    Attributes
    ----------
    name : str
        Identifier used in registries, reports, and output headers.
    dimension : int
        Spatial dimension N.
    eval : callable
        ``eval(lam, x) -> F(lam, x)``, vectorized over leading axes of x.
    jacobian : callable
        ``jacobian(lam, x) -> D_x F(lam, x)`` with shape ``(..., N, N)``.
    jacobian_kind : str
        One of ``analytic``, ``finite_difference``, ``variational``.
    param_hint : tuple or None
        Suggested parameter interval for sweeps and sampling.
    box_hint : ndarray or None
        Suggested spatial box, shape (N, 2), for grids and validation.
    angular_coords : tuple
        Indices of coordinates living on a circle of circumference 2*pi;
        orbit distances reduce these mod 2*pi.
    eval_with_jacobian : callable or None
        Optional fused ``(lam, x) -> (F, DF)`` (one ODE integration for
        stroboscopic maps); used by Newton-heavy code paths.
    smooth : bool
        False for the piecewise-linear counting models, which are exempt
        from Jacobian smoothness checks and never fed to Newton.
    """

    name: str
    dimension: int
    eval: Callable[[float, np.ndarray], np.ndarray]
    jacobian: Callable[[float, np.ndarray], np.ndarray]
    jacobian_kind: str = "analytic"
    param_hint: Optional[tuple] = None
    box_hint: Optional[np.ndarray] = None
    angular_coords: tuple = ()
    eval_with_jacobian: Optional[Callable] = None
    smooth: bool = True
    supports_batch: bool = True

    def __post_init__(self):
        if self.dimension < 1:
            raise BadParameter(f"dimension must be positive, got {self.dimension}")
        if self.jacobian_kind not in ("analytic", "finite_difference", "variational"):
            raise BadParameter(f"unknown jacobian_kind {self.jacobian_kind!r}")


@dataclass(frozen=True)
class OdeSystem:
    """Periodically forced vector field ``du/dt = f(lam, t, u)``.

    ``vf_jacobian`` returns ``D_u f`` and feeds the variational equations;
    when absent it is replaced by central differences of the vector field.
    """

    name: str
    dimension: int
    vector_field: Callable[[float, float, np.ndarray], np.ndarray]
    forcing_period: float = TWO_PI
    vf_jacobian: Optional[Callable[[float, float, np.ndarray], np.ndarray]] = None


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings for stroboscopic maps."""

    steps_per_period: int = 512
    escape_radius: float = 1e6

    def __post_init__(self):
        if self.steps_per_period < 64:
            raise BadParameter("steps_per_period must be at least 64")


@dataclass(frozen=True)
class PerturbationSpec:
    """A perturbation ``g(lam, x)`` together with its declared bound.

    ``bound_kind`` selects which inequality the bound ``beta`` asserts:

    - ``quadratic_style``: |g(lam, 0)| < beta and |dg/dx| < beta,
    - ``cubic_style``:     |g(lam, 0)| < beta and |dg/dx| < beta * |x|,
    - ``coupled_style``:   ||g(lam, 0)|| < beta and ||D_x g|| < beta.
    """

    g: Callable[[float, np.ndarray], np.ndarray]
    beta: float
    bound_kind: str = "quadratic_style"
    g_jacobian: Optional[Callable] = None

    def __post_init__(self):
        if self.beta <= 0:
            raise BadParameter("beta must be positive")
        if self.bound_kind not in ("quadratic_style", "cubic_style", "coupled_style"):
            raise BadParameter(f"unknown bound_kind {self.bound_kind!r}")

    def validate(self, param_range, box, n_samples=10_000, rng=None):
        """Sampled check that the declared bound actually holds.

        Draws ``n_samples`` points (lam, x) uniformly from
        ``param_range x box`` and verifies the inequality of
        ``bound_kind``; a violation is a configuration error.
        """
        rng = np.random.default_rng(rng)
        box = np.asarray(box, dtype=float)
        ndim = box.shape[0]
        lams = rng.uniform(param_range[0], param_range[1], size=n_samples)
        xs = rng.uniform(box[:, 0], box[:, 1], size=(n_samples, ndim))
        origin = np.zeros(ndim)
        for lam in lams[:: max(1, n_samples // 512)]:
            g0 = np.linalg.norm(np.atleast_1d(self.g(lam, origin)))
            if not g0 < self.beta:
                raise BadParameter(
                    f"|g(lam,0)|={g0:.6g} >= beta={self.beta:.6g} at lam={lam:.6g}"
                )
        h = 1e-6
        for lam, x in zip(lams, xs):
            gj = self._g_jac(lam, x, h)
            norm = np.linalg.norm(gj, 2)
            if self.bound_kind == "cubic_style":
                bound = self.beta * max(np.linalg.norm(x), 1e-30)
                ok = norm < bound or norm < 1e-12
            else:
                ok = norm < self.beta
            if not ok:
                raise BadParameter(
                    f"perturbation bound violated at lam={lam:.6g}, x={x}: "
                    f"|Dg|={norm:.6g}"
                )
        return True

    def _g_jac(self, lam, x, h):
        if self.g_jacobian is not None:
            return np.atleast_2d(self.g_jacobian(lam, x))
        n = x.size
        out = np.zeros((n, n))
        for i in range(n):
            e = np.zeros(n)
            e[i] = max(h, h * abs(x[i]))
            out[:, i] = (
                np.atleast_1d(self.g(lam, x + e)) - np.atleast_1d(self.g(lam, x - e))
            ) / (2 * e[i])
        return out


# ---------------------------------------------------------------------------
# core operations


def eval_map(map_def: MapDefinition, lam: float, x: np.ndarray) -> np.ndarray:
    """Evaluate ``F(lam, x)`` at a single point, checking finiteness."""
    x = np.asarray(x, dtype=float)
    if x.shape != (map_def.dimension,):
        raise BadParameter(
            f"expected x of shape ({map_def.dimension},), got {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise BadParameter("x must be finite")
    out = np.asarray(map_def.eval(lam, x), dtype=float)
    if not np.all(np.isfinite(out)):
        raise NumericalOverflow(
            f"{map_def.name}: non-finite image at lam={lam:.6g}"
        )
    return out


def eval_jacobian(map_def: MapDefinition, lam: float, x: np.ndarray) -> np.ndarray:
    """Evaluate ``D_x F(lam, x)`` at a single point, checking finiteness."""
    x = np.asarray(x, dtype=float)
    if x.shape != (map_def.dimension,):
        raise BadParameter(
            f"expected x of shape ({map_def.dimension},), got {x.shape}"
        )
    out = np.asarray(map_def.jacobian(lam, x), dtype=float)
    if not np.all(np.isfinite(out)):
        raise NumericalOverflow(
            f"{map_def.name}: non-finite Jacobian at lam={lam:.6g}"
        )
    return out


def finite_difference_jacobian(f, lam, x, h0=1e-6):
    """Central-difference Jacobian with step max(h0, h0*|x_i|) per coordinate."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    base = np.asarray(f(lam, x))
    cols = []
    for i in range(n):
        h = max(h0, h0 * abs(float(np.max(np.abs(x[..., i])))))
        e = np.zeros_like(x)
        e[..., i] = h
        cols.append((np.asarray(f(lam, x + e)) - np.asarray(f(lam, x - e))) / (2 * h))
    jac = np.stack(cols, axis=-1)
    if base.shape != x.shape:  # scalar maps written without trailing axis
        jac = jac.reshape(x.shape + (n,))
    return jac


# ---------------------------------------------------------------------------
# stroboscopic maps


def _rk4_variational(ode: OdeSystem, lam, u0, integ: IntegratorConfig,
                     with_variational=True):
    """Integrate one forcing period; optionally carry the monodromy.

    Batched: ``u0`` of shape (..., N) is advanced elementwise, the
    variational matrix alongside as shape (..., N, N).  Non-finite or
    escaping states raise TrajectoryEscape for single points; batched
    callers should pre-screen.
    """
    n = ode.dimension
    u = np.array(u0, dtype=float)
    steps = integ.steps_per_period
    h = ode.forcing_period / steps
    f = ode.vector_field
    if with_variational:
        jac = ode.vf_jacobian
        if jac is None:
            def jac(lam_, t_, uu, _f=f):
                return finite_difference_jacobian(lambda l_, v: _f(l_, t_, v), lam_, uu)
        eye = np.eye(n)
        m = np.broadcast_to(eye, u.shape + (n,)).copy()

        def mat(a, mm):
            return np.einsum("...ij,...jk->...ik", a, mm)

    t = 0.0
    for _ in range(steps):
        k1 = f(lam, t, u)
        k2 = f(lam, t + 0.5 * h, u + 0.5 * h * k1)
        k3 = f(lam, t + 0.5 * h, u + 0.5 * h * k2)
        k4 = f(lam, t + h, u + h * k3)
        if with_variational:
            a1 = jac(lam, t, u)
            q1 = mat(a1, m)
            a2 = jac(lam, t + 0.5 * h, u + 0.5 * h * k1)
            q2 = mat(a2, m + 0.5 * h * q1)
            a3 = jac(lam, t + 0.5 * h, u + 0.5 * h * k2)
            q3 = mat(a3, m + 0.5 * h * q2)
            a4 = jac(lam, t + h, u + h * k3)
            q4 = mat(a4, m + h * q3)
            m = m + (h / 6.0) * (q1 + 2 * q2 + 2 * q3 + q4)
        u = u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        if u.ndim == 1:
            if not np.all(np.isfinite(u)) or np.linalg.norm(u) > integ.escape_radius:
                raise TrajectoryEscape(
                    f"{ode.name}: state escaped at t={t:.4f}, lam={lam:.6g}"
                )
    if with_variational:
        return u, m
    return u


def stroboscopic_map(ode: OdeSystem, lam: float, x: np.ndarray,
                     integ: Optional[IntegratorConfig] = None):
    """Return ``(u(T), M)``: the time-T state and monodromy matrix.

    The monodromy solves ``dM/dt = D_u f(lam, t, u) M`` with ``M(0) = I``
    along the trajectory, integrated by the same fixed-step RK4 as the
    state, so the pair is a consistent map-plus-Jacobian evaluation.
    """
    integ = integ or IntegratorConfig()
    x = np.asarray(x, dtype=float)
    return _rk4_variational(ode, lam, x, integ, with_variational=True)


def _strobe_map_definition(ode: OdeSystem, integ: IntegratorConfig, *,
                           param_hint, box_hint, angular_coords=()):
    def ev(lam, x):
        return _rk4_variational(ode, lam, x, integ, with_variational=False)

    def jac(lam, x):
        return _rk4_variational(ode, lam, x, integ, with_variational=True)[1]

    def both(lam, x):
        return _rk4_variational(ode, lam, x, integ, with_variational=True)

    return MapDefinition(
        name=f"{ode.name}_strobe",
        dimension=ode.dimension,
        eval=ev,
        jacobian=jac,
        jacobian_kind="variational",
        param_hint=param_hint,
        box_hint=np.asarray(box_hint, dtype=float),
        angular_coords=angular_coords,
        eval_with_jacobian=both,
    )


def duffing_system() -> OdeSystem:
    """Double-well oscillator u'' + 0.3 u' - u + u^3 + 0.01 = lam sin t."""

    def f(lam, t, u):
        du = np.empty_like(u)
        du[..., 0] = u[..., 1]
        du[..., 1] = (lam * math.sin(t) - 0.3 * u[..., 1] + u[..., 0]
                      - u[..., 0] ** 3 - 0.01)
        return du

    def fj(lam, t, u):
        shape = u.shape[:-1]
        j = np.zeros(shape + (2, 2))
        j[..., 0, 1] = 1.0
        j[..., 1, 0] = 1.0 - 3.0 * u[..., 0] ** 2
        j[..., 1, 1] = -0.3
        return j

    return OdeSystem("duffing", 2, f, TWO_PI, fj)


def pendulum_system() -> OdeSystem:
    """Forced damped pendulum theta'' + 0.3 theta' + sin theta = lam cos t."""

    def f(lam, t, u):
        du = np.empty_like(u)
        du[..., 0] = u[..., 1]
        du[..., 1] = lam * math.cos(t) - 0.3 * u[..., 1] - np.sin(u[..., 0])
        return du

    def fj(lam, t, u):
        shape = u.shape[:-1]
        j = np.zeros(shape + (2, 2))
        j[..., 0, 1] = 1.0
        j[..., 1, 0] = -np.cos(u[..., 0])
        j[..., 1, 1] = -0.3
        return j

    return OdeSystem("pendulum", 2, f, TWO_PI, fj)


# ---------------------------------------------------------------------------
# smooth bump used by the built-in large-scale perturbation


def _smoothstep(t):
    """C-infinity transition: 0 for t<=0, 1 for t>=1."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        lo = np.where(t > 0, np.exp(-1.0 / np.clip(t, 1e-300, None)), 0.0)
        hi = np.where(t < 1, np.exp(-1.0 / np.clip(1.0 - t, 1e-300, None)), 0.0)
    return lo / (lo + hi)


def _smoothstep_deriv(t, h=1e-6):
    t = np.asarray(t, dtype=float)
    return (_smoothstep(t + h) - _smoothstep(t - h)) / (2 * h)


def _plateau(r, gamma, width):
    """1 for |r| <= gamma, 0 for |r| >= gamma + width, smooth between."""
    return 1.0 - _smoothstep((np.abs(r) - gamma) / width)


def _plateau_deriv(r, gamma, width):
    return -_smoothstep_deriv((np.abs(r) - gamma) / width) / width * np.sign(r)


def bump_quadratic(gamma: float = 3.0, width: float = 1.0):
    """Quadratic family flattened to zero on the square [-gamma, gamma]^2.

    Returns ``(map_def, spec)`` where the map is
    ``F(lam, x) = (lam - x^2) * (1 - chi(lam, x))`` with ``chi`` a smooth
    plateau equal to 1 on the square and 0 outside its width-``width``
    collar, and ``spec`` carries the perturbation ``g = F - (lam - x^2)``
    with a grid-estimated bound ``beta``.  Outside the collar the family
    is exactly ``lam - x^2``, so for parameters beyond ``gamma + width``
    the dynamics is the unperturbed one.
    """
    if gamma <= 0 or width <= 0:
        raise BadParameter("gamma and width must be positive")

    def chi(lam, x):
        return _plateau(lam, gamma, width) * _plateau(x, gamma, width)

    def g(lam, x):
        x = np.asarray(x, dtype=float)
        x0 = x[..., 0]
        return (-(lam - x0**2) * chi(lam, x0))[..., None]

    def ev(lam, x):
        x = np.asarray(x, dtype=float)
        x0 = x[..., 0]
        return ((lam - x0**2) * (1.0 - chi(lam, x0)))[..., None]

    def jac(lam, x):
        x = np.asarray(x, dtype=float)
        x0 = x[..., 0]
        c = chi(lam, x0)
        dc = _plateau(lam, gamma, width) * _plateau_deriv(x0, gamma, width)
        val = -2.0 * x0 * (1.0 - c) - (lam - x0**2) * dc
        return val[..., None, None]

    beta = _bump_beta(gamma, width)
    lam_hi = 4.0 * (beta + 2.0) ** 2
    lam_lo = -(1.0 + 6.0 * beta + beta**2) / 4.0
    s = math.sqrt(lam_hi * 1.1)
    map_def = MapDefinition(
        name="perturbed_quadratic",
        dimension=1,
        eval=ev,
        jacobian=jac,
        param_hint=(lam_lo * 1.1, lam_hi * 1.1),
        box_hint=np.array([[-2.2 * s, 2.2 * s]]),
    )
    spec = PerturbationSpec(g=g, beta=beta, bound_kind="quadratic_style")
    return map_def, spec


def _bump_beta(gamma, width, n=4001):
    """Grid estimate of the quadratic-style bound for the bump family."""
    supp = gamma + width
    lam = np.linspace(-supp, supp, n)
    x = np.linspace(-supp, supp, n)
    b_lam = _plateau(lam, gamma, width)
    sup_g0 = float(np.max(np.abs(lam * b_lam)))  # |g(lam, 0)|
    bx = _plateau(x, gamma, width)
    dbx = _plateau_deriv(x, gamma, width)
    # dg/dx = 2 x chi - (lam - x^2) b(lam) b'(x); maximize over the grid
    lam2 = lam[:, None]
    term = 2.0 * x[None, :] * (b_lam[:, None] * bx[None, :]) \
        - (lam2 - x[None, :] ** 2) * b_lam[:, None] * dbx[None, :]
    sup_dg = float(np.max(np.abs(term)))
    return 1.02 * max(sup_g0, sup_dg)


# ---------------------------------------------------------------------------
# built-in registry


def _logistic():
    def ev(a, x):
        x0 = np.asarray(x, dtype=float)[..., 0]
        return (a * x0 * (1.0 - x0))[..., None]

    def jac(a, x):
        x0 = np.asarray(x, dtype=float)[..., 0]
        return (a * (1.0 - 2.0 * x0))[..., None, None]

    return MapDefinition("logistic", 1, ev, jac, param_hint=(2.5, 4.0),
                         box_hint=np.array([[-0.25, 1.25]]))


def _h_mod(a):
    return a * (1.18 + 0.17 * np.cos(2.4 * a))


def _modified_logistic():
    def ev(a, x):
        x0 = np.asarray(x, dtype=float)[..., 0]
        return (_h_mod(a) * x0 * (1.0 - x0))[..., None]

    def jac(a, x):
        x0 = np.asarray(x, dtype=float)[..., 0]
        return (_h_mod(a) * (1.0 - 2.0 * x0))[..., None, None]

    return MapDefinition("modified_logistic", 1, ev, jac, param_hint=(2.7, 3.9),
                         box_hint=np.array([[-0.25, 1.25]]))


def _quadratic():
    def ev(lam, x):
        x0 = np.asarray(x, dtype=float)[..., 0]
        return (lam - x0**2)[..., None]

    def jac(lam, x):
        x0 = np.asarray(x, dtype=float)[..., 0]
        return (-2.0 * x0)[..., None, None]

    return MapDefinition("quadratic", 1, ev, jac, param_hint=(-0.5, 2.0),
                         box_hint=np.array([[-3.0, 3.0]]))


def _cubic():
    def ev(lam, x):
        x0 = np.asarray(x, dtype=float)[..., 0]
        return (x0**3 - lam * x0)[..., None]

    def jac(lam, x):
        x0 = np.asarray(x, dtype=float)[..., 0]
        return (3.0 * x0**2 - lam)[..., None, None]

    return MapDefinition("cubic", 1, ev, jac, param_hint=(-1.0, 12.0),
                         box_hint=np.array([[-8.0, 8.0]]))


def _perturbed_cubic(amp=0.3):
    # g = amp*(1 - cos x): g(lam, 0) = 0 and |dg/dx| = amp|sin x| <= amp|x|,
    # the cubic-style bound with beta slightly above amp.
    def ev(lam, x):
        x0 = np.asarray(x, dtype=float)[..., 0]
        return (x0**3 - lam * x0 + amp * (1.0 - np.cos(x0)))[..., None]

    def jac(lam, x):
        x0 = np.asarray(x, dtype=float)[..., 0]
        return (3.0 * x0**2 - lam + amp * np.sin(x0))[..., None, None]

    return MapDefinition("perturbed_cubic", 1, ev, jac, param_hint=(-1.0, 12.0),
                         box_hint=np.array([[-8.0, 8.0]]))


def _coupled_quadratic(n_coords=2, c=0.1, kappa=None):
    n = int(n_coords)
    if n < 1:
        raise BadParameter("N must be positive")
    if kappa is None:
        kappa = tuple(1.0 + 0.1 * i for i in range(n))
    kappa = np.asarray(kappa, dtype=float)
    if kappa.shape != (n,):
        raise BadParameter(f"kappa must have length {n}")

    def ev(a, x):
        x = np.asarray(x, dtype=float)
        return kappa * a - x**2 + c * np.roll(x, -1, axis=-1)

    def jac(a, x):
        x = np.asarray(x, dtype=float)
        shape = x.shape[:-1]
        j = np.zeros(shape + (n, n))
        idx = np.arange(n)
        j[..., idx, idx] = -2.0 * x
        if n > 1:
            j[..., idx, (idx + 1) % n] += c
        else:
            j[..., 0, 0] += c
        return j

    return MapDefinition("coupled_quadratic", n, ev, jac, param_hint=(-0.5, 2.0),
                         box_hint=np.tile(np.array([[-4.0, 4.0]]), (n, 1)))


def tent_value(x):
    """The slope-2 tent: 2x on [0, 0.5], 2(1-x) on (0.5, 1]."""
    x = np.asarray(x, dtype=float)
    return np.where(x <= 0.5, 2.0 * x, 2.0 * (1.0 - x))


def tent_slope(x):
    x = np.asarray(x, dtype=float)
    return np.where(x <= 0.5, 2.0, -2.0)


def _tent():
    def ev(lam, x):
        return tent_value(np.asarray(x, dtype=float)[..., 0])[..., None]

    def jac(lam, x):
        return tent_slope(np.asarray(x, dtype=float)[..., 0])[..., None, None]

    return MapDefinition("tent", 1, ev, jac, param_hint=None,
                         box_hint=np.array([[0.0, 1.0]]), smooth=False)


def _tent_product(n_coords=2):
    n = int(n_coords)

    def ev(lam, x):
        return tent_value(np.asarray(x, dtype=float))

    def jac(lam, x):
        x = np.asarray(x, dtype=float)
        shape = x.shape[:-1]
        j = np.zeros(shape + (n, n))
        idx = np.arange(n)
        j[..., idx, idx] = tent_slope(x)
        return j

    return MapDefinition("tent_product", n, ev, jac, param_hint=None,
                         box_hint=np.tile(np.array([[0.0, 1.0]]), (n, 1)),
                         smooth=False)


def three_tent_value(x):
    """Slope-3 three-piece tent: up on [0,1/3], down on (1/3,2/3], up after."""
    x = np.asarray(x, dtype=float)
    return np.where(x <= 1.0 / 3.0, 3.0 * x,
                    np.where(x <= 2.0 / 3.0, 2.0 - 3.0 * x, 3.0 * x - 2.0))


def three_tent_slope(x):
    x = np.asarray(x, dtype=float)
    return np.where((x > 1.0 / 3.0) & (x <= 2.0 / 3.0), -3.0, 3.0)


def _tent3():
    def ev(lam, x):
        return three_tent_value(np.asarray(x, dtype=float)[..., 0])[..., None]

    def jac(lam, x):
        return three_tent_slope(np.asarray(x, dtype=float)[..., 0])[..., None, None]

    return MapDefinition("tent3", 1, ev, jac, param_hint=None,
                         box_hint=np.array([[0.0, 1.0]]), smooth=False)


def _ikeda():
    # complex form lam + 0.9 z exp(i(0.4 - 6/(1+|z|^2))) written on (Re, Im)
    def theta(x0, x1):
        return 0.4 - 6.0 / (1.0 + x0**2 + x1**2)

    def ev(lam, x):
        x = np.asarray(x, dtype=float)
        x0, x1 = x[..., 0], x[..., 1]
        th = theta(x0, x1)
        ct, st = np.cos(th), np.sin(th)
        out = np.empty_like(x)
        out[..., 0] = lam + 0.9 * (x0 * ct - x1 * st)
        out[..., 1] = 0.9 * (x0 * st + x1 * ct)
        return out

    def jac(lam, x):
        x = np.asarray(x, dtype=float)
        x0, x1 = x[..., 0], x[..., 1]
        r2 = 1.0 + x0**2 + x1**2
        th = theta(x0, x1)
        ct, st = np.cos(th), np.sin(th)
        tx = 12.0 * x0 / r2**2
        ty = 12.0 * x1 / r2**2
        u = x0 * ct - x1 * st   # Re(z e^{i th}) and its angular derivative
        v = x0 * st + x1 * ct
        j = np.empty(x.shape[:-1] + (2, 2))
        j[..., 0, 0] = 0.9 * (ct - v * tx)
        j[..., 0, 1] = 0.9 * (-st - v * ty)
        j[..., 1, 0] = 0.9 * (st + u * tx)
        j[..., 1, 1] = 0.9 * (ct + u * ty)
        return j

    return MapDefinition("ikeda", 2, ev, jac, param_hint=(0.0, 1.0),
                         box_hint=np.array([[-2.0, 2.0], [-2.0, 2.0]]))


def _pulsed_rotor():
    def ev(lam, x):
        x = np.asarray(x, dtype=float)
        x0, x1 = x[..., 0], x[..., 1]
        out = np.empty_like(x)
        out[..., 0] = np.mod(x0 + x1, TWO_PI)
        out[..., 1] = 0.5 * x1 + lam * np.sin(x0 + x1)
        return out

    def jac(lam, x):
        x = np.asarray(x, dtype=float)
        x0, x1 = x[..., 0], x[..., 1]
        cc = np.cos(x0 + x1)
        j = np.empty(x.shape[:-1] + (2, 2))
        j[..., 0, 0] = 1.0
        j[..., 0, 1] = 1.0
        j[..., 1, 0] = lam * cc
        j[..., 1, 1] = 0.5 + lam * cc
        return j

    return MapDefinition("pulsed_rotor", 2, ev, jac, param_hint=(0.0, 10.0),
                         box_hint=np.array([[0.0, TWO_PI], [-12.0, 12.0]]),
                         angular_coords=(0,))


def _duffing_strobe(steps_per_period=512):
    return _strobe_map_definition(
        duffing_system(), IntegratorConfig(steps_per_period=steps_per_period),
        param_hint=(0.0, 25.0),
        box_hint=[[-2.5, 2.5], [-6.0, 6.0]],
    )


def _pendulum_strobe(steps_per_period=512):
    return _strobe_map_definition(
        pendulum_system(), IntegratorConfig(steps_per_period=steps_per_period),
        param_hint=(0.0, 10.0),
        box_hint=[[-math.pi, math.pi], [-15.0, 15.0]],
        angular_coords=(0,),
    )


def _perturbed_quadratic(gamma=3.0, width=1.0):
    return bump_quadratic(gamma=gamma, width=width)[0]


_REGISTRY = {
    "logistic": _logistic,
    "modified_logistic": _modified_logistic,
    "quadratic": _quadratic,
    "perturbed_quadratic": _perturbed_quadratic,
    "cubic": _cubic,
    "perturbed_cubic": _perturbed_cubic,
    "coupled_quadratic": _coupled_quadratic,
    "tent": _tent,
    "tent_product": _tent_product,
    "tent3": _tent3,
    "ikeda": _ikeda,
    "pulsed_rotor": _pulsed_rotor,
    "duffing_strobe": _duffing_strobe,
    "pendulum_strobe": _pendulum_strobe,
}

_OVERRIDE_NAMES = {
    "perturbed_quadratic": {"gamma", "width"},
    "perturbed_cubic": {"amp"},
    "coupled_quadratic": {"n_coords", "c", "kappa"},
    "tent_product": {"n_coords"},
    "duffing_strobe": {"steps_per_period"},
    "pendulum_strobe": {"steps_per_period"},
}


def builtin_names():
    return sorted(_REGISTRY)


def builtin_map(name: str, **overrides) -> MapDefinition:
    """Construct a registered map, applying keyword overrides.

    Overrides accepted per map: ``coupled_quadratic`` takes ``n_coords``,
    ``c`` and ``kappa``; ``tent_product`` takes ``n_coords``;
    ``perturbed_quadratic`` takes ``gamma`` and ``width``;
    ``perturbed_cubic`` takes ``amp``; the two stroboscopic maps take
    ``steps_per_period``.  Unknown overrides raise BadParameter.
    """
    if name not in _REGISTRY:
        raise UnknownMap(f"unknown map {name!r}; known: {', '.join(builtin_names())}")
    allowed = _OVERRIDE_NAMES.get(name, set())
    bad = set(overrides) - allowed
    if bad:
        raise BadParameter(
            f"{name} does not accept override(s) {sorted(bad)}; allowed: {sorted(allowed)}"
        )
    try:
        return _REGISTRY[name](**overrides)
    except TypeError as exc:
        raise BadParameter(str(exc)) from exc


def validate_map(map_def: MapDefinition, n_points: int = 100, rng=None,
                 rel_tol: float = 1e-5) -> float:
    """Check the declared Jacobian against central finite differences.

    Samples ``n_points`` (lam, x) pairs from the map's hints and returns
    the worst relative error; raises BadParameter beyond ``rel_tol``.
    Non-smooth (tent-family) maps skip points near their kinks.
    """
    rng = np.random.default_rng(rng)
    hint = map_def.param_hint or (0.0, 1.0)
    box = map_def.box_hint
    if box is None:
        box = np.tile(np.array([[-1.0, 1.0]]), (map_def.dimension, 1))
    worst = 0.0
    checked = 0
    while checked < n_points:
        lam = float(rng.uniform(hint[0], hint[1]))
        x = rng.uniform(box[:, 0], box[:, 1])
        if not map_def.smooth and _near_kink(map_def.name, x):
            continue
        ja = eval_jacobian(map_def, lam, x)
        jf = finite_difference_jacobian(map_def.eval, lam, x)
        scale = max(1.0, float(np.max(np.abs(ja))))
        err = float(np.max(np.abs(ja - jf))) / scale
        worst = max(worst, err)
        checked += 1
    if worst > rel_tol:
        raise BadParameter(
            f"{map_def.name}: Jacobian mismatch {worst:.3e} exceeds {rel_tol:.1e}"
        )
    return worst


def _near_kink(name, x, tol=1e-3):
    if name in ("tent", "tent_product"):
        return bool(np.any(np.abs(x - 0.5) < tol))
    if name == "tent3":
        return bool(np.any(np.abs(x - 1.0 / 3.0) < tol)
                    or np.any(np.abs(x - 2.0 / 3.0) < tol))
    return False
