"""Finding and classifying periodic orbits.

An orbit is a pair (parameter value, finite point cycle).  Classification
reads the eigenvalues of the monodromy matrix, the ordered product of
single-step Jacobians around the cycle:

- ``sigma_plus`` / ``sigma_minus`` count real eigenvalues in (1, inf) and
  (-inf, -1) with multiplicity,
- an orbit is *flip* when ``sigma_minus`` is odd and -1 is not an
  eigenvalue, *nonflip* otherwise,
- the orbit index is ``(-1)**sigma_plus`` when ``sigma_minus`` is even and
  0 when it is odd; it vanishes exactly on hyperbolic flip orbits.

Monodromy products are accumulated in scaled form (matrix times a power of
two) so orbits of period in the hundreds classify correctly even when the
raw product would overflow double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BadParameter,
    IncompleteEnumeration,
    NoConvergence,
    NotAnOrbit,
    NumericalOverflow,
    SingularSystem,
)
from .maps import MapDefinition, eval_map

__all__ = [
    "Classification",
    "PeriodicOrbit",
    "classify",
    "find_orbit",
    "hausdorff_distance",
    "multistart_orbits",
    "orbit_monodromy",
    "orbit_record",
    "seed_orbits_symbolic",
]

EIG_TOL = 1e-9
CHAIN_TOL = 1e-6
LEAST_PERIOD_TOL = 1e-6
_RESCALE_LIMIT = 2.0**256


@dataclass(frozen=True)
class Classification:
    sigma_plus: int
    sigma_minus: int
    dim_u: int
    is_flip: bool
    orbit_index: Optional[int]   # None while an eigenvalue sits at a bifurcation
    hyperbolic: bool


@dataclass(frozen=True)
class PeriodicOrbit:
    """A classified periodic orbit of ``F(lam, .)``.

    ``points`` holds the cycle in iteration order, ``points[(i+1) % p] =
    F(lam, points[i])`` up to ``residual``.  ``period`` is the least
    period.  Treat instances as immutable; the arrays are never written.
    """

    lam: float
    points: np.ndarray           # (period, N)
    period: int
    eigenvalues: np.ndarray      # (N,) complex, of the monodromy at points[0]
    sigma_plus: int
    sigma_minus: int
    dim_u: int
    is_flip: bool
    orbit_index: Optional[int]
    hyperbolic: bool
    residual: float
    angular_coords: tuple = ()

    @property
    def dimension(self) -> int:
        return int(self.points.shape[1])


# ---------------------------------------------------------------------------
# classification


def _classify_scaled(units: np.ndarray, log_mags: np.ndarray,
                     tol_eig: float) -> Classification:
    """Counting rules applied to eigenvalues given as unit * exp(log_mag)."""
    sigma_plus = 0
    sigma_minus = 0
    dim_u = 0
    near_minus_one = False
    near_unit = False
    for u, lm in zip(units, log_mags):
        mag = math.exp(lm) if lm < 700 else math.inf
        # relative realness test: |Im mu| <= tol * max(1, |mu|)
        im_bound = tol_eig * max(1.0, mag)
        is_real = (abs(u.imag) * mag <= im_bound) if math.isfinite(mag) else (
            abs(u.imag) <= tol_eig)
        on_unit = abs(lm) <= tol_eig
        if on_unit:
            near_unit = True
        if math.isfinite(mag) and abs(u * mag - (-1.0)) <= tol_eig:
            near_minus_one = True
        if lm > tol_eig:
            dim_u += 1
        if is_real and u.real > 0 and lm > tol_eig:
            sigma_plus += 1
        elif is_real and u.real < 0 and lm > tol_eig:
            sigma_minus += 1
    hyperbolic = not near_unit
    is_flip = (sigma_minus % 2 == 1) and not near_minus_one
    if not hyperbolic:
        orbit_index: Optional[int] = None
    elif sigma_minus % 2 == 1:
        orbit_index = 0
    else:
        orbit_index = (-1) ** sigma_plus
    return Classification(sigma_plus, sigma_minus, dim_u, is_flip,
                          orbit_index, hyperbolic)


def classify(eigs: Sequence[complex], tol_eig: float = EIG_TOL) -> Classification:
    """Classify an orbit from its monodromy eigenvalues.

    Returns counts ``sigma_plus``, ``sigma_minus``, ``dim_u`` (eigenvalues
    of modulus > 1), the flip flag, the orbit index (None when an
    eigenvalue lies within ``tol_eig`` of the unit circle, i.e. at a
    bifurcation), and the hyperbolicity flag.  Total function: any finite
    or infinite eigenvalue list classifies.
    """
    eigs = np.asarray(eigs, dtype=complex)
    mags = np.abs(eigs)
    units = np.where(mags > 0, eigs / np.where(mags == 0, 1.0, mags), 1.0 + 0j)
    with np.errstate(divide="ignore"):
        log_mags = np.where(mags > 0, np.log(np.where(mags == 0, 1.0, mags)), -np.inf)
    return _classify_scaled(units, log_mags, tol_eig)


# ---------------------------------------------------------------------------
# orbit chains and monodromy


def _iterate_chain(map_def: MapDefinition, lam: float, x: np.ndarray,
                   count: int) -> np.ndarray:
    """Return [x, F(x), ..., F^count(x)] with overflow detection."""
    out = np.empty((count + 1, x.size))
    out[0] = x
    cur = x
    for i in range(count):
        cur = np.asarray(map_def.eval(lam, cur), dtype=float)
        if not np.all(np.isfinite(cur)) or np.max(np.abs(cur)) > 1e12:
            raise NumericalOverflow(
                f"{map_def.name}: iterate escaped at step {i + 1}, lam={lam:.6g}"
            )
        out[i + 1] = cur
    return out


def _scaled_monodromy(map_def: MapDefinition, lam: float,
                      points: np.ndarray):
    """Ordered Jacobian product in scaled form (matrix, base-2 exponent)."""
    n = points.shape[1]
    m = np.eye(n)
    exp2 = 0
    for p in points:
        j = np.asarray(map_def.jacobian(lam, p), dtype=float)
        if not np.all(np.isfinite(j)):
            raise NumericalOverflow(f"{map_def.name}: non-finite Jacobian")
        m = j @ m
        peak = np.max(np.abs(m))
        if peak > _RESCALE_LIMIT:
            k = int(math.floor(math.log2(peak)))
            m = m / (2.0**k)
            exp2 += k
        elif 0 < peak < 1.0 / _RESCALE_LIMIT:
            k = int(math.floor(math.log2(peak)))
            m = m / (2.0**k)
            exp2 += k
    return m, exp2


def _scaled_eigs(m_hat: np.ndarray, exp2: int):
    """Eigen-data of ``m_hat * 2**exp2`` as (complex values, units, log mags)."""
    eigs_hat = np.linalg.eigvals(m_hat)
    mags_hat = np.abs(eigs_hat)
    safe = np.where(mags_hat == 0, 1.0, mags_hat)
    units = np.where(mags_hat > 0, eigs_hat / safe, 1.0 + 0j)
    with np.errstate(divide="ignore"):
        log_mags = np.where(mags_hat > 0, np.log(safe), -np.inf) + exp2 * math.log(2)
    with np.errstate(over="ignore"):
        values = units * np.exp(np.clip(log_mags, -745, 710))
    return values, units, log_mags


def orbit_monodromy(map_def: MapDefinition, lam: float,
                    points: Sequence[np.ndarray]) -> np.ndarray:
    """Ordered product DF(points[p-1]) .. DF(points[0]).

    Verifies the chain property (each point maps to the next within
    CHAIN_TOL) before multiplying; raises NotAnOrbit otherwise and
    NumericalOverflow if the product is not representable in doubles.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    p = pts.shape[0]
    for i in range(p):
        img = np.asarray(map_def.eval(lam, pts[i]), dtype=float)
        gap = float(np.max(np.abs(img - pts[(i + 1) % p])))
        if gap > CHAIN_TOL:
            raise NotAnOrbit(
                f"points do not chain: |F(points[{i}]) - points[{(i + 1) % p}]| "
                f"= {gap:.3e} > {CHAIN_TOL:.0e}"
            )
    m_hat, exp2 = _scaled_monodromy(map_def, lam, pts)
    out = m_hat * (2.0**exp2)
    if not np.all(np.isfinite(out)):
        raise NumericalOverflow("monodromy exceeds double-precision range")
    return out


def _least_period(map_def: MapDefinition, lam: float, x: np.ndarray,
                  period: int, tol: float = LEAST_PERIOD_TOL) -> int:
    chain = _iterate_chain(map_def, lam, x, period)
    for d in _proper_divisors(period):
        if float(np.max(np.abs(chain[d] - chain[0]))) <= tol:
            return d
    return period


def _proper_divisors(n: int):
    return [d for d in range(1, n) if n % d == 0]


def _build_orbit(map_def: MapDefinition, lam: float, x: np.ndarray,
                 period: int, tol_eig: float = EIG_TOL) -> PeriodicOrbit:
    """Assemble a classified PeriodicOrbit from a converged point."""
    least = _least_period(map_def, lam, x, period)
    chain = _iterate_chain(map_def, lam, x, least)
    pts = chain[:least]
    closure = chain[least]
    residual = float(np.max(np.abs(closure - pts[0])))
    m_hat, exp2 = _scaled_monodromy(map_def, lam, pts)
    values, units, log_mags = _scaled_eigs(m_hat, exp2)
    cls = _classify_scaled(units, log_mags, tol_eig)
    return PeriodicOrbit(
        lam=float(lam),
        points=pts,
        period=least,
        eigenvalues=values,
        sigma_plus=cls.sigma_plus,
        sigma_minus=cls.sigma_minus,
        dim_u=cls.dim_u,
        is_flip=cls.is_flip,
        orbit_index=cls.orbit_index,
        hyperbolic=cls.hyperbolic,
        residual=residual,
        angular_coords=tuple(map_def.angular_coords),
    )


# ---------------------------------------------------------------------------
# Newton solver


def find_orbit(map_def: MapDefinition, lam: float, x0: np.ndarray,
               period: int, tol: float = 1e-11, max_iter: int = 50,
               max_period: int = 256) -> PeriodicOrbit:
    """Newton iteration on ``F^period(x) - x`` from the seed ``x0``.

    Plain damped Newton (step halving, at most 6 halvings); convergence
    means the residual dropped below ``tol`` in at most ``max_iter``
    iterations.  The returned orbit is reduced to its least period and
    fully classified.

    Raises
    ------
    NoConvergence
        Newton diverged or ran out of iterations.
    SingularSystem
        A monodromy eigenvalue sits within 1e-12 of +1 (fold nearby).
    """
    if period < 1 or period > max_period:
        raise BadParameter(f"period must be in [1, {max_period}], got {period}")
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (map_def.dimension,):
        raise BadParameter(
            f"expected seed of shape ({map_def.dimension},), got {x.shape}"
        )
    if not map_def.smooth:
        raise BadParameter(
            f"{map_def.name} is piecewise-linear; Newton continuation is not "
            "supported for the counting models"
        )
    gnorm_prev = math.inf
    for _ in range(max_iter):
        try:
            chain = _iterate_chain(map_def, lam, x, period)
        except NumericalOverflow as exc:
            raise NoConvergence(str(exc)) from exc
        g = chain[period] - x
        gnorm = float(np.max(np.abs(g)))
        if gnorm <= tol:
            return _build_orbit(map_def, lam, x, period)
        m_hat, exp2 = _scaled_monodromy(map_def, lam, chain[:period])
        values, _, log_mags = _scaled_eigs(m_hat, exp2)
        finite = np.isfinite(values)
        if np.any(np.abs(values[finite] - 1.0) < 1e-12):
            raise SingularSystem(
                f"monodromy eigenvalue at +1 near lam={lam:.8g}"
            )
        if exp2 > 900 or np.max(log_mags) > 640:
            raise NoConvergence("monodromy too large for a Newton step")
        jac = m_hat * (2.0**exp2) - np.eye(x.size)
        try:
            step = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc
        alpha = 1.0
        best = None
        for _ in range(7):
            cand = x + alpha * step
            try:
                g_cand = np.asarray(map_def.eval(lam, _iterate_chain(
                    map_def, lam, cand, period - 1)[-1]), dtype=float) - cand
            except NumericalOverflow:
                alpha *= 0.5
                continue
            gn = float(np.max(np.abs(g_cand)))
            if gn < gnorm:
                best = cand
                break
            if best is None:
                best = cand
            alpha *= 0.5
        x = best
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > 1e10:
            raise NoConvergence(f"Newton diverged at lam={lam:.8g}")
        gnorm_prev = gnorm
    raise NoConvergence(
        f"no convergence after {max_iter} iterations at lam={lam:.8g} "
        f"(last residual {gnorm_prev:.3e})"
    )


# ---------------------------------------------------------------------------
# Hausdorff metric


def _pair_distances(a: np.ndarray, b: np.ndarray, angular: tuple) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    if angular:
        idx = list(angular)
        diff[..., idx] = (diff[..., idx] + math.pi) % (2 * math.pi) - math.pi
    return np.sqrt(np.sum(diff**2, axis=-1))


def _hausdorff_sets(a: np.ndarray, b: np.ndarray, angular: tuple = ()) -> float:
    d = _pair_distances(np.atleast_2d(a), np.atleast_2d(b), angular)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def hausdorff_distance(o1: PeriodicOrbit, o2: PeriodicOrbit) -> float:
    """Hausdorff distance between the point sets plus |lam1 - lam2|.

    Symmetric, zero exactly on identical (parameter, point-set) pairs.
    Angular coordinates are compared mod 2*pi.
    """
    if o1.points.shape[1] != o2.points.shape[1]:
        raise BadParameter("orbits live in different ambient dimensions")
    angular = tuple(sorted(set(o1.angular_coords) | set(o2.angular_coords)))
    return _hausdorff_sets(o1.points, o2.points, angular) + abs(o1.lam - o2.lam)


# ---------------------------------------------------------------------------
# canonical form and deduplication


def canonical_points(points: np.ndarray) -> np.ndarray:
    """Rotate the cycle so the lexicographically smallest point is first."""
    pts = np.atleast_2d(points)
    order = sorted(range(pts.shape[0]), key=lambda i: tuple(pts[i]))
    k = order[0]
    return np.roll(pts, -k, axis=0)


def dedupe_orbits(orbits: Iterable[PeriodicOrbit],
                  tol: float = 1e-6) -> List[PeriodicOrbit]:
    """Drop duplicates: same period and point sets within ``tol``."""
    kept: List[PeriodicOrbit] = []
    for orb in orbits:
        is_dup = False
        for ref in kept:
            if ref.period != orb.period:
                continue
            if abs(ref.lam - orb.lam) > tol:
                continue
            if _hausdorff_sets(ref.points, orb.points,
                               tuple(ref.angular_coords)) < tol:
                is_dup = True
                break
        if not is_dup:
            kept.append(orb)
    return kept


# ---------------------------------------------------------------------------
# symbolic seeding in horseshoe regimes


def _lyndon_words(alphabet_size: int, length: int):
    """Duval's algorithm: one representative per cyclic class, least period
    exactly ``length``."""
    w = [-1]
    while w:
        w[-1] += 1
        m = len(w)
        if m == length:
            yield tuple(w)
        while len(w) < length:
            w.append(w[-m])
        while w and w[-1] == alphabet_size - 1:
            w.pop()


def _cells_as_boxes(partition, dim):
    cells = []
    for cell in partition:
        box = np.asarray(cell, dtype=float)
        if box.ndim == 1:
            box = box[None, :]
        if box.shape != (dim, 2):
            raise BadParameter(f"cell must have shape ({dim}, 2), got {box.shape}")
        cells.append(box)
    for i, a in enumerate(cells):
        for b in cells[i + 1:]:
            if np.all(a[:, 0] < b[:, 1]) and np.all(b[:, 0] < a[:, 1]):
                raise BadParameter("partition cells must be pairwise disjoint")
    return cells


def _pull_back_1d(map_def, lam, target, cell):
    lo, hi = float(cell[0, 0]), float(cell[0, 1])

    def h(t):
        return float(map_def.eval(lam, np.array([t]))[0]) - target

    fa, fb = h(lo), h(hi)
    if fa * fb > 0:
        raise NoConvergence(
            f"target {target:.6g} not bracketed by cell [{lo:.6g}, {hi:.6g}]"
        )
    return np.array([brentq(h, lo, hi, xtol=1e-13, rtol=8.9e-16)])


def _pull_back_nd(map_def, lam, target, cell):
    x = cell.mean(axis=1)
    for _ in range(60):
        g = np.asarray(map_def.eval(lam, x), dtype=float) - target
        if float(np.max(np.abs(g))) < 1e-12 * max(1.0, float(np.max(np.abs(target)))):
            return x
        j = np.asarray(map_def.jacobian(lam, x), dtype=float)
        try:
            x = x - np.linalg.solve(j, g)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence("singular Jacobian during pull-back") from exc
        x = np.clip(x, cell[:, 0], cell[:, 1])
    raise NoConvergence("pull-back Newton did not converge")


def _seed_from_word(map_def, lam, word, cells, hull):
    """Pull the hull midpoint back along the reversed, repeated itinerary."""
    dim = map_def.dimension
    reps = max(2, math.ceil(16 / len(word)))
    target = hull.mean(axis=1)
    for sym in reversed(word * reps):
        cell = cells[sym]
        if dim == 1:
            target = _pull_back_1d(map_def, lam, float(target[0]), cell)
        else:
            target = _pull_back_nd(map_def, lam, target, cell)
    return target


def seed_orbits_symbolic(map_def: MapDefinition, lam: float, k: int,
                         partition) -> List[PeriodicOrbit]:
    """Enumerate the least-period-``k`` orbits of a verified horseshoe.

    For each length-``k`` word over the partition's alphabet (one
    representative per cyclic class), a Newton seed is built by pulling the
    hull midpoint back along the itinerary, then polished with
    :func:`find_orbit`.  Results are deduplicated by canonical rotation and
    Hausdorff proximity.

    Raises IncompleteEnumeration listing any words whose Newton run failed;
    failures are never dropped silently.
    """
    cells = _cells_as_boxes(partition, map_def.dimension)
    hull = np.stack([
        np.min([c[:, 0] for c in cells], axis=0),
        np.max([c[:, 1] for c in cells], axis=0),
    ], axis=1)
    found: List[PeriodicOrbit] = []
    failed = []
    for word in _lyndon_words(len(cells), k):
        try:
            x0 = _seed_from_word(map_def, lam, word, cells, hull)
            orb = find_orbit(map_def, lam, x0, k, max_period=max(256, 2 * k))
            if orb.period != k:
                raise NoConvergence(
                    f"word {word} converged to period {orb.period}, expected {k}"
                )
        except (NoConvergence, SingularSystem, NumericalOverflow) as exc:
            failed.append((word, str(exc)))
            continue
        found.append(orb)
    unique = dedupe_orbits(found)
    if failed:
        raise IncompleteEnumeration(
            f"{len(failed)} of {len(failed) + len(found)} words failed "
            f"at lam={lam:.6g}: {[w for w, _ in failed]}",
            failed_words=[w for w, _ in failed],
        )
    return unique


# ---------------------------------------------------------------------------
# batched multi-start enumeration (heuristic, used off horseshoe regimes)


def _batched_newton(map_def, lam, seeds, period, tol, max_iter, escape):
    """Vectorized undamped Newton on F^period(x) - x for all seeds at once."""
    x = np.array(seeds, dtype=float)
    nb, dim = x.shape
    active = np.ones(nb, dtype=bool)
    eye = np.eye(dim)
    for _ in range(max_iter):
        if not active.any():
            break
        xa = x[active]
        chain = xa
        mono = np.broadcast_to(eye, (xa.shape[0], dim, dim)).copy()
        ok = np.ones(xa.shape[0], dtype=bool)
        for _ in range(period):
            jac = np.asarray(map_def.jacobian(lam, chain), dtype=float)
            mono = np.einsum("bij,bjk->bik", jac, mono)
            chain = np.asarray(map_def.eval(lam, chain), dtype=float)
            bad = ~np.all(np.isfinite(chain), axis=-1) | (
                np.max(np.abs(chain), axis=-1) > escape)
            if bad.any():
                chain = np.where(bad[:, None], 0.0, chain)
                ok &= ~bad
        g = chain - xa
        jac_sys = mono - eye
        with np.errstate(all="ignore"):
            conv = np.max(np.abs(g), axis=-1) <= tol
            try:
                steps = np.linalg.solve(jac_sys, -g[..., None])[..., 0]
            except np.linalg.LinAlgError:
                steps = np.full_like(g, np.nan)
                for i in range(g.shape[0]):
                    try:
                        steps[i] = np.linalg.solve(jac_sys[i], -g[i])
                    except np.linalg.LinAlgError:
                        ok[i] = False
        new = xa + np.where(conv[:, None], 0.0, steps)
        ok &= np.all(np.isfinite(new), axis=-1)
        ok &= np.max(np.abs(new), axis=-1) <= escape
        idx = np.flatnonzero(active)
        x[idx[~ok]] = np.nan
        active[idx[~ok]] = False
        x[idx[ok]] = new[ok]
        still = idx[ok][conv[ok]] if conv.any() else np.array([], dtype=int)
        active[still] = False
    good = np.all(np.isfinite(x), axis=-1)
    return x[good]


def multistart_orbits(map_def: MapDefinition, lam: float, max_period: int,
                      box=None, starts_per_dim: int = 200, tol: float = 1e-11,
                      max_iter: int = 40) -> List[PeriodicOrbit]:
    """Heuristic orbit enumeration from a uniform grid of Newton starts.

    Runs batched Newton on ``F^p(x) - x`` for each period up to
    ``max_period`` and returns deduplicated orbits keyed by least period.
    Completeness is not guaranteed; horseshoe-regime enumeration should use
    :func:`seed_orbits_symbolic` instead.
    """
    box = np.asarray(box if box is not None else map_def.box_hint, dtype=float)
    if box is None or box.shape != (map_def.dimension, 2):
        raise BadParameter("a spatial box of shape (N, 2) is required")
    axes = [np.linspace(lo, hi, starts_per_dim) for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    seeds = np.stack([m.ravel() for m in mesh], axis=-1)
    escape = 10.0 * float(np.max(np.abs(box))) + 10.0
    found: List[PeriodicOrbit] = []
    for p in range(1, max_period + 1):
        roots = _batched_newton(map_def, lam, seeds, p, tol, max_iter, escape)
        if roots.size == 0:
            continue
        # cheap pre-dedup on rounded coordinates before polishing
        _, keep = np.unique(np.round(roots / 1e-7).astype(np.int64),
                            axis=0, return_index=True)
        for idx in sorted(keep):
            try:
                orb = find_orbit(map_def, lam, roots[idx], p,
                                 max_period=max(256, 2 * max_period))
            except (NoConvergence, SingularSystem, NumericalOverflow):
                continue
            if orb.period != p:
                continue  # least period lower: already found at its own p
            if not _inside_box(orb.points, box, map_def.angular_coords):
                continue
            found.append(orb)
    return dedupe_orbits(found)


def _inside_box(points, box, angular, pad=1e-6):
    pts = points.copy()
    for i in angular:
        lo = box[i, 0]
        pts[:, i] = np.mod(pts[:, i] - lo, 2 * math.pi) + lo
    return bool(np.all(pts >= box[:, 0] - pad) and np.all(pts <= box[:, 1] + pad))


# ---------------------------------------------------------------------------
# serialization


def orbit_record(orbit: PeriodicOrbit) -> dict:
    """JSON-ready record with the fixed public field names."""
    return {
        "lambda": orbit.lam,
        "period": orbit.period,
        "points": [[float(v) for v in p] for p in orbit.points],
        "eigenvalues": [[float(np.real(e)), float(np.imag(e))]
                        for e in orbit.eigenvalues],
        "sigma_plus": orbit.sigma_plus,
        "sigma_minus": orbit.sigma_minus,
        "dim_u": orbit.dim_u,
        "flip": orbit.is_flip,
        "index": orbit.orbit_index,
        "residual": orbit.residual,
    }
