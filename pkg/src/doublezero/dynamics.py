"""Direct numerical verification harness.

Everything the analytic modules predict is checked here by honest
integration: strobed (Poincaré) maps of the time-periodic flows, Newton
shooting for subharmonic orbits with variational monodromy matrices,
single-parameter fold detection by bisection on orbit existence, and
stable/unstable manifold traces of saddle orbits seeded along Floquet
eigendirections.

Two flow builders are provided: the rescaled planar system

    zeta1' = zeta2
    zeta2' = (sign nu1)*zeta1 + s1*zeta1**3
             + eps_hat*(nu_hat*zeta2 + s2*zeta1**2*zeta2
                        + delta_big*h(omega_hat*t + phase))

and the full 3-D servo-pendulum of :mod:`.pendulum`.  Both carry analytic
state Jacobians so monodromy matrices come from the variational equations
rather than finite differences.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    DomainError,
    NewtonDivergence,
    NoFoldInBracket,
    NotASaddle,
    StepFailure,
)
from .fourier import TrigPolynomial
from .normalform import ScaledParams, ScalingBranch
from .pendulum import PendulumParams, vector_field, vector_field_jacobian

__all__ = [
    "FlowSpec",
    "OrbitClass",
    "PeriodicOrbitResult",
    "ManifoldBranch",
    "ManifoldTrace",
    "DEFAULT_ABS_TOL",
    "DEFAULT_REL_TOL",
    "scaled_flow",
    "pendulum_flow",
    "integrate",
    "poincare_map",
    "monodromy",
    "find_subharmonic",
    "detect_saddle_node",
    "trace_manifolds",
    "classify_multipliers",
    "divergence_integral",
    "liouville_defect",
]

DEFAULT_ABS_TOL = 1e-10
DEFAULT_REL_TOL = 1e-9

#: |multiplier| within this of 1 counts as "on the unit circle".
UNIT_CIRCLE_TOL = 1e-8

#: A manifold chain whose strobe increment contracts by more than this
#: factor in one step has fallen into the neighborhood of a periodic point;
#: past that point iterates re-amplify integrator noise instead of
#: resolving the manifold, so the chain is terminated.
_CONTRACTION_CUT = 50.0

#: Strobe increment below which a chain is sitting on a periodic point.
_FIXED_POINT_TOL = 1e-12


@dataclass(frozen=True)
class FlowSpec:
    """A time-periodic vector field with its forcing period and tolerances.

    ``rhs(t, state)`` and ``jacobian(t, state)`` must accept any real time;
    ``period`` is the forcing period that defines the strobe section.
    """

    rhs: Callable[[float, np.ndarray], np.ndarray]
    jacobian: Callable[[float, np.ndarray], np.ndarray]
    period: float
    dim: int
    abs_tol: float = DEFAULT_ABS_TOL
    rel_tol: float = DEFAULT_REL_TOL

    def __post_init__(self) -> None:
        if not (self.period > 0.0):
            raise DomainError(f"period must be positive, got {self.period!r}")
        if self.dim not in (2, 3):
            raise DomainError(f"dimension must be 2 or 3, got {self.dim!r}")


def scaled_flow(
    *,
    s1: int,
    s2: int,
    nu1_sign: int,
    eps_hat: float,
    nu_hat: float,
    omega_hat: float,
    delta_big: float,
    forcing: TrigPolynomial,
    phase: float = 0.0,
    abs_tol: float = DEFAULT_ABS_TOL,
    rel_tol: float = DEFAULT_REL_TOL,
) -> FlowSpec:
    """Build the rescaled planar flow for one ``nu1`` half-plane.

    ``eps_hat = 0`` gives the unperturbed Hamiltonian host system.
    """
    if s1 not in (-1, 1) or s2 not in (-1, 1):
        raise DomainError("s1 and s2 must be +/-1")
    if nu1_sign not in (-1, 1):
        raise DomainError("nu1_sign must be +/-1")
    if eps_hat < 0.0:
        raise DomainError(f"eps_hat must be >= 0, got {eps_hat!r}")
    if not (omega_hat > 0.0):
        raise DomainError(f"omega_hat must be positive, got {omega_hat!r}")
    a = float(nu1_sign)
    b = float(s1)
    eh, nh, dl, ph = float(eps_hat), float(nu_hat), float(delta_big), float(phase)
    om = float(omega_hat)

    def rhs(t: float, z: np.ndarray) -> np.ndarray:
        z1, z2 = z[0], z[1]
        drive = nh * z2 + s2 * z1 * z1 * z2 + dl * forcing(om * t + ph)
        return np.array([z2, a * z1 + b * z1**3 + eh * drive])

    def jac(t: float, z: np.ndarray) -> np.ndarray:
        z1, z2 = z[0], z[1]
        return np.array(
            [
                [0.0, 1.0],
                [a + 3.0 * b * z1 * z1 + 2.0 * eh * s2 * z1 * z2,
                 eh * (nh + s2 * z1 * z1)],
            ]
        )

    return FlowSpec(
        rhs=rhs, jacobian=jac, period=2.0 * math.pi / om, dim=2,
        abs_tol=abs_tol, rel_tol=rel_tol,
    )


def scaled_flow_from(
    sp: ScaledParams,
    s1: int,
    s2: int,
    forcing: TrigPolynomial,
    **kwargs,
) -> FlowSpec:
    """Scaled flow with parameters taken from a :class:`.ScaledParams`."""
    nu1_sign = -1 if sp.branch is ScalingBranch.NU1_NEGATIVE else 1
    return scaled_flow(
        s1=s1, s2=s2, nu1_sign=nu1_sign, eps_hat=sp.eps_hat, nu_hat=sp.nu_hat,
        omega_hat=sp.omega_hat, delta_big=sp.delta_big, forcing=forcing, **kwargs,
    )


def pendulum_flow(
    p: PendulumParams,
    abs_tol: float = DEFAULT_ABS_TOL,
    rel_tol: float = DEFAULT_REL_TOL,
) -> FlowSpec:
    """The full 3-D servo-pendulum flow with its analytic Jacobian."""
    return FlowSpec(
        rhs=lambda t, z: vector_field(p, t, z),
        jacobian=lambda t, z: vector_field_jacobian(p, z),
        period=2.0 * math.pi / p.omega,
        dim=3,
        abs_tol=abs_tol,
        rel_tol=rel_tol,
    )


def _solve(flow: FlowSpec, state0, t0: float, t1: float, events=None, t_eval=None):
    sol = solve_ivp(
        flow.rhs,
        (t0, t1),
        np.asarray(state0, dtype=float),
        method="DOP853",
        rtol=flow.rel_tol,
        atol=flow.abs_tol,
        events=events,
        t_eval=t_eval,
        dense_output=False,
    )
    if not sol.success:
        raise StepFailure(f"integration failed on [{t0}, {t1}]: {sol.message}")
    return sol


def integrate(flow: FlowSpec, state0, t0: float, t1: float) -> np.ndarray:
    """State at time ``t1`` of the trajectory through ``state0`` at ``t0``.

    Raises
    ------
    DomainError
        If ``t1 < t0`` (forward public contract; the manifold tracer handles
        backward time internally).
    StepFailure
        If the adaptive integrator cannot proceed.
    """
    if t1 < t0:
        raise DomainError(f"need t1 >= t0, got [{t0}, {t1}]")
    if t1 == t0:
        return np.asarray(state0, dtype=float).copy()
    return _solve(flow, state0, t0, t1).y[:, -1].copy()


def trajectory(
    flow: FlowSpec, state0, t0: float, t1: float, samples: int
) -> tuple[np.ndarray, np.ndarray]:
    """Dense trajectory samples at ``samples`` evenly spaced times.

    Returns ``(times, states)`` with ``states[i]`` the state at ``times[i]``;
    both endpoints are included.
    """
    if samples < 2:
        raise DomainError(f"samples must be >= 2, got {samples}")
    if not (t1 > t0):
        raise DomainError(f"need t1 > t0, got [{t0}, {t1}]")
    ts = np.linspace(t0, t1, samples)
    sol = _solve(flow, np.asarray(state0, dtype=float), t0, t1, t_eval=ts)
    return ts, sol.y.T.copy()


def poincare_map(flow: FlowSpec, state, iterates: int) -> list[np.ndarray]:
    """Strobe samples after 1, 2, ..., ``iterates`` forcing periods."""
    if iterates < 1:
        raise DomainError(f"iterates must be >= 1, got {iterates}")
    out = []
    x = np.asarray(state, dtype=float)
    for i in range(iterates):
        x = integrate(flow, x, i * flow.period, (i + 1) * flow.period)
        out.append(x)
    return out


def _transition(
    flow: FlowSpec, state: np.ndarray, t0: float, t1: float
) -> tuple[np.ndarray, np.ndarray]:
    """Final state and state-transition matrix of one time segment."""
    n = flow.dim

    def aug_rhs(t: float, y: np.ndarray) -> np.ndarray:
        x = y[:n]
        phi = y[n:].reshape(n, n)
        jac = flow.jacobian(t, x)
        return np.concatenate([flow.rhs(t, x), (jac @ phi).ravel()])

    y0 = np.concatenate([state, np.eye(n).ravel()])
    aug = FlowSpec(
        rhs=aug_rhs, jacobian=flow.jacobian, period=flow.period, dim=flow.dim,
        abs_tol=flow.abs_tol, rel_tol=flow.rel_tol,
    )
    sol = _solve(aug, y0, t0, t1)
    yf = sol.y[:, -1]
    return yf[:n].copy(), yf[n:].reshape(n, n).copy()


def monodromy(flow: FlowSpec, state, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Final state and monodromy matrix over ``m`` forcing periods.

    Integrates the variational equations alongside the flow, so the returned
    matrix is the derivative of the ``m``-th strobe map at ``state``.
    """
    n = flow.dim
    x0 = np.asarray(state, dtype=float)
    if x0.shape != (n,):
        raise DomainError(f"state must have shape ({n},), got {x0.shape}")
    return _transition(flow, x0, 0.0, m * flow.period)


class OrbitClass(enum.Enum):
    SINK = "sink"
    SOURCE = "source"
    SADDLE = "saddle"
    CENTER_LIKE = "center-like"


def classify_multipliers(
    multipliers: Sequence[complex], unit_tol: float = UNIT_CIRCLE_TOL
) -> OrbitClass:
    """Classify a periodic orbit from its Floquet multipliers.

    Multipliers within ``unit_tol`` of the unit circle are treated as
    neutral; any expansion together with any contraction is a saddle.
    """
    mags = [abs(lam) for lam in multipliers]
    expanding = any(mag > 1.0 + unit_tol for mag in mags)
    contracting = any(mag < 1.0 - unit_tol for mag in mags)
    if expanding and contracting:
        return OrbitClass.SADDLE
    if expanding:
        return OrbitClass.SOURCE
    if contracting and all(mag < 1.0 + unit_tol for mag in mags):
        return OrbitClass.SINK
    return OrbitClass.CENTER_LIKE


@dataclass(frozen=True)
class PeriodicOrbitResult:
    """A located subharmonic orbit on the strobe section.

    ``initial_state`` returns to itself under ``m`` strobe iterates within
    the shooting tolerance ``residual``; ``multipliers`` are the eigenvalues
    of the variational ``monodromy`` matrix.
    """

    initial_state: np.ndarray
    m: int
    multipliers: tuple[complex, ...]
    classification: OrbitClass
    residual: float
    monodromy: np.ndarray


def find_subharmonic(
    flow: FlowSpec,
    m: int,
    guess,
    *,
    homotopy: Sequence[FlowSpec] = (),
    tol: float = 1e-10,
    max_iter: int = 50,
    segments: int = 1,
) -> PeriodicOrbitResult:
    """Newton shooting for a fixed point of the ``m``-th strobe iterate.

    ``homotopy`` optionally lists intermediate flows solved first (each
    seeded from the previous solution) before the target ``flow`` — the
    standard way to walk an orbit up from an easily-located limit.

    ``segments > 1`` switches to multiple shooting: the period is split into
    that many legs with the leg endpoints as extra unknowns.  Use it for
    strongly hyperbolic orbits, where single shooting amplifies guess error
    by the full-period multiplier and the first integration can escape.

    Raises
    ------
    NewtonDivergence
        After ``max_iter`` iterations without the residual (max-norm of the
        return defect) dropping below ``tol``, or when the shooting system
        becomes singular; the message reports the last residual.
    """
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if segments < 1:
        raise DomainError(f"segments must be >= 1, got {segments}")
    x = np.asarray(guess, dtype=float).copy()
    for stage in (*homotopy, flow):
        if segments == 1:
            x = _newton_orbit(stage, m, x, tol, max_iter)
        else:
            x = _newton_orbit_multishoot(stage, m, x, tol, max_iter, segments)
    xf, mono = monodromy(flow, x, m)
    residual = float(np.max(np.abs(xf - x)))
    mults = tuple(complex(lam) for lam in np.linalg.eigvals(mono))
    return PeriodicOrbitResult(
        initial_state=x,
        m=m,
        multipliers=mults,
        classification=classify_multipliers(mults),
        residual=residual,
        monodromy=mono,
    )


def _shooting_defect(flow: FlowSpec, m: int, x: np.ndarray) -> float:
    try:
        xf = integrate(flow, x, 0.0, m * flow.period)
    except StepFailure:
        return math.inf
    return float(np.max(np.abs(xf - x)))


def _newton_orbit(
    flow: FlowSpec, m: int, guess: np.ndarray, tol: float, max_iter: int
) -> np.ndarray:
    x = guess.copy()
    eye = np.eye(flow.dim)
    residual = math.inf
    for _ in range(max_iter):
        try:
            xf, mono = monodromy(flow, x, m)
        except StepFailure as exc:
            raise NewtonDivergence(
                f"integration broke down during shooting (last residual "
                f"{residual!r}): {exc}"
            ) from exc
        defect = xf - x
        residual = float(np.max(np.abs(defect)))
        if not math.isfinite(residual):
            raise NewtonDivergence(f"shooting residual became non-finite ({residual!r})")
        if residual < tol:
            return x
        try:
            step = np.linalg.solve(mono - eye, -defect)
        except np.linalg.LinAlgError as exc:
            raise NewtonDivergence(
                f"singular shooting system (last residual {residual!r})"
            ) from exc
        # Backtracking damping: near-unit multipliers make (M - I) nearly
        # singular and the full step can overshoot the basin; halve until
        # the defect shrinks (the full step is kept whenever it works, so
        # quadratic convergence near the root is untouched).
        damping = 1.0
        for _ in range(12):
            trial = x + damping * step
            if _shooting_defect(flow, m, trial) < residual:
                break
            damping *= 0.5
        x = x + damping * step
    raise NewtonDivergence(
        f"no convergence after {max_iter} iterations (last residual {residual!r})"
    )


def _multishoot_defect(flow: FlowSpec, xs: np.ndarray, times: np.ndarray) -> float:
    worst = 0.0
    count = xs.shape[0]
    for j in range(count):
        try:
            xf = integrate(flow, xs[j], float(times[j]), float(times[j + 1]))
        except StepFailure:
            return math.inf
        worst = max(worst, float(np.max(np.abs(xf - xs[(j + 1) % count]))))
    return worst


def _newton_orbit_multishoot(
    flow: FlowSpec, m: int, guess: np.ndarray, tol: float, max_iter: int, segments: int
) -> np.ndarray:
    n = flow.dim
    count = int(segments)
    times = np.linspace(0.0, m * flow.period, count + 1)
    # A constant chain is a safe seed: each leg is short, so even a crude
    # guess cannot be amplified into an escape the way a full period can.
    xs = np.tile(np.asarray(guess, dtype=float), (count, 1))
    eye = np.eye(n)
    residual = math.inf
    for _ in range(max_iter):
        defects = np.empty((count, n))
        legs = []
        try:
            for j in range(count):
                xf, phi = _transition(flow, xs[j], float(times[j]), float(times[j + 1]))
                defects[j] = xf - xs[(j + 1) % count]
                legs.append(phi)
        except StepFailure as exc:
            raise NewtonDivergence(
                f"integration broke down during multiple shooting (last "
                f"residual {residual!r}): {exc}"
            ) from exc
        residual = float(np.max(np.abs(defects)))
        if not math.isfinite(residual):
            raise NewtonDivergence(f"shooting residual became non-finite ({residual!r})")
        if residual < tol:
            return xs[0].copy()
        jac = np.zeros((count * n, count * n))
        for j in range(count):
            jac[j * n:(j + 1) * n, j * n:(j + 1) * n] = legs[j]
            nxt = (j + 1) % count
            jac[j * n:(j + 1) * n, nxt * n:(nxt + 1) * n] -= eye
        try:
            step = np.linalg.solve(jac, -defects.ravel()).reshape(count, n)
        except np.linalg.LinAlgError as exc:
            raise NewtonDivergence(
                f"singular multiple-shooting system (last residual {residual!r})"
            ) from exc
        damping = 1.0
        for _ in range(12):
            if _multishoot_defect(flow, xs + damping * step, times) < residual:
                break
            damping *= 0.5
        xs = xs + damping * step
    raise NewtonDivergence(
        f"no convergence after {max_iter} iterations (last residual {residual!r})"
    )


def detect_saddle_node(
    flow_family: Callable[[float], FlowSpec],
    m: int,
    bracket: tuple[float, float],
    seed,
    *,
    param_tol: float = 1e-6,
    max_jump: float = 0.5,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> float:
    """Bisect a one-parameter family for the fold of a subharmonic orbit.

    ``flow_family(p)`` builds the flow at parameter ``p``; ``seed`` is an
    initial state of the tracked orbit valid at one bracket end.  A trial
    parameter counts as "orbit exists" when Newton converges from the
    nearest previously-converged state without jumping further than
    ``max_jump`` (a large jump means Newton fell onto a different orbit —
    past a fold the tracked orbit is simply gone and any convergence is
    spurious).  Bisection returns the fold parameter to within
    ``param_tol``.

    Raises
    ------
    NoFoldInBracket
        If the orbit exists at both ends or at neither end.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (hi > lo):
        raise DomainError(f"bracket must satisfy lo < hi, got {bracket!r}")

    def probe(p: float, from_state: np.ndarray) -> np.ndarray | None:
        try:
            res = find_subharmonic(
                flow_family(p), m, from_state, tol=tol, max_iter=max_iter
            )
        except NewtonDivergence:
            return None
        if np.max(np.abs(res.initial_state - from_state)) > max_jump:
            return None
        return res.initial_state

    seed = np.asarray(seed, dtype=float)
    state_lo = probe(lo, seed)
    state_hi = probe(hi, seed if state_lo is None else state_lo)
    if (state_lo is None) == (state_hi is None):
        raise NoFoldInBracket(
            f"orbit exists at "
            f"{'both ends' if state_lo is not None else 'neither end'} of "
            f"[{lo}, {hi}]"
        )
    exists_state = state_lo if state_lo is not None else state_hi

    while hi - lo > param_tol:
        mid = 0.5 * (lo + hi)
        state_mid = probe(mid, exists_state)
        # Keep the bracket ends on opposite sides of the fold: the end where
        # the orbit exists moves to mid when the probe succeeds there.
        if (state_mid is not None) == (state_lo is not None):
            lo = mid
            if state_mid is not None:
                exists_state = state_mid
                state_lo = state_mid
        else:
            hi = mid
            if state_mid is not None:
                exists_state = state_mid
    return 0.5 * (lo + hi)


class ManifoldBranch(enum.Enum):
    STABLE_LEFT = "stable-left"
    STABLE_RIGHT = "stable-right"
    UNSTABLE_LEFT = "unstable-left"
    UNSTABLE_RIGHT = "unstable-right"


@dataclass(frozen=True)
class ManifoldTrace:
    """One manifold branch of a saddle strobe-map fixed point.

    ``points`` are section states ordered by iterate then by seeding offset;
    the first point sits at the smallest offset from the periodic point
    along the Floquet eigendirection.  ``plane_cuts`` maps a plane constant
    to the continuous-trajectory intersections with that third-coordinate
    plane (3-D flows only).
    """

    branch: ManifoldBranch
    points: tuple[tuple[float, ...], ...]
    arc_params: tuple[float, ...]
    #: (iterate, chain) bookkeeping per entry of ``points``; iterate 0 are
    #: the seeds.  Sorting by iterate then chain orders points by their
    #: leading-order arc position ``offset[chain] * multiplier**iterate``.
    indices: tuple[tuple[int, int], ...] = ()
    plane_cuts: tuple[tuple[float, tuple[tuple[float, ...], ...]], ...] = ()
    #: Dense samples of the continuous trajectories between strobes,
    #: contiguous and time-ordered per seeding chain (filled on request).
    path: tuple[tuple[float, ...], ...] = ()


def _saddle_directions(res: PeriodicOrbitResult) -> tuple[float, np.ndarray, float, np.ndarray]:
    """(unstable multiplier, direction, stable multiplier, direction)."""
    vals, vecs = np.linalg.eig(res.monodromy)
    real = [
        (float(vals[i].real), vecs[:, i].real)
        for i in range(len(vals))
        if abs(vals[i].imag) < 1e-9
    ]
    unstable = [(lam, v) for lam, v in real if lam > 1.0 + UNIT_CIRCLE_TOL]
    stable = [
        (lam, v) for lam, v in real if 0.0 < lam < 1.0 - UNIT_CIRCLE_TOL
    ]
    if not unstable or not stable:
        raise NotASaddle(
            f"orbit multipliers {res.multipliers!r} lack a real expanding/"
            f"contracting pair"
        )
    # Strongest expansion and weakest contraction carry the visible manifold.
    lam_u, v_u = max(unstable, key=lambda t: t[0])
    lam_s, v_s = max(stable, key=lambda t: t[0])
    return lam_u, _orient(v_u), lam_s, _orient(v_s)


def _orient(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    # Fix a deterministic sign: first nonzero component positive.
    for comp in v:
        if abs(comp) > 1e-12:
            return v if comp > 0 else -v
    return v


def trace_manifolds(
    flow: FlowSpec,
    saddle: PeriodicOrbitResult,
    arc: float,
    count: int,
    *,
    box: float = 3.0,
    planes: Sequence[float] = (),
    max_iterates: int = 60,
    path_samples: int = 0,
    branches: Sequence[ManifoldBranch] | None = None,
) -> list[ManifoldTrace]:
    """Trace the four stable/unstable manifold branches of a saddle orbit.

    ``count`` seeds are placed at geometric offsets spanning one fundamental
    domain ``[arc/multiplier, arc]`` along each Floquet eigendirection and
    iterated under the strobe map (inverse map for the stable branches)
    until every image leaves the box ``max|state_i| <= box``, contracts onto
    a periodic point, or ``max_iterates`` is reached.  For 3-D flows the
    continuous trajectories' intersections with the planes ``state_3 = c``
    are recorded per branch.  ``path_samples > 1`` additionally stores that
    many dense samples of each between-strobe trajectory in ``path`` (for an
    autonomous flow the path is itself a manifold sampling).

    Raises
    ------
    NotASaddle
        If the orbit has no real multiplier pair straddling the unit circle.
    """
    if saddle.classification is not OrbitClass.SADDLE:
        raise NotASaddle(f"orbit is classified {saddle.classification.value!r}")
    if not (arc > 0.0):
        raise DomainError(f"arc must be positive, got {arc!r}")
    if count < 2:
        raise DomainError(f"count must be >= 2, got {count}")
    lam_u, v_u, lam_s, v_s = _saddle_directions(saddle)
    x_star = saddle.initial_state
    period = saddle.m * flow.period

    plane_events = []
    if flow.dim == 3 and planes:
        for c in planes:
            def make_event(cc: float):
                def ev(t, y):
                    return y[2] - cc
                ev.terminal = False
                ev.direction = 0
                return ev
            plane_events.append((float(c), make_event(float(c))))

    def strobe(x: np.ndarray, backward: bool):
        t0, t1 = (period, 0.0) if backward else (0.0, period)
        t_eval = (
            np.linspace(t0, t1, path_samples) if path_samples > 1 else None
        )
        sol = _solve(
            flow, x, t0, t1,
            events=[ev for _, ev in plane_events] or None,
            t_eval=t_eval,
        )
        cuts = []
        if plane_events:
            for (c, _), ys in zip(plane_events, sol.y_events):
                for row in np.atleast_2d(ys):
                    if row.size:
                        cuts.append((c, row.copy()))
        samples = sol.y.T[1:] if t_eval is not None else ()
        return sol.y[:, -1].copy(), cuts, samples

    def follow(
        direction: np.ndarray, multiplier: float, backward: bool, branch: ManifoldBranch
    ) -> ManifoldTrace:
        # One fundamental domain of offsets: successive strobe images of the
        # seed segment tile the manifold without gaps.
        offsets = np.geomspace(arc / multiplier, arc, count)
        seeds = [x_star + off * direction for off in offsets]
        pts: list[tuple[float, ...]] = [tuple(map(float, s)) for s in seeds]
        idx: list[tuple[int, int]] = [(0, i) for i in range(len(seeds))]
        cuts: dict[float, list[tuple[float, ...]]] = {c: [] for c, _ in plane_events}
        heads: list[np.ndarray | None] = list(seeds)
        increments = [math.inf] * len(seeds)
        chain_paths: list[list[tuple[float, ...]]] = [[] for _ in seeds]
        for iterate in range(1, max_iterates + 1):
            progressed = False
            for i, s in enumerate(heads):
                if s is None:
                    continue
                try:
                    img, new_cuts, samples = strobe(s, backward)
                except StepFailure:
                    heads[i] = None
                    continue
                for c, row in new_cuts:
                    cuts[c].append(tuple(map(float, row)))
                for row in samples:
                    chain_paths[i].append(tuple(map(float, row)))
                if np.max(np.abs(img)) > box:
                    heads[i] = None
                    continue
                d = float(np.max(np.abs(img - s)))
                pts.append(tuple(map(float, img)))
                idx.append((iterate, i))
                if d < _FIXED_POINT_TOL or (
                    math.isfinite(increments[i])
                    and d * _CONTRACTION_CUT < increments[i]
                ):
                    heads[i] = None
                    continue
                heads[i] = img
                increments[i] = d
                progressed = True
            if not progressed:
                break
        return ManifoldTrace(
            branch=branch,
            points=tuple(pts),
            arc_params=tuple(float(o) for o in offsets),
            indices=tuple(idx),
            plane_cuts=tuple((c, tuple(rows)) for c, rows in cuts.items()),
            path=tuple(pt for chain in chain_paths for pt in chain),
        )

    inv_ls = 1.0 / lam_s  # contraction rate of the backward map
    plans = {
        ManifoldBranch.UNSTABLE_RIGHT: (v_u, lam_u, False),
        ManifoldBranch.UNSTABLE_LEFT: (-v_u, lam_u, False),
        ManifoldBranch.STABLE_RIGHT: (v_s, inv_ls, True),
        ManifoldBranch.STABLE_LEFT: (-v_s, inv_ls, True),
    }
    wanted = tuple(plans) if branches is None else tuple(branches)
    return [follow(*plans[b], b) for b in wanted]


def divergence_integral(flow: FlowSpec, state, m: int) -> float:
    """Integral of the vector-field divergence along ``m`` strobe periods."""
    n = flow.dim

    def aug_rhs(t: float, y: np.ndarray) -> np.ndarray:
        x = y[:n]
        return np.concatenate(
            [flow.rhs(t, x), [float(np.trace(flow.jacobian(t, x)))]]
        )

    aug = FlowSpec(
        rhs=aug_rhs, jacobian=flow.jacobian, period=flow.period, dim=flow.dim,
        abs_tol=flow.abs_tol, rel_tol=flow.rel_tol,
    )
    y0 = np.concatenate([np.asarray(state, dtype=float), [0.0]])
    sol = _solve(aug, y0, 0.0, m * flow.period)
    return float(sol.y[-1, -1])


def liouville_defect(flow: FlowSpec, result: PeriodicOrbitResult) -> float:
    """|log det(monodromy) - integral of divergence| along the orbit.

    Zero in exact arithmetic for any flow; ties the Floquet multipliers to
    the averaged-divergence stability functional.
    """
    prod = 1.0
    for lam in result.multipliers:
        prod *= abs(lam)
    return abs(math.log(prod) - divergence_integral(flow, result.initial_state, result.m))
