"""Classical electron trajectories over the raised surface.

The vertical (y) motion over the surface is classical: the beam is tall
and weakly coherent in y, so trajectories are sampled from the measured
divergence, attracted toward the surface by the image-charge force,
clipped on the raised edge, and propagated ballistically to the detector.
The resulting height histories y(t) feed the decoherence factor, and the
detector-plane distribution reproduces the measured vertical line-out.

Coordinates: ``y`` is lab height relative to the beam axis; the surface
plane sits at ``GeometrySpec.surface_height``.  Heights stored in a
:class:`TrajectoryRecord` are relative to the surface plane (y = 0 is
absorption).  ``detector_y`` is kept in lab coordinates.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .constants import IMAGE_ACCEL
from .errors import DomainError, NumericalError, SearchError
from .models import BeamSpec

__all__ = [
    "GeometrySpec",
    "InitialConditions",
    "TrajectoryRecord",
    "TrajectoryEnsemble",
    "sample_initial_conditions",
    "propagate_over_surface",
    "propagate_ensemble",
    "find_cut_height",
    "detector_histogram",
]

NO_SURFACE_HEIGHT = -1.0  # surface parked 1 m below the beam: force ~ 1e-38 m/s^2


@dataclass(frozen=True)
class GeometrySpec:
    """Beamline geometry.

    Distances in meters.  ``surface_height`` is the lab y-coordinate of the
    raised surface plane and is the one tunable quantity (see
    :func:`find_cut_height`); set it to :data:`NO_SURFACE_HEIGHT` to park
    the surface out of the beam.
    """

    slit_separation: float = 0.25
    grating_to_surface: float = 3e-3
    surface_length: float = 1e-2
    grating_to_detector: float = 0.24
    surface_height: float = 0.0
    detector_bin_width: float = 4.8e-6
    beam_halfheight: float = 50e-6

    def __post_init__(self):
        for name in (
            "slit_separation",
            "grating_to_surface",
            "surface_length",
            "grating_to_detector",
            "detector_bin_width",
            "beam_halfheight",
        ):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0")
        if self.grating_to_surface + self.surface_length > self.grating_to_detector:
            raise DomainError("surface does not fit between grating and detector")

    @property
    def surface_to_detector(self) -> float:
        return self.grating_to_detector - self.grating_to_surface - self.surface_length

    def with_surface_height(self, height: float) -> "GeometrySpec":
        return replace(self, surface_height=height)


@dataclass(frozen=True)
class InitialConditions:
    """Sampled (y, v_y) pairs at the surface entrance, lab coordinates."""

    y: np.ndarray
    vy: np.ndarray
    seed: int


@dataclass(frozen=True)
class TrajectoryRecord:
    """One sampled trajectory over the surface.

    ``t`` and ``y`` sample the over-surface interval; ``y`` is measured
    from the surface plane.  ``z(t) = v t``.  For an absorbed trajectory
    the samples after the absorption time are frozen at the last value and
    ``detector_y`` is NaN.
    """

    t: np.ndarray
    y: np.ndarray
    speed: float
    absorbed: bool
    detector_y: float
    y0: float
    vy0: float

    @property
    def z(self) -> np.ndarray:
        return self.speed * self.t


@dataclass
class TrajectoryEnsemble:
    """Vectorized bundle of trajectories sharing one time grid."""

    t: np.ndarray          # (n_store,)
    y: np.ndarray          # (n_traj, n_store), surface-relative heights
    absorbed: np.ndarray   # (n_traj,) bool
    detector_y: np.ndarray  # (n_traj,) lab coordinates, NaN if absorbed
    y0: np.ndarray         # (n_traj,) lab entry heights
    vy0: np.ndarray        # (n_traj,)
    speed: float
    surface_height: float
    seed: int

    def __len__(self) -> int:
        return self.y.shape[0]

    @property
    def transmitted_fraction(self) -> float:
        return float(np.count_nonzero(~self.absorbed)) / len(self)

    def record(self, i: int) -> TrajectoryRecord:
        return TrajectoryRecord(
            t=self.t,
            y=self.y[i],
            speed=self.speed,
            absorbed=bool(self.absorbed[i]),
            detector_y=float(self.detector_y[i]),
            y0=float(self.y0[i]),
            vy0=float(self.vy0[i]),
        )

    @property
    def records(self) -> list[TrajectoryRecord]:
        return [self.record(i) for i in range(len(self))]

    def to_csv(self, path) -> None:
        """Debug dump, one row per trajectory: y0_m, absorbed, detector_y_m."""
        with open(path, "w", newline="\n") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["y0_m", "absorbed", "detector_y_m"])
            for i in range(len(self)):
                w.writerow(
                    [
                        f"{self.y0[i]:.12e}",
                        int(self.absorbed[i]),
                        "nan" if self.absorbed[i] else f"{self.detector_y[i]:.12e}",
                    ]
                )


def sample_initial_conditions(
    beam: BeamSpec, geom: GeometrySpec, n: int, seed: int
) -> InitialConditions:
    """Draw n (y, v_y) pairs at the surface entrance.

    Positions are uniform over the beam's vertical extent (stratified
    jittered sampling, which keeps clipped-fraction estimates accurate to
    O(1/n) instead of O(1/sqrt n)) and transverse velocities uniform over
    the full geometric divergence, so the sampled angular full width equals
    ``divergence_y``.  Identical seeds give bit-identical draws.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    rng = np.random.default_rng(seed)
    h = geom.beam_halfheight
    y = -h + (np.arange(n) + rng.uniform(size=n)) * (2.0 * h / n)
    half_angle = 0.5 * beam.divergence_y
    vy = rng.uniform(-half_angle, half_angle, size=n) * beam.speed
    return InitialConditions(y=y, vy=vy, seed=seed)


def propagate_ensemble(
    conds: InitialConditions,
    geom: GeometrySpec,
    beam: BeamSpec,
    image_charge: bool = True,
    n_steps: int = 10_000,
    n_store: int = 500,
    energy_tol: float | None = 1e-2,
) -> TrajectoryEnsemble:
    """Propagate all initial conditions over the surface and to the detector.

    Velocity-Verlet with ``n_steps`` fixed steps over the surface length,
    vertical acceleration ``-IMAGE_ACCEL / y^2`` toward the plane (zero
    when ``image_charge`` is false), absorption at y <= 0, then free flight
    to the detector plane.  The stored height history is subsampled to
    about ``n_store`` points including both endpoints.

    Raises
    ------
    NumericalError
        If the per-trajectory energy drift of any surviving trajectory
        exceeds ``energy_tol`` relative.  This is an instability guard:
        trajectories skimming within a fraction of a micrometer of the
        plane sit near the capture singularity and legitimately carry more
        integration error than the default bound on well-resolved paths;
        they also leave the detector region the analysis uses.
    """
    v = beam.speed
    dt = geom.surface_length / v / n_steps
    stride = max(1, n_steps // n_store)
    n_samples = n_steps // stride + 1

    y = conds.y - geom.surface_height  # surface-relative
    n = y.size
    vy = conds.vy.copy()
    absorbed = y <= 0.0  # below the raised front edge: hits the plate face
    y = np.where(absorbed, np.nan, y)

    e0 = 0.5 * conds.vy**2
    if image_charge:
        e0 = e0 - IMAGE_ACCEL / np.where(absorbed, 1.0, y)

    t_store = np.empty(n_samples)
    y_store = np.empty((n, n_samples))
    t_store[0] = 0.0
    y_store[:, 0] = np.where(absorbed, 0.0, y)

    def accel(yv):
        if not image_charge:
            return 0.0
        return -IMAGE_ACCEL / yv**2

    a = accel(np.where(absorbed, 1.0, y))
    k = 0
    for step in range(1, n_steps + 1):
        vy_half = vy + 0.5 * dt * a
        y_new = y + dt * vy_half
        hit = ~absorbed & (y_new <= 0.0)
        if np.any(hit):
            absorbed = absorbed | hit
            y_new = np.where(hit, 0.0, y_new)
        y = np.where(absorbed, y, y_new)
        y_frozen = np.where(absorbed, np.where(np.isnan(y), 1.0, np.maximum(y, 1e-12)), y)
        a = accel(y_frozen)
        a = np.where(absorbed, 0.0, a)
        vy = np.where(absorbed, vy, vy_half + 0.5 * dt * a)
        if step % stride == 0:
            k += 1
            t_store[k] = step * dt
            y_store[:, k] = np.where(absorbed, np.nan, y)
    # freeze absorbed histories at their last valid height for storage
    y_store = np.where(np.isnan(y_store), 0.0, y_store)

    alive = ~absorbed
    if image_charge and energy_tol is not None and np.any(alive):
        e1 = 0.5 * vy[alive] ** 2 - IMAGE_ACCEL / y[alive]
        scale = np.maximum(np.abs(e0[alive]), 0.5 * conds.vy[alive] ** 2 + IMAGE_ACCEL / np.abs(conds.y[alive] - geom.surface_height))
        drift = np.max(np.abs(e1 - e0[alive]) / np.maximum(scale, 1e-30))
        if drift > energy_tol:
            raise NumericalError(
                f"energy drift {drift:.3e} exceeds {energy_tol:.1e}; "
                f"n_steps={n_steps} is too coarse for this geometry"
            )

    t_flight = geom.surface_to_detector / v
    det = np.where(alive, (y + vy * t_flight) + geom.surface_height, np.nan)

    return TrajectoryEnsemble(
        t=t_store,
        y=y_store,
        absorbed=absorbed,
        detector_y=det,
        y0=conds.y.copy(),
        vy0=conds.vy.copy(),
        speed=v,
        surface_height=geom.surface_height,
        seed=conds.seed,
    )


def propagate_over_surface(
    y0: float,
    vy0: float,
    geom: GeometrySpec,
    beam: BeamSpec,
    image_charge: bool = True,
    n_steps: int = 10_000,
    n_store: int = 500,
) -> TrajectoryRecord:
    """Propagate a single initial state (lab y0, v_y0); see propagate_ensemble."""
    conds = InitialConditions(
        y=np.asarray([y0], dtype=float), vy=np.asarray([vy0], dtype=float), seed=0
    )
    ens = propagate_ensemble(
        conds, geom, beam, image_charge=image_charge, n_steps=n_steps, n_store=n_store
    )
    return ens.record(0)


def find_cut_height(
    beam: BeamSpec,
    geom: GeometrySpec,
    target_fraction: float,
    n: int = 2000,
    seed: int = 0,
    n_steps: int = 2000,
    tol: float = 0.01,
    image_charge: bool = True,
    max_iter: int = 60,
) -> float:
    """Bisection on the surface height for a given transmitted fraction.

    The initial-condition draw is fixed once (same seed for every candidate
    height), making the transmitted fraction a deterministic, non-increasing
    function of the height.  Returns the height at which the fraction is
    within ``tol`` of ``target_fraction``.

    A target of 1.0 returns the lower search bound (surface fully below the
    beam).  Raises :class:`SearchError` if the target cannot be bracketed.
    """
    if not 0.0 < target_fraction <= 1.0:
        raise DomainError("target_fraction must lie in (0, 1]")
    conds = sample_initial_conditions(beam, geom, n, seed)

    def fraction(height: float) -> float:
        ens = propagate_ensemble(
            conds,
            geom.with_surface_height(height),
            beam,
            image_charge=image_charge,
            n_steps=n_steps,
            n_store=8,
            energy_tol=None,  # only the absorbed/transmitted split matters here
        )
        return ens.transmitted_fraction

    lo = -4.0 * geom.beam_halfheight
    hi = 2.0 * geom.beam_halfheight
    f_lo = fraction(lo)
    if f_lo <= target_fraction + tol:
        # includes target 1.0: surface already below the whole beam
        if abs(f_lo - target_fraction) <= tol or target_fraction >= 1.0:
            return lo
        raise SearchError(
            f"transmitted fraction at the lower bound is {f_lo:.3f} < target"
        )
    f_hi = fraction(hi)
    if f_hi > target_fraction:
        raise SearchError("target fraction not reachable within height bounds")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = fraction(mid)
        if abs(f_mid - target_fraction) <= tol:
            return mid
        if f_mid > target_fraction:
            lo = mid
        else:
            hi = mid
    raise SearchError(
        f"bisection did not reach target {target_fraction} within {max_iter} iterations"
    )


def detector_histogram(ensemble: TrajectoryEnsemble, bin_width: float):
    """Histogram of detector_y over surviving trajectories.

    Returns ``(edges, counts)`` with uniform bins of the given width
    covering the transmitted distribution.  Absorbed trajectories never
    contribute.
    """
    if len(ensemble) == 0:
        raise DomainError("empty ensemble")
    det = ensemble.detector_y[~ensemble.absorbed]
    if det.size == 0:
        return np.asarray([0.0, bin_width]), np.asarray([0])
    lo = np.floor(det.min() / bin_width) * bin_width
    hi = np.ceil(det.max() / bin_width) * bin_width + 0.5 * bin_width
    edges = np.arange(lo, hi + bin_width, bin_width)
    counts, _ = np.histogram(det, bins=edges)
    return edges, counts
