"""Transverse density matrix, decoherence evolution and far-field patterns.

The diffraction (x) direction is quantum: the beam is prepared in a
partially coherent Gaussian state described by a one-dimensional density
matrix rho(x1, x2).  In mean/difference coordinates, with ``m = (x1+x2)/2``
and ``delta = x1 - x2``,

    rho(m, delta) ~ exp(-(m - x0)^2 / (2 sigma_diag^2))
                  * exp(-delta^2 / (2 sigma_delta^2)),

where ``sigma_diag`` sets the spatial beam profile and ``sigma_delta`` the
coherence function against the literal path separation ``delta`` (the same
separation the decoherence models see).  Surface decoherence multiplies
each element by ``exp(-Gamma(|delta|))``, leaving the diagonal untouched.

The damped state is then written as a mixture of genuine Gaussian pure
states: wave functions of intensity width ``sigma_pure = sigma_delta/2``
whose centers follow a Gaussian envelope of width
``sigma_env = sqrt(sigma_diag^2 - sigma_pure^2)``.  In the continuum limit
this mixture reproduces the damped matrix exactly: each projector
contributes coherence width ``2 sigma_pure = sigma_delta`` along the
difference coordinate and the envelope convolution restores the diagonal
profile.  (With the difference coordinate scaled by sqrt(2) the same
construction takes the textbook equal-width form; the literal convention
is used here so Gamma acts on the physical path separation.)  A state is
exactly pure when ``sigma_delta = 2 sigma_diag``, i.e. ``sigma_env = 0``.

Each pure state is clipped by the grating and Fourier-propagated to the
detector; the weighted incoherent sum of the single-state patterns is the
far-field diffraction pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import FWHM_PER_SIGMA
from .errors import (
    DecompositionError,
    DomainError,
    InvalidCoherenceError,
    ResolutionError,
    WindowingError,
)
from .models import BeamSpec, MaterialSpec, ModelId, gamma_profile

__all__ = [
    "DensityMatrixGrid",
    "OffdiagonalWidth",
    "PureStateSet",
    "GratingSpec",
    "FarFieldPattern",
    "CoherenceNumerics",
    "initial_density_matrix",
    "density_matrix_from_widths",
    "apply_decoherence",
    "apply_gamma_profile",
    "extract_offdiagonal_width",
    "decompose",
    "grating_transmit",
    "grating_mask",
    "far_field",
    "pattern_for_height",
]


# --------------------------------------------------------------------------
# Types
# --------------------------------------------------------------------------

@dataclass
class DensityMatrixGrid:
    """Discretized transverse density matrix on a symmetric grid.

    ``x`` holds the (shared) coordinates of both indices; ``rho`` is real
    symmetric with positive diagonal and trace-normalized so that
    ``sum(diag(rho)) * step == 1``.
    """

    x: np.ndarray
    rho: np.ndarray
    center: float = 0.0

    def __post_init__(self):
        n = self.x.size
        if self.rho.shape != (n, n):
            raise DomainError("rho must be square and match the grid")

    @property
    def resolution(self) -> int:
        return self.x.size

    @property
    def span(self) -> float:
        return float(self.x[1] - self.x[0]) * self.x.size

    @property
    def step(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho) * self.step)

    def hermiticity_error(self) -> float:
        return float(np.abs(self.rho - self.rho.T).max())

    def antidiagonal_profile(self):
        """Central anti-diagonal: (delta, rho) with delta = x1 - x2.

        Merges the two anti-diagonals closest to the grid center (mean
        coordinates 0 and step/2 away from it), which samples the coherence
        function on every multiple of the grid step including delta = 0;
        the half-step mean offset is far below the envelope scale.
        """
        n = self.resolution
        idx = np.arange(n)
        d1 = self.x[idx] - self.x[n - 1 - idx]
        v1 = self.rho[idx, n - 1 - idx]
        idx2 = np.arange(n - 1)
        d2 = self.x[idx2] - self.x[n - 2 - idx2]
        v2 = self.rho[idx2, n - 2 - idx2]
        delta = np.concatenate([d1, d2])
        vals = np.concatenate([v1, v2])
        order = np.argsort(delta)
        return delta[order], vals[order]

    def diagonal_profile(self):
        return self.x, np.diag(self.rho).copy()


@dataclass(frozen=True)
class OffdiagonalWidth:
    """Gaussian width of the coherence function, with fit diagnostics."""

    sigma: float
    amplitude: float
    residual: float
    shape_warning: bool


@dataclass(frozen=True)
class PureStateSet:
    """Gaussian pure-state mixture equivalent of a damped density matrix.

    Each state n is a normalized Gaussian wave function of intensity
    standard deviation ``sigma_pure`` centered at ``centers[n]``, carrying
    weight ``weights[n] >= 0`` (weights sum to 1).  ``sigma_env`` is the
    width of the center envelope and obeys
    ``sigma_env^2 = sigma_diag^2 - sigma_pure^2``.  The coherence width of
    every state along the path-separation coordinate is
    ``2 sigma_pure = sigma_delta`` of the source matrix.
    """

    weights: np.ndarray
    centers: np.ndarray
    sigma_pure: float
    sigma_env: float
    sigma_diag: float
    sigma_delta: float
    center: float = 0.0
    reconstruction_error: float = float("nan")

    def __len__(self) -> int:
        return self.weights.size

    def wavefunction(self, n: int, x: np.ndarray) -> np.ndarray:
        """Normalized wave function of state n sampled on ``x``."""
        psi = np.exp(-((x - self.centers[n]) ** 2) / (4.0 * self.sigma_pure**2))
        norm = math.sqrt(float(np.sum(psi**2)) * float(x[1] - x[0]))
        return psi / norm

    def reconstruct(self, x: np.ndarray) -> np.ndarray:
        """Weighted sum of the pure-state projectors on the given grid."""
        out = np.zeros((x.size, x.size))
        for n in range(len(self)):
            psi = self.wavefunction(n, x)
            out += self.weights[n] * np.outer(psi, psi)
        return out


@dataclass(frozen=True)
class GratingSpec:
    """Periodic binary transmission grating."""

    period: float = 100e-9
    open_fraction: float = 0.5

    def __post_init__(self):
        if not self.period > 0:
            raise DomainError("period must be > 0")
        if not 0.0 < self.open_fraction <= 1.0:
            raise DomainError("open_fraction must lie in (0, 1]")

    def bars_covered(self, span: float) -> int:
        return int(span // self.period)


@dataclass
class FarFieldPattern:
    """Far-field intensity versus detector coordinate."""

    x: np.ndarray
    intensity: np.ndarray
    camera_length: float
    mean_gamma_ref: float = float("nan")
    offdiagonal_sigma: float = float("nan")

    def peak_spacing(self, wavelength: float, grating: GratingSpec) -> float:
        return wavelength * self.camera_length / grating.period


@dataclass(frozen=True)
class CoherenceNumerics:
    """Grid and convergence knobs for the quantum engine."""

    rho_span: float = 12e-6
    rho_resolution: int = 512
    psi_span: float = 16e-6
    psi_resolution: int = 32768
    n_pure_states: int = 64
    beam_width: float = 3e-6          # spatial beam width w (FWHM), geometric estimate
    camera_length: float = 0.24
    bin_gamma_mode: str = "mean_gamma"  # or "mean_exp"
    sigma_pure_floor: float = 16e-9     # resolution floor for deeply decohered states
    reconstruction_tol: float = 1e-3


# --------------------------------------------------------------------------
# Density-matrix construction and evolution
# --------------------------------------------------------------------------

def _symmetric_grid(span: float, resolution: int, center: float) -> np.ndarray:
    if resolution < 8:
        raise DomainError("resolution must be at least 8")
    h = span / resolution
    return center + (np.arange(resolution) - resolution / 2 + 0.5) * h


def density_matrix_from_widths(
    sigma_diag: float,
    sigma_delta: float,
    span: float,
    resolution: int,
    center: float = 0.0,
) -> DensityMatrixGrid:
    """Gaussian density matrix with given diagonal and coherence widths.

    ``sigma_delta = 2 sigma_diag`` is the exactly pure (rank-one) state;
    smaller values are partially coherent.
    """
    if not sigma_diag > 0 or not sigma_delta > 0:
        raise DomainError("widths must be > 0")
    x = _symmetric_grid(span, resolution, center)
    m = 0.5 * (x[:, None] + x[None, :]) - center
    d = x[:, None] - x[None, :]
    rho = np.exp(-(m**2) / (2.0 * sigma_diag**2)) * np.exp(
        -(d**2) / (2.0 * sigma_delta**2)
    )
    rho /= np.trace(rho) * (x[1] - x[0])
    return DensityMatrixGrid(x=x, rho=rho, center=center)


def initial_density_matrix(
    beam: BeamSpec,
    numerics: CoherenceNumerics,
    center: float = 0.0,
) -> DensityMatrixGrid:
    """Partially coherent Gaussian beam state before the surface.

    The coherence width (FWHM against path separation) comes from
    ``beam.coherence_width`` and the spatial width from
    ``numerics.beam_width``.  A coherence width exceeding the spatial width
    is unphysical and raises :class:`InvalidCoherenceError`.
    """
    w_prime = beam.coherence_width
    w = numerics.beam_width
    if w_prime > w:
        raise InvalidCoherenceError(
            f"initial coherence width {w_prime:.3e} m exceeds beam width {w:.3e} m"
        )
    return density_matrix_from_widths(
        sigma_diag=w / FWHM_PER_SIGMA,
        sigma_delta=w_prime / FWHM_PER_SIGMA,
        span=numerics.rho_span,
        resolution=numerics.rho_resolution,
        center=center,
    )


def apply_gamma_profile(grid: DensityMatrixGrid, gamma) -> DensityMatrixGrid:
    """Damp off-diagonals by exp(-Gamma(|x1 - x2|)).

    ``gamma`` is either a callable of the separation or an array of Gamma
    values on the grid's non-negative unique separations
    ``k * step, k = 0 .. n-1``.  Gamma(0) is forced to zero, so the
    diagonal and the trace are preserved exactly.
    """
    n = grid.resolution
    seps = np.arange(n) * grid.step
    if callable(gamma):
        g = np.empty(n)
        g[0] = 0.0
        g[1:] = gamma(seps[1:])
    else:
        g = np.asarray(gamma, dtype=float)
        if g.shape != (n,):
            raise DomainError("gamma array must have one value per unique separation")
        g = g.copy()
        g[0] = 0.0
    damp = np.exp(-g)
    k = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    return DensityMatrixGrid(x=grid.x, rho=grid.rho * damp[k], center=grid.center)


def apply_decoherence(
    grid: DensityMatrixGrid,
    model: ModelId,
    traj,
    mat: MaterialSpec,
    beam: BeamSpec,
    buhmann_variant: str = "regularized",
    howie_eta_mode: str = "y_over_4dx",
) -> DensityMatrixGrid:
    """Damp the matrix with the decoherence factor of one trajectory.

    ``ModelId.NONE`` returns the input unchanged (bit-identical copy).
    Absorbed trajectories carry no coherent amplitude and must be filtered
    by the caller; passing one raises :class:`DomainError`.
    """
    if getattr(traj, "absorbed", False):
        raise DomainError("absorbed trajectory has no coherent far-field amplitude")
    if model is ModelId.NONE:
        return DensityMatrixGrid(x=grid.x, rho=grid.rho.copy(), center=grid.center)
    n = grid.resolution
    seps = np.arange(1, n) * grid.step
    g = np.empty(n)
    g[0] = 0.0
    g[1:] = gamma_profile(
        model,
        traj.t,
        traj.y,
        seps,
        mat,
        beam,
        buhmann_variant=buhmann_variant,
        howie_eta_mode=howie_eta_mode,
    )
    return apply_gamma_profile(grid, g)


# --------------------------------------------------------------------------
# Width extraction and pure-state decomposition
# --------------------------------------------------------------------------

def _gaussian_sigma_lsq(u: np.ndarray, vals: np.ndarray) -> tuple[float, float, float]:
    """Least-squares Gaussian (A, sigma) for vals(u); returns residual too.

    Linear fit of log(vals) against u^2 with the abscissa rescaled to unit
    half-max radius, which keeps the normal equations well conditioned at
    any physical scale.
    """
    vmax = float(vals.max())
    keep = vals > vmax * 1e-8
    uk = u[keep]
    vk = vals[keep]
    if np.unique(np.abs(uk)).size < 2:
        raise DomainError("profile collapses below the grid resolution")
    # rescale |u| by the approximate half-max radius
    above = np.abs(uk[vk >= 0.5 * vmax])
    scale = float(above.max()) if above.size and above.max() > 0 else float(np.abs(uk).max())
    if scale <= 0:
        scale = 1.0
    q = (uk / scale) ** 2
    a = np.vstack([np.ones_like(q), q]).T
    coef, *_ = np.linalg.lstsq(a, np.log(vk), rcond=None)
    if coef[1] >= 0:
        raise DomainError("profile is not Gaussian-decaying")
    sigma = scale * math.sqrt(-1.0 / (2.0 * coef[1]))
    amp = math.exp(coef[0])
    model = amp * np.exp(-(uk**2) / (2.0 * sigma**2))
    residual = float(np.linalg.norm(model - vk) / np.linalg.norm(vk))
    return amp, sigma, residual


def extract_offdiagonal_width(
    grid: DensityMatrixGrid, residual_threshold: float = 1e-2
) -> OffdiagonalWidth:
    """Gaussian width of the central anti-diagonal against path separation.

    Decoherence only narrows this profile, so the returned sigma never
    exceeds the initial coherence width.  If the damped profile is not
    Gaussian (a non-quadratic decoherence exponent), the least-squares
    residual is reported and ``shape_warning`` set when it exceeds the
    threshold.
    """
    delta, vals = grid.antidiagonal_profile()
    if vals.max() <= 0:
        raise DomainError("anti-diagonal has no positive values")
    try:
        amp, sigma, residual = _gaussian_sigma_lsq(delta, vals)
    except DomainError:
        # Everything off the diagonal is dead: the coherence width is below
        # one grid step.  Return the resolution floor with a warning.
        return OffdiagonalWidth(
            sigma=0.5 * grid.step,
            amplitude=float(vals.max()),
            residual=float("inf"),
            shape_warning=True,
        )
    return OffdiagonalWidth(
        sigma=sigma,
        amplitude=amp,
        residual=residual,
        shape_warning=residual > residual_threshold,
    )


def decompose(
    grid: DensityMatrixGrid,
    n_states: int = 64,
    reconstruction_tol: float = 1e-3,
) -> PureStateSet:
    """Write the (damped) Gaussian state as a Gaussian pure-state mixture.

    Fits the diagonal and anti-diagonal widths, places ``n_states`` Gaussian
    wave functions of intensity width ``sigma_delta/2`` on a uniform grid of
    centers spanning +/- 4 sigma_env with Gaussian envelope weights, and
    verifies that the weighted projector sum reproduces the separable
    Gaussian model of the input within ``reconstruction_tol`` of its peak
    (max-norm).  A fully coherent input (sigma_env = 0) collapses to a
    single state of weight 1.

    Raises
    ------
    DecompositionError
        If the reconstruction tolerance is not met; increase ``n_states``.
    """
    if n_states < 1:
        raise DomainError("n_states must be >= 1")
    xs, diag = grid.diagonal_profile()
    _, sigma_diag, _ = _gaussian_sigma_lsq(xs - grid.center, diag)
    od = extract_offdiagonal_width(grid)
    sigma_pure = 0.5 * od.sigma
    if sigma_pure > sigma_diag * (1.0 + 1e-6):
        raise DomainError(
            "coherence width exceeds the pure-state bound (sigma_delta > 2 sigma_diag)"
        )
    sigma_pure = min(sigma_pure, sigma_diag)
    env_sq = sigma_diag**2 - sigma_pure**2
    sigma_env = math.sqrt(max(env_sq, 0.0))

    if sigma_env < 1e-6 * sigma_diag:
        states = PureStateSet(
            weights=np.asarray([1.0]),
            centers=np.asarray([grid.center]),
            sigma_pure=sigma_pure,
            sigma_env=0.0,
            sigma_diag=sigma_diag,
            sigma_delta=od.sigma,
            center=grid.center,
            reconstruction_error=0.0,
        )
        return states

    centers = grid.center + np.linspace(-4.0 * sigma_env, 4.0 * sigma_env, n_states)
    weights = np.exp(-((centers - grid.center) ** 2) / (2.0 * sigma_env**2))
    weights /= weights.sum()
    states = PureStateSet(
        weights=weights,
        centers=centers,
        sigma_pure=sigma_pure,
        sigma_env=sigma_env,
        sigma_diag=sigma_diag,
        sigma_delta=od.sigma,
        center=grid.center,
    )

    # Fidelity check against the separable Gaussian model of the input.
    m = 0.5 * (grid.x[:, None] + grid.x[None, :]) - grid.center
    dd = grid.x[:, None] - grid.x[None, :]
    target = np.exp(-(m**2) / (2.0 * sigma_diag**2)) * np.exp(
        -(dd**2) / (2.0 * od.sigma**2)
    )
    target /= np.trace(target) * grid.step
    recon = states.reconstruct(grid.x)
    recon *= np.trace(target) / np.trace(recon)
    err = float(np.abs(recon - target).max() / target.max())
    if err > reconstruction_tol:
        raise DecompositionError(
            f"reconstruction error {err:.2e} exceeds {reconstruction_tol:.1e}; "
            f"increase n_states (currently {n_states})"
        )
    object.__setattr__(states, "reconstruction_error", err)
    return states


# --------------------------------------------------------------------------
# Grating and far field
# --------------------------------------------------------------------------

def grating_mask(x: np.ndarray, grating: GratingSpec) -> np.ndarray:
    """Binary transmission on the grid: 1 on open slits, 0 on bars.

    Slits are centered on multiples of the period.  The grid must resolve
    the period by at least 16 points.
    """
    h = float(x[1] - x[0])
    if grating.period / h < 16.0:
        raise ResolutionError(
            f"grid step {h:.3e} m resolves the {grating.period:.3e} m period "
            f"by fewer than 16 points"
        )
    if grating.open_fraction >= 1.0:
        return np.ones_like(x)
    frac = np.mod(x / grating.period + 0.5 * grating.open_fraction, 1.0)
    return (frac < grating.open_fraction).astype(float)


def grating_transmit(psi: np.ndarray, x: np.ndarray, grating: GratingSpec) -> np.ndarray:
    """Clip a wave function on the grating (pointwise binary mask)."""
    return psi * grating_mask(x, grating)


def far_field(
    psi: np.ndarray,
    x: np.ndarray,
    camera_length: float,
    wavelength: float,
    edge_guard: bool = True,
) -> FarFieldPattern:
    """Fraunhofer propagation: intensity of the Fourier transform.

    The detector coordinate is ``X = wavelength * camera_length * f`` with
    ``f`` the spatial frequency; normalization conserves total intensity
    (Parseval).  With ``edge_guard``, intensity at the frequency-window
    edge above 1e-4 of the peak raises :class:`WindowingError` (the pattern
    does not fit the window: refine the grid or shrink the state).
    """
    n = x.size
    h = float(x[1] - x[0])
    f = np.fft.fftshift(np.fft.fftfreq(n, h))
    det_x = wavelength * camera_length * f
    amp = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(psi)))
    intensity = (np.abs(amp) ** 2) * h**2 / (wavelength * camera_length)
    if edge_guard:
        m = max(8, n // 100)
        edge = max(float(intensity[:m].max()), float(intensity[-m:].max()))
        if edge > 1e-4 * float(intensity.max()):
            raise WindowingError(
                f"far-field intensity at window edge is {edge / intensity.max():.2e} "
                f"of peak (> 1e-4); refine the spatial grid"
            )
    return FarFieldPattern(x=det_x, intensity=intensity, camera_length=camera_length)


# --------------------------------------------------------------------------
# Per-height orchestration
# --------------------------------------------------------------------------

def pattern_for_height(
    y_bin: tuple[float, float],
    ensemble,
    model: ModelId,
    mat: MaterialSpec | None,
    beam: BeamSpec,
    grating: GratingSpec,
    numerics: CoherenceNumerics,
    reference_dx: float = 600e-9,
    buhmann_variant: str = "regularized",
    howie_eta_mode: str = "y_over_4dx",
    surface_reference: float | None = None,
) -> FarFieldPattern | None:
    """Far-field pattern for trajectories landing in one detector-height bin.

    Heights are detector coordinates relative to the surface plane.  The
    decoherence factor profile is averaged over the bin's surviving
    trajectories (arithmetic mean of Gamma by default; set
    ``numerics.bin_gamma_mode = "mean_exp"`` to average the suppression
    factors instead), applied to the initial state, and the damped state is
    decomposed and propagated through the grating.  Returns None when no
    surviving trajectory lands in the bin.
    """
    lo, hi = y_bin
    ref = ensemble.surface_height if surface_reference is None else surface_reference
    rel = ensemble.detector_y - ref
    sel = ~ensemble.absorbed & (rel >= lo) & (rel < hi)
    idx = np.flatnonzero(sel)
    if idx.size == 0:
        return None
    x = _symmetric_grid(numerics.psi_span, numerics.psi_resolution, 0.0)
    h = float(x[1] - x[0])

    rho0 = initial_density_matrix(beam, numerics)
    n = rho0.resolution
    seps = np.arange(1, n) * rho0.step
    mean_gamma_ref = 0.0

    if model is ModelId.NONE:
        damped = rho0
    else:
        if mat is None:
            raise DomainError(f"model {model.value} requires a MaterialSpec")
        acc = np.zeros(n - 1)
        acc_ref = 0.0
        for i in idx:
            g = gamma_profile(
                model,
                ensemble.t,
                ensemble.y[i],
                seps,
                mat,
                beam,
                buhmann_variant=buhmann_variant,
                howie_eta_mode=howie_eta_mode,
            )
            gref = gamma_profile(
                model,
                ensemble.t,
                ensemble.y[i],
                np.asarray([reference_dx]),
                mat,
                beam,
                buhmann_variant=buhmann_variant,
                howie_eta_mode=howie_eta_mode,
            )
            acc_ref += float(gref[0])
            if numerics.bin_gamma_mode == "mean_exp":
                acc += np.exp(-g)
            else:
                acc += g
        mean_gamma_ref = acc_ref / idx.size
        g_full = np.empty(n)
        g_full[0] = 0.0
        if numerics.bin_gamma_mode == "mean_exp":
            mean_damp = acc / idx.size
            g_full[1:] = -np.log(np.maximum(mean_damp, 1e-300))
        else:
            g_full[1:] = acc / idx.size
        damped = apply_gamma_profile(rho0, g_full)

    # Inline pure-state mixture with the resolution floor applied.  The
    # strict reconstruction contract of :func:`decompose` assumes a
    # separable-Gaussian state; deeply damped matrices deviate from it in
    # position space while their far field, an incoherent sum over states
    # of identical coherence width, stays converged (guarded by the
    # n-doubling drift check instead).
    xs, diag = damped.diagonal_profile()
    _, sigma_diag, _ = _gaussian_sigma_lsq(xs - damped.center, diag)
    ow = extract_offdiagonal_width(damped)
    sigma_pure = max(0.5 * ow.sigma, numerics.sigma_pure_floor, 4.0 * h)
    sigma_pure = min(sigma_pure, 0.999 * sigma_diag)
    sigma_env = math.sqrt(max(sigma_diag**2 - sigma_pure**2, 0.0))
    n_states = numerics.n_pure_states
    if sigma_env < 1e-6 * sigma_diag:
        centers = np.asarray([damped.center])
        weights = np.asarray([1.0])
    else:
        centers = damped.center + np.linspace(
            -4.0 * sigma_env, 4.0 * sigma_env, n_states
        )
        weights = np.exp(-((centers - damped.center) ** 2) / (2.0 * sigma_env**2))
        weights /= weights.sum()

    mask = grating_mask(x, grating)
    intensity = None
    det_x = None
    for k in range(centers.size):
        psi = np.exp(-((x - centers[k]) ** 2) / (4.0 * sigma_pure**2))
        psi /= math.sqrt(float(np.sum(psi**2)) * h)
        pat = far_field(
            psi * mask, x, numerics.camera_length, beam.wavelength, edge_guard=False
        )
        if intensity is None:
            intensity = weights[k] * pat.intensity
            det_x = pat.x
        else:
            intensity += weights[k] * pat.intensity
    m = max(8, x.size // 100)
    edge = max(float(intensity[:m].max()), float(intensity[-m:].max()))
    if edge > 1e-4 * float(intensity.max()):
        raise WindowingError(
            f"summed far-field pattern leaks {edge / intensity.max():.2e} of its peak "
            f"into the window edge"
        )
    return FarFieldPattern(
        x=det_x,
        intensity=intensity,
        camera_length=numerics.camera_length,
        mean_gamma_ref=mean_gamma_ref,
        offdiagonal_sigma=ow.sigma,
    )
