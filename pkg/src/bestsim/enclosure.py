"""Interior distribution of transmitted solar radiation.

Radiation entering the zone lands on the surfaces according to initial
weights, then each surface absorbs a fraction, lets a fraction escape
(glazing back-transmission) and reflects the rest diffusely according to
the view factors. The multiple-reflection series is summed in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class TooFewSurfaces(ValueError):
    pass


class NonAbsorbingEnclosure(ValueError):
    pass


@dataclass(frozen=True)
class EnclosureSurface:
    area: float
    solar_absorptance: float
    back_loss_transmittance: float = 0.0

    def __post_init__(self):
        if not self.area > 0:
            raise ValueError("surface area must be positive")
        a, t = self.solar_absorptance, self.back_loss_transmittance
        if not (0.0 <= a <= 1.0 and 0.0 <= t <= 1.0):
            raise ValueError("absorptance and back-loss transmittance must lie in [0, 1]")
        if a + t > 1.0 + 1e-12:
            raise ValueError("absorptance + back-loss transmittance exceeds 1")

    @property
    def reflectance(self) -> float:
        return max(1.0 - self.solar_absorptance - self.back_loss_transmittance, 0.0)


@dataclass(frozen=True)
class SolarSplit:
    absorbed: np.ndarray
    lost_out: float

    @property
    def total_absorbed(self) -> float:
        return float(np.sum(self.absorbed))


def view_factor_matrix(surfaces: Sequence[EnclosureSurface]) -> np.ndarray:
    """Area-weighted view factors F[i, j] = A_j / sum(A), self-view included.

    Rows sum to one and A_i F_ij = A_j F_ji hold by construction.
    """
    if len(surfaces) < 2:
        raise TooFewSurfaces(f"need at least two surfaces, got {len(surfaces)}")
    areas = np.array([s.area for s in surfaces], dtype=float)
    row = areas / areas.sum()
    f = np.tile(row, (len(surfaces), 1))
    f.flags.writeable = False
    return f


def area_weights(surfaces: Sequence[EnclosureSurface], receiving: Sequence[bool] | None = None,
                 floor: int | None = None, floor_fraction: float = 0.0) -> np.ndarray:
    """First-bounce weights: area-weighted over receiving surfaces.

    ``floor_fraction`` of the total goes to surface ``floor`` first and the
    rest is spread by area.
    """
    areas = np.array([s.area for s in surfaces], dtype=float)
    mask = np.ones(len(surfaces), bool) if receiving is None else np.asarray(receiving, bool)
    if not mask.any():
        raise ValueError("no surface receives solar radiation")
    w = np.where(mask, areas, 0.0)
    w = w / w.sum()
    if floor is not None and floor_fraction > 0:
        if not 0.0 <= floor_fraction <= 1.0:
            raise ValueError("floor_fraction must lie in [0, 1]")
        w = (1.0 - floor_fraction) * w
        w[floor] += floor_fraction
    return w


def distribute_interior_solar(
    injected: float,
    surfaces: Sequence[EnclosureSurface],
    view_factors: np.ndarray,
    initial_weights: Sequence[float],
) -> SolarSplit:
    """Split injected solar power (W) into absorbed-per-surface and escaped."""
    if injected < 0:
        raise ValueError("injected power must be non-negative")
    w = np.asarray(initial_weights, dtype=float)
    if w.shape != (len(surfaces),) or np.any(w < 0):
        raise ValueError("initial weights must be one non-negative value per surface")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"initial weights must sum to 1, got {w.sum()!r}")
    alpha = np.array([s.solar_absorptance for s in surfaces])
    tau = np.array([s.back_loss_transmittance for s in surfaces])
    if not np.any(alpha + tau > 0):
        raise NonAbsorbingEnclosure("no surface absorbs or transmits; reflections never end")
    rho = np.array([s.reflectance for s in surfaces])

    # incident = first_bounce + F^T diag(rho) incident
    f = np.asarray(view_factors, dtype=float)
    system = np.eye(len(surfaces)) - f.T * rho
    incident = np.linalg.solve(system, injected * w)
    return SolarSplit(absorbed=alpha * incident, lost_out=float(np.dot(tau, incident)))

