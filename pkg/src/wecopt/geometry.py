"""Buoy and tether geometry of the submerged three-tether converter.

The device is a fully submerged vertical cylinder (radius ``a``, height
``height``) held by three tethers spaced 120 deg apart in azimuth.  Two
angles fix the tether arrangement: ``tether_inclination`` is the angle of
each tether from the vertical, and ``attachment_angle`` locates the hull
attachment point, measured at the centroid from the downward vertical to
the line that reaches the hull surface.  The buoy is ballasted to half the
displaced water mass, so it always carries net positive buoyancy reacted
by the tethers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import GeometryError

WATER_DENSITY = 1025.0  # kg/m^3
GRAVITY = 9.81  # m/s^2


@dataclass(frozen=True)
class WecGeometry:
    """Physical description of one converter design.

    Parameters
    ----------
    radius : float
        Cylinder radius a, m.
    height : float
        Cylinder height H, m.
    submergence : float
        Distance from the still water level down to the buoy top, m.
    depth : float
        Water depth, m.
    tether_inclination : float
        Tether angle from the vertical, deg, in [0, 90).
    attachment_angle : float
        Attachment-point angle from the downward vertical, deg, in [0, 90).
    """

    radius: float
    height: float
    submergence: float = 2.0
    depth: float = 50.0
    tether_inclination: float = 45.0
    attachment_angle: float = 45.0
    water_density: float = WATER_DENSITY
    gravity: float = GRAVITY

    def __post_init__(self):
        if self.radius <= 0:
            raise GeometryError(f"radius must be positive, got {self.radius}")
        if self.height <= 0:
            raise GeometryError(f"height must be positive, got {self.height}")
        if self.submergence <= 0:
            raise GeometryError(
                f"submergence must be positive (buoy pierces surface), got {self.submergence}"
            )
        if self.submergence + self.height >= self.depth:
            raise GeometryError(
                "buoy reaches the sea floor: submergence + height = "
                f"{self.submergence + self.height} >= depth {self.depth}"
            )
        # zero is admissible for both angles: vertical tethers and a
        # bottom-pole attachment are degenerate but well defined
        if not 0.0 <= self.tether_inclination < 90.0:
            raise GeometryError(
                f"tether inclination must be in [0, 90) deg, got {self.tether_inclination}"
            )
        if not 0.0 <= self.attachment_angle < 90.0:
            raise GeometryError(
                f"attachment angle must be in [0, 90) deg, got {self.attachment_angle}"
            )
        if self.water_density <= 0 or self.gravity <= 0:
            raise GeometryError("water density and gravity must be positive")

    @property
    def aspect_ratio(self) -> float:
        """Height over radius, H/a."""
        return self.height / self.radius

    @property
    def displaced_volume(self) -> float:
        """Displaced water volume V = pi a^2 H, m^3."""
        return math.pi * self.radius**2 * self.height

    @property
    def buoy_mass(self) -> float:
        """Buoy mass, fixed at half the displaced water mass, kg."""
        return 0.5 * self.water_density * self.displaced_volume

    @property
    def net_buoyancy(self) -> float:
        """Net upward force (buoyancy minus weight), N."""
        return (self.water_density * self.displaced_volume - self.buoy_mass) * self.gravity

    @property
    def centroid_z(self) -> float:
        """Centroid elevation relative to the still water level (negative), m."""
        return -(self.submergence + 0.5 * self.height)
