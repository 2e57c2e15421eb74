"""Detection of growing events by a randomly deployed sensor network in a disk-shaped forest."""
from .analytic import (
    EventModel,
    NetworkModel,
    conditional_sensing_prob,
    contact_cdf,
    contact_cdf_limit_large_rd,
    contact_cdf_limit_small_rd,
    contact_cdf_loose_upper,
    contact_cdf_lower,
    contact_cdf_upper,
    coverage_prob,
    event_radius_pdf,
    sensing_prob,
    sensing_prob_loose_upper,
    sensing_prob_lower,
    sensing_prob_upper,
)
from .geometry import Disk, Point2, lens_area, lens_area_circ_lower, lens_area_rect_upper, minkowski_ball_radius
from .montecarlo import EstimatorResult, Realization, SeedSpec
from .quadrature import QuadratureError, QuadratureSpec
from .tables import CurveTable

__version__ = "0.1.0"
