"""Geometry of the positive cone and the similarity problem for finite groups."""
from .config import Tolerances, override, set_tolerances, tol
from .errors import ConeGeoError
from .geometry import FROB, OP, Geodesic, MetricKind, act, dist, geodesic_eval
from .matcore import PosDefMatrix, exp_herm, validate_posdef
from .matgroups import MatrixGroup, Representation, close_group, fixed_cone, group_size_norm, orbit_diameter
from .unitarize import (
    average_unitarizer,
    circumcenter,
    circumcenter_unitarizer,
    dist_to_fixed_cone,
    similarity_number,
)
from .splitexp import (
    canonical_unitarizer,
    group_average_expectation,
    pinching_expectation,
    pr_split_invertible,
    pr_split_positive,
    thmacs_check,
)
from .interpolate import extension_experiment, verify_interpolation

__version__ = "0.1.0"
