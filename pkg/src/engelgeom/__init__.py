"""Degree, measure and covering computations for submanifolds of the Engel group."""

from .algebra import (DegreeValue, Frame2Vector, FrameVector, bivector_degree,
                      degree_d_component_norm, vector_degree, wedge_in_frame)
from .catalog import BUILTIN_IDS, EXPECTED_DEGREES, builtin
from .covering import (CoveringReport, covering_count, dimension_estimate, greedy_cover,
                       hausdorff_vs_intrinsic, negligibility_decay)
from .errors import (CertificationError, DegenerateTangentError, DegreeRangeError,
                     DomainError, EngelError, PreconditionError, ResolutionError, ShapeError,
                     ToleranceNotMetError)
from .group import (DEFAULT_GAUGE, GaugeKind, GroupPoint, HomGauge, coord_to_frame, dilate,
                    dist, frame_at, gauge, inv, mul)
from .measure import BallMeasure, BlowupReport, ball_intersection_measure, blowup_sequence
from .oracle import certify_group_law, certify_wedge_formula, mc_measure
from .polynomial import Polynomial
from .submanifold import (ParamBox, ParamCurve, ParamSubmanifold, ParamSurface,
                          StratificationReport, deg3_pde_residual, global_degree,
                          intrinsic_measure, pointwise_degree)

__version__ = "0.1.0"
