"""Discrete Riemannian Voronoi diagrams and anisotropic Delaunay complexes."""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .metric_field import (MetricField, custom_grid, distortion, euclidean, hyperbolic_shock,  # noqa: F401
                           region_distortion_bound, sqrt_metric, swirl, uniform, uniform_distance)
from .canvas import Canvas, build_canvas, max_edge_length  # noqa: F401
from .geodesic import EdgeGraph, farthest_vertex, multi_front_dijkstra  # noqa: F401
from .drvd import AbstractComplex, color_canvas, extract_complex, witnesses_of  # noqa: F401
from .exact_oracle import euclidean_delaunay_bruteforce, stretch_sites, uniform_delaunay  # noqa: F401
from .nets import generate_net, net_report  # noqa: F401
from .bounds import TheoryParams, evaluate_bounds  # noqa: F401
from .realization import check_embedding, karcher_point, straight_point, straightening_gap  # noqa: F401
from .conformance import (compare_complexes, verify_encompassing, verify_euclidean_equality,  # noqa: F401
                          verify_refinement, verify_separation, verify_uniform_equality)
