"""Interior-penalty isogeometric analysis of diffusion on NURBS surfaces.

Multi-patch NURBS geometries (planar or embedded in R^3) are coupled with a
symmetric interior penalty Galerkin method; Dirichlet conditions are imposed
weakly.  The library covers basis evaluation and h-refinement, surface
geometry, assembly, iterative solution, and convergence-rate measurement
against manufactured solutions.
"""

from .analysis import ErrorReport, RateTable, dg_error, l2_error, measure_errors, rate_table
from .assembly import (
    ProblemData,
    SparseSystem,
    assemble_boundary,
    assemble_interface,
    assemble_system,
    assemble_volume,
    default_penalty,
)
from .driver import SolverFailure, run_sweep, sample_solution, solve_problem
from .geofile import GeometryData, ParseError, load_surface, parse_geometry, serialize_geometry
from .geometry import (
    GeometryError,
    InterfaceEdge,
    MultiPatchSurface,
    NurbsPatch,
    SingularMapError,
    SurfaceFrame,
    TopologyError,
    conormal,
    conormal_at,
    edge_mesh_size,
    frame_at,
    match_interfaces,
    mesh_size,
    refine_surface,
    surface_gradient,
)
from .linalg import CsrMatrix, NumericalBreakdownError, SolveReport, cg_solve, cg_solve_projected
from .problems import builtin_problems, make_problem, parse_expression
from .quadrature import QuadRule, gauss_on_interval, integrate_patch
from .space import (
    DgSpace,
    DiscreteFunction,
    build_space,
    edge_average,
    edge_jump,
    interpolate,
    trace_on_edge,
)
from .splines import (
    BasisEval,
    KnotVector,
    NurbsBasis2D,
    eval_bspline,
    eval_nurbs2d,
    greville,
    insert_knots,
)

__version__ = "0.1.0"
