"""Lower bounds on entanglement measures from measured witness expectation values."""

__version__ = "0.1.0"

from .bounds import (
    BoundResult,
    ConjugateEvaluator,
    MeasureSpec,
    SearchOptions,
    WitnessRecord,
    affine_certificate,
    epsilon_bound,
    propagate_uncertainty,
)
from .legendre import (
    LegendreResult,
    ProjectorWitness,
    SolverOptions,
    free_energy,
    legendre_eof,
    legendre_geometric,
    legendre_roof,
    projector_transform_geometric,
)
from .measures import (
    EntanglementOfFormation,
    GeometricMeasure,
    LogBase,
    ProductState,
    closest_product,
    entropy,
    eof_pure,
    geometric_pure,
)
from .oracle import AuditReport, audit_bound, audit_legendre, certify, grid_geometric, scan_projector_transform
from .problem import Problem, ProblemError, dump_canonical, load_problem, parse_problem
from .qla import (
    ConvergenceError,
    DimensionError,
    PureState,
    SchmidtDecomposition,
    eig_hermitian,
    jacobi_eigh,
    partial_trace,
    reduced_state,
    schmidt,
)
from .states import ghz_state, ghz_y_state, named_state, w_state

__all__ = [name for name in dir() if not name.startswith("_")]
