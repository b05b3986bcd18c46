"""Exact polynomial representation by deep rectified power unit networks."""
from .errors import (
    ConditioningError,
    ContractError,
    ParseError,
    RequnetError,
    ShapeError,
    StructureError,
)
from .network import (
    Activation,
    ComplexityReport,
    LayeredNetwork,
    activate,
    complexity,
    compose,
    evaluate,
    evaluate_batch,
    identity_passthrough,
    parallel,
)
from .serialize import deserialize, load, save, serialize
from .poly1d import (
    DensePolynomial1D,
    compile_monomial_repu,
    compile_monomial_requ,
    compile_poly_horner,
    compile_poly_requ,
)
from .indexsets import (
    IndexSet,
    downward_closure,
    full_box_indices,
    hyperbolic_cross_indices,
    is_downward_closed,
    optimized_hc_indices,
    total_degree_indices,
)
from .polymd import (
    SparsePolynomialMD,
    compile_downward_closed,
    compile_tensor_product,
    compile_total_degree,
)
from .sparsegrid import (
    SparseGridInterpolant,
    cgl_points,
    interpolant_to_polynomial,
    smolyak_interpolate,
    sparse_grid_indices,
    sparse_grid_points,
)
from .frontend import (
    ConvergenceRecord,
    chebyshev_interpolate_1d,
    compile_function_1d,
    convergence_study,
    verify_tables,
)

__version__ = "0.1.0"
