"""tflat: time-frequency lattice toolkit.

Constructs and certifies Gabor frame windows for separable lattices:
lattice arithmetic, tiling/packing certificates for fundamental domains,
mollified smooth window synthesis, cross-ambiguity Gramian frame-bound
estimation, and symplectic transport pipelines.
"""

from .errors import (
    DegenerateMarginError,
    NotReducibleError,
    PreconditionError,
    ResolutionError,
    ResourceLimitError,
    SingularMatrixError,
    TflatError,
    UnclassifiedLatticeError,
)
from .frame import (
    GaborSystem,
    GramianReport,
    frame_bounds,
    gabor_coeff,
    gramian,
    orthonormality_residual,
    parseval_residual,
    tight_residual,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .lattice import (
    GeneratorMatrix,
    SeparableTFLattice,
    adjoint_separable,
    density,
    dual,
    enumerate_points,
    is_symplectic,
    parse_lattice,
    parse_matrix,
)
from .region import (
    CoverReport,
    GridIndicator,
    Piece,
    Region,
    common_fd_rational,
    cover_classify,
    fourier_tiling_check,
    load_region,
    save_region,
    scaled_common_domain,
    star_dilate,
    thicken,
)
from .symplectic import (
    MetaplecticOp,
    PipelineDescriptor,
    apply_chirp,
    apply_dilation,
    apply_fourier,
    block_triangular_reduce,
    diag_pipeline,
    execute_pipeline,
    separable_reduce,
)
from .window import (
    Mollifier,
    SampledWindow,
    indicator_window,
    load_window,
    mollifier,
    plateau_window_1d,
    save_window,
    smooth_window,
    tensor_window,
)

__version__ = "0.1.0"
