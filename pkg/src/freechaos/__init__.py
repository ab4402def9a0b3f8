"""Discretized chaos-expansion calculus over the free Poisson algebra."""

from .chaos import (
    ChaosElement,
    IndexSets,
    MomentReport,
    MultisetWord,
    element_inner,
    free_poisson_moment,
    index_sets,
    moment_diagram,
    moment_product,
    moment_report,
    moment_trace_formula,
    multiset_words,
    poisson_multiply,
    power_expansion,
    semicircular_moment,
    trace,
    wigner_multiply,
)
from .errors import (
    GridMismatchError,
    GroundSetMismatchError,
    IdentityMismatchError,
    MirrorSymmetryError,
    SizeLimitError,
)
from .kernels import (
    GridKernel,
    TamednessReport,
    TamednessRow,
    add,
    adjoint,
    arc_contraction,
    diagram_integral,
    inner,
    is_mirror_symmetric,
    kernel_from_dict,
    kernel_to_dict,
    load_kernel,
    norm2,
    save_kernel,
    scale,
    star_contraction,
    subtract,
    tamedness_report,
)
from .partitions import (
    RiordanTable,
    SetPartition,
    bell,
    block_partition,
    catalan,
    enumerate_nc,
    enumerate_partitions,
    intersection_split,
    is_noncrossing,
    meet_is_zero,
    nc0_classes,
    riordan,
    riordan_number,
)
from .theorems import (
    ConvergenceSeries,
    IdentityReport,
    IndicatorReport,
    KernelFamily,
    StepRecord,
    TransferReport,
    TransferRow,
    convergence_experiment,
    fourth_moment_identity,
    fourth_moment_statistic,
    hyperdiagonal_family,
    identity_terms,
    indicator_characterization,
    indicator_family,
    perturbed_indicator_family,
    transfer_experiment,
)

__all__ = [name for name in dir() if not name.startswith("_")]
