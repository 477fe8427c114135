"""Decoherence of momentum-entangled biphotons under ionizing interactions.

Submodules
----------
states        momentum grids, biphoton amplitudes, bound-state recoil densities
decoherence   single- and multi-event kernels and their action on states
metrics       Schmidt spectrum, negativity, purity, moment widths
scenario      gas-cell parameters and the survival threshold
scenario_file flat key=value scenario files
cli           the ``decotrace`` command
"""

from .decoherence import (
    DecoherenceKernel,
    MatrixElementParams,
    apply_kernel,
    closed_form_comparison,
    closed_form_single,
    displace_signal,
    kernel_gaussian,
    kernel_quadrature,
    matrix_element,
    mix_branches,
    multi_event_kernel,
)
from .errors import (
    ConfigurationError,
    DecotraceError,
    DomainError,
    NumericalError,
    ScenarioError,
    TruncationError,
    ValidityError,
)
from .metrics import (
    JointDensityMatrix,
    SchmidtSpectrum,
    conditional_width,
    negativity,
    pure_state_negativity,
    purity,
    schmidt_decompose,
    schmidt_number,
)
from .scenario import (
    Scenario,
    ThresholdVerdict,
    critical_length,
    interaction_number,
    number_density,
    recoil_variance_from_energy,
    sweep,
    threshold_check,
)
from .scenario_file import format_scenario, parse_scenario_file
from .states import (
    BoundState,
    DoubleGaussian,
    MomentumGrid,
    TabulatedAmplitude,
    evaluate_amplitude,
    recoil_density,
    tabulate,
)

__version__ = "0.1.0"
