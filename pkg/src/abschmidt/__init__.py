"""Certification of absolute Schmidt number states and channels.

A state is r-absolute (r-ABSN) when no global unitary can raise its Schmidt
number above ``r``. The package offers witness and moment-based detection,
witness-based measures with validated optimizers, and channel-level tests.
"""

from . import config
from .channels import (
    AbsncVerdict,
    ChannelSpec,
    ChannelVerdict,
    absnc_verdict,
    annihilating_probe,
    apply_channel,
    apply_to_subsystem_b,
    compose,
    covariance_probe,
    depolarizing,
    depolarizing_kraus,
    discrimination_report,
    helstrom_guess,
    identity_channel,
    is_unital,
    kraus_channel,
    unital_composition_check,
    unitary_channel,
)
from .criteria import (
    BallVerdict,
    MomentReport,
    Verdict,
    hankel_determinants,
    hankel_matrix,
    map_moments,
    mehta_psd_check,
    mehta_ratio,
    p3_ppt_check,
    pt_moments,
    purity_ball_2absn,
    sign_changes,
    theorem3_scan,
)
from .errors import AbsnError, ValidationError
from .linalg import (
    HermitianSpectrum,
    hermitian_eigensystem,
    partial_trace,
    partial_transpose,
    tensor_product,
    trace_norm,
    unitary_from_generator,
)
from .maps import MapSpec, apply_id_tensor_map, apply_reduction, positivity_window
from .measures import (
    MeasureResult,
    Method,
    grobustness_lower,
    measure_ordering_check,
    optimize_violation,
    paper_unitary_rho1,
    random_robustness_upper,
    witness_measure_closed_form,
)
from .states import (
    DensityMatrix,
    PureState,
    isotropic_like,
    majorizes,
    maximally_entangled,
    purity,
    schmidt_decompose,
)
from .unitaries import gellmann_basis, unitary_u1, unitary_u2
from .witnesses import SchmidtWitness, canonical_witness, conjugate, expectation, nonmember_certificate

__version__ = "0.1.0"
