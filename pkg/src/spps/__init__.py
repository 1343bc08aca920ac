"""Bichromatic superradiant pump-probe spectroscopy of a guided atom beam.

Forward model (Gaussian Wigner function -> pump-probe decay), inversion of
coherence times into phase-space area and coherence length, and filtered
back-projection tomography of the beam's Wigner function.
"""

__version__ = "0.1.0"

from .errors import (
    FitError,
    InfeasibleError,
    ParseError,
    ResolutionError,
    SppsError,
    UnidentifiableError,
    ValidityError,
)
from .units import Constants, GuideConfig, convert
from .wigner import (
    CorrelatedGaussianState,
    ProjectionProfile,
    WignerGrid,
    evaluate_gaussian,
    max_phase_space_area,
    moments,
    phase_space_area,
    project,
    to_grid,
)
from .config import ScenarioConfig, default_paper_scenario
from .kinematics import (
    RecoilKinematics,
    critical_angle,
    propagate,
    recoil_geometry,
    scattered_fraction,
)
from .engine import (
    CoherenceFit,
    DecayCurve,
    analytic_coherence_time,
    dephasing_time_estimate,
    fit_coherence_time,
    gamma_closed_form,
    gamma_quadrature,
    simulate_decay,
    transverse_bound,
)
from .tomography import (
    AnalysisReport,
    ProjectionSet,
    eta_from_width_samples,
    fbp_reconstruct,
    infer_state_from_tau_c,
)
