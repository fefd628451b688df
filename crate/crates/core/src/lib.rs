//! Discrete-time SISI epidemic model as a quadratic stochastic operator on
//! the 3-simplex: admissibility, heredity tensor, fixed points, stability,
//! trajectory limits and the logistic-map conjugacy of the reduced dynamics.

pub mod conjugacy;
pub mod dynamics;
pub mod error;
pub mod fixpoints;
pub mod model;
pub mod stability;
pub mod tensor;

pub use error::{Error, Result};
pub use model::{
    apply_v, force_of_infection, iterate, validate_params, AdmissibilityReport, Condition,
    EvolutionOperator, ForceOfInfection, ModelParams, SimplexPoint, Trajectory,
};
pub use tensor::{apply_qso, build_tensor, check_axioms, AxiomReport, AxiomViolation, QsoTensor};
pub use fixpoints::{
    fixed_point_set, grid_sweep, interior_quadratic, lambda11, Face, FixedLabel, FixedPoint,
    InteriorQuadratic, SweepReport,
};
pub use stability::{
    classify, classify_lambda1, classify_point, eigenvalues, jacobian, JacobianMatrix,
    StabilityClass, StabilityReport,
};
pub use conjugacy::{
    classify_1d_fixed_points, normalized_w0, restrict_w, verify_conjugacy, ConjugacyCheck,
    ConjugacyMap, QuadraticMap1D,
};
pub use dynamics::{
    conjecture_scan, detect_limit, fg_curves, predicted_limit, verify_proposition, Conjecture,
    FgCurves, LimitOptions, LimitReport, PredictedLimit, Regime, ScanGrid, ScanReport,
    SuiteReport, Target,
};
