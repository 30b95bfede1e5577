//! Noncyclic (Pancharatnam) phase of a spin-1/2 state precessing about the
//! polar axis.
//!
//! - [`spinor`]: states, SU(2) elements, overlaps.
//! - [`curve`]: continued phase curves, jumps and singularities, the
//!   measured-difference observable and the secular/wiggle split.
//! - [`mixed`]: partially polarized beams and scaling-law residuals.
//! - [`interferometry`]: simulated fringes with counting noise and fringe fits.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below name the double-precision types used by the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branch;
pub mod curve;
pub mod error;
pub mod interferometry;
pub mod mixed;
pub mod scalar;
pub mod spinor;
pub mod stats;

pub use curve::{
    build_curve, build_curve_default, closed_form_phase, closed_form_visibility, detect_jumps, measured_difference,
    measured_difference_curve, phi_grid, reference_pole, rotation_angle_on_sphere, secular_wiggle_decomposition,
    singularity_locus, JumpEvent, JumpKind, JumpSign, PhaseCurve, PhasePoint, SecularDecomposition,
};
pub use error::{PhaseError, Result};
pub use interferometry::{
    experiment_curve, fit_fringe, fit_fringe_with, synthesize, BeamState, ExperimentConfig, ExperimentCurve,
    ExperimentMode, ExperimentPoint, FringeFit, Interferogram,
};
pub use mixed::{
    density_from_mixed, evaluate_scaling_law, mixed_overlap, residual_map, scaling_law_residual, DensityMatrix,
    MixedState, Observable, ResidualRow, ScalingLaw, ScalingLawEvaluation,
};
pub use scalar::Real;
pub use spinor::{
    apply, axis_rotation, bloch_from_spinor, compose, pancharatnam_overlap, spinor_from_bloch, z_precession,
    BlochDirection, ComplexValue, Hemisphere, OverlapResult, Spinor, Su2, DEFAULT_TOL_ORTH,
};

pub type Spinor64 = Spinor<f64>;
pub type Su2_64 = Su2<f64>;
pub type BlochDirection64 = BlochDirection<f64>;
pub type OverlapResult64 = OverlapResult<f64>;
pub type PhaseCurve64 = PhaseCurve<f64>;
pub type JumpEvent64 = JumpEvent<f64>;
pub type MixedState64 = MixedState<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type Interferogram64 = Interferogram<f64>;
pub type FringeFit64 = FringeFit<f64>;
pub type ExperimentCurve64 = ExperimentCurve<f64>;

pub type Spinor32 = Spinor<f32>;
pub type Su2_32 = Su2<f32>;
pub type PhaseCurve32 = PhaseCurve<f32>;
