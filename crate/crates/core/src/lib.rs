//! Monotone convolution powers, their Berry-Esseen rates towards the arcsine
//! law, and the ergodic theory of the associated boundary maps.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common cases.

// `!(x > 0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clt;
pub mod ergodic;
pub mod error;
pub mod inversion;
pub mod measures;
pub mod quad;
mod roots;
pub mod scalar;
pub mod special;
pub mod transforms;

pub use error::{Error, Result};
pub use measures::{AtomicMeasure, MeasureSpec, StepCdf};
pub use scalar::Scalar;
pub use transforms::{FTransform, NevanlinnaData, RationalFn};

pub type AtomicMeasure64 = AtomicMeasure<f64>;
pub type AtomicMeasure32 = AtomicMeasure<f32>;
pub type MeasureSpec64 = MeasureSpec<f64>;
pub type MeasureSpec32 = MeasureSpec<f32>;
pub type StepCdf64 = StepCdf<f64>;
pub type FTransform64 = FTransform<f64>;
pub type NevanlinnaData64 = NevanlinnaData<f64>;
pub type RationalFn64 = RationalFn<f64>;
pub type CdfCurve64 = inversion::CdfCurve<f64>;
pub type CdfCurve32 = inversion::CdfCurve<f32>;
pub type RatePoint64 = clt::RatePoint<f64>;
pub type BoundReport64 = clt::BoundReport<f64>;
pub type ReturnSeries64 = ergodic::ReturnSeries<f64>;
pub type OccupationResult64 = ergodic::OccupationResult<f64>;
pub type BoundaryMap64 = ergodic::BoundaryMap<f64>;
