//! Scalar abstraction shared by the routing tables and the Markov-chain oracle.
//!
//! Both are written once against [`Scalar`] and instantiated with `f32`, `f64`
//! or [`BigRational`] for exact arithmetic.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

pub trait Scalar:
    Num
    + Signed
    + Clone
    + PartialOrd
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Stopping residual for iterative solvers. `None` means arithmetic is exact
    /// and iterative refinement is pointless.
    fn iterative_tolerance() -> Option<Self>;

    /// Equality used to detect ties between path costs and to check that
    /// probability rows sum to one.
    fn approx_eq(&self, other: &Self) -> bool;

    /// Converts a small integer. Every implementor represents these exactly.
    fn from_count(k: usize) -> Self {
        Self::from_usize(k).expect("scalar cannot represent small integer")
    }

    /// Lossy conversion for reporting.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

fn float_close(a: f64, b: f64, rel: f64) -> bool {
    let scale = 1.0_f64.max(a.abs()).max(b.abs());
    (a - b).abs() <= rel * scale
}

impl Scalar for f64 {
    fn iterative_tolerance() -> Option<Self> {
        Some(1e-12)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        float_close(*self, *other, 1e-9)
    }
}

impl Scalar for f32 {
    fn iterative_tolerance() -> Option<Self> {
        Some(1e-6)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        float_close(f64::from(*self), f64::from(*other), 1e-5)
    }
}

impl Scalar for BigRational {
    fn iterative_tolerance() -> Option<Self> {
        None
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
}

/// Exact `num / den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
