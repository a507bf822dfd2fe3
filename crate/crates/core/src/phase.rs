//! Auxiliary circular coordinates on the circle `R / nZ`.
//!
//! Every cycle of a filling carries a phase; its vertices sit at equally
//! spaced positions `phase + n*i/m`. One edge of the outer boundary has
//! circular length exactly 1.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::exact::{format_rational, rem_euclid};

/// A point of `R / nZ`, kept reduced into `[0, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(BigRational);

impl Phase {
    pub fn zero() -> Self {
        Phase(BigRational::zero())
    }

    pub fn new(value: BigRational, n: u32) -> Self {
        Phase(rem_euclid(&value, &circumference(n)))
    }

    /// Wraps a value already known to lie in `[0, n)`.
    pub(crate) fn from_reduced(value: BigRational) -> Self {
        Phase(value)
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    /// `self + amount (mod n)`.
    pub fn shifted(&self, amount: &BigRational, n: u32) -> Self {
        Phase::new(&self.0 + amount, n)
    }

    /// Coordinate of vertex `index` on a cycle of length `len` with this phase.
    pub fn vertex_coordinate(&self, index: u32, len: u32, n: u32) -> Self {
        let step = BigRational::new(BigInt::from(n as u64 * index as u64), BigInt::from(len));
        self.shifted(&step, n)
    }

    pub fn to_f64(&self) -> f64 {
        crate::exact::to_f64(&self.0)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

fn circumference(n: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorter circular distance `||a - b||_n` between two phases.
pub fn circ_dist(a: &Phase, b: &Phase, n: u32) -> BigRational {
    let full = circumference(n);
    let d = rem_euclid(&(&a.0 - &b.0), &full);
    let other = &full - &d;
    if other < d {
        other
    } else {
        d
    }
}
