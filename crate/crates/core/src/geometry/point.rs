use std::fmt;

use num::traits::Zero;

use crate::rational::{format_rational, rational_to_f64, Rational};

/// A point of the rational plane, also used for vectors and offsets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPoint {
    pub x: Rational,
    pub y: Rational,
}

impl RatPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.x + &other.x, &self.y + &other.y)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(&self.x - &other.x, &self.y - &other.y)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(&self.x * s, &self.y * s)
    }

    pub fn dot(&self, other: &Self) -> Rational {
        &self.x * &other.x + &self.y * &other.y
    }

    /// 2-D cross product `self.x * other.y - self.y * other.x`.
    pub fn cross(&self, other: &Self) -> Rational {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rational_to_f64(&self.x), rational_to_f64(&self.y))
    }

    /// Lexicographic key (x, then y) used for canonical vertex rotation.
    pub fn lex_le(&self, other: &Self) -> bool {
        self.x < other.x || (self.x == other.x && self.y <= other.y)
    }
}

impl fmt::Display for RatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}", format_rational(&self.x), format_rational(&self.y))
    }
}
