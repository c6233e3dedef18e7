use num::traits::Signed;
use serde::{Deserialize, Serialize};

use crate::geometry::RatPoint;
use crate::rational::{rational_to_f64, Rational};

/// Plane metric. L1 and LINF distances are exact rationals; L2 is handled
/// through exact squared distances so that comparisons against rational
/// thresholds never round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "l1")]
    L1,
    #[serde(rename = "l2")]
    L2,
    #[serde(rename = "linf")]
    Linf,
}

/// Exact L1 distance, used throughout contraction and attractor checks.
pub fn distance_l1(p: &RatPoint, q: &RatPoint) -> Rational {
    (&p.x - &q.x).abs() + (&p.y - &q.y).abs()
}

impl Metric {
    /// Comparison key: the distance itself for L1/LINF, the *squared*
    /// distance for L2. Keys are monotone in the true distance, so maxima
    /// and threshold comparisons computed on keys are exact.
    pub fn key(&self, p: &RatPoint, q: &RatPoint) -> Rational {
        let dx = &p.x - &q.x;
        let dy = &p.y - &q.y;
        match self {
            Metric::L1 => dx.abs() + dy.abs(),
            Metric::Linf => dx.abs().max(dy.abs()),
            Metric::L2 => &dx * &dx + &dy * &dy,
        }
    }

    /// Key of a distance threshold (squares it for L2).
    pub fn threshold_key(&self, eps: &Rational) -> Rational {
        match self {
            Metric::L1 | Metric::Linf => eps.clone(),
            Metric::L2 => eps * eps,
        }
    }

    /// Float value of the true distance (takes the square root for L2).
    pub fn approx_distance(&self, p: &RatPoint, q: &RatPoint) -> f64 {
        let k = rational_to_f64(&self.key(p, q));
        match self {
            Metric::L2 => k.sqrt(),
            _ => k,
        }
    }

    /// Float distance from a key value.
    pub fn key_to_distance(&self, key: f64) -> f64 {
        match self {
            Metric::L2 => key.sqrt(),
            _ => key,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::L1 => "l1",
            Metric::L2 => "l2",
            Metric::Linf => "linf",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn p(x: Rational, y: Rational) -> RatPoint {
        RatPoint::new(x, y)
    }

    #[test]
    fn l1_examples() {
        let a = p(rat_int(0), rat_int(1));
        let b = p(rat_int(0), rat_int(-1));
        assert_eq!(distance_l1(&a, &b), rat_int(2));
        assert_eq!(distance_l1(&a, &a), rat_int(0));
        let u = p(rat(-1, 16), rat(1, 2));
        let v = p(rat(1, 16), rat(1, 2));
        assert_eq!(distance_l1(&u, &v), rat(1, 8));
    }

    #[test]
    fn keys_are_symmetric_and_match_metrics() {
        let u = p(rat(-1, 16), rat(1, 2));
        let v = p(rat(1, 16), rat(1, 4));
        for m in [Metric::L1, Metric::L2, Metric::Linf] {
            assert_eq!(m.key(&u, &v), m.key(&v, &u));
        }
        assert_eq!(Metric::Linf.key(&u, &v), rat(1, 4));
        // L2 key is the squared distance
        assert_eq!(Metric::L2.key(&u, &v), rat(1, 64) + rat(1, 16));
    }
}
