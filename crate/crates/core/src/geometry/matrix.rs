use num::traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::RatPoint;
use crate::rational::{rational_to_f64, Rational};

/// Row-major exact 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix2 {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

/// Exact characteristic data of the Gram matrix `M^T M`, with float
/// approximations of its two eigenvalues (the squared singular values of M).
#[derive(Clone, Debug)]
pub struct GramEigenvalues {
    pub trace: Rational,
    pub det: Rational,
    pub lambda_max: f64,
    pub lambda_min: f64,
}

impl RatMatrix2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(Rational::one(), Rational::zero(), Rational::zero(), Rational::one())
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a.clone(), self.c.clone(), self.b.clone(), self.d.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(
            &self.a * &other.a + &self.b * &other.c,
            &self.a * &other.b + &self.b * &other.d,
            &self.c * &other.a + &self.d * &other.c,
            &self.c * &other.b + &self.d * &other.d,
        )
    }

    pub fn mul_vec(&self, v: &RatPoint) -> RatPoint {
        RatPoint::new(&self.a * &v.x + &self.b * &v.y, &self.c * &v.x + &self.d * &v.y)
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(Self::new(
            &self.d / &det,
            -(&self.b / &det),
            -(&self.c / &det),
            &self.a / &det,
        ))
    }

    /// Induced l1 -> l1 operator norm: the maximum column absolute sum.
    pub fn operator_norm_l1(&self) -> Rational {
        let col0 = self.a.abs() + self.c.abs();
        let col1 = self.b.abs() + self.d.abs();
        col0.max(col1)
    }

    /// Induced linf -> linf operator norm: the maximum row absolute sum.
    pub fn operator_norm_linf(&self) -> Rational {
        let row0 = self.a.abs() + self.b.abs();
        let row1 = self.c.abs() + self.d.abs();
        row0.max(row1)
    }

    /// `M^T M`, exact.
    pub fn gram(&self) -> Self {
        self.transpose().mul(self)
    }

    /// Exact trace/determinant of the Gram matrix plus the two eigenvalues of
    /// `M^T M` solved from the characteristic quadratic in floats.
    pub fn gram_eigenvalues(&self) -> GramEigenvalues {
        let g = self.gram();
        let trace = &g.a + &g.d;
        let det = g.det();
        let tr = rational_to_f64(&trace);
        let de = rational_to_f64(&det);
        let disc = (tr * tr - 4.0 * de).max(0.0).sqrt();
        GramEigenvalues {
            trace,
            det,
            lambda_max: (tr + disc) / 2.0,
            lambda_min: (tr - disc) / 2.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn m(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> RatMatrix2 {
        RatMatrix2::new(rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1), rat(d.0, d.1))
    }

    #[test]
    fn l1_norm_is_max_column_sum() {
        // [[2t, -t], [0, t]] at t = 1/4 has norm max(1/2, 1/2) = 1/2
        let mat = m((1, 2), (-1, 4), (0, 1), (1, 4));
        assert_eq!(mat.operator_norm_l1(), rat(1, 2));
        assert_eq!(RatMatrix2::identity().operator_norm_l1(), rat_int(1));
        let zero = m((0, 1), (0, 1), (0, 1), (0, 1));
        assert_eq!(zero.operator_norm_l1(), rat_int(0));
    }

    #[test]
    fn gram_eigenvalues_of_aco_piece() {
        // [[1, -1/2], [0, 1/2]]: tr(M^T M) = 3/2, det = 1/4,
        // eigenvalues (3 +- sqrt 5)/4
        let mat = m((1, 1), (-1, 2), (0, 1), (1, 2));
        let e = mat.gram_eigenvalues();
        assert_eq!(e.trace, rat(3, 2));
        assert_eq!(e.det, rat(1, 4));
        let expect = (3.0 + 5f64.sqrt()) / 4.0;
        assert!((e.lambda_max - expect).abs() < 1e-12);
        // residual of the characteristic polynomial
        let tr = 1.5;
        let de = 0.25;
        for lam in [e.lambda_max, e.lambda_min] {
            assert!((lam * lam - tr * lam + de).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_eigenvalues_trivial() {
        let e = RatMatrix2::identity().gram_eigenvalues();
        assert_eq!(e.trace, rat_int(2));
        assert_eq!(e.det, rat_int(1));
        assert!((e.lambda_max - 1.0).abs() < 1e-15);
        assert!((e.lambda_min - 1.0).abs() < 1e-15);

        let z = m((0, 1), (0, 1), (0, 1), (0, 1)).gram_eigenvalues();
        assert_eq!(z.trace, rat_int(0));
        assert_eq!(z.det, rat_int(0));
    }

    #[test]
    fn inverse_round_trip() {
        let mat = m((1, 1), (-1, 2), (0, 1), (1, 2));
        let inv = mat.inverse().unwrap();
        assert_eq!(mat.mul(&inv), RatMatrix2::identity());
        let singular = m((1, 1), (2, 1), (2, 1), (4, 1));
        assert!(matches!(singular.inverse(), Err(Error::SingularMatrix)));
    }
}
