use num::traits::Zero;

use crate::error::{Error, Result};
use crate::geometry::{RatMatrix2, RatPoint};

/// Exact affine transform `x -> linear * x + offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap2 {
    pub linear: RatMatrix2,
    pub offset: RatPoint,
}

impl AffineMap2 {
    pub fn new(linear: RatMatrix2, offset: RatPoint) -> Self {
        Self { linear, offset }
    }

    pub fn identity() -> Self {
        Self::new(RatMatrix2::identity(), RatPoint::origin())
    }

    pub fn apply(&self, p: &RatPoint) -> RatPoint {
        self.linear.mul_vec(p).add(&self.offset)
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.linear.mul(&other.linear),
            self.linear.mul_vec(&other.offset).add(&self.offset),
        )
    }

    pub fn invert(&self) -> Result<Self> {
        let inv = self.linear.inverse()?;
        let neg_offset = RatPoint::origin().sub(&self.offset);
        let offset = inv.mul_vec(&neg_offset);
        Ok(Self::new(inv, offset))
    }

    /// The unique affine map sending `src[i]` to `dst[i]`, i = 0, 1, 2.
    ///
    /// The linear part solves `L * (src_i - src_0) = dst_i - dst_0`, which
    /// determines L whenever the source triple is affinely independent.
    pub fn from_correspondence(src: &[RatPoint; 3], dst: &[RatPoint; 3]) -> Result<Self> {
        let s1 = src[1].sub(&src[0]);
        let s2 = src[2].sub(&src[0]);
        let basis = RatMatrix2::new(s1.x.clone(), s2.x.clone(), s1.y.clone(), s2.y.clone());
        if basis.det().is_zero() {
            return Err(Error::DegenerateSource);
        }
        let d1 = dst[1].sub(&dst[0]);
        let d2 = dst[2].sub(&dst[0]);
        let images = RatMatrix2::new(d1.x.clone(), d2.x.clone(), d1.y.clone(), d2.y.clone());
        let linear = images.mul(&basis.inverse()?);
        let offset = dst[0].sub(&linear.mul_vec(&src[0]));
        Ok(Self::new(linear, offset))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int, Rational};

    fn p(x: Rational, y: Rational) -> RatPoint {
        RatPoint::new(x, y)
    }

    fn aco_half() -> ([RatPoint; 3], [RatPoint; 3]) {
        // ACO -> APQ at t = 1/2
        let src = [p(rat_int(0), rat_int(1)), p(rat_int(-1), rat_int(0)), p(rat_int(0), rat_int(0))];
        let dst = [p(rat_int(0), rat_int(1)), p(rat(-1, 2), rat(1, 2)), p(rat(1, 2), rat(1, 2))];
        (src, dst)
    }

    #[test]
    fn correspondence_solves_aco_piece() {
        let (src, dst) = aco_half();
        let m = AffineMap2::from_correspondence(&src, &dst).unwrap();
        assert_eq!(m.linear, RatMatrix2::new(rat_int(1), rat(-1, 2), rat_int(0), rat(1, 2)));
        assert_eq!(m.offset, p(rat(1, 2), rat(1, 2)));
        for i in 0..3 {
            assert_eq!(m.apply(&src[i]), dst[i]);
        }
    }

    #[test]
    fn correspondence_identity_and_degenerate() {
        let (src, _) = aco_half();
        let id = AffineMap2::from_correspondence(&src, &src).unwrap();
        assert_eq!(id, AffineMap2::identity());

        let line = [
            p(rat_int(0), rat_int(0)),
            p(rat_int(1), rat_int(0)),
            p(rat_int(2), rat_int(0)),
        ];
        assert!(matches!(
            AffineMap2::from_correspondence(&line, &line),
            Err(Error::DegenerateSource)
        ));
    }

    #[test]
    fn apply_and_invert_round_trip() {
        let (src, dst) = aco_half();
        let m = AffineMap2::from_correspondence(&src, &dst).unwrap();
        let x = p(rat(-1, 2), rat(1, 4));
        let y = m.apply(&x);
        assert_eq!(y, p(rat(-1, 8), rat(5, 8)));
        assert_eq!(m.invert().unwrap().apply(&y), x);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let (src, dst) = aco_half();
        let m = AffineMap2::from_correspondence(&src, &dst).unwrap();
        let mm = m.compose(&m);
        let x = p(rat(-1, 2), rat(1, 4));
        assert_eq!(mm.apply(&x), m.apply(&m.apply(&x)));
    }
}
