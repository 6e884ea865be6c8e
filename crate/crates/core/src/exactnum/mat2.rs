use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

/// Integer 2×2 matrix with rows `(x1, x2)` and `(y1, y2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2 {
    pub x1: BigInt,
    pub x2: BigInt,
    pub y1: BigInt,
    pub y2: BigInt,
    det: BigInt,
    abs_det: BigInt,
}

impl Mat2 {
    pub fn new(x1: impl Into<BigInt>, x2: impl Into<BigInt>, y1: impl Into<BigInt>, y2: impl Into<BigInt>) -> Self {
        let (x1, x2, y1, y2) = (x1.into(), x2.into(), y1.into(), y2.into());
        let det = &x1 * &y2 - &x2 * &y1;
        let abs_det = det.abs();
        Mat2 {
            x1,
            x2,
            y1,
            y2,
            det,
            abs_det,
        }
    }

    /// `x1*y2 - x2*y1`.
    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn abs_det(&self) -> &BigInt {
        &self.abs_det
    }

    pub fn is_singular(&self) -> bool {
        self.det == BigInt::from(0)
    }
}
