use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::classes::enumerate_exceptional;
use crate::{Error, Result};

/// Every exceptional class with at most eight points has degree at most 6.
const DEL_PEZZO_MAX_DEGREE: i64 = 6;

/// Packing number `p_k` of the four-ball by `k` equal balls.
///
/// With target capacity 1 and balls of capacity `c`, the constraints are
/// `k c^2 <= 1` and `d >= c Σ m_i` for every exceptional class, so
/// `p_k = min(1, min k d^2 / (Σ m_i)^2)`. For `k <= 8` the classes form a
/// finite list. For `k >= 9` every class has `Σ m_i = 3d - 1`, and
/// `c <= 1/3` already gives `c (3d - 1) < d`, so only volume binds.
pub fn packing_number(k: usize) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    if k >= 9 {
        return Ok(BigRational::one());
    }
    let mut best = BigRational::one();
    for class in enumerate_exceptional(k, DEL_PEZZO_MAX_DEGREE)? {
        let total: i64 = class.mults.iter().sum();
        if class.degree <= 0 || total <= 0 {
            continue;
        }
        let bound = BigRational::new(BigInt::from(k as i64 * class.degree * class.degree), BigInt::from(total * total));
        if bound < best {
            best = bound;
        }
    }
    Ok(best)
}
