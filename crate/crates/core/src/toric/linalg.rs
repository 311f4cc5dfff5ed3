//! Dense exact linear algebra over the rationals, sized for small simplices.

use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Vector = Vec<BigRational>;
pub type Matrix = Vec<Vec<BigRational>>;

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect()
}

pub fn sub(a: &[BigRational], b: &[BigRational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn mat_vec(m: &Matrix, v: &[BigRational]) -> Vector {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter().map(|row| (0..cols).map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum()).collect()).collect()
}

/// Determinant by fraction-exact Gaussian elimination.
pub fn det(m: &Matrix) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut result = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            result = -result;
        }
        let p = a[col][col].clone();
        result *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            let pivot = a[col].clone();
            for (x, y) in a[r][col..].iter_mut().zip(&pivot[col..]) {
                *x -= &factor * y;
            }
        }
    }
    result
}

/// Inverse, or `None` when singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let p = a[col][col].clone();
        for c in 0..n {
            a[col][c] /= &p;
            inv[col][c] /= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                let da = &factor * &a[col][c];
                a[r][c] -= da;
                let di = &factor * &inv[col][c];
                inv[r][c] -= di;
            }
        }
    }
    Some(inv)
}

/// A nonzero vector orthogonal to the given `n - 1` vectors in `R^n`, or
/// `None` if they are linearly dependent. Uses cofactor expansion.
pub fn normal(vectors: &[&Vector], n: usize) -> Option<Vector> {
    let mut out = Vec::with_capacity(n);
    for skip in 0..n {
        let minor: Matrix = vectors
            .iter()
            .map(|v| v.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, x)| x.clone()).collect())
            .collect();
        let d = det(&minor);
        out.push(if skip % 2 == 0 { d } else { -d });
    }
    (!out.iter().all(Zero::is_zero)).then_some(out)
}
