//! Lattice simplices, unimodular maps and the toric decompositions behind
//! the ball packings.

mod linalg;
mod tiling;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::{Error, Result};
pub use linalg::{Matrix, Vector};
pub use tiling::{verify_tiling, TilingReport};

/// A simplex given by its vertices; every construction here is
/// full-dimensional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    pub vertices: Vec<Vector>,
}

impl LatticePolytope {
    pub fn new(vertices: Vec<Vector>) -> Self {
        LatticePolytope { vertices }
    }

    pub fn from_ints(vertices: &[&[i64]]) -> Self {
        LatticePolytope { vertices: vertices.iter().map(|v| v.iter().map(|&x| int(x)).collect()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.vertices.first().map_or(0, Vec::len)
    }

    /// Edge vectors from the first vertex, as matrix columns.
    fn edge_matrix(&self) -> Matrix {
        let n = self.dim();
        let v0 = &self.vertices[0];
        (0..n).map(|r| self.vertices[1..].iter().map(|v| &v[r] - &v0[r]).collect()).collect()
    }

    /// Euclidean volume of the simplex.
    pub fn volume(&self) -> BigRational {
        let n = self.dim();
        let fact: BigInt = (1..=n as u64).map(BigInt::from).product();
        linalg::det(&self.edge_matrix()).abs() / BigRational::from_integer(fact)
    }

    /// `hull{0, c e_1, ..., c e_n}`.
    pub fn standard(c: &BigRational, n: usize) -> Self {
        let mut vertices = vec![vec![BigRational::zero(); n]];
        for i in 0..n {
            let mut v = vec![BigRational::zero(); n];
            v[i] = c.clone();
            vertices.push(v);
        }
        LatticePolytope { vertices }
    }

    /// Vertex sets agree up to order.
    pub fn same_vertices(&self, other: &LatticePolytope) -> bool {
        let mut a = self.vertices.clone();
        let mut b = other.vertices.clone();
        a.sort();
        b.sort();
        a == b
    }

    pub fn translated(&self, by: &[BigRational]) -> Self {
        LatticePolytope {
            vertices: self.vertices.iter().map(|v| v.iter().zip(by).map(|(x, t)| x + t).collect()).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.vertices
                .iter()
                .map(|v| Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect()))
                .collect(),
        )
    }
}

impl fmt::Display for LatticePolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "hull{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, x) in v.iter().enumerate() {
                write!(f, "{}{x}", if j == 0 { "" } else { "," })?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// `x -> A x + t` with an integer matrix of determinant `±1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnimodularAffineMap {
    pub linear: Vec<Vec<BigInt>>,
    pub translation: Vector,
}

impl UnimodularAffineMap {
    /// Rejects non-integral or non-unimodular linear parts.
    pub fn new(linear: Vec<Vec<BigInt>>, translation: Vector) -> Result<Self> {
        let map = UnimodularAffineMap { linear, translation };
        if map.determinant().abs() != BigInt::one() {
            return Err(Error::InvalidInput("linear part is not unimodular".into()));
        }
        Ok(map)
    }

    fn from_rational(linear: &Matrix, translation: Vector) -> Option<Self> {
        let mut rows = Vec::with_capacity(linear.len());
        for row in linear {
            let mut out = Vec::with_capacity(row.len());
            for x in row {
                if !x.is_integer() {
                    return None;
                }
                out.push(x.to_integer());
            }
            rows.push(out);
        }
        Self::new(rows, translation).ok()
    }

    fn rational_linear(&self) -> Matrix {
        self.linear.iter().map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
    }

    pub fn determinant(&self) -> BigInt {
        linalg::det(&self.rational_linear()).to_integer()
    }

    pub fn apply(&self, x: &[BigRational]) -> Vector {
        linalg::mat_vec(&self.rational_linear(), x).into_iter().zip(&self.translation).map(|(y, t)| y + t).collect()
    }

    pub fn apply_polytope(&self, p: &LatticePolytope) -> LatticePolytope {
        LatticePolytope { vertices: p.vertices.iter().map(|v| self.apply(v)).collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &UnimodularAffineMap) -> UnimodularAffineMap {
        let a = self.rational_linear();
        let linear = linalg::mat_mul(&a, &other.rational_linear());
        let translation = self.apply(&other.translation);
        UnimodularAffineMap {
            linear: linear.iter().map(|row| row.iter().map(|x| x.to_integer()).collect()).collect(),
            translation,
        }
    }

    pub fn identity(n: usize) -> Self {
        UnimodularAffineMap {
            linear: (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect()).collect(),
            translation: vec![BigRational::zero(); n],
        }
    }

    pub fn power(&self, times: usize) -> Self {
        (0..times).fold(Self::identity(self.translation.len()), |acc, _| self.compose(&acc))
    }

    /// A map sending `p` onto the standard simplex of capacity `c`, if one
    /// exists.
    pub fn to_standard(p: &LatticePolytope, c: &BigRational) -> Option<Self> {
        let n = p.dim();
        if p.vertices.len() != n + 1 || !c.is_positive() {
            return None;
        }
        let target = LatticePolytope::standard(c, n);
        // The vertex sent to the origin determines the map up to a
        // permutation of coordinates, which does not affect integrality.
        for origin in 0..=n {
            let v0 = &p.vertices[origin];
            let others: Vec<&Vector> =
                p.vertices.iter().enumerate().filter(|(i, _)| *i != origin).map(|(_, v)| v).collect();
            let cols: Matrix = (0..n).map(|r| others.iter().map(|v| &v[r] - &v0[r]).collect()).collect();
            let Some(inv) = linalg::inverse(&cols) else { continue };
            let linear: Matrix = inv.iter().map(|row| row.iter().map(|x| x * c).collect()).collect();
            let shift = linalg::mat_vec(&linear, v0);
            let translation: Vector = shift.into_iter().map(|x| -x).collect();
            if let Some(map) = Self::from_rational(&linear, translation) {
                if map.apply_polytope(p).same_vertices(&target) {
                    return Some(map);
                }
            }
        }
        None
    }
}

/// A whole polytope and parts with claimed capacities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub whole: LatticePolytope,
    pub parts: Vec<(LatticePolytope, BigRational)>,
}

impl Decomposition {
    pub fn capacities(&self) -> Vec<BigRational> {
        self.parts.iter().map(|(_, c)| c.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "whole": self.whole.to_json(),
            "parts": self.parts.iter().map(|(p, c)| json!({
                "capacity": c.to_string(),
                "vertices": p.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// The simplex `hull{0, a_1 e_1, ..., a_n e_n}`.
pub fn moment_polytope(axes: &[BigRational]) -> Result<LatticePolytope> {
    if axes.is_empty() || axes.iter().any(|a| !a.is_positive()) {
        return Err(Error::InvalidInput("axes must be positive and nonempty".into()));
    }
    let n = axes.len();
    let mut vertices = vec![vec![BigRational::zero(); n]];
    for (i, a) in axes.iter().enumerate() {
        let mut v = vec![BigRational::zero(); n];
        v[i] = a.clone();
        vertices.push(v);
    }
    Ok(LatticePolytope { vertices })
}

/// The `k` slices of `E(1, ..., 1, k)` and the shift map between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub parts: Vec<LatticePolytope>,
    pub theta: UnimodularAffineMap,
}

impl Subdivision {
    /// Packaged as unit-capacity parts of the moment polytope.
    pub fn decomposition(&self) -> Decomposition {
        let n = self.theta.translation.len();
        let mut axes = vec![BigRational::one(); n];
        axes[n - 1] = int(self.parts.len() as i64);
        Decomposition {
            whole: moment_polytope(&axes).expect("positive axes"),
            parts: self.parts.iter().map(|p| (p.clone(), BigRational::one())).collect(),
        }
    }
}

fn slice(j: i64, n: usize) -> LatticePolytope {
    let mut vertices = Vec::with_capacity(n + 1);
    for i in 0..n - 1 {
        let mut v = vec![BigRational::zero(); n];
        v[i] = BigRational::one();
        vertices.push(v);
    }
    for h in [j - 1, j] {
        let mut v = vec![BigRational::zero(); n];
        v[n - 1] = int(h);
        vertices.push(v);
    }
    LatticePolytope { vertices }
}

/// The shift fixing `x_1..x_{n-1}` and sending `x_n` to
/// `x_n - 1 + x_1 + ... + x_{n-1}`.
pub fn theta(n: usize) -> UnimodularAffineMap {
    let mut linear = UnimodularAffineMap::identity(n).linear;
    linear[n - 1] = vec![BigInt::one(); n];
    let mut translation = vec![BigRational::zero(); n];
    translation[n - 1] = -BigRational::one();
    UnimodularAffineMap { linear, translation }
}

/// Cuts `E(1, ..., 1, k)` into `k` unimodular copies of the unit simplex,
/// `Δ_j = hull{e_1, ..., e_{n-1}, (j-1) e_n, j e_n}`, and checks that the
/// shift map carries `Δ_j` to `Δ_{j-1}`.
pub fn subdivide(k: usize, n: usize) -> Result<Subdivision> {
    if k == 0 || n < 2 {
        return Err(Error::InvalidInput("subdivide needs k >= 1 and n >= 2".into()));
    }
    let parts: Vec<_> = (1..=k as i64).map(|j| slice(j, n)).collect();
    let theta = theta(n);
    if theta.determinant() != BigInt::one() {
        return Err(Error::VerificationFailed("shift map is not unimodular".into()));
    }
    for j in 1..parts.len() {
        if !theta.apply_polytope(&parts[j]).same_vertices(&parts[j - 1]) {
            return Err(Error::VerificationFailed(format!("shift does not carry slice {} to slice {}", j + 1, j)));
        }
    }
    let kq = int(k as i64);
    for (j, p) in parts.iter().enumerate() {
        for v in &p.vertices {
            let level: BigRational = v[..n - 1].iter().sum::<BigRational>() + &v[n - 1] / &kq;
            if v.iter().any(Signed::is_negative) || level > BigRational::one() {
                return Err(Error::VerificationFailed(format!("slice {} leaves the moment polytope", j + 1)));
            }
        }
    }
    Ok(Subdivision { parts, theta })
}

fn point(x: &BigInt, y: &BigInt) -> Vector {
    vec![BigRational::from_integer(x.clone()), BigRational::from_integer(y.clone())]
}

/// Orientation of a strip triangle in [`fig2_decomposition`].
pub fn is_upward(part: &LatticePolytope, capacity: &BigRational) -> bool {
    let base = part.vertices.iter().min().cloned().unwrap_or_default();
    let standard = LatticePolytope::standard(capacity, part.dim());
    standard.translated(&base).same_vertices(part)
}

/// The triangle of capacity `k^{x+1}` split into a corner triangle of
/// capacity `k^{x+1} - k^x` and `2k - 1` triangles of capacity `k^x`
/// alternating along the diagonal strip.
pub fn fig2_decomposition(k: u64, x: u32) -> Result<Decomposition> {
    if k < 2 || x == 0 {
        return Err(Error::InvalidInput("need k >= 2 and x >= 1".into()));
    }
    let s = BigInt::from(k).pow(x);
    let big = &s * BigInt::from(k);
    let corner = &big - &s;
    let zero = BigInt::zero();
    let lower = |i: u64| point(&(&s * i), &(&corner - &s * i));
    let upper = |i: u64| point(&(&s * i), &(&big - &s * i));
    let cap = BigRational::from_integer(s.clone());
    let mut parts = vec![(
        LatticePolytope::new(vec![point(&zero, &zero), point(&corner, &zero), point(&zero, &corner)]),
        BigRational::from_integer(corner.clone()),
    )];
    for i in 0..k {
        parts.push((LatticePolytope::new(vec![lower(i), upper(i), upper(i + 1)]), cap.clone()));
        if i + 1 < k {
            parts.push((LatticePolytope::new(vec![upper(i + 1), lower(i), lower(i + 1)]), cap.clone()));
        }
    }
    Ok(Decomposition {
        whole: LatticePolytope::new(vec![point(&zero, &zero), point(&big, &zero), point(&zero, &big)]),
        parts,
    })
}

/// The triangle of capacity `s` cut into `s^2` unit triangles.
pub fn unit_subdivide(s: u64) -> Result<Decomposition> {
    if s == 0 {
        return Err(Error::InvalidInput("s must be positive".into()));
    }
    let p = |a: u64, b: u64| point(&BigInt::from(a), &BigInt::from(b));
    let mut parts = Vec::new();
    for i in 0..s {
        for j in 0..s - i {
            parts.push((LatticePolytope::new(vec![p(i, j), p(i + 1, j), p(i, j + 1)]), BigRational::one()));
            if i + j + 2 <= s {
                parts.push((LatticePolytope::new(vec![p(i + 1, j + 1), p(i + 1, j), p(i, j + 1)]), BigRational::one()));
            }
        }
    }
    let cap = BigRational::from_integer(BigInt::from(s));
    Ok(Decomposition { whole: LatticePolytope::standard(&cap, 2), parts })
}

/// Ball inventory obtained by filling every upward strip triangle of the
/// strip decomposition with unit balls; entries are `(capacity, count)`
/// sorted by decreasing capacity.
pub fn fig2_inventory(k: u64, x: u32) -> Result<Vec<(BigRational, BigInt)>> {
    let d = fig2_decomposition(k, x)?;
    let mut counts: std::collections::BTreeMap<BigRational, BigInt> = Default::default();
    for (part, cap) in &d.parts {
        if cap.is_integer() && part != &d.parts[0].0 && is_upward(part, cap) {
            let s = cap.to_integer().to_u64().ok_or_else(|| Error::ResourceLimit("capacity too large".into()))?;
            let filled = unit_subdivide(s)?;
            *counts.entry(BigRational::one()).or_default() += BigInt::from(filled.parts.len());
        } else {
            *counts.entry(cap.clone()).or_default() += 1;
        }
    }
    Ok(counts.into_iter().rev().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_polytopes() {
        let p = moment_polytope(&[int(1), int(1), int(2)]).unwrap();
        assert_eq!(p, LatticePolytope::from_ints(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 2]]));
        assert_eq!(moment_polytope(&[int(1)]).unwrap().vertices.len(), 2);
        assert_eq!(moment_polytope(&[int(2), int(3)]).unwrap().volume(), int(3));
        assert!(moment_polytope(&[int(0)]).is_err());
    }

    #[test]
    fn two_slices_of_the_plane() {
        let s = subdivide(2, 2).unwrap();
        assert!(s.parts[0].same_vertices(&LatticePolytope::from_ints(&[&[1, 0], &[0, 0], &[0, 1]])));
        assert!(s.parts[1].same_vertices(&LatticePolytope::from_ints(&[&[1, 0], &[0, 1], &[0, 2]])));
        assert_eq!(
            s.theta.linear,
            vec![vec![BigInt::from(1), BigInt::from(0)], vec![BigInt::from(1), BigInt::from(1)]]
        );
        assert_eq!(s.theta.translation, vec![int(0), int(-1)]);
    }

    #[test]
    fn theta_powers_return_to_first_slice() {
        let s = subdivide(4, 3).unwrap();
        for (j, p) in s.parts.iter().enumerate() {
            assert!(s.theta.power(j).apply_polytope(p).same_vertices(&s.parts[0]));
        }
        let vol: BigRational = s.parts.iter().map(LatticePolytope::volume).sum();
        assert_eq!(vol, s.decomposition().whole.volume());
    }

    #[test]
    fn standard_maps() {
        let tri = LatticePolytope::from_ints(&[&[1, 0], &[0, 1], &[0, 2]]);
        let map = UnimodularAffineMap::to_standard(&tri, &int(1)).unwrap();
        assert!(map.apply_polytope(&tri).same_vertices(&LatticePolytope::standard(&int(1), 2)));
        let fat = LatticePolytope::from_ints(&[&[0, 0], &[2, 0], &[0, 1]]);
        assert!(UnimodularAffineMap::to_standard(&fat, &int(1)).is_none());
    }

    #[test]
    fn strip_decomposition_counts() {
        let d = fig2_decomposition(5, 2).unwrap();
        let caps = d.capacities();
        assert_eq!(caps.iter().filter(|c| **c == int(100)).count(), 1);
        assert_eq!(caps.iter().filter(|c| **c == int(25)).count(), 9);
        let area: BigRational = d.parts.iter().map(|(p, _)| p.volume()).sum();
        assert_eq!(area, int(125 * 125) / int(2));
        let inv = fig2_inventory(2, 1).unwrap();
        assert_eq!(inv, vec![(int(2), BigInt::from(2)), (int(1), BigInt::from(8))]);
    }

    #[test]
    fn unit_triangles() {
        assert_eq!(unit_subdivide(1).unwrap().parts.len(), 1);
        assert_eq!(unit_subdivide(2).unwrap().parts.len(), 4);
        assert_eq!(unit_subdivide(5).unwrap().parts.len(), 25);
    }
}
