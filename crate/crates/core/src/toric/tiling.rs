use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::linalg::{self, Vector};
use super::{Decomposition, LatticePolytope, UnimodularAffineMap};

/// Outcome of [`verify_tiling`]; on success carries the certifying maps,
/// one per part, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingReport {
    pub valid: bool,
    pub reason: Option<String>,
    pub maps: Vec<UnimodularAffineMap>,
}

impl TilingReport {
    fn fail(reason: String) -> Self {
        TilingReport { valid: false, reason: Some(reason), maps: Vec::new() }
    }
}

/// Checks that the parts tile the whole: each part is a unimodular copy of
/// the standard simplex of its claimed capacity and lies in the whole,
/// interiors are pairwise disjoint, and volumes add up exactly.
pub fn verify_tiling(d: &Decomposition) -> TilingReport {
    let n = d.whole.dim();
    let mut maps = Vec::with_capacity(d.parts.len());
    for (i, (part, cap)) in d.parts.iter().enumerate() {
        if part.dim() != n || part.vertices.len() != n + 1 {
            return TilingReport::fail(format!("part {} is not an {n}-simplex", i + 1));
        }
        match UnimodularAffineMap::to_standard(part, cap) {
            Some(map) => {
                let image = map.apply_polytope(part);
                if !image.same_vertices(&LatticePolytope::standard(cap, n)) {
                    return TilingReport::fail(format!("map for part {} does not re-check", i + 1));
                }
                maps.push(map);
            }
            None => {
                return TilingReport::fail(format!(
                    "part {} is not unimodularly equivalent to the standard simplex of capacity {cap}",
                    i + 1
                ))
            }
        }
        if let Some(v) = part.vertices.iter().find(|v| !inside(&d.whole, v)) {
            return TilingReport::fail(format!("part {} has vertex {v:?} outside the whole", i + 1));
        }
    }
    let total: BigRational = d.parts.iter().map(|(p, _)| p.volume()).sum();
    let whole = d.whole.volume();
    if total != whole {
        return TilingReport::fail(format!("part volumes sum to {total}, whole has {whole}"));
    }
    if let Some((i, j)) = overlapping_pair(&d.parts.iter().map(|(p, _)| p).collect::<Vec<_>>()) {
        return TilingReport::fail(format!("parts {} and {} overlap in their interiors", i + 1, j + 1));
    }
    TilingReport { valid: true, reason: None, maps }
}

/// Barycentric containment in a simplex.
fn inside(simplex: &LatticePolytope, x: &[BigRational]) -> bool {
    let n = simplex.dim();
    let v0 = &simplex.vertices[0];
    let cols = simplex.edge_matrix();
    let Some(inv) = linalg::inverse(&cols) else { return false };
    let coords = linalg::mat_vec(&inv, &linalg::sub(x, v0));
    let sum: BigRational = coords.iter().sum();
    coords.len() == n && coords.iter().all(|c| !c.is_negative()) && sum <= BigRational::from_integer(1.into())
}

fn edges(p: &LatticePolytope) -> Vec<Vector> {
    let mut out = Vec::new();
    for i in 0..p.vertices.len() {
        for j in i + 1..p.vertices.len() {
            out.push(linalg::sub(&p.vertices[j], &p.vertices[i]));
        }
    }
    out
}

fn extent(p: &LatticePolytope, dir: &[BigRational]) -> (BigRational, BigRational) {
    let vals: Vec<BigRational> = p.vertices.iter().map(|v| linalg::dot(v, dir)).collect();
    let lo = vals.iter().min().cloned().unwrap_or_else(BigRational::zero);
    let hi = vals.iter().max().cloned().unwrap_or_else(BigRational::zero);
    (lo, hi)
}

/// Whether some hyperplane weakly separates the two simplices. The facets
/// of their Minkowski difference are spanned by `n - 1` edge directions,
/// so testing those normals is exhaustive.
fn separated(a: &LatticePolytope, b: &LatticePolytope) -> bool {
    let n = a.dim();
    let dirs: Vec<Vector> = edges(a).into_iter().chain(edges(b)).collect();
    let mut chosen = Vec::with_capacity(n.saturating_sub(1));
    search(&dirs, 0, n, &mut chosen, a, b)
}

fn search<'a>(
    dirs: &'a [Vector],
    start: usize,
    n: usize,
    chosen: &mut Vec<&'a Vector>,
    a: &LatticePolytope,
    b: &LatticePolytope,
) -> bool {
    if chosen.len() + 1 == n {
        let Some(normal) = linalg::normal(chosen, n) else { return false };
        let (alo, ahi) = extent(a, &normal);
        let (blo, bhi) = extent(b, &normal);
        return ahi <= blo || bhi <= alo;
    }
    for i in start..dirs.len() {
        chosen.push(&dirs[i]);
        if search(dirs, i + 1, n, chosen, a, b) {
            return true;
        }
        chosen.pop();
    }
    false
}

fn bounding_box(p: &LatticePolytope) -> (Vector, Vector) {
    let n = p.dim();
    let lo = (0..n).map(|i| p.vertices.iter().map(|v| v[i].clone()).min().unwrap_or_default()).collect();
    let hi = (0..n).map(|i| p.vertices.iter().map(|v| v[i].clone()).max().unwrap_or_default()).collect();
    (lo, hi)
}

/// First pair of parts with overlapping interiors, found by a sweep over
/// the first coordinate of their bounding boxes.
fn overlapping_pair(parts: &[&LatticePolytope]) -> Option<(usize, usize)> {
    let boxes: Vec<(Vector, Vector)> = parts.iter().map(|p| bounding_box(p)).collect();
    let mut order: Vec<usize> = (0..parts.len()).collect();
    order.sort_by(|&i, &j| boxes[i].0[0].cmp(&boxes[j].0[0]));
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if boxes[j].0[0] >= boxes[i].1[0] {
                break;
            }
            let disjoint_boxes =
                (0..boxes[i].0.len()).any(|c| boxes[i].1[c] <= boxes[j].0[c] || boxes[j].1[c] <= boxes[i].0[c]);
            if !disjoint_boxes && !separated(parts[i], parts[j]) {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}
