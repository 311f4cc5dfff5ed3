use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::{Error, Result};

/// `(d; m_1, ..., m_M)` in the basis `L, -E_1, ..., -E_M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassVector {
    pub degree: i64,
    pub mults: Vec<i64>,
}

impl ClassVector {
    pub fn new(degree: i64, mults: Vec<i64>) -> Self {
        ClassVector { degree, mults }
    }

    /// `E_i` in an `M`-point blow-up.
    pub fn exceptional_point(m: usize, i: usize) -> Self {
        let mut mults = vec![0; m];
        mults[i] = -1;
        ClassVector { degree: 0, mults }
    }

    /// `d^2 - Σ m_i^2`.
    pub fn self_intersection(&self) -> i64 {
        self.degree * self.degree - self.mults.iter().map(|m| m * m).sum::<i64>()
    }

    /// `3d - Σ m_i`.
    pub fn anticanonical(&self) -> i64 {
        3 * self.degree - self.mults.iter().sum::<i64>()
    }

    /// Multiplicities sorted in decreasing order.
    pub fn canonical(&self) -> ClassVector {
        let mut mults = self.mults.clone();
        mults.sort_unstable_by(|a, b| b.cmp(a));
        ClassVector { degree: self.degree, mults }
    }

    /// Reflection in the class `L - E_i - E_j - E_k`.
    pub fn cremona(&self, i: usize, j: usize, k: usize) -> ClassVector {
        let d = self.degree;
        let (a, b, c) = (self.mults[i], self.mults[j], self.mults[k]);
        let mut mults = self.mults.clone();
        mults[i] = d - b - c;
        mults[j] = d - a - c;
        mults[k] = d - a - b;
        ClassVector { degree: 2 * d - a - b - c, mults }
    }

    /// `d μ - Σ m_i w_i`; balls beyond the listed multiplicities pair to 0.
    pub fn pairing(&self, target: &BigRational, balls: &[BigRational]) -> BigRational {
        let mut acc = target * BigRational::from_integer(BigInt::from(self.degree));
        for (m, w) in self.mults.iter().zip(balls) {
            acc -= w * BigRational::from_integer(BigInt::from(*m));
        }
        acc
    }

    fn padded(&self, len: usize) -> ClassVector {
        let mut mults = self.mults.clone();
        mults.resize(len.max(mults.len()), 0);
        ClassVector { degree: self.degree, mults }
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.degree)?;
        for (i, m) in self.mults.iter().enumerate() {
            write!(f, "{}{m}", if i == 0 { "" } else { "," })?;
        }
        write!(f, ")")
    }
}

/// Whether `v` is the class of an exceptional sphere.
///
/// Checks the two numerical conditions, then reduces: sort the
/// multiplicities, apply the move on the top three while it lowers the
/// degree, and accept exactly when `(0; -1, 0, ..., 0)` is reached.
pub fn is_exceptional(v: &ClassVector) -> bool {
    if v.self_intersection() != -1 || v.anticanonical() != 1 {
        return false;
    }
    let mut cur = v.padded(3).canonical();
    loop {
        if cur.degree < 0 {
            return false;
        }
        if cur.degree == 0 {
            let minus_ones = cur.mults.iter().filter(|&&m| m == -1).count();
            let zeros = cur.mults.iter().filter(|&&m| m == 0).count();
            return minus_ones == 1 && zeros + 1 == cur.mults.len();
        }
        let top = cur.mults[0] + cur.mults[1] + cur.mults[2];
        if top <= cur.degree {
            return false;
        }
        cur = cur.cremona(0, 1, 2).canonical();
    }
}

/// Default cap on the number of classes visited by the orbit search.
pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// All exceptional classes with `M` multiplicities and degree at most
/// `max_degree`, one representative (decreasing multiplicities) per
/// permutation orbit.
pub fn enumerate_exceptional(m: usize, max_degree: i64) -> Result<BTreeSet<ClassVector>> {
    enumerate_exceptional_within(m, max_degree, DEFAULT_NODE_BUDGET)
}

pub fn enumerate_exceptional_within(m: usize, max_degree: i64, node_budget: usize) -> Result<BTreeSet<ClassVector>> {
    if m == 0 {
        return Err(Error::InvalidInput("need at least one blown-up point".into()));
    }
    // Searching with fewer than three slots leaves no moves, so search at
    // three and keep classes that vanish on the extra slots.
    let slots = m.max(3);
    let start = ClassVector::exceptional_point(slots, 0).canonical();
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for i in 0..slots {
            for j in i + 1..slots {
                for k in j + 1..slots {
                    let w = v.cremona(i, j, k).canonical();
                    if w.degree < 0 || w.degree > max_degree || seen.contains(&w) {
                        continue;
                    }
                    if seen.len() >= node_budget {
                        return Err(Error::ResourceLimit(format!(
                            "exceptional class search exceeded {node_budget} classes"
                        )));
                    }
                    seen.insert(w.clone());
                    queue.push_back(w);
                }
            }
        }
    }
    Ok(seen.into_iter().filter_map(|v| drop_zero_slots(v, slots - m)).collect())
}

fn drop_zero_slots(v: ClassVector, extra: usize) -> Option<ClassVector> {
    let mut mults = v.mults;
    for _ in 0..extra {
        let pos = mults.iter().position(|&x| x == 0)?;
        mults.remove(pos);
    }
    Some(ClassVector { degree: v.degree, mults })
}
