//! Discrepancy bookkeeping for hypersurfaces built from general linear
//! combinations of minors (or sub-Pfaffians) of the universal matrix, and
//! the exhaustive optimizer over multiplicity vectors.
//!
//! A multiplicity vector assigns `n_i` general degree-`i` members built from
//! size-`i` minors (index `i` runs over `2..=k`, or `2..=l` with
//! `l = size/2` in the skew case). The induced class is
//! `F = (Σ i·n_i) H - (Σ (i-1)·n_i) E`, and the discrepancy at the `j`-th
//! exceptional divisor of the degeneracy-locus blow-up tower is
//! `c_j - 1 - Σ_{i>j} (i-j) n_i` with `c_j` the relevant codimension
//! constant of the case.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::divisor::{DivisorClass, SingularityClass, Q};
use crate::error::BoundError;
use crate::varieties::{degeneracy_codim, EmbeddingCase};

/// `n_i` for `i = 2..=max_index(case)`, with the case's boundary caps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityVector {
    case: EmbeddingCase,
    values: Vec<u32>, // values[t] = n_{t+2}
}

impl MultiplicityVector {
    pub fn new(case: EmbeddingCase, values: Vec<u32>) -> Result<Self, BoundError> {
        let expected = case.max_index().saturating_sub(1);
        if values.len() != expected {
            return Err(BoundError::ConstraintViolation(format!(
                "expected {expected} entries (i = 2..={}), got {}",
                case.max_index(),
                values.len()
            )));
        }
        let nv = MultiplicityVector { case, values };
        nv.check_caps()?;
        Ok(nv)
    }

    fn check_caps(&self) -> Result<(), BoundError> {
        let top = self.get(self.case.max_index());
        match self.case {
            EmbeddingCase::Generic { rows, cols } => {
                if rows == cols && top > 1 {
                    return Err(BoundError::ConstraintViolation(format!(
                        "square generic case requires n_{} <= 1, got {top}",
                        rows
                    )));
                }
            }
            EmbeddingCase::Symmetric { size } => {
                if top > 1 {
                    return Err(BoundError::ConstraintViolation(format!(
                        "symmetric case requires n_{size} <= 1, got {top}"
                    )));
                }
            }
            EmbeddingCase::Skew { size } => {
                if size % 2 == 0 && top > 1 {
                    return Err(BoundError::ConstraintViolation(format!(
                        "even skew case requires n_{} <= 1, got {top}",
                        size / 2
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn case(&self) -> &EmbeddingCase {
        &self.case
    }

    /// `n_i` (zero outside the valid index range).
    pub fn get(&self, i: usize) -> u32 {
        if i < 2 || i > self.case.max_index() {
            return 0;
        }
        self.values[i - 2]
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> {
        2..=self.case.max_index()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn degree_sum(&self) -> i64 {
        self.indices().map(|i| i as i64 * self.get(i) as i64).sum()
    }

    pub fn excess_sum(&self) -> i64 {
        self.indices()
            .map(|i| (i as i64 - 1) * self.get(i) as i64)
            .sum()
    }

    pub fn component_count(&self) -> i64 {
        self.indices().map(|i| self.get(i) as i64).sum()
    }
}

/// The codimension constant in the discrepancy formula at index `j`:
/// `(k-j)(m-j)` (generic), `C(k-j+1, 2)` (symmetric), `C(k-2j, 2)` (skew).
pub fn discrepancy_constant(case: &EmbeddingCase, j: usize) -> i64 {
    match *case {
        EmbeddingCase::Generic { rows, cols } => {
            (rows as i64 - j as i64) * (cols as i64 - j as i64)
        }
        EmbeddingCase::Symmetric { size } => {
            let t = size as i64 - j as i64 + 1;
            t * (t - 1) / 2
        }
        EmbeddingCase::Skew { size } => {
            let t = size as i64 - 2 * j as i64;
            t * (t - 1) / 2
        }
    }
}

/// Exceptional indices whose discrepancies decide the verdict:
/// `2..=k-1` for minors, `2..=l-1` for Pfaffians.
pub fn exceptional_indices(case: &EmbeddingCase) -> Vec<usize> {
    let hi = match *case {
        EmbeddingCase::Generic { rows, .. } => rows.saturating_sub(1),
        EmbeddingCase::Symmetric { size } => size.saturating_sub(1),
        EmbeddingCase::Skew { size } => (size / 2).saturating_sub(1),
    };
    (2..=hi).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyReport {
    /// Discrepancy at each verdict-determining exceptional divisor.
    pub exceptional: BTreeMap<usize, i64>,
    /// Informational boundary value at `j = l` for skew cases with `2l < k`
    /// (two readings of the index range exist; both are reported).
    pub boundary: Option<(usize, i64)>,
    /// Whether the divisor has components (each contributes a strict
    /// transform of discrepancy -1).
    pub has_components: bool,
    pub verdict: SingularityClass,
    pub f_class: DivisorClass,
    /// `Σ (i-1) n_i`, the multiplicity of F along Y.
    pub excess: i64,
    /// Expected codimension `r` of Y.
    pub codim: i64,
    /// `Σ i n_i - n` when `excess == codim`; `None` marks an infeasible
    /// class (a first-class outcome, not an error).
    pub e_bound: Option<i64>,
}

/// Discrepancies, verdict, induced class, and threshold for one
/// multiplicity vector.
pub fn discrepancy_report(
    case: &EmbeddingCase,
    nv: &MultiplicityVector,
) -> Result<DiscrepancyReport, BoundError> {
    if nv.case() != case {
        return Err(BoundError::ConstraintViolation(
            "multiplicity vector was built for a different case".into(),
        ));
    }
    let mut exceptional = BTreeMap::new();
    for j in exceptional_indices(case) {
        exceptional.insert(j, discrepancy_at(case, nv, j));
    }
    let boundary = match *case {
        EmbeddingCase::Skew { size } if size % 2 == 1 => {
            let l = size / 2;
            if l >= 2 {
                Some((l, discrepancy_at(case, nv, l)))
            } else {
                None
            }
        }
        _ => None,
    };
    let has_components = nv.component_count() > 0;
    let min_exc = exceptional.values().copied().min();
    let lc = min_exc.map(|m| m >= -1).unwrap_or(true);
    let exc_strict = min_exc.map(|m| m > -1).unwrap_or(true);
    let verdict = if !lc {
        SingularityClass::NotLc
    } else if exc_strict {
        if has_components {
            SingularityClass::Plt
        } else {
            SingularityClass::Klt
        }
    } else {
        SingularityClass::Lc
    };
    let n = case.ambient_dim() as i64;
    let r = case.codim() as i64;
    let excess = nv.excess_sum();
    let degree = nv.degree_sum();
    let f_class = DivisorClass::from_integers(degree, -excess);
    let e_bound = if excess == r { Some(degree - n) } else { None };
    Ok(DiscrepancyReport {
        exceptional,
        boundary,
        has_components,
        verdict,
        f_class,
        excess,
        codim: r,
        e_bound,
    })
}

fn discrepancy_at(case: &EmbeddingCase, nv: &MultiplicityVector, j: usize) -> i64 {
    let c = discrepancy_constant(case, j);
    let drop: i64 = nv
        .indices()
        .filter(|&i| i > j)
        .map(|i| (i as i64 - j as i64) * nv.get(i) as i64)
        .sum();
    c - 1 - drop
}

/// Rational-coefficient evaluation used by the scaling property: components
/// taken with coefficient `scale` instead of 1.
pub fn discrepancy_at_scaled(
    case: &EmbeddingCase,
    nv: &MultiplicityVector,
    j: usize,
    scale: Q,
) -> Q {
    let c = Q::from_integer(discrepancy_constant(case, j));
    let drop: i64 = nv
        .indices()
        .filter(|&i| i > j)
        .map(|i| (i as i64 - j as i64) * nv.get(i) as i64)
        .sum();
    c - Q::one() - scale * Q::from_integer(drop)
}

use num::One;

/// Search the feasible box for the vector minimizing `Σ i n_i - n` subject
/// to: case caps, `Σ (i-1) n_i = r`, and a log canonical verdict. Each
/// coordinate is bounded by the codimension of its degeneracy locus (larger
/// values force a discrepancy below -1 by monotonicity). Ties prefer the
/// lexicographically largest vector from the top index down, favouring
/// high-degree minors.
pub fn optimize_multiplicities(
    case: &EmbeddingCase,
) -> Result<(MultiplicityVector, DiscrepancyReport), BoundError> {
    case.validate()
        .map_err(|e| BoundError::OutOfRange(e.to_string()))?;
    let r = case.codim() as i64;
    let hi = case.max_index();
    if hi < 2 {
        return Err(BoundError::Infeasible);
    }
    let indices: Vec<usize> = (2..=hi).collect();
    // per-coordinate caps
    let mut caps: Vec<i64> = indices
        .iter()
        .map(|&i| degeneracy_codim(case, i).map(|c| c as i64).unwrap_or(0))
        .collect();
    let top_cap = match *case {
        EmbeddingCase::Generic { rows, cols } => (rows == cols).then_some(1),
        EmbeddingCase::Symmetric { .. } => Some(1),
        EmbeddingCase::Skew { size } => (size % 2 == 0).then_some(1),
    };
    if let Some(cap) = top_cap {
        let last = caps.len() - 1;
        caps[last] = caps[last].min(cap);
    }

    struct Search<'a> {
        case: &'a EmbeddingCase,
        indices: &'a [usize],
        caps: &'a [i64],
        exceptional: Vec<usize>,
        r: i64,
        best: Option<(i64, Vec<u32>)>,
    }

    impl Search<'_> {
        // choose values from the top index down
        fn rec(&mut self, pos: usize, chosen: &mut Vec<u32>, excess: i64, count: i64) {
            if excess > self.r {
                return;
            }
            if pos == self.indices.len() {
                if excess == self.r {
                    let candidate = (count, chosen.clone());
                    let better = match &self.best {
                        None => true,
                        Some((bc, bv)) => {
                            candidate.0 < *bc
                                || (candidate.0 == *bc && lex_from_top(&candidate.1, bv))
                        }
                    };
                    if better {
                        // chosen is ordered from the top index down; store as-is
                        self.best = Some(candidate);
                    }
                }
                return;
            }
            let idx_pos = self.indices.len() - 1 - pos; // descending index order
            let i = self.indices[idx_pos];
            let weight = i as i64 - 1;
            // remaining capacity must be able to absorb the rest of r
            let max_rest: i64 = (0..idx_pos)
                .map(|t| (self.indices[t] as i64 - 1) * self.caps[t])
                .sum();
            for v in (0..=self.caps[idx_pos].min((self.r - excess) / weight)).rev() {
                let new_excess = excess + weight * v;
                if new_excess + max_rest < self.r {
                    continue;
                }
                chosen.push(v as u32);
                // the constraint at j = i-1 only involves indices > i-1,
                // all of which are chosen now
                let ok = if i >= 3 && self.exceptional.contains(&(i - 1)) {
                    partial_discrepancy_ok(self.case, self.indices, chosen, i - 1)
                } else {
                    true
                };
                if ok {
                    self.rec(pos + 1, chosen, new_excess, count + v);
                }
                chosen.pop();
            }
        }
    }

    fn lex_from_top(a: &[u32], b: &[u32]) -> bool {
        // both ordered from the top index down
        for (x, y) in a.iter().zip(b.iter()) {
            if x != y {
                return x > y;
            }
        }
        false
    }

    fn partial_discrepancy_ok(
        case: &EmbeddingCase,
        indices: &[usize],
        chosen: &[u32],
        j: usize,
    ) -> bool {
        let c = discrepancy_constant(case, j);
        let mut drop = 0i64;
        for (pos, v) in chosen.iter().enumerate() {
            let i = indices[indices.len() - 1 - pos];
            if i > j {
                drop += (i as i64 - j as i64) * *v as i64;
            }
        }
        c - 1 - drop >= -1
    }

    let mut search = Search {
        case,
        indices: &indices,
        caps: &caps,
        exceptional: exceptional_indices(case),
        r,
        best: None,
    };
    search.rec(0, &mut Vec::new(), 0, 0);
    let Some((_, top_down)) = search.best else {
        return Err(BoundError::Infeasible);
    };
    let values: Vec<u32> = top_down.into_iter().rev().collect();
    let nv = MultiplicityVector::new(*case, values)?;
    let report = discrepancy_report(case, &nv)?;
    Ok((nv, report))
}

/// The closed-form optimal vectors: `n_k = m-k+1, n_i = 2` (generic),
/// all `n_i = 1` (symmetric), `n_l = 1` or `3` by parity with `n_i = 4`
/// (skew). Used as witnesses against the optimizer.
pub fn closed_form_vector(case: &EmbeddingCase) -> Result<MultiplicityVector, BoundError> {
    let hi = case.max_index();
    let values: Vec<u32> = match *case {
        EmbeddingCase::Generic { rows, cols } => (2..=hi)
            .map(|i| {
                if i == rows {
                    (cols - rows + 1) as u32
                } else {
                    2
                }
            })
            .collect(),
        EmbeddingCase::Symmetric { .. } => vec![1; hi - 1],
        EmbeddingCase::Skew { size } => {
            let l = size / 2;
            (2..=hi)
                .map(|i| {
                    if i == l {
                        if size % 2 == 0 {
                            1
                        } else {
                            3
                        }
                    } else {
                        4
                    }
                })
                .collect()
        }
    };
    MultiplicityVector::new(*case, values)
}
