//! Homogeneous ideals and their powers.

use std::collections::HashSet;

use crate::error::AlgebraError;
use crate::field::{Field, Ring};
use crate::gb::{groebner_basis, normal_form, ResourceLimits};
use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::Polynomial;

/// A homogeneous ideal in `S = K[x_0..x_{nvars-1}]`, generators deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedIdeal<K: Field> {
    nvars: usize,
    gens: Vec<Polynomial<K>>,
}

impl<K: Field> GradedIdeal<K> {
    pub fn new(nvars: usize, gens: Vec<Polynomial<K>>) -> Result<Self, AlgebraError> {
        let mut seen: HashSet<Polynomial<K>> = HashSet::new();
        let mut out = Vec::new();
        for g in gens {
            if g.is_zero() {
                continue;
            }
            if g.nvars() != nvars {
                return Err(AlgebraError::VariableCountMismatch {
                    left: g.nvars(),
                    right: nvars,
                });
            }
            g.homogeneous_degree()?;
            let monic = g.monic(MonomialOrder::GrevLex);
            if seen.insert(monic.clone()) {
                out.push(monic);
            }
        }
        Ok(GradedIdeal { nvars, gens: out })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Polynomial<K>] {
        &self.gens
    }

    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.gens
            .iter()
            .map(|g| g.homogeneous_degree().unwrap().unwrap() as i64)
            .collect()
    }

    pub fn is_principal(&self) -> bool {
        self.gens.len() == 1
    }

    /// All generators share one degree (true for every catalog variety).
    pub fn equigenerated_degree(&self) -> Option<i64> {
        let ds = self.degrees();
        match ds.first() {
            None => None,
            Some(&d0) if ds.iter().all(|&d| d == d0) => Some(d0),
            _ => None,
        }
    }

    /// The k-th power: all k-fold products of generators, deduplicated by
    /// normal form against the already-accepted generators.
    pub fn power(&self, k: usize, limits: &ResourceLimits) -> Result<GradedIdeal<K>, AlgebraError> {
        if k == 0 {
            return Err(AlgebraError::ZeroPower);
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let products = self.k_fold_products(k);
        let accepted = if self.equigenerated_degree().is_some() {
            dedup_by_span(products, self.nvars)
        } else {
            dedup_by_normal_form(products, limits)?
        };
        GradedIdeal::new(self.nvars, accepted)
    }

    fn k_fold_products(&self, k: usize) -> Vec<Polynomial<K>> {
        // multisets of size k over the generators
        let mut out = Vec::new();
        let g = &self.gens;
        fn rec<K: Field>(
            g: &[Polynomial<K>],
            start: usize,
            left: usize,
            acc: &Polynomial<K>,
            out: &mut Vec<Polynomial<K>>,
        ) {
            if left == 0 {
                out.push(acc.clone());
                return;
            }
            for i in start..g.len() {
                let next = acc.mul(&g[i]);
                rec(g, i, left - 1, &next, out);
            }
        }
        rec(g, 0, k, &Polynomial::one(self.nvars), &mut out);
        out
    }

    /// JSON serialization: a plain array of polynomial strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.gens
                .iter()
                .map(|g| serde_json::Value::String(g.to_string()))
                .collect(),
        )
    }

    pub fn from_json(nvars: usize, v: &serde_json::Value) -> Result<Self, AlgebraError> {
        let arr = v.as_array().ok_or_else(|| AlgebraError::BadPolynomial {
            input: v.to_string(),
            reason: "expected a JSON array of polynomial strings".into(),
        })?;
        let mut gens = Vec::with_capacity(arr.len());
        for s in arr {
            let s = s.as_str().ok_or_else(|| AlgebraError::BadPolynomial {
                input: s.to_string(),
                reason: "expected a string".into(),
            })?;
            gens.push(Polynomial::parse(nvars, s)?);
        }
        GradedIdeal::new(nvars, gens)
    }
}

/// Incremental span reduction in a single graded piece; correct exactly when
/// all candidates share one degree.
fn dedup_by_span<K: Field>(candidates: Vec<Polynomial<K>>, nvars: usize) -> Vec<Polynomial<K>> {
    // sparse row echelon keyed by monomial
    let mut pivots: Vec<(Monomial, Polynomial<K>)> = Vec::new();
    let mut accepted = Vec::new();
    let order = MonomialOrder::GrevLex;
    for cand in candidates {
        let mut work = cand.clone();
        loop {
            let Some((lm, lc)) = work
                .leading_term(order)
                .map(|(m, c)| (m.clone(), c.clone()))
            else {
                break;
            };
            match pivots.iter().find(|(m, _)| *m == lm) {
                Some((_, row)) => {
                    work = work.sub(&row.scale(&lc));
                }
                None => {
                    let inv = lc.inv().unwrap();
                    pivots.push((lm, work.scale(&inv)));
                    accepted.push(cand);
                    break;
                }
            }
        }
        let _ = nvars;
    }
    accepted
}

fn dedup_by_normal_form<K: Field>(
    candidates: Vec<Polynomial<K>>,
    limits: &ResourceLimits,
) -> Result<Vec<Polynomial<K>>, AlgebraError> {
    let order = MonomialOrder::GrevLex;
    let mut accepted: Vec<Polynomial<K>> = Vec::new();
    let mut basis: Vec<Polynomial<K>> = Vec::new();
    for cand in candidates {
        if accepted.is_empty() {
            basis = vec![cand.clone()];
            accepted.push(cand);
            continue;
        }
        let nf = normal_form(&cand, &basis, order)?;
        if !nf.is_zero() {
            accepted.push(cand);
            basis = groebner_basis(&accepted, order, limits)?;
        }
    }
    Ok(accepted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::F32003;

    type P = Polynomial<F32003>;

    #[test]
    fn principal_power() {
        let q = P::parse(4, "1*x0^1*x1^1+-1*x2^1*x3^1").unwrap();
        let i = GradedIdeal::new(4, vec![q.clone()]).unwrap();
        let i3 = i.power(3, &ResourceLimits::none()).unwrap();
        assert_eq!(i3.num_generators(), 1);
        assert_eq!(
            i3.generators()[0],
            q.mul(&q).mul(&q).monic(MonomialOrder::GrevLex)
        );
    }

    #[test]
    fn square_of_two_variables() {
        let i = GradedIdeal::new(
            2,
            vec![
                P::parse(2, "1*x0^1").unwrap(),
                P::parse(2, "1*x1^1").unwrap(),
            ],
        )
        .unwrap();
        let i2 = i.power(2, &ResourceLimits::none()).unwrap();
        let strs: Vec<String> = i2.generators().iter().map(|g| g.to_string()).collect();
        assert_eq!(strs, vec!["1*x0^2", "1*x0^1*x1^1", "1*x1^2"]);
    }

    #[test]
    fn zero_power_rejected() {
        let i = GradedIdeal::new(2, vec![P::parse(2, "1*x0^1").unwrap()]).unwrap();
        assert!(matches!(
            i.power(0, &ResourceLimits::none()),
            Err(AlgebraError::ZeroPower)
        ));
    }

    #[test]
    fn json_roundtrip() {
        let i = GradedIdeal::new(
            2,
            vec![
                P::parse(2, "1*x0^1").unwrap(),
                P::parse(2, "1*x1^1").unwrap(),
            ],
        )
        .unwrap();
        let j = i.to_json();
        let back = GradedIdeal::from_json(2, &j).unwrap();
        assert_eq!(back, i);
    }
}
