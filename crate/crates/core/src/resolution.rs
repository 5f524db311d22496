//! Graded module presentations, syzygies, and minimal free resolutions.
//!
//! A presentation is a homogeneous map of free modules
//! `F_1 -> F_0 = ⊕ S(-a_i)`; it presents the cokernel. Resolutions are built
//! by iterated syzygy computation and minimized by splitting off unit
//! entries, so the Betti numbers of the result are minimal.

use std::collections::BTreeMap;

use crate::error::{AlgebraError, EngineError};
use crate::field::{Field, Ring};
use crate::gb::{buchberger, ModCtx, ModPoly, ResourceLimits};
use crate::ideal::GradedIdeal;
use crate::matrix::PolyMatrix;
use crate::monomial::{monomials_of_degree, MonomialOrder};
use crate::poly::Polynomial;

#[derive(Clone, Debug)]
pub struct GradedModulePresentation<K: Field> {
    nvars: usize,
    /// Twists of the free cover: generator `i` of the presented module has
    /// degree `cover[i]` (the cover is `⊕ S(-cover[i])`).
    cover: Vec<i64>,
    relations: PolyMatrix<K>,
    /// Degrees of the relation columns.
    col_twists: Vec<i64>,
}

impl<K: Field> GradedModulePresentation<K> {
    pub fn new(
        nvars: usize,
        cover: Vec<i64>,
        relations: PolyMatrix<K>,
    ) -> Result<Self, EngineError> {
        if relations.rows != cover.len() {
            return Err(EngineError::BadPresentation(format!(
                "matrix has {} rows for {} cover twists",
                relations.rows,
                cover.len()
            )));
        }
        let col_twists = column_twists(&cover, &relations)?;
        Ok(GradedModulePresentation {
            nvars,
            cover,
            relations,
            col_twists,
        })
    }

    /// The free module `⊕ S(-twists[i])`.
    pub fn free(nvars: usize, twists: Vec<i64>) -> Self {
        let relations = PolyMatrix::zeros(nvars, twists.len(), 0);
        GradedModulePresentation {
            nvars,
            cover: twists,
            relations,
            col_twists: vec![],
        }
    }

    /// Presentation of the quotient ring `S/I`.
    pub fn quotient_of_ideal(ideal: &GradedIdeal<K>) -> Result<Self, EngineError> {
        let gens = ideal.generators();
        let relations = PolyMatrix::from_fn(1, gens.len(), |_, j| gens[j].clone());
        Self::new(ideal.nvars(), vec![0], relations)
    }

    /// Presentation of the ideal itself as a graded module: the cover is one
    /// free summand per generator and the relations are their first syzygies.
    pub fn module_of_ideal(
        ideal: &GradedIdeal<K>,
        order: MonomialOrder,
        limits: &ResourceLimits,
    ) -> Result<Self, EngineError> {
        let quotient = Self::quotient_of_ideal(ideal)?;
        let syz = syzygies(&quotient, order, limits)?;
        Ok(syz)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cover_twists(&self) -> &[i64] {
        &self.cover
    }

    pub fn relations(&self) -> &PolyMatrix<K> {
        &self.relations
    }

    pub fn relation_twists(&self) -> &[i64] {
        &self.col_twists
    }
}

fn column_twists<K: Field>(cover: &[i64], m: &PolyMatrix<K>) -> Result<Vec<i64>, EngineError> {
    let mut twists = Vec::with_capacity(m.cols);
    for j in 0..m.cols {
        let mut twist: Option<i64> = None;
        for i in 0..m.rows {
            let e = m.get(i, j);
            if e.is_zero() {
                continue;
            }
            let d = e.homogeneous_degree().map_err(EngineError::from)?.unwrap() as i64 + cover[i];
            match twist {
                None => twist = Some(d),
                Some(t) if t == d => {}
                Some(t) => {
                    return Err(EngineError::BadPresentation(format!(
                        "column {j} mixes degrees {t} and {d}"
                    )))
                }
            }
        }
        // a zero column gets a harmless twist
        twists.push(twist.unwrap_or(0));
    }
    Ok(twists)
}

/// Generators of the kernel of the presented map `F_1 -> F_0`, returned as a
/// presentation whose cover is `F_1` and whose relations are the kernel
/// generators (the lifted-Gröbner / transformation-tracking procedure).
pub fn syzygies<K: Field>(
    pres: &GradedModulePresentation<K>,
    order: MonomialOrder,
    limits: &ResourceLimits,
) -> Result<GradedModulePresentation<K>, EngineError> {
    let nvars = pres.nvars;
    let ctx = ModCtx {
        nvars,
        order,
        twists: pres.cover.clone(),
    };
    let gens: Vec<ModPoly<K>> = (0..pres.relations.cols)
        .map(|j| ModPoly::from_column(&pres.relations.column(j), &ctx))
        .collect();
    let out = buchberger(&gens, &ctx, limits, true, false).map_err(EngineError::from)?;
    let ncols = out.syzygies.len();
    let nrows = pres.relations.cols;
    let mut matrix = PolyMatrix::zeros(nvars, nrows, ncols);
    for (j, syz) in out.syzygies.iter().enumerate() {
        let col = syz.to_column(nrows, nvars);
        for (i, p) in col.into_iter().enumerate() {
            matrix.set(i, j, p);
        }
    }
    // sanity: relations * syzygies = 0
    let product = pres.relations.mul(&matrix);
    if !product.is_zero() {
        return Err(EngineError::Algebra(AlgebraError::InternalCheck(
            "syzygy columns do not compose to zero".into(),
        )));
    }
    GradedModulePresentation::new(nvars, pres.col_twists.clone(), matrix)
}

/// A graded free resolution `0 <- M <- F_0 <- F_1 <- ...` of the module
/// presented to [`free_resolution`]; `diffs[i]` is the map `F_{i+1} -> F_i`.
#[derive(Clone, Debug)]
pub struct FreeResolution<K: Field> {
    pub nvars: usize,
    pub twists: Vec<Vec<i64>>,
    pub diffs: Vec<PolyMatrix<K>>,
}

impl<K: Field> FreeResolution<K> {
    /// Homological length (index of the last nonzero free module).
    pub fn length(&self) -> usize {
        self.twists.len() - 1
    }

    /// Betti table: one `degree -> multiplicity` row per homological index.
    pub fn betti(&self) -> Vec<BTreeMap<i64, usize>> {
        self.twists
            .iter()
            .map(|tw| {
                let mut row = BTreeMap::new();
                for &t in tw {
                    *row.entry(t).or_insert(0) += 1;
                }
                row
            })
            .collect()
    }

    /// Check `d ∘ d = 0` as exact polynomial identities.
    pub fn verify_complex(&self) -> Result<(), EngineError> {
        for w in self.diffs.windows(2) {
            if !w[0].mul(&w[1]).is_zero() {
                return Err(EngineError::Algebra(AlgebraError::InternalCheck(
                    "consecutive differentials do not compose to zero".into(),
                )));
            }
        }
        Ok(())
    }

    /// Graded vector-space dimension of the resolved module in degree `d`
    /// (alternating sum over the free modules).
    pub fn module_dim(&self, d: i64) -> i64 {
        let n = self.nvars as i64 - 1;
        let mut acc: i64 = 0;
        let mut sign = 1i64;
        for tw in &self.twists {
            for &a in tw {
                acc += sign * dim_graded_piece(n, d - a);
            }
            sign = -sign;
        }
        acc
    }

    /// Hilbert polynomial of the resolved module evaluated at `t` (binomials
    /// continued to all integers).
    pub fn hilbert_poly_at(&self, t: i64) -> i64 {
        let n = (self.nvars - 1) as u64;
        let mut acc: i128 = 0;
        let mut sign = 1i128;
        for tw in &self.twists {
            for &a in tw {
                acc += sign * binom_poly(t - a + n as i64, n);
            }
            sign = -sign;
        }
        i64::try_from(acc).expect("hilbert polynomial value fits i64")
    }

    /// Degree of the Hilbert polynomial (projective dimension of the support)
    /// and normalized leading coefficient (the degree of the subscheme).
    /// `None` when the Hilbert polynomial is identically zero.
    pub fn hilbert_dimension_degree(&self) -> Option<(usize, i64)> {
        let n = self.nvars as i64;
        let hi = self
            .twists
            .iter()
            .flat_map(|t| t.iter().copied())
            .max()
            .unwrap_or(0);
        let base = hi + 1;
        let probes: Vec<i64> = (0..=n + 1).map(|s| base + s).collect();
        let mut values: Vec<i128> = probes
            .iter()
            .map(|&t| self.hilbert_poly_at(t) as i128)
            .collect();
        // finite differences
        let mut dim: Option<usize> = None;
        let mut lead: i128 = 0;
        let mut level = 0usize;
        loop {
            if values.iter().all(|&v| v == 0) {
                break;
            }
            if values.len() == 1 {
                dim = Some(level);
                lead = values[0];
                break;
            }
            let diff: Vec<i128> = values.windows(2).map(|w| w[1] - w[0]).collect();
            if diff.iter().all(|&v| v == 0) {
                dim = Some(level);
                lead = values[0];
                break;
            }
            values = diff;
            level += 1;
        }
        dim.map(|d| (d, lead as i64))
    }
}

/// `dim_K S_d` for the polynomial ring on `n+1` variables: C(d + n, n).
pub fn dim_graded_piece(n: i64, d: i64) -> i64 {
    if d < 0 {
        return 0;
    }
    binom_poly(d + n, n as u64) as i64
}

/// The polynomial `C(x, k) = x(x-1)...(x-k+1)/k!`, defined for all integers.
pub fn binom_poly(x: i64, k: u64) -> i128 {
    let mut num: i128 = 1;
    for s in 0..k as i128 {
        num *= x as i128 - s;
    }
    let mut den: i128 = 1;
    for s in 1..=k as i128 {
        den *= s;
    }
    num / den
}

/// Minimal graded free resolution of the module presented by `pres`.
pub fn free_resolution<K: Field>(
    pres: &GradedModulePresentation<K>,
    order: MonomialOrder,
    limits: &ResourceLimits,
) -> Result<FreeResolution<K>, EngineError> {
    let nvars = pres.nvars;
    let mut twists: Vec<Vec<i64>> = vec![pres.cover.clone()];
    let mut diffs: Vec<PolyMatrix<K>> = Vec::new();

    // drop zero relation columns up front
    let keep: Vec<usize> = (0..pres.relations.cols)
        .filter(|&j| (0..pres.relations.rows).any(|i| !pres.relations.get(i, j).is_zero()))
        .collect();
    if !keep.is_empty() {
        let mat = PolyMatrix::from_fn(pres.relations.rows, keep.len(), |i, j| {
            pres.relations.get(i, keep[j]).clone()
        });
        let tw: Vec<i64> = keep.iter().map(|&j| pres.col_twists[j]).collect();
        twists.push(tw);
        diffs.push(mat);
    }

    // prune, then extend step by step
    let initial = diffs.len();
    prune_step(&mut twists, &mut diffs, initial);
    while let Some(last) = diffs.last() {
        if last.cols == 0 {
            twists.pop();
            diffs.pop();
            break;
        }
        let current =
            GradedModulePresentation::new(nvars, twists[twists.len() - 2].clone(), last.clone())?;
        let syz = syzygies(&current, order, limits)?;
        let keep: Vec<usize> = (0..syz.relations.cols)
            .filter(|&j| (0..syz.relations.rows).any(|i| !syz.relations.get(i, j).is_zero()))
            .collect();
        if keep.is_empty() {
            break;
        }
        let mat = PolyMatrix::from_fn(syz.relations.rows, keep.len(), |i, j| {
            syz.relations.get(i, keep[j]).clone()
        });
        let tw: Vec<i64> = keep.iter().map(|&j| syz.col_twists[j]).collect();
        twists.push(tw);
        diffs.push(mat);
        let step = diffs.len();
        prune_step(&mut twists, &mut diffs, step);
        if twists.len() > nvars + 2 {
            return Err(EngineError::ResolutionTooLong {
                len: twists.len() - 1,
                nvars,
            });
        }
    }

    let res = FreeResolution {
        nvars,
        twists,
        diffs,
    };
    res.verify_complex()?;
    if res.length() > nvars {
        return Err(EngineError::ResolutionTooLong {
            len: res.length(),
            nvars,
        });
    }
    Ok(res)
}

/// Split off unit entries of `diffs[step-1]` (the map `F_step -> F_{step-1}`),
/// iterating until that differential has all entries in the maximal ideal.
/// Deleting the split summand only removes a row/column from the neighbours.
fn prune_step<K: Field>(twists: &mut Vec<Vec<i64>>, diffs: &mut Vec<PolyMatrix<K>>, step: usize) {
    if step == 0 || step > diffs.len() {
        return;
    }
    loop {
        let b = &diffs[step - 1];
        let mut unit: Option<(usize, usize)> = None;
        'scan: for i in 0..b.rows {
            for j in 0..b.cols {
                if b.get(i, j).is_unit_constant() {
                    unit = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((r, c)) = unit else { break };
        let u = diffs[step - 1].get(r, c).constant_part();
        let uinv = u.inv().expect("unit entry invertible");
        // clear row r by column operations, then delete row r and column c
        let b = &mut diffs[step - 1];
        let col_c: Vec<Polynomial<K>> = (0..b.rows).map(|i| b.get(i, c).clone()).collect();
        for j in 0..b.cols {
            if j == c {
                continue;
            }
            let factor = b.get(r, j).scale(&uinv);
            if factor.is_zero() {
                continue;
            }
            for i in 0..b.rows {
                let v = b.get(i, j).sub(&factor.mul(&col_c[i]));
                b.set(i, j, v);
            }
        }
        diffs[step - 1] = diffs[step - 1].delete_row(r).delete_col(c);
        twists[step - 1].remove(r);
        twists[step].remove(c);
        if step >= 2 {
            diffs[step - 2] = diffs[step - 2].delete_col(r);
        }
        if step < diffs.len() {
            diffs[step] = diffs[step].delete_row(c);
        }
    }
    // a prune can empty the tail module entirely
    while let Some(last) = diffs.last() {
        if last.cols == 0 {
            diffs.pop();
            twists.pop();
        } else {
            break;
        }
    }
}

/// Dimension of the degree-`d` piece of the presented module, computed two
/// ways (monomials outside the initial module; alternating Betti sum) which
/// must agree.
pub fn hilbert_function<K: Field>(
    pres: &GradedModulePresentation<K>,
    d: i64,
    order: MonomialOrder,
    limits: &ResourceLimits,
) -> Result<usize, EngineError> {
    let nvars = pres.nvars;
    // route 1: monomial count under the initial module of the relations
    let ctx = ModCtx {
        nvars,
        order,
        twists: pres.cover.clone(),
    };
    let gens: Vec<ModPoly<K>> = (0..pres.relations.cols)
        .map(|j| ModPoly::from_column(&pres.relations.column(j), &ctx))
        .collect();
    let out = buchberger(&gens, &ctx, limits, false, true).map_err(EngineError::from)?;
    let mut leads: Vec<Vec<crate::monomial::Monomial>> = vec![Vec::new(); pres.cover.len()];
    for b in &out.basis {
        let lt = b.lead().unwrap();
        leads[lt.comp].push(lt.mono.clone());
    }
    let mut count: usize = 0;
    for (slot, &twist) in pres.cover.iter().enumerate() {
        let piece = d - twist;
        if piece < 0 {
            continue;
        }
        for m in monomials_of_degree(nvars, piece as u32) {
            if !leads[slot].iter().any(|l| l.divides(&m)) {
                count += 1;
            }
        }
    }
    // route 2: alternating sum over the minimal free resolution
    let res = free_resolution(pres, order, limits)?;
    let via_res = res.module_dim(d);
    if via_res != count as i64 {
        return Err(EngineError::Algebra(AlgebraError::InternalCheck(format!(
            "hilbert function mismatch in degree {d}: initial-module count {count}, resolution sum {via_res}"
        ))));
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::F32003;
    use crate::ideal::GradedIdeal;

    type P = Polynomial<F32003>;

    fn ideal(nvars: usize, gens: &[&str]) -> GradedIdeal<F32003> {
        GradedIdeal::new(
            nvars,
            gens.iter().map(|s| P::parse(nvars, s).unwrap()).collect(),
        )
        .unwrap()
    }

    fn resolve_quotient(i: &GradedIdeal<F32003>) -> FreeResolution<F32003> {
        let pres = GradedModulePresentation::quotient_of_ideal(i).unwrap();
        free_resolution(&pres, MonomialOrder::GrevLex, &ResourceLimits::none()).unwrap()
    }

    #[test]
    fn koszul_resolution_of_three_variables() {
        let i = ideal(3, &["1*x0^1", "1*x1^1", "1*x2^1"]);
        let res = resolve_quotient(&i);
        let betti = res.betti();
        assert_eq!(betti.len(), 4);
        assert_eq!(betti[0], BTreeMap::from([(0, 1)]));
        assert_eq!(betti[1], BTreeMap::from([(1, 3)]));
        assert_eq!(betti[2], BTreeMap::from([(2, 3)]));
        assert_eq!(betti[3], BTreeMap::from([(3, 1)]));
    }

    #[test]
    fn koszul_syzygies_of_three_variables() {
        let i = ideal(3, &["1*x0^1", "1*x1^1", "1*x2^1"]);
        let pres = GradedModulePresentation::quotient_of_ideal(&i).unwrap();
        let syz = syzygies(&pres, MonomialOrder::GrevLex, &ResourceLimits::none()).unwrap();
        // three Koszul syzygies (non-minimal count may be larger; minimal is 3)
        let res = free_resolution(&pres, MonomialOrder::GrevLex, &ResourceLimits::none()).unwrap();
        assert_eq!(res.twists[2].len(), 3);
        assert!(syz.relations.cols >= 3);
    }

    #[test]
    fn twisted_cubic_betti_numbers() {
        // 2x2 minors of [[x0 x1 x2],[x1 x2 x3]]
        let i = ideal(
            4,
            &[
                "1*x0^1*x2^1+-1*x1^2",
                "1*x0^1*x3^1+-1*x1^1*x2^1",
                "1*x1^1*x3^1+-1*x2^2",
            ],
        );
        let res = resolve_quotient(&i);
        let betti = res.betti();
        assert_eq!(betti.len(), 3);
        assert_eq!(betti[1], BTreeMap::from([(2, 3)]));
        assert_eq!(betti[2], BTreeMap::from([(3, 2)]));
    }

    #[test]
    fn principal_ideal_resolution_has_length_one() {
        let i = ideal(4, &["1*x0^1*x1^1+1*x2^1*x3^1"]);
        let res = resolve_quotient(&i);
        assert_eq!(res.length(), 1);
        assert_eq!(res.twists[1], vec![2]);
    }

    #[test]
    fn hilbert_function_of_plane_and_quadric() {
        // full ring of P^2 in degree 2: C(4,2) = 6
        let zero = GradedIdeal::<F32003>::new(3, vec![]).unwrap();
        let pres = GradedModulePresentation::quotient_of_ideal(&zero).unwrap();
        assert_eq!(
            hilbert_function(&pres, 2, MonomialOrder::GrevLex, &ResourceLimits::none()).unwrap(),
            6
        );
        // quadric quotient ring in P^3, degree 2: 10 - 1 = 9
        let q = ideal(4, &["1*x0^1*x1^1+-1*x2^1*x3^1"]);
        let qp = GradedModulePresentation::quotient_of_ideal(&q).unwrap();
        assert_eq!(
            hilbert_function(&qp, 2, MonomialOrder::GrevLex, &ResourceLimits::none()).unwrap(),
            9
        );
    }

    #[test]
    fn twisted_cubic_hilbert_is_three_d_plus_one() {
        let i = ideal(
            4,
            &[
                "1*x0^1*x2^1+-1*x1^2",
                "1*x0^1*x3^1+-1*x1^1*x2^1",
                "1*x1^1*x3^1+-1*x2^2",
            ],
        );
        let pres = GradedModulePresentation::quotient_of_ideal(&i).unwrap();
        for d in 1..=6i64 {
            assert_eq!(
                hilbert_function(&pres, d, MonomialOrder::GrevLex, &ResourceLimits::none()).unwrap()
                    as i64,
                3 * d + 1
            );
        }
        let res = resolve_quotient(&i);
        let (dim, deg) = res.hilbert_dimension_degree().unwrap();
        assert_eq!((dim, deg), (1, 3));
    }

    #[test]
    fn ideal_module_presentation_matches_quotient_tail() {
        let i = ideal(
            4,
            &[
                "1*x0^1*x2^1+-1*x1^2",
                "1*x0^1*x3^1+-1*x1^1*x2^1",
                "1*x1^1*x3^1+-1*x2^2",
            ],
        );
        let m = GradedModulePresentation::module_of_ideal(
            &i,
            MonomialOrder::GrevLex,
            &ResourceLimits::none(),
        )
        .unwrap();
        let res = free_resolution(&m, MonomialOrder::GrevLex, &ResourceLimits::none()).unwrap();
        assert_eq!(res.length(), 1);
        assert_eq!(res.twists[0], vec![2, 2, 2]);
        assert_eq!(res.twists[1], vec![3, 3]);
    }
}
