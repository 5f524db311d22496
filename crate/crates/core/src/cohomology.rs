//! Sheaf cohomology of graded modules on projective space.
//!
//! For a module `M` with minimal free resolution `F_•`, the complex
//! `Hom(F_•, S(-n-1))` computes `Ext^i(M, S(-n-1))`, and graded local duality
//! identifies `H^j_m(M)_p` with the degree `-p` homology at position
//! `n+1-j`. Sheaf cohomology then comes from the comparison sequence:
//! `H^i(M~(p)) = H^{i+1}_m(M)_p` for `i >= 1`, and
//! `h^0 = dim M_p - h^0_m + h^1_m`.

use std::collections::{BTreeMap, HashMap};

use serde_json::json;

use crate::error::{AlgebraError, EngineError};
use crate::field::{Field, Ring};
use crate::gb::ResourceLimits;
use crate::ideal::GradedIdeal;
use crate::monomial::{monomials_of_degree, Monomial, MonomialOrder};
use crate::resolution::{binom_poly, free_resolution, FreeResolution, GradedModulePresentation};

/// Closed-form cohomology of `O(p)` on `P^n`: the independent oracle.
pub fn line_bundle_cohomology(n: usize, p: i64, i: usize) -> u64 {
    if i == 0 {
        if p >= 0 {
            binom_poly(n as i64 + p, n as u64) as u64
        } else {
            0
        }
    } else if i == n {
        if p < -(n as i64) {
            binom_poly(-p - 1, n as u64) as u64
        } else {
            0
        }
    } else {
        0
    }
}

/// Cohomology engine for one module: the resolution is computed once and the
/// graded ranks of the dualized differentials are cached per degree.
pub struct ModuleCohomology<K: Field> {
    nvars: usize,
    res: FreeResolution<K>,
    dual_twists: Vec<Vec<i64>>,
    rank_cache: HashMap<(usize, i64), usize>,
    basis_cache: HashMap<u32, (Vec<Monomial>, HashMap<Monomial, usize>)>,
    _k: std::marker::PhantomData<K>,
}

impl<K: Field> ModuleCohomology<K> {
    pub fn new(
        pres: &GradedModulePresentation<K>,
        order: MonomialOrder,
        limits: &ResourceLimits,
    ) -> Result<Self, EngineError> {
        let res = free_resolution(pres, order, limits)?;
        Ok(Self::from_resolution(res))
    }

    pub fn from_resolution(res: FreeResolution<K>) -> Self {
        let nvars = res.nvars;
        let n1 = nvars as i64; // n + 1
        let dual_twists: Vec<Vec<i64>> = res
            .twists
            .iter()
            .map(|tw| tw.iter().map(|&a| n1 - a).collect())
            .collect();
        ModuleCohomology {
            nvars,
            res,
            dual_twists,
            rank_cache: HashMap::new(),
            basis_cache: HashMap::new(),
            _k: std::marker::PhantomData,
        }
    }

    pub fn resolution(&self) -> &FreeResolution<K> {
        &self.res
    }

    /// dim of the projective space `n`.
    pub fn n(&self) -> usize {
        self.nvars - 1
    }

    pub fn module_dim(&self, d: i64) -> i64 {
        self.res.module_dim(d)
    }

    pub fn hilbert_poly_at(&self, p: i64) -> i64 {
        self.res.hilbert_poly_at(p)
    }

    fn basis(&mut self, d: u32) -> &(Vec<Monomial>, HashMap<Monomial, usize>) {
        let nvars = self.nvars;
        self.basis_cache.entry(d).or_insert_with(|| {
            let monos = monomials_of_degree(nvars, d);
            let index: HashMap<Monomial, usize> = monos
                .iter()
                .enumerate()
                .map(|(i, m)| (m.clone(), i))
                .collect();
            (monos, index)
        })
    }

    fn dual_piece_dim(&self, s: usize, t: i64) -> i64 {
        if s >= self.dual_twists.len() {
            return 0;
        }
        let n = self.n() as i64;
        self.dual_twists[s]
            .iter()
            .map(|&c| crate::resolution::dim_graded_piece(n, t - c))
            .sum()
    }

    /// Rank of the dualized differential `D^s -> D^{s+1}` in degree `t`.
    fn dual_rank(
        &mut self,
        s: usize,
        t: i64,
        limits: &ResourceLimits,
    ) -> Result<usize, EngineError> {
        if s >= self.res.diffs.len() {
            return Ok(0);
        }
        if let Some(&r) = self.rank_cache.get(&(s, t)) {
            return Ok(r);
        }
        let dom_twists = self.dual_twists[s].clone();
        let cod_twists = self.dual_twists[s + 1].clone();
        // column offsets in the codomain piece
        let mut offsets = Vec::with_capacity(cod_twists.len());
        let mut total = 0usize;
        for &c in &cod_twists {
            offsets.push(total);
            let d = t - c;
            if d >= 0 {
                total += self.basis(d as u32).0.len();
            }
        }
        let mut rows: Vec<Vec<(usize, K)>> = Vec::new();
        for (j, &cj) in dom_twists.iter().enumerate() {
            let dj = t - cj;
            if dj < 0 {
                continue;
            }
            let dom_monos = self.basis(dj as u32).0.clone();
            for m in &dom_monos {
                let mut row: Vec<(usize, K)> = Vec::new();
                for (k, &ck) in cod_twists.iter().enumerate() {
                    let dk = t - ck;
                    if dk < 0 {
                        continue;
                    }
                    // dual differential entry (k, j) is diffs[s][j][k]
                    let e = self.res.diffs[s].get(j, k);
                    if e.is_zero() {
                        continue;
                    }
                    let terms: Vec<(Monomial, K)> =
                        e.terms().map(|(mm, c)| (mm.clone(), c.clone())).collect();
                    let index = &self.basis(dk as u32).1;
                    for (mu, c) in &terms {
                        let target = mu.mul(m);
                        let idx = *index.get(&target).expect("graded piece index");
                        row.push((offsets[k] + idx, c.clone()));
                    }
                }
                if !row.is_empty() {
                    row.sort_by_key(|&(c, _)| c);
                    rows.push(row);
                }
            }
            limits
                .check(0, "cohomology rank computation")
                .map_err(EngineError::from)?;
        }
        let r = rank_sparse(rows);
        self.rank_cache.insert((s, t), r);
        Ok(r)
    }

    /// `dim H^j_m(M)_p` by graded local duality.
    pub fn local_cohomology_dim(
        &mut self,
        j: usize,
        p: i64,
        limits: &ResourceLimits,
    ) -> Result<u64, EngineError> {
        let n1 = self.nvars; // n + 1
        if j > n1 {
            return Ok(0);
        }
        let s = n1 - j;
        let t = -p;
        let dim_mid = self.dual_piece_dim(s, t);
        if dim_mid == 0 {
            return Ok(0);
        }
        let rank_out = self.dual_rank(s, t, limits)? as i64;
        let rank_in = if s == 0 {
            0
        } else {
            self.dual_rank(s - 1, t, limits)? as i64
        };
        let h = dim_mid - rank_out - rank_in;
        debug_assert!(h >= 0);
        Ok(h.max(0) as u64)
    }

    /// `dim H^i(P^n, M~(p))`.
    pub fn sheaf_cohomology(
        &mut self,
        i: usize,
        p: i64,
        limits: &ResourceLimits,
    ) -> Result<u64, EngineError> {
        let n = self.n();
        if i > n {
            return Err(EngineError::IndexOutOfRange { i, n });
        }
        if i >= 1 {
            self.local_cohomology_dim(i + 1, p, limits)
        } else {
            let m = self.module_dim(p);
            let h0m = self.local_cohomology_dim(0, p, limits)? as i64;
            let h1m = self.local_cohomology_dim(1, p, limits)? as i64;
            let v = m - h0m + h1m;
            debug_assert!(v >= 0);
            Ok(v.max(0) as u64)
        }
    }
}

/// One-shot convenience wrapper.
pub fn sheaf_cohomology<K: Field>(
    pres: &GradedModulePresentation<K>,
    i: usize,
    p: i64,
    order: MonomialOrder,
    limits: &ResourceLimits,
) -> Result<u64, EngineError> {
    let mut engine = ModuleCohomology::new(pres, order, limits)?;
    engine.sheaf_cohomology(i, p, limits)
}

/// Sparse row echelon rank over a field.
fn rank_sparse<K: Field>(rows: Vec<Vec<(usize, K)>>) -> usize {
    let mut pivots: BTreeMap<usize, Vec<(usize, K)>> = BTreeMap::new();
    for mut row in rows {
        while let Some(&(lead_col, ref lead_coeff)) = row.first() {
            let lead_coeff = lead_coeff.clone();
            match pivots.get(&lead_col) {
                None => {
                    let inv = lead_coeff.inv().unwrap();
                    let normalized: Vec<(usize, K)> =
                        row.iter().map(|(c, v)| (*c, v.mul(&inv))).collect();
                    pivots.insert(lead_col, normalized);
                    break;
                }
                Some(prow) => {
                    row = sub_scaled_sparse(&row, prow, &lead_coeff);
                }
            }
        }
    }
    pivots.len()
}

fn sub_scaled_sparse<K: Field>(a: &[(usize, K)], b: &[(usize, K)], f: &K) -> Vec<(usize, K)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            let v = b[j].1.mul(f).neg();
            if !v.is_zero() {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = a[i].1.sub(&b[j].1.mul(f));
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// The `(i, k, p) -> dim` table produced by a vanishing scan.
#[derive(Clone, Debug)]
pub struct CohomologyTable {
    pub label: String,
    pub field: String,
    pub e_candidate: i64,
    pub d_y: i64,
    /// `(k, p, i) -> dim H^i(I^k(p))`
    pub entries: BTreeMap<(usize, i64, usize), u64>,
    /// probe window per power `k`
    pub windows: BTreeMap<usize, (i64, i64)>,
}

impl CohomologyTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,p,i,dim\n");
        for (&(k, p, i), &dim) in &self.entries {
            s.push_str(&format!("{k},{p},{i},{dim}\n"));
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut by_k = serde_json::Map::new();
        for (&k, &(lo, hi)) in &self.windows {
            let mut by_p = serde_json::Map::new();
            for p in lo..=hi {
                let mut by_i = serde_json::Map::new();
                for (&(kk, pp, i), &dim) in &self.entries {
                    if kk == k && pp == p {
                        by_i.insert(i.to_string(), json!(dim));
                    }
                }
                if !by_i.is_empty() {
                    by_p.insert(p.to_string(), serde_json::Value::Object(by_i));
                }
            }
            by_k.insert(
                k.to_string(),
                json!({ "window": [lo, hi], "p": serde_json::Value::Object(by_p) }),
            );
        }
        json!({
            "label": self.label,
            "field": self.field,
            "e": self.e_candidate,
            "d_y": self.d_y,
            "threshold": format!("p >= {} + (k-1)*{}", self.e_candidate, self.d_y),
            "k": serde_json::Value::Object(by_k),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanVerdict {
    Pass,
    Fail,
    Incomplete,
}

#[derive(Clone, Debug)]
pub struct ScanOutcome {
    pub table: CohomologyTable,
    pub verdict: ScanVerdict,
    pub threshold_formula: String,
    /// entries at or above the threshold that failed to vanish
    pub violations: Vec<(usize, i64, usize, u64)>,
    /// nonvanishing strictly below the threshold (tightness evidence only)
    pub tightness: Vec<(usize, i64, usize, u64)>,
    /// powers whose computation hit a resource cap
    pub incomplete: Vec<(usize, String)>,
}

/// Scan `H^i(I^k(p))` for `i > 0`, `1 <= k <= k_max`, `p` in a window of
/// radius `p_pad` around the threshold `e + (k-1) d_Y`. Pass means every
/// entry at or above the threshold vanishes. Resource caps yield an
/// `Incomplete` verdict rather than a failure.
pub fn vanishing_scan<K: Field>(
    label: &str,
    ideal: &GradedIdeal<K>,
    d_y: i64,
    e_candidate: i64,
    k_max: usize,
    p_pad: i64,
    limits: &ResourceLimits,
) -> Result<ScanOutcome, EngineError> {
    let order = MonomialOrder::GrevLex;
    let n = ideal.nvars() - 1;
    let mut table = CohomologyTable {
        label: label.to_string(),
        field: K::spec().to_string(),
        e_candidate,
        d_y,
        entries: BTreeMap::new(),
        windows: BTreeMap::new(),
    };
    let mut violations = Vec::new();
    let mut tightness = Vec::new();
    let mut incomplete = Vec::new();

    for k in 1..=k_max {
        let threshold = e_candidate + (k as i64 - 1) * d_y;
        let window = (threshold - p_pad, threshold + p_pad);
        table.windows.insert(k, window);
        let step = || -> Result<ModuleCohomology<K>, EngineError> {
            let power = ideal.power(k, limits).map_err(EngineError::from)?;
            let pres = GradedModulePresentation::module_of_ideal(&power, order, limits)?;
            ModuleCohomology::new(&pres, order, limits)
        };
        let mut engine = match step() {
            Ok(e) => e,
            Err(EngineError::Algebra(AlgebraError::ResourceExceeded { what })) => {
                incomplete.push((k, what));
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut hit_cap = false;
        'pp: for p in window.0..=window.1 {
            let mut euler: i64 = 0;
            for i in 0..=n {
                let h = match engine.sheaf_cohomology(i, p, limits) {
                    Ok(h) => h,
                    Err(EngineError::Algebra(AlgebraError::ResourceExceeded { what })) => {
                        incomplete.push((k, what));
                        hit_cap = true;
                        break 'pp;
                    }
                    Err(e) => return Err(e),
                };
                table.entries.insert((k, p, i), h);
                euler += if i % 2 == 0 { h as i64 } else { -(h as i64) };
                if i > 0 && h > 0 {
                    if p >= threshold {
                        violations.push((k, p, i, h));
                    } else {
                        tightness.push((k, p, i, h));
                    }
                }
            }
            let expected = engine.hilbert_poly_at(p);
            if euler != expected {
                return Err(EngineError::Algebra(AlgebraError::InternalCheck(format!(
                    "euler characteristic {euler} != hilbert polynomial {expected} at k={k}, p={p}"
                ))));
            }
        }
        let _ = hit_cap;
    }

    let verdict = if !violations.is_empty() {
        ScanVerdict::Fail
    } else if !incomplete.is_empty() {
        ScanVerdict::Incomplete
    } else {
        ScanVerdict::Pass
    };
    Ok(ScanOutcome {
        threshold_formula: format!("p >= {e_candidate} + (k-1)*{d_y}"),
        table,
        verdict,
        violations,
        tightness,
        incomplete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::F32003;
    use crate::poly::Polynomial;

    type P = Polynomial<F32003>;

    #[test]
    fn line_bundle_oracle_values() {
        assert_eq!(line_bundle_cohomology(3, -4, 3), 1);
        assert_eq!(line_bundle_cohomology(3, 2, 0), 10);
        for i in 0..=5 {
            assert_eq!(line_bundle_cohomology(5, -3, i), 0);
        }
    }

    #[test]
    fn full_ring_matches_line_bundles() {
        for n in 1..=4usize {
            let pres = GradedModulePresentation::<F32003>::free(n + 1, vec![0]);
            let mut engine =
                ModuleCohomology::new(&pres, MonomialOrder::GrevLex, &ResourceLimits::none())
                    .unwrap();
            for p in -8..=8i64 {
                for i in 0..=n {
                    assert_eq!(
                        engine
                            .sheaf_cohomology(i, p, &ResourceLimits::none())
                            .unwrap(),
                        line_bundle_cohomology(n, p, i),
                        "n={n} p={p} i={i}"
                    );
                }
            }
        }
    }

    #[test]
    fn principal_quadric_square_is_twisted_line_bundle() {
        // (q^2) for a rank-4 quadric in P^3: the sheaf is O(p - 4)
        let q = P::parse(4, "1*x0^1*x1^1+1*x2^1*x3^1").unwrap();
        let i2 = crate::ideal::GradedIdeal::new(4, vec![q])
            .unwrap()
            .power(2, &ResourceLimits::none())
            .unwrap();
        let pres = GradedModulePresentation::module_of_ideal(
            &i2,
            MonomialOrder::GrevLex,
            &ResourceLimits::none(),
        )
        .unwrap();
        let mut engine =
            ModuleCohomology::new(&pres, MonomialOrder::GrevLex, &ResourceLimits::none()).unwrap();
        for p in -6..=6i64 {
            for i in 0..=3usize {
                assert_eq!(
                    engine
                        .sheaf_cohomology(i, p, &ResourceLimits::none())
                        .unwrap(),
                    line_bundle_cohomology(3, p - 4, i),
                    "p={p} i={i}"
                );
            }
        }
        // the specific example: i = 1, p = 1 for q^2... O(-3) has no H^1
        assert_eq!(
            engine
                .sheaf_cohomology(1, 1, &ResourceLimits::none())
                .unwrap(),
            0
        );
    }

    #[test]
    fn quadric_surface_scan_tight_at_minus_one() {
        let q = P::parse(4, "1*x0^1*x3^1+-1*x1^1*x2^1").unwrap();
        let i = crate::ideal::GradedIdeal::new(4, vec![q]).unwrap();
        let out = vanishing_scan("segre:2x2", &i, 2, -1, 4, 6, &ResourceLimits::none()).unwrap();
        assert_eq!(out.verdict, ScanVerdict::Pass);
        // H^3 != 0 exactly one step below the threshold
        for k in 1..=4usize {
            let thr = -1 + (k as i64 - 1) * 2;
            assert!(out
                .tightness
                .iter()
                .any(|&(kk, p, i, _)| kk == k && p == thr - 1 && i == 3));
        }
    }
}
