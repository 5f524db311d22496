//! One-parameter families of skew 2-forms over a truncated discrete
//! valuation ring `K[t]/(t^T)`, their limit data (a flag of subspaces with
//! nondegenerate skew forms on the successive quotients), wedge-power
//! limits, and the smoothing construction inverse to data extraction.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::SkewError;
use crate::field::{Field, Ring};
use crate::matrix::{pfaffian_expansion, Mat, PolyMatrix};
use crate::poly::Polynomial;

/// Truncated power series in `t`: fixed-length coefficient vector.
#[derive(Clone, PartialEq, Eq, Debug)]
struct TPoly<K: Field> {
    c: Vec<K>,
}

impl<K: Field> TPoly<K> {
    fn zero(len: usize) -> Self {
        TPoly {
            c: vec![K::zero(); len],
        }
    }

    fn constant(v: K, len: usize) -> Self {
        let mut t = Self::zero(len);
        t.c[0] = v;
        t
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    fn add(&self, o: &Self) -> Self {
        let len = self.c.len().min(o.c.len());
        TPoly {
            c: (0..len).map(|i| self.c[i].add(&o.c[i])).collect(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        let len = self.c.len().min(o.c.len());
        let mut out = vec![K::zero(); len];
        for (i, a) in self.c.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        TPoly { c: out }
    }

    fn neg(&self) -> Self {
        TPoly {
            c: self.c.iter().map(|x| x.neg()).collect(),
        }
    }
}

/// A family of skew 2-forms: `coeffs[s]` is the coefficient matrix of `t^s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewFamily<K: Field> {
    pub dim: usize,
    pub trunc: usize,
    coeffs: Vec<Mat<K>>,
}

impl<K: Field> SkewFamily<K> {
    pub fn new(dim: usize, coeffs: Vec<Mat<K>>) -> Result<Self, SkewError> {
        let trunc = coeffs.len();
        if trunc == 0 {
            return Err(SkewError::Malformed("empty coefficient list".into()));
        }
        for (s, m) in coeffs.iter().enumerate() {
            if m.rows != dim || m.cols != dim {
                return Err(SkewError::Malformed(format!(
                    "coefficient {s} has shape {}x{}, expected {dim}x{dim}",
                    m.rows, m.cols
                )));
            }
            if !m.is_skew_symmetric() {
                return Err(SkewError::NotSkew(s));
            }
        }
        Ok(SkewFamily { dim, trunc, coeffs })
    }

    pub fn coefficient(&self, s: usize) -> &Mat<K> {
        &self.coeffs[s]
    }

    pub fn special_fiber(&self) -> &Mat<K> {
        &self.coeffs[0]
    }

    fn as_ext(&self) -> ExtElem<K> {
        let mut coeffs = BTreeMap::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let tp = TPoly {
                    c: (0..self.trunc)
                        .map(|s| self.coeffs[s].get(i, j).clone())
                        .collect(),
                };
                if !tp.is_zero() {
                    coeffs.insert(vec![i as u8, j as u8], tp);
                }
            }
        }
        ExtElem { coeffs }
    }

    /// Half the generic rank, to working precision: the largest `r` with
    /// a nonzero `r`-fold wedge.
    pub fn half_rank(&self) -> usize {
        let alpha = self.as_ext();
        let mut power = alpha.clone();
        let mut r = 0;
        while !power.is_zero() {
            r += 1;
            if 2 * (r + 1) > self.dim {
                break;
            }
            power = power.wedge(&alpha);
        }
        r
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let coeffs: Vec<serde_json::Value> = (0..self.trunc)
                            .map(|s| {
                                serde_json::Value::String(self.coeffs[s].get(i, j).to_string())
                            })
                            .collect();
                        serde_json::Value::Array(coeffs)
                    })
                    .collect::<Vec<_>>()
                    .into()
            })
            .collect();
        serde_json::json!({
            "dim": self.dim,
            "field": K::spec().to_string(),
            "truncation": self.trunc,
            "entries": entries,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, SkewError> {
        let bad = |m: &str| SkewError::Malformed(m.to_string());
        let dim = v["dim"].as_u64().ok_or_else(|| bad("missing dim"))? as usize;
        let trunc = v["truncation"].as_u64().unwrap_or(2 * dim as u64) as usize;
        let entries = v["entries"]
            .as_array()
            .ok_or_else(|| bad("missing entries"))?;
        if entries.len() != dim {
            return Err(bad("entry row count != dim"));
        }
        let mut coeffs = vec![Mat::zeros(dim, dim); trunc];
        for (i, row) in entries.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| bad("row is not an array"))?;
            if row.len() != dim {
                return Err(bad("entry column count != dim"));
            }
            for (j, cell) in row.iter().enumerate() {
                let cell = cell.as_array().ok_or_else(|| bad("cell is not an array"))?;
                for (s, c) in cell.iter().enumerate() {
                    if s >= trunc {
                        break;
                    }
                    let val = match c {
                        serde_json::Value::Number(n) => {
                            K::from_i64(n.as_i64().ok_or_else(|| bad("non-integer number"))?)
                        }
                        serde_json::Value::String(s) => {
                            K::parse(s).map_err(|e| bad(&e.to_string()))?
                        }
                        _ => return Err(bad("cell coefficient must be number or string")),
                    };
                    coeffs[s].set(i, j, val);
                }
            }
        }
        SkewFamily::new(dim, coeffs)
    }
}

/// Element of an exterior power with truncated-series coefficients; keys are
/// strictly increasing index tuples.
#[derive(Clone, Debug)]
struct ExtElem<K: Field> {
    coeffs: BTreeMap<Vec<u8>, TPoly<K>>,
}

impl<K: Field> ExtElem<K> {
    fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    fn wedge(&self, other: &ExtElem<K>) -> ExtElem<K> {
        let mut out: BTreeMap<Vec<u8>, TPoly<K>> = BTreeMap::new();
        for (ka, ca) in &self.coeffs {
            if ca.is_zero() {
                continue;
            }
            for (kb, cb) in &other.coeffs {
                if cb.is_zero() {
                    continue;
                }
                let Some((key, negative)) = merge_tuples(ka, kb) else {
                    continue;
                };
                let mut term = ca.mul(cb);
                if negative {
                    term = term.neg();
                }
                match out.get_mut(&key) {
                    Some(existing) => *existing = existing.add(&term),
                    None => {
                        out.insert(key, term);
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        ExtElem { coeffs: out }
    }

    fn min_valuation(&self) -> Option<usize> {
        self.coeffs.values().filter_map(|c| c.valuation()).min()
    }

    /// Coefficient-of-`t^s` slice as a scalar exterior element.
    fn slice(&self, s: usize) -> BTreeMap<Vec<u8>, K> {
        let mut out = BTreeMap::new();
        for (k, c) in &self.coeffs {
            if s < c.c.len() && !c.c[s].is_zero() {
                out.insert(k.clone(), c.c[s].clone());
            }
        }
        out
    }
}

fn merge_tuples(x: &[u8], y: &[u8]) -> Option<(Vec<u8>, bool)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut inversions = 0usize;
    while i < x.len() || j < y.len() {
        if j == y.len() {
            out.push(x[i]);
            i += 1;
        } else if i == x.len() {
            out.push(y[j]);
            j += 1;
        } else if x[i] < y[j] {
            out.push(x[i]);
            i += 1;
        } else if y[j] < x[i] {
            inversions += x.len() - i;
            out.push(y[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((out, inversions % 2 == 1))
}

/// Scale a scalar exterior element so its first nonzero coordinate (in the
/// fixed tuple ordering) equals 1, making equality-mod-scalar bit-exact.
pub fn normalize_mod_scalar<K: Field>(mut m: BTreeMap<Vec<u8>, K>) -> BTreeMap<Vec<u8>, K> {
    m.retain(|_, v| !v.is_zero());
    let Some(first) = m.values().next().cloned() else {
        return m;
    };
    let inv = first.inv().expect("nonzero leading coordinate");
    for v in m.values_mut() {
        *v = v.mul(&inv);
    }
    m
}

/// The `r`-fold wedge limit of a family: its minimal `t`-valuation `d_r`
/// and the (scalar-normalized) coefficient of `t^{d_r}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeLimit<K: Field> {
    pub r: usize,
    pub valuation: usize,
    pub limit: BTreeMap<Vec<u8>, K>,
}

pub fn wedge_power_limit<K: Field>(
    fam: &SkewFamily<K>,
    r: usize,
) -> Result<WedgeLimit<K>, SkewError> {
    let l = fam.half_rank();
    if r < 1 || r > l {
        return Err(SkewError::WedgeIndexTooLarge { r, l });
    }
    let alpha = fam.as_ext();
    let mut power = alpha.clone();
    for _ in 1..r {
        power = power.wedge(&alpha);
    }
    let Some(val) = power.min_valuation() else {
        return Err(SkewError::TruncationTooSmall {
            trunc: fam.trunc,
            what: format!("all coefficients of the {r}-fold wedge vanish to precision"),
        });
    };
    Ok(WedgeLimit {
        r,
        valuation: val,
        limit: normalize_mod_scalar(power.slice(val)),
    })
}

/// The flag-with-forms data extracted from a degenerating family: nested
/// kernels (canonical reduced-row-echelon bases, in ambient coordinates),
/// the successive residue forms (each on the previous flag member, modulo
/// scalar), and their ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewNormalData<K: Field> {
    pub dim: usize,
    /// `flag[i]` spans the kernel of `forms[i]`; dims strictly decrease to
    /// `dim - 2l`.
    pub flag: Vec<Mat<K>>,
    /// `forms[0]` lives on the ambient space, `forms[i]` on `flag[i-1]`.
    pub forms: Vec<Mat<K>>,
    /// `ranks[i] = rank(forms[i])`, summing to `2l`.
    pub ranks: Vec<usize>,
}

impl<K: Field> SkewNormalData<K> {
    pub fn new(
        dim: usize,
        flag: Vec<Mat<K>>,
        forms: Vec<Mat<K>>,
        ranks: Vec<usize>,
    ) -> Result<Self, SkewError> {
        let data = SkewNormalData {
            dim,
            flag,
            forms,
            ranks,
        };
        data.validate()?;
        Ok(data)
    }

    pub fn half_rank(&self) -> usize {
        self.ranks.iter().sum::<usize>() / 2
    }

    pub fn validate(&self) -> Result<(), SkewError> {
        let bad = |m: String| SkewError::Malformed(m);
        if self.forms.len() != self.flag.len() || self.forms.len() != self.ranks.len() {
            return Err(bad("flag, forms, ranks must have equal length".into()));
        }
        if self.forms.is_empty() {
            return Err(bad("data must contain at least one form".into()));
        }
        let l = self.dim / 2;
        if self.ranks.iter().sum::<usize>() != 2 * l {
            return Err(SkewError::RankInconsistent(format!(
                "ranks sum to {}, expected {}",
                self.ranks.iter().sum::<usize>(),
                2 * l
            )));
        }
        let mut prev_dim = self.dim;
        for (i, form) in self.forms.iter().enumerate() {
            if form.rows != prev_dim || form.cols != prev_dim {
                return Err(bad(format!("form {i} has wrong shape")));
            }
            if !form.is_skew_symmetric() {
                return Err(SkewError::NotSkew(i));
            }
            if form.rank() != self.ranks[i]
                || self.ranks[i] == 0
                || !self.ranks[i].is_multiple_of(2)
            {
                return Err(SkewError::RankInconsistent(format!(
                    "form {i} has rank {}, recorded {}",
                    form.rank(),
                    self.ranks[i]
                )));
            }
            let w = &self.flag[i];
            if w.cols != self.dim || w.rows != prev_dim - self.ranks[i] {
                return Err(bad(format!("flag member {i} has wrong shape")));
            }
            if *w != w.row_space_rref() {
                return Err(bad(format!(
                    "flag member {i} is not in reduced echelon form"
                )));
            }
            // kernel check: the flag member, in the coordinates of the
            // previous one, must be killed by the form
            let local = if i == 0 {
                w.clone()
            } else {
                coords_in(&self.flag[i - 1], w)
                    .ok_or_else(|| bad(format!("flag member {i} is not inside member {}", i - 1)))?
            };
            for row in 0..local.rows {
                for col in 0..form.cols {
                    let mut acc = K::zero();
                    for t in 0..form.rows {
                        acc = acc.add(&local.get(row, t).mul(form.get(t, col)));
                    }
                    if !acc.is_zero() {
                        return Err(bad(format!(
                            "flag member {i} is not in the kernel of form {i}"
                        )));
                    }
                }
            }
            prev_dim = w.rows;
        }
        if prev_dim != self.dim - 2 * l {
            return Err(SkewError::RankInconsistent(format!(
                "terminal flag dimension {prev_dim} != {}",
                self.dim - 2 * l
            )));
        }
        Ok(())
    }
}

impl<K: Field> SkewNormalData<K> {
    pub fn to_json(&self) -> serde_json::Value {
        let mat_json = |m: &Mat<K>| -> serde_json::Value {
            serde_json::Value::Array(
                (0..m.rows)
                    .map(|i| {
                        serde_json::Value::Array(
                            (0..m.cols)
                                .map(|j| serde_json::Value::String(m.get(i, j).to_string()))
                                .collect(),
                        )
                    })
                    .collect(),
            )
        };
        serde_json::json!({
            "dim": self.dim,
            "field": K::spec().to_string(),
            "ranks": self.ranks,
            "flag": self.flag.iter().map(mat_json).collect::<Vec<_>>(),
            "forms": self.forms.iter().map(mat_json).collect::<Vec<_>>(),
        })
    }
}

/// JSON view of a scalar exterior element (tuple-indexed coefficients).
pub fn ext_to_json<K: Field>(m: &BTreeMap<Vec<u8>, K>) -> serde_json::Value {
    serde_json::Value::Array(
        m.iter()
            .map(|(k, v)| {
                serde_json::json!({
                    "indices": k,
                    "coeff": v.to_string(),
                })
            })
            .collect(),
    )
}

/// Rows of `sub` expressed in the row basis of `space` (`None` when not
/// contained).
fn coords_in<K: Field>(space: &Mat<K>, sub: &Mat<K>) -> Option<Mat<K>> {
    let t = space.transpose();
    let mut rows = Vec::with_capacity(sub.rows);
    for i in 0..sub.rows {
        let x = t.solve(sub.row(i))?;
        rows.push(x);
    }
    Some(Mat::from_rows(rows))
}

fn normalize_form<K: Field>(m: &Mat<K>) -> Mat<K> {
    for i in 0..m.rows {
        for j in (i + 1)..m.cols {
            let v = m.get(i, j);
            if !v.is_zero() {
                let inv = v.inv().unwrap();
                return m.scale(&inv);
            }
        }
    }
    m.clone()
}

/// Iterated residue extraction: restrict to the kernel of the current
/// residue, divide by the maximal power of `t`, and recurse until the flag
/// exhausts the generic rank.
pub fn extract_normal_data<K: Field>(fam: &SkewFamily<K>) -> Result<SkewNormalData<K>, SkewError> {
    if fam.special_fiber().is_zero() {
        return Err(SkewError::ZeroSpecialFiber);
    }
    let l = fam.half_rank();
    let mut basis = Mat::<K>::identity(fam.dim);
    let mut flag = Vec::new();
    let mut forms = Vec::new();
    let mut ranks = Vec::new();
    let mut total = 0usize;
    let mut prev_val: Option<usize> = None;
    while total < l {
        // restricted family, recomputed from scratch in ambient coordinates
        let restricted: Vec<Mat<K>> = fam
            .coeffs
            .iter()
            .map(|f| basis.mul(f).mul(&basis.transpose()))
            .collect();
        let val = restricted.iter().position(|m| !m.is_zero());
        let Some(val) = val else {
            return Err(SkewError::TruncationTooSmall {
                trunc: fam.trunc,
                what: format!(
                    "restriction vanishes to precision with rank {total} of {l} accounted for"
                ),
            });
        };
        if let Some(pv) = prev_val {
            if val <= pv {
                return Err(SkewError::RankInconsistent(format!(
                    "valuation did not increase: {val} after {pv}"
                )));
            }
        }
        let residue = &restricted[val];
        let rank = residue.rank();
        if !rank.is_multiple_of(2) || rank == 0 {
            return Err(SkewError::RankInconsistent(format!(
                "residue rank {rank} at level {}",
                forms.len()
            )));
        }
        let kb = residue.kernel_basis();
        let kernel = if kb.is_empty() {
            Mat::zeros(0, residue.cols)
        } else {
            Mat::from_rows(kb)
        };
        let next_basis = kernel.mul(&basis).row_space_rref();
        forms.push(normalize_form(residue));
        ranks.push(rank);
        flag.push(next_basis.clone());
        total += rank / 2;
        prev_val = Some(val);
        basis = next_basis;
    }
    SkewNormalData::new(fam.dim, flag, forms, ranks)
}

/// A skew form on the ambient space restricting to `form` on the row space
/// of `basis` (zero extension, or seeded random extension blocks).
pub fn lift_form<K: Field>(
    dim: usize,
    basis: &Mat<K>,
    form: &Mat<K>,
    rng: Option<&mut ChaCha8Rng>,
) -> Mat<K> {
    let w = basis.rows;
    debug_assert_eq!(form.rows, w);
    if w == dim {
        return form.clone();
    }
    // complete the basis with unit vectors at non-pivot columns
    let (_, pivots) = basis.rref();
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    debug_assert_eq!(free.len(), dim - w);
    let mut rows = basis.rows_vec();
    for &c in &free {
        let mut r = vec![K::zero(); dim];
        r[c] = K::one();
        rows.push(r);
    }
    let p = Mat::from_rows(rows);
    let mut m_p = Mat::zeros(dim, dim);
    for i in 0..w {
        for j in 0..w {
            m_p.set(i, j, form.get(i, j).clone());
        }
    }
    if let Some(rng) = rng {
        for i in 0..w {
            for j in w..dim {
                let v = K::sample(rng);
                m_p.set(i, j, v.clone());
                m_p.set(j, i, v.neg());
            }
        }
        for i in w..dim {
            for j in (i + 1)..dim {
                let v = K::sample(rng);
                m_p.set(i, j, v.clone());
                m_p.set(j, i, v.neg());
            }
        }
    }
    let p_inv = p.inverse().expect("completed basis is invertible");
    let lifted = p_inv.mul(&m_p).mul(&p_inv.transpose());
    debug_assert_eq!(basis.mul(&lifted).mul(&basis.transpose()), *form);
    lifted
}

/// The smoothing family `α = α_0 + t·lift(α_1) + t²·lift(α_2) + ...`;
/// extraction recovers the input data exactly, for every lift choice.
pub fn smoothing<K: Field>(
    data: &SkewNormalData<K>,
    seed: u64,
    trunc: Option<usize>,
) -> Result<SkewFamily<K>, SkewError> {
    data.validate()?;
    let t = trunc.unwrap_or(2 * data.dim).max(data.forms.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Mat::zeros(data.dim, data.dim); t];
    for (i, form) in data.forms.iter().enumerate() {
        let lifted = if i == 0 {
            form.clone()
        } else {
            lift_form(data.dim, &data.flag[i - 1], form, Some(&mut rng))
        };
        coeffs[i] = lifted;
    }
    SkewFamily::new(data.dim, coeffs)
}

/// The greedy wedge `ω_r`: up to `rank_i/2` copies of (a lift of) each
/// successive form until `r` factors are taken. Nonzero for `r <= l` and
/// independent of the choice of lifts, modulo scalar.
pub fn omega<K: Field>(
    data: &SkewNormalData<K>,
    r: usize,
    lift_seed: Option<u64>,
) -> Result<BTreeMap<Vec<u8>, K>, SkewError> {
    data.validate()?;
    let l = data.half_rank();
    if r < 1 || r > l {
        return Err(SkewError::WedgeIndexTooLarge { r, l });
    }
    let mut rng = lift_seed.map(ChaCha8Rng::seed_from_u64);
    let mut factors: Vec<(usize, ExtElem<K>)> = Vec::new(); // (copies, lift)
    let mut remaining = r;
    for (i, form) in data.forms.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let copies = remaining.min(data.ranks[i] / 2);
        remaining -= copies;
        let lifted = if i == 0 {
            form.clone()
        } else {
            lift_form(data.dim, &data.flag[i - 1], form, rng.as_mut())
        };
        factors.push((copies, mat_to_ext(&lifted)));
    }
    debug_assert_eq!(remaining, 0);
    let mut acc: Option<ExtElem<K>> = None;
    for (copies, lift) in &factors {
        for _ in 0..*copies {
            acc = Some(match acc {
                None => lift.clone(),
                Some(a) => a.wedge(lift),
            });
        }
    }
    let acc = acc.expect("r >= 1");
    if acc.is_zero() {
        return Err(SkewError::RankInconsistent(format!(
            "omega_{r} vanished; the data is not consistent"
        )));
    }
    Ok(normalize_mod_scalar(acc.slice(0)))
}

fn mat_to_ext<K: Field>(m: &Mat<K>) -> ExtElem<K> {
    let mut coeffs = BTreeMap::new();
    for i in 0..m.rows {
        for j in (i + 1)..m.cols {
            let v = m.get(i, j);
            if !v.is_zero() {
                coeffs.insert(vec![i as u8, j as u8], TPoly::constant(v.clone(), 1));
            }
        }
    }
    ExtElem { coeffs }
}

/// Pfaffian of a scalar skew matrix by recursive first-row expansion.
pub fn pfaffian<K: Field>(m: &Mat<K>) -> Result<K, SkewError> {
    if m.rows != m.cols || !m.rows.is_multiple_of(2) {
        return Err(SkewError::OddDimension(m.rows));
    }
    if !m.is_skew_symmetric() {
        return Err(SkewError::NotSkew(0));
    }
    let idx: Vec<usize> = (0..m.rows).collect();
    Ok(pfaffian_expansion(&idx, &|a, b| m.get(a, b).clone()).unwrap_or_else(K::zero))
}

/// Pfaffian of a skew matrix of polynomials.
pub fn pfaffian_poly<K: Field>(m: &PolyMatrix<K>) -> Result<Polynomial<K>, SkewError> {
    if m.rows != m.cols || !m.rows.is_multiple_of(2) {
        return Err(SkewError::OddDimension(m.rows));
    }
    let nv = m.nvars();
    for i in 0..m.rows {
        for j in 0..m.cols {
            let s = m.get(i, j).add(m.get(j, i));
            if !s.is_zero() {
                return Err(SkewError::NotSkew(0));
            }
        }
    }
    let idx: Vec<usize> = (0..m.rows).collect();
    Ok(pfaffian_expansion(&idx, &|a, b| m.get(a, b).clone())
        .unwrap_or_else(|| Polynomial::zero(nv)))
}

/// Exhaustive enumeration helpers for small finite fields.
pub mod enumerate {
    use super::*;

    /// All subspaces of `K^n` of the given dimension, as canonical
    /// reduced-row-echelon bases.
    pub fn subspaces<K: Field>(n: usize, dim: usize) -> Vec<Mat<K>> {
        if dim == 0 {
            return vec![Mat::zeros(0, n)];
        }
        let count = K::element_count().expect("finite field") as usize;
        let mut out: Vec<Mat<K>> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let total = count.pow((dim * n) as u32);
        for code in 0..total {
            let mut c = code;
            let mut rows = Vec::with_capacity(dim);
            for _ in 0..dim {
                let mut row = Vec::with_capacity(n);
                for _ in 0..n {
                    row.push(K::element((c % count) as u64));
                    c /= count;
                }
                rows.push(row);
            }
            let m = Mat::from_rows(rows);
            if m.rank() != dim {
                continue;
            }
            let r = m.row_space_rref();
            if seen.insert(r.clone()) {
                out.push(r);
            }
        }
        out
    }

    /// All skew forms on `K^w` (modulo scalar) whose kernel is exactly the
    /// row space of `kernel` (given in the same coordinates).
    pub fn forms_with_kernel<K: Field>(w: usize, kernel: &Mat<K>) -> Vec<Mat<K>> {
        let count = K::element_count().expect("finite field") as usize;
        let pairs = w * (w - 1) / 2;
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let total = count.pow(pairs as u32);
        for code in 0..total {
            let mut c = code;
            let mut m = Mat::zeros(w, w);
            for i in 0..w {
                for j in (i + 1)..w {
                    let v = K::element((c % count) as u64);
                    c /= count;
                    m.set(i, j, v.clone());
                    m.set(j, i, v.neg());
                }
            }
            if m.rank() != w - kernel.rows {
                continue;
            }
            // kernel containment (dimensions then force equality)
            let mut ok = true;
            'rows: for r in 0..kernel.rows {
                for col in 0..w {
                    let mut acc = K::zero();
                    for t in 0..w {
                        acc = acc.add(&kernel.get(r, t).mul(m.get(t, col)));
                    }
                    if !acc.is_zero() {
                        ok = false;
                        break 'rows;
                    }
                }
            }
            if !ok {
                continue;
            }
            let n = super::normalize_form(&m);
            if seen.insert(n.clone()) {
                out.push(n);
            }
        }
        out
    }

    type FlagsAndForms<K> = (Vec<Mat<K>>, Vec<Mat<K>>);

    /// Every limit datum on `K^n` (flags and forms modulo scalar).
    pub fn normal_data<K: Field>(n: usize) -> Vec<SkewNormalData<K>> {
        let l = n / 2;
        let mut out = Vec::new();
        if l == 0 {
            return out;
        }
        // compositions of l into positive parts
        let mut compositions: Vec<Vec<usize>> = Vec::new();
        fn comps(left: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if left == 0 {
                out.push(acc.clone());
                return;
            }
            for first in 1..=left {
                acc.push(first);
                comps(left - first, acc, out);
                acc.pop();
            }
        }
        comps(l, &mut Vec::new(), &mut compositions);
        for comp in compositions {
            let mut partial: Vec<FlagsAndForms<K>> = vec![(vec![], vec![])];
            let mut prev_dim = n;
            for &rho in &comp {
                let next_dim = prev_dim - 2 * rho;
                let mut extended = Vec::new();
                for (flag, forms) in &partial {
                    // subspaces of the previous member, in ambient coords
                    let prev_basis: Mat<K> =
                        flag.last().cloned().unwrap_or_else(|| Mat::identity(n));
                    for local_kernel in subspaces::<K>(prev_dim, next_dim) {
                        let global = local_kernel.mul(&prev_basis).row_space_rref();
                        for form in forms_with_kernel::<K>(prev_dim, &local_kernel) {
                            let mut new_flag = flag.clone();
                            new_flag.push(global.clone());
                            let mut new_forms = forms.clone();
                            new_forms.push(form);
                            extended.push((new_flag, new_forms));
                        }
                    }
                }
                partial = extended;
                prev_dim = next_dim;
            }
            for (flag, forms) in partial {
                let ranks: Vec<usize> = comp.iter().map(|&r| 2 * r).collect();
                let data =
                    SkewNormalData::new(n, flag, forms, ranks).expect("enumerated data validates");
                out.push(data);
            }
        }
        out
    }
}

/// A seeded random limit datum (random rank composition, nested subspaces,
/// and forms with prescribed kernels).
pub fn random_normal_data<K: Field>(n: usize, rng: &mut ChaCha8Rng) -> SkewNormalData<K> {
    let l = n / 2;
    assert!(l >= 1);
    // random composition of l
    let mut comp = Vec::new();
    let mut left = l;
    while left > 0 {
        let take = rng.gen_range(1..=left);
        comp.push(take);
        left -= take;
    }
    let mut flag: Vec<Mat<K>> = Vec::new();
    let mut forms: Vec<Mat<K>> = Vec::new();
    let mut prev_basis = Mat::<K>::identity(n);
    for &rho in &comp {
        let w = prev_basis.rows;
        let next_dim = w - 2 * rho;
        // random local kernel of dimension next_dim
        let local_kernel = loop {
            let m = Mat::from_fn(next_dim, w, |_, _| K::sample(rng));
            if m.rank() == next_dim {
                break m.row_space_rref();
            }
            if next_dim == 0 {
                break Mat::zeros(0, w);
            }
        };
        // random form on K^w with that kernel
        let form = loop {
            let candidate = random_form_with_kernel(w, &local_kernel, rng);
            if candidate.rank() == 2 * rho {
                break normalize_form(&candidate);
            }
        };
        let global = local_kernel.mul(&prev_basis).row_space_rref();
        flag.push(global.clone());
        forms.push(form);
        prev_basis = global;
    }
    let ranks: Vec<usize> = comp.iter().map(|&r| 2 * r).collect();
    SkewNormalData::new(n, flag, forms, ranks).expect("random data validates")
}

fn random_form_with_kernel<K: Field>(w: usize, kernel: &Mat<K>, rng: &mut ChaCha8Rng) -> Mat<K> {
    // block form in a completed basis: nondegenerate on the complement
    let rank = w - kernel.rows;
    let (_, pivots) = kernel.rref();
    let free: Vec<usize> = (0..w).filter(|c| !pivots.contains(c)).collect();
    let mut rows = Vec::new();
    for &c in &free {
        let mut r = vec![K::zero(); w];
        r[c] = K::one();
        rows.push(r);
    }
    rows.extend(kernel.rows_vec());
    let p = Mat::from_rows(rows);
    let mut m_p = Mat::zeros(w, w);
    for i in 0..rank {
        for j in (i + 1)..rank {
            let v = K::sample(rng);
            m_p.set(i, j, v.clone());
            m_p.set(j, i, v.neg());
        }
    }
    let p_inv = p.inverse().expect("completed basis invertible");
    p_inv.mul(&m_p).mul(&p_inv.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{F3, F32003};

    type K = F32003;

    fn standard_family(n: usize, blocks: &[(usize, usize, usize)], trunc: usize) -> SkewFamily<K> {
        // blocks: (i, j, power) meaning t^power * x_i ∧ x_j
        let mut coeffs = vec![Mat::zeros(n, n); trunc];
        for &(i, j, s) in blocks {
            coeffs[s].set(i, j, K::one());
            coeffs[s].set(j, i, K::one().neg());
        }
        SkewFamily::new(n, coeffs).unwrap()
    }

    #[test]
    fn wedge_limit_standard_four() {
        // x0∧x1 + t x2∧x3: square has valuation 1, limit the top form
        let fam = standard_family(4, &[(0, 1, 0), (2, 3, 1)], 8);
        let w = wedge_power_limit(&fam, 2).unwrap();
        assert_eq!(w.valuation, 1);
        assert_eq!(w.limit.len(), 1);
        assert!(w.limit.contains_key(&vec![0u8, 1, 2, 3]));
        // r = 1 is the family itself at its minimal valuation
        let w1 = wedge_power_limit(&fam, 1).unwrap();
        assert_eq!(w1.valuation, 0);
    }

    #[test]
    fn wedge_limit_three_blocks() {
        let fam = standard_family(6, &[(0, 1, 0), (2, 3, 1), (4, 5, 2)], 12);
        let w = wedge_power_limit(&fam, 3).unwrap();
        assert_eq!(w.valuation, 3);
        assert!(w.limit.contains_key(&vec![0u8, 1, 2, 3, 4, 5]));
        assert_eq!(w.limit.len(), 1);
    }

    #[test]
    fn truncation_error_reported() {
        let fam = standard_family(4, &[(0, 1, 0), (2, 3, 3)], 4);
        // the square has valuation 3 < 4, fine; cut precision to 3
        let tight =
            SkewFamily::new(4, (0..3).map(|s| fam.coefficient(s).clone()).collect()).unwrap();
        // half_rank already sees rank 2 only, so r = 2 is rejected
        assert!(matches!(
            wedge_power_limit(&tight, 2),
            Err(SkewError::WedgeIndexTooLarge { .. })
        ));
    }

    #[test]
    fn extract_standard_four() {
        let fam = standard_family(4, &[(0, 1, 0), (2, 3, 1)], 8);
        let data = extract_normal_data(&fam).unwrap();
        assert_eq!(data.ranks, vec![2, 2]);
        assert_eq!(data.flag.len(), 2);
        assert_eq!(data.flag[0].rows, 2);
        assert_eq!(data.flag[1].rows, 0);
        // kernel of x0∧x1 is span(e2, e3)
        let expect = Mat::from_rows(vec![
            vec![K::zero(), K::zero(), K::one(), K::zero()],
            vec![K::zero(), K::zero(), K::zero(), K::one()],
        ]);
        assert_eq!(data.flag[0], expect);
    }

    #[test]
    fn extract_nondegenerate_is_single_step() {
        let fam = standard_family(4, &[(0, 1, 0), (2, 3, 0)], 8);
        let data = extract_normal_data(&fam).unwrap();
        assert_eq!(data.ranks, vec![4]);
        assert_eq!(data.flag[0].rows, 0);
    }

    #[test]
    fn extract_three_step() {
        let fam = standard_family(6, &[(0, 1, 0), (2, 3, 1), (4, 5, 2)], 12);
        let data = extract_normal_data(&fam).unwrap();
        assert_eq!(data.ranks, vec![2, 2, 2]);
        let dims: Vec<usize> = data.flag.iter().map(|f| f.rows).collect();
        assert_eq!(dims, vec![4, 2, 0]);
    }

    #[test]
    fn smoothing_roundtrip_with_random_lifts() {
        let fam = standard_family(6, &[(0, 1, 0), (2, 3, 1), (4, 5, 2)], 12);
        let data = extract_normal_data(&fam).unwrap();
        for seed in [1u64, 2, 3] {
            let smooth = smoothing(&data, seed, None).unwrap();
            let back = extract_normal_data(&smooth).unwrap();
            assert_eq!(back, data, "seed {seed}");
        }
    }

    #[test]
    fn omega_matches_wedge_limit() {
        let fam = standard_family(6, &[(0, 1, 0), (2, 3, 1), (4, 5, 2)], 12);
        let data = extract_normal_data(&fam).unwrap();
        for r in 1..=3usize {
            let om = omega(&data, r, Some(11)).unwrap();
            let wl = wedge_power_limit(&fam, r).unwrap();
            assert_eq!(om, wl.limit, "r = {r}");
            // lift independence
            let om2 = omega(&data, r, Some(99)).unwrap();
            assert_eq!(om, om2);
            let om0 = omega(&data, r, None).unwrap();
            assert_eq!(om, om0);
        }
    }

    #[test]
    fn pfaffian_conventions() {
        let mut m = Mat::zeros(2, 2);
        m.set(0, 1, K::from_i64(7));
        m.set(1, 0, K::from_i64(-7));
        assert_eq!(pfaffian(&m).unwrap(), K::from_i64(7));
        // block diagonal multiplies
        let mut b = Mat::zeros(4, 4);
        b.set(0, 1, K::from_i64(3));
        b.set(1, 0, K::from_i64(-3));
        b.set(2, 3, K::from_i64(5));
        b.set(3, 2, K::from_i64(-5));
        assert_eq!(pfaffian(&b).unwrap(), K::from_i64(15));
        let odd = Mat::<K>::zeros(3, 3);
        assert!(pfaffian(&odd).is_err());
    }

    #[test]
    fn exhaustive_enumeration_small() {
        // over F_3 on K^3: 13 lines, each with one form mod scalar
        let data = enumerate::normal_data::<F3>(3);
        assert_eq!(data.len(), 13);
        for d in &data {
            assert!(d.validate().is_ok());
        }
    }

    #[test]
    fn family_json_roundtrip() {
        let fam = standard_family(4, &[(0, 1, 0), (2, 3, 1)], 6);
        let j = fam.to_json();
        let back = SkewFamily::<K>::from_json(&j).unwrap();
        assert_eq!(back, fam);
    }
}
