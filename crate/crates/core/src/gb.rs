//! Buchberger's algorithm over free graded modules, with transformation
//! tracking so that zero reductions of S-pairs yield syzygies of the input
//! generators (the lifted-Gröbner procedure).
//!
//! Normal selection strategy: S-pairs are processed by ascending degree of
//! the lcm. Both classical pair criteria are applied for plain ideal bases;
//! in syzygy-tracking mode every pair is processed, since each zero
//! reduction is a needed generator of the syzygy module.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::time::Instant;

use crate::error::AlgebraError;
use crate::field::{Field, Ring};
use crate::monomial::{Monomial, MonomialOrder};
use crate::poly::Polynomial;

/// Degree and wall-time caps for Gröbner-driven computations. Exceeding a cap
/// is reported as an error that callers surface as an "incomplete" verdict.
#[derive(Debug, Clone, Copy)]
pub struct ResourceLimits {
    pub max_degree: Option<i64>,
    pub deadline: Option<Instant>,
}

impl ResourceLimits {
    pub fn none() -> Self {
        ResourceLimits {
            max_degree: None,
            deadline: None,
        }
    }

    pub fn with_max_degree(d: i64) -> Self {
        ResourceLimits {
            max_degree: Some(d),
            deadline: None,
        }
    }

    pub fn check(&self, degree: i64, what: &str) -> Result<(), AlgebraError> {
        if let Some(cap) = self.max_degree {
            if degree > cap {
                return Err(AlgebraError::ResourceExceeded {
                    what: format!("{what}: degree {degree} > cap {cap}"),
                });
            }
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() > deadline {
                return Err(AlgebraError::ResourceExceeded {
                    what: format!("{what}: wall-time cap"),
                });
            }
        }
        Ok(())
    }
}

impl Default for ResourceLimits {
    fn default() -> Self {
        Self::none()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct ModTerm<K: Field> {
    pub comp: usize,
    pub mono: Monomial,
    pub coeff: K,
}

/// Element of a free module, terms strictly descending under the active order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct ModPoly<K: Field> {
    pub terms: Vec<ModTerm<K>>,
}

/// Free-module context: ambient variable count, monomial order and the twist
/// of each component (degree of a term = monomial degree + twist).
#[derive(Clone, Debug)]
pub(crate) struct ModCtx {
    pub nvars: usize,
    pub order: MonomialOrder,
    pub twists: Vec<i64>,
}

impl ModCtx {
    pub fn ideal(nvars: usize, order: MonomialOrder) -> Self {
        ModCtx {
            nvars,
            order,
            twists: vec![0],
        }
    }

    /// Term-over-position: monomials first, lower component wins ties.
    fn term_cmp<K: Field>(&self, a: &ModTerm<K>, b: &ModTerm<K>) -> Ordering {
        match self.order.cmp(&a.mono, &b.mono) {
            Ordering::Equal => b.comp.cmp(&a.comp),
            ord => ord,
        }
    }
}

impl<K: Field> ModPoly<K> {
    pub fn zero() -> Self {
        ModPoly { terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<&ModTerm<K>> {
        self.terms.first()
    }

    pub fn unit(comp: usize, nvars: usize) -> Self {
        ModPoly {
            terms: vec![ModTerm {
                comp,
                mono: Monomial::one(nvars),
                coeff: K::one(),
            }],
        }
    }

    pub fn from_column(col: &[Polynomial<K>], ctx: &ModCtx) -> Self {
        let mut terms = Vec::new();
        for (comp, p) in col.iter().enumerate() {
            for (m, c) in p.terms() {
                terms.push(ModTerm {
                    comp,
                    mono: m.clone(),
                    coeff: c.clone(),
                });
            }
        }
        terms.sort_by(|a, b| ctx.term_cmp(b, a));
        ModPoly { terms }
    }

    pub fn to_column(&self, ncomps: usize, nvars: usize) -> Vec<Polynomial<K>> {
        let mut col = vec![Polynomial::zero(nvars); ncomps];
        for t in &self.terms {
            col[t.comp].add_term(&t.mono, &t.coeff);
        }
        col
    }

    pub fn scale(&self, c: &K) -> Self {
        ModPoly {
            terms: self
                .terms
                .iter()
                .map(|t| ModTerm {
                    comp: t.comp,
                    mono: t.mono.clone(),
                    coeff: t.coeff.mul(c),
                })
                .collect(),
        }
    }

    /// `self - c * x^shift * other`, both inputs sorted.
    pub fn sub_scaled(&self, other: &Self, c: &K, shift: &Monomial, ctx: &ModCtx) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut i = 0;
        let mut j = 0;
        while i < self.terms.len() || j < other.terms.len() {
            if j == other.terms.len() {
                out.push(self.terms[i].clone());
                i += 1;
                continue;
            }
            let ot = &other.terms[j];
            let shifted = ModTerm {
                comp: ot.comp,
                mono: ot.mono.mul(shift),
                coeff: ot.coeff.mul(c).neg(),
            };
            if i == self.terms.len() {
                if !shifted.coeff.is_zero() {
                    out.push(shifted);
                }
                j += 1;
                continue;
            }
            match ctx.term_cmp(&self.terms[i], &shifted) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    if !shifted.coeff.is_zero() {
                        out.push(shifted);
                    }
                    j += 1;
                }
                Ordering::Equal => {
                    let s = self.terms[i].coeff.add(&shifted.coeff);
                    if !s.is_zero() {
                        out.push(ModTerm {
                            comp: shifted.comp,
                            mono: shifted.mono,
                            coeff: s,
                        });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        ModPoly { terms: out }
    }
}

struct Entry<K: Field> {
    poly: ModPoly<K>, // monic
    rep: ModPoly<K>,  // expression in terms of the input generators
}

/// Full normal form of `f` (every term reduced) against monic `basis`,
/// updating the transformation vector alongside.
fn reduce_full<K: Field>(
    f: ModPoly<K>,
    rep: ModPoly<K>,
    basis: &[Entry<K>],
    by_comp: &HashMap<usize, Vec<usize>>,
    ctx: &ModCtx,
    rep_ctx: &ModCtx,
) -> (ModPoly<K>, ModPoly<K>) {
    let mut work = f;
    let mut rep = rep;
    let mut out: Vec<ModTerm<K>> = Vec::new();
    'outer: while let Some(lead) = work.lead().cloned() {
        if let Some(indices) = by_comp.get(&lead.comp) {
            for &gi in indices {
                let g = &basis[gi];
                let glead = g.poly.lead().unwrap();
                if let Some(shift) = lead.mono.try_div(&glead.mono) {
                    work = work.sub_scaled(&g.poly, &lead.coeff, &shift, ctx);
                    rep = rep.sub_scaled(&g.rep, &lead.coeff, &shift, rep_ctx);
                    continue 'outer;
                }
            }
        }
        // irreducible lead: move it to the output
        out.push(work.terms.remove(0));
    }
    (ModPoly { terms: out }, rep)
}

pub(crate) struct GbOutput<K: Field> {
    pub basis: Vec<ModPoly<K>>,
    /// One element of the rank-`gens.len()` free module per zero reduction.
    pub syzygies: Vec<ModPoly<K>>,
}

/// Buchberger over the free module described by `ctx`. With `track` the
/// syzygies of the inputs are collected; criteria are only applied when not
/// tracking (every zero reduction is then a wanted syzygy generator).
pub(crate) fn buchberger<K: Field>(
    gens: &[ModPoly<K>],
    ctx: &ModCtx,
    limits: &ResourceLimits,
    track: bool,
    criteria: bool,
) -> Result<GbOutput<K>, AlgebraError> {
    let rep_ctx = ModCtx {
        nvars: ctx.nvars,
        order: ctx.order,
        twists: vec![0; gens.len()],
    };
    let mut basis: Vec<Entry<K>> = Vec::new();
    let mut by_comp: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut syzygies: Vec<ModPoly<K>> = Vec::new();
    let mut pairs: BinaryHeap<std::cmp::Reverse<(i64, usize, usize)>> = BinaryHeap::new();
    let mut done: HashSet<(usize, usize)> = HashSet::new();

    let push_element = |basis: &mut Vec<Entry<K>>,
                        by_comp: &mut HashMap<usize, Vec<usize>>,
                        pairs: &mut BinaryHeap<std::cmp::Reverse<(i64, usize, usize)>>,
                        poly: ModPoly<K>,
                        rep: ModPoly<K>| {
        let lead = poly.lead().unwrap().clone();
        let inv = lead.coeff.inv().expect("field");
        let poly = poly.scale(&inv);
        let rep = rep.scale(&inv);
        let idx = basis.len();
        for &other in by_comp.get(&lead.comp).into_iter().flatten() {
            let olead = basis[other].poly.lead().unwrap();
            let lcm = lead.mono.lcm(&olead.mono);
            let deg = lcm.degree() as i64 + ctx.twists[lead.comp];
            pairs.push(std::cmp::Reverse((deg, other, idx)));
        }
        by_comp.entry(lead.comp).or_default().push(idx);
        basis.push(Entry { poly, rep });
    };

    for (i, g) in gens.iter().enumerate() {
        let rep = ModPoly::unit(i, ctx.nvars);
        if g.is_zero() {
            if track {
                syzygies.push(rep);
            }
            continue;
        }
        // interreduce inputs up front so duplicates become syzygies
        let (nf, rep) = reduce_full(g.clone(), rep, &basis, &by_comp, ctx, &rep_ctx);
        if nf.is_zero() {
            if track {
                syzygies.push(rep);
            }
            continue;
        }
        push_element(&mut basis, &mut by_comp, &mut pairs, nf, rep);
    }

    let mut steps = 0u64;
    while let Some(std::cmp::Reverse((deg, i, j))) = pairs.pop() {
        steps += 1;
        if steps.is_multiple_of(64) || limits.max_degree.is_some() {
            limits.check(deg, "buchberger")?;
        }
        let (li, lj) = (
            basis[i].poly.lead().unwrap().clone(),
            basis[j].poly.lead().unwrap().clone(),
        );
        debug_assert_eq!(li.comp, lj.comp);
        let lcm = li.mono.lcm(&lj.mono);
        if criteria && !track {
            // product criterion (valid for ideals, not for higher-rank modules)
            if ctx.twists.len() == 1 && li.mono.coprime(&lj.mono) {
                done.insert((i, j));
                continue;
            }
            // chain criterion
            let mut skip = false;
            for &k in by_comp.get(&li.comp).into_iter().flatten() {
                if k == i || k == j {
                    continue;
                }
                let lk = basis[k].poly.lead().unwrap();
                if lk.mono.divides(&lcm) {
                    let p1 = (i.min(k), i.max(k));
                    let p2 = (j.min(k), j.max(k));
                    if done.contains(&p1) && done.contains(&p2) {
                        skip = true;
                        break;
                    }
                }
            }
            if skip {
                done.insert((i, j));
                continue;
            }
        }
        let si = lcm.try_div(&li.mono).unwrap();
        let sj = lcm.try_div(&lj.mono).unwrap();
        // basis is monic: S = x^si * g_i - x^sj * g_j
        let zero = ModPoly::zero();
        let spoly = zero
            .sub_scaled(&basis[i].poly, &K::one().neg(), &si, ctx)
            .sub_scaled(&basis[j].poly, &K::one(), &sj, ctx);
        let srep = zero
            .sub_scaled(&basis[i].rep, &K::one().neg(), &si, &rep_ctx)
            .sub_scaled(&basis[j].rep, &K::one(), &sj, &rep_ctx);
        done.insert((i, j));
        let (nf, rep) = reduce_full(spoly, srep, &basis, &by_comp, ctx, &rep_ctx);
        if nf.is_zero() {
            if track {
                syzygies.push(rep);
            }
        } else {
            push_element(&mut basis, &mut by_comp, &mut pairs, nf, rep);
        }
    }

    Ok(GbOutput {
        basis: basis.into_iter().map(|e| e.poly).collect(),
        syzygies,
    })
}

/// Tail-reduce a basis against itself to the unique reduced Gröbner basis.
pub(crate) fn interreduce<K: Field>(mut basis: Vec<ModPoly<K>>, ctx: &ModCtx) -> Vec<ModPoly<K>> {
    let rep_ctx = ModCtx {
        nvars: ctx.nvars,
        order: ctx.order,
        twists: vec![],
    };
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < basis.len() {
            let f = basis[i].clone();
            let others: Vec<Entry<K>> = basis
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, p)| Entry {
                    poly: p.clone(),
                    rep: ModPoly::zero(),
                })
                .collect();
            let mut by_comp: HashMap<usize, Vec<usize>> = HashMap::new();
            for (k, e) in others.iter().enumerate() {
                by_comp
                    .entry(e.poly.lead().unwrap().comp)
                    .or_default()
                    .push(k);
            }
            let (nf, _) = reduce_full(f.clone(), ModPoly::zero(), &others, &by_comp, ctx, &rep_ctx);
            if nf.is_zero() {
                basis.remove(i);
                changed = true;
                continue;
            }
            if nf != f {
                let inv = nf.lead().unwrap().coeff.inv().unwrap();
                basis[i] = nf.scale(&inv);
                changed = true;
            }
            i += 1;
        }
        if !changed {
            break;
        }
    }
    for p in basis.iter_mut() {
        let inv = p.lead().unwrap().coeff.inv().unwrap();
        *p = p.scale(&inv);
    }
    basis.sort_by(|a, b| ctx.term_cmp(b.lead().unwrap(), a.lead().unwrap()));
    basis
}

fn ideal_to_modpolys<K: Field>(
    gens: &[Polynomial<K>],
    ctx: &ModCtx,
) -> Result<Vec<ModPoly<K>>, AlgebraError> {
    let mut out = Vec::with_capacity(gens.len());
    for g in gens {
        if g.nvars() != ctx.nvars {
            return Err(AlgebraError::VariableCountMismatch {
                left: g.nvars(),
                right: ctx.nvars,
            });
        }
        out.push(ModPoly::from_column(std::slice::from_ref(g), ctx));
    }
    Ok(out)
}

/// Reduced Gröbner basis of the ideal generated by `gens`. Each input
/// generator is reconfirmed to reduce to zero against the result.
pub fn groebner_basis<K: Field>(
    gens: &[Polynomial<K>],
    order: MonomialOrder,
    limits: &ResourceLimits,
) -> Result<Vec<Polynomial<K>>, AlgebraError> {
    let nvars = gens.first().map(|g| g.nvars()).unwrap_or(0);
    let ctx = ModCtx::ideal(nvars, order);
    let input = ideal_to_modpolys(gens, &ctx)?;
    let out = buchberger(&input, &ctx, limits, false, true)?;
    let reduced = interreduce(out.basis, &ctx);
    let basis: Vec<Polynomial<K>> = reduced
        .iter()
        .map(|p| p.to_column(1, nvars).pop().unwrap())
        .collect();
    for g in gens {
        let nf = normal_form(g, &basis, order)?;
        if !nf.is_zero() {
            return Err(AlgebraError::InternalCheck(format!(
                "input generator does not reduce to zero against its own basis: {g}"
            )));
        }
    }
    Ok(basis)
}

/// Remainder of `f` under multivariate division by `basis`; zero iff `f`
/// lies in the ideal generated by a Gröbner basis `basis`.
pub fn normal_form<K: Field>(
    f: &Polynomial<K>,
    basis: &[Polynomial<K>],
    order: MonomialOrder,
) -> Result<Polynomial<K>, AlgebraError> {
    let nvars = f.nvars();
    for g in basis {
        if g.nvars() != nvars {
            return Err(AlgebraError::VariableCountMismatch {
                left: nvars,
                right: g.nvars(),
            });
        }
    }
    let ctx = ModCtx::ideal(nvars, order);
    let entries: Vec<Entry<K>> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| {
            let mp = ModPoly::from_column(std::slice::from_ref(g), &ctx);
            let inv = mp.lead().unwrap().coeff.inv().unwrap();
            Entry {
                poly: mp.scale(&inv),
                rep: ModPoly::zero(),
            }
        })
        .collect();
    let mut by_comp: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, _) in entries.iter().enumerate() {
        by_comp.entry(0).or_default().push(k);
    }
    let rep_ctx = ModCtx::ideal(nvars, order);
    let f_mp = ModPoly::from_column(std::slice::from_ref(f), &ctx);
    let (nf, _) = reduce_full(f_mp, ModPoly::zero(), &entries, &by_comp, &ctx, &rep_ctx);
    Ok(nf.to_column(1, nvars).pop().unwrap())
}
