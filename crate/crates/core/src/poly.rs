//! Sparse multivariate polynomials over an exact field.
//!
//! The plain-text format is `coeff*x0^e0*...*xn^en` with zero exponents
//! omitted, terms joined by `+`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::AlgebraError;
use crate::field::{Field, Ring};
use crate::monomial::{Monomial, MonomialOrder};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<K: Field> {
    nvars: usize,
    terms: BTreeMap<Monomial, K>,
}

impl<K: Field> Polynomial<K> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: K) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, K::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from_term(Monomial::var(nvars, i), K::one())
    }

    pub fn from_term(m: Monomial, c: K) -> Self {
        let mut p = Self::zero(m.nvars());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, K)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(&m, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &K)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&K> {
        self.terms.get(m)
    }

    pub fn add_term(&mut self, m: &Monomial, c: &K) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.nvars(), self.nvars);
        match self.terms.get_mut(m) {
            Some(existing) => {
                let s = existing.add(c);
                if s.is_zero() {
                    self.terms.remove(m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m.clone(), c.clone());
            }
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.mul(c)))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(mm, c)| (mm.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Degree when homogeneous (`None` for the zero polynomial).
    pub fn homogeneous_degree(&self) -> Result<Option<u32>, AlgebraError> {
        let mut it = self.terms.keys();
        let first = match it.next() {
            None => return Ok(None),
            Some(m) => m.degree(),
        };
        for m in it {
            if m.degree() != first {
                return Err(AlgebraError::NotHomogeneous(self.to_string()));
            }
        }
        Ok(Some(first))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous_degree().is_ok()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// Nonzero constant, i.e. a unit of the graded ring.
    pub fn is_unit_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one()
    }

    pub fn constant_part(&self) -> K {
        self.terms
            .get(&Monomial::one(self.nvars))
            .cloned()
            .unwrap_or_else(K::zero)
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &K)> {
        self.terms.iter().max_by(|(a, _), (b, _)| order.cmp(a, b))
    }

    pub fn monic(&self, order: MonomialOrder) -> Self {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.inv().expect("leading coefficient invertible");
                self.scale(&inv)
            }
        }
    }

    pub fn eval(&self, point: &[K]) -> K {
        assert_eq!(point.len(), self.nvars);
        let mut acc = K::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&point[i]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn partial_derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[var] -= 1;
            let coeff = c.mul(&K::from_i64(e as i64));
            out.add_term(&Monomial::from_exps(exps), &coeff);
        }
        out
    }

    /// Substitute `images[i]` for variable `i`. Images share a variable count.
    pub fn compose(&self, images: &[Polynomial<K>]) -> Polynomial<K> {
        assert_eq!(images.len(), self.nvars);
        let out_nvars = images.first().map(|p| p.nvars()).unwrap_or(self.nvars);
        // cache powers per variable
        let mut powers: Vec<Vec<Polynomial<K>>> = images
            .iter()
            .map(|p| vec![Polynomial::one(out_nvars), p.clone()])
            .collect();
        let mut out = Polynomial::zero(out_nvars);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(out_nvars, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap().mul(&images[i]);
                    cache.push(next);
                }
                t = t.mul(&cache[e as usize]);
            }
            out = out.add(&t);
        }
        out
    }

    /// Translate the point `a` to the origin: `f(x + a)`.
    pub fn taylor_shift(&self, a: &[K]) -> Polynomial<K> {
        assert_eq!(a.len(), self.nvars);
        let images: Vec<Polynomial<K>> = (0..self.nvars)
            .map(|i| {
                let mut p = Polynomial::var(self.nvars, i);
                p.add_term(&Monomial::one(self.nvars), &a[i]);
                p
            })
            .collect();
        self.compose(&images)
    }

    /// Set variable `var` to a scalar, keeping the variable count.
    pub fn substitute(&self, var: usize, value: &K) -> Polynomial<K> {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(var);
            let mut coeff = c.clone();
            for _ in 0..e {
                coeff = coeff.mul(value);
            }
            if coeff.is_zero() {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[var] = 0;
            out.add_term(&Monomial::from_exps(exps), &coeff);
        }
        out
    }

    /// Coefficients as a univariate in `var`, if no other variable occurs.
    pub fn univariate_in(&self, var: usize) -> Option<Vec<K>> {
        let mut deg = 0usize;
        for m in self.terms.keys() {
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 && i != var {
                    return None;
                }
            }
            deg = deg.max(m.exp(var) as usize);
        }
        let mut coeffs = vec![K::zero(); deg + 1];
        for (m, c) in &self.terms {
            coeffs[m.exp(var) as usize] = c.clone();
        }
        Some(coeffs)
    }

    pub fn parse(nvars: usize, input: &str) -> Result<Self, AlgebraError> {
        let bad = |reason: &str| AlgebraError::BadPolynomial {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let cleaned: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(bad("empty"));
        }
        let mut p = Self::zero(nvars);
        if cleaned == "0" {
            return Ok(p);
        }
        for term in cleaned.split('+') {
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let mut coeff = K::one();
            let mut exps = vec![0u16; nvars];
            let mut saw_coeff = false;
            for factor in term.split('*') {
                if let Some(rest) = factor.strip_prefix('x') {
                    let (var_s, exp_s) = match rest.split_once('^') {
                        Some((v, e)) => (v, Some(e)),
                        None => (rest, None),
                    };
                    let var: usize = var_s.parse().map_err(|_| bad("bad variable index"))?;
                    if var >= nvars {
                        return Err(bad("variable index out of range"));
                    }
                    let e: u16 = match exp_s {
                        Some(e) => e.parse().map_err(|_| bad("bad exponent"))?,
                        None => 1,
                    };
                    exps[var] += e;
                } else {
                    coeff = coeff.mul(&K::parse(factor)?);
                    saw_coeff = true;
                }
            }
            if !saw_coeff && term.starts_with('-') {
                return Err(bad("negative variable factor"));
            }
            p.add_term(&Monomial::from_exps(exps), &coeff);
        }
        Ok(p)
    }
}

impl<K: Field> Ring for Polynomial<K> {
    fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m, c);
        }
        out
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn neg(&self) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(&ma.mul(mb), &ca.mul(cb));
            }
        }
        out
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<K: Field> fmt::Display for Polynomial<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // fixed grevlex-descending order keeps output byte-stable
        let mut terms: Vec<(&Monomial, &K)> = self.terms.iter().collect();
        terms.sort_by(|a, b| MonomialOrder::GrevLex.cmp(b.0, a.0));
        let mut first = true;
        for (m, c) in terms {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    write!(f, "*x{i}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl<K: Field> fmt::Debug for Polynomial<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::F32003;
    use proptest::prelude::*;

    type P = Polynomial<F32003>;

    fn xy_square_minus() -> (P, P) {
        // xy and x^2 - y^2 in 2 variables
        let xy = P::parse(2, "1*x0^1*x1^1").unwrap();
        let d = P::parse(2, "1*x0^2+-1*x1^2").unwrap();
        (xy, d)
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let (xy, d) = xy_square_minus();
        assert_eq!(xy.to_string(), "1*x0^1*x1^1");
        let back = P::parse(2, &d.to_string()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn homogeneity_detection() {
        let p = P::parse(2, "1*x0^2+1*x1^1").unwrap();
        assert!(p.homogeneous_degree().is_err());
        let q = P::parse(2, "1*x0^2+3*x0^1*x1^1").unwrap();
        assert_eq!(q.homogeneous_degree().unwrap(), Some(2));
    }

    #[test]
    fn taylor_shift_of_product() {
        // f = xy at the origin has multiplicity 2: constant and linear parts vanish
        let (xy, _) = xy_square_minus();
        let shifted = xy.taylor_shift(&[F32003::from_i64(0), F32003::from_i64(0)]);
        assert_eq!(shifted, xy);
        let at_one = xy.taylor_shift(&[F32003::from_i64(1), F32003::from_i64(2)]);
        assert_eq!(at_one.constant_part(), F32003::from_i64(2));
    }

    #[test]
    fn derivative_and_eval() {
        let q = P::parse(3, "2*x0^2*x2^1+1*x1^2").unwrap();
        let d0 = q.partial_derivative(0);
        assert_eq!(d0, P::parse(3, "4*x0^1*x2^1").unwrap());
        let v = q.eval(&[
            F32003::from_i64(1),
            F32003::from_i64(2),
            F32003::from_i64(3),
        ]);
        assert_eq!(v, F32003::from_i64(10));
    }

    proptest! {
        #[test]
        fn distributivity(seed in 0u64..500) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let rand_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut p = P::zero(3);
                for _ in 0..4 {
                    let exps: Vec<u16> = (0..3).map(|_| rand::Rng::gen_range(rng, 0..3u16)).collect();
                    p.add_term(&Monomial::from_exps(exps), &crate::field::Field::sample(rng));
                }
                p
            };
            let (f, g, h) = (rand_poly(&mut rng), rand_poly(&mut rng), rand_poly(&mut rng));
            prop_assert_eq!(f.add(&g).mul(&h), f.mul(&h).add(&g.mul(&h)));
        }

        #[test]
        fn display_parse_roundtrip(seed in 0u64..200) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut p = P::zero(4);
            for _ in 0..5 {
                let exps: Vec<u16> = (0..4).map(|_| rand::Rng::gen_range(&mut rng, 0..4u16)).collect();
                p.add_term(&Monomial::from_exps(exps), &crate::field::Field::sample(&mut rng));
            }
            let s = p.to_string();
            prop_assert_eq!(P::parse(4, &s).unwrap(), p);
        }
    }
}
