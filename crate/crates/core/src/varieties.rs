//! Constructors for the determinantal varieties and embedded curves under
//! study: Segre products (2x2 minors of a generic matrix), quadratic
//! Veronese (minors of a symmetric matrix), Plücker embeddings of G(2,k)
//! (4x4 sub-Pfaffians of a skew matrix), rational normal curves, and
//! seeded elliptic normal curves.

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::CatalogError;
use crate::field::{Field, Ring};
use crate::gb::ResourceLimits;
use crate::ideal::GradedIdeal;
use crate::matrix::{det_expansion, pfaffian_expansion, PolyMatrix};
use crate::monomial::MonomialOrder;
use crate::points;
use crate::poly::Polynomial;
use crate::resolution::{free_resolution, GradedModulePresentation};

/// The three universal determinantal embeddings, parametrized by the shape
/// of the matrix of linear forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmbeddingCase {
    /// P(V) x P(W) under Segre; 2x2 minors of a generic `rows x cols` matrix.
    Generic { rows: usize, cols: usize },
    /// P(V) under the quadratic Veronese; minors of a symmetric `size x size` matrix.
    Symmetric { size: usize },
    /// G(2, V) under Plücker; sub-Pfaffians of a skew `size x size` matrix.
    Skew { size: usize },
}

impl EmbeddingCase {
    pub fn validate(&self) -> Result<(), CatalogError> {
        match *self {
            EmbeddingCase::Generic { rows, cols } => {
                if rows < 2 || rows > cols {
                    return Err(CatalogError::BadCase(format!(
                        "generic case needs 2 <= rows <= cols, got {rows}x{cols}"
                    )));
                }
            }
            EmbeddingCase::Symmetric { size } | EmbeddingCase::Skew { size } => {
                if size < 2 {
                    return Err(CatalogError::BadCase(format!(
                        "matrix size must be at least 2, got {size}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Ambient projective dimension `n`.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            EmbeddingCase::Generic { rows, cols } => rows * cols - 1,
            EmbeddingCase::Symmetric { size } => size * (size + 1) / 2 - 1,
            EmbeddingCase::Skew { size } => size * (size - 1) / 2 - 1,
        }
    }

    pub fn nvars(&self) -> usize {
        self.ambient_dim() + 1
    }

    /// Codimension of the embedded variety itself (`i = 2` degeneracy locus).
    pub fn codim(&self) -> usize {
        degeneracy_codim(self, 2).expect("i = 2 is in range for valid cases")
    }

    pub fn d_y(&self) -> i64 {
        2
    }

    pub fn label(&self) -> String {
        match *self {
            EmbeddingCase::Generic { rows, cols } => format!("segre:{rows}x{cols}"),
            EmbeddingCase::Symmetric { size } => format!("veronese:{size}"),
            EmbeddingCase::Skew { size } => format!("pluecker:{size}"),
        }
    }

    /// Largest multiplicity index: the matrix size for minors, half of it
    /// for Pfaffians.
    pub fn max_index(&self) -> usize {
        match *self {
            EmbeddingCase::Generic { rows, .. } => rows,
            EmbeddingCase::Symmetric { size } => size,
            EmbeddingCase::Skew { size } => size / 2,
        }
    }

    /// The generic matrix of variables for this case.
    pub fn matrix<K: Field>(&self) -> PolyMatrix<K> {
        let nv = self.nvars();
        match *self {
            EmbeddingCase::Generic { rows, cols } => {
                PolyMatrix::from_fn(rows, cols, |i, j| Polynomial::var(nv, i * cols + j))
            }
            EmbeddingCase::Symmetric { size } => PolyMatrix::from_fn(size, size, |i, j| {
                let (a, b) = (i.min(j), i.max(j));
                Polynomial::var(nv, sym_index(size, a, b))
            }),
            EmbeddingCase::Skew { size } => PolyMatrix::from_fn(size, size, |i, j| {
                if i == j {
                    Polynomial::zero(nv)
                } else if i < j {
                    Polynomial::var(nv, skew_index(size, i, j))
                } else {
                    Polynomial::var(nv, skew_index(size, j, i)).neg()
                }
            }),
        }
    }

    /// Ambient coordinates of a scalar matrix point, matching [`Self::matrix`].
    pub fn coords_of_matrix<K: Field>(&self, m: &crate::matrix::Mat<K>) -> Vec<K> {
        let mut out = vec![K::zero(); self.nvars()];
        match *self {
            EmbeddingCase::Generic { rows, cols } => {
                for i in 0..rows {
                    for j in 0..cols {
                        out[i * cols + j] = m.get(i, j).clone();
                    }
                }
            }
            EmbeddingCase::Symmetric { size } => {
                for i in 0..size {
                    for j in i..size {
                        out[sym_index(size, i, j)] = m.get(i, j).clone();
                    }
                }
            }
            EmbeddingCase::Skew { size } => {
                for i in 0..size {
                    for j in (i + 1)..size {
                        out[skew_index(size, i, j)] = m.get(i, j).clone();
                    }
                }
            }
        }
        out
    }
}

// upper triangle including the diagonal, row-major
pub(crate) fn sym_index(size: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < size);
    i * (2 * size - i + 1) / 2 + (j - i)
}

// strictly upper triangle, row-major
pub(crate) fn skew_index(size: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < size);
    i * (2 * size - i - 1) / 2 + (j - i - 1)
}

/// Codimension of the rank-degeneracy locus cut out by size-`i` minors
/// (or `2i x 2i` Pfaffians in the skew case).
pub fn degeneracy_codim(case: &EmbeddingCase, i: usize) -> Result<usize, CatalogError> {
    case.validate()?;
    let bad = || CatalogError::BadIndex {
        i,
        case: case.label(),
    };
    match *case {
        EmbeddingCase::Generic { rows, cols } => {
            if i < 2 || i > rows {
                return Err(bad());
            }
            Ok((rows - i + 1) * (cols - i + 1))
        }
        EmbeddingCase::Symmetric { size } => {
            if i < 2 || i > size {
                return Err(bad());
            }
            Ok(binom2(size - i + 2))
        }
        EmbeddingCase::Skew { size } => {
            if i < 2 || i > size / 2 {
                return Err(bad());
            }
            Ok(binom2(size - 2 * i + 2))
        }
    }
}

fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Ideal of the `i`-th degeneracy locus: all size-`i` minors, or all
/// `2i x 2i` principal sub-Pfaffians in the skew case.
pub fn degeneracy_ideal<K: Field>(
    case: &EmbeddingCase,
    i: usize,
) -> Result<GradedIdeal<K>, CatalogError> {
    case.validate()?;
    let bad = || CatalogError::BadIndex {
        i,
        case: case.label(),
    };
    let nv = case.nvars();
    let m = case.matrix::<K>();
    let mut gens: Vec<Polynomial<K>> = Vec::new();
    match *case {
        EmbeddingCase::Generic { rows, cols } => {
            if i < 2 || i > rows {
                return Err(bad());
            }
            for rs in (0..rows).combinations(i) {
                for cs in (0..cols).combinations(i) {
                    if let Some(d) = det_expansion(i, &|a, b| m.get(rs[a], cs[b]).clone()) {
                        gens.push(d);
                    }
                }
            }
        }
        EmbeddingCase::Symmetric { size } => {
            if i < 2 || i > size {
                return Err(bad());
            }
            for rs in (0..size).combinations(i) {
                for cs in (0..size).combinations(i) {
                    if let Some(d) = det_expansion(i, &|a, b| m.get(rs[a], cs[b]).clone()) {
                        gens.push(d);
                    }
                }
            }
        }
        EmbeddingCase::Skew { size } => {
            if i < 2 || i > size / 2 {
                return Err(bad());
            }
            for idx in (0..size).combinations(2 * i) {
                if let Some(pf) = pfaffian_expansion(&idx, &|a, b| m.get(a, b).clone()) {
                    gens.push(pf);
                }
            }
        }
    }
    Ok(GradedIdeal::new(nv, gens)?)
}

/// A catalog variety: label, ambient dimension, defining ideal, expected
/// codimension, and the quadric-generation degree.
#[derive(Clone, Debug)]
pub struct VarietySpec<K: Field> {
    pub label: String,
    pub n: usize,
    pub ideal: GradedIdeal<K>,
    pub codim: usize,
    pub d_y: i64,
}

impl<K: Field> VarietySpec<K> {
    fn check_degrees(&self) -> Result<(), CatalogError> {
        for d in self.ideal.degrees() {
            if d > self.d_y {
                return Err(CatalogError::BadCase(format!(
                    "generator degree {d} exceeds d_Y = {}",
                    self.d_y
                )));
            }
        }
        Ok(())
    }
}

/// The rank-one locus of the universal matrix: the embedded variety itself.
pub fn determinantal_variety<K: Field>(
    case: &EmbeddingCase,
) -> Result<VarietySpec<K>, CatalogError> {
    let ideal = degeneracy_ideal::<K>(case, 2)?;
    let spec = VarietySpec {
        label: case.label(),
        n: case.ambient_dim(),
        ideal,
        codim: case.codim(),
        d_y: case.d_y(),
    };
    spec.check_degrees()?;
    Ok(spec)
}

/// Rational normal curve of degree `m` in P^m: 2x2 minors of the standard
/// 2 x m catalecticant matrix.
pub fn rational_normal_curve<K: Field>(m: usize) -> Result<VarietySpec<K>, CatalogError> {
    if m < 2 {
        return Err(CatalogError::BadCase(format!(
            "rational normal curve needs degree >= 2, got {m}"
        )));
    }
    let nv = m + 1;
    let cat = PolyMatrix::from_fn(2, m, |i, j| Polynomial::<K>::var(nv, i + j));
    let mut gens = Vec::new();
    for cs in (0..m).combinations(2) {
        if let Some(d) = det_expansion(2, &|a, b| cat.get(a, cs[b]).clone()) {
            gens.push(d);
        }
    }
    Ok(VarietySpec {
        label: format!("rnc:{m}"),
        n: m,
        ideal: GradedIdeal::new(nv, gens)?,
        codim: m - 1,
        d_y: 2,
    })
}

const CURVE_RETRIES: usize = 16;

/// Elliptic quartic in P^3: a seeded random pencil of two quadrics, certified
/// by its Hilbert polynomial (dimension 1, degree 4, arithmetic genus 1) and,
/// over prime fields, Jacobian rank spot checks at sampled points.
pub fn elliptic_quartic<K: Field>(seed: u64) -> Result<VarietySpec<K>, CatalogError> {
    build_certified_curve(seed, 4, "elliptic:4", |rng| {
        let nv = 4;
        let q: Vec<Polynomial<K>> = (0..2).map(|_| random_form(nv, 2, rng)).collect();
        GradedIdeal::new(nv, q).map_err(CatalogError::from)
    })
}

/// Elliptic normal quintic in P^4: the 4x4 principal sub-Pfaffians of a
/// seeded 5x5 skew matrix of linear forms.
pub fn elliptic_quintic<K: Field>(seed: u64) -> Result<VarietySpec<K>, CatalogError> {
    build_certified_curve(seed, 5, "elliptic:5", |rng| {
        let nv = 5;
        let size = 5;
        let mut upper = vec![vec![Polynomial::<K>::zero(nv); size]; size];
        for i in 0..size {
            for j in (i + 1)..size {
                upper[i][j] = random_form(nv, 1, rng);
            }
        }
        let entry = |a: usize, b: usize| -> Polynomial<K> {
            if a == b {
                Polynomial::zero(nv)
            } else if a < b {
                upper[a][b].clone()
            } else {
                upper[b][a].neg()
            }
        };
        let mut gens = Vec::new();
        for t in 0..size {
            let idx: Vec<usize> = (0..size).filter(|&s| s != t).collect();
            if let Some(pf) = pfaffian_expansion(&idx, &entry) {
                gens.push(pf);
            }
        }
        GradedIdeal::new(nv, gens).map_err(CatalogError::from)
    })
}

fn random_form<K: Field, R: rand::Rng>(nvars: usize, degree: u32, rng: &mut R) -> Polynomial<K> {
    let mut p = Polynomial::zero(nvars);
    for m in crate::monomial::monomials_of_degree(nvars, degree) {
        p.add_term(&m, &K::sample(rng));
    }
    p
}

fn build_certified_curve<K: Field>(
    seed: u64,
    degree: i64,
    label: &str,
    mut make: impl FnMut(&mut ChaCha8Rng) -> Result<GradedIdeal<K>, CatalogError>,
) -> Result<VarietySpec<K>, CatalogError> {
    let mut last_reason = String::new();
    for attempt in 0..CURVE_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let ideal = make(&mut rng)?;
        let nv = ideal.nvars();
        let n = nv - 1;
        match certify_genus_one(&ideal, degree, &mut rng) {
            Ok(()) => {
                return Ok(VarietySpec {
                    label: label.to_string(),
                    n,
                    ideal,
                    codim: n - 1,
                    d_y: 2,
                })
            }
            Err(reason) => last_reason = reason,
        }
    }
    Err(CatalogError::CertificationFailed {
        what: format!("{label}: {last_reason}"),
        tries: CURVE_RETRIES,
    })
}

fn certify_genus_one<K: Field>(
    ideal: &GradedIdeal<K>,
    degree: i64,
    rng: &mut ChaCha8Rng,
) -> Result<(), String> {
    let limits = ResourceLimits::none();
    let pres = GradedModulePresentation::quotient_of_ideal(ideal)
        .map_err(|e| format!("presentation: {e}"))?;
    let res = free_resolution(&pres, MonomialOrder::GrevLex, &limits)
        .map_err(|e| format!("resolution: {e}"))?;
    let Some((dim, deg)) = res.hilbert_dimension_degree() else {
        return Err("hilbert polynomial is zero".into());
    };
    if dim != 1 || deg != degree {
        return Err(format!(
            "hilbert data (dim {dim}, deg {deg}) != (1, {degree})"
        ));
    }
    if res.hilbert_poly_at(0) != 0 {
        return Err(format!(
            "arithmetic genus: chi(O) = {} != 0",
            res.hilbert_poly_at(0)
        ));
    }
    // Jacobian spot checks need point enumeration: prime fields only.
    if K::element_count().is_some() {
        let pts = points::sample_points_on_curve(ideal, rng, 3, 12)
            .map_err(|e| format!("point sampling: {e}"))?;
        if pts.is_empty() {
            return Err("no rational points found for the smoothness spot check".into());
        }
        let expected = ideal.nvars() - 2; // codimension of a curve
        for pt in &pts {
            let rank = points::jacobian_rank_at(ideal, pt);
            if rank != expected {
                return Err(format!(
                    "jacobian rank {rank} != {expected} at a sampled point"
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::F32003;

    type K = F32003;

    #[test]
    fn segre_generator_counts() {
        let one = determinantal_variety::<K>(&EmbeddingCase::Generic { rows: 2, cols: 2 }).unwrap();
        assert_eq!(one.ideal.num_generators(), 1);
        assert_eq!(one.n, 3);
        let three =
            determinantal_variety::<K>(&EmbeddingCase::Generic { rows: 2, cols: 3 }).unwrap();
        assert_eq!(three.ideal.num_generators(), 3);
        assert_eq!(three.n, 5);
        let big = determinantal_variety::<K>(&EmbeddingCase::Generic { rows: 3, cols: 4 }).unwrap();
        assert_eq!(big.ideal.num_generators(), 3 * 6); // C(3,2) * C(4,2)
    }

    #[test]
    fn veronese_has_six_minors() {
        let v = determinantal_variety::<K>(&EmbeddingCase::Symmetric { size: 3 }).unwrap();
        assert_eq!(v.ideal.num_generators(), 6);
        assert_eq!(v.n, 5);
        let d = degeneracy_ideal::<K>(&EmbeddingCase::Symmetric { size: 3 }, 2).unwrap();
        assert_eq!(d.num_generators(), 6);
    }

    #[test]
    fn pluecker_four_is_one_pfaffian() {
        let g = determinantal_variety::<K>(&EmbeddingCase::Skew { size: 4 }).unwrap();
        assert_eq!(g.ideal.num_generators(), 1);
        assert_eq!(g.n, 5);
        // af - be + cd in the strict-upper-triangle coordinates
        let pf = &g.ideal.generators()[0];
        let expected = Polynomial::<K>::parse(6, "1*x0^1*x5^1+-1*x1^1*x4^1+1*x2^1*x3^1").unwrap();
        assert_eq!(pf, &expected.monic(MonomialOrder::GrevLex));
    }

    #[test]
    fn skew_six_count() {
        let g = determinantal_variety::<K>(&EmbeddingCase::Skew { size: 6 }).unwrap();
        assert_eq!(g.ideal.num_generators(), 15); // C(6,4)
        assert_eq!(g.n, 14);
    }

    #[test]
    fn pfaffian_squared_is_determinant_symbolically() {
        for size in [4usize, 6] {
            let case = EmbeddingCase::Skew { size };
            let m = case.matrix::<K>();
            let idx: Vec<usize> = (0..size).collect();
            let pf = pfaffian_expansion(&idx, &|a, b| m.get(a, b).clone()).unwrap();
            let det = det_expansion(size, &|a, b| m.get(a, b).clone()).unwrap();
            assert_eq!(pf.mul(&pf), det, "size {size}");
        }
    }

    #[test]
    fn degeneracy_loci_top_levels_are_principal() {
        let det3 = degeneracy_ideal::<K>(&EmbeddingCase::Generic { rows: 3, cols: 3 }, 3).unwrap();
        assert_eq!(det3.num_generators(), 1);
        let pf6 = degeneracy_ideal::<K>(&EmbeddingCase::Skew { size: 6 }, 3).unwrap();
        assert_eq!(pf6.num_generators(), 1);
    }

    #[test]
    fn codim_formulas_match_stated_values() {
        assert_eq!(
            degeneracy_codim(&EmbeddingCase::Generic { rows: 3, cols: 4 }, 2).unwrap(),
            6
        );
        assert_eq!(
            degeneracy_codim(&EmbeddingCase::Symmetric { size: 4 }, 2).unwrap(),
            6
        );
        assert_eq!(
            degeneracy_codim(&EmbeddingCase::Skew { size: 6 }, 2).unwrap(),
            6
        );
        assert!(degeneracy_codim(&EmbeddingCase::Skew { size: 6 }, 4).is_err());
    }

    #[test]
    fn rnc_small_cases() {
        let conic = rational_normal_curve::<K>(2).unwrap();
        assert_eq!(conic.ideal.num_generators(), 1);
        let cubic = rational_normal_curve::<K>(3).unwrap();
        assert_eq!(cubic.ideal.num_generators(), 3);
        assert_eq!(cubic.codim, 2);
    }

    #[test]
    fn elliptic_quartic_certifies() {
        let c = elliptic_quartic::<K>(17).unwrap();
        assert_eq!(c.ideal.num_generators(), 2);
        assert_eq!(c.n, 3);
    }

    #[test]
    fn elliptic_quintic_certifies() {
        let c = elliptic_quintic::<K>(23).unwrap();
        assert_eq!(c.ideal.num_generators(), 5);
        assert_eq!(c.n, 4);
        assert_eq!(c.ideal.equigenerated_degree(), Some(2));
    }

    use crate::monomial::MonomialOrder;
}
