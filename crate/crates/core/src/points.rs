//! Point sampling on matrix spaces and curves, vanishing-order measurement,
//! and small zero-dimensional solving over prime fields.

use rand::Rng;

use crate::error::CatalogError;
use crate::field::{Field, Ring};
use crate::gb::{groebner_basis, ResourceLimits};
use crate::ideal::GradedIdeal;
use crate::matrix::Mat;
use crate::monomial::MonomialOrder;
use crate::poly::Polynomial;
use crate::varieties::EmbeddingCase;

/// Order of vanishing of `f` at an affine point: the smallest total degree
/// carrying a nonzero coefficient after translating the point to the origin.
/// Zero means `f` does not vanish there.
pub fn multiplicity_at_point<K: Field>(f: &Polynomial<K>, point: &[K]) -> usize {
    let shifted = f.taylor_shift(point);
    shifted
        .terms()
        .map(|(m, _)| m.degree() as usize)
        .min()
        .unwrap_or(0)
}

const SAMPLE_RETRIES: usize = 64;

/// A matrix point of exactly the requested rank, as ambient coordinates.
/// Built from seeded random factor matrices; exactness is certified before
/// returning (and re-sampled on failure). Skew ranks must be even.
pub fn sample_rank_point<K: Field, R: Rng>(
    case: &EmbeddingCase,
    rank: usize,
    rng: &mut R,
) -> Result<Vec<K>, CatalogError> {
    case.validate()?;
    let achievable = match *case {
        EmbeddingCase::Generic { rows, cols } => rank >= 1 && rank <= rows.min(cols),
        EmbeddingCase::Symmetric { size } => rank >= 1 && rank <= size,
        EmbeddingCase::Skew { size } => rank >= 2 && rank <= size && rank.is_multiple_of(2),
    };
    if !achievable {
        return Err(CatalogError::BadCase(format!(
            "rank {rank} not achievable for {}",
            case.label()
        )));
    }
    for _ in 0..SAMPLE_RETRIES {
        let m = match *case {
            EmbeddingCase::Generic { rows, cols } => {
                let u = Mat::from_fn(rows, rank, |_, _| K::sample(rng));
                let v = Mat::from_fn(rank, cols, |_, _| K::sample(rng));
                u.mul(&v)
            }
            EmbeddingCase::Symmetric { size } => {
                let mut m = Mat::<K>::zeros(size, size);
                for _ in 0..rank {
                    let lambda = K::sample_nonzero(rng);
                    let v: Vec<K> = (0..size).map(|_| K::sample(rng)).collect();
                    for i in 0..size {
                        for j in 0..size {
                            let add = lambda.mul(&v[i]).mul(&v[j]);
                            m.set(i, j, m.get(i, j).add(&add));
                        }
                    }
                }
                m
            }
            EmbeddingCase::Skew { size } => {
                let mut m = Mat::<K>::zeros(size, size);
                for _ in 0..(rank / 2) {
                    let u: Vec<K> = (0..size).map(|_| K::sample(rng)).collect();
                    let v: Vec<K> = (0..size).map(|_| K::sample(rng)).collect();
                    for i in 0..size {
                        for j in 0..size {
                            let add = u[i].mul(&v[j]).sub(&v[i].mul(&u[j]));
                            m.set(i, j, m.get(i, j).add(&add));
                        }
                    }
                }
                m
            }
        };
        if m.rank() != rank {
            continue;
        }
        if matches!(case, EmbeddingCase::Skew { .. }) && skew_rank_by_pfaffians(&m) != rank {
            continue;
        }
        let mut coords = case.coords_of_matrix(&m);
        // scale so the first nonzero coordinate is 1 (an affine chart point)
        if let Some(inv) = coords.iter().find(|c| !c.is_zero()).and_then(|c| c.inv()) {
            for c in coords.iter_mut() {
                *c = c.mul(&inv);
            }
            return Ok(coords);
        }
    }
    Err(CatalogError::CertificationFailed {
        what: format!("rank-{rank} sample for {}", case.label()),
        tries: SAMPLE_RETRIES,
    })
}

/// Rank of a skew matrix read off its sub-Pfaffians: the largest `2t` such
/// that some `2t x 2t` principal sub-Pfaffian is nonzero.
pub fn skew_rank_by_pfaffians<K: Field>(m: &Mat<K>) -> usize {
    use itertools::Itertools;
    let n = m.rows;
    let mut rank = 0;
    for t in 1..=(n / 2) {
        let mut found = false;
        for idx in (0..n).combinations(2 * t) {
            if crate::matrix::pfaffian_expansion(&idx, &|a, b| m.get(a, b).clone()).is_some() {
                found = true;
                break;
            }
        }
        if found {
            rank = 2 * t;
        } else {
            break;
        }
    }
    rank
}

/// Rank of the Jacobian matrix of the ideal's generators at a point.
pub fn jacobian_rank_at<K: Field>(ideal: &GradedIdeal<K>, point: &[K]) -> usize {
    let gens = ideal.generators();
    let nv = ideal.nvars();
    let jac = Mat::from_fn(gens.len(), nv, |i, j| {
        gens[i].partial_derivative(j).eval(point)
    });
    jac.rank()
}

/// Roots of a univariate polynomial by scanning the (finite prime) field.
fn univariate_roots<K: Field>(coeffs: &[K]) -> Result<Vec<K>, CatalogError> {
    let Some(count) = K::element_count() else {
        return Err(CatalogError::NeedsPrimeField(format!("{}", K::spec())));
    };
    let mut roots = Vec::new();
    for idx in 0..count {
        let x = K::element(idx);
        // Horner
        let mut acc = K::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(&x).add(c);
        }
        if acc.is_zero() {
            roots.push(x);
        }
    }
    Ok(roots)
}

/// Solve a zero-dimensional affine system involving only the `active`
/// variables, by lex elimination and root scanning.
fn solve_zero_dim<K: Field>(
    system: &[Polynomial<K>],
    active: &[usize],
) -> Result<Vec<Vec<(usize, K)>>, CatalogError> {
    let system: Vec<Polynomial<K>> = system.iter().filter(|p| !p.is_zero()).cloned().collect();
    if system.is_empty() {
        return Ok(vec![]); // not zero-dimensional; treat as no certified points
    }
    let last = *active.last().expect("nonempty active set");
    if active.len() == 1 {
        let mut best: Option<Vec<K>> = None;
        for p in &system {
            let Some(u) = p.univariate_in(last) else {
                return Ok(vec![]);
            };
            if best.as_ref().map(|b| u.len() < b.len()).unwrap_or(true) {
                best = Some(u);
            }
        }
        let roots = univariate_roots(&best.unwrap())?;
        let mut out = Vec::new();
        'root: for r in roots {
            for p in &system {
                if !p.substitute(last, &r).is_zero() {
                    continue 'root;
                }
            }
            out.push(vec![(last, r)]);
        }
        return Ok(out);
    }
    let basis = groebner_basis(&system, MonomialOrder::Lex, &ResourceLimits::none())
        .map_err(CatalogError::from)?;
    if basis.iter().any(|b| b.is_unit_constant()) {
        return Ok(vec![]); // inconsistent system: empty slice
    }
    let Some(elim) = basis
        .iter()
        .find_map(|b| b.univariate_in(last).filter(|u| u.len() > 1))
    else {
        return Ok(vec![]); // not zero-dimensional in the last variable
    };
    let roots = univariate_roots(&elim)?;
    let mut out = Vec::new();
    for r in roots {
        let reduced: Vec<Polynomial<K>> = basis.iter().map(|b| b.substitute(last, &r)).collect();
        for mut partial in solve_zero_dim(&reduced, &active[..active.len() - 1])? {
            partial.push((last, r.clone()));
            out.push(partial);
        }
    }
    Ok(out)
}

/// Sample points on a projective curve over a prime field by slicing with a
/// random hyperplane and solving the resulting zero-dimensional system.
/// Returns up to `want` distinct points (possibly fewer).
pub fn sample_points_on_curve<K: Field, R: Rng>(
    ideal: &GradedIdeal<K>,
    rng: &mut R,
    want: usize,
    tries: usize,
) -> Result<Vec<Vec<K>>, CatalogError> {
    if K::element_count().is_none() {
        return Err(CatalogError::NeedsPrimeField(format!("{}", K::spec())));
    }
    let nv = ideal.nvars();
    let mut found: Vec<Vec<K>> = Vec::new();
    for _ in 0..tries {
        if found.len() >= want {
            break;
        }
        // hyperplane x_0 = sum_{i >= 1} c_i x_i, chart x_{nv-1} = 1
        let c: Vec<K> = (0..nv).map(|_| K::sample(rng)).collect();
        let images: Vec<Polynomial<K>> = (0..nv)
            .map(|i| {
                if i == 0 {
                    let mut l = Polynomial::zero(nv);
                    for (t, ct) in c.iter().enumerate().take(nv).skip(1) {
                        l = l.add(&Polynomial::var(nv, t).scale(ct));
                    }
                    l
                } else {
                    Polynomial::var(nv, i)
                }
            })
            .collect();
        let sliced: Vec<Polynomial<K>> = ideal
            .generators()
            .iter()
            .map(|g| g.compose(&images).substitute(nv - 1, &K::one()))
            .collect();
        let active: Vec<usize> = (1..nv - 1).collect();
        if active.is_empty() {
            continue;
        }
        let sols = solve_zero_dim(&sliced, &active)?;
        for sol in sols {
            let mut point = vec![K::zero(); nv];
            point[nv - 1] = K::one();
            for (var, val) in &sol {
                point[*var] = val.clone();
            }
            // undo the hyperplane substitution for x_0
            let mut x0 = K::zero();
            for (t, ct) in c.iter().enumerate().take(nv).skip(1) {
                x0 = x0.add(&ct.mul(&point[t]));
            }
            point[0] = x0;
            if ideal.generators().iter().all(|g| g.eval(&point).is_zero())
                && !found.contains(&point)
            {
                found.push(point);
            }
        }
    }
    Ok(found)
}
