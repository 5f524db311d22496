//! Dense matrices over a field, polynomial matrices, and ring-generic
//! determinant/Pfaffian expansion.

use crate::field::{Field, Ring};
use crate::poly::Polynomial;

/// Dense matrix over a field, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat<K: Field> {
    pub rows: usize,
    pub cols: usize,
    a: Vec<K>,
}

impl<K: Field> Mat<K> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            a: vec![K::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, K::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<K>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut a = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            a.extend(row);
        }
        Mat {
            rows: r,
            cols: c,
            a,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> K) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &K {
        &self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: K) {
        self.a[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[K] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<K>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Mat<K> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Mat<K>) -> Mat<K> {
        assert_eq!(self.cols, other.rows);
        Mat::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = K::zero();
            for k in 0..self.cols {
                acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
            }
            acc
        })
    }

    pub fn add(&self, other: &Mat<K>) -> Mat<K> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).add(other.get(i, j))
        })
    }

    pub fn scale(&self, c: &K) -> Mat<K> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).mul(c))
    }

    pub fn neg(&self) -> Mat<K> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).neg())
    }

    pub fn is_skew_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            if !self.get(i, i).is_zero() {
                return false;
            }
            for j in (i + 1)..self.cols {
                if !self.get(i, j).add(self.get(j, i)).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&self) -> (Mat<K>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let pivot_row = (r..m.rows).find(|&i| !m.get(i, c).is_zero());
            let Some(pr) = pivot_row else { continue };
            // swap
            if pr != r {
                for j in 0..m.cols {
                    let a = m.get(r, j).clone();
                    let b = m.get(pr, j).clone();
                    m.set(r, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = m.get(r, c).inv().unwrap();
            for j in 0..m.cols {
                m.set(r, j, m.get(r, j).mul(&inv));
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    for j in 0..m.cols {
                        let v = m.get(i, j).sub(&f.mul(m.get(r, j)));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space (vectors `v` with `M v = 0`).
    pub fn kernel_basis(&self) -> Vec<Vec<K>> {
        let (r, pivots) = self.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![K::zero(); self.cols];
            v[fc] = K::one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = r.get(ri, fc).neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Canonical row-space basis: RREF with zero rows dropped.
    pub fn row_space_rref(&self) -> Mat<K> {
        let (r, pivots) = self.rref();
        let rows = pivots.len();
        Mat::from_fn(rows, self.cols, |i, j| r.get(i, j).clone())
    }

    /// Solve `M x = b`; `None` when inconsistent.
    pub fn solve(&self, b: &[K]) -> Option<Vec<K>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Mat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the constants column
        }
        let mut x = vec![K::zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(ri, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat<K>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, K::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    pub fn det(&self) -> K {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = K::one();
        for c in 0..n {
            let pr = (c..n).find(|&i| !m.get(i, c).is_zero());
            let Some(pr) = pr else { return K::zero() };
            if pr != c {
                det = det.neg();
                for j in 0..n {
                    let a = m.get(c, j).clone();
                    let b = m.get(pr, j).clone();
                    m.set(c, j, b);
                    m.set(pr, j, a);
                }
            }
            det = det.mul(m.get(c, c));
            let inv = m.get(c, c).inv().unwrap();
            for i in (c + 1)..n {
                if !m.get(i, c).is_zero() {
                    let f = m.get(i, c).mul(&inv);
                    for j in c..n {
                        let v = m.get(i, j).sub(&f.mul(m.get(c, j)));
                        m.set(i, j, v);
                    }
                }
            }
        }
        det
    }
}

/// Matrix of polynomials, row-major. Used for presentation matrices and
/// resolution differentials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix<K: Field> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Polynomial<K>>,
}

impl<K: Field> PolyMatrix<K> {
    pub fn zeros(nvars: usize, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            data: vec![Polynomial::zero(nvars); rows * cols],
        }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Polynomial<K>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        PolyMatrix { rows, cols, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial<K> {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Polynomial<K>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn nvars(&self) -> usize {
        self.data.first().map(|p| p.nvars()).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|p| p.is_zero())
    }

    pub fn column(&self, j: usize) -> Vec<Polynomial<K>> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> PolyMatrix<K> {
        PolyMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &PolyMatrix<K>) -> PolyMatrix<K> {
        assert_eq!(self.cols, other.rows);
        let nvars = self.nvars().max(other.nvars());
        PolyMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Polynomial::zero(nvars);
            for k in 0..self.cols {
                acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
            }
            acc
        })
    }

    pub fn delete_row(&self, r: usize) -> PolyMatrix<K> {
        PolyMatrix::from_fn(self.rows - 1, self.cols, |i, j| {
            let src = if i < r { i } else { i + 1 };
            self.get(src, j).clone()
        })
    }

    pub fn delete_col(&self, c: usize) -> PolyMatrix<K> {
        PolyMatrix::from_fn(self.rows, self.cols - 1, |i, j| {
            let src = if j < c { j } else { j + 1 };
            self.get(i, src).clone()
        })
    }

    /// Evaluate every entry at a point.
    pub fn eval(&self, point: &[K]) -> Mat<K> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(point))
    }
}

/// Determinant by expansion over an arbitrary commutative ring, memoized over
/// column masks. `None` encodes zero. Intended for small symbolic matrices.
pub fn det_expansion<R: Ring>(n: usize, entry: &impl Fn(usize, usize) -> R) -> Option<R> {
    assert!((1..=16).contains(&n));
    // dp over chosen-column masks, expanding row by row
    fn rec<R: Ring>(
        row: usize,
        mask: u32,
        n: usize,
        entry: &impl Fn(usize, usize) -> R,
        memo: &mut std::collections::HashMap<u32, Option<R>>,
    ) -> Option<R> {
        if row == n {
            return None; // handled by caller: empty det = 1, only reached for n = 0
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let mut acc: Option<R> = None;
        let mut sign_neg = false;
        for c in 0..n {
            if mask & (1 << c) != 0 {
                continue;
            }
            let e = entry(row, c);
            if !e.is_zero() {
                let term = if row + 1 == n {
                    Some(e)
                } else {
                    rec(row + 1, mask | (1 << c), n, entry, memo).map(|sub| e.mul(&sub))
                };
                if let Some(t) = term {
                    let signed = if sign_neg { t.neg() } else { t };
                    acc = match acc {
                        None => Some(signed),
                        Some(a) => {
                            let s = a.add(&signed);
                            if s.is_zero() {
                                None
                            } else {
                                Some(s)
                            }
                        }
                    };
                }
            }
            sign_neg = !sign_neg;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    let mut memo = std::collections::HashMap::new();
    rec(0, 0, n, entry, &mut memo)
}

/// Pfaffian of the principal skew submatrix on `idx` (even length) by
/// recursive first-row expansion: Pf([[0, a], [-a, 0]]) = a.
pub fn pfaffian_expansion<R: Ring>(idx: &[usize], entry: &impl Fn(usize, usize) -> R) -> Option<R> {
    assert!(idx.len().is_multiple_of(2));
    fn rec<R: Ring>(idx: &[usize], entry: &impl Fn(usize, usize) -> R) -> Option<R> {
        if idx.len() == 2 {
            let e = entry(idx[0], idx[1]);
            return if e.is_zero() { None } else { Some(e) };
        }
        let mut acc: Option<R> = None;
        for j in 1..idx.len() {
            let e = entry(idx[0], idx[j]);
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> = idx[1..]
                .iter()
                .enumerate()
                .filter(|(t, _)| *t != j - 1)
                .map(|(_, &v)| v)
                .collect();
            if let Some(sub) = rec(&rest, entry) {
                // expansion sign: (-1)^j for partner at position j (1-based)
                let term = e.mul(&sub);
                let signed = if j % 2 == 0 { term.neg() } else { term };
                acc = match acc {
                    None => Some(signed),
                    Some(a) => {
                        let s = a.add(&signed);
                        if s.is_zero() {
                            None
                        } else {
                            Some(s)
                        }
                    }
                };
            }
        }
        acc
    }
    if idx.is_empty() {
        return None; // empty Pfaffian = 1 is the caller's concern
    }
    rec(idx, entry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, F32003};

    type F = F32003;

    fn fm(v: i64) -> F {
        F::from_i64(v)
    }

    #[test]
    fn rref_rank_kernel() {
        let m = Mat::from_rows(vec![
            vec![fm(1), fm(2), fm(3)],
            vec![fm(2), fm(4), fm(6)],
            vec![fm(0), fm(1), fm(1)],
        ]);
        assert_eq!(m.rank(), 2);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 1);
        for v in &ker {
            for i in 0..m.rows {
                let mut acc = F::zero();
                for j in 0..m.cols {
                    acc = acc.add(&m.get(i, j).mul(&v[j]));
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn det_and_inverse() {
        let m = Mat::from_rows(vec![vec![fm(2), fm(1)], vec![fm(1), fm(1)]]);
        assert_eq!(m.det(), fm(1));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(2));
    }

    #[test]
    fn det_expansion_matches_elimination() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=5usize {
            let m = Mat::from_fn(n, n, |_, _| F::sample(&mut rng));
            let d1 = m.det();
            let d2 = det_expansion(n, &|i, j| *m.get(i, j)).unwrap_or_else(F::zero);
            assert_eq!(d1, d2);
        }
    }

    #[test]
    fn pfaffian_base_and_square() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for half in 1..=4usize {
            let n = 2 * half;
            let mut m = Mat::zeros(n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = F::sample(&mut rng);
                    m.set(i, j, v);
                    m.set(j, i, v.neg());
                }
            }
            let idx: Vec<usize> = (0..n).collect();
            let pf = pfaffian_expansion(&idx, &|i, j| *m.get(i, j)).unwrap_or_else(F::zero);
            assert_eq!(pf.mul(&pf), m.det(), "Pf^2 = det at size {n}");
        }
    }
}
