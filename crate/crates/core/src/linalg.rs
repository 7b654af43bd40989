//! Small dense and banded linear solvers.

use crate::error::{Result, WalkError};
use crate::tol::CONDITION_WARN;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// `xᵀ A`.
    pub fn vec_mul(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len());
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn norm_one(&self) -> f64 {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    norm_one: f64,
}

impl Lu {
    pub fn new(a: &Matrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(WalkError::Structural(format!("LU of a {}x{} matrix", a.rows, a.cols)));
        }
        let n = a.rows;
        let norm_one = a.norm_one();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| lu[(i, k)].abs().total_cmp(&lu[(j, k)].abs())).unwrap();
            if lu[(p, k)] == 0.0 {
                return Err(WalkError::Numerical { message: format!("singular matrix at column {k}"), condition: f64::INFINITY });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    let (upper, lower) = lu.data.split_at_mut(i * n);
                    let row_k = &upper[k * n + k + 1..k * n + n];
                    for (x, &u) in lower[k + 1..n].iter_mut().zip(row_k) {
                        *x -= factor * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm, norm_one })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }

    /// Solves `A x = b` with a few steps of refinement against `a`, the
    /// matrix this factorisation came from. The residual is accumulated in
    /// doubled precision, which recovers small solution components to full
    /// relative accuracy when the system is componentwise well conditioned.
    pub fn solve_refined(&self, a: &Matrix, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!((a.rows, a.cols), (n, n));
        let mut x = self.solve(b);
        for _ in 0..3 {
            let r: Vec<f64> = (0..n).map(|i| residual_dot(b[i], a.row(i), &x)).collect();
            let dx = self.solve(&r);
            let mut changed = false;
            for (xi, d) in x.iter_mut().zip(&dx) {
                let next = *xi + d;
                changed |= next != *xi;
                *xi = next;
            }
            if !changed {
                break;
            }
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transposed(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        // Aᵀ = Uᵀ Lᵀ P
        let mut y = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(j, i)] * y[j]).sum();
            y[i] = (y[i] - s) / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(j, i)] * y[j]).sum();
            y[i] -= s;
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.dim();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
            e[j] = 0.0;
        }
        inv
    }

    /// Hager's estimate of the 1-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut estimate = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            estimate = y.iter().map(|v| v.abs()).sum::<f64>();
            let sign: Vec<f64> = y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transposed(&sign);
            let (j, zmax) = z.iter().enumerate().map(|(j, v)| (j, v.abs())).fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
            let zx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= zx {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        estimate * self.norm_one
    }

    /// Fails with the condition estimate when it exceeds the warning threshold.
    pub fn require_well_conditioned(&self) -> Result<f64> {
        let c = self.condition_estimate();
        if c.is_finite() && c <= CONDITION_WARN {
            Ok(c)
        } else {
            Err(WalkError::Numerical { message: "ill-conditioned system".into(), condition: c })
        }
    }
}

/// `c − row·x` with error-free products and sums.
fn residual_dot(c: f64, row: &[f64], x: &[f64]) -> f64 {
    let (mut hi, mut lo) = (c, 0.0);
    for (a, b) in row.iter().zip(x) {
        let p = -a * b;
        let perr = (-a).mul_add(*b, -p);
        let s = hi + p;
        let bb = s - hi;
        let serr = (hi - (s - bb)) + (p - bb);
        hi = s;
        lo += serr + perr;
    }
    hi + lo
}

pub fn solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    Ok(Lu::new(a)?.solve(b))
}

/// Banded matrix factored without pivoting. Only safe for matrices where
/// elimination needs no pivoting, such as nonsingular M-matrices.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    lower: usize,
    upper: usize,
    // row i stores columns i - lower ..= i + upper at offsets 0 ..= lower + upper
    band: Vec<f64>,
}

impl BandLu {
    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.band[i * self.width() + j + self.lower - i]
    }

    /// Builds the band from `(row, col, value)` triples; repeated entries accumulate.
    pub fn from_entries(n: usize, lower: usize, upper: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let width = lower + upper + 1;
        let mut band = vec![0.0; n * width];
        for (i, j, v) in entries {
            if j + lower < i || j > i + upper || i >= n || j >= n {
                return Err(WalkError::Structural(format!("entry ({i}, {j}) outside the band")));
            }
            band[i * width + j + lower - i] += v;
        }
        let mut m = Self { n, lower, upper, band };
        m.factor()?;
        Ok(m)
    }

    fn factor(&mut self) -> Result<()> {
        let (n, lower, upper, width) = (self.n, self.lower, self.upper, self.width());
        for k in 0..n {
            let pivot = self.band[k * width + lower];
            if !(pivot.abs() > 0.0) {
                return Err(WalkError::Numerical { message: format!("zero pivot at row {k}"), condition: f64::INFINITY });
            }
            let last = (k + upper).min(n - 1);
            for i in k + 1..=(k + lower).min(n - 1) {
                let ik = i * width + k + lower - i;
                let factor = self.band[ik] / pivot;
                self.band[ik] = factor;
                if factor == 0.0 {
                    continue;
                }
                for j in k + 1..=last {
                    let u = self.band[k * width + j + lower - k];
                    self.band[i * width + j + lower - i] -= factor * u;
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            let s: f64 = (i.saturating_sub(self.lower)..i).map(|j| self.at(i, j) * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..=(i + self.upper).min(n - 1)).map(|j| self.at(i, j) * x[j]).sum();
            x[i] = (x[i] - s) / self.at(i, i);
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transposed(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let s: f64 = (i.saturating_sub(self.upper)..i).map(|j| self.at(j, i) * y[j]).sum();
            y[i] = (y[i] - s) / self.at(i, i);
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..=(i + self.lower).min(n - 1)).map(|j| self.at(j, i) * y[j]).sum();
            y[i] -= s;
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect()).collect();
        Matrix::from_rows(&rows)
    }

    #[test]
    fn solves_and_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1, 2, 5, 30] {
            let a = random_matrix(n, &mut rng);
            let lu = Lu::new(&a).unwrap();
            let b: Vec<f64> = (0..n).map(|i| i as f64 - 1.0).collect();
            let x = lu.solve(&b);
            let r = a.mul_vec(&x);
            assert!(r.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-10));
            let xt = lu.solve_transposed(&b);
            let rt = a.vec_mul(&xt);
            assert!(rt.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-10));
            assert!(a.mul(&lu.inverse()).max_abs_diff(&Matrix::identity(n)) < 1e-10);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        match Lu::new(&a) {
            Err(WalkError::Numerical { .. }) => {}
            other => {
                let lu = other.unwrap();
                assert!(lu.require_well_conditioned().is_err());
            }
        }
    }

    #[test]
    fn condition_estimate_of_diagonal() {
        let a = Matrix::from_rows(&[vec![1e-3, 0.0], vec![0.0, 10.0]]);
        let c = Lu::new(&a).unwrap().condition_estimate();
        assert!((c - 1e4).abs() < 1e-6);
    }

    #[test]
    fn band_matches_dense_on_m_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (n, lower, upper) = (40, 3, 5);
        let mut dense = Matrix::zeros(n, n);
        let mut entries = Vec::new();
        for i in 0..n {
            let mut off = 0.0;
            for j in i.saturating_sub(lower)..=(i + upper).min(n - 1) {
                if j != i {
                    let v = -rng.random::<f64>();
                    off -= v;
                    dense[(i, j)] = v;
                    entries.push((i, j, v));
                }
            }
            dense[(i, i)] = off + 0.1;
            entries.push((i, i, off + 0.1));
        }
        let band = BandLu::from_entries(n, lower, upper, entries).unwrap();
        let lu = Lu::new(&dense).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i % 7) as f64).collect();
        for (u, v) in band.solve(&b).iter().zip(lu.solve(&b)) {
            assert!((u - v).abs() < 1e-10 * v.abs().max(1.0));
        }
        for (u, v) in band.solve_transposed(&b).iter().zip(lu.solve_transposed(&b)) {
            assert!((u - v).abs() < 1e-10 * v.abs().max(1.0));
        }
        assert!(BandLu::from_entries(n, 1, 1, [(0, 3, 1.0)]).is_err());
    }
}
