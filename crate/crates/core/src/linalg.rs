//! Small dense complex linear algebra: partially pivoted LU, Householder QR
//! and triangular solves. Matrices are column-major.

use num_complex::Complex64;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Pivots with modulus below this are treated as exact zeros.
pub const PIVOT_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    /// Builds a matrix from row slices of real numbers.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Complex64>]) -> Self {
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            assert_eq!(c.len(), rows, "column length");
            data.extend_from_slice(c);
        }
        CMat {
            rows,
            cols: columns.len(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Square submatrix made of the listed columns.
    pub fn select_columns(&self, idx: &[usize]) -> CMat {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.col(j));
        }
        CMat {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            for l in 0..self.cols {
                let b = rhs[(l, j)];
                if b == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let a = self.col(l);
                let o = out.col_mut(j);
                for i in 0..o.len() {
                    o[i] += a[i] * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for (l, &b) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.col(l)) {
                *o += a * b;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[j * self.rows + i]
    }
}

pub fn norm2(v: &[Complex64]) -> f64 {
    // scaled to avoid overflow for large entries
    let scale = v.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = v.iter().map(|z| (z / scale).norm_sqr()).sum();
    scale * s.sqrt()
}

/// LU factorization with partial (row) pivoting: `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: CMat,
    perm: Vec<usize>,
    singular: bool,
}

impl Lu {
    pub fn new(a: &CMat) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::NotSquare {
                rows: a.rows,
                cols: a.cols,
            });
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best >= PIVOT_FLOOR) {
                singular = true;
                continue;
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(p, j)];
                    lu[(p, j)] = lu[(k, j)];
                    lu[(k, j)] = t;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                lu[(i, k)] /= pivot;
            }
            for j in k + 1..n {
                let ukj = lu[(k, j)];
                if ukj == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i in k + 1..n {
                    let l = lu[(i, k)];
                    lu[(i, j)] -= l * ukj;
                }
            }
        }
        Ok(Lu { lu, perm, singular })
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Sum of log-moduli of the pivots, or -inf when a pivot is below [`PIVOT_FLOOR`].
    pub fn log_abs_det(&self) -> f64 {
        if self.singular {
            return f64::NEG_INFINITY;
        }
        (0..self.lu.rows).map(|i| self.lu[(i, i)].norm().ln()).sum()
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> CMat {
        let n = self.lu.rows;
        let mut inv = CMat::zeros(n, n);
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            e[j] = Complex64::new(1.0, 0.0);
            let x = self.solve(&e);
            inv.col_mut(j).copy_from_slice(&x);
        }
        inv
    }
}

/// Triangular factor of a Householder QR of a tall matrix, normalized so that
/// the diagonal is real and nonnegative.
pub fn householder_r(a: &CMat) -> CMat {
    let (m, n) = (a.rows, a.cols);
    assert!(m >= n, "householder_r needs a tall matrix");
    let mut w = a.clone();
    let mut r = CMat::zeros(n, n);
    for k in 0..n {
        let alpha = reflect_column(&mut w, k, k, k + 1..n);
        // diag(R) made nonnegative: flip the phase of row k
        let phase = if alpha.norm() > 0.0 {
            alpha.conj() / alpha.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        r[(k, k)] = alpha * phase;
        for j in k + 1..n {
            r[(k, j)] = w[(k, j)] * phase;
        }
    }
    r
}

/// Applies the Householder reflector zeroing `w[row+1.., col]` to the columns
/// in `others`. Returns the new value of `w[row, col]`.
pub(crate) fn reflect_column(
    w: &mut CMat,
    row: usize,
    col: usize,
    others: impl IntoIterator<Item = usize>,
) -> Complex64 {
    let m = w.rows;
    let x: Vec<Complex64> = w.col(col)[row..m].to_vec();
    let xnorm = norm2(&x);
    if xnorm == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let x0 = x[0];
    let phase = if x0.norm() > 0.0 {
        x0 / x0.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let alpha = -phase * xnorm;
    let mut v = x;
    v[0] -= alpha;
    let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if vnorm2 == 0.0 {
        return alpha;
    }
    for j in others {
        let y = &mut w.col_mut(j)[row..m];
        let dot: Complex64 = v.iter().zip(y.iter()).map(|(vi, yi)| vi.conj() * yi).sum();
        let f = dot * (2.0 / vnorm2);
        for (yi, vi) in y.iter_mut().zip(&v) {
            *yi -= vi * f;
        }
    }
    let c = w.col_mut(col);
    c[row] = alpha;
    for z in &mut c[row + 1..m] {
        *z = Complex64::new(0.0, 0.0);
    }
    alpha
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn solve_lower(l: &CMat, b: &[Complex64]) -> Vec<Complex64> {
    let n = l.rows;
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for j in 0..i {
            s -= l[(i, j)] * x[j];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Inverse of a lower-triangular matrix (also lower triangular).
pub fn invert_lower(l: &CMat) -> CMat {
    let n = l.rows;
    let mut inv = CMat::zeros(n, n);
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        e.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        e[j] = Complex64::new(1.0, 0.0);
        let x = solve_lower(l, &e);
        inv.col_mut(j).copy_from_slice(&x);
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn lu_solves_and_inverts() {
        let a = CMat::from_real_rows(&[&[2.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 4.0]]);
        let lu = Lu::new(&a).unwrap();
        let inv = lu.inverse();
        let id = a.mul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - c(want)).norm() < 1e-14);
            }
        }
        // det = 2*(12-1) - 1*(4-0) = 18
        assert!((lu.log_abs_det() - 18f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn duplicate_rows_give_exact_zero_pivot() {
        let a = CMat::from_fn(3, 3, |i, j| {
            let x = [0.3, 0.7, 0.3][i];
            Complex64::new(x, 0.1).powu(j as u32)
        });
        assert!(Lu::new(&a).unwrap().is_singular());
    }

    #[test]
    fn householder_r_matches_gram() {
        let a = CMat::from_fn(5, 3, |i, j| {
            Complex64::new((i + 1) as f64, j as f64).powu(j as u32)
        });
        let r = householder_r(&a);
        // A^H A == R^H R
        for p in 0..3 {
            for q in 0..3 {
                let lhs: Complex64 = (0..5).map(|i| a[(i, p)].conj() * a[(i, q)]).sum();
                let rhs: Complex64 = (0..3).map(|i| r[(i, p)].conj() * r[(i, q)]).sum();
                assert!((lhs - rhs).norm() < 1e-10 * lhs.norm().max(1.0));
            }
            assert!(r[(p, p)].im == 0.0 && r[(p, p)].re >= 0.0);
        }
    }

    #[test]
    fn lower_inverse() {
        let l = CMat::from_real_rows(&[&[2.0, 0.0], &[3.0, 4.0]]);
        let inv = invert_lower(&l);
        let id = l.mul(&inv);
        assert!((id[(0, 0)] - c(1.0)).norm() < 1e-15);
        assert!((id[(1, 0)]).norm() < 1e-15);
        assert!((id[(1, 1)] - c(1.0)).norm() < 1e-15);
    }
}
