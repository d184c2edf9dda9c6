//! Small dense linear algebra. Problem dimensions here are single digits,
//! so plain Gaussian elimination, cyclic Jacobi, and power iteration are
//! all that is needed.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, real, Real};

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub fn inf_norm<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
}

#[inline]
pub fn l2_norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Invalid("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid("matrix rows must be nonempty and rectangular".into()));
        }
        let data: Vec<T> = rows.into_iter().flatten().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("matrix entries must be finite".into()));
        }
        Ok(Self { rows: data.len() / cols, cols, data })
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self { rows: n, cols: m, data: vec![T::zero(); n * m] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = T::one();
        }
        m
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], x))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j);
            }
        }
        t
    }

    /// (A + Aᵀ)/2; requires a square matrix.
    pub fn symmetric_part(&self) -> Self {
        debug_assert_eq!(self.rows, self.cols);
        let half = real::<T>(0.5);
        let mut s = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *s.at_mut(i, j) = (self.at(i, j) + self.at(j, i)) * half;
            }
        }
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == T::zero())
    }

    pub fn rows_as_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
pub fn solve_dense<T: Real>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.n_rows();
    if a.n_cols() != n || b.len() != n {
        return Err(Error::Linalg("solve needs a square system".into()));
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m.at(r, col).abs() > m.at(piv, col).abs() {
                piv = r;
            }
        }
        if m.at(piv, col).abs() <= T::epsilon() * real(1e3) {
            return Err(Error::Linalg(format!(
                "pivot {:.3e} too small at column {col}",
                as_f64(m.at(piv, col))
            )));
        }
        if piv != col {
            for j in 0..n {
                let tmp = m.at(col, j);
                *m.at_mut(col, j) = m.at(piv, j);
                *m.at_mut(piv, j) = tmp;
            }
            rhs.swap(col, piv);
        }
        for r in col + 1..n {
            let factor = m.at(r, col) / m.at(col, col);
            if factor == T::zero() {
                continue;
            }
            for j in col..n {
                let v = m.at(r, j) - factor * m.at(col, j);
                *m.at_mut(r, j) = v;
            }
            rhs[r] = rhs[r] - factor * rhs[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in i + 1..n {
            acc = acc - m.at(i, j) * x[j];
        }
        x[i] = acc / m.at(i, i);
    }
    Ok(x)
}

/// Smallest eigenvalue of a symmetric matrix, by cyclic Jacobi rotations.
pub fn sym_min_eigenvalue<T: Real>(a: &DenseMatrix<T>) -> Result<T> {
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(Error::Linalg("eigenvalues need a square matrix".into()));
    }
    let mut m = a.symmetric_part();
    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off = off + m.at(i, j) * m.at(i, j);
            }
        }
        if off.sqrt() <= T::epsilon() * real(64.0) * (T::one() + inf_norm(&m.data)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.at(p, q);
                if apq == T::zero() {
                    continue;
                }
                let theta = (m.at(q, q) - m.at(p, p)) / (real::<T>(2.0) * apq);
                let t = {
                    let s = if theta >= T::zero() { T::one() } else { -T::one() };
                    s / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.at(k, p);
                    let mkq = m.at(k, q);
                    *m.at_mut(k, p) = c * mkp - s * mkq;
                    *m.at_mut(k, q) = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m.at(p, k);
                    let mqk = m.at(q, k);
                    *m.at_mut(p, k) = c * mpk - s * mqk;
                    *m.at_mut(q, k) = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut min = m.at(0, 0);
    for i in 1..n {
        min = min.min(m.at(i, i));
    }
    Ok(min)
}

/// Spectral norm ‖A‖₂ via power iteration on AᵀA with a deterministic start.
pub fn spectral_norm<T: Real>(a: &DenseMatrix<T>) -> T {
    let n = a.n_cols();
    let at = a.transpose();
    let mut v: Vec<T> = (0..n)
        .map(|i| T::one() + real::<T>(0.01) * real(i as f64 + 1.0))
        .collect();
    let mut lambda = T::zero();
    for _ in 0..256 {
        let av = a.matvec(&v);
        let w = at.matvec(&av);
        let norm = l2_norm(&w);
        if norm <= T::epsilon() {
            return T::zero();
        }
        let next = norm;
        v = w.iter().map(|&x| x / norm).collect();
        if (next - lambda).abs() <= real::<T>(1e-14) * (T::one() + next) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.sqrt()
}
