//! Dense complex matrices over any [`Scalar`].

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix. Rows are outputs, columns are inputs.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn scalar(x: T) -> Self {
        ComplexMatrix { rows: 1, cols: 1, data: vec![x] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(ComplexMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * rhs.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product; `self` occupies the most significant index bits.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |r, c| {
            self.get(r / rhs.rows, c / rhs.cols).clone() * rhs.get(r % rhs.rows, c % rhs.cols).clone()
        })
    }

    pub fn scale(&self, k: &T) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.clone() * k.clone()).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = acc.matmul(self)?;
        }
        Ok(acc)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn to_c64(&self) -> ComplexMatrix<Complex64> {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(Scalar::to_c64).collect() }
    }

    /// Entrywise comparison: exact for exact scalars, within `tol` otherwise.
    pub fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        if self.shape() != rhs.shape() {
            return false;
        }
        if T::EXACT {
            return self.data == rhs.data;
        }
        self.data.iter().zip(&rhs.data).all(|(a, b)| (a.clone() - b.clone()).magnitude() <= tol)
    }

    /// Finds `λ` with `self ≈ λ·other`. `λ` is read off the largest entry of
    /// `other`; the fit must hold within `tol · max(1, ‖self‖_max)`.
    pub fn proportional(&self, other: &Self, tol: f64) -> Result<Option<T>> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let pivot = other
            .data
            .iter()
            .enumerate()
            .map(|(i, x)| (i, x.magnitude()))
            .fold(None::<(usize, f64)>, |best, (i, m)| match best {
                Some((_, bm)) if bm >= m => best,
                _ => Some((i, m)),
            });
        let lambda = match pivot {
            Some((i, m)) if m > 0.0 => match self.data[i].checked_div(&other.data[i]) {
                Some(l) => l,
                None => return Ok(None),
            },
            // other is zero: only a zero self is proportional
            _ => {
                let zero = self.data.iter().all(|x| if T::EXACT { x.is_zero() } else { x.magnitude() <= tol });
                return Ok(zero.then(T::one));
            }
        };
        let scaled = other.scale(&lambda);
        let ok = if T::EXACT {
            scaled.data == self.data
        } else {
            let bound = tol * self.max_abs().max(1.0);
            self.data.iter().zip(&scaled.data).all(|(a, b)| (a.clone() - b.clone()).magnitude() <= bound)
        };
        Ok(ok.then_some(lambda))
    }
}

impl<T: Scalar> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{:?} ", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Serialized matrix: row-major `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn to_json(&self) -> MatrixJson {
        let data = (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| {
                        let z = self.get(r, c).to_c64();
                        // avoid emitting -0.0
                        [z.re + 0.0, z.im + 0.0]
                    })
                    .collect()
            })
            .collect();
        MatrixJson { rows: self.rows, cols: self.cols, data }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix<Complex64>> {
        if self.data.len() != self.rows || self.data.iter().any(|r| r.len() != self.cols) {
            return Err(Error::ShapeMismatch("matrix json dimensions".into()));
        }
        ComplexMatrix::from_rows(
            self.data.iter().map(|r| r.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cyclotomic8;

    #[test]
    fn proportional_basic() {
        let i2 = ComplexMatrix::<Complex64>::identity(2);
        let two = i2.scale(&Complex64::new(2.0, 0.0));
        let l = two.proportional(&i2, 1e-9).unwrap().unwrap();
        assert!((l - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        let x = ComplexMatrix::from_rows(vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        assert!(i2.proportional(&x, 1e-9).unwrap().is_none());
        assert!(i2.proportional(&ComplexMatrix::zeros(2, 2), 1e-9).unwrap().is_none());
        assert!(i2.proportional(&ComplexMatrix::zeros(3, 2), 1e-9).is_err());
    }

    #[test]
    fn exact_kron_and_matmul() {
        let h = ComplexMatrix::from_fn(2, 2, |r, c| {
            let s = Cyclotomic8::frac_1_sqrt2();
            if r == 1 && c == 1 { -s } else { s }
        });
        assert_eq!(h.matmul(&h).unwrap(), ComplexMatrix::identity(2));
        let hh = h.kron(&h);
        assert_eq!(hh.matmul(&hh).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn json_roundtrip() {
        let m = ComplexMatrix::from_fn(2, 1, |r, _| Complex64::new(r as f64, 1.0));
        let j = m.to_json();
        assert_eq!(j.to_matrix().unwrap(), m);
    }
}
