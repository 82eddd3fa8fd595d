//! Square matrices over an exact integer ring and fraction-free elimination.

use std::ops::{Index, IndexMut};

use num_rational::Ratio;
use num_traits::Zero;

use crate::scalar::ExactInt;

/// Dense square matrix, row major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

impl<T: ExactInt> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    /// Builds from rows. Panics if the rows do not form a square.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend(row);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn map<S: ExactInt>(&self, f: impl Fn(&T) -> S) -> Matrix<S> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Principal submatrix on the given index set, in the given order.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Simultaneous row/column permutation: `out[(i, j)] = self[(p[i], p[j])]`.
    pub fn permuted(&self, p: &[usize]) -> Self {
        assert_eq!(p.len(), self.n);
        self.principal(p)
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    /// Determinant by Bareiss elimination with row pivoting.
    pub fn determinant(&self) -> T {
        if self.n == 0 {
            return T::one();
        }
        let mut a = self.rows();
        let mut sign = T::one();
        let mut prev = T::one();
        let n = self.n;
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                    a[i][j] = v / prev.clone();
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    /// Leading principal minors `det(M_1), ..., det(M_n)`.
    pub fn leading_principal_minors(&self) -> Vec<T> {
        (1..=self.n)
            .map(|k| self.principal(&(0..k).collect::<Vec<_>>()).determinant())
            .collect()
    }

    /// Sylvester's criterion, `(-1)^k det(M_k) > 0` for every k.
    ///
    /// Runs a single Bareiss pass without pivoting: the k-th pivot equals
    /// the k-th leading minor as long as all earlier pivots are nonzero, and
    /// the first zero pivot already fails the criterion.
    pub fn is_negative_definite(&self) -> bool {
        let n = self.n;
        let mut a = self.rows();
        let mut prev = T::one();
        for k in 0..n {
            let minor = &a[k][k];
            let ok = if k % 2 == 0 {
                minor.is_negative()
            } else {
                minor.is_positive()
            };
            if !ok {
                return false;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                    a[i][j] = v / prev.clone();
                }
            }
            prev = a[k][k].clone();
        }
        true
    }

    /// Solves `self * x = rhs` exactly. Returns `None` when singular.
    ///
    /// Fraction-free forward elimination on the augmented matrix keeps every
    /// intermediate entry integral; only back substitution leaves the ring.
    pub fn solve(&self, rhs: &[T]) -> Option<Vec<Ratio<T>>> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let mut a: Vec<Vec<T>> = self
            .rows()
            .into_iter()
            .zip(rhs.iter().cloned())
            .map(|(mut row, b)| {
                row.push(b);
                row
            })
            .collect();
        let mut prev = T::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                let r = (k + 1..n).find(|&r| !a[r][k].is_zero())?;
                a.swap(k, r);
            }
            for i in k + 1..n {
                for j in k + 1..=n {
                    let v = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                    a[i][j] = v / prev.clone();
                }
                a[i][k] = T::zero();
            }
            prev = a[k][k].clone();
        }
        let mut x: Vec<Ratio<T>> = vec![Ratio::zero(); n];
        for i in (0..n).rev() {
            let mut acc = Ratio::from_integer(a[i][n].clone());
            for j in i + 1..n {
                acc = acc - Ratio::from_integer(a[i][j].clone()) * x[j].clone();
            }
            x[i] = acc / Ratio::from_integer(a[i][i].clone());
        }
        Some(x)
    }

    /// Matrix-vector product over the rationals.
    pub fn mul_vec(&self, x: &[Ratio<T>]) -> Vec<Ratio<T>> {
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(Ratio::zero(), |acc, j| {
                    acc + Ratio::from_integer(self[(i, j)].clone()) * x[j].clone()
                })
            })
            .collect()
    }
}

impl<T: ExactInt> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }
}
