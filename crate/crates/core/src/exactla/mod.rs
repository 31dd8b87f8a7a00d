//! Exact integer and rational linear algebra.
//!
//! Dense matrices use fraction-free (Bareiss) elimination for determinants and
//! ranks. Large, structured matrices such as Čech differentials go through
//! [`sparse`].

mod scalar;
pub mod sparse;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use sparse::{ColumnReduction, Solve, SparseMatrix, SparseVec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let entries = rows.iter().flatten().cloned().map(Into::into).collect();
        IntMatrix::new(rows.len(), ncols, entries)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns<T: Into<BigInt> + Clone>(cols: &[Vec<T>]) -> Result<Self> {
        Ok(IntMatrix::from_rows(cols)?.transpose())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigInt::one();
        }
        IntMatrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        IntMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = vec![BigInt::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    entries[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        IntMatrix::new(self.rows, other.cols, entries)
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|e| BigRational::from_integer(e.clone()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        // BigRational keeps itself in lowest terms with a positive denominator.
        Ok(RatMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<BigRational>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        RatMatrix::new(rows.len(), ncols, rows.iter().flatten().cloned().collect())
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Ok(IntMatrix::from_rows(rows)?.to_rat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix::identity(n).to_rat()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `phi^T * self`
    pub fn left_mul(&self, phi: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(phi.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(BigRational::zero(), |acc, i| acc + &phi[i] * self.get(i, j))
            })
            .collect()
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        let cols = (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .filter(|&i| !self.get(i, j).is_zero())
                    .map(|i| (i, self.get(i, j).clone()))
                    .collect()
            })
            .collect();
        SparseMatrix::from_columns(self.rows, cols)
    }

    /// Each row scaled by the lcm of its denominators.
    fn clear_denominators(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
                row.iter().map(|q| q.numer() * (&l / q.denom())).collect()
            })
            .collect()
    }
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Fraction-free elimination on `m` in place. Returns the rank and the sign of
/// the row permutation used; on a square full-rank matrix the last pivot is the
/// determinant up to that sign.
fn bareiss(m: &mut [Vec<BigInt>], ncols: usize) -> (usize, bool) {
    let nrows = m.len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut negated = false;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        if p != rank {
            m.swap(p, rank);
            negated = !negated;
        }
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                let v = (&m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    (rank, negated)
}

pub fn det(m: &IntMatrix) -> Result<BigInt> {
    if m.rows != m.cols {
        return Err(Error::Dimension(format!(
            "determinant of non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| m.entries[i * n..(i + 1) * n].to_vec())
        .collect();
    // Full Bareiss without column skipping: a zero column at step k means det = 0.
    let mut prev = BigInt::one();
    let mut negated = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !rows[r][k].is_zero()) else {
            return Ok(BigInt::zero());
        };
        if p != k {
            rows.swap(p, k);
            negated = !negated;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                rows[i][j] = (&rows[k][k] * &rows[i][j] - &rows[i][k] * &rows[k][j]) / &prev;
            }
            rows[i][k] = BigInt::zero();
        }
        prev = rows[k][k].clone();
    }
    let d = rows[n - 1][n - 1].clone();
    Ok(if negated { -d } else { d })
}

pub fn rank(m: &RatMatrix) -> usize {
    let mut rows = m.clear_denominators();
    bareiss(&mut rows, m.cols).0
}

/// Reduced row echelon form; returns the pivot column of each nonzero row.
fn rref(m: &RatMatrix) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut rows: Vec<Vec<BigRational>> = (0..m.rows).map(|i| m.row(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(p, r);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Right null space, each basis vector scaled to coprime integers with a
/// positive leading entry.
pub fn kernel_basis(m: &RatMatrix) -> Vec<Vec<BigRational>> {
    let (rows, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); m.cols];
            v[f] = BigRational::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            primitive_vector(&v)
        })
        .collect()
}

/// Either `x` with `a x = b`, or `phi` with `phi^T a = 0` and `phi^T b != 0`.
pub fn solve(a: &RatMatrix, b: &[BigRational]) -> Result<Solve> {
    if b.len() != a.rows {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows
        )));
    }
    Ok(ColumnReduction::new(&a.to_sparse()).solve(b))
}

/// Scales `v` to integer entries with content 1 and a positive first nonzero entry.
pub fn primitive_vector(v: &[BigRational]) -> Vec<BigRational> {
    let l = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&l / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter()
        .map(|x| BigRational::from_integer(x / &g * &sign))
        .collect()
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}
