//! Sparse column reduction over the rationals.
//!
//! Columns are reduced left to right against earlier columns sharing the same
//! lowest (largest-index) nonzero row. The reduction keeps enough state to
//! answer rank, kernel and membership queries, and to produce a linear
//! functional separating a non-member from the column space.

use num_rational::BigRational;
use num_traits::Zero;

use super::scalar::{one, Scalar, SmallRat};

pub type SparseVec = Vec<(usize, BigRational)>;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            cols: vec![Vec::new(); ncols],
        }
    }

    /// Builds a matrix from columns; entries are sorted by row and zeros dropped.
    /// Repeated row indices within a column are summed.
    pub fn from_columns(nrows: usize, cols: Vec<SparseVec>) -> Self {
        let ncols = cols.len();
        let cols = cols
            .into_iter()
            .map(|mut c| {
                c.sort_by_key(|(r, _)| *r);
                let mut out: SparseVec = Vec::with_capacity(c.len());
                for (r, v) in c {
                    assert!(r < nrows, "row index {r} out of range {nrows}");
                    match out.last_mut() {
                        Some((lr, lv)) if *lr == r => *lv += v,
                        _ => out.push((r, v)),
                    }
                }
                out.retain(|(_, v)| !v.is_zero());
                out
            })
            .collect();
        SparseMatrix { nrows, ncols, cols }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn column(&self, j: usize) -> &[(usize, BigRational)] {
        &self.cols[j]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(x.len(), self.ncols);
        let mut out = vec![BigRational::zero(); self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            if x[j].is_zero() {
                continue;
            }
            for (r, v) in col {
                out[*r] += v * &x[j];
            }
        }
        out
    }

    /// Row vector times matrix: `phi^T * self`.
    pub fn left_mul(&self, phi: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(phi.len(), self.nrows);
        self.cols
            .iter()
            .map(|col| {
                col.iter()
                    .fold(BigRational::zero(), |acc, (r, v)| acc + v * &phi[*r])
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        if let Some(red) = reduce::<SmallRat>(self, false) {
            return red.rank();
        }
        reduce::<BigRational>(self, false)
            .expect("big rational reduction cannot overflow")
            .rank()
    }
}

struct Reduced<S> {
    reduced: Vec<Vec<(usize, S)>>,
    combos: Vec<Vec<(usize, S)>>,
    pivot: Vec<Option<usize>>,
}

impl<S> Reduced<S> {
    fn rank(&self) -> usize {
        self.reduced.iter().filter(|c| !c.is_empty()).count()
    }
}

/// `a - f * b`, both sorted by index.
fn sub_scaled<S: Scalar>(a: &[(usize, S)], f: &S, b: &[(usize, S)]) -> Option<Vec<(usize, S)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let v = S::zero().sub_mul(f, &b[j].1)?;
            out.push((b[j].0, v));
            j += 1;
        } else {
            let v = a[i].1.sub_mul(f, &b[j].1)?;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

fn convert<S: Scalar>(v: &[(usize, BigRational)]) -> Option<Vec<(usize, S)>> {
    v.iter()
        .map(|(r, q)| S::from_big(q).map(|s| (*r, s)))
        .collect()
}

fn reduce<S: Scalar>(m: &SparseMatrix, track: bool) -> Option<Reduced<S>> {
    let mut pivot: Vec<Option<usize>> = vec![None; m.nrows];
    let mut reduced: Vec<Vec<(usize, S)>> = Vec::with_capacity(m.ncols);
    let mut combos: Vec<Vec<(usize, S)>> = Vec::with_capacity(if track { m.ncols } else { 0 });
    for j in 0..m.ncols {
        let mut col = convert::<S>(&m.cols[j])?;
        let mut combo = if track {
            vec![(j, one::<S>())]
        } else {
            Vec::new()
        };
        while let Some((low, low_val)) = col.last().cloned() {
            match pivot[low] {
                Some(k) => {
                    let other = &reduced[k];
                    let f = low_val.div(&other.last().expect("pivot column nonempty").1)?;
                    col = sub_scaled(&col, &f, other)?;
                    if track {
                        combo = sub_scaled(&combo, &f, &combos[k])?;
                    }
                }
                None => {
                    pivot[low] = Some(j);
                    break;
                }
            }
        }
        reduced.push(col);
        if track {
            combos.push(combo);
        }
    }
    Some(Reduced {
        reduced,
        combos,
        pivot,
    })
}

fn to_big_vec<S: Scalar>(v: Vec<(usize, S)>) -> SparseVec {
    v.into_iter().map(|(i, s)| (i, s.to_big())).collect()
}

/// Outcome of a membership query `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum Solve {
    Solution(Vec<BigRational>),
    /// `phi` with `phi^T A = 0` and `phi^T b != 0`.
    Witness(Vec<BigRational>),
}

/// A fully reduced matrix together with the column operations that produced it.
#[derive(Clone, Debug)]
pub struct ColumnReduction {
    nrows: usize,
    ncols: usize,
    reduced: Vec<SparseVec>,
    combos: Vec<SparseVec>,
    pivot: Vec<Option<usize>>,
}

impl ColumnReduction {
    pub fn new(m: &SparseMatrix) -> Self {
        let red = match reduce::<SmallRat>(m, true) {
            Some(r) => Reduced {
                reduced: r.reduced.into_iter().map(to_big_vec).collect(),
                combos: r.combos.into_iter().map(to_big_vec).collect(),
                pivot: r.pivot,
            },
            None => reduce::<BigRational>(m, true).expect("big rational reduction cannot overflow"),
        };
        ColumnReduction {
            nrows: m.nrows,
            ncols: m.ncols,
            reduced: red.reduced,
            combos: red.combos,
            pivot: red.pivot,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.reduced.iter().filter(|c| !c.is_empty()).count()
    }

    pub fn reduced_column(&self, j: usize) -> &[(usize, BigRational)] {
        &self.reduced[j]
    }

    /// Basis of the right null space, one sparse vector per column that reduced to zero.
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        self.reduced
            .iter()
            .zip(&self.combos)
            .filter(|(r, _)| r.is_empty())
            .map(|(_, c)| c.clone())
            .collect()
    }

    /// Reduces `b` against the column space; returns `(residual, x)` with `b = A x + residual`.
    pub fn reduce_vector(&self, b: &[BigRational]) -> (SparseVec, SparseVec) {
        assert_eq!(b.len(), self.nrows);
        let mut residual: SparseVec = b
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        let mut x: SparseVec = Vec::new();
        while let Some((low, low_val)) = residual.last().cloned() {
            let Some(k) = self.pivot[low] else { break };
            let col = &self.reduced[k];
            let f = low_val / &col.last().expect("pivot column nonempty").1;
            residual = sub_scaled(&residual, &f, col).expect("big rationals");
            let neg = -f;
            x = sub_scaled(&x, &neg, &self.combos[k]).expect("big rationals");
        }
        (residual, x)
    }

    pub fn solve(&self, b: &[BigRational]) -> Solve {
        let (residual, x) = self.reduce_vector(b);
        if residual.is_empty() {
            let mut dense = vec![BigRational::zero(); self.ncols];
            for (i, v) in x {
                dense[i] = v;
            }
            Solve::Solution(dense)
        } else {
            Solve::Witness(self.witness_for(&residual))
        }
    }

    /// Functional vanishing on every reduced column and equal to the residual's
    /// low coefficient on the residual.
    fn witness_for(&self, residual: &[(usize, BigRational)]) -> Vec<BigRational> {
        // clear every entry on a pivot row, so only the low term survives pairing with phi
        let mut residual = residual.to_vec();
        while let Some((r, v)) = residual
            .iter()
            .rev()
            .find(|(r, _)| self.pivot[*r].is_some())
            .cloned()
        {
            let col = &self.reduced[self.pivot[r].expect("pivot row")];
            let f = v / &col.last().expect("pivot column nonempty").1;
            residual = sub_scaled(&residual, &f, col).expect("big rationals");
        }
        let (low, _) = residual.last().expect("nonzero residual");
        let mut phi = vec![BigRational::zero(); self.nrows];
        phi[*low] = BigRational::from_integer(1.into());
        let mut cols: Vec<&SparseVec> = self.reduced.iter().filter(|c| !c.is_empty()).collect();
        cols.sort_by_key(|c| c.last().map(|(r, _)| *r));
        for col in cols {
            let (l, lv) = col.last().expect("nonempty");
            let s = col[..col.len() - 1]
                .iter()
                .fold(BigRational::zero(), |acc, (r, v)| acc + v * &phi[*r]);
            if !s.is_zero() {
                phi[*l] = -s / lv;
            }
        }
        super::primitive_vector(&phi)
    }
}
