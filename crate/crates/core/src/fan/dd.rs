//! Double description for pointed cones `{x : A x >= 0}` with integer data.
//!
//! The iteration starts from a known V-representation (the generators of a
//! simplicial cone together with its facet inequalities) and intersects with
//! one half-space at a time. Adjacency of extreme rays uses the algebraic
//! test: two rays span a 2-face iff the constraints tight at both have rank
//! `n - 2`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::exactla::{rank, IntMatrix};

pub(crate) type IVec = Vec<BigInt>;

pub(crate) fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn primitive(v: IVec) -> IVec {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}

fn tight_rank(constraints: &[IVec], tight: &[usize], dim: usize) -> usize {
    if tight.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<BigInt>> = tight.iter().map(|&i| constraints[i].clone()).collect();
    let m = IntMatrix::from_rows(&rows).expect("rectangular").to_rat();
    debug_assert_eq!(m.cols(), dim);
    rank(&m)
}

pub(crate) struct Cone {
    dim: usize,
    pub(crate) generators: Vec<IVec>,
    constraints: Vec<IVec>,
}

impl Cone {
    /// `generators` must be the extreme rays of `{x : constraints x >= 0}`.
    pub(crate) fn from_double_description(
        dim: usize,
        generators: Vec<IVec>,
        constraints: Vec<IVec>,
    ) -> Self {
        Cone {
            dim,
            generators,
            constraints,
        }
    }

    fn tight_set(&self, g: &[BigInt]) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, a)| idot(a, g).is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub(crate) fn intersect_halfspace(&mut self, a: IVec) {
        let values: Vec<BigInt> = self.generators.iter().map(|g| idot(&a, g)).collect();
        let tight: Vec<Vec<usize>> = self.generators.iter().map(|g| self.tight_set(g)).collect();
        let mut next: Vec<IVec> = Vec::new();
        for (g, v) in self.generators.iter().zip(&values) {
            if !v.is_negative() {
                next.push(g.clone());
            }
        }
        for (p, vp) in values.iter().enumerate().filter(|(_, v)| v.is_positive()) {
            for (n, vn) in values.iter().enumerate().filter(|(_, v)| v.is_negative()) {
                let common: Vec<usize> = tight[p]
                    .iter()
                    .copied()
                    .filter(|i| tight[n].contains(i))
                    .collect();
                if self.dim >= 2 && tight_rank(&self.constraints, &common, self.dim) != self.dim - 2
                {
                    continue;
                }
                let combo: IVec = self.generators[n]
                    .iter()
                    .zip(&self.generators[p])
                    .map(|(gn, gp)| vp * gn - vn * gp)
                    .collect();
                next.push(primitive(combo));
            }
        }
        next.sort();
        next.dedup();
        self.constraints.push(a);
        self.generators = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> IVec {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cutting_the_positive_quadrant_by_a_diagonal() {
        let mut c = Cone::from_double_description(
            2,
            vec![iv(&[1, 0]), iv(&[0, 1])],
            vec![iv(&[1, 0]), iv(&[0, 1])],
        );
        c.intersect_halfspace(iv(&[-1, 1]));
        let mut g = c.generators.clone();
        g.sort();
        assert_eq!(g, vec![iv(&[0, 1]), iv(&[1, 1])]);
    }

    #[test]
    fn octant_cut_to_a_lower_dimensional_face() {
        let id = vec![iv(&[1, 0, 0]), iv(&[0, 1, 0]), iv(&[0, 0, 1])];
        let mut c = Cone::from_double_description(3, id.clone(), id);
        c.intersect_halfspace(iv(&[0, 0, -1]));
        let mut g = c.generators.clone();
        g.sort();
        assert_eq!(g, vec![iv(&[0, 1, 0]), iv(&[1, 0, 0])]);
        c.intersect_halfspace(iv(&[-1, -1, 0]));
        assert!(c.generators.is_empty());
    }
}
