//! Graded sheaf cohomology of `O(D)` and `T_X` on smooth complete toric
//! varieties.
//!
//! The fast path reads dimensions off reduced cohomology of the simplicial
//! complexes `V_{D,u}`. [`cech_line_bundle`] recomputes the line-bundle case
//! from the Čech complex of the maximal-cone cover and serves as an oracle.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::SparseMatrix;
use crate::fan::{pairing, Fan, ToricDivisor};
use crate::nerve::CechNerve;

/// Abstract simplicial complex on ray indices, stored by facets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VComplex {
    pub vertices: Vec<usize>,
    pub facets: Vec<Vec<usize>>,
}

impl VComplex {
    /// All faces including the empty one, grouped by size.
    pub fn faces_by_size(&self) -> Vec<Vec<Vec<usize>>> {
        let top = self.facets.iter().map(Vec::len).max().unwrap_or(0);
        let mut by_size: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); top + 1];
        by_size[0].insert(Vec::new());
        for facet in &self.facets {
            let k = facet.len();
            for mask in 1u64..(1u64 << k) {
                let face: Vec<usize> = (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| facet[i])
                    .collect();
                by_size[face.len()].insert(face);
            }
        }
        by_size
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect()
    }

    /// Edges (faces of size 2), sorted.
    pub fn edges(&self) -> Vec<Vec<usize>> {
        self.faces_by_size().get(2).cloned().unwrap_or_default()
    }
}

/// Rays with `<u, rho> < -a_rho`; for integral data this is `<u, rho> <= -a_rho - 1`.
pub fn violating_rays(f: &Fan, d: &ToricDivisor, u: &[i64]) -> Vec<usize> {
    (0..f.num_rays())
        .filter(|&r| pairing(u, f.ray(r)) < -d.coeffs[r])
        .collect()
}

fn check_shapes(f: &Fan, d: &ToricDivisor, u: &[i64]) -> Result<()> {
    if d.coeffs.len() != f.num_rays() {
        return Err(Error::Dimension(format!(
            "divisor has {} coefficients, fan has {} rays",
            d.coeffs.len(),
            f.num_rays()
        )));
    }
    if u.len() != f.dim() {
        return Err(Error::Dimension(format!(
            "degree has {} entries, lattice has rank {}",
            u.len(),
            f.dim()
        )));
    }
    Ok(())
}

pub fn build_vcomplex(f: &Fan, d: &ToricDivisor, u: &[i64]) -> Result<VComplex> {
    check_shapes(f, d, u)?;
    let vertices = violating_rays(f, d, u);
    Ok(vcomplex_on(f, vertices))
}

fn vcomplex_on(f: &Fan, vertices: Vec<usize>) -> VComplex {
    let mut cells: Vec<Vec<usize>> = f
        .max_cones()
        .iter()
        .map(|c| {
            c.iter()
                .copied()
                .filter(|r| vertices.binary_search(r).is_ok())
                .collect::<Vec<usize>>()
        })
        .filter(|c| !c.is_empty())
        .collect();
    cells.sort();
    cells.dedup();
    let facets: Vec<Vec<usize>> = cells
        .iter()
        .filter(|c| {
            !cells
                .iter()
                .any(|o| o.len() > c.len() && c.iter().all(|x| o.contains(x)))
        })
        .cloned()
        .collect();
    VComplex { vertices, facets }
}

/// Dimensions of `H~^{-1}, ..., H~^{len-2}` over the rationals, padded with
/// zeros to `len` entries.
pub fn reduced_cohomology(v: &VComplex, len: usize) -> Vec<usize> {
    let faces = v.faces_by_size();
    let dims: Vec<usize> = faces.iter().map(Vec::len).collect();
    let mut ranks = vec![0usize; faces.len()];
    for k in 0..faces.len().saturating_sub(1) {
        let index: BTreeMap<&[usize], usize> = faces[k + 1]
            .iter()
            .enumerate()
            .map(|(i, f)| (f.as_slice(), i))
            .collect();
        let cols = faces[k]
            .iter()
            .map(|face| {
                let mut col = Vec::new();
                for big in &faces[k + 1] {
                    if let Some(pos) = missing_position(face, big) {
                        let sign = if pos % 2 == 0 { 1 } else { -1 };
                        col.push((
                            index[big.as_slice()],
                            BigRational::from_integer(sign.into()),
                        ));
                    }
                }
                col
            })
            .collect();
        ranks[k] = SparseMatrix::from_columns(faces[k + 1].len(), cols).rank();
    }
    let mut out: Vec<usize> = (0..dims.len())
        .map(|k| {
            let prev = if k == 0 { 0 } else { ranks[k - 1] };
            dims[k] - ranks[k] - prev
        })
        .collect();
    debug_assert!(out[len.min(out.len())..].iter().all(|&x| x == 0));
    out.resize(len, 0);
    out
}

/// If `big = small + {x}`, the position of `x` in `big`.
fn missing_position(small: &[usize], big: &[usize]) -> Option<usize> {
    if big.len() != small.len() + 1 {
        return None;
    }
    let mut pos = None;
    let mut j = 0;
    for (i, &b) in big.iter().enumerate() {
        if j < small.len() && small[j] == b {
            j += 1;
        } else if pos.is_none() {
            pos = Some(i);
        } else {
            return None;
        }
    }
    if j == small.len() {
        pos
    } else {
        None
    }
}

/// `h^0 .. h^n` of `O(D)` in degree `u`, via `H^i(O(D))_u = H~^{i-1}(V_{D,u})`.
pub fn h_line_bundle(f: &Fan, d: &ToricDivisor, u: &[i64]) -> Result<Vec<usize>> {
    let v = build_vcomplex(f, d, u)?;
    Ok(reduced_cohomology(&v, f.dim() + 1))
}

/// `h^0 .. h^n` of `O(D)` in degree `u` from the Čech complex of the maximal-cone cover.
pub fn cech_line_bundle(f: &Fan, d: &ToricDivisor, u: &[i64]) -> Result<Vec<usize>> {
    let nerve = CechNerve::new(f, f.dim() + 1);
    cech_line_bundle_with(&nerve, f, d, u)
}

/// As [`cech_line_bundle`], reusing a nerve with at least `dim + 2` levels
/// (or all levels when the fan has fewer maximal cones).
pub fn cech_line_bundle_with(
    nerve: &CechNerve,
    f: &Fan,
    d: &ToricDivisor,
    u: &[i64],
) -> Result<Vec<usize>> {
    check_shapes(f, d, u)?;
    let bad = violating_rays(f, d, u);
    let n = f.dim();
    let levels = nerve.num_levels().min(n + 2);
    // component at a tuple is Q iff no violating ray lies on the intersection
    let present: Vec<Vec<Option<usize>>> = (0..levels)
        .map(|p| {
            let mut next = 0;
            nerve
                .level(p)
                .cones
                .iter()
                .map(|c| {
                    if bad.iter().any(|&r| c.contains(r)) {
                        None
                    } else {
                        next += 1;
                        Some(next - 1)
                    }
                })
                .collect()
        })
        .collect();
    let dims: Vec<usize> = present
        .iter()
        .map(|lvl| lvl.iter().filter(|x| x.is_some()).count())
        .collect();
    let one = BigRational::one();
    let mut ranks = vec![0usize; levels];
    for p in 0..levels.saturating_sub(1) {
        let mut cols = Vec::with_capacity(dims[p]);
        for (s, idx) in present[p].iter().enumerate() {
            if idx.is_none() {
                continue;
            }
            let col: Vec<(usize, BigRational)> = nerve
                .cofaces(p, s)
                .iter()
                .filter_map(|&(t, sign)| {
                    present[p + 1][t]
                        .map(|row| (row, if sign > 0 { one.clone() } else { -one.clone() }))
                })
                .collect();
            cols.push(col);
        }
        ranks[p] = SparseMatrix::from_columns(dims[p + 1], cols).rank();
    }
    let mut out = vec![0usize; n + 1];
    for i in 0..=n.min(levels - 1) {
        let prev = if i == 0 { 0 } else { ranks[i - 1] };
        out[i] = dims[i] - ranks[i] - prev;
    }
    Ok(out)
}

/// `dim H^i(T_X)_u` for `i >= 1` as `sum_rho dim H~^{i-1}(V_{D_rho, u})`.
pub fn h_tangent_graded(f: &Fan, u: &[i64], i: usize) -> Result<usize> {
    if i == 0 {
        return Err(Error::UnsupportedIndex {
            index: 0,
            hint: "H^0(T_X) carries a torus correction; use cech::tangent_cohomology",
        });
    }
    if i > f.dim() {
        return Ok(0);
    }
    Ok(h_tangent_all(f, u)?[i])
}

/// `[_, h^1, ..., h^n]` of `T_X` in degree `u`; entry 0 is left at zero.
fn h_tangent_all(f: &Fan, u: &[i64]) -> Result<Vec<usize>> {
    let n = f.dim();
    let mut out = vec![0usize; n + 1];
    for rho in 0..f.num_rays() {
        let d = ToricDivisor::prime(f.num_rays(), rho);
        let v = build_vcomplex(f, &d, u)?;
        let red = reduced_cohomology(&v, n + 1);
        for i in 1..=n {
            out[i] += red[i];
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Sheaf {
    LineBundle { divisor: ToricDivisor },
    Tangent,
}

/// Which sheaf and which cohomological indices a scan reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SheafDescriptor {
    pub sheaf: Sheaf,
    pub indices: Vec<usize>,
}

impl SheafDescriptor {
    pub fn line_bundle(divisor: ToricDivisor, indices: Vec<usize>) -> Self {
        SheafDescriptor {
            sheaf: Sheaf::LineBundle { divisor },
            indices,
        }
    }

    pub fn tangent(indices: Vec<usize>) -> Self {
        SheafDescriptor {
            sheaf: Sheaf::Tangent,
            indices,
        }
    }
}

/// Nonzero graded dimensions over the box `max|u_i| <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedTable {
    pub sheaf: SheafDescriptor,
    pub bound: i64,
    /// degree -> dimensions at `sheaf.indices`; all-zero degrees are absent
    pub entries: BTreeMap<Vec<i64>, Vec<usize>>,
    pub boundary_warning: bool,
}

impl GradedTable {
    pub fn total(&self) -> usize {
        self.entries.values().flatten().sum()
    }

    /// One tab-separated line per degree: coordinates, then dimensions.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for (u, dims) in &self.entries {
            let fields: Vec<String> = u
                .iter()
                .map(ToString::to_string)
                .chain(dims.iter().map(ToString::to_string))
                .collect();
            s.push_str(&fields.join("\t"));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.entries
                .iter()
                .map(|(u, dims)| serde_json::json!({ "degree": u, "dims": dims }))
                .collect(),
        )
    }
}

/// Every degree of `[-bound, bound]^n` in lexicographic order.
pub fn box_degrees(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-bound..=bound).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn graded_dims(f: &Fan, sheaf: &SheafDescriptor, u: &[i64]) -> Result<Vec<usize>> {
    let all = match &sheaf.sheaf {
        Sheaf::LineBundle { divisor } => h_line_bundle(f, divisor, u)?,
        Sheaf::Tangent => {
            if sheaf.indices.contains(&0) {
                return Err(Error::UnsupportedIndex {
                    index: 0,
                    hint: "H^0(T_X) carries a torus correction; use cech::tangent_cohomology",
                });
            }
            h_tangent_all(f, u)?
        }
    };
    Ok(sheaf
        .indices
        .iter()
        .map(|&i| all.get(i).copied().unwrap_or(0))
        .collect())
}

pub fn scan_box(f: &Fan, sheaf: &SheafDescriptor, bound: i64) -> Result<GradedTable> {
    if bound < 1 {
        return Err(Error::InvalidArgument(
            "scan bound must be at least 1".into(),
        ));
    }
    let degrees = box_degrees(f.dim(), bound);
    let rows: Vec<(Vec<i64>, Vec<usize>)> = degrees
        .into_par_iter()
        .map(|u| graded_dims(f, sheaf, &u).map(|d| (u, d)))
        .collect::<Result<Vec<_>>>()?;
    let entries: BTreeMap<Vec<i64>, Vec<usize>> = rows
        .into_iter()
        .filter(|(_, d)| d.iter().any(|&x| x > 0))
        .collect();
    let boundary_warning = entries
        .keys()
        .any(|u| u.iter().map(|x| x.abs()).max().unwrap_or(0) >= bound);
    Ok(GradedTable {
        sheaf: sheaf.clone(),
        bound,
        entries,
        boundary_warning,
    })
}
