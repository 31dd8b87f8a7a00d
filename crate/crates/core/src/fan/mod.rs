//! Smooth complete fans: construction, validation and face calculus.

mod dd;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{det, IntMatrix};

use dd::IVec;

/// A fan in `N = Z^dim`, given by primitive ray generators and maximal cones.
///
/// Maximal cones are stored sorted and deduplicated. The order of `rays` is
/// the order of divisor coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

/// A cone of a fan, identified by its ray indices (strictly increasing).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    rays: Vec<usize>,
}

impl Cone {
    pub fn new(mut rays: Vec<usize>) -> Self {
        rays.sort_unstable();
        rays.dedup();
        Cone { rays }
    }

    pub fn zero() -> Self {
        Cone { rays: Vec::new() }
    }

    pub fn rays(&self) -> &[usize] {
        &self.rays
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn contains(&self, ray: usize) -> bool {
        self.rays.binary_search(&ray).is_ok()
    }

    pub fn intersect(&self, other: &Cone) -> Cone {
        Cone {
            rays: self
                .rays
                .iter()
                .copied()
                .filter(|r| other.contains(*r))
                .collect(),
        }
    }
}

/// `D = sum a_rho D_rho`, one coefficient per ray.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToricDivisor {
    pub coeffs: Vec<i64>,
}

impl ToricDivisor {
    pub fn new(coeffs: Vec<i64>) -> Self {
        ToricDivisor { coeffs }
    }

    pub fn zero(num_rays: usize) -> Self {
        ToricDivisor {
            coeffs: vec![0; num_rays],
        }
    }

    /// The prime divisor `D_rho`.
    pub fn prime(num_rays: usize, ray: usize) -> Self {
        let mut coeffs = vec![0; num_rays];
        coeffs[ray] = 1;
        ToricDivisor { coeffs }
    }
}

/// Rows `w_k` with `<w_j, rho_k> = delta_jk` on the rays of one maximal cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualBasis {
    pub cone: usize,
    pub rows: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct FanReport {
    pub smooth: bool,
    pub complete: bool,
    pub fan_condition: bool,
    pub failures: Vec<String>,
}

impl FanReport {
    pub fn is_valid(&self) -> bool {
        self.smooth && self.complete && self.fan_condition
    }
}

pub fn pairing(u: &[i64], v: &[i64]) -> i64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |acc, &x| acc.gcd(&x))
}

pub fn build_fan(dim: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
    if dim == 0 {
        return Err(Error::InvalidFan("dimension must be positive".into()));
    }
    for (i, r) in rays.iter().enumerate() {
        if r.len() != dim {
            return Err(Error::InvalidFan(format!(
                "ray {i} has {} coordinates, expected {dim}",
                r.len()
            )));
        }
        if r.iter().all(|&x| x == 0) {
            return Err(Error::InvalidFan(format!("ray {i} is zero")));
        }
        if gcd_all(r) != 1 {
            return Err(Error::InvalidFan(format!("ray {i} {r:?} is not primitive")));
        }
    }
    for i in 0..rays.len() {
        for j in 0..i {
            if rays[i] == rays[j] {
                return Err(Error::InvalidFan(format!(
                    "ray {i} duplicates ray {j} {:?}",
                    rays[i]
                )));
            }
        }
    }
    for (k, c) in max_cones.iter().enumerate() {
        if c.is_empty() {
            return Err(Error::InvalidFan(format!("cone {k} has no rays")));
        }
        if let Some(&bad) = c.iter().find(|&&r| r >= rays.len()) {
            return Err(Error::InvalidFan(format!(
                "cone {k} references ray {bad}, but there are {} rays",
                rays.len()
            )));
        }
        if c.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFan(format!(
                "cone {k} {c:?} is not strictly increasing"
            )));
        }
    }
    let mut max_cones = max_cones;
    max_cones.sort();
    max_cones.dedup();
    Ok(Fan {
        dim,
        rays,
        max_cones,
    })
}

impl Fan {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn num_max_cones(&self) -> usize {
        self.max_cones.len()
    }

    pub fn max_cone(&self, k: usize) -> Cone {
        Cone {
            rays: self.max_cones[k].clone(),
        }
    }

    fn ray_matrix(&self, cone: &[usize]) -> IntMatrix {
        let cols: Vec<Vec<i64>> = cone.iter().map(|&r| self.rays[r].clone()).collect();
        IntMatrix::from_columns(&cols).expect("rays have equal length")
    }

    /// Determinant of the ray matrix of a maximal cone, if it is square.
    pub fn cone_det(&self, k: usize) -> Option<BigInt> {
        let cone = &self.max_cones[k];
        if cone.len() != self.dim {
            return None;
        }
        Some(det(&self.ray_matrix(cone)).expect("square"))
    }
}

/// The fan of the toric 3-fold with rays the columns of
/// `[[1,0,-1,0,0,0],[0,1,2,-1,0,0],[0,0,-2,3,1,-1]]`.
pub fn example_fan() -> Fan {
    let rays = vec![
        vec![1, 0, 0],
        vec![0, 1, 0],
        vec![-1, 2, -2],
        vec![0, -1, 3],
        vec![0, 0, 1],
        vec![0, 0, -1],
    ];
    // sigma_125, sigma_126, sigma_145, sigma_146, sigma_235, sigma_236, sigma_345, sigma_346
    let cones = vec![
        vec![0, 1, 4],
        vec![0, 1, 5],
        vec![0, 3, 4],
        vec![0, 3, 5],
        vec![1, 2, 4],
        vec![1, 2, 5],
        vec![2, 3, 4],
        vec![2, 3, 5],
    ];
    build_fan(3, rays, cones).expect("example fan is well formed")
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Fan of `P^m`: rays `e_1..e_m, -(e_1+...+e_m)`, cones all `m`-subsets.
pub fn projective_space_fan(m: usize) -> Result<Fan> {
    if m < 1 {
        return Err(Error::InvalidArgument(
            "projective space needs dimension at least 1".into(),
        ));
    }
    let mut rays: Vec<Vec<i64>> = (0..m)
        .map(|i| (0..m).map(|j| i64::from(i == j)).collect())
        .collect();
    rays.push(vec![-1; m]);
    build_fan(m, rays, subsets(m + 1, m))
}

pub fn product_fan(f1: &Fan, f2: &Fan) -> Fan {
    let (n1, n2) = (f1.dim, f2.dim);
    let mut rays = Vec::with_capacity(f1.num_rays() + f2.num_rays());
    for r in &f1.rays {
        let mut v = r.clone();
        v.extend(std::iter::repeat_n(0, n2));
        rays.push(v);
    }
    for t in &f2.rays {
        let mut v = vec![0; n1];
        v.extend_from_slice(t);
        rays.push(v);
    }
    let offset = f1.num_rays();
    let mut cones = Vec::with_capacity(f1.num_max_cones() * f2.num_max_cones());
    for s in &f1.max_cones {
        for t in &f2.max_cones {
            let mut c = s.clone();
            c.extend(t.iter().map(|&i| i + offset));
            cones.push(c);
        }
    }
    build_fan(n1 + n2, rays, cones).expect("product of well-formed fans is well formed")
}

fn check_fan_condition(f: &Fan, report: &mut FanReport) -> bool {
    let n = f.dim;
    // H-representation of each maximal cone: sign(det) * adj(R) x >= 0.
    let mut hreps: Vec<Option<Vec<IVec>>> = Vec::with_capacity(f.num_max_cones());
    for (k, cone) in f.max_cones.iter().enumerate() {
        let d = f.cone_det(k);
        match d {
            Some(d) if !d.is_zero() => hreps.push(Some(inequalities(f, cone, &d))),
            _ => {
                report.failures.push(format!(
                    "cone {k} {cone:?} is not full-dimensional simplicial"
                ));
                hreps.push(None);
            }
        }
    }
    if hreps.iter().any(Option::is_none) {
        return false;
    }
    let hreps: Vec<Vec<IVec>> = hreps.into_iter().map(Option::unwrap).collect();
    let ivec = |r: usize| -> IVec { f.rays[r].iter().map(|&x| BigInt::from(x)).collect() };
    let mut ok = true;
    for a in 0..f.num_max_cones() {
        for b in a + 1..f.num_max_cones() {
            let gens: Vec<IVec> = f.max_cones[a].iter().map(|&r| ivec(r)).collect();
            let mut cone = dd::Cone::from_double_description(n, gens, hreps[a].clone());
            for ineq in &hreps[b] {
                cone.intersect_halfspace(ineq.clone());
            }
            let found: BTreeSet<IVec> = cone.generators.into_iter().collect();
            let expected: BTreeSet<IVec> = f.max_cones[a]
                .iter()
                .filter(|r| f.max_cones[b].contains(r))
                .map(|&r| ivec(r))
                .collect();
            if found != expected {
                ok = false;
                report.failures.push(format!(
                    "cones {a} and {b} intersect in more than their common face"
                ));
            }
        }
    }
    ok
}

/// Rows `sign(det R) * adj(R)`, i.e. positive multiples of the rows of `R^{-1}`.
fn inequalities(f: &Fan, cone: &[usize], d: &BigInt) -> Vec<IVec> {
    let n = f.dim;
    let m = f.ray_matrix(cone);
    let sign = if d.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    (0..n)
        .map(|i| {
            let row: IVec = (0..n)
                .map(|j| {
                    // adj(R)[i][j] = (-1)^(i+j) * minor(R, j, i)
                    let minor_rows: Vec<Vec<BigInt>> = (0..n)
                        .filter(|&r| r != j)
                        .map(|r| {
                            (0..n)
                                .filter(|&c| c != i)
                                .map(|c| m.get(r, c).clone())
                                .collect()
                        })
                        .collect();
                    let minor = if n == 1 {
                        BigInt::one()
                    } else {
                        det(&IntMatrix::from_rows(&minor_rows).expect("square")).expect("square")
                    };
                    if (i + j) % 2 == 0 {
                        &sign * minor
                    } else {
                        -(&sign * minor)
                    }
                })
                .collect();
            dd::primitive(row)
        })
        .collect()
}

fn check_complete(f: &Fan, report: &mut FanReport) -> bool {
    let n = f.dim;
    if f.max_cones.iter().any(|c| c.len() != n) {
        report
            .failures
            .push("some maximal cone does not have dim rays".into());
        return false;
    }
    let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (k, c) in f.max_cones.iter().enumerate() {
        for skip in 0..n {
            let facet: Vec<usize> = c
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &r)| r)
                .collect();
            facets.entry(facet).or_default().push(k);
        }
    }
    let mut ok = true;
    for (facet, cones) in &facets {
        if cones.len() != 2 {
            ok = false;
            report.failures.push(format!(
                "facet {facet:?} lies in {} maximal cones, expected 2",
                cones.len()
            ));
        }
    }
    // dual graph connectivity
    let m = f.num_max_cones();
    let mut adj = vec![Vec::new(); m];
    for cones in facets.values() {
        for &a in cones {
            for &b in cones {
                if a != b {
                    adj[a].push(b);
                }
            }
        }
    }
    let mut seen = vec![false; m];
    let mut queue = VecDeque::new();
    if m > 0 {
        seen[0] = true;
        queue.push_back(0);
    }
    while let Some(a) = queue.pop_front() {
        for &b in &adj[a] {
            if !seen[b] {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    if m == 0 || seen.iter().any(|s| !s) {
        ok = false;
        report
            .failures
            .push("maximal cones are not connected through shared facets".into());
    }
    ok
}

pub fn validate_fan(f: &Fan) -> FanReport {
    let mut report = FanReport {
        smooth: true,
        ..Default::default()
    };
    for k in 0..f.num_max_cones() {
        match f.cone_det(k) {
            Some(d) if d.abs().is_one() => {}
            Some(d) => {
                report.smooth = false;
                report
                    .failures
                    .push(format!("cone {k} has determinant {d}"));
            }
            None => {
                report.smooth = false;
                report.failures.push(format!(
                    "cone {k} has {} rays in dimension {}",
                    f.max_cones[k].len(),
                    f.dim
                ));
            }
        }
    }
    report.complete = check_complete(f, &mut report);
    report.fan_condition = check_fan_condition(f, &mut report);
    report
}

pub fn tuple_intersection(f: &Fan, cones: &[usize]) -> Result<Cone> {
    let mut it = cones.iter();
    let Some(&first) = it.next() else {
        return Err(Error::InvalidArgument("empty cone tuple".into()));
    };
    let check = |k: usize| -> Result<()> {
        if k >= f.num_max_cones() {
            Err(Error::OutOfRange(format!(
                "maximal cone {k} (fan has {})",
                f.num_max_cones()
            )))
        } else {
            Ok(())
        }
    };
    check(first)?;
    let mut acc = f.max_cone(first);
    for &k in it {
        check(k)?;
        acc = acc.intersect(&f.max_cone(k));
    }
    Ok(acc)
}

pub fn dual_basis(f: &Fan, cone: usize) -> Result<DualBasis> {
    if cone >= f.num_max_cones() {
        return Err(Error::OutOfRange(format!("maximal cone {cone}")));
    }
    let d = f
        .cone_det(cone)
        .ok_or_else(|| Error::NotUnimodular(format!("cone {cone} is not full-dimensional")))?;
    if !d.abs().is_one() {
        return Err(Error::NotUnimodular(format!(
            "cone {cone} has determinant {d}"
        )));
    }
    // W = R^{-1} = adj(R) / det
    let rows = inequalities(f, &f.max_cones[cone], &d)
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| i64::try_from(x).expect("dual basis entries fit in i64"))
                .collect()
        })
        .collect();
    Ok(DualBasis { cone, rows })
}

pub fn toric_boundary(f: &Fan) -> ToricDivisor {
    ToricDivisor {
        coeffs: vec![1; f.num_rays()],
    }
}

pub fn picard_rank(f: &Fan) -> Result<usize> {
    let report = validate_fan(f);
    if !(report.smooth && report.complete) {
        return Err(Error::InvalidFan(format!(
            "Picard rank needs a smooth complete fan: {}",
            report.failures.join("; ")
        )));
    }
    Ok(f.num_rays() - f.dim)
}
