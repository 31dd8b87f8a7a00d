//! Certificates that a pair `(X, D)` with `D` the toric boundary has an
//! obstructed first-order deformation.
//!
//! A pair of degrees `(u1, u2)` is certified when `b(xi1, xi2) != 0` in
//! `H^2(T_X)_{u1+u2}` for some `xi1 in H^1(T_X)_{u1}`, `xi2 in H^1(T_X)_{u2}`
//! and `H^1(O(D))` vanishes in both degrees. Then `xi1 + s xi2` lifts to a
//! deformation of the pair for a sign `s` with `q(xi1 + s xi2) != 0`.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cech::{
    bracket_cup, check_cocycle, check_regular, classify, Cochain, QVec, TangentCechComplex,
    TangentClass,
};
use crate::error::{Error, Result};
use crate::fan::{
    example_fan, product_fan, projective_space_fan, toric_boundary, validate_fan, Fan,
};
use crate::formats::{rats_from_strings, rats_to_strings, FanFile};
use crate::nerve::CechNerve;
use crate::sheafcoh::{build_vcomplex, h_line_bundle, scan_box, SheafDescriptor, VComplex};

pub const CERT_FORMAT: &str = "obstruction-cert-v1";

/// `u'` and `u''` on the example threefold.
pub const EXAMPLE_U1: [i64; 3] = [-1, -1, 0];
pub const EXAMPLE_U2: [i64; 3] = [0, -1, -1];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> BigRational {
        match self {
            Sign::Plus => BigRational::one(),
            Sign::Minus => -BigRational::one(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    U1,
    U2,
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::U1 => "u1",
            Which::U2 => "u2",
        })
    }
}

/// Why a degree pair is not certified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertifyFailure {
    H1Zero(Which),
    CupProductZero,
    BoundaryH1Nonzero(Which),
}

impl fmt::Display for CertifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyFailure::H1Zero(w) => write!(f, "H^1(T_X) zero at {w}"),
            CertifyFailure::CupProductZero => f.write_str("cup product zero"),
            CertifyFailure::BoundaryH1Nonzero(w) => write!(f, "boundary H^1 nonzero at {w}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionCertificate {
    pub fan: Fan,
    pub u1: Vec<i64>,
    pub u2: Vec<i64>,
    pub xi1: Cochain,
    pub xi2: Cochain,
    /// `b(xi1, xi2)` as a 2-cocycle of degree `u1 + u2`.
    pub cup: Cochain,
    /// Functional on the `C^2` coordinates of degree `u1 + u2`.
    pub witness: QVec,
    pub boundary_h1_zero: (bool, bool),
    pub sign: Sign,
}

/// `H^1(O(D))_u = 0` for the toric boundary `D`.
pub fn boundary_h1_vanishes(f: &Fan, u: &[i64]) -> Result<bool> {
    Ok(h_line_bundle(f, &toric_boundary(f), u)?[1] == 0)
}

fn sum(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

fn ensure_valid(f: &Fan) -> Result<()> {
    let report = validate_fan(f);
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidFan(report.failures.join("; ")))
    }
}

fn check_degree(f: &Fan, u: &[i64]) -> Result<()> {
    if u.len() != f.dim() {
        return Err(Error::Dimension(format!(
            "degree has {} entries, lattice has rank {}",
            u.len(),
            f.dim()
        )));
    }
    Ok(())
}

/// The `(u1 + u2)`-component of `q(xi1 + s xi2)`.
fn mixed_component(xi1: &Cochain, u1: &[i64], xi2: &Cochain, u2: &[i64], s: Sign) -> Cochain {
    let mut c = bracket_cup(xi1, u1, xi2, u2)
        .add(&bracket_cup(xi2, u2, xi1, u1))
        .scale(&s.factor());
    if u1 == u2 {
        c = c
            .add(&bracket_cup(xi1, u1, xi1, u1))
            .add(&bracket_cup(xi2, u2, xi2, u2));
    }
    c
}

struct CupSearch {
    xi1: TangentClass,
    xi2: TangentClass,
    cup: Cochain,
    witness: QVec,
}

/// First pair of basis classes with a nonzero cup, in basis order.
fn nonzero_cup(
    f: &Fan,
    nerve: &Arc<CechNerve>,
    u1: &[i64],
    u2: &[i64],
) -> Result<std::result::Result<(CupSearch, TangentCechComplex), CertifyFailure>> {
    let cx1 = TangentCechComplex::with_nerve(f, u1, nerve.clone())?;
    let b1 = cx1.h1_basis()?;
    if b1.is_empty() {
        return Ok(Err(CertifyFailure::H1Zero(Which::U1)));
    }
    let b2 = if u1 == u2 {
        b1.clone()
    } else {
        TangentCechComplex::with_nerve(f, u2, nerve.clone())?.h1_basis()?
    };
    if b2.is_empty() {
        return Ok(Err(CertifyFailure::H1Zero(Which::U2)));
    }
    let target = TangentCechComplex::with_nerve(f, &sum(u1, u2), nerve.clone())?;
    for x1 in &b1 {
        for x2 in &b2 {
            let z = bracket_cup(&x1.cochain, u1, &x2.cochain, u2);
            let class = classify(&target, z)?;
            if let Some(witness) = class.witness {
                let found = CupSearch {
                    xi1: x1.clone(),
                    xi2: x2.clone(),
                    cup: class.cochain,
                    witness,
                };
                return Ok(Ok((found, target)));
            }
        }
    }
    Ok(Err(CertifyFailure::CupProductZero))
}

fn choose_sign(
    target: &TangentCechComplex,
    found: &CupSearch,
    u1: &[i64],
    u2: &[i64],
) -> Result<Option<Sign>> {
    for s in [Sign::Plus, Sign::Minus] {
        let c = mixed_component(&found.xi1.cochain, u1, &found.xi2.cochain, u2, s);
        if !dot(&found.witness, &target.to_coords(&c)?).is_zero() {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

fn certify_with(
    f: &Fan,
    nerve: &Arc<CechNerve>,
    u1: &[i64],
    u2: &[i64],
) -> Result<std::result::Result<ObstructionCertificate, CertifyFailure>> {
    let (found, target) = match nonzero_cup(f, nerve, u1, u2)? {
        Ok(x) => x,
        Err(e) => return Ok(Err(e)),
    };
    if !boundary_h1_vanishes(f, u1)? {
        return Ok(Err(CertifyFailure::BoundaryH1Nonzero(Which::U1)));
    }
    if !boundary_h1_vanishes(f, u2)? {
        return Ok(Err(CertifyFailure::BoundaryH1Nonzero(Which::U2)));
    }
    let sign = choose_sign(&target, &found, u1, u2)?
        .ok_or_else(|| Error::NotCertified("no sign makes the first obstruction nonzero".into()))?;
    Ok(Ok(ObstructionCertificate {
        fan: f.clone(),
        u1: u1.to_vec(),
        u2: u2.to_vec(),
        xi1: found.xi1.cochain,
        xi2: found.xi2.cochain,
        cup: found.cup,
        witness: found.witness,
        boundary_h1_zero: (true, true),
        sign,
    }))
}

/// Checks, in order: `H^1(T_X)` at `u1` and `u2`, the cup product, and
/// `H^1(O(D))` at `u1` and `u2`.
pub fn certify_obstructed_pair(
    f: &Fan,
    u1: &[i64],
    u2: &[i64],
) -> Result<std::result::Result<ObstructionCertificate, CertifyFailure>> {
    ensure_valid(f)?;
    check_degree(f, u1)?;
    check_degree(f, u2)?;
    let nerve = Arc::new(CechNerve::new(f, 2));
    certify_with(f, &nerve, u1, u2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearMiss {
    pub u1: Vec<i64>,
    pub u2: Vec<i64>,
    pub cup_nonzero: bool,
    pub boundary_h1_zero: (bool, bool),
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub bound: i64,
    pub certified: Vec<ObstructionCertificate>,
    pub near_misses: Vec<NearMiss>,
    pub elapsed: Duration,
}

enum PairOutcome {
    Certified(Box<ObstructionCertificate>),
    Near(NearMiss),
    Neither,
}

/// Tries every unordered pair (diagonal included) of degrees in the box with
/// `H^1(T_X) != 0`.
pub fn search_obstructed(f: &Fan, bound: i64) -> Result<SearchReport> {
    let start = Instant::now();
    ensure_valid(f)?;
    let table = scan_box(f, &SheafDescriptor::tangent(vec![1]), bound)?;
    let degrees: Vec<Vec<i64>> = table.entries.keys().cloned().collect();
    let mut pairs = Vec::new();
    for i in 0..degrees.len() {
        for j in i..degrees.len() {
            pairs.push((degrees[i].clone(), degrees[j].clone()));
        }
    }
    let nerve = Arc::new(CechNerve::new(f, 2));
    let outcomes: Vec<PairOutcome> = pairs
        .par_iter()
        .map(|(u1, u2)| -> Result<PairOutcome> {
            let b = (boundary_h1_vanishes(f, u1)?, boundary_h1_vanishes(f, u2)?);
            let cup = nonzero_cup(f, &nerve, u1, u2)?.is_ok();
            if cup && b.0 && b.1 {
                match certify_with(f, &nerve, u1, u2)? {
                    Ok(c) => return Ok(PairOutcome::Certified(Box::new(c))),
                    Err(e) => {
                        return Err(Error::NotCertified(format!(
                            "inconsistent pair {u1:?}, {u2:?}: {e}"
                        )))
                    }
                }
            }
            if cup || (b.0 && b.1) {
                return Ok(PairOutcome::Near(NearMiss {
                    u1: u1.clone(),
                    u2: u2.clone(),
                    cup_nonzero: cup,
                    boundary_h1_zero: b,
                }));
            }
            Ok(PairOutcome::Neither)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut certified = Vec::new();
    let mut near_misses = Vec::new();
    for o in outcomes {
        match o {
            PairOutcome::Certified(c) => certified.push(*c),
            PairOutcome::Near(n) => near_misses.push(n),
            PairOutcome::Neither => {}
        }
    }
    Ok(SearchReport {
        bound,
        certified,
        near_misses,
        elapsed: start.elapsed(),
    })
}

/// The example threefold for `n = 3`, otherwise its product with `P^{n-3}`.
pub fn paper_fan(n: usize) -> Result<Fan> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "dimension must be at least 3, got {n}"
        )));
    }
    let e = example_fan();
    if n == 3 {
        return Ok(e);
    }
    Ok(product_fan(&e, &projective_space_fan(n - 3)?))
}

/// `(u', 0, ..., 0)` and `(u'', 0, ..., 0)` in rank `n`.
pub fn padded_degrees(n: usize) -> (Vec<i64>, Vec<i64>) {
    let pad = |u: &[i64]| {
        let mut v = u.to_vec();
        v.resize(n.max(3), 0);
        v
    };
    (pad(&EXAMPLE_U1), pad(&EXAMPLE_U2))
}

pub fn reproduce_paper(n: usize) -> Result<ObstructionCertificate> {
    let f = paper_fan(n)?;
    let expected_rays = if n == 3 { 6 } else { n + 4 };
    let expected_cones = 8 * (n - 2);
    if f.num_rays() != expected_rays || f.num_max_cones() != expected_cones {
        return Err(Error::InvalidFan(format!(
            "product fan has {} rays and {} cones, expected {expected_rays} and {expected_cones}",
            f.num_rays(),
            f.num_max_cones()
        )));
    }
    let (v1, v2) = padded_degrees(n);
    certify_obstructed_pair(&f, &v1, &v2)?
        .map_err(|e| Error::NotCertified(format!("{v1:?}, {v2:?}: {e}")))
}

/// V-complexes of the prime divisors and the boundary at `u`, for comparing
/// a product with its first factor.
pub fn vcomplexes_at(f: &Fan, u: &[i64]) -> Result<Vec<VComplex>> {
    let mut out = Vec::new();
    for r in 0..f.num_rays() {
        out.push(build_vcomplex(
            f,
            &crate::fan::ToricDivisor::prime(f.num_rays(), r),
            u,
        )?);
    }
    out.push(build_vcomplex(f, &toric_boundary(f), u)?);
    Ok(out)
}

/// Recomputes every claim of `cert`; the error names the first failed check.
pub fn check_certificate(cert: &ObstructionCertificate) -> std::result::Result<(), String> {
    let f = &cert.fan;
    ensure_valid(f).map_err(|e| e.to_string())?;
    check_degree(f, &cert.u1).map_err(|e| e.to_string())?;
    check_degree(f, &cert.u2).map_err(|e| e.to_string())?;
    check_cocycle(f, &cert.u1, &cert.xi1).map_err(|e| format!("xi1: {e}"))?;
    check_cocycle(f, &cert.u2, &cert.xi2).map_err(|e| format!("xi2: {e}"))?;
    let w = sum(&cert.u1, &cert.u2);
    if cert.cup != bracket_cup(&cert.xi1, &cert.u1, &cert.xi2, &cert.u2) {
        return Err("cup cochain differs from the bracket assembly".into());
    }
    check_regular(f, &w, &cert.cup).map_err(|e| format!("cup: {e}"))?;
    if !cert.cup.coboundary(f.num_max_cones()).is_zero() {
        return Err("cup cochain is not closed".into());
    }
    let nerve = Arc::new(CechNerve::new(f, 2));
    let target = TangentCechComplex::with_nerve(f, &w, nerve).map_err(|e| e.to_string())?;
    let d1 = target
        .differential(1)
        .ok_or("cover too small for a second differential")?;
    if cert.witness.len() != d1.nrows() {
        return Err(format!(
            "witness has {} entries, C^2 has dimension {}",
            cert.witness.len(),
            d1.nrows()
        ));
    }
    if d1.left_mul(&cert.witness).iter().any(|x| !x.is_zero()) {
        return Err("witness does not vanish on coboundaries".into());
    }
    let z = target.to_coords(&cert.cup).map_err(|e| e.to_string())?;
    if dot(&cert.witness, &z).is_zero() {
        return Err("witness vanishes on the cup cocycle".into());
    }
    for (flag, u, which) in [
        (cert.boundary_h1_zero.0, &cert.u1, "u1"),
        (cert.boundary_h1_zero.1, &cert.u2, "u2"),
    ] {
        let actual = boundary_h1_vanishes(f, u).map_err(|e| e.to_string())?;
        if !(flag && actual) {
            return Err(format!("boundary H^1 does not vanish at {which}"));
        }
    }
    let c = mixed_component(&cert.xi1, &cert.u1, &cert.xi2, &cert.u2, cert.sign);
    let cz = target.to_coords(&c).map_err(|e| e.to_string())?;
    if dot(&cert.witness, &cz).is_zero() {
        return Err("recorded sign gives a vanishing obstruction".into());
    }
    Ok(())
}

pub fn verify_certificate(cert: &ObstructionCertificate) -> bool {
    check_certificate(cert).is_ok()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    cones: Vec<usize>,
    v: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassFile {
    pairs: Vec<EntryFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlagsFile {
    u1: bool,
    u2: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertFile {
    format: String,
    fan: FanFile,
    u1: Vec<i64>,
    u2: Vec<i64>,
    xi1: ClassFile,
    xi2: ClassFile,
    cup: Vec<EntryFile>,
    witness: Vec<String>,
    boundary_h1_zero: FlagsFile,
    sign: Sign,
}

fn entries_to_file(c: &Cochain) -> Vec<EntryFile> {
    c.entries
        .iter()
        .map(|(t, v)| EntryFile {
            cones: t.clone(),
            v: rats_to_strings(v),
        })
        .collect()
}

fn entries_from_file(level: usize, es: &[EntryFile]) -> Result<Cochain> {
    let mut c = Cochain::zero(level);
    for e in es {
        if e.cones.len() != level + 1 {
            return Err(Error::Parse(format!(
                "entry {:?} should have {} cone indices",
                e.cones,
                level + 1
            )));
        }
        if c.entries.contains_key(&e.cones) {
            return Err(Error::Parse(format!("entry {:?} repeated", e.cones)));
        }
        c.insert_add(e.cones.clone(), rats_from_strings(&e.v)?);
    }
    Ok(c)
}

impl ObstructionCertificate {
    pub fn to_json(&self) -> String {
        let file = CertFile {
            format: CERT_FORMAT.to_string(),
            fan: FanFile::from_fan(&self.fan),
            u1: self.u1.clone(),
            u2: self.u2.clone(),
            xi1: ClassFile {
                pairs: entries_to_file(&self.xi1),
            },
            xi2: ClassFile {
                pairs: entries_to_file(&self.xi2),
            },
            cup: entries_to_file(&self.cup),
            witness: rats_to_strings(&self.witness),
            boundary_h1_zero: FlagsFile {
                u1: self.boundary_h1_zero.0,
                u2: self.boundary_h1_zero.1,
            },
            sign: self.sign,
        };
        serde_json::to_string(&file).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: CertFile =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("certificate: {e}")))?;
        if file.format != CERT_FORMAT {
            return Err(Error::Parse(format!(
                "field \"format\" is {:?}, expected {CERT_FORMAT:?}",
                file.format
            )));
        }
        Ok(ObstructionCertificate {
            fan: file.fan.to_fan()?,
            u1: file.u1,
            u2: file.u2,
            xi1: entries_from_file(1, &file.xi1.pairs)?,
            xi2: entries_from_file(1, &file.xi2.pairs)?,
            cup: entries_from_file(2, &file.cup)?,
            witness: rats_from_strings(&file.witness)?,
            boundary_h1_zero: (file.boundary_h1_zero.u1, file.boundary_h1_zero.u2),
            sign: file.sign,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::projective_space_fan;

    #[test]
    fn boundary_vanishing_examples() {
        let e = example_fan();
        assert!(boundary_h1_vanishes(&e, &EXAMPLE_U1).unwrap());
        assert!(boundary_h1_vanishes(&e, &EXAMPLE_U2).unwrap());
    }

    #[test]
    fn example_pair_certifies_and_verifies() {
        let e = example_fan();
        let cert = certify_obstructed_pair(&e, &EXAMPLE_U1, &EXAMPLE_U2)
            .unwrap()
            .unwrap();
        assert_eq!(check_certificate(&cert), Ok(()));
        let back = ObstructionCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_json(), cert.to_json());
    }

    #[test]
    fn failure_reasons() {
        let e = example_fan();
        let r = certify_obstructed_pair(&e, &EXAMPLE_U1, &[-1, 0, 1]).unwrap();
        assert_eq!(r.unwrap_err().to_string(), "cup product zero");
        let r = certify_obstructed_pair(&e, &EXAMPLE_U1, &EXAMPLE_U1).unwrap();
        assert_eq!(r.unwrap_err(), CertifyFailure::CupProductZero);
        let r = certify_obstructed_pair(&e, &[1, 0, 0], &EXAMPLE_U1).unwrap();
        assert_eq!(r.unwrap_err(), CertifyFailure::H1Zero(Which::U1));
        let r = certify_obstructed_pair(&e, &EXAMPLE_U1, &[5, 5, 5]).unwrap();
        assert_eq!(r.unwrap_err(), CertifyFailure::H1Zero(Which::U2));
    }

    #[test]
    fn tampering_is_detected() {
        let e = example_fan();
        let cert = certify_obstructed_pair(&e, &EXAMPLE_U1, &EXAMPLE_U2)
            .unwrap()
            .unwrap();
        let mut bad = cert.clone();
        let first = bad.xi1.entries.values_mut().next().unwrap();
        first[0] += BigRational::one();
        assert!(!verify_certificate(&bad));
        let mut zeroed = cert.clone();
        zeroed
            .witness
            .iter_mut()
            .for_each(|x| *x = BigRational::zero());
        assert!(!verify_certificate(&zeroed));
        let mut flag = cert;
        flag.boundary_h1_zero.1 = false;
        assert!(!verify_certificate(&flag));
    }

    #[test]
    fn search_on_example_and_rigid_fans() {
        let e = example_fan();
        let report = search_obstructed(&e, 3).unwrap();
        let pairs: Vec<(Vec<i64>, Vec<i64>)> = report
            .certified
            .iter()
            .map(|c| (c.u1.clone(), c.u2.clone()))
            .collect();
        assert_eq!(pairs, vec![(EXAMPLE_U1.to_vec(), EXAMPLE_U2.to_vec())]);
        assert!(report.certified.iter().all(verify_certificate));
        let p3 = projective_space_fan(3).unwrap();
        assert!(search_obstructed(&p3, 3).unwrap().certified.is_empty());
    }

    #[test]
    fn reproduce_rejects_small_dimensions() {
        assert!(reproduce_paper(2).is_err());
        assert_eq!(padded_degrees(4).0, vec![-1, -1, 0, 0]);
    }
}
