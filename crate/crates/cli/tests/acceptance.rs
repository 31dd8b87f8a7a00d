//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use toric_obstruct::cech::{
    bracket, bracket_cup, classify, cup_product, first_obstruction, tangent_cohomology, Cochain,
    HomogeneousField, TangentCechComplex, TangentClass,
};
use toric_obstruct::certify::{
    boundary_h1_vanishes, certify_obstructed_pair, check_certificate, padded_degrees,
    reproduce_paper, search_obstructed, ObstructionCertificate,
};
use toric_obstruct::exactla::Solve;
use toric_obstruct::fan::{
    example_fan, pairing, product_fan, projective_space_fan, toric_boundary, Fan, ToricDivisor,
};
use toric_obstruct::formats::fan_to_json;
use toric_obstruct::nerve::CechNerve;
use toric_obstruct::sheafcoh::{
    box_degrees, build_vcomplex, cech_line_bundle_with, h_line_bundle, h_tangent_graded, scan_box,
    violating_rays, SheafDescriptor, VComplex,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const U1: [i64; 3] = [-1, -1, 0];
const U2: [i64; 3] = [0, -1, -1];
const U3: [i64; 3] = [-1, 0, 1];
const H2_DEGREE: [i64; 3] = [-1, -2, -1];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

fn p1() -> Fan {
    projective_space_fan(1).unwrap()
}

fn h1_generator(f: &Fan, u: &[i64]) -> TangentClass {
    let (dim, basis) = tangent_cohomology(f, u, 1).unwrap();
    assert_eq!(dim, 1, "H^1 at {u:?}");
    basis.into_iter().next().unwrap()
}

fn table_of(f: &Fan, i: usize) -> Vec<(Vec<i64>, Vec<usize>)> {
    scan_box(f, &SheafDescriptor::tangent(vec![i]), 3)
        .unwrap()
        .entries
        .into_iter()
        .collect()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let rows = table_of(&example_fan(), 1);
    let expected = vec![
        (U1.to_vec(), vec![1]),
        (U3.to_vec(), vec![1]),
        (U2.to_vec(), vec![1]),
    ];
    ensure(rows == expected, || format!("H^1 table {rows:?}"))?;
    within(start, Duration::from_secs(5))?;
    Ok("H^1(T_X) supported on u', u'', (-1,0,1), total 3".into())
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let rows = table_of(&example_fan(), 2);
    ensure(rows == vec![(H2_DEGREE.to_vec(), vec![1])], || {
        format!("H^2 table {rows:?}")
    })?;
    within(start, Duration::from_secs(5))?;
    Ok("H^2(T_X) supported on (-1,-2,-1), total 1".into())
}

fn complex(vertices: &[usize], facets: &[&[usize]]) -> VComplex {
    VComplex {
        vertices: vertices.to_vec(),
        facets: facets.iter().map(|f| f.to_vec()).collect(),
    }
}

fn criterion_3() -> Check {
    let e = example_fan();
    let prime = |one_based: usize| ToricDivisor::prime(e.num_rays(), one_based - 1);
    let boundary = toric_boundary(&e);
    let cases = [
        ("A", prime(2), U1.to_vec(), complex(&[0, 2], &[&[0], &[2]])),
        ("B", prime(5), U2.to_vec(), complex(&[1, 3], &[&[1], &[3]])),
        (
            "C",
            prime(5),
            H2_DEGREE.to_vec(),
            complex(&[0, 1, 2, 3], &[&[0, 1], &[0, 3], &[1, 2], &[2, 3]]),
        ),
        ("D", boundary.clone(), U1.to_vec(), complex(&[], &[])),
        ("E", boundary, U2.to_vec(), complex(&[3], &[&[3]])),
    ];
    for (name, d, u, expected) in cases {
        let v = build_vcomplex(&e, &d, &u).unwrap();
        ensure(v == expected, || format!("complex {name}: {v:?}"))?;
    }
    Ok("complexes A-E match".into())
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let e = example_fan();
    let x1 = h1_generator(&e, &U1);
    let x2 = h1_generator(&e, &U2);
    let c = cup_product(&e, &x1, &x2).unwrap();
    ensure(c.nonzero, || "cup product is zero".into())?;
    ensure(c.degree == H2_DEGREE, || format!("degree {:?}", c.degree))?;
    let phi = c.witness.clone().ok_or("no witness")?;
    let target = TangentCechComplex::new(&e, &c.degree).unwrap();
    let d1 = target.differential(1).unwrap();
    ensure(d1.left_mul(&phi).iter().all(Zero::is_zero), || {
        "witness does not kill coboundaries".into()
    })?;
    let z = target.to_coords(&c.cochain).unwrap();
    ensure(!dot(&phi, &z).is_zero(), || {
        "witness vanishes on cup".into()
    })?;
    ensure(c.cochain.coboundary(e.num_max_cones()).is_zero(), || {
        "cup is not closed".into()
    })?;
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "b(xi', xi'') != 0, witness pairs to {}",
        dot(&phi, &z)
    ))
}

fn criterion_5() -> Check {
    let e = example_fan();
    let d = toric_boundary(&e);
    for u in [U1, U2] {
        let h = h_line_bundle(&e, &d, &u).unwrap();
        ensure(h[1] == 0, || format!("H^1(O(D)) at {u:?} is {h:?}"))?;
        ensure(boundary_h1_vanishes(&e, &u).unwrap(), || "flag".into())?;
    }
    Ok("H^1(O(D))_{u'} = H^1(O(D))_{u''} = 0".into())
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let mut sizes = Vec::new();
    for n in 3..=5 {
        let cert = reproduce_paper(n).map_err(|e| format!("n={n}: {e}"))?;
        let (v1, v2) = padded_degrees(n);
        ensure(cert.u1 == v1 && cert.u2 == v2, || format!("n={n}: degrees"))?;
        check_certificate(&cert).map_err(|e| format!("n={n}: {e}"))?;
        let back = ObstructionCertificate::from_json(&cert.to_json()).map_err(|e| e.to_string())?;
        check_certificate(&back).map_err(|e| format!("n={n} after round trip: {e}"))?;
        sizes.push(format!(
            "n={n}: {} rays, {} cones",
            cert.fan.num_rays(),
            cert.fan.num_max_cones()
        ));
    }
    within(start, Duration::from_secs(30))?;
    Ok(sizes.join("; "))
}

/// Per-ray class of `<w, rho>`: nonnegative, -1, or at most -2.
fn tangent_pattern(f: &Fan, w: &[i64]) -> Vec<u8> {
    f.rays()
        .iter()
        .map(|r| match pairing(w, r) {
            x if x >= 0 => 0,
            -1 => 1,
            _ => 2,
        })
        .collect()
}

fn cross_oracle(f: &Fan) -> Result<usize, String> {
    let n = f.dim();
    let nerve = Arc::new(CechNerve::new(f, n + 1));
    let boundary = toric_boundary(f);
    let divisors = [
        boundary.clone(),
        ToricDivisor::zero(f.num_rays()),
        ToricDivisor::new(boundary.coeffs.iter().map(|a| -a).collect()),
    ];
    let mut line_cache: HashMap<(usize, Vec<usize>), Vec<usize>> = HashMap::new();
    let mut tangent_cache: HashMap<Vec<u8>, (usize, usize)> = HashMap::new();
    let mut checked = 0;
    for u in box_degrees(n, 3) {
        for (k, d) in divisors.iter().enumerate() {
            let combinatorial = h_line_bundle(f, d, &u).unwrap();
            let key = (k, violating_rays(f, d, &u));
            let cech = line_cache
                .entry(key)
                .or_insert_with(|| cech_line_bundle_with(&nerve, f, d, &u).unwrap());
            ensure(combinatorial == *cech, || {
                format!("O(D) at {u:?}: {combinatorial:?} vs {cech:?}")
            })?;
            checked += 1;
        }
        let formula = (
            h_tangent_graded(f, &u, 1).unwrap(),
            h_tangent_graded(f, &u, 2).unwrap(),
        );
        let cech = *tangent_cache
            .entry(tangent_pattern(f, &u))
            .or_insert_with(|| {
                let cx = TangentCechComplex::with_nerve(f, &u, nerve.clone()).unwrap();
                (cx.cohomology_dim(1).unwrap(), cx.cohomology_dim(2).unwrap())
            });
        ensure(formula == cech, || {
            format!("T_X at {u:?}: {formula:?} vs {cech:?}")
        })?;
        checked += 1;
    }
    Ok(checked)
}

fn criterion_7() -> Check {
    let e = example_fan();
    let fans = [
        ("example", e.clone()),
        ("example x P1", product_fan(&e, &p1())),
        ("P3", projective_space_fan(3).unwrap()),
        (
            "P1 x P1 x P1",
            product_fan(&product_fan(&p1(), &p1()), &p1()),
        ),
    ];
    let mut parts = Vec::new();
    for (name, f) in fans {
        let k = cross_oracle(&f).map_err(|m| format!("{name}: {m}"))?;
        parts.push(format!("{name} {k}"));
    }
    Ok(format!("instances checked: {}", parts.join(", ")))
}

fn random_rat(rng: &mut StdRng) -> BigRational {
    BigRational::new(
        rng.gen_range(-4i64..=4).into(),
        rng.gen_range(1i64..=3).into(),
    )
}

fn random_coboundary(rng: &mut StdRng, cx: &TangentCechComplex) -> Cochain {
    let x: Vec<BigRational> = (0..cx.dim(0)).map(|_| random_rat(rng)).collect();
    cx.from_coords(0, &x).coboundary(cx.fan().num_max_cones())
}

fn random_field(rng: &mut StdRng) -> HomogeneousField {
    HomogeneousField::new(
        (0..3).map(|_| random_rat(rng)).collect(),
        (0..3).map(|_| rng.gen_range(-3i64..=3)).collect(),
    )
}

fn same_class(target: &TangentCechComplex, a: &Cochain, b: &Cochain) -> bool {
    matches!(target.solve_coboundary(&a.sub(b)), Ok(Solve::Solution(_)))
}

fn d_squared_zero(f: &Fan, w: &[i64]) -> Result<(), String> {
    let cx = TangentCechComplex::with_nerve(f, w, Arc::new(CechNerve::new(f, 3))).unwrap();
    for p in 0..cx.num_levels().saturating_sub(2) {
        let (d0, d1) = (cx.differential(p).unwrap(), cx.differential(p + 1).unwrap());
        for j in 0..d0.ncols() {
            let mut x = vec![BigRational::zero(); d0.ncols()];
            x[j] = q(1);
            ensure(
                d1.mul_vec(&d0.mul_vec(&x)).iter().all(Zero::is_zero),
                || format!("d d != 0 at level {p}, degree {w:?}"),
            )?;
        }
    }
    Ok(())
}

fn criterion_8() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_cafe);
    let e = example_fan();

    let ep1 = product_fan(&e, &p1());
    for w in [H2_DEGREE.to_vec(), U1.to_vec(), vec![0, 0, 0]] {
        d_squared_zero(&e, &w)?;
    }
    for w in [vec![-1, -2, -1, 0], vec![-1, -1, 0, 1]] {
        d_squared_zero(&ep1, &w)?;
    }
    d_squared_zero(&projective_space_fan(3).unwrap(), &[-1, 0, 1])?;

    let x1 = h1_generator(&e, &U1);
    let x2 = h1_generator(&e, &U2);
    let nerve = Arc::new(CechNerve::new(&e, 2));
    let cx1 = TangentCechComplex::with_nerve(&e, &U1, nerve.clone()).unwrap();
    let cx2 = TangentCechComplex::with_nerve(&e, &U2, nerve.clone()).unwrap();
    let target = TangentCechComplex::with_nerve(&e, &H2_DEGREE, nerve).unwrap();
    let base = cup_product(&e, &x1, &x2).unwrap();
    let phi = base.witness.clone().ok_or("no witness")?;
    let pairing_of = |z: &Cochain| dot(&phi, &target.to_coords(z).unwrap());
    let base_value = pairing_of(&base.cochain);
    for trial in 0..100 {
        let y1 = TangentClass::checked(
            &e,
            U1.to_vec(),
            x1.cochain.add(&random_coboundary(&mut rng, &cx1)),
        )
        .map_err(|m| format!("trial {trial}: {m}"))?;
        let y2 = TangentClass::checked(
            &e,
            U2.to_vec(),
            x2.cochain.add(&random_coboundary(&mut rng, &cx2)),
        )
        .map_err(|m| format!("trial {trial}: {m}"))?;
        let z = bracket_cup(&y1.cochain, &U1, &y2.cochain, &U2);
        ensure(z.coboundary(e.num_max_cones()).is_zero(), || {
            format!("trial {trial}: cup not closed")
        })?;
        let c = classify(&target, z).unwrap();
        ensure(c.nonzero, || format!("trial {trial}: class became zero"))?;
        ensure(pairing_of(&c.cochain) == base_value, || {
            format!("trial {trial}: witness pairing changed")
        })?;
        ensure(same_class(&target, &c.cochain, &base.cochain), || {
            format!("trial {trial}: class changed")
        })?;
    }

    let b12 = bracket_cup(&x1.cochain, &U1, &x2.cochain, &U2);
    let b21 = bracket_cup(&x2.cochain, &U2, &x1.cochain, &U1);
    ensure(same_class(&target, &b12, &b21), || {
        "b is not symmetric".into()
    })?;

    let both = first_obstruction(&e, &[x1.clone(), x2.clone()]).unwrap();
    let q1 = first_obstruction(&e, std::slice::from_ref(&x1)).unwrap();
    let q2 = first_obstruction(&e, std::slice::from_ref(&x2)).unwrap();
    let component = |list: &[toric_obstruct::cech::CupClass], w: &[i64]| {
        list.iter()
            .find(|c| c.degree == w)
            .map(|c| c.cochain.clone())
            .unwrap_or_else(|| Cochain::zero(2))
    };
    let degrees = [vec![-2, -2, 0], H2_DEGREE.to_vec(), vec![0, -2, -2]];
    for w in &degrees {
        let diff = component(&both, w)
            .sub(&component(&q1, w))
            .sub(&component(&q2, w));
        let mixed = if *w == H2_DEGREE {
            b12.add(&b21)
        } else {
            Cochain::zero(2)
        };
        ensure(diff == mixed, || format!("polarisation fails at {w:?}"))?;
    }
    let middle = component(&both, &H2_DEGREE);
    ensure(same_class(&target, &middle, &b12.scale(&q(2))), || {
        "middle component is not 2b".into()
    })?;

    for trial in 0..200 {
        let (a, b, c) = (
            random_field(&mut rng),
            random_field(&mut rng),
            random_field(&mut rng),
        );
        let ab = bracket(&a, &b).unwrap();
        let ba = bracket(&b, &a).unwrap();
        let neg: Vec<BigRational> = ba.v.iter().map(|x| -x).collect();
        ensure(ab.v == neg && ab.w == ba.w, || {
            format!("trial {trial}: antisymmetry")
        })?;
        let j1 = bracket(&a, &bracket(&b, &c).unwrap()).unwrap();
        let j2 = bracket(&b, &bracket(&c, &a).unwrap()).unwrap();
        let j3 = bracket(&c, &ab).unwrap();
        let total: Vec<BigRational> = (0..3).map(|i| &j1.v[i] + &j2.v[i] + &j3.v[i]).collect();
        ensure(total.iter().all(Zero::is_zero), || {
            format!("trial {trial}: Jacobi")
        })?;
    }
    Ok("d^2=0, closed cups, 100 perturbations, symmetry, polarisation, Jacobi".into())
}

fn criterion_9() -> Check {
    let p3 = projective_space_fan(3).unwrap();
    let p1p1 = product_fan(&p1(), &p1());
    for (name, f) in [("P3", &p3), ("P1 x P1", &p1p1)] {
        let report = search_obstructed(f, 3).unwrap();
        ensure(report.certified.is_empty(), || {
            format!("{name}: found pairs")
        })?;
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_toric-obstruct");
    for (name, f) in [("p3", &p3), ("p1p1", &p1p1)] {
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, fan_to_json(f)).map_err(|e| e.to_string())?;
        let status = Command::new(bin)
            .args(["certify", "--fan"])
            .arg(&path)
            .args(["--search", "--box", "3"])
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure(status.code() == Some(1), || {
            format!("{name}: exit {status}")
        })?;
    }
    let e = example_fan();
    let r = certify_obstructed_pair(&e, &U1, &U3).unwrap();
    let reason = r.err().map(|x| x.to_string()).unwrap_or_default();
    ensure(reason == "cup product zero", || {
        format!("reason {reason:?}")
    })?;
    Ok("no pairs on P3 and P1 x P1 (exit 1); (u', (-1,0,1)) has cup product zero".into())
}

fn criterion_10() -> Check {
    let e = example_fan();
    let degrees = [U1, U2, U3];
    let classes: Vec<TangentClass> = degrees.iter().map(|u| h1_generator(&e, u)).collect();
    let mut nonzero = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            if cup_product(&e, &classes[a], &classes[b]).unwrap().nonzero {
                nonzero.push((a, b));
            }
        }
    }
    ensure(nonzero == vec![(0, 1), (1, 0)], || {
        format!("nonzero entries {nonzero:?}")
    })?;
    Ok("b nonzero only on (u', u'')".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("H^1 table of the example", criterion_1),
        ("H^2 table of the example", criterion_2),
        ("V-complexes A-E", criterion_3),
        ("cup product with witness", criterion_4),
        ("boundary H^1 vanishing", criterion_5),
        ("certificates for n = 3, 4, 5", criterion_6),
        ("cross-oracle on four fans", criterion_7),
        ("algebraic properties", criterion_8),
        ("negative controls", criterion_9),
        ("b on the H^1 basis", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{secs:.2}s] {name}: {detail}", k + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:.2}s] {name}: {reason}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
