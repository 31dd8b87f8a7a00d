//! Graded Čech complexes of the tangent sheaf, the cup product and the first
//! obstruction.
//!
//! In degree `w`, a section of `T_X` over the chart of a cone `gamma` is a
//! homogeneous vector field `delta_{v,w}: chi^u -> <u,v> chi^{u+w}` with `v` in
//! a subspace `V_gamma(w)` of `N (x) Q`:
//!
//! * all of `N (x) Q` if `<w, rho> >= 0` for every ray of `gamma`,
//! * the line through `rho*` if `rho*` is the only ray with `<w, rho*> = -1`
//!   and every other ray pairs nonnegatively,
//! * zero otherwise.
//!
//! Restriction to a smaller chart is the identity on `v`, so cochains are
//! stored as `N (x) Q`-valued functions on strictly increasing tuples of
//! maximal cones.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactla::{primitive_vector, ColumnReduction, Solve, SparseMatrix};
use crate::fan::{pairing, Cone, Fan};
use crate::nerve::CechNerve;

pub type QVec = Vec<BigRational>;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn qvec(v: &[i64]) -> QVec {
    v.iter().map(|&x| q(x)).collect()
}

fn qpair(w: &[i64], v: &[BigRational]) -> BigRational {
    w.iter()
        .zip(v)
        .fold(BigRational::zero(), |acc, (a, b)| acc + b * q(*a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionSpace {
    Full,
    /// The line spanned by the given ray.
    Line(usize),
    Zero,
}

impl SectionSpace {
    pub fn dim(&self, n: usize) -> usize {
        match self {
            SectionSpace::Full => n,
            SectionSpace::Line(_) => 1,
            SectionSpace::Zero => 0,
        }
    }

    pub fn basis(&self, f: &Fan) -> Vec<QVec> {
        let n = f.dim();
        match *self {
            SectionSpace::Full => (0..n)
                .map(|i| (0..n).map(|j| q(i64::from(i == j))).collect())
                .collect(),
            SectionSpace::Line(r) => vec![qvec(f.ray(r))],
            SectionSpace::Zero => Vec::new(),
        }
    }

    /// Coordinates of `v` in [`SectionSpace::basis`], or `None` if `v` is not in the space.
    pub fn coords(&self, f: &Fan, v: &[BigRational]) -> Option<QVec> {
        match *self {
            SectionSpace::Full => Some(v.to_vec()),
            SectionSpace::Zero => v.iter().all(Zero::is_zero).then(Vec::new),
            SectionSpace::Line(r) => {
                let ray = f.ray(r);
                let a = ray.iter().position(|&x| x != 0)?;
                let c = &v[a] / q(ray[a]);
                let ok = ray.iter().zip(v).all(|(&x, y)| &c * q(x) == *y);
                ok.then(|| vec![c])
            }
        }
    }

    pub fn from_coords(&self, f: &Fan, c: &[BigRational]) -> QVec {
        match *self {
            SectionSpace::Full => c.to_vec(),
            SectionSpace::Zero => vec![BigRational::zero(); f.dim()],
            SectionSpace::Line(r) => f.ray(r).iter().map(|&x| &c[0] * q(x)).collect(),
        }
    }
}

/// Regular homogeneous vector fields of degree `w` on the chart of `cone`.
pub fn section_rule(f: &Fan, cone: &Cone, w: &[i64]) -> SectionSpace {
    let mut line = None;
    for &r in cone.rays() {
        match pairing(w, f.ray(r)) {
            x if x >= 0 => {}
            -1 if line.is_none() => line = Some(r),
            _ => return SectionSpace::Zero,
        }
    }
    match line {
        Some(r) => SectionSpace::Line(r),
        None => SectionSpace::Full,
    }
}

/// Basis of `V_gamma(w)`.
pub fn section_space(f: &Fan, cone: &Cone, w: &[i64]) -> Result<Vec<QVec>> {
    if w.len() != f.dim() {
        return Err(Error::Dimension(format!(
            "degree has {} entries, lattice has rank {}",
            w.len(),
            f.dim()
        )));
    }
    let is_face = f
        .max_cones()
        .iter()
        .any(|c| cone.rays().iter().all(|r| c.contains(r)));
    if !is_face {
        return Err(Error::InvalidArgument(format!(
            "rays {:?} do not span a cone of the fan",
            cone.rays()
        )));
    }
    Ok(section_rule(f, cone, w).basis(f))
}

/// `delta_{v,w}: chi^u -> <u, v> chi^{u+w}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousField {
    pub v: QVec,
    pub w: Vec<i64>,
}

impl HomogeneousField {
    pub fn new(v: QVec, w: Vec<i64>) -> Self {
        HomogeneousField { v, w }
    }

    /// Image of `chi^u` as `(coefficient, exponent)`.
    pub fn apply(&self, u: &[i64]) -> (BigRational, Vec<i64>) {
        let e = u.iter().zip(&self.w).map(|(a, b)| a + b).collect();
        (qpair(u, &self.v), e)
    }
}

/// `[delta_{v,w'}, delta_{v',w''}] = delta_{<w'',v> v' - <w',v'> v, w' + w''}`.
pub fn bracket(a: &HomogeneousField, b: &HomogeneousField) -> Result<HomogeneousField> {
    let n = a.v.len();
    if a.w.len() != n || b.v.len() != n || b.w.len() != n {
        return Err(Error::Dimension("fields of different ranks".into()));
    }
    Ok(HomogeneousField {
        v: bracket_vectors(&a.v, &a.w, &b.v, &b.w),
        w: a.w.iter().zip(&b.w).map(|(x, y)| x + y).collect(),
    })
}

fn bracket_vectors(v1: &[BigRational], w1: &[i64], v2: &[BigRational], w2: &[i64]) -> QVec {
    let c1 = qpair(w2, v1);
    let c2 = qpair(w1, v2);
    v2.iter().zip(v1).map(|(y, x)| &c1 * y - &c2 * x).collect()
}

/// An `N (x) Q`-valued Čech cochain; absent tuples are zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Cochain {
    pub level: usize,
    pub entries: BTreeMap<Vec<usize>, QVec>,
}

impl Cochain {
    pub fn zero(level: usize) -> Self {
        Cochain {
            level,
            entries: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert_add(&mut self, tuple: Vec<usize>, v: QVec) {
        use std::collections::btree_map::Entry;
        if v.iter().all(Zero::is_zero) {
            return;
        }
        match self.entries.entry(tuple) {
            Entry::Vacant(e) => {
                e.insert(v);
            }
            Entry::Occupied(mut e) => {
                for (a, b) in e.get_mut().iter_mut().zip(v) {
                    *a += b;
                }
                if e.get().iter().all(Zero::is_zero) {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        assert_eq!(self.level, other.level);
        let mut out = self.clone();
        for (t, v) in &other.entries {
            out.insert_add(t.clone(), v.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Cochain {
        let mut out = Cochain::zero(self.level);
        for (t, v) in &self.entries {
            out.insert_add(t.clone(), v.iter().map(|x| x * c).collect());
        }
        out
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.add(&other.scale(&-BigRational::one()))
    }

    /// `(d c)_t = sum_k (-1)^k c_{t \ t_k}` over all tuples of `num_cones` cones.
    pub fn coboundary(&self, num_cones: usize) -> Cochain {
        let mut out = Cochain::zero(self.level + 1);
        for (s, v) in &self.entries {
            for x in 0..num_cones {
                if s.contains(&x) {
                    continue;
                }
                let k = s.iter().filter(|&&y| y < x).count();
                let mut t = s.clone();
                t.insert(k, x);
                let sign = if k % 2 == 0 { q(1) } else { q(-1) };
                out.insert_add(t, v.iter().map(|a| a * &sign).collect());
            }
        }
        out
    }
}

/// Alexander–Whitney cup with the Lie bracket: `z_{ijk} = [a_{ij}, b_{jk}]`.
pub fn bracket_cup(a: &Cochain, wa: &[i64], b: &Cochain, wb: &[i64]) -> Cochain {
    assert!(a.level == 1 && b.level == 1, "cup of 1-cochains");
    let mut by_first: BTreeMap<usize, Vec<(usize, &QVec)>> = BTreeMap::new();
    for (t, v) in &b.entries {
        by_first.entry(t[0]).or_default().push((t[1], v));
    }
    let mut z = Cochain::zero(2);
    for (t, va) in &a.entries {
        let (i, j) = (t[0], t[1]);
        if let Some(list) = by_first.get(&j) {
            for &(k, vb) in list {
                z.insert_add(vec![i, j, k], bracket_vectors(va, wa, vb, wb));
            }
        }
    }
    z
}

/// The Čech complex of `T_X` in one degree over the maximal-cone cover.
pub struct TangentCechComplex {
    fan: Fan,
    degree: Vec<i64>,
    nerve: Arc<CechNerve>,
    spaces: Vec<Vec<SectionSpace>>,
    offsets: Vec<Vec<usize>>,
    dims: Vec<usize>,
    diffs: Vec<OnceLock<SparseMatrix>>,
    reductions: Vec<OnceLock<ColumnReduction>>,
}

impl std::fmt::Debug for TangentCechComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TangentCechComplex")
            .field("degree", &self.degree)
            .field("dims", &self.dims)
            .finish()
    }
}

impl TangentCechComplex {
    /// All levels needed for `H^0 .. H^n`.
    pub fn new(f: &Fan, w: &[i64]) -> Result<Self> {
        let nerve = Arc::new(CechNerve::new(f, f.dim() + 1));
        Self::with_nerve(f, w, nerve)
    }

    /// Uses the levels present in `nerve`.
    pub fn with_nerve(f: &Fan, w: &[i64], nerve: Arc<CechNerve>) -> Result<Self> {
        if w.len() != f.dim() {
            return Err(Error::Dimension(format!(
                "degree has {} entries, lattice has rank {}",
                w.len(),
                f.dim()
            )));
        }
        if nerve.num_cones() != f.num_max_cones() {
            return Err(Error::InvalidArgument(
                "nerve built for a different fan".into(),
            ));
        }
        let n = f.dim();
        let mut spaces = Vec::new();
        let mut offsets = Vec::new();
        let mut dims = Vec::new();
        for p in 0..nerve.num_levels() {
            let sp: Vec<SectionSpace> = nerve
                .level(p)
                .cones
                .iter()
                .map(|c| section_rule(f, c, w))
                .collect();
            let mut off = Vec::with_capacity(sp.len());
            let mut acc = 0;
            for s in &sp {
                off.push(acc);
                acc += s.dim(n);
            }
            spaces.push(sp);
            offsets.push(off);
            dims.push(acc);
        }
        let levels = nerve.num_levels();
        Ok(TangentCechComplex {
            fan: f.clone(),
            degree: w.to_vec(),
            nerve,
            spaces,
            offsets,
            dims,
            diffs: (0..levels).map(|_| OnceLock::new()).collect(),
            reductions: (0..levels).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn degree(&self) -> &[i64] {
        &self.degree
    }

    pub fn num_levels(&self) -> usize {
        self.dims.len()
    }

    pub fn nerve(&self) -> &CechNerve {
        &self.nerve
    }

    /// Dimension of `C^p`.
    pub fn dim(&self, p: usize) -> usize {
        self.dims.get(p).copied().unwrap_or(0)
    }

    pub fn space(&self, p: usize, tuple: usize) -> SectionSpace {
        self.spaces[p][tuple]
    }

    fn has_differential(&self, p: usize) -> bool {
        p + 1 < self.num_levels()
    }

    /// `d^p: C^p -> C^{p+1}`; `None` past the last level built.
    pub fn differential(&self, p: usize) -> Option<&SparseMatrix> {
        if !self.has_differential(p) {
            return None;
        }
        Some(self.diffs[p].get_or_init(|| self.build_differential(p)))
    }

    fn build_differential(&self, p: usize) -> SparseMatrix {
        let n = self.fan.dim();
        let mut cols: Vec<Vec<(usize, BigRational)>> = Vec::with_capacity(self.dims[p]);
        for (s, space) in self.spaces[p].iter().enumerate() {
            let sdim = space.dim(n);
            let mut local: Vec<Vec<(usize, BigRational)>> = vec![Vec::new(); sdim];
            for &(t, sign) in self.nerve.cofaces(p, s) {
                let target = self.spaces[p + 1][t];
                let off = self.offsets[p + 1][t];
                let sg = i64::from(sign);
                match (*space, target) {
                    (SectionSpace::Zero, _) | (_, SectionSpace::Zero) => {}
                    (SectionSpace::Full, SectionSpace::Full) => {
                        for (a, col) in local.iter_mut().enumerate() {
                            col.push((off + a, q(sg)));
                        }
                    }
                    (SectionSpace::Line(r), SectionSpace::Full) => {
                        for (a, &x) in self.fan.ray(r).iter().enumerate() {
                            if x != 0 {
                                local[0].push((off + a, q(sg * x)));
                            }
                        }
                    }
                    (SectionSpace::Line(r), SectionSpace::Line(r2)) => {
                        debug_assert_eq!(r, r2, "sections only grow on smaller charts");
                        local[0].push((off, q(sg)));
                    }
                    (SectionSpace::Full, SectionSpace::Line(_)) => {
                        unreachable!("sections only grow on smaller charts")
                    }
                }
            }
            cols.extend(local);
        }
        SparseMatrix::from_columns(self.dims[p + 1], cols)
    }

    pub fn reduction(&self, p: usize) -> Option<&ColumnReduction> {
        let d = self.differential(p)?;
        Some(self.reductions[p].get_or_init(|| ColumnReduction::new(d)))
    }

    fn rank(&self, p: usize) -> usize {
        match self.reductions[p].get() {
            Some(r) => r.rank(),
            None => self.differential(p).map_or(0, SparseMatrix::rank),
        }
    }

    /// `dim H^i`, requiring the complex to reach level `i + 1` unless the
    /// cover is exhausted before that.
    pub fn cohomology_dim(&self, i: usize) -> Result<usize> {
        if i >= self.num_levels() {
            if self.num_levels() == self.nerve.num_cones() {
                return Ok(0);
            }
            return Err(Error::InvalidArgument(format!(
                "complex stops before level {i}"
            )));
        }
        if !self.has_differential(i) && self.num_levels() < self.nerve.num_cones() {
            return Err(Error::InvalidArgument(format!(
                "complex stops before level {}",
                i + 1
            )));
        }
        let out = if self.has_differential(i) {
            self.rank(i)
        } else {
            0
        };
        let inc = if i == 0 { 0 } else { self.rank(i - 1) };
        Ok(self.dims[i] - out - inc)
    }

    /// Flattens a cochain into coordinates; errors if an entry leaves its section space.
    pub fn to_coords(&self, c: &Cochain) -> Result<QVec> {
        let p = c.level;
        if p >= self.num_levels() {
            return Err(Error::InvalidArgument(format!("no level {p} in complex")));
        }
        let mut out = vec![BigRational::zero(); self.dims[p]];
        let level = self.nerve.level(p);
        for (t, v) in &c.entries {
            let idx = level
                .index_of(t)
                .ok_or_else(|| Error::InvalidArgument(format!("{t:?} is not a nerve tuple")))?;
            if v.len() != self.fan.dim() {
                return Err(Error::Dimension(format!(
                    "vector at {t:?} has wrong length"
                )));
            }
            let space = self.spaces[p][idx];
            let coords = space.coords(&self.fan, v).ok_or_else(|| {
                Error::NotCocycle(format!(
                    "value at {t:?} is not a regular field of degree {:?}",
                    self.degree
                ))
            })?;
            let off = self.offsets[p][idx];
            for (a, x) in coords.into_iter().enumerate() {
                out[off + a] = x;
            }
        }
        Ok(out)
    }

    pub fn from_coords(&self, p: usize, x: &[BigRational]) -> Cochain {
        let mut c = Cochain::zero(p);
        let n = self.fan.dim();
        for (idx, t) in self.nerve.level(p).tuples.iter().enumerate() {
            let space = self.spaces[p][idx];
            let d = space.dim(n);
            if d == 0 {
                continue;
            }
            let off = self.offsets[p][idx];
            c.insert_add(t.clone(), space.from_coords(&self.fan, &x[off..off + d]));
        }
        c
    }

    fn sparse_to_dense(len: usize, v: &[(usize, BigRational)]) -> QVec {
        let mut out = vec![BigRational::zero(); len];
        for (i, x) in v {
            out[*i] = x.clone();
        }
        out
    }

    /// Cocycle representatives of a basis of `H^1`, complementary to the coboundaries.
    pub fn h1_basis(&self) -> Result<Vec<TangentClass>> {
        let red1 = match self.reduction(1) {
            Some(r) => r,
            None if self.num_levels() == 2 && self.nerve.num_cones() == 2 => {
                // two charts: every 1-cochain is a cocycle
                return self.h1_basis_from_kernel(
                    (0..self.dims[1])
                        .map(|i| vec![(i, BigRational::one())])
                        .collect(),
                );
            }
            None => {
                if self.num_levels() < 2 {
                    return Ok(Vec::new());
                }
                return Err(Error::InvalidArgument(
                    "complex stops before level 2".into(),
                ));
            }
        };
        self.h1_basis_from_kernel(red1.kernel_basis())
    }

    fn h1_basis_from_kernel(
        &self,
        kernel: Vec<Vec<(usize, BigRational)>>,
    ) -> Result<Vec<TangentClass>> {
        let rows = self.dims[1];
        let d0 = self.differential(0).expect("level 1 exists");
        let mut cols: Vec<Vec<(usize, BigRational)>> =
            (0..d0.ncols()).map(|j| d0.column(j).to_vec()).collect();
        let boundary_cols = cols.len();
        cols.extend(kernel);
        let red = ColumnReduction::new(&SparseMatrix::from_columns(rows, cols));
        let mut out = Vec::new();
        for j in boundary_cols..red.ncols() {
            // columns surviving reduction against coboundaries and earlier kernel vectors
            let reduced = red_column(&red, j);
            if reduced.is_empty() {
                continue;
            }
            let dense = primitive_vector(&Self::sparse_to_dense(rows, &reduced));
            out.push(TangentClass {
                degree: self.degree.clone(),
                cochain: self.from_coords(1, &dense),
                cocycle: true,
            });
        }
        Ok(out)
    }

    /// Decides whether a 2-cochain is a coboundary.
    pub fn solve_coboundary(&self, z: &Cochain) -> Result<Solve> {
        let red = self
            .reduction(1)
            .ok_or_else(|| Error::InvalidArgument("complex stops before level 2".into()))?;
        let coords = self.to_coords(z)?;
        Ok(red.solve(&coords))
    }
}

fn red_column(red: &ColumnReduction, j: usize) -> Vec<(usize, BigRational)> {
    red.reduced_column(j).to_vec()
}

/// A degree-homogeneous class in `H^1(T_X)` given by a cocycle representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentClass {
    pub degree: Vec<i64>,
    pub cochain: Cochain,
    pub cocycle: bool,
}

impl TangentClass {
    pub fn zero(degree: Vec<i64>) -> Self {
        TangentClass {
            degree,
            cochain: Cochain::zero(1),
            cocycle: true,
        }
    }

    /// Checks the cocycle condition and membership in the section spaces.
    pub fn checked(f: &Fan, degree: Vec<i64>, cochain: Cochain) -> Result<Self> {
        check_cocycle(f, &degree, &cochain)?;
        Ok(TangentClass {
            degree,
            cochain,
            cocycle: true,
        })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        TangentClass {
            degree: self.degree.clone(),
            cochain: self.cochain.scale(c),
            cocycle: self.cocycle,
        }
    }
}

/// Errors unless `c` is a 1-cocycle of regular fields of degree `w`.
pub fn check_cocycle(f: &Fan, w: &[i64], c: &Cochain) -> Result<()> {
    if c.level != 1 {
        return Err(Error::NotCocycle(format!("level {} is not 1", c.level)));
    }
    check_regular(f, w, c)?;
    if !c.coboundary(f.num_max_cones()).is_zero() {
        return Err(Error::NotCocycle(format!(
            "coboundary of the degree {w:?} cochain is nonzero"
        )));
    }
    Ok(())
}

/// Errors unless every value of `c` is regular of degree `w` on its chart.
pub fn check_regular(f: &Fan, w: &[i64], c: &Cochain) -> Result<()> {
    let m = f.num_max_cones();
    for (t, v) in &c.entries {
        if t.len() != c.level + 1 || t.windows(2).any(|p| p[0] >= p[1]) || t.iter().any(|&k| k >= m)
        {
            return Err(Error::InvalidArgument(format!("{t:?} is not a cone tuple")));
        }
        if v.len() != f.dim() {
            return Err(Error::Dimension(format!(
                "vector at {t:?} has wrong length"
            )));
        }
        let cone = crate::fan::tuple_intersection(f, t)?;
        if section_rule(f, &cone, w).coords(f, v).is_none() {
            return Err(Error::NotCocycle(format!(
                "value at {t:?} is not a regular field of degree {w:?}"
            )));
        }
    }
    Ok(())
}

/// A class in `H^2(T_X)` of one degree with its nonvanishing evidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CupClass {
    pub degree: Vec<i64>,
    pub cochain: Cochain,
    pub nonzero: bool,
    /// Functional on `C^2` coordinates vanishing on the coboundaries, nonzero on `cochain`.
    pub witness: Option<QVec>,
}

fn degree_sum(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn nerve_for_cup(f: &Fan) -> Arc<CechNerve> {
    Arc::new(CechNerve::new(f, 2))
}

/// Classifies a 2-cocycle in the complex of its degree.
pub fn classify(target: &TangentCechComplex, z: Cochain) -> Result<CupClass> {
    check_regular(target.fan(), target.degree(), &z)?;
    if !z.coboundary(target.fan().num_max_cones()).is_zero() {
        return Err(Error::NotCocycle("cup cochain is not closed".into()));
    }
    let (nonzero, witness) = if z.is_zero() {
        (false, None)
    } else {
        match target.solve_coboundary(&z)? {
            Solve::Solution(_) => (false, None),
            Solve::Witness(phi) => (true, Some(phi)),
        }
    };
    Ok(CupClass {
        degree: target.degree().to_vec(),
        cochain: z,
        nonzero,
        witness,
    })
}

/// `b(xi, xi')` in the complex of degree `deg xi + deg xi'`.
pub fn cup_product_in(
    target: &TangentCechComplex,
    xi: &TangentClass,
    xi2: &TangentClass,
) -> Result<CupClass> {
    let f = target.fan();
    if degree_sum(&xi.degree, &xi2.degree) != target.degree() {
        return Err(Error::InvalidArgument(
            "target complex has the wrong degree".into(),
        ));
    }
    check_cocycle(f, &xi.degree, &xi.cochain)?;
    check_cocycle(f, &xi2.degree, &xi2.cochain)?;
    let z = bracket_cup(&xi.cochain, &xi.degree, &xi2.cochain, &xi2.degree);
    classify(target, z)
}

pub fn cup_product(f: &Fan, xi: &TangentClass, xi2: &TangentClass) -> Result<CupClass> {
    if xi.degree.len() != f.dim() || xi2.degree.len() != f.dim() {
        return Err(Error::Dimension(
            "class degrees do not match the fan".into(),
        ));
    }
    let target =
        TangentCechComplex::with_nerve(f, &degree_sum(&xi.degree, &xi2.degree), nerve_for_cup(f))?;
    cup_product_in(&target, xi, xi2)
}

/// Degree components of `q(xi) = b(xi, xi)` for `xi` the sum of `parts`.
pub fn first_obstruction(f: &Fan, parts: &[TangentClass]) -> Result<Vec<CupClass>> {
    for p in parts {
        if p.degree.len() != f.dim() {
            return Err(Error::Dimension(
                "class degree does not match the fan".into(),
            ));
        }
        check_cocycle(f, &p.degree, &p.cochain)?;
    }
    let mut by_degree: BTreeMap<Vec<i64>, Cochain> = BTreeMap::new();
    for a in parts {
        for b in parts {
            let z = bracket_cup(&a.cochain, &a.degree, &b.cochain, &b.degree);
            let w = degree_sum(&a.degree, &b.degree);
            let slot = by_degree.entry(w).or_insert_with(|| Cochain::zero(2));
            *slot = slot.add(&z);
        }
    }
    let nerve = nerve_for_cup(f);
    by_degree
        .into_iter()
        .map(|(w, z)| {
            let target = TangentCechComplex::with_nerve(f, &w, nerve.clone())?;
            classify(&target, z)
        })
        .collect()
}

/// `dim H^i(T_X)_w` and, for `i = 1`, cocycle representatives of a basis.
pub fn tangent_cohomology(f: &Fan, w: &[i64], i: usize) -> Result<(usize, Vec<TangentClass>)> {
    if i > f.dim() {
        return Ok((0, Vec::new()));
    }
    let nerve = Arc::new(CechNerve::new(f, i + 1));
    let cx = TangentCechComplex::with_nerve(f, w, nerve)?;
    let dim = cx.cohomology_dim(i)?;
    let basis = if i == 1 { cx.h1_basis()? } else { Vec::new() };
    debug_assert!(i != 1 || basis.len() == dim);
    Ok((dim, basis))
}
