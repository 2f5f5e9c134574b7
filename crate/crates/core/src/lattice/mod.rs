//! The Picard lattice of a del Pezzo surface of degree 1 to 4.
//!
//! Classes are integer vectors over the blow-up basis `(L, E1, ..., E_{9-d})`
//! with intersection form `diag(1, -1, ..., -1)` and canonical class
//! `K = (-3, 1, ..., 1)`.

pub mod smith;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use smith::{smith_normal_form, SmithDecomposition};

/// A divisor class, coefficient of `L` first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PicClass(pub Vec<i64>);

impl PicClass {
    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &PicClass) -> PicClass {
        PicClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &PicClass) -> PicClass {
        PicClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> PicClass {
        PicClass(self.0.iter().map(|a| a * k).collect())
    }

    /// Intersection number with the diagonal form `(+1, -1, ..., -1)`.
    pub fn dot(&self, other: &PicClass) -> i64 {
        debug_assert_eq!(self.len(), other.len());
        let mut s = self.0[0] * other.0[0];
        for i in 1..self.0.len() {
            s -= self.0[i] * other.0[i];
        }
        s
    }
}

impl fmt::Display for PicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for PicClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Invalid(format!("bad class {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(PicClass)
    }
}

/// Which family of classes to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    /// `D^2 = -1`, `D.K = -1`.
    Exceptional,
    /// `r^2 = -2`, `r.K = 0`.
    Root,
    /// `C^2 = 0`, `C.K = -2`.
    Conic,
}

impl ClassKind {
    /// Required `(self-intersection, intersection with K)`.
    pub fn numerics(self) -> (i64, i64) {
        match self {
            ClassKind::Exceptional => (-1, -1),
            ClassKind::Root => (-2, 0),
            ClassKind::Conic => (0, -2),
        }
    }
}

/// Number of exceptional classes in degree 1..=4.
pub fn exceptional_count(degree: u8) -> Option<usize> {
    match degree {
        4 => Some(16),
        3 => Some(27),
        2 => Some(56),
        1 => Some(240),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelPezzoLattice {
    degree: u8,
}

impl DelPezzoLattice {
    pub fn new(degree: u8) -> Result<Self> {
        if !(1..=4).contains(&degree) {
            return Err(Error::BadDegree(degree));
        }
        Ok(DelPezzoLattice { degree })
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    /// `10 - degree`.
    pub fn rank(&self) -> usize {
        10 - self.degree as usize
    }

    /// Number of blown-up points, `9 - degree`.
    pub fn points(&self) -> usize {
        9 - self.degree as usize
    }

    /// Diagonal entries of the Gram matrix.
    pub fn gram_diagonal(&self) -> Vec<i64> {
        let mut g = vec![-1; self.rank()];
        g[0] = 1;
        g
    }

    pub fn canonical(&self) -> PicClass {
        let mut k = vec![1; self.rank()];
        k[0] = -3;
        PicClass(k)
    }

    pub fn line(&self) -> PicClass {
        self.unit(0)
    }

    /// Exceptional divisor `E_i`, `i` in `1..=9-degree`.
    pub fn e(&self, i: usize) -> PicClass {
        assert!((1..=self.points()).contains(&i));
        self.unit(i)
    }

    fn unit(&self, i: usize) -> PicClass {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        PicClass(v)
    }

    pub fn class(&self, coeffs: Vec<i64>) -> Result<PicClass> {
        if coeffs.len() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                got: coeffs.len(),
            });
        }
        Ok(PicClass(coeffs))
    }

    pub fn intersect(&self, x: &PicClass, y: &PicClass) -> Result<i64> {
        for c in [x, y] {
            if c.len() != self.rank() {
                return Err(Error::RankMismatch {
                    expected: self.rank(),
                    got: c.len(),
                });
            }
        }
        Ok(x.dot(y))
    }

    /// Simple roots `E_i - E_{i+1}` and `L - E1 - E2 - E3`.
    pub fn simple_roots(&self) -> Vec<PicClass> {
        let n = self.points();
        let mut roots = Vec::with_capacity(n);
        for i in 1..n {
            roots.push(self.e(i).sub(&self.e(i + 1)));
        }
        roots.push(self.line().sub(&self.e(1)).sub(&self.e(2)).sub(&self.e(3)));
        roots
    }

    /// Reflection `x + (x.r) r` in a root `r` with `r^2 = -2`.
    pub fn reflect(&self, x: &PicClass, r: &PicClass) -> PicClass {
        x.add(&r.scale(x.dot(r)))
    }

    pub fn is_kind(&self, c: &PicClass, kind: ClassKind) -> bool {
        let (sq, k) = kind.numerics();
        c.dot(c) == sq && c.dot(&self.canonical()) == k
    }

    /// All classes of the given kind, sorted lexicographically.
    pub fn enumerate_classes(&self, kind: ClassKind) -> Vec<PicClass> {
        match kind {
            ClassKind::Exceptional => self.orbit_closure(vec![self.e(1)]),
            ClassKind::Root => {
                let mut seeds = Vec::new();
                for i in 1..=self.points() {
                    for j in 1..=self.points() {
                        if i != j {
                            seeds.push(self.e(i).sub(&self.e(j)));
                        }
                    }
                }
                seeds.push(self.line().sub(&self.e(1)).sub(&self.e(2)).sub(&self.e(3)));
                self.orbit_closure(seeds)
            }
            ClassKind::Conic => {
                let ex = self.enumerate_classes(ClassKind::Exceptional);
                let mut set = BTreeSet::new();
                for (i, a) in ex.iter().enumerate() {
                    for b in &ex[i + 1..] {
                        if a.dot(b) == 1 {
                            set.insert(a.add(b));
                        }
                    }
                }
                set.into_iter().collect()
            }
        }
    }

    fn orbit_closure(&self, seeds: Vec<PicClass>) -> Vec<PicClass> {
        let simple = self.simple_roots();
        let mut seen: BTreeSet<PicClass> = seeds.iter().cloned().collect();
        let mut queue: VecDeque<PicClass> = seeds.into();
        while let Some(x) = queue.pop_front() {
            for r in &simple {
                let y = self.reflect(&x, r);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Direct search over coefficient vectors solving the numerical conditions
    /// of `kind`. The bound on `L`'s coefficient comes from Cauchy-Schwarz on
    /// the negative definite part.
    pub fn enumerate_classes_bruteforce(&self, kind: ClassKind) -> Vec<PicClass> {
        let (sq, kdot) = kind.numerics();
        let n = self.points() as i64;
        let mut out = Vec::new();
        // sum c_i = -3a - kdot, sum c_i^2 = a^2 - sq, (sum c)^2 <= n sum c^2
        for a in -40i64..=40 {
            let s = -3 * a - kdot;
            let q = a * a - sq;
            if q < 0 || s * s > n * q {
                continue;
            }
            let mut cur = Vec::with_capacity(n as usize);
            search_coeffs(n as usize, s, q, &mut cur, &mut |c| {
                let mut v = Vec::with_capacity(n as usize + 1);
                v.push(a);
                v.extend_from_slice(c);
                out.push(PicClass(v));
            });
        }
        out.sort();
        out
    }

    /// Pairwise intersection data of all exceptional classes.
    pub fn exceptional_config(&self) -> ExceptionalConfig {
        ExceptionalConfig::new(self.clone(), self.enumerate_classes(ClassKind::Exceptional))
    }
}

fn search_coeffs(
    remaining: usize,
    sum: i64,
    sq: i64,
    cur: &mut Vec<i64>,
    emit: &mut dyn FnMut(&[i64]),
) {
    if remaining == 0 {
        if sum == 0 && sq == 0 {
            emit(cur);
        }
        return;
    }
    let r = remaining as i64;
    if sum * sum > r * sq {
        return;
    }
    let m = (sq as f64).sqrt() as i64 + 1;
    for c in -m..=m {
        if c * c > sq {
            continue;
        }
        cur.push(c);
        search_coeffs(remaining - 1, sum - c, sq - c * c, cur, emit);
        cur.pop();
    }
}

/// Exceptional classes with their intersection matrix.
#[derive(Clone, Debug)]
pub struct ExceptionalConfig {
    lattice: DelPezzoLattice,
    classes: Vec<PicClass>,
    inter: Vec<i8>,
}

impl ExceptionalConfig {
    pub fn new(lattice: DelPezzoLattice, classes: Vec<PicClass>) -> Self {
        let n = classes.len();
        let mut inter = vec![0i8; n * n];
        for i in 0..n {
            for j in 0..n {
                inter[i * n + j] = classes[i].dot(&classes[j]) as i8;
            }
        }
        ExceptionalConfig {
            lattice,
            classes,
            inter,
        }
    }

    pub fn lattice(&self) -> &DelPezzoLattice {
        &self.lattice
    }

    pub fn degree(&self) -> u8 {
        self.lattice.degree
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[PicClass] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> &PicClass {
        &self.classes[i]
    }

    #[inline]
    pub fn inter(&self, i: usize, j: usize) -> i8 {
        self.inter[i * self.classes.len() + j]
    }

    pub fn inter_row(&self, i: usize) -> &[i8] {
        let n = self.classes.len();
        &self.inter[i * n..(i + 1) * n]
    }

    pub fn index_of(&self, c: &PicClass) -> Option<usize> {
        self.classes.binary_search(c).ok()
    }
}
