//! Exact integer linear algebra: Smith normal form, integer kernels and
//! lattice quotients.
//!
//! Every routine is generic over [`Int`], implemented for `i64` (checked,
//! returning `None` on overflow) and `BigInt`. The public entry points retry
//! in `BigInt` whenever the `i64` pass overflows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

pub trait Int:
    Clone + std::fmt::Debug + PartialEq + Eq + Integer + Signed + CheckedAdd + CheckedSub + CheckedMul
{
    fn from_i64(v: i64) -> Self;
    fn to_bigint(&self) -> BigInt;
}

impl Int for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }

    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Int for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }

    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Int> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r.iter().cloned());
        }
        Mat {
            rows: rows.len(),
            cols,
            data,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn checked_mul(&self, other: &Mat<T>) -> Option<Mat<T>> {
        assert_eq!(self.cols, other.rows);
        let mut out: Mat<T> = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let p = a.checked_mul(b)?;
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].checked_add(&p)?;
                }
            }
        }
        Some(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &T) -> Option<()> {
        if k.is_zero() {
            return Some(());
        }
        for j in 0..self.cols {
            let s = self.get(src, j);
            if s.is_zero() {
                continue;
            }
            let v = self.get(dst, j).checked_add(&s.checked_mul(k)?)?;
            self.set(dst, j, v);
        }
        Some(())
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &T) -> Option<()> {
        if k.is_zero() {
            return Some(());
        }
        for i in 0..self.rows {
            let s = self.get(i, src);
            if s.is_zero() {
                continue;
            }
            let v = self.get(i, dst).checked_add(&s.checked_mul(k)?)?;
            self.set(i, dst, v);
        }
        Some(())
    }

    /// (row p, row q) <- (a*row p + b*row q, c*row p + d*row q)
    fn combine_rows(&mut self, p: usize, q: usize, a: &T, b: &T, c: &T, d: &T) -> Option<()> {
        for j in 0..self.cols {
            let (x, y) = (self.get(p, j).clone(), self.get(q, j).clone());
            if x.is_zero() && y.is_zero() {
                continue;
            }
            let nx = a.checked_mul(&x)?.checked_add(&b.checked_mul(&y)?)?;
            let ny = c.checked_mul(&x)?.checked_add(&d.checked_mul(&y)?)?;
            self.set(p, j, nx);
            self.set(q, j, ny);
        }
        Some(())
    }

    /// (col p, col q) <- (a*col p + b*col q, c*col p + d*col q)
    fn combine_cols(&mut self, p: usize, q: usize, a: &T, b: &T, c: &T, d: &T) -> Option<()> {
        for i in 0..self.rows {
            let (x, y) = (self.get(i, p).clone(), self.get(i, q).clone());
            if x.is_zero() && y.is_zero() {
                continue;
            }
            let nx = a.checked_mul(&x)?.checked_add(&b.checked_mul(&y)?)?;
            let ny = c.checked_mul(&x)?.checked_add(&d.checked_mul(&y)?)?;
            self.set(i, p, nx);
            self.set(i, q, ny);
        }
        Some(())
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    pub fn map<U: Int>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl Mat<i64> {
    pub fn to_big(&self) -> Mat<BigInt> {
        self.map(|v| BigInt::from(*v))
    }
}

/// `u * a * v = s` with `u`, `v` unimodular and `s` diagonal with
/// `s[0] | s[1] | ...`. `u_inv` is the inverse of `u`.
#[derive(Clone, Debug)]
pub struct Smith<T> {
    pub s: Mat<T>,
    pub u: Mat<T>,
    pub u_inv: Mat<T>,
    pub v: Mat<T>,
    pub rank: usize,
}

impl<T: Int> Smith<T> {
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }
}

/// Smith form of an arbitrary-precision matrix together with bases for its
/// kernel and image.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub s: Mat<BigInt>,
    pub u: Mat<BigInt>,
    pub v: Mat<BigInt>,
    /// Nonzero diagonal entries of `s`.
    pub invariant_factors: Vec<BigInt>,
    /// Columns of `v` spanning `{x : a x = 0}`.
    pub kernel_basis: Vec<Vec<BigInt>>,
    /// Vectors spanning the column space of `a`.
    pub image_basis: Vec<Vec<BigInt>>,
}

impl SmithDecomposition {
    /// Invariants of the cokernel `Z^m / a Z^n` that are not 1 (0 means a free
    /// summand).
    pub fn cokernel_invariants(&self) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = self
            .invariant_factors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect();
        for _ in self.invariant_factors.len()..self.s.rows {
            out.push(BigInt::zero());
        }
        out
    }
}

pub fn smith_normal_form(a: &Mat<BigInt>) -> SmithDecomposition {
    let sm = smith(a).expect("BigInt arithmetic cannot overflow");
    let rank = sm.rank;
    let kernel_basis = (rank..sm.v.cols).map(|j| sm.v.col(j)).collect();
    let image_basis = (0..rank)
        .map(|j| {
            let d = sm.s.get(j, j).clone();
            sm.u_inv.col(j).into_iter().map(|x| x * &d).collect()
        })
        .collect();
    SmithDecomposition {
        invariant_factors: (0..rank).map(|i| sm.s.get(i, i).clone()).collect(),
        s: sm.s,
        u: sm.u,
        v: sm.v,
        kernel_basis,
        image_basis,
    }
}

/// Smith normal form with transforms. `None` only on `i64` overflow.
pub fn smith<T: Int>(a: &Mat<T>) -> Option<Smith<T>> {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = Mat::identity(m);
    let mut u_inv = Mat::identity(m);
    let mut v = Mat::identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // pivot: smallest nonzero absolute value in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = s.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            for i in t + 1..m {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let (a, b) = (s.get(t, t).clone(), s.get(i, t).clone());
                if b.is_multiple_of(&a) {
                    let q = -b.div_floor(&a);
                    s.add_row(i, t, &q)?;
                    u.add_row(i, t, &q)?;
                    u_inv.add_col(t, i, &-q)?;
                } else {
                    let (g, x, y) = ext_gcd(&a, &b);
                    let (ag, bg) = (a.div_floor(&g), b.div_floor(&g));
                    let nb = -bg.clone();
                    s.combine_rows(t, i, &x, &y, &nb, &ag)?;
                    u.combine_rows(t, i, &x, &y, &nb, &ag)?;
                    // inverse of [[x, y], [-b', a']] is [[a', -y], [b', x]]
                    let ny = -y;
                    u_inv.combine_cols(t, i, &ag, &bg, &ny, &x)?;
                }
            }
            let mut dirty = false;
            for j in t + 1..n {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let (a, b) = (s.get(t, t).clone(), s.get(t, j).clone());
                if b.is_multiple_of(&a) {
                    let q = -b.div_floor(&a);
                    s.add_col(j, t, &q)?;
                    v.add_col(j, t, &q)?;
                } else {
                    let (g, x, y) = ext_gcd(&a, &b);
                    let (ag, bg) = (a.div_floor(&g), b.div_floor(&g));
                    let nb = -bg;
                    // new col t = x c_t + y c_j, new col j = -b' c_t + a' c_j
                    s.combine_cols(t, j, &x, &y, &nb, &ag)?;
                    v.combine_cols(t, j, &x, &y, &nb, &ag)?;
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the remaining block
            let p = s.get(t, t).clone();
            let mut fix = None;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if !s.get(i, j).is_multiple_of(&p) {
                        fix = Some(i);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(i) => {
                    let one = T::one();
                    s.add_row(t, i, &one)?;
                    u.add_row(t, i, &one)?;
                    u_inv.add_col(i, t, &(-one))?;
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
            for i in 0..m {
                let x = -u_inv.get(i, t).clone();
                u_inv.set(i, t, x);
            }
        }
        t += 1;
    }
    Some(Smith {
        rank: t,
        s,
        u,
        u_inv,
        v,
    })
}

fn ext_gcd<T: Int>(a: &T, b: &T) -> (T, T, T) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Incrementally maintained basis of `{x in Z^n : e.x = 0 for every fed row e}`.
///
/// The basis spans a saturated sublattice. Rows are accepted in sparse form.
#[derive(Clone, Debug)]
pub struct KernelBuilder<T> {
    n: usize,
    /// column-major: `basis[c]` is one basis vector of length `n`
    basis: Vec<Vec<T>>,
}

impl<T: Int> KernelBuilder<T> {
    pub fn new(n: usize) -> Self {
        let basis = (0..n)
            .map(|c| {
                let mut v = vec![T::zero(); n];
                v[c] = T::one();
                v
            })
            .collect();
        KernelBuilder { n, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    /// Impose `sum_k coeff_k x[idx_k] = 0`. Returns `None` on overflow.
    pub fn push_sparse(&mut self, row: &[(usize, T)]) -> Option<()> {
        let mut c: Vec<T> = Vec::with_capacity(self.basis.len());
        let mut any = false;
        for b in &self.basis {
            let mut acc = T::zero();
            for (k, e) in row {
                let x = &b[*k];
                if !x.is_zero() {
                    acc = acc.checked_add(&x.checked_mul(e)?)?;
                }
            }
            any |= !acc.is_zero();
            c.push(acc);
        }
        if !any {
            return Some(());
        }
        // Euclid across basis vectors: repeatedly reduce by the vector with
        // the smallest nonzero coefficient until one nonzero remains
        let first = loop {
            let mut piv = None;
            let mut nonzero = 0;
            for (j, x) in c.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                nonzero += 1;
                if piv.is_none_or(|p: usize| x.abs() < c[p].abs()) {
                    piv = Some(j);
                }
            }
            let p = piv.unwrap();
            if nonzero == 1 {
                break p;
            }
            let cp = c[p].clone();
            let bp = self.basis[p].clone();
            for j in 0..c.len() {
                if j == p || c[j].is_zero() {
                    continue;
                }
                let q = c[j].div_floor(&cp);
                if q.is_zero() {
                    continue;
                }
                let bj = &mut self.basis[j];
                for k in 0..self.n {
                    if !bp[k].is_zero() {
                        bj[k] = bj[k].checked_sub(&bp[k].checked_mul(&q)?)?;
                    }
                }
                c[j] = c[j].checked_sub(&cp.checked_mul(&q)?)?;
            }
        };
        self.basis.remove(first);
        let limit = T::from_i64(1 << 20);
        if self.basis.iter().any(|b| b.iter().any(|x| x.abs() > limit)) {
            self.reduce()?;
        }
        Some(())
    }

    pub fn push_dense(&mut self, row: &[T]) -> Option<()> {
        let sparse: Vec<(usize, T)> = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        self.push_sparse(&sparse)
    }

    /// Cheap size reduction keeping entries small: pairwise subtract when it
    /// shrinks the larger vector.
    fn reduce(&mut self) -> Option<()> {
        let d = self.basis.len();
        if d < 2 {
            return Some(());
        }
        for _ in 0..2 {
            for i in 0..d {
                for j in 0..d {
                    if i == j {
                        continue;
                    }
                    let (ni, dot) = {
                        let (bi, bj) = (&self.basis[i], &self.basis[j]);
                        let mut ni = T::zero();
                        let mut dot = T::zero();
                        for k in 0..self.n {
                            ni = ni.checked_add(&bj[k].checked_mul(&bj[k])?)?;
                            dot = dot.checked_add(&bi[k].checked_mul(&bj[k])?)?;
                        }
                        (ni, dot)
                    };
                    if ni.is_zero() {
                        continue;
                    }
                    // round(dot / ni)
                    let two = T::one() + T::one();
                    let q = (dot.checked_mul(&two)?.checked_add(&ni)?).div_floor(&ni.checked_mul(&two)?);
                    if q.is_zero() {
                        continue;
                    }
                    let bj = self.basis[j].clone();
                    let bi = &mut self.basis[i];
                    for k in 0..self.n {
                        bi[k] = bi[k].checked_sub(&bj[k].checked_mul(&q)?)?;
                    }
                }
            }
        }
        Some(())
    }
}

/// Coordinates of `targets` in the basis `basis` of a saturated sublattice of
/// `Z^n`. `None` on overflow; panics if a target is outside the span.
pub fn coordinates_in<T: Int>(basis: &[Vec<T>], targets: &[Vec<T>], n: usize) -> Option<Vec<Vec<T>>> {
    let z = basis.len();
    if z == 0 {
        for t in targets {
            assert!(t.iter().all(|x| x.is_zero()), "target outside an empty span");
        }
        return Some(vec![Vec::new(); targets.len()]);
    }
    // k: n x z with basis vectors as columns
    let mut k = Mat::zeros(n, z);
    for (c, b) in basis.iter().enumerate() {
        for r in 0..n {
            k.set(r, c, b[r].clone());
        }
    }
    let sm = smith(&k)?;
    assert_eq!(sm.rank, z, "basis is not linearly independent");
    let mut out = Vec::with_capacity(targets.len());
    for t in targets {
        // u t
        let mut ut = vec![T::zero(); n];
        for i in 0..n {
            let mut acc = T::zero();
            for j in 0..n {
                acc = acc.checked_add(&sm.u.get(i, j).checked_mul(&t[j])?)?;
            }
            ut[i] = acc;
        }
        for (i, x) in ut.iter().enumerate().skip(z) {
            assert!(x.is_zero(), "target outside span (row {i})");
        }
        let mut y = Vec::with_capacity(z);
        for (i, x) in ut.iter().take(z).enumerate() {
            let d = sm.s.get(i, i);
            assert!(x.is_multiple_of(d), "target outside span");
            y.push(x.div_floor(d));
        }
        // c = v y
        let mut c = vec![T::zero(); z];
        for i in 0..z {
            let mut acc = T::zero();
            for j in 0..z {
                acc = acc.checked_add(&sm.v.get(i, j).checked_mul(&y[j])?)?;
            }
            c[i] = acc;
        }
        out.push(c);
    }
    Some(out)
}

/// Abelian invariants (factors > 1, zeros for free summands) of
/// `Z^z / span(gens)`.
pub fn quotient_invariants<T: Int>(gens: &[Vec<T>], z: usize) -> Option<Vec<T>> {
    if z == 0 {
        return Some(Vec::new());
    }
    let mut m = Mat::zeros(z, gens.len());
    for (c, g) in gens.iter().enumerate() {
        for r in 0..z {
            m.set(r, c, g[r].clone());
        }
    }
    let sm = smith(&m)?;
    let mut out: Vec<T> = sm.diagonal().into_iter().take(sm.rank).filter(|d| !d.is_one()).collect();
    for _ in sm.rank..z {
        out.push(T::zero());
    }
    Some(out)
}

pub fn to_u64_list(v: &[BigInt]) -> Vec<u64> {
    v.iter().map(|x| x.to_u64().expect("invariant fits in u64")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(rows: &[&[i64]]) -> Mat<BigInt> {
        let cols = rows.first().map_or(0, |r| r.len());
        let r: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Mat::from_rows(&r, cols)
    }

    fn ints(v: &[BigInt]) -> Vec<i64> {
        v.iter().map(|x| x.to_i64().unwrap()).collect()
    }

    #[test]
    fn diag_2_3() {
        let d = smith_normal_form(&big(&[&[2, 0], &[0, 3]]));
        assert_eq!(ints(&d.invariant_factors), vec![1, 6]);
    }

    #[test]
    fn zero_matrix() {
        let d = smith_normal_form(&big(&[&[0, 0], &[0, 0]]));
        assert!(d.invariant_factors.is_empty());
        assert_eq!(d.kernel_basis.len(), 2);
    }

    #[test]
    fn rank_one() {
        let d = smith_normal_form(&big(&[&[2, 0], &[0, 0]]));
        assert_eq!(ints(&d.invariant_factors), vec![2]);
        assert_eq!(d.kernel_basis.len(), 1);
        assert_eq!(d.image_basis.len(), 1);
    }

    #[test]
    fn empty_matrix() {
        let d = smith_normal_form(&Mat::zeros(0, 3));
        assert!(d.invariant_factors.is_empty());
        assert_eq!(d.kernel_basis.len(), 3);
        let d = smith_normal_form(&Mat::zeros(2, 0));
        assert_eq!(d.cokernel_invariants().len(), 2);
    }

    fn det(m: &Mat<BigInt>) -> BigInt {
        // fraction-free via Smith of a square unimodular matrix: product of
        // diagonal up to sign is enough to check |det| = 1
        let s = smith(m).unwrap();
        s.diagonal().iter().fold(BigInt::one(), |a, b| a * b)
    }

    proptest! {
        #[test]
        fn round_trip(rows in 0usize..6, cols in 0usize..6, seed in prop::collection::vec(-9i64..10, 36)) {
            let data: Vec<BigInt> = seed.iter().take(rows * cols).map(|&x| BigInt::from(x)).collect();
            let a = Mat { rows, cols, data };
            let d = smith_normal_form(&a);
            let uav = d.u.checked_mul(&a).unwrap().checked_mul(&d.v).unwrap();
            prop_assert_eq!(&uav, &d.s);
            prop_assert!(det(&d.u).abs().is_one());
            prop_assert!(det(&d.v).abs().is_one());
            for w in d.invariant_factors.windows(2) {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
            for k in &d.kernel_basis {
                for i in 0..rows {
                    let s: BigInt = (0..cols).map(|j| a.get(i, j) * &k[j]).sum();
                    prop_assert!(s.is_zero());
                }
            }
        }

        #[test]
        fn kernel_builder_matches_smith(rows in 0usize..5, cols in 1usize..7, seed in prop::collection::vec(-5i64..6, 35)) {
            let data: Vec<i64> = seed.iter().take(rows * cols).copied().collect();
            let a = Mat { rows, cols, data: data.clone() };
            let mut kb = KernelBuilder::<i64>::new(cols);
            for i in 0..rows {
                kb.push_dense(a.row(i)).unwrap();
            }
            let d = smith_normal_form(&a.to_big());
            prop_assert_eq!(kb.dim(), d.kernel_basis.len());
            for b in kb.basis() {
                for i in 0..rows {
                    let s: i64 = (0..cols).map(|j| a.get(i, j) * b[j]).sum();
                    prop_assert_eq!(s, 0);
                }
            }
            // saturation: the Smith kernel vectors have integer coordinates
            let targets: Vec<Vec<i64>> = d.kernel_basis.iter().map(|v| v.iter().map(|x| x.to_i64().unwrap()).collect()).collect();
            prop_assert!(coordinates_in(kb.basis(), &targets, cols).is_some());
        }
    }

    #[test]
    fn quotient_of_2z() {
        let inv = quotient_invariants(&[vec![2i64]], 1).unwrap();
        assert_eq!(inv, vec![2]);
        let inv = quotient_invariants::<i64>(&[], 2).unwrap();
        assert_eq!(inv, vec![0, 0]);
    }

    #[test]
    fn i64_overflow_is_reported() {
        let a = Mat {
            rows: 2,
            cols: 2,
            data: vec![i64::MAX, 3, 5, i64::MAX - 7],
        };
        // either succeeds exactly or reports overflow; BigInt path must agree
        let b = smith(&a.to_big()).unwrap();
        if let Some(s) = smith(&a) {
            assert_eq!(s.s.to_big(), b.s);
        }
    }
}
