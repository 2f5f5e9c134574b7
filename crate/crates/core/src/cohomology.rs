//! First cohomology of finite groups acting on the Picard lattice, and the
//! admissibility predicate "H¹ vanishes on every subgroup".

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::smith::{coordinates_in, quotient_invariants, smith, Int, KernelBuilder, Mat};
use crate::perm::Perm;
use crate::weyl::small::{prime_factors, SmallGroup, SMALL_CAP};
use crate::weyl::WeylGroup;

/// Abelian invariants of H¹, each > 1, in divisibility order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct H1Result {
    pub invariants: Vec<u64>,
}

impl H1Result {
    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }
}

impl fmt::Display for H1Result {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariants.is_empty() {
            return write!(f, "H1 = 0");
        }
        let parts: Vec<String> = self.invariants.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "H1 = {}", parts.join(" x "))
    }
}

/// A finite group given by integer matrices of its generators acting on
/// `Z^rank`; matrices are row-major and act on column vectors.
#[derive(Clone, Debug)]
pub struct MatrixAction {
    pub rank: usize,
    pub gens: Vec<Vec<i64>>,
}

impl MatrixAction {
    pub fn new(rank: usize, gens: Vec<Vec<i64>>) -> MatrixAction {
        for g in &gens {
            assert_eq!(g.len(), rank * rank, "generator matrix has wrong size");
        }
        MatrixAction { rank, gens }
    }

    pub fn from_weyl(w: &WeylGroup, gens: &[Perm]) -> MatrixAction {
        MatrixAction::new(w.rank(), gens.iter().map(|g| w.lattice_matrix(g)).collect())
    }

    /// All group elements as matrices, identity first, in BFS order.
    pub fn elements(&self, cap: usize) -> Result<Vec<Vec<i64>>> {
        let (elts, _) = self.cayley(cap)?;
        Ok(elts)
    }

    /// Elements in BFS order plus `edges[h][i]` = index of `g_i h`.
    fn cayley(&self, cap: usize) -> Result<(Vec<Vec<i64>>, Vec<Vec<u32>>)> {
        let r = self.rank;
        let id = identity(r);
        let mut index: HashMap<Vec<i64>, u32> = HashMap::new();
        index.insert(id.clone(), 0);
        let mut elts = vec![id];
        let mut edges = Vec::new();
        let mut k = 0;
        while k < elts.len() {
            let mut row = Vec::with_capacity(self.gens.len());
            for g in &self.gens {
                let p = mat_mul(g, &elts[k], r);
                let j = match index.get(&p) {
                    Some(&j) => j,
                    None => {
                        if elts.len() >= cap {
                            return Err(Error::Oversize {
                                order: elts.len() as u64 + 1,
                                cap: cap as u64,
                            });
                        }
                        let j = elts.len() as u32;
                        index.insert(p.clone(), j);
                        elts.push(p);
                        j
                    }
                };
                row.push(j);
            }
            edges.push(row);
            k += 1;
        }
        Ok((elts, edges))
    }
}

fn identity(r: usize) -> Vec<i64> {
    let mut m = vec![0i64; r * r];
    for i in 0..r {
        m[i * r + i] = 1;
    }
    m
}

fn mat_mul(a: &[i64], b: &[i64], r: usize) -> Vec<i64> {
    let mut out = vec![0i64; r * r];
    for i in 0..r {
        for k in 0..r {
            let x = a[i * r + k];
            if x == 0 {
                continue;
            }
            for j in 0..r {
                out[i * r + j] += x * b[k * r + j];
            }
        }
    }
    out
}

/// H¹ by propagating cocycles along a spanning tree of the Cayley graph.
///
/// Unknowns are the values `f(g_i)` on the generators. Every element gets
/// `f(h) = A_h u` with `A_{g_i h} = E_i + M_i A_h`; each non-tree edge adds
/// the equations `A_{g_i h} = E_i + M_i A_h` against the stored value.
pub fn h1(action: &MatrixAction) -> Result<H1Result> {
    let (elts, edges) = action.cayley(SMALL_CAP)?;
    if let Some(r) = h1_cayley::<i64>(action, &elts, &edges) {
        return Ok(r);
    }
    Ok(h1_cayley::<BigInt>(action, &elts, &edges).expect("arbitrary precision cannot overflow"))
}

fn h1_cayley<T: Int>(action: &MatrixAction, elts: &[Vec<i64>], edges: &[Vec<u32>]) -> Option<H1Result> {
    let r = action.rank;
    let k = action.gens.len();
    let n = k * r;
    if n == 0 {
        return Some(H1Result { invariants: vec![] });
    }
    let mats: Vec<Vec<T>> = action
        .gens
        .iter()
        .map(|g| g.iter().map(|&x| T::from_i64(x)).collect())
        .collect();
    // A_h stored row-major r x n
    let mut a: Vec<Option<Vec<T>>> = vec![None; elts.len()];
    a[0] = Some(vec![T::zero(); r * n]);
    let mut kb = KernelBuilder::<T>::new(n);
    for h in 0..elts.len() {
        let ah = a[h].clone().expect("BFS order visits parents first");
        for (i, m) in mats.iter().enumerate() {
            // E_i + M_i A_h
            let mut cand = vec![T::zero(); r * n];
            for row in 0..r {
                for mid in 0..r {
                    let x = &m[row * r + mid];
                    if x.is_zero() {
                        continue;
                    }
                    for col in 0..n {
                        let y = &ah[mid * n + col];
                        if !y.is_zero() {
                            let t = x.checked_mul(y)?;
                            cand[row * n + col] = cand[row * n + col].checked_add(&t)?;
                        }
                    }
                }
                let c = &mut cand[row * n + i * r + row];
                *c = c.checked_add(&T::one())?;
            }
            let j = edges[h][i] as usize;
            match &a[j] {
                None => a[j] = Some(cand),
                Some(stored) => {
                    for row in 0..r {
                        let eq: Vec<(usize, T)> = (0..n)
                            .filter_map(|col| {
                                let d = stored[row * n + col].checked_sub(&cand[row * n + col])?;
                                (!d.is_zero()).then_some((col, d))
                            })
                            .collect();
                        if !eq.is_empty() {
                            kb.push_sparse(&eq)?;
                        }
                    }
                }
            }
        }
    }
    // coboundaries of the basis vectors: u_i = (M_i - 1) e_j
    let targets: Vec<Vec<T>> = (0..r)
        .map(|j| {
            let mut v = vec![T::zero(); n];
            for (i, m) in mats.iter().enumerate() {
                for row in 0..r {
                    let mut x = m[row * r + j].clone();
                    if row == j {
                        x = x - T::one();
                    }
                    v[i * r + row] = x;
                }
            }
            v
        })
        .collect();
    let z = kb.dim();
    let coords = coordinates_in(kb.basis(), &targets, n)?;
    let inv = quotient_invariants(&coords, z)?;
    Some(H1Result {
        invariants: finite_invariants(&inv),
    })
}

fn finite_invariants<T: Int>(inv: &[T]) -> Vec<u64> {
    inv.iter()
        .map(|d| {
            assert!(!d.is_zero(), "H1 of a finite group acting on a lattice is finite");
            d.to_bigint()
                .magnitude().to_u64().expect("invariant fits in u64")
        })
        .collect()
}

/// Independent H¹ for small groups: the full cocycle system over all pairs,
/// with one unknown vector per group element.
pub fn h1_bruteforce_oracle(action: &MatrixAction) -> Result<H1Result> {
    let elts = action.elements(65)?;
    if elts.len() > 64 {
        return Err(Error::Oversize {
            order: elts.len() as u64,
            cap: 64,
        });
    }
    if let Some(r) = pair_system::<i64>(action.rank, &elts) {
        return Ok(r);
    }
    Ok(pair_system::<BigInt>(action.rank, &elts).expect("arbitrary precision cannot overflow"))
}

fn pair_system<T: Int>(r: usize, elts: &[Vec<i64>]) -> Option<H1Result> {
    let g = elts.len();
    let n = g * r;
    let index: HashMap<&Vec<i64>, usize> = elts.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut kb = KernelBuilder::<T>::new(n);
    for (a, ma) in elts.iter().enumerate() {
        for (b, mb) in elts.iter().enumerate() {
            let ab = index[&mat_mul(ma, mb, r)];
            // f(ab) - f(a) - M_a f(b) = 0
            for row in 0..r {
                let mut eq: HashMap<usize, i64> = HashMap::new();
                *eq.entry(ab * r + row).or_default() += 1;
                *eq.entry(a * r + row).or_default() -= 1;
                for col in 0..r {
                    let x = ma[row * r + col];
                    if x != 0 {
                        *eq.entry(b * r + col).or_default() -= x;
                    }
                }
                let mut eq: Vec<(usize, T)> = eq
                    .into_iter()
                    .filter(|&(_, v)| v != 0)
                    .map(|(i, v)| (i, T::from_i64(v)))
                    .collect();
                eq.sort_by_key(|e| e.0);
                if !eq.is_empty() {
                    kb.push_sparse(&eq)?;
                }
            }
        }
    }
    let targets: Vec<Vec<T>> = (0..r)
        .map(|j| {
            let mut v = vec![T::zero(); n];
            for (e, m) in elts.iter().enumerate() {
                for row in 0..r {
                    v[e * r + row] = T::from_i64(m[row * r + j] - i64::from(row == j));
                }
            }
            v
        })
        .collect();
    let coords = coordinates_in(kb.basis(), &targets, n)?;
    let inv = quotient_invariants(&coords, kb.dim())?;
    Some(H1Result {
        invariants: finite_invariants(&inv),
    })
}

/// H¹ through `H¹(G, M) ≅ (M/NM)^G / im(M^G)` with `N = |G|`, which needs
/// only the generators and the group order.
pub fn h1_fixed_point_oracle(action: &MatrixAction, order: u64) -> H1Result {
    let r = action.rank;
    let big = |x: i64| BigInt::from(x);
    // stacked (M_i - 1)
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for g in &action.gens {
        for row in 0..r {
            rows.push((0..r).map(|c| big(g[row * r + c] - i64::from(row == c))).collect());
        }
    }
    if rows.is_empty() {
        return H1Result { invariants: vec![] };
    }
    let a = Mat::from_rows(&rows, r);
    let sm = smith(&a).expect("arbitrary precision cannot overflow");
    let nn = BigInt::from(order);
    let diag = sm.diagonal();
    // L = V diag(N / gcd(N, s_j)) Z^r; M^G = V e_j for s_j = 0
    let mut lattice_cols: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..r {
        let s = if j < diag.len() { diag[j].clone() } else { BigInt::zero() };
        let scale = if s.is_zero() {
            BigInt::from(1)
        } else {
            &nn / num_integer::Integer::gcd(&nn, &s)
        };
        lattice_cols.push(sm.v.col(j).into_iter().map(|x| x * &scale).collect());
    }
    let mut sub: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..r {
        let s_zero = j >= diag.len() || diag[j].is_zero();
        if s_zero {
            sub.push(sm.v.col(j));
        }
        let mut e = vec![BigInt::zero(); r];
        e[j] = nn.clone();
        sub.push(e);
    }
    let coords = coordinates_in_full(&lattice_cols, &sub, r);
    let inv = quotient_invariants(&coords, r).expect("arbitrary precision cannot overflow");
    H1Result {
        invariants: finite_invariants(&inv),
    }
}

/// Coordinates in a full-rank (not necessarily saturated) lattice basis.
fn coordinates_in_full(basis: &[Vec<BigInt>], targets: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let mut k = Mat::zeros(n, n);
    for (c, b) in basis.iter().enumerate() {
        for r in 0..n {
            k.set(r, c, b[r].clone());
        }
    }
    let sm = smith(&k).expect("arbitrary precision cannot overflow");
    assert_eq!(sm.rank, n);
    targets
        .iter()
        .map(|t| {
            let ut: Vec<BigInt> = (0..n)
                .map(|i| (0..n).map(|j| sm.u.get(i, j) * &t[j]).sum())
                .collect();
            let y: Vec<BigInt> = (0..n)
                .map(|i| {
                    let d = sm.s.get(i, i);
                    assert!((&ut[i] % d).is_zero(), "target outside lattice");
                    &ut[i] / d
                })
                .collect();
            (0..n)
                .map(|i| (0..n).map(|j| sm.v.get(i, j) * &y[j]).sum())
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdmissibilityMethod {
    DirectAllSubgroups,
    SylowReduction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityVerdict {
    pub admissible: bool,
    /// generators of a subgroup with nontrivial H¹
    pub witness: Option<Vec<Perm>>,
    pub witness_h1: Option<H1Result>,
    pub method: AdmissibilityMethod,
}

/// H¹ computations for subgroups of one Weyl group, memoized by the exact
/// element set.
pub struct Cohomology<'w> {
    weyl: &'w WeylGroup,
    memo: Mutex<HashMap<Vec<u64>, H1Result>>,
}

impl<'w> Cohomology<'w> {
    pub fn new(weyl: &'w WeylGroup) -> Cohomology<'w> {
        Cohomology {
            weyl,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn weyl(&self) -> &WeylGroup {
        self.weyl
    }

    pub fn memo_len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }

    /// Key of a subgroup: sorted element ids in the Weyl group.
    pub fn key(&self, elements: &[Perm]) -> Vec<u64> {
        let chain = self.weyl.group().chain();
        let mut k: Vec<u64> = elements
            .iter()
            .map(|g| chain.element_id(g).expect("element of the Weyl group"))
            .collect();
        k.sort_unstable();
        k
    }

    pub fn h1(&self, gens: &[Perm]) -> Result<H1Result> {
        for g in gens {
            self.weyl.check_member(g)?;
        }
        h1(&MatrixAction::from_weyl(self.weyl, gens))
    }

    /// H¹ of `<gens>` where `elements` lists the whole subgroup.
    fn h1_memo(&self, gens: &[Perm], elements: &[Perm]) -> Result<H1Result> {
        let key = self.key(elements);
        if let Some(r) = self.memo.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let r = h1(&MatrixAction::from_weyl(self.weyl, gens))?;
        self.memo.lock().unwrap().insert(key, r.clone());
        Ok(r)
    }

    /// True iff every cyclic subgroup of `<x>` has trivial H¹.
    pub fn element_is_good(&self, x: &Perm) -> Result<bool> {
        let n = x.order();
        for d in divisors(n) {
            let y = x.pow(d);
            if y.is_identity() {
                continue;
            }
            let elts: Vec<Perm> = (0..n / d).map(|k| y.pow(k)).collect();
            if !self.h1_memo(&[y], &elts)?.is_trivial() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_admissible(&self, gens: &[Perm], method: AdmissibilityMethod) -> Result<AdmissibilityVerdict> {
        for g in gens {
            self.weyl.check_member(g)?;
        }
        let n = self.weyl.config().len();
        let g = SmallGroup::generate(n, gens, SMALL_CAP)?;
        self.is_admissible_small(&g, method)
    }

    pub fn is_admissible_small(&self, g: &SmallGroup, method: AdmissibilityMethod) -> Result<AdmissibilityVerdict> {
        let mut subs: Vec<(SmallGroup, Vec<u32>)> = Vec::new();
        match method {
            AdmissibilityMethod::DirectAllSubgroups => {
                for s in g.subgroup_classes() {
                    subs.push((g.clone(), s));
                }
            }
            AdmissibilityMethod::SylowReduction => {
                for p in prime_factors(g.order() as u64) {
                    let syl = g.subgroup(&g.sylow(p));
                    for s in syl.all_subgroups() {
                        subs.push((syl.clone(), s));
                    }
                }
            }
        }
        for (parent, s) in &subs {
            if s.len() == 1 {
                continue;
            }
            let gens: Vec<Perm> = parent
                .small_generating_set(s)
                .iter()
                .map(|&i| parent.element(i).clone())
                .collect();
            let elements: Vec<Perm> = s.iter().map(|&i| parent.element(i).clone()).collect();
            let r = self.h1_memo(&gens, &elements)?;
            if !r.is_trivial() {
                return Ok(AdmissibilityVerdict {
                    admissible: false,
                    witness: Some(gens),
                    witness_h1: Some(r),
                    method,
                });
            }
        }
        Ok(AdmissibilityVerdict {
            admissible: true,
            witness: None,
            witness_h1: None,
            method,
        })
    }

    /// Sylow check restricted to non-cyclic p-subgroups, for callers that
    /// already know every element is good.
    pub fn admissible_given_good_elements(&self, g: &SmallGroup) -> Result<bool> {
        for p in prime_factors(g.order() as u64) {
            let syl_idx = g.sylow(p);
            if syl_idx.len() <= p as usize {
                continue;
            }
            let syl = g.subgroup(&syl_idx);
            for s in syl.all_subgroups() {
                if s.len() <= p as usize {
                    continue;
                }
                let max_order = s.iter().map(|&i| syl.elt_order(i)).max().unwrap_or(1);
                if max_order as usize == s.len() {
                    continue;
                }
                let gens: Vec<Perm> = syl
                    .small_generating_set(&s)
                    .iter()
                    .map(|&i| syl.element(i).clone())
                    .collect();
                let elements: Vec<Perm> = s.iter().map(|&i| syl.element(i).clone()).collect();
                if !self.h1_memo(&gens, &elements)?.is_trivial() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neg1() -> MatrixAction {
        MatrixAction::new(1, vec![vec![-1]])
    }

    fn swap2() -> MatrixAction {
        MatrixAction::new(2, vec![vec![0, 1, 1, 0]])
    }

    #[test]
    fn hand_cases() {
        assert_eq!(h1(&neg1()).unwrap().invariants, vec![2]);
        assert!(h1(&swap2()).unwrap().is_trivial());
        assert!(h1(&MatrixAction::new(3, vec![])).unwrap().is_trivial());
        assert_eq!(h1_bruteforce_oracle(&neg1()).unwrap().invariants, vec![2]);
        assert!(h1_bruteforce_oracle(&swap2()).unwrap().is_trivial());
        assert_eq!(h1_fixed_point_oracle(&neg1(), 2).invariants, vec![2]);
        assert!(h1_fixed_point_oracle(&swap2(), 2).is_trivial());
    }

    #[test]
    fn klein_four_on_signs() {
        // C2 x C2 acting on Z^2 by independent sign changes: H1 = (Z/2)^2
        let a = MatrixAction::new(2, vec![vec![-1, 0, 0, 1], vec![1, 0, 0, -1]]);
        assert_eq!(h1(&a).unwrap().invariants, vec![2, 2]);
        assert_eq!(h1_bruteforce_oracle(&a).unwrap().invariants, vec![2, 2]);
        assert_eq!(h1_fixed_point_oracle(&a, 4).invariants, vec![2, 2]);
    }

    #[test]
    fn display() {
        assert_eq!(H1Result { invariants: vec![] }.to_string(), "H1 = 0");
        assert_eq!(H1Result { invariants: vec![2, 2] }.to_string(), "H1 = Z/2 x Z/2");
    }
}
