//! Explicit element lists for groups small enough to enumerate.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::perm::Perm;

/// Default cap on enumerated group orders.
pub const SMALL_CAP: usize = 10_000;

const TABLE_LIMIT: usize = 512;

/// A finite permutation group with every element listed. Element 0 is the
/// identity. Subgroups are sorted index lists.
#[derive(Clone, Debug)]
pub struct SmallGroup {
    degree: usize,
    gens: Vec<u32>,
    elements: Vec<Perm>,
    index: HashMap<Perm, u32>,
    table: Option<Vec<u32>>,
    inverses: Vec<u32>,
    orders: Vec<u32>,
}

impl SmallGroup {
    /// Enumerates `<gens>`; fails with `Oversize` past `cap` elements.
    pub fn generate(degree: usize, gens: &[Perm], cap: usize) -> Result<SmallGroup> {
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id, 0u32);
        let mut k = 0;
        while k < elements.len() {
            for g in gens {
                let h = g.compose(&elements[k]);
                if !index.contains_key(&h) {
                    if elements.len() >= cap {
                        return Err(Error::Oversize {
                            order: elements.len() as u64 + 1,
                            cap: cap as u64,
                        });
                    }
                    index.insert(h.clone(), elements.len() as u32);
                    elements.push(h);
                }
            }
            k += 1;
        }
        let gen_idx = gens
            .iter()
            .map(|g| index[g])
            .filter(|&i| i != 0)
            .collect::<Vec<_>>();
        Ok(SmallGroup::from_parts(degree, gen_idx, elements, index))
    }

    fn from_parts(degree: usize, gens: Vec<u32>, elements: Vec<Perm>, index: HashMap<Perm, u32>) -> SmallGroup {
        let n = elements.len();
        let table = (n <= TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(n * n);
            for a in &elements {
                for b in &elements {
                    t.push(index[&a.compose(b)]);
                }
            }
            t
        });
        let inverses = elements.iter().map(|g| index[&g.inverse()]).collect();
        let orders = elements.iter().map(|g| g.order() as u32).collect();
        SmallGroup {
            degree,
            gens,
            elements,
            index,
            table,
            inverses,
            orders,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, i: u32) -> &Perm {
        &self.elements[i as usize]
    }

    pub fn index_of(&self, g: &Perm) -> Option<u32> {
        self.index.get(g).copied()
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn generator_perms(&self) -> Vec<Perm> {
        self.gens.iter().map(|&i| self.elements[i as usize].clone()).collect()
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.table {
            Some(t) => t[a as usize * self.elements.len() + b as usize],
            None => self.index[&self.elements[a as usize].compose(&self.elements[b as usize])],
        }
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    #[inline]
    pub fn elt_order(&self, a: u32) -> u32 {
        self.orders[a as usize]
    }

    /// `b a b⁻¹`
    pub fn conj(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(b, a), self.inv(b))
    }

    pub fn all(&self) -> Vec<u32> {
        (0..self.order() as u32).collect()
    }

    /// Subgroup generated by `gens`, as a sorted index list.
    pub fn closure(&self, gens: &[u32]) -> Vec<u32> {
        self.closure_from(&[0], gens)
    }

    /// Closure of an existing subgroup `base` together with `extra`.
    pub fn closure_from(&self, base: &[u32], extra: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.order()];
        let mut out: Vec<u32> = Vec::new();
        for &b in base {
            if !seen[b as usize] {
                seen[b as usize] = true;
                out.push(b);
            }
        }
        let gens: Vec<u32> = base.iter().chain(extra).copied().filter(|&g| g != 0).collect();
        if !seen[0] {
            seen[0] = true;
            out.push(0);
        }
        let mut k = 0;
        while k < out.len() {
            let x = out[k];
            for &g in &gens {
                let y = self.mul(g, x);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    out.push(y);
                }
            }
            k += 1;
        }
        out.sort_unstable();
        out
    }

    /// Extracts a subgroup as a group in its own right.
    pub fn subgroup(&self, sub: &[u32]) -> SmallGroup {
        let gens = self.small_generating_set(sub);
        let perms: Vec<Perm> = gens.iter().map(|&i| self.elements[i as usize].clone()).collect();
        SmallGroup::generate(self.degree, &perms, usize::MAX).expect("no cap")
    }

    /// A short generating set of `sub`, greedy in index order with a
    /// preference for elements of large order.
    pub fn small_generating_set(&self, sub: &[u32]) -> Vec<u32> {
        let mut cand: Vec<u32> = sub.iter().copied().filter(|&x| x != 0).collect();
        cand.sort_by_key(|&x| (std::cmp::Reverse(self.orders[x as usize]), x));
        // a single generator when the group is cyclic
        if sub.len() > 1 {
            for &a in cand.iter().take(64) {
                if self.closure(&[a]).len() == sub.len() {
                    return vec![a];
                }
            }
        }
        let mut gens = Vec::new();
        let mut cur = vec![0u32];
        for &x in &cand {
            if cur.len() == sub.len() {
                break;
            }
            if cur.binary_search(&x).is_err() {
                gens.push(x);
                cur = self.closure_from(&cur, &[x]);
            }
        }
        if gens.len() > 2 {
            'outer: for (i, &a) in cand.iter().enumerate().take(48) {
                for &b in cand.iter().skip(i + 1).take(48) {
                    if self.closure(&[a, b]).len() == sub.len() {
                        gens = vec![a, b];
                        break 'outer;
                    }
                }
            }
        }
        gens
    }

    pub fn is_subgroup_normal(&self, sub: &[u32]) -> bool {
        let set: HashSet<u32> = sub.iter().copied().collect();
        self.gens
            .iter()
            .all(|&g| sub.iter().all(|&h| set.contains(&self.conj(h, g))))
    }

    /// All subgroups, each a sorted index list, ordered by size then content.
    pub fn all_subgroups(&self) -> Vec<Vec<u32>> {
        let mut found: HashSet<Vec<u32>> = HashSet::new();
        let trivial = vec![0u32];
        found.insert(trivial.clone());
        let mut frontier = vec![trivial];
        // cyclic extension: every subgroup is reached by adding one element
        // at a time; prime-power elements generate every finite group
        let pp: Vec<u32> = (1..self.order() as u32)
            .filter(|&x| is_prime_power(self.orders[x as usize] as u64))
            .collect();
        while let Some(h) = frontier.pop() {
            let mut covered = vec![false; self.order()];
            for &x in &h {
                covered[x as usize] = true;
            }
            for &x in &pp {
                if covered[x as usize] {
                    continue;
                }
                let k = self.closure_from(&h, &[x]);
                for &y in &k {
                    // elements whose addition yields the same group
                    if self.closure_from(&h, &[y]).len() == k.len() {
                        covered[y as usize] = true;
                    }
                }
                if found.insert(k.clone()) {
                    frontier.push(k);
                }
            }
        }
        let mut out: Vec<Vec<u32>> = found.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    /// Conjugation orbit of a subgroup.
    pub fn conjugates(&self, sub: &[u32]) -> Vec<Vec<u32>> {
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        seen.insert(sub.to_vec());
        let mut queue = vec![sub.to_vec()];
        let mut k = 0;
        while k < queue.len() {
            for &g in &self.gens {
                let mut c: Vec<u32> = queue[k].iter().map(|&h| self.conj(h, g)).collect();
                c.sort_unstable();
                if seen.insert(c.clone()) {
                    queue.push(c);
                }
            }
            k += 1;
        }
        queue
    }

    /// Representatives of the conjugacy classes of subgroups.
    pub fn subgroup_classes(&self) -> Vec<Vec<u32>> {
        let mut done: HashSet<Vec<u32>> = HashSet::new();
        let mut reps = Vec::new();
        for s in self.all_subgroups() {
            if done.contains(&s) {
                continue;
            }
            for c in self.conjugates(&s) {
                done.insert(c);
            }
            reps.push(s);
        }
        reps
    }

    /// A Sylow `p`-subgroup by greedy ascent through normalizers.
    pub fn sylow(&self, p: u64) -> Vec<u32> {
        let n = self.order() as u64;
        let mut target = 1u64;
        let mut m = n;
        while m % p == 0 {
            m /= p;
            target *= p;
        }
        let pelts: Vec<u32> = (1..self.order() as u32)
            .filter(|&x| is_power_of(self.orders[x as usize] as u64, p))
            .collect();
        let mut cur = vec![0u32];
        while (cur.len() as u64) < target {
            let set: HashSet<u32> = cur.iter().copied().collect();
            let gens = self.small_generating_set(&cur);
            let x = pelts
                .iter()
                .copied()
                .find(|&x| {
                    !set.contains(&x) && gens.iter().all(|&g| set.contains(&self.conj(g, x)))
                })
                .expect("a p-subgroup below Sylow order has a p-element in its normalizer");
            cur = self.closure_from(&cur, &[x]);
        }
        cur
    }

    pub fn center(&self) -> Vec<u32> {
        (0..self.order() as u32)
            .filter(|&z| self.gens.iter().all(|&g| self.mul(g, z) == self.mul(z, g)))
            .collect()
    }

    /// Commutator subgroup of a subgroup.
    pub fn derived(&self, sub: &[u32]) -> Vec<u32> {
        let gens = self.small_generating_set(sub);
        let mut comm = Vec::new();
        for &a in &gens {
            for &b in &gens {
                let c = self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)));
                if c != 0 {
                    comm.push(c);
                }
            }
        }
        // normal closure in `sub`
        let mut cur = self.closure(&comm);
        loop {
            let set: HashSet<u32> = cur.iter().copied().collect();
            let extra: Vec<u32> = gens
                .iter()
                .flat_map(|&g| cur.iter().map(move |&h| (g, h)))
                .map(|(g, h)| self.conj(h, g))
                .filter(|c| !set.contains(c))
                .collect();
            if extra.is_empty() {
                return cur;
            }
            cur = self.closure_from(&cur, &extra);
        }
    }

    pub fn derived_series_orders(&self) -> Vec<usize> {
        let mut cur = self.all();
        let mut out = vec![cur.len()];
        loop {
            let d = self.derived(&cur);
            if d.len() == cur.len() {
                return out;
            }
            out.push(d.len());
            cur = d;
        }
    }

    /// Invariant factors of the abelianization.
    pub fn abelian_invariants(&self) -> Vec<u64> {
        let d = self.derived(&self.all());
        let dset: HashSet<u32> = d.iter().copied().collect();
        // order of each coset in G/G'
        let mut coset_of = vec![u32::MAX; self.order()];
        let mut coset_orders = Vec::new();
        for x in 0..self.order() as u32 {
            if coset_of[x as usize] != u32::MAX {
                continue;
            }
            let c = coset_orders.len() as u32;
            for &h in &d {
                coset_of[self.mul(x, h) as usize] = c;
            }
            let mut m = 1u64;
            let mut y = x;
            while !dset.contains(&y) {
                y = self.mul(y, x);
                m += 1;
            }
            coset_orders.push(m);
        }
        abelian_invariants_from_orders(&coset_orders)
    }

    /// Conjugacy classes of elements, sorted by (order, size, least index).
    pub fn conjugacy_classes(&self) -> Vec<Vec<u32>> {
        let mut cls = vec![u32::MAX; self.order()];
        let mut out: Vec<Vec<u32>> = Vec::new();
        for x in 0..self.order() as u32 {
            if cls[x as usize] != u32::MAX {
                continue;
            }
            let c = out.len() as u32;
            let mut orbit = vec![x];
            cls[x as usize] = c;
            let mut k = 0;
            while k < orbit.len() {
                for &g in &self.gens {
                    let y = self.conj(orbit[k], g);
                    if cls[y as usize] == u32::MAX {
                        cls[y as usize] = c;
                        orbit.push(y);
                    }
                }
                k += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out.sort_by_key(|c| (self.orders[c[0] as usize], c.len(), c[0]));
        out
    }

    pub fn order_histogram(&self) -> BTreeMap<u32, usize> {
        let mut h = BTreeMap::new();
        for &o in &self.orders {
            *h.entry(o).or_insert(0) += 1;
        }
        h
    }

    pub fn is_abelian(&self) -> bool {
        self.gens
            .iter()
            .all(|&a| self.gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Stabilizer of a point of the underlying permutation domain.
    pub fn point_stabilizer(&self, point: usize) -> Vec<u32> {
        (0..self.order() as u32)
            .filter(|&g| self.elements[g as usize].apply(point) == point)
            .collect()
    }

    /// Orbits on the underlying points, ordered by size then least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let gens: Vec<Perm> = self.generator_perms();
        point_orbits(self.degree, &gens)
    }
}

/// Orbits of `<gens>` on `0..n`, each sorted, ordered by size then least
/// point.
pub fn point_orbits(n: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for p in 0..n {
        if seen[p] {
            continue;
        }
        seen[p] = true;
        let mut orb = vec![p];
        let mut k = 0;
        while k < orb.len() {
            for g in gens {
                let q = g.apply(orb[k]);
                if !seen[q] {
                    seen[q] = true;
                    orb.push(q);
                }
            }
            k += 1;
        }
        orb.sort_unstable();
        out.push(orb);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a[0].cmp(&b[0])));
    out
}

pub fn is_prime_power(n: u64) -> bool {
    n > 1 && is_power_of(n, smallest_prime_factor(n))
}

/// `n = p^k` for some `k ≥ 0`.
pub fn is_power_of(mut n: u64, p: u64) -> bool {
    if n == 0 {
        return false;
    }
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

pub fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Invariant factors of a finite abelian group from the orders of all of its
/// elements.
pub fn abelian_invariants_from_orders(orders: &[u64]) -> Vec<u64> {
    let n = orders.len() as u64;
    let mut by_prime: Vec<(u64, Vec<u64>)> = Vec::new();
    for p in prime_factors(n) {
        // |A[p^k]| for k = 1, 2, ...
        let mut exps = Vec::new();
        let mut prev = 1u64;
        let mut pk = p;
        loop {
            let c = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
            if c == prev {
                break;
            }
            // number of cyclic factors of order ≥ p^k
            let mut r = 0;
            let mut q = c / prev;
            while q > 1 {
                q /= p;
                r += 1;
            }
            exps.push(r);
            prev = c;
            pk *= p;
        }
        // exps[k-1] = #factors with exponent ≥ k
        let mut parts = Vec::new();
        for (k, &cnt) in exps.iter().enumerate() {
            let next = exps.get(k + 1).copied().unwrap_or(0);
            for _ in 0..(cnt - next) {
                parts.push(p.pow(k as u32 + 1));
            }
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        by_prime.push((p, parts));
    }
    let len = by_prime.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for (_, parts) in &by_prime {
        for (i, &q) in parts.iter().enumerate() {
            out[i] = out[i].lcm(&q);
        }
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[usize]) -> Perm {
        Perm::from_images(v).unwrap()
    }

    fn s4() -> SmallGroup {
        SmallGroup::generate(4, &[perm(&[1, 2, 3, 0]), perm(&[1, 0, 2, 3])], 100).unwrap()
    }

    #[test]
    fn s4_structure() {
        let g = s4();
        assert_eq!(g.order(), 24);
        assert_eq!(g.center().len(), 1);
        assert_eq!(g.derived_series_orders(), vec![24, 12, 4, 1]);
        assert_eq!(g.abelian_invariants(), vec![2]);
        assert_eq!(g.all_subgroups().len(), 30);
        assert_eq!(g.subgroup_classes().len(), 11);
        assert_eq!(g.conjugacy_classes().len(), 5);
        assert_eq!(g.sylow(2).len(), 8);
        assert_eq!(g.sylow(3).len(), 3);
        assert_eq!(g.sylow(5).len(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        let r = SmallGroup::generate(4, &[perm(&[1, 2, 3, 0]), perm(&[1, 0, 2, 3])], 10);
        assert!(matches!(r, Err(Error::Oversize { .. })));
    }

    #[test]
    fn abelian_invariants_of_products() {
        // C2 x C4 x C3 on 2 + 4 + 3 points
        let g = SmallGroup::generate(
            9,
            &[
                perm(&[1, 0, 2, 3, 4, 5, 6, 7, 8]),
                perm(&[0, 1, 3, 4, 5, 2, 6, 7, 8]),
                perm(&[0, 1, 2, 3, 4, 5, 7, 8, 6]),
            ],
            100,
        )
        .unwrap();
        assert_eq!(g.abelian_invariants(), vec![2, 12]);
        assert!(g.is_abelian());
        assert_eq!(g.all_subgroups().len(), 16);
    }

    #[test]
    fn number_theory_helpers() {
        assert!(is_prime_power(8));
        assert!(is_prime_power(7));
        assert!(!is_prime_power(6));
        assert!(!is_prime_power(1));
        assert_eq!(prime_factors(2903040), vec![2, 3, 5, 7]);
    }
}
