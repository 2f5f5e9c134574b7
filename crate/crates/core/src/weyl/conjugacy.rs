//! Conjugacy of subgroups by backtracking over point maps that preserve the
//! intersection matrix.

use std::collections::HashMap;

use crate::lattice::ExceptionalConfig;
use crate::perm::Perm;
use crate::weyl::classes::for_each_element;
use crate::weyl::chain::StabChain;
use crate::weyl::small::SmallGroup;

/// Search space: permutations of the exceptional classes preserving the
/// intersection matrix and, optionally, a point coloring. The caller's
/// `accept` decides membership in the ambient group.
pub struct PointSearch<'a> {
    config: &'a ExceptionalConfig,
    colors: Option<&'a [u8]>,
    /// give up after this many backtrack nodes per tuple
    pub node_limit: u64,
}

struct State {
    w: Vec<i32>,
    used: Vec<bool>,
    trail: Vec<usize>,
}

impl<'a> PointSearch<'a> {
    pub fn new(config: &'a ExceptionalConfig, colors: Option<&'a [u8]>) -> PointSearch<'a> {
        PointSearch {
            config,
            colors,
            node_limit: u64::MAX,
        }
    }

    fn color(&self, p: usize) -> u8 {
        self.colors.map_or(0, |c| c[p])
    }

    /// Finds `w` with `w a_i w⁻¹ = b_i` for all `i`, with `accept(w)`.
    pub fn simultaneous_conjugator(&self, a: &[Perm], b: &[Perm], accept: &dyn Fn(&Perm) -> bool) -> Option<Perm> {
        let n = self.config.len();
        let ainv: Vec<Perm> = a.iter().map(|g| g.inverse()).collect();
        let binv: Vec<Perm> = b.iter().map(|g| g.inverse()).collect();
        let a_orbits = crate::weyl::small::point_orbits(n, a);
        let b_orbits = crate::weyl::small::point_orbits(n, b);
        let mut a_orb_size = vec![0usize; n];
        for o in &a_orbits {
            for &p in o {
                a_orb_size[p] = o.len();
            }
        }
        let mut b_orb_size = vec![0usize; n];
        for o in &b_orbits {
            for &p in o {
                b_orb_size[p] = o.len();
            }
        }
        let cyc = |g: &Perm| -> Vec<u16> {
            let mut out = vec![0u16; n];
            for p in 0..n {
                if out[p] != 0 {
                    continue;
                }
                let mut len = 1u16;
                let mut q = g.apply(p);
                while q != p {
                    q = g.apply(q);
                    len += 1;
                }
                let mut q = p;
                loop {
                    out[q] = len;
                    q = g.apply(q);
                    if q == p {
                        break;
                    }
                }
            }
            out
        };
        let a_cyc: Vec<Vec<u16>> = a.iter().map(cyc).collect();
        let b_cyc: Vec<Vec<u16>> = b.iter().map(cyc).collect();
        let local_ok = |p: usize, q: usize| {
            a_orb_size[p] == b_orb_size[q]
                && self.color(p) == self.color(q)
                && a_cyc.iter().zip(&b_cyc).all(|(ca, cb)| ca[p] == cb[q])
        };
        // one branching point per A-orbit, large orbits first
        let mut order: Vec<&Vec<usize>> = a_orbits.iter().collect();
        order.sort_by(|x, y| y.len().cmp(&x.len()).then(x[0].cmp(&y[0])));
        let branch: Vec<usize> = order.iter().map(|o| o[0]).collect();

        let mut st = State {
            w: vec![-1; n],
            used: vec![false; n],
            trail: Vec::with_capacity(n),
        };
        let mut nodes = 0u64;
        let ctx = Ctx {
            search: self,
            a,
            ainv: &ainv,
            b,
            binv: &binv,
            local_ok: &local_ok,
            branch: &branch,
            accept,
        };
        ctx.dfs(&mut st, 0, &mut nodes)
    }

    /// Finds `w` with `w A w⁻¹ = B`. `class_of` maps elements to an ambient
    /// class invariant; `accept` tests ambient membership.
    pub fn conjugate_subgroups(
        &self,
        a: &SmallGroup,
        b: &SmallGroup,
        class_of: &dyn Fn(&Perm) -> u64,
        accept: &dyn Fn(&Perm) -> bool,
    ) -> Option<Perm> {
        if a.order() != b.order() {
            return None;
        }
        let a_gens: Vec<Perm> = a.generator_perms();
        if a_gens.is_empty() {
            return Some(Perm::identity(self.config.len()));
        }
        let b_class: Vec<u64> = b.elements().iter().map(class_of).collect();
        let mut by_class: HashMap<u64, Vec<u32>> = HashMap::new();
        for (i, &c) in b_class.iter().enumerate() {
            by_class.entry(c).or_default().push(i as u32);
        }
        let a_cls: Vec<u64> = a_gens.iter().map(class_of).collect();
        // first image up to conjugacy in B
        let mut first: Vec<u32> = Vec::new();
        for cl in b.conjugacy_classes() {
            if b_class[cl[0] as usize] == a_cls[0] {
                first.push(cl[0]);
            }
        }
        let mut rest: Vec<Vec<u32>> = Vec::new();
        for c in &a_cls[1..] {
            rest.push(by_class.get(c).cloned().unwrap_or_default());
        }
        // pairwise products constrain the tuple
        let a_prod: Vec<Vec<u64>> = (0..a_gens.len())
            .map(|i| (0..a_gens.len()).map(|j| class_of(&a_gens[i].compose(&a_gens[j]))).collect())
            .collect();
        let mut tuple = vec![0u32; a_gens.len()];
        for &f in &first {
            tuple[0] = f;
            if let Some(w) = self.tuples(a, b, &a_gens, &b_class, &a_prod, &rest, &mut tuple, 1, class_of, accept) {
                return Some(w);
            }
        }
        None
    }

    #[allow(clippy::too_many_arguments)]
    fn tuples(
        &self,
        a: &SmallGroup,
        b: &SmallGroup,
        a_gens: &[Perm],
        b_class: &[u64],
        a_prod: &[Vec<u64>],
        rest: &[Vec<u32>],
        tuple: &mut Vec<u32>,
        depth: usize,
        class_of: &dyn Fn(&Perm) -> u64,
        accept: &dyn Fn(&Perm) -> bool,
    ) -> Option<Perm> {
        if depth == a_gens.len() {
            let imgs: Vec<Perm> = tuple.iter().map(|&i| b.element(i).clone()).collect();
            if b.closure(tuple).len() != a.order() {
                return None;
            }
            return self.simultaneous_conjugator(a_gens, &imgs, accept);
        }
        for &c in &rest[depth - 1] {
            let ok = (0..depth).all(|j| {
                b_class[b.mul(tuple[j], c) as usize] == a_prod[j][depth]
                    && b_class[b.mul(c, tuple[j]) as usize] == a_prod[depth][j]
            });
            if !ok {
                continue;
            }
            tuple[depth] = c;
            if let Some(w) = self.tuples(a, b, a_gens, b_class, a_prod, rest, tuple, depth + 1, class_of, accept) {
                return Some(w);
            }
        }
        None
    }
}

struct Ctx<'c, 'a> {
    search: &'c PointSearch<'a>,
    a: &'c [Perm],
    ainv: &'c [Perm],
    b: &'c [Perm],
    binv: &'c [Perm],
    local_ok: &'c dyn Fn(usize, usize) -> bool,
    branch: &'c [usize],
    accept: &'c dyn Fn(&Perm) -> bool,
}

impl Ctx<'_, '_> {
    fn consistent(&self, st: &State, x: usize, y: usize) -> bool {
        if st.used[y] || !(self.local_ok)(x, y) {
            return false;
        }
        let cfg = self.search.config;
        let (rx, ry) = (cfg.inter_row(x), cfg.inter_row(y));
        st.trail.iter().all(|&x2| rx[x2] == ry[st.w[x2] as usize])
    }

    /// Assigns `w(p) = q` and everything it forces; false on conflict.
    fn assign(&self, st: &mut State, p: usize, q: usize) -> bool {
        if !self.consistent(st, p, q) {
            return false;
        }
        let mut stack = vec![(p, q)];
        st.w[p] = q as i32;
        st.used[q] = true;
        st.trail.push(p);
        while let Some((x, y)) = stack.pop() {
            for i in 0..self.a.len() {
                for (ga, gb) in [(&self.a[i], &self.b[i]), (&self.ainv[i], &self.binv[i])] {
                    let (x2, y2) = (ga.apply(x), gb.apply(y));
                    if st.w[x2] >= 0 {
                        if st.w[x2] as usize != y2 {
                            return false;
                        }
                        continue;
                    }
                    if !self.consistent(st, x2, y2) {
                        return false;
                    }
                    st.w[x2] = y2 as i32;
                    st.used[y2] = true;
                    st.trail.push(x2);
                    stack.push((x2, y2));
                }
            }
        }
        true
    }

    fn undo(&self, st: &mut State, mark: usize) {
        while st.trail.len() > mark {
            let x = st.trail.pop().unwrap();
            st.used[st.w[x] as usize] = false;
            st.w[x] = -1;
        }
    }

    fn dfs(&self, st: &mut State, k: usize, nodes: &mut u64) -> Option<Perm> {
        *nodes += 1;
        if *nodes > self.search.node_limit {
            return None;
        }
        let mut k = k;
        while k < self.branch.len() && st.w[self.branch[k]] >= 0 {
            k += 1;
        }
        if k == self.branch.len() {
            let imgs: Vec<usize> = st.w.iter().map(|&y| y as usize).collect();
            let w = Perm::from_images(&imgs).expect("assignment is a bijection");
            return (self.accept)(&w).then_some(w);
        }
        let p = self.branch[k];
        let n = st.w.len();
        for q in 0..n {
            let mark = st.trail.len();
            if self.assign(st, p, q) {
                if let Some(w) = self.dfs(st, k + 1, nodes) {
                    return Some(w);
                }
            }
            self.undo(st, mark);
        }
        None
    }
}

/// Exhaustive search for `w` in a small ambient group with `w A w⁻¹ = B`.
pub fn conjugate_by_enumeration(ambient: &StabChain, a_gens: &[Perm], b: &SmallGroup) -> Option<Perm> {
    let mut found = None;
    let mut stop = false;
    for_each_element(ambient, |_, w| {
        if stop {
            return;
        }
        if a_gens.iter().all(|g| b.index_of(&g.conjugate_by(w)).is_some()) {
            found = Some(w.clone());
            stop = true;
        }
    });
    found
}
