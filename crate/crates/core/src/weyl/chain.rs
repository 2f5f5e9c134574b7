//! Stabilizer chains by the deterministic Schreier-Sims algorithm.

use rand::Rng;

use crate::perm::Perm;

#[derive(Clone, Debug)]
struct Level {
    base: u8,
    gens: Vec<Perm>,
    orbit: Vec<u8>,
    /// position of a point in `orbit`, `u32::MAX` when outside
    pos: Vec<u32>,
    /// `trans[k]` maps `base` to `orbit[k]`
    trans: Vec<Perm>,
    /// flat `orbit.len() x n` table of inverse transversal images
    trans_inv: Vec<u8>,
}

impl Level {
    fn new(n: usize, base: usize) -> Level {
        Level {
            base: base as u8,
            gens: Vec::new(),
            orbit: Vec::new(),
            pos: vec![u32::MAX; n],
            trans: Vec::new(),
            trans_inv: Vec::new(),
        }
    }

    fn rebuild_orbit(&mut self, n: usize) {
        self.pos.iter_mut().for_each(|p| *p = u32::MAX);
        self.orbit.clear();
        self.trans.clear();
        let b = self.base as usize;
        self.orbit.push(self.base);
        self.pos[b] = 0;
        self.trans.push(Perm::identity(n));
        let mut k = 0;
        while k < self.orbit.len() {
            let x = self.orbit[k] as usize;
            for s in &self.gens {
                let y = s.apply(x);
                if self.pos[y] == u32::MAX {
                    self.pos[y] = self.orbit.len() as u32;
                    self.orbit.push(y as u8);
                    let t = s.compose(&self.trans[k]);
                    self.trans.push(t);
                }
            }
            k += 1;
        }
        self.trans_inv = Vec::with_capacity(self.orbit.len() * n);
        for t in &self.trans {
            self.trans_inv.extend_from_slice(t.inverse().bytes());
        }
    }

    #[inline]
    fn inv_image(&self, k: usize, x: usize, n: usize) -> u8 {
        self.trans_inv[k * n + x]
    }
}

/// Base and strong generating set with explicit transversals.
#[derive(Clone, Debug)]
pub struct StabChain {
    n: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(n: usize, gens: &[Perm]) -> StabChain {
        let mut chain = StabChain {
            n,
            levels: Vec::new(),
        };
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        if gens.is_empty() {
            return chain;
        }
        let b = gens[0].first_moved().unwrap();
        let mut top = Level::new(n, b);
        top.gens = gens;
        top.rebuild_orbit(n);
        chain.levels.push(top);
        chain.schreier_sims();
        chain
    }

    fn schreier_sims(&mut self) {
        let n = self.n;
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let lvl = i as usize;
            let mut added = None;
            'check: for k in 0..self.levels[lvl].orbit.len() {
                for s_idx in 0..self.levels[lvl].gens.len() {
                    let level = &self.levels[lvl];
                    let s = &level.gens[s_idx];
                    let x = level.orbit[k] as usize;
                    let sx = s.apply(x);
                    let kk = level.pos[sx] as usize;
                    // u_{s(x)}^{-1} s u_x fixes the base point
                    let mut h = Vec::with_capacity(n);
                    for p in 0..n {
                        let a = level.trans[k].apply(p);
                        let b = s.apply(a);
                        h.push(level.inv_image(kk, b, n));
                    }
                    let h = Perm::from_bytes(h.into_boxed_slice());
                    let (y, j) = self.strip_from(h, lvl + 1);
                    if j < self.levels.len() || !y.is_identity() {
                        added = Some((y, j));
                        break 'check;
                    }
                }
            }
            match added {
                None => i -= 1,
                Some((y, j)) => {
                    if j == self.levels.len() {
                        let b = y.first_moved().unwrap();
                        self.levels.push(Level::new(n, b));
                    }
                    for l in lvl + 1..=j {
                        self.levels[l].gens.push(y.clone());
                        self.levels[l].rebuild_orbit(n);
                    }
                    i = j as isize;
                }
            }
        }
    }

    /// Sift from `start`; returns the residue and the level where sifting
    /// stopped (`levels.len()` on full success).
    fn strip_from(&self, mut h: Perm, start: usize) -> (Perm, usize) {
        for (l, level) in self.levels.iter().enumerate().skip(start) {
            let x = h.apply(level.base as usize);
            let k = level.pos[x];
            if k == u32::MAX {
                return (h, l);
            }
            let inv = &level.trans_inv[k as usize * self.n..(k as usize + 1) * self.n];
            let moved: Vec<u8> = h.bytes().iter().map(|&y| inv[y as usize]).collect();
            h = Perm::from_bytes(moved.into_boxed_slice());
        }
        (h, self.levels.len())
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.n {
            return false;
        }
        let (y, j) = self.strip_from(g.clone(), 0);
        j == self.levels.len() && y.is_identity()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base as usize).collect()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Transversal element mapping the base point of level `l` to the
    /// `k`-th point of its orbit.
    pub fn transversal(&self, l: usize, k: usize) -> &Perm {
        &self.levels[l].trans[k]
    }

    pub fn strong_generators(&self) -> Vec<Perm> {
        let mut out: Vec<Perm> = Vec::new();
        for l in &self.levels {
            for g in &l.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    /// Index of `g` in the mixed-radix numbering given by the transversals,
    /// computed from the images of the base points only. `base_images` is
    /// consumed as scratch space.
    pub fn id_from_base_images(&self, base_images: &mut [u8]) -> Option<u64> {
        let mut id = 0u64;
        let k = self.levels.len();
        for l in 0..k {
            let level = &self.levels[l];
            let p = level.pos[base_images[l] as usize];
            if p == u32::MAX {
                return None;
            }
            id = id * level.orbit.len() as u64 + p as u64;
            let inv = &level.trans_inv[p as usize * self.n..(p as usize + 1) * self.n];
            for x in base_images.iter_mut().take(k).skip(l + 1) {
                *x = inv[*x as usize];
            }
        }
        Some(id)
    }

    /// Element id; `None` for non-members. Only the base images are checked,
    /// so callers must pass members when they rely on a match.
    pub fn element_id(&self, g: &Perm) -> Option<u64> {
        let mut imgs: Vec<u8> = self.levels.iter().map(|l| g.bytes()[l.base as usize]).collect();
        self.id_from_base_images(&mut imgs)
    }

    pub fn element_from_id(&self, mut id: u64) -> Perm {
        let mut positions = vec![0usize; self.levels.len()];
        for l in (0..self.levels.len()).rev() {
            let len = self.levels[l].orbit.len() as u64;
            positions[l] = (id % len) as usize;
            id /= len;
        }
        let mut g = Perm::identity(self.n);
        for (l, &p) in positions.iter().enumerate() {
            g = g.compose(&self.levels[l].trans[p]);
        }
        g
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Perm {
        let order = self.order();
        let id = if order > u64::MAX as u128 {
            panic!("group too large for u64 element ids")
        } else {
            rng.gen_range(0..order as u64)
        };
        self.element_from_id(id)
    }

    /// Base images of `g`, in base order.
    pub fn base_images(&self, g: &Perm) -> Vec<u8> {
        self.levels.iter().map(|l| g.bytes()[l.base as usize]).collect()
    }
}
