//! Conjugacy classes of elements: exhaustive tables for groups of a few
//! million elements, invariant-partitioned sampling beyond that.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::perm::Perm;
use crate::weyl::chain::StabChain;
use crate::weyl::WeylGroup;

/// Largest group order for which every element is tabulated.
pub const EXHAUSTIVE_LIMIT: u64 = 3_000_000;

#[derive(Clone, Debug)]
pub struct ElementClass {
    /// smallest element id in the class
    pub rep: u64,
    pub size: u64,
    pub order: u32,
    pub cycle_type: Vec<u16>,
}

/// Every element of a group, indexed by its chain id, with its class.
#[derive(Clone, Debug)]
pub struct ClassTable {
    k: usize,
    /// `base_images[id * k..]`: images of the base points
    base_images: Vec<u8>,
    class_of: Vec<u32>,
    classes: Vec<ElementClass>,
}

impl ClassTable {
    /// Builds the table by union-find over conjugation by the generators.
    pub fn build(chain: &StabChain, gens: &[Perm]) -> ClassTable {
        let order = u64::try_from(chain.order()).expect("order fits in u64");
        assert!(order <= EXHAUSTIVE_LIMIT, "group too large to tabulate");
        let n = order as usize;
        let base = chain.base();
        let k = base.len();
        let mut base_images = vec![0u8; n * k];
        let mut parent: Vec<u32> = (0..n as u32).collect();
        let inv_gens: Vec<Perm> = gens.iter().map(|g| g.inverse()).collect();
        let mut scratch = vec![0u8; k];
        for_each_element(chain, |id, g| {
            for (l, &b) in base.iter().enumerate() {
                base_images[id as usize * k + l] = g.bytes()[b] ;
            }
            for (s, si) in gens.iter().zip(&inv_gens) {
                // (s g s⁻¹)(b) = s(g(s⁻¹(b)))
                for (l, &b) in base.iter().enumerate() {
                    scratch[l] = s.bytes()[g.bytes()[si.bytes()[b] as usize] as usize];
                }
                let other = chain.id_from_base_images(&mut scratch).expect("conjugate is a member");
                union(&mut parent, id as u32, other as u32);
            }
        });
        let mut root_class: BTreeMap<u32, u32> = BTreeMap::new();
        let mut class_of = vec![0u32; n];
        let mut classes: Vec<ElementClass> = Vec::new();
        for id in 0..n {
            let r = find(&mut parent, id as u32);
            let c = *root_class.entry(r).or_insert_with(|| {
                let g = chain.element_from_id(id as u64);
                classes.push(ElementClass {
                    rep: id as u64,
                    size: 0,
                    order: g.order() as u32,
                    cycle_type: g.cycle_type(),
                });
                classes.len() as u32 - 1
            });
            class_of[id] = c;
            classes[c as usize].size += 1;
        }
        ClassTable {
            k,
            base_images,
            class_of,
            classes,
        }
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn classes(&self) -> &[ElementClass] {
        &self.classes
    }

    #[inline]
    pub fn class_of(&self, id: u64) -> u32 {
        self.class_of[id as usize]
    }

    #[inline]
    pub fn base_images(&self, id: u64) -> &[u8] {
        &self.base_images[id as usize * self.k..(id as usize + 1) * self.k]
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// Visits every element in id order, reusing prefix products.
pub fn for_each_element(chain: &StabChain, mut f: impl FnMut(u64, &Perm)) {
    let lens = chain.orbit_lengths();
    let k = lens.len();
    let n = chain.degree();
    if k == 0 {
        f(0, &Perm::identity(n));
        return;
    }
    let mut pos = vec![0usize; k];
    // prefix[l] = t_0 ∘ ... ∘ t_{l-1}
    let mut prefix: Vec<Perm> = vec![Perm::identity(n); k + 1];
    for l in 0..k {
        prefix[l + 1] = prefix[l].compose(chain.transversal(l, 0));
    }
    let mut id = 0u64;
    loop {
        f(id, &prefix[k]);
        id += 1;
        // odometer, last level fastest
        let mut l = k;
        loop {
            if l == 0 {
                return;
            }
            l -= 1;
            pos[l] += 1;
            if pos[l] < lens[l] {
                break;
            }
            pos[l] = 0;
        }
        for m in l..k {
            prefix[m + 1] = prefix[m].compose(chain.transversal(m, pos[m]));
        }
    }
}

/// Characteristic polynomial `det(tI - M)` of an integer matrix, as
/// coefficients from the constant term up, by Faddeev-LeVerrier.
pub fn charpoly(m: &[i64], r: usize) -> Vec<i64> {
    let mut coeffs = vec![0i128; r + 1];
    coeffs[r] = 1;
    let mm: Vec<i128> = m.iter().map(|&x| x as i128).collect();
    let mut ak = vec![0i128; r * r];
    for k in 1..=r {
        // A_k = M (A_{k-1} + c_{r-k+1} I)
        let mut tmp = ak.clone();
        for i in 0..r {
            tmp[i * r + i] += coeffs[r - k + 1];
        }
        let mut next = vec![0i128; r * r];
        for i in 0..r {
            for l in 0..r {
                let x = mm[i * r + l];
                if x == 0 {
                    continue;
                }
                for j in 0..r {
                    next[i * r + j] += x * tmp[l * r + j];
                }
            }
        }
        let tr: i128 = (0..r).map(|i| next[i * r + i]).sum();
        assert_eq!(tr % k as i128, 0);
        coeffs[r - k] = -tr / k as i128;
        ak = next;
    }
    coeffs.into_iter().map(|c| c as i64).collect()
}

/// Class invariant used to partition sampled elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementKey {
    pub order: u32,
    pub cycle_type: Vec<u16>,
    pub charpoly: Vec<i64>,
}

impl ElementKey {
    pub fn of(w: &WeylGroup, g: &Perm) -> ElementKey {
        ElementKey {
            order: g.order() as u32,
            cycle_type: g.cycle_type(),
            charpoly: charpoly(&w.lattice_matrix(g), w.rank()),
        }
    }
}

/// Outcome of [`element_class_reps`].
#[derive(Clone, Debug)]
pub struct ClassReps {
    pub reps: Vec<Perm>,
    /// true when the reps come from an exhaustive class table
    pub exhaustive: bool,
    pub samples: u64,
    pub stable_rounds: u32,
    pub seed: u64,
}

/// One representative per element class of `<gens>` whose order passes
/// `filter`. Exhaustive when the group has at most [`EXHAUSTIVE_LIMIT`]
/// elements; otherwise random elements are partitioned by [`ElementKey`]
/// until `stable_rounds` consecutive rounds of `round_size` samples add no
/// new key.
pub fn element_class_reps(
    w: &WeylGroup,
    chain: &StabChain,
    gens: &[Perm],
    filter: impl Fn(u32) -> bool,
    seed: u64,
    round_size: u64,
    stable_rounds: u32,
) -> ClassReps {
    let order = chain.order();
    if order <= EXHAUSTIVE_LIMIT as u128 {
        let table = ClassTable::build(chain, gens);
        let reps = table
            .classes()
            .iter()
            .filter(|c| filter(c.order))
            .map(|c| chain.element_from_id(c.rep))
            .collect();
        return ClassReps {
            reps,
            exhaustive: true,
            samples: order as u64,
            stable_rounds: 0,
            seed,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: BTreeMap<ElementKey, Perm> = BTreeMap::new();
    let mut quiet = 0;
    let mut samples = 0;
    while quiet < stable_rounds {
        let before = seen.len();
        for _ in 0..round_size {
            let g = chain.random_element(&mut rng);
            samples += 1;
            let key = ElementKey::of(w, &g);
            seen.entry(key).or_insert(g);
        }
        if seen.len() == before {
            quiet += 1;
        } else {
            quiet = 0;
        }
    }
    ClassReps {
        reps: seen
            .into_iter()
            .filter(|(k, _)| filter(k.order))
            .map(|(_, g)| g)
            .collect(),
        exhaustive: false,
        samples,
        stable_rounds,
        seed,
    }
}
