//! The group inside which subgroups are enumerated: the full Weyl group, the
//! stabilizer of a conic class, or a normalizer. Every element is tabulated
//! with its conjugacy class and whether all its cyclic subgroups have
//! trivial H¹.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cohomology::Cohomology;
use crate::lattice::{ClassKind, PicClass};
use crate::perm::Perm;
use crate::weyl::chain::StabChain;
use crate::weyl::classes::{for_each_element, ClassTable, ElementKey};
use crate::weyl::small::is_prime_power;
use crate::Result;

pub struct Ambient {
    pub label: String,
    gens: Vec<Perm>,
    chain: StabChain,
    table: ClassTable,
    good: Vec<bool>,
    candidates: Vec<u32>,
    colors: Option<Vec<u8>>,
}

impl Ambient {
    /// `colors` optionally restricts conjugacy searches to permutations
    /// preserving a point coloring that the ambient group preserves.
    pub fn new(coh: &Cohomology, label: &str, gens: Vec<Perm>, colors: Option<Vec<u8>>) -> Result<Ambient> {
        let n = coh.weyl().config().len();
        for g in &gens {
            coh.weyl().check_member(g)?;
        }
        let chain = StabChain::new(n, &gens);
        let table = ClassTable::build(&chain, &gens);
        let mut good = Vec::with_capacity(table.classes().len());
        for c in table.classes() {
            good.push(coh.element_is_good(&chain.element_from_id(c.rep))?);
        }
        let mut candidates = Vec::new();
        for id in 0..table.len() as u64 {
            let c = table.class_of(id) as usize;
            let ord = table.classes()[c].order as u64;
            if good[c] && ord > 1 && is_prime_power(ord) {
                candidates.push(id as u32);
            }
        }
        Ok(Ambient {
            label: label.to_string(),
            gens,
            chain,
            table,
            good,
            candidates,
            colors,
        })
    }

    pub fn weyl(coh: &Cohomology) -> Result<Ambient> {
        let gens = coh.weyl().group().generators().to_vec();
        Ambient::new(coh, "W", gens, None)
    }

    /// Stabilizer of a conic class: generated by the reflections in roots
    /// orthogonal to it. Points are colored by their intersection with it.
    pub fn conic_stabilizer(coh: &Cohomology, conic: &PicClass) -> Result<Ambient> {
        let w = coh.weyl();
        let lat = w.lattice();
        let cfg = w.config();
        let mut gens = Vec::new();
        for r in lat.enumerate_classes(ClassKind::Root) {
            if lat.intersect(&r, conic)? != 0 {
                continue;
            }
            let imgs: Vec<usize> = cfg
                .classes()
                .iter()
                .map(|e| cfg.index_of(&lat.reflect(e, &r)).expect("reflection permutes exceptional classes"))
                .collect();
            gens.push(Perm::from_images(&imgs)?);
        }
        // a generating set of reflections: keep those that grow the group
        let mut kept: Vec<Perm> = Vec::new();
        let mut chain = StabChain::new(cfg.len(), &kept);
        for g in gens {
            if !chain.contains(&g) {
                kept.push(g);
                chain = StabChain::new(cfg.len(), &kept);
            }
        }
        let colors = cfg
            .classes()
            .iter()
            .map(|e| lat.intersect(e, conic).map(|v| v as u8))
            .collect::<Result<Vec<u8>>>()?;
        Ambient::new(coh, "Stab(C)", kept, Some(colors))
    }

    /// Normalizer in `within` of the cyclic group generated by `x`, found by
    /// scanning every element.
    pub fn cyclic_normalizer(coh: &Cohomology, within: &Ambient, x: &Perm) -> Result<Ambient> {
        let chain = &within.chain;
        let powers: HashSet<u64> = (1..x.order())
            .map(|k| chain.element_id(&x.pow(k)).expect("x is a member"))
            .collect();
        let n = chain.degree();
        let mut gens: Vec<Perm> = Vec::new();
        let mut sub = StabChain::new(n, &gens);
        for_each_element(chain, |_, w| {
            let c = x.conjugate_by(w);
            if powers.contains(&chain.element_id(&c).unwrap()) && !sub.contains(w) {
                gens.push(w.clone());
                sub = StabChain::new(n, &gens);
            }
        });
        Ambient::new(coh, &format!("N(<x>), |x| = {}", x.order()), gens, within.colors.clone())
    }

    pub fn order(&self) -> u64 {
        self.table.len() as u64
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn chain(&self) -> &StabChain {
        &self.chain
    }

    pub fn table(&self) -> &ClassTable {
        &self.table
    }

    pub fn colors(&self) -> Option<&[u8]> {
        self.colors.as_deref()
    }

    /// Element ids of good elements of prime-power order.
    pub fn candidates(&self) -> &[u32] {
        &self.candidates
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.chain.contains(g)
    }

    pub fn id(&self, g: &Perm) -> u64 {
        self.chain.element_id(g).expect("element of the ambient group")
    }

    pub fn element(&self, id: u64) -> Perm {
        self.chain.element_from_id(id)
    }

    pub fn class_of_id(&self, id: u64) -> u32 {
        self.table.class_of(id)
    }

    pub fn class_of(&self, g: &Perm) -> u32 {
        self.table.class_of(self.id(g))
    }

    pub fn is_good_class(&self, c: u32) -> bool {
        self.good[c as usize]
    }

    /// Id of `g ∘ x` where `x` is given by id.
    #[inline]
    pub fn product_id(&self, g: &Perm, x: u64, scratch: &mut [u8]) -> u64 {
        let xb = self.table.base_images(x);
        let gb = g.bytes();
        for (s, &b) in scratch.iter_mut().zip(xb) {
            *s = gb[b as usize];
        }
        self.chain.id_from_base_images(scratch).expect("product of members")
    }

    pub fn base_len(&self) -> usize {
        self.chain.base().len()
    }
}

/// A Weyl group too large to tabulate. Elements are classified by
/// [`ElementKey`]; goodness is computed once per key and is used for
/// pruning only, so results built on it are checked with the full
/// admissibility test.
pub struct SampledAmbient<'c, 'w> {
    coh: &'c Cohomology<'w>,
    keys: Mutex<HashMap<ElementKey, (u64, bool)>>,
    reps: Vec<Perm>,
}

impl<'c, 'w> SampledAmbient<'c, 'w> {
    /// Samples random elements and their powers in rounds of `round_size`
    /// until `stable_rounds` rounds in a row add no new key; keeps one good
    /// representative of prime-power order per key.
    pub fn new(coh: &'c Cohomology<'w>, seed: u64, round_size: usize, stable_rounds: u32) -> Result<Self> {
        let w = coh.weyl();
        let chain = w.group().chain();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen: BTreeMap<ElementKey, Perm> = BTreeMap::new();
        let mut quiet = 0;
        while quiet < stable_rounds {
            let before = seen.len();
            for _ in 0..round_size {
                let g = chain.random_element(&mut rng);
                let ord = g.order();
                for k in (1..=ord).filter(|k| ord % k == 0) {
                    let h = g.pow(k);
                    seen.entry(ElementKey::of(w, &h)).or_insert(h);
                }
            }
            quiet = if seen.len() == before { quiet + 1 } else { 0 };
        }
        let amb = SampledAmbient {
            coh,
            keys: Mutex::new(HashMap::new()),
            reps: Vec::new(),
        };
        let mut reps = Vec::new();
        for (k, g) in seen {
            if k.order > 1 && is_prime_power(k.order as u64) && amb.classify(&g)?.1 {
                reps.push(g);
            }
        }
        Ok(SampledAmbient { reps, ..amb })
    }

    /// Good representatives of prime-power order, one per key.
    pub fn good_reps(&self) -> &[Perm] {
        &self.reps
    }

    pub fn cohomology(&self) -> &Cohomology<'w> {
        self.coh
    }

    pub fn chain(&self) -> &StabChain {
        self.coh.weyl().group().chain()
    }

    /// Stable hash of the key of `g`, and goodness.
    pub fn classify(&self, g: &Perm) -> Result<(u64, bool)> {
        let key = ElementKey::of(self.coh.weyl(), g);
        if let Some(&v) = self.keys.lock().unwrap().get(&key) {
            return Ok(v);
        }
        let good = self.coh.element_is_good(g)?;
        let mut h = DefaultHasher::new();
        key.hash(&mut h);
        let v = (h.finish(), good);
        self.keys.lock().unwrap().insert(key, v);
        Ok(v)
    }

    pub fn id(&self, g: &Perm) -> u64 {
        self.chain().element_id(g).expect("element of the Weyl group")
    }

    pub fn keys_seen(&self) -> usize {
        self.keys.lock().unwrap().len()
    }
}
