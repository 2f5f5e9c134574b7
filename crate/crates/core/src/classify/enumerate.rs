//! Bottom-up enumeration of admissible subgroup classes: start from the
//! trivial group and repeatedly adjoin one good element of prime-power order.
//! A subgroup is kept only if it is admissible; classes are merged under
//! conjugacy in the ambient group.
//!
//! Every admissible group is reached: it is generated by its prime-power
//! elements, and each intermediate group is admissible because the family
//! is closed under taking subgroups.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classify::ambient::{Ambient, SampledAmbient};
use crate::cohomology::{AdmissibilityMethod, Cohomology};
use crate::perm::Perm;
use crate::weyl::chain::StabChain;
use crate::weyl::classes::for_each_element;
use crate::weyl::conjugacy::PointSearch;
use crate::weyl::small::{point_orbits, SmallGroup, SMALL_CAP};
use crate::{Error, Result};

/// Conjugation-invariant data used to bucket subgroups before conjugacy
/// tests.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgroupFingerprint {
    pub order: usize,
    /// (ambient class, number of elements in it)
    pub classes: Vec<(u64, u32)>,
    pub orbit_sizes: Vec<usize>,
}

/// One admissible conjugacy class, given by a representative.
#[derive(Clone, Debug)]
pub struct FoundClass {
    pub gens: Vec<Perm>,
    pub group: SmallGroup,
    /// sorted ambient element ids
    pub ids: Vec<u64>,
    pub fingerprint: SubgroupFingerprint,
    /// class this one was first reached from
    pub parent: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct EnumOptions {
    pub budget: Option<Duration>,
    /// stop once this many classes wait to be extended
    pub frontier_cap: Option<usize>,
    pub cap: usize,
    /// keep only subgroups whose order divides one of these
    pub order_targets: Option<Vec<usize>>,
    /// compute the ambient normalizer of a class once it has this many
    /// surviving candidates
    pub normalizer_threshold: usize,
    pub workers: usize,
    pub seed: u64,
    /// random candidates drawn per class when the ambient is sampled
    pub samples_per_class: usize,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            budget: None,
            frontier_cap: None,
            cap: SMALL_CAP,
            order_targets: None,
            normalizer_threshold: 4000,
            workers: 1,
            seed: 0,
            samples_per_class: 2000,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct EnumStats {
    pub candidates_scanned: u64,
    pub closures: u64,
    pub admissibility_checks: u64,
    pub conjugacy_tests: u64,
    pub normalizers: u64,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub classes: Vec<FoundClass>,
    pub complete: bool,
    /// classes whose extensions were not explored
    pub unexplored: Vec<usize>,
    /// generators of good-element subgroups that exceeded the order cap
    pub oversize: Vec<Vec<Perm>>,
    pub stats: EnumStats,
    pub elapsed: Duration,
}

/// Where candidates and element classes come from.
#[derive(Clone, Copy)]
pub enum Space<'a, 'c, 'w> {
    Table(&'a Ambient),
    Sampled(&'a SampledAmbient<'c, 'w>),
}

impl Space<'_, '_, '_> {
    fn id(&self, g: &Perm) -> u64 {
        match self {
            Space::Table(a) => a.id(g),
            Space::Sampled(s) => s.id(g),
        }
    }

    /// Class label and goodness.
    fn class_good(&self, g: &Perm) -> Result<(u64, bool)> {
        match self {
            Space::Table(a) => {
                let c = a.class_of(g);
                Ok((c as u64, a.is_good_class(c)))
            }
            Space::Sampled(s) => s.classify(g),
        }
    }

    fn contains(&self, g: &Perm) -> bool {
        match self {
            Space::Table(a) => a.contains(g),
            Space::Sampled(s) => s.chain().contains(g),
        }
    }

    fn colors(&self) -> Option<&[u8]> {
        match self {
            Space::Table(a) => a.colors(),
            Space::Sampled(_) => None,
        }
    }
}

enum Closure {
    Ok(Vec<u64>),
    Bad,
    Oversize,
}

type Extension = (Vec<Perm>, Vec<u64>);

pub struct Enumerator<'a, 'c, 'w> {
    coh: &'c Cohomology<'w>,
    space: Space<'a, 'c, 'w>,
    opts: EnumOptions,
    max_order: usize,
}

impl<'a, 'c, 'w> Enumerator<'a, 'c, 'w> {
    pub fn new(coh: &'c Cohomology<'w>, space: Space<'a, 'c, 'w>, opts: EnumOptions) -> Self {
        let max_order = match &opts.order_targets {
            Some(t) => t.iter().copied().max().unwrap_or(1).min(opts.cap),
            None => opts.cap,
        };
        Enumerator {
            coh,
            space,
            opts,
            max_order,
        }
    }

    fn order_allowed(&self, n: usize) -> bool {
        match &self.opts.order_targets {
            Some(t) => t.iter().any(|&m| m % n == 0),
            None => true,
        }
    }

    pub fn fingerprint(&self, group: &SmallGroup) -> Result<SubgroupFingerprint> {
        let mut counts: BTreeMap<u64, u32> = BTreeMap::new();
        for g in group.elements() {
            *counts.entry(self.space.class_good(g)?.0).or_default() += 1;
        }
        let n = self.coh.weyl().config().len();
        let mut orbit_sizes: Vec<usize> = point_orbits(n, &group.generator_perms()).iter().map(|o| o.len()).collect();
        orbit_sizes.sort_unstable();
        Ok(SubgroupFingerprint {
            order: group.order(),
            classes: counts.into_iter().collect(),
            orbit_sizes,
        })
    }

    /// Closure of the closed set `base` under `gens`, aborting on a bad
    /// element or past the size limit.
    fn close(&self, base: &[Perm], base_ids: &HashSet<u64>, gens: &[Perm]) -> Result<Closure> {
        let mut elems: Vec<Perm> = base.to_vec();
        let mut seen: HashSet<u64> = base_ids.clone();
        let mut k = 0;
        while k < elems.len() {
            for s in gens {
                let y = elems[k].compose(s);
                let id = self.space.id(&y);
                if seen.contains(&id) {
                    continue;
                }
                if !self.space.class_good(&y)?.1 {
                    return Ok(Closure::Bad);
                }
                if elems.len() >= self.max_order {
                    return Ok(Closure::Oversize);
                }
                seen.insert(id);
                elems.push(y);
            }
            k += 1;
        }
        let mut ids: Vec<u64> = seen.into_iter().collect();
        ids.sort_unstable();
        Ok(Closure::Ok(ids))
    }

    /// Normalizer in the ambient group by scanning every element.
    fn normalizer(amb: &Ambient, gens: &[Perm], ids: &HashSet<u64>) -> Vec<Perm> {
        let chain = amb.chain();
        let n = chain.degree();
        let mut out: Vec<Perm> = Vec::new();
        let mut sub = StabChain::new(n, &out);
        for_each_element(chain, |_, w| {
            if gens.iter().all(|g| ids.contains(&amb.id(&g.conjugate_by(w)))) && !sub.contains(w) {
                out.push(w.clone());
                sub = StabChain::new(n, &out);
            }
        });
        out
    }

    /// Candidates `x` such that `<G, x>` may be admissible, one per orbit
    /// under conjugation by `movers` (which normalize G) and generating
    /// powers.
    fn orbit_reps(&self, survivors: Vec<Perm>, movers: &[Perm]) -> Vec<Perm> {
        let ids: HashSet<u64> = survivors.iter().map(|x| self.space.id(x)).collect();
        let mut done: HashSet<u64> = HashSet::new();
        let mut reps = Vec::new();
        for x in survivors {
            let xid = self.space.id(&x);
            if !done.insert(xid) {
                continue;
            }
            let mut orbit = vec![x.clone()];
            let mut k = 0;
            while k < orbit.len() {
                let y = orbit[k].clone();
                let ord = y.order();
                let mut next: Vec<Perm> = (2..ord).filter(|e| num_integer::gcd(*e, ord) == 1).map(|e| y.pow(e)).collect();
                next.extend(movers.iter().map(|m| y.conjugate_by(m)));
                for z in next {
                    let zid = self.space.id(&z);
                    if ids.contains(&zid) && done.insert(zid) {
                        orbit.push(z);
                    }
                }
                k += 1;
            }
            reps.push(x);
        }
        reps
    }

    fn survivors_table(&self, amb: &Ambient, g: &FoundClass, g_ids: &HashSet<u64>) -> Vec<Perm> {
        let g_elems = g.group.elements();
        let k = amb.base_len();
        let ids: Vec<u32> = amb
            .candidates()
            .par_chunks(8192)
            .flat_map_iter(|chunk| {
                let mut scratch = vec![0u8; k];
                chunk
                    .iter()
                    .copied()
                    .filter(|&x| {
                        !g_ids.contains(&(x as u64))
                            && g_elems
                                .iter()
                                .skip(1)
                                .all(|h| amb.is_good_class(amb.class_of_id(amb.product_id(h, x as u64, &mut scratch))))
                    })
                    .collect::<Vec<u32>>()
            })
            .collect();
        ids.into_iter().map(|x| amb.element(x as u64)).collect()
    }

    /// Random conjugates of the good representatives; the trivial group
    /// takes the representatives themselves.
    fn survivors_sampled(&self, s: &SampledAmbient, g: &FoundClass, g_ids: &HashSet<u64>, index: usize) -> Result<Vec<Perm>> {
        if g.group.order() == 1 {
            return Ok(s.good_reps().to_vec());
        }
        let seed = self.opts.seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reps = s.good_reps();
        let draws: Vec<Perm> = (0..self.opts.samples_per_class)
            .map(|_| {
                let r = &reps[rng.gen_range(0..reps.len())];
                r.conjugate_by(&s.chain().random_element(&mut rng))
            })
            .collect();
        let g_elems = g.group.elements();
        let kept: Vec<Option<Perm>> = draws
            .into_par_iter()
            .map(|x| -> Result<Option<Perm>> {
                if g_ids.contains(&s.id(&x)) {
                    return Ok(None);
                }
                for h in g_elems.iter().skip(1) {
                    if !s.classify(&h.compose(&x))?.1 {
                        return Ok(None);
                    }
                }
                Ok(Some(x))
            })
            .collect::<Result<_>>()?;
        let mut seen = HashSet::new();
        Ok(kept.into_iter().flatten().filter(|x| seen.insert(s.id(x))).collect())
    }

    /// Distinct subgroups `<G, x>` with only good elements, in candidate
    /// order.
    fn extend(&self, g: &FoundClass, index: usize, stats: &mut EnumStats, oversize: &mut Vec<Vec<Perm>>) -> Result<Vec<Extension>> {
        let g_ids: HashSet<u64> = g.ids.iter().copied().collect();
        let (survivors, movers) = match self.space {
            Space::Table(amb) => {
                stats.candidates_scanned += amb.candidates().len() as u64;
                let surv = self.survivors_table(amb, g, &g_ids);
                let movers = if g.group.order() == 1 {
                    amb.generators().to_vec()
                } else if surv.len() >= self.opts.normalizer_threshold {
                    stats.normalizers += 1;
                    Self::normalizer(amb, &g.gens, &g_ids)
                } else {
                    g.gens.clone()
                };
                (surv, movers)
            }
            Space::Sampled(s) => {
                stats.candidates_scanned += self.opts.samples_per_class as u64;
                (self.survivors_sampled(s, g, &g_ids, index)?, g.gens.clone())
            }
        };
        let reps = self.orbit_reps(survivors, &movers);
        stats.closures += reps.len() as u64;
        let g_elems = g.group.elements();
        let closed: Vec<(Vec<Perm>, Closure)> = reps
            .into_par_iter()
            .map(|x| {
                let mut gens = g.gens.clone();
                gens.push(x);
                let c = self.close(g_elems, &g_ids, &gens)?;
                Ok((gens, c))
            })
            .collect::<Result<_>>()?;
        let mut keys: HashSet<Vec<u64>> = HashSet::new();
        let mut out = Vec::new();
        for (gens, c) in closed {
            match c {
                Closure::Bad => {}
                Closure::Oversize => {
                    if self.opts.order_targets.is_none() {
                        oversize.push(gens);
                    }
                }
                Closure::Ok(ids) => {
                    if self.order_allowed(ids.len()) && keys.insert(ids.clone()) {
                        out.push((gens, ids));
                    }
                }
            }
        }
        Ok(out)
    }

    fn admissible(&self, group: &SmallGroup) -> Result<bool> {
        match self.space {
            Space::Table(_) => self.coh.admissible_given_good_elements(group),
            Space::Sampled(_) => Ok(self.coh.is_admissible_small(group, AdmissibilityMethod::SylowReduction)?.admissible),
        }
    }

    pub fn run(&self) -> Result<Enumeration> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.opts.workers.max(1))
            .build()
            .map_err(|e| Error::Invalid(e.to_string()))?;
        pool.install(|| self.run_inner())
    }

    fn run_inner(&self) -> Result<Enumeration> {
        let start = Instant::now();
        let n = self.coh.weyl().config().len();
        let trivial = SmallGroup::generate(n, &[], 1)?;
        let id0 = self.space.id(&Perm::identity(n));
        let fp0 = self.fingerprint(&trivial)?;
        let mut classes = vec![FoundClass {
            gens: vec![],
            group: trivial,
            ids: vec![id0],
            fingerprint: fp0.clone(),
            parent: None,
        }];
        let mut buckets: HashMap<SubgroupFingerprint, Vec<usize>> = HashMap::new();
        buckets.insert(fp0, vec![0]);
        let mut known: HashSet<Vec<u64>> = HashSet::new();
        known.insert(vec![id0]);
        let mut stats = EnumStats::default();
        let mut oversize = Vec::new();
        let search = PointSearch::new(self.coh.weyl().config(), self.space.colors());
        let class_of = |p: &Perm| self.space.class_good(p).map(|c| c.0).unwrap_or(u64::MAX);
        let accept = |p: &Perm| self.space.contains(p);
        let mut i = 0;
        let mut complete = true;
        while i < classes.len() {
            let over_budget = self.opts.budget.is_some_and(|b| start.elapsed() > b);
            let over_cap = self.opts.frontier_cap.is_some_and(|c| classes.len() - i > c);
            if over_budget || over_cap {
                complete = false;
                break;
            }
            let ext = self.extend(&classes[i], i, &mut stats, &mut oversize)?;
            let fresh: Vec<Extension> = ext.into_iter().filter(|(_, ids)| known.insert(ids.clone())).collect();
            stats.admissibility_checks += fresh.len() as u64;
            let evaluated: Vec<Option<(SmallGroup, SubgroupFingerprint)>> = fresh
                .into_par_iter()
                .map(|(gens, _)| {
                    let group = SmallGroup::generate(n, &gens, self.opts.cap)?;
                    if !self.admissible(&group)? {
                        return Ok(None);
                    }
                    let fp = self.fingerprint(&group)?;
                    Ok(Some((group, fp)))
                })
                .collect::<Result<_>>()?;
            for (group, fp) in evaluated.into_iter().flatten() {
                let bucket = buckets.entry(fp.clone()).or_default();
                let mut dup = false;
                for &j in bucket.iter() {
                    stats.conjugacy_tests += 1;
                    if search.conjugate_subgroups(&group, &classes[j].group, &class_of, &accept).is_some() {
                        dup = true;
                        break;
                    }
                }
                if dup {
                    continue;
                }
                bucket.push(classes.len());
                let mut ids: Vec<u64> = group.elements().iter().map(|g| self.space.id(g)).collect();
                ids.sort_unstable();
                classes.push(FoundClass {
                    gens: group.generator_perms(),
                    group,
                    ids,
                    fingerprint: fp,
                    parent: Some(i),
                });
            }
            log::debug!("class {i}/{} done, {:?}", classes.len(), start.elapsed());
            i += 1;
        }
        let unexplored = (i..classes.len()).collect();
        Ok(Enumeration {
            classes,
            complete,
            unexplored,
            oversize,
            stats,
            elapsed: start.elapsed(),
        })
    }
}
