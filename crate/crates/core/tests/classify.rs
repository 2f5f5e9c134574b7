use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weylh1::classify::golden::orbit_name_size;
use weylh1::classify::names::NameRegistry;
use weylh1::classify::record::TypeRecord;
use weylh1::classify::{enumerate_types, Mode, RunOptions, RunOutput};
use weylh1::cohomology::{AdmissibilityMethod, Cohomology};
use weylh1::perm::Perm;
use weylh1::weyl::conjugacy::conjugate_by_enumeration;
use weylh1::weyl::small::{SmallGroup, SMALL_CAP};
use weylh1::weyl::WeylGroup;

fn full(degree: u8, workers: usize) -> RunOutput {
    let mut opts = RunOptions::new(Mode::Full);
    opts.workers = workers;
    enumerate_types(degree, &opts).unwrap()
}

fn full_cached(degree: u8) -> &'static RunOutput {
    static D4: OnceLock<RunOutput> = OnceLock::new();
    static D3: OnceLock<RunOutput> = OnceLock::new();
    match degree {
        4 => D4.get_or_init(|| full(4, 1)),
        3 => D3.get_or_init(|| full(3, 1)),
        _ => unreachable!(),
    }
}

fn weyl(d: u8) -> &'static WeylGroup {
    static W: [OnceLock<WeylGroup>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    W[d as usize - 1].get_or_init(|| WeylGroup::for_degree(d).unwrap())
}

fn group(d: u8, r: &TypeRecord) -> SmallGroup {
    SmallGroup::generate(weyl(d).config().len(), &r.generators, SMALL_CAP).unwrap()
}

#[test]
fn degree_4_class_count_and_minimal_types() {
    let out = full_cached(4);
    assert!(out.complete);
    assert!(out.oversize.is_empty());
    // frozen from the exhaustive run
    assert_eq!(out.records.len(), 53);
    let mut minimal: Vec<(u64, bool)> = out.minimal().map(|r| (r.group_order, r.conic_bundle)).collect();
    minimal.sort();
    assert_eq!(minimal, vec![(6, true), (12, false), (12, false), (24, false)]);
    let s3 = out.minimal().find(|r| r.conic_bundle).unwrap();
    assert_eq!(s3.group_name, "S3");
    assert_eq!(s3.fiber_partition, Some(vec![1, 3]));
}

#[test]
fn degree_3_has_no_minimal_admissible_class() {
    let out = full_cached(3);
    assert!(out.complete);
    assert_eq!(out.records.len(), 86);
    assert_eq!(out.minimal().count(), 0);
}

#[test]
fn records_satisfy_counting_identities() {
    for d in [4, 3] {
        let total = weyl(d).config().len();
        for r in &full_cached(d).records {
            let sum: usize = r.orbits.iter().map(|o| o.size * o.multiplicity).sum();
            assert_eq!(sum, total);
            let g = group(d, r);
            assert_eq!(g.order() as u64, r.group_order);
            for p in 0..total {
                let stab = g.point_stabilizer(p);
                let orbit = g.elements().iter().map(|x| x.apply(p)).collect::<std::collections::BTreeSet<_>>();
                assert_eq!(stab.len() * orbit.len(), g.order());
            }
        }
    }
}

#[test]
fn full_mode_classes_are_admissible_and_pairwise_non_conjugate() {
    let w = weyl(4);
    let coh = Cohomology::new(w);
    let recs = &full_cached(4).records;
    let groups: Vec<SmallGroup> = recs.iter().map(|r| group(4, r)).collect();
    for (i, r) in recs.iter().enumerate() {
        let v = coh.is_admissible(&r.generators, AdmissibilityMethod::DirectAllSubgroups).unwrap();
        assert!(v.admissible, "class {i}");
        for (j, h) in groups.iter().enumerate().skip(i + 1) {
            if h.order() == groups[i].order() {
                assert!(conjugate_by_enumeration(w.group().chain(), &r.generators, h).is_none(), "classes {i} and {j}");
            }
        }
    }
}

#[test]
fn downward_closure_audit() {
    let w = weyl(3);
    let coh = Cohomology::new(w);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for r in &full_cached(3).records {
        let g = group(3, r);
        for _ in 0..4 {
            let k = rng.gen_range(1..=2);
            let gens: Vec<Perm> = (0..k).map(|_| g.elements()[rng.gen_range(0..g.order())].clone()).collect();
            let h = SmallGroup::generate(w.config().len(), &gens, SMALL_CAP).unwrap();
            let method = if h.order() <= 200 { AdmissibilityMethod::DirectAllSubgroups } else { AdmissibilityMethod::SylowReduction };
            assert!(coh.is_admissible_small(&h, method).unwrap().admissible);
        }
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let a = serde_json::to_string(&full(3, 1)).unwrap();
    let b = serde_json::to_string(&full(3, 3)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sampled_degree_1_search_is_flagged_and_sound() {
    let mut opts = RunOptions::new(Mode::Full);
    opts.frontier_cap = Some(20);
    opts.seed = 3;
    let out = enumerate_types(1, &opts).unwrap();
    assert!(out.best_effort);
    assert!(!out.complete);
    let coh = Cohomology::new(weyl(1));
    for r in &out.records {
        let v = coh.is_admissible(&r.generators, AdmissibilityMethod::SylowReduction).unwrap();
        assert!(v.admissible);
    }
}

#[test]
fn orbit_names_encode_orbit_sizes() {
    for d in [4, 3] {
        for r in &full_cached(d).records {
            for o in &r.orbits {
                assert_eq!(orbit_name_size(&o.name), Some(o.size), "{}", o.name);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flags_are_conjugation_invariant(idx in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let d = 4;
        let recs = &full_cached(d).records;
        let r = &recs[idx.index(recs.len())];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = weyl(d).group().chain().random_element(&mut rng);
        let gens: Vec<Perm> = r.generators.iter().map(|g| g.conjugate_by(&t)).collect();
        let g = SmallGroup::generate(weyl(d).config().len(), &gens, SMALL_CAP).unwrap();
        let names = NameRegistry::for_degree(d).unwrap();
        let c = TypeRecord::build(weyl(d), &names, &g).unwrap();
        prop_assert_eq!(c.minimal, r.minimal);
        prop_assert_eq!(c.conic_bundle, r.conic_bundle);
        prop_assert_eq!(&c.orbits, &r.orbits);
        prop_assert_eq!(&c.fiber_partition, &r.fiber_partition);
        prop_assert_eq!(&c.group_name, &r.group_name);
    }
}
