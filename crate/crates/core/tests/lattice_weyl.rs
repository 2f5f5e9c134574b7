use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weylh1::lattice::{ClassKind, DelPezzoLattice};
use weylh1::weyl::small::SmallGroup;
use weylh1::weyl::WeylGroup;

// (degree, exceptional, roots, conics); root counts are those of D5, E6, E7, E8
const COUNTS: [(u8, usize, usize, usize); 4] = [(4, 16, 40, 10), (3, 27, 72, 27), (2, 56, 126, 126), (1, 240, 240, 2160)];

#[test]
fn class_counts_by_degree() {
    for (d, e, r, c) in COUNTS {
        let lat = DelPezzoLattice::new(d).unwrap();
        assert_eq!(lat.enumerate_classes(ClassKind::Exceptional).len(), e, "degree {d}");
        assert_eq!(lat.enumerate_classes(ClassKind::Root).len(), r, "degree {d}");
        assert_eq!(lat.enumerate_classes(ClassKind::Conic).len(), c, "degree {d}");
    }
}

#[test]
fn orbit_closure_equals_bruteforce() {
    for (d, ..) in COUNTS {
        let lat = DelPezzoLattice::new(d).unwrap();
        for kind in [ClassKind::Exceptional, ClassKind::Root] {
            assert_eq!(lat.enumerate_classes(kind), lat.enumerate_classes_bruteforce(kind), "degree {d} {kind:?}");
        }
    }
}

#[test]
fn weyl_orders() {
    let expect = [(4, 1920u64), (3, 51840), (2, 2903040), (1, 696729600)];
    for (d, n) in expect {
        assert_eq!(WeylGroup::for_degree(d).unwrap().order(), n, "degree {d}");
    }
}

#[test]
fn conic_pairs_in_degree_2_are_complementary() {
    // -2K - C is again a conic class
    let lat = DelPezzoLattice::new(2).unwrap();
    let conics = lat.enumerate_classes(ClassKind::Conic);
    let k2 = lat.canonical().scale(-2);
    for c in &conics {
        assert!(conics.contains(&k2.sub(c)));
    }
}

fn weyl(d: u8) -> &'static WeylGroup {
    use std::sync::OnceLock;
    static W: [OnceLock<WeylGroup>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    W[d as usize - 1].get_or_init(|| WeylGroup::for_degree(d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_elements_preserve_form_and_canonical(d in 1u8..=4, seed in any::<u64>()) {
        let w = weyl(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = w.group().chain().random_element(&mut rng);
        prop_assert!(w.preserves_intersections(&g));
        let k = w.lattice().canonical();
        prop_assert_eq!(w.act(&g, &k), k);
        // the lattice action respects the form on every exceptional class pair
        let cfg = w.config();
        for a in (0..cfg.len()).step_by(7) {
            for b in (0..cfg.len()).step_by(11) {
                let ga = w.act(&g, cfg.class(a));
                let gb = w.act(&g, cfg.class(b));
                prop_assert_eq!(w.lattice().intersect(&ga, &gb).unwrap(), cfg.inter(a, b) as i64);
            }
        }
    }

    #[test]
    fn lagrange_divisibility(d in 1u8..=4, seed in any::<u64>()) {
        let w = weyl(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = w.group().chain().random_element(&mut rng);
        let y = w.group().chain().random_element(&mut rng);
        let h = w.group().closure(&[x.clone(), y.pow(2)]).unwrap();
        prop_assert_eq!(w.order() % h.order(), 0);
        prop_assert_eq!(h.order() % x.order(), 0);
        let c = SmallGroup::generate(w.config().len(), &[x.clone()], 1000).unwrap();
        prop_assert_eq!(c.order() as u64, x.order());
    }
}
