//! One line per acceptance criterion; exits nonzero if any fails.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weylh1::classify::golden::{family, GoldenFile};
use weylh1::classify::names::NameRegistry;
use weylh1::classify::orbits::{orbits, signature};
use weylh1::classify::record::TypeRecord;
use weylh1::classify::{enumerate_types, Mode, RunOptions, RunOutput};
use weylh1::cohomology::{h1, h1_bruteforce_oracle, AdmissibilityMethod, Cohomology, MatrixAction};
use weylh1::lattice::{exceptional_count, ClassKind, DelPezzoLattice};
use weylh1::perm::Perm;
use weylh1::weyl::small::{SmallGroup, SMALL_CAP};
use weylh1::weyl::WeylGroup;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn weyl(d: u8) -> &'static WeylGroup {
    static W: [OnceLock<WeylGroup>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    W[d as usize - 1].get_or_init(|| WeylGroup::for_degree(d).unwrap())
}

fn golden(d: u8) -> GoldenFile {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(format!("d{d}.json"));
    GoldenFile::load(&p).unwrap()
}

fn run(d: u8, mode: Mode, with_golden: bool) -> RunOutput {
    let mut opts = RunOptions::new(mode);
    if with_golden {
        opts.golden = Some(golden(d));
    }
    enumerate_types(d, &opts).unwrap()
}

fn verify(d: u8) -> &'static RunOutput {
    static V2: OnceLock<RunOutput> = OnceLock::new();
    static V1: OnceLock<RunOutput> = OnceLock::new();
    let cell = if d == 2 { &V2 } else { &V1 };
    cell.get_or_init(|| run(d, Mode::Verify, true))
}

fn full_2() -> &'static RunOutput {
    static F: OnceLock<RunOutput> = OnceLock::new();
    F.get_or_init(|| run(2, Mode::Full, true))
}

fn group(d: u8, gens: &[Perm]) -> SmallGroup {
    SmallGroup::generate(weyl(d).config().len(), gens, SMALL_CAP).unwrap()
}

fn diff_empty(out: &RunOutput) -> Result<(), String> {
    match &out.diff {
        Some(d) if d.is_empty() && d.unreached.is_empty() => Ok(()),
        Some(d) => Err(format!("diff: {:?} unreached: {:?}", d.lines, d.unreached)),
        None => Err("no diff produced".into()),
    }
}

fn lattice_counts() -> Outcome {
    for d in [4u8, 3, 2, 1] {
        let lat = DelPezzoLattice::new(d).unwrap();
        let exc = lat.enumerate_classes(ClassKind::Exceptional);
        ensure!(Some(exc.len()) == exceptional_count(d), "degree {d}: {} exceptional classes", exc.len());
        for kind in [ClassKind::Exceptional, ClassKind::Root] {
            ensure!(lat.enumerate_classes(kind) == lat.enumerate_classes_bruteforce(kind), "degree {d} {kind:?}: closure and brute force differ");
        }
    }
    Ok("16/27/56/240 exceptional classes, closure equals brute force".into())
}

fn weyl_orders() -> Outcome {
    let got: Vec<u64> = [4u8, 3, 2, 1].iter().map(|&d| weyl(d).order()).collect();
    ensure!(got == [1920, 51840, 2903040, 696729600], "orders {got:?}");
    Ok(format!("orders {got:?}"))
}

fn smallest_prime(n: u64) -> u64 {
    (2..=n).find(|p| n % p == 0).unwrap_or(1)
}

fn h1_oracle() -> Outcome {
    let neg = h1(&MatrixAction::new(1, vec![vec![-1]])).unwrap();
    ensure!(neg.invariants == [2], "negation on Z gives {neg}");
    let swap = h1(&MatrixAction::new(2, vec![vec![0, 1, 1, 0]])).unwrap();
    ensure!(swap.is_trivial(), "swap on Z^2 gives {swap}");

    let w = weyl(3);
    let chain = w.group().chain();
    let mut checked = 0;
    let mut nontrivial = 0;
    let mut seed = 0u64;
    while checked < 200 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        seed += 1;
        let k = rng.gen_range(1..=2);
        let gens: Vec<Perm> = (0..k)
            .map(|_| {
                let x = chain.random_element(&mut rng);
                x.pow(x.order() / smallest_prime(x.order()))
            })
            .collect();
        let Ok(g) = SmallGroup::generate(w.config().len(), &gens, 64) else { continue };
        let a = MatrixAction::from_weyl(w, &g.generator_perms());
        let fast = h1(&a).unwrap();
        ensure!(fast == h1_bruteforce_oracle(&a).unwrap(), "subgroup from seed {} disagrees", seed - 1);
        nontrivial += usize::from(!fast.is_trivial());
        checked += 1;
    }
    Ok(format!("hand cases ok, {checked} subgroups of W(E6) agree ({nontrivial} with H1 != 0)"))
}

fn degree_3() -> Outcome {
    let out = run(3, Mode::Full, false);
    ensure!(out.complete, "enumeration incomplete");
    let m = out.minimal().count();
    ensure!(m == 0, "{m} minimal classes");
    Ok(format!("{} admissible classes, none minimal", out.records.len()))
}

fn degree_2_full() -> Outcome {
    let out = full_2();
    ensure!(out.complete, "enumeration incomplete");
    diff_empty(out)?;
    let other: Vec<&TypeRecord> = out.minimal().filter(|r| !r.conic_bundle).collect();
    let mut orders: Vec<u64> = other.iter().map(|r| r.group_order).collect();
    orders.sort();
    ensure!(orders == [14, 30, 42, 60], "non-conic minimal orders {orders:?}");
    let stab = |id: &str| -> BTreeSet<String> {
        let r = other.iter().find(|r| r.type_id.as_deref() == Some(id)).unwrap();
        r.orbits.iter().filter_map(|o| o.stabilizer.clone()).collect()
    };
    ensure!(stab("dP2(3)") == ["1", "C3", "C5"].map(String::from).into(), "dP2(3) stabilizers {:?}", stab("dP2(3)"));
    ensure!(stab("dP2(4)") == ["C2", "C6", "D5"].map(String::from).into(), "dP2(4) stabilizers {:?}", stab("dP2(4)"));
    let conic: Vec<&TypeRecord> = out.minimal().filter(|r| r.conic_bundle).collect();
    let types: BTreeSet<&str> = conic.iter().filter_map(|r| r.type_id.as_deref()).collect();
    let expect: BTreeSet<String> = (1..=14).map(|i| format!("D6({i})")).collect();
    ensure!(types.len() == 14 && types.iter().all(|t| expect.contains(*t)), "conic types {types:?}");
    ensure!(conic.iter().all(|r| r.type_id.is_some()), "unlabelled conic class");
    Ok(format!("{} classes; dP2(1)-(4) and D6(1)-(14) match field by field ({} conic classes)", out.records.len(), conic.len()))
}

fn identities(d: u8, out: &RunOutput) -> Result<usize, String> {
    let total = weyl(d).config().len();
    let names = NameRegistry::for_degree(d).unwrap();
    let g = golden(d);
    let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
    for r in out.minimal() {
        let id = r.type_id.clone().unwrap_or_default();
        let sum: usize = r.orbits.iter().map(|o| o.size * o.multiplicity).sum();
        ensure!(sum == total, "{id}: orbit sizes sum to {sum}");
        let grp = group(d, &r.generators);
        ensure!(grp.order() as u64 == r.group_order, "{id}: order {}", grp.order());
        for orbit in orbits(&r.generators, weyl(d).config()) {
            let stab = grp.point_stabilizer(orbit[0]).len();
            ensure!(stab * orbit.len() == grp.order(), "{id}: {stab} * {} != {}", orbit.len(), grp.order());
        }
        // recompute every field from a random conjugate
        let t = weyl(d).group().chain().random_element(&mut rng);
        let conj: Vec<Perm> = r.generators.iter().map(|x| x.conjugate_by(&t)).collect();
        let again = TypeRecord::build(weyl(d), &names, &group(d, &conj)).unwrap();
        let gr = g.record(&id).ok_or(format!("{id}: not in reference"))?;
        ensure!(gr.matches(&again), "{id}: recomputation differs: {:?}", gr.diff(&again));
    }
    Ok(out.minimal().count())
}

fn verify_modes() -> Outcome {
    let mut parts = Vec::new();
    for d in [2u8, 1] {
        let out = verify(d);
        diff_empty(out)?;
        let n = identities(d, out)?;
        parts.push(format!("degree {d}: {n} records"));
    }
    Ok(parts.join(", "))
}

fn degree_1_conics() -> Outcome {
    let out = verify(1);
    let mut seen = BTreeSet::new();
    for r in out.minimal() {
        let id = r.type_id.as_deref().unwrap_or("?");
        ensure!(r.conic_bundle && r.invariant_conics > 0, "{id}: no invariant conic");
        seen.insert(r.fiber_partition.clone().ok_or(format!("{id}: no fiber partition"))?);
    }
    let expect: BTreeSet<Vec<usize>> = [vec![1, 3, 3], vec![1, 1, 5], vec![2, 5], vec![1, 6]].into();
    ensure!(seen == expect, "fiber partitions {seen:?}");
    Ok(format!("{} records, partitions 1+3+3, 1+1+5, 2+5, 1+6", out.minimal().count()))
}

fn within_family(edges: &[(String, String)]) -> BTreeSet<(String, String)> {
    edges.iter().filter(|(a, b)| family(a) == family(b)).cloned().collect()
}

fn posets() -> Outcome {
    let mut parts = Vec::new();
    for (d, out) in [(2u8, verify(2)), (2, full_2()), (1, verify(1))] {
        let got = within_family(out.edges.as_deref().ok_or("no edges")?);
        let expect: BTreeSet<(String, String)> = golden(d).edges.into_iter().collect();
        ensure!(got == expect, "degree {d} {:?}: {got:?}", out.mode);
        parts.push(format!("degree {d} {:?}: {} edges", out.mode, got.len()));
    }
    Ok(parts.join(", "))
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for d in [4u8, 3, 2, 1] {
        let w = weyl(d);
        let cfg = w.config();
        let k = w.lattice().canonical();
        for _ in 0..20 {
            let g = w.group().chain().random_element(&mut rng);
            ensure!(w.preserves_intersections(&g), "degree {d}: form not preserved");
            ensure!(w.act(&g, &k) == k, "degree {d}: K moved");
            ensure!(w.order() % g.order() == 0, "degree {d}: element order {} does not divide", g.order());
            for a in 0..cfg.len() {
                let b = rng.gen_range(0..cfg.len());
                let i = w.lattice().intersect(&w.act(&g, cfg.class(a)), &w.act(&g, cfg.class(b))).unwrap();
                ensure!(i == cfg.inter(a, b) as i64, "degree {d}: intersection changed");
            }
        }
    }

    let d3 = run(3, Mode::Full, false);
    let w = weyl(3);
    let coh = Cohomology::new(w);
    for r in &d3.records {
        let g = group(3, &r.generators);
        ensure!(w.order() % g.order() as u64 == 0, "subgroup order {} does not divide", g.order());
        for orbit in orbits(&r.generators, w.config()) {
            signature(&orbit, w.config()).map_err(|e| format!("signature not constant: {e}"))?;
        }
        for _ in 0..3 {
            let gens: Vec<Perm> = (0..rng.gen_range(1..=2)).map(|_| g.elements()[rng.gen_range(0..g.order())].clone()).collect();
            let h = group(3, &gens);
            let method = if h.order() <= 200 { AdmissibilityMethod::DirectAllSubgroups } else { AdmissibilityMethod::SylowReduction };
            ensure!(coh.is_admissible_small(&h, method).unwrap().admissible, "inadmissible subgroup of an admissible class");
        }
    }
    for out in [verify(2), verify(1)] {
        for r in out.minimal() {
            for orbit in orbits(&r.generators, weyl(out.degree).config()) {
                signature(&orbit, weyl(out.degree).config()).map_err(|e| format!("signature not constant: {e}"))?;
            }
        }
    }

    let mut opts = RunOptions::new(Mode::Full);
    opts.workers = 3;
    let again = enumerate_types(3, &opts).unwrap();
    ensure!(serde_json::to_string(&d3).unwrap() == serde_json::to_string(&again).unwrap(), "output depends on worker count");
    Ok("form, K, Lagrange, downward closure, signatures, worker determinism".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("lattice counts", lattice_counts),
        ("Weyl orders", weyl_orders),
        ("H1 oracle equivalence", h1_oracle),
        ("degree 3 has no minimal class", degree_3),
        ("degree 2 full enumeration", degree_2_full),
        ("verify mode, degrees 2 and 1", verify_modes),
        ("degree 1 conic bundles", degree_1_conics),
        ("specialization posets", posets),
        ("property suite", properties),
    ];
    let mut failed = HashSet::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("criterion {}: PASS {name}: {msg} ({secs:.1}s)", i + 1),
            Err(msg) => {
                println!("criterion {}: FAIL {name}: {msg} ({secs:.1}s)", i + 1);
                failed.insert(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
