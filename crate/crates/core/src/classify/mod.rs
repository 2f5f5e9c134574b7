//! Classification of admissible Galois actions.

pub mod ambient;
pub mod enumerate;
pub mod names;
pub mod orbits;
pub mod record;
pub mod golden;
pub mod poset;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohomology::Cohomology;
use crate::lattice::ClassKind;
use crate::perm::Perm;
use crate::weyl::WeylGroup;
use crate::{Error, Result};
use ambient::{Ambient, SampledAmbient};
use enumerate::{EnumOptions, EnumStats, Enumeration, Enumerator, Space};
use golden::{family, verify_golden, DiffReport, GoldenFile};
use names::NameRegistry;
use record::TypeRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Full,
    Verify,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub mode: Mode,
    pub budget: Option<Duration>,
    pub frontier_cap: Option<usize>,
    pub seed: u64,
    pub workers: usize,
    /// required in verify mode; in full mode used to label and diff
    pub golden: Option<GoldenFile>,
}

impl RunOptions {
    pub fn new(mode: Mode) -> RunOptions {
        RunOptions {
            mode,
            budget: None,
            frontier_cap: None,
            seed: 0,
            workers: 1,
            golden: None,
        }
    }
}

/// One enumeration pass.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchSummary {
    pub ambient: String,
    pub ambient_order: u64,
    pub order_targets: Option<Vec<usize>>,
    pub classes: usize,
    pub complete: bool,
    pub unexplored: usize,
    pub candidates_scanned: u64,
    pub closures: u64,
    pub conjugacy_tests: u64,
}

impl SearchSummary {
    fn new(ambient: &str, ambient_order: u64, targets: Option<Vec<usize>>, e: &Enumeration) -> SearchSummary {
        let EnumStats {
            candidates_scanned,
            closures,
            conjugacy_tests,
            ..
        } = e.stats;
        SearchSummary {
            ambient: ambient.to_string(),
            ambient_order,
            order_targets: targets,
            classes: e.classes.len(),
            complete: e.complete,
            unexplored: e.unexplored.len(),
            candidates_scanned,
            closures,
            conjugacy_tests,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunOutput {
    pub degree: u8,
    pub mode: Mode,
    pub complete: bool,
    /// candidates were sampled, so completeness is not guaranteed
    pub best_effort: bool,
    pub searches: Vec<SearchSummary>,
    /// generators of good-element subgroups past the order cap
    pub oversize: Vec<Vec<Perm>>,
    pub records: Vec<TypeRecord>,
    pub edges: Option<Vec<(String, String)>>,
    pub diff: Option<DiffReport>,
}

impl RunOutput {
    pub fn minimal(&self) -> impl Iterator<Item = &TypeRecord> {
        self.records.iter().filter(|r| r.minimal)
    }

    /// Number of classes per type id.
    pub fn type_counts(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for r in &self.records {
            if let Some(id) = &r.type_id {
                *m.entry(id.clone()).or_default() += 1;
            }
        }
        m
    }
}

fn build_records(weyl: &WeylGroup, names: &NameRegistry, e: &Enumeration, keep: impl Fn(&enumerate::FoundClass) -> bool + Sync) -> Result<Vec<TypeRecord>> {
    let out: Vec<Option<TypeRecord>> = e
        .classes
        .par_iter()
        .map(|c| if keep(c) { TypeRecord::build(weyl, names, &c.group).map(Some) } else { Ok(None) })
        .collect::<Result<_>>()?;
    Ok(out.into_iter().flatten().collect())
}

fn remaining(budget: Option<Duration>, start: Instant) -> Option<Duration> {
    budget.map(|b| b.saturating_sub(start.elapsed()))
}

/// Edges between labelled records plus their comparison with the
/// reference diagram.
fn poset_and_diff(weyl: &WeylGroup, names: &NameRegistry, records: &[TypeRecord], golden: &GoldenFile, partial: bool) -> Result<(Vec<(String, String)>, DiffReport)> {
    let mut diff = verify_golden(records, golden, partial);
    let edges = poset::specialization_poset(weyl, names, records)?;
    // an edge at a type without a matching class repeats a line already reported
    let labelled = |t: &String| records.iter().any(|r| r.type_id.as_ref() == Some(t));
    for (a, b) in &golden.edges {
        if !labelled(a) || !labelled(b) {
            continue;
        }
        if !edges.iter().any(|(x, y)| x == a && y == b) {
            diff.lines.push(format!("edge {a} -> {b}: not found"));
        }
    }
    for (a, b) in &edges {
        let listed = golden.edges.iter().any(|(x, y)| x == a && y == b);
        if !listed && family(a) == family(b) {
            diff.lines.push(format!("edge {a} -> {b}: not in reference"));
        }
    }
    Ok((edges, diff))
}

/// Classifies admissible subgroups of the Weyl group of the given degree.
///
/// Full mode enumerates every admissible class; in degree 1 candidates are
/// sampled and the result is flagged best effort. Verify mode searches,
/// family by family, only the orders occurring in the reference records
/// and diffs the minimal classes found against them.
pub fn enumerate_types(degree: u8, opts: &RunOptions) -> Result<RunOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::Invalid(e.to_string()))?;
    pool.install(|| match opts.mode {
        Mode::Full => run_full(degree, opts),
        Mode::Verify => run_verify(degree, opts),
    })
}

fn enum_options(opts: &RunOptions, budget: Option<Duration>) -> EnumOptions {
    EnumOptions {
        budget,
        frontier_cap: opts.frontier_cap,
        workers: opts.workers,
        seed: opts.seed,
        ..EnumOptions::default()
    }
}

fn run_full(degree: u8, opts: &RunOptions) -> Result<RunOutput> {
    let weyl = WeylGroup::for_degree(degree)?;
    let names = NameRegistry::for_degree(degree)?;
    let coh = Cohomology::new(&weyl);
    let eopts = enum_options(opts, opts.budget);
    let best_effort = degree == 1;
    let (e, summary) = if best_effort {
        let s = SampledAmbient::new(&coh, opts.seed, 2000, 3)?;
        log::info!("sampled {} good element keys", s.good_reps().len());
        let e = Enumerator::new(&coh, Space::Sampled(&s), eopts).run()?;
        let summary = SearchSummary::new("W (sampled)", weyl.order(), None, &e);
        (e, summary)
    } else {
        let amb = Ambient::weyl(&coh)?;
        let e = Enumerator::new(&coh, Space::Table(&amb), eopts).run()?;
        let summary = SearchSummary::new(&amb.label, amb.order(), None, &e);
        (e, summary)
    };
    log::info!("{} classes, complete {}", e.classes.len(), e.complete);
    let mut records = build_records(&weyl, &names, &e, |_| true)?;
    let (edges, diff) = match &opts.golden {
        Some(g) => {
            g.assign_type_ids(&mut records);
            let (edges, diff) = poset_and_diff(&weyl, &names, &records, g, !e.complete)?;
            (Some(edges), Some(diff))
        }
        None => (None, None),
    };
    Ok(RunOutput {
        degree,
        mode: Mode::Full,
        complete: e.complete,
        best_effort,
        searches: vec![summary],
        oversize: e.oversize,
        records,
        edges,
        diff,
    })
}

fn run_verify(degree: u8, opts: &RunOptions) -> Result<RunOutput> {
    let golden = opts.golden.as_ref().ok_or_else(|| Error::Invalid("verify mode needs reference records".into()))?;
    if golden.degree != degree {
        return Err(Error::Invalid(format!("reference records are for degree {}, not {degree}", golden.degree)));
    }
    let start = Instant::now();
    let weyl = WeylGroup::for_degree(degree)?;
    let names = NameRegistry::for_degree(degree)?;
    let coh = Cohomology::new(&weyl);
    let mut families: BTreeMap<&str, Vec<&golden::GoldenRecord>> = BTreeMap::new();
    for r in &golden.records {
        families.entry(family(&r.type_id)).or_default().push(r);
    }
    let mut records = Vec::new();
    let mut searches = Vec::new();
    let mut complete = true;
    for (fam, members) in families {
        let conic = members[0].conic_bundle;
        if members.iter().any(|m| m.conic_bundle != conic) {
            return Err(Error::Invalid(format!("family {fam} mixes conic bundle and other types")));
        }
        let amb = if conic {
            let c = weyl.lattice().enumerate_classes(ClassKind::Conic).swap_remove(0);
            Ambient::conic_stabilizer(&coh, &c)?
        } else if degree == 1 {
            return Err(Error::Invalid(format!("family {fam}: W(E8) is too large to search without a conic")));
        } else {
            Ambient::weyl(&coh)?
        };
        let mut targets: Vec<usize> = members.iter().map(|m| m.group_order as usize).collect();
        targets.sort_unstable();
        targets.dedup();
        log::info!("family {fam}: ambient {} of order {}, orders {targets:?}", amb.label, amb.order());
        let mut eopts = enum_options(opts, remaining(opts.budget, start));
        eopts.order_targets = Some(targets.clone());
        let e = Enumerator::new(&coh, Space::Table(&amb), eopts).run()?;
        complete &= e.complete;
        searches.push(SearchSummary::new(&amb.label, amb.order(), Some(targets.clone()), &e));
        let cfg = weyl.config();
        let found = build_records(&weyl, &names, &e, |c| targets.contains(&c.group.order()) && orbits::is_minimal(&c.gens, cfg))?;
        records.extend(found.into_iter().filter(|r| r.conic_bundle == conic));
    }
    golden.assign_type_ids(&mut records);
    let (edges, diff) = poset_and_diff(&weyl, &names, &records, golden, !complete)?;
    Ok(RunOutput {
        degree,
        mode: Mode::Verify,
        complete,
        best_effort: false,
        searches,
        oversize: Vec::new(),
        records,
        edges: Some(edges),
        diff: Some(diff),
    })
}
