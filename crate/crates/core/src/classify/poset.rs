//! Specialization between types: T -> T' when a subgroup of the group of T
//! acts on the exceptional classes as T' does.

use std::collections::{BTreeMap, BTreeSet};

use crate::classify::names::NameRegistry;
use crate::classify::record::TypeRecord;
use crate::weyl::small::{SmallGroup, SMALL_CAP};
use crate::weyl::WeylGroup;
use crate::Result;

/// Same type: every field except generators and type id agrees.
pub fn same_type(a: &TypeRecord, b: &TypeRecord) -> bool {
    a.group_name == b.group_name
        && a.group_order == b.group_order
        && a.orbits == b.orbits
        && a.minimal == b.minimal
        && a.conic_bundle == b.conic_bundle
        && a.fiber_partition == b.fiber_partition
}

/// All specialization edges between the labelled records, by type id.
pub fn specializations(weyl: &WeylGroup, names: &NameRegistry, records: &[TypeRecord]) -> Result<BTreeSet<(String, String)>> {
    let n = weyl.config().len();
    let mut reps: BTreeMap<&str, &TypeRecord> = BTreeMap::new();
    for r in records {
        if let Some(id) = &r.type_id {
            reps.entry(id.as_str()).or_insert(r);
        }
    }
    let mut edges = BTreeSet::new();
    for (&from, r) in &reps {
        let orders: BTreeSet<u64> = reps
            .values()
            .map(|t| t.group_order)
            .filter(|&o| o < r.group_order && r.group_order % o == 0)
            .collect();
        if orders.is_empty() {
            continue;
        }
        let g = SmallGroup::generate(n, &r.generators, SMALL_CAP)?;
        for sub in g.all_subgroups() {
            if !orders.contains(&(sub.len() as u64)) {
                continue;
            }
            let rec = TypeRecord::build(weyl, names, &g.subgroup(&sub))?;
            for (&to, t) in &reps {
                if to != from && same_type(&rec, t) {
                    edges.insert((from.to_string(), to.to_string()));
                }
            }
        }
    }
    Ok(edges)
}

/// Drops every edge implied by a longer path.
pub fn transitive_reduction(edges: &BTreeSet<(String, String)>) -> BTreeSet<(String, String)> {
    let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in edges {
        succ.entry(a.as_str()).or_default().push(b.as_str());
    }
    let reach_long = |a: &str, c: &str| {
        // reachable from a successor of `a` other than through the edge a -> c
        let mut stack: Vec<&str> = succ.get(a).into_iter().flatten().copied().filter(|&b| b != c).collect();
        let mut seen = BTreeSet::new();
        while let Some(x) = stack.pop() {
            if x == c {
                return true;
            }
            if seen.insert(x) {
                stack.extend(succ.get(x).into_iter().flatten().copied());
            }
        }
        false
    };
    edges.iter().filter(|(a, c)| !reach_long(a, c)).cloned().collect()
}

/// Reduced specialization diagram.
pub fn specialization_poset(weyl: &WeylGroup, names: &NameRegistry, records: &[TypeRecord]) -> Result<Vec<(String, String)>> {
    Ok(transitive_reduction(&specializations(weyl, names, records)?).into_iter().collect())
}
