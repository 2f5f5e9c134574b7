//! Reference records and field-level comparison against computed ones.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::record::TypeRecord;
use crate::lattice::exceptional_count;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenOrbit {
    pub name: String,
    pub multiplicity: usize,
    /// unknown stabilizers are left out and not compared
    #[serde(default)]
    pub stabilizer: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenRecord {
    pub type_id: String,
    pub group_name: String,
    pub group_order: u64,
    pub orbits: Vec<GoldenOrbit>,
    pub minimal: bool,
    pub conic_bundle: bool,
    pub fiber_partition: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenFile {
    pub degree: u8,
    pub records: Vec<GoldenRecord>,
    /// specialization edges (from, to) by type id
    #[serde(default)]
    pub edges: Vec<(String, String)>,
}

/// Size encoded in an orbit name: `12_c` -> 12, `(6)[1^3]` -> 6.
pub fn orbit_name_size(name: &str) -> Option<usize> {
    let digits: String = name.trim_start_matches('(').chars().take_while(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}

/// Type family: `D6(3)` -> `D6`.
pub fn family(type_id: &str) -> &str {
    type_id.split('(').next().unwrap_or(type_id)
}

impl GoldenRecord {
    pub fn orbit_label(&self) -> String {
        let parts: Vec<String> = self
            .orbits
            .iter()
            .map(|o| if o.multiplicity == 1 { o.name.clone() } else { format!("{}^{}", o.name, o.multiplicity) })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn orbit_counts(&self) -> BTreeMap<&str, usize> {
        self.orbits.iter().map(|o| (o.name.as_str(), o.multiplicity)).collect()
    }

    /// Field-level differences, one line each.
    pub fn diff(&self, r: &TypeRecord) -> Vec<String> {
        let id = &self.type_id;
        let mut out = Vec::new();
        if self.group_name != r.group_name {
            out.push(format!("{id}: group expected {}, got {}", self.group_name, r.group_name));
        }
        if self.group_order != r.group_order {
            out.push(format!("{id}: order expected {}, got {}", self.group_order, r.group_order));
        }
        let got: BTreeMap<&str, usize> = r.orbits.iter().map(|o| (o.name.as_str(), o.multiplicity)).collect();
        if self.orbit_counts() != got {
            out.push(format!("{id}: orbits expected {}, got {}", self.orbit_label(), r.orbit_label()));
        } else {
            for o in &self.orbits {
                let Some(want) = &o.stabilizer else { continue };
                let have = r.orbits.iter().find(|c| c.name == o.name).and_then(|c| c.stabilizer.as_deref()).unwrap_or("?");
                if want != have {
                    out.push(format!("{id}: stabilizer of {} expected {want}, got {have}", o.name));
                }
            }
        }
        if self.minimal != r.minimal {
            out.push(format!("{id}: minimal expected {}, got {}", self.minimal, r.minimal));
        }
        if self.conic_bundle != r.conic_bundle {
            out.push(format!("{id}: conic bundle expected {}, got {}", self.conic_bundle, r.conic_bundle));
        }
        if self.fiber_partition != r.fiber_partition {
            out.push(format!("{id}: fiber partition expected {:?}, got {:?}", self.fiber_partition, r.fiber_partition));
        }
        out
    }

    pub fn matches(&self, r: &TypeRecord) -> bool {
        self.diff(r).is_empty()
    }

    /// Loose identification used to report field differences.
    fn resembles(&self, r: &TypeRecord) -> bool {
        let got: BTreeMap<&str, usize> = r.orbits.iter().map(|o| (o.name.as_str(), o.multiplicity)).collect();
        self.group_order == r.group_order && self.orbit_counts() == got
    }
}

impl GoldenFile {
    pub fn parse(text: &str) -> Result<GoldenFile> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let g: GoldenFile = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            msg: e.inner().to_string(),
        })?;
        g.validate()?;
        Ok(g)
    }

    pub fn load(path: &Path) -> Result<GoldenFile> {
        let text = std::fs::read_to_string(path)?;
        GoldenFile::parse(&text)
    }

    fn validate(&self) -> Result<()> {
        let schema = |path: String, msg: String| Err(Error::Schema { path, msg });
        let total = match exceptional_count(self.degree) {
            Some(t) => t,
            None => return schema("degree".into(), format!("unsupported degree {}", self.degree)),
        };
        let mut ids = HashSet::new();
        for (i, r) in self.records.iter().enumerate() {
            if !ids.insert(r.type_id.as_str()) {
                return schema(format!("records[{i}].type_id"), format!("duplicate type id {}", r.type_id));
            }
            let mut sum = 0;
            for (j, o) in r.orbits.iter().enumerate() {
                match orbit_name_size(&o.name) {
                    Some(n) if n > 0 && o.multiplicity > 0 => sum += n * o.multiplicity,
                    _ => return schema(format!("records[{i}].orbits[{j}]"), format!("bad orbit {} ^ {}", o.name, o.multiplicity)),
                }
            }
            if sum != total {
                return schema(format!("records[{i}].orbits"), format!("orbits cover {sum} of {total} classes"));
            }
            if let Some(p) = &r.fiber_partition {
                if p.iter().sum::<usize>() != 8 - self.degree as usize {
                    return schema(format!("records[{i}].fiber_partition"), format!("{p:?} is not a partition of {}", 8 - self.degree));
                }
            }
        }
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if !ids.contains(a.as_str()) || !ids.contains(b.as_str()) {
                return schema(format!("edges[{i}]"), format!("unknown type in edge {a} -> {b}"));
            }
        }
        Ok(())
    }

    pub fn record(&self, type_id: &str) -> Option<&GoldenRecord> {
        self.records.iter().find(|r| r.type_id == type_id)
    }

    /// Labels minimal computed records that match a reference record on
    /// every compared field.
    pub fn assign_type_ids(&self, records: &mut [TypeRecord]) {
        for r in records.iter_mut().filter(|r| r.minimal) {
            r.type_id = self.records.iter().find(|g| g.matches(r)).map(|g| g.type_id.clone());
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffReport {
    pub lines: Vec<String>,
    /// reference types with no class found by an incomplete run
    pub unreached: Vec<String>,
    pub partial: bool,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

/// Compares labelled records (see [`GoldenFile::assign_type_ids`]) with the
/// reference. Unlabelled minimal records resembling a reference record are
/// diffed field by field; other unlabelled minimal records are reported as
/// unexpected.
pub fn verify_golden(records: &[TypeRecord], golden: &GoldenFile, partial: bool) -> DiffReport {
    let mut lines = Vec::new();
    let mut unreached = Vec::new();
    let mut used: HashSet<usize> = HashSet::new();
    for g in &golden.records {
        if records.iter().any(|r| r.type_id.as_deref() == Some(g.type_id.as_str())) {
            continue;
        }
        let near = records
            .iter()
            .enumerate()
            .find(|(i, r)| r.minimal && r.type_id.is_none() && !used.contains(i) && g.resembles(r));
        match near {
            Some((i, r)) => {
                used.insert(i);
                lines.extend(g.diff(r));
            }
            None if partial => unreached.push(g.type_id.clone()),
            None => lines.push(format!("{}: no matching class", g.type_id)),
        }
    }
    let mut unexpected: Vec<String> = records
        .iter()
        .enumerate()
        .filter(|(i, r)| r.minimal && r.type_id.is_none() && !used.contains(i))
        .map(|(_, r)| format!("unexpected minimal class: {} ({}) {} stabilizers {}", r.group_name, r.group_order, r.orbit_label(), r.stabilizer_label()))
        .collect();
    unexpected.dedup();
    lines.extend(unexpected);
    DiffReport { lines, unreached, partial }
}
