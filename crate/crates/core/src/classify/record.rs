//! Per-class records: group name, orbit decomposition with stabilizers,
//! minimality and conic bundle data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classify::names::{recognize_group, NameRegistry};
use crate::classify::orbits::{fiber_partition, invariant_conic_classes, is_minimal, orbits, signature};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::weyl::small::SmallGroup;
use crate::weyl::WeylGroup;

/// Orbits sharing one signature name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub name: String,
    pub size: usize,
    pub multiplicity: usize,
    /// stabilizer name; distinct names across the orbits are joined by `|`
    pub stabilizer: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub inferred_name: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeRecord {
    pub degree: u8,
    #[serde(default)]
    pub type_id: Option<String>,
    pub group_name: String,
    pub group_order: u64,
    pub generators: Vec<Perm>,
    pub orbits: Vec<OrbitEntry>,
    pub minimal: bool,
    pub conic_bundle: bool,
    pub invariant_conics: usize,
    pub fiber_partition: Option<Vec<usize>>,
}

impl TypeRecord {
    /// Computes every field from the generators.
    pub fn build(weyl: &WeylGroup, names: &NameRegistry, group: &SmallGroup) -> Result<TypeRecord> {
        let cfg = weyl.config();
        let gens = group.generator_perms();
        for g in &gens {
            weyl.check_member(g)?;
        }
        let order = group.order();
        let mut by_name: BTreeMap<(usize, String), (usize, Vec<String>, bool)> = BTreeMap::new();
        for orb in orbits(&gens, cfg) {
            let sig = signature(&orb, cfg)?;
            let (name, inferred) = names.name(&sig);
            let stab = group.point_stabilizer(orb[0]);
            if stab.len() * orb.len() != order {
                return Err(Error::Invalid(format!("orbit of size {} with stabilizer of order {} in a group of order {order}", orb.len(), stab.len())));
            }
            let stab_name = recognize_group(&group.subgroup(&stab));
            let e = by_name.entry((orb.len(), name)).or_insert((0, Vec::new(), inferred));
            e.0 += 1;
            if !e.1.contains(&stab_name) {
                e.1.push(stab_name);
            }
        }
        let orbits: Vec<OrbitEntry> = by_name
            .into_iter()
            .map(|((size, name), (mult, mut stabs, inferred))| {
                stabs.sort();
                OrbitEntry {
                    name,
                    size,
                    multiplicity: mult,
                    stabilizer: Some(stabs.join("|")),
                    inferred_name: inferred,
                }
            })
            .collect();
        let total: usize = orbits.iter().map(|o| o.size * o.multiplicity).sum();
        if total != cfg.len() {
            return Err(Error::Invalid(format!("orbits cover {total} of {} classes", cfg.len())));
        }
        let conics = invariant_conic_classes(&gens, weyl);
        // the least partition over all invariant conics, so that the field
        // does not depend on how conics are ordered
        let mut fiber: Option<Vec<usize>> = None;
        for c in &conics {
            let p = fiber_partition(&gens, c, cfg)?;
            if fiber.as_ref().is_none_or(|f| p < *f) {
                fiber = Some(p);
            }
        }
        Ok(TypeRecord {
            degree: weyl.degree(),
            type_id: None,
            group_name: recognize_group(group),
            group_order: order as u64,
            generators: gens.clone(),
            orbits,
            minimal: is_minimal(&gens, cfg),
            conic_bundle: !conics.is_empty(),
            invariant_conics: conics.len(),
            fiber_partition: fiber,
        })
    }

    /// `{2, 6_1^3, 6_c^4}` style orbit decomposition.
    pub fn orbit_label(&self) -> String {
        let parts: Vec<String> = self
            .orbits
            .iter()
            .map(|o| if o.multiplicity == 1 { o.name.clone() } else { format!("{}^{}", o.name, o.multiplicity) })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn stabilizer_label(&self) -> String {
        let parts: Vec<String> = self.orbits.iter().map(|o| o.stabilizer.clone().unwrap_or_else(|| "?".into())).collect();
        format!("{{{}}}", parts.join(", "))
    }
}
