//! Orbits of a subgroup on the exceptional classes, their intersection
//! signatures, minimality, invariant conic classes and fiber partitions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{ClassKind, ExceptionalConfig, PicClass};
use crate::perm::Perm;
use crate::weyl::small::point_orbits;
use crate::weyl::WeylGroup;

/// Orbits of `<gens>` on the exceptional classes, by size then least index.
pub fn orbits(gens: &[Perm], config: &ExceptionalConfig) -> Vec<Vec<usize>> {
    point_orbits(config.len(), gens)
}

/// Intersection pattern of one orbit: each member meets `t` others with
/// intersection number `s`, for each `(s, t)` in `edges`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitSignature {
    pub n: usize,
    /// (s, t), increasing in s, t > 0
    pub edges: Vec<(u8, u32)>,
    /// the orbit is a union of degenerate fibers of one conic bundle
    pub conic_paired: bool,
}

impl OrbitSignature {
    pub fn new(n: usize, edges: &[(u8, u32)], conic_paired: bool) -> Self {
        OrbitSignature {
            n,
            edges: edges.to_vec(),
            conic_paired,
        }
    }

    /// Systematic name such as `(12)[1^5,2]`.
    pub fn systematic(&self) -> String {
        let parts: Vec<String> = self
            .edges
            .iter()
            .map(|&(s, t)| if t == 1 { s.to_string() } else { format!("{s}^{t}") })
            .collect();
        format!("({})[{}]", self.n, parts.join(","))
    }
}

impl fmt::Display for OrbitSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.systematic())?;
        if self.conic_paired {
            write!(f, "c")?;
        }
        Ok(())
    }
}

/// Signature of an orbit. Fails if two members see different patterns,
/// which cannot happen for a genuine group orbit.
pub fn signature(orbit: &[usize], config: &ExceptionalConfig) -> Result<OrbitSignature> {
    if orbit.is_empty() {
        return Err(Error::Invalid("empty orbit".into()));
    }
    let pattern = |v: usize| -> Vec<(u8, u32)> {
        let mut m: BTreeMap<u8, u32> = BTreeMap::new();
        for &u in orbit {
            let s = config.inter(v, u);
            if u != v && s != 0 {
                *m.entry(s as u8).or_default() += 1;
            }
        }
        m.into_iter().collect()
    };
    let edges = pattern(orbit[0]);
    for &v in &orbit[1..] {
        if pattern(v) != edges {
            return Err(Error::Invalid(format!("orbit members {} and {v} have different intersection patterns", orbit[0])));
        }
    }
    let mut conic_paired = false;
    if edges == [(1, 1)] {
        // the pairs E + E' must all be the same conic class
        let v = orbit[0];
        let u = *orbit.iter().find(|&&u| u != v && config.inter(v, u) == 1).unwrap();
        let c = config.class(v).add(config.class(u));
        conic_paired = orbit.iter().all(|&a| {
            let b = *orbit.iter().find(|&&b| b != a && config.inter(a, b) == 1).unwrap();
            config.class(a).add(config.class(b)) == c
        });
    }
    Ok(OrbitSignature {
        n: orbit.len(),
        edges,
        conic_paired,
    })
}

/// No orbit consists of pairwise disjoint classes (a singleton counts as
/// pairwise disjoint).
pub fn is_minimal(gens: &[Perm], config: &ExceptionalConfig) -> bool {
    orbits(gens, config)
        .iter()
        .all(|o| o.iter().any(|&a| o.iter().any(|&b| a != b && config.inter(a, b) != 0)))
}

/// Conic classes fixed by every generator, in enumeration order.
pub fn invariant_conic_classes(gens: &[Perm], weyl: &WeylGroup) -> Vec<PicClass> {
    let lat = weyl.lattice();
    let mats: Vec<Vec<i64>> = gens.iter().map(|g| weyl.lattice_matrix(g)).collect();
    let r = weyl.rank();
    lat.enumerate_classes(ClassKind::Conic)
        .into_iter()
        .filter(|c| {
            mats.iter().all(|m| {
                (0..r).all(|i| (0..r).map(|j| m[i * r + j] * c.coeffs()[j]).sum::<i64>() == c.coeffs()[i])
            })
        })
        .collect()
}

/// Degenerate fibers of the conic bundle given by `conic`: unordered pairs
/// of exceptional classes summing to it.
pub fn degenerate_fibers(conic: &PicClass, config: &ExceptionalConfig) -> Vec<(usize, usize)> {
    // E lies in a fiber iff E.C = 0, and then C - E is the other component
    let mut out = Vec::new();
    for a in 0..config.len() {
        let e = config.class(a);
        if e.dot(conic) != 0 {
            continue;
        }
        if let Some(b) = config.index_of(&conic.sub(e)) {
            if a < b && config.inter(a, b) == 1 {
                out.push((a, b));
            }
        }
    }
    out
}

/// Orbit sizes of `<gens>` on the degenerate fibers of an invariant conic,
/// sorted increasingly.
pub fn fiber_partition(gens: &[Perm], conic: &PicClass, config: &ExceptionalConfig) -> Result<Vec<usize>> {
    let fibers = degenerate_fibers(conic, config);
    let expected = 8 - config.degree() as usize;
    if fibers.len() != expected {
        return Err(Error::Invalid(format!("{} degenerate fibers, expected {expected}", fibers.len())));
    }
    let index: BTreeMap<(usize, usize), usize> = fibers.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let fiber_perms: Vec<Perm> = gens
        .iter()
        .map(|g| {
            let imgs: Vec<usize> = fibers
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (g.apply(a), g.apply(b));
                    index.get(&(x.min(y), x.max(y))).copied().ok_or_else(|| Error::Invalid("conic is not invariant".into()))
                })
                .collect::<Result<_>>()?;
            Perm::from_images(&imgs)
        })
        .collect::<Result<_>>()?;
    let mut sizes: Vec<usize> = point_orbits(fibers.len(), &fiber_perms).iter().map(|o| o.len()).collect();
    sizes.sort_unstable();
    Ok(sizes)
}

/// `1+3+3` style label of a partition.
pub fn partition_label(p: &[usize]) -> String {
    p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("+")
}
