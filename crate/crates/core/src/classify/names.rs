//! Names for orbit signatures and abstract groups.
//!
//! Orbit names are looked up by signature per degree. Group names are
//! matched by a fingerprint computed from explicit permutation models of
//! each named group.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use crate::classify::orbits::OrbitSignature;
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::weyl::small::{SmallGroup, SMALL_CAP};

/// Orbit signature names for one degree.
#[derive(Clone, Debug)]
pub struct NameRegistry {
    degree: u8,
    by_signature: HashMap<OrbitSignature, (String, bool)>,
}

/// (name, size, edges, conic paired, inferred)
type Entry = (&'static str, usize, &'static [(u8, u32)], bool, bool);

const DEGREE_2: &[Entry] = &[
    ("2_c", 2, &[(1, 1)], true, false),
    ("2", 2, &[(2, 1)], false, false),
    ("4", 4, &[(1, 3)], false, false),
    ("6_1", 6, &[(1, 2), (2, 1)], false, false),
    ("6_2", 6, &[(1, 4)], false, false),
    ("6_c", 6, &[(1, 1)], true, false),
    ("8", 8, &[(1, 3), (2, 1)], false, false),
    ("10_1", 10, &[(1, 4), (2, 1)], false, false),
    ("10_2", 10, &[(1, 6)], false, false),
    ("10_c", 10, &[(1, 1)], true, false),
    ("12", 12, &[(1, 5), (2, 1)], false, false),
    ("12_c", 12, &[(1, 1)], true, false),
    ("14", 14, &[(1, 6), (2, 1)], false, false),
    ("18", 18, &[(1, 8), (2, 1)], false, false),
    ("24", 24, &[(1, 11), (2, 1)], false, false),
    ("30", 30, &[(1, 14), (2, 1)], false, false),
    ("42", 42, &[(1, 20), (2, 1)], false, false),
];

const DEGREE_1: &[Entry] = &[
    ("2_c", 2, &[(1, 1)], true, true),
    ("4_c", 4, &[(1, 1)], true, true),
    ("6_c", 6, &[(1, 1)], true, true),
    ("8_c", 8, &[(1, 1)], true, true),
    ("10_c", 10, &[(1, 1)], true, true),
    ("12_c", 12, &[(1, 1)], true, true),
    ("3", 3, &[(2, 2)], false, false),
    ("4_1", 4, &[(2, 2)], false, false),
    ("4_2", 4, &[(1, 2), (2, 1)], false, false),
    ("4_3", 4, &[(1, 2), (3, 1)], false, false),
    ("5", 5, &[(1, 2), (2, 2)], false, false),
    ("6_3", 6, &[(2, 2), (3, 1)], false, false),
    ("6_4", 6, &[(1, 3), (2, 2)], false, false),
    ("10_3", 10, &[(1, 3), (2, 4)], false, false),
    ("10_4", 10, &[(1, 4), (2, 2), (3, 1)], false, false),
    ("12_1", 12, &[(1, 1), (2, 6)], false, false),
    ("12_2", 12, &[(1, 4), (2, 3)], false, false),
    ("12_3", 12, &[(1, 2), (2, 4), (3, 1)], false, false),
    ("12_4", 12, &[(1, 8), (2, 1)], false, false),
    ("12_5", 12, &[(1, 6), (2, 2), (3, 1)], false, false),
    ("20_1", 20, &[(1, 2), (2, 8), (3, 1)], false, false),
    ("20_2", 20, &[(1, 8), (2, 4)], false, false),
    ("20_3", 20, &[(1, 6), (2, 6), (3, 1)], false, false),
    ("20_4", 20, &[(1, 12), (2, 2)], false, false),
    ("20_5", 20, &[(1, 9), (2, 6)], false, false),
    ("24_1", 24, &[(1, 2), (2, 10), (3, 1)], false, false),
    ("24_2", 24, &[(1, 13), (2, 3)], false, false),
    ("36_1", 36, &[(1, 18), (2, 5)], false, false),
    ("36_2", 36, &[(1, 18), (2, 8), (3, 1)], false, false),
    ("40", 40, &[(1, 18), (2, 10), (3, 1)], false, false),
];

impl NameRegistry {
    /// Fails if two names share a signature.
    pub fn for_degree(degree: u8) -> Result<NameRegistry> {
        let entries: &[Entry] = match degree {
            1 => DEGREE_1,
            2 => DEGREE_2,
            3 | 4 => &[],
            d => return Err(Error::BadDegree(d)),
        };
        let mut by_signature = HashMap::new();
        for &(name, n, edges, paired, inferred) in entries {
            let sig = OrbitSignature::new(n, edges, paired);
            if let Some((other, _)) = by_signature.insert(sig, (name.to_string(), inferred)) {
                return Err(Error::Invalid(format!("orbit names {other} and {name} share a signature")));
            }
        }
        Ok(NameRegistry { degree, by_signature })
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    /// Registered name, or the systematic one. The flag marks names that
    /// extend the listed ones by analogy.
    pub fn name(&self, sig: &OrbitSignature) -> (String, bool) {
        match self.by_signature.get(sig) {
            Some((n, inferred)) => (n.clone(), *inferred),
            None => (sig.to_string(), false),
        }
    }

    pub fn len(&self) -> usize {
        self.by_signature.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_signature.is_empty()
    }
}

/// Isomorphism invariants of a small group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupFingerprint {
    pub order: usize,
    pub order_histogram: Vec<(u32, usize)>,
    pub center: usize,
    pub derived_series: Vec<usize>,
    pub abelian_invariants: Vec<u64>,
    /// (class size, element order, count)
    pub classes: Vec<(usize, u32, usize)>,
    /// number of subgroups of each order
    pub subgroup_counts: Vec<(usize, usize)>,
}

impl GroupFingerprint {
    pub fn of(g: &SmallGroup) -> GroupFingerprint {
        let mut classes: BTreeMap<(usize, u32), usize> = BTreeMap::new();
        for c in g.conjugacy_classes() {
            *classes.entry((c.len(), g.elt_order(c[0]))).or_default() += 1;
        }
        let mut subs: BTreeMap<usize, usize> = BTreeMap::new();
        if g.order() <= 200 {
            for s in g.all_subgroups() {
                *subs.entry(s.len()).or_default() += 1;
            }
        }
        GroupFingerprint {
            order: g.order(),
            order_histogram: g.order_histogram().into_iter().collect(),
            center: g.center().len(),
            derived_series: g.derived_series_orders(),
            abelian_invariants: g.abelian_invariants(),
            classes: classes.into_iter().map(|((s, o), c)| (s, o, c)).collect(),
            subgroup_counts: subs.into_iter().collect(),
        }
    }

    pub fn hash_hex(&self) -> String {
        let mut h = DefaultHasher::new();
        self.hash(&mut h);
        format!("{:08x}", h.finish() as u32)
    }
}

fn cycle(points: &[usize], n: usize) -> Perm {
    let mut imgs: Vec<usize> = (0..n).collect();
    for (i, &p) in points.iter().enumerate() {
        imgs[p] = points[(i + 1) % points.len()];
    }
    Perm::from_images(&imgs).expect("valid cycle")
}

fn shift(g: &Perm, by: usize, n: usize) -> Perm {
    let mut imgs: Vec<usize> = (0..n).collect();
    for i in 0..g.degree() {
        imgs[i + by] = g.apply(i) + by;
    }
    Perm::from_images(&imgs).expect("valid shift")
}

/// A permutation model: degree and generators.
#[derive(Clone, Debug)]
pub struct Model {
    pub degree: usize,
    pub gens: Vec<Perm>,
}

impl Model {
    fn group(&self) -> SmallGroup {
        SmallGroup::generate(self.degree, &self.gens, SMALL_CAP).expect("model is small")
    }

    pub fn trivial() -> Model {
        Model { degree: 1, gens: vec![] }
    }

    pub fn cyclic(n: usize) -> Model {
        Model {
            degree: n,
            gens: vec![cycle(&(0..n).collect::<Vec<_>>(), n)],
        }
    }

    /// Dihedral group of order `2n`.
    pub fn dihedral(n: usize) -> Model {
        let refl: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        Model {
            degree: n,
            gens: vec![cycle(&(0..n).collect::<Vec<_>>(), n), Perm::from_images(&refl).unwrap()],
        }
    }

    pub fn symmetric(n: usize) -> Model {
        Model {
            degree: n,
            gens: vec![cycle(&(0..n).collect::<Vec<_>>(), n), cycle(&[0, 1], n)],
        }
    }

    pub fn alternating(n: usize) -> Model {
        let gens = (2..n).map(|k| cycle(&[0, 1, k], n)).collect();
        Model { degree: n, gens }
    }

    /// `C_m ⋊ K`, with the generators of `K` acting on `C_m` by
    /// multiplication by `units`.
    pub fn semidirect_cyclic(m: usize, k: &Model, units: &[usize]) -> Model {
        let n = m + k.degree;
        let mut gens = vec![cycle(&(0..m).collect::<Vec<_>>(), n)];
        for (g, &u) in k.gens.iter().zip(units) {
            let mut imgs: Vec<usize> = (0..n).collect();
            for (x, img) in imgs.iter_mut().enumerate().take(m) {
                *img = (u * x) % m;
            }
            for i in 0..k.degree {
                imgs[m + i] = m + g.apply(i);
            }
            gens.push(Perm::from_images(&imgs).unwrap());
        }
        Model { degree: n, gens }
    }

    /// Frobenius group `C_p ⋊ C_{p-1}`.
    pub fn frobenius(p: usize, primitive_root: usize) -> Model {
        Model::semidirect_cyclic(p, &Model::cyclic(p - 1), &[primitive_root])
    }

    pub fn product(&self, other: &Model) -> Model {
        let n = self.degree + other.degree;
        let mut gens: Vec<Perm> = self.gens.iter().map(|g| shift(g, 0, n)).collect();
        gens.extend(other.gens.iter().map(|g| shift(g, self.degree, n)));
        Model { degree: n, gens }
    }

    /// `self wr C_2`.
    pub fn wreath2(&self) -> Model {
        let m = self.degree;
        let mut p = self.product(self);
        let swap: Vec<usize> = (0..2 * m).map(|i| (i + m) % (2 * m)).collect();
        p.gens.push(Perm::from_images(&swap).unwrap());
        p
    }
}

/// The named groups with their models.
pub fn named_models() -> Vec<(&'static str, Model)> {
    let c2 = Model::cyclic(2);
    let c3 = Model::cyclic(3);
    let s3 = Model::symmetric(3);
    let f5 = Model::frobenius(5, 2);
    let d4 = Model::dihedral(4);
    // C3 ⋊ S3 with S3 acting through its sign
    let c3s3 = Model::semidirect_cyclic(3, &s3, &[1, 2]);
    // C2^2 ⋊ F5 with F5 acting through F5 -> C2 by swapping the factors
    let c22f5 = {
        let n = 9;
        let t = cycle(&[0, 1, 2, 3, 4], n);
        let mut g = vec![0, 2, 4, 1, 3, 7, 8, 5, 6];
        g.truncate(n);
        Model {
            degree: n,
            gens: vec![t, Perm::from_images(&g).unwrap(), cycle(&[5, 6], n), cycle(&[7, 8], n)],
        }
    };
    // C3^2 ⋊ C4 with C4 acting by (x, y) -> (-y, x), containing C3 ⋊ S3
    let c32c4 = {
        let n = 9;
        let idx = |x: usize, y: usize| 3 * (x % 3) + (y % 3);
        let tx: Vec<usize> = (0..9).map(|p| idx(p / 3 + 1, p % 3)).collect();
        let ty: Vec<usize> = (0..9).map(|p| idx(p / 3, p % 3 + 1)).collect();
        let r: Vec<usize> = (0..9).map(|p| idx(3 - p % 3, p / 3)).collect();
        Model {
            degree: n,
            gens: vec![Perm::from_images(&tx).unwrap(), Perm::from_images(&ty).unwrap(), Perm::from_images(&r).unwrap()],
        }
    };
    vec![
        ("1", Model::trivial()),
        ("C2", c2.clone()),
        ("C3", c3.clone()),
        ("C4", Model::cyclic(4)),
        ("C5", Model::cyclic(5)),
        ("C6", Model::cyclic(6)),
        ("C7", Model::cyclic(7)),
        ("C8", Model::cyclic(8)),
        ("C9", Model::cyclic(9)),
        ("C10", Model::cyclic(10)),
        ("C12", Model::cyclic(12)),
        ("C15", Model::cyclic(15)),
        ("C2^2", c2.product(&c2)),
        ("C2^3", c2.product(&c2).product(&c2)),
        ("C2xC4", c2.product(&Model::cyclic(4))),
        ("C3^2", c3.product(&c3)),
        ("C2xC6", c2.product(&Model::cyclic(6))),
        ("S3", s3.clone()),
        ("D4", d4.clone()),
        ("Q8", {
            // quaternion group in its regular representation
            let n = 8;
            let i = Perm::from_images(&[2, 3, 1, 0, 6, 7, 5, 4]).unwrap();
            let j = Perm::from_images(&[4, 5, 7, 6, 1, 0, 2, 3]).unwrap();
            Model { degree: n, gens: vec![i, j] }
        }),
        ("D5", Model::dihedral(5)),
        ("D6", Model::dihedral(6)),
        ("D7", Model::dihedral(7)),
        ("D10", Model::dihedral(10)),
        ("D15", Model::dihedral(15)),
        ("A4", Model::alternating(4)),
        ("S4", Model::symmetric(4)),
        ("A5", Model::alternating(5)),
        ("S5", Model::symmetric(5)),
        ("S6", Model::symmetric(6)),
        ("F5", f5.clone()),
        ("F7", Model::frobenius(7, 3)),
        ("C3xS3", c3.product(&s3)),
        ("C3:S3", c3s3.clone()),
        ("S3^2", s3.product(&s3)),
        ("C2xA4", c2.product(&Model::alternating(4))),
        ("C2xS4", c2.product(&Model::symmetric(4))),
        ("C2xF5", c2.product(&f5)),
        ("C2xD4", c2.product(&d4)),
        ("C2^2xS3", c2.product(&c2).product(&s3)),
        ("C5:C4", Model::semidirect_cyclic(5, &Model::cyclic(4), &[4])),
        ("C3:C4", Model::semidirect_cyclic(3, &Model::cyclic(4), &[2])),
        ("C5:D4", Model::semidirect_cyclic(5, &d4, &[4, 1])),
        ("C3:D4", Model::semidirect_cyclic(3, &d4, &[2, 1])),
        ("C2^2:F5", c22f5),
        ("C3:F5", Model::semidirect_cyclic(3, &f5, &[1, 2])),
        ("(C3:S3):C2", c32c4),
        ("C2x(C3:S3)", c2.product(&c3s3)),
        ("S3wrC2", s3.wreath2()),
    ]
}

fn registry() -> &'static HashMap<GroupFingerprint, &'static str> {
    static REG: OnceLock<HashMap<GroupFingerprint, &'static str>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut m = HashMap::new();
        for (name, model) in named_models() {
            let fp = GroupFingerprint::of(&model.group());
            if let Some(other) = m.insert(fp, name) {
                panic!("group models {other} and {name} share a fingerprint");
            }
        }
        m
    })
}

/// Name of a group from the registry, or `G(order)#hash`.
pub fn recognize_group(g: &SmallGroup) -> String {
    let fp = GroupFingerprint::of(g);
    match registry().get(&fp) {
        Some(n) => n.to_string(),
        None => format!("G({})#{}", g.order(), fp.hash_hex()),
    }
}

/// Order of a named group according to its model.
pub fn model_order(name: &str) -> Option<usize> {
    named_models().into_iter().find(|(n, _)| *n == name).map(|(_, m)| m.group().order())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registries_are_injective() {
        for d in 1..=4 {
            NameRegistry::for_degree(d).unwrap();
        }
        assert_eq!(registry().len(), named_models().len());
    }

    #[test]
    fn model_orders() {
        let expect = [
            ("C5:D4", 40),
            ("C2^2:F5", 80),
            ("C3:F5", 60),
            ("(C3:S3):C2", 36),
            ("S3wrC2", 72),
            ("C3:S3", 18),
            ("F7", 42),
            ("C5:C4", 20),
            ("Q8", 8),
        ];
        for (n, o) in expect {
            assert_eq!(model_order(n), Some(o), "{n}");
        }
    }

    #[test]
    fn small_names() {
        let s3 = Model::symmetric(3).group();
        assert_eq!(recognize_group(&s3), "S3");
        let d7 = Model::dihedral(7).group();
        assert_eq!(recognize_group(&d7), "D7");
        let f7 = Model::frobenius(7, 3).group();
        assert_eq!(f7.center().len(), 1);
        assert_eq!(recognize_group(&f7), "F7");
        let odd = Model::cyclic(11).group();
        assert!(recognize_group(&odd).starts_with("G(11)#"));
    }
}
