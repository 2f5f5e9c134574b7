//! Weyl groups of the del Pezzo lattices, realized as permutation groups on
//! the exceptional classes.

pub mod chain;
pub mod classes;
pub mod conjugacy;
pub mod small;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DelPezzoLattice, ExceptionalConfig, PicClass};
use crate::perm::Perm;

pub use chain::StabChain;
pub use small::SmallGroup;

/// A permutation group together with its stabilizer chain.
#[derive(Clone, Debug)]
pub struct PermGroup {
    gens: Vec<Perm>,
    chain: StabChain,
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> PermGroup {
        let chain = StabChain::new(degree, &gens);
        PermGroup { gens, chain }
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::new(degree, Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.chain.degree()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn chain(&self) -> &StabChain {
        &self.chain
    }

    pub fn order(&self) -> u64 {
        u64::try_from(self.chain.order()).expect("group order fits in u64")
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.chain.contains(g)
    }

    /// Subgroup generated by `gens`, which must lie in `self`.
    pub fn closure(&self, gens: &[Perm]) -> Result<PermGroup> {
        for g in gens {
            if !self.contains(g) {
                return Err(Error::NotInGroup(g.to_string()));
            }
        }
        Ok(PermGroup::new(self.degree(), gens.to_vec()))
    }

    /// All elements, for groups up to `cap` elements.
    pub fn small(&self, cap: usize) -> Result<SmallGroup> {
        SmallGroup::generate(self.degree(), &self.gens, cap)
    }
}

/// `W(E_{9-d})` (`W(D5)` for degree 4) acting on the exceptional classes,
/// with the lattice data needed to recover the action on `Pic`.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    config: ExceptionalConfig,
    group: PermGroup,
    /// exceptional indices of `E_1..E_n`, then `L - E1 - E2`
    basis_idx: Vec<usize>,
}

impl WeylGroup {
    pub fn build(config: ExceptionalConfig) -> Result<WeylGroup> {
        let lattice = config.lattice().clone();
        let mut gens = Vec::new();
        for r in lattice.simple_roots() {
            let images = config
                .classes()
                .iter()
                .map(|c| {
                    config.index_of(&lattice.reflect(c, &r)).ok_or_else(|| {
                        Error::Invalid(format!("reflection in {r} does not permute exceptional classes"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            gens.push(Perm::from_images(&images)?);
        }
        let mut basis_idx: Vec<usize> = (1..=lattice.points())
            .map(|i| config.index_of(&lattice.e(i)).expect("E_i is exceptional"))
            .collect();
        let l12 = lattice.line().sub(&lattice.e(1)).sub(&lattice.e(2));
        basis_idx.push(config.index_of(&l12).expect("L-E1-E2 is exceptional"));
        let group = PermGroup::new(config.len(), gens);
        Ok(WeylGroup {
            config,
            group,
            basis_idx,
        })
    }

    pub fn for_degree(degree: u8) -> Result<WeylGroup> {
        WeylGroup::build(DelPezzoLattice::new(degree)?.exceptional_config())
    }

    pub fn degree(&self) -> u8 {
        self.config.degree()
    }

    pub fn config(&self) -> &ExceptionalConfig {
        &self.config
    }

    pub fn lattice(&self) -> &DelPezzoLattice {
        self.config.lattice()
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    pub fn rank(&self) -> usize {
        self.lattice().rank()
    }

    /// Matrix of the induced action on `Pic` in the basis `(L, E_1, ...)`,
    /// row-major; column `j` is the image of basis vector `j`.
    pub fn lattice_matrix(&self, g: &Perm) -> Vec<i64> {
        let r = self.rank();
        let n = r - 1;
        let mut m = vec![0i64; r * r];
        let img = |idx: usize| self.config.class(g.apply(idx));
        let mut line = img(self.basis_idx[n]).clone();
        for i in 0..2 {
            line = line.add(img(self.basis_idx[i]));
        }
        for (row, v) in line.coeffs().iter().enumerate() {
            m[row * r] = *v;
        }
        for i in 0..n {
            for (row, v) in img(self.basis_idx[i]).coeffs().iter().enumerate() {
                m[row * r + i + 1] = *v;
            }
        }
        m
    }

    /// Image of a class under `g`.
    pub fn act(&self, g: &Perm, c: &PicClass) -> PicClass {
        let m = self.lattice_matrix(g);
        let r = self.rank();
        PicClass(
            (0..r)
                .map(|i| (0..r).map(|j| m[i * r + j] * c.coeffs()[j]).sum())
                .collect(),
        )
    }

    /// True iff `g` preserves the intersection matrix.
    pub fn preserves_intersections(&self, g: &Perm) -> bool {
        let n = self.config.len();
        (0..n).all(|i| {
            let gi = g.apply(i);
            (0..n).all(|j| self.config.inter(gi, g.apply(j)) == self.config.inter(i, j))
        })
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.config.len() && self.group.contains(g)
    }

    pub fn check_member(&self, g: &Perm) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::NotInGroup(g.to_string()))
        }
    }
}

/// Group file: generators in image notation over the canonical exceptional
/// order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupFile {
    pub degree: u8,
    pub generators: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl GroupFile {
    pub fn from_perms(degree: u8, gens: &[Perm], name: Option<String>) -> GroupFile {
        GroupFile {
            degree,
            generators: gens.iter().map(|g| g.images()).collect(),
            name,
        }
    }

    pub fn perms(&self) -> Result<Vec<Perm>> {
        self.generators.iter().map(|g| Perm::from_images(g)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_weyl_orders() {
        assert_eq!(WeylGroup::for_degree(4).unwrap().order(), 1920);
        assert_eq!(WeylGroup::for_degree(3).unwrap().order(), 51840);
    }

    #[test]
    fn generators_preserve_structure() {
        for d in [4, 3, 2] {
            let w = WeylGroup::for_degree(d).unwrap();
            let k = w.lattice().canonical();
            for g in w.group().generators() {
                assert!(w.preserves_intersections(g));
                assert_eq!(w.act(g, &k), k);
                assert_eq!(g.order(), 2);
            }
        }
    }

    #[test]
    fn matrix_is_a_homomorphism() {
        let w = WeylGroup::for_degree(3).unwrap();
        let gens = w.group().generators();
        let r = w.rank();
        let a = &gens[0];
        let b = &gens[5];
        let ab = w.lattice_matrix(&a.compose(b));
        let (ma, mb) = (w.lattice_matrix(a), w.lattice_matrix(b));
        let mut prod = vec![0i64; r * r];
        for i in 0..r {
            for j in 0..r {
                prod[i * r + j] = (0..r).map(|k| ma[i * r + k] * mb[k * r + j]).sum();
            }
        }
        assert_eq!(ab, prod);
    }

    #[test]
    fn closure_rejects_foreign_elements() {
        let w = WeylGroup::for_degree(4).unwrap();
        let mut img: Vec<usize> = (0..16).collect();
        img.swap(0, 1);
        let bad = Perm::from_images(&img).unwrap();
        assert!(w.group().closure(&[bad]).is_err());
        let t = w.group().closure(&[]).unwrap();
        assert_eq!(t.order(), 1);
        let g = w.group().generators()[0].compose(&w.group().generators()[1]);
        assert_eq!(w.group().closure(&[g.clone()]).unwrap().order(), g.order());
    }
}
