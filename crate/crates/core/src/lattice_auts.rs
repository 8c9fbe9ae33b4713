//! Finite orthogonal stabilizers of lattices and weight multisets.
//!
//! Both searches assign images to a spanning set of vectors, one at a time,
//! choosing among vectors of the same class (norm, and multiplicity for
//! weights) and pruning as soon as a partial Gram matrix disagrees. Every
//! complete assignment determines a unique linear map, which is then checked
//! against the defining object.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{FiniteOrthogonalGroup, OrthogonalMap, DEFAULT_GROUP_CAP};
use crate::linalg::{
    ip, linear_map_from_images, orthogonal_complement, rank_of, Lattice, Rational, RationalVector,
};
use crate::reps::WeightMultiset;
use crate::roots::RootSystem;

pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub node_cap: u64,
    pub group_cap: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            node_cap: DEFAULT_NODE_CAP,
            group_cap: DEFAULT_GROUP_CAP,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub prunes: u64,
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug)]
pub struct StabilizerResult {
    pub group: FiniteOrthogonalGroup,
    pub stats: SearchStats,
    /// The defining vectors did not span the ambient space; the group acts
    /// on their span and fixes the orthogonal complement.
    pub restricted_to_span: bool,
    /// Multiplicity of the zero weight, which never constrains the search.
    pub zero_multiplicity: u64,
}

struct Search<'a> {
    basis: Vec<RationalVector>,
    complement: Vec<RationalVector>,
    pool: Vec<RationalVector>,
    pool_dots: Vec<Vec<Rational>>,
    candidates: Vec<Vec<usize>>,
    gram: Vec<Vec<Rational>>,
    accept: &'a dyn Fn(&OrthogonalMap) -> bool,
    cap: u64,
    stats: SearchStats,
    found: Vec<OrthogonalMap>,
}

impl Search<'_> {
    fn run(&mut self) -> Result<()> {
        let mut assigned = Vec::with_capacity(self.basis.len());
        self.descend(&mut assigned)
    }

    fn descend(&mut self, assigned: &mut Vec<usize>) -> Result<()> {
        let depth = assigned.len();
        if depth == self.basis.len() {
            return self.complete(assigned);
        }
        for ci in 0..self.candidates[depth].len() {
            let c = self.candidates[depth][ci];
            self.stats.nodes += 1;
            if self.stats.nodes > self.cap {
                return Err(Error::SearchCapExceeded { cap: self.cap });
            }
            let consistent = assigned
                .iter()
                .enumerate()
                .all(|(j, &a)| self.pool_dots[a][c] == self.gram[j][depth]);
            if !consistent {
                self.stats.prunes += 1;
                continue;
            }
            assigned.push(c);
            self.descend(assigned)?;
            assigned.pop();
        }
        Ok(())
    }

    fn complete(&mut self, assigned: &[usize]) -> Result<()> {
        let mut domain = self.basis.clone();
        domain.extend(self.complement.iter().cloned());
        let mut images: Vec<_> = assigned.iter().map(|&i| self.pool[i].clone()).collect();
        images.extend(self.complement.iter().cloned());
        let m = linear_map_from_images(&domain, &images)?;
        // Gram agreement makes the map orthogonal on the span; anything else
        // is a bug in candidate generation.
        let g = OrthogonalMap::new(m)?;
        if (self.accept)(&g) {
            self.found.push(g);
        }
        Ok(())
    }
}

fn dot_table(pool: &[RationalVector]) -> Vec<Vec<Rational>> {
    pool.iter()
        .map(|a| pool.iter().map(|b| ip(a, b)).collect())
        .collect()
}

fn finish(
    dim: usize,
    search: Search<'_>,
    started: Instant,
    cfg: &SearchConfig,
) -> Result<(FiniteOrthogonalGroup, SearchStats)> {
    let mut stats = search.stats;
    let mut group = FiniteOrthogonalGroup::from_elements(dim, vec![], search.found);
    group.reduce_generators(cfg.group_cap)?;
    stats.elapsed_ms = started.elapsed().as_millis();
    Ok((group, stats))
}

/// All orthogonal maps preserving the lattice `L` (and fixing the orthogonal
/// complement of its span).
pub fn lattice_aut_group(lattice: &Lattice, cfg: &SearchConfig) -> Result<StabilizerResult> {
    let started = Instant::now();
    let basis = lattice.basis().to_vec();
    let bound = basis
        .iter()
        .map(RationalVector::norm_sq)
        .max()
        .expect("nonempty basis");
    let pool = lattice.short_vectors(&bound);
    let candidates = basis
        .iter()
        .map(|b| {
            let n = b.norm_sq();
            (0..pool.len()).filter(|&i| pool[i].norm_sq() == n).collect()
        })
        .collect();
    let complement = orthogonal_complement(&basis, lattice.ambient_dim());
    let accept = |g: &OrthogonalMap| basis.iter().all(|b| lattice.contains(&g.apply(b)));
    let mut search = Search {
        gram: dot_table(&basis),
        pool_dots: dot_table(&pool),
        basis: basis.clone(),
        complement,
        pool,
        candidates,
        accept: &accept,
        cap: cfg.node_cap,
        stats: SearchStats::default(),
        found: Vec::new(),
    };
    search.run()?;
    let (group, stats) = finish(lattice.ambient_dim(), search, started, cfg)?;
    Ok(StabilizerResult {
        group,
        stats,
        restricted_to_span: lattice.rank() < lattice.ambient_dim(),
        zero_multiplicity: 0,
    })
}

/// All orthogonal maps `g` with `g·ws = ws` as multisets.
///
/// When the nonzero weights do not span the ambient space the caller must
/// pass `restrict_to_span`; the maps then fix the orthogonal complement.
pub fn weight_multiset_stabilizer(
    ws: &WeightMultiset,
    restrict_to_span: bool,
    cfg: &SearchConfig,
) -> Result<StabilizerResult> {
    let started = Instant::now();
    let dim = ws.ambient_dim();
    let pool: Vec<RationalVector> = ws.nonzero().map(|(v, _)| v.clone()).collect();
    let class_of = |v: &RationalVector| (v.norm_sq(), ws.multiplicity(v));
    let mut classes: BTreeMap<(Rational, u64), Vec<usize>> = BTreeMap::new();
    for (i, v) in pool.iter().enumerate() {
        classes.entry(class_of(v)).or_default().push(i);
    }
    let span_rank = rank_of(&pool);
    if span_rank < dim && !restrict_to_span {
        return Err(Error::WeightsNotSpanning {
            rank: span_rank,
            dim,
        });
    }

    // greedy basis, smallest classes first
    let mut ordered: Vec<&Vec<usize>> = classes.values().collect();
    ordered.sort_by_key(|c| c.len());
    let mut basis: Vec<RationalVector> = Vec::new();
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    'fill: for class in &ordered {
        for &i in class.iter() {
            if basis.len() == span_rank {
                break 'fill;
            }
            let mut trial = basis.clone();
            trial.push(pool[i].clone());
            if rank_of(&trial) == trial.len() {
                basis = trial;
                candidates.push((*class).clone());
            }
        }
    }

    let complement = orthogonal_complement(&basis, dim);
    let accept = |g: &OrthogonalMap| ws.is_stable_under(g);
    let mut search = Search {
        gram: dot_table(&basis),
        pool_dots: dot_table(&pool),
        basis,
        complement,
        pool,
        candidates,
        accept: &accept,
        cap: cfg.node_cap,
        stats: SearchStats::default(),
        found: Vec::new(),
    };
    if search.basis.is_empty() {
        // only zero weights: the trivial group on the (empty) span
        search.found.push(OrthogonalMap::identity(dim));
    } else {
        search.run()?;
    }
    let (group, stats) = finish(dim, search, started, cfg)?;
    Ok(StabilizerResult {
        group,
        stats,
        restricted_to_span: span_rank < dim,
        zero_multiplicity: ws.zero_multiplicity(),
    })
}

/// `|sup| / |⟨sub_gens⟩|`, after checking that every generator lies in `sup`.
pub fn subgroup_index(
    sub_gens: &[OrthogonalMap],
    sup: &FiniteOrthogonalGroup,
    cap: u64,
) -> Result<u128> {
    let sup = sup.materialize(cap)?;
    for g in sub_gens {
        if !sup.contains(g)? {
            return Err(Error::NotInGroup);
        }
    }
    let sub = FiniteOrthogonalGroup::generate(sup.dim(), sub_gens.to_vec(), cap)?;
    Ok(sup.order() / sub.order())
}

/// Does every weight-lattice vector whose length equals that of some root
/// already belong to the root system?
pub fn weights_of_root_length_are_roots(rs: &RootSystem) -> bool {
    let norms: Vec<Rational> = {
        let mut n: Vec<_> = rs.roots().iter().map(RationalVector::norm_sq).collect();
        n.sort();
        n.dedup();
        n
    };
    let bound = norms.last().expect("roots exist").clone();
    rs.weight_lattice()
        .short_vectors(&bound)
        .iter()
        .filter(|v| norms.contains(&v.norm_sq()))
        .all(|v| rs.is_root(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RationalMatrix;
    use crate::roots::Family;
    use itertools::Itertools;

    fn cfg() -> SearchConfig {
        SearchConfig::default()
    }

    /// Brute force over all signed permutation matrices of size n.
    fn signed_permutations(n: usize) -> Vec<OrthogonalMap> {
        let mut out = Vec::new();
        for p in (0..n).permutations(n) {
            for signs in 0..(1u32 << n) {
                let mut m = RationalMatrix::zeros(n, n);
                for (i, &j) in p.iter().enumerate() {
                    let s = if signs >> i & 1 == 1 { -1 } else { 1 };
                    m.set(i, j, crate::linalg::rat(s));
                }
                out.push(OrthogonalMap::new(m).unwrap());
            }
        }
        out.sort();
        out
    }

    #[test]
    fn z4_automorphisms_are_signed_permutations() {
        let z4 = Lattice::new((0..4).map(|i| RationalVector::unit(4, i)).collect()).unwrap();
        let res = lattice_aut_group(&z4, &cfg()).unwrap();
        assert_eq!(res.group.order(), 384);
        assert_eq!(res.group.elements().unwrap(), signed_permutations(4).as_slice());
    }

    #[test]
    fn a2_root_lattice_automorphisms() {
        let a2 = RootSystem::build(Family::A, 2).unwrap();
        let res = lattice_aut_group(a2.root_lattice(), &cfg()).unwrap();
        assert_eq!(res.group.order(), 12);
        assert!(res.restricted_to_span);
        let aut = a2.aut_group(DEFAULT_GROUP_CAP).unwrap();
        assert!(res.group.same_elements(&aut));
    }

    #[test]
    fn c4_root_lattice_exceeds_root_automorphisms() {
        let c4 = RootSystem::build(Family::C, 4).unwrap();
        let res = lattice_aut_group(c4.root_lattice(), &cfg()).unwrap();
        assert_eq!(res.group.order(), 1152);
        let aut = c4.aut_group(DEFAULT_GROUP_CAP).unwrap();
        assert!(aut.is_subgroup_of(&res.group).unwrap());
    }

    #[test]
    fn tautological_c2_weights() {
        let ws = WeightMultiset::from_vectors(
            2,
            &[
                RationalVector::from_ints(&[1, 0]),
                RationalVector::from_ints(&[-1, 0]),
                RationalVector::from_ints(&[0, 1]),
                RationalVector::from_ints(&[0, -1]),
            ],
        )
        .unwrap();
        let res = weight_multiset_stabilizer(&ws, false, &cfg()).unwrap();
        assert_eq!(res.group.order(), 8);
        for g in res.group.generators() {
            assert!(ws.is_stable_under(g));
        }
    }

    #[test]
    fn multiplicities_constrain_the_stabilizer() {
        // ±e1 twice, ±e2 once: no swap of coordinates survives
        let ws = WeightMultiset::from_weights(
            2,
            [
                (RationalVector::from_ints(&[1, 0]), 2),
                (RationalVector::from_ints(&[-1, 0]), 2),
                (RationalVector::from_ints(&[0, 1]), 1),
                (RationalVector::from_ints(&[0, -1]), 1),
            ],
        )
        .unwrap();
        let res = weight_multiset_stabilizer(&ws, false, &cfg()).unwrap();
        assert_eq!(res.group.order(), 4);
    }

    #[test]
    fn non_spanning_requires_restriction() {
        let ws = WeightMultiset::from_vectors(
            2,
            &[
                RationalVector::from_ints(&[1, 0]),
                RationalVector::from_ints(&[-1, 0]),
            ],
        )
        .unwrap();
        assert!(matches!(
            weight_multiset_stabilizer(&ws, false, &cfg()),
            Err(Error::WeightsNotSpanning { rank: 1, dim: 2 })
        ));
        let res = weight_multiset_stabilizer(&ws, true, &cfg()).unwrap();
        assert!(res.restricted_to_span);
        assert_eq!(res.group.order(), 2);
    }

    #[test]
    fn node_cap_is_enforced() {
        let z4 = Lattice::new((0..4).map(|i| RationalVector::unit(4, i)).collect()).unwrap();
        let tight = SearchConfig {
            node_cap: 10,
            ..SearchConfig::default()
        };
        assert!(matches!(
            lattice_aut_group(&z4, &tight),
            Err(Error::SearchCapExceeded { cap: 10 })
        ));
    }

    #[test]
    fn subgroup_index_examples() {
        let a2 = RootSystem::build(Family::A, 2).unwrap();
        let aut = a2.aut_group(DEFAULT_GROUP_CAP).unwrap();
        let w = a2.weyl_group(true, DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(subgroup_index(w.generators(), &aut, DEFAULT_GROUP_CAP).unwrap(), 2);
        assert_eq!(subgroup_index(aut.generators(), &aut, DEFAULT_GROUP_CAP).unwrap(), 1);
        assert_eq!(
            subgroup_index(aut.generators(), &w, DEFAULT_GROUP_CAP),
            Err(Error::NotInGroup)
        );
    }

    #[test]
    fn short_weights_sweep() {
        for (f, r, expected) in [
            (Family::A, 3, true),
            (Family::A, 5, true),
            (Family::A, 7, false),
            (Family::D, 4, true),
            (Family::D, 6, true),
        ] {
            let rs = RootSystem::build(f, r).unwrap();
            assert_eq!(weights_of_root_length_are_roots(&rs), expected, "{f}{r}");
        }
    }
}
