//! Irreducible root systems in Bourbaki ε-coordinates.
//!
//! Types A, G and E live in an ambient space larger than their rank (the
//! sum-zero hyperplane for A and G, the E8 space for E6 and E7). Everything
//! that acts on the Cartan space is extended by the identity on the
//! orthogonal complement of the span of the roots.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{FiniteOrthogonalGroup, OrthogonalMap};
use crate::linalg::{
    gram_matrix, ip, linear_map_from_images, orthogonal_complement, rat, Lattice, Rational,
    RationalMatrix, RationalVector,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        };
        write!(f, "{c}")
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "A" => Family::A,
            "B" => Family::B,
            "C" => Family::C,
            "D" => Family::D,
            "E" => Family::E,
            "F" => Family::F,
            "G" => Family::G,
            _ => return Err(Error::UnsupportedSystem(s.to_string())),
        })
    }
}

/// Is `(family, rank)` in the supported table?
pub fn is_supported(family: Family, rank: usize) -> bool {
    match family {
        Family::A => (1..=8).contains(&rank),
        Family::B => (2..=8).contains(&rank),
        Family::C => (3..=8).contains(&rank),
        Family::D => (4..=8).contains(&rank),
        Family::E => (6..=8).contains(&rank),
        Family::F => rank == 4,
        Family::G => rank == 2,
    }
}

/// Parses names like `"F4"` or `"a2"`.
pub fn parse_name(name: &str) -> Result<(Family, usize)> {
    let name = name.trim();
    let unsupported = || Error::UnsupportedSystem(name.to_string());
    let mut chars = name.chars();
    let family: Family = chars
        .next()
        .ok_or_else(unsupported)?
        .to_string()
        .parse()
        .map_err(|_| unsupported())?;
    let rank: usize = chars.as_str().parse().map_err(|_| unsupported())?;
    if !is_supported(family, rank) {
        return Err(unsupported());
    }
    Ok((family, rank))
}

/// Every supported system of rank at most `max_rank`, in table order.
pub fn systems_up_to_rank(max_rank: usize) -> Vec<(Family, usize)> {
    let families = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::E,
        Family::F,
        Family::G,
    ];
    families
        .into_iter()
        .flat_map(|f| (1..=max_rank.min(8)).map(move |r| (f, r)))
        .filter(|&(f, r)| is_supported(f, r))
        .collect()
}

/// Number of roots for the classical tables.
pub fn expected_root_count(family: Family, rank: usize) -> usize {
    match family {
        Family::A => rank * (rank + 1),
        Family::B | Family::C => 2 * rank * rank,
        Family::D => 2 * rank * (rank - 1),
        Family::E => match rank {
            6 => 72,
            7 => 126,
            _ => 240,
        },
        Family::F => 48,
        Family::G => 12,
    }
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    family: Family,
    rank: usize,
    ambient_dim: usize,
    simple_roots: Vec<RationalVector>,
    roots: Vec<RationalVector>,
    positive_roots: Vec<RationalVector>,
    fundamental_weights: Vec<RationalVector>,
    root_lattice: Lattice,
    weight_lattice: Lattice,
    complement: Vec<RationalVector>,
    rho: RationalVector,
    cartan: Vec<Vec<i64>>,
}

fn e(dim: usize, i: usize) -> RationalVector {
    RationalVector::unit(dim, i)
}

fn simple_roots_for(family: Family, l: usize) -> (usize, Vec<RationalVector>) {
    let diff = |dim: usize, i: usize, j: usize| &e(dim, i) - &e(dim, j);
    match family {
        Family::A => (l + 1, (0..l).map(|i| diff(l + 1, i, i + 1)).collect()),
        Family::B | Family::C | Family::D => {
            let mut s: Vec<_> = (0..l - 1).map(|i| diff(l, i, i + 1)).collect();
            s.push(match family {
                Family::B => e(l, l - 1),
                Family::C => e(l, l - 1).scale(&rat(2)),
                _ => &e(l, l - 2) + &e(l, l - 1),
            });
            (l, s)
        }
        Family::E => {
            let mut s = vec![
                RationalVector::from_fracs(&[1, -1, -1, -1, -1, -1, -1, 1], 2),
                RationalVector::from_ints(&[1, 1, 0, 0, 0, 0, 0, 0]),
            ];
            s.extend((0..6).map(|i| diff(8, i + 1, i)));
            s.truncate(l);
            (8, s)
        }
        Family::F => (
            4,
            vec![
                RationalVector::from_fracs(&[1, -1, -1, -1], 2),
                e(4, 3),
                diff(4, 2, 3),
                diff(4, 1, 2),
            ],
        ),
        Family::G => (
            3,
            vec![
                RationalVector::from_ints(&[1, -1, 0]),
                RationalVector::from_ints(&[-2, 1, 1]),
            ],
        ),
    }
}

/// `s_α(v) = v − 2(v,α)/(α,α)·α`.
pub fn reflect(alpha: &RationalVector, v: &RationalVector) -> Result<RationalVector> {
    if alpha.is_zero() {
        return Err(Error::ZeroRoot);
    }
    let c = rat(2) * alpha.dot(v)? / alpha.norm_sq();
    Ok(v - &alpha.scale(&c))
}

/// The reflection `s_α` as a matrix on the ambient space.
pub fn reflection_map(alpha: &RationalVector) -> Result<OrthogonalMap> {
    if alpha.is_zero() {
        return Err(Error::ZeroRoot);
    }
    let n = alpha.dim();
    let denom = alpha.norm_sq();
    let mut m = RationalMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j) - rat(2) * alpha.get(i) * alpha.get(j) / &denom;
            m.set(i, j, v);
        }
    }
    Ok(OrthogonalMap::new_unchecked(m))
}

impl RootSystem {
    pub fn build(family: Family, rank: usize) -> Result<RootSystem> {
        if !is_supported(family, rank) {
            return Err(Error::UnsupportedSystem(format!("{family}{rank}")));
        }
        let (ambient_dim, simple_roots) = simple_roots_for(family, rank);

        // all roots = W-orbit of the simple roots
        let mut seen: HashSet<RationalVector> = simple_roots.iter().cloned().collect();
        let mut queue: VecDeque<RationalVector> = simple_roots.iter().cloned().collect();
        while let Some(r) = queue.pop_front() {
            for a in &simple_roots {
                let s = reflect(a, &r)?;
                if seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
        let mut roots: Vec<_> = seen.into_iter().collect();
        roots.sort();

        let root_lattice = Lattice::new(simple_roots.clone())?;
        let positive_roots: Vec<_> = roots
            .iter()
            .filter(|r| {
                root_lattice
                    .coordinates(r)
                    .is_some_and(|c| c.iter().all(|x| !x.is_negative()))
            })
            .cloned()
            .collect();

        // (π_i, α_j∨) = δ_ij with π_i in the span of the simple roots
        let coroots: Vec<_> = simple_roots
            .iter()
            .map(|a| a.scale(&(rat(2) / a.norm_sq())))
            .collect();
        let mut pairing = RationalMatrix::zeros(rank, rank);
        for (k, a) in simple_roots.iter().enumerate() {
            for (j, c) in coroots.iter().enumerate() {
                pairing.set(k, j, ip(a, c));
            }
        }
        let coeffs = pairing.inverse()?;
        let fundamental_weights: Vec<_> = (0..rank)
            .map(|i| {
                let row: Vec<Rational> = (0..rank).map(|k| coeffs.get(i, k).clone()).collect();
                root_lattice.combine(&row)
            })
            .collect();
        let weight_lattice = Lattice::new(fundamental_weights.clone())?;

        let half = Rational::new(1.into(), 2.into());
        let rho = positive_roots
            .iter()
            .fold(RationalVector::zeros(ambient_dim), |acc, r| &acc + r)
            .scale(&half);

        let cartan = simple_roots
            .iter()
            .map(|a| {
                coroots
                    .iter()
                    .map(|c| {
                        let v = ip(a, c);
                        debug_assert!(v.is_integer());
                        i64::try_from(v.to_integer()).expect("small Cartan entry")
                    })
                    .collect()
            })
            .collect();

        let complement = orthogonal_complement(&simple_roots, ambient_dim);

        Ok(RootSystem {
            family,
            rank,
            ambient_dim,
            simple_roots,
            roots,
            positive_roots,
            fundamental_weights,
            root_lattice,
            weight_lattice,
            complement,
            rho,
            cartan,
        })
    }

    pub fn from_name(name: &str) -> Result<RootSystem> {
        let (f, r) = parse_name(name)?;
        Self::build(f, r)
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.family, self.rank)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn simple_roots(&self) -> &[RationalVector] {
        &self.simple_roots
    }

    /// All roots, sorted.
    pub fn roots(&self) -> &[RationalVector] {
        &self.roots
    }

    pub fn positive_roots(&self) -> &[RationalVector] {
        &self.positive_roots
    }

    pub fn fundamental_weights(&self) -> &[RationalVector] {
        &self.fundamental_weights
    }

    pub fn root_lattice(&self) -> &Lattice {
        &self.root_lattice
    }

    pub fn weight_lattice(&self) -> &Lattice {
        &self.weight_lattice
    }

    pub fn rho(&self) -> &RationalVector {
        &self.rho
    }

    /// Basis of the orthogonal complement of the span of the roots.
    pub fn complement(&self) -> &[RationalVector] {
        &self.complement
    }

    /// `cartan[i][j] = ⟨α_i, α_j∨⟩`.
    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn is_root(&self, v: &RationalVector) -> bool {
        self.roots.binary_search(v).is_ok()
    }

    pub fn in_span(&self, v: &RationalVector) -> bool {
        self.root_lattice.in_span(v)
    }

    /// Coordinates in the simple-root basis, for vectors in the span.
    pub fn simple_coordinates(&self, v: &RationalVector) -> Option<Vec<Rational>> {
        self.root_lattice.coordinates(v)
    }

    /// Sum of simple-root coordinates.
    pub fn height(&self, v: &RationalVector) -> Option<Rational> {
        self.simple_coordinates(v)
            .map(|c| c.into_iter().fold(Rational::zero(), |a, x| a + x))
    }

    pub fn highest_root(&self) -> RationalVector {
        self.positive_roots
            .iter()
            .max_by_key(|r| self.height(r).expect("roots lie in the span"))
            .expect("nonempty root system")
            .clone()
    }

    /// `⟨v, α_i∨⟩` for each simple root.
    pub fn dynkin_labels(&self, v: &RationalVector) -> Vec<Rational> {
        self.simple_roots
            .iter()
            .map(|a| rat(2) * ip(v, a) / a.norm_sq())
            .collect()
    }

    pub fn from_dynkin_labels(&self, labels: &[Rational]) -> Result<RationalVector> {
        if labels.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: labels.len(),
            });
        }
        Ok(self.weight_lattice.combine(labels))
    }

    pub fn is_dominant(&self, v: &RationalVector) -> bool {
        self.simple_roots.iter().all(|a| !ip(v, a).is_negative())
    }

    pub fn in_weight_lattice(&self, v: &RationalVector) -> bool {
        self.weight_lattice.contains(v)
    }

    pub fn reflect(&self, alpha: &RationalVector, v: &RationalVector) -> Result<RationalVector> {
        reflect(alpha, v)
    }

    pub fn simple_reflections(&self) -> Vec<OrthogonalMap> {
        self.simple_roots
            .iter()
            .map(|a| reflection_map(a).expect("simple roots are nonzero"))
            .collect()
    }

    /// Moves `v` into the closed dominant chamber by simple reflections.
    ///
    /// Returns the dominant representative `d` and a Weyl element `w` with
    /// `w·v = d`.
    pub fn dominant_form(&self, v: &RationalVector) -> (RationalVector, OrthogonalMap) {
        let (d, word) = self.dominant_word(v);
        let mut w = OrthogonalMap::identity(self.ambient_dim);
        for i in word {
            w = reflection_map(&self.simple_roots[i])
                .expect("nonzero")
                .compose(&w);
        }
        (d, w)
    }

    /// Dominant representative only, with the reflection word applied.
    pub(crate) fn dominant_word(&self, v: &RationalVector) -> (RationalVector, Vec<usize>) {
        let mut cur = v.clone();
        let mut word = Vec::new();
        'outer: loop {
            for (i, a) in self.simple_roots.iter().enumerate() {
                let d = ip(&cur, a);
                if d.is_negative() {
                    let c = rat(2) * d / a.norm_sq();
                    cur = &cur - &a.scale(&c);
                    word.push(i);
                    continue 'outer;
                }
            }
            return (cur, word);
        }
    }

    pub fn dominant_representative(&self, v: &RationalVector) -> RationalVector {
        self.dominant_word(v).0
    }

    /// W-orbit of a vector, sorted.
    pub fn orbit(&self, v: &RationalVector) -> Vec<RationalVector> {
        self.parabolic_orbit(v, &(0..self.rank).collect_vec())
    }

    fn parabolic_orbit(&self, v: &RationalVector, simple: &[usize]) -> Vec<RationalVector> {
        let mut seen: BTreeSet<RationalVector> = BTreeSet::new();
        seen.insert(v.clone());
        let mut queue = VecDeque::from([v.clone()]);
        while let Some(x) = queue.pop_front() {
            for &i in simple {
                let a = &self.simple_roots[i];
                let d = ip(&x, a);
                if d.is_zero() {
                    continue;
                }
                let y = &x - &a.scale(&(rat(2) * d / a.norm_sq()));
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// |W| via the chain of parabolic subgroups `W_J ⊃ W_{J∖{j}}`, where
    /// the quotient is the `W_J`-orbit of the fundamental weight `π_j`.
    pub fn weyl_order(&self) -> u128 {
        let mut order: u128 = 1;
        let mut active: Vec<usize> = (0..self.rank).collect();
        while let Some(&j) = active.last() {
            let orbit = self.parabolic_orbit(&self.fundamental_weights[j], &active);
            order *= orbit.len() as u128;
            active.pop();
        }
        order
    }

    /// The Weyl group, generated by simple reflections.
    pub fn weyl_group(&self, materialize: bool, cap: u64) -> Result<FiniteOrthogonalGroup> {
        let order = self.weyl_order();
        let gens = self.simple_reflections();
        if !materialize {
            return Ok(FiniteOrthogonalGroup::from_order(self.ambient_dim, gens, order));
        }
        if order > cap as u128 {
            return Err(Error::GroupTooLarge { order, cap });
        }
        FiniteOrthogonalGroup::generate(self.ambient_dim, gens, cap)
    }

    /// Permutations of the simple roots preserving the Cartan matrix,
    /// identity excluded.
    pub fn diagram_automorphisms(&self) -> Vec<Vec<usize>> {
        let n = self.rank;
        (0..n)
            .permutations(n)
            .filter(|p| p.iter().enumerate().any(|(i, &j)| i != j))
            .filter(|p| {
                (0..n).all(|i| (0..n).all(|j| self.cartan[p[i]][p[j]] == self.cartan[i][j]))
            })
            .collect()
    }

    /// The orthogonal map permuting simple roots by `perm` and fixing the
    /// complement of their span.
    pub fn diagram_map(&self, perm: &[usize]) -> Result<OrthogonalMap> {
        let mut domain = self.simple_roots.clone();
        domain.extend(self.complement.iter().cloned());
        let mut images: Vec<_> = perm.iter().map(|&j| self.simple_roots[j].clone()).collect();
        images.extend(self.complement.iter().cloned());
        OrthogonalMap::new(linear_map_from_images(&domain, &images)?)
    }

    /// Aut(Δ) = W extended by the diagram automorphisms.
    pub fn aut_group(&self, cap: u64) -> Result<FiniteOrthogonalGroup> {
        let diagrams = self.diagram_automorphisms();
        let order = self.weyl_order() * (diagrams.len() as u128 + 1);
        if order > cap as u128 {
            return Err(Error::GroupTooLarge { order, cap });
        }
        let mut gens = self.simple_reflections();
        for p in &diagrams {
            gens.push(self.diagram_map(p)?);
        }
        FiniteOrthogonalGroup::generate(self.ambient_dim, gens, cap)
    }

    /// Gram matrix of the simple roots.
    pub fn simple_gram(&self) -> RationalMatrix {
        gram_matrix(&self.simple_roots)
    }
}
