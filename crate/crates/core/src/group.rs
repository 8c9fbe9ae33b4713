//! Exact orthogonal maps and finite groups of them.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{RationalMatrix, RationalVector};

/// Default materialization cap for group closures.
pub const DEFAULT_GROUP_CAP: u64 = 1_000_000;

/// An orthogonal linear map of the ambient ε-space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct OrthogonalMap(RationalMatrix);

impl OrthogonalMap {
    /// Checks `Mᵀ M = I` exactly.
    pub fn new(matrix: RationalMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::ShapeMismatch("orthogonal map must be square".into()));
        }
        if !matrix.transpose().mul(&matrix)?.is_identity() {
            return Err(Error::Inconsistent("matrix does not preserve the form".into()));
        }
        Ok(OrthogonalMap(matrix))
    }

    pub(crate) fn new_unchecked(matrix: RationalMatrix) -> Self {
        debug_assert!(matrix.transpose().mul(&matrix).unwrap().is_identity());
        OrthogonalMap(matrix)
    }

    pub fn identity(dim: usize) -> Self {
        OrthogonalMap(RationalMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn apply(&self, v: &RationalVector) -> RationalVector {
        self.0.apply(v).expect("vector lives in the map's ambient space")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &OrthogonalMap) -> OrthogonalMap {
        OrthogonalMap(self.0.mul(&other.0).expect("maps on the same space"))
    }

    pub fn inverse(&self) -> OrthogonalMap {
        OrthogonalMap(self.0.transpose())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_identity()
    }
}

/// A finite group of orthogonal maps given by generators, optionally with
/// its full element list.
#[derive(Clone, Debug)]
pub struct FiniteOrthogonalGroup {
    dim: usize,
    generators: Vec<OrthogonalMap>,
    elements: Option<Vec<OrthogonalMap>>,
    order: u128,
}

impl FiniteOrthogonalGroup {
    /// Enumerates the closure of `generators`, failing once more than `cap`
    /// elements appear.
    pub fn generate(dim: usize, generators: Vec<OrthogonalMap>, cap: u64) -> Result<Self> {
        let elements = closure(dim, &generators, cap)?;
        Ok(FiniteOrthogonalGroup {
            dim,
            order: elements.len() as u128,
            generators,
            elements: Some(elements),
        })
    }

    /// A group known only by generators and an order computed elsewhere.
    pub fn from_order(dim: usize, generators: Vec<OrthogonalMap>, order: u128) -> Self {
        FiniteOrthogonalGroup {
            dim,
            generators,
            elements: None,
            order,
        }
    }

    /// Wraps an element list that is already known to be a group.
    pub(crate) fn from_elements(
        dim: usize,
        generators: Vec<OrthogonalMap>,
        mut elements: Vec<OrthogonalMap>,
    ) -> Self {
        elements.sort();
        elements.dedup();
        FiniteOrthogonalGroup {
            dim,
            order: elements.len() as u128,
            generators,
            elements: Some(elements),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn generators(&self) -> &[OrthogonalMap] {
        &self.generators
    }

    /// Elements in canonical (sorted) order, when materialized.
    pub fn elements(&self) -> Option<&[OrthogonalMap]> {
        self.elements.as_deref()
    }

    pub fn materialize(&self, cap: u64) -> Result<FiniteOrthogonalGroup> {
        if self.elements.is_some() {
            return Ok(self.clone());
        }
        if self.order > cap as u128 {
            return Err(Error::GroupTooLarge {
                order: self.order,
                cap,
            });
        }
        Self::generate(self.dim, self.generators.clone(), cap)
    }

    /// Membership test; requires the element list.
    pub fn contains(&self, g: &OrthogonalMap) -> Result<bool> {
        let elements = self
            .elements
            .as_ref()
            .ok_or_else(|| Error::Inconsistent("group is not materialized".into()))?;
        Ok(elements.binary_search(g).is_ok())
    }

    /// True when every generator of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &FiniteOrthogonalGroup) -> Result<bool> {
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact element-set equality of two materialized groups.
    pub fn same_elements(&self, other: &FiniteOrthogonalGroup) -> bool {
        match (&self.elements, &other.elements) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    /// Picks a small generating set from the element list.
    pub(crate) fn reduce_generators(&mut self, cap: u64) -> Result<()> {
        let Some(elements) = self.elements.clone() else {
            return Ok(());
        };
        let mut gens: Vec<OrthogonalMap> = Vec::new();
        let mut span: Vec<OrthogonalMap> = vec![OrthogonalMap::identity(self.dim)];
        for g in elements.iter().rev() {
            if span.len() as u128 == self.order {
                break;
            }
            if span.binary_search(g).is_ok() {
                continue;
            }
            gens.push(g.clone());
            span = closure(self.dim, &gens, cap)?;
        }
        self.generators = gens;
        Ok(())
    }
}

fn closure(dim: usize, generators: &[OrthogonalMap], cap: u64) -> Result<Vec<OrthogonalMap>> {
    let id = OrthogonalMap::identity(dim);
    let mut seen: HashSet<OrthogonalMap> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = g.compose(&x);
            if !seen.contains(&y) {
                if seen.len() as u64 >= cap {
                    return Err(Error::GroupTooLarge {
                        order: cap as u128 + 1,
                        cap,
                    });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}
