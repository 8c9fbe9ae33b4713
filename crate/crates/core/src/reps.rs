//! Weight systems of finite-dimensional representations.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::OrthogonalMap;
use crate::linalg::{format_rational, ip, rat, Rational, RationalVector};
use crate::roots::RootSystem;

/// Default cap on the dimension of a representation whose weights are
/// enumerated.
pub const DEFAULT_REP_CAP: u64 = 10_000;

/// A finite multiset of weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightMultiset {
    ambient_dim: usize,
    entries: BTreeMap<RationalVector, u64>,
}

#[derive(Serialize, Deserialize)]
struct WeightEntryJson {
    coords: RationalVector,
    mult: u64,
}

#[derive(Serialize, Deserialize)]
struct WeightMultisetJson {
    ambient_dim: usize,
    weights: Vec<WeightEntryJson>,
}

impl WeightMultiset {
    pub fn new(ambient_dim: usize) -> Self {
        WeightMultiset {
            ambient_dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_weights(
        ambient_dim: usize,
        weights: impl IntoIterator<Item = (RationalVector, u64)>,
    ) -> Result<Self> {
        let mut ws = Self::new(ambient_dim);
        for (v, m) in weights {
            ws.insert(v, m)?;
        }
        Ok(ws)
    }

    /// Each vector with multiplicity one (repeats accumulate).
    pub fn from_vectors(ambient_dim: usize, vectors: &[RationalVector]) -> Result<Self> {
        Self::from_weights(ambient_dim, vectors.iter().map(|v| (v.clone(), 1)))
    }

    pub fn insert(&mut self, weight: RationalVector, mult: u64) -> Result<()> {
        if weight.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: weight.dim(),
            });
        }
        if mult > 0 {
            *self.entries.entry(weight).or_insert(0) += mult;
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Total dimension: sum of multiplicities.
    pub fn dim(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<RationalVector, u64> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RationalVector, u64)> {
        self.entries.iter().map(|(v, &m)| (v, m))
    }

    pub fn multiplicity(&self, v: &RationalVector) -> u64 {
        self.entries.get(v).copied().unwrap_or(0)
    }

    pub fn zero_multiplicity(&self) -> u64 {
        self.multiplicity(&RationalVector::zeros(self.ambient_dim))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (&RationalVector, u64)> {
        self.iter().filter(|(v, _)| !v.is_zero())
    }

    /// Image under a linear map of the ambient space.
    pub fn map(&self, g: &OrthogonalMap) -> WeightMultiset {
        let mut out = Self::new(self.ambient_dim);
        for (v, m) in self.iter() {
            *out.entries.entry(g.apply(v)).or_insert(0) += m;
        }
        out
    }

    pub fn is_stable_under(&self, g: &OrthogonalMap) -> bool {
        self.map(g) == *self
    }

    pub fn negated(&self) -> WeightMultiset {
        WeightMultiset {
            ambient_dim: self.ambient_dim,
            entries: self.entries.iter().map(|(v, &m)| (-v, m)).collect(),
        }
    }

    /// Pads every weight into a larger coordinate space at `offset`.
    pub fn padded(&self, offset: usize, total: usize) -> WeightMultiset {
        WeightMultiset {
            ambient_dim: total,
            entries: self
                .entries
                .iter()
                .map(|(v, &m)| (v.padded(offset, total), m))
                .collect(),
        }
    }

    /// Removes `count` copies of `other`; fails if a multiplicity would go
    /// negative.
    pub fn subtract(&mut self, other: &WeightMultiset, count: u64) -> Result<()> {
        for (v, m) in other.iter() {
            let need = m * count;
            match self.entries.get_mut(v) {
                Some(have) if *have >= need => {
                    *have -= need;
                    if *have == 0 {
                        self.entries.remove(v);
                    }
                }
                _ => {
                    return Err(Error::NotACharacter {
                        weight: v.to_string(),
                    })
                }
            }
        }
        Ok(())
    }

    /// `Σ mult · ⟨λ, x⟩ⁿ`, the trace of the n-th power of a diagonal element.
    pub fn power_sum(&self, x: &RationalVector, n: u32) -> Result<Rational> {
        let mut total = Rational::zero();
        for (v, m) in self.iter() {
            total += pow(&v.dot(x)?, n) * rat(m as i64);
        }
        Ok(total)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = WeightMultisetJson {
            ambient_dim: self.ambient_dim,
            weights: self
                .iter()
                .map(|(v, m)| WeightEntryJson {
                    coords: v.clone(),
                    mult: m,
                })
                .collect(),
        };
        serde_json::to_value(raw).expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: WeightMultisetJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_weights(raw.ambient_dim, raw.weights.into_iter().map(|w| (w.coords, w.mult)))
    }
}

impl fmt::Display for WeightMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .iter()
            .map(|(v, m)| if m == 1 { v.to_string() } else { format!("{v}×{m}") })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn pow(x: &Rational, n: u32) -> Rational {
    (0..n).fold(Rational::one(), |acc, _| acc * x)
}

/// Multiplicity-wise union.
pub fn direct_sum(parts: &[WeightMultiset]) -> Result<WeightMultiset> {
    let Some(first) = parts.first() else {
        return Err(Error::Inconsistent("direct sum of an empty list".into()));
    };
    let mut out = WeightMultiset::new(first.ambient_dim);
    for p in parts {
        if p.ambient_dim != out.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: out.ambient_dim,
                found: p.ambient_dim,
            });
        }
        for (v, m) in p.iter() {
            out.insert(v.clone(), m)?;
        }
    }
    Ok(out)
}

/// Is the multiset stable under `λ ↦ −λ`?
pub fn self_dual(ws: &WeightMultiset) -> bool {
    ws.negated() == *ws
}

/// Translates every weight by `m·χ`.
pub fn shift_by_character(
    ws: &WeightMultiset,
    chi: &RationalVector,
    m: i64,
) -> Result<WeightMultiset> {
    if chi.dim() != ws.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: ws.ambient_dim,
            found: chi.dim(),
        });
    }
    let shift = chi.scale(&rat(m));
    WeightMultiset::from_weights(ws.ambient_dim, ws.iter().map(|(v, k)| (v + &shift, k)))
}

/// Right-hand side of the binomial expansion
/// `tr(ρ_m(x)ⁿ) = Σ_{i=0}^{n} C(n,i) mⁿ⁻ⁱ χ(x)ⁿ⁻ⁱ tr(ρ(x)ⁱ)` for
/// `ρ_m = ρ ⊗ mχ`.
pub fn shifted_power_sum_expansion(
    ws: &WeightMultiset,
    chi: &RationalVector,
    m: i64,
    x: &RationalVector,
    n: u32,
) -> Result<Rational> {
    let chi_x = chi.dot(x)?;
    let mut total = Rational::zero();
    let mut binom = BigInt::one();
    for i in 0..=n {
        let term = Rational::from_integer(binom.clone())
            * pow(&rat(m), n - i)
            * pow(&chi_x, n - i)
            * ws.power_sum(x, i)?;
        total += term;
        binom = binom * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Ok(total)
}

/// A highest weight for a root system.
#[derive(Clone, Debug)]
pub struct IrrepLabel {
    system: Arc<RootSystem>,
    highest_weight: RationalVector,
}

impl PartialEq for IrrepLabel {
    fn eq(&self, other: &Self) -> bool {
        self.system.name() == other.system.name() && self.highest_weight == other.highest_weight
    }
}

impl Eq for IrrepLabel {}

impl IrrepLabel {
    pub fn new(system: Arc<RootSystem>, highest_weight: RationalVector) -> Result<Self> {
        if highest_weight.dim() != system.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: system.ambient_dim(),
                found: highest_weight.dim(),
            });
        }
        if !system.in_weight_lattice(&highest_weight) {
            return Err(Error::NotInWeightLattice);
        }
        if !system.is_dominant(&highest_weight) {
            return Err(Error::NotDominant);
        }
        Ok(IrrepLabel {
            system,
            highest_weight,
        })
    }

    pub fn trivial(system: Arc<RootSystem>) -> Self {
        let zero = RationalVector::zeros(system.ambient_dim());
        IrrepLabel {
            system,
            highest_weight: zero,
        }
    }

    /// The representation with highest weight `π_index` (0-based).
    pub fn fundamental(system: Arc<RootSystem>, index: usize) -> Result<Self> {
        let w = system
            .fundamental_weights()
            .get(index)
            .cloned()
            .ok_or(Error::IndexOutOfRange {
                index: index + 1,
                bound: system.rank(),
            })?;
        Self::new(system, w)
    }

    /// The adjoint representation (highest weight = highest root).
    pub fn adjoint(system: Arc<RootSystem>) -> Self {
        let theta = system.highest_root();
        IrrepLabel {
            system,
            highest_weight: theta,
        }
    }

    pub fn from_dynkin_labels(system: Arc<RootSystem>, labels: &[i64]) -> Result<Self> {
        let labels: Vec<Rational> = labels.iter().map(|&a| rat(a)).collect();
        let w = system.from_dynkin_labels(&labels)?;
        Self::new(system, w)
    }

    pub fn system(&self) -> &Arc<RootSystem> {
        &self.system
    }

    pub fn highest_weight(&self) -> &RationalVector {
        &self.highest_weight
    }

    pub fn dynkin_labels(&self) -> Vec<Rational> {
        self.system.dynkin_labels(&self.highest_weight)
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.dynkin_labels().iter().map(format_rational).collect();
        write!(f, "{}[{}]", self.system.name(), labels.join(","))
    }
}

/// Weyl dimension formula `Π_{α>0} (λ+ρ, α)/(ρ, α)`.
pub fn weyl_dim(label: &IrrepLabel) -> Result<u128> {
    weyl_dimension(&label.system, &label.highest_weight)
}

/// Weyl dimension formula for a raw highest weight.
pub fn weyl_dimension(rs: &RootSystem, highest_weight: &RationalVector) -> Result<u128> {
    if !rs.is_dominant(highest_weight) {
        return Err(Error::NotDominant);
    }
    if !rs.in_weight_lattice(highest_weight) {
        return Err(Error::NotInWeightLattice);
    }
    let shifted = highest_weight + rs.rho();
    let mut d = Rational::one();
    for a in rs.positive_roots() {
        d *= ip(&shifted, a) / ip(rs.rho(), a);
    }
    if !d.is_integer() || d.is_negative() {
        return Err(Error::Inconsistent(format!("non-integral dimension {d}")));
    }
    d.to_integer()
        .to_u128()
        .ok_or_else(|| Error::Inconsistent("dimension overflow".into()))
}

/// Dominant weights of `V(λ)` with their multiplicities, from the
/// Freudenthal recursion, in order of decreasing height.
pub fn dominant_multiplicities(label: &IrrepLabel) -> Result<Vec<(RationalVector, u64)>> {
    let rs = &label.system;
    let hw = &label.highest_weight;

    let mut seen: BTreeSet<RationalVector> = BTreeSet::from([hw.clone()]);
    let mut queue = VecDeque::from([hw.clone()]);
    while let Some(mu) = queue.pop_front() {
        for a in rs.positive_roots() {
            let nu = &mu - a;
            if rs.is_dominant(&nu) && seen.insert(nu.clone()) {
                queue.push_back(nu);
            }
        }
    }
    let mut ordered: Vec<(Rational, RationalVector)> = seen
        .into_iter()
        .map(|mu| {
            let depth = rs.height(&(hw - &mu)).expect("weights differ by roots");
            (depth, mu)
        })
        .collect();
    ordered.sort();

    let rho = rs.rho();
    let top = {
        let s = hw + rho;
        ip(&s, &s)
    };
    let mut mult: HashMap<RationalVector, u64> = HashMap::new();
    let mut out = Vec::with_capacity(ordered.len());
    for (depth, mu) in ordered {
        let m = if depth.is_zero() {
            1
        } else {
            let mut num = Rational::zero();
            for a in rs.positive_roots() {
                let mut nu = &mu + a;
                loop {
                    let d = rs.dominant_representative(&nu);
                    let Some(&k) = mult.get(&d) else { break };
                    num += rat(k as i64) * ip(&nu, a);
                    nu = &nu + a;
                }
            }
            let s = &mu + rho;
            let den = &top - ip(&s, &s);
            let m = rat(2) * num / den;
            if !m.is_integer() || m.is_negative() {
                return Err(Error::Inconsistent(format!(
                    "non-integral multiplicity {m} at {mu}"
                )));
            }
            m.to_integer().to_u64().expect("small multiplicity")
        };
        mult.insert(mu.clone(), m);
        out.push((mu, m));
    }
    Ok(out)
}

/// Full weight multiset of `V(λ)`: the Weyl orbits of the dominant weights.
pub fn freudenthal_weights(label: &IrrepLabel, cap: u64) -> Result<WeightMultiset> {
    let dim = weyl_dim(label)?;
    if dim > cap as u128 {
        return Err(Error::RepresentationTooLarge { dim, cap });
    }
    let rs = &label.system;
    let mut ws = WeightMultiset::new(rs.ambient_dim());
    for (mu, m) in dominant_multiplicities(label)? {
        for w in rs.orbit(&mu) {
            ws.insert(w, m)?;
        }
    }
    Ok(ws)
}

/// Memo table for weight systems, keyed by system name and highest weight.
#[derive(Debug, Default)]
pub struct WeightCache {
    cap: u64,
    map: RwLock<HashMap<(String, RationalVector), Arc<WeightMultiset>>>,
}

impl WeightCache {
    pub fn new(cap: u64) -> Self {
        WeightCache {
            cap,
            map: RwLock::new(HashMap::new()),
        }
    }

    pub fn weights(&self, label: &IrrepLabel) -> Result<Arc<WeightMultiset>> {
        let key = (label.system.name(), label.highest_weight.clone());
        if let Some(ws) = self.map.read().expect("cache lock").get(&key) {
            return Ok(ws.clone());
        }
        let ws = Arc::new(freudenthal_weights(label, self.cap)?);
        self.map
            .write()
            .expect("cache lock")
            .entry(key)
            .or_insert_with(|| ws.clone());
        Ok(ws)
    }
}

/// Splits a W-stable weight multiset into irreducible characters by
/// repeatedly peeling off the representation of a maximal dominant weight.
pub fn decompose(ws: &WeightMultiset, system: &Arc<RootSystem>) -> Result<Vec<(IrrepLabel, u64)>> {
    decompose_with(ws, system, &WeightCache::new(DEFAULT_REP_CAP))
}

pub fn decompose_with(
    ws: &WeightMultiset,
    system: &Arc<RootSystem>,
    cache: &WeightCache,
) -> Result<Vec<(IrrepLabel, u64)>> {
    if ws.ambient_dim() != system.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: system.ambient_dim(),
            found: ws.ambient_dim(),
        });
    }
    let mut remaining = ws.clone();
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let mut best: Option<(Rational, RationalVector)> = None;
        for (v, _) in remaining.iter() {
            if !system.is_dominant(v) {
                continue;
            }
            let h = system.height(v).ok_or(Error::NotInWeightLattice)?;
            let key = (h, v.clone());
            if best.as_ref().is_none_or(|b| key > *b) {
                best = Some(key);
            }
        }
        let Some((_, hw)) = best else {
            let (v, _) = remaining.iter().next().expect("nonempty");
            return Err(Error::NotACharacter {
                weight: v.to_string(),
            });
        };
        let count = remaining.multiplicity(&hw);
        let label = IrrepLabel::new(system.clone(), hw)?;
        let irrep = cache.weights(&label)?;
        remaining.subtract(&irrep, count)?;
        out.push((label, count));
    }
    Ok(out)
}

/// Splits the spectrum of `ρ₁ ⊕ n·ρ₂` (eigenvalue ↦ multiplicity) into the
/// spectra of `ρ₁` and `ρ₂`: multiplicity `m` contributes `m mod n` to the
/// first and `⌊m/n⌋` to the second. Valid whenever `dim ρ₁ < n`.
pub fn disentangle(
    spectrum: &BTreeMap<Rational, u64>,
    n: u64,
) -> Result<(BTreeMap<Rational, u64>, BTreeMap<Rational, u64>)> {
    if n == 0 {
        return Err(Error::Inconsistent("n must be positive".into()));
    }
    let mut first = BTreeMap::new();
    let mut second = BTreeMap::new();
    for (value, &m) in spectrum {
        if m % n > 0 {
            first.insert(value.clone(), m % n);
        }
        if m / n > 0 {
            second.insert(value.clone(), m / n);
        }
    }
    Ok((first, second))
}

/// Multiplicities `n₁ = 1`, `nᵢ = dim Ũᵢ₋₁ + 1` with
/// `Ũᵢ = Ũᵢ₋₁ ⊕ nᵢUᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cascade {
    pub multiplicities: Vec<u64>,
    pub total_dim: u64,
}

pub fn cascade_multiplicities(dims: &[u64]) -> Result<Cascade> {
    let Some((&first, rest)) = dims.split_first() else {
        return Err(Error::Inconsistent("empty dimension list".into()));
    };
    let mut multiplicities = vec![1];
    let mut total = first;
    for &d in rest {
        let n = total
            .checked_add(1)
            .ok_or_else(|| Error::CapExceeded("cascade dimension overflow".into()))?;
        multiplicities.push(n);
        total = n
            .checked_mul(d)
            .and_then(|x| x.checked_add(total))
            .ok_or_else(|| Error::CapExceeded("cascade dimension overflow".into()))?;
    }
    Ok(Cascade {
        multiplicities,
        total_dim: total,
    })
}
