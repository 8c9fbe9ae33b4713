//! Toral embeddings, branching, and equivalence tests.
//!
//! An embedding is recorded purely by where the source coroots land in the
//! target Cartan space. A coroot image `v` acts on a target weight `λ`
//! through the ambient scalar product `⟨λ, v⟩`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteOrthogonalGroup, OrthogonalMap};
use crate::lattice_auts::{weight_multiset_stabilizer, SearchConfig};
use crate::linalg::{ip, rank_of, rat, Rational, RationalMatrix, RationalVector};
use crate::reps::{
    decompose, direct_sum, freudenthal_weights, self_dual, weyl_dim, IrrepLabel, WeightMultiset,
    DEFAULT_REP_CAP,
};
use crate::roots::{Family, RootSystem};

/// What is being embedded: a semisimple algebra (by its root system) or a
/// bare torus of some rank.
#[derive(Clone, Debug)]
pub enum EmbeddingSource {
    System(Arc<RootSystem>),
    Torus(usize),
}

impl EmbeddingSource {
    pub fn rank(&self) -> usize {
        match self {
            EmbeddingSource::System(rs) => rs.rank(),
            EmbeddingSource::Torus(r) => *r,
        }
    }

    pub fn name(&self) -> String {
        match self {
            EmbeddingSource::System(rs) => rs.name(),
            EmbeddingSource::Torus(r) => format!("T{r}"),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        if let Some(r) = name.strip_prefix('T').or_else(|| name.strip_prefix('t')) {
            let r: usize = r
                .parse()
                .map_err(|_| Error::Parse(format!("bad torus name {name:?}")))?;
            if r == 0 {
                return Err(Error::Parse("torus of rank zero".into()));
            }
            return Ok(EmbeddingSource::Torus(r));
        }
        Ok(EmbeddingSource::System(Arc::new(RootSystem::from_name(name)?)))
    }
}

#[derive(Clone, Debug)]
pub struct ToralEmbedding {
    source: EmbeddingSource,
    target: Arc<RootSystem>,
    coroot_images: Vec<RationalVector>,
}

#[derive(Serialize, Deserialize)]
struct ToralEmbeddingJson {
    source: String,
    target: String,
    coroot_images: Vec<RationalVector>,
}

/// Named embeddings available on the command line.
pub const PRESETS: &[&str] = &["f4-sl3-rho2", "so9-sl3-adjoint"];

impl ToralEmbedding {
    pub fn new(
        source: EmbeddingSource,
        target: Arc<RootSystem>,
        coroot_images: Vec<RationalVector>,
    ) -> Result<Self> {
        if coroot_images.len() != source.rank() {
            return Err(Error::DimensionMismatch {
                expected: source.rank(),
                found: coroot_images.len(),
            });
        }
        for v in &coroot_images {
            if v.dim() != target.ambient_dim() {
                return Err(Error::DimensionMismatch {
                    expected: target.ambient_dim(),
                    found: v.dim(),
                });
            }
            if !target.in_span(v) {
                return Err(Error::Inconsistent(format!(
                    "coroot image {v} is outside the Cartan space of {}",
                    target.name()
                )));
            }
        }
        if rank_of(&coroot_images) < coroot_images.len() {
            return Err(Error::LinearlyDependent);
        }
        if matches!(source, EmbeddingSource::System(_)) {
            for w in target.fundamental_weights() {
                for v in &coroot_images {
                    if !ip(w, v).is_integer() {
                        return Err(Error::Inconsistent(format!(
                            "weight {w} pulls back to a non-integral value on {v}"
                        )));
                    }
                }
            }
        }
        Ok(ToralEmbedding {
            source,
            target,
            coroot_images,
        })
    }

    pub fn source(&self) -> &EmbeddingSource {
        &self.source
    }

    pub fn target(&self) -> &Arc<RootSystem> {
        &self.target
    }

    pub fn coroot_images(&self) -> &[RationalVector] {
        &self.coroot_images
    }

    /// Same source, images moved by `g`.
    pub fn transformed(&self, g: &OrthogonalMap) -> Result<ToralEmbedding> {
        let images = self.coroot_images.iter().map(|v| g.apply(v)).collect();
        ToralEmbedding::new(self.source.clone(), self.target.clone(), images)
    }

    pub fn preset(name: &str) -> Result<ToralEmbedding> {
        let (images, target): (&[[i64; 4]], &str) = match name {
            "f4-sl3-rho2" => (&[[1, 2, 0, 1], [1, -1, 0, -2]], "F4"),
            "so9-sl3-adjoint" => (&[[2, -1, 1, 0], [-1, 2, 1, 0]], "F4"),
            _ => return Err(Error::Parse(format!("unknown embedding preset {name:?}"))),
        };
        ToralEmbedding::new(
            EmbeddingSource::parse("A2")?,
            Arc::new(RootSystem::from_name(target)?),
            images.iter().map(|v| RationalVector::from_ints(v)).collect(),
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ToralEmbeddingJson {
            source: self.source.name(),
            target: self.target.name(),
            coroot_images: self.coroot_images.clone(),
        })
        .expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<ToralEmbedding> {
        let raw: ToralEmbeddingJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        ToralEmbedding::new(
            EmbeddingSource::parse(&raw.source)?,
            Arc::new(RootSystem::from_name(&raw.target)?),
            raw.coroot_images,
        )
    }

    fn check_compatible(&self, other: &ToralEmbedding) -> Result<()> {
        if self.source.name() != other.source.name() || self.target.name() != other.target.name()
        {
            return Err(Error::Inconsistent(format!(
                "embeddings {}→{} and {}→{} are not comparable",
                self.source.name(),
                self.target.name(),
                other.source.name(),
                other.target.name()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ToralEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let images: Vec<String> = self.coroot_images.iter().map(ToString::to_string).collect();
        write!(
            f,
            "{} → {}: [{}]",
            self.source.name(),
            self.target.name(),
            images.join(", ")
        )
    }
}

/// Restricts target weights to the source torus: `λ ↦ (⟨λ, v₁⟩, …, ⟨λ, v_r⟩)`.
pub fn pullback(emb: &ToralEmbedding, ws: &WeightMultiset) -> Result<WeightMultiset> {
    if ws.ambient_dim() != emb.target.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: emb.target.ambient_dim(),
            found: ws.ambient_dim(),
        });
    }
    let mut out = WeightMultiset::new(emb.coroot_images.len());
    for (w, m) in ws.iter() {
        let values = emb.coroot_images.iter().map(|v| ip(w, v)).collect();
        out.insert(RationalVector::new(values), m)?;
    }
    Ok(out)
}

/// Pullback expressed as source weights in ε-coordinates (the pulled-back
/// values are Dynkin labels of the source).
pub fn pullback_to_source(emb: &ToralEmbedding, ws: &WeightMultiset) -> Result<WeightMultiset> {
    let EmbeddingSource::System(source) = &emb.source else {
        return Err(Error::Inconsistent("torus source has no weight coordinates".into()));
    };
    let labels = pullback(emb, ws)?;
    let mut out = WeightMultiset::new(source.ambient_dim());
    for (l, m) in labels.iter() {
        out.insert(source.from_dynkin_labels(l.coords())?, m)?;
    }
    Ok(out)
}

/// Branching: decomposes the restriction of `ws` to the source algebra.
pub fn branch(emb: &ToralEmbedding, ws: &WeightMultiset) -> Result<Vec<(IrrepLabel, u64)>> {
    let EmbeddingSource::System(source) = &emb.source else {
        return Err(Error::Inconsistent("torus source cannot be decomposed".into()));
    };
    decompose(&pullback_to_source(emb, ws)?, source)
}

/// Equal pulled-back weight multisets for the given probe representation.
pub fn linearly_equivalent(
    e1: &ToralEmbedding,
    e2: &ToralEmbedding,
    probe: &WeightMultiset,
) -> Result<bool> {
    e1.check_compatible(e2)?;
    Ok(pullback(e1, probe)? == pullback(e2, probe)?)
}

/// Searches `group` for `g` with `g·v¹ᵢ = v²ᵢ` for every coroot image.
pub fn weyl_conjugate(
    e1: &ToralEmbedding,
    e2: &ToralEmbedding,
    group: &FiniteOrthogonalGroup,
    cap: u64,
) -> Result<Option<OrthogonalMap>> {
    e1.check_compatible(e2)?;
    let maps = |g: &OrthogonalMap| {
        e1.coroot_images
            .iter()
            .zip(&e2.coroot_images)
            .all(|(a, b)| g.apply(a) == *b)
    };
    let id = OrthogonalMap::identity(group.dim());
    if maps(&id) {
        return Ok(Some(id));
    }
    let group = group.materialize(cap)?;
    Ok(group
        .elements()
        .expect("materialized")
        .iter()
        .find(|g| maps(g))
        .cloned())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirationalityVerdict {
    pub is_birational: bool,
    pub index: u128,
    pub stabilizer_order: u128,
}

/// Compares the stabilizer of a representation's weights with the acting
/// group: the quotient map on the Cartan is birational iff they coincide.
pub fn birationality_test(
    rep_weights: &WeightMultiset,
    system: &RootSystem,
    acting: &FiniteOrthogonalGroup,
    cfg: &SearchConfig,
) -> Result<BirationalityVerdict> {
    if rep_weights.ambient_dim() != system.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: system.ambient_dim(),
            found: rep_weights.ambient_dim(),
        });
    }
    let stab = weight_multiset_stabilizer(rep_weights, true, cfg)?;
    if !acting.is_subgroup_of(&stab.group)? {
        return Err(Error::Inconsistent(
            "acting group does not stabilize the weights".into(),
        ));
    }
    let s = stab.group.order();
    Ok(BirationalityVerdict {
        is_birational: s == acting.order(),
        index: s / acting.order(),
        stabilizer_order: s,
    })
}

/// One irreducible summand of a representation of a reductive source,
/// with weights already placed in the source's full Cartan coordinates.
#[derive(Clone, Debug)]
pub struct Component {
    pub name: String,
    pub weights: WeightMultiset,
}

impl Component {
    /// An irreducible representation of one simple factor, padded into a
    /// Cartan of dimension `total` starting at coordinate `offset`.
    pub fn irrep(label: &IrrepLabel, offset: usize, total: usize) -> Result<Component> {
        let ws = freudenthal_weights(label, DEFAULT_REP_CAP)?;
        Ok(Component {
            name: label.to_string(),
            weights: ws.padded(offset, total),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prop91Verdict {
    pub has_zero_weight: bool,
    pub all_even: bool,
    pub verdict: bool,
}

/// The two sufficient conditions for `ρ` and `θ∘ρ` to be linearly
/// equivalent but not equivalent inside `so_2n`: the sum has a zero weight,
/// and every irreducible summand has even dimension.
pub fn prop91_check(components: &[Component]) -> Result<Prop91Verdict> {
    let parts: Vec<WeightMultiset> = components.iter().map(|c| c.weights.clone()).collect();
    let sum = direct_sum(&parts)?;
    let has_zero_weight = sum.zero_multiplicity() > 0;
    let all_even = components.iter().all(|c| c.weights.dim() % 2 == 0);
    Ok(Prop91Verdict {
        has_zero_weight,
        all_even,
        verdict: has_zero_weight && all_even,
    })
}

/// Tautological representation of `so_4` (weights ±e₁, ±e₂ on its rank-2
/// Cartan), padded.
pub fn so4_tautological(offset: usize, total: usize) -> Result<Component> {
    let ws = WeightMultiset::from_vectors(
        2,
        &[
            RationalVector::from_ints(&[1, 0]),
            RationalVector::from_ints(&[-1, 0]),
            RationalVector::from_ints(&[0, 1]),
            RationalVector::from_ints(&[0, -1]),
        ],
    )?;
    Ok(Component {
        name: "so4 tautological".into(),
        weights: ws.padded(offset, total),
    })
}

/// `ad(sl₃) ⊕ (k−4)·ρ₀` for `f = sl₃ ⊕ so₄^(k−4)`.
pub fn sl3_construction(k: usize) -> Result<Vec<Component>> {
    let copies = k.checked_sub(4).ok_or(Error::IndexOutOfRange { index: k, bound: 4 })?;
    let a2 = Arc::new(RootSystem::build(Family::A, 2)?);
    let total = 3 + 2 * copies;
    let mut out = vec![Component::irrep(&IrrepLabel::adjoint(a2), 0, total)?];
    for c in 0..copies {
        out.push(so4_tautological(3 + 2 * c, total)?);
    }
    Ok(out)
}

/// `Λ²(so₅) ⊕ (k−4)·ρ₀` for `f = so₅ ⊕ so₄^(k−4)`; `Λ²` of the 5-dimensional
/// representation is the adjoint of B₂.
pub fn so5_construction(k: usize) -> Result<Vec<Component>> {
    let copies = k.checked_sub(4).ok_or(Error::IndexOutOfRange { index: k, bound: 4 })?;
    let b2 = Arc::new(RootSystem::build(Family::B, 2)?);
    let total = 2 + 2 * copies;
    let mut out = vec![Component::irrep(&IrrepLabel::adjoint(b2), 0, total)?];
    for c in 0..copies {
        out.push(so4_tautological(2 + 2 * c, total)?);
    }
    Ok(out)
}

/// The toral embedding of `source` into `D_n` (or `B_n`) whose tautological
/// representation has weights `±paired[j]`: the j-th coordinate of the image
/// of `α_i∨` is `⟨paired[j], α_i∨⟩`.
pub fn orthogonal_realization(
    source: Arc<RootSystem>,
    paired: &[RationalVector],
    target: Arc<RootSystem>,
) -> Result<ToralEmbedding> {
    if paired.len() != target.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: target.ambient_dim(),
            found: paired.len(),
        });
    }
    let images = source
        .simple_roots()
        .iter()
        .map(|a| {
            let coroot = a.scale(&(rat(2) / a.norm_sq()));
            RationalVector::new(paired.iter().map(|mu| ip(mu, &coroot)).collect())
        })
        .collect();
    ToralEmbedding::new(EmbeddingSource::System(source), target, images)
}

/// The outer involution of `D_n` fixed as "negate the last coordinate".
pub fn d_outer_involution(n: usize) -> OrthogonalMap {
    let mut m = RationalMatrix::identity(n);
    m.set(n - 1, n - 1, rat(-1));
    OrthogonalMap::new(m).expect("diagonal ±1 is orthogonal")
}

/// Weights `±e_j` of the tautological representation of `so_2n`.
pub fn d_tautological(n: usize) -> WeightMultiset {
    let mut ws = WeightMultiset::new(n);
    for j in 0..n {
        let e = RationalVector::unit(n, j);
        ws.insert(-&e, 1).expect("dimension");
        ws.insert(e, 1).expect("dimension");
    }
    ws
}

/// `ad(sl₃) → so₈` with `e₁ ↔ 0`, `e₂ ↔ α₁`, `e₃ ↔ α₂`, `e₄ ↔ α₁+α₂`.
pub fn sl3_in_d4() -> Result<ToralEmbedding> {
    let a2 = Arc::new(RootSystem::build(Family::A, 2)?);
    let s = a2.simple_roots();
    let paired = [
        RationalVector::zeros(3),
        s[0].clone(),
        s[1].clone(),
        &s[0] + &s[1],
    ];
    orthogonal_realization(a2, &paired, Arc::new(RootSystem::build(Family::D, 4)?))
}

/// `Λ²(so₅) → so₁₀` with `e₁ ↔ 0` and the remaining coordinates paired with
/// the positive roots of B₂.
pub fn so5_in_d5() -> Result<ToralEmbedding> {
    let b2 = Arc::new(RootSystem::build(Family::B, 2)?);
    let paired = [
        RationalVector::zeros(2),
        RationalVector::from_ints(&[1, 1]),
        RationalVector::from_ints(&[1, -1]),
        RationalVector::from_ints(&[1, 0]),
        RationalVector::from_ints(&[0, 1]),
    ];
    orthogonal_realization(b2, &paired, Arc::new(RootSystem::build(Family::D, 5)?))
}

/// One row of the table of non-regular subalgebras of `so₉`.
#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub algebra: &'static str,
    pub representation: &'static str,
    pub summand_dims: Vec<u128>,
    pub total_dim: u128,
    pub self_dual: bool,
}

impl TableRow {
    pub fn passes(&self) -> bool {
        self.total_dim == 9 && self.self_dual
    }
}

/// Recomputes dimensions and self-duality of every row.
pub fn verify_so9_table() -> Result<Vec<TableRow>> {
    // (algebra, display, system, summands as fundamental indices; None = trivial)
    type Row = (&'static str, &'static str, Family, usize, &'static [Option<usize>]);
    let rows: [Row; 5] = [
        ("sl4", "R(π2) ⊕ 3R(0)", Family::A, 3, &[Some(1), None, None, None]),
        ("so7", "R(π3) ⊕ R(0)", Family::B, 3, &[Some(2), None]),
        ("G2", "R(π1) ⊕ 2R(0)", Family::G, 2, &[Some(0), None, None]),
        ("so5", "R(π2) ⊕ R(π2) ⊕ R(0)", Family::B, 2, &[Some(1), Some(1), None]),
        ("sl3", "ad ⊕ R(0)", Family::A, 2, &[Some(usize::MAX), None]),
    ];
    let mut out = Vec::new();
    for (algebra, representation, family, rank, summands) in rows {
        let rs = Arc::new(RootSystem::build(family, rank)?);
        let mut dims = Vec::new();
        let mut parts = Vec::new();
        for s in summands {
            let label = match s {
                None => IrrepLabel::trivial(rs.clone()),
                Some(usize::MAX) => IrrepLabel::adjoint(rs.clone()),
                Some(i) => IrrepLabel::fundamental(rs.clone(), *i)?,
            };
            dims.push(weyl_dim(&label)?);
            parts.push(freudenthal_weights(&label, DEFAULT_REP_CAP)?);
        }
        let sum = direct_sum(&parts)?;
        out.push(TableRow {
            algebra,
            representation,
            total_dim: dims.iter().sum(),
            summand_dims: dims,
            self_dual: self_dual(&sum),
        });
    }
    Ok(out)
}

/// Classes of outer automorphisms of a simple ideal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterClass {
    /// The diagram flip of A_l (l ≥ 2), D_l (l ≥ 5) or E6.
    Flip,
    /// An order-2 diagram automorphism of D4.
    Transposition,
    /// An order-3 diagram automorphism of D4.
    Triality,
}

impl OuterClass {
    pub fn is_involutory(self) -> bool {
        !matches!(self, OuterClass::Triality)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizedOuter {
    pub class: OuterClass,
    /// The realizing element acts trivially on every other simple ideal.
    pub identity_on_others: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealDescription {
    pub family: Family,
    pub rank: usize,
    pub realized_outer: Vec<RealizedOuter>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDescription {
    ideals: Vec<IdealDescription>,
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn outer_classes(family: Family, rank: usize) -> &'static [OuterClass] {
    match (family, rank) {
        (Family::A, r) if r >= 2 => &[OuterClass::Flip],
        (Family::D, 4) => &[OuterClass::Transposition, OuterClass::Triality],
        (Family::D, r) if r > 4 => &[OuterClass::Flip],
        (Family::E, 6) => &[OuterClass::Flip],
        _ => &[],
    }
}

impl GroupDescription {
    pub fn new(ideals: Vec<IdealDescription>) -> Result<Self> {
        for ideal in &ideals {
            let valid = match ideal.family {
                Family::A => ideal.rank >= 1,
                Family::B => ideal.rank >= 2,
                Family::C => ideal.rank >= 3,
                Family::D => ideal.rank >= 4,
                Family::E => (6..=8).contains(&ideal.rank),
                Family::F => ideal.rank == 4,
                Family::G => ideal.rank == 2,
            };
            if !valid {
                return Err(Error::UnsupportedSystem(format!("{}{}", ideal.family, ideal.rank)));
            }
            let allowed = outer_classes(ideal.family, ideal.rank);
            if let Some(bad) = ideal.realized_outer.iter().find(|o| !allowed.contains(&o.class)) {
                return Err(Error::Inconsistent(format!(
                    "{}{} has no outer class {:?}",
                    ideal.family, ideal.rank, bad.class
                )));
            }
        }
        Ok(GroupDescription { ideals })
    }

    pub fn ideals(&self) -> &[IdealDescription] {
        &self.ideals
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeIVerdict {
    pub is_type_i: bool,
    pub failing_ideal: Option<String>,
}

/// No E-type ideal, and every `so_2k` (k > 3) ideal admits a realized
/// involutory outer automorphism acting trivially on the other ideals.
pub fn is_type_i(desc: &GroupDescription) -> TypeIVerdict {
    for ideal in &desc.ideals {
        let name = format!("{}{}", ideal.family, ideal.rank);
        let fails = match ideal.family {
            Family::E => true,
            Family::D => !ideal
                .realized_outer
                .iter()
                .any(|o| o.class.is_involutory() && o.identity_on_others),
            _ => false,
        };
        if fails {
            return TypeIVerdict {
                is_type_i: false,
                failing_ideal: Some(name),
            };
        }
    }
    TypeIVerdict {
        is_type_i: true,
        failing_ideal: None,
    }
}

/// Sum of `⟨λ, v⟩` over a weight multiset for a sample coroot; used when
/// comparing restrictions numerically.
pub fn trace_on(ws: &WeightMultiset, v: &RationalVector) -> Rational {
    ws.iter()
        .map(|(w, m)| ip(w, v) * rat(m as i64))
        .fold(Rational::from_integer(0.into()), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_GROUP_CAP;

    fn f4_minimal() -> WeightMultiset {
        let f4 = Arc::new(RootSystem::build(Family::F, 4).unwrap());
        freudenthal_weights(&IrrepLabel::fundamental(f4, 0).unwrap(), DEFAULT_REP_CAP).unwrap()
    }

    #[test]
    fn f4_branching_to_sl3() {
        let emb = ToralEmbedding::preset("f4-sl3-rho2").unwrap();
        let pulled = pullback(&emb, &f4_minimal()).unwrap();
        assert_eq!(pulled.dim(), 26);
        assert_eq!(pulled.zero_multiplicity(), 8);
        for pair in [[2, -1], [-1, 2], [1, 1], [-2, 1], [1, -2], [-1, -1]] {
            assert_eq!(pulled.multiplicity(&RationalVector::from_ints(&pair)), 3);
        }
        let dec = branch(&emb, &f4_minimal()).unwrap();
        let a2 = Arc::new(RootSystem::build(Family::A, 2).unwrap());
        assert_eq!(
            dec,
            vec![(IrrepLabel::adjoint(a2.clone()), 3), (IrrepLabel::trivial(a2), 2)]
        );
    }

    #[test]
    fn so9_adjoint_embedding_has_the_same_branching() {
        let rho1 = ToralEmbedding::preset("so9-sl3-adjoint").unwrap();
        let rho2 = ToralEmbedding::preset("f4-sl3-rho2").unwrap();
        assert!(linearly_equivalent(&rho1, &rho2, &f4_minimal()).unwrap());
    }

    #[test]
    fn identity_pullback_gives_dynkin_labels() {
        let a2 = Arc::new(RootSystem::build(Family::A, 2).unwrap());
        let coroots: Vec<_> = a2.simple_roots().to_vec();
        let emb = ToralEmbedding::new(EmbeddingSource::System(a2.clone()), a2.clone(), coroots).unwrap();
        let ad = freudenthal_weights(&IrrepLabel::adjoint(a2.clone()), DEFAULT_REP_CAP).unwrap();
        let back = pullback_to_source(&emb, &ad).unwrap();
        assert_eq!(back, ad);
    }

    #[test]
    fn padded_torus_round_trip() {
        let d4 = Arc::new(RootSystem::build(Family::D, 4).unwrap());
        let images = vec![
            RationalVector::from_ints(&[1, 0, 0, 0]),
            RationalVector::from_ints(&[0, 1, 0, 0]),
        ];
        let emb = ToralEmbedding::new(EmbeddingSource::Torus(2), d4, images).unwrap();
        let ws = WeightMultiset::from_weights(
            2,
            [(RationalVector::from_ints(&[3, -1]), 2), (RationalVector::from_ints(&[0, 5]), 1)],
        )
        .unwrap();
        assert_eq!(pullback(&emb, &ws.padded(0, 4)).unwrap(), ws);
    }

    #[test]
    fn conjugacy_examples() {
        let a2 = Arc::new(RootSystem::build(Family::A, 2).unwrap());
        let src = EmbeddingSource::Torus(1);
        let e1 = ToralEmbedding::new(src.clone(), a2.clone(), vec![RationalVector::from_ints(&[1, -1, 0])]).unwrap();
        let e2 = ToralEmbedding::new(src.clone(), a2.clone(), vec![RationalVector::from_ints(&[0, 1, -1])]).unwrap();
        let w = a2.weyl_group(true, DEFAULT_GROUP_CAP).unwrap();
        assert!(weyl_conjugate(&e1, &e1, &w, DEFAULT_GROUP_CAP).unwrap().unwrap().is_identity());
        let g = weyl_conjugate(&e1, &e2, &w, DEFAULT_GROUP_CAP).unwrap().unwrap();
        assert_eq!(g.apply(&e1.coroot_images()[0]), e2.coroot_images()[0]);

        let b2 = Arc::new(RootSystem::build(Family::B, 2).unwrap());
        let long = ToralEmbedding::new(src.clone(), b2.clone(), vec![RationalVector::from_ints(&[1, 1])]).unwrap();
        let short = ToralEmbedding::new(src, b2.clone(), vec![RationalVector::from_ints(&[2, 0])]).unwrap();
        let wb = b2.weyl_group(true, DEFAULT_GROUP_CAP).unwrap();
        assert!(weyl_conjugate(&long, &short, &wb, DEFAULT_GROUP_CAP).unwrap().is_none());
    }

    #[test]
    fn different_norms_are_not_linearly_equivalent() {
        let a2 = Arc::new(RootSystem::build(Family::A, 2).unwrap());
        let a1 = EmbeddingSource::parse("A1").unwrap();
        let e1 = ToralEmbedding::new(a1.clone(), a2.clone(), vec![RationalVector::from_ints(&[1, -1, 0])]).unwrap();
        let e2 = ToralEmbedding::new(a1, a2.clone(), vec![RationalVector::from_ints(&[2, -1, -1])]).unwrap();
        let taut = freudenthal_weights(&IrrepLabel::fundamental(a2, 0).unwrap(), DEFAULT_REP_CAP).unwrap();
        assert!(!linearly_equivalent(&e1, &e2, &taut).unwrap());
        assert!(linearly_equivalent(&e1, &e1, &taut).unwrap());
    }

    #[test]
    fn mismatched_embeddings_error() {
        let rho2 = ToralEmbedding::preset("f4-sl3-rho2").unwrap();
        let d4 = sl3_in_d4().unwrap();
        assert!(linearly_equivalent(&rho2, &d4, &f4_minimal()).is_err());
    }

    #[test]
    fn non_integral_images_rejected() {
        let a2 = Arc::new(RootSystem::build(Family::A, 2).unwrap());
        let f4 = Arc::new(RootSystem::build(Family::F, 4).unwrap());
        let bad = vec![
            RationalVector::from_fracs(&[1, 0, 0, 0], 2),
            RationalVector::from_ints(&[0, 1, 0, 0]),
        ];
        assert!(ToralEmbedding::new(EmbeddingSource::System(a2), f4, bad).is_err());
    }

    #[test]
    fn json_round_trip() {
        let emb = ToralEmbedding::preset("f4-sl3-rho2").unwrap();
        let j = emb.to_json();
        assert_eq!(j["source"], "A2");
        assert_eq!(j["coroot_images"][1][3], "-2");
        let back = ToralEmbedding::from_json(&j).unwrap();
        assert_eq!(back.coroot_images(), emb.coroot_images());
    }

    #[test]
    fn birationality_examples() {
        let cfg = SearchConfig::default();
        let c4 = Arc::new(RootSystem::build(Family::C, 4).unwrap());
        let ws = freudenthal_weights(&IrrepLabel::fundamental(c4.clone(), 1).unwrap(), DEFAULT_REP_CAP).unwrap();
        let w = c4.weyl_group(true, DEFAULT_GROUP_CAP).unwrap();
        let v = birationality_test(&ws, &c4, &w, &cfg).unwrap();
        assert_eq!((v.is_birational, v.index, v.stabilizer_order), (false, 3, 1152));

        let a2 = Arc::new(RootSystem::build(Family::A, 2).unwrap());
        let taut = freudenthal_weights(&IrrepLabel::fundamental(a2.clone(), 0).unwrap(), DEFAULT_REP_CAP).unwrap();
        let sum = direct_sum(&[taut.clone(), taut.negated()]).unwrap();
        let aut = a2.aut_group(DEFAULT_GROUP_CAP).unwrap();
        let v = birationality_test(&sum, &a2, &aut, &cfg).unwrap();
        assert_eq!((v.is_birational, v.index), (true, 1));
        // the tautological weights alone are not stable under the flip
        assert!(birationality_test(&taut, &a2, &aut, &cfg).is_err());
    }

    #[test]
    fn prop91_examples() {
        for k in [4, 5, 6] {
            let v = prop91_check(&sl3_construction(k).unwrap()).unwrap();
            assert_eq!(v, Prop91Verdict { has_zero_weight: true, all_even: true, verdict: true });
            let v = prop91_check(&so5_construction(k).unwrap()).unwrap();
            assert!(v.verdict);
        }
        let b2 = Arc::new(RootSystem::build(Family::B, 2).unwrap());
        let spin = Component::irrep(&IrrepLabel::fundamental(b2, 1).unwrap(), 0, 2).unwrap();
        assert_eq!(
            prop91_check(&[spin]).unwrap(),
            Prop91Verdict { has_zero_weight: false, all_even: true, verdict: false }
        );
    }

    #[test]
    fn theta_twist_is_linearly_equivalent() {
        for emb in [sl3_in_d4().unwrap(), so5_in_d5().unwrap()] {
            let n = emb.target().rank();
            let twisted = emb.transformed(&d_outer_involution(n)).unwrap();
            assert!(linearly_equivalent(&emb, &twisted, &d_tautological(n)).unwrap());
        }
    }

    #[test]
    fn so9_table_rows() {
        let rows = verify_so9_table().unwrap();
        assert_eq!(rows.len(), 5);
        let dims: Vec<Vec<u128>> = rows.iter().map(|r| r.summand_dims.clone()).collect();
        assert_eq!(dims[0], vec![6, 1, 1, 1]);
        assert_eq!(dims[2], vec![7, 1, 1]);
        assert_eq!(dims[4], vec![8, 1]);
        assert!(rows.iter().all(TableRow::passes));
    }

    #[test]
    fn type_i_examples() {
        let ideal = |family, rank, outer: Vec<RealizedOuter>| IdealDescription {
            family,
            rank,
            realized_outer: outer,
        };
        let sl = GroupDescription::new(vec![ideal(Family::A, 5, vec![])]).unwrap();
        assert!(is_type_i(&sl).is_type_i);
        let d4 = GroupDescription::new(vec![ideal(Family::D, 4, vec![])]).unwrap();
        assert_eq!(is_type_i(&d4).failing_ideal.as_deref(), Some("D4"));
        let e6 = GroupDescription::new(vec![ideal(Family::E, 6, vec![])]).unwrap();
        assert!(!is_type_i(&e6).is_type_i);
        let triality = RealizedOuter { class: OuterClass::Triality, identity_on_others: true };
        let d4t = GroupDescription::new(vec![ideal(Family::D, 4, vec![triality])]).unwrap();
        assert!(!is_type_i(&d4t).is_type_i);
        let flip = RealizedOuter { class: OuterClass::Flip, identity_on_others: true };
        let d5 = GroupDescription::new(vec![ideal(Family::D, 5, vec![flip])]).unwrap();
        assert!(is_type_i(&d5).is_type_i);
        let diag = RealizedOuter { class: OuterClass::Flip, identity_on_others: false };
        let d5x2 = GroupDescription::new(vec![
            ideal(Family::D, 5, vec![diag]),
            ideal(Family::D, 5, vec![diag]),
        ])
        .unwrap();
        assert!(!is_type_i(&d5x2).is_type_i);
        assert!(GroupDescription::new(vec![ideal(Family::B, 3, vec![flip])]).is_err());
    }
}
