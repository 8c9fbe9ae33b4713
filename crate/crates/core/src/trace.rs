//! Trace words on tuples of matrices, the polynomials they span, and
//! sample-based membership in subalgebras generated by trace expressions.
//!
//! Slots are numbered from 1: the word `[1, 2, 1]` stands for `tr(X₁X₂X₁)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{format_rational, parse_rational, rat, Rational, RationalMatrix, RationalVector};

pub const DEFAULT_SYMMETRIZE_CAP: usize = 6;
pub const DEFAULT_DEGREE_CAP: usize = 12;
pub const DEFAULT_ENTRY_BOUND: i64 = 7;
pub const DEFAULT_SAMPLE_MARGIN: usize = 10;
pub const DEFAULT_CANDIDATE_CAP: usize = 5_000;

/// A cyclic word, stored as its lexicographically least rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceWord(Vec<usize>);

pub fn canonicalize(letters: &[usize]) -> Result<TraceWord> {
    if letters.is_empty() {
        return Err(Error::EmptyWord);
    }
    if letters.contains(&0) {
        return Err(Error::IndexOutOfRange { index: 0, bound: 1 });
    }
    let n = letters.len();
    let best = (0..n)
        .map(|r| letters[r..].iter().chain(&letters[..r]).copied().collect::<Vec<_>>())
        .min()
        .expect("nonempty");
    Ok(TraceWord(best))
}

impl TraceWord {
    pub fn new(letters: &[usize]) -> Result<Self> {
        canonicalize(letters)
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn max_slot(&self) -> usize {
        *self.0.iter().max().expect("nonempty")
    }

    /// Trace of the product of the matrices named by the letters.
    pub fn evaluate(&self, tuple: &[RationalMatrix]) -> Result<Rational> {
        let mut acc = tuple
            .get(self.0[0] - 1)
            .ok_or(Error::IndexOutOfRange {
                index: self.0[0],
                bound: tuple.len() + 1,
            })?
            .clone();
        for &s in &self.0[1..] {
            let x = tuple.get(s - 1).ok_or(Error::IndexOutOfRange {
                index: s,
                bound: tuple.len() + 1,
            })?;
            acc = acc.mul(x)?;
        }
        Ok(acc.trace())
    }
}

impl fmt::Display for TraceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tr(")?;
        for s in &self.0 {
            write!(f, "X{s}")?;
        }
        write!(f, ")")
    }
}

/// A product of traces, words kept sorted.
pub type TraceMonomial = Vec<TraceWord>;

/// Rational combination of products of traces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TracePolynomial {
    terms: BTreeMap<TraceMonomial, Rational>,
}

impl TracePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The constant 1 (empty product).
    pub fn one() -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), Rational::one());
        p
    }

    pub fn word(w: TraceWord) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![w], Rational::one());
        p
    }

    pub fn from_letters(letters: &[usize]) -> Result<Self> {
        Ok(Self::word(canonicalize(letters)?))
    }

    pub fn terms(&self) -> &BTreeMap<TraceMonomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mut monomial: TraceMonomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        monomial.sort();
        let slot = self.terms.entry(monomial).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    pub fn max_slot(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(TraceWord::max_slot))
            .max()
            .unwrap_or(0)
    }

    /// Per-slot degrees of one monomial, indexed from slot 1.
    fn monomial_multidegree(m: &TraceMonomial, arity: usize) -> Vec<usize> {
        let mut d = vec![0; arity];
        for w in m {
            for &s in w.letters() {
                if s > d.len() {
                    d.resize(s, 0);
                }
                d[s - 1] += 1;
            }
        }
        d
    }

    /// The common multidegree of all terms, or `None` if the polynomial is
    /// zero or not multihomogeneous.
    pub fn multidegree(&self, arity: usize) -> Option<Vec<usize>> {
        let arity = arity.max(self.max_slot());
        let mut degrees = self.terms.keys().map(|m| Self::monomial_multidegree(m, arity));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// The common total degree of all terms, if homogeneous and nonzero.
    pub fn total_degree(&self) -> Option<usize> {
        let mut degrees = self
            .terms
            .keys()
            .map(|m| m.iter().map(TraceWord::degree).sum::<usize>());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn max_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().map(TraceWord::degree).sum::<usize>())
            .max()
            .unwrap_or(0)
    }

    /// Renames slots by `f` and recanonicalizes.
    pub fn substitute(&self, f: impl Fn(usize) -> usize) -> Result<Self> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let words = m
                .iter()
                .map(|w| canonicalize(&w.letters().iter().map(|&s| f(s)).collect::<Vec<_>>()))
                .collect::<Result<Vec<_>>>()?;
            out.add_term(words, c.clone());
        }
        Ok(out)
    }

    pub fn evaluate(&self, tuple: &[RationalMatrix]) -> Result<Rational> {
        check_tuple(tuple)?;
        if self.max_slot() > tuple.len() {
            return Err(Error::IndexOutOfRange {
                index: self.max_slot(),
                bound: tuple.len() + 1,
            });
        }
        let mut cache: HashMap<&TraceWord, Rational> = HashMap::new();
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut value = c.clone();
            for w in m {
                if !cache.contains_key(w) {
                    cache.insert(w, w.evaluate(tuple)?);
                }
                value *= &cache[w];
            }
            total += value;
        }
        Ok(total)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(m, c)| TermJson {
                coeff: format_rational(c),
                words: m.iter().map(|w| w.letters().to_vec()).collect(),
            })
            .collect();
        serde_json::to_value(terms).expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let terms: Vec<TermJson> =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let mut out = Self::zero();
        for t in terms {
            let words = t
                .words
                .iter()
                .map(|w| canonicalize(w))
                .collect::<Result<Vec<_>>>()?;
            out.add_term(words, parse_rational(&t.coeff)?);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: String,
    words: Vec<Vec<usize>>,
}

fn check_tuple(tuple: &[RationalMatrix]) -> Result<()> {
    if let Some(first) = tuple.first() {
        let n = first.rows();
        if tuple.iter().any(|x| x.rows() != n || x.cols() != n) {
            return Err(Error::ShapeMismatch(
                "tuple matrices must be square of equal size".into(),
            ));
        }
    }
    Ok(())
}

impl Add for &TracePolynomial {
    type Output = TracePolynomial;
    fn add(self, rhs: &TracePolynomial) -> TracePolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Neg for &TracePolynomial {
    type Output = TracePolynomial;
    fn neg(self) -> TracePolynomial {
        self.scale(&rat(-1))
    }
}

impl Sub for &TracePolynomial {
    type Output = TracePolynomial;
    fn sub(self, rhs: &TracePolynomial) -> TracePolynomial {
        self + &(-rhs)
    }
}

impl Mul for &TracePolynomial {
    type Output = TracePolynomial;
    fn mul(self, rhs: &TracePolynomial) -> TracePolynomial {
        let mut out = TracePolynomial::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a.iter().chain(b).cloned().collect(), x * y);
            }
        }
        out
    }
}

impl fmt::Display for TracePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let body = if m.is_empty() {
                    "1".to_string()
                } else {
                    m.iter().map(ToString::to_string).join("·")
                };
                format!("{}·{}", format_rational(c), body)
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Non-commutative polynomial in the slot symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AssocPolynomial(BTreeMap<Vec<usize>, Rational>);

impl AssocPolynomial {
    pub fn letter(s: usize) -> Self {
        let mut p = Self::default();
        p.add_term(vec![s], Rational::one());
        p
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Rational> {
        &self.0
    }

    fn add_term(&mut self, word: Vec<usize>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(word.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&word);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.0 {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut out = Self::default();
        for (w, c) in &self.0 {
            out.add_term(w.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (a, x) in &self.0 {
            for (b, y) in &other.0 {
                out.add_term(a.iter().chain(b).copied().collect(), x * y);
            }
        }
        out
    }

    /// `tr` of the polynomial, word by word.
    pub fn trace(&self) -> Result<TracePolynomial> {
        let mut out = TracePolynomial::zero();
        for (w, c) in &self.0 {
            out.add_term(vec![canonicalize(w)?], c.clone());
        }
        Ok(out)
    }
}

/// Bracket expression over the slot symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiePolynomial {
    Slot(usize),
    Bracket(Box<LiePolynomial>, Box<LiePolynomial>),
    Combination(Vec<(Rational, LiePolynomial)>),
}

impl LiePolynomial {
    pub fn slot(s: usize) -> Self {
        LiePolynomial::Slot(s)
    }

    pub fn bracket(a: LiePolynomial, b: LiePolynomial) -> Self {
        LiePolynomial::Bracket(Box::new(a), Box::new(b))
    }

    /// Largest word length in the expansion tree.
    pub fn degree(&self) -> usize {
        match self {
            LiePolynomial::Slot(_) => 1,
            LiePolynomial::Bracket(a, b) => a.degree() + b.degree(),
            LiePolynomial::Combination(parts) => {
                parts.iter().map(|(_, l)| l.degree()).max().unwrap_or(0)
            }
        }
    }

    pub fn expand(&self) -> AssocPolynomial {
        match self {
            LiePolynomial::Slot(s) => AssocPolynomial::letter(*s),
            LiePolynomial::Bracket(a, b) => {
                let (a, b) = (a.expand(), b.expand());
                a.mul(&b).add(&b.mul(&a).scale(&rat(-1)))
            }
            LiePolynomial::Combination(parts) => parts
                .iter()
                .fold(AssocPolynomial::default(), |acc, (c, l)| {
                    acc.add(&l.expand().scale(c))
                }),
        }
    }
}

impl fmt::Display for LiePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiePolynomial::Slot(s) => write!(f, "X{s}"),
            LiePolynomial::Bracket(a, b) => write!(f, "[{a},{b}]"),
            LiePolynomial::Combination(parts) => {
                let s: Vec<String> = parts
                    .iter()
                    .map(|(c, l)| format!("{}·{l}", format_rational(c)))
                    .collect();
                write!(f, "({})", s.join(" + "))
            }
        }
    }
}

/// `tr(L^k)` in the trace-word basis.
pub fn expand_lie_power_trace(l: &LiePolynomial, k: usize, cap: usize) -> Result<TracePolynomial> {
    if k == 0 {
        return Err(Error::IndexOutOfRange { index: 0, bound: 1 });
    }
    if k * l.degree() > cap {
        return Err(Error::CapExceeded(format!(
            "degree {} exceeds cap {cap}",
            k * l.degree()
        )));
    }
    let base = l.expand();
    let mut power = base.clone();
    for _ in 1..k {
        power = power.mul(&base);
    }
    power.trace()
}

/// Both sides of the transposition identity for `f_l = tr(X₁⋯X_l)`.
#[derive(Clone, Debug)]
pub struct DefectIdentity {
    /// `f_l` with slots `i` and `i+1` exchanged, minus `f_l`.
    pub lhs: TracePolynomial,
    /// `tr(X₁⋯[X_{i+1}, X_i]⋯X_l)` expanded.
    pub rhs: TracePolynomial,
    pub holds: bool,
}

/// `i` is 1-based with `1 ≤ i < l`. Exchanging adjacent factors produces
/// the bracket `[X_{i+1}, X_i]` in position `i`.
pub fn transposition_defect(l: usize, i: usize) -> Result<DefectIdentity> {
    if i == 0 || i >= l {
        return Err(Error::IndexOutOfRange { index: i, bound: l });
    }
    let base: Vec<usize> = (1..=l).collect();
    let mut swapped = base.clone();
    swapped.swap(i - 1, i);
    let lhs = &TracePolynomial::from_letters(&swapped)? - &TracePolynomial::from_letters(&base)?;

    let mut product: Option<AssocPolynomial> = None;
    let mut p = 1;
    while p <= l {
        let factor = if p == i {
            p += 2;
            LiePolynomial::bracket(LiePolynomial::slot(i + 1), LiePolynomial::slot(i)).expand()
        } else {
            p += 1;
            AssocPolynomial::letter(p - 1)
        };
        product = Some(match product {
            None => factor,
            Some(acc) => acc.mul(&factor),
        });
    }
    let product = product.expect("l ≥ 2");
    let rhs = product.trace()?;
    Ok(DefectIdentity {
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}

/// `(1/l!) Σ_{σ∈S_l} tr(X_{σ(1)}⋯X_{σ(l)})`.
pub fn symmetrize(l: usize, cap: usize) -> Result<TracePolynomial> {
    if l == 0 {
        return Err(Error::EmptyWord);
    }
    if l > cap {
        return Err(Error::CapExceeded(format!("symmetrization of degree {l} exceeds cap {cap}")));
    }
    let mut out = TracePolynomial::zero();
    let mut count = 0i64;
    for perm in (1..=l).permutations(l) {
        out.add_term(vec![canonicalize(&perm)?], Rational::one());
        count += 1;
    }
    Ok(out.scale(&Rational::new(1.into(), count.into())))
}

/// Lyndon words of length `1..=max_len` over `1..=arity`, by length then
/// lexicographically.
pub fn lyndon_words(arity: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if arity == 0 || max_len == 0 {
        return out;
    }
    // Duval's generation in lexicographic order.
    let mut w = vec![1usize];
    loop {
        out.push(w.clone());
        let mut next: Vec<usize> = (0..max_len).map(|i| w[i % w.len()]).collect();
        while next.last() == Some(&arity) {
            next.pop();
        }
        if next.is_empty() {
            break;
        }
        *next.last_mut().expect("nonempty") += 1;
        w = next;
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn is_lyndon(w: &[usize]) -> bool {
    (1..w.len()).all(|r| w < &w[r..])
}

/// Standard bracketing of a Lyndon word: split off its longest proper
/// Lyndon suffix.
pub fn standard_bracketing(word: &[usize]) -> LiePolynomial {
    if word.len() == 1 {
        return LiePolynomial::slot(word[0]);
    }
    let split = (1..word.len())
        .find(|&r| is_lyndon(&word[r..]))
        .expect("single letters are Lyndon");
    LiePolynomial::bracket(standard_bracketing(&word[..split]), standard_bracketing(&word[split..]))
}

/// The Lyndon basis of the free Lie algebra, degrees `1..=max_degree`.
pub fn lie_basis(arity: usize, max_degree: usize) -> Vec<LiePolynomial> {
    lyndon_words(arity, max_degree)
        .iter()
        .map(|w| standard_bracketing(w))
        .collect()
}

/// Multilinear polarizations of `tr(L^k)` over Lie basis elements of total
/// degree at most `max_degree`: for each multiset `{L₁,…,L_k}` the average
/// of `tr(L_{σ(1)}⋯L_{σ(k)})` over all orderings. Their span equals the span
/// of `tr(L^k)` over all Lie polynomials `L` of those degrees.
pub fn polarized_lie_traces(arity: usize, max_degree: usize) -> Result<Vec<TracePolynomial>> {
    let basis: Vec<(usize, AssocPolynomial)> = lie_basis(arity, max_degree)
        .iter()
        .map(|l| (l.degree(), l.expand()))
        .collect();
    let mut out: Vec<TracePolynomial> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn rec(
        basis: &[(usize, AssocPolynomial)],
        start: usize,
        budget: usize,
        stack: &mut Vec<usize>,
        out: &mut Vec<TracePolynomial>,
    ) -> Result<()> {
        if !stack.is_empty() {
            let k = stack.len();
            let mut sum = AssocPolynomial::default();
            let mut count = 0i64;
            for perm in stack.iter().permutations(k) {
                let prod = perm[1..]
                    .iter()
                    .fold(basis[*perm[0]].1.clone(), |acc, &&j| acc.mul(&basis[j].1));
                sum = sum.add(&prod);
                count += 1;
            }
            let p = sum
                .scale(&Rational::new(1.into(), count.into()))
                .trace()?;
            if !p.is_zero() && !out.contains(&p) {
                out.push(p);
            }
        }
        for j in start..basis.len() {
            if basis[j].0 <= budget {
                stack.push(j);
                rec(basis, j, budget - basis[j].0, stack, out)?;
                stack.pop();
            }
        }
        Ok(())
    }
    rec(&basis, 0, max_degree, &mut stack, &mut out)?;
    Ok(out)
}

/// All trace words (up to rotation) of length `1..=max_degree` over
/// `1..=arity`.
pub fn trace_words(arity: usize, max_degree: usize) -> Vec<TraceWord> {
    let mut out: Vec<TraceWord> = (1..=max_degree)
        .flat_map(|len| {
            std::iter::repeat_n(1..=arity, len)
                .multi_cartesian_product()
                .filter_map(|w| canonicalize(&w).ok())
        })
        .collect();
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
    out.dedup();
    out
}

/// A matrix Lie algebra, by matrix size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixAlgebra {
    Gl(usize),
    Sl(usize),
    So(usize),
    /// `sp_{2m}` realized in size `2m`, form `[[0, I], [−I, 0]]`.
    Sp(usize),
}

impl MatrixAlgebra {
    pub fn parse(name: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown matrix algebra {name:?}"));
        let split = name.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?;
        let n: usize = name[split..].parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        match &name[..split].to_ascii_lowercase()[..] {
            "gl" => Ok(MatrixAlgebra::Gl(n)),
            "sl" => Ok(MatrixAlgebra::Sl(n)),
            "so" => Ok(MatrixAlgebra::So(n)),
            "sp" if n.is_multiple_of(2) => Ok(MatrixAlgebra::Sp(n)),
            _ => Err(bad()),
        }
    }

    pub fn size(self) -> usize {
        match self {
            MatrixAlgebra::Gl(n) | MatrixAlgebra::Sl(n) | MatrixAlgebra::So(n) | MatrixAlgebra::Sp(n) => n,
        }
    }

    /// A basis of the algebra as a space of matrices.
    pub fn basis(self) -> Vec<RationalMatrix> {
        let n = self.size();
        let e = |i: usize, j: usize| {
            let mut m = RationalMatrix::zeros(n, n);
            m.set(i, j, Rational::one());
            m
        };
        match self {
            MatrixAlgebra::Gl(_) => (0..n).cartesian_product(0..n).map(|(i, j)| e(i, j)).collect(),
            MatrixAlgebra::Sl(_) => {
                let mut out: Vec<_> = (0..n)
                    .cartesian_product(0..n)
                    .filter(|(i, j)| i != j)
                    .map(|(i, j)| e(i, j))
                    .collect();
                for i in 0..n - 1 {
                    out.push(e(i, i).sub(&e(i + 1, i + 1)).expect("same shape"));
                }
                out
            }
            MatrixAlgebra::So(_) => (0..n)
                .tuple_combinations()
                .map(|(i, j)| e(i, j).sub(&e(j, i)).expect("same shape"))
                .collect(),
            MatrixAlgebra::Sp(_) => {
                let h = n / 2;
                let mut j = RationalMatrix::zeros(n, n);
                for i in 0..h {
                    j.set(i, h + i, rat(1));
                    j.set(h + i, i, rat(-1));
                }
                // Solve XᵀJ + JX = 0 on the n² entries of X.
                let mut rows = Vec::new();
                for (a, b) in (0..n).cartesian_product(0..n) {
                    let mut row = vec![Rational::zero(); n * n];
                    for c in 0..n {
                        row[c * n + a] += j.get(c, b);
                        row[c * n + b] += j.get(a, c);
                    }
                    rows.push(RationalVector::new(row));
                }
                RationalMatrix::from_rows(&rows)
                    .expect("rectangular")
                    .nullspace()
                    .into_iter()
                    .map(|v| RationalMatrix::new(n, n, v.into_coords()).expect("n² entries"))
                    .collect()
            }
        }
    }
}

impl fmt::Display for MatrixAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixAlgebra::Gl(n) => write!(f, "gl{n}"),
            MatrixAlgebra::Sl(n) => write!(f, "sl{n}"),
            MatrixAlgebra::So(n) => write!(f, "so{n}"),
            MatrixAlgebra::Sp(n) => write!(f, "sp{n}"),
        }
    }
}

/// Draws tuples from a matrix algebra: each matrix is a combination of
/// basis elements with integer coefficients in `[−bound, bound]`; zero
/// matrices are redrawn.
pub struct TupleSampler {
    basis: Vec<RationalMatrix>,
    size: usize,
    arity: usize,
    bound: i64,
    rng: ChaCha8Rng,
}

impl TupleSampler {
    pub fn new(algebra: MatrixAlgebra, arity: usize, seed: u64, bound: i64) -> Self {
        TupleSampler {
            basis: algebra.basis(),
            size: algebra.size(),
            arity,
            bound: bound.max(1),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn matrix(&mut self) -> RationalMatrix {
        loop {
            let mut m = RationalMatrix::zeros(self.size, self.size);
            for b in &self.basis {
                let c: i64 = self.rng.gen_range(-self.bound..=self.bound);
                if c != 0 {
                    m = m.add(&b.scale(&rat(c))).expect("same shape");
                }
            }
            if !m.is_zero() || self.basis.is_empty() {
                return m;
            }
        }
    }

    pub fn sample(&mut self) -> Vec<RationalMatrix> {
        (0..self.arity).map(|_| self.matrix()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct MembershipConfig {
    pub seed: u64,
    pub entry_bound: i64,
    pub margin: usize,
    pub candidate_cap: usize,
}

impl Default for MembershipConfig {
    fn default() -> Self {
        MembershipConfig {
            seed: 0,
            entry_bound: DEFAULT_ENTRY_BOUND,
            margin: DEFAULT_SAMPLE_MARGIN,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
        }
    }
}

/// Outcome of a membership test. A positive answer carries exact
/// coefficients that were re-checked on fresh samples; a negative answer
/// means the sampled evaluation vectors were independent, which is wrong
/// only with negligible probability.
#[derive(Clone, Debug)]
pub struct MembershipResult {
    pub member: bool,
    /// Each candidate as a multiset of generator indices.
    pub candidates: Vec<Vec<usize>>,
    pub coefficients: Option<Vec<Rational>>,
    pub samples: usize,
    pub rank: usize,
}

impl MembershipResult {
    /// `Σ cᵢ · Π generators` for the certificate, when one exists.
    pub fn combination(&self, generators: &[TracePolynomial]) -> Option<TracePolynomial> {
        let coeffs = self.coefficients.as_ref()?;
        let mut out = TracePolynomial::zero();
        for (cand, c) in self.candidates.iter().zip(coeffs) {
            let prod = cand
                .iter()
                .fold(TracePolynomial::one(), |acc, &g| &acc * &generators[g]);
            out = &out + &prod.scale(c);
        }
        Some(out)
    }
}

/// Products of generators with the target's degree. Generators must be
/// homogeneous; when all are multihomogeneous, products are also matched
/// slot by slot.
fn candidate_products(
    target_degree: usize,
    target_multi: Option<&[usize]>,
    generators: &[TracePolynomial],
    arity: usize,
    cap: usize,
) -> Result<Vec<Vec<usize>>> {
    let mut degs = Vec::with_capacity(generators.len());
    for g in generators {
        if g.is_zero() {
            degs.push(None);
            continue;
        }
        let d = g.total_degree().ok_or_else(|| {
            Error::ShapeMismatch(format!("generator {g} is not homogeneous"))
        })?;
        degs.push((d > 0).then_some(d));
    }
    let multis: Option<Vec<Vec<usize>>> = generators
        .iter()
        .map(|g| if g.is_zero() { Some(vec![0; arity]) } else { g.multidegree(arity) })
        .collect();
    let multis = target_multi.and(multis);

    let mut out = Vec::new();
    let mut stack = Vec::new();
    let mut slot_budget = target_multi.map(<[usize]>::to_vec);
    #[allow(clippy::too_many_arguments)]
    fn rec(
        degs: &[Option<usize>],
        multis: Option<&Vec<Vec<usize>>>,
        start: usize,
        remaining: usize,
        slot_budget: &mut Option<Vec<usize>>,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<()> {
        if remaining == 0 {
            if slot_budget.as_ref().is_none_or(|b| b.iter().all(|&x| x == 0)) {
                if out.len() >= cap {
                    return Err(Error::CapExceeded(format!("more than {cap} candidate products")));
                }
                out.push(stack.clone());
            }
            return Ok(());
        }
        for j in start..degs.len() {
            let Some(d) = degs[j] else { continue };
            if d > remaining {
                continue;
            }
            if let (Some(m), Some(b)) = (multis, slot_budget.as_mut()) {
                if m[j].iter().zip(b.iter()).any(|(x, y)| x > y) {
                    continue;
                }
                b.iter_mut().zip(&m[j]).for_each(|(y, x)| *y -= x);
                stack.push(j);
                let r = rec(degs, multis, j, remaining - d, slot_budget, stack, out, cap);
                stack.pop();
                let b = slot_budget.as_mut().expect("present");
                b.iter_mut().zip(&m[j]).for_each(|(y, x)| *y += x);
                r?;
            } else {
                stack.push(j);
                let r = rec(degs, multis, j, remaining - d, slot_budget, stack, out, cap);
                stack.pop();
                r?;
            }
        }
        Ok(())
    }
    if multis.is_none() {
        slot_budget = None;
    }
    rec(
        &degs,
        multis.as_ref(),
        0,
        target_degree,
        &mut slot_budget,
        &mut stack,
        &mut out,
        cap,
    )?;
    Ok(out)
}

/// Evaluates each polynomial on each tuple, splitting tuples across threads.
fn evaluate_all(
    polys: &[TracePolynomial],
    tuples: &[Vec<RationalMatrix>],
) -> Result<Vec<Vec<Rational>>> {
    let threads = std::thread::available_parallelism().map_or(1, usize::from).min(8);
    let chunk = tuples.len().div_ceil(threads).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = tuples
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|t| polys.iter().map(|p| p.evaluate(t)).collect::<Result<Vec<_>>>())
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(tuples.len());
        for h in handles {
            out.extend(h.join().expect("evaluation thread panicked")?);
        }
        Ok(out)
    })
}

fn candidate_values(gen_values: &[Rational], candidates: &[Vec<usize>]) -> Vec<Rational> {
    candidates
        .iter()
        .map(|c| c.iter().fold(Rational::one(), |acc, &g| acc * &gen_values[g]))
        .collect()
}

/// Decides whether `target` restricted to tuples from `algebra` lies in the
/// span of products of `generators` of the same degree.
pub fn membership(
    target: &TracePolynomial,
    generators: &[TracePolynomial],
    algebra: MatrixAlgebra,
    arity: usize,
    cfg: &MembershipConfig,
) -> Result<MembershipResult> {
    let needed = target
        .max_slot()
        .max(generators.iter().map(TracePolynomial::max_slot).max().unwrap_or(0));
    if needed > arity {
        return Err(Error::IndexOutOfRange {
            index: needed,
            bound: arity + 1,
        });
    }
    let (degree, multi) = if target.is_zero() {
        (0, None)
    } else {
        let d = target.total_degree().ok_or_else(|| {
            Error::ShapeMismatch("target polynomial is not homogeneous".into())
        })?;
        (d, target.multidegree(arity))
    };
    let candidates = if degree == 0 {
        Vec::new()
    } else {
        candidate_products(degree, multi.as_deref(), generators, arity, cfg.candidate_cap)?
    };

    let mut sampler = TupleSampler::new(algebra, arity, cfg.seed, cfg.entry_bound);
    let n = candidates.len() + cfg.margin.max(1);
    let tuples: Vec<_> = (0..n).map(|_| sampler.sample()).collect();
    let mut polys: Vec<TracePolynomial> = generators.to_vec();
    polys.push(target.clone());
    let values = evaluate_all(&polys, &tuples)?;

    let k = candidates.len();
    let mut a = RationalMatrix::zeros(n, k);
    let mut b = Vec::with_capacity(n);
    for (r, row) in values.iter().enumerate() {
        for (c, v) in candidate_values(&row[..generators.len()], &candidates).into_iter().enumerate() {
            a.set(r, c, v);
        }
        b.push(row[generators.len()].clone());
    }
    let rank = if k == 0 { 0 } else { a.rank() };
    let solution = if k == 0 {
        b.iter().all(Zero::is_zero).then(Vec::new)
    } else {
        a.solve(&RationalVector::new(b))?.map(RationalVector::into_coords)
    };
    let Some(coeffs) = solution else {
        return Ok(MembershipResult {
            member: false,
            candidates,
            coefficients: None,
            samples: n,
            rank,
        });
    };

    // Re-check the certificate on fresh tuples.
    let fresh: Vec<_> = (0..cfg.margin.max(1)).map(|_| sampler.sample()).collect();
    for row in evaluate_all(&polys, &fresh)? {
        let lhs = candidate_values(&row[..generators.len()], &candidates)
            .iter()
            .zip(&coeffs)
            .fold(Rational::zero(), |acc, (v, c)| acc + v * c);
        if lhs != row[generators.len()] {
            return Err(Error::Inconclusive(
                "certificate failed on fresh samples; raise the sample count".into(),
            ));
        }
    }
    Ok(MembershipResult {
        member: true,
        candidates,
        coefficients: Some(coeffs),
        samples: n,
        rank,
    })
}

/// Commutative polynomial in the coefficients of generic tuple elements.
type Poly = BTreeMap<Vec<u8>, Rational>;

fn poly_add_into(acc: &mut Poly, p: &Poly, scale: &Rational) {
    for (m, c) in p {
        let slot = acc.entry(m.clone()).or_insert_with(Rational::zero);
        *slot += c * scale;
        if slot.is_zero() {
            acc.remove(m);
        }
    }
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (x, c) in a {
        for (y, d) in b {
            let m: Vec<u8> = x.iter().zip(y).map(|(i, j)| i + j).collect();
            let slot = out.entry(m.clone()).or_insert_with(Rational::zero);
            *slot += c * d;
            if slot.is_zero() {
                out.remove(&m);
            }
        }
    }
    out
}

/// Exact identity test: expands `p` in the coordinates of generic elements
/// `X_s = Σ t_{s,k} B_k` of the algebra. Limited to matrix size ≤ 3 and
/// degree ≤ 6.
pub fn symbolically_zero(p: &TracePolynomial, algebra: MatrixAlgebra, arity: usize) -> Result<bool> {
    let size = algebra.size();
    if size > 3 || p.max_degree() > 6 {
        return Err(Error::CapExceeded(
            "symbolic expansion is limited to size 3 and degree 6".into(),
        ));
    }
    if p.max_slot() > arity {
        return Err(Error::IndexOutOfRange {
            index: p.max_slot(),
            bound: arity + 1,
        });
    }
    let basis = algebra.basis();
    let nvars = arity * basis.len();
    // generic[s][i][j]
    let generic: Vec<Vec<Vec<Poly>>> = (0..arity)
        .map(|s| {
            (0..size)
                .map(|i| {
                    (0..size)
                        .map(|j| {
                            let mut e = Poly::new();
                            for (k, b) in basis.iter().enumerate() {
                                if !b.get(i, j).is_zero() {
                                    let mut m = vec![0u8; nvars];
                                    m[s * basis.len() + k] = 1;
                                    e.insert(m, b.get(i, j).clone());
                                }
                            }
                            e
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mat_mul = |a: &Vec<Vec<Poly>>, b: &Vec<Vec<Poly>>| -> Vec<Vec<Poly>> {
        (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| {
                        let mut acc = Poly::new();
                        for k in 0..size {
                            poly_add_into(&mut acc, &poly_mul(&a[i][k], &b[k][j]), &Rational::one());
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    };
    let mut word_cache: HashMap<TraceWord, Poly> = HashMap::new();
    let mut total = Poly::new();
    for (mono, c) in p.terms() {
        let mut value: Poly = [(vec![0u8; nvars], Rational::one())].into_iter().collect();
        for w in mono {
            if !word_cache.contains_key(w) {
                let letters = w.letters();
                let mut m = generic[letters[0] - 1].clone();
                for &s in &letters[1..] {
                    m = mat_mul(&m, &generic[s - 1]);
                }
                let mut tr = Poly::new();
                for (i, row) in m.iter().enumerate() {
                    poly_add_into(&mut tr, &row[i], &Rational::one());
                }
                word_cache.insert(w.clone(), tr);
            }
            value = poly_mul(&value, &word_cache[w]);
        }
        poly_add_into(&mut total, &value, c);
    }
    Ok(total.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr(letters: &[usize]) -> TracePolynomial {
        TracePolynomial::from_letters(letters).unwrap()
    }

    fn m2(data: &[i64]) -> RationalMatrix {
        RationalMatrix::from_ints(2, 2, data)
    }

    #[test]
    fn canonical_rotations() {
        assert_eq!(canonicalize(&[2, 1]).unwrap().letters(), &[1, 2]);
        assert_eq!(canonicalize(&[3, 1, 2]).unwrap().letters(), &[1, 2, 3]);
        assert_eq!(canonicalize(&[1, 1, 2]).unwrap().letters(), &[1, 1, 2]);
        assert_eq!(canonicalize(&[2, 1, 1]).unwrap().letters(), &[1, 1, 2]);
        assert!(matches!(canonicalize(&[]), Err(Error::EmptyWord)));
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(tr(&[1]).evaluate(&[RationalMatrix::identity(2)]).unwrap(), rat(2));
        let x1 = m2(&[0, 1, 1, 0]);
        let x2 = m2(&[1, 0, 0, -1]);
        let l = LiePolynomial::bracket(LiePolynomial::slot(1), LiePolynomial::slot(2));
        let sq = expand_lie_power_trace(&l, 2, DEFAULT_DEGREE_CAP).unwrap();
        let tuple = [x1, x2];
        assert_eq!(sq.evaluate(&tuple).unwrap(), rat(-8));
        let alt = &tr(&[1, 2, 1, 2]).scale(&rat(2)) - &tr(&[1, 1, 2, 2]).scale(&rat(2));
        assert_eq!(sq, alt);
        assert!(tr(&[1]).evaluate(&[m2(&[1, 0, 0, 1]), RationalMatrix::identity(3)]).is_err());
    }

    #[test]
    fn lie_power_examples() {
        let x1 = LiePolynomial::slot(1);
        assert_eq!(expand_lie_power_trace(&x1, 2, 12).unwrap(), tr(&[1, 1]));
        let b = LiePolynomial::bracket(LiePolynomial::slot(1), LiePolynomial::slot(2));
        assert!(expand_lie_power_trace(&b, 1, 12).unwrap().is_zero());
        assert!(matches!(expand_lie_power_trace(&b, 7, 12), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn defect_identities() {
        let d = transposition_defect(2, 1).unwrap();
        assert!(d.lhs.is_zero() && d.rhs.is_zero() && d.holds);
        for l in 2..=5 {
            for i in 1..l {
                assert!(transposition_defect(l, i).unwrap().holds, "l={l} i={i}");
            }
        }
        let d = transposition_defect(3, 1).unwrap();
        assert_eq!(d.lhs, &tr(&[2, 1, 3]) - &tr(&[1, 2, 3]));
        assert!(transposition_defect(3, 3).is_err());
    }

    #[test]
    fn symmetrization_examples() {
        assert_eq!(symmetrize(1, 6).unwrap(), tr(&[1]));
        assert_eq!(symmetrize(2, 6).unwrap(), tr(&[1, 2]));
        let half = Rational::new(1.into(), 2.into());
        let three = &tr(&[1, 2, 3]).scale(&half) + &tr(&[1, 3, 2]).scale(&half);
        assert_eq!(symmetrize(3, 6).unwrap(), three);
        for l in 1..=5 {
            let collapsed = symmetrize(l, 6).unwrap().substitute(|_| 1).unwrap();
            assert_eq!(collapsed, tr(&vec![1; l]));
        }
        assert!(matches!(symmetrize(7, 6), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn lyndon_counts() {
        // necklace-polynomial counts for two letters: 2, 1, 2, 3, 6
        let counts: Vec<usize> = (1..=5)
            .map(|n| lyndon_words(2, 5).iter().filter(|w| w.len() == n).count())
            .collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6]);
        assert_eq!(standard_bracketing(&[1, 1, 2]).to_string(), "[X1,[X1,X2]]");
        assert_eq!(standard_bracketing(&[1, 2, 2]).to_string(), "[[X1,X2],X2]");
    }

    #[test]
    fn algebra_bases() {
        assert_eq!(MatrixAlgebra::parse("gl2").unwrap().basis().len(), 4);
        assert_eq!(MatrixAlgebra::parse("sl3").unwrap().basis().len(), 8);
        assert_eq!(MatrixAlgebra::parse("so4").unwrap().basis().len(), 6);
        let sp4 = MatrixAlgebra::parse("sp4").unwrap().basis();
        assert_eq!(sp4.len(), 10);
        assert!(MatrixAlgebra::parse("sp3").is_err());
    }

    #[test]
    fn polarization_membership() {
        let gens = vec![
            tr(&[1, 1]),
            tr(&[2, 2]),
            &(&tr(&[1, 1]) + &tr(&[2, 2])) + &tr(&[1, 2]).scale(&rat(2)),
        ];
        let gl2 = MatrixAlgebra::Gl(2);
        let r = membership(&tr(&[1, 2]), &gens, gl2, 2, &MembershipConfig::default());
        // the third generator is not multihomogeneous, so only total degree
        // is matched
        let r = r.unwrap();
        assert!(r.member);
        let combo = r.combination(&gens).unwrap();
        assert!(symbolically_zero(&(&combo - &tr(&[1, 2])), gl2, 2).unwrap());
    }

    #[test]
    fn traceless_sampler() {
        let r = membership(&tr(&[1]), &[], MatrixAlgebra::Sl(2), 1, &MembershipConfig::default()).unwrap();
        assert!(r.member);
        // tr(X₁) vanishes on sl₂, so it equals the zero polynomial there
        assert!(symbolically_zero(&tr(&[1]), MatrixAlgebra::Sl(2), 1).unwrap());
        let r = membership(&tr(&[1, 1]), &[], MatrixAlgebra::Sl(2), 1, &MembershipConfig::default()).unwrap();
        assert!(!r.member);
    }

    #[test]
    fn triple_trace_on_gl2() {
        let gens = polarized_lie_traces(3, 3).unwrap();
        let cfg = MembershipConfig::default();
        let r = membership(&tr(&[1, 2, 3]), &gens, MatrixAlgebra::Gl(2), 3, &cfg).unwrap();
        assert!(r.member);
        let combo = r.combination(&gens).unwrap();
        assert!(symbolically_zero(&(&combo - &tr(&[1, 2, 3])), MatrixAlgebra::Gl(2), 3).unwrap());
        // without the mixed polarization the target is out of reach
        let squares = [tr(&[1, 1]), tr(&[2, 2])];
        let r = membership(&tr(&[1, 2]), &squares, MatrixAlgebra::Gl(2), 2, &cfg).unwrap();
        assert!(!r.member);
    }

    #[test]
    fn symbolic_oracle_catches_cayley_hamilton() {
        // 2·tr(X³) − 3·tr(X)tr(X²) + tr(X)³ = 6·det-free identity on gl₂
        let p = &(&tr(&[1, 1, 1]).scale(&rat(2)) - &(&tr(&[1]) * &tr(&[1, 1])).scale(&rat(3)))
            + &(&(&tr(&[1]) * &tr(&[1])) * &tr(&[1]));
        assert!(symbolically_zero(&p, MatrixAlgebra::Gl(2), 1).unwrap());
        assert!(!symbolically_zero(&p, MatrixAlgebra::Gl(3), 1).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let p = &tr(&[1, 2]).scale(&Rational::new(1.into(), 2.into())) + &(&tr(&[3]) * &tr(&[1]));
        let j = p.to_json();
        assert_eq!(TracePolynomial::from_json(&j).unwrap(), p);
        let parsed = TracePolynomial::from_json(&serde_json::json!([
            {"coeff": "1/2", "words": [[2, 1]]},
            {"coeff": "1", "words": [[1], [3]]}
        ]))
        .unwrap();
        assert_eq!(parsed, p);
    }
}
