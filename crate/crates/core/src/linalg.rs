//! Exact rational vectors, matrices and lattices.
//!
//! Everything here works over arbitrary-precision rationals. The ambient
//! space always carries the standard scalar product, so a Gram matrix of a
//! family of vectors is just the table of pairwise dot products.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// An exact vector in ε-coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        RationalVector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        RationalVector(vec![Rational::zero(); dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        RationalVector(coords.iter().map(|&c| rat(c)).collect())
    }

    /// Builds a vector `coords / denom`.
    pub fn from_fracs(coords: &[i64], denom: i64) -> Self {
        RationalVector(coords.iter().map(|&c| frac(c, denom)).collect())
    }

    pub fn parse(coords: &[impl AsRef<str>]) -> Result<Self> {
        coords
            .iter()
            .map(|c| parse_rational(c.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(RationalVector)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Standard scalar product.
    pub fn dot(&self, other: &RationalVector) -> Result<Rational> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(dot_unchecked(&self.0, &other.0))
    }

    pub fn norm_sq(&self) -> Rational {
        dot_unchecked(&self.0, &self.0)
    }

    pub fn scale(&self, c: &Rational) -> RationalVector {
        RationalVector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_rational).collect()
    }

    /// Returns the vector with `extra` appended coordinates set to zero.
    pub fn padded(&self, offset: usize, total: usize) -> RationalVector {
        let mut out = vec![Rational::zero(); total];
        for (i, c) in self.0.iter().enumerate() {
            out[offset + i] = c.clone();
        }
        RationalVector(out)
    }
}

fn dot_unchecked(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Dot product for vectors whose dimensions are known to agree.
pub(crate) fn ip(a: &RationalVector, b: &RationalVector) -> Rational {
    debug_assert_eq!(a.dim(), b.dim());
    dot_unchecked(&a.0, &b.0)
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

impl Add for &RationalVector {
    type Output = RationalVector;
    fn add(self, rhs: &RationalVector) -> RationalVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;
    fn sub(self, rhs: &RationalVector) -> RationalVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RationalVector {
    type Output = RationalVector;
    fn neg(self) -> RationalVector {
        RationalVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<&RationalVector> for &Rational {
    type Output = RationalVector;
    fn mul(self, rhs: &RationalVector) -> RationalVector {
        rhs.scale(self)
    }
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        RationalVector::parse(&raw).map_err(serde::de::Error::custom)
    }
}

/// A dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(RationalMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_ints(rows: usize, cols: usize, data: &[i64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        RationalMatrix {
            rows,
            cols,
            data: data.iter().map(|&x| rat(x)).collect(),
        }
    }

    /// Matrix whose rows are the given vectors.
    pub fn from_rows(rows: &[RationalVector]) -> Result<Self> {
        let cols = rows.first().map_or(0, RationalVector::dim);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.dim() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.dim(),
                });
            }
            data.extend(r.coords().iter().cloned());
        }
        Ok(RationalMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[RationalVector]) -> Result<Self> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> RationalVector {
        RationalVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> RationalVector {
        RationalVector((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &RationalMatrix,
        f: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<RationalMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn apply(&self, v: &RationalVector) -> Result<RationalVector> {
        if v.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.dim(),
            });
        }
        Ok(RationalVector(
            (0..self.rows)
                .map(|i| dot_unchecked(&self.data[i * self.cols..(i + 1) * self.cols], &v.0))
                .collect(),
        ))
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).fold(Rational::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).recip();
            for j in col..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r != row && !m.get(r, col).is_zero() {
                    let factor = m.get(r, col).clone();
                    for j in col..m.cols {
                        let v = m.get(r, j) - &factor * m.get(row, j);
                        m.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Result<RationalMatrix> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "inverse of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::LinearlyDependent);
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("determinant of non-square matrix".into()));
        }
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            det *= &pivot;
            for r in col + 1..n {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col) / &pivot;
                for j in col..n {
                    let v = m.get(r, j) - &factor * m.get(col, j);
                    m.set(r, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Basis of `{x : self · x = 0}`.
    pub fn nullspace(&self) -> Vec<RationalVector> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                RationalVector(v)
            })
            .collect()
    }

    /// Solves `self · x = b`, returning one solution (free variables zero)
    /// or `None` when the system is inconsistent.
    pub fn solve(&self, b: &RationalVector) -> Result<Option<RationalVector>> {
        if b.dim() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: b.dim(),
            });
        }
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b.0[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Ok(Some(RationalVector(x)))
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).to_strings())
            .collect()
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| format!("[{}]", self.row(i).to_strings().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        let rows = raw
            .iter()
            .map(|r| RationalVector::parse(r))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        RationalMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Rank of a family of vectors.
pub fn rank_of(vectors: &[RationalVector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    RationalMatrix::from_rows(vectors).map_or(0, |m| m.rank())
}

/// Basis of the orthogonal complement of `span(vectors)` in `Q^dim`.
pub fn orthogonal_complement(vectors: &[RationalVector], dim: usize) -> Vec<RationalVector> {
    if vectors.is_empty() {
        return (0..dim).map(|i| RationalVector::unit(dim, i)).collect();
    }
    RationalMatrix::from_rows(vectors)
        .expect("vectors of equal dimension")
        .nullspace()
}

pub fn gram_matrix(vectors: &[RationalVector]) -> RationalMatrix {
    let n = vectors.len();
    let mut g = RationalMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let d = ip(&vectors[i], &vectors[j]);
            g.set(j, i, d.clone());
            g.set(i, j, d);
        }
    }
    g
}

/// The unique linear map sending `domain_basis[i]` to `images[i]`.
///
/// The domain basis must be a basis of its whole ambient space.
pub fn linear_map_from_images(
    domain_basis: &[RationalVector],
    images: &[RationalVector],
) -> Result<RationalMatrix> {
    if domain_basis.len() != images.len() {
        return Err(Error::DimensionMismatch {
            expected: domain_basis.len(),
            found: images.len(),
        });
    }
    let Some(first) = domain_basis.first() else {
        return Err(Error::NotSpanning { rank: 0, dim: 0 });
    };
    let dim = first.dim();
    let d = RationalMatrix::from_columns(domain_basis)?;
    let rank = d.rank();
    if rank < domain_basis.len() {
        return Err(Error::LinearlyDependent);
    }
    if rank < dim {
        return Err(Error::NotSpanning { rank, dim });
    }
    let im = RationalMatrix::from_columns(images)?;
    im.mul(&d.inverse()?)
}

/// A full-rank lattice inside the span of its basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    basis: Vec<RationalVector>,
    ambient_dim: usize,
    gram: RationalMatrix,
    gram_inv: RationalMatrix,
}

impl Lattice {
    pub fn new(basis: Vec<RationalVector>) -> Result<Self> {
        let Some(first) = basis.first() else {
            return Err(Error::NotSpanning { rank: 0, dim: 0 });
        };
        let ambient_dim = first.dim();
        if let Some(bad) = basis.iter().find(|b| b.dim() != ambient_dim) {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: bad.dim(),
            });
        }
        if rank_of(&basis) < basis.len() {
            return Err(Error::LinearlyDependent);
        }
        let gram = gram_matrix(&basis);
        let gram_inv = gram.inverse()?;
        Ok(Lattice {
            basis,
            ambient_dim,
            gram,
            gram_inv,
        })
    }

    pub fn basis(&self) -> &[RationalVector] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn gram(&self) -> &RationalMatrix {
        &self.gram
    }

    /// Coordinates of `v` in the lattice basis, or `None` if `v` is outside
    /// the real span of the basis.
    pub fn coordinates(&self, v: &RationalVector) -> Option<Vec<Rational>> {
        if v.dim() != self.ambient_dim {
            return None;
        }
        let rhs = RationalVector::new(self.basis.iter().map(|b| ip(b, v)).collect());
        let c = self.gram_inv.apply(&rhs).ok()?;
        let back = self.combine(c.coords());
        (back == *v).then(|| c.into_coords())
    }

    pub fn integer_coordinates(&self, v: &RationalVector) -> Option<Vec<BigInt>> {
        let c = self.coordinates(v)?;
        c.iter()
            .all(|x| x.is_integer())
            .then(|| c.into_iter().map(|x| x.to_integer()).collect())
    }

    pub fn contains(&self, v: &RationalVector) -> bool {
        self.integer_coordinates(v).is_some()
    }

    pub fn in_span(&self, v: &RationalVector) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn combine(&self, coeffs: &[Rational]) -> RationalVector {
        let mut out = RationalVector::zeros(self.ambient_dim);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if !c.is_zero() {
                out = &out + &b.scale(c);
            }
        }
        out
    }

    /// All lattice vectors `v` with `0 < (v, v) <= bound`.
    pub fn short_vectors(&self, bound: &Rational) -> Vec<RationalVector> {
        let n = self.rank();
        // q(x) = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2
        let mut q = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                q[i][j] = self.gram.get(i, j).clone();
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                q[j][i] = q[i][j].clone();
                q[i][j] = &q[i][j] / &q[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    let v = &q[k][l] - &q[k][i] * &q[i][l];
                    q[k][l] = v;
                }
            }
        }
        let mut out = Vec::new();
        let mut x = vec![BigInt::zero(); n];
        self.enumerate(&q, n as isize - 1, &mut x, bound.clone(), &mut out);
        out.retain(|v| !v.is_zero());
        out.sort();
        out
    }

    fn enumerate(
        &self,
        q: &[Vec<Rational>],
        i: isize,
        x: &mut Vec<BigInt>,
        remaining: Rational,
        out: &mut Vec<RationalVector>,
    ) {
        if i < 0 {
            let coeffs: Vec<Rational> = x.iter().cloned().map(Rational::from_integer).collect();
            out.push(self.combine(&coeffs));
            return;
        }
        let i = i as usize;
        let n = x.len();
        let mut center = Rational::zero();
        for j in i + 1..n {
            center -= &q[i][j] * Rational::from_integer(x[j].clone());
        }
        let cost = |t: &BigInt| {
            let d = Rational::from_integer(t.clone()) - &center;
            &q[i][i] * &d * &d
        };
        let start = center.ceil().to_integer();
        let mut t = start.clone();
        loop {
            let c = cost(&t);
            if c > remaining {
                break;
            }
            x[i] = t.clone();
            self.enumerate(q, i as isize - 1, x, &remaining - c, out);
            t += 1;
        }
        let mut t = start - 1;
        loop {
            let c = cost(&t);
            if c > remaining {
                break;
            }
            x[i] = t.clone();
            self.enumerate(q, i as isize - 1, x, &remaining - c, out);
            t -= 1;
        }
        x[i] = BigInt::zero();
    }
}

/// Index of a sublattice together with the elementary divisors (> 1) of
/// the quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeIndex {
    pub index: BigInt,
    pub divisors: Vec<BigInt>,
}

/// Computes `[sup : sub]` through the Smith form of the change-of-basis
/// matrix.
pub fn lattice_index(sub: &Lattice, sup: &Lattice) -> Result<LatticeIndex> {
    if sub.ambient_dim() != sup.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: sup.ambient_dim(),
            found: sub.ambient_dim(),
        });
    }
    if sub.rank() != sup.rank() {
        return Err(Error::RankMismatch {
            sub: sub.rank(),
            sup: sup.rank(),
        });
    }
    let rows = sub
        .basis()
        .iter()
        .map(|b| sup.integer_coordinates(b).ok_or(Error::NotSublattice))
        .collect::<Result<Vec<_>>>()?;
    let diag = smith_normal_form(&rows);
    let index = diag.iter().fold(BigInt::one(), |acc, d| acc * d);
    let divisors = diag.into_iter().filter(|d| !d.is_one()).collect();
    Ok(LatticeIndex { index, divisors })
}

/// Diagonal of the Smith normal form of an integer matrix (nonzero
/// invariant factors, each dividing the next, all positive).
pub fn smith_normal_form(matrix: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut m: Vec<Vec<BigInt>> = matrix.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        // smallest nonzero entry in the remaining block
        let Some((pr, pc)) = min_nonzero(&m, t) else {
            break;
        };
        m.swap(t, pr);
        for row in m.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut dirty = false;
            for r in t + 1..rows {
                if m[r][t].is_zero() {
                    continue;
                }
                let qt = m[r][t].div_floor(&m[t][t]);
                for c in t..cols {
                    let v = &m[r][c] - &qt * &m[t][c];
                    m[r][c] = v;
                }
                if !m[r][t].is_zero() {
                    dirty = true;
                }
            }
            for c in t + 1..cols {
                if m[t][c].is_zero() {
                    continue;
                }
                let qt = m[t][c].div_floor(&m[t][t]);
                for r in t..rows {
                    let v = &m[r][c] - &qt * &m[r][t];
                    m[r][c] = v;
                }
                if !m[t][c].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility of the remaining block
                let p = m[t][t].clone();
                let offending = (t + 1..rows)
                    .find(|&r| (t + 1..cols).any(|c| !(&m[r][c] % &p).is_zero()));
                match offending {
                    Some(r) => {
                        for c in t..cols {
                            let v = &m[t][c] + &m[r][c];
                            m[t][c] = v;
                        }
                    }
                    None => break,
                }
            }
            let (pr, pc) = min_nonzero(&m, t).expect("pivot block is nonzero");
            m.swap(t, pr);
            for row in m.iter_mut() {
                row.swap(t, pc);
            }
        }
        diag.push(m[t][t].abs());
    }
    diag
}

fn min_nonzero(m: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (r, row) in m.iter().enumerate().skip(t) {
        for (c, v) in row.iter().enumerate().skip(t) {
            if v.is_zero() {
                continue;
            }
            if best.is_none_or(|(br, bc)| v.abs() < m[br][bc].abs()) {
                best = Some((r, c));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn v(c: &[i64]) -> RationalVector {
        RationalVector::from_ints(c)
    }

    #[test]
    fn dot_examples() {
        assert_eq!(v(&[1, 0, 0, 0]).dot(&v(&[0, 1, 0, 0])).unwrap(), rat(0));
        let a = v(&[1, -1, 0, 0]);
        assert_eq!(a.dot(&a).unwrap(), rat(2));
        let f4 = RationalVector::from_fracs(&[1, -1, -1, -1], 2);
        assert_eq!(f4.dot(&f4).unwrap(), rat(1));
    }

    #[test]
    fn dot_dimension_mismatch() {
        assert!(matches!(
            v(&[1, 0]).dot(&v(&[1, 0, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn parse_and_format_round_trip() {
        assert_eq!(parse_rational("-3/6").unwrap(), frac(-1, 2));
        assert_eq!(format_rational(&frac(-1, 2)), "-1/2");
        assert_eq!(format_rational(&rat(4)), "4");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn map_from_images_examples() {
        let e = [v(&[1, 0]), v(&[0, 1])];
        assert!(linear_map_from_images(&e, &e).unwrap().is_identity());
        let swap = linear_map_from_images(&e, &[v(&[0, 1]), v(&[1, 0])]).unwrap();
        assert_eq!(swap, RationalMatrix::from_ints(2, 2, &[0, 1, 1, 0]));
        assert_eq!(
            linear_map_from_images(&[v(&[1, 1]), v(&[2, 2])], &e),
            Err(Error::LinearlyDependent)
        );
    }

    #[test]
    fn map_from_images_negates_a2_span() {
        // simple roots of A2 plus the fixed normal (1,1,1)
        let a1 = v(&[1, -1, 0]);
        let a2 = v(&[0, 1, -1]);
        let n = v(&[1, 1, 1]);
        let m = linear_map_from_images(
            &[a1.clone(), a2.clone(), n.clone()],
            &[-&a1, -&a2, n.clone()],
        )
        .unwrap();
        let x = v(&[2, -5, 3]);
        assert_eq!(m.apply(&x).unwrap(), -&x);
        assert_eq!(m.apply(&n).unwrap(), n);
    }

    #[test]
    fn inverse_and_determinant() {
        let m = RationalMatrix::from_ints(3, 3, &[2, 1, 0, 1, 3, 1, 0, 1, 4]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert_eq!(m.determinant().unwrap(), rat(18));
        let singular = RationalMatrix::from_ints(2, 2, &[1, 2, 2, 4]);
        assert_eq!(singular.determinant().unwrap(), rat(0));
        assert!(singular.inverse().is_err());
    }

    #[test]
    fn nullspace_and_solve() {
        let m = RationalMatrix::from_ints(1, 3, &[1, 1, 1]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for x in &ns {
            assert!(m.apply(x).unwrap().is_zero());
        }
        let sys = RationalMatrix::from_ints(2, 2, &[1, 1, 1, -1]);
        let x = sys.solve(&v(&[3, 1])).unwrap().unwrap();
        assert_eq!(x, v(&[2, 1]));
        let bad = RationalMatrix::from_ints(2, 2, &[1, 1, 1, 1]);
        assert_eq!(bad.solve(&v(&[1, 2])).unwrap(), None);
    }

    #[test]
    fn smith_form_small() {
        let m = |rows: &[&[i64]]| -> Vec<Vec<BigInt>> {
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect()
        };
        let d = smith_normal_form(&m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        let d: Vec<i64> = d.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(d, vec![2, 6, 12]);
        let d = smith_normal_form(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn lattice_membership_and_index() {
        let z2 = Lattice::new(vec![v(&[1, 0]), v(&[0, 1])]).unwrap();
        let sub = Lattice::new(vec![v(&[2, 0]), v(&[1, 3])]).unwrap();
        assert!(z2.contains(&v(&[5, -7])));
        assert!(!sub.contains(&v(&[1, 0])));
        let idx = lattice_index(&sub, &z2).unwrap();
        assert_eq!(idx.index, BigInt::from(6));
        assert_eq!(lattice_index(&z2, &z2).unwrap().index, BigInt::one());
        assert_eq!(lattice_index(&z2, &sub), Err(Error::NotSublattice));
        let line = Lattice::new(vec![v(&[1, 0])]).unwrap();
        assert!(matches!(
            lattice_index(&line, &z2),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn short_vectors_of_z4() {
        let z4 = Lattice::new((0..4).map(|i| RationalVector::unit(4, i)).collect()).unwrap();
        assert_eq!(z4.short_vectors(&rat(1)).len(), 8);
        // norm 2: 24 vectors ±e_i±e_j, plus the 8 of norm 1
        assert_eq!(z4.short_vectors(&rat(2)).len(), 32);
    }
}
