//! Linear algebra over the two-element field.
//!
//! Vectors of 𝔽₂^m are packed into a single `u64`, so the ambient dimension is
//! capped at [`MAX_DIM`]. Coordinate 0 is the most significant of the `m` used
//! bits and renders leftmost, which makes numeric order on the packed word
//! agree with lexicographic order on the rendered bitstring.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported ambient dimension (one machine word).
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("ambient dimension {0} exceeds the supported maximum of {MAX_DIM}")]
    DimensionTooLarge(usize),
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("invalid subspace dimension {dim} for ambient dimension {ambient}")]
    InvalidSubspaceDim { dim: usize, ambient: usize },
    #[error("invalid bitstring {0:?}")]
    Parse(String),
}

fn mask(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// A vector of 𝔽₂^m.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vector {
    len: u8,
    bits: u64,
}

impl Gf2Vector {
    pub fn zero(len: usize) -> Self {
        assert!(len <= MAX_DIM, "dimension {len} exceeds {MAX_DIM}");
        Self {
            len: len as u8,
            bits: 0,
        }
    }

    /// Builds a vector from its packed word. Bits above `len` are rejected.
    pub fn from_word(bits: u64, len: usize) -> Result<Self, Gf2Error> {
        if len > MAX_DIM {
            return Err(Gf2Error::DimensionTooLarge(len));
        }
        if bits & !mask(len) != 0 {
            return Err(Gf2Error::Parse(format!(
                "{bits:#x} does not fit in {len} bits"
            )));
        }
        Ok(Self {
            len: len as u8,
            bits,
        })
    }

    /// The unit vector with a one at coordinate `index`.
    pub fn unit(index: usize, len: usize) -> Self {
        assert!(index < len && len <= MAX_DIM);
        Self {
            len: len as u8,
            bits: 1u64 << (len - 1 - index),
        }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        assert!(len <= MAX_DIM);
        Self {
            len: len as u8,
            bits: rng.gen::<u64>() & mask(len),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn word(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len());
        (self.bits >> (self.len() - 1 - index)) & 1 == 1
    }

    /// Coordinate index of the leftmost one, if any.
    pub fn pivot(&self) -> Option<usize> {
        if self.bits == 0 {
            None
        } else {
            Some(self.len() - 1 - (63 - self.bits.leading_zeros() as usize))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Self {
            len: self.len,
            bits: self.bits ^ other.bits,
        })
    }

    /// All 2^len vectors in increasing (lexicographic) order.
    pub fn all(len: usize) -> impl Iterator<Item = Gf2Vector> {
        assert!(len < 32, "refusing to enumerate 2^{len} vectors");
        (0..1u64 << len).map(move |bits| Gf2Vector {
            len: len as u8,
            bits,
        })
    }
}

impl std::ops::Add for Gf2Vector {
    type Output = Gf2Vector;

    /// Panics on mismatched lengths; use [`Gf2Vector::checked_add`] on untrusted input.
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.len, rhs.len, "adding vectors of different lengths");
        Self {
            len: self.len,
            bits: self.bits ^ rhs.bits,
        }
    }
}

impl std::ops::AddAssign for Gf2Vector {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl fmt::Display for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Vector({self})")
    }
}

impl FromStr for Gf2Vector {
    type Err = Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > MAX_DIM {
            return Err(Gf2Error::DimensionTooLarge(s.len()));
        }
        let mut bits = 0u64;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Gf2Error::Parse(s.to_string())),
                };
        }
        Ok(Self {
            len: s.len() as u8,
            bits,
        })
    }
}

impl Serialize for Gf2Vector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Gf2Vector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A subspace of 𝔽₂^m held as its reduced row-echelon basis.
///
/// Basis vectors are ordered by strictly increasing pivot coordinate and every
/// pivot column is zero in all other basis vectors, so equal subspaces have
/// identical bases.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Subspace {
    ambient_dim: usize,
    basis: Vec<Gf2Vector>,
}

impl Gf2Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        assert!(ambient_dim <= MAX_DIM);
        Self {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: (0..ambient_dim)
                .map(|i| Gf2Vector::unit(i, ambient_dim))
                .collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Gf2Vector] {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    fn reduce(&self, v: u64) -> u64 {
        let mut v = v;
        for b in &self.basis {
            let p = b.bits.leading_zeros();
            if v & (1u64 << (63 - p)) != 0 {
                v ^= b.bits;
            }
        }
        v
    }

    fn check_len(&self, v: &Gf2Vector) -> Result<(), Gf2Error> {
        if v.len() != self.ambient_dim {
            return Err(Gf2Error::LengthMismatch {
                expected: self.ambient_dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, v: &Gf2Vector) -> Result<bool, Gf2Error> {
        self.check_len(v)?;
        Ok(self.reduce(v.bits) == 0)
    }

    /// Inserts `v`, keeping the basis reduced. Returns whether the dimension grew.
    pub fn insert(&mut self, v: &Gf2Vector) -> Result<bool, Gf2Error> {
        self.check_len(v)?;
        let r = self.reduce(v.bits);
        if r == 0 {
            return Ok(false);
        }
        let pivot_bit = 1u64 << (63 - r.leading_zeros());
        for b in &mut self.basis {
            if b.bits & pivot_bit != 0 {
                b.bits ^= r;
            }
        }
        let new = Gf2Vector {
            len: self.ambient_dim as u8,
            bits: r,
        };
        // larger word = smaller pivot coordinate
        let pos = self.basis.partition_point(|b| b.bits > r);
        self.basis.insert(pos, new);
        Ok(true)
    }

    pub fn join(&self, other: &Gf2Subspace) -> Result<Gf2Subspace, Gf2Error> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Gf2Error::LengthMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        let mut out = self.clone();
        for b in &other.basis {
            out.insert(b)?;
        }
        Ok(out)
    }

    /// Every element of the subspace, in increasing order.
    pub fn elements(&self) -> Vec<Gf2Vector> {
        assert!(
            self.dim() < 32,
            "refusing to enumerate a subspace of dimension {}",
            self.dim()
        );
        let mut out: Vec<Gf2Vector> = (0u64..1 << self.dim())
            .map(|mask| {
                let mut bits = 0;
                for (i, b) in self.basis.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        bits ^= b.bits;
                    }
                }
                Gf2Vector {
                    len: self.ambient_dim as u8,
                    bits,
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Basis vectors rendered and sorted lexicographically (the wire form).
    pub fn to_bitstrings(&self) -> Vec<String> {
        let mut out: Vec<String> = self.basis.iter().map(|b| b.to_string()).collect();
        out.sort();
        out
    }
}

impl fmt::Debug for Gf2Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for (i, b) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}} ⊆ F2^{}", self.ambient_dim)
    }
}

/// Canonical subspace spanned by `vectors`.
pub fn rref_basis(vectors: &[Gf2Vector], ambient_dim: usize) -> Result<Gf2Subspace, Gf2Error> {
    if ambient_dim > MAX_DIM {
        return Err(Gf2Error::DimensionTooLarge(ambient_dim));
    }
    let mut s = Gf2Subspace::zero(ambient_dim);
    for v in vectors {
        s.insert(v)?;
    }
    Ok(s)
}

/// Coefficients expressing `target` in `basis_list`, or `None` when it lies
/// outside the span. The list must be linearly independent; a dependent list
/// is reported as [`Gf2Error::DependentBasis`].
pub fn coordinates(
    basis_list: &[Gf2Vector],
    target: &Gf2Vector,
) -> Result<Option<Vec<bool>>, Gf2Error> {
    let m = target.len();
    if basis_list.len() > m {
        return Err(Gf2Error::DependentBasis);
    }
    // Each row tracks which input vectors were combined into it.
    let mut rows: Vec<(u64, u64)> = Vec::with_capacity(basis_list.len());
    for (i, v) in basis_list.iter().enumerate() {
        if v.len() != m {
            return Err(Gf2Error::LengthMismatch {
                expected: m,
                found: v.len(),
            });
        }
        let (mut bits, mut combo) = (v.bits, 1u64 << i);
        for &(rb, rc) in &rows {
            if bits & (1u64 << (63 - rb.leading_zeros())) != 0 {
                bits ^= rb;
                combo ^= rc;
            }
        }
        if bits == 0 {
            return Err(Gf2Error::DependentBasis);
        }
        rows.push((bits, combo));
        // keep rows sorted by descending leading bit so elimination stays ordered
        rows.sort_unstable_by_key(|r| std::cmp::Reverse(r.0));
        let fresh = rows.iter().position(|r| r.0 == bits).expect("just pushed");
        let pivot = 1u64 << (63 - bits.leading_zeros());
        for (j, row) in rows.iter_mut().enumerate() {
            if j != fresh && row.0 & pivot != 0 {
                row.0 ^= bits;
                row.1 ^= combo;
            }
        }
    }
    let (mut rest, mut combo) = (target.bits, 0u64);
    for &(rb, rc) in &rows {
        if rest & (1u64 << (63 - rb.leading_zeros())) != 0 {
            rest ^= rb;
            combo ^= rc;
        }
    }
    if rest != 0 {
        return Ok(None);
    }
    Ok(Some(
        (0..basis_list.len()).map(|i| combo >> i & 1 == 1).collect(),
    ))
}

/// Samples an ℓ-dimensional subspace: the first vector uniform over the
/// nonzero vectors, each later one uniform over the vectors outside the span
/// so far (rejection sampling over uniform words).
pub fn sample_subspace<R: Rng + ?Sized>(
    m: usize,
    ell: usize,
    rng: &mut R,
) -> Result<Gf2Subspace, Gf2Error> {
    if m > MAX_DIM {
        return Err(Gf2Error::DimensionTooLarge(m));
    }
    if ell == 0 || ell >= m {
        return Err(Gf2Error::InvalidSubspaceDim {
            dim: ell,
            ambient: m,
        });
    }
    let mut s = Gf2Subspace::zero(m);
    while s.dim() < ell {
        let v = Gf2Vector::random(m, rng);
        s.insert(&v)?;
    }
    Ok(s)
}
