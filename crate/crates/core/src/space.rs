//! The vector space F_q^d with integer-indexed vectors.
//!
//! A vector (x_0, .., x_{d-1}) has index Σ x_j q^j with each x_j an element
//! code, so the index is also the base-p digit string of length d·r.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};

/// Default cap on q^d for dense arrays indexed by vectors.
pub const DEFAULT_INDEX_CAP: u64 = 2_000_000;

#[derive(Debug)]
pub struct Space {
    field: Arc<FieldCtx>,
    d: usize,
    size: usize,
    norms: OnceLock<Vec<Elem>>,
}

/// A vector given by explicit coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vector {
    pub coords: Vec<Elem>,
}

impl Vector {
    pub fn new(coords: Vec<Elem>) -> Self {
        Vector { coords }
    }

    pub fn zero(d: usize) -> Self {
        Vector { coords: vec![0; d] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl Space {
    pub fn new(field: Arc<FieldCtx>, d: usize) -> Result<Arc<Self>> {
        Self::with_cap(field, d, DEFAULT_INDEX_CAP)
    }

    pub fn with_cap(field: Arc<FieldCtx>, d: usize, cap: u64) -> Result<Arc<Self>> {
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        let size = (field.q() as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::cap("q^d", size, cap as u128));
        }
        Ok(Arc::new(Space {
            field,
            d,
            size: size as usize,
            norms: OnceLock::new(),
        }))
    }

    /// Convenience constructor building the field with its default polynomial.
    pub fn build(p: u32, r: u32, d: usize) -> Result<Arc<Self>> {
        Self::new(Arc::new(FieldCtx::new(p, r, None)?), d)
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// Number of vectors, q^d.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn encode(&self, coords: &[Elem]) -> Result<usize> {
        if coords.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: coords.len(),
            });
        }
        let q = self.q();
        if let Some(&c) = coords.iter().find(|&&c| c >= q) {
            return Err(Error::InvalidInput(format!("element {c} is not below q = {q}")));
        }
        Ok(coords
            .iter()
            .rev()
            .fold(0usize, |acc, &c| acc * q as usize + c as usize))
    }

    pub fn decode(&self, index: usize) -> Vec<Elem> {
        let q = self.q() as usize;
        let mut out = Vec::with_capacity(self.d);
        let mut x = index;
        for _ in 0..self.d {
            out.push((x % q) as Elem);
            x /= q;
        }
        out
    }

    pub fn vector(&self, index: usize) -> Vector {
        Vector::new(self.decode(index))
    }

    pub fn index_of(&self, v: &Vector) -> Result<usize> {
        self.encode(&v.coords)
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        let q = self.q() as usize;
        let f = &self.field;
        let (mut a, mut b, mut out, mut w) = (a, b, 0usize, 1usize);
        for _ in 0..self.d {
            out += f.add((a % q) as Elem, (b % q) as Elem) as usize * w;
            a /= q;
            b /= q;
            w *= q;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        let q = self.q() as usize;
        let f = &self.field;
        let (mut a, mut out, mut w) = (a, 0usize, 1usize);
        for _ in 0..self.d {
            out += f.neg((a % q) as Elem) as usize * w;
            a /= q;
            w *= q;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn scale(&self, c: Elem, a: usize) -> usize {
        let q = self.q() as usize;
        let f = &self.field;
        let (mut a, mut out, mut w) = (a, 0usize, 1usize);
        for _ in 0..self.d {
            out += f.mul(c, (a % q) as Elem) as usize * w;
            a /= q;
            w *= q;
        }
        out
    }

    /// x · y = Σ x_j y_j.
    #[inline]
    pub fn dot(&self, a: usize, b: usize) -> Elem {
        let q = self.q() as usize;
        let f = &self.field;
        let (mut a, mut b, mut acc) = (a, b, 0);
        for _ in 0..self.d {
            acc = f.add(acc, f.mul((a % q) as Elem, (b % q) as Elem));
            a /= q;
            b /= q;
        }
        acc
    }

    /// ||x|| = x_1² + .. + x_d², tabulated on first use.
    #[inline]
    pub fn norm(&self, a: usize) -> Elem {
        self.norms
            .get_or_init(|| self.indices().map(|i| self.dot(i, i)).collect())[a]
    }

    pub fn dot_vec(&self, x: &Vector, y: &Vector) -> Result<Elem> {
        for v in [x, y] {
            if v.dim() != self.d {
                return Err(Error::DimensionMismatch {
                    expected: self.d,
                    got: v.dim(),
                });
            }
        }
        let f = &self.field;
        Ok(x.coords
            .iter()
            .zip(&y.coords)
            .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
    }

    pub fn norm_vec(&self, x: &Vector) -> Result<Elem> {
        self.dot_vec(x, x)
    }

    /// Rank over F_q of the given vectors (Gaussian elimination).
    pub fn rank(&self, vectors: &[usize]) -> usize {
        let f = &self.field;
        let mut rows: Vec<Vec<Elem>> = vectors.iter().map(|&v| self.decode(v)).collect();
        let mut rank = 0;
        for col in 0..self.d {
            let Some(pivot) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let inv = f.inv(rows[rank][col]).expect("pivot is nonzero");
            let pivot_row: Vec<Elem> = rows[rank].iter().map(|&x| f.mul(x, inv)).collect();
            for row in rows.iter_mut().skip(rank + 1) {
                let factor = row[col];
                if factor != 0 {
                    for (x, &pv) in row.iter_mut().zip(&pivot_row) {
                        *x = f.sub(*x, f.mul(factor, pv));
                    }
                }
            }
            rows[rank] = pivot_row;
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dot_and_norm_examples() {
        let s = Space::build(3, 1, 2).unwrap();
        let x = Vector::new(vec![1, 2]);
        let y = Vector::new(vec![2, 1]);
        assert_eq!(s.dot_vec(&x, &y).unwrap(), 1);
        assert_eq!(s.dot_vec(&x, &Vector::zero(2)).unwrap(), 0);

        let s5 = Space::build(5, 1, 2).unwrap();
        assert_eq!(s5.norm_vec(&Vector::new(vec![1, 2])).unwrap(), 0);
        let i = s5.encode(&[1, 2]).unwrap();
        assert_eq!(s5.norm(i), 0);
    }

    #[test]
    fn dimension_mismatch() {
        let s = Space::build(3, 1, 2).unwrap();
        assert_eq!(
            s.dot_vec(&Vector::new(vec![1, 2, 0]), &Vector::zero(2)),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        );
    }

    #[test]
    fn size_cap() {
        let f = Arc::new(FieldCtx::prime(11).unwrap());
        assert!(matches!(
            Space::with_cap(f, 7, 1_000_000),
            Err(Error::SizeCapExceeded { .. })
        ));
    }

    #[test]
    fn encode_decode_bijective() {
        for (p, r, d) in [(3, 1, 4), (2, 3, 3), (5, 2, 2), (7, 1, 3), (3, 2, 3)] {
            let s = Space::build(p, r, d).unwrap();
            assert!(s.size() <= 100_000);
            for i in s.indices() {
                assert_eq!(s.encode(&s.decode(i)).unwrap(), i);
            }
        }
    }

    #[test]
    fn rank_examples() {
        let s = Space::build(7, 1, 3).unwrap();
        let e1 = s.encode(&[1, 0, 0]).unwrap();
        let e2 = s.encode(&[0, 1, 0]).unwrap();
        let v = s.encode(&[3, 5, 0]).unwrap();
        assert_eq!(s.rank(&[e1, e2]), 2);
        assert_eq!(s.rank(&[e1, e2, v]), 2);
        assert_eq!(s.rank(&[e1, s.scale(4, e1)]), 1);
        assert_eq!(s.rank(&[0, 0]), 0);
    }

    proptest! {
        #[test]
        fn dot_is_bilinear(a in 0usize..729, b in 0usize..729, c in 0usize..729, t in 0u32..9) {
            let s = Space::build(3, 2, 3).unwrap();
            let f = s.field();
            prop_assert_eq!(s.dot(s.add(a, b), c), f.add(s.dot(a, c), s.dot(b, c)));
            prop_assert_eq!(s.dot(s.scale(t, a), c), f.mul(t, s.dot(a, c)));
            prop_assert_eq!(s.dot(a, c), s.dot(c, a));
            prop_assert_eq!(s.norm(a), s.dot(a, a));
        }

        #[test]
        fn add_sub_roundtrip(a in 0usize..2401, b in 0usize..2401) {
            let s = Space::build(7, 1, 4).unwrap();
            prop_assert_eq!(s.sub(s.add(a, b), b), a);
            prop_assert_eq!(s.add(a, s.neg(a)), 0);
        }
    }
}
