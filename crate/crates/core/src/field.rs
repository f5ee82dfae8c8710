//! Arithmetic in the finite field F_q, q = p^r.
//!
//! An element is stored as a `u32` code: the coefficients (c_0, .., c_{r-1})
//! of c_0 + c_1 α + .. + c_{r-1} α^{r-1}, where α is a root of the defining
//! polynomial, packed little-endian in base p. For r = 1 the code is the
//! residue itself.
//!
//! Multiplication goes through exp/log tables over a primitive element, so
//! every operation is a handful of table lookups.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A field element code in `[0, q)`.
pub type Elem = u32;

/// Largest field order we are willing to tabulate.
pub const MAX_FIELD_ORDER: u64 = 1 << 24;

pub const MAX_DEGREE: u32 = 6;

#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u32,
    r: u32,
    q: u32,
    poly: Vec<u32>,
    exp: Vec<Elem>,
    log: Vec<u32>,
    trace: Vec<u32>,
    dual: Vec<u32>,
    roots: Vec<Complex64>,
}

impl FieldCtx {
    /// Builds F_{p^r}. Without an explicit polynomial the smallest monic
    /// irreducible one is chosen, ordering candidates by the base-p integer
    /// formed from their low coefficients (c_0 least significant).
    pub fn new(p: u32, r: u32, poly: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r == 0 || r > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(r));
        }
        let q = (p as u64).pow(r);
        if q > MAX_FIELD_ORDER {
            return Err(Error::cap("field order", q as u128, MAX_FIELD_ORDER as u128));
        }
        let q = q as u32;

        let poly = match poly {
            Some(poly) => {
                if poly.len() != r as usize + 1 {
                    return Err(Error::InvalidPolynomial(format!(
                        "expected {} coefficients, got {}",
                        r + 1,
                        poly.len()
                    )));
                }
                if poly[r as usize] != 1 {
                    return Err(Error::InvalidPolynomial("polynomial is not monic".into()));
                }
                if let Some(c) = poly.iter().find(|&&c| c >= p) {
                    return Err(Error::InvalidPolynomial(format!(
                        "coefficient {c} is not reduced mod {p}"
                    )));
                }
                if !is_irreducible(&poly, p) {
                    return Err(Error::ReduciblePolynomial(poly, p));
                }
                poly
            }
            None => smallest_irreducible(p, r),
        };

        let mut ctx = FieldCtx {
            p,
            r,
            q,
            poly,
            exp: Vec::new(),
            log: Vec::new(),
            trace: Vec::new(),
            dual: Vec::new(),
            roots: (0..p)
                .map(|t| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / p as f64))
                .collect(),
        };
        ctx.build_tables();
        Ok(ctx)
    }

    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let g = self.find_primitive();
        let mut exp = Vec::with_capacity(q - 1);
        let mut log = vec![0u32; q];
        let mut x: Elem = 1;
        for i in 0..q - 1 {
            exp.push(x);
            log[x as usize] = i as u32;
            x = self.mul_slow(x, g);
        }
        self.exp = exp;
        self.log = log;

        // Tr(x) = x + x^p + .. + x^{p^{r-1}} always lands in the prime subfield.
        let mut trace = vec![0u32; q];
        for x in 1..q as Elem {
            let mut acc = 0;
            let mut y = x;
            for _ in 0..self.r {
                acc = self.add(acc, y);
                y = self.pow(y, self.p as u64);
            }
            debug_assert!(acc < self.p, "trace left the prime field");
            trace[x as usize] = acc;
        }
        self.trace = trace;

        // dual[x] packs (Tr(α^a x))_a as a base-p code; x -> dual[x] is the
        // F_p-linear isomorphism induced by the trace form.
        let basis: Vec<Elem> = (0..self.r).map(|a| self.p.pow(a)).collect();
        self.dual = (0..q as Elem)
            .map(|x| {
                basis
                    .iter()
                    .rev()
                    .fold(0, |acc, &b| acc * self.p + self.trace[self.mul(b, x) as usize])
            })
            .collect();
    }

    fn find_primitive(&self) -> Elem {
        if self.q == 2 {
            return 1;
        }
        let order = (self.q - 1) as u64;
        let factors = prime_factors(order);
        (2..self.q)
            .find(|&g| factors.iter().all(|&l| self.pow_slow(g, order / l) != 1))
            .expect("every finite field has a primitive element")
    }

    fn coeffs(&self, x: Elem) -> Vec<u32> {
        let mut c = Vec::with_capacity(self.r as usize);
        let mut x = x;
        for _ in 0..self.r {
            c.push(x % self.p);
            x /= self.p;
        }
        c
    }

    fn pack_coeffs(&self, c: &[u32]) -> Elem {
        c.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        let prod = poly_mul(&self.coeffs(a), &self.coeffs(b), self.p);
        let mut rem = poly_rem(&prod, &self.poly, self.p);
        rem.resize(self.r as usize, 0);
        self.pack_coeffs(&rem)
    }

    fn pow_slow(&self, mut base: Elem, mut e: u64) -> Elem {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Defining polynomial, low coefficient first, monic of degree r.
    pub fn poly(&self) -> &[u32] {
        &self.poly
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p;
        if self.r == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        let (mut a, mut b, mut out, mut w) = (a, b, 0, 1);
        for _ in 0..self.r {
            let s = a % p + b % p;
            out += (if s >= p { s - p } else { s }) * w;
            a /= p;
            b /= p;
            w *= p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.p;
        if self.r == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        let (mut a, mut out, mut w) = (a, 0, 1);
        for _ in 0..self.r {
            let c = a % p;
            out += (if c == 0 { 0 } else { p - c }) * w;
            a /= p;
            w *= p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q as usize - 1;
        let i = self.log[a as usize] as usize + self.log[b as usize] as usize;
        self.exp[if i >= n { i - n } else { i }]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return None;
        }
        let n = self.q as usize - 1;
        Some(self.exp[(n - self.log[a as usize] as usize) % n])
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.q - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as Elem
    }

    /// Absolute trace to F_p, returned as an integer in `[0, p)`.
    #[inline]
    pub fn trace(&self, x: Elem) -> u32 {
        self.trace[x as usize]
    }

    /// Base-p packing of (Tr(α^a x))_{a < r}.
    #[inline]
    pub fn trace_dual(&self, x: Elem) -> u32 {
        self.dual[x as usize]
    }

    /// e^{2πi t/p} for t in [0, p).
    #[inline]
    pub fn root_of_unity(&self, t: u32) -> Complex64 {
        self.roots[t as usize]
    }

    /// The canonical additive character e^{2πi Tr(t)/p}.
    #[inline]
    pub fn char_value(&self, t: Elem) -> Complex64 {
        self.roots[self.trace[t as usize] as usize]
    }

    /// True when `x` is a nonzero square.
    pub fn is_square(&self, x: Elem) -> bool {
        x != 0 && (self.p == 2 || self.log[x as usize].is_multiple_of(2))
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.q
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut a = trim(a.to_vec());
    let dm = m.len() - 1;
    let p64 = p as u64;
    while a.len() > dm {
        let lead = *a.last().unwrap() as u64;
        let shift = a.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let v = a[shift + i] as u64 + p64 - (lead * c as u64) % p64;
            a[shift + i] = (v % p64) as u32;
        }
        a = trim(a);
    }
    a
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for s in 1..=deg / 2 {
        let count = (p as u64).pow(s as u32);
        for code in 0..count {
            let mut divisor = Vec::with_capacity(s + 1);
            let mut c = code;
            for _ in 0..s {
                divisor.push((c % p as u64) as u32);
                c /= p as u64;
            }
            divisor.push(1);
            if poly_rem(poly, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, r: u32) -> Vec<u32> {
    let count = (p as u64).pow(r);
    (0..count)
        .map(|code| {
            let mut poly = Vec::with_capacity(r as usize + 1);
            let mut c = code;
            for _ in 0..r {
                poly.push((c % p as u64) as u32);
                c /= p as u64;
            }
            poly.push(1);
            poly
        })
        .find(|poly| is_irreducible(poly, p))
        .expect("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> FieldCtx {
        FieldCtx::new(3, 2, Some(vec![1, 0, 1])).unwrap()
    }

    #[test]
    fn prime_field_default_poly_is_x() {
        let f = FieldCtx::new(3, 1, None).unwrap();
        assert_eq!(f.poly(), &[0, 1]);
        assert_eq!(f.q(), 3);
    }

    #[test]
    fn x2_plus_1_over_f3_is_accepted() {
        let f = f9();
        assert_eq!(f.q(), 9);
        // the default choice for (3, 2) is the same polynomial
        assert_eq!(FieldCtx::new(3, 2, None).unwrap().poly(), &[1, 0, 1]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            FieldCtx::new(3, 2, Some(vec![0, 1, 1])).unwrap_err(),
            Error::ReduciblePolynomial(vec![0, 1, 1], 3)
        );
        assert_eq!(FieldCtx::new(4, 1, None).unwrap_err(), Error::NotPrime(4));
        assert_eq!(FieldCtx::new(2, 7, None).unwrap_err(), Error::DegreeTooLarge(7));
        assert!(matches!(
            FieldCtx::new(3, 2, Some(vec![1, 0, 2])),
            Err(Error::InvalidPolynomial(_))
        ));
    }

    #[test]
    fn trace_examples() {
        assert_eq!(FieldCtx::prime(3).unwrap().trace(2), 2);
        let f = f9();
        assert_eq!(f.trace(1), 2);
        // α is the code 3 (c_1 = 1)
        assert_eq!(f.trace(3), 0);
    }

    #[test]
    fn char_value_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        assert!((f3.char_value(0) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!((f3.char_value(1) - w).norm() < 1e-12);
        assert!((f9().char_value(3) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn field_axioms_small_fields() {
        for (p, r) in [(2, 1), (2, 3), (3, 2), (5, 1), (2, 4), (7, 2), (3, 3)] {
            let f = FieldCtx::new(p, r, None).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul_slow(a, b));
                    assert_eq!(f.add(a, b), f.add(b, a));
                }
            }
        }
    }

    #[test]
    fn trace_is_linear_and_onto() {
        for (p, r) in [(2, 2), (2, 3), (3, 2), (3, 3), (3, 4), (5, 2), (7, 2), (2, 6)] {
            let f = FieldCtx::new(p, r, None).unwrap();
            let mut hit = vec![false; p as usize];
            for x in f.elements() {
                hit[f.trace(x) as usize] = true;
                for y in f.elements() {
                    assert_eq!(f.trace(f.add(x, y)), (f.trace(x) + f.trace(y)) % p);
                }
                for c in 0..p {
                    assert_eq!(f.trace(f.mul(c, x)), (c * f.trace(x)) % p);
                }
            }
            assert!(hit.iter().all(|&h| h), "trace not onto for ({p},{r})");
        }
    }

    #[test]
    fn trace_dual_is_bijective() {
        for (p, r) in [(2, 3), (3, 2), (5, 2), (2, 5)] {
            let f = FieldCtx::new(p, r, None).unwrap();
            let mut seen = vec![false; f.q() as usize];
            for x in f.elements() {
                seen[f.trace_dual(x) as usize] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn squares() {
        let f = FieldCtx::prime(7).unwrap();
        let sq: Vec<u32> = f.elements().filter(|&x| f.is_square(x)).collect();
        assert_eq!(sq, vec![1, 2, 4]);
        // -1 is a square in F_9
        let f = f9();
        assert!(f.is_square(f.neg(1)));
    }
}
