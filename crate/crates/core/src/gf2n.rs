//! Arithmetic in GF(2^n) for n <= 18.
//!
//! Elements are bit vectors in the polynomial basis `1, α, α², …` where α is
//! the class of `x` modulo the field's defining polynomial. Multiplication
//! goes through log/antilog tables built once per field. The default moduli
//! are the Conway polynomials, which makes every subfield embedding
//! `GF(2^d) -> GF(2^n)` canonical and therefore reproducible.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 18;

/// Conway polynomials over GF(2), indexed by degree. Bit `i` is the
/// coefficient of `x^i`, e.g. `11 = x^3 + x + 1`.
pub const CONWAY: [u32; MAX_DEGREE as usize + 1] = [
    0, 3, 7, 11, 19, 37, 91, 131, 285, 529, 1135, 2053, 4331, 8219, 16553, 32821, 65581, 131081,
    267267,
];

/// An element of GF(2^n); bit `i` is the coefficient of `α^i`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }
}

impl Add for FieldElement {
    type Output = FieldElement;

    // Characteristic 2: addition is XOR.
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl AddAssign for FieldElement {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Inner {
    n: u32,
    modulus: u32,
    conway: bool,
    /// `exp[i] = γ^i` for a fixed generator γ, stored twice over so that
    /// `exp[log a + log b]` needs no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    /// Bit `i` set iff `Tr(α^i) = 1`; the absolute trace is then a parity.
    trace_mask: u32,
}

/// Field descriptor: extension degree, modulus and the multiplication tables.
///
/// Cloning is cheap (reference counted); equality compares degree and modulus.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Field) -> bool {
        self.0.n == other.0.n && self.0.modulus == other.0.modulus
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("n", &self.0.n)
            .field("modulus", &self.0.modulus)
            .field("conway", &self.0.conway)
            .finish()
    }
}

static CONWAY_FIELDS: [OnceLock<Field>; MAX_DEGREE as usize + 1] =
    [const { OnceLock::new() }; MAX_DEGREE as usize + 1];

impl Field {
    /// GF(2^n) defined by the Conway polynomial of degree `n`. Cached.
    pub fn conway(n: u32) -> Result<Field> {
        if n == 0 || n > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(n));
        }
        Ok(CONWAY_FIELDS[n as usize]
            .get_or_init(|| Field::build(n, CONWAY[n as usize], true))
            .clone())
    }

    /// GF(2^n) defined by an explicit irreducible modulus (bit `i` = coefficient
    /// of `x^i`). Embeddings are only available when the modulus is the Conway
    /// polynomial of its degree.
    pub fn with_modulus(modulus: u64) -> Result<Field> {
        if modulus < 2 {
            return Err(Error::BadModulus(modulus));
        }
        let n = 63 - modulus.leading_zeros();
        if n == 0 || n > MAX_DEGREE || !gf2x_is_irreducible(modulus) {
            return Err(Error::BadModulus(modulus));
        }
        let modulus = modulus as u32;
        if modulus == CONWAY[n as usize] {
            return Field::conway(n);
        }
        Ok(Field::build(n, modulus, false))
    }

    fn build(n: u32, modulus: u32, conway: bool) -> Field {
        let q = 1usize << n;
        let order = (q - 1) as u64;
        let generator = (1..q as u32)
            .find(|&g| is_generator(g, n, modulus, order))
            .expect("a finite field has a primitive element");
        let mut exp = vec![0u32; 2 * (q - 1)];
        let mut log = vec![0u32; q];
        let mut x = 1u32;
        for i in 0..q - 1 {
            exp[i] = x;
            exp[i + q - 1] = x;
            log[x as usize] = i as u32;
            x = slow_mul(x, generator, n, modulus);
        }
        let mut trace_mask = 0u32;
        for i in 0..n {
            let mut t = 0u32;
            let mut y = 1u32 << i;
            for _ in 0..n {
                t ^= y;
                y = slow_mul(y, y, n, modulus);
            }
            debug_assert!(t <= 1);
            trace_mask |= t << i;
        }
        Field(Arc::new(Inner {
            n,
            modulus,
            conway,
            exp,
            log,
            trace_mask,
        }))
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.0.n
    }

    /// Field size `2^n`.
    #[inline]
    pub fn q(&self) -> u64 {
        1u64 << self.0.n
    }

    /// Order of the multiplicative group, `2^n - 1`.
    #[inline]
    pub fn group_order(&self) -> u64 {
        self.q() - 1
    }

    /// Modulus bits; this is also the serialized form of the descriptor.
    #[inline]
    pub fn modulus(&self) -> u32 {
        self.0.modulus
    }

    #[inline]
    pub fn is_conway(&self) -> bool {
        self.0.conway
    }

    /// The class of `x`, written α.
    pub fn alpha(&self) -> FieldElement {
        FieldElement(reduce(2, self.0.modulus as u64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q() as u32).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q() as u32).map(FieldElement)
    }

    /// Checks that `bits < 2^n`.
    pub fn element(&self, bits: u64) -> Result<FieldElement> {
        if bits < self.q() {
            Ok(FieldElement(bits as u32))
        } else {
            Err(Error::Invalid(format!(
                "{bits} is not an element of GF(2^{})",
                self.n()
            )))
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let t = &self.0;
        FieldElement(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.inv_nonzero(a))
    }

    /// Inverse of a known nonzero element.
    #[inline]
    pub fn inv_nonzero(&self, a: FieldElement) -> FieldElement {
        debug_assert!(!a.is_zero());
        let t = &self.0;
        let order = t.exp.len() / 2;
        let l = t.log[a.0 as usize] as usize;
        FieldElement(t.exp[(order - l) % order])
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let t = &self.0;
        let order = self.group_order();
        let l = (t.log[a.0 as usize] as u64 * (e % order)) % order;
        FieldElement(t.exp[l as usize])
    }

    /// Absolute trace `a + a^2 + … + a^(2^(n-1))`, as 0 or 1.
    #[inline]
    pub fn trace(&self, a: FieldElement) -> u32 {
        (a.0 & self.0.trace_mask).count_ones() & 1
    }

    /// The unique `b` with `b^m = a`. Requires `gcd(m, 2^n - 1) = 1` unless `a = 0`.
    pub fn root(&self, a: FieldElement, m: u64) -> Result<FieldElement> {
        if a.is_zero() {
            return Ok(FieldElement::ZERO);
        }
        let order = self.group_order();
        let e = mod_inverse(m % order.max(1), order).ok_or(Error::NoUniqueRoot {
            m,
            n: self.n(),
            group_order: order,
        })?;
        Ok(self.pow(a, e))
    }

    /// Square root, i.e. the inverse Frobenius.
    pub fn sqrt(&self, a: FieldElement) -> FieldElement {
        // Frobenius has order n, so its inverse is a -> a^(2^(n-1)).
        let mut b = a;
        for _ in 1..self.n() {
            b = self.square(b);
        }
        b
    }

    /// Image of `a` under the Conway-compatible embedding into `target`.
    pub fn embed(&self, a: FieldElement, target: &Field) -> Result<FieldElement> {
        Ok(self.embedding(target)?.apply(a))
    }

    /// Precomputed embedding `α ↦ α_E^((2^N - 1)/(2^n - 1))`.
    pub fn embedding(&self, target: &Field) -> Result<Embedding> {
        if !target.n().is_multiple_of(self.n()) {
            return Err(Error::Embedding {
                from: self.n(),
                to: target.n(),
                reason: "degree does not divide",
            });
        }
        if !self.is_conway() || !target.is_conway() {
            return Err(Error::Embedding {
                from: self.n(),
                to: target.n(),
                reason: "both moduli must be Conway polynomials",
            });
        }
        let e = target.group_order() / self.group_order();
        let beta = target.pow(target.alpha(), e);
        let mut images = Vec::with_capacity(self.n() as usize);
        let mut p = FieldElement::ONE;
        for _ in 0..self.n() {
            images.push(p);
            p = target.mul(p, beta);
        }
        Ok(Embedding { images })
    }
}

/// A ring embedding `GF(2^n) -> GF(2^N)` given by the images of `α^i`.
#[derive(Clone, Debug)]
pub struct Embedding {
    images: Vec<FieldElement>,
}

impl Embedding {
    #[inline]
    pub fn apply(&self, a: FieldElement) -> FieldElement {
        let mut r = FieldElement::ZERO;
        let mut bits = a.0;
        while bits != 0 {
            let i = bits.trailing_zeros();
            r += self.images[i as usize];
            bits &= bits - 1;
        }
        r
    }
}

/// Shift-and-reduce multiplication in GF(2)[x]/(modulus). Used to build the
/// tables and as an independent reference.
pub fn slow_mul(mut a: u32, mut b: u32, n: u32, modulus: u32) -> u32 {
    let mut r = 0u32;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if (a >> n) & 1 == 1 {
            a ^= modulus;
        }
    }
    r
}

fn slow_pow(a: u32, mut e: u64, n: u32, modulus: u32) -> u32 {
    let mut r = 1u32;
    let mut b = a;
    while e != 0 {
        if e & 1 == 1 {
            r = slow_mul(r, b, n, modulus);
        }
        b = slow_mul(b, b, n, modulus);
        e >>= 1;
    }
    r
}

fn is_generator(g: u32, n: u32, modulus: u32, order: u64) -> bool {
    if slow_pow(g, order, n, modulus) != 1 {
        return false;
    }
    prime_factors(order)
        .into_iter()
        .all(|p| slow_pow(g, order / p, n, modulus) != 1)
}

pub(crate) fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `m` modulo `order`; `order = 1` gives 0.
fn mod_inverse(m: u64, order: u64) -> Option<u64> {
    if order == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (order as i128, m as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(order as i128) as u64)
}

/// `gcd(g+1, 2^n - 1)`, the condition under which monic normalization by a
/// `(g+1)`-th root is well defined.
pub fn check_gcd_condition(genus: u32, field: &Field) -> Result<()> {
    let m = genus as u64 + 1;
    let order = field.group_order();
    let g = gcd_u64(m, order);
    if g == 1 {
        Ok(())
    } else {
        Err(Error::GcdCondition {
            genus_plus_one: m,
            group_order: order,
            gcd: g,
        })
    }
}

fn reduce(mut a: u64, modulus: u64) -> u64 {
    let dm = 63 - modulus.leading_zeros();
    while a != 0 && 63 - a.leading_zeros() >= dm {
        let shift = 63 - a.leading_zeros() - dm;
        a ^= modulus << shift;
    }
    a
}

fn gf2x_mulmod(a: u64, b: u64, modulus: u64) -> u64 {
    let mut r = 0u64;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        b >>= 1;
        a = reduce(a << 1, modulus);
    }
    r
}

fn gf2x_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        a = reduce(a, b);
        std::mem::swap(&mut a, &mut b);
    }
    a
}

/// Rabin's test over GF(2): `x^(2^d) = x mod f`, and
/// `gcd(x^(2^(d/p)) - x, f) = 1` for each prime `p | d`.
fn gf2x_is_irreducible(f: u64) -> bool {
    let d = 63 - f.leading_zeros();
    if d == 0 {
        return false;
    }
    let x = reduce(2, f);
    let frob = |k: u32| {
        let mut y = x;
        for _ in 0..k {
            y = gf2x_mulmod(y, y, f);
        }
        y
    };
    if frob(d) != x {
        return false;
    }
    prime_factors(d as u64)
        .into_iter()
        .all(|p| gf2x_gcd(f, frob(d / p as u32) ^ x) == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(x: u32) -> FieldElement {
        FieldElement(x)
    }

    #[test]
    fn f4_products_and_inverse() {
        let f = Field::conway(2).unwrap();
        assert_eq!(f.modulus(), 7);
        assert_eq!(f.mul(fe(2), fe(2)), fe(3));
        assert_eq!(f.inv(fe(2)).unwrap(), fe(3));
        assert_eq!(f.inv(fe(1)).unwrap(), fe(1));
        assert_eq!(f.inv(fe(0)), Err(Error::ZeroInverse));
    }

    #[test]
    fn identities_and_absorption() {
        for n in 1..=8 {
            let f = Field::conway(n).unwrap();
            for a in f.elements() {
                assert_eq!(f.mul(a, FieldElement::ONE), a);
                assert_eq!(f.mul(a, FieldElement::ZERO), FieldElement::ZERO);
            }
        }
    }

    #[test]
    fn trace_examples() {
        let f2 = Field::conway(1).unwrap();
        assert_eq!(f2.trace(fe(1)), 1);
        let f4 = Field::conway(2).unwrap();
        assert_eq!(f4.trace(fe(2)), 1);
        for n in 1..=10 {
            assert_eq!(Field::conway(n).unwrap().trace(fe(0)), 0);
        }
    }

    #[test]
    fn trace_matches_frobenius_sum() {
        for n in 1..=9 {
            let f = Field::conway(n).unwrap();
            for a in f.elements() {
                let mut t = FieldElement::ZERO;
                let mut y = a;
                for _ in 0..n {
                    t += y;
                    y = f.square(y);
                }
                assert_eq!(t.0, f.trace(a), "n={n} a={a}");
                assert_eq!(f.trace(f.square(a)), f.trace(a));
            }
        }
    }

    #[test]
    fn roots() {
        let f8 = Field::conway(3).unwrap();
        assert_eq!(f8.modulus(), 11);
        assert_eq!(f8.root(fe(2), 2).unwrap(), fe(6));
        assert_eq!(f8.square(fe(6)), fe(2));
        for m in [1, 2, 3, 4, 5] {
            assert_eq!(f8.root(FieldElement::ONE, m).unwrap(), FieldElement::ONE);
            assert_eq!(f8.root(FieldElement::ZERO, m).unwrap(), FieldElement::ZERO);
        }
        assert!(matches!(f8.root(fe(3), 7), Err(Error::NoUniqueRoot { .. })));
        let f16 = Field::conway(4).unwrap();
        assert!(f16.root(fe(2), 5).is_err());
        assert_eq!(f16.root(FieldElement::ZERO, 5).unwrap(), FieldElement::ZERO);
        for a in f16.elements() {
            assert_eq!(f16.square(f16.sqrt(a)), a);
            assert_eq!(f16.sqrt(a), f16.root(a, 2).unwrap());
            let r = f16.root(a, 7).unwrap();
            assert_eq!(f16.pow(r, 7), a);
        }
    }

    #[test]
    fn fermat_little_theorem() {
        for n in 1..=4 {
            let f = Field::conway(n).unwrap();
            for a in f.nonzero_elements() {
                assert_eq!(f.pow(a, f.group_order()), FieldElement::ONE);
                assert_eq!(f.mul(a, f.inv_nonzero(a)), FieldElement::ONE);
            }
        }
        for n in [11, 16, 18] {
            let f = Field::conway(n).unwrap();
            let mut x = 0x2f3b_u32 % f.q() as u32;
            for _ in 0..200 {
                x = (x.wrapping_mul(1_103_515_245).wrapping_add(12_345)) % f.q() as u32;
                if x == 0 {
                    continue;
                }
                let a = fe(x);
                assert_eq!(f.pow(a, f.group_order()), FieldElement::ONE);
                assert_eq!(f.mul(a, f.inv_nonzero(a)), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn tables_agree_with_shift_and_reduce() {
        for n in 1..=7 {
            let f = Field::conway(n).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b).0, slow_mul(a.0, b.0, n, f.modulus()));
                }
            }
        }
    }

    #[test]
    fn embed_f4_into_f16() {
        let f2 = Field::conway(1).unwrap();
        let f4 = Field::conway(2).unwrap();
        let f16 = Field::conway(4).unwrap();
        assert_eq!(f2.embed(FieldElement::ONE, &f4).unwrap(), FieldElement::ONE);
        let expected = f16.pow(f16.alpha(), 5);
        assert_eq!(f4.embed(fe(2), &f16).unwrap(), expected);
        assert!(f4.embed(fe(2), &Field::conway(3).unwrap()).is_err());
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        for (d, e) in [(1, 4), (2, 4), (2, 6), (3, 6), (3, 9), (4, 12), (6, 18)] {
            let small = Field::conway(d).unwrap();
            let big = Field::conway(e).unwrap();
            let emb = small.embedding(&big).unwrap();
            for a in small.elements() {
                for b in small.elements().take(40) {
                    assert_eq!(emb.apply(a + b), emb.apply(a) + emb.apply(b));
                    assert_eq!(
                        emb.apply(small.mul(a, b)),
                        big.mul(emb.apply(a), emb.apply(b))
                    );
                }
                // Tr_E(a) = [E:F] * Tr_F(a)
                let k = e / d;
                assert_eq!(big.trace(emb.apply(a)), (k * small.trace(a)) & 1);
            }
        }
    }

    #[test]
    fn custom_modulus() {
        // x^4 + x^3 + 1 is irreducible and not the Conway polynomial.
        let f = Field::with_modulus(25).unwrap();
        assert!(!f.is_conway());
        assert_eq!(f.n(), 4);
        for a in f.nonzero_elements() {
            assert_eq!(f.mul(a, f.inv_nonzero(a)), FieldElement::ONE);
        }
        assert!(f.embedding(&Field::conway(8).unwrap()).is_err());
        // x^4 + 1 = (x + 1)^4
        assert_eq!(Field::with_modulus(17), Err(Error::BadModulus(17)));
        assert!(Field::with_modulus(11).unwrap().is_conway());
        // x^4 + x^3 + x^2 + x + 1 is irreducible but not primitive.
        let g = Field::with_modulus(31).unwrap();
        for a in g.nonzero_elements() {
            assert_eq!(g.mul(a, g.inv_nonzero(a)), FieldElement::ONE);
            assert_eq!(g.pow(a, 15), FieldElement::ONE);
        }
    }

    /// Recomputes the Conway table from its definition: the least primitive
    /// polynomial (coefficients of x^(n-1), …, x^0 compared in that order)
    /// whose root maps to a root of every smaller Conway polynomial.
    #[test]
    fn conway_table_matches_definition() {
        for n in 1..=12u32 {
            let mut found = None;
            let mut lows: Vec<u32> = (0..1u32 << n).collect();
            lows.sort_by_key(|&low| (0..n).map(|i| (low >> (n - 1 - i)) & 1).collect::<Vec<_>>());
            for low in lows {
                let m = (1u32 << n) | low;
                let order = (1u64 << n) - 1;
                if !gf2x_is_irreducible(m as u64) {
                    continue;
                }
                let x = reduce(2, m as u64) as u32;
                if !is_generator(x, n, m, order) {
                    continue;
                }
                let compatible = (1..n).filter(|d| n % d == 0).all(|d| {
                    let beta = slow_pow(x, order / ((1u64 << d) - 1), n, m);
                    let c = CONWAY[d as usize];
                    let mut acc = 0u32;
                    for i in (0..=d).rev() {
                        acc = slow_mul(acc, beta, n, m) ^ ((c >> i) & 1);
                    }
                    acc == 0
                });
                if compatible {
                    found = Some(m);
                    break;
                }
            }
            assert_eq!(found, Some(CONWAY[n as usize]), "degree {n}");
        }
        for n in 13..=MAX_DEGREE {
            assert!(gf2x_is_irreducible(CONWAY[n as usize] as u64));
        }
    }

    #[test]
    fn gcd_condition() {
        assert!(check_gcd_condition(3, &Field::conway(3).unwrap()).is_ok());
        assert!(check_gcd_condition(4, &Field::conway(3).unwrap()).is_ok());
        assert_eq!(
            check_gcd_condition(4, &Field::conway(4).unwrap()),
            Err(Error::GcdCondition {
                genus_plus_one: 5,
                group_order: 15,
                gcd: 5
            })
        );
        assert!(check_gcd_condition(2, &Field::conway(2).unwrap()).is_err());
    }
}
