//! Dense univariate polynomials over GF(2^n).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::gf2n::{Field, FieldElement};

/// Polynomial with coefficients indexed by degree. The highest stored
/// coefficient is nonzero; the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
    field: Field,
}

impl Poly {
    pub fn new(field: &Field, mut coeffs: Vec<FieldElement>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly {
            coeffs,
            field: field.clone(),
        }
    }

    /// Builds a polynomial from raw coefficient encodings, validating each.
    pub fn from_bits(field: &Field, bits: &[u64]) -> Result<Poly> {
        let coeffs = bits
            .iter()
            .map(|&b| field.element(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(field, coeffs))
    }

    /// Parses the comma-separated form, lowest degree first ("0,0,1" = x^2).
    pub fn parse(field: &Field, s: &str) -> Result<Poly> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Poly::zero(field));
        }
        let bits = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Invalid(format!("bad coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Poly::from_bits(field, &bits)
    }

    pub fn zero(field: &Field) -> Poly {
        Poly {
            coeffs: Vec::new(),
            field: field.clone(),
        }
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field, FieldElement::ONE)
    }

    pub fn constant(field: &Field, c: FieldElement) -> Poly {
        Poly::new(field, vec![c])
    }

    /// `c * x^d`.
    pub fn monomial(field: &Field, c: FieldElement, d: usize) -> Poly {
        let mut coeffs = vec![FieldElement::ZERO; d + 1];
        coeffs[d] = c;
        Poly::new(field, coeffs)
    }

    /// `a x + b`.
    pub fn linear(field: &Field, a: FieldElement, b: FieldElement) -> Poly {
        Poly::new(field, vec![b, a])
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of `x^i`; zero past the degree.
    #[inline]
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    /// `None` encodes the degree of the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == FieldElement::ONE
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == FieldElement::ONE
    }

    pub fn bits(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| c.0 as u64).collect()
    }

    fn check_field(&self, other: &Poly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.field.n(),
                right: other.field.n(),
            })
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_field(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Ok(Poly::new(&self.field, coeffs))
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_field(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(&self.field));
        }
        let f = &self.field;
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += f.mul(a, b);
            }
        }
        Ok(Poly::new(f, out))
    }

    pub fn scale(&self, c: FieldElement) -> Poly {
        let f = &self.field;
        Poly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut r = Poly::one(&self.field);
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Formal derivative; in characteristic 2 only odd-degree terms survive.
    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| if i % 2 == 1 { c } else { FieldElement::ZERO })
            .collect();
        Poly::new(&self.field, coeffs)
    }

    /// `f^2`, computed coefficient-wise through Frobenius.
    pub fn square(&self) -> Poly {
        let f = &self.field;
        let mut out = vec![FieldElement::ZERO; (2 * self.coeffs.len()).saturating_sub(1)];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[2 * i] = f.square(c);
        }
        Poly::new(f, out)
    }

    /// The `g` with `g^2 = self`, when every odd coefficient vanishes.
    pub fn sqrt(&self) -> Option<Poly> {
        if self.coeffs.iter().skip(1).step_by(2).any(|c| !c.is_zero()) {
            return None;
        }
        let f = &self.field;
        let coeffs = self.coeffs.iter().step_by(2).map(|&c| f.sqrt(c)).collect();
        Some(Poly::new(f, coeffs))
    }

    pub fn make_monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv_nonzero(self.leading()))
    }

    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.check_field(divisor)?;
        let f = &self.field;
        let dd = divisor.degree().ok_or(Error::ZeroInverse)?;
        let inv = f.inv_nonzero(divisor.leading());
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(f), self.clone()));
        }
        let mut quo = vec![FieldElement::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            let k = f.mul(c, inv);
            quo[i - dd] = k;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] += f.mul(k, d);
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(f, quo), Poly::new(f, rem)))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.check_field(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(Error::ZeroGcd);
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.make_monic())
    }

    /// Product of the distinct monic irreducible factors.
    pub fn radical(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return Poly::one(&self.field);
        }
        let d = self.derivative();
        if d.is_zero() {
            return self.sqrt().expect("zero derivative").radical();
        }
        let c = self.gcd(&d).expect("nonzero");
        let (w, _) = self.divrem(&c).expect("nonzero divisor");
        let rc = c.radical();
        let g = w.gcd(&rc).expect("nonzero");
        let (l, _) = (&w * &rc).divrem(&g).expect("nonzero divisor");
        l.make_monic()
    }

    /// Horner evaluation at a point of the same field.
    pub fn eval(&self, a: FieldElement) -> FieldElement {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| f.mul(acc, a) + c)
    }

    /// Evaluates at `a` in an extension field after embedding the coefficients.
    pub fn eval_in(&self, a: FieldElement, ext: &Field) -> Result<FieldElement> {
        let emb = self.field.embedding(ext)?;
        Ok(self
            .coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| ext.mul(acc, a) + emb.apply(c)))
    }

    /// Coefficients embedded into an extension field.
    pub fn embed(&self, ext: &Field) -> Result<Poly> {
        let emb = self.field.embedding(ext)?;
        Ok(Poly::new(
            ext,
            self.coeffs.iter().map(|&c| emb.apply(c)).collect(),
        ))
    }

    /// Shortlex order: lower degree first, then coefficient encodings compared
    /// from the constant term upward.
    pub fn cmp_shortlex(&self, other: &Poly) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[GF(2^{})]({self})", self.field.n())
    }
}

impl Add for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("field mismatch")
    }
}

impl Mul for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("field mismatch")
    }
}
