//! Weil polynomials: validity, 2-rank, residue patterns and the genus-3
//! coefficient region.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zeta::power_sums_from_weil;

/// `x^2g + a_1 x^(2g-1) + .. + a_g x^g + q a_(g-1) x^(g-1) + .. + q^g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeilPoly {
    pub genus: u32,
    pub q: u64,
    pub a: Vec<i64>,
}

impl WeilPoly {
    pub fn new(q: u64, a: Vec<i64>) -> WeilPoly {
        WeilPoly {
            genus: a.len() as u32,
            q,
            a,
        }
    }

    fn big(&self) -> Vec<BigInt> {
        self.a.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn two_rank(&self) -> u32 {
        two_rank(&self.a)
    }

    pub fn pattern(&self) -> ResiduePattern {
        ResiduePattern::of(&self.a)
    }
}

/// Coefficient parities `(a_1 mod 2, .., a_g mod 2)`, printed `a_1` first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResiduePattern(pub Vec<u8>);

impl ResiduePattern {
    pub fn of(a: &[i64]) -> ResiduePattern {
        ResiduePattern(a.iter().map(|x| x.rem_euclid(2) as u8).collect())
    }

    pub fn from_bits(bits: &[u8]) -> ResiduePattern {
        ResiduePattern(bits.iter().map(|b| b & 1).collect())
    }

    /// The `index`-th of the `2^g` patterns, `n_1` being the most significant bit.
    pub fn from_index(genus: u32, index: u32) -> ResiduePattern {
        ResiduePattern(
            (0..genus)
                .map(|i| (index >> (genus - 1 - i) & 1) as u8)
                .collect(),
        )
    }

    pub fn all(genus: u32) -> impl Iterator<Item = ResiduePattern> {
        (0..1u32 << genus).map(move |i| ResiduePattern::from_index(genus, i))
    }

    pub fn genus(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    /// Largest `i` with `n_i = 1`, or 0.
    pub fn two_rank(&self) -> u32 {
        self.0
            .iter()
            .rposition(|&b| b == 1)
            .map_or(0, |i| i as u32 + 1)
    }
}

impl fmt::Display for ResiduePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for ResiduePattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<ResiduePattern> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let bits: Vec<u8> = s
            .chars()
            .filter(|c| *c != ',' && !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Invalid(format!("bad residue pattern {s:?}"))),
            })
            .collect::<Result<_>>()?;
        if bits.is_empty() {
            return Err(Error::Invalid("empty residue pattern".into()));
        }
        Ok(ResiduePattern(bits))
    }
}

/// Largest index with an odd coefficient, or 0.
pub fn two_rank(a: &[i64]) -> u32 {
    ResiduePattern::of(a).two_rank()
}

/// All `2g + 1` coefficients, leading first.
pub fn expand_coeffs(w: &WeilPoly) -> Vec<BigInt> {
    let g = w.a.len();
    let q = BigInt::from(w.q);
    let low = |i: usize| {
        if i == 0 {
            BigInt::one()
        } else {
            BigInt::from(w.a[i - 1])
        }
    };
    (0..=2 * g)
        .map(|i| {
            if i <= g {
                low(i)
            } else {
                low(2 * g - i) * q.pow((i - g) as u32)
            }
        })
        .collect()
}

/// Real Weil polynomial `h` with `x^g h(x + q/x) = P(x)`, coefficients from
/// the constant term up; monic of degree `g`.
pub fn real_weil_poly(w: &WeilPoly) -> Vec<BigInt> {
    let g = w.a.len();
    let q = BigInt::from(w.q);
    let mut p = vec![BigInt::from(2 * g)];
    p.extend(power_sums_from_weil(&q, &w.big(), g));
    // Σ_{all roots} (α + q/α)^k = Σ_j C(k,j) q^min(j,k-j) p_|k-2j|, and each
    // β = α + q/α is hit twice.
    let mut beta_sums = Vec::with_capacity(g);
    for k in 1..=g {
        let mut acc = BigInt::zero();
        let mut binom = BigInt::one();
        for j in 0..=k {
            let m = (k as i64 - 2 * j as i64).unsigned_abs() as usize;
            acc += &binom * q.pow(j.min(k - j) as u32) * &p[m];
            binom = binom * (k - j) / (j + 1);
        }
        debug_assert!(acc.is_even());
        beta_sums.push(acc / 2);
    }
    let mut e = vec![BigInt::one()];
    for k in 1..=g {
        let mut acc = BigInt::zero();
        for i in 1..=k {
            let term = &e[k - i] * &beta_sums[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        debug_assert!((&acc % k).is_zero());
        e.push(acc / k);
    }
    // h(y) = Σ (-1)^k e_k y^(g-k)
    (0..=g)
        .map(|i| {
            let k = g - i;
            if k.is_multiple_of(2) {
                e[k].clone()
            } else {
                -&e[k]
            }
        })
        .collect()
}

/// True iff every complex root of `w` has absolute value `√q`.
pub fn is_weil_poly(w: &WeilPoly) -> bool {
    w.q > 0 && real_rooted_within(&real_weil_poly(w), w.q)
}

/// True iff the nonzero polynomial `f` (constant term first) has only real
/// roots, all in `[-2√q, 2√q]`. Roots exactly at `±2√q` are accepted.
pub fn real_rooted_within(f: &[BigInt], q: u64) -> bool {
    let Some(deg) = f.len().checked_sub(1) else {
        return false;
    };
    if deg == 0 {
        return true;
    }
    // distinct real roots = distinct roots
    let seq = sturm::sequence(f);
    let distinct = deg - sturm::degree(seq.last().expect("nonempty"));
    if sturm::roots_in(&seq, None) != distinct {
        return false;
    }
    // f(y) = E(y^2) + y O(y^2); H(y) = E(y)^2 - y O(y)^2 has roots β^2.
    let even: Vec<BigInt> = f.iter().step_by(2).cloned().collect();
    let odd: Vec<BigInt> = f.iter().skip(1).step_by(2).cloned().collect();
    let mut big_h = sturm::sub(
        &sturm::mul(&even, &even),
        &sturm::shift(&sturm::mul(&odd, &odd)),
    );
    let bound = BigInt::from(4) * BigInt::from(q);
    while sturm::eval(&big_h, &bound).is_zero() {
        big_h = sturm::deflate(&big_h, &bound);
    }
    sturm::roots_in(&sturm::sequence(&big_h), Some(&bound)) == 0
}

/// Exact membership of `(s, t, u)` in the genus-3 region
/// `{h(y) = y^3 + s y^2 + (t - 3q) y + (u - 2qs)` has all roots in `[-2√q, 2√q]}`
/// as four squared inequality pairs.
pub fn in_w3_region(s: i64, t: i64, u: i64, q: u64) -> bool {
    let (s, t, u, q) = (s as i128, t as i128, u as i128, q as i128);
    // |s| <= 6√q
    if s * s > 36 * q {
        return false;
    }
    // 4√q|s| - 9q <= t <= s^2/3 + 3q
    if 3 * t > s * s + 9 * q {
        return false;
    }
    let t9 = t + 9 * q;
    if t9 < 0 || 16 * q * s * s > t9 * t9 {
        return false;
    }
    // discriminant-type cubic bound
    let d = s * s - 3 * t + 9 * q;
    let lhs = 27 * u + 2 * s * s * s - 9 * s * t - 27 * q * s;
    let Some(lhs2) = lhs.checked_mul(lhs) else {
        return false;
    };
    if lhs2 > 4 * d * d * d {
        return false;
    }
    // -2q s - 2√q (t + q) <= u <= -2q s + 2√q (t + q)
    let tq = t + q;
    if tq < 0 {
        return false;
    }
    let c = u + 2 * q * s;
    c * c <= 4 * q * tq * tq
}

/// Integer-coefficient polynomials (constant term first) and Sturm counts.
mod sturm {
    use super::*;

    pub fn degree(p: &[BigInt]) -> usize {
        p.len().saturating_sub(1)
    }

    fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }

    pub fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }

    pub fn sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); a.len().max(b.len())];
        for (i, x) in a.iter().enumerate() {
            out[i] += x;
        }
        for (i, x) in b.iter().enumerate() {
            out[i] -= x;
        }
        trim(out)
    }

    /// Multiplies by `y`.
    pub fn shift(a: &[BigInt]) -> Vec<BigInt> {
        if a.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigInt::zero()];
        out.extend_from_slice(a);
        out
    }

    pub fn eval(p: &[BigInt], x: &BigInt) -> BigInt {
        p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// `p / (y - r)` for a root `r`.
    pub fn deflate(p: &[BigInt], r: &BigInt) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); p.len() - 1];
        let mut carry = BigInt::zero();
        for i in (1..p.len()).rev() {
            carry = &carry * r + &p[i];
            out[i - 1] = carry.clone();
        }
        debug_assert!((carry * r + &p[0]).is_zero());
        out
    }

    fn derivative(p: &[BigInt]) -> Vec<BigInt> {
        trim(p.iter().enumerate().skip(1).map(|(i, c)| c * i).collect())
    }

    fn primitive(p: Vec<BigInt>) -> Vec<BigInt> {
        let g = p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() || g.is_one() {
            return p;
        }
        p.into_iter().map(|c| c / &g).collect()
    }

    /// Remainder of `a` by `b` scaled by a positive constant.
    fn positive_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut r = a.to_vec();
        let db = b.len() - 1;
        let lb = b.last().expect("nonzero divisor");
        let mut steps = 0u32;
        while r.len() > db && !r.is_empty() {
            let lr = r.last().expect("nonempty").clone();
            let shift = r.len() - 1 - db;
            for c in r.iter_mut() {
                *c *= lb;
            }
            for (i, c) in b.iter().enumerate() {
                r[shift + i] -= &lr * c;
            }
            r = trim(r);
            steps += 1;
        }
        if lb.is_negative() && steps % 2 == 1 {
            r = r.into_iter().map(|c| -c).collect();
        }
        primitive(r)
    }

    /// Sturm chain `p, p', -rem, ...` up to positive scalings.
    pub fn sequence(p: &[BigInt]) -> Vec<Vec<BigInt>> {
        let mut seq = vec![p.to_vec(), primitive(derivative(p))];
        if seq[1].is_empty() {
            seq.pop();
            return seq;
        }
        loop {
            let n = seq.len();
            let r = positive_prem(&seq[n - 2], &seq[n - 1]);
            if r.is_empty() {
                return seq;
            }
            seq.push(r.into_iter().map(|c| -c).collect());
        }
    }

    fn sign_changes<I: Iterator<Item = i8>>(signs: I) -> usize {
        let mut last = 0i8;
        let mut changes = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
        changes
    }

    fn sign(x: &BigInt) -> i8 {
        if x.is_positive() {
            1
        } else if x.is_negative() {
            -1
        } else {
            0
        }
    }

    /// Distinct real roots in `(lo, ∞)`, or on the whole line when `lo` is
    /// `None`. `lo` must not be a root.
    pub fn roots_in(seq: &[Vec<BigInt>], lo: Option<&BigInt>) -> usize {
        let at_pos_inf = sign_changes(seq.iter().map(|p| sign(p.last().expect("nonzero"))));
        let at_lo = match lo {
            Some(x) => sign_changes(seq.iter().map(|p| sign(&eval(p, x)))),
            None => sign_changes(seq.iter().map(|p| {
                let s = sign(p.last().expect("nonzero"));
                if degree(p) % 2 == 1 {
                    -s
                } else {
                    s
                }
            })),
        };
        at_lo - at_pos_inf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(q: u64, a: &[i64]) -> WeilPoly {
        WeilPoly::new(q, a.to_vec())
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn two_rank_examples() {
        assert_eq!(two_rank(&[0, 0, -2]), 0);
        assert_eq!(two_rank(&[1, 0, 0]), 1);
        assert_eq!(two_rank(&[0, 1, 1]), 3);
        assert_eq!(two_rank(&[-3, 2]), 1);
    }

    #[test]
    fn expand_examples() {
        assert_eq!(
            expand_coeffs(&w(2, &[0, 0, -2])),
            big(&[1, 0, 0, -2, 0, 0, 8])
        );
        assert_eq!(expand_coeffs(&w(2, &[0])), big(&[1, 0, 2]));
        let e = expand_coeffs(&w(4, &[3, -5, 7, 2]));
        for i in 0..4 {
            assert_eq!(e[8 - i], &e[i] * BigInt::from(4).pow(4 - i as u32));
        }
    }

    #[test]
    fn pattern_text() {
        let p: ResiduePattern = "011".parse().unwrap();
        assert_eq!(p.to_string(), "011");
        assert_eq!(p.two_rank(), 3);
        assert_eq!(ResiduePattern::from_index(3, 3), p);
        assert_eq!(
            "(0,1,0,1)".parse::<ResiduePattern>().unwrap().to_string(),
            "0101"
        );
        assert_eq!(ResiduePattern::of(&[-1, 2, 3]).to_string(), "101");
        assert!("012".parse::<ResiduePattern>().is_err());
    }

    /// Peel `x^g h(x + q/x)` from the top to get h independently.
    fn real_poly_by_peeling(wp: &WeilPoly) -> Vec<BigInt> {
        let g = wp.a.len();
        let q = BigInt::from(wp.q);
        let mut rest = expand_coeffs(wp); // leading first, length 2g+1
        let mut h = vec![BigInt::zero(); g + 1];
        for k in (0..=g).rev() {
            // x^g (x + q/x)^k contributes to degrees g+k, g+k-2, ..
            let top = 2 * g - (g + k);
            let c = rest[top].clone();
            h[k] = c.clone();
            let mut binom = BigInt::one();
            for j in 0..=k {
                let deg = g + k - 2 * j;
                rest[2 * g - deg] -= &c * &binom * q.pow(j as u32);
                binom = binom * (k - j) / (j + 1);
            }
        }
        assert!(rest.iter().all(|c| c.is_zero()));
        h
    }

    #[test]
    fn real_weil_poly_matches_peeling() {
        for q in [2u64, 4, 8] {
            for a in [
                vec![0, 0, -2],
                vec![3, -1, 4],
                vec![1],
                vec![-2, 5, 0, 7],
                vec![1, 1, 1, 1, 1],
            ] {
                let wp = w(q, &a);
                assert_eq!(
                    real_weil_poly(&wp),
                    real_poly_by_peeling(&wp),
                    "q={q} a={a:?}"
                );
            }
        }
        // genus 3 closed form
        let (s, t, u, q) = (3i64, -1, 4, 8i64);
        assert_eq!(
            real_weil_poly(&w(8, &[s, t, u])),
            big(&[u - 2 * q * s, t - 3 * q, s, 1])
        );
    }

    #[test]
    fn weil_examples() {
        assert!(is_weil_poly(&w(2, &[-2])));
        assert!(!is_weil_poly(&w(2, &[-3])));
        assert!(is_weil_poly(&w(2, &[0, 0, -2])));
        // boundary: (x - √2)^2 (x + √2)^2 = x^4 - 4x^2 + 4, a = (0, -4)
        assert!(is_weil_poly(&w(2, &[0, -4])));
        // (x^2 - 2√2x + 2)^2: h = (y - 2√2)^2 is not integral; use (x-2)^2 over q=4
        assert!(is_weil_poly(&w(4, &[-4])));
        assert!(!is_weil_poly(&w(4, &[-5])));
        assert!(is_weil_poly(&w(4, &[-4, 8, -16, 40])) == brute_roots_ok(4, &[-4, 8, -16, 40]));
    }

    /// Float check by Durand-Kerner on the full polynomial.
    fn brute_roots_ok(q: u64, a: &[i64]) -> bool {
        let coeffs: Vec<f64> = expand_coeffs(&w(q, a))
            .iter()
            .map(|c| c.to_string().parse().unwrap())
            .collect();
        let n = coeffs.len() - 1;
        let mut roots: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let th = 0.4 + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                (1.3 * th.cos(), 1.3 * th.sin())
            })
            .collect();
        let cmul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
        let cdiv = |a: (f64, f64), b: (f64, f64)| {
            let d = b.0 * b.0 + b.1 * b.1;
            ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
        };
        for _ in 0..2000 {
            for i in 0..n {
                let z = roots[i];
                let mut val = (0.0, 0.0);
                for &c in &coeffs {
                    val = cmul(val, z);
                    val.0 += c;
                }
                let mut den = (1.0, 0.0);
                for (j, &r) in roots.iter().enumerate() {
                    if j != i {
                        den = cmul(den, (z.0 - r.0, z.1 - r.1));
                    }
                }
                let d = cdiv(val, den);
                roots[i] = (z.0 - d.0, z.1 - d.1);
            }
        }
        let target = (q as f64).sqrt();
        roots
            .iter()
            .all(|r| ((r.0 * r.0 + r.1 * r.1).sqrt() - target).abs() < 1e-3)
    }

    #[test]
    fn sturm_agrees_with_float_roots_genus2() {
        let q = 2u64;
        for a1 in -6..=6 {
            for a2 in -8..=12 {
                let exact = is_weil_poly(&w(q, &[a1, a2]));
                let float = brute_roots_ok(q, &[a1, a2]);
                assert_eq!(exact, float, "a = ({a1}, {a2})");
            }
        }
    }

    #[test]
    fn region_matches_weil_q2() {
        let q = 2u64;
        let mut count = 0;
        for s in -9..=9 {
            for t in -30..=40 {
                for u in -130..=130 {
                    let r = in_w3_region(s, t, u, q);
                    assert_eq!(r, is_weil_poly(&w(q, &[s, t, u])), "({s},{t},{u})");
                    count += r as u32;
                }
            }
        }
        assert_eq!(count, 215);
    }

    #[test]
    fn region_examples() {
        assert!(in_w3_region(0, 0, -2, 2));
        assert!(!in_w3_region(13, 0, 0, 2));
    }
}
