//! Lattice-point statistics of Weil polynomial coefficients by residue class.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weil::{real_rooted_within, ResiduePattern};

/// Counts of genus-3 Weil coefficient triples `(s, t, u)` by parity class.
/// Class index `4 (s mod 2) + 2 (t mod 2) + (u mod 2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCountTable {
    pub q: u64,
    pub counts: [u64; 8],
}

impl ClassCountTable {
    pub fn empty(q: u64) -> ClassCountTable {
        ClassCountTable { q, counts: [0; 8] }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn add(&mut self, s: i64, t: i64, u: i64) {
        self.counts[class_index(s, t, u)] += 1;
    }

    pub fn merge(mut self, other: &ClassCountTable) -> ClassCountTable {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self
    }

    pub fn proportion(&self, class: usize) -> f64 {
        self.counts[class] as f64 / self.total() as f64
    }

    /// `max |proportion - 1/8|` over the eight classes.
    pub fn max_deviation(&self) -> f64 {
        (0..8)
            .map(|c| (self.proportion(c) - 0.125).abs())
            .fold(0.0, f64::max)
    }

    pub fn label(class: usize) -> String {
        format!("{}{}{}", class >> 2 & 1, class >> 1 & 1, class & 1)
    }
}

pub fn class_index(s: i64, t: i64, u: i64) -> usize {
    (4 * s.rem_euclid(2) + 2 * t.rem_euclid(2) + u.rem_euclid(2)) as usize
}

/// `floor(sqrt(n))`.
pub fn isqrt(n: u128) -> u128 {
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

fn ceil_sqrt(n: u128) -> u128 {
    let r = isqrt(n);
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// Odd integers in `[lo, hi]`.
pub fn count_odd(lo: i128, hi: i128) -> i128 {
    if lo > hi {
        return 0;
    }
    (hi + 1).div_euclid(2) - lo.div_euclid(2)
}

fn check_power_of_two(q: u64) -> Result<()> {
    if q < 2 || !q.is_power_of_two() {
        return Err(Error::Invalid(format!(
            "q = {q} must be a power of 2, at least 2"
        )));
    }
    Ok(())
}

/// Exact class counts of the lattice points of the genus-3 region. For each
/// `(s, t)` the admissible `u` form an interval (cubic and linear bounds
/// intersected), so odd and even `u` are counted in closed form.
pub fn w3_class_counts(q: u64) -> Result<ClassCountTable> {
    check_power_of_two(q)?;
    let qi = q as i128;
    let smax = isqrt(36 * q as u128) as i128;
    let table = (-smax..=smax)
        .into_par_iter()
        .map(|s| {
            let mut local = [0u64; 8];
            let s2 = s * s;
            let t_hi = (s2 + 9 * qi).div_euclid(3);
            let t_lo = (ceil_sqrt((16 * qi * s2) as u128) as i128 - 9 * qi).max(-qi);
            let s_bit = (s.rem_euclid(2) as usize) << 2;
            for t in t_lo..=t_hi {
                let d = s2 - 3 * t + 9 * qi;
                let r = isqrt(4 * (d as u128).pow(3)) as i128;
                let k = 2 * s2 * s - 9 * s * t - 27 * qi * s;
                let cubic_lo = (-r - k).div_euclid(27) + ((-r - k).rem_euclid(27) != 0) as i128;
                let cubic_hi = (r - k).div_euclid(27);
                let tq = (t + qi) as u128;
                let r2 = isqrt(4 * q as u128 * tq * tq) as i128;
                let lo = cubic_lo.max(-2 * qi * s - r2);
                let hi = cubic_hi.min(-2 * qi * s + r2);
                if lo > hi {
                    continue;
                }
                let odd = count_odd(lo, hi);
                let even = hi - lo + 1 - odd;
                let base = s_bit | ((t.rem_euclid(2) as usize) << 1);
                local[base] += even as u64;
                local[base | 1] += odd as u64;
            }
            ClassCountTable { q, counts: local }
        })
        .reduce(|| ClassCountTable::empty(q), |a, b| a.merge(&b));
    Ok(table)
}

/// Share of the genus-3 obstructed classes `011` and `101`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tau3 {
    pub q: u64,
    pub obstructed: u64,
    /// Triples with `u` odd (2-rank 3, ordinary).
    pub ordinary: u64,
    pub total: u64,
}

impl Tau3 {
    pub fn over_ordinary(&self) -> Ratio<u64> {
        Ratio::new(self.obstructed, self.ordinary)
    }

    pub fn over_all(&self) -> Ratio<u64> {
        Ratio::new(self.obstructed, self.total)
    }
}

pub fn tau3(table: &ClassCountTable) -> Tau3 {
    let c = &table.counts;
    Tau3 {
        q: table.q,
        obstructed: c[0b011] + c[0b101],
        ordinary: c[1] + c[3] + c[5] + c[7],
        total: table.total(),
    }
}

pub fn ratio_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `coefficient * √q` when `sqrt_q`, else `coefficient`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenyEstimate {
    pub q: u64,
    pub coefficient: BigRational,
    pub sqrt_q: bool,
}

impl IsogenyEstimate {
    pub fn to_f64(&self) -> f64 {
        let c = self.coefficient.to_f64().unwrap_or(f64::NAN);
        if self.sqrt_q {
            c * (self.q as f64).sqrt()
        } else {
            c
        }
    }
}

impl fmt::Display for IsogenyEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sqrt_q {
            write!(f, "{}*sqrt({})", self.coefficient, self.q)
        } else {
            write!(f, "{}", self.coefficient)
        }
    }
}

fn euler_phi(mut n: u64) -> u64 {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// Asymptotic number of isogeny classes of `g`-dimensional abelian varieties
/// over `GF(q)`:
/// `(2^g / g!) Π_{i=1}^g (2i/(2i-1))^(g+1-i) · φ(q)/q · q^(g(g+1)/4)`.
pub fn isogeny_count_estimate(genus: u32, q: u64) -> Result<IsogenyEstimate> {
    if genus == 0 || q < 2 {
        return Err(Error::Invalid(format!(
            "need g >= 1 and q >= 2, got g = {genus}, q = {q}"
        )));
    }
    let big = |x: u64| BigInt::from(x);
    let mut c = BigRational::new(big(1) << genus, (1..=genus as u64).map(big).product());
    for i in 1..=genus as u64 {
        let f = BigRational::new(big(2 * i), big(2 * i - 1));
        for _ in 0..(genus as u64 + 1 - i) {
            c *= &f;
        }
    }
    c *= BigRational::new(big(euler_phi(q)), big(q));
    // g(g+1)/4 is an integer or a half-integer
    let e4 = genus * (genus + 1);
    c *= BigRational::from_integer(big(q).pow(e4 / 4));
    Ok(IsogenyEstimate {
        q,
        coefficient: c,
        sqrt_q: e4 % 4 == 2,
    })
}

/// Weil coefficient vectors `a_1..a_g` of all Weil polynomials over
/// `GF(q)`, found by enumerating real Weil polynomials
/// `h = y^g + c_1 y^(g-1) + .. + c_g` coefficient by coefficient: if `h`
/// has all roots in `[-2√q, 2√q]`, so does every derivative, and
/// `h^(g-k)` only involves `c_1..c_k`.
pub fn weil_scan(genus: u32, q: u64) -> Vec<Vec<i64>> {
    let g = genus as usize;
    let fact = |n: usize| -> BigInt { (1..=n as u64).map(BigInt::from).product() };
    let binom = |n: usize, k: usize| -> u128 {
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    };
    // |c_k| <= C(g,k) (2√q)^k
    let bound = |k: usize| -> i64 {
        let b = binom(g, k);
        isqrt(b * b * 4u128.pow(k as u32) * (q as u128).pow(k as u32)) as i64
    };
    // derivative h^(g-k) with prefix c_1..c_k, constant term first
    let derived = |c: &[i64]| -> Vec<BigInt> {
        let k = c.len();
        (0..=k)
            .map(|deg| {
                let j = k - deg;
                let cj = if j == 0 {
                    BigInt::one()
                } else {
                    BigInt::from(c[j - 1])
                };
                cj * fact(g - j) / fact(k - j)
            })
            .collect()
    };
    let mut out = Vec::new();
    let mut prefix: Vec<i64> = Vec::with_capacity(g);
    fn rec(
        g: usize,
        q: u64,
        prefix: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
        bound: &dyn Fn(usize) -> i64,
        derived: &dyn Fn(&[i64]) -> Vec<BigInt>,
    ) {
        let k = prefix.len() + 1;
        if k > g {
            out.push(prefix.clone());
            return;
        }
        let b = bound(k);
        for c in -b..=b {
            prefix.push(c);
            if real_rooted_within(&derived(prefix), q) {
                rec(g, q, prefix, out, bound, derived);
            }
            prefix.pop();
        }
    }
    rec(g, q, &mut prefix, &mut out, &bound, &derived);
    out.into_iter().map(|c| weil_from_real(&c, q)).collect()
}

/// `a_1..a_g` of `P(x) = x^g h(x + q/x)` for `h = y^g + c_1 y^(g-1) + ..`:
/// `a_i = Σ_{j + 2l = i} c_j C(g-j, l) q^l` with `c_0 = 1`.
pub fn weil_from_real(c: &[i64], q: u64) -> Vec<i64> {
    let g = c.len();
    let binom = |n: usize, k: usize| -> i128 {
        (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
    };
    (1..=g)
        .map(|i| {
            let mut acc = 0i128;
            for l in 0..=i / 2 {
                let j = i - 2 * l;
                let cj = if j == 0 { 1 } else { c[j - 1] as i128 };
                if l <= g - j {
                    acc += cj * binom(g - j, l) * (q as i128).pow(l as u32);
                }
            }
            acc as i64
        })
        .collect()
}

/// Weil polynomial counts by residue pattern (index with `n_1` as the most
/// significant bit).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternCounts {
    pub genus: u32,
    pub q: u64,
    pub counts: Vec<u64>,
}

impl PatternCounts {
    pub fn from_scan(genus: u32, q: u64, scan: &[Vec<i64>]) -> PatternCounts {
        let mut counts = vec![0u64; 1 << genus];
        for a in scan {
            let idx = a
                .iter()
                .fold(0usize, |acc, x| acc << 1 | x.rem_euclid(2) as usize);
            counts[idx] += 1;
        }
        PatternCounts { genus, q, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(obstructed ordinary, ordinary, obstructed, total)`; ordinary means
    /// `a_g` odd.
    pub fn tau(&self, obstructions: &[ResiduePattern]) -> (u64, u64, u64, u64) {
        let index = |p: &ResiduePattern| p.0.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
        let obstructed: Vec<usize> = obstructions.iter().map(index).collect();
        let mut out = (0, 0, 0, self.total());
        for (i, &n) in self.counts.iter().enumerate() {
            let ordinary = i & 1 == 1;
            let obs = obstructed.contains(&i);
            if ordinary {
                out.1 += n;
                if obs {
                    out.0 += n;
                }
            }
            if obs {
                out.2 += n;
            }
        }
        out
    }
}

/// Finite-`q` analogue of the genus-4 obstructed fraction.
pub fn tau4(q: u64, obstructions: &[ResiduePattern]) -> Result<(Ratio<u64>, PatternCounts)> {
    check_power_of_two(q)?;
    let scan = weil_scan(4, q);
    let pc = PatternCounts::from_scan(4, q, &scan);
    let (obs_ord, ord, ..) = pc.tau(obstructions);
    if ord.is_zero() {
        return Err(Error::Invalid(format!(
            "no ordinary Weil polynomials at q = {q}"
        )));
    }
    Ok((Ratio::new(obs_ord, ord), pc))
}
