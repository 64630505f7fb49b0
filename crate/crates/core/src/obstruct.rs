//! Residue patterns of Weil coefficients that no hyperelliptic Jacobian in
//! characteristic 2 can have.
//!
//! Frobenius permutes the `r + 1` geometric Weierstrass points (`r` the
//! 2-rank) in orbits of sizes `d_i`, so `#W(GF(q^k)) = Σ_{d_i | k} d_i`.
//! That count is tied to `N_k` by `N_k ≡ W_k (mod 2)` and, for
//! `k = 2^a m` with `m` odd and `a >= 1`, `N_k ≡ 2 - W_k (mod 2^(a+1))`.
//! A pattern is obstructed when no partition of `r + 1` satisfies these.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weil::ResiduePattern;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Basic,
    HigherPower,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Basic => "basic",
            Mode::HigherPower => "higher-power",
        })
    }
}

/// `N_k ≡ value (mod modulus)` for every lift of the pattern and every even
/// `q`, and no surviving partition is compatible with it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Certificate {
    pub k: u32,
    pub modulus: u64,
    pub value: u64,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N_{} = {} mod {}", self.k, self.value, self.modulus)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub pattern: ResiduePattern,
    pub obstructed: bool,
    /// First feasible partition, largest part first; `None` iff obstructed.
    pub witness: Option<Vec<u32>>,
    pub mode: Mode,
    pub certificates: Vec<Certificate>,
}

impl fmt::Display for ObstructionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.obstructed {
            "obstructed"
        } else {
            "open"
        };
        write!(f, "{} {verdict} {}", self.pattern, self.mode)?;
        if let Some(w) = &self.witness {
            let parts: Vec<String> = w.iter().map(|d| d.to_string()).collect();
            write!(f, " witness={{{}}}", parts.join(","))?;
        }
        if !self.certificates.is_empty() {
            let certs: Vec<String> = self.certificates.iter().map(|c| c.to_string()).collect();
            write!(f, " [{}]", certs.join("; "))?;
        }
        Ok(())
    }
}

/// `N_k mod 2` for `k = 1..=kmax`. Mod 2 the signs in Newton's identities
/// vanish and the tail `e_(g+j) = ±a_(g-j) q^j` is even.
pub fn parity_point_counts(p: &ResiduePattern, kmax: u32) -> Vec<u8> {
    let e = |i: usize| -> u8 {
        if i >= 1 && i <= p.0.len() {
            p.0[i - 1]
        } else {
            0
        }
    };
    let mut ps: Vec<u8> = Vec::with_capacity(kmax as usize);
    for k in 1..=kmax as usize {
        let mut acc = (k as u8 & 1) & e(k);
        for i in 1..k {
            acc ^= e(k - i) & ps[i - 1];
        }
        ps.push(acc);
    }
    ps.into_iter().map(|x| 1 ^ x).collect()
}

/// All partitions of `m`, in decreasing order of the largest part (then
/// lexicographically decreasing); each partition is non-increasing.
pub fn partitions_of(m: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(rest)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m > 0 {
        rec(m, m, &mut Vec::new(), &mut out);
    }
    out
}

/// `Σ_{d_i | k} d_i`.
pub fn rational_weierstrass(partition: &[u32], k: u32) -> u64 {
    partition
        .iter()
        .filter(|&&d| k.is_multiple_of(d))
        .map(|&d| d as u64)
        .sum()
}

fn feasible_partitions(p: &ResiduePattern, kmax: u32) -> Vec<Vec<u32>> {
    let parity = parity_point_counts(p, kmax);
    partitions_of(p.two_rank() + 1)
        .into_iter()
        .filter(|d| {
            (1..=kmax).all(|k| rational_weierstrass(d, k) % 2 == parity[k as usize - 1] as u64)
        })
        .collect()
}

/// Basic-mode verdict for one pattern with congruences `k = 1..=kmax`.
pub fn pattern_is_obstruction(p: &ResiduePattern, kmax: u32) -> ObstructionReport {
    let witness = feasible_partitions(p, kmax).into_iter().next();
    ObstructionReport {
        pattern: p.clone(),
        obstructed: witness.is_none(),
        witness,
        mode: Mode::Basic,
        certificates: Vec::new(),
    }
}

/// `N_k mod m` from Weil coefficients and `q` reduced mod `m`. `N_k` is an
/// integer polynomial in `(q, a_i)`, so this is well defined.
pub fn point_count_mod(q: u64, a: &[u64], k: u32, m: u64) -> u64 {
    let g = a.len();
    let m128 = m as u128;
    let md = |x: u128| (x % m128) as u64;
    let sub = |x: u64, y: u64| (x + m - y % m) % m;
    let pow = |b: u64, e: usize| (0..e).fold(1u64 % m, |acc, _| md(acc as u128 * b as u128));
    let low = |i: usize| if i == 0 { 1 % m } else { a[i - 1] % m };
    let e: Vec<u64> = (1..=2 * g)
        .map(|i| {
            let c = if i <= g {
                low(i)
            } else {
                md(low(2 * g - i) as u128 * pow(q, i - g) as u128)
            };
            if i % 2 == 0 {
                c
            } else {
                sub(0, c)
            }
        })
        .collect();
    let e_at = |i: usize| e.get(i - 1).copied().unwrap_or(0);
    let mut p: Vec<u64> = Vec::with_capacity(k as usize);
    for kk in 1..=k as usize {
        let mut acc = md(kk as u128 * e_at(kk) as u128);
        if kk % 2 == 0 {
            acc = sub(0, acc);
        }
        for i in 1..kk {
            let term = md(e_at(kk - i) as u128 * p[i - 1] as u128);
            acc = if (kk - 1 - i) % 2 == 0 {
                (acc + term) % m
            } else {
                sub(acc, term)
            };
        }
        p.push(acc);
    }
    sub((pow(q, k as usize) + 1) % m, p[k as usize - 1])
}

/// Value of `N_k mod 2^(a+1)` if it is the same for every lift of the
/// pattern's coefficients and every even `q` mod `2^(a+1)`.
pub fn determined_count(p: &ResiduePattern, k: u32) -> Option<(u64, u64)> {
    let a = k.trailing_zeros();
    let m = 1u64 << (a + 1);
    let g = p.0.len();
    let half = m / 2;
    let mut value = None;
    let mut lift = vec![0u64; g];
    for idx in 0..half.pow(g as u32) {
        let mut r = idx;
        for (i, slot) in lift.iter_mut().enumerate() {
            *slot = p.0[i] as u64 + 2 * (r % half);
            r /= half;
        }
        for q in (0..m).step_by(2) {
            let n = point_count_mod(q, &lift, k, m);
            match value {
                None => value = Some(n),
                Some(v) if v != n => return None,
                _ => {}
            }
        }
    }
    value.map(|v| (m, v))
}

/// Certificates from `N_k ≡ 2 - W_k (mod 2^(a+1))` for even `k <= kmax`;
/// each one rules out every partition that survives the basic congruences.
pub fn higher_power_flag(p: &ResiduePattern, kmax: u32) -> Vec<Certificate> {
    let survivors = feasible_partitions(p, kmax);
    let mut out = Vec::new();
    for k in (2..=kmax).step_by(2) {
        let Some((m, value)) = determined_count(p, k) else {
            continue;
        };
        let kills_all = survivors.iter().all(|d| {
            let w = rational_weierstrass(d, k) % m;
            (value + w) % m != 2 % m
        });
        if kills_all {
            out.push(Certificate {
                k,
                modulus: m,
                value,
            });
        }
    }
    out
}

/// Verdict in the requested mode. In higher-power mode a pattern that the
/// basic congruences leave open is obstructed once any certificate exists.
pub fn report(p: &ResiduePattern, kmax: u32, mode: Mode) -> ObstructionReport {
    let mut r = pattern_is_obstruction(p, kmax);
    if mode == Mode::HigherPower && !r.obstructed {
        r.certificates = higher_power_flag(p, kmax);
        if !r.certificates.is_empty() {
            r.obstructed = true;
            r.witness = None;
            r.mode = Mode::HigherPower;
        }
    }
    r
}

/// Reports for all `2^g` patterns, `n_1` most significant.
pub fn all_reports(genus: u32, kmax: u32, mode: Mode) -> Vec<ObstructionReport> {
    let patterns: Vec<ResiduePattern> = ResiduePattern::all(genus).collect();
    patterns.par_iter().map(|p| report(p, kmax, mode)).collect()
}

pub fn generate_obstructions(genus: u32, kmax: u32, mode: Mode) -> Vec<ResiduePattern> {
    all_reports(genus, kmax, mode)
        .into_iter()
        .filter(|r| r.obstructed)
        .map(|r| r.pattern)
        .collect()
}

/// Pads an obstructed pattern with `zeros` zeros; the 2-rank and the
/// relevant partitions do not change, so the result is obstructed in genus
/// `g + zeros`.
pub fn lift_pattern(p: &ResiduePattern, zeros: u32) -> Result<ResiduePattern> {
    let g = p.genus();
    if !pattern_is_obstruction(p, 2 * g).obstructed {
        return Err(Error::Invalid(format!(
            "pattern {p} is not obstructed in genus {g}"
        )));
    }
    let mut bits = p.0.clone();
    bits.extend(std::iter::repeat_n(0, zeros as usize));
    Ok(ResiduePattern(bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> ResiduePattern {
        s.parse().unwrap()
    }

    fn names(v: &[ResiduePattern]) -> Vec<String> {
        let mut v: Vec<String> = v.iter().map(|p| p.to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn parity_examples() {
        let odd = |v: Vec<u8>| vec![v[0], v[2], v[4]];
        assert_eq!(odd(parity_point_counts(&pat("011"), 6)), vec![1, 0, 0]);
        assert_eq!(odd(parity_point_counts(&pat("101"), 6)), vec![0, 1, 1]);
        assert_eq!(parity_point_counts(&pat("0000"), 8), vec![1; 8]);
    }

    /// Parities from exact counts of random integer lifts agree.
    #[test]
    fn parity_matches_exact_recursion() {
        use crate::zeta::counts_from_weil;
        use num_bigint::BigInt;
        use num_integer::Integer;
        for g in 1..=4u32 {
            for p in ResiduePattern::all(g) {
                for (shift, q) in [(0i64, 2u64), (2, 4), (-4, 8)] {
                    let a: Vec<BigInt> =
                        p.0.iter()
                            .enumerate()
                            .map(|(i, &b)| BigInt::from(b as i64 + shift * (i as i64 + 1)))
                            .collect();
                    let n = counts_from_weil(q, &a, 2 * g as usize);
                    let par: Vec<u8> = n
                        .iter()
                        .map(|x| x.mod_floor(&BigInt::from(2)).to_string().parse().unwrap())
                        .collect();
                    assert_eq!(par, parity_point_counts(&p, 2 * g));
                }
            }
        }
    }

    #[test]
    fn partitions() {
        assert_eq!(
            partitions_of(4),
            vec![
                vec![4],
                vec![3, 1],
                vec![2, 2],
                vec![2, 1, 1],
                vec![1, 1, 1, 1]
            ]
        );
        assert_eq!(partitions_of(1), vec![vec![1]]);
        assert_eq!(partitions_of(5).len(), 7);
        let p: Vec<usize> = (1..=12).map(|m| partitions_of(m).len()).collect();
        assert_eq!(p, vec![1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]);
    }

    #[test]
    fn reports() {
        assert!(pattern_is_obstruction(&pat("011"), 6).obstructed);
        let r = pattern_is_obstruction(&pat("110"), 6);
        assert_eq!(r.witness, Some(vec![3]));
        let r = pattern_is_obstruction(&pat("0101"), 8);
        assert_eq!(r.witness, Some(vec![4, 1]));
    }

    #[test]
    fn lists() {
        assert!(generate_obstructions(1, 2, Mode::Basic).is_empty());
        assert!(generate_obstructions(2, 4, Mode::Basic).is_empty());
        assert_eq!(
            names(&generate_obstructions(3, 6, Mode::Basic)),
            ["011", "101"]
        );
        assert_eq!(
            names(&generate_obstructions(4, 8, Mode::Basic)),
            ["0011", "0110", "0111", "1001", "1010", "1101"]
        );
        assert_eq!(
            names(&generate_obstructions(4, 8, Mode::HigherPower)),
            ["0011", "0101", "0110", "0111", "1001", "1010", "1101"]
        );
        assert_eq!(
            names(&generate_obstructions(3, 6, Mode::HigherPower)),
            ["011", "101"]
        );
    }

    #[test]
    fn certificates() {
        let c = higher_power_flag(&pat("0101"), 8);
        assert!(c.contains(&Certificate {
            k: 4,
            modulus: 8,
            value: 3
        }));
        assert!(higher_power_flag(&pat("1100"), 8).is_empty());
        assert!(c.iter().all(|c| c.k % 2 == 0));
    }

    #[test]
    fn modular_counts_match_exact() {
        use crate::zeta::counts_from_weil;
        use num_bigint::BigInt;
        use num_integer::Integer;
        let a = [3i64, -5, 6, 11];
        for q in [2u64, 4, 6, 16] {
            let exact = counts_from_weil(q, &a.map(BigInt::from), 8);
            for m in [4u64, 8, 16] {
                let red: Vec<u64> = a.iter().map(|x| x.rem_euclid(m as i64) as u64).collect();
                for k in 1..=8 {
                    let want = exact[k - 1].mod_floor(&BigInt::from(m));
                    assert_eq!(
                        BigInt::from(point_count_mod(q % m, &red, k as u32, m)),
                        want
                    );
                }
            }
        }
    }

    #[test]
    fn lift_closure_and_monotonicity() {
        for g in 2..=5u32 {
            let here = generate_obstructions(g, 2 * g, Mode::Basic);
            let next = generate_obstructions(g + 1, 2 * g + 2, Mode::Basic);
            for p in &here {
                let lifted = lift_pattern(p, 1).unwrap();
                assert!(next.contains(&lifted), "{p} -> {lifted}");
            }
            for k in 1..2 * g {
                let small = generate_obstructions(g, k, Mode::Basic);
                let big = generate_obstructions(g, k + 1, Mode::Basic);
                assert!(small.iter().all(|p| big.contains(p)));
            }
        }
        assert!(lift_pattern(&pat("110"), 1).is_err());
    }
}
