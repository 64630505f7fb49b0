//! Slow reference implementations for certifying the fast paths on small
//! inputs.

use std::collections::HashMap;

use crate::census::{is_hyperelliptic, CurveRecord};
use crate::error::{Error, Result};
use crate::f2space::{pack_poly, unpack_poly};
use crate::gf2n::{check_gcd_condition, Field, FieldElement};
use crate::moebius::{monic_polys, psi, ProjMatrix};
use crate::poly::Poly;
use crate::stats::ClassCountTable;
use crate::weil::{is_weil_poly, WeilPoly};

/// Largest number of `(v, u)` pairs `brute_enumerate` will scan.
pub const PAIR_BUDGET: u64 = 1 << 24;

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Every valid model, grouped into isomorphism classes.
pub struct BruteClasses {
    genus: u32,
    field: Field,
    index: HashMap<(u128, u128), usize>,
    class: Vec<usize>,
    /// Canonical member (shortlex-minimal `(v, u)`) per class.
    pub representatives: Vec<CurveRecord>,
    /// Class sizes, aligned with `representatives`.
    pub sizes: Vec<usize>,
}

impl BruteClasses {
    pub fn models(&self) -> usize {
        self.class.len()
    }

    /// Class id of the model `(v, u)`, if it is valid.
    pub fn class_of(&self, v: &Poly, u: &Poly) -> Option<usize> {
        let n = self.field.n();
        self.index
            .get(&(pack_poly(v, n), pack_poly(u, n)))
            .map(|&i| self.class[i])
    }

    /// Members of class `c`.
    pub fn members(&self, c: usize) -> Vec<(Poly, Poly)> {
        self.index
            .iter()
            .filter(|(_, &i)| self.class[i] == c)
            .map(|(&(v, u), _)| (unpack_poly(&self.field, v), unpack_poly(&self.field, u)))
            .collect()
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }
}

/// Enumerates all `(v, u)` with `v` monic of degree `<= g+1` and
/// `deg u <= 2g+2` passing [`is_hyperelliptic`], and merges them under
/// `x -> (ax+b)/(cx+d)` (with the `y` rescaling that keeps `v` monic) for the
/// three generators of `GL2`, and `y -> y + r` for `r = α^j x^i`.
pub fn brute_classes(genus: u32, field: &Field) -> Result<BruteClasses> {
    check_gcd_condition(genus, field)?;
    let g = genus as usize;
    let n = field.n();
    let vs = monic_polys(field, genus);
    let u_bits = (2 * g as u32 + 3) * n;
    let pairs = (vs.len() as u64).saturating_mul(1u64.checked_shl(u_bits).unwrap_or(u64::MAX));
    if u_bits >= 64 || pairs > PAIR_BUDGET {
        return Err(Error::Budget(format!(
            "{pairs} candidate pairs exceed the oracle budget {PAIR_BUDGET}"
        )));
    }
    let mut index: HashMap<(u128, u128), usize> = HashMap::new();
    let mut models: Vec<(Poly, Poly)> = Vec::new();
    for v in &vs {
        let vb = pack_poly(v, n);
        for ub in 0..1u128 << u_bits {
            let u = unpack_poly(field, ub);
            if is_hyperelliptic(v, &u, genus) {
                index.insert((vb, ub), models.len());
                models.push((v.clone(), u));
            }
        }
    }
    let gens = [
        ProjMatrix {
            a: field.alpha(),
            ..ProjMatrix::identity()
        },
        ProjMatrix::new(1, 1, 0, 1),
        ProjMatrix::new(0, 1, 1, 0),
    ];
    let alpha_pows: Vec<FieldElement> =
        (0..n).map(|j| field.pow(field.alpha(), j as u64)).collect();
    let mut uf = UnionFind::new(models.len());
    for (i, (v, u)) in models.iter().enumerate() {
        let mut targets: Vec<(Poly, Poly)> = Vec::new();
        for a in &gens {
            let v1 = psi(field, a, v, g + 1)?;
            let lead_inv = field.inv(v1.leading())?;
            let u1 = psi(field, a, u, 2 * g + 2)?.scale(field.square(lead_inv));
            targets.push((v1.scale(lead_inv), u1));
        }
        for deg in 0..=g + 1 {
            for &c in &alpha_pows {
                let r = Poly::monomial(field, c, deg);
                targets.push((v.clone(), &(u + &r.square()) + &(v * &r)));
            }
        }
        for (v2, u2) in targets {
            let key = (pack_poly(&v2, n), pack_poly(&u2, n));
            let j = *index.get(&key).ok_or_else(|| {
                Error::Invalid(format!(
                    "move left the valid set: ({v}, {u}) -> ({v2}, {u2})"
                ))
            })?;
            uf.union(i, j);
        }
    }
    let mut root_to_class: HashMap<usize, usize> = HashMap::new();
    let mut class = vec![0; models.len()];
    let mut representatives: Vec<CurveRecord> = Vec::new();
    let mut sizes = Vec::new();
    for i in 0..models.len() {
        let root = uf.find(i);
        let c = *root_to_class.entry(root).or_insert_with(|| {
            representatives.push(CurveRecord::new(
                genus,
                models[i].0.clone(),
                models[i].1.clone(),
            ));
            sizes.push(0);
            representatives.len() - 1
        });
        class[i] = c;
        sizes[c] += 1;
        let rep = &mut representatives[c];
        let cand = CurveRecord::new(genus, models[i].0.clone(), models[i].1.clone());
        if cand.cmp_models(rep).is_lt() {
            *rep = cand;
        }
    }
    Ok(BruteClasses {
        genus,
        field: field.clone(),
        index,
        class,
        representatives,
        sizes,
    })
}

/// One canonical model per isomorphism class, sorted.
pub fn brute_enumerate(genus: u32, field: &Field) -> Result<Vec<CurveRecord>> {
    let mut reps = brute_classes(genus, field)?.representatives;
    reps.sort_by(|a, b| a.cmp_models(b));
    Ok(reps)
}

/// Scans the box `s^2 <= 36q`, `|t| <= s^2/3 + 9q`,
/// `|u| <= 2q|s| + 2√q(|t| + q)` and tabulates the triples that are Weil
/// polynomials.
pub fn brute_w3_scan(q: u64) -> Result<ClassCountTable> {
    if !(2..=8).contains(&q) || !q.is_power_of_two() {
        return Err(Error::Budget(format!(
            "brute scan supports q in {{2, 4, 8}}, got {q}"
        )));
    }
    let q = q as i64;
    let mut table = ClassCountTable::empty(q as u64);
    let mut s = 0i64;
    while (s + 1) * (s + 1) <= 36 * q {
        s += 1;
    }
    let smax = s;
    for s in -smax..=smax {
        let tmax = (s * s) / 3 + 9 * q + 1;
        for t in -tmax..=tmax {
            // ceil(2√q(|t| + q)) via integer square root, plus one for slack
            let m = 4 * q * (t.abs() + q).pow(2);
            let mut r = (m as f64).sqrt() as i64;
            while r * r < m {
                r += 1;
            }
            let umax = 2 * q * s.abs() + r + 1;
            for u in -umax..=umax {
                if is_weil_poly(&WeilPoly::new(q as u64, vec![s, t, u])) {
                    table.add(s, t, u);
                }
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::enumerate_genus;
    use crate::zeta::point_counts;

    #[test]
    fn genus1_f2_classes() {
        let f = Field::conway(1).unwrap();
        let reps = brute_enumerate(1, &f).unwrap();
        let census = enumerate_genus(1, &f).unwrap();
        assert_eq!(reps.len(), census.len());
    }

    #[test]
    fn isomorphic_models_share_counts() {
        let f = Field::conway(1).unwrap();
        let classes = brute_classes(2, &f).unwrap();
        for c in 0..classes.representatives.len() {
            let members = classes.members(c);
            let want = point_counts(&classes.representatives[c], 4).unwrap();
            for (v, u) in members.iter().take(6) {
                let rec = CurveRecord::new(2, v.clone(), u.clone());
                assert_eq!(point_counts(&rec, 4).unwrap(), want);
            }
        }
    }

    #[test]
    fn budget() {
        let f = Field::conway(3).unwrap();
        assert!(matches!(brute_classes(2, &f), Err(Error::Budget(_))));
        assert!(matches!(brute_w3_scan(16), Err(Error::Budget(_))));
    }

    #[test]
    fn w3_scan_q2() {
        let t = brute_w3_scan(2).unwrap();
        assert_eq!(t, crate::stats::w3_class_counts(2).unwrap());
    }
}
