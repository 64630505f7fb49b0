//! One model `y^2 + v(x) y = u(x)` per isomorphism class of genus-g
//! hyperelliptic curves over GF(2^n).
//!
//! For each PGL2-orbit representative `v`, the admissible `u` form the
//! quotient `V/U_v` where `U_v = {r v + r^2 : deg r <= g+1}`. The stabilizer
//! of `v` acts on `V/U_v`; one canonical `u` is kept per stabilizer orbit.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2space::{
    cmp_packed_shortlex, pack_poly, packed_degree, unpack_poly, Subspace, Transversal, MAX_BITS,
};
use crate::gf2n::{check_gcd_condition, Field, FieldElement};
use crate::moebius::{monic_orbit_reps, psi, stabilizer, ProjMatrix};
use crate::poly::Poly;

/// Largest transversal dimension accepted (the visited bitmap is `2^d` bits).
pub const MAX_TRANSVERSAL_BITS: u32 = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveRecord {
    pub genus: u32,
    pub field: Field,
    pub v: Poly,
    pub u: Poly,
    /// `N_1..N_K` over `GF(q^k)`.
    pub counts: Option<Vec<u64>>,
    /// Weil coefficients `a_1..a_g`.
    pub weil: Option<Vec<i64>>,
    pub two_rank: Option<u32>,
}

impl CurveRecord {
    pub fn new(genus: u32, v: Poly, u: Poly) -> CurveRecord {
        CurveRecord {
            genus,
            field: v.field().clone(),
            v,
            u,
            counts: None,
            weil: None,
            two_rank: None,
        }
    }

    pub fn cmp_models(&self, other: &CurveRecord) -> Ordering {
        self.v
            .cmp_shortlex(&other.v)
            .then_with(|| self.u.cmp_shortlex(&other.u))
    }

    pub fn to_row(&self) -> CurveRow {
        let enc = |p: &Poly| p.coeffs().iter().map(|c| c.bits()).collect();
        CurveRow {
            genus: self.genus,
            n: self.field.n(),
            q: self.field.q(),
            field_poly: self.field.modulus(),
            v: enc(&self.v),
            u: enc(&self.u),
            counts: self.counts.clone(),
            weil: self.weil.clone(),
            two_rank: self.two_rank,
        }
    }
}

/// Flat serialized form of a [`CurveRecord`]. `field_poly` is the modulus
/// as a bit-integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveRow {
    pub genus: u32,
    pub n: u32,
    pub q: u64,
    pub field_poly: u32,
    pub v: Vec<u32>,
    pub u: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weil: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_rank: Option<u32>,
}

impl CurveRow {
    pub fn to_record(&self) -> Result<CurveRecord> {
        let field = Field::conway(self.n)?;
        let field = if field.modulus() == self.field_poly {
            field
        } else {
            Field::with_modulus(self.field_poly as u64)?
        };
        if field.n() != self.n || field.q() != self.q {
            return Err(Error::Invalid(format!(
                "field_poly {} does not define GF({})",
                self.field_poly, self.q
            )));
        }
        let dec =
            |c: &[u32]| Poly::from_bits(&field, &c.iter().map(|&x| x as u64).collect::<Vec<_>>());
        let v = dec(&self.v)?;
        let u = dec(&self.u)?;
        if !v.is_monic() {
            return Err(Error::Invalid(format!("v = {v} is not monic")));
        }
        Ok(CurveRecord {
            genus: self.genus,
            field,
            v,
            u,
            counts: self.counts.clone(),
            weil: self.weil.clone(),
            two_rank: self.two_rank,
        })
    }
}

fn degree_window(v: Option<usize>, u: Option<usize>, genus: u32) -> bool {
    let g = genus as usize;
    let top = match (u, v) {
        (None, None) => return false,
        (u, v) => u.unwrap_or(0).max(2 * v.unwrap_or(0)),
    };
    (2 * g + 1..=2 * g + 2).contains(&top)
}

/// Smoothness and genus test for `y^2 + v y = u`: the degree window
/// `2g+1 <= max(deg u, 2 deg v) <= 2g+2`, `gcd(v, u'^2 + v'^2 u) = 1`, and at
/// infinity either `deg v = g+1` or `a_{2g+1}^2 != a_{2g+2} b_g^2`.
///
/// Constant `u` is accepted as input; such models fail the window unless
/// `deg v` alone supplies it, and the conditions are invariant under
/// `u -> u + r^2 + v r`.
pub fn is_hyperelliptic(v: &Poly, u: &Poly, genus: u32) -> bool {
    if !v.is_monic() || v.field() != u.field() {
        return false;
    }
    let g = genus as usize;
    if !degree_window(v.degree(), u.degree(), genus) {
        return false;
    }
    let du = u.derivative();
    let dv = v.derivative();
    let witness = &du.square() + &(&dv.square() * u);
    match v.gcd(&witness) {
        Ok(d) if d.is_one() => {}
        _ => return false,
    }
    if v.degree() == Some(g + 1) {
        return true;
    }
    let f = v.field();
    let a1 = u.coeff(2 * g + 1);
    let a2 = u.coeff(2 * g + 2);
    let b = v.coeff(g);
    f.square(a1) != f.mul(a2, f.square(b))
}

/// Bookkeeping for one `v`: every coset is either part of an emitted orbit
/// or discarded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetAccounting {
    pub stabilizer_size: usize,
    pub rank_u: usize,
    pub cosets: u64,
    pub kept_orbit_total: u64,
    pub discarded: u64,
    pub orbit_sizes: Vec<u64>,
}

/// Per-`v` data: `U_v`, its transversal and the stabilizer acting on packed
/// vectors.
pub struct VContext {
    field: Field,
    genus: u32,
    v: Poly,
    stabilizer: Vec<ProjMatrix>,
    space: Subspace,
    transversal: Transversal,
    /// `images[a][b]` = packed `psi_{2g+2}(A_a, e_b)` for basis bit `b`.
    images: Vec<Vec<u128>>,
}

impl VContext {
    pub fn new(v: &Poly, genus: u32, field: &Field) -> Result<VContext> {
        check_gcd_condition(genus, field)?;
        let n = field.n();
        let g = genus as usize;
        if !v.is_monic() || v.degree().is_some_and(|d| d > g + 1) {
            return Err(Error::Invalid(format!(
                "v = {v} must be monic of degree <= {}",
                g + 1
            )));
        }
        let len = (2 * genus + 3) * n;
        if len > MAX_BITS {
            return Err(Error::Budget(format!(
                "coefficient vectors need {len} bits, at most {MAX_BITS} supported"
            )));
        }
        let alpha_pows: Vec<FieldElement> =
            (0..n).map(|j| field.pow(field.alpha(), j as u64)).collect();
        let mut gens = Vec::with_capacity((g + 2) * n as usize);
        for i in 0..=g + 1 {
            for &a in &alpha_pows {
                let r = Poly::monomial(field, a, i);
                gens.push(pack_poly(&(&(&r * v) + &r.square()), n));
            }
        }
        let space = Subspace::span(len, gens);
        let transversal = space.transversal();
        if transversal.dimension() > MAX_TRANSVERSAL_BITS {
            return Err(Error::Budget(format!(
                "{} cosets per v exceed the visited-set limit 2^{MAX_TRANSVERSAL_BITS}",
                transversal.size()
            )));
        }
        let stabilizer = stabilizer(v, genus, field)?;
        let m = 2 * g + 2;
        let mut images = Vec::with_capacity(stabilizer.len());
        for a in &stabilizer {
            let mut img = Vec::with_capacity(len as usize);
            for i in 0..=m {
                let base = psi(field, a, &Poly::monomial(field, FieldElement::ONE, i), m)?;
                for &c in &alpha_pows {
                    img.push(pack_poly(&base.scale(c), n));
                }
            }
            images.push(img);
        }
        Ok(VContext {
            field: field.clone(),
            genus,
            v: v.clone(),
            stabilizer,
            space,
            transversal,
            images,
        })
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn transversal(&self) -> &Transversal {
        &self.transversal
    }

    pub fn stabilizer(&self) -> &[ProjMatrix] {
        &self.stabilizer
    }

    /// Packed `psi_{2g+2}(A, w)` for the `a`-th stabilizer element.
    pub fn act_raw(&self, a: usize, w: u128) -> u128 {
        let img = &self.images[a];
        let mut acc = 0u128;
        let mut rest = w;
        while rest != 0 {
            acc ^= img[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        acc
    }

    /// The action of the `a`-th stabilizer element on canonical cosets.
    pub fn act(&self, a: usize, w: u128) -> u128 {
        self.space.reduce(self.act_raw(a, w))
    }

    /// Sorted, deduplicated stabilizer orbit of a canonical coset representative.
    pub fn orbit(&self, w: u128) -> Vec<u128> {
        let mut orb: Vec<u128> = (0..self.stabilizer.len()).map(|a| self.act(a, w)).collect();
        orb.sort_unstable();
        orb.dedup();
        orb
    }

    pub fn run(&self) -> (Vec<CurveRecord>, CosetAccounting) {
        let n = self.field.n();
        let dims = self.transversal.dimension();
        let cosets = 1u64 << dims;
        let mut visited = vec![0u64; (cosets as usize).div_ceil(64)];
        let mut out = Vec::new();
        let mut acc = CosetAccounting {
            stabilizer_size: self.stabilizer.len(),
            rank_u: self.space.rank(),
            cosets,
            kept_orbit_total: 0,
            discarded: 0,
            orbit_sizes: Vec::new(),
        };
        let deg_v = self.v.degree();
        for idx in 0..cosets {
            if visited[(idx >> 6) as usize] >> (idx & 63) & 1 != 0 {
                continue;
            }
            let w = self.transversal.deposit(idx);
            let orb = self.orbit(w);
            for &x in &orb {
                let j = self.transversal.extract(x);
                visited[(j >> 6) as usize] |= 1 << (j & 63);
            }
            let size = orb.len() as u64;
            // A coset whose canonical representative misses the degree window
            // has no valid member: reaching degree 2g+2 needs r = c x^(g+1),
            // which forces a_{2g+1}^2 = a_{2g+2} b_g^2. Validity is shared
            // along the orbit, so the whole orbit is dropped.
            if !degree_window(deg_v, packed_degree(w, n), self.genus) {
                acc.discarded += size;
                continue;
            }
            let best = *orb
                .iter()
                .min_by(|a, b| cmp_packed_shortlex(**a, **b, n))
                .expect("orbit contains w");
            let u = unpack_poly(&self.field, best);
            if is_hyperelliptic(&self.v, &u, self.genus) {
                acc.kept_orbit_total += size;
                acc.orbit_sizes.push(size);
                out.push(CurveRecord::new(self.genus, self.v.clone(), u));
            } else {
                acc.discarded += size;
            }
        }
        (out, acc)
    }
}

/// Models for one orbit representative `v`, with coset accounting.
pub fn enumerate_for_v_with_accounting(
    v: &Poly,
    genus: u32,
    field: &Field,
) -> Result<(Vec<CurveRecord>, CosetAccounting)> {
    Ok(VContext::new(v, genus, field)?.run())
}

pub fn enumerate_for_v(v: &Poly, genus: u32, field: &Field) -> Result<Vec<CurveRecord>> {
    Ok(enumerate_for_v_with_accounting(v, genus, field)?.0)
}

/// All isomorphism classes, sorted by `(v, u)` in shortlex order. The
/// per-`v` jobs run on the current rayon pool.
pub fn enumerate_genus(genus: u32, field: &Field) -> Result<Vec<CurveRecord>> {
    if genus == 0 {
        return Err(Error::Invalid("genus must be at least 1".into()));
    }
    check_gcd_condition(genus, field)?;
    let reps = monic_orbit_reps(genus, field)?;
    let batches = reps
        .par_iter()
        .map(|v| enumerate_for_v(v, genus, field))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<CurveRecord> = batches.into_iter().flatten().collect();
    out.sort_by(|a, b| a.cmp_models(b));
    Ok(out)
}
