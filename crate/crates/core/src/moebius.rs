//! The twisted PGL2 action `ψ_m(A)(f) = (cx+d)^m f((ax+b)/(cx+d))` on
//! polynomials of degree at most `m`, monic normalization, orbit
//! representatives and stabilizers.
//!
//! `ψ_m(B) ∘ ψ_m(A) = ψ_m(A·B)`, so this is a right action: `f·A·B`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::f2space::pack_poly;
use crate::gf2n::{check_gcd_condition, Field, FieldElement};
use crate::poly::Poly;

/// A 2x2 matrix `(a b; c d)`. As a PGL2 class it is kept in canonical form,
/// where the first nonzero entry in the order a, b, c, d is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProjMatrix {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
}

impl ProjMatrix {
    pub fn new(a: u32, b: u32, c: u32, d: u32) -> ProjMatrix {
        ProjMatrix {
            a: FieldElement(a),
            b: FieldElement(b),
            c: FieldElement(c),
            d: FieldElement(d),
        }
    }

    pub fn identity() -> ProjMatrix {
        ProjMatrix::new(1, 0, 0, 1)
    }

    /// `ad + bc` (the determinant in characteristic 2).
    pub fn det(&self, field: &Field) -> FieldElement {
        field.mul(self.a, self.d) + field.mul(self.b, self.c)
    }

    pub fn is_invertible(&self, field: &Field) -> bool {
        !self.det(field).is_zero()
    }

    pub fn scale(&self, field: &Field, lambda: FieldElement) -> ProjMatrix {
        ProjMatrix {
            a: field.mul(self.a, lambda),
            b: field.mul(self.b, lambda),
            c: field.mul(self.c, lambda),
            d: field.mul(self.d, lambda),
        }
    }

    pub fn canonical(&self, field: &Field) -> ProjMatrix {
        let lead = [self.a, self.b, self.c, self.d]
            .into_iter()
            .find(|e| !e.is_zero())
            .expect("zero matrix has no projective class");
        self.scale(field, field.inv_nonzero(lead))
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, field: &Field, rhs: &ProjMatrix) -> ProjMatrix {
        let m = |x, y| field.mul(x, y);
        ProjMatrix {
            a: m(self.a, rhs.a) + m(self.b, rhs.c),
            b: m(self.a, rhs.b) + m(self.b, rhs.d),
            c: m(self.c, rhs.a) + m(self.d, rhs.c),
            d: m(self.c, rhs.b) + m(self.d, rhs.d),
        }
    }

    /// Every canonical PGL2 class; there are `q^3 - q` of them.
    pub fn all_classes(field: &Field) -> Vec<ProjMatrix> {
        let mut out = Vec::with_capacity((field.q().pow(3) - field.q()) as usize);
        for b in field.elements() {
            for c in field.elements() {
                for d in field.elements() {
                    let m = ProjMatrix {
                        a: FieldElement::ONE,
                        b,
                        c,
                        d,
                    };
                    if m.is_invertible(field) {
                        out.push(m);
                    }
                }
            }
        }
        for c in field.nonzero_elements() {
            for d in field.elements() {
                out.push(ProjMatrix {
                    a: FieldElement::ZERO,
                    b: FieldElement::ONE,
                    c,
                    d,
                });
            }
        }
        out
    }

    /// `diag(α, 1)`, the translation `x -> x + 1` and the inversion `x -> 1/x`
    /// generate PGL2(GF(2^n)).
    pub fn generators(field: &Field) -> [ProjMatrix; 3] {
        [
            ProjMatrix {
                a: field.alpha(),
                ..ProjMatrix::identity()
            },
            ProjMatrix::new(1, 1, 0, 1),
            ProjMatrix::new(0, 1, 1, 0),
        ]
    }
}

impl fmt::Display for ProjMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

/// `ψ_m(A)(f) = Σ f_i (ax+b)^i (cx+d)^(m-i)`.
pub fn psi(field: &Field, m: &ProjMatrix, f: &Poly, deg: usize) -> Result<Poly> {
    if let Some(df) = f.degree() {
        if df > deg {
            return Err(Error::DegreeBound {
                degree: df,
                bound: deg,
            });
        }
    }
    let num = Poly::linear(field, m.a, m.b);
    let den = Poly::linear(field, m.c, m.d);
    let mut num_pows = vec![Poly::one(field)];
    let mut den_pows = vec![Poly::one(field)];
    for i in 1..=deg {
        num_pows.push(&num_pows[i - 1] * &num);
        den_pows.push(&den_pows[i - 1] * &den);
    }
    let mut out = Poly::zero(field);
    for (i, &c) in f.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = (&num_pows[i] * &den_pows[deg - i]).scale(c);
        out = &out + &term;
    }
    Ok(out)
}

/// `ψ_(g+1)(A)(f)` rescaled to be monic. With `gcd(g+1, 2^n-1) = 1` this is
/// the same as acting by the unique scalar multiple of `A` that makes the
/// leading coefficient 1, so it is a right action of PGL2 on monic polynomials.
pub fn act_monic(field: &Field, m: &ProjMatrix, f: &Poly, genus: u32) -> Result<Poly> {
    check_gcd_condition(genus, field)?;
    Ok(psi(field, m, f, genus as usize + 1)?.make_monic())
}

/// Monic polynomials of degree `0..=g+1`.
pub fn monic_polys(field: &Field, genus: u32) -> Vec<Poly> {
    let q = field.q();
    let mut out = Vec::new();
    for d in 0..=genus as usize + 1 {
        let count = q.pow(d as u32);
        for idx in 0..count {
            let mut coeffs = Vec::with_capacity(d + 1);
            let mut r = idx;
            for _ in 0..d {
                coeffs.push(FieldElement((r % q) as u32));
                r /= q;
            }
            coeffs.push(FieldElement::ONE);
            out.push(Poly::new(field, coeffs));
        }
    }
    out
}

/// Partition of the monic polynomials of degree at most `g+1` into
/// `act_monic` orbits, by breadth-first closure under the three generators.
/// Each orbit is sorted in shortlex order; orbits are ordered by their first
/// element.
pub fn monic_orbits(genus: u32, field: &Field) -> Result<Vec<Vec<Poly>>> {
    check_gcd_condition(genus, field)?;
    let gens = ProjMatrix::generators(field);
    let n = field.n();
    let mut seen: HashSet<u128> = HashSet::new();
    let mut orbits = Vec::new();
    for start in monic_polys(field, genus) {
        if !seen.insert(pack_poly(&start, n)) {
            continue;
        }
        let mut orbit = vec![start.clone()];
        let mut queue = VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            for m in &gens {
                let h = act_monic(field, m, &f, genus)?;
                if seen.insert(pack_poly(&h, n)) {
                    orbit.push(h.clone());
                    queue.push_back(h);
                }
            }
        }
        orbit.sort_by(|a, b| a.cmp_shortlex(b));
        orbits.push(orbit);
    }
    orbits.sort_by(|a, b| a[0].cmp_shortlex(&b[0]));
    Ok(orbits)
}

/// One representative per orbit: the shortlex-minimal member.
pub fn monic_orbit_reps(genus: u32, field: &Field) -> Result<Vec<Poly>> {
    Ok(monic_orbits(genus, field)?
        .into_iter()
        .map(|mut o| o.swap_remove(0))
        .collect())
}

/// All PGL2 classes fixing `v` under `act_monic`, each rescaled to the GL2
/// representative with `ψ_(g+1)(A)(v) = v` exactly.
pub fn stabilizer(v: &Poly, genus: u32, field: &Field) -> Result<Vec<ProjMatrix>> {
    check_gcd_condition(genus, field)?;
    if !v.is_monic() {
        return Err(Error::Invalid(format!("v = {v} is not monic")));
    }
    let m = genus as usize + 1;
    let mut out = Vec::new();
    for class in ProjMatrix::all_classes(field) {
        let h = psi(field, &class, v, m)?;
        let lead = h.leading();
        if h.scale(field.inv_nonzero(lead)) != *v {
            continue;
        }
        let lambda = field.root(field.inv_nonzero(lead), m as u64)?;
        let rep = class.scale(field, lambda);
        debug_assert_eq!(psi(field, &rep, v, m)?, *v);
        out.push(rep);
    }
    Ok(out)
}
