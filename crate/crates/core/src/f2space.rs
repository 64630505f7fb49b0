//! GF(2)-linear algebra on packed bit vectors.
//!
//! A polynomial `Σ c_i x^i` over GF(2^n) is stored as a `u128` whose bits
//! `i*n .. i*n + n` hold the encoding of `c_i`, so bit `i*n + j` is the
//! coordinate of `α^j x^i`.

use std::cmp::Ordering;

use crate::gf2n::{Field, FieldElement};
use crate::poly::Poly;

/// Maximum supported vector length.
pub const MAX_BITS: u32 = 128;

/// Packs the coefficients of `p` (each `n` bits wide) into a `u128`.
pub fn pack_poly(p: &Poly, n: u32) -> u128 {
    debug_assert!(p.coeffs().len() as u32 * n <= MAX_BITS);
    p.coeffs().iter().enumerate().fold(0u128, |acc, (i, c)| {
        acc | (c.bits() as u128) << (i as u32 * n)
    })
}

pub fn unpack_poly(field: &Field, bits: u128) -> Poly {
    let n = field.n();
    let mask = (1u128 << n) - 1;
    let mut coeffs = Vec::new();
    let mut rest = bits;
    while rest != 0 {
        coeffs.push(FieldElement((rest & mask) as u32));
        rest >>= n;
    }
    Poly::new(field, coeffs)
}

/// Degree of a packed polynomial, `None` for zero.
pub fn packed_degree(bits: u128, n: u32) -> Option<usize> {
    (bits != 0).then(|| ((127 - bits.leading_zeros()) / n) as usize)
}

/// Shortlex order on packed polynomials, matching [`Poly::cmp_shortlex`].
pub fn cmp_packed_shortlex(a: u128, b: u128, n: u32) -> Ordering {
    match packed_degree(a, n).cmp(&packed_degree(b, n)) {
        Ordering::Equal => {}
        other => return other,
    }
    let mask = (1u128 << n) - 1;
    let (mut a, mut b) = (a, b);
    while a != 0 || b != 0 {
        match (a & mask).cmp(&(b & mask)) {
            Ordering::Equal => {}
            other => return other,
        }
        a >>= n;
        b >>= n;
    }
    Ordering::Equal
}

/// A subspace of GF(2)^len in reduced row-echelon form. Each row's pivot is
/// its highest set bit and no other row has that bit set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    len: u32,
    rows: Vec<u128>,
    pivots: Vec<u32>,
    pivot_mask: u128,
}

impl Subspace {
    pub fn zero(len: u32) -> Subspace {
        assert!(len <= MAX_BITS, "vector length {len} exceeds {MAX_BITS}");
        Subspace {
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_mask: 0,
        }
    }

    pub fn span<I: IntoIterator<Item = u128>>(len: u32, gens: I) -> Subspace {
        let mut s = Subspace::zero(len);
        for g in gens {
            s.insert(g);
        }
        s
    }

    /// Adds `w` to the span; returns whether the rank grew.
    pub fn insert(&mut self, w: u128) -> bool {
        debug_assert!(self.len == MAX_BITS || w >> self.len == 0);
        let w = self.reduce(w);
        if w == 0 {
            return false;
        }
        let p = 127 - w.leading_zeros();
        let bit = 1u128 << p;
        for r in &mut self.rows {
            if *r & bit != 0 {
                *r ^= w;
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, w);
        self.pivots.insert(at, p);
        self.pivot_mask |= bit;
        true
    }

    /// Length in bits of the ambient vectors.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u128] {
        &self.rows
    }

    pub fn pivots(&self) -> &[u32] {
        &self.pivots
    }

    /// Canonical coset representative of `w + U`: all pivot coordinates zero.
    pub fn reduce(&self, mut w: u128) -> u128 {
        if w & self.pivot_mask == 0 {
            return w;
        }
        for (&p, &r) in self.pivots.iter().zip(&self.rows) {
            if w >> p & 1 != 0 {
                w ^= r;
            }
        }
        w
    }

    pub fn contains(&self, w: u128) -> bool {
        self.reduce(w) == 0
    }

    /// Non-pivot coordinates in increasing order.
    pub fn free_positions(&self) -> Vec<u32> {
        (0..self.len)
            .filter(|&i| self.pivot_mask >> i & 1 == 0)
            .collect()
    }

    pub fn transversal(&self) -> Transversal {
        Transversal::new(self)
    }
}

/// Bijection between canonical coset representatives and `0..2^free`,
/// placing counter bit `k` at the `k`-th free coordinate.
#[derive(Clone, Debug)]
pub struct Transversal {
    free: Vec<u32>,
}

impl Transversal {
    fn new(space: &Subspace) -> Transversal {
        Transversal {
            free: space.free_positions(),
        }
    }

    pub fn dimension(&self) -> u32 {
        self.free.len() as u32
    }

    /// Number of cosets, `2^(len - rank)`.
    pub fn size(&self) -> u128 {
        1u128 << self.free.len()
    }

    pub fn deposit(&self, index: u64) -> u128 {
        let mut w = 0u128;
        for (k, &p) in self.free.iter().enumerate() {
            w |= ((index >> k & 1) as u128) << p;
        }
        w
    }

    /// Inverse of [`Transversal::deposit`] on canonical representatives.
    pub fn extract(&self, w: u128) -> u64 {
        let mut idx = 0u64;
        for (k, &p) in self.free.iter().enumerate() {
            idx |= ((w >> p & 1) as u64) << k;
        }
        idx
    }

    /// All canonical representatives in increasing counter order.
    pub fn iter(&self) -> impl Iterator<Item = u128> + '_ {
        assert!(self.free.len() < 64, "transversal too large to stream");
        (0..1u64 << self.free.len()).map(move |i| self.deposit(i))
    }
}

/// Reduced basis of the span of `gens`.
pub fn subspace_span(len: u32, gens: &[u128]) -> Subspace {
    Subspace::span(len, gens.iter().copied())
}

pub fn coset_reduce(w: u128, space: &Subspace) -> u128 {
    space.reduce(w)
}

/// Streams `2^(dim_v - rank)` canonical representatives.
pub fn coset_transversal(dim_v: u32, space: &Subspace) -> impl Iterator<Item = u128> {
    assert_eq!(dim_v, space.len());
    let t = space.transversal();
    let n = t.free.len();
    assert!(n < 64, "transversal too large to stream");
    (0..1u64 << n).map(move |i| t.deposit(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn trivial_spans() {
        let z = subspace_span(9, &[]);
        assert_eq!(z.rank(), 0);
        assert_eq!(coset_transversal(9, &z).count(), 512);
        let e = subspace_span(9, &[0b101, 0b101]);
        assert_eq!(e.rank(), 1);
        let full = subspace_span(5, &(0..5).map(|i| 1u128 << i).collect::<Vec<_>>());
        assert_eq!(coset_transversal(5, &full).collect::<Vec<_>>(), vec![0]);
        assert_eq!(coset_reduce(0, &e), 0);
    }

    #[test]
    fn pack_round_trip() {
        let f = Field::conway(3).unwrap();
        let p = Poly::parse(&f, "5,0,7,1").unwrap();
        let b = pack_poly(&p, 3);
        assert_eq!(b, 5 | 7 << 6 | 1 << 9);
        assert_eq!(unpack_poly(&f, b), p);
        assert_eq!(packed_degree(b, 3), Some(3));
        assert_eq!(packed_degree(0, 3), None);
    }

    #[test]
    fn packed_order_matches_poly_order() {
        let f = Field::conway(2).unwrap();
        for a in 0u128..256 {
            for b in (0u128..256).step_by(3) {
                let (pa, pb) = (unpack_poly(&f, a), unpack_poly(&f, b));
                assert_eq!(cmp_packed_shortlex(a, b, 2), pa.cmp_shortlex(&pb));
            }
        }
    }

    fn vecs(len: u32, max: usize) -> impl Strategy<Value = Vec<u128>> {
        let mask = if len == 128 {
            u128::MAX
        } else {
            (1u128 << len) - 1
        };
        proptest::collection::vec(any::<u128>().prop_map(move |x| x & mask), 0..max)
    }

    proptest! {
        #[test]
        fn reduce_is_coset_invariant(gens in vecs(40, 12), w in any::<u64>(), pick in any::<u16>()) {
            let s = subspace_span(40, &gens);
            let w = w as u128 & ((1 << 40) - 1);
            let member = gens.iter().enumerate()
                .filter(|(i, _)| pick >> (i % 16) & 1 == 1)
                .fold(0u128, |acc, (_, g)| acc ^ g);
            let r = coset_reduce(w, &s);
            prop_assert_eq!(coset_reduce(w ^ member, &s), r);
            prop_assert_eq!(coset_reduce(r, &s), r);
            prop_assert!(s.contains(w ^ r));
            prop_assert_eq!(r & s.pivot_mask, 0);
        }

        #[test]
        fn rank_matches_independent_elimination(gens in vecs(20, 25)) {
            let s = subspace_span(20, &gens);
            // plain elimination by lowest set bit
            let mut basis: Vec<u128> = Vec::new();
            for &g in &gens {
                let mut x = g;
                for &b in &basis {
                    if x & (b & b.wrapping_neg()) != 0 {
                        x ^= b;
                    }
                }
                if x != 0 {
                    for b in basis.iter_mut() {
                        if *b & (x & x.wrapping_neg()) != 0 {
                            *b ^= x;
                        }
                    }
                    basis.push(x);
                }
            }
            prop_assert_eq!(s.rank(), basis.len());
            for &g in &gens {
                prop_assert!(s.contains(g));
            }
        }

        #[test]
        fn transversal_hits_each_coset_once(gens in vecs(12, 8)) {
            let s = subspace_span(12, &gens);
            let t = s.transversal();
            let reps: Vec<u128> = t.iter().collect();
            prop_assert_eq!(reps.len() as u128, 1u128 << (12 - s.rank()));
            let set: HashSet<u128> = reps.iter().copied().collect();
            prop_assert_eq!(set.len(), reps.len());
            for (i, &r) in reps.iter().enumerate() {
                prop_assert_eq!(coset_reduce(r, &s), r);
                prop_assert_eq!(t.extract(r), i as u64);
            }
            for w in 0u128..4096 {
                prop_assert!(set.contains(&coset_reduce(w, &s)));
            }
        }
    }
}
