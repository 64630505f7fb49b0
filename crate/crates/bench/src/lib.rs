//! Shared fixtures for the benchmarks.

use hypercensus::{CurveRecord, Field, Poly};

/// `y^2 + y = x^7` over GF(2^n).
pub fn sample_curve(n: u32) -> CurveRecord {
    let f = Field::conway(n).expect("supported degree");
    let v = Poly::parse(&f, "1").expect("valid");
    let u = Poly::parse(&f, "0,0,0,0,0,0,0,1").expect("valid");
    CurveRecord::new(3, v, u)
}
