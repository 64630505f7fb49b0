use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The twisted PGL2 action on monic polynomials needs unique (g+1)-th roots.
    #[error("gcd(g+1, 2^n-1) = gcd({genus_plus_one}, {group_order}) = {gcd}, expected 1")]
    GcdCondition {
        genus_plus_one: u64,
        group_order: u64,
        gcd: u64,
    },

    #[error("zero has no inverse")]
    ZeroInverse,

    #[error("{m}-th roots are not unique in GF(2^{n}): gcd({m}, {group_order}) != 1")]
    NoUniqueRoot { m: u64, n: u32, group_order: u64 },

    #[error("field mismatch: GF(2^{left}) vs GF(2^{right})")]
    FieldMismatch { left: u32, right: u32 },

    #[error("cannot embed GF(2^{from}) into GF(2^{to}): {reason}")]
    Embedding {
        from: u32,
        to: u32,
        reason: &'static str,
    },

    #[error("extension degree {0} is outside the supported range 1..=18")]
    UnsupportedDegree(u32),

    #[error("modulus {0} is not an irreducible polynomial of degree 1..=18")]
    BadModulus(u64),

    #[error("degree {degree} exceeds the bound {bound}")]
    DegreeBound { degree: usize, bound: usize },

    #[error("gcd(0, 0) is undefined")]
    ZeroGcd,

    #[error("inconsistent point counts: {0}")]
    InconsistentCounts(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}
