//! Exact lattice-level computations for vector bundles on threefolds.
//!
//! The crate models the even cohomology of a smooth projective threefold by
//! its triple-intersection tensor and Chern data, and builds on top of it:
//!
//! - Chern characters, Todd classes and Mukai vectors ([`classes`]);
//! - the skew Mukai pairing on threefolds, the symmetric pairing on an
//!   anticanonical K3 surface, Euler forms, twists and reflections
//!   ([`pairing`]);
//! - virtual dimensions, Bogomolov discriminants and a Casson–Donaldson
//!   bookkeeping registry ([`moduli`], [`registry`], [`constants`]);
//! - quasi-Fano flags, obstruction kernels and gluing predicates ([`flags`]);
//! - a small Schubert calculus on `G(2, n)` ([`schubert`]);
//! - JSON documents and deterministic report output ([`io`]).
//!
//! All arithmetic is exact: coefficients are arbitrary-precision rationals.

#![allow(clippy::needless_range_loop)]

pub mod classes;
pub mod constants;
pub mod error;
pub mod flags;
pub mod io;
pub mod linalg;
pub mod moduli;
pub mod pairing;
pub mod registry;
pub mod ring;
pub mod schubert;

pub use error::{Error, Result};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational coefficient used throughout.
pub type Q = BigRational;

/// Integer as a rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `num / den` as a reduced rational. Panics if `den == 0`.
pub fn frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Vector of integers as rationals.
pub fn qvec(xs: &[i64]) -> Vec<Q> {
    xs.iter().map(|&x| q(x)).collect()
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub(crate) mod qserde {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Q;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let v = crate::io::RationalValue::deserialize(d)?;
        v.to_q().map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            Vec::<crate::io::RationalValue>::deserialize(d)?
                .iter()
                .map(|v| v.to_q().map_err(serde::de::Error::custom))
                .collect()
        }
    }
}
