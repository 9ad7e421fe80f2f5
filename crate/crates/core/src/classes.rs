//! Chern characters, Todd classes, square roots of unipotent classes and
//! Mukai vectors.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::check_len;
use crate::flags::FlagDescriptor;
use crate::linalg;
use crate::ring::{GradedClass, K3Vector, ThreefoldRing};
use crate::{q, Error, Result, Q};

/// Topological type of a bundle: rank and Chern classes, with `c2` stored as
/// an H^4 functional and `c3` as a number.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChernData {
    pub rank: u32,
    #[serde(with = "crate::qserde::vec")]
    pub c1: Vec<Q>,
    #[serde(with = "crate::qserde::vec")]
    pub c2: Vec<Q>,
    #[serde(with = "crate::qserde")]
    pub c3: Q,
}

impl ChernData {
    pub fn new(rank: u32, c1: Vec<Q>, c2: Vec<Q>, c3: Q) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidChernData("rank must be at least 1".into()));
        }
        check_len(c1.len(), c2.len(), "c2 against c1")?;
        Ok(Self { rank, c1, c2, c3 })
    }

    pub fn from_ints(rank: u32, c1: &[i64], c2: &[i64], c3: i64) -> Result<Self> {
        Self::new(rank, crate::qvec(c1), crate::qvec(c2), q(c3))
    }

    /// Trivial bundle of the given rank.
    pub fn trivial(rho: usize, rank: u32) -> Self {
        Self {
            rank: rank.max(1),
            c1: vec![Q::zero(); rho],
            c2: vec![Q::zero(); rho],
            c3: Q::zero(),
        }
    }

    /// Line bundle with first Chern class `c1`.
    pub fn line_bundle(c1: Vec<Q>) -> Self {
        let rho = c1.len();
        Self {
            rank: 1,
            c1,
            c2: vec![Q::zero(); rho],
            c3: Q::zero(),
        }
    }

    pub fn rho(&self) -> usize {
        self.c1.len()
    }

    pub fn check_ring(&self, ring: &ThreefoldRing) -> Result<()> {
        check_len(ring.rho(), self.rho(), "Chern data")
    }

    pub fn is_integral(&self) -> bool {
        self.c1
            .iter()
            .chain(&self.c2)
            .chain(std::iter::once(&self.c3))
            .all(|x| x.is_integer())
    }

    /// Chern data with the given Chern character. Fails if the rank part is
    /// not a positive integer.
    pub fn from_character(ring: &ThreefoldRing, ch: &GradedClass) -> Result<Self> {
        ring.check_class(ch)?;
        if !ch.a0.is_integer() || ch.a0 <= Q::zero() {
            return Err(Error::InvalidChernData(format!(
                "character has rank {}, not a positive integer",
                ch.a0
            )));
        }
        let rank = u32::try_from(ch.a0.to_integer())
            .map_err(|_| Error::InvalidChernData("rank too large".into()))?;
        let c1 = ch.a2.clone();
        let c1sq = ring.h2_product(&c1, &c1);
        // ch2 = c1²/2 - c2,  ch3 = (c1³ - 3 c1 c2 + 3 c3) / 6
        let c2: Vec<Q> = c1sq.iter().zip(&ch.a4).map(|(s, x)| s / q(2) - x).collect();
        let c1cube = linalg::dot(&c1, &c1sq);
        let c1c2 = linalg::dot(&c1, &c2);
        let c3 = &ch.a6 * q(2) - c1cube / q(3) + c1c2;
        Self::new(rank, c1, c2, c3)
    }
}

/// Which Todd root the Mukai vector was built with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Cy3FullTodd,
    FanoFullTodd,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::Cy3FullTodd => "cy3-full-todd",
            Normalization::FanoFullTodd => "fano-full-todd",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MukaiVector {
    pub class: GradedClass,
    pub ring: String,
    pub normalization: Normalization,
}

/// `ch(E) = (r, c1, (c1² - 2c2)/2, (c1³ - 3 c1 c2 + 3 c3)/6)`.
pub fn chern_character(ring: &ThreefoldRing, e: &ChernData) -> Result<GradedClass> {
    e.check_ring(ring)?;
    let c1sq = ring.h2_product(&e.c1, &e.c1);
    let ch2 = c1sq
        .iter()
        .zip(&e.c2)
        .map(|(s, c2)| (s - c2 * q(2)) / q(2))
        .collect();
    let c1cube = linalg::dot(&e.c1, &c1sq);
    let c1c2 = linalg::dot(&e.c1, &e.c2);
    let ch3 = (c1cube - c1c2 * q(3) + &e.c3 * q(3)) / q(6);
    Ok(GradedClass::new(q(e.rank as i64), e.c1.clone(), ch2, ch3))
}

/// Chern data of the dual bundle.
pub fn dual_chern(e: &ChernData) -> ChernData {
    ChernData {
        rank: e.rank,
        c1: e.c1.iter().map(|x| -x).collect(),
        c2: e.c2.clone(),
        c3: -e.c3.clone(),
    }
}

/// Chern data of `E ⊗ L` for an H^2 class `L`.
pub fn twist_chern(ring: &ThreefoldRing, e: &ChernData, l: &[Q]) -> Result<ChernData> {
    let ch = chern_character(ring, e)?;
    let twisted = ring.multiply(&ch, &ring.exp(l)?)?;
    ChernData::from_character(ring, &twisted)
}

/// `td = (1, c1/2, (c1² + c2)/12, c1 c2 / 24)` in the ring's coordinates.
pub fn todd_class(ring: &ThreefoldRing) -> GradedClass {
    let c1 = ring.c1_class();
    let c2 = ring.c2_class();
    let c1sq = ring.h2_product(&c1, &c1);
    let a4 = c1sq.iter().zip(&c2).map(|(s, c)| (s + c) / q(12)).collect();
    let a6 = linalg::dot(&c1, &c2) / q(24);
    GradedClass::new(Q::one(), c1.iter().map(|x| x / q(2)).collect(), a4, a6)
}

/// The unique `y` with leading term 1 and `y·y = x`, for `x` with leading
/// term 1. Since `x - 1` is nilpotent of order 4, the binomial series
/// `1 + n/2 - n²/8 + n³/16` is exact.
pub fn sqrt_series(ring: &ThreefoldRing, x: &GradedClass) -> Result<GradedClass> {
    ring.check_class(x)?;
    if !x.a0.is_one() {
        return Err(Error::LeadingTerm(x.a0.to_string()));
    }
    let n = x.nilpotent_part();
    let n2 = ring.mul_unchecked(&n, &n);
    let n3 = ring.mul_unchecked(&n2, &n);
    let mut y = GradedClass::one(ring.rho());
    y = &y + &n.scale(&crate::frac(1, 2));
    y = &y + &n2.scale(&crate::frac(-1, 8));
    y = &y + &n3.scale(&crate::frac(1, 16));
    Ok(y)
}

/// Multiplicative inverse of a class with leading term 1.
pub fn inverse_series(ring: &ThreefoldRing, x: &GradedClass) -> Result<GradedClass> {
    ring.check_class(x)?;
    if !x.a0.is_one() {
        return Err(Error::LeadingTerm(x.a0.to_string()));
    }
    let n = x.nilpotent_part();
    let n2 = ring.mul_unchecked(&n, &n);
    let n3 = ring.mul_unchecked(&n2, &n);
    Ok(&(&(&GradedClass::one(ring.rho()) - &n) + &n2) - &n3)
}

/// `sqrt(td)` of the ring.
pub fn sqrt_todd(ring: &ThreefoldRing) -> GradedClass {
    sqrt_series(ring, &todd_class(ring)).expect("Todd class has leading term 1")
}

/// `m(E) = ch(E)·sqrt(td)`.
pub fn mukai_vector(ring: &ThreefoldRing, e: &ChernData) -> Result<MukaiVector> {
    let ch = chern_character(ring, e)?;
    let class = ring.multiply(&ch, &sqrt_todd(ring))?;
    let normalization = if ring.is_calabi_yau() {
        Normalization::Cy3FullTodd
    } else {
        Normalization::FanoFullTodd
    };
    Ok(MukaiVector {
        class,
        ring: ring.name().to_string(),
        normalization,
    })
}

/// Mukai vector of `E|_S` on the anticanonical K3 surface of a flag:
/// `(rank, c1|_S, ∫_Y ch2(E)·S + rank)`, using `sqrt(td_S) = (1, 0, 1)`.
pub fn k3_mukai_vector(flag: &FlagDescriptor, e: &ChernData) -> Result<K3Vector> {
    let ring = flag.ring();
    let ch = chern_character(ring, e)?;
    let ch2_on_s = linalg::dot(&crate::qvec(flag.s_coords()), &ch.a4);
    let rank = q(e.rank as i64);
    Ok(K3Vector::new(rank.clone(), ch.a2, ch2_on_s + rank))
}
