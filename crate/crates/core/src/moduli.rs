//! Virtual dimensions, nonemptiness and Bogomolov checks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::classes::{ChernData, k3_mukai_vector};
use crate::flags::FlagDescriptor;
use crate::pairing::{euler_chi, mukai_pairing_k3};
use crate::ring::{GradedClass, K3Restriction, K3Vector, ThreefoldRing};
use crate::{linalg, q, Error, Result, Q};

/// `m² + 2`, the expected dimension of sheaves with Mukai vector `m` on the K3.
pub fn vdim_k3(g: &K3Restriction, m: &K3Vector) -> Result<Q> {
    Ok(mukai_pairing_k3(g, m, m)? + q(2))
}

/// `½·res(m)² + 1`, the dimension of a regular component on the flag.
pub fn vdim_flag(flag: &FlagDescriptor, e: &ChernData) -> Result<Q> {
    let v = k3_mukai_vector(flag, e)?;
    Ok(mukai_pairing_k3(flag.k3(), &v, &v)? / q(2) + q(1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyDimensionReport {
    pub vdim: i64,
    pub chi_self: Q,
    pub note: Option<String>,
}

/// On a Calabi-Yau threefold the expected dimension is always zero, since
/// `χ(E, E) = 0`. The tangent-bundle type gets a note because its moduli
/// are the (possibly unobstructed) deformations of the threefold itself.
pub fn vdim_cy3(ring: &ThreefoldRing, e: &ChernData) -> Result<CyDimensionReport> {
    if !ring.is_calabi_yau() {
        return Err(Error::NotCalabiYau);
    }
    let chi_self = euler_chi(ring, e, e)?.value;
    let tangent = ChernData::new(3, ring.c1_class(), ring.c2_class(), q(ring.chi_top()))?;
    let note = (e == &tangent).then(|| {
        format!(
            "tangent-bundle type: deformations may be unobstructed, geometric dimension can reach h12 = {}",
            ring.h12()
        )
    });
    Ok(CyDimensionReport {
        vdim: 0,
        chi_self,
        note,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonemptyReport {
    pub nonempty: bool,
    pub square: Q,
    /// gcd of the components when they are integers.
    pub gcd: Option<BigInt>,
    pub primitive: Option<bool>,
}

/// `v0 > 0` and `m² ≥ -2`. Primitivity is reported, not enforced.
pub fn mukai_nonempty(g: &K3Restriction, m: &K3Vector) -> Result<NonemptyReport> {
    let square = mukai_pairing_k3(g, m, m)?;
    let nonempty = m.v0 > Q::zero() && square >= q(-2);
    let comps: Vec<&Q> = std::iter::once(&m.v0).chain(&m.v2).chain(std::iter::once(&m.v4)).collect();
    let gcd = comps
        .iter()
        .all(|x| x.is_integer())
        .then(|| comps.iter().fold(BigInt::zero(), |acc, x| acc.gcd(&x.to_integer())));
    let primitive = gcd.as_ref().map(|g| g.abs() == BigInt::from(1));
    Ok(NonemptyReport {
        nonempty,
        square,
        gcd,
        primitive,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BogomolovReport {
    /// `Δ(E) = c2 - (r-1)/(2r)·c1²` as an H^4 functional.
    pub discriminant: GradedClass,
    pub degree: Q,
    pub positive: bool,
    /// Rank one: the inequality carries no information.
    pub applicable: bool,
}

pub fn bogomolov_check(ring: &ThreefoldRing, e: &ChernData, h: &[Q]) -> Result<BogomolovReport> {
    e.check_ring(ring)?;
    crate::error::check_len(ring.rho(), h.len(), "polarization")?;
    let r = q(e.rank as i64);
    let coeff = (&r - q(1)) / (&r * q(2));
    let c1sq = ring.h2_product(&e.c1, &e.c1);
    let delta: Vec<Q> = e.c2.iter().zip(&c1sq).map(|(c2, s)| c2 - s * &coeff).collect();
    let degree = linalg::dot(&delta, h);
    let applicable = e.rank >= 2;
    Ok(BogomolovReport {
        positive: applicable && degree > Q::zero(),
        discriminant: GradedClass::h4(delta),
        degree,
        applicable,
    })
}

/// `χ_top = 2(h11 - h12)` for a Calabi-Yau threefold; must agree with the
/// stored value.
pub fn chi_top_cy3(ring: &ThreefoldRing) -> Result<i64> {
    if !ring.is_calabi_yau() {
        return Err(Error::NotCalabiYau);
    }
    let computed = ring.hodge_euler();
    if computed != ring.chi_top() {
        return Err(Error::EulerMismatch {
            computed,
            stored: ring.chi_top(),
        });
    }
    Ok(computed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::twist_chern;
    use crate::qvec;
    use proptest::prelude::*;

    fn instanton() -> ChernData {
        ChernData::from_ints(2, &[0], &[1], 0).unwrap()
    }

    #[test]
    fn k3_dimensions() {
        let k3 = FlagDescriptor::cp3_quartic().k3().clone();
        assert_eq!(vdim_k3(&k3, &K3Vector::from_ints(2, &[0], -2)).unwrap(), q(10));
        assert_eq!(vdim_k3(&k3, &K3Vector::from_ints(1, &[0], 1)).unwrap(), q(0));
        assert_eq!(vdim_k3(&k3, &K3Vector::from_ints(1, &[0], 0)).unwrap(), q(2));
    }

    #[test]
    fn flag_dimensions() {
        let f = FlagDescriptor::cp3_quartic();
        assert_eq!(vdim_flag(&f, &instanton()).unwrap(), q(5));
        assert_eq!(vdim_flag(&f, &ChernData::trivial(1, 1)).unwrap(), q(0));
    }

    #[test]
    fn cy_dimension() {
        let r = ThreefoldRing::quintic();
        let rep = vdim_cy3(&r, &ChernData::line_bundle(qvec(&[2]))).unwrap();
        assert_eq!(rep.vdim, 0);
        assert!(rep.chi_self.is_zero());
        assert!(rep.note.is_none());
        let tangent = ChernData::from_ints(3, &[0], &[50], -200).unwrap();
        assert!(vdim_cy3(&r, &tangent).unwrap().note.is_some());
        assert_eq!(vdim_cy3(&ThreefoldRing::cp3(), &instanton()), Err(Error::NotCalabiYau));
    }

    #[test]
    fn nonemptiness() {
        let k3 = FlagDescriptor::cp3_quartic().k3().clone();
        let a = mukai_nonempty(&k3, &K3Vector::from_ints(2, &[0], -2)).unwrap();
        assert!(a.nonempty);
        assert_eq!(a.primitive, Some(false));
        assert!(mukai_nonempty(&k3, &K3Vector::from_ints(1, &[0], 1)).unwrap().nonempty);
        assert!(!mukai_nonempty(&k3, &K3Vector::from_ints(0, &[1], 0)).unwrap().nonempty);
        assert!(!mukai_nonempty(&k3, &K3Vector::from_ints(1, &[0], 2)).unwrap().nonempty);
    }

    #[test]
    fn bogomolov_examples() {
        let cp3 = ThreefoldRing::cp3();
        let rep = bogomolov_check(&cp3, &instanton(), &qvec(&[1])).unwrap();
        assert_eq!(rep.degree, q(1));
        assert!(rep.positive);
        let line = bogomolov_check(&cp3, &ChernData::line_bundle(qvec(&[3])), &qvec(&[1])).unwrap();
        assert!(line.discriminant.a4.iter().all(Zero::is_zero));
        assert!(!line.positive);
        assert!(!line.applicable);
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(chi_top_cy3(&ThreefoldRing::quintic()).unwrap(), -200);
        let selfmirror = ThreefoldRing::rank_one("m", "H", 1, 0, 0, 0, 1).unwrap();
        assert_eq!(chi_top_cy3(&selfmirror).unwrap(), 0);
        let bad = ThreefoldRing::rank_one("b", "H", 5, 0, 50, 7, 101).unwrap();
        assert!(matches!(chi_top_cy3(&bad), Err(Error::EulerMismatch { .. })));
    }

    proptest! {
        #[test]
        fn discriminant_is_twist_invariant(rank in 2u32..5, c1 in -4i64..4, c2 in -4i64..6, c3 in -3i64..3, l in -3i64..3, d in 1i64..6) {
            let r = ThreefoldRing::rank_one("r", "H", d, 0, 0, 0, 1).unwrap();
            let e = ChernData::from_ints(rank, &[c1], &[c2], c3).unwrap();
            let h = qvec(&[1]);
            let t = twist_chern(&r, &e, &qvec(&[l])).unwrap();
            prop_assert_eq!(bogomolov_check(&r, &e, &h).unwrap(), bogomolov_check(&r, &t, &h).unwrap());
        }

        #[test]
        fn restriction_doubles_dimension(rank in 1u32..4, c1 in -3i64..3, c2 in -3i64..5) {
            let f = FlagDescriptor::cp3_quartic();
            let e = ChernData::from_ints(rank, &[c1], &[c2], 0).unwrap();
            let v = k3_mukai_vector(&f, &e).unwrap();
            prop_assert_eq!(vdim_k3(f.k3(), &v).unwrap(), vdim_flag(&f, &e).unwrap() * q(2));
            prop_assert_eq!(mukai_pairing_k3(f.k3(), &v, &v).unwrap() + q(2), vdim_flag(&f, &e).unwrap() * q(2));
        }
    }
}
