//! Mukai pairings, the Euler form, twists, reflections and restriction of
//! Mukai vectors to the anticanonical K3 surface.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::classes::{self, chern_character, dual_chern, ChernData};
use crate::error::check_len;
use crate::flags::FlagDescriptor;
use crate::linalg::{self, Matrix};
use crate::ring::{GradedClass, K3Restriction, K3Vector, ThreefoldRing};
use crate::{q, Error, Result, Q};

/// An exact pairing value, with a note when integral inputs gave a
/// fractional result (usually inconsistent intersection data).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingResult {
    pub value: Q,
    pub integrality_note: Option<String>,
}

/// A user-declared value of the non-topological form
/// `h(E1, E2) = rk H^1(E1* ⊗ E2) - rk H^0(E1* ⊗ E2)` on a pair of classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HDeclaration {
    pub left: GradedClass,
    pub right: GradedClass,
    pub value: BigInt,
}

/// `(u, v) = -[v*·u]_6`. Skew-symmetric on any threefold.
pub fn mukai_pairing_3fold(ring: &ThreefoldRing, u: &GradedClass, v: &GradedClass) -> Result<Q> {
    Ok(-ring.multiply(&v.star(), u)?.a6)
}

/// `(u, v) = -[v*·u]_4 = u2ᵀ G v2 - u0 v4 - u4 v0`. Symmetric.
pub fn mukai_pairing_k3(g: &K3Restriction, u: &K3Vector, v: &K3Vector) -> Result<Q> {
    g.check_vector(u)?;
    g.check_vector(v)?;
    Ok(g.intersect(&u.v2, &v.v2) - &u.v0 * &v.v4 - &u.v4 * &v.v0)
}

/// `χ(E1, E2) = [ch(E2)·ch(E1*)·td]_6`.
pub fn euler_chi(ring: &ThreefoldRing, e1: &ChernData, e2: &ChernData) -> Result<PairingResult> {
    let ch2 = chern_character(ring, e2)?;
    let ch1d = chern_character(ring, &dual_chern(e1))?;
    let td = classes::todd_class(ring);
    let value = ring.multiply(&ring.multiply(&ch2, &ch1d)?, &td)?.a6;
    let integrality_note = (e1.is_integral() && e2.is_integral() && !value.is_integer())
        .then(|| format!("chi = {value} is not an integer for integral Chern data"));
    Ok(PairingResult {
        value,
        integrality_note,
    })
}

/// Symmetric and skew parts of the Euler form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiSplit {
    pub chi: Q,
    pub chi_plus: Q,
    pub chi_minus: Q,
}

pub fn chi_split(ring: &ThreefoldRing, e1: &ChernData, e2: &ChernData) -> Result<ChiSplit> {
    let a = euler_chi(ring, e1, e2)?.value;
    let b = euler_chi(ring, e2, e1)?.value;
    Ok(ChiSplit {
        chi_plus: (&a + &b) / q(2),
        chi_minus: (&a - &b) / q(2),
        chi: a,
    })
}

/// `χ` evaluated on Mukai vectors:
/// `[m2·m1*·sqrt(td)·sqrt(td)*⁻¹]_6`, which is `(m1, m2)` on Calabi-Yau rings.
pub fn chi_of_mukai_vectors(ring: &ThreefoldRing, m1: &GradedClass, m2: &GradedClass) -> Result<Q> {
    let root = classes::sqrt_todd(ring);
    let correction = ring.multiply(&root, &classes::inverse_series(ring, &root.star())?)?;
    let prod = ring.multiply(&ring.multiply(m2, &m1.star())?, &correction)?;
    Ok(prod.a6)
}

/// `T_L^k(m) = m·exp(k L)`.
pub fn twist_t(ring: &ThreefoldRing, m: &GradedClass, l: &[Q], k: i64) -> Result<GradedClass> {
    let kl: Vec<Q> = l.iter().map(|x| x * q(k)).collect();
    ring.multiply(m, &ring.exp(&kl)?)
}

/// `α_m(m') = -m' - value·m`.
pub fn reflect_with_value(m: &GradedClass, mp: &GradedClass, value: &Q) -> GradedClass {
    &(-mp) - &m.scale(value)
}

/// Source of the pairing value used by a reflection.
#[derive(Debug, Clone, Copy)]
pub enum ReflectionMode<'a> {
    /// `χ(m, m')` computed topologically.
    Chi,
    /// A declared value of `h(m, m')`; it must name exactly `(m, m')`.
    Declared(&'a HDeclaration),
}

pub fn reflect_alpha(
    ring: &ThreefoldRing,
    m: &GradedClass,
    mp: &GradedClass,
    mode: ReflectionMode<'_>,
) -> Result<GradedClass> {
    ring.check_class(m)?;
    ring.check_class(mp)?;
    let value = match mode {
        ReflectionMode::Chi => chi_of_mukai_vectors(ring, m, mp)?,
        ReflectionMode::Declared(h) => {
            if &h.left != m || &h.right != mp {
                return Err(Error::DeclarationMismatch);
            }
            Q::from_integer(h.value.clone())
        }
    };
    Ok(reflect_with_value(m, mp, &value))
}

/// Restriction of a bundle's Mukai vector to the flag's K3 surface, plus a
/// comparison with the lattice expression `m(E) - m(E)·exp(-S)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionReport {
    pub vector: K3Vector,
    /// `m(E) - m(E)·exp(-S)` on the threefold.
    pub lattice_expression: GradedClass,
    /// Push-forward of `vector` along `S ⊂ Y`: `(0, v0·S, v2·S, v4)`.
    pub pushforward: GradedClass,
    pub degree2_match: bool,
    pub degree4_match: bool,
    pub degree6_match: bool,
}

pub fn mukai_restrict(flag: &FlagDescriptor, e: &ChernData) -> Result<RestrictionReport> {
    let ring = flag.ring();
    let vector = classes::k3_mukai_vector(flag, e)?;
    let m = classes::mukai_vector(ring, e)?.class;
    let s = crate::qvec(flag.s_coords());
    let lattice_expression = &m - &twist_t(ring, &m, &s, -1)?;
    let pushforward = GradedClass::new(
        Q::zero(),
        s.iter().map(|x| x * &vector.v0).collect(),
        ring.h2_product(&vector.v2, &s),
        vector.v4.clone(),
    );
    Ok(RestrictionReport {
        degree2_match: lattice_expression.a2 == pushforward.a2,
        degree4_match: lattice_expression.a4 == pushforward.a4,
        degree6_match: lattice_expression.a6 == pushforward.a6,
        vector,
        lattice_expression,
        pushforward,
    })
}

/// Fails unless `AᵀGA = G`.
pub fn check_isometry(g: &K3Restriction, a: &Matrix) -> Result<()> {
    match linalg::shape(a) {
        Some((r, c)) if r == g.rho() && c == g.rho() => {}
        _ => {
            return Err(Error::NotIsometry(format!(
                "expected a {0}x{0} matrix",
                g.rho()
            )))
        }
    }
    let gq = g.gram_q();
    let pulled = linalg::mul(&linalg::transpose(a), &linalg::mul(&gq, a));
    if pulled != gq {
        return Err(Error::NotIsometry(format!(
            "AᵀGA = {} but G = {}",
            fmt_matrix(&pulled),
            fmt_matrix(&gq)
        )));
    }
    Ok(())
}

pub(crate) fn fmt_matrix(m: &Matrix) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|r| {
            let xs: Vec<String> = r.iter().map(ToString::to_string).collect();
            format!("[{}]", xs.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Mukai-vector shadow of the gluing criterion `E+|_S = g*(E-|_S)`:
/// true iff `v+ = (v-.v0, A·v-.v2, v-.v4)`.
pub fn g_pullback_match(
    g: &K3Restriction,
    a: &Matrix,
    v_plus: &K3Vector,
    v_minus: &K3Vector,
) -> Result<bool> {
    check_isometry(g, a)?;
    g.check_vector(v_plus)?;
    check_len(g.rho(), v_minus.rho(), "K3 vector")?;
    Ok(v_plus.v0 == v_minus.v0
        && v_plus.v4 == v_minus.v4
        && v_plus.v2 == linalg::mul_vec(a, &v_minus.v2))
}
