//! Quasi-Fano flags `S ⊂ Y`, their obstruction kernels, and gluings of two
//! flags along a common K3 surface.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::check_len;
use crate::linalg::{self, Matrix};
use crate::pairing::check_isometry;
use crate::ring::{K3Restriction, ThreefoldRing};
use crate::{q, Error, Result, Q};

/// Outcome of the flag checks, independent of whether they passed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagReport {
    /// `∫ c1·c2`, which must be 24.
    pub c1c2: Q,
    /// `χ(O_Y) = ∫ c1·c2 / 24`.
    pub chi_structure_sheaf: Q,
    /// `∫ c2·S`, equal to `∫ c1·c2` when `S` is anticanonical.
    pub c2_dot_s: Q,
    pub anticanonical: bool,
    pub gram: Vec<Vec<i64>>,
    pub failures: Vec<String>,
}

impl FlagReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs the quasi-Fano flag checks for a surface in the class `s_coords`.
pub fn validate_flag(ring: &ThreefoldRing, s_coords: &[i64]) -> Result<FlagReport> {
    check_len(ring.rho(), s_coords.len(), "surface class")?;
    let c1c2 = linalg::dot(&ring.c1_class(), &ring.c2_class());
    let chi = &c1c2 / q(24);
    let c2_dot_s = linalg::dot(&crate::qvec(s_coords), &ring.c2_class());
    let anticanonical = s_coords == ring.c1_coords();
    let mut failures = Vec::new();
    if !chi.is_one() {
        failures.push(format!("χ(O_Y) = {chi} ≠ 1"));
    }
    if !anticanonical {
        failures.push(format!(
            "S is not anticanonical: s = {:?}, c1 = {:?}",
            s_coords,
            ring.c1_coords()
        ));
    }
    if c2_dot_s != q(24) {
        failures.push(format!("∫ c2·S = {c2_dot_s} ≠ 24"));
    }
    Ok(FlagReport {
        c1c2,
        chi_structure_sheaf: chi,
        c2_dot_s,
        anticanonical,
        gram: ring.restricted_gram(s_coords),
        failures,
    })
}

/// A quasi-Fano threefold with a chosen anticanonical K3 surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagDescriptor {
    ring: ThreefoldRing,
    s_coords: Vec<i64>,
    k3: K3Restriction,
    pub h1_ty: Option<u64>,
    pub h0_n: Option<u64>,
}

impl FlagDescriptor {
    /// Validates and builds the flag; fails with every violated check.
    pub fn new(ring: ThreefoldRing, s_coords: Vec<i64>) -> Result<Self> {
        let report = validate_flag(&ring, &s_coords)?;
        if !report.is_valid() {
            return Err(Error::InvalidFlag(report.failures));
        }
        let k3 = K3Restriction::from_ring(&ring, &s_coords)?;
        Ok(Self {
            ring,
            s_coords,
            k3,
            h1_ty: None,
            h0_n: None,
        })
    }

    /// Projective 3-space with a quartic K3 surface.
    pub fn cp3_quartic() -> Self {
        Self::new(ThreefoldRing::cp3(), vec![4]).expect("cp3/quartic is a flag")
    }

    pub fn ring(&self) -> &ThreefoldRing {
        &self.ring
    }

    pub fn s_coords(&self) -> &[i64] {
        &self.s_coords
    }

    pub fn s_class(&self) -> Vec<Q> {
        crate::qvec(&self.s_coords)
    }

    pub fn k3(&self) -> &K3Restriction {
        &self.k3
    }

    pub fn rho(&self) -> usize {
        self.ring.rho()
    }
}

/// Dimension and canonical basis of a rational kernel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Kernel {
    pub dim: usize,
    pub basis: Vec<Vec<Q>>,
}

impl Kernel {
    fn of(m: &Matrix, cols: usize) -> Self {
        let basis = linalg::nullspace(m, cols);
        Self {
            dim: basis.len(),
            basis,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.dim == 0
    }
}

/// Kernel of the restriction `H^{1,1}(Y) → H^{1,1}(S)`, realized through the
/// restricted gram matrix. A trivial kernel means the deformations of the
/// pair, and then of `Y`, are unobstructed.
pub fn obstruction_kernel(f: &FlagDescriptor) -> Kernel {
    Kernel::of(&f.k3.gram_q(), f.rho())
}

/// Kernel of `[G_S·P+ | G_S·P-]` for two sublattices embedded in a shared
/// K3 lattice with gram `gram_s` (`n×n`) by `embed_plus` (`n×ρ+`) and
/// `embed_minus` (`n×ρ-`).
pub fn stacked_restriction_kernel(
    gram_s: &Matrix,
    embed_plus: &Matrix,
    embed_minus: &Matrix,
) -> Result<Kernel> {
    let n = gram_s.len();
    let shape_ok = |m: &Matrix| matches!(linalg::shape(m), Some((r, _)) if r == n) || (n == 0 && m.is_empty());
    if !shape_ok(embed_plus) || !shape_ok(embed_minus) || linalg::shape(gram_s).is_none_or(|(_, c)| c != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: embed_plus.len(),
            what: "embedding rows",
        });
    }
    let left = linalg::mul(gram_s, embed_plus);
    let right = linalg::mul(gram_s, embed_minus);
    let cols_plus = embed_plus.first().map_or(0, Vec::len);
    let cols_minus = embed_minus.first().map_or(0, Vec::len);
    let stacked: Matrix = left
        .into_iter()
        .zip(right)
        .map(|(mut l, r)| {
            l.extend(r);
            l
        })
        .collect();
    Ok(Kernel::of(&stacked, cols_plus + cols_minus))
}

/// Two flags glued along their common K3 surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingDescriptor {
    pub flag_plus: FlagDescriptor,
    pub flag_minus: FlagDescriptor,
    /// Action of `g = n+·n-⁻¹` on the shared restricted lattice.
    pub a: Matrix,
    /// Class of `N+ ⊗ N-` on `S`.
    pub section_class_d: Vec<Q>,
    /// User assertion that the first-order constraint on the obstruction
    /// classes of the two pairs holds; not checkable from lattice data.
    pub one_extension_asserted: Option<bool>,
}

impl GluingDescriptor {
    /// Requires both flags to carry the same restricted gram matrix and `A`
    /// to be an isometry of it. `D = s+ + A·s-`.
    pub fn new(flag_plus: FlagDescriptor, flag_minus: FlagDescriptor, a: Matrix) -> Result<Self> {
        check_len(flag_plus.rho(), flag_minus.rho(), "flag ranks")?;
        if flag_plus.k3.gram() != flag_minus.k3.gram() {
            return Err(Error::NotIsometry(
                "the two flags restrict to different gram matrices".into(),
            ));
        }
        check_isometry(&flag_plus.k3, &a)?;
        let moved = linalg::mul_vec(&a, &flag_minus.s_class());
        let section_class_d = flag_plus
            .s_class()
            .iter()
            .zip(moved)
            .map(|(x, y)| x + y)
            .collect();
        Ok(Self {
            flag_plus,
            flag_minus,
            a,
            section_class_d,
            one_extension_asserted: None,
        })
    }

    /// Replaces `D`, e.g. after blowing up a curve in one component so that
    /// the normal bundles become dual.
    pub fn with_section_class(mut self, d: Vec<Q>) -> Result<Self> {
        check_len(self.flag_plus.rho(), d.len(), "section class")?;
        self.section_class_d = d;
        Ok(self)
    }

    pub fn gram(&self) -> &K3Restriction {
        &self.flag_plus.k3
    }

    /// `D²` on the K3 surface.
    pub fn d_squared(&self) -> Q {
        self.gram().intersect(&self.section_class_d, &self.section_class_d)
    }
}

/// The double `(Y, S, Y)` with `g = id`.
pub fn build_double(f: &FlagDescriptor) -> GluingDescriptor {
    GluingDescriptor::new(f.clone(), f.clone(), linalg::identity(f.rho()))
        .expect("identity is an isometry")
}

/// Kernel of `R = [G+ | G-·A]` on `H^{1,1}(Y+) ⊕ H^{1,1}(Y-)`.
pub fn joint_obstruction_kernel(gd: &GluingDescriptor) -> Result<Kernel> {
    check_isometry(gd.gram(), &gd.a)?;
    let rho = gd.flag_plus.rho();
    stacked_restriction_kernel(&gd.gram().gram_q(), &linalg::identity(rho), &gd.a)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub smooth: bool,
    pub section_class_d: Vec<Q>,
    pub d_squared: Q,
}

/// The deformation space has smooth total space iff `N+ ⊗ N-` is trivial,
/// i.e. `D = 0` in the restricted lattice.
pub fn smooth_total_space(gd: &GluingDescriptor) -> SmoothnessReport {
    SmoothnessReport {
        smooth: linalg::is_zero_vec(&gd.section_class_d),
        section_class_d: gd.section_class_d.clone(),
        d_squared: gd.d_squared(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeformationTag {
    /// `N+ ⊗ N-` trivial: unobstructed, smooth body.
    UnobstructedSmoothBody,
    /// `N+ ⊗ N-` assumed generated by sections and nontrivial.
    GeneratedBySectionsAssumed,
}

impl DeformationTag {
    pub fn as_str(self) -> &'static str {
        match self {
            DeformationTag::UnobstructedSmoothBody => "unobstructed-smooth-body",
            DeformationTag::GeneratedBySectionsAssumed => "generated-by-sections-assumed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionSource {
    NotNeeded,
    /// `h^0(D) = 2 + D²/2`, assuming higher cohomology vanishes.
    RiemannRochVanishingAssumed,
    Supplied,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeformationDims {
    pub dim: Q,
    pub tag: DeformationTag,
    pub h0: Option<Q>,
    pub h0_source: SectionSource,
}

/// Dimension of the space of smoothing deformations of `Y+ ∪_S Y-`.
pub fn deformation_dims(
    gd: &GluingDescriptor,
    h12_plus: u64,
    h12_minus: u64,
    h0_supplied: Option<u64>,
) -> Result<DeformationDims> {
    let base = q(h12_plus as i64) + q(h12_minus as i64);
    if linalg::is_zero_vec(&gd.section_class_d) {
        return Ok(DeformationDims {
            dim: base + Q::one(),
            tag: DeformationTag::UnobstructedSmoothBody,
            h0: None,
            h0_source: SectionSource::NotNeeded,
        });
    }
    let (h0, source) = match h0_supplied {
        Some(h) => (q(h as i64), SectionSource::Supplied),
        None => (
            q(2) + gd.d_squared() / q(2),
            SectionSource::RiemannRochVanishingAssumed,
        ),
    };
    if h0 < Q::zero() {
        return Err(Error::NegativeSections(h0.to_string()));
    }
    Ok(DeformationDims {
        dim: base + &h0 - Q::one(),
        tag: DeformationTag::GeneratedBySectionsAssumed,
        h0: Some(h0),
        h0_source: source,
    })
}

/// Whether an involution of the K3 lattice fixes the restricted
/// anticanonical class, so that the twisted double smooths to a
/// Calabi-Yau threefold.
pub fn check_involution_fixes_anticanonical(f: &FlagDescriptor, a: &Matrix) -> Result<bool> {
    check_isometry(f.k3(), a)?;
    if linalg::mul(a, a) != linalg::identity(f.rho()) {
        return Err(Error::NotInvolution(crate::pairing::fmt_matrix(a)));
    }
    let s = f.s_class();
    Ok(linalg::mul_vec(a, &s) == s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_ints, identity};
    use crate::qvec;

    /// rho = 2 flag with restricted gram [[4,2],[2,1]].
    pub(crate) fn degenerate_flag() -> FlagDescriptor {
        let t = vec![
            vec![vec![4, 2], vec![2, 1]],
            vec![vec![2, 1], vec![1, 0]],
        ];
        let ring = ThreefoldRing::new("synthetic", vec!["a".into(), "b".into()], t, vec![1, 0], vec![24, 0], 0, 0).unwrap();
        FlagDescriptor::new(ring, vec![1, 0]).unwrap()
    }

    /// rho = 2 flag where S restricts to the sum of two (-2)-classes.
    pub(crate) fn two_roots_flag() -> FlagDescriptor {
        let t = vec![
            vec![vec![-4, 2], vec![2, 2]],
            vec![vec![2, 2], vec![2, -4]],
        ];
        let ring = ThreefoldRing::new("roots", vec!["r1".into(), "r2".into()], t, vec![1, 1], vec![12, 12], 0, 0).unwrap();
        FlagDescriptor::new(ring, vec![1, 1]).unwrap()
    }

    #[test]
    fn cp3_quartic_validates() {
        let r = validate_flag(&ThreefoldRing::cp3(), &[4]).unwrap();
        assert!(r.is_valid());
        assert_eq!(r.c1c2, q(24));
        assert_eq!(r.c2_dot_s, q(24));
        assert_eq!(r.gram, vec![vec![4]]);
    }

    #[test]
    fn calabi_yau_is_rejected() {
        let err = FlagDescriptor::new(ThreefoldRing::quintic(), vec![0]).unwrap_err();
        match err {
            Error::InvalidFlag(f) => assert!(f.iter().any(|m| m == "χ(O_Y) = 0 ≠ 1")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_anticanonical_is_rejected() {
        let r = validate_flag(&ThreefoldRing::cp3(), &[3]).unwrap();
        assert!(!r.anticanonical);
        assert!(!r.is_valid());
    }

    #[test]
    fn gram_examples() {
        assert!(obstruction_kernel(&FlagDescriptor::cp3_quartic()).is_trivial());
        let k = obstruction_kernel(&degenerate_flag());
        assert_eq!(k.dim, 1);
        assert_eq!(k.basis, vec![qvec(&[1, -2])]);
        let roots = two_roots_flag();
        assert_eq!(roots.k3().gram(), &[vec![-2, 4], vec![4, -2]]);
        assert!(obstruction_kernel(&roots).is_trivial());
    }

    #[test]
    fn double_of_cp3() {
        let d = build_double(&FlagDescriptor::cp3_quartic());
        assert_eq!(d.section_class_d, qvec(&[8]));
        let k = joint_obstruction_kernel(&d).unwrap();
        assert_eq!(k.dim, 1);
        assert_eq!(k.basis, vec![qvec(&[1, -1])]);
        let s = smooth_total_space(&d);
        assert!(!s.smooth);
        assert_eq!(s.d_squared, q(256));
        let dims = deformation_dims(&d, 0, 0, None).unwrap();
        assert_eq!(dims.dim, q(129));
        assert_eq!(dims.tag, DeformationTag::GeneratedBySectionsAssumed);
        assert_eq!(dims.h0_source, SectionSource::RiemannRochVanishingAssumed);
    }

    #[test]
    fn zero_section_class_is_smooth() {
        let d = build_double(&FlagDescriptor::cp3_quartic())
            .with_section_class(qvec(&[0]))
            .unwrap();
        assert!(smooth_total_space(&d).smooth);
        let dims = deformation_dims(&d, 3, 4, None).unwrap();
        assert_eq!(dims.dim, q(8));
        assert_eq!(dims.tag, DeformationTag::UnobstructedSmoothBody);
    }

    #[test]
    fn supplied_sections() {
        let d = build_double(&FlagDescriptor::cp3_quartic());
        assert_eq!(deformation_dims(&d, 2, 3, Some(5)).unwrap().dim, q(9));
    }

    #[test]
    fn negative_section_estimate_is_rejected() {
        let d = build_double(&two_roots_flag())
            .with_section_class(qvec(&[1, 0]))
            .unwrap();
        // D² = -2 gives 2 - 1 = 1; D = (3, 0) gives 2 - 9 < 0
        assert_eq!(deformation_dims(&d, 0, 0, None).unwrap().h0, Some(q(1)));
        let d = d.with_section_class(qvec(&[3, 0])).unwrap();
        assert!(matches!(
            deformation_dims(&d, 0, 0, None),
            Err(Error::NegativeSections(_))
        ));
    }

    #[test]
    fn stacked_kernels() {
        let zero = from_ints(&[&[0]]);
        let k = stacked_restriction_kernel(&zero, &identity(1), &identity(1)).unwrap();
        assert_eq!(k.dim, 2);
        // two rank-one sublattices spanning complementary directions
        let gram = from_ints(&[&[2, 0], &[0, 2]]);
        let p = from_ints(&[&[1], &[0]]);
        let m = from_ints(&[&[0], &[1]]);
        assert!(stacked_restriction_kernel(&gram, &p, &m).unwrap().is_trivial());
    }

    #[test]
    fn involution_examples() {
        let f = FlagDescriptor::cp3_quartic();
        assert!(check_involution_fixes_anticanonical(&f, &identity(1)).unwrap());
        assert!(!check_involution_fixes_anticanonical(&f, &from_ints(&[&[-1]])).unwrap());
        let roots = two_roots_flag();
        let swap = from_ints(&[&[0, 1], &[1, 0]]);
        assert!(check_involution_fixes_anticanonical(&roots, &swap).unwrap());
        assert!(matches!(
            check_involution_fixes_anticanonical(&roots, &from_ints(&[&[1, 1], &[0, 1]])),
            Err(Error::NotIsometry(_)) | Err(Error::NotInvolution(_))
        ));
    }

    #[test]
    fn gluing_rejects_non_isometry() {
        let f = FlagDescriptor::cp3_quartic();
        assert!(matches!(
            GluingDescriptor::new(f.clone(), f, from_ints(&[&[2]])),
            Err(Error::NotIsometry(_))
        ));
    }

    #[test]
    fn double_identity_gluing_matches_restrictions() {
        let f = FlagDescriptor::cp3_quartic();
        let d = build_double(&f);
        let e = crate::classes::ChernData::from_ints(2, &[0], &[1], 0).unwrap();
        let v = crate::classes::k3_mukai_vector(&f, &e).unwrap();
        assert!(crate::pairing::g_pullback_match(d.gram(), &d.a, &v, &v).unwrap());
        let m = crate::classes::mukai_vector(f.ring(), &e).unwrap().class;
        assert!(crate::pairing::mukai_pairing_3fold(f.ring(), &m, &m).unwrap().is_zero());
    }

    #[test]
    fn joint_kernel_of_double_counts() {
        for f in [FlagDescriptor::cp3_quartic(), degenerate_flag(), two_roots_flag()] {
            let d = build_double(&f);
            let rho = f.rho();
            let g = f.k3().gram_q();
            let rank_g = linalg::rank(&g);
            let k = joint_obstruction_kernel(&d).unwrap();
            assert!(k.dim >= rho - rank_g);
            let stacked: Matrix = g.iter().map(|r| r.iter().chain(r).cloned().collect()).collect();
            assert_eq!(k.dim, 2 * rho - linalg::rank(&stacked));
            assert_eq!(obstruction_kernel(&f).dim, rho - rank_g);
        }
    }
}
