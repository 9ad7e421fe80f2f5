//! Truncated even cohomology of a threefold, given by intersection data.
//!
//! A class is stored as `(a0, a2, a4, a6)` where `a2` holds coordinates in the
//! H^2 basis `e_1..e_rho` and `a4[i] = ∫ (H^4 part)·e_i`. Poincaré duality
//! makes the second description faithful over the rationals, and it lets every
//! product we need go through the single triple tensor `d[i][j][k]`.

use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::check_len;
use crate::linalg::{self, Matrix};
use crate::{q, Error, Result, Q};

/// Intersection data of a smooth projective threefold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreefoldRing {
    name: String,
    basis_labels: Vec<String>,
    triple: Vec<Vec<Vec<i64>>>,
    c1_coords: Vec<i64>,
    c2_values: Vec<i64>,
    chi_top: i64,
    h12: u64,
}

impl ThreefoldRing {
    /// Builds a ring after checking the structural invariants: nonempty
    /// distinct basis, a symmetric `rho³` tensor and H^2-sized Chern data.
    ///
    /// Hodge/Euler consistency is a separate check ([`ThreefoldRing::validate`]),
    /// so inconsistent data can still be inspected.
    pub fn new(
        name: impl Into<String>,
        basis_labels: Vec<String>,
        triple: Vec<Vec<Vec<i64>>>,
        c1_coords: Vec<i64>,
        c2_values: Vec<i64>,
        chi_top: i64,
        h12: u64,
    ) -> Result<Self> {
        let rho = basis_labels.len();
        if rho == 0 {
            return Err(Error::InvalidRing("rho must be at least 1".into()));
        }
        let distinct: HashSet<&String> = basis_labels.iter().collect();
        if distinct.len() != rho {
            return Err(Error::InvalidRing("basis labels must be distinct".into()));
        }
        check_len(rho, triple.len(), "triple tensor")?;
        for plane in &triple {
            check_len(rho, plane.len(), "triple tensor")?;
            for row in plane {
                check_len(rho, row.len(), "triple tensor")?;
            }
        }
        for i in 0..rho {
            for j in 0..rho {
                for k in 0..rho {
                    let v = triple[i][j][k];
                    if v != triple[j][i][k] || v != triple[i][k][j] || v != triple[k][j][i] {
                        return Err(Error::InvalidRing(format!(
                            "triple tensor is not symmetric at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        check_len(rho, c1_coords.len(), "c1 coordinates")?;
        check_len(rho, c2_values.len(), "c2 values")?;
        Ok(Self {
            name: name.into(),
            basis_labels,
            triple,
            c1_coords,
            c2_values,
            chi_top,
            h12,
        })
    }

    /// Convenience constructor for Picard rank one: `∫H³ = degree`.
    pub fn rank_one(
        name: &str,
        label: &str,
        degree: i64,
        c1: i64,
        c2: i64,
        chi_top: i64,
        h12: u64,
    ) -> Result<Self> {
        Self::new(
            name,
            vec![label.to_string()],
            vec![vec![vec![degree]]],
            vec![c1],
            vec![c2],
            chi_top,
            h12,
        )
    }

    /// The quintic threefold in P^4.
    pub fn quintic() -> Self {
        Self::rank_one("quintic", "H", 5, 0, 50, -200, 101).expect("quintic data")
    }

    /// Projective 3-space.
    pub fn cp3() -> Self {
        Self::rank_one("cp3", "H", 1, 4, 6, 4, 0).expect("cp3 data")
    }

    /// Full invariant check: for Calabi-Yau rings, `chi_top = 2 (rho - h12)`.
    pub fn validate(&self) -> Result<()> {
        if self.is_calabi_yau() {
            let computed = self.hodge_euler();
            if computed != self.chi_top {
                return Err(Error::EulerMismatch {
                    computed,
                    stored: self.chi_top,
                });
            }
        }
        Ok(())
    }

    pub(crate) fn hodge_euler(&self) -> i64 {
        2 * (self.rho() as i64 - self.h12 as i64)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rho(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn triple(&self) -> &[Vec<Vec<i64>>] {
        &self.triple
    }

    pub fn c1_coords(&self) -> &[i64] {
        &self.c1_coords
    }

    pub fn c2_values(&self) -> &[i64] {
        &self.c2_values
    }

    pub fn chi_top(&self) -> i64 {
        self.chi_top
    }

    pub fn h12(&self) -> u64 {
        self.h12
    }

    pub fn is_calabi_yau(&self) -> bool {
        self.c1_coords.iter().all(|&c| c == 0)
    }

    /// `c1(TY)` as an H^2 class.
    pub fn c1_class(&self) -> Vec<Q> {
        crate::qvec(&self.c1_coords)
    }

    /// `c2(TY)` as an H^4 functional.
    pub fn c2_class(&self) -> Vec<Q> {
        crate::qvec(&self.c2_values)
    }

    pub fn d(&self, i: usize, j: usize, k: usize) -> i64 {
        self.triple[i][j][k]
    }

    /// `∫ u·v·w` for H^2 classes.
    pub fn triple_product(&self, u: &[Q], v: &[Q], w: &[Q]) -> Q {
        linalg::dot(w, &self.h2_product(u, v))
    }

    /// The H^4 functional of `u·v`: `(u·v)[k] = Σ_ij u_i v_j d_ijk`.
    pub fn h2_product(&self, u: &[Q], v: &[Q]) -> Vec<Q> {
        let rho = self.rho();
        (0..rho)
            .map(|k| {
                let mut acc = Q::zero();
                for i in 0..rho {
                    if u[i].is_zero() {
                        continue;
                    }
                    for j in 0..rho {
                        let d = self.triple[i][j][k];
                        if d != 0 {
                            acc += &u[i] * &v[j] * q(d);
                        }
                    }
                }
                acc
            })
            .collect()
    }

    pub fn check_class(&self, x: &GradedClass) -> Result<()> {
        check_len(self.rho(), x.a2.len(), "H^2 part of class")?;
        check_len(self.rho(), x.a4.len(), "H^4 part of class")
    }

    /// Cup product truncated above degree 6.
    pub fn multiply(&self, x: &GradedClass, y: &GradedClass) -> Result<GradedClass> {
        self.check_class(x)?;
        self.check_class(y)?;
        Ok(self.mul_unchecked(x, y))
    }

    pub(crate) fn mul_unchecked(&self, x: &GradedClass, y: &GradedClass) -> GradedClass {
        let a0 = &x.a0 * &y.a0;
        let a2 = x
            .a2
            .iter()
            .zip(&y.a2)
            .map(|(xi, yi)| &x.a0 * yi + &y.a0 * xi)
            .collect();
        let quad = self.h2_product(&x.a2, &y.a2);
        let a4 = x
            .a4
            .iter()
            .zip(&y.a4)
            .zip(quad)
            .map(|((xi, yi), qi)| &x.a0 * yi + &y.a0 * xi + qi)
            .collect();
        let a6 = &x.a0 * &y.a6 + &y.a0 * &x.a6 + linalg::dot(&x.a2, &y.a4) + linalg::dot(&y.a2, &x.a4);
        GradedClass { a0, a2, a4, a6 }
    }

    /// Truncated `exp(L)` for an H^2 class `L`.
    pub fn exp(&self, l: &[Q]) -> Result<GradedClass> {
        check_len(self.rho(), l.len(), "H^2 class")?;
        let l2 = self.h2_product(l, l);
        let l3 = linalg::dot(l, &l2);
        Ok(GradedClass {
            a0: Q::one(),
            a2: l.to_vec(),
            a4: l2.into_iter().map(|x| x / q(2)).collect(),
            a6: l3 / q(6),
        })
    }

    /// Gram matrix `G[i][j] = d(e_i, e_j, s)` of the classes restricted to a
    /// surface in the class `s`.
    pub fn restricted_gram(&self, s_coords: &[i64]) -> Vec<Vec<i64>> {
        let rho = self.rho();
        (0..rho)
            .map(|i| {
                (0..rho)
                    .map(|j| (0..rho).map(|k| self.triple[i][j][k] * s_coords[k]).sum())
                    .collect()
            })
            .collect()
    }
}

/// An element of `H^0 ⊕ H^2 ⊕ H^4 ⊕ H^6` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedClass {
    #[serde(with = "crate::qserde")]
    pub a0: Q,
    #[serde(with = "crate::qserde::vec")]
    pub a2: Vec<Q>,
    #[serde(with = "crate::qserde::vec")]
    pub a4: Vec<Q>,
    #[serde(with = "crate::qserde")]
    pub a6: Q,
}

impl GradedClass {
    pub fn new(a0: Q, a2: Vec<Q>, a4: Vec<Q>, a6: Q) -> Self {
        Self { a0, a2, a4, a6 }
    }

    pub fn zero(rho: usize) -> Self {
        Self::new(Q::zero(), vec![Q::zero(); rho], vec![Q::zero(); rho], Q::zero())
    }

    pub fn one(rho: usize) -> Self {
        Self::scalar(rho, Q::one())
    }

    pub fn scalar(rho: usize, c: Q) -> Self {
        Self { a0: c, ..Self::zero(rho) }
    }

    pub fn h2(v: Vec<Q>) -> Self {
        let rho = v.len();
        Self { a2: v, ..Self::zero(rho) }
    }

    pub fn h4(v: Vec<Q>) -> Self {
        let rho = v.len();
        Self { a4: v, ..Self::zero(rho) }
    }

    /// Class of a point.
    pub fn point(rho: usize) -> Self {
        Self { a6: Q::one(), ..Self::zero(rho) }
    }

    /// Integer-literal constructor, mostly for tests and fixtures.
    pub fn from_ints(a0: i64, a2: &[i64], a4: &[i64], a6: i64) -> Self {
        Self::new(q(a0), crate::qvec(a2), crate::qvec(a4), q(a6))
    }

    pub fn rho(&self) -> usize {
        self.a2.len()
    }

    /// The involution `*`: identity on H^0 ⊕ H^4, minus identity on H^2 ⊕ H^6.
    pub fn star(&self) -> Self {
        Self {
            a0: self.a0.clone(),
            a2: self.a2.iter().map(|x| -x).collect(),
            a4: self.a4.clone(),
            a6: -self.a6.clone(),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            a0: &self.a0 * c,
            a2: self.a2.iter().map(|x| x * c).collect(),
            a4: self.a4.iter().map(|x| x * c).collect(),
            a6: &self.a6 * c,
        }
    }

    /// Part of degree at least 2 (`self - a0`).
    pub fn nilpotent_part(&self) -> Self {
        Self { a0: Q::zero(), ..self.clone() }
    }

    pub fn is_integral(&self) -> bool {
        self.coefficients().all(|x| x.is_integer())
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &Q> {
        std::iter::once(&self.a0)
            .chain(&self.a2)
            .chain(&self.a4)
            .chain(std::iter::once(&self.a6))
    }
}

impl Add for &GradedClass {
    type Output = GradedClass;
    fn add(self, o: &GradedClass) -> GradedClass {
        GradedClass {
            a0: &self.a0 + &o.a0,
            a2: self.a2.iter().zip(&o.a2).map(|(x, y)| x + y).collect(),
            a4: self.a4.iter().zip(&o.a4).map(|(x, y)| x + y).collect(),
            a6: &self.a6 + &o.a6,
        }
    }
}

impl Sub for &GradedClass {
    type Output = GradedClass;
    fn sub(self, o: &GradedClass) -> GradedClass {
        self + &(-o)
    }
}

impl Neg for &GradedClass {
    type Output = GradedClass;
    fn neg(self) -> GradedClass {
        self.scale(&-Q::one())
    }
}

impl Mul<&Q> for &GradedClass {
    type Output = GradedClass;
    fn mul(self, c: &Q) -> GradedClass {
        self.scale(c)
    }
}

fn fmt_vec(f: &mut fmt::Formatter<'_>, v: &[Q]) -> fmt::Result {
    write!(f, "[")?;
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{x}")?;
    }
    write!(f, "]")
}

impl fmt::Display for GradedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, ", self.a0)?;
        fmt_vec(f, &self.a2)?;
        write!(f, ", ")?;
        fmt_vec(f, &self.a4)?;
        write!(f, ", {})", self.a6)
    }
}

/// Gram data of the H^2 classes of a threefold restricted to a surface `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct K3Restriction {
    gram: Vec<Vec<i64>>,
    s_coords: Vec<i64>,
}

impl K3Restriction {
    pub fn from_ring(ring: &ThreefoldRing, s_coords: &[i64]) -> Result<Self> {
        check_len(ring.rho(), s_coords.len(), "surface class")?;
        Ok(Self {
            gram: ring.restricted_gram(s_coords),
            s_coords: s_coords.to_vec(),
        })
    }

    /// Stored gram data, without reference to an ambient ring. Used for
    /// synthetic lattices; must be symmetric.
    pub fn from_gram(gram: Vec<Vec<i64>>, s_coords: Vec<i64>) -> Result<Self> {
        let n = s_coords.len();
        check_len(n, gram.len(), "gram matrix")?;
        for (i, row) in gram.iter().enumerate() {
            check_len(n, row.len(), "gram matrix")?;
            for (j, &g) in row.iter().enumerate() {
                if gram[j][i] != g {
                    return Err(Error::InvalidRing("gram matrix is not symmetric".into()));
                }
            }
        }
        Ok(Self { gram, s_coords })
    }

    pub fn rho(&self) -> usize {
        self.s_coords.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn s_coords(&self) -> &[i64] {
        &self.s_coords
    }

    pub fn gram_q(&self) -> Matrix {
        self.gram.iter().map(|r| crate::qvec(r)).collect()
    }

    /// Regenerates the gram matrix from `ring` and compares.
    pub fn matches_ring(&self, ring: &ThreefoldRing) -> bool {
        ring.rho() == self.rho() && ring.restricted_gram(&self.s_coords) == self.gram
    }

    /// `Dᵀ G E` for restricted H^2 classes.
    pub fn intersect(&self, d: &[Q], e: &[Q]) -> Q {
        linalg::bilinear(&self.gram_q(), d, e)
    }

    pub fn check_vector(&self, v: &K3Vector) -> Result<()> {
        check_len(self.rho(), v.v2.len(), "K3 vector")
    }
}

/// A Mukai-lattice vector `(v0, v2, v4)` on the K3 surface, with `v2` in the
/// coordinates of the restricted H^2 classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct K3Vector {
    #[serde(with = "crate::qserde")]
    pub v0: Q,
    #[serde(with = "crate::qserde::vec")]
    pub v2: Vec<Q>,
    #[serde(with = "crate::qserde")]
    pub v4: Q,
}

impl K3Vector {
    pub fn new(v0: Q, v2: Vec<Q>, v4: Q) -> Self {
        Self { v0, v2, v4 }
    }

    pub fn from_ints(v0: i64, v2: &[i64], v4: i64) -> Self {
        Self::new(q(v0), crate::qvec(v2), q(v4))
    }

    pub fn rho(&self) -> usize {
        self.v2.len()
    }
}

impl Add for &K3Vector {
    type Output = K3Vector;
    fn add(self, o: &K3Vector) -> K3Vector {
        K3Vector {
            v0: &self.v0 + &o.v0,
            v2: self.v2.iter().zip(&o.v2).map(|(x, y)| x + y).collect(),
            v4: &self.v4 + &o.v4,
        }
    }
}

impl fmt::Display for K3Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, ", self.v0)?;
        fmt_vec(f, &self.v2)?;
        write!(f, ", {})", self.v4)
    }
}

/// Pullback of a threefold class to the surface in the class `s_coords`.
///
/// The H^6 part does not survive; the H^4 part becomes `∫_Y a4·S`.
pub fn restrict_to_k3(ring: &ThreefoldRing, s_coords: &[i64], x: &GradedClass) -> Result<K3Vector> {
    ring.check_class(x)?;
    check_len(ring.rho(), s_coords.len(), "surface class")?;
    Ok(K3Vector {
        v0: x.a0.clone(),
        v2: x.a2.clone(),
        v4: linalg::dot(&crate::qvec(s_coords), &x.a4),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qvec;
    use proptest::prelude::*;

    #[test]
    fn quintic_hyperplane_square() {
        let r = ThreefoldRing::quintic();
        let h = GradedClass::h2(qvec(&[1]));
        let hh = r.multiply(&h, &h).unwrap();
        assert_eq!(hh, GradedClass::from_ints(0, &[0], &[5], 0));
        let hhh = r.multiply(&h, &hh).unwrap();
        assert_eq!(hhh.a6, q(5));
    }

    #[test]
    fn unit_is_identity() {
        let r = ThreefoldRing::quintic();
        let x = GradedClass::new(q(2), qvec(&[3]), vec![crate::frac(1, 2)], q(-7));
        assert_eq!(r.multiply(&GradedClass::one(1), &x).unwrap(), x);
    }

    #[test]
    fn star_examples() {
        let x = GradedClass::from_ints(1, &[2], &[3], 4);
        assert_eq!(x.star(), GradedClass::from_ints(1, &[-2], &[3], -4));
        assert_eq!(x.star().star(), x);
        let f = GradedClass::from_ints(0, &[0], &[3], 0);
        assert_eq!(f.star(), f);
    }

    #[test]
    fn restriction_to_quartic() {
        let r = ThreefoldRing::cp3();
        let x = GradedClass::from_ints(0, &[0], &[-1], 0);
        assert_eq!(restrict_to_k3(&r, &[4], &x).unwrap(), K3Vector::from_ints(0, &[0], -4));
        let one = GradedClass::one(1);
        assert_eq!(restrict_to_k3(&r, &[4], &one).unwrap(), K3Vector::from_ints(1, &[0], 0));
        let h = GradedClass::h2(qvec(&[1]));
        assert_eq!(restrict_to_k3(&r, &[4], &h).unwrap(), K3Vector::from_ints(0, &[1], 0));
        let k3 = K3Restriction::from_ring(&r, &[4]).unwrap();
        assert_eq!(k3.gram(), &[vec![4]]);
    }

    #[test]
    fn rejects_asymmetric_tensor_and_bad_labels() {
        let bad = ThreefoldRing::new(
            "x",
            vec!["a".into(), "b".into()],
            vec![vec![vec![1, 2], vec![0, 0]], vec![vec![0, 0], vec![0, 0]]],
            vec![0, 0],
            vec![0, 0],
            0,
            2,
        );
        assert!(matches!(bad, Err(Error::InvalidRing(_))));
        let dup = ThreefoldRing::new(
            "x",
            vec!["a".into(), "a".into()],
            vec![vec![vec![0; 2]; 2]; 2],
            vec![0, 0],
            vec![0, 0],
            0,
            2,
        );
        assert!(dup.is_err());
        assert!(ThreefoldRing::new("x", vec![], vec![], vec![], vec![], 0, 0).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let r = ThreefoldRing::quintic();
        let x = GradedClass::zero(2);
        assert!(matches!(
            r.multiply(&x, &x),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn euler_consistency() {
        assert!(ThreefoldRing::quintic().validate().is_ok());
        let bad = ThreefoldRing::rank_one("q", "H", 5, 0, 50, -198, 101).unwrap();
        assert!(matches!(bad.validate(), Err(Error::EulerMismatch { .. })));
    }

    fn small() -> impl Strategy<Value = i64> {
        -4i64..=4
    }

    fn ring_strategy() -> impl Strategy<Value = ThreefoldRing> {
        (1usize..=3).prop_flat_map(|rho| {
            (
                proptest::collection::vec(small(), rho * rho * rho),
                proptest::collection::vec(small(), rho),
            )
                .prop_map(move |(raw, c2)| {
                    let mut t = vec![vec![vec![0; rho]; rho]; rho];
                    for i in 0..rho {
                        for j in i..rho {
                            for k in j..rho {
                                let v = raw[(i * rho + j) * rho + k];
                                for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                                    t[a][b][c] = v;
                                }
                            }
                        }
                    }
                    let labels = (0..rho).map(|i| format!("e{i}")).collect();
                    ThreefoldRing::new("rand", labels, t, vec![0; rho], c2, 0, rho as u64).unwrap()
                })
        })
    }

    fn class(rho: usize) -> impl Strategy<Value = GradedClass> {
        (
            small(),
            proptest::collection::vec(small(), rho),
            proptest::collection::vec(small(), rho),
            small(),
        )
            .prop_map(|(a0, a2, a4, a6)| GradedClass::from_ints(a0, &a2, &a4, a6))
    }

    fn ring_and_classes() -> impl Strategy<Value = (ThreefoldRing, GradedClass, GradedClass, GradedClass)> {
        ring_strategy().prop_flat_map(|r| {
            let rho = r.rho();
            (Just(r), class(rho), class(rho), class(rho))
        })
    }

    proptest! {
        #[test]
        fn product_is_commutative_associative_bilinear((r, x, y, z) in ring_and_classes()) {
            let xy = r.multiply(&x, &y).unwrap();
            prop_assert_eq!(&xy, &r.multiply(&y, &x).unwrap());
            let lhs = r.multiply(&xy, &z).unwrap();
            let rhs = r.multiply(&x, &r.multiply(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let sum = r.multiply(&(&x + &y), &z).unwrap();
            let split = &r.multiply(&x, &z).unwrap() + &r.multiply(&y, &z).unwrap();
            prop_assert_eq!(sum, split);
        }

        #[test]
        fn star_is_multiplicative_involution((r, x, y, _z) in ring_and_classes()) {
            prop_assert_eq!(x.star().star(), x.clone());
            prop_assert_eq!(&x.star() + &y.star(), (&x + &y).star());
            let lhs = r.multiply(&x, &y).unwrap().star();
            let rhs = r.multiply(&x.star(), &y.star()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn top_degree_pairing_symmetric((r, x, y, _z) in ring_and_classes()) {
            let xy = r.multiply(&x, &y).unwrap().a6;
            let manual = &x.a0 * &y.a6 + &y.a0 * &x.a6
                + linalg::dot(&x.a2, &y.a4) + linalg::dot(&y.a2, &x.a4);
            prop_assert_eq!(xy, manual);
        }

        #[test]
        fn regenerated_gram_matches(r in ring_strategy(), s in proptest::collection::vec(small(), 3)) {
            let s = &s[..r.rho()];
            let k3 = K3Restriction::from_ring(&r, s).unwrap();
            prop_assert!(k3.matches_ring(&r));
            for i in 0..r.rho() {
                for j in 0..r.rho() {
                    let mut ei = vec![Q::zero(); r.rho()];
                    let mut ej = ei.clone();
                    ei[i] = Q::one();
                    ej[j] = Q::one();
                    let direct = r.triple_product(&ei, &ej, &qvec(s));
                    prop_assert_eq!(q(k3.gram()[i][j]), direct);
                }
            }
        }
    }
}
