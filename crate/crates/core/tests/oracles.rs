//! Cross-checks against formulas computed independently of the library's
//! own algorithms: Hilbert polynomials of toric threefolds, the classical
//! rank-2 Riemann-Roch on P^3, and a residue formula for integrals on G(2,n).

use std::collections::BTreeMap;
use std::path::Path;

use mukai_core::classes::{self, ChernData};
use mukai_core::flags::FlagDescriptor;
use mukai_core::io::{self, Manifold};
use mukai_core::pairing;
use mukai_core::ring::ThreefoldRing;
use mukai_core::schubert::{self, SchubertElement};
use mukai_core::{frac, q, qvec, Q};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn flag(name: &str) -> FlagDescriptor {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    match io::load_manifold(&path).unwrap() {
        Manifold::Flag(f) => f,
        Manifold::Ring(r) => panic!("{} is not a flag", r.name()),
    }
}

fn chi_line(ring: &ThreefoldRing, l: &[i64]) -> Q {
    let o = ChernData::trivial(ring.rho(), 1);
    let lb = ChernData::line_bundle(qvec(l));
    pairing::euler_chi(ring, &o, &lb).unwrap().value
}

fn binom3(a: i64) -> Q {
    frac((a + 1) * (a + 2) * (a + 3), 6)
}

#[test]
fn hilbert_polynomials() {
    let quintic = ThreefoldRing::quintic();
    let cp3 = ThreefoldRing::cp3();
    for a in -6..=6 {
        assert_eq!(chi_line(&quintic, &[a]), frac(5 * a * a * a + 25 * a, 6), "quintic O({a})");
        assert_eq!(chi_line(&cp3, &[a]), binom3(a), "P^3 O({a})");
    }
    let p1p2 = flag("p1xp2.json");
    let p1cubed = flag("p1-cubed.json");
    for a in -3..=3 {
        for b in -3..=3 {
            assert_eq!(
                chi_line(p1p2.ring(), &[a, b]),
                frac((a + 1) * (b + 1) * (b + 2), 2),
                "P^1 x P^2 O({a},{b})"
            );
            for c in -2..=2 {
                assert_eq!(chi_line(p1cubed.ring(), &[a, b, c]), q((a + 1) * (b + 1) * (c + 1)));
            }
        }
    }
}

#[test]
fn euler_form_depends_on_difference() {
    let p1p2 = flag("p1xp2.json");
    let r = p1p2.ring();
    for (a, b, c, d) in [(1, 0, 0, 2), (-1, 2, 3, -1), (2, 2, 0, 0)] {
        let e1 = ChernData::line_bundle(qvec(&[a, b]));
        let e2 = ChernData::line_bundle(qvec(&[c, d]));
        let chi = pairing::euler_chi(r, &e1, &e2).unwrap().value;
        assert_eq!(chi, chi_line(r, &[c - a, d - b]));
    }
}

#[test]
fn todd_genus_is_one_on_flags() {
    for name in ["cp3-quartic.json", "p1xp2.json", "p1-cubed.json", "synthetic-rho2.json"] {
        let f = flag(name);
        let td = classes::todd_class(f.ring());
        assert_eq!(td.a6, q(1), "{name}");
    }
}

proptest! {
    /// `χ(E(k)) = (k+1)(k+2)(k+3)/3 - n(k+2)` for rank 2, `c1 = 0`, `c2 = n` on P^3.
    #[test]
    fn rank_two_on_p3(n in -3i64..8, k in -5i64..6) {
        let cp3 = ThreefoldRing::cp3();
        let e = ChernData::from_ints(2, &[0], &[n], 0).unwrap();
        let ek = classes::twist_chern(&cp3, &e, &qvec(&[k])).unwrap();
        let o = ChernData::trivial(1, 1);
        let chi = pairing::euler_chi(&cp3, &o, &ek).unwrap().value;
        prop_assert_eq!(chi, frac((k + 1) * (k + 2) * (k + 3), 3) - q(n * (k + 2)));
    }

    /// A line bundle restricts to `(1, L, L²/2 + 1)`, a (-2)-vector.
    #[test]
    fn line_bundles_restrict_to_spherical_vectors(a in -4i64..5, b in -4i64..5, c in -4i64..5) {
        for (f, l) in [(flag("p1xp2.json"), vec![a, b]), (flag("p1-cubed.json"), vec![a, b, c])] {
            let v = classes::k3_mukai_vector(&f, &ChernData::line_bundle(qvec(&l))).unwrap();
            let lq = qvec(&l);
            let square = f.k3().intersect(&lq, &lq);
            prop_assert_eq!(&v.v0, &q(1));
            prop_assert_eq!(&v.v2, &lq);
            prop_assert_eq!(&v.v4, &(square / q(2) + q(1)));
            prop_assert_eq!(pairing::mukai_pairing_k3(f.k3(), &v, &v).unwrap(), q(-2));
        }
    }
}

type Poly = BTreeMap<(u32, u32), BigInt>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for ((i, j), x) in a {
        for ((k, l), y) in b {
            *out.entry((i + k, j + l)).or_default() += x * y;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Schur polynomial `s_(a,b)(x1, x2) = (x1 x2)^b h_{a-b}(x1, x2)`.
fn schur(a: u32, b: u32) -> Poly {
    (b..=a).map(|i| ((i, a + b - i), BigInt::from(1))).collect()
}

/// `∫_{G(2,n)} φ = -½ [x1^{n-1} x2^{n-1}] (φ·(x1 - x2)²)`.
fn residue_integral(n: u32, phi: &Poly) -> BigInt {
    let vandermonde: Poly = [((2, 0), 1), ((1, 1), -2), ((0, 2), 1)]
        .into_iter()
        .map(|(k, v)| (k, BigInt::from(v)))
        .collect();
    let c = poly_mul(phi, &vandermonde)
        .get(&(n - 1, n - 1))
        .cloned()
        .unwrap_or_default();
    assert!((&c % BigInt::from(2)).is_zero());
    -c / BigInt::from(2)
}

#[test]
fn residue_oracle_sanity() {
    let s1 = schur(1, 0);
    let phi = (0..4).fold(schur(0, 0), |acc, _| poly_mul(&acc, &s1));
    assert_eq!(residue_integral(4, &phi), BigInt::from(2));
}

#[test]
fn classical_line_counts_by_residues() {
    for (n, k, expected) in [(5u32, 5u32, 2875), (4, 3, 27)] {
        let mut phi = schur(0, 0);
        for i in 0..=k {
            let factor: Poly = [((1, 0), i), ((0, 1), k - i)]
                .into_iter()
                .filter(|(_, w)| *w != 0)
                .map(|(m, w)| (m, BigInt::from(w)))
                .collect();
            phi = poly_mul(&phi, &factor);
        }
        assert_eq!(residue_integral(n, &phi), BigInt::from(expected));
        assert_eq!(schubert::ctop_sym_k_dual_tautological(n, k).unwrap(), BigInt::from(expected));
    }
}

fn partitions(n: u32) -> Vec<(u32, u32)> {
    (0..=n - 2).flat_map(|a| (0..=a).map(move |b| (a, b))).collect()
}

proptest! {
    /// Every coefficient of a product of Schubert classes, read off as
    /// `∫ x·σ_(λ^c)`, matches the residue integral of the Schur polynomials.
    #[test]
    fn products_match_residues(n in 3u32..8, picks in prop::collection::vec(0usize..100, 1..4)) {
        let parts = partitions(n);
        let mut x = SchubertElement::one(n).unwrap();
        let mut phi = schur(0, 0);
        for p in picks {
            let (a, b) = parts[p % parts.len()];
            x = x.mul(&SchubertElement::sigma(n, a, b).unwrap()).unwrap();
            phi = poly_mul(&phi, &schur(a, b));
        }
        let top = n - 2;
        for &(a, b) in &parts {
            let dual = SchubertElement::sigma(n, top - b, top - a).unwrap();
            let via_ring = x.mul(&dual).unwrap().integrate();
            let via_residue = residue_integral(n, &poly_mul(&phi, &schur(top - b, top - a)));
            prop_assert_eq!(&via_ring, &via_residue);
            prop_assert_eq!(x.coefficient((a, b)), via_residue);
        }
    }

    /// Pieri agrees with expanding `s_λ·h_k` and discarding rows longer than `n-2`.
    #[test]
    fn pieri_matches_schur_expansion(n in 3u32..8, p in 0usize..100, k in 0u32..6) {
        let parts = partitions(n);
        let (a, b) = parts[p % parts.len()];
        let k = k % (n - 1);
        let got = SchubertElement::sigma(n, a, b).unwrap().pieri_mult(k).unwrap();
        let mut rest = poly_mul(&schur(a, b), &schur(k, 0));
        let mut expected = BTreeMap::new();
        while let Some((&(i, j), c)) = rest.iter().next_back() {
            let c = c.clone();
            for (m, v) in schur(i, j) {
                let e = rest.entry(m).or_default();
                *e -= &c * v;
                if e.is_zero() {
                    rest.remove(&m);
                }
            }
            if i <= n - 2 {
                expected.insert((i, j), c);
            }
        }
        prop_assert_eq!(got.terms(), &expected);
    }

    #[test]
    fn ctop_polynomials_are_symmetric(k in 0u32..9) {
        prop_assert!(schubert::is_symmetric(&schubert::sym_power_top_chern(k)));
    }
}

#[test]
fn tangent_bundle_top_chern_counts_cells() {
    for n in 2..=9 {
        assert_eq!(schubert::top_chern_tangent(n).unwrap(), BigInt::from(n * (n - 1) / 2));
    }
}
