//! Casson–Donaldson bookkeeping: a table of lattice vectors with integer
//! invariants and where each value came from.
//!
//! Values are never computed from sheaf cohomology. They are seeded by the
//! line-bundle and skyscraper rules, taken from Euler characteristics of known
//! moduli models, or produced by the product rule for reflected twists.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::classes::{self, ChernData};
use crate::flags::FlagDescriptor;
use crate::moduli::chi_top_cy3;
use crate::pairing::{reflect_alpha, twist_t, ReflectionMode};
use crate::ring::{GradedClass, K3Vector, ThreefoldRing};
use crate::{Error, Result, Q};

mod bigint_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A known integer, or a named quantity with no numeric value yet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CdValue {
    Known(#[serde(with = "bigint_str")] BigInt),
    Named(String),
}

impl CdValue {
    pub fn known(v: i64) -> Self {
        CdValue::Known(BigInt::from(v))
    }

    pub fn as_known(&self) -> Option<&BigInt> {
        match self {
            CdValue::Known(v) => Some(v),
            CdValue::Named(_) => None,
        }
    }

    pub fn product(&self, other: &CdValue) -> CdValue {
        match (self, other) {
            (CdValue::Known(a), CdValue::Known(b)) => CdValue::Known(a * b),
            _ => CdValue::Named(format!("({self})·({other})")),
        }
    }
}

impl fmt::Display for CdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CdValue::Known(v) => write!(f, "{v}"),
            CdValue::Named(n) => write!(f, "{n}"),
        }
    }
}

/// `α_m(T_L^k(m'))` for every `k` above an unknown threshold `k0(m, m')`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectedTwistFamily {
    pub reflect_by: usize,
    pub twist_of: usize,
    #[serde(with = "crate::qserde::vec")]
    pub twist_class: Vec<Q>,
    /// Name of the unknown lower bound; valid for `k > k0`.
    pub k_threshold: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeVector {
    Threefold(GradedClass),
    /// A bundle on a flag: its Mukai vector on `Y` and its restriction to `S`.
    Flag {
        threefold: GradedClass,
        restricted: K3Vector,
    },
    Family(ReflectedTwistFamily),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    LineBundleRule,
    SkyscraperRule,
    /// Relative invariant `±χ` of a flag moduli component; the sign is not
    /// determined, so the absolute value is stored.
    Degeneration { euler_characteristic: CdValue, sign: String },
    /// Product rule for `α_m(T^k(m'))`.
    Closure { parents: (usize, usize) },
    RegistryConstant { citation: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdEntry {
    pub id: usize,
    pub manifold: String,
    pub vector: LatticeVector,
    pub value: CdValue,
    pub provenance: Provenance,
    /// Asserted realization by exceptional stable bundles.
    pub exceptional: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedKind<'a> {
    LineBundle(&'a [Q]),
    Skyscraper,
}

/// Euler characteristic of a moduli model, numeric or named.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EulerInput {
    Known(i64),
    Named(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdRegistry {
    entries: Vec<CdEntry>,
}

impl CdRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[CdEntry] {
        &self.entries
    }

    pub fn get(&self, id: usize) -> Result<&CdEntry> {
        self.entries.get(id).ok_or(Error::UnknownEntry(id))
    }

    fn key(manifold: &str, vector: &LatticeVector) -> String {
        format!(
            "{manifold}:{}",
            serde_json::to_string(vector).expect("vectors serialize")
        )
    }

    /// Inserts an entry, or returns the existing id when the same vector is
    /// already present with the same value.
    pub fn insert(
        &mut self,
        manifold: &str,
        vector: LatticeVector,
        value: CdValue,
        provenance: Provenance,
        exceptional: bool,
    ) -> Result<usize> {
        let key = Self::key(manifold, &vector);
        if let Some(existing) = self
            .entries
            .iter()
            .find(|e| Self::key(&e.manifold, &e.vector) == key)
        {
            if existing.value != value {
                return Err(Error::RegistryConflict {
                    key,
                    existing: existing.value.to_string(),
                    new: value.to_string(),
                });
            }
            return Ok(existing.id);
        }
        let id = self.entries.len();
        self.entries.push(CdEntry {
            id,
            manifold: manifold.to_string(),
            vector,
            value,
            provenance,
            exceptional,
        });
        Ok(id)
    }

    pub fn mark_exceptional(&mut self, id: usize) -> Result<()> {
        self.entries
            .get_mut(id)
            .ok_or(Error::UnknownEntry(id))?
            .exceptional = true;
        Ok(())
    }

    /// Line bundles have invariant 1; the skyscraper sheaf of a point has
    /// the topological Euler characteristic.
    pub fn seed(&mut self, ring: &ThreefoldRing, kind: SeedKind<'_>) -> Result<usize> {
        match kind {
            SeedKind::LineBundle(c1) => {
                let m = classes::mukai_vector(ring, &ChernData::line_bundle(c1.to_vec()))?;
                self.insert(
                    ring.name(),
                    LatticeVector::Threefold(m.class),
                    CdValue::known(1),
                    Provenance::LineBundleRule,
                    true,
                )
            }
            SeedKind::Skyscraper => {
                let chi = chi_top_cy3(ring)?;
                // ch(O_p) is the point class and sqrt(td) has leading term 1
                self.insert(
                    ring.name(),
                    LatticeVector::Threefold(GradedClass::point(ring.rho())),
                    CdValue::known(chi),
                    Provenance::SkyscraperRule,
                    false,
                )
            }
        }
    }

    /// Product rule: the family `α_m(T_L^k(m'))` gets `CD(m)·CD(m')`.
    pub fn closure(&mut self, m: usize, mp: usize, twist_class: &[Q]) -> Result<usize> {
        let (pm, pmp) = (self.get(m)?.clone(), self.get(mp)?.clone());
        for p in [&pm, &pmp] {
            if !p.exceptional {
                return Err(Error::NotExceptional(p.id));
            }
        }
        let family = ReflectedTwistFamily {
            reflect_by: m,
            twist_of: mp,
            twist_class: twist_class.to_vec(),
            k_threshold: format!("k0({m},{mp})"),
        };
        self.insert(
            &pm.manifold,
            LatticeVector::Family(family),
            pm.value.product(&pmp.value),
            Provenance::Closure { parents: (m, mp) },
            true,
        )
    }

    /// Relative invariant of a flag from the Euler characteristic of the
    /// moduli component: `|χ|`, with the sign left open.
    pub fn degeneration(
        &mut self,
        flag: &FlagDescriptor,
        e: &ChernData,
        euler: EulerInput,
    ) -> Result<usize> {
        let threefold = classes::mukai_vector(flag.ring(), e)?.class;
        let restricted = classes::k3_mukai_vector(flag, e)?;
        let (chi, value) = match euler {
            EulerInput::Known(x) => (CdValue::known(x), CdValue::Known(BigInt::from(x).abs())),
            EulerInput::Named(n) => (CdValue::Named(n.clone()), CdValue::Named(n)),
        };
        self.insert(
            &format!("({}, S)", flag.ring().name()),
            LatticeVector::Flag {
                threefold,
                restricted,
            },
            value,
            Provenance::Degeneration {
                euler_characteristic: chi,
                sign: "±".into(),
            },
            false,
        )
    }

    /// Recomputes a closure entry's value from its parents.
    pub fn rederive(&self, id: usize) -> Result<CdValue> {
        let e = self.get(id)?;
        match e.provenance {
            Provenance::Closure { parents: (a, b) } => {
                Ok(self.get(a)?.value.product(&self.get(b)?.value))
            }
            _ => Ok(e.value.clone()),
        }
    }

    /// Checks every closure entry against its parents.
    pub fn verify(&self) -> Result<()> {
        for e in &self.entries {
            let derived = self.rederive(e.id)?;
            if derived != e.value {
                return Err(Error::RegistryConflict {
                    key: format!("entry {}", e.id),
                    existing: e.value.to_string(),
                    new: derived.to_string(),
                });
            }
        }
        Ok(())
    }

    /// A concrete member `α_m(T_L^k(m'))` of a closure family, using the
    /// topological pairing for the reflection.
    pub fn family_member(&self, ring: &ThreefoldRing, id: usize, k: i64) -> Result<GradedClass> {
        let LatticeVector::Family(f) = &self.get(id)?.vector else {
            return Err(Error::UnknownEntry(id));
        };
        let class_of = |i: usize| -> Result<GradedClass> {
            match &self.get(i)?.vector {
                LatticeVector::Threefold(c) => Ok(c.clone()),
                LatticeVector::Flag { threefold, .. } => Ok(threefold.clone()),
                LatticeVector::Family(_) => self.family_member(ring, i, k),
            }
        };
        let m = class_of(f.reflect_by)?;
        let mp = twist_t(ring, &class_of(f.twist_of)?, &f.twist_class, k)?;
        reflect_alpha(ring, &m, &mp, ReflectionMode::Chi)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let reg: Self = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        for (i, e) in reg.entries.iter().enumerate() {
            if e.id != i {
                return Err(Error::Parse(format!("entry at position {i} has id {}", e.id)));
            }
        }
        reg.verify()?;
        Ok(reg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    /// Largest absolute known value, if any.
    pub fn max_known(&self) -> Option<BigInt> {
        self.entries
            .iter()
            .filter_map(|e| e.value.as_known())
            .map(|v| v.abs())
            .max()
    }
}

impl CdValue {
    pub fn is_one(&self) -> bool {
        matches!(self, CdValue::Known(v) if v.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qvec;

    fn instanton() -> ChernData {
        ChernData::from_ints(2, &[0], &[1], 0).unwrap()
    }

    #[test]
    fn seeds_on_quintic() {
        let r = ThreefoldRing::quintic();
        let mut reg = CdRegistry::new();
        let l = reg.seed(&r, SeedKind::LineBundle(&qvec(&[1]))).unwrap();
        assert!(reg.get(l).unwrap().value.is_one());
        let p = reg.seed(&r, SeedKind::Skyscraper).unwrap();
        assert_eq!(reg.get(p).unwrap().value, CdValue::known(-200));
        // reseeding is idempotent
        assert_eq!(reg.seed(&r, SeedKind::Skyscraper).unwrap(), p);
    }

    #[test]
    fn conflicting_duplicate_is_rejected() {
        let r = ThreefoldRing::quintic();
        let mut reg = CdRegistry::new();
        reg.seed(&r, SeedKind::Skyscraper).unwrap();
        let err = reg
            .insert(
                "quintic",
                LatticeVector::Threefold(GradedClass::point(1)),
                CdValue::known(3),
                Provenance::SkyscraperRule,
                false,
            )
            .unwrap_err();
        assert!(matches!(err, Error::RegistryConflict { .. }));
    }

    #[test]
    fn example_one_degeneration() {
        let f = FlagDescriptor::cp3_quartic();
        let mut reg = CdRegistry::new();
        let id = reg.degeneration(&f, &instanton(), EulerInput::Known(6)).unwrap();
        let e = reg.get(id).unwrap();
        assert_eq!(e.value, CdValue::known(6));
        match &e.vector {
            LatticeVector::Flag { restricted, .. } => {
                assert_eq!(restricted, &K3Vector::from_ints(2, &[0], -2))
            }
            other => panic!("unexpected {other:?}"),
        }
        let point = reg
            .degeneration(&f, &ChernData::trivial(1, 1), EulerInput::Known(1))
            .unwrap();
        assert!(reg.get(point).unwrap().value.is_one());
        let neg = reg
            .degeneration(&f, &ChernData::line_bundle(qvec(&[1])), EulerInput::Known(-4))
            .unwrap();
        assert_eq!(reg.get(neg).unwrap().value, CdValue::known(4));
    }

    #[test]
    fn named_degeneration_value() {
        let f = FlagDescriptor::cp3_quartic();
        let mut reg = CdRegistry::new();
        let c2_3 = ChernData::from_ints(2, &[0], &[3], 0).unwrap();
        let id = reg
            .degeneration(&f, &c2_3, EulerInput::Named("χ(MI_3) + χ(M_3)".into()))
            .unwrap();
        assert_eq!(reg.get(id).unwrap().value, CdValue::Named("χ(MI_3) + χ(M_3)".into()));
    }

    #[test]
    fn closure_products_grow() {
        let f = FlagDescriptor::cp3_quartic();
        let mut reg = CdRegistry::new();
        let a = reg.degeneration(&f, &instanton(), EulerInput::Known(6)).unwrap();
        let l = reg
            .seed(f.ring(), SeedKind::LineBundle(&qvec(&[1])))
            .unwrap();
        assert!(matches!(reg.closure(a, a, &qvec(&[1])), Err(Error::NotExceptional(_))));
        reg.mark_exceptional(a).unwrap();
        let with_line = reg.closure(a, l, &qvec(&[1])).unwrap();
        assert_eq!(reg.get(with_line).unwrap().value, CdValue::known(6));
        let c36 = reg.closure(a, a, &qvec(&[1])).unwrap();
        assert_eq!(reg.get(c36).unwrap().value, CdValue::known(36));
        let c216 = reg.closure(c36, a, &qvec(&[1])).unwrap();
        assert_eq!(reg.get(c216).unwrap().value, CdValue::known(216));
        reg.verify().unwrap();
        assert_eq!(reg.rederive(c216).unwrap(), CdValue::known(216));
        assert_eq!(reg.max_known(), Some(BigInt::from(216)));
    }

    #[test]
    fn json_round_trip() {
        let r = ThreefoldRing::quintic();
        let mut reg = CdRegistry::new();
        let l = reg.seed(&r, SeedKind::LineBundle(&qvec(&[1]))).unwrap();
        reg.seed(&r, SeedKind::Skyscraper).unwrap();
        reg.closure(l, l, &qvec(&[1])).unwrap();
        let back = CdRegistry::from_json(&reg.to_json()).unwrap();
        assert_eq!(back, reg);
    }

    #[test]
    fn tampered_closure_fails_verification() {
        let r = ThreefoldRing::quintic();
        let mut reg = CdRegistry::new();
        let l = reg.seed(&r, SeedKind::LineBundle(&qvec(&[1]))).unwrap();
        reg.closure(l, l, &qvec(&[1])).unwrap();
        let text = reg.to_json().replace("\"known\": \"1\"\n      },\n      \"provenance\": {\n        \"closure\"", "\"known\": \"7\"\n      },\n      \"provenance\": {\n        \"closure\"");
        assert!(CdRegistry::from_json(&text).is_err());
    }

    #[test]
    fn family_members_are_concrete() {
        let r = ThreefoldRing::quintic();
        let mut reg = CdRegistry::new();
        let o = reg.seed(&r, SeedKind::LineBundle(&qvec(&[0]))).unwrap();
        let fam = reg.closure(o, o, &qvec(&[1])).unwrap();
        let m = reg.family_member(&r, fam, 1).unwrap();
        let m_o = classes::sqrt_todd(&r);
        let m_o1 = twist_t(&r, &m_o, &qvec(&[1]), 1).unwrap();
        // χ(O, O(1)) = 5
        assert_eq!(m, &(-&m_o1) - &m_o.scale(&crate::q(5)));
    }
}
