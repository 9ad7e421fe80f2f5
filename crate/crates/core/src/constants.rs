//! Fixed literature values that cannot be recomputed here, plus named
//! quantities that are still open.

use num_bigint::BigInt;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum ConstantValue {
    Known {
        #[serde(serialize_with = "ser_big")]
        value: BigInt,
    },
    Open,
}

fn ser_big<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constant {
    pub key: &'static str,
    pub description: &'static str,
    #[serde(flatten)]
    pub value: ConstantValue,
    pub citation: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Note {
    pub key: &'static str,
    pub text: &'static str,
}

/// Read-only table; there is no mutating API.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstantsRegistry {
    constants: Vec<Constant>,
    notes: Vec<Note>,
}

fn known(v: &str) -> ConstantValue {
    ConstantValue::Known {
        value: v.parse().expect("literal constant"),
    }
}

impl ConstantsRegistry {
    pub fn builtin() -> Self {
        let constants = vec![
            Constant {
                key: "quintic.lines",
                description: "lines on a generic quintic threefold, R(1)",
                value: known("2875"),
                citation: "H. Schubert, Kalkül der abzählenden Geometrie (1879); recomputed by `schubert lines-quintic`",
            },
            Constant {
                key: "quintic.rational-curves.degree-5",
                description: "rational curves of degree 5 on a generic quintic, R(5)",
                value: known("229305888887625"),
                citation: "P. Candelas, X. de la Ossa, P. Green, L. Parkes, Nucl. Phys. B 359 (1991) 21-74",
            },
            Constant {
                key: "quintic.max-nodes",
                description: "nodes on the Barth-Nieto-van Straten quintic",
                value: known("130"),
                citation: "D. van Straten, A quintic hypersurface in P^4 with 130 nodes, Topology 32 (1993) 857-864",
            },
            Constant {
                key: "quintic.rational-curves.degree-10",
                description: "enumerative count of degree-10 rational curves on a generic quintic",
                value: ConstantValue::Open,
                citation: "open",
            },
            Constant {
                key: "cp3.instantons.c2-3",
                description: "χ(MI_3) + χ(M_3), Euler characteristics of the c2 = 3 instanton component and its companion",
                value: ConstantValue::Open,
                citation: "open; a torus fixed-point computation is expected to settle it",
            },
            Constant {
                key: "k3.hilb6.conic-cubic",
                description: "intersection number of the conic and cubic Lagrangian families in Hilb^6(S)",
                value: ConstantValue::Open,
                citation: "open",
            },
        ];
        let notes = vec![
            Note {
                key: "atiyah-rees.instanton-parity",
                text: "the Atiyah-Rees invariant of an instanton bundle vanishes; only this parity statement is recorded",
            },
            Note {
                key: "quintic.rank-2-rigidity",
                text: "conjecturally, stable rank 2 bundles on a generic quintic are rigid",
            },
        ];
        Self { constants, notes }
    }

    pub fn constants(&self) -> &[Constant] {
        &self.constants
    }

    pub fn notes(&self) -> &[Note] {
        &self.notes
    }

    pub fn get(&self, key: &str) -> Option<&Constant> {
        self.constants.iter().find(|c| c.key == key)
    }

    pub fn value(&self, key: &str) -> Option<&BigInt> {
        match &self.get(key)?.value {
            ConstantValue::Known { value } => Some(value),
            ConstantValue::Open => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_values() {
        let c = ConstantsRegistry::builtin();
        assert_eq!(c.value("quintic.lines"), Some(&BigInt::from(2875)));
        assert_eq!(
            c.value("quintic.rational-curves.degree-5").unwrap().to_string(),
            "229305888887625"
        );
        assert_eq!(c.value("quintic.max-nodes"), Some(&BigInt::from(130)));
        assert!(c.get("quintic.rational-curves.degree-10").is_some());
        assert_eq!(c.value("quintic.rational-curves.degree-10"), None);
        assert!(c.constants().iter().all(|k| !k.citation.is_empty()));
        assert_eq!(c.notes().len(), 2);
    }

    #[test]
    fn keys_are_unique() {
        let c = ConstantsRegistry::builtin();
        let mut keys: Vec<_> = c.constants().iter().map(|k| k.key).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), c.constants().len());
    }
}
