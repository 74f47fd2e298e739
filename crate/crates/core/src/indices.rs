//! Registry of vertex-degree-based (VDB) indices and their exponentials.
//!
//! An index is induced by numbers φ(i, j) over degree pairs i ≤ j; its value
//! on a tree is Σ m(i,j)·φ(i,j) and its exponential is Σ m(i,j)·e^φ(i,j),
//! where m(i,j) is the edge spectrum.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{edge_spectrum, EdgeSpectrum};
use crate::tree::Tree;
use crate::value::BigExpValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
#[allow(clippy::upper_case_acronyms)]
pub enum IndexName {
    M1,
    M2,
    Randic,
    H,
    GA,
    SC,
    ABC,
    AZ,
}

impl IndexName {
    pub const ALL: [IndexName; 8] = [
        IndexName::M1,
        IndexName::M2,
        IndexName::Randic,
        IndexName::H,
        IndexName::GA,
        IndexName::SC,
        IndexName::ABC,
        IndexName::AZ,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IndexName::M1 => "M1",
            IndexName::M2 => "M2",
            IndexName::Randic => "RANDIC",
            IndexName::H => "H",
            IndexName::GA => "GA",
            IndexName::SC => "SC",
            IndexName::ABC => "ABC",
            IndexName::AZ => "AZ",
        }
    }

    pub fn def(self) -> &'static IndexDef {
        &REGISTRY[self as usize]
    }
}

impl fmt::Display for IndexName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IndexName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IndexName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownIndex(s.to_owned()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ExponentKind {
    /// φ is integer valued; exponentials are kept exactly.
    Integer,
    /// φ is real valued; exponentials are kept in log space.
    Real,
}

pub struct IndexDef {
    pub name: IndexName,
    pub kind: ExponentKind,
    /// Human-readable φ(i, j).
    pub formula: &'static str,
    pub source: &'static str,
    phi: fn(f64, f64) -> f64,
}

impl fmt::Debug for IndexDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IndexDef")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("formula", &self.formula)
            .finish()
    }
}

const STANDARD: &str = "standard literature definition";

// Order must match `IndexName` discriminants.
static REGISTRY: [IndexDef; 8] = [
    IndexDef {
        name: IndexName::M1,
        kind: ExponentKind::Integer,
        formula: "i + j",
        source: "first Zagreb index",
        phi: |i, j| i + j,
    },
    IndexDef {
        name: IndexName::M2,
        kind: ExponentKind::Integer,
        formula: "i * j",
        source: "second Zagreb index",
        phi: |i, j| i * j,
    },
    IndexDef {
        name: IndexName::Randic,
        kind: ExponentKind::Real,
        formula: "1 / sqrt(i * j)",
        source: "Randić index",
        phi: |i, j| 1.0 / (i * j).sqrt(),
    },
    IndexDef {
        name: IndexName::H,
        kind: ExponentKind::Real,
        formula: "2 / (i + j)",
        source: STANDARD,
        phi: |i, j| 2.0 / (i + j),
    },
    IndexDef {
        name: IndexName::GA,
        kind: ExponentKind::Real,
        formula: "2 * sqrt(i * j) / (i + j)",
        source: STANDARD,
        phi: |i, j| 2.0 * (i * j).sqrt() / (i + j),
    },
    IndexDef {
        name: IndexName::SC,
        kind: ExponentKind::Real,
        formula: "1 / sqrt(i + j)",
        source: STANDARD,
        phi: |i, j| 1.0 / (i + j).sqrt(),
    },
    IndexDef {
        name: IndexName::ABC,
        kind: ExponentKind::Real,
        formula: "sqrt((i + j - 2) / (i * j))",
        source: STANDARD,
        phi: |i, j| ((i + j - 2.0) / (i * j)).sqrt(),
    },
    IndexDef {
        name: IndexName::AZ,
        kind: ExponentKind::Real,
        formula: "(i * j / (i + j - 2))^3",
        source: STANDARD,
        phi: |i, j| (i * j / (i + j - 2.0)).powi(3),
    },
];

impl IndexDef {
    pub fn all() -> &'static [IndexDef] {
        &REGISTRY
    }

    /// Case-insensitive lookup by name.
    pub fn by_name(name: &str) -> Result<&'static IndexDef> {
        Ok(name.parse::<IndexName>()?.def())
    }

    fn check(&self, i: u32, j: u32) -> Result<(u32, u32)> {
        let (lo, hi) = (i.min(j), i.max(j));
        if lo < 1 {
            return Err(Error::DegreeOutOfRange(i, j));
        }
        if matches!(self.name, IndexName::ABC | IndexName::AZ) && lo + hi == 2 {
            return Err(Error::DegreeOutOfRange(i, j));
        }
        Ok((lo, hi))
    }

    /// φ(i, j) as a real number.
    pub fn phi(&self, i: u32, j: u32) -> Result<f64> {
        let (i, j) = self.check(i, j)?;
        Ok((self.phi)(i as f64, j as f64))
    }

    /// φ(i, j) exactly, for integer-kind indices.
    pub fn phi_int(&self, i: u32, j: u32) -> Result<u64> {
        let (i, j) = self.check(i, j)?;
        match self.name {
            IndexName::M1 => Ok(i as u64 + j as u64),
            IndexName::M2 => Ok(i as u64 * j as u64),
            _ => Err(Error::KindMismatch),
        }
    }
}

pub fn phi_value(index: &IndexDef, i: u32, j: u32) -> Result<f64> {
    index.phi(i, j)
}

/// Plain (non-exponential) index value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VdbValue {
    Integer(u64),
    Real(f64),
}

impl VdbValue {
    pub fn as_f64(self) -> f64 {
        match self {
            VdbValue::Integer(v) => v as f64,
            VdbValue::Real(v) => v,
        }
    }
}

impl fmt::Display for VdbValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VdbValue::Integer(v) => write!(f, "{v}"),
            VdbValue::Real(v) => write!(f, "{v}"),
        }
    }
}

pub fn vdb_from_spectrum(spec: &EdgeSpectrum, index: &IndexDef) -> Result<VdbValue> {
    if spec.is_empty() {
        return Err(Error::EmptyTree);
    }
    match index.kind {
        ExponentKind::Integer => {
            let mut total = 0u64;
            for ((i, j), c) in spec.iter() {
                total += c * index.phi_int(i, j)?;
            }
            Ok(VdbValue::Integer(total))
        }
        ExponentKind::Real => {
            let mut total = 0.0;
            for ((i, j), c) in spec.iter() {
                total += c as f64 * index.phi(i, j)?;
            }
            Ok(VdbValue::Real(total))
        }
    }
}

pub fn vdb_index(t: &Tree, index: &IndexDef) -> Result<VdbValue> {
    vdb_from_spectrum(&edge_spectrum(t)?, index)
}

/// Σ m(i,j)·e^φ(i,j): exact for integer kinds, max-shifted log-sum-exp
/// otherwise.
pub fn exp_vdb_from_spectrum(spec: &EdgeSpectrum, index: &IndexDef) -> Result<BigExpValue> {
    if spec.is_empty() {
        return Err(Error::EmptyTree);
    }
    match index.kind {
        ExponentKind::Integer => {
            let mut terms = Vec::with_capacity(spec.len());
            for ((i, j), c) in spec.iter() {
                terms.push((index.phi_int(i, j)?, c as i64));
            }
            Ok(BigExpValue::exact(terms))
        }
        ExponentKind::Real => {
            // ln(c·e^φ) = ln c + φ
            let mut logs = Vec::with_capacity(spec.len());
            for ((i, j), c) in spec.iter() {
                logs.push((c as f64).ln() + index.phi(i, j)?);
            }
            let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let s: f64 = logs.iter().map(|l| (l - m).exp()).sum();
            Ok(BigExpValue::LogSpace(m + s.ln()))
        }
    }
}

pub fn exp_vdb_index(t: &Tree, index: &IndexDef) -> Result<BigExpValue> {
    exp_vdb_from_spectrum(&edge_spectrum(t)?, index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::ExpSum;

    fn tree(edges: &[(usize, usize)]) -> Tree {
        Tree::from_edges(edges).unwrap()
    }

    fn m2() -> &'static IndexDef {
        IndexName::M2.def()
    }

    #[test]
    fn registry_order_matches_names() {
        for (k, def) in IndexDef::all().iter().enumerate() {
            assert_eq!(def.name as usize, k);
            assert_eq!(IndexDef::by_name(def.name.as_str()).unwrap().name, def.name);
        }
        assert_eq!("randic".parse::<IndexName>().unwrap(), IndexName::Randic);
        assert!(matches!(
            "FOO".parse::<IndexName>(),
            Err(Error::UnknownIndex(_))
        ));
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_value(m2(), 3, 4).unwrap(), 12.0);
        assert_eq!(phi_value(IndexName::M1.def(), 1, 5).unwrap(), 6.0);
        assert_eq!(phi_value(IndexName::Randic.def(), 1, 4).unwrap(), 0.5);
        assert_eq!(phi_value(m2(), 0, 4), Err(Error::DegreeOutOfRange(0, 4)));
        assert!(phi_value(IndexName::ABC.def(), 1, 1).is_err());
        assert!(phi_value(IndexName::AZ.def(), 1, 1).is_err());
        assert_eq!(m2().phi_int(100, 10_000).unwrap(), 1_000_000);
    }

    #[test]
    fn registry_is_symmetric_and_positive() {
        for def in IndexDef::all() {
            for i in 1..30 {
                for j in i..30 {
                    if i + j == 2 && matches!(def.name, IndexName::ABC | IndexName::AZ) {
                        continue;
                    }
                    let a = def.phi(i, j).unwrap();
                    assert!(a > 0.0, "{} at ({i},{j})", def.name);
                    assert_eq!(a, def.phi(j, i).unwrap());
                }
            }
        }
    }

    #[test]
    fn m2_values() {
        let p4 = tree(&[(0, 1), (1, 2), (2, 3)]);
        let s5 = tree(&[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let s22 = tree(&[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)]);
        assert_eq!(vdb_index(&p4, m2()).unwrap(), VdbValue::Integer(8));
        assert_eq!(vdb_index(&s5, m2()).unwrap(), VdbValue::Integer(16));
        assert_eq!(vdb_index(&s22, m2()).unwrap(), VdbValue::Integer(21));
        assert_eq!(vdb_index(&tree(&[]), m2()), Err(Error::EmptyTree));
    }

    #[test]
    fn exp_m2_values() {
        let p4 = tree(&[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(
            exp_vdb_index(&p4, m2()).unwrap(),
            BigExpValue::exact([(2, 2), (4, 1)])
        );
        let s22 = tree(&[(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)]);
        assert_eq!(
            exp_vdb_index(&s22, m2()).unwrap(),
            BigExpValue::exact([(3, 4), (9, 1)])
        );
        let s12 = tree(&[(0, 1), (0, 2), (1, 3), (1, 4)]);
        assert_eq!(
            exp_vdb_index(&s12, m2()).unwrap(),
            BigExpValue::exact([(2, 1), (3, 2), (6, 1)])
        );
    }

    #[test]
    fn equal_exponents_merge() {
        // S7 under M2: six (1,6) edges, all e^6.
        let s7 = tree(&[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6)]);
        let v = exp_vdb_index(&s7, m2()).unwrap();
        assert_eq!(v.as_exact().unwrap(), &ExpSum::from_terms([(6, 6)]));
    }

    #[test]
    fn real_kind_is_log_sum_exp() {
        let p4 = tree(&[(0, 1), (1, 2), (2, 3)]);
        let r = IndexName::Randic.def();
        let direct = 2.0 * (1.0 / 2f64.sqrt()).exp() + 0.5f64.exp();
        match exp_vdb_index(&p4, r).unwrap() {
            BigExpValue::LogSpace(l) => assert!((l - direct.ln()).abs() < 1e-14),
            other => panic!("expected log-space value, got {other:?}"),
        }
    }
}
