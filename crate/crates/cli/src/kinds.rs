use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    EntangledConvergence,
    Zaz,
    OracleEquivalence,
    DiagVector,
    DiagOperator,
    Triple,
    GeneralExponent,
    LemmaChecks,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KindInfo {
    pub kind: Kind,
    pub description: &'static str,
    pub verifies: &'static str,
}

pub const KINDS: [KindInfo; 8] = [
    KindInfo {
        kind: Kind::EntangledConvergence,
        description: "strong convergence of entangled Cesaro means to the spectral limit operator on probes",
        verifies: "entangled ergodic theorem for almost periodic unitaries; mean ergodic theorem baseline",
    },
    KindInfo {
        kind: Kind::Zaz,
        description: "reduction identity for entangled limits, checked on every eigenvector of U",
        verifies: "reduction identity for entangled limits",
    },
    KindInfo {
        kind: Kind::OracleEquivalence,
        description: "time-domain multiple Cesaro mean against its spectral expansion on random instances",
        verifies: "spectral expansion of the multiple Cesaro mean",
    },
    KindInfo {
        kind: Kind::DiagVector,
        description: "diagonal Cesaro vector (1/N) sum U^{n m1} A U^{n(m2-m1)} B Omega against V(A Omega x B Omega)",
        verifies: "partial isometry limit of diagonal averages; eigenspace structure of ergodic systems",
    },
    KindInfo {
        kind: Kind::DiagOperator,
        description: "strong operator convergence of (1/N) sum U^{n m1} A U^{n(m2-m1)} on random probes",
        verifies: "strong convergence of diagonal operator averages",
    },
    KindInfo {
        kind: Kind::Triple,
        description: "triple correlations (1/N) sum omega(A0 a^{n m1}(A1) a^{n m2}(A2)) against their V-formula limit",
        verifies: "multiple correlations along diagonal averages",
    },
    KindInfo {
        kind: Kind::GeneralExponent,
        description:
            "scalar averages (1/N) sum <A U^{n(m2-m1)} B Omega, Omega> against the roots-of-unity spectral sum",
        verifies: "general exponent averages; weakly mixing limit",
    },
    KindInfo {
        kind: Kind::LemmaChecks,
        description:
            "operator-convexity bound on random batches and the double-average defect bound on random sequences",
        verifies: "operator-convexity bound; double-average defect bound",
    },
];

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::EntangledConvergence => "entangled_convergence",
            Kind::Zaz => "zaz",
            Kind::OracleEquivalence => "oracle_equivalence",
            Kind::DiagVector => "diag_vector",
            Kind::DiagOperator => "diag_operator",
            Kind::Triple => "triple",
            Kind::GeneralExponent => "general_exponent",
            Kind::LemmaChecks => "lemma_checks",
        }
    }

    pub fn info(self) -> &'static KindInfo {
        KINDS.iter().find(|k| k.kind == self).expect("every kind is listed")
    }

    pub fn from_name(name: &str) -> Option<Self> {
        KINDS.iter().map(|k| k.kind).find(|k| k.name() == name)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The `list` table.
pub fn kinds_table() -> String {
    let width = KINDS.iter().map(|k| k.kind.name().len()).max().unwrap_or(0);
    let mut out = String::new();
    for info in &KINDS {
        out.push_str(&format!(
            "{:width$}  {}\n{:width$}  verifies: {}\n",
            info.kind.name(),
            info.description,
            "",
            info.verifies
        ));
    }
    out
}

pub fn kinds_json() -> String {
    serde_json::to_string_pretty(&KINDS.to_vec()).expect("kinds serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip_through_serde() {
        for info in &KINDS {
            let json = serde_json::to_string(&info.kind).unwrap();
            assert_eq!(json, format!("\"{}\"", info.kind.name()));
            assert_eq!(Kind::from_name(info.kind.name()), Some(info.kind));
        }
    }

    #[test]
    fn table_lists_all_kinds() {
        let table = kinds_table();
        assert_eq!(KINDS.len(), 8);
        for info in &KINDS {
            assert!(table.contains(info.kind.name()));
        }
        let parsed: serde_json::Value = serde_json::from_str(&kinds_json()).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 8);
    }
}
