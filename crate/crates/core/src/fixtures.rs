//! Golden reference values, embedded at build time.

use serde::Deserialize;

use crate::error::{Error, Result};

pub const GOLDEN_TOML: &str = include_str!("../fixtures/golden.toml");

#[derive(Clone, Debug, Deserialize)]
pub struct Golden {
    /// `r_1..=r_20`.
    pub rk: Vec<u64>,
    pub delta: DeltaRows,
    pub expansion: ExpansionFixtures,
}

#[derive(Clone, Debug, Deserialize)]
pub struct DeltaRows {
    pub j1: Vec<i64>,
    pub j2: Vec<i64>,
    pub j3: Vec<i64>,
}

impl DeltaRows {
    pub fn rows(&self) -> [(u32, &[i64]); 3] {
        [(1, &self.j1), (2, &self.j2), (3, &self.j3)]
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct ExpansionFixtures {
    pub j4: Vec<i64>,
    pub stable: Vec<i64>,
    pub stable_j_from: u32,
    pub stable_j_to: u32,
    pub j1: SingleCoefficient,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SingleCoefficient {
    pub k: usize,
    pub value: i64,
}

impl Golden {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad fixture file: {e}")))
    }

    /// The embedded copy.
    pub fn embedded() -> Self {
        Self::parse(GOLDEN_TOML).expect("embedded fixtures parse")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_parses() {
        let g = Golden::embedded();
        assert_eq!(g.rk.len(), 20);
        assert_eq!(g.rk[0], 3);
        assert_eq!(g.rk[19], 341649);
        assert!(g.delta.rows().iter().all(|(_, r)| r.len() == 10));
        assert_eq!(g.expansion.j1.value, 2);
    }

    #[test]
    fn malformed_is_an_error() {
        assert!(Golden::parse("rk = 3").is_err());
    }
}
