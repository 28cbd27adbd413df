//! The unspecified absolute constants, all defaulting to 1.
//!
//! `k1..k7` are the κ constants of the partial-coloring and isometry
//! statements, `c1..c4` the constants of the λ/Q schedule and the `a_n`
//! evaluator. Reports echo whichever set was used.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Constants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
    pub k6: f64,
    pub k7: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            k1: 1.0,
            k2: 1.0,
            k3: 1.0,
            k4: 1.0,
            k5: 1.0,
            k6: 1.0,
            k7: 1.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
        }
    }
}

impl Constants {
    /// Parses overrides of the form `k1=2,c3=0.5`.
    pub fn parse_overrides(&self, spec: &str) -> Result<Constants> {
        let mut out = *self;
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("constant override {part:?} lacks '='")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("constant {key}: {e}")))?;
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Domain(format!("constant {key} must be positive")));
            }
            *out.slot(key.trim())? = value;
        }
        Ok(out)
    }

    fn slot(&mut self, key: &str) -> Result<&mut f64> {
        Ok(match key {
            "k1" => &mut self.k1,
            "k2" => &mut self.k2,
            "k3" => &mut self.k3,
            "k4" => &mut self.k4,
            "k5" => &mut self.k5,
            "k6" => &mut self.k6,
            "k7" => &mut self.k7,
            "c1" => &mut self.c1,
            "c2" => &mut self.c2,
            "c3" => &mut self.c3,
            "c4" => &mut self.c4,
            other => return Err(Error::Parse(format!("unknown constant {other:?}"))),
        })
    }

    pub fn as_map(&self) -> BTreeMap<&'static str, f64> {
        BTreeMap::from([
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("k4", self.k4),
            ("k5", self.k5),
            ("k6", self.k6),
            ("k7", self.k7),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("c4", self.c4),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let c = Constants::default().parse_overrides("k1=2, c4=0.5").unwrap();
        assert_eq!(c.k1, 2.0);
        assert_eq!(c.c4, 0.5);
        assert_eq!(c.k2, 1.0);
        assert!(Constants::default().parse_overrides("k9=1").is_err());
        assert!(Constants::default().parse_overrides("k1=-1").is_err());
    }
}
