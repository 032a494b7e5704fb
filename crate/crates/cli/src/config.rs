//! Experiment configuration files.
//!
//! A config holds a master seed and exactly one experiment table:
//!
//! ```toml
//! seed = 7
//!
//! [growth]
//! n = 100000
//! m = 1000
//! eps = 0.1
//! graphs = 100
//! vertices = 100
//! ```

use anyhow::{bail, Result};
use metricdim::discretization::DiscretizationParams;
use metricdim::embedding::EvidenceConfig;
use metricdim::geometry::NormedSpace;
use metricdim::graph::GrowthConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<EvidenceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discretization: Option<DiscretizationExperiment>,
}

/// Random `λ`-sparse tuples in `B(0, D)` pushed through the discretization
/// map with every runtime check enabled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationExperiment {
    pub n: usize,
    /// `lp:P`, for instance `lp:2` or `lp:inf`.
    pub norm: String,
    pub dim: usize,
    pub lambda: f64,
    pub big_d: f64,
    pub trials: usize,
    /// Scale multiplier; defaults to `2·300^d` outside relaxed mode.
    #[serde(default)]
    pub l: Option<f64>,
    #[serde(default)]
    pub c0: Option<f64>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub relaxed: bool,
}

impl DiscretizationExperiment {
    pub fn space(&self) -> Result<NormedSpace> {
        Ok(NormedSpace::parse(&self.norm, self.dim)?)
    }

    pub fn params(&self) -> Result<DiscretizationParams> {
        let mut p = if self.relaxed {
            let Some(l) = self.l else {
                bail!("discretization: relaxed mode needs an explicit l");
            };
            DiscretizationParams::relaxed(self.lambda, self.big_d, l)
        } else {
            let mut p = DiscretizationParams::strict(self.dim, self.lambda, self.big_d);
            if let Some(l) = self.l {
                p.l = l;
            }
            p
        };
        if let Some(c0) = self.c0 {
            p.c0 = c0;
        }
        if let Some(eps) = self.eps {
            p.eps = eps;
        }
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Growth,
    Evidence,
    Discretization,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Growth => "growth",
            Kind::Evidence => "evidence",
            Kind::Discretization => "discretization",
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn kind(&self) -> Result<Kind> {
        let kinds: Vec<Kind> = [
            self.growth.as_ref().map(|_| Kind::Growth),
            self.evidence.as_ref().map(|_| Kind::Evidence),
            self.discretization.as_ref().map(|_| Kind::Discretization),
        ]
        .into_iter()
        .flatten()
        .collect();
        match kinds.as_slice() {
            [k] => Ok(*k),
            [] => bail!("config needs one of the tables [growth], [evidence], [discretization]"),
            _ => bail!("config has more than one experiment table"),
        }
    }

    /// Checks every parameter against the owning module before any work.
    pub fn validate(&self) -> Result<()> {
        match self.kind()? {
            Kind::Growth => self.growth.as_ref().unwrap().validate()?,
            Kind::Evidence => self.evidence.as_ref().unwrap().validate()?,
            Kind::Discretization => {
                let d = self.discretization.as_ref().unwrap();
                let space = d.space()?;
                if !space.is_lp() {
                    bail!("discretization needs an lp norm");
                }
                if d.trials == 0 {
                    bail!("discretization: need trials >= 1");
                }
                d.params()?.validate(d.n, d.dim)?;
            }
        }
        Ok(())
    }

    /// Canonical serialization: JSON with fields in declaration order.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("configs serialize")
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn fingerprint(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GROWTH: &str = "seed = 3\n[growth]\nn = 1000\nm = 10\neps = 0.1\ngraphs = 2\nvertices = 5\n";

    #[test]
    fn round_trip_is_lossless() {
        let cfg = ExperimentConfig::parse(GROWTH).unwrap();
        let text = toml::to_string(&cfg).unwrap();
        let back = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.fingerprint(), cfg.fingerprint());
        assert_eq!(cfg.fingerprint().len(), 64);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::parse("seed = 1\n").is_err());
        assert!(ExperimentConfig::parse(&GROWTH.replace("m = 10", "m = 900")).is_err());
        assert!(ExperimentConfig::parse(&format!("{GROWTH}bogus = 1\n")).is_err());
        let both = format!(
            "{GROWTH}[evidence]\nn = 64\nbeta = 1.0\ndims = [2]\ngraphs = 1\niterations = 10\nrestarts = 1\n"
        );
        assert!(ExperimentConfig::parse(&both).is_err());
    }

    #[test]
    fn discretization_defaults_to_strict_constants() {
        let text = "seed = 1\n[discretization]\nn = 1000\nnorm = \"lp:2\"\ndim = 2\nlambda = 1.0\nbig_d = 1000.0\ntrials = 1\n";
        // L = 2·300² exceeds n^0.9, so the strict constants are rejected at n = 1000.
        let err = ExperimentConfig::parse(text).unwrap_err().to_string();
        assert!(err.contains("L"), "{err}");
        let relaxed = text.replace("trials = 1", "trials = 1\nrelaxed = true\nl = 16.0");
        ExperimentConfig::parse(&relaxed).unwrap();
    }
}
