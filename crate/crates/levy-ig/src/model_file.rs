//! JSON model files.
//!
//! ```json
//! { "family": "cts", "sigma": 0.0, "gamma": "martingale",
//!   "params": { "c": 1.0, "a": 0.5, "lambda_plus": 2.0, "lambda_minus": 3.0 } }
//! ```
//!
//! Per family `params` takes exactly:
//!
//! * `gts`: `c_plus`, `c_minus`, `a_plus`, `a_minus`, `lambda_plus`, `lambda_minus`;
//! * `cts`, `vg_reg`: `c`, `a`, `lambda_plus`, `lambda_minus`;
//! * `vg`: `c`, `lambda_plus`, `lambda_minus`;
//! * `generic`: nothing (no jumps), the `cts` keys, or the `gts` keys — a
//!   tempered-shaped density run through the quadrature-only code paths.
//!
//! `sigma` and `gamma` default to 0. Unknown keys are rejected.

use std::path::Path;

use levy_ig_core::levy::{GenericMeasure, LevyMeasure, LevyModel, TemperedSide};
use levy_ig_core::QuadratureConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Gts,
    Cts,
    Vg,
    VgReg,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Martingale {
    Martingale,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaSpec {
    Value(f64),
    Martingale(Martingale),
}

impl Default for GammaSpec {
    fn default() -> Self {
        GammaSpec::Value(0.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_plus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_plus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_plus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: FamilyName,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub gamma: GammaSpec,
    #[serde(default)]
    pub params: Params,
}

const GTS_KEYS: [&str; 6] = [
    "c_plus",
    "c_minus",
    "a_plus",
    "a_minus",
    "lambda_plus",
    "lambda_minus",
];
const CTS_KEYS: [&str; 4] = ["c", "a", "lambda_plus", "lambda_minus"];
const VG_KEYS: [&str; 3] = ["c", "lambda_plus", "lambda_minus"];

impl Params {
    fn get(&self, key: &str) -> Option<f64> {
        match key {
            "c_plus" => self.c_plus,
            "c_minus" => self.c_minus,
            "a_plus" => self.a_plus,
            "a_minus" => self.a_minus,
            "lambda_plus" => self.lambda_plus,
            "lambda_minus" => self.lambda_minus,
            "c" => self.c,
            "a" => self.a,
            _ => None,
        }
    }

    fn present(&self) -> Vec<&'static str> {
        [
            "c_plus",
            "c_minus",
            "a_plus",
            "a_minus",
            "lambda_plus",
            "lambda_minus",
            "c",
            "a",
        ]
        .into_iter()
        .filter(|k| self.get(k).is_some())
        .collect()
    }

    /// Values of exactly `keys`, in order; any other key present is an error.
    fn exactly<const N: usize>(&self, family: &str, keys: [&str; N]) -> Result<[f64; N]> {
        if let Some(extra) = self.present().into_iter().find(|k| !keys.contains(k)) {
            return Err(Error::Model(format!(
                "key `{extra}` does not apply to family `{family}`"
            )));
        }
        let mut out = [0.0; N];
        for (slot, key) in out.iter_mut().zip(keys) {
            *slot = self.get(key).ok_or_else(|| {
                Error::Model(format!("family `{family}` requires `params.{key}`"))
            })?;
        }
        Ok(out)
    }
}

impl ModelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Model(m) => Error::Model(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn measure(&self, cfg: &QuadratureConfig) -> Result<LevyMeasure> {
        let p = &self.params;
        let m = match self.family {
            FamilyName::Gts => {
                let [cp, cm, ap, am, lp, lm] = p.exactly("gts", GTS_KEYS)?;
                LevyMeasure::gts(TemperedSide::new(cp, ap, lp), TemperedSide::new(cm, am, lm))?
            }
            FamilyName::Cts => {
                let [c, a, lp, lm] = p.exactly("cts", CTS_KEYS)?;
                LevyMeasure::cts(c, a, lp, lm)?
            }
            FamilyName::VgReg => {
                let [c, a, lp, lm] = p.exactly("vg_reg", CTS_KEYS)?;
                LevyMeasure::vg_regularized(c, a, lp, lm)?
            }
            FamilyName::Vg => {
                let [c, lp, lm] = p.exactly("vg", VG_KEYS)?;
                LevyMeasure::vg(c, lp, lm)?
            }
            FamilyName::Generic => {
                let present = p.present();
                if present.is_empty() {
                    LevyMeasure::zero()
                } else if present.contains(&"c") || present.contains(&"a") {
                    let [c, a, lp, lm] = p.exactly("generic", CTS_KEYS)?;
                    let side = |l| TemperedSide::new(c, a, l);
                    LevyMeasure::Generic(GenericMeasure::tempered(side(lp), side(lm), cfg)?)
                } else {
                    let [cp, cm, ap, am, lp, lm] = p.exactly("generic", GTS_KEYS)?;
                    LevyMeasure::Generic(GenericMeasure::tempered(
                        TemperedSide::new(cp, ap, lp),
                        TemperedSide::new(cm, am, lm),
                        cfg,
                    )?)
                }
            }
        };
        Ok(m)
    }

    pub fn model(&self, cfg: &QuadratureConfig) -> Result<LevyModel> {
        let measure = self.measure(cfg)?;
        Ok(match self.gamma {
            GammaSpec::Value(g) => LevyModel::new(self.sigma, g, measure)?,
            GammaSpec::Martingale(_) => LevyModel::with_martingale_drift(self.sigma, measure, cfg)?,
        })
    }

    /// The same file with `λ±` replaced (named and tempered generic families).
    pub fn with_lambdas(&self, lambda_plus: f64, lambda_minus: f64) -> Self {
        let mut s = self.clone();
        s.params.lambda_plus = Some(lambda_plus);
        s.params.lambda_minus = Some(lambda_minus);
        s
    }
}

pub fn load_model(path: &Path, cfg: &QuadratureConfig) -> Result<LevyModel> {
    ModelSpec::load(path)?.model(cfg)
}
