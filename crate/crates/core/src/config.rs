//! Flat `key = value` configuration.
//!
//! The file is a flat TOML document: strings are quoted, numbers and
//! booleans are bare, and `#` starts a comment. Every key is optional;
//! unknown keys are rejected. Values are applied on top of the defaults, and
//! command-line flags are applied on top of the file.
//!
//! | key | type | default |
//! | --- | --- | --- |
//! | `learning_rate` | decimal | 0.01 |
//! | `momentum` | decimal | 0.9 |
//! | `batch_size` | integer | 32 |
//! | `epochs` | integer | 60 |
//! | `per_class` | integer | 38 |
//! | `n_runs` | integer | 3 |
//! | `base_seed` | integer | 0 |
//! | `jobs` | integer | 1 |
//! | `freeze_conv` | boolean | true |
//! | `resample_subset` | boolean | true |
//! | `fc_init` | `"glorot"` \| `"same_as_conv"` | `"glorot"` |
//! | `hidden_activation` | `"relu"` \| `"identity"` | `"relu"` |
//! | `scale_to_unit_fanin` | boolean | false |
//! | `num_kernels` | integer | 64 |
//! | `lognormal_mu` | decimal | -0.702 |
//! | `lognormal_sigma2` | decimal | 0.9355 |
//! | `lognormal_sign_flip` | boolean | false |
//! | `cs_sigma_c` | decimal | 1.0 |
//! | `cs_sigma_s` | decimal | 2.5 |
//! | `cs_k` | decimal | 0.9·(cs_sigma_c/cs_sigma_s)² |
//! | `cs_epsilon` | decimal | 1e-8 |
//! | `datasets` | comma list | `"cifar10,mnist,svhn"` |
//! | `arms` | comma list | `"normal,lognormal,center-surround,fully-trained"` |
//! | `data_dir` | string | `$SYNAPTOGEN_DATA_DIR` or `"data"` |
//! | `svhn_format` | `"cifar"` \| `"idx"` | `"cifar"` |

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::Value;

use crate::experiment::ExperimentSpec;
use crate::model::{Architecture, Arm, FcInit, HiddenActivation, TrainConfig};
use crate::synapse_gen::{CenterSurroundParams, SynapseDistribution, LOGNORMAL_MU, LOGNORMAL_SIGMA2};

pub const DATA_DIR_ENV: &str = "SYNAPTOGEN_DATA_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config key `{key}` expects {expected}, got {found}")]
    TypeMismatch { key: String, expected: &'static str, found: String },
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("cannot parse config: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Mnist,
    Cifar10,
    Svhn,
}

impl DatasetKind {
    pub fn name(&self) -> &'static str {
        match self {
            DatasetKind::Mnist => "mnist",
            DatasetKind::Cifar10 => "cifar10",
            DatasetKind::Svhn => "svhn",
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            DatasetKind::Mnist => "MNIST",
            DatasetKind::Cifar10 => "CIFAR-10",
            DatasetKind::Svhn => "SVHN",
        }
    }
}

impl FromStr for DatasetKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mnist" => Ok(DatasetKind::Mnist),
            "cifar10" | "cifar-10" => Ok(DatasetKind::Cifar10),
            "svhn" => Ok(DatasetKind::Svhn),
            other => Err(format!("unknown dataset `{other}` (expected mnist, cifar10 or svhn)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArmKind {
    Normal,
    LogNormal,
    CenterSurround,
    FullyTrained,
}

impl FromStr for ArmKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" => Ok(ArmKind::Normal),
            "lognormal" | "log-normal" => Ok(ArmKind::LogNormal),
            "center-surround" | "centre-surround" | "center_surround" => Ok(ArmKind::CenterSurround),
            "fully-trained" | "fully_trained" | "trained" => Ok(ArmKind::FullyTrained),
            other => {
                Err(format!("unknown arm `{other}` (expected normal, lognormal, center-surround or fully-trained)"))
            }
        }
    }
}

/// Layout of the pre-converted SVHN files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SvhnFormat {
    /// `train.bin` / `test.bin` in 3073-byte CIFAR-10 records.
    Cifar,
    /// IDX image/label pairs (greyscale).
    Idx,
}

/// Every resolved setting, as echoed into run manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub per_class: usize,
    pub n_runs: usize,
    pub base_seed: u64,
    pub jobs: usize,
    pub freeze_conv: bool,
    pub resample_subset: bool,
    pub fc_init: FcInit,
    pub hidden_activation: HiddenActivation,
    pub scale_to_unit_fanin: bool,
    pub num_kernels: usize,
    pub lognormal_mu: f64,
    pub lognormal_sigma2: f64,
    pub lognormal_sign_flip: bool,
    pub cs_sigma_c: f64,
    pub cs_sigma_s: f64,
    /// `None` means `0.9·(cs_sigma_c/cs_sigma_s)²`.
    pub cs_k: Option<f64>,
    pub cs_epsilon: f64,
    pub datasets: Vec<DatasetKind>,
    pub arms: Vec<ArmKind>,
    pub data_dir: PathBuf,
    pub svhn_format: SvhnFormat,
}

impl Default for Settings {
    fn default() -> Self {
        let train = TrainConfig::default();
        let cs = CenterSurroundParams::default();
        Settings {
            learning_rate: train.learning_rate,
            momentum: train.momentum,
            batch_size: train.batch_size,
            epochs: train.epochs,
            per_class: crate::datasets::DEFAULT_PER_CLASS,
            n_runs: 3,
            base_seed: 0,
            jobs: 1,
            freeze_conv: train.freeze_conv,
            resample_subset: true,
            fc_init: train.fc_init,
            hidden_activation: train.hidden_activation,
            scale_to_unit_fanin: train.scale_to_unit_fanin,
            num_kernels: train.architecture.num_kernels,
            lognormal_mu: LOGNORMAL_MU,
            lognormal_sigma2: LOGNORMAL_SIGMA2,
            lognormal_sign_flip: false,
            cs_sigma_c: cs.sigma_c,
            cs_sigma_s: cs.sigma_s,
            cs_k: None,
            cs_epsilon: cs.epsilon,
            datasets: vec![DatasetKind::Cifar10, DatasetKind::Mnist, DatasetKind::Svhn],
            arms: vec![ArmKind::Normal, ArmKind::LogNormal, ArmKind::CenterSurround, ArmKind::FullyTrained],
            data_dir: PathBuf::from("data"),
            svhn_format: SvhnFormat::Cifar,
        }
    }
}

fn type_name(v: &Value) -> String {
    match v {
        Value::String(s) => format!("string {s:?}"),
        Value::Integer(i) => format!("integer {i}"),
        Value::Float(f) => format!("decimal {f}"),
        Value::Boolean(b) => format!("boolean {b}"),
        other => other.type_str().to_string(),
    }
}

fn mismatch(key: &str, expected: &'static str, v: &Value) -> ConfigError {
    ConfigError::TypeMismatch { key: key.to_string(), expected, found: type_name(v) }
}

fn decimal(key: &str, v: &Value) -> Result<f64, ConfigError> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(mismatch(key, "a decimal", v)),
    }
}

fn unsigned(key: &str, v: &Value) -> Result<u64, ConfigError> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(mismatch(key, "a non-negative integer", v)),
    }
}

fn boolean(key: &str, v: &Value) -> Result<bool, ConfigError> {
    v.as_bool().ok_or_else(|| mismatch(key, "a boolean", v))
}

fn string<'a>(key: &str, v: &'a Value) -> Result<&'a str, ConfigError> {
    v.as_str().ok_or_else(|| mismatch(key, "a string", v))
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue { key: key.to_string(), reason: reason.into() }
}

pub fn parse_list<T: FromStr<Err = String>>(key: &str, text: &str) -> Result<Vec<T>, ConfigError> {
    let items = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<T>().map_err(|e| invalid(key, e)))
        .collect::<Result<Vec<_>, _>>()?;
    if items.is_empty() {
        return Err(invalid(key, "list is empty"));
    }
    Ok(items)
}

impl Settings {
    /// Applies every `key = value` pair of a config file.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        for (key, value) in &table {
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Sets one key, checking its type.
    pub fn set(&mut self, key: &str, v: &Value) -> Result<(), ConfigError> {
        match key {
            "learning_rate" => self.learning_rate = decimal(key, v)?,
            "momentum" => self.momentum = decimal(key, v)?,
            "batch_size" => self.batch_size = unsigned(key, v)? as usize,
            "epochs" => self.epochs = unsigned(key, v)? as usize,
            "per_class" => self.per_class = unsigned(key, v)? as usize,
            "n_runs" => self.n_runs = unsigned(key, v)? as usize,
            "base_seed" => self.base_seed = unsigned(key, v)?,
            "jobs" => self.jobs = unsigned(key, v)? as usize,
            "freeze_conv" => self.freeze_conv = boolean(key, v)?,
            "resample_subset" => self.resample_subset = boolean(key, v)?,
            "scale_to_unit_fanin" => self.scale_to_unit_fanin = boolean(key, v)?,
            "fc_init" => {
                self.fc_init = match string(key, v)? {
                    "glorot" => FcInit::Glorot,
                    "same_as_conv" => FcInit::SameAsConv,
                    other => return Err(invalid(key, format!("`{other}`, expected glorot or same_as_conv"))),
                }
            }
            "hidden_activation" => {
                self.hidden_activation = match string(key, v)? {
                    "relu" => HiddenActivation::Relu,
                    "identity" => HiddenActivation::Identity,
                    other => return Err(invalid(key, format!("`{other}`, expected relu or identity"))),
                }
            }
            "num_kernels" => self.num_kernels = unsigned(key, v)? as usize,
            "lognormal_mu" => self.lognormal_mu = decimal(key, v)?,
            "lognormal_sigma2" => self.lognormal_sigma2 = decimal(key, v)?,
            "lognormal_sign_flip" => self.lognormal_sign_flip = boolean(key, v)?,
            "cs_sigma_c" => self.cs_sigma_c = decimal(key, v)?,
            "cs_sigma_s" => self.cs_sigma_s = decimal(key, v)?,
            "cs_k" => self.cs_k = Some(decimal(key, v)?),
            "cs_epsilon" => self.cs_epsilon = decimal(key, v)?,
            "datasets" => self.datasets = parse_list(key, string(key, v)?)?,
            "arms" => self.arms = parse_list(key, string(key, v)?)?,
            "data_dir" => self.data_dir = PathBuf::from(string(key, v)?),
            "svhn_format" => {
                self.svhn_format = match string(key, v)? {
                    "cifar" => SvhnFormat::Cifar,
                    "idx" => SvhnFormat::Idx,
                    other => return Err(invalid(key, format!("`{other}`, expected cifar or idx"))),
                }
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn center_surround(&self) -> CenterSurroundParams {
        let ratio = self.cs_sigma_c / self.cs_sigma_s;
        CenterSurroundParams {
            sigma_c: self.cs_sigma_c,
            sigma_s: self.cs_sigma_s,
            k: self.cs_k.unwrap_or(0.9 * ratio * ratio),
            epsilon: self.cs_epsilon,
        }
    }

    pub fn distribution(&self, kind: ArmKind) -> Option<SynapseDistribution> {
        match kind {
            ArmKind::Normal => Some(SynapseDistribution::Normal),
            ArmKind::LogNormal => Some(SynapseDistribution::LogNormal {
                mu: self.lognormal_mu,
                sigma2: self.lognormal_sigma2,
                sign_flip: self.lognormal_sign_flip,
            }),
            ArmKind::CenterSurround => Some(SynapseDistribution::CenterSurround(self.center_surround())),
            ArmKind::FullyTrained => None,
        }
    }

    pub fn arm(&self, kind: ArmKind) -> Arm {
        self.distribution(kind).map_or(Arm::FullyTrained, Arm::Sampled)
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            momentum: self.momentum,
            batch_size: self.batch_size,
            epochs: self.epochs,
            seed: self.base_seed,
            freeze_conv: self.freeze_conv,
            fc_init: self.fc_init,
            arm: Arm::FullyTrained,
            hidden_activation: self.hidden_activation,
            scale_to_unit_fanin: self.scale_to_unit_fanin,
            architecture: Architecture { num_kernels: self.num_kernels, ..Architecture::default() },
        }
    }

    pub fn experiment_spec(&self) -> ExperimentSpec {
        ExperimentSpec {
            base: self.train_config(),
            arms: self.arms.iter().map(|&k| self.arm(k)).collect(),
            n_runs: self.n_runs,
            base_seed: self.base_seed,
            per_class: self.per_class,
            resample_subset: self.resample_subset,
            jobs: self.jobs,
        }
    }

    /// Cross-field checks, reported against the offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("batch_size", self.batch_size),
            ("epochs", self.epochs),
            ("per_class", self.per_class),
            ("n_runs", self.n_runs),
            ("jobs", self.jobs),
            ("num_kernels", self.num_kernels),
        ];
        for (key, value) in positive {
            if value == 0 {
                return Err(invalid(key, "must be at least 1"));
            }
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(invalid("learning_rate", "must be finite and non-negative"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(invalid("momentum", "must lie in [0, 1)"));
        }
        if let Some(d) = self.distribution(ArmKind::LogNormal) {
            d.validate().map_err(|e| invalid("lognormal_sigma2", e.to_string()))?;
        }
        self.center_surround().validate().map_err(|e| invalid("cs_k", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_keeps_defaults() {
        let mut s = Settings::default();
        s.apply_text("").unwrap();
        assert_eq!(s, Settings::default());
        assert_eq!(s.train_config(), TrainConfig { arm: Arm::FullyTrained, ..TrainConfig::default() });
        assert_eq!(s.center_surround(), CenterSurroundParams::default());
    }

    #[test]
    fn file_values_apply() {
        let mut s = Settings::default();
        s.apply_text(
            "learning_rate = 0.05\nepochs = 10 # short\nfc_init = \"same_as_conv\"\narms = \"normal, lognormal\"",
        )
        .unwrap();
        assert_eq!(s.learning_rate, 0.05);
        assert_eq!(s.epochs, 10);
        assert_eq!(s.fc_init, FcInit::SameAsConv);
        assert_eq!(s.arms, vec![ArmKind::Normal, ArmKind::LogNormal]);
    }

    #[test]
    fn type_mismatch_names_key() {
        let err = Settings::default().apply_text("epochs = \"abc\"").unwrap_err();
        assert!(matches!(&err, ConfigError::TypeMismatch { key, .. } if key == "epochs"), "{err}");
        assert!(err.to_string().contains("epochs"));
    }

    #[test]
    fn unknown_key_rejected() {
        let err = Settings::default().apply_text("learning_rat = 0.1").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey(k) if k == "learning_rat"));
    }

    #[test]
    fn integer_accepted_for_decimal() {
        let mut s = Settings::default();
        s.apply_text("cs_sigma_s = 3").unwrap();
        assert_eq!(s.cs_sigma_s, 3.0);
        assert!((s.center_surround().k - 0.1).abs() < 1e-15);
    }

    #[test]
    fn surround_weight_bound_enforced() {
        let mut s = Settings::default();
        s.apply_text("cs_k = 0.5").unwrap();
        assert!(s.validate().is_err());
    }
}
