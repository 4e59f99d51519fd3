use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{compile_search_engine, compile_wireless, random_instance, FeasibilityMode, RandomParams};
use super::{SearchEngineEnvSpec, WirelessEnvSpec};
use crate::mdp::{MdpFile, MdpInstance};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    #[serde(flatten)]
    pub params: RandomParams,
    pub feasibility: FeasibilityMode,
    #[serde(default)]
    pub seed: u64,
}

/// Environment description file, discriminated by a `type` field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EnvSpec {
    RawMdp(MdpFile),
    Wireless(WirelessEnvSpec),
    SearchEngine(SearchEngineEnvSpec),
    Random(RandomSpec),
}

impl EnvSpec {
    pub fn compile(&self) -> Result<MdpInstance> {
        match self {
            EnvSpec::RawMdp(file) => file.clone().into_instance(),
            EnvSpec::Wireless(spec) => compile_wireless(spec),
            EnvSpec::SearchEngine(spec) => compile_search_engine(spec),
            EnvSpec::Random(spec) => random_instance(&spec.params, spec.feasibility, spec.seed),
        }
    }

    /// Parses either a tagged environment spec or a bare instance document
    /// (no `type` field).
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("type").is_some() {
            Ok(serde_json::from_value(value)?)
        } else {
            Ok(EnvSpec::RawMdp(serde_json::from_value(value)?))
        }
    }
}

/// Loads and compiles any supported instance or environment file.
pub fn load_instance(path: impl AsRef<Path>) -> Result<MdpInstance> {
    EnvSpec::from_json(&std::fs::read_to_string(path)?)?.compile()
}
