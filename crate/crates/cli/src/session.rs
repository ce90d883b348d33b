use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use galsym_core::{FieldTower, TowerDecl};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SESSION: &str = ".galsym-session.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputMode {
    #[default]
    Text,
    Json,
}

/// Persisted state shared by consecutive commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Session {
    pub tower: TowerDecl,
    pub generator_convention: String,
    #[serde(default)]
    pub output: OutputMode,
}

impl Session {
    pub fn new(tower: &FieldTower, output: OutputMode) -> Self {
        Self { tower: tower.decl(), generator_convention: tower.generator_convention(), output }
    }

    pub fn path(explicit: Option<&Path>) -> PathBuf {
        explicit
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_SESSION))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::session(format!("cannot read session {}: {e} (run `galsym tower new` first)", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::session(format!("malformed session {}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("session serializes");
        fs::write(path, text + "\n").map_err(|e| CliError::session(format!("cannot write {}: {e}", path.display())))
    }

    pub fn tower(&self) -> Result<Arc<FieldTower>, CliError> {
        Ok(Arc::new(FieldTower::from_decl(&self.tower)?))
    }
}
