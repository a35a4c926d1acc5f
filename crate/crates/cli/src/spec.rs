//! Measure specification files.
//!
//! ```json
//! {"kind": "atomic", "atoms": [{"t": -1.0, "w": 0.5}, {"t": 1.0, "w": 0.5}]}
//! {"kind": "arcsine"}
//! {"kind": "nu_r", "r": 1.0}
//! ```

use std::path::Path;

use serde::Deserialize;

use monoclt::{AtomicMeasure, MeasureSpec};

#[derive(Debug, Deserialize)]
struct Atom {
    t: f64,
    w: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SpecFile {
    Atomic { atoms: Vec<Atom> },
    Arcsine,
    NuR { r: f64 },
}

#[derive(Debug)]
pub enum SpecError {
    Io(std::io::Error),
    Parse(serde_json::Error),
    Invalid(monoclt::Error),
}

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpecError::Io(e) => write!(f, "cannot read spec: {e}"),
            SpecError::Parse(e) => write!(f, "malformed spec: {e}"),
            SpecError::Invalid(e) => write!(f, "invalid spec: {e}"),
        }
    }
}

pub fn parse(text: &str) -> Result<MeasureSpec<f64>, SpecError> {
    let file: SpecFile = serde_json::from_str(text).map_err(SpecError::Parse)?;
    match file {
        SpecFile::Atomic { atoms } => {
            let pairs: Vec<(f64, f64)> = atoms.iter().map(|a| (a.t, a.w)).collect();
            AtomicMeasure::new(&pairs)
                .map(MeasureSpec::Atomic)
                .map_err(SpecError::Invalid)
        }
        SpecFile::Arcsine => Ok(MeasureSpec::Arcsine),
        SpecFile::NuR { r } => MeasureSpec::nu_r(r).map_err(SpecError::Invalid),
    }
}

pub fn load(path: &Path) -> Result<MeasureSpec<f64>, SpecError> {
    parse(&std::fs::read_to_string(path).map_err(SpecError::Io)?)
}
