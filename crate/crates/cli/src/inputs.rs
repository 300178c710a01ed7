use std::fs;
use std::path::Path;

use aitlab_core::bell::{Correlation, HiddenVariableModel};
use aitlab_core::mixture::{make_mixture, parse_family, MixtureState};
use aitlab_core::mtm::{library, MachineSpec};
use aitlab_core::{rational, BitString, Rational};

use crate::error::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

/// `builtin:NAME` for a library machine, otherwise a JSON machine file.
pub fn machine(source: &str) -> Result<MachineSpec, CliError> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return library::by_name(name).ok_or_else(|| {
            let known: Vec<_> = library::suite().iter().map(|m| m.name).collect();
            CliError::input(format!("unknown builtin machine {name:?} (known: {})", known.join(", ")))
        });
    }
    let text = read(Path::new(source))?;
    MachineSpec::from_json(&text).map_err(|e| CliError::input(format!("{source}: {e}")))
}

pub fn family(path: &Path) -> Result<MixtureState, CliError> {
    let members = parse_family(&read(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(make_mixture(members)?)
}

pub fn hvm(path: &Path) -> Result<HiddenVariableModel, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// A correlation file, or a JSON report whose result is one (as written by
/// `bell build` and `bell postselect`).
pub fn table(path: &Path) -> Result<Correlation, CliError> {
    let bad = |e: serde_json::Error| CliError::input(format!("{}: {e}", path.display()));
    let mut value: serde_json::Value = serde_json::from_str(&read(path)?).map_err(bad)?;
    if let Some(result) = value.get_mut("result") {
        value = result.take();
    }
    serde_json::from_value(value).map_err(bad)
}

pub fn bits(s: &str) -> Result<BitString, String> {
    if s == "ε" || s == "-" {
        return Ok(BitString::empty());
    }
    s.parse().map_err(|_| format!("{s:?} is not a bit string"))
}

pub fn rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}
