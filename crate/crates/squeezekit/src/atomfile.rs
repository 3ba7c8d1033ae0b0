//! Atom level data files.
//!
//! ```text
//! name = yb173
//! nuclear_spin = 5/2
//! j = 0
//! f = 5/2
//! lambda_nm = 556
//! gamma_sp_hz = 182e3
//!
//! [line]
//! j_prime = 1
//! f_prime = 3/2
//! offset_ghz = 4.762926
//! ```

use std::fmt::Write;
use std::path::Path;

use squeezekit_core::atomic::{builtin, AtomSpec, ExcitedLine, HalfInt};
use std::f64::consts::TAU as TWO_PI;

use crate::config::{Document, Section};
use crate::error::{CliError, Result};

pub const ATOM_KEYS: [&str; 6] = ["name", "nuclear_spin", "j", "f", "lambda_nm", "gamma_sp_hz"];
const LINE_KEYS: [&str; 3] = ["j_prime", "f_prime", "offset_ghz"];

/// Builds an atom from its scalar keys and one section per excited line.
pub fn atom_from_sections<'a>(
    fields: &Section,
    extra_keys: &[&str],
    lines: impl Iterator<Item = &'a Section>,
) -> Result<AtomSpec> {
    let allowed: Vec<&str> = ATOM_KEYS.iter().chain(extra_keys).copied().collect();
    fields.check_keys(&allowed)?;
    let lambda_nm: f64 = fields.require("lambda_nm")?;
    let gamma_sp_hz: f64 = fields.require("gamma_sp_hz")?;
    let mut atom = AtomSpec {
        name: fields.require("name")?,
        i: fields.require::<HalfInt>("nuclear_spin")?,
        j: fields.require("j")?,
        f: fields.require("f")?,
        lambda_m: lambda_nm * 1e-9,
        gamma_sp: TWO_PI * gamma_sp_hz,
        lines: Vec::new(),
    };
    for s in lines {
        s.check_keys(&LINE_KEYS)?;
        atom.lines.push(ExcitedLine {
            j_prime: s.require("j_prime")?,
            f_prime: s.require("f_prime")?,
            offset_ghz: s.require("offset_ghz")?,
        });
    }
    atom.validate().map_err(|e| fields.error(fields.line, format!("invalid atom '{}': {e}", atom.name)))?;
    Ok(atom)
}

pub fn parse_atom(text: &str, path: &Path) -> Result<AtomSpec> {
    let doc = Document::parse(text, path)?;
    doc.check_sections(&["line"])?;
    atom_from_sections(&doc.root, &[], doc.sections_named("line"))
}

pub fn read_atom(path: &Path) -> Result<AtomSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    parse_atom(&text, path)
}

/// Built-in name or data file path.
pub fn resolve_atom(name: Option<&str>, file: Option<&Path>) -> Result<AtomSpec> {
    match (name, file) {
        (Some(n), None) => builtin::by_name(n).ok_or_else(|| {
            CliError::config(format!("unknown atom '{n}' (built-ins: {})", builtin::NAMES.join(", ")))
        }),
        (None, Some(p)) => read_atom(p),
        _ => Err(CliError::config("give exactly one of an atom name or an atom file")),
    }
}

pub fn to_atom_file(atom: &AtomSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "name = {}", atom.name);
    let _ = writeln!(s, "nuclear_spin = {}", atom.i);
    let _ = writeln!(s, "j = {}", atom.j);
    let _ = writeln!(s, "f = {}", atom.f);
    let _ = writeln!(s, "lambda_nm = {}", atom.lambda_m * 1e9);
    let _ = writeln!(s, "gamma_sp_hz = {}", atom.gamma_sp / TWO_PI);
    for l in &atom.lines {
        let _ = writeln!(s, "\n[line]\nj_prime = {}\nf_prime = {}\noffset_ghz = {}", l.j_prime, l.f_prime, l.offset_ghz);
    }
    s
}
