//! Run configuration files.
//!
//! ```text
//! scenario = he3-chain
//!
//! [atom]
//! name = he3            # or file = path/to/atom, or the atom-file keys inline
//! detuning_ghz = -3.4
//!
//! [cavity]
//! kappa_hz = 1e8        # or kappa in rad/s; same for rabi / rabi_hz
//! n_ph = 4.33e7
//! rabi_hz = 4.26e3
//!
//! [ensemble]
//! n_atoms = 5e10
//! gamma_m = 3.92e6
//! gamma_f = 19.6        # or n_ground, giving gamma_f = gamma_m n_atoms / n_ground
//!
//! [dynamics]
//! t_end = 10            # in units of the measurement rate
//! seed = 0
//! ```
//!
//! Instead of `[atom]` + `[cavity]`, the couplings can be set directly with
//! `omega_v`, `epsilon` and `kappa` (rad/s) under `[dynamics]`.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use squeezekit_core::atomic::AtomSpec;
use squeezekit_core::params::{derive_two_mode, CavitySpec, ThreeModeParams, TwoModeParams};

use crate::atomfile::{atom_from_sections, read_atom, resolve_atom};
use crate::config::{Document, Section};
use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Couplings {
    Atom { atom: AtomSpec, detuning_ghz: f64, cavity: CavitySpec, n_atoms: f64 },
    Explicit { omega_v: f64, epsilon: f64, kappa: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dynamics {
    /// Atomic decoherence, rad/s.
    pub gamma: f64,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub n_traj: Option<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: Option<String>,
    pub output: Option<PathBuf>,
    pub couplings: Couplings,
    /// Gyromagnetic ratio, rad/s/G.
    pub gyro: Option<f64>,
    pub gamma_m: Option<f64>,
    pub gamma_f: Option<f64>,
    pub dynamics: Dynamics,
}

fn angular(s: &Section, rad: &str, hz: &str) -> Result<Option<f64>> {
    match (s.parse::<f64>(rad)?, s.parse::<f64>(hz)?) {
        (Some(_), Some(_)) => Err(s.error(s.get(hz).map_or(s.line, |e| e.line), format!("give {rad} or {hz}, not both"))),
        (Some(x), None) => Ok(Some(x)),
        (None, Some(x)) => Ok(Some(TAU * x)),
        (None, None) => Ok(None),
    }
}

fn read_atom_section(doc: &Document, s: &Section) -> Result<AtomSpec> {
    let extra = ["detuning_ghz", "gyro", "gyro_hz", "file"];
    if s.get("nuclear_spin").is_some() {
        if s.get("file").is_some() {
            return Err(s.error(s.line, "inline atom data and file are exclusive"));
        }
        return atom_from_sections(s, &extra, doc.sections_named("atom.line"));
    }
    let keys: Vec<&str> = extra.iter().copied().chain(["name"]).collect();
    s.check_keys(&keys)?;
    if doc.sections_named("atom.line").next().is_some() {
        return Err(s.error(s.line, "[atom.line] needs the inline atom keys"));
    }
    match s.str("file") {
        Some(f) => {
            if s.get("name").is_some() {
                return Err(s.error(s.line, "give name or file, not both"));
            }
            // relative to the config file
            let p = doc.path.parent().map_or_else(|| PathBuf::from(f), |d| d.join(f));
            read_atom(&p)
        }
        None => resolve_atom(s.str("name"), None),
    }
}

impl RunConfig {
    pub fn read(path: &Path) -> Result<Self> {
        Self::from_document(&Document::read(path)?)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        Self::from_document(&Document::parse(text, path)?)
    }

    pub fn from_document(doc: &Document) -> Result<Self> {
        doc.check_sections(&["atom", "atom.line", "cavity", "ensemble", "dynamics"])?;
        doc.root.check_keys(&["scenario", "output"])?;
        let empty = Section { name: String::new(), line: 0, path: doc.path.clone(), entries: Vec::new() };
        let atom_s = doc.section("atom")?;
        let cav_s = doc.section("cavity")?;
        let ens = doc.section("ensemble")?.unwrap_or(&empty);
        let dyn_s = doc.section("dynamics")?.unwrap_or(&empty);
        ens.check_keys(&["n_atoms", "n_ground", "gamma_m", "gamma_f"])?;
        dyn_s.check_keys(&["epsilon", "omega_v", "kappa", "gamma", "t_end", "dt", "n_traj", "seed"])?;

        let explicit = dyn_s.get("epsilon").is_some() || dyn_s.get("omega_v").is_some();
        let couplings = match (atom_s, explicit) {
            (Some(_), true) => {
                return Err(CliError::config("give either [atom] or dynamics epsilon/omega_v, not both"));
            }
            (None, false) => return Err(CliError::config("no couplings: add an [atom] section or dynamics epsilon/omega_v")),
            (Some(a), false) => {
                let atom = read_atom_section(doc, a)?;
                let c = cav_s.ok_or_else(|| CliError::config("[atom] needs a [cavity] section"))?;
                c.check_keys(&["kappa", "kappa_hz", "n_ph", "rabi", "rabi_hz"])?;
                if dyn_s.get("kappa").is_some() {
                    return Err(dyn_s.error(dyn_s.line, "kappa belongs in [cavity] when [atom] sets the couplings"));
                }
                let cavity = CavitySpec {
                    kappa: angular(c, "kappa", "kappa_hz")?.ok_or_else(|| c.error(c.line, "missing kappa"))?,
                    n_ph: c.require("n_ph")?,
                    rabi: angular(c, "rabi", "rabi_hz")?.ok_or_else(|| c.error(c.line, "missing rabi"))?,
                };
                Couplings::Atom { atom, detuning_ghz: a.require("detuning_ghz")?, cavity, n_atoms: ens.require("n_atoms")? }
            }
            (None, true) => {
                let kappa = match (dyn_s.parse::<f64>("kappa")?, cav_s) {
                    (Some(k), _) => k,
                    (None, Some(c)) => {
                        c.check_keys(&["kappa", "kappa_hz"])?;
                        angular(c, "kappa", "kappa_hz")?.ok_or_else(|| c.error(c.line, "missing kappa"))?
                    }
                    (None, None) => return Err(dyn_s.error(dyn_s.line, "missing key 'kappa' in [dynamics]")),
                };
                Couplings::Explicit { omega_v: dyn_s.require("omega_v")?, epsilon: dyn_s.require("epsilon")?, kappa }
            }
        };

        let gyro = match atom_s {
            Some(a) => angular(a, "gyro", "gyro_hz")?,
            None => None,
        };
        let gamma_m = ens.parse::<f64>("gamma_m")?;
        let gamma_f = match (ens.parse::<f64>("gamma_f")?, ens.parse::<f64>("n_ground")?) {
            (Some(_), Some(_)) => return Err(ens.error(ens.line, "give gamma_f or n_ground, not both")),
            (Some(g), None) => Some(g),
            (None, Some(ng)) => {
                let gm = gamma_m.ok_or_else(|| ens.error(ens.line, "n_ground needs gamma_m"))?;
                let n: f64 = ens.require("n_atoms")?;
                Some(gm * n / ng)
            }
            (None, None) => None,
        };
        let dynamics = Dynamics {
            gamma: dyn_s.parse("gamma")?.unwrap_or(0.0),
            t_end: dyn_s.parse("t_end")?,
            dt: dyn_s.parse("dt")?,
            n_traj: dyn_s.parse("n_traj")?,
            seed: dyn_s.parse("seed")?.unwrap_or(0),
        };
        Ok(RunConfig {
            scenario: doc.root.parse("scenario")?,
            output: doc.root.parse("output")?,
            couplings,
            gyro,
            gamma_m,
            gamma_f,
            dynamics,
        })
    }

    pub fn two_mode(&self) -> Result<TwoModeParams> {
        let p = match &self.couplings {
            Couplings::Atom { atom, detuning_ghz, cavity, n_atoms } => {
                derive_two_mode(atom, cavity, *n_atoms, *detuning_ghz, self.dynamics.gamma)?
            }
            Couplings::Explicit { omega_v, epsilon, kappa } => {
                TwoModeParams::new(*omega_v, *epsilon, *kappa, self.dynamics.gamma)?
            }
        };
        Ok(p)
    }

    pub fn three_mode(&self) -> Result<ThreeModeParams> {
        let (gm, gf) = match (self.gamma_m, self.gamma_f) {
            (Some(m), Some(f)) => (m, f),
            _ => return Err(CliError::config("three-mode runs need [ensemble] gamma_m and gamma_f (or n_ground)")),
        };
        let two = self.two_mode()?;
        Ok(ThreeModeParams::new(gm, gf, two.kappa, two.omega_v, two.epsilon)?)
    }
}
