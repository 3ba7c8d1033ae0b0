use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use squeezekit::atomfile::{parse_atom, read_atom, to_atom_file};
use squeezekit::config::Document;
use squeezekit::runconfig::{Couplings, RunConfig};
use squeezekit::CliError;
use squeezekit_core::atomic::{builtin, AtomSpec};
use squeezekit_core::params::{derive_two_mode, CavitySpec};

fn data(p: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(p)
}

fn parse_line(e: CliError) -> usize {
    match e {
        CliError::Parse { line, .. } => line,
        other => panic!("expected a parse error, got {other}"),
    }
}

#[test]
fn document_sections_and_comments() {
    let text = "top = 1 # trailing\n\n[a]\nx = \"quoted value\"\n# whole line\n[b]\ny=2\n[b]\ny = 3\n";
    let d = Document::parse(text, Path::new("t.conf")).unwrap();
    assert_eq!(d.root.str("top"), Some("1"));
    assert_eq!(d.section("a").unwrap().unwrap().str("x"), Some("quoted value"));
    assert_eq!(d.sections_named("b").count(), 2);
    assert_eq!(parse_line(d.section("b").unwrap_err()), 8);
    assert!(d.section("zzz").unwrap().is_none());
}

#[test]
fn document_errors_carry_line_numbers() {
    let p = Path::new("t.conf");
    assert_eq!(parse_line(Document::parse("a = 1\n\na = 2\n", p).unwrap_err()), 3);
    assert_eq!(parse_line(Document::parse("[ok]\nno equals sign\n", p).unwrap_err()), 2);
    assert_eq!(parse_line(Document::parse("[bad header\n", p).unwrap_err()), 1);
    assert_eq!(parse_line(Document::parse("bad key = 1\n", p).unwrap_err()), 1);
    let d = Document::parse("[s]\nx = abc\n", p).unwrap();
    let s = d.section("s").unwrap().unwrap();
    assert_eq!(parse_line(s.parse::<f64>("x").unwrap_err()), 2);
    assert_eq!(parse_line(s.check_keys(&["y"]).unwrap_err()), 2);
}

fn same_atom(a: &AtomSpec, b: &AtomSpec) {
    assert_eq!((&a.name, a.i, a.j, a.f), (&b.name, b.i, b.j, b.f));
    assert_eq!(a.lines, b.lines);
    assert!((a.lambda_m / b.lambda_m - 1.0).abs() < 1e-15);
    assert!((a.gamma_sp / b.gamma_sp - 1.0).abs() < 1e-15);
}

#[test]
fn shipped_atom_files_match_builtins() {
    for name in builtin::NAMES {
        let f = read_atom(&data(&format!("atoms/{name}.atom"))).unwrap();
        same_atom(&f, &builtin::by_name(name).unwrap());
    }
}

#[test]
fn atom_file_round_trip() {
    let he = builtin::he3();
    let back = parse_atom(&to_atom_file(&he), Path::new("he.atom")).unwrap();
    same_atom(&back, &he);
}

#[test]
fn atom_file_rejects_bad_data() {
    let p = Path::new("x.atom");
    let good = "name = x\nnuclear_spin = 1/2\nj = 1\nf = 3/2\nlambda_nm = 1000\ngamma_sp_hz = 1e6\n";
    let line = "[line]\nj_prime = 2\nf_prime = 5/2\noffset_ghz = 0\n";
    assert!(parse_atom(&format!("{good}{line}"), p).is_ok());
    // f = 3/2 cannot couple i = 1/2 and j = 0
    assert!(parse_atom(&format!("{}{line}", good.replace("j = 1", "j = 0")), p).is_err());
    assert!(parse_atom(&format!("{}{line}", good.replace("f = 3/2", "f = 1.5")), p).is_err());
    assert!(parse_atom(&format!("{good}{line}colour = red\n"), p).is_err());
    assert!(parse_atom(&format!("{good}[level]\n"), p).is_err());
    assert!(parse_atom(&good.replace("lambda_nm = 1000\n", ""), p).is_err());
}

#[test]
fn he_config_gives_the_same_chain_as_the_library() {
    let cfg = RunConfig::read(&data("configs/he3.conf")).unwrap();
    let cav = CavitySpec { kappa: TAU * 1e8, n_ph: 4.33e7, rabi: TAU * 4.26e3 };
    let want = derive_two_mode(&builtin::he3(), &cav, 5e10, -3.4, 0.0).unwrap();
    assert_eq!(cfg.two_mode().unwrap(), want);
    let three = cfg.three_mode().unwrap();
    assert_eq!((three.gamma_m, three.gamma_f), (3.92e6, 19.6));
    assert_eq!(cfg.dynamics.seed, 0);
    assert_eq!(cfg.dynamics.t_end, Some(10.0));
    assert_eq!(cfg.scenario.as_deref(), Some("he3-chain"));
}

#[test]
fn yb_config_reads_gyro_in_hz() {
    let cfg = RunConfig::read(&data("configs/yb173.conf")).unwrap();
    assert!((cfg.gyro.unwrap() + TAU * 205.6).abs() < 1e-9);
    assert!(cfg.three_mode().is_err());
}

fn cfg(text: &str) -> Result<RunConfig, CliError> {
    RunConfig::parse(text, Path::new("run.conf"))
}

#[test]
fn couplings_source_must_be_unique() {
    let explicit = "[dynamics]\nepsilon = 0.3\nomega_v = 0.1\nkappa = 1\n";
    let c = cfg(explicit).unwrap();
    assert_eq!(c.couplings, Couplings::Explicit { omega_v: 0.1, epsilon: 0.3, kappa: 1.0 });
    let atom = "[atom]\nname = he3\ndetuning_ghz = -3.4\n[cavity]\nkappa = 1\nn_ph = 1\nrabi = 1\n[ensemble]\nn_atoms = 1\n";
    assert!(cfg(atom).is_ok());
    assert!(matches!(cfg(&format!("{atom}[dynamics]\nepsilon = 0.2\n")), Err(CliError::Config(_))));
    assert!(matches!(cfg("[dynamics]\nt_end = 3\n"), Err(CliError::Config(_))));
    // missing detuning
    assert!(cfg(&atom.replace("detuning_ghz = -3.4\n", "")).is_err());
}

#[test]
fn config_field_rules() {
    let base = "[dynamics]\nepsilon = 0.3\nomega_v = 0.1\nkappa = 1\n";
    assert!(cfg(&format!("{base}tyop = 1\n")).is_err());
    assert!(cfg(&format!("{base}[extra]\n")).is_err());
    assert!(cfg(&format!("verbose = 1\n{base}")).is_err());
    let c = cfg(&format!("{base}seed = 9\nn_traj = 12\n[ensemble]\nn_atoms = 10\nn_ground = 1000\ngamma_m = 5\n")).unwrap();
    assert_eq!(c.dynamics.seed, 9);
    assert_eq!(c.dynamics.n_traj, Some(12));
    assert_eq!(c.gamma_f, Some(0.05));
    assert!(cfg(&format!("{base}[ensemble]\ngamma_m = 1\ngamma_f = 1\nn_ground = 2\nn_atoms = 1\n")).is_err());
    let both = "[atom]\nname = he3\ndetuning_ghz = 1\n[cavity]\nkappa = 1\nkappa_hz = 1\nn_ph = 1\nrabi = 1\n[ensemble]\nn_atoms = 1\n";
    assert!(cfg(both).is_err());
}

#[test]
fn inline_and_file_atoms() {
    let inline = "[atom]\nname = he3\nnuclear_spin = 1/2\nj = 1\nf = 3/2\nlambda_nm = 1083\ngamma_sp_hz = 1.62e6\ndetuning_ghz = -3.4\n\
                  [atom.line]\nj_prime = 2\nf_prime = 5/2\noffset_ghz = 0\n\
                  [cavity]\nkappa_hz = 1e8\nn_ph = 4.33e7\nrabi_hz = 4.26e3\n[ensemble]\nn_atoms = 5e10\n";
    let c = cfg(inline).unwrap();
    let Couplings::Atom { atom, .. } = &c.couplings else { panic!() };
    assert_eq!(atom.lines.len(), 1);

    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(data("atoms/yb173.atom"), dir.path().join("yb.atom")).unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        "[atom]\nfile = yb.atom\ndetuning_ghz = 9\n[cavity]\nkappa = 1e6\nn_ph = 1e5\nrabi = 1e4\n[ensemble]\nn_atoms = 1e4\n",
    )
    .unwrap();
    let c = RunConfig::read(&conf).unwrap();
    let Couplings::Atom { atom, .. } = &c.couplings else { panic!() };
    assert_eq!(atom.lines, builtin::yb173().lines);
    assert!(cfg("[atom]\nname = cs133\ndetuning_ghz = 1\n[cavity]\nkappa = 1\nn_ph = 1\nrabi = 1\n[ensemble]\nn_atoms = 1\n").is_err());
}
