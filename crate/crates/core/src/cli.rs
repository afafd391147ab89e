//! Command-line front end.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::canonical::{
    condensed_form_eq, generate_prescribed_left_indices, random_structured_pencil, CanonicalError, Nonneg,
    RandomPencilOptions,
};
use crate::io::{read_matrix_market, write_matrix_market, AnalysisDocument, CondensedForms, PencilDescriptor, PerturbationDocument};
use crate::kronecker::{Eigenvalue, KroneckerStructure};
use crate::linalg::{Field, Matrix, Tolerance};
use crate::pencil::{check_structure, fixture, FixtureParams, StructureReport, StructuredPencil};
use crate::stability::{analyze_dh_pencil, StabilityReport};
use crate::stabilization::{
    random_zero_defective_pencil, section5_condensed_form, stabilize, StabilizationError, YChoice, ZeroBlockSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_STRUCTURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

/// Overrides the default relative tolerance.
pub const TOL_ENV: &str = "DH_PENCIL_TOL";

#[derive(Debug, Parser)]
#[command(name = "dh-pencil", version, about = "Structure analysis of dissipative Hamiltonian descriptor pencils")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Relative rank tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Eq,
    Section5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Zero,
    Mixed,
    SymmetricOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Real,
    Complex,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Field {
        match f {
            FieldArg::Real => Field::Real,
            FieldArg::Complex => Field::Complex,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structural hypotheses of a pencil manifest.
    Check { manifest: PathBuf },
    /// Full analysis document.
    Analyze {
        #[arg(required_unless_present = "batch", conflicts_with = "batch")]
        manifest: Option<PathBuf>,
        /// Analyze every `*.json` manifest in a directory.
        #[arg(long)]
        batch: Option<PathBuf>,
    },
    /// Condensed forms as Matrix Market files plus a manifest.
    Condense {
        manifest: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::Eq)]
        which: Which,
    },
    /// Perturb `L` so that zero becomes a semisimple eigenvalue.
    Stabilize {
        manifest: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Zero)]
        mode: Mode,
        /// Matrix Market file with `Y` in condensed coordinates (mode mixed).
        #[arg(long)]
        y: Option<PathBuf>,
    },
    /// Write a pencil manifest.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// A named example pencil.
    Fixture {
        name: String,
        /// Scalar parameters `name=value`.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
    },
    /// `λE − Q` with prescribed left minimal indices and `L = −I`.
    LeftIndices {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',')]
        eta: Vec<usize>,
    },
    /// Random structured pencil disguised by random transformations.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        regular: bool,
        #[arg(long, value_enum, default_value_t = FieldArg::Real)]
        field: FieldArg,
    },
    /// Regular index-one pencil with a prescribed zero block partition.
    ZeroDefective {
        #[arg(long, value_delimiter = ',', required = true)]
        partition: Vec<usize>,
        #[arg(long)]
        semisimple: bool,
        #[arg(long, value_enum, default_value_t = FieldArg::Real)]
        field: FieldArg,
    },
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.to_string(), v))
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INPUT, message: e.to_string() }
}

fn from_stabilization(e: StabilizationError) -> Failure {
    let code = match e {
        StabilizationError::IndexTooHigh { .. }
        | StabilizationError::SingularPencil
        | StabilizationError::RangeConditionViolated { .. }
        | StabilizationError::SymmetricModeInfeasible { .. } => EXIT_INFEASIBLE,
        StabilizationError::StructureViolated(_) | StabilizationError::NotPsd { .. } | StabilizationError::NotHermitian { .. } => {
            EXIT_STRUCTURE
        }
        _ => EXIT_INPUT,
    };
    Failure { code, message: e.to_string() }
}

fn from_canonical(e: CanonicalError) -> Failure {
    let code = match e {
        CanonicalError::StructureViolated { .. } | CanonicalError::BothNonnegInfeasible { .. } => EXIT_STRUCTURE,
        CanonicalError::SingularPencil | CanonicalError::InfeasibleDimensions(_) => EXIT_INFEASIBLE,
        _ => EXIT_INPUT,
    };
    Failure { code, message: e.to_string() }
}

/// Tolerance from the flag, else from the environment, else the default.
pub fn resolve_tolerance(flag: Option<f64>, env: Option<&str>) -> Result<Tolerance, String> {
    let d = Tolerance::default();
    let rel = match (flag, env) {
        (Some(t), _) => t,
        (None, Some(s)) => s.trim().parse().map_err(|_| format!("{TOL_ENV}=`{s}` is not a number"))?,
        (None, None) => d.relative,
    };
    Tolerance::new(rel, d.absolute).map_err(|e| e.to_string())
}

fn load(path: &Path) -> Result<StructuredPencil, Failure> {
    PencilDescriptor::load(path).map(|(_, p)| p).map_err(input)
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn fmt_eigenvalue(e: &Eigenvalue) -> String {
    match e {
        Eigenvalue::Infinite => "inf".into(),
        Eigenvalue::Finite(z) if z.im == 0.0 => format!("{}", z.re),
        Eigenvalue::Finite(z) => format!("{}{:+}i", z.re, z.im),
    }
}

fn text_kronecker(out: &mut String, title: &str, k: &KroneckerStructure) {
    writeln!(out, "{title}: {}x{}, normal rank {}, index {}", k.rows, k.cols, k.normal_rank, k.index).unwrap();
    for f in &k.finite_eigenvalues {
        writeln!(out, "  eigenvalue {} jordan {:?}", fmt_eigenvalue(&Eigenvalue::Finite(f.value)), f.jordan_sizes).unwrap();
    }
    if !k.infinite_jordan_sizes.is_empty() {
        writeln!(out, "  eigenvalue inf jordan {:?}", k.infinite_jordan_sizes).unwrap();
    }
    writeln!(out, "  right minimal indices {:?}", k.right_minimal_indices).unwrap();
    writeln!(out, "  left minimal indices {:?}", k.left_minimal_indices).unwrap();
}

fn text_structure(out: &mut String, s: &StructureReport) {
    let yes = |b: bool| if b { "yes" } else { "no" };
    writeln!(out, "E*Q = Q*E: {} (residual {:e})", yes(s.b1a.holds), s.b1a.residual).unwrap();
    writeln!(out, "EQ* = QE*: {} (residual {:e})", yes(s.b1b.holds), s.b1b.residual).unwrap();
    writeln!(out, "E*Q psd: {} (min eigenvalue {:e})", yes(s.b1c.holds), s.b1c.min_eigenvalue).unwrap();
    writeln!(out, "R psd: {} (min eigenvalue {:e})", yes(s.r_psd.holds), s.r_psd.min_eigenvalue).unwrap();
    writeln!(out, "dH structure: {}", yes(s.is_dh())).unwrap();
}

fn text_stability(out: &mut String, r: &StabilityReport) {
    text_kronecker(out, "pencil", &r.eigen_data);
    let g = |x: &crate::stability::Guarantee| match (x.observed, x.guaranteed) {
        (true, true) => "holds (guaranteed)",
        (true, false) => "holds",
        (false, true) => "VIOLATED",
        (false, false) => "fails (not guaranteed)",
    };
    writeln!(out, "closed left half-plane: {}", g(&r.lhp_ok)).unwrap();
    writeln!(out, "imaginary eigenvalues semisimple: {}", g(&r.imaginary_semisimple_ok)).unwrap();
    writeln!(out, "RQV = 0 on imaginary deflating subspaces: {}", g(&r.rqv_ok)).unwrap();
    writeln!(out, "index at most two: {}", g(&r.index_ok)).unwrap();
    writeln!(out, "right minimal indices at most one: {}", g(&r.right_indices_ok)).unwrap();
    writeln!(out, "left minimal indices zero: {}", g(&r.left_indices_ok)).unwrap();
    writeln!(out, "zero jordan sizes {:?}", r.zero_jordan_sizes).unwrap();
    writeln!(out, "hypotheses hold: {}", r.hypothesis_report.holds()).unwrap();
}

fn emit<T: serde::Serialize>(cli: &Cli, text: String, value: &T) -> String {
    match cli.format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(value).expect("serializable") + "\n",
    }
}

fn write_mtx(dir: &Path, name: &str, m: &Matrix, files: &mut BTreeMap<String, String>) -> Result<(), Failure> {
    let f = format!("{name}.mtx");
    write_matrix_market(m, dir.join(&f)).map_err(input)?;
    files.insert(name.to_string(), f);
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))
}

fn execute(cli: &Cli, tol: &Tolerance) -> Result<(String, i32), Failure> {
    match &cli.command {
        Command::Check { manifest } => {
            let p = load(manifest)?;
            let s = check_structure(&p, tol);
            let eq = crate::kronecker::staircase(p.e(), p.q(), tol).structure;
            let mut t = String::new();
            text_structure(&mut t, &s);
            text_kronecker(&mut t, "E - Q", &eq);
            #[derive(serde::Serialize)]
            struct CheckOut<'a> {
                structure: &'a StructureReport,
                eq_structure: &'a KroneckerStructure,
            }
            let code = if s.is_dh() { EXIT_OK } else { EXIT_STRUCTURE };
            Ok((emit(cli, t, &CheckOut { structure: &s, eq_structure: &eq }), code))
        }
        Command::Analyze { manifest: None, batch: Some(dir) } => analyze_batch(cli, dir, tol),
        Command::Analyze { manifest, .. } => {
            let p = load(manifest.as_deref().ok_or_else(|| input("missing manifest"))?)?;
            let doc = AnalysisDocument::new(&p, tol);
            let mut t = String::new();
            text_structure(&mut t, &doc.structure);
            text_stability(&mut t, &doc.stability);
            let code = if doc.stability.hypothesis_report.holds() { EXIT_OK } else { EXIT_STRUCTURE };
            if let Some(dir) = &cli.out {
                ensure_dir(dir)?;
                write_json(&dir.join("analysis.json"), &doc)?;
            }
            Ok((emit(cli, t, &doc), code))
        }
        Command::Condense { manifest, which } => {
            let p = load(manifest)?;
            let mut doc = AnalysisDocument::new(&p, tol);
            let dir = out_dir(cli);
            ensure_dir(&dir)?;
            let mut files = BTreeMap::new();
            let mut t = String::new();
            match which {
                Which::Eq => {
                    let f = condensed_form_eq(p.e(), p.q(), Nonneg::Both, tol).map_err(from_canonical)?;
                    for (name, m) in [
                        ("U", &f.u),
                        ("X", &f.x),
                        ("E_condensed", &f.assembled_e()),
                        ("Q_condensed", &f.assembled_q()),
                    ] {
                        write_mtx(&dir, name, m, &mut files)?;
                    }
                    writeln!(t, "regular part {}, left block {}x{}, zero columns {}", f.n1, f.m2, f.n2, f.zero_cols).unwrap();
                    writeln!(t, "residual {:e}", f.residual(p.e(), p.q())).unwrap();
                    doc.condensed = Some(CondensedForms { eq: Some(f), section5: None });
                }
                Which::Section5 => {
                    let f = section5_condensed_form(&p, tol).map_err(from_stabilization)?;
                    for (name, m) in [("U", &f.u), ("X", &f.x), ("E_condensed", &f.e), ("Q_condensed", &f.q), ("L_condensed", &f.l), ("A_condensed", &f.a)] {
                        write_mtx(&dir, name, m, &mut files)?;
                    }
                    writeln!(t, "partition {:?}", f.partition).unwrap();
                    writeln!(t, "residual {:e}", f.residual(&p)).unwrap();
                    let z = crate::stabilization::zero_semisimple_test(&f, tol);
                    writeln!(t, "zero semisimple: {} (|A32| = {:e})", z.semisimple, z.a32_norm).unwrap();
                    doc.condensed = Some(CondensedForms { eq: None, section5: Some(f) });
                }
            }
            #[derive(serde::Serialize)]
            struct Manifest<'a> {
                files: &'a BTreeMap<String, String>,
                document: &'a AnalysisDocument,
            }
            let m = Manifest { files: &files, document: &doc };
            write_json(&dir.join("condensed.json"), &m)?;
            writeln!(t, "wrote {}", dir.join("condensed.json").display()).unwrap();
            Ok((emit(cli, t, &m), EXIT_OK))
        }
        Command::Stabilize { manifest, mode, y } => {
            let p = load(manifest)?;
            let choice = match (mode, y) {
                (Mode::Zero, None) => YChoice::Zero,
                (Mode::SymmetricOnly, None) => YChoice::SymmetricOnly,
                (Mode::Mixed, Some(path)) => YChoice::Mixed(read_matrix_market(path).map_err(input)?),
                (Mode::Mixed, None) => return Err(input("--mode mixed needs --y")),
                (_, Some(_)) => return Err(input("--y is only used with --mode mixed")),
            };
            let s = stabilize(&p, &choice, tol).map_err(from_stabilization)?;
            let perturbed = s.perturbed(&p, 1.0, 1.0).map_err(from_stabilization)?;
            let mut doc = AnalysisDocument::new(&p, tol);
            let report = analyze_dh_pencil(&perturbed, tol);
            let dir = out_dir(cli);
            ensure_dir(&dir)?;
            let mut files = BTreeMap::new();
            write_mtx(&dir, "delta_J", &s.delta_j, &mut files)?;
            write_mtx(&dir, "delta_R", &s.delta_r, &mut files)?;
            PencilDescriptor::save(&perturbed, &dir, "perturbed", BTreeMap::new()).map_err(input)?;
            let mut t = String::new();
            writeln!(t, "partition {:?}", s.form.partition).unwrap();
            writeln!(t, "|dJ|_F = {:e} <= {:e}: {}", s.delta_j.norm_fro(), s.bound_j, s.check.bound_j_holds).unwrap();
            let dr = if s.delta_r.is_empty() { 0.0 } else { s.delta_r.norm2() };
            writeln!(t, "|dR|_2 = {:e} <= {:e}: {}", dr, s.bound_r, s.check.bound_r_holds).unwrap();
            writeln!(t, "R + dR min eigenvalue {:e}", s.check.r_min_eigenvalue).unwrap();
            writeln!(t, "nonzero structure preserved: {}", s.check.nonzero_structure_preserved).unwrap();
            writeln!(t, "zero semisimple after perturbation: {}", s.check.zero_semisimple).unwrap();
            text_stability(&mut t, &report);
            let code = if s.check.passed() { EXIT_OK } else { EXIT_STRUCTURE };
            doc.perturbation = Some(PerturbationDocument { perturbation: s, perturbed: report });
            write_json(&dir.join("stabilized.json"), &doc)?;
            Ok((emit(cli, t, &doc), code))
        }
        Command::Generate { kind } => {
            let (p, stem, meta) = generate(kind, cli.seed)?;
            let dir = out_dir(cli);
            let (d, path) = PencilDescriptor::save(&p, &dir, &stem, meta).map_err(input)?;
            let t = format!("wrote {}\n", path.display());
            Ok((emit(cli, t, &d), EXIT_OK))
        }
    }
}

fn analyze_batch(cli: &Cli, dir: &Path, tol: &Tolerance) -> Result<(String, i32), Failure> {
    let mut manifests: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| input(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    manifests.sort();
    let results: Vec<Result<AnalysisDocument, Failure>> = std::thread::scope(|s| {
        let handles: Vec<_> = manifests
            .iter()
            .map(|m| s.spawn(move || load(m).map(|p| AnalysisDocument::new(&p, tol))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("analysis thread panicked")).collect()
    });
    let mut docs = BTreeMap::new();
    let mut t = String::new();
    let mut code = EXIT_OK;
    for (m, r) in manifests.iter().zip(results) {
        let name = m.file_name().unwrap().to_string_lossy().into_owned();
        let doc = r.map_err(|f| Failure { code: f.code, message: format!("{name}: {}", f.message) })?;
        let holds = doc.stability.hypothesis_report.holds();
        if !holds {
            code = EXIT_STRUCTURE;
        }
        writeln!(t, "{name}: dH {}, hypotheses {}, violations {}", doc.structure.is_dh(), holds, doc.stability.counterexample()).unwrap();
        docs.insert(name, doc);
    }
    Ok((emit(cli, t, &docs), code))
}

type Generated = (StructuredPencil, String, BTreeMap<String, String>);

fn generate(kind: &GenerateKind, seed: u64) -> Result<Generated, Failure> {
    let mut meta = BTreeMap::new();
    match kind {
        GenerateKind::Fixture { name, params } => {
            let mut fp = FixtureParams::new();
            for (k, v) in params {
                fp = fp.scalar(k, *v);
                meta.insert(k.clone(), v.to_string());
            }
            let p = fixture(name, &fp).map_err(input)?;
            meta.insert("fixture".into(), name.clone());
            let stem = name.replace(':', "_");
            Ok((p, stem, meta))
        }
        GenerateKind::LeftIndices { n, m, eta } => {
            let (e, q) = generate_prescribed_left_indices(*n, *m, eta).map_err(from_canonical)?;
            let l = Matrix::identity(*n).scale_real(-1.0);
            let p = StructuredPencil::new(e, q, l).map_err(input)?;
            meta.insert("left_minimal_indices".into(), format!("{eta:?}"));
            Ok((p, "left_indices".into(), meta))
        }
        GenerateKind::Random { n, m, regular, field } => {
            let m = m.unwrap_or(*n);
            let opts = RandomPencilOptions { regular: *regular, field: (*field).into(), ..Default::default() };
            let p = random_structured_pencil(*n, m, seed, opts).map_err(from_canonical)?;
            meta.insert("seed".into(), seed.to_string());
            Ok((p, "random".into(), meta))
        }
        GenerateKind::ZeroDefective { partition, semisimple, field } => {
            let partition: [usize; 4] = partition.as_slice().try_into().map_err(|_| input("partition needs 4 sizes"))?;
            let spec = ZeroBlockSpec { partition, semisimple: *semisimple, field: (*field).into() };
            let g = random_zero_defective_pencil(spec, seed).map_err(from_stabilization)?;
            meta.insert("seed".into(), seed.to_string());
            meta.insert("zero_jordan_sizes".into(), format!("{:?}", g.zero_jordan_sizes));
            Ok((g.pencil, "zero_defective".into(), meta))
        }
    }
}

/// Runs the CLI on `argv` (including the program name). Returns the exit code.
pub fn run<I, T>(argv: I, env_tol: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let tol = match resolve_tolerance(cli.tol, env_tol) {
        Ok(t) => t,
        Err(m) => {
            let _ = writeln!(stderr, "error: {m}");
            return EXIT_INPUT;
        }
    };
    match execute(&cli, &tol) {
        Ok((text, code)) => {
            let _ = stdout.write_all(text.as_bytes());
            code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
