//! The `glcodes` command line: code parameters, Knill-Laflamme tables,
//! sections, recovery simulation and the vacuum/gauge correspondence.
//!
//! Exit codes: 0 success, 1 validation failure, 2 unreadable or malformed input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::codes::{code_parameters, stabilizer_generators, CodeError, CodeInstance, DEFAULT_WMAX};
use crate::equivalence::{coarse_grained_check, kernel_witness, verify_equivalence, EquivalenceError, KernelReport};
use crate::errors::{kl_check_pair, max_set_from_section, simulate_codeword, ErrorOp, ErrorsError, KLVerdict, OutcomeChoice};
use crate::gauss_map::{make_section, GaussError, Section, SectionRule};
use crate::oracle::{distance_oracle, kl_oracle, projector_rank, OracleError};
use crate::specfile::{
    format_section, load_code_spec, parse_error_literal, parse_errors_file, parse_section_table, CodeSpec, ParseError,
    SpecError,
};

/// Output style.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned text for reading.
    Human,
    /// One `key=value` record per line.
    Records,
}

#[derive(Debug, Parser)]
#[command(name = "glcodes", version, about = "Gauss law and vacuum codes of finite abelian lattice gauge theories")]
struct Cli {
    /// Output style.
    #[arg(long, global = true, value_enum, default_value = "human")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Code parameters and stabilizer generators.
    Params {
        /// Code specification file.
        #[arg(long)]
        spec: PathBuf,
        /// Largest X-type weight searched.
        #[arg(long, default_value_t = DEFAULT_WMAX)]
        wmax: usize,
        /// Cross-check dimension and distance with the dense oracle.
        #[arg(long)]
        oracle: bool,
        /// Oscillator cutoff override.
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Pairwise Knill-Laflamme verdicts for a list of errors.
    Kl {
        /// Code specification file.
        #[arg(long)]
        spec: PathBuf,
        /// File with one error literal per line.
        #[arg(long)]
        errors: PathBuf,
        /// Cross-check every pair with the dense oracle.
        #[arg(long)]
        oracle: bool,
        /// Oscillator cutoff override.
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Builds or validates a section and the error set it defines.
    Sections {
        /// Code specification file.
        #[arg(long)]
        spec: PathBuf,
        /// Explicit section table; the tree frame field is used otherwise.
        #[arg(long)]
        section: Option<PathBuf>,
        /// Oscillator cutoff override.
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Seeded error-correction rounds with errors drawn from the section.
    Simulate {
        /// Code specification file.
        #[arg(long)]
        spec: PathBuf,
        /// Section table; the tree frame field is used otherwise.
        #[arg(long)]
        section: Option<PathBuf>,
        /// Number of rounds.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Seed of the error and outcome sampler.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Apply this error literal in every round instead of sampling the section.
        #[arg(long)]
        inject: Option<String>,
        /// Oscillator cutoff override.
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Checks a vacuum code against the pure-gauge code on the same lattice.
    Equiv {
        /// Vacuum code specification.
        /// Code specification file.
        #[arg(long)]
        spec: PathBuf,
        /// Pure-gauge code specification.
        #[arg(long)]
        gl_spec: PathBuf,
        /// Section table of the vacuum code; the tree frame field is used otherwise.
        #[arg(long)]
        section: Option<PathBuf>,
        /// Oscillator cutoff override.
        #[arg(long)]
        cutoff: Option<usize>,
    },
}

/// Failures of a command, mapped to exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error(transparent)]
    Errors(#[from] ErrorsError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Equivalence(#[from] EquivalenceError),
    #[error("{0}")]
    Validation(String),
    #[error("output failed: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Parse { .. } => 2,
            _ => 1,
        }
    }
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn load(path: &Path, cutoff: Option<usize>) -> Result<CodeSpec, CliError> {
    let spec = load_code_spec(path).map_err(|e| match e {
        SpecError::Parse(source) => CliError::Parse { path: path.display().to_string(), source },
        other => CliError::Input(other.to_string()),
    })?;
    Ok(match cutoff {
        Some(c) => spec.with_cutoff(c),
        None => spec,
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn section_for(code: &CodeInstance, file: Option<&Path>) -> Result<Section, CliError> {
    let base = code.syndrome_base();
    match file {
        None => Ok(make_section(&base, &SectionRule::TreeFrameField, "tree-frame-field")?),
        Some(p) => {
            let rule = parse_section_table(&read(p)?, &base)
                .map_err(|source| CliError::Parse { path: p.display().to_string(), source })?;
            Ok(make_section(&base, &rule, &p.display().to_string())?)
        }
    }
}

fn describe(spec: &CodeSpec, code: &CodeInstance) -> String {
    format!("{} {} on {}, root {}", spec.group, code.family.name(), code.lattice.name(), code.tree.root())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let records = cli.format == Format::Records;
    match &cli.command {
        Command::Params { spec, wmax, oracle, cutoff } => {
            let spec = load(spec, *cutoff)?;
            let code = if *oracle { spec.build()? } else { spec.build_symbolic()? };
            let p = code_parameters(&code, *wmax);
            let loops = code.lattice.loop_dimension();
            if records {
                writeln!(
                    out,
                    "params={} n={} k={:.6} k_base={} dimension={} d_x={} d_z={} loop_dimension={}",
                    p.bracket(),
                    p.n,
                    p.k,
                    p.k_base,
                    p.dimension,
                    p.d_x,
                    p.d_z,
                    loops
                )?;
            } else {
                writeln!(out, "code        {}", describe(&spec, &code))?;
                writeln!(out, "parameters  {}, d_Z={}", p.bracket(), p.d_z)?;
                writeln!(out, "dimension   {} (k = {:.4} in base {})", p.dimension, p.k, p.k_base)?;
                writeln!(out, "loops       {loops}")?;
                writeln!(out, "d_Z witness {} on {}", p.d_z_witness.description, p.d_z_witness.register)?;
            }
            let gens = stabilizer_generators(&code);
            if !records {
                writeln!(out, "stabilizers ({})", gens.len())?;
            }
            for s in &gens {
                if records {
                    writeln!(out, "stabilizer={} redundant={}", s.label.replace(' ', "_"), s.redundant)?;
                } else {
                    writeln!(out, "  {}{}", s.label, if s.redundant { "  (redundant)" } else { "" })?;
                }
            }
            if *oracle {
                let rank = projector_rank(&code)?;
                let d = distance_oracle(&code, *wmax)?;
                let agree = rank as u128 == p.dimension && d == p.d_x;
                if records {
                    writeln!(out, "oracle_dimension={rank} oracle_d_x={d} agree={agree}")?;
                } else {
                    writeln!(out, "oracle      dimension {rank}, d_X {d}: {}", if agree { "agrees" } else { "DISAGREES" })?;
                }
                if !agree {
                    return Ok(1);
                }
            }
            Ok(0)
        }
        Command::Kl { spec, errors, oracle, cutoff } => {
            let spec = load(spec, *cutoff)?;
            let code = if *oracle { spec.build()? } else { spec.build_symbolic()? };
            let list = parse_errors_file(&read(errors)?, &code)
                .map_err(|source| CliError::Parse { path: errors.display().to_string(), source })?;
            let mut violations = 0;
            let mut disagreements = 0;
            let mut matrix = vec![vec![' '; list.len()]; list.len()];
            let mut notes = Vec::new();
            for i in 0..list.len() {
                for j in i..list.len() {
                    let v = kl_check_pair(&list[i], &list[j], &code)?;
                    let c = match &v {
                        KLVerdict::OrthogonalCorrectable => 'O',
                        KLVerdict::IdenticalOnCode => 'I',
                        KLVerdict::Violation(w) => {
                            violations += 1;
                            notes.push(format!("{} / {}: {}", list[i].label, list[j].label, w.description));
                            'V'
                        }
                    };
                    matrix[i][j] = c;
                    matrix[j][i] = c;
                    let dense = if *oracle { Some(kl_oracle(&list[i], &list[j], &code)?) } else { None };
                    let agree = dense.as_ref().is_none_or(|d| d.agrees_with(&v));
                    if !agree {
                        disagreements += 1;
                    }
                    if records {
                        let mut line = format!("a={} b={} verdict={}", list[i].label, list[j].label, v.name());
                        if let KLVerdict::Violation(w) = &v {
                            line.push_str(&format!(" witness={}", w.loops.to_tuple()));
                        }
                        if let Some(d) = &dense {
                            line.push_str(&format!(" oracle={} agree={agree}", d.name()));
                        }
                        writeln!(out, "{line}")?;
                    }
                }
            }
            if !records {
                writeln!(out, "errors      {}", list.len())?;
                for (i, row) in matrix.iter().enumerate() {
                    let cells: String = row.iter().map(|c| format!(" {c}")).collect();
                    writeln!(out, "  {:>3}{cells}   {}", i, list[i].label)?;
                }
                for n in &notes {
                    writeln!(out, "violation   {n}")?;
                }
                if *oracle {
                    writeln!(out, "oracle      {disagreements} disagreements")?;
                }
            }
            Ok(if violations > 0 || disagreements > 0 { 1 } else { 0 })
        }
        Command::Sections { spec, section, cutoff } => {
            let spec = load(spec, *cutoff)?;
            let code = spec.build_symbolic()?;
            let sec = section_for(&code, section.as_deref())?;
            out.write_all(format_section(&sec).as_bytes())?;
            match max_set_from_section(&sec, &code) {
                Ok(set) => {
                    let maximality = format!("{:?}", set.maximality).to_ascii_lowercase();
                    if records {
                        writeln!(out, "entries={} correctable=true maximality={maximality}", sec.len())?;
                    } else {
                        writeln!(out, "# {} entries, correctable, {maximality}", sec.len())?;
                    }
                    Ok(0)
                }
                Err(ErrorsError::KLViolationInside { a, b }) => {
                    writeln!(out, "# not correctable: {a} and {b} differ by a logical")?;
                    Ok(1)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Simulate { spec, section, trials, seed, inject, cutoff } => {
            let spec = load(spec, *cutoff)?;
            let code = spec.build()?;
            let sec = section_for(&code, section.as_deref())?;
            let injected = match inject {
                Some(text) => Some(
                    parse_error_literal(text, &code, text, 1)
                        .map_err(|source| CliError::Parse { path: "--inject".into(), source })?,
                ),
                None => None,
            };
            let pool: Vec<ErrorOp> = sec.entries().map(|e| ErrorOp::from_entry(&code, e)).collect();
            let codewords = code.dense()?.code_basis();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut successes = 0;
            for t in 0..*trials {
                let e = match &injected {
                    Some(e) => e.clone(),
                    None => pool[rng.gen_range(0..pool.len())].clone(),
                };
                let c = codewords[rng.gen_range(0..codewords.len())];
                let report = simulate_codeword(&code, c, &e, &sec, OutcomeChoice::Seeded(rng.gen()))?;
                if report.success {
                    successes += 1;
                }
                writeln!(out, "trial={t} codeword={c} {}", report.record())?;
            }
            let rate = if *trials == 0 { 1.0 } else { successes as f64 / *trials as f64 };
            if records {
                writeln!(out, "successes={successes} trials={trials} rate={rate:.6}")?;
            } else {
                writeln!(out, "success {successes}/{trials}")?;
            }
            Ok(if successes == *trials { 0 } else { 1 })
        }
        Command::Equiv { spec, gl_spec, section, cutoff } => {
            let vac_spec = load(spec, *cutoff)?;
            let gl_spec = load(gl_spec, None)?;
            if vac_spec.lattice != gl_spec.lattice || vac_spec.group != gl_spec.group {
                return Err(CliError::Validation("the two specifications use different lattices or groups".into()));
            }
            let gl = gl_spec.build()?;
            if vac_spec.matter.has_oscillators() {
                let vac = vac_spec.build_symbolic()?;
                let kernel = kernel_witness(&vac)?;
                let sec = section_for(&vac, section.as_deref())?;
                let report = coarse_grained_check(&vac, &gl, &sec)?;
                if let KernelReport::Witness { .. } = kernel {
                    writeln!(out, "kernel={} note=coarse-graining_required", kernel.to_string().replace(' ', "_"))?;
                }
                writeln!(
                    out,
                    "check=coarse-grained-section verdict={} pairs={}",
                    if report.correctable() { "pass" } else { "fail" },
                    report.pairs_checked
                )?;
                return Ok(if report.correctable() { 0 } else { 1 });
            }
            let vac = vac_spec.build()?;
            let sec = section_for(&vac, section.as_deref())?;
            let report = verify_equivalence(&vac, &gl, &sec)?;
            for r in &report.records {
                if records {
                    writeln!(out, "{}", r.record())?;
                } else {
                    writeln!(
                        out,
                        "{:<28} {}  {:.1e}",
                        r.label,
                        if r.passed { "pass" } else { "FAIL" },
                        r.max_deviation
                    )?;
                }
            }
            if !records {
                writeln!(out, "equivalence {}", if report.passed() { "holds" } else { "fails" })?;
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

