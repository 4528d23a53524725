//! Command-line surface.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cases::{invariant, InvariantName};
use crate::elimination::{run_pipeline, Branch, FixtureSet, PipelineReport, Verdict};
use crate::error::{Error, Result};
use crate::expr::{Rational, Registry, Weight};
use crate::extraction::{emit_cubic, Phase};
use crate::minimality::{certify, defect_at_samples, sample_zero_locus, CoordinatePoly};
use crate::sections::{coefficient_system, compare_system, parse_system_fixture};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_FIXTURE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

pub const FIXTURES_ENV: &str = "CARTAN_FIXTURES";

#[derive(Parser, Debug)]
#[command(name = "cartan", version, about = "Moving-frame elimination for algebraic minimal surfaces in S³")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH", global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Emit the coefficient structure system and compare it to its golden
    Derive {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
        degree: u32,
        #[command(flatten)]
        fixtures: FixtureArgs,
    },
    /// Run the scripted elimination
    Pipeline {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
        degree: u32,
        #[arg(long = "case")]
        case: Option<String>,
        #[command(flatten)]
        fixtures: FixtureArgs,
    },
    /// The degree-3 branch cubic (the a → 2 limit unless --at is given)
    EmitCubic {
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        phase: String,
        #[arg(long, value_name = "A")]
        at: Option<String>,
    },
    /// Exact minimality certificate for a coordinate polynomial
    Certify {
        #[arg(long, value_name = "FILE")]
        poly: PathBuf,
    },
    /// Print a named invariant
    Invariant {
        #[arg(long)]
        name: String,
    },
    /// Numeric points on the zero locus
    Sample {
        #[arg(long, value_name = "FILE")]
        poly: PathBuf,
        #[arg(short = 'n', long = "count", default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct FixtureArgs {
    /// Fixture directory; defaults to $CARTAN_FIXTURES, then the bundled set
    #[arg(long, value_name = "DIR")]
    pub fixtures: Option<PathBuf>,
}

impl FixtureArgs {
    fn dir(&self) -> PathBuf {
        self.fixtures
            .clone()
            .or_else(|| std::env::var_os(FIXTURES_ENV).map(PathBuf::from))
            .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub inputs: Value,
    pub result: Value,
    #[serde(skip)]
    pub text: String,
    #[serde(skip)]
    pub exit: i32,
}

impl RunReport {
    fn new(command: &str, inputs: Value, result: Value, text: String, exit: i32) -> Self {
        RunReport { schema: 1, command: command.into(), inputs, result, text, exit }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Parses, runs and renders; returns the rendered report and the exit code.
pub fn run_args<I, T>(argv: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            return (e.render().to_string(), code);
        }
    };
    match execute(&cli) {
        Ok(rep) => {
            let out = rep.render(cli.format);
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &out) {
                    return (format!("error: {}: {e}\n", path.display()), EXIT_INPUT);
                }
                return (String::new(), rep.exit);
            }
            (out, rep.exit)
        }
        Err(e) => (format!("error: {e}\n"), exit_code(&e)),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::FixtureMismatch { .. } => EXIT_FIXTURE,
        Error::Consistency(_) | Error::LedgerViolation(_) | Error::NonReal(_) => EXIT_VERDICT,
        _ => EXIT_INPUT,
    }
}

pub fn execute(cli: &Cli) -> Result<RunReport> {
    match &cli.command {
        Command::Derive { degree, fixtures } => derive(*degree, &fixtures.dir()),
        Command::Pipeline { degree, case, fixtures } => pipeline(*degree, case.as_deref(), &fixtures.dir()),
        Command::EmitCubic { phase, at } => emit(phase, at.as_deref()),
        Command::Certify { poly } => certify_file(poly),
        Command::Invariant { name } => named_invariant(name),
        Command::Sample { poly, count, seed } => sample(poly, *count, *seed),
    }
}

fn read_poly(path: &Path) -> Result<CoordinatePoly> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let body: String = text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join(" ");
    CoordinatePoly::parse(&body)
}

fn derive(degree: u32, dir: &Path) -> Result<RunReport> {
    let sys = coefficient_system(degree)?;
    let path = dir.join(format!("system_deg{degree}.txt"));
    let golden = std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let diffs = compare_system(&sys, &parse_system_fixture(&golden)?);
    let mut text = sys.to_fixture_text();
    for d in &diffs {
        text.push_str(&format!("diff {d}\n"));
    }
    text.push_str(&format!("entries: {}, diffs: {}\n", sys.entries.len(), diffs.len()));
    let result = json!({
        "entries": sys.entries.len(),
        "system": sys.to_fixture_text().lines().collect::<Vec<_>>(),
        "diffs": diffs.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
    });
    let exit = if diffs.is_empty() { EXIT_OK } else { EXIT_FIXTURE };
    Ok(RunReport::new("derive", json!({ "degree": degree, "fixtures": path_label(dir) }), result, text, exit))
}

/// Fixture path as reported; the bundled directory is named, not spelled out.
fn path_label(dir: &Path) -> String {
    if dir == Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures") {
        "bundled".into()
    } else {
        dir.display().to_string()
    }
}

fn expected(degree: u32, branch: Branch, v: &Verdict) -> bool {
    matches!(
        (degree, branch, v),
        (1 | 2, Branch::None, Verdict::StructureConditions { .. })
            | (3, Branch::A, Verdict::UniqueUpToScale { .. })
            | (3, Branch::B, Verdict::Contradiction { .. })
    )
}

fn pipeline(degree: u32, case: Option<&str>, dir: &Path) -> Result<RunReport> {
    let branch = match case {
        Some(c) => c.parse()?,
        None => Branch::None,
    };
    let fx = FixtureSet::load(dir)?;
    let rep: PipelineReport = run_pipeline(degree, branch, &fx)?;
    let exit = if !rep.fixtures_ok() {
        EXIT_FIXTURE
    } else if !expected(degree, branch, &rep.verdict) {
        EXIT_VERDICT
    } else {
        EXIT_OK
    };
    let inputs = json!({ "degree": degree, "case": branch, "fixtures": path_label(dir) });
    Ok(RunReport::new("pipeline", inputs, to_value(&rep), rep.to_text(), exit))
}

fn emit(phase: &str, at: Option<&str>) -> Result<RunReport> {
    let phase: Phase = phase.parse()?;
    let a =
        at.map(|s| s.parse::<Rational>().map_err(|e| Error::Config(format!("bad rational `{s}`: {e}")))).transpose()?;
    let f = emit_cubic(phase, a.as_ref())?;
    let inputs = json!({ "phase": phase, "at": a.as_ref().map(|q| q.to_string()) });
    let result = json!({
        "poly": f.poly().to_string(),
        "b_squared": f.b_squared().map(|q| q.to_string()),
    });
    Ok(RunReport::new("emit-cubic", inputs, result, format!("{f}\n"), EXIT_OK))
}

fn certify_file(path: &Path) -> Result<RunReport> {
    let f = read_poly(path)?;
    let c = certify(&f)?;
    let exit = if c.passed() { EXIT_OK } else { EXIT_VERDICT };
    Ok(RunReport::new("certify", json!({ "poly": f.to_string() }), to_value(&c), c.to_text(), exit))
}

fn named_invariant(name: &str) -> Result<RunReport> {
    let n: InvariantName = name.parse()?;
    let inv = invariant(n);
    let weight = match inv.body.weight(&Registry::new())? {
        Weight::Homogeneous(w) => Some(w),
        _ => None,
    };
    let text = format!("{n} = {}\nweight: {}\n", inv.body, weight.map_or("mixed".into(), |w| w.to_string()));
    let result = json!({ "name": n.to_string(), "body": inv.body.to_string(), "weight": weight });
    Ok(RunReport::new("invariant", json!({ "name": name }), result, text, EXIT_OK))
}

fn sample(path: &Path, count: usize, seed: u64) -> Result<RunReport> {
    let f = read_poly(path)?;
    let pts = sample_zero_locus(&f, count, seed)?;
    let mut text = String::new();
    for x in &pts {
        text.push_str(&format!("{:.12} {:.12} {:.12} {:.12}\n", x[0], x[1], x[2], x[3]));
    }
    let max_defect =
        if certify(&f)?.passed() { defect_at_samples(&f, &pts)?.into_iter().fold(0.0, f64::max) } else { f64::NAN };
    let result = json!({ "points": pts, "max_abs_defect": (!max_defect.is_nan()).then_some(max_defect) });
    Ok(RunReport::new("sample", json!({ "poly": f.to_string(), "n": count, "seed": seed }), result, text, EXIT_OK))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (String, i32) {
        run_args(std::iter::once("cartan").chain(args.iter().copied()))
    }

    #[test]
    fn unknown_subcommand_is_an_input_error() {
        let (out, code) = run(&["frobnicate"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(out.contains("Usage"));
    }

    #[test]
    fn derive_matches_goldens() {
        for d in ["1", "2", "3"] {
            let (out, code) = run(&["derive", "--degree", d]);
            assert_eq!(code, EXIT_OK, "{out}");
            assert!(out.contains("diffs: 0"));
        }
    }

    #[test]
    fn invariant_reports_weight() {
        let (out, code) = run(&["invariant", "--name", "Δ₄''"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("weight: 7"), "{out}");
        let (_, code) = run(&["invariant", "--name", "nope"]);
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn case_without_degree_three_is_rejected() {
        let (_, code) = run(&["pipeline", "--degree", "2", "--case", "A"]);
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn emit_rejects_boundary_point() {
        let (out, code) = run(&["emit-cubic", "--at", "2"]);
        assert_eq!(code, EXIT_VERDICT, "{out}");
        let (_, code) = run(&["emit-cubic", "--at", "3"]);
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn certify_and_sample_from_files() {
        let dir = std::env::temp_dir().join(format!("cartan-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let good = dir.join("lawson.txt");
        std::fs::write(&good, "# Lawson cubic\n-2*x0*x1*x2 + x3*(x1^2 - x2^2)\n").unwrap();
        let bad = dir.join("cubes.txt");
        std::fs::write(&bad, "x0^3 + x1^3 + x2^3\n").unwrap();
        let (out, code) = run(&["certify", "--poly", good.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("verdict: pass"));
        let (_, code) = run(&["certify", "--poly", bad.to_str().unwrap()]);
        assert_eq!(code, EXIT_VERDICT);
        let (out, code) =
            run(&["--format", "json", "sample", "--poly", good.to_str().unwrap(), "-n", "3", "--seed", "5"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["result"]["points"].as_array().unwrap().len(), 3);
        let (_, code) = run(&["certify", "--poly", dir.join("missing.txt").to_str().unwrap()]);
        assert_eq!(code, EXIT_INPUT);
        std::fs::remove_dir_all(&dir).ok();
    }
}
