//! The `moduli` command line. Inputs and outputs are the JSON formats of the
//! `metric-moduli` crate; rationals are `"p/q"` strings and reals are plain
//! decimals. Exit codes: 0 on success, 1 on bad input, 2 when a property or
//! certificate fails.

pub mod harness;
pub mod render;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use metric_moduli::*;
use serde_json::json;

use harness::{HarnessConfig, Predicate};
use render::RenderSpec;

#[derive(Parser, Debug)]
#[command(name = "moduli", version, about = "Marked metric graphs, marked unit cycles and the scanning homotopy")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Symmetric,
    Paper,
}

impl From<Mode> for CloseMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Symmetric => CloseMode::Symmetric,
            Mode::Paper => CloseMode::Paper,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mutant {
    Flipped,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a metric graph and report its genus and mark count.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Print the first Betti number of a metric graph.
    Genus {
        #[arg(long)]
        input: PathBuf,
    },
    /// Scale bridge lengths by 1 - tau; at tau = 1 bridges are contracted.
    ShrinkBridges {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        tau: Rational,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Contract marked-poor leaves and fuse unmarked valency-2 vertices.
    Retract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Canonical representative of a marked cycle, or of a cycle graph with `--graph`.
    Canonicalize {
        #[arg(long)]
        input: PathBuf,
        /// Read a bridge-free genus-1 metric graph and normalize it first.
        #[arg(long)]
        graph: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print whether two marked cycles agree up to reflection.
    IsoEqual {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Decide whether y lies in the eps-neighborhood of x.
    CheckNeighborhood {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value = "symmetric")]
        mode: Mode,
    },
    /// Draw a seeded point of the alpha-neighborhood.
    SampleNeighbor {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Scan a marked cycle at turn w, or at homotopy time tau.
    Scan {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = rational_arg, conflicts_with = "tau", required_unless_present = "tau")]
        w: Option<Rational>,
        #[arg(long, value_parser = rational_arg)]
        tau: Option<Rational>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sample the continuity certificate around (x, w).
    Certify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        w: Rational,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write SVG frames of the homotopy applied to a marked cycle.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        frames: usize,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 480)]
        size: u32,
        #[arg(long)]
        no_labels: bool,
    },
    /// Run the seeded property harness.
    Proptest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
        #[arg(long, default_value_t = 1e-9)]
        boundary_band: f64,
        #[arg(long, default_value_t = 8)]
        max_vertices: usize,
        #[arg(long, default_value_t = 5)]
        max_marks: u32,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Run the membership properties against a broken predicate.
        #[arg(long, value_enum, hide = true)]
        mutant: Option<Mutant>,
    },
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Why a command did not succeed; the variant decides the exit code.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Check(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Check(_) => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<MetricGraph, Failure> {
    with_path(path, MetricGraph::from_json(&read(path)?))
}

fn read_valid_graph(path: &Path) -> Result<MetricGraph, Failure> {
    let g = read_graph(path)?;
    with_path(path, g.ensure_valid())?;
    Ok(g)
}

fn read_point(path: &Path) -> Result<ModuliPoint, Failure> {
    with_path(path, ModuliPoint::from_json(&read(path)?))
}

fn emit(text: &str, output: &Option<PathBuf>, out: &mut dyn std::io::Write) -> Result<(), Failure> {
    match output {
        Some(path) => {
            std::fs::write(path, format!("{text}\n")).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => writeln!(out, "{text}").map_err(|e| Failure::Input(e.to_string())),
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

/// Runs one command line. `seed_override` is the value of `MODULI_SEED`,
/// which takes precedence over any `--seed` flag.
pub fn run<I, T>(args: I, seed_override: Option<&str>, out: &mut dyn std::io::Write) -> Result<(), Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return Ok(());
        }
        Err(e) => return Err(Failure::Input(e.to_string())),
    };
    let env_seed = seed_override
        .map(|s| s.trim().parse::<u64>().map_err(|e| Failure::Input(format!("MODULI_SEED={s}: {e}"))))
        .transpose()?;
    let seed = |flag: u64| env_seed.unwrap_or(flag);

    match cli.command {
        Command::Validate { input } => {
            let g = read_graph(&input)?;
            let violations = g.validate();
            if !violations.is_empty() {
                let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                return Err(Failure::Input(format!("{}: invalid graph: {}", input.display(), list.join("; "))));
            }
            let report = json!({
                "valid": true,
                "genus": g.genus()?,
                "marks": g.mark_count(),
                "connected": g.is_connected(),
            });
            emit(&pretty(&report), &None, out)
        }
        Command::Genus { input } => {
            let g = read_valid_graph(&input)?;
            emit(&g.genus()?.to_string(), &None, out)
        }
        Command::ShrinkBridges { input, tau, output } => {
            let g = read_valid_graph(&input)?;
            emit(&shrink_bridges(&g, &tau)?.to_json(), &output, out)
        }
        Command::Retract { input, output } => {
            let g = read_valid_graph(&input)?;
            emit(&conjectured_retract(&g)?.to_json(), &output, out)
        }
        Command::Canonicalize { input, graph, output } => {
            if graph {
                let g = read_valid_graph(&input)?;
                let (p, total) = normalize(&g)?;
                let v = json!({ "point": p, "total_length": total.to_string() });
                emit(&pretty(&v), &output, out)
            } else {
                emit(&read_point(&input)?.to_json(), &output, out)
            }
        }
        Command::IsoEqual { a, b } => {
            let (a, b) = (read_point(&a)?, read_point(&b)?);
            emit(&iso_equal(&a, &b).to_string(), &None, out)
        }
        Command::CheckNeighborhood { x, y, eps, mode } => {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Failure::Input(format!("eps must be positive, got {eps}")));
            }
            let (x, y) = (read_point(&x)?, read_point(&y)?);
            let verdict = in_neighborhood(&x, &y, eps, mode.into());
            emit(&serde_json::to_string(&verdict).expect("verdict serializes"), &None, out)
        }
        Command::SampleNeighbor { input, alpha, seed: s, output } => {
            let x = read_point(&input)?;
            let y = sample_neighbor(&x, alpha, seed(s)).map_err(|e| match e {
                Error::Generator(_) => Failure::Check(e.to_string()),
                e => Failure::Input(e.to_string()),
            })?;
            emit(&y.to_json(), &output, out)
        }
        Command::Scan { input, w, tau, output } => {
            let x = read_point(&input)?;
            let param = match (w, tau) {
                (Some(w), _) => ScanParameter::new(w)?,
                (None, Some(tau)) => HomotopyTime::new(tau)?.scan_parameter(),
                (None, None) => unreachable!("clap requires --w or --tau"),
            };
            emit(&scan(&x, &param).to_json(), &output, out)
        }
        Command::Certify { input, w, alpha, eps, samples, seed: s, output } => {
            let x = read_point(&input)?;
            let w = ScanParameter::new(w)?;
            let report = continuity_certificate(&x, &w, alpha, eps, samples, seed(s))?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            emit(&text, &output, out)?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Check(format!("{} of {} samples failed", report.failures.len(), report.samples)))
            }
        }
        Command::Render { input, frames, out_dir, size, no_labels } => {
            let x = read_point(&input)?;
            let spec = RenderSpec { frames, out_dir, size, labels: !no_labels };
            let written = render::render_frames(&x, &spec).map_err(Failure::Input)?;
            emit(&format!("wrote {} frame(s) to {}", written.len(), spec.out_dir.display()), &None, out)
        }
        Command::Proptest { seed: s, cases, tolerance, boundary_band, max_vertices, max_marks, output, mutant } => {
            let cfg = HarnessConfig { seed: seed(s), cases, tolerance, boundary_band, max_vertices, max_marks };
            let predicate = match mutant {
                Some(Mutant::Flipped) => Predicate::Flipped,
                None => Predicate::Standard,
            };
            let report = harness::proptest_run(&cfg, predicate).map_err(Failure::Input)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            emit(&text, &output, out)?;
            if report.ok {
                Ok(())
            } else {
                Err(Failure::Check(format!("failing properties: {}", report.failed_properties.join(", "))))
            }
        }
    }
}
