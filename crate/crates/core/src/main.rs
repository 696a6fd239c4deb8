use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::json;

use projshape::dataset::{parse_dataset, Format, LandmarkDataset};
use projshape::distributions::{calibration_harness, Scenario};
use projshape::extrinsic::{bootstrap_extrinsic_p_value, extrinsic_mean, one_sample_extrinsic_test};
use projshape::plot::emit_scatter;
use projshape::projective::{invariants_from_axial, AxialPoint};
use projshape::report::TestReport;
use projshape::reproduce::{self, windows_analysis, buildings_analysis, faces_analysis};
use projshape::rotation::two_sample_axis_test;
use projshape::shape::ProjectiveShape;
use projshape::tangent::{
    bootstrap_directional_p_value, directional_t_squared, euclidean_two_sample_hotelling, mean_directions, one_sample_hotelling,
    two_sample_hotelling,
};
use projshape::{tolerance, Error, Result};

#[derive(Parser)]
#[command(name = "projshape", version, about = "Projective shape analysis of landmark configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Landmark dataset (CSV or JSON)
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Input format; guessed from the extension when omitted
    #[arg(long, global = true)]
    format: Option<String>,
    /// Frame landmarks, 1-based and comma separated (default 1..m+2)
    #[arg(long, global = true, value_delimiter = ',')]
    frame: Option<Vec<usize>>,
    /// Significance level (rotcmp default 0.07)
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Bootstrap resamples
    #[arg(long = "B", global = true)]
    b: Option<usize>,
    /// Seed of the bootstrap and simulation streams
    #[arg(long, global = true, env = "PROJSHAPE_SEED", default_value_t = 1)]
    seed: u64,
    /// Directory for report files and plots
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the report as JSON instead of text
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OneSample {
    Extrinsic,
    Tangent,
    Directional,
}

#[derive(Clone, Copy, ValueEnum)]
enum TwoSample {
    Tangent,
    Invariant,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    #[value(name = "ex5.1")]
    Ex51,
    #[value(name = "ex5.2")]
    Ex52,
    #[value(name = "ex5.3")]
    Ex53,
}

#[derive(Subcommand)]
enum Command {
    /// Registered axial coordinates of every view
    Register {
        /// Only this group (default: all groups)
        #[arg(long)]
        group: Option<String>,
    },
    /// Extrinsic means and mean directions per group
    Mean {
        /// Only this group (default: all groups)
        #[arg(long)]
        group: Option<String>,
    },
    /// One-sample test of a hypothesized mean shape
    Test1 {
        /// Group to test (default: the first group)
        #[arg(long)]
        group: Option<String>,
        /// Hypothesized axes, coordinates comma separated, axes separated by ';'
        #[arg(long)]
        mu0: String,
        #[arg(long, value_enum, default_value = "extrinsic")]
        method: OneSample,
    },
    /// Two-sample test of equal mean shapes
    Test2 {
        /// Two group names, comma separated (default: the first two groups)
        #[arg(long, value_delimiter = ',')]
        groups: Option<Vec<String>>,
        #[arg(long, value_enum, default_value = "tangent")]
        method: TwoSample,
    },
    /// Bootstrap comparison of two mean axes through their rotation
    Rotcmp {
        /// Two group names, comma separated (default: the first two groups)
        #[arg(long, value_delimiter = ',')]
        groups: Option<Vec<String>>,
        /// Scale applied to G before forming intervals (default sqrt(n1 + n2))
        #[arg(long)]
        scale: Option<f64>,
    },
    /// Monte Carlo calibration of a test statistic
    Calibrate {
        /// extrinsic, tangent or directional
        #[arg(long, default_value = "extrinsic")]
        scenario: String,
        /// Sample size per replication (default: the scenario's)
        #[arg(long)]
        n: Option<usize>,
        /// Monte Carlo replications
        #[arg(long, default_value_t = 2000)]
        reps: usize,
        /// Concentration override
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Re-run an analysis on an embedded dataset
    Reproduce {
        #[arg(value_enum)]
        example: Example,
    },
}

struct Output {
    text: String,
    json: serde_json::Value,
}

fn load(c: &Common) -> Result<LandmarkDataset> {
    let path = c.input.as_deref().ok_or_else(|| Error::Argument("--input is required".into()))?;
    let format = match &c.format {
        Some(f) => f.parse()?,
        None => Format::from_path(path),
    };
    parse_dataset(path, format)
}

fn frame(c: &Common) -> Result<Option<Vec<usize>>> {
    match &c.frame {
        None => Ok(None),
        Some(f) if f.contains(&0) => Err(Error::Argument("--frame indices are 1-based".into())),
        Some(f) => Ok(Some(f.iter().map(|i| i - 1).collect())),
    }
}

fn groups_of<'a>(ds: &'a LandmarkDataset, one: &'a Option<String>) -> Result<Vec<&'a str>> {
    match one {
        Some(g) => Ok(vec![ds.group(g)?.name.as_str()]),
        None => Ok(ds.group_names()),
    }
}

fn pair<'a>(ds: &'a LandmarkDataset, groups: &'a Option<Vec<String>>) -> Result<(&'a str, &'a str)> {
    match groups {
        Some(g) if g.len() == 2 => Ok((ds.group(&g[0])?.name.as_str(), ds.group(&g[1])?.name.as_str())),
        Some(_) => Err(Error::Argument("--groups takes exactly two names".into())),
        None if ds.groups.len() >= 2 => Ok((ds.groups[0].name.as_str(), ds.groups[1].name.as_str())),
        None => Err(Error::Argument("two-sample commands need two groups".into())),
    }
}

fn axes_json(axes: &[AxialPoint]) -> serde_json::Value {
    json!(axes.iter().map(|a| a.canonical().iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>())
}

fn axes_text(axes: &[AxialPoint]) -> String {
    axes.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
}

fn report_output(reports: Vec<(&str, TestReport)>) -> Output {
    let mut text = String::new();
    for (title, r) in &reports {
        let _ = writeln!(text, "[{title}]");
        text.push_str(&r.to_text());
    }
    let json = json!(reports.iter().map(|(t, r)| json!({ "name": t, "report": r })).collect::<Vec<_>>());
    Output { text, json }
}

fn parse_mu0(s: &str, m: usize, q: usize) -> Result<Vec<AxialPoint>> {
    let axes = s
        .split(';')
        .map(|a| {
            let v = a.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| Error::Argument(format!("bad --mu0 coordinate '{x}'")))).collect::<Result<Vec<_>>>()?;
            AxialPoint::from_slice(&v)
        })
        .collect::<Result<Vec<_>>>()?;
    if axes.len() != q || axes.iter().any(|a| a.dim() != m) {
        return Err(Error::Argument(format!("--mu0 needs {q} axes with {} coordinates each", m + 1)));
    }
    Ok(axes)
}

/// Unit representatives of `mu0` signed to agree with the sample mean directions.
fn aligned_directions(mu0: &[AxialPoint], reference: &[DVector<f64>]) -> Vec<DVector<f64>> {
    mu0.iter().zip(reference).map(|(a, r)| a.aligned_to(r)).collect()
}

fn run(cli: &Cli) -> Result<Output> {
    let c = &cli.common;
    let alpha = c.alpha;
    match &cli.command {
        Command::Register { group } => {
            let ds = load(c)?;
            let fr = frame(c)?;
            let mut text = String::new();
            let mut out = Vec::new();
            for g in groups_of(&ds, group)? {
                let shapes = ds.shapes(g, fr.as_deref())?;
                for (v, s) in ds.group(g)?.views.iter().zip(&shapes) {
                    let _ = writeln!(text, "{g} {}: {}", v.name, axes_text(s.axes()));
                    out.push(json!({ "group": g, "view": v.name, "axes": axes_json(s.axes()) }));
                }
            }
            Ok(Output { text, json: json!(out) })
        }
        Command::Mean { group } => {
            let ds = load(c)?;
            let fr = frame(c)?;
            let mut text = String::new();
            let mut out = Vec::new();
            for g in groups_of(&ds, group)? {
                let shapes = ds.shapes(g, fr.as_deref())?;
                let mean = extrinsic_mean(&shapes)?;
                let md = mean_directions(&ds.directional_sample(g, fr.as_deref())?)?;
                let gaps: Vec<f64> = (0..mean.eigen.q()).map(|s| mean.eigen.gap(s)).collect();
                let _ = writeln!(text, "{g} (n = {}): extrinsic mean {}", mean.n, axes_text(&mean.axes));
                let _ = writeln!(text, "  spectral gaps: {}", gaps.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" "));
                let _ = writeln!(text, "  Rbar: {}", md.rbar.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" "));
                out.push(json!({ "group": g, "n": mean.n, "extrinsic_mean": axes_json(&mean.axes), "gaps": gaps, "rbar": md.rbar }));
            }
            Ok(Output { text, json: json!(out) })
        }
        Command::Test1 { group, mu0, method } => {
            let ds = load(c)?;
            let fr = frame(c)?;
            let g = groups_of(&ds, group)?[0];
            let shapes: Vec<ProjectiveShape> = ds.shapes(g, fr.as_deref())?;
            let (m, q) = (shapes[0].m(), shapes[0].q());
            let mu0 = parse_mu0(mu0, m, q)?;
            let mut reports = Vec::new();
            match method {
                OneSample::Extrinsic => {
                    reports.push(("extrinsic chi-squared", one_sample_extrinsic_test(&shapes, &mu0)?));
                    if let Some(b) = c.b.filter(|&b| b > 0) {
                        reports.push(("bootstrap extrinsic", bootstrap_extrinsic_p_value(&shapes, &mu0, b, c.seed)?));
                    }
                }
                OneSample::Tangent | OneSample::Directional => {
                    let sample = ds.directional_sample(g, fr.as_deref())?;
                    let dirs = aligned_directions(&mu0, &mean_directions(&sample)?.mu);
                    if matches!(method, OneSample::Tangent) {
                        reports.push(("tangent one-sample", one_sample_hotelling(&sample, &dirs)?));
                    } else {
                        reports.push(("directional T2", directional_t_squared(&sample, &dirs)?.0));
                    }
                    if let Some(b) = c.b.filter(|&b| b > 0) {
                        reports.push(("bootstrap directional", bootstrap_directional_p_value(&sample, &dirs, b, c.seed)?));
                    }
                }
            }
            Ok(report_output(reports))
        }
        Command::Test2 { groups, method } => {
            let ds = load(c)?;
            let fr = frame(c)?;
            let (a, b) = pair(&ds, groups)?;
            let r = match method {
                TwoSample::Tangent => two_sample_hotelling(&ds.directional_sample(a, fr.as_deref())?, &ds.directional_sample(b, fr.as_deref())?)?,
                TwoSample::Invariant => {
                    let inv = |g: &str| -> Result<Vec<_>> {
                        ds.shapes(g, fr.as_deref())?.iter().map(|s| {
                            if s.q() != 1 {
                                return Err(Error::Argument("invariant test needs a single axis per view".into()));
                            }
                            invariants_from_axial(&s.axes()[0])
                        }).collect()
                    };
                    euclidean_two_sample_hotelling(&inv(a)?, &inv(b)?)?
                }
            };
            Ok(report_output(vec![("two-sample", r)]))
        }
        Command::Rotcmp { groups, scale } => {
            let ds = load(c)?;
            let fr = frame(c)?;
            let (a, b) = pair(&ds, groups)?;
            let t = two_sample_axis_test(&ds.shapes(a, fr.as_deref())?, &ds.shapes(b, fr.as_deref())?, c.b.unwrap_or(reproduce::BUILDINGS_B), c.seed, alpha.unwrap_or(reproduce::BUILDINGS_ALPHA), *scale)?;
            if let Some(dir) = &c.out {
                emit_scatter(&t.cloud, &dir.join("rotation_cloud"), t.scale)?;
            }
            let mut out = report_output(vec![("rotation axis bootstrap", t.report)]);
            let _ = writeln!(out.text, "identity in region: {}", if t.accept { "yes" } else { "no" });
            Ok(out)
        }
        Command::Calibrate { scenario, n, reps, kappa } => {
            let mut s = Scenario::named(scenario)?;
            if let Some(k) = kappa {
                s.kappa = *k;
            }
            let r = calibration_harness(&s, n.unwrap_or(s.default_n), *reps, c.seed)?;
            if let Some(dir) = &c.out {
                write_file(&dir.join("calibration.csv"), &r.to_csv())?;
            }
            Ok(Output { text: r.to_text(), json: json!(r) })
        }
        Command::Reproduce { example } => match example {
            Example::Ex51 => {
                let r = windows_analysis(c.b.unwrap_or(reproduce::WINDOWS_B), c.seed)?;
                Ok(Output { text: r.to_text(), json: json!(r) })
            }
            Example::Ex52 => {
                let r = buildings_analysis(c.b.unwrap_or(reproduce::BUILDINGS_B), c.seed)?;
                if let Some(dir) = &c.out {
                    emit_scatter(&r.cloud, &dir.join("ex5_2_cloud"), r.scale)?;
                }
                Ok(Output { text: r.to_text(), json: json!(r) })
            }
            Example::Ex53 => {
                let r = faces_analysis(c.b.unwrap_or(reproduce::FACES_B), c.seed)?;
                Ok(Output { text: r.to_text(), json: json!(r) })
            }
        },
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> Result<String> {
        if let Some(dir) = &cli.common.out {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        }
        let out = run(&cli)?;
        let tol = tolerance::summary();
        let rendered = if cli.common.json {
            serde_json::to_string_pretty(&json!({ "result": out.json, "seed": cli.common.seed, "tolerances": tol })).map_err(|e| Error::Internal(e.to_string()))? + "\n"
        } else {
            format!("{}\ntolerances: {tol}\n", out.text)
        };
        if let Some(dir) = &cli.common.out {
            write_file(&dir.join(if cli.common.json { "report.json" } else { "report.txt" }), &rendered)?;
        }
        Ok(rendered)
    })();
    match result {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
