//! Batch experiment runner behind the `cuspgeom` binary.
//!
//! Every subcommand writes one primary artifact: JSON embedding the parsed
//! configuration and [`VERSION`], or CSV where a table is the natural form.
//! Outputs depend only on the configuration, so reruns are byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::audit::{
    build_asdim_certificate, check_cover_certificate, geometry_profile, orbit_growth_audit,
    separated_count, tree_lipschitz_map, AsdimKind,
};
use crate::error::{invalid, Error, Result};
use crate::groups::{FinitelyGenerated, GroupModel};
use crate::growth::{a1_a2_report, fit_degree, growth_table, Verdict};
use crate::horoball::{
    default_truncation, sample_extent, CuspedSpace, FreeProductZZ2, HoroPoint, HoroballSample,
    HoroballSpace, DEFAULT_MESH_NODES,
};
use crate::metric::{
    four_point_delta, FiniteMetricSpace, MetricSpace, WordMetric, DEFAULT_MAX_VERTICES,
};
use crate::VERSION;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CUSPGEOM_OUT_DIR";

/// Exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Failure = 1,
    InvalidConfig = 2,
    Cap = 3,
    Violation = 4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileSpace {
    Horoball,
    Cusped,
}

#[derive(Clone, Debug, Parser, Serialize)]
#[command(
    name = "cuspgeom",
    version,
    about = "Growth, horoball and cusped-space experiments"
)]
pub struct Cli {
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Hard cap on enumerated vertices or points.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_VERTICES)]
    pub max_vertices: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; relative paths resolve against the output directory.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Output directory; without `--out` the file is `<command>.<format>`.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase", tag = "name")]
pub enum Command {
    /// Growth table and polynomial-degree fit.
    Growth {
        #[arg(long)]
        group: String,
        #[arg(long)]
        rmax: u32,
        /// Fit window `lo,hi`; defaults to the upper half of the table.
        #[arg(long, value_parser = parse_window)]
        window: Option<(u32, u32)>,
    },
    /// Covering numbers `N(ε, R)` against the growth verdict.
    Covering {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8")]
        radii: Vec<u32>,
        #[arg(long, value_parser = parse_window)]
        window: Option<(u32, u32)>,
    },
    /// Horosphere distortion audit and mesh cross-check of the closed form.
    Horoball {
        #[arg(long)]
        group: String,
        /// Radius of the base ball.
        #[arg(long, default_value_t = 6)]
        radius: u32,
        #[arg(long, default_value_t = 2.0)]
        level: f64,
        #[arg(long, default_value_t = 8.0)]
        truncation: f64,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 20)]
        mesh_pairs: usize,
    },
    /// Covering profile `f(R)` at basepoints on several levels.
    Profile {
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value_t = ProfileSpace::Horoball)]
        space: ProfileSpace,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        radii: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        levels: Vec<u32>,
        /// Ball radius of the cusped space.
        #[arg(long, default_value_t = 3)]
        radius: u32,
    },
    /// Cusped space summary and four-point estimate on a sample.
    Cusped {
        #[arg(long, default_value = "z*z2")]
        group: String,
        #[arg(long, default_value_t = 3)]
        radius: u32,
        #[arg(long)]
        truncation: Option<u32>,
        #[arg(long, default_value_t = 128)]
        sample: usize,
        #[arg(long, default_value_t = 20_000_000)]
        quadruples: u64,
    },
    /// Tree map and separated counts on a finite horoball sample.
    Treemap {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 10)]
        radius: u32,
        #[arg(long, default_value_t = 4)]
        top: u32,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6")]
        sep_radii: Vec<f64>,
    },
    /// Builds and checks an asymptotic-dimension cover certificate.
    Asdim {
        #[arg(long, value_enum)]
        kind: AsdimKindArg,
        #[arg(long)]
        extent: usize,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 3)]
        valence: usize,
    },
    /// Orbit counts in the horoball against the growth function.
    Orbit {
        #[arg(long)]
        group: String,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
        radii: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum AsdimKindArg {
    IntegerLine,
    #[value(name = "integer_grid_2d")]
    #[serde(rename = "integer_grid_2d")]
    IntegerGrid2d,
    RegularTree,
}

impl From<AsdimKindArg> for AsdimKind {
    fn from(k: AsdimKindArg) -> Self {
        match k {
            AsdimKindArg::IntegerLine => AsdimKind::IntegerLine,
            AsdimKindArg::IntegerGrid2d => AsdimKind::IntegerGrid2d,
            AsdimKindArg::RegularTree => AsdimKind::RegularTree,
        }
    }
}

fn parse_window(s: &str) -> std::result::Result<(u32, u32), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("window must be `lo,hi`, got `{s}`"))?;
    let lo = lo.trim().parse::<u32>().map_err(|e| e.to_string())?;
    let hi = hi.trim().parse::<u32>().map_err(|e| e.to_string())?;
    Ok((lo, hi))
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Growth { .. } => "growth",
            Command::Covering { .. } => "covering",
            Command::Horoball { .. } => "horoball",
            Command::Profile { .. } => "profile",
            Command::Cusped { .. } => "cusped",
            Command::Treemap { .. } => "treemap",
            Command::Asdim { .. } => "asdim",
            Command::Orbit { .. } => "orbit",
        }
    }
}

/// The primary artifact of a run and whether an audit found a violation.
pub struct Artifact {
    pub body: Vec<u8>,
    pub violation: bool,
}

enum Table {
    None,
    Csv(Vec<u8>),
}

impl Cli {
    fn envelope(&self, result: Value) -> Result<Vec<u8>> {
        let doc = json!({ "version": VERSION, "config": self, "result": result });
        let mut body = serde_json::to_vec_pretty(&doc)?;
        body.push(b'\n');
        Ok(body)
    }

    fn artifact(&self, result: Value, table: Table, violation: bool) -> Result<Artifact> {
        let body = match (self.format, table) {
            (Format::Json, _) => self.envelope(result)?,
            (Format::Csv, Table::Csv(bytes)) => bytes,
            (Format::Csv, Table::None) => {
                return Err(invalid(format!(
                    "`{}` has no CSV output",
                    self.command.name()
                )));
            }
        };
        Ok(Artifact { body, violation })
    }

    /// Destination file, if any.
    pub fn destination(&self) -> Option<PathBuf> {
        let ext = match self.format {
            Format::Json => "json",
            Format::Csv => "csv",
        };
        match (&self.out, &self.out_dir) {
            (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
            (Some(p), _) => Some(p.clone()),
            (None, Some(dir)) => Some(dir.join(format!("{}.{ext}", self.command.name()))),
            (None, None) => None,
        }
    }
}

/// Runs the configured experiment and returns its artifact.
pub fn execute(cli: &Cli) -> Result<Artifact> {
    let cap = cli.max_vertices;
    match &cli.command {
        Command::Growth {
            group,
            rmax,
            window,
        } => {
            let g = GroupModel::parse(group)?;
            let table = growth_table(&g, *rmax, cap)?;
            let fit = match window {
                Some((lo, hi)) => Some(fit_degree(&table, *lo, *hi)?),
                None if *rmax >= 4 => Some(fit_degree(&table, (*rmax / 2).max(2), *rmax)?),
                None => None,
            };
            let verdict = fit.as_ref().map_or(Verdict::Inconclusive, |f| f.verdict);
            let mut csv = Vec::new();
            table.write_csv(&mut csv, &[])?;
            let result =
                json!({ "model": table.model, "gr": table.gr, "fit": fit, "verdict": verdict });
            cli.artifact(result, Table::Csv(csv), false)
        }
        Command::Covering {
            group,
            eps,
            radii,
            window,
        } => {
            let g = GroupModel::parse(group)?;
            let r_max = radii.iter().copied().max().unwrap_or(0);
            let window = window.unwrap_or(((r_max / 2).max(2), r_max.max(4)));
            let report = a1_a2_report(&g, *eps, radii, window, cap)?;
            let table = growth_table(&g, r_max, cap)?;
            let counts: Vec<(u32, u64)> = report
                .radii
                .iter()
                .copied()
                .zip(report.counts.iter().copied())
                .collect();
            let mut csv = Vec::new();
            table.write_csv(&mut csv, &counts)?;
            let violation =
                report.verdict != "CONSISTENT" || report.iteration_holds.iter().any(|h| !h);
            cli.artifact(serde_json::to_value(&report)?, Table::Csv(csv), violation)
        }
        Command::Horoball {
            group,
            radius,
            level,
            truncation,
            pairs,
            step,
            mesh_pairs,
        } => {
            let g = GroupModel::parse(group)?;
            horoball_command(
                cli,
                &g,
                *radius,
                *level,
                *truncation,
                *pairs,
                *step,
                *mesh_pairs,
            )
        }
        Command::Profile {
            group,
            space,
            radii,
            levels,
            radius,
        } => match space {
            ProfileSpace::Horoball => {
                let g = GroupModel::parse(group)?;
                let (mut base_radius, mut top) = (0, 1);
                for &l in levels {
                    for &r in radii {
                        let (b, t) = sample_extent(l, r.max(1.0));
                        base_radius = base_radius.max(b);
                        top = top.max(t);
                    }
                }
                let base = WordMetric::new(&g, base_radius, cap)?;
                let sample = HoroballSample::new(base, top)?;
                let basepoints: Vec<usize> = levels
                    .iter()
                    .map(|&l| {
                        sample
                            .index(0, l)
                            .ok_or_else(|| invalid(format!("level {l} must be at least 1")))
                    })
                    .collect::<Result<_>>()?;
                profile_artifact(
                    cli,
                    &sample,
                    &format!("C({})", g.display_name()),
                    radii,
                    &basepoints,
                )
            }
            ProfileSpace::Cusped => {
                let g = cusped_group(group)?;
                let c = CuspedSpace::build(
                    &g,
                    &g.parabolic_generators(),
                    *radius,
                    default_truncation(*radius),
                    cap,
                )?;
                let nodes: Vec<usize> = (0..c.node_count()).collect();
                let m = c.metric_on(&nodes)?;
                let basepoints: Vec<usize> = levels
                    .iter()
                    .map(|&l| {
                        c.node(0, l).ok_or_else(|| {
                            invalid(format!("no node over the identity on level {l}"))
                        })
                    })
                    .collect::<Result<_>>()?;
                profile_artifact(cli, &m, &g.display_name(), radii, &basepoints)
            }
        },
        Command::Cusped {
            group,
            radius,
            truncation,
            sample,
            quadruples,
        } => {
            let g = cusped_group(group)?;
            let t = truncation.unwrap_or_else(|| default_truncation(*radius));
            let c = CuspedSpace::build(&g, &g.parabolic_generators(), *radius, t, cap)?;
            let nodes = c.delta_sample(*sample, cli.seed);
            let delta = four_point_delta(&c.metric_on(&nodes)?, *quadruples, cli.seed)?;
            let mut csv = Vec::new();
            c.write_edges(&mut csv)?;
            let result = json!({ "summary": c.summary(&g.display_name(), Some(delta)), "sample_size": nodes.len() });
            cli.artifact(result, Table::Csv(csv), false)
        }
        Command::Treemap {
            group,
            radius,
            top,
            depth,
            sep_radii,
        } => {
            let g = GroupModel::parse(group)?;
            let base = WordMetric::new(&g, *radius, cap)?;
            let sample =
                FiniteMetricSpace::materialize(&HoroballSample::new(base, *top)?, f64::INFINITY)?;
            let map = tree_lipschitz_map(&sample, 0, *depth, cap)?;
            let check = map.verify(&sample);
            let mut violation = !(check.lipschitz && check.dense);
            let mut rows = Vec::new();
            for &r in sep_radii {
                let count = separated_count(&sample, 0, r, 2.0)?;
                let bound = (map.valence as f64).powf(r + 1.0);
                violation |= count as f64 > bound;
                rows.push(json!({ "R": r, "separated": count, "bound": bound }));
            }
            let result = json!({
                "space": format!("C({}) sample", g.display_name()),
                "points": sample.len(),
                "valence": map.valence,
                "tree_vertices": map.image.len(),
                "check": check,
                "separated": rows,
            });
            cli.artifact(result, Table::None, violation)
        }
        Command::Asdim {
            kind,
            extent,
            d,
            valence,
        } => {
            let (space, cert) = build_asdim_certificate((*kind).into(), *extent, *d, *valence)?;
            let m = space.as_metric();
            let checked = check_cover_certificate(m, &cert)?;
            let c = &checked.certificate;
            let result = json!({
                "space": c.space,
                "multiplicity": c.multiplicity,
                "claimed_asdim": c.claimed_asdim,
                "consistent": c.is_consistent(),
                "witness": m.label(checked.witness),
                "certificate": c.to_json(m),
            });
            let violation = c.is_consistent() != Some(true);
            cli.artifact(result, Table::None, violation)
        }
        Command::Orbit { group, radii } => {
            let g = GroupModel::parse(group)?;
            let report = orbit_growth_audit(&g, radii, cap)?;
            let violation = !report.identity_holds();
            cli.artifact(serde_json::to_value(&report)?, Table::None, violation)
        }
    }
}

fn cusped_group(spec: &str) -> Result<FreeProductZZ2> {
    match spec.trim() {
        "z*z2" => Ok(FreeProductZZ2::new()),
        other => Err(invalid(format!(
            "cusped spaces are available for `z*z2` only, got `{other}`"
        ))),
    }
}

fn profile_artifact<M: MetricSpace + ?Sized>(
    cli: &Cli,
    m: &M,
    name: &str,
    radii: &[f64],
    basepoints: &[usize],
) -> Result<Artifact> {
    let profile = geometry_profile(m, name, radii, basepoints, cli.max_vertices)?;
    let ratios: Vec<Value> = radii
        .iter()
        .map(|&r| json!({ "R": r, "ratio": profile.cover_ratio(r) }))
        .collect();
    let mut csv = Vec::new();
    profile.write_csv(&mut csv)?;
    let result = json!({ "profile": profile, "ratios": ratios });
    cli.artifact(result, Table::Csv(csv), false)
}

#[allow(clippy::too_many_arguments)]
fn horoball_command(
    cli: &Cli,
    g: &GroupModel,
    radius: u32,
    level: f64,
    truncation: f64,
    pairs: usize,
    step: f64,
    mesh_pairs: usize,
) -> Result<Artifact> {
    let base = WordMetric::new(g, radius, cli.max_vertices)?;
    let n = base.len();
    let space = HoroballSpace::new(base, truncation)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let same_level: Vec<(usize, usize)> = (0..pairs)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect();
    let report = space.distortion_audit(level, &same_level)?;

    // mesh pairs stay near the identity so the mesh remains small
    let near = space.base().ball().growth()[radius.min(2) as usize] as usize;
    let top = truncation.min(4.0).floor() as u32;
    let mut max_gap: f64 = 0.0;
    let mut checked = 0;
    for _ in 0..mesh_pairs {
        let p = HoroPoint::new(
            rng.random_range(0..near),
            f64::from(rng.random_range(1..=top)),
        );
        let q = HoroPoint::new(
            rng.random_range(0..near),
            f64::from(rng.random_range(1..=top)),
        );
        let Ok(exact) = space.distance(p, q) else {
            continue;
        };
        let mesh = space.mesh_oracle_distance(p, q, step, DEFAULT_MESH_NODES)?;
        max_gap = max_gap.max((mesh - exact).abs());
        checked += 1;
    }
    let mesh_ok = max_gap <= 2.0 * step;
    let violation = !report.passed(1e-9) || !mesh_ok;
    let result = json!({
        "model": g.display_name(),
        "distortion": report,
        "mesh": { "pairs_checked": checked, "step": step, "max_gap": max_gap, "within_two_steps": mesh_ok },
    });
    cli.artifact(result, Table::None, violation)
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::InvalidInput(_) | Error::Domain(_) | Error::Overflow(_) => ExitCode::InvalidConfig,
        Error::SizeCap { .. } | Error::Size(_) | Error::Exactness(_) => ExitCode::Cap,
        Error::InvalidCertificate(_) => ExitCode::Violation,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => ExitCode::Failure,
    }
}

/// Parses `args`, runs the experiment, writes the artifact and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() {
                ExitCode::InvalidConfig as i32
            } else {
                ExitCode::Success as i32
            };
        }
    };
    let outcome = execute(&cli).and_then(|artifact| {
        match cli.destination() {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                w.write_all(&artifact.body)?;
                w.flush()?;
            }
            None => stdout.write_all(&artifact.body)?,
        }
        Ok(artifact.violation)
    });
    match outcome {
        Ok(false) => ExitCode::Success as i32,
        Ok(true) => {
            let _ = writeln!(stderr, "audit violation detected");
            ExitCode::Violation as i32
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e) as i32
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("cuspgeom").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn growth_degenerate_window() {
        let (code, out, _) = run_capture(&["growth", "--group", "free:2", "--rmax", "0"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["gr"], json!([1]));
        assert_eq!(v["result"]["verdict"]["kind"], "inconclusive");
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["config"]["seed"], 0);
        assert_eq!(v["config"]["command"]["name"], "growth");
    }

    #[test]
    fn asdim_line() {
        let (code, out, _) = run_capture(&[
            "asdim",
            "--kind",
            "integer_line",
            "--extent",
            "200",
            "--d",
            "3",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["multiplicity"], 2);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run_capture(&["growth", "--group", "nope", "--rmax", "3"]).0,
            2
        );
        assert_eq!(run_capture(&["growth", "--rmax", "3"]).0, 2);
        assert_eq!(
            run_capture(&[
                "growth",
                "--group",
                "free:2",
                "--rmax",
                "12",
                "--max-vertices",
                "100"
            ])
            .0,
            3
        );
        assert_eq!(
            run_capture(&[
                "asdim",
                "--kind",
                "regular_tree",
                "--extent",
                "3",
                "--d",
                "1",
                "--format",
                "csv"
            ])
            .0,
            2
        );
    }

    #[test]
    fn csv_growth() {
        let (code, out, _) = run_capture(&[
            "growth",
            "--group",
            "free-abelian:2",
            "--rmax",
            "2",
            "--format",
            "csv",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("R,gr,N_eps\n0,1,\n1,5,\n2,13,"), "{out}");
    }
}
