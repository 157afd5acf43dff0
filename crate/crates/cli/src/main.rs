use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use divider_core::divider::{divider_trace, divider_validate, DividerConfig};
use divider_core::evolute::{evolute_polylines, find_cusps};
use divider_core::export;
use divider_core::lattice::{discrete_divider_with, Bitmap, LatticeParams};
use divider_core::lclt::pi_set_raster_with;
use divider_core::{parse_preset, Error, MetricKind, ParametricCurve, Point2, Window};

#[derive(Parser, Debug)]
#[command(name = "divtool", version, about = "Divider sets, contact curvature and lattice dividers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trace the Divider of a curve and write CSV + SVG.
    Divider(CurveArgs),
    /// Rasterize the curvature of locally convex type over a window.
    LcltField(CurveArgs),
    /// Locate evolute cusps and write CSV + SVG.
    Evolute(CurveArgs),
    /// Discrete Divider of a PBM/PGM bitmap.
    Lattice(LatticeArgs),
    /// Trace the Divider and check it lies in the closure of the positive-K_lct set.
    Validate(CurveArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct CommonArgs {
    /// Flat key=value configuration file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
struct CurveArgs {
    /// Curve preset, e.g. `ellipse:2,1` or `hypotrochoid:5,1,2`.
    #[arg(long)]
    preset: Option<String>,
    /// Whitespace-separated `x y` rows for a sampled curve.
    #[arg(long, conflicts_with = "preset")]
    points: Option<PathBuf>,
    /// Treat the sampled points as a closed curve.
    #[arg(long)]
    closed: bool,
    #[arg(long)]
    n_scan: Option<usize>,
    #[arg(long)]
    n_grid: Option<usize>,
    /// Contact radius ceiling, in curve diameters.
    #[arg(long)]
    rmax: Option<f64>,
    /// `x0,y0,x1,y1`
    #[arg(long)]
    window: Option<String>,
    /// `WxH`
    #[arg(long)]
    res: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug, Clone, Default)]
struct LatticeArgs {
    /// Plain PBM (P1) or PGM (P2) input.
    input: PathBuf,
    /// euclid, maxcoord or add.
    #[arg(long)]
    metric: Option<String>,
    /// One pass of thinning on the result.
    #[arg(long)]
    thin: bool,
    #[arg(long)]
    sep_factor: Option<f64>,
    #[arg(long)]
    feet_tol: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

/// Effective settings after merging flags, the config file and defaults.
#[derive(Debug, Clone)]
struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    fn new(file: Option<&Path>, flags: Vec<(&str, Option<String>)>, defaults: &[(&str, &str)]) -> Result<Self> {
        let mut values: BTreeMap<String, String> =
            defaults.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        if let Some(path) = file {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            for (n, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    bail!("{}:{}: expected key=value", path.display(), n + 1);
                };
                let key = k.trim().replace('-', "_");
                if !values.contains_key(&key) {
                    bail!("{}:{}: unknown key `{}`", path.display(), n + 1, k.trim());
                }
                values.insert(key, v.trim().to_string());
            }
        }
        for (k, v) in flags {
            if let Some(v) = v {
                values.insert(k.to_string(), v);
            }
        }
        Ok(Settings { values })
    }

    fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)
            .parse()
            .map_err(|_| anyhow::anyhow!("invalid value `{}` for {key}", self.get(key)))
    }

    fn hash(&self) -> String {
        let mut canonical = String::new();
        for (k, v) in self.values.iter().filter(|(k, _)| k.as_str() != "out") {
            let _ = writeln!(canonical, "{k}={v}");
        }
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

const CURVE_DEFAULTS: &[(&str, &str)] = &[
    ("preset", ""),
    ("points", ""),
    ("closed", "false"),
    ("n_scan", "2048"),
    ("n_grid", "1024"),
    ("rmax", "10"),
    ("window", ""),
    ("res", "256x256"),
    ("out", "."),
];

const LATTICE_DEFAULTS: &[(&str, &str)] = &[
    ("metric", "maxcoord"),
    ("thin", "false"),
    ("sep_factor", "2"),
    ("feet_tol", "1"),
    ("out", "."),
];

fn curve_settings(a: &CurveArgs) -> Result<Settings> {
    Settings::new(
        a.common.config.as_deref(),
        vec![
            ("preset", a.preset.clone()),
            ("points", a.points.as_ref().map(|p| p.display().to_string())),
            ("closed", a.closed.then(|| "true".to_string())),
            ("n_scan", a.n_scan.map(|v| v.to_string())),
            ("n_grid", a.n_grid.map(|v| v.to_string())),
            ("rmax", a.rmax.map(|v| v.to_string())),
            ("window", a.window.clone()),
            ("res", a.res.clone()),
            ("out", a.common.out.as_ref().map(|p| p.display().to_string())),
        ],
        CURVE_DEFAULTS,
    )
}

fn load_curve(s: &Settings) -> Result<ParametricCurve> {
    let preset = s.get("preset");
    let points = s.get("points");
    match (preset.is_empty(), points.is_empty()) {
        (false, true) => Ok(parse_preset(preset)?),
        (true, false) => {
            let text = fs::read_to_string(points).with_context(|| format!("reading {points}"))?;
            let mut pts = Vec::new();
            for (n, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let nums: Vec<f64> = line
                    .split(|ch: char| ch.is_whitespace() || ch == ',')
                    .filter(|t| !t.is_empty())
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .with_context(|| format!("{points}:{}: bad number", n + 1))?;
                if nums.len() != 2 {
                    bail!("{points}:{}: expected two coordinates", n + 1);
                }
                pts.push(Point2::new(nums[0], nums[1]));
            }
            Ok(ParametricCurve::sampled(pts, s.parse("closed")?)?)
        }
        (true, true) => bail!("a curve is required: pass --preset or --points"),
        (false, false) => bail!("--preset and --points are mutually exclusive"),
    }
}

fn parse_window(s: &Settings, c: &ParametricCurve) -> Result<Window> {
    let text = s.get("window");
    if text.is_empty() {
        return Ok(c.bounding_box(4096).expanded(0.25));
    }
    let v: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("invalid window `{text}`"))?;
    if v.len() != 4 {
        bail!("window needs four values x0,y0,x1,y1");
    }
    let w = Window::new(v[0], v[1], v[2], v[3]);
    if !w.is_nonempty() {
        bail!("window `{text}` is empty");
    }
    Ok(w)
}

fn parse_res(s: &Settings) -> Result<(usize, usize)> {
    let text = s.get("res");
    let (w, h) = text
        .split_once(['x', 'X'])
        .with_context(|| format!("invalid resolution `{text}`"))?;
    let (w, h): (usize, usize) = (w.trim().parse()?, h.trim().parse()?);
    if w == 0 || h == 0 {
        bail!("resolution must be positive");
    }
    Ok((w, h))
}

fn divider_config(s: &Settings) -> Result<DividerConfig> {
    let cfg = DividerConfig {
        n_scan: s.parse("n_scan")?,
        n_grid: s.parse("n_grid")?,
        r_max_factor: s.parse("rmax")?,
        ..DividerConfig::default()
    };
    if cfg.n_scan < 64 || cfg.n_grid < 16 {
        bail!("n_scan must be at least 64 and n_grid at least 16");
    }
    if !(cfg.r_max_factor > 0.0) {
        bail!("rmax must be positive");
    }
    Ok(cfg)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn figure_window(c: &ParametricCurve, extra: &[Point2]) -> Window {
    let mut w = c.bounding_box(4096);
    let reach = 3.0 * c.diameter();
    for p in extra.iter().filter(|p| p.is_finite() && p.norm() <= reach) {
        w.x0 = w.x0.min(p.x1);
        w.y0 = w.y0.min(p.x2);
        w.x1 = w.x1.max(p.x1);
        w.y1 = w.y1.max(p.x2);
    }
    let w = w.expanded(0.05);
    if w.is_nonempty() {
        w
    } else {
        Window::new(w.x0 - 1.0, w.y0 - 1.0, w.x1 + 1.0, w.y1 + 1.0)
    }
}

/// Returns the number of containment violations.
fn run_divider(a: &CurveArgs, write_files: bool) -> Result<usize> {
    let s = curve_settings(a)?;
    let c = load_curve(&s)?;
    let cfg = divider_config(&s)?;
    let trace = divider_trace(&c, &cfg)?;
    let report = divider_validate(&trace.points, &c);
    let hash = s.hash();
    let out = PathBuf::from(s.get("out"));
    if write_files {
        let centers: Vec<Point2> = trace.points.iter().map(|p| p.center).collect();
        let window = figure_window(&c, &centers);
        let bound = 4.0 * c.diameter() + window.width().max(window.height());
        let evolute = evolute_polylines(&c, 4096, bound);
        let csv = write(&out, "divider.csv", &export::divider_csv(&trace, &hash))?;
        write(&out, "divider.svg", &export::divider_svg(&c, &trace, &evolute, window))?;
        println!("wrote {}", csv.display());
    }
    println!(
        "points {}  regular {}  endpoint {}  zero_radius {}  junctions {}  gaps {}",
        trace.points.len(),
        trace.count(divider_core::DividerKind::Regular),
        trace.count(divider_core::DividerKind::Endpoint),
        trace.count(divider_core::DividerKind::ZeroRadius),
        trace.junctions.len(),
        trace.gaps.len()
    );
    println!(
        "containment: {} direct, {} via closure, {} exempt, {} violations",
        report.direct,
        report.via_closure,
        report.exempt,
        report.violations.len()
    );
    if !write_files {
        let mut csv = String::from("# config_hash=");
        csv.push_str(&hash);
        csv.push_str("\nindex,x10,x20,radius,kind\n");
        for &i in &report.violations {
            let p = &trace.points[i];
            let _ = writeln!(csv, "{i},{},{},{},{}", p.center.x1, p.center.x2, p.radius, p.kind.name());
        }
        write(&out, "violations.csv", &csv)?;
    }
    Ok(report.violations.len())
}

fn run_lclt(a: &CurveArgs) -> Result<()> {
    let s = curve_settings(a)?;
    let c = load_curve(&s)?;
    let window = parse_window(&s, &c)?;
    let (cols, rows) = parse_res(&s)?;
    let n_scan: usize = s.parse("n_scan")?;
    let raster = pi_set_raster_with(&c, window, cols, rows, n_scan.max(64));
    let hash = s.hash();
    let out = PathBuf::from(s.get("out"));
    write(&out, "lclt.csv", &export::lclt_csv(&raster, &hash))?;
    write(&out, "lclt.pgm", &export::raster_pgm(&raster))?;
    let positive = raster.positive_count();
    println!(
        "cells {}  positive {}  area {}",
        cols * rows,
        positive,
        positive as f64 * raster.cell_area()
    );
    Ok(())
}

fn run_evolute(a: &CurveArgs) -> Result<()> {
    let s = curve_settings(a)?;
    let c = load_curve(&s)?;
    let n_scan: usize = s.parse("n_scan")?;
    let cusps = find_cusps(&c, n_scan)?;
    let hash = s.hash();
    let out = PathBuf::from(s.get("out"));
    write(&out, "evolute.csv", &export::evolute_csv(&cusps, &hash))?;
    let centers: Vec<Point2> = cusps.iter().map(|k| k.center).collect();
    let window = figure_window(&c, &centers);
    let lines = evolute_polylines(&c, 4096, 4.0 * c.diameter() + window.width().max(window.height()));
    let mut svg = export::Svg::new(window, 800.0);
    svg.curve(&c, 2000, "black", 1.5);
    for line in &lines {
        svg.polyline(line, "blue", 1.0);
    }
    for k in &cusps {
        svg.dot(k.center, "red", 3.0);
    }
    write(&out, "evolute.svg", &svg.finish())?;
    println!("cusps {}", cusps.len());
    for k in &cusps {
        println!("  t={} center=({}, {}) radius={} {}", k.t, k.center.x1, k.center.x2, k.radius, k.kind.name());
    }
    Ok(())
}

fn run_lattice(a: &LatticeArgs) -> Result<()> {
    let s = Settings::new(
        a.common.config.as_deref(),
        vec![
            ("metric", a.metric.clone()),
            ("thin", a.thin.then(|| "true".to_string())),
            ("sep_factor", a.sep_factor.map(|v| v.to_string())),
            ("feet_tol", a.feet_tol.map(|v| v.to_string())),
            ("out", a.common.out.as_ref().map(|p| p.display().to_string())),
        ],
        LATTICE_DEFAULTS,
    )?;
    let metric: MetricKind = s.parse("metric")?;
    let params = LatticeParams {
        separation_factor: s.parse("sep_factor")?,
        feet_tolerance: s.parse("feet_tol")?,
        thin: s.parse("thin")?,
    };
    if !(params.separation_factor > 0.0) || !(params.feet_tolerance >= 0.0) {
        bail!("sep_factor must be positive and feet_tol nonnegative");
    }
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let bitmap = Bitmap::parse(&text)?;
    if bitmap.is_empty() {
        return Err(Error::EmptyForeground.into());
    }
    let (mask, field) = discrete_divider_with(&bitmap, metric, &params)?;
    let hash = s.hash();
    let out = PathBuf::from(s.get("out"));
    write(&out, "lattice.pbm", &mask.to_pbm())?;
    write(&out, "lattice.csv", &export::lattice_csv(&mask, field.as_ref(), &hash))?;
    println!("divider cells {}  components {}", mask.count(), divider_core::lattice::components8(&mask));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Divider(a) => run_divider(a, true),
        Command::Validate(a) => run_divider(a, false),
        Command::LcltField(a) => run_lclt(a).map(|_| 0),
        Command::Evolute(a) => run_evolute(a).map(|_| 0),
        Command::Lattice(a) => run_lattice(a).map(|_| 0),
    };
    match result {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
