//! Command-line front end: writes flow diagrams, spectra, mode charts,
//! calibration and quality reports as deterministic CSV or JSON.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use torospec::io::{
    fmt_num, fmt_sig12, parse_frequency, parse_length, parse_list, rounded, spectrum_rows,
    write_json, write_table, Format, TableRow,
};
use torospec::mode::{enumerate_for_model, CavityKind, FitTable, Geometry, ModeId, SpectralModel};
use torospec::quality::{family_comparison, quality_report, Material};
use torospec::special::{bessel_prime_zero, bessel_zero, scaled_prime_zero, scaled_zero};
use torospec::spectrum::{
    build_spectrum, calibrate_minor_radius, calibrate_radii, dark_modes, flow_sweep, gaps,
    mode_chart, mode_rank, MeasuredSpectrum, DEFAULT_CHART_COUNT,
};
use torospec::{Error, SPEED_OF_LIGHT};

#[derive(Parser)]
#[command(
    name = "torospec",
    version,
    about = "Resonant-mode spectra of cylindrical and toroidal cavities"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// perturbative | exact | fitted:PATH
    #[arg(long, global = true)]
    model: Option<String>,
    /// Preset name or material file.
    #[arg(long, default_value = "aluminium", global = true)]
    material: String,
    /// Speed of light in the cavity filling, m/s.
    #[arg(long = "c-medium", default_value_t = SPEED_OF_LIGHT, global = true)]
    c_medium: f64,
}

#[derive(Args, Default)]
struct GeometryArgs {
    #[arg(long = "torus-r")]
    torus_r: Option<String>,
    #[arg(long = "torus-R")]
    torus_major: Option<String>,
    #[arg(long = "cylinder-d")]
    cylinder_d: Option<String>,
    #[arg(long = "cylinder-h")]
    cylinder_h: Option<String>,
    /// a,b,c
    #[arg(long)]
    cuboid: Option<String>,
    /// equatorial,polar radius
    #[arg(long)]
    spheroid: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Universal flow diagram F(eps) for every mode below a cutoff.
    Flow {
        #[arg(long)]
        kind: CavityKind,
        /// Aspect-ratio grid, start:stop:step or a comma list.
        #[arg(long)]
        eps: String,
        /// Keep curves with F at most this value.
        #[arg(long = "fmax-F", default_value_t = 1.3)]
        fmax_f: f64,
        /// Aspect ratio at which the cutoff selects curves (default: grid maximum).
        #[arg(long = "modes-at-eps")]
        modes_at_eps: Option<f64>,
        /// Explicit curves, e.g. `TM:0:1:0,TE+:1:1:0`.
        #[arg(long)]
        modes: Option<String>,
    },
    /// Sorted spectrum of one cavity with a summary of its notable modes.
    Spectrum {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Frequency cutoff, e.g. 14GHz (required).
        #[arg(long)]
        fmax: Option<String>,
    },
    /// Torus mode chart over minor and major radii.
    Chart {
        /// Minor radii, e.g. 7mm,9mm or 3mm:23mm:2mm.
        #[arg(long = "r")]
        minor: String,
        /// Major-radius grid, e.g. 7mm:40mm:0.5mm.
        #[arg(long = "R")]
        major: String,
        #[arg(long, default_value_t = DEFAULT_CHART_COUNT)]
        count: usize,
        /// Optional frequency cap.
        #[arg(long)]
        fmax: Option<String>,
    },
    /// Fit a minor-radius machining offset to measured lines.
    Calibrate {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// CSV with header family,parity,k,n,m,f_hz.
        #[arg(long)]
        measured: PathBuf,
        /// Also fit the major radius.
        #[arg(long = "fit-major")]
        fit_major: bool,
    },
    /// Skin depth, surface resistance, V/(delta A) and photon lifetimes.
    Quality {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Frequency, e.g. 10GHz.
        #[arg(long)]
        frequency: String,
    },
    #[command(hide = true)]
    Bessel {
        k: u32,
        n: u32,
        #[arg(long)]
        prime: bool,
    },
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn with_path(path: &str, e: Error) -> Error {
    match e {
        Error::Io(_) | Error::Csv(_) => usage(format!("{path}: {e}")),
        other => other,
    }
}

fn parse_pair(s: &str, count: usize) -> Result<Vec<f64>, Error> {
    let v: Vec<f64> = s.split(',').map(parse_length).collect::<Result<_, _>>()?;
    if v.len() != count {
        return Err(usage(format!(
            "expected {count} comma-separated lengths in `{s}`"
        )));
    }
    Ok(v)
}

impl GeometryArgs {
    fn resolve(&self) -> Result<Geometry, Error> {
        let mut found = Vec::new();
        match (&self.torus_r, &self.torus_major) {
            (Some(r), Some(big)) => {
                found.push(Geometry::torus(parse_length(r)?, parse_length(big)?)?)
            }
            (None, None) => {}
            _ => return Err(usage("a torus needs both --torus-r and --torus-R")),
        }
        match (&self.cylinder_d, &self.cylinder_h) {
            (Some(d), Some(h)) => {
                found.push(Geometry::cylinder(parse_length(d)?, parse_length(h)?)?)
            }
            (None, None) => {}
            _ => return Err(usage("a cylinder needs both --cylinder-d and --cylinder-h")),
        }
        if let Some(s) = &self.cuboid {
            let v = parse_pair(s, 3)?;
            found.push(Geometry::cuboid(v[0], v[1], v[2])?);
        }
        if let Some(s) = &self.spheroid {
            let v = parse_pair(s, 2)?;
            found.push(Geometry::spheroid(v[0], v[1])?);
        }
        match found.len() {
            1 => Ok(found[0]),
            0 => Err(usage("no geometry given")),
            _ => Err(usage("give exactly one geometry")),
        }
    }
}

fn model_for(spec: Option<&str>, kind: CavityKind) -> Result<SpectralModel, Error> {
    let model = match spec {
        None => SpectralModel::default_for(kind),
        Some("perturbative") => SpectralModel::TorusPerturbative,
        Some("exact") => SpectralModel::CylinderExact,
        Some(s) if s.starts_with("fitted:") => {
            let path = &s["fitted:".len()..];
            SpectralModel::TorusFitted(
                FitTable::from_csv_path(path).map_err(|e| with_path(path, e))?,
            )
        }
        Some(other) => return Err(usage(format!("unknown model `{other}`"))),
    };
    if model.kind() != kind {
        return Err(usage(format!("model does not apply to a {kind:?}")));
    }
    Ok(model)
}

fn model_name(model: &SpectralModel) -> &'static str {
    match model {
        SpectralModel::CylinderExact => "exact",
        SpectralModel::TorusPerturbative => "perturbative",
        SpectralModel::TorusFitted(_) => "fitted",
    }
}

fn geometry_json(g: &Geometry) -> Value {
    match *g {
        Geometry::Torus { minor, major } => {
            json!({"kind": "torus", "r_m": rounded(minor), "R_m": rounded(major)})
        }
        Geometry::Cylinder { diameter, height } => {
            json!({"kind": "cylinder", "d_m": rounded(diameter), "h_m": rounded(height)})
        }
        Geometry::Cuboid { a, b, c } => {
            json!({"kind": "cuboid", "a_m": rounded(a), "b_m": rounded(b), "c_m": rounded(c)})
        }
        Geometry::Spheroid { a, c } => {
            json!({"kind": "spheroid", "a_m": rounded(a), "c_m": rounded(c)})
        }
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_flow(
    common: &Common,
    kind: CavityKind,
    eps: &str,
    fmax_f: f64,
    modes_at_eps: Option<f64>,
    modes: Option<&str>,
) -> Result<(), Error> {
    let grid = parse_list(eps, |s| torospec::io::parse_f64(s, 0))?;
    let lo = grid[0];
    let hi = *grid.last().unwrap();
    if lo <= 0.0 || (kind == CavityKind::Torus && hi > 1.0) {
        return Err(usage(format!(
            "aspect-ratio grid [{lo}, {hi}] outside the {kind:?} domain"
        )));
    }
    let model = model_for(common.model.as_deref(), kind)?;
    let curves = match modes {
        Some(list) => {
            let parsed: Vec<ModeId> = list.split(',').map(str::parse).collect::<Result<_, _>>()?;
            for m in &parsed {
                m.validate(kind)?;
            }
            parsed
        }
        None => enumerate_for_model(&model, fmax_f, modes_at_eps.unwrap_or(hi))?,
    };
    let rows: Vec<TableRow> = flow_sweep(&curves, &grid, &model)?
        .iter()
        .map(TableRow::from_flow)
        .collect();
    let meta = json!({"kind": format!("{kind:?}").to_lowercase(), "model": model_name(&model), "fmax_F": fmax_f});
    write_table(
        common.format,
        "flow",
        meta,
        &rows,
        open_out(common.out.as_deref())?,
    )?;

    if let Some(out) = &common.out {
        let mut seen = std::collections::BTreeSet::new();
        let mut asymptotes = Vec::new();
        for m in &curves {
            if seen.insert((m.family, m.k, m.n)) {
                let (symbol, value) = match m.family {
                    torospec::Family::TE => ("z'", scaled_prime_zero(m.k, m.n)?),
                    torospec::Family::TM => ("z", scaled_zero(m.k, m.n)?),
                };
                asymptotes.push(json!({
                    "family": m.family.to_string(), "k": m.k, "n": m.n,
                    "symbol": symbol, "value": rounded(value),
                }));
            }
        }
        let doc = json!({"schema": torospec::io::SCHEMA_VERSION, "asymptotes": asymptotes});
        write_json(&doc, File::create(sidecar(out, ".asymptotes.json"))?)?;
    }
    Ok(())
}

fn cmd_spectrum(common: &Common, geometry: &GeometryArgs, fmax: Option<&str>) -> Result<(), Error> {
    let geometry = geometry.resolve()?;
    let fmax = fmax.ok_or_else(|| usage("spectrum needs --fmax"))?;
    let kind = geometry
        .kind()
        .ok_or_else(|| usage("spectra need a torus or cylinder"))?;
    let model = model_for(common.model.as_deref(), kind)?;
    let f_max = parse_frequency(fmax)?;
    let spectrum = build_spectrum(&geometry, &model, f_max, common.c_medium)?;
    let rows = spectrum_rows(&spectrum);
    let meta = json!({
        "geometry": geometry_json(&geometry),
        "model": model_name(&model),
        "fmax_hz": rounded(f_max),
        "c_medium": rounded(common.c_medium),
    });
    write_table(
        common.format,
        "spectrum",
        meta,
        &rows,
        open_out(common.out.as_deref())?,
    )?;

    let mut summary = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(
        summary,
        "modes below {} Hz: {}",
        fmt_num(f_max),
        spectrum.len()
    );
    if let Some(first) = spectrum.entries.first() {
        let _ = writeln!(
            summary,
            "ground state: {} at {} Hz",
            first.mode,
            fmt_num(first.frequency)
        );
    }
    if kind == CavityKind::Torus {
        for dm in dark_modes(&spectrum)? {
            let rank = mode_rank(&spectrum, &dm.mode)?;
            let g = gaps(&spectrum, &dm.mode)?;
            let show = |v: Option<f64>| v.map(fmt_num).unwrap_or_else(|| "none".into());
            let _ = write!(
                summary,
                "DM {} at {} Hz, rank {rank}, gaps below {} above {}",
                dm.mode,
                fmt_num(dm.frequency),
                show(g.below),
                show(g.above)
            );
            if let Some(named) = g.named {
                let _ = write!(
                    summary,
                    ", TE+112 gap {} TE-112 gap {}{}",
                    fmt_num(named.plus),
                    fmt_num(named.minus),
                    if named.extrapolated {
                        " [extrapolated]"
                    } else {
                        ""
                    }
                );
            }
            summary.push('\n');
        }
    }
    let flagged = spectrum.entries.iter().filter(|e| e.extrapolated).count();
    if flagged > 0 {
        let _ = writeln!(
            summary,
            "extrapolated entries: {flagged} of {}",
            spectrum.len()
        );
    }
    if common.out.is_some() {
        io::stdout().lock().write_all(summary.as_bytes())?;
    } else {
        io::stderr().lock().write_all(summary.as_bytes())?;
    }
    Ok(())
}

fn cmd_chart(
    common: &Common,
    minor: &str,
    major: &str,
    count: usize,
    fmax: Option<&str>,
) -> Result<(), Error> {
    let minors = parse_list(minor, parse_length)?;
    let majors = parse_list(major, parse_length)?;
    let model = model_for(common.model.as_deref(), CavityKind::Torus)?;
    let f_max = fmax.map(parse_frequency).transpose()?;
    let chart = mode_chart(&minors, &majors, &model, f_max, count, common.c_medium)?;
    if !chart.forbidden.is_empty() {
        log::info!("{} (r, R) points with r > R skipped", chart.forbidden.len());
    }
    let rows: Vec<TableRow> = chart.rows.iter().map(TableRow::from_chart).collect();
    let meta = json!({"model": model_name(&model), "count": count, "forbidden_points": chart.forbidden.len()});
    write_table(
        common.format,
        "chart",
        meta,
        &rows,
        open_out(common.out.as_deref())?,
    )
}

fn cmd_calibrate(
    common: &Common,
    geometry: &GeometryArgs,
    measured: &Path,
    fit_major: bool,
) -> Result<(), Error> {
    let nominal = geometry.resolve()?;
    let kind = nominal
        .kind()
        .ok_or_else(|| usage("calibration needs a torus or cylinder"))?;
    let model = model_for(common.model.as_deref(), kind)?;
    let lines = MeasuredSpectrum::from_csv_path(measured)
        .map_err(|e| with_path(&measured.display().to_string(), e))?;
    let cal = if fit_major {
        calibrate_radii(&lines, &nominal, &model, common.c_medium)?
    } else {
        calibrate_minor_radius(&lines, &nominal, &model, common.c_medium)?
    };
    let mut report = io::stdout().lock();
    writeln!(report, "delta_r_m {}", fmt_num(cal.delta_r))?;
    if fit_major {
        writeln!(report, "delta_R_m {}", fmt_num(cal.delta_major))?;
    }
    writeln!(report, "mean_shift_hz {}", fmt_num(cal.mean_shift))?;
    for l in &cal.lines {
        writeln!(
            report,
            "{} measured {} model {} residual {}",
            l.mode,
            fmt_num(l.measured),
            fmt_num(l.model),
            fmt_num(l.residual())
        )?;
    }
    if let Some(out) = &common.out {
        let doc = json!({
            "schema": torospec::io::SCHEMA_VERSION,
            "nominal": geometry_json(&nominal),
            "model": model_name(&model),
            "source": lines.source,
            "delta_r_m": rounded(cal.delta_r),
            "delta_R_m": rounded(cal.delta_major),
            "mean_shift_hz": rounded(cal.mean_shift),
            "lines": cal.lines.iter().map(|l| json!({
                "mode": l.mode.to_string(),
                "measured_hz": rounded(l.measured),
                "model_hz": rounded(l.model),
                "residual_hz": rounded(l.residual()),
            })).collect::<Vec<_>>(),
        });
        write_json(&doc, File::create(out)?)?;
    }
    Ok(())
}

fn characteristic_radius(g: &Geometry) -> (f64, f64) {
    match *g {
        Geometry::Torus { minor, major } => (minor, major),
        Geometry::Cylinder { diameter, .. } => (0.5 * diameter, 0.5 * diameter),
        Geometry::Cuboid { a, b, c } => {
            let r = 0.5 * a.min(b).min(c);
            (r, r)
        }
        Geometry::Spheroid { a, .. } => (a, a),
    }
}

fn cmd_quality(common: &Common, geometry: &GeometryArgs, frequency: &str) -> Result<(), Error> {
    let geometry = geometry.resolve()?;
    let material = Material::resolve(&common.material)?;
    let f = parse_frequency(frequency)?;
    let report = quality_report(&geometry, f, &material)?;
    let (r, major) = characteristic_radius(&geometry);
    let families = family_comparison(r, major, report.skin_depth)?;
    let mut out = open_out(common.out.as_deref())?;
    match common.format {
        Format::Json => {
            let doc = json!({
                "schema": torospec::io::SCHEMA_VERSION,
                "geometry": geometry_json(&geometry),
                "material": {"name": material.name, "sigma_s_per_m": rounded(material.sigma),
                             "mu_h_per_m": rounded(material.mu), "eps_r": rounded(material.eps_r)},
                "frequency_hz": rounded(report.frequency),
                "skin_depth_m": rounded(report.skin_depth),
                "surface_resistance_ohm": rounded(report.surface_resistance),
                "q_ratio": rounded(report.q_ratio),
                "lifetimes": report.lifetimes.iter().map(|l| json!({"q": rounded(l.q), "tau_s": rounded(l.tau_s)})).collect::<Vec<_>>(),
                "family_comparison": {
                    "normalization": "equal characteristic radius r and equal skin depth",
                    "r_m": rounded(r),
                    "rows": families.iter().map(|f| json!({"family": f.family, "q_ratio": rounded(f.q_ratio)})).collect::<Vec<_>>(),
                },
            });
            write_json(&doc, &mut out)?;
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            w.write_record(["section", "key", "value"])?;
            w.write_record(["report", "frequency_hz", &fmt_num(report.frequency)])?;
            w.write_record(["report", "skin_depth_m", &fmt_num(report.skin_depth)])?;
            w.write_record([
                "report",
                "surface_resistance_ohm",
                &fmt_num(report.surface_resistance),
            ])?;
            w.write_record(["report", "q_ratio", &fmt_num(report.q_ratio)])?;
            for l in &report.lifetimes {
                w.write_record(["lifetime_s", &fmt_num(l.q), &fmt_num(l.tau_s)])?;
            }
            // normalisation: equal characteristic radius r and equal skin depth
            w.write_record(["family_comparison", "r_m", &fmt_num(r)])?;
            for fam in &families {
                w.write_record(["family_comparison", fam.family, &fmt_num(fam.q_ratio)])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn cmd_bessel(k: u32, n: u32, prime: bool) -> Result<(), Error> {
    let p = if prime {
        bessel_prime_zero(k, n)?
    } else {
        bessel_zero(k, n)?
    };
    writeln!(io::stdout().lock(), "{}", fmt_sig12(p))?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let common = &cli.common;
    match &cli.command {
        Command::Flow {
            kind,
            eps,
            fmax_f,
            modes_at_eps,
            modes,
        } => cmd_flow(common, *kind, eps, *fmax_f, *modes_at_eps, modes.as_deref()),
        Command::Spectrum { geometry, fmax } => cmd_spectrum(common, geometry, fmax.as_deref()),
        Command::Chart {
            minor,
            major,
            count,
            fmax,
        } => cmd_chart(common, minor, major, *count, fmax.as_deref()),
        Command::Calibrate {
            geometry,
            measured,
            fit_major,
        } => cmd_calibrate(common, geometry, measured, *fit_major),
        Command::Quality {
            geometry,
            frequency,
        } => cmd_quality(common, geometry, frequency),
        Command::Bessel { k, n, prime } => cmd_bessel(*k, *n, *prime),
    }
}

fn broken_pipe(e: &Error) -> bool {
    let kind = match e {
        Error::Io(e) => Some(e.kind()),
        Error::Json(e) => e.io_error_kind(),
        Error::Csv(e) => match e.kind() {
            csv::ErrorKind::Io(e) => Some(e.kind()),
            _ => None,
        },
        _ => None,
    };
    kind == Some(io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
