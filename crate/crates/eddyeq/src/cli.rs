//! The `eddyeq` command.
//!
//! Exit codes: 0 success, 1 bad input or validation failure, 2 a solver or
//! the inversion did not converge.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use eddyeq_core::analysis::{compare, fit_sigma_d_weighted, ForwardModel, PreparedModel, SigmaDFit, Weighting};
use eddyeq_core::model::{InductanceSpectrum, Plate, SpatialFrequency};
use eddyeq_core::thin_plate::{equivalent_plate, equivalent_thickness};
use serde_json::{json, Value};

use crate::scenario::{plate_fragment, Scenario};
use crate::spectrum_file::{self, Metadata};
use crate::{parallel, CliError, TOOL_VERSION};

#[derive(Debug, Parser)]
#[command(name = "eddyeq", version, about = "Eddy-current plate spectra, equivalence and sigma*D inversion")]
pub struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    #[value(name = "thin_plate", alias = "thin-plate")]
    ThinPlate,
    #[value(name = "dodd_deeds", alias = "dodd-deeds")]
    DoddDeeds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Relative,
    Uniform,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep one plate of a scenario and write a CSV spectrum.
    Spectrum {
        scenario: PathBuf,
        plate: String,
        #[arg(long, value_enum, default_value = "thin_plate")]
        model: ModelArg,
        /// CSV output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a JSON file with the full run metadata.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Equivalent plate with the same conductivity-thickness product.
    #[command(group(ArgGroup::new("target").required(true).multiple(false).args(["thickness", "conductivity"])))]
    Equivalent {
        scenario: PathBuf,
        plate: String,
        /// Target thickness with unit: m, mm, um.
        #[arg(long)]
        thickness: Option<String>,
        /// Target conductivity with unit: S/m, MS/m.
        #[arg(long)]
        conductivity: Option<String>,
    },
    /// Relative error of spectrum B against reference spectrum A.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Restrict the maximum to lo:hi, in Hz.
        #[arg(long)]
        band: Option<String>,
        /// JSON report path (default: A with extension .compare.json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit sigma*D to a normalized spectrum.
    Invert {
        spectrum: PathBuf,
        /// Spatial frequency in 1/m (default: the value recorded in the file).
        #[arg(long)]
        alpha0: Option<f64>,
        /// Also fit alpha0. Refused: the model only sees sigma*D / alpha0.
        #[arg(long)]
        fit_alpha0: bool,
        #[arg(long, value_enum, default_value = "relative")]
        weighting: WeightingArg,
        /// JSON result path (default: spectrum with extension .fit.json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the bundled copper/brass and aluminium scenarios, optionally
    /// running them end to end.
    #[command(alias = "paper-cases")]
    ReferenceCases {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Also sweep with the full solver, compare and write reports.
        #[arg(long)]
        run: bool,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let threads = cli.threads.unwrap_or_else(parallel::available_threads);
    if threads == 0 {
        return Err(CliError::Invalid("--threads must be at least 1".into()));
    }
    match &cli.command {
        Command::Spectrum {
            scenario,
            plate,
            model,
            out: path,
            json,
        } => cmd_spectrum(scenario, plate, *model, path.as_deref(), json.as_deref(), threads, out),
        Command::Equivalent {
            scenario,
            plate,
            thickness,
            conductivity,
        } => cmd_equivalent(scenario, plate, thickness.as_deref(), conductivity.as_deref(), out),
        Command::Compare { a, b, band, out: path } => cmd_compare(a, b, band.as_deref(), path.as_deref(), out),
        Command::Invert {
            spectrum,
            alpha0,
            fit_alpha0,
            weighting,
            out: path,
        } => cmd_invert(spectrum, *alpha0, *fit_alpha0, *weighting, path.as_deref(), out),
        Command::ReferenceCases { out_dir, run } => cmd_reference_cases(out_dir, *run, threads, out),
    }
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::io(Path::new("<stdout>"), e)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    write_text(path, &text)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut p = path.with_extension("").into_os_string();
    p.push(suffix);
    PathBuf::from(p)
}

fn plate_json(name: &str, p: &Plate) -> Value {
    json!({
        "name": name,
        "conductivity_S_per_m": p.conductivity(),
        "thickness_m": p.thickness(),
        "relative_permeability": p.relative_permeability(),
        "sigma_thickness_S": p.sigma_thickness(),
    })
}

/// A spectrum run and everything needed to describe it.
struct SpectrumRun {
    spectrum: InductanceSpectrum,
    meta: Metadata,
    json: Value,
}

fn compute_spectrum(scenario: &Scenario, plate_name: &str, model: ModelArg, threads: usize) -> Result<SpectrumRun, CliError> {
    let plate = scenario.plate(plate_name)?;
    let alpha0 = scenario.alpha0()?;
    let quad = scenario.quadrature_or_default();
    let forward = match model {
        ModelArg::ThinPlate => ForwardModel::ThinPlate { alpha0 },
        ModelArg::DoddDeeds => ForwardModel::DoddDeeds {
            coil: scenario.coil,
            quad,
        },
    };
    let prepared = PreparedModel::new(&forward)?;
    let outcome = parallel::sweep(&prepared, plate, &scenario.sweep, threads)?;

    let mut meta = Metadata::default();
    meta.push("tool_version", TOOL_VERSION);
    meta.push("scenario_sha256", &scenario.hash);
    meta.push("plate", plate_name);
    meta.push("conductivity_S_per_m", spectrum_file::format_f64(plate.conductivity()));
    meta.push("thickness_m", spectrum_file::format_f64(plate.thickness()));
    meta.push("alpha0_per_m", spectrum_file::format_f64(alpha0.get()));
    let quad_json = if model == ModelArg::DoddDeeds {
        let source = if scenario.quadrature.is_some() { "scenario" } else { "defaults" };
        meta.push(
            "quadrature",
            format!(
                "{} rule={} n_panels={} alpha_max_per_m={} rel_tolerance={}",
                source,
                quad.rule.as_str(),
                quad.n_panels,
                spectrum_file::format_f64(quad.alpha_max),
                quad.rel_tolerance
            ),
        );
        meta.push("units", "henry");
        json!({
            "source": source,
            "rule": quad.rule.as_str(),
            "n_panels": quad.n_panels,
            "alpha_max_per_m": quad.alpha_max,
            "rel_tolerance": quad.rel_tolerance,
        })
    } else {
        meta.push("units", "dL/L_air");
        Value::Null
    };
    if outcome.thin_regime_points > 0 {
        meta.push("warning_thin_regime_points", outcome.thin_regime_points);
    }
    if outcome.tail_truncated_points > 0 {
        meta.push("warning_tail_truncated_points", outcome.tail_truncated_points);
    }
    let c = &scenario.coil;
    let json = json!({
        "tool_version": TOOL_VERSION,
        "scenario_sha256": scenario.hash,
        "model": outcome.spectrum.model().as_str(),
        "normalized": outcome.spectrum.is_normalized(),
        "points": outcome.spectrum.len(),
        "alpha0_per_m": alpha0.get(),
        "plate": plate_json(plate_name, plate),
        "coil": {
            "default_sensor": scenario.coil_is_default,
            "inner_radius_m": c.inner_radius,
            "outer_radius_m": c.outer_radius,
            "coil_height_m": c.coil_height,
            "gap_m": c.gap,
            "liftoff_m": c.liftoff,
            "turns_tx": c.turns_tx,
            "turns_rx": c.turns_rx,
            "drive_current_A": c.drive_current,
        },
        "quadrature": quad_json,
        "warnings": {
            "thin_regime_points": outcome.thin_regime_points,
            "tail_truncated_points": outcome.tail_truncated_points,
        },
    });
    Ok(SpectrumRun {
        spectrum: outcome.spectrum,
        meta,
        json,
    })
}

fn cmd_spectrum(
    scenario: &Path,
    plate: &str,
    model: ModelArg,
    path: Option<&Path>,
    json_path: Option<&Path>,
    threads: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let scenario = Scenario::load(scenario)?;
    let run = compute_spectrum(&scenario, plate, model, threads)?;
    match path {
        Some(p) => spectrum_file::write_path(p, &run.spectrum, &run.meta)?,
        None => spectrum_file::write(out, &run.spectrum, &run.meta).map_err(stdout_err)?,
    }
    if let Some(j) = json_path {
        write_json(j, &run.json)?;
    }
    Ok(())
}

/// Splits `"2.0mm"` into value and unit and scales by the matching factor.
fn parse_quantity(text: &str, flag: &str, units: &[(&str, f64)]) -> Result<f64, CliError> {
    let t = text.trim();
    let split = t
        .find(|c: char| !(c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E')))
        .unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let allowed = units.iter().map(|u| u.0).collect::<Vec<_>>().join(", ");
    let value: f64 = num
        .parse()
        .map_err(|_| CliError::Invalid(format!("{flag}: cannot read a number from '{text}'")))?;
    let factor = units
        .iter()
        .find(|u| u.0 == unit.trim())
        .map(|u| u.1)
        .ok_or_else(|| CliError::Invalid(format!("{flag}: '{text}' needs a unit ({allowed})")))?;
    Ok(value * factor)
}

fn cmd_equivalent(
    scenario: &Path,
    plate_name: &str,
    thickness: Option<&str>,
    conductivity: Option<&str>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let scenario = Scenario::load(scenario)?;
    let plate = scenario.plate(plate_name)?;
    let eq = match (thickness, conductivity) {
        (Some(t), None) => {
            let d = parse_quantity(t, "--thickness", &[("m", 1.0), ("mm", 1e-3), ("um", 1e-6), ("µm", 1e-6)])?;
            equivalent_plate(plate, d)?
        }
        (None, Some(c)) => {
            let s = parse_quantity(c, "--conductivity", &[("S/m", 1.0), ("MS/m", 1e6)])?;
            equivalent_thickness(plate, s)?
        }
        _ => return Err(CliError::Invalid("give exactly one of --thickness, --conductivity".into())),
    };
    let p = eq.plate;
    let text = format!(
        "original:   conductivity = {} MS/m, thickness = {} mm\n\
         equivalent: conductivity = {:.6} MS/m, thickness = {:.6} mm ({:.4} um)\n\
         sigma_d = {} S (preserved)\n\n{}",
        short(plate.conductivity() / 1e6),
        short(plate.thickness() * 1e3),
        p.conductivity() / 1e6,
        p.thickness() * 1e3,
        p.thickness() * 1e6,
        eq.sigma_thickness_product,
        plate_fragment(&format!("{plate_name}_equivalent"), &p)
    );
    out.write_all(text.as_bytes()).map_err(stdout_err)
}

/// Up to 12 significant digits, trailing zeros dropped.
fn short(x: f64) -> String {
    let s = format!("{:.*}", (11 - x.abs().log10().floor() as i32).clamp(0, 20) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn parse_band(text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Invalid(format!("--band: expected lo:hi in Hz, got '{text}'"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, Value::from)
}

fn compare_files(a: &Path, b: &Path, band: Option<(f64, f64)>) -> Result<(Value, String), CliError> {
    let (sa, ma) = spectrum_file::read_path(a)?;
    let (sb, mb) = spectrum_file::read_path(b)?;
    let r = compare(&sa, &sb, band).map_err(|e| CliError::Invalid(format!("{} vs {}: {e}", a.display(), b.display())))?;
    let (lo, hi) = band.unwrap_or((sa.frequencies()[0], sa.frequencies()[sa.len() - 1]));
    let summary = format!("max_rel_error={} in band [{lo},{hi}]", r.max_rel_error);
    let per: Vec<Value> = sa
        .frequencies()
        .iter()
        .zip(&r.per_frequency_rel_error)
        .map(|(f, e)| json!({"freq_hz": f, "rel_error": opt(*e)}))
        .collect();
    let json = json!({
        "tool_version": TOOL_VERSION,
        "reference": {"path": a.display().to_string(), "scenario_sha256": ma.get("scenario_sha256"), "plate": ma.get("plate")},
        "candidate": {"path": b.display().to_string(), "scenario_sha256": mb.get("scenario_sha256"), "plate": mb.get("plate")},
        "model": sa.model().as_str(),
        "normalized": sa.is_normalized(),
        "max_rel_error": r.max_rel_error,
        "max_at_frequency_hz": opt(r.max_at_frequency),
        "max_rel_error_band_hz": [r.max_rel_error_band.0, r.max_rel_error_band.1],
        "band_filter_hz": r.band_filter.map(|(l, h)| vec![l, h]),
        "points_in_band": r.points_in_band,
        "excluded_near_zero": r.excluded_near_zero,
        "per_frequency": per,
    });
    Ok((json, summary))
}

fn cmd_compare(a: &Path, b: &Path, band: Option<&str>, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let band = band.map(parse_band).transpose()?;
    let (json, summary) = compare_files(a, b, band)?;
    let report = path.map_or_else(|| with_suffix(a, ".compare.json"), Path::to_path_buf);
    write_json(&report, &json)?;
    writeln!(out, "{summary}").map_err(stdout_err)
}

fn fit_json(fit: &SigmaDFit, spectrum: &Path, meta: &Metadata, alpha0: f64, weighting: WeightingArg) -> Value {
    json!({
        "tool_version": TOOL_VERSION,
        "spectrum": spectrum.display().to_string(),
        "scenario_sha256": meta.get("scenario_sha256"),
        "alpha0_per_m": alpha0,
        "weighting": match weighting { WeightingArg::Relative => "relative", WeightingArg::Uniform => "uniform" },
        "sigma_d_S": fit.sigma_d,
        "alpha0_fit_per_m": opt(fit.alpha0_fit),
        "residual_norm": fit.residual_norm,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "residual_history": fit.residual_history,
    })
}

fn cmd_invert(
    path: &Path,
    alpha0: Option<f64>,
    fit_alpha0: bool,
    weighting: WeightingArg,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let (spectrum, meta) = spectrum_file::read_path(path)?;
    if !spectrum.is_normalized() {
        return Err(CliError::Invalid(format!(
            "{}: spectrum is absolute ({} model, henries); inversion needs a normalized dL/L_air spectrum such as thin_plate output",
            path.display(),
            spectrum.model().as_str()
        )));
    }
    let alpha0 = match alpha0 {
        Some(a) => a,
        None => meta
            .get("alpha0_per_m")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| CliError::Invalid(format!("{}: no alpha0_per_m recorded; pass --alpha0", path.display())))?,
    };
    let a0 = SpatialFrequency::new(alpha0).map_err(|e| CliError::Invalid(format!("--alpha0: {e}")))?;
    let w = match weighting {
        WeightingArg::Relative => Weighting::Relative,
        WeightingArg::Uniform => Weighting::Uniform,
    };
    let fit = fit_sigma_d_weighted(&spectrum, a0, fit_alpha0, w).map_err(|e| match e {
        eddyeq_core::Error::Unfittable(msg) => CliError::Invalid(format!("{}: cannot invert: {msg}", path.display())),
        other => CliError::Solver(other),
    })?;
    let report = out_path.map_or_else(|| with_suffix(path, ".fit.json"), Path::to_path_buf);
    write_json(&report, &fit_json(&fit, path, &meta, alpha0, weighting))?;
    writeln!(
        out,
        "sigma_d_S={} residual_norm={:.3e} iterations={} converged={}",
        fit.sigma_d, fit.residual_norm, fit.iterations, fit.converged
    )
    .map_err(stdout_err)?;
    if fit.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!(
            "inversion did not converge ({} iterations); best iterate written to {}",
            fit.iterations,
            report.display()
        )))
    }
}

/// Bundled scenarios: (file stem, scenario text, reference plate, candidates, compare band).
type Case = (&'static str, &'static str, &'static str, &'static [&'static str], Option<(f64, f64)>);

const CASES: [Case; 2] = [
    (
        "copper_brass",
        "# 59.8 MS/m copper and the brass plate with the same sigma*D at 2 mm\n\
[plates.copper]\nconductivity_MSm = 59.8\nthickness_mm = 0.56\n\n\
[plates.brass]\nconductivity_MSm = 16.744\nthickness_mm = 2.0\n\n\
[sweep]\nf_min_Hz = 1e3\nf_max_Hz = 5e5\nn_points = 31\nspacing = \"log\"\n",
        "copper",
        &["brass"],
        Some((100e3, 500e3)),
    ),
    (
        "aluminium",
        "# 20 um aluminium foil and 55 um plates with the same sigma*D\n\
[plates.aluminium]\nconductivity_MSm = 36.9\nthickness_um = 20.0\n\n\
[plates.aluminium_equivalent]\nconductivity_MSm = 13.418181818181818\nthickness_um = 55.0\n\n\
[plates.aluminium_rounded]\nconductivity_MSm = 13.5\nthickness_um = 55.0\n\n\
[sweep]\nf_min_Hz = 10\nf_max_Hz = 1e6\nn_points = 51\nspacing = \"log\"\n",
        "aluminium",
        &["aluminium_equivalent", "aluminium_rounded"],
        None,
    ),
];

fn cmd_reference_cases(dir: &Path, run: bool, threads: usize, out: &mut dyn Write) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for (stem, text, reference, candidates, band) in CASES {
        let scenario_path = dir.join(format!("{stem}.toml"));
        write_text(&scenario_path, text)?;
        writeln!(out, "wrote {}", scenario_path.display()).map_err(stdout_err)?;
        if !run {
            continue;
        }
        let scenario = Scenario::parse(text)?;
        let write_spectrum = |name: &str| -> Result<PathBuf, CliError> {
            let r = compute_spectrum(&scenario, name, ModelArg::DoddDeeds, threads)?;
            let p = dir.join(format!("{stem}.{name}.dodd_deeds.csv"));
            spectrum_file::write_path(&p, &r.spectrum, &r.meta)?;
            Ok(p)
        };
        let a = write_spectrum(reference)?;
        for cand in candidates {
            let b = write_spectrum(cand)?;
            let (json, summary) = compare_files(&a, &b, band)?;
            let report = dir.join(format!("{stem}.{reference}_vs_{cand}.compare.json"));
            write_json(&report, &json)?;
            writeln!(out, "{reference} vs {cand}: {summary}").map_err(stdout_err)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_drops_float_noise() {
        assert_eq!(short(0.019999999999999997), "0.02");
        assert_eq!(short(59.8), "59.8");
        assert_eq!(short(2000.0), "2000");
        assert_eq!(short(16.744), "16.744");
    }

    #[test]
    fn quantities_need_units() {
        let len = [("m", 1.0), ("mm", 1e-3), ("um", 1e-6)];
        assert_eq!(parse_quantity("2.0mm", "t", &len).unwrap(), 2.0e-3);
        assert_eq!(parse_quantity(" 55 um", "t", &len).unwrap(), 55.0 * 1e-6);
        assert_eq!(parse_quantity("1e-3m", "t", &len).unwrap(), 1e-3);
        assert!(parse_quantity("2.0", "t", &len).is_err());
        assert!(parse_quantity("2.0in", "t", &len).is_err());
        let cond = [("S/m", 1.0), ("MS/m", 1e6)];
        assert_eq!(parse_quantity("17.3MS/m", "c", &cond).unwrap(), 17.3e6);
    }

    #[test]
    fn bands() {
        assert_eq!(parse_band("100e3:500e3").unwrap(), (1e5, 5e5));
        assert!(parse_band("5:1").is_err());
        assert!(parse_band("100").is_err());
    }

    #[test]
    fn reference_aluminium_conductivity_is_the_exact_transform() {
        let s = Scenario::parse(CASES[1].1).unwrap();
        let al = s.plate("aluminium").unwrap();
        let eq = equivalent_plate(al, 55e-6).unwrap().plate;
        let listed = s.plate("aluminium_equivalent").unwrap();
        assert!((listed.conductivity() / eq.conductivity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn suffixes() {
        assert_eq!(with_suffix(Path::new("d/a.csv"), ".fit.json"), PathBuf::from("d/a.fit.json"));
        assert_eq!(with_suffix(Path::new("a"), ".compare.json"), PathBuf::from("a.compare.json"));
    }
}
