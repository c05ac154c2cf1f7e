//! Scenario files: TOML with the unit spelled out in every key.
//!
//! ```toml
//! alpha0_per_m = 166.67          # optional, else 1/min(inner radius, height)
//!
//! [coil]                         # optional, else the default sensor
//! inner_radius_mm = 6.0
//! outer_radius_mm = 6.315
//! height_mm = 8.0
//! gap_mm = 2.0
//! liftoff_mm = 1.0
//! turns_tx = 25
//! turns_rx = 25
//! drive_current_mA = 10.0
//!
//! [plates.copper]
//! conductivity_MSm = 59.8        # or conductivity_Sm
//! thickness_mm = 0.56            # or thickness_um
//! relative_permeability = 1.0    # optional
//!
//! [sweep]
//! f_min_Hz = 1e3
//! f_max_Hz = 5e5
//! n_points = 31
//! spacing = "log"                # or "linear"
//!
//! [quadrature]                   # optional, defaults depend on the coil
//! alpha_max_per_m = 4e4
//! n_panels = 256
//! rule = "fixed-panel"           # or "adaptive"
//! rel_tolerance = 1e-8
//! ```
//!
//! Units are converted to SI here and nowhere else.

use std::collections::BTreeMap;
use std::path::Path;

use eddyeq_core::dodd_deeds::{QuadratureRule, QuadratureSpec};
use eddyeq_core::model::{default_sensor, derive_alpha0, CoilPair, Plate, Spacing, SpatialFrequency, SweepSpec};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    alpha0_per_m: Option<f64>,
    coil: Option<RawCoil>,
    #[serde(default)]
    plates: BTreeMap<String, RawPlate>,
    sweep: RawSweep,
    quadrature: Option<RawQuadrature>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawCoil {
    inner_radius_mm: f64,
    outer_radius_mm: f64,
    height_mm: f64,
    gap_mm: f64,
    liftoff_mm: f64,
    turns_tx: u32,
    turns_rx: u32,
    drive_current_mA: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawPlate {
    conductivity_MSm: Option<f64>,
    conductivity_Sm: Option<f64>,
    thickness_mm: Option<f64>,
    thickness_um: Option<f64>,
    relative_permeability: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawSweep {
    f_min_Hz: f64,
    f_max_Hz: f64,
    n_points: usize,
    #[serde(default = "default_spacing")]
    spacing: String,
}

fn default_spacing() -> String {
    "log".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    alpha_max_per_m: Option<f64>,
    n_panels: Option<usize>,
    rule: Option<String>,
    rel_tolerance: Option<f64>,
}

/// A validated scenario in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub coil: CoilPair,
    pub coil_is_default: bool,
    pub plates: BTreeMap<String, Plate>,
    pub sweep: SweepSpec,
    /// `None` when the file has no `[quadrature]` table.
    pub quadrature: Option<QuadratureSpec>,
    pub alpha0_override: Option<f64>,
    /// SHA-256 of the file bytes, lowercase hex.
    pub hash: String,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Invalid(msg) => CliError::Invalid(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| CliError::Invalid(format!("scenario: {e}")))?;
        let (coil, coil_is_default) = match raw.coil {
            None => (default_sensor(), true),
            Some(c) => (
                CoilPair {
                    inner_radius: c.inner_radius_mm * 1e-3,
                    outer_radius: c.outer_radius_mm * 1e-3,
                    coil_height: c.height_mm * 1e-3,
                    gap: c.gap_mm * 1e-3,
                    liftoff: c.liftoff_mm * 1e-3,
                    turns_tx: c.turns_tx,
                    turns_rx: c.turns_rx,
                    drive_current: c.drive_current_mA * 1e-3,
                },
                false,
            ),
        };
        coil.validate().map_err(|e| CliError::Invalid(format!("coil: {e}")))?;

        let mut plates = BTreeMap::new();
        for (name, p) in raw.plates {
            let plate = convert_plate(&p).map_err(|msg| CliError::Invalid(format!("plate '{name}': {msg}")))?;
            plates.insert(name, plate);
        }

        let spacing = match raw.sweep.spacing.as_str() {
            "log" | "logarithmic" => Spacing::Logarithmic,
            "linear" | "lin" => Spacing::Linear,
            other => return Err(CliError::Invalid(format!("sweep: unknown spacing '{other}' (log or linear)"))),
        };
        let sweep = SweepSpec::new(raw.sweep.f_min_Hz, raw.sweep.f_max_Hz, raw.sweep.n_points, spacing);
        sweep.validate().map_err(|e| CliError::Invalid(format!("sweep: {e}")))?;

        let quadrature = match raw.quadrature {
            None => None,
            Some(q) => {
                let d = QuadratureSpec::default_for(&coil);
                let rule = match q.rule.as_deref() {
                    None => d.rule,
                    Some(r) => QuadratureRule::parse(r).ok_or_else(|| {
                        CliError::Invalid(format!("quadrature: unknown rule '{r}' (fixed-panel or adaptive)"))
                    })?,
                };
                let spec = QuadratureSpec {
                    alpha_max: q.alpha_max_per_m.unwrap_or(d.alpha_max),
                    n_panels: q.n_panels.unwrap_or(d.n_panels),
                    rule,
                    rel_tolerance: q.rel_tolerance.unwrap_or(d.rel_tolerance),
                };
                spec.validate().map_err(|e| CliError::Invalid(format!("quadrature: {e}")))?;
                Some(spec)
            }
        };

        if let Some(a) = raw.alpha0_per_m {
            SpatialFrequency::new(a).map_err(|e| CliError::Invalid(format!("alpha0_per_m: {e}")))?;
        }

        Ok(Scenario {
            coil,
            coil_is_default,
            plates,
            sweep,
            quadrature,
            alpha0_override: raw.alpha0_per_m,
            hash: sha256_hex(text.as_bytes()),
        })
    }

    pub fn plate(&self, name: &str) -> Result<&Plate, CliError> {
        self.plates.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.plates.keys().map(String::as_str).collect();
            CliError::Invalid(format!("unknown plate '{name}' (scenario defines: {})", known.join(", ")))
        })
    }

    pub fn alpha0(&self) -> Result<SpatialFrequency, CliError> {
        match self.alpha0_override {
            Some(a) => SpatialFrequency::new(a),
            None => derive_alpha0(&self.coil),
        }
        .map_err(|e| CliError::Invalid(format!("alpha0: {e}")))
    }

    /// The quadrature block, or the coil's defaults when there is none.
    pub fn quadrature_or_default(&self) -> QuadratureSpec {
        self.quadrature.unwrap_or_else(|| QuadratureSpec::default_for(&self.coil))
    }
}

fn convert_plate(p: &RawPlate) -> Result<Plate, String> {
    let sigma = match (p.conductivity_MSm, p.conductivity_Sm) {
        (Some(ms), None) => ms * 1e6,
        (None, Some(s)) => s,
        _ => return Err("give exactly one of conductivity_MSm, conductivity_Sm".into()),
    };
    let d = match (p.thickness_mm, p.thickness_um) {
        (Some(mm), None) => mm * 1e-3,
        (None, Some(um)) => um * 1e-6,
        _ => return Err("give exactly one of thickness_mm, thickness_um".into()),
    };
    Plate::new(sigma, p.relative_permeability.unwrap_or(1.0), d).map_err(|e| e.to_string())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Shortest decimal that reads back as the same `f64`.
fn num(x: f64) -> String {
    let s = format!("{x}");
    if s.contains(['.', 'e', 'E']) || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

/// A `[plates.<name>]` table for `plate`.
pub fn plate_fragment(name: &str, plate: &Plate) -> String {
    let mut s = format!(
        "[plates.{name}]\nconductivity_MSm = {}\nthickness_mm = {}\n",
        num(plate.conductivity() / 1e6),
        num(plate.thickness() * 1e3)
    );
    if plate.is_magnetic() {
        s.push_str(&format!("relative_permeability = {}\n", num(plate.relative_permeability())));
    }
    s
}
