//! Sensor and sample descriptions shared by every solver.
//!
//! All quantities are SI. Conversions from the mixed units people actually
//! write down (mm, um, MS/m) happen once, at the edges (`default_sensor` and
//! the scenario parser in the companion crate).

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Vacuum permeability, H/m.
pub const MU0: f64 = 4.0e-7 * PI;

/// Coaxial transmitter/receiver pair with rectangular winding cross-sections.
///
/// The transmitter sits closest to the plate: its lower face is `liftoff`
/// above the plate surface and the receiver starts `gap` above the
/// transmitter's upper face. Both coils share radii and height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoilPair {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub coil_height: f64,
    pub gap: f64,
    pub liftoff: f64,
    pub turns_tx: u32,
    pub turns_rx: u32,
    pub drive_current: f64,
}

impl CoilPair {
    pub fn validate(&self) -> Result<()> {
        let finite = |name, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, "must be finite", v))
            }
        };
        finite("inner_radius", self.inner_radius)?;
        finite("outer_radius", self.outer_radius)?;
        finite("coil_height", self.coil_height)?;
        finite("gap", self.gap)?;
        finite("liftoff", self.liftoff)?;
        finite("drive_current", self.drive_current)?;
        if self.inner_radius <= 0.0 {
            return Err(Error::invalid("inner_radius", "must be positive", self.inner_radius));
        }
        if self.outer_radius <= self.inner_radius {
            return Err(Error::invalid(
                "outer_radius",
                "must exceed inner_radius",
                self.outer_radius,
            ));
        }
        if self.coil_height <= 0.0 {
            return Err(Error::invalid("coil_height", "must be positive", self.coil_height));
        }
        if self.gap < 0.0 {
            return Err(Error::invalid("gap", "must be non-negative", self.gap));
        }
        if self.liftoff <= 0.0 {
            return Err(Error::invalid("liftoff", "must be positive", self.liftoff));
        }
        if self.turns_tx < 1 {
            return Err(Error::invalid("turns_tx", "must be at least 1", self.turns_tx.into()));
        }
        if self.turns_rx < 1 {
            return Err(Error::invalid("turns_rx", "must be at least 1", self.turns_rx.into()));
        }
        if self.drive_current <= 0.0 {
            return Err(Error::invalid(
                "drive_current",
                "must be positive",
                self.drive_current,
            ));
        }
        Ok(())
    }

    /// Axial extent `(bottom, top)` of the transmitter above the plate.
    pub fn tx_span(&self) -> (f64, f64) {
        (self.liftoff, self.liftoff + self.coil_height)
    }

    /// Axial extent `(bottom, top)` of the receiver above the plate.
    pub fn rx_span(&self) -> (f64, f64) {
        let bottom = self.liftoff + self.coil_height + self.gap;
        (bottom, bottom + self.coil_height)
    }

    /// Receiver EMF `j*omega*I*dL` for a mutual-inductance change.
    pub fn induced_emf(&self, delta_l: Complex64, omega: f64) -> Complex64 {
        Complex64::new(0.0, omega * self.drive_current) * delta_l
    }

    /// The same sensor with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> CoilPair {
        CoilPair {
            inner_radius: self.inner_radius * factor,
            outer_radius: self.outer_radius * factor,
            coil_height: self.coil_height * factor,
            gap: self.gap * factor,
            liftoff: self.liftoff * factor,
            ..*self
        }
    }
}

/// The air-cored two-coil probe used for the copper/brass and aluminium cases.
///
/// Inner and outer diameters are 12 mm and 12.63 mm.
pub fn default_sensor() -> CoilPair {
    CoilPair {
        inner_radius: 12.0e-3 / 2.0,
        outer_radius: 12.63e-3 / 2.0,
        coil_height: 8.0e-3,
        gap: 2.0e-3,
        liftoff: 1.0e-3,
        turns_tx: 25,
        turns_rx: 25,
        drive_current: 10.0e-3,
    }
}

/// A single laterally infinite conductive layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plate {
    conductivity: f64,
    relative_permeability: f64,
    thickness: f64,
}

impl Plate {
    pub fn new(conductivity: f64, relative_permeability: f64, thickness: f64) -> Result<Self> {
        if !(conductivity.is_finite() && conductivity >= 0.0) {
            return Err(Error::invalid(
                "conductivity",
                "must be finite and non-negative",
                conductivity,
            ));
        }
        if !(relative_permeability.is_finite() && relative_permeability >= 1.0) {
            return Err(Error::invalid(
                "relative_permeability",
                "must be finite and at least 1",
                relative_permeability,
            ));
        }
        if !(thickness.is_finite() && thickness > 0.0) {
            return Err(Error::invalid("thickness", "must be finite and positive", thickness));
        }
        Ok(Plate {
            conductivity,
            relative_permeability,
            thickness,
        })
    }

    pub fn non_magnetic(conductivity: f64, thickness: f64) -> Result<Self> {
        Plate::new(conductivity, 1.0, thickness)
    }

    pub fn conductivity(&self) -> f64 {
        self.conductivity
    }

    pub fn relative_permeability(&self) -> f64 {
        self.relative_permeability
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    /// Absolute permeability, H/m.
    pub fn permeability(&self) -> f64 {
        MU0 * self.relative_permeability
    }

    /// Sheet conductance sigma*D, in siemens.
    pub fn sigma_thickness(&self) -> f64 {
        self.conductivity * self.thickness
    }

    pub fn is_magnetic(&self) -> bool {
        self.relative_permeability != 1.0
    }
}

/// Representative transverse wavenumber of a sensor, 1/m.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SpatialFrequency(f64);

impl SpatialFrequency {
    pub fn new(alpha0: f64) -> Result<Self> {
        if alpha0.is_finite() && alpha0 > 0.0 {
            Ok(SpatialFrequency(alpha0))
        } else {
            Err(Error::invalid("alpha0", "must be finite and positive", alpha0))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// One over the smallest coil dimension, taken as `min(inner_radius, coil_height)`.
///
/// The radial winding thickness is not a candidate: for thin windings it
/// would push `alpha0` so high that no practical plate satisfies the thin
/// regime `D * alpha0 << 1`.
pub fn derive_alpha0(coil: &CoilPair) -> Result<SpatialFrequency> {
    coil.validate()?;
    SpatialFrequency::new(1.0 / coil.inner_radius.min(coil.coil_height))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Logarithmic,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub f_min: f64,
    pub f_max: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl SweepSpec {
    pub fn new(f_min: f64, f_max: f64, n_points: usize, spacing: Spacing) -> Self {
        SweepSpec {
            f_min,
            f_max,
            n_points,
            spacing,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_min.is_finite() && self.f_min > 0.0) {
            return Err(Error::invalid("f_min", "must be finite and positive", self.f_min));
        }
        if !(self.f_max.is_finite() && self.f_max >= self.f_min) {
            return Err(Error::invalid("f_max", "must be finite and >= f_min", self.f_max));
        }
        if self.n_points == 0 {
            return Err(Error::invalid("n_points", "must be at least 1", 0.0));
        }
        if self.n_points == 1 && self.f_min != self.f_max {
            return Err(Error::DegenerateGrid {
                f_min: self.f_min,
                f_max: self.f_max,
            });
        }
        if self.n_points > 1 && self.f_min == self.f_max {
            return Err(Error::invalid(
                "n_points",
                "several points need f_max > f_min",
                self.n_points as f64,
            ));
        }
        Ok(())
    }
}

/// Frequencies of a sweep, endpoint-inclusive and strictly increasing.
pub fn frequency_grid(spec: &SweepSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.n_points;
    if n == 1 {
        return Ok(alloc::vec![spec.f_min]);
    }
    let last = (n - 1) as f64;
    let mut grid: Vec<f64> = match spec.spacing {
        Spacing::Logarithmic => {
            let log_span = libm::log(spec.f_max / spec.f_min);
            (0..n)
                .map(|i| spec.f_min * libm::exp(log_span * i as f64 / last))
                .collect()
        }
        Spacing::Linear => {
            let step = (spec.f_max - spec.f_min) / last;
            (0..n).map(|i| spec.f_min + step * i as f64).collect()
        }
    };
    grid[0] = spec.f_min;
    grid[n - 1] = spec.f_max;
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "n_points",
            "too many points to resolve between f_min and f_max",
            n as f64,
        ));
    }
    Ok(grid)
}

/// Which forward model produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    ThinPlate,
    DoddDeeds,
}

impl ModelTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::ThinPlate => "thin_plate",
            ModelTag::DoddDeeds => "dodd_deeds",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "thin_plate" => Some(ModelTag::ThinPlate),
            "dodd_deeds" => Some(ModelTag::DoddDeeds),
            _ => None,
        }
    }
}

/// Complex mutual-inductance change against frequency.
///
/// `normalized` spectra hold `dL / L_air` (dimensionless); the rest hold
/// henries.
#[derive(Debug, Clone, PartialEq)]
pub struct InductanceSpectrum {
    frequencies: Vec<f64>,
    delta_l: Vec<Complex64>,
    normalized: bool,
    model: ModelTag,
}

impl InductanceSpectrum {
    pub fn new(
        frequencies: Vec<f64>,
        delta_l: Vec<Complex64>,
        normalized: bool,
        model: ModelTag,
    ) -> Result<Self> {
        if frequencies.len() != delta_l.len() {
            return Err(Error::invalid(
                "delta_l",
                "length differs from the frequency list",
                delta_l.len() as f64,
            ));
        }
        if frequencies.is_empty() {
            return Err(Error::invalid("frequencies", "must not be empty", 0.0));
        }
        if let Some(&f) = frequencies.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(Error::invalid("frequencies", "must be finite and positive", f));
        }
        if let Some(w) = frequencies.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::invalid("frequencies", "must be strictly increasing", w[1]));
        }
        Ok(InductanceSpectrum {
            frequencies,
            delta_l,
            normalized,
            model,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn delta_l(&self) -> &[Complex64] {
        &self.delta_l
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.frequencies.iter().copied().zip(self.delta_l.iter().copied())
    }

    /// Same grid and metadata with every value transformed.
    pub fn map_values(&self, mut f: impl FnMut(usize, Complex64) -> Complex64) -> Self {
        InductanceSpectrum {
            frequencies: self.frequencies.clone(),
            delta_l: self
                .delta_l
                .iter()
                .enumerate()
                .map(|(i, &v)| f(i, v))
                .collect(),
            normalized: self.normalized,
            model: self.model,
        }
    }
}
