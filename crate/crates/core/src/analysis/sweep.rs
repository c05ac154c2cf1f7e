use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::dodd_deeds::{DoddDeedsSolver, QuadratureSpec};
use crate::model::{frequency_grid, CoilPair, InductanceSpectrum, ModelTag, Plate, SpatialFrequency, SweepSpec};
use crate::thin_plate::normalized_response_thin;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForwardModel {
    /// Normalized sheet response at one spatial frequency.
    ThinPlate { alpha0: SpatialFrequency },
    /// Absolute mutual-inductance change, henries.
    DoddDeeds { coil: CoilPair, quad: QuadratureSpec },
}

impl ForwardModel {
    pub fn tag(&self) -> ModelTag {
        match self {
            ForwardModel::ThinPlate { .. } => ModelTag::ThinPlate,
            ForwardModel::DoddDeeds { .. } => ModelTag::DoddDeeds,
        }
    }
}

#[derive(Debug, Clone)]
enum Prepared {
    Thin(SpatialFrequency),
    Dodd(Box<DoddDeedsSolver>),
}

/// A forward model with its frequency-independent work done.
///
/// Evaluation borrows immutably, so one prepared model can be shared across
/// threads.
#[derive(Debug, Clone)]
pub struct PreparedModel {
    inner: Prepared,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub thin_regime_exceeded: bool,
    pub tail_truncated: bool,
}

impl PreparedModel {
    pub fn new(model: &ForwardModel) -> Result<Self> {
        let inner = match model {
            ForwardModel::ThinPlate { alpha0 } => Prepared::Thin(*alpha0),
            ForwardModel::DoddDeeds { coil, quad } => Prepared::Dodd(Box::new(DoddDeedsSolver::new(coil, quad)?)),
        };
        Ok(PreparedModel { inner })
    }

    pub fn tag(&self) -> ModelTag {
        match self.inner {
            Prepared::Thin(_) => ModelTag::ThinPlate,
            Prepared::Dodd(_) => ModelTag::DoddDeeds,
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.tag() == ModelTag::ThinPlate
    }

    pub fn evaluate(&self, plate: &Plate, frequency: f64) -> Result<Evaluation> {
        let omega = 2.0 * PI * frequency;
        match &self.inner {
            Prepared::Thin(alpha0) => {
                let r = normalized_response_thin(*alpha0, omega, plate)?;
                Ok(Evaluation {
                    value: r.value,
                    thin_regime_exceeded: r.thin_regime_exceeded,
                    tail_truncated: false,
                })
            }
            Prepared::Dodd(solver) => {
                let r = solver.delta_l(plate, omega)?;
                Ok(Evaluation {
                    value: r.value,
                    thin_regime_exceeded: false,
                    tail_truncated: r.tail_exceeds(solver.quadrature().rel_tolerance),
                })
            }
        }
    }
}

/// A spectrum plus the warning counts gathered while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub spectrum: InductanceSpectrum,
    pub thin_regime_points: usize,
    pub tail_truncated_points: usize,
}

/// Builds a spectrum from per-frequency results, in grid order.
///
/// The first failure is reported with its frequency attached.
pub fn assemble(
    model: &PreparedModel,
    frequencies: Vec<f64>,
    results: Vec<Result<Evaluation>>,
) -> Result<SweepOutcome> {
    if results.len() != frequencies.len() {
        return Err(Error::GridMismatch("one result per frequency expected"));
    }
    let mut values = Vec::with_capacity(results.len());
    let (mut thin, mut tail) = (0, 0);
    for (&frequency, r) in frequencies.iter().zip(results) {
        let e = r.map_err(|source| Error::AtFrequency {
            frequency,
            source: Box::new(source),
        })?;
        thin += usize::from(e.thin_regime_exceeded);
        tail += usize::from(e.tail_truncated);
        values.push(e.value);
    }
    Ok(SweepOutcome {
        spectrum: InductanceSpectrum::new(frequencies, values, model.is_normalized(), model.tag())?,
        thin_regime_points: thin,
        tail_truncated_points: tail,
    })
}

pub fn sweep_detailed(model: &PreparedModel, plate: &Plate, spec: &SweepSpec) -> Result<SweepOutcome> {
    let frequencies = frequency_grid(spec)?;
    let results = frequencies.iter().map(|&f| model.evaluate(plate, f)).collect();
    assemble(model, frequencies, results)
}

pub fn sweep(model: &PreparedModel, plate: &Plate, spec: &SweepSpec) -> Result<InductanceSpectrum> {
    sweep_detailed(model, plate, spec).map(|o| o.spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Spacing;

    fn thin() -> PreparedModel {
        let alpha0 = SpatialFrequency::new(1.0 / 0.006).unwrap();
        PreparedModel::new(&ForwardModel::ThinPlate { alpha0 }).unwrap()
    }

    #[test]
    fn thin_sweep_shape_and_sign() {
        let p = Plate::non_magnetic(59.8e6, 0.56e-3).unwrap();
        let s = sweep(&thin(), &p, &SweepSpec::new(1e3, 5e5, 50, Spacing::Logarithmic)).unwrap();
        assert_eq!(s.len(), 50);
        assert!(s.is_normalized());
        assert!(s.delta_l().iter().all(|v| v.im <= 0.0));
    }

    #[test]
    fn single_point_matches_pointwise() {
        let p = Plate::non_magnetic(59.8e6, 0.56e-3).unwrap();
        let m = thin();
        let s = sweep(&m, &p, &SweepSpec::new(2e4, 2e4, 1, Spacing::Linear)).unwrap();
        assert_eq!(s.delta_l()[0], m.evaluate(&p, 2e4).unwrap().value);
    }

    #[test]
    fn errors_carry_the_frequency() {
        let p = Plate::new(1e6, 3.0, 1e-3).unwrap();
        let e = sweep(&thin(), &p, &SweepSpec::new(10.0, 100.0, 3, Spacing::Linear)).unwrap_err();
        assert!(matches!(e, Error::AtFrequency { frequency, .. } if frequency == 10.0));
        assert_eq!(e.root(), &Error::MagneticPlate(3.0));
    }
}
