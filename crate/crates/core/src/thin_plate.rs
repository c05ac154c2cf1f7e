//! Single-spatial-frequency plate response and the conductivity-thickness
//! equivalence transform.
//!
//! Responses are normalized, `dL / L_air`, which removes the unknown
//! free-space field and drive current. The exact form is the generalized
//! reflection coefficient evaluated at `alpha0`. Letting the plate become a
//! sheet (`D -> 0` at fixed `sigma*D`) gives
//!
//! ```text
//! dL / L_air = -j*w*mu0*sigma*D / (2*alpha0 + j*w*mu0*sigma*D)
//! ```
//!
//! whose first-order term in `D` agrees with the exact form, and which
//! depends on the plate only through `sigma*D`. Two plates with the same
//! product therefore give the same sensor response, which is what
//! [`equivalent_plate`] and [`equivalent_thickness`] exploit.

use num_complex::Complex64;

use crate::model::{Plate, SpatialFrequency, MU0};
use crate::te_layered::generalized_reflection;
use crate::{Error, Result};

/// `D * alpha0` above which the sheet approximation is flagged.
pub const THIN_REGIME_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThinPlateResponse {
    pub value: Complex64,
    /// Set when `D * alpha0` exceeds [`THIN_REGIME_LIMIT`].
    pub thin_regime_exceeded: bool,
}

fn require_non_magnetic(plate: &Plate) -> Result<()> {
    if plate.is_magnetic() {
        Err(Error::MagneticPlate(plate.relative_permeability()))
    } else {
        Ok(())
    }
}

fn require_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("omega", "must be finite and positive", omega))
    }
}

pub fn normalized_response_exact(
    alpha0: SpatialFrequency,
    omega: f64,
    plate: &Plate,
) -> Result<ThinPlateResponse> {
    require_non_magnetic(plate)?;
    require_omega(omega)?;
    Ok(ThinPlateResponse {
        value: generalized_reflection(alpha0.get(), omega, plate, MU0),
        thin_regime_exceeded: false,
    })
}

pub fn normalized_response_thin(
    alpha0: SpatialFrequency,
    omega: f64,
    plate: &Plate,
) -> Result<ThinPlateResponse> {
    require_non_magnetic(plate)?;
    require_omega(omega)?;
    Ok(ThinPlateResponse {
        value: sheet_response(alpha0.get(), omega, plate.sigma_thickness()),
        thin_regime_exceeded: plate.thickness() * alpha0.get() > THIN_REGIME_LIMIT,
    })
}

/// Sheet-limit response for a conductance `sigma_d` (S).
pub fn sheet_response(alpha0: f64, omega: f64, sigma_d: f64) -> Complex64 {
    let b = omega * MU0 * sigma_d;
    Complex64::new(0.0, -b) / Complex64::new(2.0 * alpha0, b)
}

/// A plate together with the conductance it was built to preserve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalentPlate {
    pub plate: Plate,
    /// `plate.conductivity() * plate.thickness()`.
    pub sigma_thickness_product: f64,
}

impl EquivalentPlate {
    fn of(plate: Plate) -> Self {
        EquivalentPlate {
            sigma_thickness_product: plate.sigma_thickness(),
            plate,
        }
    }
}

/// Picks the representable quotient `target / fixed` whose product with
/// `fixed` rounds back to `target`, so the conductance survives the transform
/// bit for bit whenever such a value exists.
fn conserving_quotient(target: f64, fixed: f64) -> f64 {
    let q = target / fixed;
    let (down1, up1) = (q.next_down(), q.next_up());
    let candidates = [q, down1, up1, down1.next_down(), up1.next_up()];
    candidates
        .into_iter()
        .filter(|c| c * fixed == target)
        .min_by(|a, b| {
            let ea = libm::fabs(libm::fma(*a, fixed, -target));
            let eb = libm::fabs(libm::fma(*b, fixed, -target));
            ea.total_cmp(&eb)
        })
        .unwrap_or(q)
}

/// Equivalent plate with a chosen thickness: `sigma2 = sigma1 * D1 / D2`.
pub fn equivalent_plate(original: &Plate, target_thickness: f64) -> Result<EquivalentPlate> {
    require_non_magnetic(original)?;
    if !(target_thickness.is_finite() && target_thickness > 0.0) {
        return Err(Error::invalid(
            "target_thickness",
            "must be finite and positive",
            target_thickness,
        ));
    }
    if target_thickness == original.thickness() {
        return Ok(EquivalentPlate::of(*original));
    }
    let sigma = conserving_quotient(original.sigma_thickness(), target_thickness);
    Ok(EquivalentPlate::of(Plate::non_magnetic(sigma, target_thickness)?))
}

/// Equivalent plate with a chosen conductivity: `D2 = sigma1 * D1 / sigma2`.
pub fn equivalent_thickness(original: &Plate, target_conductivity: f64) -> Result<EquivalentPlate> {
    require_non_magnetic(original)?;
    if !(target_conductivity.is_finite() && target_conductivity > 0.0) {
        return Err(Error::invalid(
            "target_conductivity",
            "must be finite and positive",
            target_conductivity,
        ));
    }
    if target_conductivity == original.conductivity() {
        return Ok(EquivalentPlate::of(*original));
    }
    let thickness = conserving_quotient(original.sigma_thickness(), target_conductivity);
    Ok(EquivalentPlate::of(Plate::non_magnetic(target_conductivity, thickness)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn alpha0() -> SpatialFrequency {
        SpatialFrequency::new(1.0 / 0.006).unwrap()
    }

    fn copper() -> Plate {
        Plate::non_magnetic(59.8e6, 0.56e-3).unwrap()
    }

    #[test]
    fn zero_conductivity_gives_zero() {
        let p = Plate::non_magnetic(0.0, 1e-3).unwrap();
        for f in [10.0, 1e5] {
            let w = 2.0 * PI * f;
            assert_eq!(normalized_response_thin(alpha0(), w, &p).unwrap().value, Complex64::new(0.0, 0.0));
            assert_eq!(normalized_response_exact(alpha0(), w, &p).unwrap().value, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn magnetic_plates_are_rejected() {
        let p = Plate::new(1e6, 2.0, 1e-3).unwrap();
        assert_eq!(normalized_response_thin(alpha0(), 1.0, &p), Err(Error::MagneticPlate(2.0)));
        assert!(normalized_response_exact(alpha0(), 1.0, &p).is_err());
        assert!(equivalent_plate(&p, 2e-3).is_err());
        assert!(equivalent_thickness(&p, 1e5).is_err());
    }

    #[test]
    fn bad_omega_is_rejected() {
        assert!(normalized_response_thin(alpha0(), 0.0, &copper()).is_err());
        assert!(normalized_response_exact(alpha0(), f64::NAN, &copper()).is_err());
    }

    #[test]
    fn thin_regime_flag() {
        // copper 0.56 mm: D*alpha0 = 0.093
        let r = normalized_response_thin(alpha0(), 1e5, &copper()).unwrap();
        assert!(!r.thin_regime_exceeded);
        let brass = Plate::non_magnetic(16.744e6, 2.0e-3).unwrap();
        assert!(normalized_response_thin(alpha0(), 1e5, &brass).unwrap().thin_regime_exceeded);
    }

    #[test]
    fn high_frequency_screens_fully() {
        let v = sheet_response(1.0 / 0.006, 2.0 * PI * 1e12, 33488.0);
        assert!((v + 1.0).norm() < 1e-8);
    }

    #[test]
    fn low_frequency_slope() {
        let (a, s) = (1.0 / 0.006, 738.0);
        let w = 2.0 * PI * 1.0;
        let v = sheet_response(a, w, s);
        let slope = -w * MU0 * s / (2.0 * a);
        assert!((v.im - slope).abs() < 1e-6 * slope.abs());
        // real part is second order: -(b/2a)^2 / (1 + (b/2a)^2)
        let t = slope * slope;
        assert!((v.re + t / (1.0 + t)).abs() < 1e-12 * t);
    }

    #[test]
    fn copper_to_brass_thickness() {
        let eq = equivalent_plate(&copper(), 2.00e-3).unwrap();
        assert!((eq.plate.conductivity() - 16.744e6).abs() < 1e-6 * 16.744e6);
        assert_eq!(eq.sigma_thickness_product, copper().sigma_thickness());
        assert_eq!(eq.plate.thickness(), 2.00e-3);
    }

    #[test]
    fn aluminium_to_55um() {
        let al = Plate::non_magnetic(36.9e6, 20e-6).unwrap();
        let eq = equivalent_plate(&al, 55e-6).unwrap();
        assert!((eq.plate.conductivity() / 1e6 - 13.418).abs() < 5e-4);
        // the rounded 13.5 MS/m used in practice is 0.6 % off
        assert!(((13.5e6 - eq.plate.conductivity()) / eq.plate.conductivity() - 0.0061).abs() < 5e-4);
    }

    #[test]
    fn copper_film_to_target_conductivity() {
        let film = Plate::non_magnetic(59.8e6, 20e-6).unwrap();
        let eq = equivalent_thickness(&film, 17.3e6).unwrap();
        assert!((eq.plate.thickness() * 1e6 - 69.13).abs() < 0.01);
        assert_eq!(eq.plate.conductivity(), 17.3e6);
    }

    #[test]
    fn identity_transforms() {
        let p = copper();
        assert_eq!(equivalent_plate(&p, p.thickness()).unwrap().plate, p);
        assert_eq!(equivalent_thickness(&p, p.conductivity()).unwrap().plate, p);
    }

    #[test]
    fn target_must_be_positive() {
        assert!(equivalent_plate(&copper(), 0.0).is_err());
        assert!(equivalent_plate(&copper(), -1.0).is_err());
        assert!(equivalent_thickness(&copper(), 0.0).is_err());
        assert!(equivalent_thickness(&copper(), f64::INFINITY).is_err());
    }
}
