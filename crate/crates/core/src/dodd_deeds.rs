//! Absolute mutual-inductance change of a coaxial coil pair above a plate.
//!
//! For rectangular windings with uniform turn density the change is
//!
//! ```text
//! dL(w) = K * integral_0^inf P(a)^2 / a^6 * A(a) * phi(a, w) da
//! K     = pi * mu0 * N_T * N_R / ((r2 - r1)^2 * h_T * h_R)
//! P(a)  = integral_{a r1}^{a r2} x J1(x) dx
//! A(a)  = (e^{-a l1T} - e^{-a l2T}) (e^{-a l1R} - e^{-a l2R})
//! ```
//!
//! where `phi` is the generalized reflection coefficient of the plate at
//! transverse wavenumber `a`. The free-space mutual inductance uses the same
//! radial factor with the direct-coupling axial factor instead of `A * phi`.
//!
//! Everything except `phi` is frequency-independent, so a sweep builds a
//! [`KernelCache`] once and then only evaluates reflections.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::model::{CoilPair, Plate, MU0};
use crate::quadrature::{graded_breaks, integrate_adaptive, integrate_real_fixed, PanelLayout};
use crate::te_layered::generalized_reflection;
use crate::{Error, Result};

/// Default truncation: `ALPHA_MAX_FACTOR / min(liftoff, inner_radius)`.
pub const ALPHA_MAX_FACTOR: f64 = 40.0;
pub const DEFAULT_PANELS: usize = 256;
pub const DEFAULT_REL_TOLERANCE: f64 = 1e-8;
/// Panel budget of the adaptive rule, as a multiple of the starting count.
const ADAPTIVE_BUDGET: usize = 64;
/// Halvings of the first panel towards `alpha = 0`. Low-frequency
/// reflections vary on the scale `w*mu0*sigma*D`, which can be many decades
/// below the panel width.
pub const GRADING_LEVELS: u32 = 30;
/// Widest sub-panel used for the radial Bessel integral, in units of `x`.
const RADIAL_PANEL_WIDTH: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    Adaptive,
    FixedPanel,
}

impl QuadratureRule {
    pub fn as_str(self) -> &'static str {
        match self {
            QuadratureRule::Adaptive => "adaptive",
            QuadratureRule::FixedPanel => "fixed-panel",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "adaptive" => Some(QuadratureRule::Adaptive),
            "fixed-panel" | "fixed_panel" => Some(QuadratureRule::FixedPanel),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Upper limit of the spatial-frequency integral, 1/m.
    pub alpha_max: f64,
    /// Equal panels on `[0, alpha_max]` before the first one is graded;
    /// the adaptive rule starts from the same layout.
    pub n_panels: usize,
    pub rule: QuadratureRule,
    pub rel_tolerance: f64,
}

impl QuadratureSpec {
    pub fn default_for(coil: &CoilPair) -> Self {
        QuadratureSpec {
            alpha_max: ALPHA_MAX_FACTOR / coil.liftoff.min(coil.inner_radius),
            n_panels: DEFAULT_PANELS,
            rule: QuadratureRule::FixedPanel,
            rel_tolerance: DEFAULT_REL_TOLERANCE,
        }
    }

    /// Panel breakpoints shared by both rules.
    pub fn breaks(&self) -> Vec<f64> {
        graded_breaks(0.0, self.alpha_max, self.n_panels, GRADING_LEVELS)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_max.is_finite() && self.alpha_max > 0.0) {
            return Err(Error::invalid("alpha_max", "must be finite and positive", self.alpha_max));
        }
        if self.n_panels < 8 {
            return Err(Error::invalid("n_panels", "must be at least 8", self.n_panels as f64));
        }
        if !(self.rel_tolerance > 0.0 && self.rel_tolerance < 1.0) {
            return Err(Error::invalid(
                "rel_tolerance",
                "must lie strictly between 0 and 1",
                self.rel_tolerance,
            ));
        }
        Ok(())
    }
}

/// First-kind Bessel function of order one.
pub fn bessel_j1(x: f64) -> f64 {
    libm::j1(x)
}

/// Coil kernel factors at one spatial frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoilKernel {
    /// `P(a)`, the radial winding integral.
    pub radial: f64,
    /// `A(a)`, the plate-path axial factor.
    pub axial: f64,
    /// `K`, in H*m (the integral supplies 1/m).
    pub prefactor: f64,
}

impl CoilKernel {
    /// `K * P^2 / a^6 * A`, the weight multiplying the reflection coefficient.
    pub fn weight(&self, alpha: f64) -> f64 {
        self.prefactor * radial_weight(self.radial, alpha) * self.axial
    }
}

fn radial_weight(p: f64, alpha: f64) -> f64 {
    let q = p / (alpha * alpha * alpha);
    q * q
}

/// `integral_{a r1}^{a r2} x J1(x) dx`.
pub fn radial_integral(alpha: f64, r1: f64, r2: f64) -> f64 {
    integrate_real_fixed(|x| x * bessel_j1(x), alpha * r1, alpha * r2, RADIAL_PANEL_WIDTH)
}

/// `e^{-a lo} - e^{-a hi}` without cancellation at small `a`.
fn exp_window(alpha: f64, lo: f64, hi: f64) -> f64 {
    -libm::exp(-alpha * lo) * libm::expm1(-alpha * (hi - lo))
}

/// Axial factor for the path coil -> plate -> coil.
pub fn plate_axial_factor(coil: &CoilPair, alpha: f64) -> f64 {
    let (t1, t2) = coil.tx_span();
    let (r1, r2) = coil.rx_span();
    exp_window(alpha, t1, t2) * exp_window(alpha, r1, r2)
}

/// Axial factor for the direct transmitter -> receiver coupling.
pub fn free_space_axial_factor(coil: &CoilPair, alpha: f64) -> f64 {
    let (t1, t2) = coil.tx_span();
    let (r1, r2) = coil.rx_span();
    // (e^{a t2} - e^{a t1}) (e^{-a r1} - e^{-a r2}), with r1 >= t2
    libm::exp(-alpha * (r1 - t2)) * libm::expm1(-alpha * (t2 - t1)) * libm::expm1(-alpha * (r2 - r1))
}

pub fn kernel_prefactor(coil: &CoilPair) -> f64 {
    let dr = coil.outer_radius - coil.inner_radius;
    PI * MU0 * f64::from(coil.turns_tx) * f64::from(coil.turns_rx)
        / (dr * dr * coil.coil_height * coil.coil_height)
}

pub fn coil_kernel(coil: &CoilPair, alpha: f64) -> CoilKernel {
    CoilKernel {
        radial: radial_integral(alpha, coil.inner_radius, coil.outer_radius),
        axial: plate_axial_factor(coil, alpha),
        prefactor: kernel_prefactor(coil),
    }
}

/// Quadrature result with error and truncation-tail estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T = Complex64> {
    pub value: T,
    /// Estimated quadrature error on `[0, alpha_max]`.
    pub error: f64,
    /// Estimated magnitude of the neglected part beyond `alpha_max`.
    pub tail: f64,
}

impl Integral<Complex64> {
    pub fn tail_exceeds(&self, rel_tolerance: f64) -> bool {
        self.tail > rel_tolerance * self.value.norm()
    }
}

impl Integral<f64> {
    pub fn tail_exceeds(&self, rel_tolerance: f64) -> bool {
        self.tail > rel_tolerance * libm::fabs(self.value)
    }
}

/// Decay length scale of an integrand beyond `alpha_max`, 1/m.
///
/// Exponential decay `e^{-rate*a}` integrates to `1/rate`; without
/// exponential decay the `a^-5` envelope of `P^2/a^6` leaves `a_max/4`.
fn tail_length(rate: f64, alpha_max: f64) -> f64 {
    let algebraic = alpha_max / 4.0;
    if rate > 0.0 {
        (1.0 / rate).min(algebraic)
    } else {
        algebraic
    }
}

fn plate_decay_rate(coil: &CoilPair) -> f64 {
    coil.tx_span().0 + coil.rx_span().0
}

fn check_converged(error: f64, value: f64, rel_tolerance: f64) -> Result<()> {
    let tolerance = rel_tolerance * value;
    if error <= tolerance {
        Ok(())
    } else {
        Err(Error::NonConvergence {
            estimate: error,
            tolerance,
        })
    }
}

fn check_inputs(coil: &CoilPair, quad: &QuadratureSpec) -> Result<()> {
    coil.validate()?;
    quad.validate()
}

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("omega", "must be finite and positive", omega))
    }
}

/// Frequency-independent kernel values on a fixed panel layout.
#[derive(Debug, Clone)]
pub struct KernelCache {
    coil: CoilPair,
    quad: QuadratureSpec,
    layout: PanelLayout,
    plate_weights: Vec<f64>,
    air_weights: Vec<f64>,
    plate_weight_at_max: f64,
    air_weight_at_max: f64,
}

impl KernelCache {
    /// Tabulates the kernel at every node of the panel layout of `quad`.
    ///
    /// The rule field of `quad` is ignored; the cache always integrates with
    /// fixed panels.
    pub fn build(coil: &CoilPair, quad: &QuadratureSpec) -> Result<Self> {
        check_inputs(coil, quad)?;
        let layout = PanelLayout::from_breaks(&quad.breaks());
        let prefactor = kernel_prefactor(coil);
        let mut plate_weights = Vec::with_capacity(layout.nodes().len());
        let mut air_weights = Vec::with_capacity(layout.nodes().len());
        for &alpha in layout.nodes() {
            let radial = prefactor
                * radial_weight(radial_integral(alpha, coil.inner_radius, coil.outer_radius), alpha);
            plate_weights.push(radial * plate_axial_factor(coil, alpha));
            air_weights.push(radial * free_space_axial_factor(coil, alpha));
        }
        let k_max = coil_kernel(coil, quad.alpha_max);
        let air_weight_at_max = k_max.prefactor
            * radial_weight(k_max.radial, quad.alpha_max)
            * free_space_axial_factor(coil, quad.alpha_max);
        Ok(KernelCache {
            coil: *coil,
            quad: *quad,
            layout,
            plate_weights,
            air_weights,
            plate_weight_at_max: k_max.weight(quad.alpha_max),
            air_weight_at_max,
        })
    }

    pub fn coil(&self) -> &CoilPair {
        &self.coil
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    /// Spatial-frequency nodes of the cache.
    pub fn nodes(&self) -> &[f64] {
        self.layout.nodes()
    }

    /// Integrates the plate-path kernel against an arbitrary reflection
    /// coefficient `phi(alpha)`.
    pub fn integrate_reflection<F>(&self, phi: F) -> Result<Integral>
    where
        F: Fn(f64) -> Complex64,
    {
        let values: Vec<Complex64> = self
            .layout
            .nodes()
            .iter()
            .zip(&self.plate_weights)
            .map(|(&alpha, &w)| if w == 0.0 { Complex64::new(0.0, 0.0) } else { phi(alpha) * w })
            .collect();
        let est = self.layout.integrate_values(&values);
        check_converged(est.error, est.value.norm(), self.quad.rel_tolerance)?;
        let tail = self.plate_weight_at_max
            * phi(self.quad.alpha_max).norm()
            * tail_length(plate_decay_rate(&self.coil), self.quad.alpha_max);
        Ok(Integral {
            value: est.value,
            error: est.error,
            tail,
        })
    }

    pub fn delta_l(&self, plate: &Plate, omega: f64) -> Result<Integral> {
        check_omega(omega)?;
        self.integrate_reflection(|alpha| generalized_reflection(alpha, omega, plate, MU0))
    }

    pub fn delta_l_air(&self) -> Result<Integral<f64>> {
        let est = self.layout.integrate_values(
            &self
                .air_weights
                .iter()
                .map(|&w| Complex64::new(w, 0.0))
                .collect::<Vec<_>>(),
        );
        check_converged(est.error, libm::fabs(est.value.re), self.quad.rel_tolerance)?;
        Ok(Integral {
            value: est.value.re,
            error: est.error,
            tail: self.air_weight_at_max * tail_length(self.coil.gap, self.quad.alpha_max),
        })
    }
}

/// Forward solver that reuses a [`KernelCache`] for the fixed-panel rule
/// and integrates adaptively otherwise.
#[derive(Debug, Clone)]
pub struct DoddDeedsSolver {
    coil: CoilPair,
    quad: QuadratureSpec,
    cache: Option<KernelCache>,
}

impl DoddDeedsSolver {
    pub fn new(coil: &CoilPair, quad: &QuadratureSpec) -> Result<Self> {
        check_inputs(coil, quad)?;
        let cache = match quad.rule {
            QuadratureRule::FixedPanel => Some(KernelCache::build(coil, quad)?),
            QuadratureRule::Adaptive => None,
        };
        Ok(DoddDeedsSolver {
            coil: *coil,
            quad: *quad,
            cache,
        })
    }

    pub fn coil(&self) -> &CoilPair {
        &self.coil
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    pub fn delta_l(&self, plate: &Plate, omega: f64) -> Result<Integral> {
        match &self.cache {
            Some(cache) => cache.delta_l(plate, omega),
            None => adaptive_delta_l(&self.coil, plate, omega, &self.quad),
        }
    }

    pub fn delta_l_air(&self) -> Result<Integral<f64>> {
        match &self.cache {
            Some(cache) => cache.delta_l_air(),
            None => adaptive_delta_l_air(&self.coil, &self.quad),
        }
    }
}

fn adaptive_delta_l(
    coil: &CoilPair,
    plate: &Plate,
    omega: f64,
    quad: &QuadratureSpec,
) -> Result<Integral> {
    let integrand = |alpha: f64| {
        let w = coil_kernel(coil, alpha).weight(alpha);
        if w == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            generalized_reflection(alpha, omega, plate, MU0) * w
        }
    };
    let est = integrate_adaptive(
        integrand,
        &quad.breaks(),
        quad.rel_tolerance,
        0.0,
        quad.n_panels * ADAPTIVE_BUDGET,
    )?;
    let tail = integrand(quad.alpha_max).norm() * tail_length(plate_decay_rate(coil), quad.alpha_max);
    Ok(Integral {
        value: est.value,
        error: est.error,
        tail,
    })
}

fn adaptive_delta_l_air(coil: &CoilPair, quad: &QuadratureSpec) -> Result<Integral<f64>> {
    let prefactor = kernel_prefactor(coil);
    let integrand = |alpha: f64| {
        let p = radial_integral(alpha, coil.inner_radius, coil.outer_radius);
        prefactor * radial_weight(p, alpha) * free_space_axial_factor(coil, alpha)
    };
    let est = integrate_adaptive(
        |a| Complex64::new(integrand(a), 0.0),
        &quad.breaks(),
        quad.rel_tolerance,
        0.0,
        quad.n_panels * ADAPTIVE_BUDGET,
    )?;
    Ok(Integral {
        value: est.value.re,
        error: est.error,
        tail: libm::fabs(integrand(quad.alpha_max)) * tail_length(coil.gap, quad.alpha_max),
    })
}

/// Mutual-inductance change caused by `plate`, in henries.
pub fn delta_l(coil: &CoilPair, plate: &Plate, omega: f64, quad: &QuadratureSpec) -> Result<Integral> {
    check_inputs(coil, quad)?;
    check_omega(omega)?;
    match quad.rule {
        QuadratureRule::FixedPanel => KernelCache::build(coil, quad)?.delta_l(plate, omega),
        QuadratureRule::Adaptive => adaptive_delta_l(coil, plate, omega, quad),
    }
}

/// Free-space transmitter/receiver mutual inductance, in henries.
pub fn delta_l_air(coil: &CoilPair, quad: &QuadratureSpec) -> Result<Integral<f64>> {
    check_inputs(coil, quad)?;
    match quad.rule {
        QuadratureRule::FixedPanel => KernelCache::build(coil, quad)?.delta_l_air(),
        QuadratureRule::Adaptive => adaptive_delta_l_air(coil, quad),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::default_sensor;

    #[test]
    fn j1_reference_values() {
        assert_eq!(bessel_j1(0.0), 0.0);
        assert!((bessel_j1(1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
    }

    #[test]
    fn radial_integral_small_argument() {
        let (r1, r2) = (6.0e-3, 6.315e-3);
        for alpha in [1e-3, 1e-1, 1.0] {
            let p = radial_integral(alpha, r1, r2);
            let leading = alpha * alpha * alpha * (r2 * r2 * r2 - r1 * r1 * r1) / 6.0;
            assert!((p - leading).abs() < 1e-4 * leading, "{alpha}: {p} vs {leading}");
        }
    }

    #[test]
    fn axial_factor_shape() {
        let s = default_sensor();
        assert_eq!(plate_axial_factor(&s, 0.0), 0.0);
        assert!(plate_axial_factor(&s, 1.0) > 0.0);
        assert!(free_space_axial_factor(&s, 1.0) > 0.0);
    }

    #[test]
    fn quadrature_spec_validation() {
        let s = default_sensor();
        let q = QuadratureSpec::default_for(&s);
        assert!((q.alpha_max - 40_000.0).abs() < 1e-6);
        assert!(q.validate().is_ok());
        assert!(QuadratureSpec { n_panels: 7, ..q }.validate().is_err());
        assert!(QuadratureSpec { alpha_max: 0.0, ..q }.validate().is_err());
        assert!(QuadratureSpec { rel_tolerance: 1.0, ..q }.validate().is_err());
        assert!(QuadratureSpec { rel_tolerance: 0.0, ..q }.validate().is_err());
    }

    #[test]
    fn rule_names_round_trip() {
        for r in [QuadratureRule::Adaptive, QuadratureRule::FixedPanel] {
            assert_eq!(QuadratureRule::parse(r.as_str()), Some(r));
        }
        assert_eq!(QuadratureRule::parse("simpson"), None);
    }

    #[test]
    fn zero_conductivity_is_exactly_zero() {
        let s = default_sensor();
        let q = QuadratureSpec::default_for(&s);
        let p = Plate::non_magnetic(0.0, 1e-3).unwrap();
        for rule in [QuadratureRule::FixedPanel, QuadratureRule::Adaptive] {
            let v = delta_l(&s, &p, 1e4, &QuadratureSpec { rule, ..q }).unwrap();
            assert_eq!(v.value, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn rejects_non_positive_omega() {
        let s = default_sensor();
        let q = QuadratureSpec::default_for(&s);
        let p = Plate::non_magnetic(1e6, 1e-3).unwrap();
        assert!(delta_l(&s, &p, 0.0, &q).is_err());
    }

    #[test]
    fn tight_tolerance_on_coarse_panels_fails() {
        let s = default_sensor();
        let q = QuadratureSpec {
            n_panels: 8,
            rel_tolerance: 1e-15,
            ..QuadratureSpec::default_for(&s)
        };
        let p = Plate::non_magnetic(59.8e6, 0.56e-3).unwrap();
        assert!(matches!(delta_l(&s, &p, 1e5, &q), Err(Error::NonConvergence { .. })));
    }
}
