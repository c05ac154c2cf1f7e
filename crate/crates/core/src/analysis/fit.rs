//! Least-squares recovery of `sigma*D` from a normalized spectrum.
//!
//! The sheet model is `m = -z / (1 + z)` with `z = j*w*mu0*S / (2*alpha0)`.
//! Parameters are fitted in log space, which keeps them positive and makes
//! the step test a relative one.
//!
//! Residuals are weighted by `1 / |s_i|` by default. Measurement noise on
//! these spectra is roughly proportional to the signal, and without weights
//! the saturated high-frequency points (`|s| ~ 1`, least sensitive to `S`)
//! dominate the fit.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::model::{InductanceSpectrum, SpatialFrequency, MU0};
use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 100;
const STEP_TOLERANCE: f64 = 1e-9;
const RESIDUAL_TOLERANCE: f64 = 1e-12;
/// Reciprocal condition number of the normal matrix below which a
/// parameter combination is treated as unidentifiable.
const RCOND_LIMIT: f64 = 1e-10;
/// Largest change of a log parameter in one step (a factor of e^2).
const MAX_LOG_STEP: f64 = 2.0;
/// `||dm/dln S|| / ||data||` below which the data no longer constrain `S`;
/// the iterate has drifted to `S -> 0` or `S -> inf`.
const MIN_SENSITIVITY: f64 = 1e-6;

/// Weight data points with `|s| < NEAR_ZERO_FRACTION * max|s|` as if they sat at that floor.
const WEIGHT_FLOOR: f64 = crate::analysis::NEAR_ZERO_FRACTION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Plain `sum |m_i - s_i|^2`.
    Uniform,
    /// `sum |m_i - s_i|^2 / |s_i|^2`, for noise proportional to the signal.
    #[default]
    Relative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaDFit {
    /// Conductance estimate, S.
    pub sigma_d: f64,
    pub alpha0_fit: Option<f64>,
    /// `||w (model - data)|| / ||w data||` at the returned iterate; with
    /// relative weights this is the rms relative residual.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Residual norm after each accepted step, starting with the initial guess.
    pub residual_history: Vec<f64>,
}

/// Objective `0.5 * sum w_i^2 |m_i - s_i|^2` over log parameters.
///
/// `params` is `[ln S]`, or `[ln S, ln alpha0]` when alpha0 is free.
#[derive(Debug, Clone)]
pub struct FitProblem {
    omegas: Vec<f64>,
    data: Vec<Complex64>,
    weights: Vec<f64>,
    alpha0: f64,
    fit_alpha0: bool,
}

impl FitProblem {
    pub fn new(
        spectrum: &InductanceSpectrum,
        alpha0: SpatialFrequency,
        fit_alpha0: bool,
        weighting: Weighting,
    ) -> Result<Self> {
        if !spectrum.is_normalized() {
            return Err(Error::Unfittable(
                "spectrum holds absolute henries; inversion needs a normalized (dL / L_air) spectrum",
            ));
        }
        if spectrum.len() < 3 {
            return Err(Error::Unfittable("at least 3 frequencies are needed"));
        }
        if spectrum.delta_l().iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            return Err(Error::Unfittable("spectrum is identically zero"));
        }
        if let Some(v) = spectrum.delta_l().iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid("spectrum", "contains non-finite values", v.re));
        }
        let floor = WEIGHT_FLOOR * spectrum.delta_l().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let weights = spectrum
            .delta_l()
            .iter()
            .map(|v| match weighting {
                Weighting::Uniform => 1.0,
                Weighting::Relative => 1.0 / v.norm().max(floor),
            })
            .collect();
        Ok(FitProblem {
            omegas: spectrum.frequencies().iter().map(|f| 2.0 * PI * f).collect(),
            data: spectrum.delta_l().to_vec(),
            weights,
            alpha0: alpha0.get(),
            fit_alpha0,
        })
    }

    pub fn n_params(&self) -> usize {
        if self.fit_alpha0 {
            2
        } else {
            1
        }
    }

    fn alpha(&self, params: &[f64]) -> f64 {
        if self.fit_alpha0 {
            libm::exp(params[1])
        } else {
            self.alpha0
        }
    }

    fn z(&self, params: &[f64], i: usize) -> Complex64 {
        let s = libm::exp(params[0]);
        Complex64::new(0.0, self.omegas[i] * MU0 * s / (2.0 * self.alpha(params)))
    }

    pub fn objective(&self, params: &[f64]) -> f64 {
        (0..self.data.len())
            .map(|i| {
                let z = self.z(params, i);
                ((-z / (1.0 + z) - self.data[i]) * self.weights[i]).norm_sqr()
            })
            .sum::<f64>()
            * 0.5
    }

    /// Complex residuals and their derivatives with respect to each parameter.
    fn linearize(&self, params: &[f64]) -> (Vec<Complex64>, Vec<[Complex64; 2]>) {
        let mut r = Vec::with_capacity(self.data.len());
        let mut jac = Vec::with_capacity(self.data.len());
        for i in 0..self.data.len() {
            let z = self.z(params, i);
            let one_z = 1.0 + z;
            let w = self.weights[i];
            r.push((-z / one_z - self.data[i]) * w);
            // dm/dln S = -z/(1+z)^2 and dm/dln alpha is its negative
            let d = -z / (one_z * one_z) * w;
            jac.push([d, -d]);
        }
        (r, jac)
    }

    fn normal_equations(&self, params: &[f64]) -> ([[f64; 2]; 2], [f64; 2]) {
        let (r, jac) = self.linearize(params);
        let n = self.n_params();
        let mut a = [[0.0; 2]; 2];
        let mut g = [0.0; 2];
        for (ri, ji) in r.iter().zip(&jac) {
            for p in 0..n {
                g[p] += ji[p].re * ri.re + ji[p].im * ri.im;
                for q in 0..n {
                    a[p][q] += ji[p].re * ji[q].re + ji[p].im * ji[q].im;
                }
            }
        }
        (a, g)
    }

    pub fn gradient(&self, params: &[f64]) -> Vec<f64> {
        let (_, g) = self.normal_equations(params);
        g[..self.n_params()].to_vec()
    }

    fn data_norm(&self) -> f64 {
        libm::sqrt(
            self.data
                .iter()
                .zip(&self.weights)
                .map(|(v, w)| (v * w).norm_sqr())
                .sum::<f64>(),
        )
    }
}

/// Closed-form starting value for `S`.
///
/// Inverting the sheet model point by point gives `z = -s / (1 + s)` and
/// `S = 2*alpha0*Im(z) / (w*mu0)`; the median over points resists noise near
/// full screening. Falls back to the low-frequency slope
/// `Im(s)/w -> -mu0*S/(2*alpha0)` at the lowest frequency.
pub fn initial_sigma_d(spectrum: &InductanceSpectrum, alpha0: SpatialFrequency) -> Option<f64> {
    let a = alpha0.get();
    let mut estimates: Vec<f64> = spectrum
        .iter()
        .filter_map(|(f, s)| {
            let omega = 2.0 * PI * f;
            let z = -s / (1.0 + s);
            let est = 2.0 * a * z.im / (omega * MU0);
            (est.is_finite() && est > 0.0).then_some(est)
        })
        .collect();
    if !estimates.is_empty() {
        estimates.sort_by(f64::total_cmp);
        let n = estimates.len();
        return Some(if n % 2 == 1 {
            estimates[n / 2]
        } else {
            0.5 * (estimates[n / 2 - 1] + estimates[n / 2])
        });
    }
    let (f, s) = spectrum.iter().next()?;
    let slope = -2.0 * a * s.im / (2.0 * PI * f * MU0);
    (slope.is_finite() && slope > 0.0).then_some(slope)
}

fn solve(a: [[f64; 2]; 2], g: [f64; 2], lambda: f64, n: usize) -> [f64; 2] {
    let d0 = a[0][0] * (1.0 + lambda);
    if n == 1 {
        return [-g[0] / d0, 0.0];
    }
    let d1 = a[1][1] * (1.0 + lambda);
    let det = d0 * d1 - a[0][1] * a[1][0];
    [
        -(d1 * g[0] - a[0][1] * g[1]) / det,
        -(d0 * g[1] - a[1][0] * g[0]) / det,
    ]
}

fn reciprocal_condition(a: [[f64; 2]; 2]) -> f64 {
    let tr = a[0][0] + a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = libm::sqrt((0.25 * tr * tr - det).max(0.0));
    let hi = 0.5 * tr + disc;
    let lo = 0.5 * tr - disc;
    if hi > 0.0 {
        (lo / hi).max(0.0)
    } else {
        0.0
    }
}

/// [`fit_sigma_d_weighted`] with relative weights.
pub fn fit_sigma_d(spectrum: &InductanceSpectrum, alpha0: SpatialFrequency, fit_alpha0: bool) -> Result<SigmaDFit> {
    fit_sigma_d_weighted(spectrum, alpha0, fit_alpha0, Weighting::Relative)
}

/// Levenberg-Marquardt fit of the sheet model to a normalized spectrum.
///
/// With `fit_alpha0` set the fit is refused: the model depends on `S` and
/// `alpha0` only through `S / alpha0`, so the pair is not identifiable from
/// any spectrum. The check is numerical (normal-matrix conditioning), so a
/// future model with separable parameters would pass it.
pub fn fit_sigma_d_weighted(
    spectrum: &InductanceSpectrum,
    alpha0: SpatialFrequency,
    fit_alpha0: bool,
    weighting: Weighting,
) -> Result<SigmaDFit> {
    let problem = FitProblem::new(spectrum, alpha0, fit_alpha0, weighting)?;
    let s0 = initial_sigma_d(spectrum, alpha0)
        .ok_or(Error::Unfittable("no positive sigma*D is consistent with the data"))?;
    let n = problem.n_params();
    let mut params = [libm::log(s0), libm::log(alpha0.get())];

    if fit_alpha0 && reciprocal_condition(problem.normal_equations(&params).0) < RCOND_LIMIT {
        return Err(Error::Unfittable(
            "sigma*D and alpha0 enter the model only through their ratio; fix alpha0 and fit sigma*D alone",
        ));
    }

    let scale = problem.data_norm();
    let rel = |f: f64| libm::sqrt(2.0 * f) / scale;
    let mut f = problem.objective(&params[..n]);
    let mut history = alloc::vec![rel(f)];
    let mut lambda = 1e-3;
    let mut converged = f == 0.0;
    let mut iterations = 0;

    while !converged && iterations < MAX_ITERATIONS {
        iterations += 1;
        let (a, g) = problem.normal_equations(&params[..n]);
        let mut accepted = None;
        let mut last_step = f64::INFINITY;
        while lambda < 1e16 {
            let mut step = solve(a, g, lambda, n);
            last_step = libm::fabs(step[0]).max(libm::fabs(step[1]));
            if last_step > MAX_LOG_STEP {
                let shrink = MAX_LOG_STEP / last_step;
                step = [step[0] * shrink, step[1] * shrink];
                last_step = MAX_LOG_STEP;
            }
            let mut trial = params;
            for p in 0..n {
                trial[p] += step[p];
            }
            let f_trial = problem.objective(&trial[..n]);
            if f_trial.is_finite() && f_trial <= f {
                lambda = (lambda * 0.1).max(1e-12);
                accepted = Some((trial, f_trial));
                break;
            }
            lambda *= 10.0;
        }
        match accepted {
            Some((trial, f_trial)) => {
                let change = if f > 0.0 { (f - f_trial) / f } else { 0.0 };
                params = trial;
                f = f_trial;
                history.push(rel(f));
                converged = last_step < STEP_TOLERANCE || change < RESIDUAL_TOLERANCE || f == 0.0;
            }
            None => {
                // no descent left at any damping: stationary to rounding
                converged = last_step < STEP_TOLERANCE;
                break;
            }
        }
    }

    let sigma_d = libm::exp(params[0]);
    let sensitivity = libm::sqrt(problem.normal_equations(&params[..n]).0[0][0]) / scale;
    if !(sigma_d.is_finite() && sigma_d > 0.0) || sensitivity < MIN_SENSITIVITY {
        converged = false;
    }

    Ok(SigmaDFit {
        sigma_d,
        alpha0_fit: fit_alpha0.then(|| libm::exp(params[1])),
        residual_norm: rel(f),
        iterations,
        converged,
        residual_history: history,
    })
}
