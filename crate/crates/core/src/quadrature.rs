//! Gauss-Kronrod 7/15 quadrature for complex integrands on finite intervals.
//!
//! Two drivers share the same panel rule:
//!
//! - fixed panels, whose nodes are known up front so that anything
//!   frequency-independent can be tabulated once ([`PanelLayout`]);
//! - globally adaptive bisection in the style of QUADPACK's QAG
//!   ([`integrate_adaptive`]).
//!
//! The embedded 7-point Gauss-Legendre result gives each panel's error
//! estimate, rescaled with the usual QUADPACK heuristic.

#![allow(clippy::excessive_precision)]

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::{Error, Result};

/// Kronrod abscissae on [-1, 1]; odd indices and the centre are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Nodes per panel.
pub const NODES_PER_PANEL: usize = 15;

/// Integral value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

/// Node positions of one panel, in the order [`panel_estimate`] expects:
/// the centre, then `(c - h*x_k, c + h*x_k)` pairs for `k = 0..7`.
pub fn panel_nodes(a: f64, b: f64) -> [f64; NODES_PER_PANEL] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [c; NODES_PER_PANEL];
    for k in 0..7 {
        out[1 + 2 * k] = c - h * XGK[k];
        out[2 + 2 * k] = c + h * XGK[k];
    }
    out
}

/// Applies the 7/15 rule to integrand values sampled at [`panel_nodes`].
pub fn panel_estimate(values: &[Complex64], half_width: f64) -> Estimate {
    debug_assert_eq!(values.len(), NODES_PER_PANEL);
    let fc = values[0];
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = WGK[7] * fc.norm();
    for k in 0..7 {
        let (f1, f2) = (values[1 + 2 * k], values[2 + 2 * k]);
        let sum = f1 + f2;
        resk += sum * WGK[k];
        resabs += WGK[k] * (f1.norm() + f2.norm());
        if k % 2 == 1 {
            resg += sum * WG[k / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for k in 0..7 {
        resasc += WGK[k] * ((values[1 + 2 * k] - mean).norm() + (values[2 + 2 * k] - mean).norm());
    }
    let h = libm::fabs(half_width);
    let value = resk * half_width;
    resabs *= h;
    resasc *= h;
    let mut error = ((resk - resg) * half_width).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * libm::pow(200.0 * error / resasc, 1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Estimate { value, error }
}

/// Single 7/15 panel on `[a, b]`.
pub fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Estimate
where
    F: FnMut(f64) -> Complex64,
{
    let nodes = panel_nodes(a, b);
    let mut values = [Complex64::new(0.0, 0.0); NODES_PER_PANEL];
    for (v, &x) in values.iter_mut().zip(nodes.iter()) {
        *v = f(x);
    }
    panel_estimate(&values, 0.5 * (b - a))
}

/// Kronrod-only composite rule for smooth real integrands.
///
/// `[a, b]` is split into equal panels no wider than `max_width`.
pub fn integrate_real_fixed<F>(mut f: F, a: f64, b: f64, max_width: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let n = libm::ceil(libm::fabs(b - a) / max_width).max(1.0) as usize;
    let step = (b - a) / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let lo = a + step * i as f64;
        let hi = if i + 1 == n { b } else { lo + step };
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let mut s = WGK[7] * f(c);
        for k in 0..7 {
            s += WGK[k] * (f(c - h * XGK[k]) + f(c + h * XGK[k]));
        }
        total += s * h;
    }
    total
}

/// Breakpoints of `n_panels` equal panels on `[a, b]`.
pub fn uniform_breaks(a: f64, b: f64, n_panels: usize) -> Vec<f64> {
    let n = n_panels.max(1);
    let step = (b - a) / n as f64;
    let mut breaks: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
    breaks.push(b);
    breaks
}

/// Equal panels on `[a, b]` with the first one split geometrically towards
/// `a`, halving `levels` times.
///
/// Suits integrands whose structure near `a` lives on scales far below one
/// panel width.
pub fn graded_breaks(a: f64, b: f64, n_panels: usize, levels: u32) -> Vec<f64> {
    let uniform = uniform_breaks(a, b, n_panels);
    let w = uniform[1] - a;
    let mut breaks = Vec::with_capacity(uniform.len() + levels as usize);
    breaks.push(a);
    for k in (1..=levels).rev() {
        breaks.push(a + libm::ldexp(w, -(k as i32)));
    }
    breaks.extend_from_slice(&uniform[1..]);
    breaks
}

/// Fixed panels with precomputed nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelLayout {
    nodes: Vec<f64>,
    half_widths: Vec<f64>,
}

impl PanelLayout {
    pub fn uniform(a: f64, b: f64, n_panels: usize) -> Self {
        Self::from_breaks(&uniform_breaks(a, b, n_panels))
    }

    /// Panels between consecutive entries of `breaks`, which must increase.
    pub fn from_breaks(breaks: &[f64]) -> Self {
        let n_panels = breaks.len().saturating_sub(1);
        let mut nodes = Vec::with_capacity(n_panels * NODES_PER_PANEL);
        let mut half_widths = Vec::with_capacity(n_panels);
        for w in breaks.windows(2) {
            debug_assert!(w[1] > w[0]);
            nodes.extend_from_slice(&panel_nodes(w[0], w[1]));
            half_widths.push(0.5 * (w[1] - w[0]));
        }
        PanelLayout { nodes, half_widths }
    }

    /// All node positions, panel by panel.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_panels(&self) -> usize {
        self.half_widths.len()
    }

    /// Integrates from values already sampled at [`PanelLayout::nodes`].
    pub fn integrate_values(&self, values: &[Complex64]) -> Estimate {
        assert_eq!(values.len(), self.nodes.len());
        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        for (chunk, &h) in values.chunks_exact(NODES_PER_PANEL).zip(&self.half_widths) {
            let e = panel_estimate(chunk, h);
            value += e.value;
            error += e.error;
        }
        Estimate { value, error }
    }
}

struct Segment {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.est.error.total_cmp(&other.est.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive 7/15 quadrature.
///
/// Starts from the panels between consecutive `breaks` and bisects the panel
/// with the largest error until the summed error is below `rel_tolerance * |I|` (or
/// `abs_tolerance`). Fails with [`Error::NonConvergence`] once
/// `max_segments` panels are in use without meeting the target.
pub fn integrate_adaptive<F>(
    mut f: F,
    breaks: &[f64],
    rel_tolerance: f64,
    abs_tolerance: f64,
    max_segments: usize,
) -> Result<Estimate>
where
    F: FnMut(f64) -> Complex64,
{
    let n0 = breaks.len().saturating_sub(1);
    let mut heap = BinaryHeap::with_capacity(max_segments.max(n0) + 2);
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let est = gauss_kronrod(&mut f, lo, hi);
        value += est.value;
        error += est.error;
        heap.push(Segment { a: lo, b: hi, est });
    }
    loop {
        let target = abs_tolerance.max(rel_tolerance * value.norm());
        if error <= target {
            break;
        }
        if heap.len() >= max_segments {
            return Err(Error::NonConvergence {
                estimate: error,
                tolerance: target,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // panel is at the resolution limit of f64
            return Err(Error::NonConvergence {
                estimate: error,
                tolerance: target,
            });
        }
        let left = gauss_kronrod(&mut f, worst.a, mid);
        let right = gauss_kronrod(&mut f, mid, worst.b);
        value += left.value + right.value - worst.est.value;
        error += left.error + right.error - worst.est.error;
        heap.push(Segment { a: worst.a, b: mid, est: left });
        heap.push(Segment { a: mid, b: worst.b, est: right });
    }
    // resum to drop drift from the running updates
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for s in heap.iter() {
        value += s.est.value;
        error += s.est.error;
    }
    Ok(Estimate { value, error })
}
