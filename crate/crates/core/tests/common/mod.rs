//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls into the solver paths it checks.
#![allow(dead_code)]

use std::f64::consts::PI;

use eddyeq_core::model::{CoilPair, MU0};
use eddyeq_core::Complex64;

/// `J1` by its power series. Good to ~1e-15 for `x <= 8`.
pub fn j1_series(x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h;
    let mut sum = term;
    for k in 1..200 {
        term *= -h * h / (k as f64 * (k + 1) as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `J1` by Miller's backward recurrence, normalized with
/// `J0 + 2 * sum J_2k = 1`. Valid for any `x > 0`.
pub fn j1_miller(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut n = (x + 30.0 + (50.0 * x).sqrt()) as usize;
    n += n % 2;
    let (mut jp1, mut j) = (0.0f64, 1e-300f64);
    let mut j1 = 0.0;
    let mut norm = 0.0;
    for m in (1..=n).rev() {
        let jm1 = 2.0 * m as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        // j now holds J_{m-1}
        if m - 1 == 1 {
            j1 = j;
        }
        if (m - 1) % 2 == 0 && m - 1 > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            j1 *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += j;
    j1 / norm
}

/// Root of `f` on `[lo, hi]` by bisection; needs a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `integral_{a r1}^{a r2} x J1(x) dx` by the composite trapezoid rule.
pub fn radial_trapezoid(alpha: f64, r1: f64, r2: f64, panels: usize, j1: impl Fn(f64) -> f64) -> f64 {
    let (a, b) = (alpha * r1, alpha * r2);
    let h = (b - a) / panels as f64;
    let mut s = 0.5 * (a * j1(a) + b * j1(b));
    for i in 1..panels {
        let x = a + h * i as f64;
        s += x * j1(x);
    }
    s * h
}

/// Generalized reflection of an air / plate / air stack by summing the
/// internal bounces one at a time.
pub fn reflection_by_bounces(alpha: f64, omega: f64, sigma: f64, thickness: f64) -> Complex64 {
    let k1 = Complex64::new(alpha, 0.0);
    let k2 = Complex64::new(alpha * alpha, omega * sigma * MU0).sqrt();
    let r12 = (k1 - k2) / (k1 + k2);
    let t12 = 2.0 * k1 / (k1 + k2);
    let r21 = (k2 - k1) / (k2 + k1);
    let t21 = 2.0 * k2 / (k2 + k1);
    let r23 = r21;
    let x = (-2.0 * k2 * thickness).exp();
    let mut sum = r12;
    let mut term = t12 * r23 * t21 * x;
    let ratio = r21 * r23 * x;
    for _ in 0..1_000_000 {
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
        term *= ratio;
    }
    sum
}

/// Complete elliptic integrals `K(k)` and `E(k)` by the AGM.
pub fn elliptic_ke(k: f64) -> (f64, f64) {
    let mut a = 1.0;
    let mut b = (1.0 - k * k).sqrt();
    let mut c = k;
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    for _ in 0..60 {
        if c.abs() < 1e-17 {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        a = an;
        b = bn;
        pow *= 2.0;
        sum += pow * c * c;
    }
    let kk = PI / (2.0 * a);
    (kk, kk * (1.0 - sum))
}

/// Mutual inductance of two coaxial circular filaments.
pub fn loop_mutual(ra: f64, rb: f64, dz: f64) -> f64 {
    let k2 = 4.0 * ra * rb / ((ra + rb) * (ra + rb) + dz * dz);
    let k = k2.sqrt();
    let (kk, ee) = elliptic_ke(k);
    MU0 * (ra * rb).sqrt() * ((2.0 / k - k) * kk - 2.0 / k * ee)
}

/// Free-space mutual inductance of the coil pair from a grid of filaments
/// at the centres of `nr x nz` cells of each winding cross-section.
pub fn neumann_air(coil: &CoilPair, nr: usize, nz: usize) -> f64 {
    let (t1, _) = coil.tx_span();
    let (r1, _) = coil.rx_span();
    let dr = (coil.outer_radius - coil.inner_radius) / nr as f64;
    let dz = coil.coil_height / nz as f64;
    let radii: Vec<f64> = (0..nr).map(|i| coil.inner_radius + (i as f64 + 0.5) * dr).collect();
    let heights: Vec<f64> = (0..nz).map(|i| (i as f64 + 0.5) * dz).collect();
    let mut m = 0.0;
    for &ra in &radii {
        for &rb in &radii {
            for &za in &heights {
                for &zb in &heights {
                    m += loop_mutual(ra, rb, (r1 + zb) - (t1 + za));
                }
            }
        }
    }
    let cells = (nr * nz) as f64;
    m * f64::from(coil.turns_tx) * f64::from(coil.turns_rx) / (cells * cells)
}

/// Log-spaced grid including both ends.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Prints one acceptance line and returns whether it passed.
pub fn report(id: &str, pass: bool, detail: &str) -> bool {
    println!("{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}
