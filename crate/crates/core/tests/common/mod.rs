//! Reference computations kept independent of the library code paths.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

pub const C0: f64 = 299_792_458.0;
pub const SQRT3_2: f64 = 0.866_025_403_784_438_6;

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    // split into panels so the first Simpson estimate cannot alias an oscillation
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + k as f64 * h;
            let hi = lo + h;
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            step(
                f,
                lo,
                hi,
                fa,
                fm,
                fb,
                h / 6.0 * (fa + 4.0 * fm + fb),
                tol / panels as f64,
                40,
            )
        })
        .sum()
}

/// `(C(x), S(x))` by quadrature of the defining integrals.
pub fn fresnel_by_quadrature(x: f64) -> (f64, f64) {
    let c = adaptive_simpson(&|t| (FRAC_PI_2 * t * t).cos(), 0.0, x, 1e-13);
    let s = adaptive_simpson(&|t| (FRAC_PI_2 * t * t).sin(), 0.0, x, 1e-13);
    (c, s)
}

/// Continuous-aperture gain `|(1/N) ∫_{-N/2}^{N/2} e^{-jπ(A₁n - A₂)²} dn|²`.
pub fn riemann_gain(n: f64, a1: f64, a2: f64) -> f64 {
    let phase = |x: f64| PI * (a1 * x - a2).powi(2);
    let re = adaptive_simpson(&|x| phase(x).cos(), -n / 2.0, n / 2.0, 1e-11);
    let im = adaptive_simpson(&|x| -phase(x).sin(), -n / 2.0, n / 2.0, 1e-11);
    (re * re + im * im) / (n * n)
}

/// Half-wavelength ULA constants at carrier `f` with `n` elements:
/// `(λ, d, D, R_d)`.
pub fn ula(f: f64, n: usize) -> (f64, f64, f64, f64) {
    let lambda = C0 / f;
    let d = lambda / 2.0;
    let aperture = n as f64 * d;
    (lambda, d, aperture, 2.0 * aperture * aperture / lambda)
}

/// Range samples from `2D` advancing by the 3 dB beamdepth while inside
/// `R_d cos²θ / 10`.
pub fn beamdepth_ranges(f: f64, n: usize, theta: f64) -> Vec<f64> {
    let (_, _, aperture, rd) = ula(f, n);
    let rc = rd * theta.cos().powi(2);
    let ebrd = rc / 10.0;
    let mut r = 2.0 * aperture;
    let mut out = Vec::new();
    while r <= ebrd {
        out.push(r);
        let denominator = rc - 10.0 * r;
        if denominator <= 0.0 {
            break;
        }
        r += r * rc / denominator - r * rc / (rc + 10.0 * r);
    }
    out
}

/// `|Σₙ e^{-jk(rₙ - r)} e^{-jkdn sinθ_b}|² / N²` with element offsets taken
/// from the array centre.
pub fn direct_gain(f: f64, n: usize, theta_u: f64, r: f64, sin_beam: f64) -> f64 {
    let (lambda, d, _, _) = ula(f, n);
    let k = 2.0 * PI / lambda;
    let centre = (n as f64 - 1.0) / 2.0;
    let (mut re, mut im) = (0.0, 0.0);
    for i in 0..n {
        let delta = (i as f64 - centre) * d;
        let rn = (r * r + delta * delta - 2.0 * r * delta * theta_u.sin()).sqrt();
        let phase = -k * (rn - r) - k * d * i as f64 * sin_beam;
        re += phase.cos();
        im += phase.sin();
    }
    (re * re + im * im) / (n * n) as f64
}

/// Prints one verdict line and returns whether it passed.
pub fn verdict(criterion: u32, name: &str, pass: bool, detail: &str) -> bool {
    println!(
        "{} criterion {criterion} ({name}): {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}
