//! Fresnel integrals and the complex-vector type used for steering vectors
//! and codewords.
//!
//! The Fresnel integrals use the normalised convention
//!
//! ```text
//! C(x) = ∫₀ˣ cos(π t² / 2) dt        S(x) = ∫₀ˣ sin(π t² / 2) dt
//! ```
//!
//! Both tend to 1/2 as x → ∞. The other common convention, ∫₀ˣ cos(t²) dt,
//! differs by a √(π/2) rescaling of the argument and is *not* what the
//! closed-form DFT gain expects.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Switch point between the power series and the continued fraction.
const SERIES_LIMIT: f64 = 1.8;
const MAX_ITERATIONS: usize = 500;
const EPSILON: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Values of the Fresnel cosine and sine integrals at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelPair {
    pub c: f64,
    pub s: f64,
}

/// Evaluates `(C(x), S(x))`.
///
/// Power series for `|x| ≤ 1.8`; beyond that the auxiliary functions are
/// obtained from the continued fraction of the complementary error function
/// (modified Lentz). Odd symmetry is applied explicitly, so
/// `fresnel(-x) == -fresnel(x)` bit for bit.
pub fn fresnel(x: f64) -> Result<FresnelPair> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("fresnel argument {x} is not finite")));
    }
    let ax = x.abs();
    let (c, s) = if ax == 0.0 {
        (0.0, 0.0)
    } else if ax <= SERIES_LIMIT {
        fresnel_series(ax)
    } else {
        fresnel_continued_fraction(ax)
    };
    Ok(if x < 0.0 {
        FresnelPair { c: -c, s: -s }
    } else {
        FresnelPair { c, s }
    })
}

/// `C = x Σ_{k even} (-1)^{k/2} t^k / (k! (2k+1))`, `S` the same over odd k,
/// with `t = π x² / 2`.
fn fresnel_series(x: f64) -> (f64, f64) {
    let t = FRAC_PI_2 * x * x;
    let mut term = 1.0; // t^k / k!
    let mut c = 1.0;
    let mut s = 0.0;
    for k in 1..MAX_ITERATIONS {
        term *= t / k as f64;
        let contribution = term / (2 * k + 1) as f64;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            c += sign * contribution;
        } else {
            s += sign * contribution;
        }
        if contribution < EPSILON * (c.abs() + s.abs()) {
            break;
        }
    }
    (x * c, x * s)
}

fn fresnel_continued_fraction(x: f64) -> (f64, f64) {
    let one = Complex64::new(1.0, 0.0);
    let pix2 = PI * x * x;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / TINY, 0.0);
    let mut d = one / b;
    let mut h = d;
    let mut n = -1.0;
    for _ in 2..MAX_ITERATIONS {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += Complex64::new(4.0, 0.0);
        d = one / (d * a + b);
        cc = b + a / cc;
        let delta = cc * d;
        h *= delta;
        if (delta.re - 1.0).abs() + delta.im.abs() < EPSILON {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    let phase = Complex64::new((0.5 * pix2).cos(), (0.5 * pix2).sin());
    let cs = Complex64::new(0.5, 0.5) * (one - phase * h);
    (cs.re, cs.im)
}

/// Ordered sequence of complex amplitudes: a steering vector, a codeword or
/// a channel realisation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(elements: Vec<Complex64>) -> Self {
        ComplexVector(elements)
    }

    pub fn zeros(len: usize) -> Self {
        ComplexVector(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-12
    }

    /// Unit-norm copy. A zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let norm = self.norm();
        if norm == 0.0 {
            return self.clone();
        }
        self.scaled(Complex64::new(1.0 / norm, 0.0))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        ComplexVector(self.0.iter().map(|z| z * factor).collect())
    }

    /// Elementwise product.
    pub fn hadamard(&self, other: &ComplexVector) -> Self {
        assert_eq!(self.len(), other.len(), "hadamard: length mismatch");
        ComplexVector(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, index: usize) -> &Complex64 {
        &self.0[index]
    }
}

impl FromIterator<Complex64> for ComplexVector {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        ComplexVector(iter.into_iter().collect())
    }
}

/// `uᴴ v`, conjugate-linear in `u`.
///
/// # Panics
///
/// Panics when the lengths differ.
pub fn inner_product(u: &ComplexVector, v: &ComplexVector) -> Complex64 {
    assert_eq!(
        u.len(),
        v.len(),
        "inner_product: length mismatch ({} vs {})",
        u.len(),
        v.len()
    );
    u.0.iter().zip(&v.0).map(|(a, b)| a.conj() * b).sum()
}
