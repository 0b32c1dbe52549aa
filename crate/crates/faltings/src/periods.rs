//! Period lattices of y² = x³ + Ax + B over ℝ via the (complex) AGM, and the
//! induced point τ = ω₂/ω₁ in the upper half-plane.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::modfun::HalfPlanePoint;

/// A short Weierstrass curve y² = x³ + ax + b with cached invariants.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Curve {
    pub a: f64,
    pub b: f64,
    /// Discriminant −16(4a³ + 27b²).
    pub disc: f64,
    /// j-invariant 6912a³/(4a³ + 27b²); satisfies jinv·disc = −1728(4a)³.
    pub jinv: f64,
}

impl Curve {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("non-finite coefficients ({a}, {b})")));
        }
        let dtil = 4.0 * a * a * a + 27.0 * b * b;
        if dtil == 0.0 {
            return Err(Error::Singular(format!("4·{a}³ + 27·{b}² = 0")));
        }
        Ok(Curve { a, b, disc: -16.0 * dtil, jinv: 6912.0 * a * a * a / dtil })
    }
}

/// Generators ω₁ (real), ω₂ of the period lattice, with ratio = ω₂/ω₁ in the
/// upper half-plane.
#[derive(Debug, Clone, Copy)]
pub struct PeriodPair {
    pub omega1: f64,
    pub omega2: Complex64,
    pub ratio: HalfPlanePoint,
}

fn real_agm(mut x: f64, mut y: f64) -> Result<f64> {
    if !(x > 0.0) || !(y > 0.0) {
        return Err(Error::Numeric(format!("agm of non-positive pair ({x}, {y})")));
    }
    for _ in 0..64 {
        if (x - y).abs() <= 1e-15 * (x + y) {
            return Ok(0.5 * (x + y));
        }
        let m = 0.5 * (x + y);
        y = (x * y).sqrt();
        x = m;
    }
    Err(Error::Numeric("real AGM did not converge".into()))
}

/// AGM with the optimal square-root branch: at each step the geometric mean's
/// sign is chosen so that |a − b| ≤ |a + b|, which keeps the iteration on the
/// principal (convergent) chain.
fn complex_agm(mut x: Complex64, mut y: Complex64) -> Result<Complex64> {
    if x.norm() == 0.0 || y.norm() == 0.0 {
        return Err(Error::Numeric("complex AGM of a zero operand".into()));
    }
    for _ in 0..64 {
        if (x - y).norm() <= 1e-15 * (x.norm() + y.norm()) {
            return Ok(0.5 * (x + y));
        }
        let m = 0.5 * (x + y);
        let mut g = (x * y).sqrt();
        if (m - g).norm() > (m + g).norm() {
            g = -g;
        }
        x = m;
        y = g;
    }
    Err(Error::Numeric("complex AGM did not converge".into()))
}

/// Period lattice of the curve.  disc > 0: three real roots, two real AGMs.
/// disc < 0: one real root e₁ by Cardano (+2 Newton polish steps); the
/// conjugate-pair AGM for ω₁ collapses after one step to a real AGM, ω₂ needs
/// the complex AGM.
pub fn period_lattice(curve: &Curve) -> Result<PeriodPair> {
    let (a, b) = (curve.a, curve.b);
    if curve.disc > 0.0 {
        // x³ + ax + b with a < 0; roots 2√(−a/3)·cos(φ − 2πk/3).
        let m = 2.0 * (-a / 3.0).sqrt();
        let cos3phi = (-4.0 * b / (m * m * m)).clamp(-1.0, 1.0);
        let phi = cos3phi.acos() / 3.0;
        let mut e = [
            m * phi.cos(),
            m * (phi - 2.0 * PI / 3.0).cos(),
            m * (phi + 2.0 * PI / 3.0).cos(),
        ];
        e.sort_by(|p, q| q.partial_cmp(p).unwrap());
        let (e1, e2, e3) = (e[0], e[1], e[2]);
        let omega1 = PI / real_agm((e1 - e3).sqrt(), (e1 - e2).sqrt())?;
        let im = PI / real_agm((e1 - e3).sqrt(), (e2 - e3).sqrt())?;
        let ratio = HalfPlanePoint::new(0.0, im / omega1)?;
        Ok(PeriodPair { omega1, omega2: Complex64::new(0.0, im), ratio })
    } else {
        // Cardano for the single real root, taking the larger cube to avoid
        // cancellation, then Newton.
        let s = (b * b / 4.0 + a * a * a / 27.0).sqrt();
        let (c1, c2) = (-b / 2.0 + s, -b / 2.0 - s);
        let u = if c1.abs() >= c2.abs() { c1.cbrt() } else { c2.cbrt() };
        let mut e1 = if u == 0.0 { 0.0 } else { u - a / (3.0 * u) };
        for _ in 0..2 {
            let f = e1 * e1 * e1 + a * e1 + b;
            let fp = 3.0 * e1 * e1 + a;
            if fp != 0.0 {
                e1 -= f / fp;
            }
        }
        // Conjugate pair e₂, e₃ = (−e₁ ± iβ)/2 with β = √(3e₁² + 4a);
        // μ = |e₁ − e₂| = √(3e₁² + a).
        let beta = (3.0 * e1 * e1 + 4.0 * a).sqrt();
        let mu = (3.0 * e1 * e1 + a).sqrt();
        let omega1 = PI / real_agm((2.0 * mu + 3.0 * e1).sqrt() / 2.0, mu.sqrt())?;
        let ib = Complex64::new(0.0, beta);
        let agm2 = complex_agm(
            ((Complex64::new(3.0 * e1, 0.0) + ib) / 2.0).sqrt(),
            ib.sqrt(),
        )?;
        let mut omega2 = Complex64::i() * PI / agm2;
        let mut ratio = omega2 / omega1;
        if ratio.im < 0.0 {
            omega2 = -omega2;
            ratio = -ratio;
        }
        // ω₂ is a generator only modulo ω₁; fold its real part near a half-integer.
        Ok(PeriodPair { omega1, omega2, ratio: HalfPlanePoint::new(ratio.re, ratio.im)? })
    }
}

/// τ = ω₂/ω₁ for the curve (up to SL₂(ℤ); callers reduce as needed).
pub fn tau_of_curve(curve: &Curve) -> Result<HalfPlanePoint> {
    Ok(period_lattice(curve)?.ratio)
}

/// τ along the pencil y² = x³ + tx + t, which sweeps every real j:
/// j(t) = 6912t/(4t + 27).  At t = 0 the curve degenerates but the pencil's
/// j → 0, realized by (A, B) = (0, 1); t = −27/4 is genuinely singular.
pub fn tau_of_t(t: f64) -> Result<HalfPlanePoint> {
    if t == 0.0 {
        return tau_of_curve(&Curve::new(0.0, 1.0)?);
    }
    tau_of_curve(&Curve::new(t, t)?)
}
