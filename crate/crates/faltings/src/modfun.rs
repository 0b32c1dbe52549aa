//! Modular discriminant Δ(τ), the j-invariant, reduction to the traditional
//! fundamental domain, and the inverse of j on the real-j locus.
//!
//! Normalization: Δ(τ) = (2π)¹² q ∏(1−qⁿ)²⁴ with q = e^{2πiτ}.  All log-space
//! accessors are additive so that nothing underflows for large Im τ.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A point τ = re + i·im in the upper half-plane (im > 0).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HalfPlanePoint {
    pub re: f64,
    pub im: f64,
}

impl HalfPlanePoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Domain(format!("non-finite τ = {re} + {im}i")));
        }
        if im <= 0.0 {
            return Err(Error::Domain(format!("Im τ = {im} must be positive")));
        }
        Ok(HalfPlanePoint { re, im })
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// The nome q = e^{2πiτ}; |q| = e^{−2π·Im τ} < 1.
    pub fn nome(self) -> Complex64 {
        Complex64::from_polar((-2.0 * PI * self.im).exp(), 2.0 * PI * self.re)
    }

    /// Membership in the traditional fundamental domain
    /// (−1/2 < Re ≤ 1/2, |τ| ≥ 1, and Re ≥ 0 on the unit circle), with float slack.
    pub fn is_reduced(self) -> bool {
        let n2 = self.re * self.re + self.im * self.im;
        self.re > -0.5 - 1e-12
            && self.re <= 0.5 + 1e-12
            && n2 >= 1.0 - 1e-12
            && (n2 > 1.0 + 1e-12 || self.re >= -1e-12)
    }
}

/// An integer matrix (a b; c d) with det = 1, acting by τ ↦ (aτ+b)/(cτ+d).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct UnimodularMap {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl UnimodularMap {
    pub const IDENTITY: UnimodularMap = UnimodularMap { a: 1, b: 0, c: 0, d: 1 };

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// self ∘ rhs (rhs acts first); entries checked for i64 overflow.
    pub fn compose(&self, rhs: &UnimodularMap) -> Result<UnimodularMap> {
        let mul_add = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            x.checked_mul(y)
                .and_then(|p| z.checked_mul(w).and_then(|q| p.checked_add(q)))
                .ok_or_else(|| Error::Numeric("unimodular-map entry overflow".into()))
        };
        Ok(UnimodularMap {
            a: mul_add(self.a, rhs.a, self.b, rhs.c)?,
            b: mul_add(self.a, rhs.b, self.b, rhs.d)?,
            c: mul_add(self.c, rhs.a, self.d, rhs.c)?,
            d: mul_add(self.c, rhs.b, self.d, rhs.d)?,
        })
    }

    pub fn apply(&self, tau: HalfPlanePoint) -> Result<HalfPlanePoint> {
        let t = tau.to_complex();
        let den = Complex64::new(self.c as f64, 0.0) * t + self.d as f64;
        let out = (Complex64::new(self.a as f64, 0.0) * t + self.b as f64) / den;
        HalfPlanePoint::new(out.re, out.im)
    }
}

/// Reduce τ to the fundamental domain: T-translations bring Re into
/// (−1/2, 1/2], then S when |τ| < 1, looping; on |τ| = 1 with Re < 0 a single
/// S lands on the Re ≥ 0 half.  Returns the reduced point and the map M with
/// M·τ = τ′.
pub fn reduce_to_fundamental_domain(
    tau: HalfPlanePoint,
) -> Result<(HalfPlanePoint, UnimodularMap)> {
    let (mut re, mut im) = (tau.re, tau.im);
    let mut map = UnimodularMap::IDENTITY;
    for _ in 0..20_000 {
        let k = (re - 0.5).ceil();
        if k != 0.0 {
            if k.abs() > 9.0e18 {
                return Err(Error::Numeric("translation count exceeds i64".into()));
            }
            re -= k;
            map = UnimodularMap { a: 1, b: -(k as i64), c: 0, d: 1 }.compose(&map)?;
        }
        let n2 = re * re + im * im;
        if n2 < 1.0 - 1e-15 || (n2 <= 1.0 + 1e-15 && re < -1e-15) {
            re = -re / n2;
            im /= n2;
            map = UnimodularMap { a: 0, b: -1, c: 1, d: 0 }.compose(&map)?;
        } else {
            return Ok((HalfPlanePoint { re, im }, map));
        }
    }
    Err(Error::Numeric("fundamental-domain reduction did not terminate".into()))
}

// Euler's pentagonal series for φ(q) = ∏(1−qⁿ): exponents k(3k∓1)/2 with sign
// (−1)^k.  The last kept exponent is 77; at |q| ≤ 0.3 the first dropped term
// is |q|^92 ≈ 1e−49, far below f64 resolution.
const PENTAGONAL: [(i32, f64); 14] = [
    (1, -1.0),
    (2, -1.0),
    (5, 1.0),
    (7, 1.0),
    (12, -1.0),
    (15, -1.0),
    (22, 1.0),
    (26, 1.0),
    (35, -1.0),
    (40, -1.0),
    (51, 1.0),
    (57, 1.0),
    (70, -1.0),
    (77, -1.0),
];

const SIGMA3: [f64; 12] =
    [1.0, 9.0, 28.0, 73.0, 126.0, 252.0, 344.0, 585.0, 757.0, 1134.0, 1332.0, 2044.0];
#[cfg(test)]
const SIGMA5: [f64; 12] = [
    1.0, 33.0, 244.0, 1057.0, 3126.0, 8052.0, 16808.0, 33825.0, 59293.0, 103158.0, 161052.0,
    257908.0,
];

fn euler_phi(q: Complex64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for &(g, s) in PENTAGONAL.iter() {
        let term = q.powi(g) * s;
        acc += term;
        if term.norm() < 1e-20 * acc.norm() {
            break;
        }
    }
    acc
}

fn euler_phi_real(q: f64) -> f64 {
    let mut acc = 1.0;
    for &(g, s) in PENTAGONAL.iter() {
        let term = q.powi(g) * s;
        acc += term;
        if term.abs() < 1e-20 * acc.abs() {
            break;
        }
    }
    acc
}

fn eisenstein4(q: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for &s in SIGMA3.iter() {
        qn *= q;
        let term = qn * s;
        acc += term;
        if term.norm() < 1e-20 {
            break;
        }
    }
    1.0 + 240.0 * acc
}

fn eisenstein4_real(q: f64) -> f64 {
    let mut acc = 0.0;
    let mut qn = 1.0;
    for &s in SIGMA3.iter() {
        qn *= q;
        let term = qn * s;
        acc += term;
        if term.abs() < 1e-20 {
            break;
        }
    }
    1.0 + 240.0 * acc
}

#[cfg(test)]
fn eisenstein6(q: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for &s in SIGMA5.iter() {
        qn *= q;
        let term = qn * s;
        acc += term;
        if term.norm() < 1e-20 {
            break;
        }
    }
    1.0 - 504.0 * acc
}

fn two_pi_pow12() -> f64 {
    (2.0 * PI).powi(12)
}

/// Δ(τ) = (2π)¹² q ∏(1−qⁿ)²⁴.  Direct q-series for |q| ≤ 0.3; otherwise the
/// point is reduced and the value pulled back through the weight-12 cocycle
/// Δ(τ) = Δ(Mτ)·(cτ+d)^{−12}.
pub fn delta(tau: HalfPlanePoint) -> Result<Complex64> {
    let q = tau.nome();
    if q.norm() <= 0.3 {
        Ok(two_pi_pow12() * q * euler_phi(q).powi(24))
    } else {
        let (red, map) = reduce_to_fundamental_domain(tau)?;
        let den = Complex64::new(map.c as f64, 0.0) * tau.to_complex() + map.d as f64;
        Ok(delta(red)? * den.powi(-12))
    }
}

/// log|Δ(τ)| computed additively: 12·log 2π − 2π·Im τ′ + 24·log|φ(q′)|
/// − 12·log|cτ+d|, which stays finite where delta() itself would underflow.
pub fn log_abs_delta(tau: HalfPlanePoint) -> Result<f64> {
    let (red, map) = reduce_to_fundamental_domain(tau)?;
    let den = Complex64::new(map.c as f64, 0.0) * tau.to_complex() + map.d as f64;
    Ok(log_abs_delta_reduced(red) - 12.0 * den.norm().ln())
}

fn log_abs_delta_reduced(red: HalfPlanePoint) -> f64 {
    let q = red.nome();
    12.0 * (2.0 * PI).ln() - 2.0 * PI * red.im + 24.0 * euler_phi(q).norm().ln()
}

/// The absolute modular invariant, normalized so j(i) = 1728, j(e^{iπ/3}) = 0.
/// Evaluated as E₄³/Δ̃ with Δ̃ = q·φ(q)²⁴ (the exact identity
/// E₄³ − E₆² = 1728·Δ̃ with the denominator in product form, which stays
/// stable where the difference of the two Eisenstein cubes loses digits).
/// Always evaluated at the reduced representative.
pub fn j(tau: HalfPlanePoint) -> Result<Complex64> {
    let (red, _) = reduce_to_fundamental_domain(tau)?;
    let q = red.nome();
    let dtil = q * euler_phi(q).powi(24);
    Ok(eisenstein4(q).powi(3) / dtil)
}

/// ln(|Δ(τ)|·(Im τ)⁶) — an SL₂(ℤ)-invariant, evaluated at the reduced point.
pub fn log_g(tau: HalfPlanePoint) -> Result<f64> {
    let (red, _) = reduce_to_fundamental_domain(tau)?;
    Ok(log_abs_delta_reduced(red) + 6.0 * red.im.ln())
}

fn j_real_pos_axis(u: f64) -> f64 {
    // j at τ = iY with u = ln q (q = e^{−2πY} > 0).
    let q = u.exp();
    let e4 = eisenstein4_real(q);
    e4 * e4 * e4 / (q * euler_phi_real(q).powi(24))
}

fn j_real_neg_axis(u: f64) -> f64 {
    // j at τ = 1/2 + iY with u = ln|q| (q = −e^{−2πY} < 0).
    let q = -u.exp();
    let e4 = eisenstein4_real(q);
    e4 * e4 * e4 / (q * euler_phi_real(q).powi(24))
}

fn j_real_arc(theta: f64) -> f64 {
    // j at τ = e^{iθ}, θ ∈ [π/3, π/2]; real-valued on the arc.
    let tau = HalfPlanePoint { re: theta.cos(), im: theta.sin() };
    let q = tau.nome();
    let e4 = eisenstein4(q);
    (e4.powi(3) / (q * euler_phi(q).powi(24))).re
}

fn secant_on_log_j(target: f64, neg_axis: bool) -> Result<f64> {
    // Solve ln|j(e^u)| = ln|target| for u = ln|q|, starting from the
    // leading-order inverse q ≈ 1/(j − 744).
    let goal = target.abs().ln();
    let f = |u: f64| {
        let jv = if neg_axis { -j_real_neg_axis(u) } else { j_real_pos_axis(u) };
        jv.ln() - goal
    };
    let mut u0 = -(target.abs() + 744.0).ln();
    if !neg_axis {
        u0 = -(target - 744.0).ln();
    }
    let mut u1 = u0 - 1e-4;
    let mut f0 = f(u0);
    let mut f1 = f(u1);
    for _ in 0..80 {
        if (f1 - f0).abs() < 1e-300 {
            break;
        }
        let u2 = u1 - f1 * (u1 - u0) / (f1 - f0);
        if !u2.is_finite() {
            break;
        }
        if (u2 - u1).abs() < 1e-14 * (1.0 + u1.abs()) {
            return Ok(u2);
        }
        u0 = u1;
        f0 = f1;
        u1 = u2;
        f1 = f(u1);
    }
    if f1.abs() < 1e-9 {
        return Ok(u1);
    }
    Err(Error::Numeric(format!("inverse-j secant stalled at j = {target}")))
}

fn bisect(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    // f(lo) ≤ 0 ≤ f(hi) by construction at the call sites.
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * (1.0 + lo.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Inverse of j on the real-j locus of the fundamental domain:
/// j ≥ 1728 ↦ τ = iY (Y ≥ 1); j ≤ 0 ↦ τ = 1/2 + iY (Y ≥ √3/2);
/// 0 < j < 1728 ↦ τ = e^{iθ} on the unit arc.
pub fn tau_from_real_j(jv: f64) -> Result<HalfPlanePoint> {
    if !jv.is_finite() {
        return Err(Error::Domain(format!("j = {jv} is not finite")));
    }
    if jv >= 1728.0 {
        let u = if jv >= 3500.0 {
            secant_on_log_j(jv, false)?
        } else {
            // j(iY) is increasing in Y; j(1.3i) ≈ 4288 > 3500 covers the gap.
            let y = bisect(1.0, 1.3, |y| j_real_pos_axis(-2.0 * PI * y) - jv);
            -2.0 * PI * y
        };
        HalfPlanePoint::new(0.0, -u / (2.0 * PI))
    } else if jv <= 0.0 {
        let u = if jv <= -3500.0 {
            secant_on_log_j(jv, true)?
        } else {
            // j(1/2 + iY) decreases from 0 at Y = √3/2; j at Y = 1.35 ≈ −4088.
            let y = bisect(3f64.sqrt() / 2.0, 1.35, |y| jv - j_real_neg_axis(-2.0 * PI * y));
            -2.0 * PI * y
        };
        HalfPlanePoint::new(0.5, -u / (2.0 * PI))
    } else {
        // j increases from 0 to 1728 as θ runs from π/3 to π/2.
        let theta = bisect(PI / 3.0, PI / 2.0, |th| j_real_arc(th) - jv);
        HalfPlanePoint::new(theta.cos(), theta.sin())
    }
}

/// ln G(j) = ln(|Δ(τ)|·(Im τ)⁶) at the inverse-j point of a real j — the hot
/// path for region membership, with no period computation.
pub fn log_g_of_real_j(jv: f64) -> Result<f64> {
    let tau = tau_from_real_j(jv)?;
    Ok(log_abs_delta_reduced(tau) + 6.0 * tau.im.ln())
}
