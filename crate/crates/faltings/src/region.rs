//! The height-bounded region R_X = {(A, B) ∈ ℝ² : 16·|4A³ + 27B²| < X·G(j)}
//! with j = j(A, B) = 6912A³/(4A³ + 27B²): membership, the area constant
//!
//! ```text
//! σ = Area(R₁) = (2/5)·∫ f(t)^{5/3}·|t|^{−2/3} dt,
//! f(t) = √(G(j(t)) / (64·|t + 27/4|)),   j(t) = 6912t/(4t + 27),
//! ```
//!
//! and boundary probes.  The region has a cusp along the vanishing line
//! 4A³ + 27B² = 0; for large |B| the region degenerates to a thin tongue
//! around A = −c·B^{2/3}, c = (27/4)^{1/3}, which the exact cusp coordinates
//! (B, ε) with A = −c·|B|^{2/3} + ε·X·|B|^{−4/3} parametrize without
//! catastrophic cancellation:
//!
//! ```text
//! 4A³ + 27B² = 4εX·(3c² − 3c·εXB⁻² + (εXB⁻²)²)        (exact).
//! ```

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modfun;
use crate::quad;

/// Numerical constants of the region geometry.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct RegionConstants {
    /// C = sup G = G at the corner j = 0.
    pub sup_g: f64,
    /// c = (27/4)^{1/3}, the cusp-line coefficient.
    pub cusp_coeff: f64,
    /// Positive root of 64x(3c² + x²) = 3/4, the tongue half-width scale at
    /// the body/tongue threshold.
    pub eps0: f64,
    /// Δ(i) = G(1728), the value controlling the B = 0 crossings.
    pub delta_i: f64,
}

fn sup_log_g() -> f64 {
    // Two-phase grid maximization of the invariant ln G over the strip; the
    // evaluation reduces internally, so points below the domain are harmless.
    let eval = |re: f64, im: f64| {
        modfun::log_g(modfun::HalfPlanePoint::new(re, im).expect("im > 0")).expect("finite")
    };
    let mut best = (f64::MIN, 0.0, 0.0);
    for i in 0..=60 {
        let re = -0.5 + i as f64 / 60.0;
        for k in 0..=80 {
            let im = 0.85 + 3.15 * k as f64 / 80.0;
            let g = eval(re, im);
            if g > best.0 {
                best = (g, re, im);
            }
        }
    }
    let mut w = 0.05;
    for _ in 0..5 {
        let (_, cre, cim) = best;
        for i in 0..=40 {
            let re = cre - w + 2.0 * w * i as f64 / 40.0;
            for k in 0..=40 {
                let im = (cim - w + 2.0 * w * k as f64 / 40.0).max(0.6);
                let g = eval(re, im);
                if g > best.0 {
                    best = (g, re, im);
                }
            }
        }
        w /= 10.0;
    }
    best.0
}

fn eps0_root(c: f64) -> f64 {
    let f = |x: f64| 64.0 * x * (3.0 * c * c + x * x) - 0.75;
    let (mut lo, mut hi) = (0.0f64, 0.01f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..4 {
        x -= f(x) / (192.0 * c * c + 192.0 * x * x);
    }
    x
}

static CONSTANTS: OnceLock<RegionConstants> = OnceLock::new();

pub fn bound_constants() -> &'static RegionConstants {
    CONSTANTS.get_or_init(|| {
        let c = (27.0 / 4.0f64).cbrt();
        RegionConstants {
            sup_g: sup_log_g().exp(),
            cusp_coeff: c,
            eps0: eps0_root(c),
            delta_i: modfun::log_g_of_real_j(1728.0).expect("j = 1728").exp(),
        }
    })
}

/// The region at a fixed height bound X > 0.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct RegionSpec {
    pub x: f64,
}

impl RegionSpec {
    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::Domain(format!("height bound X = {x} must be positive")));
        }
        Ok(RegionSpec { x })
    }

    /// ln(16|4a³ + 27b²|) − ln X − ln G(j): negative inside, positive outside.
    /// −∞ when j overflows (arbitrarily close to the vanishing line, which is
    /// always interior).  Singular error exactly on the line.
    pub fn margin(&self, a: f64, b: f64) -> Result<f64> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("non-finite point ({a}, {b})")));
        }
        let a3 = a * a * a;
        let dtil = 4.0 * a3 + 27.0 * b * b;
        if dtil == 0.0 {
            return Err(Error::Singular(format!("({a}, {b}) is on the vanishing line")));
        }
        if !dtil.is_finite() {
            return Ok(f64::INFINITY);
        }
        let j = 6912.0 * a3 / dtil;
        if !j.is_finite() {
            return Ok(f64::NEG_INFINITY);
        }
        Ok((16.0 * dtil.abs()).ln() - self.x.ln() - modfun::log_g_of_real_j(j)?)
    }

    /// Strict membership; total (singular points and bad input are outside).
    pub fn contains(&self, a: f64, b: f64) -> bool {
        matches!(self.margin(a, b), Ok(m) if m < 0.0)
    }

    /// F(A, B) = 16|4A³ + 27B²| − X·G(j): the defining function whose zero
    /// set is the boundary.
    pub fn f_value(&self, a: f64, b: f64) -> Result<f64> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("non-finite point ({a}, {b})")));
        }
        let a3 = a * a * a;
        let dtil = 4.0 * a3 + 27.0 * b * b;
        if dtil == 0.0 {
            return Err(Error::Singular(format!("({a}, {b}) is on the vanishing line")));
        }
        let j = 6912.0 * a3 / dtil;
        let g = if j.is_finite() { modfun::log_g_of_real_j(j)?.exp() } else { 0.0 };
        Ok(16.0 * dtil.abs() - self.x * g)
    }

    /// |B| extent of the body: the region lies inside |B| ≤ √(XC/432) except
    /// for the cusp tongue.
    pub fn body_extent(&self) -> f64 {
        (self.x * bound_constants().sup_g / 432.0).sqrt()
    }

    /// The boundary's B = 0 crossings sit at |A| = (X·Δ(i)/64)^{1/3}.
    pub fn axis_crossing(&self) -> f64 {
        (self.x * bound_constants().delta_i / 64.0).cbrt()
    }
}

/// Convenience strict-membership test.
pub fn in_region(a: f64, b: f64, x: f64) -> bool {
    RegionSpec::new(x).map(|r| r.contains(a, b)).unwrap_or(false)
}

/// f(A, B) = √(G/(16|4A³ + 27B²|)); membership in R_X is f⁻² < X.
pub fn f_of_point(a: f64, b: f64) -> Result<f64> {
    let a3 = a * a * a;
    let dtil = 4.0 * a3 + 27.0 * b * b;
    if dtil == 0.0 {
        return Err(Error::Singular(format!("({a}, {b}) is on the vanishing line")));
    }
    let j = 6912.0 * a3 / dtil;
    if !j.is_finite() {
        return Err(Error::Numeric(format!("({a}, {b}) too close to the vanishing line")));
    }
    Ok((modfun::log_g_of_real_j(j)? - (16.0 * dtil.abs()).ln()).exp().sqrt())
}

/// The profile along the pencil (A, B) = (t, t):
/// f(t) = √(G(j(t))/(64|t + 27/4|)), finite at t = 0, singular at t = −27/4.
pub fn f_of_t(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("t = {t}")));
    }
    let s = t + 6.75;
    if s == 0.0 {
        return Err(Error::Singular("t = -27/4".into()));
    }
    let j = 6912.0 * t / (4.0 * t + 27.0);
    Ok((modfun::log_g_of_real_j(j)? - (64.0 * s.abs()).ln()).exp().sqrt())
}

// ---- the area constant -----------------------------------------------------

fn g_of_real_j(j: f64) -> f64 {
    modfun::log_g_of_real_j(j).expect("finite j inside quadrature pieces").exp()
}

// σ = (2/5)·∫ f(t)^{5/3} |t|^{−2/3} dt over ℝ, split into nine pieces whose
// substitutions remove every singularity: t = ∓1/y² for the tails,
// t + 27/4 = ∓e^v walking into the cusp, and t = u³ through the origin.

fn intg_plain(t: f64) -> f64 {
    let j = 6912.0 * t / (4.0 * t + 27.0);
    (g_of_real_j(j) / (64.0 * (t + 6.75).abs())).powf(5.0 / 6.0)
        * t.abs().powf(-2.0 / 3.0)
}

fn intg_cube(u: f64) -> f64 {
    let t = u * u * u;
    let j = 6912.0 * t / (4.0 * t + 27.0);
    3.0 * (g_of_real_j(j) / (64.0 * (t + 6.75))).powf(5.0 / 6.0)
}

fn intg_tail_neg(y: f64) -> f64 {
    let d = 4.0 - 27.0 * y * y;
    2.0 * (g_of_real_j(6912.0 / d) / (16.0 * d)).powf(5.0 / 6.0)
}

fn intg_tail_pos(y: f64) -> f64 {
    let d = 4.0 + 27.0 * y * y;
    2.0 * (g_of_real_j(6912.0 / d) / (16.0 * d)).powf(5.0 / 6.0)
}

fn intg_cusp_left(v: f64) -> f64 {
    let j = 1728.0 + 11664.0 * (-v).exp();
    (6.75 + v.exp()).powf(-2.0 / 3.0) * (g_of_real_j(j) / 64.0).powf(5.0 / 6.0)
        * (v / 6.0).exp()
}

fn intg_cusp_right(v: f64) -> f64 {
    let j = 1728.0 - 11664.0 * (-v).exp();
    (6.75 - v.exp()).powf(-2.0 / 3.0) * (g_of_real_j(j) / 64.0).powf(5.0 / 6.0)
        * (v / 6.0).exp()
}

/// One piece of the σ integral.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SigmaPiece {
    pub name: &'static str,
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SigmaReport {
    pub sigma: f64,
    pub error_bound: f64,
    pub tol: f64,
    pub pieces: Vec<SigmaPiece>,
}

pub fn sigma_area_detailed(tol: f64) -> Result<SigmaReport> {
    if !(tol >= 1e-11 && tol <= 0.5) {
        return Err(Error::Domain(format!("sigma tolerance {tol} outside [1e-11, 0.5]")));
    }
    let rel = tol / 4.0;
    let pieces: [(&'static str, fn(f64) -> f64, f64, f64); 9] = [
        ("t <= -64 (y = (-t)^{-1/2})", intg_tail_neg, 0.0, 0.125),
        ("[-64, -7.75]", intg_plain, -64.0, -7.75),
        ("[-7.75, -27/4) (s = -e^v)", intg_cusp_left, -120.0, 0.0),
        ("(-27/4, -5.75] (s = e^v)", intg_cusp_right, -120.0, 0.0),
        ("[-5.75, -1]", intg_plain, -5.75, -1.0),
        ("[-1, 0] (t = u^3)", intg_cube, -1.0, 0.0),
        ("[0, 1] (t = u^3)", intg_cube, 0.0, 1.0),
        ("[1, 64]", intg_plain, 1.0, 64.0),
        ("t >= 64 (y = t^{-1/2})", intg_tail_pos, 0.0, 0.125),
    ];
    let mut out = Vec::with_capacity(9);
    let mut total = 0.0;
    let mut err = 0.0;
    for (name, f, lo, hi) in pieces {
        let r = quad::integrate(f, lo, hi, rel)?;
        total += r.value;
        err += r.error;
        out.push(SigmaPiece { name, value: r.value, error: r.error, intervals: r.intervals });
    }
    Ok(SigmaReport { sigma: 0.4 * total, error_bound: 0.4 * err, tol, pieces: out })
}

/// The area constant σ = Area(R₁) ≈ 29089.
pub fn sigma_area(tol: f64) -> Result<f64> {
    Ok(sigma_area_detailed(tol)?.sigma)
}

/// Monte Carlo estimate of σ.
#[derive(Debug, Clone, serde::Serialize)]
pub struct McSigma {
    pub sigma: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
}

/// Rejection sampling over a box that contains R₁ up to area ~1e-6: the body
/// needs |A| ≤ 48, |B| ≤ 134; the tongue reaches A = −660 by |B| = 6525 and
/// is exponentially thin past it.
pub fn mc_sigma(samples: u64, seed: u64) -> Result<McSigma> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    const A_RANGE: (f64, f64) = (-660.0, 50.0);
    const B_RANGE: (f64, f64) = (-6500.0, 6500.0);
    const CHUNK: u64 = 65536;
    let spec = RegionSpec::new(1.0)?;
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ci);
            let count = CHUNK.min(samples - ci * CHUNK);
            let mut h = 0u64;
            for _ in 0..count {
                let a = rng.gen_range(A_RANGE.0..A_RANGE.1);
                let b = rng.gen_range(B_RANGE.0..B_RANGE.1);
                if spec.contains(a, b) {
                    h += 1;
                }
            }
            h
        })
        .sum();
    let box_area = (A_RANGE.1 - A_RANGE.0) * (B_RANGE.1 - B_RANGE.0);
    let p = hits as f64 / samples as f64;
    Ok(McSigma {
        sigma: box_area * p,
        std_error: box_area * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        hits,
    })
}

// ---- boundary probes --------------------------------------------------------

/// Exact cusp-sheet coordinates: A = −c·|B|^{2/3} + ε·X·|B|^{−4/3}.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CuspParameter {
    pub b: f64,
    pub eps: f64,
}

impl CuspParameter {
    pub fn a(&self, x: f64) -> f64 {
        let b23 = (self.b * self.b).cbrt();
        -bound_constants().cusp_coeff * b23 + self.eps * x / (b23 * b23)
    }

    /// 4A³ + 27B² = 4εX(3c² − 3c·εXB⁻² + (εXB⁻²)²), exactly — the 27B²
    /// cancellation is done symbolically.
    pub fn disc_tilde(&self, x: f64) -> f64 {
        let c = bound_constants().cusp_coeff;
        let w = self.eps * x / (self.b * self.b);
        4.0 * self.eps * x * (3.0 * c * c - 3.0 * c * w + w * w)
    }

    pub fn jinv(&self, x: f64) -> f64 {
        let a = self.a(x);
        6912.0 * a * a * a / self.disc_tilde(x)
    }

    /// Membership margin through the exact discriminant.
    pub fn margin(&self, x: f64) -> Result<f64> {
        let dtil = self.disc_tilde(x);
        if dtil == 0.0 {
            return Err(Error::Singular("ε = 0 is the vanishing line".into()));
        }
        let j = self.jinv(x);
        if !j.is_finite() {
            return Ok(f64::NEG_INFINITY);
        }
        Ok((16.0 * dtil.abs()).ln() - x.ln() - modfun::log_g_of_real_j(j)?)
    }

    pub fn f_value(&self, x: f64) -> Result<f64> {
        let dtil = self.disc_tilde(x);
        if dtil == 0.0 {
            return Err(Error::Singular("ε = 0 is the vanishing line".into()));
        }
        let j = self.jinv(x);
        let g = if j.is_finite() { modfun::log_g_of_real_j(j)?.exp() } else { 0.0 };
        Ok(16.0 * dtil.abs() - x * g)
    }
}

/// A point on ∂R_X.  Tongue points carry the cusp coordinate ε, because for
/// large |B| the offset from the cusp line is far below one ulp of `a`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct BoundaryPoint {
    pub a: f64,
    pub b: f64,
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct BoundarySweep {
    pub x: f64,
    pub points: Vec<BoundaryPoint>,
}

fn bisect_sign_change(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<f64> {
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if !(flo < 0.0 && fhi > 0.0) {
        return Err(Error::Contract(format!(
            "no sign change on [{lo}, {hi}]: f = {flo:.3e}, {fhi:.3e}"
        )));
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sample n points of ∂R_X: n/4 body-edge points (left and right A-roots on
/// horizontal lines), n/4 axis-cap points (B-roots on vertical lines through
/// the B = 0 crossings), and the rest tongue points on both cusp sheets,
/// |B| log-spaced from 1.5× the body extent out to 10⁵√X.
pub fn boundary_samples(x: f64, n: usize) -> Result<BoundarySweep> {
    let spec = RegionSpec::new(x)?;
    if n < 8 {
        return Err(Error::Domain(format!("need at least 8 samples, got {n}")));
    }
    let nb = n / 4;
    let na = n / 4;
    let nt = n - nb - na;
    let ext = spec.body_extent();
    let cross = spec.axis_crossing();
    let mut pts = Vec::with_capacity(n);

    // Body edges.
    let lines = nb.div_ceil(2).max(1);
    for k in 0..nb {
        let line = k / 2;
        let frac = (line + 1) as f64 / (lines + 1) as f64;
        let b = 0.9 * ext * frac * if line % 2 == 0 { 1.0 } else { -1.0 };
        let a = if k % 2 == 0 {
            bisect_sign_change(|a| spec.margin(a, b), 0.0, 1.3 * cross + 1.0)?
        } else {
            // Inner anchor left of the right edge but inside; the margin dips
            // to −∞ at the vanishing line, so any interior anchor works.
            let anchor = [-0.9, -0.7, -0.5, -0.2]
                .iter()
                .map(|s| s * cross)
                .find(|&a| matches!(spec.margin(a, b), Ok(m) if m < 0.0))
                .ok_or_else(|| {
                    Error::Contract(format!("no interior anchor on the line B = {b}"))
                })?;
            -bisect_sign_change(|a| spec.margin(-a, b), -anchor, 1.3 * cross + 1.0)?
        };
        let m = spec.margin(a, b)?;
        if m.abs() > 1e-10 {
            return Err(Error::Contract(format!("body root margin {m:.3e} at ({a}, {b})")));
        }
        pts.push(BoundaryPoint { a, b, eps: None });
    }

    // Axis caps.
    for k in 0..na {
        let frac = (k / 2) as f64 / ((na / 2).max(1)) as f64;
        let a = (0.2 + 0.78 * frac) * cross * if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut hi = 1.6 * ext;
        let mut tries = 0;
        while matches!(spec.margin(a, hi), Ok(m) if m <= 0.0) {
            hi *= 1.5;
            tries += 1;
            if tries > 4 {
                return Err(Error::Contract(format!("no outer bracket above A = {a}")));
            }
        }
        let b = bisect_sign_change(|b| spec.margin(a, b), 0.0, hi)?;
        let m = spec.margin(a, b)?;
        if m.abs() > 1e-10 {
            return Err(Error::Contract(format!("cap root margin {m:.3e} at ({a}, {b})")));
        }
        pts.push(BoundaryPoint { a, b, eps: None });
    }

    // Tongue sheets, in u = ln|ε|.
    let b_lo = (1.5 * ext).ln();
    let b_hi = (1e5 * x.sqrt()).ln();
    for k in 0..nt {
        let frac = if nt > 1 { k as f64 / (nt - 1) as f64 } else { 0.5 };
        let babs = (b_lo + frac * (b_hi - b_lo)).exp();
        let b = babs * if k % 2 == 0 { 1.0 } else { -1.0 };
        let sheet = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let u = bisect_sign_change(
            |u| CuspParameter { b, eps: sheet * u.exp() }.margin(x),
            -80.0,
            14.0,
        )?;
        let cp = CuspParameter { b, eps: sheet * u.exp() };
        let m = cp.margin(x)?;
        if m.abs() > 1e-10 {
            return Err(Error::Contract(format!("tongue root margin {m:.3e} at B = {b}")));
        }
        pts.push(BoundaryPoint { a: cp.a(x), b, eps: Some(cp.eps) });
    }

    Ok(BoundarySweep { x, points: pts })
}

/// (∂F/∂A, ∂F/∂B) at a boundary point, by central differences: in plain
/// (A, B) coordinates for body points, in the exact (B, ε) chart for tongue
/// points, with ∂F/∂A = (|B|^{4/3}/X)·∂F/∂ε and
/// dε/dB = (2c/3)·B/X + (4/3)·ε/B along constant A.
pub fn boundary_gradient(point: &BoundaryPoint, x: f64) -> Result<(f64, f64)> {
    let spec = RegionSpec::new(x)?;
    match point.eps {
        None => {
            let m = spec.margin(point.a, point.b)?;
            if m.abs() > 1e-6 {
                return Err(Error::Contract(format!("margin {m:.3e}: not a boundary point")));
            }
            let ha = point.a.abs().max(1.0) * 3e-6;
            let hb = point.b.abs().max(1.0) * 3e-6;
            let fa = (spec.f_value(point.a + ha, point.b)?
                - spec.f_value(point.a - ha, point.b)?)
                / (2.0 * ha);
            let fb = (spec.f_value(point.a, point.b + hb)?
                - spec.f_value(point.a, point.b - hb)?)
                / (2.0 * hb);
            Ok((fa, fb))
        }
        Some(eps) => {
            let cp = CuspParameter { b: point.b, eps };
            let m = cp.margin(x)?;
            if m.abs() > 1e-6 {
                return Err(Error::Contract(format!("margin {m:.3e}: not a boundary point")));
            }
            let he = eps.abs() * 3e-6;
            let dfde = (CuspParameter { b: point.b, eps: eps + he }.f_value(x)?
                - CuspParameter { b: point.b, eps: eps - he }.f_value(x)?)
                / (2.0 * he);
            let hb = point.b.abs() * 3e-6;
            let dfdb_eps = (CuspParameter { b: point.b + hb, eps }.f_value(x)?
                - CuspParameter { b: point.b - hb, eps }.f_value(x)?)
                / (2.0 * hb);
            let b23 = (point.b * point.b).cbrt();
            let c = bound_constants().cusp_coeff;
            let deps_db = (2.0 * c / 3.0) * point.b / x + (4.0 / 3.0) * eps / point.b;
            Ok((dfde * b23 * b23 / x, dfdb_eps + dfde * deps_db))
        }
    }
}
