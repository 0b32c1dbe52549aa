//! Census of integral short Weierstrass pairs of bounded Faltings height.
//!
//! S_X = {(a, b) ∈ ℤ² : 4a³ + 27b² ≠ 0, weakly minimal, H_F < X}, where
//! H_F = λ·16|4a³ + 27b²|/G(j).  Since λ takes the four values
//! 1, 2⁻¹², 3⁻¹², 6⁻¹² on residue-defined families, H_F < X is equivalent to
//! membership of (a, b) in the region at level X/λ, and the census splits
//! into four strided lattice scans.  Counts grow like
//! 12·σ·ζ(10)⁻¹·X^{5/6} ≈ 348717·X^{5/6}.
//!
//! Two independent counters are kept in exact agreement: a direct scan that
//! rejects (a, b) divisible by (p⁴, p⁶) for a prime p ≥ 5, and a Möbius
//! sieve Σ_d μ(d)·N_d over d squarefree and coprime to 6, where N_d counts
//! pairs whose (d⁴, d⁶)-scaling lands in the region.  Both sides evaluate
//! membership through one bit-identical predicate, so equality is an exact
//! set identity, not an approximation.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::minimality::{self, ClassTables, Lambda, PrimeClass};
use crate::modfun;
use crate::region;

/// Census levels above this are rejected: the window and overflow analysis
/// (i128 discriminants, f64-exact cube roots, the p ≥ 5 prime list) is sized
/// for X ≤ 1000.
const MAX_X: f64 = 1000.0;

/// Primes p ≥ 5 that can satisfy p⁴ | a (or p⁶ | b when a = 0) anywhere in
/// the scan range at X ≤ 1000.
const P5_PRIMES: [i64; 23] = [
    5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73,
    79, 83, 89, 97,
];

fn scaled_by_prime_ge5(a: i64, b: i64) -> bool {
    P5_PRIMES.iter().any(|&p| {
        let p4 = p * p * p * p;
        a % p4 == 0 && b % (p4 * p * p) == 0
    })
}

/// ζ(10) = π¹⁰/93555.
pub fn zeta10() -> f64 {
    std::f64::consts::PI.powi(10) / 93555.0
}

fn sigma_cached() -> Result<f64> {
    static SIGMA: OnceLock<f64> = OnceLock::new();
    if let Some(v) = SIGMA.get() {
        return Ok(*v);
    }
    let v = region::sigma_area(1e-9)?;
    Ok(*SIGMA.get_or_init(|| v))
}

/// Leading-order prediction 12·σ·ζ(10)⁻¹·x^{5/6}.
pub fn asymptotic_prediction(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("x = {x} must be positive")));
    }
    Ok(12.0 * sigma_cached()? / zeta10() * x.powf(5.0 / 6.0))
}

/// Σ μ(d)/d¹⁰ over squarefree d ≤ dmax coprime to 6; converges to
/// Π_{p ≥ 5} (1 − p⁻¹⁰).
pub fn mobius_partial_sum(dmax: u64) -> f64 {
    let mut s = 0.0;
    for d in 1..=dmax {
        if let Some(mu) = mobius_coprime6(d) {
            s += mu as f64 / (d as f64).powi(10);
        }
    }
    s
}

/// μ(d) for squarefree d coprime to 6; None otherwise.
fn mobius_coprime6(d: u64) -> Option<i32> {
    if d % 2 == 0 || d % 3 == 0 {
        return None;
    }
    let mut n = d;
    let mut factors = 0;
    let mut p = 5u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return None;
            }
            factors += 1;
        }
        p += if p % 6 == 5 { 2 } else { 4 };
    }
    if n > 1 {
        factors += 1;
    }
    Some(if factors % 2 == 0 { 1 } else { -1 })
}

fn mod_inv(a: i64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "inverse of {a} mod {m}");
    t0.rem_euclid(m)
}

fn table_class(t: &ClassTables, a: i64, b: i64) -> Option<Lambda> {
    let c2 = t.at_2(a.rem_euclid(64) as usize, b.rem_euclid(64) as usize);
    let c3 = t.at_3(a.rem_euclid(729) as usize, b.rem_euclid(729) as usize);
    match (c2, c3) {
        (PrimeClass::NonWeaklyMinimal, _) | (_, PrimeClass::NonWeaklyMinimal) => None,
        (PrimeClass::Nonminimal, PrimeClass::Nonminimal) => Some(Lambda::InvSix12),
        (PrimeClass::Nonminimal, PrimeClass::Minimal) => Some(Lambda::InvTwo12),
        (PrimeClass::Minimal, PrimeClass::Nonminimal) => Some(Lambda::InvThree12),
        (PrimeClass::Minimal, PrimeClass::Minimal) => Some(Lambda::One),
    }
}

/// Residue-class definition of one λ-family: the (a, b) residues mod
/// `modulus` a member must occupy (jointly with a per-point table check at
/// the other prime).
struct FamilyDef {
    lambda: Lambda,
    modulus: i64,
    pairs: Vec<(i64, i64)>,
}

fn family_defs(t: &ClassTables) -> Vec<FamilyDef> {
    let two: Vec<(i64, i64)> =
        t.nonminimal_residues_at_2().iter().map(|&(a, b)| (a as i64, b as i64)).collect();
    let three: Vec<(i64, i64)> =
        t.nonminimal_residues_at_3().iter().map(|&(a, b)| (a as i64, b as i64)).collect();
    // CRT merge for the doubly nonminimal family.
    let inv64 = mod_inv(64, 729);
    let crt = |x2: i64, x3: i64| x2 + 64 * ((inv64 * (x3 - x2)).rem_euclid(729));
    let mut six = Vec::with_capacity(two.len() * three.len());
    for &(a2, b2) in &two {
        for &(a3, b3) in &three {
            six.push((crt(a2, a3), crt(b2, b3)));
        }
    }
    six.sort_unstable();
    vec![
        FamilyDef { lambda: Lambda::One, modulus: 1, pairs: vec![(0, 0)] },
        FamilyDef { lambda: Lambda::InvTwo12, modulus: 64, pairs: two },
        FamilyDef { lambda: Lambda::InvThree12, modulus: 729, pairs: three },
        FamilyDef { lambda: Lambda::InvSix12, modulus: 46656, pairs: six },
    ]
}

/// Tongue envelope: along the cusp the discriminant of any member at level
/// `lvl` with the given |B| is bounded by twice the leading-order boundary
/// value, |D̃| ≤ 2·46656·B²·e^(−L), L = (16·46656·B²/((2π)⁶·lvl))^{1/6}.
fn cusp_envelope(babs: f64, lvl: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let l6 = 16.0 * 46656.0 * babs * babs / (two_pi.powi(6) * lvl);
    2.0 * 46656.0 * babs * babs * (-l6.powf(1.0 / 6.0)).exp()
}

struct ScanCtx {
    lvl: f64,
    lvl_ln: f64,
    modulus: i64,
    family: Lambda,
    d: i64,
    d4: i64,
    d6: i64,
    d12: f64,
    window_scale: f64,
    strip_p5: bool,
    bulk_s: f64,
    dbulk_s: f64,
    /// Prefilter: membership needs 16|D̃| < lvl·sup G; skip just above it so
    /// the live Corollary-5 check below still has a band to fire in.
    prefilter: f64,
    corollary5: f64,
}

impl ScanCtx {
    fn new(fd: &FamilyDef, lvl: f64, d: i64, window_scale: f64, strip_p5: bool) -> ScanCtx {
        let c_sup = region::bound_constants().sup_g;
        ScanCtx {
            lvl,
            lvl_ln: lvl.ln(),
            modulus: fd.modulus,
            family: fd.lambda,
            d,
            d4: d.pow(4),
            d6: d.pow(6),
            d12: (d as f64).powi(12),
            window_scale,
            strip_p5,
            bulk_s: (c_sup * 1.05 * lvl / 27.0).sqrt(),
            dbulk_s: c_sup * 1.05 * lvl / 16.0,
            prefilter: c_sup * lvl * 1.001,
            corollary5: c_sup * lvl * (1.0 + 1e-9),
        }
    }

    /// Nothing can survive the window at this d.
    fn empty(&self) -> bool {
        self.dbulk_s * self.window_scale / self.d12 < 4.0
    }

    /// Largest scaled |B| any member can have: past the bulk the envelope is
    /// monotone decreasing, so bisect it down to the |D̃| ≥ 4 floor.
    fn tongue_end_scaled(&self) -> f64 {
        let thresh = 4.0 * self.d12 / self.window_scale;
        if cusp_envelope(self.bulk_s, self.lvl) <= thresh {
            return self.bulk_s;
        }
        let mut hi = self.bulk_s * 2.0;
        while cusp_envelope(hi, self.lvl) > thresh {
            hi *= 2.0;
        }
        let mut lo = self.bulk_s;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cusp_envelope(mid, self.lvl) > thresh {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// One fixed-b column: enumerate candidate a ≡ ar (mod modulus) inside
    /// the discriminant window and count members.
    fn scan_column(&self, b: i64, ars: &[i64]) -> Result<(u64, u64)> {
        let b_s = self.d6 * b;
        let babs_s = (b_s as f64).abs();
        let mut w_s = if babs_s <= self.bulk_s {
            self.dbulk_s
        } else {
            self.dbulk_s.min(cusp_envelope(babs_s, self.lvl))
        };
        w_s *= self.window_scale;
        let w_u = w_s / self.d12;
        if w_u < 4.0 {
            return Ok((0, 0));
        }
        let t27 = 27.0 * (b as f64) * (b as f64);
        let lo = (((-t27 - w_u) / 4.0).cbrt()).floor() as i64 - 2;
        let hi = (((-t27 + w_u) / 4.0).cbrt()).ceil() as i64 + 2;
        let mut count = 0u64;
        let mut visited = 0u64;
        for &ar in ars {
            let mut a = lo + (ar - lo).rem_euclid(self.modulus);
            while a <= hi {
                visited += 1;
                match self.visit(a, b, b_s, babs_s)? {
                    true => count += 1,
                    false => {}
                }
                a += self.modulus;
            }
        }
        Ok((count, visited))
    }

    fn visit(&self, a: i64, b: i64, b_s: i64, babs_s: f64) -> Result<bool> {
        let a_s = self.d4 * a;
        let a3_s = (a_s as i128).pow(3);
        let dtil_s = 4 * a3_s + 27 * (b_s as i128) * (b_s as i128);
        if dtil_s == 0 {
            return Ok(false);
        }
        let abs16 = 16.0 * dtil_s.unsigned_abs() as f64;
        if abs16 >= self.prefilter {
            return Ok(false);
        }
        if table_class(minimality::class_tables(), a_s, b_s) != Some(self.family) {
            return Ok(false);
        }
        let p5_scaled = scaled_by_prime_ge5(a_s, b_s);
        if self.d == 1 {
            // Exact Kraus–Laska–Connell classification must agree with the
            // residue tables on every visited point of the direct scan.
            match minimality::lambda_class(a, b) {
                Ok(l) => {
                    if l != self.family || p5_scaled {
                        return Err(Error::Integrity(format!(
                            "class tables disagree with exact classification at ({a}, {b})"
                        )));
                    }
                }
                Err(_) => {
                    if !p5_scaled {
                        return Err(Error::Integrity(format!(
                            "exact classification rejects ({a}, {b}) but tables accept it"
                        )));
                    }
                }
            }
        }
        if self.strip_p5 && p5_scaled {
            return Ok(false);
        }
        // Membership, evaluated canonically on the scaled pair so every
        // sieve term sees bit-identical floats for the same lattice point.
        let j = 6912.0 * (a3_s as f64) / (dtil_s as f64);
        let lng = modfun::log_g_of_real_j(j)?;
        if abs16.ln() >= self.lvl_ln + lng {
            return Ok(false);
        }
        if abs16 >= self.corollary5 {
            return Err(Error::Integrity(format!(
                "member at ({a_s}, {b_s}) violates 16|D̃| < C·level"
            )));
        }
        // The true tongue boundary exceeds the leading-order model by at most
        // 0.46% (worst at the bulk seam), so a member beyond 1.5× the model —
        // 0.75 of the envelope window — means the envelope itself is broken.
        if babs_s > self.bulk_s
            && dtil_s.unsigned_abs() as f64 > 0.75 * cusp_envelope(babs_s, self.lvl)
        {
            return Err(Error::Integrity(format!(
                "member at ({a_s}, {b_s}) exhausts the tongue envelope margin"
            )));
        }
        Ok(true)
    }
}

/// Scan one family at one sieve modulus d.  Work is split into column-range
/// jobs and reduced with exact integer sums, so the result is deterministic
/// regardless of thread count.
fn scan_family(fd: &FamilyDef, lvl: f64, d: i64, window_scale: f64, strip_p5: bool) -> Result<(u64, u64)> {
    let ctx = ScanCtx::new(fd, lvl, d, window_scale, strip_p5);
    if ctx.empty() {
        return Ok((0, 0));
    }
    let b_end_u = (ctx.tongue_end_scaled() / ctx.d6 as f64).floor() as i64 + 1;
    let m = fd.modulus;
    // Unscale the residue classes: (d⁴a, d⁶b) ≡ (ar, br) fixes (a, b) mod m.
    let inv4 = mod_inv(ctx.d4.rem_euclid(m), m);
    let inv6 = mod_inv(ctx.d6.rem_euclid(m), m);
    let mut strips: Vec<(i64, Vec<i64>)> = Vec::new();
    for &(ar, br) in &fd.pairs {
        let ar_u = (inv4 * ar).rem_euclid(m);
        let br_u = (inv6 * br).rem_euclid(m);
        match strips.iter_mut().find(|(b, _)| *b == br_u) {
            Some((_, v)) => v.push(ar_u),
            None => strips.push((br_u, vec![ar_u])),
        }
    }
    for (_, v) in &mut strips {
        v.sort_unstable();
        v.dedup();
    }
    strips.sort_unstable_by_key(|(b, _)| *b);
    // Column jobs: (strip index, first b, signed step, columns), chunked for
    // load balance.
    const JOB_COLS: i64 = 1024;
    let mut jobs: Vec<(usize, i64, i64, i64)> = Vec::new();
    for (si, (br_u, _)) in strips.iter().enumerate() {
        // b = br_u + k·m for k ≥ 0, and b = br_u − k·m for k ≥ 1.
        let up = if *br_u > b_end_u { 0 } else { (b_end_u - br_u) / m + 1 };
        let down = (b_end_u + br_u) / m;
        let mut k = 0;
        while k < up {
            let n = JOB_COLS.min(up - k);
            jobs.push((si, br_u + k * m, m, n));
            k += n;
        }
        let mut k = 1;
        while k <= down {
            let n = JOB_COLS.min(down - k + 1);
            jobs.push((si, br_u - k * m, -m, n));
            k += n;
        }
    }
    jobs.par_iter()
        .map(|&(si, b0, step, cols)| {
            let ars = &strips[si].1;
            let mut count = 0u64;
            let mut visited = 0u64;
            for i in 0..cols {
                let (c, v) = ctx.scan_column(b0 + i * step, ars)?;
                count += c;
                visited += v;
            }
            Ok((count, visited))
        })
        .try_reduce(|| (0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1)))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FamilyCount {
    pub lambda: Lambda,
    pub level: f64,
    pub count: u64,
    pub visited: u64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct DirectCensus {
    pub x: f64,
    pub total: u64,
    pub families: Vec<FamilyCount>,
    pub visited: u64,
}

fn check_x(x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 || x > MAX_X {
        return Err(Error::Domain(format!("census level X = {x} outside (0, {MAX_X}]")));
    }
    Ok(())
}

/// Direct enumeration of S_X with an explicit window inflation factor
/// (doubling the windows must not change any count).
pub fn enumerate_sx_windowed(x: f64, window_scale: f64) -> Result<DirectCensus> {
    check_x(x)?;
    if !(1.0..=4.0).contains(&window_scale) {
        return Err(Error::Domain(format!("window scale {window_scale} outside [1, 4]")));
    }
    let mut families = Vec::with_capacity(4);
    let mut total = 0u64;
    let mut visited = 0u64;
    for fd in family_defs(minimality::class_tables()) {
        let lvl = x * fd.lambda.denominator() as f64;
        let (count, vis) = scan_family(&fd, lvl, 1, window_scale, true)?;
        total += count;
        visited += vis;
        families.push(FamilyCount { lambda: fd.lambda, level: lvl, count, visited: vis });
    }
    Ok(DirectCensus { x, total, families, visited })
}

/// Direct enumeration of S_X = {(a, b) : D̃ ≠ 0, weakly minimal, H_F < X}.
pub fn enumerate_sx(x: f64) -> Result<DirectCensus> {
    enumerate_sx_windowed(x, 1.0)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SieveTerm {
    pub d: u64,
    pub mobius: i32,
    pub count: u64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FamilySieve {
    pub lambda: Lambda,
    pub level: f64,
    pub total: i64,
    pub terms: Vec<SieveTerm>,
    pub visited: u64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SieveCensus {
    pub x: f64,
    pub total: i64,
    pub families: Vec<FamilySieve>,
    pub visited: u64,
}

/// Möbius-sieve count of S_X: Σ_d μ(d)·N_d per family, d squarefree coprime
/// to 6 ascending until the scaled window is empty.
pub fn count_sx_sieve(x: f64) -> Result<SieveCensus> {
    check_x(x)?;
    let mut families = Vec::with_capacity(4);
    let mut total = 0i64;
    let mut visited = 0u64;
    for fd in family_defs(minimality::class_tables()) {
        let lvl = x * fd.lambda.denominator() as f64;
        let mut fam_total = 0i64;
        let mut fam_visited = 0u64;
        let mut terms = Vec::new();
        let mut d = 0i64;
        loop {
            d += 1;
            let Some(mu) = mobius_coprime6(d as u64) else { continue };
            if ScanCtx::new(&fd, lvl, d, 1.0, false).empty() {
                break;
            }
            let (count, vis) = scan_family(&fd, lvl, d, 1.0, false)?;
            fam_total += mu as i64 * count as i64;
            fam_visited += vis;
            terms.push(SieveTerm { d: d as u64, mobius: mu, count });
        }
        total += fam_total;
        visited += fam_visited;
        families.push(FamilySieve {
            lambda: fd.lambda,
            level: lvl,
            total: fam_total,
            terms,
            visited: fam_visited,
        });
    }
    Ok(SieveCensus { x, total, families, visited })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FamilyReport {
    pub lambda: Lambda,
    pub level: f64,
    pub direct: u64,
    pub sieve: i64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CensusReport {
    pub x: f64,
    pub count: u64,
    pub sieve_count: i64,
    pub families: Vec<FamilyReport>,
    pub prediction: f64,
    pub ratio: f64,
    pub visited: u64,
}

/// Run both counters and cross-check them; disagreement is an integrity
/// failure, since the sieve identity is exact.
pub fn census(x: f64) -> Result<CensusReport> {
    let direct = enumerate_sx(x)?;
    let sieve = count_sx_sieve(x)?;
    let mut families = Vec::with_capacity(4);
    for (fd, fs) in direct.families.iter().zip(&sieve.families) {
        if fd.count as i64 != fs.total {
            return Err(Error::Integrity(format!(
                "direct {} vs sieve {} in the λ = {} family at X = {x}",
                fd.count, fs.total, fd.lambda
            )));
        }
        families.push(FamilyReport {
            lambda: fd.lambda,
            level: fd.level,
            direct: fd.count,
            sieve: fs.total,
        });
    }
    let prediction = asymptotic_prediction(x)?;
    Ok(CensusReport {
        x,
        count: direct.total,
        sieve_count: sieve.total,
        families,
        prediction,
        ratio: direct.total as f64 / prediction,
        visited: direct.visited + sieve.visited,
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct NaiveCount {
    pub x: f64,
    pub count: u64,
    pub prediction: f64,
}

/// Count weakly minimal pairs with max(|a|³, b²) < x by brute force, with
/// the box prediction 4·ζ(10)⁻¹·x^{5/6}.
pub fn count_naive(x: f64) -> Result<NaiveCount> {
    if !x.is_finite() || !(1.0..=1e9).contains(&x) {
        return Err(Error::Domain(format!("naive census bound {x} outside [1, 1e9]")));
    }
    let amax = x.cbrt().ceil() as i64 + 1;
    let bmax = x.sqrt().ceil() as i64 + 1;
    let count: u64 = (-bmax..=bmax)
        .into_par_iter()
        .map(|b| {
            let mut n = 0u64;
            if (b as f64) * (b as f64) >= x {
                return 0;
            }
            for a in -amax..=amax {
                if (a as f64).abs().powi(3) >= x {
                    continue;
                }
                let dtil = 4 * (a as i128).pow(3) + 27 * (b as i128) * (b as i128);
                if dtil != 0 && minimality::is_weakly_minimal(a, b) {
                    n += 1;
                }
            }
            n
        })
        .sum();
    Ok(NaiveCount { x, count, prediction: 4.0 / zeta10() * x.powf(5.0 / 6.0) })
}
