//! Minimality of integral models y² = x³ + ax + b at 2 and 3, and the scaling
//! factor λ relating the discriminant of a weakly minimal model to the true
//! minimal discriminant.
//!
//! A pair is *weakly minimal* when no prime p has p⁴ | a and p⁶ | b.  A weakly
//! minimal model can still fail minimality at 2 and/or 3 (never at any other
//! prime, and by exactly one u-step); λ ∈ {1, 2⁻¹², 3⁻¹², 6⁻¹²} records which.
//! Both failure conditions are functions of (a, b) mod 64 resp. mod 729, so
//! they tabulate into lookup tables that the census scans lean on.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// λ = (minimal discriminant)/(discriminant of the weakly minimal model).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lambda {
    One,
    InvTwo12,
    InvThree12,
    InvSix12,
}

impl Lambda {
    pub const ALL: [Lambda; 4] =
        [Lambda::One, Lambda::InvTwo12, Lambda::InvThree12, Lambda::InvSix12];

    /// 1/λ: one of 1, 2¹², 3¹², 6¹².
    pub fn denominator(self) -> u64 {
        match self {
            Lambda::One => 1,
            Lambda::InvTwo12 => 4096,
            Lambda::InvThree12 => 531441,
            Lambda::InvSix12 => 2176782336,
        }
    }

    pub fn value(self) -> f64 {
        1.0 / self.denominator() as f64
    }

    pub fn ln(self) -> f64 {
        -((self.denominator() as f64).ln())
    }

    pub fn label(self) -> &'static str {
        match self {
            Lambda::One => "1",
            Lambda::InvTwo12 => "2^-12",
            Lambda::InvThree12 => "3^-12",
            Lambda::InvSix12 => "6^-12",
        }
    }
}

impl std::fmt::Display for Lambda {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl serde::Serialize for Lambda {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// No prime p has p⁴ | a and p⁶ | b.  (0, 0) counts as not weakly minimal.
pub fn is_weakly_minimal(a: i64, b: i64) -> bool {
    if a == 0 && b == 0 {
        return false;
    }
    let (aa, ab) = (a.unsigned_abs(), b.unsigned_abs());
    let mut p: u64 = 2;
    // Testing every integer p is equivalent: a composite witness contains a
    // prime one.
    while (a == 0 || p.pow(4) <= aa) && (b == 0 || p.pow(6) <= ab) {
        if aa % p.pow(4) == 0 && ab % p.pow(6) == 0 {
            return false;
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    true
}

/// Strip every u⁴, u⁶ factor: returns (a₀, b₀, d) with a = d⁴a₀, b = d⁶b₀ and
/// (a₀, b₀) weakly minimal.
pub fn reduce_pair(a: i64, b: i64) -> Result<(i64, i64, i64)> {
    if a == 0 && b == 0 {
        return Err(Error::Singular("(0, 0) has no weakly minimal model".into()));
    }
    let (mut a, mut b) = (a, b);
    let mut d: i64 = 1;
    let mut p: i64 = 2;
    loop {
        let p4 = p.pow(4);
        let p6 = p4 * p * p;
        if (a != 0 && p4 > a.abs()) || (b != 0 && p6 > b.abs()) {
            break;
        }
        while a % p4 == 0 && b % p6 == 0 {
            a /= p4;
            b /= p6;
            d = d.checked_mul(p).ok_or_else(|| Error::Numeric("scale factor overflow".into()))?;
            if a == 0 && b == 0 {
                return Err(Error::Singular("(0, 0) has no weakly minimal model".into()));
            }
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    Ok((a, b, d))
}

// Failure of minimality at 2 for a 2-weakly-minimal pair, as a function of
// (a, b) mod 64: the u = 2 model needs c₆/2⁶ = −27b/2 ∈ ℤ (b even),
// Δ/2¹² ∈ ℤ (4a³ + 27b² ≡ 0 mod 256; for even b this is mod-64 determined),
// and the scaled pair must pass Kraus admissibility at 2: c₆ ≡ 3 (mod 4), or
// c₄ = −3a ≡ 0 (mod 16) with c₆ ≡ 0 or 8 (mod 32).
fn nonmin2_residue(ar: i64, br: i64) -> bool {
    if br % 2 != 0 {
        return false;
    }
    if (4 * ar * ar * ar + 27 * br * br).rem_euclid(256) != 0 {
        return false;
    }
    let c6 = -27 * (br / 2);
    let c4 = -3 * ar;
    c6.rem_euclid(4) == 3 || (c4.rem_euclid(16) == 0 && matches!(c6.rem_euclid(32), 0 | 8))
}

// Failure of minimality at 3 for a 3-weakly-minimal pair, as a function of
// (a, b) mod 729: 27 | a, 27 | b, 27 | (4a₁³ + b₁²) for a₁ = a/27, b₁ = b/27,
// and v₃(b₁) ≠ 2.
fn nonmin3_residue(ar: i64, br: i64) -> bool {
    if ar % 27 != 0 || br % 27 != 0 {
        return false;
    }
    let a1 = ar / 27;
    let b1 = br / 27;
    if (4 * a1 * a1 * a1 + b1 * b1).rem_euclid(27) != 0 {
        return false;
    }
    b1 % 9 != 0 || b1 % 27 == 0
}

/// The weakly minimal model (a, b) admits a u = 2 reduction.
pub fn nonminimal_at_2(a: i64, b: i64) -> bool {
    nonmin2_residue(a.rem_euclid(64), b.rem_euclid(64))
}

/// The weakly minimal model (a, b) admits a u = 3 reduction.
pub fn nonminimal_at_3(a: i64, b: i64) -> bool {
    nonmin3_residue(a.rem_euclid(729), b.rem_euclid(729))
}

/// λ of a weakly minimal pair; `Domain` error otherwise (reduce_pair first).
pub fn lambda_class(a: i64, b: i64) -> Result<Lambda> {
    if !is_weakly_minimal(a, b) {
        return Err(Error::Domain(format!("({a}, {b}) is not weakly minimal")));
    }
    Ok(match (nonminimal_at_2(a, b), nonminimal_at_3(a, b)) {
        (false, false) => Lambda::One,
        (true, false) => Lambda::InvTwo12,
        (false, true) => Lambda::InvThree12,
        (true, true) => Lambda::InvSix12,
    })
}

/// Exact minimal discriminant λ·(−16)(4a₀³ + 27b₀²) of the curve given by any
/// integral model (a, b); the division by 1/λ is exact or the model
/// classification is broken (Integrity).
pub fn minimal_discriminant(a: i64, b: i64) -> Result<i128> {
    let (a0, b0, _) = reduce_pair(a, b)?;
    let (ai, bi) = (a0 as i128, b0 as i128);
    let dtil = 4 * ai * ai * ai + 27 * bi * bi;
    if dtil == 0 {
        return Err(Error::Singular(format!("({a}, {b}) is singular")));
    }
    let lam = lambda_class(a0, b0)?;
    let delta = -16 * dtil;
    let den = lam.denominator() as i128;
    if delta % den != 0 {
        return Err(Error::Integrity(format!(
            "λ = {lam} does not divide Δ = {delta} for ({a0}, {b0})"
        )));
    }
    Ok(delta / den)
}

/// Naive height max(b², |a|³).
pub fn naive_height(a: i64, b: i64) -> Result<u128> {
    let bb = (b as i128 * b as i128) as u128;
    let aa = (a.unsigned_abs() as u128)
        .checked_pow(3)
        .ok_or_else(|| Error::Numeric(format!("|{a}|³ overflows")))?;
    Ok(bb.max(aa))
}

/// Classification of a residue class of (a, b) mod 64 or mod 729.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PrimeClass {
    /// Minimal at p for every representative.
    Minimal,
    /// Weakly minimal representatives admit a u = p reduction.
    Nonminimal,
    /// p⁴ | a and p⁶ | b: no representative is weakly minimal at p.
    NonWeaklyMinimal,
}

/// Lookup tables over (a, b) mod 64 and mod 729.
pub struct ClassTables {
    mod64: Vec<u8>,
    mod729: Vec<u8>,
    counts64: [u64; 3],
    counts729: [u64; 3],
    nonmin2: Vec<(u16, u16)>,
    nonmin3: Vec<(u16, u16)>,
}

fn decode(v: u8) -> PrimeClass {
    match v {
        0 => PrimeClass::Minimal,
        1 => PrimeClass::Nonminimal,
        _ => PrimeClass::NonWeaklyMinimal,
    }
}

impl ClassTables {
    fn build() -> ClassTables {
        let mut mod64 = vec![0u8; 64 * 64];
        let mut counts64 = [0u64; 3];
        let mut nonmin2 = Vec::new();
        for ar in 0..64i64 {
            for br in 0..64i64 {
                let v = if ar % 16 == 0 && br == 0 {
                    2
                } else if nonmin2_residue(ar, br) {
                    nonmin2.push((ar as u16, br as u16));
                    1
                } else {
                    0
                };
                mod64[(ar * 64 + br) as usize] = v;
                counts64[v as usize] += 1;
            }
        }
        let mut mod729 = vec![0u8; 729 * 729];
        let mut counts729 = [0u64; 3];
        let mut nonmin3 = Vec::new();
        for ar in 0..729i64 {
            for br in 0..729i64 {
                let v = if ar % 81 == 0 && br == 0 {
                    2
                } else if nonmin3_residue(ar, br) {
                    nonmin3.push((ar as u16, br as u16));
                    1
                } else {
                    0
                };
                mod729[(ar * 729 + br) as usize] = v;
                counts729[v as usize] += 1;
            }
        }
        ClassTables { mod64, mod729, counts64, counts729, nonmin2, nonmin3 }
    }

    /// Class of (a, b) from residues ar = a mod 64, br = b mod 64.
    pub fn at_2(&self, ar: usize, br: usize) -> PrimeClass {
        decode(self.mod64[ar * 64 + br])
    }

    /// Class of (a, b) from residues ar = a mod 729, br = b mod 729.
    pub fn at_3(&self, ar: usize, br: usize) -> PrimeClass {
        decode(self.mod729[ar * 729 + br])
    }

    /// (minimal, nonminimal, non-weakly-minimal) counts mod 64.
    pub fn counts_at_2(&self) -> [u64; 3] {
        self.counts64
    }

    /// Same mod 729.
    pub fn counts_at_3(&self) -> [u64; 3] {
        self.counts729
    }

    /// The residue pairs mod 64 whose weakly minimal members reduce at 2.
    pub fn nonminimal_residues_at_2(&self) -> &[(u16, u16)] {
        &self.nonmin2
    }

    /// The residue pairs mod 729 whose weakly minimal members reduce at 3.
    pub fn nonminimal_residues_at_3(&self) -> &[(u16, u16)] {
        &self.nonmin3
    }

    /// Number of residue classes mod (64, 729) in the λ-family: pairs whose
    /// 2-class and 3-class match λ exactly.
    pub fn family_size(&self, lam: Lambda) -> u64 {
        let n2 = match lam {
            Lambda::One | Lambda::InvThree12 => self.counts64[0],
            _ => self.counts64[1],
        };
        let n3 = match lam {
            Lambda::One | Lambda::InvTwo12 => self.counts729[0],
            _ => self.counts729[1],
        };
        n2 * n3
    }
}

static TABLES: OnceLock<ClassTables> = OnceLock::new();

pub fn class_tables() -> &'static ClassTables {
    TABLES.get_or_init(ClassTables::build)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kraus_at_2_ground_truth() {
        let cases: [((i64, i64), bool); 18] = [
            ((0, 16), true),
            ((0, 432), false),
            ((0, -432), true),
            ((-432, 8208), true),
            ((16, 64), true),
            ((-1, 0), false),
            ((0, 2), false),
            ((1, 1), false),
            ((0, 8), false),
            ((0, 64), true),
            ((0, -64), true),
            ((4, 16), false),
            ((-16, 32), false),
            ((0, 24), false),
            ((32, 8), false),
            ((0, 40), false),
            ((48, 24), false),
            ((-48, 128), true),
        ];
        for ((a, b), want) in cases {
            assert_eq!(nonminimal_at_2(a, b), want, "({a}, {b})");
        }
    }

    #[test]
    fn kraus_at_3_ground_truth() {
        let cases: [((i64, i64), bool); 10] = [
            ((54, 189), true),
            ((0, 27), false),
            ((0, 729), true),
            ((27, 27), false),
            ((-27, 54), true),
            ((0, -27), false),
            ((-432, 8208), true),
            ((27, 243), false),
            ((135, 189), false),
            ((54, 54), false),
        ];
        for ((a, b), want) in cases {
            assert_eq!(nonminimal_at_3(a, b), want, "({a}, {b})");
        }
    }

    #[test]
    fn class_table_counts() {
        let t = class_tables();
        assert_eq!(t.counts_at_2(), [4080, 12, 4]);
        assert_eq!(t.counts_at_3(), [531414, 18, 9]);
        assert_eq!(t.family_size(Lambda::One), 2168169120);
        assert_eq!(t.family_size(Lambda::InvTwo12), 6376968);
        assert_eq!(t.family_size(Lambda::InvThree12), 73440);
        assert_eq!(t.family_size(Lambda::InvSix12), 216);
    }

    #[test]
    fn class_table_residue_lists() {
        let t = class_tables();
        assert_eq!(
            t.nonminimal_residues_at_2(),
            &[
                (0, 16),
                (5, 22),
                (13, 14),
                (16, 16),
                (21, 38),
                (29, 30),
                (32, 16),
                (37, 54),
                (45, 46),
                (48, 16),
                (53, 6),
                (61, 62)
            ]
        );
        assert_eq!(
            t.nonminimal_residues_at_3(),
            &[
                (54, 189),
                (54, 540),
                (135, 297),
                (135, 432),
                (216, 54),
                (216, 675),
                (297, 189),
                (297, 540),
                (378, 297),
                (378, 432),
                (459, 54),
                (459, 675),
                (540, 189),
                (540, 540),
                (621, 297),
                (621, 432),
                (702, 54),
                (702, 675)
            ]
        );
    }

    #[test]
    fn lambda_of_known_curves() {
        assert_eq!(lambda_class(-1, 0).unwrap(), Lambda::One);
        assert_eq!(lambda_class(1, 1).unwrap(), Lambda::One);
        assert_eq!(lambda_class(0, 432).unwrap(), Lambda::One);
        assert_eq!(lambda_class(0, 16).unwrap(), Lambda::InvTwo12);
        assert_eq!(lambda_class(0, -432).unwrap(), Lambda::InvTwo12);
        assert_eq!(lambda_class(54, 189).unwrap(), Lambda::InvThree12);
        assert_eq!(lambda_class(-432, 8208).unwrap(), Lambda::InvSix12);
        assert!(matches!(lambda_class(16, 64), Err(Error::Domain(_))));
    }

    #[test]
    fn weak_minimality_and_reduction() {
        assert!(is_weakly_minimal(1, 1));
        assert!(is_weakly_minimal(54, 189));
        assert!(!is_weakly_minimal(16, 64));
        assert!(!is_weakly_minimal(0, 64));
        assert!(!is_weakly_minimal(64, 0));
        assert!(!is_weakly_minimal(0, 0));

        assert_eq!(reduce_pair(16, 64).unwrap(), (1, 1, 2));
        assert_eq!(reduce_pair(0, 64).unwrap(), (0, 1, 2));
        assert_eq!(reduce_pair(16, 0).unwrap(), (1, 0, 2));
        assert_eq!(reduce_pair(1296, 0).unwrap(), (1, 0, 6));
        assert_eq!(reduce_pair(54, 189).unwrap(), (54, 189, 1));
        assert_eq!(reduce_pair(-1 * 16 * 81, 0).unwrap(), (-1, 0, 6));
        assert!(matches!(reduce_pair(0, 0), Err(Error::Singular(_))));
    }

    #[test]
    fn minimal_discriminants() {
        assert_eq!(minimal_discriminant(-1, 0).unwrap(), 64);
        assert_eq!(minimal_discriminant(-16, 0).unwrap(), 64);
        assert_eq!(minimal_discriminant(0, 16).unwrap(), -27);
        assert_eq!(minimal_discriminant(0, -16).unwrap(), -110592);
        assert_eq!(minimal_discriminant(-432, 8208).unwrap(), -11);
        assert_eq!(minimal_discriminant(0, 432 * 64).unwrap(), -16 * 27 * 432 * 432);
    }

    #[test]
    fn predicates_are_residue_functions() {
        // The mod-64 / mod-729 tables agree with the predicates on shifted
        // representatives, including d⁴, d⁶ twists reduced through i128.
        let t = class_tables();
        for d in [1i128, 5, 7, 11] {
            let d4 = d.pow(4);
            let d6 = d.pow(6);
            for (a, b) in [(0i64, 16i64), (5, 22), (1, 1), (54, 189), (-432, 8208), (7, -3)] {
                let (ta, tb) =
                    ((d4 * a as i128).rem_euclid(64), (d6 * b as i128).rem_euclid(64));
                let cls2 = t.at_2(ta as usize, tb as usize);
                if cls2 != PrimeClass::NonWeaklyMinimal {
                    assert_eq!(
                        nonminimal_at_2(ta as i64, tb as i64),
                        cls2 == PrimeClass::Nonminimal,
                        "twist d={d} of ({a},{b}) at 2"
                    );
                }
                let (ua, ub) =
                    ((d4 * a as i128).rem_euclid(729), (d6 * b as i128).rem_euclid(729));
                let cls3 = t.at_3(ua as usize, ub as usize);
                if cls3 != PrimeClass::NonWeaklyMinimal {
                    assert_eq!(
                        nonminimal_at_3(ua as i64, ub as i64),
                        cls3 == PrimeClass::Nonminimal,
                        "twist d={d} of ({a},{b}) at 3"
                    );
                }
            }
        }
        // Lifting by the modulus never changes the class.
        for (a, b) in [(3i64, 5i64), (0, 16), (54, 189), (-432, 8208)] {
            for k in 1..4i64 {
                assert_eq!(nonminimal_at_2(a, b), nonminimal_at_2(a + 64 * k, b - 64 * k * 7));
                assert_eq!(nonminimal_at_3(a, b), nonminimal_at_3(a + 729 * k, b - 729 * k * 2));
            }
        }
    }

    #[test]
    fn naive_heights() {
        assert_eq!(naive_height(-2, 3).unwrap(), 9);
        assert_eq!(naive_height(-3, 1).unwrap(), 27);
        assert_eq!(naive_height(0, 0).unwrap(), 0);
        assert_eq!(naive_height(-5, 11).unwrap(), 125);
    }
}
