//! Quadratic symbols, arithmetic sieves, twist-index decomposition, and the
//! Gauss-type sums G_m(k) evaluated two independent ways.
//!
//! G_m(k) for odd k is the twisted character sum
//!   G_m(k) = ((1-i)/2 + (-1/k)(1+i)/2) * sum_{a mod k} (a/k) e(am/k),
//! which is real-valued, jointly multiplicative in coprime moduli, and has an
//! exact prime-power evaluation: with p^a || m (a = infinity for m = 0),
//!   G_m(p^b) = 0                 if b <= a odd,
//!              phi(p^b)          if b <= a even,
//!              -p^a              if b = a+1 even,
//!              (mp^{-a}|p) p^a sqrt(p)  if b = a+1 odd,
//!              0                 if b >= a+2.
//! The closed evaluator carries c*sqrt(r) exactly (r squarefree) so equality
//! tests do not depend on sqrt rounding; a numeric mirror backs cross-checks
//! against the brute-force sum.

use crate::hecke::HeckeForm;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CharError {
    #[error("modulus must be odd and positive, got {0}")]
    BadModulus(u64),
    #[error("d must be odd, positive and square-free, got {0}")]
    BadFundamental(u64),
    #[error("twist must be odd and positive, got {0}")]
    BadTwist(u64),
    #[error("modulus {0} exceeds brute-force bound {1}")]
    BruteForceBound(u64, u64),
    #[error("failed to factor {0} by trial division below {1}")]
    FactorBound(u64, u64),
    #[error("integer overflow combining local Gauss factors for k={0}")]
    Overflow(u64),
    #[error("prime sum limit {0} exceeds sieve tables (len {1})")]
    SieveRange(u64, usize),
}

/// Default cap for the literal Gauss-sum evaluation.
pub const BRUTE_FORCE_BOUND: u64 = 10_000;
/// Trial-division ceiling used by the closed evaluator and twist factoring.
pub const FACTOR_BOUND: u64 = 10_000_000;

/// Jacobi symbol (a/k) for odd positive k, by the binary reciprocity
/// algorithm; O(log a log k). Accepts any integer a.
pub fn jacobi(a: i64, k: u64) -> Result<i32, CharError> {
    if k == 0 || k % 2 == 0 {
        return Err(CharError::BadModulus(k));
    }
    let mut n = k;
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut t = 1i32;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    Ok(if n == 1 { t } else { 0 })
}

/// chi_8d(n) = (8d/n), the real character attached to the modulus 8d.
/// Completely multiplicative in n; zero exactly when gcd(n, 8d) > 1.
pub fn chi8d(d: u64, n: u64) -> Result<i32, CharError> {
    check_fundamental(d)?;
    if n % 2 == 0 {
        return Ok(0);
    }
    // (8d/n) for odd n reduces to the Jacobi symbol with top 8d.
    jacobi((8 * d % n.max(1)) as i64, n)
}

/// d must be odd, positive and square-free for chi_8d to range over the
/// family of interest.
pub fn check_fundamental(d: u64) -> Result<(), CharError> {
    if d == 0 || d % 2 == 0 || !is_squarefree(d)? {
        return Err(CharError::BadFundamental(d));
    }
    Ok(())
}

fn is_squarefree(mut n: u64) -> Result<bool, CharError> {
    let orig = n;
    let mut p = 2u64;
    while p * p <= n {
        if p > FACTOR_BOUND {
            return Err(CharError::FactorBound(orig, FACTOR_BOUND));
        }
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Ok(false);
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    Ok(true)
}

/// Square-free bitmap, Moebius, totient, smallest-prime-factor table and the
/// prime list up to `limit`, from one linear sieve.
pub struct SieveTables {
    pub limit: usize,
    pub squarefree: Vec<bool>,
    pub moebius: Vec<i8>,
    pub totient: Vec<u32>,
    pub spf: Vec<u32>,
    pub primes: Vec<u32>,
}

pub fn sieve_tables(limit: usize) -> SieveTables {
    assert!(limit >= 1, "sieve limit must be positive");
    let n = limit + 1;
    let mut spf = vec![0u32; n];
    let mut moebius = vec![0i8; n];
    let mut totient = vec![0u32; n];
    let mut primes: Vec<u32> = Vec::new();
    if n > 1 {
        moebius[1] = 1;
        totient[1] = 1;
        spf[1] = 1;
    }
    for i in 2..n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            moebius[i] = -1;
            totient[i] = (i - 1) as u32;
            primes.push(i as u32);
        }
        for &p in &primes {
            let p = p as usize;
            if p > spf[i] as usize || i * p >= n {
                break;
            }
            let ip = i * p;
            spf[ip] = p as u32;
            if i % p == 0 {
                moebius[ip] = 0;
                totient[ip] = totient[i] * p as u32;
            } else {
                moebius[ip] = -moebius[i];
                totient[ip] = totient[i] * (p - 1) as u32;
            }
        }
    }
    let squarefree = moebius.iter().map(|&m| m != 0).collect();
    SieveTables {
        limit,
        squarefree,
        moebius,
        totient,
        spf,
        primes,
    }
}

/// Literal evaluation of G_m(k): prefactor times the full a-sum. Quadratic in
/// k, capped to keep it an oracle rather than a production path.
pub fn gauss_sum_bruteforce(m: i64, k: u64) -> Result<Complex64, CharError> {
    gauss_sum_bruteforce_bounded(m, k, BRUTE_FORCE_BOUND)
}

pub fn gauss_sum_bruteforce_bounded(m: i64, k: u64, bound: u64) -> Result<Complex64, CharError> {
    if k == 0 || k % 2 == 0 {
        return Err(CharError::BadModulus(k));
    }
    if k > bound {
        return Err(CharError::BruteForceBound(k, bound));
    }
    let minus_one = jacobi(-1, k)? as f64;
    let pref = Complex64::new(0.5, -0.5) + minus_one * Complex64::new(0.5, 0.5);
    let mut sum = Complex64::new(0.0, 0.0);
    let mk = m.rem_euclid(k as i64) as u64;
    for a in 0..k {
        let sym = jacobi(a as i64, k)?;
        if sym == 0 {
            continue;
        }
        // e(am/k) with the exponent reduced mod k to keep the angle small
        let phase = 2.0 * PI * ((a as u128 * mk as u128 % k as u128) as f64) / k as f64;
        sum += sym as f64 * Complex64::new(phase.cos(), phase.sin());
    }
    Ok(pref * sum)
}

/// Exact value of a Gauss sum: c * sqrt(r) with r squarefree (r = 1 gives an
/// integer; c = 0 gives zero). Products of local values stay in this shape
/// because distinct primes contribute distinct sqrt factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GaussExact {
    Zero,
    IntSqrt { c: i128, r: u64 },
}

impl GaussExact {
    pub fn to_f64(&self) -> f64 {
        match *self {
            GaussExact::Zero => 0.0,
            GaussExact::IntSqrt { c, r } => c as f64 * (r as f64).sqrt(),
        }
    }

    fn mul(&self, other: &GaussExact, k: u64) -> Result<GaussExact, CharError> {
        match (self, other) {
            (GaussExact::Zero, _) | (_, GaussExact::Zero) => Ok(GaussExact::Zero),
            (GaussExact::IntSqrt { c: c1, r: r1 }, GaussExact::IntSqrt { c: c2, r: r2 }) => {
                // locals come from distinct primes, so radicands are coprime
                let c = c1.checked_mul(*c2).ok_or(CharError::Overflow(k))?;
                let r = r1.checked_mul(*r2).ok_or(CharError::Overflow(k))?;
                Ok(GaussExact::IntSqrt { c, r })
            }
        }
    }
}

/// Closed-form Gauss sum: exact tagged value plus a numeric mirror.
#[derive(Clone, Debug)]
pub struct GaussSumValue {
    pub exact: GaussExact,
    pub numeric: Complex64,
}

/// Evaluates G_m(k) by factoring k and applying the prime-power table, then
/// multiplying local values (valid since G is multiplicative in coprime
/// moduli). m = 0 is the a = infinity column: G_0(k) = phi(k) for square k,
/// else 0.
pub fn gauss_sum_closed(m: i64, k: u64) -> Result<GaussSumValue, CharError> {
    if k == 0 || k % 2 == 0 {
        return Err(CharError::BadModulus(k));
    }
    let factors = factor(k)?;
    let mut exact = GaussExact::IntSqrt { c: 1, r: 1 };
    for &(p, b) in &factors {
        let local = gauss_local(m, p, b)?;
        exact = exact.mul(&local, k)?;
    }
    let numeric = Complex64::new(exact.to_f64(), 0.0);
    Ok(GaussSumValue { exact, numeric })
}

/// G_m(p^b) per the five-case table; `a` below is the p-adic valuation of m.
fn gauss_local(m: i64, p: u64, b: u32) -> Result<GaussExact, CharError> {
    debug_assert!(b >= 1);
    let (a, cofactor) = if m == 0 {
        (u32::MAX, 0i64) // a = infinity
    } else {
        let mut a = 0u32;
        let mut m_abs = m.unsigned_abs();
        while m_abs % p == 0 {
            m_abs /= p;
            a += 1;
        }
        let sign = if m < 0 { -1i64 } else { 1 };
        (a, sign * m_abs as i64)
    };
    if b <= a {
        return Ok(if b % 2 == 1 {
            GaussExact::Zero
        } else {
            // phi(p^b)
            let pb1 = (p as i128).checked_pow(b - 1).ok_or(CharError::Overflow(p))?;
            GaussExact::IntSqrt {
                c: pb1 * (p as i128 - 1),
                r: 1,
            }
        });
    }
    if b == a + 1 {
        let pa = (p as i128).checked_pow(a).ok_or(CharError::Overflow(p))?;
        return Ok(if b % 2 == 0 {
            GaussExact::IntSqrt { c: -pa, r: 1 }
        } else {
            let sym = jacobi(cofactor, p)?;
            if sym == 0 {
                GaussExact::Zero
            } else {
                GaussExact::IntSqrt {
                    c: sym as i128 * pa,
                    r: p,
                }
            }
        });
    }
    Ok(GaussExact::Zero) // b >= a + 2
}

fn factor(mut n: u64) -> Result<Vec<(u64, u32)>, CharError> {
    let orig = n;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if p > FACTOR_BOUND {
            return Err(CharError::FactorBound(orig, FACTOR_BOUND));
        }
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    Ok(out)
}

/// Decomposition of an odd twist l = l1 * l2^2 with l1 square-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistIndex {
    pub l: u64,
    pub l1: u64,
    pub l2: u64,
    /// (p, l_p) with p^{l_p} exactly dividing l.
    pub prime_factors: Vec<(u64, u32)>,
}

pub fn twist_index(l: u64) -> Result<TwistIndex, CharError> {
    if l == 0 || l % 2 == 0 {
        return Err(CharError::BadTwist(l));
    }
    let prime_factors = factor(l)?;
    let mut l1 = 1u64;
    let mut l2 = 1u64;
    for &(p, e) in &prime_factors {
        if e % 2 == 1 {
            l1 *= p;
        }
        for _ in 0..e / 2 {
            l2 *= p;
        }
    }
    Ok(TwistIndex {
        l,
        l1,
        l2,
        prime_factors,
    })
}

/// Primes p | l1 where 1 + lambda_f(p) + 1/p is within tol of zero. The main
/// term divides by this combination, so any hit must make prediction refuse.
pub fn condition_check(ti: &TwistIndex, form: &HeckeForm, tol: f64) -> Vec<u64> {
    ti.prime_factors
        .iter()
        .filter(|&&(p, e)| e % 2 == 1)
        .filter(|&&(p, _)| (1.0 + form.lambda(p) + 1.0 / p as f64).abs() <= tol)
        .map(|&(p, _)| p)
        .collect()
}

/// Scans all primes up to `bound` for near-violations of the same condition.
pub fn condition_scan(form: &HeckeForm, bound: u64, tol: f64) -> Vec<u64> {
    let mut hits = Vec::new();
    let tables = sieve_tables(bound as usize);
    for &p in &tables.primes {
        if p == 2 {
            continue;
        }
        let p = p as u64;
        if (1.0 + form.lambda(p) + 1.0 / p as f64).abs() <= tol {
            hits.push(p);
        }
    }
    hits
}

/// Row of chi_8d(n) values for n = 0..=n_max, built multiplicatively: one
/// reciprocity-reduced symbol per prime, smallest-prime-factor products for
/// composites. This is the per-discriminant kernel the family sweep leans on.
pub struct ChiRow {
    pub d: u64,
    values: Vec<i8>,
}

impl ChiRow {
    #[inline]
    pub fn get(&self, n: usize) -> i8 {
        self.values[n]
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }
}

/// Jacobi symbols (r/d) for r = 0..d, sieved multiplicatively in r.
pub fn jacobi_row_mod(d: u64, tables: &SieveTables) -> Result<Vec<i8>, CharError> {
    if d == 0 || d % 2 == 0 {
        return Err(CharError::BadModulus(d));
    }
    let du = d as usize;
    assert!(du <= tables.limit, "jacobi row needs spf up to d");
    let mut row = vec![0i8; du.max(2)];
    if du == 1 {
        row[0] = 1; // (0/1) = 1: the trivial modulus
        return Ok(row);
    }
    row[1] = 1;
    for r in 2..du {
        let p = tables.spf[r] as usize;
        row[r] = if p == r {
            jacobi(r as i64, d)? as i8
        } else {
            row[p] * row[r / p]
        };
    }
    Ok(row)
}

/// Builds chi_8d(0..=n_max). For odd prime p coprime to d the symbol comes
/// from (8d/p) = (2/p)(d/p) and quadratic reciprocity against the precomputed
/// residue row mod d; composites multiply along smallest prime factors.
pub fn chi_row(d: u64, n_max: usize, tables: &SieveTables) -> Result<ChiRow, CharError> {
    check_fundamental(d)?;
    assert!(n_max <= tables.limit, "chi row needs spf up to n_max");
    let row_mod_d = jacobi_row_mod(d, tables)?;
    let mut values = vec![0i8; n_max + 1];
    if n_max >= 1 {
        values[1] = 1;
    }
    // (-1)^{(d-1)/2} drives the reciprocity sign for d = 3 mod 4
    let d_is_3_mod_4 = d % 4 == 3;
    for n in (3..=n_max).step_by(2) {
        let p = tables.spf[n] as usize;
        if p == n {
            // prime: (8d/p) = (2/p) * (d/p); (d/p) = +-(p mod d / d)
            let two_sym: i8 = match n % 8 {
                1 | 7 => 1,
                3 | 5 => -1,
                _ => unreachable!(),
            };
            let mut sym = two_sym * row_mod_d[n % d as usize];
            if d_is_3_mod_4 && n % 4 == 3 {
                sym = -sym;
            }
            values[n] = sym;
        } else {
            values[n] = values[p] * values[n / p];
        }
    }
    Ok(ChiRow { d, values })
}

/// One comparison row for the Gauss verification grid.
#[derive(Clone, Debug)]
pub struct GaussVerifyRow {
    pub m: i64,
    pub k: u64,
    pub closed: f64,
    pub brute: f64,
    pub delta: f64,
}

/// Closed-vs-brute comparison over all odd k <= k_max, |m| <= m_max.
pub fn gauss_verify_grid(k_max: u64, m_max: i64) -> Result<Vec<GaussVerifyRow>, CharError> {
    let mut rows = Vec::new();
    for k in (1..=k_max).step_by(2) {
        for m in -m_max..=m_max {
            let closed = gauss_sum_closed(m, k)?;
            let brute = gauss_sum_bruteforce(m, k)?;
            let delta = (closed.numeric - brute).norm();
            rows.push(GaussVerifyRow {
                m,
                k,
                closed: closed.exact.to_f64(),
                brute: brute.re,
                delta,
            });
        }
    }
    Ok(rows)
}
