//! The short-sum estimate machinery: hypothesis checks, bound values,
//! admissible exponent windows, the exponent chain, and empirical short-sum
//! scans at desk scale.
//!
//! The estimate is N exp(-gamma2 (log N)^3 / (log q)^2) for short Kloosterman
//! sums of N terms, valid once N clears max(p^15, exp(gamma1 (log q)^(2/3)));
//! that threshold exceeds 2^63 for every 64-bit modulus, so the desk-scale
//! calculator reports the hypothesis honestly as unsatisfied and the scan
//! compares against the square-root cancellation reference instead.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed};
use rayon::prelude::*;

use crate::detsum::{bounded, tree_sum_complex};
use crate::error::{Error, Result};
use crate::kloosterman::SumContext;
use crate::modarith::{PrimePowerModulus, UnitResidue};
use crate::path::index_map;

/// The two constants of the short-sum estimate.
pub struct KorolevConstants;

impl KorolevConstants {
    pub const GAMMA1: u64 = 900;
    /// gamma2 = 160^(-4), kept as the exact rational 1/655360000 and
    /// converted to floating point only at comparison time.
    pub const GAMMA2_NUM: u64 = 1;
    pub const GAMMA2_DEN: u64 = 655_360_000;

    pub fn gamma2() -> f64 {
        Self::GAMMA2_NUM as f64 / Self::GAMMA2_DEN as f64
    }

    fn gamma2_rational() -> BigRational {
        BigRational::new(BigInt::from(Self::GAMMA2_NUM), BigInt::from(Self::GAMMA2_DEN))
    }
}

/// The admissible range (0, delta_max] of the interval-length exponent:
/// delta_max = min(gamma2 n / 16, n/2 - 15), nonempty exactly when n >= 31.
#[derive(Clone, Copy, Debug)]
pub struct DeltaWindow {
    pub n: u32,
    pub delta_max: f64,
}

/// Hypothesis of the short-sum estimate:
/// max(p^15, exp(gamma1 (log q)^(2/3))) <= N <= p^(n/2).
///
/// The power comparisons are exact integer arithmetic; the exponential term
/// is compared through logarithms.
pub fn korolev_condition(len: u64, m: &PrimePowerModulus) -> bool {
    if len == 0 {
        return false;
    }
    // N^2 <= q, exactly
    let upper_ok = (len as u128) * (len as u128) <= m.q() as u128;
    if !upper_ok {
        return false;
    }
    // p^15 <= N, exactly; overflow of p^15 past u128 implies p^15 > N
    let p15_ok = match checked_pow_u128(m.p(), 15) {
        Some(p15) => p15 <= len as u128,
        None => false,
    };
    if !p15_ok {
        return false;
    }
    // exp(gamma1 (log q)^(2/3)) <= N   <=>   gamma1 (log q)^(2/3) <= log N
    let log_q = (m.q() as f64).ln();
    KorolevConstants::GAMMA1 as f64 * log_q.powf(2.0 / 3.0) <= (len as f64).ln()
}

fn checked_pow_u128(base: u64, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

/// Value of the short-sum bound N exp(-gamma2 (log N)^3 / (log q)^2), with
/// the prefactor 4 of the unconditional corollary when requested (requires
/// n >= 31).
pub fn korolev_bound(len: u64, m: &PrimePowerModulus, factor4: bool) -> Result<f64> {
    if factor4 && m.n() < 31 {
        return Err(Error::FactorFourRequiresN31(m.n()));
    }
    let prefactor = if factor4 { 4.0 } else { 1.0 };
    let log_n = (len as f64).ln();
    let log_q = (m.q() as f64).ln();
    Ok(prefactor * len as f64 * (-KorolevConstants::gamma2() * log_n.powi(3) / log_q.powi(2)).exp())
}

/// Admissible delta window for the exponent n; empty (an error) for n <= 30.
pub fn delta_admissible_for(n: u32) -> Result<DeltaWindow> {
    if n <= 30 {
        return Err(Error::EmptyDeltaWindow(n));
    }
    // gamma2 n / 16 = n / 10485760000, rounded toward zero so that the
    // returned f64 never exceeds the exact value
    let den = 16u64 * KorolevConstants::GAMMA2_DEN;
    let mut branch_small = n as f64 / den as f64;
    let exact = BigRational::new(BigInt::from(n), BigInt::from(den));
    if let Some(repr) = BigRational::from_float(branch_small) {
        if repr > exact {
            branch_small = f64::from_bits(branch_small.to_bits() - 1);
        }
    }
    let branch_large = n as f64 / 2.0 - 15.0;
    Ok(DeltaWindow { n, delta_max: branch_small.min(branch_large) })
}

/// Admissible delta window of a concrete modulus.
pub fn delta_admissible(m: &PrimePowerModulus) -> Result<DeltaWindow> {
    delta_admissible_for(m.n())
}

/// The chained inequality delta/n <= gamma2/8 - delta/n <= gamma2 ((n/2 -
/// delta)/n)^3, evaluated in exact rational arithmetic (an f64 is an exact
/// rational). Nonpositive or non-finite delta reports false.
pub fn exponent_chain_check_for(n: u32, delta: f64) -> bool {
    let Some(d) = BigRational::from_float(delta) else {
        return false;
    };
    if !d.is_positive() {
        return false;
    }
    let n_rat = BigRational::from_u32(n).expect("integer");
    let gamma2 = KorolevConstants::gamma2_rational();
    let left = &d / &n_rat;
    let mid = &gamma2 / BigRational::from_u32(8).unwrap() - &left;
    let half_n = &n_rat / BigRational::from_u32(2).unwrap();
    let ratio = (&half_n - &d) / &n_rat;
    let right = &gamma2 * (&ratio * &ratio * &ratio);
    left <= mid && mid <= right
}

/// Chain check against a concrete modulus.
pub fn exponent_chain_check(delta: f64, m: &PrimePowerModulus) -> bool {
    exponent_chain_check_for(m.n(), delta)
}

/// Empirical short-sum scan: for each start c and a sample of units a, the
/// modulus of the unnormalized sum over units x in (c, c + N], compared to
/// the trivial bound N, the square-root reference, and the (hypothetical)
/// estimate value.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ShortSumReport {
    pub p: u64,
    pub n: u32,
    pub length: u64,
    pub starts: Vec<u64>,
    pub units_sampled: u64,
    pub max_abs: f64,
    pub mean_abs: f64,
    /// max_abs / N
    pub ratio_to_trivial: f64,
    /// max_abs / sqrt(N)
    pub ratio_to_sqrt: f64,
    /// Bound value were the hypothesis granted; it never is at desk scale.
    pub korolev_value: f64,
    pub korolev_condition: bool,
}

pub fn short_sum_scan(
    ctx: &SumContext,
    b: &UnitResidue,
    length: u64,
    starts: &[u64],
    unit_sample: u64,
    seed: u64,
) -> Result<ShortSumReport> {
    let m = *ctx.modulus();
    let sweep = ctx.sweep(b)?;
    let units = sample_units(&m, unit_sample, seed)?;
    let pairs: Vec<(u64, u64)> = units
        .iter()
        .flat_map(|&a| starts.iter().map(move |&c| (a, c)))
        .collect();
    let magnitudes: Vec<f64> = pairs
        .par_chunks(256)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&(a, c)| {
                    let a = UnitResidue::new(a, &m).expect("sampled from the unit group");
                    sweep.short_sum_complex(&a, c, length).expect("validated").norm()
                })
                .collect::<Vec<f64>>()
        })
        .flatten_iter()
        .collect();
    let max_abs = magnitudes.iter().cloned().fold(0.0, f64::max);
    // fixed-order blocked mean for thread-count independence
    let sum = tree_sum_complex(
        magnitudes
            .chunks(1024)
            .map(|c| num_complex::Complex64::new(c.iter().sum(), 0.0))
            .collect(),
    )
    .re;
    let mean_abs = sum / magnitudes.len() as f64;
    Ok(ShortSumReport {
        p: m.p(),
        n: m.n(),
        length,
        starts: starts.to_vec(),
        units_sampled: units.len() as u64,
        max_abs,
        mean_abs,
        ratio_to_trivial: max_abs / length as f64,
        ratio_to_sqrt: max_abs / (length as f64).sqrt(),
        korolev_value: korolev_bound(length, &m, false)?,
        korolev_condition: korolev_condition(length, &m),
    })
}

/// Deterministic sample of distinct units (all of them when the request
/// covers the group).
fn sample_units(m: &PrimePowerModulus, count: u64, seed: u64) -> Result<Vec<u64>> {
    let phi = m.phi();
    if count >= phi {
        return Ok(crate::modarith::units_iter(*m).map(|u| u.value()).collect());
    }
    let mut chosen = vec![false; phi as usize];
    let mut out = Vec::with_capacity(count as usize);
    let mut state = seed ^ 0xC0DE_5EED;
    while (out.len() as u64) < count {
        let rank = bounded(&mut state, phi) + 1;
        if !chosen[rank as usize - 1] {
            chosen[rank as usize - 1] = true;
            out.push(index_map(rank, m)?);
        }
    }
    out.sort_unstable();
    Ok(out)
}
