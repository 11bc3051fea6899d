//! Statistical verification harness: exact moment averages over the unit
//! group, tightness-exponent scans, law-comparison diagnostics, and sup-norm
//! statistics.
//!
//! Moments are always exact averages over ALL units a — never a subsample —
//! computed from per-a prefix passes with a fixed-order reduction, so results
//! are bit-identical for any thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bounds::delta_admissible_for;
use crate::detsum::{bounded, stream_key};
use crate::error::{Error, Result};
use crate::kloosterman::SumContext;
use crate::limitlaw::{LimitSeriesSample, MuSampler};
use crate::modarith::{units_iter, UnitResidue};
use crate::path::{PathFunction, RationalTime};
use crate::report::{
    BoundViolation, CdfSummary, GapSummary, KsPoint, LawComparisonReport, ModulusInfo,
    MomentEntry, MomentReport, SupReport, VERSION,
};

/// Units processed per parallel work item; results are combined in chunk
/// order.
const UNIT_CHUNK: usize = 1024;

/// Threshold below which a full sum counts as vanishing.
pub const ZERO_MASS_EPS: f64 = 1e-9;

/// The moment functional: the average over all units a of
/// |path_a(t) - path_a(s)|^alpha, for even alpha >= 2 and s <= t.
pub fn moment(
    s: RationalTime,
    t: RationalTime,
    alpha: u32,
    b0: &UnitResidue,
    ctx: &SumContext,
) -> Result<f64> {
    Ok(moment_batch(&[(s, t)], alpha, b0, ctx)?[0])
}

/// Moments for many (s, t) pairs in one sweep over the unit group: each path
/// is built once (O(q)) and evaluated at every pair (O(1) each).
pub fn moment_batch(
    pairs: &[(RationalTime, RationalTime)],
    alpha: u32,
    b0: &UnitResidue,
    ctx: &SumContext,
) -> Result<Vec<f64>> {
    if alpha == 0 || !alpha.is_multiple_of(2) {
        return Err(Error::InvalidMomentOrder(alpha));
    }
    for (s, t) in pairs {
        if s.cmp_exact(t) == std::cmp::Ordering::Greater {
            return Err(Error::IntervalOrder);
        }
    }
    let m = *ctx.modulus();
    let sweep = ctx.sweep(b0)?;
    let units: Vec<u64> = units_iter(m).map(|u| u.value()).collect();
    let half = (alpha / 2) as i32;
    let chunk_sums: Vec<Vec<f64>> = units
        .par_chunks(UNIT_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0f64; pairs.len()];
            for &a in chunk {
                let a = UnitResidue::new(a, &m).expect("unit enumeration");
                let path = PathFunction::new(sweep.partial_sums(&a).expect("validated"));
                for (slot, (s, t)) in acc.iter_mut().zip(pairs.iter()) {
                    let d = path.eval(*t).expect("valid time") - path.eval(*s).expect("valid time");
                    *slot += d.norm_sqr().powi(half);
                }
            }
            acc
        })
        .collect();
    let mut totals = vec![0.0f64; pairs.len()];
    for chunk in &chunk_sums {
        for (total, v) in totals.iter_mut().zip(chunk.iter()) {
            *total += v;
        }
    }
    let phi = m.phi() as f64;
    Ok(totals.into_iter().map(|v| v / phi).collect())
}

/// Configuration of a tightness scan.
#[derive(Clone, Debug)]
pub struct TightnessScanConfig {
    /// Even moment order >= 2.
    pub alpha: u32,
    /// Gap grid, each gap in (0, 1].
    pub gaps: Vec<f64>,
    /// Random (s, t) placements per gap.
    pub samples_per_gap: u32,
    /// Times live on the grid with denominator (phi - 1) * grid_factor.
    pub grid_factor: u64,
    pub seed: u64,
}

impl Default for TightnessScanConfig {
    fn default() -> Self {
        Self { alpha: 4, gaps: Vec::new(), samples_per_gap: 32, grid_factor: 64, seed: 1 }
    }
}

/// Log-spaced gap grid in [lo, hi].
pub fn log_gap_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 1 && lo > 0.0 && hi >= lo);
    if count == 1 {
        return vec![lo];
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Scan the moment functional over a gap grid: random placements per gap,
/// exact averaging over all units, a log-log slope fit over per-gap means,
/// and exact small-gap bound flags.
pub fn tightness_scan(
    ctx: &SumContext,
    b0: &UnitResidue,
    cfg: &TightnessScanConfig,
) -> Result<MomentReport> {
    let m = *ctx.modulus();
    let segments = m.phi() - 1;
    let den = segments
        .checked_mul(cfg.grid_factor.max(1))
        .ok_or(Error::InvalidTime { num: 0, den: 0 })?;
    let mut state = cfg.seed ^ 0x7161_7074;
    let mut pairs: Vec<(RationalTime, RationalTime)> = Vec::new();
    let mut exact_gaps: Vec<u64> = Vec::new();
    for &gap in &cfg.gaps {
        let gap_num = ((gap * den as f64).round() as u64).clamp(1, den);
        exact_gaps.push(gap_num);
        for _ in 0..cfg.samples_per_gap {
            let s_num = bounded(&mut state, den - gap_num + 1);
            pairs.push((
                RationalTime::new(s_num, den)?,
                RationalTime::new(s_num + gap_num, den)?,
            ));
        }
    }
    let values = moment_batch(&pairs, cfg.alpha, b0, ctx)?;

    let mut moments = Vec::with_capacity(pairs.len());
    let mut violations = Vec::new();
    for ((s, t), &m_alpha) in pairs.iter().zip(values.iter()) {
        let gap = (t.num() - s.num()) as f64 / den as f64;
        moments.push(MomentEntry { s: s.as_f64(), t: t.as_f64(), gap, m_alpha });
        // the exact small-gap bound applies when (phi - 1)(t - s) <= 1
        if (t.num() - s.num()) as u128 * segments as u128 <= den as u128 {
            let bound = 2f64.powi(cfg.alpha as i32) * gap.powf(cfg.alpha as f64 / 2.0);
            if m_alpha > bound {
                violations.push(BoundViolation { s: s.as_f64(), t: t.as_f64(), gap, m_alpha, bound });
            }
        }
    }

    let mut gaps = Vec::with_capacity(cfg.gaps.len());
    let mut fit_points = Vec::new();
    for (gi, &gap_num) in exact_gaps.iter().enumerate() {
        let lo = gi * cfg.samples_per_gap as usize;
        let slice = &values[lo..lo + cfg.samples_per_gap as usize];
        let zero_samples = slice.iter().filter(|v| **v == 0.0).count() as u32;
        let mean = slice.iter().sum::<f64>() / slice.len().max(1) as f64;
        let gap = gap_num as f64 / den as f64;
        let mean_m_alpha = if mean > 0.0 { Some(mean) } else { None };
        if let Some(mm) = mean_m_alpha {
            fit_points.push((gap.ln(), mm.ln()));
        }
        gaps.push(GapSummary { gap, mean_m_alpha, samples: cfg.samples_per_gap, zero_samples });
    }

    let fitted_slope = fit_slope(&fit_points);
    let predicted_beta = delta_admissible_for(m.n())
        .ok()
        .and_then(|w| beta_parameter(m.n(), w.delta_max, cfg.alpha as u64).ok());

    Ok(MomentReport {
        modulus: ModulusInfo { p: m.p(), n: m.n() },
        b0: b0.value(),
        alpha: cfg.alpha,
        gaps,
        moments,
        fitted_slope,
        predicted_beta,
        violations,
        seed: cfg.seed,
        version: VERSION.to_string(),
    })
}

/// Moment report for explicit (s, t) pairs: entries in input order, per-gap
/// summaries grouped by exact gap in order of first appearance, small-gap
/// bound flags, and a slope fit once two or more distinct gaps carry nonzero
/// means.
pub fn moment_report_for_pairs(
    ctx: &SumContext,
    b0: &UnitResidue,
    alpha: u32,
    pairs: &[(RationalTime, RationalTime)],
    seed: u64,
) -> Result<MomentReport> {
    let values = moment_batch(pairs, alpha, b0, ctx)?;
    let m = *ctx.modulus();
    let segments = m.phi() - 1;
    let mut moments = Vec::with_capacity(pairs.len());
    let mut violations = Vec::new();
    // exact reduced gap fraction -> (sum, count, zeros), in first-appearance order
    let mut keys: Vec<(u128, u128)> = Vec::new();
    let mut agg: Vec<(f64, u32, u32)> = Vec::new();
    for ((s, t), &value) in pairs.iter().zip(values.iter()) {
        let gap_num = (t.num() as u128) * (s.den() as u128) - (s.num() as u128) * (t.den() as u128);
        let gap_den = s.den() as u128 * t.den() as u128;
        let g = gcd_u128(gap_num.max(1), gap_den);
        let key = (gap_num / g, gap_den / g);
        let gap = gap_num as f64 / gap_den as f64;
        moments.push(MomentEntry { s: s.as_f64(), t: t.as_f64(), gap, m_alpha: value });
        if gap_num * segments as u128 <= gap_den {
            let bound = 2f64.powi(alpha as i32) * gap.powf(alpha as f64 / 2.0);
            if value > bound {
                violations.push(BoundViolation { s: s.as_f64(), t: t.as_f64(), gap, m_alpha: value, bound });
            }
        }
        match keys.iter().position(|k| *k == key) {
            Some(i) => {
                agg[i].0 += value;
                agg[i].1 += 1;
                agg[i].2 += (value == 0.0) as u32;
            }
            None => {
                keys.push(key);
                agg.push((value, 1, (value == 0.0) as u32));
            }
        }
    }
    let mut gaps = Vec::with_capacity(keys.len());
    let mut fit_points = Vec::new();
    for (key, (sum, count, zeros)) in keys.iter().zip(agg.iter()) {
        let gap = key.0 as f64 / key.1 as f64;
        let mean = sum / *count as f64;
        let mean_m_alpha = if mean > 0.0 { Some(mean) } else { None };
        if let Some(mm) = mean_m_alpha {
            fit_points.push((gap.ln(), mm.ln()));
        }
        gaps.push(GapSummary { gap, mean_m_alpha, samples: *count, zero_samples: *zeros });
    }
    Ok(MomentReport {
        modulus: ModulusInfo { p: m.p(), n: m.n() },
        b0: b0.value(),
        alpha,
        gaps,
        moments,
        fitted_slope: fit_slope(&fit_points),
        predicted_beta: delta_admissible_for(m.n())
            .ok()
            .and_then(|w| beta_parameter(m.n(), w.delta_max, alpha as u64).ok()),
        violations,
        seed,
        version: VERSION.to_string(),
    })
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Ordinary least squares slope; None with fewer than two points or a
/// degenerate abscissa.
fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// The positive exponent beta = min(alpha/2, alpha delta/n, 2,
/// delta alpha/(n/2 + delta), 1 + delta/(n/2 - delta)) - 1, under the
/// hypotheses 0 < delta <= min(gamma2 n/16, n/2 - 15) and even
/// alpha > max(n/delta, (n/2 + delta)/delta).
pub fn beta_parameter(n: u32, delta: f64, alpha: u64) -> Result<f64> {
    let window = delta_admissible_for(n)
        .map_err(|_| Error::BetaHypothesis(format!("requires n >= 31 (got n = {n})")))?;
    if delta.is_nan() || delta <= 0.0 || delta > window.delta_max {
        return Err(Error::BetaHypothesis(format!(
            "delta = {delta} outside the admissible window (0, {}]",
            window.delta_max
        )));
    }
    if !alpha.is_multiple_of(2) {
        return Err(Error::BetaHypothesis(format!("alpha must be even (got {alpha})")));
    }
    let nf = n as f64;
    let af = alpha as f64;
    let threshold = (nf / delta).max((nf / 2.0 + delta) / delta);
    if af <= threshold {
        return Err(Error::BetaHypothesis(format!(
            "alpha = {alpha} must exceed max(n/delta, (n/2 + delta)/delta) = {threshold}"
        )));
    }
    let candidates = [
        af / 2.0,
        af * delta / nf,
        2.0,
        delta * af / (nf / 2.0 + delta),
        1.0 + delta / (nf / 2.0 - delta),
    ];
    let beta = candidates.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    assert!(beta > 0.0, "beta must be positive under the stated hypotheses");
    Ok(beta)
}

/// Which per-t marginal of the paths a law comparison collects.
///
/// The limiting series has an atom at 0 in several of its marginals (for
/// example the real part at t = 1/2 is exactly U_0 / 2). The step values are
/// genuine partial sums and carry the matching exact atoms, so their KS
/// distance to the limit can decay; the linear interpolant smears each atom
/// over a q^(-1/2) window, which pins the KS distance near half the atom
/// mass no matter how large q grows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathMarginal {
    /// Partial-sum value at the step cutoff; 0 at t = 0.
    Step,
    /// The polygonal path value.
    Interpolated,
}

/// Two-sample Kolmogorov-Smirnov distance between empirical CDFs.
pub fn ks_distance(mut xs: Vec<f64>, mut ys: Vec<f64>) -> f64 {
    assert!(!xs.is_empty() && !ys.is_empty());
    xs.sort_unstable_by(f64::total_cmp);
    ys.sort_unstable_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    if i < xs.len() {
        d = d.max(1.0 - i as f64 / n);
    }
    if j < ys.len() {
        d = d.max(1.0 - j as f64 / m);
    }
    d
}

/// Order statistics at `count` evenly spaced ranks of a sorted slice.
fn quantiles(sorted: &[f64], count: usize) -> Vec<f64> {
    debug_assert!(count >= 2 && !sorted.is_empty());
    (0..count)
        .map(|i| sorted[(i * (sorted.len() - 1)) / (count - 1)])
        .collect()
}

/// Marginal components within [`ZERO_MASS_EPS`] of zero are snapped to the
/// exact atom before comparison: the limit law carries exact atoms at zero,
/// the matching path values are exact zeros up to accumulated rounding, and
/// every genuinely nonzero full sum at desk scale is larger by many orders
/// of magnitude.
fn snap_atom(x: f64) -> f64 {
    if x.abs() < ZERO_MASS_EPS {
        0.0
    } else {
        x
    }
}

/// Compare the per-t marginals of the paths over all units against Monte
/// Carlo draws of the truncated limit series: one-dimensional KS distances
/// per real and imaginary part, quantile summaries of every population, and
/// the vanishing fraction of the full sums.
pub fn compare_laws(
    ctx: &SumContext,
    b0: &UnitResidue,
    t_points: &[RationalTime],
    truncation: u64,
    mc_samples: usize,
    seed: u64,
    marginal: PathMarginal,
) -> Result<LawComparisonReport> {
    if t_points.is_empty() {
        return Err(Error::EmptyTimeGrid);
    }
    assert!(mc_samples >= 2 && truncation >= 1);
    let m = *ctx.modulus();
    let sweep = ctx.sweep(b0)?;
    let units: Vec<u64> = units_iter(m).map(|u| u.value()).collect();

    // path populations, one O(q) pass per unit
    let chunk_results: Vec<(Vec<Vec<Complex64>>, u64)> = units
        .par_chunks(UNIT_CHUNK)
        .map(|chunk| {
            let mut per_t: Vec<Vec<Complex64>> =
                vec![Vec::with_capacity(chunk.len()); t_points.len()];
            let mut zeros = 0u64;
            for &a in chunk {
                let a = UnitResidue::new(a, &m).expect("unit enumeration");
                let path = PathFunction::new(sweep.partial_sums(&a).expect("validated"));
                for (slot, t) in per_t.iter_mut().zip(t_points.iter()) {
                    let value = match marginal {
                        PathMarginal::Step => path.step_eval_or_zero(*t),
                        PathMarginal::Interpolated => path.eval(*t).expect("valid time"),
                    };
                    slot.push(value);
                }
                if path.series().full().norm() < ZERO_MASS_EPS {
                    zeros += 1;
                }
            }
            (per_t, zeros)
        })
        .collect();
    let mut path_vals: Vec<Vec<Complex64>> =
        vec![Vec::with_capacity(units.len()); t_points.len()];
    let mut zero_count = 0u64;
    for (per_t, zeros) in chunk_results {
        zero_count += zeros;
        for (dst, src) in path_vals.iter_mut().zip(per_t) {
            dst.extend(src);
        }
    }

    // Monte Carlo populations of the truncated limit series
    let mc_results: Vec<Vec<Complex64>> = (0..mc_samples)
        .into_par_iter()
        .map(|i| {
            let sampler = MuSampler::new(stream_key(seed, i as u64));
            let sample = LimitSeriesSample::new(&sampler, truncation);
            t_points.iter().map(|t| sample.eval(t.as_f64())).collect()
        })
        .collect();
    let mut limit_vals: Vec<Vec<Complex64>> =
        vec![Vec::with_capacity(mc_samples); t_points.len()];
    for row in mc_results {
        for (dst, v) in limit_vals.iter_mut().zip(row) {
            dst.push(v);
        }
    }

    let mut ks = Vec::with_capacity(t_points.len());
    let mut cdf_summaries = Vec::with_capacity(2 * t_points.len());
    for (ti, t) in t_points.iter().enumerate() {
        let t_f = t.as_f64();
        let mut dist = [0.0f64; 2];
        for (pi, (part, pick)) in
            [("re", (|z: &Complex64| z.re) as fn(&Complex64) -> f64), ("im", |z| z.im)]
                .into_iter()
                .enumerate()
        {
            let mut path_part: Vec<f64> =
                path_vals[ti].iter().map(|z| snap_atom(pick(z))).collect();
            let mut limit_part: Vec<f64> =
                limit_vals[ti].iter().map(|z| snap_atom(pick(z))).collect();
            dist[pi] = ks_distance(path_part.clone(), limit_part.clone());
            path_part.sort_unstable_by(f64::total_cmp);
            limit_part.sort_unstable_by(f64::total_cmp);
            cdf_summaries.push(CdfSummary {
                t: t_f,
                part: part.to_string(),
                path_quantiles: quantiles(&path_part, 101),
                limit_quantiles: quantiles(&limit_part, 101),
            });
        }
        ks.push(KsPoint { t: t_f, re: dist[0], im: dist[1] });
    }

    Ok(LawComparisonReport {
        modulus: ModulusInfo { p: m.p(), n: m.n() },
        b0: b0.value(),
        t_points: t_points.iter().map(|t| t.as_f64()).collect(),
        truncation,
        mc_samples: mc_samples as u64,
        ks,
        cdf_summaries,
        zero_mass_fraction: zero_count as f64 / m.phi() as f64,
        seed,
        version: VERSION.to_string(),
    })
}

/// Maximum of |step approximation| over all units and a time grid, and its
/// ratio to log q.
pub fn sup_statistics(
    ctx: &SumContext,
    b0: &UnitResidue,
    t_grid: &[RationalTime],
) -> Result<SupReport> {
    if t_grid.is_empty() {
        return Err(Error::EmptyTimeGrid);
    }
    if t_grid.iter().any(RationalTime::is_zero) {
        return Err(Error::UndefinedAtZero);
    }
    let m = *ctx.modulus();
    let sweep = ctx.sweep(b0)?;
    let units: Vec<u64> = units_iter(m).map(|u| u.value()).collect();
    let per_chunk: Vec<(f64, u64, f64)> = units
        .par_chunks(UNIT_CHUNK)
        .map(|chunk| {
            let mut best = (f64::NEG_INFINITY, 0u64, 0.0f64);
            for &a in chunk {
                let au = UnitResidue::new(a, &m).expect("unit enumeration");
                let path = PathFunction::new(sweep.partial_sums(&au).expect("validated"));
                for t in t_grid {
                    let v = path.step_eval(*t).expect("t > 0").norm();
                    if v > best.0 {
                        best = (v, a, t.as_f64());
                    }
                }
            }
            best
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0u64, 0.0f64);
    for cand in per_chunk {
        if cand.0 > best.0 {
            best = cand;
        }
    }
    Ok(SupReport {
        modulus: ModulusInfo { p: m.p(), n: m.n() },
        b0: b0.value(),
        grid_points: t_grid.len() as u64,
        max_abs: best.0,
        ratio_to_log_q: best.0 / (m.q() as f64).ln(),
        argmax_a: best.1,
        argmax_t: best.2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::PrimePowerModulus;

    fn setup(p: u64, n: u32) -> (PrimePowerModulus, SumContext) {
        let m = PrimePowerModulus::new(p, n).unwrap();
        (m, SumContext::new(&m).unwrap())
    }

    #[test]
    fn moment_zero_gap_vanishes() {
        let (m, ctx) = setup(5, 2);
        let b0 = UnitResidue::new(1, &m).unwrap();
        let t = RationalTime::new(7, 19).unwrap();
        assert_eq!(moment(t, t, 4, &b0, &ctx).unwrap(), 0.0);
    }

    #[test]
    fn moment_rejects_odd_alpha() {
        let (m, ctx) = setup(5, 2);
        let b0 = UnitResidue::new(1, &m).unwrap();
        let s = RationalTime::new(1, 4).unwrap();
        let t = RationalTime::new(1, 2).unwrap();
        assert!(matches!(moment(s, t, 3, &b0, &ctx), Err(Error::InvalidMomentOrder(3))));
        assert!(matches!(moment(s, t, 0, &b0, &ctx), Err(Error::InvalidMomentOrder(0))));
        assert!(matches!(moment(t, s, 2, &b0, &ctx), Err(Error::IntervalOrder)));
    }

    #[test]
    fn moment_is_symmetric_in_increment_sign() {
        // |K(t) - K(s)| = |K(s) - K(t)|: recomputing with reversed roles via
        // the absolute value leaves the functional unchanged
        let (m, ctx) = setup(7, 2);
        let b0 = UnitResidue::new(3, &m).unwrap();
        let s = RationalTime::new(5, 48).unwrap();
        let t = RationalTime::new(29, 48).unwrap();
        let forward = moment(s, t, 4, &b0, &ctx).unwrap();
        let sweep = ctx.sweep(&b0).unwrap();
        let mut acc = 0.0;
        for a in units_iter(m) {
            let path = PathFunction::new(sweep.partial_sums(&a).unwrap());
            let d = path.eval(s).unwrap() - path.eval(t).unwrap();
            acc += d.norm_sqr().powi(2);
        }
        assert!((forward - acc / m.phi() as f64).abs() < 1e-12 * forward.max(1.0));
    }

    #[test]
    fn small_gap_bound_holds() {
        let (m, ctx) = setup(5, 2);
        let b0 = UnitResidue::new(1, &m).unwrap();
        let den = (m.phi() - 1) * 64;
        let mut state = 11u64;
        for alpha in [2u32, 4, 6, 8] {
            for _ in 0..100 {
                let gap_num = 1 + bounded(&mut state, 64); // gap <= 1/(phi-1)
                let s_num = bounded(&mut state, den - gap_num + 1);
                let s = RationalTime::new(s_num, den).unwrap();
                let t = RationalTime::new(s_num + gap_num, den).unwrap();
                let value = moment(s, t, alpha, &b0, &ctx).unwrap();
                let gap = gap_num as f64 / den as f64;
                let bound = 2f64.powi(alpha as i32) * gap.powf(alpha as f64 / 2.0);
                assert!(value <= bound, "alpha={alpha} gap={gap}: {value} > {bound}");
            }
        }
    }

    #[test]
    fn scan_reports_slope_and_no_spurious_violations() {
        let (m, ctx) = setup(11, 2);
        let b0 = UnitResidue::new(1, &m).unwrap();
        let cfg = TightnessScanConfig {
            alpha: 2,
            gaps: log_gap_grid(0.002, 0.2, 8),
            samples_per_gap: 16,
            grid_factor: 64,
            seed: 42,
        };
        let report = tightness_scan(&ctx, &b0, &cfg).unwrap();
        assert_eq!(report.gaps.len(), 8);
        assert_eq!(report.moments.len(), 8 * 16);
        assert!(report.fitted_slope.is_some());
        assert!(report.violations.is_empty());
        assert!(report.predicted_beta.is_none(), "no admissible window below n = 31");
    }

    #[test]
    fn scan_single_gap_has_no_slope() {
        let (m, ctx) = setup(5, 2);
        let b0 = UnitResidue::new(1, &m).unwrap();
        let cfg = TightnessScanConfig {
            alpha: 2,
            gaps: vec![0.05],
            samples_per_gap: 4,
            grid_factor: 16,
            seed: 3,
        };
        let report = tightness_scan(&ctx, &b0, &cfg).unwrap();
        assert!(report.fitted_slope.is_none());
    }

    #[test]
    fn beta_parameter_examples() {
        // smallest admissible even alpha at n = 31
        let w = delta_admissible_for(31).unwrap();
        let beta = beta_parameter(31, w.delta_max, 10_485_760_002).unwrap();
        assert!(beta > 0.0 && beta < 1e-9);
        // alpha -> infinity: the surviving entries are 2 and 1 + delta/(n/2 - delta)
        let huge = beta_parameter(31, w.delta_max, 1 << 60).unwrap();
        let expected = (1.0 + w.delta_max / (15.5 - w.delta_max)).min(2.0) - 1.0;
        assert!((huge - expected).abs() < 1e-18);
        // hypothesis violations
        assert!(beta_parameter(30, 1e-9, 100).is_err());
        assert!(beta_parameter(31, w.delta_max, 101).is_err()); // odd
        assert!(beta_parameter(31, w.delta_max, 1000).is_err()); // too small
        assert!(beta_parameter(31, w.delta_max * 2.0, 1 << 60).is_err()); // delta too large
    }

    #[test]
    fn ks_distance_basics() {
        let d = ks_distance(vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 1.0, 4.0, 3.0]);
        assert!(d.abs() < 1e-12);
        let d = ks_distance(vec![1.0, 1.0, 4.0, 4.0], vec![1.0, 1.0, 1.0, 4.0]);
        assert!((d - 0.25).abs() < 1e-12);
        // disjoint supports give distance 1
        let d = ks_distance(vec![0.0, 0.1], vec![5.0, 6.0, 7.0]);
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compare_laws_is_deterministic() {
        let (m, ctx) = setup(5, 2);
        let b0 = UnitResidue::new(1, &m).unwrap();
        let ts = [RationalTime::new(1, 2).unwrap(), RationalTime::one()];
        let a = compare_laws(&ctx, &b0, &ts, m.q(), 50, 9, PathMarginal::Step).unwrap();
        let b = compare_laws(&ctx, &b0, &ts, m.q(), 50, 9, PathMarginal::Step).unwrap();
        assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
        for point in &a.ks {
            assert!(point.re >= 0.0 && point.re <= 1.0);
            assert!(point.im >= 0.0 && point.im <= 1.0);
        }
    }

    #[test]
    fn compare_laws_time_zero_step_populations_vanish() {
        // at t = 0 both step populations are identically zero and the KS
        // distance is exactly 0
        let (m, ctx) = setup(7, 2);
        let b0 = UnitResidue::new(1, &m).unwrap();
        let ts = [RationalTime::zero()];
        let report = compare_laws(&ctx, &b0, &ts, m.q(), 20, 4, PathMarginal::Step).unwrap();
        assert_eq!(report.ks[0].re, 0.0);
        assert_eq!(report.ks[0].im, 0.0);
    }

    #[test]
    fn compare_laws_time_zero_interpolant_sees_first_knots() {
        // the interpolated marginal at t = 0 consists of first knots of
        // modulus q^(-1/2); the limit series still vanishes identically
        let (m, ctx) = setup(7, 2);
        let b0 = UnitResidue::new(1, &m).unwrap();
        let ts = [RationalTime::zero()];
        let report =
            compare_laws(&ctx, &b0, &ts, m.q(), 20, 4, PathMarginal::Interpolated).unwrap();
        let first_knot = 1.0 / m.normalization();
        for summary in &report.cdf_summaries {
            for v in &summary.path_quantiles {
                assert!(v.abs() <= first_knot + 1e-12);
            }
            for v in &summary.limit_quantiles {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn zero_mass_fraction_is_half_for_powers() {
        let (m, ctx) = setup(7, 2);
        let b0 = UnitResidue::new(1, &m).unwrap();
        let ts = [RationalTime::one()];
        let report = compare_laws(&ctx, &b0, &ts, m.q(), 10, 1, PathMarginal::Step).unwrap();
        assert_eq!(report.zero_mass_fraction, 0.5);
    }

    #[test]
    fn sup_statistics_basics() {
        let (m, ctx) = setup(5, 2);
        let b0 = UnitResidue::new(1, &m).unwrap();
        let report = sup_statistics(&ctx, &b0, &[RationalTime::one()]).unwrap();
        // the one-point grid at t = 1 sees only full sums, all bounded by 2
        assert!(report.max_abs <= 2.0 + 1e-9);
        assert!(sup_statistics(&ctx, &b0, &[]).is_err());
        assert!(sup_statistics(&ctx, &b0, &[RationalTime::zero()]).is_err());
    }

    #[test]
    fn fit_slope_recovers_power_law() {
        let points: Vec<(f64, f64)> =
            (1..10).map(|i| ((i as f64).ln(), (3.0 * (i as f64).powf(1.7)).ln())).collect();
        let slope = fit_slope(&points).unwrap();
        assert!((slope - 1.7).abs() < 1e-9);
        assert!(fit_slope(&points[..1]).is_none());
    }
}
