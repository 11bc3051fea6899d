//! The polygonal partial-sum path, its step approximation, and the discrete
//! Fourier coefficients of the step cutoff set.
//!
//! Every block and segment index is derived from an exact rational time via
//! integer ceilings; the parametrization is discontinuous in the segment
//! index, and floating-point ceilings misclassify knots.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kloosterman::{PartialSumSeries, SumContext};
use crate::modarith::{PrimePowerModulus, UnitResidue};

/// An exact time in [0, 1], stored as num/den.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalTime {
    num: u64,
    den: u64,
}

impl RationalTime {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num > den {
            return Err(Error::InvalidTime { num, den });
        }
        Ok(Self { num, den })
    }

    pub const fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub const fn one() -> Self {
        Self { num: 1, den: 1 }
    }

    /// Round a float onto the grid with the given denominator.
    pub fn from_f64(t: f64, den: u64) -> Result<Self> {
        if den == 0 || !(0.0..=1.0).contains(&t) {
            return Err(Error::TimeOutOfRange(t));
        }
        let num = (t * den as f64).round() as u64;
        Self::new(num.min(den), den)
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// ceil(k * t) in exact integer arithmetic.
    pub fn ceil_scaled(&self, k: u64) -> u64 {
        let prod = k as u128 * self.num as u128;
        prod.div_ceil(self.den as u128) as u64
    }

    /// floor(k * t) in exact integer arithmetic.
    pub fn floor_scaled(&self, k: u64) -> u64 {
        (k as u128 * self.num as u128 / self.den as u128) as u64
    }

    /// Exact comparison of two rational times.
    pub fn cmp_exact(&self, other: &RationalTime) -> std::cmp::Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

/// The j-th element of the coprime index set: j + floor((j-1)/(p-1)).
pub fn index_map(j: u64, m: &PrimePowerModulus) -> Result<u64> {
    if j == 0 || j > m.phi() {
        return Err(Error::IndexOutOfRange { j, phi: m.phi() });
    }
    Ok(j + (j - 1) / (m.p() - 1))
}

/// The piecewise-linear path through the partial-sum knots, with slopes
/// (phi - 1)(z_{j+1} - z_j).
pub struct PathFunction {
    series: PartialSumSeries,
    slopes: Vec<Complex64>,
}

impl PathFunction {
    pub fn new(series: PartialSumSeries) -> Self {
        let phi_m1 = series.len() as f64 - 1.0;
        let knots = series.values();
        let slopes = knots.windows(2).map(|w| (w[1] - w[0]) * phi_m1).collect();
        Self { series, slopes }
    }

    pub fn from_context(ctx: &SumContext, a: &UnitResidue, b: &UnitResidue) -> Result<Self> {
        Ok(Self::new(ctx.partial_sums(a, b)?))
    }

    pub fn series(&self) -> &PartialSumSeries {
        &self.series
    }

    pub fn modulus(&self) -> &PrimePowerModulus {
        self.series.modulus()
    }

    /// Knots z_1..z_phi in block-enumeration order.
    pub fn knots(&self) -> &[Complex64] {
        self.series.values()
    }

    pub fn slopes(&self) -> &[Complex64] {
        &self.slopes
    }

    /// The path value at t, with the segment index j = ceil((phi - 1) t)
    /// computed in exact rational arithmetic. t = 0 returns the first knot by
    /// right-continuity.
    pub fn eval(&self, t: RationalTime) -> Result<Complex64> {
        let knots = self.knots();
        if t.is_zero() {
            return Ok(knots[0]);
        }
        let segments = self.modulus().phi() - 1;
        let j = t.ceil_scaled(segments);
        debug_assert!(j >= 1 && j <= segments);
        // offset t - (j-1)/(phi-1), exact numerator over den * (phi-1)
        let off_num = segments as u128 * t.num() as u128 - (j - 1) as u128 * t.den() as u128;
        let offset = off_num as f64 / (segments as u128 * t.den() as u128) as f64;
        Ok(self.slopes[j as usize - 1] * offset + knots[j as usize - 1])
    }

    /// The step approximation at t > 0: the prefix sum over units
    /// x <= floor(x_k(t)), read off the precomputed series.
    pub fn step_eval(&self, t: RationalTime) -> Result<Complex64> {
        let cutoff = step_cutoff(t, self.modulus())?;
        Ok(self.series.value_at_cutoff(cutoff))
    }

    /// Like [`PathFunction::step_eval`], with the empty-sum value 0 at t = 0.
    pub fn step_eval_or_zero(&self, t: RationalTime) -> Complex64 {
        if t.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            self.step_eval(t).expect("t > 0")
        }
    }

    /// Knot rows as CSV with header `j,t,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "j,t,re,im")?;
        let segments = self.modulus().phi() - 1;
        for (i, z) in self.knots().iter().enumerate() {
            let t = i as f64 / segments as f64;
            writeln!(w, "{},{},{},{}", i + 1, t, z.re, z.im)?;
        }
        Ok(())
    }
}

/// The summation cutoff floor(x_k(t)) = floor(phi t) + k - 1 of the step
/// function, with k = ceil(p^(n-1) t) the block index. Defined for t > 0.
pub(crate) fn step_cutoff(t: RationalTime, m: &PrimePowerModulus) -> Result<u64> {
    if t.is_zero() {
        return Err(Error::UndefinedAtZero);
    }
    let k = t.ceil_scaled(m.blocks());
    Ok(t.floor_scaled(m.phi()) + k - 1)
}

/// Standalone step approximation by direct summation up to the cutoff;
/// `PathFunction::step_eval` is the amortized route over a shared series.
pub fn step_approx(
    t: RationalTime,
    a: &UnitResidue,
    b: &UnitResidue,
    ctx: &SumContext,
) -> Result<Complex64> {
    let cutoff = step_cutoff(t, ctx.modulus())?;
    if cutoff == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let sweep = ctx.sweep(b)?;
    Ok(sweep.short_sum_complex(a, 0, cutoff)? / ctx.modulus().normalization())
}

/// Unnormalized geometric sum over x = 1..=terms of e(r x / q), in closed
/// form. r = 0 returns `terms`.
pub(crate) fn geometric_phase_sum(r: u64, terms: u64, q: u64) -> Complex64 {
    if terms == 0 {
        return Complex64::new(0.0, 0.0);
    }
    if r == 0 {
        return Complex64::new(terms as f64, 0.0);
    }
    // sum = e(r (m+1) / 2q) sin(pi r m / q) / sin(pi r / q); both angle
    // products are reduced modulo 2q exactly before the trig evaluation.
    let two_q = 2 * q as u128;
    let rm = (r as u128 * terms as u128 % two_q) as u64;
    let rm1 = (r as u128 * (terms as u128 + 1) % two_q) as u64;
    let pi_over_q = std::f64::consts::PI / q as f64;
    let ratio = (pi_over_q * rm as f64).sin() / (pi_over_q * r as f64).sin();
    let phase = pi_over_q * rm1 as f64;
    Complex64::new(phase.cos() * ratio, phase.sin() * ratio)
}

/// Discrete Fourier coefficient of the step cutoff at t: the normalized sum
/// over ALL x in 1..=floor(x_k(t)) of e_q(h x), evaluated in closed form.
pub fn fourier_coeff(h: i64, t: RationalTime, m: &PrimePowerModulus) -> Result<Complex64> {
    let cutoff = step_cutoff(t, m)?;
    let r = (h as i128).rem_euclid(m.q() as i128) as u64;
    Ok(geometric_phase_sum(r, cutoff, m.q()) / m.normalization())
}

/// Variant of [`fourier_coeff`] restricted to x coprime to p.
pub fn fourier_coeff_coprime(h: i64, t: RationalTime, m: &PrimePowerModulus) -> Result<Complex64> {
    let cutoff = step_cutoff(t, m)?;
    let q = m.q();
    let r = (h as i128).rem_euclid(q as i128) as u64;
    let all = geometric_phase_sum(r, cutoff, q);
    // subtract x = p y: ratio e(r p / q), floor(cutoff / p) terms
    let rp = (r as u128 * m.p() as u128 % q as u128) as u64;
    let multiples = geometric_phase_sum(rp, cutoff / m.p(), q);
    Ok((all - multiples) / m.normalization())
}

/// The half-open integer interval (x_j(s), x_k(t)] separating the step
/// cutoffs at s and t, with exact rational endpoints.
#[derive(Clone, Copy, Debug)]
pub struct StepInterval {
    /// Exact left endpoint x_j(s) as numerator over denominator.
    pub lower_num: u128,
    pub lower_den: u64,
    /// Exact right endpoint x_k(t).
    pub upper_num: u128,
    pub upper_den: u64,
    /// Number of integers in the interval: floor(x_k(t)) - floor(x_j(s)),
    /// floored at 0.
    pub cardinality: u64,
}

impl StepInterval {
    pub fn lower_f64(&self) -> f64 {
        self.lower_num as f64 / self.lower_den as f64
    }

    pub fn upper_f64(&self) -> f64 {
        self.upper_num as f64 / self.upper_den as f64
    }
}

/// Interval between the step cutoffs at s < t. s = 0 is accepted with the
/// empty-prefix convention (left endpoint 0).
pub fn interval_between(
    s: RationalTime,
    t: RationalTime,
    m: &PrimePowerModulus,
) -> Result<StepInterval> {
    if s.cmp_exact(&t) != std::cmp::Ordering::Less {
        return Err(Error::IntervalOrder);
    }
    let (lower_num, lower_den, lower_cut) = if s.is_zero() {
        (0u128, 1u64, 0u64)
    } else {
        let j = s.ceil_scaled(m.blocks());
        let num = m.phi() as u128 * s.num() as u128 + (j - 1) as u128 * s.den() as u128;
        (num, s.den(), step_cutoff(s, m)?)
    };
    let k = t.ceil_scaled(m.blocks());
    let upper_num = m.phi() as u128 * t.num() as u128 + (k - 1) as u128 * t.den() as u128;
    let upper_cut = step_cutoff(t, m)?;
    Ok(StepInterval {
        lower_num,
        lower_den,
        upper_num,
        upper_den: t.den(),
        cardinality: upper_cut.saturating_sub(lower_cut),
    })
}
