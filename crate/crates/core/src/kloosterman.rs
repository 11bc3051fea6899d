//! Direct and bulk evaluation of full and partial normalized Kloosterman sums
//!
//!   Kl_q(a, b) = q^(-1/2) * sum over units x of e_q(a x + b xbar).
//!
//! The primary algorithm is direct summation in ascending x with an
//! incremental update of a*x mod q and a precomputed inverse table, summed in
//! blocks of 2^10 terms that are combined pairwise. Sweeps over all a may use
//! a length-q DFT; the direct per-a computation is the contract the DFT path
//! is tested against.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::detsum::{blocked_sum_complex, BLOCK};
use crate::dft::PrimePowerDft;
use crate::error::{Error, Result};
use crate::modarith::{
    self, inv_u64, mul_mod, pow_mod, unit_root, PrimePowerModulus, UnitResidue,
};

/// Largest q for which the per-modulus lookup tables are built. Direct
/// summation is O(q) per sum, so this is also the practical evaluation limit.
pub const TABLE_LIMIT: u64 = 1 << 21;

/// Sentinel marking non-units in the per-b phase table.
const NON_UNIT: u64 = u64::MAX;

/// Per-modulus evaluation context: the inverse table and the table of q-th
/// roots of unity, built once and shared read-only across workers.
pub struct SumContext {
    m: PrimePowerModulus,
    inv: Arc<Vec<u64>>,
    roots: Arc<Vec<Complex64>>,
}

impl SumContext {
    pub fn new(m: &PrimePowerModulus) -> Result<Self> {
        if m.q() > TABLE_LIMIT {
            return Err(Error::DeskScaleExceeded { q: m.q(), limit: TABLE_LIMIT });
        }
        Ok(Self {
            m: *m,
            inv: Arc::new(inverse_table(m)),
            roots: Arc::new(root_table(m.q())),
        })
    }

    pub fn modulus(&self) -> &PrimePowerModulus {
        &self.m
    }

    /// Inverse table of size q: entry x holds xbar for units, 0 otherwise.
    pub fn inverse_table(&self) -> &[u64] {
        &self.inv
    }

    pub(crate) fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    fn check_unit(&self, u: &UnitResidue) -> Result<u64> {
        if u.modulus().q() != self.m.q() {
            return Err(Error::ModulusMismatch { expected: self.m.q(), got: u.modulus().q() });
        }
        Ok(u.value())
    }

    /// Fix b and precompute the phase contribution of b*xbar for every x.
    pub fn sweep(&self, b: &UnitResidue) -> Result<BSweep<'_>> {
        let b = self.check_unit(b)?;
        let q = self.m.q();
        let mut g = vec![NON_UNIT; q as usize];
        for (x, slot) in g.iter_mut().enumerate().skip(1) {
            let inv = self.inv[x];
            if inv != 0 {
                *slot = mul_mod(b, inv, q);
            }
        }
        Ok(BSweep { ctx: self, b, g })
    }

    /// Normalized full sum; real part after an internal realness assertion.
    pub fn full_sum(&self, a: &UnitResidue, b: &UnitResidue) -> Result<f64> {
        self.sweep(b)?.full_sum(a)
    }

    /// Normalized full sum with its accumulated imaginary part.
    pub fn full_sum_complex(&self, a: &UnitResidue, b: &UnitResidue) -> Result<Complex64> {
        self.sweep(b)?.full_sum_complex(a)
    }

    /// The phi(q) normalized prefix sums for one (a, b).
    pub fn partial_sums(&self, a: &UnitResidue, b: &UnitResidue) -> Result<PartialSumSeries> {
        self.sweep(b)?.partial_sums(a)
    }

    /// Partial sums at the requested prefixes, for every unit a.
    ///
    /// Values are the same as per-a [`SumContext::partial_sums`] restricted to
    /// the requested prefixes; rows are indexed by the units in increasing
    /// order.
    pub fn bulk_partial_sums(&self, b: &UnitResidue, prefixes: &[u64]) -> Result<BulkPartialSums> {
        let q = self.m.q();
        let p = self.m.p();
        for &j in prefixes {
            if j == 0 || j >= q || j % p == 0 {
                return Err(Error::PrefixNotCoprime(j));
            }
        }
        let sweep = self.sweep(b)?;
        // sorted checkpoints, remembering the caller's order
        let mut order: Vec<usize> = (0..prefixes.len()).collect();
        order.sort_by_key(|&i| prefixes[i]);
        let sorted: Vec<u64> = order.iter().map(|&i| prefixes[i]).collect();
        let units: Vec<u64> = modarith::units_iter(self.m).map(|u| u.value()).collect();
        let rows: Vec<Vec<Complex64>> = units
            .par_chunks(BLOCK)
            .map(|chunk| {
                chunk
                    .iter()
                    .map(|&a| {
                        let at_sorted = sweep.prefix_checkpoints(a, &sorted);
                        let mut row = vec![Complex64::new(0.0, 0.0); prefixes.len()];
                        for (slot, &orig) in order.iter().enumerate() {
                            row[orig] = at_sorted[slot];
                        }
                        row
                    })
                    .collect::<Vec<_>>()
            })
            .flatten_iter()
            .collect();
        Ok(BulkPartialSums { b: sweep.b, prefixes: prefixes.to_vec(), units, rows })
    }

    /// Normalized full sums for every residue a at once, via a length-q DFT
    /// of x -> e_q(b xbar) supported on the units.
    ///
    /// Entry a of the result is Kl_q(a, b) for every unit a; entries at
    /// non-unit indices are the corresponding degenerate sums and are not
    /// used by this crate.
    pub fn bulk_full_sums(&self, b: &UnitResidue) -> Result<Vec<Complex64>> {
        let b = self.check_unit(b)?;
        let q = self.m.q() as usize;
        let mut signal = vec![Complex64::new(0.0, 0.0); q];
        for (x, slot) in signal.iter_mut().enumerate().skip(1) {
            let inv = self.inv[x];
            if inv != 0 {
                *slot = self.roots[mul_mod(b, inv, self.m.q()) as usize];
            }
        }
        let dft = PrimePowerDft::new(self.m.p() as usize, q, Arc::clone(&self.roots));
        let mut out = dft.forward(&signal);
        let norm = 1.0 / self.m.normalization();
        for v in &mut out {
            *v *= norm;
        }
        Ok(out)
    }
}

/// A sweep with fixed second argument b: `g[x] = b * xbar mod q` for units x.
pub struct BSweep<'c> {
    ctx: &'c SumContext,
    b: u64,
    g: Vec<u64>,
}

impl BSweep<'_> {
    pub fn modulus(&self) -> &PrimePowerModulus {
        &self.ctx.m
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// Normalized full sum over all units, blocked pairwise summation.
    pub fn full_sum_complex(&self, a: &UnitResidue) -> Result<Complex64> {
        let a = self.ctx.check_unit(a)?;
        let q = self.ctx.m.q();
        let roots = self.ctx.roots();
        let mut phase = 0u64;
        let sum = blocked_sum_complex((1..q).filter_map(|x| {
            phase += a;
            if phase >= q {
                phase -= q;
            }
            let g = self.g[x as usize];
            if g == NON_UNIT {
                return None;
            }
            let mut idx = phase + g;
            if idx >= q {
                idx -= q;
            }
            Some(roots[idx as usize])
        }));
        Ok(sum / self.ctx.m.normalization())
    }

    /// Normalized full sum. The sum is real by the x -> -x symmetry; the
    /// accumulated imaginary part is asserted below 1e-9 sqrt(phi).
    pub fn full_sum(&self, a: &UnitResidue) -> Result<f64> {
        let sum = self.full_sum_complex(a)?;
        let tol = 1e-9 * (self.ctx.m.phi() as f64).sqrt();
        assert!(
            sum.im.abs() <= tol,
            "full Kloosterman sum failed the realness check: im = {}, tolerance {}",
            sum.im,
            tol
        );
        Ok(sum.re)
    }

    /// Streaming prefix accumulation of the phi(q) partial sums, one value per
    /// coprime prefix, in a single O(q) pass.
    pub fn partial_sums(&self, a: &UnitResidue) -> Result<PartialSumSeries> {
        let a = self.ctx.check_unit(a)?;
        let m = self.ctx.m;
        let q = m.q();
        let roots = self.ctx.roots();
        let norm = 1.0 / m.normalization();
        let mut values = Vec::with_capacity(m.phi() as usize);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut phase = 0u64;
        for x in 1..q {
            phase += a;
            if phase >= q {
                phase -= q;
            }
            let g = self.g[x as usize];
            if g == NON_UNIT {
                continue;
            }
            let mut idx = phase + g;
            if idx >= q {
                idx -= q;
            }
            acc += roots[idx as usize];
            values.push(acc * norm);
        }
        Ok(PartialSumSeries { a, b: self.b, modulus: m, values })
    }

    /// Prefix sums at the given sorted coprime checkpoints only.
    fn prefix_checkpoints(&self, a: u64, sorted: &[u64]) -> Vec<Complex64> {
        let m = self.ctx.m;
        let q = m.q();
        let roots = self.ctx.roots();
        let norm = 1.0 / m.normalization();
        let mut out = Vec::with_capacity(sorted.len());
        let mut acc = Complex64::new(0.0, 0.0);
        let mut phase = 0u64;
        let mut next = 0usize;
        for x in 1..q {
            if next == sorted.len() {
                break;
            }
            phase += a;
            if phase >= q {
                phase -= q;
            }
            let g = self.g[x as usize];
            if g != NON_UNIT {
                let mut idx = phase + g;
                if idx >= q {
                    idx -= q;
                }
                acc += roots[idx as usize];
            }
            while next < sorted.len() && sorted[next] == x {
                out.push(acc * norm);
                next += 1;
            }
        }
        out
    }

    /// Unnormalized short sum over units x in (start, start + len], with x
    /// taken modulo q.
    pub fn short_sum_complex(&self, a: &UnitResidue, start: u64, len: u64) -> Result<Complex64> {
        let a = self.ctx.check_unit(a)?;
        let m = self.ctx.m;
        let q = m.q();
        let roots = self.ctx.roots();
        let mut phase = mul_mod(a, start % q, q);
        let mut xm = start % q;
        Ok(blocked_sum_complex((0..len).filter_map(|_| {
            phase += a;
            if phase >= q {
                phase -= q;
            }
            xm += 1;
            if xm == q {
                xm = 0;
            }
            let g = self.g[xm as usize];
            if g == NON_UNIT {
                return None;
            }
            let mut idx = phase + g;
            if idx >= q {
                idx -= q;
            }
            Some(roots[idx as usize])
        })))
    }
}

/// The phi(q) normalized prefix sums of one Kloosterman sum: `values[i]` is the
/// prefix over units x <= j_i, with j_i the i-th coprime index.
#[derive(Clone, Debug)]
pub struct PartialSumSeries {
    a: u64,
    b: u64,
    modulus: PrimePowerModulus,
    values: Vec<Complex64>,
}

impl PartialSumSeries {
    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn modulus(&self) -> &PrimePowerModulus {
        &self.modulus
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Last value: the full normalized sum.
    pub fn full(&self) -> Complex64 {
        *self.values.last().expect("phi >= 2 for every odd prime power")
    }

    /// Prefix value over units x <= cutoff, for any integer cutoff in [0, q).
    pub(crate) fn value_at_cutoff(&self, cutoff: u64) -> Complex64 {
        debug_assert!(cutoff < self.modulus.q());
        let rank = cutoff - cutoff / self.modulus.p();
        if rank == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[rank as usize - 1]
        }
    }
}

/// Table of partial sums indexed by (unit a, requested prefix).
pub struct BulkPartialSums {
    b: u64,
    prefixes: Vec<u64>,
    units: Vec<u64>,
    rows: Vec<Vec<Complex64>>,
}

impl BulkPartialSums {
    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn prefixes(&self) -> &[u64] {
        &self.prefixes
    }

    /// Units in increasing order, one row each.
    pub fn units(&self) -> &[u64] {
        &self.units
    }

    pub fn row(&self, unit_rank: usize) -> &[Complex64] {
        &self.rows[unit_rank]
    }

    pub fn value(&self, unit_rank: usize, prefix_index: usize) -> Complex64 {
        self.rows[unit_rank][prefix_index]
    }
}

/// Inverse table of size q via batch inversion: one extended Euclid for the
/// whole unit group, 3 phi multiplications. Entry 0 marks non-units.
fn inverse_table(m: &PrimePowerModulus) -> Vec<u64> {
    let q = m.q();
    let units: Vec<u64> = modarith::units_iter(*m).map(|u| u.value()).collect();
    let mut prefix = Vec::with_capacity(units.len());
    let mut acc = 1u64;
    for &u in &units {
        acc = mul_mod(acc, u, q);
        prefix.push(acc);
    }
    let mut table = vec![0u64; q as usize];
    let mut suffix_inv = inv_u64(acc, q);
    for i in (0..units.len()).rev() {
        let inv = if i == 0 { suffix_inv } else { mul_mod(suffix_inv, prefix[i - 1], q) };
        table[units[i] as usize] = inv;
        suffix_inv = mul_mod(suffix_inv, units[i], q);
    }
    table
}

fn root_table(q: u64) -> Vec<Complex64> {
    (0..q).map(|r| unit_root(r, q)).collect()
}

/// One-shot normalized full sum; builds the per-modulus tables internally.
pub fn full_sum(a: &UnitResidue, b: &UnitResidue, m: &PrimePowerModulus) -> Result<f64> {
    SumContext::new(m)?.full_sum(a, b)
}

/// One-shot partial sums; builds the per-modulus tables internally.
pub fn partial_sums(
    a: &UnitResidue,
    b: &UnitResidue,
    m: &PrimePowerModulus,
) -> Result<PartialSumSeries> {
    SumContext::new(m)?.partial_sums(a, b)
}

/// Closed-form (Salie-type) evaluation of the normalized full sum for n >= 2,
/// provided only as a cross-check oracle; direct summation is authoritative.
///
/// Kl_q(a, b) = 0 when a b is a quadratic non-residue mod p; otherwise
/// 2 (l|p)^n Re(eps e_q(2 l)) with l a square root of a b mod q and eps = 1
/// or i according to q mod 4.
pub fn salie_reference(a: &UnitResidue, b: &UnitResidue, m: &PrimePowerModulus) -> Result<f64> {
    if m.n() < 2 {
        return Err(Error::ClosedFormRequiresPower(m.n()));
    }
    if a.modulus().q() != m.q() || b.modulus().q() != m.q() {
        return Err(Error::ModulusMismatch {
            expected: m.q(),
            got: if a.modulus().q() != m.q() { a.modulus().q() } else { b.modulus().q() },
        });
    }
    let p = m.p();
    let q = m.q();
    let ab = mul_mod(a.value(), b.value(), q);
    let ab_mod_p = ab % p;
    if legendre(ab_mod_p, p) != 1 {
        return Ok(0.0);
    }
    let root = hensel_sqrt(ab, m);
    debug_assert_eq!(mul_mod(root, root, q), ab);
    // (l|p)^n: only an odd exponent with a non-residue root flips the sign
    let sign = if m.n() % 2 == 1 && legendre(root % p, p) != 1 { -1.0 } else { 1.0 };
    let phase = unit_root(mul_mod(2, root, q), q);
    let value = if q % 4 == 1 {
        phase.re // eps = 1
    } else {
        -phase.im // eps = i, Re(i e(2l/q)) = -sin
    };
    Ok(2.0 * sign * value)
}

/// Legendre symbol (x|p) via Euler's criterion: 1, p-1 (= -1), or 0.
fn legendre(x: u64, p: u64) -> u64 {
    pow_mod(x, (p - 1) / 2, p)
}

/// Square root of a quadratic residue modulo p^n: Tonelli-Shanks mod p, then
/// Hensel lifting one power at a time.
fn hensel_sqrt(value: u64, m: &PrimePowerModulus) -> u64 {
    let p = m.p();
    let mut root = tonelli_shanks(value % p, p);
    let mut pk = p;
    for _ in 1..m.n() {
        let pk_next = pk * p;
        // root^2 = value (mod pk); correct the next digit
        let r2 = mul_mod(root % pk_next, root % pk_next, pk_next);
        let diff = (value % pk_next + pk_next - r2) % pk_next;
        debug_assert_eq!(diff % pk, 0);
        let t = mul_mod(diff / pk, inv_u64(mul_mod(2, root % p, p), p), p);
        root = (root + t * pk) % pk_next;
        pk = pk_next;
    }
    root
}

/// Tonelli-Shanks square root modulo an odd prime p; `value` must be a
/// quadratic residue.
fn tonelli_shanks(value: u64, p: u64) -> u64 {
    if value == 0 {
        return 0;
    }
    if p % 4 == 3 {
        return pow_mod(value, (p + 1) / 4, p);
    }
    let s = (p - 1).trailing_zeros();
    let d = (p - 1) >> s;
    // find a non-residue
    let mut z = 2u64;
    while legendre(z, p) != p - 1 {
        z += 1;
    }
    let mut c = pow_mod(z, d, p);
    let mut x = pow_mod(value, d.div_ceil(2), p);
    let mut t = pow_mod(value, d, p);
    let mut mexp = s;
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (mexp - i - 1), p);
        x = mul_mod(x, b, p);
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        mexp = i;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modulus(p: u64, n: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, n).unwrap()
    }

    fn unit(v: u64, m: &PrimePowerModulus) -> UnitResidue {
        UnitResidue::new(v, m).unwrap()
    }

    #[test]
    fn inverse_table_matches_euclid() {
        for (p, n) in [(3u64, 3u32), (5, 2), (7, 2), (13, 2), (3, 1)] {
            let m = modulus(p, n);
            let table = inverse_table(&m);
            for x in 1..m.q() {
                if m.is_unit(x) {
                    assert_eq!(table[x as usize], inv_u64(x, m.q()), "x = {x}, q = {}", m.q());
                } else {
                    assert_eq!(table[x as usize], 0);
                }
            }
        }
    }

    #[test]
    fn full_sum_two_term_case() {
        // q = 3: e(2/3) + e(4/3) = -1, normalized by sqrt(3)
        let m = modulus(3, 1);
        let v = full_sum(&unit(1, &m), &unit(1, &m), &m).unwrap();
        assert!((v - (-1.0 / 3f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn full_sum_symmetric_in_a_b() {
        let m = modulus(7, 2);
        let ctx = SumContext::new(&m).unwrap();
        for (a, b) in [(2u64, 3u64), (5, 11), (4, 45)] {
            let ab = ctx.full_sum(&unit(a, &m), &unit(b, &m)).unwrap();
            let ba = ctx.full_sum(&unit(b, &m), &unit(a, &m)).unwrap();
            assert!((ab - ba).abs() < 1e-9);
        }
    }

    #[test]
    fn full_sum_depends_only_on_ab() {
        for (p, n) in [(3u64, 2u32), (5, 2), (3, 3), (7, 2)] {
            let m = modulus(p, n);
            let ctx = SumContext::new(&m).unwrap();
            let units: Vec<UnitResidue> = modarith::units_iter(m).collect();
            for a in &units {
                for c in &units {
                    let cbar = modarith::inv_mod(c);
                    let lhs = ctx.full_sum(a, &unit(1, &m)).unwrap();
                    let rhs = ctx.full_sum(&a.mul(c).unwrap(), &cbar).unwrap();
                    assert!((lhs - rhs).abs() < 1e-9, "p={p} n={n} a={} c={}", a.value(), c.value());
                }
            }
        }
    }

    #[test]
    fn partial_sums_first_and_last() {
        let m = modulus(5, 2);
        let ctx = SumContext::new(&m).unwrap();
        let a = unit(3, &m);
        let b = unit(7, &m);
        let series = ctx.partial_sums(&a, &b).unwrap();
        assert_eq!(series.len() as u64, m.phi());
        let first = modarith::e_q((a.value() + b.value()) as i128, &m) / m.normalization();
        assert!((series.values()[0] - first).norm() < 1e-14);
        let full = ctx.full_sum_complex(&a, &b).unwrap();
        assert!((series.full() - full).norm() < 1e-12);
    }

    #[test]
    fn partial_sum_increments_have_unit_modulus() {
        let m = modulus(7, 2);
        let ctx = SumContext::new(&m).unwrap();
        let series = ctx.partial_sums(&unit(2, &m), &unit(3, &m)).unwrap();
        let step = 1.0 / m.normalization();
        let mut prev = Complex64::new(0.0, 0.0);
        for &v in series.values() {
            assert!(((v - prev).norm() - step).abs() < 1e-12);
            prev = v;
        }
    }

    #[test]
    fn bulk_partial_matches_per_a() {
        let m = modulus(5, 2);
        let ctx = SumContext::new(&m).unwrap();
        let b = unit(7, &m);
        let prefixes = [1u64, 6, 13, 24, 11];
        let bulk = ctx.bulk_partial_sums(&b, &prefixes).unwrap();
        for (rank, a) in modarith::units_iter(m).enumerate() {
            let series = ctx.partial_sums(&a, &b).unwrap();
            for (pi, &j) in prefixes.iter().enumerate() {
                let expected = series.value_at_cutoff(j);
                assert!((bulk.value(rank, pi) - expected).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn bulk_partial_rejects_bad_prefixes() {
        let m = modulus(5, 2);
        let ctx = SumContext::new(&m).unwrap();
        let b = unit(1, &m);
        assert!(matches!(
            ctx.bulk_partial_sums(&b, &[5]),
            Err(Error::PrefixNotCoprime(5))
        ));
        assert!(matches!(
            ctx.bulk_partial_sums(&b, &[0]),
            Err(Error::PrefixNotCoprime(0))
        ));
        assert!(matches!(
            ctx.bulk_partial_sums(&b, &[25]),
            Err(Error::PrefixNotCoprime(25))
        ));
    }

    #[test]
    fn bulk_full_sums_match_direct() {
        for (p, n) in [(3u64, 2u32), (5, 2), (7, 2), (3, 3)] {
            let m = modulus(p, n);
            let ctx = SumContext::new(&m).unwrap();
            for b in modarith::units_iter(m) {
                let table = ctx.bulk_full_sums(&b).unwrap();
                for a in modarith::units_iter(m) {
                    let direct = ctx.full_sum_complex(&a, &b).unwrap();
                    assert!(
                        (table[a.value() as usize] - direct).norm() < 1e-9,
                        "p={p} n={n} a={} b={}",
                        a.value(),
                        b.value()
                    );
                }
            }
        }
    }

    #[test]
    fn prime_case_real_and_bounded_exhaustively() {
        for p in [3u64, 5, 7, 11, 13] {
            let m = modulus(p, 1);
            let ctx = SumContext::new(&m).unwrap();
            for a in modarith::units_iter(m) {
                for b in modarith::units_iter(m) {
                    let v = ctx.full_sum_complex(&a, &b).unwrap();
                    assert!(v.im.abs() <= 1e-9 * (m.phi() as f64).sqrt());
                    assert!(v.norm() <= 2.0 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn vanishing_at_non_residues() {
        for (p, n) in [(3u64, 2u32), (5, 2), (7, 2), (3, 3), (5, 3), (7, 3)] {
            let m = modulus(p, n);
            let ctx = SumContext::new(&m).unwrap();
            let b = unit(1, &m);
            let table = ctx.bulk_full_sums(&b).unwrap();
            for a in modarith::units_iter(m) {
                let ab = a.value() % p;
                if legendre(ab, p) == p - 1 {
                    assert!(
                        table[a.value() as usize].norm() < 1e-9,
                        "expected vanishing at p={p} n={n} a={}",
                        a.value()
                    );
                }
            }
        }
    }

    #[test]
    fn salie_reference_matches_direct() {
        for (p, n) in [(3u64, 2u32), (5, 2), (7, 2), (11, 2), (13, 2), (3, 3), (5, 3), (7, 3)] {
            let m = modulus(p, n);
            let ctx = SumContext::new(&m).unwrap();
            let b = unit(1, &m);
            let table = ctx.bulk_full_sums(&b).unwrap();
            for a in modarith::units_iter(m) {
                let closed = salie_reference(&a, &b, &m).unwrap();
                let direct = table[a.value() as usize];
                assert!(
                    (closed - direct.re).abs() < 1e-9 && direct.im.abs() < 1e-9,
                    "p={p} n={n} a={}: closed {closed} vs direct {direct}",
                    a.value()
                );
            }
        }
    }

    #[test]
    fn salie_reference_rejects_n1() {
        let m = modulus(5, 1);
        let a = unit(1, &m);
        assert!(matches!(
            salie_reference(&a, &a, &m),
            Err(Error::ClosedFormRequiresPower(1))
        ));
    }

    #[test]
    fn short_sum_full_period_is_full_sum() {
        let m = modulus(7, 2);
        let ctx = SumContext::new(&m).unwrap();
        let a = unit(3, &m);
        let b = unit(5, &m);
        let sweep = ctx.sweep(&b).unwrap();
        let window = sweep.short_sum_complex(&a, 0, m.q()).unwrap();
        let full = ctx.full_sum_complex(&a, &b).unwrap() * m.normalization();
        assert!((window - full).norm() < 1e-10);
    }

    #[test]
    fn context_rejects_oversized_modulus() {
        let m = modulus(2097593, 1); // prime just above the table limit
        assert!(matches!(SumContext::new(&m), Err(Error::DeskScaleExceeded { .. })));
    }
}
