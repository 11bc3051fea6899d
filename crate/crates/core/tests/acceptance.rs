//! Acceptance suite: one test per criterion. Each test prints a single
//! `[acceptance] criterion N (<name>): PASS` line once its assertions hold;
//! run with `--nocapture` to see every line.

use std::sync::OnceLock;

use klpath_core::{
    bounds, compare_laws, fourier_coeff, interval_between, log_gap_grid, moment_batch, units_iter,
    Complex64, MuSampler, PathFunction, PathMarginal, PrimePowerModulus, RationalTime, Report,
    SumContext, TightnessScanConfig, UnitResidue,
};

fn pass(number: u32, name: &str) {
    println!("[acceptance] criterion {number} ({name}): PASS");
}

fn modulus(p: u64, n: u32) -> PrimePowerModulus {
    PrimePowerModulus::new(p, n).unwrap()
}

fn unit(v: u64, m: &PrimePowerModulus) -> UnitResidue {
    UnitResidue::new(v, m).unwrap()
}

/// splitmix64 for reproducible test-local randomness.
fn next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

// ---------------------------------------------------------------------------
// shared full-sum matrices for the exhaustive boundedness/symmetry grid
// ---------------------------------------------------------------------------

struct FullMatrix {
    m: PrimePowerModulus,
    units: Vec<u64>,
    /// unit value -> rank, usize::MAX at non-units
    rank_of: Vec<usize>,
    /// rows[b_rank][a_value] = Kl(a, b), complex with accumulated rounding
    rows: Vec<Vec<Complex64>>,
}

fn full_matrices() -> &'static Vec<FullMatrix> {
    static MATRICES: OnceLock<Vec<FullMatrix>> = OnceLock::new();
    MATRICES.get_or_init(|| {
        let mut out = Vec::new();
        for p in [3u64, 5, 7, 11, 13] {
            for n in [2u32, 3] {
                let m = modulus(p, n);
                let ctx = SumContext::new(&m).unwrap();
                let units: Vec<u64> = units_iter(m).map(|u| u.value()).collect();
                let mut rank_of = vec![usize::MAX; m.q() as usize];
                for (rank, &u) in units.iter().enumerate() {
                    rank_of[u as usize] = rank;
                }
                let rows: Vec<Vec<Complex64>> = units
                    .iter()
                    .map(|&b| ctx.bulk_full_sums(&unit(b, &m)).unwrap())
                    .collect();
                out.push(FullMatrix { m, units, rank_of, rows });
            }
        }
        out
    })
}

#[test]
fn c01_boundedness() {
    let mut pairs = 0u64;
    let mut expected = 0u64;
    for mat in full_matrices() {
        expected += mat.m.phi() * mat.m.phi();
        for row in &mat.rows {
            for &a in &mat.units {
                let v = row[a as usize];
                assert!(
                    v.norm() <= 2.0 + 1e-9,
                    "|Kl| = {} > 2 at q = {}",
                    v.norm(),
                    mat.m.q()
                );
                pairs += 1;
            }
        }
    }
    assert_eq!(pairs, expected, "the grid must cover every unit pair exhaustively");
    pass(1, "boundedness |Kl| <= 2 on the exhaustive grid");
}

#[test]
fn c02_realness_and_symmetry() {
    for mat in full_matrices() {
        let tol_im = 1e-9 * (mat.m.phi() as f64).sqrt();
        for (b_rank, row) in mat.rows.iter().enumerate() {
            let b = mat.units[b_rank];
            for &a in &mat.units {
                let v = row[a as usize];
                assert!(v.im.abs() <= tol_im, "Im = {} at q = {}", v.im, mat.m.q());
                let swapped = mat.rows[mat.rank_of[a as usize]][b as usize];
                assert!(
                    (v.re - swapped.re).abs() <= 1e-9,
                    "Kl(a,b) != Kl(b,a) at q = {}: {} vs {}",
                    mat.m.q(),
                    v.re,
                    swapped.re
                );
            }
        }
    }
    pass(2, "full sums real and symmetric in (a, b)");
}

#[test]
fn c03_zero_mass_exactly_half() {
    for p in [3u64, 5, 7, 11] {
        let m = modulus(p, 2);
        let ctx = SumContext::new(&m).unwrap();
        let b0 = unit(1, &m);
        let sweep = ctx.sweep(&b0).unwrap();
        let zeros = units_iter(m)
            .filter(|a| sweep.full_sum_complex(a).unwrap().norm() < 1e-9)
            .count() as u64;
        assert_eq!(2 * zeros, m.phi(), "p = {p}: {zeros} vanishing sums of {}", m.phi());
    }
    pass(3, "vanishing fraction is exactly 1/2 at t = 1");
}

#[test]
fn c04_path_identities() {
    const GRID: u64 = 10_000;
    for p in [5u64, 7, 11, 13] {
        let m = modulus(p, 2);
        let ctx = SumContext::new(&m).unwrap();
        let b0 = unit(1, &m);
        let sweep = ctx.sweep(&b0).unwrap();
        let segments = m.phi() - 1;
        let slope_expected = segments as f64 / m.normalization();
        let gap_bound = 6.0 / m.normalization();
        for a in units_iter(m) {
            let path = PathFunction::new(sweep.partial_sums(&a).unwrap());
            for s in path.slopes() {
                assert!(
                    (s.norm() - slope_expected).abs() <= 1e-9 * slope_expected,
                    "slope magnitude off at p = {p}, a = {}",
                    a.value()
                );
            }
            for j in 1..=segments {
                let t = RationalTime::new(j, segments).unwrap();
                let v = path.eval(t).unwrap();
                assert!(
                    (v - path.knots()[j as usize]).norm() <= 1e-12,
                    "knot mismatch at p = {p}, j = {j}"
                );
            }
            // the grid lives on (0, 1]; the step function is defined blockwise
            for i in 1..=GRID {
                let t = RationalTime::new(i, GRID).unwrap();
                let gap = (path.eval(t).unwrap() - path.step_eval(t).unwrap()).norm();
                assert!(
                    gap <= gap_bound,
                    "approximation gap {gap} > {gap_bound} at p = {p}, a = {}, t = {i}/{GRID}",
                    a.value()
                );
            }
        }
    }
    pass(4, "slopes, knots, and 6 q^(-1/2) approximation gap");
}

#[test]
fn c05_plancherel_sigma() {
    let m = modulus(7, 2);
    let q = m.q();
    let mut state = 0x05AC_CE97u64;
    let mut checked = 0u32;
    while checked < 1_000 {
        let den = 10_000u64;
        let x = next(&mut state) % den;
        let y = next(&mut state) % den;
        let (lo, hi) = if x < y { (x, y) } else { (y, x + 1) };
        if hi > den || lo == 0 {
            continue;
        }
        let s = RationalTime::new(lo, den).unwrap();
        let t = RationalTime::new(hi, den).unwrap();
        if s.cmp_exact(&t) != std::cmp::Ordering::Less {
            continue;
        }
        let mut coeff_mass = 0.0;
        for h in 0..q {
            let d = fourier_coeff(h as i64, t, &m).unwrap() - fourier_coeff(h as i64, s, &m).unwrap();
            coeff_mass += d.norm_sqr();
        }
        let sigma_sq_coeff = 4.0 * coeff_mass / q as f64;
        let iv = interval_between(s, t, &m).unwrap();
        let sigma_sq_plancherel = 4.0 * iv.cardinality as f64 / q as f64;
        assert!(
            (sigma_sq_coeff - sigma_sq_plancherel).abs() <= 1e-8 * q as f64,
            "sigma^2 routes disagree: {sigma_sq_coeff} vs {sigma_sq_plancherel}"
        );
        checked += 1;
    }
    pass(5, "sigma^2 coefficient sum vs 4|I|/q on 1000 random pairs");
}

#[test]
fn c06_small_gap_moment_bound() {
    const PAIRS: usize = 1_000;
    for p in [5u64, 7, 11] {
        let m = modulus(p, 2);
        let ctx = SumContext::new(&m).unwrap();
        let b0 = unit(1, &m);
        let segments = m.phi() - 1;
        let factor = 64u64;
        let den = segments * factor;
        let mut state = 0x60D5 ^ p;
        let mut pairs = Vec::with_capacity(PAIRS);
        while pairs.len() < PAIRS {
            // gap_num <= factor keeps t - s <= 1/(phi - 1) exactly
            let gap_num = 1 + next(&mut state) % factor;
            let s_num = next(&mut state) % (den - gap_num + 1);
            pairs.push((
                RationalTime::new(s_num, den).unwrap(),
                RationalTime::new(s_num + gap_num, den).unwrap(),
            ));
        }
        for alpha in [2u32, 4, 6, 8] {
            let values = moment_batch(&pairs, alpha, &b0, &ctx).unwrap();
            for ((s, t), value) in pairs.iter().zip(values.iter()) {
                let gap = (t.num() - s.num()) as f64 / den as f64;
                let bound = 2f64.powi(alpha as i32) * gap.powf(alpha as f64 / 2.0);
                assert!(
                    *value <= bound,
                    "small-gap bound violated at p = {p}, alpha = {alpha}: {value} > {bound}"
                );
            }
        }
    }
    pass(6, "exact small-gap moment bound, zero violations");
}

#[test]
fn c07_tightness_scaling_slope() {
    let m = modulus(101, 2);
    let ctx = SumContext::new(&m).unwrap();
    let b0 = unit(1, &m);
    let phi = m.phi() as f64;
    let cfg = TightnessScanConfig {
        alpha: 4,
        gaps: log_gap_grid(10.0 / phi, 0.1, 12),
        samples_per_gap: 40,
        grid_factor: 64,
        seed: 7,
    };
    let report = klpath_core::tightness_scan(&ctx, &b0, &cfg).unwrap();
    let slope = report.fitted_slope.expect("twelve nonzero gap means");
    println!("[acceptance]   fitted log-log slope of M_4: {slope:.4}");
    assert!(slope >= 1.2, "fitted slope {slope} below 1.2");
    assert!(report.violations.is_empty());
    pass(7, "moment scaling slope >= 1.2 at p = 101, alpha = 4");
}

#[test]
fn c08_law_comparison_ks() {
    // the step marginal carries the exact zero atoms of the limit law; the
    // interpolated marginal smears them over q^(-1/2) and cannot converge in
    // KS near an atom (its re-distance tends to 1/4 here)
    let t_half = RationalTime::new(1, 2).unwrap();
    let mut previous: Option<(f64, f64)> = None;
    let mut last = (f64::NAN, f64::NAN);
    for p in [11u64, 31, 101] {
        let m = modulus(p, 2);
        let ctx = SumContext::new(&m).unwrap();
        let b0 = unit(1, &m);
        let report =
            compare_laws(&ctx, &b0, &[t_half], m.q(), 10_000, 20_240, PathMarginal::Step).unwrap();
        let ks = &report.ks[0];
        println!("[acceptance]   p = {p}: KS re = {:.4}, im = {:.4}", ks.re, ks.im);
        if let Some((prev_re, prev_im)) = previous {
            assert!(ks.re <= prev_re, "KS(re) increased from {prev_re} to {} at p = {p}", ks.re);
            assert!(ks.im <= prev_im, "KS(im) increased from {prev_im} to {} at p = {p}", ks.im);
        }
        previous = Some((ks.re, ks.im));
        last = (ks.re, ks.im);
    }
    assert!(last.0 <= 0.05 && last.1 <= 0.05, "KS at p = 101 above 0.05: {last:?}");
    pass(8, "KS distances non-increasing in p and <= 0.05 at p = 101");
}

#[test]
fn c09_mu_sampler_moments() {
    // quadrature oracle: x = 2 cos(pi v) turns the arcsine integral into a
    // smooth one; Simpson with 4096 panels is far below the statistical bands
    let oracle = |k: u32| -> f64 {
        let f = |v: f64| (2.0 * (std::f64::consts::PI * v).cos()).powi(k as i32);
        let panels = 4096usize;
        let h = 1.0 / panels as f64;
        let mut acc = f(0.0) + f(1.0);
        for i in 1..panels {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        0.5 * acc * h / 3.0
    };
    let sampler = MuSampler::new(0xACCE97);
    let n = 1_000_000u64;
    let (mut m1, mut m2, mut m4) = (0.0f64, 0.0f64, 0.0f64);
    for h in 0..n {
        let u = sampler.sample(h as i64);
        m1 += u;
        m2 += u * u;
        m4 += u * u * u * u;
    }
    let (m1, m2, m4) = (m1 / n as f64, m2 / n as f64, m4 / n as f64);
    let (e1, e2, e4, e8) = (oracle(1), oracle(2), oracle(4), oracle(8));
    assert!((e1.abs(), e2, e4) == (0.0, e2, e4) || e1.abs() < 1e-10);
    let nf = n as f64;
    assert!((m1 - e1).abs() <= 3.0 * (e2 / nf).sqrt(), "E[U] = {m1}");
    assert!((m2 - e2).abs() <= 3.0 * ((e4 - e2 * e2) / nf).sqrt(), "E[U^2] = {m2}");
    assert!((m4 - e4).abs() <= 3.0 * ((e8 - e4 * e4) / nf).sqrt(), "E[U^4] = {m4}");
    pass(9, "sampler moments 0, 1, 3 within 3 standard errors at 1e6 draws");
}

#[test]
fn c10_bounds_calculator() {
    // exact constants
    assert_eq!(bounds::KorolevConstants::GAMMA1, 900);
    assert_eq!(bounds::KorolevConstants::GAMMA2_NUM, 1);
    assert_eq!(bounds::KorolevConstants::GAMMA2_DEN, 655_360_000);
    assert_eq!(160u64.pow(4), 655_360_000);

    // condition false on the full desk grid: all odd primes p <= 10^4, every
    // exponent n <= 40 with q in 64 bits, any N below 2^63
    let mut sieve = vec![true; 10_001];
    sieve[0] = false;
    sieve[1] = false;
    for i in 2..=100usize {
        if sieve[i] {
            for j in (i * i..=10_000).step_by(i) {
                sieve[j] = false;
            }
        }
    }
    let ln2_63 = 63.0 * 2f64.ln();
    let mut moduli_checked = 0u64;
    for p in (3..=10_000u64).filter(|&p| sieve[p as usize]) {
        for n in 1..=40u32 {
            let Ok(m) = PrimePowerModulus::new(p, n) else { break };
            // the exponential threshold alone exceeds 2^63 for every q
            let threshold = 900.0 * (m.q() as f64).ln().powf(2.0 / 3.0);
            assert!(threshold > ln2_63, "threshold not vacuous at q = {}", m.q());
            for len in [1u64, 1 << 16, 1 << 32, 1 << 62, (1 << 63) - 1] {
                assert!(!bounds::korolev_condition(len, &m));
            }
            moduli_checked += 1;
        }
    }
    assert!(moduli_checked > 5_000, "desk grid unexpectedly small: {moduli_checked}");

    // delta window errors exactly when n <= 30
    for n in 1..=30u32 {
        assert!(bounds::delta_admissible_for(n).is_err(), "window should be empty at n = {n}");
    }
    for n in 31..=128u32 {
        assert!(bounds::delta_admissible_for(n).is_ok());
    }

    // exponent chain true on a 100-point grid up to delta_max
    for n in [31u32, 40, 64, 128] {
        let w = bounds::delta_admissible_for(n).unwrap();
        for i in 1..=100u32 {
            let delta = w.delta_max * (i as f64 / 100.0);
            assert!(
                bounds::exponent_chain_check_for(n, delta),
                "chain check failed at n = {n}, i = {i}"
            );
        }
    }
    pass(10, "constants exact, condition vacuous on the desk grid, window and chain");
}

#[test]
fn c11_determinism_across_thread_counts() {
    fn run_reports() -> (Vec<u8>, Vec<u8>) {
        let m = modulus(11, 2);
        let ctx = SumContext::new(&m).unwrap();
        let b0 = unit(1, &m);
        let cfg = TightnessScanConfig {
            alpha: 4,
            gaps: log_gap_grid(0.01, 0.2, 6),
            samples_per_gap: 12,
            grid_factor: 64,
            seed: 99,
        };
        let scan: Report = klpath_core::tightness_scan(&ctx, &b0, &cfg).unwrap().into();
        let law: Report = compare_laws(
            &ctx,
            &b0,
            &[RationalTime::new(1, 2).unwrap(), RationalTime::one()],
            m.q(),
            300,
            17,
            PathMarginal::Step,
        )
        .unwrap()
        .into();
        (scan.to_json(), law.to_json())
    }
    let mut outputs = Vec::new();
    for threads in [1usize, 3, 1] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        outputs.push(pool.install(run_reports));
    }
    assert_eq!(outputs[0], outputs[1], "thread count changed the report bytes");
    assert_eq!(outputs[0], outputs[2], "identical rerun changed the report bytes");
    pass(11, "byte-identical reports across thread counts and reruns");
}
