//! Complex discrete Fourier transform for lengths p^n, by radix-p decimation
//! in time. Used to accelerate sweeps of full sums over all residues a; the
//! per-a direct summation remains the contract it is tested against.

use std::sync::Arc;

use num_complex::Complex64;

/// Forward transform X[k] = sum_x v[x] e(kx/len) for len = p^n.
pub(crate) struct PrimePowerDft {
    p: usize,
    len: usize,
    /// len-th roots of unity, roots[j] = e(j/len).
    roots: Arc<Vec<Complex64>>,
}

impl PrimePowerDft {
    pub fn new(p: usize, len: usize, roots: Arc<Vec<Complex64>>) -> Self {
        debug_assert_eq!(roots.len(), len);
        debug_assert!({
            let mut l = len;
            while l.is_multiple_of(p) {
                l /= p;
            }
            l == 1
        });
        Self { p, len, roots }
    }

    pub fn forward(&self, input: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(input.len(), self.len);
        self.recurse(input, 1)
    }

    /// `stride` = len / (current sub-length), so the sub-length's primitive
    /// root is roots[stride].
    fn recurse(&self, v: &[Complex64], stride: usize) -> Vec<Complex64> {
        let n = v.len();
        if n == 1 {
            return vec![v[0]];
        }
        let p = self.p;
        let m = n / p;
        let subs: Vec<Vec<Complex64>> = (0..p)
            .map(|r| {
                let sub: Vec<Complex64> = (0..m).map(|i| v[r + i * p]).collect();
                self.recurse(&sub, stride * p)
            })
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (k, slot) in out.iter_mut().enumerate() {
            let base = k % m;
            let mut acc = subs[0][base];
            for (r, sub) in subs.iter().enumerate().skip(1) {
                let w = self.roots[(r * k) % n * stride];
                acc += w * sub[base];
            }
            *slot = acc;
        }
        out
    }
}
