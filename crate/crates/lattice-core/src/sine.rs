//! Orthonormal DST-I through a complex FFT of the odd extension.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// DST-I on `n - 1` points (n = number of grid intervals). Orthonormal, so it is
/// its own inverse: S[k] = sqrt(2/n) sum_j x[j] sin(pi j k / n).
pub struct SineTransform {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
    scale: f64,
}

impl Clone for SineTransform {
    fn clone(&self) -> Self {
        SineTransform {
            n: self.n,
            fft: Arc::clone(&self.fft),
            buf: self.buf.clone(),
            scratch: self.scratch.clone(),
            scale: self.scale,
        }
    }
}

impl SineTransform {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "sine transform needs n >= 2");
        let fft = FftPlanner::new().plan_fft_forward(2 * n);
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        SineTransform { n, fft, buf: vec![Complex64::new(0.0, 0.0); 2 * n], scratch, scale: (2.0 / n as f64).sqrt() }
    }

    /// Number of transformed values, n - 1.
    pub fn len(&self) -> usize {
        self.n - 1
    }

    pub fn is_empty(&self) -> bool {
        self.n < 2
    }

    pub fn apply(&mut self, data: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(data.len(), n - 1, "sine transform length mismatch");
        let zero = Complex64::new(0.0, 0.0);
        self.buf[0] = zero;
        self.buf[n] = zero;
        for j in 1..n {
            let v = data[j - 1];
            self.buf[j] = v;
            self.buf[2 * n - j] = -v;
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        // Y[k] = -2i sum_j x_j sin(pi j k / n)
        let f = 0.5 * self.scale;
        for k in 1..n {
            let y = self.buf[k];
            data[k - 1] = Complex64::new(-y.im * f, y.re * f);
        }
    }
}
