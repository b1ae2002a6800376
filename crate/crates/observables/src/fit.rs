use nalgebra::{DMatrix, DVector, Matrix4};

use crate::error::ObservablesError;

/// y = amplitude * sin(omega t + phase) + offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationFit {
    /// Angular frequency.
    pub omega: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub offset: f64,
    /// Standard errors of (amplitude, omega, phase, offset) from the Jacobian.
    pub std_err: [f64; 4],
    /// Angular frequency of the spectral peak used as the starting guess.
    pub spectral_omega: f64,
    pub rms_residual: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityFit {
    /// Slope of the period-averaged centroid.
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub periods: usize,
    pub averaged: Vec<(f64, f64)>,
}

impl VelocityFit {
    /// Group velocity in the envelope-equation convention, where the centroid obeys
    /// <x>(t) = x(0) - int v_g dt.
    pub fn group_velocity(&self) -> f64 {
        -self.slope
    }

    /// Largest |<x> - <x>(first period)| over the averaged series.
    pub fn max_drift(&self) -> f64 {
        let y0 = self.averaged.first().map(|p| p.1).unwrap_or(0.0);
        self.averaged.iter().map(|p| (p.1 - y0).abs()).fold(0.0, f64::max)
    }
}

fn check_series(t: &[f64], y: &[f64], min_len: usize) -> Result<(), ObservablesError> {
    if t.len() != y.len() {
        return Err(ObservablesError::LengthMismatch(format!("t has {}, y has {}", t.len(), y.len())));
    }
    if t.len() < min_len {
        return Err(ObservablesError::InsufficientData(format!("need at least {min_len} samples, got {}", t.len())));
    }
    for (i, w) in t.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(ObservablesError::NonMonotonicTime { index: i + 1 });
        }
    }
    Ok(())
}

pub fn linear_fit(t: &[f64], y: &[f64]) -> Result<LinearFit, ObservablesError> {
    check_series(t, y, 2)?;
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in t.iter().zip(y) {
        stt += (a - tm) * (a - tm);
        sty += (a - tm) * (b - ym);
        syy += (b - ym) * (b - ym);
    }
    let slope = sty / stt;
    let intercept = ym - slope * tm;
    let r2 = if syy > 0.0 { sty * sty / (stt * syy) } else { 1.0 };
    Ok(LinearFit { slope, intercept, r2 })
}

/// Means of t and y over consecutive whole periods starting at t[0]. Samples at
/// the period boundary belong to the earlier period.
pub fn period_average(t: &[f64], y: &[f64], period: f64) -> Result<Vec<(f64, f64)>, ObservablesError> {
    check_series(t, y, 2)?;
    if !(period > 0.0) {
        return Err(ObservablesError::InsufficientData(format!("period must be > 0, got {period}")));
    }
    let t0 = t[0];
    let span = t[t.len() - 1] - t0;
    let whole = ((span / period) + 1e-9).floor() as usize;
    let mut out = Vec::with_capacity(whole);
    for j in 0..whole {
        let lo = t0 + j as f64 * period;
        let hi = lo + period;
        let eps = 1e-9 * period;
        let (mut st, mut sy, mut k) = (0.0, 0.0, 0usize);
        for (a, b) in t.iter().zip(y) {
            if *a > lo + eps && *a <= hi + eps {
                st += a;
                sy += b;
                k += 1;
            }
        }
        if k > 0 {
            out.push((st / k as f64, sy / k as f64));
        }
    }
    Ok(out)
}

/// Linear drift of the centroid after averaging over whole drive periods.
pub fn fit_group_velocity(
    t: &[f64],
    mean_x: &[f64],
    period: f64,
    min_r2: Option<f64>,
) -> Result<VelocityFit, ObservablesError> {
    let averaged = period_average(t, mean_x, period)?;
    if averaged.len() < 2 {
        return Err(ObservablesError::InsufficientData(format!("need two whole periods, got {}", averaged.len())));
    }
    let ta: Vec<f64> = averaged.iter().map(|p| p.0).collect();
    let ya: Vec<f64> = averaged.iter().map(|p| p.1).collect();
    let lf = linear_fit(&ta, &ya)?;
    if let Some(min) = min_r2 {
        if lf.r2 < min {
            return Err(ObservablesError::PoorLinearFit { r2: lf.r2, min });
        }
    }
    Ok(VelocityFit { slope: lf.slope, intercept: lf.intercept, r2: lf.r2, periods: averaged.len(), averaged })
}

fn power(t: &[f64], yc: &[f64], w: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (a, b) in t.iter().zip(yc) {
        let (s, c) = (w * a).sin_cos();
        re += b * c;
        im -= b * s;
    }
    re * re + im * im
}

/// Best (alpha, beta, c) for y = alpha sin wt + beta cos wt + c; returns (ss, coeffs).
fn project(t: &[f64], y: &[f64], w: f64) -> (f64, [f64; 3]) {
    let mut m = nalgebra::Matrix3::<f64>::zeros();
    let mut r = nalgebra::Vector3::<f64>::zeros();
    for (a, b) in t.iter().zip(y) {
        let (s, c) = (w * a).sin_cos();
        let v = nalgebra::Vector3::new(s, c, 1.0);
        m += v * v.transpose();
        r += v * *b;
    }
    let sol = m.lu().solve(&r).unwrap_or_else(nalgebra::Vector3::zeros);
    let mut ss = 0.0;
    for (a, b) in t.iter().zip(y) {
        let (s, c) = (w * a).sin_cos();
        let e = b - (sol[0] * s + sol[1] * c + sol[2]);
        ss += e * e;
    }
    (ss, [sol[0], sol[1], sol[2]])
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Least-squares sinusoid with a starting frequency from the zero-padded
/// discrete spectrum (quadratic peak interpolation). Needs >= 4 samples per
/// period and about two periods of data.
pub fn fit_oscillation(t: &[f64], y: &[f64]) -> Result<OscillationFit, ObservablesError> {
    check_series(t, y, 8)?;
    let n = t.len();
    let span = t[n - 1] - t[0];
    let mean_dt = span / (n - 1) as f64;
    let ym = y.iter().sum::<f64>() / n as f64;
    let yc: Vec<f64> = y.iter().map(|v| v - ym).collect();
    let pad = 8usize;
    let dw = 2.0 * std::f64::consts::PI / (span * pad as f64);
    let w_nyq = std::f64::consts::PI / mean_dt;
    let jmax = ((w_nyq / dw) as usize).min(pad * n);
    let spec: Vec<f64> = (0..=jmax).map(|j| power(t, &yc, j as f64 * dw)).collect();
    // main peak, skipping the zero-frequency bin
    let (jp, pmax) = spec.iter().enumerate().skip(1).fold((1usize, f64::NEG_INFINITY), |acc, (j, &p)| {
        if p > acc.1 {
            (j, p)
        } else {
            acc
        }
    });
    if !(pmax > 0.0) {
        return Err(ObservablesError::InsufficientData("series has no oscillating component".into()));
    }
    // runner-up local maximum outside the main lobe
    let lobe = 2 * pad;
    let mut runner = (0usize, 0.0f64);
    for j in 1..spec.len().saturating_sub(1) {
        if j.abs_diff(jp) > lobe && spec[j] > spec[j - 1] && spec[j] >= spec[j + 1] && spec[j] > runner.1 {
            runner = (j, spec[j]);
        }
    }
    if runner.1 > 0.8 * pmax {
        return Err(ObservablesError::AmbiguousPeak {
            main: jp as f64 * dw,
            runner_up: runner.0 as f64 * dw,
            ratio: runner.1 / pmax,
        });
    }
    let mut w0 = jp as f64 * dw;
    if jp + 1 < spec.len() {
        let (l, c, r) = (spec[jp - 1], spec[jp], spec[jp + 1]);
        let den = l - 2.0 * c + r;
        if den < 0.0 {
            w0 += 0.5 * (l - r) / den * dw;
        }
    }
    let periods = w0 * span / (2.0 * std::f64::consts::PI);
    if periods < 2.0 * 0.95 {
        return Err(ObservablesError::InsufficientData(format!("only {periods:.2} periods of data")));
    }
    if w0 * mean_dt > 2.0 * std::f64::consts::PI / 4.0 {
        return Err(ObservablesError::InsufficientData("fewer than 4 samples per period".into()));
    }
    let ss = |w: f64| project(t, y, w).0;
    let half = 2.0 * pad as f64 * dw;
    let (lo, hi) = ((w0 - half).max(dw), w0 + half);
    let w = golden_min(&ss, lo, hi);
    if (w - lo).abs() < 1e-6 * half || (hi - w).abs() < 1e-6 * half {
        return Err(ObservablesError::NonConvergence(format!("frequency search hit the bracket edge at {w}")));
    }
    let (ssr, [al, be, c]) = project(t, y, w);
    let amplitude = (al * al + be * be).sqrt();
    let phase = be.atan2(al);
    let sst: f64 = yc.iter().map(|v| v * v).sum();
    let mut jtj = Matrix4::<f64>::zeros();
    for a in t {
        let arg = w * a + phase;
        let (s, co) = arg.sin_cos();
        let g = nalgebra::Vector4::new(s, amplitude * a * co, amplitude * co, 1.0);
        jtj += g * g.transpose();
    }
    let sigma2 = ssr / (n as f64 - 4.0).max(1.0);
    let std_err = match jtj.try_inverse() {
        Some(inv) => [
            (inv[(0, 0)] * sigma2).sqrt(),
            (inv[(1, 1)] * sigma2).sqrt(),
            (inv[(2, 2)] * sigma2).sqrt(),
            (inv[(3, 3)] * sigma2).sqrt(),
        ],
        None => [f64::NAN; 4],
    };
    Ok(OscillationFit {
        omega: w,
        amplitude,
        phase,
        offset: c,
        std_err,
        spectral_omega: w0,
        rms_residual: (ssr / n as f64).sqrt(),
        r2: if sst > 0.0 { 1.0 - ssr / sst } else { 1.0 },
    })
}

/// Amplitudes of the harmonics p * base_omega, p = 1..=p_max, from a joint linear
/// least-squares fit with an offset and a linear trend.
pub fn harmonic_amplitudes(t: &[f64], y: &[f64], base_omega: f64, p_max: usize) -> Result<Vec<f64>, ObservablesError> {
    check_series(t, y, 2 * p_max + 3)?;
    let cols = 2 * p_max + 2;
    let a = DMatrix::<f64>::from_fn(t.len(), cols, |i, j| match j {
        0 => 1.0,
        1 => t[i] - t[0],
        _ => {
            let p = ((j - 2) / 2 + 1) as f64;
            let arg = p * base_omega * t[i];
            if (j - 2) % 2 == 0 {
                arg.sin()
            } else {
                arg.cos()
            }
        }
    });
    let b = DVector::from_column_slice(y);
    let sol = (a.transpose() * &a)
        .lu()
        .solve(&(a.transpose() * b))
        .ok_or_else(|| ObservablesError::NonConvergence("singular harmonic design matrix".into()))?;
    Ok((0..p_max).map(|k| (sol[2 + 2 * k].powi(2) + sol[3 + 2 * k].powi(2)).sqrt()).collect())
}
