use ws_lattice::Complex64;

/// One classical RK4 step of y' = f(t, y), in place. `work` holds four scratch vectors.
pub fn rk4_step<F>(f: &mut F, t: f64, h: f64, y: &mut [Complex64], work: &mut [Vec<Complex64>; 4])
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y.len();
    for w in work.iter_mut() {
        w.resize(n, Complex64::new(0.0, 0.0));
    }
    let [k1, k2, k3, tmp] = work;
    f(t, y, k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    f(t + 0.5 * h, tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i]);
    }
    f(t + 0.5 * h, tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] - h / 6.0 * (k1[i] + 2.0 * k2[i]) + h * k3[i];
        y[i] += h / 3.0 * k3[i];
    }
    f(t + h, tmp, k1);
    for i in 0..n {
        y[i] += h / 6.0 * k1[i];
    }
}
