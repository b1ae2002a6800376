//! Bessel functions of the first kind, integer order, by Miller's backward recurrence.

/// J_0(z) .. J_{n_max}(z).
pub fn bessel_j_all(n_max: usize, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let x = z.abs();
    // start well above both the order and the argument
    let top = n_max.max(x as usize);
    let start = 2 * ((top + 16 + (40.0 * (top as f64 + 1.0)).sqrt() as usize) / 2);
    let (mut jp1, mut j) = (0.0f64, 1e-300f64);
    let mut even_sum = 0.0;
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        if k - 1 <= n_max {
            out[k - 1] = j;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            even_sum += j;
        }
        if j.abs() > 1e250 {
            jp1 *= 1e-250;
            j *= 1e-250;
            even_sum *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let norm = j + 2.0 * even_sum;
    for (n, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if z < 0.0 && n % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// J_n(z) for any integer n; J_{-n} = (-1)^n J_n.
pub fn bessel_j(n: i64, z: f64) -> f64 {
    let m = n.unsigned_abs() as usize;
    let v = bessel_j_all(m, z)[m];
    if n < 0 && m % 2 == 1 {
        -v
    } else {
        v
    }
}
