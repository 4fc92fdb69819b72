//! Time quadrature for sampled diagnostics and for analytic integrands.

/// `∫_a^b f` by adaptive Simpson with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let c = 0.5 * (a + b);
    let fc = f(c);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    refine(f, a, b, fa, fb, fc, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let c = 0.5 * (a + b);
    let (d, e) = (0.5 * (a + c), 0.5 * (c + b));
    let (fd, fe) = (f(d), f(e));
    let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, c, fa, fc, fd, left, tol / 2.0, depth - 1) + refine(f, c, b, fc, fb, fe, right, tol / 2.0, depth - 1)
}

/// Trapezoid rule over `(t_i, y_i)` up to `upto`, interpolating linearly
/// inside the last interval. Returns `None` when `upto` lies beyond the data.
pub fn trapezoid_upto(times: &[f64], values: &[f64], upto: f64) -> Option<f64> {
    debug_assert_eq!(times.len(), values.len());
    let last = *times.last()?;
    if upto > last * (1.0 + 1e-12) + 1e-300 {
        return None;
    }
    let mut sum = 0.0;
    for i in 1..times.len() {
        let (t0, t1) = (times[i - 1], times[i]);
        if t0 >= upto {
            break;
        }
        let (y0, y1) = (values[i - 1], values[i]);
        if t1 <= upto {
            sum += 0.5 * (t1 - t0) * (y0 + y1);
        } else {
            let y = y0 + (y1 - y0) * (upto - t0) / (t1 - t0);
            sum += 0.5 * (upto - t0) * (y0 + y);
        }
    }
    Some(sum)
}

/// Running trapezoid integrals `∫_0^{t_i} y` at every sample.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for i in 0..times.len() {
        if i > 0 {
            acc += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_handles_smooth_integrands() {
        let v = adaptive_simpson(&mut |t: f64| (-3.0 * t).exp(), 0.0, 2.0, 1e-13);
        let want = (1.0 - (-6.0f64).exp()) / 3.0;
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_is_exact_for_linear_data() {
        let t = [0.0, 0.5, 1.0, 2.0];
        let y: Vec<f64> = t.iter().map(|x| 1.0 + 2.0 * x).collect();
        assert!((trapezoid_upto(&t, &y, 2.0).unwrap() - 6.0).abs() < 1e-14);
        assert!((trapezoid_upto(&t, &y, 1.5).unwrap() - 3.75).abs() < 1e-14);
        assert!(trapezoid_upto(&t, &y, 2.5).is_none());
        let c = cumulative_trapezoid(&t, &y);
        assert_eq!(c[0], 0.0);
        assert!((c[3] - 6.0).abs() < 1e-14);
    }
}
