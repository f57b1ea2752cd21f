//! Classical fixed-step fourth-order Runge-Kutta on small real systems.

/// One RK4 step of size `h` for y' = f(t, y).
pub fn rk4_step<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &offset(y, &k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &offset(y, &k2, 0.5 * h));
    let k4 = f(t + h, &offset(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn offset<const N: usize>(y: &[f64; N], k: &[f64; N], h: f64) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += h * k[i];
    }
    out
}

/// Integrates from (t0, y0) forward through the sorted `times`, taking fixed
/// steps of at most `step` and landing exactly on every requested time.
/// Returns the state at each requested time.
pub fn integrate_to_times<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    times: &[f64],
    step: f64,
) -> Vec<[f64; N]> {
    assert!(step > 0.0, "step must be positive");
    let mut t = t0;
    let mut y = y0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        assert!(target >= t - 1e-15, "times must be sorted and >= t0");
        while target - t > 1e-12 * (1.0 + target.abs()) {
            let h = step.min(target - t);
            y = rk4_step(f, t, &y, h);
            t += h;
        }
        t = target;
        out.push(y);
    }
    out
}
