//! Adaptive Dormand–Prince 5(4) for small linear systems.

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

pub(crate) struct Controls {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

/// Integrates `y' = f(y)` from 0 to `t_final`, returning every accepted step
/// (including the initial point). `None` if `max_steps` is exhausted.
pub(crate) fn integrate<F>(f: F, y0: [f64; 4], t_final: f64, ctl: &Controls) -> Option<Vec<(f64, [f64; 4])>>
where
    F: Fn(&[f64; 4]) -> [f64; 4],
{
    let mut out = vec![(0.0, y0)];
    if t_final <= 0.0 {
        return Some(out);
    }
    let mut t = 0.0;
    let mut y = y0;
    let mut h = ctl.initial_step.min(t_final);
    let mut k = [[0.0; 4]; 7];
    k[0] = f(&y);
    for _ in 0..ctl.max_steps {
        if t >= t_final {
            return Some(out);
        }
        let last = h >= t_final - t;
        if last {
            h = t_final - t;
        }
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for i in 0..4 {
                    ys[i] += h * A[s][j] * kj[i];
                }
            }
            k[s] = f(&ys);
        }
        let mut y5 = y;
        let mut err = 0.0_f64;
        for i in 0..4 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let scale = ctl.atol + ctl.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (d5 - d4)).abs() / scale);
        }
        if err <= 1.0 {
            t = if last { t_final } else { t + h };
            y = y5;
            // FSAL: the last stage is f at the new point.
            k[0] = k[6];
            out.push((t, y));
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let ctl = Controls { rtol: 1e-10, atol: 1e-14, initial_step: 1e-3, max_steps: 100_000 };
        let traj = integrate(|y| [-y[0], -2.0 * y[1], 0.0, y[2]], [1.0, 1.0, 1.0, 0.0], 3.0, &ctl).unwrap();
        let (t, y) = *traj.last().unwrap();
        assert_eq!(t, 3.0);
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-10);
        assert!((y[1] - (-6.0f64).exp()).abs() < 1e-10);
        assert!((y[3] - 3.0).abs() < 1e-9);
    }
}
