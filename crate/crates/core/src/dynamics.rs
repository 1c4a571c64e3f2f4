//! Pauli rate equation over eigenstate populations.
//!
//! Each bath ν drives transitions between the odd and even sectors through
//! `σₓ^ν`. With a flat spectral strength `Γ_ν`, a transition releasing energy
//! `ω > 0` runs at `Γ_ν (n_B(ω) + 1) |S|²` and its reverse at
//! `Γ_ν n_B(ω) |S|²`, so each bath on its own satisfies detailed balance at
//! its temperature.

use crate::model::{EigenSystem, Side, TransitionTable};
use crate::ode::{self, Controls};
use crate::{Error, Matrix4c, Populations, Result, C64};

/// Smallest admissible transition frequency (units of `J`).
pub const OMEGA_MIN: f64 = 1e-9;

/// Couplings below this fraction of the largest are treated as absent when
/// checking that the transition graph is connected.
const COUPLING_FLOOR: f64 = 1e-14;

/// Residual bound (relative to the largest rate) for a population vector to
/// count as stationary.
pub(crate) const STATIONARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub t_left: f64,
    pub t_right: f64,
    pub gamma_left: f64,
    pub gamma_right: f64,
}

impl BathSpec {
    pub fn new(t_left: f64, t_right: f64, gamma_left: f64, gamma_right: f64) -> Result<Self> {
        let b = Self { t_left, t_right, gamma_left, gamma_right };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [("T_L", self.t_left), ("T_R", self.t_right)] {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidBath(format!("{name} = {t} must be finite and > 0")));
            }
        }
        for (name, g) in [("Gamma_L", self.gamma_left), ("Gamma_R", self.gamma_right)] {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::InvalidBath(format!("{name} = {g} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    pub fn temperature(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.t_left,
            Side::Right => self.t_right,
        }
    }

    pub fn gamma(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.gamma_left,
            Side::Right => self.gamma_right,
        }
    }
}

/// `1 / (e^{ω/T} − 1)`.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    1.0 / (omega / temperature).exp_m1()
}

/// Transition rates `W[n][m]` for `n → m`, split by bath.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    pub energies: [f64; 4],
    pub left: [[f64; 4]; 4],
    pub right: [[f64; 4]; 4],
    /// `Γ_L|S^L|² + Γ_R|S^R|²` per pair, symmetric.
    coupling: [[f64; 4]; 4],
}

impl RateMatrix {
    pub fn per_bath(&self, side: Side) -> &[[f64; 4]; 4] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn total(&self) -> [[f64; 4]; 4] {
        let mut w = [[0.0; 4]; 4];
        for n in 0..4 {
            for m in 0..4 {
                w[n][m] = self.left[n][m] + self.right[n][m];
            }
        }
        w
    }

    pub fn max_rate(&self) -> f64 {
        self.total().iter().flatten().fold(0.0, |a, &b| a.max(b))
    }

    /// `dp/dt` under the full generator.
    pub fn apply(&self, p: &Populations) -> Populations {
        let w = self.total();
        let mut dp = [0.0; 4];
        for n in 0..4 {
            for m in 0..4 {
                if n != m {
                    let flow = p[n] * w[n][m];
                    dp[m] += flow;
                    dp[n] -= flow;
                }
            }
        }
        dp
    }

    /// `‖dp/dt‖∞`.
    pub fn residual(&self, p: &Populations) -> f64 {
        self.apply(p).iter().fold(0.0, |a, &b| a.max(b.abs()))
    }

    pub(crate) fn is_stationary(&self, p: &Populations) -> std::result::Result<(), f64> {
        let r = self.residual(p);
        if r <= STATIONARY_TOL * self.max_rate().max(1.0) {
            Ok(())
        } else {
            Err(r)
        }
    }

    fn connected(&self) -> bool {
        let max = self.coupling.iter().flatten().fold(0.0_f64, |a, &b| a.max(b));
        if max <= 0.0 {
            return false;
        }
        let mut seen = [true, false, false, false];
        let mut stack = vec![0];
        while let Some(n) = stack.pop() {
            for m in 0..4 {
                if !seen[m] && self.coupling[n][m] > COUPLING_FLOOR * max {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

fn crosses_sector(n: usize, m: usize) -> bool {
    (n < 2) != (m < 2)
}

pub fn build_rates(tt: &TransitionTable, baths: &BathSpec) -> Result<RateMatrix> {
    baths.validate()?;
    let mut left = [[0.0; 4]; 4];
    let mut right = [[0.0; 4]; 4];
    let mut coupling = [[0.0; 4]; 4];
    for n in 0..4 {
        for m in 0..4 {
            if !crosses_sector(n, m) {
                continue;
            }
            let released = tt.energies[n] - tt.energies[m];
            if released.abs() < OMEGA_MIN {
                return Err(Error::Degenerate { from: n + 1, to: m + 1, gap: released.abs() });
            }
            for side in [Side::Left, Side::Right] {
                let t = baths.temperature(side);
                let g = baths.gamma(side);
                let k = if released > 0.0 {
                    g * (bose_occupation(released, t) + 1.0)
                } else {
                    g * bose_occupation(-released, t)
                };
                let s2 = tt.squared(side)[m][n];
                coupling[n][m] += g * s2;
                match side {
                    Side::Left => left[n][m] = k * s2,
                    Side::Right => right[n][m] = k * s2,
                }
            }
        }
    }
    Ok(RateMatrix { energies: tt.energies, left, right, coupling })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub populations: Populations,
    /// `‖dp/dt‖∞` at `populations`.
    pub residual: f64,
}

/// Stationary distribution by Grassmann–Taksar–Heyman elimination, which
/// involves no subtractions and keeps small populations accurate.
pub fn steady_state_nullspace(w: &RateMatrix) -> Result<SteadyState> {
    if !w.connected() {
        return Err(Error::AmbiguousSteadyState);
    }
    let mut q = w.total();
    for k in (1..4).rev() {
        let s: f64 = q[k][..k].iter().sum();
        if s <= 0.0 {
            return Err(Error::AmbiguousSteadyState);
        }
        for row in q.iter_mut().take(k) {
            row[k] /= s;
        }
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    q[i][j] += q[i][k] * q[k][j];
                }
            }
        }
    }
    let mut p = [1.0, 0.0, 0.0, 0.0];
    for j in 1..4 {
        p[j] = (0..j).map(|i| p[i] * q[i][j]).sum();
    }
    let total: f64 = p.iter().sum();
    for x in &mut p {
        *x /= total;
    }
    Ok(SteadyState { populations: p, residual: w.residual(&p) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormSteadyState {
    pub populations: Populations,
    /// `max |p_closed − p_nullspace|`, or `None` if the null-space solve failed.
    pub discrepancy: Option<f64>,
}

/// Product-form populations built only from `W₁₃, W₃₁, W₁₄, W₄₁`.
pub fn steady_state_closedform(w: &RateMatrix) -> Result<ClosedFormSteadyState> {
    let t = w.total();
    let r = |a: usize, b: usize| t[a - 1][b - 1];
    let denom = (r(1, 4) + r(4, 1)) * (r(1, 3) + r(3, 1));
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::SingularClosedForm);
    }
    let populations = [
        r(4, 1) * r(3, 1) / denom,
        r(1, 3) * r(1, 4) / denom,
        r(4, 1) * r(1, 3) / denom,
        r(3, 1) * r(1, 4) / denom,
    ];
    let discrepancy = steady_state_nullspace(w).ok().map(|s| {
        s.populations
            .iter()
            .zip(&populations)
            .fold(0.0, |a, (x, y)| f64::max(a, (x - y).abs()))
    });
    Ok(ClosedFormSteadyState { populations, discrepancy })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-14, initial_step: 1e-3, max_steps: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub populations: Vec<Populations>,
}

impl Trajectory {
    pub fn last(&self) -> Populations {
        *self.populations.last().expect("trajectory holds the initial point")
    }
}

pub fn evolve(p0: &Populations, w: &RateMatrix, t_final: f64, opts: &EvolveOptions) -> Result<Trajectory> {
    if p0.iter().any(|x| !x.is_finite() || *x < -1e-12) {
        return Err(Error::InvalidInitialState(format!("{p0:?} has a negative or non-finite entry")));
    }
    let sum: f64 = p0.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInitialState(format!("entries sum to {sum}")));
    }
    let ctl = Controls {
        rtol: opts.rtol,
        atol: opts.atol,
        initial_step: opts.initial_step,
        max_steps: opts.max_steps,
    };
    let steps = ode::integrate(|p| w.apply(p), *p0, t_final, &ctl)
        .ok_or_else(|| Error::InvalidInitialState(format!("step budget {} exhausted", opts.max_steps)))?;
    let (times, populations) = steps.into_iter().unzip();
    Ok(Trajectory { times, populations })
}

/// `ρ = Σₙ pₙ |εₙ⟩⟨εₙ|` in the product basis.
pub fn density_matrix(p: &Populations, es: &EigenSystem) -> Matrix4c {
    let mut rho = Matrix4c::zeros();
    for (pn, v) in p.iter().zip(&es.vectors) {
        rho += v * v.adjoint() * C64::from(*pn);
    }
    rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, eigensystem_analytic, transition_table, SystemParams};
    use approx::assert_abs_diff_eq;

    fn table(p: &SystemParams) -> TransitionTable {
        transition_table(&eigensystem_analytic(p).unwrap(), Some(p))
    }

    fn fig2(dm: f64) -> SystemParams {
        SystemParams::new(1.0, 0.3, dm, 4.0, 2.0).unwrap()
    }

    #[test]
    fn bose_factor() {
        assert_abs_diff_eq!(bose_occupation(1.0, 1.0), 0.5819767068693263, epsilon = 1e-15);
        assert_eq!(bose_occupation(1.0, 1e-6), 0.0);
    }

    #[test]
    fn zero_temperature_limit() {
        let p = fig2(1.0);
        let tt = table(&p);
        let w = build_rates(&tt, &BathSpec::new(1e-4, 1e-4, 1.0, 0.25).unwrap()).unwrap();
        for n in 0..4 {
            for m in 0..4 {
                if !crosses_sector(n, m) {
                    continue;
                }
                if tt.energies[n] > tt.energies[m] {
                    assert_abs_diff_eq!(w.left[n][m], tt.left[m][n], epsilon = 1e-12);
                    assert_abs_diff_eq!(w.right[n][m], 0.25 * tt.right[m][n], epsilon = 1e-12);
                } else {
                    assert_eq!(w.left[n][m], 0.0);
                    assert_eq!(w.right[n][m], 0.0);
                }
            }
        }
    }

    #[test]
    fn rate_fixture() {
        // Independent numpy evaluation at χ=0.3, D=0, B=4, b=2, T=(1.2, 0.8), Γ=(1, 0.25).
        let expected = [
            [0.0, 0.0, 0.05023276135387009, 0.9436933704117002],
            [0.0, 0.0, 0.005126979845477775, 0.36166637078764785],
            [0.3616663707876482, 0.9436933704116997, 0.0, 0.0],
            [0.0051269798454777775, 0.05023276135387002, 0.0, 0.0],
        ];
        let w = build_rates(&table(&fig2(0.0)), &BathSpec::new(1.2, 0.8, 1.0, 0.25).unwrap()).unwrap();
        let total = w.total();
        for n in 0..4 {
            for m in 0..4 {
                assert_abs_diff_eq!(total[n][m], expected[n][m], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn selection_rule_and_detailed_balance() {
        let p = SystemParams::new(1.0, -0.4, 1.7, 1.3, -0.8).unwrap();
        let baths = BathSpec::new(0.7, 2.1, 0.6, 1.3).unwrap();
        let tt = table(&p);
        let w = build_rates(&tt, &baths).unwrap();
        for side in [Side::Left, Side::Right] {
            let r = w.per_bath(side);
            assert_eq!(r[0][1], 0.0);
            assert_eq!(r[2][3], 0.0);
            for n in 0..4 {
                for m in 0..4 {
                    let released = tt.energies[n] - tt.energies[m];
                    if crosses_sector(n, m) && released > 0.0 {
                        let ratio = r[n][m] / r[m][n];
                        let expected = (released / baths.temperature(side)).exp();
                        assert!((ratio / expected - 1.0).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_transition_is_an_error() {
        // ξ = η at D = √11.09
        let p = fig2(11.09f64.sqrt());
        let mut tt = table(&p);
        tt.energies[2] = tt.energies[0];
        let err = build_rates(&tt, &BathSpec::new(1.0, 1.0, 1.0, 1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Degenerate { from: 1, to: 3, .. }));
    }

    #[test]
    fn bad_baths_rejected() {
        assert!(BathSpec::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(BathSpec::new(1.0, 1.0, -1.0, 1.0).is_err());
        assert!(BathSpec::new(1.0, f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn equilibrium_is_gibbs() {
        let p = fig2(2.0);
        let tt = table(&p);
        for gamma_right in [0.25, 0.0] {
            let w = build_rates(&tt, &BathSpec::new(0.9, 0.9, 1.0, gamma_right).unwrap()).unwrap();
            let s = steady_state_nullspace(&w).unwrap();
            let weights: Vec<f64> = tt.energies.iter().map(|e| (-e / 0.9).exp()).collect();
            let z: f64 = weights.iter().sum();
            for n in 0..4 {
                assert_abs_diff_eq!(s.populations[n], weights[n] / z, epsilon = 1e-12);
            }
            assert!(s.residual < 1e-12);
        }
    }

    #[test]
    fn fig2b_population_ordering() {
        let baths = BathSpec::new(1.2, 0.8, 1.0, 0.25).unwrap();
        let mut last_p2 = 0.0;
        for dm in [0.0, 0.5, 1.0, 1.5, 2.0] {
            let s = steady_state_nullspace(&build_rates(&table(&fig2(dm)), &baths).unwrap()).unwrap();
            let p = s.populations;
            assert!(p[3] > p[0] && p[3] > p[1] && p[3] > p[2]);
            assert!(p[1] > last_p2);
            last_p2 = p[1];
        }
    }

    #[test]
    fn disconnected_graph_is_ambiguous() {
        let tt = table(&fig2(1.0));
        let w = build_rates(&tt, &BathSpec::new(1.0, 1.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(steady_state_nullspace(&w).unwrap_err(), Error::AmbiguousSteadyState);
        assert_eq!(steady_state_closedform(&w).unwrap_err(), Error::SingularClosedForm);
    }

    #[test]
    fn closed_form_matches_nullspace() {
        let w = build_rates(&table(&fig2(1.3)), &BathSpec::new(1.2, 0.8, 1.0, 0.25).unwrap()).unwrap();
        let cf = steady_state_closedform(&w).unwrap();
        assert_abs_diff_eq!(cf.populations.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert!(cf.discrepancy.unwrap() < 1e-12);
    }

    #[test]
    fn evolution_relaxes_to_steady_state() {
        let w = build_rates(&table(&fig2(1.0)), &BathSpec::new(1.2, 0.8, 1.0, 0.25).unwrap()).unwrap();
        let target = steady_state_nullspace(&w).unwrap().populations;
        let traj = evolve(&[1.0, 0.0, 0.0, 0.0], &w, 400.0, &EvolveOptions::default()).unwrap();
        for p in &traj.populations {
            assert!(p.iter().all(|x| (-1e-12..=1.0 + 1e-12).contains(x)));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let last = traj.last();
        for n in 0..4 {
            assert_abs_diff_eq!(last[n], target[n], epsilon = 1e-8);
        }
        let still = evolve(&target, &w, 50.0, &EvolveOptions::default()).unwrap();
        for p in &still.populations {
            for n in 0..4 {
                assert_abs_diff_eq!(p[n], target[n], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn evolve_rejects_non_probability() {
        let w = build_rates(&table(&fig2(1.0)), &BathSpec::new(1.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
        let opts = EvolveOptions::default();
        assert!(evolve(&[0.5, 0.6, 0.0, 0.0], &w, 1.0, &opts).is_err());
        assert!(evolve(&[1.1, -0.1, 0.0, 0.0], &w, 1.0, &opts).is_err());
    }

    /// Entry-wise X-form of the steady density matrix written out by hand.
    fn x_form_entries(p: &Populations, params: &SystemParams) -> Matrix4c {
        let (xi, eta) = (params.odd_energy(), params.even_energy());
        let (bb, b) = (params.field, params.splitting);
        let t = params.flip_flop();
        let g = params.pair_coupling();
        let mut rho = Matrix4c::zeros();
        rho[(0, 0)] = C64::from(p[2] * (eta + bb) / (2.0 * eta) + p[3] * (eta - bb) / (2.0 * eta));
        rho[(3, 3)] = C64::from(p[2] * (eta - bb) / (2.0 * eta) + p[3] * (eta + bb) / (2.0 * eta));
        rho[(0, 3)] = C64::from((p[2] - p[3]) * g / (2.0 * eta));
        rho[(3, 0)] = rho[(0, 3)];
        rho[(1, 1)] = C64::from(p[0] * (xi + b) / (2.0 * xi) + p[1] * (xi - b) / (2.0 * xi));
        rho[(2, 2)] = C64::from(p[0] * (xi - b) / (2.0 * xi) + p[1] * (xi + b) / (2.0 * xi));
        rho[(1, 2)] = t * ((p[0] - p[1]) / (2.0 * xi));
        rho[(2, 1)] = t.conj() * ((p[0] - p[1]) / (2.0 * xi));
        rho
    }

    #[test]
    fn density_matrix_matches_x_form() {
        for dm in [0.0, 2.5] {
            let params = fig2(dm);
            let es = eigensystem_analytic(&params).unwrap();
            let w = build_rates(&transition_table(&es, None), &BathSpec::new(1.2, 0.8, 1.0, 0.25).unwrap()).unwrap();
            let p = steady_state_nullspace(&w).unwrap().populations;
            let rho = density_matrix(&p, &es);
            let expected = x_form_entries(&p, &params);
            assert!((rho - expected).iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn density_matrix_special_cases() {
        let params = SystemParams::new(1.0, 0.5, 0.0, 0.0, 0.7).unwrap();
        let es = eigensystem_analytic(&params).unwrap();
        let rho = density_matrix(&[0.0, 0.0, 0.0, 1.0], &es);
        assert_abs_diff_eq!(rho[(0, 3)].norm(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!((rho * rho - rho).norm(), 0.0, epsilon = 1e-15);
        let mixed = density_matrix(&[0.25; 4], &es);
        assert!((mixed - Matrix4c::identity() * C64::from(0.25)).iter().all(|z| z.norm() < 1e-15));
        let _ = build_hamiltonian(&params).unwrap();
    }
}
