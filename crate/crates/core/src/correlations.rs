//! Entanglement and discord of two-qubit states, in bits.
//!
//! Classical correlation conditions the left dot (A) on rank-1 projective
//! measurements of the right dot (B), parameterized by the Bloch angles of
//! the measured direction.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use rayon::prelude::*;

use crate::model::{x_form_violation, SystemParams};
use crate::{Error, Matrix4c, Populations, Result, C64};

/// Allowed magnitude of entries off the diagonal and anti-diagonal.
const X_FORM_TOL: f64 = 1e-12;

/// Eigenvalues of ρ below this are treated as numerical zeros.
const RANK_FLOOR: f64 = 1e-14;

/// Concurrence from the X-state entries:
/// `2 max(0, |ρ₂₃| − √(ρ₁₁ρ₄₄), |ρ₁₄| − √(ρ₂₂ρ₃₃))`.
pub fn concurrence_xstate(rho: &Matrix4c) -> Result<f64> {
    let violation = x_form_violation(rho);
    if violation > X_FORM_TOL {
        return Err(Error::NotXState(violation));
    }
    let d = |i: usize| rho[(i, i)].re.max(0.0);
    let odd = rho[(1, 2)].norm() - (d(0) * d(3)).sqrt();
    let even = rho[(0, 3)].norm() - (d(1) * d(2)).sqrt();
    Ok(2.0 * odd.max(even).max(0.0))
}

/// Concurrence written in terms of the eigenstate populations, as a
/// cross-check on [`concurrence_xstate`] for states built by
/// [`crate::density_matrix`].
pub fn concurrence_population_form(params: &SystemParams, p: &Populations) -> f64 {
    let xi = params.odd_energy();
    let eta = params.even_energy();
    let j = params.exchange;
    let odd = j / (2.0 * xi) * (1.0 + params.dm * params.dm).sqrt() * (p[0] - p[1]).abs()
        - 0.5 * ((p[2] + p[3]).powi(2) - (params.field / eta).powi(2) * (p[2] - p[3]).powi(2)).max(0.0).sqrt();
    let even = j * params.anisotropy / (2.0 * eta) * (p[2] - p[3]).abs()
        - 0.5 * ((p[0] + p[1]).powi(2) - (params.splitting / xi).powi(2) * (p[0] - p[1]).powi(2)).max(0.0).sqrt();
    2.0 * odd.max(even).max(0.0)
}

/// `σ_y ⊗ σ_y` is real with ±1 on the anti-diagonal.
fn spin_flip(m: &Matrix4c) -> Matrix4c {
    let mut yy = Matrix4c::zeros();
    yy[(0, 3)] = C64::from(-1.0);
    yy[(1, 2)] = C64::from(1.0);
    yy[(2, 1)] = C64::from(1.0);
    yy[(3, 0)] = C64::from(-1.0);
    yy * m.conjugate() * yy
}

fn hermitian_sqrt(rho: &Matrix4c) -> Matrix4c {
    let eig = rho.symmetric_eigen();
    let mut out = Matrix4c::zeros();
    for k in 0..4 {
        let lambda = eig.eigenvalues[k];
        if lambda > RANK_FLOOR {
            let v = eig.eigenvectors.column(k);
            out += v * v.adjoint() * C64::from(lambda.sqrt());
        }
    }
    out
}

/// Spin-flip concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)` for any two-qubit state.
///
/// The `λᵢ` are the singular values of `√ρ · √ρ̃`, which equal the square
/// roots of the eigenvalues of `ρρ̃` without a second square root.
pub fn concurrence_wootters(rho: &Matrix4c) -> f64 {
    let root = hermitian_sqrt(rho);
    let product = root * spin_flip(&root);
    let mut lambdas: Vec<f64> = product.svd(false, false).singular_values.iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

fn shannon_bits(probabilities: impl IntoIterator<Item = f64>) -> f64 {
    probabilities
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.log2())
        .sum()
}

/// Von Neumann entropy in bits, `0·log 0 ≡ 0`.
pub fn von_neumann_entropy(rho: &Matrix4c) -> f64 {
    shannon_bits(rho.symmetric_eigen().eigenvalues.iter().copied())
}

fn entropy2(m: &Matrix2<C64>) -> f64 {
    let tr = m[(0, 0)].re + m[(1, 1)].re;
    if tr <= 0.0 {
        return 0.0;
    }
    let half_gap = (0.25 * (m[(0, 0)].re - m[(1, 1)].re).powi(2) + m[(0, 1)].norm_sqr()).sqrt();
    let upper = (0.5 * tr + half_gap) / tr;
    shannon_bits([upper, 1.0 - upper])
}

/// `Tr_B ρ`.
pub fn reduced_left(rho: &Matrix4c) -> Matrix2<C64> {
    Matrix2::from_fn(|a, c| rho[(2 * a, 2 * c)] + rho[(2 * a + 1, 2 * c + 1)])
}

/// `Tr_A ρ`.
pub fn reduced_right(rho: &Matrix4c) -> Matrix2<C64> {
    Matrix2::from_fn(|r, s| rho[(r, s)] + rho[(2 + r, 2 + s)])
}

/// `I(A:B) = S(ρ_A) + S(ρ_B) − S(ρ_AB)`.
pub fn mutual_information(rho: &Matrix4c) -> f64 {
    entropy2(&reduced_left(rho)) + entropy2(&reduced_right(rho)) - von_neumann_entropy(rho)
}

/// Grid-then-polish settings for the measurement minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSearch {
    /// Polar samples on `[0, π]`, endpoints included.
    pub theta_points: usize,
    /// Azimuthal samples on `[0, 2π)`.
    pub phi_points: usize,
    /// Target accuracy of the minimized conditional entropy.
    pub tolerance: f64,
}

impl Default for MeasurementSearch {
    fn default() -> Self {
        Self { theta_points: 128, phi_points: 64, tolerance: 1e-8 }
    }
}

/// `Σ_k p_k S(ρ_{A|k})` for the projective measurement of B along `(θ, φ)`.
fn conditional_entropy(rho: &Matrix4c, theta: f64, phi: f64) -> f64 {
    let (s, c) = (0.5 * theta).sin_cos();
    let phase = C64::from_polar(1.0, phi);
    let up = [C64::from(c), phase * s];
    let down = [-phase.conj() * s, C64::from(c)];
    let mut total = 0.0;
    for k in [up, down] {
        let sigma = Matrix2::from_fn(|a, a2| {
            let mut z = C64::from(0.0);
            for r in 0..2 {
                for r2 in 0..2 {
                    z += k[r].conj() * rho[(2 * a + r, 2 * a2 + r2)] * k[r2];
                }
            }
            z
        });
        let prob = sigma[(0, 0)].re + sigma[(1, 1)].re;
        if prob > 0.0 {
            total += prob * entropy2(&sigma);
        }
    }
    total
}

fn normalize_angles(mut theta: f64, mut phi: f64) -> (f64, f64) {
    theta = theta.rem_euclid(2.0 * PI);
    if theta > PI {
        theta = 2.0 * PI - theta;
        phi += PI;
    }
    (theta, phi.rem_euclid(2.0 * PI))
}

/// Two-dimensional Nelder–Mead polish starting from `start`.
fn nelder_mead<F: Fn(f64, f64) -> f64>(f: F, start: (f64, f64), step: (f64, f64), tol: f64) -> ((f64, f64), f64) {
    let mut simplex = [start, (start.0 + step.0, start.1), (start.0, start.1 + step.1)];
    let mut values = simplex.map(|(x, y)| f(x, y));
    for _ in 0..2000 {
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        let size = (simplex[1].0 - simplex[0].0).abs().max((simplex[1].1 - simplex[0].1).abs())
            .max((simplex[2].0 - simplex[0].0).abs().max((simplex[2].1 - simplex[0].1).abs()));
        if values[2] - values[0] <= tol && size < 1e-7 {
            break;
        }
        let centroid = (0.5 * (simplex[0].0 + simplex[1].0), 0.5 * (simplex[0].1 + simplex[1].1));
        let toward = |t: f64| (centroid.0 + t * (simplex[2].0 - centroid.0), centroid.1 + t * (simplex[2].1 - centroid.1));
        let reflected = toward(-1.0);
        let f_r = f(reflected.0, reflected.1);
        if f_r < values[0] {
            let expanded = toward(-2.0);
            let f_e = f(expanded.0, expanded.1);
            if f_e < f_r {
                simplex[2] = expanded;
                values[2] = f_e;
            } else {
                simplex[2] = reflected;
                values[2] = f_r;
            }
        } else if f_r < values[1] {
            simplex[2] = reflected;
            values[2] = f_r;
        } else {
            let contracted = if f_r < values[2] { toward(-0.5) } else { toward(0.5) };
            let f_c = f(contracted.0, contracted.1);
            if f_c < values[2].min(f_r) {
                simplex[2] = contracted;
                values[2] = f_c;
            } else {
                for i in 1..3 {
                    simplex[i] = (
                        simplex[0].0 + 0.5 * (simplex[i].0 - simplex[0].0),
                        simplex[0].1 + 0.5 * (simplex[i].1 - simplex[0].1),
                    );
                    values[i] = f(simplex[i].0, simplex[i].1);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("three vertices");
    (simplex[best], values[best])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalCorrelation {
    pub bits: f64,
    /// Minimal conditional entropy `min S(ρ_A | {Π_k})`.
    pub conditional_entropy: f64,
    pub theta: f64,
    pub phi: f64,
}

/// `S(ρ_A) − min_{θ,φ} Σ_k p_k S(ρ_{A|k})` over measurements on the right dot.
pub fn classical_correlation(rho: &Matrix4c, search: &MeasurementSearch) -> ClassicalCorrelation {
    let nt = search.theta_points.max(2);
    let np = search.phi_points.max(1);
    let dt = PI / (nt - 1) as f64;
    let dp = 2.0 * PI / np as f64;
    let grid: Vec<f64> = (0..nt * np)
        .into_par_iter()
        .map(|idx| conditional_entropy(rho, (idx / np) as f64 * dt, (idx % np) as f64 * dp))
        .collect();
    // First minimum in (θ, φ) order breaks ties deterministically.
    let mut best = 0;
    for (idx, v) in grid.iter().enumerate() {
        if *v < grid[best] {
            best = idx;
        }
    }
    let start = ((best / np) as f64 * dt, (best % np) as f64 * dp);
    let ((theta, phi), polished) = nelder_mead(
        |t, p| conditional_entropy(rho, t, p),
        start,
        (0.5 * dt, 0.5 * dp),
        search.tolerance * 1e-2,
    );
    let (theta, phi, min) = if polished < grid[best] {
        (theta, phi, polished)
    } else {
        (start.0, start.1, grid[best])
    };
    let (theta, phi) = normalize_angles(theta, phi);
    ClassicalCorrelation {
        bits: entropy2(&reduced_left(rho)) - min,
        conditional_entropy: min,
        theta,
        phi,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub concurrence: f64,
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    pub theta: f64,
    pub phi: f64,
    /// Whether `rho` was X-shaped; other states take the generic path
    /// (spin-flip concurrence).
    pub x_form: bool,
}

pub fn correlation_report(rho: &Matrix4c, search: &MeasurementSearch) -> CorrelationReport {
    let (concurrence, x_form) = match concurrence_xstate(rho) {
        Ok(c) => (c, true),
        Err(_) => (concurrence_wootters(rho), false),
    };
    let mutual_information = mutual_information(rho);
    let cc = classical_correlation(rho, search);
    CorrelationReport {
        concurrence,
        mutual_information,
        classical_correlation: cc.bits,
        discord: mutual_information - cc.bits,
        theta: cc.theta,
        phi: cc.phi,
        x_form,
    }
}

/// `I(A:B) − C_cor` with default search settings.
pub fn discord(rho: &Matrix4c) -> f64 {
    correlation_report(rho, &MeasurementSearch::default()).discord
}
