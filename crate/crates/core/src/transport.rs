//! Heat currents, thermal rectification and per-eigenstate decompositions.
//!
//! The heat current from bath ν is its net energy delivery to the system at
//! the stationary point,
//!
//! ```text
//! J_ν = Σ_{n≠m} p_n W^ν_{n→m} (E_m − E_n)
//! ```
//!
//! so `J_L + J_R = 0` holds identically in the steady state. The forward
//! orientation attaches the hotter reservoir to the left dot; `J₊` is the
//! left-to-right current there and `J₋` the right-to-left current with the
//! temperatures swapped. Rectification is `(J₊ − J₋)/max(J₊, J₋)`.

use rayon::prelude::*;

use crate::dynamics::{build_rates, steady_state_nullspace, BathSpec, RateMatrix};
use crate::model::{eigensystem_analytic, eigensystem_numeric, build_hamiltonian, transition_table, EigenSystem, Side, SystemParams, TransitionTable};
use crate::{Error, Populations, Result};

/// Mean temperature, signed bias `T_L − T_R` and couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bias {
    pub mean: f64,
    pub delta: f64,
    pub gamma_left: f64,
    pub gamma_right: f64,
}

impl Bias {
    pub fn new(mean: f64, delta: f64, gamma_left: f64, gamma_right: f64) -> Self {
        Self { mean, delta, gamma_left, gamma_right }
    }

    /// Baths for `(T_L, T_R) = (TM + ΔT/2, TM − ΔT/2)`, sign of ΔT respected.
    pub fn baths(&self) -> Result<BathSpec> {
        let half = self.delta / 2.0;
        for t in [self.mean + half, self.mean - half] {
            if !(t > 0.0) {
                return Err(Error::NonPositiveTemperature(t));
            }
        }
        BathSpec::new(self.mean + half, self.mean - half, self.gamma_left, self.gamma_right)
    }

    /// Hot-left and hot-right baths at bias `|ΔT|`.
    pub fn orientations(&self) -> Result<(BathSpec, BathSpec)> {
        if self.delta == 0.0 {
            return Err(Error::ZeroBias);
        }
        let forward = Bias { delta: self.delta.abs(), ..*self }.baths()?;
        let backward = BathSpec { t_left: forward.t_right, t_right: forward.t_left, ..forward };
        Ok((forward, backward))
    }
}

/// How the total current is split into per-eigenstate contributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Grouping {
    /// `½ Σ_m p_m (E_n − E_m) (W^L_{m→n} − W^R_{m→n})`: the bath-symmetric
    /// current carried by transitions that end in `|εₙ⟩`.
    #[default]
    Symmetric,
    /// `Σ_m p_n W^L_{n→m} (E_m − E_n)`: left-bath uptake on transitions that
    /// leave `|εₙ⟩`.
    LeftOutflow,
}

fn stationary(p: &Populations, w: &RateMatrix) -> Result<()> {
    w.is_stationary(p).map_err(|residual| Error::StaleState { residual })
}

fn uptake(p: &Populations, w: &RateMatrix, side: Side) -> f64 {
    let r = w.per_bath(side);
    let mut j = 0.0;
    for n in 0..4 {
        for m in 0..4 {
            if n != m {
                j += p[n] * r[n][m] * (w.energies[m] - w.energies[n]);
            }
        }
    }
    j
}

/// Net energy per unit time flowing from bath `side` into the system.
pub fn bath_current(p: &Populations, w: &RateMatrix, side: Side) -> Result<f64> {
    stationary(p, w)?;
    Ok(uptake(p, w, side))
}

/// `½ (J_L − J_R)`: the two-bath symmetric current. Equals `J_L` in the
/// steady state.
pub fn two_bath_current(p: &Populations, w: &RateMatrix) -> Result<f64> {
    stationary(p, w)?;
    Ok(0.5 * (uptake(p, w, Side::Left) - uptake(p, w, Side::Right)))
}

fn state_shares(p: &Populations, w: &RateMatrix, grouping: Grouping) -> [f64; 4] {
    let e = &w.energies;
    let mut shares = [0.0; 4];
    for (n, share) in shares.iter_mut().enumerate() {
        for m in 0..4 {
            if m == n {
                continue;
            }
            *share += match grouping {
                Grouping::Symmetric => 0.5 * p[m] * (e[n] - e[m]) * (w.left[m][n] - w.right[m][n]),
                Grouping::LeftOutflow => p[n] * w.left[n][m] * (e[m] - e[n]),
            };
        }
    }
    shares
}

/// Steady state for one temperature assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Orientation {
    pub baths: BathSpec,
    pub populations: Populations,
    pub j_left: f64,
    pub j_right: f64,
    /// Per-state split of `J_L` under the report's grouping.
    pub shares: [f64; 4],
}

impl Orientation {
    pub fn solve(tt: &TransitionTable, baths: &BathSpec, grouping: Grouping) -> Result<Self> {
        let w = build_rates(tt, baths)?;
        let p = steady_state_nullspace(&w)?.populations;
        Ok(Self {
            baths: *baths,
            populations: p,
            j_left: bath_current(&p, &w, Side::Left)?,
            j_right: bath_current(&p, &w, Side::Right)?,
            shares: state_shares(&p, &w, grouping),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateCurrents {
    pub plus: f64,
    pub minus: f64,
    pub net: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportReport {
    pub forward: Orientation,
    pub backward: Orientation,
    /// Left-to-right current, hot reservoir on the left.
    pub j_plus: f64,
    /// Right-to-left current, hot reservoir on the right.
    pub j_minus: f64,
    pub rectification: f64,
    pub per_state: [StateCurrents; 4],
    pub grouping: Grouping,
}

/// `J_{±,n}` and `J_{net,n} = J_{+,n} − J_{−,n}` from the two orientations.
pub fn per_state_currents(forward: &Orientation, backward: &Orientation) -> [StateCurrents; 4] {
    std::array::from_fn(|n| {
        let plus = forward.shares[n];
        let minus = -backward.shares[n];
        StateCurrents { plus, minus, net: plus - minus }
    })
}

pub fn rectification(params: &SystemParams, bias: &Bias) -> Result<TransportReport> {
    rectification_with(params, bias, Grouping::default())
}

pub fn rectification_with(params: &SystemParams, bias: &Bias, grouping: Grouping) -> Result<TransportReport> {
    let (fwd_baths, bwd_baths) = bias.orientations()?;
    let tt = transition_table(&eigensystem_analytic(params)?, None);
    let forward = Orientation::solve(&tt, &fwd_baths, grouping)?;
    let backward = Orientation::solve(&tt, &bwd_baths, grouping)?;
    let j_plus = forward.j_left;
    let j_minus = -backward.j_left;
    let scale = j_plus.max(j_minus);
    if !(scale > 0.0) {
        return Err(Error::NoCurrent);
    }
    let per_state = per_state_currents(&forward, &backward);
    Ok(TransportReport {
        rectification: (j_plus - j_minus) / scale,
        forward,
        backward,
        j_plus,
        j_minus,
        per_state,
        grouping,
    })
}

/// Bisection on a sign change of `f` over `[lo, hi]`. Evaluation failures at
/// interior points are stepped around by a small nudge.
fn bisect<F>(f: F, mut lo: f64, mut hi: f64, ftol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let lo_sign = f_lo.signum();
    for _ in 0..200 {
        let width = hi - lo;
        let mut mid = lo + 0.5 * width;
        let mut value = f(mid);
        let mut nudge = 1e-7 * width;
        while let Err(Error::Degenerate { .. }) = value {
            mid += nudge;
            nudge *= 2.0;
            value = f(mid);
        }
        let value = value?;
        if value == 0.0 || (value.abs() < ftol && width < 1e-12 * mid.abs().max(1.0)) {
            return Ok(mid);
        }
        if value.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            return Ok(lo + 0.5 * (hi - lo));
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

/// DM strength on `bracket` where rectification changes sign.
pub fn find_critical_d(params: &SystemParams, bias: &Bias, bracket: (f64, f64)) -> Result<f64> {
    let r = |dm: f64| {
        let p = SystemParams { dm, ..*params };
        rectification(&p, bias).map(|rep| rep.rectification)
    };
    bisect(r, bracket.0, bracket.1, 1e-8)
}

/// Label index of the lowest-energy eigenstate.
pub fn lowest_level(es: &EigenSystem) -> usize {
    (0..4).min_by(|&a, &b| es.energies[a].total_cmp(&es.energies[b])).expect("four levels")
}

/// DM strength on `bracket` where the ground state changes label, located
/// from the numerically diagonalized spectrum.
pub fn find_ground_switch(params: &SystemParams, bracket: (f64, f64)) -> Result<f64> {
    let ground = |dm: f64| -> Result<usize> {
        let h = build_hamiltonian(&SystemParams { dm, ..*params })?;
        Ok(lowest_level(&eigensystem_numeric(&h)))
    };
    let (mut lo, mut hi) = bracket;
    let g_lo = ground(lo)?;
    let g_hi = ground(hi)?;
    if g_lo == g_hi {
        return Err(Error::NoSignChange { lo, hi, f_lo: g_lo as f64, f_hi: g_hi as f64 });
    }
    while hi - lo > 1e-13 * hi.abs().max(1.0) {
        let mid = lo + 0.5 * (hi - lo);
        if ground(mid)? == g_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldTrace {
    pub anisotropy: f64,
    /// `(B, R)`; `R` is `None` where the point hit a degenerate transition.
    pub points: Vec<(f64, Option<f64>)>,
}

impl FieldTrace {
    pub fn sign_changes(&self) -> usize {
        let signs: Vec<f64> = self.points.iter().filter_map(|(_, r)| *r).filter(|r| *r != 0.0).map(f64::signum).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// Rectification against `B` with `b = B` (right dot gap closed), one trace
/// per anisotropy.
pub fn field_sweep(params: &SystemParams, bias: &Bias, anisotropies: &[f64], fields: &[f64]) -> Result<Vec<FieldTrace>> {
    let grid: Vec<(usize, f64)> = anisotropies
        .iter()
        .enumerate()
        .flat_map(|(i, _)| fields.iter().map(move |&f| (i, f)))
        .collect();
    let values: Vec<Result<Option<f64>>> = grid
        .par_iter()
        .map(|&(i, field)| {
            let p = SystemParams { anisotropy: anisotropies[i], field, splitting: field, ..*params };
            match rectification(&p, bias) {
                Ok(rep) => Ok(Some(rep.rectification)),
                Err(Error::Degenerate { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut values = values.into_iter();
    anisotropies
        .iter()
        .map(|&anisotropy| {
            let points = fields
                .iter()
                .map(|&f| Ok((f, values.next().expect("one value per grid point")?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(FieldTrace { anisotropy, points })
        })
        .collect()
}
