//! Two-dot Hamiltonian, its eigensystem and the bath-coupling matrix elements.
//!
//! The Hamiltonian is X-shaped: the odd-parity sector `{|01⟩, |10⟩}` and the
//! even-parity sector `{|00⟩, |11⟩}` decouple, each a 2×2 block. In the odd
//! sector the eigenvalues are `±ξ`, `ξ = √(b² + J² + (JD)²)`; in the even
//! sector `±η`, `η = √(B² + (Jχ)²)`.

use nalgebra::Matrix2;

use crate::{Error, Matrix4c, Result, Vector4c, C64};

pub(crate) const S00: usize = 0;
pub(crate) const S01: usize = 1;
pub(crate) const S10: usize = 2;
pub(crate) const S11: usize = 3;

/// Below this coupling a sector is treated as already diagonal.
const DECOUPLED: f64 = 1e-12;

/// Hamiltonian scalars. All energies in the same unit (usually `J = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Exchange energy `J`.
    pub exchange: f64,
    /// XY anisotropy `χ` (dimensionless).
    pub anisotropy: f64,
    /// DM strength `D` (dimensionless, in units of `J`).
    pub dm: f64,
    /// Sum field `B`; the dots see `(B ± b)/2`.
    pub field: f64,
    /// Difference field `b`.
    pub splitting: f64,
}

impl SystemParams {
    pub fn new(exchange: f64, anisotropy: f64, dm: f64, field: f64, splitting: f64) -> Result<Self> {
        let p = Self { exchange, anisotropy, dm, field, splitting };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("J", self.exchange),
            ("chi", self.anisotropy),
            ("D", self.dm),
            ("B", self.field),
            ("b", self.splitting),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    /// `ξ`, half the level spacing of the odd sector.
    pub fn odd_energy(&self) -> f64 {
        let j = self.exchange;
        (self.splitting.powi(2) + j * j + (j * self.dm).powi(2)).sqrt()
    }

    /// `η`, half the level spacing of the even sector.
    pub fn even_energy(&self) -> f64 {
        self.field.hypot(self.exchange * self.anisotropy)
    }

    /// `⟨01|H|10⟩ = J(1 + iD)`.
    pub fn flip_flop(&self) -> C64 {
        C64::new(self.exchange, self.exchange * self.dm)
    }

    /// `⟨00|H|11⟩ = Jχ`.
    pub fn pair_coupling(&self) -> f64 {
        self.exchange * self.anisotropy
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian(Matrix4c);

impl Hamiltonian {
    pub fn matrix(&self) -> &Matrix4c {
        &self.0
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.0 - self.0.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// Largest entry outside the diagonal and anti-diagonal.
    pub fn x_form_violation(&self) -> f64 {
        x_form_violation(&self.0)
    }
}

pub(crate) fn x_form_violation(m: &Matrix4c) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in 0..4 {
            if i != j && i + j != 3 {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

pub fn build_hamiltonian(p: &SystemParams) -> Result<Hamiltonian> {
    p.validate()?;
    let mut h = Matrix4c::zeros();
    h[(S00, S00)] = C64::from(p.field);
    h[(S01, S01)] = C64::from(p.splitting);
    h[(S10, S10)] = C64::from(-p.splitting);
    h[(S11, S11)] = C64::from(-p.field);
    let t = p.flip_flop();
    h[(S01, S10)] = t;
    h[(S10, S01)] = t.conj();
    let g = C64::from(p.pair_coupling());
    h[(S00, S11)] = g;
    h[(S11, S00)] = g.conj();
    Ok(Hamiltonian(h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Numeric,
}

/// Energies and states of `|ε₁⟩..|ε₄⟩` in label order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub energies: [f64; 4],
    pub vectors: [Vector4c; 4],
    pub provenance: Provenance,
}

impl EigenSystem {
    /// `max |⟨εᵢ|εⱼ⟩ − δᵢⱼ|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                let overlap = self.vectors[i].dotc(&self.vectors[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((overlap - target).norm());
            }
        }
        worst
    }

    /// `max ‖H|εₙ⟩ − Eₙ|εₙ⟩‖`.
    pub fn residual(&self, h: &Hamiltonian) -> f64 {
        (0..4)
            .map(|n| (h.matrix() * self.vectors[n] - self.vectors[n] * C64::from(self.energies[n])).norm())
            .fold(0.0, f64::max)
    }

    /// `|⟨a|b⟩|²` for the state with label index `n` in both systems.
    pub fn fidelity(&self, other: &EigenSystem, n: usize) -> f64 {
        self.vectors[n].dotc(&other.vectors[n]).norm_sqr()
    }
}

fn basis(i: usize) -> Vector4c {
    let mut v = Vector4c::zeros();
    v[i] = C64::from(1.0);
    v
}

/// Normalized `ratio·|lead⟩ + |tail⟩`.
fn ratio_state(ratio: C64, lead: usize, tail: usize) -> Vector4c {
    let norm = (1.0 + ratio.norm_sqr()).sqrt();
    let mut v = Vector4c::zeros();
    v[lead] = ratio / norm;
    v[tail] = C64::from(1.0 / norm);
    v
}

/// Upper and lower eigenvectors of `[[d, c], [c*, −d]]` on `(lead, tail)`.
///
/// The ratios `(d ± e)/c*` are evaluated in whichever algebraically
/// equivalent form avoids cancellation (`(d + e)/c* = c/(e − d)`).
fn sector_states(d: f64, c: C64, e: f64, lead: usize, tail: usize) -> (Vector4c, Vector4c) {
    if c.norm() < DECOUPLED {
        // Already diagonal: the upper state is the one with energy +|d|.
        return if d >= 0.0 { (basis(lead), basis(tail)) } else { (basis(tail), basis(lead)) };
    }
    let upper = if d >= 0.0 { C64::from(d + e) / c.conj() } else { c / (e - d) };
    let lower = if d <= 0.0 { C64::from(d - e) / c.conj() } else { -c / (d + e) };
    (ratio_state(upper, lead, tail), ratio_state(lower, lead, tail))
}

pub fn eigensystem_analytic(p: &SystemParams) -> Result<EigenSystem> {
    p.validate()?;
    let xi = p.odd_energy();
    let eta = p.even_energy();
    let (e1, e2) = sector_states(p.splitting, p.flip_flop(), xi, S01, S10);
    let (e3, e4) = sector_states(p.field, C64::from(p.pair_coupling()), eta, S00, S11);
    Ok(EigenSystem {
        energies: [xi, -xi, eta, -eta],
        vectors: [e1, e2, e3, e4],
        provenance: Provenance::Analytic,
    })
}

/// Multiply by a global phase so the `tail` amplitude (or, if it vanishes,
/// the `lead` amplitude) is real and nonnegative.
fn fix_phase(v: &mut Vector4c, lead: usize, tail: usize) {
    let anchor = if v[tail].norm() > DECOUPLED { v[tail] } else { v[lead] };
    if anchor.norm() > 0.0 {
        let phase = anchor.conj() / anchor.norm();
        *v *= phase;
    }
}

fn diagonalize_block(h: &Matrix4c, lead: usize, tail: usize) -> ([f64; 2], [Vector4c; 2]) {
    let block = Matrix2::new(h[(lead, lead)], h[(lead, tail)], h[(tail, lead)], h[(tail, tail)]);
    let eig = block.symmetric_eigen();
    let (hi, lo) = if eig.eigenvalues[0] >= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let lift = |k: usize| {
        let mut v = Vector4c::zeros();
        v[lead] = eig.eigenvectors[(0, k)];
        v[tail] = eig.eigenvectors[(1, k)];
        let norm = v.norm();
        v /= C64::from(norm);
        fix_phase(&mut v, lead, tail);
        v
    };
    ([eig.eigenvalues[hi], eig.eigenvalues[lo]], [lift(hi), lift(lo)])
}

/// Dense diagonalization of the two 2×2 sectors, independent of the closed forms.
pub fn eigensystem_numeric(h: &Hamiltonian) -> EigenSystem {
    let m = h.matrix();
    let ([e1, e2], [v1, v2]) = diagonalize_block(m, S01, S10);
    let ([e3, e4], [v3, v4]) = diagonalize_block(m, S00, S11);
    EigenSystem {
        energies: [e1, e2, e3, e4],
        vectors: [v1, v2, v3, v4],
        provenance: Provenance::Numeric,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Index mask flipping this dot's bit in the product basis.
    fn flip_mask(self) -> usize {
        match self {
            Side::Left => 0b10,
            Side::Right => 0b01,
        }
    }
}

/// `|⟨ε_m|σₓ^ν|ε_n⟩|²` for both dots, with transition frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTable {
    pub energies: [f64; 4],
    /// `omega[m][n] = E_m − E_n`.
    pub omega: [[f64; 4]; 4],
    /// `left[m][n] = |S^L_{m,n}|²`.
    pub left: [[f64; 4]; 4],
    pub right: [[f64; 4]; 4],
    /// Closed-form values for `m ∈ {3,4}, n ∈ {1,2}`, indexed `[m-3][n-1]`;
    /// `None` when the sector energies vanish and the forms are undefined.
    pub closed_form_left: Option<[[f64; 2]; 2]>,
    pub closed_form_right: Option<[[f64; 2]; 2]>,
    /// Largest `|direct − closed form|` over the eight listed elements.
    pub closed_form_mismatch: f64,
}

impl TransitionTable {
    pub fn squared(&self, side: Side) -> &[[f64; 4]; 4] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// `max |Σ_m |S^ν_{m,n}|² − 1|` over both sides and all `n`.
    pub fn completeness_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for table in [&self.left, &self.right] {
            for n in 0..4 {
                let total: f64 = (0..4).map(|m| table[m][n]).sum();
                worst = worst.max((total - 1.0).abs());
            }
        }
        worst
    }
}

fn sigma_x_element(side: Side, bra: &Vector4c, ket: &Vector4c) -> C64 {
    let mask = side.flip_mask();
    (0..4).map(|i| bra[i].conj() * ket[i ^ mask]).sum()
}

/// Closed forms `[[|S_31|², |S_32|²], [|S_41|², |S_42|²]]` for one side.
fn closed_forms(p: &SystemParams, side: Side) -> Option<[[f64; 2]; 2]> {
    let xi = p.odd_energy();
    let eta = p.even_energy();
    let denom = 2.0 * eta * xi;
    if denom == 0.0 {
        return None;
    }
    let bb = p.field * p.splitting;
    let cross = p.exchange * p.exchange * p.anisotropy / denom;
    let minus = (eta * xi - bb) / denom;
    let plus = (eta * xi + bb) / denom;
    let (s31, s41) = match side {
        Side::Left => (minus + cross, plus - cross),
        Side::Right => (plus + cross, minus - cross),
    };
    Some([[s31, s41], [s41, s31]])
}

/// Direct matrix elements from `es`. Pass the parameters that produced `es`
/// to also evaluate the closed forms as a diagnostic.
pub fn transition_table(es: &EigenSystem, params: Option<&SystemParams>) -> TransitionTable {
    let mut omega = [[0.0; 4]; 4];
    let mut left = [[0.0; 4]; 4];
    let mut right = [[0.0; 4]; 4];
    for m in 0..4 {
        for n in 0..4 {
            omega[m][n] = es.energies[m] - es.energies[n];
            left[m][n] = sigma_x_element(Side::Left, &es.vectors[m], &es.vectors[n]).norm_sqr();
            right[m][n] = sigma_x_element(Side::Right, &es.vectors[m], &es.vectors[n]).norm_sqr();
        }
    }
    let closed_form_left = params.and_then(|p| closed_forms(p, Side::Left));
    let closed_form_right = params.and_then(|p| closed_forms(p, Side::Right));
    let mut mismatch = 0.0_f64;
    for (closed, direct) in [(closed_form_left, &left), (closed_form_right, &right)] {
        if let Some(c) = closed {
            for (mi, m) in [2, 3].into_iter().enumerate() {
                for n in 0..2 {
                    mismatch = mismatch.max((c[mi][n] - direct[m][n]).abs());
                }
            }
        }
    }
    TransitionTable {
        energies: es.energies,
        omega,
        left,
        right,
        closed_form_left,
        closed_form_right,
        closed_form_mismatch: mismatch,
    }
}
