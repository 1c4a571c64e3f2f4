use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("invalid bath: {0}")]
    InvalidBath(String),

    /// Transition frequency below [`crate::OMEGA_MIN`]; the Bose factor diverges.
    #[error("degenerate transition |ε{from}⟩ → |ε{to}⟩ (gap {gap:e})")]
    Degenerate { from: usize, to: usize, gap: f64 },

    #[error("transition graph is disconnected; steady state is not unique")]
    AmbiguousSteadyState,

    #[error("closed-form steady state has a zero denominator")]
    SingularClosedForm,

    #[error("initial state is not a probability vector: {0}")]
    InvalidInitialState(String),

    #[error("populations are not stationary for these rates (residual {residual:e})")]
    StaleState { residual: f64 },

    #[error("temperature bias must be nonzero")]
    ZeroBias,

    #[error("nonpositive temperature {0} after splitting the bias")]
    NonPositiveTemperature(f64),

    #[error("no heat current in either orientation")]
    NoCurrent,

    #[error("no sign change on [{lo}, {hi}] (values {f_lo:e}, {f_hi:e})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("density matrix is not X-shaped (off-pattern entry {0:e})")]
    NotXState(f64),
}
