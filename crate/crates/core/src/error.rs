use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Detuning sits on an excited line (GHz offset of that line).
    OnResonance { offset_ghz: f64 },
    VectorZero,
    NoSignChange,
    /// A line offset lies inside a root bracket.
    PoleInBracket { offset_ghz: f64 },
    /// Both decay rates vanish; the variance stays at 1/2.
    DegenerateRate,
    NonPositiveEpsilon,
    ZeroGyro,
    StepTooLarge { dt: f64, max_dt: f64 },
    SingularBracket,
    DegenerateSignal,
    TruncationLeak { time: f64, population: f64 },
    DimMismatch,
    InvalidDims,
    InvalidInput(&'static str),
}

impl Error {
    /// Numeric guards, as opposed to bad inputs.
    pub fn is_numeric_guard(&self) -> bool {
        matches!(self, Error::TruncationLeak { .. } | Error::StepTooLarge { .. })
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OnResonance { offset_ghz } => {
                write!(f, "detuning on resonance with line at {offset_ghz} GHz")
            }
            Error::VectorZero => f.write_str("vector coupling vanishes at this detuning"),
            Error::NoSignChange => f.write_str("tensor coupling has no sign change in bracket"),
            Error::PoleInBracket { offset_ghz } => {
                write!(f, "line at {offset_ghz} GHz lies inside the bracket")
            }
            Error::DegenerateRate => f.write_str("eps and gamma_tilde are both zero"),
            Error::NonPositiveEpsilon => f.write_str("epsilon must be positive"),
            Error::ZeroGyro => f.write_str("gyromagnetic ratio is zero"),
            Error::StepTooLarge { dt, max_dt } => {
                write!(f, "step {dt} exceeds stability limit {max_dt}")
            }
            Error::SingularBracket => f.write_str("stationary bracket coefficient is not positive"),
            Error::DegenerateSignal => f.write_str("signal variance is zero across the ensemble"),
            Error::TruncationLeak { time, population } => write!(
                f,
                "Fock truncation leak: top level population {population:.3e} at t = {time}"
            ),
            Error::DimMismatch => f.write_str("operator and state dimensions differ"),
            Error::InvalidDims => f.write_str("each Fock dimension must be >= 2, product <= 4096"),
            Error::InvalidInput(msg) => f.write_str(msg),
        }
    }
}

impl core::error::Error for Error {}
