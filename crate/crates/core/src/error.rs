use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} must be a power of two, got {value}")]
    NotPowerOfTwo { what: &'static str, value: f64 },

    #[error("grid needs N >= L and N >= 2 (got L = {length}, N = {samples})")]
    Resolution { length: f64, samples: u64 },

    #[error("grids differ: (L = {0}, N = {1}) vs (L = {2}, N = {3})")]
    GridMismatch(f64, u64, f64, u64),

    #[error("values length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("frequency {0} is not an integer multiple of 1/L")]
    OffLattice(f64),

    #[error("filter {kind} at level {level} needs support edge {edge} <= Nyquist {nyquist}")]
    Nyquist {
        kind: &'static str,
        level: i32,
        edge: f64,
        nyquist: f64,
    },

    #[error("level {level} outside the admissible range [{min}, {max}]")]
    LevelRange { level: i32, min: i32, max: i32 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("kernel mass diverges: need sigma*t > 1, got sigma = {sigma}, t = {t}")]
    DivergentKernel { sigma: f64, t: f64 },

    #[error("eta floor {floor:.3e} on |x| <= {radius} is too small; largest usable radius is about {suggested}")]
    EtaFloor {
        floor: f64,
        radius: f64,
        suggested: f64,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("need at least 3 distinct points for a fit, got {0}")]
    TooFewPoints(usize),

    #[error("regressor has zero variance")]
    DegenerateRegressor,

    #[error("grid would need {required} samples, above the limit {limit}")]
    GridTooLarge { required: u64, limit: u64 },

    #[error("bad file format: {0}")]
    Format(String),

    #[error("io: {0}")]
    Io(String),

    #[error("unknown selector `{0}`")]
    UnknownSelector(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
