use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("operation requires dimension {required}, field has {actual}")]
    Dimension { required: u8, actual: u8 },

    #[error("negative-order homogeneous norm of a field with nonzero mean (|c0| = {mean_mag:.3e})")]
    MeanNotZero { mean_mag: f64 },

    #[error("more than one distinguished factor among the six entering a contraction")]
    DistinguishedCollision,

    #[error("no time assigned to internal vertex {0}")]
    MissingTime(usize),

    #[error("exponent relation violated: {0}")]
    ExponentRelation(String),

    #[error("L^p norm undefined for this potential: {0}")]
    PotentialNorm(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("calibration constant missing: run the single-step estimate reports first")]
    CalibrationMissing,

    #[error("insufficient snapshots: {0}")]
    SnapshotCadence(String),

    #[error("solver blow-up guard tripped at step {step}: amplitude ratio {ratio:.3e}")]
    BlowUp { step: usize, ratio: f64 },

    #[error("report schema mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: String, found: String },

    #[error("malformed report: {0}")]
    MalformedReport(String),

    #[error(transparent)]
    Combinatorics(#[from] hierlab_combinatorics::CombinatoricsError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
