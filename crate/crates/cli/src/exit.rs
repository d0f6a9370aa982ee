pub const SUCCESS: u8 = 0;
pub const VERIFICATION_FAILURE: u8 = 1;
pub const USAGE: u8 = 2;
pub const BUDGET: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable catalog, invalid parameters.
    Usage(String),
    Budget(String),
    /// The work budget ran out during verification; the partial report is kept.
    BudgetWithOutput(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => USAGE,
            Failure::Budget(_) | Failure::BudgetWithOutput(_) => BUDGET,
        }
    }
}

/// clap prints help and version itself; those are not errors.
pub fn from_clap_error(e: clap::Error) -> u8 {
    let _ = e.print();
    if e.use_stderr() {
        USAGE
    } else {
        SUCCESS
    }
}
