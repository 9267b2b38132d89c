//! End-to-end protocol driver.
pub use crate::oracle::SelectionMode;

/// Output-visibility policy for the serving phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visibility {
    Restricted,
    Full,
}

#[derive(Debug, Clone)]
pub struct RunConfig;
#[derive(Debug)]
pub struct RunOutcome;
#[derive(Debug)]
pub enum RunError {}
