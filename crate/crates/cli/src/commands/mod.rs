pub mod acsm;
pub mod special;
pub mod three_spin;
pub mod verify;

use crate::error::CliError;
use crate::format::Table;

/// Tables to print, plus a failure that still sets the exit code after
/// the output is written.
pub struct Outcome {
    pub tables: Vec<Table>,
    pub failure: Option<CliError>,
}
