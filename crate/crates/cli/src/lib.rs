//! Library surface of the scenario runner, shared by the binary and the
//! verification suite.

pub mod config;
pub mod report;
pub mod scenarios;

use report::CheckReport;

/// Exit code for a finished run: 0 when every check passed, 1 otherwise.
pub fn exit_code_for(reports: &[CheckReport]) -> i32 {
    if reports.iter().all(|r| r.outcome.pass) {
        0
    } else {
        1
    }
}
