use std::fmt::Write as _;
use std::path::Path;

use crate::trace::OptRun;

pub const HISTORY_HEADER: &str = "iter,objective,volume_fraction,max_change,duality_gap";

/// Convergence history, one row per iteration, 17 significant digits.
pub fn history_csv(run: &OptRun) -> String {
    let mut s = String::with_capacity(HISTORY_HEADER.len() + 1 + 100 * run.records.len());
    s.push_str(HISTORY_HEADER);
    s.push('\n');
    for r in &run.records {
        let _ = write!(
            s,
            "{},{:.16e},{:.16e},{:.16e},",
            r.iteration, r.objective, r.volume_fraction, r.max_change
        );
        if let Some(gap) = r.duality_gap {
            let _ = write!(s, "{gap:.16e}");
        }
        s.push('\n');
    }
    s
}

pub fn write_history_csv(run: &OptRun, path: &Path) -> crate::Result<()> {
    super::write_text(path, &history_csv(run))
}
