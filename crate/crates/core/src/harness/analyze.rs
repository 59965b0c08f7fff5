use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::modpres::{analyze_presentation, ModuleReport, Presentation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub report: ModuleReport,
    /// How many times the precision was doubled.
    pub retries: u32,
}

/// Analyzes at the working precision, doubling it up to `retries` times on
/// precision exhaustion.
pub fn analyze_with_retries(pres: &Presentation, cap: u64, retries: u32) -> Result<Analysis> {
    let mut nprec = pres.working_precision();
    let mut attempt = 0;
    loop {
        let outcome = pres
            .at_precision(nprec)
            .and_then(|lifted| analyze_presentation(&lifted, cap));
        match outcome {
            Ok(report) => {
                return Ok(Analysis {
                    report,
                    retries: attempt,
                })
            }
            Err(err) if err.is_precision() && attempt < retries => {
                attempt += 1;
                nprec *= 2;
            }
            Err(err) => return Err(err),
        }
    }
}

/// The full report, with a single retry at doubled precision.
pub fn analyze(pres: &Presentation, cap: u64) -> Result<ModuleReport> {
    Ok(analyze_with_retries(pres, cap, 1)?.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::RingConfig;
    use crate::groupring::GroupRing;
    use crate::modpres::DEFAULT_MINOR_CAP;
    use std::sync::Arc;

    #[test]
    fn analyze_examples() {
        let gr = GroupRing::new(Arc::new(RingConfig::new(2, 1, 3, None).unwrap())).unwrap();
        let free = Presentation::new(&gr, 1, 3, vec![]).unwrap();
        let r = analyze(&free, DEFAULT_MINOR_CAP).unwrap();
        assert!(r.values.principal && r.values.equality);
        let field = Presentation::residue_field(&gr).unwrap();
        let a = analyze_with_retries(&field, DEFAULT_MINOR_CAP, 2).unwrap();
        assert_eq!(a.retries, 0);
        assert!(!a.report.values.principal && a.report.values.equality);
        assert_eq!(a.report.values.dim_k_mod_mk, 2);
    }
}
