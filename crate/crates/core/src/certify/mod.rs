//! Checks of the quantitative stability and regularity criteria, each
//! producing a [`CertificateReport`] with margin, inputs and caveats.
//!
//! Sampled time integrals use the trapezoid rule on the sample grid; integrals
//! of analytic quantities (forcing, heat flow) use adaptive Simpson.

mod aposteriori;
mod caloric;
mod checks;
pub mod quadrature;
mod report;
mod tiling;

pub use aposteriori::{verify_condition_c, ConditionCEntry, ConditionCResult};
pub use caloric::{caloric_lower_bound, check_caloric_bound, CaloricBound, CaloricOptions, CaloricProblem};
pub use checks::{
    check_p1, check_proximity_a1, check_proximity_a2, check_small_data_bound, check_smallness_a4, forcing_integral,
    gronwall_envelope, GronwallReport, PerturbedData,
};
pub use report::{
    CertificateReport, Criterion, EpsilonBudget, ReportInputs, CAVEAT_FLOAT, CAVEAT_GALERKIN, CAVEAT_LIFETIME,
    CAVEAT_TRAPEZOID,
};
pub use tiling::{check_corollary2, tile, tiling_factor};

use crate::{Error, Result};

/// Index of a batch of certificates, one row per `(file, report)`.
pub fn write_index_csv<W: std::io::Write>(rows: &[(String, &CertificateReport)], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["file", "criterion", "lhs", "rhs", "margin", "passed"])
        .map_err(|e| Error::Format(e.to_string()))?;
    for (file, r) in rows {
        let criterion = serde_json::to_value(r.criterion)?;
        out.write_record([
            file.clone(),
            criterion.as_str().unwrap_or_default().to_string(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.margin.to_string(),
            r.passed.to_string(),
        ])
        .map_err(|e| Error::Format(e.to_string()))?;
    }
    out.flush()?;
    Ok(())
}
