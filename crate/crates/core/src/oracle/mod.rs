//! Brute-force cross-checks of the provers and the disambiguator.
//!
//! The comparisons take the plain classical prover and the model checker as
//! ground truth and compute disambiguations with their own enumerator in
//! [`delta`], so a bug in the UR machinery used by the partial calculus does
//! not cancel itself out.

pub mod corpus;
pub mod delta;

use serde::Serialize;
use thiserror::Error;

use crate::semantics::{consequence_u, ConsequenceError, ConsequenceLimits, Verdict};
use crate::syntax::Formula;
use crate::tableau::{prove, Calculus, ProofResult, ProveError, SearchLimits};

pub use corpus::{regression_corpus, CorpusItem};

/// Formulas with more total disambiguations are rejected.
pub const MAX_READINGS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub claim: String,
    pub method: String,
    pub agreement: bool,
    /// Some prover run stopped at a search bound.
    pub limit_sensitive: bool,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{readings} total disambiguations exceed the cap of {cap}")]
    CapExceeded { readings: usize, cap: usize },
    #[error(transparent)]
    Prove(#[from] ProveError),
    #[error(transparent)]
    Consequence(#[from] ConsequenceError),
}

fn outcome(r: &ProofResult) -> &'static str {
    match r {
        ProofResult::Proved(_) => "proved",
        ProofResult::NotProved { limit_reached: true, .. } => "not proved (bound hit)",
        ProofResult::NotProved { .. } => "not proved",
    }
}

fn bounded_delta(phi: &Formula) -> Result<Vec<Formula>, OracleError> {
    let ds = delta::delta(phi);
    if ds.len() > MAX_READINGS {
        return Err(OracleError::CapExceeded { readings: ds.len(), cap: MAX_READINGS });
    }
    Ok(ds)
}

fn check_against_readings(
    claim: &str,
    calculus: Calculus,
    phi: &Formula,
    limits: SearchLimits,
) -> Result<OracleReport, OracleError> {
    let ds = bounded_delta(phi)?;
    let left = prove(calculus, &[], phi, limits)?;
    let mut limit_sensitive = left.limit_reached();
    let mut all = true;
    let mut per_reading = Vec::new();
    for d in &ds {
        let r = prove(Calculus::Tc, &[], d, limits)?;
        limit_sensitive |= r.limit_reached();
        all &= r.is_proved();
        per_reading.push(format!("tc {d}: {}", outcome(&r)));
    }
    let agreement = left.is_proved() == all;
    let mut witnesses = Vec::new();
    if !agreement {
        witnesses.push(format!("{calculus} {phi}: {}", outcome(&left)));
        witnesses.extend(per_reading);
    }
    Ok(OracleReport {
        claim: format!("{claim}: {phi}"),
        method: format!(
            "{calculus} on the formula vs tc on each of {} enumerated disambiguations, gamma {}",
            ds.len(),
            limits.gamma_multiplicity
        ),
        agreement,
        limit_sensitive,
        witnesses,
    })
}

/// `prove_tcu(φ)` succeeds exactly when `prove_tc(d)` succeeds for every
/// total disambiguation `d`.
pub fn check_theorem10(phi: &Formula, limits: SearchLimits) -> Result<OracleReport, OracleError> {
    check_against_readings("tcu-readings", Calculus::Tcu, phi, limits)
}

/// As [`check_theorem10`] for the partially disambiguating calculus.
pub fn check_theorem14(phi: &Formula, limits: SearchLimits) -> Result<OracleReport, OracleError> {
    check_against_readings("tcup-readings", Calculus::Tcup, phi, limits)
}

/// The UR module's disambiguation agrees with the naive enumerator.
pub fn check_delta(phi: &Formula) -> OracleReport {
    let want: Vec<String> = delta::delta(phi).iter().map(|d| d.to_string()).collect();
    let got: Vec<String> = crate::ur::delta(phi).iter().map(|d| d.to_string()).collect();
    let agreement = want == got;
    let witnesses = if agreement {
        Vec::new()
    } else {
        vec![format!("enumerated: {}", want.join(" ; ")), format!("ur module: {}", got.join(" ; "))]
    };
    OracleReport {
        claim: format!("delta: {phi}"),
        method: "all bijections of holes to labels checked on a closure matrix".into(),
        agreement,
        limit_sensitive: false,
        witnesses,
    }
}

/// Every calculus that proves `premises ⊢ conclusion` is confirmed by an
/// exhaustive search for countermodels up to `max_domain` individuals.
pub fn soundness_sweep(
    premises: &[Formula],
    conclusion: &Formula,
    max_domain: usize,
    limits: SearchLimits,
) -> Result<OracleReport, OracleError> {
    let classical = premises.iter().chain([conclusion]).all(Formula::is_ur_free);
    let mut proved_by = Vec::new();
    let mut limit_sensitive = false;
    for calc in [Calculus::Tc, Calculus::Tcu, Calculus::Tcup] {
        if calc == Calculus::Tc && !classical {
            continue;
        }
        let r = prove(calc, premises, conclusion, limits)?;
        limit_sensitive |= r.limit_reached();
        if r.is_proved() {
            proved_by.push(calc.to_string());
        }
    }
    // Signatures too large for exhaustive search at `max_domain` are swept
    // at the largest size under the model cap.
    let mut size = max_domain;
    let verdict = loop {
        match consequence_u(premises, conclusion, ConsequenceLimits::up_to(size)) {
            Err(ConsequenceError::ResourceCap { .. }) if size > 1 => size -= 1,
            other => break other?,
        }
    };
    let searched = if size == max_domain {
        format!("model search up to {size}")
    } else {
        format!("model search up to {size} (model cap reached at {})", size + 1)
    };
    let sequent = format!(
        "{} |- {conclusion}",
        premises.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
    );
    let mut witnesses = Vec::new();
    if let Verdict::Counterexample(c) = &verdict {
        witnesses.push(format!("countermodel {}", c.model));
    }
    let agreement = proved_by.is_empty() || !verdict.is_counterexample();
    let method = if proved_by.is_empty() {
        format!("not proved by any calculus; {searched} for information")
    } else {
        format!("proved by {}; {searched}", proved_by.join(", "))
    };
    Ok(OracleReport { claim: format!("soundness: {}", sequent.trim_start()), method, agreement, limit_sensitive, witnesses })
}
