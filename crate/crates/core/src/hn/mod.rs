//! The `H_n` layer: certified witnesses for "allows", sampling-based
//! falsification for "requires", and validators for the identities the
//! arrow families satisfy.

mod falsify;
mod lemmas;
mod witness;

use std::fmt;

pub use falsify::{
    classify_sample, falsify_requires, falsify_requires_with, minimize_counterexample,
    AnalysisReport, Counterexample, FalsifyOptions, SampleOutcome, Verdict,
};
pub use lemmas::{
    run_lemma_suite, sample_distinct_arrow, validate_lemmas, CheckStatus, LemmaCheck, LemmaId,
    LemmaSuiteReport,
};
pub use witness::{
    find_4x4_witnesses, fixture_suite, fixtures_json, witness_suite, witness_suite_from,
    WitnessSuite, FIXTURE_SEED,
};

use crate::engine::RefinedInertia;
use crate::{Error, Result};

/// `H_n = {(0, n, 0, 0), (0, n-2, 0, 2), (2, n-2, 0, 0)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnSet {
    n: usize,
    members: [RefinedInertia; 3],
}

pub fn hn_set(n: usize) -> Result<HnSet> {
    if n < 3 {
        return Err(Error::OrderTooSmall { found: n, min: 3 });
    }
    Ok(HnSet {
        n,
        members: [
            RefinedInertia::new(0, n, 0, 0),
            RefinedInertia::new(0, n - 2, 0, 2),
            RefinedInertia::new(2, n - 2, 0, 0),
        ],
    })
}

impl HnSet {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[RefinedInertia; 3] {
        &self.members
    }

    pub fn contains(&self, ri: &RefinedInertia) -> bool {
        self.members.contains(ri)
    }
}

impl fmt::Display for HnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.members.iter().map(|r| r.to_string()).collect();
        write!(f, "H_{} = {{{}}}", self.n, m.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_orders() {
        let h4 = hn_set(4).unwrap();
        assert_eq!(
            h4.members(),
            &[
                RefinedInertia::new(0, 4, 0, 0),
                RefinedInertia::new(0, 2, 0, 2),
                RefinedInertia::new(2, 2, 0, 0)
            ]
        );
        let h5 = hn_set(5).unwrap();
        assert!(h5.contains(&RefinedInertia::new(0, 3, 0, 2)));
        assert!(h5.contains(&RefinedInertia::new(2, 3, 0, 0)));
        assert!(!h5.contains(&RefinedInertia::new(1, 4, 0, 0)));
        assert_eq!(hn_set(2), Err(Error::OrderTooSmall { found: 2, min: 3 }));
        assert_eq!(hn_set(3).unwrap().to_string(), "H_3 = {(0, 3, 0, 0), (0, 1, 0, 2), (2, 1, 0, 0)}");
    }
}
