use serde::Serialize;

use crate::padic::{Norm, PadicNumber};

/// Approximants `A_N` of some limit, with their Cauchy rates.
///
/// Convergence is declared at the first level whose term agrees with the
/// previous one modulo `p^target` (both terms known at least that far).
#[derive(Clone, Debug, Serialize)]
pub struct ApproximantSequence {
    target: i64,
    terms: Vec<(u32, PadicNumber)>,
    /// `|A_{N+1} - A_N|`, one per consecutive pair.
    cauchy_rates: Vec<Norm>,
    converged_at: Option<u32>,
    declared_limit: Option<PadicNumber>,
    #[serde(skip)]
    best: Option<PadicNumber>,
}

impl ApproximantSequence {
    pub fn new(target: i64) -> Self {
        ApproximantSequence {
            target,
            terms: Vec::new(),
            cauchy_rates: Vec::new(),
            converged_at: None,
            declared_limit: None,
            best: None,
        }
    }

    pub fn from_terms(target: i64, terms: impl IntoIterator<Item = (u32, PadicNumber)>) -> Self {
        let mut s = Self::new(target);
        for (n, v) in terms {
            s.push(n, v);
        }
        s
    }

    /// Appends a term and returns whether the sequence has converged.
    pub fn push(&mut self, level: u32, value: PadicNumber) -> bool {
        if let Some((_, prev)) = self.terms.last() {
            let diff = &value - prev;
            self.cauchy_rates.push(diff.norm());
            let certified = prev.truncate(diff.valuation_bound());
            if self.best.as_ref().is_none_or(|b| certified.precision() > b.precision()) {
                self.best = Some(certified);
            }
            if self.converged_at.is_none()
                && diff.valuation_bound() >= self.target
                && value.precision() >= self.target
            {
                self.converged_at = Some(level);
                self.declared_limit = Some(value.truncate(self.target));
            }
        }
        self.terms.push((level, value));
        self.converged_at.is_some()
    }

    pub fn target(&self) -> i64 {
        self.target
    }

    pub fn terms(&self) -> &[(u32, PadicNumber)] {
        &self.terms
    }

    pub fn cauchy_rates(&self) -> &[Norm] {
        &self.cauchy_rates
    }

    pub fn converged_at(&self) -> Option<u32> {
        self.converged_at
    }

    pub fn declared_limit(&self) -> Option<&PadicNumber> {
        self.declared_limit.as_ref()
    }

    pub fn last(&self) -> Option<&PadicNumber> {
        self.terms.last().map(|(_, v)| v)
    }

    pub fn term_at(&self, level: u32) -> Option<&PadicNumber> {
        self.terms.iter().find(|(n, _)| *n == level).map(|(_, v)| v)
    }

    /// The declared limit; otherwise the term certified to the most digits by
    /// its successor, truncated there; the only term of a one-term sequence.
    pub fn best_estimate(&self) -> Option<&PadicNumber> {
        self.declared_limit
            .as_ref()
            .or(self.best.as_ref())
            .or_else(|| self.last())
    }

    /// Whether every Cauchy rate is at most the previous one.
    pub fn rates_non_increasing(&self) -> bool {
        self.cauchy_rates.windows(2).all(|w| w[1] <= w[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declares_limit_on_agreement() {
        let p = 5;
        let terms = (1..=8u32).map(|n| {
            let v = (5i64.pow(n) - 1) / 2;
            (n, PadicNumber::from_integer(v, p, 20).unwrap())
        });
        let s = ApproximantSequence::from_terms(5, terms);
        assert_eq!(s.converged_at(), Some(6));
        let half = PadicNumber::from_rational(-1, 2, p, 5).unwrap();
        assert_eq!(s.declared_limit(), Some(&half));
        assert_eq!(s.cauchy_rates()[0], Norm::from_valuation(p, 1));
        assert!(s.rates_non_increasing());
    }

    #[test]
    fn constant_sequence_has_zero_rates() {
        let one = PadicNumber::one(3, 10);
        let s = ApproximantSequence::from_terms(10, (1..4).map(|n| (n, one.clone())));
        assert!(s.cauchy_rates().iter().all(Norm::is_zero));
        assert_eq!(s.converged_at(), Some(2));
    }
}
