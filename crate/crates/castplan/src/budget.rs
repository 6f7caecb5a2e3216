//! Deterministic compute budgets.
//!
//! Search budgets are specified in seconds but enforced in *work units* at a
//! fixed nominal rate. Two runs with the same seed therefore truncate at
//! exactly the same point regardless of machine load or thread count, which
//! is what makes benchmark reports byte-identical across runs. The nominal
//! rate approximates real single-core throughput of the inner loops, so a
//! "0.1 s" budget stays desk-scale in real time too.

/// Nominal work units per second. One unit is one annealer bit-flip sweep
/// step; heavier operations charge multiples (see call sites).
pub const WORK_UNITS_PER_SECOND: u64 = 20_000_000;

/// A consumable budget of deterministic work units.
#[derive(Debug, Clone)]
pub struct WorkBudget {
    limit: u64,
    used: u64,
}

impl WorkBudget {
    /// Budget holding `seconds` of nominal compute.
    pub fn from_seconds(seconds: f64) -> Self {
        let limit = if seconds.is_finite() && seconds > 0.0 {
            (seconds * WORK_UNITS_PER_SECOND as f64).round() as u64
        } else {
            0
        };
        WorkBudget { limit, used: 0 }
    }

    /// Unlimited budget (for exhaustive/acceptance runs).
    pub fn unlimited() -> Self {
        WorkBudget {
            limit: u64::MAX,
            used: 0,
        }
    }

    /// Records `units` of spent work.
    pub fn charge(&mut self, units: u64) {
        self.used = self.used.saturating_add(units);
    }

    /// True while more work may be started. A unit of work that begins is
    /// always completed; exhaustion only stops *launching* new work.
    pub fn has_room(&self) -> bool {
        self.used < self.limit
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Deterministic "elapsed seconds" implied by the spent units.
    pub fn virtual_seconds(&self) -> f64 {
        self.used as f64 / WORK_UNITS_PER_SECOND as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_truncates_deterministically() {
        let mut b = WorkBudget::from_seconds(1e-6);
        assert_eq!(b.limit(), 20);
        let mut launched = 0;
        while b.has_room() {
            b.charge(7);
            launched += 1;
        }
        // 0 -> 7 -> 14 -> 21: the third launch starts with 14 < 20.
        assert_eq!(launched, 3);
        assert_eq!(b.used(), 21);
    }

    #[test]
    fn zero_or_negative_seconds_means_no_work() {
        assert!(!WorkBudget::from_seconds(0.0).has_room());
        assert!(!WorkBudget::from_seconds(-1.0).has_room());
    }
}
