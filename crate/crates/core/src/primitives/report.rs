//! Game reports and the comparison relation shared with the bound checks.

use serde::{Deserialize, Serialize};

/// Direction of a checked inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs <= rhs`
    Le,
    /// `lhs >= rhs`
    Ge,
    /// `|lhs - rhs| <= tolerance`
    Eq,
}

impl Relation {
    /// Signed slack: nonnegative when the relation holds exactly.
    pub fn margin(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Relation::Le => rhs - lhs,
            Relation::Ge => lhs - rhs,
            Relation::Eq => -(lhs - rhs).abs(),
        }
    }

    pub fn holds(self, lhs: f64, rhs: f64, tolerance: f64) -> bool {
        self.margin(lhs, rhs) >= -tolerance
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "==",
        }
    }
}

/// How the adversary saw its copies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopyMode {
    /// Literal joint state `φ^{⊗t}` or per-copy measurements, bounded by `t`.
    #[default]
    Sampled,
    /// Direct access to the exact single-copy density matrix.
    Oracle,
}

/// How a trial's win is scored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scoring {
    /// Add the verifier's acceptance probability.
    #[default]
    Exact,
    /// Add a Bernoulli draw from the acceptance probability.
    Sampled,
}

/// One trial of a one-wayness game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub key: u64,
    pub guess: Option<u64>,
    /// Verifier acceptance probability of the guess (0 for ⊥ or failure).
    pub accept_prob: f64,
    /// Contribution to `wins`: `accept_prob` or a sampled bit.
    pub score: f64,
    pub bot: bool,
    pub failure: Option<String>,
    /// `||φ_key - φ_guess||_tr` when requested.
    pub td_to_target: Option<f64>,
}

/// Per-arm tallies of a distinguishing game. `ones_b` counts output 1 on
/// challenges drawn from `ρ_b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmTallies {
    pub trials0: u64,
    pub ones0: u64,
    pub trials1: u64,
    pub ones1: u64,
}

impl ArmTallies {
    pub fn rate0(&self) -> f64 {
        self.ones0 as f64 / self.trials0.max(1) as f64
    }

    pub fn rate1(&self) -> f64 {
        self.ones1 as f64 / self.trials1.max(1) as f64
    }

    /// `|Pr[1|ρ_0] - Pr[1|ρ_1]|`.
    pub fn advantage(&self) -> f64 {
        (self.rate0() - self.rate1()).abs()
    }

    pub fn ci95_halfwidth(&self) -> f64 {
        let (p0, p1) = (self.rate0(), self.rate1());
        1.96 * (p0 * (1.0 - p0) / self.trials0.max(1) as f64 + p1 * (1.0 - p1) / self.trials1.max(1) as f64).sqrt()
    }
}

/// Aggregate outcome of a game.
///
/// For success games `estimate = wins / trials` and the confidence interval
/// is the normal approximation. For distinguishing games `arms` is set,
/// `estimate` is the advantage and `wins` counts correct guesses of `b`
/// (output 1 read as "ρ_0").
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub game: String,
    pub trials: u64,
    pub wins: f64,
    pub estimate: f64,
    pub ci95_halfwidth: f64,
    pub bound: Option<f64>,
    pub bound_source: String,
    pub relation: Relation,
    pub pass: Option<bool>,
    pub mode: CopyMode,
    pub scoring: Scoring,
    pub failures: u64,
    pub bots: u64,
    pub arms: Option<ArmTallies>,
    pub records: Vec<TrialRecord>,
}

impl GameReport {
    pub fn from_records(game: impl Into<String>, records: Vec<TrialRecord>, mode: CopyMode, scoring: Scoring) -> Self {
        let trials = records.len() as u64;
        let wins: f64 = records.iter().map(|r| r.score).sum();
        let estimate = if trials == 0 { 0.0 } else { wins / trials as f64 };
        GameReport {
            game: game.into(),
            trials,
            wins,
            estimate,
            ci95_halfwidth: ci95(estimate, trials),
            bound: None,
            bound_source: String::new(),
            relation: Relation::Ge,
            pass: None,
            mode,
            scoring,
            failures: records.iter().filter(|r| r.failure.is_some()).count() as u64,
            bots: records.iter().filter(|r| r.bot).count() as u64,
            arms: None,
            records,
        }
    }

    pub fn from_arms(game: impl Into<String>, arms: ArmTallies, mode: CopyMode) -> Self {
        let trials = arms.trials0 + arms.trials1;
        let correct = arms.ones0 + (arms.trials1 - arms.ones1);
        GameReport {
            game: game.into(),
            trials,
            wins: correct as f64,
            estimate: arms.advantage(),
            ci95_halfwidth: arms.ci95_halfwidth(),
            bound: None,
            bound_source: String::new(),
            relation: Relation::Ge,
            pass: None,
            mode,
            scoring: Scoring::Sampled,
            failures: 0,
            bots: 0,
            arms: Some(arms),
            records: Vec::new(),
        }
    }

    /// Standard error (`ci95_halfwidth / 1.96`).
    pub fn sigma(&self) -> f64 {
        self.ci95_halfwidth / 1.96
    }

    /// Attaches a bound and evaluates it with `3σ` statistical slack.
    pub fn with_bound(self, bound: f64, source: impl Into<String>, relation: Relation) -> Self {
        let slack = 3.0 * self.sigma();
        self.with_bound_slack(bound, source, relation, slack)
    }

    /// Attaches a bound and evaluates it with an explicit slack.
    pub fn with_bound_slack(mut self, bound: f64, source: impl Into<String>, relation: Relation, slack: f64) -> Self {
        self.pass = Some(relation.holds(self.estimate, bound, slack));
        self.bound = Some(bound);
        self.bound_source = source.into();
        self.relation = relation;
        self
    }

    /// Fraction of trials that ended in ⊥.
    pub fn bot_rate(&self) -> f64 {
        self.bots as f64 / self.trials.max(1) as f64
    }

    /// Recomputes `wins` from the trial log.
    pub fn recount(&self) -> f64 {
        self.records.iter().map(|r| r.score).sum()
    }
}

/// `1.96 * sqrt(p (1 - p) / n)`.
pub fn ci95(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    1.96 * (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(trial: u64, score: f64) -> TrialRecord {
        TrialRecord {
            trial,
            key: 0,
            guess: Some(0),
            accept_prob: score,
            score,
            bot: false,
            failure: None,
            td_to_target: None,
        }
    }

    #[test]
    fn arithmetic_is_recomputable() {
        let records: Vec<_> = (0..10).map(|i| rec(i, (i % 2) as f64)).collect();
        let r = GameReport::from_records("g", records, CopyMode::Sampled, Scoring::Sampled);
        assert_eq!(r.wins, 5.0);
        assert_eq!(r.estimate, 0.5);
        assert_eq!(r.recount(), r.wins);
        assert!((r.ci95_halfwidth - 1.96 * (0.25f64 / 10.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bound_uses_three_sigma() {
        let records: Vec<_> = (0..100).map(|i| rec(i, (i < 45) as u8 as f64)).collect();
        let r = GameReport::from_records("g", records, CopyMode::Sampled, Scoring::Sampled);
        let sigma = (0.45f64 * 0.55 / 100.0).sqrt();
        assert!(r.clone().with_bound(0.45 + 2.9 * sigma, "", Relation::Ge).pass.unwrap());
        assert!(!r.with_bound(0.45 + 3.1 * sigma, "", Relation::Ge).pass.unwrap());
    }

    #[test]
    fn arm_advantage() {
        let arms = ArmTallies {
            trials0: 100,
            ones0: 80,
            trials1: 100,
            ones1: 30,
        };
        let r = GameReport::from_arms("efi", arms, CopyMode::Oracle);
        assert!((r.estimate - 0.5).abs() < 1e-15);
        assert_eq!(r.wins, 150.0);
    }

    #[test]
    fn relation_margins() {
        assert_eq!(Relation::Le.margin(1.0, 3.0), 2.0);
        assert_eq!(Relation::Ge.margin(1.0, 3.0), -2.0);
        assert!(Relation::Eq.holds(1.0, 1.0 + 1e-12, 1e-9));
    }
}
