//! Attack transcripts as JSON lines.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::primitives::{CopyMode, GameReport};

/// One line of a transcript.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub trial: u64,
    /// Seed of the game stream the trial was derived from.
    pub seed: u64,
    pub mode: CopyMode,
    /// `"guess"`, `"bot"` or `"failure"`.
    pub outcome: String,
    pub recovered_key: Option<u64>,
    pub accept_prob: f64,
    pub td_to_target: Option<f64>,
    pub bot: bool,
}

pub fn transcript_lines(report: &GameReport, seed: u64) -> Vec<TranscriptLine> {
    report
        .records
        .iter()
        .map(|r| TranscriptLine {
            trial: r.trial,
            seed,
            mode: report.mode,
            outcome: if r.bot {
                "bot"
            } else if r.failure.is_some() {
                "failure"
            } else {
                "guess"
            }
            .into(),
            recovered_key: r.guess,
            accept_prob: r.accept_prob,
            td_to_target: r.td_to_target,
            bot: r.bot,
        })
        .collect()
}

/// One JSON object per trial, newline-terminated.
pub fn transcript_jsonl(report: &GameReport, seed: u64) -> Result<String> {
    let mut out = String::new();
    for line in transcript_lines(report, seed) {
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::trivial_adversary;
    use crate::primitives::{run_onewayness_game, GameOptions, OwsgScheme};
    use crate::qcore::{PureState, Rng};

    #[test]
    fn one_line_per_trial() {
        let s = OwsgScheme::pure("basis", 2, 2, |k| PureState::basis(2, k as usize)).unwrap();
        let opts = GameOptions {
            trials: 7,
            ..Default::default()
        };
        let r = run_onewayness_game(&s, &trivial_adversary(&s), &opts, &Rng::from_seed(3)).unwrap();
        let text = transcript_jsonl(&r, 3).unwrap();
        let lines: Vec<TranscriptLine> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 7);
        assert!(lines.iter().all(|l| l.outcome == "guess" && l.seed == 3));
    }
}
