use serde::{Deserialize, Serialize};

/// Confidence parameter of the reported Hoeffding interval.
pub const CI_DELTA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    WithinBound,
    ExceedsBound,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::WithinBound => 0,
            Verdict::ExceedsBound => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleStats {
    pub enc_queries: u64,
    pub dec_queries: u64,
    pub dec_bottom: u64,
    pub dec_excluded: u64,
    pub sim_checked: u64,
    pub sim_disagreements: u64,
    pub flip_queries: u64,
    pub random_input_queries: u64,
    pub eval_queries: u64,
    pub sign_queries: u64,
}

impl OracleStats {
    pub fn merge(&mut self, o: &OracleStats) {
        self.enc_queries += o.enc_queries;
        self.dec_queries += o.dec_queries;
        self.dec_bottom += o.dec_bottom;
        self.dec_excluded += o.dec_excluded;
        self.sim_checked += o.sim_checked;
        self.sim_disagreements += o.sim_disagreements;
        self.flip_queries += o.flip_queries;
        self.random_input_queries += o.random_input_queries;
        self.eval_queries += o.eval_queries;
        self.sign_queries += o.sign_queries;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub adversary: String,
    pub trials: u64,
    pub lambda: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub backend: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scheme: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub profile: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ria: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub signature: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_queries: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiveRange {
    pub min: usize,
    pub max: usize,
}

/// Outcome of one trial: the score plus per-player wins where the game has several players.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrialRecord {
    pub score: u32,
    pub wins: Vec<bool>,
    pub live: usize,
    pub stats: OracleStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub game: String,
    pub params: GameParams,
    pub histogram: Vec<u64>,
    pub mean: f64,
    pub ci: Interval,
    pub threshold: f64,
    pub slack: f64,
    pub verdict: Verdict,
    pub seed: u64,
    pub oracle_stats: OracleStats,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub live_handles: Option<LiveRange>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wallclock_ms: Option<u64>,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

/// `range * sqrt(ln(2/delta) / (2 trials))`.
pub fn hoeffding_half_width(range: f64, trials: u64, delta: f64) -> f64 {
    if trials == 0 {
        return f64::INFINITY;
    }
    range * ((2.0 / delta).ln() / (2.0 * trials as f64)).sqrt()
}

pub fn verdict_for(mean: f64, half_width: f64, threshold: f64, slack: f64) -> Verdict {
    if mean + half_width <= threshold + slack {
        Verdict::WithinBound
    } else if mean - half_width > threshold + slack {
        Verdict::ExceedsBound
    } else {
        Verdict::Inconclusive
    }
}

pub(crate) struct ReportSpec {
    pub game: String,
    pub params: GameParams,
    pub max_score: u32,
    pub threshold: f64,
    pub slack: Option<f64>,
    pub seed: u64,
    pub track_live: bool,
}

impl GameReport {
    pub(crate) fn build(spec: ReportSpec, records: Vec<TrialRecord>) -> GameReport {
        let trials = records.len() as u64;
        let mut histogram = vec![0u64; spec.max_score as usize + 1];
        let mut stats = OracleStats::default();
        let mut total = 0u64;
        for r in &records {
            histogram[r.score as usize] += 1;
            total += u64::from(r.score);
            stats.merge(&r.stats);
        }
        let mean = if trials == 0 { 0.0 } else { total as f64 / trials as f64 };
        let range = f64::from(spec.max_score);
        let half_width = hoeffding_half_width(range, trials, CI_DELTA);
        let slack = spec.slack.unwrap_or(0.02 * range);
        let live_handles = spec.track_live.then(|| LiveRange {
            min: records.iter().map(|r| r.live).min().unwrap_or(0),
            max: records.iter().map(|r| r.live).max().unwrap_or(0),
        });
        GameReport {
            game: spec.game,
            params: spec.params,
            histogram,
            mean,
            ci: Interval { half_width, lower: mean - half_width, upper: mean + half_width, delta: CI_DELTA },
            threshold: spec.threshold,
            slack,
            verdict: verdict_for(mean, half_width, spec.threshold, slack),
            seed: spec.seed,
            oracle_stats: stats,
            live_handles,
            wallclock_ms: None,
            records,
        }
    }

    pub fn trials(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn scores(&self) -> impl Iterator<Item = u32> + '_ {
        self.records.iter().map(|r| r.score)
    }

    /// Canonical JSON: identical inputs give identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hoeffding_width_matches_closed_form() {
        let w = hoeffding_half_width(2.0, 10_000, 0.01);
        assert!((w - 2.0 * (200f64.ln() / 20_000.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn verdict_regions() {
        assert_eq!(verdict_for(1.75, 0.03, 1.5, 0.04), Verdict::ExceedsBound);
        assert_eq!(verdict_for(1.50, 0.03, 1.5, 0.04), Verdict::WithinBound);
        assert_eq!(verdict_for(1.53, 0.03, 1.5, 0.04), Verdict::Inconclusive);
    }
}
