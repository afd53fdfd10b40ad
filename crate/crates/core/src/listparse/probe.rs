use std::path::Path;

use serde::Deserialize;

use super::detect_listing;
use crate::error::Result;
use crate::jsonio;

/// Counts of texts scanned and texts containing a listing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProbeStats {
    pub total: u64,
    pub listing: u64,
}

impl ProbeStats {
    pub fn observe(&mut self, text: &str) {
        self.total += 1;
        if detect_listing(text).has_listing {
            self.listing += 1;
        }
    }

    /// Associative, so shards can be probed independently.
    pub fn merge(self, other: ProbeStats) -> ProbeStats {
        ProbeStats {
            total: self.total + other.total,
            listing: self.listing + other.listing,
        }
    }

    /// Listing share in hundredths of a percent, rounded half up. An empty
    /// corpus reports 0.
    pub fn basis_points(&self) -> u64 {
        if self.total == 0 {
            return 0;
        }
        (self.listing * 20_000 + self.total) / (2 * self.total)
    }

    /// Percentage with two decimals, e.g. `"7.16"`.
    pub fn percent(&self) -> String {
        let bp = self.basis_points();
        format!("{}.{:02}", bp / 100, bp % 100)
    }
}

pub fn probe_corpus<'a>(texts: impl IntoIterator<Item = &'a str>) -> ProbeStats {
    let mut stats = ProbeStats::default();
    for t in texts {
        stats.observe(t);
    }
    stats
}

#[derive(Deserialize)]
struct ProbeRecord {
    #[serde(default)]
    conversations: Vec<ProbeTurn>,
}

#[derive(Deserialize)]
struct ProbeTurn {
    #[serde(alias = "role")]
    from: String,
    #[serde(alias = "content")]
    value: serde_json::Value,
}

/// Probes every assistant-side turn of a JSON or JSON Lines
/// instruction-tuning file. Each assistant `value` is one text.
pub fn probe_file(path: &Path) -> Result<ProbeStats> {
    let mut stats = ProbeStats::default();
    jsonio::for_each_record_in_file(path, |_, record: ProbeRecord| {
        for turn in record.conversations {
            if matches!(turn.from.as_str(), "gpt" | "assistant") {
                if let serde_json::Value::String(text) = &turn.value {
                    stats.observe(text);
                }
            }
        }
        Ok(())
    })?;
    Ok(stats)
}
