//! Listing detection and parsing for free-form model output and corpora.

mod probe;
mod scan;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use probe::{probe_corpus, probe_file, ProbeStats};

/// One enumerated entry: the tag number and what was said about it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ListingItem {
    pub tag_id: u32,
    pub description: String,
}

impl ListingItem {
    pub fn new(tag_id: u32, description: impl Into<String>) -> Self {
        ListingItem {
            tag_id,
            description: description.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedListing {
    pub items: Vec<ListingItem>,
    /// Text outside any recognised item, one trimmed line per entry.
    pub residual: String,
}

impl ParsedListing {
    /// Builds a listing from pre-parsed items. Repeated tag ids keep the
    /// first occurrence.
    pub fn from_items(items: impl IntoIterator<Item = ListingItem>) -> Self {
        let mut seen = HashSet::new();
        ParsedListing {
            items: items.into_iter().filter(|i| seen.insert(i.tag_id)).collect(),
            residual: String::new(),
        }
    }

    pub fn get(&self, tag_id: u32) -> Option<&ListingItem> {
        self.items.iter().find(|i| i.tag_id == tag_id)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListingDetection {
    pub has_listing: bool,
    /// Byte ranges `[start, end)` of each detected listing, ascending.
    pub spans: Vec<(usize, usize)>,
    pub item_count: usize,
}

/// Finds listing-style content: runs of at least two enumerated items
/// numbered from 1 with strictly increasing numbers.
pub fn detect_listing(text: &str) -> ListingDetection {
    let mut spans = Vec::new();
    let mut item_count = 0;
    for run in scan::runs(text) {
        if run.len() >= 2 && run[0].number == 1 {
            spans.push((run[0].start, run[run.len() - 1].body_end));
            item_count += run.len();
        }
    }
    ListingDetection {
        has_listing: item_count >= 2,
        spans,
        item_count,
    }
}

/// Extracts `(tag_id, description)` items from model output.
///
/// Accepts `N.`, `N)`, `N:` and `Tag N [is]` line items as well as inline
/// `1. a, 2. b` sequences. A description runs to the next enumerator or the
/// end of its line. Later repeats of a tag id, and all text outside items,
/// are collected in `residual`.
pub fn parse_listing(text: &str) -> ParsedListing {
    let mut items = Vec::new();
    let mut seen = HashSet::new();
    let mut covered: Vec<(usize, usize)> = Vec::new();
    for run in scan::runs(text) {
        for item in run {
            let description =
                scan::clean_description(&text[item.body_start..item.body_end], item.inline_next);
            if seen.insert(item.number) {
                items.push(ListingItem {
                    tag_id: item.number,
                    description,
                });
                covered.push((item.start, item.body_end));
            }
        }
    }
    covered.sort_unstable();

    let mut rest = String::with_capacity(text.len());
    let mut at = 0;
    for (start, end) in covered {
        if start > at {
            rest.push_str(&text[at..start]);
            rest.push('\n');
        }
        at = at.max(end);
    }
    rest.push_str(&text[at..]);
    let residual = rest
        .lines()
        .map(|l| l.trim().trim_start_matches(['-', '*', '•']).trim())
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n");

    ParsedListing { items, residual }
}
