//! Enumerator scanning shared by detection and parsing.
//!
//! Grammar, per line after optional indentation and an optional `-`, `*` or
//! `•` bullet:
//!
//! * `N.`, `N)` or `N:` followed by whitespace or end of line;
//! * `Tag N` (any case) followed by a non-alphanumeric character or end of line.
//!
//! Inside a line, `N.` or `N)` preceded by whitespace, `,` or `;` and followed
//! by whitespace and more text is an inline enumerator. Inline enumerators only
//! count when they continue the current run with `N = previous + 1`, or open
//! one with `1` immediately followed by an inline `2` on the same line.
//!
//! Items of a run have strictly increasing numbers. A line enumerator indented
//! deeper than the first item of the current run is nested and ignored.

const MAX_DIGITS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Candidate {
    /// Byte offset of the enumerator (bullet excluded).
    pub start: usize,
    /// Byte offset where the item body begins.
    pub body_start: usize,
    pub number: u32,
    pub line_start: bool,
    pub indent: usize,
    pub line: usize,
    /// Byte offset of the end of the line (exclusive, before `\r\n`).
    pub line_end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Item {
    pub number: u32,
    pub start: usize,
    pub body_start: usize,
    pub body_end: usize,
    pub inline_next: bool,
}

pub(crate) type Run = Vec<Item>;

fn digits_at(bytes: &[u8], at: usize) -> Option<(u32, usize)> {
    let len = bytes[at..].iter().take_while(|b| b.is_ascii_digit()).count();
    if len == 0 || len > MAX_DIGITS {
        return None;
    }
    let n = std::str::from_utf8(&bytes[at..at + len]).ok()?.parse().ok()?;
    Some((n, at + len))
}

fn skip_ws(bytes: &[u8], mut at: usize, end: usize) -> usize {
    while at < end && (bytes[at] == b' ' || bytes[at] == b'\t') {
        at += 1;
    }
    at
}

fn line_start_candidate(text: &str, line: usize, begin: usize, end: usize) -> Option<Candidate> {
    let bytes = text.as_bytes();
    let mut at = skip_ws(bytes, begin, end);
    let indent = at - begin;
    let rest = &text[at..end];
    for bullet in ["-", "*", "•"] {
        if let Some(after) = rest.strip_prefix(bullet) {
            if after.starts_with([' ', '\t']) {
                at = skip_ws(bytes, at + bullet.len(), end);
                break;
            }
        }
    }
    let start = at;

    if at < end && bytes[at].is_ascii_digit() {
        let (number, after) = digits_at(&bytes[..end], at)?;
        if after >= end || !matches!(bytes[after], b'.' | b')' | b':') {
            return None;
        }
        let punct_end = after + 1;
        if punct_end < end && !matches!(bytes[punct_end], b' ' | b'\t') {
            return None;
        }
        return Some(Candidate {
            start,
            body_start: skip_ws(bytes, punct_end, end),
            number,
            line_start: true,
            indent,
            line,
            line_end: end,
        });
    }

    if end - at >= 4 && bytes[at..at + 3].eq_ignore_ascii_case(b"tag") {
        let num_at = skip_ws(bytes, at + 3, end);
        if num_at == at + 3 {
            return None;
        }
        let (number, after) = digits_at(&bytes[..end], num_at)?;
        if after < end && bytes[after].is_ascii_alphanumeric() {
            return None;
        }
        let mut body = skip_ws(bytes, after, end);
        if body < end && matches!(bytes[body], b':' | b'-' | b'.' | b')') {
            body = skip_ws(bytes, body + 1, end);
        } else if end - body >= 3
            && bytes[body..body + 2].eq_ignore_ascii_case(b"is")
            && matches!(bytes[body + 2], b' ' | b'\t')
        {
            body = skip_ws(bytes, body + 2, end);
        }
        return Some(Candidate {
            start,
            body_start: body,
            number,
            line_start: true,
            indent,
            line,
            line_end: end,
        });
    }
    None
}

fn inline_candidates(
    text: &str,
    line: usize,
    from: usize,
    end: usize,
    indent: usize,
    out: &mut Vec<Candidate>,
) {
    let bytes = text.as_bytes();
    let mut at = from.max(1);
    while at < end {
        let b = bytes[at];
        if b.is_ascii_digit() && matches!(bytes[at - 1], b' ' | b'\t' | b',' | b';') {
            if let Some((number, after)) = digits_at(&bytes[..end], at) {
                if after + 1 < end
                    && matches!(bytes[after], b'.' | b')')
                    && matches!(bytes[after + 1], b' ' | b'\t')
                {
                    let body_start = skip_ws(bytes, after + 1, end);
                    if body_start < end {
                        out.push(Candidate {
                            start: at,
                            body_start,
                            number,
                            line_start: false,
                            indent,
                            line,
                            line_end: end,
                        });
                        at = body_start;
                        continue;
                    }
                }
            }
            // skip the rest of this digit run
            while at < end && bytes[at].is_ascii_digit() {
                at += 1;
            }
            continue;
        }
        at += 1;
    }
}

pub(crate) fn candidates(text: &str) -> Vec<Candidate> {
    let mut out = Vec::new();
    let mut begin = 0;
    for (line, raw) in text.split('\n').enumerate() {
        let mut end = begin + raw.len();
        if raw.ends_with('\r') {
            end -= 1;
        }
        let bytes = text.as_bytes();
        let indent = skip_ws(bytes, begin, end) - begin;
        let inline_from = match line_start_candidate(text, line, begin, end) {
            Some(c) => {
                out.push(c);
                c.body_start
            }
            None => begin,
        };
        inline_candidates(text, line, inline_from, end, indent, &mut out);
        begin += raw.len() + 1;
    }
    out
}

/// Groups candidates into runs of strictly increasing enumerators.
pub(crate) fn runs(text: &str) -> Vec<Run> {
    let cands = candidates(text);
    let mut runs: Vec<Run> = Vec::new();
    let mut current: Option<(usize, Vec<Candidate>)> = None;

    let close = |current: &mut Option<(usize, Vec<Candidate>)>, runs: &mut Vec<Run>| {
        if let Some((_, items)) = current.take() {
            runs.push(finish_run(&items));
        }
    };

    for (k, c) in cands.iter().enumerate() {
        let last = current.as_ref().and_then(|(_, items)| items.last()).map(|i| i.number);
        if c.line_start {
            if let Some((indent, _)) = &current {
                if c.indent > *indent {
                    continue;
                }
            }
            if c.number != 1 && last.is_some_and(|l| c.number > l) {
                current.as_mut().expect("run open").1.push(*c);
            } else {
                close(&mut current, &mut runs);
                current = Some((c.indent, vec![*c]));
            }
        } else if c.number > 1 && last == Some(c.number - 1) {
            current.as_mut().expect("run open").1.push(*c);
        } else if c.number == 1
            && cands
                .get(k + 1)
                .is_some_and(|n| !n.line_start && n.line == c.line && n.number == 2)
        {
            close(&mut current, &mut runs);
            current = Some((c.indent, vec![*c]));
        }
    }
    close(&mut current, &mut runs);
    runs
}

fn finish_run(cands: &[Candidate]) -> Run {
    cands
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let next_same_line = cands.get(i + 1).filter(|n| n.line == c.line);
            Item {
                number: c.number,
                start: c.start,
                body_start: c.body_start,
                body_end: next_same_line.map_or(c.line_end, |n| n.start),
                inline_next: next_same_line.is_some(),
            }
        })
        .collect()
}

/// Item text with separators and trailing punctuation removed.
pub(crate) fn clean_description(raw: &str, inline_next: bool) -> String {
    let mut s = raw.trim();
    if inline_next {
        s = s.trim_end_matches([',', ';', ' ', '\t']);
        for joiner in [" and", " or", ",and", ",or"] {
            if s.len() > joiner.len() && s.to_ascii_lowercase().ends_with(joiner) {
                s = s[..s.len() - joiner.len()].trim_end();
                break;
            }
        }
    }
    s = s.trim_end_matches([',', ';']).trim_end();
    if let Some(stripped) = s.strip_suffix('.') {
        s = stripped.trim_end();
    }
    s.to_string()
}
