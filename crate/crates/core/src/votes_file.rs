//! Plain-text votes file.
//!
//! ```text
//! # candidates: 3
//! 0 1 2
//! w=2.5; 1 2 0
//! ```
//!
//! Lines starting with `#` are comments; `# candidates: <n>` fixes the
//! candidate count (otherwise it is one past the largest index seen). A vote
//! line is an optional `w=<float>;` list weight followed by candidate
//! indices, most preferred first. The list kind is not stored in the file.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ranking::{Dataset, ListKind, Ranking, WeightScheme};

pub fn parse_votes(text: &str, kind: ListKind, scheme: WeightScheme) -> Result<Dataset> {
    let mut declared: Option<usize> = None;
    let mut votes = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: String| Error::Parse { line: lineno + 1, msg };
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("candidates:") {
                let n = value
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| err(format!("bad candidate count: {e}")))?;
                declared = Some(n);
            }
            continue;
        }
        let (weight, body) = match line.strip_prefix("w=") {
            Some(rest) => {
                let (w, body) = rest
                    .split_once(';')
                    .ok_or_else(|| err("weight prefix must end with `;`".into()))?;
                let w = w.trim().parse::<f64>().map_err(|e| err(format!("bad weight: {e}")))?;
                (w, body)
            }
            None => (1.0, line),
        };
        let order = body
            .split_whitespace()
            .map(|tok| tok.parse::<usize>().map_err(|e| err(format!("bad index `{tok}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let vote = Ranking::new(order, ListKind::Partial, weight).map_err(|e| err(e.to_string()))?;
        votes.push((lineno + 1, vote));
    }
    let n = match declared {
        Some(n) => n,
        None => votes
            .iter()
            .flat_map(|(_, v)| v.order().iter().copied())
            .max()
            .map_or(0, |m| m + 1),
    };
    let votes = votes
        .into_iter()
        .map(|(line, v)| {
            Ranking::new(v.order().to_vec(), kind, v.weight())
                .map_err(|e| Error::Parse { line, msg: e.to_string() })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(n, votes, scheme)
}

pub fn read_votes(path: impl AsRef<Path>, kind: ListKind, scheme: WeightScheme) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_votes(&text, kind, scheme)
}

/// Serializes a dataset. Unit weights are written without a prefix.
pub fn format_votes(ds: &Dataset) -> String {
    let mut out = format!("# candidates: {}\n", ds.n());
    for vote in ds.votes() {
        if vote.weight() != 1.0 {
            let _ = write!(out, "w={};", vote.weight());
        }
        let line: Vec<String> = vote.order().iter().map(usize::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_votes(path: impl AsRef<Path>, ds: &Dataset) -> Result<()> {
    std::fs::write(path, format_votes(ds))?;
    Ok(())
}

impl std::str::FromStr for Dataset {
    type Err = Error;

    /// Parses complete, uniformly weighted votes.
    fn from_str(s: &str) -> Result<Self> {
        parse_votes(s, ListKind::Complete, WeightScheme::Uniform)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_weights_and_comments() {
        let text = "# a comment\n# candidates: 4\n0 1 2 3\n\nw=2.5; 3 2 1 0\n";
        let ds = parse_votes(text, ListKind::Complete, WeightScheme::Uniform).unwrap();
        assert_eq!(ds.n(), 4);
        assert_eq!(ds.votes().len(), 2);
        assert_eq!(ds.votes()[1].weight(), 2.5);
        assert_eq!(ds.votes()[1].order(), &[3, 2, 1, 0]);
    }

    #[test]
    fn infers_candidate_count() {
        let ds: Dataset = "2 0 1\n1 0 2\n".parse().unwrap();
        assert_eq!(ds.n(), 3);
    }

    #[test]
    fn partial_votes_respect_header() {
        let ds = parse_votes("# candidates: 5\n0 3\n4\n", ListKind::Ktop, WeightScheme::Uniform).unwrap();
        assert_eq!(ds.n(), 5);
        assert_eq!(ds.kind(), ListKind::Ktop);
    }

    #[test]
    fn reports_line_numbers() {
        let err = "0 1 2\n0 x 2\n".parse::<Dataset>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = "0 1 2\n0 1\n".parse::<Dataset>().unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)), "{err}");
        let err = "w=0; 0 1\n".parse::<Dataset>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn round_trips() {
        let text = "# candidates: 3\n0 1 2\nw=0.25;2 1 0\n";
        let ds: Dataset = text.parse().unwrap();
        let again: Dataset = format_votes(&ds).parse().unwrap();
        assert_eq!(ds, again);
    }
}
