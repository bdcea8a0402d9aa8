//! `clickstream v1` text format.
//!
//! ```text
//! # clickstream v1 duration_s=<float>
//! <timestamp_ns>\t<detector_id>[\t<outcome_label>]
//! ```

use std::fmt::Write;

use super::{ClickEvent, ClickStream, PhotonError, Result};

const HEADER: &str = "# clickstream v1 duration_s=";

pub fn write_clickstream(stream: &ClickStream) -> String {
    let mut out = String::with_capacity(16 * stream.events.len() + 64);
    let _ = writeln!(out, "{HEADER}{}", stream.duration_s);
    for (k, e) in stream.events.iter().enumerate() {
        let label = stream
            .labels
            .as_ref()
            .and_then(|l| l.get(k))
            .and_then(|l| l.as_deref());
        match label {
            Some(l) => {
                let _ = writeln!(out, "{}\t{}\t{}", e.timestamp_ns, e.detector, l);
            }
            None => {
                let _ = writeln!(out, "{}\t{}", e.timestamp_ns, e.detector);
            }
        }
    }
    out
}

/// Parses and validates a click file. Line numbers in errors are 1-based.
pub fn parse_clickstream(text: &str) -> Result<ClickStream> {
    let mut lines = text.lines().enumerate();
    let duration_s = match lines.next() {
        Some((_, header)) => parse_header(header.trim_end())?,
        None => {
            return Err(PhotonError::Format { line: 1, reason: "missing header".into() });
        }
    };
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(PhotonError::Format { line: 1, reason: format!("invalid duration {duration_s}") });
    }
    let limit = (duration_s * super::NS_PER_S).floor() as u64;
    let mut rows: Vec<(ClickEvent, Option<String>)> = Vec::new();
    let mut last: [Option<u64>; 256] = [None; 256];
    let mut any_label = false;
    for (idx, raw) in lines {
        let line = idx + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let mut fields = raw.split('\t');
        let ts = fields.next().unwrap_or_default();
        let det = fields
            .next()
            .ok_or_else(|| PhotonError::Format { line, reason: "expected <timestamp_ns>\\t<detector_id>".into() })?;
        let label = fields.next().map(str::to_owned);
        if fields.next().is_some() {
            return Err(PhotonError::Format { line, reason: "too many columns".into() });
        }
        let timestamp_ns: u64 = ts
            .parse()
            .map_err(|_| PhotonError::Format { line, reason: format!("bad timestamp {ts:?}") })?;
        let detector: u8 = det
            .parse()
            .map_err(|_| PhotonError::Format { line, reason: format!("bad detector id {det:?}") })?;
        if timestamp_ns > limit {
            return Err(PhotonError::Format { line, reason: format!("timestamp {timestamp_ns} ns beyond duration") });
        }
        if let Some(previous_ns) = last[detector as usize] {
            if timestamp_ns <= previous_ns {
                return Err(PhotonError::NonMonotone { line, detector, timestamp_ns, previous_ns });
            }
        }
        last[detector as usize] = Some(timestamp_ns);
        any_label |= label.is_some();
        rows.push((ClickEvent { timestamp_ns, detector }, label));
    }
    rows.sort_by_key(|(e, _)| *e);
    let labels = any_label.then(|| rows.iter().map(|(_, l)| l.clone()).collect());
    Ok(ClickStream {
        events: rows.into_iter().map(|(e, _)| e).collect(),
        duration_s,
        labels,
        ..ClickStream::empty(duration_s)
    })
}

fn parse_header(header: &str) -> Result<f64> {
    let value = header
        .strip_prefix(HEADER)
        .ok_or_else(|| PhotonError::Format { line: 1, reason: format!("expected header {HEADER:?}<float>") })?;
    value
        .trim()
        .parse()
        .map_err(|_| PhotonError::Format { line: 1, reason: format!("bad duration {value:?}") })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_keeps_duration() {
        let s = parse_clickstream("# clickstream v1 duration_s=12.5\n").unwrap();
        assert!(s.is_empty());
        assert_eq!(s.duration_s, 12.5);
    }

    #[test]
    fn decreasing_timestamp_names_line() {
        let text = "# clickstream v1 duration_s=1\n10\t0\n20\t1\n5\t0\n";
        match parse_clickstream(text) {
            Err(PhotonError::NonMonotone { line, detector, .. }) => {
                assert_eq!(line, 4);
                assert_eq!(detector, 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn format_errors() {
        assert!(matches!(parse_clickstream(""), Err(PhotonError::Format { line: 1, .. })));
        assert!(matches!(
            parse_clickstream("# clickstream v2 duration_s=1\n"),
            Err(PhotonError::Format { line: 1, .. })
        ));
        assert!(matches!(
            parse_clickstream("# clickstream v1 duration_s=1\n10 0\n"),
            Err(PhotonError::Format { line: 2, .. })
        ));
        assert!(matches!(
            parse_clickstream("# clickstream v1 duration_s=1\n2000000000\t0\n"),
            Err(PhotonError::Format { line: 2, .. })
        ));
    }

    #[test]
    fn optional_label_column() {
        let text = "# clickstream v1 duration_s=1\n10\t0\tH\n20\t1\n";
        let s = parse_clickstream(text).unwrap();
        assert_eq!(s.labels.as_ref().unwrap(), &vec![Some("H".to_string()), None]);
        assert_eq!(write_clickstream(&s), text);
    }
}
