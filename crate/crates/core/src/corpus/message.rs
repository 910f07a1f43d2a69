use std::io::BufRead;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageRecord {
    pub timestamp: DateTime<Utc>,
    pub sender: String,
    pub receiver: String,
    pub text: String,
}

/// Wire format of one JSON Lines record.
#[derive(Debug, Serialize, Deserialize)]
struct RawMessage {
    ts: String,
    from: String,
    to: String,
    text: String,
}

impl MessageRecord {
    pub fn to_json_line(&self) -> String {
        let raw = RawMessage {
            ts: self.timestamp.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            from: self.sender.clone(),
            to: self.receiver.clone(),
            text: self.text.clone(),
        };
        serde_json::to_string(&raw).expect("string fields always serialise")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct ParsedMessages {
    pub records: Vec<MessageRecord>,
    pub errors: Vec<LineError>,
}

fn parse_line(line: &str) -> std::result::Result<MessageRecord, String> {
    let raw: RawMessage = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let timestamp = DateTime::parse_from_rfc3339(&raw.ts)
        .map_err(|e| format!("bad timestamp `{}`: {e}", raw.ts))?
        .with_timezone(&Utc);
    Ok(MessageRecord {
        timestamp,
        sender: raw.from,
        receiver: raw.to,
        text: raw.text,
    })
}

/// Reads JSON Lines messages (`ts`, `from`, `to`, `text`).
///
/// Malformed lines are skipped and reported with their 1-based line number;
/// with `strict` the first one is fatal. Blank lines are ignored.
pub fn parse_messages<R: BufRead>(reader: R, strict: bool) -> Result<ParsedMessages> {
    let mut out = ParsedMessages::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<messages>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(&line) {
            Ok(rec) => out.records.push(rec),
            Err(message) if strict => return Err(Error::Malformed { line: i + 1, message }),
            Err(message) => out.errors.push(LineError { line: i + 1, message }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;

    #[test]
    fn single_record() {
        let line = r#"{"ts":"2007-01-03T09:31:22Z","from":"a1","to":"b2","text":"oil is ugly"}"#;
        let parsed = parse_messages(line.as_bytes(), true).unwrap();
        assert_eq!(parsed.records.len(), 1);
        assert!(parsed.errors.is_empty());
        let rec = &parsed.records[0];
        assert_eq!(rec.sender, "a1");
        assert_eq!(tokenize(&rec.text).len(), 3);
        assert_eq!(
            parse_messages(rec.to_json_line().as_bytes(), true).unwrap().records[0],
            *rec
        );
    }

    #[test]
    fn empty_stream() {
        let parsed = parse_messages("".as_bytes(), true).unwrap();
        assert!(parsed.records.is_empty() && parsed.errors.is_empty());
    }

    #[test]
    fn missing_text_lenient_and_strict() {
        let input = "{\"ts\":\"2007-01-03T09:31:22Z\",\"from\":\"a\",\"to\":\"b\"}\n\
                     {\"ts\":\"2007-01-03T09:31:22Z\",\"from\":\"a\",\"to\":\"b\",\"text\":\"hi\"}\n";
        let parsed = parse_messages(input.as_bytes(), false).unwrap();
        assert_eq!(parsed.records.len(), 1);
        assert_eq!(parsed.errors.len(), 1);
        assert_eq!(parsed.errors[0].line, 1);
        assert!(matches!(
            parse_messages(input.as_bytes(), true),
            Err(Error::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn bad_timestamp_reported() {
        let input = r#"{"ts":"yesterday","from":"a","to":"b","text":"x"}"#;
        let parsed = parse_messages(input.as_bytes(), false).unwrap();
        assert!(parsed.errors[0].message.contains("timestamp"));
    }
}
