//! Headline/lead download from a monthly news archive API.
//!
//! The expected response shape is
//! `{"response": {"docs": [{"_id", "headline": {"main"}, "lead_paragraph"}]}}`,
//! one request per month at `{endpoint}/{year}/{month}.json`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::client::{send_with_retry, RetryPolicy, Sleeper};
use crate::prompt::GenerationTask;
use crate::transport::{Auth, HttpRequest, Transport};
use crate::HarnessError;

pub const DEFAULT_ARCHIVE_ENDPOINT: &str = "https://api.nytimes.com/svc/archive/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    pub year: u16,
    pub month: u8,
}

impl YearMonth {
    fn next(self) -> YearMonth {
        if self.month == 12 {
            YearMonth { year: self.year + 1, month: 1 }
        } else {
            YearMonth { year: self.year, month: self.month + 1 }
        }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HarnessError::Usage(format!("bad month {s:?}, expected YYYY-MM"));
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        let year: u16 = y.parse().map_err(|_| bad())?;
        let month: u8 = m.parse().map_err(|_| bad())?;
        if !(1..=12).contains(&month) {
            return Err(bad());
        }
        Ok(YearMonth { year, month })
    }
}

/// `YYYY-MM` or an inclusive range `YYYY-MM..YYYY-MM`.
pub fn parse_months(spec: &str) -> Result<Vec<YearMonth>, HarnessError> {
    let (first, last) = match spec.split_once("..") {
        Some((a, b)) => (a.parse::<YearMonth>()?, b.parse::<YearMonth>()?),
        None => {
            let m = spec.parse::<YearMonth>()?;
            (m, m)
        }
    };
    if last < first {
        return Err(HarnessError::Usage(format!("empty month range {spec:?}")));
    }
    let mut months = vec![first];
    while *months.last().unwrap() < last {
        months.push(months.last().unwrap().next());
    }
    Ok(months)
}

/// A task together with the human-written lead it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchedArticle {
    pub source_id: String,
    pub headline: String,
    pub lead: String,
}

impl FetchedArticle {
    pub fn task(&self) -> GenerationTask {
        let words: Vec<&str> = self.lead.split_whitespace().take(3).collect();
        GenerationTask {
            headline: self.headline.clone(),
            lead_three_words: words.join(" "),
            source_id: self.source_id.clone(),
        }
    }
}

/// Keep documents that have a headline and a lead of at least three tokens.
pub fn parse_archive(body: &str) -> Result<Vec<FetchedArticle>, HarnessError> {
    let value: Value = serde_json::from_str(body)
        .map_err(|e| HarnessError::MalformedResponse(format!("invalid json: {e}")))?;
    let docs = value
        .pointer("/response/docs")
        .and_then(Value::as_array)
        .ok_or_else(|| HarnessError::MalformedResponse("missing response.docs".into()))?;
    let mut out = Vec::new();
    for doc in docs {
        let source_id = doc
            .get("_id")
            .or_else(|| doc.get("uri"))
            .and_then(Value::as_str)
            .unwrap_or_default();
        let headline = doc
            .pointer("/headline/main")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .trim();
        let lead = doc
            .get("lead_paragraph")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .trim();
        if source_id.is_empty() || headline.is_empty() || lead.split_whitespace().count() < 3 {
            continue;
        }
        out.push(FetchedArticle {
            source_id: source_id.to_string(),
            headline: headline.to_string(),
            lead: lead.to_string(),
        });
    }
    Ok(out)
}

pub fn fetch_headlines(
    transport: &dyn Transport,
    sleeper: &dyn Sleeper,
    policy: RetryPolicy,
    endpoint: &str,
    api_key: Option<&str>,
    months: &[YearMonth],
) -> Result<Vec<FetchedArticle>, HarnessError> {
    let mut articles = Vec::new();
    for month in months {
        let mut request = HttpRequest::get(format!(
            "{}/{}/{}.json",
            endpoint.trim_end_matches('/'),
            month.year,
            month.month
        ));
        request.auth = api_key.map(|key| Auth::Query {
            name: "api-key".into(),
            value: key.to_string(),
        });
        let response = send_with_retry(transport, sleeper, policy, &request)?;
        let fetched = parse_archive(&response.body)?;
        log::info!("{month}: {} usable articles", fetched.len());
        articles.extend(fetched);
    }
    Ok(articles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn month_ranges() {
        let months = parse_months("2023-11..2024-02").unwrap();
        let shown: Vec<String> = months.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["2023-11", "2023-12", "2024-01", "2024-02"]);
        assert_eq!(parse_months("2025-03").unwrap().len(), 1);
        assert!(parse_months("2025-13").is_err());
        assert!(parse_months("2025-03..2025-01").is_err());
    }

    #[test]
    fn three_token_lead_is_accepted_whole() {
        let body = r#"{"response":{"docs":[
            {"_id":"a","headline":{"main":"H"},"lead_paragraph":"Only three words"}
        ]}}"#;
        let got = parse_archive(body).unwrap();
        assert_eq!(got[0].task().lead_three_words, "Only three words");
    }

    #[test]
    fn missing_docs_is_malformed() {
        assert!(matches!(
            parse_archive(r#"{"status":"OK"}"#),
            Err(HarnessError::MalformedResponse(_))
        ));
    }
}
