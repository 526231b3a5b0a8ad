use chrono::{DateTime, SubsecRound, Utc};
use serde::{Deserialize, Serialize};

use super::cashtag::{extract_cashtags, normalize_ticker};
use crate::error::IngestError;

/// One microblog post.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TweetRecord {
    pub id: String,
    pub created_at: DateTime<Utc>,
    pub user_id: String,
    pub text: String,
    pub retweet_of: Option<String>,
    /// Distinct uppercase tickers in order of first occurrence.
    pub cashtags: Vec<String>,
}

impl TweetRecord {
    pub fn is_retweet(&self) -> bool {
        self.retweet_of.is_some()
    }

    /// Hours since the Unix epoch of the UTC wall-clock hour holding this post.
    pub fn hour(&self) -> i64 {
        self.created_at.timestamp().div_euclid(3600)
    }

    pub fn mentions(&self, ticker: &str) -> bool {
        self.cashtags.iter().any(|t| t == ticker)
    }

    /// Serialize as one JSON line of the tweet stream schema. The cashtag
    /// list is emitted only when `with_cashtags` is set.
    pub fn to_json_line(&self, with_cashtags: bool) -> String {
        let line = TweetLine {
            id: &self.id,
            created_at: format_timestamp(&self.created_at),
            user_id: &self.user_id,
            text: &self.text,
            retweet_of: self.retweet_of.as_deref(),
            cashtags: with_cashtags.then_some(&self.cashtags),
        };
        serde_json::to_string(&line).expect("tweet line serializes")
    }
}

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

#[derive(Serialize)]
struct TweetLine<'a> {
    id: &'a str,
    created_at: String,
    user_id: &'a str,
    text: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    retweet_of: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cashtags: Option<&'a Vec<String>>,
}

#[derive(Deserialize)]
struct RawTweet {
    id: Option<String>,
    created_at: Option<String>,
    user_id: Option<String>,
    text: Option<String>,
    #[serde(default)]
    retweet_of: Option<String>,
    #[serde(default)]
    cashtags: Option<Vec<String>>,
}

/// Parse one line of the JSON-lines tweet stream.
pub fn parse_tweet_record(line: &str) -> Result<TweetRecord, IngestError> {
    let malformed = |why: String| IngestError::MalformedRecord(why);
    let raw: RawTweet = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;

    let id = raw
        .id
        .filter(|s| !s.is_empty())
        .ok_or_else(|| malformed("missing id".into()))?;
    let created_at = raw
        .created_at
        .ok_or_else(|| malformed(format!("{id}: missing created_at")))?;
    let created_at = DateTime::parse_from_rfc3339(&created_at)
        .map_err(|e| malformed(format!("{id}: bad created_at `{created_at}`: {e}")))?
        .with_timezone(&Utc)
        .trunc_subsecs(0);
    let user_id = raw
        .user_id
        .ok_or_else(|| malformed(format!("{id}: missing user_id")))?;
    let text = raw
        .text
        .ok_or_else(|| malformed(format!("{id}: missing text")))?;

    let retweet_of = raw.retweet_of.filter(|s| !s.is_empty());
    if retweet_of.as_deref() == Some(id.as_str()) {
        return Err(malformed(format!("{id}: retweets itself")));
    }

    let cashtags = match raw.cashtags {
        None => extract_cashtags(&text),
        Some(list) => {
            let mut tags: Vec<String> = Vec::with_capacity(list.len());
            for raw_tag in &list {
                let tag = normalize_ticker(raw_tag)
                    .ok_or_else(|| malformed(format!("{id}: invalid cashtag `{raw_tag}`")))?;
                if !tags.contains(&tag) {
                    tags.push(tag);
                }
            }
            tags
        }
    };

    Ok(TweetRecord {
        id,
        created_at,
        user_id,
        text,
        retweet_of,
        cashtags,
    })
}
