use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

/// Origin of one emitted tweet; serialized as `background` or
/// `campaign:<id>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum TweetLabel {
    Background,
    Campaign(String),
}

/// Serialized as `human` or `bot:<id>[+<id>...]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum UserLabel {
    Human,
    Bot(Vec<String>),
}

impl fmt::Display for TweetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TweetLabel::Background => f.write_str("background"),
            TweetLabel::Campaign(id) => write!(f, "campaign:{id}"),
        }
    }
}

impl FromStr for TweetLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "background" => Ok(TweetLabel::Background),
            Some(("campaign", id)) if !id.is_empty() => Ok(TweetLabel::Campaign(id.to_string())),
            _ => Err(format!("bad tweet label `{s}`")),
        }
    }
}

impl From<TweetLabel> for String {
    fn from(l: TweetLabel) -> String {
        l.to_string()
    }
}

impl TryFrom<String> for TweetLabel {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl fmt::Display for UserLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UserLabel::Human => f.write_str("human"),
            UserLabel::Bot(ids) => write!(f, "bot:{}", ids.join("+")),
        }
    }
}

impl FromStr for UserLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "human" => Ok(UserLabel::Human),
            Some(("bot", ids)) if !ids.is_empty() => {
                Ok(UserLabel::Bot(ids.split('+').map(String::from).collect()))
            }
            _ => Err(format!("bad user label `{s}`")),
        }
    }
}

impl From<UserLabel> for String {
    fn from(l: UserLabel) -> String {
        l.to_string()
    }
}

impl TryFrom<String> for UserLabel {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExpectedPeak {
    pub ticker: String,
    pub hour_utc: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignTruth {
    pub id: String,
    pub carriers: Vec<String>,
    pub targets: Vec<String>,
    pub bots: usize,
    pub tweets_per_bot: usize,
    /// Tweets emitted in each burst hour.
    pub volume_per_burst: usize,
    pub burst_hours_utc: Vec<DateTime<Utc>>,
    pub expected_peaks: Vec<ExpectedPeak>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub rng: String,
    /// Same fingerprint the ingest summary reports for this stream.
    pub ids_digest: String,
    pub tweet_labels: BTreeMap<String, TweetLabel>,
    pub user_labels: BTreeMap<String, UserLabel>,
    pub campaigns: Vec<CampaignTruth>,
}

impl GroundTruth {
    pub fn expected_peaks(&self) -> impl Iterator<Item = &ExpectedPeak> {
        self.campaigns.iter().flat_map(|c| &c.expected_peaks)
    }

    pub fn campaign_tickers(&self) -> impl Iterator<Item = &str> {
        self.campaigns
            .iter()
            .flat_map(|c| c.carriers.iter().chain(&c.targets))
            .map(String::as_str)
    }

    pub fn target_tickers(&self) -> impl Iterator<Item = &str> {
        self.campaigns
            .iter()
            .flat_map(|c| &c.targets)
            .map(String::as_str)
    }
}
