use chrono::{DateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::error::SynthError;
use crate::ingest::Market;

/// Company population of one market.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSpec {
    pub market: Market,
    pub companies: usize,
    /// Median of the log-normal capitalization distribution.
    pub median_cap: f64,
    /// Standard deviation of the log-capitalization (natural log).
    pub cap_sigma: f64,
}

/// Explicitly placed campaign. Tickers refer to generated company names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    #[serde(default)]
    pub id: Option<String>,
    pub carriers: Vec<String>,
    pub targets: Vec<String>,
    pub bots: usize,
    pub tweets_per_bot: usize,
    /// Offsets from the stream start, in hours.
    pub burst_hours: Vec<usize>,
    #[serde(default)]
    pub retweet_prob: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub horizon_hours: usize,
    pub start: DateTime<Utc>,
    pub human_users: usize,

    /// Per-stock background rate in tweets per hour:
    /// `floor + scale * (cap / cap_reference)^exponent * exp(eta)`, with
    /// `eta ~ N(0, popularity_sigma)`.
    pub rate_floor: f64,
    pub rate_scale: f64,
    pub cap_reference: f64,
    pub mention_exponent: f64,
    pub popularity_sigma: f64,

    pub retweet_prob: f64,
    /// Recent originals per stock that retweets may copy.
    pub retweet_memory: usize,
    /// Relative weight of tweets with 1, 2, ... cashtags.
    pub cashtag_count_weights: Vec<f64>,
    pub same_sector_prob: f64,
    pub same_market_prob: f64,
    /// Companions of unlisted stocks are listed stocks weighted by
    /// `cap^piggyback_exponent` rather than by background rate.
    pub piggyback_exponent: f64,

    pub diurnal_start_hour: u32,
    pub diurnal_window_hours: u32,
    /// Share of background volume inside the diurnal window.
    pub diurnal_share: f64,

    /// Expected news bursts per stock over the horizon.
    pub news_bursts_per_stock: f64,
    pub news_volume_min: usize,
    pub news_volume_max: usize,

    /// Children per node from economic sector (level 5) down to activity.
    pub trbc_branching: [usize; 5],

    pub random_campaigns: usize,
    /// Carriers are drawn from this many highest-capitalization listed stocks.
    pub carrier_pool: usize,
    /// Targets are drawn from this lowest-capitalization fraction of OTCMKTS.
    pub target_quantile: f64,
    pub carriers_min: usize,
    pub carriers_max: usize,
    pub targets_min: usize,
    pub targets_max: usize,
    pub bots_min: usize,
    pub bots_max: usize,
    pub tweets_per_bot_min: usize,
    pub tweets_per_bot_max: usize,
    pub campaign_retweet_prob: f64,
    /// Let campaigns share bot accounts.
    pub bot_reuse: bool,

    pub markets: Vec<MarketSpec>,
    pub campaigns: Vec<CampaignSpec>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        let market = |market, median_cap, cap_sigma| MarketSpec {
            market,
            companies: 50,
            median_cap,
            cap_sigma,
        };
        SynthConfig {
            horizon_hours: 2160,
            start: DateTime::parse_from_rfc3339("2017-05-01T00:00:00Z")
                .expect("valid literal")
                .with_timezone(&Utc),
            human_users: 20_000,
            rate_floor: 0.2,
            rate_scale: 0.3,
            cap_reference: 1e9,
            mention_exponent: 0.5,
            popularity_sigma: 1.0,
            retweet_prob: 0.23,
            retweet_memory: 16,
            cashtag_count_weights: vec![0.4, 0.3, 0.2, 0.1],
            same_sector_prob: 0.7,
            same_market_prob: 0.8,
            piggyback_exponent: 0.75,
            diurnal_start_hour: 14,
            diurnal_window_hours: 7,
            diurnal_share: 0.6,
            news_bursts_per_stock: 0.5,
            news_volume_min: 30,
            news_volume_max: 150,
            trbc_branching: [10, 2, 2, 2, 2],
            random_campaigns: 20,
            carrier_pool: 4,
            target_quantile: 0.5,
            carriers_min: 1,
            carriers_max: 2,
            targets_min: 3,
            targets_max: 8,
            bots_min: 180,
            bots_max: 220,
            tweets_per_bot_min: 3,
            tweets_per_bot_max: 3,
            campaign_retweet_prob: 0.8,
            bot_reuse: false,
            markets: vec![
                market(Market::Nasdaq, 365_780_000.0, 1.5),
                market(Market::Nyse, 1_810_000_000.0, 1.5),
                market(Market::Nysearca, 245_375_000.0, 1.5),
                market(Market::Nysemkt, 78_705_000.0, 1.5),
                market(Market::Otcmkts, 31_480_000.0, 2.3),
            ],
            campaigns: Vec::new(),
        }
    }
}

fn probability(path: &str, p: f64) -> Result<(), SynthError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(SynthError::invalid(
            path,
            format!("probability {p} outside [0, 1]"),
        ))
    }
}

fn positive(path: &str, v: f64) -> Result<(), SynthError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SynthError::invalid(
            path,
            format!("must be positive, got {v}"),
        ))
    }
}

fn range(path: &str, lo: usize, hi: usize, min: usize) -> Result<(), SynthError> {
    if lo < min {
        return Err(SynthError::invalid(
            format!("{path}_min"),
            format!("must be at least {min}"),
        ));
    }
    if lo > hi {
        return Err(SynthError::invalid(
            format!("{path}_max"),
            format!("{hi} is below the minimum {lo}"),
        ));
    }
    Ok(())
}

impl SynthConfig {
    pub fn from_toml(text: &str) -> Result<Self, SynthError> {
        let config: SynthConfig = toml::from_str(text).map_err(|e| {
            let path = e
                .span()
                .map(|s| format!("byte {}..{}", s.start, s.end))
                .unwrap_or_default();
            SynthError::invalid(path, e.message().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.horizon_hours < 24 {
            return Err(SynthError::invalid("horizon_hours", "must be at least 24"));
        }
        if self.start.minute() != 0 || self.start.second() != 0 || self.start.nanosecond() != 0 {
            return Err(SynthError::invalid("start", "must fall on a whole hour"));
        }
        if self.human_users == 0 {
            return Err(SynthError::invalid("human_users", "must be positive"));
        }
        positive("rate_floor", self.rate_floor)?;
        if !(self.rate_scale.is_finite() && self.rate_scale >= 0.0) {
            return Err(SynthError::invalid("rate_scale", "must be non-negative"));
        }
        positive("cap_reference", self.cap_reference)?;
        if !self.mention_exponent.is_finite() {
            return Err(SynthError::invalid("mention_exponent", "must be finite"));
        }
        if !self.piggyback_exponent.is_finite() {
            return Err(SynthError::invalid("piggyback_exponent", "must be finite"));
        }
        if !(self.popularity_sigma.is_finite() && self.popularity_sigma >= 0.0) {
            return Err(SynthError::invalid(
                "popularity_sigma",
                "must be non-negative",
            ));
        }
        probability("retweet_prob", self.retweet_prob)?;
        probability("same_sector_prob", self.same_sector_prob)?;
        probability("same_market_prob", self.same_market_prob)?;
        probability("diurnal_share", self.diurnal_share)?;
        probability("campaign_retweet_prob", self.campaign_retweet_prob)?;
        if self.retweet_memory == 0 {
            return Err(SynthError::invalid("retweet_memory", "must be positive"));
        }
        let w = &self.cashtag_count_weights;
        if w.is_empty()
            || w.iter().any(|v| !v.is_finite() || *v < 0.0)
            || w.iter().sum::<f64>() <= 0.0
        {
            return Err(SynthError::invalid(
                "cashtag_count_weights",
                "need non-negative weights with a positive sum",
            ));
        }
        if self.diurnal_start_hour > 23 {
            return Err(SynthError::invalid(
                "diurnal_start_hour",
                "must be in 0..=23",
            ));
        }
        if !(1..24).contains(&self.diurnal_window_hours) {
            return Err(SynthError::invalid(
                "diurnal_window_hours",
                "must be in 1..=23",
            ));
        }
        if !(self.news_bursts_per_stock.is_finite() && self.news_bursts_per_stock >= 0.0) {
            return Err(SynthError::invalid(
                "news_bursts_per_stock",
                "must be non-negative",
            ));
        }
        range("news_volume", self.news_volume_min, self.news_volume_max, 1)?;
        if self.trbc_branching.contains(&0) {
            return Err(SynthError::invalid(
                "trbc_branching",
                "every level needs at least one class",
            ));
        }
        if self.carrier_pool == 0 && self.random_campaigns > 0 {
            return Err(SynthError::invalid("carrier_pool", "must be positive"));
        }
        if !(self.target_quantile > 0.0 && self.target_quantile <= 1.0) {
            return Err(SynthError::invalid("target_quantile", "must be in (0, 1]"));
        }
        range("carriers", self.carriers_min, self.carriers_max, 0)?;
        range("targets", self.targets_min, self.targets_max, 1)?;
        range("bots", self.bots_min, self.bots_max, 1)?;
        range(
            "tweets_per_bot",
            self.tweets_per_bot_min,
            self.tweets_per_bot_max,
            1,
        )?;
        if self.markets.is_empty() {
            return Err(SynthError::invalid("markets", "need at least one market"));
        }
        for (i, m) in self.markets.iter().enumerate() {
            if m.companies == 0 || m.companies > 26usize.pow(3) {
                return Err(SynthError::invalid(
                    format!("markets[{i}].companies"),
                    "must be in 1..=17576",
                ));
            }
            positive(&format!("markets[{i}].median_cap"), m.median_cap)?;
            if !(m.cap_sigma.is_finite() && m.cap_sigma >= 0.0) {
                return Err(SynthError::invalid(
                    format!("markets[{i}].cap_sigma"),
                    "must be non-negative",
                ));
            }
            if self.markets[..i].iter().any(|o| o.market == m.market) {
                return Err(SynthError::invalid(
                    format!("markets[{i}].market"),
                    "listed twice",
                ));
            }
        }
        let explicit_hours: usize = self.campaigns.iter().map(|c| c.burst_hours.len()).sum();
        if self.random_campaigns + explicit_hours > self.horizon_hours {
            return Err(SynthError::invalid(
                "random_campaigns",
                "more bursts than hours in the horizon",
            ));
        }
        for (i, c) in self.campaigns.iter().enumerate() {
            let path = |f: &str| format!("campaigns[{i}].{f}");
            if c.targets.is_empty() {
                return Err(SynthError::invalid(path("targets"), "must not be empty"));
            }
            if c.bots == 0 {
                return Err(SynthError::invalid(path("bots"), "must be positive"));
            }
            if c.tweets_per_bot == 0 {
                return Err(SynthError::invalid(
                    path("tweets_per_bot"),
                    "must be positive",
                ));
            }
            if c.burst_hours.is_empty() {
                return Err(SynthError::invalid(
                    path("burst_hours"),
                    "must not be empty",
                ));
            }
            if let Some(&h) = c.burst_hours.iter().find(|&&h| h >= self.horizon_hours) {
                return Err(SynthError::invalid(
                    path("burst_hours"),
                    format!("hour {h} beyond the horizon"),
                ));
            }
            if let Some(p) = c.retweet_prob {
                probability(&path("retweet_prob"), p)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SynthConfig::default().validate().unwrap();
        assert_eq!(SynthConfig::from_toml("").unwrap(), SynthConfig::default());
    }

    #[test]
    fn errors_carry_field_paths() {
        let err = |text: &str| match SynthConfig::from_toml(text).unwrap_err() {
            SynthError::ConfigInvalid { path, .. } => path,
            e => panic!("{e}"),
        };
        assert_eq!(err("retweet_prob = 1.5"), "retweet_prob");
        assert_eq!(err("horizon_hours = 10"), "horizon_hours");
        assert_eq!(err("bots_min = 5\nbots_max = 4"), "bots_max");
        assert_eq!(
            err("[[campaigns]]\ncarriers = []\ntargets = []\nbots = 1\ntweets_per_bot = 1\nburst_hours = [1]"),
            "campaigns[0].targets"
        );
        assert!(SynthConfig::from_toml("no_such_key = 1").is_err());
    }
}
