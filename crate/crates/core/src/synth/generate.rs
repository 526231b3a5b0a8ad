use std::collections::{BTreeMap, BTreeSet, VecDeque};

use chrono::{DateTime, Duration, Utc};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{LogNormal, Normal, Poisson};

use super::config::SynthConfig;
use super::truth::{CampaignTruth, ExpectedPeak, GroundTruth, TweetLabel, UserLabel};
use crate::error::SynthError;
use crate::ingest::{stream_digest, CompanyRecord, Market, TrbcPath, TweetRecord};

pub const SYNTH_RNG: &str = "ChaCha8Rng/seed_from_u64/stream-per-phase";

const ORIGINAL_TEMPLATES: [&str; 6] = [
    "{} looking strong today",
    "Watching {} closely this week",
    "{} breakout incoming?",
    "Earnings chatter on {}",
    "Added {} to my watchlist",
    "Anyone holding {} here",
];

const CAMPAIGN_TEMPLATES: [&str; 3] = [
    "{} huge move coming, get in now",
    "{} next big runner, do not miss it",
    "{} about to explode, load up",
];

/// Everything one generator run emits.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub companies: Vec<CompanyRecord>,
    /// Time-ordered stream.
    pub tweets: Vec<TweetRecord>,
    pub truth: GroundTruth,
}

impl SynthOutput {
    pub fn tweets_jsonl(&self) -> String {
        let mut out = String::new();
        for t in &self.tweets {
            out.push_str(&t.to_json_line(false));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Background,
    Campaign(usize),
}

struct Event {
    second: i64,
    seq: u64,
    user: String,
    companies: Vec<usize>,
    text: String,
    retweet_of: Option<usize>,
    source: Source,
}

struct Company {
    record: CompanyRecord,
    sector: usize,
    rate: f64,
}

/// Weighted sampler over a fixed subset of companies.
struct Pool {
    members: Vec<usize>,
    weights: Option<WeightedIndex<f64>>,
}

impl Pool {
    fn new(members: Vec<usize>, weight: impl Fn(usize) -> f64) -> Pool {
        let weights = (!members.is_empty())
            .then(|| WeightedIndex::new(members.iter().map(|&i| weight(i))).ok())
            .flatten();
        Pool { members, weights }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Option<usize> {
        self.weights.as_ref().map(|w| self.members[w.sample(rng)])
    }
}

type PoolKey = (Option<Market>, Option<usize>);

/// Companion sampling pools, keyed by optional market and sector filters.
/// `piggyback` pools serve unlisted primaries and weight by capitalization.
struct Pools {
    pools: BTreeMap<PoolKey, Pool>,
    piggyback: BTreeMap<PoolKey, Pool>,
}

impl Pools {
    fn new(companies: &[Company], piggyback_exponent: f64) -> Pools {
        let listed: Vec<usize> = (0..companies.len())
            .filter(|&i| companies[i].record.market.is_listed())
            .collect();
        let mut keys: BTreeMap<(Option<Market>, Option<usize>), Vec<usize>> = BTreeMap::new();
        for &i in &listed {
            let (m, s) = (companies[i].record.market, companies[i].sector);
            for key in [
                (None, None),
                (Some(m), None),
                (None, Some(s)),
                (Some(m), Some(s)),
            ] {
                keys.entry(key).or_default().push(i);
            }
        }
        let by_cap = |i: usize| companies[i].record.capitalization.powf(piggyback_exponent);
        Pools {
            pools: keys
                .iter()
                .map(|(k, v)| (*k, Pool::new(v.clone(), |i| companies[i].rate)))
                .collect(),
            piggyback: keys
                .into_iter()
                .filter(|(k, _)| k.0.is_none())
                .map(|(k, v)| (k, Pool::new(v, by_cap)))
                .collect(),
        }
    }

    fn draw_excluding(
        &self,
        piggyback: bool,
        key: PoolKey,
        taken: &[usize],
        rng: &mut ChaCha8Rng,
    ) -> Option<usize> {
        let pool = if piggyback {
            &self.piggyback
        } else {
            &self.pools
        }
        .get(&key)?;
        if pool.members.iter().all(|m| taken.contains(m)) {
            return None;
        }
        (0..32).find_map(|_| pool.draw(rng).filter(|c| !taken.contains(c)))
    }
}

struct Generator<'a> {
    config: &'a SynthConfig,
    companies: Vec<Company>,
    pools: Pools,
    cashtag_counts: WeightedIndex<f64>,
    events: Vec<Event>,
    seq: u64,
}

fn rng_for(seed: u64, phase: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(phase);
    rng
}

fn base26(mut i: usize) -> String {
    let mut out = [b'A'; 3];
    for slot in out.iter_mut().rev() {
        *slot = b'A' + (i % 26) as u8;
        i /= 26;
    }
    String::from_utf8(out.to_vec()).expect("ascii")
}

fn ticker_prefix(market: Market) -> char {
    match market {
        Market::Nasdaq => 'Q',
        Market::Nyse => 'N',
        Market::Nysearca => 'A',
        Market::Nysemkt => 'M',
        Market::Otcmkts => 'O',
        Market::Others => 'X',
    }
}

/// Deterministic ticker of the `index`-th generated company of `market`.
pub fn synthetic_ticker(market: Market, index: usize) -> String {
    format!("{}{}", ticker_prefix(market), base26(index))
}

fn trbc_path(branching: &[usize; 5], rng: &mut ChaCha8Rng) -> (TrbcPath, usize) {
    let sector = rng.random_range(0..branching[0]);
    let l5 = format!("S{sector:02}");
    let l4 = format!("{l5}-B{}", rng.random_range(0..branching[1]));
    let l3 = format!("{l4}-G{}", rng.random_range(0..branching[2]));
    let l2 = format!("{l3}-I{}", rng.random_range(0..branching[3]));
    let l1 = format!("{l2}-A{}", rng.random_range(0..branching[4]));
    (TrbcPath([l1, l2, l3, l4, l5]), sector)
}

fn build_companies(config: &SynthConfig, seed: u64) -> Vec<Company> {
    let mut rng = rng_for(seed, 1);
    let price = LogNormal::new(20f64.ln(), 1.0).expect("valid");
    let popularity = Normal::new(0.0, config.popularity_sigma).expect("valid");
    let mut companies = Vec::new();
    for spec in &config.markets {
        let caps = LogNormal::new(spec.median_cap.ln(), spec.cap_sigma).expect("validated");
        for i in 0..spec.companies {
            let target_cap: f64 = caps.sample(&mut rng);
            let cents = (price.sample(&mut rng) * 100.0).round().max(1.0);
            let share_price = cents / 100.0;
            let shares = (target_cap / share_price).round().max(1.0) as u64;
            let (trbc, sector) = trbc_path(&config.trbc_branching, &mut rng);
            let record = CompanyRecord::new(
                synthetic_ticker(spec.market, i),
                spec.market,
                Some(share_price),
                Some(shares),
                None,
                trbc,
            )
            .expect("price and shares given");
            let eta: f64 = popularity.sample(&mut rng);
            let rate = config.rate_floor
                + config.rate_scale
                    * (record.capitalization / config.cap_reference).powf(config.mention_exponent)
                    * eta.exp();
            companies.push(Company {
                record,
                sector,
                rate,
            });
        }
    }
    companies
}

impl Generator<'_> {
    fn next_seq(&mut self) -> u64 {
        self.seq += 1;
        self.seq
    }

    /// Primary plus companions drawn by the market and sector rules.
    fn draw_cashtags(&self, primary: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let n = self.cashtag_counts.sample(rng) + 1;
        let mut tags = vec![primary];
        let p = &self.companies[primary];
        while tags.len() < n {
            let same_sector = rng.random_bool(self.config.same_sector_prob);
            let same_market =
                p.record.market.is_listed() && rng.random_bool(self.config.same_market_prob);
            let market = same_market.then_some(p.record.market);
            let sector = same_sector.then_some(p.sector);
            let pick = [
                (market, sector),
                (market, None),
                (None, sector),
                (None, None),
            ]
            .into_iter()
            .find_map(|key| {
                self.pools
                    .draw_excluding(!p.record.market.is_listed(), key, &tags, rng)
            });
            match pick {
                Some(c) => tags.push(c),
                None => break,
            }
        }
        tags
    }

    fn text_for(&self, companies: &[usize], templates: &[&str], rng: &mut ChaCha8Rng) -> String {
        let tags: Vec<String> = companies
            .iter()
            .map(|&c| format!("${}", self.companies[c].record.ticker))
            .collect();
        let template = templates[rng.random_range(0..templates.len())];
        template.replacen("{}", &tags.join(" "), 1)
    }

    fn human(&self, rng: &mut ChaCha8Rng) -> String {
        format!("u{:06}", rng.random_range(0..self.config.human_users))
    }

    fn retweet(&mut self, original: usize, user: String, second: i64, source: Source) {
        let orig = &self.events[original];
        let text = format!("RT @{}: {}", orig.user, orig.text);
        let companies = orig.companies.clone();
        let seq = self.next_seq();
        self.events.push(Event {
            second,
            seq,
            user,
            companies,
            text,
            retweet_of: Some(original),
            source,
        });
    }

    fn original(
        &mut self,
        companies: Vec<usize>,
        text: String,
        user: String,
        second: i64,
        source: Source,
    ) -> usize {
        let seq = self.next_seq();
        self.events.push(Event {
            second,
            seq,
            user,
            companies,
            text,
            retweet_of: None,
            source,
        });
        self.events.len() - 1
    }

    fn hour_weight(&self, hour_of_day: u32) -> f64 {
        let c = self.config;
        let start = c.diurnal_start_hour;
        let in_window = (hour_of_day + 24 - start) % 24 < c.diurnal_window_hours;
        if in_window {
            c.diurnal_share * 24.0 / c.diurnal_window_hours as f64
        } else {
            (1.0 - c.diurnal_share) * 24.0 / (24 - c.diurnal_window_hours) as f64
        }
    }

    fn background(&mut self, seed: u64) {
        let mut rng = rng_for(seed, 2);
        let rates: Vec<f64> = self.companies.iter().map(|c| c.rate).collect();
        let total: f64 = rates.iter().sum();
        let primaries = WeightedIndex::new(&rates).expect("positive rates");
        let mut recent: Vec<VecDeque<usize>> = vec![VecDeque::new(); self.companies.len()];
        let start_hod = (self.config.start.timestamp().div_euclid(3600) % 24) as u32;
        for h in 0..self.config.horizon_hours {
            let hod = (start_hod + h as u32) % 24;
            let lambda = total * self.hour_weight(hod);
            let n = Poisson::new(lambda).expect("positive").sample(&mut rng) as usize;
            let mut seconds: Vec<i64> = (0..n)
                .map(|_| h as i64 * 3600 + rng.random_range(0..3600))
                .collect();
            seconds.sort_unstable();
            for second in seconds {
                let primary = primaries.sample(&mut rng);
                let user = self.human(&mut rng);
                let memory = &recent[primary];
                if !memory.is_empty() && rng.random_bool(self.config.retweet_prob) {
                    let original = memory[rng.random_range(0..memory.len())];
                    self.retweet(original, user, second, Source::Background);
                } else {
                    let tags = self.draw_cashtags(primary, &mut rng);
                    let text = self.text_for(&tags, &ORIGINAL_TEMPLATES, &mut rng);
                    let idx = self.original(tags, text, user, second, Source::Background);
                    let memory = &mut recent[primary];
                    if memory.len() == self.config.retweet_memory {
                        memory.pop_front();
                    }
                    memory.push_back(idx);
                }
            }
        }
    }

    fn news(&mut self, seed: u64) {
        let mut rng = rng_for(seed, 3);
        if self.config.news_bursts_per_stock <= 0.0 {
            return;
        }
        let bursts = Poisson::new(self.config.news_bursts_per_stock).expect("positive");
        for stock in 0..self.companies.len() {
            let count = bursts.sample(&mut rng) as usize;
            for _ in 0..count {
                let hour = rng.random_range(0..self.config.horizon_hours) as i64;
                let volume =
                    rng.random_range(self.config.news_volume_min..=self.config.news_volume_max);
                let mut seconds: Vec<i64> = (0..volume)
                    .map(|_| hour * 3600 + rng.random_range(0..3600))
                    .collect();
                seconds.sort_unstable();
                let mut originals: Vec<usize> = Vec::new();
                for second in seconds {
                    let user = self.human(&mut rng);
                    if !originals.is_empty() && rng.random_bool(self.config.retweet_prob) {
                        let o = originals[rng.random_range(0..originals.len())];
                        self.retweet(o, user, second, Source::Background);
                    } else {
                        let tags = self.draw_cashtags(stock, &mut rng);
                        let text = self.text_for(&tags, &ORIGINAL_TEMPLATES, &mut rng);
                        originals.push(self.original(tags, text, user, second, Source::Background));
                    }
                }
            }
        }
    }

    fn campaign_burst(
        &mut self,
        campaign: usize,
        plan: &PlannedCampaign,
        bots: &[String],
        hour: usize,
        rng: &mut ChaCha8Rng,
    ) {
        let companies: Vec<usize> = plan.carriers.iter().chain(&plan.targets).copied().collect();
        let mut authors: Vec<&String> = bots
            .iter()
            .flat_map(|b| std::iter::repeat_n(b, plan.tweets_per_bot))
            .collect();
        authors.shuffle(rng);
        let mut seconds: Vec<i64> = (0..authors.len())
            .map(|_| hour as i64 * 3600 + rng.random_range(0..3600))
            .collect();
        seconds.sort_unstable();
        let mut originals: Vec<usize> = Vec::new();
        for (user, second) in authors.into_iter().zip(seconds) {
            let source = Source::Campaign(campaign);
            if !originals.is_empty() && rng.random_bool(plan.retweet_prob) {
                let o = originals[rng.random_range(0..originals.len())];
                self.retweet(o, user.clone(), second, source);
            } else {
                let mut tags = companies.to_vec();
                tags.shuffle(rng);
                let text = self.text_for(&tags, &CAMPAIGN_TEMPLATES, rng);
                originals.push(self.original(tags, text, user.clone(), second, source));
            }
        }
    }
}

/// Least-used members first, ties broken by a seeded shuffle.
fn balanced_pick(
    pool: &[usize],
    usage: &mut BTreeMap<usize, usize>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let mut order = pool.to_vec();
    order.shuffle(rng);
    order.sort_by_key(|i| usage.get(i).copied().unwrap_or(0));
    let picked: Vec<usize> = order.into_iter().take(n).collect();
    for &i in &picked {
        *usage.entry(i).or_default() += 1;
    }
    picked
}

struct PlannedCampaign {
    id: String,
    carriers: Vec<usize>,
    targets: Vec<usize>,
    bots: usize,
    tweets_per_bot: usize,
    burst_hours: Vec<usize>,
    retweet_prob: f64,
}

fn resolve(
    index: usize,
    field: &str,
    names: &[String],
    by_ticker: &BTreeMap<&str, usize>,
) -> Result<Vec<usize>, SynthError> {
    names
        .iter()
        .map(|t| {
            by_ticker
                .get(t.to_ascii_uppercase().as_str())
                .copied()
                .ok_or_else(|| {
                    SynthError::invalid(
                        format!("campaigns[{index}].{field}"),
                        format!("unknown ticker {t}"),
                    )
                })
        })
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| {
            let unique: BTreeSet<usize> = v.iter().copied().collect();
            if unique.len() != v.len() {
                Err(SynthError::invalid(
                    format!("campaigns[{index}].{field}"),
                    "duplicate ticker",
                ))
            } else {
                Ok(v)
            }
        })
}

fn plan_campaigns(
    config: &SynthConfig,
    companies: &[Company],
    seed: u64,
) -> Result<Vec<PlannedCampaign>, SynthError> {
    let mut rng = rng_for(seed, 4);
    let by_ticker: BTreeMap<&str, usize> = companies
        .iter()
        .enumerate()
        .map(|(i, c)| (c.record.ticker.as_str(), i))
        .collect();
    let mut planned = Vec::new();
    let mut used_hours = BTreeSet::new();
    for (i, spec) in config.campaigns.iter().enumerate() {
        let carriers = resolve(i, "carriers", &spec.carriers, &by_ticker)?;
        let targets = resolve(i, "targets", &spec.targets, &by_ticker)?;
        if carriers.iter().any(|c| targets.contains(c)) {
            return Err(SynthError::invalid(
                format!("campaigns[{i}].targets"),
                "ticker is also a carrier",
            ));
        }
        for &h in &spec.burst_hours {
            if !used_hours.insert(h) {
                return Err(SynthError::invalid(
                    format!("campaigns[{i}].burst_hours"),
                    format!("hour {h} already holds a burst"),
                ));
            }
        }
        planned.push(PlannedCampaign {
            id: spec.id.clone().unwrap_or_else(|| format!("c{:02}", i + 1)),
            carriers,
            targets,
            bots: spec.bots,
            tweets_per_bot: spec.tweets_per_bot,
            burst_hours: spec.burst_hours.clone(),
            retweet_prob: spec.retweet_prob.unwrap_or(config.campaign_retweet_prob),
        });
    }
    if config.random_campaigns == 0 {
        return Ok(planned);
    }

    let mut listed: Vec<usize> = (0..companies.len())
        .filter(|&i| companies[i].record.market.is_listed())
        .collect();
    listed.sort_by(|&a, &b| {
        companies[b]
            .record
            .capitalization
            .total_cmp(&companies[a].record.capitalization)
            .then(a.cmp(&b))
    });
    listed.truncate(config.carrier_pool);
    let mut otc: Vec<usize> = (0..companies.len())
        .filter(|&i| companies[i].record.market == Market::Otcmkts)
        .collect();
    otc.sort_by(|&a, &b| {
        companies[a]
            .record
            .capitalization
            .total_cmp(&companies[b].record.capitalization)
            .then(a.cmp(&b))
    });
    let pool_size =
        ((otc.len() as f64 * config.target_quantile).ceil() as usize).max(config.targets_min);
    otc.truncate(pool_size);
    if otc.len() < config.targets_min {
        return Err(SynthError::invalid(
            "random_campaigns",
            "not enough OTCMKTS companies for campaign targets",
        ));
    }
    if listed.len() < config.carriers_min {
        return Err(SynthError::invalid(
            "random_campaigns",
            "not enough listed companies for carriers",
        ));
    }

    let mut carrier_use = BTreeMap::new();
    let mut target_use = BTreeMap::new();
    let free_hours: Vec<usize> = (0..config.horizon_hours)
        .filter(|h| !used_hours.contains(h))
        .collect();
    let mut hours: Vec<usize> = free_hours
        .choose_multiple(&mut rng, config.random_campaigns)
        .copied()
        .collect();
    hours.sort_unstable();
    for (k, hour) in hours.into_iter().enumerate() {
        let n_carriers = rng
            .random_range(config.carriers_min..=config.carriers_max)
            .min(listed.len());
        let n_targets = rng
            .random_range(config.targets_min..=config.targets_max)
            .min(otc.len());
        let carriers = balanced_pick(&listed, &mut carrier_use, n_carriers, &mut rng);
        let targets = balanced_pick(&otc, &mut target_use, n_targets, &mut rng);
        planned.push(PlannedCampaign {
            id: format!("c{:02}", config.campaigns.len() + k + 1),
            carriers,
            targets,
            bots: rng.random_range(config.bots_min..=config.bots_max),
            tweets_per_bot: rng.random_range(config.tweets_per_bot_min..=config.tweets_per_bot_max),
            burst_hours: vec![hour],
            retweet_prob: config.campaign_retweet_prob,
        });
    }
    Ok(planned)
}

fn hour_utc(start: DateTime<Utc>, offset: usize) -> DateTime<Utc> {
    start + Duration::hours(offset as i64)
}

/// Generate a labeled stream. Identical `(config, seed)` pairs give
/// identical output.
pub fn generate(config: &SynthConfig, seed: u64) -> Result<SynthOutput, SynthError> {
    config.validate()?;
    let companies = build_companies(config, seed);
    let pools = Pools::new(&companies, config.piggyback_exponent);
    let campaigns = plan_campaigns(config, &companies, seed)?;
    let mut gen = Generator {
        config,
        pools,
        cashtag_counts: WeightedIndex::new(&config.cashtag_count_weights).expect("validated"),
        companies,
        events: Vec::new(),
        seq: 0,
    };
    gen.background(seed);
    gen.news(seed);

    let mut rng = rng_for(seed, 5);
    let mut bot_labels: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let shared_bots: usize = campaigns.iter().map(|c| c.bots).max().unwrap_or(0);
    let mut truths = Vec::new();
    for (ci, c) in campaigns.iter().enumerate() {
        let bots: Vec<String> = if config.bot_reuse {
            (0..c.bots.min(shared_bots))
                .map(|j| format!("bot-{j:04}"))
                .collect()
        } else {
            (0..c.bots)
                .map(|j| format!("bot-{}-{j:03}", c.id))
                .collect()
        };
        for b in &bots {
            bot_labels.entry(b.clone()).or_default().push(c.id.clone());
        }
        let tickers: Vec<usize> = c.carriers.iter().chain(&c.targets).copied().collect();
        for &h in &c.burst_hours {
            gen.campaign_burst(ci, c, &bots, h, &mut rng);
        }
        let name = |i: &usize| gen.companies[*i].record.ticker.clone();
        let mut expected: Vec<ExpectedPeak> = c
            .burst_hours
            .iter()
            .flat_map(|&h| tickers.iter().map(move |t| (t, h)))
            .map(|(t, h)| ExpectedPeak {
                ticker: name(t),
                hour_utc: hour_utc(config.start, h),
            })
            .collect();
        expected.sort_by(|a, b| (a.hour_utc, &a.ticker).cmp(&(b.hour_utc, &b.ticker)));
        truths.push(CampaignTruth {
            id: c.id.clone(),
            carriers: c.carriers.iter().map(name).collect(),
            targets: c.targets.iter().map(name).collect(),
            bots: c.bots,
            tweets_per_bot: c.tweets_per_bot,
            volume_per_burst: c.bots * c.tweets_per_bot,
            burst_hours_utc: c
                .burst_hours
                .iter()
                .map(|&h| hour_utc(config.start, h))
                .collect(),
            expected_peaks: expected,
        });
    }

    let Generator {
        companies,
        mut events,
        ..
    } = gen;
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by_key(|&i| (events[i].second, events[i].seq));
    let mut ids = vec![String::new(); events.len()];
    for (rank, &i) in order.iter().enumerate() {
        ids[i] = format!("t{:08}", rank + 1);
    }
    let start = config.start;
    let mut tweets = Vec::with_capacity(events.len());
    let mut tweet_labels = Vec::with_capacity(events.len());
    let mut humans = BTreeSet::new();
    for &i in &order {
        let e = std::mem::replace(
            &mut events[i],
            Event {
                second: 0,
                seq: 0,
                user: String::new(),
                companies: Vec::new(),
                text: String::new(),
                retweet_of: None,
                source: Source::Background,
            },
        );
        let label = match e.source {
            Source::Background => {
                humans.insert(e.user.clone());
                TweetLabel::Background
            }
            Source::Campaign(c) => TweetLabel::Campaign(campaigns[c].id.clone()),
        };
        tweet_labels.push((ids[i].clone(), label));
        tweets.push(TweetRecord {
            id: ids[i].clone(),
            created_at: start + Duration::seconds(e.second),
            user_id: e.user,
            text: e.text,
            retweet_of: e.retweet_of.map(|o| ids[o].clone()),
            cashtags: e
                .companies
                .iter()
                .map(|&c| companies[c].record.ticker.clone())
                .collect(),
        });
    }

    let mut user_labels: BTreeMap<String, UserLabel> =
        humans.into_iter().map(|u| (u, UserLabel::Human)).collect();
    for (bot, ids) in bot_labels {
        user_labels.insert(bot, UserLabel::Bot(ids));
    }

    let truth = GroundTruth {
        seed,
        rng: SYNTH_RNG.to_string(),
        ids_digest: stream_digest(tweets.iter().map(|t| t.id.as_str())),
        tweet_labels: tweet_labels.into_iter().collect(),
        user_labels,
        campaigns: truths,
    };
    Ok(SynthOutput {
        companies: companies.into_iter().map(|c| c.record).collect(),
        tweets,
        truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{ingest, CompanyCatalog, IngestOptions};
    use crate::synth::{CampaignSpec, MarketSpec};
    use crate::timeseries::{build_hourly_series, detect_peaks, HourSpan};

    fn small() -> SynthConfig {
        let market = |market, median_cap| MarketSpec {
            market,
            companies: 12,
            median_cap,
            cap_sigma: 1.5,
        };
        SynthConfig {
            horizon_hours: 24 * 14,
            human_users: 2000,
            random_campaigns: 3,
            markets: vec![
                market(Market::Nasdaq, 4e8),
                market(Market::Nyse, 2e9),
                market(Market::Otcmkts, 3e7),
            ],
            ..SynthConfig::default()
        }
    }

    #[test]
    fn ticker_names() {
        assert_eq!(synthetic_ticker(Market::Nasdaq, 0), "QAAA");
        assert_eq!(synthetic_ticker(Market::Otcmkts, 27), "OABB");
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate(&small(), 7).unwrap();
        let b = generate(&small(), 7).unwrap();
        let c = generate(&small(), 8).unwrap();
        assert_eq!(a.tweets_jsonl(), b.tweets_jsonl());
        assert_eq!(a.truth, b.truth);
        assert_ne!(a.tweets_jsonl(), c.tweets_jsonl());
    }

    #[test]
    fn stream_ingests_cleanly_and_labels_cover_it() {
        let out = generate(&small(), 3).unwrap();
        let catalog = CompanyCatalog::from_records(out.companies.clone()).unwrap();
        let ds = ingest(
            out.tweets_jsonl().as_bytes(),
            &catalog,
            IngestOptions::default(),
        )
        .unwrap();
        let summary = ds.ingest_summary();
        assert_eq!(summary.malformed, 0);
        assert_eq!(summary.filtered, 0);
        assert_eq!(ds.len(), out.tweets.len());
        assert_eq!(summary.ids_digest, out.truth.ids_digest);
        assert_eq!(out.truth.tweet_labels.len(), out.tweets.len());
        assert!(out
            .tweets
            .iter()
            .all(|t| out.truth.tweet_labels.contains_key(&t.id)));
        assert!(out
            .tweets
            .windows(2)
            .all(|w| w[0].created_at <= w[1].created_at));
    }

    #[test]
    fn burst_volume_is_exact() {
        let out = generate(&small(), 5).unwrap();
        assert_eq!(out.truth.campaigns.len(), 3);
        for c in &out.truth.campaigns {
            assert_eq!(c.volume_per_burst, c.bots * c.tweets_per_bot);
            let label = TweetLabel::Campaign(c.id.clone());
            for hour in &c.burst_hours_utc {
                let n = out
                    .tweets
                    .iter()
                    .filter(|t| out.truth.tweet_labels[&t.id] == label)
                    .filter(|t| {
                        t.created_at.timestamp().div_euclid(3600) == hour.timestamp() / 3600
                    })
                    .count();
                assert_eq!(n, c.volume_per_burst);
            }
            let bots = out
                .truth
                .user_labels
                .values()
                .filter(|u| matches!(u, UserLabel::Bot(ids) if ids.contains(&c.id)))
                .count();
            assert_eq!(bots, c.bots);
        }
    }

    #[test]
    fn explicit_campaign_makes_a_peak() {
        let mut config = small();
        config.random_campaigns = 0;
        let target = synthetic_ticker(Market::Otcmkts, 2);
        config.campaigns = vec![CampaignSpec {
            id: Some("pump".into()),
            carriers: vec![synthetic_ticker(Market::Nyse, 0)],
            targets: vec![target.clone()],
            bots: 200,
            tweets_per_bot: 3,
            burst_hours: vec![100],
            retweet_prob: None,
        }];
        let out = generate(&config, 11).unwrap();
        let catalog = CompanyCatalog::from_records(out.companies.clone()).unwrap();
        let ds = ingest(
            out.tweets_jsonl().as_bytes(),
            &catalog,
            IngestOptions::default(),
        )
        .unwrap();
        let start = config.start.timestamp() / 3600;
        let span = HourSpan::new(start, config.horizon_hours).unwrap();
        let peaks = detect_peaks(&build_hourly_series(&ds, &target, span).unwrap(), 10.0).unwrap();
        assert!(peaks.iter().any(|p| p.hour_index == 100), "{peaks:?}");
        assert_eq!(out.truth.campaigns[0].expected_peaks.len(), 2);
    }

    #[test]
    fn unknown_campaign_ticker_is_a_config_error() {
        let mut config = small();
        config.campaigns = vec![CampaignSpec {
            id: None,
            carriers: vec!["NOPE".into()],
            targets: vec![synthetic_ticker(Market::Otcmkts, 0)],
            bots: 10,
            tweets_per_bot: 1,
            burst_hours: vec![5],
            retweet_prob: None,
        }];
        match generate(&config, 1) {
            Err(SynthError::ConfigInvalid { path, .. }) => {
                assert_eq!(path, "campaigns[0].carriers")
            }
            other => panic!("{other:?}"),
        }
    }
}
