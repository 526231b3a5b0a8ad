//! Tweet and company ingestion.

mod cashtag;
mod catalog;
mod dataset;
mod summary;
mod tweet;

pub use cashtag::{extract_cashtags, is_valid_ticker, normalize_ticker};
pub use catalog::{
    load_company_catalog, write_company_csv, CompanyCatalog, CompanyRecord, Market, TrbcPath,
    COMPANY_CSV_HEADER, TRBC_LEVELS,
};
pub use dataset::{ingest, stream_digest, Counters, Dataset, IngestOptions, IngestSummary};
pub use summary::{summarize, DatasetSummary, MarketRow};
pub use tweet::{format_timestamp, parse_tweet_record, TweetRecord};
