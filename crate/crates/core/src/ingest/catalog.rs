//! Company catalog: tickers, markets, capitalization and TRBC paths.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::cashtag::normalize_ticker;
use crate::error::IngestError;

/// Number of levels in the TRBC hierarchy.
pub const TRBC_LEVELS: usize = 5;

/// Column layout of the companies CSV.
pub const COMPANY_CSV_HEADER: [&str; 10] = [
    "ticker",
    "market",
    "share_price",
    "shares_outstanding",
    "capitalization",
    "trbc_l1",
    "trbc_l2",
    "trbc_l3",
    "trbc_l4",
    "trbc_l5",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Market {
    Nasdaq,
    Nyse,
    Nysearca,
    Nysemkt,
    Otcmkts,
    Others,
}

impl Market {
    pub const ALL: [Market; 6] = [
        Market::Nasdaq,
        Market::Nyse,
        Market::Nysearca,
        Market::Nysemkt,
        Market::Otcmkts,
        Market::Others,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Market::Nasdaq => "NASDAQ",
            Market::Nyse => "NYSE",
            Market::Nysearca => "NYSEARCA",
            Market::Nysemkt => "NYSEMKT",
            Market::Otcmkts => "OTCMKTS",
            Market::Others => "OTHERS",
        }
    }

    /// Regulated exchanges, as opposed to over-the-counter or unlisted assets.
    pub fn is_listed(self) -> bool {
        !matches!(self, Market::Otcmkts | Market::Others)
    }
}

impl fmt::Display for Market {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Market {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        Market::ALL
            .into_iter()
            .find(|m| m.as_str() == upper)
            .ok_or_else(|| format!("unknown market `{s}`"))
    }
}

/// TRBC classification path. Index 0 is level 1 (finest, activity), index 4
/// is level 5 (economic sector).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrbcPath(pub [String; TRBC_LEVELS]);

impl TrbcPath {
    /// Label at `level` (1..=5).
    pub fn level(&self, level: usize) -> &str {
        assert!(
            (1..=TRBC_LEVELS).contains(&level),
            "TRBC level {level} out of range"
        );
        &self.0[level - 1]
    }

    pub fn economic_sector(&self) -> &str {
        self.level(TRBC_LEVELS)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanyRecord {
    pub ticker: String,
    pub market: Market,
    pub share_price: Option<f64>,
    pub shares_outstanding: Option<u64>,
    pub capitalization: f64,
    pub trbc: TrbcPath,
}

impl CompanyRecord {
    /// Builds a record, deriving capitalization from price × shares when
    /// both are present.
    pub fn new(
        ticker: impl Into<String>,
        market: Market,
        share_price: Option<f64>,
        shares_outstanding: Option<u64>,
        capitalization: Option<f64>,
        trbc: TrbcPath,
    ) -> Option<Self> {
        let capitalization = match (share_price, shares_outstanding) {
            (Some(p), Some(s)) => p * s as f64,
            _ => capitalization?,
        };
        Some(CompanyRecord {
            ticker: ticker.into(),
            market,
            share_price,
            shares_outstanding,
            capitalization,
            trbc,
        })
    }
}

/// Immutable ticker → company map with a per-market index.
#[derive(Debug, Clone, Default)]
pub struct CompanyCatalog {
    companies: BTreeMap<String, CompanyRecord>,
    by_market: BTreeMap<Market, Vec<String>>,
}

impl CompanyCatalog {
    pub fn from_records(
        records: impl IntoIterator<Item = CompanyRecord>,
    ) -> Result<Self, IngestError> {
        let mut companies = BTreeMap::new();
        for record in records {
            if companies.contains_key(&record.ticker) {
                return Err(IngestError::DuplicateTicker(record.ticker));
            }
            companies.insert(record.ticker.clone(), record);
        }
        let mut by_market: BTreeMap<Market, Vec<String>> = BTreeMap::new();
        for (ticker, record) in &companies {
            by_market
                .entry(record.market)
                .or_default()
                .push(ticker.clone());
        }
        Ok(CompanyCatalog {
            companies,
            by_market,
        })
    }

    pub fn get(&self, ticker: &str) -> Option<&CompanyRecord> {
        self.companies.get(ticker)
    }

    pub fn contains(&self, ticker: &str) -> bool {
        self.companies.contains_key(ticker)
    }

    pub fn len(&self) -> usize {
        self.companies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.companies.is_empty()
    }

    /// Companies in ticker order.
    pub fn iter(&self) -> impl Iterator<Item = &CompanyRecord> {
        self.companies.values()
    }

    /// Markets that have at least one company, in enum order.
    pub fn markets(&self) -> impl Iterator<Item = Market> + '_ {
        self.by_market.keys().copied()
    }

    pub fn market_tickers(&self, market: Market) -> &[String] {
        self.by_market
            .get(&market)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Capitalizations of every company, in ticker order.
    pub fn capitalizations(&self) -> Vec<f64> {
        self.companies.values().map(|c| c.capitalization).collect()
    }
}

/// Parse the companies CSV.
pub fn load_company_catalog<R: Read>(reader: R) -> Result<CompanyCatalog, IngestError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = csv.headers().map_err(|e| IngestError::MalformedRow {
        row: 0,
        reason: e.to_string(),
    })?;
    if header.iter().ne(COMPANY_CSV_HEADER.iter().copied()) {
        return Err(IngestError::MalformedRow {
            row: 0,
            reason: format!("expected header `{}`", COMPANY_CSV_HEADER.join(",")),
        });
    }

    let mut records = Vec::new();
    for (i, row) in csv.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| IngestError::MalformedRow {
            row: row_no,
            reason: e.to_string(),
        })?;
        records.push(parse_company_row(row_no, &row)?);
    }
    CompanyCatalog::from_records(records)
}

fn parse_company_row(row_no: usize, row: &csv::StringRecord) -> Result<CompanyRecord, IngestError> {
    let bad = |reason: String| IngestError::MalformedRow {
        row: row_no,
        reason,
    };
    if row.len() != COMPANY_CSV_HEADER.len() {
        return Err(bad(format!(
            "expected {} fields, got {}",
            COMPANY_CSV_HEADER.len(),
            row.len()
        )));
    }
    let ticker =
        normalize_ticker(&row[0]).ok_or_else(|| bad(format!("invalid ticker `{}`", &row[0])))?;
    let market = row[1].parse::<Market>().map_err(bad)?;
    let money = |field: &str, name: &str| -> Result<Option<f64>, IngestError> {
        if field.is_empty() {
            return Ok(None);
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(Some(v)),
            _ => Err(bad(format!("invalid {name} `{field}`"))),
        }
    };
    let share_price = money(&row[2], "share_price")?;
    let shares_outstanding = if row[3].is_empty() {
        None
    } else {
        Some(
            row[3]
                .parse::<u64>()
                .map_err(|_| bad(format!("invalid shares_outstanding `{}`", &row[3])))?,
        )
    };
    let capitalization = money(&row[4], "capitalization")?;

    let mut labels: [String; TRBC_LEVELS] = Default::default();
    for (level, label) in labels.iter_mut().enumerate() {
        let field = &row[5 + level];
        if field.is_empty() {
            return Err(bad(format!("empty trbc_l{}", level + 1)));
        }
        *label = field.to_string();
    }

    CompanyRecord::new(
        ticker.clone(),
        market,
        share_price,
        shares_outstanding,
        capitalization,
        TrbcPath(labels),
    )
    .ok_or(IngestError::MissingCapitalization {
        row: row_no,
        ticker,
    })
}

/// Write companies in the catalog CSV layout.
pub fn write_company_csv<'a, W: Write>(
    writer: W,
    companies: impl IntoIterator<Item = &'a CompanyRecord>,
) -> Result<(), IngestError> {
    let mut csv = csv::Writer::from_writer(writer);
    let to_io = |e: csv::Error| IngestError::Io(std::io::Error::other(e));
    csv.write_record(COMPANY_CSV_HEADER).map_err(to_io)?;
    for c in companies {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let mut row = vec![
            c.ticker.clone(),
            c.market.to_string(),
            opt(c.share_price.map(|p| p.to_string())),
            opt(c.shares_outstanding.map(|s| s.to_string())),
            c.capitalization.to_string(),
        ];
        row.extend(c.trbc.0.iter().cloned());
        csv.write_record(&row).map_err(to_io)?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "ticker,market,share_price,shares_outstanding,capitalization,trbc_l1,trbc_l2,trbc_l3,trbc_l4,trbc_l5\n";

    fn load(body: &str) -> Result<CompanyCatalog, IngestError> {
        load_company_catalog(format!("{HEADER}{body}").as_bytes())
    }

    #[test]
    fn derives_capitalization_from_price_and_shares() {
        let cat = load("ZZZ,NYSE,2.00,100,,a,b,c,d,e\n").unwrap();
        assert_eq!(cat.get("ZZZ").unwrap().capitalization, 200.0);
    }

    #[test]
    fn duplicate_ticker_rejected() {
        let err = load("ZZZ,NYSE,2.00,100,,a,b,c,d,e\nZZZ,NYSE,,,5,a,b,c,d,e\n").unwrap_err();
        assert!(matches!(err, IngestError::DuplicateTicker(t) if t == "ZZZ"));
    }

    #[test]
    fn otc_row_preserved() {
        let cat = load("ABCD,OTCMKTS,,,31480000,Act,Ind,Grp,Bus,Sec\n").unwrap();
        let rec = cat.get("ABCD").unwrap();
        assert_eq!(rec.market, Market::Otcmkts);
        assert_eq!(rec.capitalization, 31_480_000.0);
        assert_eq!(
            rec.trbc.0,
            ["Act", "Ind", "Grp", "Bus", "Sec"].map(String::from)
        );
        assert_eq!(rec.trbc.level(1), "Act");
        assert_eq!(rec.trbc.economic_sector(), "Sec");
        assert_eq!(cat.market_tickers(Market::Otcmkts), ["ABCD".to_string()]);
    }

    #[test]
    fn missing_capitalization() {
        let err = load("ZZZ,NYSE,2.00,,,a,b,c,d,e\n").unwrap_err();
        assert!(matches!(
            err,
            IngestError::MissingCapitalization { row: 1, .. }
        ));
    }

    #[test]
    fn malformed_rows() {
        assert!(matches!(
            load("ZZZ,MOON,,,5,a,b,c,d,e\n"),
            Err(IngestError::MalformedRow { .. })
        ));
        assert!(matches!(
            load("ZZZ,NYSE,,,5,a,,c,d,e\n"),
            Err(IngestError::MalformedRow { .. })
        ));
        assert!(matches!(
            load("ZZZ,NYSE,,,-5,a,b,c,d,e\n"),
            Err(IngestError::MalformedRow { .. })
        ));
        assert!(matches!(
            load("Z1,NYSE,,,5,a,b,c,d,e\n"),
            Err(IngestError::MalformedRow { .. })
        ));
        assert!(matches!(
            load_company_catalog("ticker,market\nA,NYSE\n".as_bytes()),
            Err(IngestError::MalformedRow { row: 0, .. })
        ));
    }

    #[test]
    fn csv_writer_round_trips() {
        let cat =
            load("ZZZ,NYSE,12.34,1000,,a,b,c,d,e\nABC,OTCMKTS,,,5.5,\"x,y\",b,c,d,e\n").unwrap();
        let mut buf = Vec::new();
        write_company_csv(&mut buf, cat.iter()).unwrap();
        let again = load_company_catalog(buf.as_slice()).unwrap();
        assert_eq!(
            again.iter().collect::<Vec<_>>(),
            cat.iter().collect::<Vec<_>>()
        );
    }
}
