use std::fmt;
use std::str::FromStr;

use super::DatasetError;

/// Earliest and latest calendar years accepted for a fiscal quarter.
pub const MIN_YEAR: i32 = 1998;
pub const MAX_YEAR: i32 = 2100;

/// A fiscal quarter, ordered chronologically by `(year, quarter)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Period {
    year: i32,
    quarter: u8,
}

impl Period {
    pub fn new(year: i32, quarter: u8) -> Result<Self, DatasetError> {
        if !(1..=4).contains(&quarter) {
            return Err(DatasetError::InvalidPeriod {
                token: format!("{year} Q{quarter}"),
                reason: "quarter must be 1..4",
            });
        }
        if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
            return Err(DatasetError::InvalidPeriod {
                token: format!("{year} Q{quarter}"),
                reason: "year outside 1998..2100",
            });
        }
        Ok(Self { year, quarter })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn quarter(self) -> u8 {
        self.quarter
    }

    /// The following quarter; `(y, 4)` is followed by `(y + 1, 1)`.
    ///
    /// Not range-checked against [`MAX_YEAR`] so that forecast horizons may
    /// run past the last accepted input year.
    pub fn succ(self) -> Self {
        if self.quarter == 4 {
            Self { year: self.year + 1, quarter: 1 }
        } else {
            Self { year: self.year, quarter: self.quarter + 1 }
        }
    }

    /// Advance by `n` quarters.
    pub fn offset(self, n: usize) -> Self {
        let idx = self.ordinal() + n as i64;
        Self {
            year: idx.div_euclid(4) as i32,
            quarter: (idx.rem_euclid(4) + 1) as u8,
        }
    }

    /// Number of quarters from `self` to `later` (negative if `later` precedes).
    pub fn quarters_until(self, later: Period) -> i64 {
        later.ordinal() - self.ordinal()
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 4 + (self.quarter as i64 - 1)
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} Q{}", self.year, self.quarter)
    }
}

impl FromStr for Period {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_period(s)
    }
}

/// Parse the `YYYY QN` period format (single space, capital `Q`).
pub fn parse_period(text: &str) -> Result<Period, DatasetError> {
    let malformed = |reason| DatasetError::InvalidPeriod { token: text.to_string(), reason };
    let (year, quarter) = text.split_once(' ').ok_or_else(|| malformed("expected `YYYY QN`"))?;
    if year.len() != 4 || !year.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed("year must be four digits"));
    }
    let q = quarter.strip_prefix('Q').ok_or_else(|| malformed("expected `Q` before the quarter"))?;
    if q.len() != 1 || !q.as_bytes()[0].is_ascii_digit() {
        return Err(malformed("quarter must be a single digit"));
    }
    let year: i32 = year.parse().map_err(|_| malformed("year must be four digits"))?;
    let quarter = q.as_bytes()[0] - b'0';
    Period::new(year, quarter).map_err(|e| match e {
        DatasetError::InvalidPeriod { reason, .. } => malformed(reason),
        other => other,
    })
}
