use super::{parse_records, LoadOptions, QuarterlyRecord};

const TABLE2: &str = include_str!("../../data/table2.csv");

/// The 24-quarter sample (1998 Q1 to 2003 Q4) in canonical table form.
///
/// Sentiment scores are stored as base scores, with each quarter's event
/// labels in the `events` column.
pub fn table2_csv() -> &'static str {
    TABLE2
}

pub fn table2_records() -> Vec<QuarterlyRecord> {
    parse_records(TABLE2, LoadOptions::default()).expect("embedded sample table is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{write_records, FeatureScaler, Period};

    #[test]
    fn extent_and_spot_values() {
        let r = table2_records();
        assert_eq!(r.len(), 24);
        assert_eq!(r[0].period, Period::new(1998, 1).unwrap());
        assert_eq!(r[23].period, Period::new(2003, 4).unwrap());
        assert_eq!(r[0].net_sales, 15736.0);
        assert_eq!(r[0].eps, 1.7);
        assert_eq!(r[13].net_income, 312.0);
        assert_eq!(r[13].eps, 0.01);
        assert_eq!(r[23].wafer_shipment, 1427000.0);
        assert_eq!(r[12].events, vec!["Internet Bubble", "9/11 Investigation", "0.13um Process"]);
        assert!(r[16].events.is_empty());
    }

    #[test]
    fn canonical_round_trip() {
        assert_eq!(write_records(&table2_records()), TABLE2);
    }

    #[test]
    fn scaler_ranges() {
        let mut records = table2_records();
        for r in &mut records {
            r.effective_sentiment = r.base_sentiment;
        }
        let s = FeatureScaler::fit(&records).unwrap();
        assert_eq!(s.range(0), (11263.0, 57780.0));
        assert_eq!(s.range(4), (0.01, 1.84));
    }
}
