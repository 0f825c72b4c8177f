//! Apply event intervention to the bundled table and show how each
//! quarter's score moves.

use semitrend::dataset::table2_records;
use semitrend::events::{enrich, intervention_multiplier, EventCalendar};

fn main() -> semitrend::Result<()> {
    let calendar = EventCalendar::bundled();
    for r in enrich(&table2_records(), &calendar)? {
        let active = calendar.active_events(r.period);
        println!(
            "{}  base {:>7.3}  x{:.4}  effective {:>7.3}  {}",
            r.period,
            r.base_sentiment.unwrap_or_default(),
            intervention_multiplier(active),
            r.effective_sentiment.unwrap_or_default(),
            r.events.join("; ")
        );
    }
    Ok(())
}
