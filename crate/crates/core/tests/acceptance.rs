//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints one PASS/FAIL line; exits non-zero if any criterion fails.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use semitrend::cli::{cmd_ingest, cmd_pipeline, PipelineInputs, RecordSource};
use semitrend::dataset::{
    parse_records, sine_records, table2_csv, table2_records, write_records, LoadOptions, Period, NUM_FEATURES, NUM_FINANCIALS,
};
use semitrend::events::{apply_intervention, enrich, intervention_multiplier, EventCalendar};
use semitrend::forecast::{combined_index, find_extrema, roll_forward, train, Mode, ScenarioCalendar, TrainingConfig};
use semitrend::neural::{backward, finite_difference_gradients, forward, init_parameters, max_relative_error, LstmDims, Matrix, SplitMix64};
use semitrend::sentiment::SentimentScore;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn p(y: i32, q: u8) -> Period {
    Period::new(y, q).unwrap()
}

fn gradient_oracle() -> Check {
    let t = Instant::now();
    let dims = LstmDims::new(3, 4, 2).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let mut rng = SplitMix64::new(1000 + seed);
        let mut params = init_parameters(dims, &mut rng).unwrap();
        for t in params.tensors_mut() {
            t.iter_mut().for_each(|x| *x += rng.uniform(-0.1, 0.1));
        }
        let seq = Matrix::from_vec(5, 3, (0..15).map(|_| rng.uniform(-1.0, 1.0)).collect()).unwrap();
        let target: Vec<f64> = (0..2).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let pass = forward(&params, &seq).map_err(|e| e.to_string())?;
        let analytic = backward(&params, &pass, &target).map_err(|e| e.to_string())?;
        let numeric = finite_difference_gradients(&params, &seq, &target, 1e-5).map_err(|e| e.to_string())?;
        let err = max_relative_error(&analytic, &numeric);
        ensure(err < 1e-4, format!("seed {seed}: relative error {err:e}"))?;
        worst = worst.max(err);
    }
    let elapsed = t.elapsed();
    ensure(elapsed < Duration::from_secs(60), format!("took {elapsed:.1?}"))?;
    Ok(format!("10 seeds, {} parameters each, max relative error {worst:.2e}, {elapsed:.1?}", dims.param_count()))
}

fn fixture_fidelity() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("records.csv");
    let outcome = cmd_ingest(&RecordSource::File(write_temp(dir.path(), "in.csv", table2_csv())?), LoadOptions::default(), Some(&out))
        .map_err(|e| e.to_string())?;
    outcome.commit().map_err(|e| e.to_string())?;
    let written = fs::read_to_string(&out).map_err(|e| e.to_string())?;
    ensure(written == table2_csv(), "ingest output differs from the fixture bytes")?;
    ensure(write_records(&parse_records(&written, LoadOptions::default()).unwrap()) == written, "second round trip differs")?;

    let records = table2_records();
    let at = |y, q| records.iter().find(|r| r.period == p(y, q)).ok_or(format!("{y} Q{q} missing"));
    let checks = [
        ("1998 Q1 net_sales", at(1998, 1)?.net_sales, 15736.0),
        ("1998 Q1 eps", at(1998, 1)?.eps, 1.7),
        ("2001 Q2 net_income", at(2001, 2)?.net_income, 312.0),
        ("2001 Q2 eps", at(2001, 2)?.eps, 0.01),
        ("2003 Q4 wafer_shipment", at(2003, 4)?.wafer_shipment, 1427000.0),
    ];
    for (name, got, want) in checks {
        ensure(got == want, format!("{name}: {got} != {want}"))?;
    }
    Ok(format!("{} bytes identical, {} spot values exact", written.len(), checks.len()))
}

fn intervention_suite() -> Check {
    let calendar = EventCalendar::bundled();
    let raw = table2_records();
    let enriched = enrich(&raw, &calendar).map_err(|e| e.to_string())?;
    let mut quiet = 0;
    for (before, after) in raw.iter().zip(&enriched) {
        ensure(before.events == after.events, format!("{}: calendar labels differ from the table", before.period))?;
        if before.events.is_empty() {
            quiet += 1;
            ensure(
                after.effective_sentiment == before.base_sentiment,
                format!("{}: effective {:?} != base {:?}", before.period, after.effective_sentiment, before.base_sentiment),
            )?;
        }
    }

    let pair = ["Internet Bubble", "0.18um Process"].map(|n| calendar.get(n).expect("bundled event"));
    let m = intervention_multiplier(pair);
    ensure((m - 0.99).abs() <= 1e-12, format!("multiplier {m}"))?;

    let mut rng = SplitMix64::new(42);
    let events = calendar.events();
    for case in 0..1000 {
        let base = rng.uniform(0.0, 100.0);
        let subset: Vec<_> = events.iter().filter(|_| rng.next_u64().is_multiple_of(4)).collect();
        let got = apply_intervention(SentimentScore::new(base).unwrap(), subset.iter().copied()).value();
        ensure((0.0..=100.0).contains(&got), format!("case {case}: {got} outside [0, 100]"))?;
        let product: f64 = subset.iter().map(|e| e.weight()).product();
        let want = (base * product).clamp(0.0, 100.0);
        ensure((got - want).abs() <= 1e-9 * want.max(1.0), format!("case {case}: {got} vs {want}"))?;
    }
    Ok(format!("{quiet} quiet quarters unchanged, multiplier {m:.15}, 1000 clamping cases"))
}

fn learnability() -> Check {
    let t = Instant::now();
    let records = sine_records(200, 20.0);
    let config = TrainingConfig { validation_fraction: 0.2, ..TrainingConfig::default() };
    let (model, report) = train(&records, &config).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();

    // recompute the held-out error from the model's own one-step predictions
    let rows: Vec<[f64; NUM_FEATURES]> = records.iter().map(|r| model.scaler.normalize(&r.features().unwrap())).collect();
    let held_out = 40;
    let mut total = 0.0;
    for t in rows.len() - held_out..rows.len() {
        let pred = model.predict_next(&rows[t - config.window..t]).map_err(|e| e.to_string())?;
        total += pred.iter().zip(&rows[t]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / NUM_FEATURES as f64;
    }
    let mse = total / held_out as f64;
    let reported = report.validation_loss().ok_or("no validation loss")?;
    ensure((mse - reported).abs() <= 1e-12 * mse.max(1e-12) + 1e-15, format!("recomputed {mse} vs reported {reported}"))?;
    ensure(mse < 0.01, format!("held-out MSE {mse}"))?;
    ensure(elapsed < Duration::from_secs(300), format!("took {elapsed:.1?}"))?;
    Ok(format!("held-out one-step MSE {mse:.2e} after {} epochs, {elapsed:.1?}", config.epochs))
}

fn fixture_training() -> Check {
    let history = enrich(&table2_records(), &EventCalendar::bundled()).map_err(|e| e.to_string())?;
    let config = TrainingConfig { window: 8, seed: 42, epochs: 200, ..TrainingConfig::default() };
    let (model, report) = train(&history, &config).map_err(|e| e.to_string())?;
    let (first, last) = (report.first_loss(), report.final_loss());
    ensure(last < first, format!("final loss {last} not below first {first}"))?;

    let scenario = ScenarioCalendar::carry_forward(&history).map_err(|e| e.to_string())?;
    let f = roll_forward(&model, &history, 24, &scenario).map_err(|e| e.to_string())?;
    let periods: Vec<Period> = f.periods().collect();
    ensure(periods.first() == Some(&p(2004, 1)) && periods.last() == Some(&p(2009, 4)), format!("periods {periods:?}"))?;
    ensure(f.values.iter().flatten().all(|v| v.is_finite()), "non-finite forecast")?;
    ensure(f.values.iter().all(|v| v.len() == NUM_FINANCIALS), "row width")?;
    ensure(f.assumed_sentiment.iter().all(|s| (0.0..=100.0).contains(s)), "assumed sentiment outside [0, 100]")?;
    Ok(format!("loss {first:.4} -> {last:.4}, 24 finite quarters 2004 Q1 … 2009 Q4"))
}

fn determinism() -> Check {
    let mut compared = 0;
    for mode in [Mode::Multivariate, Mode::PerSeries] {
        let inputs = PipelineInputs {
            source: RecordSource::Fixture(semitrend::cli::Fixture::Table2),
            transcripts: None,
            lexicon: None,
            calendar: None,
            scenario: None,
            load: LoadOptions::default(),
            config: TrainingConfig { seed: 42, mode, epochs: 300, ..TrainingConfig::default() },
            horizon: 24,
        };
        let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
        let mut listings = Vec::new();
        for d in &dirs {
            let outcome = cmd_pipeline(&inputs, d.path()).map_err(|e| e.to_string())?;
            outcome.commit().map_err(|e| e.to_string())?;
            let names: Vec<String> = outcome
                .files
                .iter()
                .map(|(p, _)| p.strip_prefix(d.path()).unwrap().display().to_string())
                .collect();
            listings.push(names);
        }
        ensure(listings[0] == listings[1], "different file sets")?;
        for name in &listings[0] {
            let a = fs::read(dirs[0].path().join(name)).map_err(|e| e.to_string())?;
            let b = fs::read(dirs[1].path().join(name)).map_err(|e| e.to_string())?;
            ensure(a == b, format!("{mode}: {name} differs between runs"))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} files bitwise identical across runs (both modes)"))
}

fn combined_index_properties() -> Check {
    let mut rng = SplitMix64::new(7);
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let n = 1 + (rng.next_u64() % 8) as usize;
        let len = 1 + (rng.next_u64() % 30) as usize;
        let mut series: Vec<Vec<f64>> = (0..n).map(|_| (0..len).map(|_| rng.uniform(-1e3, 1e3)).collect()).collect();
        let index = combined_index(&series);
        ensure(index.len() == len, "length")?;
        ensure(index.iter().all(|v| (0.0..=1.0).contains(v)), format!("case {case}: value outside [0, 1]"))?;

        let k = (rng.next_u64() % n as u64) as usize;
        let (a, b) = (rng.uniform(0.01, 100.0), rng.uniform(-1e4, 1e4));
        series[k].iter_mut().for_each(|x| *x = a * *x + b);
        let rescaled = combined_index(&series);
        let diff = index.iter().zip(&rescaled).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        ensure(diff < 1e-12, format!("case {case}: affine change moved the index by {diff:e}"))?;
        worst = worst.max(diff);
    }

    let start = p(2024, 1);
    let e = find_extrema(&[0.0, 1.0, 0.0], start).map_err(|e| e.to_string())?;
    ensure(e.len() == 1 && e[0].position == 1 && e[0].kind.to_string() == "peak", format!("(0,1,0) gave {e:?}"))?;
    for case in 0..1000 {
        let len = 3 + (rng.next_u64() % 30) as usize;
        let mut x = rng.uniform(-10.0, 10.0);
        let rising = rng.next_u64().is_multiple_of(2);
        let seq: Vec<f64> = (0..len)
            .map(|_| {
                // steps of zero exercise plateaus
                let step = if rng.next_u64().is_multiple_of(5) { 0.0 } else { rng.uniform(0.0, 3.0) };
                x += if rising { step } else { -step };
                x
            })
            .collect();
        let e = find_extrema(&seq, start).map_err(|e| e.to_string())?;
        ensure(e.is_empty(), format!("monotone case {case} gave {e:?}"))?;
    }
    Ok(format!("1000 range cases, max affine drift {worst:.1e}, extrema rules hold on 1000 monotone sequences"))
}

fn write_temp(dir: &Path, name: &str, text: &str) -> Result<std::path::PathBuf, String> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| e.to_string())?;
    Ok(path)
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 gradient oracle", gradient_oracle),
        ("2 fixture fidelity", fixture_fidelity),
        ("3 intervention suite", intervention_suite),
        ("4 learnability", learnability),
        ("5 fixture training", fixture_training),
        ("6 determinism", determinism),
        ("7 combined index", combined_index_properties),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
