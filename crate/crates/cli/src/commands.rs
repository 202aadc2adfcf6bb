use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use tlqueue_core::closedform::{
    chi_closed, gumbel_pmf, linspace, read_strategy_csv, strategy_table, write_strategy_csv,
};
use tlqueue_core::model::{validate_params, Purpose};
use tlqueue_core::precision::parse_decimal_ratio;
use tlqueue_core::recognize::{
    fit_int_poly, minimal_polynomial, quartic_to_nested_radical, read_points_csv, rescale_scan,
};
use tlqueue_core::simulate::{compare_distributions, monte_carlo, Engine, MonteCarloConfig};
use tlqueue_core::spectral::{chi_spectral, exact_max_pmf, max_pmf_f64, PrecisionPolicy, SweepOptions};
use tlqueue_core::{Histogram, IntPolynomial, ModelParams, PredictionTable, Probability, Schedule, SpectralError};

use crate::args::*;
use crate::chart::{render_chart, ChartKind, ChartSpec};
use crate::output::{emit, read, RunConfig};
use crate::Failure;

pub fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Chi(ChiCommand::Closed(a)) => chi_closed_cmd(&a),
        Command::Chi(ChiCommand::Spectral(a)) => chi_spectral_cmd(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Predict(a) => predict(&a),
        Command::Exact(a) => exact(&a),
        Command::Compare(a) => compare(&a),
        Command::Recognize(RecognizeCommand::Minpoly(a)) => minpoly(&a),
        Command::Recognize(RecognizeCommand::Radical(a)) => radical(&a),
        Command::Recognize(RecognizeCommand::Fit(a)) => fit(&a),
        Command::Strategy(a) => strategy(&a),
        Command::Plot(PlotCommand::Histogram(a)) => plot_histogram(&a),
        Command::Plot(PlotCommand::Strategy(a)) => plot_strategy(&a),
    }
}

/// Step counts such as `1000000` or `1e6`; must be a positive integer.
pub fn parse_count(text: &str) -> Result<u64, Failure> {
    let bad = || Failure::Usage(format!("n = {text:?} is not a positive integer"));
    let r = parse_decimal_ratio(text).ok_or_else(bad)?;
    if !r.is_integer() {
        return Err(bad());
    }
    match r.to_integer().to_u64() {
        Some(n) if n > 0 => Ok(n),
        _ => Err(bad()),
    }
}

fn probability(text: &str) -> Result<Probability, Failure> {
    Ok(text.parse::<Probability>()?)
}

fn schedule_of(ell: Option<u32>, schedule: Option<&str>) -> Result<Schedule, Failure> {
    match (ell, schedule) {
        (Some(ell), None) => {
            if ell == 0 {
                return Err(Failure::Usage("block length must be at least 1".into()));
            }
            Ok(Schedule::DeterministicBlocks(ell))
        }
        (None, Some(s)) => Ok(s.parse::<Schedule>()?),
        _ => Err(Failure::Usage("give either --ell or --schedule".into())),
    }
}

fn ell_of(schedule: &Schedule) -> u32 {
    match schedule {
        Schedule::DeterministicBlocks(ell) => *ell,
        _ => 1,
    }
}

fn chi_closed_cmd(a: &ChiClosedArgs) -> Result<(), Failure> {
    let cfg = RunConfig::new("chi closed", a);
    let p = probability(&a.p)?;
    validate_params(&ModelParams::new(p.clone(), a.ell)?, Purpose::Asymptotics)?;
    let value = chi_closed(a.ell, p.value())?;
    let result = json!({
        "ell": a.ell,
        "p": p,
        "form": value.to_string(),
        "value": value.report(a.digits)?,
    });
    emit(a.out.as_deref(), &cfg.wrap(&result))
}

fn chi_spectral_cmd(a: &ChiSpectralArgs) -> Result<(), Failure> {
    let cfg = RunConfig::new("chi spectral", a);
    let p = probability(&a.p)?;
    let exact = p.exact()?.clone();
    validate_params(&ModelParams::new(p, a.ell)?, Purpose::Asymptotics)?;
    let opts = SweepOptions {
        k_max: a.k_max,
        step: a.step,
        tol: a.tol,
        policy: PrecisionPolicy { guard_digits: a.guard },
        workers: a.workers,
    };
    match chi_spectral(a.ell, &exact, &opts) {
        Ok(est) => emit(a.out.as_deref(), &cfg.wrap(&est)),
        Err(SpectralError::NonConvergence { message, estimate: Some(est) }) => {
            emit(a.out.as_deref(), &cfg.wrap(&est))?;
            Err(Failure::NonConvergence(message))
        }
        Err(e) => Err(e.into()),
    }
}

fn simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let cfg = RunConfig::new("simulate", a);
    let schedule = schedule_of(a.ell, a.schedule.as_deref())?;
    let params = ModelParams::new(probability(&a.p)?, ell_of(&schedule))?;
    let checked = validate_params(&params, Purpose::Simulation)?;
    if !checked.warnings.is_empty() {
        eprintln!("warning: p >= 1/2, the queue has no downward drift");
    }
    let engine = match a.engine {
        EngineArg::Auto => Engine::Auto,
        EngineArg::Stepwise => Engine::Stepwise,
        EngineArg::Blocked => Engine::Blocked,
    };
    let mc = MonteCarloConfig { n: parse_count(&a.n)?, runs: a.runs, seed: a.seed, workers: a.workers, engine };
    let result = monte_carlo(&params, &schedule, &mc)?;
    match &a.out {
        Some(path) => {
            let mut buf = cfg.csv_preamble().into_bytes();
            result.histogram.write_csv(&mut buf)?;
            emit(Some(path), &String::from_utf8(buf).expect("csv is utf-8"))?;
            emit(None, &cfg.wrap(&json!({ "summary": result.summary })))
        }
        None => emit(None, &cfg.wrap(&json!({ "summary": result.summary, "histogram": result.histogram.counts }))),
    }
}

fn table_csv<A: Serialize>(cfg: &RunConfig<'_, A>, table: &PredictionTable) -> Result<String, Failure> {
    let mut buf = cfg.csv_preamble().into_bytes();
    table.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

fn predict(a: &PredictArgs) -> Result<(), Failure> {
    let cfg = RunConfig::new("predict", a);
    let p = probability(&a.p)?;
    validate_params(&ModelParams::new(p.clone(), a.ell)?, Purpose::Asymptotics)?;
    let table = gumbel_pmf(a.ell, p.to_f64(), parse_count(&a.n)?)?;
    emit(a.out.as_deref(), &table_csv(&cfg, &table)?)
}

fn exact(a: &ExactArgs) -> Result<(), Failure> {
    let cfg = RunConfig::new("exact", a);
    let schedule = schedule_of(a.ell, a.schedule.as_deref())?;
    let p = probability(&a.p)?;
    validate_params(&ModelParams::new(p.clone(), ell_of(&schedule))?, Purpose::Simulation)?;
    let n = parse_count(&a.n)?;
    let table = if a.rational {
        exact_max_pmf(p.exact()?, &schedule, n)?.to_table()
    } else {
        max_pmf_f64(p.to_f64(), &schedule, n)?
    };
    emit(a.out.as_deref(), &table_csv(&cfg, &table)?)
}

fn compare(a: &CompareArgs) -> Result<(), Failure> {
    let cfg = RunConfig::new("compare", a);
    let hist = Histogram::read_csv(read(&a.hist)?.as_slice())?;
    let pmf = PredictionTable::read_csv(read(&a.pmf)?.as_slice())?;
    let metrics = compare_distributions(&hist, &pmf)?;
    emit(a.out.as_deref(), &cfg.wrap(&metrics))
}

fn minpoly(a: &MinpolyArgs) -> Result<(), Failure> {
    let cfg = RunConfig::new("recognize minpoly", a);
    let r = minimal_polynomial(&a.y, a.max_degree, a.precision)?;
    let result = json!({
        "polynomial": r.polynomial.render("y"),
        "coeffs": r.polynomial,
        "residual": r.residual,
        "precision": r.precision_used,
    });
    emit(a.out.as_deref(), &cfg.wrap(&result))
}

fn parse_int(text: &str) -> Result<BigInt, Failure> {
    text.trim().parse().map_err(|_| Failure::Usage(format!("{text:?} is not an integer")))
}

fn radical(a: &RadicalArgs) -> Result<(), Failure> {
    let cfg = RunConfig::new("recognize radical", a);
    let coeffs = a.coeffs.iter().map(|c| parse_int(c)).collect::<Result<Vec<_>, _>>()?;
    let poly = IntPolynomial::new(coeffs)?;
    let d = parse_int(&a.d)?;
    let target = match a.target {
        Some(t) => t,
        None => poly
            .roots_f64()
            .iter()
            .filter(|z| z.im.abs() < 1e-9 * z.re.abs().max(1.0))
            .map(|z| z.re)
            .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |m| m.max(x))))
            .ok_or_else(|| Failure::Recognition("polynomial has no real root".into()))?,
    };
    let value = quartic_to_nested_radical(&poly, &d, target)?;
    let result = json!({
        "polynomial": poly.render("y"),
        "form": value.to_string(),
        "value": value.report(a.digits)?,
    });
    emit(a.out.as_deref(), &cfg.wrap(&result))
}

fn fit(a: &FitArgs) -> Result<(), Failure> {
    let cfg = RunConfig::new("recognize fit", a);
    let points = read_points_csv(read(&a.points)?.as_slice())?;
    let report = match a.rescale {
        Some(m) => rescale_scan(&points, m, a.max_degree)?,
        None => fit_int_poly(&points, a.max_degree)?,
    };
    let mut result = serde_json::to_value(&report).expect("report serializes");
    result["polynomial"] = json!(report.polynomial.render("x"));
    emit(a.out.as_deref(), &cfg.wrap(&result))
}

fn strategy(a: &StrategyArgs) -> Result<(), Failure> {
    let cfg = RunConfig::new("strategy", a);
    let n = parse_count(&a.n)?;
    if !(a.p_min > 0.0 && a.p_max < 0.5 && a.p_min <= a.p_max) {
        return Err(Failure::Usage(format!("need 0 < p-min <= p-max < 1/2, got [{}, {}]", a.p_min, a.p_max)));
    }
    let rows = strategy_table(&linspace(a.p_min, a.p_max, a.points), n)?;
    let mut buf = cfg.csv_preamble().into_bytes();
    write_strategy_csv(&rows, &mut buf)?;
    emit(a.out.as_deref(), &String::from_utf8(buf).expect("csv is utf-8"))
}

fn plot_histogram(a: &PlotHistogramArgs) -> Result<(), Failure> {
    let cfg = RunConfig::new("plot histogram", a);
    let hist = Histogram::read_csv(read(&a.hist)?.as_slice())?;
    let pmf = PredictionTable::read_csv(read(&a.pmf)?.as_slice())?;
    if hist.is_empty() {
        return Err(Failure::Usage("histogram is empty".into()));
    }
    let bars = hist.counts.keys().map(|&m| (m as f64, hist.frequency(m))).collect();
    let (lo, hi) = (*hist.counts.keys().next().unwrap(), *hist.counts.keys().last().unwrap());
    let markers = pmf
        .rows
        .iter()
        .filter(|r| r.m + 1 >= lo && r.m <= hi + 1 && (r.pmf >= 1e-4 || hist.count(r.m) > 0))
        .map(|r| (r.m as f64, r.pmf))
        .collect();
    let spec = ChartSpec {
        kind: ChartKind::HistogramOverlay { bars, markers },
        title: a.title.clone().unwrap_or_else(|| "Maximum queue length".into()),
        x_label: "maximum queue length m".into(),
        y_label: "probability".into(),
        metadata: cfg.to_json(),
    };
    emit(Some(&a.out), &render_chart(&spec)?)
}

fn plot_strategy(a: &PlotStrategyArgs) -> Result<(), Failure> {
    let cfg = RunConfig::new("plot strategy", a);
    let rows = read_strategy_csv(read(&a.table)?.as_slice())?;
    let x = rows.iter().map(|r| r.p).collect();
    let series = (0..4).map(|i| (format!("E{i}"), rows.iter().map(|r| r.expected[i]).collect())).collect();
    let spec = ChartSpec {
        kind: ChartKind::LineFamily { x, series },
        title: a.title.clone().unwrap_or_else(|| "Expected maximum by light strategy".into()),
        x_label: "arrival probability p".into(),
        y_label: "expected maximum".into(),
        metadata: cfg.to_json(),
    };
    emit(Some(&a.out), &render_chart(&spec)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_accept_scientific_notation() {
        assert_eq!(parse_count("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_count("2.5e3").unwrap(), 2500);
        assert_eq!(parse_count("1000").unwrap(), 1000);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("0").is_err());
        assert!(parse_count("-3").is_err());
        assert!(parse_count("1e30").is_err());
    }
}
