use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use cirminus::calibration::{
    calibrate as run_calibration, CalibrationOptions, CalibrationResult, CalibrationTarget, StartPoint, TargetConfig,
    TargetSelector,
};
use cirminus::gram_charlier::{gc_price, DEFAULT_ORDERS};
use cirminus::products::{
    cms_par_rate, lsmc_bermudan, BermudanSpec, CmsSpec, LsmcOptions, RegressionBasis, PAYOFF_CONVENTION,
};
use cirminus::simulation::{mc_swaption, mc_zcb, simulate as run_simulation, PathSet, SimulationConfig};
use cirminus::stats::Estimate;
use cirminus::{
    DiscountCurve, ModelParams, Schedule, ShiftedModel, SwapSpec, SwapType, SwaptionQuote, SwaptionSurface,
};

use crate::args::RunArgs;
use crate::output::{ensure_dir, write_json, Cell, Table};
use crate::Status;

/// CMS rows priced when no request file is given.
const DEFAULT_CMS: [(f64, usize, usize); 9] = [
    (0.0, 5, 5),
    (0.0, 10, 5),
    (0.0, 5, 10),
    (0.0, 10, 10),
    (3.0, 5, 5),
    (3.0, 5, 10),
    (5.0, 10, 5),
    (5.0, 5, 5),
    (5.0, 5, 10),
];

fn out_dir(args: &RunArgs) -> anyhow::Result<PathBuf> {
    let dir = RunArgs::require(&args.out, "out")?.clone();
    ensure_dir(&dir)?;
    Ok(dir)
}

fn load_curve(args: &RunArgs) -> anyhow::Result<Arc<DiscountCurve>> {
    let path = RunArgs::require(&args.curve, "curve")?;
    let curve = DiscountCurve::load(path).with_context(|| format!("loading curve {}", path.display()))?;
    Ok(Arc::new(curve))
}

fn load_surface(args: &RunArgs, curve: &DiscountCurve) -> anyhow::Result<SwaptionSurface> {
    let path = RunArgs::require(&args.surface, "surface")?;
    SwaptionSurface::load(path, swap_type(args), Some(curve))
        .with_context(|| format!("loading surface {}", path.display()))
}

fn swap_type(args: &RunArgs) -> SwapType {
    args.swap_type.unwrap_or(SwapType::Payer)
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    reader
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .with_context(|| format!("reading {}", path.display()))
}

fn target_config(args: &RunArgs) -> TargetConfig {
    let selector = match (args.tenor, args.diagonal) {
        (Some(tenor), _) => TargetSelector::Column { tenor },
        (None, Some(end)) => TargetSelector::Diagonal { end },
        (None, None) => TargetSelector::Column { tenor: 5.0 },
    };
    let mut cfg = TargetConfig::column(5.0);
    cfg.selector = selector;
    if let Some(m) = args.min_maturity {
        cfg.min_maturity = m;
    }
    if let Some(m) = args.max_maturity {
        cfg.max_maturity = m;
    }
    cfg.drop_last_maturity = args.drop_last_maturity;
    cfg
}

fn calibration_options(args: &RunArgs) -> anyhow::Result<CalibrationOptions> {
    let mut options = CalibrationOptions::default();
    if let Some(starts) = &args.start {
        options.starts = starts
            .iter()
            .map(|s| s.parse::<StartPoint>())
            .collect::<Result<_, _>>()?;
    }
    if let Some(n) = args.random_starts {
        options.random_starts = n;
    }
    options.seed = args.seed.unwrap_or(0);
    if let Some(n) = args.max_evaluations {
        options.optimizer.max_evaluations = n;
    }
    Ok(options)
}

fn write_calibration(dir: &Path, result: &CalibrationResult) -> anyhow::Result<()> {
    write_json(&dir.join("calibration.json"), result)?;
    let orders = &result.orders;
    let mut header: Vec<String> = ["maturity", "tenor", "strike", "market"].map(String::from).to_vec();
    header.extend(orders.iter().map(|l| format!("gc{l}")));
    header.extend(orders.iter().map(|l| format!("rel_err_gc{l}")));
    let mut table = Table::new(header);
    for q in &result.quotes {
        let mut row: Vec<Cell> = vec![q.maturity.into(), q.tenor.into(), q.strike.into(), q.market.into()];
        row.extend(q.model.iter().map(|(_, p)| Cell::from(*p)));
        row.extend(q.relative_error.iter().map(|(_, e)| Cell::from(*e)));
        table.push(row);
    }
    table.write(dir, "calibration_quotes")
}

fn calibrate_to_surface(args: &RunArgs, curve: &Arc<DiscountCurve>, dir: &Path) -> anyhow::Result<CalibrationResult> {
    let surface = load_surface(args, curve)?;
    let orders = args.orders.clone().unwrap_or(DEFAULT_ORDERS.to_vec());
    let target = CalibrationTarget::from_surface(&surface, &target_config(args), &orders)?;
    let result = run_calibration(&target, curve, &calibration_options(args)?)?;
    log::info!(
        "calibrated {} quotes: objective {:e} after {} evaluations (converged: {})",
        target.quotes.len(),
        result.objective,
        result.evaluations,
        result.converged
    );
    write_calibration(dir, &result)?;
    Ok(result)
}

/// Parses `--params`: a JSON file (calibration result or bare array) or eight
/// comma-separated numbers.
pub fn parse_params(spec: &str) -> anyhow::Result<ModelParams> {
    let path = Path::new(spec);
    let values: Vec<f64> = if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        let json: serde_json::Value =
            serde_json::from_str(&text).with_context(|| format!("parsing parameters {}", path.display()))?;
        let array = json.get("params").unwrap_or(&json);
        serde_json::from_value(array.clone()).with_context(|| format!("{}: expected eight numbers", path.display()))?
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("--params {spec:?} is neither a file nor a list of numbers"))?
    };
    let pi: [f64; 8] = values
        .try_into()
        .map_err(|v: Vec<f64>| anyhow::anyhow!("expected 8 parameters, got {}", v.len()))?;
    Ok(ModelParams::new(pi)?)
}

fn model(args: &RunArgs, curve: &Arc<DiscountCurve>, dir: &Path) -> anyhow::Result<(ShiftedModel, Status)> {
    let (params, status) = match &args.params {
        Some(spec) => (parse_params(spec)?, Status::Ok),
        None => {
            log::info!("no --params given; calibrating first");
            let result = calibrate_to_surface(args, curve, dir)?;
            let status = if result.converged {
                Status::Ok
            } else {
                Status::NotConverged
            };
            (result.params, status)
        }
    };
    Ok((ShiftedModel::new(params, curve.clone()), status))
}

fn simulation(args: &RunArgs, model: &ShiftedModel, horizon: f64, observe: Vec<f64>) -> anyhow::Result<PathSet> {
    let mut cfg = SimulationConfig::new(
        args.paths.unwrap_or(10_000),
        args.mesh.unwrap_or(256),
        horizon,
        args.seed.unwrap_or(0),
    );
    cfg.observe = observe;
    log::info!(
        "simulating {} paths to {horizon}y at {} steps/year",
        cfg.paths,
        cfg.steps_per_year
    );
    Ok(run_simulation(model, &cfg)?)
}

pub fn calibrate(args: &RunArgs) -> anyhow::Result<Status> {
    let dir = out_dir(args)?;
    let curve = load_curve(args)?;
    let result = calibrate_to_surface(args, &curve, &dir)?;
    Ok(if result.converged {
        Status::Ok
    } else {
        Status::NotConverged
    })
}

fn price_quotes(args: &RunArgs, surface: &SwaptionSurface) -> anyhow::Result<Vec<SwaptionQuote>> {
    let lo = args.min_maturity.unwrap_or(0.0);
    let hi = args.max_maturity.unwrap_or(f64::INFINITY);
    let quotes = match (args.tenor, args.diagonal) {
        (Some(tenor), _) => surface.column(tenor, lo, hi),
        (None, Some(end)) => surface.diagonal(end, lo, hi),
        (None, None) => surface
            .quotes()
            .iter()
            .filter(|q| q.maturity >= lo && q.maturity <= hi)
            .cloned()
            .collect(),
    };
    if quotes.is_empty() {
        bail!("no quotes selected");
    }
    Ok(quotes)
}

#[derive(Serialize)]
struct PriceRow {
    maturity: f64,
    tenor: f64,
    strike: f64,
    market: f64,
    gc: Vec<(usize, f64)>,
    mc: Option<Estimate>,
}

#[derive(Serialize)]
struct PriceReport<'a> {
    params: ModelParams,
    swap_type: SwapType,
    orders: &'a [usize],
    rows: Vec<PriceRow>,
    /// Mean `|MC - GC(L)|` per order when Monte Carlo was run.
    mean_abs_mc_error: Vec<(usize, f64)>,
}

pub fn price(args: &RunArgs) -> anyhow::Result<Status> {
    let dir = out_dir(args)?;
    let curve = load_curve(args)?;
    let surface = load_surface(args, &curve)?;
    let quotes = price_quotes(args, &surface)?;
    let (model, status) = model(args, &curve, &dir)?;
    let mut orders = args.orders.clone().unwrap_or(DEFAULT_ORDERS.to_vec());
    orders.sort_unstable();
    orders.dedup();
    let state = (model.params.x0, model.params.y0);

    let specs: Vec<SwapSpec> = quotes.iter().map(|q| q.swap_spec()).collect::<Result<_, _>>()?;
    let gc = specs
        .par_iter()
        .map(|spec| gc_price(&model, spec, 0.0, state, &orders))
        .collect::<Result<Vec<_>, _>>()?;
    let mc: Option<Vec<Estimate>> = if args.mc {
        let observe: Vec<f64> = quotes.iter().map(|q| q.maturity).collect();
        let horizon = observe.iter().copied().fold(0.0, f64::max);
        let paths = simulation(args, &model, horizon, observe)?;
        Some(
            specs
                .iter()
                .map(|s| mc_swaption(&paths, &model, s))
                .collect::<Result<_, _>>()?,
        )
    } else {
        None
    };

    let mut header: Vec<String> = ["maturity", "tenor", "strike", "market"].map(String::from).to_vec();
    header.extend(orders.iter().map(|l| format!("gc{l}")));
    if mc.is_some() {
        header.extend(["mc", "mc_se"].map(String::from));
        header.extend(orders.iter().map(|l| format!("abs_err_gc{l}")));
    }
    let mut table = Table::new(header);
    let mut rows = Vec::new();
    let mut err_sums = vec![0.0; orders.len()];
    for (i, q) in quotes.iter().enumerate() {
        let prices: Vec<(usize, f64)> = orders
            .iter()
            .map(|&l| (l, gc[i].at_order(l).unwrap_or(f64::NAN)))
            .collect();
        let mut row: Vec<Cell> = vec![q.maturity.into(), q.tenor.into(), q.strike.into(), q.price.into()];
        row.extend(prices.iter().map(|&(_, p)| Cell::from(p)));
        let est = mc.as_ref().map(|m| m[i]);
        if let Some(e) = est {
            row.extend([Cell::Num(e.value), Cell::Num(e.std_error)]);
            for (k, &(_, p)) in prices.iter().enumerate() {
                let err = (e.value - p).abs();
                err_sums[k] += err;
                row.push(err.into());
            }
        }
        table.push(row);
        rows.push(PriceRow {
            maturity: q.maturity,
            tenor: q.tenor,
            strike: q.strike,
            market: q.price,
            gc: prices,
            mc: est,
        });
    }
    table.write(&dir, "prices")?;
    let mean_abs_mc_error = if mc.is_some() {
        orders
            .iter()
            .zip(&err_sums)
            .map(|(&l, s)| (l, s / quotes.len() as f64))
            .collect()
    } else {
        Vec::new()
    };
    write_json(
        &dir.join("prices.json"),
        &PriceReport {
            params: model.params,
            swap_type: swap_type(args),
            orders: &orders,
            rows,
            mean_abs_mc_error,
        },
    )?;
    Ok(status)
}

#[derive(Deserialize)]
struct CmsRequest {
    effective_years: f64,
    tenor_years: usize,
    index_years: usize,
}

#[derive(Deserialize)]
struct CmsReference {
    effective_years: f64,
    tenor_years: usize,
    index_years: usize,
    reference: f64,
}

#[derive(Serialize)]
struct CmsRow {
    effective: f64,
    tenor: usize,
    index: usize,
    reference: Option<f64>,
    rate: Estimate,
    denominator: f64,
    abs_error: Option<f64>,
}

pub fn cms(args: &RunArgs) -> anyhow::Result<Status> {
    let dir = out_dir(args)?;
    let curve = load_curve(args)?;
    let requests: Vec<(f64, usize, usize)> = match &args.requests {
        Some(path) => read_csv::<CmsRequest>(path)?
            .into_iter()
            .map(|r| (r.effective_years, r.tenor_years, r.index_years))
            .collect(),
        None => DEFAULT_CMS.to_vec(),
    };
    let specs: Vec<CmsSpec> = requests
        .iter()
        .map(|&(e, t, c)| CmsSpec::new(e, t, c, SwapType::Payer))
        .collect::<Result<_, _>>()?;
    if specs.is_empty() {
        bail!("no CMS requests");
    }
    let references: Vec<CmsReference> = match &args.reference {
        Some(path) => read_csv(path)?,
        None => Vec::new(),
    };
    let (model, status) = model(args, &curve, &dir)?;
    let horizon = specs.iter().map(CmsSpec::last_index_date).fold(0.0, f64::max);
    let paths = simulation(args, &model, horizon, Vec::new())?;

    let mut table = Table::new([
        "effective",
        "tenor",
        "index",
        "reference",
        "model",
        "mc_se",
        "abs_error",
    ]);
    let mut rows = Vec::new();
    for spec in &specs {
        let result = cms_par_rate(&model, &paths, spec)?;
        let reference = references
            .iter()
            .find(|r| r.effective_years == spec.effective && r.tenor_years == spec.tenor && r.index_years == spec.index)
            .map(|r| r.reference);
        let abs_error = reference.map(|r| (r - result.rate.value).abs());
        table.push(vec![
            spec.effective.into(),
            spec.tenor.into(),
            spec.index.into(),
            reference.into(),
            result.rate.value.into(),
            result.rate.std_error.into(),
            abs_error.into(),
        ]);
        rows.push(CmsRow {
            effective: spec.effective,
            tenor: spec.tenor,
            index: spec.index,
            reference,
            rate: result.rate,
            denominator: result.denominator,
            abs_error,
        });
    }
    table.write(&dir, "cms")?;
    write_json(&dir.join("cms.json"), &rows)?;
    Ok(status)
}

#[derive(Deserialize)]
struct BermudanRequest {
    maturity_years: f64,
    tenor_years: usize,
    strike: f64,
}

#[derive(Deserialize)]
struct BermudanReference {
    maturity_years: f64,
    tenor_years: usize,
    reference: f64,
}

#[derive(Serialize)]
struct BermudanRow {
    maturity: f64,
    tenor: usize,
    strike: f64,
    price: Estimate,
    /// European swaption with the same exercise value at `T_0`.
    european: Estimate,
    reference: Option<f64>,
    abs_error: Option<f64>,
    rank_deficient_dates: Vec<f64>,
}

#[derive(Serialize)]
struct BermudanReport {
    convention: &'static str,
    swap_type: SwapType,
    options: LsmcOptions,
    rows: Vec<BermudanRow>,
}

pub fn bermudan(args: &RunArgs) -> anyhow::Result<Status> {
    let dir = out_dir(args)?;
    let curve = load_curve(args)?;
    let requests: Vec<BermudanRequest> = read_csv(RunArgs::require(&args.strikes, "strikes")?)?;
    if requests.is_empty() {
        bail!("no Bermudan strikes given");
    }
    let swap_type = swap_type(args);
    let specs: Vec<BermudanSpec> = requests
        .iter()
        .map(|r| BermudanSpec::new(r.maturity_years, r.tenor_years, r.strike, swap_type))
        .collect::<Result<_, _>>()?;
    let references: Vec<BermudanReference> = match &args.reference {
        Some(path) => read_csv(path)?,
        None => Vec::new(),
    };
    let options = LsmcOptions {
        basis: RegressionBasis::new(args.degree.unwrap_or(3))?,
        regress_all: args.regress_all,
    };
    let (model, status) = model(args, &curve, &dir)?;
    let horizon = specs
        .iter()
        .map(|s| s.first_exercise + s.tenor as f64)
        .fold(0.0, f64::max);
    let paths = simulation(args, &model, horizon, Vec::new())?;
    log::info!("{PAYOFF_CONVENTION}");

    let mut table = Table::new([
        "maturity",
        "tenor",
        "strike",
        "model",
        "mc_se",
        "european",
        "reference",
        "abs_error",
    ]);
    let mut rows = Vec::new();
    for spec in &specs {
        let result = lsmc_bermudan(&model, &paths, spec, &options)?;
        let swap = SwapSpec::new(
            Schedule::annual(spec.first_exercise, spec.tenor)?,
            spec.strike,
            spec.swap_type.flipped(),
        );
        let european = mc_swaption(&paths, &model, &swap)?;
        let reference = references
            .iter()
            .find(|r| r.maturity_years == spec.first_exercise && r.tenor_years == spec.tenor)
            .map(|r| r.reference);
        let abs_error = reference.map(|r| (r - result.price.value).abs());
        table.push(vec![
            spec.first_exercise.into(),
            spec.tenor.into(),
            spec.strike.into(),
            result.price.value.into(),
            result.price.std_error.into(),
            european.value.into(),
            reference.into(),
            abs_error.into(),
        ]);
        rows.push(BermudanRow {
            maturity: spec.first_exercise,
            tenor: spec.tenor,
            strike: spec.strike,
            price: result.price,
            european,
            reference,
            abs_error,
            rank_deficient_dates: result.rank_deficient_dates,
        });
    }
    table.write(&dir, "bermudan")?;
    write_json(
        &dir.join("bermudan.json"),
        &BermudanReport {
            convention: PAYOFF_CONVENTION,
            swap_type,
            options,
            rows,
        },
    )?;
    Ok(status)
}

#[derive(Serialize)]
struct ObservationSummary {
    t: f64,
    x: Estimate,
    y: Estimate,
    bond: Estimate,
    curve: f64,
}

pub fn simulate(args: &RunArgs) -> anyhow::Result<Status> {
    let dir = out_dir(args)?;
    let curve = load_curve(args)?;
    let (model, status) = model(args, &curve, &dir)?;
    let paths = simulation(args, &model, args.horizon.unwrap_or(1.0), Vec::new())?;
    paths.write_csv(&dir)?;
    let summary = paths
        .times()
        .iter()
        .enumerate()
        .map(|(obs, &t)| {
            Ok(ObservationSummary {
                t,
                x: Estimate::from_samples(paths.x(obs)),
                y: Estimate::from_samples(paths.y(obs)),
                bond: mc_zcb(&paths, &model, t)?,
                curve: curve.discount(t)?,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    write_json(&dir.join("simulation.json"), &summary)?;
    Ok(status)
}
