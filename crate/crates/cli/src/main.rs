//! Command-line frontend: ingest a CSV panel, transform columns, then
//! correlate, regress, unit-root test, and estimate/decompose VARs, emitting
//! text, CSV or JSON tables.
//!
//! Exit codes: 0 success, 1 completed-with-findings (unresolved integration
//! order), 2 configuration error, 3 data error, 4 numerical error.

mod config;

use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{build_dataset, ConfigFile};
use tsecon::csv_io::load_csv;
use tsecon::macrofin::{
    bonanza_table, classify_depth, detect_bonanza, Openness, SignConvention,
};
use tsecon::regress::{absolute_size, dynamic_regression, feldstein_horioka};
use tsecon::series::{Dataset, Frequency};
use tsecon::stats::corr_matrix;
use tsecon::table::{Locale, Table};
use tsecon::unitroot::{integration_order, unitroot_table, Deterministic, LagSpec};
use tsecon::varkit::{
    companion_roots, fevd, fevd_table, granger_matrix, granger_table, lag_select,
    lag_selection_table, lm_serial_test, lm_table, var_estimate,
};
use tsecon::{Error, ErrorClass};

#[derive(Parser)]
#[command(
    name = "tsecon",
    version,
    about = "Time-series econometrics: correlation, dynamic OLS, unit roots, VAR, Granger causality, variance decomposition"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Input CSV file (header row, one date column)
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Name of the date column [default: date]
    #[arg(long, global = true)]
    date_col: Option<String>,
    /// Data frequency: monthly | quarterly | annual [default: monthly]
    #[arg(long, global = true)]
    freq: Option<String>,
    /// Output format: text | csv | json [default: text]
    #[arg(long, global = true)]
    format: Option<String>,
    /// Decimal separator for text output: point | comma [default: point]
    #[arg(long, global = true)]
    locale: Option<String>,
    /// Seed reserved for stochastic validation utilities
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Key-value config file; command-line flags win on conflict
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Correlation matrix with significance stars
    Corr {
        /// Comma-separated variable specs (ALIAS=COL:transform...)
        #[arg(long)]
        vars: Option<String>,
        /// Significance level
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Regression models
    Regress {
        #[command(subcommand)]
        model: RegressCmd,
    },
    /// Augmented Dickey-Fuller unit-root tests with integration orders
    Adf {
        #[arg(long)]
        vars: Option<String>,
        /// Deterministic terms: none | c | ct [default: ct]
        #[arg(long)]
        deterministic: Option<String>,
        /// Augmentation lags (number) or "auto" [default: auto]
        #[arg(long)]
        lags: Option<String>,
        /// Highest differencing depth to try [default: 2]
        #[arg(long)]
        max_diff: Option<usize>,
        /// Comma-separated series treated as stationary without testing
        #[arg(long)]
        assume_stationary: Option<String>,
    },
    /// VAR estimation and analysis
    Var {
        #[command(subcommand)]
        action: VarCmd,
    },
    /// Financial-depth tier classification
    Classify {
        /// Bank credit to the private sector, percent of GDP
        #[arg(long)]
        credit_gdp: f64,
        /// Liquid liabilities, percent of GDP
        #[arg(long)]
        liquid_gdp: f64,
        /// Credit to deposits, percent
        #[arg(long)]
        credit_deposits: Option<f64>,
    },
    /// Capital-bonanza detection on a current-account series
    Bonanza {
        /// Current-account column
        #[arg(long = "var")]
        var_name: Option<String>,
        /// Sign convention: deficit-negative | deficit-positive
        #[arg(long)]
        sign: Option<String>,
        /// Bonanza threshold, percent of GDP
        #[arg(long)]
        threshold: Option<f64>,
        /// Threshold preset: closed (2%) | open (6.6%)
        #[arg(long)]
        openness: Option<String>,
    },
}

#[derive(Subcommand)]
enum RegressCmd {
    /// y on regressors plus its own lag, with the |γ₂| < 1 stability check
    Dynamic {
        #[arg(long)]
        y: String,
        /// Comma-separated regressor specs
        #[arg(long)]
        x: String,
    },
    /// Feldstein-Horioka saving-retention regression
    Fh {
        /// Investment-rate column (percent of GDP)
        #[arg(long)]
        inv: String,
        /// Saving-rate column (percent of GDP)
        #[arg(long)]
        sav: String,
        /// Drop the constant
        #[arg(long)]
        no_intercept: bool,
    },
    /// Absolute financial size: GDP per capita on credit, depth and own lag
    Size {
        #[arg(long)]
        y: String,
        #[arg(long)]
        credit: String,
        #[arg(long)]
        depth: String,
    },
}

#[derive(Subcommand)]
enum VarCmd {
    /// Lag-order selection criteria table
    Select {
        #[arg(long)]
        vars: Option<String>,
        #[arg(long)]
        max_lags: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Estimate the VAR and report companion-root stability
    Fit {
        #[arg(long)]
        vars: Option<String>,
        #[arg(long)]
        lags: Option<usize>,
        /// Also run the residual serial-correlation LM test up to this lag
        #[arg(long)]
        lm_lags: Option<usize>,
    },
    /// All-pairs Granger causality table
    Granger {
        #[arg(long)]
        vars: Option<String>,
        #[arg(long)]
        lags: Option<usize>,
    },
    /// Forecast-error variance decomposition of one variable
    Fevd {
        #[arg(long)]
        vars: Option<String>,
        #[arg(long)]
        lags: Option<usize>,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        horizons: Option<usize>,
        /// Cholesky ordering: permutation of the selected variables
        #[arg(long)]
        ordering: Option<String>,
    },
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArg(format!("unknown format {other:?}"))),
        }
    }
}

/// Resolved global options.
struct Ctx {
    cfg: ConfigFile,
    input: Option<PathBuf>,
    date_col: String,
    freq: Frequency,
    format: Format,
    locale: Locale,
}

impl Ctx {
    fn resolve(global: &GlobalArgs) -> Result<Ctx, Error> {
        let cfg = match &global.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let input = global
            .input
            .clone()
            .or_else(|| cfg.get("input").map(PathBuf::from));
        let date_col = cfg
            .merge(global.date_col.as_deref(), "date-col")
            .unwrap_or("date")
            .to_string();
        let freq: Frequency = cfg.merge(global.freq.as_deref(), "freq").unwrap_or("monthly").parse()?;
        let format: Format = cfg.merge(global.format.as_deref(), "format").unwrap_or("text").parse()?;
        let locale: Locale = cfg.merge(global.locale.as_deref(), "locale").unwrap_or("point").parse()?;
        Ok(Ctx { cfg, input, date_col, freq, format, locale })
    }

    fn load_input(&self) -> Result<Dataset, Error> {
        let path = self
            .input
            .as_ref()
            .ok_or_else(|| Error::InvalidArg("--input is required for this command".into()))?;
        load_csv(path, &self.date_col, self.freq)
    }

    /// Flag value, else config-file value parsed to the flag's type.
    fn option<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Error>
    where
        T: FromStr,
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self
                .cfg
                .get(key)
                .map(|raw| {
                    raw.parse::<T>()
                        .map_err(|e| Error::InvalidArg(format!("config {key}: {e}")))
                })
                .transpose(),
        }
    }

    fn emit(&self, table: &Table, json: serde_json::Value) {
        match self.format {
            Format::Text => print!("{}", table.to_text(self.locale)),
            Format::Csv => print!("{}", table.to_csv()),
            Format::Json => {
                println!("{}", serde_json::to_string_pretty(&json).expect("serializable"))
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err.class() {
                ErrorClass::Config => 2,
                ErrorClass::Data => 3,
                ErrorClass::Numerical => 4,
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Error> {
    let ctx = Ctx::resolve(&cli.global)?;
    match cli.command {
        Command::Corr { vars, alpha } => cmd_corr(&ctx, vars, alpha),
        Command::Regress { model } => cmd_regress(&ctx, model),
        Command::Adf { vars, deterministic, lags, max_diff, assume_stationary } => {
            cmd_adf(&ctx, vars, deterministic, lags, max_diff, assume_stationary)
        }
        Command::Var { action } => cmd_var(&ctx, action),
        Command::Classify { credit_gdp, liquid_gdp, credit_deposits } => {
            let profile = classify_depth(credit_gdp, liquid_gdp, credit_deposits)?;
            ctx.emit(&profile.to_table(), serde_json::to_value(&profile).expect("json"));
            Ok(0)
        }
        Command::Bonanza { var_name, sign, threshold, openness } => {
            cmd_bonanza(&ctx, var_name, sign, threshold, openness)
        }
    }
}

/// Resolves a spec expected to name exactly one series.
fn single_series(
    raw: &Dataset,
    spec: &str,
    freq: Frequency,
) -> Result<tsecon::series::TimeSeries, Error> {
    let d = build_dataset(raw, Some(spec), freq)?;
    if d.n_series() != 1 {
        return Err(Error::InvalidArg(format!(
            "expected one series, got {} from {spec:?}",
            d.n_series()
        )));
    }
    Ok(d.series()[0].clone())
}

fn cmd_corr(ctx: &Ctx, vars: Option<String>, alpha: Option<f64>) -> Result<i32, Error> {
    let raw = ctx.load_input()?;
    let vars = ctx.option(vars, "vars")?;
    let alpha = ctx.option(alpha, "alpha")?.unwrap_or(0.05);
    let d = build_dataset(&raw, vars.as_deref(), ctx.freq)?;
    let m = corr_matrix(&d, alpha)?;
    ctx.emit(&m.to_table(), serde_json::to_value(&m).expect("json"));
    Ok(0)
}

fn cmd_regress(ctx: &Ctx, model: RegressCmd) -> Result<i32, Error> {
    let raw = ctx.load_input()?;
    match model {
        RegressCmd::Dynamic { y, x } => {
            let yv = single_series(&raw, &y, ctx.freq)?;
            let xv = build_dataset(&raw, Some(&x), ctx.freq)?;
            let fit = dynamic_regression(&yv, &xv)?;
            ctx.emit(
                &fit.to_table("Régression dynamique"),
                serde_json::to_value(&fit).expect("json"),
            );
            Ok(0)
        }
        RegressCmd::Fh { inv, sav, no_intercept } => {
            let iv = single_series(&raw, &inv, ctx.freq)?;
            let sv = single_series(&raw, &sav, ctx.freq)?;
            let fh = feldstein_horioka(&iv, &sv, !no_intercept)?;
            let json = json!({
                "fit": fh.fit,
                "retention": fh.retention,
                "foreign_share": fh.foreign_share,
                "interpretation": fh.interpretation(),
            });
            ctx.emit(&fh.to_table(), json);
            Ok(0)
        }
        RegressCmd::Size { y, credit, depth } => {
            let yv = single_series(&raw, &y, ctx.freq)?;
            let cv = single_series(&raw, &credit, ctx.freq)?;
            let dv = single_series(&raw, &depth, ctx.freq)?;
            let fit = absolute_size(&yv, &cv, &dv)?;
            ctx.emit(
                &fit.to_table("Estimation de la taille absolue du système financier"),
                serde_json::to_value(&fit).expect("json"),
            );
            Ok(0)
        }
    }
}

fn cmd_adf(
    ctx: &Ctx,
    vars: Option<String>,
    deterministic: Option<String>,
    lags: Option<String>,
    max_diff: Option<usize>,
    assume_stationary: Option<String>,
) -> Result<i32, Error> {
    let raw = ctx.load_input()?;
    let vars = ctx.option(vars, "vars")?;
    let max_diff = ctx.option(max_diff, "max-diff")?.unwrap_or(2);
    let deterministic: Deterministic = ctx
        .option(deterministic, "deterministic")?
        .unwrap_or_else(|| "ct".to_string())
        .parse()?;
    let lag_spec = match ctx.option(lags, "lags")?.as_deref() {
        None | Some("auto") => LagSpec::Auto,
        Some(n) => LagSpec::Fixed(
            n.parse::<usize>()
                .map_err(|_| Error::InvalidArg(format!("bad lag count {n:?}")))?,
        ),
    };
    let assumed: Vec<String> = ctx
        .option(assume_stationary, "assume-stationary")?
        .map(|s| s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect())
        .unwrap_or_default();

    let d = build_dataset(&raw, vars.as_deref(), ctx.freq)?;
    for name in &assumed {
        d.get(name)?;
    }

    let mut results = Vec::new();
    for s in d.series() {
        if assumed.contains(&s.name().to_string()) {
            continue;
        }
        // Trim missing edges so the test sees a complete span.
        let complete = Dataset::new(vec![s.clone()])?.align(true)?.dataset;
        results.push(integration_order(&complete.series()[0], max_diff, deterministic, lag_spec)?);
    }

    let table = unitroot_table(&results, &assumed);
    let json = json!({ "results": results, "assumed": assumed });
    ctx.emit(&table, json);

    // Completed, but flag unresolved orders with a distinct success code.
    if results.iter().any(|r| r.order.is_none()) {
        Ok(1)
    } else {
        Ok(0)
    }
}

fn cmd_var(ctx: &Ctx, action: VarCmd) -> Result<i32, Error> {
    let raw = ctx.load_input()?;
    match action {
        VarCmd::Select { vars, max_lags, alpha } => {
            let vars = ctx.option(vars, "vars")?;
            let max_lags = ctx.option(max_lags, "max-lags")?.unwrap_or(8);
            let alpha = ctx.option(alpha, "alpha")?.unwrap_or(0.05);
            let d = build_dataset(&raw, vars.as_deref(), ctx.freq)?.align(true)?.dataset;
            let s = lag_select(&d, max_lags, alpha)?;
            ctx.emit(&lag_selection_table(&s), serde_json::to_value(&s).expect("json"));
            Ok(0)
        }
        VarCmd::Fit { vars, lags, lm_lags } => {
            let vars = ctx.option(vars, "vars")?;
            let lags = ctx.option(lags, "lags")?.unwrap_or(1);
            let lm_lags = ctx.option(lm_lags, "lm-lags")?;
            let d = build_dataset(&raw, vars.as_deref(), ctx.freq)?.align(true)?.dataset;
            let model = var_estimate(&d, lags)?;
            let (roots, stable) = companion_roots(&model);
            let mut table = model.to_table();
            table.push_note(if stable {
                "Stabilité : les racines sont dans le cercle unité.".to_string()
            } else {
                "ATTENTION : racines hors du cercle unité, modèle instable.".to_string()
            });
            for r in &roots {
                table.push_note(format!(
                    "racine {:.4} {} {:.4}i  (module {:.4})",
                    r.re,
                    if r.im >= 0.0 { "+" } else { "-" },
                    r.im.abs(),
                    r.norm()
                ));
            }
            let lm = match lm_lags {
                Some(h) => Some(lm_serial_test(&model, h)?),
                None => None,
            };
            let json = json!({
                "model": model,
                "roots": roots.iter().map(|r| json!({"re": r.re, "im": r.im, "modulus": r.norm()})).collect::<Vec<_>>(),
                "stable": stable,
                "lm_test": lm,
            });
            ctx.emit(&table, json);
            if let Some(test) = &lm {
                if ctx.format == Format::Text {
                    print!("\n{}", lm_table(test).to_text(ctx.locale));
                }
            }
            Ok(0)
        }
        VarCmd::Granger { vars, lags } => {
            let vars = ctx.option(vars, "vars")?;
            let lags = ctx.option(lags, "lags")?.unwrap_or(1);
            let d = build_dataset(&raw, vars.as_deref(), ctx.freq)?;
            let m = granger_matrix(&d, lags)?;
            ctx.emit(&granger_table(&m), serde_json::to_value(&m).expect("json"));
            Ok(0)
        }
        VarCmd::Fevd { vars, lags, target, horizons, ordering } => {
            let vars = ctx.option(vars, "vars")?;
            let lags = ctx.option(lags, "lags")?.unwrap_or(1);
            let horizons = ctx.option(horizons, "horizons")?.unwrap_or(18);
            let target = ctx
                .option(target, "target")?
                .ok_or_else(|| Error::InvalidArg("--target is required".into()))?;
            let ordering = ctx.option(ordering, "ordering")?;

            let mut d = build_dataset(&raw, vars.as_deref(), ctx.freq)?.align(true)?.dataset;
            if let Some(order_spec) = ordering {
                let wanted: Vec<String> =
                    order_spec.split(',').map(|s| s.trim().to_string()).collect();
                let mut sorted_wanted = wanted.clone();
                sorted_wanted.sort();
                let mut names = d.names();
                names.sort();
                if sorted_wanted != names {
                    return Err(Error::InvalidArg(format!(
                        "--ordering must be a permutation of the selected variables ({})",
                        d.names().join(", ")
                    )));
                }
                d = d.select(&wanted)?;
            }
            let model = var_estimate(&d, lags)?;
            let (_, stable) = companion_roots(&model);
            let f = fevd(&model, &target, horizons)?;
            let mut table = fevd_table(&f);
            if !stable {
                eprintln!("WARNING: companion roots outside the unit circle; the decomposition is still defined but the model is unstable.");
                table.push_note("ATTENTION : modèle instable (racines hors du cercle unité).");
            }
            ctx.emit(&table, serde_json::to_value(&f).expect("json"));
            Ok(0)
        }
    }
}

fn cmd_bonanza(
    ctx: &Ctx,
    var_name: Option<String>,
    sign: Option<String>,
    threshold: Option<f64>,
    openness: Option<String>,
) -> Result<i32, Error> {
    let raw = ctx.load_input()?;
    let var_name = ctx
        .option(var_name, "var")?
        .ok_or_else(|| Error::InvalidArg("--var is required".into()))?;
    let sign: SignConvention = ctx
        .option(sign, "sign")?
        .ok_or_else(|| Error::InvalidArg("--sign is required (deficit-negative | deficit-positive)".into()))?
        .parse()?;
    let threshold = ctx.option(threshold, "threshold")?;
    let openness: Option<Openness> = ctx.option(openness, "openness")?.map(|s: String| s.parse()).transpose()?;

    let series = raw.get(&var_name)?;
    let flags = detect_bonanza(series, sign, threshold, openness)?;
    ctx.emit(&bonanza_table(&flags), serde_json::to_value(&flags).expect("json"));
    Ok(0)
}
