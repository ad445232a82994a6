//! Run configurations and the documents they emit.
//!
//! A [`RunConfig`] fully determines its output: it is echoed into every JSON
//! document, and apart from the optional `generated_at` field the bytes are
//! identical across runs and thread counts.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cobordism::{close_relation, DoublePointData, PairClass};
use crate::error::Error;
use crate::quasimodular::FormCatalog;
use crate::series::PowerSeries;
use crate::severi::{SeveriKey, SeveriTable, TangencyProfile};
use crate::universal::{self, FitConfig, GyzFit, MultiplicativeFit};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Pretty,
}

/// Parameters of the universal fit shared by the commands that need one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FitParams {
    pub degrees: Option<(u32, u32)>,
    pub k3: Option<(i64, i64)>,
    #[serde(rename = "unsafe")]
    pub unsafe_thresholds: bool,
}

impl FitParams {
    pub fn config(&self, order: usize) -> FitConfig {
        let mut cfg = FitConfig::for_order(order);
        if let Some(d) = self.degrees {
            cfg.degrees = d;
        }
        if let Some(k) = self.k3 {
            cfg.k3 = k;
        }
        cfg.unsafe_thresholds = self.unsafe_thresholds;
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Severi {
        d: u32,
        delta: i64,
        alpha: String,
        beta: Option<String>,
    },
    SeveriTable {
        dmax: u32,
        deltamax: u32,
    },
    Fit {
        order: usize,
        #[serde(flatten)]
        fit: FitParams,
    },
    Evaluate {
        class: PairClass,
        order: usize,
        #[serde(flatten)]
        fit: FitParams,
    },
    Decompose {
        class: PairClass,
        alt: bool,
    },
    CloseRelation {
        v1: PairClass,
        v2: PairClass,
        double_point: DoublePointData,
    },
    GenusSeries {
        r: u32,
        #[serde(rename = "Ksq")]
        ksq: i64,
        m: i64,
        #[serde(rename = "chiO")]
        chi_o: i64,
        order: usize,
        #[serde(flatten)]
        fit: FitParams,
    },
    Validate {
        d: u32,
        order: usize,
        #[serde(flatten)]
        fit: FitParams,
    },
    Forms {
        order: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub output: OutputFormat,
    pub cache_path: Option<PathBuf>,
    /// Worker threads for Severi evaluation; `None` uses all cores.
    /// Not echoed, so output does not depend on it.
    #[serde(skip_serializing, default)]
    pub threads: Option<usize>,
    /// Whether to stamp JSON documents with `generated_at`.
    pub timestamp: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig { command, output: OutputFormat::Json, cache_path: None, threads: None, timestamp: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub document: String,
}

enum Failure {
    Validation(String),
    Inconsistent(String, Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl<E: Into<Error>> From<E> for Box<Failure>
where
    E: std::error::Error,
{
    fn from(e: E) -> Self {
        Box::new(Failure::from(e.into()))
    }
}

/// What a successful command produced: a JSON result plus its CSV and
/// pretty renderings where those exist.
struct Output {
    result: Value,
    csv: Option<String>,
    pretty: String,
}

/// Executes one command and renders its document.
pub fn run(config: &RunConfig) -> RunOutcome {
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => return render_failure(config, &Failure::Validation(e.to_string())),
    };
    let table = SeveriTable::new();
    let outcome = pool.install(|| execute(config, &table));
    match outcome {
        Ok(out) => render_success(config, out),
        Err(f) => render_failure(config, &f),
    }
}

fn execute(config: &RunConfig, table: &SeveriTable) -> Result<Output, Box<Failure>> {
    let uses_table = matches!(
        config.command,
        Command::Severi { .. }
            | Command::SeveriTable { .. }
            | Command::Fit { .. }
            | Command::Evaluate { .. }
            | Command::GenusSeries { .. }
            | Command::Validate { .. }
    );
    if uses_table {
        if let Some(path) = &config.cache_path {
            table.load(path)?;
        }
    }
    let out = dispatch(config, table);
    if uses_table {
        if let Some(path) = &config.cache_path {
            table.persist(path)?;
        }
    }
    let out = out?;
    if config.output == OutputFormat::Csv && out.csv.is_none() {
        return Err(Box::new(Failure::Validation("csv output is not available for this command".into())));
    }
    Ok(out)
}

fn series_json(s: &PowerSeries) -> Value {
    serde_json::to_value(s).expect("series serialize")
}

fn fit_with_b(cfg: FitConfig, table: &SeveriTable) -> Result<(MultiplicativeFit, GyzFit), Error> {
    let fit = universal::fit_a(&cfg, table)?;
    let gyz = universal::fit_b(&fit, cfg.order)?;
    Ok((fit, gyz))
}

fn dispatch(config: &RunConfig, table: &SeveriTable) -> Result<Output, Box<Failure>> {
    match &config.command {
        Command::Severi { d, delta, alpha, beta } => {
            let alpha: TangencyProfile = alpha.parse()?;
            let beta: TangencyProfile = match beta {
                Some(b) => b.parse()?,
                None => {
                    let rest = (*d as u64).checked_sub(alpha.weight()).unwrap_or(u64::MAX);
                    if rest > u32::MAX as u64 {
                        return Err(Box::new(Failure::Validation(format!(
                            "alpha weight {} exceeds degree {d}",
                            alpha.weight()
                        ))));
                    }
                    TangencyProfile::single(1, rest as u32)
                }
            };
            let key = SeveriKey::new(*d, *delta, alpha, beta)?;
            let value = table.relative(&key)?;
            Ok(Output {
                result: json!({ "key": key.to_string(), "value": value.to_string() }),
                csv: Some(format!("key,value\n{key},{value}\n")),
                pretty: format!("N({key}) = {value}\n"),
            })
        }
        Command::SeveriTable { dmax, deltamax } => {
            let keys: Vec<SeveriKey> = (1..=*dmax)
                .flat_map(|d| (0..=*deltamax as i64).map(move |k| SeveriKey::plain(d, k)))
                .collect();
            let values = table.prefetch(&keys)?;
            let mut csv = String::from("d,delta,value\n");
            let mut rows = Vec::new();
            for (k, v) in keys.iter().zip(&values) {
                writeln!(csv, "{},{},{}", k.d, k.delta, v).unwrap();
                rows.push(json!({ "d": k.d, "delta": k.delta, "value": v.to_string() }));
            }
            Ok(Output { result: Value::Array(rows), pretty: csv.replace(',', "\t"), csv: Some(csv) })
        }
        Command::Fit { order, fit } => {
            let cfg = fit.config(*order);
            let (mfit, gyz) = fit_with_b(cfg, table)?;
            let polys = mfit.universal_polynomials(*order).map_err(Failure::from)?;
            let result = json!({
                "fit_config": cfg,
                "log_A": mfit.log_a.iter().map(series_json).collect::<Vec<_>>(),
                "A": mfit.a.iter().map(series_json).collect::<Vec<_>>(),
                "B": {
                    "B1": series_json(&gyz.b1),
                    "B2": series_json(&gyz.b2),
                    "B3": series_json(&gyz.b3),
                    "B4": series_json(&gyz.b4),
                },
                "residuals": gyz.residuals,
                "T": polys.iter().map(|p| p.to_repr()).collect::<Vec<_>>(),
            });
            let mut pretty = String::new();
            for (i, a) in mfit.a.iter().enumerate() {
                writeln!(pretty, "A{} = {a}", i + 1).unwrap();
            }
            writeln!(pretty, "B1 = {}\nB2 = {}", gyz.b1, gyz.b2).unwrap();
            for p in &polys {
                writeln!(pretty, "T{} = {}", p.r, p.poly).unwrap();
            }
            if !gyz.residuals.consistent() {
                return Err(Box::new(Failure::Inconsistent(
                    format!("GYZ residuals do not vanish: {:?}", gyz.residuals),
                    result,
                )));
            }
            Ok(Output { result, csv: None, pretty })
        }
        Command::Evaluate { class, order, fit } => {
            class.validate().map_err(Error::from)?;
            let mfit = universal::fit_a(&fit.config(*order), table)?;
            let series = mfit.evaluate(class, *order)?;
            Ok(Output {
                pretty: format!("T(S,L) = {series}\n"),
                result: json!({ "class": class, "series": series_json(&series) }),
                csv: None,
            })
        }
        Command::Decompose { class, alt } => {
            let coeffs = class.decompose().map_err(Error::from)?;
            let mut result = serde_json::to_value(coeffs).expect("plain struct");
            let mut pretty = format!(
                "a1 = {}, a2 = {}, a3 = {}, a4 = {}\n",
                coeffs.a1, coeffs.a2, coeffs.a3, coeffs.a4
            );
            if *alt {
                let a = class.to_alt().map_err(Error::from)?;
                result["alt"] = serde_json::to_value(a).expect("plain struct");
                writeln!(pretty, "LK = {}, chi(L) = {}, chi(O) = {}, K^2 = {}", a.lk, a.chi_l, a.chi_o, a.ksq)
                    .unwrap();
            }
            Ok(Output { result, csv: None, pretty })
        }
        Command::CloseRelation { v1, v2, double_point } => {
            v1.validate().map_err(Error::from)?;
            v2.validate().map_err(Error::from)?;
            let (v3, v0) = close_relation(*v1, *v2, *double_point);
            Ok(Output {
                pretty: format!("v3 = {:?}\nv0 = {:?}\n", v3.as_array(), v0.as_array()),
                result: json!({ "v3": v3, "v0": v0 }),
                csv: None,
            })
        }
        Command::GenusSeries { r, ksq, m, chi_o, order, fit } => {
            let gyz = if *ksq != 0 || *m != 0 {
                Some(fit_with_b(fit.config(*order), table)?.1)
            } else {
                None
            };
            let s = universal::genus_series(*r, *ksq, *m, *chi_o, *order, gyz.as_ref())?;
            Ok(Output {
                pretty: format!("q^{} * ({})\n", s.valuation, s.unit),
                result: json!({ "valuation": s.valuation, "unit": series_json(&s.unit) }),
                csv: None,
            })
        }
        Command::Validate { d, order, fit } => {
            let mfit = universal::fit_a(&fit.config(*order), table)?;
            let report = universal::validate_p2(*d, &mfit, *order, table)?;
            let result = serde_json::to_value(&report).expect("report serialize");
            if !report.matches {
                return Err(Box::new(Failure::Inconsistent(
                    format!("prediction differs from Severi degrees at x^{}", report.first_mismatch.unwrap()),
                    result,
                )));
            }
            Ok(Output {
                pretty: format!("d = {d}: predicted {} matches\n", report.predicted),
                result,
                csv: None,
            })
        }
        Command::Forms { order } => {
            let cat = FormCatalog::new(*order).map_err(Error::from)?;
            Ok(Output {
                pretty: format!(
                    "G2 = {}\nDG2 = {}\nD2G2 = {}\nDelta = {}\n",
                    cat.g2, cat.dg2, cat.d2g2, cat.delta
                ),
                result: serde_json::to_value(&cat).expect("catalog serialize"),
                csv: None,
            })
        }
    }
}

fn envelope(config: &RunConfig) -> serde_json::Map<String, Value> {
    let mut doc = serde_json::Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("config".into(), serde_json::to_value(config).expect("config serialize"));
    if config.timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        doc.insert("generated_at".into(), json!(secs));
    }
    doc
}

fn render_success(config: &RunConfig, out: Output) -> RunOutcome {
    let document = match config.output {
        OutputFormat::Json => {
            let mut doc = envelope(config);
            doc.insert("result".into(), out.result);
            to_json_line(&Value::Object(doc))
        }
        OutputFormat::Csv => out.csv.expect("checked in execute"),
        OutputFormat::Pretty => out.pretty,
    };
    RunOutcome { exit_code: EXIT_OK, document }
}

fn render_failure(config: &RunConfig, failure: &Failure) -> RunOutcome {
    let (code, kind, message, partial) = match failure {
        Failure::Validation(m) => (EXIT_VALIDATION, "validation", m, None),
        Failure::Inconsistent(m, v) => (EXIT_INCONSISTENT, "inconsistency", m, Some(v)),
    };
    let mut doc = envelope(config);
    doc.insert("error".into(), json!({ "kind": kind, "message": message }));
    if let Some(v) = partial {
        doc.insert("result".into(), v.clone());
    }
    RunOutcome { exit_code: code, document: to_json_line(&Value::Object(doc)) }
}

fn to_json_line(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_json(cmd: Command) -> (i32, Value) {
        let out = run(&RunConfig::new(cmd));
        (out.exit_code, serde_json::from_str(&out.document).unwrap())
    }

    #[test]
    fn decompose_basis_element() {
        let (code, doc) = run_json(Command::Decompose { class: PairClass::new(1, -3, 9, 3), alt: false });
        assert_eq!(code, EXIT_OK);
        assert_eq!(doc["result"], json!({ "a1": 0, "a2": 1, "a3": 0, "a4": 0 }));
        assert_eq!(doc["schema_version"], json!(SCHEMA_VERSION));
        assert!(doc.get("generated_at").is_none());
    }

    #[test]
    fn severi_value() {
        let (code, doc) = run_json(Command::Severi { d: 3, delta: 1, alpha: String::new(), beta: None });
        assert_eq!(code, EXIT_OK);
        assert_eq!(doc["result"]["value"], json!("12"));
        assert_eq!(doc["result"]["key"], json!("3:1:|1^3"));
    }

    #[test]
    fn validation_errors_exit_two() {
        let (code, doc) = run_json(Command::Decompose { class: PairClass::new(1, 0, 9, 3), alt: false });
        assert_eq!(code, EXIT_VALIDATION);
        assert_eq!(doc["error"]["kind"], json!("validation"));
        let (code, _) = run_json(Command::Severi {
            d: 3,
            delta: 0,
            alpha: "2".into(),
            beta: Some("2".into()),
        });
        assert_eq!(code, EXIT_VALIDATION);
        let mut cfg = RunConfig::new(Command::Forms { order: 3 });
        cfg.output = OutputFormat::Csv;
        assert_eq!(run(&cfg).exit_code, EXIT_VALIDATION);
    }

    #[test]
    fn fit_order_one_polynomial() {
        let (code, doc) = run_json(Command::Fit { order: 1, fit: FitParams::default() });
        assert_eq!(code, EXIT_OK);
        let t1 = &doc["result"]["T"][1]["terms"];
        assert_eq!(
            t1,
            &json!([
                { "exponents": [0, 0, 0, 1], "coeff": "1" },
                { "exponents": [0, 1, 0, 0], "coeff": "2" },
                { "exponents": [1, 0, 0, 0], "coeff": "3" },
            ])
        );
    }

    #[test]
    fn config_roundtrips_through_json() {
        let cfg = RunConfig {
            command: Command::GenusSeries { r: 1, ksq: 2, m: -1, chi_o: 1, order: 2, fit: FitParams::default() },
            output: OutputFormat::Pretty,
            cache_path: Some("/tmp/x".into()),
            threads: Some(3),
            timestamp: true,
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(!text.contains("threads"));
        let back = serde_json::from_str::<RunConfig>(&text).unwrap();
        assert_eq!(back, RunConfig { threads: None, ..cfg });
    }
}
