//! File formats: TOML configs and parameter files, CSV strategies,
//! trajectories, histories and leaderboards, and the evaluation report as
//! JSON plus plot-ready CSVs.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! strategy read back from disk is bit-identical to the one written.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::appdecomp::{APPParams, IterationRecord, PARAM_NAMES};
use crate::error::{Error, Result};
use crate::evalharness::EvaluationReport;
use crate::sysmodel::{ComponentParams, Strategy, SystemConfig, Trajectory};
use crate::tuning::LeaderboardEntry;

/// Per-component block of a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct ComponentFile {
    C_P: f64,
    C_C: f64,
    /// Weibull shape.
    k: f64,
    /// Weibull scale, years.
    lambda: f64,
}

impl From<ComponentFile> for ComponentParams {
    fn from(c: ComponentFile) -> Self {
        ComponentParams {
            c_p: c.C_P,
            c_c: c.C_C,
            weibull_shape: c.k,
            weibull_scale: c.lambda,
        }
    }
}

impl From<&ComponentParams> for ComponentFile {
    fn from(c: &ComponentParams) -> Self {
        ComponentFile {
            C_P: c.c_p,
            C_C: c.c_c,
            k: c.weibull_shape,
            lambda: c.weibull_scale,
        }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    n: Option<usize>,
    T: Option<usize>,
    dt: Option<f64>,
    D: Option<usize>,
    s: Option<u32>,
    delta: Option<f64>,
    tau: Option<f64>,
    nu: Option<f64>,
    C_F: Option<f64>,
    Q: Option<usize>,
    /// One block for every component.
    #[serde(skip_serializing_if = "Option::is_none")]
    components: Option<ComponentFile>,
    /// One block per component, in order.
    #[serde(skip_serializing_if = "Option::is_none")]
    component: Option<Vec<ComponentFile>>,
}

/// Parses a config. Keys missing from the file keep the value of `preset`
/// (`case1`, `case2` or `small`; `case1` when absent).
pub fn parse_config(text: &str, origin: &Path) -> Result<SystemConfig> {
    let f: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(format!("{}: {}", origin.display(), e.message())))?;
    let mut cfg = match f.preset.as_deref() {
        None | Some("case1") => SystemConfig::case1(),
        Some("case2") => SystemConfig::case2(),
        Some("small") => SystemConfig::small(),
        Some(p) => return Err(Error::Config(format!("unknown preset {p:?}"))),
    };
    if let Some(n) = f.n {
        cfg = cfg.with_n(n);
    }
    macro_rules! set {
        ($($src:ident => $dst:ident),*) => {$(if let Some(v) = f.$src { cfg.$dst = v; })*};
    }
    set!(T => horizon, dt => dt, D => supply_delay, s => s_init, delta => delta_default, tau => tau, nu => nu, C_F => c_f, Q => q);
    match (f.components, f.component) {
        (Some(_), Some(_)) => {
            return Err(Error::Config("use either [components] or [[component]], not both".into()));
        }
        (Some(c), None) => cfg.components = vec![c.into(); cfg.n],
        (None, Some(list)) => {
            if list.len() != cfg.n {
                return Err(Error::Config(format!("{} [[component]] blocks for n = {}", list.len(), cfg.n)));
            }
            cfg.components = list.into_iter().map(Into::into).collect();
        }
        (None, None) => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn read_config(path: &Path) -> Result<SystemConfig> {
    parse_config(&read_text(path)?, path)
}

/// Serialises a config, using the broadcast block for homogeneous fleets.
pub fn config_to_toml(cfg: &SystemConfig) -> String {
    let homogeneous = cfg.components.iter().all(|c| *c == cfg.components[0]);
    let f = ConfigFile {
        preset: None,
        n: Some(cfg.n),
        T: Some(cfg.horizon),
        dt: Some(cfg.dt),
        D: Some(cfg.supply_delay),
        s: Some(cfg.s_init),
        delta: Some(cfg.delta_default),
        tau: Some(cfg.tau),
        nu: Some(cfg.nu),
        C_F: Some(cfg.c_f),
        Q: Some(cfg.q),
        components: homogeneous.then(|| (&cfg.components[0]).into()),
        component: (!homogeneous).then(|| cfg.components.iter().map(Into::into).collect()),
    };
    toml::to_string(&f).expect("config serialises")
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes `contents`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn csv_string(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn strs(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Strategy as CSV: a `# n=.. T=.. nu=..` line, a `t,u_1..u_n` header and
/// one row per step.
pub fn strategy_to_csv(u: &Strategy, nu: f64) -> String {
    let (n, h) = (u.n(), u.horizon());
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("u_{i}")));
    let rows = (0..h).map(|t| {
        let mut r = vec![t.to_string()];
        r.extend((0..n).map(|i| u.get(i, t).to_string()));
        r
    });
    format!("# n={n} T={h} nu={nu}\n{}", csv_string(&header, rows))
}

/// Inverse of [`strategy_to_csv`]; returns the strategy and its `ν`.
pub fn parse_strategy(text: &str, origin: &Path) -> Result<(Strategy, f64)> {
    let bad = |m: String| Error::parse(origin, m);
    let (meta, body) = text.split_once('\n').ok_or_else(|| bad("empty file".into()))?;
    let meta = meta.strip_prefix('#').ok_or_else(|| bad("missing `# n=.. T=.. nu=..` line".into()))?;
    let (mut n, mut h, mut nu) = (None, None, None);
    for kv in meta.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("bad metadata item {kv:?}")))?;
        let num = || v.parse::<f64>().map_err(|e| bad(format!("{k}: {e}")));
        match k {
            "n" => n = Some(num()? as usize),
            "T" => h = Some(num()? as usize),
            "nu" => nu = Some(num()?),
            _ => return Err(bad(format!("unknown metadata key {k:?}"))),
        }
    }
    let (n, h, nu) = match (n, h, nu) {
        (Some(n), Some(h), Some(nu)) => (n, h, nu),
        _ => return Err(bad("metadata needs n, T and nu".into())),
    };
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let header = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.len() != n + 1 {
        return Err(Error::Dimension(format!(
            "{}: {} control columns, metadata says n = {n}",
            origin.display(),
            header.len().saturating_sub(1)
        )));
    }
    let mut data = vec![0.0; n * h];
    let mut rows = 0;
    for (t, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if t >= h {
            return Err(Error::Dimension(format!("{}: more than T = {h} rows", origin.display())));
        }
        if rec.get(0) != Some(t.to_string().as_str()) {
            return Err(bad(format!("row {t} has step {:?}", rec.get(0))));
        }
        for i in 0..n {
            let v: f64 = rec[i + 1].trim().parse().map_err(|e| bad(format!("row {t}, u_{}: {e}", i + 1)))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(bad(format!("row {t}, u_{}: {v} outside [0, 1]", i + 1)));
            }
            data[i * h + t] = v;
        }
        rows += 1;
    }
    if rows != h {
        return Err(Error::Dimension(format!("{}: {rows} rows for T = {h}", origin.display())));
    }
    Ok((Strategy::from_vec(n, h, data)?, nu))
}

pub fn read_strategy(path: &Path) -> Result<(Strategy, f64)> {
    parse_strategy(&read_text(path)?, path)
}

pub fn write_strategy(path: &Path, u: &Strategy, nu: f64) -> Result<()> {
    write_text(path, &strategy_to_csv(u, nu))
}

/// One row per `(t, component)` with the packed state, the stock and the
/// event flags of the step leaving `t`.
pub fn trajectory_to_csv(tr: &Trajectory) -> String {
    let mut header = strs(&["t", "component", "regime", "age"]);
    header.extend((1..tr.dim - 1).map(|d| format!("P_{d}")));
    header.extend(strs(&["stock", "forced_outage", "pm", "failure", "cm"]));
    let flag = |b: bool| if b { "1" } else { "0" }.to_string();
    let rows = (0..=tr.horizon).flat_map(|t| {
        (0..tr.n).map(move |i| {
            let j = t * tr.n + i;
            let mut r = vec![t.to_string(), (i + 1).to_string()];
            r.extend(tr.comp(t, i).iter().map(|v| v.to_string()));
            r.push(tr.stock[t].to_string());
            r.extend([flag(tr.forced_outage[t]), flag(tr.pm[j]), flag(tr.failure[j]), flag(tr.cm[j])]);
            r
        })
    });
    csv_string(&header, rows)
}

/// Iteration history without wall-clock times, so that it is reproducible.
pub fn history_to_csv(history: &[IterationRecord]) -> String {
    let n = history.first().map_or(0, |r| r.best_values.len());
    let mut header = strs(&[
        "k", "alpha", "gamma_x", "gamma_s", "gamma_u", "saa_exact", "saa_relaxed", "evals", "control_change",
    ]);
    header.extend((1..=n).map(|i| format!("best_{i}")));
    let rows = history.iter().map(|r| {
        let s = r.schedule;
        let mut row = vec![
            r.k.to_string(),
            s.alpha.to_string(),
            s.gamma_x.to_string(),
            s.gamma_s.to_string(),
            s.gamma_u.to_string(),
            r.saa_exact.to_string(),
            r.saa_relaxed.to_string(),
            r.evals.to_string(),
            r.control_change.to_string(),
        ];
        row.extend(r.best_values.iter().map(|v| v.to_string()));
        row
    });
    csv_string(&header, rows)
}

pub fn timing_to_csv(history: &[IterationRecord]) -> String {
    csv_string(
        &strs(&["k", "seconds"]),
        history.iter().map(|r| vec![r.k.to_string(), format!("{:.6}", r.seconds)]),
    )
}

pub fn params_to_toml(p: &APPParams) -> String {
    toml::to_string(p).expect("params serialise")
}

pub fn read_params(path: &Path) -> Result<APPParams> {
    let p: APPParams = toml::from_str(&read_text(path)?).map_err(|e| Error::parse(path, e.message()))?;
    p.validate()?;
    Ok(p)
}

pub fn leaderboard_to_csv(board: &[LeaderboardEntry]) -> String {
    let mut header = strs(&["rank", "sample", "mean_cost"]);
    header.extend(strs(&PARAM_NAMES));
    let rows = board.iter().enumerate().map(|(r, e)| {
        let mut row = vec![(r + 1).to_string(), e.sample.to_string(), e.mean_cost.to_string()];
        row.extend(e.params.to_vector().iter().map(|v| v.to_string()));
        row
    });
    csv_string(&header, rows)
}

/// Writes `report.json`, `quantiles.csv`, `cumulative_pms.csv`,
/// `empty_stock.csv` and `histogram.csv` into `dir`.
pub fn write_report(dir: &Path, report: &EvaluationReport) -> Result<()> {
    let json = serde_json::to_string_pretty(report).expect("report serialises");
    write_text(&dir.join("report.json"), &(json + "\n"))?;
    write_text(
        &dir.join("quantiles.csv"),
        &csv_string(
            &strs(&["percent", "cost"]),
            report.quantiles.iter().map(|q| vec![q.percent.to_string(), q.value.to_string()]),
        ),
    )?;
    write_text(
        &dir.join("cumulative_pms.csv"),
        &csv_string(
            &strs(&["t", "cumulative_pms"]),
            report.cumulative_pms.iter().enumerate().map(|(t, c)| vec![t.to_string(), c.to_string()]),
        ),
    )?;
    write_text(
        &dir.join("empty_stock.csv"),
        &csv_string(
            &strs(&["t", "probability"]),
            report.empty_stock_probability.iter().enumerate().map(|(t, p)| vec![t.to_string(), p.to_string()]),
        ),
    )?;
    let h = &report.histogram;
    write_text(
        &dir.join("histogram.csv"),
        &csv_string(
            &strs(&["lo", "hi", "count"]),
            h.counts.iter().enumerate().map(|(b, c)| {
                let lo = h.lo + b as f64 * h.width;
                vec![lo.to_string(), (lo + h.width).to_string(), c.to_string()]
            }),
        ),
    )
}
