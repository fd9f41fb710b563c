//! Command dispatch behind the `twistlab` binary.
//!
//! `run` loads a descriptor, evaluates one command and renders the report as JSON, CSV or text.
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::load_descriptor;
use crate::compat::detect_strict;
use crate::error::{Error, Result};
use crate::selberg::{invariants, sine_expansion, LFunctionDescriptor};
use crate::structural::{ray_fit_coefficients, structural_coefficients};
use crate::twist::{
    continue_twist, default_ladder, fit_residues, growth_probe, residue_identity_check,
    spectrum_membership, theorem3_residue, twist_series, verify_fe, FEConfig, FEReport,
};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Invariants,
    Sine,
    Coeffs,
    Spectrum,
    Residues,
    Eval,
    VerifyFe,
    Compat,
    ProbeGrowth,
    ResidueIdentity,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Invariants,
        Command::Sine,
        Command::Coeffs,
        Command::Spectrum,
        Command::Residues,
        Command::Eval,
        Command::VerifyFe,
        Command::Compat,
        Command::ProbeGrowth,
        Command::ResidueIdentity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Invariants => "invariants",
            Command::Sine => "sine",
            Command::Coeffs => "coeffs",
            Command::Spectrum => "spectrum",
            Command::Residues => "residues",
            Command::Eval => "eval",
            Command::VerifyFe => "verify-fe",
            Command::Compat => "compat",
            Command::ProbeGrowth => "probe-growth",
            Command::ResidueIdentity => "residue-identity",
        }
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown command '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(Error::Usage(format!(
                "unknown format '{other}' (json, csv or text)"
            ))),
        }
    }
}

/// Route for the structural coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffMethod {
    #[default]
    Recursion,
    Rayfit,
}

impl FromStr for CoeffMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recursion" => Ok(CoeffMethod::Recursion),
            "rayfit" | "ray-fit" => Ok(CoeffMethod::Rayfit),
            other => Err(Error::Usage(format!(
                "unknown method '{other}' (recursion or rayfit)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub descriptor_path: String,
    pub command: Command,
    pub alpha: Option<f64>,
    pub s: Option<C64>,
    pub k: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[serde(rename = "X_ladder")]
    pub x_ladder: Option<Vec<f64>>,
    pub tol: f64,
    pub output_format: OutputFormat,
    pub output_path: Option<String>,
    pub method: CoeffMethod,
    /// Companion index for probe-growth.
    pub ell: usize,
    /// t grid for probe-growth.
    pub t_grid: Option<Vec<f64>>,
    pub nu_max: usize,
}

impl RunConfig {
    pub fn new(descriptor_path: impl Into<String>, command: Command) -> Self {
        RunConfig {
            descriptor_path: descriptor_path.into(),
            command,
            alpha: None,
            s: None,
            k: None,
            m: None,
            x_ladder: None,
            tol: 1e-10,
            output_format: OutputFormat::Text,
            output_path: None,
            method: CoeffMethod::Recursion,
            ell: 0,
            t_grid: None,
            nu_max: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Usage(format!(
                "--tol must be positive, got {}",
                self.tol
            )));
        }
        let need = |what: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::Usage(format!(
                    "command {} needs {what}",
                    self.command.name()
                )))
            }
        };
        match self.command {
            Command::Spectrum | Command::Residues | Command::ResidueIdentity => {
                need("--alpha", self.alpha.is_some())
            }
            Command::Eval => {
                need("--alpha", self.alpha.is_some())?;
                need("--s", self.s.is_some())
            }
            Command::VerifyFe => {
                need("--alpha", self.alpha.is_some())?;
                need("--s", self.s.is_some())?;
                need("--k", self.k.is_some())
            }
            Command::ProbeGrowth => {
                need("--alpha", self.alpha.is_some())?;
                need(
                    "--s (its real part is the abscissa sigma)",
                    self.s.is_some(),
                )
            }
            _ => Ok(()),
        }
    }
}

/// Result of a run: exit code 0 on success, 1 on validation errors, 2 on non-convergence.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: String,
    pub error: Option<String>,
}

/// Complex number written as "a+bi", "a-bi", "a", "bi" or "i", spaces allowed.
pub fn parse_complex(text: &str) -> Result<C64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Usage(format!("cannot parse complex number '{text}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let parse = |p: &str| p.parse::<f64>().map_err(|_| bad());
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return Ok(C64::new(parse(&t)?, 0.0));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let mut cut = 0;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            cut = i;
            break;
        }
    }
    let (re, im) = body.split_at(cut);
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => parse(x)?,
    };
    let re = if re.is_empty() { 0.0 } else { parse(re)? };
    Ok(C64::new(re, im))
}

/// Comma-separated list of reals.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Usage(format!("cannot parse '{p}' in list '{text}'")))
        })
        .collect()
}

/// Fixed notation for moderate magnitudes, scientific otherwise; 12 significant decimals.
fn fmt_r(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-4..1e7).contains(&a) {
        let s = format!("{x:.12}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.into()
        }
    } else {
        format!("{x:.12e}")
    }
}

fn fmt_c(z: C64) -> String {
    let im = fmt_r(z.im.abs());
    if z.im.abs() < 1e-300 {
        fmt_r(z.re)
    } else if z.im < 0.0 {
        format!("{}-{im}i", fmt_r(z.re))
    } else {
        format!("{}+{im}i", fmt_r(z.re))
    }
}

struct Report {
    json: Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    text: String,
}

impl Report {
    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for r in &self.rows {
                    s.push_str(&r.join(","));
                    s.push('\n');
                }
                s
            }
            OutputFormat::Text => self.text.clone(),
        }
    }
}

fn table(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in &rows {
        for (i, c) in r.iter().enumerate() {
            width[i] = width[i].max(c.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(header.to_vec(), &mut out);
    for r in &rows {
        line(r.iter().map(|s| s.as_str()).collect(), &mut out);
    }
    out
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn cmd_invariants(desc: &LFunctionDescriptor) -> Report {
    let inv = invariants(desc);
    let rows = vec![
        vec!["d".into(), fmt_r(inv.d)],
        vec!["q".into(), fmt_r(inv.q)],
        vec!["xi_F".into(), fmt_xi(inv.xi)],
        vec!["theta_F".into(), fmt_r(inv.theta)],
        vec!["omega_F".into(), fmt_xi(inv.root)],
        vec!["eta_F".into(), fmt_r(inv.eta)],
    ];
    let mut json = to_value(&inv);
    json["name"] = json!(desc.name);
    Report {
        json,
        text: format!(
            "{}\n{}",
            desc.name,
            table(&["quantity", "value"], rows.clone())
        ),
        header: vec!["quantity".into(), "value".into()],
        rows,
    }
}

/// Short form for values that are usually real.
fn fmt_xi(z: C64) -> String {
    if z.im.abs() < 1e-14 {
        fmt_r(z.re)
    } else {
        fmt_c(z)
    }
}

fn cmd_sine(desc: &LFunctionDescriptor) -> Result<Report> {
    let sine = sine_expansion(desc)?;
    let n = sine.n as i64;
    let rows: Vec<Vec<String>> = (-n..=n)
        .map(|j| vec![j.to_string(), fmt_r(sine.omega(j)), fmt_c(sine.a(j))])
        .collect();
    let mut text = format!("S_F(s) = sum_j a_j exp(i pi d omega_j s), N = {}\n", sine.n);
    text.push_str(&table(&["j", "omega_j", "a_j"], rows.clone()));
    for d in &sine.diagnostics {
        let _ = writeln!(text, "warning: {d}");
    }
    Ok(Report {
        json: to_value(&sine),
        header: vec!["j".into(), "omega_j".into(), "a_j".into()],
        rows,
        text,
    })
}

fn cmd_coeffs(desc: &LFunctionDescriptor, cfg: &RunConfig) -> Result<Report> {
    let m = cfg.m.or(cfg.k.map(|k| k + 1)).unwrap_or(4);
    let d_ell = match cfg.method {
        CoeffMethod::Recursion => structural_coefficients(desc, m)?.d_ell,
        CoeffMethod::Rayfit => ray_fit_coefficients(desc, m)?,
    };
    let method = match cfg.method {
        CoeffMethod::Recursion => "recursion",
        CoeffMethod::Rayfit => "rayfit",
    };
    let rows: Vec<Vec<String>> = d_ell
        .iter()
        .enumerate()
        .map(|(l, v)| {
            vec![
                l.to_string(),
                format!("{:.15e}", v.re),
                format!("{:.15e}", v.im),
            ]
        })
        .collect();
    Ok(Report {
        json: json!({ "name": desc.name, "method": method, "M": m, "d_ell": d_ell }),
        text: format!(
            "structural coefficients d_l ({method}, M = {m})\n{}",
            table(&["l", "re", "im"], rows.clone())
        ),
        header: vec!["l".into(), "re".into(), "im".into()],
        rows,
    })
}

fn cmd_spectrum(desc: &LFunctionDescriptor, alpha: f64) -> Result<Report> {
    let p = spectrum_membership(desc, alpha)?;
    let yes = if p.member { "yes" } else { "no" };
    Ok(Report {
        json: to_value(&p),
        header: vec!["alpha".into(), "n_alpha".into(), "member".into()],
        rows: vec![vec![fmt_r(alpha), fmt_r(p.n_alpha), p.member.to_string()]],
        text: format!(
            "alpha = {}, n_alpha = {}, in spectrum: {yes}\n",
            fmt_r(alpha),
            fmt_r(p.n_alpha)
        ),
    })
}

fn cmd_residues(desc: &LFunctionDescriptor, cfg: &RunConfig, alpha: f64) -> Result<Report> {
    let top = cfg.k.unwrap_or(4);
    let mut poles = Vec::new();
    for l in 0..=top {
        poles.push(theorem3_residue(desc, alpha, l)?);
    }
    let mut rows: Vec<Vec<String>> = poles
        .iter()
        .map(|p| {
            vec![
                p.ell.to_string(),
                fmt_c(p.location),
                fmt_c(p.residue),
                String::new(),
            ]
        })
        .collect();
    let mut json = json!({ "name": desc.name, "alpha": alpha, "poles": poles });
    if let Some(s) = cfg.s {
        let ladder = cfg
            .x_ladder
            .clone()
            .unwrap_or_else(|| default_ladder(desc.degree()));
        let fit = fit_residues(desc, s, alpha, &ladder)?;
        for (l, r) in fit.ells.iter().zip(&fit.residues) {
            if let Some(row) = rows.get_mut(*l) {
                row[3] = fmt_c(*r);
            }
        }
        json["fit"] = to_value(&fit);
    }
    let text = format!(
        "residues of F(s, {}) at s*_l\n{}",
        fmt_r(alpha),
        table(&["l", "location", "theorem3", "fitted"], rows.clone())
    );
    Ok(Report {
        json,
        header: vec![
            "l".into(),
            "location".into(),
            "theorem3".into(),
            "fitted".into(),
        ],
        rows,
        text,
    })
}

fn cmd_eval(desc: &LFunctionDescriptor, cfg: &RunConfig, alpha: f64, s: C64) -> Result<Report> {
    let absolutely = desc.coefficients.support().is_some() || s.re > 1.5;
    let (value, error, method, detail) = if absolutely {
        let mut horizon = 1024usize;
        loop {
            let v = twist_series(desc, s, alpha, horizon)?;
            if v.tail_bound <= cfg.tol || horizon >= 1 << 24 {
                break (v.value, v.tail_bound, "series", to_value(&v));
            }
            horizon *= 4;
        }
    } else {
        let ladder = cfg
            .x_ladder
            .clone()
            .unwrap_or_else(|| default_ladder(desc.degree()));
        let r = continue_twist(desc, s, alpha, &ladder, None)?;
        (r.value, r.error, "continuation", to_value(&r))
    };
    Ok(Report {
        json: json!({ "name": desc.name, "s": s, "alpha": alpha, "value": value,
                      "error": error, "method": method, "detail": detail }),
        header: vec![
            "sigma".into(),
            "t".into(),
            "alpha".into(),
            "re".into(),
            "im".into(),
            "error".into(),
        ],
        rows: vec![vec![
            fmt_r(s.re),
            fmt_r(s.im),
            fmt_r(alpha),
            format!("{:.15e}", value.re),
            format!("{:.15e}", value.im),
            format!("{error:.3e}"),
        ]],
        text: format!(
            "F({}, {}) = {} +- {error:.3e} ({method})\n",
            fmt_xi(s),
            fmt_r(alpha),
            fmt_c(value)
        ),
    })
}

fn cmd_verify_fe(
    desc: &LFunctionDescriptor,
    cfg: &RunConfig,
    alpha: f64,
    s: C64,
    k: usize,
) -> Result<Report> {
    let fe = FEConfig {
        x_ladder: cfg.x_ladder.clone(),
        horizon: None,
    };
    let r = verify_fe(desc, s, alpha, k, &fe)?;
    let ok = if r.within_budget() { "yes" } else { "no" };
    let text = format!(
        "functional equation at s = {}, alpha = {}, k = {k}\n\
         lhs            {}\n\
         rhs sum        {}\n\
         R(1-s, alpha)  {}\n\
         H_k            {}\n\
         residual       {:.3e}\n\
         error budget   {:.3e}\n\
         within budget: {ok}\n",
        fmt_xi(s),
        fmt_r(alpha),
        fmt_c(r.lhs),
        fmt_c(r.rhs_sum),
        fmt_c(r.residual_term),
        fmt_c(r.h_k_quadrature),
        r.residual,
        r.error_budget
    );
    Ok(Report {
        json: to_value(&r),
        header: FEReport::CSV_HEADER.split(',').map(String::from).collect(),
        rows: vec![r.csv_row().split(',').map(String::from).collect()],
        text,
    })
}

fn cmd_compat(desc: &LFunctionDescriptor) -> Result<Report> {
    let r = detect_strict(desc)?;
    let opt = |x: Option<i64>| x.map(|v| v.to_string()).unwrap_or_default();
    Ok(Report {
        json: to_value(&r),
        header: vec!["strict".into(), "h".into(), "n_0".into(), "N_0".into()],
        rows: vec![vec![
            r.is_strict.to_string(),
            opt(r.h),
            opt(r.n_0),
            opt(r.n0_total),
        ]],
        text: r.trace(),
    })
}

fn cmd_probe_growth(
    desc: &LFunctionDescriptor,
    cfg: &RunConfig,
    alpha: f64,
    sigma: f64,
) -> Result<Report> {
    let grid = cfg.t_grid.clone().unwrap_or_else(|| {
        (0..24)
            .map(|i| 10.0 * 40f64.powf(i as f64 / 23.0))
            .collect()
    });
    let r = growth_probe(desc, alpha, cfg.ell, sigma, &grid)?;
    let rows: Vec<Vec<String>> = r
        .samples
        .iter()
        .map(|p| vec![fmt_r(p.t), fmt_c(p.value), format!("{:.6e}", p.normalized)])
        .collect();
    let text = format!(
        "growth of conj F_{}({} + it, {}): fitted exponent {:.4}, bound holds: {}, nonvanishing: {}\n{}",
        cfg.ell,
        fmt_r(sigma),
        fmt_r(alpha),
        r.fitted_exponent,
        r.bound_holds,
        r.nonvanishing,
        table(&["t", "value", "normalized"], rows.clone())
    );
    Ok(Report {
        json: to_value(&r),
        header: vec!["t".into(), "value".into(), "normalized".into()],
        rows,
        text,
    })
}

fn cmd_residue_identity(desc: &LFunctionDescriptor, cfg: &RunConfig, alpha: f64) -> Result<Report> {
    let dev = residue_identity_check(desc, alpha, cfg.nu_max)?;
    let rows: Vec<Vec<String>> = dev
        .iter()
        .enumerate()
        .map(|(nu, v)| vec![nu.to_string(), format!("{v:.3e}")])
        .collect();
    Ok(Report {
        json: json!({ "name": desc.name, "alpha": alpha, "deviations": dev }),
        text: format!(
            "residue identity deviations\n{}",
            table(&["nu", "deviation"], rows.clone())
        ),
        header: vec!["nu".into(), "deviation".into()],
        rows,
    })
}

fn dispatch(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let desc = load_descriptor(&cfg.descriptor_path)?;
    let alpha = cfg.alpha.unwrap_or(1.0);
    let s = cfg.s.unwrap_or(C64::new(0.0, 0.0));
    match cfg.command {
        Command::Invariants => Ok(cmd_invariants(&desc)),
        Command::Sine => cmd_sine(&desc),
        Command::Coeffs => cmd_coeffs(&desc, cfg),
        Command::Spectrum => cmd_spectrum(&desc, alpha),
        Command::Residues => cmd_residues(&desc, cfg, alpha),
        Command::Eval => cmd_eval(&desc, cfg, alpha, s),
        Command::VerifyFe => cmd_verify_fe(&desc, cfg, alpha, s, cfg.k.unwrap_or(0)),
        Command::Compat => cmd_compat(&desc),
        Command::ProbeGrowth => cmd_probe_growth(&desc, cfg, alpha, s.re),
        Command::ResidueIdentity => cmd_residue_identity(&desc, cfg, alpha),
    }
}

/// Run one command; the report is also written to `output_path` when given.
pub fn run(cfg: &RunConfig) -> RunOutcome {
    let outcome = match dispatch(cfg) {
        Ok(report) => RunOutcome {
            exit_code: 0,
            report: report.render(cfg.output_format),
            error: None,
        },
        Err(e) => {
            return RunOutcome {
                exit_code: e.exit_code(),
                report: String::new(),
                error: Some(e.to_string()),
            }
        }
    };
    if let Some(path) = &cfg.output_path {
        if let Err(e) = std::fs::write(path, &outcome.report) {
            return RunOutcome {
                exit_code: 1,
                report: outcome.report,
                error: Some(format!("cannot write {path}: {e}")),
            };
        }
    }
    outcome
}
