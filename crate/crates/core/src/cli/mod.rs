//! Command-line front end.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::evans::{refine_zero, scan_region, Rect, Zero};
use crate::linops::{asymptotic_eigenvectors, continuous_spectrum, xi_branches, OperatorKind};
use crate::model::ModelParams;
use crate::resonance::{resonance_crossings, resonance_phase, ThresholdTag};
use crate::soliton::{closed_form_profile, quadrature_profile, Grid, SolitonProfile};
use crate::verify;
use config::RunConfig;
use output::{csv, header, sidecar, write_atomic, Cache};

#[derive(Debug, Parser)]
#[command(name = "dirac-spectra", version, about = "Solitary waves of the 1D nonlinear Dirac equation and their spectra")]
pub struct Cli {
    /// `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Size of the worker pool for parallel scans.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// `gross-neveu` or `poly` (with `--g-coeffs`).
    #[arg(long)]
    pub model: Option<String>,
    /// Coefficients `c1,c2,...` of `G(X) = c1 X + c2 X^2 + ...`.
    #[arg(long = "g-coeffs", allow_hyphen_values = true)]
    pub g_coeffs: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the solitary wave on a uniform grid.
    Soliton {
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long = "R")]
        r: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
        /// Use the quadrature construction even for Gross-Neveu.
        #[arg(long)]
        quadrature: bool,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameters, asymptotic roots and continuous spectra at one spectral parameter.
    SpectrumInfo {
        #[arg(long)]
        omega: Option<f64>,
        /// `RE,IM`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
    },
    /// Evans functions on a rectangle, with refined zeros in a JSON sidecar.
    EvansScan {
        #[arg(long)]
        omega: Option<f64>,
        /// `A,B`.
        #[arg(long, allow_hyphen_values = true)]
        re: Option<String>,
        /// `C,D`.
        #[arg(long, allow_hyphen_values = true)]
        im: Option<String>,
        /// `NxM` nodes along the real and imaginary axes.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long = "R")]
        r: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues of H- or H+ in the gap for a range of omega.
    HSpectrum {
        /// `h-` or `h+`.
        #[arg(long)]
        kind: Option<String>,
        /// `A,B,STEP`.
        #[arg(long = "omega-range")]
        omega_range: Option<String>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long = "R")]
        r: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact and WKB threshold phases, or one `n pi` crossing.
    Resonance {
        /// `hp-mminus`, `hp-mplus` or `l-implus`.
        #[arg(long)]
        tag: Option<String>,
        #[arg(long = "omega-range")]
        omega_range: Option<String>,
        #[arg(long = "find-crossing")]
        find_crossing: Option<i64>,
        /// `A,B`.
        #[arg(long)]
        bracket: Option<String>,
        #[arg(long = "R")]
        r: Option<f64>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance checks and write a plain-text report.
    Verify {
        /// Comma-separated check ids; all by default.
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit with status 1 when any check fails.
        #[arg(long)]
        strict: bool,
    },
}

/// Whether a failure came from bad input (exit 2) or from the computation (exit 1).
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_) => 2,
        _ => 1,
    }
}

struct Ctx {
    cfg: RunConfig,
    cache: Cache,
}

impl Ctx {
    /// Cached text output of `command`, computing it with `f` on a miss.
    fn cached(&self, command: &str, suffix: &str, f: impl FnOnce() -> Result<String>) -> Result<String> {
        let key = Cache::key(command, &self.cfg);
        if let Some(bytes) = self.cache.get(&key, suffix) {
            if let Ok(s) = String::from_utf8(bytes) {
                return Ok(s);
            }
        }
        let s = f()?;
        self.cache.put(&key, suffix, s.as_bytes());
        Ok(s)
    }

    fn out(&self) -> Option<PathBuf> {
        self.cfg.get("out").map(PathBuf::from)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn merge_model(cfg: &mut RunConfig, m: &ModelArgs) {
    cfg.set_opt("model", m.model.as_ref());
    cfg.set_opt("G_coeffs", m.g_coeffs.as_ref());
}

/// Parse arguments already split off `argv[0]` and run; returns the process exit code.
pub fn run(cli: Cli) -> Result<u8> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.set_opt("threads", cli.threads);
    let cache = if cli.no_cache {
        Cache::disabled()
    } else {
        Cache::locate(cli.cache_dir.clone().or_else(|| cfg.get("cache_dir").map(PathBuf::from)))
    };
    let threads = match cfg.get("threads") {
        Some(t) => t.parse::<usize>().map_err(|_| Error::InvalidConfig(format!("threads: '{t}'")))?,
        None => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let mut ctx = Ctx { cfg, cache };
    pool.install(move || dispatch(&mut ctx, cli.command))
}

fn dispatch(ctx: &mut Ctx, command: Command) -> Result<u8> {
    let cfg = &mut ctx.cfg;
    match command {
        Command::Soliton { omega, r, h, quadrature, model, out } => {
            cfg.set_opt("omega", omega);
            cfg.set_opt("R", r);
            cfg.set_opt("h", h);
            if quadrature {
                cfg.set("quadrature", true);
            }
            merge_model(cfg, &model);
            cfg.set_opt("out", out.as_ref().map(|p| p.display()));
            let text = ctx.cached("soliton", ".csv", || soliton_csv(&ctx.cfg))?;
            emit(ctx.out().as_deref(), &text)?;
        }
        Command::SpectrumInfo { omega, lambda } => {
            cfg.set_opt("omega", omega);
            cfg.set_opt("lambda", lambda);
            let text = spectrum_info(&ctx.cfg)?;
            emit(None, &text)?;
        }
        Command::EvansScan { omega, re, im, grid, r, out } => {
            cfg.set_opt("omega", omega);
            cfg.set_opt("re", re);
            cfg.set_opt("im", im);
            cfg.set_opt("grid", grid);
            cfg.set_opt("R", r);
            cfg.set_opt("out", out.as_ref().map(|p| p.display()));
            let mut zeros_json = None;
            let text = ctx.cached("evans-scan", ".csv", || {
                let (t, z) = evans_scan(&ctx.cfg)?;
                zeros_json = Some(z);
                Ok(t)
            })?;
            let zeros = match zeros_json {
                Some(z) => {
                    ctx.cache.put(&Cache::key("evans-scan", &ctx.cfg), ".zeros.json", z.as_bytes());
                    z
                }
                None => ctx.cached("evans-scan", ".zeros.json", || Ok(evans_scan(&ctx.cfg)?.1))?,
            };
            let out = ctx.out();
            emit(out.as_deref(), &text)?;
            match out {
                Some(p) => write_atomic(&sidecar(&p), zeros.as_bytes())?,
                None => eprint!("{zeros}"),
            }
        }
        Command::HSpectrum { kind, omega_range, step, r, out } => {
            cfg.set_opt("kind", kind);
            cfg.set_opt("omega_range", omega_range);
            cfg.set_opt("step", step);
            cfg.set_opt("R", r);
            cfg.set_opt("out", out.as_ref().map(|p| p.display()));
            let text = ctx.cached("h-spectrum", ".csv", || h_spectrum(&ctx.cfg))?;
            emit(ctx.out().as_deref(), &text)?;
        }
        Command::Resonance { tag, omega_range, find_crossing, bracket, r, model, out } => {
            cfg.set_opt("tag", tag);
            cfg.set_opt("omega_range", omega_range);
            cfg.set_opt("find_crossing", find_crossing);
            cfg.set_opt("bracket", bracket);
            cfg.set_opt("R", r);
            merge_model(cfg, &model);
            cfg.set_opt("out", out.as_ref().map(|p| p.display()));
            let text = if ctx.cfg.get("find_crossing").is_some() {
                ctx.cached("resonance-crossing", ".json", || crossing_json(&ctx.cfg))?
            } else {
                ctx.cached("resonance", ".csv", || resonance_csv(&ctx.cfg))?
            };
            emit(ctx.out().as_deref(), &text)?;
        }
        Command::Verify { only, out, strict } => {
            let ids: Vec<u32> = match only.as_deref().or(cfg.get("only")) {
                Some(list) => list
                    .split(',')
                    .map(|s| s.trim().parse().map_err(|_| Error::InvalidConfig(format!("check id '{s}'"))))
                    .collect::<Result<_>>()?,
                None => verify::CHECKS.iter().map(|c| c.id).collect(),
            };
            let results = verify::run(&ids);
            let report = verify::render_report(&results);
            let out = out.or_else(|| cfg.get("out").map(PathBuf::from));
            if let Some(p) = &out {
                write_atomic(p, report.as_bytes())?;
            }
            print!("{report}");
            return Ok(if strict && !results.iter().all(|r| r.passed) { 1 } else { 0 });
        }
    }
    Ok(0)
}

fn profile_for(cfg: &RunConfig, omega: f64) -> Result<SolitonProfile> {
    let nl = cfg.nonlinearity()?;
    let grid = Grid::new(cfg.f64_or("R", 20.0)?, cfg.f64_or("h", 0.01)?)?;
    if nl.is_gross_neveu() && cfg.get("quadrature") != Some("true") {
        closed_form_profile(omega, grid)
    } else {
        quadrature_profile(&nl, omega, grid)
    }
}

fn soliton_csv(cfg: &RunConfig) -> Result<String> {
    let p = profile_for(cfg, cfg.f64("omega")?)?;
    let rows: Vec<Vec<f64>> = (0..p.len())
        .map(|i| vec![p.x[i], p.v[i], p.u[i], p.big_x[i], p.y[i], p.z[i], p.residual_h(i)])
        .collect();
    let tol = match p.source {
        crate::soliton::Source::ClosedForm => "closed form",
        crate::soliton::Source::Quadrature => "rk4 8 substeps, log-form tail",
    };
    Ok(csv(&header("soliton", cfg, tol), &["x", "v", "u", "X", "Y", "Z", "residual_h"], &rows))
}

fn c_json(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn spectrum_info(cfg: &RunConfig) -> Result<String> {
    let nl = cfg.nonlinearity()?;
    let p = ModelParams::for_model(&nl, cfg.f64("omega")?)?;
    let (re, im) = cfg.pair("lambda")?;
    let lambda = Complex64::new(re, im);
    let br = xi_branches(lambda, &p);
    let xi: Vec<_> = br.xi.iter().map(|row| row.iter().map(|&z| c_json(z)).collect::<Vec<_>>()).collect();
    let vectors = match asymptotic_eigenvectors(lambda, &p) {
        Ok(v) => json!(v
            .iter()
            .map(|row| row.iter().map(|vec| vec.iter().map(|&z| c_json(z)).collect::<Vec<_>>()).collect::<Vec<_>>())
            .collect::<Vec<_>>()),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let spectra: serde_json::Map<_, _> = [("H-", OperatorKind::Hminus), ("H+", OperatorKind::Hplus), ("L", OperatorKind::L)]
        .into_iter()
        .map(|(name, kind)| {
            let s = continuous_spectrum(kind, &p);
            (name.to_string(), json!({ "set": s, "contains_lambda": s.contains(lambda) }))
        })
        .collect();
    let v = json!({
        "model": nl.name(),
        "omega": p.omega,
        "m": p.m,
        "m_minus": p.m_minus,
        "m_plus": p.m_plus,
        "kappa": p.kappa,
        "mu": p.mu,
        "lambda": c_json(lambda),
        "xi": xi,
        "decays_right": br.decays_right,
        "decays_left": br.decays_left,
        "on_cut": br.on_cut,
        "eigenvectors": vectors,
        "continuous_spectrum": spectra,
    });
    Ok(serde_json::to_string_pretty(&v).expect("json") + "\n")
}

fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidConfig(format!("grid '{s}' must look like 50x50"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn evans_scan(cfg: &RunConfig) -> Result<(String, String)> {
    let omega = cfg.f64("omega")?;
    let p = profile_for(cfg, omega)?;
    let r = cfg.f64_or("R", 20.0)?;
    let (n_re, n_im) = parse_grid(cfg.get("grid").unwrap_or("50x50"))?;
    let rect = Rect::new(cfg.pair("re")?, cfg.pair("im")?);
    let map = scan_region(&p, rect, n_re, n_im, r)?;
    let rows: Vec<Vec<f64>> = map
        .samples
        .iter()
        .map(|s| vec![s.lambda.re, s.lambda.im, s.e_minus.re, s.e_minus.im, s.e_plus.re, s.e_plus.im, s.scale])
        .collect();
    let text = csv(
        &header("evans-scan", cfg, "dopri5 rtol 1e-11, renormalization 1e6"),
        &["re_lambda", "im_lambda", "reEm", "imEm", "reEp", "imEp", "scale"],
        &rows,
    );
    let mut zeros: Vec<Zero> = vec![];
    for cell in map.candidates_minus.iter().chain(&map.candidates_plus) {
        match refine_zero(&p, cell.center(), r) {
            Ok(z) if !zeros.iter().any(|y| (y.lambda - z.lambda).norm() < 1e-7) => zeros.push(z),
            Ok(_) => {}
            Err(e) => log::warn!("refinement from {} failed: {e}", cell.center()),
        }
    }
    zeros.sort_by(|a, b| (a.lambda.im, a.lambda.re).partial_cmp(&(b.lambda.im, b.lambda.re)).unwrap());
    let v = json!({
        "omega": omega,
        "R": r,
        "candidates_minus": map.candidates_minus,
        "candidates_plus": map.candidates_plus,
        "zeros": zeros,
    });
    Ok((text, serde_json::to_string_pretty(&v).expect("json") + "\n"))
}

fn h_spectrum(cfg: &RunConfig) -> Result<String> {
    let kind = match cfg.get("kind").unwrap_or("h+") {
        "h-" | "H-" | "hminus" => OperatorKind::Hminus,
        "h+" | "H+" | "hplus" => OperatorKind::Hplus,
        other => return Err(Error::InvalidConfig(format!("kind '{other}' is not h- or h+"))),
    };
    let step = cfg.f64_or("step", 0.01)?;
    let r = cfg.f64_or("R", 20.0)?;
    let mut rows = vec![];
    for omega in cfg.range("omega_range")? {
        let p = profile_for(cfg, omega)?;
        for e in crate::evans::h_spectrum_scan(kind, &p, (-2.0 * p.params.m, 2.0 * p.params.m), step, r)? {
            rows.push(vec![omega, e]);
        }
    }
    Ok(csv(&header("h-spectrum", cfg, "bisection 1e-12, guard band 1e-3"), &["omega", "eigenvalue"], &rows))
}

fn resonance_csv(cfg: &RunConfig) -> Result<String> {
    let nl = cfg.nonlinearity()?;
    let tag = ThresholdTag::parse(cfg.get("tag").unwrap_or("hp-mminus"))?;
    let r = cfg.f64_or("R", 20.0)?;
    let mut rows = vec![];
    for omega in cfg.range("omega_range")? {
        let ph = resonance_phase(&nl, tag, omega, r)?;
        rows.push(vec![omega, ph.exact_phase, ph.wkb_phase, ph.n_nearest as f64]);
    }
    Ok(csv(
        &header("resonance", cfg, "dopri5 rtol 1e-10, G7K15 quadrature 1e-10"),
        &["omega", "exact_phase", "wkb_phase", "n_nearest"],
        &rows,
    ))
}

fn crossing_json(cfg: &RunConfig) -> Result<String> {
    let nl = cfg.nonlinearity()?;
    let tag = ThresholdTag::parse(cfg.get("tag").unwrap_or("hp-mminus"))?;
    let n: i64 = cfg
        .get("find_crossing")
        .unwrap_or_default()
        .parse()
        .map_err(|_| Error::InvalidConfig("find_crossing must be an integer".into()))?;
    let bracket = cfg.pair("bracket")?;
    let c = resonance_crossings(&nl, tag, n, bracket, cfg.f64_or("R", 20.0)?)?;
    let v = json!({ "tag": tag.as_str(), "n": n, "bracket": [bracket.0, bracket.1], "crossing": c });
    Ok(serde_json::to_string_pretty(&v).expect("json") + "\n")
}
