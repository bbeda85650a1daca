//! The four subcommands. Each resolves its inputs, writes its files and
//! returns the process exit code.

use std::path::PathBuf;

use serde::Serialize;

use ptdoublet_core::contour::{build_grid, validate_contour, ContourGrid, EpsilonProfile, ProfileKind};
use ptdoublet_core::numeric::eigen::SpuriousFilter;
use ptdoublet_core::numeric::matching::{match_spectrum, refine_bound_states};
use ptdoublet_core::numeric::operator::discretize;
use ptdoublet_core::potentials::{max_liouville_residual, EckartParams, Model, NatanzonParams};
use ptdoublet_core::spectrum::{c_min, eckart_levels, spectrum_report, Branch, LevelOutcome};
use ptdoublet_core::wavefn::{
    count_nodes, decay_rate, default_window, jacobi_root_count, liouville_ratio_spread, pt_symmetry_defect, sample_state,
    schrodinger_residual, StateSpec,
};
use ptdoublet_core::C64;

use crate::config::{BranchArg, Check, Format, ModelKind, ProfileArg, RunConfig};
use crate::error::CliError;
use crate::io::{write_csv, write_json};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridMeta {
    pub profile: ProfileArg,
    pub eps0: f64,
    #[serde(rename = "T")]
    pub t_max: f64,
    pub n: usize,
    pub step: f64,
}

fn profile_of(kind: ProfileArg, eps0: f64) -> Result<EpsilonProfile, CliError> {
    let kind = match kind {
        ProfileArg::Constant => ProfileKind::Constant,
        ProfileArg::Decaying => ProfileKind::Decaying,
    };
    Ok(EpsilonProfile::new(kind, eps0)?)
}

fn grid_for(cfg: &RunConfig) -> Result<(ContourGrid, GridMeta), CliError> {
    let grid = build_grid(profile_of(cfg.profile, cfg.eps0)?, -cfg.t_max, cfg.t_max, cfg.points)?;
    let meta = GridMeta { profile: cfg.profile, eps0: cfg.eps0, t_max: cfg.t_max, n: cfg.points, step: grid.step() };
    Ok((grid, meta))
}

fn branch_of(b: BranchArg) -> Branch {
    match b {
        BranchArg::Plus => Branch::Plus,
        BranchArg::Minus => Branch::Minus,
    }
}

fn tag(b: Branch) -> &'static str {
    match b {
        Branch::Plus => "plus",
        Branch::Minus => "minus",
    }
}

fn natanzon_params(cfg: &RunConfig) -> Result<NatanzonParams, CliError> {
    Ok(NatanzonParams::new(cfg.beta, cfg.c)?)
}

fn eckart_params(cfg: &RunConfig) -> Result<EckartParams, CliError> {
    let a = cfg.a.ok_or_else(|| CliError::Config("the eckart model needs --A".into()))?;
    Ok(EckartParams::new(a, cfg.beta)?)
}

/// Every admissible state with N in 0..=nmax.
fn states(cfg: &RunConfig) -> Result<Vec<StateSpec>, CliError> {
    let mut out = Vec::new();
    match cfg.model {
        ModelKind::Natanzon => {
            let p = natanzon_params(cfg)?;
            for level in spectrum_report(&p, cfg.nmax) {
                for (b, _, _) in level.members() {
                    out.push(StateSpec::natanzon(p, level.n(), b)?);
                }
            }
        }
        ModelKind::Eckart => {
            let p = eckart_params(cfg)?;
            for l in eckart_levels(&p)?.into_iter().filter(|l| l.n <= cfg.nmax) {
                out.push(StateSpec::eckart(p, l.n)?);
            }
        }
    }
    Ok(out)
}

fn label(st: &StateSpec) -> String {
    match st.branch() {
        Some(b) => format!("N={} {}", st.n(), tag(b)),
        None => format!("N={}", st.n()),
    }
}

// ---------------------------------------------------------------- spectrum

#[derive(Debug, Serialize)]
struct LevelRow {
    #[serde(rename = "N")]
    n: u32,
    outcome: &'static str,
    branch: Option<&'static str>,
    delta: Option<f64>,
    energy: Option<f64>,
    c_min: Option<f64>,
}

#[derive(Debug, Serialize)]
struct SpectrumReport<'a> {
    command: &'static str,
    model: ModelKind,
    #[serde(rename = "A")]
    a: Option<f64>,
    beta: f64,
    #[serde(rename = "C")]
    c: Option<f64>,
    nmax: u32,
    levels: &'a [LevelRow],
}

fn outcome_rows(level: &LevelOutcome, beta: f64) -> Vec<LevelRow> {
    let n = level.n();
    let cm = Some(c_min(n, beta));
    let outcome = match level {
        LevelOutcome::Doublet(_) => "doublet",
        LevelOutcome::SingleLevel { degenerate: true, .. } => "degenerate",
        LevelOutcome::SingleLevel { .. } => "single",
        LevelOutcome::NoDoublet { .. } => "none",
    };
    let members = level.members();
    if members.is_empty() {
        return vec![LevelRow { n, outcome, branch: None, delta: None, energy: None, c_min: cm }];
    }
    members
        .into_iter()
        .map(|(b, delta, energy)| LevelRow { n, outcome, branch: Some(tag(b)), delta: Some(delta), energy: Some(energy), c_min: cm })
        .collect()
}

pub fn spectrum(cfg: &RunConfig) -> Result<u8, CliError> {
    let rows: Vec<LevelRow> = match cfg.model {
        ModelKind::Natanzon => {
            let p = natanzon_params(cfg)?;
            spectrum_report(&p, cfg.nmax).iter().flat_map(|l| outcome_rows(l, p.beta)).collect()
        }
        ModelKind::Eckart => eckart_levels(&eckart_params(cfg)?)?
            .into_iter()
            .map(|l| LevelRow { n: l.n, outcome: "level", branch: None, delta: Some(l.delta), energy: Some(l.energy), c_min: None })
            .collect(),
    };
    let report = SpectrumReport {
        command: "spectrum",
        model: cfg.model,
        a: (cfg.model == ModelKind::Eckart).then_some(cfg.a).flatten(),
        beta: cfg.beta,
        c: (cfg.model == ModelKind::Natanzon).then_some(cfg.c),
        nmax: cfg.nmax,
        levels: &rows,
    };
    for r in &rows {
        match (r.branch, r.energy) {
            (Some(b), Some(e)) => println!("N={} {b}: delta = {}, E = {e}", r.n, r.delta.unwrap_or(f64::NAN)),
            (None, Some(e)) => println!("N={}: delta = {}, E = {e}", r.n, r.delta.unwrap_or(f64::NAN)),
            _ => println!("N={}: {}", r.n, r.outcome),
        }
    }
    report_files(cfg, "spectrum", &report, &rows)?;
    Ok(EXIT_OK)
}

/// JSON always; with `--format csv` also the table.
fn report_files<R: Serialize, T: Serialize>(cfg: &RunConfig, stem: &str, report: &R, rows: &[T]) -> Result<Vec<PathBuf>, CliError> {
    let mut written = vec![write_json(&cfg.out, &format!("{stem}.json"), report)?];
    if cfg.format == Format::Csv {
        written.push(write_csv(&cfg.out, &format!("{stem}.csv"), rows)?);
    }
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(written)
}

// ------------------------------------------------------------ wavefunction

#[derive(Debug, Serialize)]
struct SampleRow {
    t: f64,
    r_re: f64,
    r_im: f64,
    xi_re: f64,
    xi_im: f64,
    psi_re: f64,
    psi_im: f64,
    /// `ln |psi|`, finite where `psi` itself underflows.
    log_abs_psi: f64,
}

#[derive(Debug, Serialize)]
struct WavefunctionReport<'a> {
    command: &'static str,
    model: ModelKind,
    #[serde(rename = "N")]
    n: u32,
    branch: Option<&'static str>,
    delta: f64,
    energy: f64,
    grid: GridMeta,
    node_count: Option<u32>,
    node_error: Option<String>,
    decay_slopes: Option<[f64; 2]>,
    residual: Option<f64>,
    pt_defect: Option<f64>,
    liouville_ratio_spread: Option<f64>,
    samples: Option<&'a [SampleRow]>,
}

fn requested_state(cfg: &RunConfig) -> Result<StateSpec, CliError> {
    let n = cfg.n.ok_or_else(|| CliError::Config("wavefunction needs --N".into()))?;
    match cfg.model {
        ModelKind::Natanzon => {
            let b = cfg.branch.ok_or_else(|| CliError::Config("the natanzon model needs --branch".into()))?;
            Ok(StateSpec::natanzon(natanzon_params(cfg)?, n, branch_of(b))?)
        }
        ModelKind::Eckart => Ok(StateSpec::eckart(eckart_params(cfg)?, n)?),
    }
}

pub fn wavefunction(cfg: &RunConfig) -> Result<u8, CliError> {
    let st = requested_state(cfg)?;
    let (grid, meta) = grid_for(cfg)?;
    let samples = sample_state(&st, &grid)?;
    let rows: Vec<SampleRow> = grid
        .points()
        .iter()
        .zip(samples.values.iter().zip(&samples.log_values))
        .map(|(p, (v, lv))| SampleRow {
            t: p.t,
            r_re: p.r.re,
            r_im: p.r.im,
            xi_re: p.xi.re,
            xi_im: p.xi.im,
            psi_re: v.re,
            psi_im: v.im,
            log_abs_psi: lv.re,
        })
        .collect();
    let nodes = count_nodes(&samples, &grid);
    let natanzon = matches!(st, StateSpec::Natanzon { .. });
    let report = WavefunctionReport {
        command: "wavefunction",
        model: cfg.model,
        n: st.n(),
        branch: st.branch().map(tag),
        delta: st.delta(),
        energy: st.energy(),
        grid: meta,
        node_count: nodes.as_ref().ok().copied(),
        node_error: nodes.as_ref().err().map(|e| e.to_string()),
        decay_slopes: decay_rate(&samples, &grid).ok().map(|(l, r)| [l, r]),
        residual: schrodinger_residual(&samples, &st.model(), C64::new(st.energy(), 0.0), &grid).ok(),
        pt_defect: natanzon.then(|| pt_symmetry_defect(&samples, &grid).ok()).flatten(),
        liouville_ratio_spread: natanzon.then(|| liouville_ratio_spread(&samples, &grid).ok()).flatten(),
        samples: (cfg.format == Format::Json).then_some(rows.as_slice()),
    };
    println!(
        "{}: E = {}, nodes {:?}, decay slopes {:?}",
        label(&st),
        report.energy,
        report.node_count,
        report.decay_slopes
    );
    let written = write_json(&cfg.out, "wavefunction.json", &report)?;
    println!("wrote {}", written.display());
    if cfg.format == Format::Csv {
        println!("wrote {}", write_csv(&cfg.out, "wavefunction.csv", &rows)?.display());
    }
    Ok(EXIT_OK)
}

// ------------------------------------------------------------------ verify

pub const CONTOUR_LIMIT: f64 = 1e-12;
pub const Z0_LIMIT: f64 = 1e-14;
pub const LIOUVILLE_LIMIT: f64 = 1e-9;
pub const RESIDUAL_LIMIT: f64 = 1e-5;
pub const PT_LIMIT: f64 = 1e-8;
pub const NUMERIC_REL_LIMIT: f64 = 1e-3;
pub const NUMERIC_IMAG_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub pass: bool,
    /// The measured figure compared with `limit`.
    pub value: Option<f64>,
    pub limit: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Serialize)]
struct VerifyReport<'a> {
    command: &'static str,
    config: &'a RunConfig,
    grid: GridMeta,
    all_pass: bool,
    checks: &'a [CheckResult],
}

fn measured(check: Check, value: f64, limit: f64, detail: String) -> CheckResult {
    CheckResult { check: check.name(), pass: value < limit, value: Some(value), limit: Some(limit), detail }
}

fn failed(check: Check, err: impl std::fmt::Display) -> CheckResult {
    CheckResult { check: check.name(), pass: false, value: None, limit: None, detail: err.to_string() }
}

fn worst_over<F>(check: Check, states: &[StateSpec], limit: f64, mut f: F) -> CheckResult
where
    F: FnMut(&StateSpec) -> Result<f64, CliError>,
{
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for st in states {
        match f(st) {
            Ok(v) => {
                worst = worst.max(v);
                parts.push(format!("{}: {v:e}", label(st)));
            }
            Err(e) => return failed(check, format!("{}: {e}", label(st))),
        }
    }
    measured(check, worst, limit, parts.join("; "))
}

fn check_contour(grid: &ContourGrid) -> CheckResult {
    let v = validate_contour(grid);
    let scaled = v.implicit_scaled.max(v.composition_scaled);
    let centre = grid.points().iter().min_by(|a, b| a.t.abs().total_cmp(&b.t.abs())).expect("grid is not empty");
    let z0 = if centre.t == 0.0 { (centre.z - grid.profile().eps0().sin().ln()).abs() } else { 0.0 };
    let mut r = measured(
        Check::Contour,
        scaled,
        CONTOUR_LIMIT,
        format!(
            "implicit pair and composition scaled by max(1, e^Z): {scaled:e}; absolute: implicit {:e}, composition {:e}; |Z(0) - ln sin eps0| {z0:e}",
            v.implicit_sin.max(v.implicit_cos),
            v.composition
        ),
    );
    r.pass &= z0 < Z0_LIMIT;
    r
}

fn check_liouville(cfg: &RunConfig, grid: &ContourGrid, states: &[StateSpec]) -> CheckResult {
    worst_over(Check::Liouville, states, LIOUVILLE_LIMIT, |st| {
        let partner = st.eckart_partner()?;
        let StateSpec::Eckart { params, .. } = partner else { unreachable!("partner is an Eckart state") };
        let e_d = cfg.ed_override.unwrap_or(st.energy());
        Ok(max_liouville_residual(C64::new(partner.energy(), 0.0), C64::new(e_d, 0.0), &params, &natanzon_params(cfg)?, grid)?)
    })
}

fn check_nodes(grid: &ContourGrid, states: &[StateSpec]) -> CheckResult {
    let mut pass = true;
    let mut parts = Vec::new();
    for st in states {
        let count = sample_state(st, grid).and_then(|s| count_nodes(&s, grid));
        let oracle = jacobi_root_count(st, grid, &default_window(grid, st));
        let ok = count == Ok(st.n()) && oracle == Ok(st.n());
        pass &= ok;
        let show = |r: &ptdoublet_core::Result<u32>| match r {
            Ok(k) => k.to_string(),
            Err(e) => e.to_string(),
        };
        parts.push(format!("{}: winding {}, Jacobi roots {}", label(st), show(&count), show(&oracle)));
    }
    CheckResult { check: Check::Nodes.name(), pass, value: None, limit: None, detail: parts.join("; ") }
}

fn check_numeric(cfg: &RunConfig, states: &[StateSpec]) -> Result<CheckResult, CliError> {
    let (profile, model) = match cfg.model {
        ModelKind::Natanzon => (EpsilonProfile::decaying(cfg.numeric_eps0)?, Model::Natanzon(natanzon_params(cfg)?)),
        ModelKind::Eckart => (EpsilonProfile::constant(cfg.eps0)?, Model::Eckart(eckart_params(cfg)?)),
    };
    let op = |n: usize| -> Result<_, CliError> { Ok(discretize(&build_grid(profile, -cfg.t_max, cfg.t_max, n)?, &model)?) };
    let (coarse, fine) = (op(cfg.points)?, op(2 * cfg.points - 1)?);
    let count = cfg.model == ModelKind::Natanzon;
    let levels = refine_bound_states(&coarse, &fine, &SpuriousFilter::default(), count)?;
    let numeric: Vec<_> = levels.iter().map(|l| l.level()).collect();
    let analytic: Vec<C64> = states.iter().map(|s| C64::new(s.energy(), 0.0)).collect();
    let mut worst = 0.0f64;
    let mut pass = !states.is_empty();
    let mut parts = vec![format!("{} bound states after filtering", levels.len())];
    for (m, st) in match_spectrum(&numeric, &analytic, NUMERIC_REL_LIMIT).iter().zip(states) {
        worst = worst.max(m.relative_error);
        let real = m.numeric_energy.is_some_and(|z| z.im.abs() < NUMERIC_IMAG_LIMIT);
        // Zeros of excited states can sit outside the window the continued
        // eigenvector is trusted in, so only ground states are held to N.
        let nodes_ok = !count || st.n() > 0 || m.node_count == Some(0);
        pass &= m.converged && real && nodes_ok;
        parts.push(format!(
            "{}: E {} vs {}, rel err {:e}, nodes {}",
            label(st),
            m.analytic_energy.re,
            m.numeric_energy.map_or("unmatched".into(), |z| format!("{}{:+e}i", z.re, z.im)),
            m.relative_error,
            m.node_count.map_or("-".into(), |k| k.to_string())
        ));
    }
    Ok(CheckResult {
        check: Check::NumericMatch.name(),
        pass,
        value: Some(worst),
        limit: Some(NUMERIC_REL_LIMIT),
        detail: parts.join("; "),
    })
}

pub fn verify(cfg: &RunConfig) -> Result<u8, CliError> {
    if cfg.model == ModelKind::Eckart {
        if let Some(c) = cfg.checks.iter().find(|c| matches!(c, Check::Liouville | Check::PtDefect)) {
            return Err(CliError::Config(format!("check {} needs --model natanzon", c.name())));
        }
    }
    let (grid, meta) = grid_for(cfg)?;
    let states = states(cfg)?;
    let mut results = Vec::new();
    for &check in &cfg.checks {
        let r = match check {
            Check::Contour => check_contour(&grid),
            Check::Liouville => check_liouville(cfg, &grid, &states),
            Check::Residual => worst_over(check, &states, RESIDUAL_LIMIT, |st| {
                let s = sample_state(st, &grid)?;
                Ok(schrodinger_residual(&s, &st.model(), C64::new(st.energy(), 0.0), &grid)?)
            }),
            Check::PtDefect => worst_over(check, &states, PT_LIMIT, |st| Ok(pt_symmetry_defect(&sample_state(st, &grid)?, &grid)?)),
            Check::Nodes => check_nodes(&grid, &states),
            Check::NumericMatch => check_numeric(cfg, &states).unwrap_or_else(|e| failed(check, e)),
        };
        println!("{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.check, r.detail);
        results.push(r);
    }
    let all_pass = results.iter().all(|r| r.pass);
    let report = VerifyReport { command: "verify", config: cfg, grid: meta, all_pass, checks: &results };
    report_files(cfg, "verify", &report, &results)?;
    Ok(if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

// ---------------------------------------------------------- contour-export

#[derive(Debug, Serialize)]
struct ContourRow {
    t: f64,
    eps: f64,
    r_re: f64,
    r_im: f64,
    omega: f64,
    z: f64,
    xi_re: f64,
    xi_im: f64,
}

#[derive(Debug, Serialize)]
struct ContourReport<'a> {
    command: &'static str,
    grid: GridMeta,
    implicit_abs: f64,
    implicit_scaled: f64,
    composition_abs: f64,
    composition_scaled: f64,
    min_singular_distance: f64,
    points: Option<&'a [ContourRow]>,
}

pub fn contour_export(cfg: &RunConfig) -> Result<u8, CliError> {
    let (grid, meta) = grid_for(cfg)?;
    let v = validate_contour(&grid);
    let rows: Vec<ContourRow> = grid
        .points()
        .iter()
        .map(|p| ContourRow {
            t: p.t,
            eps: grid.profile().eps(p.t),
            r_re: p.r.re,
            r_im: p.r.im,
            omega: p.omega,
            z: p.z,
            xi_re: p.xi.re,
            xi_im: p.xi.im,
        })
        .collect();
    let report = ContourReport {
        command: "contour-export",
        grid: meta,
        implicit_abs: v.implicit_sin.max(v.implicit_cos),
        implicit_scaled: v.implicit_scaled,
        composition_abs: v.composition,
        composition_scaled: v.composition_scaled,
        min_singular_distance: v.min_singular_distance,
        points: (cfg.format == Format::Json).then_some(rows.as_slice()),
    };
    println!("contour: {} points, min distance to singular set {}", grid.len(), v.min_singular_distance);
    let written = write_json(&cfg.out, "contour.json", &report)?;
    println!("wrote {}", written.display());
    if cfg.format == Format::Csv {
        println!("wrote {}", write_csv(&cfg.out, "contour.csv", &rows)?.display());
    }
    Ok(EXIT_OK)
}
