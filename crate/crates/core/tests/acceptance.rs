//! Acceptance suite: one PASS/FAIL line per criterion, with the measured
//! values and the runtime. Criteria listed in `KNOWN_RED` are expected to fail
//! for reasons outside this code (see the README); they still print FAIL, and
//! the binary exits non-zero if any other criterion fails or a known-red one
//! unexpectedly passes.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptdoublet_core::contour::{build_grid, validate_contour, ContourGrid, EpsilonProfile};
use ptdoublet_core::numeric::eigen::SpuriousFilter;
use ptdoublet_core::numeric::matching::{match_spectrum, refine_bound_states};
use ptdoublet_core::numeric::operator::discretize;
use ptdoublet_core::potentials::{max_liouville_residual, EckartParams, Model, NatanzonParams};
use ptdoublet_core::spectrum::{c_min, doublet, eckart_levels, solve_delta, Branch, LevelOutcome, RootKind};
use ptdoublet_core::wavefn::{
    count_nodes, decay_rate, default_window, jacobi_root_count, liouville_ratio_spread, sample_state, schrodinger_residual,
    StateSpec,
};
use ptdoublet_core::C64;

/// Criteria that cannot pass in double precision.
const KNOWN_RED: &[u32] = &[1];

struct Outcome {
    pass: bool,
    detail: String,
}

fn default_grid() -> ContourGrid {
    build_grid(EpsilonProfile::decaying(0.25).unwrap(), -12.0, 12.0, 2001).unwrap()
}

fn natanzon() -> NatanzonParams {
    NatanzonParams::new(1.0, 10.0).unwrap()
}

/// `(N, branch)` for N in {0, 1} of (beta = 1, C = 10).
fn doublet_states() -> Vec<StateSpec> {
    let mut out = Vec::new();
    for n in 0..2 {
        for b in [Branch::Minus, Branch::Plus] {
            out.push(StateSpec::natanzon(natanzon(), n, b).unwrap());
        }
    }
    out
}

fn c1_contour() -> Outcome {
    let (mut implicit, mut comp, mut scaled, mut z0) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for eps0 in [0.1, 0.25, 0.5] {
        let g = build_grid(EpsilonProfile::decaying(eps0).unwrap(), -12.0, 12.0, 2001).unwrap();
        let v = validate_contour(&g);
        implicit = implicit.max(v.implicit_sin.max(v.implicit_cos));
        comp = comp.max(v.composition);
        scaled = scaled.max(v.implicit_scaled.max(v.composition_scaled));
        let centre = &g.points()[1000];
        z0 = z0.max((centre.z - eps0.sin().ln()).abs());
    }
    Outcome {
        pass: implicit < 1e-12 && comp < 1e-12 && z0 < 1e-14,
        detail: format!("implicit {implicit:.2e}, composition {comp:.2e} (limit 1e-12 absolute); scaled by max(1,e^Z) {scaled:.2e}; |Z(0) - ln sin eps0| {z0:.2e}"),
    }
}

fn cubic_value(n: u32, beta: f64, c: f64, x: f64) -> f64 {
    let nf = f64::from(n);
    (2.0 * nf + 1.0) * x * x * x + (nf * nf + nf + 1.0 - c) * x * x + beta * beta
}

/// Positive roots by a dense scan for sign changes of the cubic.
fn scan_positive_roots(n: u32, beta: f64, c: f64) -> usize {
    let nf = f64::from(n);
    let a = 2.0 * nf + 1.0;
    let bound = 1.0 + ((nf * nf + nf + 1.0 - c).abs()).max(beta * beta) / a;
    let steps = 200_000;
    let mut prev = cubic_value(n, beta, c, 0.0);
    let mut count = 0;
    for k in 1..=steps {
        let x = bound * (k as f64 / steps as f64).powi(2);
        let v = cubic_value(n, beta, c, x);
        if (v > 0.0) != (prev > 0.0) {
            count += 1;
        }
        prev = v;
    }
    count
}

fn c2_cubic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_res, mut worst_vieta, mut disagreements) = (0.0f64, 0.0f64, 0);
    for _ in 0..1000 {
        let n: u32 = rng.random_range(0..=5);
        let beta = 5.0 * (1.0 - rng.random::<f64>());
        let c = 50.0 * (1.0 - rng.random::<f64>());
        let roots = solve_delta(n, beta, c).unwrap();
        let nf = f64::from(n);
        let (a, b, d) = (2.0 * nf + 1.0, nf * nf + nf + 1.0 - c, beta * beta);
        for z in roots.roots {
            let p = (a * z + b) * z * z + d;
            let scale = a * z.norm().powi(3) + b.abs() * z.norm_sqr() + d;
            worst_res = worst_res.max(p.norm() / scale);
        }
        let product: C64 = roots.roots.iter().product();
        let expected = -beta * beta / a;
        worst_vieta = worst_vieta.max((product - expected).norm() / expected.abs());
        let positive = roots.kinds.iter().filter(|k| **k == RootKind::PositiveReal).count();
        let outcome_pos = doublet(n, beta, c).members().len();
        let scanned = scan_positive_roots(n, beta, c);
        if positive != scanned || (scanned == 2) != matches!(doublet(n, beta, c), LevelOutcome::Doublet(_)) || outcome_pos != scanned
        {
            disagreements += 1;
        }
    }
    Outcome {
        pass: worst_res < 1e-10 && worst_vieta < 1e-12 && disagreements == 0,
        detail: format!("root residual {worst_res:.2e}, Vieta {worst_vieta:.2e}, classification disagreements {disagreements}/1000"),
    }
}

fn c3_cmin() -> Outcome {
    let expected = 1.0 + 3.0 * 4f64.powf(-1.0 / 3.0);
    let err = (c_min(0, 1.0) - expected).abs();
    Outcome { pass: err < 1e-8, detail: format!("c_min(0,1) = {:.12}, error {err:.2e}", c_min(0, 1.0)) }
}

fn c4_liouville() -> Outcome {
    let g = default_grid();
    let mut worst = 0.0f64;
    for st in doublet_states() {
        let partner = st.eckart_partner().unwrap();
        let StateSpec::Eckart { params, .. } = partner else { unreachable!() };
        let r = max_liouville_residual(C64::new(partner.energy(), 0.0), C64::new(st.energy(), 0.0), &params, &natanzon(), &g)
            .unwrap();
        worst = worst.max(r);
    }
    Outcome { pass: worst < 1e-9, detail: format!("max relative residual {worst:.2e}") }
}

fn analytic_states() -> Vec<StateSpec> {
    let p = EckartParams::new(3.0, 1.0).unwrap();
    let mut out = vec![StateSpec::eckart(p, 0).unwrap(), StateSpec::eckart(p, 1).unwrap()];
    out.extend(doublet_states());
    out
}

fn c5_residuals() -> Outcome {
    let g = default_grid();
    let mut worst = 0.0f64;
    for st in analytic_states() {
        let s = sample_state(&st, &g).unwrap();
        worst = worst.max(schrodinger_residual(&s, &st.model(), C64::new(st.energy(), 0.0), &g).unwrap());
    }
    Outcome { pass: worst < 1e-5, detail: format!("max residual over 6 states {worst:.2e}") }
}

fn c6_wavefunction_map() -> Outcome {
    let g = default_grid();
    let mut worst = 0.0f64;
    for st in doublet_states() {
        worst = worst.max(liouville_ratio_spread(&sample_state(&st, &g).unwrap(), &g).unwrap());
    }
    Outcome { pass: worst < 1e-8, detail: format!("max ratio spread over 4 states {worst:.2e}") }
}

fn c7_decay() -> Outcome {
    let g = default_grid();
    let mut pass = true;
    let mut parts = Vec::new();
    for b in [Branch::Minus, Branch::Plus] {
        let st = StateSpec::natanzon(natanzon(), 0, b).unwrap();
        let (l, r) = decay_rate(&sample_state(&st, &g).unwrap(), &g).unwrap();
        let d = st.delta();
        let err = ((l + d).abs()).max((r + d).abs()) / d;
        pass &= err < 0.02;
        parts.push(format!("delta {d:.4}: slopes ({l:.4}, {r:.4}), rel err {err:.1e}"));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn c8_nodes() -> Outcome {
    let g = default_grid();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 0..3u32 {
        if 10.0 < c_min(n, 1.0) {
            parts.push(format!("N={n} skipped (C_min {:.3})", c_min(n, 1.0)));
            continue;
        }
        for b in [Branch::Minus, Branch::Plus] {
            let st = StateSpec::natanzon(natanzon(), n, b).unwrap();
            let count = count_nodes(&sample_state(&st, &g).unwrap(), &g);
            let oracle = jacobi_root_count(&st, &g, &default_window(&g, &st));
            pass &= count == Ok(n) && oracle == Ok(n);
            parts.push(format!("N={n} q={:+}: {count:?}/{oracle:?}", b.q()));
        }
    }
    Outcome { pass, detail: parts.join("; ") }
}

/// The arch used by the numeric oracle; see the README for why it is wider
/// than the default.
const NUMERIC_EPS0: f64 = 1.0;

fn c9_numeric() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let arch = EpsilonProfile::decaying(NUMERIC_EPS0).unwrap();
    let model = Model::Natanzon(natanzon());
    let op = |profile, model, n| discretize(&build_grid(profile, -12.0, 12.0, n).unwrap(), &model).unwrap();
    let levels = refine_bound_states(&op(arch, model, 2001), &op(arch, model, 4001), &SpuriousFilter::default(), true).unwrap();
    let LevelOutcome::Doublet(d) = doublet(0, 1.0, 10.0) else { unreachable!() };
    let analytic = [C64::new(d.e_minus, 0.0), C64::new(d.e_plus, 0.0)];
    let numeric: Vec<_> = levels.iter().map(|l| l.level()).collect();
    for m in match_spectrum(&numeric, &analytic, 1e-3) {
        let ok = m.converged && m.numeric_energy.is_some_and(|z| z.im.abs() < 1e-6) && m.node_count == Some(0);
        pass &= ok;
        parts.push(format!(
            "E={:.4}: numeric {:?}, rel err {:.1e}, nodes {:?}",
            m.analytic_energy.re,
            m.numeric_energy.map(|z| (z.re, z.im)),
            m.relative_error,
            m.node_count
        ));
    }

    let p = EckartParams::new(3.0, 1.0).unwrap();
    let straight = EpsilonProfile::constant(0.25).unwrap();
    let levels = refine_bound_states(
        &op(straight, Model::Eckart(p), 2001),
        &op(straight, Model::Eckart(p), 4001),
        &SpuriousFilter::default(),
        false,
    )
    .unwrap();
    let analytic: Vec<C64> = eckart_levels(&p).unwrap().iter().map(|l| C64::new(l.energy, 0.0)).collect();
    let numeric: Vec<_> = levels.iter().map(|l| l.level()).collect();
    for m in match_spectrum(&numeric, &analytic, 1e-3) {
        pass &= m.converged;
        parts.push(format!("Eckart E={:.2}: rel err {:.1e}", m.analytic_energy.re, m.relative_error));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn c10_hermitian_limit() -> Outcome {
    let mut pass = true;
    let mut singles = 0;
    for n in 0..10u32 {
        let nf = f64::from(n);
        let admissible = 10.0 - nf * nf - nf - 1.0 > 0.0;
        let out = doublet(n, 0.0, 10.0);
        let ok = match out {
            LevelOutcome::SingleLevel { degenerate: false, .. } => admissible,
            LevelOutcome::NoDoublet { .. } => !admissible,
            _ => false,
        };
        singles += usize::from(matches!(out, LevelOutcome::SingleLevel { .. }));
        pass &= ok && out.members().len() <= 1;
    }
    Outcome { pass, detail: format!("{singles} single levels for N = 0..9, no doublets") }
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(u32, &str, Check, Duration); 10] = [
        (1, "contour identities", c1_contour, Duration::from_secs(1)),
        (2, "cubic roots, Vieta, classification", c2_cubic, Duration::from_secs(5)),
        (3, "C_min closed form", c3_cmin, Duration::from_secs(1)),
        (4, "Liouville identity", c4_liouville, Duration::from_secs(1)),
        (5, "Schrodinger residuals", c5_residuals, Duration::from_secs(2)),
        (6, "wavefunction map", c6_wavefunction_map, Duration::from_secs(1)),
        (7, "decay slopes", c7_decay, Duration::from_secs(1)),
        (8, "equal node counts in each doublet", c8_nodes, Duration::from_secs(10)),
        (9, "independent numeric confirmation", c9_numeric, Duration::from_secs(60)),
        (10, "Hermitian limit", c10_hermitian_limit, Duration::from_secs(1)),
    ];
    let mut unexpected = 0;
    for (id, name, check, budget) in criteria {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= budget;
        let status = if pass { "PASS" } else { "FAIL" };
        let known = KNOWN_RED.contains(&id);
        println!(
            "{status} criterion {id:>2} ({name}): {} [{:.2} s, budget {} s]{}",
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if known { " (known red)" } else { "" }
        );
        if pass == known {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria did not have the expected outcome");
        ExitCode::FAILURE
    }
}
