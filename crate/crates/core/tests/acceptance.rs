//! Acceptance criteria, run in order on one thread so the timing bounds are
//! measured without interference. One PASS/FAIL line per criterion; the
//! process exits nonzero when any criterion fails.

use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use faer::{c64, Mat};
use ghost_lab::commands::{cmd_certify, cmd_ghost};
use ghost_lab::config::RunConfig;
use ghost_lab::families::{alt_family, shipped_presets, sl2_family, AltGenerators, FamilySpec, IrrepPolicy};
use ghost_lab::geometry::{coarse_union, markov_gap, propagation, CayleyGraph};
use ghost_lab::ghost::{
    analyze_window, classical_ghost, diagonal_ranks, rank_sequence, truncate_to_j, verify_claim1, verify_claim2,
    verify_claim3, GhostOptions, Window, WindowAnalysis,
};
use ghost_lab::group::QuotientFamily;
use ghost_lab::linalg::{frobenius_distance, hermitian_eigenvalues, kron, CMat};
use ghost_lab::report::{render, without_timing};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn line(text: &str) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").unwrap();
    out.flush().unwrap();
}

fn sl2_window(policy: IrrepPolicy) -> Window {
    Window::full(Arc::new(sl2_family(&[3, 5, 7]).unwrap()), &policy).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn criterion1() -> Outcome {
    type Builder = Box<dyn Fn() -> QuotientFamily>;
    let cases: Vec<(&str, Builder, usize)> = vec![
        (
            "Alt(4)",
            Box::new(|| alt_family(&[4], &AltGenerators::Default).unwrap()),
            12,
        ),
        (
            "Alt(5)",
            Box::new(|| alt_family(&[5], &AltGenerators::Default).unwrap()),
            60,
        ),
        ("SL(2,3)", Box::new(|| sl2_family(&[3]).unwrap()), 24),
        ("SL(2,5)", Box::new(|| sl2_family(&[5]).unwrap()), 120),
        ("SL(2,7)", Box::new(|| sl2_family(&[7]).unwrap()), 336),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, build, expected) in cases {
        let (fam, t) = timed(build);
        let order = fam.orders()[0];
        pass &= order == expected && t < Duration::from_secs(1);
        parts.push(format!("{label}={order} ({:.3}s)", t.as_secs_f64()));
    }
    outcome(pass, parts.join(", "))
}

fn criterion2() -> Outcome {
    let mut cfg = RunConfig::new("sl2");
    cfg.primes = vec![3, 5, 7];
    let (out, t) = timed(|| cmd_certify(&cfg));
    let out = match out {
        Ok(o) => o,
        Err(e) => return outcome(false, format!("certify failed: {e}")),
    };
    let fam = sl2_family(&[3, 5, 7]).unwrap();
    let mut pass = t < Duration::from_secs(5);
    let mut worst: f64 = 0.0;
    let mut lambdas = Vec::new();
    for (spec, level) in out.report["spectra"].as_array().unwrap().iter().zip(fam.levels()) {
        let lambda1 = spec["lambda1"].as_f64().unwrap();
        lambdas.push(lambda1);
        pass &= lambda1 > 0.0;
        // |S|(1 − μ₂) from the Markov operator on the symbol multiset,
        // computed apart from the Laplacian.
        let s = level.symbol_indices();
        let via_markov = s.len() as f64 * markov_gap(&level.group, &s).unwrap();
        let (graph, _) = CayleyGraph::from_level(level).unwrap();
        pass &= graph.distances_from_identity().iter().all(|&d| d != u32::MAX);
        worst = worst.max((ghost_lab::geometry::laplacian_gap(&graph).unwrap().lambda1 - via_markov).abs());
    }
    pass &= worst <= 1e-8;
    outcome(
        pass,
        format!(
            "lambda1 = {lambdas:.6?}, identity defect {worst:.2e}, {:.2}s",
            t.as_secs_f64()
        ),
    )
}

fn criterion3(analysis: &WindowAnalysis, t: Duration) -> Outcome {
    let worst = analysis
        .blocks
        .iter()
        .map(|b| b.projection_distance)
        .fold(0.0, f64::max);
    let largest = analysis.blocks.iter().map(|b| b.dim).max().unwrap_or(0);
    let pass = analysis.blocks.len() == 9 && worst <= 1e-8 && t < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "{} blocks, max Frobenius distance {worst:.2e}, largest block {largest}, {:.1}s",
            analysis.blocks.len(),
            t.as_secs_f64()
        ),
    )
}

fn criterion4(analysis: &WindowAnalysis) -> Outcome {
    match verify_claim1(analysis, &GhostOptions::default()) {
        Ok(r) => outcome(
            r.min_gap > 1e-3 && r.consistent && r.pairs.len() == 9,
            format!(
                "min pair gap {:.6}, min quotient gap {:.6}, all pairs consistent: {}",
                r.min_gap, r.min_quotient_gap, r.consistent
            ),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion5(analysis: &WindowAnalysis) -> Outcome {
    let numeric: Vec<usize> = (0..3).map(|k| analysis.block(k, k).unwrap().rank).collect();
    let oracle: Vec<usize> = (0..3).map(|k| analysis.block(k, k).unwrap().oracle_rank).collect();
    let pass = numeric == [3, 5, 7] && oracle == [3, 5, 7];
    outcome(pass, format!("eigensolve {numeric:?}, character oracle {oracle:?}"))
}

/// Pairs with `dim H_M > |G_N|` among all pairs of a computed window, and
/// whether every one of them has rank zero.
fn vanishing_law(window: &Window, analysis: &WindowAnalysis) -> (usize, bool) {
    let dims = window.dims();
    let mut count = 0;
    let mut ok = true;
    for b in &analysis.blocks {
        if dims[b.m] > window.order(b.n) {
            count += 1;
            ok &= b.rank == 0 && b.oracle_rank == 0;
        }
    }
    (count, ok)
}

/// Steinberg p = 29 over SL(2,3) from generator images: 29 > 24, so the
/// block must have no eigenvalue at 1.
fn steinberg_29_block_top() -> f64 {
    let fam = Arc::new(sl2_family(&[3, 29]).unwrap());
    let w = Window::full(fam.clone(), &IrrepPolicy::Steinberg).unwrap();
    let g3 = &fam.levels()[0].group;
    let pi = w.irrep(1);
    let mut t = Mat::<c64>::zeros(24 * 29, 24 * 29);
    for (&a, &b) in fam.levels()[0]
        .symbol_indices()
        .iter()
        .zip(&fam.levels()[1].symbol_indices())
    {
        let mut left: CMat = Mat::zeros(24, 24);
        for (x, &y) in g3.left_translation(a).iter().enumerate() {
            left[(y as usize, x)] = c64::new(1.0, 0.0);
        }
        t += faer::Scale(c64::new(0.25, 0.0)) * kron(&left, &pi.image(b));
    }
    *hermitian_eigenvalues(&t).unwrap().last().unwrap()
}

fn criterion6(presets: &[(String, Window, WindowAnalysis)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, window, analysis) in presets {
        let (count, ok) = vanishing_law(window, analysis);
        pass &= ok;
        parts.push(format!("{name}: {count} pairs above the bound"));
        if window.policy() == "trivial" {
            let ranks = rank_sequence(&analysis.e, &analysis.oracle_table(window.len())).unwrap();
            let reports: Vec<_> = (0..window.len()).map(|n| verify_claim2(window, &ranks, n)).collect();
            let flagged = reports
                .iter()
                .all(|r| !r.star_star && r.verdict == "fail: (★★) not satisfied by policy");
            let no_vanishing = reports.iter().all(|r| r.vanishing_from.is_none());
            pass &= flagged && no_vanishing;
            parts.push(format!(
                "trivial control flags (★★) failure: {flagged}, no vanishing: {no_vanishing}"
            ));
        }
    }
    let top = steinberg_29_block_top();
    pass &= top < 1.0 - 1e-3;
    parts.push(format!("SL(2,3) x St(29) top eigenvalue {top:.6}"));
    outcome(pass, parts.join("; "))
}

fn criterion7(analysis: &WindowAnalysis) -> Outcome {
    let e = &analysis.e;
    let full = diagonal_ranks(e).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 0..3 {
        let tail = diagonal_ranks(&truncate_to_j(e, k)).unwrap()[k..].to_vec();
        let e_tail = &full[k..];
        pass &= tail.iter().all(|&r| r == 0) && e_tail.iter().all(|&r| r > 0);
        parts.push(format!("k={k}: J-tail {tail:?} vs e-tail {e_tail:?}"));
    }
    let report = verify_claim3(e).unwrap();
    pass &= report.all_nonzero && report.truncations.iter().all(|t| t.tail_zero);
    outcome(pass, parts.join(", "))
}

fn criterion8() -> Outcome {
    let window = sl2_window(IrrepPolicy::Trivial);
    let analysis = analyze_window(&window, &GhostOptions::default()).unwrap();
    let classical = classical_ghost(&window);
    let mut closed_form: f64 = 0.0;
    for (&(n, _), block) in analysis.e.blocks() {
        let k = window.order(n);
        let j = Mat::from_fn(k, k, |_, _| c64::new(1.0 / k as f64, 0.0));
        closed_form = closed_form.max(frobenius_distance(block, &j));
        closed_form = closed_form.max(frobenius_distance(classical.block(n, n).unwrap(), &j));
    }
    let graphs: Vec<CayleyGraph> = window
        .family()
        .levels()
        .iter()
        .map(|l| CayleyGraph::from_level(l).unwrap().0)
        .collect();
    let space = coarse_union(graphs);
    let r: Vec<f64> = (0..window.len())
        .map(|n| {
            propagation(&classical.restrict_to_level(n), &space, &[0.01])
                .unwrap()
                .profile[0]
                .1
        })
        .collect();
    let decays = r[window.len() - 1] < r[0];
    let pass = closed_form <= 1e-10 && decays;
    outcome(
        pass,
        format!(
            "closed-form distance {closed_form:.2e}; R(0.01) by block {r:?}; largest-block R smaller than smallest: {decays}"
        ),
    )
}

fn criterion9() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, spec) in shipped_presets() {
        let fam = spec.build().unwrap();
        let graphs: Vec<CayleyGraph> = fam
            .levels()
            .iter()
            .map(|l| CayleyGraph::from_level(l).unwrap().0)
            .collect();
        let space = coarse_union(graphs);
        let report = space.triangle_check(10_000, 0x7a1);
        pass &= report.passed() && report.checked == 10_000 && space.cross_rule_sound();
        parts.push(format!(
            "{name}: {} violations in {}",
            report.violations, report.checked
        ));
    }
    outcome(pass, parts.join(", "))
}

fn criterion10() -> Outcome {
    let mut cfg = RunConfig::new("sl2");
    cfg.primes = vec![3, 5, 7];
    cfg.truncate = Some(1);
    let mut texts = Vec::new();
    for p in [1, 1, 8, 8] {
        cfg.parallelism = p;
        match cmd_ghost(&cfg) {
            Ok(out) => texts.push(render(&without_timing(&out.report))),
            Err(e) => return outcome(false, format!("ghost failed at parallelism {p}: {e}")),
        }
    }
    let same_1 = texts[0] == texts[1];
    let same_8 = texts[2] == texts[3];
    let across = texts[0] == texts[2];
    outcome(
        same_1 && same_8 && across,
        format!("p=1 runs identical: {same_1}, p=8 runs identical: {same_8}, p=1 vs p=8: {across}"),
    )
}

fn preset_analyses() -> Vec<(String, Window, WindowAnalysis)> {
    shipped_presets()
        .into_iter()
        .map(|(name, spec): (&str, FamilySpec)| {
            let window = Window::full(Arc::new(spec.build().unwrap()), &spec.policy).unwrap();
            let analysis = analyze_window(&window, &GhostOptions::default()).unwrap();
            (name.to_string(), window, analysis)
        })
        .collect()
}

fn main() {
    let mut failures = 0;
    let mut report = |n: usize, name: &str, o: Outcome| {
        if !o.pass {
            failures += 1;
        }
        line(&format!(
            "criterion {n:>2} [{}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        ));
    };

    report(1, "group arithmetic", criterion1());
    report(2, "expander certification", criterion2());

    let window = sl2_window(IrrepPolicy::Steinberg);
    let (analysis, t) = timed(|| analyze_window(&window, &GhostOptions::default()));
    let analysis = analysis.expect("sl2 window analysis");
    report(3, "ghost construction agreement", criterion3(&analysis, t));
    report(4, "claim 1 gap and quotient consistency", criterion4(&analysis));
    report(5, "claim 3 diagonal ranks", criterion5(&analysis));

    let mut presets = preset_analyses();
    report(6, "claim 2 vanishing", criterion6(&presets));
    presets.clear();
    report(7, "rank-sequence separation", criterion7(&analysis));
    drop(analysis);
    report(8, "classical ghost", criterion8());
    report(9, "metric soundness", criterion9());
    report(10, "determinism", criterion10());

    line(&format!("acceptance: {} of 10 criteria passed", 10 - failures));
    if failures > 0 {
        std::process::exit(1);
    }
}
