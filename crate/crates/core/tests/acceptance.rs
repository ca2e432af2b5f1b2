//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use rand::Rng;
use supframe::adapt::{dominance_sets, dp_adapt, greedy_adapt, EntropyCost, ResetRule, SegmentCost};
use supframe::denoise::{add_noise, run_experiment, synthetic_signal, Algorithm, ExperimentConfig, SuppressionRule};
use supframe::dft::FourierEngine;
use supframe::gabor::{frame_bounds, frame_operator, refine_lattice, stft_analyze};
use supframe::reconstruct::*;
use supframe::superposition::*;
use supframe::{GaborSystem, Signal, Window, WindowKind};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn engine() -> FourierEngine<f64> {
    FourierEngine::new()
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1001);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for len in [64usize, 256, 1024] {
        let width = len / 8;
        for kind in [WindowKind::Rect, WindowKind::Triangular, WindowKind::Hamming] {
            let g = GaborSystem::new(kind.build::<f64>(len, width).unwrap(), width / 2, width).unwrap();
            for _ in 0..50 {
                let p = random_partition(g.translates(), &mut r);
                for mode in [Mode::Local, Mode::Global] {
                    let sel = make_selection(&p, &g, mode).unwrap();
                    let x = random_signal(len, &mut r);
                    let c = superposition_analyze(&x, &sel, &engine()).unwrap();
                    let y = gola_reconstruct(&c, &g, &engine()).unwrap();
                    worst = worst.max(y.relative_error(&x));
                    cases += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 1e-10 && secs < 10.0, format!("{cases} cases, max rel err {worst:.2e} (≤ 1e-10), {secs:.2} s (< 10 s)"))
}

fn dual_paths() -> Outcome {
    let mut r = rng(1002);
    let mut worst = 0.0f64;
    for case in 0..20 {
        let kind = if case % 2 == 0 { WindowKind::Hann } else { WindowKind::Hamming };
        let w = kind.build::<f64>(64, 8).unwrap();
        let g = GaborSystem::new(w.clone(), 4, 8).unwrap();
        let p = random_dyadic_partition(16, &mut r);
        let sel = make_selection(&p, &g, Mode::Dyadic).unwrap();
        let m_g = sel.uniform_modulations().unwrap();
        let canonical = canonical_dual(&sel).unwrap();
        let lapped = lapped_duals(&w, 4, m_g).unwrap().select(&sel).unwrap();
        let dyadic = dyadic_duals(&w, 4, m_g).unwrap().select(&sel).unwrap();
        for (a, b) in [(&canonical, &lapped), (&canonical, &dyadic), (&lapped, &dyadic)] {
            for (da, db) in a.duals.iter().zip(&b.duals) {
                assert_eq!((da.n, da.r, da.start), (db.n, db.r, db.start));
                for (u, v) in da.samples.iter().zip(&db.samples) {
                    worst = worst.max((u - v).abs());
                }
            }
        }
    }
    check(worst <= 1e-12, format!("20 dyadic selections, max pairwise deviation {worst:.2e} (≤ 1e-12)"))
}

fn bound_preservation() -> Outcome {
    let mut r = rng(1003);
    let mut worst_margin = f64::INFINITY;
    let mut worst_extremal = 0.0f64;
    for kind in [WindowKind::Hamming, WindowKind::Triangular] {
        let g = GaborSystem::new(kind.build::<f64>(256, 32).unwrap(), 16, 32).unwrap();
        let base = frame_bounds(&frame_operator(&g)).unwrap();
        for _ in 0..100 {
            let p = random_partition(16, &mut r);
            for mode in [Mode::Local, Mode::Global] {
                let sel = make_selection(&p, &g, mode).unwrap();
                let min = superposition_frame_operator(&sel).diagonal().iter().cloned().fold(f64::INFINITY, f64::min);
                worst_margin = worst_margin.min(min / (base.lower * (1.0 - 1e-9)));
            }
        }
        let (a_opt, b_opt) = extremal_bounds(&g);
        let none = make_selection(&OrderedPartition::singletons(16), &g, Mode::Local).unwrap();
        let all = make_selection(&OrderedPartition::single(16), &g, Mode::Local).unwrap();
        let lower = frame_bounds(&superposition_frame_operator(&none)).unwrap().lower;
        let upper = frame_bounds(&superposition_frame_operator(&all)).unwrap().upper;
        worst_extremal = worst_extremal.max(((lower - a_opt) / a_opt).abs()).max(((upper - b_opt) / b_opt).abs());
    }
    check(
        worst_margin >= 1.0 && worst_extremal <= 1e-9,
        format!("200 partitions × 2 modes, min diag / A(1−1e-9) = {worst_margin:.6} (≥ 1); extremal rel err {worst_extremal:.2e} (≤ 1e-9)"),
    )
}

fn lemmas() -> Outcome {
    let mut r = rng(1004);
    let (mut scale_err, mut parseval_err, mut slack_min) = (0.0f64, 0.0f64, f64::INFINITY);
    for _ in 0..200 {
        let len = 2 * r.gen_range(2..=24);
        let width = r.gen_range(1..=len / 2);
        let g = GaborSystem::new(random_window(len, width, &mut r), 2, r.gen_range(width..=len)).unwrap();
        let base = frame_operator(&g).diagonal();
        let m2 = r.gen_range(width..=2 * len);
        let refined = frame_operator(&refine_lattice(&g, m2).unwrap()).diagonal();
        for (v2, v) in refined.iter().zip(&base) {
            let expect = m2 as f64 / g.modulations() as f64 * v;
            scale_err = scale_err.max((v2 - expect).abs() / expect.abs().max(1e-300));
        }
    }
    for _ in 0..200 {
        let len = r.gen_range(2..=64);
        let width = r.gen_range(1..=len);
        let w = random_window(len, width, &mut r);
        let m = r.gen_range(width..=len + 8);
        let g = GaborSystem::new(w.clone(), len, m).unwrap();
        let x = random_signal(len, &mut r);
        let lhs: f64 = stft_analyze(&x, &g, &engine()).unwrap().columns[0].iter().map(|c| c.norm_sqr()).sum();
        let rhs = m as f64 * x.samples().iter().zip(w.samples()).map(|(c, v)| c.norm_sqr() * v * v).sum::<f64>();
        parseval_err = parseval_err.max((lhs - rhs).abs() / rhs);
    }
    for _ in 0..200 {
        let n_windows = r.gen_range(2..=8);
        let a = r.gen_range(1..=6);
        let len = n_windows * a;
        let w = random_window(len, r.gen_range(1..=2 * a).min(len), &mut r);
        let p = r.gen_range(0..n_windows - 1);
        let q = r.gen_range(0..n_windows - 1 - p);
        let wp = superposition_window(&w, a, p, 0).unwrap().window;
        let wq = superposition_window(&w, a, q, p + 1).unwrap().window;
        let merged = superposition_window(&w, a, p + q + 1, 0).unwrap().window;
        let m = r.gen_range(merged.length()..=len + 4);
        let m0 = r.gen_range(wp.length().max(wq.length())..=m);
        let x = random_signal(len, &mut r);
        let energy = |win: &Window<f64>, mods: usize| -> f64 {
            let g = GaborSystem::new(win.clone(), len, mods).unwrap();
            stft_analyze(&x, &g, &engine()).unwrap().columns[0].iter().map(|c| c.norm_sqr()).sum()
        };
        let slack = energy(&merged, m) - energy(&wp, m0) - energy(&wq, m0);
        slack_min = slack_min.min(slack / x.energy());
    }
    check(
        scale_err <= 1e-12 && parseval_err <= 1e-11 && slack_min >= -1e-10,
        format!(
            "scaling {scale_err:.2e} (≤ 1e-12), Parseval {parseval_err:.2e} (≤ 1e-11), min slack/‖x‖² {slack_min:.2e} (≥ −1e-10)"
        ),
    )
}

fn sufficiency() -> Outcome {
    let mut r = rng(1005);
    let (mut cases, mut passed, mut violations) = (0, 0, 0);
    while cases < 500 {
        let n_windows = r.gen_range(1..=8);
        let a = r.gen_range(1..=8);
        let len = n_windows * a;
        if len > 64 {
            continue;
        }
        cases += 1;
        let w = random_window(len, r.gen_range(1..=len), &mut r);
        let g = GaborSystem::new(w, a, 1).unwrap();
        let p = random_partition(n_windows, &mut r);
        let sel = SelectionFunction::uniform(&p, &g, r.gen_range(1..=len)).unwrap();
        if sufficiency_test(&sel).unwrap().passed {
            passed += 1;
            if min_eigenvalue(dense_matrix(&superposition_frame_operator_dense(&sel))) <= 0.0 {
                violations += 1;
            }
        }
    }
    check(violations == 0, format!("{cases} cases, {passed} certified, {violations} violations"))
}

fn diagonality() -> Outcome {
    let mut r = rng(1006);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n_windows = r.gen_range(1..=8);
        let a = r.gen_range(1..=6);
        let len = n_windows * a;
        let w = random_window(len, r.gen_range(a..=len), &mut r);
        let g = GaborSystem::new(w, a, r.gen_range(1..=len)).unwrap();
        let p = random_partition(n_windows, &mut r);
        for mode in [Mode::Global, Mode::Local] {
            let sel = make_selection(&p, &g, mode).unwrap();
            let dense = outer_sum(&selection_elements(&sel));
            let max_diag = (0..len).map(|t| dense[(t, t)].re).fold(0.0, f64::max);
            for t in 0..len {
                for u in (0..len).filter(|&u| u != t) {
                    worst = worst.max(dense[(t, u)].norm() / max_diag);
                }
            }
        }
    }
    check(worst <= 1e-12, format!("100 cases × 2 modes, max off-diagonal / max diagonal {worst:.2e} (≤ 1e-12)"))
}

fn exhaustive(n_windows: usize, r_max: usize, cost: &dyn SegmentCost) -> f64 {
    let mut best = f64::INFINITY;
    'masks: for mask in 0u32..(1 << (n_windows - 1)) {
        let (mut total, mut start) = (0.0, 0);
        for k in 1..=n_windows {
            if k == n_windows || mask & (1 << (k - 1)) != 0 {
                if k - start - 1 > r_max {
                    continue 'masks;
                }
                total += cost.cost(start, k - start - 1);
                start = k;
            }
        }
        best = best.min(total);
    }
    best
}

fn dp_optimality() -> Outcome {
    let mut r = rng(1007);
    let mut mismatches = 0;
    for _ in 0..50 {
        let n_windows = r.gen_range(1..=12);
        let len = n_windows * 8;
        let g = GaborSystem::new(WindowKind::Hamming.build::<f64>(len, 16.min(len)).unwrap(), 8, 16).unwrap();
        let x = random_signal(len, &mut r);
        let r_max = n_windows - 1;
        let table = dp_adapt(&x, &g, r_max).unwrap();
        let cost = EntropyCost::new(&x, &g, r_max).unwrap();
        if table.total_cost() != exhaustive(n_windows, r_max, &cost) {
            mismatches += 1;
        }
    }
    check(mismatches == 0, format!("50 signals, N ≤ 12, {mismatches} cost mismatches"))
}

fn experiment_shape() -> Outcome {
    let start = Instant::now();
    let config = ExperimentConfig { rules: vec![SuppressionRule::Oracle], ..ExperimentConfig::default() };
    let report = run_experiment(&config).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let rows: Vec<_> = report.results.iter().filter(|r| r.rule == SuppressionRule::Oracle).collect();
    let fixed: Vec<f64> = config
        .methods
        .iter()
        .filter(|m| m.algorithm == Algorithm::Fixed)
        .map(|m| report.get(10.0, SuppressionRule::Oracle, &m.name).unwrap().mean_db)
        .collect();
    let worst = fixed.iter().cloned().fold(f64::INFINITY, f64::min);
    let best = fixed.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let adaptive: Vec<(String, f64, bool)> = config
        .methods
        .iter()
        .filter(|m| m.algorithm != Algorithm::Fixed)
        .map(|m| {
            let g = report.get(10.0, SuppressionRule::Oracle, &m.name).unwrap().mean_db;
            (m.name.clone(), g, g > worst && (g - best).abs() <= 1.0)
        })
        .collect();
    let shape = adaptive.iter().any(|a| a.2);
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.std_db), hi.max(r.std_db)));
    let spread = lo >= 0.05 && hi <= 0.5;
    let gains: Vec<String> = adaptive.iter().map(|(n, g, ok)| format!("{n} {g:.2} dB{}", if *ok { "" } else { " (outside)" })).collect();
    check(
        shape && spread && secs < 120.0,
        format!(
            "(a) {}; fixed sweep {worst:.2}..{best:.2} dB; (b) oracle std {lo:.3}..{hi:.3} dB (in [0.05, 0.5]); {secs:.1} s (< 120 s)",
            gains.join(", ")
        ),
    )
}

fn complexity() -> Outcome {
    let mut worst_ratio = (f64::INFINITY, 0.0f64);
    let mut timings = Vec::new();
    let mut plain_exact = true;
    for k in 10..=14 {
        let len = 1usize << k;
        let mut r = rng(1008 + k as u64);
        let x = random_signal(len, &mut r);
        let mut total = 0.0;
        for (adapted, path) in [(false, ComplexityPath::Analysis)].into_iter().chain(ComplexityPath::ALL.map(|p| (true, p))) {
            let (g, sel) = bench_selection::<f64>(len, adapted).unwrap();
            let m = measure_path(path, &x, &g, &sel, 7).unwrap();
            worst_ratio = (worst_ratio.0.min(m.ratio()), worst_ratio.1.max(m.ratio()));
            if adapted {
                total += m.seconds;
            } else {
                let nm = (m.pieces * m.modulations) as f64;
                plain_exact &= m.formula == nm * (1.0 + (m.modulations as f64).log2());
            }
        }
        timings.push((len, total));
    }
    let exponent = scaling_exponent(&timings);
    check(
        worst_ratio.0 >= 0.5 && worst_ratio.1 <= 2.0 && exponent <= 1.3 && plain_exact,
        format!(
            "L = 2^10..2^14, counted/formula in [{:.3}, {:.3}] (within 2×), time exponent {exponent:.3} (≤ 1.3)",
            worst_ratio.0, worst_ratio.1
        ),
    )
}

/// Width of the piece owning each sample under the dominance rule.
fn owner_widths(g: &GaborSystem<f64>, p: &OrderedPartition) -> Vec<usize> {
    let mut width_of = vec![0; g.translates()];
    for piece in p.pieces() {
        for n in piece.indices(g.translates()) {
            width_of[n] = piece.width();
        }
    }
    let mut out = vec![0; g.signal_len()];
    for (n, set) in dominance_sets(g).iter().enumerate() {
        for &t in set {
            out[t] = width_of[n];
        }
    }
    out
}

fn adaptation_structure() -> Outcome {
    let config = ExperimentConfig::default();
    let spec = config.signal_spec();
    let x: Signal<f64> = synthetic_signal(config.len, &spec).unwrap();
    let tone = spec.local.start..spec.local.start + spec.local.length;
    let mut summary = Vec::new();
    let mut ok = true;
    for m in config.methods.iter().filter(|m| m.algorithm != Algorithm::Fixed) {
        let g = m.window.system(config.len).unwrap();
        let mut hits = 0;
        for trial in 0..50u64 {
            let y = add_noise(&x, 10.0, config.base_seed + trial).unwrap();
            let p = match m.algorithm {
                Algorithm::Greedy => greedy_adapt(&y, &g, m.r_max, ResetRule::Prose).unwrap().partition,
                _ => dp_adapt(&y, &g, m.r_max).unwrap().partition,
            };
            let widths = owner_widths(&g, &p);
            let over_tone = widths[tone.clone()].iter().copied().max().unwrap_or(0);
            if spec.impulses.iter().all(|i| over_tone > widths[i.position]) {
                hits += 1;
            }
        }
        ok &= hits >= 45;
        summary.push(format!("{} {hits}/50", m.name));
    }
    check(ok, format!("{} (≥ 45/50 each)", summary.join(", ")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("round-trip exactness", round_trip),
        ("dual-path equivalence", dual_paths),
        ("frame-bound preservation", bound_preservation),
        ("lemma suite", lemmas),
        ("sufficiency-test soundness", sufficiency),
        ("diagonality", diagonality),
        ("dp optimality", dp_optimality),
        ("experiment shape", experiment_shape),
        ("complexity accounting", complexity),
        ("adaptation structure", adaptation_structure),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
