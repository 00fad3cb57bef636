use proptest::collection::vec;
use proptest::prelude::*;

use unpredictable::bernoulli::{realize, BernoulliSpec};
use unpredictable::filter::{
    chi_exact, chi_quadrature, solve_ode, ChiFunction, FilterConfig, StepSignal, Trajectory,
};
use unpredictable::io::{parse_csv, parse_sequence, write_csv, write_sequence};
use unpredictable::point::{point_symbol, point_window};
use unpredictable::report::{from_json, to_json, SequenceReport};
use unpredictable::verifier::{
    find_function_witnesses, find_sequence_witnesses, recheck_sequence_witness,
    scan_sequence_shifts, FunctionScan, Gridded, SequenceScan, Verdict,
};
use unpredictable::{metric_distance, Alphabet, SequenceWindow};

fn alphabet() -> impl Strategy<Value = Alphabet> {
    vec(-8.0f64..8.0, 2..5).prop_filter_map("distinct values", |v| Alphabet::new(v).ok())
}

/// Three windows over one alphabet, each covering `[-40, 40]`.
fn triple() -> impl Strategy<Value = (SequenceWindow, SequenceWindow, SequenceWindow)> {
    alphabet()
        .prop_flat_map(|a| {
            let m = a.len() as u16;
            let syms = vec(0..m, 81);
            (Just(a), syms.clone(), syms.clone(), syms)
        })
        .prop_map(|(a, x, y, z)| {
            let w = |s| SequenceWindow::new(a.clone(), -40, s).unwrap();
            (w(x), w(y), w(z))
        })
}

fn binary_window(first: i64, bits: Vec<u16>) -> SequenceWindow {
    SequenceWindow::new(Alphabet::binary(), first, bits).unwrap()
}

/// Classical RK4 on each constant piece, an independent check of the
/// closed-form recurrence.
fn rk4_chi(signal: &StepSignal, decay: f64, x0: f64, t_end: f64) -> f64 {
    let mut x = x0;
    let mut t = signal.start();
    for j in 0..signal.pieces() {
        let hi = signal.breakpoint(j + 1).min(t_end);
        if hi <= t {
            break;
        }
        let v = signal.piece_value(j);
        let f = |x: f64| -decay * x + v;
        let n = 1024;
        let h = (hi - t) / n as f64;
        for _ in 0..n {
            let k1 = f(x);
            let k2 = f(x + h / 2.0 * k1);
            let k3 = f(x + h / 2.0 * k2);
            let k4 = f(x + h * k3);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        t = hi;
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn metric_axioms((a, b, c) in triple(), k in 1u32..=32) {
        let d = |x: &SequenceWindow, y: &SequenceWindow| metric_distance(x, y, k).unwrap().value;
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert!(d(&a, &b) >= 0.0);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-12);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
        let ki = i64::from(k);
        let equal = (-ki..=ki).all(|i| a.symbol_at(i) == b.symbol_at(i));
        prop_assert_eq!(d(&a, &b) == 0.0, equal);
    }

    #[test]
    fn tail_bound_covers_truncation((a, b, _) in triple(), k in 1u32..=30) {
        let wide = metric_distance(&a, &b, 40).unwrap().value;
        let t = metric_distance(&a, &b, k).unwrap();
        prop_assert_eq!(t.tail_bound, a.alphabet().diameter() * 2f64.powi(1 - k as i32));
        prop_assert!(wide - t.value >= -1e-12);
        prop_assert!(wide - t.value <= t.tail_bound + 1e-12);
    }

    #[test]
    fn shift_expansiveness((a, b, _) in triple(), k in 1u32..=38) {
        let lhs = metric_distance(&a.shift().unwrap(), &b.shift().unwrap(), k).unwrap().value;
        let rhs = metric_distance(&a, &b, k + 1).unwrap().value;
        prop_assert!(lhs <= 2.0 * rhs + 1e-12);
    }

    #[test]
    fn shift_moves_indices((a, _, _) in triple(), n in 0u64..20) {
        let s = a.shifted_by(n).unwrap();
        let mut step = a.clone();
        for _ in 0..n {
            step = step.shift().unwrap();
        }
        prop_assert_eq!(&s, &step);
        for i in -20i64..20 {
            prop_assert_eq!(s.symbol_at(i), a.symbol_at(i + n as i64));
        }
    }

    #[test]
    fn point_window_matches_closed_form(first in -1_000_000i64..1_000_000, len in 1usize..300) {
        let w = point_window(first, len).unwrap();
        for (i, &s) in w.symbols().iter().enumerate() {
            prop_assert_eq!(s, u16::from(point_symbol(first + i as i64)));
        }
    }

    #[test]
    fn bernoulli_prefix_stable(seed in any::<u64>(), short in 1usize..200, extra in 0usize..200) {
        let a = realize(&BernoulliSpec::fair_binary(seed, short)).unwrap();
        let b = realize(&BernoulliSpec::fair_binary(seed, short + extra)).unwrap();
        prop_assert_eq!(a.symbols(), &b.symbols()[..short]);
    }

    #[test]
    fn sequence_format_round_trip((a, _, _) in triple(), first in any::<i32>()) {
        let w = SequenceWindow::new(a.alphabet().clone(), i64::from(first), a.symbols().to_vec()).unwrap();
        let text = write_sequence(&w);
        let back = parse_sequence(&text).unwrap();
        prop_assert_eq!(&back, &w);
        prop_assert_eq!(write_sequence(&back), text);
    }

    #[test]
    fn csv_round_trip(
        t0 in -1e3f64..1e3,
        h in 1e-3f64..1.0,
        values in vec(-1e6f64..1e6, 2..200),
    ) {
        let times = (0..values.len()).map(|i| t0 + i as f64 * h).collect();
        let traj = Trajectory::new(times, values).unwrap();
        let text = write_csv(&traj, 17).unwrap();
        let back = parse_csv(&text).unwrap();
        prop_assert_eq!(&back, &traj);
        prop_assert_eq!(write_csv(&back, 17).unwrap(), text);
    }
}

fn signal_strategy() -> impl Strategy<Value = (StepSignal, f64)> {
    (
        alphabet(),
        any::<u64>(),
        prop_oneof![Just(0.1), Just(0.25), Just(1.0)],
        0.2f64..3.0,
    )
        .prop_map(|(a, seed, mu, decay)| {
            let p = vec![1.0 / a.len() as f64; a.len()];
            let spec = BernoulliSpec {
                probabilities: p,
                alphabet: a,
                seed,
                length: 400,
            };
            (
                StepSignal::aligned(realize(&spec).unwrap(), mu).unwrap(),
                decay,
            )
        })
}

fn config_for(signal: &StepSignal, decay: f64) -> FilterConfig {
    FilterConfig {
        decay,
        step: signal.step(),
        sample_dt: signal.step() / 4.0,
        ..FilterConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recurrence_matches_rk4((signal, decay) in signal_strategy(), x0 in -5.0f64..5.0) {
        let cfg = config_for(&signal, decay);
        let t_end = signal.start() + 30.0 * signal.step();
        let traj = chi_exact(&signal, &cfg, signal.start(), t_end, x0).unwrap();
        let last = *traj.values().last().unwrap();
        let oracle = rk4_chi(&signal, decay, x0, *traj.times().last().unwrap());
        prop_assert!((last - oracle).abs() <= 1e-8, "{} vs {}", last, oracle);
    }

    #[test]
    fn recurrence_matches_quadrature((signal, decay) in signal_strategy()) {
        let cfg = config_for(&signal, decay);
        let traj = chi_exact(&signal, &cfg, signal.start(), signal.end(), 0.0).unwrap();
        let tail = 40.0 / decay;
        for (&t, &x) in traj.times().iter().zip(traj.values()).step_by(7) {
            if t - tail < signal.start() {
                continue;
            }
            let q = chi_quadrature(&signal, &cfg, t, tail).unwrap();
            prop_assert!((x - q.value).abs() <= q.truncation_bound + 1e-10);
        }
    }

    #[test]
    fn bounded_by_signal((signal, decay) in signal_strategy(), x0 in -5.0f64..5.0) {
        let cfg = config_for(&signal, decay);
        let traj = chi_exact(&signal, &cfg, signal.start(), signal.end(), x0).unwrap();
        let (lo, hi) = signal.sequence().alphabet().bounds();
        let lo = (lo / decay).min(x0);
        let hi = (hi / decay).max(x0);
        for &x in traj.values() {
            prop_assert!(x >= lo - 1e-12 && x <= hi + 1e-12);
        }
    }

    #[test]
    fn exponential_forgetting((signal, decay) in signal_strategy(), x0 in -5.0f64..5.0, x1 in -5.0f64..5.0) {
        let cfg = config_for(&signal, decay);
        let a = chi_exact(&signal, &cfg, signal.start(), signal.end(), x0).unwrap();
        let b = chi_exact(&signal, &cfg, signal.start(), signal.end(), x1).unwrap();
        for ((&t, &u), &v) in a.times().iter().zip(a.values()).zip(b.values()) {
            let expected = (x1 - x0) * (-decay * (t - signal.start())).exp();
            prop_assert!((v - u - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn semigroup((signal, decay) in signal_strategy(), x0 in -5.0f64..5.0, split in 1usize..300) {
        let cfg = config_for(&signal, decay);
        let whole = chi_exact(&signal, &cfg, signal.start(), signal.end(), x0).unwrap();
        let split = split.min(whole.len() - 2);
        let t1 = whole.times()[split];
        let tail = chi_exact(&signal, &cfg, t1, signal.end(), whole.values()[split]).unwrap();
        for (i, &x) in tail.values().iter().enumerate() {
            prop_assert!((x - whole.values()[split + i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn chi_function_agrees_with_trajectory((signal, decay) in signal_strategy(), x0 in -5.0f64..5.0) {
        let cfg = config_for(&signal, decay);
        let traj = chi_exact(&signal, &cfg, signal.start(), signal.end(), x0).unwrap();
        let chi = ChiFunction::new(signal, decay, x0).unwrap();
        for (&t, &x) in traj.times().iter().zip(traj.values()).step_by(5) {
            prop_assert!((chi.eval(t).unwrap() - x).abs() <= 1e-12);
        }
    }

    #[test]
    fn solve_ode_is_chi_from_phi0(seed in any::<u64>(), phi0 in -3.0f64..3.0) {
        let cfg = FilterConfig::default();
        let signal = cfg.signal(realize(&BernoulliSpec::fair_binary(seed, 300)).unwrap()).unwrap();
        let a = solve_ode(&signal, &cfg, phi0, 30.0).unwrap();
        let b = chi_exact(&signal, &cfg, 0.0, 30.0, phi0).unwrap();
        prop_assert_eq!(a.times(), b.times());
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn witnesses_recheck(seed in any::<u64>(), l in 1u32..4, count in 1usize..6) {
        let w = realize(&BernoulliSpec::fair_binary(seed, 3000)).unwrap();
        let seq = binary_window(-100, w.symbols().to_vec());
        let scan = SequenceScan { half_width: l, tolerance: 0.0, epsilon0: 1.0 };
        let v = find_sequence_witnesses(&seq, &scan, count).unwrap();
        for pair in v.witnesses.windows(2) {
            prop_assert!(pair[0].zeta < pair[1].zeta && pair[0].eta < pair[1].eta);
        }
        for wit in &v.witnesses {
            prop_assert!(recheck_sequence_witness(&seq, wit, 0.0, 1.0));
        }
        prop_assert_eq!(v.verdict == Verdict::Consistent, v.witnesses.len() == count);
    }

    #[test]
    fn loosening_never_removes_shifts(
        (a, _, _) in triple(),
        tol in 0.0f64..4.0,
        extra in 0.0f64..4.0,
        eps in 0.1f64..4.0,
        lower in 0.0f64..1.0,
    ) {
        let seq = SequenceWindow::new(a.alphabet().clone(), -10, a.symbols().to_vec()).unwrap();
        let strict = SequenceScan { half_width: 3, tolerance: tol, epsilon0: eps };
        let loose = SequenceScan { half_width: 3, tolerance: tol + extra, epsilon0: eps * lower.max(1e-3) };
        let s = scan_sequence_shifts(&seq, &strict).unwrap();
        let l = scan_sequence_shifts(&seq, &loose).unwrap();
        for q in &s {
            let m = l.iter().find(|x| x.zeta == q.zeta);
            prop_assert!(m.is_some(), "zeta {} lost", q.zeta);
            let m = m.unwrap();
            if let Some(eta) = q.first_separation {
                prop_assert!(m.first_separation.is_some_and(|e| e <= eta));
            }
        }
        let chain = find_sequence_witnesses(&seq, &strict, 5).unwrap();
        for w in &chain.witnesses {
            prop_assert!(s.iter().any(|q| q.zeta == w.zeta));
        }
    }

    #[test]
    fn periodic_controls_are_never_consistent(
        pattern in vec(0u16..2, 1..12),
        first in -200i64..0,
        l in 1u32..5,
    ) {
        let n = 2000;
        let bits = (0..n).map(|i| pattern[i % pattern.len()]).collect();
        let seq = binary_window(first, bits);
        let scan = SequenceScan { half_width: l, tolerance: 0.0, epsilon0: 1.0 };
        if let Ok(v) = find_sequence_witnesses(&seq, &scan, 3) {
            prop_assert_eq!(v.verdict, Verdict::Inconsistent);
        }
    }

    #[test]
    fn report_json_round_trip(seed in any::<u64>(), l in 1u32..4) {
        let w = realize(&BernoulliSpec::fair_binary(seed, 600)).unwrap();
        let seq = binary_window(-50, w.symbols().to_vec());
        let scan = SequenceScan { half_width: l, tolerance: 0.0, epsilon0: 1.0 };
        let v = find_sequence_witnesses(&seq, &scan, 3).unwrap();
        let text = to_json(&SequenceReport::new(&seq, &scan, 3, &v));
        let back: SequenceReport = from_json(&text).unwrap();
        prop_assert_eq!(to_json(&back), text);
    }
}

#[test]
fn periodic_function_is_not_consistent() {
    let period = 3.0;
    let h = Gridded::new(
        |t: f64| Some((std::f64::consts::TAU * t / period).sin() + 0.5 * (t % period)),
        (0.0, 100.0),
        0.005,
    );
    let scan = FunctionScan {
        compact: (0.0, 10.0),
        sigma: 0.05,
        tolerance: 1e-9,
        epsilon0: 0.05,
        search_from: None,
    };
    let v = find_function_witnesses(&h, &[3.0, 6.0, 9.0, 30.0], &scan).unwrap();
    assert_ne!(v.verdict, Verdict::Consistent);
    assert!(v.witnesses.is_empty());
}

#[test]
fn chi_of_unpredictable_point_is_consistent() {
    let seq = point_window(-4096, 8192).unwrap();
    let shifts: Vec<f64> = find_sequence_witnesses(
        &seq,
        &SequenceScan {
            half_width: 4,
            tolerance: 0.0,
            epsilon0: 1.0,
        },
        3,
    )
    .unwrap()
    .witnesses
    .iter()
    .map(|w| w.zeta as f64)
    .collect();
    assert_eq!(shifts.len(), 3);
    let chi = ChiFunction::new(StepSignal::aligned(seq, 1.0).unwrap(), 1.0, 0.0).unwrap();
    let scan = FunctionScan {
        compact: (0.0, 1.0),
        sigma: 0.02,
        tolerance: 0.05,
        epsilon0: 1.0 / 24.0,
        search_from: Some(0.0),
    };
    let v = find_function_witnesses(&chi.gridded(0.0025), &shifts, &scan).unwrap();
    assert_eq!(v.verdict, Verdict::Consistent);
    for w in &v.witnesses {
        assert!(w.min_separation_on_interval >= 1.0 / 24.0);
        assert!(w.u_center >= 0.0);
    }
}
