use rfdna_core::featsel::LabeledFingerprintSet;
use rfdna_core::modelsel::{
    model_quality, pmfs_from_margins, select_best_index, write_candidate_ledger, CandidateModel, MarginPmfPair,
    FVR_GATE, TVR_GATE,
};
use rfdna_core::svm::{train_svm, SvmModel, SvmParams};

fn tiny_model() -> SvmModel {
    let set = LabeledFingerprintSet::from_classes(&[[1.0, 0.0], [1.2, 0.1]], &[[0.0, 1.0], [-0.1, 0.8]]).unwrap();
    train_svm(&set, &SvmParams::default()).unwrap()
}

/// Two PMFs on unit bins over [0, 10).
fn pair(pos: &[(usize, f64)], neg: &[(usize, f64)]) -> MarginPmfPair {
    let fill = |entries: &[(usize, f64)]| {
        let mut p = vec![0.0; 10];
        for &(k, v) in entries {
            p[k] = v;
        }
        p
    };
    MarginPmfPair::from_pmfs((0..=10).map(|k| k as f64).collect(), fill(pos), fill(neg)).unwrap()
}

fn candidate(n_r: usize, tvr: f64, fvr: f64, pmfs: MarginPmfPair) -> CandidateModel {
    CandidateModel {
        model: tiny_model(),
        n_r,
        tvr_train: tvr,
        fvr_others_train: fvr,
        cv_error: 0.0,
        pmf_pair: pmfs,
    }
}

#[test]
fn overlap_extremes_hold_for_any_binning() {
    let m = [-2.0, -0.5, 0.25, 1.0, 3.5, 4.0];
    let far: Vec<f64> = m.iter().map(|v| v + 100.0).collect();
    for bins in [1, 7, 50, 100, 1000] {
        let same = pmfs_from_margins(&m, &m, bins).unwrap();
        assert!((same.bc - 1.0).abs() < 1e-12);
        if bins >= 2 {
            assert_eq!(pmfs_from_margins(&m, &far, bins).unwrap().bc, 0.0);
        }
        for p in [&same.pmf_pos, &same.pmf_neg] {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn translated_pmf_moves_the_mean_exactly() {
    let base = [(1usize, 0.25), (2, 0.5), (3, 0.25)];
    for d in 0..6 {
        let shifted: Vec<(usize, f64)> = base.iter().map(|&(k, v)| (k + d, v)).collect();
        let p = pair(&shifted, &base);
        let q = model_quality(&p);
        assert_eq!(q.mean_distance, d as f64);
        assert_eq!(p.stats_pos.variance, p.stats_neg.variance);
        assert_eq!(q.variance_sum, 2.0 * 0.5);
    }
    let single = pair(&[(4, 1.0)], &[(4, 1.0)]);
    assert_eq!(model_quality(&single).variance_sum, 0.0);
    assert_eq!(single.bc, 1.0);
}

#[test]
fn lowest_overlap_wins_over_separation() {
    // bc 0.1 against bc 0.4 with larger mean distance
    let a = pair(&[(5, 0.9), (4, 0.1)], &[(4, 0.1), (0, 0.9)]);
    let b = pair(&[(9, 0.6), (5, 0.4)], &[(5, 0.4), (0, 0.6)]);
    assert!((a.bc - 0.1).abs() < 1e-12 && (b.bc - 0.4).abs() < 1e-12);
    assert!(model_quality(&b).mean_distance > model_quality(&a).mean_distance);
    let cands = vec![candidate(3, 1.0, 0.0, b), candidate(9, 1.0, 0.0, a)];
    assert_eq!(select_best_index(&cands).unwrap(), 1);
}

#[test]
fn ties_fall_through_the_rule() {
    let narrow = pair(&[(6, 1.0)], &[(2, 1.0)]);
    let wide = pair(&[(7, 1.0)], &[(2, 1.0)]);
    let spread = pair(&[(6, 0.5), (7, 0.5)], &[(1, 0.5), (2, 0.5)]);
    // larger separation wins at equal overlap
    let c = vec![candidate(1, 1.0, 0.0, narrow.clone()), candidate(2, 1.0, 0.0, wide.clone())];
    assert_eq!(select_best_index(&c).unwrap(), 1);
    // then smaller variance
    let tight = pair(&[(6, 1.0)], &[(1, 1.0)]);
    let loose = pair(&[(5, 0.5), (7, 0.5)], &[(0, 0.5), (2, 0.5)]);
    let c = vec![candidate(1, 1.0, 0.0, loose), candidate(2, 1.0, 0.0, tight)];
    assert_eq!(select_best_index(&c).unwrap(), 1);
    // then fewer features
    let c = vec![candidate(8, 1.0, 0.0, spread.clone()), candidate(4, 1.0, 0.0, spread.clone())];
    assert_eq!(select_best_index(&c).unwrap(), 1);
    // adding a dominated candidate changes nothing
    let mut c = vec![candidate(1, 1.0, 0.0, narrow.clone()), candidate(2, 1.0, 0.0, wide.clone())];
    let before = select_best_index(&c).unwrap();
    c.insert(0, candidate(5, 1.0, 0.0, pair(&[(3, 0.5), (4, 0.5)], &[(3, 0.5), (2, 0.5)])));
    assert_eq!(select_best_index(&c).unwrap(), before + 1);
}

#[test]
fn gates_and_fallback() {
    let best = pair(&[(9, 1.0)], &[(0, 1.0)]);
    let poor = pair(&[(5, 0.5), (4, 0.5)], &[(4, 0.5), (3, 0.5)]);
    let c = vec![
        candidate(1, TVR_GATE - 0.01, 0.0, best.clone()),
        candidate(2, 1.0, FVR_GATE + 0.01, best.clone()),
        candidate(3, TVR_GATE, FVR_GATE, poor.clone()),
    ];
    assert!(!c[0].passes_gates() && !c[1].passes_gates() && c[2].passes_gates());
    assert_eq!(select_best_index(&c).unwrap(), 2);

    // nobody passes: highest training TVR, then fewest features
    let c = vec![
        candidate(6, 0.8, 0.5, best.clone()),
        candidate(4, 0.85, 0.5, poor.clone()),
        candidate(2, 0.85, 0.6, poor.clone()),
    ];
    assert_eq!(select_best_index(&c).unwrap(), 2);
}

#[test]
fn candidate_ledger_lists_every_candidate() {
    let p = pair(&[(9, 1.0)], &[(0, 1.0)]);
    let c = vec![candidate(1, 0.95, 0.05, p.clone()), candidate(2, 0.5, 0.0, p)];
    let mut buf = Vec::new();
    write_candidate_ledger(&mut buf, &c, Some(0)).unwrap();
    let mut r = csv::Reader::from_reader(buf.as_slice());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["n_r", "tvr_train", "fvr_others_train", "bc", "mean_distance", "variance_sum", "selected"]);
    let rows: Vec<csv::StringRecord> = r.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][0], "1");
    assert_eq!(&rows[0][6], "true");
    assert_eq!(&rows[1][6], "false");
    assert_eq!(rows[1][4].parse::<f64>().unwrap(), 9.0);
}
