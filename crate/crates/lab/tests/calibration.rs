use extlab::Calibration;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn refit_reproduces_the_committed_constants() {
    let frozen = Calibration::frozen();
    let refit = frozen.refit().unwrap();
    assert!(close(refit.avg_trans, frozen.avg_trans), "{} vs {}", refit.avg_trans, frozen.avg_trans);
    assert!(close(refit.seq_inequality, frozen.seq_inequality));
    assert!(close(refit.seq_linf, frozen.seq_linf));
    for (a, b) in refit.decoupling.ratio.iter().zip(&frozen.decoupling.ratio) {
        assert!(close(*a, *b), "{a} vs {b}");
    }
}

#[test]
fn serialized_form_round_trips() {
    let frozen = Calibration::frozen();
    let back: Calibration = toml::from_str(&frozen.to_toml()).unwrap();
    assert_eq!(back, frozen);
}
