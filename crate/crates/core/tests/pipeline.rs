use extlab_core::cutoff::SmoothWindow;
use extlab_core::extension::{extend_field, XiGrid};
use extlab_core::feffgeom::{cap_rectangle, first_decoupling, pair_geometry};
use extlab_core::spectral::{coeff_sequence, reexpand};
use extlab_core::wavelets::{haar_transform, perturbed_projection, project_qs, Species};
use extlab_core::SampledFunction;

fn bump(spu: u64) -> SampledFunction {
    let w = SmoothWindow::new(0.35, 0.42, 0.58, 0.65).unwrap();
    SampledFunction::from_fn(0.0, 1.0, spu, |x| w.value(x) * (30.0 * x).sin()).unwrap()
}

#[test]
fn projected_field_obeys_the_trivial_bound() {
    let mut f = bump(1 << 12);
    let mean = f.integral();
    f.values.iter_mut().for_each(|v| *v -= mean);
    let q = project_qs(&haar_transform(&f, 5).unwrap(), 5).unwrap();
    let field = extend_field(&q, XiGrid::centered(64.0, 2.0).unwrap()).unwrap();
    let l1: f64 = q.values.iter().map(|v| v.abs()).sum::<f64>() * q.spacing();
    assert!(field.max_abs() <= l1 + 1e-10);
}

#[test]
fn sequence_agrees_with_the_projection_coefficients() {
    let f = bump(1 << 12);
    let (s, eta) = (5, 1.0 / 64.0);
    let (coeffs, _) = perturbed_projection(&f, s, eta, 0.0).unwrap();
    let seq = coeff_sequence(&f, s, eta, 0.0).unwrap();
    for (n, v) in seq.values.iter().enumerate() {
        let c = coeffs.get(s, n as u64 + 1, Species::H).unwrap();
        assert!((v.re - c).abs() < 1e-14 && v.im == 0.0);
    }
    assert!(reexpand(&seq).unwrap().residual < 1e-12);
}

#[test]
fn diagonal_pairs_and_single_caps() {
    for s in 1..=4u32 {
        let m = 1 + (1u64 << s) / 2;
        let g = pair_geometry(m, m, s, 4.0).unwrap();
        assert!((g.ratio_sum - 4.0).abs() < 1e-9);
        let r = cap_rectangle(m, s, 4.0).unwrap();
        assert!((g.sum_area - 4.0 * r.area()).abs() < 1e-12 * g.sum_area);
    }
    let d = first_decoupling(&[(2, 1.0)], 2, 4.0, 1.5, 2.0).unwrap();
    assert!((d.ratio.unwrap() - 1.0).abs() < 1e-12);
}
