use std::time::Instant;

use extlab_core::error::Error as CoreError;
use extlab_core::extension::{extension_ball_norms, XiGrid};
use extlab_core::feffgeom::{first_decoupling, overlap_count, pair_geometry, overlap::DEFAULT_CELLS_PER_SCALE};
use extlab_core::phase::{avg_trans_bound, periodic_amplitudes, violation_rate, AvgTransSetup, FrequencyModulus};
use extlab_core::spectral::{
    decouple_measure, dirichlet_l4, order_for, seq_inequality, seq_linf, translated_dirichlet_family,
};
use extlab_core::sampled::SampledFunction;
use extlab_core::wavelets::{haar_transform, project_qs};

use crate::anchors;
use crate::calibration::{frequency_queries, sequence_resolution, Calibration};
use crate::config::{ExperimentConfig, Regime};
use crate::error::{LabError, Result};
use crate::families::{Family, Placement, TestFunctionSpec};
use crate::result::SweepResult;

/// Largest frequency grid the extension sweep will allocate.
pub const MAX_GRID_CELLS: usize = 1 << 26;
/// Largest level of the audits.
pub const MAX_AUDIT_LEVEL: u32 = 6;
/// Factor within which s-independent ratios must match their frozen values.
pub const STABILITY_FACTOR: f64 = 2.0;
/// Slope of log₂ ratio against s below which the extension sweep reads as
/// bounded.
pub const SLOPE_THRESHOLD: f64 = 0.1;
/// Admissible fraction of avg-trans records above the frozen constant.
pub const MAX_VIOLATION_RATE: f64 = 0.05;
/// Admissible spread max/min of the Dirichlet L⁴ ratio.
pub const DIRICHLET_BAND: f64 = 4.0;
/// Levels of the Dirichlet L⁴ scaling check.
pub const DIRICHLET_LEVELS: std::ops::RangeInclusive<u32> = 4..=10;
/// Kernel counts of the translated-kernel decoupling check.
pub const KERNEL_COUNTS: [usize; 2] = [8, 16];

fn timed<T>(result: &mut SweepResult, label: String, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let t = Instant::now();
    let v = f()?;
    result.timings.push((label, t.elapsed().as_secs_f64()));
    Ok(v)
}

/// Least-squares slope of y against x.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Grid spacing of the extension sweep at level s.
pub fn xi_step(cfg: &ExperimentConfig, s: u32) -> f64 {
    cfg.xi_step.unwrap_or_else(|| (2.0 * s as f64 - 11.0).max(0.0).exp2())
}

fn family_spec(cfg: &ExperimentConfig, family: Family, s: u32) -> TestFunctionSpec {
    TestFunctionSpec { family, level: cfg.family_level.unwrap_or(s), seed: cfg.seed, index: 0 }
}

/// ‖E Q_s f‖_{L^q(B(0,2^{2s}))}/‖f‖_q for each q on a grid of spacing
/// `step`; None where ‖f‖_q = 0. Needs mean-zero f on [0, 1] sampled at
/// 2^{2s+3} or more per unit.
pub fn extension_ratios(f: &SampledFunction, s: u32, qs: &[f64], step: f64) -> Result<Vec<Option<f64>>> {
    let qf = project_qs(&haar_transform(f, s)?, s)?;
    let radius = (2.0 * s as f64).exp2();
    let grid = XiGrid::centered((radius / step).ceil() * step, step)?;
    let norms = extension_ball_norms(&qf, grid, radius, qs)?;
    Ok(qs
        .iter()
        .zip(norms)
        .map(|(&q, n)| {
            let fq = f.lp_norm(q);
            (fq > 0.0).then(|| n / fq)
        })
        .collect())
}

/// Ratios ‖E Q_s f‖_{L^q(B(0,2^{2s}))}/‖f‖_q per (family, s, q), the
/// intermediate norm ‖f‖_{2q/(q-2)}, and the fitted log₂-slope in s.
pub fn run_extension_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    if cfg.s_min == 0 {
        return Err(LabError::Config("the extension sweep starts at level 1".into()));
    }
    let mut out = SweepResult::new("sweep-extension", &cfg.hash());
    for s in cfg.levels() {
        let radius = (2.0 * s as f64).exp2();
        let step = xi_step(cfg, s);
        let half = (radius / step).ceil() * step;
        let n = (2.0 * half / step).round() as usize + 1;
        if n.saturating_mul(n) > MAX_GRID_CELLS {
            return Err(CoreError::Resource(format!(
                "{n}×{n} frequency grid at level {s} exceeds the budget of {MAX_GRID_CELLS} cells"
            ))
            .into());
        }
    }
    for &family in &cfg.families {
        let mut series: Vec<Vec<(f64, f64)>> = vec![Vec::new(); cfg.q.len()];
        for s in cfg.levels() {
            let spu = 1u64 << (2 * s + 3).max(cfg.family_level.unwrap_or(s) + 2);
            let f = family_spec(cfg, family, s).generate(spu, Placement::UnitMeanZero)?;
            let ratios =
                timed(&mut out, format!("{}/s={s}", family.name()), || extension_ratios(&f, s, &cfg.q, xi_step(cfg, s)))?;
            for (k, &q) in cfg.q.iter().enumerate() {
                let cell = format!("{}/{}", family.name(), Regime::of(q).label());
                let ratio = ratios[k];
                out.push(&cell, Some(s), Some(q), "ratio", ratio, anchors::EXTENSION);
                out.push(&cell, Some(s), Some(q), "intermediate_norm", Some(f.lp_norm(2.0 * q / (q - 2.0))), anchors::INTERMEDIATE);
                if let Some(r) = ratio.filter(|r| *r > 0.0) {
                    series[k].push((s as f64, r.log2()));
                }
            }
        }
        for (k, &q) in cfg.q.iter().enumerate() {
            let regime = Regime::of(q);
            let cell = format!("{}/{}", family.name(), regime.label());
            let slope = fit_slope(&series[k]);
            out.push(&cell, None, Some(q), "log2_slope", slope, anchors::EXTENSION);
            if let (Regime::InTheorem, Some(b)) = (regime, slope) {
                if b >= SLOPE_THRESHOLD {
                    out.violations.push(format!("{cell} q={q}: log2 slope {b} ≥ {SLOPE_THRESHOLD}"));
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

fn check_audit_level(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.s_max > MAX_AUDIT_LEVEL {
        return Err(LabError::Config(format!("audits run up to level {MAX_AUDIT_LEVEL}, not {}", cfg.s_max)));
    }
    Ok(())
}

fn check_stable(out: &mut SweepResult, what: &str, value: Option<f64>, frozen: f64) {
    if let Some(v) = value {
        let r = v / frozen;
        if !(1.0 / STABILITY_FACTOR..=STABILITY_FACTOR).contains(&r) {
            out.violations.push(format!("{what}: {v} is not within a factor {STABILITY_FACTOR} of the frozen {frozen}"));
        }
    }
}

/// First decoupling at p = q/(q-2) over all caps and over a single cap,
/// overlap counts, and the extremes of the pair-geometry ratios.
pub fn run_decoupling_audit(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    check_audit_level(cfg)?;
    let frozen = Calibration::frozen();
    let mut out = SweepResult::new("audit-decoupling", &cfg.hash());
    let c = cfg.cap_constant;
    for s in cfg.levels() {
        let caps: Vec<(u64, f64)> = (1..=(1u64 << s)).map(|m| (m, 1.0)).collect();
        for &q in &cfg.q {
            let p = q / (q - 2.0);
            let all = timed(&mut out, format!("decoupling/s={s}/q={q}"), || {
                Ok(first_decoupling(&caps, s, c, p, cfg.cells_per_scale)?)
            })?;
            out.push("all_caps", Some(s), Some(q), "ratio", all.ratio, anchors::FIRST_DECOUPLING);
            out.push("all_caps", Some(s), Some(q), "lhs", Some(all.lhs), anchors::FIRST_DECOUPLING);
            out.push("all_caps", Some(s), Some(q), "rhs", Some(all.rhs), anchors::FIRST_DECOUPLING);
            let single = first_decoupling(&caps[..1], s, c, p, cfg.cells_per_scale)?;
            out.push("single_cap", Some(s), Some(q), "ratio", single.ratio, anchors::FIRST_DECOUPLING);
            if let Some(cp) = frozen.decoupling.for_q(q) {
                check_stable(&mut out, &format!("first decoupling s={s} q={q}"), all.ratio, cp);
            }
        }
        let count = timed(&mut out, format!("overlap/s={s}"), || {
            Ok(overlap_count(s, c, DEFAULT_CELLS_PER_SCALE * (2.0 * s as f64).exp2())?)
        })?;
        out.push("overlap", Some(s), None, "max_overlap", Some(count as f64), anchors::OVERLAP);
        let n = 1u64 << s;
        let rows = (1..=n)
            .flat_map(|m| (1..=n).map(move |k| (m, k)))
            .map(|(m, k)| pair_geometry(m, k, s, c))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let fold = |f: fn(&extlab_core::feffgeom::PairGeometry) -> f64| {
            rows.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |a, v| (a.0.min(v), a.1.max(v)))
        };
        let (lo, hi) = fold(|g| g.ratio_sum);
        out.push("pair_geometry", Some(s), None, "ratio_sum_min", Some(lo), anchors::SUM_AREA);
        out.push("pair_geometry", Some(s), None, "ratio_sum_max", Some(hi), anchors::SUM_AREA);
        let (lo, hi) = fold(|g| g.ratio_intersect);
        out.push("pair_geometry", Some(s), None, "ratio_intersect_min", Some(lo), anchors::INTERSECT_AREA);
        out.push("pair_geometry", Some(s), None, "ratio_intersect_max", Some(hi), anchors::INTERSECT_AREA);
    }
    out.sort();
    Ok(out)
}

/// The Step-3 ingredients at level s = s_max: Dirichlet L⁴ scaling, decoupling
/// of translated kernels, the avg-trans majorant and the sequence
/// inequalities, each against its frozen constant.
pub fn run_step3_audit(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    check_audit_level(cfg)?;
    let frozen = Calibration::frozen();
    let (s, lambda) = (cfg.s_max, cfg.lambda());
    let mut out = SweepResult::new("audit-step3", &cfg.hash());

    let mut l4 = Vec::new();
    for t in DIRICHLET_LEVELS {
        let m = order_for(lambda, t);
        let ratio = dirichlet_l4(m, t)? / ((t as f64) + 3.0 * (1.0 - lambda) * t as f64).exp2();
        out.push("dirichlet_l4", Some(t), None, "ratio", Some(ratio), anchors::DIRICHLET_L4);
        l4.push(ratio);
    }
    let (lo, hi) = l4.iter().fold((f64::INFINITY, 0.0f64), |a, &v| (a.0.min(v), a.1.max(v)));
    out.push("dirichlet_l4", None, None, "spread", Some(hi / lo), anchors::DIRICHLET_L4);
    if hi / lo > DIRICHLET_BAND {
        out.violations.push(format!("Dirichlet L4 ratio spread {} above {DIRICHLET_BAND}", hi / lo));
    }

    let literal = (lambda * s as f64).exp2();
    for (name, spacing) in [("kernels/literal_spacing", literal), ("kernels/wide_spacing", 2.0 * std::f64::consts::PI * literal)] {
        let mut ratios = Vec::new();
        for count in KERNEL_COUNTS {
            let fam = translated_dirichlet_family(s, lambda, count, spacing)?;
            let rep = decouple_measure(&fam, 4.0)?;
            out.push(format!("{name}/n={count:02}"), Some(s), Some(4.0), "ratio", rep.ratio, anchors::KERNEL_DECOUPLING);
            out.push(
                format!("{name}/n={count:02}"),
                Some(s),
                Some(4.0),
                "disjoint",
                Some(if rep.disjointness_flag { 1.0 } else { 0.0 }),
                anchors::KERNEL_DECOUPLING,
            );
            ratios.extend(rep.ratio);
        }
        if let [a, b] = ratios[..] {
            check_stable(&mut out, &format!("{name}: ratio at n={} against n={}", KERNEL_COUNTS[1], KERNEL_COUNTS[0]), Some(b), a);
        }
    }

    let setup = AvgTransSetup { s, delta: cfg.delta, lambda, eta: cfg.eta, translates: cfg.k_inside, modulus: FrequencyModulus::Odd };
    for &family in &cfg.families {
        let f = TestFunctionSpec { family, level: s + 2, seed: cfg.seed, index: 0 }
            .generate(sequence_resolution(s), Placement::MiddleThird)?;
        let cell = family.name();
        let records = timed(&mut out, format!("avg_trans/{cell}"), || {
            let amps = periodic_amplitudes(&f, &setup)?;
            let queries = frequency_queries(cfg.seed, family, s, cfg.delta, cfg.frequency_samples)?;
            Ok(avg_trans_bound(&amps, &queries, &setup)?)
        })?;
        let rate = violation_rate(&records, frozen.avg_trans);
        let max = records.iter().filter_map(|r| r.ratio()).fold(None, |a: Option<f64>, v| Some(a.map_or(v, |x| x.max(v))));
        out.push(format!("avg_trans/{cell}"), Some(s), None, "violation_rate", Some(rate), anchors::AVG_TRANS);
        out.push(format!("avg_trans/{cell}"), Some(s), None, "max_ratio", max, anchors::AVG_TRANS);
        if rate >= MAX_VIOLATION_RATE {
            out.violations.push(format!("avg-trans {cell}: violation rate {rate} at the frozen C = {}", frozen.avg_trans));
        }

        let seq = seq_inequality(&f, s, cfg.eta, cfg.k_inside)?;
        out.push(format!("seq_inequality/{cell}"), Some(s), Some(4.0), "ratio", seq.ratio, anchors::SEQ_INEQUALITY);
        if seq.ratio.is_some_and(|r| r > frozen.seq_inequality) {
            out.violations.push(format!("sequence inequality {cell}: ratio {:?} above the frozen {}", seq.ratio, frozen.seq_inequality));
        }
        let linf = seq_linf(&f, s, cfg.eta, 0.0)?;
        out.push(format!("seq_linf/{cell}"), Some(s), None, "ratio", linf.ratio, anchors::SEQ_LINF);
        if linf.ratio.is_some_and(|r| r > frozen.seq_linf) {
            out.violations.push(format!("sequence ℓ∞ bound {cell}: ratio {:?} above the frozen {}", linf.ratio, frozen.seq_linf));
        }
    }
    out.sort();
    Ok(out)
}
