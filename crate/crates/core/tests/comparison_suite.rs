//! Area/volume comparison, monotone ratios, maximal-volume rigidity, the
//! splitting reconstruction and the non-rigidity witnesses.

use lorentz_comparison::comparison::{
    area_sphere, coarea_residual, default_t_grid, first_variation_residual, limit_criterion,
    max_volume_check, monotonicity_report, nonrigid_example, region_area,
    splitting_reconstruct, splitting_reconstruct_from_samples, vol_ball, FiberRegion, Quadrature,
    RegionSpec,
};
use lorentz_comparison::distance::ShootingOptions;
use lorentz_comparison::model::{build_profile, ModelParams};
use lorentz_comparison::spacetime::{FnWarp, Hypersurface, Spacetime};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

fn model(kappa: f64, beta: f64, n: u32) -> Spacetime {
    let p = build_profile(ModelParams { kappa, beta, n }).unwrap();
    Spacetime::from_profile(&p).unwrap()
}

fn ball_region(radius: f64) -> RegionSpec {
    RegionSpec::slice_ball(0.0, radius)
}

#[test]
fn fiber_quadrature_converges_under_doubling() {
    for (kappa, beta, n) in [(1.0, 0.0, 3u32), (-1.0, 0.0, 4)] {
        let st = model(kappa, beta, n);
        let spec = ball_region(0.8);
        let gap = lorentz_comparison::comparison::quadrature_doubling_gap(&st, &spec).unwrap();
        assert!(gap < 1e-10, "doubling gap {gap} for ({kappa},{beta},{n})");
    }
}

#[test]
fn area_flow_of_model_slices_matches_closed_form() {
    for (kappa, beta, n) in [(1.0, 0.0, 3u32), (0.0, -1.0, 2), (-1.0, -2.0, 2)] {
        let st = model(kappa, beta, n);
        let profile = build_profile(ModelParams { kappa, beta, n }).unwrap();
        let spec = ball_region(0.8);
        let base = region_area(&st, &spec).unwrap();
        let b = profile.upper_end.min(st.t_max);
        for frac in [1e-3, 0.3, 0.7, 0.95] {
            let t = b * frac;
            let got = area_sphere(&st, &spec, t).unwrap();
            let expect = (profile.f(t) / profile.f(0.0)).powi(n as i32 - 1) * base;
            assert!(
                (got - expect).abs() < 1e-7 * expect.abs().max(1.0),
                "({kappa},{beta}): area({t}) = {got}, closed form {expect}"
            );
        }
        // t -> 0 recovers the base area.
        let near0 = area_sphere(&st, &spec, 1e-6).unwrap();
        assert!((near0 - base).abs() < 1e-4 * base);
    }
    // Flat product: constant in t.
    let st = model(0.0, 0.0, 3);
    let spec = ball_region(1.0);
    let base = region_area(&st, &spec).unwrap();
    for t in [0.5, 2.0, 10.0] {
        let a = area_sphere(&st, &spec, t).unwrap();
        assert!((a - base).abs() < 1e-9 * base);
    }
}

#[test]
fn ball_volume_examples_and_additivity() {
    // kappa = 0, beta = -1, n = 2: vol/area saturates at 1/2 by t = 1.
    let st = model(0.0, -1.0, 2);
    let spec = ball_region(1.0);
    let base = region_area(&st, &spec).unwrap();
    let v1 = vol_ball(&st, &spec, 1.0 - 1e-9).unwrap();
    assert!(
        (v1 / base - 0.5).abs() < 1e-7,
        "vol/area = {} at t = 1",
        v1 / base
    );
    assert_eq!(vol_ball(&st, &spec, 0.0).unwrap(), 0.0);

    // Additivity over disjoint boxes.
    let left = RegionSpec {
        sigma: Hypersurface::Slice(0.0),
        region: FiberRegion::Box {
            center: vec![-0.5],
            half_widths: vec![0.5],
        },
        quadrature: Quadrature::default(),
    };
    let right = RegionSpec {
        sigma: Hypersurface::Slice(0.0),
        region: FiberRegion::Box {
            center: vec![0.5],
            half_widths: vec![0.5],
        },
        quadrature: Quadrature::default(),
    };
    let both = RegionSpec {
        sigma: Hypersurface::Slice(0.0),
        region: FiberRegion::Box {
            center: vec![0.0],
            half_widths: vec![1.0],
        },
        quadrature: Quadrature::default(),
    };
    let t = 0.7;
    let sum = vol_ball(&st, &left, t).unwrap() + vol_ball(&st, &right, t).unwrap();
    let whole = vol_ball(&st, &both, t).unwrap();
    assert!(
        (sum - whole).abs() < 1e-8 * whole.max(1.0),
        "additivity defect {}",
        sum - whole
    );
}

#[test]
fn monotone_ratios_saturate_on_the_model() {
    for (kappa, beta, n) in [(1.0, 0.0, 2u32), (0.0, -1.0, 2), (-1.0, -2.0, 2)] {
        let st = model(kappa, beta, n);
        let profile = build_profile(ModelParams { kappa, beta, n }).unwrap();
        let spec = ball_region(0.7);
        let grid = default_t_grid(&profile, 48, st.t_max);
        let report = monotonicity_report(&st, &spec, &profile, &grid).unwrap();
        assert!(report.monotone_area && report.monotone_vol, "({kappa},{beta})");
        assert!(report.rigidity_flags.iter().all(|&f| f), "model must stay rigid");
        let base = report.base_area;
        for (ar, vr) in report.area_ratio.iter().zip(&report.vol_ratio) {
            assert!((ar - base).abs() < 1e-6 * base, "area ratio {ar} vs {base}");
            assert!((vr - base).abs() < 1e-5 * base, "vol ratio {vr} vs {base}");
        }
    }
}

fn perturbed_cos_spacetime(rate: f64, n: u32) -> Spacetime {
    // f = cos(rate t) on a symmetric slab inside its first zero.
    let hi = std::f64::consts::FRAC_PI_2 / rate - 1e-9;
    Spacetime::new(
        n,
        -1,
        Arc::new(FnWarp {
            f: Box::new(move |t| (rate * t).cos()),
            df: Box::new(move |t| -rate * (rate * t).sin()),
            ddf: Box::new(move |t| -rate * rate * (rate * t).cos()),
        }),
        -hi,
        hi,
    )
    .unwrap()
}

#[test]
fn strictly_smaller_mean_curvature_gives_decreasing_ratios() {
    // f = cos(1.1 t) against the (kappa, beta) = (1, 0) comparison space:
    // the curvature condition holds and the ratios strictly decrease.
    let st = perturbed_cos_spacetime(1.1, 2);
    let profile = build_profile(ModelParams {
        kappa: 1.0,
        beta: 0.0,
        n: 2,
    })
    .unwrap();
    let ccc = st
        .ccc_check(&Hypersurface::Slice(0.0), 1.0, 0.0, 200, 3)
        .unwrap();
    assert!(ccc.holds);
    let spec = ball_region(0.7);
    let grid: Vec<f64> = (1..=40).map(|k| st.t_max * k as f64 / 41.0).collect();
    let report = monotonicity_report(&st, &spec, &profile, &grid).unwrap();
    assert!(report.monotone_area && report.monotone_vol);
    // Strict decrease after the deviation sets in.
    let first = report.area_ratio[0];
    let last = *report.area_ratio.last().unwrap();
    assert!(
        last < first * 0.9,
        "expected strict decay: {first} -> {last}"
    );
    // Mean curvature comparison on samples.
    for (i, &t) in report.t.iter().enumerate() {
        let h_here = st.slice_mean_curvature(t);
        let h_model = profile.mean_curvature(t);
        assert!(
            h_here <= h_model + 1e-6,
            "H comparison fails at t = {t}: {h_here} > {h_model} (sample {i})"
        );
    }
}

#[test]
fn violation_injection_is_flagged() {
    // f = cos(0.9 t) has larger mean curvature than the (1, 0) model; the
    // ratio increases and the monotone verdict must fail.
    let st = perturbed_cos_spacetime(0.9, 2);
    let profile = build_profile(ModelParams {
        kappa: 1.0,
        beta: 0.0,
        n: 2,
    })
    .unwrap();
    let spec = ball_region(0.7);
    let grid: Vec<f64> = (1..=30).map(|k| st.t_max.min(1.5) * k as f64 / 31.0).collect();
    let report = monotonicity_report(&st, &spec, &profile, &grid).unwrap();
    assert!(!report.monotone_area, "violation went undetected");
    assert!(report.first_violation.is_some());
}

#[test]
fn coarea_and_first_variation_residuals() {
    let st = model(1.0, 0.0, 3);
    let spec = ball_region(0.6);
    for t in [0.3, 0.7, 1.1] {
        let res = coarea_residual(&st, &spec, t, 3e-3).unwrap();
        assert!(res.abs() < 1e-6, "coarea residual {res} at t = {t}");
        let fv = first_variation_residual(&st, &spec, 0.0, t, 3e-3).unwrap();
        assert!(fv.abs() < 1e-6, "first variation residual {fv} at t = {t}");
    }
}

#[test]
fn delayed_perturbation_keeps_early_rigidity_flags() {
    // f equals cos t up to t0 and then loses mean curvature: the ratio is
    // constant on [0, t0] and strictly decreasing after, so rigidity flags
    // hold exactly on the early stretch, where the level-flow shape operator
    // is isotropic.
    let t0 = 0.5;
    let eps = -0.2;
    let st = Spacetime::new(
        2,
        -1,
        Arc::new(FnWarp {
            f: Box::new(move |t| t.cos() + eps * (t - t0).max(0.0).powi(3)),
            df: Box::new(move |t| -t.sin() + 3.0 * eps * (t - t0).max(0.0).powi(2)),
            ddf: Box::new(move |t| -t.cos() + 6.0 * eps * (t - t0).max(0.0)),
        }),
        -1.2,
        1.35,
    )
    .unwrap();
    let profile = build_profile(ModelParams {
        kappa: 1.0,
        beta: 0.0,
        n: 2,
    })
    .unwrap();
    let spec = ball_region(0.7);
    let grid: Vec<f64> = (1..=40).map(|k| 1.3 * k as f64 / 40.0).collect();
    let report = monotonicity_report(&st, &spec, &profile, &grid).unwrap();
    assert!(report.monotone_area);
    for (i, &t) in report.t.iter().enumerate() {
        if t < t0 - 1e-9 {
            assert!(report.rigidity_flags[i], "flag lost before the deviation at t = {t}");
        }
        if t > t0 + 0.3 {
            assert!(!report.rigidity_flags[i], "flag survived past the deviation at t = {t}");
        }
    }
    // Early isotropy: the level-flow shape operator matches (f'/f) Id of the
    // model on the rigid stretch.
    let early: Vec<f64> = report
        .t
        .iter()
        .cloned()
        .filter(|&t| t < t0 - 1e-9)
        .collect();
    let start = lorentz_comparison::spacetime::PropagatorStart::vertical(0.0, DVector::zeros(1));
    let outs = st
        .propagate_jacobi_grid(&start, &lorentz_comparison::spacetime::SigmaInit::Slice, &early)
        .unwrap();
    for out in &outs {
        let s = out.shape().unwrap();
        let lambda = profile.f_prime(out.s) / profile.f(out.s);
        let dev = (s - DMatrix::identity(1, 1) * lambda).abs().max();
        assert!(dev < 1e-6, "anisotropy {dev} at t = {}", out.s);
    }
}

#[test]
fn maximal_volume_verdict_on_models() {
    let opts = ShootingOptions::default();
    for (kappa, beta, n) in [(1.0, 0.0, 2u32), (0.0, -1.0, 2)] {
        let st = model(kappa, beta, n);
        let profile = build_profile(ModelParams { kappa, beta, n }).unwrap();
        let regions: Vec<RegionSpec> = [0.5, 1.0, 2.0]
            .iter()
            .map(|r| ball_region(*r))
            .collect();
        let verdict = max_volume_check(&st, &regions, &profile, &opts).unwrap();
        assert!(verdict.maximal, "({kappa},{beta}): ratios {:?}", verdict.ratios);
        assert!(verdict.cut_free, "cut parameters {:?}", verdict.cut_parameters);
        let split = verdict.splitting.expect("splitting runs when maximal");
        assert!(split.precondition_ok);
        assert!(split.pass, "reconstruction error {}", split.max_rel_error);
        // Homogeneity: every region reports the same ratio.
        for r in &verdict.ratios {
            assert!((r - verdict.v_bar).abs() < 1e-6 * verdict.v_bar.max(1.0));
        }
    }
}

#[test]
fn volume_deficit_is_reported_for_perturbed_warps() {
    let st = perturbed_cos_spacetime(1.1, 2);
    let profile = build_profile(ModelParams {
        kappa: 1.0,
        beta: 0.0,
        n: 2,
    })
    .unwrap();
    let regions = vec![ball_region(0.7)];
    let verdict = max_volume_check(&st, &regions, &profile, &ShootingOptions::default()).unwrap();
    assert!(!verdict.maximal);
    assert!(
        verdict.ratios[0] < verdict.v_bar - 1e-3,
        "ratio {} should fall short of v_bar {}",
        verdict.ratios[0],
        verdict.v_bar
    );
    assert!(verdict.splitting.is_none());
}

#[test]
fn limit_criterion_in_the_infinite_end_regime() {
    // The model itself: deficits vanish identically.
    let st = model(-1.0, 0.0, 2);
    let profile = build_profile(ModelParams {
        kappa: -1.0,
        beta: 0.0,
        n: 2,
    })
    .unwrap();
    let regions = vec![ball_region(0.8)];
    let ts = [1.0, 2.0, 4.0, 8.0];
    let verdict = limit_criterion(&st, &regions, &profile, &ts).unwrap();
    assert!(verdict.maximal_in_the_limit, "{:?}", verdict.deficits);
    for row in &verdict.deficits {
        for d in row {
            assert!(d.abs() < 1e-6, "model deficit {d}");
        }
    }
    // A beta-shifted witness stays bounded away from zero.
    let shifted = build_profile(ModelParams {
        kappa: -1.0,
        beta: -0.5,
        n: 2,
    })
    .unwrap();
    let st2 = Spacetime::from_profile_capped(&shifted, 12.0).unwrap();
    let verdict = limit_criterion(&st2, &regions, &profile, &ts).unwrap();
    assert!(!verdict.maximal_in_the_limit);
    let last = verdict.deficits[0].last().cloned().unwrap();
    assert!(last > 0.1, "deficit {last} should be bounded away from zero");
    // Dip supported in (0, 1): the deficit persists at a positive constant.
    let bump = |t: f64| {
        if (0.0..1.0).contains(&t) {
            (t * (1.0 - t)).powi(3)
        } else {
            0.0
        }
    };
    let dbump = |t: f64| {
        if (0.0..1.0).contains(&t) {
            3.0 * (t * (1.0 - t)).powi(2) * (1.0 - 2.0 * t)
        } else {
            0.0
        }
    };
    let ddbump = |t: f64| {
        if (0.0..1.0).contains(&t) {
            6.0 * (t * (1.0 - t)) * (1.0 - 2.0 * t).powi(2)
                - 6.0 * (t * (1.0 - t)).powi(2)
        } else {
            0.0
        }
    };
    let cosh_profile = build_profile(ModelParams {
        kappa: -1.0,
        beta: 0.0,
        n: 2,
    })
    .unwrap();
    let dipped = Spacetime::new(
        2,
        1,
        Arc::new(FnWarp {
            f: Box::new(move |t| t.cosh() - 0.5 * bump(t)),
            df: Box::new(move |t| t.sinh() - 0.5 * dbump(t)),
            ddf: Box::new(move |t| t.cosh() - 0.5 * ddbump(t)),
        }),
        -2.0,
        12.0,
    )
    .unwrap();
    let verdict = limit_criterion(&dipped, &regions, &cosh_profile, &ts).unwrap();
    assert!(!verdict.maximal_in_the_limit);
    let row = &verdict.deficits[0];
    // After the support of the dip the deficit freezes at 0.5 * integral of
    // the bump = 1/280 (up to the volume quadrature noise).
    let expect = 0.5 / 140.0;
    assert!((row[2] - expect).abs() < 1e-4, "deficit {row:?} vs {expect}");
    let tail_gap = (row[2] - row[3]).abs();
    assert!(tail_gap < 1e-4, "deficit keeps moving: {row:?}");
}

#[test]
fn splitting_reconstruction_model_and_flat() {
    let opts_grid = 20;
    for (kappa, beta, n) in [(1.0, 0.0, 2u32), (0.0, 0.0, 3)] {
        let st = model(kappa, beta, n);
        let profile = build_profile(ModelParams { kappa, beta, n }).unwrap();
        let grid = default_t_grid(&profile, opts_grid, st.t_max);
        let samples: Vec<DVector<f64>> = vec![
            DVector::zeros((n - 1) as usize),
            DVector::from_element((n - 1) as usize, 0.4),
        ];
        let report = splitting_reconstruct(&st, &profile, &grid, &samples).unwrap();
        assert!(report.precondition_ok, "anisotropy {}", report.worst_anisotropy);
        assert!(
            report.max_rel_error < 1e-8,
            "({kappa},{beta}): reconstruction error {}",
            report.max_rel_error
        );
    }
}

#[test]
fn synthetic_anisotropy_fails_the_precondition() {
    let profile = build_profile(ModelParams {
        kappa: 1.0,
        beta: 0.0,
        n: 3,
    })
    .unwrap();
    let grid = [0.2, 0.4, 0.6];
    let h0 = vec![DMatrix::identity(2, 2)];
    let h_direct = vec![grid
        .iter()
        .map(|&t| DMatrix::identity(2, 2) * profile.f(t).powi(2))
        .collect::<Vec<_>>()];
    // Shape samples with an anisotropic bump on one axis.
    let shapes = vec![grid
        .iter()
        .map(|&t| {
            let lambda = profile.f_prime(t) / profile.f(t);
            let mut s = DMatrix::identity(2, 2) * lambda;
            s[(0, 0)] += 1e-3;
            s
        })
        .collect::<Vec<_>>()];
    let report =
        splitting_reconstruct_from_samples(&profile, &grid, &h0, &h_direct, &shapes).unwrap();
    assert!(!report.precondition_ok);
    assert!(report.worst_anisotropy > 1e-4);
    assert!(!report.pass);
}

#[test]
fn nonrigid_witnesses_share_the_curvature_condition_but_differ_in_volume() {
    let opts = ShootingOptions::default();
    let report = nonrigid_example(-1.0, -0.5, (-0.9, -0.5), 2, 2.0, &opts).unwrap();
    assert!(report.ccc_holds.0 && report.ccc_holds.1);
    assert!(report.distinguishable, "volumes {:?}", report.volumes);
    assert!(report.relative_difference > 0.01);
    // Both witnesses have no finite cut: the horizon is the only bound.
    assert!(report.cut_parameters.0 > 5.0);
    assert!(report.cut_parameters.1 > 5.0);

    // Degenerate pair: identical parameters give identical volumes.
    let same = nonrigid_example(-1.0, -0.5, (-0.5, -0.5), 2, 2.0, &opts).unwrap();
    assert!(!same.distinguishable);
    assert!((same.volumes.0 - same.volumes.1).abs() < 1e-12);

    // Affine family over a flat bound: growing warps are distinguished by
    // their volume profiles while sharing the curvature condition.
    let affine = nonrigid_example(0.0, 0.8, (0.3, 0.8), 2, 2.0, &opts).unwrap();
    assert!(affine.ccc_holds.0 && affine.ccc_holds.1);
    assert!(affine.distinguishable);

    // Regime violations are rejected.
    assert!(nonrigid_example(1.0, 0.5, (0.2, 0.5), 2, 2.0, &opts).is_err());
    assert!(nonrigid_example(-1.0, -0.5, (-1.5, -0.5), 2, 2.0, &opts).is_err());
}
