//! Property suites: the invariants each module promises, checked against
//! independent oracles where one exists.

mod common;

use proptest::prelude::*;

use greyvalve_core::hybrid::{area_target, HybridSample};
use greyvalve_core::lssvm::{gram_matrix, train, Dataset, KernelSpec};
use greyvalve_core::mechanism::{
    choked_pressure_drop, classify_regime, critical_pressure_ratio, flow_coefficient,
    orifice_flow, vapor_pressure, FlowRegime, FluidProperties, OperatingPoint, ValveGeometry,
};
use greyvalve_core::metrics::evaluate;

fn geometry(ac: f64, beta: f64, cv: f64, epsilon: f64, fl: f64) -> ValveGeometry<f64> {
    ValveGeometry { ac, beta, cv, epsilon, fl }
}

proptest! {
    // Doubling the pressure drop multiplies orifice flow by exactly sqrt(2).
    #[test]
    fn orifice_flow_scales_with_sqrt_of_drop(
        ac in 1e-6..1e-2f64,
        beta in 0.0..0.9f64,
        cv in 0.5..1.0f64,
        epsilon in 0.5..1.0f64,
        pvc in 0.0..1000.0f64,
        drop in 0.1..2000.0f64,
    ) {
        let geom = geometry(ac, beta, cv, epsilon, 0.9);
        let q1 = orifice_flow(&geom, pvc + drop, pvc, 998.0).unwrap();
        let q2 = orifice_flow(&geom, pvc + 2.0 * drop, pvc, 998.0).unwrap();
        let ratio = q2 / q1;
        prop_assert!((ratio - 2.0f64.sqrt()).abs() <= 1e-12 * ratio);
    }

    // Flow grows strictly with area and with drop; the turbulent flow
    // coefficient shrinks strictly with drop.
    #[test]
    fn monotonicity_of_flow_and_coefficient(
        ac in 1e-6..1e-2f64,
        drop in 1.0..1000.0f64,
        qv in 0.1..100.0f64,
    ) {
        let geom = geometry(ac, 0.3, 0.9, 1.0, 0.9);
        let bigger_area = geometry(ac * 1.5, 0.3, 0.9, 1.0, 0.9);
        let q = orifice_flow(&geom, 100.0 + drop, 100.0, 998.0).unwrap();
        prop_assert!(orifice_flow(&bigger_area, 100.0 + drop, 100.0, 998.0).unwrap() > q);
        prop_assert!(orifice_flow(&geom, 100.0 + 1.5 * drop, 100.0, 998.0).unwrap() > q);

        let fluid = FluidProperties::<f64>::water();
        let op = |dp: f64| OperatingPoint {
            p1: 100.0 + dp,
            p2: 100.0,
            temp: 293.15,
            qv: Some(qv),
            re_v: Some(1e4),
        };
        let c1 = flow_coefficient(&op(drop), &fluid, FlowRegime::NonChokedTurbulent, 0.1, 1.0).unwrap();
        let c2 = flow_coefficient(&op(drop * 1.5), &fluid, FlowRegime::NonChokedTurbulent, 0.1, 1.0).unwrap();
        prop_assert!(c2 < c1);
    }

    // F_F stays inside [0.68, 0.96] over its whole domain.
    #[test]
    fn critical_pressure_ratio_bounds(ratio in 0.0..=1.0f64, p_crit in 1.0..50_000.0f64) {
        let ff = critical_pressure_ratio(ratio * p_crit, p_crit).unwrap();
        prop_assert!((0.68..=0.96).contains(&ff), "F_F = {ff}");
    }

    // (1/T, ln pv) lies on a straight line: equal slopes between any pairs.
    #[test]
    fn vapor_pressure_is_affine_in_inverse_temperature(
        t1 in 250.0..330.0f64,
        gap1 in 5.0..40.0f64,
        gap2 in 5.0..40.0f64,
    ) {
        let fluid = FluidProperties::<f64>::water();
        let (t2, t3) = (t1 + gap1, t1 + gap1 + gap2);
        let point = |t: f64| (t.recip(), vapor_pressure(&fluid, t).unwrap().ln());
        let (x1, y1) = point(t1);
        let (x2, y2) = point(t2);
        let (x3, y3) = point(t3);
        let s12 = (y2 - y1) / (x2 - x1);
        let s13 = (y3 - y1) / (x3 - x1);
        prop_assert!((s12 - s13).abs() <= 1e-12 * s12.abs());
    }

    // The classifier is total on its domain and flips exactly at the
    // choked-flow boundary; the choked side splits on p2 vs pv.
    #[test]
    fn regime_partition_and_threshold_flip(
        temp in 280.0..370.0f64,
        fl in 0.5..0.99f64,
        p1_scale in 1.1..20.0f64,
        re_v in 1000.0..1e6f64,
    ) {
        let fluid = FluidProperties::<f64>::water();
        let geom = geometry(1e-4, 0.3, 0.9, 1.0, fl);
        let pv = vapor_pressure(&fluid, temp).unwrap();
        let p1 = pv * p1_scale + 50.0;
        let dp_t = choked_pressure_drop(&geom, p1, pv, fluid.p_crit).unwrap();
        prop_assume!(dp_t > 1e-6);

        let op = |p2: f64| OperatingPoint { p1, p2, temp, qv: None, re_v: Some(re_v) };
        let just_below = classify_regime(&op(p1 - dp_t * (1.0 - 1e-9)), &geom, &fluid).unwrap();
        prop_assert_eq!(just_below, FlowRegime::NonChokedTurbulent);
        let just_above = classify_regime(&op(p1 - dp_t * (1.0 + 1e-9)), &geom, &fluid).unwrap();
        let p2_above = p1 - dp_t * (1.0 + 1e-9);
        if p2_above > pv {
            prop_assert_eq!(just_above, FlowRegime::ChokedCavitation);
        } else {
            prop_assert_eq!(just_above, FlowRegime::ChokedFlashing);
        }

        // Re_v below 1000 short-circuits everything else.
        let laminar = classify_regime(
            &OperatingPoint { re_v: Some(999.0), ..op(p1 * 0.5) },
            &geom,
            &fluid,
        )
        .unwrap();
        prop_assert_eq!(laminar, FlowRegime::Laminar);
    }

    // The laminar formula at F_R = 1 is the turbulent formula.
    #[test]
    fn laminar_reduces_to_turbulent_at_unit_reynolds_factor(
        qv in 0.1..100.0f64,
        drop in 1.0..1000.0f64,
    ) {
        let fluid = FluidProperties::<f64>::water();
        let op = OperatingPoint {
            p1: 200.0 + drop,
            p2: 200.0,
            temp: 293.15,
            qv: Some(qv),
            re_v: Some(500.0),
        };
        let turbulent = flow_coefficient(&op, &fluid, FlowRegime::NonChokedTurbulent, 0.1, 1.0).unwrap();
        let laminar = flow_coefficient(&op, &fluid, FlowRegime::Laminar, 0.1, 1.0).unwrap();
        prop_assert!((laminar - turbulent).abs() <= 1e-15 * turbulent);
    }

    // Inverting the orifice equation recovers the area that generated the
    // flow.
    #[test]
    fn area_target_round_trip(
        ac in 1e-6..1e-2f64,
        beta in 0.0..0.9f64,
        cv in 0.5..1.0f64,
        p2 in 10.0..500.0f64,
        drop in 0.5..2000.0f64,
    ) {
        let geom = geometry(ac, beta, cv, 1.0, 0.9);
        let fluid = FluidProperties::<f64>::water();
        let p1 = p2 + drop;
        let q = orifice_flow(&geom, p1, p2, fluid.rho1).unwrap();
        let sample = HybridSample { features: vec![p1, p2, 0.5], q, pvc: p2 };
        let recovered = area_target(&sample, &geom, &fluid).unwrap();
        prop_assert!((recovered - ac).abs() <= 1e-12 * ac);
    }
}

/// Random regression set over [-2, 2] inputs, [-3, 3] targets.
fn dataset_strategy(max_l: usize) -> impl Strategy<Value = Dataset<f64>> {
    (2..=max_l, 1..=4usize).prop_flat_map(|(l, n)| {
        (
            prop::collection::vec(prop::collection::vec(-2.0..2.0f64, n), l),
            prop::collection::vec(-3.0..3.0f64, l),
        )
            .prop_map(|(rows, y)| Dataset::from_rows(rows, y).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Every trained model satisfies the stationarity system and the dual
    // zero-sum, re-checked here from a fresh Gram assembly.
    #[test]
    fn trained_models_satisfy_the_bordered_system(
        data in dataset_strategy(25),
        c_exp in -1.0..4.0f64,
    ) {
        let c = 10.0f64.powf(c_exp);
        let kernel = KernelSpec::rbf(1.0);
        let model = train(&data, &kernel, c).unwrap();
        let l = data.len();
        let gram = gram_matrix(&data, &kernel).unwrap();
        let y = data.targets();
        let y_max = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..l {
            let mut row = model.bias();
            for (j, &alpha_j) in model.alpha().iter().enumerate() {
                let mut h = gram[i * l + j];
                if i == j {
                    h += 1.0 / c;
                }
                row += h * alpha_j;
            }
            prop_assert!((row - y[i]).abs() <= 1e-8 * y_max);
        }
        let sum: f64 = model.alpha().iter().sum();
        let max = model.alpha().iter().fold(0.0f64, |m, a| m.max(a.abs()));
        prop_assert!(sum.abs() <= 1e-10 * (1.0 + max * l as f64));
    }

    // Kernel matrices of valid kernels are positive semidefinite.
    #[test]
    fn gram_matrices_are_psd(
        data in dataset_strategy(10),
        sigma in 0.3..3.0f64,
        degree in 1u32..=3,
        offset in 0.0..2.0f64,
    ) {
        for kernel in [
            KernelSpec::rbf(sigma),
            KernelSpec::Polynomial { degree, offset },
        ] {
            let l = data.len();
            let gram = gram_matrix(&data, &kernel).unwrap();
            let eigs = common::jacobi_eigenvalues(&gram, l);
            let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert!(min >= -1e-10, "min eigenvalue {min} for {kernel:?}");
        }
    }
}

fn paired_vectors(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=max_len).prop_flat_map(|n| {
        (
            prop::collection::vec((0.1..100.0f64).prop_union(-100.0..-0.1f64), n),
            prop::collection::vec(-100.0..100.0f64, n),
        )
    })
}

proptest! {
    // Means never exceed maxima; all three metrics ignore sample order;
    // scaling both vectors rescales RMSE only.
    #[test]
    fn metric_invariants((y, yhat) in paired_vectors(50), scale in 0.1..100.0f64) {
        let r = evaluate(&y, &yhat).unwrap();
        prop_assert!(r.mape <= r.err_max + 1e-12);
        prop_assert!(r.rmse >= 0.0);

        let rev_y: Vec<f64> = y.iter().rev().cloned().collect();
        let rev_yhat: Vec<f64> = yhat.iter().rev().cloned().collect();
        let rr = evaluate(&rev_y, &rev_yhat).unwrap();
        prop_assert!((rr.rmse - r.rmse).abs() <= 1e-12 * (1.0 + r.rmse));
        prop_assert!((rr.mape - r.mape).abs() <= 1e-12 * (1.0 + r.mape));
        prop_assert_eq!(rr.err_max, r.err_max);

        let sy: Vec<f64> = y.iter().map(|v| v * scale).collect();
        let syhat: Vec<f64> = yhat.iter().map(|v| v * scale).collect();
        let rs = evaluate(&sy, &syhat).unwrap();
        prop_assert!((rs.rmse - r.rmse * scale).abs() <= 1e-12 * (1.0 + r.rmse * scale));
        prop_assert!((rs.mape - r.mape).abs() <= 1e-12 * (1.0 + r.mape));
        prop_assert!((rs.err_max - r.err_max).abs() <= 1e-12 * (1.0 + r.err_max));
    }

    // rmse = 0 exactly when predictions equal targets.
    #[test]
    fn rmse_zero_iff_equal((y, yhat) in paired_vectors(20)) {
        let perfect = evaluate(&y, &y).unwrap();
        prop_assert_eq!(perfect.rmse, 0.0);
        let r = evaluate(&y, &yhat).unwrap();
        if y.iter().zip(&yhat).any(|(a, b)| a != b) {
            prop_assert!(r.rmse > 0.0);
        } else {
            prop_assert_eq!(r.rmse, 0.0);
        }
    }

    // The telemetry float format reproduces any finite f64 exactly.
    #[test]
    fn telemetry_float_format_round_trips(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        let text = greyvalve_core::telemetry::format_float(v);
        prop_assert_eq!(text.parse::<f64>().unwrap().to_bits(), v.to_bits());
    }
}
