use proptest::prelude::*;
use psclab::principal_agent::{
    derivative_at_zero_mc, effort_gain, max_profit_posc_pa, optimal_effort_plsc,
    optimal_effort_posc_expost, plsc_pa_example2_formula, revenue_plsc_pa, DEFAULT_STEP_MC,
};
use psclab::{BuiltinModel, CostFunction, RandomStream, Utility};

#[test]
fn plsc_effort_and_gain_fall_with_alpha() {
    for gamma in [0.25, 0.5, 1.0, 2.0, 8.0] {
        let c = CostFunction::quadratic(gamma).unwrap();
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for i in 0..=95 {
            let a = i as f64 / 100.0;
            let e = optimal_effort_plsc(&c, a).unwrap();
            let k = effort_gain(&c, a).unwrap();
            assert!(e <= prev.0 && k <= prev.1 && k >= 0.0);
            prev = (e, k);
        }
    }
}

proptest! {
    #[test]
    fn ex_post_effort_dominates(gamma in 0.1f64..10.0, alpha in 0.0f64..0.99, w in -3.0f64..3.0) {
        let c = CostFunction::quadratic(gamma).unwrap();
        let e_plsc = optimal_effort_plsc(&c, alpha).unwrap();
        prop_assert!(optimal_effort_posc_expost(gamma, alpha, w) >= e_plsc);
    }

    #[test]
    fn ex_post_profit_increases(gamma in 0.1f64..10.0, alpha in 0.0f64..0.99,
                                w in -3.0f64..3.0, dw in 1e-6f64..0.5) {
        let lo = max_profit_posc_pa(gamma, alpha, w);
        let hi = max_profit_posc_pa(gamma, alpha, w + dw);
        prop_assert!(hi > lo);
        // effort 0 is feasible, so the optimum beats it
        prop_assert!(lo >= w - alpha * w.max(0.0) - 1e-15);
    }
}

#[test]
fn plsc_pa_monte_carlo_on_grid() {
    let m = BuiltinModel::example2_pa();
    let mut exceed = 0;
    for (gi, gamma) in [0.25, 0.5, 1.0, 2.0, 4.0].into_iter().enumerate() {
        let c = CostFunction::quadratic(gamma).unwrap();
        for (ai, alpha) in [0.0, 0.2, 0.4, 0.6, 0.8].into_iter().enumerate() {
            let s = RandomStream::new(500 + gi as u64, ai as u64);
            let r = revenue_plsc_pa(&m, &Utility::Linear, &c, alpha, 40_000, &s).unwrap();
            let dev = (r.total - plsc_pa_example2_formula(gamma, alpha)).abs() / r.stderr_total;
            assert!(dev < 4.5, "γ={gamma} α={alpha}: {dev} stderr");
            exceed += usize::from(dev > 3.0);
        }
    }
    // 25 cells at 3 stderr: one chance exceedance is plausible
    assert!(exceed <= 1);
}

#[test]
fn derivative_at_zero_positive_under_risk_aversion() {
    let m = BuiltinModel::example2_pa();
    let c = CostFunction::quadratic(1.0).unwrap();
    let u = Utility::cara(1.0, 1.0).unwrap();
    let d = derivative_at_zero_mc(&m, &u, &c, DEFAULT_STEP_MC, 100_000, &RandomStream::new(8, 0)).unwrap();
    assert!(d.mean > 0.0 && d.t_stat() > 3.0, "{d:?}");
}
