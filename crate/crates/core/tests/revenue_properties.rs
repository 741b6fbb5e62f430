use psclab::auctions::{english_payment, second_price_at};
use psclab::{
    compare_contracts_paired, equilibrium_strategy_sp, estimate_revenue,
    revenue_closed_form_example1, run_english_clock, AuctionFormat, BuiltinModel, InfoModel,
    RandomStream, SharingContract, SignalProfile, Utility,
};

fn alpha_grid() -> Vec<f64> {
    (0..10).map(|i| i as f64 / 10.0).collect()
}

#[test]
fn every_outcome_conserves_value() {
    let m = BuiltinModel::example2_pa();
    let u = Utility::cara(1.0, 1.0).unwrap();
    let contracts = [
        SharingContract::OneTime,
        SharingContract::posc(0.4).unwrap(),
        SharingContract::plsc(0.4).unwrap(),
        SharingContract::general(&[(-1.0, -0.1), (0.0, 0.0), (1.0, 0.35)]).unwrap(),
    ];
    let mut s = RandomStream::new(9, 0);
    for c in &contracts {
        let strategy = equilibrium_strategy_sp(&m, &u, c, 129).unwrap();
        for _ in 0..2000 {
            let mut y = vec![0.0; 2];
            m.sample_signals_into(&mut s, &mut y);
            let o = second_price_at(&m, &strategy, c, &SignalProfile::new(y.clone()).unwrap(), s.uniform());
            let sum = o.auction_payment + o.sharing_payment + o.buyer_total_profit;
            assert!((sum - o.realized_value).abs() < 1e-14);
            assert_eq!(o.winner_index, if y[1] > y[0] { 1 } else { 0 });
        }
    }
}

#[test]
fn example1_stage_shapes() {
    let mut prev_s1 = f64::INFINITY;
    let mut prev_s2 = -1.0;
    let mut prev_plsc = -1.0;
    for a in alpha_grid() {
        let posc = revenue_closed_form_example1(&SharingContract::posc(a).unwrap()).unwrap();
        let plsc = revenue_closed_form_example1(&SharingContract::plsc(a).unwrap()).unwrap();
        assert!(posc.stage1 < prev_s1 + 1e-9);
        assert!(posc.stage2 > prev_s2 - 1e-9);
        if a > 0.0 {
            assert!(posc.stage2 > 0.0);
        }
        assert!(plsc.total > prev_plsc);
        assert!(plsc.total >= posc.total - 1e-9);
        prev_s1 = posc.stage1;
        prev_s2 = posc.stage2;
        prev_plsc = plsc.total;
    }
}

#[test]
fn posc_monte_carlo_matches_quadrature() {
    let m = BuiltinModel::example1();
    let c = SharingContract::posc(0.5).unwrap();
    let r = estimate_revenue(
        &m,
        &Utility::Linear,
        &c,
        AuctionFormat::SecondPrice,
        200_000,
        &RandomStream::new(2024, 0),
    )
    .unwrap();
    let exact = revenue_closed_form_example1(&c).unwrap();
    assert!((r.total - exact.total).abs() < 3.0 * r.stderr_total, "{r:?}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let m = BuiltinModel::common_value_avg(3).unwrap();
    let c = SharingContract::posc(0.3).unwrap();
    let s = RandomStream::new(77, 1);
    let run = || {
        estimate_revenue(&m, &Utility::Linear, &c, AuctionFormat::English, 20_000, &s).unwrap()
    };
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(run);
    assert_eq!(one, many);
}

#[test]
fn rankings_on_common_draws() {
    let m = BuiltinModel::example1();
    let u = Utility::Linear;
    let rep = compare_contracts_paired(
        &m,
        &u,
        &[SharingContract::OneTime, SharingContract::posc(0.3).unwrap()],
        AuctionFormat::SecondPrice,
        50_000,
        1,
    )
    .unwrap();
    assert!(rep.difference(0, 1).unwrap().b_not_below_a(3.0));
    let rep = compare_contracts_paired(
        &m,
        &u,
        &[SharingContract::plsc(0.2).unwrap(), SharingContract::plsc(0.4).unwrap()],
        AuctionFormat::SecondPrice,
        50_000,
        2,
    )
    .unwrap();
    assert!(rep.difference(0, 1).unwrap().t_stat() > 3.0);
}

#[test]
fn clock_tracks_direct_payment_under_risk_aversion() {
    let m = BuiltinModel::common_value_avg(3).unwrap();
    let u = Utility::cara(1.0, 1.0).unwrap();
    let step = 1e-3;
    let mut s = RandomStream::new(31, 0);
    for c in [SharingContract::posc(0.5).unwrap(), SharingContract::plsc(0.2).unwrap()] {
        for _ in 0..25 {
            let mut y = vec![0.0; 3];
            m.sample_signals_into(&mut s, &mut y);
            let p = SignalProfile::new(y).unwrap();
            let (winner, direct) = english_payment(&m, &u, &c, &p).unwrap();
            let clock = run_english_clock(&m, &u, &c, &p, step, 0.5).unwrap();
            assert_eq!(clock.outcome.winner_index, winner);
            assert!((clock.outcome.auction_payment - direct).abs() <= step);
        }
    }
}

#[test]
fn english_equals_second_price_for_two_buyers() {
    let m = BuiltinModel::example1();
    let u = Utility::cara(1.0, 1.0).unwrap();
    let c = SharingContract::posc(0.4).unwrap();
    let strategy = equilibrium_strategy_sp(&m, &u, &c, 33).unwrap();
    // on grid nodes the tabulated strategy is an exact solve
    for (i, &y) in strategy.signals().iter().enumerate().step_by(4) {
        let p = SignalProfile::new(vec![y, 1.0]).unwrap();
        let (_, eng) = english_payment(&m, &u, &c, &p).unwrap();
        assert!((eng - strategy.bids()[i]).abs() < 1e-12);
    }
}
