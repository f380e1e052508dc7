use icausal::oracles::light_time_quadrature;
use icausal::spacetime::*;
use icausal::Error;

#[test]
fn solar_metric_matches_closed_form() {
    let sun = SpacetimeConfig::si(1.98847e30, 6.957e8, 1.0e3).unwrap();
    let rs = 2.0 * CODATA_G * 1.98847e30 / (SPEED_OF_LIGHT * SPEED_OF_LIGHT);
    for r in [6.957e8, 1.5e11, 7.0e9] {
        let expected = -(1.0 - rs / r);
        let got = metric_gtt(r, &sun).unwrap();
        assert!(((got - expected) / expected).abs() < 1e-15);
    }
}

#[test]
fn arrival_time_composes_dilation_and_travel() {
    let cfg = SpacetimeConfig::geometric(0.7, 2.5, 1.3).unwrap();
    let (re, rr) = (2.5f64, 3.8f64);
    let rs = 1.4f64;
    let tc = ((rr - re) + rs * ((rr - rs) / (re - rs)).ln()) / 1.0;
    let tau = 4.2;
    let expected = (1.0 - rs / rr).sqrt() * (tau / (1.0 - rs / re).sqrt() + tc);
    let got = arrival_proper_time(tau, re, rr, &cfg).unwrap();
    assert!(((got - expected) / expected).abs() < 1e-12);
    assert_eq!(arrival_proper_time(0.0, re, re, &cfg).unwrap(), 0.0);
    assert!(arrival_proper_time(-1.0, re, rr, &cfg).is_err());
}

#[test]
fn earth_scale_quadrature() {
    let earth = SpacetimeConfig::si(5.972e24, 6.371e6, 100.0).unwrap();
    let closed = light_coordinate_time(earth.r(), earth.r() + earth.h(), &earth).unwrap();
    let quad = light_time_quadrature(earth.r(), earth.r() + earth.h(), &earth);
    assert!((closed - quad).abs() / closed < 1e-9);
}

#[test]
fn two_ics_orders_flip_with_placement() {
    let cfg = SpacetimeConfig::geometric(1.0, 3.0, 1.0).unwrap();
    let tau = tau_star_threshold(&cfg).unwrap() * 1.1;
    let x = EventSpec::on_a(tau).unwrap();
    let y = EventSpec::on_b(tau).unwrap();
    assert_eq!(classify_order(x, y, Clock::A, &cfg).unwrap().relation, Relation::YBeforeX);
    assert_eq!(classify_order(x, y, Clock::B, &cfg).unwrap().relation, Relation::XBeforeY);
    let report = validate_mics(&MicsScenario::two_ics(cfg, tau), 2).unwrap();
    assert!(report.valid);
    assert_eq!(report.orders[0].order, "X->Y");
    assert_eq!(report.orders[1].mass_near, Clock::A);
}

#[test]
fn three_ics_toy_report_lists_margins() {
    let report = validate_mics(&MicsScenario::toy(3).unwrap(), 3).unwrap();
    assert!(report.valid);
    let orders: Vec<&str> = report.orders.iter().map(|o| o.order.as_str()).collect();
    assert_eq!(orders, ["X1X2Y", "X1YX2", "YX1X2"]);
    for o in &report.orders {
        assert_eq!(o.pairs.len(), 2);
        for p in &o.pairs {
            assert_eq!(p.verdict.relation, p.expected);
        }
    }
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["orders"][1]["pairs"][1]["verdict"]["relation"], "Y_before_X");
}

#[test]
fn misconfigured_scenario_is_invalid() {
    let mut scn = MicsScenario::toy(4).unwrap();
    scn.geometries.swap(0, 3);
    let report = validate_mics(&scn, 4).unwrap();
    assert!(!report.valid);
    assert!(report.failure.unwrap().starts_with("order X1X2X3Y"));
    assert!(matches!(validate_mics(&scn, 3), Err(Error::InvalidConfig(_))));
    assert!(matches!(validate_mics(&scn, 5), Err(Error::Unsupported(_))));
}
