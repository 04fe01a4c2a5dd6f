use deadline_matching::algos::PolicyKind;
use deadline_matching::gallery::{make_instance, parse_params};
use deadline_matching::generate::{random_instance, RandomSpec};
use deadline_matching::report::{competitive_report, write_csv, ArrivalModel, Estimate, ReportConfig};
use deadline_matching::stochastic::DepartureModel;

#[test]
fn sampling_agrees_with_exact_enumeration() {
    let inst = random_instance(&RandomSpec::new(5, 1), 21).unwrap();
    let policies = [PolicyKind::PostponedGreedy, PolicyKind::Batching { lookahead: 0 }];
    let exact_cfg = ReportConfig {
        arrival: ArrivalModel::Uniform,
        ..Default::default()
    };
    let mc_cfg = ReportConfig {
        samples: Some(20_000),
        seed: 3,
        ..exact_cfg.clone()
    };
    let exact = competitive_report("r", &inst, &policies, &exact_cfg).unwrap();
    let mc = competitive_report("r", &inst, &policies, &mc_cfg).unwrap();
    for (e, m) in exact.iter().zip(&mc) {
        let Estimate::Exact(value) = &e.alg else { panic!("expected exact") };
        let Estimate::Sampled { mean, stderr } = m.alg else { panic!("expected sampled") };
        assert!((mean - value.to_f64()).abs() <= 4.0 * stderr + 1e-9, "{}: {mean} vs {value}", e.policy);
    }
}

#[test]
fn csv_is_byte_identical_across_runs() {
    let i = make_instance("random-order-3cycle", &parse_params(&["v12=1/2"]).unwrap()).unwrap();
    let cfg = ReportConfig {
        arrival: ArrivalModel::Uniform,
        samples: Some(300),
        seed: 11,
        departures: Some(DepartureModel::geometric(deadline_matching::rational::q(1, 2))),
        ..Default::default()
    };
    let policies = [PolicyKind::PostponedGreedyStochastic, PolicyKind::Patient];
    let render = || {
        let mut out = Vec::new();
        write_csv(&mut out, &competitive_report("c", &i.instance, &policies, &cfg).unwrap()).unwrap();
        out
    };
    assert_eq!(render(), render());
}

#[test]
fn exact_rows_print_fractions() {
    let i = make_instance("pg-tightness", &[]).unwrap();
    let rows = competitive_report("t", &i.instance, &[PolicyKind::PostponedGreedy], &ReportConfig::default()).unwrap();
    let mut out = Vec::new();
    write_csv(&mut out, &rows).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "t,pg,fixed,4,2,exact,1/2,19/10,5/19");
}
