use jetcalc::identities::*;
use std::time::Instant;

fn show(r: &SuiteReport) {
    for c in &r.checks {
        eprintln!("{} {} {}/{} {:?}", r.suite, c.name, c.instances - c.failures, c.instances, c.witness);
    }
}

#[test]
fn suites_pass() {
    let cfg = SuiteConfig::new(7, 200);
    for (name, f) in [
        ("spencer", spencer_bracket_suite as fn(&SuiteConfig) -> jetcalc::Result<SuiteReport>),
        ("action", jet_action_suite),
    ] {
        let t = Instant::now();
        let r = f(&cfg).unwrap();
        eprintln!("{name}: {:?}", t.elapsed());
        show(&r);
        assert!(r.passed());
    }
    let t = Instant::now();
    let r = form_complex_suite(&SuiteConfig { k_max: 2, ..SuiteConfig::new(7, 60) }).unwrap();
    eprintln!("forms: {:?}", t.elapsed());
    show(&r);
    assert!(r.passed());
    let r = constants_kernel_suite(2, 2, 3).unwrap();
    show(&r);
    assert!(r.passed());
    let t = Instant::now();
    let r = arrow_suite(&SuiteConfig::new(7, 500), 3, 4).unwrap();
    eprintln!("arrows: {:?}", t.elapsed());
    show(&r);
    assert!(r.passed());
}
