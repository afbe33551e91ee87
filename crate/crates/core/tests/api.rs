use nclift::lifting::universal_lift;
use nclift::problem::{problem_from_complex, Problem};
use nclift::report::{run, Command, RunOptions};
use nclift::{fixtures, Rational};
use proptest::prelude::*;

#[test]
fn readme_example() {
    let k = fixtures::obstructed_k::<Rational>();
    let state = universal_lift(&k, 4).unwrap();
    assert_eq!(state.relations()[0].series.format(), "t.t");
}

#[test]
fn every_command_echoes_its_problem() {
    let mut p = problem_from_complex("j", &fixtures::jordan::<Rational>(3, 6));
    p.options.presentation_degree = Some(1);
    let opts = RunOptions::resolve(&p, None, Some(2), None).unwrap();
    for c in Command::ALL {
        let r = run(c, &p, &opts).unwrap();
        assert!(r.ok, "{}: {}", c.name(), r.text);
        assert_eq!(Problem::from_json(&r.json["problem"].to_string()).unwrap(), p);
        assert_eq!(r.json["command"], c.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn problem_json_round_trips(m in 2usize..5, n in 1usize..4, c in -20i64..20, den in 1i64..9) {
        prop_assume!(n < m);
        let mut p = problem_from_complex("j", &fixtures::jordan::<Rational>(n, m));
        p.complex.differentials[0].matrix[0][0][0] = nclift::problem::Coeff(format!("{c}/{den}"));
        let text = p.to_json_string();
        let back = Problem::from_json(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_json_string(), text);
    }
}
