use qbracket::grammar::Expr;
use qbracket::quasimodular::{certify, DEFAULT_MARGIN};
use qbracket::{qbracket, rat, CycQ, QSeries};

fn sigma(k: u32, n: i64) -> i64 {
    (1..=n).filter(|d| n % d == 0).map(|d| d.pow(k)).sum()
}

fn bracket(spec: &str, order: u32) -> QSeries {
    let e = Expr::parse(spec).unwrap();
    qbracket(&e.function(order).unwrap(), order).unwrap()
}

#[test]
fn q2_bracket_is_a_divisor_sum() {
    let s = bracket("Q(2)", 12);
    assert_eq!(s.coeff_int(0).unwrap(), CycQ::from_rat(rat(-1, 24)));
    for n in 1..=12 {
        assert_eq!(s.coeff_int(n).unwrap(), CycQ::from_int(sigma(1, n)), "q^{n}");
    }
}

#[test]
fn q4_plus_half_q2_squared_is_a_multiple_of_g4() {
    // G4 = 1/240 + sum sigma_3(n) q^n; the multiple is fixed by the constant term
    let s = bracket("Q(4)", 10).add(&bracket("1/2*Q(2)*Q(2)", 10));
    let c = s.coeff_int(0).unwrap().scale(&rat(240, 1));
    assert!(!c.is_zero());
    for n in 1..=10 {
        assert_eq!(s.coeff_int(n).unwrap(), c.scale(&rat(sigma(3, n), 1)), "q^{n}");
    }
}

#[test]
fn series_json_roundtrip() {
    let s = bracket("Q(1; a=1/3)*Q(1; a=2/3)", 6);
    assert_eq!(QSeries::from_json(&s.to_json()).unwrap(), s);
}

#[test]
fn parsed_products_certify_at_their_weight() {
    for (spec, depth) in [("Q(3)*Q(3)", 3), ("Q(2)*Q(4)", 3), ("H(4)", 2)] {
        let e = Expr::parse(spec).unwrap();
        let c = certify(&bracket(spec, 24), e.weight(), e.level(), depth, DEFAULT_MARGIN).unwrap();
        assert!(c.is_certified(), "{spec}");
    }
}

#[test]
fn odd_weight_level_one_brackets_vanish() {
    assert!(bracket("Q(2)*Q(3)", 10).truncate_int(11).is_zero());
}
