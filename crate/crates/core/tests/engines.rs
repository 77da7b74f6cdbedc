use brjuno::cf::{
    align_with_rcf, classify_parity, convergents, expand, intermediate_convergents, iota, jump_bcf, step, CfAlgorithm,
    Digit, Epsilon, ParityClass,
};
use brjuno::error::Error;
use brjuno::rational::{rat, Rational};
use num_bigint::BigInt;

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn alpha(a: i64, b: i64) -> CfAlgorithm {
    CfAlgorithm::alpha(rat(a, b)).unwrap()
}

#[test]
fn single_steps() {
    assert_eq!(step(&alpha(1, 2), &rat(2, 5)).unwrap(), (rat(1, 2), Digit::new(3, Epsilon::Minus)));
    let (a0, d0) = step(&CfAlgorithm::bcf(), &rat(2, 5)).unwrap();
    let (g, dg) = step(&CfAlgorithm::Rcf, &rat(2, 5)).unwrap();
    assert_eq!((a0.clone(), d0.a_u64()), (rat(1, 2), 3));
    assert_eq!((g.clone(), dg.a_u64()), (rat(1, 2), 2));
    assert_eq!(a0 + g, Rational::one());
    assert_eq!(step(&CfAlgorithm::Ocf, &rat(5, 8)).unwrap(), (rat(3, 5), Digit::new(1, Epsilon::Plus)));
    assert_eq!(step(&CfAlgorithm::Ecf, &rat(2, 5)).unwrap(), (rat(1, 2), Digit::new(2, Epsilon::Plus)));
    assert_eq!(step(&CfAlgorithm::Oocf, &rat(5, 8)).unwrap().0, rat(1, 2));
}

#[test]
fn expansions() {
    let r = expand(&CfAlgorithm::Rcf, &rat(4, 11), 10).unwrap();
    assert_eq!(r.digits.iter().map(Digit::a_u64).collect::<Vec<_>>(), [2, 1, 3]);
    assert!(r.terminated);

    let o = expand(&CfAlgorithm::Ocf, &rat(4, 11), 10).unwrap();
    assert_eq!(o.digits, [Digit::new(3, Epsilon::Minus), Digit::new(3, Epsilon::Plus), Digit::new(1, Epsilon::Terminal)]);
    // 1/(3 - 1/(3 + 1/1))
    let one = Rational::one();
    let inner = (rat(3, 1) + one.clone()).recip().unwrap();
    assert_eq!((rat(3, 1) - inner).recip().unwrap(), rat(4, 11));

    let e = expand(&CfAlgorithm::Ecf, &rat(2, 5), 10).unwrap();
    assert_eq!(e.digits, [Digit::new(2, Epsilon::Plus), Digit::new(2, Epsilon::Terminal)]);
}

#[test]
fn terminal_inputs_are_rejected() {
    assert!(matches!(expand(&CfAlgorithm::Rcf, &rat(0, 1), 10), Err(Error::Terminal(_))));
    assert!(matches!(expand(&CfAlgorithm::Ocf, &rat(1, 1), 10), Err(Error::Terminal(_))));
}

#[test]
fn convergent_tables() {
    let r = convergents(&expand(&CfAlgorithm::Rcf, &rat(4, 11), 10).unwrap());
    assert_eq!(r.q, big(&[1, 2, 3, 11]));
    assert_eq!(r.p, big(&[0, 1, 1, 4]));
    assert_eq!(&r.p[2] * &r.q[3] - &r.p[3] * &r.q[2], BigInt::from(-1));
    assert_eq!(r.det(3), BigInt::from(-1));

    let o = convergents(&expand(&CfAlgorithm::Ocf, &rat(4, 11), 10).unwrap());
    assert_eq!(o.q, big(&[1, 3, 8, 11]));
    assert_eq!(o.p, big(&[0, 1, 3, 4]));
    assert_eq!(o.beta[1], rat(1, 11));

    assert_eq!(o.beta_minus1(), Rational::one());
    assert_eq!(o.q[0], BigInt::from(1));
}

#[test]
fn jump_transformation() {
    assert_eq!(jump_bcf(&rat(2, 5), 100).unwrap(), (0, rat(1, 2)));
    assert_eq!(jump_bcf(&rat(7, 11), 100).unwrap(), (1, rat(2, 3)));
    // 1 - G^2(4/11) = 2/3 = F_j(7/11).
    let gauss = |y: &Rational| step(&CfAlgorithm::Rcf, y).unwrap().0;
    let lhs = Rational::one() - gauss(&gauss(&rat(4, 11)));
    assert_eq!(lhs, rat(2, 3));
    assert_eq!(jump_bcf(&(Rational::one() - rat(4, 11)), 100).unwrap().1, lhs);
}

#[test]
fn iota_values() {
    assert_eq!(iota(&rat(0, 1)).unwrap(), Rational::one());
    assert_eq!(iota(&rat(1, 3)).unwrap(), rat(1, 2));
    assert_eq!(iota(&iota(&rat(17, 93)).unwrap()).unwrap(), rat(17, 93));
}

#[test]
fn parity_classes() {
    let c = |p: i64, q: i64| classify_parity(&BigInt::from(p), &BigInt::from(q)).unwrap();
    assert_eq!(c(4, 11), ParityClass::InfRational);
    assert_eq!(c(3, 5), ParityClass::OneRational);
    assert_eq!(c(1, 2), ParityClass::InfRational);
}

#[test]
fn intermediate_fractions() {
    let r = convergents(&expand(&CfAlgorithm::Rcf, &rat(4, 11), 10).unwrap());
    let mids = intermediate_convergents(&r, 3).unwrap();
    let qs: Vec<BigInt> = mids.iter().map(|m| m.1.clone()).collect();
    assert_eq!(qs, big(&[2, 5, 8, 11]));
    assert_eq!(mids.last().unwrap(), &(r.p[3].clone(), r.q[3].clone()));
    assert_eq!(mids[0], (r.p[1].clone(), r.q[1].clone()));
}

#[test]
fn odd_convergents_against_rcf() {
    let t = align_with_rcf(&CfAlgorithm::Ocf, &rat(4, 11), 10).unwrap();
    let q: Vec<BigInt> = t.rows.iter().map(|r| r.q.clone()).collect();
    assert_eq!(q, big(&[1, 3, 8, 11]));
    // 3 = Q_1 + Q_0 is the mediant of 1/2 and 0/1.
    assert!(t.rows[1].label.mediant.is_some());
    assert!(t.rows[3].label.is_principal());
    assert!(t.rows.iter().all(|r| r.label.is_matched()));

    // All RCF digits odd: the two algorithms coincide.
    // [0; 3, 5, 3] = 16/51.
    let x = rat(16, 51);
    assert_eq!(expand(&CfAlgorithm::Rcf, &x, 10).unwrap().digits.iter().map(Digit::a_u64).collect::<Vec<_>>(), [3, 5, 3]);
    let t = align_with_rcf(&CfAlgorithm::Ocf, &x, 10).unwrap();
    assert!(t.rows.iter().all(|r| r.label.is_principal()));
}

#[test]
fn even_convergents_are_inf_rationals() {
    for x in [rat(4, 11), rat(355, 1113), rat(1_000_003, 2_718_281)] {
        let e = convergents(&expand(&CfAlgorithm::Ecf, &x, 1000).unwrap());
        for n in 1..e.len() {
            assert_eq!(classify_parity(&e.p[n], &e.q[n]).unwrap(), ParityClass::InfRational, "{x} n={n}");
        }
    }
}
