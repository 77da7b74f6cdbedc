//! Truncated Brjuno-type series `sum_n beta_{n-1}^nu * (-log x_n)` and the
//! related log-denominator sums.
//!
//! Orbits are exact; only `ln beta` and the logs of the orbit points are
//! carried in floating point.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::cf::{raw_step, reduce_to_domain, CfAlgorithm, Epsilon, Point};
use crate::error::{Error, Result};
use crate::golden;
use crate::rational::{ln_bigint, ln_biguint, Rational};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesParams {
    pub nu: f64,
    pub max_terms: usize,
    pub term_tol: f64,
    pub tail_tol: f64,
}

impl Default for SeriesParams {
    fn default() -> Self {
        SeriesParams { nu: 1.0, max_terms: 64, term_tol: 1e-12, tail_tol: 1e-12 }
    }
}

impl SeriesParams {
    pub fn new(nu: f64) -> Self {
        SeriesParams { nu, ..Default::default() }
    }

    /// Exactly `n` terms (fewer only if the orbit ends).
    pub fn fixed(nu: f64, n: usize) -> Self {
        SeriesParams { nu, max_terms: n, term_tol: 0.0, tail_tol: 0.0 }
    }

    pub fn with_max_terms(mut self, n: usize) -> Self {
        self.max_terms = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidNu(self.nu));
        }
        if self.term_tol < 0.0 || self.tail_tol < 0.0 || self.term_tol.is_nan() || self.tail_tol.is_nan() {
            return Err(Error::Domain("series tolerances must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    pub residual_estimate: f64,
    pub orbit_terminated: bool,
    pub residual_rigorous: bool,
}

/// Steps through an orbit, tracking `ln beta_{n-1}` and `-log x_n`
/// (`-log iota(x_n)` for OOCF).
struct Walker<'a> {
    alg: &'a CfAlgorithm,
    point: Point,
    ln_beta: f64,
}

impl<'a> Walker<'a> {
    fn new(alg: &'a CfAlgorithm, point: Point) -> Self {
        let ln_beta = match alg {
            CfAlgorithm::Oocf => ln_biguint(&(&point.n + &point.d)) - ln_biguint(&point.d),
            _ => 0.0,
        };
        Walker { alg, point, ln_beta }
    }

    fn with_ln_beta(alg: &'a CfAlgorithm, point: Point, ln_beta: f64) -> Self {
        Walker { alg, point, ln_beta }
    }

    /// No further terms: a terminal point, or an absorbing one whose terms vanish.
    fn at_end(&self) -> bool {
        self.alg.is_terminal_point(&self.point) || self.alg.is_absorbing_point(&self.point)
    }

    fn neg_log(&self) -> f64 {
        match self.alg {
            CfAlgorithm::Oocf => -self.point.ln_iota(),
            _ => -self.point.ln(),
        }
    }

    fn advance(&mut self) -> f64 {
        let nl = self.neg_log();
        self.ln_beta -= nl;
        self.point = raw_step(self.alg, &self.point).0;
        nl
    }
}

/// Tail factor `G` with `sum_{n >= N} beta_{n-1}^nu <= G beta_{N-1}^nu`, when
/// the map is uniformly expanding.
fn tail_factor(alg: &CfAlgorithm, nu: f64) -> Option<f64> {
    match alg {
        // x_n x_{n+1} < 1/2.
        CfAlgorithm::Rcf => Some(2.0 / (1.0 - 0.5f64.powf(nu))),
        // beta_{n+1} <= g beta_n after the first step.
        CfAlgorithm::Ocf => Some(1.0 + 1.0 / (1.0 - golden::g_hi().to_f64().powf(nu))),
        CfAlgorithm::Alpha(a) if !a.is_zero() => {
            let ub = alg.upper().to_f64();
            (ub < 1.0).then(|| 1.0 / (1.0 - ub.powf(nu)))
        }
        _ => None,
    }
}

fn residual(alg: &CfAlgorithm, nu: f64, w: &Walker, last_term: f64) -> (f64, bool) {
    if w.at_end() {
        return (0.0, tail_factor(alg, nu).is_some());
    }
    match tail_factor(alg, nu) {
        // -log x_n <= ln den(x_n), and denominators do not increase along the orbit.
        Some(g) => ((nu * w.ln_beta).exp() * ln_biguint(&w.point.d) * g, true),
        None => (10.0 * last_term, false),
    }
}

/// Sums from an orbit point already in the fundamental domain, calling
/// `visit(x_n, term_n)` for each term. A terminal start yields an empty sum.
fn sum_from(
    alg: &CfAlgorithm,
    mut w: Walker,
    params: &SeriesParams,
    mut visit: impl FnMut(&Point, f64),
) -> SeriesResult {
    let nu = params.nu;
    let (mut value, mut terms, mut last) = (0.0, 0usize, 0.0);
    while !w.at_end() && terms < params.max_terms {
        let weight = (nu * w.ln_beta).exp();
        let term = weight * w.neg_log();
        visit(&w.point, term);
        value += term;
        terms += 1;
        last = term;
        w.advance();
        if term < params.term_tol && weight < params.tail_tol {
            break;
        }
    }
    let (residual_estimate, residual_rigorous) = residual(alg, nu, &w, last);
    SeriesResult { value, terms_used: terms, residual_estimate, orbit_terminated: w.at_end(), residual_rigorous }
}

fn start_point(alg: &CfAlgorithm, x: &Rational) -> Result<Point> {
    let (x0, _, _) = reduce_to_domain(alg, x);
    let p = Point::from_rational(&x0);
    if alg.is_terminal_point(&p) {
        return Err(Error::RationalTermination);
    }
    Ok(p)
}

/// Truncated Brjuno function of `alg` at `x`, after reduction to the
/// fundamental domain (periodicity, and evenness for the alpha family).
pub fn brjuno(alg: &CfAlgorithm, x: &Rational, params: &SeriesParams) -> Result<SeriesResult> {
    params.validate()?;
    let p = start_point(alg, x)?;
    Ok(sum_from(alg, Walker::new(alg, p), params, |_, _| {}))
}

/// Like [`brjuno`] for several exponents at once, sharing one orbit. Each
/// exponent stops under its own truncation rule.
pub fn brjuno_multi(alg: &CfAlgorithm, x: &Rational, nus: &[f64], params: &SeriesParams) -> Result<Vec<SeriesResult>> {
    for &nu in nus {
        SeriesParams { nu, ..params.clone() }.validate()?;
    }
    let mut w = Walker::new(alg, start_point(alg, x)?);
    let k = nus.len();
    let mut value = vec![0.0; k];
    let mut last = vec![0.0; k];
    let mut active = vec![true; k];
    let mut stopped: Vec<Option<(f64, Point)>> = vec![None; k];
    let mut terms = vec![0usize; k];
    let mut n = 0;
    while !w.at_end() && n < params.max_terms && active.iter().any(|&a| a) {
        let nl = w.neg_log();
        let mut done_now = Vec::new();
        for i in 0..k {
            if !active[i] {
                continue;
            }
            let weight = (nus[i] * w.ln_beta).exp();
            let term = weight * nl;
            value[i] += term;
            last[i] = term;
            terms[i] += 1;
            if term < params.term_tol && weight < params.tail_tol {
                done_now.push(i);
            }
        }
        w.advance();
        n += 1;
        for i in done_now {
            active[i] = false;
            stopped[i] = Some((w.ln_beta, w.point.clone()));
        }
    }
    Ok((0..k)
        .map(|i| {
            let view = match &stopped[i] {
                Some((lb, p)) => Walker::with_ln_beta(alg, p.clone(), *lb),
                None => Walker::with_ln_beta(alg, w.point.clone(), w.ln_beta),
            };
            let (residual_estimate, residual_rigorous) = residual(alg, nus[i], &view, last[i]);
            SeriesResult {
                value: value[i],
                terms_used: terms[i],
                residual_estimate,
                orbit_terminated: view.at_end(),
                residual_rigorous,
            }
        })
        .collect())
}

/// Truncated sum of the log-denominator series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogqSum {
    pub value: f64,
    pub terms: usize,
    /// The orbit ended (terminal or absorbed) before the sum was cut off.
    pub complete: bool,
}

/// Walks the convergent denominators `q_n` of `alg` at `x`; `visit(x_n, q_n,
/// q_{n+1}, p_n)` is called while it returns `true`.
fn walk_denominators(
    alg: &CfAlgorithm,
    x: &Rational,
    mut visit: impl FnMut(&Point, &BigInt, &BigInt, &BigInt) -> bool,
) -> Result<bool> {
    let mut pt = start_point(alg, x)?;
    let (pm1, qm1, p0, q0) = match alg {
        CfAlgorithm::Oocf => (-1, 1, 1, 1),
        _ => (1, 0, 0, 1),
    };
    let (mut pp, mut qp) = (BigInt::from(pm1), BigInt::from(qm1));
    let (mut pc, mut qc) = (BigInt::from(p0), BigInt::from(q0));
    let mut prev_eps = 1;
    loop {
        if alg.is_terminal_point(&pt) || alg.is_absorbing_point(&pt) {
            return Ok(true);
        }
        let (next, digit) = raw_step(alg, &pt);
        let c = digit.coefficient(alg);
        let pn = &c * &pc + prev_eps * &pp;
        let qn = &c * &qc + prev_eps * &qp;
        if !visit(&pt, &qc, &qn, &pc) {
            return Ok(false);
        }
        prev_eps = digit.epsilon.as_i32();
        pp = std::mem::replace(&mut pc, pn);
        qp = std::mem::replace(&mut qc, qn);
        if digit.epsilon == Epsilon::Terminal {
            return Ok(true);
        }
        pt = next;
    }
}

/// `sum_{n=0}^{N-1} log q_{n+1} / q_n^nu` with exact denominators.
pub fn logq_sum(alg: &CfAlgorithm, x: &Rational, nu: f64, n_terms: usize) -> Result<LogqSum> {
    SeriesParams::new(nu).validate()?;
    let mut value = 0.0;
    let mut terms = 0;
    if n_terms == 0 {
        return Ok(LogqSum { value, terms, complete: false });
    }
    let ended = walk_denominators(alg, x, |_, q, q_next, _| {
        value += ln_bigint(q_next) * (-nu * ln_bigint(q)).exp();
        terms += 1;
        terms < n_terms
    })?;
    Ok(LogqSum { value, terms, complete: ended })
}

/// Log-denominator series under the truncation rule of [`SeriesParams`].
pub fn logq_series(alg: &CfAlgorithm, x: &Rational, params: &SeriesParams) -> Result<LogqSum> {
    params.validate()?;
    let nu = params.nu;
    let mut value = 0.0;
    let mut terms = 0;
    let ended = walk_denominators(alg, x, |_, q, q_next, _| {
        let weight = (-nu * ln_bigint(q)).exp();
        let term = ln_bigint(q_next) * weight;
        value += term;
        terms += 1;
        terms < params.max_terms && !(term < params.term_tol && weight < params.tail_tol)
    })?;
    Ok(LogqSum { value, terms, complete: ended })
}

/// The RCF log-denominator series split by the parity class of `P_n/Q_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParitySplit {
    /// Terms with `P_n/Q_n` an infinity-rational (`P_n`, `Q_n` of different parity).
    pub inf_rational: f64,
    /// Terms with `P_n`, `Q_n` both odd.
    pub one_rational: f64,
    pub total: f64,
    pub terms: usize,
    pub complete: bool,
}

pub fn rcf_parity_split(x: &Rational, params: &SeriesParams) -> Result<ParitySplit> {
    params.validate()?;
    let nu = params.nu;
    let mut s = ParitySplit { inf_rational: 0.0, one_rational: 0.0, total: 0.0, terms: 0, complete: false };
    s.complete = walk_denominators(&CfAlgorithm::Rcf, x, |_, q, q_next, p| {
        let weight = (-nu * ln_bigint(q)).exp();
        let term = ln_bigint(q_next) * weight;
        if p.is_odd() && q.is_odd() {
            s.one_rational += term;
        } else {
            s.inf_rational += term;
        }
        s.total += term;
        s.terms += 1;
        s.terms < params.max_terms && !(term < params.term_tol && weight < params.tail_tol)
    })?;
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Residual of `B(x) = term_0(x) + rho(x) B(A x)` with `N` terms on the left
/// and `n_ax` on the right (`rho = x^nu`, or `(1 - x)^nu / (x_1 + 1)^nu` for
/// OOCF).
pub fn functional_check(alg: &CfAlgorithm, x: &Rational, nu: f64, n_x: usize, n_ax: usize) -> Result<FunctionalCheck> {
    let p = start_point(alg, x)?;
    let lhs = sum_from(alg, Walker::new(alg, p.clone()), &SeriesParams::fixed(nu, n_x), |_, _| {}).value;
    let w = Walker::new(alg, p.clone());
    let term0 = (nu * w.ln_beta).exp() * w.neg_log();
    let mut w1 = Walker::new(alg, p);
    w1.advance();
    let beta0 = w1.ln_beta;
    let image = Walker::new(alg, w1.point.clone());
    let rho = (nu * (beta0 - image.ln_beta)).exp();
    let rest = if n_x == 0 { 0.0 } else { sum_from(alg, image, &SeriesParams::fixed(nu, n_ax), |_, _| {}).value };
    let rhs = if n_x == 0 { 0.0 } else { term0 + rho * rest };
    Ok(FunctionalCheck { lhs, rhs, residual: (lhs - rhs).abs() })
}

/// `|B(x; N) - (term_0 + rho B(A x; N - 1))|` with `N = params.max_terms`.
pub fn functional_residual(alg: &CfAlgorithm, x: &Rational, params: &SeriesParams) -> Result<f64> {
    params.validate()?;
    let n = params.max_terms;
    Ok(functional_check(alg, x, params.nu, n, n.saturating_sub(1))?.residual)
}

/// Even and odd parts of the OCF Brjuno function at `x` in `(0, 1/2)`, with
/// the residuals of their functional equations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParityParts {
    pub even: f64,
    pub odd: f64,
    pub residual_even: f64,
    pub residual_odd: f64,
    /// Terms used for `B_o(x)`; `B_o(1 - x)` uses one more.
    pub terms: usize,
}

pub fn parity_parts(x: &Rational, params: &SeriesParams) -> Result<ParityParts> {
    params.validate()?;
    let half = Rational::new(1, 2)?;
    if x.is_negative() || x.is_zero() || *x >= half {
        return Err(Error::Domain(format!("parity parts need x in (0, 1/2), got {x}")));
    }
    let ocf = CfAlgorithm::Ocf;
    let nu = params.nu;
    let n = params.max_terms.max(1);
    let one = Rational::one();
    let sum = |y: &Rational, k: usize| -> f64 {
        let p = Point::from_rational(y);
        sum_from(&ocf, Walker::new(&ocf, p), &SeriesParams::fixed(nu, k), |_, _| {}).value
    };
    let bx = sum(x, n);
    let bmx = sum(&(&one - x), n + 1);
    let even = (bx + bmx) / 2.0;
    let odd = (bx - bmx) / 2.0;

    // f = A_o(x) = {eps_1/x}, and {-eps_1/x} = 1 - f.
    let f = crate::cf::step(&ocf, x)?.0;
    let bf = sum(&f, n - 1);
    let bmf = sum(&(&one - &f), n - 1);
    let xnu = x.powf(nu);
    let c = (1.0 - (&one - x).powf(nu)) / 2.0;
    let l = (&(&one - x) / x).ln();
    let plus = -x.ln() - c * l + xnu * (bf + bmf) / 2.0;
    let minus = c * l + xnu * (bf - bmf) / 2.0;
    Ok(ParityParts { even, odd, residual_even: (even - plus).abs(), residual_odd: (odd - minus).abs(), terms: n })
}

/// `((f(x) + f(1 - x))/2, (f(x) - f(1 - x))/2)`.
pub fn parity_split<F: Fn(&Rational) -> f64>(f: F, x: &Rational) -> (f64, f64) {
    let a = f(x);
    let b = f(&(Rational::one() - x));
    ((a + b) / 2.0, (a - b) / 2.0)
}

/// Brjuno sum split by the position of `x_n`: the star class is
/// `x_n in (1/3, 1]` for ECF and `x_n in [0, 1/2)` for OOCF.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassSums {
    pub star: f64,
    pub star_star: f64,
    pub total: SeriesResult,
}

fn star_class(alg: &CfAlgorithm) -> Result<fn(&Point) -> bool> {
    match alg {
        CfAlgorithm::Ecf => Ok(|p| &p.n * 3u32 > p.d),
        CfAlgorithm::Oocf => Ok(|p| &p.n * 2u32 < p.d),
        _ => Err(Error::Domain(format!("digit classes are defined for ecf and oocf, not {alg}"))),
    }
}

pub fn digit_class_sums(alg: &CfAlgorithm, x: &Rational, params: &SeriesParams) -> Result<ClassSums> {
    params.validate()?;
    let is_star = star_class(alg)?;
    let p = start_point(alg, x)?;
    let (mut star, mut star_star) = (0.0, 0.0);
    let total = sum_from(alg, Walker::new(alg, p), params, |pt, t| {
        if is_star(pt) {
            star += t;
        } else {
            star_star += t;
        }
    });
    Ok(ClassSums { star, star_star, total })
}

/// The log-denominator series split like [`digit_class_sums`]: the term
/// `log q_{n+1} / q_n^nu` goes with the class of `x_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogqClassSums {
    pub star: f64,
    pub star_star: f64,
    pub total: LogqSum,
}

pub fn logq_class_sums(alg: &CfAlgorithm, x: &Rational, params: &SeriesParams) -> Result<LogqClassSums> {
    params.validate()?;
    let is_star = star_class(alg)?;
    let nu = params.nu;
    let (mut star, mut star_star) = (0.0, 0.0);
    let mut terms = 0;
    let ended = walk_denominators(alg, x, |pt, q, q_next, _| {
        let weight = (-nu * ln_bigint(q)).exp();
        let term = ln_bigint(q_next) * weight;
        if is_star(pt) {
            star += term;
        } else {
            star_star += term;
        }
        terms += 1;
        terms < params.max_terms && !(term < params.term_tol && weight < params.tail_tol)
    })?;
    let total = LogqSum { value: star + star_star, terms, complete: ended };
    Ok(LogqClassSums { star, star_star, total })
}
