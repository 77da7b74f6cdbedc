//! Transfer operators `T f(x) = x^nu f(A x)` of the alpha family and of the
//! odd map, evaluated through exact orbits of the evaluation point.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::{raw_step, CfAlgorithm, Point};
use crate::error::{Error, Result};
use crate::golden;
use crate::rational::{ln_ratio, Rational};
use crate::sampling::{random_bits, stream};

/// Test function on `[0, 1]`, piecewise linear between its nodes.
#[derive(Clone, Debug, Serialize)]
pub struct GridFunction {
    pub grid: Vec<Rational>,
    pub values: Vec<f64>,
    /// Largest deviation from the generating function seen inside a cell
    /// (0 when built from raw values).
    pub interpolation_error: f64,
    /// Below this point the generating function was replaced by a constant.
    pub clip_below: Option<f64>,
    #[serde(skip)]
    nodes: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Vec<Rational>, values: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::Domain(format!(
                "a grid function needs at least two nodes and one value per node, got {} and {}",
                grid.len(),
                values.len()
            )));
        }
        if grid[0].is_negative() || grid[grid.len() - 1] > 1 {
            return Err(Error::Domain("grid nodes must lie in [0, 1]".into()));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("grid nodes must be strictly increasing".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("grid values must be finite, got {v}")));
        }
        let nodes = grid.iter().map(Rational::to_f64).collect();
        Ok(GridFunction { grid, values, interpolation_error: 0.0, clip_below: None, nodes })
    }

    pub fn constant(c: f64) -> Result<Self> {
        GridFunction::new(vec![Rational::zero(), Rational::one()], vec![c, c])
    }

    /// `f` sampled at `i / cells`, with the interpolation error measured
    /// at interior points of every cell.
    pub fn uniform(cells: u32, f: impl Fn(f64) -> f64) -> Result<Self> {
        let cells = cells.max(1);
        let grid: Vec<Rational> = (0..=cells).map(|i| Rational::new(i, cells).expect("nonzero")).collect();
        let values = grid.iter().map(|x| f(x.to_f64())).collect();
        let mut g = GridFunction::new(grid, values)?;
        g.interpolation_error = g.measure_error(&f, 0);
        Ok(g)
    }

    /// `-log x` on nodes `2^(-j/k)`, `k` per octave, clipped to the constant
    /// `40 log 2` below `2^-40`.
    pub fn neg_log(nodes_per_octave: u32) -> Result<Self> {
        let k = nodes_per_octave.max(1);
        let mut xs = vec![0.0];
        xs.extend((0..=40 * k).rev().map(|j| (-(j as f64) / k as f64).exp2()));
        // The last node must be exactly 1.
        *xs.last_mut().expect("nonempty") = 1.0;
        let grid = xs.iter().map(|&x| Rational::from_f64(x)).collect::<Result<Vec<_>>>()?;
        let clip = 2f64.powi(-40);
        let values = xs.iter().map(|&x| -x.max(clip).ln()).collect();
        let mut g = GridFunction::new(grid, values)?;
        g.interpolation_error = g.measure_error(&|x: f64| -x.ln(), 1);
        g.clip_below = Some(clip);
        Ok(g)
    }

    fn measure_error(&self, f: &impl Fn(f64) -> f64, skip_cells: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for i in skip_cells..self.nodes.len() - 1 {
            let (a, b) = (self.nodes[i], self.nodes[i + 1]);
            for t in [0.25, 0.5, 0.75] {
                let x = a + t * (b - a);
                worst = worst.max((f(x) - self.eval(x)).abs());
            }
        }
        worst
    }

    /// Piecewise-linear value; constant beyond the end nodes.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.nodes.len();
        if x <= self.nodes[0] {
            return self.values[0];
        }
        if x >= self.nodes[n - 1] {
            return self.values[n - 1];
        }
        let i = self.nodes.partition_point(|&t| t <= x) - 1;
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        let t = (x - a) / (b - a);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    pub fn eval_rational(&self, x: &Rational) -> f64 {
        self.eval(x.to_f64())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Measure {
    Lebesgue,
    /// Invariant probability measure of the odd map.
    Mo,
    /// `dx / (1 - x^2)`, of infinite mass; integrable on `[0, 1 - delta]`.
    Me { delta: Option<Rational> },
}

impl Measure {
    pub fn density(&self, x: f64) -> f64 {
        match self {
            Measure::Lebesgue => 1.0,
            Measure::Mo => {
                let gi = 1.0 / golden::G;
                (1.0 / (gi - 1.0 + x) + 1.0 / (gi + 1.0 - x)) / (3.0 * gi.ln())
            }
            Measure::Me { .. } => 1.0 / (1.0 - x * x),
        }
    }

    /// Right end of the integration domain.
    fn upper(&self) -> Result<Rational> {
        match self {
            Measure::Me { delta } => match delta {
                Some(d) if !d.is_negative() && !d.is_zero() && *d < 1 => Ok(Rational::one() - d),
                _ => Err(Error::DivergentIntegral(
                    "dx/(1-x^2) has infinite mass near 1; give a cutoff delta in (0, 1)".into(),
                )),
            },
            _ => Ok(Rational::one()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpNorm {
    pub value: f64,
    /// Change of the norm between the two finest levels.
    pub error_indicator: f64,
    /// The integral runs over `[0, upper]`.
    pub upper: Rational,
    pub cells: usize,
}

const NODE_SEED: u64 = 0x6f70_6572_6174_6f72;
/// Nodes carry this many extra binary digits below the cell midpoint.
const NODE_SHIFT: u32 = 192;
const NODE_JITTER_BITS: u32 = 96;

/// Midpoint of cell `i` of `2^k` on `[0, upper]`, moved by at most a
/// `2^-96` fraction of the cell so orbits from it stay deep.
fn node(i: u64, k: u32, upper: &Rational) -> Rational {
    let mut rng = stream(NODE_SEED, ((k as u64) << 40) | i);
    let jitter = BigInt::from(random_bits(&mut rng, NODE_JITTER_BITS - 1)) - (BigInt::one() << (NODE_JITTER_BITS - 2));
    let num = (BigInt::from(2 * i + 1) << NODE_SHIFT) + jitter;
    let den = BigInt::one() << (k + NODE_SHIFT + 1);
    Rational::new(num, den).expect("nonzero") * upper
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Composite midpoint rule for `h` on `2^k` cells of `[0, upper]`.
fn midpoint<F>(h: &F, upper: &Rational, k: u32) -> Result<f64>
where
    F: Fn(&Rational) -> Result<f64> + Sync,
{
    let cells = 1u64 << k;
    let vals: Vec<f64> = (0..cells).into_par_iter().map(|i| h(&node(i, k, upper))).collect::<Result<_>>()?;
    Ok(pairwise_sum(&vals) * upper.to_f64() / cells as f64)
}

/// `(int |h|^p dmu)^(1/p)` over `[0, upper]`. Levels `k - 1` and `k` are
/// Richardson-extrapolated once they agree to 10%; an integrand that is not
/// resolved yet (the weights of deep iterates are spiky) keeps the fine value.
fn lp_integral<F>(h: &F, p: f64, mu: &Measure, upper: &Rational, k: u32) -> Result<LpNorm>
where
    F: Fn(&Rational) -> Result<f64> + Sync,
{
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("L^p norms need finite p >= 1, got {p}")));
    }
    let k = k.max(1);
    let weighted = |x: &Rational| -> Result<f64> { Ok(h(x)?.abs().powf(p) * mu.density(x.to_f64())) };
    let fine = midpoint(&weighted, upper, k)?;
    let coarse = midpoint(&weighted, upper, k - 1)?;
    let resolved = (fine - coarse).abs() <= 0.1 * fine.abs();
    let integral = if resolved { ((4.0 * fine - coarse) / 3.0).max(0.0) } else { fine };
    Ok(LpNorm {
        value: integral.powf(1.0 / p),
        error_indicator: (fine.powf(1.0 / p) - coarse.powf(1.0 / p)).abs(),
        upper: upper.clone(),
        cells: 1 << k,
    })
}

/// `L^p(mu)` norm of `f` on `2^grid_refinement` midpoint cells.
pub fn lp_norm(f: &GridFunction, p: f64, mu: &Measure, grid_refinement: u32) -> Result<LpNorm> {
    let upper = mu.upper()?;
    lp_integral(&|x: &Rational| Ok(f.eval_rational(x)), p, mu, &upper, grid_refinement)
}

fn check_operator(alg: &CfAlgorithm, nu: f64) -> Result<()> {
    if !matches!(alg, CfAlgorithm::Rcf | CfAlgorithm::Alpha(_) | CfAlgorithm::Ocf) {
        return Err(Error::Domain(format!("transfer operators are defined for the alpha family (incl. rcf) and OCF, not {alg}")));
    }
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::InvalidNu(nu));
    }
    Ok(())
}

fn check_point(alg: &CfAlgorithm, x: &Rational) -> Result<()> {
    if x.is_negative() || *x > alg.upper() {
        return Err(Error::Domain(format!("{x} is outside the domain of {alg}")));
    }
    Ok(())
}

/// Walks the orbit of `x` for `n` steps, handing `(m, beta_{m-1}^nu, A^m x)`
/// to `visit`; stops early (returning `false`) once the orbit hits 0, after
/// which every later weight vanishes for `nu > 0`. With `nu = 0` those
/// iterates are undefined and the short orbit is an error.
fn walk<V>(alg: &CfAlgorithm, nu: f64, x: &Rational, n: usize, mut visit: V) -> Result<bool>
where
    V: FnMut(usize, f64, &Point) -> Result<()>,
{
    check_operator(alg, nu)?;
    check_point(alg, x)?;
    let mut point = Point::from_rational(x);
    let (mut bn, mut bd) = (BigUint::one(), BigUint::one());
    visit(0, 1.0, &point)?;
    for m in 1..=n {
        if alg.is_terminal_point(&point) {
            if nu == 0.0 {
                return Err(Error::DepthExceeded { requested: n, reached: m - 1 });
            }
            return Ok(false);
        }
        bn *= &point.n;
        bd *= &point.d;
        point = raw_step(alg, &point).0;
        let weight = if nu == 0.0 { 1.0 } else { (nu * ln_ratio(&bn, &bd)).exp() };
        visit(m, weight, &point)?;
    }
    Ok(true)
}

/// `T^m f(x)` for `m = 0..=n`, from one exact orbit (zeros after the orbit
/// reaches 0).
pub fn iterates<F>(alg: &CfAlgorithm, nu: f64, f: F, x: &Rational, n: usize) -> Result<Vec<f64>>
where
    F: Fn(&Rational) -> Result<f64>,
{
    let mut out = vec![0.0; n + 1];
    walk(alg, nu, x, n, |m, w, p| {
        out[m] = w * f(&p.to_rational())?;
        Ok(())
    })?;
    Ok(out)
}

/// `T^n g(x) = beta_{n-1}(x)^nu g(A^n x)` for an arbitrary `g`.
pub fn apply_t_iter_fn<F>(alg: &CfAlgorithm, nu: f64, f: F, x: &Rational, n: usize) -> Result<f64>
where
    F: Fn(&Rational) -> Result<f64>,
{
    let mut last = None;
    walk(alg, nu, x, n, |m, w, p| {
        if m == n {
            last = Some((w, p.to_rational()));
        }
        Ok(())
    })?;
    match last {
        Some((w, y)) => Ok(w * f(&y)?),
        None => Ok(0.0),
    }
}

/// `T^n f(x)` with `f` interpolated on its grid.
pub fn apply_t_iter(alg: &CfAlgorithm, nu: f64, f: &GridFunction, x: &Rational, n: usize) -> Result<f64> {
    apply_t_iter_fn(alg, nu, |y| Ok(f.eval_rational(y)), x, n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralEstimate {
    /// `(|T^n f| / |f|)^(1/n)`.
    pub value: f64,
    pub norm_f: LpNorm,
    pub norm_iterate: LpNorm,
    pub n: usize,
}

pub const SPECTRAL_REFINEMENT: u32 = 12;

/// Reference measure of the operator: `m_o` for the odd map, normalised
/// Lebesgue measure on the domain otherwise.
fn reference_measure(alg: &CfAlgorithm) -> (Measure, Rational) {
    match alg {
        CfAlgorithm::Ocf => (Measure::Mo, Rational::one()),
        _ => (Measure::Lebesgue, alg.upper()),
    }
}

/// Empirical spectral radius `(|T^n f|_p / |f|_p)^(1/n)`.
pub fn spectral_estimate(alg: &CfAlgorithm, nu: f64, f: &GridFunction, n: usize, p: f64) -> Result<SpectralEstimate> {
    spectral_estimate_with(alg, nu, f, n, p, SPECTRAL_REFINEMENT)
}

pub fn spectral_estimate_with(
    alg: &CfAlgorithm,
    nu: f64,
    f: &GridFunction,
    n: usize,
    p: f64,
    refinement: u32,
) -> Result<SpectralEstimate> {
    check_operator(alg, nu)?;
    if n == 0 {
        return Err(Error::Domain("spectral estimate needs n >= 1".into()));
    }
    let (mu, upper) = reference_measure(alg);
    let scale = upper.to_f64().powf(-1.0 / p);
    let mut norm_f = lp_integral(&|x: &Rational| Ok(f.eval_rational(x)), p, &mu, &upper, refinement)?;
    let mut norm_iterate = lp_integral(&|x: &Rational| apply_t_iter(alg, nu, f, x, n), p, &mu, &upper, refinement)?;
    for l in [&mut norm_f, &mut norm_iterate] {
        l.value *= scale;
        l.error_indicator *= scale;
    }
    if norm_f.value == 0.0 {
        return Err(Error::Domain("spectral estimate of the zero function".into()));
    }
    let value = (norm_iterate.value / norm_f.value).powf(1.0 / n as f64);
    Ok(SpectralEstimate { value, norm_f, norm_iterate, n })
}

/// Geometric bound `b` with `beta_{m-1}(x) <= b^m`-type decay, if the map
/// contracts uniformly.
fn contraction(alg: &CfAlgorithm) -> Option<f64> {
    match alg {
        CfAlgorithm::Ocf => Some(golden::g_hi().to_f64()),
        CfAlgorithm::Alpha(a) if !a.is_zero() => Some(alg.upper().to_f64()).filter(|u| *u < 1.0),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeumannSum {
    pub value: f64,
    pub terms: usize,
    /// Bound on `sum_{m > M} T^m f(x)` from the geometric decay of `beta`.
    pub tail_bound: Option<f64>,
    /// `interpolation_error * sum_m beta_{m-1}^nu`.
    pub interpolation_bound: f64,
    pub orbit_ended: bool,
}

/// `sum_{m=0}^{M} T^m f(x)`.
pub fn neumann_sum(alg: &CfAlgorithm, nu: f64, f: &GridFunction, x: &Rational, big_m: usize) -> Result<NeumannSum> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidNu(nu));
    }
    let terms = iterates(alg, nu, |y| Ok(f.eval_rational(y)), x, big_m)?;
    let weights = iterates(alg, nu, |_| Ok(1.0), x, big_m)?;
    let orbit_ended = weights.last().is_some_and(|w| *w == 0.0);
    let sup = f.sup_norm();
    let tail_bound = if orbit_ended {
        Some(0.0)
    } else {
        contraction(alg).map(|b| {
            let r = b.powf(nu);
            match alg {
                // beta_{m-1} <= g^{m-1} for m >= 2, and beta_0 <= 1.
                CfAlgorithm::Ocf if big_m == 0 => sup * (1.0 + r / (1.0 - r)),
                CfAlgorithm::Ocf => sup * r.powi(big_m as i32) / (1.0 - r),
                // Every orbit point is at most the upper end of the domain.
                _ => sup * r.powi(big_m as i32 + 1) / (1.0 - r),
            }
        })
    };
    Ok(NeumannSum {
        value: pairwise_sum(&terms),
        terms: big_m + 1,
        tail_bound,
        interpolation_bound: f.interpolation_error * weights.iter().sum::<f64>(),
        orbit_ended,
    })
}

/// Pair schedule for Hölder norms of iterates: at scale `2^-j`, base points
/// `N / 2^(j + extra_bits)` paired with `x + 2^-j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairSchedule {
    pub j_min: u32,
    pub j_max: u32,
    pub samples_per_scale: usize,
    pub seed: u64,
    pub extra_bits: u32,
}

impl Default for PairSchedule {
    fn default() -> Self {
        PairSchedule { j_min: 2, j_max: 24, samples_per_scale: 48, seed: 1, extra_bits: 48 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderNorm {
    pub m: usize,
    pub seminorm: f64,
    pub sup: f64,
    /// `seminorm + sup`.
    pub norm: f64,
}

/// `|T^m f|_eta = seminorm + sup` over the sampled pairs, for every
/// `m = 0..=m_max`; all iterates come from the same pairs.
pub fn holder_norm_sequence(
    alg: &CfAlgorithm,
    nu: f64,
    f: &GridFunction,
    m_max: usize,
    eta: f64,
    schedule: &PairSchedule,
) -> Result<Vec<HolderNorm>> {
    check_operator(alg, nu)?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("Hölder exponent must lie in (0, 1], got {eta}")));
    }
    if schedule.j_min > schedule.j_max || schedule.samples_per_scale == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let upper = alg.upper();
    let eval = |x: &Rational| iterates(alg, nu, |y| Ok(f.eval_rational(y)), x, m_max);
    let jobs: Vec<(u32, usize)> = (schedule.j_min..=schedule.j_max)
        .flat_map(|j| (0..schedule.samples_per_scale).map(move |i| (j, i)))
        .collect();
    // Per pair: (scale exponent, iterates at x, iterates at x').
    let pairs: Vec<Option<(u32, Vec<f64>, Vec<f64>)>> = jobs
        .par_iter()
        .map(|&(j, i)| {
            let bits = j + schedule.extra_bits;
            let den = BigInt::one() << bits;
            let offset = BigInt::one() << schedule.extra_bits;
            let mut rng = stream(schedule.seed, ((j as u64) << 32) | i as u64);
            for _ in 0..crate::sampling::MAX_RETRIES {
                let num = BigInt::from(random_bits(&mut rng, bits));
                let x = Rational::new(num.clone(), den.clone())?;
                let y = Rational::new(num + &offset, den.clone())?;
                if x.is_zero() || y > upper {
                    continue;
                }
                match (eval(&x), eval(&y)) {
                    (Ok(a), Ok(b)) => return Ok(Some((j, a, b))),
                    (Err(Error::DepthExceeded { .. }), _) | (_, Err(Error::DepthExceeded { .. })) => continue,
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<HolderNorm> = (0..=m_max).map(|m| HolderNorm { m, seminorm: 0.0, sup: 0.0, norm: 0.0 }).collect();
    for (j, a, b) in pairs.into_iter().flatten() {
        let h = (-(j as f64) * eta).exp2();
        for (m, s) in out.iter_mut().enumerate() {
            s.seminorm = s.seminorm.max((a[m] - b[m]).abs() / h);
            s.sup = s.sup.max(a[m].abs()).max(b[m].abs());
        }
    }
    for s in &mut out {
        s.norm = s.seminorm + s.sup;
    }
    Ok(out)
}

/// `|T^m f|_eta` on the default pair schedule.
pub fn holder_norm_iterate(alg: &CfAlgorithm, nu: f64, f: &GridFunction, m: usize, eta: f64) -> Result<f64> {
    let seq = holder_norm_sequence(alg, nu, f, m, eta, &PairSchedule::default())?;
    Ok(seq[m].norm)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthCheck {
    /// Every step is an increase.
    pub monotone_increasing: bool,
    /// Least-squares slope of `ln value` against the index.
    pub log_slope: f64,
}

impl GrowthCheck {
    pub fn of(values: &[f64]) -> Self {
        let monotone_increasing = values.len() > 1 && values.windows(2).all(|w| w[1] > w[0]);
        let n = values.len() as f64;
        let mt = (n - 1.0) / 2.0;
        let ys: Vec<f64> = values.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
        let my = ys.iter().sum::<f64>() / n;
        let (mut sty, mut stt) = (0.0, 0.0);
        for (i, y) in ys.iter().enumerate() {
            sty += (i as f64 - mt) * (y - my);
            stt += (i as f64 - mt).powi(2);
        }
        let log_slope = if stt > 0.0 { sty / stt } else { 0.0 };
        GrowthCheck { monotone_increasing, log_slope }
    }

    /// No monotone trend and at most `tol` growth per step.
    pub fn is_bounded(&self, tol: f64) -> bool {
        !self.monotone_increasing && self.log_slope <= tol
    }
}
