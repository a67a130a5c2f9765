//! Downhill-simplex search and the three constrained `C − E_N` experiments.
//!
//! * [`max_gap_fixed_r`]: largest `C − E_N` at a prescribed participation ratio.
//! * [`max_gap_fixed_c`]: largest `C − E_N` at a prescribed concurrence.
//! * [`orbit_maximize`]: largest concurrence or negativity over the unitary
//!   orbit of a fixed spectrum.
//!
//! States are searched through [`StateParam`], an unconstrained 16-real chart.
//! Equality constraints are handled with a quadratic penalty whose weight grows
//! over the schedule `10², 10³, 10⁴`; each stage is warm-started from the last
//! and carries a multiplier estimate (augmented Lagrangian) so the residual
//! keeps shrinking at the final weight. A last one-dimensional repair step
//! moves the best point exactly onto the constraint surface.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::Spectrum;
use crate::error::{Error, Result};
use crate::linalg::{self, expm_i_hermitian, partial_transpose, ComplexMatrix};
use crate::measures::{self, sigma_yy};
use crate::rng::{Seed, Stream};
use crate::states::DensityMatrix;

/// Largest accepted `|g(ρ) − target|` for a constrained result.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// Penalty weights, applied in order.
pub const PENALTY_SCHEDULE: [f64; 3] = [1e2, 1e3, 1e4];

/// Extra multiplier updates at the final penalty weight.
const EXTRA_MULTIPLIER_ROUNDS: usize = 6;

/// Polishing restarts of the simplex around the current best point.
const POLISH_ROUNDS: usize = 8;

/// Nelder–Mead configuration plus the multistart budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop when the largest vertex distance from the best vertex (∞-norm) drops below this.
    pub diameter_tol: f64,
    /// Stop when `f(worst) − f(best)` drops below this.
    pub spread_tol: f64,
    /// Offset added to each coordinate of `x0` to build the initial simplex.
    pub initial_step: f64,
    pub restarts: usize,
    pub seed: Seed,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            diameter_tol: 1e-9,
            spread_tol: 1e-12,
            initial_step: 0.5,
            restarts: 50,
            seed: Seed(0),
        }
    }
}

impl SimplexOptions {
    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: Seed) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("reflection", self.reflection),
            ("expansion", self.expansion),
            ("contraction", self.contraction),
            ("shrink", self.shrink),
            ("diameter_tol", self.diameter_tol),
            ("spread_tol", self.spread_tol),
            ("initial_step", self.initial_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidOptions(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.contraction >= 1.0 || self.shrink >= 1.0 {
            return Err(Error::InvalidOptions(
                "contraction and shrink must be below 1".into(),
            ));
        }
        if self.expansion <= self.reflection {
            return Err(Error::InvalidOptions(
                "expansion must exceed reflection".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidOptions(
                "max_iterations must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of a single simplex run.
#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `objective` with the downhill-simplex method from `x0`.
///
/// The initial simplex is `x0` plus `x0 + initial_step·e_i` for each coordinate.
/// Non-finite objective values inside the run are treated as `+∞`.
pub fn nelder_mead<F>(objective: F, x0: &[f64], opts: &SimplexOptions) -> Result<SimplexOutcome>
where
    F: Fn(&[f64]) -> f64,
{
    opts.validate()?;
    let n = x0.len();
    if n == 0 {
        return Err(Error::InvalidOptions("empty starting point".into()));
    }
    let f0 = objective(x0);
    if !f0.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    let eval = |x: &[f64]| {
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    values.push(f0);
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        values.push(eval(&v));
        simplex.push(v);
    }
    let mut evaluations = n + 1;
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;

    let point = |c: &[f64], toward: &[f64], coef: f64, out: &mut Vec<f64>| {
        out.clear();
        out.extend(c.iter().zip(toward).map(|(ci, ti)| ci + coef * (ti - ci)));
    };

    while iterations < opts.max_iterations {
        // stable sort keeps the earlier vertex first on ties
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let spread = values[worst] - values[best];
        let diameter = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.spread_tol || diameter <= opts.diameter_tol {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &idx in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        // reflection: c + α (c − x_w)
        point(&centroid, &simplex[worst], -opts.reflection, &mut trial);
        let f_r = eval(&trial);
        evaluations += 1;

        if f_r < values[best] {
            let reflected = trial.clone();
            point(
                &centroid,
                &reflected,
                opts.expansion / opts.reflection,
                &mut trial,
            );
            let f_e = eval(&trial);
            evaluations += 1;
            if f_e < f_r {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_r;
            }
            continue;
        }
        if f_r < values[second_worst] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = f_r;
            continue;
        }

        let contracted_ok = if f_r < values[worst] {
            // outside contraction
            let reflected = trial.clone();
            point(&centroid, &reflected, opts.contraction, &mut trial);
            let f_c = eval(&trial);
            evaluations += 1;
            if f_c <= f_r {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_c;
                true
            } else {
                false
            }
        } else {
            // inside contraction
            point(&centroid, &simplex[worst], opts.contraction, &mut trial);
            let f_c = eval(&trial);
            evaluations += 1;
            if f_c < values[worst] {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_c;
                true
            } else {
                false
            }
        };
        if contracted_ok {
            continue;
        }

        let anchor = simplex[best].clone();
        for &idx in &order[1..] {
            let shrunk: Vec<f64> = anchor
                .iter()
                .zip(&simplex[idx])
                .map(|(a, x)| a + opts.shrink * (x - a))
                .collect();
            values[idx] = eval(&shrunk);
            simplex[idx] = shrunk;
        }
        evaluations += n;
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("non-empty simplex");
    Ok(SimplexOutcome {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        evaluations,
        converged,
    })
}

/// Repeats [`nelder_mead`] from the incumbent with a fresh simplex until a
/// round stops improving.
fn nelder_mead_polished<F>(
    objective: F,
    x0: &[f64],
    opts: &SimplexOptions,
) -> Result<SimplexOutcome>
where
    F: Fn(&[f64]) -> f64,
{
    let mut out = nelder_mead(&objective, x0, opts)?;
    for _ in 0..POLISH_ROUNDS {
        let next = nelder_mead(&objective, &out.x, opts)?;
        let improved = out.value - next.value;
        let iterations = out.iterations + next.iterations;
        let evaluations = out.evaluations + next.evaluations;
        if next.value <= out.value {
            out = SimplexOutcome {
                iterations,
                evaluations,
                ..next
            };
        } else {
            out.iterations = iterations;
            out.evaluations = evaluations;
        }
        if improved <= opts.spread_tol {
            break;
        }
    }
    Ok(out)
}

/// Sixteen reals parameterizing a lower-triangular 4×4 factor `G` with real
/// diagonal; the state is `G G† / Tr(G G†)`.
///
/// Layout: `x[0..4]` diagonal, then `(re, im)` pairs of the strictly lower
/// triangle in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateParam(pub [f64; 16]);

impl StateParam {
    pub const DIM: usize = 16;

    pub fn from_slice(x: &[f64]) -> Self {
        let mut a = [0.0; 16];
        a.copy_from_slice(x);
        Self(a)
    }

    pub fn factor(&self) -> ComplexMatrix {
        let x = &self.0;
        let mut g = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            g[(i, i)] = Complex64::new(x[i], 0.0);
        }
        let mut k = 4;
        for i in 1..4 {
            for j in 0..i {
                g[(i, j)] = Complex64::new(x[k], x[k + 1]);
                k += 2;
            }
        }
        g
    }

    /// `None` only for the all-zero factor.
    pub fn to_state(&self) -> Option<DensityMatrix> {
        if self.0.iter().any(|v| !v.is_finite()) || self.0.iter().all(|&v| v == 0.0) {
            return None;
        }
        Some(DensityMatrix::from_factor(&self.factor()))
    }
}

/// Which measure [`orbit_maximize`] targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    Concurrence,
    Negativity,
}

/// Best state of a multistart search.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub best_state: DensityMatrix,
    /// Value of the maximized quantity at `best_state`.
    pub objective: f64,
    /// Constraint violation at `best_state` (spectrum deviation for orbit searches).
    pub constraint_residual: f64,
    pub feasible: bool,
    pub restarts_used: usize,
    pub iterations_total: usize,
    /// Objective reached by each restart, in restart order (`-∞` if infeasible).
    pub per_restart_bests: Vec<f64>,
}

struct RestartOutcome {
    state: DensityMatrix,
    objective: f64,
    residual: f64,
    iterations: usize,
}

/// `(σ1 − σ2 − σ3 − σ4, −2 λ_min(ρ^{T_B}))` before clamping at zero.
fn raw_measures(rho: &DensityMatrix) -> (f64, f64) {
    (raw_concurrence(rho), raw_negativity(rho))
}

fn raw_concurrence(rho: &DensityMatrix) -> f64 {
    let root = linalg::psd_sqrt_clamped(rho.matrix());
    let q = &(&root.transpose() * &sigma_yy()) * &root;
    let sv = linalg::svd(&q).singular_values;
    sv[0] - sv[1..].iter().sum::<f64>()
}

fn raw_negativity(rho: &DensityMatrix) -> f64 {
    let pt = partial_transpose(rho.matrix()).expect("4x4");
    -2.0 * linalg::herm_eig_unchecked(&pt).eigenvalues[0]
}

fn gap(rho: &DensityMatrix) -> f64 {
    let (c, n) = raw_measures(rho);
    c.max(0.0) - n.max(0.0)
}

fn standard_normal_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Runs `restart` for every index in parallel and keeps the best feasible
/// outcome. The reduction runs in index order, so the lowest index wins ties.
fn multistart<F>(opts: &SimplexOptions, restart: F) -> Result<OptimizationResult>
where
    F: Fn(usize) -> Result<RestartOutcome> + Sync,
{
    opts.validate()?;
    if opts.restarts == 0 {
        return Err(Error::InvalidOptions(
            "at least one restart is required".into(),
        ));
    }
    let outcomes: Vec<RestartOutcome> = (0..opts.restarts)
        .into_par_iter()
        .map(&restart)
        .collect::<Result<Vec<_>>>()?;

    let iterations_total = outcomes.iter().map(|o| o.iterations).sum();
    let per_restart_bests: Vec<f64> = outcomes
        .iter()
        .map(|o| {
            if o.residual <= FEASIBILITY_TOL {
                o.objective
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let mut best: Option<usize> = None;
    for (i, v) in per_restart_bests.iter().enumerate() {
        if v.is_finite() && best.is_none_or(|b| *v > per_restart_bests[b]) {
            best = Some(i);
        }
    }
    let Some(best) = best else {
        let best_residual = outcomes
            .iter()
            .map(|o| o.residual)
            .fold(f64::INFINITY, f64::min);
        return Err(Error::NoFeasibleRestart { best_residual });
    };
    let chosen = outcomes.into_iter().nth(best).expect("index in range");
    Ok(OptimizationResult {
        best_state: chosen.state,
        objective: chosen.objective,
        constraint_residual: chosen.residual,
        feasible: true,
        restarts_used: opts.restarts,
        iterations_total,
        per_restart_bests,
    })
}

/// Maximizes `C − E_N` over [`StateParam`] subject to `constraint(ρ) = 0`, with
/// the penalty schedule and multiplier updates; returns the final parameters.
fn penalized_search<G>(
    x0: Vec<f64>,
    constraint: G,
    opts: &SimplexOptions,
) -> Result<(Vec<f64>, usize)>
where
    G: Fn(&DensityMatrix) -> f64,
{
    let mut x = x0;
    let mut multiplier = 0.0;
    let mut iterations = 0;
    let stages = PENALTY_SCHEDULE.iter().copied().chain(std::iter::repeat_n(
        *PENALTY_SCHEDULE.last().expect("non-empty"),
        EXTRA_MULTIPLIER_ROUNDS,
    ));
    for (stage, weight) in stages.enumerate() {
        let objective = |p: &[f64]| match StateParam::from_slice(p).to_state() {
            Some(rho) => {
                let g = constraint(&rho);
                -gap(&rho) + multiplier * g + weight * g * g
            }
            None => f64::INFINITY,
        };
        let out = nelder_mead_polished(objective, &x, opts)?;
        iterations += out.iterations;
        x = out.x;
        let rho = StateParam::from_slice(&x)
            .to_state()
            .ok_or(Error::NonFiniteObjective)?;
        let g = constraint(&rho);
        multiplier += 2.0 * weight * g;
        if stage + 1 >= PENALTY_SCHEDULE.len() && g.abs() <= 0.1 * FEASIBILITY_TOL {
            break;
        }
    }
    Ok((x, iterations))
}

fn check_target(what: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value.is_finite() && value >= lo - 1e-12 && value <= hi + 1e-12 {
        Ok(value.clamp(lo, hi))
    } else {
        Err(Error::OutOfRange {
            what,
            value,
            lo,
            hi,
        })
    }
}

/// Moves `rho` along a spectral path, eigenvectors fixed, to participation
/// ratio exactly `target`: toward `I/4` when too pure, toward the top
/// eigenprojector when too mixed.
pub fn repair_participation_ratio(rho: &DensityMatrix, target: f64) -> DensityMatrix {
    let purity_target = 1.0 / target;
    let eig = linalg::herm_eig_unchecked(rho.matrix());
    let lam: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0)).collect();
    let total: f64 = lam.iter().sum();
    let lam: Vec<f64> = lam.iter().map(|l| l / total).collect();
    let purity: f64 = lam.iter().map(|l| l * l).sum();

    let direction: Vec<f64> = if purity > purity_target {
        vec![0.25; 4]
    } else {
        // eigenvalues ascending: the last one is the largest
        vec![0.0, 0.0, 0.0, 1.0]
    };
    let d: Vec<f64> = direction.iter().zip(&lam).map(|(a, l)| a - l).collect();
    // |λ + t d|² = purity_target, smallest root in [0, 1]
    let a: f64 = d.iter().map(|x| x * x).sum();
    let b: f64 = 2.0 * lam.iter().zip(&d).map(|(l, x)| l * x).sum::<f64>();
    let c = purity - purity_target;
    let t = if a == 0.0 {
        0.0
    } else {
        let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
        let roots = [(-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a)];
        roots
            .into_iter()
            .filter(|r| (-1e-12..=1.0 + 1e-12).contains(r))
            .fold(f64::INFINITY, f64::min)
            .clamp(0.0, 1.0)
    };
    let new: Vec<f64> = lam
        .iter()
        .zip(&d)
        .map(|(l, x)| (l + t * x).max(0.0))
        .collect();
    let v = &eig.eigenvectors;
    let scaled = ComplexMatrix::from_fn(4, 4, |i, j| v[(i, j)] * new[j].sqrt());
    DensityMatrix::from_factor(&scaled)
}

/// Mixes `rho` with `I/4` (to lower) or the Bell state (to raise) until the
/// concurrence equals `target`.
pub fn repair_concurrence(rho: &DensityMatrix, target: f64) -> DensityMatrix {
    let current = measures::concurrence(rho);
    if current == target {
        return rho.clone();
    }
    let toward = if current > target {
        DensityMatrix::maximally_mixed()
    } else {
        DensityMatrix::bell()
    };
    let above = current > target;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        let c = measures::concurrence(&rho.mix(&toward, mid));
        // keep `lo` on the side of the starting point
        if (c > target) == above && c != target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = rho.mix(&toward, lo);
    let b = rho.mix(&toward, hi);
    let ra = (measures::concurrence(&a) - target).abs();
    let rb = (measures::concurrence(&b) - target).abs();
    if rb <= ra {
        b
    } else {
        a
    }
}

/// Largest `C − E_N` over all states with participation ratio `r_target ∈ [1, 4]`.
pub fn max_gap_fixed_r(r_target: f64, opts: &SimplexOptions) -> Result<OptimizationResult> {
    let target = check_target("participation ratio", r_target, 1.0, 4.0)?;
    let constraint = |rho: &DensityMatrix| measures::participation_ratio(rho) - target;
    multistart(opts, |restart| {
        let mut rng = opts.seed.stream(Stream::Restart, restart as u64);
        let x0 = standard_normal_vector(&mut rng, StateParam::DIM);
        let (x, iterations) = penalized_search(x0, constraint, opts)?;
        let rho = StateParam::from_slice(&x)
            .to_state()
            .ok_or(Error::NonFiniteObjective)?;
        let state = repair_participation_ratio(&rho, target);
        Ok(RestartOutcome {
            objective: gap(&state),
            residual: constraint(&state).abs(),
            state,
            iterations,
        })
    })
}

/// Largest `C − E_N` over all states with concurrence `c_target ∈ [0, 1]`.
pub fn max_gap_fixed_c(c_target: f64, opts: &SimplexOptions) -> Result<OptimizationResult> {
    let target = check_target("concurrence", c_target, 0.0, 1.0)?;
    let constraint = |rho: &DensityMatrix| measures::concurrence(rho) - target;
    multistart(opts, |restart| {
        let mut rng = opts.seed.stream(Stream::Restart, restart as u64);
        let x0 = standard_normal_vector(&mut rng, StateParam::DIM);
        let (x, iterations) = penalized_search(x0, constraint, opts)?;
        let rho = StateParam::from_slice(&x)
            .to_state()
            .ok_or(Error::NonFiniteObjective)?;
        let state = repair_concurrence(&rho, target);
        Ok(RestartOutcome {
            objective: gap(&state),
            residual: constraint(&state).abs(),
            state,
            iterations,
        })
    })
}

/// Hermitian generator from 16 reals: four real diagonal entries followed by
/// `(re, im)` pairs of the strict upper triangle in row-major order.
pub fn hermitian_from_params(x: &[f64]) -> ComplexMatrix {
    assert_eq!(x.len(), 16);
    let mut h = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        h[(i, i)] = Complex64::new(x[i], 0.0);
    }
    let mut k = 4;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let z = Complex64::new(x[k], x[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

/// `U diag(λ) U†` with `U = exp(iH(x))`.
pub fn orbit_state(lam: &Spectrum, x: &[f64]) -> DensityMatrix {
    let u = expm_i_hermitian(&hermitian_from_params(x));
    DensityMatrix::diagonal(lam).conjugated(&u)
}

/// Largest concurrence or negativity over the unitary orbit of `diag(λ)`.
pub fn orbit_maximize(
    lam: &Spectrum,
    measure: Measure,
    opts: &SimplexOptions,
) -> Result<OptimizationResult> {
    let raw = |rho: &DensityMatrix| match measure {
        Measure::Concurrence => raw_concurrence(rho),
        Measure::Negativity => raw_negativity(rho),
    };
    let mut sorted = *lam.values();
    sorted.sort_by(f64::total_cmp);
    multistart(opts, |restart| {
        let mut rng = opts.seed.stream(Stream::Restart, restart as u64);
        let x0 = standard_normal_vector(&mut rng, 16);
        // the unclamped value keeps a slope inside the separable region
        let out = nelder_mead_polished(|x| -raw(&orbit_state(lam, x)), &x0, opts)?;
        let state = orbit_state(lam, &out.x);
        let residual = state
            .eigenvalues()
            .iter()
            .zip(&sorted)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Ok(RestartOutcome {
            objective: raw(&state).max(0.0),
            residual,
            state,
            iterations: out.iterations,
        })
    })
}
