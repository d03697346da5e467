//! Projected-subgradient minimization of the SLEM over feasible edge weights,
//! for arbitrary connected graphs, plus a spectral optimality certificate.
//!
//! The objective is the spectral norm of `I - D^{-1/2} L(q) D^{-1/2} - Jt`
//! where `Jt` deflates the stationary direction; it equals the SLEM of the
//! chain `I - D^{-1} L(q)`. A subgradient comes from the extreme
//! eigenvectors; iterates are projected onto `{q >= 0, sum_k q_ik <= pi_i}`
//! by cyclic (Dykstra) projection.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eig::{eig_symmetric, eig_symmetric_with_guess, SymmetricEigen};
use crate::error::{Error, Result};
use crate::graph::{EdgeWeights, EquilibriumDistribution, Graph};

/// Options for [`solve`]. `restarts` counts step-schedule phases: each phase
/// restarts the diminishing step rule `c / sqrt(t)` from the best point found
/// so far with a halved constant, which sharpens the final accuracy.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Step constant `c`; default `0.1 * max(pi)`.
    pub step_coefficient: Option<f64>,
    /// Stop a phase when the best objective improves by less than this over
    /// `stall_window` iterations.
    pub stall_tolerance: f64,
    pub stall_window: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iters: 50_000,
            step_coefficient: None,
            stall_tolerance: 1e-7,
            stall_window: 500,
            restarts: 3,
            seed: 0,
        }
    }
}

/// Spectral optimality evidence at a weight vector. `lambda2` / `lambda_n`
/// are the second-smallest and largest eigenvalues of
/// `D^{-1/2} L(q) D^{-1/2}`; at an optimum with both extreme eigenspaces
/// active their sum is 2.
#[derive(Debug, Clone)]
pub struct OptimalityCertificate {
    /// Achieved SLEM.
    pub s: f64,
    pub lambda2: f64,
    pub lambda_n: f64,
    /// `|lambda2 + lambda_n - 2|`.
    pub eigenvalue_sum_gap: f64,
    /// Vertices whose constraint `sum_k q_ik <= pi_i` is active.
    pub active_vertices: Vec<usize>,
    /// Whether the point is consistent with dual optimality: either both
    /// extremes are active (gap ~ 0), or the slow side's eigenvector is
    /// supported on edges whose endpoints include an active vertex.
    pub dual_consistent: bool,
    /// Eigenvector for the eigenvalue `1 - s` (the lambda_2 side).
    pub z1: Vec<f64>,
    /// Eigenvector for `1 + s` when present.
    pub z2: Option<Vec<f64>>,
}

/// Outcome of a numeric solve.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub weights: EdgeWeights,
    pub certificate: OptimalityCertificate,
    pub objective: f64,
    pub iterations: usize,
    /// False when the iteration budget ran out while still improving.
    pub converged: bool,
    /// Best objective after each iteration (nonincreasing).
    pub trace: Vec<f64>,
}

/// Rank-one projector onto the stationary direction:
/// `Jt_ij = sqrt(pi_i pi_j) / sum(pi)`. Idempotent, and fixes `D^{1/2} 1`.
pub fn jtilde(pi: &EquilibriumDistribution) -> DMatrix<f64> {
    let n = pi.len();
    let total = pi.total();
    let mut j = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            j[(a, b)] = (pi.get(a) * pi.get(b)).sqrt() / total;
        }
    }
    j
}

struct Problem<'a> {
    g: &'a Graph,
    pi: Vec<f64>,
    sqrt_pi: Vec<f64>,
    /// Free (optimized) edges.
    free: Vec<(usize, usize)>,
    /// Incident free-edge indices per vertex.
    incident: Vec<Vec<usize>>,
    /// Per-vertex budget: pi_i minus fixed incident weight.
    budgets: Vec<f64>,
    /// Constant part `I - Jt - sum_fixed q_e B_e`.
    base: DMatrix<f64>,
}

impl<'a> Problem<'a> {
    fn new(g: &'a Graph, pi: &EquilibriumDistribution, fixed: &EdgeWeights) -> Result<Self> {
        let n = g.n();
        if pi.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "pi has {} entries for {} vertices",
                pi.len(),
                n
            )));
        }
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        fixed.check_support(g)?;
        let piv: Vec<f64> = pi.values().to_vec();
        let sqrt_pi: Vec<f64> = piv.iter().map(|x| x.sqrt()).collect();
        let mut free = Vec::new();
        for &(i, j) in g.edges() {
            if !fixed.contains(i, j) {
                free.push((i, j));
            }
        }
        let mut incident = vec![Vec::new(); n];
        for (k, &(i, j)) in free.iter().enumerate() {
            incident[i].push(k);
            incident[j].push(k);
        }
        let mut budgets = piv.clone();
        let mut base = DMatrix::identity(n, n) - jtilde(pi);
        for ((i, j), q) in fixed.iter() {
            budgets[i] -= q;
            budgets[j] -= q;
            base[(i, i)] -= q / piv[i];
            base[(j, j)] -= q / piv[j];
            let off = q / (sqrt_pi[i] * sqrt_pi[j]);
            base[(i, j)] += off;
            base[(j, i)] += off;
        }
        for v in 0..n {
            if budgets[v] < -1e-9 * piv[v] {
                return Err(Error::InfeasibleWeights { vertex: v, sum: piv[v] - budgets[v], pi: piv[v] });
            }
            budgets[v] = budgets[v].max(0.0);
        }
        Ok(Problem { g, pi: piv, sqrt_pi, free, incident, budgets, base })
    }

    fn matrix(&self, q: &[f64]) -> DMatrix<f64> {
        let mut m = self.base.clone();
        for (k, &(i, j)) in self.free.iter().enumerate() {
            m[(i, i)] -= q[k] / self.pi[i];
            m[(j, j)] -= q[k] / self.pi[j];
            let off = q[k] / (self.sqrt_pi[i] * self.sqrt_pi[j]);
            m[(i, j)] += off;
            m[(j, i)] += off;
        }
        m
    }

    /// Euclidean projection onto the feasible set by cyclic projection with
    /// Dykstra corrections (box and per-vertex halfspaces).
    fn project(&self, q: &mut [f64]) {
        let ne = q.len();
        let n = self.g.n();
        let mut corr_box = vec![0.0f64; ne];
        let mut corr_vertex = vec![vec![]; n];
        for v in 0..n {
            corr_vertex[v] = vec![0.0f64; self.incident[v].len()];
        }
        let mut prev = q.to_vec();
        for _cycle in 0..20_000 {
            // box q >= 0
            for k in 0..ne {
                let y = q[k] + corr_box[k];
                let x = y.max(0.0);
                corr_box[k] = y - x;
                q[k] = x;
            }
            // halfspace per vertex: sum of incident <= budget
            for v in 0..n {
                let idx = &self.incident[v];
                if idx.is_empty() {
                    continue;
                }
                let mut s = 0.0;
                for (slot, &k) in idx.iter().enumerate() {
                    q[k] += corr_vertex[v][slot];
                    s += q[k];
                }
                let over = (s - self.budgets[v]) / idx.len() as f64;
                if over > 0.0 {
                    for (slot, &k) in idx.iter().enumerate() {
                        corr_vertex[v][slot] = over;
                        q[k] -= over;
                    }
                } else {
                    for slot in 0..idx.len() {
                        corr_vertex[v][slot] = 0.0;
                    }
                }
            }
            let mut delta = 0.0f64;
            for k in 0..ne {
                delta = delta.max((q[k] - prev[k]).abs());
                prev[k] = q[k];
            }
            if delta <= 1e-10 {
                break;
            }
        }
        for k in 0..ne {
            if q[k] < 0.0 {
                q[k] = 0.0;
            }
        }
    }

    /// Objective and subgradient at `q` (descent on the free coordinates).
    /// `band` widens the eigenspace treated as extreme: eigenvalues within
    /// `band` of the top (bottom) contribute to the averaged subgradient,
    /// which suppresses zigzag between nearly-crossing eigenvalues.
    fn eval(
        &self,
        q: &[f64],
        guess: Option<&DMatrix<f64>>,
        band: f64,
    ) -> (f64, Vec<f64>, SymmetricEigen) {
        let m = self.matrix(q);
        let eig = match guess {
            Some(b) => eig_symmetric_with_guess(&m, Some(b)),
            None => eig_symmetric(&m),
        }
        .expect("objective matrix is symmetric");
        let n = eig.values.len();
        let top = eig.values[0];
        let bottom = eig.values[n - 1];
        let objective = top.max(-bottom);

        const TIE: f64 = 1e-12;
        let degen = band.max(1e-9);
        let mut grad = vec![0.0f64; self.free.len()];
        let add_side = |grad: &mut Vec<f64>, sign: f64, side_top: bool, weight: f64| {
            let cols: Vec<usize> = if side_top {
                (0..n).filter(|&k| eig.values[k] >= top - degen).collect()
            } else {
                (0..n).filter(|&k| eig.values[k] <= bottom + degen).collect()
            };
            let w = weight / cols.len() as f64;
            for &c in &cols {
                let v = eig.vectors.column(c);
                for (k, &(i, j)) in self.free.iter().enumerate() {
                    let d = v[i] / self.sqrt_pi[i] - v[j] / self.sqrt_pi[j];
                    grad[k] += sign * w * d * d;
                }
            }
        };
        if top - (-bottom) > TIE {
            add_side(&mut grad, -1.0, true, 1.0);
        } else if (-bottom) - top > TIE {
            add_side(&mut grad, 1.0, false, 1.0);
        } else {
            add_side(&mut grad, -1.0, true, 0.5);
            add_side(&mut grad, 1.0, false, 0.5);
        }
        (objective, grad, eig)
    }
}

/// SLEM objective at feasible weights: the spectral norm of the deflated
/// operator. Agrees with `slem_of_chain(transition_matrix(..))`.
pub fn objective(g: &Graph, pi: &EquilibriumDistribution, w: &EdgeWeights) -> Result<f64> {
    w.check_feasible(g, pi, 1e-9)?;
    let problem = Problem::new(g, pi, &EdgeWeights::new())?;
    let q: Vec<f64> = g.edges().iter().map(|&(i, j)| w.get(i, j)).collect();
    let m = problem.matrix(&q);
    let eig = eig_symmetric(&m)?;
    Ok(eig.values[0].max(-eig.values[eig.values.len() - 1]))
}

/// Euclidean projection of arbitrary edge values onto the feasible set
/// `{q >= 0, sum_{k != i} q_ik <= pi_i}`.
pub fn project_feasible(
    g: &Graph,
    pi: &EquilibriumDistribution,
    w: &EdgeWeights,
) -> Result<EdgeWeights> {
    let problem = Problem::new(g, pi, &EdgeWeights::new())?;
    let mut q: Vec<f64> = g.edges().iter().map(|&(i, j)| w.get(i, j)).collect();
    problem.project(&mut q);
    Ok(EdgeWeights::from_pairs(
        g.edges().iter().copied().zip(q.iter().copied()),
    ))
}

fn certificate_from(
    problem: &Problem<'_>,
    q_free: &[f64],
    fixed: &EdgeWeights,
    cert_tol: f64,
) -> OptimalityCertificate {
    let q = q_free;
    let n = problem.g.n();
    // A = D^{-1/2} L D^{-1/2} over all weights (fixed + free)
    let mut a = DMatrix::zeros(n, n);
    let add = |a: &mut DMatrix<f64>, i: usize, j: usize, w: f64| {
        a[(i, i)] += w / problem.pi[i];
        a[(j, j)] += w / problem.pi[j];
        let off = w / (problem.sqrt_pi[i] * problem.sqrt_pi[j]);
        a[(i, j)] -= off;
        a[(j, i)] -= off;
    };
    for ((i, j), w) in fixed.iter() {
        add(&mut a, i, j, w);
    }
    for (k, &(i, j)) in problem.free.iter().enumerate() {
        add(&mut a, i, j, q[k]);
    }
    let eig = eig_symmetric(&a).expect("laplacian form is symmetric");
    let lambda_max = eig.values[0];
    let lambda2_small = eig.values[n - 2]; // second smallest
    let s = (1.0 - lambda2_small).max(lambda_max - 1.0);
    let gap = (lambda2_small + lambda_max - 2.0).abs();

    let mut incident_total = vec![0.0f64; n];
    for ((i, j), w) in fixed.iter() {
        incident_total[i] += w;
        incident_total[j] += w;
    }
    for (k, &(i, j)) in problem.free.iter().enumerate() {
        incident_total[i] += q[k];
        incident_total[j] += q[k];
    }
    let active: Vec<usize> = (0..n)
        .filter(|&v| problem.pi[v] - incident_total[v] <= 1e-7 * problem.pi[v].max(1e-12))
        .collect();

    // z1: eigenvector for the eigenvalue nearest 1 - s (slow side)
    let target1 = 1.0 - s;
    let k1 = (0..n)
        .min_by(|&x, &y| {
            (eig.values[x] - target1)
                .abs()
                .partial_cmp(&(eig.values[y] - target1).abs())
                .unwrap()
        })
        .unwrap();
    let z1: Vec<f64> = eig.vectors.column(k1).iter().copied().collect();
    let z2 = if (lambda_max - (1.0 + s)).abs() <= cert_tol.max(1e-9) {
        Some(eig.vectors.column(0).iter().copied().collect())
    } else {
        None
    };

    let dual_consistent = if gap <= cert_tol {
        true
    } else if active.is_empty() {
        // one-sided optimum needs a binding vertex constraint to absorb the
        // missing dual side
        false
    } else {
        probe_no_descent(problem, q)
    };

    OptimalityCertificate {
        s,
        lambda2: lambda2_small,
        lambda_n: lambda_max,
        eigenvalue_sum_gap: gap,
        active_vertices: active,
        dual_consistent,
        z1,
        z2,
    }
}

/// Check whether feasible weights are consistent with optimality: projected
/// subgradient steps at several lengths must not find a descent direction.
/// Never rejects a true optimum (no feasible point lies below the minimum);
/// may miss shallow descent at near-optimal points.
pub fn stationarity_probe(
    g: &Graph,
    pi: &EquilibriumDistribution,
    w: &EdgeWeights,
) -> Result<bool> {
    w.check_feasible(g, pi, 1e-9)?;
    let problem = Problem::new(g, pi, &EdgeWeights::new())?;
    let q: Vec<f64> = g.edges().iter().map(|&(i, j)| w.get(i, j)).collect();
    Ok(probe_no_descent(&problem, &q))
}

fn probe_no_descent(problem: &Problem<'_>, q: &[f64]) -> bool {
    // a single subgradient step cannot certify stationarity at nonsmooth
    // (degenerate-eigenvalue) points, so run a short descent; a true optimum
    // cannot be improved on, so this never rejects one
    let (f0, _, eig0) = problem.eval(q, None, 0.0);
    let threshold = f0 - 1e-8 * f0.abs().max(1e-2);
    let min_pi = problem.pi.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut cur = q.to_vec();
    let mut eig = eig0;
    for c in [0.1 * min_pi, 0.02 * min_pi] {
        cur.copy_from_slice(q);
        for t in 1..=60u32 {
            let step = c / f64::from(t).sqrt();
            let (f, grad, e) = problem.eval(&cur, Some(&eig.vectors), 0.5 * step);
            eig = e;
            if f < threshold {
                return false;
            }
            let gnorm = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
            if gnorm == 0.0 {
                break;
            }
            for (k, g) in grad.iter().enumerate() {
                cur[k] -= step * g / gnorm;
            }
            problem.project(&mut cur);
        }
        let (f, _, _) = problem.eval(&cur, None, 0.0);
        if f < threshold {
            return false;
        }
    }
    true
}

/// Evidence report for given feasible weights (no optimization).
pub fn certify(
    g: &Graph,
    pi: &EquilibriumDistribution,
    w: &EdgeWeights,
) -> Result<OptimalityCertificate> {
    w.check_feasible(g, pi, 1e-9)?;
    let problem = Problem::new(g, pi, &EdgeWeights::new())?;
    let q: Vec<f64> = g.edges().iter().map(|&(i, j)| w.get(i, j)).collect();
    Ok(certificate_from(&problem, &q, &EdgeWeights::new(), 1e-8))
}

/// Minimize the SLEM over the free weights of `g`, holding `fixed` weights
/// constant. The distribution is normalized internally (outputs are exactly
/// equivariant under scaling of `pi`).
pub fn solve_with_fixed(
    g: &Graph,
    pi: &EquilibriumDistribution,
    fixed: &EdgeWeights,
    opts: &SolverOptions,
    warm_start: Option<&EdgeWeights>,
) -> Result<SolveOutcome> {
    let scale = pi
        .values()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let pin = pi.scaled(1.0 / scale);
    let mut fixed_n = EdgeWeights::new();
    for ((i, j), v) in fixed.iter() {
        fixed_n.set(i, j, v / scale);
    }
    let problem = Problem::new(g, &pin, &fixed_n)?;
    let ne = problem.free.len();

    // warm start: supplied weights or the Metropolis chain, projected
    let mut q: Vec<f64> = match warm_start {
        Some(w) => problem.free.iter().map(|&(i, j)| w.get(i, j) / scale).collect(),
        None => {
            let mw = crate::graph::metropolis_weights(g, &pin)?;
            problem.free.iter().map(|&(i, j)| mw.get(i, j)).collect()
        }
    };
    problem.project(&mut q);

    // steps travel along normalized directions, so the constant must scale
    // with the feasible set's diameter (the largest weight is bounded by the
    // largest pi entry)
    let c0 = opts.step_coefficient.map(|c| c / scale).unwrap_or_else(|| {
        0.1 * pin.values().iter().cloned().fold(0.0, f64::max)
    });
    let phases = opts.restarts.max(1);
    let per_phase = (opts.max_iters / phases).max(1);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best_q = q.clone();
    let (mut best_f, _, mut eig) = problem.eval(&q, None, 0.0);
    let mut trace = Vec::with_capacity(opts.max_iters);
    trace.push(best_f);
    let mut iterations = 0usize;
    let mut converged = false;

    for phase in 0..phases {
        if ne == 0 {
            converged = true;
            break;
        }
        let c = c0 / (1u64 << phase.min(30)) as f64;
        if phase > 0 {
            q.copy_from_slice(&best_q);
        }
        let mut window_best = best_f;
        let mut since_check = 0usize;
        let mut improved_in_phase = false;
        converged = false;
        // tail-averaged iterate: the running mean damps the zigzag the raw
        // subgradient steps produce at nonsmooth (degenerate-eigenvalue) optima
        let mut avg = vec![0.0f64; ne];
        let mut avg_count = 0usize;
        for t in 1..=per_phase {
            let step = c / (t as f64).sqrt();
            let (f, grad, e) = problem.eval(&q, Some(&eig.vectors), 0.5 * step);
            eig = e;
            if f < best_f {
                if best_f - f > opts.stall_tolerance {
                    improved_in_phase = true;
                }
                best_f = f;
                best_q.copy_from_slice(&q);
            }
            for (a, &x) in avg.iter_mut().zip(q.iter()) {
                *a += x;
            }
            avg_count += 1;
            if avg_count % 97 == 0 {
                let mut mean: Vec<f64> = avg.iter().map(|a| a / avg_count as f64).collect();
                problem.project(&mut mean);
                let (fm, _, _) = problem.eval(&mean, Some(&eig.vectors), 0.0);
                iterations += 1;
                if fm < best_f {
                    if best_f - fm > opts.stall_tolerance {
                        improved_in_phase = true;
                    }
                    best_f = fm;
                    best_q.copy_from_slice(&mean);
                }
            }
            trace.push(best_f);
            iterations += 1;
            // normalized-direction step: c/sqrt(t) is the step length, so
            // progress does not depend on the subgradient's magnitude
            let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gnorm > 0.0 {
                for k in 0..ne {
                    q[k] -= step * grad[k] / gnorm;
                }
            }
            problem.project(&mut q);

            since_check += 1;
            if since_check >= opts.stall_window {
                if window_best - best_f < opts.stall_tolerance {
                    converged = true;
                    break;
                }
                window_best = best_f;
                since_check = 0;
            }
        }
        // a phase that went nowhere: try a fresh start (seeded) next phase
        if !improved_in_phase && phase + 1 < phases {
            for (k, &(i, j)) in problem.free.iter().enumerate() {
                q[k] = rng.gen::<f64>() * pin.get(i).min(pin.get(j));
            }
            problem.project(&mut q);
        }
    }

    let certificate = certificate_from(&problem, &best_q, &fixed_n, 1e-8);
    let mut weights = fixed.clone();
    for (k, &(i, j)) in problem.free.iter().enumerate() {
        weights.set(i, j, best_q[k] * scale);
    }
    Ok(SolveOutcome {
        weights,
        certificate,
        objective: best_f,
        iterations,
        converged,
        trace,
    })
}

/// Minimize the SLEM over all edge weights of `g`.
pub fn solve(
    g: &Graph,
    pi: &EquilibriumDistribution,
    opts: &SolverOptions,
    warm_start: Option<&EdgeWeights>,
) -> Result<SolveOutcome> {
    solve_with_fixed(g, pi, &EdgeWeights::new(), opts, warm_start)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> EquilibriumDistribution {
        EquilibriumDistribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn jtilde_is_idempotent_projector() {
        let pi = dist(&[1.0, 3.0]);
        let j = jtilde(&pi);
        assert!((j[(0, 0)] - 0.25).abs() < 1e-15);
        assert!((j[(0, 1)] - 3.0f64.sqrt() / 4.0).abs() < 1e-15);
        assert!((j[(1, 1)] - 0.75).abs() < 1e-15);
        let jj = &j * &j;
        assert!((&jj - &j).abs().max() < 1e-14);
        // fixes D^{1/2} 1
        let v = nalgebra::DVector::from_vec(vec![1.0f64.sqrt(), 3.0f64.sqrt()]);
        let jv = &j * &v;
        assert!((&jv - &v).abs().max() < 1e-14);
    }

    #[test]
    fn jtilde_single_vertex() {
        let j = jtilde(&dist(&[2.0]));
        assert!((j[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn objective_zero_weights_is_one() {
        let g = Graph::path(4);
        let pi = dist(&[1.0, 2.0, 1.5, 0.5]);
        let f = objective(&g, &pi, &EdgeWeights::new()).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn objective_matches_chain_slem() {
        let g = Graph::path(3);
        let pi = dist(&[1.0, 2.0, 4.0]);
        let w = EdgeWeights::from_pairs([((0, 1), 2.0 / 3.0), ((1, 2), 8.0 / 6.0)]);
        let f = objective(&g, &pi, &w).unwrap();
        assert!((f - (4.0f64 / 18.0).sqrt()).abs() < 1e-12);
        let chain = crate::graph::transition_matrix(&g, &pi, &w).unwrap();
        let s = crate::spectral::slem_of_chain(&chain).unwrap().slem;
        assert!((f - s).abs() < 1e-10);
    }

    #[test]
    fn projection_already_feasible_unchanged() {
        let g = Graph::path(3);
        let pi = dist(&[1.0, 2.0, 1.0]);
        let w = EdgeWeights::from_pairs([((0, 1), 0.3), ((1, 2), 0.4)]);
        let p = project_feasible(&g, &pi, &w).unwrap();
        assert!((p.get(0, 1) - 0.3).abs() < 1e-12);
        assert!((p.get(1, 2) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn projection_single_edge_clamps_to_budget() {
        let g = Graph::path(2);
        let pi = dist(&[1.0, 1.0]);
        let w = EdgeWeights::from_pairs([((0, 1), 5.0)]);
        let p = project_feasible(&g, &pi, &w).unwrap();
        assert!((p.get(0, 1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn projection_star_symmetric_point() {
        let g = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let pi = dist(&[1.0, 1.0, 1.0, 1.0]);
        let w = EdgeWeights::from_pairs([((0, 1), 1.0), ((0, 2), 1.0), ((0, 3), 1.0)]);
        let p = project_feasible(&g, &pi, &w).unwrap();
        for leaf in 1..=3 {
            assert!((p.get(0, leaf) - 1.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn projection_idempotent_and_nonexpansive() {
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]).unwrap();
        let pi = dist(&[0.8, 1.4, 0.9, 1.1]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
        for _ in 0..20 {
            let w = EdgeWeights::from_pairs(
                g.edges().iter().map(|&e| (e, rng.gen::<f64>() * 4.0 - 1.0)),
            );
            let p = project_feasible(&g, &pi, &w).unwrap();
            let p2 = project_feasible(&g, &pi, &p).unwrap();
            for &(i, j) in g.edges() {
                assert!((p.get(i, j) - p2.get(i, j)).abs() < 1e-8, "idempotence");
            }
            let wv: Vec<f64> = g.edges().iter().map(|&(i, j)| w.get(i, j)).collect();
            let pv: Vec<f64> = g.edges().iter().map(|&(i, j)| p.get(i, j)).collect();
            if let Some((wp, pp)) = prev.take() {
                let din: f64 = wv.iter().zip(&wp).map(|(a, b)| (a - b) * (a - b)).sum();
                let dout: f64 = pv.iter().zip(&pp).map(|(a, b)| (a - b) * (a - b)).sum();
                assert!(dout <= din + 1e-9, "non-expansive: {dout} > {din}");
            }
            prev = Some((wv, pv));
        }
    }

    #[test]
    fn subgradient_supports_objective_from_below() {
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        let pi = dist(&[1.0, 1.7, 0.9, 1.3]);
        let problem = Problem::new(&g, &pi, &EdgeWeights::new()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..15 {
            let q: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() * 0.3).collect();
            let (f, grad, _) = problem.eval(&q, None, 0.0);
            let d: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let eps = 1e-6;
            let q2: Vec<f64> = q.iter().zip(&d).map(|(a, b)| a + eps * b).collect();
            let (f2, _, _) = problem.eval(&q2, None, 0.0);
            let inner: f64 = grad.iter().zip(&d).map(|(a, b)| a * b).sum();
            assert!(
                f2 >= f + eps * inner - 1e-9,
                "convexity: {f2} < {f} + {}",
                eps * inner
            );
        }
    }

    #[test]
    fn solve_three_path_matches_closed_form() {
        let g = Graph::path(3);
        let pi = dist(&[1.0, 2.0, 4.0]);
        let opts = SolverOptions {
            max_iters: 20_000,
            restarts: 5,
            stall_tolerance: 1e-9,
            stall_window: 400,
            ..Default::default()
        };
        let out = solve(&g, &pi, &opts, None).unwrap();
        let expect = (4.0f64 / 18.0).sqrt();
        assert!((out.objective - expect).abs() < 2e-3, "got {}", out.objective);
        assert!((out.weights.get(0, 1) - 2.0 / 3.0).abs() < 5e-3);
        assert!((out.weights.get(1, 2) - 4.0 / 3.0).abs() < 5e-3);
    }

    #[test]
    fn trace_is_monotone_nonincreasing() {
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let pi = dist(&[1.0, 0.5, 1.2, 0.8]);
        let opts = SolverOptions { max_iters: 800, ..Default::default() };
        let out = solve(&g, &pi, &opts, None).unwrap();
        for w in out.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn solve_rejects_disconnected() {
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        let pi = dist(&[1.0; 4]);
        assert!(matches!(
            solve(&g, &pi, &SolverOptions::default(), None),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn certificate_on_optimal_path_weights() {
        let g = Graph::path(3);
        let pi = dist(&[1.0, 2.0, 4.0]);
        let w = EdgeWeights::from_pairs([((0, 1), 2.0 / 3.0), ((1, 2), 8.0 / 6.0)]);
        let cert = certify(&g, &pi, &w).unwrap();
        assert!(cert.eigenvalue_sum_gap <= 1e-8, "gap {}", cert.eigenvalue_sum_gap);
        assert!(cert.dual_consistent);
        assert!(cert.z2.is_some());
    }

    #[test]
    fn certificate_star_one_sided() {
        // hub-constrained star regime: Z2 side empty but hub active
        let g = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let pi = dist(&[1.0, 1.0, 1.0, 1.0]);
        let w = EdgeWeights::from_pairs([((0, 1), 1.0 / 3.0), ((0, 2), 1.0 / 3.0), ((0, 3), 1.0 / 3.0)]);
        let cert = certify(&g, &pi, &w).unwrap();
        assert!((cert.s - 2.0 / 3.0).abs() < 1e-10);
        assert!(cert.eigenvalue_sum_gap > 1e-3, "one-sided optimum");
        assert!(cert.active_vertices.contains(&0));
        assert!(cert.dual_consistent);
    }

    #[test]
    fn certificate_metropolis_not_dual_consistent() {
        let g = Graph::path(5);
        let pi = dist(&[1.9, 2.9, 3.1, 2.8, 1.7]);
        let w = crate::graph::metropolis_weights(&g, &pi).unwrap();
        let cert = certify(&g, &pi, &w).unwrap();
        assert!(!cert.dual_consistent);
    }

    #[test]
    fn scale_equivariance_of_solve() {
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap();
        let pi = dist(&[1.3, 0.7, 2.0, 1.1]);
        let opts = SolverOptions { max_iters: 1500, ..Default::default() };
        let a = solve(&g, &pi, &opts, None).unwrap();
        let b = solve(&g, &pi.scaled(10.0), &opts, None).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-10);
        for &(i, j) in g.edges() {
            let ratio_diff = (b.weights.get(i, j) - 10.0 * a.weights.get(i, j)).abs();
            assert!(ratio_diff < 1e-9, "edge ({i},{j}): {ratio_diff}");
        }
    }
}
