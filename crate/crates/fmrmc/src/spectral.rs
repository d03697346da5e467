//! SLEM and mixing-time computation, plus the small reduced chains that
//! carry the extreme eigenvalues of symmetric trees and complete-cored stars.

use nalgebra::DMatrix;

use crate::eig::{eig_symmetric, eigvals_symmetric};
use crate::error::{Error, Result};
use crate::graph::{validate_chain, Chain, EquilibriumDistribution, Graph};

/// Spectrum summary of a reversible chain.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Eigenvalues of the transition matrix, sorted nonincreasing.
    pub eigenvalues: Vec<f64>,
    /// Second largest eigenvalue modulus `max(lambda_2, -lambda_N)`.
    pub slem: f64,
    pub lambda2: f64,
    pub lambda_n: f64,
    /// `1 / ln(1/slem)`; `0` for slem `0`, infinite as slem reaches `1`.
    pub mixing_time: f64,
}

/// Mixing time from a SLEM value.
pub fn mixing_time(slem: f64) -> f64 {
    if slem <= 0.0 {
        0.0
    } else if slem >= 1.0 {
        f64::INFINITY
    } else {
        1.0 / (1.0 / slem).ln()
    }
}

/// SLEM from a nonincreasing spectrum of a stochastic matrix (drops the
/// leading eigenvalue 1).
pub fn slem_from_spectrum(eigs: &[f64]) -> f64 {
    if eigs.len() < 2 {
        return 0.0;
    }
    let lambda2 = eigs[1];
    let lambda_n = eigs[eigs.len() - 1];
    lambda2.max(-lambda_n).max(0.0)
}

/// Symmetrized similar matrix `D^{1/2} P D^{-1/2}`; real spectrum for
/// reversible chains.
pub fn symmetrized(c: &Chain) -> DMatrix<f64> {
    let n = c.pi.len();
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = (c.pi.get(i) / c.pi.get(j)).sqrt() * c.p[(i, j)];
        }
    }
    // exact symmetry up to roundoff; average to keep Jacobi happy
    0.5 * (&s + s.transpose())
}

/// Spectrum, SLEM and mixing time of a reversible chain. Errors if detailed
/// balance is violated beyond `1e-7` (the spectrum is not guaranteed real).
pub fn slem_of_chain(c: &Chain) -> Result<SpectralReport> {
    let g = Graph::complete(c.pi.len());
    let report = validate_chain(c, &g);
    if report.detailed_balance > 1e-7 {
        return Err(Error::NotReversible(report.detailed_balance));
    }
    let eigs = eigvals_symmetric(&symmetrized(c))?;
    let slem = slem_from_spectrum(&eigs);
    Ok(SpectralReport {
        lambda2: eigs.get(1).copied().unwrap_or(0.0),
        lambda_n: *eigs.last().unwrap(),
        mixing_time: mixing_time(slem),
        slem,
        eigenvalues: eigs,
    })
}

/// SLEM of the path chain with vertex weights `pi` and consecutive edge
/// weights `w`, computed from the symmetric tridiagonal similar matrix.
pub fn path_slem(pi: &EquilibriumDistribution, w: &[f64]) -> Result<f64> {
    let n = pi.len();
    if n < 2 {
        return Err(Error::DimensionMismatch("path needs at least 2 vertices".into()));
    }
    if w.len() != n - 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} edge weights for a {}-vertex path",
            w.len(),
            n
        )));
    }
    let mut t = DMatrix::zeros(n, n);
    for i in 0..n {
        let left = if i > 0 { w[i - 1] } else { 0.0 };
        let right = if i + 1 < n { w[i] } else { 0.0 };
        t[(i, i)] = 1.0 - (left + right) / pi.get(i);
        if i + 1 < n {
            let off = w[i] / (pi.get(i) * pi.get(i + 1)).sqrt();
            t[(i, i + 1)] = off;
            t[(i + 1, i)] = off;
        }
    }
    let eigs = eigvals_symmetric(&t)?;
    Ok(slem_from_spectrum(&eigs))
}

/// Reduced chain pair of a symmetric tree with branching factors
/// `m = (m_0..m_{n-1})`, depth-indexed `pi` (length n+1) and depth-indexed
/// edge weights `q` (length n).
///
/// `p0` is the (n+1)x(n+1) symmetric block carrying the smallest eigenvalue
/// of the full tree chain; `p1` (first row/column removed) carries the second
/// largest. The full-tree SLEM is `max(lambda_max(p1), -lambda_min(p0))`.
#[derive(Debug, Clone)]
pub struct ReducedTree {
    pub p0: DMatrix<f64>,
    pub p1: DMatrix<f64>,
}

pub fn reduced_tree_chain(m: &[usize], pi: &[f64], q: &[f64]) -> Result<ReducedTree> {
    let depth = m.len();
    if pi.len() != depth + 1 || q.len() != depth {
        return Err(Error::DimensionMismatch(format!(
            "tree depth {depth} expects {} pi entries and {depth} weights, got {} and {}",
            depth + 1,
            pi.len(),
            q.len()
        )));
    }
    if depth == 0 || m[0] < 2 {
        return Err(Error::BadDescriptor("symmetric tree needs m_0 >= 2".into()));
    }
    let n = depth + 1;
    let mut p0 = DMatrix::identity(n, n);
    for i in 0..depth {
        let a = (m[i] as f64 / pi[i]).sqrt();
        let b = 1.0 / pi[i + 1].sqrt();
        // subtract q_i * u u^T with u = a e_i - b e_{i+1}
        p0[(i, i)] -= q[i] * a * a;
        p0[(i + 1, i + 1)] -= q[i] * b * b;
        p0[(i, i + 1)] += q[i] * a * b;
        p0[(i + 1, i)] += q[i] * a * b;
    }
    let p1 = p0.view((1, 1), (n - 1, n - 1)).into_owned();
    Ok(ReducedTree { p0, p1 })
}

/// SLEM carried by a [`ReducedTree`].
pub fn reduced_tree_slem(r: &ReducedTree) -> Result<f64> {
    let e0 = eigvals_symmetric(&r.p0)?;
    let e1 = eigvals_symmetric(&r.p1)?;
    Ok(e1[0].max(-e0[e0.len() - 1]))
}

/// Reduced chain pair of a complete-cored symmetric star with `m` branches,
/// depth-indexed `pi` (length n+1) and weights `q` (q[0] core, q[j] depth j).
///
/// `path` is the plain (n+1)-vertex path block (spectrum contains 1);
/// `looped` is the same block with an extra self-loop weight `m * q_0` on the
/// core vertex. The full-graph SLEM is carried by the extremes of `looped`.
#[derive(Debug, Clone)]
pub struct ReducedCcs {
    pub path: DMatrix<f64>,
    pub looped: DMatrix<f64>,
}

pub fn ccs_reduced_chain(m: usize, pi: &[f64], q: &[f64]) -> Result<ReducedCcs> {
    if m < 2 {
        return Err(Error::BadDescriptor("complete-cored star needs m >= 2".into()));
    }
    let n = pi.len();
    if n < 2 || q.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "ccs star expects depth-indexed pi (n+1) and weights q_0..q_n, got {} and {}",
            n,
            q.len()
        )));
    }
    let mut path = DMatrix::identity(n, n);
    for j in 1..n {
        let a = 1.0 / pi[j - 1].sqrt();
        let b = 1.0 / pi[j].sqrt();
        path[(j - 1, j - 1)] -= q[j] * a * a;
        path[(j, j)] -= q[j] * b * b;
        path[(j - 1, j)] += q[j] * a * b;
        path[(j, j - 1)] += q[j] * a * b;
    }
    let mut looped = path.clone();
    looped[(0, 0)] -= m as f64 * q[0] / pi[0];
    Ok(ReducedCcs { path, looped })
}

/// SLEM carried by a [`ReducedCcs`].
pub fn ccs_reduced_slem(r: &ReducedCcs) -> Result<f64> {
    let e = eigvals_symmetric(&r.looped)?;
    Ok(e[0].max(-e[e.len() - 1]))
}

/// Extreme eigenpairs of the symmetrized chain, used by optimality reports.
pub fn chain_spectrum(c: &Chain) -> Result<crate::eig::SymmetricEigen> {
    eig_symmetric(&symmetrized(c))
}
