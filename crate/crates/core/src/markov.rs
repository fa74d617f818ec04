//! Small dense Markov-chain toolkit.
//!
//! Everything here works on chains with at most a handful of states, so plain
//! row-major `Vec<f64>` storage and partial-pivot Gaussian elimination are
//! sufficient.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Row-sum tolerance for probability matrices.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Residual tolerance for `θ·P = θ`.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Elementwise tolerance for `(I − Q)·N = I`, relative to `|I − Q|·|N|`.
pub const FUNDAMENTAL_TOL: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::MalformedMatrix(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::MalformedMatrix("ragged rows".into()));
            }
            data.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `v·A` for a row vector `v`.
    pub fn vec_mul(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len(), "dimension mismatch");
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| v[i] * self[(i, j)]).sum())
            .collect()
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Solves `A·X = B` by Gaussian elimination with partial pivoting.
    /// Returns `None` when `A` is numerically singular.
    pub fn solve(&self, rhs: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(self.rows, rhs.rows, "dimension mismatch");
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.clone();
        let tiny = self.max_abs() * f64::EPSILON * n as f64;
        for col in 0..n {
            let pivot =
                (col..n).max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))?;
            if a[(pivot, col)].abs() <= tiny {
                return None;
            }
            a.swap_rows(col, pivot);
            b.swap_rows(col, pivot);
            for r in col + 1..n {
                let f = a[(r, col)] / a[(col, col)];
                if f == 0.0 {
                    continue;
                }
                for c in col..n {
                    a[(r, c)] -= f * a[(col, c)];
                }
                for c in 0..b.cols {
                    b[(r, c)] -= f * b[(col, c)];
                }
            }
        }
        let mut x = Matrix::zeros(n, b.cols);
        for c in 0..b.cols {
            for r in (0..n).rev() {
                let s: f64 = (r + 1..n).map(|k| a[(r, k)] * x[(k, c)]).sum();
                x[(r, c)] = (b[(r, c)] - s) / a[(r, r)];
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        self.solve(&Matrix::identity(self.rows))
    }

    /// Numerical rank by row reduction with a relative pivot tolerance.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let mut a = self.clone();
        let tol = self.max_abs() * rel_tol;
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let pivot = (rank..a.rows)
                .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
                .unwrap();
            if a[(pivot, col)].abs() <= tol {
                continue;
            }
            a.swap_rows(rank, pivot);
            for r in rank + 1..a.rows {
                let f = a[(r, col)] / a[(rank, col)];
                for c in col..a.cols {
                    a[(r, c)] -= f * a[(rank, c)];
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn check_probabilities(&self, what: &str) -> Result<()> {
        for (k, &p) in self.data.iter().enumerate() {
            if !(-ROW_SUM_TOL..=1.0 + ROW_SUM_TOL).contains(&p) {
                return Err(Error::MalformedMatrix(format!(
                    "{what} entry ({}, {}) = {p} is not a probability",
                    k / self.cols,
                    k % self.cols
                )));
            }
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

/// Absorbing chain in canonical form `[[Q, R], [0, I]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbingChain {
    transient: Matrix,
    absorbing: Matrix,
}

impl AbsorbingChain {
    pub fn new(transient: Matrix, absorbing: Matrix) -> Result<Self> {
        if transient.rows != transient.cols {
            return Err(Error::MalformedMatrix(
                "transient block must be square".into(),
            ));
        }
        if absorbing.rows != transient.rows || absorbing.cols == 0 {
            return Err(Error::MalformedMatrix(
                "absorption block has the wrong shape".into(),
            ));
        }
        transient.check_probabilities("Q")?;
        absorbing.check_probabilities("R")?;
        for i in 0..transient.rows {
            let s: f64 = transient.row(i).iter().chain(absorbing.row(i)).sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::MalformedMatrix(format!(
                    "row {i} of [Q | R] sums to {s}"
                )));
            }
        }
        Ok(AbsorbingChain {
            transient,
            absorbing,
        })
    }

    /// Convenience constructor for a single absorbing state.
    pub fn with_absorption_column(transient: Matrix, absorb: &[f64]) -> Result<Self> {
        let r = Matrix::new(absorb.len(), 1, absorb.to_vec())?;
        AbsorbingChain::new(transient, r)
    }

    pub fn transient(&self) -> &Matrix {
        &self.transient
    }

    pub fn absorbing(&self) -> &Matrix {
        &self.absorbing
    }

    pub fn num_transient(&self) -> usize {
        self.transient.rows
    }
}

/// Absorption-time statistics from the fundamental matrix.
///
/// Step counts include the starting state, so every entry of
/// `expected_steps` is at least 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionStats {
    /// `N = (I − Q)⁻¹`: expected visits to `j` starting from `i`.
    pub fundamental: Matrix,
    /// `v = N·1`.
    pub expected_steps: Vec<f64>,
    /// `φ = (2N − I)·v − v⊙v`.
    pub step_variance: Vec<f64>,
    /// `E{n²} = (2N − I)·v`, kept separately because `φ + v²` cancels badly
    /// when absorption is slow.
    pub second_moments: Vec<f64>,
}

impl AbsorptionStats {
    /// `E{n²}` from state `i`.
    pub fn second_moment(&self, i: usize) -> f64 {
        self.second_moments[i]
    }
}

pub fn absorption_stats(chain: &AbsorbingChain) -> Result<AbsorptionStats> {
    let k = chain.num_transient();
    let exit: Vec<f64> = (0..k)
        .map(|i| chain.absorbing.row(i).iter().sum())
        .collect();
    let n = fundamental_matrix(&chain.transient, &exit).ok_or(Error::NonAbsorbing)?;
    let mut i_minus_q = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            i_minus_q[(i, j)] = -chain.transient[(i, j)];
        }
        i_minus_q[(i, i)] = exit[i]
            + (0..k)
                .filter(|&j| j != i)
                .map(|j| chain.transient[(i, j)])
                .sum::<f64>();
    }
    let check = i_minus_q.mul(&n);
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            let e = check[(i, j)] - target;
            let scale: f64 = (0..k).map(|l| (i_minus_q[(i, l)] * n[(l, j)]).abs()).sum();
            if !(e.abs() <= FUNDAMENTAL_TOL * scale.max(1.0)) {
                return Err(Error::NonAbsorbing);
            }
        }
    }
    let ones = vec![1.0; k];
    let v = n.mul_vec(&ones);
    let nv = n.mul_vec(&v);
    let scale = v.iter().fold(1.0f64, |m, x| m.max(x * x));
    let second: Vec<f64> = (0..k).map(|i| 2.0 * nv[i] - v[i]).collect();
    let phi = (0..k)
        .map(|i| {
            let s = second[i] - v[i] * v[i];
            // Cancellation noise around zero for deterministic starts.
            if s < 0.0 && s > -1e-9 * scale {
                0.0
            } else {
                s
            }
        })
        .collect();
    Ok(AbsorptionStats {
        fundamental: n,
        expected_steps: v,
        step_variance: phi,
        second_moments: second,
    })
}

/// `(I − Q)⁻¹` by elimination without subtractions.
///
/// `I − Q` is an M-matrix whose row excess is the absorption mass, so every
/// pivot can be rebuilt as remaining off-diagonal mass plus exit mass and
/// both triangular solves only add nonnegative terms. `None` when a pivot
/// vanishes, i.e. some transient class is never left.
fn fundamental_matrix(q: &Matrix, exit: &[f64]) -> Option<Matrix> {
    let k = q.rows;
    let mut a = q.clone();
    let mut r = exit.to_vec();
    let mut piv = vec![0.0; k];
    for m in 0..k {
        piv[m] = r[m] + (m + 1..k).map(|j| a[(m, j)]).sum::<f64>();
        if !(piv[m] > 0.0) {
            return None;
        }
        for i in m + 1..k {
            let f = a[(i, m)] / piv[m];
            if f == 0.0 {
                continue;
            }
            for j in m + 1..k {
                if j != i {
                    a[(i, j)] += f * a[(m, j)];
                }
            }
            r[i] += f * r[m];
        }
    }
    let mut n = Matrix::zeros(k, k);
    let mut x = vec![0.0; k];
    for col in 0..k {
        for i in 0..k {
            let b = if i == col { 1.0 } else { 0.0 };
            x[i] = b + (0..i).map(|m| a[(i, m)] / piv[m] * x[m]).sum::<f64>();
        }
        for i in (0..k).rev() {
            x[i] = (x[i] + (i + 1..k).map(|j| a[(i, j)] * x[j]).sum::<f64>()) / piv[i];
        }
        for i in 0..k {
            n[(i, col)] = x[i];
        }
    }
    Some(n)
}

/// Row-stochastic square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix(Matrix);

impl StochasticMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows != m.cols || m.rows == 0 {
            return Err(Error::MalformedMatrix(
                "stochastic matrix must be square and nonempty".into(),
            ));
        }
        m.check_probabilities("P")?;
        for i in 0..m.rows {
            let s: f64 = m.row(i).iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::MalformedMatrix(format!("row {i} sums to {s}")));
            }
        }
        Ok(StochasticMatrix(m))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        StochasticMatrix::new(Matrix::from_rows(rows)?)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.rows
    }

    pub fn is_empty(&self) -> bool {
        self.0.rows == 0
    }
}

/// Unique `θ` with `θ·P = θ`, `Σθ = 1`.
///
/// A rank check on `Pᵀ − I` rejects inputs whose stationary vector is not
/// unique. The solve uses Grassmann–Taksar–Heyman state reduction, which
/// needs no subtractions and so keeps tiny stationary masses accurate; chains
/// where reduction stalls on an unreachable state fall back to a linear solve
/// with one balance equation replaced by the normalization row.
pub fn stationary_distribution(m: &StochasticMatrix) -> Result<Vec<f64>> {
    let n = m.len();
    let mut a = m.0.transpose();
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }
    // Full rank only arises from rounding on nearly decomposable chains.
    if a.rank(1e-10) < n - 1 {
        return Err(Error::AmbiguousStationary);
    }
    let mut theta = match state_reduction(&m.0) {
        Some(t) => t,
        None => {
            for j in 0..n {
                a[(n - 1, j)] = 1.0;
            }
            let mut rhs = Matrix::zeros(n, 1);
            rhs[(n - 1, 0)] = 1.0;
            let x = a.solve(&rhs).ok_or(Error::AmbiguousStationary)?;
            (0..n).map(|i| x[(i, 0)].max(0.0)).collect()
        }
    };
    let total: f64 = theta.iter().sum();
    theta.iter_mut().for_each(|t| *t /= total);

    let back = m.0.vec_mul(&theta);
    let residual = back
        .iter()
        .zip(&theta)
        .fold(0.0f64, |r, (a, b)| r.max((a - b).abs()));
    if !(residual <= STATIONARY_TOL) {
        return Err(Error::AmbiguousStationary);
    }
    Ok(theta)
}

/// Unnormalized GTH solution, or `None` when some state cannot reach the
/// states eliminated after it.
fn state_reduction(p: &Matrix) -> Option<Vec<f64>> {
    let n = p.rows;
    let mut a = p.clone();
    for k in (1..n).rev() {
        let s: f64 = (0..k).map(|j| a[(k, j)]).sum();
        if !(s > 0.0) {
            return None;
        }
        for i in 0..k {
            a[(i, k)] /= s;
        }
        for i in 0..k {
            let f = a[(i, k)];
            if f != 0.0 {
                for j in 0..k {
                    a[(i, j)] += f * a[(k, j)];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    x[0] = 1.0;
    for k in 1..n {
        x[k] = (0..k).map(|i| x[i] * a[(i, k)]).sum();
    }
    Some(x)
}

/// Real roots of `a·x² + b·x + c = 0` in ascending order (repeated roots are
/// reported once). Falls back to the linear root when `a = 0`.
pub fn quadratic_real_roots(a: f64, b: f64, c: f64) -> Result<Vec<f64>> {
    if a == 0.0 && b == 0.0 {
        return Err(Error::DegenerateEquation);
    }
    if a == 0.0 {
        return Ok(vec![-c / b]);
    }
    let mut disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        // Treat rounding-level negatives as a double root.
        if disc > -8.0 * f64::EPSILON * (b * b).max((4.0 * a * c).abs()) {
            disc = 0.0;
        } else {
            return Ok(Vec::new());
        }
    }
    // q = −(b + sign(b)·√disc)/2 avoids subtracting nearly equal numbers.
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = if q == 0.0 {
        vec![0.0]
    } else {
        vec![q / a, c / q]
    };
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tdma_rt_chain(q: f64, p: f64) -> AbsorbingChain {
        let t = Matrix::from_rows(&[[0.0, q, 1.0 - q], [0.0, q, 1.0 - q], [0.0, 0.0, 1.0 - p]])
            .unwrap();
        AbsorbingChain::with_absorption_column(t, &[0.0, 0.0, p]).unwrap()
    }

    #[test]
    fn tdma_rt_expected_steps_closed_form() {
        let (lambda, mt, p): (f64, f64, f64) = (0.1, 24.0, 0.6);
        let q = (-lambda * mt).exp();
        let stats = absorption_stats(&tdma_rt_chain(q, p)).unwrap();
        let head = (1.0 + p - q) / ((1.0 - q) * p);
        assert_relative_eq!(stats.expected_steps[0], head, max_relative = 1e-12);
        assert_relative_eq!(stats.expected_steps[1], head, max_relative = 1e-12);
        assert_relative_eq!(stats.expected_steps[2], 1.0 / p, max_relative = 1e-12);
        assert_relative_eq!(
            stats.step_variance[2],
            (1.0 - p) / (p * p),
            max_relative = 1e-12
        );
    }

    #[test]
    fn immediate_absorption() {
        let chain =
            AbsorbingChain::with_absorption_column(Matrix::from_rows(&[[0.0]]).unwrap(), &[1.0])
                .unwrap();
        let stats = absorption_stats(&chain).unwrap();
        assert_eq!(stats.expected_steps, vec![1.0]);
        assert_eq!(stats.step_variance, vec![0.0]);
    }

    #[test]
    fn closed_transient_class_is_rejected() {
        let t = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let chain = AbsorbingChain::with_absorption_column(t, &[0.0, 0.0]).unwrap();
        assert_eq!(absorption_stats(&chain), Err(Error::NonAbsorbing));
    }

    #[test]
    fn chain_validation() {
        let t = Matrix::from_rows(&[[0.5, 0.4]]).unwrap();
        assert!(AbsorbingChain::with_absorption_column(t, &[0.1]).is_err());
        let t = Matrix::from_rows(&[[0.5]]).unwrap();
        assert!(AbsorbingChain::with_absorption_column(t.clone(), &[0.4]).is_err());
        assert!(AbsorbingChain::with_absorption_column(
            Matrix::from_rows(&[[1.2]]).unwrap(),
            &[-0.2]
        )
        .is_err());
        assert!(StochasticMatrix::from_rows(&[[0.5, 0.6], [0.5, 0.5]]).is_err());
    }

    /// Walks a chain from `start` and returns the number of states visited
    /// before absorption, counting the start.
    fn walk_length(chain: &AbsorbingChain, start: usize, rng: &mut impl Rng) -> u64 {
        let q = chain.transient();
        let k = chain.num_transient();
        let mut state = start;
        let mut steps = 1;
        loop {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut next = None;
            for j in 0..k {
                acc += q[(state, j)];
                if u < acc {
                    next = Some(j);
                    break;
                }
            }
            match next {
                Some(j) => {
                    state = j;
                    steps += 1;
                }
                None => return steps,
            }
        }
    }

    #[test]
    fn random_chain_matches_walk_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let t =
            Matrix::from_rows(&[[0.2, 0.3, 0.1], [0.25, 0.25, 0.3], [0.05, 0.5, 0.15]]).unwrap();
        let chain = AbsorbingChain::with_absorption_column(t, &[0.4, 0.2, 0.3]).unwrap();
        let stats = absorption_stats(&chain).unwrap();
        let walks = 1_000_000u64;
        for start in 0..3 {
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..walks {
                let n = walk_length(&chain, start, &mut rng) as f64;
                s1 += n;
                s2 += n * n;
            }
            let mean = s1 / walks as f64;
            let var = s2 / walks as f64 - mean * mean;
            let se_mean = (stats.step_variance[start] / walks as f64).sqrt();
            assert!(
                (mean - stats.expected_steps[start]).abs() <= 3.0 * se_mean,
                "start {start}: mean {mean} vs {}",
                stats.expected_steps[start]
            );
            // Var of the sample variance ≈ (μ4 − σ⁴)/n; bound μ4 from the walk itself.
            let fourth = {
                let mut m4 = 0.0;
                let mut rng2 = ChaCha8Rng::seed_from_u64(99 + start as u64);
                for _ in 0..200_000 {
                    let d = walk_length(&chain, start, &mut rng2) as f64 - mean;
                    m4 += d.powi(4);
                }
                m4 / 200_000.0
            };
            let se_var = ((fourth - var * var) / walks as f64).sqrt();
            assert!(
                (var - stats.step_variance[start]).abs() <= 3.0 * se_var,
                "start {start}: var {var} vs {}",
                stats.step_variance[start]
            );
        }
    }

    #[test]
    fn two_state_stationary() {
        let (a, b) = (0.3, 0.05);
        let m = StochasticMatrix::from_rows(&[[1.0 - a, a], [b, 1.0 - b]]).unwrap();
        let theta = stationary_distribution(&m).unwrap();
        assert_relative_eq!(theta[0], b / (a + b), max_relative = 1e-13);
        assert_relative_eq!(theta[1], a / (a + b), max_relative = 1e-13);
    }

    #[test]
    fn identity_is_ambiguous() {
        let m = StochasticMatrix::new(Matrix::identity(3)).unwrap();
        assert_eq!(stationary_distribution(&m), Err(Error::AmbiguousStationary));
    }

    #[test]
    fn six_state_slot_chain_matches_gamma_closed_form() {
        let (lambda, mt, pmm, pmp): (f64, f64, f64, f64) = (0.1, 24.0, 0.5, 0.5);
        let x = (-lambda * mt / 2.0).exp();
        let o = 1.0 - x;
        let rows = [
            [0.0, 0.0, 0.0, o * pmp, x, o * (1.0 - pmp)],
            [0.0, 0.0, 0.0, o * pmp, x, o * (1.0 - pmp)],
            [0.0, 0.0, 0.0, pmp, 0.0, 1.0 - pmp],
            [o * pmm, x, o * (1.0 - pmm), 0.0, 0.0, 0.0],
            [o * pmm, x, o * (1.0 - pmm), 0.0, 0.0, 0.0],
            [pmm, 0.0, 1.0 - pmm, 0.0, 0.0, 0.0],
        ];
        let theta = stationary_distribution(&StochasticMatrix::from_rows(&rows).unwrap()).unwrap();
        let h = (lambda * mt / 2.0).exp();
        let den = 2.0 * (pmm + pmp + (lambda * mt).exp() - pmm * pmp - 1.0);
        let gamma1 = pmm * (h - 1.0) * (h - pmp + 1.0) / den;
        assert_relative_eq!(theta[0], gamma1, max_relative = 1e-12);
        // Pinned value for this configuration.
        assert_relative_eq!(theta[0], 0.205_675_597, max_relative = 1e-8);
    }

    #[test]
    fn quadratic_examples() {
        assert_eq!(
            quadratic_real_roots(1.0, 0.0, -1.0).unwrap(),
            vec![-1.0, 1.0]
        );
        assert_eq!(quadratic_real_roots(0.0, 2.0, -1.0).unwrap(), vec![0.5]);
        assert_eq!(
            quadratic_real_roots(0.0, 0.0, 1.0),
            Err(Error::DegenerateEquation)
        );
        assert!(quadratic_real_roots(1.0, 0.0, 1.0).unwrap().is_empty());
        assert_eq!(quadratic_real_roots(1.0, -2.0, 1.0).unwrap(), vec![1.0]);
        let (a, b, c) = (1.0, -1e8, 1.0);
        let roots = quadratic_real_roots(a, b, c).unwrap();
        assert_eq!(roots.len(), 2);
        for x in roots {
            assert!(
                (a * x * x + b * x + c).abs() <= 1e-6 * (b * x).abs(),
                "root {x}"
            );
        }
    }

    proptest! {
        #[test]
        fn quadratic_residual(a in -1e3f64..1e3, b in -1e3f64..1e3, c in -1e3f64..1e3) {
            prop_assume!(a.abs() > 1e-6);
            let disc = b * b - 4.0 * a * c;
            prop_assume!(disc.abs() >= 1e-8 * b * b && disc > 0.0);
            let roots = quadratic_real_roots(a, b, c).unwrap();
            prop_assert_eq!(roots.len(), 2);
            prop_assert!(roots[0] <= roots[1]);
            for x in roots {
                let scale = (a * x * x).abs() + (b * x).abs() + c.abs();
                prop_assert!((a * x * x + b * x + c).abs() <= 1e-9 * scale);
            }
        }

        #[test]
        fn absorption_invariants(raw in proptest::collection::vec(0.0f64..1.0, 12)) {
            // 3 transient states + 1 absorbing, each row normalized with some absorption mass.
            let mut q = Matrix::zeros(3, 3);
            let mut r = vec![0.0; 3];
            for i in 0..3 {
                let w = &raw[i * 4..i * 4 + 4];
                let total: f64 = w.iter().sum::<f64>() + 1e-3;
                for j in 0..3 {
                    q[(i, j)] = w[j] / total;
                }
                r[i] = 1.0 - (0..3).map(|j| q[(i, j)]).sum::<f64>();
            }
            let chain = AbsorbingChain::with_absorption_column(q, &r).unwrap();
            let stats = absorption_stats(&chain).unwrap();
            for i in 0..3 {
                prop_assert!(stats.expected_steps[i] >= 1.0 - 1e-12);
                prop_assert!(stats.step_variance[i] >= 0.0);
                for j in 0..3 {
                    prop_assert!(stats.fundamental[(i, j)] >= -1e-12);
                }
            }
        }

        #[test]
        fn stationary_is_fixed_point(raw in proptest::collection::vec(0.01f64..1.0, 16)) {
            let mut rows = vec![vec![0.0; 4]; 4];
            for i in 0..4 {
                let s: f64 = raw[i * 4..i * 4 + 4].iter().sum();
                for j in 0..4 {
                    rows[i][j] = raw[i * 4 + j] / s;
                }
                // Force an exact unit row sum.
                let head: f64 = rows[i][..3].iter().sum();
                rows[i][3] = 1.0 - head;
            }
            let m = StochasticMatrix::from_rows(&rows).unwrap();
            let theta = stationary_distribution(&m).unwrap();
            let back = m.matrix().vec_mul(&theta);
            prop_assert!((theta.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (a, b) in back.iter().zip(&theta) {
                prop_assert!((a - b).abs() <= STATIONARY_TOL);
                prop_assert!(*b >= 0.0);
            }
        }
    }
}
