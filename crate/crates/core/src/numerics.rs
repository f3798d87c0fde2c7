//! Continuous t-norms, the comparison tolerance policy, and the small dense
//! linear-algebra kernel (symmetric eigendecomposition, PSD square root,
//! operator-norm estimation) backing the characterization transforms.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A continuous t-norm on `[0,1]`: associative, commutative, monotone in each
/// argument, with unit 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TNorm {
    /// `a*b = ab`
    Product,
    /// `a*b = min(a,b)`
    Minimum,
    /// `a*b = max(a+b-1, 0)`; has zero divisors, so spaces reject it.
    Lukasiewicz,
}

impl TNorm {
    /// Whether there exist `a,b != 0` with `a*b = 0`.  Spaces are only built
    /// over t-norms without zero divisors; this is what excludes Lukasiewicz.
    pub fn has_zero_divisors(self) -> bool {
        matches!(self, TNorm::Lukasiewicz)
    }

    pub fn name(self) -> &'static str {
        match self {
            TNorm::Product => "product",
            TNorm::Minimum => "minimum",
            TNorm::Lukasiewicz => "lukasiewicz",
        }
    }
}

/// `tn(a, b)` for `a, b` in `[0,1]`.
pub fn tnorm_apply(tn: TNorm, a: f64, b: f64) -> Result<f64> {
    check_unit_interval(a)?;
    check_unit_interval(b)?;
    let a = a.clamp(0.0, 1.0);
    let b = b.clamp(0.0, 1.0);
    Ok(apply_unchecked(tn, a, b))
}

fn apply_unchecked(tn: TNorm, a: f64, b: f64) -> f64 {
    match tn {
        TNorm::Product => a * b,
        TNorm::Minimum => a.min(b),
        TNorm::Lukasiewicz => (a + b - 1.0).max(0.0),
    }
}

/// `a^{*(m)}`: the m-fold iterated t-norm power of `a`.
pub fn tnorm_power(tn: TNorm, a: f64, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("tnorm_power requires m >= 1".into()));
    }
    check_unit_interval(a)?;
    let a = a.clamp(0.0, 1.0);
    match tn {
        TNorm::Minimum => Ok(a),
        TNorm::Product => Ok(a.powi(m as i32)),
        TNorm::Lukasiewicz => Ok((1.0 - m as f64 * (1.0 - a)).max(0.0)),
    }
}

fn check_unit_interval(a: f64) -> Result<()> {
    let tau = Tolerance::default().tau;
    if !(a.is_finite() && a >= -tau && a <= 1.0 + tau) {
        return Err(Error::Domain(format!("value {a} outside [0,1]")));
    }
    Ok(())
}

/// Comparison policy: `tau` for approximate equality, `margin` for certifying
/// strict inequalities.  A strict claim that holds by less than `margin` is
/// reported as a boundary failure rather than guessed either way.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub tau: f64,
    pub margin: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            tau: 1e-9,
            margin: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(tau: f64, margin: f64) -> Result<Self> {
        if !(tau.is_finite() && margin.is_finite() && tau >= margin && margin >= 0.0) {
            return Err(Error::Domain(format!(
                "tolerance requires tau >= margin >= 0, got tau={tau}, margin={margin}"
            )));
        }
        Ok(Tolerance { tau, margin })
    }

    pub fn approx_eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.tau
    }

    /// Certify the strict inequality `lhs < rhs`.
    pub fn certify_lt(&self, lhs: f64, rhs: f64) -> Outcome {
        let gap = rhs - lhs;
        if gap > self.margin {
            Outcome::Pass
        } else if gap > 0.0 {
            Outcome::Boundary
        } else {
            Outcome::Fail
        }
    }
}

/// Verdict of a margin-certified strict inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    /// The inequality holds, but by less than the certification margin.
    Boundary,
    Fail,
}

impl Outcome {
    pub fn passed(self) -> bool {
        self == Outcome::Pass
    }
}

/// Dense real symmetric matrix.  Storage is the full square, but the
/// constructor and every setter keep `a[i][j] == a[j][i]` exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.data[i * d.len() + i] = v;
        }
        m
    }

    /// Build from row-major data, symmetrizing by averaging the two halves.
    /// Rejects input whose asymmetry exceeds `tau`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let tau = Tolerance::default().tau;
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Structural(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let a = rows[i][j];
                let b = rows[j][i];
                if (a - b).abs() > tau * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::Structural(format!(
                        "matrix not symmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
                m.data[i * n + j] = 0.5 * (a + b);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Max absolute row sum; an upper bound on the spectral norm.
    pub fn row_sum_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            out[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn matmul(&self, other: &SymMatrix) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        SymMatrix { n: self.n, data }
    }
}

/// Result of a symmetric eigendecomposition `A = V diag(lambda) V^T`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues, sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns: `vectors[j]` is the column for
    /// `eigenvalues[j]`.
    pub vectors: Vec<Vec<f64>>,
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Contract: `||A - V L V^T||_F <= 1e-10 * max(1, ||A||_F)` and
/// `||V^T V - I||_F <= 1e-10`.
pub fn sym_eig(a: &SymMatrix, _tol: Tolerance) -> Result<EigenDecomposition> {
    let n = a.dim();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![],
            vectors: vec![],
        });
    }
    let mut m = a.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = a.frobenius_norm().max(1.0);
    let stop = 1e-15 * scale;

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    s += m[p * n + q] * m[p * n + q];
                }
            }
            (2.0 * s).sqrt()
        };
        if off <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                // rotation annihilating (p,q), Numerical Recipes style
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e10 {
                    1.0 / (2.0 * theta)
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        // one last check against the contract tolerance before giving up
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        let off = (2.0 * off).sqrt();
        if off > 1e-11 * scale {
            return Err(Error::NoConvergence {
                iterations: JACOBI_MAX_SWEEPS,
                residual: off,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].partial_cmp(&m[i * n + i]).unwrap());
    let eigenvalues = order.iter().map(|&j| m[j * n + j]).collect();
    let vectors = order
        .iter()
        .map(|&j| (0..n).map(|k| v[k * n + j]).collect())
        .collect();
    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
    })
}

/// The unique PSD square root `B` of a PSD matrix, with
/// `||B^2 - A|| <= 1e-8 * max(1, ||A||)`.
///
/// Eigenvalues in `[-1e-8 * ||A||, 0)` are clamped to zero; anything below
/// that band signals a non-PSD kernel upstream and is rejected.
pub fn psd_sqrt(a: &SymMatrix, tol: Tolerance) -> Result<SymMatrix> {
    let n = a.dim();
    let eig = sym_eig(a, tol)?;
    let norm = eig
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .fold(0.0f64, f64::max);
    let threshold = -1e-8 * norm.max(1.0);
    if let Some(&min_eig) = eig
        .eigenvalues
        .iter()
        .min_by(|a, b| a.partial_cmp(b).unwrap())
    {
        if min_eig < threshold {
            return Err(Error::NotPsd { min_eig, threshold });
        }
    }
    let mut b = SymMatrix::zeros(n);
    for (lambda, col) in eig.eigenvalues.iter().zip(&eig.vectors) {
        let s = lambda.max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in i..n {
                let v = b.get(i, j) + s * col[i] * col[j];
                b.set(i, j, v);
            }
        }
    }
    Ok(b)
}

/// Upper estimate of the spectral norm via power iteration, clipped from
/// above by the row-sum bound.  For symmetric input the estimate is within
/// `1e-8` of the true norm.
pub fn op_norm_upper(a: &SymMatrix) -> f64 {
    let n = a.dim();
    if n == 0 {
        return 0.0;
    }
    let row_bound = a.row_sum_norm();
    if row_bound == 0.0 {
        return 0.0;
    }
    // deterministic start vector with all coordinates active
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i as f64 * 0.7390851332151607).sin()))
        .collect();
    let norm0 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm0);
    let mut y = vec![0.0; n];
    let mut est = 0.0f64;
    for _ in 0..2000 {
        a.matvec(&x, &mut y);
        // A^2 power iteration keeps the estimate monotone for indefinite input
        a.matvec(&y.clone(), &mut y);
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ny == 0.0 {
            return 0.0;
        }
        let new_est = ny.sqrt();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
        if (new_est - est).abs() <= 1e-12 * new_est.max(1.0) {
            est = new_est;
            break;
        }
        est = new_est;
    }
    // accept the estimate only with a certified residual: for symmetric
    // input some eigenvalue of A^2 lies within ||A^2 x - est^2 x|| of est^2
    let nu = est * est;
    a.matvec(&x, &mut y);
    let mut z = vec![0.0; n];
    a.matvec(&y, &mut z);
    let resid = z
        .iter()
        .zip(&x)
        .map(|(zi, xi)| (zi - nu * xi).powi(2))
        .sum::<f64>()
        .sqrt();
    if resid <= 1e-9 * nu.max(1.0) {
        return (est * (1.0 + 1e-9) + 1e-12).min(row_bound);
    }
    // clustered top eigenvalues stall the iteration; fall back on the full
    // decomposition
    match sym_eig(a, Tolerance::default()) {
        Ok(eig) => {
            let top = eig
                .eigenvalues
                .iter()
                .fold(0.0f64, |acc, &l| acc.max(l.abs()));
            (top * (1.0 + 1e-9) + 1e-10 * a.frobenius_norm().max(1.0)).min(row_bound)
        }
        Err(_) => row_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn tnorm_formulas() {
        assert_eq!(tnorm_apply(TNorm::Product, 0.5, 0.4).unwrap(), 0.2);
        assert_eq!(tnorm_apply(TNorm::Minimum, 0.7, 1.0).unwrap(), 0.7);
        assert_eq!(tnorm_apply(TNorm::Lukasiewicz, 0.5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn tnorm_powers() {
        assert_eq!(tnorm_power(TNorm::Minimum, 0.7, 5).unwrap(), 0.7);
        assert_eq!(tnorm_power(TNorm::Product, 0.5, 3).unwrap(), 0.125);
        assert_eq!(tnorm_power(TNorm::Product, 1.0, 9).unwrap(), 1.0);
    }

    #[test]
    fn tnorm_zero_divisors() {
        assert!(!TNorm::Product.has_zero_divisors());
        assert!(!TNorm::Minimum.has_zero_divisors());
        assert!(TNorm::Lukasiewicz.has_zero_divisors());
    }

    #[test]
    fn tnorm_domain_errors() {
        assert!(tnorm_apply(TNorm::Product, -0.5, 0.5).is_err());
        assert!(tnorm_apply(TNorm::Product, 0.5, 1.5).is_err());
        assert!(tnorm_power(TNorm::Product, 0.5, 0).is_err());
    }

    #[test]
    fn tnorm_axioms_on_grid() {
        // associativity, commutativity, monotonicity, unit -- exact on a grid
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        for &tn in &[TNorm::Product, TNorm::Minimum, TNorm::Lukasiewicz] {
            for &a in &grid {
                assert!((tnorm_apply(tn, a, 1.0).unwrap() - a).abs() < 1e-15);
                for &b in &grid {
                    let ab = tnorm_apply(tn, a, b).unwrap();
                    assert_eq!(ab, tnorm_apply(tn, b, a).unwrap());
                    for &c in &grid {
                        let left = tnorm_apply(tn, ab, c).unwrap();
                        let right = tnorm_apply(tn, a, tnorm_apply(tn, b, c).unwrap()).unwrap();
                        assert!((left - right).abs() < 1e-15);
                        if a <= c {
                            assert!(ab <= tnorm_apply(tn, c, b).unwrap() + 1e-15);
                        }
                    }
                }
            }
        }
    }

    fn random_sym(n: usize, rng: &mut StdRng) -> SymMatrix {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        m
    }

    fn reconstruct(eig: &EigenDecomposition, n: usize) -> SymMatrix {
        let mut m = SymMatrix::zeros(n);
        for (lambda, col) in eig.eigenvalues.iter().zip(&eig.vectors) {
            for i in 0..n {
                for j in i..n {
                    let v = m.get(i, j) + lambda * col[i] * col[j];
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    #[test]
    fn sym_eig_identity() {
        let eig = sym_eig(&SymMatrix::identity(3), Tolerance::default()).unwrap();
        for v in &eig.eigenvalues {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sym_eig_diagonal() {
        let eig = sym_eig(&SymMatrix::diagonal(&[2.0, 0.0]), Tolerance::default()).unwrap();
        assert!((eig.eigenvalues[0] - 2.0).abs() < 1e-14);
        assert!(eig.eigenvalues[1].abs() < 1e-14);
        assert!((eig.vectors[0][0].abs() - 1.0).abs() < 1e-14);
        assert!(eig.vectors[0][1].abs() < 1e-14);
    }

    #[test]
    fn sym_eig_reconstruction_residual() {
        let mut rng = StdRng::seed_from_u64(7);
        let a = random_sym(8, &mut rng);
        let eig = sym_eig(&a, Tolerance::default()).unwrap();
        let resid = a.sub(&reconstruct(&eig, 8)).frobenius_norm();
        assert!(resid <= 1e-10 * a.frobenius_norm().max(1.0), "residual {resid}");
        // orthonormality
        for i in 0..8 {
            for j in 0..8 {
                let dot: f64 = eig.vectors[i]
                    .iter()
                    .zip(&eig.vectors[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn psd_sqrt_identity_and_diagonal() {
        let b = psd_sqrt(&SymMatrix::identity(4), Tolerance::default()).unwrap();
        assert!(b.sub(&SymMatrix::identity(4)).frobenius_norm() < 1e-12);
        let b = psd_sqrt(&SymMatrix::diagonal(&[4.0, 9.0]), Tolerance::default()).unwrap();
        assert!((b.get(0, 0) - 2.0).abs() < 1e-12);
        assert!((b.get(1, 1) - 3.0).abs() < 1e-12);
        assert!(b.get(0, 1).abs() < 1e-12);
    }

    #[test]
    fn psd_sqrt_gram_matrix() {
        let mut rng = StdRng::seed_from_u64(11);
        // Gram matrix of random unit vectors is PSD
        let n = 6;
        let vecs: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| x / norm).collect()
            })
            .collect();
        let mut a = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let dot = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
                a.set(i, j, dot);
            }
        }
        let b = psd_sqrt(&a, Tolerance::default()).unwrap();
        let b2 = SymMatrix::from_rows(
            &b.matmul(&b)
                .chunks(n)
                .map(|c| c.to_vec())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let resid = b2.sub(&a).frobenius_norm();
        assert!(resid <= 1e-8 * a.frobenius_norm().max(1.0), "residual {resid}");
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let mut a = SymMatrix::identity(2);
        a.set(0, 1, 2.0); // eigenvalues 3, -1
        assert!(matches!(
            psd_sqrt(&a, Tolerance::default()),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn op_norm_basics() {
        assert!((op_norm_upper(&SymMatrix::identity(5)) - 1.0).abs() < 1e-8);
        assert_eq!(op_norm_upper(&SymMatrix::zeros(4)), 0.0);
    }

    #[test]
    fn op_norm_matches_eigenvalue() {
        let mut rng = StdRng::seed_from_u64(3);
        let raw = random_sym(16, &mut rng);
        // square it to get a PSD matrix
        let rows: Vec<Vec<f64>> = raw.matmul(&raw).chunks(16).map(|c| c.to_vec()).collect();
        let a = SymMatrix::from_rows(&rows).unwrap();
        let eig = sym_eig(&a, Tolerance::default()).unwrap();
        let lambda_max = eig.eigenvalues[0];
        let est = op_norm_upper(&a);
        assert!((est - lambda_max).abs() < 1e-6, "est {est}, lambda {lambda_max}");
        assert!(est >= lambda_max - 1e-8);
        assert!(est <= a.row_sum_norm() + 1e-12);
    }

    #[test]
    fn certify_lt_margins() {
        let tol = Tolerance::default();
        assert_eq!(tol.certify_lt(0.1, 0.5), Outcome::Pass);
        assert_eq!(tol.certify_lt(0.5, 0.5), Outcome::Fail);
        assert_eq!(tol.certify_lt(0.6, 0.5), Outcome::Fail);
        assert_eq!(tol.certify_lt(0.5, 0.5 + 1e-13), Outcome::Boundary);
    }
}
