//! The six-way transform pipeline between Property A witnesses, normalized
//! l1 and l2 fields, positive-definite kernels, and finite-propagation
//! operators, with every certificate inequality re-verified by direct
//! recomputation.

use serde::{Deserialize, Serialize};

use crate::fuzzy_space::FuzzySpace;
use crate::numerics::{op_norm_upper, psd_sqrt, sym_eig, SymMatrix};
use crate::property_a::{verify_witness, ParamTuple, WitnessCertificate, WitnessFamily};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub r: f64,
    pub t: f64,
}

/// Per point, a vector over `X` with unit l1 mass.
#[derive(Debug, Clone)]
pub struct L1Field {
    pub vectors: Vec<Vec<f64>>,
}

/// Per point, a unit l2 vector supported inside `B(x, window.r, window.t)`.
#[derive(Debug, Clone)]
pub struct L2Field {
    pub vectors: Vec<Vec<f64>>,
    pub window: Window,
}

/// Symmetric kernel vanishing outside its propagation window.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub k: SymMatrix,
    pub window: Window,
}

/// Operator matrix with entries vanishing outside the window.
#[derive(Debug, Clone)]
pub struct PropagatedOperator {
    pub matrix: SymMatrix,
    pub window: Window,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepCert {
    pub step: String,
    pub eps: f64,
    /// worst value observed by direct recomputation
    pub measured: f64,
    /// bound the measurement must stay under
    pub bound: f64,
    pub pass: bool,
}

fn l1_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn l1_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn l2_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unordered_close_pairs(space: &FuzzySpace, r: f64, t: f64) -> Vec<(usize, usize)> {
    space
        .close_pairs(r, t)
        .into_iter()
        .filter(|&(x, y)| x < y)
        .collect()
}

/// Tightest `(r, t_max)` window containing every vector's support.
fn support_window(space: &FuzzySpace, vectors: &[Vec<f64>]) -> Result<Window> {
    let t = space.t_max();
    let tau = space.tolerance().tau;
    let mut min_m = 1.0f64;
    for (x, v) in vectors.iter().enumerate() {
        for (y, &e) in v.iter().enumerate() {
            if e.abs() > tau {
                min_m = min_m.min(space.eval(x, y, t)?);
            }
        }
    }
    Ok(Window {
        r: 1.0 - min_m * (1.0 - space.tolerance().margin),
        t,
    })
}

/// (i) to (ii): level counts normalized to unit l1 mass.  Requires the
/// witness to verify at half the stated eps; close pairs then stay within
/// eps in l1.
pub fn witness_to_l1(
    space: &FuzzySpace,
    w: &WitnessFamily,
    p: ParamTuple,
) -> Result<(L1Field, StepCert)> {
    let pre = verify_witness(space, w, ParamTuple::new(p.eps / 2.0, p.r, p.t)?)?;
    if !pre.pass {
        return Err(Error::Rejected(format!(
            "witness does not verify at eps/2 = {}; worst ratio {}",
            p.eps / 2.0,
            pre.worst_ratio
        )));
    }
    let n = space.len();
    let mut vectors = Vec::with_capacity(n);
    for x in 0..n {
        let mut zeta = vec![0.0f64; n];
        for &(z, _) in w.set(x) {
            zeta[z] += 1.0;
        }
        let norm = l1_norm(&zeta);
        for e in &mut zeta {
            *e /= norm;
        }
        vectors.push(zeta);
    }
    let mut measured = 0.0f64;
    for (x, y) in unordered_close_pairs(space, p.r, p.t) {
        let d = l1_dist(&vectors[x], &vectors[y]);
        // the proof's intermediate bound 2|delta|/|A_y| dominates the l1 gap
        let chain = 2.0 * w.symmetric_difference_card(x, y) as f64 / w.card(y) as f64;
        if d > chain + space.tolerance().tau {
            return Err(Error::Rejected(format!(
                "l1 distance {d} exceeds the chain bound {chain} on a close pair"
            )));
        }
        measured = measured.max(d);
    }
    let pass = measured < p.eps;
    Ok((
        L1Field { vectors },
        StepCert {
            step: "witness_to_l1".into(),
            eps: p.eps,
            measured,
            bound: p.eps,
            pass,
        },
    ))
}

/// (ii) to (iii): entrywise square roots of the absolute values.  Input
/// close pairs must sit within eps^2 in l1; output pairs stay within eps in
/// l2 since the l2 gap is bounded by the root of the l1 gap.
pub fn l1_to_l2(space: &FuzzySpace, field: &L1Field, p: ParamTuple) -> Result<(L2Field, StepCert)> {
    let tau = space.tolerance().tau;
    let pairs = unordered_close_pairs(space, p.r, p.t);
    let mut worst_l1 = 0.0f64;
    for &(x, y) in &pairs {
        worst_l1 = worst_l1.max(l1_dist(&field.vectors[x], &field.vectors[y]));
    }
    if !(worst_l1 < p.eps * p.eps) {
        return Err(Error::Rejected(format!(
            "l1 field gap {worst_l1} is not below eps^2 = {}",
            p.eps * p.eps
        )));
    }
    let vectors: Vec<Vec<f64>> = field
        .vectors
        .iter()
        .map(|v| v.iter().map(|e| e.abs().sqrt()).collect())
        .collect();
    for v in &vectors {
        let n = l2_norm(v);
        if (n - 1.0).abs() > tau {
            return Err(Error::Rejected(format!("l2 norm {n} drifted from 1")));
        }
    }
    let mut measured = 0.0f64;
    for &(x, y) in &pairs {
        let d2 = l2_dist(&vectors[x], &vectors[y]);
        let d1 = l1_dist(&field.vectors[x], &field.vectors[y]);
        if d2 * d2 > d1 + tau {
            return Err(Error::Rejected(format!(
                "l2 gap {d2} exceeds the root of the l1 gap {d1}"
            )));
        }
        measured = measured.max(d2);
    }
    let window = support_window(space, &vectors)?;
    let pass = measured < p.eps;
    Ok((
        L2Field { vectors, window },
        StepCert {
            step: "l1_to_l2".into(),
            eps: p.eps,
            measured,
            bound: p.eps,
            pass,
        },
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrthogonalityCert {
    pub window: Window,
    pub checked_pairs: usize,
    pub violations: usize,
    pub worst_inner: f64,
    pub pass: bool,
}

/// (iii) to (iv): supports inside `B(x,R,T)` force orthogonality beyond the
/// doubled window `(R', 2T)` with `1-R'` the t-norm square of `1-R`.
pub fn orthogonality_window(space: &FuzzySpace, field: &L2Field) -> Result<OrthogonalityCert> {
    let tau = space.tolerance().tau;
    let threshold = space.tnorm_apply(1.0 - field.window.r, 1.0 - field.window.r);
    let t2 = 2.0 * field.window.t;
    let window = Window {
        r: 1.0 - threshold,
        t: t2,
    };
    let n = space.len();
    let mut checked_pairs = 0;
    let mut violations = 0;
    let mut worst_inner = 0.0f64;
    for x in 0..n {
        for y in (x + 1)..n {
            if space.eval(x, y, t2)? < threshold {
                checked_pairs += 1;
                let ip = inner(&field.vectors[x], &field.vectors[y]).abs();
                worst_inner = worst_inner.max(ip);
                if ip > tau {
                    violations += 1;
                }
            }
        }
    }
    Ok(OrthogonalityCert {
        window,
        checked_pairs,
        violations,
        worst_inner,
        pass: violations == 0,
    })
}

/// (iv) to (v): the Gram kernel of the field, carrying the orthogonality
/// window; `1 - k(x,y)` equals half the squared l2 gap, re-verified
/// entrywise, and positive semidefiniteness is certified by eigenvalues.
pub fn l2_to_kernel(space: &FuzzySpace, field: &L2Field) -> Result<(Kernel, StepCert)> {
    let ortho = orthogonality_window(space, field)?;
    if !ortho.pass {
        return Err(Error::Rejected(format!(
            "field is not orthogonal outside the doubled window; worst inner product {}",
            ortho.worst_inner
        )));
    }
    let n = space.len();
    let mut k = SymMatrix::zeros(n);
    for x in 0..n {
        for y in x..n {
            k.set(x, y, inner(&field.vectors[x], &field.vectors[y]));
        }
    }
    let mut measured = 0.0f64;
    for x in 0..n {
        for y in (x + 1)..n {
            let gap = l2_dist(&field.vectors[x], &field.vectors[y]);
            let dev = ((1.0 - k.get(x, y)) - gap * gap / 2.0).abs();
            measured = measured.max(dev);
        }
    }
    let tol = space.tolerance();
    if measured > 1e-9 {
        return Err(Error::Rejected(format!(
            "polarization identity deviates by {measured}"
        )));
    }
    let eig = sym_eig(&k, tol)?;
    let min_eig = eig.eigenvalues.last().copied().unwrap_or(0.0);
    let pass = min_eig >= -1e-8;
    Ok((
        Kernel {
            k,
            window: ortho.window,
        },
        StepCert {
            step: "l2_to_kernel".into(),
            eps: 0.0,
            measured: min_eig,
            bound: -1e-8,
            pass,
        },
    ))
}

pub fn kernel_psd_check(k: &Kernel, space: &FuzzySpace) -> Result<bool> {
    let eig = sym_eig(&k.k, space.tolerance())?;
    let min_eig = eig.eigenvalues.last().copied().unwrap_or(0.0);
    Ok(min_eig >= -1e-8 * k.k.frobenius_norm().max(1.0))
}

/// (v) to (vi): the kernel acts by matrix multiplication; finite propagation
/// is the kernel window and the operator norm is bounded by the uniform
/// local finiteness profile at that window.
pub fn kernel_to_operator(
    space: &FuzzySpace,
    kernel: &Kernel,
) -> Result<(PropagatedOperator, StepCert)> {
    if !kernel_psd_check(kernel, space)? {
        let eig = sym_eig(&kernel.k, space.tolerance())?;
        return Err(Error::NotPsd {
            min_eig: eig.eigenvalues.last().copied().unwrap_or(0.0),
            threshold: -1e-8 * kernel.k.frobenius_norm().max(1.0),
        });
    }
    let n_rt = space.ball_bound(kernel.window.r, kernel.window.t)? as f64;
    let norm = op_norm_upper(&kernel.k);
    let pass = norm <= n_rt + 1e-6;
    Ok((
        PropagatedOperator {
            matrix: kernel.k.clone(),
            window: kernel.window,
        },
        StepCert {
            step: "kernel_to_operator".into(),
            eps: 0.0,
            measured: norm,
            bound: n_rt + 1e-6,
            pass,
        },
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorToL2Cert {
    pub eps: f64,
    pub window: Window,
    /// operator-norm budget for the truncation
    pub norm_bound: f64,
    /// achieved truncation error in operator norm
    pub truncation_error: f64,
    /// worst deviation of the recovered Gram entries from the kernel
    pub gram_deviation: f64,
    pub min_theta_norm_sq: f64,
    /// close-pair l2 bound `2 sqrt(8 eps / (1 - 2 eps))`
    pub close_bound: f64,
    /// worst l2 gap over pairs with `|1 - k(x,y)| < eps`
    pub measured_close: f64,
    pub pass: bool,
}

/// (vi) to (iii): positive square root, truncation to the tightest window
/// meeting the norm budget, columns renormalized to unit vectors.
pub fn operator_to_l2(
    space: &FuzzySpace,
    op: &PropagatedOperator,
    eps: f64,
) -> Result<(L2Field, OperatorToL2Cert)> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Rejected(format!(
            "eps must lie in (0, 1/2) for the square-root argument, got {eps}"
        )));
    }
    let tol = space.tolerance();
    let s_l = psd_sqrt(&op.matrix, tol)?;
    let s_l_norm = op_norm_upper(&s_l);
    let norm_bound = eps.min(eps / (2.0 * (s_l_norm + eps)));

    // candidate thresholds on M at the grid max, tightest (diagonal only)
    // to loosest (all pairs, zero truncation error)
    let n = space.len();
    let t = space.t_max();
    let mut levels: Vec<f64> = vec![1.0];
    for x in 0..n {
        for y in (x + 1)..n {
            levels.push(space.eval(x, y, t)?);
        }
    }
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
    levels.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let mut chosen: Option<(SymMatrix, Window, f64)> = None;
    for &level in &levels {
        let mut s_m = s_l.clone();
        for x in 0..n {
            for y in (x + 1)..n {
                if space.eval(x, y, t)? < level {
                    s_m.set(x, y, 0.0);
                }
            }
        }
        let err = op_norm_upper(&s_l.sub(&s_m));
        if err < norm_bound {
            chosen = Some((
                s_m,
                Window {
                    r: 1.0 - level,
                    t,
                },
                err,
            ));
            break;
        }
    }
    let (s_m, window, truncation_error) = chosen.ok_or_else(|| {
        Error::Rejected(format!(
            "no truncation window meets the norm budget {norm_bound}"
        ))
    })?;

    // theta_x = column x of the truncated square root; its Gram matrix is
    // the square of s_m
    let gram_raw = s_m.matmul(&s_m);
    let mut gram_deviation = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            gram_deviation = gram_deviation.max((gram_raw[x * n + y] - op.matrix.get(x, y)).abs());
        }
    }
    if !(gram_deviation < eps) {
        return Err(Error::Rejected(format!(
            "recovered Gram entries deviate by {gram_deviation}, not below eps = {eps}"
        )));
    }
    let mut min_theta_norm_sq = f64::INFINITY;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n);
    for x in 0..n {
        let theta: Vec<f64> = (0..n).map(|y| s_m.get(y, x)).collect();
        let nn = l2_norm(&theta);
        min_theta_norm_sq = min_theta_norm_sq.min(nn * nn);
        if nn * nn <= 1.0 - 2.0 * eps {
            return Err(Error::Rejected(format!(
                "column norm squared {} fails the 1 - 2 eps floor",
                nn * nn
            )));
        }
        vectors.push(theta.iter().map(|e| e / nn).collect());
    }
    let close_bound = 2.0 * (8.0 * eps / (1.0 - 2.0 * eps)).sqrt();
    let mut measured_close = 0.0f64;
    for x in 0..n {
        for y in (x + 1)..n {
            if (1.0 - op.matrix.get(x, y)).abs() < eps {
                measured_close = measured_close.max(l2_dist(&vectors[x], &vectors[y]));
            }
        }
    }
    let pass = measured_close <= close_bound;
    let field_window = support_window(space, &vectors)?;
    let cert = OperatorToL2Cert {
        eps,
        window,
        norm_bound,
        truncation_error,
        gram_deviation,
        min_theta_norm_sq,
        close_bound,
        measured_close,
        pass,
    };
    Ok((
        L2Field {
            vectors,
            window: field_window,
        },
        cert,
    ))
}

/// Quantization step: the least multiple of `1/N` at or above `xi`.
pub fn quantize(n: usize, xi: f64) -> u32 {
    (n as f64 * xi).ceil() as u32
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantizationCert {
    pub eps: f64,
    /// ball bound at the field window
    pub n_rt: usize,
    /// quantization denominator, strictly above `n_rt / eps`
    pub big_n: usize,
    /// inflated ratio bound `8 eps / (1 - 4 eps - eps^2)`
    pub eps_prime: f64,
}

/// (iii) to (i): squared entries quantized to multiples of `1/N` become
/// level sets; the resulting family verifies at the inflated eps.
pub fn l2_to_witness(
    space: &FuzzySpace,
    field: &L2Field,
    p: ParamTuple,
) -> Result<(WitnessFamily, WitnessCertificate, QuantizationCert)> {
    let limit = 5.0f64.sqrt() - 2.0;
    if !(p.eps > 0.0 && p.eps < limit) {
        return Err(Error::Rejected(format!(
            "eps must lie in (0, {limit:.6}) for the inflated bound to hold, got {}",
            p.eps
        )));
    }
    let pairs = unordered_close_pairs(space, p.r, p.t);
    let mut worst_l2 = 0.0f64;
    for &(x, y) in &pairs {
        worst_l2 = worst_l2.max(l2_dist(&field.vectors[x], &field.vectors[y]));
    }
    if !(worst_l2 < p.eps) {
        return Err(Error::Rejected(format!(
            "field gap {worst_l2} is not below eps = {}",
            p.eps
        )));
    }
    let n_rt = space.ball_bound(field.window.r, field.window.t)?;
    let big_n = (n_rt as f64 / p.eps).floor() as usize + 1;
    let n = space.len();
    let mut heights = Vec::with_capacity(n);
    for x in 0..n {
        let mut h = std::collections::BTreeMap::new();
        for y in 0..n {
            let xi = field.vectors[x][y] * field.vectors[x][y];
            let j = quantize(big_n, xi);
            if j > 0 {
                h.insert(y, j);
            }
        }
        heights.push(h);
    }
    let family = WitnessFamily::from_heights(n, heights)?;
    let eps_prime = 8.0 * p.eps / (1.0 - 4.0 * p.eps - p.eps * p.eps);
    let cert = verify_witness(space, &family, ParamTuple::new(eps_prime, p.r, p.t)?)?;
    Ok((
        family,
        cert,
        QuantizationCert {
            eps: p.eps,
            n_rt,
            big_n,
            eps_prime,
        },
    ))
}

/// Composed propagation window of two finite-propagation operators,
/// verified entrywise on the product matrix.
pub fn propagation_compose(
    space: &FuzzySpace,
    s1: &PropagatedOperator,
    s2: &PropagatedOperator,
) -> Result<(Window, bool)> {
    let window = Window {
        r: 1.0 - space.tnorm_apply(1.0 - s1.window.r, 1.0 - s2.window.r),
        t: s1.window.t + s2.window.t,
    };
    let n = s1.matrix.dim();
    let product = s1.matrix.matmul(&s2.matrix);
    let tau = space.tolerance().tau;
    let mut ok = true;
    for x in 0..n {
        for y in 0..n {
            if space.eval(x, y, window.t)? < 1.0 - window.r && product[x * n + y].abs() > tau {
                ok = false;
            }
        }
    }
    Ok((window, ok))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundTrip {
    pub start: ParamTuple,
    pub steps: Vec<StepCert>,
    pub quantization: QuantizationCert,
    pub final_cert: WitnessCertificate,
    /// ratio of the final verified eps to the starting eps
    pub inflation: f64,
    pub pass: bool,
}

/// Drive a verified witness through every condition and back, feeding each
/// step the measured quality of the previous one (with a small slack and a
/// floor that keeps the quantization denominator bounded).
pub fn roundtrip(space: &FuzzySpace, w: &WitnessFamily, p: ParamTuple) -> Result<RoundTrip> {
    const SLACK: f64 = 1.0001;
    let mut steps = Vec::new();

    let pre = verify_witness(space, w, p)?;
    if !pre.pass {
        return Err(Error::Rejected(format!(
            "starting witness fails at eps = {}; worst ratio {}",
            p.eps, pre.worst_ratio
        )));
    }
    let (l1, c1) = witness_to_l1(space, w, ParamTuple::new(2.0 * p.eps, p.r, p.t)?)?;
    steps.push(c1.clone());
    if !c1.pass {
        return Err(Error::Rejected("l1 step failed its own bound".into()));
    }
    let eps2 = (c1.measured * SLACK).sqrt().max(1e-6);
    let (l2f, c2) = l1_to_l2(space, &l1, ParamTuple::new(eps2, p.r, p.t)?)?;
    steps.push(c2.clone());
    let (kernel, c3) = l2_to_kernel(space, &l2f)?;
    steps.push(c3.clone());
    let (op, c4) = kernel_to_operator(space, &kernel)?;
    steps.push(c4.clone());
    if !(c2.pass && c3.pass && c4.pass) {
        return Err(Error::Rejected("kernel or operator step failed".into()));
    }
    // worst kernel defect on close pairs feeds the truncation quality
    let mut kernel_gap = 0.0f64;
    for (x, y) in unordered_close_pairs(space, p.r, p.t) {
        kernel_gap = kernel_gap.max((1.0 - kernel.k.get(x, y)).abs());
    }
    let eps6 = (kernel_gap * 2.0).max(0.01).min(0.49);
    let (back, c6) = operator_to_l2(space, &op, eps6)?;
    steps.push(StepCert {
        step: "operator_to_l2".into(),
        eps: eps6,
        measured: c6.measured_close,
        bound: c6.close_bound,
        pass: c6.pass,
    });
    if !c6.pass {
        return Err(Error::Rejected("square-root step failed its bound".into()));
    }
    let mut back_gap = 0.0f64;
    for (x, y) in unordered_close_pairs(space, p.r, p.t) {
        back_gap = back_gap.max(l2_dist(&back.vectors[x], &back.vectors[y]));
    }
    let eps7 = (back_gap * SLACK).max(0.01);
    let (_, final_cert, quantization) =
        l2_to_witness(space, &back, ParamTuple::new(eps7, p.r, p.t)?)?;
    let pass = final_cert.pass && steps.iter().all(|s| s.pass);
    let inflation = quantization.eps_prime / p.eps;
    Ok(RoundTrip {
        start: p,
        steps,
        quantization,
        final_cert,
        inflation,
        pass,
    })
}
