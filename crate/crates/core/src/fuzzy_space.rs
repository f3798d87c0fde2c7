//! The finite fuzzy metric space data model: point sets, fuzzy metric
//! oracles `M(x,y,t)`, axiom verification, balls, boundedness, and uniform
//! local finiteness profiles.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::numerics::{tnorm_apply, TNorm, Tolerance};
use crate::{Error, Result};

/// Ordered set of distinct point labels; indices are positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl PointSet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::Structural(format!("duplicate point label: {l}")));
            }
        }
        Ok(PointSet { labels, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BuiltinId {
    /// Points `1..n` with `M(x,y,t) = min(x,y)/max(x,y)`.
    #[serde(rename = "nat-ratio")]
    NatRatio,
    /// Points `1..n` with `M = 1` if `x = y`, else `1/(xy)`.
    #[serde(rename = "nat-product")]
    NatProduct,
    /// An n-by-n integer grid with the L1 metric, as a standard space.
    #[serde(rename = "grid-z")]
    GridZ,
    /// Points `0..n-1` on a line with `d(i,j) = |i-j|`, as a standard space.
    #[serde(rename = "path")]
    Path,
}

/// Evaluation rule for `M(x,y,t)`.  All variants are symmetric by storage
/// (unordered-pair keyed or symmetric matrices) and return 1 on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub enum FuzzyMetric {
    /// `M(x,y,t) = t/(t + d(x,y))` from a classical metric `d`.
    Standard { d: Vec<Vec<f64>> },
    /// `M(x,y,t) = V(x,y)` for all `t`.
    Stationary { values: Vec<Vec<f64>> },
    /// Per-unordered-pair sample arrays over a shared increasing `t_grid`;
    /// piecewise-linear between grid points, constant outside the grid.
    Sampled {
        t_grid: Vec<f64>,
        /// keyed by `(i, j)` with `i < j`
        values: HashMap<(usize, usize), Vec<f64>>,
    },
    Builtin { id: BuiltinId, n: usize },
}

/// A finite fuzzy metric space: points, a zero-divisor-free t-norm, and an
/// evaluation rule.  Immutable after construction.
#[derive(Debug, Clone)]
pub struct FuzzySpace {
    name: String,
    points: PointSet,
    tnorm: TNorm,
    metric: FuzzyMetric,
    t_grid: Vec<f64>,
    tol: Tolerance,
}

/// Default verification grid: 61 log-spaced t values in `[1e-3, 1e3]`.
pub fn default_t_grid() -> Vec<f64> {
    let n = 61;
    (0..n)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (n - 1) as f64))
        .collect()
}

impl FuzzySpace {
    pub fn new(
        name: impl Into<String>,
        points: PointSet,
        tnorm: TNorm,
        metric: FuzzyMetric,
    ) -> Result<Self> {
        if tnorm.has_zero_divisors() {
            return Err(Error::Rejected(format!(
                "t-norm {} has zero divisors; the bounded coarse structure requires none",
                tnorm.name()
            )));
        }
        if points.is_empty() {
            return Err(Error::Structural("empty point set".into()));
        }
        let tol = Tolerance::default();
        validate_metric(&points, &metric)?;
        Ok(FuzzySpace {
            name: name.into(),
            points,
            tnorm,
            metric,
            t_grid: default_t_grid(),
            tol,
        })
    }

    /// Standard space induced by a classical metric, under the product t-norm.
    pub fn standard(name: impl Into<String>, labels: Vec<String>, d: Vec<Vec<f64>>) -> Result<Self> {
        let points = PointSet::new(labels)?;
        FuzzySpace::new(name, points, TNorm::Product, FuzzyMetric::Standard { d })
    }

    pub fn builtin(id: BuiltinId, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("builtin spaces need n >= 1".into()));
        }
        match id {
            BuiltinId::NatRatio | BuiltinId::NatProduct => {
                let labels = (1..=n).map(|i| i.to_string()).collect();
                let points = PointSet::new(labels)?;
                let name = match id {
                    BuiltinId::NatRatio => format!("nat-ratio-{n}"),
                    _ => format!("nat-product-{n}"),
                };
                FuzzySpace::new(name, points, TNorm::Product, FuzzyMetric::Builtin { id, n })
            }
            BuiltinId::Path => {
                let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
                let d = (0..n)
                    .map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect())
                    .collect();
                FuzzySpace::standard(format!("path-{n}"), labels, d)
            }
            BuiltinId::GridZ => {
                let mut labels = Vec::new();
                let mut coords = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        labels.push(format!("{i},{j}"));
                        coords.push((i as f64, j as f64));
                    }
                }
                let d = coords
                    .iter()
                    .map(|&(a, b)| {
                        coords
                            .iter()
                            .map(|&(c, e)| (a - c).abs() + (b - e).abs())
                            .collect()
                    })
                    .collect();
                FuzzySpace::standard(format!("grid-z-{n}"), labels, d)
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn tnorm(&self) -> TNorm {
        self.tnorm
    }

    pub fn metric(&self) -> &FuzzyMetric {
        &self.metric
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn t_max(&self) -> f64 {
        *self.t_grid.last().unwrap()
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn set_tolerance(&mut self, tol: Tolerance) {
        self.tol = tol;
    }

    pub fn tnorm_apply(&self, a: f64, b: f64) -> f64 {
        tnorm_apply(self.tnorm, a.clamp(0.0, 1.0), b.clamp(0.0, 1.0)).unwrap()
    }

    /// `M(x,y,t)` by point index.
    pub fn eval(&self, x: usize, y: usize, t: f64) -> Result<f64> {
        if t <= 0.0 || !t.is_finite() {
            return Err(Error::Domain(format!("t must be positive, got {t}")));
        }
        let n = self.points.len();
        if x >= n || y >= n {
            return Err(Error::Structural(format!("point index out of range: {x}/{y}")));
        }
        Ok(self.eval_unchecked(x, y, t))
    }

    /// `M(x,y,t)` by label.
    pub fn eval_by_label(&self, x: &str, y: &str, t: f64) -> Result<f64> {
        let xi = self.points.index_of(x)?;
        let yi = self.points.index_of(y)?;
        self.eval(xi, yi, t)
    }

    pub(crate) fn eval_unchecked(&self, x: usize, y: usize, t: f64) -> f64 {
        if x == y {
            return 1.0;
        }
        let (i, j) = if x < y { (x, y) } else { (y, x) };
        match &self.metric {
            FuzzyMetric::Standard { d } => {
                let dij = d[i][j];
                t / (t + dij)
            }
            FuzzyMetric::Stationary { values } => values[i][j],
            FuzzyMetric::Sampled { t_grid, values } => {
                let samples = &values[&(i, j)];
                interpolate(t_grid, samples, t)
            }
            FuzzyMetric::Builtin { id, .. } => {
                let a = (i + 1) as f64;
                let b = (j + 1) as f64;
                match id {
                    BuiltinId::NatRatio => a / b, // i < j so min/max = a/b
                    BuiltinId::NatProduct => 1.0 / (a * b),
                    // Path and GridZ are materialized as Standard at build time
                    BuiltinId::Path | BuiltinId::GridZ => unreachable!(),
                }
            }
        }
    }

    /// The ball `B(x,r,t) = { y : M(x,y,t) > 1-r }`.
    pub fn ball(&self, x: usize, r: f64, t: f64) -> Result<Vec<usize>> {
        check_r(r)?;
        if t <= 0.0 {
            return Err(Error::Domain(format!("t must be positive, got {t}")));
        }
        Ok((0..self.points.len())
            .filter(|&y| self.eval_unchecked(x, y, t) > 1.0 - r)
            .collect())
    }

    /// All ordered pairs `(x,y)`, `x != y`, with `M(x,y,t) > 1-r`.
    pub fn close_pairs(&self, r: f64, t: f64) -> Vec<(usize, usize)> {
        let n = self.points.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y && self.eval_unchecked(x, y, t) > 1.0 - r {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Boundedness witness for a subset: always exists on a finite space.
    pub fn is_bounded_set(&self, set: &[usize]) -> Result<BoundedSetWitness> {
        let t = self.t_max();
        let mut min_m = 1.0f64;
        for (k, &x) in set.iter().enumerate() {
            if x >= self.points.len() {
                return Err(Error::Structural(format!("point index {x} out of range")));
            }
            for &y in &set[k + 1..] {
                min_m = min_m.min(self.eval_unchecked(x, y, t));
            }
        }
        // 1-r = min_m / 2 leaves a factor-2 slack below every pairwise value
        Ok(BoundedSetWitness {
            r: 1.0 - min_m / 2.0,
            t,
            min_m,
        })
    }

    /// Uniform local finiteness profile over a parameter ladder.
    pub fn ulf_profile(&self, ladder: &[(f64, f64)]) -> Result<UlfProfile> {
        if ladder.is_empty() {
            return Err(Error::Structural("empty parameter ladder".into()));
        }
        let mut entries = Vec::new();
        for &(r, t) in ladder {
            entries.push(UlfEntry {
                r,
                t,
                bound: self.ball_bound(r, t)?,
            });
        }
        Ok(UlfProfile { entries })
    }

    /// `N_{r,t}`: a strict upper bound on ball cardinality, `1 + max |B(x,r,t)|`.
    pub fn ball_bound(&self, r: f64, t: f64) -> Result<usize> {
        let mut max_ball = 0;
        for x in 0..self.points.len() {
            max_ball = max_ball.max(self.ball(x, r, t)?.len());
        }
        Ok(1 + max_ball)
    }

    /// Full axiom verification by brute force over the supplied grids.
    pub fn verify_axioms(&self, t_grid: &[f64], s_grid: &[f64]) -> Result<AxiomReport> {
        if t_grid.is_empty() || s_grid.is_empty() {
            return Err(Error::Structural("empty verification grid".into()));
        }
        if t_grid.iter().chain(s_grid).any(|&t| t <= 0.0) {
            return Err(Error::Domain("grids must be positive".into()));
        }
        let n = self.points.len();
        let tol = self.tol;

        let mut positivity = AxiomCheck::pass();
        let mut identity = AxiomCheck::pass();
        let mut symmetry = AxiomCheck::pass();
        let mut monotonicity = AxiomCheck::pass();

        let mut prev: Option<(f64, Vec<f64>)> = None;
        let mut sorted_t = t_grid.to_vec();
        sorted_t.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for &t in &sorted_t {
            let m = self.matrix_at(t);
            for x in 0..n {
                for y in 0..n {
                    let v = m[x * n + y];
                    if !(v > 0.0) {
                        positivity.record(self.violation(x, y, None, t, None, v, 0.0));
                    }
                    if x == y {
                        if (v - 1.0).abs() > tol.tau {
                            identity.record(self.violation(x, y, None, t, None, v, 1.0));
                        }
                    } else if !tol.certify_lt(v, 1.0).passed() {
                        identity.record(self.violation(x, y, None, t, None, v, 1.0));
                    }
                    if (v - m[y * n + x]).abs() > 0.0 {
                        symmetry.record(self.violation(x, y, None, t, None, v, m[y * n + x]));
                    }
                }
            }
            if let Some((_tp, pm)) = &prev {
                for x in 0..n {
                    for y in 0..n {
                        if pm[x * n + y] > m[x * n + y] + tol.tau {
                            monotonicity.record(self.violation(
                                x,
                                y,
                                None,
                                t,
                                None,
                                pm[x * n + y],
                                m[x * n + y],
                            ));
                        }
                    }
                }
            }
            prev = Some((t, m));
        }

        let mut triangle = AxiomCheck::pass();
        for &t in t_grid {
            let mt = self.matrix_at(t);
            for &s in s_grid {
                let ms = self.matrix_at(s);
                let mts = self.matrix_at(t + s);
                for x in 0..n {
                    for y in 0..n {
                        let mxy = mt[x * n + y];
                        for z in 0..n {
                            let lhs = tnorm_raw(self.tnorm, mxy, ms[y * n + z]);
                            let rhs = mts[x * n + z];
                            if lhs > rhs + tol.tau {
                                triangle.record(self.violation(x, y, Some(z), t, Some(s), lhs, rhs));
                            }
                        }
                    }
                }
            }
        }

        let continuity = match &self.metric {
            FuzzyMetric::Sampled { t_grid, values } => {
                let mut check = AxiomCheck::pass();
                for (&(i, j), samples) in values {
                    for w in samples.windows(2) {
                        if w[1] < w[0] {
                            check.record(self.violation(i, j, None, t_grid[0], None, w[0], w[1]));
                        }
                    }
                }
                Some(check)
            }
            _ => None,
        };

        Ok(AxiomReport {
            space: self.name.clone(),
            positivity,
            identity,
            symmetry,
            triangle,
            monotonicity,
            continuity,
        })
    }

    /// The full `M(.,.,t)` matrix, row-major.
    pub fn matrix_at(&self, t: f64) -> Vec<f64> {
        let n = self.points.len();
        let mut m = vec![1.0; n * n];
        for x in 0..n {
            for y in (x + 1)..n {
                let v = self.eval_unchecked(x, y, t);
                m[x * n + y] = v;
                m[y * n + x] = v;
            }
        }
        m
    }

    fn violation(
        &self,
        x: usize,
        y: usize,
        z: Option<usize>,
        t: f64,
        s: Option<f64>,
        lhs: f64,
        rhs: f64,
    ) -> Violation {
        Violation {
            x: self.points.label(x).to_string(),
            y: self.points.label(y).to_string(),
            z: z.map(|z| self.points.label(z).to_string()),
            t,
            s,
            lhs,
            rhs,
        }
    }
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r must lie in (0,1), got {r}")));
    }
    Ok(())
}

fn interpolate(grid: &[f64], samples: &[f64], t: f64) -> f64 {
    if t <= grid[0] {
        return samples[0];
    }
    if t >= grid[grid.len() - 1] {
        return samples[samples.len() - 1];
    }
    let k = grid.partition_point(|&g| g < t);
    let (t0, t1) = (grid[k - 1], grid[k]);
    let (v0, v1) = (samples[k - 1], samples[k]);
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

fn validate_metric(points: &PointSet, metric: &FuzzyMetric) -> Result<()> {
    let n = points.len();
    match metric {
        FuzzyMetric::Standard { d } => {
            if d.len() != n || d.iter().any(|row| row.len() != n) {
                return Err(Error::Structural("metric matrix shape mismatch".into()));
            }
            for i in 0..n {
                if d[i][i] != 0.0 {
                    return Err(Error::Structural(format!("nonzero diagonal d[{i}][{i}]")));
                }
                for j in 0..n {
                    if d[i][j] != d[j][i] {
                        return Err(Error::Structural(format!("d not symmetric at ({i},{j})")));
                    }
                    if i != j && !(d[i][j] > 0.0) {
                        return Err(Error::Structural(format!(
                            "off-diagonal distance d[{i}][{j}] must be positive"
                        )));
                    }
                    // the d-triangle inequality is deliberately not enforced
                    // here; verify_axioms is the gate that detects it through
                    // the fuzzy triangle inequality
                }
            }
        }
        FuzzyMetric::Stationary { values } => {
            if values.len() != n || values.iter().any(|row| row.len() != n) {
                return Err(Error::Structural("stationary matrix shape mismatch".into()));
            }
            for i in 0..n {
                if values[i][i] != 1.0 {
                    return Err(Error::Structural(format!("diagonal V[{i}][{i}] must be 1")));
                }
                for j in 0..n {
                    if values[i][j] != values[j][i] {
                        return Err(Error::Structural(format!("V not symmetric at ({i},{j})")));
                    }
                    if i != j && !(values[i][j] > 0.0 && values[i][j] < 1.0) {
                        return Err(Error::Structural(format!(
                            "off-diagonal V[{i}][{j}] must lie in (0,1)"
                        )));
                    }
                }
            }
        }
        FuzzyMetric::Sampled { t_grid, values } => {
            if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid[0] <= 0.0 {
                return Err(Error::Structural(
                    "sampled t_grid must be strictly increasing and positive".into(),
                ));
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let samples = values.get(&(i, j)).ok_or_else(|| {
                        Error::Structural(format!("missing samples for pair ({i},{j})"))
                    })?;
                    if samples.len() != t_grid.len() {
                        return Err(Error::Structural(format!(
                            "sample length mismatch for pair ({i},{j})"
                        )));
                    }
                    if samples.iter().any(|&v| !(v > 0.0 && v <= 1.0)) {
                        return Err(Error::Structural(format!(
                            "samples for ({i},{j}) must lie in (0,1]"
                        )));
                    }
                    if samples.windows(2).any(|w| w[1] < w[0]) {
                        return Err(Error::Structural(format!(
                            "samples for ({i},{j}) must be nondecreasing in t"
                        )));
                    }
                }
            }
        }
        FuzzyMetric::Builtin { id, n: bn } => {
            match id {
                BuiltinId::NatRatio | BuiltinId::NatProduct => {}
                _ => {
                    return Err(Error::Structural(
                        "path/grid-z builtins must be materialized as standard metrics".into(),
                    ))
                }
            }
            if *bn != n {
                return Err(Error::Structural("builtin size does not match point set".into()));
            }
        }
    }
    Ok(())
}

/// A `(r,t)` pair certifying `M(x,y,t) > 1-r` over all pairs of a set.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundedSetWitness {
    pub r: f64,
    pub t: f64,
    /// min pairwise proximity at `t`; re-verification recomputes this
    pub min_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UlfEntry {
    pub r: f64,
    pub t: f64,
    /// strict bound: every ball at `(r,t)` has fewer than `bound` points
    pub bound: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UlfProfile {
    pub entries: Vec<UlfEntry>,
}

/// Worst violating tuple for a failed axiom.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub x: String,
    pub y: String,
    pub z: Option<String>,
    pub t: f64,
    pub s: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub passed: bool,
    pub violations: usize,
    pub worst: Option<Violation>,
}

impl AxiomCheck {
    fn pass() -> Self {
        AxiomCheck {
            passed: true,
            violations: 0,
            worst: None,
        }
    }

    fn record(&mut self, v: Violation) {
        self.passed = false;
        self.violations += 1;
        let worse = match &self.worst {
            None => true,
            Some(w) => (v.lhs - v.rhs) > (w.lhs - w.rhs),
        };
        if worse {
            self.worst = Some(v);
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxiomReport {
    pub space: String,
    pub positivity: AxiomCheck,
    pub identity: AxiomCheck,
    pub symmetry: AxiomCheck,
    pub triangle: AxiomCheck,
    pub monotonicity: AxiomCheck,
    pub continuity: Option<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.positivity.passed
            && self.identity.passed
            && self.symmetry.passed
            && self.triangle.passed
            && self.monotonicity.passed
            && self.continuity.as_ref().map_or(true, |c| c.passed)
    }
}

/// Radius conversions between a classical metric and its
/// standard fuzzy space: `B_d(x,R) = B(x, R/(t+R), t) = B(x, r, R(1-r)/r)`.
pub fn ball_correspondence_check(space: &FuzzySpace, radius: f64, t: f64, r: f64) -> Result<bool> {
    let d = match space.metric() {
        FuzzyMetric::Standard { d } => d,
        _ => {
            return Err(Error::Structural(
                "ball correspondence requires a standard space".into(),
            ))
        }
    };
    if radius <= 0.0 {
        return Err(Error::Domain("R must be positive".into()));
    }
    check_r(r)?;
    let n = space.len();
    let fuzzy_radius = radius / (t + radius);
    let t_for_r = radius * (1.0 - r) / r;
    for x in 0..n {
        let metric_ball: Vec<usize> = (0..n).filter(|&y| d[x][y] < radius).collect();
        let b1 = space.ball(x, fuzzy_radius, t)?;
        let b2 = space.ball(x, r, t_for_r)?;
        if metric_ball != b1 || metric_ball != b2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Random classical metric on `n` points: random positive edge weights run
/// through a Floyd-Warshall shortest-path closure.
pub fn random_metric(n: usize, rng: &mut impl rand::Rng) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.gen_range(0.5..10.0);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Random stationary fuzzy metric passing the axioms under the product
/// t-norm: `V = exp(-D)` for a random classical metric `D`.
pub fn random_stationary_space(
    name: impl Into<String>,
    n: usize,
    rng: &mut impl rand::Rng,
) -> Result<FuzzySpace> {
    let d = random_metric(n, rng);
    let values = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 1.0 } else { (-d[i][j]).exp() })
                .collect()
        })
        .collect();
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    let points = PointSet::new(labels)?;
    FuzzySpace::new(name, points, TNorm::Product, FuzzyMetric::Stationary { values })
}

// Used by the triangle brute force; skips domain checks in the hot loop.
pub(crate) use hot::tnorm_raw;

mod hot {
    use super::TNorm;

    #[inline]
    pub fn tnorm_raw(tn: TNorm, a: f64, b: f64) -> f64 {
        match tn {
            TNorm::Product => a * b,
            TNorm::Minimum => a.min(b),
            TNorm::Lukasiewicz => (a + b - 1.0).max(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn two_point_standard(dist: f64) -> FuzzySpace {
        FuzzySpace::standard(
            "pair",
            vec!["a".into(), "b".into()],
            vec![vec![0.0, dist], vec![dist, 0.0]],
        )
        .unwrap()
    }

    #[test]
    fn eval_standard_formula() {
        let s = two_point_standard(1.0);
        assert_eq!(s.eval_by_label("a", "b", 1.0).unwrap(), 0.5);
        assert_eq!(s.eval_by_label("a", "a", 7.0).unwrap(), 1.0);
    }

    #[test]
    fn eval_nat_ratio() {
        let s = FuzzySpace::builtin(BuiltinId::NatRatio, 8).unwrap();
        let v = s.eval_by_label("2", "6", 3.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn eval_errors() {
        let s = two_point_standard(1.0);
        assert!(matches!(
            s.eval_by_label("a", "zz", 1.0),
            Err(Error::UnknownPoint(_))
        ));
        assert!(s.eval_by_label("a", "b", 0.0).is_err());
        assert!(s.eval_by_label("a", "b", -2.0).is_err());
    }

    #[test]
    fn rejects_zero_divisor_tnorm() {
        let points = PointSet::new(vec!["a".into()]).unwrap();
        let err = FuzzySpace::new(
            "x",
            points,
            TNorm::Lukasiewicz,
            FuzzyMetric::Stationary { values: vec![vec![1.0]] },
        );
        assert!(matches!(err, Err(Error::Rejected(_))));
    }

    #[test]
    fn axioms_pass_on_standard_space() {
        let mut rng = StdRng::seed_from_u64(1);
        let d = random_metric(8, &mut rng);
        let labels = (0..8).map(|i| i.to_string()).collect();
        let s = FuzzySpace::standard("rand8", labels, d).unwrap();
        let grid: Vec<f64> = default_t_grid().into_iter().step_by(6).collect();
        let report = s.verify_axioms(&grid, &grid).unwrap();
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn axioms_catch_triangle_violation() {
        // V(a,c) < V(a,b) * V(b,c) breaks the product triangle
        let values = vec![
            vec![1.0, 0.9, 0.1],
            vec![0.9, 1.0, 0.9],
            vec![0.1, 0.9, 1.0],
        ];
        let points = PointSet::new(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let s = FuzzySpace::new("bad", points, TNorm::Product, FuzzyMetric::Stationary { values })
            .unwrap();
        let grid = [1.0, 2.0];
        let report = s.verify_axioms(&grid, &grid).unwrap();
        assert!(!report.triangle.passed);
        // worst triple: M(a,b,t) * M(b,c,s) = 0.81 > 0.1 = M(a,c,t+s)
        let worst = report.triangle.worst.unwrap();
        assert_eq!(worst.y, "b");
        assert_eq!(worst.z.as_deref(), Some("c"));
        assert!(worst.lhs > worst.rhs);
    }

    #[test]
    fn nat_product_axioms_pass() {
        let s = FuzzySpace::builtin(BuiltinId::NatProduct, 16).unwrap();
        let grid: Vec<f64> = default_t_grid().into_iter().step_by(10).collect();
        let report = s.verify_axioms(&grid, &grid).unwrap();
        assert!(report.all_passed());
    }

    #[test]
    fn balls_on_path_space() {
        let s = FuzzySpace::builtin(BuiltinId::Path, 10).unwrap();
        // r=0.6, t=1: M = 1/(1+d) > 0.4 iff d <= 1
        let b = s.ball(3, 0.6, 1.0).unwrap();
        assert_eq!(b, vec![2, 3, 4]);
        // tiny r keeps only the center
        let b = s.ball(3, 1e-12, 1.0).unwrap();
        assert_eq!(b, vec![3]);
    }

    #[test]
    fn ball_on_nat_product() {
        let s = FuzzySpace::builtin(BuiltinId::NatProduct, 16).unwrap();
        // x = 1: M(1,y,t) = 1/y, threshold 1 - 0.9 rounds just below 0.1,
        // so y = 10 makes the strict cut
        let b = s.ball(0, 0.9, 1.0).unwrap();
        let labels: Vec<&str> = b.iter().map(|&i| s.points().label(i)).collect();
        assert_eq!(labels, vec!["1", "2", "3", "4", "5", "6", "7", "8", "9", "10"]);
    }

    #[test]
    fn ball_nesting() {
        let s = FuzzySpace::builtin(BuiltinId::Path, 20).unwrap();
        let small = s.ball(7, 0.3, 1.0).unwrap();
        let large = s.ball(7, 0.6, 2.0).unwrap();
        assert!(small.iter().all(|x| large.contains(x)));
    }

    #[test]
    fn ball_correspondence() {
        let mut rng = StdRng::seed_from_u64(5);
        let d = random_metric(16, &mut rng);
        let labels = (0..16).map(|i| i.to_string()).collect();
        let s = FuzzySpace::standard("rand", labels, d).unwrap();
        // R=2, t=3 gives fuzzy radius 0.4
        assert!((2.0 / (3.0 + 2.0) - 0.4f64).abs() < 1e-15);
        assert!(ball_correspondence_check(&s, 2.0, 3.0, 0.5).unwrap());
        for _ in 0..20 {
            use rand::Rng;
            let radius = rng.gen_range(0.5..12.0);
            let t = rng.gen_range(0.1..10.0);
            let r = rng.gen_range(0.05..0.95);
            assert!(ball_correspondence_check(&s, radius, t, r).unwrap());
        }
    }

    #[test]
    fn bounded_sets() {
        let s = FuzzySpace::builtin(BuiltinId::NatProduct, 8).unwrap();
        let w = s.is_bounded_set(&[3]).unwrap();
        assert_eq!(w.min_m, 1.0);
        let all: Vec<usize> = (0..8).collect();
        let w = s.is_bounded_set(&all).unwrap();
        // min pairwise M = 1/(7*8) = 1/56
        assert!((w.min_m - 1.0 / 56.0).abs() < 1e-15);
        assert!(w.min_m > 0.0);
        // union of two bounded sets stays bounded: direct recomputation
        let w1 = s.is_bounded_set(&[0, 1]).unwrap();
        let w2 = s.is_bounded_set(&[5, 6]).unwrap();
        let wu = s.is_bounded_set(&[0, 1, 5, 6]).unwrap();
        assert!(wu.min_m > 0.0);
        assert!(wu.min_m <= w1.min_m.min(w2.min_m));
    }

    #[test]
    fn ulf_profiles() {
        let s = FuzzySpace::builtin(BuiltinId::Path, 64).unwrap();
        let profile = s
            .ulf_profile(&[(1e-12, 1.0), (0.6, 1.0), (0.999999, 1e3)])
            .unwrap();
        assert_eq!(profile.entries[0].bound, 2); // singletons
        assert_eq!(profile.entries[1].bound, 4); // radius-1 intervals
        assert_eq!(profile.entries[2].bound, 65); // whole space
    }

    #[test]
    fn sampled_metric_interpolation() {
        let mut values = HashMap::new();
        values.insert((0usize, 1usize), vec![0.2, 0.6]);
        let points = PointSet::new(vec!["a".into(), "b".into()]).unwrap();
        let s = FuzzySpace::new(
            "sampled",
            points,
            TNorm::Minimum,
            FuzzyMetric::Sampled {
                t_grid: vec![1.0, 2.0],
                values,
            },
        )
        .unwrap();
        assert_eq!(s.eval_by_label("a", "b", 0.5).unwrap(), 0.2); // constant below
        assert_eq!(s.eval_by_label("a", "b", 3.0).unwrap(), 0.6); // constant above
        assert!((s.eval_by_label("a", "b", 1.5).unwrap() - 0.4).abs() < 1e-15);
    }
}
