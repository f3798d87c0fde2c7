//! Entourages over a finite point set, the bounded coarse structure of a
//! fuzzy metric space, Sako-style Property A, coarse asymptotic dimension,
//! and coarse map checks, with cross-checks against the fuzzy-level
//! machinery.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::coarse_maps::{check_uniformly_expansive, PointMap, DEFAULT_LADDER};
use crate::fuzzy_space::FuzzySpace;
use crate::property_a::WitnessFamily;
use crate::{Error, Result};

/// An arbitrary set of ordered point pairs over `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entourage {
    pairs: BTreeSet<(usize, usize)>,
}

impl Entourage {
    pub fn new(n_points: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let pairs: BTreeSet<(usize, usize)> = pairs.into_iter().collect();
        for &(x, y) in &pairs {
            if x >= n_points || y >= n_points {
                return Err(Error::Structural(format!(
                    "entourage pair ({x},{y}) out of range for {n_points} points"
                )));
            }
        }
        Ok(Entourage { pairs })
    }

    pub fn diagonal(n_points: usize) -> Self {
        Entourage {
            pairs: (0..n_points).map(|x| (x, x)).collect(),
        }
    }

    pub fn all_pairs(n_points: usize) -> Self {
        Entourage {
            pairs: (0..n_points)
                .flat_map(|x| (0..n_points).map(move |y| (x, y)))
                .collect(),
        }
    }

    /// The closeness entourage `{(x,y) : M(x,y,t) > 1-r}`.
    pub fn closeness(space: &FuzzySpace, r: f64, t: f64) -> Result<Self> {
        let n = space.len();
        let mut pairs = BTreeSet::new();
        for x in 0..n {
            for y in 0..n {
                if space.eval(x, y, t)? > 1.0 - r {
                    pairs.insert((x, y));
                }
            }
        }
        Ok(Entourage { pairs })
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.pairs.contains(&(x, y))
    }

    pub fn inverse(&self) -> Entourage {
        Entourage {
            pairs: self.pairs.iter().map(|&(x, y)| (y, x)).collect(),
        }
    }

    /// `{(x,y) : exists z with (x,z) in self and (z,y) in other}`.
    pub fn compose(&self, other: &Entourage) -> Entourage {
        let mut pairs = BTreeSet::new();
        for &(x, z) in &self.pairs {
            for &(z2, y) in other.pairs.range((z, usize::MIN)..=(z, usize::MAX)) {
                debug_assert_eq!(z, z2);
                pairs.insert((x, y));
            }
        }
        Entourage { pairs }
    }

    pub fn union(&self, other: &Entourage) -> Entourage {
        Entourage {
            pairs: self.pairs.union(&other.pairs).copied().collect(),
        }
    }

    pub fn is_subset(&self, other: &Entourage) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn contains_diagonal(&self, n_points: usize) -> bool {
        (0..n_points).all(|x| self.pairs.contains(&(x, x)))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundedWitness {
    pub r: f64,
    pub t: f64,
    pub min_m: f64,
}

/// `(r, t)` with `M > 1-r` on every pair of the entourage.  On a finite
/// space this always succeeds: every subset of `X x X` belongs to the
/// bounded coarse structure, so the witness values carry the content.
pub fn bounded_witness(space: &FuzzySpace, e: &Entourage) -> Result<BoundedWitness> {
    if e.pairs().is_empty() {
        return Err(Error::Structural("empty entourage".into()));
    }
    let t = space.t_max();
    let mut min_m = 1.0f64;
    for &(x, y) in e.pairs() {
        min_m = min_m.min(space.eval(x, y, t)?);
    }
    Ok(BoundedWitness {
        r: 1.0 - min_m / 2.0,
        t,
        min_m,
    })
}

pub fn verify_bounded_witness(space: &FuzzySpace, e: &Entourage, r: f64, t: f64) -> Result<bool> {
    for &(x, y) in e.pairs() {
        if !(space.eval(x, y, t)? > 1.0 - r) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SakoCertificate {
    pub eps: f64,
    /// bounded witness for the support entourage `{(x,y) : y in proj(A_x)}`
    pub support: BoundedWitness,
    pub checked_pairs: usize,
    pub worst_ratio: f64,
    pub worst_pair: Option<(String, String)>,
    /// points with empty witness sets, reported rather than thrown
    pub structural_failures: Vec<String>,
    pub pass: bool,
}

/// The coarse-space reading of Property A: the variation condition is tested
/// on the pairs of a given entourage instead of a closeness threshold.
pub fn sako_property_a_verify(
    space: &FuzzySpace,
    e: &Entourage,
    w: &WitnessFamily,
    eps: f64,
) -> Result<SakoCertificate> {
    if w.len() != space.len() {
        return Err(Error::Structural(format!(
            "witness family covers {} points, space has {}",
            w.len(),
            space.len()
        )));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let mut structural_failures = Vec::new();
    let mut support_pairs = BTreeSet::new();
    for x in 0..w.len() {
        if w.set(x).is_empty() {
            structural_failures.push(space.points().label(x).to_string());
            continue;
        }
        for z in w.projection(x) {
            support_pairs.insert((x, z));
        }
    }
    if !structural_failures.is_empty() {
        return Ok(SakoCertificate {
            eps,
            support: BoundedWitness {
                r: 1.0,
                t: space.t_max(),
                min_m: 0.0,
            },
            checked_pairs: 0,
            worst_ratio: f64::INFINITY,
            worst_pair: None,
            structural_failures,
            pass: false,
        });
    }
    let support_entourage = Entourage {
        pairs: support_pairs,
    };
    let support = bounded_witness(space, &support_entourage)?;

    let tol = space.tolerance();
    let mut checked_pairs = 0usize;
    let mut worst_ratio = 0.0f64;
    let mut worst_pair = None;
    let mut pass = true;
    for &(x, y) in e.pairs() {
        if x >= w.len() || y >= w.len() {
            return Err(Error::Structural("entourage out of range".into()));
        }
        checked_pairs += 1;
        let delta = w.symmetric_difference_card(x, y);
        let inter = w.intersection_card(x, y);
        let ratio = if inter == 0 {
            if delta == 0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            delta as f64 / inter as f64
        };
        if ratio > worst_ratio || worst_pair.is_none() {
            worst_ratio = ratio;
            worst_pair = Some((
                space.points().label(x).to_string(),
                space.points().label(y).to_string(),
            ));
        }
        if !tol.certify_lt(delta as f64, eps * inter as f64).passed() {
            pass = false;
        }
    }
    Ok(SakoCertificate {
        eps,
        support,
        checked_pairs,
        worst_ratio,
        worst_pair,
        structural_failures,
        pass,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoarseAsdimReport {
    pub n: usize,
    pub e_disjoint_ok: bool,
    /// (family, member, member) of the first E-linked pair found
    pub offending: Option<(usize, usize, usize)>,
    pub bounded: BoundedWitness,
    pub pass: bool,
}

/// Families are E-disjoint when no entourage pair crosses two distinct
/// members of the same family; the union must cover and be uniformly
/// bounded (automatic on finite spaces, witness recorded).
pub fn coarse_asdim_verify(
    space: &FuzzySpace,
    e: &Entourage,
    families: &[Vec<Vec<usize>>],
) -> Result<CoarseAsdimReport> {
    if families.is_empty() {
        return Err(Error::Structural("no families supplied".into()));
    }
    let n_points = space.len();
    let mut covered = vec![false; n_points];
    let mut e_disjoint_ok = true;
    let mut offending = None;
    let mut union_pairs = BTreeSet::new();
    for (fi, fam) in families.iter().enumerate() {
        for (i, u) in fam.iter().enumerate() {
            for &x in u {
                if x >= n_points {
                    return Err(Error::Structural("family member out of range".into()));
                }
                covered[x] = true;
                for &y in u {
                    union_pairs.insert((x, y));
                }
            }
            for (j, v) in fam.iter().enumerate().skip(i + 1) {
                let linked = u
                    .iter()
                    .any(|&x| v.iter().any(|&y| e.contains(x, y) || e.contains(y, x)));
                if linked {
                    e_disjoint_ok = false;
                    if offending.is_none() {
                        offending = Some((fi, i, j));
                    }
                }
            }
        }
    }
    if !covered.into_iter().all(|c| c) {
        return Err(Error::Structural("families do not cover X".into()));
    }
    let bounded = bounded_witness(
        space,
        &Entourage {
            pairs: union_pairs,
        },
    )?;
    Ok(CoarseAsdimReport {
        n: families.len() - 1,
        e_disjoint_ok,
        offending,
        bounded,
        pass: e_disjoint_ok && bounded.min_m > 0.0,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoarseMapReport {
    /// per supplied bounded target set, a witness for its preimage
    pub proper_witnesses: Vec<BoundedWitness>,
    /// per supplied source entourage, a witness for its image entourage
    pub bornologous_witnesses: Vec<BoundedWitness>,
    pub proper: bool,
    pub bornologous: bool,
    /// fuzzy-level expansiveness verdict over the default ladder, for
    /// comparison with the entourage-level one
    pub fuzzy_expansive: bool,
    /// on finite spaces both properties hold for every total map; the
    /// witness values are the content
    pub finite_space_trivial: bool,
}

/// Properness (preimages of bounded sets bounded) and bornologousness
/// (images of entourages are entourages) over supplied finite ledgers.
pub fn coarse_map_check(
    source: &FuzzySpace,
    target: &FuzzySpace,
    f: &PointMap,
    source_entourages: &[Entourage],
    target_bounded_sets: &[Vec<usize>],
) -> Result<CoarseMapReport> {
    let mut proper_witnesses = Vec::new();
    for b in target_bounded_sets {
        let bset: BTreeSet<usize> = b.iter().copied().collect();
        let preimage: Vec<usize> = (0..source.len())
            .filter(|&x| bset.contains(&f.apply(x)))
            .collect();
        if preimage.is_empty() {
            // empty preimages are bounded vacuously; record a full witness
            proper_witnesses.push(BoundedWitness {
                r: 0.5,
                t: source.t_max(),
                min_m: 1.0,
            });
            continue;
        }
        let pairs = preimage
            .iter()
            .flat_map(|&x| preimage.iter().map(move |&y| (x, y)));
        proper_witnesses.push(bounded_witness(source, &Entourage::new(source.len(), pairs)?)?);
    }
    let mut bornologous_witnesses = Vec::new();
    for e in source_entourages {
        let image = Entourage::new(
            target.len(),
            e.pairs().iter().map(|&(x, y)| (f.apply(x), f.apply(y))),
        )?;
        bornologous_witnesses.push(bounded_witness(target, &image)?);
    }
    let proper = proper_witnesses.iter().all(|w| w.min_m > 0.0);
    let bornologous = bornologous_witnesses.iter().all(|w| w.min_m > 0.0);
    let fuzzy_expansive =
        check_uniformly_expansive(source, target, f, &DEFAULT_LADDER)?.all_positive;
    Ok(CoarseMapReport {
        proper_witnesses,
        bornologous_witnesses,
        proper,
        bornologous,
        fuzzy_expansive,
        finite_space_trivial: true,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoarseAxiomsReport {
    pub diagonal_ok: bool,
    pub inverse_ok: bool,
    pub compose_ok: bool,
    pub union_ok: bool,
    pub subset_ok: bool,
    pub pass: bool,
}

/// Constructive check of the coarse-structure axioms on the witnessed
/// family, over the supplied sample entourages: each derived entourage gets
/// an explicit witness which is then re-verified.
pub fn coarse_axioms_check(space: &FuzzySpace, samples: &[Entourage]) -> Result<CoarseAxiomsReport> {
    let n = space.len();
    let diag = Entourage::diagonal(n);
    let dw = bounded_witness(space, &diag)?;
    let diagonal_ok = verify_bounded_witness(space, &diag, dw.r, dw.t)?;

    let mut inverse_ok = true;
    let mut compose_ok = true;
    let mut union_ok = true;
    let mut subset_ok = true;
    for e1 in samples {
        if e1.pairs().is_empty() {
            continue;
        }
        let w1 = bounded_witness(space, e1)?;
        // symmetry of M: the same witness certifies the inverse
        inverse_ok &= verify_bounded_witness(space, &e1.inverse(), w1.r, w1.t)?;
        // any nonempty subset inherits the witness
        let half: Entourage = Entourage {
            pairs: e1.pairs().iter().copied().take(e1.pairs().len().div_ceil(2)).collect(),
        };
        if !half.pairs().is_empty() {
            subset_ok &= verify_bounded_witness(space, &half, w1.r, w1.t)?;
        }
        for e2 in samples {
            if e2.pairs().is_empty() {
                continue;
            }
            let w2 = bounded_witness(space, e2)?;
            // composition: times add, proximities compose through the t-norm
            let comp = e1.compose(e2);
            if !comp.pairs().is_empty() {
                let m = space.tnorm_apply(1.0 - w1.r, 1.0 - w2.r);
                compose_ok &=
                    verify_bounded_witness(space, &comp, 1.0 - m, w1.t + w2.t)?;
            }
            // union: the weaker witness covers both
            let u = e1.union(e2);
            let r = w1.r.max(w2.r);
            let t = w1.t.max(w2.t);
            union_ok &= verify_bounded_witness(space, &u, r, t)?;
        }
    }
    let pass = diagonal_ok && inverse_ok && compose_ok && union_ok && subset_ok;
    Ok(CoarseAxiomsReport {
        diagonal_ok,
        inverse_ok,
        compose_ok,
        union_ok,
        subset_ok,
        pass,
    })
}
