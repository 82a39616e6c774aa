//! Distributions over isomorphism classes, total-variation distance and the
//! exact stationary vector of an enumerated kernel.

use crate::census::CensusReport;
use crate::chain::KernelMatrix;
use crate::error::{Error, Result};
use crate::iso::{canonical_form, CanonicalForm};
use crate::Nfa;
use std::collections::BTreeMap;

/// A probability distribution keyed by canonical form.
#[derive(Clone, Debug)]
pub struct Distribution {
    probs: BTreeMap<CanonicalForm, f64>,
}

impl Distribution {
    /// Validates non-negativity (up to -1e-12 of round-off, clamped) and unit
    /// mass within 1e-9.
    pub fn new(probs: BTreeMap<CanonicalForm, f64>) -> Result<Self> {
        let mut clamped = probs;
        let mut sum = 0.0;
        for p in clamped.values_mut() {
            if *p < 0.0 {
                if *p < -1e-12 {
                    return Err(Error::InvalidDistribution(format!(
                        "negative probability {p}"
                    )));
                }
                *p = 0.0;
            }
            sum += *p;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!(
                "total mass {sum} is not 1"
            )));
        }
        Ok(Distribution { probs: clamped })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, key: &CanonicalForm) -> f64 {
        self.probs.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalForm, f64)> {
        self.probs.iter().map(|(k, &v)| (k, v))
    }

    /// CSV rows `digest,probability`, in canonical-form order.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write;
        let mut out = String::from("digest,probability\n");
        for (k, v) in self.iter() {
            let _ = writeln!(out, "{:016x},{v:.17e}", k.digest());
        }
        out
    }
}

/// `(1/2) Σ |p - q|` over a shared support. Mismatched supports are an error
/// rather than an implicit zero-extension.
pub fn tv_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.probs.len() != q.probs.len() || p.probs.keys().zip(q.probs.keys()).any(|(a, b)| a != b) {
        return Err(Error::MismatchedSupport);
    }
    Ok(p.probs
        .values()
        .zip(q.probs.values())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / 2.0)
}

impl CensusReport {
    /// Uniform over the isomorphism classes: weight `1/γ` each.
    pub fn uniform_class_law(&self) -> Distribution {
        let g = self.gamma as f64;
        Distribution::new(
            self.classes
                .iter()
                .map(|c| (canon_key(&c.canonical), 1.0 / g))
                .collect(),
        )
        .expect("uniform law is valid")
    }

    /// The class law induced by the uniform distribution over labeled
    /// automata: each class weighted by its labeled size.
    pub fn labeled_class_law(&self) -> Distribution {
        let t = self.total as f64;
        Distribution::new(
            self.classes
                .iter()
                .map(|c| (canon_key(&c.canonical), c.size as f64 / t))
                .collect(),
        )
        .expect("size-weighted law is valid")
    }
}

fn canon_key(s: &str) -> CanonicalForm {
    // census reports store the canonical document text verbatim
    CanonicalForm::from_canonical_bytes(s.as_bytes().to_vec())
}

/// Empirical distribution of sampled automata over the census classes.
/// Classes never hit get probability zero; a sample outside the census is an
/// error (it would mean the sampler escaped the class).
pub fn empirical_class_distribution<I>(samples: I, census: &CensusReport) -> Result<Distribution>
where
    I: IntoIterator<Item = Nfa>,
{
    let mut counts: BTreeMap<CanonicalForm, u64> = BTreeMap::new();
    let mut total = 0u64;
    for a in samples {
        let canon = canonical_form(&a)?;
        if census.find(&canon).is_none() {
            return Err(Error::UnknownClass(canon.as_str().to_string()));
        }
        *counts.entry(canon).or_insert(0) += 1;
        total += 1;
    }
    if total == 0 {
        return Err(Error::InvalidDistribution("no samples".into()));
    }
    let mut probs: BTreeMap<CanonicalForm, f64> = census
        .classes
        .iter()
        .map(|c| (canon_key(&c.canonical), 0.0))
        .collect();
    for (canon, count) in counts {
        *probs.get_mut(&canon).expect("checked membership") = count as f64 / total as f64;
    }
    Distribution::new(probs)
}

/// Aggregates counts of already-canonicalized samples; same contract as
/// [`empirical_class_distribution`] but usable when the caller canonicalizes
/// on the fly (e.g. inside a parallel sampling loop).
pub fn empirical_from_counts(
    counts: &BTreeMap<CanonicalForm, u64>,
    census: &CensusReport,
) -> Result<Distribution> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::InvalidDistribution("no samples".into()));
    }
    let mut probs: BTreeMap<CanonicalForm, f64> = census
        .classes
        .iter()
        .map(|c| (canon_key(&c.canonical), 0.0))
        .collect();
    for (canon, &count) in counts {
        match probs.get_mut(canon) {
            Some(slot) => *slot = count as f64 / total as f64,
            None => return Err(Error::UnknownClass(canon.as_str().to_string())),
        }
    }
    Distribution::new(probs)
}

/// The unique stationary vector of an irreducible kernel, by direct solution
/// of `π M = π`, `Σ π = 1` (Gaussian elimination with partial pivoting),
/// verified as a fixed point to 1e-10.
pub fn exact_stationary(m: &KernelMatrix) -> Result<Vec<f64>> {
    if !m.is_strongly_connected() {
        return Err(Error::ReducibleKernel);
    }
    let d = m.dim();
    // Solve Aᵀ x = b where the first d-1 equations are (M - I) columns and
    // the last is Σ x = 1.
    let mut a = vec![0.0f64; d * d];
    let mut b = vec![0.0f64; d];
    for col in 0..d.saturating_sub(1) {
        for row in 0..d {
            a[col * d + row] = m.prob(row, col) - if row == col { 1.0 } else { 0.0 };
        }
    }
    for row in 0..d {
        a[(d - 1) * d + row] = 1.0;
    }
    b[d - 1] = 1.0;

    // Gaussian elimination with partial pivoting on the row-major system.
    for pivot in 0..d {
        let mut best = pivot;
        for r in pivot + 1..d {
            if a[r * d + pivot].abs() > a[best * d + pivot].abs() {
                best = r;
            }
        }
        if a[best * d + pivot].abs() < 1e-300 {
            return Err(Error::ReducibleKernel);
        }
        if best != pivot {
            for c in 0..d {
                a.swap(pivot * d + c, best * d + c);
            }
            b.swap(pivot, best);
        }
        let diag = a[pivot * d + pivot];
        for r in pivot + 1..d {
            let factor = a[r * d + pivot] / diag;
            if factor == 0.0 {
                continue;
            }
            for c in pivot..d {
                a[r * d + c] -= factor * a[pivot * d + c];
            }
            b[r] -= factor * b[pivot];
        }
    }
    let mut x = vec![0.0f64; d];
    for r in (0..d).rev() {
        let mut acc = b[r];
        for c in r + 1..d {
            acc -= a[r * d + c] * x[c];
        }
        x[r] = acc / a[r * d + r];
    }

    let image = m.mul_left(&x);
    let residual = image
        .iter()
        .zip(&x)
        .map(|(u, v)| (u - v).abs())
        .fold(0.0f64, f64::max);
    if residual > 1e-10 {
        return Err(Error::Internal(format!(
            "stationary solve residual {residual:.3e} exceeds 1e-10"
        )));
    }
    Ok(x)
}

/// Projects a stationary vector over labeled automata onto the census
/// classes.
pub fn stationary_class_law(
    m: &KernelMatrix,
    stationary: &[f64],
    census: &CensusReport,
) -> Result<Distribution> {
    let mut probs: BTreeMap<CanonicalForm, f64> = census
        .classes
        .iter()
        .map(|c| (canon_key(&c.canonical), 0.0))
        .collect();
    for (a, &p) in m.automata().iter().zip(stationary) {
        let canon = canonical_form(a)?;
        match probs.get_mut(&canon) {
            Some(slot) => *slot += p,
            None => return Err(Error::UnknownClass(canon.as_str().to_string())),
        }
    }
    Distribution::new(probs)
}
