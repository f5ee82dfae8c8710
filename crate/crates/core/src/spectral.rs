//! Eigenvalues of Cayley graphs on F_q^d via additive characters.
//!
//! The eigenvalue attached to frequency m is λ_m = Σ_{x∈E} χ(x·m). We get
//! all of them at once from a transform over (F_p)^{dr}: the index of a
//! vector is already its base-p digit string, so one length-p DFT per digit
//! axis computes F(u) = Σ_x f(x) ω^{<x,u>} for the plain digit pairing.
//! Since Tr(x_j m_j) = Σ_a c_{j,a}(x) Tr(α^a m_j), the character sum is
//! λ_m = F(τ(m)) where τ replaces each coordinate by its trace-dual digits.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::space::{Space, DEFAULT_INDEX_CAP};

/// Integrality gate for integer quantities recovered from floating point.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// Lines longer than this go through rustfft instead of the direct sum.
const DIRECT_DFT_MAX: u32 = 64;

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// λ_m for every frequency index m.
    pub values: Vec<Complex64>,
    /// λ_0 = |E|.
    pub degree: usize,
    /// max_{m≠0} |λ_m|; zero when the space has a single point.
    pub mu: f64,
    /// Smallest nonzero m attaining `mu`.
    pub argmax: Option<usize>,
}

impl Spectrum {
    fn from_values(values: Vec<Complex64>, degree: usize) -> Self {
        let mu = values.iter().skip(1).map(|z| z.norm()).fold(0.0, f64::max);
        let argmax = (1..values.len()).find(|&m| values[m].norm() >= mu - 1e-9);
        Spectrum {
            values,
            degree,
            mu,
            argmax,
        }
    }

    /// The transform with the opposite sign convention, Σ_x E(x) χ(-x·m).
    pub fn transform_at(&self, space: &Space, m: usize) -> Complex64 {
        self.values[space.neg(m)]
    }

    /// Counts of |λ_m| over `bins` equal-width bins on [0, |E|].
    pub fn histogram(&self, bins: usize) -> Vec<u64> {
        let mut out = vec![0u64; bins];
        let top = self.degree.max(1) as f64;
        for z in &self.values {
            let b = ((z.norm() / top) * bins as f64).floor() as usize;
            out[b.min(bins - 1)] += 1;
        }
        out
    }

    /// Σ_m |λ_m|², which equals q^d |E|.
    pub fn parseval_sum(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn check_size(space: &Space) -> Result<()> {
    if space.size() as u64 > DEFAULT_INDEX_CAP {
        return Err(Error::cap("spectrum", space.size() as u128, DEFAULT_INDEX_CAP as u128));
    }
    Ok(())
}

/// Computes Σ_x f(x) χ(x·m) for every m with the axis-by-axis transform.
pub fn character_transform(space: &Space, f: &[Complex64]) -> Result<Vec<Complex64>> {
    check_size(space)?;
    if f.len() != space.size() {
        return Err(Error::DimensionMismatch {
            expected: space.size(),
            got: f.len(),
        });
    }
    let field = space.field();
    let p = field.p() as usize;
    let axes = space.dim() * field.r() as usize;
    let mut data = f.to_vec();

    let fft: Option<Arc<dyn Fft<f64>>> = (field.p() > DIRECT_DFT_MAX).then(|| FftPlanner::new().plan_fft_inverse(p));
    let roots: Vec<Complex64> = (0..p as u32).map(|t| field.root_of_unity(t)).collect();

    let mut stride = 1usize;
    for _ in 0..axes {
        let block = stride * p;
        data.par_chunks_mut(block).for_each(|chunk| {
            let mut line = vec![Complex64::default(); p];
            let mut out = vec![Complex64::default(); p];
            let mut scratch = fft
                .as_ref()
                .map(|f| vec![Complex64::default(); f.get_inplace_scratch_len()])
                .unwrap_or_default();
            for inner in 0..stride {
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = chunk[inner + j * stride];
                }
                match &fft {
                    Some(plan) => {
                        plan.process_with_scratch(&mut line, &mut scratch);
                        for (j, &z) in line.iter().enumerate() {
                            chunk[inner + j * stride] = z;
                        }
                    }
                    None => {
                        for (k, o) in out.iter_mut().enumerate() {
                            let mut acc = Complex64::default();
                            for (j, &z) in line.iter().enumerate() {
                                acc += z * roots[(j * k) % p];
                            }
                            *o = acc;
                        }
                        for (j, &z) in out.iter().enumerate() {
                            chunk[inner + j * stride] = z;
                        }
                    }
                }
            }
        });
        stride = block;
    }

    // λ_m = F(τ(m)), τ acting coordinatewise through the trace-dual table.
    let q = space.q() as usize;
    Ok((0..space.size())
        .into_par_iter()
        .map(|m| {
            let mut rest = m;
            let (mut tau, mut w) = (0usize, 1usize);
            for _ in 0..space.dim() {
                tau += field.trace_dual((rest % q) as u32) as usize * w;
                rest /= q;
                w *= q;
            }
            data[tau]
        })
        .collect())
}

/// All eigenvalues λ_m = Σ_{x∈E} χ(x·m) of the Cayley graph with connection set E.
pub fn fourier_spectrum(e: &PointSet) -> Result<Spectrum> {
    if e.is_empty() {
        return Err(Error::InvalidInput("spectrum of the empty set".into()));
    }
    let space = e.space();
    let f: Vec<Complex64> = e
        .bitmap()
        .iter()
        .map(|&b| {
            if b {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::default()
            }
        })
        .collect();
    let mut values = character_transform(space, &f)?;
    values[0] = Complex64::new(e.len() as f64, 0.0);
    Ok(Spectrum::from_values(values, e.len()))
}

/// Naive O(q^d |E|) evaluation of the same character sums. Exact integer
/// trace histograms per frequency, then one sum over p roots of unity.
pub fn direct_spectrum(e: &PointSet) -> Result<Spectrum> {
    if e.is_empty() {
        return Err(Error::InvalidInput("spectrum of the empty set".into()));
    }
    let space = e.space();
    check_size(space)?;
    let field = space.field();
    let p = field.p() as usize;
    let values = (0..space.size())
        .into_par_iter()
        .map(|m| {
            let mut hist = vec![0u64; p];
            for &x in e.members() {
                hist[field.trace(space.dot(x, m)) as usize] += 1;
            }
            hist.iter()
                .enumerate()
                .map(|(t, &c)| field.root_of_unity(t as u32) * c as f64)
                .sum()
        })
        .collect();
    Ok(Spectrum::from_values(values, e.len()))
}

/// μ = max_{m≠0} |λ_m| with the smallest attaining m.
pub fn second_eigenvalue(e: &PointSet) -> Result<(f64, Option<usize>)> {
    let s = fourier_spectrum(e)?;
    Ok((s.mu, s.argmax))
}

/// Neumaier-compensated sum.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Number of closed walks of length `len`, trace(A^len) = Σ_m λ_m^len.
pub fn closed_walk_count(e: &PointSet, len: u32) -> Result<u64> {
    let spectrum = fourier_spectrum(e)?;
    closed_walk_count_from(&spectrum, e, len)
}

pub fn closed_walk_count_from(spectrum: &Spectrum, e: &PointSet, len: u32) -> Result<u64> {
    if !e.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if len == 0 {
        return Err(Error::InvalidInput("walk length must be at least 1".into()));
    }
    let value = compensated_sum(spectrum.values.iter().map(|z| z.re.powi(len as i32)));
    let rounded = value.round();
    if (value - rounded).abs() > INTEGRALITY_TOL || rounded < 0.0 || rounded > 2f64.powi(53) {
        return Err(Error::NumericalDrift {
            value,
            tol: INTEGRALITY_TOL,
        });
    }
    Ok(rounded as u64)
}

/// A multiset of vectors: distinct support with positive multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiSet {
    support: Vec<usize>,
    mult: Vec<u64>,
}

impl MultiSet {
    pub fn new(support: Vec<usize>, mult: Vec<u64>) -> Result<Self> {
        if support.len() != mult.len() {
            return Err(Error::InvalidInput("support and multiplicity lengths differ".into()));
        }
        if mult.contains(&0) {
            return Err(Error::InvalidInput("multiplicities must be positive".into()));
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("support has repeated vectors".into()));
        }
        Ok(MultiSet { support, mult })
    }

    /// Collapses a list of vectors (with repeats) into a multiset.
    pub fn from_items(items: impl IntoIterator<Item = usize>) -> Self {
        let mut items: Vec<usize> = items.into_iter().collect();
        items.sort_unstable();
        let mut support = Vec::new();
        let mut mult: Vec<u64> = Vec::new();
        for x in items {
            if support.last() == Some(&x) {
                *mult.last_mut().unwrap() += 1;
            } else {
                support.push(x);
                mult.push(1);
            }
        }
        MultiSet { support, mult }
    }

    pub fn from_set(set: &PointSet) -> Self {
        MultiSet {
            support: set.members().to_vec(),
            mult: vec![1; set.len()],
        }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.mult
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.support.iter().copied().zip(self.mult.iter().copied())
    }

    /// |U| = Σ m(u).
    pub fn total(&self) -> u64 {
        self.mult.iter().sum()
    }

    /// Σ m(u)².
    pub fn sum_sq(&self) -> u128 {
        self.mult.iter().map(|&m| (m as u128) * (m as u128)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MixingReport {
    /// e(U, W) = Σ m(u) m(w) [u - w ∈ E].
    pub edges: u128,
    /// |E| |U| |W| / q^d.
    pub main_term: f64,
    pub deviation: f64,
    /// μ (Σ m(u)²)^{1/2} (Σ m(w)²)^{1/2}.
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Exact edge count between multisets, e(U, W) = Σ m(u) m(w) [u - w ∈ E].
pub fn edge_count(e: &PointSet, u: &MultiSet, w: &MultiSet) -> u128 {
    let space = e.space();
    let mut w_mult = vec![0u64; space.size()];
    for (x, m) in w.iter() {
        w_mult[x] += m;
    }
    u.iter()
        .map(|(x, mu)| {
            e.members()
                .iter()
                .map(|&s| w_mult[space.sub(x, s)] as u128)
                .sum::<u128>()
                * mu as u128
        })
        .sum()
}

/// Checks |e(U,W) - |E||U||W|/q^d| ≤ μ ‖m_U‖₂ ‖m_W‖₂ for a given μ.
pub fn mixing_check_with_mu(e: &PointSet, mu: f64, u: &MultiSet, w: &MultiSet) -> Result<MixingReport> {
    if !e.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let edges = edge_count(e, u, w);
    let n = e.space().size() as f64;
    let main_term = e.len() as f64 * u.total() as f64 * w.total() as f64 / n;
    let deviation = (edges as f64 - main_term).abs();
    let bound = mu * (u.sum_sq() as f64).sqrt() * (w.sum_sq() as f64).sqrt();
    let slack = bound - deviation;
    let holds = slack >= -1e-9 * bound.max(main_term).max(1.0);
    Ok(MixingReport {
        edges,
        main_term,
        deviation,
        bound,
        slack,
        holds,
    })
}

pub fn mixing_check(e: &PointSet, u: &MultiSet, w: &MultiSet) -> Result<MixingReport> {
    let (mu, _) = second_eigenvalue(e)?;
    mixing_check_with_mu(e, mu, u, w)
}
