//! Representation counts, additive energies, and good energy tuples.
//!
//! A k-energy tuple is (a_1..a_k, b_1..b_k) ∈ E^{2k} with Σ a_i = Σ b_i.
//! Exhaustive enumeration buckets the k-tuples of E by their sum (bucket
//! sizes are exactly the representation counts r_k(v)) and pairs tuples
//! within each bucket, so the work is T_k rather than |E|^{2k}.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::space::Space;

/// Upper bound on the number of k-tuples stored in sum buckets.
pub const BUCKET_CAP: u128 = 50_000_000;
/// Upper bound on the number of energy tuples visited exhaustively.
pub const ENUMERATION_CAP: u128 = 2_000_000_000;

/// r_k(v) = #{(a_1..a_k) ∈ E^k : Σ a_i = v} for every v.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub k: usize,
    pub counts: Vec<u64>,
}

impl CountTable {
    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// Number of v with r_k(v) > 0.
    pub fn support_size(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Σ_v r_k(v)².
    pub fn energy(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128 * c as u128).sum()
    }
}

fn size_pow(n: usize, k: usize) -> u128 {
    (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX)
}

/// k-fold representation counts by k - 1 exact convolutions with 1_E.
pub fn rep_counts(e: &PointSet, k: usize) -> Result<CountTable> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let total = size_pow(e.len(), k);
    if total > u64::MAX as u128 {
        return Err(Error::cap("|E|^k", total, u64::MAX as u128));
    }
    let space = e.space();
    let mut counts: Vec<u64> = e.bitmap().iter().map(|&b| b as u64).collect();
    let neg: Vec<usize> = e.members().iter().map(|&s| space.neg(s)).collect();
    for _ in 1..k {
        let prev = counts;
        counts = (0..space.size())
            .into_par_iter()
            .map(|v| neg.iter().map(|&ns| prev[space.add(v, ns)]).sum())
            .collect();
    }
    Ok(CountTable { k, counts })
}

/// T_k(E) = Σ_v r_k(v)²; T_1 = |E|.
pub fn additive_energy(e: &PointSet, k: usize) -> Result<u128> {
    Ok(rep_counts(e, k)?.energy())
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyInequalityReport {
    pub q: u32,
    pub d: usize,
    pub k: usize,
    pub size: usize,
    pub t_k: u128,
    pub t_k_minus_1: u128,
    /// |T_k - |E|^{2k-1}/q|, from the exact integer |q T_k - |E|^{2k-1}|.
    pub lhs: f64,
    /// q^{(d-1)/2} (T_k T_{k-1})^{1/2}.
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

fn require_on_unit_sphere(e: &PointSet) -> Result<()> {
    let space = e.space();
    match e.members().iter().find(|&&x| space.norm(x) != 1) {
        Some(&x) => Err(Error::NotOnSphere(x)),
        None => Ok(()),
    }
}

/// Evaluates |T_k(E) - |E|^{2k-1}/q| ≤ q^{(d-1)/2} T_k^{1/2} T_{k-1}^{1/2}
/// for E on the unit sphere.
pub fn energy_inequality_check(e: &PointSet, k: usize) -> Result<EnergyInequalityReport> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    require_on_unit_sphere(e)?;
    let space = e.space();
    let q = space.q();
    let d = space.dim();
    let t_k = additive_energy(e, k)?;
    let t_k_minus_1 = additive_energy(e, k - 1)?;
    let main = size_pow(e.len(), 2 * k - 1);
    let lhs = (t_k * q as u128).abs_diff(main) as f64 / q as f64;
    let rhs = (q as f64).powf((d as f64 - 1.0) / 2.0) * ((t_k as f64) * (t_k_minus_1 as f64)).sqrt();
    Ok(EnergyInequalityReport {
        q,
        d,
        k,
        size: e.len(),
        t_k,
        t_k_minus_1,
        lhs,
        rhs,
        slack: rhs - lhs,
        holds: lhs <= rhs * (1.0 + 1e-12),
    })
}

/// Subset sums Σ_{i∈I} x_i for every bitmask I, written into `out`.
fn subset_sums(space: &Space, xs: &[usize], out: &mut [usize]) {
    out[0] = 0;
    for (i, &x) in xs.iter().enumerate() {
        let half = 1 << i;
        for mask in 0..half {
            out[half + mask] = space.add(out[mask], x);
        }
    }
}

/// Goodness: Σ_{i∈I} a_i ≠ Σ_{j∈J} b_j for every pair of index sets other
/// than (∅, ∅) and ({1..k}, {1..k}).
pub fn is_good(space: &Space, a: &[usize], b: &[usize]) -> bool {
    let k = a.len();
    let n = 1usize << k;
    let mut sa = vec![0usize; n];
    let mut sb = vec![0usize; n];
    subset_sums(space, a, &mut sa);
    subset_sums(space, b, &mut sb);
    good_from_sums(&sa, &sb)
}

fn good_from_sums(sa: &[usize], sb: &[usize]) -> bool {
    let full = sa.len() - 1;
    for (i, &x) in sa.iter().enumerate() {
        for (j, &y) in sb.iter().enumerate() {
            if x == y && !(i == 0 && j == 0) && !(i == full && j == full) {
                return false;
            }
        }
    }
    true
}

/// Where a tuple lands in the partition: first failing property among
/// (a) spanning, (b) non-null distances, (c) goodness, else `Star`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TupleClass {
    Dependent,
    Null,
    Bad,
    Star,
}

/// Property (a): the differences a_i - a_1 (i ≥ 2) and b_j - a_1 span a
/// space of dimension 2k - 2, the most the energy relation allows.
pub fn spans_full(space: &Space, a: &[usize], b: &[usize]) -> bool {
    let k = a.len();
    let base = a[0];
    let diffs: Vec<usize> = a[1..].iter().chain(b).map(|&x| space.sub(x, base)).collect();
    space.rank(&diffs) == 2 * k - 2
}

/// Property (b): ||u - v|| ≠ 0 for every pair of the 2k tuple positions.
pub fn distances_nonnull(space: &Space, a: &[usize], b: &[usize]) -> bool {
    let pts: Vec<usize> = a.iter().chain(b).copied().collect();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if space.norm(space.sub(pts[i], pts[j])) == 0 {
                return false;
            }
        }
    }
    true
}

pub fn classify_tuple(space: &Space, a: &[usize], b: &[usize]) -> TupleClass {
    if !spans_full(space, a, b) {
        TupleClass::Dependent
    } else if !distances_nonnull(space, a, b) {
        TupleClass::Null
    } else if !is_good(space, a, b) {
        TupleClass::Bad
    } else {
        TupleClass::Star
    }
}

/// An energy tuple with its property flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnergyTuple {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub independent: bool,
    pub nondegenerate: bool,
    pub good: bool,
}

impl EnergyTuple {
    pub fn new(space: &Space, a: Vec<usize>, b: Vec<usize>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::InvalidInput("a and b must have the same positive length".into()));
        }
        let sum = |xs: &[usize]| xs.iter().fold(0, |acc, &x| space.add(acc, x));
        if sum(&a) != sum(&b) {
            return Err(Error::InvalidInput("Σ a_i ≠ Σ b_i".into()));
        }
        Ok(EnergyTuple {
            independent: spans_full(space, &a, &b),
            nondegenerate: distances_nonnull(space, &a, &b),
            good: is_good(space, &a, &b),
            a,
            b,
        })
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }
}

/// k-tuples of E grouped by their sum.
pub struct EnergyTuples<'a> {
    set: &'a PointSet,
    k: usize,
    offsets: Vec<usize>,
    /// Flattened k-tuples of positions into `set.members()`.
    tuples: Vec<u32>,
    total: u128,
}

/// The tuples in one sum bucket.
pub struct Bucket<'a> {
    pub sum: usize,
    k: usize,
    members: &'a [usize],
    positions: &'a [u32],
}

impl Bucket<'_> {
    pub fn len(&self) -> usize {
        self.positions.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Visits every (a, b) pair of tuples in the bucket, a outer, in
    /// lexicographic order of member positions.
    pub fn for_each_pair(&self, mut f: impl FnMut(&[usize], &[usize])) {
        let vecs: Vec<usize> = self.positions.iter().map(|&i| self.members[i as usize]).collect();
        for a in vecs.chunks_exact(self.k) {
            for b in vecs.chunks_exact(self.k) {
                f(a, b);
            }
        }
    }
}

impl<'a> EnergyTuples<'a> {
    pub fn new(set: &'a PointSet, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        let stored = size_pow(set.len(), k);
        if stored > BUCKET_CAP {
            return Err(Error::cap("k-tuples in sum buckets", stored, BUCKET_CAP));
        }
        let table = rep_counts(set, k)?;
        let total = table.energy();
        if total > ENUMERATION_CAP {
            return Err(Error::cap("energy tuples", total, ENUMERATION_CAP));
        }
        let space = set.space();
        let mut offsets = Vec::with_capacity(space.size() + 1);
        offsets.push(0);
        for &c in &table.counts {
            offsets.push(offsets.last().unwrap() + c as usize);
        }
        let mut cursor = offsets.clone();
        let mut tuples = vec![0u32; offsets[space.size()] * k];
        let mut pos = vec![0u32; k];
        let members = set.members();
        if !members.is_empty() {
            fill(space, members, &mut pos, 0, 0, &mut cursor, &mut tuples, k);
        }
        Ok(EnergyTuples {
            set,
            k,
            offsets,
            tuples,
            total,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// T_k.
    pub fn count(&self) -> u128 {
        self.total
    }

    pub fn bucket(&self, v: usize) -> Bucket<'_> {
        Bucket {
            sum: v,
            k: self.k,
            members: self.set.members(),
            positions: &self.tuples[self.offsets[v] * self.k..self.offsets[v + 1] * self.k],
        }
    }

    /// Runs `f` on every nonempty bucket in parallel; results come back in
    /// increasing order of the bucket sum.
    pub fn map_buckets<T: Send>(&self, f: impl Fn(Bucket<'_>) -> T + Sync) -> Vec<T> {
        let nonempty: Vec<usize> = (0..self.offsets.len() - 1)
            .filter(|&v| self.offsets[v + 1] > self.offsets[v])
            .collect();
        nonempty.into_par_iter().map(|v| f(self.bucket(v))).collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn fill(
    space: &Space,
    members: &[usize],
    pos: &mut [u32],
    depth: usize,
    partial: usize,
    cursor: &mut [usize],
    tuples: &mut [u32],
    k: usize,
) {
    for (i, &m) in members.iter().enumerate() {
        pos[depth] = i as u32;
        let sum = space.add(partial, m);
        if depth + 1 == k {
            let slot = cursor[sum];
            tuples[slot * k..(slot + 1) * k].copy_from_slice(pos);
            cursor[sum] += 1;
        } else {
            fill(space, members, pos, depth + 1, sum, cursor, tuples, k);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodCount {
    /// Exact count in exhaustive mode.
    pub exact: Option<u128>,
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: Option<u64>,
    pub mode: &'static str,
}

/// T_k^good(E). Exhaustive for k ∈ {2, 3}; the sampled estimator draws
/// (a_1..a_k, b_1..b_{k-1}) uniformly and solves for b_k.
pub fn good_energy_count(e: &PointSet, k: usize, mode: CountMode) -> Result<GoodCount> {
    match mode {
        CountMode::Exhaustive => {
            if !(2..=3).contains(&k) {
                return Err(Error::PreconditionFailed(format!(
                    "exhaustive good-tuple counting supports k = 2, 3 (got {k})"
                )));
            }
            let n = exhaustive_good(e, k)?;
            Ok(GoodCount {
                exact: Some(n),
                estimate: n as f64,
                std_error: 0.0,
                samples: 0,
                seed: None,
                mode: "exhaustive",
            })
        }
        CountMode::Sampled { samples, seed } => sampled_good(e, k, samples, seed),
    }
}

fn exhaustive_good(e: &PointSet, k: usize) -> Result<u128> {
    let tuples = EnergyTuples::new(e, k)?;
    let space = e.space();
    let n = 1usize << k;
    Ok(tuples
        .map_buckets(|bucket| {
            let mut sa = vec![0usize; n];
            let mut sb = vec![0usize; n];
            let mut count = 0u128;
            bucket.for_each_pair(|a, b| {
                subset_sums(space, a, &mut sa);
                subset_sums(space, b, &mut sb);
                count += good_from_sums(&sa, &sb) as u128;
            });
            count
        })
        .into_iter()
        .sum())
}

/// Every good k-energy tuple, in bucket order.
pub fn good_energy_tuples(e: &PointSet, k: usize) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let tuples = EnergyTuples::new(e, k)?;
    let space = e.space();
    Ok(tuples
        .map_buckets(|bucket| {
            let mut out = Vec::new();
            bucket.for_each_pair(|a, b| {
                if is_good(space, a, b) {
                    out.push((a.to_vec(), b.to_vec()));
                }
            });
            out
        })
        .into_iter()
        .flatten()
        .collect())
}

fn sampled_good(e: &PointSet, k: usize, samples: u64, seed: u64) -> Result<GoodCount> {
    if k == 0 || samples == 0 {
        return Err(Error::InvalidInput(
            "sampling needs k ≥ 1 and a positive sample size".into(),
        ));
    }
    let space = e.space();
    let members = e.members();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    let mut a = vec![0usize; k];
    let mut b = vec![0usize; k];
    if !members.is_empty() {
        for _ in 0..samples {
            for x in a.iter_mut() {
                *x = members[rng.gen_range(0..members.len())];
            }
            for x in b.iter_mut().take(k - 1) {
                *x = members[rng.gen_range(0..members.len())];
            }
            let sa = a.iter().fold(0, |acc, &x| space.add(acc, x));
            let sb = b[..k - 1].iter().fold(0, |acc, &x| space.add(acc, x));
            b[k - 1] = space.sub(sa, sb);
            if e.contains(b[k - 1]) && is_good(space, &a, &b) {
                hits += 1;
            }
        }
    }
    let scale = (e.len() as f64).powi(2 * k as i32 - 1);
    let frac = hits as f64 / samples as f64;
    Ok(GoodCount {
        exact: None,
        estimate: scale * frac,
        std_error: scale * (frac * (1.0 - frac) / samples as f64).sqrt(),
        samples,
        seed: Some(seed),
        mode: "sampled",
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub total: u128,
    pub dependent: u128,
    pub null: u128,
    pub bad: u128,
    pub star: u128,
    /// Tuples satisfying (c) regardless of (a) and (b); equals T_k^good.
    pub good: u128,
}

impl Classification {
    fn add(&mut self, class: TupleClass, good: bool) {
        self.total += 1;
        self.good += good as u128;
        match class {
            TupleClass::Dependent => self.dependent += 1,
            TupleClass::Null => self.null += 1,
            TupleClass::Bad => self.bad += 1,
            TupleClass::Star => self.star += 1,
        }
    }

    fn merge(mut self, o: Classification) -> Self {
        self.total += o.total;
        self.dependent += o.dependent;
        self.null += o.null;
        self.bad += o.bad;
        self.star += o.star;
        self.good += o.good;
        self
    }
}

/// Partitions all k-energy tuples of E by first failing property in the
/// order (a), (b), (c).
pub fn classify_tuples(e: &PointSet, k: usize) -> Result<Classification> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    let tuples = EnergyTuples::new(e, k)?;
    let space = e.space();
    Ok(tuples
        .map_buckets(|bucket| {
            let mut c = Classification::default();
            bucket.for_each_pair(|a, b| {
                let good = is_good(space, a, b);
                c.add(classify_tuple(space, a, b), good);
            });
            c
        })
        .into_iter()
        .fold(Classification::default(), Classification::merge))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Doubling {
    pub sumset_size: usize,
    /// K = |E + E| / |E|.
    pub ratio: f64,
}

pub fn doubling(e: &PointSet) -> Result<Doubling> {
    if e.is_empty() {
        return Err(Error::InvalidInput("doubling of the empty set".into()));
    }
    let sumset_size = rep_counts(e, 2)?.support_size();
    Ok(Doubling {
        sumset_size,
        ratio: sumset_size as f64 / e.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::unit_sphere;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair_f3() -> PointSet {
        let s = Space::build(3, 1, 2).unwrap();
        let a = s.encode(&[0, 1]).unwrap();
        let b = s.encode(&[0, 2]).unwrap();
        PointSet::from_indices(s, [a, b]).unwrap()
    }

    fn sphere(p: u32, d: usize) -> PointSet {
        unit_sphere(&Space::build(p, 1, d).unwrap())
    }

    fn brute_energy(e: &PointSet, k: usize) -> u128 {
        let s = e.space();
        let m = e.members();
        let mut count = 0u128;
        let total = m.len().pow(2 * k as u32);
        for code in 0..total {
            let mut c = code;
            let mut diff = 0usize;
            for i in 0..2 * k {
                let x = m[c % m.len()];
                c /= m.len();
                diff = if i < k { s.add(diff, x) } else { s.sub(diff, x) };
            }
            count += (diff == 0) as u128;
        }
        count
    }

    #[test]
    fn rep_counts_pair() {
        let e = pair_f3();
        let s = e.space();
        let t = rep_counts(&e, 2).unwrap();
        assert_eq!(t.counts[0], 2);
        assert_eq!(t.counts[s.encode(&[0, 1]).unwrap()], 1);
        assert_eq!(t.counts[s.encode(&[0, 2]).unwrap()], 1);
        assert_eq!(t.total(), 4);
        assert_eq!(
            rep_counts(&e, 1).unwrap().counts,
            e.bitmap().iter().map(|&b| b as u64).collect::<Vec<_>>()
        );
        assert_eq!(rep_counts(&sphere(5, 2), 2).unwrap().total(), 16);
    }

    #[test]
    fn energy_examples() {
        assert_eq!(additive_energy(&pair_f3(), 2).unwrap(), 6);
        assert_eq!(additive_energy(&sphere(5, 2), 1).unwrap(), 4);
        let c = sphere(3, 2);
        assert_eq!(additive_energy(&c, 2).unwrap(), brute_energy(&c, 2));
    }

    #[test]
    fn energy_matches_brute_force_on_random_sets() {
        let s = Space::build(5, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let n = rng.gen_range(1..=8);
            let mut pts: Vec<usize> = (0..s.size()).collect();
            for i in 0..n {
                let j = rng.gen_range(i..pts.len());
                pts.swap(i, j);
            }
            let e = PointSet::from_indices(s.clone(), pts[..n].to_vec()).unwrap();
            for k in 1..=3 {
                assert_eq!(additive_energy(&e, k).unwrap(), brute_energy(&e, k));
            }
        }
    }

    #[test]
    fn good_count_examples() {
        let ex = CountMode::Exhaustive;
        assert_eq!(good_energy_count(&pair_f3(), 2, ex).unwrap().exact, Some(0));
        assert_eq!(good_energy_count(&sphere(5, 2), 2, ex).unwrap().exact, Some(0));
        let n = good_energy_count(&sphere(7, 3), 2, ex).unwrap().exact.unwrap();
        assert!(n > 0);
        assert_eq!(n, good_energy_tuples(&sphere(7, 3), 2).unwrap().len() as u128);
    }

    #[test]
    fn good_count_matches_naive_quadruple_loop() {
        // Direct loop over E^3 with b_2 solved, goodness checked by listing
        // all fourteen signed partial sums by hand.
        let e = sphere(5, 3);
        let s = e.space();
        let m = e.members();
        let mut naive = 0u128;
        for &a1 in m {
            for &a2 in m {
                for &b1 in m {
                    let b2 = s.sub(s.add(a1, a2), b1);
                    if !e.contains(b2) {
                        continue;
                    }
                    let sums = [
                        a1,
                        a2,
                        s.add(a1, a2),
                        s.neg(b1),
                        s.neg(b2),
                        s.neg(s.add(b1, b2)),
                        s.sub(a1, b1),
                        s.sub(a1, b2),
                        s.sub(a2, b1),
                        s.sub(a2, b2),
                        s.sub(a1, s.add(b1, b2)),
                        s.sub(a2, s.add(b1, b2)),
                        s.sub(s.add(a1, a2), b1),
                        s.sub(s.add(a1, a2), b2),
                    ];
                    naive += sums.iter().all(|&x| x != 0) as u128;
                }
            }
        }
        let fast = good_energy_count(&e, 2, CountMode::Exhaustive).unwrap().exact.unwrap();
        assert_eq!(fast, naive);
    }

    #[test]
    fn sampled_mode_is_close() {
        let e = sphere(7, 3);
        let exact = good_energy_count(&e, 2, CountMode::Exhaustive).unwrap().estimate;
        let est = good_energy_count(
            &e,
            2,
            CountMode::Sampled {
                samples: 200_000,
                seed: 5,
            },
        )
        .unwrap();
        assert!((est.estimate - exact).abs() < 5.0 * est.std_error + 1.0);
        let again = good_energy_count(
            &e,
            2,
            CountMode::Sampled {
                samples: 200_000,
                seed: 5,
            },
        )
        .unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn exhaustive_rejects_large_k() {
        assert!(matches!(
            good_energy_count(&pair_f3(), 4, CountMode::Exhaustive),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn inequality_examples() {
        assert!(energy_inequality_check(&sphere(5, 2), 2).unwrap().holds);
        let s = Space::build(7, 1, 2).unwrap();
        let c = unit_sphere(&s);
        let x = c.members()[0];
        let e = PointSet::from_indices(s.clone(), [x, s.neg(x)]).unwrap();
        assert!(energy_inequality_check(&e, 2).unwrap().holds);
        let off = PointSet::from_indices(s, [0]).unwrap();
        assert_eq!(energy_inequality_check(&off, 2).unwrap_err(), Error::NotOnSphere(0));
    }

    #[test]
    fn classification_partitions() {
        for (p, d) in [(3, 2), (5, 3), (7, 3)] {
            let e = sphere(p, d);
            let c = classify_tuples(&e, 2).unwrap();
            assert_eq!(c.dependent + c.null + c.bad + c.star, c.total);
            assert_eq!(c.total, additive_energy(&e, 2).unwrap());
            let good = good_energy_count(&e, 2, CountMode::Exhaustive).unwrap().exact.unwrap();
            assert_eq!(c.good, good);
            assert!(c.star <= good);
        }
        assert_eq!(classify_tuples(&sphere(3, 2), 2).unwrap().star, 0);
    }

    #[test]
    fn null_count_matches_direct_filter() {
        let e = sphere(7, 3);
        let s = e.space();
        let c = classify_tuples(&e, 2).unwrap();
        let m = e.members();
        let mut direct = 0u128;
        for &a1 in m {
            for &a2 in m {
                for &b1 in m {
                    let b2 = s.sub(s.add(a1, a2), b1);
                    if !e.contains(b2) {
                        continue;
                    }
                    let x2 = s.sub(a2, a1);
                    let y1 = s.sub(b1, a1);
                    if s.rank(&[x2, y1]) < 2 {
                        continue;
                    }
                    let pts = [a1, a2, b1, b2];
                    let null = (0..4).any(|i| (i + 1..4).any(|j| s.norm(s.sub(pts[i], pts[j])) == 0));
                    direct += null as u128;
                }
            }
        }
        assert_eq!(c.null, direct);
    }

    #[test]
    fn doubling_examples() {
        let d = doubling(&pair_f3()).unwrap();
        assert_eq!(d.sumset_size, 3);
        let s = Space::build(3, 1, 2).unwrap();
        let full = doubling(&PointSet::full(s)).unwrap();
        assert_eq!(full.sumset_size, 9);
        assert_eq!(full.ratio, 1.0);
        assert_eq!(doubling(&sphere(5, 2)).unwrap().sumset_size, 9);
    }

    #[test]
    fn cauchy_schwarz_lower_bound() {
        for (p, d) in [(3, 2), (5, 2), (5, 3), (7, 2)] {
            let e = sphere(p, d);
            let t2 = additive_energy(&e, 2).unwrap();
            let ss = doubling(&e).unwrap().sumset_size as u128;
            assert!(t2 * ss >= (e.len() as u128).pow(4));
        }
    }

    #[test]
    fn energy_tuple_flags() {
        let e = sphere(7, 3);
        let s = e.space();
        let (a, b) = good_energy_tuples(&e, 2).unwrap().remove(0);
        let t = EnergyTuple::new(s, a.clone(), b.clone()).unwrap();
        assert!(t.good);
        assert_eq!(t.k(), 2);
        assert!(EnergyTuple::new(s, a, vec![b[0], b[0]]).is_err() || b[0] == b[1]);
    }
}
