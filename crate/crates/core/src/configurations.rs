//! Spherical configurations and their congruence classes.
//!
//! Two ordered configurations are treated as congruent when their Gram
//! matrices [p_i · p_j] agree. For tuples whose span is nondegenerate this is
//! the same as lying in one O(d, F_q) orbit.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::energy::{classify_tuple, EnergyTuples, TupleClass, ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::field::Elem;
use crate::pointset::{unit_sphere, PointSet};
use crate::space::Space;

/// Most points for which the unordered canonical form is computed.
pub const MAX_CANONICAL_POINTS: usize = 6;

/// An ordered list of points on a common sphere ||p - center|| = radius.
#[derive(Debug, Clone)]
pub struct SphericalConfig {
    space: Arc<Space>,
    points: Vec<usize>,
    center: usize,
    radius: Elem,
}

impl SphericalConfig {
    /// Points on the unit sphere about `center`.
    pub fn new(space: Arc<Space>, points: Vec<usize>, center: usize) -> Result<Self> {
        Self::with_radius(space, points, center, 1)
    }

    pub fn with_radius(space: Arc<Space>, points: Vec<usize>, center: usize, radius: Elem) -> Result<Self> {
        if center >= space.size() {
            return Err(Error::InvalidInput(format!("center {center} is not a vector index")));
        }
        for &p in &points {
            if p >= space.size() || space.norm(space.sub(p, center)) != radius {
                return Err(Error::NotOnSphere(p));
            }
        }
        Ok(SphericalConfig {
            space,
            points,
            center,
            radius,
        })
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn radius(&self) -> Elem {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// x_i = p_i - p_0 for i ≥ 1.
    pub fn differences(&self) -> Vec<usize> {
        match self.points.split_first() {
            Some((&base, rest)) => rest.iter().map(|&p| self.space.sub(p, base)).collect(),
            None => Vec::new(),
        }
    }

    /// Applies a map to every point and to the center.
    pub fn map(&self, f: impl Fn(usize) -> usize) -> Result<Self> {
        Self::with_radius(
            self.space.clone(),
            self.points.iter().map(|&p| f(p)).collect(),
            f(self.center),
            self.radius,
        )
    }
}

/// dim Span(X - X).
pub fn span_dimension(cfg: &SphericalConfig) -> usize {
    cfg.space.rank(&cfg.differences())
}

/// The Gram matrix of an ordered configuration, serialized row-major as
/// little-endian u32 element codes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint {
    n: usize,
    bytes: Vec<u8>,
}

impl Fingerprint {
    pub fn from_gram(n: usize, gram: &[Elem]) -> Self {
        assert_eq!(gram.len(), n * n, "Gram matrix must be n × n");
        Fingerprint {
            n,
            bytes: gram.iter().flat_map(|g| g.to_le_bytes()).collect(),
        }
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn gram(&self) -> Vec<Elem> {
        self.bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect()
    }

    /// First 16 hex digits of the SHA-256 of the bytes.
    pub fn hash(&self) -> String {
        Sha256::digest(&self.bytes)
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Lexicographically smallest fingerprint over simultaneous row and
    /// column permutations, i.e. the fingerprint of the unordered point set.
    pub fn canonical(&self) -> Result<Fingerprint> {
        let n = self.n;
        if n > MAX_CANONICAL_POINTS {
            return Err(Error::PreconditionFailed(format!(
                "unordered canonical form supports at most {MAX_CANONICAL_POINTS} points (got {n})"
            )));
        }
        let gram = self.gram();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best: Option<Vec<Elem>> = None;
        let mut buf = vec![0; n * n];
        loop {
            for i in 0..n {
                for j in 0..n {
                    buf[i * n + j] = gram[perm[i] * n + perm[j]];
                }
            }
            if best.as_ref().is_none_or(|b| buf < *b) {
                best = Some(buf.clone());
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        Ok(Fingerprint::from_gram(n, &best.unwrap_or_default()))
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn gram_of(space: &Space, points: &[usize]) -> Fingerprint {
    let n = points.len();
    let mut gram = vec![0; n * n];
    for i in 0..n {
        for j in i..n {
            let g = space.dot(points[i], points[j]);
            gram[i * n + j] = g;
            gram[j * n + i] = g;
        }
    }
    Fingerprint::from_gram(n, &gram)
}

pub fn gram_fingerprint(cfg: &SphericalConfig) -> Fingerprint {
    gram_of(&cfg.space, &cfg.points)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassEntry {
    pub hash: String,
    /// μ(X): how many Q-tuples have this fingerprint.
    pub multiplicity: u128,
    /// First tuple (a_1..a_k, b_1..b_k) met in increasing order of the sum.
    pub representative: Vec<usize>,
    #[serde(skip)]
    pub fingerprint: Fingerprint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassTable {
    pub k: usize,
    /// Ordered congruence classes, sorted by fingerprint bytes.
    pub classes: Vec<ClassEntry>,
    /// Σ μ(X), the number of tuples satisfying (a), (b) and (c).
    pub total: u128,
    /// Classes after forgetting the order of the 2k points.
    pub unordered_classes: usize,
}

impl ClassTable {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Groups the k-energy tuples of E satisfying (a), (b) and (c) by the Gram
/// fingerprint of the 2k-point configuration (a_1..a_k, b_1..b_k).
pub fn congruence_class_count(e: &PointSet, k: usize) -> Result<ClassTable> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    let tuples = EnergyTuples::new(e, k)?;
    let space = e.space();
    let partial = tuples.map_buckets(|bucket| {
        let mut table: BTreeMap<Fingerprint, (u128, Vec<usize>)> = BTreeMap::new();
        let mut pts = Vec::with_capacity(2 * k);
        bucket.for_each_pair(|a, b| {
            if classify_tuple(space, a, b) != TupleClass::Star {
                return;
            }
            pts.clear();
            pts.extend_from_slice(a);
            pts.extend_from_slice(b);
            table.entry(gram_of(space, &pts)).or_insert_with(|| (0, pts.clone())).0 += 1;
        });
        table
    });

    let mut merged: BTreeMap<Fingerprint, (u128, Vec<usize>)> = BTreeMap::new();
    for table in partial {
        for (fp, (count, rep)) in table {
            merged.entry(fp).or_insert((0, rep)).0 += count;
        }
    }
    let mut unordered = std::collections::BTreeSet::new();
    let mut classes = Vec::with_capacity(merged.len());
    for (fp, (multiplicity, representative)) in merged {
        unordered.insert(fp.canonical()?);
        classes.push(ClassEntry {
            hash: fp.hash(),
            multiplicity,
            representative,
            fingerprint: fp,
        });
    }
    Ok(ClassTable {
        k,
        total: classes.iter().map(|c| c.multiplicity).sum(),
        unordered_classes: unordered.len(),
        classes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerateSpan {
    pub n: usize,
    pub sphere_size: usize,
    /// L.
    pub count: u128,
    /// L q² / |S|^{n+1}.
    pub ratio: f64,
}

/// Counts (v_0..v_n) ∈ (S^{d-1})^{n+1} such that some v_i - v_0 equals
/// Σ_{j≠i} a_j (v_j - v_0) with every a_j nonzero. A tuple is counted once
/// however many i witness it.
pub fn degenerate_span_count(space: &Arc<Space>, n: usize) -> Result<DegenerateSpan> {
    if !(2..=3).contains(&n) {
        return Err(Error::PreconditionFailed(format!("n must be 2 or 3 (got {n})")));
    }
    if space.dim() <= n {
        return Err(Error::PreconditionFailed(format!(
            "dimension {} must exceed n = {n}",
            space.dim()
        )));
    }
    let s = unit_sphere(space);
    let q = space.q() as u128;
    let work = (s.len() as u128).pow(n as u32 + 1) * n as u128 * (q - 1).pow(n as u32 - 1);
    if work > ENUMERATION_CAP {
        return Err(Error::cap("degenerate span enumeration", work, ENUMERATION_CAP));
    }
    let members = s.members();
    let count: u128 = members
        .par_iter()
        .map(|&v0| {
            let mut tuple = vec![v0; n + 1];
            let mut diffs = vec![0usize; n];
            let mut hits = 0u128;
            degenerate_rec(space, members, &mut tuple, &mut diffs, 1, &mut hits);
            hits
        })
        .sum();
    let sphere_size = s.len();
    Ok(DegenerateSpan {
        n,
        sphere_size,
        count,
        ratio: count as f64 * (q * q) as f64 / (sphere_size as f64).powi(n as i32 + 1),
    })
}

fn degenerate_rec(
    space: &Space,
    members: &[usize],
    tuple: &mut [usize],
    diffs: &mut [usize],
    depth: usize,
    hits: &mut u128,
) {
    if depth == tuple.len() {
        *hits += is_degenerate(space, diffs) as u128;
        return;
    }
    for &v in members {
        tuple[depth] = v;
        diffs[depth - 1] = space.sub(v, tuple[0]);
        degenerate_rec(space, members, tuple, diffs, depth + 1, hits);
    }
}

/// Whether some diffs[i] is a combination of the others with all
/// coefficients nonzero.
fn is_degenerate(space: &Space, diffs: &[usize]) -> bool {
    let q = space.q();
    let n = diffs.len();
    (0..n).any(|i| {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).map(|j| diffs[j]).collect();
        let mut coeffs = vec![1 as Elem; others.len()];
        loop {
            let combo = others
                .iter()
                .zip(&coeffs)
                .fold(0, |acc, (&x, &c)| space.add(acc, space.scale(c, x)));
            if combo == diffs[i] {
                return true;
            }
            // odometer over (F_q^*)^{n-1}
            let Some(pos) = coeffs.iter().position(|&c| c + 1 < q) else {
                return false;
            };
            coeffs[pos] += 1;
            coeffs[..pos].iter_mut().for_each(|c| *c = 1);
        }
    })
}

/// N(X): ordered tuples (u_1..u_m) of E with u_i · u_j = x_i · x_j for all
/// i, j. Parallel over the choice of u_1.
pub fn count_isometric_copies(x: &SphericalConfig, e: &PointSet) -> Result<u128> {
    let space = e.space();
    if x.space.size() != space.size() || x.space.dim() != space.dim() {
        return Err(Error::InvalidInput(
            "configuration and set live in different spaces".into(),
        ));
    }
    let m = x.len();
    if m == 0 {
        return Ok(1);
    }
    let first_two = (e.len() as u128).pow(m.min(2) as u32);
    if first_two > ENUMERATION_CAP {
        return Err(Error::cap("isometric copy search", first_two, ENUMERATION_CAP));
    }
    let gram = gram_fingerprint(x).gram();
    let members = e.members();
    Ok(members
        .par_iter()
        .filter(|&&u| space.dot(u, u) == gram[0])
        .map(|&u| {
            let mut chosen = vec![u; m];
            let mut hits = 0u128;
            copies_rec(space, members, &gram, m, &mut chosen, 1, &mut hits);
            hits
        })
        .sum())
}

fn copies_rec(
    space: &Space,
    members: &[usize],
    gram: &[Elem],
    m: usize,
    chosen: &mut [usize],
    depth: usize,
    hits: &mut u128,
) {
    if depth == m {
        *hits += 1;
        return;
    }
    for &u in members {
        if space.dot(u, u) != gram[depth * m + depth] {
            continue;
        }
        if (0..depth).all(|i| space.dot(chosen[i], u) == gram[i * m + depth]) {
            chosen[depth] = u;
            copies_rec(space, members, gram, m, chosen, depth + 1, hits);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::classify_tuples;

    fn sphere_of(p: u32, d: usize) -> (Arc<Space>, PointSet) {
        let s = Space::build(p, 1, d).unwrap();
        let e = unit_sphere(&s);
        (s, e)
    }

    fn idx(s: &Space, c: &[u32]) -> usize {
        s.encode(c).unwrap()
    }

    #[test]
    fn span_dimension_examples() {
        let (s, _) = sphere_of(7, 3);
        let e1 = idx(&s, &[1, 0, 0]);
        let e2 = idx(&s, &[0, 1, 0]);
        let e3 = idx(&s, &[0, 0, 1]);
        let two = SphericalConfig::new(s.clone(), vec![e1, e2], 0).unwrap();
        assert_eq!(span_dimension(&two), 1);
        let three = SphericalConfig::new(s.clone(), vec![e1, e2, e3], 0).unwrap();
        assert_eq!(span_dimension(&three), 2);
        let same = SphericalConfig::new(s.clone(), vec![e1, e1, e1], 0).unwrap();
        assert_eq!(span_dimension(&same), 0);
    }

    #[test]
    fn off_sphere_points_are_rejected() {
        let (s, _) = sphere_of(7, 3);
        let x = idx(&s, &[1, 1, 0]);
        assert_eq!(SphericalConfig::new(s, vec![x], 0).unwrap_err(), Error::NotOnSphere(x));
    }

    /// Applies x ↦ (σ_i x_{π(i)}) to an index.
    fn signed_perm(s: &Space, perm: &[usize], signs: &[bool], x: usize) -> usize {
        let v = s.decode(x);
        let w: Vec<u32> = perm
            .iter()
            .zip(signs)
            .map(|(&j, &neg)| if neg { s.field().neg(v[j]) } else { v[j] })
            .collect();
        s.encode(&w).unwrap()
    }

    #[test]
    fn fingerprint_invariant_under_signed_permutations() {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let (s, e) = sphere_of(7, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let pts: Vec<usize> = (0..4).map(|_| *e.members().choose(&mut rng).unwrap()).collect();
            let cfg = SphericalConfig::new(s.clone(), pts, 0).unwrap();
            let mut perm = vec![0, 1, 2];
            perm.shuffle(&mut rng);
            let signs: Vec<bool> = (0..3).map(|_| rng.gen()).collect();
            let image = cfg.map(|x| signed_perm(&s, &perm, &signs, x)).unwrap();
            assert_eq!(gram_fingerprint(&cfg), gram_fingerprint(&image));
        }
    }

    #[test]
    fn translation_changes_fingerprint() {
        let (s, _) = sphere_of(7, 3);
        let cfg = SphericalConfig::new(
            s.clone(),
            vec![idx(&s, &[1, 0, 0]), idx(&s, &[0, 1, 0]), idx(&s, &[0, 0, 1])],
            0,
        )
        .unwrap();
        let t = idx(&s, &[2, 3, 0]);
        let moved = cfg.map(|x| s.add(x, t)).unwrap();
        assert_eq!(moved.center(), t);
        assert_ne!(gram_fingerprint(&cfg), gram_fingerprint(&moved));
    }

    #[test]
    fn canonical_form_forgets_order() {
        let (s, _) = sphere_of(7, 3);
        let a = idx(&s, &[1, 0, 0]);
        let b = idx(&s, &[0, 1, 0]);
        let c = idx(&s, &[2, 3, 3]);
        let x = SphericalConfig::new(s.clone(), vec![a, b, c], 0).unwrap();
        let y = SphericalConfig::new(s.clone(), vec![c, a, b], 0).unwrap();
        let (fx, fy) = (gram_fingerprint(&x), gram_fingerprint(&y));
        assert_ne!(fx, fy);
        assert_eq!(fx.canonical().unwrap(), fy.canonical().unwrap());
        assert_eq!(fx.hash().len(), 16);
    }

    #[test]
    fn no_classes_on_f5_circle() {
        let (_, e) = sphere_of(5, 2);
        let t = congruence_class_count(&e, 2).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.total, 0);
    }

    #[test]
    fn multiplicities_partition_star_tuples() {
        for p in [5, 7] {
            let (_, e) = sphere_of(p, 3);
            let t = congruence_class_count(&e, 2).unwrap();
            let c = classify_tuples(&e, 2).unwrap();
            assert!(!t.is_empty());
            assert_eq!(t.total, c.star);
            assert!(t.unordered_classes <= t.len());
        }
    }

    #[test]
    fn related_good_tuples_share_fingerprint() {
        let (s, e) = sphere_of(7, 3);
        let t = congruence_class_count(&e, 2).unwrap();
        let rep = &t.classes[0].representative;
        // the coordinate cycle (x, y, z) ↦ (y, z, x) is a permutation matrix
        let rotated: Vec<usize> = rep
            .iter()
            .map(|&x| signed_perm(&s, &[1, 2, 0], &[false; 3], x))
            .collect();
        assert_eq!(gram_of(&s, rep), gram_of(&s, &rotated));
        assert_eq!(classify_tuple(&s, &rotated[..2], &rotated[2..]), TupleClass::Star);
    }

    fn degenerate_brute(s: &Arc<Space>) -> u128 {
        let e = unit_sphere(s);
        let f = s.field();
        let mut count = 0;
        for &v0 in e.members() {
            for &v1 in e.members() {
                for &v2 in e.members() {
                    let (x1, x2) = (s.sub(v1, v0), s.sub(v2, v0));
                    let hit = (1..f.q()).any(|a| x2 == s.scale(a, x1) || x1 == s.scale(a, x2));
                    count += hit as u128;
                }
            }
        }
        count
    }

    #[test]
    fn degenerate_span_matches_triple_loop() {
        for p in [3, 5] {
            let s = Space::build(p, 1, 3).unwrap();
            assert_eq!(degenerate_span_count(&s, 2).unwrap().count, degenerate_brute(&s));
        }
    }

    #[test]
    fn degenerate_span_preconditions() {
        let s = Space::build(3, 1, 2).unwrap();
        assert!(matches!(
            degenerate_span_count(&s, 2),
            Err(Error::PreconditionFailed(_))
        ));
        let s = Space::build(3, 1, 3).unwrap();
        assert!(degenerate_span_count(&s, 1).is_err());
    }

    #[test]
    fn isometric_copy_examples() {
        let (s, e) = sphere_of(5, 3);
        let x0 = e.members()[0];
        let single = SphericalConfig::new(s.clone(), vec![x0], 0).unwrap();
        assert_eq!(count_isometric_copies(&single, &e).unwrap(), e.len() as u128);

        let x1 = e.members()[7];
        let pair = SphericalConfig::new(s.clone(), vec![x0, x1], 0).unwrap();
        let t = s.dot(x0, x1);
        let direct = e
            .members()
            .iter()
            .flat_map(|&u| e.members().iter().map(move |&v| (u, v)))
            .filter(|&(u, v)| s.dot(u, v) == t)
            .count();
        assert_eq!(count_isometric_copies(&pair, &e).unwrap(), direct as u128);
    }

    #[test]
    fn q_class_contains_itself() {
        let (s, e) = sphere_of(7, 3);
        let t = congruence_class_count(&e, 2).unwrap();
        let x = SphericalConfig::new(s, t.classes[0].representative.clone(), 0).unwrap();
        assert!(count_isometric_copies(&x, &e).unwrap() >= 1);
    }

    #[test]
    fn copy_counts_cover_star_tuples() {
        // every Gram match of a Q representative is itself a Q-tuple here
        let (s, e) = sphere_of(5, 3);
        let t = congruence_class_count(&e, 2).unwrap();
        let copies: u128 = t
            .classes
            .iter()
            .map(|c| {
                let x = SphericalConfig::new(s.clone(), c.representative.clone(), 0).unwrap();
                count_isometric_copies(&x, &e).unwrap()
            })
            .sum();
        assert_eq!(copies, t.total);
    }
}
