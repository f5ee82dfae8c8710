//! Explicit sets: a sphere subset whose Cayley graph has a large second
//! eigenvalue, the eigenvalue bound forced by small doubling, and a greedy
//! sphere subset without good energy tuples.
//!
//! The large-eigenvalue set avoids H - H where H is the union of the
//! translates X + (0, .., 0, a), a ∈ A, of the hyperplane X = {x_d = 0}. We
//! take A to be the F_p-subspace of F_q spanned by 1, α, .., α^{r-2}, i.e.
//! the element codes below p^{r-1}, so that A - A = A and |A| = p^{r-1}.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{additive_energy, doubling, good_energy_count, good_energy_tuples, CountMode, ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::pointset::{unit_sphere, PointSet};
use crate::space::Space;
use crate::spectral::{edge_count, fourier_spectrum, MultiSet};

/// μ must clear |E| / (2 q^{1/r}) by at least this much.
pub const MU_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BadSetCertificate {
    pub p: u32,
    pub r: u32,
    pub d: usize,
    pub poly: Vec<u32>,
    pub epsilon: f64,
    pub requested_size: usize,
    /// Element codes of A.
    pub subspace: Vec<u32>,
    pub h_size: usize,
    /// |(H - H) ∩ S^{d-1}|.
    pub excluded_sphere_points: usize,
    /// |(H - H) ∩ E|, zero for a valid certificate.
    pub intersection: usize,
    /// e(H, H) in C(E), zero for a valid certificate.
    pub h_edges: u128,
    pub mu: f64,
    /// |E| / (2 q^ε).
    pub bound: f64,
    /// |H| |E| / q^d, what the mixing lemma gives once e(H, H) = 0.
    pub mixing_lower_bound: f64,
    pub holds: bool,
    /// E in the point-set file format.
    pub set_file: String,
}

fn subspace_codes(field: &FieldCtx) -> Vec<u32> {
    (0..field.p().pow(field.r() - 1)).collect()
}

/// Membership in H = {x : x_d ∈ A}. The code of x_d is the top base-q digit.
fn in_h(space: &Space, a_size: u32, x: usize) -> bool {
    let top = x / (space.size() / space.q() as usize);
    (top as u32) < a_size
}

/// Exhaustive H - H as a bitmap.
fn h_minus_h(space: &Space, a_size: u32) -> Result<Vec<bool>> {
    let h: Vec<usize> = space.indices().filter(|&x| in_h(space, a_size, x)).collect();
    let work = (h.len() as u128).pow(2);
    if work > ENUMERATION_CAP {
        return Err(Error::cap("H - H", work, ENUMERATION_CAP));
    }
    let mut out = vec![false; space.size()];
    for &x in &h {
        for &y in &h {
            out[space.sub(x, y)] = true;
        }
    }
    Ok(out)
}

/// Builds E ⊆ S^{d-1} \ (H - H) of size m from whole pairs {x, -x}, lowest
/// index first, or in a seeded random order.
pub fn build_bad_set(p: u32, r: u32, d: usize, m: usize, seed: Option<u64>) -> Result<BadSetCertificate> {
    if r < 2 {
        return Err(Error::PreconditionFailed(format!(
            "the construction needs r ≥ 2 (got {r})"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidInput("target size must be positive".into()));
    }
    let space = Space::build(p, r, d)?;
    let field = space.field();
    let a = subspace_codes(field);
    let diff = h_minus_h(&space, a.len() as u32)?;
    let sphere = unit_sphere(&space);
    let residue: Vec<usize> = sphere.members().iter().copied().filter(|&x| !diff[x]).collect();
    if residue.len() < m {
        return Err(Error::InfeasibleSize {
            requested: m,
            available: residue.len(),
        });
    }

    let mut pairs: Vec<usize> = residue.iter().copied().filter(|&x| x <= space.neg(x)).collect();
    if let Some(seed) = seed {
        pairs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut chosen = Vec::with_capacity(m + 1);
    for x in pairs {
        if chosen.len() >= m {
            break;
        }
        chosen.push(x);
        let y = space.neg(x);
        if y != x {
            chosen.push(y);
        }
    }
    let e = PointSet::from_indices(space.clone(), chosen)?;
    let excluded = sphere.len() - residue.len();
    certify(&space, &a, e, m, excluded, &diff)
}

fn certify(
    space: &Arc<Space>,
    a: &[u32],
    e: PointSet,
    requested: usize,
    excluded: usize,
    diff: &[bool],
) -> Result<BadSetCertificate> {
    let field = space.field();
    let q = space.q() as f64;
    let epsilon = 1.0 / field.r() as f64;
    let h: Vec<usize> = space.indices().filter(|&x| in_h(space, a.len() as u32, x)).collect();
    let intersection = e.members().iter().filter(|&&x| diff[x]).count();
    let hs = MultiSet::from_items(h.iter().copied());
    let h_edges = edge_count(&e, &hs, &hs);
    let mu = fourier_spectrum(&e)?.mu;
    let bound = e.len() as f64 / (2.0 * q.powf(epsilon));
    Ok(BadSetCertificate {
        p: field.p(),
        r: field.r(),
        d: space.dim(),
        poly: field.poly().to_vec(),
        epsilon,
        requested_size: requested,
        subspace: a.to_vec(),
        h_size: h.len(),
        excluded_sphere_points: excluded,
        intersection,
        h_edges,
        mu,
        bound,
        mixing_lower_bound: h.len() as f64 * e.len() as f64 / space.size() as f64,
        holds: intersection == 0 && h_edges == 0 && mu >= bound + MU_MARGIN,
        set_file: e.to_file_string(),
    })
}

impl BadSetCertificate {
    pub fn set(&self) -> Result<PointSet> {
        PointSet::parse_file(&self.set_file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    /// Parses a certificate and re-verifies it from scratch.
    pub fn from_json(text: &str) -> Result<Self> {
        let cert: BadSetCertificate = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cert.verify()?;
        Ok(cert)
    }

    /// Recomputes every verified quantity from the stored set.
    pub fn verify(&self) -> Result<()> {
        let e = self.set()?;
        let space = e.space().clone();
        let field = space.field();
        if (field.p(), field.r(), space.dim()) != (self.p, self.r, self.d) {
            return Err(Error::InvariantViolated(
                "stored set does not match the parameters".into(),
            ));
        }
        let a = subspace_codes(field);
        if a != self.subspace {
            return Err(Error::InvariantViolated(
                "stored subspace is not the standard one".into(),
            ));
        }
        if !e.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let sphere = unit_sphere(&space);
        if let Some(&x) = e.members().iter().find(|&&x| !sphere.contains(x)) {
            return Err(Error::NotOnSphere(x));
        }
        let diff = h_minus_h(&space, a.len() as u32)?;
        let excluded = sphere.members().iter().filter(|&&x| diff[x]).count();
        let fresh = certify(&space, &a, e, self.requested_size, excluded, &diff)?;
        if fresh.intersection != 0 || fresh.h_edges != 0 {
            return Err(Error::InvariantViolated("E meets H - H".into()));
        }
        if !fresh.holds {
            return Err(Error::InvariantViolated(format!(
                "μ = {} is below |E|/(2q^ε) = {}",
                fresh.mu, fresh.bound
            )));
        }
        if fresh.h_size != self.h_size || (fresh.mu - self.mu).abs() > MU_MARGIN || !self.holds {
            return Err(Error::InvariantViolated(
                "stored quantities disagree with recomputation".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingReport {
    pub size: usize,
    pub sumset_size: usize,
    /// K = |E + E| / |E|.
    pub k_ratio: f64,
    pub t2: u128,
    pub mu: f64,
    /// T_2 |E + E| ≥ |E|^4, checked in integers.
    pub lower_holds: bool,
    /// |E|^4 / q^d + μ² |E|.
    pub upper: f64,
    pub upper_holds: bool,
    /// ((T_2 - |E|^4/q^d) / |E|)^{1/2}, clamped at zero.
    pub implied_mu_lower: f64,
}

/// The chain |E|^4/|E+E| ≤ T_2(E) ≤ |E|^4/q^d + μ²|E| and the lower bound on
/// μ it implies when |E + E| < q^d/2.
pub fn doubling_eigenvalue_bound(e: &PointSet) -> Result<DoublingReport> {
    let space = e.space();
    let dbl = doubling(e)?;
    if 2 * dbl.sumset_size >= space.size() {
        return Err(Error::PreconditionFailed(format!(
            "|E + E| = {} is not below q^d/2 = {}",
            dbl.sumset_size,
            space.size() as f64 / 2.0
        )));
    }
    let n = e.len() as u128;
    let t2 = additive_energy(e, 2)?;
    let mu = fourier_spectrum(e)?.mu;
    let n4 = n.pow(4) as f64;
    let main = n4 / space.size() as f64;
    let upper = main + mu * mu * n as f64;
    Ok(DoublingReport {
        size: e.len(),
        sumset_size: dbl.sumset_size,
        k_ratio: dbl.ratio,
        t2,
        mu,
        lower_holds: t2 * dbl.sumset_size as u128 >= n.pow(4),
        upper,
        upper_holds: t2 as f64 <= upper * (1.0 + 1e-12),
        implied_mu_lower: ((t2 as f64 - main) / n as f64).max(0.0).sqrt(),
    })
}

#[derive(Debug, Clone)]
pub struct IndependentSet {
    pub set: PointSet,
    pub k: usize,
    pub start_size: usize,
    /// Pairs {x, -x} removed, in removal order (smaller index of each pair).
    pub removed: Vec<usize>,
    /// T_k^good of the result, from the exhaustive counter.
    pub good_after: u128,
    /// |E| / q^{d/(2k-1)}.
    pub ratio: f64,
}

/// Greedy deletion on the unit sphere of `space`.
pub fn independent_set_no_good_tuples(space: &Arc<Space>, k: usize, seed: u64) -> Result<IndependentSet> {
    greedy_independent_subset(&unit_sphere(space), k, seed)
}

/// Repeatedly removes the pair {x, -x} meeting the most remaining good
/// k-energy tuples of the start set until none remain. Ties go to the
/// earliest pair in a seeded shuffle.
pub fn greedy_independent_subset(start: &PointSet, k: usize, seed: u64) -> Result<IndependentSet> {
    if !(2..=3).contains(&k) {
        return Err(Error::PreconditionFailed(format!("k must be 2 or 3 (got {k})")));
    }
    let space = start.space().clone();
    let members = start.members();
    // pair id of every member: position of min(x, -x) among the pair leaders
    let leaders: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&x| !start.contains(space.neg(x)) || x <= space.neg(x))
        .collect();
    let pair_of = |x: usize| {
        let y = space.neg(x);
        let lead = if start.contains(y) { x.min(y) } else { x };
        leaders.binary_search(&lead).expect("member has a leader")
    };

    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); leaders.len()];
    if !start.is_empty() {
        for (a, b) in good_energy_tuples(start, k)? {
            let mut pairs: Vec<usize> = a.iter().chain(&b).map(|&x| pair_of(x)).collect();
            pairs.sort_unstable();
            pairs.dedup();
            for &pid in &pairs {
                incident[pid].push(edges.len());
            }
            edges.push(pairs);
        }
    }

    let mut priority: Vec<usize> = (0..leaders.len()).collect();
    priority.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut rank = vec![0usize; leaders.len()];
    for (i, &pid) in priority.iter().enumerate() {
        rank[pid] = i;
    }

    let mut cover: Vec<usize> = incident.iter().map(Vec::len).collect();
    let mut alive = vec![true; edges.len()];
    let mut kept = vec![true; leaders.len()];
    let mut removed = Vec::new();
    loop {
        let best = (0..leaders.len())
            .filter(|&pid| kept[pid] && cover[pid] > 0)
            .max_by(|&x, &y| cover[x].cmp(&cover[y]).then(rank[y].cmp(&rank[x])));
        let Some(pid) = best else { break };
        kept[pid] = false;
        removed.push(leaders[pid]);
        for &edge in &incident[pid] {
            if std::mem::replace(&mut alive[edge], false) {
                for &other in &edges[edge] {
                    cover[other] -= 1;
                }
            }
        }
    }

    let survivors: Vec<usize> = members.iter().copied().filter(|&x| kept[pair_of(x)]).collect();
    let set = PointSet::from_indices(space.clone(), survivors)?;
    let good_after = if set.is_empty() {
        0
    } else {
        good_energy_count(&set, k, CountMode::Exhaustive)?.exact.unwrap_or(0)
    };
    if good_after != 0 {
        return Err(Error::InvariantViolated(format!(
            "greedy result still has {good_after} good tuples"
        )));
    }
    let exponent = space.dim() as f64 / (2 * k - 1) as f64;
    Ok(IndependentSet {
        k,
        start_size: start.len(),
        ratio: set.len() as f64 / (space.q() as f64).powf(exponent),
        set,
        removed,
        good_after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_set_over_f9() {
        let c = build_bad_set(3, 2, 2, 2, None).unwrap();
        assert_eq!(c.h_size, 9 * 3);
        assert_eq!(c.intersection, 0);
        assert_eq!(c.h_edges, 0);
        assert!(c.holds);
        assert!((c.bound - 2.0 / 6.0).abs() < 1e-12);
        assert!(c.mu >= c.mixing_lower_bound - 1e-9);
    }

    #[test]
    fn bad_set_over_f8() {
        let c = build_bad_set(2, 3, 2, 2, None).unwrap();
        assert_eq!(c.h_size, 8 * 4);
        assert!((c.bound - 2.0 / 4.0).abs() < 1e-12);
        assert!(c.holds);
    }

    #[test]
    fn prime_fields_are_refused() {
        assert!(matches!(
            build_bad_set(3, 1, 2, 2, None),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn oversized_request_is_infeasible() {
        assert!(matches!(
            build_bad_set(3, 2, 2, 1000, None),
            Err(Error::InfeasibleSize { requested: 1000, .. })
        ));
    }

    #[test]
    fn odd_request_rounds_to_whole_pair() {
        let c = build_bad_set(3, 2, 3, 5, Some(9)).unwrap();
        assert_eq!(c.set().unwrap().len(), 6);
        assert!(c.holds);
    }

    #[test]
    fn certificate_roundtrip_and_tamper() {
        let c = build_bad_set(3, 2, 3, 8, None).unwrap();
        let back = BadSetCertificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);

        // swap one pair for a point of H - H on the sphere
        let space = Space::build(3, 2, 3).unwrap();
        let s = unit_sphere(&space);
        let inside = *s.members().iter().find(|&&x| in_h(&space, 3, x)).unwrap();
        let e = c.set().unwrap();
        let mut pts: Vec<usize> = e.members()[2..].to_vec();
        let (x0, x1) = (e.members()[0], space.neg(e.members()[0]));
        pts.retain(|&x| x != x0 && x != x1);
        pts.extend([inside, space.neg(inside)]);
        pts.sort_unstable();
        pts.dedup();
        let forged = PointSet::from_indices(space, pts).unwrap();
        let mut bad = c.clone();
        bad.set_file = forged.to_file_string();
        assert!(BadSetCertificate::from_json(&bad.to_json()).is_err());
    }

    #[test]
    fn doubling_chain_for_a_pair() {
        let space = Space::build(5, 1, 2).unwrap();
        let x = space.encode(&[1, 2]).unwrap();
        let e = PointSet::from_indices(space.clone(), [x, space.neg(x)]).unwrap();
        let r = doubling_eigenvalue_bound(&e).unwrap();
        assert_eq!(r.sumset_size, 3);
        assert!((r.k_ratio - 1.5).abs() < 1e-12);
        assert_eq!(r.t2, 6);
        assert!(r.lower_holds && r.upper_holds);
    }

    #[test]
    fn doubling_of_full_space_is_refused() {
        let space = Space::build(3, 1, 2).unwrap();
        assert!(matches!(
            doubling_eigenvalue_bound(&PointSet::full(space)),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn doubling_bound_on_f9_circle_line() {
        // points of S^1 ⊂ F_9² whose coordinates lie in the prime field
        let space = Space::build(3, 2, 2).unwrap();
        let s = unit_sphere(&space);
        let pts: Vec<usize> = s
            .members()
            .iter()
            .copied()
            .filter(|&x| space.decode(x).iter().all(|&c| c < 3))
            .collect();
        let e = PointSet::from_indices(space, pts).unwrap();
        let r = doubling_eigenvalue_bound(&e).unwrap();
        assert!(r.lower_holds && r.upper_holds);
        assert!(r.implied_mu_lower <= r.mu + 1e-9);
        assert!(r.mu <= 2.0 * r.implied_mu_lower, "{} vs {}", r.mu, r.implied_mu_lower);
    }

    #[test]
    fn circle_over_f5_is_already_independent() {
        let space = Space::build(5, 1, 2).unwrap();
        let r = independent_set_no_good_tuples(&space, 2, 0).unwrap();
        assert_eq!(r.set.len(), 4);
        assert!(r.removed.is_empty());
    }

    #[test]
    fn sphere_over_f5_greedy_is_certified() {
        let space = Space::build(5, 1, 3).unwrap();
        let r = independent_set_no_good_tuples(&space, 2, 7).unwrap();
        assert_eq!(r.good_after, 0);
        assert!(!r.set.is_empty());
        assert!(r.set.is_symmetric());
        let again = independent_set_no_good_tuples(&space, 2, 7).unwrap();
        assert_eq!(again.set.members(), r.set.members());
    }

    #[test]
    fn empty_start_gives_empty_set() {
        let space = Space::build(5, 1, 3).unwrap();
        let r = greedy_independent_subset(&PointSet::empty(space), 2, 1).unwrap();
        assert!(r.set.is_empty());
    }
}
