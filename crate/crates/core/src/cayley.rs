//! The Cayley graph C(E) on F_q^d: x ~ y iff y - x ∈ E.
//!
//! Adjacency is never stored. Cycles are counted as rooted directed vertex
//! sequences (w_0, .., w_{L-1}) with distinct vertices and every step,
//! including w_{L-1} → w_0, in E. Each undirected cycle is counted 2L times.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::energy::{EnergyTuple, ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::space::Space;

/// Largest q^d on which cycle and path enumeration is attempted.
pub const CYCLE_SPACE_CAP: u64 = 20_000;

#[derive(Debug, Clone)]
pub struct CayleyGraph {
    set: PointSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleSource {
    FromTuple,
    Enumerated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleRecord {
    pub vertices: Vec<usize>,
    pub rooted: bool,
    pub source: CycleSource,
}

impl CayleyGraph {
    pub fn new(set: PointSet) -> Result<Self> {
        if !set.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if set.contains(0) {
            return Err(Error::ZeroInConnectionSet);
        }
        Ok(CayleyGraph { set })
    }

    pub fn connection_set(&self) -> &PointSet {
        &self.set
    }

    pub fn space(&self) -> &Arc<Space> {
        self.set.space()
    }

    pub fn degree(&self) -> usize {
        self.set.len()
    }

    #[inline]
    pub fn is_edge(&self, x: usize, y: usize) -> bool {
        self.set.contains(self.space().sub(y, x))
    }

    /// Neighbors of x in increasing index order.
    pub fn neighbors(&self, x: usize) -> Vec<usize> {
        let space = self.space();
        let mut out: Vec<usize> = self.set.members().iter().map(|&s| space.add(x, s)).collect();
        out.sort_unstable();
        out
    }

    fn check_enumeration(&self, len: usize, roots: u128) -> Result<()> {
        let size = self.space().size() as u64;
        if size > CYCLE_SPACE_CAP {
            return Err(Error::cap(
                "q^d for cycle enumeration",
                size as u128,
                CYCLE_SPACE_CAP as u128,
            ));
        }
        let work = roots.saturating_mul((self.degree() as u128).saturating_pow(len.saturating_sub(1) as u32));
        if work > ENUMERATION_CAP {
            return Err(Error::cap("cycle enumeration", work, ENUMERATION_CAP));
        }
        Ok(())
    }

    /// Counts distinct-vertex paths from `path[0]` extended to length `len`
    /// that close back to the root.
    fn closing_paths(&self, path: &mut Vec<usize>, len: usize) -> u64 {
        let space = self.space();
        let root = path[0];
        let last = *path.last().unwrap();
        if path.len() == len {
            return self.set.contains(space.sub(root, last)) as u64;
        }
        let mut count = 0;
        for &s in self.set.members() {
            let w = space.add(last, s);
            if path.contains(&w) {
                continue;
            }
            path.push(w);
            count += self.closing_paths(path, len);
            path.pop();
        }
        count
    }

    fn cycles_from(&self, v: usize, len: usize) -> u64 {
        if len < 3 || self.set.is_empty() {
            return 0;
        }
        let mut path = Vec::with_capacity(len);
        path.push(v);
        self.closing_paths(&mut path, len)
    }
}

/// The closed walk v, v + a_1, .., v + Σa_i, v + Σa_i - b_1, .., back to v.
pub fn cycle_from_tuple(g: &CayleyGraph, v: usize, t: &EnergyTuple) -> Result<CycleRecord> {
    let space = g.space();
    if v >= space.size() {
        return Err(Error::InvalidInput(format!("vertex {v} is outside the space")));
    }
    if let Some(&x) = t.a.iter().chain(&t.b).find(|&&x| !g.set.contains(x)) {
        return Err(Error::InvalidInput(format!("tuple entry {x} is not in E")));
    }
    let k = t.k();
    let mut vertices = Vec::with_capacity(2 * k);
    let mut w = v;
    vertices.push(w);
    for &a in &t.a {
        w = space.add(w, a);
        vertices.push(w);
    }
    for &b in &t.b[..k - 1] {
        w = space.sub(w, b);
        vertices.push(w);
    }
    if space.sub(w, t.b[k - 1]) != v {
        return Err(Error::InvalidInput("Σ a_i ≠ Σ b_i".into()));
    }
    let mut sorted = vertices.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let closed = (0..vertices.len()).all(|i| g.is_edge(vertices[i], vertices[(i + 1) % vertices.len()]));
    if sorted.len() != vertices.len() || !closed {
        return Err(Error::NotGoodTuple);
    }
    Ok(CycleRecord {
        vertices,
        rooted: true,
        source: CycleSource::FromTuple,
    })
}

/// Rooted directed cycles of length `len` starting at v.
pub fn cycles_through_vertex(g: &CayleyGraph, v: usize, len: usize) -> Result<u64> {
    g.check_enumeration(len, 1)?;
    if v >= g.space().size() {
        return Err(Error::InvalidInput(format!("vertex {v} is outside the space")));
    }
    Ok(g.cycles_from(v, len))
}

/// Every rooted directed cycle at v, in DFS order (neighbors by increasing
/// index).
pub fn enumerate_cycles(g: &CayleyGraph, v: usize, len: usize) -> Result<Vec<CycleRecord>> {
    g.check_enumeration(len, 1)?;
    let mut out = Vec::new();
    let mut path = vec![v];
    collect_cycles(g, &mut path, len, &mut out);
    Ok(out)
}

fn collect_cycles(g: &CayleyGraph, path: &mut Vec<usize>, len: usize, out: &mut Vec<CycleRecord>) {
    if path.len() == len {
        if g.is_edge(*path.last().unwrap(), path[0]) {
            out.push(CycleRecord {
                vertices: path.clone(),
                rooted: true,
                source: CycleSource::Enumerated,
            });
        }
        return;
    }
    for w in g.neighbors(*path.last().unwrap()) {
        if !path.contains(&w) {
            path.push(w);
            collect_cycles(g, path, len, out);
            path.pop();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleTotals {
    pub len: usize,
    /// Rooted directed cycles summed over every root.
    pub rooted_directed: u128,
    /// rooted_directed / (2 len), the number of cycle subgraphs.
    pub unrooted: u128,
}

/// Total cycle count by a DFS from every vertex.
pub fn total_cycle_count(g: &CayleyGraph, len: usize) -> Result<CycleTotals> {
    let n = g.space().size();
    g.check_enumeration(len, n as u128)?;
    let rooted_directed: u128 = (0..n).into_par_iter().map(|v| g.cycles_from(v, len) as u128).sum();
    let per_cycle = 2 * len as u128;
    if !rooted_directed.is_multiple_of(per_cycle) {
        return Err(Error::InvariantViolated(format!(
            "{rooted_directed} rooted cycles is not a multiple of {per_cycle}"
        )));
    }
    Ok(CycleTotals {
        len,
        rooted_directed,
        unrooted: rooted_directed / per_cycle,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathReport {
    pub k: usize,
    pub subset_size: usize,
    /// Σ_{x,y ∈ A} P(x, y): paths with k edges and k + 1 distinct vertices in A.
    pub total_paths: u128,
    /// N = Σ_{x,y ∈ A} C(P(x, y), 2).
    pub pairs_exact: u128,
    /// |A|² C(avg, 2) with avg = total / |A|², a lower bound for N by convexity.
    pub pairs_lower_bound: f64,
    /// total q^k / |A|^{k+1}.
    pub ratio: f64,
}

/// Path counts inside the induced subgraph on A.
pub fn count_paths_in_subset(g: &CayleyGraph, a: &PointSet, k: usize) -> Result<PathReport> {
    let space = g.space();
    if a.space().size() != space.size() {
        return Err(Error::InvalidInput("subset lives in a different space".into()));
    }
    if k == 0 {
        return Err(Error::InvalidInput("paths need at least one edge".into()));
    }
    g.check_enumeration(k + 1, a.len() as u128)?;
    let (total_paths, pairs_exact) = a
        .members()
        .par_iter()
        .map(|&x| {
            let mut ends = vec![0u64; space.size()];
            let mut path = vec![x];
            walk_paths(g, a, &mut path, k, &mut ends);
            ends.iter().fold((0u128, 0u128), |(t, n), &c| {
                let c = c as u128;
                (t + c, n + c * c.saturating_sub(1) / 2)
            })
        })
        .reduce(|| (0, 0), |(t1, n1), (t2, n2)| (t1 + t2, n1 + n2));
    let m = a.len() as f64;
    let avg = if a.is_empty() {
        0.0
    } else {
        total_paths as f64 / (m * m)
    };
    let q = space.q() as f64;
    Ok(PathReport {
        k,
        subset_size: a.len(),
        total_paths,
        pairs_exact,
        pairs_lower_bound: m * m * avg * (avg - 1.0) / 2.0,
        ratio: if a.is_empty() {
            0.0
        } else {
            total_paths as f64 * q.powi(k as i32) / m.powi(k as i32 + 1)
        },
    })
}

fn walk_paths(g: &CayleyGraph, a: &PointSet, path: &mut Vec<usize>, k: usize, ends: &mut [u64]) {
    let last = *path.last().unwrap();
    if path.len() == k + 1 {
        ends[last] += 1;
        return;
    }
    let space = g.space();
    for &s in g.set.members() {
        let w = space.add(last, s);
        if a.contains(w) && !path.contains(&w) {
            path.push(w);
            walk_paths(g, a, path, k, ends);
            path.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{good_energy_count, good_energy_tuples, CountMode};
    use crate::pointset::unit_sphere;
    use crate::spectral::closed_walk_count;
    use rand::{seq::SliceRandom, SeedableRng};

    fn sphere_graph(p: u32, d: usize) -> CayleyGraph {
        CayleyGraph::new(unit_sphere(&Space::build(p, 1, d).unwrap())).unwrap()
    }

    #[test]
    fn construction_errors() {
        let s = Space::build(3, 1, 2).unwrap();
        let one = PointSet::from_indices(s.clone(), [s.encode(&[0, 1]).unwrap()]).unwrap();
        assert_eq!(CayleyGraph::new(one).unwrap_err(), Error::NotSymmetric);
        let with_zero = PointSet::from_indices(s.clone(), [0]).unwrap();
        assert_eq!(CayleyGraph::new(with_zero).unwrap_err(), Error::ZeroInConnectionSet);
    }

    #[test]
    fn line_set_has_no_four_cycles() {
        let s = Space::build(3, 1, 2).unwrap();
        let e = PointSet::from_indices(s.clone(), [s.encode(&[0, 1]).unwrap(), s.encode(&[0, 2]).unwrap()]).unwrap();
        let g = CayleyGraph::new(e).unwrap();
        assert_eq!(cycles_through_vertex(&g, 0, 4).unwrap(), 0);
        // the same line carries triangles
        assert_eq!(cycles_through_vertex(&g, 0, 3).unwrap(), 2);
    }

    #[test]
    fn regular_and_vertex_transitive() {
        let g = sphere_graph(3, 2);
        let s = g.space().clone();
        for x in s.indices() {
            let nb = g.neighbors(x);
            assert_eq!(nb.len(), g.degree());
            assert!(nb.iter().all(|&y| g.is_edge(x, y) && g.is_edge(y, x)));
        }
        let v = s.encode(&[1, 2]).unwrap();
        assert_eq!(
            cycles_through_vertex(&g, 0, 4).unwrap(),
            cycles_through_vertex(&g, v, 4).unwrap()
        );
    }

    #[test]
    fn good_tuples_give_cycles() {
        let g = sphere_graph(7, 3);
        let e = g.connection_set();
        let s = g.space();
        let tuples = good_energy_tuples(e, 2).unwrap();
        assert!(!tuples.is_empty());
        let u = s.encode(&[3, 1, 4]).unwrap();
        let mut seen = std::collections::HashSet::new();
        for (a, b) in tuples.iter().take(500) {
            let t = EnergyTuple::new(s, a.clone(), b.clone()).unwrap();
            let c = cycle_from_tuple(&g, 0, &t).unwrap();
            assert_eq!(c.vertices.len(), 4);
            assert!(seen.insert(c.vertices.clone()), "tuple map is not injective");
            let shifted = cycle_from_tuple(&g, u, &t).unwrap();
            let expect: Vec<usize> = c.vertices.iter().map(|&w| s.add(w, u)).collect();
            assert_eq!(shifted.vertices, expect);
        }
    }

    #[test]
    fn bad_tuple_is_refused() {
        let g = sphere_graph(5, 3);
        let s = g.space();
        let x = g.connection_set().members()[0];
        let y = g.connection_set().members()[5];
        // (x, y; y, x) returns to v + x after two steps
        let t = EnergyTuple::new(s, vec![x, y], vec![y, x]).unwrap();
        assert!(!t.good);
        assert_eq!(cycle_from_tuple(&g, 0, &t).unwrap_err(), Error::NotGoodTuple);
    }

    #[test]
    fn per_vertex_count_dominates_good_tuples() {
        let g = sphere_graph(5, 3);
        let good = good_energy_count(g.connection_set(), 2, CountMode::Exhaustive)
            .unwrap()
            .exact
            .unwrap();
        let c = cycles_through_vertex(&g, 0, 4).unwrap() as u128;
        assert!(c >= good, "{c} < {good}");
    }

    #[test]
    fn totals_agree_with_transitivity() {
        for (p, d) in [(5, 2), (3, 2), (3, 3)] {
            let g = sphere_graph(p, d);
            let t = total_cycle_count(&g, 4).unwrap();
            let per = cycles_through_vertex(&g, 0, 4).unwrap() as u128;
            assert_eq!(t.rooted_directed, g.space().size() as u128 * per);
            assert_eq!(t.unrooted * 8, t.rooted_directed);
        }
    }

    #[test]
    fn empty_set_has_no_cycles() {
        let s = Space::build(3, 1, 2).unwrap();
        let g = CayleyGraph::new(PointSet::empty(s)).unwrap();
        assert_eq!(total_cycle_count(&g, 4).unwrap().rooted_directed, 0);
    }

    #[test]
    fn enumeration_matches_count() {
        let g = sphere_graph(3, 3);
        let list = enumerate_cycles(&g, 0, 4).unwrap();
        assert_eq!(list.len() as u64, cycles_through_vertex(&g, 0, 4).unwrap());
        for c in &list {
            let mut v = c.vertices.clone();
            v.sort_unstable();
            v.dedup();
            assert_eq!(v.len(), 4);
        }
    }

    #[test]
    fn closed_walks_bound_cycles() {
        for (p, d) in [(3, 2), (5, 2), (3, 3)] {
            let g = sphere_graph(p, d);
            for len in [3, 4] {
                let walks = closed_walk_count(g.connection_set(), len as u32).unwrap() as u128;
                let cycles = total_cycle_count(&g, len).unwrap().rooted_directed;
                assert!(walks * g.space().size() as u128 >= cycles);
            }
        }
    }

    #[test]
    fn path_totals_match_neighbor_loop() {
        let g = sphere_graph(3, 2);
        let s = g.space().clone();
        let full = PointSet::full(s.clone());
        let report = count_paths_in_subset(&g, &full, 2).unwrap();
        let mut direct = 0u128;
        for y in s.indices() {
            for x in g.neighbors(y) {
                for z in g.neighbors(y) {
                    direct += (x != z) as u128;
                }
            }
        }
        assert_eq!(report.total_paths, direct);
        assert!(report.pairs_exact as f64 >= report.pairs_lower_bound - 1e-9);

        let empty = count_paths_in_subset(&g, &PointSet::empty(s), 2).unwrap();
        assert_eq!(empty.total_paths, 0);
    }

    #[test]
    fn random_half_subset_ratio() {
        let g = sphere_graph(5, 3);
        let s = g.space().clone();
        let mut idx: Vec<usize> = s.indices().collect();
        idx.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(5));
        idx.truncate(s.size() / 2);
        let a = PointSet::from_indices(s, idx).unwrap();
        let r = count_paths_in_subset(&g, &a, 2).unwrap();
        assert!((0.2..=5.0).contains(&r.ratio), "ratio {}", r.ratio);
        assert!(r.pairs_exact as f64 >= r.pairs_lower_bound - 1e-6);
    }
}
