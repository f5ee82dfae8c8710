//! Finite point sets E ⊆ F_q^d, spheres, and the text file format.
//!
//! File format: the first line is `p r d poly=c0,c1,...,cr`; every further
//! non-empty line holds one vector as d space-separated element codes.
//! Lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};
use crate::space::{Space, Vector};

#[derive(Debug, Clone)]
pub struct PointSet {
    space: Arc<Space>,
    members: Vec<usize>,
    bitmap: Vec<bool>,
    symmetric: bool,
}

impl PointSet {
    /// Builds a set from vector indices. Duplicates and out-of-range indices
    /// are rejected.
    pub fn from_indices(space: Arc<Space>, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut bitmap = vec![false; space.size()];
        let mut members = Vec::new();
        for i in indices {
            if i >= space.size() {
                return Err(Error::InvalidInput(format!("index {i} outside [0, {})", space.size())));
            }
            if std::mem::replace(&mut bitmap[i], true) {
                return Err(Error::InvalidInput(format!("duplicate point {i}")));
            }
            members.push(i);
        }
        members.sort_unstable();
        let symmetric = members.iter().all(|&x| bitmap[space.neg(x)]);
        Ok(PointSet {
            space,
            members,
            bitmap,
            symmetric,
        })
    }

    pub fn from_vectors(space: Arc<Space>, vectors: &[Vector]) -> Result<Self> {
        let idx = vectors.iter().map(|v| space.index_of(v)).collect::<Result<Vec<_>>>()?;
        Self::from_indices(space, idx)
    }

    pub fn empty(space: Arc<Space>) -> Self {
        Self::from_indices(space, []).expect("empty set is valid")
    }

    pub fn full(space: Arc<Space>) -> Self {
        let n = space.size();
        Self::from_indices(space, 0..n).expect("full set is valid")
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, index: usize) -> bool {
        self.bitmap[index]
    }

    pub fn bitmap(&self) -> &[bool] {
        &self.bitmap
    }

    /// E = -E.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    /// Smallest symmetric superset, E ∪ -E.
    pub fn symmetric_closure(&self) -> PointSet {
        let mut all: Vec<usize> = self.members.clone();
        all.extend(self.members.iter().map(|&x| self.space.neg(x)));
        all.sort_unstable();
        all.dedup();
        PointSet::from_indices(self.space.clone(), all).expect("closure has no duplicates")
    }

    pub fn vectors(&self) -> Vec<Vector> {
        self.members.iter().map(|&i| self.space.vector(i)).collect()
    }

    /// Serializes to the text file format.
    pub fn to_file_string(&self) -> String {
        let f = self.space.field();
        let poly: Vec<String> = f.poly().iter().map(|c| c.to_string()).collect();
        let mut out = format!("{} {} {} poly={}\n", f.p(), f.r(), self.space.dim(), poly.join(","));
        for &i in &self.members {
            let coords: Vec<String> = self.space.decode(i).iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{}", coords.join(" "));
        }
        out
    }

    /// Parses the text file format, building field and space from the header.
    pub fn parse_file(text: &str) -> Result<PointSet> {
        Self::parse_file_with_cap(text, crate::space::DEFAULT_INDEX_CAP)
    }

    pub fn parse_file_with_cap(text: &str, cap: u64) -> Result<PointSet> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let num = |s: &str| s.parse::<u32>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
        let (p, r, d) = (num(parts[0])?, num(parts[1])?, num(parts[2])? as usize);
        let poly = parts[3]
            .strip_prefix("poly=")
            .ok_or_else(|| Error::Parse("header lacks poly=".into()))?
            .trim_start_matches('<')
            .trim_end_matches('>');
        let poly = poly.split(',').map(num).collect::<Result<Vec<_>>>()?;
        let field = Arc::new(FieldCtx::new(p, r, Some(poly))?);
        let space = Space::with_cap(field, d, cap)?;
        let mut idx = Vec::new();
        for line in lines {
            let coords = line.split_whitespace().map(num).collect::<Result<Vec<Elem>>>()?;
            idx.push(space.encode(&coords)?);
        }
        PointSet::from_indices(space, idx)
    }
}

/// S_j^{d-1}(center) = { y : ||y - center|| = j }.
pub fn sphere(space: &Arc<Space>, radius: Elem, center: &Vector) -> Result<PointSet> {
    let c = space.index_of(center)?;
    let members = space.indices().filter(|&y| space.norm(space.sub(y, c)) == radius);
    PointSet::from_indices(space.clone(), members)
}

/// The unit sphere S^{d-1} centered at the origin.
pub fn unit_sphere(space: &Arc<Space>) -> PointSet {
    sphere(space, 1, &Vector::zero(space.dim())).expect("origin has the right dimension")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_size(p: u32, d: usize) -> usize {
        unit_sphere(&Space::build(p, 1, d).unwrap()).len()
    }

    #[test]
    fn circle_sizes() {
        assert_eq!(sphere_size(3, 2), 4);
        assert_eq!(sphere_size(5, 2), 4);
        assert_eq!(sphere_size(7, 2), 8);
        assert_eq!(sphere_size(5, 3), 30);
        assert_eq!(sphere_size(7, 3), 42);
    }

    #[test]
    fn f3_circle_points() {
        let s = Space::build(3, 1, 2).unwrap();
        let c = unit_sphere(&s);
        let mut pts = c.vectors();
        pts.sort_by_key(|v| v.coords.clone());
        let want: Vec<Vector> = [[0, 1], [0, 2], [1, 0], [2, 0]]
            .iter()
            .map(|c| Vector::new(c.to_vec()))
            .collect();
        assert_eq!(pts, want);
        assert!(c.is_symmetric());
    }

    #[test]
    fn spheres_about_origin_are_symmetric() {
        for (p, r, d) in [(3, 1, 3), (5, 1, 2), (3, 2, 2), (2, 2, 3)] {
            let s = Space::build(p, r, d).unwrap();
            for j in s.field().elements() {
                let e = sphere(&s, j, &Vector::zero(d)).unwrap();
                assert!(e.is_symmetric());
                assert!(e.members().iter().all(|&x| e.contains(s.neg(x))));
            }
        }
    }

    #[test]
    fn shifted_sphere() {
        let s = Space::build(5, 1, 2).unwrap();
        let center = Vector::new(vec![1, 1]);
        let e = sphere(&s, 1, &center).unwrap();
        assert_eq!(e.len(), 4);
        assert!(!e.is_symmetric());
    }

    #[test]
    fn rejects_duplicates() {
        let s = Space::build(3, 1, 2).unwrap();
        assert!(PointSet::from_indices(s, [1, 2, 1]).is_err());
    }

    #[test]
    fn file_roundtrip() {
        let s = Space::build(3, 2, 2).unwrap();
        let e = unit_sphere(&s);
        let text = e.to_file_string();
        assert!(text.starts_with("3 2 2 poly=1,0,1\n"));
        let back = PointSet::parse_file(&text).unwrap();
        assert_eq!(back.members(), e.members());
        assert_eq!(back.space().field().poly(), &[1, 0, 1]);
    }

    #[test]
    fn parse_accepts_brackets_and_comments() {
        let text = "# circle\n3 1 2 poly=<0,1>\n0 1\n0 2\n";
        let e = PointSet::parse_file(text).unwrap();
        assert_eq!(e.len(), 2);
        assert!(e.is_symmetric());
        assert!(PointSet::parse_file("3 1 2 poly=0,1\n0 1 2\n").is_err());
    }
}
