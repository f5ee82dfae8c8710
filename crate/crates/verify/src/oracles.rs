//! Brute-force reference computations. Each one works from coordinates and
//! plain loops and shares no counting code with `lcdg-core`.

use lcdg_core::{PointSet, Space};

fn coords(space: &Space, x: usize) -> Vec<u32> {
    space.decode(x)
}

fn add_coords(space: &Space, x: &[u32], y: &[u32]) -> Vec<u32> {
    x.iter().zip(y).map(|(&a, &b)| space.field().add(a, b)).collect()
}

fn sum_coords(space: &Space, xs: &[usize]) -> Vec<u32> {
    xs.iter().fold(vec![0; space.dim()], |acc, &x| {
        add_coords(space, &acc, &coords(space, x))
    })
}

/// Visits every tuple in E^n.
fn for_each_tuple(members: &[usize], n: usize, mut f: impl FnMut(&[usize])) {
    if members.is_empty() {
        return;
    }
    let mut idx = vec![0usize; n];
    let mut tuple = vec![members[0]; n];
    loop {
        f(&tuple);
        let Some(pos) = idx.iter().position(|&i| i + 1 < members.len()) else {
            return;
        };
        idx[pos] += 1;
        tuple[pos] = members[idx[pos]];
        for j in 0..pos {
            idx[j] = 0;
            tuple[j] = members[0];
        }
    }
}

/// T_k by checking every 2k-tuple.
pub fn energy(e: &PointSet, k: usize) -> u128 {
    let space = e.space();
    let mut count = 0u128;
    for_each_tuple(e.members(), 2 * k, |t| {
        count += (sum_coords(space, &t[..k]) == sum_coords(space, &t[k..])) as u128;
    });
    count
}

/// Goodness checked pair of index sets by pair of index sets.
pub fn is_good(space: &Space, a: &[usize], b: &[usize]) -> bool {
    let k = a.len();
    for i in 0..1usize << k {
        let sa: Vec<usize> = (0..k).filter(|&t| i >> t & 1 == 1).map(|t| a[t]).collect();
        for j in 0..1usize << k {
            let full = i == (1 << k) - 1 && j == (1 << k) - 1;
            if (i == 0 && j == 0) || full {
                continue;
            }
            let sb: Vec<usize> = (0..k).filter(|&t| j >> t & 1 == 1).map(|t| b[t]).collect();
            if sum_coords(space, &sa) == sum_coords(space, &sb) {
                return false;
            }
        }
    }
    true
}

/// T_k^good over all 2k-tuples.
pub fn good_count(e: &PointSet, k: usize) -> u128 {
    let space = e.space();
    let mut count = 0u128;
    for_each_tuple(e.members(), 2 * k, |t| {
        let (a, b) = t.split_at(k);
        if sum_coords(space, a) == sum_coords(space, b) && is_good(space, a, b) {
            count += 1;
        }
    });
    count
}

/// Dense adjacency matrix of C(E), A[x][y] = [y - x ∈ E].
pub fn adjacency(e: &PointSet) -> Vec<Vec<u128>> {
    let space = e.space();
    let n = space.size();
    let f = space.field();
    let mut a = vec![vec![0u128; n]; n];
    for (x, row) in a.iter_mut().enumerate() {
        let cx = coords(space, x);
        for (y, slot) in row.iter_mut().enumerate() {
            let cy = coords(space, y);
            let diff: Vec<u32> = cy.iter().zip(&cx).map(|(&b, &a)| f.sub(b, a)).collect();
            *slot = e.contains(space.encode(&diff).unwrap()) as u128;
        }
    }
    a
}

fn matmul(a: &[Vec<u128>], b: &[Vec<u128>]) -> Vec<Vec<u128>> {
    let n = a.len();
    let mut out = vec![vec![0u128; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// trace(A^len) by repeated integer matrix products.
pub fn closed_walks(e: &PointSet, len: u32) -> u128 {
    let a = adjacency(e);
    let mut power = a.clone();
    for _ in 1..len {
        power = matmul(&power, &a);
    }
    (0..a.len()).map(|i| power[i][i]).sum()
}

/// e(U, W) = Σ_{x,y} m_U(x) m_W(y) [x - y ∈ E] over explicit item lists.
pub fn edges_between(e: &PointSet, u: &[usize], w: &[usize]) -> u128 {
    let space = e.space();
    let f = space.field();
    let mut count = 0u128;
    for &x in u {
        let cx = coords(space, x);
        for &y in w {
            let cy = coords(space, y);
            let diff: Vec<u32> = cx.iter().zip(&cy).map(|(&a, &b)| f.sub(a, b)).collect();
            count += e.contains(space.encode(&diff).unwrap()) as u128;
        }
    }
    count
}

/// Σ_m χ(x · m), evaluated term by term.
pub fn character_sum(space: &Space, x: usize) -> (f64, f64) {
    let f = space.field();
    let cx = coords(space, x);
    let mut acc = (0.0, 0.0);
    for m in space.indices() {
        let dot = coords(space, m)
            .iter()
            .zip(&cx)
            .fold(0, |s, (&a, &b)| f.add(s, f.mul(a, b)));
        let z = f.char_value(dot);
        acc.0 += z.re;
        acc.1 += z.im;
    }
    acc
}

/// L for n = 2: triples with v_2 - v_0 = a (v_1 - v_0) or v_1 - v_0 = a (v_2 - v_0), a ≠ 0.
pub fn degenerate_triples(sphere: &PointSet) -> u128 {
    let space = sphere.space();
    let f = space.field();
    let scale = |a: u32, v: &[u32]| -> Vec<u32> { v.iter().map(|&c| f.mul(a, c)).collect() };
    let diff = |x: usize, y: usize| -> Vec<u32> {
        coords(space, x)
            .iter()
            .zip(coords(space, y))
            .map(|(&a, b)| f.sub(a, b))
            .collect()
    };
    let mut count = 0u128;
    for &v0 in sphere.members() {
        for &v1 in sphere.members() {
            let x1 = diff(v1, v0);
            for &v2 in sphere.members() {
                let x2 = diff(v2, v0);
                let hit = (1..f.q()).any(|a| x2 == scale(a, &x1) || x1 == scale(a, &x2));
                count += hit as u128;
            }
        }
    }
    count
}
