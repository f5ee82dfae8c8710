//! Bodies of the twelve acceptance criteria.

use std::sync::Arc;

use lcdg_core::cayley::{cycle_from_tuple, cycles_through_vertex, total_cycle_count, CayleyGraph};
use lcdg_core::configurations::{congruence_class_count, degenerate_span_count, gram_fingerprint, SphericalConfig};
use lcdg_core::constructions::{build_bad_set, independent_set_no_good_tuples, BadSetCertificate, MU_MARGIN};
use lcdg_core::energy::{
    additive_energy, classify_tuple, classify_tuples, energy_inequality_check, good_energy_count, good_energy_tuples,
    CountMode, EnergyTuple, TupleClass,
};
use lcdg_core::field::{is_prime, MAX_DEGREE};
use lcdg_core::spectral::{character_transform, closed_walk_count, mixing_check, MultiSet};
use lcdg_core::{unit_sphere, PointSet, Result, Space};
use num_complex::Complex64 as Complex;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{oracles, Report, CYCLE_RATIO_RANGE, DEGENERATE_RATIO_MAX, ENERGY_RATIO_RANGE, ORTHOGONALITY_TOL};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sphere(p: u32, d: usize) -> Result<(Arc<Space>, PointSet)> {
    let space = Space::build(p, 1, d)?;
    let s = unit_sphere(&space);
    Ok((space, s))
}

fn random_subset(set: &PointSet, size: usize, rng: &mut ChaCha8Rng) -> Result<PointSet> {
    let members = set.members();
    let picks = index::sample(rng, members.len(), size.min(members.len()));
    PointSet::from_indices(set.space().clone(), picks.into_iter().map(|i| members[i]))
}

/// Every (p, r, d) with r ≤ 6 and q^d ≤ 10^4.
fn small_spaces() -> Vec<(u32, u32, usize)> {
    let mut out = Vec::new();
    for p in (2..=10_000u32).filter(|&p| is_prime(p)) {
        let mut q = 1u64;
        for r in 1..=MAX_DEGREE {
            q *= p as u64;
            if q > 10_000 {
                break;
            }
            let mut size = q;
            let mut d = 1;
            while size <= 10_000 {
                out.push((p, r, d));
                d += 1;
                size *= q;
            }
        }
    }
    out
}

pub fn character_orthogonality() -> Result<Report> {
    let mut rep = Report::new();
    let cases = small_spaces();
    let mut oracle_points = 0usize;
    let mut r = rng(1);
    for &(p, deg, d) in &cases {
        let space = Space::build(p, deg, d)?;
        let n = space.size();
        let ones = vec![Complex::new(1.0, 0.0); n];
        let sums = character_transform(&space, &ones)?;
        let tol = ORTHOGONALITY_TOL * n as f64;
        let expect = |x: usize| if x == 0 { n as f64 } else { 0.0 };
        if let Some(x) = (0..n).find(|&x| (sums[x] - Complex::new(expect(x), 0.0)).norm() > tol) {
            rep.check(false, format!("({p},{deg},{d}) transform at x={x}: {}", sums[x]));
        }
        let sample: Vec<usize> = if n <= 300 {
            (0..n).collect()
        } else {
            std::iter::once(0).chain((0..4).map(|_| r.gen_range(1..n))).collect()
        };
        for x in sample {
            let (re, im) = oracles::character_sum(&space, x);
            oracle_points += 1;
            if (re - expect(x)).abs() > tol || im.abs() > tol {
                rep.check(false, format!("({p},{deg},{d}) direct sum at x={x}: {re}+{im}i"));
            }
        }
    }
    rep.note(format!("{} spaces, {} direct sums", cases.len(), oracle_points));
    Ok(rep)
}

pub fn spectral_walks() -> Result<Report> {
    let mut rep = Report::new();
    for (p, d) in [(3, 2), (5, 2), (3, 3), (5, 3)] {
        let (_, s) = sphere(p, d)?;
        for len in 2..=5 {
            let spectral = closed_walk_count(&s, len)? as u128;
            let exact = oracles::closed_walks(&s, len);
            rep.check(spectral == exact, format!("F_{p}^{d} L={len}: {spectral} vs {exact}"));
        }
    }
    rep.note("16 walk counts match adjacency powers");
    Ok(rep)
}

const ENERGY_SPACES: [(u32, u32, usize); 6] = [(3, 1, 2), (5, 1, 2), (3, 2, 2), (5, 1, 3), (2, 3, 2), (7, 1, 2)];

pub fn energy_oracle() -> Result<Report> {
    let mut rep = Report::new();
    let mut r = rng(3);
    for i in 0..30 {
        let (p, deg, d) = ENERGY_SPACES[i % ENERGY_SPACES.len()];
        let space = Space::build(p, deg, d)?;
        let size = r.gen_range(1..=12usize);
        let e = random_subset(&PointSet::full(space), size, &mut r)?;
        for k in [2, 3] {
            let fast = additive_energy(&e, k)?;
            let slow = oracles::energy(&e, k);
            rep.check(fast == slow, format!("set {i} (|E|={size}) k={k}: {fast} vs {slow}"));
        }
    }
    rep.note("60 energies match brute force");
    Ok(rep)
}

pub fn energy_inequality() -> Result<Report> {
    let mut rep = Report::new();
    let mut violations = 0;
    let (_, s) = sphere(5, 3)?;
    let mut r = rng(4);
    for i in 0..50 {
        let size = r.gen_range(2..=s.len());
        let e = random_subset(&s, size, &mut r)?;
        for k in [2, 3] {
            let c = energy_inequality_check(&e, k)?;
            if !c.holds {
                violations += 1;
                rep.check(
                    false,
                    format!("random set {i} |E|={size} k={k}: lhs {:.3} > rhs {:.3}", c.lhs, c.rhs),
                );
            }
        }
    }
    for q in [3, 5, 7, 11] {
        for d in [2, 3] {
            let (_, s) = sphere(q, d)?;
            for k in [2, 3] {
                let c = energy_inequality_check(&s, k)?;
                if !c.holds {
                    violations += 1;
                    rep.check(
                        false,
                        format!(
                            "sphere q={q} d={d} k={k}: lhs {:.3} > rhs {:.3} (slack {:.3})",
                            c.lhs, c.rhs, c.slack
                        ),
                    );
                }
            }
        }
    }
    rep.note(format!("{violations} violations in 116 instances"));
    Ok(rep)
}

pub fn sphere_energy_trend() -> Result<Report> {
    let mut rep = Report::new();
    let (lo, hi) = ENERGY_RATIO_RANGE;
    for d in [2, 3] {
        for k in [2, 3] {
            let mut ratios = Vec::new();
            for q in [5, 7, 11, 13] {
                let (_, s) = sphere(q, d)?;
                let t = additive_energy(&s, k)?;
                let ratio = t as f64 * q as f64 / (s.len() as f64).powi(2 * k as i32 - 1);
                rep.check(
                    (lo..=hi).contains(&ratio),
                    format!("q={q} d={d} k={k} ratio {ratio:.4} outside [{lo}, {hi}]"),
                );
                ratios.push(ratio);
            }
            let (first, last) = ((ratios[0] - 1.0).abs(), (ratios[3] - 1.0).abs());
            rep.check(
                last < first,
                format!("d={d} k={k}: |ratio-1| at q=13 ({last:.4}) not below q=5 ({first:.4})"),
            );
            let shown: Vec<String> = ratios.iter().map(|x| format!("{x:.3}")).collect();
            rep.note(format!("d={d} k={k} ratios {}", shown.join("/")));
        }
    }
    Ok(rep)
}

pub fn good_tuple_cycles() -> Result<Report> {
    let mut rep = Report::new();
    for p in [5, 7] {
        let (space, s) = sphere(p, 3)?;
        let g = CayleyGraph::new(s.clone())?;
        let tuples = good_energy_tuples(&s, 2)?;
        let mut failures = 0;
        for (a, b) in &tuples {
            let t = EnergyTuple::new(&space, a.clone(), b.clone())?;
            if cycle_from_tuple(&g, 0, &t).is_err() {
                failures += 1;
            }
        }
        rep.check(
            failures == 0,
            format!("F_{p}^3: {failures} good tuples without a cycle"),
        );
        let good = tuples.len() as u128;
        let mut r = rng(6 + p as u64);
        let counts: Vec<u64> = (0..10)
            .map(|_| cycles_through_vertex(&g, r.gen_range(0..space.size()), 4))
            .collect::<Result<_>>()?;
        rep.check(
            counts.iter().all(|&c| c == counts[0]),
            format!("F_{p}^3: per-vertex counts differ {counts:?}"),
        );
        rep.check(
            counts[0] as u128 >= good,
            format!("F_{p}^3: {} cycles < {good} good tuples", counts[0]),
        );
        rep.note(format!("F_{p}^3: T_2^good {good}, per-vertex {}", counts[0]));
    }
    Ok(rep)
}

pub fn total_cycles() -> Result<Report> {
    let mut rep = Report::new();
    let (space, s) = sphere(5, 3)?;
    let g = CayleyGraph::new(s.clone())?;
    let totals = total_cycle_count(&g, 4)?;
    let per_vertex = cycles_through_vertex(&g, 0, 4)? as u128;
    let n = space.size() as u128;
    rep.check(
        totals.rooted_directed == n * per_vertex,
        format!(
            "global {} vs q^d x per-vertex {}",
            totals.rooted_directed,
            n * per_vertex
        ),
    );
    rep.check(
        totals.unrooted * 8 == totals.rooted_directed,
        "unrooted division is not exact",
    );
    rep.check(per_vertex.is_multiple_of(2), "rooted count at a vertex is odd");
    let q = space.q() as f64;
    let ratio = totals.rooted_directed as f64 / ((s.len() as f64).powi(3) * q * q);
    let (lo, hi) = CYCLE_RATIO_RANGE;
    rep.check(
        (lo..=hi).contains(&ratio),
        format!("ratio {ratio:.4} outside [{lo}, {hi}]"),
    );
    let star = classify_tuples(&s, 2)?.star;
    rep.note(format!(
        "rooted {} unrooted {} per-vertex {per_vertex} T_2* {star} ratio {ratio:.4}",
        totals.rooted_directed, totals.unrooted
    ));
    Ok(rep)
}

fn random_multiset(
    space: &Space,
    rng: &mut ChaCha8Rng,
    max_support: usize,
    max_mult: u64,
) -> Result<(MultiSet, Vec<usize>)> {
    let size = rng.gen_range(1..=max_support.min(space.size()));
    let support: Vec<usize> = index::sample(rng, space.size(), size).into_vec();
    let mult: Vec<u64> = (0..size).map(|_| rng.gen_range(1..=max_mult)).collect();
    let items = support
        .iter()
        .zip(&mult)
        .flat_map(|(&x, &m)| std::iter::repeat_n(x, m as usize))
        .collect();
    Ok((MultiSet::new(support, mult)?, items))
}

pub fn mixing() -> Result<Report> {
    let mut rep = Report::new();
    let mut violations = 0;
    for (p, d, max_mult, seed) in [(5, 3, 4, 8u64), (3, 2, 1, 9)] {
        let (space, s) = sphere(p, d)?;
        let mut r = rng(seed);
        for i in 0..100 {
            let (u, u_items) = random_multiset(&space, &mut r, 60, max_mult)?;
            let (w, w_items) = random_multiset(&space, &mut r, 60, max_mult)?;
            let report = mixing_check(&s, &u, &w)?;
            let exact = oracles::edges_between(&s, &u_items, &w_items);
            rep.check(
                report.edges == exact,
                format!("F_{p}^{d} pair {i}: e(U,W) {} vs {exact}", report.edges),
            );
            if !report.holds {
                violations += 1;
                rep.check(
                    false,
                    format!("F_{p}^{d} pair {i}: deviation {} > {}", report.deviation, report.bound),
                );
            }
        }
    }
    rep.note(format!("{violations} violations in 200 pairs"));
    Ok(rep)
}

/// H = X + (0, .., 0, a), built coordinate by coordinate.
fn explicit_h(space: &Space, subspace: &[u32]) -> Vec<usize> {
    let d = space.dim();
    let mut out = Vec::new();
    for x in space.indices() {
        let mut c = space.decode(x);
        if c[d - 1] != 0 {
            continue;
        }
        for &a in subspace {
            c[d - 1] = a;
            out.push(space.encode(&c).unwrap());
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

pub fn bad_set() -> Result<Report> {
    let mut rep = Report::new();
    for (p, r, d, m) in [(3, 2, 2, 2), (2, 3, 2, 2), (3, 2, 3, 8)] {
        let cert = build_bad_set(p, r, d, m, None)?;
        let reloaded = BadSetCertificate::from_json(&cert.to_json());
        rep.check(
            reloaded.is_ok(),
            format!("({p},{r},{d}) certificate fails re-verification"),
        );
        let e = cert.set()?;
        let space = e.space().clone();
        let h = explicit_h(&space, &cert.subspace);
        rep.check(
            h.len() == cert.h_size,
            format!("({p},{r},{d}) |H| {} vs {}", h.len(), cert.h_size),
        );
        let mut diff = vec![false; space.size()];
        for &x in &h {
            for &y in &h {
                diff[space.sub(x, y)] = true;
            }
        }
        let meets = e.members().iter().filter(|&&x| diff[x]).count();
        rep.check(meets == 0, format!("({p},{r},{d}) E meets H - H in {meets} points"));
        rep.check(
            cert.mu >= cert.bound + MU_MARGIN,
            format!("({p},{r},{d}) μ {:.6} below {:.6}", cert.mu, cert.bound),
        );
        rep.note(format!(
            "({p},{r},{d}) |E|={} μ={:.4} bound={:.4}",
            e.len(),
            cert.mu,
            cert.bound
        ));
    }
    Ok(rep)
}

pub fn degenerate_span() -> Result<Report> {
    let mut rep = Report::new();
    for q in [3, 5, 7] {
        let (space, s) = sphere(q, 3)?;
        let l = degenerate_span_count(&space, 2)?;
        let brute = oracles::degenerate_triples(&s);
        rep.check(l.count == brute, format!("q={q}: L {} vs brute force {brute}", l.count));
        rep.check(
            l.ratio <= DEGENERATE_RATIO_MAX,
            format!("q={q}: ratio {:.4} above {DEGENERATE_RATIO_MAX}", l.ratio),
        );
        rep.note(format!(
            "q={q} |S|={} L={} ratio {:.4}",
            l.sphere_size, l.count, l.ratio
        ));
    }
    Ok(rep)
}

pub fn class_bookkeeping() -> Result<Report> {
    let mut rep = Report::new();
    let (space, s) = sphere(7, 3)?;
    let table = congruence_class_count(&s, 2)?;
    let star = classify_tuples(&s, 2)?.star;
    rep.check(table.total == star, format!("Σμ = {} vs T_2* = {star}", table.total));
    rep.check(!table.is_empty(), "no classes");
    let f = space.field();
    let mut r = rng(11);
    let mut broken = 0;
    for _ in 0..200 {
        let class = table.classes.choose(&mut r).expect("classes exist");
        let mut perm: Vec<usize> = (0..3).collect();
        perm.shuffle(&mut r);
        let signs: Vec<bool> = (0..3).map(|_| r.gen()).collect();
        let apply = |x: usize| {
            let v = space.decode(x);
            let w: Vec<u32> = perm
                .iter()
                .zip(&signs)
                .map(|(&j, &neg)| if neg { f.neg(v[j]) } else { v[j] })
                .collect();
            space.encode(&w).unwrap()
        };
        let cfg = SphericalConfig::new(space.clone(), class.representative.clone(), 0)?;
        let image = cfg.map(apply)?;
        let same = gram_fingerprint(&image) == class.fingerprint;
        let (a, b) = image.points().split_at(2);
        if !same || classify_tuple(&space, a, b) != TupleClass::Star {
            broken += 1;
        }
    }
    rep.check(
        broken == 0,
        format!("{broken} of 200 transforms changed the fingerprint"),
    );
    rep.note(format!(
        "{} ordered classes, {} unordered, Σμ = T_2* = {star}",
        table.len(),
        table.unordered_classes
    ));
    Ok(rep)
}

pub fn independent_set() -> Result<Report> {
    let mut rep = Report::new();
    let space = Space::build(5, 1, 3)?;
    let result = independent_set_no_good_tuples(&space, 2, 0)?;
    let counted = good_energy_count(&result.set, 2, CountMode::Exhaustive)?.exact;
    let brute = oracles::good_count(&result.set, 2);
    rep.check(counted == Some(0), format!("exhaustive counter reports {counted:?}"));
    rep.check(brute == 0, format!("brute force finds {brute} good tuples"));
    rep.check(!result.set.is_empty(), "empty result");
    rep.note(format!(
        "|E| = {} of {}, ratio to q^(d/3) {:.3}",
        result.set.len(),
        result.start_size,
        result.ratio
    ));
    Ok(rep)
}
