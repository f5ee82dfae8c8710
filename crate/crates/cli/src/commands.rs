use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use lcdg_core::cayley::{cycle_from_tuple, cycles_through_vertex, total_cycle_count, CayleyGraph};
use lcdg_core::configurations::{congruence_class_count, degenerate_span_count};
use lcdg_core::constructions::{build_bad_set, greedy_independent_subset};
use lcdg_core::energy::{
    additive_energy, classify_tuples, energy_inequality_check, good_energy_count, good_energy_tuples, CountMode,
    EnergyTuple,
};
use lcdg_core::spectral::{fourier_spectrum, mixing_check, MultiSet};
use lcdg_core::{sphere, FieldCtx, PointSet, Space, Vector};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

/// Where the point set comes from: a file, or the sphere ||x|| = j in F_q^d.
#[derive(Args, Debug, Clone, Serialize)]
pub struct SetArgs {
    /// Characteristic of the field.
    #[arg(long)]
    pub p: Option<u32>,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Sphere radius, as an element code.
    #[arg(long, default_value_t = 1)]
    pub j: u32,
    /// Point-set file; overrides --p/--r/--d/--j.
    #[arg(long)]
    pub set: Option<PathBuf>,
}

fn build_space(p: Option<u32>, r: u32, d: Option<usize>, cap: u64) -> Result<Arc<Space>, CliError> {
    let p = p.ok_or_else(|| CliError::Usage("--p is required without --set".into()))?;
    let d = d.ok_or_else(|| CliError::Usage("--d is required without --set".into()))?;
    Ok(Space::with_cap(Arc::new(FieldCtx::new(p, r, None)?), d, cap)?)
}

impl SetArgs {
    pub fn load(&self, cap: u64) -> Result<PointSet, CliError> {
        if let Some(path) = &self.set {
            let text = std::fs::read_to_string(path)?;
            return Ok(PointSet::parse_file_with_cap(&text, cap)?);
        }
        let space = build_space(self.p, self.r, self.d, cap)?;
        if self.j >= space.q() {
            return Err(CliError::Usage(format!(
                "--j {} is not an element of F_{}",
                self.j,
                space.q()
            )));
        }
        Ok(sphere(&space, self.j, &Vector::zero(space.dim()))?)
    }
}

fn describe(e: &PointSet) -> Value {
    let space = e.space();
    let f = space.field();
    json!({
        "p": f.p(),
        "r": f.r(),
        "q": f.q(),
        "d": space.dim(),
        "poly": f.poly(),
        "size": e.len(),
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(x)) = (&mut base, extra) {
        b.extend(x);
    }
    base
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub set: SetArgs,
    /// Histogram bins over [0, |E|].
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
}

pub fn spectrum(a: &SpectrumArgs, cap: u64) -> Result<Value, CliError> {
    if a.bins == 0 {
        return Err(CliError::Usage("--bins must be positive".into()));
    }
    let e = a.set.load(cap)?;
    let s = fourier_spectrum(&e)?;
    let space = e.space();
    let q = space.q() as f64;
    Ok(merge(
        describe(&e),
        json!({
            "degree": s.degree,
            "mu": s.mu,
            "argmax": s.argmax.map(|m| space.decode(m)),
            "sphere_bound": 2.0 * q.powf((space.dim() as f64 - 1.0) / 2.0),
            "histogram": s.histogram(a.bins),
        }),
    ))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Estimate T_k^good from this many samples instead of exhaustively.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn energy(a: &EnergyArgs, cap: u64) -> Result<Value, CliError> {
    if a.k < 2 {
        return Err(CliError::Usage("--k must be at least 2".into()));
    }
    let e = a.set.load(cap)?;
    let t_k = additive_energy(&e, a.k)?;
    let mode = match a.samples {
        Some(samples) => CountMode::Sampled { samples, seed: a.seed },
        None => CountMode::Exhaustive,
    };
    let good = good_energy_count(&e, a.k, mode)?;
    let classification = match a.samples {
        None => Some(classify_tuples(&e, a.k)?),
        Some(_) => None,
    };
    let on_unit_sphere = e.members().iter().all(|&x| e.space().norm(x) == 1);
    let inequality = if on_unit_sphere && !e.is_empty() {
        Some(energy_inequality_check(&e, a.k)?)
    } else {
        None
    };
    let q = e.space().q() as f64;
    Ok(merge(
        describe(&e),
        json!({
            "k": a.k,
            "T_k": t_k,
            "T_k_good": good.exact,
            "T_k_good_estimate": good.estimate,
            "T_k_good_std_error": good.std_error,
            "count_mode": good.mode,
            "normalized_energy": t_k as f64 * q / (e.len() as f64).powi(2 * a.k as i32 - 1),
            "classification": classification,
            "inequality": inequality,
        }),
    ))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CyclesArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Number of sampled root vertices.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Skip the global count over every root.
    #[arg(long)]
    pub no_total: bool,
}

pub fn cycles(a: &CyclesArgs, cap: u64) -> Result<Value, CliError> {
    if !(2..=3).contains(&a.k) {
        return Err(CliError::Usage("--k must be 2 or 3".into()));
    }
    let e = a.set.load(cap)?;
    let space = e.space().clone();
    let g = CayleyGraph::new(e.clone())?;
    let len = 2 * a.k;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut sample = Vec::new();
    for i in 0..a.samples {
        let v = if i == 0 { 0 } else { rng.gen_range(0..space.size()) };
        let rooted = cycles_through_vertex(&g, v, len)?;
        if rooted % 2 != 0 {
            return Err(CliError::Core(lcdg_core::Error::InvariantViolated(format!(
                "odd rooted cycle count {rooted} at vertex {v}"
            ))));
        }
        sample.push(json!({ "vertex": space.decode(v), "rooted": rooted, "unrooted_through": rooted / 2 }));
    }
    let good_tuples = if e.is_empty() {
        Vec::new()
    } else {
        good_energy_tuples(&e, a.k)?
    };
    let t_good = good_tuples.len() as u64;
    let mut from_tuples_ok = true;
    for (x, y) in &good_tuples {
        let t = EnergyTuple::new(&space, x.clone(), y.clone())?;
        from_tuples_ok &= cycle_from_tuple(&g, 0, &t).is_ok();
    }
    let lemma_holds = from_tuples_ok && sample.iter().all(|s| s["rooted"].as_u64().unwrap_or(0) >= t_good);
    let totals = if a.no_total {
        None
    } else {
        Some(total_cycle_count(&g, len)?)
    };
    let q = space.q() as f64;
    let normalized = totals
        .as_ref()
        .map(|t| t.rooted_directed as f64 / ((e.len() as f64).powi(len as i32 - 1) * q.powi(space.dim() as i32 - 1)));
    Ok(merge(
        describe(&e),
        json!({
            "k": a.k,
            "rooted_directed_total": totals.as_ref().map(|t| t.rooted_directed),
            "unrooted_total": totals.as_ref().map(|t| t.unrooted),
            "normalized_total": normalized,
            "per_vertex_sample": sample,
            "T_k_good": t_good,
            "lemma_con_holds": lemma_holds,
        }),
    ))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ClassesArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
}

#[derive(Serialize)]
pub struct ClassRow {
    pub hash: String,
    pub multiplicity: u128,
    pub representative: String,
}

pub struct ClassesOutput {
    pub summary: Value,
    pub rows: Vec<ClassRow>,
}

pub fn classes(a: &ClassesArgs, cap: u64) -> Result<ClassesOutput, CliError> {
    let e = a.set.load(cap)?;
    let table = congruence_class_count(&e, a.k)?;
    let rows = table
        .classes
        .iter()
        .map(|c| ClassRow {
            hash: c.hash.clone(),
            multiplicity: c.multiplicity,
            representative: c
                .representative
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        })
        .collect();
    Ok(ClassesOutput {
        summary: merge(
            describe(&e),
            json!({
                "k": a.k,
                "classes": table.len(),
                "unordered_classes": table.unordered_classes,
                "total": table.total,
            }),
        ),
        rows,
    })
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MixingArgs {
    #[command(flatten)]
    pub set: SetArgs,
    /// Number of random (U, W) pairs.
    #[arg(long, default_value_t = 100)]
    pub pairs: usize,
    #[arg(long, default_value_t = 60)]
    pub max_support: usize,
    /// Largest multiplicity; 1 draws plain sets.
    #[arg(long, default_value_t = 1)]
    pub max_mult: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn mixing(a: &MixingArgs, cap: u64) -> Result<Value, CliError> {
    if a.max_support == 0 || a.max_mult == 0 {
        return Err(CliError::Usage("--max-support and --max-mult must be positive".into()));
    }
    let e = a.set.load(cap)?;
    let space = e.space().clone();
    let mu = fourier_spectrum(&e)?.mu;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let draw = |rng: &mut ChaCha8Rng| -> Result<MultiSet, CliError> {
        let size = rng.gen_range(1..=a.max_support.min(space.size()));
        let support = index::sample(rng, space.size(), size).into_vec();
        let mult = (0..size).map(|_| rng.gen_range(1..=a.max_mult)).collect();
        Ok(MultiSet::new(support, mult)?)
    };
    let (mut violations, mut worst) = (0usize, 0.0f64);
    for _ in 0..a.pairs {
        let u = draw(&mut rng)?;
        let w = draw(&mut rng)?;
        let r = mixing_check(&e, &u, &w)?;
        violations += !r.holds as usize;
        if r.bound > 0.0 {
            worst = worst.max(r.deviation / r.bound);
        }
    }
    Ok(merge(
        describe(&e),
        json!({ "mu": mu, "pairs": a.pairs, "violations": violations, "max_deviation_ratio": worst }),
    ))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BadSetArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    #[arg(long)]
    pub d: usize,
    /// Target size of E.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Pick pairs in a seeded random order instead of lowest index first.
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn badset(a: &BadSetArgs) -> Result<Value, CliError> {
    let cert = build_bad_set(a.p, a.r, a.d, a.m, a.seed)?;
    if !cert.holds {
        return Err(CliError::Core(lcdg_core::Error::InvariantViolated(format!(
            "μ = {} does not clear {}",
            cert.mu, cert.bound
        ))));
    }
    Ok(serde_json::to_value(cert).expect("certificate serializes"))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct IndepSetArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn indepset(a: &IndepSetArgs, cap: u64) -> Result<Value, CliError> {
    let start = a.set.load(cap)?;
    let r = greedy_independent_subset(&start, a.k, a.seed)?;
    Ok(merge(
        describe(&r.set),
        json!({
            "k": r.k,
            "start_size": r.start_size,
            "removed_pairs": r.removed.len(),
            "good_after": r.good_after,
            "ratio": r.ratio,
            "set_file": r.set.to_file_string(),
        }),
    ))
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DegenerateArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
}

pub fn degenerate_span(a: &DegenerateArgs, cap: u64) -> Result<Value, CliError> {
    let space = build_space(Some(a.p), a.r, Some(a.d), cap)?;
    let l = degenerate_span_count(&space, a.n)?;
    Ok(json!({
        "p": a.p,
        "r": a.r,
        "q": space.q(),
        "d": a.d,
        "n": l.n,
        "sphere_size": l.sphere_size,
        "count": l.count,
        "ratio": l.ratio,
    }))
}
