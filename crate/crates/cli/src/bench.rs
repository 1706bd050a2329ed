use std::time::Instant;

use minpoly_core::budget::check;
use minpoly_core::format::SCHEMA;
use minpoly_core::matgen::{gen_family, Family};
use minpoly_core::{
    min_poly_mc, verify_with_policy, Error, Field, FieldSpec, MinPolyOptions, SeededRng,
    VerifyPolicy,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::Config;
use crate::commands::{default_field, emit, CliResult};

/// Dimension parameter of the full-size experiment.
pub fn full_size(family: Family) -> u32 {
    match family {
        Family::M1 => 1000,
        Family::M3 => 300,
        Family::M4 => 400,
        Family::M5 => 200,
        Family::M6 => 400,
        Family::M7 => 10,
    }
}

pub fn scaled_size(family: Family, scale: f64) -> u32 {
    ((full_size(family) as f64 * scale).round() as u32).max(1)
}

/// Soft wall-clock limit for the large random run, in milliseconds.
pub const SOFT_LIMIT_MS: u128 = 120_000;

#[derive(Clone, Debug, Serialize)]
pub struct BoundChecks {
    pub total: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub family: String,
    pub q: u32,
    pub n: usize,
    pub k: usize,
    /// Number of components of the structured families; absent for random ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_expected: Option<usize>,
    pub u: usize,
    pub ops_spin: u64,
    pub ops_fact: u64,
    pub ops_ordp: u64,
    pub ops_verify: u64,
    pub wall_ms: u128,
    pub bound_checks: BoundChecks,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRecord {
    pub schema: u32,
    pub command: &'static str,
    pub seed: u64,
    pub scale: f64,
    pub rows: Vec<BenchRow>,
    pub warnings: Vec<String>,
}

fn run_one(family: Family, scale: f64, cfg: &Config, stream: u64) -> CliResult<BenchRow> {
    let spec = match &cfg.field {
        Some(s) => s.clone(),
        None => FieldSpec::from_order(default_field(family))?,
    };
    let mut f = Field::new(spec);
    f.set_sparse_skip(cfg.sparse_skip);
    f.enable_call_log();
    let mut rng = SeededRng::new(cfg.seed).split(stream);
    let (m, known) = gen_family(family, scaled_size(family, scale), &f, &mut rng)?;
    let start = Instant::now();
    let r = min_poly_mc(&f, &m, &MinPolyOptions::new(cfg.eps.clone()), &mut rng)?;
    let policy = match cfg.verify {
        VerifyPolicy::None => VerifyPolicy::Auto,
        p => p,
    };
    let v = verify_with_policy(&f, &r, policy, true)?;
    let wall_ms = start.elapsed().as_millis();
    let reports = check(&f.take_call_log())?;
    Ok(BenchRow {
        family: family.name().to_string(),
        q: f.order(),
        n: m.rows(),
        k: r.k(),
        k_expected: known.map(|(s, _)| {
            s.components()
                .iter()
                .map(|c| c.exponents.len())
                .max()
                .unwrap_or(0)
        }),
        u: r.u,
        ops_spin: r.ops.spin.total(),
        ops_fact: r.ops.factor.total(),
        ops_ordp: r.ops.ordpoly.total(),
        ops_verify: v.map_or(0, |o| o.ops.total()),
        wall_ms,
        bound_checks: BoundChecks {
            total: reports.len(),
            violations: reports.iter().filter(|b| !b.passed()).count(),
        },
    })
}

pub fn cmd_bench(families: &[Family], scale: f64, jobs: usize, cfg: &Config) -> CliResult<()> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(
            Error::InvalidArgument(format!("scale must lie in (0, 1], got {scale}")).into(),
        );
    }
    let mut fams = families.to_vec();
    fams.sort();
    fams.dedup();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rows = pool.install(|| {
        fams.par_iter()
            .map(|&fam| {
                run_one(
                    fam,
                    scale,
                    cfg,
                    Family::ALL.iter().position(|&g| g == fam).unwrap() as u64,
                )
            })
            .collect::<CliResult<Vec<BenchRow>>>()
    })?;
    rows.sort_by(|a, b| (&a.family, a.n).cmp(&(&b.family, b.n)));
    let mut warnings = Vec::new();
    for r in &rows {
        if r.family == "m1" && r.n >= 1000 && r.q == 3 && r.wall_ms >= SOFT_LIMIT_MS {
            let w = format!(
                "m1 n={} q=3 took {} ms, above the {} ms soft limit",
                r.n, r.wall_ms, SOFT_LIMIT_MS
            );
            eprintln!("warning: {w}");
            warnings.push(w);
        }
        if r.bound_checks.violations > 0 {
            let w = format!(
                "{} n={}: {} bound violations",
                r.family, r.n, r.bound_checks.violations
            );
            eprintln!("warning: {w}");
            warnings.push(w);
        }
    }
    let rec = BenchRecord {
        schema: SCHEMA,
        command: "bench",
        seed: cfg.seed,
        scale,
        rows,
        warnings,
    };
    emit(cfg.json.as_deref(), &rec)
}
