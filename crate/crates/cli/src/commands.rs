use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use minpoly_core::budget::{check, BoundReport};
use minpoly_core::format::{
    parse_matrix, write_matrix, CharPolyRecord, FieldInfo, GenRecord, MinPolyRecord, OracleRecord,
    VerifyCommandRecord, VerifyRecord, SCHEMA,
};
use minpoly_core::matgen::{gen_family, Family};
use minpoly_core::oracle::{char_poly_bruteforce, min_poly_bruteforce, ORACLE_LIMIT};
use minpoly_core::poly::is_irreducible;
use minpoly_core::verify::{choose_strategy, verify_by_eval, verify_by_loop, verify_by_nullspace};
use minpoly_core::{
    char_poly, min_poly_mc, verify_with_policy, Error, FactoredPoly, Field, FieldSpec, Matrix,
    MinPolyOptions, Poly, SeededRng, Strategy, VerifyPolicy,
};
use serde::Serialize;

use crate::args::Config;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io { path: PathBuf, source: io::Error },
    Json(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => minpoly_core::format::error_kind(e),
            CliError::Io { .. } => "io",
            CliError::Json(_) => "json",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Json(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_err(path))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(io_err(path))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(io_err(path))
}

/// Pretty JSON to `--json` or standard output.
pub fn emit<T: Serialize>(cfg_json: Option<&Path>, value: &T) -> CliResult<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Json(e.to_string()))?;
    text.push('\n');
    match cfg_json {
        Some(p) => write_text(p, &text),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn read_matrix(path: &Path, cfg: &Config) -> CliResult<(Arc<FieldSpec>, Matrix)> {
    let (spec, m) = parse_matrix(&read_text(path)?)?;
    if let Some(want) = &cfg.field {
        if want.order() != spec.order() {
            return Err(Error::FieldMismatch {
                expected: want.order(),
                found: spec.order(),
            }
            .into());
        }
    }
    if m.rows() != m.cols() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        }
        .into());
    }
    Ok((spec, m))
}

fn field_for(spec: Arc<FieldSpec>, cfg: &Config) -> Field {
    let mut f = Field::new(spec);
    f.set_sparse_skip(cfg.sparse_skip);
    if cfg.count_ops {
        f.enable_call_log();
    }
    f
}

fn bound_reports(f: &Field, cfg: &Config) -> CliResult<Option<Vec<BoundReport>>> {
    if !cfg.count_ops {
        return Ok(None);
    }
    Ok(Some(check(&f.take_call_log())?))
}

fn oracle_guard(m: &Matrix) -> CliResult<()> {
    if m.rows() > ORACLE_LIMIT {
        return Err(Error::OracleLimit {
            n: m.rows(),
            limit: ORACLE_LIMIT,
        }
        .into());
    }
    Ok(())
}

pub fn cmd_minpoly(input: &Path, cfg: &Config) -> CliResult<()> {
    let (spec, m) = read_matrix(input, cfg)?;
    if cfg.oracle {
        oracle_guard(&m)?;
    }
    let f = field_for(spec.clone(), cfg);
    let mut rng = SeededRng::new(cfg.seed);
    let r = min_poly_mc(&f, &m, &MinPolyOptions::new(cfg.eps.clone()), &mut rng)?;
    let outcome = verify_with_policy(&f, &r, cfg.verify, true)?;
    let mut rec = MinPolyRecord::new(&spec, &r, outcome.as_ref());
    if cfg.oracle {
        let mu = min_poly_bruteforce(&spec, &m)?;
        rec.oracle = Some(OracleRecord {
            agrees: rec.minpoly.expand(&f.fork()) == mu,
            poly: mu,
        });
    }
    rec.bounds = bound_reports(&f, cfg)?;
    emit(cfg.json.as_deref(), &rec)
}

pub fn cmd_charpoly(input: &Path, cfg: &Config) -> CliResult<()> {
    let (spec, m) = read_matrix(input, cfg)?;
    if cfg.oracle {
        oracle_guard(&m)?;
    }
    let f = field_for(spec.clone(), cfg);
    let mut rng = SeededRng::new(cfg.seed);
    let data = char_poly(&f, &m, &mut rng)?;
    let chi = data.char_poly(&f);
    let mut rec = CharPolyRecord::new(&spec, &data, chi.clone(), f.ops().total());
    if cfg.oracle {
        let want = char_poly_bruteforce(&spec, &m)?;
        rec.oracle = Some(OracleRecord {
            agrees: want == chi,
            poly: want,
        });
    }
    rec.bounds = bound_reports(&f, cfg)?;
    emit(cfg.json.as_deref(), &rec)
}

/// Accepts a bare factored list, a record with a `minpoly` field, or a
/// generator sidecar with `known_min`.
fn parse_candidate(text: &str, spec: &FieldSpec) -> CliResult<FactoredPoly> {
    let bad = |m: String| CliError::Core(Error::InvalidCandidate(m));
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Json(e.to_string()))?;
    let list = match &value {
        serde_json::Value::Array(_) => &value,
        serde_json::Value::Object(o) => o
            .get("minpoly")
            .or_else(|| o.get("known_min"))
            .ok_or_else(|| bad("no `minpoly` or `known_min` field".into()))?,
        _ => return Err(bad("expected a list or an object".into())),
    };
    let entries = list
        .as_array()
        .ok_or_else(|| bad("`minpoly` must be a list".into()))?;
    let g = Field::new(FieldSpec::from_order(spec.order() as u64)?);
    let mut pairs = Vec::with_capacity(entries.len());
    for e in entries {
        let coeffs: Vec<u32> = e
            .get("factor")
            .and_then(|c| serde_json::from_value(c.clone()).ok())
            .ok_or_else(|| bad(format!("bad factor in {e}")))?;
        let mult = e
            .get("multiplicity")
            .and_then(|m| m.as_u64())
            .and_then(|m| u32::try_from(m).ok())
            .ok_or_else(|| bad(format!("bad multiplicity in {e}")))?;
        let p = Poly::from_u32(spec.order(), &coeffs)?;
        if !p.is_monic() || p.is_constant() || !is_irreducible(&g, &p)? {
            return Err(bad(format!("{p} is not a monic irreducible")));
        }
        pairs.push((p, mult));
    }
    Ok(FactoredPoly::from_pairs(pairs))
}

pub fn cmd_verify(input: &Path, candidate: Option<&Path>, cfg: &Config) -> CliResult<()> {
    let (spec, m) = read_matrix(input, cfg)?;
    let f = field_for(spec.clone(), cfg);
    let mut rng = SeededRng::new(cfg.seed);
    let r = min_poly_mc(&f, &m, &MinPolyOptions::new(cfg.eps.clone()), &mut rng)?;
    // an external candidate is checked against every generator
    let (cand, u) = match candidate {
        Some(p) => (parse_candidate(&read_text(p)?, &spec)?, 0),
        None => (r.minpoly.clone(), r.u),
    };
    let strategy = match cfg.verify {
        VerifyPolicy::Loop => Strategy::Loop,
        VerifyPolicy::Eval => Strategy::Eval,
        VerifyPolicy::Nullspace => Strategy::Nullspace,
        VerifyPolicy::Auto | VerifyPolicy::None => choose_strategy(&r.data, &r.blocks, &cand, u),
    };
    let outcome = match strategy {
        Strategy::Loop => verify_by_loop(&f, &r.data, &r.blocks, &cand, u)?,
        Strategy::Eval => verify_by_eval(&f, &r.data, &r.blocks, &cand, u)?,
        Strategy::Nullspace => verify_by_nullspace(&f, &r.data, &r.blocks, &cand, u, true)?,
    };
    let rec = VerifyCommandRecord {
        schema: SCHEMA,
        command: "verify",
        field: FieldInfo::new(&spec),
        n: m.rows(),
        candidate: cand,
        verify: VerifyRecord::new(&outcome),
        seed: cfg.seed,
        bounds: bound_reports(&f, cfg)?,
    };
    emit(cfg.json.as_deref(), &rec)
}

/// Field used by a family when none is given.
pub fn default_field(family: Family) -> u64 {
    match family {
        Family::M1 | Family::M4 => 3,
        Family::M3 => 5,
        Family::M5 => 251,
        Family::M6 => 2,
        Family::M7 => 81,
    }
}

pub fn cmd_gen(
    family: Family,
    scale: u32,
    output: Option<&Path>,
    conjugate: bool,
    cfg: &Config,
) -> CliResult<()> {
    let spec = match &cfg.field {
        Some(s) => s.clone(),
        None => FieldSpec::from_order(default_field(family))?,
    };
    let f = Field::new(spec.clone());
    let mut rng = SeededRng::new(cfg.seed);
    let (matrix, known) = match family.spec(&f, scale)? {
        Some(s) if !conjugate => {
            let g = minpoly_core::matgen::gen_from_spec(&s, &f, &mut rng, false)?;
            (g.matrix.clone(), Some((s, g)))
        }
        _ => gen_family(family, scale, &f, &mut rng)?,
    };
    let text = write_matrix(spec.order(), &matrix);
    let sidecar = GenRecord {
        schema: SCHEMA,
        command: "gen",
        family: family.name().to_string(),
        scale,
        field: FieldInfo::new(&spec),
        n: matrix.rows(),
        spec: known.as_ref().map(|(s, _)| s.clone()),
        known_min: known.as_ref().map(|(_, g)| g.known_min.clone()),
        known_char: known.as_ref().map(|(_, g)| g.known_char.clone()),
        seed: cfg.seed,
    };
    match output {
        Some(p) => {
            write_text(p, &text)?;
            let side = cfg.json.clone().unwrap_or_else(|| {
                let mut s = p.as_os_str().to_owned();
                s.push(".json");
                PathBuf::from(s)
            });
            emit(Some(&side), &sidecar)
        }
        None => {
            io::stdout()
                .write_all(text.as_bytes())
                .map_err(io_err(Path::new("<stdout>")))?;
            match &cfg.json {
                Some(p) => emit(Some(p), &sidecar),
                None => Ok(()),
            }
        }
    }
}
