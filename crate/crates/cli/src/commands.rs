use std::path::Path;

use fqtile::codes::{
    code_from_tiling, code_stats, formula_check, verify_perfect, Code, CodeStats, PerfectVerdict, DEFAULT_ENUM_CEILING,
};
use fqtile::linalg::rank_affine;
use fqtile::projgeo::{
    counting_identity, exhaustive_search, full_rank_points, verify_factorization, FactorWitness, Factorization,
    GeometryKind, PPoint, SearchOptions, DEFAULT_SEARCH_CEILING,
};
use fqtile::tiling::{audit, construct_projective, construct_semiprojective, is_projective, periods, verify_tiling, Tiling};
use fqtile::{FieldSpec, VSet};
use serde_json::{json, Value};

use crate::args::{ConstructArgs, GeometryArg, SearchArgs, ToCodeArgs, VerifyArgs};
use crate::error::CliError;
use crate::format::{self, Kind, TileFile};
use crate::report::{self, big, vector, Report, Stopwatch};

/// Environment variable overriding the bound on `q^N` for code enumeration.
pub const ENUM_CEILING_VAR: &str = "FQTILING_ENUM_CEILING";

/// A finished command: its report, exit code and any message for stderr.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit: i32,
    pub message: Option<String>,
}

impl Outcome {
    fn verdict(report: Report, ok: bool) -> Self {
        Outcome { report, exit: if ok { 0 } else { 1 }, message: None }
    }
}

pub fn enum_ceiling() -> Result<u64, CliError> {
    match std::env::var(ENUM_CEILING_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Usage(format!("{ENUM_CEILING_VAR}={s:?} is not an integer"))),
        Err(_) => Ok(DEFAULT_ENUM_CEILING),
    }
}

fn same_space(a: (&Path, &VSet), b: (&Path, &VSet)) -> Result<(), CliError> {
    if a.1.space() == b.1.space() {
        return Ok(());
    }
    let desc = |s: &VSet| format!("q={} n={}", s.field().q(), s.n());
    Err(CliError::HeaderMismatch(format!(
        "{} has {}, {} has {}",
        a.0.display(),
        desc(a.1),
        b.0.display(),
        desc(b.1)
    )))
}

fn tile_summary(set: &VSet) -> Result<Value, CliError> {
    let rank = rank_affine(set)?;
    let per = periods(set)?;
    Ok(json!({
        "size": set.len(),
        "projective": is_projective(set),
        "rank": rank,
        "full_rank": rank == set.n(),
        "period_count": per.len(),
        "aperiodic": per.len() == 1,
    }))
}

pub fn construct(args: &ConstructArgs, sw: &mut Stopwatch) -> Result<Outcome, CliError> {
    let field = FieldSpec::new(args.p, args.k)?;
    let t = sw.run("construct", || match args.theorem {
        1 => construct_semiprojective(&field, args.m),
        _ => construct_projective(&field, args.m),
    })?;
    let a = sw.run("verify", || audit(&t))?;
    for (path, set) in [(&args.out_u, t.u()), (&args.out_v, t.v())] {
        if let Some(path) = path {
            format::write(path, &format::render(Kind::Tile, set))?;
        }
    }

    let mut checks = Report::new();
    checks.set("tiling", a.verdict.is_valid());
    checks.set("u_projective", a.u_projective);
    if args.theorem == 2 {
        checks.set("v_projective", a.v_projective);
        // the construction refuses overlapping exchange pieces, so reaching here means they passed
        checks.set("pieces_disjoint", true);
    }
    checks.set("full_rank", a.full_rank());
    checks.set("aperiodic", a.aperiodic());
    let ok = checks.clone().into_value().as_object().unwrap().values().all(|v| v == &Value::Bool(true));

    let side = |size: usize, projective: bool, rank: usize, per: usize| {
        json!({
            "size": size,
            "projective": projective,
            "rank": rank,
            "full_rank": rank == a.n,
            "period_count": per,
            "aperiodic": per == 1,
        })
    };
    let mut r = Report::new();
    r.set("command", "construct")
        .set("theorem", args.theorem)
        .set("field", report::field(&field))
        .set("m", args.m)
        .set("n", a.n)
        .set("u", side(a.u_size, a.u_projective, a.u_rank, a.u_period_count))
        .set("v", side(a.v_size, a.v_projective, a.v_rank, a.v_period_count))
        .set("tiling", report::tiling_verdict(&a.verdict))
        .set("checks", checks)
        .set("all_passed", ok);
    Ok(Outcome::verdict(r, ok))
}

fn read_pair(u: &Path, v: &Path, assume: Option<u64>) -> Result<(TileFile, TileFile), CliError> {
    let fu = format::read(u, assume)?;
    let fv = format::read(v, assume)?;
    same_space((u, &fu.set), (v, &fv.set))?;
    Ok((fu, fv))
}

pub fn verify(args: &VerifyArgs, sw: &mut Stopwatch) -> Result<Outcome, CliError> {
    if let (Some(u), Some(v)) = (&args.u, &args.v) {
        let (fu, fv) = read_pair(u, v, args.assume)?;
        let t = Tiling::new(fu.set, fv.set)?;
        let verdict = sw.run("verify", || verify_tiling(&t))?;
        let mut r = Report::new();
        r.set("command", "verify")
            .set("object", "tiling")
            .set("field", report::field(t.space().field()))
            .set("n", t.space().n())
            .set("u", tile_summary(t.u())?)
            .set("v", tile_summary(t.v())?)
            .set("tiling", report::tiling_verdict(&verdict))
            .set("valid", verdict.is_valid());
        return Ok(Outcome::verdict(r, verdict.is_valid()));
    }
    if let Some(path) = &args.code {
        return verify_code(path, args, sw);
    }
    let files = args.factorization.as_ref().expect("clap enforces one input");
    verify_points(&files[0], &files[1], args.assume, sw)
}

fn perfect_json(v: &PerfectVerdict) -> Value {
    json!({
        "valid": v.is_valid(),
        "radius": v.radius,
        "ball_size": big(v.ball_size),
        "space_size": big(v.space_size),
        "covered": v.covered,
        "uncovered": v.uncovered,
        "double_covered": v.double_covered.as_ref().map_or(Value::Null, vector),
        "first_uncovered": v.first_uncovered.as_ref().map_or(Value::Null, vector),
    })
}

fn stats_json(s: &CodeStats) -> Value {
    json!({
        "rank": s.rank,
        "full_rank": s.full_rank,
        "kernel_dim": s.kernel_dim,
        "period_count": s.period_count,
    })
}

fn verify_code(path: &Path, args: &VerifyArgs, sw: &mut Stopwatch) -> Result<Outcome, CliError> {
    let file = format::read(path, args.assume)?;
    let code = Code::new(file.set, path.display().to_string());
    let ceiling = enum_ceiling()?;
    let perfect = sw.run("verify_perfect", || verify_perfect(&code, args.radius, ceiling))?;
    let stats = sw.run("stats", || code_stats(&code))?;
    let mut ok = perfect.is_valid();
    let mut expectations = Report::new();
    for (name, expected, found) in
        [("rank", args.expect_rank, stats.rank), ("kernel_dim", args.expect_kernel_dim, stats.kernel_dim)]
    {
        if let Some(e) = expected {
            expectations.set(name, json!({ "expected": e, "found": found, "ok": e == found }));
            ok &= e == found;
        }
    }
    let mut r = Report::new();
    r.set("command", "verify")
        .set("object", "code")
        .set("field", report::field(code.field()))
        .set("length", code.length())
        .set("size", code.len())
        .set("perfect", perfect_json(&perfect))
        .set("stats", stats_json(&stats));
    if args.expect_rank.is_some() || args.expect_kernel_dim.is_some() {
        r.set("expectations", expectations);
    }
    r.set("valid", ok);
    Ok(Outcome::verdict(r, ok))
}

/// Reads a points file; every row must be a normalized representative.
pub fn read_points(path: &Path, assume: Option<u64>) -> Result<(VSet, Vec<PPoint>), CliError> {
    let file = format::read(path, assume)?;
    if file.kind != Kind::Points {
        return Err(CliError::Usage(format!("{}: expected a points file, found kind {}", path.display(), file.kind.as_str())));
    }
    let mut pts = Vec::with_capacity(file.set.len());
    for (i, v) in file.set.iter().enumerate() {
        if !v.is_normalized() {
            return Err(CliError::Format {
                path: path.to_owned(),
                source: format::FormatError {
                    line: file.first_row_line + i,
                    msg: "row is not a normalized point (first nonzero entry must be 1)".into(),
                },
            });
        }
        pts.push(PPoint::new(&v)?);
    }
    Ok((file.set, pts))
}

fn witness_json(w: &Option<FactorWitness>) -> Value {
    match w {
        None => Value::Null,
        Some(FactorWitness::Uncovered(p)) => json!({ "kind": "uncovered", "point": vector(p.rep()) }),
        Some(FactorWitness::MultiplyCovered { point, count }) => {
            json!({ "kind": "multiply_covered", "point": vector(point.rep()), "count": count })
        }
        Some(FactorWitness::Stray(p)) => json!({ "kind": "stray_incidence", "point": vector(p.rep()) }),
    }
}

fn full_rank_json(pts: &[PPoint]) -> Result<Value, CliError> {
    Ok(if pts.is_empty() { json!({ "skipped": "empty set" }) } else { full_rank_points(pts)?.into() })
}

fn verify_points(u: &Path, v: &Path, assume: Option<u64>, sw: &mut Stopwatch) -> Result<Outcome, CliError> {
    let (su, pu) = read_points(u, assume)?;
    let (sv, pv) = read_points(v, assume)?;
    same_space((u, &su), (v, &sv))?;
    let fac = Factorization::new(su.field(), su.n(), pu, pv)?;
    let verdict = sw.run("verify", || verify_factorization(&fac))?;
    let mut r = Report::new();
    r.set("command", "verify")
        .set("object", "factorization")
        .set("field", report::field(fac.field()))
        .set("n", fac.n())
        .set("u_points", fac.u().len())
        .set("v_points", fac.v().len())
        .set("u_full_rank", full_rank_json(fac.u())?)
        .set("v_full_rank", full_rank_json(fac.v())?)
        .set("outside_points", big(verdict.outside_points))
        .set("uncovered", big(verdict.uncovered))
        .set("multiply_covered", verdict.multiply_covered)
        .set("stray_incidences", verdict.stray_incidences)
        .set("literal_valid", verdict.literal_valid)
        .set("degenerate", verdict.degenerate)
        .set("witness", witness_json(&verdict.witness))
        .set("valid", verdict.valid);
    Ok(Outcome::verdict(r, verdict.valid))
}

pub fn to_code(args: &ToCodeArgs, sw: &mut Stopwatch) -> Result<Outcome, CliError> {
    let (fu, fv) = read_pair(&args.u, &args.v, None)?;
    let t = Tiling::new(fu.set, fv.set)?;
    let ceiling = enum_ceiling()?;
    let code = sw.run("code_from_tiling", || code_from_tiling(&t, ceiling))?;
    if let Some(out) = &args.out {
        format::write(out, &format::render(Kind::Code, code.words()))?;
    }
    let perfect = sw.run("verify_perfect", || verify_perfect(&code, 1, ceiling))?;
    let stats = sw.run("stats", || code_stats(&code))?;
    let check = sw.run("formula_check", || formula_check(&t, &stats))?;
    let ok = perfect.is_valid() && check.consistent();
    let mut r = Report::new();
    r.set("command", "to-code")
        .set("field", report::field(code.field()))
        .set("length", code.length())
        .set("size", code.len())
        .set("perfect", perfect_json(&perfect))
        .set("stats", stats_json(&stats))
        .set(
            "formulas",
            json!({
                "u_rank": check.u_rank,
                "vu_size": check.vu_size,
                "vu_rank": check.vu_rank,
                "vu_kernel_dim": check.vu_kernel_dim,
                "vu_period_count": check.vu_period_count,
                "predicted_rank": check.predicted_rank,
                "predicted_kernel_dim": check.predicted_kernel_dim,
                "predicted_period_count": big(check.predicted_period_count),
                "rank_ok": check.rank_ok,
                "kernel_ok": check.kernel_ok,
                "periods_ok": check.periods_ok,
                "consistent": check.consistent(),
            }),
        )
        .set("valid", ok);
    Ok(Outcome::verdict(r, ok))
}

pub fn search(args: &SearchArgs, sw: &mut Stopwatch) -> Result<Outcome, CliError> {
    let field = FieldSpec::new(args.p, args.k)?;
    let q = field.q();
    let n = args.n;
    let (a, b) = args.sizes;
    let (kind, inner, label) = match args.geometry {
        GeometryArg::Projective => (GeometryKind::Projective, q as u128 - 1, format!("|PG({}, {q})|", n.saturating_sub(1))),
        GeometryArg::Affine => (GeometryKind::Affine, q as u128 - 2, format!("|AG({n}, {q})|")),
    };
    let (lhs, rhs) =
        counting_identity(kind, q, n, a as u128, b as u128).ok_or(fqtile::Error::SpaceTooLarge { q, n })?;
    let expression = format!("{a} + {b} + {a}*{b}*{inner} = {lhs}");
    let holds = lhs == rhs;
    let ceiling = args.max_points.unwrap_or(DEFAULT_SEARCH_CEILING);

    let mut r = Report::new();
    r.set("command", "search")
        .set("geometry", kind.name())
        .set("field", report::field(&field))
        .set("n", n)
        .set("points", big(rhs))
        .set("sizes", json!([a, b]))
        .set(
            "identity",
            json!({
                "expression": expression,
                "lhs": big(lhs),
                "rhs": big(rhs),
                "rhs_meaning": label,
                "holds": holds,
            }),
        )
        .set("ceiling", ceiling);

    let refuse = |mut r: Report, reason: String| {
        r.set("status", "refused").set("reason", reason.clone());
        Ok(Outcome { report: r, exit: 2, message: Some(reason) })
    };
    if !holds {
        return refuse(r, format!("counting identity violated: {expression} != {rhs} = {label}"));
    }
    if rhs > ceiling as u128 {
        return refuse(
            r,
            format!(
                "geometry has {rhs} points, above the search ceiling of {ceiling}; \
                 rerun with --max-points {rhs} to search it (long-running)"
            ),
        );
    }

    let opts = SearchOptions { first_only: args.first_only, fix_root: !args.no_symmetry, max_points: ceiling };
    let outcome = sw.run("search", || exhaustive_search(kind, &field, n, a, b, &opts))?;
    let g = &outcome.geometry;
    let as_points = |ids: &[usize]| -> Vec<PPoint> { ids.iter().map(|&i| PPoint::new(&g.points()[i]).unwrap()).collect() };
    let full_rank = match kind {
        GeometryKind::Projective => {
            let mut count = 0;
            for s in &outcome.solutions {
                let (u, v) = (as_points(&s.u), as_points(&s.v));
                if !u.is_empty() && !v.is_empty() && full_rank_points(&u)? && full_rank_points(&v)? {
                    count += 1;
                }
            }
            Value::from(count)
        }
        GeometryKind::Affine => json!({ "skipped": "defined for projective geometries only" }),
    };
    if let Some(out) = &args.out {
        let mut text = String::new();
        for (i, s) in outcome.solutions.iter().enumerate() {
            text.push_str(&format!("solution {}\n", i + 1));
            for ids in [&s.u, &s.v] {
                let rows: Vec<&[u32]> = ids.iter().map(|&i| g.points()[i].coords()).collect();
                text.push_str(&format::render_rows(&field, n, Kind::Points, rows.into_iter()));
            }
        }
        format::write(out, &text)?;
    }
    r.set("status", "complete")
        .set("symmetry", if opts.fix_root { "smallest point fixed in U" } else { "none" })
        .set("first_only", args.first_only)
        .set("solutions", outcome.solutions.len())
        .set("full_rank_solutions", full_rank)
        .set("nodes", outcome.nodes);
    Ok(Outcome { report: r, exit: 0, message: None })
}
