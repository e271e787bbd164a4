use std::fs;
use std::path::Path;

use orbitframe::fibers::{
    chi_e_detect, complement, compute_range_function, extract_inner_factor, fiber_distance,
    helson_projection_check, range_function_of_subspace, resynthesize, RangeFunction,
};
use orbitframe::genlab::{class_census, counterexample_multigen, dichotomy, membership_v, scaled_pair_census};
use orbitframe::io::{dims_csv, field_from_json, matrix_csv, matrix_rows, spectrum_csv, tuple_from_json, vector_from_pairs, Pair};
use orbitframe::model::{build_basic_tuple, riesz_classify, similarity, verify_intertwining, verify_parseval_basic};
use orbitframe::random::{random_field, seeded};
use orbitframe::tuples::{frame_bounds, validate_tuple, TupleDiagnostics};
use orbitframe::{presets, CoefField, GeneratorClassReport, Iteration, Mode, Tolerances, Tuple, Universe, C64};
use serde::Serialize;
use serde_json::json;

use crate::args::{Cli, Command, Experiment, Global, IterationArg, ModeArg, PresetName};
use crate::error::CliError;
use crate::output::{Emitter, Residuals};

type Res<T> = Result<T, CliError>;

const DEFAULT_SEED: u64 = 0;

pub fn tolerances(g: &Global) -> Res<Tolerances> {
    let mut tol = Tolerances::default();
    for (name, value) in g.tol.overrides() {
        if let Some(v) = value {
            tol.set(name, v)
                .map_err(|_| CliError::config(format!("--tol-{name} must be positive and finite, got {v}")))?;
        }
    }
    Ok(tol)
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse_error(path: &Path, e: orbitframe::Error) -> CliError {
    CliError::config(format!("{}: {e}", path.display()))
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Unilateral => Mode::Unilateral,
        ModeArg::Bilateral => Mode::Bilateral,
    }
}

/// `(first, second, n_gen)` from `--universe`.
fn universe_arg(g: &Global) -> Res<Option<(usize, usize, Option<usize>)>> {
    match g.universe.as_slice() {
        [] => Ok(None),
        [a, b] => Ok(Some((*a, *b, None))),
        [a, b, n] => Ok(Some((*a, *b, Some(*n)))),
        other => Err(CliError::config(format!(
            "--universe takes 2 or 3 comma-separated values, got {}",
            other.len()
        ))),
    }
}

/// Applies `--mode`, `--iteration`, `--K`, `--J` and `--universe` to a tuple read from disk.
fn apply_overrides(t: Tuple, g: &Global) -> Res<Tuple> {
    if let Some(m) = g.mode {
        if mode_of(m) != t.variant() {
            return Err(CliError::config(format!(
                "--mode {} does not match the tuple variant {}",
                mode_of(m),
                t.variant()
            )));
        }
    }
    let universe = universe_arg(g)?;
    if let Some((_, _, Some(n))) = universe {
        if n != t.n_gen() {
            return Err(CliError::config(format!(
                "--universe gives n = {n} but the tuple has {} generators",
                t.n_gen()
            )));
        }
    }
    let iteration = match (g.iteration, universe) {
        (Some(IterationArg::Truncated), _) => {
            let (Some(k), Some(j)) = (g.k, g.j) else {
                return Err(CliError::config("--iteration truncated needs --K and --J"));
            };
            Some(Iteration::Truncated { k, j })
        }
        (Some(IterationArg::Cyclic), None) => {
            return Err(CliError::config("--iteration cyclic needs --universe N,M"));
        }
        (_, Some((n, m, _))) => Some(Iteration::Cyclic { n, m }),
        (None, None) => {
            if g.k.is_some() || g.j.is_some() {
                return Err(CliError::config("--K/--J need --iteration truncated"));
            }
            None
        }
    };
    match iteration {
        Some(it) => Ok(t.with_iteration(it)?),
        None => Ok(t),
    }
}

struct Loaded {
    tuple: Tuple,
    universe: Universe,
    diagnostics: TupleDiagnostics,
}

fn load_tuple(path: &Path, g: &Global, tol: &Tolerances, em: &mut Emitter) -> Res<Loaded> {
    em.input(path);
    let t = tuple_from_json(&read(path)?).map_err(|e| parse_error(path, e))?;
    let tuple = apply_overrides(t, g)?;
    let diagnostics = validate_tuple(&tuple, tol)?;
    let universe = tuple.universe()?;
    Ok(Loaded {
        tuple,
        universe,
        diagnostics,
    })
}

pub fn run(cli: &Cli) -> Res<String> {
    let g = &cli.global;
    let tol = tolerances(g)?;
    match &cli.command {
        Command::Analyze { tuple } => analyze(tuple, g, &tol),
        Command::Model { tuple } => model(tuple, g, &tol),
        Command::Similar { a, b } => similar(a, b, g, &tol),
        Command::Fibers { tuple, field } => fibers(tuple.as_deref(), field, g, &tol),
        Command::Inner { tuple } => inner(tuple, g, &tol),
        Command::ChiE { tuple } => chi_e(tuple, g, &tol),
        Command::Genlab { experiment } => genlab(experiment, g, &tol),
        Command::Preset {
            name,
            profile,
            mask,
            powers,
            cond,
            tuple,
        } => preset(
            *name,
            PresetParams {
                profile: profile.as_deref(),
                mask: mask.as_deref(),
                powers: *powers,
                cond: *cond,
                tuple: tuple.as_deref(),
            },
            g,
            &tol,
        ),
    }
}

fn emitter(g: &Global, command: &str, tol: &Tolerances) -> Res<Emitter> {
    let mut em = Emitter::new(&g.out, g.format, command, *tol)?;
    em.set_seed(g.seed);
    Ok(em)
}

fn analyze(path: &Path, g: &Global, tol: &Tolerances) -> Res<String> {
    let mut em = emitter(g, "analyze", tol)?;
    let t = load_tuple(path, g, tol, &mut em)?;
    let report = frame_bounds(&t.tuple, &t.universe, tol)?;
    let class = riesz_classify(&t.tuple, &t.universe, tol)?;
    let mut res = Residuals::default();
    res.tuple("tuple", &t.diagnostics)
        .add("frame.eigen_cross_check", report.eigen_cross_check);
    let result = json!({
        "frame_report": report,
        "classification": class,
        "diagnostics": t.diagnostics,
    });
    em.report("analyze", Some(t.universe), &res, &result)?;
    em.write_file("spectrum.csv", &spectrum_csv(&report.singular_spectrum))?;
    em.finish()?;
    Ok(format!(
        "A = {:.6e}, B = {:.6e}, frame = {}, parseval = {}, riesz = {}",
        report.lower_bound, report.upper_bound, report.is_frame, report.is_parseval, report.is_riesz
    ))
}

fn model(path: &Path, g: &Global, tol: &Tolerances) -> Res<String> {
    let mut em = emitter(g, "model", tol)?;
    let t = load_tuple(path, g, tol, &mut em)?;
    let b = build_basic_tuple(&t.tuple, &t.universe, tol)?;
    let inter = verify_intertwining(&t.tuple, &b)?;
    let parseval = verify_parseval_basic(&b, tol)?;
    let class = riesz_classify(&t.tuple, &t.universe, tol)?;
    let mut res = Residuals::default();
    res.tuple("tuple", &t.diagnostics)
        .add("model.orthonormality", b.invariants.orthonormality)
        .add("model.reducing", b.invariants.reducing.max())
        .add("model.commutation", b.invariants.commutation)
        .add("model.c_sigma_min", b.invariants.c_sigma_min)
        .add("intertwining.relative", inter.relative)
        .add("parseval.lower_minus_one", (parseval.report.lower_bound - 1.0).abs())
        .add("parseval.upper_minus_one", (parseval.report.upper_bound - 1.0).abs())
        .add("parseval.projection_identity", parseval.projection_identity);
    let result = json!({
        "rank": b.rank(),
        "kernel_dim": b.kernel_dim(),
        "classification": class,
        "basic_tuple": b,
        "intertwining": inter,
        "parseval": parseval,
        "diagnostics": t.diagnostics,
    });
    em.report("model", Some(t.universe), &res, &result)?;
    em.write_file("spectrum.csv", &spectrum_csv(&b.singular_spectrum))?;
    em.finish()?;
    let ok = b.invariants.passed && inter.passed;
    if !ok {
        return Err(CliError::Failed {
            invariant: if inter.passed { "basic tuple invariants" } else { "intertwining" },
            detail: format!(
                "intertwining residual {:e} relative to ‖C‖, reducing defect {:e}",
                inter.relative,
                b.invariants.reducing.max()
            ),
        });
    }
    Ok(format!(
        "rank = {}, kernel dim = {}, classification = {}",
        b.rank(),
        b.kernel_dim(),
        serde_json::to_value(class)
            .map_err(orbitframe::Error::from)?
            .as_str()
            .unwrap_or_default()
    ))
}

fn similar(a: &Path, b: &Path, g: &Global, tol: &Tolerances) -> Res<String> {
    let mut em = emitter(g, "similar", tol)?;
    let ta = load_tuple(a, g, tol, &mut em)?;
    let tb = load_tuple(b, g, tol, &mut em)?;
    let v = similarity(&ta.tuple, &tb.tuple, &ta.universe, tol)?;
    let mut res = Residuals::default();
    res.tuple("a", &ta.diagnostics)
        .tuple("b", &tb.diagnostics)
        .add("similarity.kernel_distance", v.kernel_distance)
        .add_opt("similarity.certificate_max", v.max_certificate_residual())
        .add_opt("similarity.unitarity_defect", v.unitarity_defect)
        .add_opt("similarity.compression_residual", v.compression_residual);
    em.report("similar", Some(ta.universe), &res, &v)?;
    em.finish()?;
    Ok(format!(
        "similar = {}, kernel distance = {:.3e}",
        v.similar, v.kernel_distance
    ))
}

fn rf_summary(rf: &RangeFunction) -> serde_json::Value {
    json!({
        "dims": rf.dims,
        "sigma_support": rf.sigma_support,
        "total_dim": rf.total_dim(),
        "cutoff": rf.cutoff,
        "min_gap": rf.min_gap,
    })
}

fn fibers(tuple: Option<&Path>, fields: &[std::path::PathBuf], g: &Global, tol: &Tolerances) -> Res<String> {
    let mut em = emitter(g, "fibers", tol)?;
    let mut res = Residuals::default();
    let (universe, rf) = if let Some(path) = tuple {
        let t = load_tuple(path, g, tol, &mut em)?;
        res.tuple("tuple", &t.diagnostics);
        let b = build_basic_tuple(&t.tuple, &t.universe, tol)?;
        res.add("model.reducing", b.invariants.reducing.max());
        let rf = range_function_of_subspace(&b.n_basis, &t.universe, tol.rank_tol)?;
        (t.universe, rf)
    } else {
        let mut gens: Vec<CoefField> = Vec::with_capacity(fields.len());
        for path in fields {
            em.input(path);
            gens.push(field_from_json(&read(path)?).map_err(|e| parse_error(path, e))?);
        }
        let u = *gens[0].universe();
        (u, compute_range_function(&gens, &u, tol.rank_tol)?)
    };
    let seed = g.seed.unwrap_or(DEFAULT_SEED);
    em.set_seed(Some(seed));
    let probe = random_field(&mut seeded(seed), &universe);
    let helson = helson_projection_check(&rf, &probe)?;
    let perp = complement(&rf)?;
    res.add("helson.random_field", helson);
    let result = json!({
        "range_function": rf,
        "complement": rf_summary(&perp),
    });
    em.report("fibers", Some(universe), &res, &result)?;
    em.write_file("dims.csv", &dims_csv(&rf.dims))?;
    em.write_file("complement_dims.csv", &dims_csv(&perp.dims))?;
    em.finish()?;
    Ok(format!(
        "total fiber dim = {}, support size = {}, Helson residual = {helson:.3e}",
        rf.total_dim(),
        rf.sigma_support.len()
    ))
}

fn inner(path: &Path, g: &Global, tol: &Tolerances) -> Res<String> {
    let mut em = emitter(g, "inner", tol)?;
    let t = load_tuple(path, g, tol, &mut em)?;
    t.universe.require_mode(Mode::Unilateral, "inner factor")?;
    let b = build_basic_tuple(&t.tuple, &t.universe, tol)?;
    let n_rf = range_function_of_subspace(&b.n_basis, &t.universe, tol.rank_tol)?;
    let perp = complement(&n_rf)?;
    let factor = extract_inner_factor(&perp)?;
    let resynth = resynthesize(&factor)?;
    let distance = fiber_distance(&resynth, &perp)?;
    let mut res = Residuals::default();
    res.tuple("tuple", &t.diagnostics)
        .add("model.reducing", b.invariants.reducing.max())
        .add("inner.resynthesis_distance", distance);
    let result = json!({
        "inner_factor": factor,
        "complement": rf_summary(&perp),
        "resynthesis_distance": distance,
    });
    em.report("inner", Some(t.universe), &res, &result)?;
    let mut degrees = String::from("point,degree\n");
    for (p, d) in factor.degrees.iter().enumerate() {
        let d = d.map(|x| x.to_string()).unwrap_or_default();
        degrees.push_str(&format!("{p},{d}\n"));
    }
    em.write_file("degrees.csv", &degrees)?;
    em.write_file("dims.csv", &dims_csv(&perp.dims))?;
    em.finish()?;
    Ok(format!(
        "complement support size = {}, re-synthesis distance = {distance:.3e}",
        factor.sigma_support.len()
    ))
}

fn chi_e(path: &Path, g: &Global, tol: &Tolerances) -> Res<String> {
    let mut em = emitter(g, "chi-e", tol)?;
    let t = load_tuple(path, g, tol, &mut em)?;
    let b = build_basic_tuple(&t.tuple, &t.universe, tol)?;
    let chi = chi_e_detect(&b.n_basis, &t.universe, tol.rank_tol, tol.red_tol)?;
    let mut res = Residuals::default();
    res.tuple("tuple", &t.diagnostics)
        .add("chi_e.reducing", chi.reducing.max())
        .add("chi_e.forward", chi.forward_residual)
        .add("chi_e.reverse", chi.reverse_residual);
    em.report("chi_e", Some(t.universe), &res, &chi)?;
    em.write_file("mask.csv", &dims_csv(&chi.dims))?;
    em.finish()?;
    if !chi.passed {
        return Err(CliError::Failed {
            invariant: "χ_E double inclusion",
            detail: format!(
                "forward residual {:e}, reverse residual {:e}",
                chi.forward_residual, chi.reverse_residual
            ),
        });
    }
    Ok(format!("|E| = {} of {} grid points", chi.support().len(), chi.mask.len()))
}

fn census_side_files(em: &mut Emitter, r: &GeneratorClassReport) -> Res<()> {
    em.write_file("distances.csv", &matrix_csv(&r.distances))
}

fn census_residuals(r: &GeneratorClassReport) -> Residuals {
    let mut res = Residuals::default();
    let min_off = r
        .distances
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().filter(move |(j, _)| *j != i).map(|(_, d)| *d))
        .fold(f64::INFINITY, f64::min);
    if min_off.is_finite() {
        res.add("census.min_offdiagonal_distance", min_off);
    }
    let cert = r
        .verdicts
        .iter()
        .filter_map(|v| v.max_certificate_residual())
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))));
    res.add_opt("census.max_certificate", cert);
    res
}

fn parse_scalars(text: &str) -> Res<Vec<C64>> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let (re, im) = tok.split_once(':').unwrap_or((tok, "0"));
            match (re.parse::<f64>(), im.parse::<f64>()) {
                (Ok(re), Ok(im)) => Ok(C64::new(re, im)),
                _ => Err(CliError::config(format!("invalid scalar '{tok}', expected re or re:im"))),
            }
        })
        .collect()
}

fn genlab(exp: &Experiment, g: &Global, tol: &Tolerances) -> Res<String> {
    match exp {
        Experiment::Membership { tuple, candidate } => {
            let mut em = emitter(g, "genlab membership", tol)?;
            let base = load_tuple(tuple, g, tol, &mut em)?;
            em.input(candidate);
            let pairs: Vec<Pair> = serde_json::from_str(&read(candidate)?)
                .map_err(|e| CliError::config(format!("{}: {e}", candidate.display())))?;
            let v = vector_from_pairs(&pairs);
            if v.len() != base.tuple.dim() {
                return Err(CliError::config(format!(
                    "candidate has {} entries, tuple dim is {}",
                    v.len(),
                    base.tuple.dim()
                )));
            }
            let verdict = membership_v(&base.tuple, &v, tol)?;
            let mut res = Residuals::default();
            res.tuple("base", &base.diagnostics)
                .add("membership.lower_bound", verdict.frame_report.lower_bound)
                .add_opt(
                    "membership.kernel_distance",
                    verdict.similarity.as_ref().map(|s| s.kernel_distance),
                )
                .add_opt(
                    "membership.certificate_max",
                    verdict.similarity.as_ref().and_then(|s| s.max_certificate_residual()),
                );
            em.report("membership", Some(base.universe), &res, &verdict)?;
            em.finish()?;
            if !verdict.consistent {
                return Err(CliError::Failed {
                    invariant: "frame/similarity agreement",
                    detail: format!("in_V = {}, similar = {}", verdict.in_v, verdict.similar),
                });
            }
            Ok(format!("in_V = {}, similar = {}", verdict.in_v, verdict.similar))
        }
        Experiment::Counterexample { tuple } => {
            let mut em = emitter(g, "genlab counterexample", tol)?;
            let base = load_tuple(tuple, g, tol, &mut em)?;
            let r = counterexample_multigen(&base.tuple, tol)?;
            let mut res = census_residuals(&r);
            res.tuple("base", &base.diagnostics);
            em.report("counterexample", Some(base.universe), &res, &r)?;
            census_side_files(&mut em, &r)?;
            em.finish()?;
            Ok(format!(
                "kernel distance = {:.4}, classes ≥ {}",
                r.distances[0][1], r.class_count_lower_bound
            ))
        }
        Experiment::Census { tuples } => {
            let mut em = emitter(g, "genlab census", tol)?;
            let mut loaded = Vec::with_capacity(tuples.len());
            let mut res = Residuals::default();
            for (k, path) in tuples.iter().enumerate() {
                let t = load_tuple(path, g, tol, &mut em)?;
                res.tuple(&format!("candidate{k}"), &t.diagnostics);
                loaded.push(t);
            }
            let list: Vec<Tuple> = loaded.iter().map(|t| t.tuple.clone()).collect();
            let r = class_census(&list, tol, g.seed)?;
            res.merge(census_residuals(&r));
            em.report("census", Some(loaded[0].universe), &res, &r)?;
            census_side_files(&mut em, &r)?;
            em.finish()?;
            Ok(format!("{} candidates, classes ≥ {}", list.len(), r.class_count_lower_bound))
        }
        Experiment::Scaled { tuple, scalars } => {
            let mut em = emitter(g, "genlab scaled", tol)?;
            let base = load_tuple(tuple, g, tol, &mut em)?;
            let scalars = parse_scalars(scalars)?;
            let r = scaled_pair_census(&base.tuple, &scalars, tol)?;
            let mut res = census_residuals(&r);
            res.tuple("base", &base.diagnostics);
            em.report("scaled", Some(base.universe), &res, &r)?;
            census_side_files(&mut em, &r)?;
            em.finish()?;
            Ok(format!("{} candidates, classes ≥ {}", scalars.len(), r.class_count_lower_bound))
        }
        Experiment::Dichotomy { tuple, samples } => {
            let mut em = emitter(g, "genlab dichotomy", tol)?;
            let base = load_tuple(tuple, g, tol, &mut em)?;
            let seed = g.seed.unwrap_or(DEFAULT_SEED);
            em.set_seed(Some(seed));
            let r = dichotomy(&base.tuple, *samples, &mut seeded(seed), seed, tol)?;
            let mut res = Residuals::default();
            res.tuple("base", &base.diagnostics);
            let cert = r
                .commuting
                .iter()
                .filter_map(|s| s.certificate)
                .fold(0.0, f64::max);
            let map_err = r.commuting.iter().filter_map(|s| s.map_error).fold(0.0, f64::max);
            res.add("dichotomy.max_certificate", cert)
                .add("dichotomy.max_map_error", map_err)
                .add("dichotomy.disagreements", r.disagreements as f64);
            em.report("dichotomy", Some(base.universe), &res, &r)?;
            em.finish()?;
            if r.disagreements > 0 || !r.all_commuting_in_v {
                return Err(CliError::Failed {
                    invariant: "frame/similarity agreement",
                    detail: format!(
                        "{} disagreements, all commuting draws in V: {}",
                        r.disagreements, r.all_commuting_in_v
                    ),
                });
            }
            Ok(format!(
                "commutant dim = {}, {} commuting draws all in V, 0 disagreements",
                r.commutant_dimension,
                r.commuting.len()
            ))
        }
    }
}

pub struct PresetParams<'a> {
    pub profile: Option<&'a str>,
    pub mask: Option<&'a str>,
    pub powers: usize,
    pub cond: f64,
    pub tuple: Option<&'a Path>,
}

fn parse_profile(text: &str, points: usize, m_z: usize) -> Res<Vec<Vec<usize>>> {
    let rows: Vec<Vec<usize>> = text
        .split(',')
        .map(|cell| {
            cell.split(':')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| CliError::config(format!("invalid profile entry '{x}'")))
                })
                .collect()
        })
        .collect::<Res<_>>()?;
    if rows.len() != points {
        return Err(CliError::config(format!(
            "profile has {} entries for {points} grid points",
            rows.len()
        )));
    }
    if let Some(bad) = rows.iter().flatten().find(|&&m| m > m_z) {
        return Err(CliError::config(format!("profile entry {bad} exceeds M = {m_z}")));
    }
    Ok(rows)
}

fn parse_mask(text: &str, points: usize) -> Res<Vec<bool>> {
    let mask: Vec<bool> = text
        .chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(CliError::config(format!("invalid mask digit '{other}'"))),
        })
        .collect::<Res<_>>()?;
    if mask.len() != points {
        return Err(CliError::config(format!(
            "mask has {} entries for a grid of {points} points",
            mask.len()
        )));
    }
    Ok(mask)
}

fn required_universe(g: &Global, n_default: usize) -> Res<(usize, usize, usize)> {
    match universe_arg(g)? {
        Some((a, b, n)) => Ok((a, b, n.unwrap_or(n_default))),
        None => Err(CliError::config("this preset needs --universe")),
    }
}

#[derive(Serialize)]
struct PresetEntry {
    file: String,
    dim: usize,
    n_gen: usize,
    diagnostics: TupleDiagnostics,
}

fn preset(name: PresetName, p: PresetParams<'_>, g: &Global, tol: &Tolerances) -> Res<String> {
    let mut em = emitter(g, "preset", tol)?;
    let mut extra: Option<serde_json::Value> = None;
    let tuples: Vec<(String, Tuple)> = match name {
        PresetName::FullRiesz => {
            let (a, b, n) = required_universe(g, 1)?;
            let t = match g.mode.map(mode_of).unwrap_or(Mode::Unilateral) {
                Mode::Unilateral => presets::full_riesz(a, b, n)?,
                Mode::Bilateral => presets::full_riesz_bilateral(a, b, n)?,
            };
            vec![("full_riesz.json".into(), t)]
        }
        PresetName::MonomialFibers => {
            let (n, m, n_gen) = required_universe(g, 1)?;
            let text = p.profile.ok_or_else(|| CliError::config("monomial_fibers needs --profile"))?;
            let profile = parse_profile(text, n, m)?;
            vec![(
                "monomial_fibers.json".into(),
                presets::monomial_fibers_tuple(n, m, n_gen, &profile)?,
            )]
        }
        PresetName::BilateralMask => {
            let (n1, n2, n_gen) = required_universe(g, 1)?;
            if n_gen != 1 {
                return Err(CliError::config("bilateral_mask needs n = 1"));
            }
            let text = p.mask.ok_or_else(|| CliError::config("bilateral_mask needs --mask"))?;
            let mask = parse_mask(text, n1 * n2)?;
            vec![(
                "bilateral_mask.json".into(),
                presets::bilateral_mask_tuple(n1, n2, &mask)?,
            )]
        }
        PresetName::GeometricDiag => {
            vec![("geometric_diag.json".into(), presets::geometric_diag_with(p.powers)?)]
        }
        PresetName::SumDifferencePair => {
            let (n, m, n_gen) = required_universe(g, 2)?;
            if n_gen != 2 {
                return Err(CliError::config("remark49_pair is built on n = 2 generators"));
            }
            let (a, b) = presets::sum_difference_pair(n, m)?;
            vec![("remark49_a.json".into(), a), ("remark49_b.json".into(), b)]
        }
        PresetName::Pushforward => {
            let path = p.tuple.ok_or_else(|| CliError::config("pushforward needs --tuple"))?;
            if !(p.cond.is_finite() && p.cond >= 1.0) {
                return Err(CliError::config("--cond must be at least 1"));
            }
            let base = load_tuple(path, g, tol, &mut em)?;
            let seed = g.seed.unwrap_or(DEFAULT_SEED);
            em.set_seed(Some(seed));
            let (t, b) = presets::random_pushforward(&base.tuple, &mut seeded(seed), p.cond)?;
            extra = Some(json!({ "cond": p.cond, "map_file": "pushforward_map.json" }));
            em.write_json("pushforward_map.json", &matrix_rows(&b))?;
            vec![("pushforward.json".into(), t)]
        }
    };
    let mut entries = Vec::with_capacity(tuples.len());
    let mut res = Residuals::default();
    for (file, t) in &tuples {
        let diagnostics = validate_tuple(t, tol)?;
        res.tuple(file.trim_end_matches(".json"), &diagnostics);
        em.write_json(file, t)?;
        entries.push(PresetEntry {
            file: file.clone(),
            dim: t.dim(),
            n_gen: t.n_gen(),
            diagnostics,
        });
    }
    let universe = tuples[0].1.universe()?;
    let result = json!({
        "preset": name.as_str(),
        "tuples": entries,
        "parameters": extra,
    });
    em.report("preset", Some(universe), &res, &result)?;
    em.finish()?;
    let files: Vec<&str> = tuples.iter().map(|(f, _)| f.as_str()).collect();
    Ok(format!("wrote {}", files.join(", ")))
}
