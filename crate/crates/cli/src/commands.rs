//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use shiftlab::cz::{check_decomposition, cz_decompose, default_j_range, default_w_samples, estimate_ay, DoubleFamily};
use shiftlab::eta::EtaParams;
use shiftlab::experiments::{fit_exponent, growth_sweep_with_jobs, run_verify_suite, write_csv, SweepSpec};
use shiftlab::families::{FamilyBuilder, FamilyId, FamilySpec, GridPolicy};
use shiftlab::norms::{evaluate, sharp_maximal, MixedNormSpec};
use shiftlab::operators::{
    dyadic_average, dyadic_maximal_by_tree, hl_maximal, lp_conv_shifted, peetre_shifted, shifted_dyadic_maximal,
    ShiftedOpParams,
};
use shiftlab::spectral::{modulate, translate};
use shiftlab::{FilterKind, Grid, GridFunction, LevelFamily};

use crate::files::{read_records, read_sidecar, sidecar_path, with_suffix, write_json, write_records, Sidecar};
use crate::manifest::{write_manifest, RunClock};
use crate::{
    ApplyArgs, AyArgs, Cli, Command, CzArgs, Finished, GenArgs, NormArgs, Operator, SweepArgs, VerifyArgs,
};

pub fn dispatch(cli: &Cli) -> Result<Finished> {
    let clock = RunClock::start();
    let parameters = serde_json::to_value(&cli.command)?;
    let (name, run) = match &cli.command {
        Command::Gen(a) => ("gen", gen(cli, a)?),
        Command::Apply(a) => ("apply", apply(a)?),
        Command::Norm(a) => ("norm", norm(cli, a)?),
        Command::Sweep(a) => ("sweep", sweep(cli, a)?),
        Command::Cz(a) => ("cz", cz(cli, a)?),
        Command::Ay(a) => ("ay", ay(cli, a)?),
        Command::Verify(a) => ("verify", verify(cli, a)?),
    };
    let manifest_path = run
        .outputs
        .first()
        .map(|p| with_suffix(p, ".manifest.json"))
        .unwrap_or_else(|| cli.out_dir.join(format!("{name}.manifest.json")));
    let mut extra = run.extra;
    if let Value::Object(map) = &mut extra {
        map.insert("seed".into(), json!(cli.seed));
    }
    let manifest = clock.manifest(name, parameters, run.inputs, run.outputs, extra);
    write_manifest(&manifest_path, &manifest)?;
    Ok(run.finished)
}

struct Run {
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    extra: Value,
    finished: Finished,
}

impl Run {
    fn ok(inputs: Vec<PathBuf>, outputs: Vec<PathBuf>, extra: Value) -> Run {
        Run { inputs, outputs, extra, finished: Finished::Ok }
    }
}

fn default_out(cli: &Cli, given: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    Ok(match given {
        Some(p) => p.clone(),
        None => {
            fs::create_dir_all(&cli.out_dir)?;
            cli.out_dir.join(name)
        }
    })
}

fn gen(cli: &Cli, a: &GenArgs) -> Result<Run> {
    let y = match (a.k, a.y) {
        (Some(k), None) => k.exp(),
        (None, Some(y)) => y,
        _ => bail!("give exactly one of --K and --y"),
    };
    let grid = match (a.length, a.samples) {
        (Some(length), Some(samples)) => GridPolicy::Fixed { length, samples },
        _ => GridPolicy::Auto { max_log_samples: a.max_log_samples },
    };
    let family: FamilyId = a.family.into();
    let spec = FamilySpec {
        family,
        y,
        eta: EtaParams { halfwidth: a.halfwidth, floor_radius: a.radius },
        spacing: a.spacing,
        grid,
    };
    let builder = FamilyBuilder::new(spec)?;
    let (records, k_min) = if family.is_level_family() {
        (builder.level_family()?.functions().to_vec(), *builder.levels().start())
    } else {
        (vec![builder.single()?], 0)
    };
    let out = default_out(cli, &a.out, "family.shl1")?;
    write_records(&out, &records)?;
    let side = sidecar_path(&out);
    write_json(&side, &Sidecar { spec: Some(spec), k_min, records: records.len() })?;
    let grid = *builder.grid();
    let extra = json!({
        "grid": grid,
        "records": records.len(),
        "eta_floor": builder.eta().map(|e| e.floor),
    });
    Ok(Run::ok(vec![], vec![out, side], extra))
}

fn record_levels(input: &Path, count: usize, fixed: Option<i32>) -> Result<(Option<Sidecar>, Vec<i32>)> {
    let side = read_sidecar(input)?;
    let levels = match (fixed, &side) {
        (Some(k), _) => vec![k; count],
        (None, Some(s)) => (0..count as i32).map(|i| s.k_min + i).collect(),
        (None, None) => vec![0; count],
    };
    Ok((side, levels))
}

fn apply(a: &ApplyArgs) -> Result<Run> {
    let records = read_records(&a.input)?;
    let (side, levels) = record_levels(&a.input, records.len(), a.k)?;
    let t = a.t.value();
    let out: Vec<GridFunction> = records
        .iter()
        .zip(&levels)
        .map(|(f, &k)| -> Result<GridFunction> {
            Ok(match a.op {
                Operator::Identity => f.clone(),
                Operator::Peetre => peetre_shifted(f, &ShiftedOpParams::new(a.sigma, t, k, a.y))?,
                Operator::DyadicAverage => dyadic_average(f, k, a.y)?,
                Operator::DyadicMaximal if a.y == 0.0 => dyadic_maximal_by_tree(f, t)?,
                Operator::DyadicMaximal => shifted_dyadic_maximal(f, a.y, t)?,
                Operator::WindowedMaximal => hl_maximal(f, t)?,
                Operator::SharpMaximal => sharp_maximal(f),
                Operator::LowPass => lp_conv_shifted(f, FilterKind::Phi, k, a.y)?,
                Operator::Annulus => lp_conv_shifted(f, FilterKind::Psi, k, a.y)?,
                Operator::AnnulusTilde => lp_conv_shifted(f, FilterKind::PsiTilde, k, a.y)?,
                Operator::Translate => translate(f, a.amount),
                Operator::Modulate => modulate(f, a.amount)?,
            })
        })
        .collect::<Result<_>>()?;
    write_records(&a.out, &out)?;
    let mut outputs = vec![a.out.clone()];
    if let Some(s) = side {
        let path = sidecar_path(&a.out);
        write_json(&path, &Sidecar { records: out.len(), ..s })?;
        outputs.push(path);
    }
    Ok(Run::ok(vec![a.input.clone()], outputs, json!({ "levels": levels })))
}

fn load_family(input: &Path, k_min: Option<i32>) -> Result<LevelFamily> {
    let records = read_records(input)?;
    let start = match k_min {
        Some(k) => k,
        None => read_sidecar(input)?.map_or(0, |s| s.k_min),
    };
    Ok(LevelFamily::new(start, records)?)
}

fn norm(cli: &Cli, a: &NormArgs) -> Result<Run> {
    let family = load_family(&a.input, a.k_min)?;
    let report = evaluate(&family, MixedNormSpec { p: a.p, q: a.q, variant: a.variant.into() })?;
    let out = default_out(cli, &a.out, "norm.json")?;
    write_json(&out, &report)?;
    println!("{}", report.value);
    Ok(Run::ok(vec![a.input.clone()], vec![out], json!({ "value": report.value })))
}

fn sweep(cli: &Cli, a: &SweepArgs) -> Result<Run> {
    let text = fs::read_to_string(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
    let spec: SweepSpec = serde_json::from_str(&text).with_context(|| format!("parsing {}", a.config.display()))?;
    let out = match (&a.out, &spec.output) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => p.clone(),
        (None, None) => default_out(cli, &None, "sweep.csv")?,
    };
    let records = growth_sweep_with_jobs(&spec, a.jobs)?;
    let mut csv = Vec::new();
    write_csv(&mut csv, &records)?;
    fs::write(&out, &csv).with_context(|| format!("writing {}", out.display()))?;
    let fit_path = with_suffix(&out, ".fit.json");
    let fit = match fit_exponent(&records) {
        Ok(fit) => json!({ "fit": fit }),
        Err(e) => json!({ "fit": null, "error": e.to_string() }),
    };
    write_json(&fit_path, &fit)?;
    print!("{}", String::from_utf8_lossy(&csv));
    println!("{fit}");
    let extra = json!({ "records": records, "fit": fit, "jobs": a.jobs });
    Ok(Run::ok(vec![a.config.clone()], vec![out, fit_path], extra))
}

fn cz(cli: &Cli, a: &CzArgs) -> Result<Run> {
    let records = read_records(&a.input)?;
    anyhow::ensure!(
        a.j_count > 0 && records.len() % a.j_count == 0,
        "{} records do not split into rows of {}",
        records.len(),
        a.j_count
    );
    let k_count = records.len() / a.j_count;
    let family = DoubleFamily::new(0, a.j_count, 0, k_count, records)?;
    let d = cz_decompose(&family, a.q, a.alpha, a.gamma)?;
    let check = check_decomposition(&d);
    let grid = *family.grid();
    let cubes: Vec<Value> = d
        .cubes
        .iter()
        .map(|c| json!({ "level": c.level, "offset": c.offset, "start": c.start(), "side": c.side(), "samples": c.sample_count(&grid) }))
        .collect();
    let report = json!({
        "alpha": d.alpha,
        "gamma": d.gamma,
        "q": d.q,
        "normalization": d.normalization,
        "degenerate": d.degenerate,
        "cubes": cubes,
        "check": check,
        "passes": check.passes(),
    });
    let out = default_out(cli, &a.out, "cz.json")?;
    write_json(&out, &report)?;
    let finished = if check.passes() {
        Finished::Ok
    } else {
        Finished::VerificationFailed(format!("decomposition invariants violated: {check:?}"))
    };
    Ok(Run { inputs: vec![a.input.clone()], outputs: vec![out], extra: json!({ "passes": check.passes() }), finished })
}

fn ay(cli: &Cli, a: &AyArgs) -> Result<Run> {
    let grid = Grid::new(a.length, a.samples)?;
    let w = default_w_samples(&grid, a.w_count);
    let mut csv = String::from("y,A_y,j_min,j_max,w_count\n");
    let mut estimates = Vec::new();
    for &k in &a.k_list {
        let y = k.exp();
        let est = estimate_ay(y, a.sigma, default_j_range(y, &w, a.margin), &w)?;
        if let Some(msg) = &est.warning {
            eprintln!("warning: {msg}");
        }
        csv.push_str(&format!("{:e},{:e},{},{},{}\n", est.y, est.value, est.j_min, est.j_max, est.w_count));
        estimates.push(est);
    }
    let out = default_out(cli, &a.out, "ay.csv")?;
    fs::write(&out, &csv)?;
    print!("{csv}");
    Ok(Run::ok(vec![], vec![out], json!({ "estimates": estimates })))
}

fn verify(cli: &Cli, a: &VerifyArgs) -> Result<Run> {
    let report = run_verify_suite(&a.suite, cli.seed)?;
    for c in &report.checks {
        println!(
            "{} {}/{} residual {:.3e} (tolerance {:.1e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.residual,
            c.tolerance
        );
    }
    let outputs = match &a.out {
        Some(p) => {
            write_json(p, &report)?;
            vec![p.clone()]
        }
        None => vec![],
    };
    let finished = if report.passed() {
        Finished::Ok
    } else {
        let names: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
        Finished::VerificationFailed(names.join(", "))
    };
    Ok(Run { inputs: vec![], outputs, extra: json!({ "passed": report.passed() }), finished })
}
