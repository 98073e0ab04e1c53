use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use ridgelab::data::{axis_points, Dataset, GridSpec, ParamMeasure, Unit};
use ridgelab::experiments::{
    classic_spectrum, concentration_score, gen_dataset, spectrum_correlation,
    spectrum_from_operator, DatasetKind, Normalization, Spectrum,
};
use ridgelab::io;
use ridgelab::operators::{
    apply_s, build_gram, minimize, solve_rho_star, tikhonov_solve, DEFAULT_GRAM_CAP,
};
use ridgelab::special::Activation;
use ridgelab::training::{train_ensemble, Init, Optimizer, TrainConfig, DEFAULT_FILTER};
use ridgelab::Error;

use crate::config::Config;
use crate::svg;
use crate::{CliError, CompareArgs, GenArgs, OptimizeArgs, SpectrumArgs, TrainArgs};

type CliResult<T = ()> = Result<T, CliError>;

const RHO_STAR_TOL: f64 = 1e-8;

fn out_dir(flag: Option<PathBuf>, cfg: &Config) -> CliResult<PathBuf> {
    let dir = cfg.resolve(flag, "out_dir", PathBuf::from("."))?;
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Prefixes IO failures with the offending path.
fn with_path<T>(path: &Path, res: ridgelab::Result<T>) -> CliResult<T> {
    res.map_err(|e| {
        if e.is_io() {
            CliError::Io(format!("{}: {e}", path.display()))
        } else {
            CliError::Core(e)
        }
    })
}

fn read_dataset(path: &Path) -> CliResult<Dataset> {
    with_path(path, io::read_dataset_csv(path))
}

fn activation(flag: Option<String>, cfg: &Config) -> CliResult<Activation> {
    let name: String = cfg.resolve(flag, "act", "tanh".to_string())?;
    name.parse()
        .map_err(|e: Error| CliError::Usage(e.to_string()))
}

fn dataset_kind(name: &str) -> CliResult<DatasetKind> {
    name.parse()
        .map_err(|e: Error| CliError::Usage(e.to_string()))
}

fn y_range(ds: &Dataset) -> (f64, f64) {
    ds.targets()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
            (lo.min(y), hi.max(y))
        })
}

pub fn gen(args: GenArgs, cfg: &Config) -> CliResult {
    let name: String = cfg.resolve(args.dataset, "dataset", "sin".to_string())?;
    let kind = dataset_kind(&name)?;
    let s = cfg.resolve(args.s, "s", kind.default_samples())?;
    let noise = cfg.resolve(args.noise, "noise", 0.0)?;
    let mu = cfg.resolve(args.mu, "mu", 0.0)?;
    let seed = cfg.resolve(args.seed, "seed", 0u64)?;
    let out = cfg.resolve(
        args.out,
        "out",
        PathBuf::from(format!("{}.csv", kind.name())),
    )?;
    let ds = gen_dataset(kind, s, noise, mu, seed)?;
    io::write_dataset_csv(&ds, &out)?;
    let (lo, hi) = y_range(&ds);
    println!(
        "{}: s = {}, y in [{lo:.6}, {hi:.6}] -> {}",
        kind.name(),
        ds.len(),
        out.display()
    );
    Ok(())
}

fn optimizer(args: &TrainArgs, cfg: &Config) -> CliResult<Optimizer> {
    let name: String = cfg.resolve(args.opt.clone(), "opt", "adam".to_string())?;
    match name.to_ascii_lowercase().as_str() {
        "adam" => {
            let Optimizer::Adam { lr, .. } = Optimizer::default() else {
                unreachable!()
            };
            Ok(Optimizer::adam(cfg.resolve(args.lr, "lr", lr)?))
        }
        "lbfgs" | "l-bfgs" => {
            let Optimizer::Lbfgs {
                memory,
                line_search_max_steps,
            } = Optimizer::lbfgs()
            else {
                unreachable!()
            };
            Ok(Optimizer::Lbfgs {
                memory: cfg.resolve(args.lbfgs_memory, "lbfgs_memory", memory)?,
                line_search_max_steps,
            })
        }
        other => Err(CliError::Usage(format!(
            "unknown optimizer '{other}' (expected adam or lbfgs)"
        ))),
    }
}

pub fn train(args: TrainArgs, cfg: &Config) -> CliResult {
    let ds = read_dataset(&args.data)?;
    let act = activation(args.act.clone(), cfg)?;
    let defaults = TrainConfig::default();
    let default_p = match cfg.resolve_opt(args.dataset.clone(), "dataset")? {
        Some(name) => dataset_kind(&name)?.default_hidden_units(),
        None => defaults.p,
    };
    let Init::UniformSymmetric { scale } = defaults.init else {
        unreachable!()
    };
    let tc = TrainConfig {
        p: cfg.resolve(args.p, "p", default_p)?,
        optimizer: optimizer(&args, cfg)?,
        epochs: cfg.resolve(args.epochs, "epochs", defaults.epochs)?,
        batch_size: cfg.resolve_opt(args.batch, "batch")?,
        seed: cfg.resolve(args.seed, "seed", defaults.seed)?,
        init: Init::UniformSymmetric {
            scale: cfg.resolve(args.init_scale, "init_scale", scale)?,
        },
        c_init_std: cfg.resolve(args.c_std, "c_std", defaults.c_init_std)?,
    };
    let n = cfg.resolve(args.n, "n", 100usize)?;
    let low = cfg.resolve(args.filter_low, "filter_low", DEFAULT_FILTER.0)?;
    let high = cfg.resolve(args.filter_high, "filter_high", DEFAULT_FILTER.1)?;
    let dir = out_dir(args.out_dir, cfg)?;

    let result = train_ensemble(&ds, act, &tc, n)?;
    for f in &result.failures {
        eprintln!("run {} (seed {}) failed: {}", f.run, f.seed, f.message);
    }
    let units = result.units();
    let kept = result.filtered_units(low, high)?;
    io::write_units_csv(&units, ds.dim(), &dir.join("ensemble.csv"))?;
    io::write_units_csv(&kept, ds.dim(), &dir.join("filtered.csv"))?;
    if args.traces {
        io::write_traces_csv(&result.runs, &dir.join("traces.csv"))?;
    }
    let mut losses = result.final_losses();
    losses.sort_by(f64::total_cmp);
    let median = losses[losses.len() / 2];
    println!(
        "{} of {n} runs finished, median final loss {median:.3e}; {} units, {} after filtering -> {}",
        result.runs.len(),
        units.len(),
        kept.len(),
        dir.display()
    );
    Ok(())
}

fn grid_axis(lo: f64, hi: f64, steps: usize) -> CliResult<Vec<f64>> {
    GridSpec::square(lo, hi, steps).validate()?;
    Ok(axis_points((lo, hi), steps))
}

pub fn spectrum(args: SpectrumArgs, cfg: &Config) -> CliResult {
    let ds = read_dataset(&args.data)?;
    let act = activation(args.act, cfg)?;
    let rf = act.ridgelet().ok_or_else(|| {
        CliError::Usage(format!(
            "activation '{act}' has no paired ridgelet function; supported pairs are tanh and relu"
        ))
    })?;
    let lo = cfg.resolve(args.grid_lo, "grid_lo", -25.0)?;
    let hi = cfg.resolve(args.grid_hi, "grid_hi", 25.0)?;
    let steps = cfg.resolve(args.steps, "steps", 128usize)?;
    let axis = grid_axis(lo, hi, steps)?;
    let norm = if args.raw {
        Normalization::RawSum
    } else {
        Normalization::MaxAbsOne
    };
    let dir = out_dir(args.out_dir, cfg)?;

    let spec = classic_spectrum(&ds, rf, &axis, &axis, norm)?;
    io::write_spectrum_csv(&spec, &dir.join("spectrum.csv"))?;
    io::write_spectrum_binary(&spec, &dir.join("spectrum.bin"))?;
    write_text(
        &dir.join("spectrum.svg"),
        &svg::heatmap(&spec, &format!("ridgelet spectrum ({act})")),
    )?;
    println!(
        "{steps}x{steps} spectrum on [{lo}, {hi}], max |value| {:.6e} -> {}",
        spec.max_abs(),
        dir.display()
    );
    Ok(())
}

fn relative_error(fit: &[f64], y: &[f64]) -> f64 {
    let num: f64 = fit.iter().zip(y).map(|(f, y)| (f - y).powi(2)).sum();
    let den: f64 = y.iter().map(|y| y * y).sum();
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        (num / y.len() as f64).sqrt()
    }
}

pub fn optimize(args: OptimizeArgs, cfg: &Config) -> CliResult {
    let ds = read_dataset(&args.data)?;
    let act = activation(args.act, cfg)?;
    let lo = cfg.resolve(args.grid_lo, "grid_lo", -30.0)?;
    let hi = cfg.resolve(args.grid_hi, "grid_hi", 30.0)?;
    let steps = cfg.resolve(args.steps, "steps", 64usize)?;
    let beta = cfg.resolve(args.beta, "beta", 1e-3)?;
    let eval_points = cfg.resolve(args.eval_points, "eval_points", 401usize)?;
    let dir = out_dir(args.out_dir, cfg)?;
    let meas = ParamMeasure::grid(ds.dim(), GridSpec::square(lo, hi, steps))?;

    let gamma = if args.rho_star || args.dump_gram {
        let gram = build_gram(&meas, act, &ds)?;
        if args.dump_gram {
            let csv = fs::File::create(dir.join("gram.csv"))?;
            gram.write_csv(std::io::BufWriter::new(csv))?;
            let bin = fs::File::create(dir.join("gram.bin"))?;
            gram.write_binary(std::io::BufWriter::new(bin))?;
        }
        let gamma = tikhonov_solve(&gram, &meas, act, &ds, beta)?;
        if args.rho_star {
            let via_rho = solve_rho_star(&gram, &meas, act, &ds, beta)?.transform(ds.targets())?;
            let gap = via_rho
                .values()
                .iter()
                .zip(gamma.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if !(gap <= RHO_STAR_TOL) {
                return Err(CliError::Numeric(format!("R_rho*[y] differs from the direct solve by {gap:.3e} (tolerance {RHO_STAR_TOL:.0e})")));
            }
            println!("rho* agreement: max difference {gap:.3e}");
        }
        gamma
    } else {
        minimize(&meas, act, &ds, beta, DEFAULT_GRAM_CAP)?
    };

    let at_data = apply_s(&meas, act, &gamma, ds.inputs())?;
    let err = relative_error(&at_data, ds.targets());
    io::write_coefficient_json(&meas, &gamma, &dir.join("coefficients.json"))?;

    if ds.dim() == 1 {
        if eval_points < 2 {
            return Err(CliError::Usage("eval-points must be at least 2".into()));
        }
        let xs: Vec<f64> = (0..eval_points)
            .map(|i| -1.0 + 2.0 * i as f64 / (eval_points - 1) as f64)
            .collect();
        let fit = apply_s(&meas, act, &gamma, &xs)?;
        io::write_fit_csv(&xs, &fit, &dir.join("reconstruction.csv"))?;
        let data: Vec<(f64, f64)> = ds
            .inputs()
            .iter()
            .copied()
            .zip(ds.targets().iter().copied())
            .collect();
        let curve: Vec<(f64, f64)> = xs.iter().copied().zip(fit).collect();
        write_text(
            &dir.join("fit.svg"),
            &svg::line_plot(&data, &curve, &format!("S[gamma*] vs data, beta = {beta}")),
        )?;
        let spec = spectrum_from_operator(&meas, &gamma, Normalization::RawSum)?;
        io::write_spectrum_csv(&spec, &dir.join("gamma_spectrum.csv"))?;
        write_text(
            &dir.join("gamma.svg"),
            &svg::heatmap(&spec, &format!("gamma* ({act})")),
        )?;
    } else {
        // no 1-D evaluation grid; report the fit at the data inputs instead
        io::write_dataset_csv(&ds.with_targets(at_data)?, &dir.join("reconstruction.csv"))?;
    }
    println!(
        "{} atoms, beta {beta}: relative L2 error {:.4}% -> {}",
        meas.len(),
        100.0 * err,
        dir.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct Report {
    concentration_score: f64,
    units_used: usize,
    units_dropped: usize,
    correlation: Option<f64>,
}

fn read_spectrum(path: &Path) -> CliResult<Spectrum> {
    with_path(path, io::read_spectrum_csv(path))
}

pub fn compare(args: CompareArgs, cfg: &Config) -> CliResult {
    let spec = read_spectrum(&args.spectrum)?;
    let units: Vec<Unit> = with_path(&args.units, io::read_units_csv(&args.units))?
        .into_iter()
        .map(|u| u.unit)
        .collect();
    let gamma = args.gamma.as_deref().map(read_spectrum).transpose()?;
    let dir = out_dir(args.out_dir, cfg)?;

    let score = concentration_score(&spec, &units)?;
    let correlation = gamma
        .as_ref()
        .map(|g| spectrum_correlation(&spec, g))
        .transpose()?;
    let report = Report {
        concentration_score: score.score,
        units_used: score.used,
        units_dropped: score.dropped,
        correlation,
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Core(e.into()))?;
    write_text(&dir.join("report.json"), &(json + "\n"))?;

    let points: Vec<(f64, f64, f64)> = units.iter().map(|u| (u.a[0], u.b, u.c)).collect();
    write_text(
        &dir.join("compare.svg"),
        &svg::heatmap_with_scatter(&spec, &points, "trained units over the spectrum"),
    )?;
    if let Some(g) = &gamma {
        write_text(
            &dir.join("compare_gamma.svg"),
            &svg::heatmap_with_scatter(g, &points, "trained units over gamma*"),
        )?;
    }
    print!(
        "concentration score {:.4} ({} units used, {} outside the grid)",
        score.score, score.used, score.dropped
    );
    match correlation {
        Some(r) => println!(", |spectrum| vs |gamma*| correlation {r:.4}"),
        None => println!(),
    }
    Ok(())
}

pub fn selftest() -> CliResult {
    let checks = ridgelab::selfcheck::run();
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    if failed > 0 {
        return Err(CliError::Numeric(format!(
            "{failed} of {} checks failed",
            checks.len()
        )));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}
