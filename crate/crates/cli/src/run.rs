use std::io::Write;
use std::path::Path;

use cantor_core::model::build_model_system;
use cantor_core::orbit::{classify_grid, cobweb_trace, iterate, IteratedMap, Region};
use cantor_core::target::build_target_system;
use cantor_core::{BuildMode, CantorSpec, ConjugateMap, GapTree, IntervalSystem, Outcome, QuadraticParams};

use crate::config::{Command, MapChoice, PlotFormat, RunConfig};
use crate::error::{CliError, CliResult};
use crate::formats::{self, SystemDocument, SystemKind};
use crate::verify::{run_suites, VerifyConfig};
use crate::{fmt17, plot, ppm};

/// Executes one command, writing human-readable results to `out`.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    match cfg.command {
        Command::BuildModel => build_model(cfg, out),
        Command::BuildTarget => build_target(cfg, out),
        Command::Phi => phi(cfg, out),
        Command::Fstar => fstar(cfg, out),
        Command::Iterate => iterate_cmd(cfg, out),
        Command::Classify => classify(cfg, out),
        Command::Cobweb => cobweb(cfg, out),
        Command::Mandelbrot => mandelbrot(cfg, out),
        Command::Verify => verify(cfg, out),
    }
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

/// Writes `bytes` to `--out`, or to `out` when no file was named.
fn emit(cfg: &RunConfig, out: &mut dyn Write, bytes: &[u8]) -> CliResult<()> {
    match &cfg.out {
        Some(path) => formats::write_bytes(path, bytes),
        None => out.write_all(bytes).map_err(stdout_err),
    }
}

fn line(out: &mut dyn Write, text: impl AsRef<str>) -> CliResult<()> {
    writeln!(out, "{}", text.as_ref()).map_err(stdout_err)
}

fn depth(cfg: &RunConfig) -> usize {
    cfg.depth as usize
}

fn spec(cfg: &RunConfig) -> CliResult<CantorSpec> {
    cfg.target.to_spec(cfg.hull)
}

fn mode(cfg: &RunConfig) -> BuildMode {
    cfg.mode.into()
}

fn summary(out: &mut dyn Write, system: &IntervalSystem, path: &Path) -> CliResult<()> {
    let n = system.depth();
    line(out, format!("wrote {} ({} levels)", path.display(), n + 1))?;
    line(out, format!("level {n}: {} segments", system.level(n)?.len()))?;
    line(out, format!("max segment length: {}", fmt17(system.max_segment_length(n)?)))
}

fn build_model(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let params = QuadraticParams::new(cfg.c)?;
    let system = build_model_system(&params, depth(cfg))?;
    let doc = SystemDocument { kind: SystemKind::Model { c: cfg.c }, system };
    emit(cfg, out, formats::save_system(&doc).as_bytes())?;
    if let Some(path) = &cfg.out {
        line(out, format!("p = {}", fmt17(params.p().unwrap_or(f64::NAN))))?;
        line(out, format!("lambda = {}", fmt17(params.lambda())))?;
        summary(out, &doc.system, path)?;
    }
    Ok(())
}

fn build_target(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let spec = spec(cfg)?;
    let target = build_target_system(&spec, depth(cfg), mode(cfg))?;
    let doc = SystemDocument { kind: SystemKind::Target { spec, mode: target.mode }, system: target.system };
    emit(cfg, out, formats::save_system(&doc).as_bytes())?;
    if let Some(path) = &cfg.out {
        summary(out, &doc.system, path)?;
        let gaps_path = path.with_extension("gaps.json");
        let tree = GapTree::from_system(&doc.system);
        formats::write_bytes(&gaps_path, formats::save_gaps(&tree).as_bytes())?;
        line(out, format!("wrote {}", gaps_path.display()))?;
    }
    Ok(())
}

/// Model system, target system and `F*`, all at `--depth`.
fn conjugate(cfg: &RunConfig) -> CliResult<(IntervalSystem, IntervalSystem, ConjugateMap)> {
    let params = QuadraticParams::new(cfg.c)?;
    let model = build_model_system(&params, depth(cfg))?;
    let target = build_target_system(&spec(cfg)?, depth(cfg), mode(cfg))?.system;
    let map = ConjugateMap::new(params, &model, &target, depth(cfg))?;
    Ok((model, target, map))
}

fn phi(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let (_, _, map) = conjugate(cfg)?;
    let phi = map.phi();
    if cfg.eval.is_empty() {
        let mut csv = String::from("x,y\n");
        for (x, y) in phi.knots() {
            csv.push_str(&format!("{},{}\n", fmt17(x), fmt17(y)));
        }
        return emit(cfg, out, csv.as_bytes());
    }
    for &v in &cfg.eval {
        let value = if cfg.inverse { phi.eval_inverse(v) } else { phi.eval(v) };
        line(out, fmt17(value))?;
    }
    Ok(())
}

fn fstar(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    if cfg.eval.is_empty() {
        return Err(CliError::Usage("fstar needs at least one --eval point".into()));
    }
    let (_, _, map) = conjugate(cfg)?;
    for &y in &cfg.eval {
        line(out, fmt17(map.eval(y)))?;
    }
    Ok(())
}

fn describe(outcome: Outcome) -> String {
    match outcome {
        Outcome::Escaped { first_exit_iteration } => format!("escaped at iteration {first_exit_iteration}"),
        Outcome::Bounded { iterations_run } => format!("bounded for {iterations_run} iterations (finite horizon)"),
    }
}

/// Runs `f` against whichever map `--map` selects.
fn with_map<T>(cfg: &RunConfig, f: impl FnOnce(&dyn IteratedMapExt) -> CliResult<T>) -> CliResult<T> {
    match cfg.map {
        MapChoice::Model => f(&QuadraticParams::new(cfg.c)?),
        MapChoice::Target => f(&conjugate(cfg)?.2),
    }
}

/// An iterated map that also knows a sensible window for plots and grids.
trait IteratedMapExt: IteratedMap {
    fn window(&self) -> Option<(f64, f64)>;
}

impl IteratedMapExt for QuadraticParams {
    fn window(&self) -> Option<(f64, f64)> {
        self.p().map(|p| (-p, p))
    }
}

impl IteratedMapExt for ConjugateMap {
    fn window(&self) -> Option<(f64, f64)> {
        let (first, last) = (self.phi().knots().next()?, self.phi().knots().last()?);
        Some((first.1, last.1))
    }
}

fn iterate_cmd(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let result = with_map(cfg, |m| Ok(iterate(m, cfg.x0, cfg.max_iter as usize, cfg.trajectory)))?;
    line(out, describe(result.outcome))?;
    for (n, x) in result.trajectory.iter().flatten().enumerate() {
        line(out, format!("{n} {}", fmt17(*x)))?;
    }
    Ok(())
}

fn classify(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let rows = with_map(cfg, |m| {
        let (lo, hi) = match (cfg.lo, cfg.hi, m.window()) {
            (Some(lo), Some(hi), _) => (lo, hi),
            (lo, hi, Some((a, b))) => (lo.unwrap_or(a), hi.unwrap_or(b)),
            _ => return Err(CliError::Usage("this map has no hull; give both --lo and --hi".into())),
        };
        if !(lo < hi) {
            return Err(CliError::Usage(format!("grid needs --lo < --hi, got {lo} and {hi}")));
        }
        Ok(classify_grid(m, lo, hi, cfg.points as usize, cfg.max_iter as usize))
    })?;
    let mut csv = String::from("x,outcome,iteration\n");
    for (x, r) in rows {
        let (kind, n) = match r.outcome {
            Outcome::Escaped { first_exit_iteration } => ("escaped", first_exit_iteration),
            Outcome::Bounded { iterations_run } => ("bounded", iterations_run),
        };
        csv.push_str(&format!("{},{kind},{n}\n", fmt17(x)));
    }
    emit(cfg, out, csv.as_bytes())
}

fn cobweb(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    if cfg.steps == 0 {
        return Err(CliError::Usage("cobweb needs --steps of at least 1".into()));
    }
    let format = cfg.format.unwrap_or_else(|| match cfg.out.as_ref().and_then(|p| p.extension()) {
        Some(ext) if ext.eq_ignore_ascii_case("svg") => PlotFormat::Svg,
        _ => PlotFormat::Csv,
    });
    let text = with_map(cfg, |m| {
        // One more graph touch than steps, so each step has an end point.
        let trace = cobweb_trace(m, cfg.x0, cfg.steps + 1).expect("steps >= 1");
        Ok(match format {
            PlotFormat::Csv => plot::cobweb_csv(&trace),
            PlotFormat::Svg => {
                let extra: Vec<f64> = m.window().map(|(a, b)| vec![a, b]).unwrap_or_default();
                let window = plot::view_window(&trace, &extra);
                plot::cobweb_svg(&trace, |x| m.apply(x), window)
            }
        })
    })?;
    emit(cfg, out, text.as_bytes())
}

fn mandelbrot(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let Some(path) = &cfg.out else {
        return Err(CliError::Usage("mandelbrot writes a binary image; give --out PATH".into()));
    };
    let [re_min, re_max, im_min, im_max] = cfg.region.0;
    if !(re_min < re_max && im_min < im_max) {
        return Err(CliError::Usage("--region needs RE_MIN < RE_MAX and IM_MIN < IM_MAX".into()));
    }
    let region = Region { re_min, re_max, im_min, im_max };
    let bytes = ppm::escape_image(&region, cfg.width as usize, cfg.height as usize, cfg.max_iter as usize);
    formats::write_bytes(path, &bytes)?;
    line(out, format!("wrote {} ({}x{})", path.display(), cfg.width, cfg.height))
}

fn verify(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let vc = VerifyConfig { c: cfg.c, depth: depth(cfg), spec: spec(cfg)?, mode: mode(cfg) };
    let checks = run_suites(&vc)?;
    for check in &checks {
        line(out, check.to_string())?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    line(out, format!("{} checks, {failed} failed", checks.len()))?;
    if failed > 0 {
        return Err(CliError::VerifyFailed(failed));
    }
    Ok(())
}
