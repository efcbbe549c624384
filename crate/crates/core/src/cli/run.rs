use std::fmt::Write as _;
use std::io::Write;

use crate::cli::config::{fmt_num, Experiment, ExperimentConfig, Validated};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mc::{
    est_harmonic, est_hitting, exit_sample, far_fraction, fit_regularity_exponent, half_space_payoff,
    make_half_annulus, mean_exit_time, tail_fraction, Estimate, HarmonicProbe, Sampling,
};
use crate::scale::log_space;
use crate::sim::{path_rng, EventLog, JumpProcessModel};
use crate::symbol::SymbolEvaluator;

/// Output of one experiment: CSV text, human-readable summary lines and a
/// gnuplot script reading the CSV from `data_path`.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub csv: String,
    pub summary: Vec<String>,
    columns: Vec<&'static str>,
    plot: PlotSpec,
}

#[derive(Debug, Clone, PartialEq)]
struct PlotSpec {
    x: &'static str,
    y: &'static str,
    logx: bool,
}

impl Report {
    pub fn gnuplot_script(&self, data_path: &str) -> String {
        let col = |name: &str| self.columns.iter().position(|c| *c == name).map_or(1, |i| i + 1);
        let mut s = String::new();
        let _ = writeln!(s, "set datafile separator ','");
        let _ = writeln!(s, "set datafile commentschars '#'");
        let _ = writeln!(s, "set key autotitle columnhead");
        if self.plot.logx {
            let _ = writeln!(s, "set logscale x");
        }
        let _ = writeln!(s, "set xlabel '{}'", self.plot.x);
        let _ = writeln!(s, "set ylabel '{}'", self.plot.y);
        let _ = writeln!(
            s,
            "plot '{data_path}' using {}:{} with linespoints",
            col(self.plot.x),
            col(self.plot.y)
        );
        s
    }
}

struct CsvBuilder {
    text: String,
    columns: Vec<&'static str>,
}

impl CsvBuilder {
    fn new(exp: Experiment, cfg: &ExperimentConfig, resolved: &[String], columns: Vec<&'static str>) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "# levyscale {} {}", env!("CARGO_PKG_VERSION"), exp.name());
        for line in cfg.echo_text().lines() {
            let _ = writeln!(text, "# {line}");
        }
        for line in resolved {
            let _ = writeln!(text, "# {line}");
        }
        let _ = writeln!(text, "{}", columns.join(","));
        CsvBuilder { text, columns }
    }

    fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns.len());
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    fn finish(mut self, summary: Vec<String>, plot: PlotSpec) -> Report {
        for line in &summary {
            let _ = writeln!(self.text, "# summary: {line}");
        }
        Report { csv: self.text, summary, columns: self.columns, plot }
    }
}

fn num(x: f64) -> String {
    fmt_num(x)
}

fn est_cells(e: &Estimate, seed: u64) -> [String; 6] {
    [e.n().to_string(), num(e.mean()), num(e.stderr()), num(e.ci95_low()), num(e.ci95_high()), seed.to_string()]
}

const EST_COLUMNS: [&str; 6] = ["n", "mean", "stderr", "ci95_low", "ci95_high", "seed"];

fn with_est(prefix: &[&'static str], suffix: &[&'static str]) -> Vec<&'static str> {
    prefix.iter().chain(EST_COLUMNS.iter()).chain(suffix).copied().collect()
}

fn band(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

/// Validates `cfg` and runs `exp`. When `event_log` is given, the first
/// simulated path is replayed with the same random stream and its events are
/// written there.
pub fn run_experiment(exp: Experiment, cfg: &ExperimentConfig, event_log: Option<&mut dyn Write>) -> Result<Report> {
    let v = cfg.validate(exp)?;
    if event_log.is_some() && !exp.simulates() {
        return Err(Error::config("event_log", format!("{} does not simulate paths", exp.name())));
    }
    let mut resolved = Vec::new();
    if !v.models.is_empty() {
        let eps: Vec<String> = v.models.iter().map(|m| fmt_num(m.eps())).collect();
        resolved.push(format!("resolved eps={} (per radius)", eps.join(",")));
    }
    let report = match exp {
        Experiment::ScaleTable => scale_table(cfg, &v, &resolved)?,
        Experiment::SymbolCheck => symbol_check(cfg, &v, &resolved)?,
        Experiment::ExitTime => exit_time(cfg, &v, &resolved)?,
        Experiment::FarExit => far_exit(cfg, &v, &resolved)?,
        Experiment::Hitting => hitting(cfg, &v, &resolved)?,
        Experiment::Regularity => regularity(cfg, &v, &resolved)?,
    };
    if let (Some(out), Some(model)) = (event_log, v.models.first()) {
        replay_first_path(exp, cfg, model, out)?;
    }
    Ok(report)
}

fn sampling(cfg: &ExperimentConfig) -> Sampling {
    Sampling { paths: cfg.paths, seed: cfg.seed }
}

fn scale_table(cfg: &ExperimentConfig, v: &Validated, resolved: &[String]) -> Result<Report> {
    let calc = &v.calc;
    let mut csv = CsvBuilder::new(
        Experiment::ScaleTable,
        cfg,
        resolved,
        vec!["s", "a", "ell", "L", "L_closed", "rel_dev", "phi"],
    );
    let mut worst: f64 = 0.0;
    for s in log_space(cfg.s_min, cfg.s_max, cfg.points) {
        let ell = calc.ell_eval(s)?;
        let big_l = calc.big_l_quadrature(s)?.value;
        let closed = calc.closed_form_big_l(s);
        let dev = closed.map(|c| ((big_l - c) / c).abs());
        if let Some(d) = dev {
            worst = worst.max(d);
        }
        for &a in &cfg.a {
            csv.row(&[
                num(s),
                num(a),
                num(ell),
                num(big_l),
                closed.map(num).unwrap_or_default(),
                dev.map(num).unwrap_or_default(),
                num(calc.phi(a, s)?),
            ]);
        }
    }
    let mut summary = Vec::new();
    if calc.closed_form_big_l(cfg.s_max).is_some() {
        summary.push(format!("max relative deviation of quadrature from closed form: {worst:e}"));
    }
    if let Some(l0) = calc.big_l_at_zero() {
        summary.push(format!("L(0+) = {l0}"));
    }
    Ok(csv.finish(summary, PlotSpec { x: "s", y: "L", logx: true }))
}

fn symbol_check(cfg: &ExperimentConfig, v: &Validated, resolved: &[String]) -> Result<Report> {
    let eval = SymbolEvaluator::new(v.d, v.calc.clone()).with_resolution(cfg.psi_panels, cfg.psi_tol)?;
    let scan = eval.comparability_scan(cfg.xi_min, cfg.xi_max, cfg.points)?;
    let mut csv = CsvBuilder::new(Experiment::SymbolCheck, cfg, resolved, vec!["xi", "psi", "L_inv_xi", "ratio"]);
    for row in &scan.rows {
        csv.row(&[num(row.xi), num(row.psi), num(row.l_inv_xi), num(row.ratio)]);
    }
    let summary = vec![
        format!("ratio range [{}, {}]", scan.min_ratio, scan.max_ratio),
        format!("band max/min = {}", scan.band_width()),
        format!("two-sided constant = {}", scan.constant()),
    ];
    Ok(csv.finish(summary, PlotSpec { x: "xi", y: "ratio", logx: true }))
}

fn exit_time(cfg: &ExperimentConfig, v: &Validated, resolved: &[String]) -> Result<Report> {
    let mut csv = CsvBuilder::new(
        Experiment::ExitTime,
        cfg,
        resolved,
        with_est(&["quantity", "r", "t"], &["scaled"]),
    );
    let mut products = Vec::new();
    for (&r, model) in cfg.radii.iter().zip(&v.models) {
        let l_r = v.calc.big_l(r)?;
        let records = exit_sample(model, Point::ORIGIN, Point::ORIGIN, r, sampling(cfg))?;
        let mean = mean_exit_time(&records);
        products.push(mean.mean() * l_r);
        let mut cells = vec!["mean".to_string(), num(r), String::new()];
        cells.extend(est_cells(&mean, cfg.seed));
        cells.push(num(mean.mean() * l_r));
        csv.row(&cells);
        for &c in &cfg.t_scale {
            let t = c / l_r;
            let tail = tail_fraction(&records, t);
            let mut cells = vec!["tail".to_string(), num(r), num(t)];
            cells.extend(est_cells(&tail, cfg.seed));
            cells.push(if c > 0.0 { num(tail.mean() / c) } else { String::new() });
            csv.row(&cells);
        }
    }
    let summary = vec![format!("mean exit time times L(r): max/min = {}", band(&products))];
    Ok(csv.finish(summary, PlotSpec { x: "r", y: "scaled", logx: true }))
}

fn far_exit(cfg: &ExperimentConfig, v: &Validated, resolved: &[String]) -> Result<Report> {
    let mut csv = CsvBuilder::new(Experiment::FarExit, cfg, resolved, with_est(&["r", "s"], &["bound_ratio"]));
    let mut ratios = Vec::new();
    for (&r, model) in cfg.radii.iter().zip(&v.models) {
        let records = exit_sample(model, Point::ORIGIN, Point::ORIGIN, r, sampling(cfg))?;
        for &s in &cfg.s {
            let est = far_fraction(&records, Point::ORIGIN, s);
            let ratio = est.mean() * v.calc.big_l(r)? / v.calc.big_l(s)?;
            ratios.push(ratio);
            let mut cells = vec![num(r), num(s)];
            cells.extend(est_cells(&est, cfg.seed));
            cells.push(num(ratio));
            csv.row(&cells);
        }
    }
    let c4 = ratios.iter().copied().fold(0.0, f64::max);
    let summary = vec![format!("smallest constant covering all pairs: {c4}")];
    Ok(csv.finish(summary, PlotSpec { x: "r", y: "bound_ratio", logx: true }))
}

fn hitting(cfg: &ExperimentConfig, v: &Validated, resolved: &[String]) -> Result<Report> {
    let mut csv =
        CsvBuilder::new(Experiment::Hitting, cfg, resolved, with_est(&["r", "a", "phi_a"], &["rate_ratio"]));
    let mut summary = Vec::new();
    for (&r, model) in cfg.radii.iter().zip(&v.models) {
        let mut ratios = Vec::new();
        for &a in &cfg.a {
            let est = est_hitting(model, Point::ORIGIN, Point::ORIGIN, r, a, sampling(cfg))?;
            let ratio = est.mean() * a / a.ln();
            ratios.push(ratio);
            let mut cells = vec![num(r), num(a), num(v.calc.phi(a, r)?)];
            cells.extend(est_cells(&est, cfg.seed));
            cells.push(num(ratio));
            csv.row(&cells);
        }
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        summary.push(format!("r = {r}: min estimate·a/ln a = {min}, max/min = {}", band(&ratios)));
    }
    Ok(csv.finish(summary, PlotSpec { x: "a", y: "rate_ratio", logx: true }))
}

fn regularity_probe(cfg: &ExperimentConfig) -> Result<HarmonicProbe> {
    let r = cfg.radii[0];
    let mut grid = vec![Point::ORIGIN];
    for &f in &cfg.grid {
        grid.push(Point::on_axis(f * r / 4.0));
        grid.push(Point::on_axis(-f * r / 4.0));
    }
    HarmonicProbe::new(half_space_payoff(Point::ORIGIN), 1.0, Point::ORIGIN, r, grid)
}

fn regularity(cfg: &ExperimentConfig, v: &Validated, resolved: &[String]) -> Result<Report> {
    let model = &v.models[0];
    let r = cfg.radii[0];
    let probe = est_harmonic(model, &regularity_probe(cfg)?, sampling(cfg))?;
    let mut csv =
        CsvBuilder::new(Experiment::Regularity, cfg, resolved, with_est(&["kind", "x", "radius"], &[]));
    for (p, e) in probe.grid().iter().zip(probe.values()) {
        let mut cells = vec!["u".to_string(), num(p.first()), num(r)];
        cells.extend(est_cells(e, cfg.seed));
        csv.row(&cells);
    }
    let mut summary = Vec::new();
    let radii = v.calc.dyadic_radii(r, cfg.dyadic_a, cfg.dyadic_n)?;
    let mut oscillations = Vec::new();
    for &rk in &radii {
        let inside: Vec<&Estimate> = probe
            .grid()
            .iter()
            .zip(probe.values())
            .filter(|(p, _)| p.dist(&Point::ORIGIN) < rk)
            .map(|(_, e)| e)
            .collect();
        let Some(osc) = probe.oscillation(rk) else { continue };
        oscillations.push(osc);
        let worst_se = inside.iter().map(|e| e.stderr()).fold(0.0, f64::max);
        let n: u64 = inside.iter().map(|e| e.n()).sum();
        csv.row(&[
            "oscillation".into(),
            String::new(),
            num(rk),
            n.to_string(),
            num(osc),
            num(worst_se),
            String::new(),
            String::new(),
            cfg.seed.to_string(),
        ]);
    }
    let decreasing = oscillations.windows(2).all(|w| w[1] < w[0]);
    summary.push(format!(
        "oscillation over dyadic radii {:?}: {:?} ({})",
        radii,
        oscillations,
        if decreasing { "strictly decreasing" } else { "not strictly decreasing" }
    ));
    match fit_regularity_exponent(&probe, &v.calc, cfg.bootstrap, cfg.seed) {
        Ok(fit) => {
            csv.row(&[
                "gamma".into(),
                String::new(),
                String::new(),
                fit.pairs_used.to_string(),
                num(fit.gamma_hat),
                num((fit.ci_high - fit.ci_low) / (2.0 * 1.96)),
                num(fit.ci_low),
                num(fit.ci_high),
                cfg.seed.to_string(),
            ]);
            summary.push(format!(
                "gamma_hat = {} with bootstrap 95% interval [{}, {}] from {} of {} pairs",
                fit.gamma_hat, fit.ci_low, fit.ci_high, fit.pairs_used, fit.pairs_total
            ));
        }
        Err(Error::InsufficientSignal { passed, required }) => {
            summary.push(format!("gamma_hat unavailable: {passed} pairs passed the noise gate, {required} required"));
        }
        Err(e) => return Err(e),
    }
    Ok(csv.finish(summary, PlotSpec { x: "x", y: "mean", logx: false }))
}

fn replay_first_path(exp: Experiment, cfg: &ExperimentConfig, model: &JumpProcessModel, out: &mut dyn Write) -> Result<()> {
    let mut log = EventLog::new(out, model.dim())?;
    let mut rng = path_rng(cfg.seed, 0);
    let r = cfg.radii[0];
    match exp {
        Experiment::Hitting => {
            let target = make_half_annulus(model.calc(), Point::ORIGIN, r, cfg.a[0])?;
            model.simulate_hit_or_exit_observed(
                Point::ORIGIN,
                &target,
                Point::ORIGIN,
                target.annulus.outer,
                &mut rng,
                &mut |e| log.record(e),
            )?;
        }
        _ => {
            model.simulate_exit_observed(Point::ORIGIN, Point::ORIGIN, r, &mut rng, &mut |e| log.record(e))?;
        }
    }
    log.finish()?;
    Ok(())
}
