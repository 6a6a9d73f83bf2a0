//! Batch front-end for the secure-GDoF laboratory.
//!
//! Subcommands map onto the library: closed-form curve sweeps, structural
//! scheme checks with layer-table export, seeded Monte Carlo simulation over
//! a power grid, minimum-distance/outage analysis, converse checks, and the
//! multiple-access region trace. All output is deterministic for a fixed
//! configuration and seed.

mod config;

use clap::{Args, Parser, Subcommand};
use config::Config;

use secgdof::channel::{sample_h, sample_h_with, stream_rng, ChannelConfig, Setting};
use secgdof::design::{fmt, SchemeDesign};
use secgdof::diophantine::{
    measure_bound, min_distance, outage_fraction, MinDistProblem, OutageBoundId,
    OutageInstance,
    DEFAULT_ENUM_CAP,
};
use secgdof::gdof::{ic_min_dc, ic_sum_gdof, wth_min_dc, GdofPoint};
use secgdof::scheme_ic::design_ic;
use secgdof::scheme_macwt::{
    b_sweep, design_macwt, design_macwt_swapped, role_swap, MacDesignInput,
};
use secgdof::scheme_wth::design_wth;
use secgdof::simlab::{converse_check, secure_rate_eval};
use secgdof::Error as CoreError;

const EXIT_CONFIG: i32 = 3;
const EXIT_DOMAIN: i32 = 4;
const EXIT_CAP: i32 = 5;

#[derive(Debug)]
enum CliError {
    Config(String),
    Domain(String),
    Cap(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Cap(_) => EXIT_CAP,
            CliError::Io(_) => 1,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Domain(m) | CliError::Cap(m) | CliError::Io(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::SearchSpaceExceeded { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

fn setting_from(s: &str) -> Result<Setting, CliError> {
    match s {
        "ic" => Ok(Setting::IcSc),
        "wth" => Ok(Setting::Wth),
        "mac" => Ok(Setting::MacWt),
        other => Err(CliError::Config(format!(
            "unknown setting `{other}` (expected ic, wth, or mac)"
        ))),
    }
}

#[derive(Parser)]
#[command(
    name = "secgdof",
    about = "Secure-GDoF laboratory: sweeps, scheme checks, seeded simulations, and reports",
    version
)]
struct Cli {
    /// Experiment manifest; sections named after subcommands supply defaults
    /// that flags override.
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep the closed-form GDoF curves over alpha to CSV or SVG.
    GdofCurve(GdofCurveArgs),
    /// Build a transmit design, verify its structure, emit the layer table.
    SchemeCheck(SchemeCheckArgs),
    /// Seeded Monte Carlo: error rate, leakage, and rate proxies over a P grid.
    Simulate(SimulateArgs),
    /// Minimum distance, outage fraction, or closed-form measure bound.
    Mindist(MindistArgs),
    /// Check a GDoF point against the converse bounds.
    Converse(ConverseArgs),
    /// Trace the multiple-access region by sweeping the rate split.
    Region(RegionArgs),
}

#[derive(Args)]
struct GdofCurveArgs {
    /// ic or wth.
    #[arg(long)]
    setting: Option<String>,
    /// start:stop:step sweep of alpha.
    #[arg(long = "alpha-range")]
    alpha_range: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv (default) or svg.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct SchemeCheckArgs {
    #[arg(long)]
    setting: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "P")]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Rate split of the multiple-access design (alpha < 1).
    #[arg(long = "B")]
    b: Option<f64>,
    /// Target pair of the multiple-access design at alpha = 1.
    #[arg(long)]
    d1: Option<f64>,
    #[arg(long)]
    d2: Option<f64>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    setting: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Single base power; alternative to --P-grid.
    #[arg(long = "P")]
    p: Option<f64>,
    /// Comma-separated powers, e.g. 1e4,1e6,1e8.
    #[arg(long = "P-grid")]
    p_grid: Option<String>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long = "B")]
    b: Option<f64>,
    /// Independent channel draws per grid point.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    draws: Option<u64>,
    #[arg(long)]
    out: Option<String>,
    /// Only csv is defined for simulate.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct MindistArgs {
    /// dmin, outage, or bound.
    #[arg(long)]
    mode: Option<String>,
    /// Comma-separated scale factors (dmin mode).
    #[arg(long)]
    scales: Option<String>,
    /// Comma-separated gains (dmin mode).
    #[arg(long)]
    gains: Option<String>,
    /// Comma-separated symbol half-ranges (dmin mode).
    #[arg(long)]
    ranges: Option<String>,
    /// ic2, mac2, mac3, or mac1 (outage and bound modes).
    #[arg(long)]
    instance: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "P")]
    p: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    draws: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "B")]
    b: Option<f64>,
    #[arg(long)]
    d1: Option<f64>,
    #[arg(long)]
    d2: Option<f64>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ConverseArgs {
    #[arg(long)]
    setting: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    d1: Option<f64>,
    #[arg(long)]
    d2: Option<f64>,
    #[arg(long)]
    dc: Option<f64>,
    /// When given, also report the finite-P penalty terms.
    #[arg(long = "P")]
    p: Option<f64>,
    /// Seed for the coefficient draw entering the finite-P penalties.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long)]
    alpha: Option<f64>,
    /// Points per rate-split column.
    #[arg(long, value_parser = clap::value_parser!(usize))]
    points: Option<usize>,
    /// Also emit the role-swapped points at 1/alpha.
    #[arg(long)]
    swap: bool,
    #[arg(long)]
    out: Option<String>,
}

fn emit(out: &Option<String>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Io(format!("cannot write {path}: {e}"))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_alpha_range(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!(
            "alpha range `{spec}` must be start:stop:step"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| CliError::Config(format!("alpha range `{spec}`: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(CliError::Config(format!("alpha range `{spec}` is empty")));
    }
    let mut grid = Vec::new();
    let mut i = 0u64;
    loop {
        let a = start + i as f64 * step;
        if a > stop + 1e-12 {
            break;
        }
        grid.push(a);
        i += 1;
    }
    Ok(grid)
}

fn parse_list(spec: &str, what: &str) -> Result<Vec<f64>, CliError> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("{what} `{spec}`: {e}")))
        })
        .collect()
}

/// SplitMix step for deriving per-(draw, grid-point) seeds.
fn mix_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn build_design(
    setting: Setting,
    cfg: &ChannelConfig,
    eps: Option<f64>,
    gamma: Option<f64>,
    b: Option<f64>,
    pair: Option<(f64, f64)>,
) -> Result<SchemeDesign, CliError> {
    let d = match setting {
        Setting::IcSc => design_ic(cfg, eps, gamma)?,
        Setting::Wth => design_wth(cfg, eps, gamma)?,
        Setting::MacWt => design_macwt(
            &MacDesignInput { cfg: *cfg, b, target_pair: pair },
            eps,
            gamma,
        )?,
    };
    Ok(d)
}

fn run_gdof_curve(a: GdofCurveArgs, cfg: &Config) -> Result<(), CliError> {
    let sec = "gdof-curve";
    let setting = setting_from(&cfg.resolve(a.setting, sec, "setting", Some("ic".into())).map_err(CliError::Config)?)?;
    let range = cfg
        .resolve(a.alpha_range, sec, "alpha-range", Some("0:3:0.01".into()))
        .map_err(CliError::Config)?;
    let format = cfg
        .resolve(a.format, sec, "format", Some("csv".into()))
        .map_err(CliError::Config)?;
    let out = cfg.resolve_opt(a.out, sec, "out").map_err(CliError::Config)?;

    let grid = parse_alpha_range(&range)?;
    let mut rows = Vec::with_capacity(grid.len());
    for alpha in grid {
        let (dsum, dc) = match setting {
            Setting::IcSc => (ic_sum_gdof(alpha)?, ic_min_dc(alpha)?),
            Setting::Wth => (1.0, wth_min_dc(alpha)?),
            Setting::MacWt => {
                return Err(CliError::Domain(
                    "gdof-curve covers ic and wth; the mac region is traced by `region`".into(),
                ))
            }
        };
        rows.push((alpha, dsum, dc));
    }
    let content = match format.as_str() {
        "csv" => {
            let mut s = String::from("alpha,d_sum,d_c\n");
            for (a, d, c) in &rows {
                s.push_str(&format!("{},{},{}\n", fmt(*a), fmt(*d), fmt(*c)));
            }
            s
        }
        "svg" => svg_curves(
            &[
                ("d_sum", rows.iter().map(|r| (r.0, r.1)).collect()),
                ("d_c", rows.iter().map(|r| (r.0, r.2)).collect()),
            ],
            "alpha",
        ),
        other => {
            return Err(CliError::Config(format!(
                "unknown format `{other}` (expected csv or svg)"
            )))
        }
    };
    emit(&out, &content)
}

fn run_scheme_check(a: SchemeCheckArgs, cfgf: &Config) -> Result<(), CliError> {
    let sec = "scheme-check";
    let setting = setting_from(&cfgf.resolve(a.setting, sec, "setting", None).map_err(CliError::Config)?)?;
    let alpha: f64 = cfgf.resolve(a.alpha, sec, "alpha", None).map_err(CliError::Config)?;
    let p: f64 = cfgf.resolve(a.p, sec, "p", Some(1e8)).map_err(CliError::Config)?;
    let seed: u64 = cfgf.resolve(a.seed, sec, "seed", Some(0)).map_err(CliError::Config)?;
    let eps = cfgf.resolve_opt(a.epsilon, sec, "epsilon").map_err(CliError::Config)?;
    let gamma = cfgf.resolve_opt(a.gamma, sec, "gamma").map_err(CliError::Config)?;
    let b = cfgf.resolve_opt(a.b, sec, "b").map_err(CliError::Config)?;
    let d1 = cfgf.resolve_opt(a.d1, sec, "d1").map_err(CliError::Config)?;
    let d2 = cfgf.resolve_opt(a.d2, sec, "d2").map_err(CliError::Config)?;
    let out = cfgf.resolve_opt(a.out, sec, "out").map_err(CliError::Config)?;

    let h = sample_h(seed);
    let chan = ChannelConfig::new(p, alpha, h, setting)?;
    let pair = match (d1, d2) {
        (Some(x), Some(y)) => Some((x, y)),
        _ => None,
    };
    let (design, swap_note) = if setting == Setting::MacWt && alpha > 1.0 {
        let (d, swap) = design_macwt_swapped(&chan, b, eps, gamma)?;
        (d, Some(swap))
    } else {
        (build_design(setting, &chan, eps, gamma, b, pair)?, None)
    };

    // The design carries its own channel when role-swapped.
    let check_chan = if swap_note.is_some() {
        ChannelConfig::new(
            chan.p.powf(chan.alpha),
            1.0 / chan.alpha,
            secgdof::channel::HMatrix::new(h.h12, h.h11, h.h22, h.h21)?,
            Setting::MacWt,
        )?
    } else {
        chan
    };
    let report = secgdof::verify::verify_design(&design, &check_chan)?;

    let mut s = String::new();
    s.push_str(&format!(
        "h11={} h12={} h21={} h22={} seed={seed}\n",
        fmt(h.h11),
        fmt(h.h12),
        fmt(h.h21),
        fmt(h.h22)
    ));
    if let Some(sw) = swap_note {
        s.push_str(&format!(
            "role_swap alpha_built={} alpha_target={}\n",
            fmt(sw.alpha_built),
            fmt(sw.alpha_target)
        ));
    }
    s.push_str(&design.layer_table());
    s.push_str(&report.render());
    emit(&out, &s)
}

fn run_simulate(a: SimulateArgs, cfgf: &Config) -> Result<(), CliError> {
    let sec = "simulate";
    let setting = setting_from(&cfgf.resolve(a.setting, sec, "setting", None).map_err(CliError::Config)?)?;
    let alpha: f64 = cfgf.resolve(a.alpha, sec, "alpha", None).map_err(CliError::Config)?;
    let trials: u64 = cfgf.resolve(a.trials, sec, "trials", Some(10_000)).map_err(CliError::Config)?;
    if trials == 0 {
        return Err(CliError::Config("trials must be positive".into()));
    }
    let seed: u64 = cfgf.resolve(a.seed, sec, "seed", Some(0)).map_err(CliError::Config)?;
    let eps = cfgf.resolve_opt(a.epsilon, sec, "epsilon").map_err(CliError::Config)?;
    let gamma = cfgf.resolve_opt(a.gamma, sec, "gamma").map_err(CliError::Config)?;
    let b = cfgf.resolve_opt(a.b, sec, "b").map_err(CliError::Config)?;
    let draws: u64 = cfgf.resolve(a.draws, sec, "draws", Some(1)).map_err(CliError::Config)?;
    let out = cfgf.resolve_opt(a.out, sec, "out").map_err(CliError::Config)?;
    let format: String = cfgf.resolve(a.format, sec, "format", Some("csv".into())).map_err(CliError::Config)?;
    if format != "csv" {
        return Err(CliError::Config("simulate emits csv only".into()));
    }
    let p_grid = match cfgf.resolve_opt(a.p_grid, sec, "p-grid").map_err(CliError::Config)? {
        Some(spec) => parse_list(&spec, "P grid")?,
        None => vec![cfgf.resolve(a.p, sec, "p", Some(1e6)).map_err(CliError::Config)?],
    };
    if setting == Setting::MacWt && alpha > 1.0 {
        return Err(CliError::Domain(
            "simulate runs the direct multiple-access design; for alpha > 1 simulate at \
             1/alpha and map the claims through the role swap"
                .into(),
        ));
    }

    let mut s = String::from(
        "setting,alpha,p,draw,trials,seed,h11,h12,h21,h22,err_any,err_stderr,\
         leak_bits,leak_stderr,leak_bound_bits,d1_proxy,d2_proxy,dsum_proxy,dc_proxy\n",
    );
    for draw in 0..draws {
        let mut rng = stream_rng(seed, 17, draw);
        let h = sample_h_with(&mut rng);
        for (pi, &p) in p_grid.iter().enumerate() {
            let chan = ChannelConfig::new(p, alpha, h, setting)?;
            let design = build_design(setting, &chan, eps, gamma, b, None)?;
            let sub_seed = mix_seed(seed, draw, pi as u64);
            let rep = secure_rate_eval(&design, &chan, trials, sub_seed)?;
            s.push_str(&format!(
                "{},{},{},{draw},{trials},{sub_seed},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                setting.label(),
                fmt(alpha),
                fmt(p),
                fmt(h.h11),
                fmt(h.h12),
                fmt(h.h21),
                fmt(h.h22),
                fmt(rep.err.any.mean),
                fmt(rep.err.any.stderr),
                fmt(rep.leak_user1.estimate.mean),
                fmt(rep.leak_user1.estimate.stderr),
                fmt(rep.leak_user1.analytic_bound_bits),
                fmt(rep.d1_proxy),
                fmt(rep.d2_proxy),
                fmt(rep.dsum_proxy),
                fmt(rep.dc_proxy),
            ));
        }
    }
    emit(&out, &s)
}

fn run_mindist(a: MindistArgs, cfgf: &Config) -> Result<(), CliError> {
    let sec = "mindist";
    let mode: String = cfgf.resolve(a.mode, sec, "mode", Some("dmin".into())).map_err(CliError::Config)?;
    let out = cfgf.resolve_opt(a.out, sec, "out").map_err(CliError::Config)?;
    match mode.as_str() {
        "dmin" => {
            let scales = parse_list(
                &cfgf.resolve(a.scales, sec, "scales", None).map_err(CliError::Config)?,
                "scales",
            )?;
            let gains = parse_list(
                &cfgf.resolve(a.gains, sec, "gains", None).map_err(CliError::Config)?,
                "gains",
            )?;
            let ranges = parse_list(
                &cfgf.resolve(a.ranges, sec, "ranges", None).map_err(CliError::Config)?,
                "ranges",
            )?;
            let d = min_distance(
                &MinDistProblem { scales, gains, q_ranges: ranges },
                DEFAULT_ENUM_CAP,
            )?;
            emit(&out, &format!("d_min={}\n", fmt(d)))
        }
        "outage" => {
            let id = OutageBoundId::parse(
                &cfgf.resolve(a.instance, sec, "instance", None).map_err(CliError::Config)?,
            )?;
            let alpha: f64 = cfgf.resolve(a.alpha, sec, "alpha", None).map_err(CliError::Config)?;
            let p: f64 = cfgf.resolve(a.p, sec, "p", None).map_err(CliError::Config)?;
            let eps: f64 = cfgf.resolve(a.epsilon, sec, "epsilon", None).map_err(CliError::Config)?;
            let kappa: f64 = cfgf.resolve(a.kappa, sec, "kappa", None).map_err(CliError::Config)?;
            let draws: u64 = cfgf.resolve(a.draws, sec, "draws", Some(10_000)).map_err(CliError::Config)?;
            let seed: u64 = cfgf.resolve(a.seed, sec, "seed", Some(0)).map_err(CliError::Config)?;
            let b = cfgf.resolve_opt(a.b, sec, "b").map_err(CliError::Config)?;
            let d1 = cfgf.resolve_opt(a.d1, sec, "d1").map_err(CliError::Config)?;
            let d2 = cfgf.resolve_opt(a.d2, sec, "d2").map_err(CliError::Config)?;
            let need_b = || {
                b.ok_or_else(|| CliError::Config("this instance needs --B".into()))
            };
            let inst = match id {
                OutageBoundId::IcTwoTerm => OutageInstance::IcJoint,
                OutageBoundId::MacTwoTerm => OutageInstance::MacTwoTerm { b: need_b()? },
                OutageBoundId::MacThreeTerm => OutageInstance::MacThreeTerm { b: need_b()? },
                OutageBoundId::MacAlphaOne => OutageInstance::MacAlphaOne {
                    d1: d1.ok_or_else(|| CliError::Config("instance mac1 needs --d1".into()))?,
                    d2: d2.ok_or_else(|| CliError::Config("instance mac1 needs --d2".into()))?,
                },
            };
            let est = outage_fraction(alpha, p, eps, kappa, inst, draws, seed)?;
            let bound = measure_bound(id, kappa, eps, p);
            emit(
                &out,
                &format!(
                    "fraction={} stderr={} draws={draws} bound={} vacuous={}\n",
                    fmt(est.mean),
                    fmt(est.stderr),
                    fmt(bound.value),
                    bound.vacuous
                ),
            )
        }
        "bound" => {
            let id = OutageBoundId::parse(
                &cfgf.resolve(a.instance, sec, "instance", None).map_err(CliError::Config)?,
            )?;
            let p: f64 = cfgf.resolve(a.p, sec, "p", None).map_err(CliError::Config)?;
            let eps: f64 = cfgf.resolve(a.epsilon, sec, "epsilon", None).map_err(CliError::Config)?;
            let kappa: f64 = cfgf.resolve(a.kappa, sec, "kappa", None).map_err(CliError::Config)?;
            let bound = measure_bound(id, kappa, eps, p);
            emit(
                &out,
                &format!("bound={} vacuous={}\n", fmt(bound.value), bound.vacuous),
            )
        }
        other => Err(CliError::Config(format!(
            "unknown mindist mode `{other}` (expected dmin, outage, or bound)"
        ))),
    }
}

fn run_converse(a: ConverseArgs, cfgf: &Config) -> Result<(), CliError> {
    let sec = "converse";
    let setting = setting_from(&cfgf.resolve(a.setting, sec, "setting", None).map_err(CliError::Config)?)?;
    let alpha: f64 = cfgf.resolve(a.alpha, sec, "alpha", None).map_err(CliError::Config)?;
    let d1: f64 = cfgf.resolve(a.d1, sec, "d1", None).map_err(CliError::Config)?;
    let d2: f64 = cfgf.resolve(a.d2, sec, "d2", Some(0.0)).map_err(CliError::Config)?;
    let dc: f64 = cfgf.resolve(a.dc, sec, "dc", None).map_err(CliError::Config)?;
    let p = cfgf.resolve_opt(a.p, sec, "p").map_err(CliError::Config)?;
    let seed: u64 = cfgf.resolve(a.seed, sec, "seed", Some(0)).map_err(CliError::Config)?;
    let out = cfgf.resolve_opt(a.out, sec, "out").map_err(CliError::Config)?;

    let finite = p.map(|p| (p, sample_h(seed)));
    let rep = converse_check(setting, alpha, GdofPoint::new(d1, d2, dc), finite)?;
    let mut s = format!(
        "required_dc={} slack={} pass={}\n",
        fmt(rep.required_dc),
        fmt(rep.slack),
        rep.pass
    );
    if let Some(f) = rep.finite_p {
        s.push_str(&format!("penalty_user1_bits={}\n", fmt(f.user1_bits)));
        if let Some(u2) = f.user2_bits {
            s.push_str(&format!("penalty_user2_bits={}\n", fmt(u2)));
        }
    }
    emit(&out, &s)
}

fn run_region(a: RegionArgs, cfgf: &Config) -> Result<(), CliError> {
    let sec = "region";
    let alpha: f64 = cfgf.resolve(a.alpha, sec, "alpha", None).map_err(CliError::Config)?;
    let points: usize = cfgf.resolve(a.points, sec, "points", Some(33)).map_err(CliError::Config)?;
    let out = cfgf.resolve_opt(a.out, sec, "out").map_err(CliError::Config)?;

    let mut s = String::from("alpha,b,d1,d2,dc,swapped\n");
    let sweep = b_sweep(alpha, points)?;
    for (b, pt) in &sweep {
        s.push_str(&format!(
            "{},{},{},{},{},0\n",
            fmt(alpha),
            fmt(*b),
            fmt(pt.d1),
            fmt(pt.d2),
            fmt(pt.dc)
        ));
    }
    if a.swap {
        for (b, pt) in &sweep {
            let (sw, ap) = role_swap(*pt, alpha)?;
            s.push_str(&format!(
                "{},{},{},{},{},1\n",
                fmt(ap),
                fmt(*b),
                fmt(sw.d1),
                fmt(sw.d2),
                fmt(sw.dc)
            ));
        }
    }
    emit(&out, &s)
}

fn svg_curves(series: &[(&str, Vec<(f64, f64)>)], xlabel: &str) -> String {
    let (w, h, ml, mb) = (640.0, 420.0, 50.0, 40.0);
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let ymin = 0.0f64;
    let mut ymax = f64::NEG_INFINITY;
    for (_, pts) in series {
        for &(x, y) in pts {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymax = ymax.max(y);
        }
    }
    ymax = ymax.max(1e-9);
    let sx = |x: f64| ml + (x - xmin) / (xmax - xmin).max(1e-12) * (w - ml - 20.0);
    let sy = |y: f64| (h - mb) - (y - ymin) / (ymax - ymin).max(1e-12) * (h - mb - 20.0);
    let colors = ["#1f77b4", "#d62728", "#2ca02c"];
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{ml}\" y1=\"20\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" font-size=\"12\">{xlabel}</text>\n",
        h - mb,
        w - 20.0,
        h - mb,
        h - mb,
        w / 2.0,
        h - 10.0,
    );
    for (i, (name, pts)) in series.iter().enumerate() {
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n\
             <text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{name}</text>\n",
            colors[i % colors.len()],
            path.join(" "),
            w - 120.0,
            30.0 + 16.0 * i as f64,
            colors[i % colors.len()],
        ));
    }
    s.push_str("</svg>\n");
    s
}

fn main() {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                std::process::exit(EXIT_CONFIG);
            }
        },
        None => Config::default(),
    };
    let result = match cli.cmd {
        Cmd::GdofCurve(a) => run_gdof_curve(a, &cfg),
        Cmd::SchemeCheck(a) => run_scheme_check(a, &cfg),
        Cmd::Simulate(a) => run_simulate(a, &cfg),
        Cmd::Mindist(a) => run_mindist(a, &cfg),
        Cmd::Converse(a) => run_converse(a, &cfg),
        Cmd::Region(a) => run_region(a, &cfg),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
}
