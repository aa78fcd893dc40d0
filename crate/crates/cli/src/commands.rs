use magband::assembly::{EffectiveFiber, FiberOperator, FullFiber, Grid, HalfPlaneFiber, TransverseFiber};
use magband::bands::{asymptote_match, band_scan, flat_band_detect, suff_condition_check, thin_limit_study};
use magband::closedform::{bottom_curve, degeneracy_enumerate, theta, Theta};
use magband::geometry::{check_assumptions, CurveFamily, CurveProfile, LayerConfig, Status};
use magband::iwatsuka::{iwatsuka_bands, nonconstancy_certificate, validate_field, IwatsukaSpec};
use magband::output::{format_value, CsvTable};
use serde_json::{json, Value};

use crate::config::{BandsConfig, BottomConfig, CheckConfig, DegeneracyConfig, IwatsukaConfig, Model, ThetaConfig, ThinConfig};
use crate::error::CliError;

/// Result of one subcommand before it is written out.
pub struct Run {
    pub table: CsvTable,
    pub grid: Value,
    pub tolerances: Value,
    pub outputs: Value,
    /// Set when a certificate or assumption report fails.
    pub certificate_failed: bool,
}

fn row(cells: impl IntoIterator<Item = String>) -> Vec<String> {
    cells.into_iter().collect()
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Holds => "holds",
        Status::Fails => "fails",
        Status::HoldsByConstruction => "holds-by-construction",
    }
}

fn require(value: Option<f64>, name: &str, model: Model) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Config(format!("model {model:?} needs `{name}`")))
}

fn require_profile(cfg: &BandsConfig) -> Result<CurveProfile, CliError> {
    let family = cfg
        .profile
        .ok_or_else(|| CliError::Config(format!("model {:?} needs a [profile] table", cfg.model)))?;
    Ok(CurveProfile::new(family)?)
}

pub fn bands(cfg: &BandsConfig) -> Result<Run, CliError> {
    let xi = cfg.xi.values()?;
    let op: Box<dyn FiberOperator> = match cfg.model {
        Model::Full => {
            let layer = LayerConfig::new(require_profile(cfg)?, require(cfg.a, "a", cfg.model)?, cfg.b0)?;
            Box::new(FullFiber::new(&layer, cfg.grid)?)
        }
        Model::Effective => Box::new(EffectiveFiber::new(&require_profile(cfg)?, cfg.b0, cfg.grid)?),
        Model::Halfplane => Box::new(HalfPlaneFiber::new(
            require(cfg.alpha, "alpha", cfg.model)?,
            cfg.b0,
            require(cfg.a, "a", cfg.model)?,
            cfg.grid,
        )?),
        Model::Transverse => Box::new(TransverseFiber::new(cfg.b0, require(cfg.a, "a", cfg.model)?, cfg.grid)?),
    };
    let bands = band_scan(op.as_ref(), &xi, cfg.k)?;
    let verdicts = flat_band_detect(&bands, cfg.flat_tol)?;
    let all_flat = verdicts.iter().all(|v| v.flat);
    let asymptotes = if cfg.match_asymptotes {
        let Some(CurveFamily::Bent { alpha_plus, alpha_minus, .. }) = cfg.profile else {
            return Err(CliError::Config("match_asymptotes needs a bent profile".into()));
        };
        let a = require(cfg.a, "a", cfg.model)?;
        Some(asymptote_match(&bands, alpha_plus, alpha_minus, cfg.b0, a, cfg.k)?)
    } else {
        None
    };
    let mut table = bands.to_table();
    table = table.with_comment(format!(
        "flat verdict (tol {}): {}",
        cfg.flat_tol,
        if all_flat { "all branches flat" } else { "not all branches flat" }
    ));
    Ok(Run {
        table,
        grid: json!(bands.grid),
        tolerances: json!({ "flat_tol": cfg.flat_tol, "residual": magband::eigensolve::RESIDUAL_TOL }),
        outputs: json!({
            "all_flat": all_flat,
            "flat": verdicts,
            "asymptotes": asymptotes,
            "sorted": bands.is_sorted(),
        }),
        certificate_failed: false,
    })
}

pub fn bottom(cfg: &BottomConfig) -> Result<Run, CliError> {
    let grid = cfg.b0.values()?;
    let curve = bottom_curve(&grid)?;
    let violations = curve.bound_violations();
    Ok(Run {
        table: curve.to_table(),
        grid: json!({ "b0": grid }),
        tolerances: json!({ "root": "machine precision" }),
        outputs: json!({ "rows": curve.samples.len(), "bound_violations": violations }),
        certificate_failed: false,
    })
}

pub fn degeneracy(cfg: &DegeneracyConfig) -> Result<Run, CliError> {
    let th = match (cfg.theta, cfg.b0, cfg.a) {
        (Some(ThetaConfig::Rational { p, q }), None, None) => Theta::rational(p, q)?,
        (Some(ThetaConfig::Irrational { value }), None, None) => Theta::AssumeIrrational { value },
        (None, Some(b0), Some(a)) => Theta::AssumeIrrational { value: theta(b0, a) },
        _ => return Err(CliError::Config("give either `theta` or both `b0` and `a`".into())),
    };
    let report = degeneracy_enumerate(th, cfg.count, cfg.eps)?;
    let mut rows = Vec::new();
    let mut all_verified = true;
    if let Theta::Rational { p, q } = report.theta {
        for c in &report.exact {
            let ok = c.verify(p, q);
            all_verified &= ok;
            rows.push(row([
                "exact".into(),
                c.m.to_string(),
                c.n.to_string(),
                c.mt.to_string(),
                c.nt.to_string(),
                "0".into(),
                "0".into(),
                ok.to_string(),
            ]));
        }
    }
    for pr in &report.near {
        let ok = pr.gap <= pr.bound;
        all_verified &= ok;
        rows.push(row([
            "near".into(),
            pr.m.to_string(),
            pr.n.to_string(),
            pr.mt.to_string(),
            pr.nt.to_string(),
            format_value(pr.gap),
            format_value(pr.bound),
            ok.to_string(),
        ]));
    }
    let table = CsvTable {
        comments: vec![format!("theta: {:?}", report.theta), "gap in units of (pi/2a)^2".into()],
        header: header(&["kind", "m", "n", "mt", "nt", "gap", "bound", "verified"]),
        rows,
    };
    Ok(Run {
        table,
        grid: Value::Null,
        tolerances: json!({ "eps": cfg.eps, "exact": "integer arithmetic" }),
        outputs: json!({ "report": report, "all_verified": all_verified }),
        certificate_failed: !all_verified,
    })
}

pub fn thin(cfg: &ThinConfig) -> Result<Run, CliError> {
    let profile = CurveProfile::new(cfg.profile)?;
    let study = thin_limit_study(&profile, cfg.b0, cfg.xi, &cfg.a, cfg.grid)?;
    let mut table = CsvTable {
        comments: vec![format!(
            "grid: L={} N_s={} N_u={} refined={}",
            study.grid.half_length, study.grid.n_s, study.grid.n_u, study.refined
        )],
        header: header(&["a", "lambda_2d", "baseline", "nu", "delta"]),
        rows: study
            .rows
            .iter()
            .map(|r| [r.a, r.lambda_2d, r.baseline, r.nu, r.delta].map(format_value).to_vec())
            .collect(),
    };
    if let Some(s) = study.slope {
        table = table.with_comment(format!("log-log slope: {}", format_value(s)));
    }
    Ok(Run {
        table,
        grid: json!(study.grid),
        tolerances: json!({ "residual": magband::eigensolve::RESIDUAL_TOL }),
        outputs: json!({ "slope": study.slope, "refined": study.refined, "warnings": study.warnings }),
        certificate_failed: false,
    })
}

pub fn iwatsuka(cfg: &IwatsukaConfig) -> Result<Run, CliError> {
    let spec = IwatsukaSpec::new(cfg.b0, cfg.b.clone(), cfg.w.clone(), cfg.alpha, cfg.x1)?;
    let validation = validate_field(&spec)?;
    let xi = cfg.xi.values()?;
    let grid = match cfg.grid {
        Some(g) => g,
        None => {
            let (lo, hi) = xi.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
            let budget = cfg.b0 * (2.0 * cfg.k as f64 + 1.0);
            let l = spec.confining_half_length(lo, hi, budget)?;
            let n = (2.0 * l / cfg.certificate.spacing).ceil() as usize;
            Grid::line(l, n).with_budget(budget)
        }
    };
    let bands = iwatsuka_bands(&spec, &xi, cfg.k, grid)?;
    let cert = nonconstancy_certificate(&spec, cfg.m, cfg.xi_large, cfg.certificate)?;
    let table = bands.to_table().with_comment(format!(
        "certificate for Landau index {}: {}",
        cert.m,
        if cert.holds { "holds" } else { "fails" }
    ));
    Ok(Run {
        table,
        grid: json!({ "scan": bands.grid, "certificate": cert.grid }),
        tolerances: json!({ "certificate": cfg.certificate, "residual": magband::eigensolve::RESIDUAL_TOL }),
        outputs: json!({ "validation": validation, "certificate": cert }),
        certificate_failed: !cert.holds,
    })
}

pub fn check(cfg: &CheckConfig) -> Result<Run, CliError> {
    let layer = LayerConfig::new(CurveProfile::new(cfg.profile)?, cfg.a, cfg.b0)?;
    let report = check_assumptions(&layer);
    let conditions = suff_condition_check(&layer.profile, cfg.b0);
    let table = CsvTable {
        comments: vec![format!(
            "kappa_sup={} v_minus_sup={} (sampled estimates)",
            format_value(report.kappa_sup),
            format_value(report.v_minus_sup)
        )],
        header: header(&["assumption", "status", "witness"]),
        rows: report
            .entries
            .iter()
            .map(|e| row([e.name.to_string(), status_name(e.status).to_string(), e.witness.clone()]))
            .collect(),
    };
    Ok(Run {
        table,
        grid: Value::Null,
        tolerances: json!({ "sampling": "estimates, not certified bounds" }),
        outputs: json!({
            "all_hold": report.all_hold(),
            "assumptions": report,
            "sufficient_conditions": conditions,
            "any_sufficient_condition": conditions.any(),
        }),
        certificate_failed: !report.all_hold(),
    })
}
