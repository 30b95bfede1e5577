use crate::args::{
    Command, Common, CritiqueArgs, CurveArgs, InterfereArgs, Law, MixedCheckArgs, Mode, SingularitiesArgs,
};
use crate::report::{num, Block, Report};
use serde_json::{json, Value};
use spinphase::{
    build_curve, closed_form_phase, experiment_curve, measured_difference_curve, phi_grid, residual_map,
    singularity_locus, ExperimentConfig, ExperimentMode, JumpEvent, PhaseError, ScalingLaw,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

const MAX_STEPS: usize = 10_000_000;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Validated grid, in radians.
struct Grid {
    thetas_deg: Vec<f64>,
    thetas: Vec<f64>,
    phi_min: f64,
    phi_max: f64,
    steps: usize,
}

impl Grid {
    fn from_common(c: &Common) -> Result<Self> {
        if c.theta_deg.is_empty() {
            return Err(usage("--theta-deg needs at least one value"));
        }
        for &t in &c.theta_deg {
            if !t.is_finite() || !(0.0..=180.0).contains(&t) {
                return Err(usage(format!("--theta-deg {t} is outside [0, 180]")));
            }
        }
        if !c.phi_min_deg.is_finite() || !c.phi_max_deg.is_finite() {
            return Err(usage("phi bounds must be finite"));
        }
        if c.phi_max_deg <= c.phi_min_deg {
            return Err(usage("--phi-max-deg must exceed --phi-min-deg"));
        }
        if c.steps == 0 || c.steps > MAX_STEPS {
            return Err(usage(format!("--steps must be in 1..={MAX_STEPS}")));
        }
        Ok(Grid {
            thetas_deg: c.theta_deg.clone(),
            thetas: c.theta_deg.iter().map(|t| t.to_radians()).collect(),
            phi_min: c.phi_min_deg.to_radians(),
            phi_max: c.phi_max_deg.to_radians(),
            steps: c.steps,
        })
    }

    fn phis(&self) -> Result<Vec<f64>> {
        Ok(phi_grid(self.phi_min, self.phi_max, self.steps)?)
    }

    fn theta_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.thetas_deg.iter().copied().zip(self.thetas.iter().copied())
    }
}

fn is_equator_deg(t: f64) -> bool {
    (t.to_radians() - std::f64::consts::FRAC_PI_2).abs() < 1e-12
}

fn config_echo<T: serde::Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("serializable arguments")
}

fn jump_fields(j: &JumpEvent<f64>) -> Vec<(&'static str, Value)> {
    vec![
        ("phi_deg", num(Some(j.phi_location.to_degrees()))),
        ("magnitude_deg", num(Some(j.magnitude.to_degrees()))),
        ("sign", json!(j.sign.as_str())),
        ("resolvable", json!(j.resolvable)),
        ("kind", json!(j.kind.as_str())),
    ]
}

/// Runs a parsed command and returns the rendered output and its destination.
pub fn run(command: &Command) -> Result<(String, Option<&std::path::Path>)> {
    let (report, common) = match command {
        Command::Curve(a) => (curve(a)?, &a.common),
        Command::Critique(a) => (critique(a)?, &a.common),
        Command::Singularities(a) => (singularities(a)?, &a.common),
        Command::MixedCheck(a) => (mixed_check(a)?, &a.common),
        Command::Interfere(a) => (interfere(a)?, &a.common),
    };
    let text = match common.format {
        crate::args::Format::Csv => report.to_csv(),
        crate::args::Format::Json => report.to_json(),
    };
    Ok((text, common.output.as_deref()))
}

fn curve(a: &CurveArgs) -> Result<Report> {
    let grid = Grid::from_common(&a.common)?;
    if !a.tol_orth.is_finite() || a.tol_orth < 0.0 {
        return Err(usage("--tol-orth must be a nonnegative number"));
    }
    let mut blocks = Vec::new();
    for (deg, theta) in grid.theta_pairs() {
        let c = build_curve(theta, grid.phi_min, grid.phi_max, grid.steps, a.tol_orth)?;
        let mut block = Block::new(vec![("theta_deg", json!(deg))]);
        for s in &c.samples {
            block.rows.push(vec![
                num(Some(s.phi.to_degrees())),
                num(s.phase.map(f64::to_degrees)),
                num(Some(s.visibility)),
                json!(s.phase.is_some()),
            ]);
        }
        block.jumps = c.jumps.iter().map(jump_fields).collect();
        blocks.push(block);
    }
    Ok(Report {
        command: "curve",
        config: config_echo(a),
        columns: &["phi_deg", "phase_deg", "visibility", "defined"],
        blocks,
    })
}

fn critique(a: &CritiqueArgs) -> Result<Report> {
    let grid = Grid::from_common(&a.common)?;
    if let Some(t) = grid.thetas_deg.iter().find(|&&t| is_equator_deg(t)) {
        return Err(usage(format!(
            "--theta-deg {t}: the difference observable is undefined on the equator"
        )));
    }
    let mut blocks = Vec::new();
    for (deg, theta) in grid.theta_pairs() {
        let mirror = std::f64::consts::PI - theta;
        let own = measured_difference_curve(theta, grid.phi_min, grid.phi_max, grid.steps)?;
        let other = measured_difference_curve(mirror, grid.phi_min, grid.phi_max, grid.steps)?;
        let mut block = Block::new(vec![
            ("theta_deg", json!(deg)),
            ("mirror_theta_deg", json!(180.0 - deg)),
        ]);
        for (s, m) in own.samples.iter().zip(&other.samples) {
            let (d, dm) = (s.phase.unwrap(), m.phase.unwrap());
            block.rows.push(vec![
                num(Some(s.phi.to_degrees())),
                num(Some(d.to_degrees())),
                num(Some(dm.to_degrees())),
                num(Some((d + dm).to_degrees())),
                num(closed_form_phase(theta, s.phi).map(f64::to_degrees)),
            ]);
        }
        blocks.push(block);
    }
    Ok(Report {
        command: "critique",
        config: config_echo(a),
        columns: &[
            "phi_deg",
            "difference_deg",
            "mirror_difference_deg",
            "sum_deg",
            "noncyclic_phase_deg",
        ],
        blocks,
    })
}

fn singularities(a: &SingularitiesArgs) -> Result<Report> {
    let grid = Grid::from_common(&a.common)?;
    let mut block = Block::new(Vec::new());
    for (deg, theta) in grid.theta_pairs() {
        for phi in singularity_locus(theta, grid.phi_min, grid.phi_max) {
            block.rows.push(vec![json!(deg), num(Some(phi.to_degrees()))]);
        }
    }
    Ok(Report {
        command: "singularities",
        config: config_echo(a),
        columns: &["theta_deg", "phi_deg"],
        blocks: vec![block],
    })
}

fn mixed_check(a: &MixedCheckArgs) -> Result<Report> {
    let grid = Grid::from_common(&a.common)?;
    if a.p.is_empty() {
        return Err(usage("--p needs at least one value"));
    }
    if let Some(p) = a.p.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(usage(format!("--p {p} is outside (0, 1]")));
    }
    let law = match a.law {
        Law::Linear => ScalingLaw::Linear,
        Law::Tangent => ScalingLaw::Tangent,
    };
    let phis = grid.phis()?;
    let rows = residual_map(&grid.thetas, &a.p, &phis, law, spinphase::DEFAULT_TOL_ORTH)?;
    let mut block = Block::new(vec![("law", json!(law.as_str()))]);
    // Rows come back in theta order, so the input degrees can be attached by index.
    let per_theta = a.p.len() * 2 * phis.len();
    for (i, r) in rows.iter().enumerate() {
        let e = r.evaluation.as_ref();
        block.rows.push(vec![
            json!(grid.thetas_deg[i / per_theta]),
            json!(r.p),
            json!(r.observable.as_str()),
            num(Some(r.phi.to_degrees())),
            num(e.map(|e| e.mixed_phase.to_degrees())),
            num(e.map(|e| e.pure_phase.to_degrees())),
            num(e.map(|e| e.predicted.to_degrees())),
            num(e.map(|e| e.residual)),
            json!(e.is_some()),
        ]);
    }
    Ok(Report {
        command: "mixed-check",
        config: config_echo(a),
        columns: &[
            "theta_deg",
            "p",
            "observable",
            "phi_deg",
            "mixed_phase_deg",
            "pure_phase_deg",
            "predicted_deg",
            "residual_rad",
            "defined",
        ],
        blocks: vec![block],
    })
}

fn interfere(a: &InterfereArgs) -> Result<Report> {
    let grid = Grid::from_common(&a.common)?;
    if !(0.0..=1.0).contains(&a.p) {
        return Err(usage(format!("--p {} is outside [0, 1]", a.p)));
    }
    if !(a.mean_count.is_finite() && a.mean_count > 0.0) {
        return Err(usage("--mean-count must be positive"));
    }
    if a.chi_count < spinphase::interferometry::MIN_SETTINGS {
        return Err(usage(format!(
            "--chi-count must be at least {}",
            spinphase::interferometry::MIN_SETTINGS
        )));
    }
    if !(a.k_sigma.is_finite() && a.k_sigma >= 0.0) {
        return Err(usage("--k-sigma must be a nonnegative number"));
    }
    let mode = match a.mode {
        Mode::Direct => ExperimentMode::Direct,
        Mode::Difference => ExperimentMode::Difference,
    };
    if mode == ExperimentMode::Difference {
        if let Some(t) = grid.thetas_deg.iter().find(|&&t| is_equator_deg(t)) {
            return Err(usage(format!(
                "--theta-deg {t}: difference mode is undefined on the equator"
            )));
        }
    }
    let config = ExperimentConfig {
        chi_count: a.chi_count,
        mean_count: a.mean_count,
        seed: a.seed,
        k_sigma: a.k_sigma,
        p: a.p,
        mode,
        strict: a.strict,
        ..ExperimentConfig::default()
    };
    let phis = grid.phis()?;
    let mut blocks = Vec::new();
    for (deg, theta) in grid.theta_pairs() {
        let c = experiment_curve(theta, &phis, &config)?;
        let mut block = Block::new(vec![("theta_deg", json!(deg))]);
        for pt in &c.points {
            block.rows.push(vec![
                num(Some(pt.phi.to_degrees())),
                num(pt.phase.map(f64::to_degrees)),
                json!(pt.phase.is_some()),
                num(Some(pt.fit.phase_hat.to_degrees())),
                num(Some(pt.fit.phase_stderr.to_degrees())),
                num(Some(pt.fit.visibility_hat)),
                num(Some(pt.fit.visibility_stderr)),
                json!(pt.fit.singular),
                num(pt.reference_fit.map(|f| f.phase_hat.to_degrees())),
            ]);
        }
        block.jumps = c.jumps.iter().map(jump_fields).collect();
        blocks.push(block);
    }
    Ok(Report {
        command: "interfere",
        config: config_echo(a),
        columns: &[
            "phi_deg",
            "phase_deg",
            "defined",
            "phase_hat_deg",
            "phase_stderr_deg",
            "visibility_hat",
            "visibility_stderr",
            "singular",
            "reference_phase_hat_deg",
        ],
        blocks,
    })
}
