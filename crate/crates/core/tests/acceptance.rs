//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinphase::interferometry::{synthesize_fringe, synthesize_stream};
use spinphase::mixed::continued_pure_phase;
use spinphase::stats::rayleigh_test;
use spinphase::{
    build_curve_default, closed_form_phase, experiment_curve, fit_fringe, measured_difference,
    measured_difference_curve, residual_map, scaling_law_residual, singularity_locus, z_precession, BeamState,
    ExperimentConfig, JumpSign, ScalingLaw, DEFAULT_TOL_ORTH,
};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn deg(x: f64) -> f64 {
    x.to_radians()
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn hemisphere_sign() -> Outcome {
    let mut worst = 0.0f64;
    for t in (10..=80).step_by(10) {
        let theta = deg(t as f64);
        for j in 1..1000 {
            let phi = PI * j as f64 / 1000.0;
            let a = closed_form_phase(theta, phi).unwrap();
            let b = closed_form_phase(PI - theta, phi).unwrap();
            check(a > 0.0, format!("phase {a} at theta {t} deg, phi {phi}"))?;
            worst = worst.max((a + b).abs());
        }
    }
    check(worst < 1e-9, format!("antisymmetry error {worst:e}"))?;
    Ok(format!("max |upper + lower| = {worst:.1e}"))
}

fn equatorial_jump() -> Outcome {
    let c = build_curve_default(PI / 2.0, 0.0, 2.0 * PI, 2000).map_err(|e| e.to_string())?;
    check(c.jumps.len() == 1, format!("{} jumps", c.jumps.len()))?;
    let j = &c.jumps[0];
    check((j.magnitude - PI).abs() < 1e-3, format!("magnitude {}", j.magnitude))?;
    check(
        !j.resolvable && j.sign == JumpSign::Unresolved,
        "jump marked resolvable",
    )?;
    Ok(format!(
        "one jump at phi = {:.6}, |magnitude - pi| = {:.1e}",
        j.phi_location,
        (j.magnitude - PI).abs()
    ))
}

fn singularity_locus_exact() -> Outcome {
    let locus = singularity_locus(PI / 2.0, 0.0, 4.0 * PI);
    check(locus == vec![PI, 3.0 * PI], format!("equator locus {locus:?}"))?;
    let mut probed = 0;
    for i in 0..=18_000 {
        let t = i as f64 / 100.0;
        if (t - 90.0).abs() < 0.01 - 1e-9 {
            continue;
        }
        probed += 1;
        let l = singularity_locus(deg(t), 0.0, 4.0 * PI);
        check(l.is_empty(), format!("theta {t} deg has locus {l:?}"))?;
    }
    Ok(format!(
        "{{pi, 3pi}} on the equator, empty at {probed} other polar angles"
    ))
}

fn difference_degeneracy() -> Outcome {
    let (a, b) = (deg(70.5), deg(109.5));
    let steps = 4000;
    let up = measured_difference_curve(a, 0.0, 4.0 * PI, steps).map_err(|e| e.to_string())?;
    let down = measured_difference_curve(b, 0.0, 4.0 * PI, steps).map_err(|e| e.to_string())?;
    let mut worst_sum = 0.0f64;
    let mut wiggles = [Vec::new(), Vec::new()];
    for (u, d) in up.samples.iter().zip(&down.samples) {
        let (pu, pd) = (u.phase.unwrap(), d.phase.unwrap());
        worst_sum = worst_sum.max((pu + pd).abs());
        wiggles[0].push(pu - u.phi);
        wiggles[1].push(pd + d.phi);
    }
    check(worst_sum < 1e-9, format!("pointwise sum {worst_sum:e}"))?;
    let per = steps / 2;
    let mut worst_mean = 0.0f64;
    let mut worst_period = 0.0f64;
    for w in &wiggles {
        for k in 0..2 {
            let s = &w[k * per..=(k + 1) * per];
            let trap = (s.iter().sum::<f64>() - (s[0] + s[per]) / 2.0) / per as f64;
            worst_mean = worst_mean.max(trap.abs());
        }
        for i in 0..=per {
            worst_period = worst_period.max((w[i] - w[i + per]).abs());
        }
    }
    check(worst_mean < 1e-6, format!("wiggle period mean {worst_mean:e}"))?;
    check(
        worst_period < 1e-9,
        format!("wiggle not 2pi-periodic: {worst_period:e}"),
    )?;
    Ok(format!(
        "sum {worst_sum:.1e}, wiggle mean {worst_mean:.1e}, periodicity {worst_period:.1e}"
    ))
}

fn full_turn() -> Outcome {
    let (a, b) = (deg(70.5), deg(109.5));
    let da = measured_difference(a, 2.0 * PI).unwrap();
    let db = measured_difference(b, 2.0 * PI).unwrap();
    check(
        (da - 2.0 * PI).abs() < 1e-9 && (db + 2.0 * PI).abs() < 1e-9,
        format!("differences {da}, {db}"),
    )?;
    for (t, want) in [(a, PI), (b, -PI)] {
        let closed = closed_form_phase(t, 2.0 * PI).unwrap();
        let evolved = continued_pure_phase(t, 2.0 * PI, DEFAULT_TOL_ORTH).map_err(|e| e.to_string())?;
        check(
            (closed - want).abs() < 1e-9 && (evolved - want).abs() < 1e-9,
            format!("phase at 2pi {closed}, {evolved}"),
        )?;
    }
    Ok(format!("differences {da:+.9}, {db:+.9}; true phases +pi, -pi"))
}

fn undecidable_from_data() -> Outcome {
    let beam = BeamState::polar(PI / 2.0, 1.0).unwrap();
    let u = z_precession(PI);
    let mut singular = 0;
    let mut phases = Vec::new();
    for seed in 0..100u64 {
        let data = synthesize_stream(&beam, &u, 16, 1e4, Some(seed), 0).map_err(|e| e.to_string())?;
        let fit = fit_fringe(&data).map_err(|e| e.to_string())?;
        singular += fit.singular as usize;
        phases.push(fit.phase_hat);
    }
    let rayleigh = rayleigh_test(&phases);

    let phis: Vec<f64> = (0..=72).map(|i| deg(5.0 * i as f64)).collect();
    let mut unresolved = 0;
    for seed in 0..100u64 {
        let config = ExperimentConfig {
            seed: Some(seed),
            mean_count: 1e4,
            ..ExperimentConfig::default()
        };
        let c = experiment_curve(PI / 2.0, &phis, &config).map_err(|e| e.to_string())?;
        let near: Vec<_> = c
            .jumps
            .iter()
            .filter(|j| (j.phi_location - PI).abs() < deg(10.0))
            .collect();
        if !near.is_empty() && near.iter().all(|j| j.sign == JumpSign::Unresolved) {
            unresolved += 1;
        }
    }
    let summary = format!(
        "singular {singular}/100, Rayleigh p = {:.3}, unresolved jump {unresolved}/100",
        rayleigh.p_value
    );
    check(
        singular >= 95 && rayleigh.p_value > 0.01 && unresolved == 100,
        summary.clone(),
    )?;
    Ok(summary)
}

fn scaling_law_critique() -> Outcome {
    let mut worst_small = 0.0f64;
    for p in [0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
        for j in 0..=10 {
            let phi = 0.001 * j as f64;
            let r =
                scaling_law_residual(0.0, p, phi, ScalingLaw::Linear, DEFAULT_TOL_ORTH).map_err(|e| e.to_string())?;
            worst_small = worst_small.max(r);
        }
    }
    check(
        worst_small < 1e-5,
        format!("small-angle linear residual {worst_small:e}"),
    )?;
    let r90 = scaling_law_residual(0.0, 0.5, PI / 2.0, ScalingLaw::Linear, DEFAULT_TOL_ORTH).unwrap();
    check((r90 - 0.1419).abs() < 1e-3, format!("linear residual at 90 deg {r90}"))?;
    let mut worst_tan = 0.0f64;
    for theta in [0.0, PI] {
        for p in [0.05, 0.25, 0.5, 0.75, 1.0] {
            for j in 0..=720 {
                let phi = deg(j as f64);
                let r = scaling_law_residual(theta, p, phi, ScalingLaw::Tangent, DEFAULT_TOL_ORTH).unwrap();
                worst_tan = worst_tan.max(r);
            }
        }
    }
    check(
        worst_tan < 1e-12,
        format!("tangent residual at the poles {worst_tan:e}"),
    )?;

    let thetas: Vec<f64> = (0..=12).map(|i| deg(15.0 * i as f64)).collect();
    let ps = [0.1, 0.25, 0.5, 0.75, 1.0];
    let phis: Vec<f64> = (0..=24).map(|i| deg(15.0 * i as f64)).collect();
    let mut csv = String::from("law,observable,theta_deg,p,phi_deg,residual\n");
    let mut rows = 0;
    for law in [ScalingLaw::Linear, ScalingLaw::Tangent] {
        for row in residual_map(&thetas, &ps, &phis, law, DEFAULT_TOL_ORTH).map_err(|e| e.to_string())? {
            let r = row
                .evaluation
                .map(|e| format!("{:.12e}", e.residual))
                .unwrap_or_default();
            writeln!(
                csv,
                "{},{},{:.4},{},{:.4},{r}",
                law.as_str(),
                row.observable.as_str(),
                row.theta.to_degrees(),
                row.p,
                row.phi.to_degrees()
            )
            .unwrap();
            rows += 1;
        }
    }
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("residual_maps.csv");
    std::fs::write(&path, csv).map_err(|e| e.to_string())?;
    Ok(format!(
        "small-angle {worst_small:.1e}, residual(0, 0.5, 90 deg) = {r90:.4}, tangent at poles {worst_tan:.1e}; {rows} map rows in {}",
        path.display()
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let mut compared = 0;
    for t in [0.0, 20.0, 45.0, 60.0, 70.5, 90.0, 109.5, 120.0, 160.0, 180.0] {
        let c = build_curve_default(deg(t), 0.0, 4.0 * PI, 1999).map_err(|e| e.to_string())?;
        for s in &c.samples {
            if let (Some(p), Some(q)) = (s.phase, closed_form_phase(c.theta, s.phi)) {
                worst = worst.max((p - q).abs());
                compared += 1;
            }
        }
    }
    check(worst < 1e-9, format!("curve deviation {worst:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_fit = 0.0f64;
    for _ in 0..100 {
        let v: f64 = rng.random_range(0.0..=1.0);
        let phase: f64 = rng.random_range(-PI..PI);
        let data = synthesize_fringe(v, phase, 16, 1e4, None, 0).map_err(|e| e.to_string())?;
        let fit = fit_fringe(&data).map_err(|e| e.to_string())?;
        let dphi = if v > 1e-6 {
            wrap(fit.phase_hat - phase).abs()
        } else {
            0.0
        };
        worst_fit = worst_fit.max((fit.visibility_hat - v).abs()).max(dphi);
    }
    check(worst_fit < 1e-9, format!("round trip error {worst_fit:e}"))?;
    Ok(format!(
        "{compared} curve samples within {worst:.1e}; 100 fringes within {worst_fit:.1e}"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("hemisphere sign", hemisphere_sign),
        ("equatorial pi jump", equatorial_jump),
        ("singularity locus", singularity_locus_exact),
        ("difference degeneracy", difference_degeneracy),
        ("full-turn difference", full_turn),
        ("singularity undecidable from data", undecidable_from_data),
        ("scaling-law critique", scaling_law_critique),
        ("oracle equivalence", oracle_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({ms} ms): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name} ({ms} ms): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
