//! The subcommands as functions from inputs to a finished record.

use std::time::Instant;

use anyhow::{bail, Result};
use gravent_core::constants::Constants;
use gravent_core::decoherence as dec;
use gravent_core::design::{self, SandwichGeometry};
use gravent_core::model::eta_from_physical;
use gravent_core::units::Unit;
use gravent_core::{analytic, SystemParams};

use crate::inputs::{RunInputs, TauEntMode};
use crate::record::{RunRecord, Value};
use crate::sweep::SweepSpec;
use crate::{core_exit_code, InvalidInput, EXIT_OK};

/// A record to write and the status to exit with.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub record: RunRecord,
    pub status: u8,
}

impl Outcome {
    fn ok(record: RunRecord) -> Self {
        Self { record, status: EXIT_OK }
    }
}

fn invalid<T>(message: impl Into<String>) -> Result<T> {
    Err(InvalidInput(message.into()).into())
}

fn validated_system(inputs: &RunInputs) -> Result<SystemParams> {
    inputs.check_run_options()?;
    Ok(inputs.system()?)
}

fn run_spec(command: &str, inputs: &RunInputs, spec: SweepSpec, mut warnings: Vec<String>) -> Result<Outcome> {
    let start = Instant::now();
    let rows = spec.run()?;
    let mut record = RunRecord::new(command, inputs.clone(), &[]);
    record.columns = spec.columns();
    record.rows = rows;
    record.sweep = Some(spec);
    warnings.dedup();
    record.warnings = warnings;
    record.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(Outcome::ok(record))
}

/// Negativity and `f_gra`, `f_dec` along `tau` in `[0, tau_max]`.
pub fn trace(inputs: &RunInputs) -> Result<Outcome> {
    let system = validated_system(inputs)?;
    if inputs.steps < 2 {
        return invalid("steps must be >= 2");
    }
    if !(inputs.tau_max > 0.0 && inputs.tau_max.is_finite()) {
        return invalid("tau_max must be finite and > 0");
    }
    let mut warnings = system.warnings();
    if let Err(e) = analytic::PerturbativeCurve::for_params(&system) {
        warnings.push(format!("perturbative columns unavailable: {e}"));
    }
    run_spec("trace", inputs, SweepSpec::trace(inputs), warnings)
}

/// Negativity over the `(lambda1, lambda2)` square at `tau_max`.
pub fn contour(inputs: &RunInputs) -> Result<Outcome> {
    let system = validated_system(inputs)?;
    if inputs.grid < 2 {
        return invalid("grid must be >= 2");
    }
    run_spec("contour", inputs, SweepSpec::contour(inputs), system.warnings())
}

/// A sweep described by its own specification.
pub fn sweep(inputs: &RunInputs, spec: SweepSpec) -> Result<Outcome> {
    spec.validate()?;
    run_spec("sweep", inputs, spec, Vec::new())
}

/// Entanglement time in seconds, asymptotic and/or numeric.
pub fn tau_ent(inputs: &RunInputs) -> Result<Outcome> {
    let start = Instant::now();
    let system = validated_system(inputs)?;
    let mut record = RunRecord::new("tau-ent", inputs.clone(), &["quantity", "seconds", "tau", "error"]);
    record.warnings = system.warnings();
    let mut status = EXIT_OK;
    let mut push = |name: &str, r: gravent_core::Result<f64>, record: &mut RunRecord, priority: bool| match r {
        Ok(s) => record.rows.push(vec![
            Value::text(name),
            s.into(),
            system.tau(s).into(),
            Value::empty(),
        ]),
        Err(e) => {
            if priority || status == EXIT_OK {
                status = core_exit_code(&e);
            }
            record.rows.push(vec![
                Value::text(name),
                f64::NAN.into(),
                f64::NAN.into(),
                Value::text(e.to_string()),
            ]);
        }
    };
    if matches!(inputs.mode, TauEntMode::Asymptotic | TauEntMode::Both) {
        let r = analytic::tau_ent(&system, inputs.target_en, inputs.include_decoherence);
        push("tau_ent_asymptotic", r, &mut record, false);
    }
    if matches!(inputs.mode, TauEntMode::Numeric | TauEntMode::Both) {
        let r = analytic::tau_ent_numeric(&system, inputs.target_en);
        push("tau_ent_numeric", r, &mut record, true);
    }
    record.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(Outcome { record, status })
}

struct Report {
    record: RunRecord,
    status: u8,
}

impl Report {
    fn new(command: &str, inputs: &RunInputs) -> Self {
        Self {
            record: RunRecord::new(command, inputs.clone(), &["quantity", "value", "unit", "note"]),
            status: EXIT_OK,
        }
    }

    fn push(&mut self, name: &str, value: gravent_core::Result<f64>, unit: &str, note: &str) -> Option<f64> {
        match value {
            Ok(v) => {
                self.record
                    .rows
                    .push(vec![Value::text(name), v.into(), Value::text(unit), Value::text(note)]);
                Some(v)
            }
            Err(e) => {
                self.status = self.status.max(core_exit_code(&e));
                self.record.rows.push(vec![
                    Value::text(name),
                    f64::NAN.into(),
                    Value::text(unit),
                    Value::text(format!("error: {e}")),
                ]);
                None
            }
        }
    }

    fn verdict(&mut self, name: &str, verdict: &str, note: &str) {
        self.record.rows.push(vec![
            Value::text(name),
            Value::text(verdict),
            Value::empty(),
            Value::text(note),
        ]);
    }

    fn finish(mut self, start: Instant) -> Outcome {
        self.record.wall_clock_seconds = start.elapsed().as_secs_f64();
        Outcome {
            record: self.record,
            status: self.status,
        }
    }
}

fn missing() -> gravent_core::Result<f64> {
    Err(gravent_core::Error::InvalidState("depends on a failed quantity".into()))
}

/// Decoherence budget at the configured design point.
pub fn budget(inputs: &RunInputs) -> Result<Outcome> {
    let start = Instant::now();
    inputs.check_run_options()?;
    let c = Constants::CODATA_2018;
    let mut r = Report::new("budget", inputs);
    let omega = inputs.omega();

    let eta = r.push(
        "eta",
        inputs.physical().map(|p| eta_from_physical(&c, &p)),
        "",
        "2 G m / (omega^2 d^3)",
    );
    let env = inputs.environment();
    let mu_air = r.push("mu_air", env.clone().map(|e| dec::mu_air(&c, &e)), "", "gas collisions");
    let tau_air = r.push("tau_air", env.clone().map(|e| dec::tau_air(&c, &e)), "s", "mean time between collisions");

    let tau_ent_for = |lambda: f64| match eta {
        Some(eta) => SystemParams::symmetric(omega, lambda, eta, 0.0)
            .and_then(|s| analytic::tau_ent(&s, inputs.target_en, false)),
        None => missing(),
    };
    r.push("tau_ent_free", tau_ent_for(0.0), "s", "lambda = 0, asymptotic");
    let tau_ent = r.push("tau_ent_inverted", tau_ent_for(-1.0), "s", "lambda = -1, asymptotic");

    let p_max = match (env.clone(), tau_ent) {
        (Ok(e), Some(t)) => dec::max_pressure(&c, &e, t),
        (Err(e), _) => Err(e),
        _ => missing(),
    };
    r.push("p_max", p_max, "Pa", "pressure with tau_air = tau_ent_inverted");

    let x = inputs.detuning_ratio;
    r.push("mu_shot_detuned", dec::mu_shot_reduced(x, 1.0), "", "kappa / |detuning|");
    r.push(
        "mu_shot_detuned_exact",
        dec::mu_shot_detuned_substituted(x, 1.0),
        "",
        "(1 + x^2) / |x| with x = detuning / kappa",
    );

    let delta_x = match tau_ent {
        Some(t) => dec::wavefunction_spread(&c, inputs.mass(), omega, Unit::MegaHertz.si(inputs.omega_in_mhz), omega * t),
        None => missing(),
    };
    let delta_x = r.push("delta_x", delta_x, "m", "wavepacket width at tau_ent_inverted");

    let cavity = inputs.cavity(&c);
    let mu_hor = match (cavity, delta_x) {
        (Ok(cav), Some(dx)) => dec::mu_shot_horizontal_reduced(&c, &cav, Unit::Millimeter.si(inputs.a_lower_mm), dx),
        (Err(e), _) => Err(e),
        _ => missing(),
    };
    let mu_hor = r.push("mu_shot_horizontal", mu_hor, "", "upper-bound estimate");

    let geometry = inputs.sandwich();
    r.push(
        "omega_hor_sq_approx",
        geometry.clone().map(|g| design::horizontal_frequency_sq_approx(&c, &g)),
        "rad^2/s^2",
        "-2 P_L / (m c a_L)",
    );
    r.push(
        "omega_hor_sq",
        geometry.clone().map(|g| design::horizontal_frequency_sq(&c, &g)),
        "rad^2/s^2",
        "(2/(m c)) (P_U/a_U - P_L/a_L)",
    );
    r.push(
        "levitation_power",
        geometry.clone().map(|g| g.weight() * c.speed_of_light / 2.0),
        "W",
        "P_L - P_U needed to levitate",
    );
    r.push(
        "levitation_residual",
        geometry.clone().map(|g| design::levitation_balance(&c, &g)),
        "N",
        "m g - (2/c)(P_L - P_U)",
    );
    if let (Some(a), Some(h)) = (mu_air, mu_hor) {
        r.push("mu_total", Ok(a + h), "", "mu_air + mu_shot_horizontal");
    }

    match (mu_air, eta) {
        (Some(mu), Some(eta)) if mu < eta => r.verdict("verdict_decoherence", "pass", "mu_air < eta"),
        (Some(_), Some(_)) => r.verdict(
            "verdict_decoherence",
            "decoherence-dominated unless tau_air > tau_ent",
            "mu_air >= eta",
        ),
        _ => r.verdict("verdict_decoherence", "unknown", "missing inputs"),
    }
    match (tau_air, tau_ent) {
        (Some(a), Some(t)) if a > t => r.verdict("verdict_scattering", "pass", "tau_air > tau_ent_inverted"),
        (Some(_), Some(_)) => r.verdict("verdict_scattering", "fail", "tau_air <= tau_ent_inverted"),
        _ => r.verdict("verdict_scattering", "unknown", "missing inputs"),
    }
    Ok(r.finish(start))
}

/// Harmonic and inverted sandwich configurations sharing the lower cavity.
pub fn design_check(inputs: &RunInputs) -> Result<Outcome> {
    let start = Instant::now();
    inputs.check_run_options()?;
    let c = Constants::CODATA_2018;
    let build = |a_upper_mm: f64| {
        SandwichGeometry::balanced(
            &c,
            inputs.mass(),
            Unit::KiloWatt.si(inputs.design_power_upper_kw),
            Unit::Millimeter.si(inputs.a_lower_mm),
            Unit::Millimeter.si(a_upper_mm),
            inputs.gravity,
        )
    };
    let (harmonic, inverted) = match (build(inputs.a_upper_harmonic_mm), build(inputs.a_upper_inverted_mm)) {
        (Ok(h), Ok(i)) => (h, i),
        (Err(e), _) | (_, Err(e)) => bail!(e),
    };
    let report = design::switchability_check(&c, &harmonic, &inverted)?;
    let mut r = Report::new("design-check", inputs);
    for (label, g, omega_sq, residual) in [
        ("harmonic", &harmonic, report.harmonic_omega_sq, report.harmonic_residual),
        ("inverted", &inverted, report.inverted_omega_sq, report.inverted_residual),
    ] {
        r.push(&format!("{label}_a_upper"), Ok(g.a_upper), "m", "");
        r.push(&format!("{label}_power_lower"), Ok(g.power_lower), "W", "balanced");
        r.push(&format!("{label}_power_upper"), Ok(g.power_upper), "W", "");
        r.push(&format!("{label}_omega_hor_sq"), Ok(omega_sq), "rad^2/s^2", "direct route");
        r.push(
            &format!("{label}_omega_hor_sq_balanced"),
            Ok(design::horizontal_frequency_sq_balanced(&c, g)),
            "rad^2/s^2",
            "balance-substituted route",
        );
        r.push(
            &format!("{label}_lower_power_coefficient"),
            Ok(design::lower_power_coefficient(&c, g)),
            "rad^2/(s^2 W)",
            "",
        );
        r.push(&format!("{label}_residual"), Ok(residual), "N", "levitation residual");
    }
    let yes_no = |b: bool| if b { "true" } else { "false" };
    r.verdict("geometry_ordered", yes_no(report.geometry_ordered), "a_U1 < a_L < a_U2");
    r.verdict("switchable", yes_no(report.switchable), "signs opposite and both levitated");
    Ok(r.finish(start))
}
