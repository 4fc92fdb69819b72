use std::path::{Path, PathBuf};

use serde_json::Value;

use super::config::{rescale, Datum, LoadedConfig, RunConfig, CONSTANTS_ENV};
use super::output::OutputDir;
use crate::certify::{
    caloric_lower_bound, check_caloric_bound, check_p1, check_proximity_a1, check_proximity_a2, check_smallness_a4,
    forcing_integral, gronwall_envelope, verify_condition_c, write_index_csv, CaloricOptions, CertificateReport,
    PerturbedData,
};
use crate::constants::{
    assemble_bundle_with, estimate_interp_constant, fill_missing, ConstantBundle, SobolevConstantTable,
    SobolevValues,
};
use crate::solver::{difference_trajectory, integrate, Forcing, RunStatus, SolverConfig, Trajectory};
use crate::spectral::{snapshot, SpectralField};
use crate::{Error, Result};

/// Result of a command that completed its computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from(passed: bool) -> Self {
        if passed {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

pub(crate) struct Context {
    pub loaded: LoadedConfig,
    pub out: OutputDir,
}

impl Context {
    pub fn new(loaded: LoadedConfig, out: Option<PathBuf>) -> Result<Self> {
        let dir = out.unwrap_or_else(|| loaded.config.output.dir.clone());
        Ok(Context {
            out: OutputDir::create(dir)?,
            loaded,
        })
    }

    fn cfg(&self) -> &RunConfig {
        &self.loaded.config
    }

    fn base(&self) -> &Path {
        &self.loaded.base
    }

    fn stamp(&self, mut report: CertificateReport) -> CertificateReport {
        report
            .inputs
            .extra
            .insert("config_hash".into(), Value::String(self.loaded.hash.clone()));
        report.inputs.extra.insert("config".into(), self.loaded.canonical.clone());
        report
    }

    fn write_report(&mut self, name: &str, report: &CertificateReport) -> Result<()> {
        self.out.write_json(name, report)?;
        Ok(())
    }

    fn finish(&mut self, command: &str) -> Result<()> {
        let hash = self.loaded.hash.clone();
        self.out.write_sidecar(command, Some(&hash))?;
        Ok(())
    }

    fn table(&self) -> Result<SobolevConstantTable> {
        let cfg = self.cfg();
        let path = match &cfg.constants.table {
            Some(p) if p.is_absolute() => Some(p.clone()),
            Some(p) => Some(self.base().join(p)),
            None => std::env::var_os(CONSTANTS_ENV).map(PathBuf::from),
        };
        let mut table = match path {
            Some(p) if p.exists() => SobolevConstantTable::load(&p)?,
            Some(p) if cfg.constants.table.is_some() => {
                return Err(Error::invalid(format!("constant table {} does not exist", p.display())))
            }
            _ => SobolevConstantTable::new(),
        };
        fill_missing(
            &mut table,
            &SobolevValues::betas(cfg.box_spec.alpha),
            cfg.constants.budget,
            cfg.constants.seed,
            cfg.constants.safety,
        )?;
        Ok(table)
    }

    fn bundle(&self, table: &SobolevConstantTable) -> Result<ConstantBundle> {
        let cfg = self.cfg();
        let b = cfg.budget();
        let bundle = assemble_bundle_with(
            cfg.box_spec.alpha,
            cfg.box_spec.l,
            b.eps1,
            b.eps2,
            table,
            cfg.constants.variant,
        )?;
        let c_i = match (cfg.constants.c_i, cfg.constants.interp_budget) {
            (Some(c), _) => Some(c),
            (None, Some(budget)) => {
                let t = cfg.solver.as_ref().map_or(1.0, |s| s.t_end);
                let est = estimate_interp_constant(cfg.box_spec.alpha, t, budget, cfg.constants.seed)?;
                Some(est * cfg.constants.safety)
            }
            (None, None) => None,
        };
        match c_i {
            Some(c) => bundle.with_interp_constant(c),
            None => Ok(bundle),
        }
    }

    fn forcing(&self, spec: Option<&super::config::ForcingSpec>) -> Result<Forcing> {
        match spec {
            Some(f) => f.build(self.cfg().box_spec.l, self.base()),
            None => Ok(Forcing::Zero),
        }
    }

    fn datum_field(&self, d: &Datum) -> Result<SpectralField> {
        let f = d.source.build(self.cfg().box_spec.l, self.base())?;
        match d.norm_alpha {
            Some(n) => rescale(&f, n, self.cfg().box_spec.alpha),
            None => Ok(f),
        }
    }

    /// `u0` with `norm_alpha` / `a4_fraction` scaling applied.
    fn u0(&self, bundle: Option<&ConstantBundle>, forcing: &Forcing, t_end: f64) -> Result<SpectralField> {
        let d = self
            .cfg()
            .data
            .u0
            .as_ref()
            .ok_or_else(|| Error::invalid("this command needs `data.u0`"))?;
        let f = self.datum_field(d)?;
        let Some(frac) = d.a4_fraction else {
            return Ok(f);
        };
        let bundle = bundle.ok_or_else(|| Error::invalid("a4_fraction needs constants"))?;
        let alpha = self.cfg().box_spec.alpha;
        let rhs = (self.cfg().budget().nu_bar / bundle.k2).powi(2);
        let force = bundle.k4 * forcing_integral(forcing, None, t_end, alpha - 1.0)?;
        let target = frac * rhs - force;
        if !(target > 0.0) {
            return Err(Error::invalid("a4_fraction is below the forcing contribution"));
        }
        rescale(&f.leray_project(), target.sqrt(), alpha)
    }

    fn run(&self, u0: &SpectralField, forcing: &Forcing, solver: &SolverConfig) -> Result<Trajectory> {
        integrate(u0, forcing, solver, &self.cfg().box_spec)
    }
}

fn require_completed(traj: &Trajectory, what: &str) -> Result<()> {
    match &traj.status {
        RunStatus::Completed => Ok(()),
        RunStatus::NormExceeded { threshold, t } => Err(Error::Numerical(format!(
            "{what}: norm exceeded {threshold} at t = {t}"
        ))),
        RunStatus::StepFailure { t } => Err(Error::Numerical(format!("{what}: step failure at t = {t}"))),
    }
}

fn verdict(report: &CertificateReport) -> String {
    format!(
        "{:?} {} lhs={:.6e} rhs={:.6e} margin={:.6e}",
        report.criterion,
        if report.passed { "PASS" } else { "FAIL" },
        report.lhs,
        report.rhs,
        report.margin
    )
}

pub(crate) fn estimate_constants(ctx: &mut Context) -> Result<Outcome> {
    let table = ctx.table()?;
    let bundle = ctx.bundle(&table)?;
    ctx.out.write_bytes("constants.json", format!("{}\n", table.to_json()?).as_bytes())?;
    ctx.out.write_json("bundle.json", &bundle)?;
    ctx.finish("estimate-constants")?;
    println!(
        "constants: C_S = ({:.6}, {:.6}, {:.6}) K2 = {:.6e} K3 = {:.6e} K4 = {:.6e}",
        bundle.c_s.one_minus_alpha, bundle.c_s.one, bundle.c_s.alpha_minus_half, bundle.k2, bundle.k3, bundle.k4
    );
    Ok(Outcome::Pass)
}

pub(crate) fn simulate(ctx: &mut Context) -> Result<Outcome> {
    let solver = ctx.cfg().solver()?.clone();
    let forcing = ctx.forcing(ctx.cfg().data.forcing.as_ref())?;
    let needs_bundle = ctx.cfg().data.u0.as_ref().is_some_and(|d| d.a4_fraction.is_some());
    let table = needs_bundle.then(|| ctx.table()).transpose()?;
    let bundle = table.as_ref().map(|t| ctx.bundle(t)).transpose()?;
    let u0 = ctx.u0(bundle.as_ref(), &forcing, solver.t_end)?;
    let mut solver = solver;
    solver.store_snapshots |= ctx.cfg().output.snapshots;
    let traj = ctx.run(&u0, &forcing, &solver)?;
    ctx.out.write_with("trajectory.csv", |w| traj.write_csv(w))?;
    ctx.out.write_json("manifest.json", &traj.manifest(table.as_ref()))?;
    ctx.out.write_bytes("final.nscf", &snapshot::to_bytes(&traj.final_state))?;
    if ctx.cfg().output.snapshots {
        for (i, (_, f)) in traj.snapshots.iter().enumerate() {
            ctx.out
                .write_bytes(&format!("snapshots/sample_{i:06}.nscf"), &snapshot::to_bytes(f))?;
        }
    }
    ctx.finish("simulate")?;
    println!(
        "simulate: {:?} after {} steps, t = {}, |u|_alpha = {:.6e}",
        traj.status,
        traj.steps,
        traj.horizon(),
        traj.final_state.hs_norm(ctx.cfg().box_spec.alpha)
    );
    require_completed(&traj, "simulate")?;
    Ok(Outcome::Pass)
}

pub(crate) fn certify_small(ctx: &mut Context) -> Result<Outcome> {
    let t_end = ctx.cfg().t_end()?;
    let table = ctx.table()?;
    let bundle = ctx.bundle(&table)?;
    let forcing = ctx.forcing(ctx.cfg().data.forcing.as_ref())?;
    let u0 = ctx.u0(Some(&bundle), &forcing, t_end)?;
    let report = check_smallness_a4(&u0, &forcing, t_end, &bundle, &ctx.cfg().budget(), &ctx.cfg().box_spec)?;
    let report = ctx.stamp(report);
    ctx.write_report("certificate_A4.json", &report)?;
    ctx.finish("certify small")?;
    println!("{}", verdict(&report));
    Ok(Outcome::from(report.passed))
}

pub(crate) fn certify_stability(ctx: &mut Context) -> Result<Outcome> {
    let t_end = ctx.cfg().t_end()?;
    let table = ctx.table()?;
    let bundle = ctx.bundle(&table)?;
    let budget = ctx.cfg().budget();
    let forcing = ctx.forcing(ctx.cfg().data.forcing.as_ref())?;
    let g = match &ctx.cfg().data.g {
        Some(spec) => ctx.forcing(Some(spec))?,
        None => forcing.clone(),
    };
    let u0 = ctx.u0(Some(&bundle), &forcing, t_end)?;
    let mut solver = ctx.cfg().solver()?.clone();
    solver.store_snapshots = true;
    let u_traj = ctx.run(&u0, &forcing, &solver)?;
    require_completed(&u_traj, "reference run")?;

    let vd = ctx
        .cfg()
        .data
        .v0
        .clone()
        .ok_or_else(|| Error::invalid("certify stability needs `data.v0`"))?;
    let direction = ctx.datum_field(&vd)?;
    let v0 = match vd.a1_fraction {
        None => direction,
        Some(frac) => {
            let base = check_proximity_a1(&u_traj, &PerturbedData { v0: &u0, g: &g }, t_end, &bundle, &budget)?;
            let growth = base.details.get("exponent").and_then(Value::as_f64).unwrap_or(0.0).exp();
            let target = frac * base.rhs / growth - base.lhs / growth;
            let d = direction.leray_project();
            let dn = d.hs_norm_sq(ctx.cfg().box_spec.alpha);
            if !(target > 0.0 && dn > 0.0) {
                return Err(Error::invalid("a1_fraction cannot be met with this direction"));
            }
            u0.linear_combination(1.0, &d, (target / dn).sqrt())?
        }
    };
    let data = PerturbedData { v0: &v0, g: &g };
    let a1 = ctx.stamp(check_proximity_a1(&u_traj, &data, t_end, &bundle, &budget)?);
    ctx.write_report("certificate_A1.json", &a1)?;
    let mut lines = vec![verdict(&a1)];
    if bundle.c_i.is_some() {
        let a2 = ctx.stamp(check_proximity_a2(&u_traj, &data, t_end, &bundle, &budget)?);
        ctx.write_report("certificate_A2.json", &a2)?;
        lines.push(verdict(&a2));
    }
    let mut passed = a1.passed;
    if a1.passed {
        let v_traj = ctx.run(&v0, &g, &solver)?;
        let diff = difference_trajectory(&u_traj, &v_traj)?;
        let p1 = ctx.stamp(check_p1(&diff, t_end, &bundle, &budget)?);
        ctx.write_report("certificate_P1.json", &p1)?;
        let env = gronwall_envelope(&diff, &bundle, &budget, ctx.cfg().certify.gronwall_tolerance)?;
        ctx.out.write_with("gronwall.csv", |w| env.write_csv(w))?;
        ctx.out.write_json("gronwall.json", &env)?;
        ctx.out.write_with("difference.csv", |w| diff.write_csv(w))?;
        lines.push(verdict(&p1));
        lines.push(format!("envelope violations: {}", env.violations.len()));
        passed &= p1.passed;
    }
    ctx.finish("certify stability")?;
    println!("{}", lines.join("; "));
    Ok(Outcome::from(passed))
}

pub(crate) fn certify_caloric(ctx: &mut Context) -> Result<Outcome> {
    let table = ctx.table()?;
    let bundle = ctx.bundle(&table)?;
    let budget = ctx.cfg().budget();
    let spec = ctx.cfg().box_spec;
    let options = ctx.cfg().caloric.clone().unwrap_or_else(CaloricOptions::default);
    let u0 = ctx.u0(Some(&bundle), &Forcing::Zero, options.t_max)?;
    let bound = caloric_lower_bound(&u0, &spec, &bundle, &budget, options)?;
    let a3 = ctx.stamp(bound.report.clone());
    ctx.write_report("certificate_A3.json", &a3)?;
    let mut lines = vec![format!("{} T0={:.6e} k0={}", verdict(&a3), bound.t0, bound.k0)];
    let mut passed = a3.passed;
    if ctx.cfg().certify.verify_caloric_run && bound.t0 > 0.0 {
        let mut solver = match &ctx.cfg().solver {
            Some(s) => s.clone(),
            None => SolverConfig::new(u0.truncation().max(bound.k0), bound.t0 / 100.0, bound.t0),
        };
        solver.t_end = bound.t0;
        solver.caloric = true;
        solver.k0 = bound.k0;
        solver.m = solver.m.max(bound.k0);
        solver.sample_every = solver.sample_every.map(|s| s.min(bound.t0));
        let traj = ctx.run(&u0, &Forcing::Zero, &solver)?;
        require_completed(&traj, "caloric run")?;
        let rep = ctx.stamp(check_caloric_bound(&traj, &bound, &bundle, &budget)?);
        ctx.write_report("certificate_caloric_bound.json", &rep)?;
        lines.push(verdict(&rep));
        passed &= rep.passed;
    }
    ctx.finish("certify caloric")?;
    println!("{}", lines.join("; "));
    Ok(Outcome::from(passed))
}

pub(crate) fn certify_aposteriori(ctx: &mut Context) -> Result<Outcome> {
    let t_end = ctx.cfg().t_end()?;
    let table = ctx.table()?;
    let bundle = ctx.bundle(&table)?;
    let budget = ctx.cfg().budget();
    if ctx.cfg().data.forcing.as_ref().is_some_and(|f| !matches!(f, super::config::ForcingSpec::Zero)) {
        return Err(Error::invalid("certify aposteriori applies to unforced problems"));
    }
    let u0 = ctx.u0(Some(&bundle), &Forcing::Zero, t_end)?;
    let base = ctx.cfg().solver()?.clone();
    let schedule = ctx.cfg().aposteriori.schedule.clone();
    let runs = {
        use rayon::prelude::*;
        let ctx_ref = &*ctx;
        schedule
            .par_iter()
            .map(|&n| {
                let mut s = base.clone();
                s.m = n;
                s.k0 = s.k0.min(n);
                s.store_snapshots = true;
                s.caloric = false;
                ctx_ref.run(&u0, &Forcing::Zero, &s)
            })
            .collect::<Result<Vec<_>>>()?
    };
    let result = verify_condition_c(&runs, &u0, t_end, &bundle, &budget)?;
    let mut names = Vec::new();
    let mut stamped = Vec::new();
    for e in &result.entries {
        if let Some(r) = &e.report {
            let name = format!("certificate_C_n{}.json", e.n);
            let r = ctx.stamp(r.clone());
            ctx.write_report(&name, &r)?;
            names.push(name);
            stamped.push(r);
        }
    }
    let rows: Vec<(String, &CertificateReport)> = names.into_iter().zip(stamped.iter()).collect();
    ctx.out.write_with("index.csv", |w| write_index_csv(&rows, w))?;
    ctx.out.write_with("residual.csv", |w| result.write_csv(w))?;
    ctx.finish("certify aposteriori")?;
    let parts: Vec<String> = result
        .entries
        .iter()
        .map(|e| match &e.report {
            Some(r) => format!("n={} margin={:.3e}", e.n, r.margin),
            None => format!("n={} unverifiable", e.n),
        })
        .collect();
    match result.granted {
        Some(n) => println!("C PASS at n={n} ({})", parts.join(", ")),
        None => println!("C FAIL ({})", parts.join(", ")),
    }
    Ok(Outcome::from(result.granted.is_some()))
}

pub(crate) fn norms(path: &Path, orders: &[f64], p: Option<f64>) -> Result<Outcome> {
    let field = snapshot::load(path)?;
    for &s in orders {
        println!("|u|_{{{s},L}} = {:.15e}", field.hs_norm(s));
    }
    if let Some(p) = p {
        println!("|u|_{{L^{p}}} = {:.15e}", field.lp_norm(p, 4)?);
    }
    Ok(Outcome::Pass)
}

pub(crate) fn report(files: &[PathBuf], out: &Path) -> Result<Outcome> {
    if files.is_empty() {
        return Err(Error::invalid("report needs at least one certificate file"));
    }
    let mut reports = Vec::with_capacity(files.len());
    for f in files {
        let text = std::fs::read_to_string(f)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", f.display())))?;
        let r: CertificateReport = serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("{} is not a certificate: {e}", f.display())))?;
        reports.push(r);
    }
    let all_passed = reports.iter().all(|r| r.passed);
    let dir = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut od = OutputDir::create(dir)?;
    let name = out
        .file_name()
        .ok_or_else(|| Error::invalid("report output needs a file name"))?
        .to_string_lossy()
        .into_owned();
    od.write_json(
        &name,
        &serde_json::json!({ "all_passed": all_passed, "certificates": reports }),
    )?;
    let rows: Vec<(String, &CertificateReport)> = files
        .iter()
        .map(|f| f.display().to_string())
        .zip(reports.iter())
        .collect();
    let stem = Path::new(&name).file_stem().map_or("report".into(), |s| s.to_string_lossy().into_owned());
    od.write_with(&format!("{stem}_index.csv"), |w| write_index_csv(&rows, w))?;
    od.write_sidecar("report", None)?;
    println!(
        "report: {} certificates, {} passed",
        reports.len(),
        reports.iter().filter(|r| r.passed).count()
    );
    Ok(Outcome::from(all_passed))
}
