//! JSON run configurations and the batch commands behind the `aether-lab`
//! binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::cell::{
    homogenized_tensor, laminate_analytic, lambda_per_report, tensor_csv, tensor_json, theta_sweep, CellGrid,
    LambdaOptions,
};
use crate::elasticity::{
    dispersion, gutierrez_tensor, iso_tensor, k_spectrum, project_onto_constraint, reference_phases, se_constant,
    vse_constant, IsotropicPhase, Tensor4,
};
use crate::elastodyn::{
    clamp, energy_series, observed_orders, simulate, wave_benchmark_with, DynOptions, Medium, VectorField,
};
use crate::elliptic::{
    check_resolution, convergence_study, de_length, resolve_m, solve_eps, solve_hom, BcMode, LoadSpec, RectDomain,
};
use crate::error::{Error, Result};
use crate::microstructure::{validate_gutierrez, Geometry, UnitCell};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Ellipticity,
    Homogenize,
    ThetaSweep,
    Dispersion,
    Solve,
    Converge,
    Wave,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ellipticity => "ellipticity",
            Command::Homogenize => "homogenize",
            Command::ThetaSweep => "theta-sweep",
            Command::Dispersion => "dispersion",
            Command::Solve => "solve",
            Command::Converge => "converge",
            Command::Wave => "wave",
        }
    }
}

/// `"P*"` or an explicit pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhasesSpec {
    Preset(String),
    Explicit { phase1: IsotropicPhase, phase2: IsotropicPhase },
}

impl Default for PhasesSpec {
    fn default() -> Self {
        PhasesSpec::Preset("P*".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct WaveSpec {
    pub m: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MediumKind {
    Homogenized,
    FixedEps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct DynamicsSpec {
    pub medium: MediumKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(deserialize_with = "de_length")]
    pub t_final: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub initial: VectorField,
    #[serde(default)]
    pub velocity: VectorField,
    /// Zero the initial data on constrained nodes.
    #[serde(default)]
    pub clamp: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

fn default_samples() -> usize {
    8
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub phases: PhasesSpec,
    /// Reset `λ₂ := −μ₁ − μ₂` before use.
    #[serde(default, skip_serializing_if = "is_false")]
    pub project: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell: Option<Geometry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<RectDomain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load: Option<LoadSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc: Option<BcMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_bar: Option<f64>,
    /// `solve`: also solve the homogenized problem.
    #[serde(default, skip_serializing_if = "is_false")]
    pub homogenized: bool,
    /// `homogenize`: also estimate `Λ_per`.
    #[serde(default, skip_serializing_if = "is_false")]
    pub lambda_per: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wave: Option<WaveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

pub const DEFAULT_K_GRID: usize = 360;
pub const DEFAULT_CELL_N: usize = 64;

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Phases after the preset lookup and optional projection.
    pub fn resolved_phases(&self) -> Result<(IsotropicPhase, IsotropicPhase)> {
        let (p1, p2) = match &self.phases {
            PhasesSpec::Preset(name) if name == "P*" => reference_phases(),
            PhasesSpec::Preset(name) => {
                return Err(Error::config("phases", format!("unknown preset `{name}` (known: \"P*\")")));
            }
            PhasesSpec::Explicit { phase1, phase2 } => (*phase1, *phase2),
        };
        for (name, p) in [("phases.phase1", &p1), ("phases.phase2", &p2)] {
            p.validate().map_err(|e| match e {
                Error::Config { message, .. } => Error::config(name, message),
                other => other,
            })?;
        }
        let p2 = if self.project { project_onto_constraint(&p1, &p2) } else { p2 };
        Ok((p1, p2))
    }

    pub fn unit_cell(&self) -> Result<UnitCell> {
        let (p1, p2) = self.resolved_phases()?;
        let g = self.cell.ok_or_else(|| Error::config("cell", "required by this command"))?;
        UnitCell::new(g, p1, p2)
    }

    fn cell_n(&self) -> usize {
        self.grid.map(|g| g.n).unwrap_or(DEFAULT_CELL_N)
    }

    fn domain(&self) -> Result<RectDomain> {
        let d = self.domain.ok_or_else(|| Error::config("domain", "required by this command"))?;
        d.validate()?;
        Ok(d)
    }

    fn load(&self) -> Result<LoadSpec> {
        let l = self.load.clone().ok_or_else(|| Error::config("load", "required by this command"))?;
        l.validate()?;
        Ok(l)
    }

    fn eps_list(&self) -> Result<Vec<f64>> {
        let e = self.eps.clone().ok_or_else(|| Error::config("eps", "required by this command"))?;
        if e.is_empty() {
            return Err(Error::config("eps", "empty list"));
        }
        if let Some(bad) = e.iter().find(|x| !(**x > 0.0 && **x <= 1.0)) {
            return Err(Error::config("eps", format!("values must lie in (0, 1], got {bad}")));
        }
        Ok(e)
    }

    /// Checks everything a command needs without solving.
    pub fn validate(&self, command: Command) -> Result<()> {
        if let Some(c) = self.command {
            if c != command {
                return Err(Error::config(
                    "command",
                    format!("config is for `{}` but `{}` was requested", c.name(), command.name()),
                ));
            }
        }
        let (p1, p2) = self.resolved_phases()?;
        match command {
            Command::Ellipticity => {}
            Command::Homogenize => {
                let cell = self.unit_cell()?;
                CellGrid::new(&cell, self.cell_n())?;
            }
            Command::ThetaSweep => {
                let t = self.thetas.as_ref().ok_or_else(|| Error::config("thetas", "required by this command"))?;
                if t.is_empty() {
                    return Err(Error::config("thetas", "empty list"));
                }
                if let Some(bad) = t.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
                    return Err(Error::config("thetas", format!("values must lie in (0, 1), got {bad}")));
                }
            }
            Command::Dispersion => {
                gutierrez_tensor(&p1, &p2)?;
                if self.k_grid == Some(0) {
                    return Err(Error::config("k-grid", "must be positive"));
                }
                self.rho_bar_for(None)?;
            }
            Command::Solve => {
                let cell = self.unit_cell()?;
                let d = self.domain()?;
                self.load()?;
                for e in self.eps_list()? {
                    check_resolution(&d, &cell, e)?;
                }
                if self.homogenized {
                    let l0 = self.cell_tensor(&cell, true)?;
                    crate::elliptic::hom_tensor(&l0, self.bc.unwrap_or(BcMode::FullDirichlet))?;
                }
            }
            Command::Converge => {
                let cell = self.unit_cell()?;
                let d = self.domain()?;
                self.load()?;
                let e = self.eps_list()?;
                if e.windows(2).any(|w| !(w[1] < w[0])) {
                    return Err(Error::config("eps", "must be strictly decreasing"));
                }
                for x in e {
                    resolve_m(&d, &cell, x)?;
                }
                if let Geometry::Disk { .. } = cell.geometry {
                    CellGrid::new(&cell, self.cell_n())?;
                }
            }
            Command::Wave => match &self.dynamics {
                None => {
                    gutierrez_tensor(&p1, &p2)?;
                    let ms = self.wave_ms();
                    if let Some(bad) = ms.iter().find(|m| **m < 8) {
                        return Err(Error::config("wave.m", format!("must be at least 8, got {bad}")));
                    }
                }
                Some(dy) => {
                    let cell = self.unit_cell()?;
                    let d = self.domain()?;
                    if !(dy.t_final > 0.0) {
                        return Err(Error::config("dynamics.t-final", "must be positive"));
                    }
                    if dy.samples == 0 {
                        return Err(Error::config("dynamics.samples", "must be positive"));
                    }
                    let bc = self.bc.unwrap_or(BcMode::FullDirichlet);
                    match dy.medium {
                        MediumKind::FixedEps => {
                            let eps = dy.eps.ok_or_else(|| Error::config("dynamics.eps", "required for fixed-eps"))?;
                            crate::elastodyn::Stepper::new(&d, &Medium::FixedEps { cell, eps }, bc, 1.0)?;
                        }
                        MediumKind::Homogenized => {
                            let l0 = self.cell_tensor(&cell, true)?;
                            crate::elliptic::hom_tensor(&l0, bc)?;
                            self.rho_bar_for(Some(&cell))?;
                        }
                    }
                }
            },
        }
        Ok(())
    }

    fn wave_ms(&self) -> Vec<usize> {
        self.wave.as_ref().map(|w| w.m.clone()).unwrap_or_else(|| vec![32, 64, 128])
    }

    fn rho_bar_for(&self, cell: Option<&UnitCell>) -> Result<f64> {
        let r = match (self.rho_bar, cell) {
            (Some(r), _) => r,
            (None, Some(c)) => {
                let t = crate::microstructure::volume_fraction(c);
                t * c.phase1.rho + (1.0 - t) * c.phase2.rho
            }
            (None, None) => {
                let (p1, p2) = self.resolved_phases()?;
                0.5 * (p1.rho + p2.rho)
            }
        };
        if !(r > 0.0) {
            return Err(Error::config("rho-bar", format!("must be positive, got {r}")));
        }
        Ok(r)
    }

    /// Homogenized tensor of the configured cell. With `cheap` set, layered
    /// cells use the closed form and no solve happens.
    fn cell_tensor(&self, cell: &UnitCell, cheap: bool) -> Result<Tensor4> {
        match cell.geometry {
            Geometry::Layers { theta, normal } => laminate_analytic(&cell.phase1, &cell.phase2, theta, normal),
            Geometry::Disk { .. } if cheap => {
                CellGrid::new(cell, self.cell_n())?;
                Ok(Tensor4::zero())
            }
            Geometry::Disk { .. } => homogenized_tensor(cell, &CellGrid::new(cell, self.cell_n())?),
        }
    }
}

/// Output files collected in memory and written only after every solve
/// finished.
struct Outputs {
    header: String,
    files: Vec<(String, String)>,
}

impl Outputs {
    fn new(cfg: &RunConfig, command: Command) -> Result<Self> {
        let mut header = String::new();
        writeln!(header, "# aether-lab {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(header, "# command: {}", command.name()).unwrap();
        if let Ok((p1, p2)) = cfg.resolved_phases() {
            for (n, p) in [("phase1", p1), ("phase2", p2)] {
                writeln!(header, "# {n}: lambda={} mu={} rho={}", p.lambda, p.mu, p.rho).unwrap();
            }
        }
        writeln!(header, "# config: {}", cfg.to_json()).unwrap();
        Ok(Outputs { header, files: vec![] })
    }

    fn csv(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), format!("{}{}", self.header, body)));
    }

    fn raw(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body));
    }

    fn write(self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut out = vec![];
        for (name, body) in self.files {
            let p = dir.join(name);
            fs::write(&p, body)?;
            out.push(p);
        }
        Ok(out)
    }
}

/// Parses the `# config:` line of an output file header.
pub fn config_from_header(text: &str) -> Result<RunConfig> {
    let line = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# config: "))
        .ok_or_else(|| Error::config("header", "no `# config:` line"))?;
    RunConfig::from_json(line)
}

/// Config recorded in a JSON output under the `"#config"` key.
pub fn config_from_json_output(text: &str) -> Result<RunConfig> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    let c = v.get("#config").ok_or_else(|| Error::config("#config", "missing"))?;
    Ok(serde_json::from_value(c.clone())?)
}

fn f(x: f64) -> String {
    format!("{x:.17e}")
}

/// Validates, runs, and writes every output of `command` into `dir`. Nothing
/// is written when validation or a solve fails.
pub fn run(command: Command, cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate(command)?;
    let mut out = Outputs::new(cfg, command)?;
    let (p1, p2) = cfg.resolved_phases()?;
    match command {
        Command::Ellipticity => {
            let mut s = String::from("object,vse_raw,vse_normalized,se_constant\n");
            let mut row = |name: &str, t: &Tensor4| {
                let v = vse_constant(t);
                writeln!(s, "{name},{},{},{}", f(v), f(0.5 * v), f(se_constant(t))).unwrap();
            };
            row("phase1", &iso_tensor(&p1));
            row("phase2", &iso_tensor(&p2));
            if let Ok((g, _)) = gutierrez_tensor(&p1, &p2) {
                row("gutierrez", &g);
            }
            out.csv("ellipticity.csv", s);
            let cell = UnitCell {
                geometry: Geometry::Layers { theta: 0.5, normal: 1 },
                phase1: p1,
                phase2: p2,
            };
            let rep = validate_gutierrez(&cell);
            let mut s = String::from("condition,passed,residual\n");
            for c in &rep.hypothesis.conditions {
                writeln!(s, "\"{}\",{},{}", c.name, c.passed, f(c.residual)).unwrap();
            }
            out.csv("hypothesis.csv", s);
            let mut s = String::from("phase,dilatation,rotation,shear\n");
            for (n, p) in [("phase1", p1), ("phase2", p2)] {
                let k = k_spectrum(&p, p1.mu);
                writeln!(s, "{n},{},{},{}", f(k.dilatation), f(k.rotation), f(k.shear)).unwrap();
            }
            out.csv("k_spectrum.csv", s);
        }
        Command::Homogenize => {
            let cell = cfg.unit_cell()?;
            let grid = CellGrid::new(&cell, cfg.cell_n())?;
            let l0 = homogenized_tensor(&cell, &grid)?;
            let mut j = tensor_json(&l0);
            j.as_object_mut()
                .unwrap()
                .insert("#config".into(), serde_json::to_value(cfg)?);
            out.raw("l0.json", serde_json::to_string_pretty(&j)? + "\n");
            out.csv("l0.csv", tensor_csv(&l0));
            let mut s = String::from("quantity,value\n");
            writeln!(s, "se_constant,{}", f(se_constant(&l0))).unwrap();
            writeln!(s, "vse_raw,{}", f(vse_constant(&l0))).unwrap();
            if let Geometry::Layers { theta, normal } = cell.geometry {
                let la = laminate_analytic(&p1, &p2, theta, normal)?;
                writeln!(s, "max_deviation_from_laminate,{}", f((l0 - la).matrix().amax())).unwrap();
            }
            if cfg.lambda_per {
                let r = lambda_per_report(&cell, &grid, LambdaOptions::default())?;
                writeln!(s, "lambda_per,{}", f(r.value)).unwrap();
            }
            out.csv("summary.csv", s);
        }
        Command::ThetaSweep => {
            let sw = theta_sweep(&p1, &p2, cfg.thetas.as_deref().unwrap_or(&[]))?;
            out.csv("theta_sweep.csv", sw.to_csv());
        }
        Command::Dispersion => {
            let (_, g) = gutierrez_tensor(&p1, &p2)?;
            let rho = cfg.rho_bar_for(None)?;
            let n = cfg.k_grid.unwrap_or(DEFAULT_K_GRID);
            let mut s = String::from("angle,k1,k2,omega1,omega2,eta1_1,eta1_2,eta2_1,eta2_2,zero_mode,negative_mode\n");
            for i in 0..n {
                let deg = 360.0 * i as f64 / n as f64;
                let a = deg.to_radians();
                let k = Vector2::new(a.cos(), a.sin());
                let d = dispersion(&g, rho, &k)?;
                let [m1, m2] = &d.modes;
                writeln!(
                    s,
                    "{deg},{},{},{},{},{},{},{},{},{},{}",
                    f(k[0]),
                    f(k[1]),
                    f(m1.omega),
                    f(m2.omega),
                    f(m1.eta[0]),
                    f(m1.eta[1]),
                    f(m2.eta[0]),
                    f(m2.eta[1]),
                    d.zero_mode,
                    d.negative_mode
                )
                .unwrap();
            }
            out.csv("dispersion.csv", s);
        }
        Command::Solve => {
            let cell = cfg.unit_cell()?;
            let d = cfg.domain()?;
            let load = cfg.load()?;
            let mut s = String::from("eps,dofs,energy,iterations\n");
            for (i, eps) in cfg.eps_list()?.into_iter().enumerate() {
                let sol = solve_eps(&d, &cell, eps, &load)?;
                writeln!(s, "{eps},{},{},{}", sol.dofs, f(sol.energy), sol.iterations).unwrap();
                out.csv(&format!("field_eps_{i}.csv"), sol.field.to_csv());
            }
            out.csv("solve.csv", s);
            if cfg.homogenized {
                let l0 = cfg.cell_tensor(&cell, false)?;
                let bc = cfg.bc.unwrap_or(BcMode::FullDirichlet);
                let sol = solve_hom(&d, &l0, load.a.mean(&cell), load.b.mean(&cell), &load, bc)?;
                let s = format!("dofs,energy,iterations\n{},{},{}\n", sol.dofs, f(sol.energy), sol.iterations);
                out.csv("solve_hom.csv", s);
                out.csv("field_hom.csv", sol.field.to_csv());
            }
        }
        Command::Converge => {
            let cell = cfg.unit_cell()?;
            let t = convergence_study(&cfg.domain()?, &cell, &cfg.load()?, &cfg.eps_list()?, cfg.cell_n())?;
            out.csv("converge.csv", t.to_csv());
            let mut s = String::from("eps_from,eps_to,order\n");
            for (w, o) in t.rows.windows(2).zip(&t.orders) {
                writeln!(s, "{},{},{}", w[0].eps, w[1].eps, f(*o)).unwrap();
            }
            out.csv("converge_orders.csv", s);
        }
        Command::Wave => match &cfg.dynamics {
            None => {
                let (l0, _) = gutierrez_tensor(&p1, &p2)?;
                let rho = cfg.rho_bar_for(None)?;
                let reps = cfg
                    .wave_ms()
                    .into_iter()
                    .map(|m| wave_benchmark_with(m, &l0, rho, DynOptions::default()))
                    .collect::<Result<Vec<_>>>()?;
                let mut s = String::from("m,dt,steps,max_rel_error,energy_drift,u1_ratio\n");
                for r in &reps {
                    writeln!(s, "{},{},{},{},{},{}", r.m, f(r.dt), r.steps, f(r.max_rel_error), f(r.energy_drift), f(r.u1_ratio))
                        .unwrap();
                }
                out.csv("benchmark.csv", s);
                let mut s = String::from("m_from,m_to,order\n");
                for (w, o) in reps.windows(2).zip(observed_orders(&reps)) {
                    writeln!(s, "{},{},{}", w[0].m, w[1].m, f(o)).unwrap();
                }
                out.csv("benchmark_orders.csv", s);
                if let Some(r) = reps.last() {
                    let mut s = String::from("t,rel_error,u1_norm,u2_norm\n");
                    for x in &r.samples {
                        writeln!(s, "{},{},{},{}", f(x.t), f(x.rel_error), f(x.u1_norm), f(x.u2_norm)).unwrap();
                    }
                    out.csv("benchmark_samples.csv", s);
                }
            }
            Some(dy) => {
                let cell = cfg.unit_cell()?;
                let d = cfg.domain()?;
                let bc = cfg.bc.unwrap_or(BcMode::FullDirichlet);
                let medium = match dy.medium {
                    MediumKind::FixedEps => Medium::FixedEps {
                        cell,
                        eps: dy.eps.unwrap_or(1.0),
                    },
                    MediumKind::Homogenized => Medium::Homogenized {
                        l0: cfg.cell_tensor(&cell, false)?,
                        rho_bar: cfg.rho_bar_for(Some(&cell))?,
                    },
                };
                let grid = d.grid();
                let dofs = bc.dofs(&grid);
                let (mut u0, mut v0) = (dy.initial.sample(grid), dy.velocity.sample(grid));
                if dy.clamp {
                    u0 = clamp(&u0, &dofs);
                    v0 = clamp(&v0, &dofs);
                }
                let opts = DynOptions {
                    dt: dy.dt,
                    samples: dy.samples,
                };
                let traj = simulate(&d, &medium, bc, &u0, &v0, dy.t_final, opts)?;
                let es = energy_series(&traj);
                out.csv("energy.csv", es.to_csv());
                for (i, s) in traj.snapshots.iter().enumerate() {
                    out.csv(&format!("snapshot_{i:03}.csv"), format!("# t: {}\n{}", s.t, s.u.to_csv()));
                }
                let s = format!(
                    "dt,steps,c_max,energy_drift\n{},{},{},{}\n",
                    f(traj.dt),
                    traj.steps,
                    f(traj.c_max),
                    f(es.drift)
                );
                out.csv("wave.csv", s);
            }
        },
    }
    out.write(dir)
}

/// Human-readable validation report for `--check`.
pub fn check_report(command: Command, cfg: &RunConfig) -> Result<String> {
    cfg.validate(command)?;
    let (p1, p2) = cfg.resolved_phases()?;
    let mut s = format!("config valid for `{}`\n", command.name());
    let h = crate::elasticity::check_hypothesis(&p1, &p2);
    for c in &h.conditions {
        writeln!(s, "  [{}] {} (residual {:.3e})", if c.passed { "ok" } else { "FAIL" }, c.name, c.residual).unwrap();
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let e = RunConfig::from_json(r#"{"phases": "P*", "bogus": 1}"#).unwrap_err();
        assert!(e.is_config());
        assert!(e.to_string().contains("bogus"));
    }

    #[test]
    fn round_trip() {
        let text = r#"{
            "command": "converge",
            "phases": {"phase1": {"lambda": 1, "mu": 1}, "phase2": {"lambda": -3, "mu": 2, "rho": 2}},
            "cell": {"geometry": "layers", "theta": 0.5},
            "domain": {"a": 1, "b": "1", "m": 32},
            "eps": [0.25, 0.125],
            "load": {"f1": [{"kind": "trig", "x": "sin", "j": 3.14, "y": "sin", "k": 3.14}]}
        }"#;
        let c = RunConfig::from_json(text).unwrap();
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn presets_and_projection() {
        let c = RunConfig::from_json(r#"{"phases": "P*"}"#).unwrap();
        assert_eq!(c.resolved_phases().unwrap(), reference_phases());
        let c = RunConfig::from_json(r#"{"phases": "Q"}"#).unwrap();
        assert!(c.resolved_phases().unwrap_err().is_config());
        let c = RunConfig::from_json(
            r#"{"phases": {"phase1": {"lambda": 1, "mu": 1}, "phase2": {"lambda": -2.9, "mu": 2}}, "project": true}"#,
        )
        .unwrap();
        assert_eq!(c.resolved_phases().unwrap().1.lambda, -3.0);
    }

    #[test]
    fn command_mismatch() {
        let c = RunConfig::from_json(r#"{"command": "wave"}"#).unwrap();
        let e = c.validate(Command::Dispersion).unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "command"));
    }

    #[test]
    fn missing_fields_named() {
        let c = RunConfig::from_json(r#"{"cell": {"geometry": "layers", "theta": 0.5}}"#).unwrap();
        match c.validate(Command::Solve).unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "domain"),
            e => panic!("{e}"),
        }
    }
}
