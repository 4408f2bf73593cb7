//! Configuration, CSV output and command dispatch.
//!
//! The configuration is a flat text file of `group.key = value` lines.
//! `#` starts a comment, and several assignments may share a line when
//! separated by commas. Unknown keys are errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::direct_scattering::{reflection, scattering_data, ReflectionData, ScatteringData};
use crate::error::{Error, Result};
use crate::evolution::evolve_scattering;
use crate::model::{
    build_grids, gate_functional, relative_l2, Potential, SpatialGrid, SpectralGrid, C64,
};
use crate::pde_oracle::{self, OracleConfig, OracleState};
use crate::reconstruction::{cubic_spline, ist_solve, IstOptions, IstSolution};
use crate::rh_solver::SolverOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialCondition {
    Gaussian,
    Sech,
    SamplesFile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub grid_n: usize,
    pub grid_l: f64,
    pub spectral_m: usize,
    pub spectral_z: f64,
    pub ic_type: InitialCondition,
    pub ic_amplitude: f64,
    pub ic_width: f64,
    pub ic_center: f64,
    /// Samples for `ic.type = samples_file`: CSV with columns `x, re_u, im_u`.
    pub ic_file: Option<PathBuf>,
    pub time_t: f64,
    pub time_dt: f64,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    pub output_dir: PathBuf,
    pub output_nx_stride: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            grid_n: 2048,
            grid_l: 12.0,
            spectral_m: 2048,
            spectral_z: 24.0,
            ic_type: InitialCondition::Gaussian,
            ic_amplitude: 0.095,
            ic_width: 1.0,
            ic_center: 0.0,
            ic_file: None,
            time_t: 0.0,
            time_dt: 1e-4,
            solver_tol: 1e-10,
            solver_max_iter: 200,
            output_dir: PathBuf::from("out"),
            output_nx_stride: 8,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("malformed value for {key}: {value:?}")))
}

fn finite(key: &str, value: &str) -> Result<f64> {
    let v: f64 = parse_value(key, value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{key} must be finite, got {value}")))
    }
}

impl Config {
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let pieces: Vec<&str> = if line.split(',').all(|p| p.contains('=')) {
                line.split(',').collect()
            } else {
                vec![line]
            };
            for piece in pieces {
                let (key, value) = piece.split_once('=').ok_or_else(|| {
                    Error::Config(format!(
                        "line {}: expected key = value, got {raw:?}",
                        lineno + 1
                    ))
                })?;
                cfg.set(key.trim(), value.trim())?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "grid.N" => self.grid_n = parse_value(key, value)?,
            "grid.L" => self.grid_l = finite(key, value)?,
            "spectral.M" => self.spectral_m = parse_value(key, value)?,
            "spectral.Z" => self.spectral_z = finite(key, value)?,
            "ic.type" => {
                self.ic_type = match value {
                    "gaussian" => InitialCondition::Gaussian,
                    "sech" => InitialCondition::Sech,
                    "samples_file" => InitialCondition::SamplesFile,
                    _ => return Err(Error::Config(format!("unknown ic.type {value:?}"))),
                }
            }
            "ic.amplitude" => self.ic_amplitude = finite(key, value)?,
            "ic.width" => self.ic_width = finite(key, value)?,
            "ic.center" => self.ic_center = finite(key, value)?,
            "ic.file" => self.ic_file = Some(PathBuf::from(value)),
            "time.t" => self.time_t = finite(key, value)?,
            "time.dt" => self.time_dt = finite(key, value)?,
            "solver.tol" => self.solver_tol = finite(key, value)?,
            "solver.max_iter" => self.solver_max_iter = parse_value(key, value)?,
            "output.dir" => self.output_dir = PathBuf::from(value),
            "output.nx_stride" => self.output_nx_stride = parse_value(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        build_grids(self.grid_n, self.grid_l, self.spectral_m, self.spectral_z)?;
        let bad = |m: String| Err(Error::Config(m));
        if self.output_nx_stride == 0 || !self.grid_n.is_multiple_of(self.output_nx_stride) {
            return bad(format!(
                "output.nx_stride {} must divide grid.N {}",
                self.output_nx_stride, self.grid_n
            ));
        }
        if self.ic_width <= 0.0 {
            return bad(format!("ic.width must be positive, got {}", self.ic_width));
        }
        if self.time_t < 0.0 {
            return bad(format!("time.t must be nonnegative, got {}", self.time_t));
        }
        if self.time_dt <= 0.0 {
            return bad(format!("time.dt must be positive, got {}", self.time_dt));
        }
        if self.solver_tol <= 0.0 {
            return bad(format!(
                "solver.tol must be positive, got {}",
                self.solver_tol
            ));
        }
        if self.solver_max_iter == 0 {
            return bad("solver.max_iter must be at least 1".into());
        }
        if self.ic_type == InitialCondition::SamplesFile && self.ic_file.is_none() {
            return bad("ic.type = samples_file needs ic.file".into());
        }
        Ok(())
    }

    pub fn grids(&self) -> (SpatialGrid, SpectralGrid) {
        build_grids(self.grid_n, self.grid_l, self.spectral_m, self.spectral_z)
            .expect("validated config")
    }

    pub fn ist_options(&self) -> IstOptions {
        IstOptions {
            solver: SolverOptions {
                tol: self.solver_tol,
                max_iter: self.solver_max_iter,
            },
            nx_stride: self.output_nx_stride,
            ..IstOptions::default()
        }
    }

    pub fn oracle_config(&self) -> OracleConfig {
        OracleConfig {
            dt: self.time_dt,
            ..OracleConfig::default()
        }
    }

    pub fn initial_potential(&self) -> Result<Potential> {
        let (grid, _) = self.grids();
        match self.ic_type {
            InitialCondition::Gaussian => Ok(Potential::gaussian(
                grid,
                self.ic_amplitude,
                self.ic_width,
                self.ic_center,
            )),
            InitialCondition::Sech => Ok(Potential::sech(
                grid,
                self.ic_amplitude,
                self.ic_width,
                self.ic_center,
            )),
            InitialCondition::SamplesFile => {
                read_samples(self.ic_file.as_deref().expect("validated"), grid)
            }
        }
    }
}

fn read_samples(path: &Path, grid: SpatialGrid) -> Result<Potential> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut u = Vec::with_capacity(grid.n);
    for (k, line) in text
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .enumerate()
    {
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() < 3 {
            return Err(Error::Config(format!(
                "{}: row {} has fewer than 3 columns",
                path.display(),
                k + 1
            )));
        }
        let x: f64 = parse_value("x", cols[0])?;
        if k < grid.n && (x - grid.x(k)).abs() > 1e-9 * grid.l {
            return Err(Error::Config(format!(
                "{}: row {} is at x = {x}, grid has {}",
                path.display(),
                k + 1,
                grid.x(k)
            )));
        }
        u.push(C64::new(
            parse_value("re_u", cols[1])?,
            parse_value("im_u", cols[2])?,
        ));
    }
    if u.len() != grid.n {
        return Err(Error::Config(format!(
            "{}: {} samples for grid.N = {}",
            path.display(),
            u.len(),
            grid.n
        )));
    }
    Potential::new(grid, u).map_err(|e| Error::Config(e.to_string()))
}

/// 17 significant digits in scientific notation.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut s = String::new();
    s.push_str(header);
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, s)?;
    Ok(())
}

pub const SCATTERING_HEADER: &str =
    "z,re_a,im_a,re_d,im_d,re_B2,im_B2,re_C2,im_C2,re_r_plus,im_r_plus,re_r_minus,im_r_minus";
pub const SOLUTION_HEADER: &str = "x,re_u,im_u,abs_u,re_w,im_w";
pub const ORACLE_HEADER: &str = "x,re_u,im_u,abs_u";
pub const COMPARE_HEADER: &str = "x,abs_u_ist,abs_u_oracle,abs_difference";
pub const RH_DIAG_HEADER: &str = "x,flavor,iterations,residual";

pub fn write_scattering(path: &Path, sd: &ScatteringData, r: &ReflectionData) -> Result<()> {
    let rows = (0..sd.z.len()).map(|k| {
        let mut row = vec![fmt_num(sd.z[k])];
        for c in [
            sd.a[k],
            sd.d[k],
            sd.b2[k],
            sd.c2[k],
            r.r_plus[k],
            r.r_minus[k],
        ] {
            row.push(fmt_num(c.re));
            row.push(fmt_num(c.im));
        }
        row
    });
    write_csv(path, SCATTERING_HEADER, rows)
}

pub fn write_solution(path: &Path, sol: &IstSolution) -> Result<()> {
    let rows = (0..sol.x.len()).map(|j| {
        let (u, w) = (sol.u[j], sol.w[j]);
        vec![sol.x[j], u.re, u.im, u.norm(), w.re, w.im]
            .into_iter()
            .map(fmt_num)
            .collect()
    });
    write_csv(path, SOLUTION_HEADER, rows)
}

pub fn write_rh_diag(path: &Path, sol: &IstSolution) -> Result<()> {
    let rows = sol.diagnostics().map(|(x, flavor, it, res)| {
        vec![
            fmt_num(x),
            flavor.name().to_string(),
            it.to_string(),
            fmt_num(res),
        ]
    });
    write_csv(path, RH_DIAG_HEADER, rows)
}

pub fn write_oracle(path: &Path, st: &OracleState) -> Result<()> {
    let x = st.grid.nodes();
    let rows = (0..x.len()).map(|j| {
        let u = st.u[j];
        vec![x[j], u.re, u.im, u.norm()]
            .into_iter()
            .map(fmt_num)
            .collect()
    });
    write_csv(path, ORACLE_HEADER, rows)
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub x: Vec<f64>,
    pub ist: Vec<C64>,
    pub oracle: Vec<C64>,
    pub relative_l2: f64,
}

/// Spline-upsamples the IST solution to the full spatial grid and compares
/// it with the oracle.
pub fn compare_solutions(sol: &IstSolution, st: &OracleState) -> Comparison {
    let x = st.grid.nodes();
    let ist = cubic_spline(&sol.x, &sol.u, &x);
    let relative_l2 = relative_l2(&ist, &st.u);
    Comparison {
        x,
        ist,
        oracle: st.u.clone(),
        relative_l2,
    }
}

pub fn write_compare(path: &Path, c: &Comparison) -> Result<()> {
    let rows = (0..c.x.len()).map(|j| {
        let (a, b) = (c.ist[j], c.oracle[j]);
        vec![c.x[j], a.norm(), b.norm(), (a - b).norm()]
            .into_iter()
            .map(fmt_num)
            .collect()
    });
    write_csv(path, COMPARE_HEADER, rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Scatter,
    Evolve,
    Solve,
    Oracle,
    Compare,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "check" => Command::Check,
            "scatter" => Command::Scatter,
            "evolve" => Command::Evolve,
            "solve" => Command::Solve,
            "oracle" => Command::Oracle,
            "compare" => Command::Compare,
            _ => return Err(Error::Config(format!("unknown command {s:?}"))),
        })
    }
}

fn scattering_report(sd: &ScatteringData, r: &ReflectionData) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "unimodularity_defect = {:.3e}",
        sd.unimodularity_defect()
    );
    let _ = writeln!(s, "symmetry_defect = {:.3e}", sd.symmetry_defect());
    let _ = writeln!(s, "min_abs_a = {:.6}", sd.min_abs_a());
    let _ = writeln!(s, "sup_b = {:.6}", sd.sup_b());
    let _ = writeln!(s, "sup_r1 = {:.6}", r.sup_r1);
    let _ = writeln!(s, "sup_r2 = {:.6}", r.sup_r2);
    s
}

/// Runs one command, writing a human-readable report to `out`.
pub fn dispatch(cmd: Command, cfg: &Config, out: &mut dyn Write) -> Result<()> {
    let (_, zgrid) = cfg.grids();
    let u0 = cfg.initial_potential()?;
    let dir = &cfg.output_dir;
    match cmd {
        Command::Check => {
            let gate = gate_functional(&u0);
            writeln!(out, "gate_value = {:.10}", gate.value)?;
            writeln!(out, "gate_threshold = {}", gate.threshold)?;
            writeln!(out, "gate_pass = {}", gate.pass)?;
            if !gate.pass {
                return Err(Error::GateFailed {
                    value: gate.value,
                    threshold: gate.threshold,
                });
            }
            let sd = scattering_data(&u0, &zgrid);
            let r = reflection(&sd)?;
            write!(out, "{}", scattering_report(&sd, &r))?;
        }
        Command::Scatter | Command::Evolve => {
            let t = if cmd == Command::Evolve {
                cfg.time_t
            } else {
                0.0
            };
            let sd = evolve_scattering(&scattering_data(&u0, &zgrid), t);
            let r = reflection(&sd)?;
            let path = dir.join("scattering.csv");
            write_scattering(&path, &sd, &r)?;
            writeln!(out, "t = {t}")?;
            write!(out, "{}", scattering_report(&sd, &r))?;
            writeln!(out, "wrote {}", path.display())?;
        }
        Command::Solve => {
            let sol = ist_solve(&u0, cfg.time_t, &zgrid, &cfg.ist_options())?;
            for w in &sol.warnings {
                writeln!(out, "warning: {w}")?;
            }
            write_solution(&dir.join("solution.csv"), &sol)?;
            write_rh_diag(&dir.join("rh_diag.csv"), &sol)?;
            let worst = sol.pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
            writeln!(out, "t = {}", sol.t)?;
            writeln!(out, "max_rh_residual = {worst:.3e}")?;
            writeln!(out, "unwind_iterations = {}", sol.unwind_iterations)?;
            writeln!(out, "wrote {}", dir.join("solution.csv").display())?;
        }
        Command::Oracle => {
            let st = pde_oracle::run(&u0, cfg.time_t, &cfg.oracle_config())?;
            let path = dir.join("oracle.csv");
            write_oracle(&path, &st)?;
            let m0 = pde_oracle::nonlocal_mass(&u0.grid, &u0.u);
            let mt = pde_oracle::nonlocal_mass(&st.grid, &st.u);
            writeln!(out, "t = {}", st.t)?;
            writeln!(
                out,
                "nonlocal_mass_drift = {:.3e}",
                (mt - m0).norm() / m0.norm().max(f64::MIN_POSITIVE)
            )?;
            writeln!(out, "wrote {}", path.display())?;
        }
        Command::Compare => {
            let sol = ist_solve(&u0, cfg.time_t, &zgrid, &cfg.ist_options())?;
            let st = pde_oracle::run(&u0, cfg.time_t, &cfg.oracle_config())?;
            let c = compare_solutions(&sol, &st);
            write_compare(&dir.join("compare.csv"), &c)?;
            writeln!(
                out,
                "t = {} relative_l2 = {:.6e}",
                cfg.time_t, c.relative_l2
            )?;
        }
    }
    Ok(())
}
