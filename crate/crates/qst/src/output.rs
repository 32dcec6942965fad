//! CSV serialization and all-or-nothing output writing.
//!
//! Numbers are printed with 17 significant digits so every value reads back
//! to the same double.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use qst_core::dynamics::SimResult;
use qst_core::optimize::{OptimizationResult, ScanGrid, TrendFits};
use qst_core::robustness::SweepResult;

use crate::error::CliError;

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// `mode_00`, `mode_01`, … padded to at least two digits.
pub fn mode_column(k: usize, n_modes: usize) -> String {
    let width = (n_modes.saturating_sub(1)).to_string().len().max(2);
    format!("mode_{k:0width$}")
}

struct Table(String);

impl Table {
    fn new(header: &[String]) -> Self {
        let mut t = Table(String::new());
        t.line(header);
        t
    }

    fn line(&mut self, fields: &[String]) {
        self.0.push_str(&fields.join(","));
        self.0.push('\n');
    }
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// `t, P_A, P_B, mode_*`, then `P_f_A` and `P_vac` when requested.
pub fn timeseries_csv(sim: &SimResult, with_f: bool, with_vac: bool) -> String {
    let n_modes = sim.mode_pops.first().map_or(0, |m| m.len());
    let mut header = strings(&["t", "P_A", "P_B"]);
    header.extend((0..n_modes).map(|k| mode_column(k, n_modes)));
    if with_f {
        header.push("P_f_A".into());
    }
    if with_vac {
        header.push("P_vac".into());
    }
    let mut t = Table::new(&header);
    for i in 0..sim.times.len() {
        let mut row = vec![num(sim.times[i]), num(sim.p_a[i]), num(sim.p_b[i])];
        row.extend(sim.mode_pops[i].iter().map(|&p| num(p)));
        if with_f {
            row.push(num(sim.p_f_a[i]));
        }
        if with_vac {
            row.push(num(sim.p_vac[i]));
        }
        t.line(&row);
    }
    t.0
}

/// One row per cell, `κ` outer; failed cells have an empty infidelity.
pub fn scan_csv(grid: &ScanGrid) -> String {
    let mut t = Table::new(&strings(&["kappa", "tau_d", "infidelity"]));
    for (i, &k) in grid.kappa.iter().enumerate() {
        for (j, &d) in grid.tau_d.iter().enumerate() {
            t.line(&[num(k), num(d), grid.get(i, j).map(num).unwrap_or_default()]);
        }
    }
    t.0
}

pub fn optimum_csv(results: &[OptimizationResult]) -> String {
    let mut t = Table::new(&strings(&[
        "g_ratio",
        "kappa_opt",
        "tau_d_opt",
        "F_opt",
        "t_cycle",
    ]));
    for r in results {
        t.line(&[
            num(r.g_ratio),
            num(r.kappa_opt),
            num(r.tau_d_opt),
            num(r.f_opt),
            num(r.t_cycle_opt),
        ]);
    }
    t.0
}

pub fn sweep_csv(sweeps: &[SweepResult]) -> String {
    let mut t = Table::new(&strings(&[
        "param_name",
        "param_value",
        "g_ratio",
        "infidelity",
        "stderr",
    ]));
    for s in sweeps {
        for p in &s.points {
            t.line(&[
                s.parameter.clone(),
                num(p.value),
                num(p.g_ratio),
                num(p.infidelity),
                p.stderr.map(num).unwrap_or_default(),
            ]);
        }
    }
    t.0
}

/// Rows `kappa_opt:exponential`, `t_cycle:exponential`,
/// `tau_d_opt:logarithmic`.
pub fn fits_csv(fits: &TrendFits) -> String {
    let mut t = Table::new(&strings(&["model", "coeff_1", "coeff_2", "r_squared"]));
    for (name, f) in [
        ("kappa_opt", &fits.kappa),
        ("t_cycle", &fits.t_cycle),
        ("tau_d_opt", &fits.tau_d),
    ] {
        t.line(&[
            format!("{name}:{}", f.model),
            num(f.coeffs[0]),
            num(f.coeffs[1]),
            num(f.r_squared),
        ]);
    }
    t.0
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Write every file under a temporary name first and rename them into
/// place only once all writes succeeded.
pub fn write_all(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::with_capacity(files.len());
    let cleanup = |staged: &[(PathBuf, PathBuf)]| {
        for (tmp, _) in staged {
            let _ = fs::remove_file(tmp);
        }
    };
    for (name, bytes) in files {
        let target = dir.join(name);
        let tmp = dir.join(format!(".{name}.tmp"));
        let res = fs::File::create(&tmp).and_then(|mut f| {
            f.write_all(bytes)?;
            f.sync_all()
        });
        staged.push((tmp.clone(), target));
        if let Err(e) = res {
            cleanup(&staged);
            return Err(io_error(&tmp, e));
        }
    }
    for (tmp, target) in &staged {
        if let Err(e) = fs::rename(tmp, target) {
            cleanup(&staged);
            return Err(io_error(target, e));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn mode_columns_sort_lexically() {
        assert_eq!(mode_column(0, 51), "mode_00");
        assert_eq!(mode_column(50, 51), "mode_50");
        assert_eq!(mode_column(3, 5), "mode_03");
        assert_eq!(mode_column(7, 101), "mode_007");
    }

    #[test]
    fn atomic_write_leaves_no_temp_files() {
        let dir = tempfile::tempdir().unwrap();
        let files = vec![
            ("a.csv".to_string(), b"x\n".to_vec()),
            ("b.csv".to_string(), b"y\n".to_vec()),
        ];
        write_all(dir.path(), &files).unwrap();
        let mut names: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert_eq!(names, ["a.csv", "b.csv"]);
    }
}
