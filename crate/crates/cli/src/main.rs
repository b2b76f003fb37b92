//! Command-line front end: state queries, exact-transformation checks, and
//! implementability sweeps written as CSV.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand};
use nalgebra::DMatrix;

use manakit::channels::map_from_wigner;
use manakit::implementability::{
    feasibility_threshold, physical_implementability, sampling_cost, SdpStatus,
};
use manakit::matrix::{basis_density, c, tensor_power, CMat, DimSpec};
use manakit::states::{named_state, read_state_file, StateName};
use manakit::transform::plan_transform;
use manakit::wigner::{mana, wigner_of_operator, StochasticWignerMatrix};
use manakit::{Error, Result};

const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_SOLVER: u8 = 4;

#[derive(Parser)]
#[command(name = "manakit", version, about = "Magic-state Wigner analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the mana of a state.
    Mana {
        /// Named state (strange, norrell, tmagic, hmagic, basis_k,
        /// maximally_mixed) or a state file path.
        #[arg(long)]
        state: String,
        /// Local dimension for basis_k / maximally_mixed.
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Tensor-power copies of a named state.
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Print the discrete Wigner function as a grid.
    Wigner {
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Decide exact transformability and optionally emit the certificate.
    Feasible {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        /// Write the constructed column-stochastic W as CSV.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Minimal implementability overhead nu at a transformation error.
    Nu {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        /// Exit with status 3 when the transformation is infeasible.
        #[arg(long)]
        strict: bool,
    },
    /// Sweep nu over an error grid, writing CSV rows eps,nu,status,solve_time_ms.
    Sweep {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 0.0)]
        eps_start: f64,
        #[arg(long, default_value_t = 0.5)]
        eps_end: f64,
        #[arg(long, default_value_t = 51)]
        steps: usize,
        /// Bounded number of concurrent solves.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hoeffding sampling-cost estimate for a given overhead.
    SampleCost {
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Re-read an emitted W and verify it against the state pair.
    VerifyW {
        #[arg(long)]
        w: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
}

/// Resolves a state reference: a built-in name (generalized over `--dim`
/// for the stabilizer states) or a state file path.
fn resolve_state(spec: &str, dim: usize, copies: usize) -> Result<(CMat, DimSpec)> {
    if let Ok(name) = spec.parse::<StateName>() {
        if dim == 3 {
            return named_state(name, copies);
        }
    }
    match spec {
        "maximally_mixed" => {
            let dims = DimSpec::single(dim)?.repeat(copies)?;
            let single = CMat::identity(dim, dim) / c(dim as f64, 0.0);
            return Ok((tensor_power(&single, copies), dims));
        }
        s if s.starts_with("basis_") => {
            if let Ok(k) = s["basis_".len()..].parse::<usize>() {
                if k < dim {
                    let dims = DimSpec::single(dim)?.repeat(copies)?;
                    return Ok((tensor_power(&basis_density(dim, k), copies), dims));
                }
            }
            return Err(Error::UnknownState(format!("{spec} (dim {dim})")));
        }
        _ => {}
    }
    let path = Path::new(spec);
    if path.exists() {
        read_state_file(path)
    } else {
        Err(Error::UnknownState(spec.to_string()))
    }
}

fn write_w_csv(path: &Path, w: &StochasticWignerMatrix) -> Result<()> {
    let (rows, cols) = (w.values.nrows(), w.values.ncols());
    let mut out = format!("# W {rows} x {cols}\n");
    for i in 0..rows {
        let row: Vec<String> = (0..cols).map(|j| format!("{:.9}", w.values[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn read_w_csv(path: &Path) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty W file".into()))?;
    let dims: Vec<usize> = header
        .trim_start_matches('#')
        .trim()
        .trim_start_matches('W')
        .split('x')
        .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad W header '{header}'"))))
        .collect::<Result<_>>()?;
    if dims.len() != 2 {
        return Err(Error::Parse(format!("bad W header '{header}'")));
    }
    let (rows, cols) = (dims[0], dims[1]);
    let mut values = Vec::with_capacity(rows * cols);
    for line in lines.filter(|l| !l.trim().is_empty()) {
        for tok in line.split(',') {
            let v: f64 = tok
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad W entry '{tok}'")))?;
            values.push(v);
        }
    }
    if values.len() != rows * cols {
        return Err(Error::Parse(format!(
            "W body has {} entries, header says {rows} x {cols}",
            values.len()
        )));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

struct SweepRow {
    eps: f64,
    nu: Option<f64>,
    status: &'static str,
    solve_time_ms: u64,
}

fn run_sweep(
    rho: &CMat,
    rho_dims: &DimSpec,
    sigma: &CMat,
    sigma_dims: &DimSpec,
    eps_start: f64,
    eps_end: f64,
    steps: usize,
    jobs: usize,
) -> Vec<SweepRow> {
    let grid: Vec<f64> = (0..steps)
        .map(|k| eps_start + (eps_end - eps_start) * k as f64 / (steps - 1) as f64)
        .collect();
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<SweepRow>>> =
        Mutex::new((0..steps).map(|_| None).collect());

    let solve_point = |eps: f64| -> SweepRow {
        match physical_implementability(rho, rho_dims, sigma, sigma_dims, eps) {
            Ok(out) => {
                let ms = (out.solve_time * 1e3).round() as u64;
                match out.status {
                    SdpStatus::Optimal => SweepRow {
                        eps,
                        nu: out.nu,
                        status: "ok",
                        solve_time_ms: ms,
                    },
                    SdpStatus::Infeasible => SweepRow {
                        eps,
                        nu: None,
                        status: "infeasible",
                        solve_time_ms: ms,
                    },
                }
            }
            // A failed point records its status and the sweep continues.
            Err(_) => SweepRow { eps, nu: None, status: "error", solve_time_ms: 0 },
        }
    };

    let workers = jobs.clamp(1, steps);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= steps {
                    break;
                }
                let row = solve_point(grid[k]);
                rows.lock().unwrap()[k] = Some(row);
            });
        }
    });

    rows.into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("all points solved"))
        .collect()
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Mana { state, dim, copies } => {
            let (rho, dims) = resolve_state(&state, dim, copies)?;
            println!("{:.9}", mana(&rho, &dims)?);
        }
        Command::Wigner { state, dim, copies } => {
            let (rho, dims) = resolve_state(&state, dim, copies)?;
            let w = wigner_of_operator(&rho, &dims)?;
            let d = dims.total_dim();
            for a in 0..d {
                let row: Vec<String> =
                    (0..d).map(|b| format!("{:.9}", w.values[a * d + b])).collect();
                println!("{}", row.join(" "));
            }
        }
        Command::Feasible { from, to, dim, copies, emit } => {
            let (rho, rho_dims) = resolve_state(&from, dim, copies)?;
            let (sigma, sigma_dims) = resolve_state(&to, dim, copies)?;
            let plan = plan_transform(&rho, &rho_dims, &sigma, &sigma_dims)?;
            println!("{}", if plan.feasible { "YES" } else { "NO" });
            println!("mana: {:.9} -> {:.9}", plan.mana_source, plan.mana_target);
            if let (Some(w), Some(path)) = (&plan.stochastic_map, &emit) {
                // Sanity-lift before writing: the certificate must classify
                // as a PWPq map.
                map_from_wigner(w)?;
                write_w_csv(path, w)?;
            }
        }
        Command::Nu { from, to, eps, dim, copies, strict } => {
            let (rho, rho_dims) = resolve_state(&from, dim, copies)?;
            let (sigma, sigma_dims) = resolve_state(&to, dim, copies)?;
            let out = physical_implementability(&rho, &rho_dims, &sigma, &sigma_dims, eps)?;
            match out.status {
                SdpStatus::Optimal => println!("{:.6}", out.nu.unwrap()),
                SdpStatus::Infeasible => {
                    println!("INFEASIBLE");
                    if strict {
                        return Ok(EXIT_INFEASIBLE);
                    }
                }
            }
        }
        Command::Sweep {
            from,
            to,
            eps_start,
            eps_end,
            steps,
            jobs,
            dim,
            copies,
            out,
        } => {
            if !(eps_start >= 0.0) || eps_end <= eps_start || steps < 2 {
                return Err(Error::Domain(format!(
                    "need 0 <= eps_start < eps_end and steps >= 2, got [{eps_start}, {eps_end}] with {steps} steps"
                )));
            }
            let (rho, rho_dims) = resolve_state(&from, dim, copies)?;
            let (sigma, sigma_dims) = resolve_state(&to, dim, copies)?;
            let rows = run_sweep(
                &rho, &rho_dims, &sigma, &sigma_dims, eps_start, eps_end, steps, jobs,
            );
            let mut csv = String::new();
            if rows.iter().any(|r| r.status == "infeasible") {
                match feasibility_threshold(
                    &rho, &rho_dims, &sigma, &sigma_dims, eps_start, eps_end,
                )? {
                    Some(t) => writeln!(csv, "# feasibility threshold: {t:.9}").unwrap(),
                    None => writeln!(csv, "# feasibility threshold: above {eps_end:.9}").unwrap(),
                }
            }
            csv.push_str("eps,nu,status,solve_time_ms\n");
            for r in &rows {
                let nu = match r.nu {
                    Some(v) => format!("{v:.9}"),
                    None => "INFEASIBLE".to_string(),
                };
                writeln!(csv, "{:.9},{},{},{}", r.eps, nu, r.status, r.solve_time_ms).unwrap();
            }
            std::fs::write(&out, csv)?;
        }
        Command::SampleCost { nu, eps, delta } => {
            println!("{}", sampling_cost(nu, eps, delta)?);
        }
        Command::VerifyW { w, from, to, dim, copies } => {
            let (rho, rho_dims) = resolve_state(&from, dim, copies)?;
            let (sigma, sigma_dims) = resolve_state(&to, dim, copies)?;
            let mat = read_w_csv(&w)?;
            let p = wigner_of_operator(&rho, &rho_dims)?;
            let q = wigner_of_operator(&sigma, &sigma_dims)?;
            if mat.nrows() != q.values.len() || mat.ncols() != p.values.len() {
                println!("FAIL: W is {}x{}, states need {}x{}",
                    mat.nrows(), mat.ncols(), q.values.len(), p.values.len());
                return Ok(1);
            }
            // Tolerances account for the 9-decimal CSV rounding.
            let tol = 1e-6;
            for j in 0..mat.ncols() {
                let s = mat.column(j).sum();
                if (s - 1.0).abs() > tol {
                    println!("FAIL: column {j} sums to {s:.9}");
                    return Ok(1);
                }
            }
            if mat.iter().any(|&v| v < -tol) {
                println!("FAIL: negative entry");
                return Ok(1);
            }
            let image = &mat * &p.values;
            let dev = (image - &q.values).iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if dev > tol {
                println!("FAIL: ||W p - q||_inf = {dev:.3e}");
                return Ok(1);
            }
            println!("OK");
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e @ Error::Solver(_)) => {
            eprintln!("solver error: {e}");
            ExitCode::from(EXIT_SOLVER)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
