//! Batch CLI: decompose matrices from files, run the error-surface and
//! convergence experiments, and print hardware cost reports.
//!
//! Exit codes: 0 on success, 1 on any input/config error, 2 when a
//! decomposition does not converge within the sweep budget.

use clap::{Args, Parser, Subcommand};
use fastrot::complexity::{cost_report, GateCostModel};
use fastrot::io;
use fastrot::metrics::{grid_sweep, rms_odn_experiment, GridSpec};
use fastrot::sweep::{decompose, AlgorithmVariant, Arithmetic, DecomposeConfig};
use fastrot::{FixedFormat, FixedMatrix, ScaleConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fastrot",
    about = "Fixed-point fast-rotation SVD: decomposition, experiments, cost model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct EngineArgs {
    /// Rotation estimator: nsvd | frnsvd | ernsvd | erfhsvd | erfhsvd2
    #[arg(long, default_value = "erfhsvd")]
    variant: String,
    /// Arithmetic: fixed | float (nsvd always runs float)
    #[arg(long, default_value = "fixed")]
    arithmetic: String,
    /// Input word width in bits
    #[arg(long, default_value_t = 16)]
    bits: u32,
    /// Input fraction bits
    #[arg(long, default_value_t = 12)]
    frac_bits: u32,
    /// Internal word width in bits
    #[arg(long, default_value_t = 32)]
    internal_bits: u32,
    /// Internal fraction bits
    #[arg(long, default_value_t = 24)]
    internal_frac_bits: u32,
    /// Scaling stages 1..=4, or `bypass`
    #[arg(long, default_value = "4")]
    scale_stages: String,
    /// Sweep budget
    #[arg(long, default_value_t = 16)]
    sweeps: u32,
    /// Off-diagonal ratio for convergence (0 disables early exit)
    #[arg(long, default_value_t = 1.52587890625e-5)]
    tol: f64,
}

impl EngineArgs {
    fn config(&self) -> Result<DecomposeConfig, String> {
        let variant = AlgorithmVariant::parse(&self.variant)
            .ok_or_else(|| format!("unknown variant `{}`", self.variant))?;
        let arithmetic = match self.arithmetic.as_str() {
            "fixed" => Arithmetic::Fixed,
            "float" => Arithmetic::Float,
            other => return Err(format!("unknown arithmetic `{other}`")),
        };
        let scale = match self.scale_stages.as_str() {
            "bypass" => ScaleConfig::bypass(),
            s => {
                let stages: u32 = s
                    .parse()
                    .ok()
                    .filter(|v| (1..=4).contains(v))
                    .ok_or_else(|| "scale-stages must be 1..=4 or `bypass`".to_string())?;
                ScaleConfig::new(stages)
            }
        };
        let check = |bits: u32, frac: u32, what: &str| -> Result<FixedFormat, String> {
            if !(2..=48).contains(&bits) || frac >= bits {
                return Err(format!(
                    "{what} format invalid: need 2 <= bits <= 48 and frac_bits < bits"
                ));
            }
            Ok(FixedFormat::new(bits, frac))
        };
        let input_format = check(self.bits, self.frac_bits, "input")?;
        let internal_format = check(self.internal_bits, self.internal_frac_bits, "internal")?;
        if internal_format.frac_bits < input_format.frac_bits
            || internal_format.word_bits < input_format.word_bits
        {
            return Err("internal format must be at least as wide as the input format".into());
        }
        if self.tol < 0.0 || !self.tol.is_finite() {
            return Err("tol must be a finite non-negative number".into());
        }
        if self.sweeps == 0 {
            return Err("sweeps must be at least 1".into());
        }
        Ok(DecomposeConfig {
            variant,
            arithmetic,
            input_format,
            internal_format,
            scale,
            max_sweeps: self.sweeps,
            tol: self.tol,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a matrix file into U, Sigma, V plus a convergence trace
    Decompose {
        /// Matrix file (`rows cols` header, then decimal entries)
        matrix: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        /// Output directory (default: $FASTROT_OUT or .)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Approximation-error surface ||D|| over a (tau1, 1/tau2) grid
    Grid {
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, default_value_t = -10.0)]
        tau1_min: f64,
        #[arg(long, default_value_t = 10.0)]
        tau1_max: f64,
        /// Number of tau1 samples (cell midpoints)
        #[arg(long, default_value_t = 400)]
        tau1_points: usize,
        #[arg(long, default_value_t = 0.0)]
        tau2_inv_min: f64,
        #[arg(long, default_value_t = 0.0)]
        tau2_inv_max: f64,
        /// Number of 1/tau2 samples; 1 with min=max=0 is the symmetric slice
        #[arg(long, default_value_t = 1)]
        tau2_inv_points: usize,
        /// Output CSV path (default: $FASTROT_OUT/grid.csv)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// RMS of off-diagonal norms across seeded random trials
    Rmsodn {
        #[command(flatten)]
        engine: EngineArgs,
        /// Matrix size
        #[arg(long, default_value_t = 70)]
        size: usize,
        /// Number of random trials
        #[arg(long, default_value_t = 100)]
        trials: u32,
        /// RNG seed; all randomness flows from here
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output CSV path (default: $FASTROT_OUT/rmsodn.csv)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Delay/area cost report for the rotation hardware
    Complexity {
        /// Word width Λ
        #[arg(long, default_value_t = 32)]
        width: u32,
        /// Unit-cost file (`delay.add_word = 1.0` lines); omitted = all 1.0
        #[arg(long)]
        model: Option<PathBuf>,
        /// Optional CSV output path
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn out_dir(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os("FASTROT_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Decompose { matrix, engine, out } => {
            let cfg = match engine.config() {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let text = match std::fs::read_to_string(&matrix) {
                Ok(t) => t,
                Err(e) => return fail(format!("{}: {e}", matrix.display())),
            };
            let a = match io::parse_matrix_text(&text, cfg.input_format) {
                Ok(m) => m,
                Err(e) => return fail(format!("{}: {e}", matrix.display())),
            };
            if a.rows() != a.cols() {
                return fail("decompose needs a square matrix");
            }
            let result = decompose(&a, &cfg);
            let dir = out_dir(out.as_deref());
            let files = [
                ("U.txt", io::write_matrix_text(&result.u)),
                ("Sigma.txt", io::write_matrix_text(&result.sigma)),
                ("V.txt", io::write_matrix_text(&result.v)),
                ("trace.csv", io::trace_csv(&result.trace)),
            ];
            for (name, contents) in &files {
                if let Err(e) = io::atomic_write(&dir.join(name), contents) {
                    return fail(format!("writing {name}: {e}"));
                }
            }
            let recon = reconstruction_error(&a, &result);
            println!(
                "variant={} n={} sweeps={} converged={} rotations={} overflow_events={}",
                cfg.variant.name(),
                a.rows(),
                result.sweeps_used,
                result.converged,
                result.rotations_applied,
                result.overflow_events,
            );
            println!("reconstruction_rel_error={}", io::fmt_float(recon));
            if a.rows() <= 8 {
                let oracle = fastrot::oracle::brute_svd(&a.to_values(), a.rows());
                let mut worst: f64 = 0.0;
                let denom = oracle.sigma[0].max(f64::MIN_POSITIVE);
                for k in 0..a.rows() {
                    worst = worst.max((result.sigma.value(k, k) - oracle.sigma[k]).abs() / denom);
                }
                println!("sigma_vs_oracle_rel_error={}", io::fmt_float(worst));
            }
            if result.converged {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Command::Grid {
            engine,
            tau1_min,
            tau1_max,
            tau1_points,
            tau2_inv_min,
            tau2_inv_max,
            tau2_inv_points,
            out,
        } => {
            let cfg = match engine.config() {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            if tau1_points == 0 || tau2_inv_points == 0 {
                return fail("empty grid: point counts must be at least 1");
            }
            if tau1_min >= tau1_max && tau1_points > 1 {
                return fail("tau1 range is empty");
            }
            let spec = GridSpec {
                tau1_min,
                tau1_max,
                tau1_points,
                tau2_inv_min,
                tau2_inv_max,
                tau2_inv_points,
            };
            let rows = grid_sweep(&spec, &cfg);
            let path = out.unwrap_or_else(|| out_dir(None).join("grid.csv"));
            if let Err(e) = io::atomic_write(&path, &io::grid_csv(&rows)) {
                return fail(e);
            }
            let max_d = rows.iter().filter_map(|r| r.d).fold(0.0f64, f64::max);
            println!(
                "grid variant={} points={} max_D={}",
                cfg.variant.name(),
                rows.len(),
                io::fmt_float(max_d)
            );
            ExitCode::SUCCESS
        }
        Command::Rmsodn {
            engine,
            size,
            trials,
            seed,
            out,
        } => {
            let cfg = match engine.config() {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            if size < 1 {
                return fail("size must be at least 1");
            }
            if trials < 1 {
                return fail("trials must be at least 1");
            }
            let curve = rms_odn_experiment(size, trials, engine.sweeps, seed, &cfg);
            let path = out.unwrap_or_else(|| out_dir(None).join("rmsodn.csv"));
            if let Err(e) = io::atomic_write(&path, &io::curve_csv(&curve)) {
                return fail(e);
            }
            let reached = curve
                .sweeps_to_ratio(fastrot::tolerances::CONVERGENCE_RATIO)
                .map(|s| s.to_string())
                .unwrap_or_else(|| "never".to_string());
            println!(
                "rmsodn variant={} n={} trials={} sweeps_to_2^-16={}",
                cfg.variant.name(),
                size,
                trials,
                reached
            );
            ExitCode::SUCCESS
        }
        Command::Complexity { width, model, out } => {
            if !(2..=64).contains(&width) {
                return fail("width must be in 2..=64");
            }
            let model = match model {
                None => GateCostModel::default(),
                Some(path) => {
                    let text = match std::fs::read_to_string(&path) {
                        Ok(t) => t,
                        Err(e) => return fail(format!("{}: {e}", path.display())),
                    };
                    match GateCostModel::parse(&text) {
                        Ok(m) => m,
                        Err(e) => return fail(format!("{}: {e}", path.display())),
                    }
                }
            };
            let report = cost_report(width, &model);
            let mut text = String::new();
            text.push_str(&format!("width={}\n", report.width));
            text.push_str("-- critical path delays --\n");
            for (name, v) in &report.delays {
                text.push_str(&format!("delay.{name}={v}\n"));
            }
            text.push_str("-- areas --\n");
            for (name, v) in &report.areas {
                text.push_str(&format!("area.{name}={v}\n"));
            }
            text.push_str(&format!(
                "calc_delay_total={}\ncalc_area_total={}\napply_delay_total={}\napply_area_total={}\n",
                report.calc_delay_total,
                report.calc_area_total,
                report.apply_delay_total,
                report.apply_area_total
            ));
            text.push_str(&format!(
                "bshifter_mux={} scale_mux={} baseline_mux={} saving={} paper_exact={}\n",
                report.savings.per_bshifter_mux,
                report.savings.design_mux,
                report.savings.baseline_mux,
                report.savings.saving,
                report.savings.paper_exact
            ));
            print!("{text}");
            if let Some(path) = out {
                let mut csv = String::from("metric,step,value\n");
                for (name, v) in &report.delays {
                    csv.push_str(&format!("delay,{name},{v}\n"));
                }
                for (name, v) in &report.areas {
                    csv.push_str(&format!("area,{name},{v}\n"));
                }
                csv.push_str(&format!("mux,bshifter,{}\n", report.savings.per_bshifter_mux));
                csv.push_str(&format!("mux,scale,{}\n", report.savings.design_mux));
                csv.push_str(&format!("mux,saving,{}\n", report.savings.saving));
                if let Err(e) = io::atomic_write(&path, &csv) {
                    return fail(e);
                }
            }
            ExitCode::SUCCESS
        }
    }
}

fn reconstruction_error(a: &FixedMatrix, r: &fastrot::SvdResult) -> f64 {
    let n = a.rows();
    let mut err = 0.0f64;
    let mut norm = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += r.u.value(i, k) * r.sigma.value(k, k) * r.v.value(j, k);
            }
            let want = a.value(i, j);
            err += (s - want) * (s - want);
            norm += want * want;
        }
    }
    (err / norm.max(f64::MIN_POSITIVE)).sqrt()
}
