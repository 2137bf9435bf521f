//! The `rdecomp` command-line surface.
//!
//! Exit codes: 0 success, 2 usage, 3 validation or shape, 4 I/O or file
//! format, 5 numerical failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::decompose::{joint_decompose_observed, lmr_decompose, JointState, SolverConfig};
use crate::error::{Error, ErrorClass, Result};
use crate::fusion::{fuse, AttentionParams};
use crate::io::{
    align_pair, center_columns, format_f64, read_matrix, resolve_config, write_matrix, AlignMode, ConfigOverrides,
    FileDigest, MatrixFormat, RunManifest, Stopwatch,
};
use crate::matrix::DenseMatrix;
use crate::synth::{compare, generate, Components, RecoveryMetrics, SyntheticSpec, GENERATOR_ID};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_NUMERICAL: i32 = 5;

pub fn exit_code(err: &Error) -> i32 {
    match err.class() {
        ErrorClass::Validation => EXIT_VALIDATION,
        ErrorClass::Io => EXIT_IO,
        ErrorClass::Numerical => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rdecomp",
    version,
    about = "Shared low-rank + sparse decomposition of aligned feature matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint decomposition I = L + S_I, T = L + S_T.
    Joint(JointArgs),
    /// Single-matrix decomposition X = L + S.
    Decompose(DecomposeArgs),
    /// Attention-weighted fusion of L, S_I, S_T into R.
    Fuse(FuseArgs),
    /// Synthetic instance with known ground truth.
    Generate(GenerateArgs),
    /// Recovery metrics of an estimate against ground truth.
    Eval(EvalArgs),
    /// Residuals (and optionally recovery metrics) at iteration checkpoints.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolverFlags {
    /// Balancing weight of the sparse term [default: 1.0]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Augmented-Lagrangian penalty [default: 10.0]
    #[arg(long)]
    pub mu: Option<f64>,
    /// Iteration cap [default: 3000]
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Tolerance on the largest Frobenius residual [default: 1e-7]
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Flat TOML file with any of lambda, mu, max_iters, epsilon. Flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl SolverFlags {
    pub fn resolve(&self) -> Result<SolverConfig> {
        resolve_config(
            self.config.as_deref(),
            ConfigOverrides {
                lambda: self.lambda,
                mu: self.mu,
                max_iters: self.max_iters,
                epsilon: self.epsilon,
            },
        )
    }
}

#[derive(Debug, Clone, Args)]
pub struct PairInputs {
    #[arg(long)]
    pub input_i: PathBuf,
    #[arg(long)]
    pub input_t: PathBuf,
    /// Equalize unequal row counts to min(N, M).
    #[arg(long, value_enum)]
    pub align: Option<AlignMode>,
    /// Subtract column means from each input before decomposing.
    #[arg(long)]
    pub center: bool,
}

impl PairInputs {
    fn load(&self) -> Result<(DenseMatrix, DenseMatrix)> {
        let i = read_matrix(&self.input_i)?;
        let t = read_matrix(&self.input_t)?;
        let (i, t) = align_pair(i, t, self.align)?;
        if self.center {
            Ok((center_columns(&i), center_columns(&t)))
        } else {
            Ok((i, t))
        }
    }

    fn record(&self, manifest: &mut RunManifest) -> Result<()> {
        manifest.inputs.push(FileDigest::of("I", &self.input_i)?);
        manifest.inputs.push(FileDigest::of("T", &self.input_t)?);
        manifest.align = self.align;
        manifest.center = self.center;
        Ok(())
    }
}

#[derive(Debug, Clone, Args)]
pub struct JointArgs {
    #[command(flatten)]
    pub inputs: PairInputs,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[arg(long, value_enum, default_value_t = MatrixFormat::Rdm)]
    pub format: MatrixFormat,
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
    /// Singular value threshold [default: 1/mu]
    #[arg(long)]
    pub svt_tau: Option<f64>,
    #[arg(long)]
    pub center: bool,
    #[arg(long, value_enum, default_value_t = MatrixFormat::Rdm)]
    pub format: MatrixFormat,
}

#[derive(Debug, Clone, Args)]
pub struct FuseArgs {
    #[arg(long)]
    pub l: PathBuf,
    #[arg(long)]
    pub s_i: PathBuf,
    #[arg(long)]
    pub s_t: PathBuf,
    /// 1 x (m*n + 1) matrix file holding w followed by b. Zeros when absent.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Output path for R; the manifest goes next to it as `<stem>.manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 64)]
    pub rows: usize,
    #[arg(long, default_value_t = 64)]
    pub cols: usize,
    #[arg(long, default_value_t = 4)]
    pub rank: usize,
    #[arg(long, default_value_t = 0.05)]
    pub density: f64,
    #[arg(long, default_value_t = 1.0)]
    pub low_rank_scale: f64,
    #[arg(long, default_value_t = 5.0)]
    pub spike_scale: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = MatrixFormat::Rdm)]
    pub format: MatrixFormat,
}

impl GenerateArgs {
    pub fn spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            rows: self.rows,
            cols: self.cols,
            rank: self.rank,
            density: self.density,
            low_rank_scale: self.low_rank_scale,
            spike_scale: self.spike_scale,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Directory holding L, S_I, S_T (.rdm or .csv).
    #[arg(long)]
    pub estimate: PathBuf,
    /// Directory holding the ground-truth L, S_I, S_T.
    #[arg(long)]
    pub truth: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub inputs: PairInputs,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Solver flags; the iteration cap is replaced by the largest checkpoint.
    #[command(flatten)]
    pub solver: SolverFlags,
    #[arg(long, value_delimiter = ',', default_values_t = [1000usize, 2000, 3000, 4000])]
    pub checkpoints: Vec<usize>,
    /// Ground-truth directory; adds recovery metrics per checkpoint.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

/// Runs one parsed command, writing its report to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Joint(a) => cmd_joint(&a, out),
        Command::Decompose(a) => cmd_decompose(&a, out),
        Command::Fuse(a) => cmd_fuse(&a, out),
        Command::Generate(a) => cmd_generate(&a, out),
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn write_output(manifest: &mut RunManifest, role: &str, path: PathBuf, m: &DenseMatrix) -> Result<()> {
    write_matrix(&path, m)?;
    manifest.outputs.push(FileDigest::of(role, &path)?);
    Ok(())
}

fn write_text(manifest: &mut RunManifest, role: &str, path: PathBuf, text: &str) -> Result<()> {
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    manifest.outputs.push(FileDigest::of(role, &path)?);
    Ok(())
}

/// Locates `<stem>.rdm` or `<stem>.csv` in `dir`.
fn find_matrix(dir: &Path, stem: &str) -> Result<PathBuf> {
    for ext in ["rdm", "csv"] {
        let p = dir.join(format!("{stem}.{ext}"));
        if p.is_file() {
            return Ok(p);
        }
    }
    Err(Error::io(
        dir.join(format!("{stem}.rdm")),
        std::io::Error::new(std::io::ErrorKind::NotFound, format!("no {stem}.rdm or {stem}.csv")),
    ))
}

fn load_components(dir: &Path) -> Result<[DenseMatrix; 3]> {
    Ok([
        read_matrix(find_matrix(dir, "L")?)?,
        read_matrix(find_matrix(dir, "S_I")?)?,
        read_matrix(find_matrix(dir, "S_T")?)?,
    ])
}

pub fn cmd_joint(args: &JointArgs, out: &mut dyn Write) -> Result<()> {
    let clock = Stopwatch::start();
    let cfg = args.solver.resolve()?;
    let (i, t) = args.inputs.load()?;
    let dec = joint_decompose_observed(&i, &t, &cfg, |_, _, _| {})?;

    create_dir(&args.out_dir)?;
    let mut manifest = RunManifest::new("joint", &clock);
    manifest.config = Some(cfg);
    args.inputs.record(&mut manifest)?;

    let ext = args.format.extension();
    write_output(&mut manifest, "L", args.out_dir.join(format!("L.{ext}")), &dec.l)?;
    write_output(&mut manifest, "S_I", args.out_dir.join(format!("S_I.{ext}")), &dec.s_i)?;
    write_output(&mut manifest, "S_T", args.out_dir.join(format!("S_T.{ext}")), &dec.s_t)?;

    let mut csv = String::from("iteration,r_I,r_T\n");
    for (k, (ri, rt)) in dec.residual_history.iter().enumerate() {
        csv.push_str(&format!("{},{},{}\n", k + 1, format_f64(*ri), format_f64(*rt)));
    }
    write_text(&mut manifest, "residuals", args.out_dir.join("residuals.csv"), &csv)?;

    let (ri, rt) = dec.final_residuals();
    manifest.iterations_run = Some(dec.iterations_run);
    manifest.converged = Some(dec.converged);
    manifest.final_residuals = Some(vec![ri, rt]);
    manifest.timing = clock.timing();
    manifest.write(args.out_dir.join("manifest.json"))?;

    emit(
        out,
        &format!(
            "converged={}\niterations={}\nr_I={:?}\nr_T={:?}\n",
            dec.converged, dec.iterations_run, ri, rt
        ),
    )
}

pub fn cmd_decompose(args: &DecomposeArgs, out: &mut dyn Write) -> Result<()> {
    let clock = Stopwatch::start();
    let cfg = args.solver.resolve()?;
    let svt_tau = args.svt_tau.unwrap_or_else(|| cfg.single_svt_threshold());
    let x = read_matrix(&args.input)?;
    let x = if args.center { center_columns(&x) } else { x };
    let dec = lmr_decompose(&x, &cfg, svt_tau)?;

    create_dir(&args.out_dir)?;
    let mut manifest = RunManifest::new("decompose", &clock);
    manifest.config = Some(cfg);
    manifest.svt_tau = Some(svt_tau);
    manifest.center = args.center;
    manifest.inputs.push(FileDigest::of("X", &args.input)?);

    let ext = args.format.extension();
    write_output(&mut manifest, "L", args.out_dir.join(format!("L.{ext}")), &dec.l)?;
    write_output(&mut manifest, "S", args.out_dir.join(format!("S.{ext}")), &dec.s)?;

    let mut csv = String::from("iteration,r\n");
    for (k, r) in dec.residual_history.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", k + 1, format_f64(*r)));
    }
    write_text(&mut manifest, "residuals", args.out_dir.join("residuals.csv"), &csv)?;

    manifest.iterations_run = Some(dec.iterations_run);
    manifest.converged = Some(dec.converged);
    manifest.final_residuals = Some(vec![dec.final_residual()]);
    manifest.timing = clock.timing();
    manifest.write(args.out_dir.join("manifest.json"))?;

    emit(
        out,
        &format!(
            "converged={}\niterations={}\nr={:?}\n",
            dec.converged,
            dec.iterations_run,
            dec.final_residual()
        ),
    )
}

/// `R.rdm` → `R.manifest.json`.
pub fn fuse_manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

pub fn cmd_fuse(args: &FuseArgs, out: &mut dyn Write) -> Result<()> {
    let clock = Stopwatch::start();
    let l = read_matrix(&args.l)?;
    let s_i = read_matrix(&args.s_i)?;
    let s_t = read_matrix(&args.s_t)?;
    let params = match &args.params {
        Some(p) => AttentionParams::from_row(&read_matrix(p)?, l.len())?,
        None => AttentionParams::zeros(l.rows(), l.cols()),
    };
    let fused = fuse(&l, &s_i, &s_t, &params)?;

    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    let mut manifest = RunManifest::new("fuse", &clock);
    manifest.inputs.push(FileDigest::of("L", &args.l)?);
    manifest.inputs.push(FileDigest::of("S_I", &args.s_i)?);
    manifest.inputs.push(FileDigest::of("S_T", &args.s_t)?);
    if let Some(p) = &args.params {
        manifest.inputs.push(FileDigest::of("params", p)?);
    }
    write_output(&mut manifest, "R", args.out.clone(), &fused.r)?;
    manifest.detail("weights", fused.weights);
    manifest.detail("scores", fused.scores);
    manifest.timing = clock.timing();
    manifest.write(fuse_manifest_path(&args.out))?;

    let [a_l, a_i, a_t] = fused.weights;
    let [s_l, s_i, s_t] = fused.scores;
    emit(
        out,
        &format!("alpha_L={a_l:?}\nalpha_I={a_i:?}\nalpha_T={a_t:?}\ns_L={s_l:?}\ns_I={s_i:?}\ns_T={s_t:?}\n"),
    )
}

pub fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let clock = Stopwatch::start();
    let spec = args.spec();
    let inst = generate(&spec)?;

    let truth_dir = args.out_dir.join("truth");
    create_dir(&truth_dir)?;
    let mut manifest = RunManifest::new("generate", &clock);
    let ext = args.format.extension();
    write_output(&mut manifest, "I", args.out_dir.join(format!("I.{ext}")), &inst.i)?;
    write_output(&mut manifest, "T", args.out_dir.join(format!("T.{ext}")), &inst.t)?;
    write_output(&mut manifest, "L0", truth_dir.join(format!("L.{ext}")), &inst.l0)?;
    write_output(&mut manifest, "S_I0", truth_dir.join(format!("S_I.{ext}")), &inst.s_i0)?;
    write_output(&mut manifest, "S_T0", truth_dir.join(format!("S_T.{ext}")), &inst.s_t0)?;
    manifest.detail("spec", spec);
    manifest.detail("generator", GENERATOR_ID);
    manifest.timing = clock.timing();
    manifest.write(args.out_dir.join("metadata.json"))?;

    emit(
        out,
        &format!(
            "rows={}\ncols={}\nrank={}\nsupport={}\nseed={}\ngenerator={}\n",
            spec.rows,
            spec.cols,
            spec.rank,
            spec.support_size(),
            spec.seed,
            GENERATOR_ID
        ),
    )
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let [l, s_i, s_t] = load_components(&args.estimate)?;
    let [l0, s_i0, s_t0] = load_components(&args.truth)?;
    let metrics = compare(
        Components {
            l: &l,
            s_i: &s_i,
            s_t: &s_t,
        },
        Components {
            l: &l0,
            s_i: &s_i0,
            s_t: &s_t0,
        },
    )?;
    emit(out, &metrics.to_report())
}

/// One row of a sweep.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub checkpoint: usize,
    /// Iterations actually run when the checkpoint was reached; smaller than
    /// `checkpoint` when the solver converged earlier.
    pub iterations_run: usize,
    pub converged: bool,
    pub residuals: (f64, f64),
    pub state: JointState,
}

/// Runs the joint solver to the largest checkpoint, capturing the iterate at
/// each one. A checkpoint past convergence sees the converged iterate, the
/// same result an independent run capped at that checkpoint would produce.
pub fn sweep(i: &DenseMatrix, t: &DenseMatrix, cfg: &SolverConfig, checkpoints: &[usize]) -> Result<Vec<Checkpoint>> {
    let mut sorted: Vec<usize> = checkpoints.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let Some(&last) = sorted.last() else {
        return Err(Error::invalid("checkpoints", "at least one checkpoint is required"));
    };
    if sorted[0] == 0 {
        return Err(Error::invalid("checkpoints", "checkpoints must be at least 1"));
    }
    let cfg = cfg.with_max_iters(last);
    let mut captured: Vec<Checkpoint> = Vec::new();
    let dec = joint_decompose_observed(i, t, &cfg, |k, state, r| {
        if sorted.binary_search(&k).is_ok() {
            captured.push(Checkpoint {
                checkpoint: k,
                iterations_run: k,
                converged: r.0.max(r.1) < cfg.epsilon,
                residuals: r,
                state: state.clone(),
            });
        }
    })?;
    for &c in &sorted[captured.len()..] {
        captured.push(Checkpoint {
            checkpoint: c,
            iterations_run: dec.iterations_run,
            converged: dec.converged,
            residuals: dec.final_residuals(),
            state: JointState {
                l: dec.l.clone(),
                s_i: dec.s_i.clone(),
                s_t: dec.s_t.clone(),
                z_i: dec.z_i.clone(),
                z_t: dec.z_t.clone(),
            },
        });
    }
    Ok(captured)
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let clock = Stopwatch::start();
    let cfg = args.solver.resolve()?;
    let (i, t) = args.inputs.load()?;
    let truth = args.truth.as_deref().map(load_components).transpose()?;
    let rows = sweep(&i, &t, &cfg, &args.checkpoints)?;

    let mut metrics: Vec<Option<RecoveryMetrics>> = Vec::with_capacity(rows.len());
    for row in &rows {
        metrics.push(match &truth {
            Some([l0, s_i0, s_t0]) => Some(compare(
                Components {
                    l: &row.state.l,
                    s_i: &row.state.s_i,
                    s_t: &row.state.s_t,
                },
                Components {
                    l: l0,
                    s_i: s_i0,
                    s_t: s_t0,
                },
            )?),
            None => None,
        });
    }

    let mut csv = String::from("checkpoint,iterations_run,converged,r_I,r_T");
    if truth.is_some() {
        csv.push_str(",l_rel_error,s_i_rel_error,s_t_rel_error,l_rank,support_f1");
    }
    csv.push('\n');
    let mut report = String::new();
    for (row, m) in rows.iter().zip(&metrics) {
        csv.push_str(&format!(
            "{},{},{},{},{}",
            row.checkpoint,
            row.iterations_run,
            row.converged,
            format_f64(row.residuals.0),
            format_f64(row.residuals.1)
        ));
        report.push_str(&format!(
            "checkpoint={} iterations={} r_I={:?} r_T={:?}",
            row.checkpoint, row.iterations_run, row.residuals.0, row.residuals.1
        ));
        if let Some(m) = m {
            csv.push_str(&format!(
                ",{},{},{},{},{}",
                format_f64(m.l_rel_error),
                format_f64(m.s_i_rel_error),
                format_f64(m.s_t_rel_error),
                m.l_rank,
                format_f64(m.support.f1)
            ));
            report.push_str(&format!(
                " l_rel_error={:?} support_f1={:?}",
                m.l_rel_error, m.support.f1
            ));
        }
        csv.push('\n');
        report.push('\n');
    }

    create_dir(&args.out_dir)?;
    let mut manifest = RunManifest::new("sweep", &clock);
    manifest.config = Some(cfg.with_max_iters(rows.last().map_or(cfg.max_iters, |r| r.checkpoint)));
    args.inputs.record(&mut manifest)?;
    if let Some(dir) = &args.truth {
        for stem in ["L", "S_I", "S_T"] {
            manifest
                .inputs
                .push(FileDigest::of(&format!("truth_{stem}"), &find_matrix(dir, stem)?)?);
        }
    }
    write_text(&mut manifest, "sweep", args.out_dir.join("sweep.csv"), &csv)?;
    if let Some(last) = rows.last() {
        manifest.iterations_run = Some(last.iterations_run);
        manifest.converged = Some(last.converged);
        manifest.final_residuals = Some(vec![last.residuals.0, last.residuals.1]);
    }
    manifest.detail("checkpoints", rows.iter().map(|r| r.checkpoint).collect::<Vec<_>>());
    manifest.timing = clock.timing();
    manifest.write(args.out_dir.join("manifest.json"))?;

    emit(out, &report)
}
