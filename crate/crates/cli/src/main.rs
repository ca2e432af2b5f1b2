use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use supframe::adapt::{concentration, dp_adapt, greedy_adapt, ResetRule, DEFAULT_MAX_ORDER};
use supframe::denoise::{
    run_experiment, snr_gain_db, suppress, Algorithm, ExperimentConfig, MethodSpec, SuppressionRule, WindowSpec,
};
use supframe::dft::FourierEngine;
use supframe::io::{
    read_json, read_wav, scores_csv, spectrogram_csv, write_json, write_wav, CoefficientFile, SampleFormat,
    WindowHeader,
};
use supframe::reconstruct::{
    bench_selection, canonical_dual, dual_reconstruct, dyadic_duals, gola_reconstruct, lapped_duals, measure_path,
    scaling_exponent, ComplexityPath,
};
use supframe::superposition::{check_dyadic, make_selection, superposition_analyze, Mode, OrderedPartition};
use supframe::{Error, ErrorKind, GaborSystem, Result, Signal, WindowKind};

#[derive(Parser)]
#[command(name = "supframe", version, about = "Adaptive superposition-frame analysis, synthesis and denoising")]
struct Cli {
    /// Worker threads (default: one per core).
    #[arg(long, global = true, env = "SUPFRAME_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Superposition coefficients of a WAV file, plus a dB spectrogram CSV.
    Analyze(AnalyzeArgs),
    /// Choose a partition with the greedy or dynamic-programming search.
    Adapt(AdaptArgs),
    /// Reconstruct audio from a coefficient file.
    Synthesize(SynthesizeArgs),
    /// Wiener suppression, either on a WAV file or as a seeded experiment.
    Denoise(DenoiseArgs),
    /// Counted multiplies against the closed-form counts, with wall times.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct WindowArgs {
    #[arg(long, value_enum, default_value_t = WindowArg::Hamming)]
    window: WindowArg,
    #[arg(long, default_value_t = 100)]
    winlen: usize,
    /// Time step `a`; must divide the signal length.
    #[arg(long, default_value_t = 50)]
    hop: usize,
    /// Base modulation count (default: the window length).
    #[arg(long)]
    modulations: Option<usize>,
}

impl WindowArgs {
    fn spec(&self) -> WindowSpec {
        WindowSpec { kind: self.window.into(), width: self.winlen, hop: self.hop, modulations: self.modulations }
    }

    fn header(&self) -> WindowHeader {
        WindowHeader { kind: self.window.into(), width: self.winlen, modulations: self.modulations.unwrap_or(self.winlen) }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Mono 16-bit or 32-bit float WAV.
    #[arg(long)]
    input: PathBuf,
    /// Crop or zero-pad the input to this many samples.
    #[arg(long)]
    length: Option<usize>,
}

impl InputArgs {
    fn load(&self) -> Result<(Signal<f64>, u32)> {
        let (x, info) = read_wav(&self.input, self.length)?;
        Ok((x, info.sample_rate))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Hamming,
    Hann,
    Triangular,
    Rect,
}

impl From<WindowArg> for WindowKind {
    fn from(w: WindowArg) -> Self {
        match w {
            WindowArg::Hamming => WindowKind::Hamming,
            WindowArg::Hann => WindowKind::Hann,
            WindowArg::Triangular => WindowKind::Triangular,
            WindowArg::Rect => WindowKind::Rect,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Local,
    Global,
    Dyadic,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Local => Mode::Local,
            ModeArg::Global => Mode::Global,
            ModeArg::Dyadic => Mode::Dyadic,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Local)]
    mode: ModeArg,
    /// Partition JSON; without it every translate is its own piece.
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Spectrogram CSV (default: `out` with a .csv extension).
    #[arg(long)]
    spectrogram: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Greedy,
    Dp,
}

#[derive(Clone, Copy, ValueEnum)]
enum CostArg {
    Entropy,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResetArg {
    Prose,
    AsPrinted,
}

#[derive(Args)]
struct AdaptArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// Segment cost of the dynamic-programming search.
    #[arg(long, value_enum, default_value_t = CostArg::Entropy)]
    cost: CostArg,
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
    rmax: usize,
    /// What the greedy search does after a rejected merge.
    #[arg(long, value_enum, default_value_t = ResetArg::Prose)]
    reset: ResetArg,
    #[arg(long)]
    out: PathBuf,
    /// Per-piece score CSV (default: `out` with a .csv extension).
    #[arg(long)]
    scores: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ola,
    Dual,
    Lapped,
    Dyadic,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Pcm16,
    Float32,
}

#[derive(Args)]
struct SynthesizeArgs {
    #[arg(long)]
    coeffs: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long)]
    out: PathBuf,
    /// Original audio; the largest sample residual is printed.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Float32)]
    format: FormatArg,
    /// Used when the coefficient file records no rate.
    #[arg(long, default_value_t = 16000)]
    sample_rate: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Oracle,
    TwoStage,
}

impl From<RuleArg> for SuppressionRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Oracle => SuppressionRule::Oracle,
            RuleArg::TwoStage => SuppressionRule::TwoStage,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PartitionArg {
    Fixed,
    Greedy,
    Dp,
}

#[derive(Args)]
struct DenoiseArgs {
    /// Noisy WAV to clean; exclusive with --synthetic.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    input: Option<PathBuf>,
    /// Run the seeded experiment on the built-in test signal.
    #[arg(long)]
    synthetic: bool,
    /// Clean reference for --input; required by the oracle rule.
    #[arg(long, requires = "input")]
    clean: Option<PathBuf>,
    /// Noise standard deviation of --input (default: measured against --clean).
    #[arg(long, requires = "input")]
    noise_sigma: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    snr: f64,
    #[arg(long, value_enum, default_value_t = RuleArg::Oracle)]
    rule: RuleArg,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Base seed; trial k uses seed + k. Drawn from the clock and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Experiment configuration JSON (default: the built-in one).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report JSON; a CSV table is written beside it.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Denoised WAV for --input.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Partition used with --input.
    #[arg(long, value_enum, default_value_t = PartitionArg::Fixed)]
    algo: PartitionArg,
    #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
    rmax: usize,
    #[command(flatten)]
    window: WindowArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Signal lengths, multiples of 128.
    #[arg(long, value_delimiter = ',', default_values_t = [1024usize, 2048, 4096, 8192, 16384])]
    sizes: Vec<usize>,
    /// Timed repetitions per row; the fastest is reported.
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Also write the table as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Adapt(a) => adapt(a),
        Command::Synthesize(a) => synthesize(a),
        Command::Denoise(a) => denoise(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Precondition => 3,
                ErrorKind::Io => 4,
            })
        }
    }
}

fn beside(path: &Path, given: Option<PathBuf>) -> PathBuf {
    given.unwrap_or_else(|| path.with_extension("csv"))
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let (x, rate) = args.input.load()?;
    let g = args.window.spec().system(x.len())?;
    let p = match &args.partition {
        Some(path) => {
            let p: OrderedPartition = read_json(path)?;
            if p.n_windows() != g.translates() {
                return Err(Error::Config(format!(
                    "partition covers {} translates, the system has {}",
                    p.n_windows(),
                    g.translates()
                )));
            }
            p.validate().map_err(Error::InvalidPartition)?;
            p
        }
        None => OrderedPartition::singletons(g.translates()),
    };
    let sel = make_selection(&p, &g, args.mode.into())?;
    let c = superposition_analyze(&x, &sel, &FourierEngine::new())?;
    let mut file = CoefficientFile::from_set(&c, args.window.header());
    file.sample_rate = Some(rate);
    write_json(&args.out, &file)?;
    let csv = beside(&args.out, args.spectrogram);
    std::fs::write(&csv, spectrogram_csv(&c))?;
    println!("{} pieces, {} coefficients -> {}, {}", c.selection().n_pieces(), c.n_coefficients(), args.out.display(), csv.display());
    Ok(())
}

fn adapt(args: AdaptArgs) -> Result<()> {
    let (x, _) = args.input.load()?;
    let g = args.window.spec().system(x.len())?;
    let (p, scores) = match args.algo {
        AlgoArg::Greedy => {
            let rule = match args.reset {
                ResetArg::Prose => ResetRule::Prose,
                ResetArg::AsPrinted => ResetRule::AsPrinted,
            };
            let p = greedy_adapt(&x, &g, args.rmax, rule)?.partition;
            let scores = p
                .pieces()
                .iter()
                .map(|&piece| Ok((piece, score_or_zero(concentration(&x, &g, piece.start, piece.order))?)))
                .collect::<Result<Vec<_>>>()?;
            (p, scores)
        }
        AlgoArg::Dp => {
            let CostArg::Entropy = args.cost;
            let table = dp_adapt(&x, &g, args.rmax)?;
            let scores = table.partition.pieces().iter().map(|&q| (q, table.segment_costs[q.start][q.order])).collect();
            (table.partition, scores)
        }
    };
    write_json(&args.out, &p)?;
    let csv = beside(&args.out, args.scores);
    std::fs::write(&csv, scores_csv(&scores))?;
    let widths: Vec<String> = p.pieces().iter().map(|q| q.width().to_string()).collect();
    println!("{} pieces (widths {}) -> {}", p.len(), widths.join(" "), args.out.display());
    Ok(())
}

fn score_or_zero(s: Result<supframe::adapt::ConcentrationScore>) -> Result<f64> {
    match s {
        Ok(s) => Ok(s.value),
        Err(Error::ZeroEnergySegment) => Ok(0.0),
        Err(e) => Err(e),
    }
}

fn synthesize(args: SynthesizeArgs) -> Result<()> {
    let file: CoefficientFile = read_json(&args.coeffs)?;
    let (g, c): (GaborSystem<f64>, _) = file.to_set()?;
    let sel = c.selection();
    let engine = FourierEngine::new();
    let y = match args.method {
        MethodArg::Ola => gola_reconstruct(&c, &g, &engine)?,
        MethodArg::Dual => dual_reconstruct(&c, &canonical_dual(sel)?, &engine)?,
        MethodArg::Lapped => {
            let m_g = sel.uniform_modulations().ok_or(Error::NonconstantModulation)?;
            dual_reconstruct(&c, &lapped_duals(g.window(), g.hop(), m_g)?.select(sel)?, &engine)?
        }
        MethodArg::Dyadic => {
            check_dyadic(sel.partition())?;
            let m_g = sel.uniform_modulations().ok_or(Error::NonconstantModulation)?;
            dual_reconstruct(&c, &dyadic_duals(g.window(), g.hop(), m_g)?.select(sel)?, &engine)?
        }
    };
    let format = match args.format {
        FormatArg::Pcm16 => SampleFormat::Pcm16,
        FormatArg::Float32 => SampleFormat::Float32,
    };
    write_wav(&args.out, &y, file.sample_rate.unwrap_or(args.sample_rate), format)?;
    if let Some(reference) = &args.reference {
        let (x, _) = read_wav::<f64>(reference, Some(y.len()))?;
        let residual = x.samples().iter().zip(y.samples()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        println!("max round-trip residual: {residual:.3e}");
    }
    println!("wrote {} samples -> {}", y.len(), args.out.display());
    Ok(())
}

fn denoise(args: DenoiseArgs) -> Result<()> {
    match &args.input {
        Some(input) => denoise_file(&args, input),
        None => denoise_experiment(&args),
    }
}

fn denoise_file(args: &DenoiseArgs, input: &Path) -> Result<()> {
    let rule: SuppressionRule = args.rule.into();
    let (y, info) = read_wav::<f64>(input, None)?;
    let rate = info.sample_rate;
    let clean = args.clean.as_ref().map(|p| read_wav::<f64>(p, Some(y.len()))).transpose()?.map(|c| c.0);
    if rule == SuppressionRule::Oracle && clean.is_none() {
        return Err(Error::Config("the oracle rule needs --clean".into()));
    }
    let sigma = match (args.noise_sigma, &clean) {
        (Some(s), _) => s,
        (None, Some(x)) => (y.distance_sqr(x) / y.len() as f64).sqrt(),
        (None, None) => return Err(Error::Config("--noise-sigma is required without --clean".into())),
    };
    let out = args.out.as_ref().ok_or_else(|| Error::Config("--out is required with --input".into()))?;
    let g = args.window.spec().system(y.len())?;
    let algorithm = match args.algo {
        PartitionArg::Fixed => Algorithm::Fixed,
        PartitionArg::Greedy => Algorithm::Greedy,
        PartitionArg::Dp => Algorithm::Dp,
    };
    let method = MethodSpec { name: "input".into(), algorithm, window: args.window.spec(), r_max: args.rmax };
    let p = method.partition(&y, &g)?;
    let xhat = suppress(&y, clean.as_ref(), &g, &p, rule, sigma * sigma)?;
    write_wav(out, &xhat, rate, SampleFormat::Float32)?;
    if let Some(x) = &clean {
        println!("snr gain: {:.3} dB", snr_gain_db(x, &y, &xhat));
    }
    println!("{} pieces -> {}", p.len(), out.display());
    Ok(())
}

fn denoise_experiment(args: &DenoiseArgs) -> Result<()> {
    let mut config: ExperimentConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => ExperimentConfig::default(),
    };
    let seed = args.seed.unwrap_or_else(|| {
        let t = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).unwrap_or_default();
        t.as_nanos() as u64
    });
    if args.seed.is_none() {
        println!("seed: {seed}");
    }
    config.snr_db = vec![args.snr];
    config.rules = vec![args.rule.into()];
    config.trials = args.trials;
    config.base_seed = seed;
    let report = run_experiment(&config)?;
    println!("{:>18} {:>10} {:>10}", "method", "mean dB", "std dB");
    for r in &report.results {
        println!("{:>18} {:>10.3} {:>10.3}", r.method, r.mean_db, r.std_db);
    }
    if let Some(path) = &args.report {
        write_json(path, &report)?;
        std::fs::write(path.with_extension("csv"), report.to_csv())?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    if args.sizes.is_empty() {
        return Err(Error::Config("no sizes given".into()));
    }
    let mut csv = String::from("L,path,pieces,M,multiplies,formula,ratio,seconds\n");
    println!("{:>7} {:>22} {:>6} {:>5} {:>11} {:>11} {:>6} {:>10}", "L", "path", "pieces", "M", "counted", "formula", "ratio", "seconds");
    let mut timings: Vec<(usize, f64)> = Vec::new();
    for &len in &args.sizes {
        let x = Signal::from_real(&(0..len).map(|t| ((t * 7919) % 101) as f64 / 50.0 - 1.0).collect::<Vec<_>>());
        let mut total = 0.0;
        let rows = [(false, ComplexityPath::Analysis)].into_iter().chain(ComplexityPath::ALL.map(|p| (true, p)));
        for (adapted, path) in rows {
            let (g, sel) = bench_selection::<f64>(len, adapted)?;
            let m = measure_path(path, &x, &g, &sel, args.repeats)?;
            let name = if adapted { path.name().to_string() } else { format!("{} (no adaptation)", path.name()) };
            println!(
                "{:>7} {:>22} {:>6} {:>5} {:>11} {:>11.0} {:>6.3} {:>10.3e}",
                len, name, m.pieces, m.modulations, m.multiplies, m.formula, m.ratio(), m.seconds
            );
            csv.push_str(&format!("{len},{name},{},{},{},{},{},{}\n", m.pieces, m.modulations, m.multiplies, m.formula, m.ratio(), m.seconds));
            if adapted {
                total += m.seconds;
            }
        }
        timings.push((len, total));
    }
    if timings.len() > 1 {
        println!("wall-clock exponent: {:.3}", scaling_exponent(&timings));
    }
    if let Some(path) = &args.out {
        std::fs::write(path, csv)?;
    }
    Ok(())
}
