use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eventzoom::codec;
use eventzoom::pipeline::{augment_dataset, bench, label_weight_histogram, AugmentOptions};
use eventzoom::raster::{downscale_frames, rasterize};
use eventzoom::synth::{gen_dataset, SynthGeometry};
use eventzoom::{verify, viz, AnchorMode, AugConfig, Error, Strategy};

const EXIT_RUNTIME: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "eventzoom",
    version,
    about = "Event-camera augmentation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic moving-shape dataset with a manifest.
    Synth {
        #[arg(long, default_value_t = 3)]
        classes: usize,
        #[arg(long, default_value_t = 50)]
        per_class: usize,
        #[arg(long, default_value = "48x48", value_parser = parse_size)]
        size: (usize, usize),
        #[arg(long, default_value_t = 8)]
        bins: usize,
        #[arg(long, default_value_t = 100_000)]
        duration: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert an EVT1 stream into an EVZF frame tensor.
    Rasterize {
        #[arg(long, default_value_t = 8)]
        bins: usize,
        /// Output geometry; defaults to the stream's own.
        #[arg(long, value_parser = parse_size)]
        size: Option<(usize, usize)>,
        input: PathBuf,
        output: PathBuf,
    },
    /// Augment every entry of a manifest.
    Augment(AugmentArgs),
    /// Dump a frame tensor as grayscale PGM images.
    Viz {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = ImageFormat::Pgm)]
        format: ImageFormat,
        /// Second tensor for a side-by-side strip.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Histogram of averaged donor weights over an augmented manifest.
    Stats {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 10)]
        bins: usize,
    },
    /// Time per-sample augmentation on 8x2x48x48 tensors.
    Bench {
        /// Strategy token, or `all`.
        #[arg(long, default_value = "eventzoom")]
        strategy: String,
        #[arg(long, default_value_t = 100)]
        iterations: usize,
        #[arg(long, default_value_t = 2)]
        mixnum: usize,
    },
    /// Run the invariant and oracle suite.
    Verify {
        /// Run a single criterion by id.
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Args)]
struct AugmentArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value = "eventzoom", value_parser = Strategy::from_str)]
    strategy: Strategy,
    #[arg(long, default_value_t = 1)]
    mixnum: usize,
    #[arg(long, default_value_t = 0.5)]
    lambda_min: f64,
    #[arg(long, default_value_t = 1.5)]
    lambda_max: f64,
    #[arg(long, default_value = "center", value_parser = AnchorMode::from_str)]
    anchor: AnchorMode,
    #[arg(long, default_value_t = 8)]
    bins: usize,
    #[arg(long, default_value = "48x48", value_parser = parse_size)]
    size: (usize, usize),
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 1.0)]
    mixup_alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    drop_ratio: f64,
    /// Directory for pre-rasterized inputs, reused across runs.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ImageFormat {
    Pgm,
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got {s:?}"))?;
    let dim = |v: &str| match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("invalid dimension {v:?} in {s:?}")),
    };
    Ok((dim(h)?, dim(w)?))
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::UnknownStrategy(_) => Failure::Usage(e.to_string()),
            e => Failure::Runtime(e),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EVZ_LOG", "error")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn manifest_root(manifest: &Path) -> PathBuf {
    manifest.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Synth {
            classes,
            per_class,
            size: (height, width),
            bins,
            duration,
            seed,
            out,
        } => {
            if !(2..=3).contains(&classes) {
                return Err(Failure::Usage(format!(
                    "--classes must be 2 or 3, got {classes}"
                )));
            }
            if duration == 0 || bins == 0 {
                return Err(Failure::Usage(
                    "--bins and --duration must be positive".into(),
                ));
            }
            let (Ok(height), Ok(width)) = (u16::try_from(height), u16::try_from(width)) else {
                return Err(Failure::Usage(format!(
                    "--size {height}x{width} exceeds 65535"
                )));
            };
            let geometry = SynthGeometry {
                bins,
                height,
                width,
                duration,
            };
            let manifest = gen_dataset(classes, per_class, &out, seed, geometry)?;
            println!("wrote {} samples to {}", manifest.len(), out.display());
        }
        Command::Rasterize {
            bins,
            size,
            input,
            output,
        } => {
            if bins == 0 {
                return Err(Failure::Usage("--bins must be positive".into()));
            }
            let stream = codec::load_evt(&input)?;
            let native = rasterize(&stream, bins, stream.height as usize, stream.width as usize)?;
            let frames = match size {
                Some((h, w)) if (h, w) != (native.height(), native.width()) => {
                    downscale_frames(&native, h, w)?
                }
                _ => native,
            };
            codec::save_evzf(&output, &frames, None)?;
            log::info!("{} events -> {:?}", stream.len(), frames.shape());
        }
        Command::Augment(args) => {
            let cfg = AugConfig {
                mixnum: args.mixnum,
                lambda_min: args.lambda_min,
                lambda_max: args.lambda_max,
                bins: args.bins,
                height: args.size.0,
                width: args.size.1,
                anchor_mode: args.anchor,
                strategy: args.strategy,
                master_seed: args.seed,
                mixup_alpha: args.mixup_alpha,
                drop_ratio: args.drop_ratio,
                ..Default::default()
            };
            cfg.validate()?;
            let manifest = codec::load_manifest(&args.manifest)?;
            let opts = AugmentOptions {
                workers: args.workers,
                cache_dir: args.cache_dir,
            };
            let report = augment_dataset(
                &manifest,
                &manifest_root(&args.manifest),
                &cfg,
                &args.out,
                &opts,
            )?;
            println!(
                "augmented {} samples ({} failed, {} donor redraws) into {}",
                report.outcomes.len(),
                report.failures.len(),
                report.total_redraws(),
                args.out.display()
            );
            for (i, e) in &report.failures {
                eprintln!("sample {i}: {e}");
            }
        }
        Command::Viz {
            input,
            out,
            format: ImageFormat::Pgm,
            compare,
        } => {
            let frames = codec::load_evzf(&input)?.frames;
            let other = compare.map(codec::load_evzf).transpose()?.map(|f| f.frames);
            let written = viz::write_viz(&frames, other.as_ref(), &out)?;
            println!("wrote {} images to {}", written.len(), out.display());
        }
        Command::Stats { manifest, bins } => {
            if bins == 0 {
                return Err(Failure::Usage("--bins must be positive".into()));
            }
            let m = codec::load_manifest(&manifest)?;
            let hist = label_weight_histogram(&m, &manifest_root(&manifest), bins)?;
            print!("{}", hist.to_table());
        }
        Command::Bench {
            strategy,
            iterations,
            mixnum,
        } => {
            let strategies = if strategy == "all" {
                Strategy::all()
            } else {
                vec![Strategy::from_str(&strategy)?]
            };
            let cfg = AugConfig {
                mixnum,
                ..Default::default()
            };
            print!("{}", bench(&cfg, &strategies, iterations)?.to_table());
        }
        Command::Verify { only } => {
            let outcomes = match only {
                Some(id) => vec![verify::run_one(&id)
                    .ok_or_else(|| Failure::Usage(format!("unknown criterion {id:?}")))?],
                None => verify::run_all(),
            };
            for o in &outcomes {
                println!("{o}");
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} passed, {failed} failed", outcomes.len() - failed);
            if failed > 0 {
                return Ok(ExitCode::from(EXIT_RUNTIME));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
