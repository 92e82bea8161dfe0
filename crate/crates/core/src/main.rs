use clap::{Args, Parser, Subcommand, ValueEnum};
use donut_eversion::certify::Certificate;
use donut_eversion::eversion::Stage;
use donut_eversion::export::{write_mesh, MeshFormat};
use donut_eversion::pipeline::{export_s3_figures, run, run_disc, verify_directory, PipelineConfig};
use donut_eversion::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "donut-eversion", version, about = "Sphere eversion through a twisted solid torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build D_0, run the eversion, certify it and write frames
    Evert(Overrides),
    /// Build and certify D_0 only
    Disc(Overrides),
    /// Re-run mesh checks on frames written by `evert`
    Verify {
        #[arg(long, default_value = "out")]
        dir: PathBuf,
    },
    /// Export stereographic figures of the S³ picture
    S3(Overrides),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Obj,
    Ply,
}

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    Inflate,
    Align,
    Spin,
    Realign,
    Deflate,
}

#[derive(Args)]
struct Overrides {
    /// JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Mesh file format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Number of frames
    #[arg(long)]
    frames: Option<usize>,
    /// Sphere grid rings, pole to pole
    #[arg(long)]
    sphere_rings: Option<usize>,
    /// Rings in each cap
    #[arg(long)]
    cap_rings: Option<usize>,
    /// Sphere grid columns
    #[arg(long)]
    columns: Option<usize>,
    /// D_0 grid rings
    #[arg(long)]
    disc_rings: Option<usize>,
    /// D_0 grid columns
    #[arg(long)]
    disc_columns: Option<usize>,
    /// Spin start angle θ₀, in (0, π/4]
    #[arg(long)]
    theta0: Option<f64>,
    /// Offset thickness
    #[arg(long)]
    delta: Option<f64>,
    /// Pillow rim parameter ε
    #[arg(long)]
    epsilon: Option<f64>,
    /// Least singular value required of every frame
    #[arg(long)]
    sigma_floor: Option<f64>,
    /// Write only frames of these stages (repeatable)
    #[arg(long = "stage", value_enum)]
    stages: Vec<StageArg>,
    /// Skip writing frame files
    #[arg(long)]
    no_frames: bool,
    /// Skip the D_0 certificate during `evert`
    #[arg(long)]
    skip_disc: bool,
}

impl Overrides {
    fn config(&self) -> donut_eversion::Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::from_file(p)?,
            None => PipelineConfig::default(),
        };
        macro_rules! set {
            ($field:expr, $value:expr) => {
                if let Some(v) = $value {
                    $field = v;
                }
            };
        }
        set!(c.output.directory, self.out.clone());
        set!(
            c.output.format,
            self.format.map(|f| match f {
                Format::Obj => MeshFormat::Obj,
                Format::Ply => MeshFormat::Ply,
            })
        );
        set!(c.grid.frames, self.frames);
        set!(c.grid.sphere_rings, self.sphere_rings);
        set!(c.grid.cap_rings, self.cap_rings);
        set!(c.grid.columns, self.columns);
        set!(c.grid.disc_rings, self.disc_rings);
        set!(c.grid.disc_columns, self.disc_columns);
        set!(c.schedule.theta0, self.theta0);
        set!(c.schedule.delta, self.delta);
        set!(c.schedule.epsilon, self.epsilon);
        set!(c.tolerances.sigma_floor, self.sigma_floor);
        if !self.stages.is_empty() {
            c.output.stages = self
                .stages
                .iter()
                .map(|s| match s {
                    StageArg::Inflate => Stage::Inflate,
                    StageArg::Align => Stage::Align,
                    StageArg::Spin => Stage::Spin,
                    StageArg::Realign => Stage::Realign,
                    StageArg::Deflate => Stage::Deflate,
                })
                .collect();
        }
        if self.no_frames {
            c.output.write_frames = false;
        }
        if self.skip_disc {
            c.checks.disc = false;
        }
        c.validate()?;
        Ok(c)
    }
}

fn print_certificate(cert: &Certificate) {
    for c in &cert.checks {
        println!("{:<36} {:>14.6e}  {}", c.name, c.value, if c.passed { "pass" } else { "FAIL" });
    }
    let failed: Vec<&str> = cert.failures().iter().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        println!("certificate: pass");
    } else {
        println!("certificate: FAIL ({})", failed.join(", "));
    }
}

fn exit_for(cert: &Certificate) -> ExitCode {
    if cert.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn execute(cli: Cli) -> donut_eversion::Result<ExitCode> {
    match cli.command {
        Command::Evert(o) => {
            let c = o.config()?;
            let r = run(&c)?;
            print_certificate(&r.certificate);
            if c.output.write_frames {
                println!("{} frames and report written to {}", r.manifest.len(), c.output.directory.display());
            }
            Ok(exit_for(&r.certificate))
        }
        Command::Disc(o) => {
            let c = o.config()?;
            let (patch, report, cert) = run_disc(&c)?;
            if c.output.write_frames {
                std::fs::create_dir_all(&c.output.directory)?;
                let name = format!("disc.{}", c.output.format.extension());
                write_mesh(&patch.mesh(), c.output.format, &c.output.directory.join(&name))?;
                std::fs::write(c.output.directory.join("disc_report.json"), serde_json::to_string_pretty(&(&report, &cert))?)?;
            }
            print_certificate(&cert);
            Ok(exit_for(&cert))
        }
        Command::Verify { dir } => {
            let cert = verify_directory(&dir)?;
            print_certificate(&cert);
            Ok(exit_for(&cert))
        }
        Command::S3(o) => {
            let c = o.config()?;
            let dir = c.output.directory.join("s3");
            let f = export_s3_figures(&dir, c.output.format, 128)?;
            std::fs::write(dir.join("s3_report.json"), serde_json::to_string_pretty(&f)?)?;
            println!("{} files written to {}", f.files.len(), dir.display());
            println!("clifford torus fit residual {:.3e}", f.clifford_fit_residual);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e @ (Error::Config(_) | Error::Json(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
