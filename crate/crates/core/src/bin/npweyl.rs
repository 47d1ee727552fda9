use clap::{Args, Parser, Subcommand};
use npweyl::cli::{
    cmd_geometry, cmd_mobius, cmd_spectrum, cmd_sphere_exact, exit_code_for, ConfigOverlay,
    RunConfig,
};
use npweyl::error::Result;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "npweyl",
    version,
    about = "Boundary-operator spectra and Willmore-energy invariants of closed surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Area, Willmore energy, Gauss-Bonnet check, predicted decay constant
    Geometry(CommonArgs),
    /// Assemble the operator, solve the dense spectrum, fit the decay constant
    Spectrum(CommonArgs),
    /// Enumerate the exact sphere spectrum as CSV
    SphereExact {
        /// Number of eigenvalues to enumerate
        #[arg(long)]
        count: usize,
        /// Output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Geometric invariants before and after a Möbius composition
    Mobius(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// sphere | ellipsoid | torus | clifford | mesh:<path>
    #[arg(long)]
    shape: Option<String>,
    /// Sphere radius
    #[arg(long)]
    rho: Option<f64>,
    /// Ellipsoid semi-axis a
    #[arg(long)]
    a: Option<f64>,
    /// Ellipsoid semi-axis b
    #[arg(long)]
    b: Option<f64>,
    /// Ellipsoid semi-axis c
    #[arg(long)]
    c: Option<f64>,
    /// Torus ring radius (distance of the tube center from the axis)
    #[arg(long = "R")]
    big_r: Option<f64>,
    /// Torus tube radius
    #[arg(long = "r")]
    small_r: Option<f64>,
    /// Lattice resolution, e.g. 64x128
    #[arg(long)]
    res: Option<String>,
    /// Triangle mesh path (OFF or OBJ) when --shape mesh
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Fit window J:K over eigenvalue ranks
    #[arg(long)]
    window: Option<String>,
    /// Output directory (default ".")
    #[arg(long)]
    out: Option<PathBuf>,
    /// Möbius composition, e.g. "translate:1,0,0;scale:2;invert:3,0,0,1"
    #[arg(long)]
    mobius: Option<String>,
    /// Run seed recorded with the outputs
    #[arg(long)]
    seed: Option<u64>,
    /// Config file with key=value lines (flags take precedence)
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(self) -> Result<RunConfig> {
        let flags = ConfigOverlay {
            shape: self.shape,
            rho: self.rho,
            a: self.a,
            b: self.b,
            c: self.c,
            big_r: self.big_r,
            small_r: self.small_r,
            res: self.res,
            mesh: self.mesh,
            window: self.window,
            out: self.out,
            mobius: self.mobius,
            seed: self.seed,
        };
        let base = match &self.config {
            Some(path) => ConfigOverlay::from_file(path)?,
            None => ConfigOverlay::default(),
        };
        RunConfig::resolve(flags.over(base))
    }
}

fn run() -> Result<()> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version print and exit cleanly; anything else is a
            // configuration error under the exit-code contract
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    match cli.command {
        Command::Geometry(args) => cmd_geometry(&args.resolve()?),
        Command::Spectrum(args) => cmd_spectrum(&args.resolve()?),
        Command::SphereExact { count, out } => {
            cmd_sphere_exact(count, &out.unwrap_or_else(|| PathBuf::from(".")))
        }
        Command::Mobius(args) => cmd_mobius(&args.resolve()?),
    }
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err}");
        std::process::exit(exit_code_for(&err));
    }
}
