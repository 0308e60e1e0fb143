mod commands;
mod config;
mod output;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::ScanParam;
use crate::config::{read_config_file, CliResult, RunConfig};

#[derive(Parser)]
#[command(name = "deltawall", version, about = "Wave packet decay from a well bounded by an infinite wall and a delta barrier")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// |Ψ(x,t)|² snapshots, one file per time
    Density(Common),
    /// Survival probability P_in(t) and decay rate
    Survival {
        #[command(flatten)]
        common: Common,
        /// Add a direct-quadrature P_in column next to the closed form
        #[arg(long)]
        quadrature: bool,
    },
    /// Decay rate λ(t)
    Lambda(Common),
    /// Run the invariant suite and print a JSON report
    Verify(Common),
    /// P_in(0), λ peak and late slope across a parameter sweep
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "K|L|V0")]
        param: String,
        /// Comma-separated values
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
}

#[derive(Args)]
struct Common {
    /// key=value file; flags override it
    #[arg(long)]
    config: Option<String>,
    #[arg(long = "L", allow_hyphen_values = true)]
    length: Option<String>,
    #[arg(long = "V0", allow_hyphen_values = true)]
    strength: Option<String>,
    #[arg(long = "K", allow_hyphen_values = true)]
    k: Option<String>,
    /// gaussian | square | table:<path>
    #[arg(long)]
    sf: Option<String>,
    /// min:max:n[:log]
    #[arg(long = "x-grid", allow_hyphen_values = true)]
    x_grid: Option<String>,
    /// min:max:n[:log]
    #[arg(long = "t-grid", allow_hyphen_values = true)]
    t_grid: Option<String>,
    /// Upper limit of the survival integral (default L)
    #[arg(long, allow_hyphen_values = true)]
    upper: Option<String>,
    /// lo:hi
    #[arg(long = "fit-window", allow_hyphen_values = true)]
    fit_window: Option<String>,
    /// Output file (density: file prefix)
    #[arg(long)]
    out: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    #[arg(long = "tol-abs", allow_hyphen_values = true)]
    tol_abs: Option<String>,
    #[arg(long = "tol-rel", allow_hyphen_values = true)]
    tol_rel: Option<String>,
    /// Also write a gnuplot script next to the output
    #[arg(long)]
    gnuplot: bool,
    /// auto | closed_form | quadrature | contour
    #[arg(long)]
    mode: Option<String>,
}

impl Common {
    fn resolve(&self, allow_free: bool) -> CliResult<RunConfig> {
        let mut s: BTreeMap<String, String> = match &self.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        let flags = [
            ("L", &self.length),
            ("V0", &self.strength),
            ("K", &self.k),
            ("sf", &self.sf),
            ("x-grid", &self.x_grid),
            ("t-grid", &self.t_grid),
            ("upper", &self.upper),
            ("fit-window", &self.fit_window),
            ("out", &self.out),
            ("format", &self.format),
            ("tol-abs", &self.tol_abs),
            ("tol-rel", &self.tol_rel),
            ("mode", &self.mode),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                s.insert(k.to_string(), v.clone());
            }
        }
        if self.gnuplot {
            s.insert("gnuplot".into(), "true".into());
        }
        RunConfig::from_settings(&s, allow_free)
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.cmd {
        Command::Density(c) => commands::density(&c.resolve(false)?).map(|_| ()),
        Command::Survival { common, quadrature } => commands::survival(&common.resolve(false)?, quadrature),
        Command::Lambda(c) => commands::lambda(&c.resolve(false)?),
        Command::Verify(c) => commands::verify(&c.resolve(true)?),
        Command::Scan { common, param, values } => {
            let cfg = common.resolve(false)?;
            let param = ScanParam::parse(&param)?;
            commands::scan(&cfg, param, &commands::parse_values(&values)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("deltawall: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
