use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gie::gaussian::{normal_form, omega2, StdTwoModeState};
use gie::oracle::{self, GridSpec, PureLocalMeasurement};
use gie::{engine, expr, report, scan};

#[derive(Parser)]
#[command(name = "gie", version, about = "Gaussian intrinsic entanglement of two-mode Gaussian states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StateArgs {
    /// JSON file with {"a":..,"b":..,"kx":..,"kp":..}; fields may be
    /// expression strings like "2*sqrt(2)".
    #[arg(long, conflicts_with = "params")]
    state: Option<PathBuf>,
    /// Inline parameters a,b,kx,kp (each an expression).
    #[arg(long, value_delimiter = ',')]
    params: Option<Vec<String>>,
}

impl StateArgs {
    fn parse(&self) -> gie::Result<StdTwoModeState> {
        match (&self.state, &self.params) {
            (Some(path), None) => StdTwoModeState::from_json(&fs::read_to_string(path)?),
            (None, Some(p)) => {
                if p.len() != 4 {
                    return Err(gie::Error::InvalidState(
                        "--params needs exactly a,b,kx,kp".into(),
                    ));
                }
                let vals: Vec<f64> = p.iter().map(|s| expr::eval(s)).collect::<gie::Result<_>>()?;
                StdTwoModeState::new_boundary(vals[0], vals[1], vals[2], vals[3])
            }
            _ => Err(gie::Error::InvalidState(
                "provide exactly one of --state or --params".into(),
            )),
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Grid counts n_theta,n_r,n_phi,n_tau,n_t.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    /// Squeezing cap for homodyne approximations (also Eve's t cap).
    #[arg(long, default_value_t = 8.0)]
    rmax: f64,
    /// Thermal cap for Eve's measurement.
    #[arg(long, default_value_t = 20.0)]
    taumax: f64,
    /// Refinement rounds of 4x zoom.
    #[arg(long, default_value_t = 3)]
    rounds: usize,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        let mut g = GridSpec {
            r_max: self.rmax,
            tau_max: self.taumax,
            refinement_rounds: self.rounds,
            ..GridSpec::default()
        };
        if let Some(counts) = &self.grid {
            assert_eq!(counts.len(), 5, "--grid needs n_theta,n_r,n_phi,n_tau,n_t");
            g.n_theta = counts[0];
            g.n_r = counts[1];
            g.n_phi = counts[2];
            g.n_tau = counts[3];
            g.n_t = counts[4];
        }
        g
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full report: classification, spectra, bounds, GIE, companion measures.
    Analyze {
        #[command(flatten)]
        state: StateArgs,
        /// Emit JSON instead of the human-readable report.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Seeded conjecture scan over one state class; writes CSV.
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// State class 1..=7.
        #[arg(long)]
        class: u8,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Symplectic diagonalization: S, spectrum, case tag, residuals.
    Williamson {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Brute-force sup-inf evaluation with convergence deltas.
    Oracle {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Write incumbent trajectories (CSV: stage, round, params, value).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GIE_LOG", "error")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                gie::Error::Numeric(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> gie::Result<()> {
    match cli.command {
        Command::Analyze { state, json, grid } => cmd_analyze(&state.parse()?, json, &grid.spec()),
        Command::Scan {
            n,
            seed,
            class,
            out,
            grid,
        } => cmd_scan(n, seed, class, &out, &grid.spec()),
        Command::Williamson { state } => cmd_williamson(&state.parse()?),
        Command::Oracle { state, grid, trace } => {
            cmd_oracle(&state.parse()?, &grid.spec(), trace.as_deref())
        }
    }
}

fn cmd_analyze(s: &StdTwoModeState, json: bool, grid: &GridSpec) -> gie::Result<()> {
    if !s.is_physical() {
        return Err(gie::Error::NonPhysical);
    }
    let a = report::analyze(s, grid)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report::to_json(&a)?).unwrap());
        return Ok(());
    }
    println!("state: a={:.6} b={:.6} kx={:.6} kp={:.6}", a.a, a.b, a.kx, a.kp);
    println!("class: {:?} (standard form: {})", a.class, a.standard);
    println!("physical: {}   entangled: {}", a.physical, a.entangled);
    println!("symplectic eigenvalues: nu1={:.12} nu2={:.12}", a.nu1, a.nu2);
    println!(
        "G~_min = {:.12}   double-homodyne optimal for all Eve CMs: {}",
        a.g_tilde_min, a.homodyne_cond_ok
    );
    match (a.gie.lower_l, a.gie.upper_u) {
        (Some(l), Some(u)) => println!("bounds: L = {l:.12}   U = {u:.12}"),
        (Some(l), None) => println!("bounds: L = {l:.12}   U = (no closed form)"),
        _ => {}
    }
    println!("GIE = {:.12}   method: {:?}", a.gie.value, a.gie.method);
    if let Some(eve) = &a.gie.optimal_eve {
        println!(
            "optimal Eve measurement: phi={:.6} tau={:.6} t={:.6} ({:?})",
            eve.phi, eve.tau, eve.t, eve.limit
        );
    }
    match a.gr2eof {
        Some(r) => println!(
            "GR2EoF = {r:.12}   |GIE - GR2EoF| = {:.3e}",
            (a.gie.value - r).abs()
        ),
        None => println!("GR2EoF: not available (needs a three-mode purification)"),
    }
    println!("log-negativity = {:.12}", a.log_negativity);
    Ok(())
}

fn cmd_scan(n: usize, seed: u64, class: u8, out: &std::path::Path, grid: &GridSpec) -> gie::Result<()> {
    if n < 1 {
        return Err(gie::Error::InvalidState("n must be >= 1".into()));
    }
    log::info!("scanning {n} class-{class} states with seed {seed}");
    let records = scan::scan(n, seed, class, grid)?;
    let file = fs::File::create(out)?;
    scan::write_csv(&records, std::io::BufWriter::new(file))?;
    let max_diff = records.iter().map(|r| r.abs_diff).fold(0.0f64, f64::max);
    println!(
        "wrote {} records to {}; max |gie - gr2eof| = {:.3e}",
        records.len(),
        out.display(),
        max_diff
    );
    Ok(())
}

fn cmd_williamson(s: &StdTwoModeState) -> gie::Result<()> {
    let dec = s.williamson()?;
    println!("case: {:?}", dec.case());
    println!("nu1 = {:.15}   nu2 = {:.15}", dec.nu1(), dec.nu2());
    println!("S =");
    for r in 0..4 {
        let row: Vec<String> = (0..4).map(|c| format!("{:>22.15e}", dec.s()[(r, c)])).collect();
        println!("  [{}]", row.join(" "));
    }
    let om = omega2();
    let r1 = (dec.s() * om * dec.s().transpose() - om).abs().max();
    let r2 = (dec.s() * s.cov_matrix() * dec.s().transpose() - normal_form(dec.nu1(), dec.nu2()))
        .abs()
        .max();
    println!("|S Omega S^T - Omega|_max = {r1:.3e}");
    println!("|S gamma S^T - diag(nu)|_max = {r2:.3e}");
    Ok(())
}

fn cmd_oracle(s: &StdTwoModeState, grid: &GridSpec, trace: Option<&std::path::Path>) -> gie::Result<()> {
    if !s.is_physical() {
        return Err(gie::Error::NonPhysical);
    }
    let dec = s.williamson()?;
    let p = s.purification(&dec)?;
    log::info!("running sup-inf at r_max = {}", grid.r_max);
    let run = oracle::sup_inf(&p, grid)?;
    println!(
        "sup-inf = {:.9} at thetaA={:.4} rA={:.2} thetaB={:.4} rB={:.2}",
        run.value, run.params[0], run.params[1], run.params[2], run.params[3]
    );
    let coarse = grid.with_r_max((grid.r_max - 2.0).max(1.0));
    let run_coarse = oracle::sup_inf(&p, &coarse)?;
    println!(
        "convergence: |value(r_max={}) - value(r_max={})| = {:.3e}",
        grid.r_max,
        coarse.r_max,
        (run.value - run_coarse.value).abs()
    );
    let ga = PureLocalMeasurement {
        theta: run.params[0],
        r: run.params[1],
    };
    let gb = PureLocalMeasurement {
        theta: run.params[2],
        r: run.params[3],
    };
    let inner = oracle::inf_over_eve(&p, &ga, &gb, grid)?;
    match inner.params.len() {
        3 => println!(
            "Eve argmin: phi={:.4} tau={:.4} t={:.4}",
            inner.params[0], inner.params[1], inner.params[2]
        ),
        7 => println!(
            "Eve argmin (heuristic two-mode family): phi1={:.4} tau1={:.4} t1={:.4} phi2={:.4} tau2={:.4} t2={:.4} beta={:.4}",
            inner.params[0], inner.params[1], inner.params[2], inner.params[3],
            inner.params[4], inner.params[5], inner.params[6]
        ),
        _ => println!("Eve argmin: (pure state, no purifying mode)"),
    }
    if let Some(r) = engine::gie(s).ok().filter(|r| {
        matches!(
            r.method,
            engine::GieMethod::ClosedForm(_) | engine::GieMethod::GenericGlemsProcedure
        )
    }) {
        println!(
            "closed form = {:.9}; oracle deviation = {:.3e}",
            r.value,
            (run.value - r.value).abs()
        );
    }
    if let Some(path) = trace {
        let mut w = std::io::BufWriter::new(fs::File::create(path)?);
        writeln!(w, "stage,round,params,value")?;
        for inc in &run.trajectory {
            writeln!(
                w,
                "sup,{},{},{:.14e}",
                inc.round,
                inc.params
                    .iter()
                    .map(|p| format!("{p:.14e}"))
                    .collect::<Vec<_>>()
                    .join(";"),
                inc.value
            )?;
        }
        for inc in &inner.trajectory {
            writeln!(
                w,
                "inf,{},{},{:.14e}",
                inc.round,
                inc.params
                    .iter()
                    .map(|p| format!("{p:.14e}"))
                    .collect::<Vec<_>>()
                    .join(";"),
                inc.value
            )?;
        }
        println!("trace written to {}", path.display());
    }
    // Exercise the generic eigensolver path so oracle reports stay honest
    // about purity of the extension.
    let spectrum = oracle::symplectic_spectrum(&p.assemble());
    let max_dev = spectrum
        .iter()
        .map(|nu| (nu - 1.0).abs())
        .fold(0.0f64, f64::max);
    println!("purification spectrum deviation from 1: {max_dev:.3e}");
    Ok(())
}
