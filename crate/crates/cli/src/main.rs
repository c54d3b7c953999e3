use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hmvem::element::check_parameters;
use hmvem::geometry::{Point, Polygon};
use hmvem::harness::{
    check_element, patch_test, polygon_zoo, run_convergence, CsvTable, ManufacturedSolution, RateCheck, RunConfig,
};
use hmvem::mesh::{make_grid_seeded, save_mesh, CellGeometry, MeshKind, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "hmvem", version, about = "Nonconforming virtual elements for (-Δ)^m u = f")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Element identities on the built-in polygon zoo or a given polygon.
    CheckElement {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        /// JSON array of counterclockwise [x, y] vertices.
        #[arg(long)]
        polygon: Option<PathBuf>,
    },
    /// Reproduce a random polynomial of degree k from its own data.
    PatchTest {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "squares")]
        mesh: MeshKind,
        #[arg(long = "N", default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Degree of the random polynomial; defaults to k.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Error table for a manufactured solution on a sequence of meshes.
    Convergence(ConvergenceArgs),
    /// Write a generated mesh to a JSON file.
    MakeMesh {
        kind: MeshKind,
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a convergence CSV as a text table with rates.
    Report {
        csv: PathBuf,
        /// Also write a gnuplot-compatible data file.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ConvergenceArgs {
    /// JSON run configuration; replaces all other flags.
    #[arg(long, conflicts_with_all = ["m", "k", "mesh", "sizes", "perturb", "solution", "out", "seed"])]
    config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    m: Option<usize>,
    #[arg(long, required_unless_present = "config")]
    k: Option<usize>,
    #[arg(long, default_value = "squares")]
    mesh: MeshKind,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.0)]
    perturb: f64,
    #[arg(long, default_value = "sin")]
    solution: String,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl ConvergenceArgs {
    fn into_config(self) -> Result<RunConfig> {
        if let Some(path) = self.config {
            return RunConfig::load(&path).with_context(|| format!("reading {}", path.display()));
        }
        let config = RunConfig {
            m: self.m.expect("required by clap"),
            k: self.k.expect("required by clap"),
            mesh: self.mesh,
            sizes: self.sizes,
            perturb: self.perturb,
            solution: self.solution,
            out: self.out,
            seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

fn read_polygon(path: &Path) -> Result<CellGeometry> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let points: Vec<[f64; 2]> = serde_json::from_str(&text).context("polygon file must be a JSON array of [x, y]")?;
    let polygon = Polygon::new(points.into_iter().map(|[x, y]| Point::new(x, y)).collect())?;
    Ok(CellGeometry::from_polygon(polygon)?)
}

fn check_element_cmd(m: usize, k: usize, polygon: Option<PathBuf>) -> Result<bool> {
    check_parameters(m, k)?;
    let polygons: Vec<(String, CellGeometry)> = match polygon {
        Some(path) => vec![(path.display().to_string(), read_polygon(&path)?)],
        None => polygon_zoo().into_iter().map(|(n, g)| (n.to_string(), g)).collect(),
    };
    let checks = check_element(&polygons, &[(m, k)])?;
    println!(
        "{:<20} {:>10} {:>10} {:>10} {:>11} {:>10} {:>10} {:>9}",
        "polygon", "|PiD-I|", "|G-BD|", "asym", "lmin/lmax", "kernel", "oracle", "rank"
    );
    let mut ok = true;
    for c in &checks {
        println!(
            "{:<20} {:>10.2e} {:>10.2e} {:>10.2e} {:>11.2e} {:>10.2e} {:>10.2e} {:>4}/{:<4}",
            c.polygon, c.projector, c.gram, c.asymmetry, c.min_eigen_ratio, c.kernel, c.oracle, c.rank, c.expected_rank
        );
        for f in c.failures() {
            eprintln!("FAIL: {f} on {} (m={m}, k={k})", c.polygon);
            ok = false;
        }
    }
    let worst = checks.iter().map(|c| c.projector).fold(0.0, f64::max);
    println!("max |Pi*D - I| = {worst:.3e}");
    println!("{}", if ok { "all identities hold" } else { "identity check failed" });
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::CheckElement { m, k, polygon } => check_element_cmd(m, k, polygon),
        Command::PatchTest {
            m,
            k,
            mesh,
            n,
            perturb,
            seed,
            degree,
        } => {
            check_parameters(m, k)?;
            let grid = make_grid_seeded(mesh, n, perturb, seed)?;
            let degree = degree.unwrap_or(k);
            if degree > k {
                bail!("polynomial degree {degree} exceeds k = {k}");
            }
            let report = patch_test(&grid, m, k, degree, seed)?;
            println!(
                "patch test m={m} k={k} mesh={mesh} N={n} degree={degree}: dofs={} free={} residual={:.3e} relative dof error={:.3e}",
                report.ndofs, report.nfree, report.residual, report.error
            );
            if !report.passed() {
                eprintln!("FAIL: relative dof error {:.3e} exceeds 1e-6", report.error);
            }
            Ok(report.passed())
        }
        Command::Convergence(args) => {
            let config = args.into_config()?;
            let solution = ManufacturedSolution::by_name(&config.solution, config.m)?;
            let study = run_convergence(&config)?;
            let csv = study.to_csv();
            match &config.out {
                Some(path) => {
                    std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
                    print!("{}", CsvTable::parse(&csv)?.render());
                }
                None => print!("{csv}"),
            }
            match study.rate_check() {
                RateCheck::Passed { observed, required } => {
                    eprintln!("{}: e{} rate {observed:.3} >= {required:.2}", solution.name, config.m);
                    Ok(true)
                }
                RateCheck::Failed { observed, required } => {
                    eprintln!("FAIL: {}: e{} rate {observed:.3} < {required:.2}", solution.name, config.m);
                    Ok(false)
                }
                RateCheck::Skipped => {
                    eprintln!("rate check skipped");
                    Ok(true)
                }
            }
        }
        Command::MakeMesh {
            kind,
            n,
            perturb,
            seed,
            out,
        } => {
            let mesh = make_grid_seeded(kind, n, perturb, seed)?;
            save_mesh(&mesh, &out)?;
            println!(
                "wrote {}: {} vertices, {} edges, {} cells",
                out.display(),
                mesh.num_vertices(),
                mesh.num_edges(),
                mesh.num_cells()
            );
            Ok(true)
        }
        Command::Report { csv, gnuplot } => {
            let text = std::fs::read_to_string(&csv).with_context(|| format!("reading {}", csv.display()))?;
            let table = CsvTable::parse(&text)?;
            print!("{}", table.render());
            if let Some(path) = gnuplot {
                std::fs::write(&path, table.gnuplot()).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
