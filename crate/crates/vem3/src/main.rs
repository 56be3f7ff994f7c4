//! Command-line front end: single solves, convergence studies and mesh
//! generation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vem3::assembly::RhsScheme;
use vem3::mesh::{load_mesh, BoundaryPredicate};
use vem3::solver::{Method, MethodUsed, SolverConfig};
use vem3::study::{self, format_table, run_study, MeshKind, MeshSource, StudyConfig};
use vem3::VemError;

#[derive(Parser)]
#[command(
    name = "vem3",
    version,
    about = "Linear virtual element solver for the 3-D Poisson equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolverArgs {
    /// Solver: auto, direct or cg.
    #[arg(long, default_value = "auto")]
    solver: String,
    /// Relative residual target of the CG solver.
    #[arg(long, default_value_t = 1e-10)]
    cg_tol: f64,
    /// Right-hand side scheme: quad3 or onepoint.
    #[arg(long, default_value = "quad3")]
    rhs: String,
}

impl SolverArgs {
    fn solver_config(&self) -> Result<SolverConfig, VemError> {
        let method: Method = self.solver.parse()?;
        if !(self.cg_tol > 0.0 && self.cg_tol < 1.0) {
            return Err(VemError::Config(format!(
                "cg tolerance {} must lie in (0, 1)",
                self.cg_tol
            )));
        }
        Ok(SolverConfig {
            method,
            tolerance: self.cg_tol,
            ..Default::default()
        })
    }

    fn rhs_scheme(&self) -> Result<RhsScheme, VemError> {
        self.rhs.parse()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a multi-level convergence study and print the error table.
    Study {
        /// Mesh generator: hex or tet.
        #[arg(long, default_value = "hex", conflicts_with = "mesh_files")]
        gen: String,
        /// Subdivisions per level, e.g. 2,4,8.
        #[arg(long, value_delimiter = ',', conflicts_with = "mesh_files")]
        levels: Vec<usize>,
        /// JSON mesh files, one per level (alternative to --gen/--levels).
        #[arg(long, num_args = 1..)]
        mesh_files: Vec<PathBuf>,
        /// Solution preset: linear, quadratic or trig.
        #[arg(long, default_value = "trig")]
        solution: String,
        /// Neumann predicate, e.g. "x==0", unions with '|', or "none".
        #[arg(long, default_value = "none")]
        neumann: String,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the study rows as CSV.
        #[arg(long)]
        out_csv: Option<PathBuf>,
        /// Write a log-log convergence plot as SVG.
        #[arg(long)]
        out_svg: Option<PathBuf>,
    },
    /// Solve on a single mesh and write the nodal solution as CSV.
    Solve {
        /// JSON mesh file.
        #[arg(long)]
        mesh: PathBuf,
        /// Solution preset: linear, quadratic or trig.
        #[arg(long)]
        solution: String,
        /// Neumann predicate, e.g. "x==0" or "none".
        #[arg(long, default_value = "none")]
        neumann: String,
        #[command(flatten)]
        solver: SolverArgs,
        /// Output CSV path (node, x, y, z, u).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a structured mesh and write it as JSON.
    MeshGen {
        /// Mesh kind: hex or tet.
        #[arg(long)]
        kind: String,
        /// Subdivisions per axis.
        #[arg(long)]
        n: usize,
        /// Output path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), VemError> {
    match cli.command {
        Command::Study {
            gen,
            levels,
            mesh_files,
            solution,
            neumann,
            solver,
            out_csv,
            out_svg,
        } => {
            let source = if mesh_files.is_empty() {
                if levels.is_empty() {
                    return Err(VemError::Config(
                        "study needs --levels or --mesh-files".into(),
                    ));
                }
                if levels.contains(&0) {
                    return Err(VemError::Config("levels must be positive".into()));
                }
                MeshSource::Generated {
                    kind: gen.parse::<MeshKind>()?,
                    levels,
                }
            } else {
                for (level, path) in mesh_files.iter().enumerate() {
                    let mesh = load_mesh(path).map_err(|source| VemError::StudyLevel {
                        level,
                        source: Box::new(source),
                    })?;
                    warn_on_geometry(&mesh);
                }
                MeshSource::Files(mesh_files)
            };
            let config = StudyConfig {
                source,
                solution,
                neumann,
                rhs_scheme: solver.rhs_scheme()?,
                solver: solver.solver_config()?,
                out_csv,
                out_svg,
            };
            let study = run_study(&config)?;
            print!("{}", format_table(&study));
            Ok(())
        }
        Command::Solve {
            mesh,
            solution,
            neumann,
            solver,
            out,
        } => {
            let pde = study::preset(&solution)?;
            let predicate = BoundaryPredicate::parse(&neumann)?;
            let mesh = load_mesh(&mesh)?;
            warn_on_geometry(&mesh);
            let summary = study::run_solve(
                &mesh,
                &pde,
                &predicate,
                solver.rhs_scheme()?,
                &solver.solver_config()?,
                out.as_deref(),
            )?;
            match summary.stats.method {
                MethodUsed::Direct => println!(
                    "solved {} dofs (direct, residual {:.3e})",
                    summary.dofs, summary.stats.relative_residual
                ),
                MethodUsed::Cg => println!(
                    "solved {} dofs (cg, {} iterations, residual {:.3e})",
                    summary.dofs, summary.stats.iterations, summary.stats.relative_residual
                ),
            }
            Ok(())
        }
        Command::MeshGen { kind, n, out } => {
            if n == 0 {
                return Err(VemError::Config("n must be positive".into()));
            }
            study::mesh_gen(kind.parse::<MeshKind>()?, n, &out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn warn_on_geometry(mesh: &vem3::mesh::PolyhedralMesh) {
    for warning in vem3::geometry::mesh_diagnostics(mesh) {
        eprintln!("warning: {warning}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
