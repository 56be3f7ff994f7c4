//! End-to-end drivers: single solves, multi-level convergence studies and
//! their artifacts (error table, CSV, SVG convergence plot).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::assembly::{assemble, LinearSystem, RhsScheme};
use crate::boundary::{apply_dirichlet, apply_neumann, PdeData};
use crate::error::{Result, VemError};
use crate::face_projection::build_face_projection_table;
use crate::mesh::{
    build_topology, generate_hex_mesh, generate_tet_mesh, load_mesh, save_mesh, set_boundary,
    BoundaryPredicate, PolyhedralMesh,
};
use crate::norms::{fit_rates, h1_error, l2_error, StudyRecord};
use crate::solver::{solve, SolveStats, SolverConfig};

/// Manufactured solutions: each preset supplies u, grad u, r = -laplace u and
/// g_D = u analytically.
pub fn preset(name: &str) -> Result<PdeData> {
    match name {
        "linear" => Ok(PdeData {
            load: Box::new(|_, _, _| 0.0),
            exact: Some(Box::new(|x, y, z| x + 2.0 * y + 3.0 * z)),
            gradient: Box::new(|_, _, _| [1.0, 2.0, 3.0]),
            dirichlet: Box::new(|x, y, z| x + 2.0 * y + 3.0 * z),
        }),
        "quadratic" => Ok(PdeData {
            load: Box::new(|_, _, _| -6.0),
            exact: Some(Box::new(|x, y, z| x * x + y * y + z * z)),
            gradient: Box::new(|x, y, z| [2.0 * x, 2.0 * y, 2.0 * z]),
            dirichlet: Box::new(|x, y, z| x * x + y * y + z * z),
        }),
        "trig" => {
            use std::f64::consts::PI;
            Ok(PdeData {
                load: Box::new(|x, y, z| {
                    3.0 * PI * PI * (PI * x).sin() * (PI * y).sin() * (PI * z).sin()
                }),
                exact: Some(Box::new(|x, y, z| {
                    (PI * x).sin() * (PI * y).sin() * (PI * z).sin()
                })),
                gradient: Box::new(|x, y, z| {
                    [
                        PI * (PI * x).cos() * (PI * y).sin() * (PI * z).sin(),
                        PI * (PI * x).sin() * (PI * y).cos() * (PI * z).sin(),
                        PI * (PI * x).sin() * (PI * y).sin() * (PI * z).cos(),
                    ]
                }),
                dirichlet: Box::new(|x, y, z| (PI * x).sin() * (PI * y).sin() * (PI * z).sin()),
            })
        }
        other => Err(VemError::UnknownPreset(other.to_string())),
    }
}

/// Result of one full solve: nodal solution, the assembled system (kept for
/// error evaluation) and solver statistics.
pub struct SolveOutcome {
    pub solution: Vec<f64>,
    pub system: LinearSystem,
    pub stats: SolveStats,
}

/// Run the whole pipeline on one mesh: topology, face projections, assembly,
/// boundary conditions, solve.
pub fn solve_poisson(
    mesh: &PolyhedralMesh,
    pde: &PdeData,
    predicate: &BoundaryPredicate,
    scheme: RhsScheme,
    solver_config: &SolverConfig,
) -> Result<SolveOutcome> {
    let topology = build_topology(mesh)?;
    let face_table = build_face_projection_table(mesh, &topology)?;
    let bd = set_boundary(mesh, &topology, predicate);
    let mut system = assemble(mesh, &topology, &face_table, pde, scheme)?;
    apply_neumann(&mut system, mesh, &bd, &face_table, pde)?;
    let (reduced, mut solution) = apply_dirichlet(&system, mesh, &bd, pde)?;
    let (x, stats) = solve(&reduced.matrix, &reduced.rhs, solver_config)?;
    reduced.scatter_solution(&x, &mut solution);
    Ok(SolveOutcome {
        solution,
        system,
        stats,
    })
}

/// Mesh sequence of a convergence study.
#[derive(Debug, Clone)]
pub enum MeshSource {
    /// Built-in generator ("hex" or "tet") with one subdivision count per
    /// level.
    Generated { kind: MeshKind, levels: Vec<usize> },
    /// Explicit mesh files, one per level.
    Files(Vec<PathBuf>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshKind {
    Hex,
    Tet,
}

impl std::str::FromStr for MeshKind {
    type Err = VemError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hex" => Ok(MeshKind::Hex),
            "tet" => Ok(MeshKind::Tet),
            other => Err(VemError::Config(format!(
                "unknown mesh kind '{other}' (expected hex or tet)"
            ))),
        }
    }
}

pub fn generate(kind: MeshKind, n: usize) -> PolyhedralMesh {
    match kind {
        MeshKind::Hex => generate_hex_mesh(n),
        MeshKind::Tet => generate_tet_mesh(n),
    }
}

/// Configuration of a convergence study.
pub struct StudyConfig {
    pub source: MeshSource,
    pub solution: String,
    pub neumann: String,
    pub rhs_scheme: RhsScheme,
    pub solver: SolverConfig,
    pub out_csv: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
}

/// Study results: one record per level plus fitted rates.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub records: Vec<StudyRecord>,
    pub rate_l2: f64,
    pub rate_h1: f64,
}

fn level_error(level: usize) -> impl FnOnce(VemError) -> VemError {
    move |source| VemError::StudyLevel {
        level,
        source: Box::new(source),
    }
}

/// Run a multi-level study: solve on every mesh, compute both error norms,
/// fit the rates and write the requested artifacts.
pub fn run_study(config: &StudyConfig) -> Result<ConvergenceStudy> {
    let pde = preset(&config.solution)?;
    let predicate = BoundaryPredicate::parse(&config.neumann)?;
    let exact = pde
        .exact
        .as_ref()
        .ok_or_else(|| VemError::Config("study needs a preset with an exact solution".into()))?;

    let n_levels = match &config.source {
        MeshSource::Generated { levels, .. } => levels.len(),
        MeshSource::Files(files) => files.len(),
    };
    if n_levels == 0 {
        return Err(VemError::Config("study needs at least one level".into()));
    }

    let mut records = Vec::with_capacity(n_levels);
    for level in 0..n_levels {
        let mesh = match &config.source {
            MeshSource::Generated { kind, levels } => generate(*kind, levels[level]),
            MeshSource::Files(files) => load_mesh(&files[level]).map_err(level_error(level))?,
        };
        let outcome = solve_poisson(&mesh, &pde, &predicate, config.rhs_scheme, &config.solver)
            .map_err(level_error(level))?;
        let err_l2 = l2_error(
            &mesh,
            &outcome.solution,
            &outcome.system.projections,
            &outcome.system.elem_dofs,
            exact,
        )
        .map_err(level_error(level))?;
        let err_h1 = h1_error(
            &mesh,
            &outcome.solution,
            &outcome.system.projections,
            &outcome.system.elem_dofs,
            &pde.gradient,
        )
        .map_err(level_error(level))?;
        records.push(StudyRecord {
            dofs: mesh.n_nodes(),
            h: (1.0 / mesh.n_elements() as f64).cbrt(),
            err_l2,
            err_h1,
        });
    }

    let (rate_l2, rate_h1) = fit_rates(&records);
    let study = ConvergenceStudy {
        records,
        rate_l2,
        rate_h1,
    };
    if let Some(path) = &config.out_csv {
        write_csv(&study, path)?;
    }
    if let Some(path) = &config.out_svg {
        write_svg(&study, path)?;
    }
    Ok(study)
}

/// Error table in the four-column layout #Dof, h, ErrL2, ErrH1 (six
/// significant digits), followed by the fitted rates.
pub fn format_table(study: &ConvergenceStudy) -> String {
    let mut out = String::new();
    out.push_str("Table: Error\n");
    out.push_str(&format!(
        "{:>8}  {:>12}  {:>12}  {:>12}\n",
        "#Dof", "h", "ErrL2", "ErrH1"
    ));
    for r in &study.records {
        out.push_str(&format!(
            "{:>8}  {:>12.5e}  {:>12.5e}  {:>12.5e}\n",
            r.dofs, r.h, r.err_l2, r.err_h1
        ));
    }
    if study.records.len() > 1 {
        out.push_str(&format!(
            "Fitted rates: L2 {:.2}, H1 {:.2}\n",
            study.rate_l2, study.rate_h1
        ));
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| VemError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// CSV with the same rows as the printed table at full double precision.
pub fn write_csv(study: &ConvergenceStudy, path: &Path) -> Result<()> {
    let mut text = String::from("dofs,h,err_l2,err_h1\n");
    for r in &study.records {
        let _ = writeln!(
            text,
            "{},{:.17e},{:.17e},{:.17e}",
            r.dofs, r.h, r.err_l2, r.err_h1
        );
    }
    write_text(path, &text)
}

/// Self-contained log-log SVG plot of both error curves with slope markers.
pub fn write_svg(study: &ConvergenceStudy, path: &Path) -> Result<()> {
    write_text(path, &render_svg(study))
}

fn render_svg(study: &ConvergenceStudy) -> String {
    let width = 640.0;
    let height = 480.0;
    let margin = 60.0;

    let xs: Vec<f64> = study.records.iter().map(|r| r.h.log10()).collect();
    let mut ys: Vec<f64> = Vec::new();
    for r in &study.records {
        ys.push(r.err_l2.max(1e-16).log10());
        ys.push(r.err_h1.max(1e-16).log10());
    }
    let (xmin, xmax) = bounds(&xs);
    let (ymin, ymax) = bounds(&ys);
    let pad = |lo: f64, hi: f64| {
        let d = (hi - lo).max(0.5);
        (lo - 0.08 * d, hi + 0.08 * d)
    };
    let (xmin, xmax) = pad(xmin, xmax);
    let (ymin, ymax) = pad(ymin, ymax);

    let sx = (width - 2.0 * margin) / (xmax - xmin);
    let sy = (height - 2.0 * margin) / (ymax - ymin);
    let px = |x: f64| margin + (x - xmin) * sx;
    let py = |y: f64| height - margin - (y - ymin) * sy;

    let polyline = |values: Vec<(f64, f64)>, color: &str| {
        let pts: Vec<String> = values
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let mut s = format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            pts.join(" ")
        );
        for &(x, y) in &values {
            let _ = writeln!(
                s,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{color}\"/>",
                px(x),
                py(y)
            );
        }
        s
    };

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    );
    // Axes.
    let _ = write!(
        svg,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = margin,
        b = height - margin,
        r = width - margin,
        t = margin
    );
    // Tick labels at the data abscissae and at integer decades of the error.
    for r in &study.records {
        let x = px(r.h.log10());
        let _ = writeln!(
            svg,
            "<text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">{:.3}</text>",
            height - margin + 18.0,
            r.h
        );
    }
    let mut decade = ymin.ceil() as i64;
    while (decade as f64) <= ymax {
        let y = py(decade as f64);
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"{y:.1}\" font-size=\"12\" text-anchor=\"end\">1e{decade}</text>\n\
             <line x1=\"{m}\" y1=\"{y:.1}\" x2=\"{r}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>\n",
            margin - 8.0,
            m = margin,
            r = width - margin,
        );
        decade += 1;
    }
    // Error curves.
    let l2: Vec<(f64, f64)> = study
        .records
        .iter()
        .map(|r| (r.h.log10(), r.err_l2.max(1e-16).log10()))
        .collect();
    let h1: Vec<(f64, f64)> = study
        .records
        .iter()
        .map(|r| (r.h.log10(), r.err_h1.max(1e-16).log10()))
        .collect();
    svg.push_str(&polyline(l2, "#1f77b4"));
    svg.push_str(&polyline(h1, "#d62728"));
    // Legend with fitted slopes.
    let _ = write!(
        svg,
        "<text x=\"{x}\" y=\"{y}\" font-size=\"14\" fill=\"#1f77b4\">ErrL2 (slope {:.2})</text>\n\
         <text x=\"{x}\" y=\"{y2}\" font-size=\"14\" fill=\"#d62728\">ErrH1 (slope {:.2})</text>\n\
         <text x=\"{xc}\" y=\"{yb}\" font-size=\"13\" text-anchor=\"middle\">h</text>\n",
        study.rate_l2,
        study.rate_h1,
        x = margin + 12.0,
        y = margin + 18.0,
        y2 = margin + 38.0,
        xc = width / 2.0,
        yb = height - 16.0,
    );
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Summary of a single-mesh solve written by [`run_solve`].
pub struct SolveSummary {
    pub dofs: usize,
    pub stats: SolveStats,
}

/// Solve on one mesh and write the nodal solution as CSV
/// (node index, x, y, z, u_h).
pub fn run_solve(
    mesh: &PolyhedralMesh,
    pde: &PdeData,
    predicate: &BoundaryPredicate,
    scheme: RhsScheme,
    solver_config: &SolverConfig,
    out: Option<&Path>,
) -> Result<SolveSummary> {
    let outcome = solve_poisson(mesh, pde, predicate, scheme, solver_config)?;
    if let Some(path) = out {
        let mut text = String::from("node,x,y,z,u\n");
        for (i, p) in mesh.nodes.iter().enumerate() {
            let _ = writeln!(
                text,
                "{},{:.17e},{:.17e},{:.17e},{:.17e}",
                i, p.x, p.y, p.z, outcome.solution[i]
            );
        }
        write_text(path, &text)?;
    }
    Ok(SolveSummary {
        dofs: mesh.n_nodes(),
        stats: outcome.stats,
    })
}

/// Generate a mesh and write it in the JSON format.
pub fn mesh_gen(kind: MeshKind, n: usize, out: &Path) -> Result<()> {
    save_mesh(&generate(kind, n), out)
}
