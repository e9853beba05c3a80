use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use p1nc_core::analysis::{
    convergence_study, error_norms, parse_h, parse_h_range, rank_deficiency_study, rank_triples,
    scheme_equivalence_study, unit_mesh, ManufacturedProblem,
};
use p1nc_core::linalg::market::write_matrix_market;
use p1nc_core::schemes::export::{write_face_values_csv, write_solution_vtk};
use p1nc_core::schemes::option_system;
use p1nc_core::space::{constraint_rank_oracle, dim_formulas, DimensionRecord};
use p1nc_core::{BoundaryCondition, GridSpec, QuadratureRule, SchemeOption};

use crate::config::run_hash;
use crate::{parse_bcs, ConvergenceArgs, DimsArgs, EquivalenceArgs, RankdefArgs, SolveArgs, Status};

/// Bad combination of flags that clap cannot express.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((path, BufWriter::new(file)))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let (path, mut w) = create(dir, name)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(path)
}

fn report_written(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

fn grids(a: &DimsArgs) -> Result<Vec<Vec<usize>>> {
    let sweep = |dim: usize, max: usize| -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..dim {
            out = out.into_iter().flat_map(|g| (1..=max).map(move |n| [g.clone(), vec![n]].concat())).collect();
        }
        out
    };
    match (&a.two_d, &a.three_d, a.sweep_2d, a.sweep_3d) {
        (Some(c), ..) | (_, Some(c), ..) => Ok(vec![c.clone()]),
        (_, _, Some(m), _) => Ok(sweep(2, m)),
        (_, _, _, Some(m)) => Ok(sweep(3, m)),
        _ => Err(usage("one of --2d, --3d, --sweep-2d or --sweep-3d is required")),
    }
}

fn record_fields(r: &DimensionRecord) -> [String; 4] {
    [r.space, r.ker_representation, r.ker_stiffness, r.span_nodes].map(|v| v.to_string())
}

pub fn dims(a: &DimsArgs) -> Result<Status> {
    let bcs = parse_bcs(&a.bc)?;
    let grids = grids(a)?;
    let dim = grids[0].len();
    let specs = grids.iter().map(|g| GridSpec::square_cells(g)).collect::<Result<Vec<_>, _>>()?;

    let mut header: Vec<&str> = ["nx", "ny", "nz"][..dim].to_vec();
    header.extend(["bc", "space", "ker_representation", "ker_stiffness", "span_nodes"]);
    if a.verify {
        header.extend([
            "oracle_space",
            "oracle_ker_representation",
            "oracle_ker_stiffness",
            "oracle_span_nodes",
            "match",
        ]);
    }

    let mut buf = csv::Writer::from_writer(Vec::new());
    buf.write_record(&header)?;
    let mut mismatches = 0;
    for (g, spec) in grids.iter().zip(&specs) {
        for &bc in &bcs {
            let predicted = dim_formulas(spec, bc);
            let mut row: Vec<String> = g.iter().map(ToString::to_string).collect();
            row.push(bc.name().to_string());
            row.extend(record_fields(&predicted));
            if a.verify {
                let oracle = constraint_rank_oracle(spec, bc)?;
                let ok = oracle == predicted;
                mismatches += usize::from(!ok);
                row.extend(record_fields(&oracle));
                row.push(if ok { "match" } else { "MISMATCH" }.to_string());
            }
            buf.write_record(&row)?;
        }
    }
    let text = String::from_utf8(buf.into_inner()?)?;
    io::stdout().write_all(text.as_bytes())?;

    if a.save {
        let mut pairs = vec![("command", "dims".to_string()), ("bc", a.bc.to_ascii_lowercase())];
        pairs.extend(grids.iter().map(|g| ("grid", format!("{g:?}"))));
        pairs.push(("verify", a.verify.to_string()));
        let path = write_text(&a.output.output_dir, &format!("dims_{dim}d_{}.csv", run_hash(&pairs)), &text)?;
        report_written(&[path]);
    }
    if mismatches > 0 {
        eprintln!("{mismatches} mismatch(es) between formulas and oracle");
        return Ok(Status::CheckFailed);
    }
    Ok(Status::Ok)
}

pub fn solve(a: &SolveArgs) -> Result<Status> {
    let n = parse_h(&a.h)?;
    let problem = ManufacturedProblem::new(a.example);
    let cfg = a.solver.scheme_config();
    let mesh = unit_mesh(problem.dim(), n, BoundaryCondition::Periodic)?;
    let f = |x: [f64; 3]| problem.f(x);
    let (u, report) = p1nc_core::schemes::solve_option(a.option, &mesh, &f, &cfg)?;
    let norms = error_norms(&problem, &u, &QuadratureRule::gauss(cfg.error_quadrature_order, problem.dim()));

    let mut pairs = vec![
        ("command", "solve".to_string()),
        ("example", a.example.name().to_string()),
        ("n", n.to_string()),
        ("option", a.option.to_string()),
    ];
    pairs.extend(a.solver.pairs());
    let stem = format!("solve_{}_opt{}_{}", a.example.name(), a.option, run_hash(&pairs));
    let dir = &a.output.output_dir;

    let (vtk, mut w) = create(dir, &format!("{stem}.vtk"))?;
    write_solution_vtk(&u, &format!("{} h=1/{n} option {}", a.example.name(), a.option), &mut w)?;
    w.flush()?;
    let (faces, mut w) = create(dir, &format!("{stem}_faces.csv"))?;
    write_face_values_csv(&u, &mut w)?;
    w.flush()?;
    let mut written = vec![vtk, faces];
    if a.save_matrix {
        let sys = option_system(a.option, &mesh, &f, &cfg)?;
        let (mtx, mut w) = create(dir, &format!("{stem}.mtx"))?;
        write_matrix_market(&sys.matrix, &mut w)?;
        w.flush()?;
        written.push(mtx);
    }
    report_written(&written);

    println!(
        "example={} h=1/{n} option={} unknowns={} iterations={} residual={:.3e} converged={} h1_error={:.4e} l2_error={:.4e} seconds={:.3}",
        a.example.name(),
        a.option,
        u.coeffs().len(),
        report.iterations,
        report.residual,
        report.converged,
        norms.h1,
        norms.l2,
        report.wall_time.as_secs_f64(),
    );
    Ok(if report.converged { Status::Ok } else { Status::CheckFailed })
}

fn options(s: &str) -> Result<Vec<SchemeOption>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(SchemeOption::ALL.to_vec());
    }
    s.split(',').map(|t| t.parse::<SchemeOption>().map_err(Into::into)).collect()
}

pub fn convergence(a: &ConvergenceArgs) -> Result<Status> {
    let ns = parse_h_range(&a.h)?;
    let problem = ManufacturedProblem::new(a.example);
    let cfg = a.solver.scheme_config();
    let mut failures = 0;
    for option in options(&a.option)? {
        let table = convergence_study(&problem, option, &ns, &cfg)?;

        let mut pairs = vec![
            ("command", "convergence".to_string()),
            ("example", a.example.name().to_string()),
            ("option", option.to_string()),
            ("h", format!("{ns:?}")),
        ];
        pairs.extend(a.solver.pairs());
        let stem = format!("convergence_{}_opt{option}_{}", a.example.name(), run_hash(&pairs));
        let md = table.to_markdown();
        let (csv_path, w) = create(&a.output.output_dir, &format!("{stem}.csv"))?;
        table.write_csv(w)?;
        let md_path = write_text(&a.output.output_dir, &format!("{stem}.md"), &md)?;
        report_written(&[csv_path, md_path]);

        println!("{} option {option}\n\n{md}", a.example.name());
        if a.check_published {
            let diffs = table.check_against_published(a.rel_tol, a.order_tol);
            if diffs.is_empty() {
                println!("check against published table: pass\n");
            } else {
                failures += 1;
                println!("check against published table: FAIL");
                for d in diffs {
                    println!("  {d}");
                }
                println!();
            }
        }
    }
    Ok(if failures > 0 { Status::CheckFailed } else { Status::Ok })
}

pub fn rankdef(a: &RankdefArgs) -> Result<Status> {
    if a.max < 2 {
        return Err(usage(format!("--max must be at least 2, got {}", a.max)));
    }
    let table = rank_deficiency_study(&rank_triples(a.max));
    let pairs = [("command", "rankdef".to_string()), ("max", a.max.to_string())];
    let stem = format!("rankdef_max{}_{}", a.max, run_hash(&pairs));
    let md = table.to_markdown();
    let (csv_path, w) = create(&a.output.output_dir, &format!("{stem}.csv"))?;
    table.write_csv(w)?;
    let md_path = write_text(&a.output.output_dir, &format!("{stem}.md"), &md)?;
    report_written(&[csv_path, md_path]);
    println!("{md}");

    if a.check_published {
        let diffs = table.check_against_published();
        if !diffs.is_empty() {
            println!("check against published table: FAIL");
            for d in diffs {
                println!("  {d}");
            }
            return Ok(Status::CheckFailed);
        }
        println!("check against published table: pass");
    }
    Ok(Status::Ok)
}

pub fn equivalence(a: &EquivalenceArgs) -> Result<Status> {
    let ns = parse_h_range(&a.h)?;
    let problem = ManufacturedProblem::new(a.example);
    let report = scheme_equivalence_study(&problem, &ns, &a.solver.scheme_config())?;

    let mut pairs = vec![
        ("command", "equivalence".to_string()),
        ("example", a.example.name().to_string()),
        ("h", format!("{ns:?}")),
    ];
    pairs.extend(a.solver.pairs());
    let stem = format!("equivalence_{}_{}", a.example.name(), run_hash(&pairs));
    let md = report.to_markdown();
    let (csv_path, w) = create(&a.output.output_dir, &format!("{stem}.csv"))?;
    report.write_csv(w)?;
    let md_path = write_text(&a.output.output_dir, &format!("{stem}.md"), &md)?;
    report_written(&[csv_path, md_path]);
    println!("{md}");
    if let Some(last) = report.rows.last() {
        println!(
            "options 1-3 agree to {:.2e} of the solution scale at h=1/{}",
            last.max_pairwise_l2 / last.scale.max(f64::MIN_POSITIVE),
            last.n
        );
    }
    Ok(Status::Ok)
}
