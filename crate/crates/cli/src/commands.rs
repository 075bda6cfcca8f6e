use rydring::effective::{build_effective, compare_dynamics};
use rydring::hamiltonian::{full_hamiltonian, perfect_blockade_hamiltonian, FULL_SPACE_MAX_SITES};
use rydring::observables::{export_coupling_graph, manifolds, Histogram, Manifold};
use rydring::oracle::{compare_with_reduced, OracleReport, ORACLE_MAX_SITES};
use rydring::simulation::{simulate, RunOptions};
use rydring::symmetric_basis::{count_blockaded_configs, count_bracelets};
use rydring::{Interaction, Sector, SymmetricBasis};
use serde::Serialize;

use crate::config::{Mode, RunConfig};
use crate::error::CliError;
use crate::output::OutputDir;

/// Eigenvalue gaps wider than this fraction of Δ separate manifolds.
const MANIFOLD_GAP: f64 = 0.1;
const VERIFY_TOL: f64 = 1e-8;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    match config.mode {
        Mode::Basis => basis(config),
        Mode::Evolve => evolve(config),
        Mode::Compare => compare(config),
        Mode::Spectrum => spectrum(config),
        Mode::Graph => graph(config),
        Mode::Verify => verify(config),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    println!("{text}");
    Ok(())
}

fn open_output(config: &RunConfig) -> Result<OutputDir, CliError> {
    let mut out = OutputDir::create(&config.out)?;
    out.write("config.toml", &config.to_toml())?;
    Ok(out)
}

fn finish(out: OutputDir, config: &RunConfig) {
    out.commit();
    println!("{}", config.out.display());
}

#[derive(Serialize)]
struct BasisInfo {
    n_sites: usize,
    m: usize,
    bracelets: u64,
    blockaded_dim: usize,
    blockaded_configs: usize,
}

fn basis(config: &RunConfig) -> Result<(), CliError> {
    let params = config.params()?;
    let basis = SymmetricBasis::build(&params, Sector::Blockaded(params.m))?;
    print_json(&BasisInfo {
        n_sites: params.n_sites,
        m: params.m,
        bracelets: count_bracelets(params.n_sites)?,
        blockaded_dim: basis.len(),
        blockaded_configs: count_blockaded_configs(params.n_sites, params.m)?,
    })
}

fn evolve(config: &RunConfig) -> Result<(), CliError> {
    let params = config.params()?;
    let grid = config.grid()?;
    let opts = RunOptions {
        distances: config.g2_distances.clone(),
        kind: config.method.kind(),
        check_invariants: true,
    };
    let mut out = open_output(config)?;
    let run = simulate(&params, &grid, &opts)?;

    let mut header: Vec<String> = ["t", "beta", "N_Ryd"].map(String::from).to_vec();
    header.extend(run.distances.iter().map(|k| format!("g2_{k}")));
    header.extend(["M_C", "M_C_class", "C", "EOF"].map(String::from));
    let rows: Vec<Vec<Option<f64>>> = run
        .samples
        .iter()
        .map(|s| {
            let mut row = vec![Some(s.t), Some(s.beta), Some(s.n_ryd)];
            row.extend(s.g2.iter().copied());
            row.extend([s.mc, s.mc_class, s.concurrence, s.eof].map(Some));
            row
        })
        .collect();
    out.write_csv("series.csv", &header, &rows)?;

    let summary = run.summary(config.window);
    if !summary.invariants.holds() {
        log::warn!("invariant check failed: {:?}", summary.invariants);
    }
    out.write_json("summary.json", &summary)?;
    finish(out, config);
    Ok(())
}

fn finite_delta(config: &RunConfig) -> Result<f64, CliError> {
    config
        .delta
        .finite()
        .ok_or_else(|| CliError::Config(format!("{} mode needs a finite --delta", crate::config::mode_name(config.mode))))
}

#[derive(Serialize)]
struct CompareSummary<'a> {
    n_sites: usize,
    delta: f64,
    epsilon_over_delta: f64,
    deviations: &'a [rydring::effective::Deviation],
    manifolds: ManifoldReport,
}

#[derive(Serialize)]
struct ManifoldReport {
    width0: f64,
    width1: f64,
    overlapping: bool,
}

fn compare(config: &RunConfig) -> Result<(), CliError> {
    let delta = finite_delta(config)?;
    if config.m != 2 {
        return Err(CliError::Config("compare mode needs m = 2".into()));
    }
    let params = config.params()?;
    let grid = config.grid()?;
    let mut out = open_output(config)?;
    let model = build_effective(&params)?;
    let cmp = compare_dynamics(&model, &grid, &config.g2_distances, config.method.kind())?;

    let mut header: Vec<String> = vec!["t".into(), "beta_perfect".into(), "beta_effective".into()];
    for k in &config.g2_distances {
        header.push(format!("g2_{k}_perfect"));
        header.push(format!("g2_{k}_effective"));
    }
    let finite = |v: f64| v.is_finite().then_some(v);
    let rows: Vec<Vec<Option<f64>>> = (0..grid.len())
        .map(|i| {
            let mut row = vec![
                Some(grid.time(i)),
                Some(cmp.perfect.beta.values()[i]),
                Some(cmp.effective.beta.values()[i]),
            ];
            for (p, e) in cmp.perfect.g2.iter().zip(&cmp.effective.g2) {
                row.push(finite(p.values()[i]));
                row.push(finite(e.values()[i]));
            }
            row
        })
        .collect();
    out.write_csv("compare.csv", &header, &rows)?;
    out.write_json(
        "summary.json",
        &CompareSummary {
            n_sites: params.n_sites,
            delta,
            epsilon_over_delta: 1.0 / delta,
            deviations: &cmp.deviations,
            manifolds: ManifoldReport {
                width0: cmp.manifolds.width0,
                width1: cmp.manifolds.width1,
                overlapping: cmp.manifolds.overlapping(),
            },
        },
    )?;
    finish(out, config);
    Ok(())
}

#[derive(Serialize)]
struct SpectrumSummary {
    n_sites: usize,
    m: usize,
    delta: Interaction,
    /// `full` for all 2^N configurations, `blockaded` for the symmetric
    /// perfect-blockade sector.
    space: &'static str,
    dim: usize,
    min_energy: f64,
    max_energy: f64,
    bin_width: f64,
    manifold_gap: Option<f64>,
    manifolds: Vec<Manifold>,
}

fn spectrum(config: &RunConfig) -> Result<(), CliError> {
    let params = config.params()?;
    let (space, h) = match config.delta {
        Interaction::Finite(_) if params.n_sites > FULL_SPACE_MAX_SITES => {
            return Err(CliError::Config(format!(
                "finite-delta spectra need N <= {FULL_SPACE_MAX_SITES}"
            )))
        }
        Interaction::Finite(_) => ("full", full_hamiltonian(&params)?),
        Interaction::Infinite => ("blockaded", perfect_blockade_hamiltonian(&params)?.1),
    };
    let mut out = open_output(config)?;
    let eigs = h.eigenvalues()?;
    let hist = Histogram::from_values(&eigs, config.bin_width)?;
    let rows: Vec<Vec<Option<f64>>> = hist
        .counts
        .iter()
        .enumerate()
        .map(|(i, &c)| vec![Some(hist.center(i)), Some(c as f64)])
        .collect();
    out.write_csv("dos.csv", &["energy".into(), "count".into()], &rows)?;
    let eig_rows: Vec<Vec<Option<f64>>> = eigs.iter().map(|&e| vec![Some(e)]).collect();
    out.write_csv("eigenvalues.csv", &["energy".into()], &eig_rows)?;

    let gap = config.delta.finite().map(|d| MANIFOLD_GAP * d);
    out.write_json(
        "spectrum.json",
        &SpectrumSummary {
            n_sites: params.n_sites,
            m: params.m,
            delta: params.delta,
            space,
            dim: h.dim(),
            min_energy: eigs.iter().copied().fold(f64::INFINITY, f64::min),
            max_energy: eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            bin_width: config.bin_width,
            manifold_gap: gap,
            manifolds: gap.map(|g| manifolds(&eigs, g)).unwrap_or_default(),
        },
    )?;
    finish(out, config);
    Ok(())
}

fn graph(config: &RunConfig) -> Result<(), CliError> {
    let params = config.params()?;
    let (basis, h) = perfect_blockade_hamiltonian(&params)?;
    let mut out = open_output(config)?;
    out.write("graph.dot", &export_coupling_graph(&basis, &h)?)?;
    finish(out, config);
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    n_sites: usize,
    m: usize,
    tolerance: f64,
    passed: bool,
    #[serde(flatten)]
    deviations: OracleReport,
}

fn verify(config: &RunConfig) -> Result<(), CliError> {
    if config.delta != Interaction::Infinite {
        return Err(CliError::Config("verify mode checks the perfect blockade only".into()));
    }
    if config.n_sites > ORACLE_MAX_SITES {
        return Err(CliError::Config(format!("verify mode needs N <= {ORACLE_MAX_SITES}")));
    }
    let params = config.params()?;
    let report = compare_with_reduced(&params, &config.grid()?)?;
    let worst = report.max_deviation();
    let passed = worst < VERIFY_TOL;
    print_json(&VerifyReport {
        n_sites: params.n_sites,
        m: params.m,
        tolerance: VERIFY_TOL,
        passed,
        deviations: report,
    })?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!("largest deviation {worst:.3e}")))
    }
}
