use anyhow::Context;
use qlink::compiler::bounds::{
    adopted_norm, empirical_vs_bound, printed_bound, trotter_bound, trotter_bound_value, BoundReport,
    TERMS_PER_PLAQUETTE,
};
use qlink::compiler::{
    compile_collective, compile_cphase, compile_step, Circuit, GateSet, NoiseWindow, ResourceReport,
};
use qlink::dynamics::{figure_phi_grid, sweep, Backend, SweepConfig, SweepTable, TrotterPlan};
use qlink::linkmodel::{gauge_sectors, plaquette_hamiltonian, plaquette_monomials};
use qlink::matter::{compare_effective, ChainConfig};
use qlink::{PauliString, PlaquetteLayout};
use serde::Serialize;

use crate::config::{ConfigError, RunConfig};

fn layout(rc: &RunConfig) -> anyhow::Result<PlaquetteLayout> {
    match rc.get::<String>("layout")? {
        None => Ok(PlaquetteLayout::triangle()),
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| ConfigError(format!("cannot read {path}: {e}")))?;
            text.parse::<PlaquetteLayout>().with_context(|| format!("layout file {path}"))
        }
    }
}

/// Rounds away solver noise so tables print short, stable decimals.
fn tidy(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

pub fn sectors(rc: &RunConfig) -> anyhow::Result<String> {
    let table = gauge_sectors(&layout(rc)?)?;
    let mut out = String::from("eigenvalue,degeneracy\n");
    for e in &table.entries {
        out.push_str(&format!("{},{}\n", tidy(e.eigenvalue), e.degeneracy));
    }
    Ok(out)
}

fn step_strings(layout: &PlaquetteLayout, j: f64) -> anyhow::Result<Vec<PauliString>> {
    Ok(plaquette_monomials(layout, j)?.into_iter().map(|m| m.term).collect())
}

fn run_sweep(rc: &RunConfig, default_sector: f64, default_steps: &[usize]) -> anyhow::Result<(SweepTable, f64)> {
    let layout = layout(rc)?;
    let j = rc.get_or("j", 1.0)?;
    let sector = rc.get_or("sector", default_sector)?;
    let steps = rc.list::<usize>("steps")?.unwrap_or_else(|| default_steps.to_vec());
    let phis = rc.list::<f64>("phi")?.unwrap_or_else(figure_phi_grid);
    let grid = steps.iter().flat_map(|&n| phis.iter().map(move |&p| (n, p))).collect();
    let table = sweep(&SweepConfig { layout, j, sector, grid, backend: Backend::Trotter })?;
    Ok((table, j))
}

pub fn figures(which: &str, rc: &RunConfig) -> anyhow::Result<String> {
    match which {
        "fig3" => Ok(run_sweep(rc, 0.75, &[1, 2, 4, 8])?.0.to_csv()),
        "figS2" => {
            let (table, _) = run_sweep(rc, 0.75, &[1, 2, 4, 8, 16, 32, 64])?;
            let mut out = String::from("N,phi,casimir_I,casimir_D\n");
            for r in &table.rows {
                out.push_str(&format!("{},{},{},{}\n", r.n, r.phi, r.casimir_i, r.casimir_d));
            }
            Ok(out)
        }
        "fig4" => {
            let (table, j) = run_sweep(rc, 2.25, &[2, 3])?;
            let layout = layout(rc)?;
            let strings = step_strings(&layout, j)?;
            let window = NoiseWindow::reference();
            let mut out = String::from(
                "N,phi,overlap_I0,fidelity_ID,cap_collective_low,cap_collective_high,cap_cphase_low,cap_cphase_high\n",
            );
            let mut caps = std::collections::BTreeMap::new();
            for r in &table.rows {
                if let std::collections::btree_map::Entry::Vacant(e) = caps.entry(r.n) {
                    let mut row = Vec::new();
                    for gates in [GateSet::Collective, GateSet::Cphase] {
                        let step = compile_step(&strings, 0.0, gates, None)?;
                        let band = ResourceReport::new(&step, &strings, gates, r.n, &window).fidelity_band;
                        row.extend(band);
                    }
                    e.insert(row);
                }
                let c = &caps[&r.n];
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.n, r.phi, r.overlap_i0, r.fidelity_id, c[0], c[1], c[2], c[3]
                ));
            }
            Ok(out)
        }
        other => Err(ConfigError(format!("unknown figure {other:?} (expected fig3, fig4 or figS2)")).into()),
    }
}

pub fn compile(rc: &RunConfig) -> anyhow::Result<String> {
    let gates: GateSet = rc.get::<GateSet>("backend")?.unwrap_or(GateSet::Collective);
    let phi = rc.get_or("phi", 0.1)?;
    let steps = rc.get_or("steps", 1usize)?;
    let monomial = rc.get::<String>("monomial")?;
    let (circuit, strings): (Circuit, Vec<PauliString>) = match (rc.has("step"), monomial) {
        (true, None) => {
            let strings = step_strings(&layout(rc)?, rc.get_or("j", 1.0)?)?;
            (compile_step(&strings, phi, gates, rc.get::<usize>("ancilla")?)?, strings)
        }
        (false, Some(text)) => {
            let m: PauliString = text.parse()?;
            let c = match gates {
                GateSet::Collective => compile_collective(&m, phi)?,
                GateSet::Cphase => {
                    let anc = match rc.get::<usize>("ancilla")? {
                        Some(a) => a,
                        None => m.max_qubit().map_or(0, |q| q + 1),
                    };
                    compile_cphase(&m, phi, anc)?
                }
            };
            (c, vec![m])
        }
        _ => return Err(ConfigError("compile needs exactly one of --step or --monomial".into()).into()),
    };
    if let Some(path) = rc.get::<String>("circuit")? {
        std::fs::write(&path, circuit.to_text()).map_err(|e| ConfigError(format!("cannot write {path}: {e}")))?;
    }
    Ok(ResourceReport::new(&circuit, &strings, gates, steps, &NoiseWindow::reference()).to_json())
}

#[derive(Serialize)]
struct BoundsOutput {
    schema: u32,
    plaquettes: usize,
    jt: f64,
    eps: f64,
    k: u32,
    m: usize,
    norm_bound: f64,
    bound_value: f64,
    bound: u64,
    printed_value: Option<f64>,
    printed_bound: Option<u64>,
    check: Option<BoundReport>,
}

pub fn bounds(rc: &RunConfig) -> anyhow::Result<String> {
    let plaquettes = rc.get_or("plaquettes", 1usize)?;
    let jt = rc.get_or("jt", 1.0)?;
    let eps = rc.get_or("eps", 0.1)?;
    let k = rc.get_or("k", 1u32)?;
    let m = TERMS_PER_PLAQUETTE * plaquettes;
    let norm = adopted_norm(1.0);
    let printed = if k == 1 { Some(printed_bound(plaquettes, jt, eps)?) } else { None };
    let check = match rc.list::<usize>("check")? {
        None => None,
        Some(steps) => {
            let t = PlaquetteLayout::triangle();
            let h = plaquette_hamiltonian(&t, 1.0)?;
            let psi0 = gauge_sectors(&t)?.canonical_state(0.75)?;
            let plan = TrotterPlan::listing(&t, 1.0, 1, jt)?;
            Some(empirical_vs_bound(&h, &plan, &psi0, &steps, norm, k)?)
        }
    };
    let out = BoundsOutput {
        schema: 1,
        plaquettes,
        jt,
        eps,
        k,
        m,
        norm_bound: norm,
        bound_value: trotter_bound_value(m, norm, jt, eps, k)?,
        bound: trotter_bound(m, norm, jt, eps, k)?,
        printed_value: printed,
        printed_bound: printed.map(|p| p.ceil() as u64),
        check,
    };
    Ok(serde_json::to_string_pretty(&out)? + "\n")
}

pub fn matter(rc: &RunConfig) -> anyhow::Result<String> {
    let base = ChainConfig::minimal(0.0, rc.get_or("big-omega", 1.0)?);
    let cfg = ChainConfig {
        n_sites: rc.get_or("sites", base.n_sites)?,
        omega: rc.get_or("omega", base.omega)?,
        n0: rc.get_or("n0", base.n0)?,
        sector: rc.get_or("sector", base.sector)?,
        ..base
    };
    let ratios = rc.list::<f64>("ratios")?.unwrap_or_else(|| vec![1e-1, 1e-2, 1e-3]);
    Ok(compare_effective(&cfg, &ratios)?.to_csv())
}
