//! SO(3) flows.

use geomkit::integrate::Trajectory;
use geomkit::liegroup::{
    brownian_group, geodesic, orthogonality_error, sphere_curve, unflatten, BrownianOptions, Inertia,
    Vec3,
};
use geomkit::numkernel::{gaussian_increments, DenseMatrix};
use serde_json::json;

use super::{expect_len, relative_drift};
use crate::args::{Common, Floats};
use crate::output::{names, Sink, Summary, Table};
use crate::{CliError, CliResult};

fn vec3(v: &Floats, flag: &str) -> CliResult<Vec3> {
    expect_len(&v.0, 3, flag)?;
    Ok([v.0[0], v.0[1], v.0[2]])
}

fn tracked(track: &Floats) -> CliResult<Vec<usize>> {
    track
        .0
        .iter()
        .map(|&c| {
            if c.fract() == 0.0 && (0.0..3.0).contains(&c) {
                Ok(c as usize)
            } else {
                Err(CliError::Usage(format!("--track entries must be 0, 1 or 2, got {c}")))
            }
        })
        .collect()
}

fn check_grid(steps: usize, t_end: f64) -> CliResult<()> {
    if steps == 0 || !(t_end > 0.0) {
        return Err(CliError::Usage("--steps and --t-end must be positive".into()));
    }
    Ok(())
}

/// Group entries followed by the sphere curves `g e_c` of the tracked columns.
/// `offset` is where the row-major group block starts in each state.
fn group_table(traj: &Trajectory, offset: usize, lead: &[String], cols: &[usize]) -> Table {
    let mut header = lead.to_vec();
    for i in 0..3 {
        for j in 0..3 {
            header.push(format!("g{i}{j}"));
        }
    }
    for c in cols {
        header.extend(names(&format!("e{c}_"), 3));
    }
    let group = traj.map(|s| s[offset..offset + 9].to_vec());
    let curves: Vec<Vec<Vec3>> = cols.iter().map(|&c| sphere_curve(&group, c)).collect();
    let mut table = Table::new(header);
    for (k, (t, s)) in traj.times.iter().zip(&traj.states).enumerate() {
        let mut row = s[..offset + 9].to_vec();
        for curve in &curves {
            row.extend_from_slice(&curve[k]);
        }
        table.push(*t, row);
    }
    table
}

fn max_orthogonality(traj: &Trajectory, offset: usize) -> f64 {
    traj.states
        .iter()
        .map(|s| orthogonality_error(&unflatten(&s[offset..])))
        .fold(0.0, f64::max)
}

pub fn euler_poincare(
    mu: &Floats,
    inertia: &Floats,
    steps: usize,
    t_end: f64,
    track: &Floats,
    common: &Common,
) -> CliResult<Summary> {
    let mu0 = vec3(mu, "mu")?;
    let a = Inertia::diagonal(vec3(inertia, "inertia")?)?;
    let cols = tracked(track)?;
    check_grid(steps, t_end)?;

    let traj = geodesic(&DenseMatrix::identity(3), mu0, &a, steps, t_end)?;
    let norms: Vec<f64> = traj
        .states
        .iter()
        .map(|s| s[..3].iter().map(|c| c * c).sum::<f64>().sqrt())
        .collect();
    let energies: Vec<f64> = traj.states.iter().map(|s| a.energy([s[0], s[1], s[2]])).collect();

    let mut summary = Summary::new("lie-ep");
    let table = group_table(&traj, 3, &names("mu", 3), &cols);
    Sink::new(common, "lie-ep").write_table(&table, &mut summary)?;
    summary
        .set("momentum_norm_drift", relative_drift(&norms))
        .set("energy_drift", relative_drift(&energies))
        .set("max_orthogonality_error", max_orthogonality(&traj, 3))
        .set("final_mu", json!(traj.last()[..3]));
    Ok(summary)
}

pub fn brownian(
    inertia: &Floats,
    steps: usize,
    t_end: f64,
    project: bool,
    track: &Floats,
    common: &Common,
) -> CliResult<Summary> {
    let a = Inertia::diagonal(vec3(inertia, "inertia")?)?;
    let cols = tracked(track)?;
    check_grid(steps, t_end)?;
    let dt = t_end / steps as f64;
    let dw = gaussian_increments(3, steps, dt, common.seed)?;

    let traj = brownian_group(&DenseMatrix::identity(3), &dw, dt, &a, BrownianOptions { project })?;
    let mut summary = Summary::new("lie-brownian");
    let table = group_table(&traj, 0, &[], &cols);
    Sink::new(common, "lie-brownian").write_table(&table, &mut summary)?;
    summary
        .set("seed", common.seed)
        .set("projected", project)
        .set("max_orthogonality_error", max_orthogonality(&traj, 0))
        .set("final_g", json!(traj.last()));
    Ok(summary)
}
