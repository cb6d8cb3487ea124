//! Landmark matching and statistics on manifolds.

use std::path::{Path, PathBuf};

use geomkit::landmarks::{match_shapes, read_shape_csv, t_to_o, LandmarkConfig, MatchOptions};
use geomkit::numkernel::DenseMatrix;
use geomkit::stats::{covariance_frame, density_grid, frechet_mean, sample_brownian, FrameMode, FrechetOptions, SampleSet};
use serde_json::json;

use super::{base_point, expect_len, manifold};
use crate::args::{Common, Floats, Format, Place};
use crate::output::{names, Sink, Summary, Table};
use crate::{CliError, CliResult};

fn read(path: &Path, flag: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("--{flag} {}: {e}", path.display())))
}

#[allow(clippy::too_many_arguments)]
pub fn landmark_match(
    landmarks: usize,
    sigma: f64,
    alpha: f64,
    source: Option<PathBuf>,
    target: Option<PathBuf>,
    steps: usize,
    max_iters: usize,
    common: &Common,
) -> CliResult<Summary> {
    let (t, o) = t_to_o(landmarks);
    let load = |p: Option<PathBuf>, default: Vec<f64>, flag: &str| -> CliResult<Vec<f64>> {
        match p {
            Some(p) => read_shape_csv(&read(&p, flag)?).map_err(|e| CliError::Usage(format!("--{flag}: {e}"))),
            None => Ok(default),
        }
    };
    let x1 = load(source, t, "source")?;
    let x2 = load(target, o, "target")?;
    if x1.len() != x2.len() {
        return Err(CliError::Usage("source and target need the same number of landmarks".into()));
    }
    let cfg = LandmarkConfig::new(x1.len() / 2, sigma, alpha)?;
    if steps == 0 {
        return Err(CliError::Usage("--steps must be positive".into()));
    }
    let opts = MatchOptions {
        n_steps: steps,
        max_iters,
        ..MatchOptions::default()
    };

    let r = match_shapes(&cfg, &x1, &x2, &opts)?;
    let n = cfg.dim();
    let mut table = Table::new([names("x", n), names("p", n)].concat());
    for (t, s) in r.trajectory.times.iter().zip(&r.trajectory.states) {
        table.push(*t, s.clone());
    }
    let mut summary = Summary::new("landmark-match");
    Sink::new(common, "landmark-match").write_table(&table, &mut summary)?;
    summary
        .set("landmarks", cfg.n)
        .set("loss", r.loss)
        .set("iterations", r.iters)
        .set("jacobian_evaluations", r.jacobian_evals)
        .set("energy_drift", r.energy_drift)
        .set("converged", r.converged);
    if !r.converged {
        summary.not_converged();
    }
    Ok(summary)
}

pub fn frechet(
    manifold_id: &str,
    samples: Option<PathBuf>,
    n_samples: usize,
    center: &Floats,
    sd: f64,
    x0: &Floats,
    common: &Common,
) -> CliResult<Summary> {
    let m = manifold(manifold_id)?;
    let d = m.dim();
    let set = match samples {
        Some(p) => SampleSet::from_csv(&read(&p, "samples")?).map_err(|e| CliError::Usage(format!("--samples: {e}")))?,
        None => {
            expect_len(&center.0, d, "center")?;
            SampleSet::gaussian_chart(&center.0, sd, n_samples, common.seed)?
        }
    };
    expect_len(&x0.0, d, "x0")?;

    let r = frechet_mean(&m, &set, &x0.0, &FrechetOptions::default())?;
    let mut summary = Summary::new("frechet");
    let sink = Sink::new(common, "frechet");
    match sink.format {
        Format::Json => {
            let doc = json!({
                "manifold": m.id(),
                "initial_guess": x0.0,
                "mean": r.mean,
                "samples": set.points(),
                "tangents": r.tangents,
                "history": r.history,
            });
            sink.write_json(&doc, &mut summary)?;
        }
        Format::Csv => {
            // One row per sample with its tangent at the mean; the mean itself
            // is the row with role 1.
            let mut s = String::from("role,");
            s.push_str(&[names("x", d), names("v", d)].concat().join(","));
            s.push('\n');
            let mut row = |role: u8, x: &[f64], v: &[f64]| {
                let vals: Vec<String> = x.iter().chain(v).map(|c| format!("{c:e}")).collect();
                s.push_str(&format!("{role},{}\n", vals.join(",")));
            };
            row(1, &r.mean, &vec![0.0; d]);
            for (y, v) in set.points().iter().zip(&r.tangents) {
                row(0, y, v);
            }
            sink.write_text(&sink.path, &s, &mut summary)?;
        }
    }
    summary
        .set("manifold", m.id())
        .set("samples", set.len())
        .set("mean", json!(r.mean))
        .set("value", r.value)
        .set("grad_norm", r.grad_norm)
        .set("iterations", r.iters)
        .set("converged", r.converged);
    if !r.converged {
        summary.not_converged();
    }
    Ok(summary)
}

#[allow(clippy::too_many_arguments)]
pub fn normal_density(
    place: &Place,
    sigma: &Floats,
    frame_mode: &str,
    paths: usize,
    steps: usize,
    t_end: f64,
    bandwidth: f64,
    n_lat: usize,
    n_lon: usize,
    common: &Common,
) -> CliResult<Summary> {
    let m = manifold(&place.manifold)?;
    let d = m.dim();
    let x = base_point(&m, place.x.clone())?;
    expect_len(&sigma.0, d * d, "sigma")?;
    let cov = DenseMatrix::from_vec(d, d, sigma.0.clone())?;
    let mode: FrameMode = frame_mode.parse().map_err(|e| CliError::Usage(format!("--frame-mode: {e}")))?;
    let u = covariance_frame(&x, &cov, mode)?;

    let samples = sample_brownian(&m, &u, t_end, steps, paths, common.seed)?;
    let grid = density_grid(&m, &samples, bandwidth, n_lat, n_lon)?;

    let mut meta = grid.metadata();
    meta["manifold"] = json!(m.id());
    meta["mean"] = json!(x);
    meta["covariance"] = json!(sigma.0);
    meta["frame_mode"] = json!(frame_mode);
    meta["paths"] = json!(paths);
    meta["seed"] = json!(common.seed);

    let mut summary = Summary::new("normal-density");
    let sink = Sink::new(common, "normal-density");
    match sink.format {
        Format::Json => {
            let rows: Vec<Vec<f64>> = (0..grid.density.rows()).map(|i| grid.density.row(i).to_vec()).collect();
            let mut doc = meta.clone();
            doc["density"] = json!(rows);
            sink.write_json(&doc, &mut summary)?;
        }
        Format::Csv => {
            sink.write_text(&sink.path, &grid.to_csv(), &mut summary)?;
            let meta_path = sink.path.with_extension("meta.json");
            let text = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Numerical(e.to_string()))?;
            std::fs::write(&meta_path, text)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", meta_path.display())))?;
            summary.set("metadata", meta_path.display().to_string());
        }
    }
    let (i, j) = grid.argmax();
    summary
        .set("manifold", m.id())
        .set("paths", paths)
        .set("total_mass", grid.total_mass())
        .set("peak_lat", grid.lat[i])
        .set("peak_lon", grid.lon[j])
        .set("sample_chart_mean", json!(samples.chart_mean()));
    Ok(summary)
}
