//! Named parameter sets.
//!
//! A preset is a list of `--flag=value` tokens spliced in front of the user's
//! own flags. Any flag the user passes explicitly replaces the preset's.

use std::ffi::OsString;

pub struct Preset {
    pub name: &'static str,
    pub command: &'static str,
    pub args: &'static [&'static str],
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1",
        command: "landmark-match",
        args: &["--landmarks=50", "--sigma=0.1", "--alpha=1"],
    },
    Preset {
        name: "fig2-left",
        command: "geodesic",
        args: &["--manifold=sphere-stereographic", "--x=0,0", "--v=1,-1"],
    },
    Preset {
        name: "fig2-middle",
        command: "geodesic",
        args: &["--manifold=ellipsoid:1,0.8,1.2", "--x=0,0", "--v=1,-1"],
    },
    Preset {
        name: "fig2-right",
        command: "geodesic",
        args: &[
            "--manifold=landmarks:3,0.5,1",
            "--x=0,0,0.5,0,1,0",
            "--v=0,1,0,0,0,-1",
        ],
    },
    Preset {
        name: "fig3-left",
        command: "exp-ham",
        args: &["--manifold=sphere-stereographic", "--x=0,0", "--v=1,-1"],
    },
    Preset {
        name: "fig3-right",
        command: "partransport",
        args: &[
            "--manifold=sphere-stereographic",
            "--curve=spiral",
            "--v=-0.5,-0.5",
            "--t-end=1",
        ],
    },
    Preset {
        name: "fig5",
        command: "lie-ep",
        args: &[
            "--mu=1,0.5,-0.3",
            "--inertia=1,2,3",
            "--steps=1000",
            "--t-end=10",
            "--track=0,1,2",
        ],
    },
    Preset {
        name: "fig6",
        command: "lie-brownian",
        args: &["--inertia=1,1,1", "--steps=1000", "--t-end=1", "--track=0,1,2"],
    },
    Preset {
        name: "fig7-left",
        command: "fm-geodesic",
        args: &[
            "--manifold=sphere-stereographic",
            "--x=0,0",
            "--frame=0.5,0,0,0.5",
            "--v=1,-1",
        ],
    },
    Preset {
        name: "fig7-right",
        command: "fm-geodesic",
        args: &[
            "--manifold=sphere-stereographic",
            "--x=0,0",
            "--frame=0.5,0,0,0.5",
            "--p=2,-2,0,2,-2,0",
        ],
    },
    Preset {
        name: "fig8",
        command: "mpp",
        args: &[
            "--manifold=ellipsoid:1,0.8,1.2",
            "--x=0,0",
            "--frame=0.1,0.3,0.3,0.1",
            "--y=0.5,0.5",
            "--reference-v=1.03,-5.8,0,0,0,0",
        ],
    },
    Preset {
        name: "fig9",
        command: "develop",
        args: &[
            "--manifold=sphere-stereographic",
            "--x=0,0",
            "--frame=-1,1,1,1",
            "--orthonormalize",
            "--curve=wave",
            "--t-end=10",
            "--steps=1000000",
        ],
    },
    Preset {
        name: "fig9-stochastic",
        command: "stoc-develop",
        args: &[
            "--manifold=sphere-stereographic",
            "--x=0,0",
            "--frame=-1,1,1,1",
            "--orthonormalize",
            "--drift=0.5,0.5",
            "--t-end=1",
            "--steps=10000",
        ],
    },
    Preset {
        name: "frechet-ex8",
        command: "frechet",
        args: &[
            "--manifold=sphere-stereographic",
            "--n-samples=20",
            "--center=0,0",
            "--sd=0.2",
            "--x0=0.4,-0.4",
        ],
    },
    Preset {
        name: "fig12-left",
        command: "normal-density",
        args: &[
            "--manifold=sphere-stereographic",
            "--x=0,0",
            "--sigma=0.15,0,0,0.15",
            "--frame-mode=columns",
        ],
    },
    Preset {
        name: "fig12-right",
        command: "normal-density",
        args: &[
            "--manifold=sphere-stereographic",
            "--x=0,0",
            "--sigma=0.2,0.1,0.1,0.1",
            "--frame-mode=columns",
        ],
    },
];

pub const HELP: &str = "\
Presets (use `--preset NAME`, with or without the subcommand):
  fig1             landmark-match: letter T to letter O, 50 landmarks, sigma 0.1
  fig2-left        geodesic on the sphere from x=(0,0) with v=(1,-1)
  fig2-middle      geodesic on the ellipsoid with semi-axes (1, 0.8, 1.2), same x and v
  fig2-right       geodesic of 3 landmarks (sigma 0.5) moving toward each other
  fig3-left        exp-ham on the sphere from x=(0,0) with v=(1,-1)
  fig3-right       partransport of v=(-0.5,-0.5) along (t^2, -sin t), t in [0,1]
  fig5             lie-ep with mu=(1,0.5,-0.3), inertia diag(1,2,3), T=10, 1000 steps
  fig6             lie-brownian from the identity, 1000 steps over T=1
  fig7-left        fm-geodesic, frame (0.5,0),(0,0.5) at x=(0,0), horizontal v=(1,-1)
  fig7-right       fm-geodesic, same frame, momentum (2,-2) plus a frame-rotating vertical part
  fig8             mpp on the ellipsoid (1, 0.8, 1.2) from x=(0,0) with frame
                   (0.1,0.3),(0.3,0.1) to y=(0.5,0.5); the ellipsoid axes are a
                   choice, so the reported reference velocity is not expected to match
  fig9             develop the curve (20 sin t, t^2+2t), t in [0,10], with the
                   orthonormalized frame (-1,1),(1,1); 1e6 steps (a coarser grid
                   leaves the chart)
  fig9-stochastic  stoc-develop with drift (0.5,0.5), dt=1e-4 over T=1
  frechet-ex8      frechet of 20 chart samples N(0, 0.2^2), initial guess (0.4,-0.4)
  fig12-left       normal-density with covariance diag(0.15,0.15), frame = columns
  fig12-right      normal-density with covariance [[0.2,0.1],[0.1,0.1]], frame = columns
Environment: GEOMKIT_SEED supplies --seed when the flag is absent.";

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// Flags that are alternatives to each other: giving one drops the other
/// from the preset.
const EXCLUSIVE: &[[&str; 2]] = &[["v", "p"]];

fn replaced_by_user(flag: &str, given: &[&str]) -> bool {
    given.contains(&flag)
        || EXCLUSIVE
            .iter()
            .any(|pair| pair.contains(&flag) && pair.iter().any(|f| given.contains(f)))
}

fn flag_name(token: &str) -> Option<&str> {
    let body = token.strip_prefix("--")?;
    Some(body.split_once('=').map_or(body, |(k, _)| k))
}

/// Rewrites `argv` so that a `--preset NAME` flag becomes explicit arguments.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let args: Vec<String> = match argv.iter().map(|a| a.clone().into_string()).collect() {
        Ok(a) => a,
        // Non-UTF-8 input cannot name a preset; leave it to clap.
        Err(_) => return Ok(argv),
    };
    let mut name = None;
    for (i, a) in args.iter().enumerate() {
        if a == "--preset" {
            name = args.get(i + 1).cloned();
        } else if let Some(v) = a.strip_prefix("--preset=") {
            name = Some(v.to_string());
        }
    }
    let Some(name) = name else {
        return Ok(argv);
    };
    let preset = find(&name).ok_or_else(|| {
        let known: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        format!("unknown preset {name:?}; known presets: {}", known.join(", "))
    })?;

    let mut out = vec![args.first().cloned().unwrap_or_else(|| "geomkit".into())];
    let rest: &[String] = args.get(1..).unwrap_or(&[]);
    let user_flags = match rest.first() {
        Some(cmd) if !cmd.starts_with('-') => {
            if cmd != preset.command {
                return Err(format!(
                    "preset {name:?} belongs to `{}`, not `{cmd}`",
                    preset.command
                ));
            }
            &rest[1..]
        }
        _ => rest,
    };
    out.push(preset.command.to_string());
    let given: Vec<&str> = user_flags.iter().filter_map(|a| flag_name(a)).collect();
    out.extend(
        preset
            .args
            .iter()
            .filter(|a| flag_name(a).is_some_and(|f| !replaced_by_user(f, &given)))
            .map(|a| a.to_string()),
    );
    out.extend(user_flags.iter().cloned());
    Ok(out.into_iter().map(OsString::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    fn strs(v: Vec<OsString>) -> Vec<String> {
        v.into_iter().map(|s| s.into_string().unwrap()).collect()
    }

    #[test]
    fn every_preset_is_documented() {
        for p in PRESETS {
            assert!(HELP.contains(&format!("  {} ", p.name)), "{} missing from help", p.name);
        }
    }

    #[test]
    fn preset_flags_come_first_and_user_flags_win() {
        let out = strs(expand(os(&["geomkit", "geodesic", "--preset", "fig2-left", "--v=2,0"])).unwrap());
        assert_eq!(out[1], "geodesic");
        assert!(out.contains(&"--x=0,0".to_string()));
        assert!(!out.contains(&"--v=1,-1".to_string()));
        assert_eq!(out.last().unwrap(), "--v=2,0");
    }

    #[test]
    fn alternative_flags_replace_each_other() {
        let out = strs(expand(os(&["geomkit", "--preset", "fig7-left", "--p", "1,0,0,0,0,0"])).unwrap());
        assert!(!out.iter().any(|a| a.starts_with("--v")));
    }

    #[test]
    fn command_may_be_omitted() {
        let out = strs(expand(os(&["geomkit", "--preset=fig8"])).unwrap());
        assert_eq!(out[1], "mpp");
    }

    #[test]
    fn mismatched_command_and_unknown_names_are_rejected() {
        assert!(expand(os(&["geomkit", "log", "--preset", "fig8"])).is_err());
        assert!(expand(os(&["geomkit", "--preset", "nope"])).is_err());
    }

    #[test]
    fn argv_without_preset_is_untouched() {
        let a = os(&["geomkit", "curvature", "--x", "0,0"]);
        assert_eq!(expand(a.clone()).unwrap(), a);
    }
}
