//! Command-line front end: configuration resolution (flags over config file
//! over defaults), the four subcommands, and the exit-code contract
//! (1 = configuration, 2 = geometry, 3 = numerics).

use crate::error::{Error, Result};
use crate::invariants::{geometry_report, predicted_weyl_constant, willmore_energy, GeometryReport};
use crate::io;
use crate::mobius::{apply_mobius, apply_mobius_mesh, MobiusMap};
use crate::nystrom::assemble;
use crate::spectrum::{eigenvalues, exact_sphere_spectrum, weyl_fit, FitWindow};
use crate::surface::{
    build_quadrature, clifford_torus, ellipsoid, sphere, torus, MeshSurface, SurfaceChart,
    SurfaceQuadrature,
};
use std::path::{Path, PathBuf};

/// Angular resolution used for the signed density split in reports.
const SIGNED_N_THETA: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub enum ShapeSpec {
    Sphere { rho: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
    Torus { big_r: f64, small_r: f64 },
    Clifford,
    Mesh { path: PathBuf },
}

/// Either source of a discrete surface; Möbius maps keep the kind.
#[derive(Debug, Clone)]
pub enum Surface {
    Chart(SurfaceChart),
    Mesh(MeshSurface),
}

impl Surface {
    pub fn apply_mobius(&self, map: &MobiusMap) -> Result<Surface> {
        Ok(match self {
            Surface::Chart(chart) => Surface::Chart(apply_mobius(chart, map)?),
            Surface::Mesh(mesh) => Surface::Mesh(apply_mobius_mesh(mesh, map)?),
        })
    }

    pub fn quadrature(&self, n_s: usize, n_t: usize) -> Result<SurfaceQuadrature> {
        match self {
            Surface::Chart(chart) => build_quadrature(chart, n_s, n_t),
            Surface::Mesh(mesh) => mesh.to_quadrature(),
        }
    }
}

/// One layer of settings; `None` means "not set at this layer".
#[derive(Debug, Clone, Default)]
pub struct ConfigOverlay {
    pub shape: Option<String>,
    pub rho: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub big_r: Option<f64>,
    pub small_r: Option<f64>,
    pub res: Option<String>,
    pub mesh: Option<PathBuf>,
    pub window: Option<String>,
    pub out: Option<PathBuf>,
    pub mobius: Option<String>,
    pub seed: Option<u64>,
}

impl ConfigOverlay {
    /// Reads `key=value` lines; `#` starts a comment.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config {}: {e}", path.as_ref().display()))
        })?;
        let mut overlay = ConfigOverlay::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("config line {} is not key=value: `{raw}`", i + 1))
            })?;
            let key = key.trim();
            let value = value.trim().to_string();
            let parse_f64 = |v: &str| -> Result<f64> {
                v.parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad number for {key}: `{v}`")))
            };
            match key {
                "shape" => overlay.shape = Some(value),
                "rho" => overlay.rho = Some(parse_f64(&value)?),
                "a" => overlay.a = Some(parse_f64(&value)?),
                "b" => overlay.b = Some(parse_f64(&value)?),
                "c" => overlay.c = Some(parse_f64(&value)?),
                "R" => overlay.big_r = Some(parse_f64(&value)?),
                "r" => overlay.small_r = Some(parse_f64(&value)?),
                "res" => overlay.res = Some(value),
                "mesh" => overlay.mesh = Some(PathBuf::from(value)),
                "window" => overlay.window = Some(value),
                "out" => overlay.out = Some(PathBuf::from(value)),
                "mobius" => overlay.mobius = Some(value),
                "seed" => {
                    overlay.seed = Some(value.parse().map_err(|_| {
                        Error::InvalidConfig(format!("bad seed: `{value}`"))
                    })?)
                }
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown config key `{other}`"
                    )))
                }
            }
        }
        Ok(overlay)
    }

    /// Field-wise precedence: `self` wins over `lower`.
    pub fn over(self, lower: ConfigOverlay) -> ConfigOverlay {
        ConfigOverlay {
            shape: self.shape.or(lower.shape),
            rho: self.rho.or(lower.rho),
            a: self.a.or(lower.a),
            b: self.b.or(lower.b),
            c: self.c.or(lower.c),
            big_r: self.big_r.or(lower.big_r),
            small_r: self.small_r.or(lower.small_r),
            res: self.res.or(lower.res),
            mesh: self.mesh.or(lower.mesh),
            window: self.window.or(lower.window),
            out: self.out.or(lower.out),
            mobius: self.mobius.or(lower.mobius),
            seed: self.seed.or(lower.seed),
        }
    }
}

/// Fully resolved, validated run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub shape: ShapeSpec,
    pub resolution: (usize, usize),
    pub window: Option<FitWindow>,
    pub out_dir: PathBuf,
    pub mobius: Option<MobiusMap>,
    pub seed: u64,
}

impl RunConfig {
    /// Applies defaults under the overlay and validates the result.
    pub fn resolve(overlay: ConfigOverlay) -> Result<RunConfig> {
        let shape_name = overlay.shape.unwrap_or_else(|| "sphere".to_string());
        let shape = match shape_name.as_str() {
            "sphere" => {
                let rho = overlay.rho.unwrap_or(1.0);
                if rho <= 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "sphere radius must be positive, got {rho}"
                    )));
                }
                ShapeSpec::Sphere { rho }
            }
            "ellipsoid" => {
                let (a, b, c) = (
                    overlay.a.unwrap_or(1.0),
                    overlay.b.unwrap_or(1.0),
                    overlay.c.unwrap_or(1.0),
                );
                if a <= 0.0 || b <= 0.0 || c <= 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "ellipsoid semi-axes must be positive, got ({a}, {b}, {c})"
                    )));
                }
                ShapeSpec::Ellipsoid { a, b, c }
            }
            "torus" => {
                let big_r = overlay.big_r.unwrap_or(2.0);
                let small_r = overlay.small_r.unwrap_or(1.0);
                if small_r <= 0.0 || big_r <= small_r {
                    return Err(Error::InvalidConfig(format!(
                        "torus needs R > r > 0, got (R={big_r}, r={small_r})"
                    )));
                }
                ShapeSpec::Torus { big_r, small_r }
            }
            "clifford" => ShapeSpec::Clifford,
            name => {
                if let Some(path) = name.strip_prefix("mesh:") {
                    ShapeSpec::Mesh {
                        path: PathBuf::from(path),
                    }
                } else if name == "mesh" {
                    let path = overlay.mesh.clone().ok_or_else(|| {
                        Error::InvalidConfig(
                            "shape mesh requires --mesh PATH (or mesh:<path>)".into(),
                        )
                    })?;
                    ShapeSpec::Mesh { path }
                } else {
                    return Err(Error::InvalidConfig(format!(
                        "unknown shape `{name}` (sphere | ellipsoid | torus | clifford | mesh:<path>)"
                    )));
                }
            }
        };

        let resolution = match &overlay.res {
            None => (32, 64),
            Some(spec) => {
                let (ns, nt) = spec.split_once('x').ok_or_else(|| {
                    Error::InvalidConfig(format!("resolution must look like 64x128, got `{spec}`"))
                })?;
                let parse = |v: &str| -> Result<usize> {
                    v.trim().parse().map_err(|_| {
                        Error::InvalidConfig(format!("bad resolution component `{v}`"))
                    })
                };
                (parse(ns)?, parse(nt)?)
            }
        };
        if resolution.0 < 4 || resolution.1 < 4 {
            return Err(Error::InvalidConfig(format!(
                "resolution {}x{} too coarse: need at least 4 nodes per direction",
                resolution.0, resolution.1
            )));
        }

        let window = match &overlay.window {
            None => None,
            Some(spec) => {
                let (lo, hi) = spec.split_once(':').ok_or_else(|| {
                    Error::InvalidConfig(format!("window must look like 16:200, got `{spec}`"))
                })?;
                let parse = |v: &str| -> Result<usize> {
                    v.trim()
                        .parse()
                        .map_err(|_| Error::InvalidConfig(format!("bad window bound `{v}`")))
                };
                let w = FitWindow::new(parse(lo)?, parse(hi)?);
                if w.j_min < 1 || w.j_min > w.j_max {
                    return Err(Error::InvalidConfig(format!(
                        "window [{}, {}] is empty or starts below 1",
                        w.j_min, w.j_max
                    )));
                }
                Some(w)
            }
        };

        let mobius = match &overlay.mobius {
            None => None,
            Some(spec) => Some(MobiusMap::parse(spec)?),
        };

        Ok(RunConfig {
            shape,
            resolution,
            window,
            out_dir: overlay.out.unwrap_or_else(|| PathBuf::from(".")),
            mobius,
            seed: overlay.seed.unwrap_or(0),
        })
    }

    /// Builds the configured base surface (before any Möbius map).
    pub fn build_surface(&self) -> Result<Surface> {
        Ok(match &self.shape {
            ShapeSpec::Sphere { rho } => Surface::Chart(sphere(*rho)?),
            ShapeSpec::Ellipsoid { a, b, c } => Surface::Chart(ellipsoid(*a, *b, *c)?),
            ShapeSpec::Torus { big_r, small_r } => Surface::Chart(torus(*big_r, *small_r)?),
            ShapeSpec::Clifford => Surface::Chart(clifford_torus()),
            ShapeSpec::Mesh { path } => Surface::Mesh(MeshSurface::load(path)?),
        })
    }

    /// Base surface with the configured Möbius map applied, when present.
    pub fn build_transformed_surface(&self) -> Result<Surface> {
        let surface = self.build_surface()?;
        match &self.mobius {
            Some(map) => surface.apply_mobius(map),
            None => Ok(surface),
        }
    }
}

/// Exit-code contract for the binary.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) | Error::InvalidParameter(_) | Error::InvalidWindow { .. } => 1,
        Error::EigenSolver(_) | Error::Io(_) | Error::Json(_) => 3,
        _ => 2,
    }
}

/// Staged output files: nothing touches the filesystem until every artifact
/// has been computed, so failed runs leave no partial files behind.
struct OutputStage {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl OutputStage {
    fn new() -> Self {
        Self { files: Vec::new() }
    }

    fn add(&mut self, path: PathBuf, contents: impl Into<Vec<u8>>) {
        self.files.push((path, contents.into()));
    }

    fn commit(self) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        for (path, contents) in &self.files {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            let tmp = path.with_extension("tmp-partial");
            if let Err(e) = std::fs::write(&tmp, contents) {
                let _ = std::fs::remove_file(&tmp);
                for done in &written {
                    let _ = std::fs::remove_file(done);
                }
                return Err(e.into());
            }
            if let Err(e) = std::fs::rename(&tmp, path) {
                let _ = std::fs::remove_file(&tmp);
                for done in &written {
                    let _ = std::fs::remove_file(done);
                }
                return Err(e.into());
            }
            written.push(path.clone());
        }
        Ok(written)
    }
}

fn print_report(report: &GeometryReport) {
    println!("label={}", report.label);
    println!("area={}", report.area);
    println!("willmore_energy={}", report.willmore_energy);
    println!("gauss_bonnet_integral={}", report.gauss_bonnet_integral);
    println!("euler_characteristic={}", report.euler_characteristic);
    println!("gauss_bonnet_residual={}", report.gauss_bonnet_residual);
    println!(
        "predicted_weyl_constant={}",
        report.predicted_weyl_constant
    );
    if let (Some(p), Some(m)) = (report.c_plus, report.c_minus) {
        println!("c_plus={p}");
        println!("c_minus={m}");
    }
}

/// `geometry`: writes geometry.json and quad.json, prints the report table.
pub fn cmd_geometry(config: &RunConfig) -> Result<()> {
    let surface = config.build_transformed_surface()?;
    let quad = surface.quadrature(config.resolution.0, config.resolution.1)?;
    let report = geometry_report(&quad, Some(SIGNED_N_THETA))?;

    let mut stage = OutputStage::new();
    stage.add(
        config.out_dir.join("geometry.json"),
        serde_json::to_string_pretty(&report)?,
    );
    stage.add(
        config.out_dir.join("quad.json"),
        serde_json::to_string(&io::quadrature_json(&quad))?,
    );
    stage.commit()?;
    print_report(&report);
    Ok(())
}

/// `spectrum`: assembles the operator, solves for eigen- and singular
/// values, fits the decay constant against the geometric prediction, and
/// writes spectrum.csv plus fit.json.
pub fn cmd_spectrum(config: &RunConfig) -> Result<()> {
    let surface = config.build_transformed_surface()?;
    let quad = surface.quadrature(config.resolution.0, config.resolution.1)?;
    let matrix = assemble(&quad)?;
    let spectrum = eigenvalues(&matrix)?;

    let willmore = willmore_energy(&quad)?;
    let predicted = predicted_weyl_constant(willmore, quad.euler_characteristic)?;
    let window = config
        .window
        .unwrap_or_else(|| FitWindow::default_for(spectrum.n));
    let fit = weyl_fit(&spectrum.moduli(), window, predicted)?;

    let mut stage = OutputStage::new();
    stage.add(
        config.out_dir.join("spectrum.csv"),
        io::spectrum_csv(&spectrum),
    );
    stage.add(
        config.out_dir.join("fit.json"),
        serde_json::to_string_pretty(&io::fit_json(&fit))?,
    );
    stage.commit()?;

    println!("n={}", spectrum.n);
    println!("lambda_0={}", spectrum.moduli()[0]);
    println!("max_imag_residual={}", spectrum.max_imag_residual);
    println!("window={}:{}", window.j_min, window.j_max);
    println!("fitted_constant={}", fit.fitted_constant);
    println!("predicted_constant={}", fit.predicted_constant);
    println!("relative_deviation={}", fit.relative_deviation);
    println!("slope={}", fit.slope);
    Ok(())
}

/// `sphere-exact`: writes the enumerated exact sphere spectrum as CSV.
pub fn cmd_sphere_exact(count: usize, out_dir: &Path) -> Result<()> {
    if count == 0 {
        return Err(Error::InvalidConfig(
            "count must be at least 1".into(),
        ));
    }
    let values = exact_sphere_spectrum(count);
    let mut csv = String::from("j,value\n");
    for (j, v) in values.iter().enumerate() {
        csv.push_str(&format!("{j},{v}\n"));
    }
    let mut stage = OutputStage::new();
    stage.add(out_dir.join("sphere_exact.csv"), csv);
    stage.commit()?;
    println!("count={count}");
    println!("first={}", values[0]);
    println!("last={}", values[count - 1]);
    Ok(())
}

/// `mobius`: geometric invariants before and after the configured map, plus
/// the invariance deltas of the Willmore energy and the predicted constant.
pub fn cmd_mobius(config: &RunConfig) -> Result<()> {
    let map = config.mobius.as_ref().ok_or_else(|| {
        Error::InvalidConfig("mobius command requires --mobius SPEC".into())
    })?;
    let base = config.build_surface()?;
    let quad_before = base.quadrature(config.resolution.0, config.resolution.1)?;
    let before = geometry_report(&quad_before, Some(SIGNED_N_THETA))?;

    let moved = base.apply_mobius(map)?;
    let quad_after = moved.quadrature(config.resolution.0, config.resolution.1)?;
    let after = geometry_report(&quad_after, Some(SIGNED_N_THETA))?;

    let delta_w = (after.willmore_energy - before.willmore_energy).abs();
    let delta_c = (after.predicted_weyl_constant - before.predicted_weyl_constant).abs();

    let mut stage = OutputStage::new();
    stage.add(
        config.out_dir.join("geometry_before.json"),
        serde_json::to_string_pretty(&before)?,
    );
    stage.add(
        config.out_dir.join("geometry_after.json"),
        serde_json::to_string_pretty(&after)?,
    );
    stage.commit()?;

    println!("--- before ---");
    print_report(&before);
    println!("--- after ---");
    print_report(&after);
    println!("delta_willmore={delta_w}");
    println!(
        "delta_willmore_relative={}",
        delta_w / before.willmore_energy
    );
    println!("delta_constant={delta_c}");
    println!(
        "delta_constant_relative={}",
        delta_c / before.predicted_weyl_constant
    );
    println!("delta_area={}", after.area - before.area);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_to_unit_sphere() {
        let cfg = RunConfig::resolve(ConfigOverlay::default()).unwrap();
        assert_eq!(cfg.shape, ShapeSpec::Sphere { rho: 1.0 });
        assert_eq!(cfg.resolution, (32, 64));
        assert!(cfg.window.is_none());
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn torus_parameter_validation() {
        let overlay = ConfigOverlay {
            shape: Some("torus".into()),
            big_r: Some(1.0),
            small_r: Some(2.0),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(overlay),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn precedence_flags_over_file_over_defaults() {
        let file = ConfigOverlay {
            shape: Some("torus".into()),
            big_r: Some(3.0),
            small_r: Some(1.0),
            res: Some("8x8".into()),
            ..Default::default()
        };
        let flags = ConfigOverlay {
            big_r: Some(4.0),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(flags.over(file)).unwrap();
        assert_eq!(
            cfg.shape,
            ShapeSpec::Torus {
                big_r: 4.0,
                small_r: 1.0
            }
        );
        assert_eq!(cfg.resolution, (8, 8));
    }

    #[test]
    fn config_file_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "shape=sphere\nrho = 2.0 # big one\n\nres=16x16\n").unwrap();
        let overlay = ConfigOverlay::from_file(&path).unwrap();
        assert_eq!(overlay.rho, Some(2.0));
        assert_eq!(overlay.res.as_deref(), Some("16x16"));

        std::fs::write(&path, "nonsense\n").unwrap();
        assert!(ConfigOverlay::from_file(&path).is_err());
        std::fs::write(&path, "unknown_key=3\n").unwrap();
        assert!(ConfigOverlay::from_file(&path).is_err());
    }

    #[test]
    fn window_and_resolution_validation() {
        let overlay = ConfigOverlay {
            window: Some("0:10".into()),
            ..Default::default()
        };
        assert!(RunConfig::resolve(overlay).is_err());
        let overlay = ConfigOverlay {
            window: Some("20:10".into()),
            ..Default::default()
        };
        assert!(RunConfig::resolve(overlay).is_err());
        let overlay = ConfigOverlay {
            res: Some("2x64".into()),
            ..Default::default()
        };
        assert!(RunConfig::resolve(overlay).is_err());
        let overlay = ConfigOverlay {
            window: Some("16:200".into()),
            ..Default::default()
        };
        assert_eq!(
            RunConfig::resolve(overlay).unwrap().window,
            Some(FitWindow::new(16, 200))
        );
    }

    #[test]
    fn exit_codes_by_category() {
        assert_eq!(exit_code_for(&Error::InvalidConfig("x".into())), 1);
        assert_eq!(
            exit_code_for(&Error::MeshOpenBoundary { a: 0, b: 1 }),
            2
        );
        assert_eq!(exit_code_for(&Error::EigenSolver("x".into())), 3);
        assert_eq!(
            exit_code_for(&Error::InversionCenterOnSurface {
                x: 0.0,
                y: 0.0,
                z: 0.0,
                dist: 0.0,
                threshold: 1.0
            }),
            2
        );
    }
}
