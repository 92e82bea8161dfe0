//! Configuration, orchestration and reporting for a full run.

use crate::certify::{
    double_cover_check, eversion_certificate, gauss_linking, hausdorff, is_embedded, temporal_continuity, torus_windings,
    Certificate, DoubleCoverReport, EversionCertificate,
};
use crate::disc::{build_disc, check_disc, DiscParams, DiscReport, DiscZero, ImmersedPatch};
use crate::error::{Error, Result};
use crate::eversion::{evert_with, positions_at, Eversion, EversionSchedule, EvertOptions, SphereLayout, Stage};
use crate::export::{obj_polyline, read_mesh, write_mesh, MeshFormat};
use crate::geom::{Point3, SampledCurve};
use crate::intersect::{self_intersections, IntersectTolerances};
use crate::mesh::{DiscGrid, SphereGrid, TriMesh};
use crate::s3::{fit_torus_of_revolution, handle_disc, hopf_rotate, stereographic, CliffordCoords, HopfSphere, S3Point};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub disc_rings: usize,
    pub disc_columns: usize,
    /// Rings of the sphere grid from pole to pole.
    pub sphere_rings: usize,
    /// Rings given to each cap; the band takes the rest.
    pub cap_rings: usize,
    pub columns: usize,
    pub frames: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { disc_rings: 256, disc_columns: 1024, sphere_rings: 128, cap_rings: 56, columns: 512, frames: 120 }
    }
}

impl GridConfig {
    pub fn doubled(&self) -> GridConfig {
        GridConfig {
            disc_rings: 2 * self.disc_rings,
            disc_columns: 2 * self.disc_columns,
            sphere_rings: 2 * self.sphere_rings,
            cap_rings: 2 * self.cap_rings,
            columns: 2 * self.columns,
            frames: 2 * self.frames,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub sigma_floor: f64,
    pub fd_step: f64,
    pub intersection: IntersectTolerances,
    pub linking_residual: f64,
    pub boundary_residual: f64,
    pub orthogonality_deg: f64,
    pub collar_width: f64,
    pub hausdorff: f64,
    pub normal_dot: f64,
    pub double_cover_tol: f64,
    pub double_cover_fraction: f64,
    /// Allowed ratio between continuity bounds at n and 2n frames.
    pub continuity_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sigma_floor: 1e-3,
            fd_step: 1e-6,
            intersection: IntersectTolerances::default(),
            linking_residual: 0.1,
            boundary_residual: 1e-6,
            orthogonality_deg: 0.5,
            collar_width: 0.002,
            hausdorff: 1e-3,
            normal_dot: -0.99,
            double_cover_tol: 1e-3,
            double_cover_fraction: 0.99,
            continuity_ratio: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: MeshFormat,
    pub directory: PathBuf,
    /// Stages whose frames are written; empty means all.
    pub stages: Vec<Stage>,
    pub write_frames: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { format: MeshFormat::Ply, directory: PathBuf::from("out"), stages: Vec::new(), write_frames: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksConfig {
    pub disc: bool,
    pub endpoints: bool,
    pub double_cover: bool,
    pub spin_symmetry: bool,
    /// Re-samples the run at twice the frame count.
    pub continuity_doubling: bool,
    /// Self-intersection inventory of every frame (slow).
    pub frame_inventory: bool,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            disc: true,
            endpoints: true,
            double_cover: true,
            spin_symmetry: true,
            continuity_doubling: true,
            frame_inventory: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub grid: GridConfig,
    pub schedule: EversionSchedule,
    pub disc: DiscParams,
    pub tolerances: Tolerances,
    pub output: OutputConfig,
    pub checks: ChecksConfig,
}

impl PipelineConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let c: PipelineConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let g = &self.grid;
        if g.frames < 24 {
            return bad(format!("frames must be at least 24, got {}", g.frames));
        }
        if g.columns < 64 || g.disc_columns < 64 {
            return bad("column counts must be at least 64".into());
        }
        if g.sphere_rings < 16 || g.disc_rings < 16 {
            return bad("ring counts must be at least 16".into());
        }
        if g.cap_rings == 0 || 2 * g.cap_rings >= g.sphere_rings {
            return bad("cap rings must leave at least one band ring".into());
        }
        self.schedule.validate()?;
        let t = &self.tolerances;
        let positive = [
            t.sigma_floor,
            t.fd_step,
            t.intersection.coincidence,
            t.intersection.chaining,
            t.linking_residual,
            t.boundary_residual,
            t.orthogonality_deg,
            t.collar_width,
            t.hausdorff,
            t.double_cover_tol,
            t.double_cover_fraction,
            t.continuity_ratio,
        ];
        if positive.iter().any(|&x| !(x > 0.0)) {
            return bad("tolerances must be positive".into());
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<SphereLayout> {
        SphereLayout::new(self.grid.sphere_rings, self.grid.columns, self.grid.cap_rings)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub index: usize,
    pub t: f64,
    pub stage: Stage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub index: usize,
    pub t: f64,
    pub stage: Stage,
    pub min_sigma: f64,
    pub double_curves: Option<usize>,
    pub triple_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct EversionSummary {
    pub frames: Vec<FrameRecord>,
    pub min_sigma: f64,
    pub min_sigma_frame: usize,
    pub temporal_continuity: f64,
    pub temporal_continuity_doubled: Option<f64>,
    pub initial_embedded: Option<bool>,
    pub final_embedded: Option<bool>,
    pub endpoint_certificate: Option<EversionCertificate>,
    pub double_cover: Option<DoubleCoverReport>,
    pub spin_hausdorff: Option<f64>,
    pub euler_characteristic: i64,
}

/// Wall-clock data, kept apart so the rest of the report is reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Timing {
    pub started_unix: u64,
    pub seconds: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: PipelineConfig,
    pub passed: bool,
    pub certificate: Certificate,
    pub disc: Option<DiscReport>,
    pub eversion: EversionSummary,
    pub manifest: Vec<ManifestEntry>,
    pub notes: Vec<String>,
    pub timing: Timing,
}

pub const REPORT_FILE: &str = "report.json";

const UNKNOTTED_NOTE: &str = "boundary unknottedness is not certified directly; the winding numbers of the boundary \
     knot and the linking number of the collar pair are certified instead";

fn unix_now() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub fn frame_file_name(index: usize, format: MeshFormat) -> String {
    format!("frame_{index:04}.{}", format.extension())
}

/// Adds the disc checks to `cert`.
pub fn certify_disc(r: &DiscReport, patch: &ImmersedPatch, tol: &Tolerances, cert: &mut Certificate) {
    cert.push("disc.sigma_min", r.min_sigma, r.min_sigma >= tol.sigma_floor);
    cert.push("disc.double_curves", r.double_curves as f64, r.double_curves == 1);
    cert.push("disc.triple_points", r.triple_points as f64, r.triple_points == 0);
    let lk = r.collar_linking;
    cert.push("disc.collar_linking", lk, (lk - -2.0).abs() < tol.linking_residual);
    cert.push("disc.boundary_residual", r.boundary_residual, r.boundary_residual < tol.boundary_residual);
    cert.push(
        "disc.orthogonality_deg",
        r.max_orthogonality_error_deg,
        r.max_orthogonality_error_deg < tol.orthogonality_deg && r.collar_outside,
    );
    let (l, m) = torus_windings(&patch.boundary_curve(patch.grid.nv));
    let res = (l - l.round()).abs().max((m - m.round()).abs());
    cert.push("disc.boundary_windings", res, l.round() == 2.0 && m.round() == -1.0 && res < 0.01);
}

/// Builds and certifies D_0 alone.
pub fn run_disc(config: &PipelineConfig) -> Result<(ImmersedPatch, DiscReport, Certificate)> {
    config.validate()?;
    let patch = build_disc(config.disc.clone(), DiscGrid::new(config.grid.disc_rings, config.grid.disc_columns))?;
    let tol = &config.tolerances;
    let report = check_disc(&patch, &tol.intersection, tol.collar_width, tol.fd_step);
    let mut cert = Certificate::default();
    certify_disc(&report, &patch, tol, &mut cert);
    Ok((patch, report, cert))
}

/// Builds D_0, runs the eversion, certifies it and writes frames and report.
pub fn run(config: &PipelineConfig) -> Result<RunReport> {
    config.validate()?;
    let mut timing = Timing { started_unix: unix_now(), seconds: BTreeMap::new() };
    let tol = config.tolerances;
    let mut cert = Certificate::default();
    let out = &config.output;
    if out.write_frames {
        fs::create_dir_all(&out.directory)?;
    }

    let clock = Instant::now();
    let disc = Arc::new(DiscZero::new(config.disc.clone())?);
    let mut disc_report = None;
    if config.checks.disc {
        let patch = ImmersedPatch {
            disc: disc.clone(),
            rotation: 0.0,
            grid: DiscGrid::new(config.grid.disc_rings, config.grid.disc_columns),
        };
        let r = check_disc(&patch, &tol.intersection, tol.collar_width, tol.fd_step);
        certify_disc(&r, &patch, &tol, &mut cert);
        disc_report = Some(r);
    }
    timing.seconds.insert("disc".into(), clock.elapsed().as_secs_f64());

    let ev = Eversion::new(disc, config.schedule)?;
    let layout = config.layout()?;
    let tris = ev.oriented_triangles(&layout);
    let opts = EvertOptions {
        frames: config.grid.frames,
        sigma_floor: tol.sigma_floor,
        fd_step: tol.fd_step,
        abort_on_failure: false,
    };
    let mut summary = EversionSummary { min_sigma: f64::INFINITY, ..Default::default() };
    let mut manifest = Vec::new();
    let mut first: Option<Vec<Point3>> = None;
    let mut prev: Option<(f64, Vec<Point3>)> = None;
    let mut last: Option<Vec<Point3>> = None;
    let mut continuity = 0.0f64;
    evert_with(&ev, &layout, &opts, |f| {
        let clock = Instant::now();
        if f.min_sigma < summary.min_sigma || summary.frames.is_empty() {
            summary.min_sigma = f.min_sigma;
            summary.min_sigma_frame = f.index;
        }
        let mesh = TriMesh::new(f.positions, tris.clone());
        let (dc, tp) = if config.checks.frame_inventory {
            let inv = self_intersections(&mesh, &tol.intersection);
            (Some(inv.curve_count()), Some(inv.triple_points.len()))
        } else {
            (None, None)
        };
        summary.frames.push(FrameRecord { index: f.index, t: f.t, stage: f.stage, min_sigma: f.min_sigma, double_curves: dc, triple_points: tp });
        if out.write_frames && (out.stages.is_empty() || out.stages.contains(&f.stage)) {
            let name = frame_file_name(f.index, out.format);
            write_mesh(&mesh, out.format, &out.directory.join(&name))?;
            manifest.push(ManifestEntry { file: name, index: f.index, t: f.t, stage: f.stage });
        }
        if let Some((t0, p0)) = &prev {
            continuity = continuity.max(temporal_continuity(&[(*t0, p0), (f.t, &mesh.positions)]));
        }
        if first.is_none() {
            first = Some(mesh.positions.clone());
        }
        last = Some(mesh.positions.clone());
        prev = Some((f.t, mesh.positions));
        *timing.seconds.entry(f.stage.name().to_string()).or_insert(0.0) += clock.elapsed().as_secs_f64();
        Ok(())
    })?;
    summary.temporal_continuity = continuity;
    cert.push("eversion.sigma_min", summary.min_sigma, summary.min_sigma >= tol.sigma_floor);
    cert.push("eversion.temporal_continuity", continuity, continuity.is_finite());

    let first = TriMesh::new(first.expect("at least two frames"), tris.clone());
    let last = TriMesh::new(last.expect("at least two frames"), tris.clone());
    summary.euler_characteristic = first.euler_characteristic();
    cert.push("eversion.euler_characteristic", summary.euler_characteristic as f64, summary.euler_characteristic == 2);

    if config.checks.endpoints {
        let clock = Instant::now();
        let a = is_embedded(&first, &tol.intersection);
        let b = is_embedded(&last, &tol.intersection);
        cert.push("eversion.initial_embedded", a as u8 as f64, a);
        cert.push("eversion.final_embedded", b as u8 as f64, b);
        let c = eversion_certificate(&first, &last, tol.hausdorff, tol.normal_dot);
        cert.push("eversion.endpoint_hausdorff", c.hausdorff, c.hausdorff < tol.hausdorff);
        cert.push("eversion.mean_normal_dot", c.mean_normal_dot, c.mean_normal_dot <= tol.normal_dot);
        summary.initial_embedded = Some(a);
        summary.final_embedded = Some(b);
        summary.endpoint_certificate = Some(c);
        timing.seconds.insert("endpoints".into(), clock.elapsed().as_secs_f64());
    }
    if config.checks.double_cover {
        let clock = Instant::now();
        let r = halfway_double_cover(&ev, &layout, &tris, PI, tol.double_cover_tol);
        cert.push("spin.double_cover_fraction", r.fraction, r.fraction >= tol.double_cover_fraction);
        summary.double_cover = Some(r);
        timing.seconds.insert("double_cover".into(), clock.elapsed().as_secs_f64());
    }
    if config.checks.spin_symmetry {
        let clock = Instant::now();
        let h = spin_end_hausdorff(&ev, &layout, &tris);
        cert.push("spin.end_hausdorff", h, h < tol.hausdorff);
        summary.spin_hausdorff = Some(h);
        timing.seconds.insert("spin_symmetry".into(), clock.elapsed().as_secs_f64());
    }
    if config.checks.continuity_doubling {
        let clock = Instant::now();
        let c2 = continuity_bound(&ev, &layout, 2 * config.grid.frames);
        let ratio = c2.max(continuity) / c2.min(continuity);
        cert.push("eversion.continuity_doubling_ratio", ratio, ratio <= tol.continuity_ratio);
        summary.temporal_continuity_doubled = Some(c2);
        timing.seconds.insert("continuity_doubling".into(), clock.elapsed().as_secs_f64());
    }

    let report = RunReport {
        config: config.clone(),
        passed: cert.passed(),
        certificate: cert,
        disc: disc_report,
        eversion: summary,
        manifest,
        notes: vec![UNKNOTTED_NOTE.to_string()],
        timing,
    };
    if out.write_frames {
        write_report(&report, &out.directory.join(REPORT_FILE))?;
    }
    Ok(report)
}

pub fn write_report(report: &RunReport, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(report)?)?;
    Ok(())
}

/// Temporal continuity bound of an n-frame run, from positions only.
pub fn continuity_bound(ev: &Eversion, layout: &SphereLayout, frames: usize) -> f64 {
    let ts = crate::eversion::frame_times(frames);
    let mut prev = positions_at(ev, layout, ts[0]);
    let mut c = 0.0f64;
    for w in ts.windows(2) {
        let next = positions_at(ev, layout, w[1]);
        c = c.max(temporal_continuity(&[(w[0], &prev), (w[1], &next)]));
        prev = next;
    }
    c
}

/// Two-sheet statistics of the band of S_θ over its own interior vertices.
pub fn halfway_double_cover(ev: &Eversion, layout: &SphereLayout, tris: &[[u32; 3]], theta: f64, tol: f64) -> DoubleCoverReport {
    let mesh = TriMesh::new(layout.charts().iter().map(|&c| ev.assemble(theta, c)).collect(), tris.to_vec());
    let samples: Vec<Point3> = layout.band_vertices().iter().map(|&i| mesh.positions[i as usize]).collect();
    double_cover_check(&mesh, &layout.band_triangle_mask(), &samples, tol)
}

/// Hausdorff distance between the first and last spheres of the spin.
pub fn spin_end_hausdorff(ev: &Eversion, layout: &SphereLayout, tris: &[[u32; 3]]) -> f64 {
    let t0 = ev.schedule.theta0;
    let charts = layout.charts();
    let a = TriMesh::new(charts.iter().map(|&c| ev.assemble(t0, c)).collect(), tris.to_vec());
    let b = TriMesh::new(charts.iter().map(|&c| ev.assemble(TAU - t0, c)).collect(), tris.to_vec());
    hausdorff(&a, &b)
}

/// Mesh-level checks on frames already written to `dir`.
pub fn verify_directory(dir: &Path) -> Result<Certificate> {
    let report: RunReport = serde_json::from_str(&fs::read_to_string(dir.join(REPORT_FILE))?)?;
    let tol = report.config.tolerances;
    let mut cert = Certificate::default();
    let mut meshes: Vec<(f64, TriMesh)> = Vec::new();
    for e in &report.manifest {
        let path = dir.join(&e.file);
        if !path.exists() {
            return Err(Error::Frame { index: e.index, cause: format!("missing file {}", e.file) });
        }
        meshes.push((e.t, read_mesh(&path)?));
    }
    if meshes.is_empty() {
        return Err(Error::Config("manifest lists no frames".into()));
    }
    let chi_ok = meshes.iter().all(|(_, m)| m.euler_characteristic() == 2);
    cert.push("frames.euler_characteristic", meshes.len() as f64, chi_ok);
    let pairs: Vec<(f64, &[Point3])> = meshes.iter().map(|(t, m)| (*t, m.positions.as_slice())).collect();
    let c = temporal_continuity(&pairs);
    cert.push("frames.temporal_continuity", c, c.is_finite());
    let all_written = report.manifest.len() == report.config.grid.frames;
    if all_written {
        let (first, last) = (&meshes[0].1, &meshes[meshes.len() - 1].1);
        let a = is_embedded(first, &tol.intersection);
        let b = is_embedded(last, &tol.intersection);
        cert.push("frames.initial_embedded", a as u8 as f64, a);
        cert.push("frames.final_embedded", b as u8 as f64, b);
        // positions were stored at single precision
        let e = eversion_certificate(first, last, tol.hausdorff.max(1e-5), tol.normal_dot);
        cert.push("frames.endpoint_hausdorff", e.hausdorff, e.hausdorff < tol.hausdorff.max(1e-5));
        cert.push("frames.mean_normal_dot", e.mean_normal_dot, e.mean_normal_dot <= tol.normal_dot);
    }
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct S3Figures {
    pub files: Vec<String>,
    pub clifford_fit_residual: f64,
    pub clifford_radii: (f64, f64),
    pub alpha_core_deviation: f64,
    pub sphere_levels: Vec<f64>,
}

fn s3_mesh(grid: SphereGrid, f: impl Fn(f64, f64) -> S3Point) -> Result<TriMesh> {
    let pos = grid.params().into_iter().map(|(u, v)| stereographic(f(u, v))).collect::<Result<Vec<_>>>()?;
    Ok(TriMesh::new(pos, grid.triangles()))
}

/// Stereographic meshes of the Clifford torus, Hopf circles, handle discs
/// and the spheres S^h_θ.
pub fn export_s3_figures(dir: &Path, format: MeshFormat, columns: usize) -> Result<S3Figures> {
    fs::create_dir_all(dir)?;
    let n = columns.max(16);
    let mut files = Vec::new();
    let put = |files: &mut Vec<String>, name: String, mesh: &TriMesh| -> Result<()> {
        write_mesh(mesh, format, &dir.join(&name))?;
        files.push(name);
        Ok(())
    };
    let ext = format.extension();

    let mut ct_pos = Vec::with_capacity(n * n);
    let mut ct_tris = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = CliffordCoords { phi: TAU * i as f64 / n as f64, psi: TAU * j as f64 / n as f64 + 0.5 };
            ct_pos.push(stereographic(S3Point::clifford(c))?);
            let (a, b) = ((i * n + j) as u32, (i * n + (j + 1) % n) as u32);
            let (c2, d) = ((((i + 1) % n) * n + (j + 1) % n) as u32, (((i + 1) % n) * n + j) as u32);
            ct_tris.push([a, b, c2]);
            ct_tris.push([a, c2, d]);
        }
    }
    let (big, small, res) = fit_torus_of_revolution(&ct_pos);
    put(&mut files, format!("clifford_torus.{ext}"), &TriMesh::new(ct_pos, ct_tris))?;

    let circle = |p: S3Point| -> Result<Vec<Point3>> {
        (0..n).map(|k| stereographic(hopf_rotate(p, TAU * k as f64 / n as f64))).collect()
    };
    let alpha_core = circle(S3Point::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)))?;
    let dev = alpha_core.iter().map(|p| (p.norm() - 1.0).abs().max(p.z.abs())).fold(0.0, f64::max);
    fs::write(dir.join("hopf_alpha_core.obj"), obj_polyline(&alpha_core))?;
    files.push("hopf_alpha_core.obj".into());
    for (k, psi) in [0.5, 2.0, 4.0].into_iter().enumerate() {
        let p = S3Point::clifford(CliffordCoords { phi: 0.0, psi });
        fs::write(dir.join(format!("hopf_circle_{k}.obj")), obj_polyline(&circle(p)?))?;
        files.push(format!("hopf_circle_{k}.obj"));
    }

    let disc_grid = DiscGrid::new(n / 4, n);
    for (k, psi) in [PI / 2.0, PI, 3.0 * PI / 2.0].into_iter().enumerate() {
        let pos = disc_grid.params().into_iter().map(|(r, v)| stereographic(handle_disc(psi, r, v))).collect::<Result<Vec<_>>>()?;
        put(&mut files, format!("handle_disc_{k}.{ext}"), &TriMesh::new(pos, disc_grid.triangles()))?;
    }

    let levels: Vec<f64> = (1..6).map(|k| PI * k as f64 / 6.0).collect();
    for (k, &theta) in levels.iter().enumerate() {
        let s = HopfSphere::new(theta)?;
        let m = s3_mesh(SphereGrid::new(3 * (n / 8).max(2), n), |u, v| s.point(u, v))?;
        put(&mut files, format!("hopf_sphere_{k}.{ext}"), &m)?;
    }
    Ok(S3Figures { files, clifford_fit_residual: res, clifford_radii: (big, small), alpha_core_deviation: dev, sphere_levels: levels })
}

/// Boundary windings and collar linking of D_0 at one resolution, used to
/// compare integer invariants across resolutions.
pub fn disc_invariants(patch: &ImmersedPatch, collar_width: f64) -> Result<(i64, i64, i64)> {
    let b = patch.boundary_curve(patch.grid.nv);
    let (l, m) = torus_windings(&b);
    let c = SampledCurve::sample(|v| patch.point(1.0 - collar_width, v), 0.0, TAU, patch.grid.nv, true);
    let lk = gauss_linking(&b, &c)?;
    Ok((l.round() as i64, m.round() as i64, lk.round() as i64))
}
