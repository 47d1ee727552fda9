//! Closed triangle meshes: OFF/OBJ readers, manifold validation, and the
//! discrete curvature pipeline (one-third area weights, angle-weighted
//! normals, two-ring quadric fits).

use super::{curvatures, FundamentalForms, SurfaceNode, SurfaceQuadrature, Vec3};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

/// Vertices plus triangles of a closed orientable surface. Connectivity is
/// kept so that geometric node data can always be recomputed from positions,
/// e.g. after a Möbius transform.
#[derive(Debug, Clone)]
pub struct MeshSurface {
    pub label: String,
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

/// Reads an OFF or OBJ triangle mesh and converts it into a quadrature.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<SurfaceQuadrature> {
    MeshSurface::load(path)?.to_quadrature()
}

impl MeshSurface {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "mesh".to_string());
        let ext = path
            .extension()
            .map(|s| s.to_string_lossy().to_ascii_lowercase())
            .unwrap_or_default();
        match ext.as_str() {
            "off" => Self::parse_off(&text, label),
            "obj" => Self::parse_obj(&text, label),
            other => Err(Error::MeshParse {
                line: 0,
                message: format!("unsupported mesh extension `{other}` (expected .off or .obj)"),
            }),
        }
    }

    pub fn parse_off(text: &str, label: impl Into<String>) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(Error::MeshParse {
            line: 0,
            message: "empty file".into(),
        })?;
        let mut header_tokens: Vec<&str> = header.split_whitespace().collect();
        if header_tokens.first() != Some(&"OFF") {
            return Err(Error::MeshParse {
                line,
                message: "missing OFF header".into(),
            });
        }
        header_tokens.remove(0);
        let counts: Vec<&str> = if header_tokens.is_empty() {
            let (line, l) = lines.next().ok_or(Error::MeshParse {
                line,
                message: "missing count line".into(),
            })?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() < 2 {
                return Err(Error::MeshParse {
                    line,
                    message: "count line needs vertex and face counts".into(),
                });
            }
            toks
        } else {
            header_tokens
        };
        let n_vertices: usize = counts[0].parse().map_err(|_| Error::MeshParse {
            line,
            message: "bad vertex count".into(),
        })?;
        let n_faces: usize = counts[1].parse().map_err(|_| Error::MeshParse {
            line,
            message: "bad face count".into(),
        })?;

        let mut vertices = Vec::with_capacity(n_vertices);
        for _ in 0..n_vertices {
            let (line, l) = lines.next().ok_or(Error::MeshParse {
                line: 0,
                message: "unexpected end of vertex list".into(),
            })?;
            let v: Vec<f64> = l
                .split_whitespace()
                .take(3)
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::MeshParse {
                    line,
                    message: "bad vertex coordinates".into(),
                })?;
            if v.len() != 3 {
                return Err(Error::MeshParse {
                    line,
                    message: "vertex line needs 3 coordinates".into(),
                });
            }
            vertices.push(Vec3::new(v[0], v[1], v[2]));
        }
        let mut triangles = Vec::with_capacity(n_faces);
        for _ in 0..n_faces {
            let (line, l) = lines.next().ok_or(Error::MeshParse {
                line: 0,
                message: "unexpected end of face list".into(),
            })?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            let arity: usize = toks[0].parse().map_err(|_| Error::MeshParse {
                line,
                message: "bad face arity".into(),
            })?;
            if arity != 3 || toks.len() < 4 {
                return Err(Error::MeshParse {
                    line,
                    message: "only triangle faces are supported".into(),
                });
            }
            let mut tri = [0usize; 3];
            for (slot, tok) in tri.iter_mut().zip(&toks[1..4]) {
                let idx: usize = tok.parse().map_err(|_| Error::MeshParse {
                    line,
                    message: "bad vertex index".into(),
                })?;
                if idx >= vertices.len() {
                    return Err(Error::MeshParse {
                        line,
                        message: format!("vertex index {idx} out of range"),
                    });
                }
                *slot = idx;
            }
            triangles.push(tri);
        }
        Self::from_parts(label.into(), vertices, triangles)
    }

    pub fn parse_obj(text: &str, label: impl Into<String>) -> Result<Self> {
        let mut vertices: Vec<Vec3> = Vec::new();
        let mut triangles: Vec<[usize; 3]> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let mut toks = l.split_whitespace();
            match toks.next() {
                Some("v") => {
                    let v: Vec<f64> = toks
                        .clone()
                        .take(3)
                        .map(|t| t.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::MeshParse {
                            line,
                            message: "bad vertex coordinates".into(),
                        })?;
                    if v.len() != 3 {
                        return Err(Error::MeshParse {
                            line,
                            message: "vertex line needs 3 coordinates".into(),
                        });
                    }
                    vertices.push(Vec3::new(v[0], v[1], v[2]));
                }
                Some("f") => {
                    let refs: Vec<&str> = toks.collect();
                    if refs.len() != 3 {
                        return Err(Error::MeshParse {
                            line,
                            message: "only triangle faces are supported".into(),
                        });
                    }
                    let mut tri = [0usize; 3];
                    for (slot, r) in tri.iter_mut().zip(&refs) {
                        let first = r.split('/').next().unwrap_or("");
                        let idx: i64 = first.parse().map_err(|_| Error::MeshParse {
                            line,
                            message: "bad face index".into(),
                        })?;
                        let resolved = if idx > 0 {
                            (idx - 1) as usize
                        } else if idx < 0 {
                            let back = (-idx) as usize;
                            if back > vertices.len() {
                                return Err(Error::MeshParse {
                                    line,
                                    message: format!("relative index {idx} out of range"),
                                });
                            }
                            vertices.len() - back
                        } else {
                            return Err(Error::MeshParse {
                                line,
                                message: "face index 0 is invalid (OBJ is 1-based)".into(),
                            });
                        };
                        if resolved >= vertices.len() {
                            return Err(Error::MeshParse {
                                line,
                                message: format!("vertex index {} out of range", idx),
                            });
                        }
                        *slot = resolved;
                    }
                    triangles.push(tri);
                }
                // normals, texcoords, groups, materials: ignored
                _ => {}
            }
        }
        Self::from_parts(label.into(), vertices, triangles)
    }

    fn from_parts(label: String, vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.is_empty() || triangles.is_empty() {
            return Err(Error::MeshParse {
                line: 0,
                message: "mesh has no vertices or no faces".into(),
            });
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::MeshParse {
                    line: 0,
                    message: format!("triangle {t} repeats a vertex"),
                });
            }
        }
        let mesh = Self {
            label,
            vertices,
            triangles,
        };
        mesh.validate_closed_manifold()?;
        Ok(mesh)
    }

    /// Every undirected edge must carry exactly two incident triangles with
    /// opposite directions. Edges are inspected in sorted order and closure
    /// defects take priority over winding, so the reported edge is
    /// deterministic.
    pub fn validate_closed_manifold(&self) -> Result<()> {
        let mut undirected: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        for tri in &self.triangles {
            for e in 0..3 {
                let a = tri[e];
                let b = tri[(e + 1) % 3];
                let key = (a.min(b), a.max(b));
                let entry = undirected.entry(key).or_insert((0, 0));
                if (a, b) == key {
                    entry.0 += 1;
                } else {
                    entry.1 += 1;
                }
            }
        }
        for (&(a, b), &(fwd, bwd)) in &undirected {
            let total = fwd + bwd;
            if total == 1 {
                return Err(Error::MeshOpenBoundary { a, b });
            }
            if total > 2 {
                return Err(Error::MeshNonManifold { a, b, count: total });
            }
        }
        for (&(a, b), &(fwd, bwd)) in &undirected {
            if fwd != 1 || bwd != 1 {
                return Err(Error::MeshInconsistentWinding { a, b });
            }
        }
        let mut referenced = vec![false; self.vertices.len()];
        for tri in &self.triangles {
            for &v in tri {
                referenced[v] = true;
            }
        }
        if let Some(idx) = referenced.iter().position(|r| !r) {
            return Err(Error::MeshParse {
                line: 0,
                message: format!("vertex {idx} is not referenced by any face"),
            });
        }
        Ok(())
    }

    pub fn edge_count(&self) -> usize {
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for tri in &self.triangles {
            for e in 0..3 {
                let a = tri[e];
                let b = tri[(e + 1) % 3];
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    /// V - E + F.
    pub fn euler_characteristic(&self) -> i32 {
        self.vertices.len() as i32 - self.edge_count() as i32 + self.triangles.len() as i32
    }

    /// Six times the signed enclosed volume; positive when the triangles wind
    /// counterclockwise seen from outside.
    pub fn signed_volume6(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let (a, b, c) = (self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]);
                a.cross(&b).dot(&c)
            })
            .sum()
    }

    /// Same connectivity with every vertex moved through `f`.
    pub fn map_positions(&self, f: impl Fn(Vec3) -> Vec3) -> MeshSurface {
        MeshSurface {
            label: self.label.clone(),
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// One node per vertex: weight is one third of the incident triangle
    /// area, the normal is the angle-weighted average of face normals, and
    /// H, K come from a least-squares quadric over the two-ring, fitted in
    /// the frame whose height axis points into the body (so spheres get
    /// H > 0, matching the chart convention).
    pub fn to_quadrature(&self) -> Result<SurfaceQuadrature> {
        self.validate_closed_manifold()?;
        let mut mesh = self.clone();
        if mesh.signed_volume6() < 0.0 {
            for tri in &mut mesh.triangles {
                tri.swap(1, 2);
            }
        }
        let nv = mesh.vertices.len();

        let mut vertex_area = vec![0.0f64; nv];
        let mut vertex_normal = vec![Vec3::zeros(); nv];
        let mut one_ring: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nv];
        for tri in &mesh.triangles {
            let [i, j, k] = *tri;
            let (a, b, c) = (mesh.vertices[i], mesh.vertices[j], mesh.vertices[k]);
            let cross = (b - a).cross(&(c - a));
            let area2 = cross.norm();
            if area2 == 0.0 {
                return Err(Error::InvalidGeometry(format!(
                    "triangle ({i}, {j}, {k}) has zero area"
                )));
            }
            let face_normal = cross / area2;
            let area = 0.5 * area2;
            for &v in tri {
                vertex_area[v] += area / 3.0;
            }
            let angle = |p: Vec3, q: Vec3, r: Vec3| {
                let u = q - p;
                let w = r - p;
                (u.dot(&w) / (u.norm() * w.norm())).clamp(-1.0, 1.0).acos()
            };
            vertex_normal[i] += angle(a, b, c) * face_normal;
            vertex_normal[j] += angle(b, c, a) * face_normal;
            vertex_normal[k] += angle(c, a, b) * face_normal;
            one_ring[i].insert(j);
            one_ring[i].insert(k);
            one_ring[j].insert(i);
            one_ring[j].insert(k);
            one_ring[k].insert(i);
            one_ring[k].insert(j);
        }

        let mut nodes = Vec::with_capacity(nv);
        for v in 0..nv {
            let norm = vertex_normal[v].norm();
            if norm == 0.0 {
                return Err(Error::InvalidGeometry(format!(
                    "vertex {v} has a vanishing averaged normal"
                )));
            }
            let outward = vertex_normal[v] / norm;

            let mut ring2: BTreeSet<usize> = BTreeSet::new();
            for &u in &one_ring[v] {
                ring2.insert(u);
                for &w in &one_ring[u] {
                    if w != v {
                        ring2.insert(w);
                    }
                }
            }
            let forms = fit_quadric(&mesh.vertices, v, &ring2, outward)?;
            let (h, k) = curvatures(&forms)?;
            nodes.push(SurfaceNode {
                position: mesh.vertices[v],
                normal: outward,
                weight: vertex_area[v],
                forms,
                mean_curvature: h,
                gaussian_curvature: k,
                chart_coords: None,
            });
        }

        Ok(SurfaceQuadrature {
            nodes,
            euler_characteristic: mesh.euler_characteristic(),
            label: mesh.label.clone(),
        })
    }
}

/// Least-squares fit of h = a u^2/2 + b uv + c v^2/2 + d u + e v over the
/// neighbor offsets, in the tangent frame with height along the inner
/// normal. Offsets are rescaled by their mean length for conditioning.
fn fit_quadric(
    vertices: &[Vec3],
    center: usize,
    neighbors: &BTreeSet<usize>,
    outward: Vec3,
) -> Result<FundamentalForms> {
    if neighbors.len() < 5 {
        return Err(Error::InvalidGeometry(format!(
            "vertex {center} has only {} two-ring neighbors; need at least 5 for the quadric fit",
            neighbors.len()
        )));
    }
    let z = -outward;
    let pick = if z.x.abs() < 0.9 {
        Vec3::new(1.0, 0.0, 0.0)
    } else {
        Vec3::new(0.0, 1.0, 0.0)
    };
    let e1 = (pick - z * pick.dot(&z)).normalize();
    let e2 = z.cross(&e1);

    let p0 = vertices[center];
    let mean_len: f64 =
        neighbors.iter().map(|&u| (vertices[u] - p0).norm()).sum::<f64>() / neighbors.len() as f64;
    if mean_len == 0.0 {
        return Err(Error::InvalidGeometry(format!(
            "vertex {center} coincides with its neighbors"
        )));
    }

    let mut ata = nalgebra::SMatrix::<f64, 5, 5>::zeros();
    let mut atb = nalgebra::SVector::<f64, 5>::zeros();
    for &u in neighbors {
        let d = (vertices[u] - p0) / mean_len;
        let (x, y, h) = (d.dot(&e1), d.dot(&e2), d.dot(&z));
        let row = nalgebra::SVector::<f64, 5>::new(0.5 * x * x, x * y, 0.5 * y * y, x, y);
        ata += row * row.transpose();
        atb += row * h;
    }
    let coeff = ata.lu().solve(&atb).ok_or_else(|| {
        Error::InvalidGeometry(format!(
            "quadric fit at vertex {center} is singular (degenerate neighborhood)"
        ))
    })?;
    // undo the rescale: second-order coefficients pick up 1/mean_len
    let (a, b, c) = (
        coeff[0] / mean_len,
        coeff[1] / mean_len,
        coeff[2] / mean_len,
    );
    let (d, e) = (coeff[3], coeff[4]);
    let w = (1.0 + d * d + e * e).sqrt();
    Ok(FundamentalForms {
        e: 1.0 + d * d,
        f: d * e,
        g: 1.0 + e * e,
        l: a / w,
        m: b / w,
        n: c / w,
    })
}
