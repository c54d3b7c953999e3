//! JSON mesh files: `{"vertices": [[x, y], ...], "cells": [[i0, i1, ...], ...]}`.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::PolyMesh;
use crate::error::Result;
use crate::geometry::Point;

#[derive(Deserialize)]
struct MeshFile {
    vertices: Vec<[f64; 2]>,
    cells: Vec<Vec<usize>>,
}

/// Decimal with 17 significant digits; parses back to the same `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn mesh_to_json(mesh: &PolyMesh) -> String {
    let mut out = String::from("{\n  \"vertices\": [\n");
    let nv = mesh.num_vertices();
    for (i, p) in mesh.vertices().iter().enumerate() {
        let sep = if i + 1 < nv { "," } else { "" };
        let _ = writeln!(out, "    [{}, {}]{sep}", format_f64(p.x), format_f64(p.y));
    }
    out.push_str("  ],\n  \"cells\": [\n");
    let nc = mesh.num_cells();
    for (c, cell) in mesh.cells().iter().enumerate() {
        let ids: Vec<String> = cell.iter().map(usize::to_string).collect();
        let sep = if c + 1 < nc { "," } else { "" };
        let _ = writeln!(out, "    [{}]{sep}", ids.join(", "));
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn mesh_from_json(text: &str) -> Result<PolyMesh> {
    let file: MeshFile = serde_json::from_str(text)?;
    PolyMesh::new(
        file.vertices.iter().map(|&[x, y]| Point::new(x, y)).collect(),
        file.cells,
    )
}

pub fn save_mesh(mesh: &PolyMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, mesh_to_json(mesh))?;
    Ok(())
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<PolyMesh> {
    mesh_from_json(&std::fs::read_to_string(path)?)
}
