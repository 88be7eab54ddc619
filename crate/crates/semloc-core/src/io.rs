//! Plain-text file formats: graphs, matches, transforms, ground truth,
//! frame grids (PGM or CSV) and frame manifests. Everything is line-based
//! UTF-8 so external tooling can produce and check the files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::{Matrix3, Point3, Vector3};

use crate::error::{Error, Result};
use crate::extraction::{Grid, Intrinsics, LabeledFrame};
use crate::graph::{RigidTransform, SemanticGraph, SemanticVertex};
use crate::matching::MatchSet;
use crate::scenario::GroundTruth;

const GRAPH_HEADER: &str = "# semgraph v1";
const MATCHES_HEADER: &str = "# matches v1";
const TRANSFORM_HEADER: &str = "# transform v1";
const TRUTH_HEADER: &str = "# truth v1";

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn parse_f64(path: &Path, line: usize, tok: &str) -> Result<f64> {
    tok.parse()
        .map_err(|_| parse_err(path, line, format!("expected a real number, got {tok:?}")))
}

fn parse_usize(path: &Path, line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(path, line, format!("expected a non-negative integer, got {tok:?}")))
}

// ---------------------------------------------------------------------------
// graph files: `id label x y z` per line

pub fn write_graph<W: Write>(graph: &SemanticGraph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{GRAPH_HEADER} edge_threshold={}", graph.edge_threshold())?;
    for v in graph.vertices() {
        writeln!(
            out,
            "{} {} {} {} {}",
            v.id, v.label, v.position.x, v.position.y, v.position.z
        )?;
    }
    Ok(())
}

pub fn save_graph(path: impl AsRef<Path>, graph: &SemanticGraph) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_graph(graph, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_graph<R: BufRead>(reader: R, path: &Path) -> Result<SemanticGraph> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty graph file"))?;
    let header = header?;
    let rest = header
        .strip_prefix(GRAPH_HEADER)
        .ok_or_else(|| parse_err(path, 1, format!("expected `{GRAPH_HEADER} ...` header")))?;
    let threshold_tok = rest
        .trim()
        .strip_prefix("edge_threshold=")
        .ok_or_else(|| parse_err(path, 1, "header is missing edge_threshold="))?;
    let edge_threshold = parse_f64(path, 1, threshold_tok)?;

    let mut rows: Vec<(usize, u32, Point3<f64>)> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(parse_err(path, line_no, "expected `id label x y z`"));
        }
        let id = parse_usize(path, line_no, toks[0])?;
        let label: u32 = toks[1]
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("bad label {:?}", toks[1])))?;
        let p = Point3::new(
            parse_f64(path, line_no, toks[2])?,
            parse_f64(path, line_no, toks[3])?,
            parse_f64(path, line_no, toks[4])?,
        );
        rows.push((id, label, p));
    }
    let n = rows.len();
    let mut slots: Vec<Option<SemanticVertex>> = vec![None; n];
    for (id, label, p) in rows {
        if id >= n {
            return Err(parse_err(path, 0, format!("vertex ids must be dense 0..{n}, got {id}")));
        }
        if slots[id].is_some() {
            return Err(parse_err(path, 0, format!("duplicate vertex id {id}")));
        }
        slots[id] = Some(SemanticVertex::new(id, label, p));
    }
    let vertices = slots.into_iter().map(|s| s.unwrap()).collect();
    SemanticGraph::build(vertices, edge_threshold)
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<SemanticGraph> {
    let path = path.as_ref();
    read_graph(BufReader::new(File::open(path)?), path)
}

// ---------------------------------------------------------------------------
// match files: `q t score` per line

pub fn write_matches<W: Write>(matches: &MatchSet, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{MATCHES_HEADER}")?;
    for (&(q, t), &s) in matches.pairs.iter().zip(&matches.scores) {
        writeln!(out, "{q} {t} {s}")?;
    }
    Ok(())
}

pub fn save_matches(path: impl AsRef<Path>, matches: &MatchSet) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matches(matches, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_matches<R: BufRead>(reader: R, path: &Path) -> Result<MatchSet> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty match file"))?;
    if header?.trim() != MATCHES_HEADER {
        return Err(parse_err(path, 1, format!("expected `{MATCHES_HEADER}` header")));
    }
    let mut out = MatchSet::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(path, line_no, "expected `q t score`"));
        }
        let q = parse_usize(path, line_no, toks[0])?;
        let t = parse_usize(path, line_no, toks[1])?;
        if !seen.insert((q, t)) {
            return Err(parse_err(path, line_no, format!("duplicate match pair ({q}, {t})")));
        }
        out.push(q, t, parse_f64(path, line_no, toks[2])?);
    }
    Ok(out)
}

pub fn load_matches(path: impl AsRef<Path>) -> Result<MatchSet> {
    let path = path.as_ref();
    read_matches(BufReader::new(File::open(path)?), path)
}

// ---------------------------------------------------------------------------
// transforms: 12 reals, row-major 3x4 [R | T]

pub fn format_transform(t: &RigidTransform) -> String {
    let r = &t.rotation;
    let v = &t.translation;
    format!(
        "{} {} {} {} {} {} {} {} {} {} {} {}",
        r[(0, 0)], r[(0, 1)], r[(0, 2)], v.x,
        r[(1, 0)], r[(1, 1)], r[(1, 2)], v.y,
        r[(2, 0)], r[(2, 1)], r[(2, 2)], v.z,
    )
}

fn transform_from_tokens(path: &Path, line: usize, toks: &[&str]) -> Result<RigidTransform> {
    if toks.len() != 12 {
        return Err(parse_err(path, line, format!("expected 12 reals, got {}", toks.len())));
    }
    let mut vals = [0.0f64; 12];
    for (i, tok) in toks.iter().enumerate() {
        vals[i] = parse_f64(path, line, tok)?;
    }
    let rotation = Matrix3::new(
        vals[0], vals[1], vals[2],
        vals[4], vals[5], vals[6],
        vals[8], vals[9], vals[10],
    );
    let translation = Vector3::new(vals[3], vals[7], vals[11]);
    RigidTransform::new(rotation, translation)
}

pub fn save_transform(path: impl AsRef<Path>, t: &RigidTransform) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{TRANSFORM_HEADER}")?;
    writeln!(w, "{}", format_transform(t))?;
    w.flush()?;
    Ok(())
}

pub fn load_transform(path: impl AsRef<Path>) -> Result<RigidTransform> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty transform file"))?;
    if header.trim() != TRANSFORM_HEADER {
        return Err(parse_err(path, 1, format!("expected `{TRANSFORM_HEADER}` header")));
    }
    let toks: Vec<&str> = lines.flat_map(|(_, l)| l.split_whitespace()).collect();
    transform_from_tokens(path, 2, &toks)
}

// ---------------------------------------------------------------------------
// ground truth: transform line + `q t` pairs

pub fn save_truth(path: impl AsRef<Path>, truth: &GroundTruth) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{TRUTH_HEADER}")?;
    writeln!(w, "{}", format_transform(&truth.transform))?;
    for &(q, t) in &truth.matches {
        writeln!(w, "{q} {t}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_truth(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty truth file"))?;
    if header.trim() != TRUTH_HEADER {
        return Err(parse_err(path, 1, format!("expected `{TRUTH_HEADER}` header")));
    }
    let (_, tline) = lines.next().ok_or_else(|| parse_err(path, 2, "missing transform line"))?;
    let toks: Vec<&str> = tline.split_whitespace().collect();
    let transform = transform_from_tokens(path, 2, &toks)?;
    let mut matches = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(path, line_no, "expected `q t`"));
        }
        matches.push((
            parse_usize(path, line_no, toks[0])?,
            parse_usize(path, line_no, toks[1])?,
        ));
    }
    Ok(GroundTruth { transform, matches })
}

// ---------------------------------------------------------------------------
// frame inputs

/// Reads a PGM (P2 ASCII or P5 binary) image as a label grid; the gray
/// value is the label. P5 with maxval > 255 uses two big-endian bytes per
/// pixel.
pub fn read_pgm(path: impl AsRef<Path>) -> Result<Grid<u32>> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    // Header tokens (magic, width, height, maxval) with `#` comments.
    let mut pos = 0usize;
    let mut tokens: Vec<String> = Vec::new();
    while tokens.len() < 4 && pos < bytes.len() {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos > start {
            tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
        }
    }
    if tokens.len() < 4 {
        return Err(parse_err(path, 1, "truncated PGM header"));
    }
    let magic = tokens[0].as_str();
    let width = parse_usize(path, 1, &tokens[1])?;
    let height = parse_usize(path, 1, &tokens[2])?;
    let maxval = parse_usize(path, 1, &tokens[3])?;
    if maxval == 0 || maxval > 65535 {
        return Err(parse_err(path, 1, format!("unsupported PGM maxval {maxval}")));
    }
    let n = width * height;
    let data: Vec<u32> = match magic {
        "P2" => {
            let text = String::from_utf8_lossy(&bytes[pos..]);
            let vals: Vec<u32> = text
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| parse_err(path, 0, format!("bad pixel {t:?}"))))
                .collect::<Result<_>>()?;
            if vals.len() != n {
                return Err(parse_err(path, 0, format!("expected {n} pixels, got {}", vals.len())));
            }
            vals
        }
        "P5" => {
            pos += 1; // single whitespace after maxval
            let body = &bytes[pos.min(bytes.len())..];
            if maxval <= 255 {
                if body.len() < n {
                    return Err(parse_err(path, 0, "truncated P5 pixel data"));
                }
                body[..n].iter().map(|&b| b as u32).collect()
            } else {
                if body.len() < 2 * n {
                    return Err(parse_err(path, 0, "truncated P5 pixel data"));
                }
                body[..2 * n]
                    .chunks_exact(2)
                    .map(|c| u32::from(c[0]) << 8 | u32::from(c[1]))
                    .collect()
            }
        }
        other => return Err(parse_err(path, 1, format!("unsupported PGM magic {other:?}"))),
    };
    Grid::new(width, height, data)
}

/// Reads a comma-separated grid of labels.
pub fn read_semantic_csv(path: impl AsRef<Path>) -> Result<Grid<u32>> {
    let path = path.as_ref();
    let rows = read_csv_rows(path, |tok, line_no| {
        tok.parse::<u32>()
            .map_err(|_| parse_err(path, line_no, format!("bad label {tok:?}")))
    })?;
    grid_from_rows(path, rows)
}

/// Reads a comma-separated grid of depths in meters.
pub fn read_depth_csv(path: impl AsRef<Path>) -> Result<Grid<f64>> {
    let path = path.as_ref();
    let rows = read_csv_rows(path, |tok, line_no| parse_f64(path, line_no, tok))?;
    grid_from_rows(path, rows)
}

fn read_csv_rows<T, F>(path: &Path, parse: F) -> Result<Vec<Vec<T>>>
where
    F: Fn(&str, usize) -> Result<T>,
{
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row: Vec<T> = trimmed
            .split(',')
            .map(|t| parse(t.trim(), idx + 1))
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn grid_from_rows<T: Copy>(path: &Path, rows: Vec<Vec<T>>) -> Result<Grid<T>> {
    let height = rows.len();
    if height == 0 {
        return Err(parse_err(path, 1, "empty grid"));
    }
    let width = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(parse_err(path, i + 1, format!("ragged row: {} vs {width}", row.len())));
        }
    }
    Grid::new(width, height, rows.into_iter().flatten().collect())
}

/// Frame metadata: a `fx fy cx cy` line followed by 12 reals (row-major
/// 3x4 camera→map pose).
pub fn load_frame_meta(path: impl AsRef<Path>) -> Result<(Intrinsics, RigidTransform)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'));
    let (first_no, first) = lines.next().ok_or_else(|| parse_err(path, 1, "empty meta file"))?;
    let toks: Vec<&str> = first.split_whitespace().collect();
    if toks.len() != 4 {
        return Err(parse_err(path, first_no + 1, "expected `fx fy cx cy`"));
    }
    let intr = Intrinsics {
        fx: parse_f64(path, first_no + 1, toks[0])?,
        fy: parse_f64(path, first_no + 1, toks[1])?,
        cx: parse_f64(path, first_no + 1, toks[2])?,
        cy: parse_f64(path, first_no + 1, toks[3])?,
    };
    let pose_toks: Vec<&str> = lines.flat_map(|(_, l)| l.split_whitespace()).collect();
    let pose = transform_from_tokens(path, first_no + 2, &pose_toks)?;
    Ok((intr, pose))
}

/// One line of a frame manifest: semantic, depth and metadata paths.
#[derive(Debug, Clone)]
pub struct FrameEntry {
    pub semantic: PathBuf,
    pub depth: PathBuf,
    pub meta: PathBuf,
}

/// Reads a manifest of `semantic depth meta` path triples, one frame per
/// line, relative paths resolved against the manifest's directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<FrameEntry>> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let reader = BufReader::new(File::open(path)?);
    let mut entries = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(path, idx + 1, "expected `semantic depth meta` paths"));
        }
        let resolve = |t: &str| {
            let p = Path::new(t);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        entries.push(FrameEntry {
            semantic: resolve(toks[0]),
            depth: resolve(toks[1]),
            meta: resolve(toks[2]),
        });
    }
    Ok(entries)
}

/// Loads a full frame: the semantic grid (`.pgm` → PGM, anything else →
/// CSV), the depth CSV and the metadata file.
pub fn load_frame(entry: &FrameEntry) -> Result<LabeledFrame> {
    let semantic = match entry.semantic.extension().and_then(|e| e.to_str()) {
        Some("pgm") => read_pgm(&entry.semantic)?,
        _ => read_semantic_csv(&entry.semantic)?,
    };
    let depth = read_depth_csv(&entry.depth)?;
    let (intrinsics, pose) = load_frame_meta(&entry.meta)?;
    LabeledFrame::new(semantic, depth, intrinsics, pose)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn temp_dir() -> PathBuf {
        let dir = std::env::temp_dir().join(format!("semloc-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn random_graph(seed_value: u64, n: usize) -> SemanticGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed_value);
        let vertices = (0..n)
            .map(|i| {
                SemanticVertex::new(
                    i,
                    rng.random_range(0..6),
                    Point3::new(
                        rng.random_range(-40.0..40.0),
                        rng.random_range(-40.0..40.0),
                        rng.random_range(-5.0..5.0),
                    ),
                )
            })
            .collect();
        SemanticGraph::build(vertices, 13.5).unwrap()
    }

    #[test]
    fn graph_file_round_trips_exactly() {
        let g = random_graph(81, 40);
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        let h = read_graph(buf.as_slice(), Path::new("mem")).unwrap();
        assert_eq!(g.edge_threshold(), h.edge_threshold());
        assert_eq!(g.vertices(), h.vertices());
    }

    #[test]
    fn duplicate_and_gapped_ids_rejected() {
        let dup = "# semgraph v1 edge_threshold=10\n0 1 0 0 0\n0 2 1 1 1\n";
        assert!(read_graph(dup.as_bytes(), Path::new("mem")).is_err());
        let gap = "# semgraph v1 edge_threshold=10\n0 1 0 0 0\n2 2 1 1 1\n";
        assert!(read_graph(gap.as_bytes(), Path::new("mem")).is_err());
        let no_header = "0 1 0 0 0\n";
        assert!(read_graph(no_header.as_bytes(), Path::new("mem")).is_err());
    }

    #[test]
    fn match_file_round_trips() {
        let mut m = MatchSet::new();
        m.push(3, 9, 0.97);
        m.push(1, 2, 0.75);
        let mut buf = Vec::new();
        write_matches(&m, &mut buf).unwrap();
        let back = read_matches(buf.as_slice(), Path::new("mem")).unwrap();
        assert_eq!(m, back);
        // duplicates rejected
        let dup = "# matches v1\n1 2 0.5\n1 2 0.6\n";
        assert!(read_matches(dup.as_bytes(), Path::new("mem")).is_err());
    }

    #[test]
    fn transform_and_truth_round_trip() {
        let dir = temp_dir();
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        let t = crate::scenario::random_rigid_transform(&mut rng, 30.0);
        let tp = dir.join("t.txt");
        save_transform(&tp, &t).unwrap();
        let back = load_transform(&tp).unwrap();
        assert_eq!(t, back, "shortest-round-trip float formatting is exact");

        let truth = GroundTruth { transform: t, matches: vec![(0, 4), (2, 1), (7, 7)] };
        let up = dir.join("truth.txt");
        save_truth(&up, &truth).unwrap();
        let back = load_truth(&up).unwrap();
        assert_eq!(truth.transform, back.transform);
        assert_eq!(truth.matches, back.matches);
    }

    #[test]
    fn invalid_rotation_in_transform_file_rejected() {
        let dir = temp_dir();
        let p = dir.join("bad.txt");
        std::fs::write(&p, "# transform v1\n2 0 0 0 0 1 0 0 0 0 1 0\n").unwrap();
        assert!(load_transform(&p).is_err());
    }

    #[test]
    fn pgm_p2_and_p5_parse() {
        let dir = temp_dir();
        let p2 = dir.join("a.pgm");
        std::fs::write(&p2, "P2\n# comment\n3 2\n255\n0 1 2\n3 4 5\n").unwrap();
        let g = read_pgm(&p2).unwrap();
        assert_eq!((g.width(), g.height()), (3, 2));
        assert_eq!(g.data(), &[0, 1, 2, 3, 4, 5]);

        let p5 = dir.join("b.pgm");
        let mut bytes = b"P5\n3 2\n255\n".to_vec();
        bytes.extend_from_slice(&[10, 20, 30, 40, 50, 60]);
        std::fs::write(&p5, bytes).unwrap();
        let g = read_pgm(&p5).unwrap();
        assert_eq!(g.data(), &[10, 20, 30, 40, 50, 60]);

        // 16-bit P5
        let p5w = dir.join("c.pgm");
        let mut bytes = b"P5\n2 1\n1000\n".to_vec();
        bytes.extend_from_slice(&[0x01, 0x00, 0x02, 0x58]);
        std::fs::write(&p5w, bytes).unwrap();
        let g = read_pgm(&p5w).unwrap();
        assert_eq!(g.data(), &[256, 600]);
    }

    #[test]
    fn csv_grids_and_meta_parse() {
        let dir = temp_dir();
        let sem = dir.join("sem.csv");
        std::fs::write(&sem, "1,1,2\n1,3,3\n").unwrap();
        let g = read_semantic_csv(&sem).unwrap();
        assert_eq!((g.width(), g.height()), (3, 2));

        let dep = dir.join("dep.csv");
        std::fs::write(&dep, "1.5, 2.0, -1\n0, 3.25, 4\n").unwrap();
        let d = read_depth_csv(&dep).unwrap();
        assert_eq!(d.get(1, 1), 3.25);

        let ragged = dir.join("ragged.csv");
        std::fs::write(&ragged, "1,2\n3\n").unwrap();
        assert!(read_semantic_csv(&ragged).is_err());

        let meta = dir.join("meta.txt");
        std::fs::write(&meta, "100 120 32 24\n1 0 0 5\n0 1 0 6\n0 0 1 7\n").unwrap();
        let (intr, pose) = load_frame_meta(&meta).unwrap();
        assert_eq!(intr.fx, 100.0);
        assert_eq!(pose.translation, Vector3::new(5.0, 6.0, 7.0));
    }

    #[test]
    fn manifest_resolves_relative_paths() {
        let dir = temp_dir().join("frames");
        std::fs::create_dir_all(&dir).unwrap();
        let man = dir.join("list.txt");
        std::fs::write(&man, "# frames\nsem.csv dep.csv meta.txt\n").unwrap();
        let entries = load_manifest(&man).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].semantic, dir.join("sem.csv"));
    }
}
