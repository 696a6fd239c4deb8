//! Embedded reference datasets and the reference values that accompany them.

use crate::dataset::{parse_csv_str, LandmarkDataset};
use crate::error::{Error, Result};
use crate::projective::InvariantVector;

pub const WINDOWS_CSV: &str = include_str!("../fixtures/windows.csv");
pub const WINDOWS_REFERENCE_CSV: &str = include_str!("../fixtures/windows_reference.csv");
pub const SHEET_CSV: &str = include_str!("../fixtures/sheet.csv");
pub const BUILDINGS_CSV: &str = include_str!("../fixtures/buildings.csv");
pub const FACES_CSV: &str = include_str!("../fixtures/faces.csv");
pub const INVARIANTS_REFERENCE_CSV: &str = include_str!("../fixtures/invariants_reference.csv");

/// Collinear window centres, five views, k = 4, m = 1.
pub fn windows() -> LandmarkDataset {
    parse_csv_str(WINDOWS_CSV).expect("embedded fixture parses")
}

/// Two images of a five-point cross, m = 2.
pub fn sheet() -> LandmarkDataset {
    parse_csv_str(SHEET_CSV).expect("embedded fixture parses")
}

/// Registered axes of two buildings, q = 1, m = 2.
pub fn buildings() -> LandmarkDataset {
    parse_csv_str(BUILDINGS_CSV).expect("embedded fixture parses")
}

/// Registered axes of frontal and side face views, q = 2, m = 2.
pub fn faces() -> LandmarkDataset {
    parse_csv_str(FACES_CSV).expect("embedded fixture parses")
}

fn rows(text: &str) -> Result<Vec<csv::StringRecord>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Internal(e.to_string()))
}

fn num(s: &str) -> f64 {
    s.parse().expect("embedded fixture holds numbers")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceView {
    pub c: f64,
    pub phi: f64,
    pub theta: f64,
}

/// Reference cross-ratio, angle and doubled angle per view of [`windows`].
pub fn windows_reference() -> Vec<ReferenceView> {
    rows(WINDOWS_REFERENCE_CSV)
        .expect("embedded fixture parses")
        .iter()
        .map(|r| ReferenceView { c: num(&r[1]), phi: num(&r[2]), theta: num(&r[3]) })
        .collect()
}

/// Reference invariants for a group of [`buildings`].
pub fn reference_invariants(group: &str) -> Vec<InvariantVector> {
    rows(INVARIANTS_REFERENCE_CSV)
        .expect("embedded fixture parses")
        .iter()
        .filter(|r| &r[0] == group)
        .map(|r| InvariantVector { iota: vec![num(&r[2]), num(&r[3])] })
        .collect()
}
