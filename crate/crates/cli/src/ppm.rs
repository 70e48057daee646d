//! Binary PPM (P6) escape-time images.

use cantor_core::orbit::{escape_grid, EscapeTime, Region};

/// Colour of a pixel that escaped at iteration `n` is `PALETTE[n % 16]`; points that
/// never escape are black. None of the palette entries is black.
pub const PALETTE: [[u8; 3]; 16] = [
    [66, 30, 15],
    [25, 7, 26],
    [9, 1, 47],
    [4, 4, 73],
    [0, 7, 100],
    [12, 44, 138],
    [24, 82, 177],
    [57, 125, 209],
    [134, 181, 229],
    [211, 236, 248],
    [241, 233, 191],
    [248, 201, 95],
    [255, 170, 0],
    [204, 128, 0],
    [153, 87, 0],
    [106, 52, 3],
];

pub fn colour(t: EscapeTime) -> [u8; 3] {
    match t {
        EscapeTime::Inside => [0, 0, 0],
        EscapeTime::EscapedAt(n) => PALETTE[n % PALETTE.len()],
    }
}

pub fn header(width: usize, height: usize) -> String {
    format!("P6\n{width} {height}\n255\n")
}

/// Complete file contents: header, then RGB rows top to bottom.
pub fn escape_image(region: &Region, width: usize, height: usize, max_iter: usize) -> Vec<u8> {
    let grid = escape_grid(region, width, height, max_iter);
    let header = header(width, height);
    let mut bytes = Vec::with_capacity(header.len() + 3 * grid.len());
    bytes.extend_from_slice(header.as_bytes());
    for t in grid {
        bytes.extend_from_slice(&colour(t));
    }
    bytes
}
