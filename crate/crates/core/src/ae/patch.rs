//! Quadrant tiling of a 64×64 map into four 32×32 patches.

use crate::dsp::{RangeDopplerImage, RDI_PIXELS, RDI_SIZE};
use crate::error::{shape_err, Error, Result};

pub const PATCH_SIZE: usize = RDI_SIZE / 2;
pub const PATCH_PIXELS: usize = PATCH_SIZE * PATCH_SIZE;
pub const N_PATCHES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatchPosition {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

impl PatchPosition {
    pub const ALL: [PatchPosition; N_PATCHES] = [
        PatchPosition::TopLeft,
        PatchPosition::TopRight,
        PatchPosition::BottomLeft,
        PatchPosition::BottomRight,
    ];

    /// Row and column of the patch's top-left pixel in the full map.
    pub fn origin(self) -> (usize, usize) {
        match self {
            PatchPosition::TopLeft => (0, 0),
            PatchPosition::TopRight => (0, PATCH_SIZE),
            PatchPosition::BottomLeft => (PATCH_SIZE, 0),
            PatchPosition::BottomRight => (PATCH_SIZE, PATCH_SIZE),
        }
    }

    fn index(self) -> usize {
        match self {
            PatchPosition::TopLeft => 0,
            PatchPosition::TopRight => 1,
            PatchPosition::BottomLeft => 2,
            PatchPosition::BottomRight => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Patch<T = f32> {
    /// 32×32 row-major.
    pub pixels: Vec<T>,
    pub position: PatchPosition,
}

/// Splits a row-major 64×64 map into its four quadrants, in
/// [`PatchPosition::ALL`] order.
pub fn split_pixels<T: Copy>(image: &[T]) -> Result<[Patch<T>; N_PATCHES]> {
    if image.len() != RDI_PIXELS {
        return shape_err(format!(
            "expected a {RDI_SIZE}x{RDI_SIZE} map, got {} pixels",
            image.len()
        ));
    }
    Ok(PatchPosition::ALL.map(|position| {
        let (r0, c0) = position.origin();
        let mut pixels = Vec::with_capacity(PATCH_PIXELS);
        for r in 0..PATCH_SIZE {
            let start = (r0 + r) * RDI_SIZE + c0;
            pixels.extend_from_slice(&image[start..start + PATCH_SIZE]);
        }
        Patch { pixels, position }
    }))
}

pub fn split_patches(rdi: &RangeDopplerImage) -> Result<[Patch; N_PATCHES]> {
    split_pixels(&rdi.pixels)
}

/// Places each patch back at its position. Every position must appear
/// exactly once; input order does not matter.
pub fn reassemble<T: Copy + Default>(patches: &[Patch<T>]) -> Result<Vec<T>> {
    if patches.len() != N_PATCHES {
        return Err(Error::InvalidArgument(format!(
            "need {N_PATCHES} patches, got {}",
            patches.len()
        )));
    }
    let mut seen = [false; N_PATCHES];
    let mut image = vec![T::default(); RDI_PIXELS];
    for p in patches {
        if p.pixels.len() != PATCH_PIXELS {
            return shape_err(format!(
                "patch has {} pixels, expected {PATCH_PIXELS}",
                p.pixels.len()
            ));
        }
        let slot = &mut seen[p.position.index()];
        if *slot {
            return Err(Error::InvalidArgument(format!(
                "duplicate patch position {:?}",
                p.position
            )));
        }
        *slot = true;
        let (r0, c0) = p.position.origin();
        for (r, row) in p.pixels.chunks_exact(PATCH_SIZE).enumerate() {
            let start = (r0 + r) * RDI_SIZE + c0;
            image[start..start + PATCH_SIZE].copy_from_slice(row);
        }
    }
    Ok(image)
}
