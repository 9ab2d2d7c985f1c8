//! Non-overlapping patch extraction and reassembly.
//!
//! An image is edge-padded (by replicating the last row/column) up to
//! multiples of the patch size and tiled; each patch becomes one column of a
//! `p² x (grid_h * grid_w)` matrix. Patches are ordered row-major over the
//! grid, pixels row-major within a patch, so the layout is stable and saved
//! factor matrices stay portable.

use rnmf_core::DenseMatrix;

use crate::error::{CliError, Result};
use crate::pgm::GrayImage;

#[derive(Debug, Clone)]
pub struct PatchGrid {
    pub patch_size: usize,
    pub grid_w: usize,
    pub grid_h: usize,
    pub image_w: usize,
    pub image_h: usize,
    /// `p² x (grid_h * grid_w)` intensity matrix, one patch per column.
    pub columns: DenseMatrix,
}

pub fn extract_patches(img: &GrayImage, patch_size: usize) -> Result<PatchGrid> {
    if patch_size == 0 {
        return Err(CliError::invalid("patch size must be at least 1"));
    }
    if patch_size > img.width() && patch_size > img.height() {
        return Err(CliError::invalid(format!(
            "patch size {patch_size} exceeds both image dimensions {}x{}",
            img.width(),
            img.height()
        )));
    }
    let grid_w = img.width().div_ceil(patch_size);
    let grid_h = img.height().div_ceil(patch_size);
    let p = patch_size;

    // Edge replication handles the padded band.
    let sample = |x: usize, y: usize| -> f64 {
        let xc = x.min(img.width() - 1);
        let yc = y.min(img.height() - 1);
        img.get(xc, yc) as f64
    };

    let columns = DenseMatrix::from_fn(p * p, grid_h * grid_w, |pixel, patch| {
        let (py, px) = (pixel / p, pixel % p);
        let (gy, gx) = (patch / grid_w, patch % grid_w);
        sample(gx * p + px, gy * p + py)
    });

    Ok(PatchGrid {
        patch_size,
        grid_w,
        grid_h,
        image_w: img.width(),
        image_h: img.height(),
        columns,
    })
}

/// Rebuilds the image from the grid's own columns (exact round trip).
pub fn reassemble(grid: &PatchGrid) -> Result<GrayImage> {
    reassemble_with(grid, &grid.columns)
}

/// Rebuilds an image from replacement columns (e.g. a low-rank
/// reconstruction), cropping the padding and clamping into 0..=255.
pub fn reassemble_with(grid: &PatchGrid, columns: &DenseMatrix) -> Result<GrayImage> {
    let p = grid.patch_size;
    if columns.rows() != p * p || columns.cols() != grid.grid_h * grid.grid_w {
        return Err(CliError::invalid(format!(
            "column matrix {}x{} does not match a {}-patch grid of {}x{}",
            columns.rows(),
            columns.cols(),
            p,
            grid.grid_h,
            grid.grid_w
        )));
    }
    let intensities = DenseMatrix::from_fn(grid.image_h, grid.image_w, |y, x| {
        let (gy, gx) = (y / p, x / p);
        let (py, px) = (y % p, x % p);
        columns.get(py * p + px, gy * grid.grid_w + gx)
    });
    Ok(GrayImage::from_matrix_clamped(&intensities))
}
