use crate::domain::mask::DomainMask;
use crate::error::Result;
use crate::field::ScalarField;

/// Embeds a field living on `mask` into the full grid, zero off the mask.
pub fn extend_by_zero(mask: &DomainMask, field: &ScalarField) -> Result<ScalarField> {
    let mut out = field.restricted_to(mask)?;
    out.mask_id = None;
    Ok(out)
}

/// Discrete `(||u||^2_{L^2(Ω)}, ||grad u||^2_{L^2(Ω)})` computed intrinsically
/// on the mask: the gradient sums the squared jump across every cell edge
/// incident to an active cell, with the Dirichlet value zero outside.
pub fn mask_norms_sq(mask: &DomainMask, field: &ScalarField) -> Result<(f64, f64)> {
    let grid = mask.grid();
    grid.ensure_same(&field.grid)?;
    let mut l2 = 0.0;
    let mut grad = 0.0;
    for c in mask.active_cells() {
        let u = field.values[c];
        l2 += u * u;
        for n in grid.neighbors4(c) {
            if !mask.is_active(n) {
                grad += u * u;
            } else if n > c {
                let d = u - field.values[n];
                grad += d * d;
            }
        }
    }
    Ok((grid.cell_area() * l2, grad))
}
