//! Classical eigendecomposition machinery: sorted diagonalizers for the
//! local-diagonal space and cutoff-thresholded partial diagonalizers.

use std::io::{Read as _, Write as _};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{CoreError, Result};
use crate::grid::GridSpec;
use crate::hamiltonian::GridHamiltonian;
use crate::register::RegisterUnitary;
use crate::C64;

/// Hermiticity tolerance accepted by [`diagonalize_sorted`].
const HERMITICITY_TOL: f64 = 1e-10;

/// Eigenvalue gap below which two eigenvalues are treated as degenerate when
/// fixing the eigenvector order.
const DEGENERACY_TOL: f64 = 1e-10;

/// Where a diagonalizer came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalizerSource {
    /// Full Hamiltonian of the scenario.
    FullHamiltonian,
    /// One-dimensional axis cut for the given dimension index.
    PerDimension(usize),
}

/// A sorted eigendecomposition: columns of `matrix` are eigenvectors in
/// ascending eigenvalue order with a deterministic phase.
///
/// `cut` is the threshold applied to the source matrix before diagonalizing
/// (0 for a full diagonalization). `cnot_estimate = N(N−1)` records the
/// two-qubit gate cost of synthesizing the dense unitary into elementary
/// gates; it is documentation only — the unitary is applied densely.
#[derive(Debug, Clone)]
pub struct Diagonalizer {
    matrix: DMatrix<C64>,
    eigenvalues: Vec<f64>,
    source: DiagonalizerSource,
    cut: f64,
    cnot_estimate: usize,
}

impl Diagonalizer {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Eigenvalues in nondecreasing order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn source(&self) -> DiagonalizerSource {
        self.source
    }

    pub fn cut(&self) -> f64 {
        self.cut
    }

    pub fn cnot_estimate(&self) -> usize {
        self.cnot_estimate
    }

    /// The eigenvector matrix as a register unitary starting at qubit `start`.
    pub fn to_register_unitary(&self, start: usize) -> Result<RegisterUnitary> {
        RegisterUnitary::new(self.matrix.clone(), start)
    }

    /// Writes the diagonalizer as a small binary file with a provenance
    /// header (source, cut, dimension) followed by little-endian doubles.
    pub fn export(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        let source = match self.source {
            DiagonalizerSource::FullHamiltonian => "full".to_string(),
            DiagonalizerSource::PerDimension(d) => format!("dim:{d}"),
        };
        writeln!(file, "QVTEDIAG v1")?;
        writeln!(file, "source={source}")?;
        writeln!(file, "cut={:e}", self.cut)?;
        writeln!(file, "dim={}", self.matrix.nrows())?;
        let mut bytes = Vec::new();
        for &e in &self.eigenvalues {
            bytes.extend_from_slice(&e.to_le_bytes());
        }
        for value in self.matrix.iter() {
            bytes.extend_from_slice(&value.re.to_le_bytes());
            bytes.extend_from_slice(&value.im.to_le_bytes());
        }
        file.write_all(&bytes)?;
        Ok(())
    }

    /// Reads a diagonalizer written by [`Diagonalizer::export`].
    pub fn import(path: &Path) -> Result<Self> {
        let mut file = std::fs::File::open(path)?;
        let mut content = Vec::new();
        file.read_to_end(&mut content)?;
        let mut offset = 0usize;
        let mut read_line = || -> Result<String> {
            let rest = &content[offset..];
            let end = rest
                .iter()
                .position(|&b| b == b'\n')
                .ok_or_else(|| CoreError::MalformedFile("truncated header".into()))?;
            let line = String::from_utf8(rest[..end].to_vec())
                .map_err(|_| CoreError::MalformedFile("non-UTF8 header".into()))?;
            offset += end + 1;
            Ok(line)
        };
        if read_line()? != "QVTEDIAG v1" {
            return Err(CoreError::MalformedFile("bad magic".into()));
        }
        let field = |line: String, key: &str| -> Result<String> {
            line.strip_prefix(key)
                .map(str::to_string)
                .ok_or_else(|| CoreError::MalformedFile(format!("expected {key} header line")))
        };
        let source_text = field(read_line()?, "source=")?;
        let source = if source_text == "full" {
            DiagonalizerSource::FullHamiltonian
        } else if let Some(d) = source_text.strip_prefix("dim:") {
            DiagonalizerSource::PerDimension(
                d.parse().map_err(|e| CoreError::MalformedFile(format!("bad dim: {e}")))?,
            )
        } else {
            return Err(CoreError::MalformedFile(format!("unknown source '{source_text}'")));
        };
        let cut: f64 = field(read_line()?, "cut=")?
            .parse()
            .map_err(|e| CoreError::MalformedFile(format!("bad cut: {e}")))?;
        let dim: usize = field(read_line()?, "dim=")?
            .parse()
            .map_err(|e| CoreError::MalformedFile(format!("bad dim: {e}")))?;
        let expected = 8 * (dim + 2 * dim * dim);
        if content.len() - offset != expected {
            return Err(CoreError::MalformedFile("payload size mismatch".into()));
        }
        let mut next = || {
            let bytes: [u8; 8] = content[offset..offset + 8].try_into().unwrap();
            offset += 8;
            f64::from_le_bytes(bytes)
        };
        let eigenvalues: Vec<f64> = (0..dim).map(|_| next()).collect();
        let matrix = DMatrix::from_fn(dim, dim, |_, _| C64::new(0.0, 0.0));
        let mut matrix = matrix;
        for j in 0..dim {
            for i in 0..dim {
                let re = next();
                let im = next();
                matrix[(i, j)] = C64::new(re, im);
            }
        }
        Ok(Self { matrix, eigenvalues, source, cut, cnot_estimate: dim * (dim - 1) })
    }
}

/// Diagonalizes a Hermitian matrix with ascending eigenvalue order and
/// deterministic eigenvector phases.
///
/// Each eigenvector's largest-magnitude entry is made real positive, and
/// degenerate eigenvalues (within 1e-10) are ordered by the first differing
/// eigenvector component after that canonicalization, so repeated calls
/// produce bitwise-identical results.
pub fn diagonalize_sorted(h: &DMatrix<C64>) -> Result<Diagonalizer> {
    diagonalize_sorted_tagged(h, DiagonalizerSource::FullHamiltonian, 0.0)
}

/// [`diagonalize_sorted`] with explicit provenance metadata.
pub fn diagonalize_sorted_tagged(
    h: &DMatrix<C64>,
    source: DiagonalizerSource,
    cut: f64,
) -> Result<Diagonalizer> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(CoreError::InvalidSpec("diagonalization needs a square matrix".into()));
    }
    let deviation = hermiticity_deviation(h);
    if deviation > HERMITICITY_TOL {
        return Err(CoreError::NotHermitian { deviation });
    }
    let eigen = h.clone().symmetric_eigen();
    // Canonicalize phases first so the degenerate-order tie-break is
    // well defined.
    let mut vectors = eigen.eigenvectors;
    for mut column in vectors.column_iter_mut() {
        let mut best = 0usize;
        for (i, value) in column.iter().enumerate() {
            if value.norm_sqr() > column[best].norm_sqr() {
                best = i;
            }
        }
        let pivot = column[best];
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / C64::new(pivot.norm(), 0.0);
            for value in column.iter_mut() {
                *value *= phase;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (eigen.eigenvalues[a], eigen.eigenvalues[b]);
        if (ea - eb).abs() > DEGENERACY_TOL {
            return ea.total_cmp(&eb);
        }
        for i in 0..n {
            let (va, vb) = (vectors[(i, a)], vectors[(i, b)]);
            let cmp = va.re.total_cmp(&vb.re).then(va.im.total_cmp(&vb.im));
            if cmp != std::cmp::Ordering::Equal {
                return cmp;
            }
        }
        std::cmp::Ordering::Equal
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eigen.eigenvalues[i]).collect();
    let matrix = DMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(Diagonalizer { matrix, eigenvalues, source, cut, cnot_estimate: n * (n - 1) })
}

fn hermiticity_deviation(h: &DMatrix<C64>) -> f64 {
    let mut deviation: f64 = 0.0;
    for i in 0..h.nrows() {
        for j in i..h.ncols() {
            deviation = deviation.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    deviation
}

/// Zeroes all matrix entries whose squared magnitude falls below `cut` and
/// reports the density of retained nonzero entries.
///
/// The squared-magnitude reading `|H_ij|² ≥ cut` is the calibrated
/// convention: it reproduces the reference retained-entry densities on the
/// barrier-scattering grid. Zeroing is decided once per `(i, j)/(j, i)` pair,
/// so Hermiticity is preserved bitwise. `cut = 0` removes nothing and the
/// density is simply the fraction of nonzero entries.
pub fn threshold_matrix(h: &DMatrix<C64>, cut: f64) -> Result<(DMatrix<C64>, f64)> {
    if !(cut >= 0.0) {
        return Err(CoreError::InvalidSpec("threshold cut must be ≥ 0".into()));
    }
    let n = h.nrows();
    let mut out = h.clone();
    let mut kept = 0usize;
    for i in 0..n {
        for j in i..h.ncols() {
            let value = out[(i, j)];
            let keep = if cut == 0.0 {
                value != C64::new(0.0, 0.0)
            } else {
                value.norm_sqr() >= cut
            };
            if keep {
                kept += if i == j { 1 } else { 2 };
            } else {
                out[(i, j)] = C64::new(0.0, 0.0);
                out[(j, i)] = C64::new(0.0, 0.0);
            }
        }
    }
    let density = kept as f64 / (n * h.ncols()) as f64;
    Ok((out, density))
}

/// Axis-cut diagonalizers: for each dimension `m`, the one-dimensional
/// Hamiltonian with every other coordinate fixed at the grid point nearest 0
/// is built, optionally thresholded by `cut`, and diagonalized.
pub fn per_dimension_diagonalizers(ham: &GridHamiltonian) -> Result<Vec<Diagonalizer>> {
    per_dimension_diagonalizers_with_cut(ham, 0.0)
}

/// [`per_dimension_diagonalizers`] with a threshold applied before each
/// diagonalization (producing partial diagonalizers for `cut > 0`).
pub fn per_dimension_diagonalizers_with_cut(
    ham: &GridHamiltonian,
    cut: f64,
) -> Result<Vec<Diagonalizer>> {
    let grid = ham.grid();
    (0..grid.num_dims)
        .map(|dim| {
            let axis = axis_cut_hamiltonian(ham, dim)?;
            let dense = axis.dense_matrix()?;
            let (thresholded, _) = threshold_matrix(&dense, cut)?;
            diagonalize_sorted_tagged(&thresholded, DiagonalizerSource::PerDimension(dim), cut)
        })
        .collect()
}

/// The 1D Hamiltonian along dimension `dim` with all other coordinates fixed
/// at the grid point nearest 0.
pub fn axis_cut_hamiltonian(ham: &GridHamiltonian, dim: usize) -> Result<GridHamiltonian> {
    let grid = ham.grid();
    if dim >= grid.num_dims {
        return Err(CoreError::InvalidSpec(format!(
            "dimension {dim} out of range for a {}-dimensional grid",
            grid.num_dims
        )));
    }
    let n = grid.points_per_dim();
    let grids = crate::grid::build_grids(grid)?;
    // Fixed index per other dimension: grid point nearest the coordinate 0.
    let fixed: Vec<usize> = (0..grid.num_dims)
        .map(|d| {
            let mut best = 0usize;
            for (j, &x) in grids.positions[d].iter().enumerate() {
                if x.abs() < grids.positions[d][best].abs() {
                    best = j;
                }
            }
            best
        })
        .collect();
    let mut base_index = 0usize;
    for d in (0..grid.num_dims).rev() {
        if d != dim {
            base_index = base_index * n + fixed[d];
        } else {
            base_index *= n;
        }
    }
    let stride = n.pow(dim as u32);
    let restricted: Vec<f64> =
        (0..n).map(|j| ham.potential_values()[base_index + j * stride]).collect();
    let axis_grid = GridSpec::one_dim(
        grid.qubits_per_dim,
        grid.length_per_dim[dim],
        grid.origin_per_dim[dim],
    )?;
    GridHamiltonian::from_potential_values(axis_grid, ham.mass(), restricted)
}
