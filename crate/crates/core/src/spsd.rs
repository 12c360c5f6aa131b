//! Fixed-rank SPSD geometry through the structure-space representation
//! `K = G P Gᵀ` (orthonormal `G`, SPD core `P`).
//!
//! Geodesics between rank-`k` matrices are approximated by moving the
//! subspace along the Grassmann geodesic and the core along the SPD
//! geodesic, after aligning both representatives with the SVD of `G2ᵀG1`.
//! For full-rank inputs everything reduces to the affine-invariant SPD
//! operations in [`crate::spd`].

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, thin_svd, OrthonormalFrame, SymMatrix};
use crate::spd::{geodesic, log_map, SpdMatrix};

/// Default relative tolerance for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// `sin θ` values below this are treated as zero by the pseudo-inverse.
const SIN_PINV_EPS: f64 = 1e-12;

/// Negative eigenvalues down to `-NEG_EIG_TOL × λ_max` count as round-off.
const NEG_EIG_TOL: f64 = 1e-10;

/// Number of eigenvalues above `rel_tol × λ_max`.
pub fn effective_rank(k: &SymMatrix, rel_tol: f64) -> Result<usize> {
    let eig = sym_eig(k)?;
    let max = eig.max_value();
    if !(max > 0.0) {
        return Err(Error::degenerate(format!("largest eigenvalue {max:e} is not positive")));
    }
    Ok(eig.values.iter().filter(|&&l| l > rel_tol * max).count())
}

/// Structure-space representative `(G, P)` of a rank-`k` SPSD matrix.
#[derive(Debug, Clone)]
pub struct StructurePair {
    frame: OrthonormalFrame,
    core: SpdMatrix,
}

impl StructurePair {
    pub fn new(frame: OrthonormalFrame, core: SpdMatrix) -> Result<Self> {
        if frame.cols() != core.dim() {
            return Err(Error::invalid(format!(
                "frame has {} columns but core is {}x{}",
                frame.cols(),
                core.dim(),
                core.dim()
            )));
        }
        Ok(Self { frame, core })
    }

    pub fn frame(&self) -> &OrthonormalFrame {
        &self.frame
    }

    pub fn core(&self) -> &SpdMatrix {
        &self.core
    }

    pub fn rank(&self) -> usize {
        self.frame.cols()
    }

    pub fn dim(&self) -> usize {
        self.frame.rows()
    }

    /// `G P Gᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        self.core.as_sym().congruence(self.frame.as_matrix())
    }

    /// The equivalent representative `(G O, Oᵀ P O)` for orthogonal `O`.
    pub fn rotated(&self, o: &DMatrix<f64>) -> Result<Self> {
        let frame = OrthonormalFrame::new(self.frame.as_matrix() * o, 1e-8)?;
        let core = SpdMatrix::new(self.core.as_sym().congruence(&o.transpose()))?;
        Self::new(frame, core)
    }
}

/// Top-`rank` eigenpairs of `k` as a structure pair.
pub fn spsd_decompose(k: &SymMatrix, rank: usize) -> Result<StructurePair> {
    let eig = sym_eig(k)?;
    let max = eig.max_value();
    if rank == 0 || rank > k.dim() {
        return Err(Error::invalid(format!(
            "rank {rank} out of range for dimension {}",
            k.dim()
        )));
    }
    if !(max > 0.0) || eig.values[rank - 1] <= DEFAULT_RANK_TOL * max {
        return Err(Error::invalid(format!(
            "requested rank {rank} exceeds the numerical rank of the matrix"
        )));
    }
    let top = eig.leading(rank);
    let core = SpdMatrix::new(SymMatrix::from_diagonal(top.values.as_slice())?)?;
    StructurePair::new(OrthonormalFrame::new_unchecked(top.vectors), core)
}

/// A `k`-dimensional subspace of `R^d`, held through any orthonormal basis.
#[derive(Debug, Clone)]
pub struct GrassmannPoint(OrthonormalFrame);

impl GrassmannPoint {
    pub fn new(frame: OrthonormalFrame) -> Self {
        GrassmannPoint(frame)
    }

    pub fn frame(&self) -> &OrthonormalFrame {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.cols()
    }

    /// Orthogonal projector onto the subspace; independent of the basis.
    pub fn projector(&self) -> DMatrix<f64> {
        self.0.projector()
    }
}

/// Closed-form Grassmann geodesic from `G1` to `G2`, with the alignment
/// rotations `O1`, `O2` from `G2ᵀG1 = O2 Σ O1ᵀ`.
#[derive(Debug, Clone)]
pub struct GrassmannGeodesic {
    start: DMatrix<f64>,
    direction: DMatrix<f64>,
    angles: Vec<f64>,
    o_start: DMatrix<f64>,
    o_end: DMatrix<f64>,
}

impl GrassmannGeodesic {
    pub fn new(g1: &OrthonormalFrame, g2: &OrthonormalFrame) -> Result<Self> {
        if g1.rows() != g2.rows() || g1.cols() != g2.cols() {
            return Err(Error::invalid(format!(
                "subspace shapes differ: {}x{} vs {}x{}",
                g1.rows(),
                g1.cols(),
                g2.rows(),
                g2.cols()
            )));
        }
        let g1m = g1.as_matrix();
        let g2m = g2.as_matrix();
        let svd = thin_svd(&(g2m.transpose() * g1m))?;
        let o_end = svd.u.into_matrix();
        let o_start = svd.v_t.transpose();
        let angles: Vec<f64> = svd.singular_values.iter().map(|s| s.clamp(-1.0, 1.0).acos()).collect();
        if let Some(&angle) = angles.iter().find(|&&a| a > FRAC_PI_2 + 1e-9) {
            return Err(Error::GeodesicDomain { angle });
        }
        let start = g1m * &o_start;
        let g2o = g2m * &o_end;
        let mut direction = &g2o - g1m * (g1m.transpose() * &g2o);
        for (j, &theta) in angles.iter().enumerate() {
            let s = theta.sin();
            if s > SIN_PINV_EPS {
                direction.column_mut(j).unscale_mut(s);
            } else {
                direction.column_mut(j).fill(0.0);
            }
        }
        Ok(Self {
            start,
            direction,
            angles,
            o_start,
            o_end,
        })
    }

    /// Principal angles, ascending.
    pub fn principal_angles(&self) -> &[f64] {
        &self.angles
    }

    /// `O1`, the rotation aligning the start representative.
    pub fn start_alignment(&self) -> &DMatrix<f64> {
        &self.o_start
    }

    /// `O2`, the rotation aligning the end representative.
    pub fn end_alignment(&self) -> &DMatrix<f64> {
        &self.o_end
    }

    /// `G1 O1 cos(Θt) + X sin(Θt)`; columns follow the aligned basis.
    pub fn at(&self, t: f64) -> OrthonormalFrame {
        let mut out = self.start.clone();
        for (j, &theta) in self.angles.iter().enumerate() {
            let (s, c) = (theta * t).sin_cos();
            let mut col = out.column_mut(j);
            col.scale_mut(c);
            col.axpy(s, &self.direction.column(j), 1.0);
        }
        OrthonormalFrame::new_unchecked(out)
    }
}

pub fn grassmann_geodesic(g1: &GrassmannPoint, g2: &GrassmannPoint, t: f64) -> Result<GrassmannPoint> {
    if g1.rank() != g2.rank() {
        return Err(Error::invalid(format!(
            "subspace ranks differ: {} vs {}",
            g1.rank(),
            g2.rank()
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("geodesic parameter {t} outside [0, 1]")));
    }
    Ok(GrassmannPoint(GrassmannGeodesic::new(g1.frame(), g2.frame())?.at(t)))
}

/// What the SPSD path did to reach a common rank.
#[derive(Debug, Clone, Serialize)]
pub struct SpsdDiagnostics {
    pub rank_first: usize,
    pub rank_second: usize,
    pub common_rank: usize,
    /// Eigenvalues of each input dropped by truncation to the common rank.
    pub discarded_first: Vec<f64>,
    pub discarded_second: Vec<f64>,
    pub principal_angles: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SpsdMean {
    pub mean: SymMatrix,
    /// Aligned representative at the midpoint of both geodesics.
    pub structure: StructurePair,
    pub diagnostics: SpsdDiagnostics,
}

#[derive(Debug, Clone)]
pub struct SpsdDifference {
    pub difference: SymMatrix,
    pub mean: SymMatrix,
    pub diagnostics: SpsdDiagnostics,
}

fn check_psd(k: &SymMatrix, which: &str) -> Result<Vec<f64>> {
    let eig = sym_eig(k)?;
    let max = eig.max_value();
    if !(max > 0.0) {
        return Err(Error::degenerate(format!("{which} kernel has no positive eigenvalue")));
    }
    if eig.min_value() < -NEG_EIG_TOL * max {
        return Err(Error::invalid(format!(
            "{which} kernel is not positive semi-definite (eigenvalue {:e})",
            eig.min_value()
        )));
    }
    Ok(eig.values.iter().copied().collect())
}

/// Decomposes both inputs at their common rank.
fn common_structures(
    k1: &SymMatrix,
    k2: &SymMatrix,
    rank_tol: f64,
) -> Result<(StructurePair, StructurePair, SpsdDiagnostics)> {
    if k1.dim() != k2.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            k1.dim(),
            k2.dim()
        )));
    }
    let spec1 = check_psd(k1, "first")?;
    let spec2 = check_psd(k2, "second")?;
    let rank_of = |s: &[f64]| s.iter().filter(|&&l| l > rank_tol * s[0]).count();
    let (r1, r2) = (rank_of(&spec1), rank_of(&spec2));
    let k = r1.min(r2);
    let s1 = spsd_decompose(k1, k)?;
    let s2 = spsd_decompose(k2, k)?;
    let diagnostics = SpsdDiagnostics {
        rank_first: r1,
        rank_second: r2,
        common_rank: k,
        discarded_first: spec1[k..].to_vec(),
        discarded_second: spec2[k..].to_vec(),
        principal_angles: Vec::new(),
    };
    Ok((s1, s2, diagnostics))
}

fn aligned_core(s: &StructurePair, o: &DMatrix<f64>) -> Result<SpdMatrix> {
    SpdMatrix::new(s.core().as_sym().congruence(&o.transpose()))
}

/// Midpoint of the approximate SPSD geodesic between two structure pairs.
pub fn spsd_mean_from_structures(
    s1: &StructurePair,
    s2: &StructurePair,
) -> Result<(SymMatrix, StructurePair, Vec<f64>)> {
    if s1.dim() != s2.dim() || s1.rank() != s2.rank() {
        return Err(Error::invalid("structure pairs differ in dimension or rank"));
    }
    let geo = GrassmannGeodesic::new(s1.frame(), s2.frame())?;
    let p1 = aligned_core(s1, geo.start_alignment())?;
    let p2 = aligned_core(s2, geo.end_alignment())?;
    let frame = geo.at(0.5);
    let core = geodesic(&p1, &p2, 0.5)?;
    let mean = core.as_sym().congruence(frame.as_matrix());
    Ok((mean, StructurePair::new(frame, core)?, geo.principal_angles().to_vec()))
}

pub fn spsd_mean(k1: &SymMatrix, k2: &SymMatrix) -> Result<SpsdMean> {
    spsd_mean_with_tol(k1, k2, DEFAULT_RANK_TOL)
}

pub fn spsd_mean_with_tol(k1: &SymMatrix, k2: &SymMatrix, rank_tol: f64) -> Result<SpsdMean> {
    let (s1, s2, mut diagnostics) = common_structures(k1, k2, rank_tol)?;
    let (mean, structure, angles) = spsd_mean_from_structures(&s1, &s2)?;
    diagnostics.principal_angles = angles;
    Ok(SpsdMean {
        mean,
        structure,
        diagnostics,
    })
}

/// SPSD difference operator from structure representatives of `K1`, `K2`.
/// Returns `(D̃, M̃)`.
pub fn spsd_difference_from_structures(
    s1: &StructurePair,
    s2: &StructurePair,
) -> Result<(SymMatrix, SymMatrix, Vec<f64>)> {
    let (mean, _, angles) = spsd_mean_from_structures(s1, s2)?;
    let k = s1.rank();
    let mean_pair = spsd_decompose(&mean, k)?;
    let g_m = mean_pair.frame().as_matrix();

    // SVD of G1ᵀ G_M gives (Õ1, O_M); the geodesic from G_M to G1 owns it.
    let back = GrassmannGeodesic::new(mean_pair.frame(), s1.frame())?;
    let o_m = back.start_alignment();
    let o_1 = back.end_alignment();
    let gm_o = g_m * o_m;
    let p_m = SpdMatrix::new(mean.congruence(&gm_o.transpose()))?;
    let g1_o = s1.frame().as_matrix() * o_1;
    let k1 = s1.reconstruct();
    let p_1 = SpdMatrix::new(k1.congruence(&g1_o.transpose()))?;

    let tangent = log_map(&p_m, &p_1)?;
    let frame = back.at(1.0);
    let difference = tangent.as_sym().congruence(frame.as_matrix());
    Ok((difference, mean, angles))
}

pub fn spsd_difference(k1: &SymMatrix, k2: &SymMatrix) -> Result<SymMatrix> {
    Ok(spsd_difference_with_tol(k1, k2, DEFAULT_RANK_TOL)?.difference)
}

pub fn spsd_difference_with_tol(k1: &SymMatrix, k2: &SymMatrix, rank_tol: f64) -> Result<SpsdDifference> {
    let (s1, s2, mut diagnostics) = common_structures(k1, k2, rank_tol)?;
    let (difference, mean, angles) = if k1.as_matrix() == k2.as_matrix() {
        (SymMatrix::zeros(k1.dim()), s1.reconstruct(), vec![0.0; s1.rank()])
    } else {
        spsd_difference_from_structures(&s1, &s2)?
    };
    diagnostics.principal_angles = angles;
    Ok(SpsdDifference {
        difference,
        mean,
        diagnostics,
    })
}
