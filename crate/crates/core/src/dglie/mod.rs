//! dg-Lie algebras over a field or a finite-dimensional cdga.

mod cdga;
mod ce;
mod envelope;
mod free;
mod lie;
mod pbw;

use std::collections::BTreeMap;

pub use cdga::{augmentation_is_algebra_map, square_zero, truncated_polynomial, BaseCdga, CdgaModule, Elem};
pub use ce::{
    ce_cohomology, ce_complex, ce_complex_with, ce_homology, coderivation_check, free_cohomology_expected, CeComplex, CeTable,
    BracketSign, CoderivationReport,
};
pub use envelope::{envelope_quotient_oracle, shifted_envelope_algebra, EnvelopeReport, ENVELOPE_MAX_WEIGHT};
pub use free::{free_lie, free_lie_bounded, free_lie_dim_oracle, FreeLie, DEFAULT_MAX_WEIGHT};
pub use lie::{DgLieAlgebra, LieElem, LieValidation, Representation};
pub use pbw::{pbw_symmetrize, PbwCertificate, PbwLevel};

use crate::complex::{ChainComplex, Degree, GradedVectorSpace};
use crate::error::Result;
use crate::linalg::Matrix;
use crate::scalar::Rational;

/// Builds a complex from a list of `(degree, label)` basis vectors and the
/// image of each under the differential (as indices into the same list).
pub(crate) fn assemble(basis: &[(Degree, String)], images: &[Vec<(usize, Rational)>]) -> Result<ChainComplex> {
    let mut space = GradedVectorSpace::new();
    let mut pos = Vec::with_capacity(basis.len());
    for (deg, label) in basis {
        pos.push(space.push(*deg, label.clone())?);
    }
    let mut entries: BTreeMap<Degree, Vec<(usize, usize, Rational)>> = BTreeMap::new();
    for (j, img) in images.iter().enumerate() {
        for (i, c) in img {
            if basis[*i].0 != basis[j].0 + 1 {
                return Err(crate::error::Error::InvalidComplex(format!(
                    "differential of {} has a term {} of the wrong degree",
                    basis[j].1, basis[*i].1
                )));
            }
            entries.entry(basis[j].0).or_default().push((pos[*i], pos[j], c.clone()));
        }
    }
    let diff = entries
        .into_iter()
        .map(|(n, e)| (n, Matrix::from_triplets(space.dim(n + 1), space.dim(n), e)))
        .collect();
    ChainComplex::new(space, diff)
}
