use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{self, Poly};

use super::{build_field, FieldCtx, FieldElem, FpMatrix};

/// A field homomorphism `sub -> big` fixing `F_p`, given by the image of
/// the class of `x` in `sub`.
#[derive(Debug, Clone)]
pub struct SubfieldEmbedding {
    sub: Arc<FieldCtx>,
    big: Arc<FieldCtx>,
    image_of_generator: FieldElem,
    // column i is the image of x^i
    matrix: FpMatrix,
    left_inverse: FpMatrix,
}

/// Embeds the subfield of absolute degree `sub_degree` into `big`.
///
/// The subfield uses the default modulus, except that `sub_degree = m`
/// returns the identity on `big`. Among the roots of the sub modulus the
/// index-smallest is taken.
pub fn embed_subfield(big: &Arc<FieldCtx>, sub_degree: usize) -> Result<SubfieldEmbedding> {
    let m = big.m();
    if sub_degree == 0 || m % sub_degree != 0 {
        return Err(Error::NotADivisor { d: sub_degree, m });
    }
    if sub_degree == m {
        return Ok(SubfieldEmbedding::identity(big));
    }
    let sub = build_field(big.p(), sub_degree, None)?;
    SubfieldEmbedding::new(sub, big)
}

impl SubfieldEmbedding {
    pub fn identity(big: &Arc<FieldCtx>) -> Self {
        SubfieldEmbedding::with_generator(big.clone(), big, big.gen())
    }

    /// Embeds an explicitly given field, choosing the index-smallest root.
    pub fn new(sub: Arc<FieldCtx>, big: &Arc<FieldCtx>) -> Result<Self> {
        if big.p() != sub.p() || big.m() % sub.m() != 0 {
            return Err(Error::NotADivisor {
                d: sub.m(),
                m: big.m(),
            });
        }
        let f = Poly::from_prime_coeffs(big, sub.modulus());
        let root = poly::roots(&f)
            .into_iter()
            .min()
            .expect("a subfield modulus splits in the big field");
        Ok(SubfieldEmbedding::with_generator(sub, big, root))
    }

    fn with_generator(sub: Arc<FieldCtx>, big: &Arc<FieldCtx>, g: FieldElem) -> Self {
        let mut cols = vec![];
        let mut cur = big.one();
        for _ in 0..sub.m() {
            cols.push(cur.0.clone());
            cur = big.mul(&cur, &g);
        }
        let matrix = FpMatrix::from_columns(big.p(), big.m(), &cols);
        let left_inverse = matrix
            .left_inverse()
            .expect("powers of a generator are independent");
        SubfieldEmbedding {
            sub,
            big: big.clone(),
            image_of_generator: g,
            matrix,
            left_inverse,
        }
    }

    pub fn sub(&self) -> &Arc<FieldCtx> {
        &self.sub
    }

    pub fn big(&self) -> &Arc<FieldCtx> {
        &self.big
    }

    pub fn image_of_generator(&self) -> &FieldElem {
        &self.image_of_generator
    }

    pub fn map(&self, a: &FieldElem) -> FieldElem {
        FieldElem(self.matrix.mul_vec(&a.0))
    }

    /// The preimage of `z`, or `None` if `z` lies outside the image.
    pub fn preimage(&self, z: &FieldElem) -> Option<FieldElem> {
        let v = self.left_inverse.mul_vec(&z.0);
        (self.matrix.mul_vec(&v) == z.0).then_some(FieldElem(v))
    }

    pub fn contains(&self, z: &FieldElem) -> bool {
        self.preimage(z).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_prime_embeddings() {
        let big = build_field(3, 4, None).unwrap();
        let id = embed_subfield(&big, 4).unwrap();
        for z in big.elements().take(30) {
            assert_eq!(id.map(&z), z);
        }
        let prime = embed_subfield(&big, 1).unwrap();
        assert_eq!(prime.map(&prime.sub().scalar(2)), big.scalar(2));
        assert!(prime.preimage(&big.gen()).is_none());
    }

    #[test]
    fn f9_in_f81_is_a_ring_map() {
        let big = build_field(3, 4, None).unwrap();
        let e = embed_subfield(&big, 2).unwrap();
        let sub = e.sub().clone();
        let image: Vec<_> = sub.elements().map(|a| e.map(&a)).collect();
        for (a, ia) in sub.elements().zip(&image) {
            for (b, ib) in sub.elements().zip(&image) {
                assert_eq!(e.map(&sub.add(&a, &b)), big.add(ia, ib));
                assert_eq!(e.map(&sub.mul(&a, &b)), big.mul(ia, ib));
            }
            assert_eq!(e.preimage(ia), Some(a));
        }
        // the image is the fixed field of z -> z^9
        let fixed = big.elements().filter(|z| big.frobenius(z, 2) == *z).count();
        assert_eq!(fixed, 9);
        assert!(image.iter().all(|z| big.frobenius(z, 2) == *z));
    }
}
