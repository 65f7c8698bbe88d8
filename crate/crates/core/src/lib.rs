// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bergmann;
pub mod chain;
pub mod delzant_py;
pub mod error;
pub mod form;
pub mod interval;
pub mod lie_triple;
pub mod pingpong;
pub mod shilov;
pub mod toledo;

pub use error::{Error, Result};
pub use form::{
    boost, check_group_membership, grassmann_distance, is_opposite, is_transverse_maximal, make_form,
    positive_component_indicator, rotation, signature_of_restriction, Field, GroupElement, IndefiniteForm,
    IsotropicSubspace, Signature, Tolerances,
};
