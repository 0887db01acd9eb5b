pub mod carleson;
pub mod hardy;
pub mod lp;
pub mod sharp;

pub use carleson::{carleson_norm, sharp_q1, CarlesonAccumulator};
pub use hardy::hardy_norm;
pub use lp::{
    evaluate, lp_norm, lp_of_moduli, mixed_norm, weak_l1_norm, weak_l1_of_moduli,
    MixedAccumulator, MixedNormSpec, NormMetadata, NormReport, NormVariant,
};
pub use sharp::{sharp_maximal, sharp_q2};
