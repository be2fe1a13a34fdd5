//! Statistical measures of final patterns and the dead / animal /
//! non-animal classifier.

mod classify;
mod features;
pub mod labeling;

pub use classify::{
    classify, classify_final, has_animal, is_dead, looping_components, PatternClass, ANIMAL_MASS_SHARE,
};
pub use features::{
    activation_center, features_from_final, recenter, stat_features, CenterTracker, StatFeatures,
    VOLUME_EPSILON,
};
pub use labeling::{label_components, Labeling, Topology, ACTIVE_THRESHOLD};
