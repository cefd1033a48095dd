//! On-disk formats: FBF1 feature files, JSON model containers, TSV
//! manifests and score lists. Everything here is byte-deterministic: no
//! timestamps, no hash-map ordering, shortest round-trip float text.

pub mod fbf1;
pub mod manifest;
pub mod model;
pub mod scores;

pub use fbf1::{read_features, write_features};
pub use manifest::{parse_manifest, Manifest, ManifestRow};
pub use model::{
    load_fbnn_model, load_gmm_model, save_fbnn_model, save_gmm_model, FbnnModelFile, GmmModelFile,
};
pub use scores::{read_scores, write_scores};
