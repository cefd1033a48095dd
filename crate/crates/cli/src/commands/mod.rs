pub mod bank;
pub mod eval;
pub mod extract;
pub mod inspect;
pub mod score;
pub mod train_fbnn;
pub mod train_gmm;
