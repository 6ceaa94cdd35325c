pub mod colorblind;
pub mod error;
pub mod fairlp;
pub mod flowround;
pub mod harness;
pub mod lpsolve;
pub mod multicolor;
pub mod oracle;
pub mod types;

pub use error::{Error, Result};
pub use types::{ColorModel, Dataset, FairnessSpec, Objective, ObjectiveSpec, Point, Solution};
