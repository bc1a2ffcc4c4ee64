//! Discovery of band order dependencies over ordered data.
//!
//! A band OD states that once the rows are sorted by the `X` attributes, the
//! `Y` value may step backwards by at most a band-width `delta`. The crate
//! finds longest monotonic bands, measures how approximately a band OD holds,
//! splits a sequence into series where it holds conditionally, and estimates
//! a band-width from data.
//!
//! ```
//! use bandod::{lmb, Direction};
//!
//! let years = [1992, 2012, 1996, 1995, 1999, 2000, 1999, 2001, 2002].map(Some);
//! let band = lmb::compute_lmb(&years, 1, Direction::Asc);
//! assert_eq!(band.length, 8);
//! assert_eq!(band.outliers, vec![2]);
//! ```

pub mod bandwidth;
pub mod bench;
pub mod discovery;
pub mod error;
pub mod lmb;
pub mod model;
pub mod oracle;
pub mod pieces;

pub use error::{Error, Result};
pub use model::{Direction, OrderedValue, Orientation, SequenceView, TupleRecord};
