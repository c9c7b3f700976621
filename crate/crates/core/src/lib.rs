//! Choreographies, their branching-pomset encoding, and the two operational
//! semantics side by side.
//!
//! ```
//! use bpom_core::chor::parse;
//! use bpom_core::encode::{encode, EncodeConfig};
//! use bpom_core::lts::{bisimilar, build_chor_lts, build_pom_lts, DEFAULT_STATE_BOUND};
//! use bpom_core::pomset::{enabled_events, fire};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let c = parse("a->b:x ; (b->c:x + b->d:x) ; c->d:x", false)?;
//! let r = encode(&c, &EncodeConfig::default())?;
//! for e in enabled_events(&r) {
//!     let next = fire(&r, e)?;
//!     println!("{} leaves {} events", r.label(e).unwrap(), next.len());
//! }
//! let same = bisimilar(
//!     &build_chor_lts(&c, DEFAULT_STATE_BOUND)?,
//!     &build_pom_lts(&r, DEFAULT_STATE_BOUND)?,
//! );
//! assert!(same.bisimilar);
//! # Ok(())
//! # }
//! ```

pub mod chor;
pub mod corpus;
pub mod encode;
pub mod lts;
pub mod pomset;
pub mod semantics;
