//! Decomposition of third-order linear time-varying systems
//!
//! ```text
//! c3(t) y''' + c2(t) y'' + c1(t) y' + c0(t) y = x
//! ```
//!
//! into a commutative series connection of a first-order system
//! `a1 y' + a0 y = x` and a second-order system `b2 y'' + b1 y' + b0 y = x`.
//!
//! * [`expr`]: coefficient expressions in `t` with symbolic derivatives.
//! * [`systems`]: the three system types and the decomposition constants.
//! * [`cascade`]: composing `A` and `B` in either order.
//! * [`decompose`]: factoring `C`, residual checks, initial-value conditions
//!   and the constant search.
//! * [`sim`]: fixed-step Bogacki-Shampine simulation and input signals.
//! * [`verify`]: trajectory distances and combined reports.
//! * [`cli`]: the `ltvdecomp` command and its scenario files.
//!
//! ```
//! use ltvdecomp::decompose::decompose;
//! use ltvdecomp::systems::{uniform_grid, DecompositionConstants, ThirdOrderSystem};
//!
//! let c = ThirdOrderSystem::parse("t^3", "7*t^2", "9*t", "1", 0.01).unwrap();
//! let k = DecompositionConstants::new(1.0, 1.0, -1.0);
//! let d = decompose(&c, &k, &uniform_grid(0.01, 10.0, 64), 1e-9).unwrap();
//! assert_eq!(d.first.a1.to_string(), "t");
//! assert_eq!(d.second.b1.to_string(), "4*t");
//! ```

pub mod cascade;
pub mod cli;
pub mod decompose;
pub mod expr;
pub mod sim;
pub mod systems;
pub mod verify;
