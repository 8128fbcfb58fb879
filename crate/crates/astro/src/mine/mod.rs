//! Static phase mining: parse function summaries out of a small textual IR,
//! turn them into code-level feature vectors and classify every function
//! into a program phase.
//!
//! The input dialect (`.sir` files) is deliberately tiny. A file is a list
//! of functions; a function body is one instruction per line plus `loop {`
//! / `}` nesting. The opcode set and the instruction category each opcode
//! feeds are:
//!
//! | opcode            | category                          |
//! |-------------------|-----------------------------------|
//! | `load`, `store`   | memory ops                        |
//! | `addi`, `muli`    | integer ALU                       |
//! | `addf`, `mulf`    | floating-point ALU                |
//! | `lock`            | lock ops                          |
//! | `call io.*`       | I/O call (nesting depth recorded) |
//! | `call net.*`      | network call (blocking)           |
//! | `call barrier`    | barrier call (blocking)           |
//! | `call sleep`      | sleep call (blocking)             |
//! | `call <other>`    | plain call                        |
//! | `nop`             | none                              |
//!
//! Every opcode line counts towards the instruction total. `#` starts a
//! line comment.

mod features;
mod parser;
mod phase_map;

pub use features::{classify_phase, extract_features, io_weight, FeatureVector};
pub use parser::{parse_ir, parse_program, BlockingCall, Function, FunctionSummary, Item, Opcode, Program};
pub use phase_map::{build_phase_map, InstrumentationPoint, PhaseEntry, PhaseMap};
