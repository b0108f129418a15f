//! A register machine with Goedel-numbered programs, a universal `EXEC`
//! instruction and oracle calls into a [`HostRegistry`].

mod compose;
mod encoding;
mod exec;
mod host;
mod program;

pub use compose::{compose_with_host, diagonal_index, ComposeError, Postprocess};
pub use encoding::{decode, encode, try_decode, GoedelIndex};
pub use exec::{
    run_bounded, run_traced, HostCall, RunResult, RunStatus, TraceEvent, MAX_CALL_DEPTH,
};
pub use host::{HostEntry, HostFn, HostRegistry, DEFAULT_HOST_COST};
pub use program::{HostId, Instruction, ParseError, Program, ProgramError, Reg, REGISTER_COUNT};
