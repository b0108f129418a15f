use thiserror::Error;

use super::encoding::{encode, GoedelIndex};
use super::host::HostRegistry;
use super::program::{HostId, Instruction, Program};

/// What to do with the host's answer before halting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Postprocess {
    Identity,
    /// `1` on a zero answer, `0` otherwise.
    OneMinus,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("host primitive {0} is not registered")]
    UnregisteredHost(HostId),
}

/// A program that calls host `host_id` on its input and post-processes the
/// answer. It contains exactly one `HOST` instruction.
pub fn compose_with_host(
    host_id: HostId,
    post: Postprocess,
    reg: &HostRegistry,
) -> Result<Program, ComposeError> {
    if !reg.contains(host_id) {
        return Err(ComposeError::UnregisteredHost(host_id));
    }
    use Instruction::*;
    let host = Host {
        id: host_id,
        input: 0,
    };
    let instructions = match post {
        Postprocess::Identity => vec![host, Halt],
        Postprocess::OneMinus => vec![
            host,
            Jz(0, 5),
            // nonzero answer: drain register 0, then halt on zero
            Dec(0),
            Jz(0, 6),
            Jmp(2),
            Inc(0),
            Halt,
        ],
    };
    Ok(Program::new(instructions).expect("fixed shape is well formed"))
}

/// The index `e` of the program computing `1 - E(n)` for the extender `E`
/// registered at `extender`. On its own index, that program halts with
/// `1 - E(e)`, so `e` lies in the domain of the unextendible function and
/// disagrees with `E` there.
pub fn diagonal_index(extender: HostId, reg: &HostRegistry) -> Result<GoedelIndex, ComposeError> {
    compose_with_host(extender, Postprocess::OneMinus, reg).map(|p| encode(&p))
}
