//! The alternating interval game with `alpha = 1/2`, the halving strategy,
//! and programmable opponents.

mod bob;
mod interactive;
mod play;
mod state;

pub use bob::{AdversarialBob, BobPlayer, BobView, RandomBob, ScriptBob};
pub use interactive::InteractiveBob;
pub use play::{
    play, validate_transcript, GameError, MoveRec, PlayCtx, PlayTrace, ReplayError, StrategyAbort,
    Transcript, TranscriptStatus,
};
pub use state::{legal, GameConfig, GameState, Mover};
