//! The game engine: drives Bob against the halving strategy.
//!
//! Move sequence: Bob opens with `B_0`; Alice takes the centered half `A_0`,
//! which anchors the interval map. Each block `n >= 1` is four rounds: three
//! halving moves that shed dangerous intervals at rate `[5 * 2^-j]`
//! (containment-counted), then the block-end move `A_{4n} = I(tau_n)` for
//! the leftmost selector-chosen cell inside `B_{4n}`.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{format_rational, parse_rational, rat_ceil, Rational};
use crate::interval::IntervalQ;
use crate::treeplan::{SafeSet, SafeSetError, SubtreeSelector, TreeFrame, Vertex};

use super::bob::{BobMove, BobPlayer, BobView};
use super::state::{legal, GameConfig, GameState, Mover};

#[derive(Debug, Error)]
pub enum GameError {
    #[error("illegal move by {mover} at history index {index}: {detail}")]
    IllegalMove {
        mover: &'static str,
        index: usize,
        detail: String,
    },
    #[error("bob failed: {0}")]
    Bob(String),
    #[error(transparent)]
    SafeSet(#[from] SafeSetError),
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
}

/// Diagnosed strategy failure (a first-class outcome in override mode).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct StrategyAbort {
    pub alice_index: u32,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum TranscriptStatus {
    Ok,
    Aborted(StrategyAbort),
    Incomplete,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MoveRec {
    pub mover: String,
    pub left: String,
    pub right: String,
}

/// Self-contained record of one played game; replaying the moves reproduces
/// the final interval bit for bit.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Transcript {
    pub config_digest: String,
    pub beta: String,
    pub rounds: u32,
    pub moves: Vec<MoveRec>,
    pub final_left: String,
    pub final_right: String,
    pub status: TranscriptStatus,
}

impl Transcript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn final_interval(&self) -> Result<IntervalQ, ReplayError> {
        Ok(IntervalQ::new(
            parse_rational(&self.final_left).map_err(|e| ReplayError::Malformed(e.to_string()))?,
            parse_rational(&self.final_right).map_err(|e| ReplayError::Malformed(e.to_string()))?,
        ))
    }
}

/// Per-game diagnostics beyond the transcript.
#[derive(Debug, Clone)]
pub struct PlayTrace {
    /// Selector path `tau_0 .. tau_D` (as played).
    pub tau_path: Vec<Vertex>,
    /// `(alice index m, j = m mod 4, dangerous cells contained in A_m)`.
    pub danger_counts: Vec<(u32, u32, usize)>,
    /// The weakest lookahead any consulted selector choice carried.
    pub min_lookahead: u32,
}

/// Immutable play context shared by games.
pub struct PlayCtx<'a, S: SafeSet> {
    pub frame: &'a TreeFrame,
    pub safe: &'a S,
    pub selector: &'a SubtreeSelector,
    pub config_digest: String,
}

fn abort_transcript(
    ctx_digest: &str,
    config: &GameConfig,
    state: &GameState,
    abort: StrategyAbort,
) -> (Transcript, TranscriptStatus) {
    let status = TranscriptStatus::Aborted(abort);
    (
        build_transcript(ctx_digest, config, state, status.clone()),
        status,
    )
}

fn build_transcript(
    digest: &str,
    config: &GameConfig,
    state: &GameState,
    status: TranscriptStatus,
) -> Transcript {
    let final_iv = state.current();
    Transcript {
        config_digest: digest.to_string(),
        beta: format_rational(&config.beta),
        rounds: config.rounds,
        moves: state
            .history()
            .iter()
            .map(|(mover, iv)| MoveRec {
                mover: mover.label().to_string(),
                left: format_rational(iv.left()),
                right: format_rational(iv.right()),
            })
            .collect(),
        final_left: format_rational(final_iv.left()),
        final_right: format_rational(final_iv.right()),
        status,
    }
}

/// Alice's halving move: the half containing the fewer dangerous intervals
/// (containment-counted; ties to the left).
pub fn alice_halving(current: &IntervalQ, danger_cells: &[IntervalQ]) -> (IntervalQ, usize) {
    let (left, right) = current.halves();
    let count = |half: &IntervalQ| danger_cells.iter().filter(|c| half.contains(c)).count();
    let (cl, cr) = (count(&left), count(&right));
    if cl <= cr {
        (left, cl)
    } else {
        (right, cr)
    }
}

/// Alice's block-end move: the leftmost cell `I(tau_n)` contained in the
/// current interval; the cell must be selector-chosen.
pub fn alice_block_end<S: SafeSet>(
    ctx: &PlayCtx<S>,
    parent: &Vertex,
    current: &IntervalQ,
) -> Result<Result<(Vertex, IntervalQ, u32), String>, SafeSetError> {
    let n = parent.height() + 1;
    let w = ctx.frame.cell_width(n);
    let parent_iv = ctx.frame.interval_of(parent);
    let offset = current.left() - parent_iv.left();
    let d0 = rat_ceil(&(&offset / &w));
    if d0.is_negative() || d0 >= BigInt::from(ctx.frame.fanout()) {
        return Ok(Err(format!(
            "no cell of height {n} fits inside {current}"
        )));
    }
    let d0: u64 = (&d0).try_into().expect("checked range");
    let cell = parent.child(d0);
    let cell_iv = ctx.frame.interval_of(&cell);
    if !current.contains(&cell_iv) {
        return Ok(Err(format!(
            "leftmost candidate cell {} is not contained in {current}",
            cell.path_string()
        )));
    }
    let chosen = ctx.selector.chosen(ctx.safe, parent)?;
    if !chosen.digits.contains(&d0) {
        return Ok(Err(format!(
            "contained cell {} is dangerous",
            cell.path_string()
        )));
    }
    Ok(Ok((cell, cell_iv, chosen.lookahead)))
}

/// Plays one full game. Strategy failures come back as an `Aborted`
/// transcript, not an error.
pub fn play<S: SafeSet>(
    ctx: &PlayCtx<S>,
    config: &GameConfig,
    bob: &mut dyn BobPlayer,
) -> Result<(Transcript, PlayTrace), GameError> {
    if config.rounds != 4 * ctx.selector.horizon() {
        return Err(GameError::ConfigMismatch(format!(
            "rounds {} != 4 * selector horizon {}",
            config.rounds,
            ctx.selector.horizon()
        )));
    }
    // A_0 is the centered half of B_0 and anchors the interval map.
    let quarter = config.b0.length() / Rational::from_integer(BigInt::from(4));
    let a0 = IntervalQ::new(
        config.b0.left() + &quarter,
        config.b0.right() - &quarter,
    );
    if ctx.frame.root_interval() != &a0 {
        return Err(GameError::ConfigMismatch(format!(
            "tree frame root {} is not the centered half of B_0 {}",
            ctx.frame.root_interval(),
            config.b0
        )));
    }

    let mut state = GameState::open(config);
    state.push(Mover::Alice, a0);
    let mut tau = Vertex::root();
    let mut trace = PlayTrace {
        tau_path: vec![tau.clone()],
        danger_counts: Vec::new(),
        min_lookahead: ctx.selector.horizon(),
    };
    let mut danger_cells: Vec<IntervalQ> = if config.rounds > 0 {
        match dangerous_cells(ctx, &tau) {
            Ok(cells) => cells,
            Err(SafeSetError::ExtractionFailed { vertex, found, needed }) => {
                let (transcript, _) = abort_transcript(
                    &ctx.config_digest,
                    config,
                    &state,
                    StrategyAbort {
                        alice_index: 0,
                        reason: format!(
                            "selector extraction failed at {vertex}: {found} of {needed} successors hit"
                        ),
                    },
                );
                return Ok((transcript, trace));
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        Vec::new()
    };
    trace.danger_counts.push((0, 0, danger_cells.len()));

    while !state.finished() {
        // Bob
        let view = BobView {
            required_length: state.required_length(),
            offset_range: state.offset_range(),
            danger_cells: danger_cells.clone(),
        };
        let mv = match bob.choose(&state, &view).map_err(GameError::Bob)? {
            BobMove::Play(iv) => iv,
            BobMove::Quit => {
                let transcript =
                    build_transcript(&ctx.config_digest, config, &state, TranscriptStatus::Incomplete);
                return Ok((transcript, trace));
            }
        };
        if !legal(&mv, &state) {
            return Err(GameError::IllegalMove {
                mover: "bob",
                index: state.history().len(),
                detail: format!("{mv} in {}", state.current()),
            });
        }
        state.push(Mover::Bob, mv);

        // Alice
        let m = state.next_alice_index();
        let j = m % 4;
        if j == 0 {
            let step = match alice_block_end(ctx, &tau, state.current()) {
                Ok(step) => step,
                // A failed extraction is a first-class outcome in override
                // mode: report it as an abort, not a crash.
                Err(SafeSetError::ExtractionFailed { vertex, found, needed }) => Err(format!(
                    "selector extraction failed at {vertex}: {found} of {needed} successors hit"
                )),
                Err(e) => return Err(e.into()),
            };
            match step {
                Ok((cell, cell_iv, lookahead)) => {
                    state.push(Mover::Alice, cell_iv);
                    tau = cell;
                    trace.tau_path.push(tau.clone());
                    trace.min_lookahead = trace.min_lookahead.min(lookahead);
                    if m < config.rounds {
                        danger_cells = match dangerous_cells(ctx, &tau) {
                            Ok(cells) => cells,
                            Err(SafeSetError::ExtractionFailed { vertex, found, needed }) => {
                                let (transcript, _) = abort_transcript(
                                    &ctx.config_digest,
                                    config,
                                    &state,
                                    StrategyAbort {
                                        alice_index: m,
                                        reason: format!(
                                            "selector extraction failed at {vertex}: {found} of {needed} successors hit"
                                        ),
                                    },
                                );
                                return Ok((transcript, trace));
                            }
                            Err(e) => return Err(e.into()),
                        };
                        trace.danger_counts.push((m, 0, danger_cells.len()));
                    }
                }
                Err(reason) => {
                    let (transcript, _) = abort_transcript(
                        &ctx.config_digest,
                        config,
                        &state,
                        StrategyAbort {
                            alice_index: m,
                            reason,
                        },
                    );
                    return Ok((transcript, trace));
                }
            }
        } else {
            let (half, count) = alice_halving(state.current(), &danger_cells);
            state.push(Mover::Alice, half);
            trace.danger_counts.push((m, j, count));
        }
    }

    let transcript = build_transcript(&ctx.config_digest, config, &state, TranscriptStatus::Ok);
    Ok((transcript, trace))
}

fn dangerous_cells<S: SafeSet>(
    ctx: &PlayCtx<S>,
    tau: &Vertex,
) -> Result<Vec<IntervalQ>, SafeSetError> {
    Ok(ctx
        .selector
        .dangerous_digits(ctx.safe, tau)?
        .into_iter()
        .map(|d| ctx.frame.interval_of(&tau.child(d)))
        .collect())
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("malformed transcript: {0}")]
    Malformed(String),
    #[error("move {index} by {mover} is illegal: {detail}")]
    IllegalMove {
        index: usize,
        mover: String,
        detail: String,
    },
    #[error("opening move does not match the configured B_0")]
    WrongOpening,
    #[error("recorded final interval does not match the replayed moves")]
    FinalMismatch,
}

/// Replays a transcript move by move, revalidating alternation, nesting and
/// exact contraction; returns the final interval.
pub fn validate_transcript(
    t: &Transcript,
    config: &GameConfig,
) -> Result<IntervalQ, ReplayError> {
    let mut moves = t.moves.iter();
    let first = moves.next().ok_or_else(|| ReplayError::Malformed("empty".into()))?;
    let parse_iv = |m: &MoveRec| -> Result<IntervalQ, ReplayError> {
        let l = parse_rational(&m.left).map_err(|e| ReplayError::Malformed(e.to_string()))?;
        let r = parse_rational(&m.right).map_err(|e| ReplayError::Malformed(e.to_string()))?;
        if l > r {
            return Err(ReplayError::Malformed("inverted interval".into()));
        }
        Ok(IntervalQ::new(l, r))
    };
    if first.mover != "bob" || parse_iv(first)? != config.b0 {
        return Err(ReplayError::WrongOpening);
    }
    let mut state = GameState::open(config);
    for (index, mv) in moves.enumerate() {
        let expected = state.next_mover();
        if mv.mover != expected.label() {
            return Err(ReplayError::IllegalMove {
                index: index + 1,
                mover: mv.mover.clone(),
                detail: format!("expected {}", expected.label()),
            });
        }
        let iv = parse_iv(mv)?;
        if !legal(&iv, &state) {
            return Err(ReplayError::IllegalMove {
                index: index + 1,
                mover: mv.mover.clone(),
                detail: format!("{iv} in {}", state.current()),
            });
        }
        state.push(expected, iv);
    }
    let final_iv = t.final_interval()?;
    if &final_iv != state.current() {
        return Err(ReplayError::FinalMismatch);
    }
    Ok(final_iv)
}
