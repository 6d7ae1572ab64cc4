//! Game configuration and move-by-move state.

use num_bigint::BigInt;

use crate::exactnum::Rational;
use crate::interval::IntervalQ;

/// Fixed parameters of one game: `alpha = 1/2` is built in; Bob contracts by
/// `beta`; `rounds = 4 * depth` moves per player after the opening.
#[derive(Debug, Clone)]
pub struct GameConfig {
    pub beta: Rational,
    pub b0: IntervalQ,
    pub rounds: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mover {
    Alice,
    Bob,
}

impl Mover {
    pub fn label(&self) -> &'static str {
        match self {
            Mover::Alice => "alice",
            Mover::Bob => "bob",
        }
    }
}

/// Live state: the interval history plus whose turn it is.
#[derive(Debug, Clone)]
pub struct GameState {
    history: Vec<(Mover, IntervalQ)>,
    beta: Rational,
    rounds: u32,
}

impl GameState {
    pub fn open(config: &GameConfig) -> Self {
        GameState {
            history: vec![(Mover::Bob, config.b0.clone())],
            beta: config.beta.clone(),
            rounds: config.rounds,
        }
    }

    pub fn history(&self) -> &[(Mover, IntervalQ)] {
        &self.history
    }

    pub fn current(&self) -> &IntervalQ {
        &self.history.last().expect("opened").1
    }

    pub fn next_mover(&self) -> Mover {
        match self.history.last().expect("opened").0 {
            Mover::Bob => Mover::Alice,
            Mover::Alice => Mover::Bob,
        }
    }

    /// Index of the next Alice move: `A_m` for `m = alice_moves_made`.
    pub fn next_alice_index(&self) -> u32 {
        (self.history.len() as u32) / 2
    }

    /// Required length of the next move interval.
    pub fn required_length(&self) -> Rational {
        let cur = self.current().length();
        match self.next_mover() {
            Mover::Alice => cur / Rational::from_integer(BigInt::from(2)),
            Mover::Bob => cur * &self.beta,
        }
    }

    /// Allowed left-offset range for the next move: `[0, |cur| - required]`.
    pub fn offset_range(&self) -> Rational {
        self.current().length() - self.required_length()
    }

    pub fn finished(&self) -> bool {
        // opening + rounds moves each: total history 2 + 4*rounds... the
        // game ends after Alice's move A_{rounds} (history length 2*rounds+2).
        self.history.len() >= (2 * self.rounds as usize) + 2
    }

    pub fn push(&mut self, mover: Mover, iv: IntervalQ) {
        debug_assert_eq!(mover, self.next_mover());
        self.history.push((mover, iv));
    }
}

/// A move is legal when it nests inside the current interval with exactly
/// the required contraction.
pub fn legal(mv: &IntervalQ, state: &GameState) -> bool {
    state.current().contains(mv) && mv.length() == state.required_length()
}
