//! A human (or scripted stream) playing Bob through a line protocol.
//!
//! Each turn prints the current interval, the required length, and the legal
//! offset range, then reads one line:
//!   - a rational absolute offset in `[0, range]`, e.g. `3/16`
//!   - `auto`: delegate this and all remaining moves to a seeded random Bob
//!   - `quit`: stop; the transcript is flagged incomplete
//! Illegal or unparsable input re-prompts with the legal range.

use std::io::{BufRead, Write};

use num_traits::Signed;

use crate::exactnum::{format_rational, parse_rational};

use super::bob::{BobMove, BobPlayer, BobView, RandomBob};
use super::state::GameState;

pub struct InteractiveBob<R: BufRead, W: Write> {
    input: R,
    output: W,
    fallback: RandomBob,
    delegated: bool,
}

impl<R: BufRead, W: Write> InteractiveBob<R, W> {
    pub fn new(input: R, output: W, fallback_seed: u64) -> Self {
        InteractiveBob {
            input,
            output,
            fallback: RandomBob::new(fallback_seed),
            delegated: false,
        }
    }
}

impl<R: BufRead, W: Write> BobPlayer for InteractiveBob<R, W> {
    fn name(&self) -> &'static str {
        "interactive"
    }

    fn choose(&mut self, state: &GameState, view: &BobView) -> Result<BobMove, String> {
        if self.delegated {
            return self.fallback.choose(state, view);
        }
        let w = &mut self.output;
        writeln!(w, "current interval: {}", state.current()).map_err(|e| e.to_string())?;
        writeln!(
            w,
            "your move: length {}, offset in [0, {}]",
            format_rational(&view.required_length),
            format_rational(&view.offset_range)
        )
        .map_err(|e| e.to_string())?;
        if !view.danger_cells.is_empty() {
            writeln!(w, "dangerous intervals:").map_err(|e| e.to_string())?;
            for cell in &view.danger_cells {
                writeln!(w, "  {cell}").map_err(|e| e.to_string())?;
            }
        }
        loop {
            write!(w, "offset> ").map_err(|e| e.to_string())?;
            w.flush().map_err(|e| e.to_string())?;
            let mut line = String::new();
            let n = self.input.read_line(&mut line).map_err(|e| e.to_string())?;
            if n == 0 {
                // end of input behaves like quit
                return Ok(BobMove::Quit);
            }
            let line = line.trim();
            match line {
                "quit" => return Ok(BobMove::Quit),
                "auto" => {
                    self.delegated = true;
                    return self.fallback.choose(state, view);
                }
                _ => match parse_rational(line) {
                    Ok(off) if !off.is_negative() && off <= view.offset_range => {
                        return Ok(BobMove::Play(
                            state.current().sub_at(&off, &view.required_length),
                        ));
                    }
                    _ => {
                        writeln!(
                            w,
                            "illegal offset; enter a rational in [0, {}], `auto`, or `quit`",
                            format_rational(&view.offset_range)
                        )
                        .map_err(|e| e.to_string())?;
                    }
                },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rational;
    use crate::game::state::{GameConfig, Mover};
    use crate::interval::IntervalQ;
    use std::io::Cursor;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn state() -> (GameState, BobView) {
        let config = GameConfig {
            beta: r("1/2"),
            b0: IntervalQ::new(r("0"), r("2")),
            rounds: 4,
        };
        let mut st = GameState::open(&config);
        st.push(Mover::Alice, IntervalQ::new(r("1/2"), r("3/2")));
        let view = BobView {
            required_length: st.required_length(),
            offset_range: st.offset_range(),
            danger_cells: vec![IntervalQ::new(r("5/8"), r("11/16"))],
        };
        (st, view)
    }

    #[test]
    fn reprompts_until_legal() {
        let (st, view) = state();
        let input = Cursor::new("7/8\nnonsense\n1/4\n");
        let mut out = Vec::new();
        let mut bob = InteractiveBob::new(input, &mut out, 0);
        let BobMove::Play(iv) = bob.choose(&st, &view).unwrap() else {
            panic!("expected a move");
        };
        // offset 1/4 from 1/2: [3/4, 5/4]
        assert_eq!(iv, IntervalQ::new(r("3/4"), r("5/4")));
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("illegal offset"));
        assert!(text.contains("dangerous intervals"));
    }

    #[test]
    fn quit_and_auto() {
        let (st, view) = state();
        let mut out = Vec::new();
        let mut bob = InteractiveBob::new(Cursor::new("quit\n"), &mut out, 0);
        assert!(matches!(bob.choose(&st, &view).unwrap(), BobMove::Quit));

        let mut bob2 = InteractiveBob::new(Cursor::new("auto\n"), Vec::new(), 9);
        let BobMove::Play(iv) = bob2.choose(&st, &view).unwrap() else {
            panic!()
        };
        // delegated: identical to the same-seeded random bob
        let BobMove::Play(want) = RandomBob::new(9).choose(&st, &view).unwrap() else {
            panic!()
        };
        assert_eq!(iv, want);
        // subsequent calls stay delegated without prompting
        let before = bob2.output.len();
        let _ = bob2.choose(&st, &view).unwrap();
        assert_eq!(bob2.output.len(), before);
    }

    #[test]
    fn eof_is_quit() {
        let (st, view) = state();
        let mut out = Vec::new();
        let mut bob = InteractiveBob::new(Cursor::new(""), &mut out, 0);
        assert!(matches!(bob.choose(&st, &view).unwrap(), BobMove::Quit));
    }
}
