//! Non-deterministic Turing machines, including the rulial machine made of
//! every single-case transition for given state and colour counts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiway::{Canonical, Rewrite, RewriteSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Move {
    L,
    S,
    R,
}

impl Move {
    fn delta(self) -> i64 {
        match self {
            Move::L => -1,
            Move::S => 0,
            Move::R => 1,
        }
    }
}

/// `(state, colour) → (state', colour', move)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transition {
    pub state: u8,
    pub color: u8,
    pub next_state: u8,
    pub write: u8,
    pub movement: Move,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}->{},{},{:?}", self.state, self.color, self.next_state, self.write, self.movement)
    }
}

/// Head state, a finite tape window (blank = 0 outside it) and the head
/// position within the window. The window is trimmed of blanks except
/// under the head.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TmState {
    pub state: u8,
    pub tape: Vec<u8>,
    pub head: usize,
}

impl TmState {
    pub fn blank(state: u8) -> Self {
        TmState { state, tape: vec![0], head: 0 }
    }

    /// Trims blanks, keeping the head cell. Returns the index shift applied.
    fn trim(&mut self) -> usize {
        let first = (0..self.tape.len()).find(|&i| self.tape[i] != 0 || i == self.head).unwrap_or(self.head);
        let last = (0..self.tape.len()).rev().find(|&i| self.tape[i] != 0 || i == self.head).unwrap_or(self.head);
        self.tape = self.tape[first..=last].to_vec();
        self.head -= first;
        first
    }

    pub fn normalized(&self) -> TmState {
        let mut s = self.clone();
        s.trim();
        s
    }
}

impl fmt::Display for TmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.state)?;
        for (i, c) in self.tape.iter().enumerate() {
            if i == self.head {
                write!(f, "[{c}]")?;
            } else {
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuringSystem {
    pub transitions: Vec<Transition>,
}

impl TuringSystem {
    pub fn new(transitions: Vec<Transition>) -> Self {
        TuringSystem { transitions }
    }

    /// Every transition for `states` head states and `colors` colours.
    /// The no-shift move is included only when `allow_stay` is set.
    pub fn rulial(states: u8, colors: u8, allow_stay: bool) -> Result<Self> {
        if states == 0 || colors == 0 {
            return Err(Error::OutOfRange("states and colours must be at least 1".into()));
        }
        let moves: &[Move] = if allow_stay { &[Move::L, Move::S, Move::R] } else { &[Move::L, Move::R] };
        let mut transitions = Vec::new();
        for state in 1..=states {
            for color in 0..colors {
                for next_state in 1..=states {
                    for write in 0..colors {
                        for &movement in moves {
                            transitions.push(Transition { state, color, next_state, write, movement });
                        }
                    }
                }
            }
        }
        Ok(TuringSystem { transitions })
    }

    /// Parses `"1,0->2,1,R; 2,1->1,0,L"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut transitions = Vec::new();
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let err = || Error::parse(0, format!("invalid transition `{part}`"));
            let (l, r) = part.split_once("->").ok_or_else(err)?;
            let l: Vec<&str> = l.split(',').map(str::trim).collect();
            let r: Vec<&str> = r.split(',').map(str::trim).collect();
            if l.len() != 2 || r.len() != 3 {
                return Err(err());
            }
            let num = |s: &str| s.parse::<u8>().map_err(|_| err());
            let movement = match r[2] {
                "L" => Move::L,
                "S" => Move::S,
                "R" => Move::R,
                _ => return Err(err()),
            };
            transitions.push(Transition {
                state: num(l[0])?,
                color: num(l[1])?,
                next_state: num(r[0])?,
                write: num(r[1])?,
                movement,
            });
        }
        Ok(TuringSystem { transitions })
    }

    /// Applies a transition; `None` when it does not read the head cell.
    pub fn apply(t: &Transition, s: &TmState) -> Option<Rewrite<TmState>> {
        if s.state != t.state || s.tape[s.head] != t.color {
            return None;
        }
        let mut tape = s.tape.clone();
        tape[s.head] = t.write;
        let target = s.head as i64 + t.movement.delta();
        let mut pad_left = 0usize;
        let head = if target < 0 {
            tape.insert(0, 0);
            pad_left = 1;
            0
        } else {
            if target as usize >= tape.len() {
                tape.push(0);
            }
            target as usize
        };
        let mut next = TmState { state: t.next_state, tape, head };
        let shift = next.trim();
        // element 0 is the head token, 1 + k is cell k
        let map = |old_cell: usize| -> Option<usize> {
            let idx = (old_cell + pad_left).checked_sub(shift)?;
            (idx < next.tape.len()).then_some(1 + idx)
        };
        let written = map(s.head);
        let mut produced = vec![0];
        produced.extend(written);
        let carried = (0..s.tape.len()).filter(|&k| k != s.head).filter_map(|k| map(k).map(|n| (1 + k, n))).collect();
        Some(Rewrite { position: s.head.to_string(), result: next, consumed: vec![0, 1 + s.head], produced, carried })
    }
}

impl RewriteSystem for TuringSystem {
    type State = TmState;

    fn canonicalizer(&self) -> &str {
        "tm"
    }

    fn rule_count(&self) -> usize {
        self.transitions.len()
    }

    fn rule_label(&self, rule: usize) -> String {
        self.transitions[rule].to_string()
    }

    fn canonicalize(&self, state: &TmState) -> Result<Canonical<TmState>> {
        let mut s = state.clone();
        let shift = s.trim();
        let mut perm = vec![0; 1 + state.tape.len()];
        for (k, p) in perm.iter_mut().enumerate().skip(1) {
            // dropped blank cells map past the end and are never referenced
            *p = (k - 1).checked_sub(shift).map_or(usize::MAX, |i| 1 + i);
        }
        Ok(Canonical { key: s.to_string(), state: s, perm })
    }

    fn rewrites(&self, rule: usize, state: &TmState) -> Result<Vec<Rewrite<TmState>>> {
        Ok(TuringSystem::apply(&self.transitions[rule], state).into_iter().collect())
    }

    fn element_count(&self, state: &TmState) -> usize {
        1 + state.tape.len()
    }

    fn render(&self, state: &TmState) -> String {
        state.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiway::successors;

    #[test]
    fn rulial_two_two() {
        let tm = TuringSystem::rulial(2, 2, false).unwrap();
        assert_eq!(tm.rule_count(), 32);
        let succ = successors(&tm, &TmState::blank(1)).unwrap();
        assert_eq!(succ.len(), 8);
        assert_eq!(TuringSystem::rulial(2, 2, true).unwrap().rule_count(), 48);
        assert!(TuringSystem::rulial(0, 2, false).is_err());
    }

    #[test]
    fn moves_and_trims() {
        let t = TuringSystem::parse("1,0->2,1,L").unwrap().transitions[0];
        let rw = TuringSystem::apply(&t, &TmState::blank(1)).unwrap();
        assert_eq!(rw.result.to_string(), "2:[0]1");
        assert_eq!(rw.produced, vec![0, 2]);
        let t = TuringSystem::parse("1,0->1,0,R").unwrap().transitions[0];
        let rw = TuringSystem::apply(&t, &TmState::blank(1)).unwrap();
        assert_eq!(rw.result.to_string(), "1:[0]");
    }
}
