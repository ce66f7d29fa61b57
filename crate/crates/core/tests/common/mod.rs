#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use zxmultiway::zx::{Color, Diagram, Kind};
use zxmultiway::Phase;

/// Random diagram: `spiders` spiders of up to three legs, `n` inputs and
/// `m` outputs, legs paired by a uniform perfect matching, some wires
/// carrying a Hadamard. Phases are multiples of π/4 unless `inexact`.
pub fn random_diagram(rng: &mut impl Rng, n: usize, m: usize, spiders: usize, inexact: bool) -> Diagram {
    let mut d = Diagram::empty();
    let mut slots = Vec::new();
    for k in 0..n {
        slots.push(d.add_node(String::new(), Kind::Input(k)));
    }
    for k in 0..m {
        slots.push(d.add_node(String::new(), Kind::Output(k)));
    }
    let mut legs = Vec::new();
    for _ in 0..spiders {
        legs.push(rng.random_range(0..=3usize));
    }
    if (n + m + legs.iter().sum::<usize>()) % 2 == 1 {
        match legs.iter().position(|&l| l < 3) {
            Some(i) => legs[i] += 1,
            None => legs.push(1),
        }
    }
    for l in legs {
        let color = if rng.random_bool(0.5) { Color::Z } else { Color::X };
        let phase = if inexact && rng.random_bool(0.3) {
            Phase::new(rng.random_range(0..10), 5)
        } else {
            Phase::new(rng.random_range(0..8), 4)
        };
        let i = rng.random_range(0..=l);
        let v = d.add_node(String::new(), Kind::Spider { color, phase, inputs: i, outputs: l - i });
        for _ in 0..l {
            slots.push(v);
        }
    }
    slots.shuffle(rng);
    for pair in slots.chunks(2) {
        if rng.random_bool(0.2) {
            let h = d.add_node(String::new(), Kind::H);
            d.add_wire(pair[0], h);
            d.add_wire(h, pair[1]);
        } else {
            d.add_wire(pair[0], pair[1]);
        }
    }
    let d = d.renamed();
    d.validate().unwrap();
    d
}

/// The same diagram with nodes, wires and wire orientations shuffled.
pub fn relabel(d: &Diagram, rng: &mut impl Rng) -> Diagram {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.shuffle(rng);
    let mut pos = vec![0; d.len()];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let mut out = Diagram::empty();
    for &old in &order {
        out.add_node(d.nodes[old].name.clone(), d.nodes[old].kind.clone());
    }
    let mut wires: Vec<(usize, usize)> = d.wires.iter().map(|&(a, b)| (pos[a], pos[b])).collect();
    wires.shuffle(rng);
    for (a, b) in wires {
        if rng.random_bool(0.5) {
            out.add_wire(a, b);
        } else {
            out.add_wire(b, a);
        }
    }
    out.loops = d.loops;
    out
}
