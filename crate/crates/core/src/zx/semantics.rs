//! Matrix semantics of ZX-diagrams by tensor-network contraction.
//!
//! Rows index outputs and columns inputs; the first boundary point is the
//! most significant bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::phase::Phase;
use crate::scalar::{Cyclotomic8, Scalar};
use crate::zx::diagram::{Color, Diagram, Kind};
use crate::Complex64;

/// Dense tensor over qubit indices; `idx[0]` is the most significant.
#[derive(Clone, Debug)]
struct Tensor<T> {
    idx: Vec<usize>,
    data: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    fn scalar(x: T) -> Self {
        Tensor { idx: Vec::new(), data: vec![x] }
    }

    fn get(&self, assign: impl Fn(usize) -> usize) -> &T {
        let mut off = 0;
        for &w in &self.idx {
            off = off * 2 + assign(w);
        }
        &self.data[off]
    }

    /// Sums over indices that occur twice (self-loops).
    fn trace_repeats(self) -> Self {
        let count = |w: usize| self.idx.iter().filter(|&&x| x == w).count();
        let keep: Vec<usize> = self.idx.iter().copied().filter(|&w| count(w) == 1).collect();
        if keep.len() == self.idx.len() {
            return self;
        }
        let k = self.idx.len();
        let mut data = vec![T::zero(); 1 << keep.len()];
        'outer: for off in 0..1usize << k {
            let bit = |p: usize| (off >> (k - 1 - p)) & 1;
            for p in 0..k {
                for q in p + 1..k {
                    if self.idx[p] == self.idx[q] && bit(p) != bit(q) {
                        continue 'outer;
                    }
                }
            }
            let t = (0..k).filter(|&p| keep.contains(&self.idx[p])).fold(0, |acc, p| acc * 2 + bit(p));
            data[t] = data[t].clone() + self.data[off].clone();
        }
        Tensor { idx: keep, data }
    }

    fn contract(&self, other: &Self) -> Self {
        let shared: Vec<usize> = self.idx.iter().copied().filter(|w| other.idx.contains(w)).collect();
        let mut out: Vec<usize> = self.idx.iter().copied().filter(|w| !shared.contains(w)).collect();
        out.extend(other.idx.iter().copied().filter(|w| !shared.contains(w)));
        let mut data = Vec::with_capacity(1 << out.len());
        let mut assign = std::collections::HashMap::new();
        for o in 0..1usize << out.len() {
            for (p, &w) in out.iter().enumerate() {
                assign.insert(w, (o >> (out.len() - 1 - p)) & 1);
            }
            let mut acc = T::zero();
            for s in 0..1usize << shared.len() {
                for (p, &w) in shared.iter().enumerate() {
                    assign.insert(w, (s >> (shared.len() - 1 - p)) & 1);
                }
                let a = self.get(|w| assign[&w]);
                if a.is_zero() {
                    continue;
                }
                acc = acc + a.clone() * other.get(|w| assign[&w]).clone();
            }
            data.push(acc);
        }
        Tensor { idx: out, data }
    }
}

/// Contraction order for the tensor network.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// Repeatedly contracts the connected pair with the smallest result.
    #[default]
    Greedy,
    /// Contracts nodes left to right in declaration order.
    Naive,
}

fn phase_value<T: Scalar>(p: &Phase) -> Result<T> {
    T::from_phase(p).ok_or_else(|| Error::InexactPhase(p.to_string()))
}

fn pow<T: Scalar>(x: T, k: usize) -> T {
    (0..k).fold(T::one(), |acc, _| acc * x.clone())
}

/// Spider tensor with `legs` legs.
fn spider_tensor<T: Scalar>(color: Color, phase: &Phase, idx: Vec<usize>) -> Result<Tensor<T>> {
    let d = idx.len();
    let e = phase_value::<T>(phase)?;
    let data = match color {
        Color::Z => {
            if d == 0 {
                vec![T::one() + e]
            } else {
                let mut v = vec![T::zero(); 1 << d];
                v[0] = T::one();
                v[(1 << d) - 1] = v[(1 << d) - 1].clone() + e;
                v
            }
        }
        Color::X => {
            let norm = pow(T::frac_1_sqrt2(), d);
            (0..1usize << d)
                .map(|b| {
                    let sign = if b.count_ones() % 2 == 0 { e.clone() } else { -e.clone() };
                    norm.clone() * (T::one() + sign)
                })
                .collect()
        }
    };
    Ok(Tensor { idx, data })
}

/// Matrix of a lone `n → m` spider.
pub fn spider_matrix<T: Scalar>(color: Color, phase: &Phase, n: usize, m: usize) -> Result<ComplexMatrix<T>> {
    diagram_matrix(&Diagram::spider(color, *phase, n, m))
}

pub fn hadamard_matrix<T: Scalar>() -> ComplexMatrix<T> {
    let h = T::frac_1_sqrt2();
    ComplexMatrix::from_fn(2, 2, |r, c| if r == 1 && c == 1 { -h.clone() } else { h.clone() })
}

pub fn diagram_matrix<T: Scalar>(d: &Diagram) -> Result<ComplexMatrix<T>> {
    diagram_matrix_with(d, Schedule::Greedy)
}

pub fn diagram_matrix_with<T: Scalar>(d: &Diagram, schedule: Schedule) -> Result<ComplexMatrix<T>> {
    d.validate()?;
    let mut scalar = pow(T::sqrt2(), d.diamonds()) * pow(T::from_int(2), d.loops);
    let mut tensors: Vec<Tensor<T>> = Vec::new();
    for (v, node) in d.nodes.iter().enumerate() {
        // one leg per wire endpoint at v; a self-loop contributes two
        let legs: Vec<usize> = d
            .wires
            .iter()
            .enumerate()
            .flat_map(|(w, &(a, b))| std::iter::repeat_n(w, (a == v) as usize + (b == v) as usize))
            .collect();
        let t = match &node.kind {
            Kind::Spider { color, phase, .. } => spider_tensor(*color, phase, legs)?,
            Kind::H => {
                let h = hadamard_matrix::<T>();
                Tensor { idx: legs, data: h.entries().to_vec() }
            }
            _ => continue,
        };
        let t = t.trace_repeats();
        if t.idx.is_empty() {
            scalar = scalar * t.data[0].clone();
        } else {
            tensors.push(t);
        }
    }
    let result = match schedule {
        Schedule::Greedy => contract_greedy(tensors),
        Schedule::Naive => tensors.into_iter().reduce(|a, b| a.contract(&b)),
    }
    .unwrap_or_else(|| Tensor::scalar(T::one()));

    let wire_of = |v: usize| d.wires.iter().position(|&(a, b)| a == v || b == v).expect("validated boundary");
    let ins: Vec<usize> = d.inputs().into_iter().map(wire_of).collect();
    let outs: Vec<usize> = d.outputs().into_iter().map(wire_of).collect();
    let (n, m) = (ins.len(), outs.len());
    let mut mat = ComplexMatrix::zeros(1 << m, 1 << n);
    let mut assign = vec![usize::MAX; d.wires.len()];
    for r in 0..1usize << m {
        'col: for c in 0..1usize << n {
            assign.iter_mut().for_each(|a| *a = usize::MAX);
            let bits = outs.iter().enumerate().map(|(k, &w)| (w, (r >> (m - 1 - k)) & 1));
            let bits = bits.chain(ins.iter().enumerate().map(|(k, &w)| (w, (c >> (n - 1 - k)) & 1)));
            for (w, b) in bits {
                if assign[w] != usize::MAX && assign[w] != b {
                    continue 'col;
                }
                assign[w] = b;
            }
            mat.set(r, c, scalar.clone() * result.get(|w| assign[w]).clone());
        }
    }
    Ok(mat)
}

fn contract_greedy<T: Scalar>(mut ts: Vec<Tensor<T>>) -> Option<Tensor<T>> {
    while ts.len() > 1 {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                let shared = ts[i].idx.iter().filter(|w| ts[j].idx.contains(w)).count();
                if shared == 0 {
                    continue;
                }
                let size = ts[i].idx.len() + ts[j].idx.len() - 2 * shared;
                if best.is_none_or(|(s, _, _)| size < s) {
                    best = Some((size, i, j));
                }
            }
        }
        let (i, j) = match best {
            Some((_, i, j)) => (i, j),
            None => {
                // disconnected: outer product of the two smallest
                let mut order: Vec<usize> = (0..ts.len()).collect();
                order.sort_by_key(|&k| (ts[k].idx.len(), k));
                (order[0].min(order[1]), order[0].max(order[1]))
            }
        };
        let b = ts.remove(j);
        let a = ts.remove(i);
        ts.push(a.contract(&b));
    }
    ts.pop()
}

/// Whether every phase is a multiple of π/4, so the exact field applies.
pub fn is_exact(d: &Diagram) -> bool {
    d.nodes.iter().all(|n| match &n.kind {
        Kind::Spider { phase, .. } => 4 % phase.denom() == 0,
        _ => true,
    })
}

/// A matrix in exact arithmetic when possible, floating point otherwise.
#[derive(Clone, Debug)]
pub enum Semantics {
    Exact(ComplexMatrix<Cyclotomic8>),
    Float(ComplexMatrix<Complex64>),
}

impl Semantics {
    pub fn of(d: &Diagram) -> Result<Semantics> {
        Ok(if is_exact(d) { Semantics::Exact(diagram_matrix(d)?) } else { Semantics::Float(diagram_matrix(d)?) })
    }

    pub fn to_float(&self) -> ComplexMatrix<Complex64> {
        match self {
            Semantics::Exact(m) => m.to_c64(),
            Semantics::Float(m) => m.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Equal,
    Proportional { re: f64, im: f64 },
    Unsound,
}

/// Compares the semantics of two diagrams with equal boundary signatures.
pub fn verify_rule(lhs: &Diagram, rhs: &Diagram, tol: f64) -> Result<Verdict> {
    if (lhs.n_inputs(), lhs.n_outputs()) != (rhs.n_inputs(), rhs.n_outputs()) {
        return Err(Error::ShapeMismatch(format!(
            "{}→{} vs {}→{}",
            lhs.n_inputs(),
            lhs.n_outputs(),
            rhs.n_inputs(),
            rhs.n_outputs()
        )));
    }
    if is_exact(lhs) && is_exact(rhs) {
        let a: ComplexMatrix<Cyclotomic8> = diagram_matrix(lhs)?;
        let b: ComplexMatrix<Cyclotomic8> = diagram_matrix(rhs)?;
        return Ok(match a.proportional(&b, 0.0)? {
            Some(l) if l == Cyclotomic8::one() => Verdict::Equal,
            Some(l) => {
                let c = l.to_c64();
                Verdict::Proportional { re: c.re, im: c.im }
            }
            None => Verdict::Unsound,
        });
    }
    let a: ComplexMatrix<Complex64> = diagram_matrix(lhs)?;
    let b: ComplexMatrix<Complex64> = diagram_matrix(rhs)?;
    Ok(match a.proportional(&b, tol)? {
        Some(l) if (l - Complex64::new(1.0, 0.0)).norm() <= tol => Verdict::Equal,
        Some(l) => Verdict::Proportional { re: l.re, im: l.im },
        None => Verdict::Unsound,
    })
}

use num_traits::One;

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_to_one_z_is_diagonal() {
        let p = Phase::new(1, 3);
        let m: ComplexMatrix<Complex64> = spider_matrix(Color::Z, &p, 1, 1).unwrap();
        let e = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let want = ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), e]]).unwrap();
        assert!(m.approx_eq(&want, 1e-12));
    }

    #[test]
    fn scalar_spiders_and_empty() {
        let m: ComplexMatrix<Cyclotomic8> = spider_matrix(Color::Z, &Phase::ZERO, 0, 0).unwrap();
        assert_eq!(m, ComplexMatrix::scalar(Cyclotomic8::from_int(2)));
        let e: ComplexMatrix<Cyclotomic8> = diagram_matrix(&Diagram::empty()).unwrap();
        assert_eq!(e, ComplexMatrix::scalar(Cyclotomic8::one()));
        let b: ComplexMatrix<Cyclotomic8> = diagram_matrix(&"B[d]".parse().unwrap()).unwrap();
        assert_eq!(b, ComplexMatrix::scalar(Cyclotomic8::sqrt2()));
    }

    #[test]
    fn hadamard_and_x_spider() {
        let h: ComplexMatrix<Cyclotomic8> = diagram_matrix(&Diagram::hadamard()).unwrap();
        assert_eq!(h, hadamard_matrix());
        // X(α) with one input and one output is H·Z(α)·H
        for k in 0..8 {
            let p = Phase::new(k, 4);
            let x: ComplexMatrix<Cyclotomic8> = spider_matrix(Color::X, &p, 1, 1).unwrap();
            let z: ComplexMatrix<Cyclotomic8> = spider_matrix(Color::Z, &p, 1, 1).unwrap();
            let hzh = h.matmul(&z).unwrap().matmul(&h).unwrap();
            assert_eq!(x, hzh);
        }
    }

    #[test]
    fn wires_cups_and_swaps() {
        let id: ComplexMatrix<Cyclotomic8> = diagram_matrix(&Diagram::identity(1)).unwrap();
        assert_eq!(id, ComplexMatrix::identity(2));
        let cup: ComplexMatrix<Cyclotomic8> = diagram_matrix(&"W[o1,o2]".parse().unwrap()).unwrap();
        let one = Cyclotomic8::one();
        let zero = Cyclotomic8::zero();
        assert_eq!(cup.entries(), &[one.clone(), zero.clone(), zero, one]);
        let swap: ComplexMatrix<Cyclotomic8> = diagram_matrix(&"W[i1,o2]⊗W[i2,o1]".parse().unwrap()).unwrap();
        assert_eq!(*swap.get(1, 2), Cyclotomic8::one());
        assert_eq!(*swap.get(1, 1), Cyclotomic8::zero());
        let lp: ComplexMatrix<Cyclotomic8> = diagram_matrix(&"L[]".parse().unwrap()).unwrap();
        assert_eq!(lp, ComplexMatrix::scalar(Cyclotomic8::from_int(2)));
    }

    #[test]
    fn self_loop_traces() {
        // a Z spider with a self-loop: trace over the loop index
        let d: Diagram = "Z[z,1,3,0]⊗W[i1,z]⊗W[z,z]⊗W[z,o1]".parse().unwrap();
        let m: ComplexMatrix<Cyclotomic8> = diagram_matrix(&d).unwrap();
        assert_eq!(m, ComplexMatrix::identity(2));
    }

    #[test]
    fn schedules_agree() {
        let d: Diagram = "Z[z1,2,1,pi]⊗X[x1,1,2,pi/2]⊗W[i1,z1]⊗W[z1,o1]⊗W[x1,z1]⊗W[i2,x1]⊗W[x1,o2]".parse().unwrap();
        let a: ComplexMatrix<Cyclotomic8> = diagram_matrix_with(&d, Schedule::Greedy).unwrap();
        let b: ComplexMatrix<Cyclotomic8> = diagram_matrix_with(&d, Schedule::Naive).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn inexact_phase_in_exact_mode() {
        let d = Diagram::spider(Color::Z, Phase::new(1, 3), 1, 1);
        assert!(matches!(diagram_matrix::<Cyclotomic8>(&d), Err(Error::InexactPhase(_))));
        assert!(matches!(Semantics::of(&d).unwrap(), Semantics::Float(_)));
    }

    #[test]
    fn verdicts() {
        let a = Phase::new(1, 2);
        let b = Phase::new(1, 4);
        let two: Diagram = format!("Z[a,1,1,{a}]⊗Z[b,1,1,{b}]⊗W[i1,a]⊗W[a,b]⊗W[b,o1]").parse().unwrap();
        let one = Diagram::spider(Color::Z, a + b, 1, 1);
        assert_eq!(verify_rule(&two, &one, 1e-9).unwrap(), Verdict::Equal);
        let bad = Diagram::spider(Color::Z, a + b + Phase::PI, 1, 1);
        assert_eq!(verify_rule(&two, &bad, 1e-9).unwrap(), Verdict::Unsound);
        let scaled = one.stack(&"B[d]".parse().unwrap());
        assert!(matches!(verify_rule(&scaled, &one, 1e-9).unwrap(), Verdict::Proportional { .. }));
        assert!(verify_rule(&one, &Diagram::identity(2), 1e-9).is_err());
    }
}
