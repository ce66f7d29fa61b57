//! Rule schemas of the ZX-calculus, their concrete instances and the
//! bounded enumeration of all instances.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::{Phase, PhaseExpr};
use crate::zx::diagram::{Color, Diagram, DiagramJson, Kind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `(n1, m1, n2, m2, k)`: two spiders joined by `k` wires merge.
    Fusion,
    /// `(n, m, k, n1, m2)`: an `n → m` spider splits, the first part keeping
    /// `n1` inputs and the second `m2` outputs.
    Fission,
    /// `(n, m)` with `n + m = 2`: a phaseless spider is a wire.
    Identity,
    /// `(n, m)` with `n + m ≥ 2`: a state of one colour copies through a
    /// spider of the other.
    Copy,
    /// `(n, m)`: complete bipartite block ↔ merge–split pair.
    Bialgebra,
    /// Bialgebra with the other-colour phases equal to π.
    BialgebraPiX,
    /// Bialgebra with the rooted-colour phases equal to π.
    BialgebraPiZ,
    /// `(n, m)`: a π NOT on one leg copies onto every other leg.
    PiCopy,
    /// `(n, m)`: like π-copy for a phased spider, negating its phase.
    PhaseFlip,
    /// `(n, m)`: a spider equals the opposite colour with H on every leg.
    ColorChange,
    /// A state meeting an opposite-colour effect is one diamond.
    Cancel,
    /// Two diamonds are one closed loop.
    Scalar,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::Fusion,
        Family::Fission,
        Family::Identity,
        Family::Copy,
        Family::Bialgebra,
        Family::BialgebraPiX,
        Family::BialgebraPiZ,
        Family::PiCopy,
        Family::PhaseFlip,
        Family::ColorChange,
        Family::Cancel,
        Family::Scalar,
    ];

    /// Enumeration order: degenerate bialgebra instances coincide with
    /// cancellation and π-copy rules, which are listed first so that they
    /// keep their own names.
    pub const ENUMERATION_ORDER: [Family; 12] = [
        Family::Scalar,
        Family::Cancel,
        Family::Identity,
        Family::Fusion,
        Family::Fission,
        Family::Copy,
        Family::PiCopy,
        Family::PhaseFlip,
        Family::ColorChange,
        Family::Bialgebra,
        Family::BialgebraPiX,
        Family::BialgebraPiZ,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Family::Fusion => "S1-fusion",
            Family::Fission => "S1-fission",
            Family::Identity => "S2-identity",
            Family::Copy => "B1-copy",
            Family::Bialgebra => "B2-bialgebra",
            Family::BialgebraPiX => "B2-piX",
            Family::BialgebraPiZ => "B2-piZ",
            Family::PiCopy => "K1-picopy",
            Family::PhaseFlip => "K2-phaseflip",
            Family::ColorChange => "C-colorchange",
            Family::Cancel => "D1-cancel",
            Family::Scalar => "D2-scalar",
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            Family::Fusion | Family::Fission => 5,
            Family::Cancel | Family::Scalar => 0,
            _ => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.code().eq_ignore_ascii_case(s) || f.code().split('-').next() == Some(s))
            .ok_or_else(|| Error::parse(0, format!("unknown rule family `{s}`")))
    }
}

/// A concrete bidirectional rule between two pattern diagrams that share
/// their phase variables and boundary signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub id: String,
    pub family: Family,
    pub color: Color,
    pub params: Vec<usize>,
    pub lhs: Diagram<PhaseExpr>,
    pub rhs: Diagram<PhaseExpr>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RuleJson {
    id: String,
    family: Family,
    color: Color,
    params: Vec<usize>,
    lhs: DiagramJson,
    rhs: DiagramJson,
}

impl Serialize for RuleInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RuleJson {
            id: self.id.clone(),
            family: self.family,
            color: self.color,
            params: self.params.clone(),
            lhs: self.lhs.to_json(),
            rhs: self.rhs.to_json(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RuleInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = RuleJson::deserialize(d)?;
        let lhs = Diagram::from_json(&j.lhs).map_err(serde::de::Error::custom)?;
        let rhs = Diagram::from_json(&j.rhs).map_err(serde::de::Error::custom)?;
        RuleInstance::new(j.id, j.family, j.color, j.params, lhs, rhs).map_err(serde::de::Error::custom)
    }
}

impl RuleInstance {
    /// Checks boundary signatures and that both sides use the same phase
    /// variables, so either direction binds everything it needs.
    pub fn new(
        id: String,
        family: Family,
        color: Color,
        params: Vec<usize>,
        lhs: Diagram<PhaseExpr>,
        rhs: Diagram<PhaseExpr>,
    ) -> Result<Self> {
        lhs.validate()?;
        rhs.validate()?;
        if (lhs.n_inputs(), lhs.n_outputs()) != (rhs.n_inputs(), rhs.n_outputs()) {
            return Err(Error::InvalidRule(format!("{id}: boundary signatures differ")));
        }
        let vars = |d: &Diagram<PhaseExpr>| -> BTreeSet<String> {
            d.nodes
                .iter()
                .filter_map(|n| match &n.kind {
                    Kind::Spider { phase, .. } => Some(phase.variables().map(str::to_string).collect::<Vec<_>>()),
                    _ => None,
                })
                .flatten()
                .collect()
        };
        if vars(&lhs) != vars(&rhs) {
            return Err(Error::InvalidRule(format!("{id}: sides use different phase variables")));
        }
        Ok(RuleInstance { id, family, color, params, lhs, rhs })
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for d in [&self.lhs, &self.rhs] {
            for n in &d.nodes {
                if let Kind::Spider { phase, .. } = &n.kind {
                    out.extend(phase.variables().map(str::to_string));
                }
            }
        }
        out
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.lhs.n_inputs(), self.lhs.n_outputs())
    }

    /// Largest declared spider arity on either side.
    pub fn max_spider_arity(&self) -> (usize, usize) {
        let mut a = (0, 0);
        for d in [&self.lhs, &self.rhs] {
            for n in &d.nodes {
                if let Kind::Spider { inputs, outputs, .. } = n.kind {
                    a = (a.0.max(inputs), a.1.max(outputs));
                }
            }
        }
        a
    }

    /// Swaps left- and right-hand sides.
    pub fn reversed(&self) -> RuleInstance {
        RuleInstance { id: format!("{}~", self.id), lhs: self.rhs.clone(), rhs: self.lhs.clone(), ..self.clone() }
    }

    /// Both sides with every phase variable replaced by a concrete phase.
    pub fn concrete(&self, binding: &std::collections::BTreeMap<String, Phase>) -> Result<(Diagram, Diagram)> {
        Ok((self.lhs.map_phases(|p| p.eval(binding))?, self.rhs.map_phases(|p| p.eval(binding))?))
    }

    /// Order-independent canonical key of the unordered pair of sides.
    pub fn pair_key(&self) -> (String, String) {
        let a = self.lhs.canonical().key;
        let b = self.rhs.canonical().key;
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Whether both sides are the same diagram.
    pub fn is_trivial(&self) -> bool {
        self.lhs.canonical().key == self.rhs.canonical().key
    }
}

/// Small builder for pattern diagrams.
struct Build {
    d: Diagram<PhaseExpr>,
    ni: usize,
    no: usize,
}

impl Build {
    fn new() -> Self {
        Build { d: Diagram::empty(), ni: 0, no: 0 }
    }

    fn spider(&mut self, color: Color, phase: PhaseExpr, inputs: usize, outputs: usize) -> usize {
        self.d.add_node(String::new(), Kind::Spider { color, phase, inputs, outputs })
    }

    fn h(&mut self) -> usize {
        self.d.add_node(String::new(), Kind::H)
    }

    fn diamonds(&mut self, k: usize) {
        for _ in 0..k {
            self.d.add_node(String::new(), Kind::Diamond);
        }
    }

    fn wire(&mut self, a: usize, b: usize) {
        self.d.add_wire(a, b);
    }

    fn input(&mut self) -> usize {
        self.ni += 1;
        self.d.add_node(String::new(), Kind::Input(self.ni - 1))
    }

    fn output(&mut self) -> usize {
        self.no += 1;
        self.d.add_node(String::new(), Kind::Output(self.no - 1))
    }

    fn in_to(&mut self, v: usize) {
        let i = self.input();
        self.wire(i, v);
    }

    fn out_from(&mut self, v: usize) {
        let o = self.output();
        self.wire(v, o);
    }

    fn done(self) -> Diagram<PhaseExpr> {
        self.d.renamed()
    }
}

fn c(p: Phase) -> PhaseExpr {
    PhaseExpr::constant(p)
}

fn var(name: &str) -> PhaseExpr {
    PhaseExpr::var(name)
}

fn range_err(family: Family, params: &[usize]) -> Error {
    Error::OutOfRange(format!("{family} does not accept parameters {params:?}"))
}

/// Builds the Z-rooted instance of a family; the X-rooted variant is its
/// colour inversion.
fn z_rooted(family: Family, p: &[usize]) -> Result<(Diagram<PhaseExpr>, Diagram<PhaseExpr>)> {
    if p.len() != family.param_count() {
        return Err(range_err(family, p));
    }
    let z = Color::Z;
    let x = Color::X;
    Ok(match family {
        Family::Fusion => {
            let (n1, m1, n2, m2, k) = (p[0], p[1], p[2], p[3], p[4]);
            if k == 0 || k > m1 || k > n2 {
                return Err(range_err(family, p));
            }
            let mut l = Build::new();
            let s1 = l.spider(z, var("a"), n1, m1);
            let s2 = l.spider(z, var("b"), n2, m2);
            for _ in 0..k {
                l.wire(s1, s2);
            }
            for _ in 0..n1 {
                l.in_to(s1);
            }
            for _ in 0..n2 - k {
                l.in_to(s2);
            }
            for _ in 0..m1 - k {
                l.out_from(s1);
            }
            for _ in 0..m2 {
                l.out_from(s2);
            }
            let mut r = Build::new();
            let s = r.spider(z, var("a") + var("b"), n1 + n2 - k, m1 - k + m2);
            for _ in 0..n1 + n2 - k {
                r.in_to(s);
            }
            for _ in 0..m1 - k + m2 {
                r.out_from(s);
            }
            (l.done(), r.done())
        }
        Family::Fission => {
            let (n, m, k, n1, m2) = (p[0], p[1], p[2], p[3], p[4]);
            if k == 0 || n1 > n || m2 > m {
                return Err(range_err(family, p));
            }
            let (l, r) = z_rooted(Family::Fusion, &[n1, m - m2 + k, k + n - n1, m2, k])?;
            (r, l)
        }
        Family::Identity => {
            let (n, m) = (p[0], p[1]);
            if n + m != 2 {
                return Err(range_err(family, p));
            }
            let mut l = Build::new();
            let s = l.spider(z, c(Phase::ZERO), n, m);
            for _ in 0..n {
                l.in_to(s);
            }
            for _ in 0..m {
                l.out_from(s);
            }
            let mut r = Build::new();
            let mut ends = Vec::new();
            for _ in 0..n {
                ends.push(r.input());
            }
            for _ in 0..m {
                ends.push(r.output());
            }
            r.wire(ends[0], ends[1]);
            (l.done(), r.done())
        }
        Family::Copy => {
            let (n, m) = (p[0], p[1]);
            if n + m < 2 {
                return Err(range_err(family, p));
            }
            let mut l = Build::new();
            let s = l.spider(x, c(Phase::ZERO), n, m);
            let st = l.spider(z, c(Phase::ZERO), 0, 1);
            l.wire(st, s);
            let (ri, ro) = if n >= 1 { (n - 1, m) } else { (0, m - 1) };
            for _ in 0..ri {
                l.in_to(s);
            }
            for _ in 0..ro {
                l.out_from(s);
            }
            l.diamonds(n + m - 2);
            let mut r = Build::new();
            for _ in 0..ri {
                let e = r.spider(z, c(Phase::ZERO), 1, 0);
                r.in_to(e);
            }
            for _ in 0..ro {
                let e = r.spider(z, c(Phase::ZERO), 0, 1);
                r.out_from(e);
            }
            (l.done(), r.done())
        }
        Family::Bialgebra | Family::BialgebraPiX | Family::BialgebraPiZ => {
            let (n, m) = (p[0], p[1]);
            let (alpha, beta) = match family {
                Family::Bialgebra => (Phase::ZERO, Phase::ZERO),
                Family::BialgebraPiX => (Phase::ZERO, Phase::PI),
                _ => (Phase::PI, Phase::ZERO),
            };
            // merge side = √2^{(n-1)(m-1)} · bipartite side
            let e = (n as i64 - 1) * (m as i64 - 1);
            let mut l = Build::new();
            let zs: Vec<usize> = (0..n).map(|_| l.spider(z, c(alpha), 1, m)).collect();
            let xs: Vec<usize> = (0..m).map(|_| l.spider(x, c(beta), n, 1)).collect();
            for &a in &zs {
                for &b in &xs {
                    l.wire(a, b);
                }
            }
            for &a in &zs {
                l.in_to(a);
            }
            for &b in &xs {
                l.out_from(b);
            }
            l.diamonds(e.max(0) as usize);
            let mut r = Build::new();
            let xm = r.spider(x, c(beta), n, 1);
            let zm = r.spider(z, c(alpha), 1, m);
            r.wire(xm, zm);
            for _ in 0..n {
                r.in_to(xm);
            }
            for _ in 0..m {
                r.out_from(zm);
            }
            r.diamonds((-e).max(0) as usize);
            (l.done(), r.done())
        }
        Family::PiCopy | Family::PhaseFlip => {
            let (n, m) = (p[0], p[1]);
            if n + m == 0 {
                return Err(range_err(family, p));
            }
            let flip = family == Family::PhaseFlip;
            let alpha = if flip { var("a") } else { c(Phase::ZERO) };
            // the NOT sits on the first input, or on the first output when n = 0
            let mut l = Build::new();
            let s = l.spider(z, alpha.clone(), n, m);
            let not = l.spider(x, c(Phase::PI), 1, 1);
            l.wire(not, s);
            if n >= 1 {
                l.in_to(not);
                for _ in 1..n {
                    l.in_to(s);
                }
                for _ in 0..m {
                    l.out_from(s);
                }
            } else {
                l.out_from(not);
                for _ in 1..m {
                    l.out_from(s);
                }
            }
            let mut r = Build::new();
            let s = r.spider(z, if flip { -alpha.clone() } else { alpha.clone() }, n, m);
            let first_in = n >= 1;
            if first_in {
                let i = r.input();
                r.wire(i, s);
            } else {
                let o = r.output();
                r.wire(s, o);
            }
            for _ in (first_in as usize)..n {
                let not = r.spider(x, c(Phase::PI), 1, 1);
                r.in_to(not);
                r.wire(not, s);
            }
            for _ in (!first_in as usize)..m {
                let not = r.spider(x, c(Phase::PI), 1, 1);
                r.wire(s, not);
                r.out_from(not);
            }
            if flip {
                // e^{iα}: a phased state meeting a π effect, over one diamond
                let st = r.spider(z, alpha, 0, 1);
                let ef = r.spider(x, c(Phase::PI), 1, 0);
                r.wire(st, ef);
                l.diamonds(1);
            }
            (l.done(), r.done())
        }
        Family::ColorChange => {
            let (n, m) = (p[0], p[1]);
            let mut l = Build::new();
            let s = l.spider(z, var("a"), n, m);
            for _ in 0..n {
                l.in_to(s);
            }
            for _ in 0..m {
                l.out_from(s);
            }
            let mut r = Build::new();
            let s = r.spider(x, var("a"), n, m);
            for _ in 0..n {
                let h = r.h();
                r.in_to(h);
                r.wire(h, s);
            }
            for _ in 0..m {
                let h = r.h();
                r.wire(s, h);
                r.out_from(h);
            }
            (l.done(), r.done())
        }
        Family::Cancel => {
            let mut l = Build::new();
            let st = l.spider(z, c(Phase::ZERO), 0, 1);
            let ef = l.spider(x, c(Phase::ZERO), 1, 0);
            l.wire(st, ef);
            let mut r = Build::new();
            r.diamonds(1);
            (l.done(), r.done())
        }
        Family::Scalar => {
            let mut l = Build::new();
            l.diamonds(2);
            let mut r = Build::new().done();
            r.loops = 1;
            (l.done(), r)
        }
    })
}

/// A concrete instance of a family in the given colour variant.
pub fn instantiate(family: Family, color: Color, params: &[usize]) -> Result<RuleInstance> {
    let (lhs, rhs) = z_rooted(family, params)?;
    let (lhs, rhs) = match color {
        Color::Z => (lhs, rhs),
        Color::X => (lhs.color_invert(), rhs.color_invert()),
    };
    let ps: Vec<String> = params.iter().map(usize::to_string).collect();
    let id = format!("{}[{:?};{}]", family.code(), color, ps.join(","));
    RuleInstance::new(id, family, color, params.to_vec(), lhs, rhs)
}

/// The `(n + 1)(m + 1)` fission rules of an `n → m` spider for `k`
/// connecting wires.
pub fn fission_rules(color: Color, n: usize, m: usize, k: usize) -> Result<Vec<RuleInstance>> {
    let mut out = Vec::new();
    for n1 in 0..=n {
        for m2 in 0..=m {
            out.push(instantiate(Family::Fission, color, &[n, m, k, n1, m2])?);
        }
    }
    Ok(out)
}

/// Every parameter tuple of a family whose spiders have at most `bound`
/// inputs and outputs each.
pub fn parameter_space(family: Family, bound: usize) -> Vec<Vec<usize>> {
    let b = bound;
    let mut out = Vec::new();
    match family {
        Family::Fusion => {
            for n1 in 0..=b {
                for m1 in 1..=b {
                    for n2 in 1..=b {
                        for m2 in 0..=b {
                            for k in 1..=m1.min(n2) {
                                // the fused spider must also fit
                                if n1 + n2 - k <= b && m1 - k + m2 <= b {
                                    out.push(vec![n1, m1, n2, m2, k]);
                                }
                            }
                        }
                    }
                }
            }
        }
        Family::Fission => {
            for n in 0..=b {
                for m in 0..=b {
                    for k in 1..=b {
                        for n1 in 0..=n {
                            for m2 in 0..=m {
                                // both parts must fit
                                if m - m2 + k <= b && k + n - n1 <= b {
                                    out.push(vec![n, m, k, n1, m2]);
                                }
                            }
                        }
                    }
                }
            }
        }
        Family::Identity => {
            for (n, m) in [(2, 0), (1, 1), (0, 2)] {
                if n <= b && m <= b {
                    out.push(vec![n, m]);
                }
            }
        }
        Family::Copy => pairs(b, |n, m| n + m >= 2, &mut out),
        Family::PiCopy | Family::PhaseFlip => pairs(b, |n, m| n + m >= 1, &mut out),
        Family::Bialgebra | Family::BialgebraPiX | Family::BialgebraPiZ | Family::ColorChange => {
            pairs(b, |_, _| true, &mut out)
        }
        Family::Cancel | Family::Scalar => out.push(Vec::new()),
    }
    out
}

fn pairs(b: usize, keep: impl Fn(usize, usize) -> bool, out: &mut Vec<Vec<usize>>) {
    for n in 0..=b {
        for m in 0..=b {
            if keep(n, m) {
                out.push(vec![n, m]);
            }
        }
    }
}

/// All instances with boundary arity within `(max_in, max_out)` and every
/// spider within `max(max_in, max_out, 1)` inputs and outputs, over every
/// family and both colours. Trivial rules are dropped and rules equal as
/// unordered pairs of canonical sides are kept once, first occurrence wins.
pub fn enumerate_rules(max_in: usize, max_out: usize) -> Vec<RuleInstance> {
    let bound = max_in.max(max_out).max(1);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for family in Family::ENUMERATION_ORDER {
        for params in parameter_space(family, bound) {
            for color in [Color::Z, Color::X] {
                let Ok(rule) = instantiate(family, color, &params) else { continue };
                let (ni, no) = rule.arity();
                if ni > max_in || no > max_out || rule.is_trivial() {
                    continue;
                }
                let (si, so) = rule.max_spider_arity();
                if si > bound || so > bound {
                    continue;
                }
                if seen.insert(rule.pair_key()) {
                    out.push(rule);
                }
            }
        }
    }
    out
}
