//! Charges, the four discharging rules, and the charge-sum audit.
//!
//! Charges are integers counting quarter units, so every transfer is exact.
//! Vertices start at `2d(v) - 6` and faces at `d(f) - 6`; the initial total
//! is `-6 (|V| - |E| + |F|)`, zero on the torus.
//!
//! Rule recipients as implemented:
//!
//! * R1: every vertex sends 1/2 per corner on a 4-face; a non-convenient
//!   vertex also sends 1/2 per corner on a 5-face.
//! * R2: every 4+-vertex sends 3/2, 5/4 or 1 to each adjacent bad, semi-bad
//!   or non-bad 2-vertex.
//! * R3: a non-convenient vertex sends 1 to each adjacent 5_3-vertex poor to
//!   it and 1/2 to each other adjacent convenient vertex.
//! * R4: a non-convenient 6+-vertex sends 1/4 to each adjacent
//!   non-convenient 4-vertex that has exactly one convenient neighbor. The
//!   rule's recipient is read from how the non-negativity check of 4-vertices
//!   uses it; a literal reading ("adjacent to one non-convenient vertex")
//!   would not pay the 4-vertices that need it.

use std::fmt;
use std::fmt::Write as _;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use crate::classify::{screens, Badness, Classification, ScreenMatch};
use crate::embedding::{Embedding, FaceId};
use crate::graph::Vertex;

/// An exact charge in quarter units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Charge(pub i64);

impl Charge {
    pub const ZERO: Charge = Charge(0);

    pub fn from_whole(n: i64) -> Self {
        Charge(4 * n)
    }

    pub fn quarters(n: i64) -> Self {
        Charge(n)
    }

    /// Reduced `(numerator, denominator)`.
    pub fn as_fraction(self) -> (i64, i64) {
        let mut num = self.0;
        let mut den = 4;
        while den > 1 && num % 2 == 0 {
            num /= 2;
            den /= 2;
        }
        (num, den)
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_fraction() {
            (n, 1) => write!(f, "{n}"),
            (n, d) => write!(f, "{n}/{d}"),
        }
    }
}

impl Add for Charge {
    type Output = Charge;
    fn add(self, rhs: Charge) -> Charge {
        Charge(self.0 + rhs.0)
    }
}

impl Sub for Charge {
    type Output = Charge;
    fn sub(self, rhs: Charge) -> Charge {
        Charge(self.0 - rhs.0)
    }
}

impl Neg for Charge {
    type Output = Charge;
    fn neg(self) -> Charge {
        Charge(-self.0)
    }
}

impl AddAssign for Charge {
    fn add_assign(&mut self, rhs: Charge) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Charge {
    fn sub_assign(&mut self, rhs: Charge) {
        self.0 -= rhs.0;
    }
}

impl std::iter::Sum for Charge {
    fn sum<I: Iterator<Item = Charge>>(iter: I) -> Charge {
        iter.fold(Charge::ZERO, Add::add)
    }
}

const HALF: Charge = Charge(2);
const QUARTER: Charge = Charge(1);
const ONE: Charge = Charge(4);
const FIVE_QUARTERS: Charge = Charge(5);
const THREE_HALVES: Charge = Charge(6);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Vertex(Vertex),
    Face(FaceId),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Vertex(v) => write!(f, "v{v}"),
            Element::Face(id) => write!(f, "f{id}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3 => "R3",
            Rule::R4 => "R4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transfer {
    pub rule: Rule,
    pub from: Element,
    pub to: Element,
    pub amount: Charge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeLedger {
    pub vertex_initial: Vec<Charge>,
    pub face_initial: Vec<Charge>,
    pub transfers: Vec<Transfer>,
    pub vertex_final: Vec<Charge>,
    pub face_final: Vec<Charge>,
}

impl ChargeLedger {
    pub fn initial(&self, e: Element) -> Charge {
        match e {
            Element::Vertex(v) => self.vertex_initial[v],
            Element::Face(f) => self.face_initial[f],
        }
    }

    pub fn final_charge(&self, e: Element) -> Charge {
        match e {
            Element::Vertex(v) => self.vertex_final[v],
            Element::Face(f) => self.face_final[f],
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.vertex_initial.len())
            .map(Element::Vertex)
            .chain((0..self.face_initial.len()).map(Element::Face))
    }

    pub fn total_initial(&self) -> Charge {
        self.vertex_initial.iter().chain(&self.face_initial).copied().sum()
    }

    pub fn total_final(&self) -> Charge {
        self.vertex_final.iter().chain(&self.face_final).copied().sum()
    }

    pub fn transfers_involving(&self, e: Element) -> impl Iterator<Item = &Transfer> + '_ {
        self.transfers.iter().filter(move |t| t.from == e || t.to == e)
    }

    /// Recomputes `initial - sent + received` for `e` from the transfer log.
    pub fn recompute(&self, e: Element) -> Charge {
        let mut c = self.initial(e);
        for t in &self.transfers {
            if t.from == e {
                c -= t.amount;
            }
            if t.to == e {
                c += t.amount;
            }
        }
        c
    }

    /// Every element's final charge agrees with the transfer log.
    pub fn balanced(&self) -> bool {
        let mut acc: Vec<Charge> = self.vertex_initial.iter().chain(&self.face_initial).copied().collect();
        let nv = self.vertex_initial.len();
        let slot = |e: Element| match e {
            Element::Vertex(v) => v,
            Element::Face(f) => nv + f,
        };
        for t in &self.transfers {
            acc[slot(t.from)] -= t.amount;
            acc[slot(t.to)] += t.amount;
        }
        self.elements().all(|e| acc[slot(e)] == self.final_charge(e))
    }

    /// `initial`, `transfer`, and `final` lines.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for e in self.elements() {
            let _ = writeln!(out, "initial {e} : {}", self.initial(e));
        }
        for t in &self.transfers {
            let _ = writeln!(out, "transfer {} {} -> {} : {}", t.rule, t.from, t.to, t.amount);
        }
        for e in self.elements() {
            let _ = writeln!(out, "final {e} : {}", self.final_charge(e));
        }
        out
    }

    pub fn dump_tsv(&self) -> String {
        let mut out = String::from("kind\trule\tfrom\tto\tamount\n");
        for e in self.elements() {
            let _ = writeln!(out, "initial\t\t{e}\t\t{}", self.initial(e));
        }
        for t in &self.transfers {
            let _ = writeln!(out, "transfer\t{}\t{}\t{}\t{}", t.rule, t.from, t.to, t.amount);
        }
        for e in self.elements() {
            let _ = writeln!(out, "final\t\t{e}\t\t{}", self.final_charge(e));
        }
        out
    }
}

pub fn initial_charges(emb: &Embedding) -> ChargeLedger {
    let g = emb.graph();
    let vertex_initial: Vec<Charge> = g.vertices().map(|v| Charge::from_whole(2 * g.degree(v) as i64 - 6)).collect();
    let face_initial: Vec<Charge> =
        emb.faces.faces().iter().map(|f| Charge::from_whole(f.degree() as i64 - 6)).collect();
    ChargeLedger {
        vertex_final: vertex_initial.clone(),
        face_final: face_initial.clone(),
        vertex_initial,
        face_initial,
        transfers: Vec::new(),
    }
}

pub fn apply_rules(emb: &Embedding, cls: &Classification) -> ChargeLedger {
    let g = emb.graph();
    let vc = &cls.vertices;
    let mut transfers = Vec::new();

    for v in g.vertices() {
        for f in emb.incidence.vertex_faces(v) {
            let d = emb.face_degree(f);
            if d == 4 || (d == 5 && vc[v].non_convenient()) {
                transfers.push(Transfer { rule: Rule::R1, from: Element::Vertex(v), to: Element::Face(f), amount: HALF });
            }
        }
    }
    for v in g.vertices().filter(|&v| g.degree(v) >= 4) {
        for &w in g.neighbors(v) {
            let amount = match cls.badness(w) {
                Some(Badness::Bad) => THREE_HALVES,
                Some(Badness::SemiBad) => FIVE_QUARTERS,
                Some(Badness::NonBad) => ONE,
                None => continue,
            };
            transfers.push(Transfer { rule: Rule::R2, from: Element::Vertex(v), to: Element::Vertex(w), amount });
        }
    }
    for v in g.vertices().filter(|&v| vc[v].non_convenient()) {
        for &w in g.neighbors(v) {
            let amount = if cls.is_poor_to(w, v) {
                ONE
            } else if vc[w].convenient {
                HALF
            } else {
                continue;
            };
            transfers.push(Transfer { rule: Rule::R3, from: Element::Vertex(v), to: Element::Vertex(w), amount });
        }
    }
    for v in g.vertices().filter(|&v| vc[v].non_convenient() && vc[v].degree >= 6) {
        for &w in g.neighbors(v) {
            if r4_recipient(g, cls, w) {
                transfers.push(Transfer { rule: Rule::R4, from: Element::Vertex(v), to: Element::Vertex(w), amount: QUARTER });
            }
        }
    }

    let mut ledger = initial_charges(emb);
    for t in &transfers {
        match t.from {
            Element::Vertex(v) => ledger.vertex_final[v] -= t.amount,
            Element::Face(f) => ledger.face_final[f] -= t.amount,
        }
        match t.to {
            Element::Vertex(v) => ledger.vertex_final[v] += t.amount,
            Element::Face(f) => ledger.face_final[f] += t.amount,
        }
    }
    ledger.transfers = transfers;
    ledger
}

/// Non-convenient 4-vertex with exactly one convenient neighbor.
fn r4_recipient(g: &crate::graph::Graph, cls: &Classification, w: Vertex) -> bool {
    let c = &cls.vertices[w];
    c.non_convenient()
        && c.degree == 4
        && g.neighbors(w).iter().filter(|&&x| cls.vertices[x].convenient).count() == 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeElement {
    pub element: Element,
    pub charge: Charge,
    pub context: String,
    /// Screens that contain this element.
    pub screens: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub euler_characteristic: i64,
    pub total_initial: Charge,
    pub total_final: Charge,
    pub expected_total: Charge,
    pub conserved: bool,
    pub balanced: bool,
    pub negatives: Vec<NegativeElement>,
    pub ledger: ChargeLedger,
}

impl AuditReport {
    pub fn identity_holds(&self) -> bool {
        self.total_initial == self.expected_total && self.total_final == self.expected_total
    }

    pub fn passes(&self) -> bool {
        self.identity_holds() && self.conserved && self.balanced && self.negatives.is_empty()
    }

    pub fn summary(&self) -> String {
        let (num, den) = self.total_final.as_fraction();
        let mut out = format!("total = {num}/{den} (χ={}); negatives: ", self.euler_characteristic);
        if self.negatives.is_empty() {
            out.push_str("none");
        } else {
            let parts: Vec<String> = self
                .negatives
                .iter()
                .map(|n| {
                    let screens = if n.screens.is_empty() { "unmatched".to_string() } else { n.screens.join(",") };
                    format!("{} ({}) [{}]", n.element, n.charge, screens)
                })
                .collect();
            out.push_str(&parts.join("; "));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = self.summary();
        out.push('\n');
        let _ = writeln!(out, "initial total = {}; expected -6χ = {}", self.total_initial, self.expected_total);
        let _ = writeln!(out, "conservation: {}", if self.conserved && self.balanced { "ok" } else { "VIOLATED" });
        for n in &self.negatives {
            let _ = writeln!(out, "negative {} : {} ({})", n.element, n.charge, n.context);
        }
        out
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("kind\tkey\tvalue\tcontext\tscreens\n");
        let _ = writeln!(out, "metric\tchi\t{}\t\t", self.euler_characteristic);
        let _ = writeln!(out, "metric\ttotal_initial\t{}\t\t", self.total_initial);
        let _ = writeln!(out, "metric\ttotal_final\t{}\t\t", self.total_final);
        let _ = writeln!(out, "metric\texpected_total\t{}\t\t", self.expected_total);
        let _ = writeln!(out, "metric\tconserved\t{}\t\t", self.conserved && self.balanced);
        let _ = writeln!(out, "metric\tnegatives\t{}\t\t", self.negatives.len());
        for n in &self.negatives {
            let _ = writeln!(out, "negative\t{}\t{}\t{}\t{}", n.element, n.charge, n.context, n.screens.join(","));
        }
        out
    }
}

pub fn audit(emb: &Embedding) -> AuditReport {
    let cls = Classification::new(emb);
    let ledger = apply_rules(emb, &cls);
    let matches = screens(emb, &cls);
    let chi = emb.euler_characteristic();
    let g = emb.graph();

    let mut negatives = Vec::new();
    for e in ledger.elements() {
        let charge = ledger.final_charge(e);
        if !charge.is_negative() {
            continue;
        }
        let (context, hits): (String, Vec<&ScreenMatch>) = match e {
            Element::Vertex(v) => {
                let c = &cls.vertices[v];
                let ctx = format!("{}_{}-vertex, {}", c.degree, c.two_neighbors, c.role.as_str());
                (ctx, matches.iter().filter(|m| m.involves_vertex(v)).collect())
            }
            Element::Face(f) => {
                let fc = &cls.faces[f];
                let vec: Vec<String> = fc.degree_vector.iter().map(usize::to_string).collect();
                let ctx = format!("{}_{}-face ({})", fc.degree, fc.two_vertices, vec.join(","));
                let boundary = emb.faces.face(f).distinct_vertices();
                let hits = matches
                    .iter()
                    .filter(|m| m.face == Some(f) || boundary.iter().any(|&v| m.involves_vertex(v)))
                    .collect();
                (ctx, hits)
            }
        };
        let mut names: Vec<String> = hits.iter().map(|m| m.screen.as_str().to_string()).collect();
        names.dedup();
        negatives.push(NegativeElement { element: e, charge, context, screens: names });
    }
    debug_assert!(g.vertex_count() == ledger.vertex_initial.len());

    AuditReport {
        euler_characteristic: chi,
        total_initial: ledger.total_initial(),
        total_final: ledger.total_final(),
        expected_total: Charge::from_whole(-6 * chi),
        conserved: ledger.total_initial() == ledger.total_final(),
        balanced: ledger.balanced(),
        negatives,
        ledger,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::tests::{poor_fixture, torus_grid};
    use crate::embedding::RotationSystem;

    fn ledger_for(rs: RotationSystem) -> (Embedding, Classification, ChargeLedger) {
        let emb = Embedding::new(rs).unwrap();
        let cls = Classification::new(&emb);
        let ledger = apply_rules(&emb, &cls);
        (emb, cls, ledger)
    }

    #[test]
    fn charge_display() {
        assert_eq!(Charge(6).to_string(), "3/2");
        assert_eq!(Charge(5).to_string(), "5/4");
        assert_eq!(Charge(-8).to_string(), "-2");
        assert_eq!(Charge(0).as_fraction(), (0, 1));
        assert_eq!(Charge(-2).to_string(), "-1/2");
    }

    #[test]
    fn initial_charge_values() {
        let rs = torus_grid(4, 4);
        let (sub, w) = rs.subdivide_edge(0, 1).unwrap();
        let emb = Embedding::new(sub).unwrap();
        let l = initial_charges(&emb);
        assert_eq!(l.vertex_initial[0], Charge::from_whole(2));
        assert_eq!(l.vertex_initial[w], Charge::from_whole(-2));
        let four = (0..emb.faces.len()).find(|&f| emb.face_degree(f) == 4).unwrap();
        assert_eq!(l.face_initial[four], Charge::from_whole(-2));

        let grid = Embedding::new(torus_grid(4, 4)).unwrap();
        assert_eq!(initial_charges(&grid).total_initial(), Charge::ZERO);

        let c4 = RotationSystem::new(vec![vec![1, 3], vec![2, 0], vec![3, 1], vec![0, 2]]).unwrap();
        let c4 = Embedding::new(c4).unwrap();
        assert_eq!(initial_charges(&c4).total_initial(), Charge::from_whole(-12));
    }

    #[test]
    fn six_face_charge_is_zero() {
        // Subdividing two edges of one grid face gives a 6-face.
        let rs = torus_grid(4, 4);
        let (a, _) = rs.subdivide_edge(0, 1).unwrap();
        let (b, _) = a.subdivide_edge(4, 5).unwrap();
        let emb = Embedding::new(b).unwrap();
        let six = (0..emb.faces.len()).find(|&f| emb.face_degree(f) == 6).unwrap();
        assert_eq!(initial_charges(&emb).face_initial[six], Charge::ZERO);
    }

    #[test]
    fn grid_discharges_to_zero() {
        let (_, _, l) = ledger_for(torus_grid(4, 4));
        assert!(l.vertex_final.iter().chain(&l.face_final).all(|&c| c == Charge::ZERO));
        assert!(l.transfers.iter().all(|t| t.rule == Rule::R1 && t.amount == HALF));
        assert_eq!(l.transfers.len(), 64);
    }

    #[test]
    fn bad_two_vertex_final_is_zero() {
        let (chord, x) = torus_grid(4, 4).insert_two_path((1, 0), (4, 5)).unwrap();
        let (_, cls, l) = ledger_for(chord);
        assert_eq!(cls.badness(x), Some(Badness::Bad));
        assert_eq!(l.vertex_final[x], Charge::ZERO);
        let received: Vec<_> = l.transfers.iter().filter(|t| t.to == Element::Vertex(x)).map(|t| t.amount).collect();
        assert_eq!(received, vec![THREE_HALVES, THREE_HALVES]);
    }

    #[test]
    fn semi_bad_two_vertex_final_is_zero() {
        let (chord, x) = torus_grid(4, 4).insert_two_path((1, 0), (4, 5)).unwrap();
        let (semi, _) = chord.subdivide_edge(0, 4).unwrap();
        let (_, cls, l) = ledger_for(semi);
        assert_eq!(cls.badness(x), Some(Badness::SemiBad));
        assert_eq!(l.vertex_final[x], Charge::ZERO);
    }

    #[test]
    fn non_bad_two_vertex_final_is_zero() {
        let (sub, w) = torus_grid(4, 4).subdivide_edge(0, 1).unwrap();
        let (_, _, l) = ledger_for(sub);
        assert_eq!(l.vertex_final[w], Charge::ZERO);
    }

    #[test]
    fn poor_vertex_gets_one_from_beneficiary() {
        let (_, _, l) = ledger_for(poor_fixture());
        let r3: Vec<_> = l
            .transfers
            .iter()
            .filter(|t| t.rule == Rule::R3 && t.to == Element::Vertex(0))
            .map(|t| (t.from, t.amount))
            .collect();
        assert!(r3.contains(&(Element::Vertex(15), ONE)));
        assert!(!r3.iter().any(|&(from, a)| from == Element::Vertex(15) && a == HALF));
    }

    #[test]
    fn r4_pays_non_convenient_four_vertex_with_one_convenient_neighbor() {
        // Subdividing 1-2 makes 1 convenient, so 5 has exactly one convenient neighbor.
        let (sub, _) = torus_grid(4, 4).subdivide_edge(1, 2).unwrap();
        let emb = Embedding::new(sub).unwrap();
        let cls = Classification::new(&emb);
        assert!(r4_recipient(emb.graph(), &cls, 5));
        assert!(!r4_recipient(emb.graph(), &cls, 10));
        assert!(!r4_recipient(emb.graph(), &cls, 1));
    }

    #[test]
    fn subdivided_grid_audit() {
        let (sub, _) = torus_grid(4, 4).subdivide_edge(0, 1).unwrap();
        let report = audit(&Embedding::new(sub).unwrap());
        assert!(report.identity_holds());
        assert!(report.conserved && report.balanced);
        assert_eq!(report.euler_characteristic, 0);
        // The two 5-faces keep -1 + 1/2 * (non-convenient corners); every
        // negative element must map to at least one screen.
        for n in &report.negatives {
            assert!(!n.screens.is_empty(), "{} unmatched", n.element);
        }
    }

    #[test]
    fn grid_audit_summary() {
        let report = audit(&Embedding::new(torus_grid(4, 4)).unwrap());
        assert_eq!(report.summary(), "total = 0/1 (χ=0); negatives: none");
    }

    #[test]
    fn ledger_recompute_matches_final() {
        let (_, _, l) = ledger_for(poor_fixture());
        for e in l.elements() {
            assert_eq!(l.recompute(e), l.final_charge(e));
        }
    }
}
