//! The structure-constants file format: one self-describing textual format
//! for every structure kind, with a versioned header, decimal integers and
//! rationals (no floats), and deterministic serialization.
//!
//! ```text
//! homalg v1
//! kind linfty            # linfty | ainfty | morphism | co | complex | system
//! ring Z                 # Z | Q | Z/n
//! grading 1              # rank r, then iota and parity vectors of length r
//! iota 1
//! parity 1
//! cap d 4                # optional caps: d, k, length
//! shifts 1 1/2           # optional action-filtration shifts δ_ν
//! object L0              # ainfty/co targets
//! section source         # morphism/co files: source and target blocks
//! gen z deg 0 action 3/2 level 1 t 0 hom L0 L1
//! op l 2
//!   x y -> z -1 w 2
//! end
//! op co 1 2
//!   z ; a b -> c 1
//! end
//! ```
//!
//! Hom-chain inputs are written ascending: in `op mu k` and the open part of
//! `op co d k`, the i-th listed id lies in hom(L_{i−1}, L_i). Entries of
//! graded-symmetric tables (`l`, `F`, and the closed part of `co`) are written
//! on canonically sorted keys (sorted by first occurrence order of the
//! generators in the file).

use crate::ainfty::{AInftyCategory, AInftyError};
use crate::co::{ClosedOpenData, CoError, CoOp};
use crate::grading::{Degree, GradingDatum};
use crate::linalg::BoundedComplex;
use crate::linfty::{Convention, LInftyMorphism, LInftyStructure, LinftyError};
use crate::module::{Generator, GradedModule, ModuleError};
use crate::multilinear::{MultilinearOp, OpError, Symmetry};
use crate::ring::{parse_rational, show_rational, Ring, SparseVec};
use crate::telescope::{DirectedSystem, FilteredStructure, TelescopeError};
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum FileKind {
    Linfty,
    Ainfty,
    Morphism,
    Co,
    Complex,
    System,
}

impl FileKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "linfty" => FileKind::Linfty,
            "ainfty" => FileKind::Ainfty,
            "morphism" => FileKind::Morphism,
            "co" => FileKind::Co,
            "complex" => FileKind::Complex,
            "system" => FileKind::System,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            FileKind::Linfty => "linfty",
            FileKind::Ainfty => "ainfty",
            FileKind::Morphism => "morphism",
            FileKind::Co => "co",
            FileKind::Complex => "complex",
            FileKind::System => "system",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Section {
    Main,
    Source,
    Target,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenDecl {
    pub section: Section,
    pub id: String,
    pub deg: Vec<i64>,
    pub action: Option<BigRational>,
    pub level: Option<u32>,
    pub t: u8,
    pub hom: Option<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum OpKey {
    L(usize),
    Mu(usize),
    Co(usize, usize),
    F(usize),
    Kappa(u32),
    Delta(Option<u32>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntryDecl {
    pub inputs: Vec<String>,
    /// The open part of a co entry (after the ';').
    pub open_inputs: Option<Vec<String>>,
    pub outputs: Vec<(String, BigRational)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpDecl {
    pub section: Section,
    pub key: OpKey,
    pub entries: Vec<EntryDecl>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureFile {
    pub kind: FileKind,
    pub ring: Ring,
    pub rank: usize,
    pub iota: Vec<i64>,
    pub parity: Vec<u8>,
    pub caps: BTreeMap<String, usize>,
    pub shifts: Vec<BigRational>,
    pub objects: Vec<String>,
    pub gens: Vec<GenDecl>,
    pub ops: Vec<OpDecl>,
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("missing header field {0}")]
    MissingHeader(&'static str),
    #[error("file kind {0} does not support this operation")]
    WrongKind(&'static str),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Grading(#[from] crate::grading::GradingError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Linfty(#[from] LinftyError),
    #[error(transparent)]
    AInfty(#[from] AInftyError),
    #[error(transparent)]
    Co(#[from] CoError),
    #[error(transparent)]
    Telescope(#[from] TelescopeError),
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("validation: {0}")]
    Validation(String),
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

pub fn parse(text: &str) -> Result<StructureFile, FormatError> {
    let mut kind = None;
    let mut ring = None;
    let mut rank = None;
    let mut iota = None;
    let mut parity = None;
    let mut caps = BTreeMap::new();
    let mut shifts = Vec::new();
    let mut objects = Vec::new();
    let mut gens: Vec<GenDecl> = Vec::new();
    let mut ops: Vec<OpDecl> = Vec::new();
    let mut section = Section::Main;
    let mut current_op: Option<OpDecl> = None;
    let mut header_seen = false;

    let err = |n: usize, m: &str| FormatError::Parse(n + 1, m.to_string());

    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if !header_seen {
            if toks != ["homalg", "v1"] {
                return Err(err(n, "expected header line 'homalg v1'"));
            }
            header_seen = true;
            continue;
        }
        if let Some(op) = current_op.as_mut() {
            if toks == ["end"] {
                ops.push(current_op.take().unwrap());
                continue;
            }
            // entry line: inputs [';' open-inputs] '->' (out coeff)*
            let arrow = toks
                .iter()
                .position(|&t| t == "->")
                .ok_or_else(|| err(n, "entry line needs '->'"))?;
            let (lhs, rhs) = toks.split_at(arrow);
            let rhs = &rhs[1..];
            if rhs.len() % 2 != 0 {
                return Err(err(n, "outputs must be id/coefficient pairs"));
            }
            let mut outputs = Vec::new();
            for pair in rhs.chunks(2) {
                let c = parse_rational(pair[1])
                    .ok_or_else(|| err(n, &format!("bad coefficient {}", pair[1])))?;
                outputs.push((pair[0].to_string(), c));
            }
            let (inputs, open_inputs) = match lhs.iter().position(|&t| t == ";") {
                Some(semi) => (
                    lhs[..semi].iter().map(|s| s.to_string()).collect(),
                    Some(lhs[semi + 1..].iter().map(|s| s.to_string()).collect()),
                ),
                None => (lhs.iter().map(|s| s.to_string()).collect(), None),
            };
            op.entries.push(EntryDecl {
                inputs,
                open_inputs,
                outputs,
            });
            continue;
        }
        match toks[0] {
            "kind" if toks.len() == 2 => {
                kind = Some(FileKind::parse(toks[1]).ok_or_else(|| err(n, "unknown kind"))?);
            }
            "ring" if toks.len() == 2 => {
                ring = Some(Ring::parse(toks[1]).ok_or_else(|| err(n, "unknown ring"))?);
            }
            "grading" if toks.len() == 2 => {
                rank = Some(toks[1].parse().map_err(|_| err(n, "bad rank"))?);
            }
            "iota" => {
                iota = Some(
                    toks[1..]
                        .iter()
                        .map(|t| t.parse().map_err(|_| err(n, "bad iota entry")))
                        .collect::<Result<Vec<i64>, _>>()?,
                );
            }
            "parity" => {
                parity = Some(
                    toks[1..]
                        .iter()
                        .map(|t| t.parse().map_err(|_| err(n, "bad parity entry")))
                        .collect::<Result<Vec<u8>, _>>()?,
                );
            }
            "cap" if toks.len() == 3 => {
                if !["d", "k", "length"].contains(&toks[1]) {
                    return Err(err(n, "cap key must be d, k or length"));
                }
                caps.insert(
                    toks[1].to_string(),
                    toks[2].parse().map_err(|_| err(n, "bad cap"))?,
                );
            }
            "shifts" => {
                shifts = toks[1..]
                    .iter()
                    .map(|t| parse_rational(t).ok_or_else(|| err(n, "bad shift")))
                    .collect::<Result<_, _>>()?;
            }
            "object" if toks.len() == 2 => objects.push(toks[1].to_string()),
            "section" if toks.len() == 2 => {
                section = match toks[1] {
                    "source" => Section::Source,
                    "target" => Section::Target,
                    "main" => Section::Main,
                    _ => return Err(err(n, "unknown section")),
                };
            }
            "gen" => {
                let mut it = toks[1..].iter();
                let id = it
                    .next()
                    .ok_or_else(|| err(n, "gen needs an id"))?
                    .to_string();
                let mut deg = None;
                let mut action = None;
                let mut level = None;
                let mut t = 0u8;
                let mut hom = None;
                while let Some(&key) = it.next() {
                    match key {
                        "deg" => {
                            let r = rank.ok_or_else(|| err(n, "grading must precede gens"))?;
                            let mut v = Vec::with_capacity(r);
                            for _ in 0..r {
                                let tok =
                                    it.next().ok_or_else(|| err(n, "deg needs rank entries"))?;
                                v.push(tok.parse().map_err(|_| err(n, "bad degree entry"))?);
                            }
                            deg = Some(v);
                        }
                        "action" => {
                            let tok = it.next().ok_or_else(|| err(n, "action needs a value"))?;
                            action = Some(parse_rational(tok).ok_or_else(|| err(n, "bad action"))?);
                        }
                        "level" => {
                            let tok = it.next().ok_or_else(|| err(n, "level needs a value"))?;
                            level = Some(tok.parse().map_err(|_| err(n, "bad level"))?);
                        }
                        "t" => {
                            let tok = it.next().ok_or_else(|| err(n, "t needs 0 or 1"))?;
                            t = tok.parse().map_err(|_| err(n, "bad t"))?;
                        }
                        "hom" => {
                            let a = it.next().ok_or_else(|| err(n, "hom needs two objects"))?;
                            let b = it.next().ok_or_else(|| err(n, "hom needs two objects"))?;
                            hom = Some((a.to_string(), b.to_string()));
                        }
                        other => return Err(err(n, &format!("unknown gen key {other}"))),
                    }
                }
                gens.push(GenDecl {
                    section,
                    id,
                    deg: deg.ok_or_else(|| err(n, "gen needs deg"))?,
                    action,
                    level,
                    t,
                    hom,
                });
            }
            "op" => {
                let key = match (toks.get(1), toks.get(2), toks.get(3)) {
                    (Some(&"l"), Some(a), None) => {
                        OpKey::L(a.parse().map_err(|_| err(n, "bad arity"))?)
                    }
                    (Some(&"mu"), Some(a), None) => {
                        OpKey::Mu(a.parse().map_err(|_| err(n, "bad arity"))?)
                    }
                    (Some(&"co"), Some(d), Some(k)) => OpKey::Co(
                        d.parse().map_err(|_| err(n, "bad d"))?,
                        k.parse().map_err(|_| err(n, "bad k"))?,
                    ),
                    (Some(&"F"), Some(a), None) => {
                        OpKey::F(a.parse().map_err(|_| err(n, "bad arity"))?)
                    }
                    (Some(&"kappa"), Some(l), None) => {
                        OpKey::Kappa(l.parse().map_err(|_| err(n, "bad level"))?)
                    }
                    (Some(&"delta"), None, None) => OpKey::Delta(None),
                    (Some(&"delta"), Some(l), None) => {
                        OpKey::Delta(Some(l.parse().map_err(|_| err(n, "bad level"))?))
                    }
                    _ => return Err(err(n, "unknown op header")),
                };
                current_op = Some(OpDecl {
                    section,
                    key,
                    entries: Vec::new(),
                });
            }
            other => return Err(err(n, &format!("unknown directive {other}"))),
        }
    }
    if current_op.is_some() {
        return Err(FormatError::MissingHeader("end"));
    }
    if !header_seen {
        return Err(FormatError::MissingHeader("homalg v1"));
    }
    let kind = kind.ok_or(FormatError::MissingHeader("kind"))?;
    let ring = ring.ok_or(FormatError::MissingHeader("ring"))?;
    let rank = rank.ok_or(FormatError::MissingHeader("grading"))?;
    let iota = iota.ok_or(FormatError::MissingHeader("iota"))?;
    let parity = parity.ok_or(FormatError::MissingHeader("parity"))?;
    Ok(StructureFile {
        kind,
        ring,
        rank,
        iota,
        parity,
        caps,
        shifts,
        objects,
        gens,
        ops,
    })
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

pub fn serialize(f: &StructureFile) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "homalg v{FORMAT_VERSION}");
    let _ = writeln!(s, "kind {}", f.kind.name());
    let _ = writeln!(s, "ring {}", f.ring);
    let _ = writeln!(s, "grading {}", f.rank);
    let _ = writeln!(s, "iota {}", join_i64(&f.iota));
    let _ = writeln!(
        s,
        "parity {}",
        f.parity
            .iter()
            .map(u8::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    );
    for (k, v) in &f.caps {
        let _ = writeln!(s, "cap {k} {v}");
    }
    if !f.shifts.is_empty() {
        let _ = writeln!(
            s,
            "shifts {}",
            f.shifts
                .iter()
                .map(show_rational)
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
    for o in &f.objects {
        let _ = writeln!(s, "object {o}");
    }
    let mut cur = Section::Main;
    let mut emit_section = |s: &mut String, want: Section| {
        if cur != want {
            let name = match want {
                Section::Main => "main",
                Section::Source => "source",
                Section::Target => "target",
            };
            let _ = writeln!(s, "section {name}");
            cur = want;
        }
    };
    for g in &f.gens {
        emit_section(&mut s, g.section);
        let _ = write!(s, "gen {} deg {}", g.id, join_i64(&g.deg));
        if let Some(a) = &g.action {
            let _ = write!(s, " action {}", show_rational(a));
        }
        if let Some(l) = g.level {
            let _ = write!(s, " level {l}");
        }
        if g.t != 0 {
            let _ = write!(s, " t {}", g.t);
        }
        if let Some((a, b)) = &g.hom {
            let _ = write!(s, " hom {a} {b}");
        }
        let _ = writeln!(s);
    }
    for op in &f.ops {
        emit_section(&mut s, op.section);
        match &op.key {
            OpKey::L(a) => {
                let _ = writeln!(s, "op l {a}");
            }
            OpKey::Mu(a) => {
                let _ = writeln!(s, "op mu {a}");
            }
            OpKey::Co(d, k) => {
                let _ = writeln!(s, "op co {d} {k}");
            }
            OpKey::F(a) => {
                let _ = writeln!(s, "op F {a}");
            }
            OpKey::Kappa(l) => {
                let _ = writeln!(s, "op kappa {l}");
            }
            OpKey::Delta(None) => {
                let _ = writeln!(s, "op delta");
            }
            OpKey::Delta(Some(l)) => {
                let _ = writeln!(s, "op delta {l}");
            }
        }
        for e in &op.entries {
            let mut line = e.inputs.join(" ");
            if let Some(open) = &e.open_inputs {
                line.push_str(" ; ");
                line.push_str(&open.join(" "));
            }
            line.push_str(" ->");
            for (id, c) in &e.outputs {
                let _ = write!(line, " {} {}", id, show_rational(c));
            }
            let _ = writeln!(s, "  {}", line.trim_start());
        }
        let _ = writeln!(s, "end");
    }
    s
}

fn join_i64(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

// ---------------------------------------------------------------------------
// builders
// ---------------------------------------------------------------------------

impl StructureFile {
    pub fn datum(&self) -> Result<GradingDatum, FormatError> {
        Ok(GradingDatum::new(
            self.rank,
            self.iota.clone(),
            self.parity.clone(),
        )?)
    }

    pub fn cap(&self, key: &str, default: usize) -> usize {
        self.caps.get(key).copied().unwrap_or(default)
    }

    fn module_for(&self, section: Section) -> Result<GradedModule, FormatError> {
        let datum = self.datum()?;
        let mut m = GradedModule::new(self.ring.clone(), datum);
        for g in self.gens.iter().filter(|g| g.section == section) {
            let mut gg = Generator::new(g.id.clone(), Degree(g.deg.clone()));
            gg.action = g.action.clone();
            gg.level = g.level;
            gg.t_power = g.t;
            if let Some((a, b)) = &g.hom {
                let ai = self
                    .objects
                    .iter()
                    .position(|o| o == a)
                    .ok_or_else(|| FormatError::UnknownObject(a.clone()))?;
                let bi = self
                    .objects
                    .iter()
                    .position(|o| o == b)
                    .ok_or_else(|| FormatError::UnknownObject(b.clone()))?;
                gg.hom = Some((ai, bi));
            }
            m.push(gg)?;
        }
        Ok(m)
    }

    fn op_table(
        &self,
        module: &GradedModule,
        decl: &OpDecl,
        arity: usize,
        shift: Degree,
        symmetry: Symmetry,
    ) -> Result<MultilinearOp, FormatError> {
        let mut op = MultilinearOp::new(arity, shift, symmetry);
        for e in &decl.entries {
            if e.open_inputs.is_some() {
                return Err(FormatError::Validation(
                    "';' separator is only valid in co blocks".into(),
                ));
            }
            let key: Vec<usize> = e
                .inputs
                .iter()
                .map(|id| module.index_of(id))
                .collect::<Result<_, _>>()?;
            let mut v = SparseVec::new();
            for (id, c) in &e.outputs {
                let g = module.index_of(id)?;
                if v.insert(g, self.ring.normalize(c.clone()).map_err(OpError::from)?)
                    .is_some()
                {
                    return Err(FormatError::Validation(format!(
                        "duplicate output {id} in one entry"
                    )));
                }
            }
            v.retain(|_, c| !num_traits::Zero::is_zero(c));
            op.insert_entry(key, v)?;
        }
        op.validate(module)?;
        Ok(op)
    }

    pub fn build_linfty(&self) -> Result<LInftyStructure, FormatError> {
        if self.kind != FileKind::Linfty {
            return Err(FormatError::WrongKind(self.kind.name()));
        }
        let module = self.module_for(Section::Main)?;
        let cap = self.cap("d", 4);
        let mut l = LInftyStructure::new(module, cap, Convention::Ours);
        for decl in &self.ops {
            let arity = match decl.key {
                OpKey::L(a) => a,
                _ => {
                    return Err(FormatError::Validation(
                        "linfty files take only l blocks".into(),
                    ))
                }
            };
            let op = self.op_table(
                &l.module,
                decl,
                arity,
                l.expected_shift(arity),
                Symmetry::Graded,
            )?;
            l.insert_op(op)?;
        }
        Ok(l)
    }

    /// A filtered view of a linfty file (actions, levels and shifts present).
    pub fn build_filtered(&self) -> Result<FilteredStructure, FormatError> {
        let l = self.build_linfty()?;
        if self.shifts.is_empty() {
            return Err(FormatError::MissingHeader("shifts"));
        }
        Ok(FilteredStructure {
            module: l.module,
            ops: l.ops,
            shifts: self.shifts.clone(),
        })
    }

    pub fn build_ainfty(&self) -> Result<AInftyCategory, FormatError> {
        if self.kind != FileKind::Ainfty {
            return Err(FormatError::WrongKind(self.kind.name()));
        }
        self.build_ainfty_section(Section::Main)
    }

    fn build_ainfty_section(&self, section: Section) -> Result<AInftyCategory, FormatError> {
        let module = self.module_for(section)?;
        let cap = self.cap("k", 4);
        let mut cat = AInftyCategory::new(self.objects.clone(), module, cap);
        for decl in self.ops.iter().filter(|d| d.section == section) {
            let arity = match decl.key {
                OpKey::Mu(a) => a,
                _ => {
                    return Err(FormatError::Validation(
                        "ainfty sections take only mu blocks".into(),
                    ))
                }
            };
            let shift = cat.module.datum.int_degree(2 - arity as i64);
            let op = self.op_table(&cat.module, decl, arity, shift, Symmetry::None)?;
            cat.insert_mu(op)?;
        }
        Ok(cat)
    }

    fn build_linfty_section(&self, section: Section) -> Result<LInftyStructure, FormatError> {
        let module = self.module_for(section)?;
        let cap = self.cap("d", 4);
        let mut l = LInftyStructure::new(module, cap, Convention::Ours);
        for decl in self.ops.iter().filter(|d| d.section == section) {
            let arity = match decl.key {
                OpKey::L(a) => a,
                _ => {
                    return Err(FormatError::Validation(
                        "source/target sections of this kind take only l blocks".into(),
                    ))
                }
            };
            let op = self.op_table(
                &l.module,
                decl,
                arity,
                l.expected_shift(arity),
                Symmetry::Graded,
            )?;
            l.insert_op(op)?;
        }
        Ok(l)
    }

    pub fn build_morphism(&self) -> Result<LInftyMorphism, FormatError> {
        if self.kind != FileKind::Morphism {
            return Err(FormatError::WrongKind(self.kind.name()));
        }
        let source = self.build_linfty_section(Section::Source)?;
        let target = self.build_linfty_section(Section::Target)?;
        let cap = self.cap("d", 4);
        let mut f = LInftyMorphism::new(source, target, cap);
        for decl in self.ops.iter().filter(|d| d.section == Section::Main) {
            let arity = match decl.key {
                OpKey::F(a) => a,
                _ => {
                    return Err(FormatError::Validation(
                        "morphism files take F blocks in the main section".into(),
                    ))
                }
            };
            // F tables: keys in the source module, outputs in the target
            let shift = f.source.module.datum.int_degree(2 - 2 * arity as i64);
            let mut op = MultilinearOp::new(arity, shift, Symmetry::Graded);
            for e in &decl.entries {
                let key: Vec<usize> = e
                    .inputs
                    .iter()
                    .map(|id| f.source.module.index_of(id))
                    .collect::<Result<_, _>>()?;
                let mut v = SparseVec::new();
                for (id, c) in &e.outputs {
                    let g = f.target.module.index_of(id)?;
                    v.insert(g, self.ring.normalize(c.clone()).map_err(OpError::from)?);
                }
                v.retain(|_, c| !num_traits::Zero::is_zero(c));
                op.insert_entry(key, v)?;
            }
            f.insert_map(op)?;
        }
        Ok(f)
    }

    pub fn build_co(&self) -> Result<ClosedOpenData, FormatError> {
        if self.kind != FileKind::Co {
            return Err(FormatError::WrongKind(self.kind.name()));
        }
        let source = self.build_linfty_section(Section::Source)?;
        let target = self.build_ainfty_section(Section::Target)?;
        let mut co = BTreeMap::new();
        for decl in self.ops.iter().filter(|d| d.section == Section::Main) {
            let (d, k) = match decl.key {
                OpKey::Co(d, k) => (d, k),
                _ => {
                    return Err(FormatError::Validation(
                        "co files take co blocks in the main section".into(),
                    ))
                }
            };
            let mut op = CoOp::new(d, k);
            for e in &decl.entries {
                let xs: Vec<usize> = e
                    .inputs
                    .iter()
                    .map(|id| source.module.index_of(id))
                    .collect::<Result<_, _>>()?;
                let ys: Vec<usize> = e
                    .open_inputs
                    .clone()
                    .unwrap_or_default()
                    .iter()
                    .map(|id| target.module.index_of(id))
                    .collect::<Result<_, _>>()?;
                let mut v = SparseVec::new();
                for (id, c) in &e.outputs {
                    let g = target.module.index_of(id)?;
                    v.insert(g, self.ring.normalize(c.clone()).map_err(OpError::from)?);
                }
                v.retain(|_, c| !num_traits::Zero::is_zero(c));
                op.insert_entry(xs, ys, v)?;
            }
            co.insert((d, k), op);
        }
        let d_cap = self.cap("d", 3);
        let k_cap = self.cap("k", 3);
        Ok(ClosedOpenData::new(source, target, co, d_cap, k_cap)?)
    }

    pub fn build_complex(&self) -> Result<BoundedComplex, FormatError> {
        if self.kind != FileKind::Complex {
            return Err(FormatError::WrongKind(self.kind.name()));
        }
        let module = self.module_for(Section::Main)?;
        let mut diff = MultilinearOp::new(1, module.datum.int_degree(1), Symmetry::None);
        for decl in &self.ops {
            match decl.key {
                OpKey::Delta(None) => {}
                _ => {
                    return Err(FormatError::Validation(
                        "complex files take a single delta block".into(),
                    ))
                }
            }
            let op = self.op_table(&module, decl, 1, module.datum.int_degree(1), Symmetry::None)?;
            for (key, v) in op.entries() {
                diff.insert_entry(key.clone(), v.clone())?;
            }
        }
        Ok(crate::telescope::to_bounded_complex(&module, &diff)?)
    }

    pub fn build_system(&self) -> Result<DirectedSystem, FormatError> {
        if self.kind != FileKind::System {
            return Err(FormatError::WrongKind(self.kind.name()));
        }
        let module = self.module_for(Section::Main)?;
        let levels = module
            .gens()
            .iter()
            .filter_map(|g| g.level)
            .max()
            .ok_or(FormatError::MissingHeader("levelled generators"))?;
        let mut deltas = BTreeMap::new();
        let mut kappas = BTreeMap::new();
        for decl in &self.ops {
            match decl.key {
                OpKey::Delta(Some(l)) => {
                    let op = self.op_table(
                        &module,
                        decl,
                        1,
                        module.datum.int_degree(1),
                        Symmetry::None,
                    )?;
                    if deltas.insert(l, op).is_some() {
                        return Err(FormatError::Validation(format!("duplicate delta {l}")));
                    }
                }
                OpKey::Kappa(l) => {
                    let op = self.op_table(
                        &module,
                        decl,
                        1,
                        module.datum.int_degree(0),
                        Symmetry::None,
                    )?;
                    if kappas.insert(l, op).is_some() {
                        return Err(FormatError::Validation(format!("duplicate kappa {l}")));
                    }
                }
                _ => {
                    return Err(FormatError::Validation(
                        "system files take delta <level> and kappa <level> blocks".into(),
                    ))
                }
            }
        }
        let s = DirectedSystem {
            module,
            levels,
            deltas,
            kappas,
        };
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINFTY_EXAMPLE: &str = "\
homalg v1
kind linfty
ring Z
grading 1
iota 1
parity 1
cap d 4
gen a deg 0
gen b deg 1
op l 1
  a -> b 1
end
";

    #[test]
    fn parse_serialize_parse_is_identity() {
        let f1 = parse(LINFTY_EXAMPLE).unwrap();
        let text = serialize(&f1);
        let f2 = parse(&text).unwrap();
        assert_eq!(f1, f2);
        assert_eq!(serialize(&f2), text);
    }

    #[test]
    fn build_linfty_from_text() {
        let f = parse(LINFTY_EXAMPLE).unwrap();
        let l = f.build_linfty().unwrap();
        assert_eq!(l.module.rank(), 2);
        assert!(l.ops.contains_key(&1));
    }

    #[test]
    fn unknown_directives_and_keys_rejected() {
        let bad = LINFTY_EXAMPLE.replace("cap d 4", "capx d 4");
        assert!(parse(&bad).is_err());
        let bad2 = LINFTY_EXAMPLE.replace("gen a deg 0", "gen a deg 0 weight 3");
        assert!(parse(&bad2).is_err());
        let bad3 = LINFTY_EXAMPLE.replace("homalg v1", "homalg v2");
        assert!(parse(&bad3).is_err());
    }

    #[test]
    fn duplicate_entries_rejected() {
        let dup = LINFTY_EXAMPLE.replace("  a -> b 1\n", "  a -> b 1\n  a -> b 2\n");
        let f = parse(&dup).unwrap();
        assert!(f.build_linfty().is_err());
    }

    #[test]
    fn co_file_round_trip_and_build() {
        let text = "\
homalg v1
kind co
ring Z
grading 1
iota 1
parity 1
cap d 2
cap k 2
object L
section source
gen z deg 0
section target
gen e deg 0 hom L L
gen x deg 1 hom L L
op mu 2
  e e -> e 1
  e x -> x 1
  x e -> x -1
end
section main
op co 1 1
  z ; x -> e 1
end
";
        let f = parse(text).unwrap();
        let round = parse(&serialize(&f)).unwrap();
        assert_eq!(f, round);
        let c = f.build_co().unwrap();
        assert!(crate::co::check_co_relations(&c, 2, 1).unwrap().is_none());
    }

    #[test]
    fn system_file_builds_and_validates() {
        let text = "\
homalg v1
kind system
ring Z
grading 1
iota 1
parity 1
gen a1 deg 0 level 1
gen b1 deg 1 level 1
gen a2 deg 0 level 2
gen b2 deg 1 level 2
op delta 1
  a1 -> b1 2
end
op delta 2
  a2 -> b2 2
end
op kappa 1
  a1 -> a2 1
  b1 -> b2 1
end
";
        let f = parse(text).unwrap();
        let s = f.build_system().unwrap();
        assert_eq!(s.levels, 2);
        let round = parse(&serialize(&f)).unwrap();
        assert_eq!(f, round);
    }
}
