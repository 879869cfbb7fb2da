//! Aggregation tables, stored as literal matrices.
//!
//! Each section opens with `[name left right out]`, followed by a header
//! row listing the right-hand labels and one `A : cells` row per left-hand
//! label. Alternatives within a cell are separated by `/`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use thiserror::Error;

use super::label::{ClassSet, Label, LabelFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableId {
    LspSeq,
    LspAnd,
    RspSeq,
    RspAnd,
    IspSeq,
    IspAnd,
    GspSeq,
    GspAnd,
    IgpSeq,
    IgpAnd,
    IopSeqLeft,
    IopSeqRight,
    IopAnd,
    GspOverAnd,
    IgpOver,
}

impl TableId {
    pub const ALL: [TableId; 15] = [
        TableId::LspSeq,
        TableId::LspAnd,
        TableId::RspSeq,
        TableId::RspAnd,
        TableId::IspSeq,
        TableId::IspAnd,
        TableId::GspSeq,
        TableId::GspAnd,
        TableId::IgpSeq,
        TableId::IgpAnd,
        TableId::IopSeqLeft,
        TableId::IopSeqRight,
        TableId::IopAnd,
        TableId::GspOverAnd,
        TableId::IgpOver,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableId::LspSeq => "lsp-seq",
            TableId::LspAnd => "lsp-and",
            TableId::RspSeq => "rsp-seq",
            TableId::RspAnd => "rsp-and",
            TableId::IspSeq => "isp-seq",
            TableId::IspAnd => "isp-and",
            TableId::GspSeq => "gsp-seq",
            TableId::GspAnd => "gsp-and",
            TableId::IgpSeq => "igp-seq",
            TableId::IgpAnd => "igp-and",
            TableId::IopSeqLeft => "iop-seq-left",
            TableId::IopSeqRight => "iop-seq-right",
            TableId::IopAnd => "iop-and",
            TableId::GspOverAnd => "gsp-t-and",
            TableId::IgpOver => "igp-over",
        }
    }

    /// Whether the table combines two sibling blocks under an AND.
    pub fn is_sibling_and(self) -> bool {
        matches!(
            self,
            TableId::LspAnd | TableId::RspAnd | TableId::IspAnd | TableId::GspAnd | TableId::IgpAnd
        )
    }

    /// Whether the table combines two sibling blocks, in either order.
    pub fn is_sibling(self) -> bool {
        matches!(
            self,
            TableId::LspSeq
                | TableId::LspAnd
                | TableId::RspSeq
                | TableId::RspAnd
                | TableId::IspSeq
                | TableId::IspAnd
                | TableId::GspSeq
                | TableId::GspAnd
                | TableId::IgpSeq
                | TableId::IgpAnd
        )
    }
}

const TABLES: &str = "
# left sub-pattern, SEQ
[lsp-seq lsp lsp lsp]
     x+ x0 x-
x+ : x+ x+ x-
x0 : x+ x0 x-
x- : x+ x- x-

# left sub-pattern, AND
[lsp-and lsp lsp lsp]
     x+ x0 x-
x+ : x+ x+ x+
x0 : x+ x0 x-
x- : x+ x- x-

# right sub-pattern, SEQ
[rsp-seq rsp rsp rsp]
     z+ z0 z-
z+ : z+ z+ z+
z0 : z+ z0 z-
z- : z- z- z-

# right sub-pattern, AND
[rsp-and rsp rsp rsp]
     z+ z0 z-
z+ : z+ z+ z+
z0 : z+ z0 z-
z- : z+ z- z-

# interval sub-pattern, SEQ
[isp-seq isp isp isp]
       x+z+ x+z0      x0z+      x+z-      x0z0 x-z+      xz-
x+z+ : x+z+ x+z+      x+z+      x+z+      x+z+ x+z+      x+z+
x+z0 : x+z+ x+z0      x+z+      x+z-      x+z0 x+z-/x-z+ x+z-
x0z+ : x+z+ x0z+/x+z0 x0z+      x0z+/x+z- x0z+ x0z+      x0z+
x+z- : x+z+ x+z0      x+z-/x-z+ x+z-      x+z- x+z-/x-z+ x+z-
x0z0 : x+z+ x+z0      x0z+      x+z-      x0z0 x-z+      xz-
x-z+ : x+z+ x-z+/x+z0 x-z+      x-z+/x+z- x-z+ x-z+      x-z+
xz-  : x+z+ x+z0      x-z+      x+z-      xz-  x-z+      xz-

# interval sub-pattern, AND
[isp-and isp isp isp]
       x+z+ x+z0 x0z+ x+z- x0z0 x-z+ xz-
x+z+ : x+z+ x+z+ x+z+ x+z+ x+z+ x+z+ x+z+
x+z0 : x+z+ x+z0 x+z+ x+z0 x+z0 x+z+ x+z0
x0z+ : x+z+ x+z+ x0z+ x+z+ x0z+ x0z+ x0z+
x+z- : x+z+ x+z0 x+z+ x+z- x+z- x+z+ x+z-
x0z0 : x+z+ x+z0 x0z+ x+z- x0z0 x-z+ xz-
x-z+ : x+z+ x+z+ x0z+ x+z+ x-z+ x-z+ x-z+
xz-  : x+z+ x+z0 x0z+ x+z- xz-  x-z+ xz-

# generalised sequence pattern, SEQ
[gsp-seq gsp gsp gsp]
       x+z+ x+z0      x0z+ x0z0 x-z+ x+z- x0z- xz-
x+z+ : x+z+ x+z+      x+z+ x+z+ x-z+ x+z- x+z- xz-
x+z0 : x+z+ x+z0      x+z+ x+z0 x-z+ x+z- x+z- xz-
x0z+ : x+z+ x0z+/x+z0 x0z+ x0z+ x-z+ x+z- x0z- xz-
x0z0 : x+z+ x+z0      x0z+ x0z0 x-z+ x+z- x0z- xz-
x-z+ : x+z+ x-z+/x+z- x-z+ x-z+ x-z+ x+z- xz-  xz-
x+z- : x+z+ x+z-      x+z+ x+z- x-z+ x+z- x+z- xz-
x0z- : x+z+ x+z-      x0z+ x0z- x-z+ x+z- x0z- xz-
xz-  : x+z+ x+z-      x-z+ xz-  x-z+ x+z- xz-  xz-

# generalised sequence pattern, AND
[gsp-and gsp gsp gsp]
       x+z+ x+z0 x0z+ x0z0 x-z+ x+z- x0z- xz-
x+z+ : x+z+ x+z+ x+z+ x+z+ x+z+ x+z+ x+z+ x+z+
x+z0 : x+z+ x+z0 x+z+ x+z0 x+z+ x+z- x+z- x+z-
x0z+ : x+z+ x+z+ x0z+ x0z+ x-z+ x+z+ x0z+ x-z+
x0z0 : x+z+ x+z0 x0z+ x0z0 x-z+ x+z- x0z- xz-
x-z+ : x+z+ x+z+ x-z+ x-z+ x-z+ x+z+ x-z+ x-z+
x+z- : x+z+ x+z- x+z+ x+z- x+z+ x+z- x+z- x+z-
x0z- : x+z+ x+z- x0z+ x0z- x-z+ x+z- x0z- xz-
xz-  : x+z+ x+z- x-z+ xz-  x-z+ x+z- xz-  xz-

# interleaved generic pattern, SEQ
[igp-seq igp igp igp]
     k+ k0
k+ : k+ k+
k0 : k+ k0

# interleaved generic pattern, AND
[igp-and igp igp igp]
     k+ k0
k+ : k+ k+
k0 : k+ k0

# SEQ overnode, left siblings (overnode, left sub-pattern)
[iop-seq-left iop lsp iop]
         x+    x0    x-
x+tz+ : x+tz+ x+tz+ x+tz+
x+tz0 : x+tz0 x+tz0 x+tz0
x+tz- : x+tz- x+tz- x+tz-
x0tz+ : x+tz+ x0tz+ x-tz+
x0tz0 : x+tz0 x0tz0 x-tz0
x0tz- : x+tz- x0tz- x-tz-
x-tz+ : x-tz+ x-tz+ x-tz+
x-tz0 : x-tz0 x-tz0 x-tz0
x-tz- : x-tz- x-tz- x-tz-

# SEQ overnode, right siblings (overnode, right sub-pattern)
[iop-seq-right iop rsp iop]
         z+    z0    z-
x+tz+ : x+tz+ x+tz+ x+tz+
x+tz0 : x+tz+ x+tz0 x+tz-
x+tz- : x+tz- x+tz- x+tz-
x0tz+ : x0tz+ x0tz+ x0tz+
x0tz0 : x0tz+ x0tz0 x0tz-
x0tz- : x0tz- x0tz- x0tz-
x-tz+ : x-tz+ x-tz+ x-tz+
x-tz0 : x-tz+ x-tz0 x-tz-
x-tz- : x-tz- x-tz- x-tz-

# AND overnode, interval overnode with interval sub-pattern
[iop-and iop isp iop]
        x+z+  x+z0  x0z+  x+z-        x0z0  x-z+        xz-
x+tz+ : x+tz+ x+tz+ x+tz+ x+tz+       x+tz+ x+tz+       x+tz+
x+tz0 : x+tz+ x+tz0 x+tz+ x+tz0       x+tz0 x+tz+       x+tz0
x0tz+ : x+tz+ x+tz+ x0tz+ x+tz+       x0tz+ x0tz+       x0tz+
x+tz- : x+tz+ x+tz- x+tz+ x+tz-       x+tz- x+tz+       x+tz-
x0tz0 : x+tz+ x+tz0 x0tz+ x+tz-/x-tz0 x0tz0 x-tz+/x0tz- x0tz-/x-tz0
x-tz+ : x+tz+ x+tz+ x-tz+ x+tz+       x-tz+ x-tz+       x-tz+
x0tz- : x+tz+ x+tz- x0tz+ x+tz-       x0tz- x-tz+/x0tz- x0tz-
x-tz0 : x+tz+ x+tz0 x-tz+ x+tz-/x-tz0 x-tz0 x-tz+       x-tz0
x-tz- : x+tz+ x+tz- x-tz+ x+tz-       x-tz- x-tz+       x-tz-

# AND overnode, generalised sequence overnode with interval sub-pattern
[gsp-t-and gsp-t isp gsp-t]
        x+z+  x+z0  x0z+  x+z-  x0z0  x-z+        xz-
x+z+t : x+z+t x+z+t x+z+t x+z+t x+z+t x+z+t       x+z+t
x+z0t : x+z+t x+z0t x+z+t x+z0t x+z0t x+z+t       x+z0t
x0z+t : x+z+t x+z+t x0z+t x+z+t x0z+t x0z+t       x0z+t
x0z0t : x+z+t x+z0t x0z+t x+z0t x0z0t x0z0t/x-z+t x0z0t
x-z+t : x+z+t x+z+t x-z+t x+z+t x-z+t x-z+t       x-z+t
x+z-t : x+z+t x+z-t x+z+t x+z-t x+z-t x+z+t       x+z-t
x0z-t : x+z+t x+z-t x0z+t x+z-t x0z-t x0z-t/x-z+t x0z-t
xz-t  : x+z+t x+z-t x-z+t x+z-t xz-t  x-z+t       xz-t

# AND overnode, left or right sub-pattern overnode with interleaved generic pattern
[igp-over lsp-t igp lsp-t]
       k+  k0
x+t : x+t x+t
x0t : x+t x0t
x-t : x+t x-t
";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("table {table}: no cell for ({a}, {b})")]
    MissingCell {
        table: &'static str,
        a: Label,
        b: Label,
    },
    #[error("no {kind} table for {family:?} labels")]
    NoTable {
        family: LabelFamily,
        kind: &'static str,
    },
    #[error("table {table}: {a} or {b} outside the domain")]
    WrongFamily {
        table: &'static str,
        a: Label,
        b: Label,
    },
}

/// One aggregation table with its domain.
#[derive(Debug, Clone)]
pub struct AggregationTable {
    pub id: TableId,
    pub left: LabelFamily,
    pub right: LabelFamily,
    pub out: LabelFamily,
    cells: HashMap<(Label, Label), ClassSet>,
}

impl AggregationTable {
    pub fn cell(&self, a: Label, b: Label) -> Result<&ClassSet, TableError> {
        if a.family != self.left || b.family != self.right {
            return Err(TableError::WrongFamily {
                table: self.id.name(),
                a,
                b,
            });
        }
        self.cells.get(&(a, b)).ok_or(TableError::MissingCell {
            table: self.id.name(),
            a,
            b,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// The table as a text matrix in the layout it was encoded in.
    pub fn render(&self) -> String {
        let rows = self.left.labels();
        let cols = self.right.labels();
        let text = |a: Label, b: Label| self.cells.get(&(a, b)).map_or("?".to_string(), cell_text);
        let width = rows
            .iter()
            .flat_map(|&a| cols.iter().map(move |&b| (a, b)))
            .map(|(a, b)| text(a, b).len())
            .chain(cols.iter().map(|c| c.to_string().len()))
            .max()
            .unwrap_or(1);
        let lead = rows.iter().map(|r| r.to_string().len()).max().unwrap_or(1);
        let mut s = format!("[{}]\n{:lead$}  ", self.id.name(), "");
        for c in &cols {
            let _ = write!(s, " {:width$}", c.to_string());
        }
        s.push('\n');
        for &a in &rows {
            let _ = write!(s, "{:lead$} :", a.to_string());
            for &b in &cols {
                let _ = write!(s, " {:width$}", text(a, b));
            }
            s.push('\n');
        }
        s
    }
}

fn cell_text(set: &ClassSet) -> String {
    set.iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join("/")
}

fn family(token: &str) -> LabelFamily {
    token.parse().unwrap_or_else(|e| panic!("table data: {e}"))
}

fn label(fam: LabelFamily, token: &str) -> Label {
    Label::parse(fam, token).unwrap_or_else(|e| panic!("table data: {e}"))
}

fn parse_tables(text: &str) -> HashMap<TableId, AggregationTable> {
    let mut tables = HashMap::new();
    let mut current: Option<AggregationTable> = None;
    let mut header: Vec<Label> = Vec::new();
    for line in text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
    {
        if let Some(section) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            if let Some(t) = current.take() {
                tables.insert(t.id, t);
            }
            let parts: Vec<&str> = section.split_whitespace().collect();
            let id = *TableId::ALL
                .iter()
                .find(|t| t.name() == parts[0])
                .unwrap_or_else(|| panic!("table data: unknown table {}", parts[0]));
            current = Some(AggregationTable {
                id,
                left: family(parts[1]),
                right: family(parts[2]),
                out: family(parts[3]),
                cells: HashMap::new(),
            });
            header.clear();
            continue;
        }
        let table = current.as_mut().expect("table data: row outside a section");
        match line.split_once(':') {
            None => {
                header = line
                    .split_whitespace()
                    .map(|t| label(table.right, t))
                    .collect()
            }
            Some((a, row)) => {
                let a = label(table.left, a.trim());
                let cells: Vec<&str> = row.split_whitespace().collect();
                assert_eq!(
                    cells.len(),
                    header.len(),
                    "table data: ragged row in {}",
                    table.id.name()
                );
                for (&b, cell) in header.iter().zip(cells) {
                    let set = ClassSet::prune(cell.split('/').map(|t| label(table.out, t)));
                    table.cells.insert((a, b), set);
                }
            }
        }
    }
    if let Some(t) = current.take() {
        tables.insert(t.id, t);
    }
    tables
}

fn registry() -> &'static HashMap<TableId, AggregationTable> {
    static TABLES_CELL: OnceLock<HashMap<TableId, AggregationTable>> = OnceLock::new();
    TABLES_CELL.get_or_init(|| parse_tables(TABLES))
}

pub fn table(id: TableId) -> &'static AggregationTable {
    &registry()[&id]
}

/// All tables rendered as text matrices.
pub fn dump_tables() -> String {
    TableId::ALL
        .iter()
        .map(|&id| table(id).render())
        .collect::<Vec<_>>()
        .join("\n")
}

/// One failed static check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableViolation {
    pub table: &'static str,
    pub check: &'static str,
    pub a: Label,
    pub b: Label,
}

/// Totality, AND symmetry, neutral elements and top absorption over every
/// cell of every table.
pub fn check_tables() -> Vec<TableViolation> {
    let mut out = Vec::new();
    for id in TableId::ALL {
        let t = table(id);
        let mut bad = |check, a, b| {
            out.push(TableViolation {
                table: id.name(),
                check,
                a,
                b,
            })
        };
        for a in t.left.labels() {
            for b in t.right.labels() {
                let Ok(cell) = t.cell(a, b) else {
                    bad("total", a, b);
                    continue;
                };
                if cell.is_empty() {
                    bad("nonempty", a, b);
                }
                if id.is_sibling_and() && t.cell(b, a).ok() != Some(cell) {
                    bad("and-symmetric", a, b);
                }
                // the neutral right-hand label returns the left label
                if b == t.right.neutral() && *cell != ClassSet::one(a.retag(t.out)) {
                    bad("neutral-right", a, b);
                }
                if id.is_sibling() && a == t.left.neutral() && *cell != ClassSet::one(b) {
                    bad("neutral-left", a, b);
                }
                let absorbs = match id {
                    TableId::IspSeq | TableId::IspAnd => {
                        a == t.left.fulfilment() || b == t.right.fulfilment()
                    }
                    TableId::IopAnd | TableId::GspOverAnd => a == t.left.fulfilment(),
                    _ => false,
                };
                if absorbs && *cell != ClassSet::one(t.out.fulfilment()) {
                    bad("top-absorbs", a, b);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(fam: LabelFamily, s: &str) -> Label {
        Label::parse(fam, s).unwrap()
    }

    #[test]
    fn every_table_parses_with_full_domain() {
        for id in TableId::ALL {
            let t = table(id);
            assert_eq!(
                t.cell_count(),
                t.left.labels().len() * t.right.labels().len(),
                "{}",
                id.name()
            );
        }
    }

    #[test]
    fn static_checks_clean() {
        assert_eq!(check_tables(), vec![]);
    }

    #[test]
    fn spec_cells() {
        use LabelFamily::*;
        let c = |id, a, b| table(id).cell(a, b).unwrap().clone();
        assert_eq!(
            c(TableId::LspSeq, l(Lsp, "x+"), l(Lsp, "x-")),
            ClassSet::one(l(Lsp, "x-"))
        );
        assert_eq!(
            c(TableId::LspAnd, l(Lsp, "x+"), l(Lsp, "x-")),
            ClassSet::one(l(Lsp, "x+"))
        );
        assert_eq!(
            c(TableId::IspAnd, l(Isp, "x+z0"), l(Isp, "x0z+")),
            ClassSet::one(l(Isp, "x+z+"))
        );
        assert_eq!(
            c(TableId::IspSeq, l(Isp, "x+z0"), l(Isp, "x-z+")),
            ClassSet::prune([l(Isp, "x+z-"), l(Isp, "x-z+")])
        );
    }

    #[test]
    fn wrong_family_rejected() {
        let t = table(TableId::IspSeq);
        let lsp = LabelFamily::Lsp.neutral();
        assert!(matches!(
            t.cell(lsp, lsp),
            Err(TableError::WrongFamily { .. })
        ));
    }

    #[test]
    fn dump_lists_every_table() {
        let d = dump_tables();
        for id in TableId::ALL {
            assert!(d.contains(&format!("[{}]", id.name())));
        }
        assert!(d.contains("x+z-/x-z+"));
    }
}
