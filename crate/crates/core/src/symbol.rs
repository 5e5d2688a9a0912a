//! Global, append-only symbol registry.
//!
//! Every indeterminate that can appear in a polynomial is a [`Symbol`]:
//! main variables (`x`, `y`, `t`, `u`), parameters, and tower entries
//! (exp/log/atan/radical/formal-integral indeterminates). Tower entries are
//! interned by their defining relation, so the same definition always yields
//! the same symbol.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, LazyLock, RwLock};

use crate::ratfun::RationalFunction;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub(crate) u32);

/// The defining relation of a tower indeterminate θ.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TowerDef {
    /// θ = exp(arg)
    Exp(RationalFunction),
    /// θ = log(arg)
    Log(RationalFunction),
    /// θ = atan(arg)
    Atan(RationalFunction),
    /// θ^degree = base, with `base` a polynomial-valued rational function.
    Root { base: RationalFunction, degree: u32 },
    /// θ = F(at) where F is an antiderivative of `integrand` in the dummy
    /// `var`; `at == None` means θ = F(var).
    Integral { integrand: RationalFunction, var: Symbol, at: Option<RationalFunction> },
}

#[derive(Clone, Debug)]
pub enum SymbolKind {
    Variable,
    Parameter,
    Tower(Arc<TowerDef>),
}

struct Entry {
    name: String,
    kind: SymbolKind,
    deps: Arc<BTreeSet<Symbol>>,
}

#[derive(Default)]
struct Registry {
    entries: Vec<Entry>,
    by_name: HashMap<String, Symbol>,
    by_def: HashMap<Arc<TowerDef>, Symbol>,
    fresh: u32,
}

/// Names registered up front so that their relative order (and hence the
/// monomial order) is the same in every process.
const PRESEEDED: &[&str] = &[
    "x", "y", "t", "u", "s3", "s2", "s1", "s0", "r3", "r2", "r1", "r0", "a3", "a2", "a1", "a0", "b3", "b2",
    "b1", "b0", "k4", "k3", "k2", "k1", "k0", "alpha", "beta", "gamma", "lambda", "kappa", "a", "b", "c",
];

const MAIN_VARIABLES: &[&str] = &["x", "y", "t", "u"];

static REGISTRY: LazyLock<RwLock<Registry>> = LazyLock::new(|| {
    let mut reg = Registry::default();
    for name in PRESEEDED {
        reg.insert_named(name);
    }
    RwLock::new(reg)
});

impl Registry {
    fn insert_named(&mut self, name: &str) -> Symbol {
        if let Some(s) = self.by_name.get(name) {
            return *s;
        }
        let sym = Symbol(self.entries.len() as u32);
        let kind = if MAIN_VARIABLES.contains(&name) { SymbolKind::Variable } else { SymbolKind::Parameter };
        let mut deps = BTreeSet::new();
        deps.insert(sym);
        self.entries.push(Entry { name: name.to_string(), kind, deps: Arc::new(deps) });
        self.by_name.insert(name.to_string(), sym);
        sym
    }
}

impl Symbol {
    /// Returns the symbol with this name, registering it if needed.
    pub fn named(name: &str) -> Symbol {
        if let Some(s) = Symbol::lookup(name) {
            return s;
        }
        REGISTRY.write().unwrap().insert_named(name)
    }

    pub fn lookup(name: &str) -> Option<Symbol> {
        REGISTRY.read().unwrap().by_name.get(name).copied()
    }

    /// A fresh symbol that cannot clash with user input.
    pub fn fresh_dummy() -> Symbol {
        let mut reg = REGISTRY.write().unwrap();
        loop {
            reg.fresh += 1;
            let name = format!("_v{}", reg.fresh);
            if !reg.by_name.contains_key(&name) {
                return reg.insert_named(&name);
            }
        }
    }

    /// Interns a tower entry. `deps` are the base symbols it depends on.
    pub(crate) fn tower(def: TowerDef, deps: BTreeSet<Symbol>) -> Symbol {
        if let Some(s) = REGISTRY.read().unwrap().by_def.get(&def) {
            return *s;
        }
        let mut reg = REGISTRY.write().unwrap();
        if let Some(s) = reg.by_def.get(&def) {
            return *s;
        }
        let sym = Symbol(reg.entries.len() as u32);
        let def = Arc::new(def);
        reg.entries.push(Entry {
            name: format!("θ{}", sym.0),
            kind: SymbolKind::Tower(def.clone()),
            deps: Arc::new(deps),
        });
        reg.by_def.insert(def, sym);
        sym
    }

    pub fn name(self) -> String {
        REGISTRY.read().unwrap().entries[self.0 as usize].name.clone()
    }

    pub fn kind(self) -> SymbolKind {
        REGISTRY.read().unwrap().entries[self.0 as usize].kind.clone()
    }

    pub fn tower_def(self) -> Option<Arc<TowerDef>> {
        match &REGISTRY.read().unwrap().entries[self.0 as usize].kind {
            SymbolKind::Tower(d) => Some(d.clone()),
            _ => None,
        }
    }

    pub fn is_tower(self) -> bool {
        matches!(REGISTRY.read().unwrap().entries[self.0 as usize].kind, SymbolKind::Tower(_))
    }

    pub fn is_variable(self) -> bool {
        matches!(REGISTRY.read().unwrap().entries[self.0 as usize].kind, SymbolKind::Variable)
    }

    /// Algebraic tower entries (radicals) need reduction after products.
    pub fn is_root(self) -> bool {
        match &REGISTRY.read().unwrap().entries[self.0 as usize].kind {
            SymbolKind::Tower(d) => matches!(**d, TowerDef::Root { .. }),
            _ => false,
        }
    }

    /// Base (non-tower) symbols this symbol depends on; `{self}` for base symbols.
    pub fn deps(self) -> Arc<BTreeSet<Symbol>> {
        REGISTRY.read().unwrap().entries[self.0 as usize].deps.clone()
    }

    pub fn depends_on(self, other: Symbol) -> bool {
        self == other || self.deps().contains(&other)
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

pub fn x() -> Symbol {
    Symbol(0)
}
pub fn y() -> Symbol {
    Symbol(1)
}
pub fn t() -> Symbol {
    Symbol(2)
}
pub fn u() -> Symbol {
    Symbol(3)
}

/// True for the reserved word and function names that cannot be symbols.
pub fn is_reserved(name: &str) -> bool {
    matches!(name, "I" | "exp" | "log" | "atan" | "sqrt" | "Int" | "diff")
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}
