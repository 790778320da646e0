//! Name-keyed registries for interchangeable strategies.
//!
//! Each strategy family (increment generators, weight samplers, fGn
//! synthesizers, ...) registers constructors under a stable name. Callers
//! look strategies up by the name found in a config file or on the command
//! line and get back a boxed trait object.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{LabError, Result};

/// Builds a strategy from its parameter record.
pub type Constructor<P, T> = fn(&P) -> Result<Box<T>>;

pub struct Registry<P, T: ?Sized> {
    family: &'static str,
    entries: BTreeMap<&'static str, Constructor<P, T>>,
}

impl<P, T: ?Sized> Registry<P, T> {
    pub fn new(family: &'static str) -> Self {
        Self {
            family,
            entries: BTreeMap::new(),
        }
    }

    /// Registers `ctor` under `name`, replacing any previous entry.
    pub fn register(&mut self, name: &'static str, ctor: Constructor<P, T>) -> &mut Self {
        self.entries.insert(name, ctor);
        self
    }

    pub fn with(mut self, name: &'static str, ctor: Constructor<P, T>) -> Self {
        self.register(name, ctor);
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn family(&self) -> &'static str {
        self.family
    }

    pub fn build(&self, name: &str, params: &P) -> Result<Box<T>> {
        match self.entries.get(name) {
            Some(ctor) => ctor(params),
            None => Err(LabError::UnknownStrategy {
                family: self.family,
                name: name.to_string(),
                available: self.names().collect::<Vec<_>>().join(", "),
            }),
        }
    }
}

impl<P, T: ?Sized> fmt::Debug for Registry<P, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("family", &self.family)
            .field("names", &self.entries.keys().collect::<Vec<_>>())
            .finish()
    }
}
