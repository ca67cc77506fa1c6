//! Dense interning of ground atoms.

use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::error::TermError;
use crate::term::{AtomPattern, GroundAtom};

/// Dense id of an interned ground atom. Ids are assigned in creation order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(pub u32);

impl AtomId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Bidirectional map between ground atoms and their ids.
#[derive(Clone, Debug, Default)]
pub struct AtomTable {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, AtomId>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `atom`, assigning the next free id on first sight.
    pub fn intern(&mut self, atom: GroundAtom) -> AtomId {
        if let Some(&id) = self.index.get(&atom) {
            return id;
        }
        let id = AtomId(u32::try_from(self.atoms.len()).expect("atom table overflow"));
        self.atoms.push(atom.clone());
        self.index.insert(atom, id);
        id
    }

    /// Interns a pattern that must already be ground.
    pub fn intern_pattern(&mut self, atom: &AtomPattern) -> Result<AtomId, TermError> {
        Ok(self.intern(atom.to_ground()?))
    }

    pub fn get(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.index.get(atom).copied()
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id.index()]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomId, &GroundAtom)> {
        self.atoms.iter().enumerate().map(|(i, a)| (AtomId(i as u32), a))
    }
}
