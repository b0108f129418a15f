use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::BigUint;

use super::program::HostId;

pub type HostFn = Arc<dyn Fn(&BigUint) -> BigUint + Send + Sync>;

/// A registered total function with a fixed step cost per call.
#[derive(Clone)]
pub struct HostEntry {
    pub name: String,
    pub cost: u64,
    pub func: HostFn,
}

impl fmt::Debug for HostEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HostEntry")
            .field("name", &self.name)
            .field("cost", &self.cost)
            .finish()
    }
}

/// Oracle primitives callable through `HOST` instructions.
///
/// Entries are append-only, so an id keeps its meaning for the registry's
/// lifetime. Runs borrow the registry immutably.
#[derive(Clone, Debug, Default)]
pub struct HostRegistry {
    entries: BTreeMap<HostId, HostEntry>,
}

pub const DEFAULT_HOST_COST: u64 = 1;

impl HostRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `func` at the next free id with the default cost of one step.
    pub fn register(
        &mut self,
        name: impl Into<String>,
        func: impl Fn(&BigUint) -> BigUint + Send + Sync + 'static,
    ) -> HostId {
        self.register_with_cost(name, DEFAULT_HOST_COST, func)
    }

    /// Costs below one step are raised to one.
    pub fn register_with_cost(
        &mut self,
        name: impl Into<String>,
        cost: u64,
        func: impl Fn(&BigUint) -> BigUint + Send + Sync + 'static,
    ) -> HostId {
        let id = HostId(
            self.entries
                .keys()
                .next_back()
                .map_or(0, |k| k.0.checked_add(1).expect("host id space exhausted")),
        );
        self.entries.insert(
            id,
            HostEntry {
                name: name.into(),
                cost: cost.max(1),
                func: Arc::new(func),
            },
        );
        id
    }

    /// Registers at a caller-chosen id. Fails if the id is taken.
    pub fn register_at(
        &mut self,
        id: HostId,
        name: impl Into<String>,
        cost: u64,
        func: impl Fn(&BigUint) -> BigUint + Send + Sync + 'static,
    ) -> Result<(), HostId> {
        if self.entries.contains_key(&id) {
            return Err(id);
        }
        self.entries.insert(
            id,
            HostEntry {
                name: name.into(),
                cost: cost.max(1),
                func: Arc::new(func),
            },
        );
        Ok(())
    }

    pub fn get(&self, id: HostId) -> Option<&HostEntry> {
        self.entries.get(&id)
    }

    pub fn contains(&self, id: HostId) -> bool {
        self.entries.contains_key(&id)
    }

    pub fn call(&self, id: HostId, input: &BigUint) -> Option<BigUint> {
        self.entries.get(&id).map(|e| (e.func)(input))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_sequential_and_stable() {
        let mut reg = HostRegistry::new();
        let a = reg.register("zero", |_| BigUint::from(0u8));
        let b = reg.register_with_cost("succ", 0, |n| n + 1u8);
        assert_eq!((a, b), (HostId(0), HostId(1)));
        assert_eq!(reg.get(b).unwrap().cost, 1);
        assert_eq!(reg.call(b, &BigUint::from(4u8)), Some(BigUint::from(5u8)));
        assert_eq!(reg.call(HostId(9), &BigUint::from(4u8)), None);
    }
}
