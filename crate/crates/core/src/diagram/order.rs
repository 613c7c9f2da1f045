use super::PortType;

/// A preorder on port type labels, the subtype relation wires must respect.
pub trait PortOrder: Sync {
    fn leq_labels(&self, sub: &str, sup: &str) -> bool;
}

/// Equality only.
#[derive(Debug, Clone, Copy, Default)]
pub struct Discrete;

impl PortOrder for Discrete {
    fn leq_labels(&self, sub: &str, sup: &str) -> bool {
        sub == sup
    }
}

/// Accepts every wire.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnyOrder;

impl PortOrder for AnyOrder {
    fn leq_labels(&self, _: &str, _: &str) -> bool {
        true
    }
}

/// Whether a wire from a `source`-typed port may feed a `target`-typed port.
/// Unlabeled ports are compatible with everything.
pub fn compatible(order: &dyn PortOrder, source: &PortType, target: &PortType) -> bool {
    match (source, target) {
        (PortType::Labeled(a), PortType::Labeled(b)) => order.leq_labels(a, b),
        _ => true,
    }
}
