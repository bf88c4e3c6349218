//! Textual scheme specifications, e.g. `wrap_cca2_bit(decouple_bit(ud1_cpa),lamport_merkle)`.

use super::{
    build_se_bbf, build_ud1_cpa_with_family, decouple_bit, decouple_general, extend, underlying, wrap_cca2_bit,
    wrap_cca2_full, SchemeError, SchemeInstance,
};
use crate::bbf::BbfFamily;
use crate::qcp::BackendTag;
use crate::signatures::SigSchemeTag;

pub const SCHEME_GRAMMAR: &str = "ud1_cpa[(family)] | se_bbf[(family)] | extend(S) | decouple_bit(S) | \
decouple_general(S) | underlying(S) | wrap_cca2_bit(S[,sig]) | wrap_cca2_full(S[,sig])";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemeSpecError {
    #[error("unknown scheme component {0:?}")]
    UnknownName(String),
    #[error("malformed scheme specification {0:?}")]
    Syntax(String),
    #[error(transparent)]
    Invalid(#[from] SchemeError),
}

#[derive(Debug)]
struct Node {
    name: String,
    args: Vec<Node>,
}

fn parse_node(s: &str) -> Result<(Node, &str), SchemeSpecError> {
    let s = s.trim_start();
    let end = s.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(s.len());
    if end == 0 {
        return Err(SchemeSpecError::Syntax(s.to_string()));
    }
    let name = s[..end].to_string();
    let mut rest = s[end..].trim_start();
    let mut args = Vec::new();
    if let Some(r) = rest.strip_prefix('(') {
        rest = r;
        loop {
            let (arg, r) = parse_node(rest)?;
            args.push(arg);
            let r = r.trim_start();
            if let Some(r) = r.strip_prefix(',') {
                rest = r;
            } else if let Some(r) = r.strip_prefix(')') {
                rest = r;
                break;
            } else {
                return Err(SchemeSpecError::Syntax(r.to_string()));
            }
        }
    }
    Ok((Node { name, args }, rest))
}

fn family_arg(node: &Node) -> Result<BbfFamily, SchemeSpecError> {
    match node.args.as_slice() {
        [] => Ok(BbfFamily::KeyedMix),
        [f] if f.args.is_empty() => BbfFamily::parse(&f.name).ok_or_else(|| SchemeSpecError::UnknownName(f.name.clone())),
        _ => Err(SchemeSpecError::Syntax(node.name.clone())),
    }
}

fn sig_arg(node: &Node, idx: usize) -> Result<SigSchemeTag, SchemeSpecError> {
    match node.args.get(idx) {
        None => Ok(SigSchemeTag::LamportMerkle),
        Some(a) => SigSchemeTag::parse(&a.name).ok_or_else(|| SchemeSpecError::UnknownName(a.name.clone())),
    }
}

fn build(node: &Node, backend: BackendTag) -> Result<SchemeInstance, SchemeSpecError> {
    let inner = |i: usize| -> Result<SchemeInstance, SchemeSpecError> {
        let arg = node.args.get(i).ok_or_else(|| SchemeSpecError::Syntax(node.name.clone()))?;
        build(arg, backend)
    };
    let arity = |max: usize| -> Result<(), SchemeSpecError> {
        if node.args.len() > max {
            Err(SchemeSpecError::Syntax(node.name.clone()))
        } else {
            Ok(())
        }
    };
    Ok(match node.name.as_str() {
        "ud1_cpa" => build_ud1_cpa_with_family(backend, family_arg(node)?),
        "se_bbf" => build_se_bbf(family_arg(node)?),
        "extend" => {
            arity(1)?;
            extend(inner(0)?)?
        }
        "decouple_bit" => {
            arity(1)?;
            decouple_bit(inner(0)?)?
        }
        "decouple_general" => {
            arity(1)?;
            decouple_general(inner(0)?, None)
        }
        "underlying" => {
            arity(1)?;
            underlying(inner(0)?)
        }
        "wrap_cca2_bit" => {
            arity(2)?;
            wrap_cca2_bit(inner(0)?, sig_arg(node, 1)?)?
        }
        "wrap_cca2_full" => {
            arity(2)?;
            wrap_cca2_full(inner(0)?, sig_arg(node, 1)?)?
        }
        other => return Err(SchemeSpecError::UnknownName(other.to_string())),
    })
}

/// Builds a scheme from its textual form, instantiating every `ud1_cpa` leaf with `backend`.
pub fn parse_scheme(spec: &str, backend: BackendTag) -> Result<SchemeInstance, SchemeSpecError> {
    let (node, rest) = parse_node(spec)?;
    if !rest.trim().is_empty() {
        return Err(SchemeSpecError::Syntax(rest.to_string()));
    }
    build(&node, backend)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_specs_build() {
        let s = parse_scheme("wrap_cca2_bit(decouple_bit(ud1_cpa), malleable)", BackendTag::IdealToken).unwrap();
        assert_eq!(s.name(), "wrap_cca2_bit(decouple_bit(ud1_cpa[ideal_token]),malleable)");
        let s = parse_scheme("extend(ud1_cpa(constant_zero))", BackendTag::SplitPair).unwrap();
        assert!(s.name().starts_with("extend(ud1_cpa[split_pair"));
    }

    #[test]
    fn bad_specs_are_reported() {
        assert!(matches!(parse_scheme("nope", BackendTag::IdealToken), Err(SchemeSpecError::UnknownName(_))));
        assert!(matches!(parse_scheme("extend(", BackendTag::IdealToken), Err(SchemeSpecError::Syntax(_))));
        assert!(matches!(
            parse_scheme("wrap_cca2_bit(ud1_cpa)", BackendTag::IdealToken),
            Err(SchemeSpecError::Invalid(SchemeError::InvalidComposition(_)))
        ));
    }
}
