//! Construction recipes: the provenance tree stored in every descriptor,
//! its text form, and the interpreter that re-runs it.
//!
//! The text form is JSON with an explicit schema version. A document may
//! name shared sub-recipes under `defs` and refer to them with
//! `{"ref": "name"}`; references are expanded on parse, with cycle and depth
//! checks. Serialization always writes the expanded tree.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Current recipe document version.
pub const SCHEMA_VERSION: u32 = 1;

/// Deepest nesting accepted by [`parse_recipe`].
pub const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Bool(bool),
    Int(i64),
    Ints(Vec<i64>),
    Name(String),
}

/// One node of a construction tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recipe {
    pub op: String,
    pub params: BTreeMap<String, Param>,
    pub inputs: Vec<Recipe>,
    pub notes: Vec<String>,
}

impl Recipe {
    pub fn new(op: &str) -> Self {
        Self { op: op.to_string(), params: BTreeMap::new(), inputs: Vec::new(), notes: Vec::new() }
    }

    pub fn int(mut self, key: &str, v: i64) -> Self {
        self.params.insert(key.to_string(), Param::Int(v));
        self
    }

    pub fn flag(mut self, key: &str, v: bool) -> Self {
        self.params.insert(key.to_string(), Param::Bool(v));
        self
    }

    pub fn name(mut self, key: &str, v: &str) -> Self {
        self.params.insert(key.to_string(), Param::Name(v.to_string()));
        self
    }

    pub fn ints(mut self, key: &str, v: &[i64]) -> Self {
        self.params.insert(key.to_string(), Param::Ints(v.to_vec()));
        self
    }

    pub fn input(mut self, r: Recipe) -> Self {
        self.inputs.push(r);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    pub fn depth(&self) -> usize {
        1 + self.inputs.iter().map(Recipe::depth).max().unwrap_or(0)
    }

    pub fn get_int(&self, key: &str) -> Result<i64> {
        match self.params.get(key) {
            Some(Param::Int(v)) => Ok(*v),
            Some(_) => Err(Error::Recipe(format!("{}: parameter `{key}` must be an integer", self.op))),
            None => Err(Error::Recipe(format!("{}: missing parameter `{key}`", self.op))),
        }
    }

    pub fn get_bool(&self, key: &str) -> Result<bool> {
        match self.params.get(key) {
            Some(Param::Bool(v)) => Ok(*v),
            Some(_) => Err(Error::Recipe(format!("{}: parameter `{key}` must be a boolean", self.op))),
            None => Err(Error::Recipe(format!("{}: missing parameter `{key}`", self.op))),
        }
    }

    pub fn get_name(&self, key: &str) -> Result<&str> {
        match self.params.get(key) {
            Some(Param::Name(v)) => Ok(v),
            Some(_) => Err(Error::Recipe(format!("{}: parameter `{key}` must be a string", self.op))),
            None => Err(Error::Recipe(format!("{}: missing parameter `{key}`", self.op))),
        }
    }

    pub fn get_ints(&self, key: &str) -> Result<&[i64]> {
        match self.params.get(key) {
            Some(Param::Ints(v)) => Ok(v),
            // An empty JSON array deserializes as `Ints`, so this is the only shape.
            Some(_) => Err(Error::Recipe(format!("{}: parameter `{key}` must be an integer list", self.op))),
            None => Err(Error::Recipe(format!("{}: missing parameter `{key}`", self.op))),
        }
    }

    /// Rejects parameters outside `allowed` and checks the input count.
    pub fn expect_shape(&self, allowed: &[&str], inputs: usize) -> Result<()> {
        for k in self.params.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Recipe(format!("{}: unknown parameter `{k}`", self.op)));
            }
        }
        if self.inputs.len() != inputs {
            return Err(Error::Recipe(format!(
                "{}: expected {inputs} input recipe(s), found {}",
                self.op,
                self.inputs.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    op: Option<String>,
    #[serde(rename = "ref", default, skip_serializing_if = "Option::is_none")]
    reference: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    params: BTreeMap<String, Param>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    inputs: Vec<RawNode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    schema_version: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    defs: BTreeMap<String, RawNode>,
    root: RawNode,
}

fn to_raw(r: &Recipe) -> RawNode {
    RawNode {
        op: Some(r.op.clone()),
        reference: None,
        params: r.params.clone(),
        inputs: r.inputs.iter().map(to_raw).collect(),
        notes: r.notes.clone(),
    }
}

/// Pretty-printed document text for a recipe tree.
pub fn serialize_recipe(r: &Recipe) -> String {
    let doc = RawDocument { schema_version: SCHEMA_VERSION, defs: BTreeMap::new(), root: to_raw(r) };
    let mut s = serde_json::to_string_pretty(&doc).expect("recipe documents always serialize");
    s.push('\n');
    s
}

struct Resolver<'a> {
    defs: &'a BTreeMap<String, RawNode>,
    stack: Vec<String>,
}

impl Resolver<'_> {
    fn resolve(&mut self, node: &RawNode, depth: usize) -> Result<Recipe> {
        if depth > MAX_DEPTH {
            return Err(Error::RecipeTooDeep(MAX_DEPTH));
        }
        match (&node.op, &node.reference) {
            (Some(op), None) => {
                if !crate::exec::is_registered(op) {
                    return Err(Error::UnknownOperation(op.clone()));
                }
                let inputs = node
                    .inputs
                    .iter()
                    .map(|c| self.resolve(c, depth + 1))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Recipe {
                    op: op.clone(),
                    params: node.params.clone(),
                    inputs,
                    notes: node.notes.clone(),
                })
            }
            (None, Some(name)) => {
                if !node.params.is_empty() || !node.inputs.is_empty() || !node.notes.is_empty() {
                    return Err(Error::Recipe(format!("reference `{name}` must not carry other fields")));
                }
                if self.stack.iter().any(|s| s == name) {
                    return Err(Error::RecipeCycle(name.clone()));
                }
                let target = self
                    .defs
                    .get(name)
                    .ok_or_else(|| Error::Recipe(format!("undefined reference `{name}`")))?;
                self.stack.push(name.clone());
                // A reference does not add a level of nesting by itself.
                let out = self.resolve(target, depth);
                self.stack.pop();
                out
            }
            (Some(_), Some(_)) => Err(Error::Recipe("a node has both `op` and `ref`".into())),
            (None, None) => Err(Error::Recipe("a node needs `op` or `ref`".into())),
        }
    }
}

/// Parses a recipe document. Unknown fields, unknown operations, undefined
/// or cyclic references and nesting deeper than [`MAX_DEPTH`] are errors.
pub fn parse_recipe(text: &str) -> Result<Recipe> {
    // Each recipe level costs two JSON levels (node object, inputs array),
    // plus a few for the document and parameter lists. Anything deeper is
    // rejected before serde recurses into it.
    if textual_depth(text) > 2 * MAX_DEPTH + 4 {
        return Err(Error::RecipeTooDeep(MAX_DEPTH));
    }
    let mut de = serde_json::Deserializer::from_str(text);
    de.disable_recursion_limit();
    let doc = RawDocument::deserialize(&mut de)
        .and_then(|d| de.end().map(|_| d))
        .map_err(|e| Error::RecipeParse { line: e.line(), column: e.column(), message: e.to_string() })?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::Recipe(format!(
            "unsupported schema version {} (expected {SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    // Every definition must resolve, even if unused, so cycles never hide.
    let mut resolver = Resolver { defs: &doc.defs, stack: Vec::new() };
    let names: BTreeSet<&String> = doc.defs.keys().collect();
    for name in names {
        resolver.stack.push(name.clone());
        resolver.resolve(&doc.defs[name], 1)?;
        resolver.stack.pop();
    }
    resolver.resolve(&doc.root, 1)
}

/// Maximum bracket nesting of JSON text, ignoring brackets inside strings.
fn textual_depth(text: &str) -> usize {
    let (mut depth, mut max, mut in_str, mut escaped) = (0usize, 0usize, false, false);
    for c in text.chars() {
        if in_str {
            match (escaped, c) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_str = false,
                _ => {}
            }
            continue;
        }
        match c {
            '"' => in_str = true,
            '{' | '[' => {
                depth += 1;
                max = max.max(depth);
            }
            '}' | ']' => depth = depth.saturating_sub(1),
            _ => {}
        }
    }
    max
}
