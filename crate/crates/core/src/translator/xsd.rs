//! Reader for the XML-schema subset: named and anonymous complex types with
//! `sequence`, `element`, `attribute`, occurrence bounds and single-level
//! `complexContent/extension`. Everything else is reported as a warning and
//! skipped.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use roxmltree::{Document, Node};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XsdError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("schema declares no complex types")]
    EmptySchema,
    #[error("complex type {0:?} is declared twice")]
    DuplicateType(String),
    #[error("{name:?} is declared twice in complex type {owner:?}")]
    DuplicateMember { owner: String, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementDecl {
    pub name: String,
    pub type_ref: String,
    pub min_occurs: u32,
    /// `None` for `unbounded`.
    pub max_occurs: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDecl {
    pub name: String,
    pub datatype_ref: String,
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexType {
    pub name: String,
    /// Base type of a one-level `complexContent/extension`.
    pub base: Option<String>,
    pub elements: Vec<ElementDecl>,
    pub attributes: Vec<AttributeDecl>,
}

impl ComplexType {
    fn new(name: &str) -> Self {
        ComplexType {
            name: name.to_string(),
            base: None,
            elements: Vec::new(),
            attributes: Vec::new(),
        }
    }

    fn has_member(&self, name: &str) -> bool {
        self.elements.iter().any(|e| e.name == name) || self.attributes.iter().any(|a| a.name == name)
    }
}

/// A skipped construct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XsdWarning {
    pub path: String,
    pub reason: String,
}

impl fmt::Display for XsdWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.path, self.reason)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct XsdModel {
    pub complex_types: Vec<ComplexType>,
    /// Named simple types and the base each one restricts.
    pub simple_types: BTreeMap<String, String>,
    pub warnings: Vec<XsdWarning>,
}

impl XsdModel {
    pub fn complex_type(&self, name: &str) -> Option<&ComplexType> {
        self.complex_types.iter().find(|t| t.name == name)
    }

    /// Whether `path` (`Type`, `Type/element` or `Type/@attribute`) names a
    /// node of the model.
    pub fn resolve(&self, path: &str) -> bool {
        let (owner, member) = match path.split_once('/') {
            Some((o, m)) => (o, Some(m)),
            None => (path, None),
        };
        let Some(ty) = self.complex_type(owner) else {
            return false;
        };
        match member {
            None => true,
            Some(m) => match m.strip_prefix('@') {
                Some(attr) => ty.attributes.iter().any(|a| a.name == attr),
                None => ty.elements.iter().any(|e| e.name == m),
            },
        }
    }

    /// Maps a simple type name to an XSD datatype local name, following
    /// restriction bases. Unknown names fall back to `string`.
    pub fn resolve_datatype(&self, name: &str) -> &str {
        let mut current = name;
        for _ in 0..32 {
            if let Some(builtin) = builtin_datatype(current) {
                return builtin;
            }
            match self.simple_types.get(current) {
                Some(base) => current = base,
                None => break,
            }
        }
        "string"
    }
}

fn builtin_datatype(name: &str) -> Option<&'static str> {
    const PASS_THROUGH: &[&str] = &[
        "string", "boolean", "decimal", "float", "double", "integer", "int", "long", "short", "byte",
        "nonNegativeInteger", "positiveInteger", "nonPositiveInteger", "negativeInteger",
        "unsignedInt", "unsignedLong", "unsignedShort", "unsignedByte", "dateTime", "date", "time",
        "duration", "gYear", "anyURI", "token", "normalizedString", "language", "hexBinary",
        "base64Binary",
    ];
    const AS_STRING: &[&str] = &["ID", "IDREF", "IDREFS", "NCName", "Name", "NMTOKEN", "anySimpleType", "anyType"];
    PASS_THROUGH
        .iter()
        .find(|b| **b == name)
        .copied()
        .or_else(|| AS_STRING.contains(&name).then_some("string"))
}

fn local(qname: &str) -> &str {
    qname.rsplit_once(':').map_or(qname, |(_, l)| l)
}

fn child_elements<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children().filter(Node::is_element)
}

fn tag<'a>(node: &Node<'a, '_>) -> &'a str {
    node.tag_name().name()
}

#[derive(Clone)]
enum ElementTarget {
    Anonymous,
    Typed(String),
}

struct Reader {
    top_elements: HashMap<String, ElementTarget>,
    model: XsdModel,
    names: HashSet<String>,
}

impl Reader {
    fn warn(&mut self, path: impl Into<String>, reason: impl Into<String>) {
        self.model.warnings.push(XsdWarning {
            path: path.into(),
            reason: reason.into(),
        });
    }

    fn complex_type(&mut self, name: &str, node: Node) -> Result<(), XsdError> {
        if !self.names.insert(name.to_string()) {
            return Err(XsdError::DuplicateType(name.to_string()));
        }
        let mut ty = ComplexType::new(name);
        self.members(&mut ty, node, name)?;
        self.model.complex_types.push(ty);
        Ok(())
    }

    fn members(&mut self, ty: &mut ComplexType, node: Node, path: &str) -> Result<(), XsdError> {
        for child in child_elements(node) {
            match tag(&child) {
                "annotation" => {}
                "sequence" => self.sequence(ty, child, path)?,
                "attribute" => self.attribute(ty, child, path)?,
                "complexContent" => {
                    for inner in child_elements(child) {
                        match tag(&inner) {
                            "annotation" => {}
                            "extension" => {
                                ty.base = inner.attribute("base").map(|b| local(b).to_string());
                                self.members(ty, inner, path)?;
                            }
                            other => self.warn(format!("{path}/complexContent/{other}"), "unsupported derivation skipped"),
                        }
                    }
                }
                "simpleContent" => {
                    self.warn(format!("{path}/simpleContent"), "text content skipped; attributes kept");
                    for inner in child_elements(child) {
                        for attr in child_elements(inner).filter(|n| tag(n) == "attribute") {
                            self.attribute(ty, attr, path)?;
                        }
                    }
                }
                other => {
                    let label = match child.attribute("ref") {
                        Some(r) => format!("{path}/{other}({})", local(r)),
                        None => format!("{path}/{other}"),
                    };
                    self.warn(label, "unsupported construct skipped");
                }
            }
        }
        Ok(())
    }

    fn sequence(&mut self, ty: &mut ComplexType, node: Node, path: &str) -> Result<(), XsdError> {
        for child in child_elements(node) {
            match tag(&child) {
                "annotation" => {}
                "element" => self.element(ty, child, path)?,
                "sequence" => self.sequence(ty, child, path)?,
                other => {
                    let label = match child.attribute("ref") {
                        Some(r) => format!("{path}/{other}({})", local(r)),
                        None => format!("{path}/{other}"),
                    };
                    self.warn(label, "unsupported construct skipped");
                }
            }
        }
        Ok(())
    }

    fn element(&mut self, ty: &mut ComplexType, node: Node, path: &str) -> Result<(), XsdError> {
        let occurs = |attr: &str| -> Result<Option<u32>, XsdError> {
            match node.attribute(attr) {
                None => Ok(Some(1)),
                Some("unbounded") if attr == "maxOccurs" => Ok(None),
                Some(v) => v
                    .parse()
                    .map(Some)
                    .map_err(|_| XsdError::MalformedXml(format!("{path}: bad {attr} {v:?}"))),
            }
        };
        let min_occurs = occurs("minOccurs")?.unwrap_or(1);
        let max_occurs = occurs("maxOccurs")?;

        let (name, type_ref) = if let Some(r) = node.attribute("ref") {
            let name = local(r).to_string();
            match self.top_elements.get(&name).cloned() {
                Some(ElementTarget::Anonymous) => (name.clone(), name),
                Some(ElementTarget::Typed(t)) => (name, t),
                None => {
                    self.warn(format!("{path}/{name}"), "unresolved element reference skipped");
                    return Ok(());
                }
            }
        } else {
            let Some(name) = node.attribute("name") else {
                self.warn(format!("{path}/element"), "element without name or ref skipped");
                return Ok(());
            };
            let type_ref = if let Some(t) = node.attribute("type") {
                local(t).to_string()
            } else if let Some(inner) = child_elements(node).find(|n| tag(n) == "complexType") {
                self.complex_type(name, inner)?;
                name.to_string()
            } else {
                simple_base(node)
            };
            (name.to_string(), type_ref)
        };
        if ty.has_member(&name) {
            return Err(XsdError::DuplicateMember {
                owner: ty.name.clone(),
                name,
            });
        }
        ty.elements.push(ElementDecl {
            name,
            type_ref,
            min_occurs,
            max_occurs,
        });
        Ok(())
    }

    fn attribute(&mut self, ty: &mut ComplexType, node: Node, path: &str) -> Result<(), XsdError> {
        let Some(name) = node.attribute("name") else {
            let r = node.attribute("ref").map(local).unwrap_or("?");
            self.warn(format!("{path}/@{r}"), "attribute reference skipped");
            return Ok(());
        };
        if ty.has_member(name) {
            return Err(XsdError::DuplicateMember {
                owner: ty.name.clone(),
                name: name.to_string(),
            });
        }
        let datatype_ref = match node.attribute("type") {
            Some(t) => local(t).to_string(),
            None => simple_base(node),
        };
        ty.attributes.push(AttributeDecl {
            name: name.to_string(),
            datatype_ref,
            required: node.attribute("use") == Some("required"),
        });
        Ok(())
    }

    /// Drops extension links that point nowhere or start a chain deeper than
    /// one level.
    fn check_extensions(&mut self) {
        let bases: HashMap<String, Option<String>> = self
            .model
            .complex_types
            .iter()
            .map(|t| (t.name.clone(), t.base.clone()))
            .collect();
        let mut warnings = Vec::new();
        for ty in &mut self.model.complex_types {
            let Some(base) = ty.base.clone() else { continue };
            let reason = match bases.get(&base) {
                None => "extension of an unknown or simple type skipped",
                Some(Some(_)) => "extension chain deeper than one level skipped",
                Some(None) => continue,
            };
            warnings.push(XsdWarning {
                path: format!("{}/extension({base})", ty.name),
                reason: reason.into(),
            });
            ty.base = None;
        }
        self.model.warnings.extend(warnings);
    }
}

/// Base of an inline `simpleType/restriction`, or `string`.
fn simple_base(node: Node) -> String {
    child_elements(node)
        .find(|n| tag(n) == "simpleType")
        .and_then(|st| child_elements(st).find(|n| tag(n) == "restriction"))
        .and_then(|r| r.attribute("base"))
        .map_or_else(|| "string".to_string(), |b| local(b).to_string())
}

pub fn parse_xsd_subset(text: &str) -> Result<XsdModel, XsdError> {
    let doc = Document::parse(text).map_err(|e| XsdError::MalformedXml(e.to_string()))?;
    let root = doc.root_element();
    if tag(&root) != "schema" {
        return Err(XsdError::MalformedXml(format!(
            "root element is <{}>, expected <schema>",
            tag(&root)
        )));
    }

    let mut reader = Reader {
        top_elements: HashMap::new(),
        model: XsdModel::default(),
        names: HashSet::new(),
    };
    for node in child_elements(root) {
        let Some(name) = node.attribute("name") else { continue };
        match tag(&node) {
            "element" => {
                let target = match node.attribute("type") {
                    Some(t) => ElementTarget::Typed(local(t).to_string()),
                    None if child_elements(node).any(|n| tag(&n) == "complexType") => ElementTarget::Anonymous,
                    None => ElementTarget::Typed(simple_base(node)),
                };
                reader.top_elements.insert(name.to_string(), target);
            }
            "simpleType" => {
                let base = child_elements(node)
                    .find(|n| tag(n) == "restriction")
                    .and_then(|r| r.attribute("base"))
                    .map_or("string", local);
                reader.model.simple_types.insert(name.to_string(), base.to_string());
            }
            _ => {}
        }
    }

    for node in child_elements(root) {
        let name = node.attribute("name");
        match (tag(&node), name) {
            ("annotation" | "simpleType", _) => {}
            ("complexType", Some(name)) => reader.complex_type(name, node)?,
            ("element", Some(name)) => {
                if let Some(inner) = child_elements(node).find(|n| tag(n) == "complexType") {
                    reader.complex_type(name, inner)?;
                }
            }
            (other, Some(name)) => reader.warn(format!("{other}({name})"), "unsupported construct skipped"),
            (other, None) => reader.warn(other, "unsupported construct skipped"),
        }
    }
    if reader.model.complex_types.is_empty() {
        return Err(XsdError::EmptySchema);
    }
    reader.check_extensions();
    Ok(reader.model)
}
