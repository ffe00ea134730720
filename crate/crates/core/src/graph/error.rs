use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("{format} parse error at line {line}, column {column}: {message}")]
    Parse {
        format: &'static str,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` references missing node `{node}`")]
    DanglingEndpoint { edge: String, node: String },
    #[error("{what} `{id}` has an empty class name")]
    EmptyClass { what: &'static str, id: String },
    #[error("unknown node class `{name}`; known classes: [{}]", known.join(", "))]
    UnknownNodeClass { name: String, known: Vec<String> },
    #[error("unknown edge class `{name}`; known classes: [{}]", known.join(", "))]
    UnknownEdgeClass { name: String, known: Vec<String> },
    #[error("unknown node id `{0}`")]
    UnknownNode(String),
    #[error("unknown edge id `{0}`")]
    UnknownEdge(String),
    #[error("edge `{edge}` has endpoint `{node}` outside the extraction")]
    EndpointNotExtracted { edge: String, node: String },
    #[error("class name `{0}` is already in use")]
    ClassCollision(String),
    #[error("unsupported graph format `{0}`")]
    UnknownFormat(String),
}

impl GraphError {
    pub fn code(&self) -> &'static str {
        match self {
            GraphError::Parse { .. } => "parse_error",
            GraphError::DuplicateNode(_) | GraphError::DuplicateEdge(_) => "duplicate_id",
            GraphError::DanglingEndpoint { .. } => "dangling_endpoint",
            GraphError::EmptyClass { .. } => "empty_class",
            GraphError::UnknownNodeClass { .. } | GraphError::UnknownEdgeClass { .. } => {
                "unknown_class"
            }
            GraphError::UnknownNode(_) | GraphError::UnknownEdge(_) => "unknown_id",
            GraphError::EndpointNotExtracted { .. } => "endpoint_not_extracted",
            GraphError::ClassCollision(_) => "class_collision",
            GraphError::UnknownFormat(_) => "unknown_format",
        }
    }
}
