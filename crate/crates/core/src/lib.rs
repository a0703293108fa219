pub mod ingest;
pub mod links;
pub mod mapper;
pub mod ome;
pub mod ontology;
pub mod rdf;
pub mod synthetic;
pub mod translator;
pub mod validator;
