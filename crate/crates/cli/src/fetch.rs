use std::time::Duration;

use ome_rdf::links::{FetchError, Fetcher};
use ome_rdf::rdf::Iri;

/// HEAD requests over HTTP(S). Redirects are followed; any status the
/// server returns is reported as-is.
#[derive(Debug, Default, Clone, Copy)]
pub struct HttpFetcher;

impl Fetcher for HttpFetcher {
    fn fetch(&self, iri: &Iri, timeout: Duration) -> Result<u16, FetchError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        match agent.head(iri.as_str()).call() {
            Ok(response) => Ok(response.status().as_u16()),
            Err(ureq::Error::Timeout(_)) => Err(FetchError::Timeout),
            Err(e) => Err(FetchError::Network(e.to_string())),
        }
    }
}
