//! SIP message model: parsing, precise field mutation, byte-stable
//! re-serialization.
//!
//! Headers keep their raw text exactly as received, so a parse/serialize
//! round trip of an unfolded message is byte-identical, and rewriting one
//! header leaves every other byte alone. Privacy code edits parsed views
//! (addresses, URIs, SDP fields) and writes them back into single headers.

pub mod dialog;
pub mod sdes;
pub mod sdp;
pub mod uri;

use thiserror::Error;

pub use dialog::{dialog_key, DialogKey};
pub use sdes::{parse_sdes, serialize_sdes, RtcpSdesPacket, SdesItem, SdesItemKind};
pub use sdp::{SdpConnection, SdpMedia, SdpOrigin, SdpSession};
pub use uri::{split_list_value, Address, Scheme, SipUri};

/// Errors of the signaling codec. Every parse failure is typed; the parser
/// never panics on malformed input.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SigError {
    #[error("malformed start line")]
    MalformedStartLine,
    #[error("missing mandatory header: {0}")]
    MissingMandatoryHeader(String),
    #[error("body length mismatch: declared {declared}, actual {actual}")]
    BodyLengthMismatch { declared: usize, actual: usize },
    #[error("malformed header line {0}")]
    MalformedHeaderLine(usize),
    #[error("malformed SDP line {0}")]
    MalformedSdpLine(usize),
    #[error("truncated SDES item")]
    TruncatedItem,
    #[error("malformed URI: {0}")]
    MalformedUri(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

impl SigError {
    /// Stable machine name of the error variant, used by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            SigError::MalformedStartLine => "MalformedStartLine",
            SigError::MissingMandatoryHeader(_) => "MissingMandatoryHeader",
            SigError::BodyLengthMismatch { .. } => "BodyLengthMismatch",
            SigError::MalformedHeaderLine(_) => "MalformedHeaderLine",
            SigError::MalformedSdpLine(_) => "MalformedSdpLine",
            SigError::TruncatedItem => "TruncatedItem",
            SigError::MalformedUri(_) => "MalformedUri",
            SigError::InvariantViolation(_) => "InvariantViolation",
        }
    }
}

/// One header field. `value` is the raw text after the colon with its
/// original whitespace, so untouched headers re-serialize exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeaderField {
    pub name: String,
    value: String,
}

impl HeaderField {
    pub fn new(name: &str, value: &str) -> HeaderField {
        HeaderField {
            name: name.to_string(),
            value: format!(" {value}"),
        }
    }

    /// Trimmed header value.
    pub fn value(&self) -> &str {
        self.value.trim()
    }

    /// Raw value text including original surrounding whitespace.
    pub fn raw_value(&self) -> &str {
        &self.value
    }

    pub fn set_value(&mut self, value: &str) {
        self.value = format!(" {value}");
    }

    pub fn is(&self, name: &str) -> bool {
        self.name.eq_ignore_ascii_case(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StartLine {
    Request { method: String, uri: String },
    Response { code: u16, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    None,
    Sdp(SdpSession),
    /// Encrypted or otherwise uninterpreted body, carried bit-identically.
    Opaque {
        content_type: String,
        bytes: Vec<u8>,
    },
}

impl Body {
    pub fn len(&self) -> usize {
        match self {
            Body::None => 0,
            Body::Sdp(sdp) => sdp.render().len(),
            Body::Opaque { bytes, .. } => bytes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Body::None)
    }
}

/// A parsed SIP request or response with ordered headers and at most one
/// body part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SipMessage {
    pub start: StartLine,
    pub headers: Vec<HeaderField>,
    pub body: Body,
}

const REQUEST_MANDATORY: &[&str] = &["Call-ID", "From", "To", "Via", "CSeq", "Max-Forwards"];
const RESPONSE_MANDATORY: &[&str] = &["Call-ID", "From", "To", "Via", "CSeq"];

impl SipMessage {
    pub fn is_request(&self) -> bool {
        matches!(self.start, StartLine::Request { .. })
    }

    pub fn method(&self) -> Option<&str> {
        match &self.start {
            StartLine::Request { method, .. } => Some(method),
            StartLine::Response { .. } => None,
        }
    }

    pub fn status_code(&self) -> Option<u16> {
        match &self.start {
            StartLine::Response { code, .. } => Some(*code),
            StartLine::Request { .. } => None,
        }
    }

    pub fn request_uri(&self) -> Option<Result<SipUri, SigError>> {
        match &self.start {
            StartLine::Request { uri, .. } => Some(SipUri::parse(uri)),
            StartLine::Response { .. } => None,
        }
    }

    pub fn set_request_uri(&mut self, uri: &SipUri) {
        if let StartLine::Request { uri: slot, .. } = &mut self.start {
            *slot = uri.to_string();
        }
    }

    pub fn has_header(&self, name: &str) -> bool {
        self.headers.iter().any(|h| h.is(name))
    }

    /// Trimmed value of the first header with this name.
    pub fn first_header(&self, name: &str) -> Option<&str> {
        self.headers.iter().find(|h| h.is(name)).map(|h| h.value())
    }

    /// Trimmed values of every header with this name, in order.
    pub fn header_values(&self, name: &str) -> Vec<&str> {
        self.headers
            .iter()
            .filter(|h| h.is(name))
            .map(|h| h.value())
            .collect()
    }

    pub fn set_first_header(&mut self, name: &str, value: &str) {
        if let Some(h) = self.headers.iter_mut().find(|h| h.is(name)) {
            h.set_value(value);
        } else {
            self.headers.push(HeaderField::new(name, value));
        }
    }

    pub fn append_header(&mut self, name: &str, value: &str) {
        self.headers.push(HeaderField::new(name, value));
    }

    /// Remove every header with this name; returns the removed trimmed values.
    pub fn remove_headers(&mut self, name: &str) -> Vec<String> {
        let mut removed = Vec::new();
        self.headers.retain(|h| {
            if h.is(name) {
                removed.push(h.value().to_string());
                false
            } else {
                true
            }
        });
        removed
    }

    /// Replace all headers named `name` with the given values, inserted at
    /// the position of the first occurrence (appended if there was none).
    pub fn replace_header_lines(&mut self, name: &str, values: &[String]) {
        let first = self.headers.iter().position(|h| h.is(name));
        self.headers.retain(|h| !h.is(name));
        let at = first.unwrap_or(self.headers.len());
        for (i, v) in values.iter().enumerate() {
            self.headers.insert(at + i, HeaderField::new(name, v));
        }
    }

    /// Entries of a comma- or line-repeated list header (Via, Route,
    /// Record-Route), flattened in message order.
    pub fn list_entries(&self, name: &str) -> Vec<String> {
        self.header_values(name)
            .iter()
            .flat_map(|v| split_list_value(v))
            .collect()
    }

    pub fn address(&self, name: &str) -> Option<Result<Address, SigError>> {
        self.first_header(name).map(Address::parse)
    }

    pub fn from_address(&self) -> Option<Result<Address, SigError>> {
        self.address("From")
    }

    pub fn to_address(&self) -> Option<Result<Address, SigError>> {
        self.address("To")
    }

    pub fn set_address(&mut self, name: &str, addr: &Address) {
        self.set_first_header(name, &addr.to_string());
    }

    pub fn cseq(&self) -> Option<(u32, String)> {
        let v = self.first_header("CSeq")?;
        let (num, method) = v.split_once(' ')?;
        Some((num.trim().parse().ok()?, method.trim().to_string()))
    }

    pub fn sdp(&self) -> Option<&SdpSession> {
        match &self.body {
            Body::Sdp(sdp) => Some(sdp),
            _ => None,
        }
    }

    pub fn sdp_mut(&mut self) -> Option<&mut SdpSession> {
        match &mut self.body {
            Body::Sdp(sdp) => Some(sdp),
            _ => None,
        }
    }

    pub fn opaque_body(&self) -> Option<(&str, &[u8])> {
        match &self.body {
            Body::Opaque {
                content_type,
                bytes,
            } => Some((content_type, bytes)),
            _ => None,
        }
    }

    fn check_mandatory(&self) -> Result<(), SigError> {
        let required = if self.is_request() {
            REQUEST_MANDATORY
        } else {
            RESPONSE_MANDATORY
        };
        for name in required {
            if !self.has_header(name) {
                return Err(SigError::MissingMandatoryHeader(name.to_string()));
            }
        }
        Ok(())
    }
}

/// Parse a CRLF-delimited SIP message.
///
/// All headers remain individually addressable in order; unknown headers are
/// preserved verbatim. A `Content-Length` header, when present, must match
/// the actual body length exactly.
pub fn parse_sip(bytes: &[u8]) -> Result<SipMessage, SigError> {
    let (head_bytes, body_bytes) = match find_body_split(bytes) {
        Some(at) => (&bytes[..at], &bytes[at + 4..]),
        None => (bytes, &[][..]),
    };
    let head = std::str::from_utf8(head_bytes).map_err(|_| SigError::MalformedHeaderLine(0))?;

    let mut lines = head.split("\r\n");
    let start_line = lines.next().ok_or(SigError::MalformedStartLine)?;
    let start = parse_start_line(start_line)?;

    let mut headers: Vec<HeaderField> = Vec::new();
    for (no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        if line.starts_with(' ') || line.starts_with('\t') {
            // folded continuation: join onto the previous header
            let prev = headers
                .last_mut()
                .ok_or(SigError::MalformedHeaderLine(no + 2))?;
            prev.value.push(' ');
            prev.value.push_str(line.trim());
            continue;
        }
        let (name, value) = line
            .split_once(':')
            .ok_or(SigError::MalformedHeaderLine(no + 2))?;
        headers.push(HeaderField {
            name: name.to_string(),
            value: value.to_string(),
        });
    }

    let declared: Option<usize> = {
        let values: Vec<&HeaderField> = headers
            .iter()
            .filter(|h| h.is("Content-Length"))
            .collect();
        match values.len() {
            0 => None,
            1 => Some(
                values[0]
                    .value()
                    .parse()
                    .map_err(|_| SigError::MalformedHeaderLine(0))?,
            ),
            _ => {
                return Err(SigError::InvariantViolation(
                    "multiple Content-Length headers".to_string(),
                ))
            }
        }
    };
    if let Some(declared) = declared {
        if declared != body_bytes.len() {
            return Err(SigError::BodyLengthMismatch {
                declared,
                actual: body_bytes.len(),
            });
        }
    }

    let content_type = headers
        .iter()
        .find(|h| h.is("Content-Type"))
        .map(|h| h.value().to_string());
    let body = if body_bytes.is_empty() {
        Body::None
    } else if content_type
        .as_deref()
        .map(|ct| ct.to_ascii_lowercase().starts_with("application/sdp"))
        .unwrap_or(false)
    {
        let text =
            std::str::from_utf8(body_bytes).map_err(|_| SigError::MalformedSdpLine(1))?;
        Body::Sdp(SdpSession::parse(text)?)
    } else {
        Body::Opaque {
            content_type: content_type.unwrap_or_default(),
            bytes: body_bytes.to_vec(),
        }
    };

    let msg = SipMessage {
        start,
        headers,
        body,
    };
    msg.check_mandatory()?;
    Ok(msg)
}

/// Serialize a message. Header order is preserved; `Content-Length` is
/// recomputed from the actual body.
pub fn serialize_sip(msg: &SipMessage) -> Result<Vec<u8>, SigError> {
    msg.check_mandatory()
        .map_err(|e| SigError::InvariantViolation(e.to_string()))?;

    let mut out = String::new();
    match &msg.start {
        StartLine::Request { method, uri } => {
            out.push_str(method);
            out.push(' ');
            out.push_str(uri);
            out.push_str(" SIP/2.0\r\n");
        }
        StartLine::Response { code, reason } => {
            out.push_str(&format!("SIP/2.0 {code} {reason}\r\n"));
        }
    }

    let body_len = msg.body.len();
    let mut wrote_length = false;
    for h in &msg.headers {
        if h.is("Content-Length") {
            out.push_str(&h.name);
            out.push_str(&format!(": {body_len}\r\n"));
            wrote_length = true;
        } else {
            out.push_str(&h.name);
            out.push(':');
            out.push_str(&h.value);
            out.push_str("\r\n");
        }
    }
    if !wrote_length && body_len > 0 {
        out.push_str(&format!("Content-Length: {body_len}\r\n"));
    }
    out.push_str("\r\n");

    let mut bytes = out.into_bytes();
    match &msg.body {
        Body::None => {}
        Body::Sdp(sdp) => bytes.extend_from_slice(sdp.render().as_bytes()),
        Body::Opaque { bytes: b, .. } => bytes.extend_from_slice(b),
    }
    Ok(bytes)
}

fn parse_start_line(line: &str) -> Result<StartLine, SigError> {
    if line.is_empty() {
        return Err(SigError::MalformedStartLine);
    }
    if let Some(rest) = line.strip_prefix("SIP/2.0 ") {
        let (code, reason) = rest.split_once(' ').ok_or(SigError::MalformedStartLine)?;
        let code: u16 = code.parse().map_err(|_| SigError::MalformedStartLine)?;
        if !(100..700).contains(&code) {
            return Err(SigError::MalformedStartLine);
        }
        return Ok(StartLine::Response {
            code,
            reason: reason.to_string(),
        });
    }
    let mut parts = line.split(' ');
    let method = parts.next().ok_or(SigError::MalformedStartLine)?;
    let uri = parts.next().ok_or(SigError::MalformedStartLine)?;
    let version = parts.next().ok_or(SigError::MalformedStartLine)?;
    if parts.next().is_some()
        || method.is_empty()
        || uri.is_empty()
        || !version.eq_ignore_ascii_case("SIP/2.0")
        || !method.chars().all(|c| c.is_ascii_uppercase())
    {
        return Err(SigError::MalformedStartLine);
    }
    Ok(StartLine::Request {
        method: method.to_string(),
        uri: uri.to_string(),
    })
}

fn find_body_split(bytes: &[u8]) -> Option<usize> {
    bytes.windows(4).position(|w| w == b"\r\n\r\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    const INVITE: &str = "INVITE sip:bob@vspexample.com SIP/2.0\r\n\
Via: SIP/2.0/UDP vsp.example.com:5060;branch=z9hG4bK87asdks7\r\n\
Max-Forwards: 70\r\n\
From: \"Bob\" <sip:bob@vspexample.com>;tag=hyh8\r\n\
To: sip:+12125551212@vsp.example.com\r\n\
Call-ID: f81d4fae-7dec-11d0-a765-00a0c91e6bf6@192.0.2.4\r\n\
CSeq: 1 INVITE\r\n\
Contact: \"Alice\" <sips:alice@vsp.example.com>;expires=60\r\n\
Subject: Tech Support\r\n\
Content-Length: 0\r\n\r\n";

    #[test]
    fn parses_table_example_fields() {
        let msg = parse_sip(INVITE.as_bytes()).unwrap();
        assert_eq!(msg.method(), Some("INVITE"));
        let from = msg.from_address().unwrap().unwrap();
        assert_eq!(from.display_name.as_deref(), Some("Bob"));
        assert_eq!(from.uri.host, "vspexample.com");
        assert_eq!(from.tag(), Some("hyh8"));
        assert_eq!(msg.first_header("Subject"), Some("Tech Support"));
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let msg = parse_sip(INVITE.as_bytes()).unwrap();
        assert_eq!(serialize_sip(&msg).unwrap(), INVITE.as_bytes());
    }

    #[test]
    fn missing_call_id_is_named() {
        let raw = INVITE.replace("Call-ID: f81d4fae-7dec-11d0-a765-00a0c91e6bf6@192.0.2.4\r\n", "");
        match parse_sip(raw.as_bytes()) {
            Err(SigError::MissingMandatoryHeader(name)) => assert_eq!(name, "Call-ID"),
            other => panic!("expected MissingMandatoryHeader, got {other:?}"),
        }
    }

    #[test]
    fn body_length_must_match() {
        let raw = INVITE.replace("Content-Length: 0", "Content-Length: 5");
        assert!(matches!(
            parse_sip(raw.as_bytes()),
            Err(SigError::BodyLengthMismatch {
                declared: 5,
                actual: 0
            })
        ));
    }

    #[test]
    fn mutation_is_local() {
        let mut msg = parse_sip(INVITE.as_bytes()).unwrap();
        msg.set_first_header("Subject", "Redacted");
        let out = serialize_sip(&msg).unwrap();
        let expected = INVITE.replace("Subject: Tech Support", "Subject: Redacted");
        assert_eq!(out, expected.as_bytes());
    }

    #[test]
    fn content_length_recomputed_after_body_change() {
        let body = "v=0\r\no=a 1 1 IN IP4 9.9.9.9\r\ns=-\r\n";
        let raw = INVITE.replace(
            "Content-Length: 0\r\n\r\n",
            &format!(
                "Content-Type: application/sdp\r\nContent-Length: {}\r\n\r\n{body}",
                body.len()
            ),
        );
        let mut msg = parse_sip(raw.as_bytes()).unwrap();
        msg.sdp_mut().unwrap().remove_lines('s');
        let out = serialize_sip(&msg).unwrap();
        let text = String::from_utf8(out.clone()).unwrap();
        let new_len = body.len() - "s=-\r\n".len();
        assert!(text.contains(&format!("Content-Length: {new_len}\r\n")));
        let reparsed = parse_sip(&out).unwrap();
        assert!(reparsed.sdp().unwrap().session_name().is_none());
    }

    #[test]
    fn serialize_without_to_is_invariant_violation() {
        let mut msg = parse_sip(INVITE.as_bytes()).unwrap();
        msg.remove_headers("To");
        assert!(matches!(
            serialize_sip(&msg),
            Err(SigError::InvariantViolation(_))
        ));
    }

    #[test]
    fn empty_input_is_malformed_start_line() {
        assert_eq!(parse_sip(b"").unwrap_err(), SigError::MalformedStartLine);
    }

    #[test]
    fn folded_header_is_accepted_and_unfolded() {
        let raw = INVITE.replace(
            "Subject: Tech Support\r\n",
            "Subject: Tech\r\n Support\r\n",
        );
        let msg = parse_sip(raw.as_bytes()).unwrap();
        assert_eq!(msg.first_header("Subject"), Some("Tech Support"));
    }

    #[test]
    fn opaque_body_preserved() {
        let body = b"\x00\x01binary\xffpayload";
        let raw = format!(
            "{}Content-Type: message/sip\r\nContent-Length: {}\r\n\r\n",
            INVITE.trim_end_matches("Content-Length: 0\r\n\r\n"),
            body.len()
        );
        let mut bytes = raw.into_bytes();
        bytes.extend_from_slice(body);
        let msg = parse_sip(&bytes).unwrap();
        let (ct, b) = msg.opaque_body().unwrap();
        assert_eq!(ct, "message/sip");
        assert_eq!(b, body);
        assert_eq!(serialize_sip(&msg).unwrap(), bytes);
    }

    #[test]
    fn list_entries_flatten_commas_and_repeats() {
        let raw = INVITE.replace(
            "Via: SIP/2.0/UDP vsp.example.com:5060;branch=z9hG4bK87asdks7\r\n",
            "Via: SIP/2.0/UDP a.example.com;branch=z9hG4bK1, SIP/2.0/UDP b.example.com;branch=z9hG4bK2\r\n\
Via: SIP/2.0/UDP c.example.com;branch=z9hG4bK3\r\n",
        );
        let msg = parse_sip(raw.as_bytes()).unwrap();
        let vias = msg.list_entries("Via");
        assert_eq!(vias.len(), 3);
        assert!(vias[2].contains("c.example.com"));
    }
}
