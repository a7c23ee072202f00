//! Line-oriented SDP session model.
//!
//! Every `x=value` line is kept in order with its raw text, so an untouched
//! body re-serializes byte for byte. The privacy-relevant fields (origin,
//! connection, email, phone, information, uri, session name, media lines)
//! are addressable and individually rewritable; everything else passes
//! through verbatim.

use std::fmt;

use super::SigError;

/// One SDP line: type letter plus the text after `=`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdpLine {
    pub kind: char,
    pub value: String,
}

/// Parsed `o=` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdpOrigin {
    pub username: String,
    pub sess_id: String,
    pub sess_version: String,
    pub net_type: String,
    pub addr_type: String,
    pub address: String,
}

impl SdpOrigin {
    fn parse(value: &str) -> Option<SdpOrigin> {
        let parts: Vec<&str> = value.split_whitespace().collect();
        if parts.len() != 6 {
            return None;
        }
        Some(SdpOrigin {
            username: parts[0].to_string(),
            sess_id: parts[1].to_string(),
            sess_version: parts[2].to_string(),
            net_type: parts[3].to_string(),
            addr_type: parts[4].to_string(),
            address: parts[5].to_string(),
        })
    }

    fn render(&self) -> String {
        format!(
            "{} {} {} {} {} {}",
            self.username, self.sess_id, self.sess_version, self.net_type, self.addr_type,
            self.address
        )
    }
}

/// Parsed `c=` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdpConnection {
    pub net_type: String,
    pub addr_type: String,
    pub address: String,
}

impl SdpConnection {
    fn parse(value: &str) -> Option<SdpConnection> {
        let parts: Vec<&str> = value.split_whitespace().collect();
        if parts.len() != 3 {
            return None;
        }
        Some(SdpConnection {
            net_type: parts[0].to_string(),
            addr_type: parts[1].to_string(),
            address: parts[2].to_string(),
        })
    }

    fn render(&self) -> String {
        format!("{} {} {}", self.net_type, self.addr_type, self.address)
    }
}

/// Parsed `m=` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdpMedia {
    pub media: String,
    pub port: u16,
    pub proto: String,
    pub formats: Vec<String>,
}

/// An SDP body as an ordered list of lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdpSession {
    pub lines: Vec<SdpLine>,
}

impl SdpSession {
    /// Parse `x=value` lines. Accepts LF or CRLF endings; errors carry the
    /// 1-based offending line number.
    pub fn parse(text: &str) -> Result<SdpSession, SigError> {
        let mut lines = Vec::new();
        for (no, raw) in text.split("\r\n").enumerate() {
            if raw.is_empty() {
                continue;
            }
            let mut chars = raw.chars();
            let kind = chars.next().ok_or(SigError::MalformedSdpLine(no + 1))?;
            if chars.next() != Some('=') || !kind.is_ascii_alphabetic() {
                return Err(SigError::MalformedSdpLine(no + 1));
            }
            lines.push(SdpLine {
                kind,
                value: raw[2..].to_string(),
            });
        }
        Ok(SdpSession { lines })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push(line.kind);
            out.push('=');
            out.push_str(&line.value);
            out.push_str("\r\n");
        }
        out
    }

    fn first_value(&self, kind: char) -> Option<&str> {
        self.lines
            .iter()
            .find(|l| l.kind == kind)
            .map(|l| l.value.as_str())
    }

    pub fn origin(&self) -> Option<SdpOrigin> {
        self.first_value('o').and_then(SdpOrigin::parse)
    }

    pub fn connection(&self) -> Option<SdpConnection> {
        self.first_value('c').and_then(SdpConnection::parse)
    }

    pub fn session_name(&self) -> Option<&str> {
        self.first_value('s')
    }

    pub fn email(&self) -> Option<&str> {
        self.first_value('e')
    }

    pub fn phone(&self) -> Option<&str> {
        self.first_value('p')
    }

    pub fn information(&self) -> Option<&str> {
        self.first_value('i')
    }

    pub fn uri(&self) -> Option<&str> {
        self.first_value('u')
    }

    pub fn media(&self) -> Vec<SdpMedia> {
        self.lines
            .iter()
            .filter(|l| l.kind == 'm')
            .filter_map(|l| {
                let parts: Vec<&str> = l.value.split_whitespace().collect();
                if parts.len() < 3 {
                    return None;
                }
                Some(SdpMedia {
                    media: parts[0].to_string(),
                    port: parts[1].parse().ok()?,
                    proto: parts[2].to_string(),
                    formats: parts[3..].iter().map(|s| s.to_string()).collect(),
                })
            })
            .collect()
    }

    /// Remove every line of the given kind. Returns how many were dropped.
    pub fn remove_lines(&mut self, kind: char) -> usize {
        let before = self.lines.len();
        self.lines.retain(|l| l.kind != kind);
        before - self.lines.len()
    }

    pub fn set_origin(&mut self, origin: &SdpOrigin) {
        if let Some(line) = self.lines.iter_mut().find(|l| l.kind == 'o') {
            line.value = origin.render();
        }
    }

    pub fn set_connection(&mut self, conn: &SdpConnection) {
        for line in self.lines.iter_mut().filter(|l| l.kind == 'c') {
            line.value = conn.render();
        }
    }

    /// Rewrite the port of the i-th media line (0-based, counting m= lines).
    pub fn set_media_port(&mut self, index: usize, port: u16) {
        let mut seen = 0;
        for line in self.lines.iter_mut().filter(|l| l.kind == 'm') {
            if seen == index {
                let mut parts: Vec<String> =
                    line.value.split_whitespace().map(|s| s.to_string()).collect();
                if parts.len() >= 2 {
                    parts[1] = port.to_string();
                    line.value = parts.join(" ");
                }
                return;
            }
            seen += 1;
        }
    }
}

impl fmt::Display for SdpSession {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = "v=0\r\n\
o=charles 2890844526 2890842807 IN IP4 128.59.66.4\r\n\
s=VoIP seminar\r\n\
i=A seminar on VoIP\r\n\
u=http://www.cs.columbia.edu/~charles/sdp.ps\r\n\
e=charles@cs.columbia.edu\r\n\
p=+12125551234\r\n\
c=IN IP4 128.59.66.4\r\n\
t=0 0\r\n\
m=audio 49170 RTP/AVP 0\r\n";

    #[test]
    fn full_body_round_trips() {
        let sdp = SdpSession::parse(FULL).unwrap();
        assert_eq!(sdp.render(), FULL);
    }

    #[test]
    fn table_fields_addressable() {
        let sdp = SdpSession::parse(FULL).unwrap();
        assert_eq!(sdp.email(), Some("charles@cs.columbia.edu"));
        assert_eq!(sdp.phone(), Some("+12125551234"));
        assert_eq!(sdp.session_name(), Some("VoIP seminar"));
        assert_eq!(sdp.information(), Some("A seminar on VoIP"));
        assert_eq!(sdp.uri(), Some("http://www.cs.columbia.edu/~charles/sdp.ps"));
        let origin = sdp.origin().unwrap();
        assert_eq!(origin.username, "charles");
        assert_eq!(origin.address, "128.59.66.4");
        assert_eq!(sdp.connection().unwrap().address, "128.59.66.4");
        let media = sdp.media();
        assert_eq!(media.len(), 1);
        assert_eq!(media[0].port, 49170);
    }

    #[test]
    fn minimal_body_has_absent_fields() {
        let body = "v=0\r\no=- 1 1 IN IP4 10.0.0.1\r\ns=-\r\nc=IN IP4 10.0.0.1\r\nt=0 0\r\n";
        let sdp = SdpSession::parse(body).unwrap();
        assert!(sdp.email().is_none());
        assert!(sdp.phone().is_none());
        assert!(sdp.information().is_none());
        assert!(sdp.uri().is_none());
        assert_eq!(sdp.render(), body);
    }

    #[test]
    fn malformed_line_is_reported_with_number() {
        let body = "v=0\r\nnot sdp\r\n";
        match SdpSession::parse(body) {
            Err(SigError::MalformedSdpLine(2)) => {}
            other => panic!("expected MalformedSdpLine(2), got {other:?}"),
        }
    }

    #[test]
    fn rewrite_connection_and_port() {
        let mut sdp = SdpSession::parse(FULL).unwrap();
        let mut conn = sdp.connection().unwrap();
        conn.address = "203.0.113.9".to_string();
        sdp.set_connection(&conn);
        sdp.set_media_port(0, 30000);
        assert!(sdp.render().contains("c=IN IP4 203.0.113.9\r\n"));
        assert!(sdp.render().contains("m=audio 30000 RTP/AVP 0\r\n"));
        // everything else untouched
        assert!(sdp.render().contains("o=charles 2890844526"));
    }
}
