//! SIP / tel URI and name-addr parsing with byte-stable serialization.
//!
//! The codec keeps parameter order and the exact display-name / angle-bracket
//! shape of the input, so `serialize(parse(s)) == s` for every value it
//! accepts. Privacy operations edit individual components and re-emit.

use std::fmt;

use super::SigError;

/// URI scheme. Only the schemes the privacy logic has to understand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Sip,
    Sips,
    Tel,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Sip => "sip",
            Scheme::Sips => "sips",
            Scheme::Tel => "tel",
        }
    }
}

/// A parsed SIP, SIPS or tel URI.
///
/// For tel URIs the subscriber number lives in `user` and `host` is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SipUri {
    pub scheme: Scheme,
    pub user: Option<String>,
    pub host: String,
    pub port: Option<u16>,
    /// URI parameters in source order; `None` value means a flag like `;lr`.
    pub params: Vec<(String, Option<String>)>,
}

impl SipUri {
    pub fn parse(s: &str) -> Result<SipUri, SigError> {
        let (scheme, rest) = if let Some(r) = s.strip_prefix("sips:") {
            (Scheme::Sips, r)
        } else if let Some(r) = s.strip_prefix("sip:") {
            (Scheme::Sip, r)
        } else if let Some(r) = s.strip_prefix("tel:") {
            (Scheme::Tel, r)
        } else {
            return Err(SigError::MalformedUri(s.to_string()));
        };

        let (core, params_text) = match rest.find(';') {
            Some(i) => (&rest[..i], Some(&rest[i + 1..])),
            None => (rest, None),
        };

        let mut params = Vec::new();
        if let Some(text) = params_text {
            for p in text.split(';') {
                if p.is_empty() {
                    return Err(SigError::MalformedUri(s.to_string()));
                }
                match p.split_once('=') {
                    Some((k, v)) => params.push((k.to_string(), Some(v.to_string()))),
                    None => params.push((p.to_string(), None)),
                }
            }
        }

        if scheme == Scheme::Tel {
            if core.is_empty() {
                return Err(SigError::MalformedUri(s.to_string()));
            }
            return Ok(SipUri {
                scheme,
                user: Some(core.to_string()),
                host: String::new(),
                port: None,
                params,
            });
        }

        let (user, hostport) = match core.rfind('@') {
            Some(i) => (Some(core[..i].to_string()), &core[i + 1..]),
            None => (None, core),
        };
        let (host, port) = match hostport.rsplit_once(':') {
            Some((h, p)) if p.chars().all(|c| c.is_ascii_digit()) && !p.is_empty() => {
                let port = p
                    .parse::<u16>()
                    .map_err(|_| SigError::MalformedUri(s.to_string()))?;
                (h.to_string(), Some(port))
            }
            _ => (hostport.to_string(), None),
        };
        if host.is_empty() {
            return Err(SigError::MalformedUri(s.to_string()));
        }

        Ok(SipUri {
            scheme,
            user,
            host,
            port,
            params,
        })
    }

    /// Value of a URI parameter, `Some(None)` for bare flags.
    pub fn param(&self, name: &str) -> Option<Option<&str>> {
        self.params
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_deref())
    }

    pub fn set_param(&mut self, name: &str, value: Option<String>) {
        if let Some(slot) = self
            .params
            .iter_mut()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
        {
            slot.1 = value;
        } else {
            self.params.push((name.to_string(), value));
        }
    }

    pub fn remove_param(&mut self, name: &str) -> bool {
        let before = self.params.len();
        self.params.retain(|(k, _)| !k.eq_ignore_ascii_case(name));
        self.params.len() != before
    }
}

impl fmt::Display for SipUri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.scheme.as_str())?;
        if self.scheme == Scheme::Tel {
            write!(f, "{}", self.user.as_deref().unwrap_or(""))?;
        } else {
            if let Some(user) = &self.user {
                write!(f, "{}@", user)?;
            }
            write!(f, "{}", self.host)?;
            if let Some(port) = self.port {
                write!(f, ":{}", port)?;
            }
        }
        for (k, v) in &self.params {
            match v {
                Some(v) => write!(f, ";{}={}", k, v)?,
                None => write!(f, ";{}", k)?,
            }
        }
        Ok(())
    }
}

/// A name-addr header value: optional display name, URI, header parameters.
///
/// Used for From, To, Contact, Reply-To, Route and Record-Route values.
/// `bracketed` and `display_quoted` remember the input shape so an
/// untouched value re-serializes byte for byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Address {
    pub display_name: Option<String>,
    pub display_quoted: bool,
    pub bracketed: bool,
    pub uri: SipUri,
    /// Header parameters (after `>`), e.g. `tag`, `expires`.
    pub params: Vec<(String, Option<String>)>,
}

impl Address {
    pub fn parse(s: &str) -> Result<Address, SigError> {
        let s = s.trim();
        if let Some(open) = find_unquoted(s, '<') {
            let close = s[open..]
                .find('>')
                .map(|i| open + i)
                .ok_or_else(|| SigError::MalformedUri(s.to_string()))?;
            let display_raw = s[..open].trim();
            let (display_name, display_quoted) = if display_raw.is_empty() {
                (None, false)
            } else if display_raw.starts_with('"') && display_raw.ends_with('"') {
                (
                    Some(display_raw[1..display_raw.len() - 1].to_string()),
                    true,
                )
            } else {
                (Some(display_raw.to_string()), false)
            };
            let uri = SipUri::parse(&s[open + 1..close])?;
            let params = parse_params(s[close + 1..].trim_start_matches(';'))?;
            Ok(Address {
                display_name,
                display_quoted,
                bracketed: true,
                uri,
                params,
            })
        } else {
            // addr-spec form: everything after the first ';' is a header param
            let (uri_part, param_part) = match s.find(';') {
                Some(i) => (&s[..i], &s[i + 1..]),
                None => (s, ""),
            };
            let uri = SipUri::parse(uri_part)?;
            let params = parse_params(param_part)?;
            Ok(Address {
                display_name: None,
                display_quoted: false,
                bracketed: false,
                uri,
                params,
            })
        }
    }

    pub fn param(&self, name: &str) -> Option<Option<&str>> {
        self.params
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_deref())
    }

    pub fn tag(&self) -> Option<&str> {
        self.param("tag").flatten()
    }

    pub fn set_tag(&mut self, tag: &str) {
        if let Some(slot) = self
            .params
            .iter_mut()
            .find(|(k, _)| k.eq_ignore_ascii_case("tag"))
        {
            slot.1 = Some(tag.to_string());
        } else {
            self.params.push(("tag".to_string(), Some(tag.to_string())));
        }
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.display_name {
            if self.display_quoted {
                write!(f, "\"{}\" ", name)?;
            } else {
                write!(f, "{} ", name)?;
            }
        }
        if self.bracketed {
            write!(f, "<{}>", self.uri)?;
        } else {
            write!(f, "{}", self.uri)?;
        }
        for (k, v) in &self.params {
            match v {
                Some(v) => write!(f, ";{}={}", k, v)?,
                None => write!(f, ";{}", k)?,
            }
        }
        Ok(())
    }
}

fn parse_params(text: &str) -> Result<Vec<(String, Option<String>)>, SigError> {
    let mut params = Vec::new();
    if text.is_empty() {
        return Ok(params);
    }
    for p in text.split(';') {
        if p.is_empty() {
            return Err(SigError::MalformedUri(text.to_string()));
        }
        match p.split_once('=') {
            Some((k, v)) => params.push((k.to_string(), Some(v.to_string()))),
            None => params.push((p.to_string(), None)),
        }
    }
    Ok(params)
}

/// Position of `needle` outside double quotes, or None.
fn find_unquoted(s: &str, needle: char) -> Option<usize> {
    let mut in_quotes = false;
    for (i, c) in s.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            c if c == needle && !in_quotes => return Some(i),
            _ => {}
        }
    }
    None
}

/// Split a comma-separated header value into entries, respecting quotes
/// and angle brackets. Used for Via, Route and Record-Route lists.
pub fn split_list_value(value: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0u32;
    let mut in_quotes = false;
    let mut start = 0;
    for (i, c) in value.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '<' if !in_quotes => depth += 1,
            '>' if !in_quotes && depth > 0 => depth -= 1,
            ',' if !in_quotes && depth == 0 => {
                out.push(value[start..i].trim().to_string());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = value[start..].trim();
    if !last.is_empty() {
        out.push(last.to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uri_round_trips() {
        for s in [
            "sip:bob@vspexample.com",
            "sips:alice@vsp.example.com:5061",
            "sip:vsp1.example.com;lr",
            "sip:+12125551212@vsp.example.com",
            "tel:+12125551234;phone-context=example.com",
            "sip:anonymous@anonymous.invalid",
            "sip:sfa.vspa.example.com:5060;lr;transport=udp",
        ] {
            let uri = SipUri::parse(s).expect(s);
            assert_eq!(uri.to_string(), s, "round trip of {s}");
        }
    }

    #[test]
    fn uri_components() {
        let uri = SipUri::parse("sip:bob@vspexample.com:5062;transport=tcp").unwrap();
        assert_eq!(uri.scheme, Scheme::Sip);
        assert_eq!(uri.user.as_deref(), Some("bob"));
        assert_eq!(uri.host, "vspexample.com");
        assert_eq!(uri.port, Some(5062));
        assert_eq!(uri.param("transport"), Some(Some("tcp")));
    }

    #[test]
    fn tel_uri_has_no_host() {
        let uri = SipUri::parse("tel:+12125551234;phone-context=example.com").unwrap();
        assert_eq!(uri.user.as_deref(), Some("+12125551234"));
        assert!(uri.host.is_empty());
        assert_eq!(uri.param("phone-context"), Some(Some("example.com")));
    }

    #[test]
    fn sip_uri_requires_host() {
        assert!(SipUri::parse("sip:@").is_err());
        assert!(SipUri::parse("http://x").is_err());
    }

    #[test]
    fn address_round_trips() {
        for s in [
            "\"Bob\" <sip:bob@vspexample.com>;tag=hyh8",
            "<sip:vsp1.example.com;lr>",
            "sip:+12125551212@vsp.example.com",
            "Bob <sip:bob@vsp.example.com>",
            "\"Alice\" <sips:alice@vsp.example.com>;expires=60",
        ] {
            let addr = Address::parse(s).expect(s);
            assert_eq!(addr.to_string(), s, "round trip of {s}");
        }
    }

    #[test]
    fn address_components() {
        let addr = Address::parse("\"Bob\" <sip:bob@vspexample.com>;tag=hyh8").unwrap();
        assert_eq!(addr.display_name.as_deref(), Some("Bob"));
        assert_eq!(addr.uri.host, "vspexample.com");
        assert_eq!(addr.tag(), Some("hyh8"));
    }

    #[test]
    fn addr_spec_params_are_header_params() {
        let addr = Address::parse("sip:bob@b.example.com;tag=88").unwrap();
        assert!(!addr.bracketed);
        assert_eq!(addr.tag(), Some("88"));
        assert!(addr.uri.params.is_empty());
    }

    #[test]
    fn list_split_respects_brackets() {
        let entries = split_list_value("<sip:a.example.com;lr>, <sip:b.example.com;lr>");
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0], "<sip:a.example.com;lr>");
        let one = split_list_value("\"x,y\" <sip:a@h>");
        assert_eq!(one.len(), 1);
    }
}
