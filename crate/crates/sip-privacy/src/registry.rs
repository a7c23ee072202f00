//! Registry of privacy-sensitive message fields.
//!
//! Encodes which SIP header fields, SDP fields and RTCP SDES items leak user
//! or service-provider information, whether each can be removed, must be
//! anonymized, or is routing-critical and therefore left to the network
//! privacy service, and what a proxy may legally do to it in requests.
//!
//! The registry is immutable and complete by construction; tests assert that
//! iterating it reproduces the reference field sets exactly.

use serde::Serialize;

/// Provider-scoped fields cannot be attributed to one provider type (access,
/// voice, email) without knowing the actual service relationships, so
/// provider-scope scrubbing acts on all of them.
pub const PROVIDER_AMBIGUITY_NOTE: &str =
    "provider-scoped fields may belong to different provider types; \
     provider-scope operations act on all of them";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Protocol {
    #[serde(rename = "SIP")]
    Sip,
    #[serde(rename = "SDP")]
    Sdp,
    #[serde(rename = "RTCP-SDES")]
    RtcpSdes,
}

/// Whose information a field reveals: user (`u`), provider (`p`) or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PrivacyScope {
    #[serde(rename = "u")]
    User,
    #[serde(rename = "p")]
    Provider,
    #[serde(rename = "up")]
    Both,
}

impl PrivacyScope {
    /// True when a field marked `self` is in scope for a `query` scrub.
    /// `Both` on either side matches everything.
    pub fn matches(&self, query: PrivacyScope) -> bool {
        matches!(
            (self, query),
            (PrivacyScope::Both, _)
                | (_, PrivacyScope::Both)
                | (PrivacyScope::User, PrivacyScope::User)
                | (PrivacyScope::Provider, PrivacyScope::Provider)
        )
    }
}

/// What can be done about a field without breaking the session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Disposition {
    /// Optional field; user-side privacy simply deletes it.
    Removable,
    /// Mandatory field; the sensitive part is replaced instead of deleted.
    Anonymizable,
    /// Used to route messages of the current dialog; only a network
    /// intermediary can conceal it.
    RoutingCritical,
}

/// Proxy powers over a header field in requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProxyMutability {
    pub may_add: bool,
    pub may_modify: bool,
    pub may_delete: bool,
    /// Must stay readable by proxies, so it cannot be end-to-end encrypted.
    pub must_read: bool,
}

impl ProxyMutability {
    const fn flags(s: &str) -> ProxyMutability {
        // tiny const parser over "amdr" flag strings
        let b = s.as_bytes();
        let mut m = ProxyMutability {
            may_add: false,
            may_modify: false,
            may_delete: false,
            must_read: false,
        };
        let mut i = 0;
        while i < b.len() {
            match b[i] {
                b'a' => m.may_add = true,
                b'm' => m.may_modify = true,
                b'd' => m.may_delete = true,
                b'r' => m.must_read = true,
                _ => {}
            }
            i += 1;
        }
        m
    }

    /// A mutation a proxy may not perform forces B2BUA handling.
    pub fn forces_b2bua_for_delete(&self) -> bool {
        !self.may_delete
    }

    pub fn forces_b2bua_for_modify(&self) -> bool {
        !self.may_modify && !self.may_delete
    }
}

/// Registry entry for one (protocol, field) pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FieldClass {
    pub protocol: Protocol,
    #[serde(rename = "field")]
    pub name: &'static str,
    pub scope: PrivacyScope,
    pub disposition: Disposition,
    pub mutability: ProxyMutability,
    pub notes: &'static str,
}

impl FieldClass {
    /// Authentication machinery is outside privacy processing; the scrubber
    /// never touches these fields.
    pub fn is_auth_exempt(&self) -> bool {
        self.notes.starts_with("auth-exempt")
    }
}

const fn entry(
    protocol: Protocol,
    name: &'static str,
    scope: PrivacyScope,
    disposition: Disposition,
    proxy: &'static str,
    notes: &'static str,
) -> FieldClass {
    FieldClass {
        protocol,
        name,
        scope,
        disposition,
        mutability: ProxyMutability::flags(proxy),
        notes,
    }
}

use Disposition::{Anonymizable, Removable, RoutingCritical};
use PrivacyScope::{Both, Provider, User};
use Protocol::{RtcpSdes, Sdp, Sip};

/// Every privacy-sensitive field, one entry per (protocol, name).
pub static REGISTRY: &[FieldClass] = &[
    // SIP header fields
    entry(Sip, "Alert-Info", Provider, Removable, "ar", ""),
    entry(Sip, "Authorization", User, Anonymizable, "", "auth-exempt: left to the authentication layer"),
    entry(Sip, "Call-ID", Both, Anonymizable, "r", "host part replaced by a random token"),
    entry(Sip, "Call-Info", Provider, Removable, "ar", ""),
    entry(Sip, "Contact", Both, RoutingCritical, "", "concealed by the network privacy service"),
    entry(Sip, "Error-Info", Provider, Removable, "a", "responses only"),
    entry(Sip, "From", Both, Anonymizable, "r", "URI not used for in-dialog routing"),
    entry(Sip, "In-Reply-To", Both, Removable, "", "host part randomized when kept"),
    entry(Sip, "Organization", Both, Removable, "ar", "scope depends on usage; fixed to the reference marking"),
    entry(Sip, "Proxy-Authenticate", Provider, Anonymizable, "ar", "auth-exempt: left to the authentication layer"),
    entry(Sip, "Record-Route", Provider, RoutingCritical, "ar", "concealed by the network privacy service"),
    entry(Sip, "Reply-To", Both, Removable, "", ""),
    entry(Sip, "Route", Provider, RoutingCritical, "adr", "concealed by the network privacy service"),
    entry(Sip, "Server", Provider, Removable, "", "scope depends on usage; fixed to the reference marking"),
    entry(Sip, "Subject", User, Removable, "", "scope depends on usage; fixed to the reference marking"),
    entry(Sip, "To", Both, Anonymizable, "r", "names the destination; not anonymized by the originator"),
    entry(Sip, "User-Agent", Provider, Removable, "", "scope depends on usage; fixed to the reference marking"),
    entry(Sip, "Via", Provider, RoutingCritical, "amr", "concealed by the network privacy service"),
    entry(Sip, "Warning", Provider, Removable, "r", ""),
    entry(Sip, "WWW-Authenticate", Provider, Anonymizable, "ar", "auth-exempt: left to the authentication layer"),
    // SDP fields
    entry(Sdp, "Origin", Both, RoutingCritical, "", "address rewritten by session privacy; username scrubbed at user scope"),
    entry(Sdp, "Email", Both, Removable, "", ""),
    entry(Sdp, "Phone", User, Removable, "", ""),
    entry(Sdp, "Session-name", User, Anonymizable, "", "mandatory SDP line"),
    entry(Sdp, "Information", User, Removable, "", ""),
    entry(Sdp, "URI", Both, Removable, "", ""),
    entry(Sdp, "Connection", Both, RoutingCritical, "", "address rewritten by session privacy"),
    // RTCP SDES items
    entry(RtcpSdes, "CNAME", Both, Anonymizable, "", "host part replaced by a random token"),
    entry(RtcpSdes, "NAME", User, Removable, "", ""),
    entry(RtcpSdes, "LOC", User, Removable, "", ""),
    entry(RtcpSdes, "EMAIL", Both, Removable, "", ""),
    entry(RtcpSdes, "TOOL", Provider, Removable, "", "scope depends on usage; fixed to the reference marking"),
];

/// Look up the classification of a field. `None` means the field carries no
/// privacy-sensitive information (e.g. CSeq, Max-Forwards). Total function:
/// never fails.
pub fn classify(protocol: Protocol, name: &str) -> Option<&'static FieldClass> {
    REGISTRY
        .iter()
        .find(|f| f.protocol == protocol && f.name.eq_ignore_ascii_case(name))
}

/// Names of the removable fields of a protocol that fall under `scope`.
pub fn removable_fields(protocol: Protocol, scope: PrivacyScope) -> Vec<&'static str> {
    REGISTRY
        .iter()
        .filter(|f| {
            f.protocol == protocol && f.disposition == Removable && f.scope.matches(scope)
        })
        .map(|f| f.name)
        .collect()
}

/// The ten removable SIP header fields of user-side removal, regardless of
/// scope.
pub fn sip_removal_candidates() -> Vec<&'static str> {
    removable_fields(Sip, Both)
}

/// Request-presence data per method, for consistency checks against the
/// header-field summary table.
pub mod table4 {
    /// Request methods in column order.
    pub const METHODS: [&str; 6] = ["ACK", "BYE", "CANCEL", "INVITE", "OPTIONS", "REGISTER"];

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Presence {
        Mandatory,
        Optional,
        NotApplicable,
        Conditional,
    }

    use Presence::{Conditional as C, Mandatory as M, NotApplicable as N, Optional as O};

    /// Presence of each privacy-sensitive SIP header in requests, by method.
    /// Response-only headers are all `NotApplicable` here.
    pub static REQUEST_PRESENCE: &[(&str, [Presence; 6])] = &[
        ("Alert-Info", [N, N, N, O, N, N]),
        ("Authorization", [O, O, O, O, O, O]),
        ("Call-ID", [M, M, M, M, M, M]),
        ("Call-Info", [N, N, N, O, O, O]),
        ("Contact", [O, N, N, M, O, O]),
        ("Error-Info", [N, N, N, N, N, N]),
        ("From", [M, M, M, M, M, M]),
        ("In-Reply-To", [N, N, N, O, N, N]),
        ("Organization", [N, N, N, O, O, O]),
        ("Proxy-Authenticate", [N, N, N, N, N, N]),
        ("Record-Route", [O, O, O, O, O, N]),
        ("Reply-To", [N, N, N, O, N, N]),
        ("Route", [C, C, C, C, C, C]),
        ("Server", [N, N, N, N, N, N]),
        ("Subject", [N, N, N, O, N, N]),
        ("To", [M, M, M, M, M, M]),
        ("User-Agent", [O, O, O, O, O, O]),
        ("Via", [M, M, M, M, M, M]),
        ("Warning", [N, O, O, O, O, O]),
        ("WWW-Authenticate", [N, N, N, N, N, N]),
    ];

    pub fn request_presence(name: &str) -> Option<&'static [Presence; 6]> {
        REQUEST_PRESENCE
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, p)| p)
    }
}
