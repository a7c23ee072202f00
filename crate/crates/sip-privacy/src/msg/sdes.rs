//! RTCP Source Description (SDES) packet codec.
//!
//! Single-chunk packets only: header, SSRC, then type/length-prefixed items
//! terminated by a null octet and padded to a 32-bit boundary. Round trips
//! are byte-stable for packets in this canonical layout.

use super::SigError;

const RTCP_VERSION: u8 = 2;
const PT_SDES: u8 = 202;

/// SDES item types carrying user or provider information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SdesItemKind {
    Cname,
    Name,
    Email,
    Phone,
    Loc,
    Tool,
}

impl SdesItemKind {
    pub fn code(&self) -> u8 {
        match self {
            SdesItemKind::Cname => 1,
            SdesItemKind::Name => 2,
            SdesItemKind::Email => 3,
            SdesItemKind::Phone => 4,
            SdesItemKind::Loc => 5,
            SdesItemKind::Tool => 6,
        }
    }

    pub fn from_code(code: u8) -> Option<SdesItemKind> {
        match code {
            1 => Some(SdesItemKind::Cname),
            2 => Some(SdesItemKind::Name),
            3 => Some(SdesItemKind::Email),
            4 => Some(SdesItemKind::Phone),
            5 => Some(SdesItemKind::Loc),
            6 => Some(SdesItemKind::Tool),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SdesItemKind::Cname => "CNAME",
            SdesItemKind::Name => "NAME",
            SdesItemKind::Email => "EMAIL",
            SdesItemKind::Phone => "PHONE",
            SdesItemKind::Loc => "LOC",
            SdesItemKind::Tool => "TOOL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdesItem {
    pub kind: SdesItemKind,
    pub text: String,
}

/// A parsed single-chunk SDES packet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RtcpSdesPacket {
    pub ssrc: u32,
    pub items: Vec<SdesItem>,
}

impl RtcpSdesPacket {
    pub fn new(ssrc: u32, items: Vec<SdesItem>) -> RtcpSdesPacket {
        RtcpSdesPacket { ssrc, items }
    }

    pub fn item(&self, kind: SdesItemKind) -> Option<&str> {
        self.items
            .iter()
            .find(|i| i.kind == kind)
            .map(|i| i.text.as_str())
    }

    pub fn cname(&self) -> Option<&str> {
        self.item(SdesItemKind::Cname)
    }
}

pub fn parse_sdes(bytes: &[u8]) -> Result<RtcpSdesPacket, SigError> {
    if bytes.len() < 8 || bytes.len() % 4 != 0 {
        return Err(SigError::TruncatedItem);
    }
    let version = bytes[0] >> 6;
    let source_count = bytes[0] & 0x1f;
    if version != RTCP_VERSION || bytes[1] != PT_SDES || source_count != 1 {
        return Err(SigError::InvariantViolation(
            "not a single-chunk SDES packet".to_string(),
        ));
    }
    let declared_words = u16::from_be_bytes([bytes[2], bytes[3]]) as usize;
    if (declared_words + 1) * 4 != bytes.len() {
        return Err(SigError::TruncatedItem);
    }
    let ssrc = u32::from_be_bytes([bytes[4], bytes[5], bytes[6], bytes[7]]);

    let mut items = Vec::new();
    let mut pos = 8;
    loop {
        if pos >= bytes.len() {
            return Err(SigError::TruncatedItem);
        }
        let code = bytes[pos];
        if code == 0 {
            break;
        }
        if pos + 1 >= bytes.len() {
            return Err(SigError::TruncatedItem);
        }
        let len = bytes[pos + 1] as usize;
        if pos + 2 + len > bytes.len() {
            return Err(SigError::TruncatedItem);
        }
        let text = std::str::from_utf8(&bytes[pos + 2..pos + 2 + len])
            .map_err(|_| SigError::TruncatedItem)?
            .to_string();
        if text.is_empty() {
            return Err(SigError::InvariantViolation("empty SDES item".to_string()));
        }
        if let Some(kind) = SdesItemKind::from_code(code) {
            items.push(SdesItem { kind, text });
        }
        pos += 2 + len;
    }
    // remainder must be null padding
    if bytes[pos..].iter().any(|&b| b != 0) {
        return Err(SigError::TruncatedItem);
    }

    if items.iter().all(|i| i.kind != SdesItemKind::Cname) {
        return Err(SigError::InvariantViolation(
            "SDES packet without CNAME item".to_string(),
        ));
    }
    Ok(RtcpSdesPacket { ssrc, items })
}

pub fn serialize_sdes(packet: &RtcpSdesPacket) -> Vec<u8> {
    let mut body = Vec::new();
    body.extend_from_slice(&packet.ssrc.to_be_bytes());
    for item in &packet.items {
        body.push(item.kind.code());
        body.push(item.text.len() as u8);
        body.extend_from_slice(item.text.as_bytes());
    }
    body.push(0); // item list terminator
    while body.len() % 4 != 0 {
        body.push(0);
    }

    let words = (body.len() + 4) / 4 - 1;
    let mut out = Vec::with_capacity(body.len() + 4);
    out.push((RTCP_VERSION << 6) | 1);
    out.push(PT_SDES);
    out.extend_from_slice(&(words as u16).to_be_bytes());
    out.extend_from_slice(&body);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RtcpSdesPacket {
        RtcpSdesPacket::new(
            0x1234_5678,
            vec![
                SdesItem {
                    kind: SdesItemKind::Cname,
                    text: "doe@sleepy.example.com".to_string(),
                },
                SdesItem {
                    kind: SdesItemKind::Name,
                    text: "Charles".to_string(),
                },
                SdesItem {
                    kind: SdesItemKind::Tool,
                    text: "videotool 1.2".to_string(),
                },
            ],
        )
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let bytes = serialize_sdes(&sample());
        let parsed = parse_sdes(&bytes).unwrap();
        assert_eq!(parsed, sample());
        assert_eq!(serialize_sdes(&parsed), bytes);
    }

    #[test]
    fn three_items_parse_in_order() {
        let parsed = parse_sdes(&serialize_sdes(&sample())).unwrap();
        assert_eq!(parsed.items.len(), 3);
        assert_eq!(parsed.cname(), Some("doe@sleepy.example.com"));
        assert_eq!(parsed.item(SdesItemKind::Name), Some("Charles"));
        assert_eq!(parsed.item(SdesItemKind::Tool), Some("videotool 1.2"));
    }

    #[test]
    fn cname_only_packet() {
        let packet = RtcpSdesPacket::new(
            7,
            vec![SdesItem {
                kind: SdesItemKind::Cname,
                text: "x@y.example".to_string(),
            }],
        );
        let parsed = parse_sdes(&serialize_sdes(&packet)).unwrap();
        assert_eq!(parsed.items.len(), 1);
    }

    #[test]
    fn item_length_past_end_is_truncated() {
        let mut bytes = serialize_sdes(&sample());
        // corrupt the first item length to run past the packet
        bytes[9] = 200;
        match parse_sdes(&bytes) {
            Err(SigError::TruncatedItem) => {}
            other => panic!("expected TruncatedItem, got {other:?}"),
        }
    }

    #[test]
    fn missing_cname_rejected() {
        let packet = RtcpSdesPacket::new(
            7,
            vec![SdesItem {
                kind: SdesItemKind::Name,
                text: "Charles".to_string(),
            }],
        );
        assert!(matches!(
            parse_sdes(&serialize_sdes(&packet)),
            Err(SigError::InvariantViolation(_))
        ));
    }
}
