//! Dialog identification for vault keying and B2BUA leg matching.

use serde::{Deserialize, Serialize};

use super::{SigError, SipMessage};

/// Identifies a SIP dialog: Call-ID plus From tag, with the To tag once the
/// far end has assigned one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DialogKey {
    pub call_id: String,
    pub from_tag: String,
    pub to_tag: Option<String>,
}

impl DialogKey {
    /// True when the two keys can belong to the same dialog. Tag roles swap
    /// with message direction, so the tag pair is compared unordered and a
    /// missing To tag matches anything.
    pub fn matches(&self, other: &DialogKey) -> bool {
        if self.call_id != other.call_id {
            return false;
        }
        let straight = self.from_tag == other.from_tag
            && compatible(&self.to_tag, &other.to_tag);
        let swapped = Some(self.from_tag.as_str()) == other.to_tag.as_deref()
            && compatible(&self.to_tag, &Some(other.from_tag.clone()));
        straight || swapped
    }
}

fn compatible(a: &Option<String>, b: &Option<String>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    }
}

/// Extract the dialog key of a message.
pub fn dialog_key(msg: &SipMessage) -> Result<DialogKey, SigError> {
    let call_id = msg
        .first_header("Call-ID")
        .ok_or_else(|| SigError::MissingMandatoryHeader("Call-ID".to_string()))?
        .to_string();
    let from = msg
        .from_address()
        .ok_or_else(|| SigError::MissingMandatoryHeader("From".to_string()))??;
    let from_tag = from
        .tag()
        .ok_or_else(|| SigError::MissingMandatoryHeader("From tag".to_string()))?
        .to_string();
    let to_tag = match msg.to_address() {
        Some(Ok(addr)) => addr.tag().map(|t| t.to_string()),
        _ => None,
    };
    Ok(DialogKey {
        call_id,
        from_tag,
        to_tag,
    })
}
